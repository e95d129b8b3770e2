use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{id_range, Graph, GraphError, InputInstance, NodeId};
use crate::label::{Alphabet, Label};

/// Parameters of an exhaustive input family: every graph on `n` nodes, every
/// injective identifier assignment into `{1, ..., n^c}`, every input labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFamilySpec {
    pub n: usize,
    pub c: u32,
    pub input_alphabet: Alphabet,
    /// Keep only graphs whose maximum degree is at most this.
    pub max_degree: Option<usize>,
}

impl InstanceFamilySpec {
    pub fn new(n: usize, c: u32, input_alphabet: Alphabet) -> Self {
        InstanceFamilySpec {
            n,
            c,
            input_alphabet,
            max_degree: None,
        }
    }

    pub fn with_max_degree(mut self, delta: usize) -> Self {
        self.max_degree = Some(delta);
        self
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if self.c == 0 {
            return Err(GraphError::BadExponent);
        }
        if pair_count(self.n) > 63 {
            return Err(GraphError::TooManyNodes(self.n));
        }
        id_range(self.n, self.c)?;
        if let Some(delta) = self.max_degree {
            if delta > self.n - 1 {
                return Err(GraphError::BadDegreeBound { delta, max: self.n - 1 });
            }
        }
        Ok(())
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Node pairs `(a, b)`, `a < b`, in lexicographic order. Bit `k` of an edge
/// mask selects the `k`-th pair.
fn node_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Lazily yields the family in a fixed order: edge mask ascending, then
/// identifier tuple `(id(0), ..., id(n-1))` lexicographic, then input tuple
/// lexicographic under the alphabet order.
pub fn enumerate_instances(spec: &InstanceFamilySpec) -> Result<Instances, GraphError> {
    spec.validate()?;
    let max_id = id_range(spec.n, spec.c)?;
    Ok(Instances {
        n: spec.n,
        c: spec.c,
        alphabet: spec.input_alphabet.labels().to_vec(),
        max_degree: spec.max_degree,
        max_id,
        pairs: node_pairs(spec.n),
        mask: 0,
        graph: None,
        ids: Vec::new(),
        inputs: Vec::new(),
        done: false,
    })
}

pub struct Instances {
    n: usize,
    c: u32,
    alphabet: Vec<Label>,
    max_degree: Option<usize>,
    max_id: NodeId,
    pairs: Vec<(usize, usize)>,
    mask: u64,
    graph: Option<Graph>,
    ids: Vec<NodeId>,
    inputs: Vec<usize>,
    done: bool,
}

impl Instances {
    fn mask_limit(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    /// Moves to the next admissible graph starting at `self.mask`, resetting
    /// the inner counters.
    fn load_graph(&mut self) -> bool {
        while self.mask < self.mask_limit() {
            let edges = self
                .pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| self.mask >> k & 1 == 1)
                .map(|(_, &p)| p);
            let g = Graph::new(self.n, edges).expect("pairs are simple");
            if self.max_degree.is_none_or(|d| g.max_degree() <= d) {
                self.graph = Some(g);
                self.ids = (1..=self.n as NodeId).collect();
                self.inputs = vec![0; self.n];
                return true;
            }
            self.mask += 1;
        }
        false
    }

    fn advance_inputs(&mut self) -> bool {
        let k = self.alphabet.len();
        for i in (0..self.n).rev() {
            if self.inputs[i] + 1 < k {
                self.inputs[i] += 1;
                for j in i + 1..self.n {
                    self.inputs[j] = 0;
                }
                return true;
            }
        }
        false
    }

    /// Next injective tuple in lexicographic order.
    fn advance_ids(&mut self) -> bool {
        let n = self.n;
        for i in (0..n).rev() {
            let used: Vec<NodeId> = self.ids[..i].to_vec();
            let next = (self.ids[i] + 1..=self.max_id).find(|x| !used.contains(x));
            if let Some(x) = next {
                self.ids[i] = x;
                let mut taken = used;
                taken.push(x);
                let mut cand = 1;
                for j in i + 1..n {
                    while taken.contains(&cand) {
                        cand += 1;
                    }
                    self.ids[j] = cand;
                    taken.push(cand);
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Instances {
    type Item = InputInstance;

    fn next(&mut self) -> Option<InputInstance> {
        if self.done {
            return None;
        }
        if self.graph.is_none() && !self.load_graph() {
            self.done = true;
            return None;
        }
        let graph = self.graph.clone().unwrap();
        let inputs = self.inputs.iter().map(|&i| self.alphabet[i].clone()).collect();
        let inst = InputInstance::new(graph, self.ids.clone(), inputs, self.c).expect("enumerated instance is valid");
        if !self.advance_inputs() {
            for x in &mut self.inputs {
                *x = 0;
            }
            if !self.advance_ids() {
                self.mask += 1;
                self.graph = None;
            }
        }
        Some(inst)
    }
}

/// `2^C(n,2) · n^(c·n) · |Σ_in|^n`, the family-size upper bound, with the
/// identifier factor `2^(c·n·log₂ n)` evaluated exactly as `n^(c·n)`.
pub fn count_bound(spec: &InstanceFamilySpec) -> Result<BigUint, GraphError> {
    spec.validate()?;
    let n = spec.n;
    let graphs = BigUint::from(1u32) << pair_count(n);
    let ids = BigUint::from(n).pow((spec.c as usize * n) as u32);
    let labels = BigUint::from(spec.input_alphabet.len()).pow(n as u32);
    Ok(graphs * ids * labels)
}
