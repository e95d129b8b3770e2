//! Labeling problems: locally verifiable (radius-r ball predicates) and
//! component-wise verifiable (whole-component predicates).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{extract_ball, BallView, GraphError, InputInstance, NodeId};
use crate::label::{Alphabet, Label, LabelError};
use crate::search::{lex_first, Constraint, LexOutcome};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("output of node {node} is {label:?}, not in the output alphabet")]
    AlphabetMismatch { node: usize, label: Label },
    #[error("input of node {node} is {label:?}, not in the input alphabet")]
    InputMismatch { node: usize, label: Label },
    #[error("labeling has {found} entries for {expected} nodes")]
    WrongLength { expected: usize, found: usize },
    #[error("problem {0:?} is only component-wise verifiable")]
    NotLocallyVerifiable(String),
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("unknown problem {0:?} (expected mis, coloring:K, leader or a problem file)")]
    UnknownProblem(String),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("reading problem file: {0}")]
    Io(#[from] std::io::Error),
}

/// An output labeling `λ_out`, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutputLabeling(Vec<Label>);

impl OutputLabeling {
    pub fn new(labels: Vec<Label>) -> Self {
        OutputLabeling(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn get(&self, v: usize) -> &Label {
        &self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(identifier, label)` pairs sorted by identifier.
    pub fn by_id(&self, instance: &InputInstance) -> Vec<(NodeId, Label)> {
        instance
            .nodes_by_id()
            .into_iter()
            .map(|v| (instance.id(v), self.0[v].clone()))
            .collect()
    }
}

/// A ball with candidate outputs attached, aligned with `ball.nodes()`.
pub struct LabeledBall<'a> {
    pub ball: &'a BallView,
    pub outputs: Vec<&'a Label>,
}

impl<'a> LabeledBall<'a> {
    pub fn output_of(&self, id: NodeId) -> Option<&'a Label> {
        self.ball.position(id).map(|i| self.outputs[i])
    }

    pub fn center_output(&self) -> &'a Label {
        self.output_of(self.ball.center().id).expect("center is in the ball")
    }

    pub fn neighbor_outputs(&self, id: NodeId) -> Vec<&'a Label> {
        self.ball.neighbors_of(id).filter_map(|u| self.output_of(u)).collect()
    }
}

/// One connected component of an instance with its outputs.
pub struct LabeledComponent<'a> {
    pub instance: &'a InputInstance,
    pub nodes: &'a [usize],
    pub outputs: &'a [Label],
}

pub type LocalPredicate = Arc<dyn Fn(&LabeledBall<'_>) -> bool + Send + Sync>;
pub type ComponentPredicate = Arc<dyn Fn(&LabeledComponent<'_>) -> bool + Send + Sync>;

/// Condition on the multiset of neighbor labels.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NeighborCondition {
    /// No neighbor may carry any of these.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub none_of: Vec<Label>,
    /// When nonempty, at least one neighbor must carry one of these.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub some_of: Vec<Label>,
}

impl NeighborCondition {
    fn holds(&self, neighbors: &[&Label]) -> bool {
        neighbors.iter().all(|l| !self.none_of.contains(l))
            && (self.some_of.is_empty() || neighbors.iter().any(|l| self.some_of.contains(l)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub center: Label,
    #[serde(default)]
    pub neighbors_condition: NeighborCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    ColoringLike,
    MisLike,
    Table,
}

/// Radius-1 declarative rules: a center is valid iff some rule for its label
/// accepts its neighbor labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub kind: RuleKind,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    fn holds(&self, center: &Label, neighbors: &[&Label]) -> bool {
        self.rules
            .iter()
            .any(|r| &r.center == center && r.neighbors_condition.holds(neighbors))
    }

    fn coloring(alphabet: &Alphabet) -> Self {
        let rules = alphabet
            .labels()
            .iter()
            .map(|c| Rule {
                center: c.clone(),
                neighbors_condition: NeighborCondition {
                    none_of: vec![c.clone()],
                    some_of: Vec::new(),
                },
            })
            .collect();
        RuleSet {
            kind: RuleKind::ColoringLike,
            rules,
        }
    }

    fn mis() -> Self {
        let (inn, out) = (Label::new("IN").unwrap(), Label::new("OUT").unwrap());
        RuleSet {
            kind: RuleKind::MisLike,
            rules: vec![
                Rule {
                    center: inn.clone(),
                    neighbors_condition: NeighborCondition {
                        none_of: vec![inn.clone()],
                        some_of: Vec::new(),
                    },
                },
                Rule {
                    center: out,
                    neighbors_condition: NeighborCondition {
                        none_of: Vec::new(),
                        some_of: vec![inn],
                    },
                },
            ],
        }
    }
}

#[derive(Clone)]
pub enum Validity {
    Rules(RuleSet),
    Local(LocalPredicate),
    Component(ComponentPredicate),
}

impl fmt::Debug for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Rules(r) => f.debug_tuple("Rules").field(r).finish(),
            Validity::Local(_) => f.write_str("Local(..)"),
            Validity::Component(_) => f.write_str("Component(..)"),
        }
    }
}

/// A labeling problem with its verification radius and output alphabet.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    name: String,
    radius: usize,
    input_alphabet: Option<Alphabet>,
    output_alphabet: Alphabet,
    validity: Validity,
}

impl ProblemSpec {
    /// A locally verifiable problem given by a ball predicate.
    pub fn local(
        name: impl Into<String>,
        radius: usize,
        output_alphabet: Alphabet,
        predicate: impl Fn(&LabeledBall<'_>) -> bool + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec {
            name: name.into(),
            radius,
            input_alphabet: None,
            output_alphabet,
            validity: Validity::Local(Arc::new(predicate)),
        }
    }

    /// A component-wise (not necessarily locally) verifiable problem.
    pub fn componentwise(
        name: impl Into<String>,
        output_alphabet: Alphabet,
        predicate: impl Fn(&LabeledComponent<'_>) -> bool + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec {
            name: name.into(),
            radius: 0,
            input_alphabet: None,
            output_alphabet,
            validity: Validity::Component(Arc::new(predicate)),
        }
    }

    pub fn from_rules(name: impl Into<String>, output_alphabet: Alphabet, rules: RuleSet) -> Result<Self, ProblemError> {
        for r in &rules.rules {
            for l in std::iter::once(&r.center)
                .chain(&r.neighbors_condition.none_of)
                .chain(&r.neighbors_condition.some_of)
            {
                if !output_alphabet.contains(l) {
                    return Err(ProblemError::Malformed(format!("rule label {l} not in output alphabet")));
                }
            }
        }
        Ok(ProblemSpec {
            name: name.into(),
            radius: 1,
            input_alphabet: None,
            output_alphabet,
            validity: Validity::Rules(rules),
        })
    }

    pub fn with_input_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.input_alphabet = Some(alphabet);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Verification radius; 0 for component-wise-only problems.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn input_alphabet(&self) -> Option<&Alphabet> {
        self.input_alphabet.as_ref()
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    pub fn is_locally_verifiable(&self) -> bool {
        !matches!(self.validity, Validity::Component(_))
    }

    /// Ball predicate on `N_r[v]` with outputs aligned to `ball.nodes()`.
    /// Panics for component-wise problems.
    pub fn holds_at(&self, ball: &BallView, outputs: Vec<&Label>) -> bool {
        let lb = LabeledBall { ball, outputs };
        match &self.validity {
            Validity::Rules(rules) => {
                let center = ball.center().id;
                rules.holds(lb.center_output(), &lb.neighbor_outputs(center))
            }
            Validity::Local(p) => p(&lb),
            Validity::Component(_) => panic!("holds_at on a component-wise problem"),
        }
    }

    /// Component predicate; for locally verifiable problems, the conjunction
    /// of the ball predicate over the component.
    pub fn holds_on_component(&self, instance: &InputInstance, nodes: &[usize], outputs: &[Label]) -> bool {
        match &self.validity {
            Validity::Component(p) => p(&LabeledComponent {
                instance,
                nodes,
                outputs,
            }),
            _ => nodes.iter().all(|&v| {
                let ball = extract_ball(instance, v, self.radius).expect("node in instance");
                self.holds_at(&ball, attach(&ball, instance, outputs))
            }),
        }
    }

    fn check_labels(&self, instance: &InputInstance, out: &OutputLabeling) -> Result<(), ProblemError> {
        if out.len() != instance.node_count() {
            return Err(ProblemError::WrongLength {
                expected: instance.node_count(),
                found: out.len(),
            });
        }
        if let Some((node, label)) = out
            .labels()
            .iter()
            .enumerate()
            .find(|(_, l)| !self.output_alphabet.contains(l))
        {
            return Err(ProblemError::AlphabetMismatch {
                node,
                label: label.clone(),
            });
        }
        if let Some(inputs) = &self.input_alphabet {
            if let Some((node, label)) = instance.inputs().iter().enumerate().find(|(_, l)| !inputs.contains(l)) {
                return Err(ProblemError::InputMismatch {
                    node,
                    label: label.clone(),
                });
            }
        }
        Ok(())
    }

    /// Serializable form for declarative problems; `None` for predicates
    /// given as code.
    pub fn to_file(&self) -> Option<ProblemFile> {
        match &self.validity {
            Validity::Rules(rules) => Some(ProblemFile {
                name: self.name.clone(),
                radius: 1,
                output_alphabet: self.output_alphabet.clone(),
                kind: rules.kind,
                allowed: rules.rules.clone(),
            }),
            _ => None,
        }
    }
}

/// Outputs of the nodes of `ball`, in ball storage order.
pub(crate) fn attach<'a>(ball: &BallView, instance: &InputInstance, outputs: &'a [Label]) -> Vec<&'a Label> {
    ball.nodes()
        .iter()
        .map(|u| &outputs[instance.node_with_id(u.id).expect("ball node in instance")])
        .collect()
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// The smallest-identifier node whose ball predicate fails.
    Node {
        node: usize,
        id: NodeId,
        view: BallView,
        outputs: Vec<Label>,
    },
    /// A component (indexed by smallest member) whose predicate fails.
    Component { index: usize, nodes: Vec<usize> },
}

#[derive(Debug, Clone)]
pub enum VerificationResult {
    Valid,
    Invalid(Witness),
}

impl VerificationResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerificationResult::Valid)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            VerificationResult::Valid => None,
            VerificationResult::Invalid(w) => Some(w),
        }
    }
}

pub fn verify_locally(
    problem: &ProblemSpec,
    instance: &InputInstance,
    out: &OutputLabeling,
) -> Result<VerificationResult, ProblemError> {
    if !problem.is_locally_verifiable() {
        return Err(ProblemError::NotLocallyVerifiable(problem.name.clone()));
    }
    problem.check_labels(instance, out)?;
    for v in instance.nodes_by_id() {
        let ball = extract_ball(instance, v, problem.radius)?;
        let outputs = attach(&ball, instance, out.labels());
        if !problem.holds_at(&ball, outputs.clone()) {
            return Ok(VerificationResult::Invalid(Witness::Node {
                node: v,
                id: instance.id(v),
                outputs: outputs.into_iter().cloned().collect(),
                view: ball,
            }));
        }
    }
    Ok(VerificationResult::Valid)
}

pub fn verify_componentwise(
    problem: &ProblemSpec,
    instance: &InputInstance,
    out: &OutputLabeling,
) -> Result<VerificationResult, ProblemError> {
    problem.check_labels(instance, out)?;
    for (index, nodes) in instance.graph().components().into_iter().enumerate() {
        if !problem.holds_on_component(instance, &nodes, out.labels()) {
            return Ok(VerificationResult::Invalid(Witness::Component { index, nodes }));
        }
    }
    Ok(VerificationResult::Valid)
}

/// Verifies with the most specific verifier the problem supports.
pub fn verify(problem: &ProblemSpec, instance: &InputInstance, out: &OutputLabeling) -> Result<VerificationResult, ProblemError> {
    if problem.is_locally_verifiable() {
        verify_locally(problem, instance, out)
    } else {
        verify_componentwise(problem, instance, out)
    }
}

/// Lexicographically smallest valid labeling, nodes taken in identifier order
/// and labels in alphabet order; `None` when no valid labeling exists.
pub fn brute_force_solve(problem: &ProblemSpec, instance: &InputInstance) -> Option<OutputLabeling> {
    let order = instance.nodes_by_id();
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let alphabet = problem.output_alphabet().labels();
    let to_outputs = |a: &[usize]| -> Vec<Label> {
        // only called once every node the check reads is assigned
        (0..order.len())
            .map(|v| alphabet[a.get(pos[v]).copied().unwrap_or(0)].clone())
            .collect()
    };
    let mut constraints = Vec::new();
    if problem.is_locally_verifiable() {
        for &v in &order {
            let ball = extract_ball(instance, v, problem.radius()).expect("node in instance");
            let scope: Vec<usize> = ball
                .nodes()
                .iter()
                .map(|u| pos[instance.node_with_id(u.id).unwrap()])
                .collect();
            let trigger = *scope.iter().max().unwrap();
            constraints.push(Constraint {
                trigger,
                check: Box::new(move |a: &[usize]| {
                    let outs: Vec<&Label> = scope.iter().map(|&p| &alphabet[a[p]]).collect();
                    problem.holds_at(&ball, outs)
                }),
            });
        }
    } else {
        for nodes in instance.graph().components() {
            let trigger = nodes.iter().map(|&v| pos[v]).max().unwrap();
            let to_outputs = &to_outputs;
            constraints.push(Constraint {
                trigger,
                check: Box::new(move |a: &[usize]| problem.holds_on_component(instance, &nodes, &to_outputs(a))),
            });
        }
    }
    match lex_first(order.len(), alphabet.len(), &constraints, None, || false).0 {
        LexOutcome::Found(a) => {
            let mut labels = vec![alphabet[0].clone(); order.len()];
            for (i, &v) in order.iter().enumerate() {
                labels[v] = alphabet[a[i]].clone();
            }
            Some(OutputLabeling(labels))
        }
        _ => None,
    }
}

/// Proper `k`-coloring, labels `A, B, C, ...` (or `c0, c1, ...` past 26).
pub fn make_coloring(k: usize) -> ProblemSpec {
    assert!(k >= 1, "coloring needs at least one color");
    let labels: Vec<Label> = (0..k)
        .map(|i| {
            if k <= 26 {
                Label::new(((b'A' + i as u8) as char).to_string()).unwrap()
            } else {
                Label::new(format!("c{i}")).unwrap()
            }
        })
        .collect();
    let alphabet = Alphabet::new(labels).unwrap();
    let rules = RuleSet::coloring(&alphabet);
    ProblemSpec::from_rules(format!("coloring-{k}"), alphabet, rules).unwrap()
}

/// Maximal independent set over `(IN, OUT)`.
pub fn make_mis() -> ProblemSpec {
    let alphabet = Alphabet::parse_list(&["IN", "OUT"]).unwrap();
    ProblemSpec::from_rules("mis", alphabet, RuleSet::mis()).unwrap()
}

/// Leader election: exactly one `L` per component. Component-wise verifiable
/// but not locally verifiable.
pub fn make_leader_election() -> ProblemSpec {
    let alphabet = Alphabet::parse_list(&["F", "L"]).unwrap();
    ProblemSpec::componentwise("leader", alphabet, |c| {
        c.nodes.iter().filter(|&&v| c.outputs[v].as_str() == "L").count() == 1
    })
}

/// On-disk form of a declarative radius-1 problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub name: String,
    pub radius: usize,
    pub output_alphabet: Alphabet,
    pub kind: RuleKind,
    #[serde(default)]
    pub allowed: Vec<Rule>,
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<ProblemSpec, ProblemError> {
        if self.radius != 1 {
            return Err(ProblemError::Malformed(format!("radius must be 1, got {}", self.radius)));
        }
        let derived = match self.kind {
            RuleKind::ColoringLike => Some(RuleSet::coloring(&self.output_alphabet)),
            RuleKind::MisLike => {
                let mut want = vec!["IN", "OUT"];
                let mut have: Vec<&str> = self.output_alphabet.labels().iter().map(Label::as_str).collect();
                want.sort_unstable();
                have.sort_unstable();
                if want != have {
                    return Err(ProblemError::Malformed("mis-like problems use the alphabet {IN, OUT}".into()));
                }
                Some(RuleSet::mis())
            }
            RuleKind::Table => None,
        };
        let rules = match derived {
            Some(d) => {
                if !self.allowed.is_empty() && self.allowed != d.rules {
                    return Err(ProblemError::Malformed(format!(
                        "allowed list disagrees with kind {:?}",
                        self.kind
                    )));
                }
                d
            }
            None => {
                if self.allowed.is_empty() {
                    return Err(ProblemError::Malformed("table problems need a nonempty allowed list".into()));
                }
                RuleSet {
                    kind: RuleKind::Table,
                    rules: self.allowed,
                }
            }
        };
        ProblemSpec::from_rules(self.name, self.output_alphabet, rules)
    }
}

pub fn parse_problem(json: &str) -> Result<ProblemSpec, ProblemError> {
    let file: ProblemFile = serde_json::from_str(json).map_err(|e| ProblemError::Malformed(e.to_string()))?;
    file.into_problem()
}

pub fn load_problem(path: &std::path::Path) -> Result<ProblemSpec, ProblemError> {
    parse_problem(&std::fs::read_to_string(path)?)
}

/// Resolves `mis`, `coloring:K`, `leader`, or a path to a problem file.
pub fn problem_by_name(name: &str) -> Result<ProblemSpec, ProblemError> {
    if name == "mis" {
        return Ok(make_mis());
    }
    if name == "leader" {
        return Ok(make_leader_election());
    }
    if let Some(k) = name.strip_prefix("coloring:") {
        return match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(make_coloring(k)),
            _ => Err(ProblemError::UnknownProblem(name.into())),
        };
    }
    let path = std::path::Path::new(name);
    if path.exists() {
        return load_problem(path);
    }
    Err(ProblemError::UnknownProblem(name.into()))
}
