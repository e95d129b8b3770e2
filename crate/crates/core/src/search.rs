//! Lexicographically-first backtracking over finite-domain variables.
//!
//! Variables are assigned in index order with values tried in increasing
//! order, so the first complete assignment that satisfies every constraint is
//! the lexicographic minimum. Each constraint names its trigger: the largest
//! variable index it reads. It is checked as soon as that variable is set.

pub(crate) type Check<'a> = Box<dyn Fn(&[usize]) -> bool + Send + Sync + 'a>;

pub(crate) struct Constraint<'a> {
    pub trigger: usize,
    pub check: Check<'a>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LexOutcome {
    Found(Vec<usize>),
    Exhausted,
    BudgetExceeded,
}

/// `budget` bounds the number of value trials; `None` is unlimited.
pub(crate) fn lex_first(
    var_count: usize,
    domain: usize,
    constraints: &[Constraint<'_>],
    budget: Option<u64>,
    mut should_stop: impl FnMut() -> bool,
) -> (LexOutcome, u64) {
    let mut by_trigger: Vec<Vec<usize>> = vec![Vec::new(); var_count];
    for (i, c) in constraints.iter().enumerate() {
        by_trigger[c.trigger].push(i);
    }
    if var_count == 0 {
        return (LexOutcome::Found(Vec::new()), 0);
    }
    if domain == 0 {
        return (LexOutcome::Exhausted, 0);
    }
    let mut assign = vec![0usize; var_count];
    // next value to try at each depth
    let mut next = vec![0usize; var_count];
    let mut depth = 0usize;
    let mut trials = 0u64;
    loop {
        if next[depth] == domain {
            next[depth] = 0;
            if depth == 0 {
                return (LexOutcome::Exhausted, trials);
            }
            depth -= 1;
            continue;
        }
        if budget.is_some_and(|b| trials >= b) || (trials.is_multiple_of(1024) && should_stop()) {
            return (LexOutcome::BudgetExceeded, trials);
        }
        trials += 1;
        assign[depth] = next[depth];
        next[depth] += 1;
        let ok = by_trigger[depth]
            .iter()
            .all(|&ci| (constraints[ci].check)(&assign[..=depth]));
        if ok {
            if depth + 1 == var_count {
                return (LexOutcome::Found(assign), trials);
            }
            depth += 1;
        }
    }
}
