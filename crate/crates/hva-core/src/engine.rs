//! Exact execution of homing vector automata.
//!
//! [`run`] explores the configuration space breadth-first by total moves
//! (epsilon moves count), merging duplicate `(state, position, vector)`
//! configurations by exact vector equality. A run accepts as soon as some
//! configuration has consumed the whole input in an accept state with the
//! vector restored to the initial vector; epsilon moves are still permitted
//! after the last input symbol. Because successors are generated in
//! transition declaration order, the returned trace is the
//! lexicographically first accepting path of minimal length.
//!
//! Machines without epsilon transitions have a finite configuration tree of
//! depth `|input|`, so their runs always terminate with `accept` or
//! `reject`; the expansion budget is not consulted for them. Machines with
//! epsilon transitions can chase unboundedly growing vectors, so their runs
//! stop with [`Outcome::Inconclusive`] once `budget` configurations have
//! been expanded with frontier remaining.

use std::collections::{HashSet, VecDeque};

use serde_json::json;
use thiserror::Error;

use crate::automata::{Guard, HvaMachine, MachineIndex};
use crate::numerics::QVector;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input symbol {symbol:?} at position {position} is outside the machine alphabet")]
    SymbolOutsideAlphabet { symbol: char, position: usize },
    #[error("machine is not runnable: {0}")]
    InvalidMachine(String),
    #[error("bad configuration: {0}")]
    BadConfiguration(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject,
    /// Only possible for machines with epsilon transitions: the expansion
    /// budget ran out while the frontier was still nonempty.
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accept => "accept",
            Outcome::Reject => "reject",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    /// Configurations dequeued and expanded.
    pub configurations_expanded: u64,
    /// Largest frontier (queue length) observed.
    pub max_frontier: usize,
}

/// One applied transition in an accepting path, together with the
/// configuration it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based move number.
    pub step: usize,
    pub symbol: Option<char>,
    pub from: String,
    pub to: String,
    pub guard: Guard,
    pub vector_after: QVector,
    /// Index into `machine.transitions` of the applied transition.
    pub transition_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Present on accept when tracing was requested: the lexicographically
    /// first accepting path of minimal length (empty for an accepted empty
    /// run).
    pub trace: Option<Vec<TraceStep>>,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub state: String,
    /// Number of input symbols consumed so far.
    pub pos: usize,
    pub vector: QVector,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Maximum configurations expanded before a machine with epsilon
    /// transitions gives up with `Inconclusive`.
    pub budget: u64,
    pub want_trace: bool,
    /// Merge duplicate `(state, position, vector)` configurations.
    pub dedup: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { budget: 1_000_000, want_trace: true, dedup: true }
    }
}

/// The one-bit observation a non-blind machine may branch on: does the
/// current vector equal the initial vector? Exact comparison of normalized
/// rationals.
pub fn omega(current: &QVector, initial: &QVector) -> bool {
    current == initial
}

/// Runs the machine on the input. The machine is assumed validated; every
/// input character must belong to its alphabet (checked before stepping).
pub fn run(m: &HvaMachine, input: &str, opts: &RunOptions) -> Result<Verdict, RunError> {
    let index = MachineIndex::build(m).map_err(RunError::InvalidMachine)?;
    let chars = checked_chars(m, input)?;
    let n = chars.len();
    let v0 = &m.initial_vector;

    struct Node {
        state: usize,
        pos: usize,
        vector: QVector,
        parent: Option<(usize, usize)>,
    }

    fn build_trace(m: &HvaMachine, nodes: &[Node]) -> Vec<TraceStep> {
        let mut reversed = Vec::new();
        let mut cursor = nodes.len() - 1;
        while let Some((parent, ti)) = nodes[cursor].parent {
            reversed.push((cursor, ti));
            cursor = parent;
        }
        reversed.reverse();
        reversed
            .into_iter()
            .enumerate()
            .map(|(i, (node, ti))| {
                let t = &m.transitions[ti];
                TraceStep {
                    step: i + 1,
                    symbol: t.symbol,
                    from: t.from.clone(),
                    to: t.to.clone(),
                    guard: t.guard,
                    vector_after: nodes[node].vector.clone(),
                    transition_index: ti,
                }
            })
            .collect()
    }

    let mut nodes = vec![Node { state: index.start, pos: 0, vector: v0.clone(), parent: None }];
    let mut stats = RunStats { configurations_expanded: 0, max_frontier: 1 };

    if n == 0 && index.accepting[index.start] {
        let trace = opts.want_trace.then(Vec::new);
        return Ok(Verdict { outcome: Outcome::Accept, trace, stats });
    }

    let mut visited: HashSet<(usize, usize, QVector)> = HashSet::new();
    if opts.dedup {
        visited.insert((index.start, 0, v0.clone()));
    }
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    let budgeted = index.has_epsilon;
    let mut applicable: Vec<usize> = Vec::new();

    while let Some(id) = queue.pop_front() {
        if budgeted && stats.configurations_expanded >= opts.budget {
            return Ok(Verdict { outcome: Outcome::Inconclusive, trace: None, stats });
        }
        stats.configurations_expanded += 1;
        let (state, pos) = (nodes[id].state, nodes[id].pos);
        let is_initial = omega(&nodes[id].vector, v0);

        applicable.clear();
        if pos < n {
            if let Some(group) = index.by_symbol.get(&(state, Some(chars[pos]))) {
                applicable.extend_from_slice(group);
            }
        }
        if let Some(group) = index.by_symbol.get(&(state, None)) {
            applicable.extend_from_slice(group);
        }
        // Merge the symbol and epsilon groups back into declaration order.
        applicable.sort_unstable();

        for &ti in &applicable {
            let t = &m.transitions[ti];
            if !t.guard.admits(is_initial) {
                continue;
            }
            let vector = nodes[id]
                .vector
                .mul_mat(&t.matrix)
                .map_err(|e| RunError::InvalidMachine(e.to_string()))?;
            let next_pos = if t.symbol.is_some() { pos + 1 } else { pos };
            let next_state = index.target_of[ti];
            if opts.dedup && !visited.insert((next_state, next_pos, vector.clone())) {
                continue;
            }
            let accepted = next_pos == n && index.accepting[next_state] && omega(&vector, v0);
            nodes.push(Node { state: next_state, pos: next_pos, vector, parent: Some((id, ti)) });
            if accepted {
                let trace = opts.want_trace.then(|| build_trace(m, &nodes));
                return Ok(Verdict { outcome: Outcome::Accept, trace, stats });
            }
            queue.push_back(nodes.len() - 1);
        }
        stats.max_frontier = stats.max_frontier.max(queue.len());
    }

    Ok(Verdict { outcome: Outcome::Reject, trace: None, stats })
}

/// All configurations reachable from `c` in exactly one move, in transition
/// declaration order. Blind machines' successors never depend on the vector
/// observation because all their guards are `any`.
pub fn step(
    m: &HvaMachine,
    c: &Configuration,
    input: &str,
) -> Result<Vec<Configuration>, RunError> {
    let index = MachineIndex::build(m).map_err(RunError::InvalidMachine)?;
    let chars = checked_chars(m, input)?;
    if c.pos > chars.len() {
        return Err(RunError::BadConfiguration(format!(
            "position {} exceeds input length {}",
            c.pos,
            chars.len()
        )));
    }
    let &state = index
        .state_of
        .get(&c.state)
        .ok_or_else(|| RunError::BadConfiguration(format!("unknown state {:?}", c.state)))?;
    if c.vector.dim() != m.dimension {
        return Err(RunError::BadConfiguration(format!(
            "vector has {} entries, machine dimension is {}",
            c.vector.dim(),
            m.dimension
        )));
    }
    let is_initial = omega(&c.vector, &m.initial_vector);

    let mut applicable: Vec<usize> = Vec::new();
    if c.pos < chars.len() {
        if let Some(group) = index.by_symbol.get(&(state, Some(chars[c.pos]))) {
            applicable.extend_from_slice(group);
        }
    }
    if let Some(group) = index.by_symbol.get(&(state, None)) {
        applicable.extend_from_slice(group);
    }
    applicable.sort_unstable();

    let mut out = Vec::with_capacity(applicable.len());
    for ti in applicable {
        let t = &m.transitions[ti];
        if !t.guard.admits(is_initial) {
            continue;
        }
        let vector =
            c.vector.mul_mat(&t.matrix).map_err(|e| RunError::InvalidMachine(e.to_string()))?;
        out.push(Configuration {
            state: t.to.clone(),
            pos: if t.symbol.is_some() { c.pos + 1 } else { c.pos },
            vector,
        });
    }
    Ok(out)
}

fn checked_chars(m: &HvaMachine, input: &str) -> Result<Vec<char>, RunError> {
    let allowed: HashSet<char> = m.alphabet.iter().copied().collect();
    let chars: Vec<char> = input.chars().collect();
    for (position, &symbol) in chars.iter().enumerate() {
        if !allowed.contains(&symbol) {
            return Err(RunError::SymbolOutsideAlphabet { symbol, position });
        }
    }
    Ok(chars)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("trace replay failed at step {step}: {message}")]
pub struct ReplayError {
    pub step: usize,
    pub message: String,
}

/// Re-executes an accept trace against the machine and input, verifying
/// every recorded move (source state, guard admissibility, consumed symbol,
/// exact vector product) and the final acceptance condition: all input
/// consumed, accept state, vector equal to the initial vector.
pub fn replay_trace(m: &HvaMachine, input: &str, trace: &[TraceStep]) -> Result<(), ReplayError> {
    let fail = |step: usize, message: String| Err(ReplayError { step, message });
    let chars: Vec<char> = input.chars().collect();
    let mut state = m.start.clone();
    let mut pos = 0usize;
    let mut vector = m.initial_vector.clone();
    for (i, ts) in trace.iter().enumerate() {
        let step = i + 1;
        let t = match m.transitions.get(ts.transition_index) {
            Some(t) => t,
            None => {
                return fail(step, format!("transition index {} out of range", ts.transition_index))
            }
        };
        if t.from != state {
            return fail(
                step,
                format!("transition leaves {:?} but machine is in {state:?}", t.from),
            );
        }
        if t.from != ts.from || t.to != ts.to || t.guard != ts.guard || t.symbol != ts.symbol {
            return fail(step, "trace step does not match the machine transition".to_owned());
        }
        if !t.guard.admits(omega(&vector, &m.initial_vector)) {
            return fail(
                step,
                format!("guard {:?} does not admit this configuration", t.guard.as_str()),
            );
        }
        if let Some(c) = t.symbol {
            if chars.get(pos) != Some(&c) {
                return fail(step, format!("input at position {pos} does not provide {c:?}"));
            }
            pos += 1;
        }
        vector = match vector.mul_mat(&t.matrix) {
            Ok(v) => v,
            Err(e) => return fail(step, e.to_string()),
        };
        if vector != ts.vector_after {
            return fail(step, "recorded vector does not match the exact product".to_owned());
        }
        state = t.to.clone();
    }
    let last = trace.len();
    if pos != chars.len() {
        return fail(last, format!("trace consumed {pos} of {} input symbols", chars.len()));
    }
    if !m.accept.contains(&state) {
        return fail(last, format!("final state {state:?} is not an accept state"));
    }
    if vector != m.initial_vector {
        return fail(last, "final vector differs from the initial vector".to_owned());
    }
    Ok(())
}

/// Renders a trace as the documented JSON form: a list of
/// `{step, symbol, from, to, guard, vector_after}` objects, with `symbol`
/// null on epsilon moves and vector entries in rational text form.
pub fn trace_to_json(trace: &[TraceStep]) -> serde_json::Value {
    json!(trace
        .iter()
        .map(|ts| {
            json!({
                "step": ts.step,
                "symbol": ts.symbol,
                "from": ts.from,
                "to": ts.to,
                "guard": ts.guard.as_str(),
                "vector_after": ts.vector_after.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Control, Head, ModeFlags, Transition};
    use crate::numerics::{QMatrix, Rational};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    /// Deterministic non-blind machine for { a^n b^n : n >= 0 }: `a` bumps
    /// the first entry, `b` drops it, and the homing condition checks the
    /// counts match.
    fn count_machine() -> HvaMachine {
        let bump = QMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        let drop = QMatrix::from_i64(&[&[1, 0], &[-1, 1]]);
        let t = |from: &str, symbol: char, guard: Guard, to: &str, matrix: &QMatrix| Transition {
            from: from.to_owned(),
            symbol: Some(symbol),
            guard,
            to: to.to_owned(),
            matrix: matrix.clone(),
        };
        HvaMachine {
            name: "count".to_owned(),
            mode: ModeFlags::new(Head::Realtime, Control::Deterministic, false),
            dimension: 2,
            alphabet: vec!['a', 'b'],
            states: vec!["up".to_owned(), "down".to_owned()],
            start: "up".to_owned(),
            accept: vec!["up".to_owned(), "down".to_owned()],
            initial_vector: QVector::from_i64(&[1, 1]),
            transitions: vec![
                t("up", 'a', Guard::Eq, "up", &bump),
                t("up", 'a', Guard::Neq, "up", &bump),
                t("up", 'b', Guard::Neq, "down", &drop),
                t("down", 'b', Guard::Neq, "down", &drop),
            ],
        }
    }

    /// One-way blind machine whose only path to acceptance is a chain of
    /// epsilon moves.
    fn epsilon_chain() -> HvaMachine {
        let id = QMatrix::identity(1);
        let eps = |from: &str, to: &str| Transition {
            from: from.to_owned(),
            symbol: None,
            guard: Guard::Any,
            to: to.to_owned(),
            matrix: id.clone(),
        };
        HvaMachine {
            name: "chain".to_owned(),
            mode: ModeFlags::new(Head::Oneway, Control::Nondeterministic, true),
            dimension: 1,
            alphabet: vec!['a'],
            states: vec!["s0".to_owned(), "s1".to_owned(), "s2".to_owned()],
            start: "s0".to_owned(),
            accept: vec!["s2".to_owned()],
            initial_vector: QVector::from_i64(&[1]),
            transitions: vec![eps("s0", "s1"), eps("s1", "s2")],
        }
    }

    #[test]
    fn omega_compares_normalized_values() {
        let a = QVector::from_rationals(vec![q(1, 2), q(1, 1)]);
        let b = QVector::from_rationals(vec![q(2, 4), q(1, 1)]);
        assert!(omega(&a, &b));
        let c = QVector::from_i64(&[1, 1]);
        assert!(!omega(&a, &c));
    }

    #[test]
    fn accepts_balanced_counts_with_replayable_trace() {
        let m = count_machine();
        let v = run(&m, "aabb", &RunOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Accept);
        let trace = v.trace.as_ref().unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[3].vector_after, m.initial_vector);
        replay_trace(&m, "aabb", trace).unwrap();
        // Deterministic runs visit at most |input| + 1 configurations.
        assert!(v.stats.configurations_expanded <= 5);
    }

    #[test]
    fn rejects_unbalanced_counts() {
        let m = count_machine();
        for bad in ["aab", "abb", "ba", "b", "aabbb"] {
            let v = run(&m, bad, &RunOptions::default()).unwrap();
            assert_eq!(v.outcome, Outcome::Reject, "{bad:?}");
            assert!(v.trace.is_none());
        }
    }

    #[test]
    fn empty_input_accepts_when_start_accepts() {
        let m = count_machine();
        let v = run(&m, "", &RunOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Accept);
        assert_eq!(v.trace.as_deref(), Some(&[][..]));
        replay_trace(&m, "", &[]).unwrap();
    }

    #[test]
    fn foreign_symbol_errors_before_stepping() {
        let m = count_machine();
        match run(&m, "axb", &RunOptions::default()) {
            Err(RunError::SymbolOutsideAlphabet { symbol: 'x', position: 1 }) => {}
            other => panic!("expected symbol error, got {other:?}"),
        }
    }

    #[test]
    fn realtime_machines_ignore_the_budget() {
        let m = count_machine();
        let opts = RunOptions { budget: 1, ..RunOptions::default() };
        let v = run(&m, "aaaabbbb", &opts).unwrap();
        assert_eq!(v.outcome, Outcome::Accept);
    }

    #[test]
    fn epsilon_budget_and_monotonicity() {
        let m = epsilon_chain();
        let starved = RunOptions { budget: 1, ..RunOptions::default() };
        assert_eq!(run(&m, "", &starved).unwrap().outcome, Outcome::Inconclusive);
        let mut accepted_trace = None;
        for budget in 3..8 {
            let opts = RunOptions { budget, ..RunOptions::default() };
            let v = run(&m, "", &opts).unwrap();
            assert_eq!(v.outcome, Outcome::Accept, "budget {budget}");
            let trace = v.trace.unwrap();
            if let Some(prev) = &accepted_trace {
                assert_eq!(&trace, prev, "trace must not depend on the budget");
            }
            accepted_trace = Some(trace);
        }
    }

    #[test]
    fn epsilon_cycles_are_merged_not_budgeted() {
        // A machine whose only epsilon move loops with the identity matrix:
        // deduplication collapses the loop, so the run rejects instead of
        // exhausting the budget.
        let mut m = epsilon_chain();
        m.transitions = vec![Transition {
            from: "s0".to_owned(),
            symbol: None,
            guard: Guard::Any,
            to: "s0".to_owned(),
            matrix: QMatrix::identity(1),
        }];
        let v = run(&m, "", &RunOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Reject);
    }

    #[test]
    fn growing_epsilon_chase_is_inconclusive() {
        // The epsilon loop doubles the vector forever; no accepting
        // configuration exists, and the configurations never repeat.
        let mut m = epsilon_chain();
        m.transitions = vec![Transition {
            from: "s0".to_owned(),
            symbol: None,
            guard: Guard::Any,
            to: "s0".to_owned(),
            matrix: QMatrix::from_i64(&[&[2]]),
        }];
        let opts = RunOptions { budget: 50, ..RunOptions::default() };
        let v = run(&m, "", &opts).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn step_lists_successors_in_declaration_order() {
        let m = count_machine();
        let start =
            Configuration { state: "up".to_owned(), pos: 0, vector: m.initial_vector.clone() };
        let succ = step(&m, &start, "ab").unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].state, "up");
        assert_eq!(succ[0].pos, 1);
        assert_eq!(succ[0].vector, QVector::from_i64(&[2, 1]));
    }

    #[test]
    fn blind_successors_ignore_the_initial_vector() {
        let mut m = count_machine();
        m.mode = ModeFlags::new(Head::Realtime, Control::Nondeterministic, true);
        for t in &mut m.transitions {
            t.guard = Guard::Any;
        }
        let c =
            Configuration { state: "up".to_owned(), pos: 0, vector: QVector::from_i64(&[1, 1]) };
        let before = step(&m, &c, "a").unwrap();
        // Perturb the initial vector used for guard evaluation; successors
        // of a blind machine must not change.
        m.initial_vector = QVector::from_i64(&[7, -3]);
        let after = step(&m, &c, "a").unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn replay_rejects_tampered_traces() {
        let m = count_machine();
        let v = run(&m, "ab", &RunOptions::default()).unwrap();
        let mut trace = v.trace.unwrap();
        trace[1].vector_after = QVector::from_i64(&[5, 5]);
        assert!(replay_trace(&m, "ab", &trace).is_err());
    }

    #[test]
    fn trace_json_shape() {
        let m = count_machine();
        let v = run(&m, "ab", &RunOptions::default()).unwrap();
        let json = trace_to_json(v.trace.as_ref().unwrap());
        let first = &json[0];
        assert_eq!(first["step"], 1);
        assert_eq!(first["symbol"], "a");
        assert_eq!(first["from"], "up");
        assert_eq!(first["to"], "up");
        assert_eq!(first["guard"], "eq");
        assert_eq!(first["vector_after"][0], "2");
        assert!(first.get("transition_index").is_none());
    }
}
