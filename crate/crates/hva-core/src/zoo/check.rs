//! Exhaustive comparison of a machine against a language oracle.
//!
//! For real-time vector machines the harness walks the trie of candidate
//! inputs once, carrying the deduplicated frontier of reachable
//! configurations downward, so shared prefixes are never re-executed.
//! Machines with empty-moves, group automata, and counter machines are run
//! per input instead. Every acceptance seen along the way is re-derived
//! through the engine and its trace replayed, so a verdict can never rest
//! on the walker alone.

use std::collections::{BTreeMap, HashSet};

use crate::automata::{HvaMachine, MachineIndex};
use crate::constructions::run_counter;
use crate::engine::{self, Outcome, RunOptions};
use crate::freegroup::run_efa;
use crate::numerics::QVector;

use super::ZooMachine;

/// Tuning for a check run.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Expansion budget handed to the engine for machines with
    /// empty-moves and for acceptance audits.
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { budget: 1_000_000 }
    }
}

/// One input on which the machine and the oracle did not agree, or on
/// which the harness could not reach a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    /// The machine and the oracle returned different verdicts.
    Disagree { input: String, machine: bool, oracle: bool },
    /// The engine ran out of budget before reaching a verdict.
    Inconclusive { input: String },
    /// The machine accepted but the engine audit could not confirm it:
    /// either the engine disagreed or the trace failed replay.
    TraceAuditFailed { input: String, message: String },
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckFailure::Disagree { input, machine, oracle } => {
                write!(f, "disagree on {input:?}: machine says {machine}, oracle says {oracle}")
            }
            CheckFailure::Inconclusive { input } => {
                write!(f, "inconclusive on {input:?}: expansion budget exhausted")
            }
            CheckFailure::TraceAuditFailed { input, message } => {
                write!(f, "trace audit failed on {input:?}: {message}")
            }
        }
    }
}

/// Outcome of a check run.
#[derive(Debug, Default)]
pub struct CheckReport {
    pub failures: Vec<CheckFailure>,
    pub inputs_checked: u64,
    pub accepts_seen: u64,
    pub accepts_audited: u64,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} inputs checked, {} accepted ({} audited), {} failures",
            self.inputs_checked,
            self.accepts_seen,
            self.accepts_audited,
            self.failures.len()
        )
    }
}

/// Compares the machine with the oracle on every string over the
/// machine's alphabet of length at most `max_len`.
pub fn check(
    machine: &ZooMachine,
    oracle: &dyn Fn(&str) -> bool,
    max_len: usize,
    opts: &CheckOptions,
) -> CheckReport {
    let mut report = CheckReport::default();
    match machine {
        ZooMachine::Hva(m) if !m.has_epsilon() => {
            let walker = Walker::new(m);
            let mut input = String::new();
            let frontier = walker.initial();
            walker.explore(&mut input, &frontier, max_len, oracle, opts, &mut report);
        }
        _ => {
            let alphabet = machine.alphabet();
            let mut layer = vec![String::new()];
            visit_single(machine, "", oracle, opts, &mut report);
            for _ in 0..max_len {
                let mut next = Vec::with_capacity(layer.len() * alphabet.len());
                for s in &layer {
                    for &c in &alphabet {
                        let mut t = s.clone();
                        t.push(c);
                        visit_single(machine, &t, oracle, opts, &mut report);
                        next.push(t);
                    }
                }
                layer = next;
            }
        }
    }
    report
}

/// Compares the machine with the oracle on exactly the given inputs. The
/// inputs must be over the machine's alphabet.
pub fn check_inputs(
    machine: &ZooMachine,
    oracle: &dyn Fn(&str) -> bool,
    inputs: &[String],
    opts: &CheckOptions,
) -> CheckReport {
    let mut report = CheckReport::default();
    match machine {
        ZooMachine::Hva(m) if !m.has_epsilon() => {
            let trie = Trie::from_inputs(inputs);
            let walker = Walker::new(m);
            let mut input = String::new();
            let frontier = walker.initial();
            walker.explore_trie(&mut input, &frontier, &trie, oracle, opts, &mut report);
        }
        _ => {
            for input in inputs {
                visit_single(machine, input, oracle, opts, &mut report);
            }
        }
    }
    report
}

/// Runs one input through the appropriate executor and records the
/// comparison (slow path, used for non-real-time machines).
fn visit_single(
    machine: &ZooMachine,
    input: &str,
    oracle: &dyn Fn(&str) -> bool,
    opts: &CheckOptions,
    report: &mut CheckReport,
) {
    report.inputs_checked += 1;
    let accepted = match machine {
        ZooMachine::Hva(m) => {
            let run_opts = RunOptions { budget: opts.budget, want_trace: true, dedup: true };
            let verdict = engine::run(m, input, &run_opts).expect("catalog input runs");
            match verdict.outcome {
                Outcome::Accept => {
                    report.accepts_seen += 1;
                    match &verdict.trace {
                        Some(trace) => match engine::replay_trace(m, input, trace) {
                            Ok(()) => report.accepts_audited += 1,
                            Err(e) => report.failures.push(CheckFailure::TraceAuditFailed {
                                input: input.to_owned(),
                                message: e.to_string(),
                            }),
                        },
                        None => report.failures.push(CheckFailure::TraceAuditFailed {
                            input: input.to_owned(),
                            message: "accept verdict carried no trace".to_owned(),
                        }),
                    }
                    true
                }
                Outcome::Reject => false,
                Outcome::Inconclusive => {
                    report.failures.push(CheckFailure::Inconclusive { input: input.to_owned() });
                    return;
                }
            }
        }
        ZooMachine::Efa(m) => {
            let run_opts = RunOptions { budget: opts.budget, want_trace: false, dedup: true };
            let verdict = run_efa(m, input, &run_opts).expect("catalog input runs");
            match verdict.outcome {
                Outcome::Accept => {
                    report.accepts_seen += 1;
                    true
                }
                Outcome::Reject => false,
                Outcome::Inconclusive => {
                    report.failures.push(CheckFailure::Inconclusive { input: input.to_owned() });
                    return;
                }
            }
        }
        ZooMachine::Counter(m) => {
            let accepted = run_counter(m, input).expect("catalog input runs");
            if accepted {
                report.accepts_seen += 1;
            }
            accepted
        }
    };
    let expected = oracle(input);
    if accepted != expected {
        report.failures.push(CheckFailure::Disagree {
            input: input.to_owned(),
            machine: accepted,
            oracle: expected,
        });
    }
}

/// A deduplicated set of reachable configurations at one input position
/// of a real-time machine. The position is implicit: it is the depth in
/// the trie walk.
type Frontier = Vec<(usize, QVector)>;

/// Prefix-sharing executor for real-time machines.
struct Walker<'a> {
    m: &'a HvaMachine,
    index: MachineIndex,
}

impl<'a> Walker<'a> {
    fn new(m: &'a HvaMachine) -> Self {
        assert!(!m.has_epsilon(), "the walker only handles real-time machines");
        let index = MachineIndex::build(m).expect("catalog machines are valid");
        Walker { m, index }
    }

    fn initial(&self) -> Frontier {
        vec![(self.index.start, self.m.initial_vector.clone())]
    }

    fn advance(&self, frontier: &Frontier, symbol: char) -> Frontier {
        let mut seen: HashSet<(usize, QVector)> = HashSet::new();
        let mut out = Vec::new();
        for (state, vector) in frontier {
            let is_initial = *vector == self.m.initial_vector;
            let Some(group) = self.index.by_symbol.get(&(*state, Some(symbol))) else {
                continue;
            };
            for &ti in group {
                let t = &self.m.transitions[ti];
                if !t.guard.admits(is_initial) {
                    continue;
                }
                let next = vector.mul_mat(&t.matrix).expect("validated dimensions");
                let target = self.index.target_of[ti];
                if seen.insert((target, next.clone())) {
                    out.push((target, next));
                }
            }
        }
        out
    }

    fn accepted(&self, frontier: &Frontier) -> bool {
        frontier
            .iter()
            .any(|(state, vector)| self.index.accepting[*state] && *vector == self.m.initial_vector)
    }

    /// Records the verdict for the current prefix and, on acceptance,
    /// audits it against an independent engine run plus trace replay.
    fn record(
        &self,
        input: &str,
        frontier: &Frontier,
        oracle: &dyn Fn(&str) -> bool,
        opts: &CheckOptions,
        report: &mut CheckReport,
    ) {
        report.inputs_checked += 1;
        let accepted = self.accepted(frontier);
        if accepted {
            report.accepts_seen += 1;
            self.audit(input, opts, report);
        }
        let expected = oracle(input);
        if accepted != expected {
            report.failures.push(CheckFailure::Disagree {
                input: input.to_owned(),
                machine: accepted,
                oracle: expected,
            });
        }
    }

    fn audit(&self, input: &str, opts: &CheckOptions, report: &mut CheckReport) {
        let run_opts = RunOptions { budget: opts.budget, want_trace: true, dedup: true };
        let verdict = match engine::run(self.m, input, &run_opts) {
            Ok(v) => v,
            Err(e) => {
                report.failures.push(CheckFailure::TraceAuditFailed {
                    input: input.to_owned(),
                    message: format!("engine refused the input: {e}"),
                });
                return;
            }
        };
        if verdict.outcome != Outcome::Accept {
            report.failures.push(CheckFailure::TraceAuditFailed {
                input: input.to_owned(),
                message: format!(
                    "walker accepted but the engine said {}",
                    verdict.outcome.as_str()
                ),
            });
            return;
        }
        let Some(trace) = &verdict.trace else {
            report.failures.push(CheckFailure::TraceAuditFailed {
                input: input.to_owned(),
                message: "accept verdict carried no trace".to_owned(),
            });
            return;
        };
        match engine::replay_trace(self.m, input, trace) {
            Ok(()) => report.accepts_audited += 1,
            Err(e) => report.failures.push(CheckFailure::TraceAuditFailed {
                input: input.to_owned(),
                message: e.to_string(),
            }),
        }
    }

    /// Depth-first walk of the complete alphabet trie up to `remaining`
    /// further symbols.
    fn explore(
        &self,
        input: &mut String,
        frontier: &Frontier,
        remaining: usize,
        oracle: &dyn Fn(&str) -> bool,
        opts: &CheckOptions,
        report: &mut CheckReport,
    ) {
        self.record(input, frontier, oracle, opts, report);
        if remaining == 0 {
            return;
        }
        for &symbol in &self.m.alphabet {
            let next = self.advance(frontier, symbol);
            input.push(symbol);
            self.explore(input, &next, remaining - 1, oracle, opts, report);
            input.pop();
        }
    }

    /// Depth-first walk of an explicit input trie; verdicts are recorded
    /// only at nodes that correspond to listed inputs.
    fn explore_trie(
        &self,
        input: &mut String,
        frontier: &Frontier,
        node: &Trie,
        oracle: &dyn Fn(&str) -> bool,
        opts: &CheckOptions,
        report: &mut CheckReport,
    ) {
        if node.terminal {
            self.record(input, frontier, oracle, opts, report);
        }
        for (&symbol, child) in &node.children {
            let next = self.advance(frontier, symbol);
            input.push(symbol);
            self.explore_trie(input, &next, child, oracle, opts, report);
            input.pop();
        }
    }
}

/// Prefix tree over explicit input lists, so the walker can share work
/// across inputs with common prefixes.
#[derive(Default)]
struct Trie {
    terminal: bool,
    children: BTreeMap<char, Trie>,
}

impl Trie {
    fn from_inputs(inputs: &[String]) -> Trie {
        let mut root = Trie::default();
        for input in inputs {
            let mut node = &mut root;
            for c in input.chars() {
                node = node.children.entry(c).or_default();
            }
            node.terminal = true;
        }
        root
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build, machines, oracles};
    use super::*;

    #[test]
    fn exhaustive_check_agrees_on_thm51() {
        let entry = build("thm51").unwrap();
        let report = check(&entry.machine, &*entry.oracle, 7, &CheckOptions::default());
        assert!(report.ok(), "failures: {:?}", report.failures);
        assert_eq!(report.inputs_checked, 255); // 2^8 - 1 strings over {a,b}
        assert!(report.accepts_seen > 0);
        assert_eq!(report.accepts_seen, report.accepts_audited);
    }

    #[test]
    fn walker_matches_engine_on_every_string() {
        // The walker and the engine must be two views of one semantics,
        // on rejected strings as well as accepted ones.
        for name in ["thm51", "pow_r", "upow", "subsetsum_r"] {
            let entry = build(name).unwrap();
            let ZooMachine::Hva(m) = &entry.machine else {
                panic!("expected a vector machine");
            };
            let walker = Walker::new(m);
            let alphabet = m.alphabet.clone();
            for input in oracles::strings_over(&alphabet, 5) {
                let mut frontier = walker.initial();
                for c in input.chars() {
                    frontier = walker.advance(&frontier, c);
                }
                let verdict = engine::run(m, &input, &RunOptions::default()).expect("valid input");
                let engine_accepts = verdict.outcome == Outcome::Accept;
                assert_eq!(
                    walker.accepted(&frontier),
                    engine_accepts,
                    "{name} walker and engine disagree on {input:?}"
                );
            }
        }
    }

    #[test]
    fn corrupted_machine_is_caught() {
        let entry = build("thm51").unwrap();
        let ZooMachine::Hva(mut m) = entry.machine else {
            panic!("expected a vector machine");
        };
        // Damage one matrix entry; the walker must now disagree with the
        // oracle somewhere within short strings.
        m.transitions[0].matrix = crate::numerics::QMatrix::from_i64(&[&[1, 0], &[2, 1]]);
        let report = check(&ZooMachine::Hva(m), &*entry.oracle, 6, &CheckOptions::default());
        assert!(!report.ok(), "the corruption must surface as a disagreement");
        assert!(report.failures.iter().any(|f| matches!(f, CheckFailure::Disagree { .. })));
    }

    #[test]
    fn list_check_only_visits_listed_inputs() {
        let entry = build("anbn").unwrap();
        let inputs: Vec<String> =
            ["", "ab", "aabb", "aab", "ba"].iter().map(|s| (*s).to_owned()).collect();
        let report =
            check_inputs(&entry.machine, &*entry.oracle, &inputs, &CheckOptions::default());
        assert!(report.ok(), "failures: {:?}", report.failures);
        assert_eq!(report.inputs_checked, 5);
        assert_eq!(report.accepts_seen, 3); // "", "ab", "aabb"
    }

    #[test]
    fn counter_machines_check_per_input() {
        let machine = ZooMachine::Counter(machines::abc_counters());
        let report = check(&machine, &oracles::abc_counters, 6, &CheckOptions::default());
        assert!(report.ok(), "failures: {:?}", report.failures);
        assert_eq!(report.inputs_checked, 1093); // sum of 3^d for d <= 6
    }

    #[test]
    fn group_automata_check_per_input() {
        let entry = build("wp_f2").unwrap();
        let report = check(&entry.machine, &*entry.oracle, 4, &CheckOptions::default());
        assert!(report.ok(), "failures: {:?}", report.failures);
        assert_eq!(report.inputs_checked, 341); // sum of 4^d for d <= 4
    }

    #[test]
    fn duplicate_list_inputs_are_checked_once() {
        let entry = build("anbn").unwrap();
        let inputs = vec!["ab".to_owned(), "ab".to_owned()];
        let report =
            check_inputs(&entry.machine, &*entry.oracle, &inputs, &CheckOptions::default());
        assert_eq!(report.inputs_checked, 1);
    }
}
