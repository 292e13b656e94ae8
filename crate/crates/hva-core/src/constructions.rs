//! Machine-to-machine compilers.
//!
//! Two families live here. The counter-automaton simulations turn
//! real-time deterministic counter machines into vector automata: a blind
//! k-counter machine becomes a blind machine of dimension k + 1 whose
//! vector carries `1 + counter_i` in entry i ([`simulate_blind_counters`]),
//! and a non-blind one-counter machine becomes a dimension-2 machine whose
//! equality guard plays the role of the zero test
//! ([`simulate_counter_nonblind`]).
//!
//! The closure constructions combine machines while keeping the homing
//! acceptance condition exact: product with a total DFA
//! ([`intersect_regular`]), block-diagonal product of two blind machines
//! ([`intersect_blind`]), and nondeterministic union, concatenation, and
//! star ([`union_nondet`], [`concat_nondet`], [`star_nondet`]). Union and
//! concatenation embed each operand in its own vector block and hold the
//! other block with identity matrices, so the combined vector returns to
//! its initial value exactly when the active operand's block does. Star
//! needs the equality guard to certify that the vector is home before each
//! restart, which is why it requires a non-blind operand.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    format_violations, Control, Guard, Head, HvaMachine, ModeFlags, Transition, Violation,
    ViolationCode,
};
use crate::engine::RunError;
use crate::numerics::{QMatrix, QVector, Rational};

// ---------------------------------------------------------------------------
// Counter machines
// ---------------------------------------------------------------------------

/// One counter's zero test: `=` holds exactly when the counter is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroTest {
    Zero,
    NonZero,
}

impl ZeroTest {
    pub fn to_char(self) -> char {
        match self {
            ZeroTest::Zero => '=',
            ZeroTest::NonZero => '≠',
        }
    }

    pub fn from_char(c: char) -> Option<ZeroTest> {
        match c {
            '=' => Some(ZeroTest::Zero),
            '≠' => Some(ZeroTest::NonZero),
            _ => None,
        }
    }

    pub fn matches(self, counter: i64) -> bool {
        match self {
            ZeroTest::Zero => counter == 0,
            ZeroTest::NonZero => counter != 0,
        }
    }
}

/// A real-time deterministic machine with integer counters.
///
/// Each step consumes one input symbol, moves the state, and adds -1, 0,
/// or +1 to each counter. A blind machine never looks at its counters
/// mid-run; a non-blind machine dispatches on the zero pattern of its
/// counters (one [`ZeroTest`] per counter) before every step. Where no
/// transition matches, the machine is stuck and the input is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterMachine {
    pub name: String,
    /// Number of counters; every increment list and zero pattern has this
    /// length.
    pub counters: usize,
    pub blind: bool,
    /// Whether acceptance requires all counters to be zero at input end in
    /// addition to an accept state. Blind machines have no other way to
    /// see their counters, so for them this is forced on; non-blind
    /// machines may accept on state alone.
    pub zero_acceptance: bool,
    pub alphabet: Vec<char>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: Vec<String>,
    pub transitions: Vec<CounterTransition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterTransition {
    pub from: String,
    pub symbol: char,
    /// Zero pattern dispatched on before the step; `None` on blind
    /// machines.
    pub pattern: Option<Vec<ZeroTest>>,
    pub to: String,
    /// One of -1, 0, +1 per counter.
    pub increments: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterDoc {
    name: String,
    counters: usize,
    blind: bool,
    zero_acceptance: bool,
    alphabet: Vec<char>,
    states: Vec<String>,
    start: String,
    accept: Vec<String>,
    transitions: Vec<CounterTransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterTransitionDoc {
    from: String,
    symbol: char,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<String>,
    to: String,
    increments: Vec<i64>,
}

#[derive(Debug, Error)]
pub enum CounterParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("transition {index}: bad zero pattern: {message}")]
    BadPattern { index: usize, message: String },
    #[error("machine failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

impl CounterMachine {
    pub fn from_json(text: &str) -> Result<CounterMachine, CounterParseError> {
        let doc: CounterDoc = serde_json::from_str(text).map_err(|e| {
            CounterParseError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
        })?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (index, t) in doc.transitions.into_iter().enumerate() {
            let pattern = match t.pattern {
                None => None,
                Some(text) => {
                    let mut tests = Vec::new();
                    for c in text.chars() {
                        tests.push(ZeroTest::from_char(c).ok_or_else(|| {
                            CounterParseError::BadPattern {
                                index,
                                message: format!("{c:?} is not '=' or '≠'"),
                            }
                        })?);
                    }
                    Some(tests)
                }
            };
            transitions.push(CounterTransition {
                from: t.from,
                symbol: t.symbol,
                pattern,
                to: t.to,
                increments: t.increments,
            });
        }
        let machine = CounterMachine {
            name: doc.name,
            counters: doc.counters,
            blind: doc.blind,
            zero_acceptance: doc.zero_acceptance,
            alphabet: doc.alphabet,
            states: doc.states,
            start: doc.start,
            accept: doc.accept,
            transitions,
        };
        let violations = machine.validate();
        if violations.is_empty() {
            Ok(machine)
        } else {
            Err(CounterParseError::Invalid(violations))
        }
    }

    pub fn to_json(&self) -> String {
        let doc = CounterDoc {
            name: self.name.clone(),
            counters: self.counters,
            blind: self.blind,
            zero_acceptance: self.zero_acceptance,
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            start: self.start.clone(),
            accept: self.accept.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| CounterTransitionDoc {
                    from: t.from.clone(),
                    symbol: t.symbol,
                    pattern: t.pattern.as_ref().map(|p| p.iter().map(|z| z.to_char()).collect()),
                    to: t.to.clone(),
                    increments: t.increments.clone(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("machine serializes");
        text.push('\n');
        text
    }

    /// Reports every validation violation; an empty list means the machine
    /// is well-formed and deterministic.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code: ViolationCode, message: String| {
            out.push(Violation { code, message });
        };
        if self.counters == 0 {
            push(ViolationCode::BadDimension, "machine must have at least one counter".to_owned());
        }
        let mut seen_states = HashSet::new();
        for s in &self.states {
            if !seen_states.insert(s) {
                push(ViolationCode::DuplicateState, format!("state {s:?} declared twice"));
            }
        }
        let mut seen_symbols = HashSet::new();
        for &c in &self.alphabet {
            if !seen_symbols.insert(c) {
                push(ViolationCode::DuplicateSymbol, format!("symbol {c:?} declared twice"));
            }
        }
        let known = |s: &String| self.states.contains(s);
        if !known(&self.start) {
            push(ViolationCode::UnknownState, format!("start state {:?} not declared", self.start));
        }
        for s in &self.accept {
            if !known(s) {
                push(ViolationCode::UnknownState, format!("accept state {s:?} not declared"));
            }
        }
        if self.blind && !self.zero_acceptance {
            push(
                ViolationCode::BlindGuard,
                "a blind machine checks its counters only at input end; zero_acceptance must be true"
                    .to_owned(),
            );
        }
        let mut keys: HashMap<(&String, char, Option<&Vec<ZeroTest>>), usize> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if !known(&t.from) {
                push(
                    ViolationCode::UnknownState,
                    format!("transition {i} leaves unknown state {:?}", t.from),
                );
            }
            if !known(&t.to) {
                push(
                    ViolationCode::UnknownState,
                    format!("transition {i} enters unknown state {:?}", t.to),
                );
            }
            if !self.alphabet.contains(&t.symbol) {
                push(
                    ViolationCode::UnknownSymbol,
                    format!("transition {i} reads undeclared symbol {:?}", t.symbol),
                );
            }
            match (&t.pattern, self.blind) {
                (Some(_), true) => push(
                    ViolationCode::BlindGuard,
                    format!("transition {i} carries a zero pattern on a blind machine"),
                ),
                (None, false) => push(
                    ViolationCode::BlindGuard,
                    format!("transition {i} on a non-blind machine needs a zero pattern"),
                ),
                (Some(p), false) if p.len() != self.counters => push(
                    ViolationCode::DimMismatch,
                    format!(
                        "transition {i} zero pattern has {} tests, machine has {} counters",
                        p.len(),
                        self.counters
                    ),
                ),
                _ => {}
            }
            if t.increments.len() != self.counters {
                push(
                    ViolationCode::DimMismatch,
                    format!(
                        "transition {i} has {} increments, machine has {} counters",
                        t.increments.len(),
                        self.counters
                    ),
                );
            }
            for (c, &inc) in t.increments.iter().enumerate() {
                if !(-1..=1).contains(&inc) {
                    push(
                        ViolationCode::DimMismatch,
                        format!("transition {i} increments counter {c} by {inc}; only -1, 0, 1 are allowed"),
                    );
                }
            }
            let count = keys.entry((&t.from, t.symbol, t.pattern.as_ref())).or_insert(0);
            *count += 1;
            if *count == 2 {
                push(
                    ViolationCode::DetConflict,
                    format!(
                        "state {:?} has more than one transition on {:?}{}",
                        t.from,
                        t.symbol,
                        t.pattern
                            .as_ref()
                            .map(|p| format!(
                                " with pattern {:?}",
                                p.iter().map(|z| z.to_char()).collect::<String>()
                            ))
                            .unwrap_or_default()
                    ),
                );
            }
        }
        out.sort_by(|a, b| a.code.as_str().cmp(b.code.as_str()).then(a.message.cmp(&b.message)));
        out
    }
}

/// A point in a counter-machine run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterConfiguration {
    pub state: String,
    pub counters: Vec<i64>,
}

/// The starting configuration: start state, all counters zero.
pub fn counter_initial(m: &CounterMachine) -> CounterConfiguration {
    CounterConfiguration { state: m.start.clone(), counters: vec![0; m.counters] }
}

/// Performs one step on `symbol`, or returns `Ok(None)` when no transition
/// matches (the machine is stuck).
pub fn counter_step(
    m: &CounterMachine,
    c: &CounterConfiguration,
    symbol: char,
) -> Result<Option<CounterConfiguration>, RunError> {
    if !m.alphabet.contains(&symbol) {
        return Err(RunError::SymbolOutsideAlphabet { symbol, position: 0 });
    }
    let matched = m.transitions.iter().find(|t| {
        t.from == c.state
            && t.symbol == symbol
            && match &t.pattern {
                None => true,
                Some(p) => p.iter().zip(&c.counters).all(|(z, &v)| z.matches(v)),
            }
    });
    Ok(matched.map(|t| CounterConfiguration {
        state: t.to.clone(),
        counters: c.counters.iter().zip(&t.increments).map(|(&v, &d)| v + d).collect(),
    }))
}

/// Runs the counter machine to completion: `true` means the whole input
/// was consumed ending in an accept state, with all counters zero when the
/// machine demands it.
pub fn run_counter(m: &CounterMachine, input: &str) -> Result<bool, RunError> {
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(RunError::InvalidMachine(format_violations(&violations)));
    }
    let chars: Vec<char> = input.chars().collect();
    for (position, &symbol) in chars.iter().enumerate() {
        if !m.alphabet.contains(&symbol) {
            return Err(RunError::SymbolOutsideAlphabet { symbol, position });
        }
    }
    let mut c = counter_initial(m);
    for &symbol in &chars {
        match counter_step(m, &c, symbol)? {
            Some(next) => c = next,
            None => return Ok(false),
        }
    }
    Ok(m.accept.contains(&c.state) && (!m.zero_acceptance || c.counters.iter().all(|&v| v == 0)))
}

// ---------------------------------------------------------------------------
// Deterministic finite automata
// ---------------------------------------------------------------------------

/// A total deterministic finite automaton: exactly one successor per
/// (state, symbol).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dfa {
    pub name: String,
    pub alphabet: Vec<char>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: Vec<String>,
    pub transitions: Vec<DfaTransition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaTransition {
    pub from: String,
    pub symbol: char,
    pub to: String,
}

#[derive(Debug, Error)]
pub enum DfaParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("machine failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

impl Dfa {
    pub fn from_json(text: &str) -> Result<Dfa, DfaParseError> {
        let dfa: Dfa = serde_json::from_str(text).map_err(|e| DfaParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let violations = dfa.validate();
        if violations.is_empty() {
            Ok(dfa)
        } else {
            Err(DfaParseError::Invalid(violations))
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("machine serializes");
        text.push('\n');
        text
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code: ViolationCode, message: String| {
            out.push(Violation { code, message });
        };
        let mut seen_states = HashSet::new();
        for s in &self.states {
            if !seen_states.insert(s) {
                push(ViolationCode::DuplicateState, format!("state {s:?} declared twice"));
            }
        }
        let mut seen_symbols = HashSet::new();
        for &c in &self.alphabet {
            if !seen_symbols.insert(c) {
                push(ViolationCode::DuplicateSymbol, format!("symbol {c:?} declared twice"));
            }
        }
        let known = |s: &String| self.states.contains(s);
        if !known(&self.start) {
            push(ViolationCode::UnknownState, format!("start state {:?} not declared", self.start));
        }
        for s in &self.accept {
            if !known(s) {
                push(ViolationCode::UnknownState, format!("accept state {s:?} not declared"));
            }
        }
        let mut moves: HashMap<(&String, char), usize> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if !known(&t.from) {
                push(
                    ViolationCode::UnknownState,
                    format!("transition {i} leaves unknown state {:?}", t.from),
                );
            }
            if !known(&t.to) {
                push(
                    ViolationCode::UnknownState,
                    format!("transition {i} enters unknown state {:?}", t.to),
                );
            }
            if !self.alphabet.contains(&t.symbol) {
                push(
                    ViolationCode::UnknownSymbol,
                    format!("transition {i} reads undeclared symbol {:?}", t.symbol),
                );
            }
            *moves.entry((&t.from, t.symbol)).or_insert(0) += 1;
        }
        for s in &self.states {
            for &c in &self.alphabet {
                match moves.get(&(s, c)).copied().unwrap_or(0) {
                    0 => push(
                        ViolationCode::DetConflict,
                        format!("state {s:?} has no transition on {c:?}; the map must be total"),
                    ),
                    1 => {}
                    n => push(
                        ViolationCode::DetConflict,
                        format!("state {s:?} has {n} transitions on {c:?}"),
                    ),
                }
            }
        }
        out.sort_by(|a, b| a.code.as_str().cmp(b.code.as_str()).then(a.message.cmp(&b.message)));
        out
    }

    /// The unique successor, or `None` when the symbol is outside this
    /// automaton's alphabet.
    pub fn successor(&self, state: &str, symbol: char) -> Option<&String> {
        self.transitions.iter().find(|t| t.from == state && t.symbol == symbol).map(|t| &t.to)
    }

    pub fn accepts(&self, input: &str) -> Result<bool, RunError> {
        let mut state = self.start.clone();
        for (position, symbol) in input.chars().enumerate() {
            if !self.alphabet.contains(&symbol) {
                return Err(RunError::SymbolOutsideAlphabet { symbol, position });
            }
            state = self
                .successor(&state, symbol)
                .ok_or_else(|| {
                    RunError::InvalidMachine(format!("no move from {state:?} on {symbol:?}"))
                })?
                .clone();
        }
        Ok(self.accept.contains(&state))
    }
}

// ---------------------------------------------------------------------------
// Counter-machine simulations
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("machine {0:?} must be blind for this construction")]
    NotBlind(String),
    #[error("machine {0:?} must be non-blind for this construction")]
    NotNonBlind(String),
    #[error("machine {0:?} must be real-time (no epsilon moves) for this construction")]
    NotRealtime(String),
    #[error("machine {name:?} has {found} counters; this simulation supports exactly {expected} — the homing condition can check the whole vector but never an individual entry")]
    WrongCounterCount { name: String, expected: usize, found: usize },
    #[error("machine {0:?} accepts on state alone; the homing condition forces empty-counter acceptance, so zero_acceptance must be true")]
    NeedsZeroAcceptance(String),
    #[error("operands mix blind and non-blind machines")]
    MixedBlindness,
    #[error("operand {name:?} is invalid:\n{details}")]
    InvalidOperand { name: String, details: String },
}

fn require_valid_hva(m: &HvaMachine) -> Result<(), ConstructError> {
    let violations = m.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ConstructError::InvalidOperand {
            name: m.name.clone(),
            details: format_violations(&violations),
        })
    }
}

fn require_valid_counter(m: &CounterMachine) -> Result<(), ConstructError> {
    let violations = m.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ConstructError::InvalidOperand {
            name: m.name.clone(),
            details: format_violations(&violations),
        })
    }
}

fn require_realtime(m: &HvaMachine) -> Result<(), ConstructError> {
    if m.mode.head == Head::Realtime && !m.has_epsilon() {
        Ok(())
    } else {
        Err(ConstructError::NotRealtime(m.name.clone()))
    }
}

/// The matrix that applies one blind-counter update to the simulation
/// vector `[1 + c_1, ..., 1 + c_k, 1]`: the identity with the last row's
/// entry in column i set to the increment of counter i. A no-op update is
/// exactly the identity matrix.
fn increment_matrix(k: usize, increments: &[i64]) -> QMatrix {
    let mut rows: Vec<Vec<Rational>> = QMatrix::identity(k + 1).rows().to_vec();
    for (i, &d) in increments.iter().enumerate() {
        rows[k][i] = Rational::new(d, 1).expect("unit denominator");
    }
    QMatrix::from_rows(rows).expect("square by construction")
}

/// Compiles a blind k-counter machine into a blind deterministic real-time
/// vector automaton of dimension k + 1. Entry i of the vector holds
/// `1 + counter_i` throughout the run and the last entry stays 1, so the
/// vector is all ones — the initial vector — exactly when every counter is
/// zero, which is the blind machine's acceptance test.
pub fn simulate_blind_counters(m: &CounterMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_counter(m)?;
    if !m.blind {
        return Err(ConstructError::NotBlind(m.name.clone()));
    }
    let k = m.counters;
    Ok(HvaMachine {
        name: format!("{}_hva", m.name),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, true),
        dimension: k + 1,
        alphabet: m.alphabet.clone(),
        states: m.states.clone(),
        start: m.start.clone(),
        accept: m.accept.clone(),
        initial_vector: QVector::ones(k + 1),
        transitions: m
            .transitions
            .iter()
            .map(|t| Transition {
                from: t.from.clone(),
                symbol: Some(t.symbol),
                guard: Guard::Any,
                to: t.to.clone(),
                matrix: increment_matrix(k, &t.increments),
            })
            .collect(),
    })
}

/// Compiles a non-blind one-counter machine (with empty-counter
/// acceptance) into a non-blind deterministic real-time vector automaton
/// of dimension 2. The vector is `[1 + c, 1]` over initial `[1, 1]`, so
/// the equality guard observes exactly the counter's zero test, and the
/// homing acceptance condition observes exactly the empty-counter
/// acceptance condition.
///
/// Only one counter is supported: the machine can observe whether the
/// whole vector equals the initial vector, never an individual entry, so
/// independent zero tests of several counters have no faithful image.
pub fn simulate_counter_nonblind(m: &CounterMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_counter(m)?;
    if m.blind {
        return Err(ConstructError::NotNonBlind(m.name.clone()));
    }
    if m.counters != 1 {
        return Err(ConstructError::WrongCounterCount {
            name: m.name.clone(),
            expected: 1,
            found: m.counters,
        });
    }
    if !m.zero_acceptance {
        return Err(ConstructError::NeedsZeroAcceptance(m.name.clone()));
    }
    let bump = QMatrix::from_i64(&[&[1, 0], &[1, 1]]);
    let drop = QMatrix::from_i64(&[&[1, 0], &[-1, 1]]);
    Ok(HvaMachine {
        name: format!("{}_hva", m.name),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, false),
        dimension: 2,
        alphabet: m.alphabet.clone(),
        states: m.states.clone(),
        start: m.start.clone(),
        accept: m.accept.clone(),
        initial_vector: QVector::from_i64(&[1, 1]),
        transitions: m
            .transitions
            .iter()
            .map(|t| Transition {
                from: t.from.clone(),
                symbol: Some(t.symbol),
                guard: match t.pattern.as_deref() {
                    Some([ZeroTest::Zero]) => Guard::Eq,
                    Some([ZeroTest::NonZero]) => Guard::Neq,
                    _ => unreachable!("validated single-test pattern"),
                },
                to: t.to.clone(),
                matrix: match t.increments[0] {
                    1 => bump.clone(),
                    -1 => drop.clone(),
                    _ => QMatrix::identity(2),
                },
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Closure constructions
// ---------------------------------------------------------------------------

/// Returns `base` if unused, else `base_2`, `base_3`, ... — always a name
/// not yet in `used`, which it also claims.
fn fresh(base: &str, used: &mut HashSet<String>) -> String {
    if used.insert(base.to_owned()) {
        return base.to_owned();
    }
    let mut i = 2usize;
    loop {
        let candidate = format!("{base}_{i}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        i += 1;
    }
}

/// The two alphabets in order, first operand's symbols first, without
/// duplicates.
fn merged_alphabet(a: &[char], b: &[char]) -> Vec<char> {
    let mut out = a.to_vec();
    for &c in b {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Product with a total DFA: the result tracks the vector automaton's
/// state and vector alongside the DFA's state and accepts when both
/// accept. The vector automaton's matrices, guards, dimension, and initial
/// vector carry over unchanged, so blindness and determinism are
/// preserved. Symbols known to only one operand have no transitions (they
/// reject implicitly). The state set is the full cross product.
pub fn intersect_regular(v: &HvaMachine, d: &Dfa) -> Result<HvaMachine, ConstructError> {
    require_valid_hva(v)?;
    require_realtime(v)?;
    let dfa_violations = d.validate();
    if !dfa_violations.is_empty() {
        return Err(ConstructError::InvalidOperand {
            name: d.name.clone(),
            details: format_violations(&dfa_violations),
        });
    }

    let mut used = HashSet::new();
    let mut name_of: HashMap<(&String, &String), String> = HashMap::new();
    let mut states = Vec::with_capacity(v.states.len() * d.states.len());
    for q in &v.states {
        for p in &d.states {
            let name = fresh(&format!("{q}|{p}"), &mut used);
            states.push(name.clone());
            name_of.insert((q, p), name);
        }
    }

    let mut transitions = Vec::new();
    for t in &v.transitions {
        let symbol = t.symbol.expect("real-time machines have no epsilon moves");
        for p in &d.states {
            if let Some(p_next) = d.successor(p, symbol) {
                transitions.push(Transition {
                    from: name_of[&(&t.from, p)].clone(),
                    symbol: Some(symbol),
                    guard: t.guard,
                    to: name_of[&(&t.to, p_next)].clone(),
                    matrix: t.matrix.clone(),
                });
            }
        }
    }

    let mut accept = Vec::new();
    for q in &v.accept {
        for p in &d.accept {
            accept.push(name_of[&(q, p)].clone());
        }
    }

    Ok(HvaMachine {
        name: format!("{}_and_{}", v.name, d.name),
        mode: v.mode,
        dimension: v.dimension,
        alphabet: merged_alphabet(&v.alphabet, &d.alphabet),
        states,
        start: name_of[&(&v.start, &d.start)].clone(),
        accept,
        initial_vector: v.initial_vector.clone(),
        transitions,
    })
}

/// Intersection of two blind real-time machines: product states, block
/// diagonal matrices, concatenated initial vectors. The blocks never
/// interact, so the combined vector is home exactly when both operand
/// vectors are, and a product run accepts exactly when both operand runs
/// do. Deterministic when both operands are.
pub fn intersect_blind(x: &HvaMachine, y: &HvaMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_hva(x)?;
    require_valid_hva(y)?;
    require_realtime(x)?;
    require_realtime(y)?;
    if !x.mode.blind {
        return Err(ConstructError::NotBlind(x.name.clone()));
    }
    if !y.mode.blind {
        return Err(ConstructError::NotBlind(y.name.clone()));
    }

    let mut used = HashSet::new();
    let mut name_of: HashMap<(&String, &String), String> = HashMap::new();
    let mut states = Vec::with_capacity(x.states.len() * y.states.len());
    for q in &x.states {
        for p in &y.states {
            let name = fresh(&format!("{q}|{p}"), &mut used);
            states.push(name.clone());
            name_of.insert((q, p), name);
        }
    }

    let mut transitions = Vec::new();
    for tx in &x.transitions {
        for ty in &y.transitions {
            if tx.symbol != ty.symbol {
                continue;
            }
            transitions.push(Transition {
                from: name_of[&(&tx.from, &ty.from)].clone(),
                symbol: tx.symbol,
                guard: Guard::Any,
                to: name_of[&(&tx.to, &ty.to)].clone(),
                matrix: QMatrix::block_diag(&tx.matrix, &ty.matrix),
            });
        }
    }

    let mut accept = Vec::new();
    for q in &x.accept {
        for p in &y.accept {
            accept.push(name_of[&(q, p)].clone());
        }
    }

    let control =
        if x.mode.control == Control::Deterministic && y.mode.control == Control::Deterministic {
            Control::Deterministic
        } else {
            Control::Nondeterministic
        };

    Ok(HvaMachine {
        name: format!("{}_and_{}", x.name, y.name),
        mode: ModeFlags::new(Head::Realtime, control, true),
        dimension: x.dimension + y.dimension,
        alphabet: merged_alphabet(&x.alphabet, &y.alphabet),
        states,
        start: name_of[&(&x.start, &y.start)].clone(),
        accept,
        initial_vector: x.initial_vector.concat(&y.initial_vector),
        transitions,
    })
}

fn check_same_blindness(x: &HvaMachine, y: &HvaMachine) -> Result<(), ConstructError> {
    if x.mode.blind == y.mode.blind {
        Ok(())
    } else {
        Err(ConstructError::MixedBlindness)
    }
}

/// Lifts a transition into the left block of a two-block machine: the
/// right block is held by the identity.
fn lift_left(t: &Transition, rename: impl Fn(&str) -> String, right_dim: usize) -> Transition {
    Transition {
        from: rename(&t.from),
        symbol: t.symbol,
        guard: t.guard,
        to: rename(&t.to),
        matrix: QMatrix::block_diag(&t.matrix, &QMatrix::identity(right_dim)),
    }
}

/// Mirror image of [`lift_left`].
fn lift_right(t: &Transition, rename: impl Fn(&str) -> String, left_dim: usize) -> Transition {
    Transition {
        from: rename(&t.from),
        symbol: t.symbol,
        guard: t.guard,
        to: rename(&t.to),
        matrix: QMatrix::block_diag(&QMatrix::identity(left_dim), &t.matrix),
    }
}

/// Nondeterministic union of two real-time machines (both blind or both
/// non-blind). A fresh start state commits to one operand on the first
/// symbol; the chosen operand runs in its own vector block while the other
/// block is held by identity matrices. Because the idle block keeps its
/// initial sub-vector forever, the combined vector is home exactly when
/// the active operand's is — so the operand's guards and acceptance carry
/// over verbatim, and the union accepts exactly L(x) ∪ L(y).
pub fn union_nondet(x: &HvaMachine, y: &HvaMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_hva(x)?;
    require_valid_hva(y)?;
    require_realtime(x)?;
    require_realtime(y)?;
    check_same_blindness(x, y)?;

    let mut used = HashSet::new();
    let left = |q: &str| format!("L:{q}");
    let right = |q: &str| format!("R:{q}");
    let mut states: Vec<String> = Vec::with_capacity(x.states.len() + y.states.len() + 1);
    let start = fresh("start", &mut used);
    states.push(start.clone());
    for q in &x.states {
        states.push(fresh(&left(q), &mut used));
    }
    for q in &y.states {
        states.push(fresh(&right(q), &mut used));
    }

    let mut transitions = Vec::new();
    // Committing moves: the first symbol is read as x would read it from
    // x's start (left block) or as y would from y's start (right block).
    for t in x.transitions.iter().filter(|t| t.from == x.start) {
        let mut lifted = lift_left(t, left, y.dimension);
        lifted.from = start.clone();
        transitions.push(lifted);
    }
    for t in y.transitions.iter().filter(|t| t.from == y.start) {
        let mut lifted = lift_right(t, right, x.dimension);
        lifted.from = start.clone();
        transitions.push(lifted);
    }
    for t in &x.transitions {
        transitions.push(lift_left(t, left, y.dimension));
    }
    for t in &y.transitions {
        transitions.push(lift_right(t, right, x.dimension));
    }

    let mut accept: Vec<String> = Vec::new();
    if x.accept.contains(&x.start) || y.accept.contains(&y.start) {
        accept.push(start.clone());
    }
    accept.extend(x.accept.iter().map(|q| left(q)));
    accept.extend(y.accept.iter().map(|q| right(q)));

    Ok(HvaMachine {
        name: format!("{}_or_{}", x.name, y.name),
        mode: ModeFlags::new(Head::Realtime, Control::Nondeterministic, x.mode.blind),
        dimension: x.dimension + y.dimension,
        alphabet: merged_alphabet(&x.alphabet, &y.alphabet),
        states,
        start,
        accept,
        initial_vector: x.initial_vector.concat(&y.initial_vector),
        transitions,
    })
}

/// Nondeterministic concatenation of two real-time machines (both blind or
/// both non-blind). The first operand runs in the left block; at any of
/// its accept states the machine may guess the seam and take one of the
/// second operand's start moves in the right block, freezing the left
/// block from then on. The final homing check covers both blocks, so an
/// accepting run forces the frozen left block to have been home at the
/// seam — exactly the first operand's acceptance.
pub fn concat_nondet(x: &HvaMachine, y: &HvaMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_hva(x)?;
    require_valid_hva(y)?;
    require_realtime(x)?;
    require_realtime(y)?;
    check_same_blindness(x, y)?;

    let mut used = HashSet::new();
    let left = |q: &str| format!("L:{q}");
    let right = |q: &str| format!("R:{q}");
    let mut states: Vec<String> = Vec::with_capacity(x.states.len() + y.states.len());
    for q in &x.states {
        states.push(fresh(&left(q), &mut used));
    }
    for q in &y.states {
        states.push(fresh(&right(q), &mut used));
    }

    let mut transitions = Vec::new();
    for t in &x.transitions {
        transitions.push(lift_left(t, left, y.dimension));
    }
    // Seam moves: from every accept state of x, the machine may start y.
    // Guards transfer verbatim: until the seam the right block still holds
    // y's initial sub-vector, so at the seam the combined vector is home
    // exactly when x's block is — and only seams taken with x's block home
    // can ever lead to acceptance, because the left block is frozen
    // afterwards and the final check requires it home.
    for q in &x.accept {
        for t in y.transitions.iter().filter(|t| t.from == y.start) {
            let mut lifted = lift_right(t, right, x.dimension);
            lifted.from = left(q);
            transitions.push(lifted);
        }
    }
    for t in &y.transitions {
        transitions.push(lift_right(t, right, x.dimension));
    }

    let mut accept: Vec<String> = Vec::new();
    if y.accept.contains(&y.start) {
        accept.extend(x.accept.iter().map(|q| left(q)));
    }
    accept.extend(y.accept.iter().map(|q| right(q)));

    Ok(HvaMachine {
        name: format!("{}_then_{}", x.name, y.name),
        mode: ModeFlags::new(Head::Realtime, Control::Nondeterministic, x.mode.blind),
        dimension: x.dimension + y.dimension,
        alphabet: merged_alphabet(&x.alphabet, &y.alphabet),
        states,
        start: left(&x.start),
        accept,
        initial_vector: x.initial_vector.concat(&y.initial_vector),
        transitions,
    })
}

/// Nondeterministic star of a non-blind real-time machine. A fresh
/// accepting start state copies the operand's start moves; every accept
/// state gains restart moves copying the operand's start moves under an
/// equality guard. The equality guard certifies the vector is back to the
/// initial vector at each restart, so every segment between restarts is a
/// genuine accepting run of the operand — which is exactly why a blind
/// operand is rejected: without mid-run observations nothing could certify
/// the seams.
pub fn star_nondet(x: &HvaMachine) -> Result<HvaMachine, ConstructError> {
    require_valid_hva(x)?;
    require_realtime(x)?;
    if x.mode.blind {
        return Err(ConstructError::NotNonBlind(x.name.clone()));
    }

    let mut used: HashSet<String> = x.states.iter().cloned().collect();
    let start = fresh("start", &mut used);
    let mut states = vec![start.clone()];
    states.extend(x.states.iter().cloned());

    let mut transitions = Vec::new();
    for t in x.transitions.iter().filter(|t| t.from == x.start) {
        let mut copy = t.clone();
        copy.from = start.clone();
        transitions.push(copy);
    }
    transitions.extend(x.transitions.iter().cloned());
    // Restart moves: only start moves that admit the home observation can
    // open a run, and the copy demands it explicitly.
    for q in &x.accept {
        for t in x.transitions.iter().filter(|t| t.from == x.start && t.guard.admits(true)) {
            transitions.push(Transition {
                from: q.clone(),
                symbol: t.symbol,
                guard: Guard::Eq,
                to: t.to.clone(),
                matrix: t.matrix.clone(),
            });
        }
    }

    let mut accept = vec![start.clone()];
    accept.extend(x.accept.iter().cloned());

    Ok(HvaMachine {
        name: format!("{}_star", x.name),
        mode: ModeFlags::new(Head::Realtime, Control::Nondeterministic, false),
        dimension: x.dimension,
        alphabet: x.alphabet.clone(),
        states,
        start,
        accept,
        initial_vector: x.initial_vector.clone(),
        transitions,
    })
}
