//! The homing vector automaton model: mode flags, guarded matrix
//! transitions, a total validator, and the JSON file format.
//!
//! A machine carries a `dimension`-sized row vector, initially
//! `initial_vector`. Each transition names a source state, an input symbol
//! (`None` is an epsilon move, allowed only on one-way machines), a guard on
//! the one-bit "vector equals initial vector" observation, a target state,
//! and the square matrix the vector is multiplied by when the transition
//! fires. Blind machines may not observe the vector, so every guard must be
//! `any`; on non-blind nondeterministic machines `any` is accepted as
//! shorthand and expanded into an `eq`/`neq` pair when a file is parsed.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{NumericsError, QMatrix, QVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    /// Consumes exactly one input symbol per step; no epsilon moves.
    Realtime,
    /// May interleave epsilon moves with input symbols.
    Oneway,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Control {
    Deterministic,
    Nondeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeFlags {
    pub head: Head,
    pub control: Control,
    /// Blind machines cannot observe whether the vector equals the initial
    /// vector mid-run; all their guards must be [`Guard::Any`].
    pub blind: bool,
}

impl ModeFlags {
    pub const fn new(head: Head, control: Control, blind: bool) -> Self {
        ModeFlags { head, control, blind }
    }
}

/// Guard on the one-bit observation "current vector == initial vector".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Guard {
    /// Fires only when the vector equals the initial vector.
    Eq,
    /// Fires only when the vector differs from the initial vector.
    Neq,
    /// Fires regardless of the vector (the only guard blind machines may
    /// use).
    Any,
}

impl Guard {
    /// Whether the guard admits a step given the current observation.
    pub fn admits(self, vector_is_initial: bool) -> bool {
        match self {
            Guard::Eq => vector_is_initial,
            Guard::Neq => !vector_is_initial,
            Guard::Any => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Guard::Eq => "eq",
            Guard::Neq => "neq",
            Guard::Any => "any",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: String,
    /// `None` is an epsilon move: it consumes no input.
    pub symbol: Option<char>,
    pub guard: Guard,
    pub to: String,
    pub matrix: QMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HvaMachine {
    pub name: String,
    pub mode: ModeFlags,
    pub dimension: usize,
    pub alphabet: Vec<char>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: Vec<String>,
    pub initial_vector: QVector,
    pub transitions: Vec<Transition>,
}

/// Machine-readable validation failure codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    /// The vector dimension is zero.
    BadDimension,
    /// The initial vector or a transition matrix does not match `dimension`.
    DimMismatch,
    DuplicateState,
    DuplicateSymbol,
    /// `start`, an accept state, or a transition endpoint is not declared.
    UnknownState,
    /// A transition consumes a symbol outside the alphabet.
    UnknownSymbol,
    /// An epsilon transition on a real-time machine.
    EpsilonRealtime,
    /// A deterministic machine marked one-way.
    DetOneway,
    /// A deterministic machine with two applicable transitions for the same
    /// (state, symbol, observation) triple.
    DetConflict,
    /// A blind machine with an `eq` or `neq` guard.
    BlindGuard,
    /// An `any` guard on a non-blind deterministic machine (only blind
    /// machines and non-blind nondeterministic machines may write `any`).
    AnyGuardDet,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::BadDimension => "BAD_DIMENSION",
            ViolationCode::DimMismatch => "DIM_MISMATCH",
            ViolationCode::DuplicateState => "DUPLICATE_STATE",
            ViolationCode::DuplicateSymbol => "DUPLICATE_SYMBOL",
            ViolationCode::UnknownState => "UNKNOWN_STATE",
            ViolationCode::UnknownSymbol => "UNKNOWN_SYMBOL",
            ViolationCode::EpsilonRealtime => "EPSILON_REALTIME",
            ViolationCode::DetOneway => "DET_ONEWAY",
            ViolationCode::DetConflict => "DET_CONFLICT",
            ViolationCode::BlindGuard => "BLIND_GUARD",
            ViolationCode::AnyGuardDet => "ANY_GUARD_DET",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation { code, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("transition {index}: {source}")]
    BadMatrix { index: usize, source: NumericsError },
    #[error("machine failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

pub fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

impl HvaMachine {
    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.symbol.is_none())
    }

    /// Reports every validation violation; an empty list means the machine
    /// is well-formed. Total: never panics on structurally complete input.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dimension == 0 {
            out.push(Violation::new(
                ViolationCode::BadDimension,
                "vector dimension must be at least 1",
            ));
        }
        if self.initial_vector.dim() != self.dimension {
            out.push(Violation::new(
                ViolationCode::DimMismatch,
                format!(
                    "initial vector has {} entries, machine dimension is {}",
                    self.initial_vector.dim(),
                    self.dimension
                ),
            ));
        }

        let mut states = HashSet::new();
        for s in &self.states {
            if !states.insert(s.as_str()) {
                out.push(Violation::new(
                    ViolationCode::DuplicateState,
                    format!("state {s:?} declared twice"),
                ));
            }
        }
        let mut symbols = HashSet::new();
        for c in &self.alphabet {
            if !symbols.insert(*c) {
                out.push(Violation::new(
                    ViolationCode::DuplicateSymbol,
                    format!("symbol {c:?} declared twice"),
                ));
            }
        }

        let check_state = |role: &str, name: &str, out: &mut Vec<Violation>| {
            if !states.contains(name) {
                out.push(Violation::new(
                    ViolationCode::UnknownState,
                    format!("{role} {name:?} is not a declared state"),
                ));
            }
        };
        check_state("start state", &self.start, &mut out);
        for a in &self.accept {
            check_state("accept state", a, &mut out);
        }

        if self.mode.control == Control::Deterministic && self.mode.head == Head::Oneway {
            out.push(Violation::new(
                ViolationCode::DetOneway,
                "deterministic machines must be real-time",
            ));
        }

        for (i, t) in self.transitions.iter().enumerate() {
            check_state(&format!("transition {i} source"), &t.from, &mut out);
            check_state(&format!("transition {i} target"), &t.to, &mut out);
            match t.symbol {
                Some(c) if !symbols.contains(&c) => out.push(Violation::new(
                    ViolationCode::UnknownSymbol,
                    format!("transition {i} consumes {c:?}, which is not in the alphabet"),
                )),
                None if self.mode.head == Head::Realtime => out.push(Violation::new(
                    ViolationCode::EpsilonRealtime,
                    format!("transition {i} is an epsilon move on a real-time machine"),
                )),
                _ => {}
            }
            if t.matrix.dim() != self.dimension {
                out.push(Violation::new(
                    ViolationCode::DimMismatch,
                    format!(
                        "transition {i} matrix is {d}x{d}, machine dimension is {k}",
                        d = t.matrix.dim(),
                        k = self.dimension
                    ),
                ));
            }
            if self.mode.blind && t.guard != Guard::Any {
                out.push(Violation::new(
                    ViolationCode::BlindGuard,
                    format!(
                        "transition {i} has guard {:?} but blind machines cannot observe the vector",
                        t.guard.as_str()
                    ),
                ));
            }
            if !self.mode.blind
                && self.mode.control == Control::Deterministic
                && t.guard == Guard::Any
            {
                out.push(Violation::new(
                    ViolationCode::AnyGuardDet,
                    format!(
                        "transition {i} has guard \"any\"; non-blind deterministic machines must \
                         write explicit eq/neq guards"
                    ),
                ));
            }
        }

        if self.mode.control == Control::Deterministic {
            // At most one transition may apply for each (state, symbol,
            // observation) triple; `any` counts for both observations.
            let mut seen: HashMap<(&str, Option<char>, bool), usize> = HashMap::new();
            for t in &self.transitions {
                for is_eq in [true, false] {
                    if t.guard.admits(is_eq) {
                        *seen.entry((t.from.as_str(), t.symbol, is_eq)).or_insert(0) += 1;
                    }
                }
            }
            let mut conflicts: Vec<_> =
                seen.into_iter().filter(|&(_, n)| n > 1).map(|(key, _)| key).collect();
            conflicts.sort();
            for (state, symbol, is_eq) in conflicts {
                let symbol = symbol.map_or("epsilon".to_owned(), |c| format!("{c:?}"));
                out.push(Violation::new(
                    ViolationCode::DetConflict,
                    format!(
                        "deterministic machine has multiple transitions from {state:?} on \
                         {symbol} when the vector {} the initial vector",
                        if is_eq { "equals" } else { "differs from" }
                    ),
                ));
            }
        }

        out
    }

    /// Expands `any` guards on a non-blind nondeterministic machine into
    /// adjacent `eq`/`neq` pairs, so that only blind machines carry `any`.
    /// All other machines are returned unchanged.
    pub fn normalize(mut self) -> Self {
        if self.mode.blind || self.mode.control != Control::Nondeterministic {
            return self;
        }
        if self.transitions.iter().all(|t| t.guard != Guard::Any) {
            return self;
        }
        let mut expanded = Vec::with_capacity(self.transitions.len());
        for t in self.transitions {
            if t.guard == Guard::Any {
                expanded.push(Transition { guard: Guard::Eq, ..t.clone() });
                expanded.push(Transition { guard: Guard::Neq, ..t });
            } else {
                expanded.push(t);
            }
        }
        self.transitions = expanded;
        self
    }

    /// Parses a machine document, expands `any`-guard shorthand, and
    /// validates the result.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let doc: MachineDoc = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (index, t) in doc.transitions.into_iter().enumerate() {
            let matrix = QMatrix::from_rows(t.matrix)
                .map_err(|source| ParseError::BadMatrix { index, source })?;
            transitions.push(Transition {
                from: t.from,
                symbol: t.symbol,
                guard: t.guard,
                to: t.to,
                matrix,
            });
        }
        let machine = HvaMachine {
            name: doc.name,
            mode: doc.mode,
            dimension: doc.dimension,
            alphabet: doc.alphabet,
            states: doc.states,
            start: doc.start,
            accept: doc.accept,
            initial_vector: QVector::from_rationals(doc.initial_vector),
            transitions,
        }
        .normalize();
        let violations = machine.validate();
        if violations.is_empty() {
            Ok(machine)
        } else {
            Err(ParseError::Invalid(violations))
        }
    }

    /// Serializes to the canonical document form: fixed key order, rationals
    /// in normalized text form (integers without a denominator).
    pub fn to_json(&self) -> String {
        let doc = MachineDoc {
            name: self.name.clone(),
            mode: self.mode,
            dimension: self.dimension,
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            start: self.start.clone(),
            accept: self.accept.clone(),
            initial_vector: self.initial_vector.entries().to_vec(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from.clone(),
                    symbol: t.symbol,
                    guard: t.guard,
                    to: t.to.clone(),
                    matrix: t.matrix.rows().to_vec(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("machine serialization");
        text.push('\n');
        text
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineDoc {
    name: String,
    mode: ModeFlags,
    dimension: usize,
    alphabet: Vec<char>,
    states: Vec<String>,
    start: String,
    accept: Vec<String>,
    initial_vector: Vec<Rational>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: String,
    symbol: Option<char>,
    guard: Guard,
    to: String,
    matrix: Vec<Vec<Rational>>,
}

/// Index of a machine's states and transitions for fast stepping. Shared by
/// the engine and the exhaustive check harness.
pub(crate) struct MachineIndex {
    pub state_of: HashMap<String, usize>,
    pub start: usize,
    pub accepting: Vec<bool>,
    /// Transition indices grouped by (source state, consumed symbol), in
    /// machine declaration order — the order that breaks trace ties.
    pub by_symbol: HashMap<(usize, Option<char>), Vec<usize>>,
    /// Target state id of each transition, parallel to `m.transitions`.
    pub target_of: Vec<usize>,
    pub has_epsilon: bool,
}

impl MachineIndex {
    pub fn build(m: &HvaMachine) -> Result<Self, String> {
        let mut state_of = HashMap::new();
        for (i, s) in m.states.iter().enumerate() {
            state_of.insert(s.clone(), i);
        }
        let start = *state_of
            .get(&m.start)
            .ok_or_else(|| format!("start state {:?} is not declared", m.start))?;
        let mut accepting = vec![false; m.states.len()];
        for a in &m.accept {
            let i =
                *state_of.get(a).ok_or_else(|| format!("accept state {a:?} is not declared"))?;
            accepting[i] = true;
        }
        let mut by_symbol: HashMap<(usize, Option<char>), Vec<usize>> = HashMap::new();
        let mut target_of = Vec::with_capacity(m.transitions.len());
        let mut has_epsilon = false;
        for (i, t) in m.transitions.iter().enumerate() {
            let from = *state_of
                .get(&t.from)
                .ok_or_else(|| format!("transition {i} source {:?} is not declared", t.from))?;
            let to = *state_of
                .get(&t.to)
                .ok_or_else(|| format!("transition {i} target {:?} is not declared", t.to))?;
            if t.matrix.dim() != m.dimension {
                return Err(format!("transition {i} matrix dimension mismatch"));
            }
            has_epsilon |= t.symbol.is_none();
            by_symbol.entry((from, t.symbol)).or_default().push(i);
            target_of.push(to);
        }
        if m.initial_vector.dim() != m.dimension {
            return Err("initial vector dimension mismatch".to_owned());
        }
        Ok(MachineIndex { state_of, start, accepting, by_symbol, target_of, has_epsilon })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_machine() -> HvaMachine {
        HvaMachine {
            name: "tiny".to_owned(),
            mode: ModeFlags::new(Head::Realtime, Control::Deterministic, false),
            dimension: 2,
            alphabet: vec!['a'],
            states: vec!["p".to_owned(), "q".to_owned()],
            start: "p".to_owned(),
            accept: vec!["q".to_owned()],
            initial_vector: QVector::from_i64(&[1, 1]),
            transitions: vec![Transition {
                from: "p".to_owned(),
                symbol: Some('a'),
                guard: Guard::Eq,
                to: "q".to_owned(),
                matrix: QMatrix::from_i64(&[&[1, 0], &[1, 1]]),
            }],
        }
    }

    #[test]
    fn valid_machine_passes() {
        assert_eq!(tiny_machine().validate(), Vec::new());
    }

    fn codes(m: &HvaMachine) -> Vec<ViolationCode> {
        m.validate().into_iter().map(|v| v.code).collect()
    }

    #[test]
    fn deterministic_conflict_detected() {
        let mut m = tiny_machine();
        let mut dup = m.transitions[0].clone();
        dup.to = "p".to_owned();
        m.transitions.push(dup);
        assert_eq!(codes(&m), vec![ViolationCode::DetConflict]);
    }

    #[test]
    fn blind_machines_reject_observing_guards() {
        let mut m = tiny_machine();
        m.mode.blind = true;
        assert_eq!(codes(&m), vec![ViolationCode::BlindGuard]);
        m.transitions[0].guard = Guard::Any;
        assert_eq!(codes(&m), Vec::new());
    }

    #[test]
    fn any_guard_needs_nondeterminism_or_blindness() {
        let mut m = tiny_machine();
        m.transitions[0].guard = Guard::Any;
        assert_eq!(codes(&m), vec![ViolationCode::AnyGuardDet]);
    }

    #[test]
    fn epsilon_requires_oneway_head() {
        let mut m = tiny_machine();
        m.transitions[0].symbol = None;
        assert!(codes(&m).contains(&ViolationCode::EpsilonRealtime));
        m.mode.head = Head::Oneway;
        assert!(codes(&m).contains(&ViolationCode::DetOneway));
        m.mode.control = Control::Nondeterministic;
        m.transitions[0].guard = Guard::Eq;
        assert_eq!(codes(&m), Vec::new());
    }

    #[test]
    fn structural_violations_detected() {
        let mut m = tiny_machine();
        m.start = "missing".to_owned();
        m.states.push("p".to_owned());
        m.alphabet.push('a');
        m.dimension = 3;
        let found = codes(&m);
        for expected in [
            ViolationCode::UnknownState,
            ViolationCode::DuplicateState,
            ViolationCode::DuplicateSymbol,
            ViolationCode::DimMismatch,
        ] {
            assert!(found.contains(&expected), "missing {expected:?} in {found:?}");
        }
    }

    #[test]
    fn violation_display_carries_code() {
        let mut m = tiny_machine();
        m.mode.blind = true;
        let v = m.validate();
        assert!(v[0].to_string().starts_with("[BLIND_GUARD]"));
    }

    #[test]
    fn json_roundtrip_is_identity() {
        let m = tiny_machine();
        let text = m.to_json();
        let parsed = HvaMachine::from_json(&text).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(parsed.to_json(), text);
    }

    #[test]
    fn integer_entries_serialize_without_denominator() {
        let text = tiny_machine().to_json();
        assert!(text.contains("\"1\""));
        assert!(!text.contains("1/1"));
    }

    #[test]
    fn rational_entries_parse() {
        let mut m = tiny_machine();
        m.transitions[0].matrix = QMatrix::from_rows(vec![
            vec![Rational::new(1, 2).unwrap(), Rational::zero()],
            vec![Rational::zero(), Rational::one()],
        ])
        .unwrap();
        let text = m.to_json();
        assert!(text.contains("\"1/2\""));
        assert_eq!(HvaMachine::from_json(&text).unwrap(), m);
    }

    #[test]
    fn any_shorthand_expands_on_parse() {
        let mut m = tiny_machine();
        m.mode.control = Control::Nondeterministic;
        m.transitions[0].guard = Guard::Any;
        // Serialize the raw (unexpanded) machine, then parse it back.
        let text = m.to_json();
        let parsed = HvaMachine::from_json(&text).unwrap();
        assert_eq!(parsed.transitions.len(), 2);
        assert_eq!(parsed.transitions[0].guard, Guard::Eq);
        assert_eq!(parsed.transitions[1].guard, Guard::Neq);
        assert_eq!(parsed.transitions[0].to, m.transitions[0].to);
        // Parsing is idempotent from there on.
        assert_eq!(HvaMachine::from_json(&parsed.to_json()).unwrap(), parsed);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match HvaMachine::from_json("{\n  \"name\": ") {
            Err(ParseError::Syntax { line, .. }) => assert!(line >= 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = r#"{
          "name": "ragged",
          "mode": { "head": "realtime", "control": "deterministic", "blind": false },
          "dimension": 2,
          "alphabet": ["a"],
          "states": ["p"],
          "start": "p",
          "accept": [],
          "initial_vector": ["1", "1"],
          "transitions": [
            { "from": "p", "symbol": "a", "guard": "eq", "to": "p",
              "matrix": [["1", "0"], ["1"]] }
          ]
        }"#;
        match HvaMachine::from_json(text) {
            Err(ParseError::BadMatrix { index: 0, .. }) => {}
            other => panic!("expected matrix shape error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_machine_reported_with_codes() {
        let mut m = tiny_machine();
        m.mode.blind = true;
        let text = m.to_json();
        match HvaMachine::from_json(&text) {
            Err(ParseError::Invalid(violations)) => {
                assert_eq!(violations[0].code, ViolationCode::BlindGuard);
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }
}
