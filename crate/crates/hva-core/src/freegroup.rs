//! Free groups of rank two, group automata over them, and their
//! translation into blind vector automata.
//!
//! Words over the letters `a`, `b` and their formal inverses `A`, `B` are
//! kept freely reduced ([`GroupWord`]). A [`EfaMachine`] is a finite
//! automaton whose transitions each carry a group element; it accepts an
//! input when some path spells the input and multiplies out to the group
//! identity.
//!
//! [`kn_generators`] produces the integer matrix pair
//! `[[1, n], [0, 1]]`, `[[1, 0], [n, 1]]`, which generate a free group of
//! rank two for n >= 2. The embedding [`phi`] sends `a` and `b` to fixed
//! products of those generators chosen so that no element of the image
//! other than the identity fixes the row vector `[1, 0]`. That property
//! lets [`translate_efa_f2`] compile a group automaton into a blind vector
//! automaton of dimension 2 — the vector returns to `[1, 0]` exactly when
//! the accumulated group element is the identity — and
//! [`translate_efa_f2xf2`] does the same for pairs with block-diagonal
//! matrices of dimension 4.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    Control, Guard, Head, HvaMachine, ModeFlags, Transition, Violation, ViolationCode,
};
use crate::engine::{Outcome, RunError, RunOptions, RunStats};
use crate::numerics::{QMatrix, QVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("letter {0:?} is not one of a, A, b, B")]
    UnknownLetter(char),
    #[error("cannot combine elements of different groups")]
    GroupMismatch,
}

/// A generator or inverse generator of the free group of rank two.
/// Uppercase means inverse: `A` is the inverse of `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub fn from_char(c: char) -> Result<Letter, GroupError> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            other => Err(GroupError::UnknownLetter(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }
}

/// A freely reduced word: no letter is ever adjacent to its inverse.
/// Reduction happens on construction, so equality of values is equality in
/// the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn identity() -> GroupWord {
        GroupWord(Vec::new())
    }

    /// Parses letters left to right, cancelling adjacent inverse pairs.
    pub fn parse(text: &str) -> Result<GroupWord, GroupError> {
        let mut w = GroupWord::identity();
        for c in text.chars() {
            w.push(Letter::from_char(c)?);
        }
        Ok(w)
    }

    /// Appends one letter, cancelling it against the current last letter
    /// when they are mutually inverse.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GroupWord {
    /// The identity prints as the empty string; `parse` accepts it back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// An element of the direct product of two rank-two free groups. The
/// components never interact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupPair {
    pub left: GroupWord,
    pub right: GroupWord,
}

impl GroupPair {
    pub fn identity() -> GroupPair {
        GroupPair::default()
    }

    pub fn mul(&self, other: &GroupPair) -> GroupPair {
        GroupPair { left: self.left.mul(&other.left), right: self.right.mul(&other.right) }
    }

    pub fn is_identity(&self) -> bool {
        self.left.is_identity() && self.right.is_identity()
    }
}

/// A group element of whichever group a machine works over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    F2(GroupWord),
    F2xF2(GroupPair),
}

impl GroupElement {
    pub fn identity_of(group: GroupTag) -> GroupElement {
        match group {
            GroupTag::F2 => GroupElement::F2(GroupWord::identity()),
            GroupTag::F2xF2 => GroupElement::F2xF2(GroupPair::identity()),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        match (self, other) {
            (GroupElement::F2(x), GroupElement::F2(y)) => Ok(GroupElement::F2(x.mul(y))),
            (GroupElement::F2xF2(x), GroupElement::F2xF2(y)) => Ok(GroupElement::F2xF2(x.mul(y))),
            _ => Err(GroupError::GroupMismatch),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::F2(w) => w.is_identity(),
            GroupElement::F2xF2(p) => p.is_identity(),
        }
    }

    pub fn group(&self) -> GroupTag {
        match self {
            GroupElement::F2(_) => GroupTag::F2,
            GroupElement::F2xF2(_) => GroupTag::F2xF2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupTag {
    F2,
    F2xF2,
}

impl GroupTag {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupTag::F2 => "F2",
            GroupTag::F2xF2 => "F2xF2",
        }
    }
}

/// The pair of integer shear matrices `[[1, n], [0, 1]]` and
/// `[[1, 0], [n, 1]]`. For n >= 2 they generate a free group of rank two
/// inside the 2x2 integer matrices of determinant one.
pub fn kn_generators(n: i64) -> (QMatrix, QMatrix) {
    let ma = QMatrix::from_i64(&[&[1, n], &[0, 1]]);
    let mb = QMatrix::from_i64(&[&[1, 0], &[n, 1]]);
    (ma, mb)
}

/// The matrix assigned to a single letter by the embedding: `a` maps to
/// `Ma * Mb * Ma^2`, `b` to `Ma^2 * Mb * Ma`, and inverse letters to the
/// matrix inverses. Requires n >= 2, where the embedding is faithful.
pub fn phi_letter(l: Letter, n: i64) -> QMatrix {
    assert!(n >= 2, "the matrix embedding needs n >= 2, got {n}");
    let (ma, mb) = kn_generators(n);
    let mul = |x: &QMatrix, y: &QMatrix| x.mul_mat(y).expect("2x2 products");
    let ma2 = mul(&ma, &ma);
    let image_a = mul(&mul(&ma, &mb), &ma2);
    let image_b = mul(&mul(&ma2, &mb), &ma);
    match l {
        Letter::A => image_a,
        Letter::B => image_b,
        Letter::AInv => image_a.inverse().expect("determinant one"),
        Letter::BInv => image_b.inverse().expect("determinant one"),
    }
}

/// Extends [`phi_letter`] to words by multiplying letter images in reading
/// order. A homomorphism: the identity word maps to the identity matrix.
pub fn phi(w: &GroupWord, n: i64) -> QMatrix {
    let mut out = QMatrix::identity(2);
    for &l in w.letters() {
        out = out.mul_mat(&phi_letter(l, n)).expect("2x2 products");
    }
    out
}

/// The block-diagonal embedding of a pair: `phi(left)` in the top-left
/// 2x2 block, `phi(right)` in the bottom-right.
pub fn psi(p: &GroupPair, n: i64) -> QMatrix {
    QMatrix::block_diag(&phi(&p.left, n), &phi(&p.right, n))
}

/// A finite automaton over a group: each transition consumes one input
/// symbol or none and multiplies the accumulated group element. The
/// machine accepts an input when some path from the start state to an
/// accept state spells the input and accumulates the group identity.
#[derive(Debug, Clone, PartialEq)]
pub struct EfaMachine {
    pub name: String,
    pub group: GroupTag,
    pub alphabet: Vec<char>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: Vec<String>,
    pub transitions: Vec<EfaTransition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfaTransition {
    pub from: String,
    /// `None` is an epsilon move: no input is consumed.
    pub symbol: Option<char>,
    pub to: String,
    pub element: GroupElement,
}

#[derive(Debug, Error)]
pub enum EfaParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("transition {index}: bad group element: {message}")]
    BadElement { index: usize, message: String },
    #[error("invalid machine:\n{}", crate::automata::format_violations(.0))]
    Invalid(Vec<Violation>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EfaDoc {
    name: String,
    group: GroupTag,
    alphabet: Vec<char>,
    states: Vec<String>,
    start: String,
    accept: Vec<String>,
    transitions: Vec<EfaTransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EfaTransitionDoc {
    from: String,
    #[serde(default)]
    symbol: Option<char>,
    to: String,
    element: ElementDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElementDoc {
    Word(String),
    Pair { left: String, right: String },
}

impl EfaMachine {
    /// Structural validation mirroring the vector-automaton validator:
    /// distinct states and symbols, known start, accept states, and
    /// transition endpoints, declared symbols only.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut push = |code: ViolationCode, message: String| {
            violations.push(Violation { code, message });
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
            if let Some(c) = t.symbol {
                if !self.alphabet.contains(&c) {
                    push(
                        ViolationCode::UnknownSymbol,
                        format!("transition {i} reads undeclared symbol {c:?}"),
                    );
                }
            }
        }
        violations
            .sort_by(|a, b| a.code.as_str().cmp(b.code.as_str()).then(a.message.cmp(&b.message)));
        violations
    }

    pub fn from_json(text: &str) -> Result<EfaMachine, EfaParseError> {
        let doc: EfaDoc = serde_json::from_str(text).map_err(|e| EfaParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (index, t) in doc.transitions.into_iter().enumerate() {
            let bad = |message: String| EfaParseError::BadElement { index, message };
            let element = match (doc.group, t.element) {
                (GroupTag::F2, ElementDoc::Word(w)) => {
                    GroupElement::F2(GroupWord::parse(&w).map_err(|e| bad(e.to_string()))?)
                }
                (GroupTag::F2xF2, ElementDoc::Pair { left, right }) => {
                    GroupElement::F2xF2(GroupPair {
                        left: GroupWord::parse(&left).map_err(|e| bad(e.to_string()))?,
                        right: GroupWord::parse(&right).map_err(|e| bad(e.to_string()))?,
                    })
                }
                (GroupTag::F2, ElementDoc::Pair { .. }) => {
                    return Err(bad("machine works over F2 but the element is a pair".to_owned()))
                }
                (GroupTag::F2xF2, ElementDoc::Word(_)) => {
                    return Err(bad(
                        "machine works over F2xF2 but the element is a single word".to_owned()
                    ))
                }
            };
            transitions.push(EfaTransition { from: t.from, symbol: t.symbol, to: t.to, element });
        }
        let machine = EfaMachine {
            name: doc.name,
            group: doc.group,
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
            Err(EfaParseError::Invalid(violations))
        }
    }

    pub fn to_json(&self) -> String {
        let doc = EfaDoc {
            name: self.name.clone(),
            group: self.group,
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            start: self.start.clone(),
            accept: self.accept.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| EfaTransitionDoc {
                    from: t.from.clone(),
                    symbol: t.symbol,
                    to: t.to.clone(),
                    element: match &t.element {
                        GroupElement::F2(w) => ElementDoc::Word(w.to_string()),
                        GroupElement::F2xF2(p) => ElementDoc::Pair {
                            left: p.left.to_string(),
                            right: p.right.to_string(),
                        },
                    },
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("machine serializes");
        text.push('\n');
        text
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.symbol.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfaVerdict {
    pub outcome: Outcome,
    pub stats: RunStats,
}

/// Runs a group automaton on an input, breadth-first over
/// `(state, position, accumulated element)` configurations with exact
/// deduplication on reduced words. Acceptance requires consuming the whole
/// input in an accept state with the identity element. As with vector
/// automata, only machines with epsilon moves consult the expansion
/// budget, and they report `Inconclusive` when it runs out.
pub fn run_efa(m: &EfaMachine, input: &str, opts: &RunOptions) -> Result<EfaVerdict, RunError> {
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(RunError::InvalidMachine(crate::automata::format_violations(&violations)));
    }
    let state_of: HashMap<&String, usize> =
        m.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let accepting: Vec<bool> = m.states.iter().map(|s| m.accept.contains(s)).collect();
    let start = state_of[&m.start];
    let mut by_symbol: HashMap<(usize, Option<char>), Vec<usize>> = HashMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        by_symbol.entry((state_of[&t.from], t.symbol)).or_default().push(i);
    }

    let allowed: HashSet<char> = m.alphabet.iter().copied().collect();
    let chars: Vec<char> = input.chars().collect();
    for (position, &symbol) in chars.iter().enumerate() {
        if !allowed.contains(&symbol) {
            return Err(RunError::SymbolOutsideAlphabet { symbol, position });
        }
    }
    let n = chars.len();

    let identity = GroupElement::identity_of(m.group);
    let mut stats = RunStats { configurations_expanded: 0, max_frontier: 1 };
    if n == 0 && accepting[start] {
        return Ok(EfaVerdict { outcome: Outcome::Accept, stats });
    }

    let mut visited: HashSet<(usize, usize, GroupElement)> = HashSet::new();
    visited.insert((start, 0, identity.clone()));
    let mut queue: VecDeque<(usize, usize, GroupElement)> = VecDeque::new();
    queue.push_back((start, 0, identity.clone()));
    let budgeted = m.has_epsilon();
    let mut applicable: Vec<usize> = Vec::new();

    while let Some((state, pos, element)) = queue.pop_front() {
        if budgeted && stats.configurations_expanded >= opts.budget {
            return Ok(EfaVerdict { outcome: Outcome::Inconclusive, stats });
        }
        stats.configurations_expanded += 1;

        applicable.clear();
        if pos < n {
            if let Some(group) = by_symbol.get(&(state, Some(chars[pos]))) {
                applicable.extend_from_slice(group);
            }
        }
        if let Some(group) = by_symbol.get(&(state, None)) {
            applicable.extend_from_slice(group);
        }
        applicable.sort_unstable();

        for &ti in &applicable {
            let t = &m.transitions[ti];
            let next =
                element.mul(&t.element).map_err(|e| RunError::InvalidMachine(e.to_string()))?;
            let next_pos = if t.symbol.is_some() { pos + 1 } else { pos };
            let next_state = state_of[&t.to];
            if !visited.insert((next_state, next_pos, next.clone())) {
                continue;
            }
            if next_pos == n && accepting[next_state] && next.is_identity() {
                return Ok(EfaVerdict { outcome: Outcome::Accept, stats });
            }
            queue.push_back((next_state, next_pos, next));
        }
        stats.max_frontier = stats.max_frontier.max(queue.len());
    }

    Ok(EfaVerdict { outcome: Outcome::Reject, stats })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("machine works over {found}, expected {expected}")]
    WrongGroup { expected: &'static str, found: &'static str },
    #[error("the matrix embedding needs a scale of at least 2, got {0}")]
    BadScale(i64),
}

/// Compiles a group automaton over the rank-two free group into a blind,
/// nondeterministic, one-way vector automaton of dimension 2. Every
/// transition keeps its symbol and target and carries the matrix image of
/// its group element; the initial vector is `[1, 0]`, which only the
/// identity of the embedded group fixes, so the homing condition decides
/// exactly the group-identity condition.
pub fn translate_efa_f2(m: &EfaMachine, n: i64) -> Result<HvaMachine, TranslateError> {
    if m.group != GroupTag::F2 {
        return Err(TranslateError::WrongGroup {
            expected: GroupTag::F2.as_str(),
            found: m.group.as_str(),
        });
    }
    if n < 2 {
        return Err(TranslateError::BadScale(n));
    }
    let matrix_of = |element: &GroupElement| match element {
        GroupElement::F2(w) => phi(w, n),
        GroupElement::F2xF2(_) => unreachable!("group checked above"),
    };
    Ok(translate_common(m, 2, QVector::from_i64(&[1, 0]), matrix_of))
}

/// The pair analogue of [`translate_efa_f2`]: dimension 4, block-diagonal
/// matrices, initial vector `[1, 0, 1, 0]`.
pub fn translate_efa_f2xf2(m: &EfaMachine, n: i64) -> Result<HvaMachine, TranslateError> {
    if m.group != GroupTag::F2xF2 {
        return Err(TranslateError::WrongGroup {
            expected: GroupTag::F2xF2.as_str(),
            found: m.group.as_str(),
        });
    }
    if n < 2 {
        return Err(TranslateError::BadScale(n));
    }
    let matrix_of = |element: &GroupElement| match element {
        GroupElement::F2xF2(p) => psi(p, n),
        GroupElement::F2(_) => unreachable!("group checked above"),
    };
    Ok(translate_common(m, 4, QVector::from_i64(&[1, 0, 1, 0]), matrix_of))
}

fn translate_common(
    m: &EfaMachine,
    dimension: usize,
    initial_vector: QVector,
    matrix_of: impl Fn(&GroupElement) -> QMatrix,
) -> HvaMachine {
    HvaMachine {
        name: format!("{}_hva", m.name),
        mode: ModeFlags::new(Head::Oneway, Control::Nondeterministic, true),
        dimension,
        alphabet: m.alphabet.clone(),
        states: m.states.clone(),
        start: m.start.clone(),
        accept: m.accept.clone(),
        initial_vector,
        transitions: m
            .transitions
            .iter()
            .map(|t| Transition {
                from: t.from.clone(),
                symbol: t.symbol,
                guard: Guard::Any,
                to: t.to.clone(),
                matrix: matrix_of(&t.element),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;

    fn word(text: &str) -> GroupWord {
        GroupWord::parse(text).unwrap()
    }

    /// One-state machine over F2 whose symbols a, A, b, B each multiply
    /// the matching group element: it accepts exactly the words that
    /// reduce to the identity.
    fn identity_language_machine() -> EfaMachine {
        let t = |symbol: char, element: &str| EfaTransition {
            from: "q0".to_owned(),
            symbol: Some(symbol),
            to: "q0".to_owned(),
            element: GroupElement::F2(word(element)),
        };
        EfaMachine {
            name: "wp".to_owned(),
            group: GroupTag::F2,
            alphabet: vec!['a', 'A', 'b', 'B'],
            states: vec!["q0".to_owned()],
            start: "q0".to_owned(),
            accept: vec!["q0".to_owned()],
            transitions: vec![t('a', "a"), t('A', "A"), t('b', "b"), t('B', "B")],
        }
    }

    #[test]
    fn words_reduce_on_construction() {
        assert!(word("").is_identity());
        assert!(word("aA").is_identity());
        assert!(word("abBA").is_identity());
        assert_eq!(word("aAb"), word("b"));
        assert_eq!(word("abA").to_string(), "abA");
        assert_eq!(word("aabbBBAA"), GroupWord::identity());
    }

    #[test]
    fn group_axioms_hold() {
        let x = word("abA");
        let y = word("aB");
        assert_eq!(x.mul(&x.inverse()), GroupWord::identity());
        assert_eq!(x.inverse().mul(&x), GroupWord::identity());
        assert_eq!(x.mul(&GroupWord::identity()), x);
        let z = word("bba");
        assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn letter_images_at_scale_two() {
        assert_eq!(phi_letter(Letter::A, 2), QMatrix::from_i64(&[&[5, 22], &[2, 9]]));
        assert_eq!(phi_letter(Letter::B, 2), QMatrix::from_i64(&[&[9, 22], &[2, 5]]));
        assert_eq!(
            phi_letter(Letter::A, 2).mul_mat(&phi_letter(Letter::AInv, 2)).unwrap(),
            QMatrix::identity(2)
        );
    }

    #[test]
    fn phi_is_a_homomorphism() {
        let x = word("abAB");
        let y = word("ba");
        assert_eq!(phi(&x.mul(&y), 2), phi(&x, 2).mul_mat(&phi(&y, 2)).unwrap());
        assert_eq!(phi(&GroupWord::identity(), 2), QMatrix::identity(2));
        assert!(phi(&x, 2).is_integer());
    }

    #[test]
    fn psi_acts_blockwise() {
        let p = GroupPair { left: word("a"), right: word("B") };
        let m = psi(&p, 2);
        assert_eq!(m.dim(), 4);
        assert_eq!(m.entry(0, 0), &crate::numerics::Rational::new(5, 1).unwrap());
        assert_eq!(m.entry(2, 3), phi(&word("B"), 2).entry(0, 1));
        assert!(m.entry(0, 2).is_zero() && m.entry(3, 1).is_zero());
    }

    #[test]
    fn nontrivial_images_move_the_probe_vector() {
        let probe = QVector::from_i64(&[1, 0]);
        for text in ["a", "b", "A", "B", "ab", "aB", "ba", "abAB"] {
            let image = phi(&word(text), 2);
            assert_ne!(probe.mul_mat(&image).unwrap(), probe, "word {text:?}");
        }
    }

    #[test]
    fn efa_accepts_exactly_identity_spellings() {
        let m = identity_language_machine();
        let opts = RunOptions::default();
        for yes in ["", "aA", "Aa", "bB", "abBA", "aabBAA", "abAB".repeat(0).as_str()] {
            assert_eq!(run_efa(&m, yes, &opts).unwrap().outcome, Outcome::Accept, "{yes:?}");
        }
        for no in ["a", "ab", "abA", "abAB", "aabb"] {
            assert_eq!(run_efa(&m, no, &opts).unwrap().outcome, Outcome::Reject, "{no:?}");
        }
    }

    #[test]
    fn efa_epsilon_moves_respect_the_budget() {
        let mut m = identity_language_machine();
        // An epsilon loop that keeps multiplying by `a` grows the element
        // forever; the budget must cut the run off.
        m.transitions.push(EfaTransition {
            from: "q0".to_owned(),
            symbol: None,
            to: "q0".to_owned(),
            element: GroupElement::F2(word("a")),
        });
        let opts = RunOptions { budget: 25, ..RunOptions::default() };
        // "A" is still accepted quickly: one epsilon move produces a, then
        // reading A cancels it... but the search may also find it by
        // reading A first and applying the epsilon after.
        assert_eq!(run_efa(&m, "A", &opts).unwrap().outcome, Outcome::Accept);
        assert_eq!(run_efa(&m, "b", &opts).unwrap().outcome, Outcome::Inconclusive);
    }

    #[test]
    fn efa_json_roundtrip() {
        let m = identity_language_machine();
        let text = m.to_json();
        let back = EfaMachine::from_json(&text).unwrap();
        assert_eq!(back, m);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["group"], "F2");
        assert_eq!(value["transitions"][0]["element"], "a");
    }

    #[test]
    fn efa_json_rejects_mismatched_elements() {
        let text = r#"{
            "name": "bad",
            "group": "F2",
            "alphabet": ["a"],
            "states": ["q0"],
            "start": "q0",
            "accept": ["q0"],
            "transitions": [
                {"from": "q0", "symbol": "a", "to": "q0", "element": {"left": "a", "right": "b"}}
            ]
        }"#;
        assert!(matches!(
            EfaMachine::from_json(text),
            Err(EfaParseError::BadElement { index: 0, .. })
        ));
    }

    #[test]
    fn efa_json_rejects_unknown_structure() {
        let text = r#"{
            "name": "bad",
            "group": "F2",
            "alphabet": ["a"],
            "states": ["q0"],
            "start": "missing",
            "accept": ["q0"],
            "transitions": []
        }"#;
        match EfaMachine::from_json(text) {
            Err(EfaParseError::Invalid(v)) => {
                assert!(v.iter().any(|x| x.code == ViolationCode::UnknownState));
            }
            other => panic!("expected invalid machine, got {other:?}"),
        }
    }

    #[test]
    fn translation_preserves_the_language() {
        let m = identity_language_machine();
        let hva = translate_efa_f2(&m, 2).unwrap();
        assert!(hva.validate().is_empty());
        assert!(hva.mode.blind);
        assert_eq!(hva.dimension, 2);
        assert_eq!(hva.initial_vector, QVector::from_i64(&[1, 0]));
        let opts = RunOptions::default();
        for input in ["", "aA", "abBA", "a", "ab", "abAB", "BbaA"] {
            let direct = run_efa(&m, input, &opts).unwrap().outcome;
            let compiled = engine::run(&hva, input, &opts).unwrap().outcome;
            assert_eq!(direct, compiled, "input {input:?}");
        }
    }

    #[test]
    fn pair_translation_tracks_both_components() {
        // Symbols a/A act on the left component, b/B on the right: the
        // language is "both projections reduce to the identity".
        let t = |symbol: char, left: &str, right: &str| EfaTransition {
            from: "q0".to_owned(),
            symbol: Some(symbol),
            to: "q0".to_owned(),
            element: GroupElement::F2xF2(GroupPair { left: word(left), right: word(right) }),
        };
        let m = EfaMachine {
            name: "wp_pair".to_owned(),
            group: GroupTag::F2xF2,
            alphabet: vec!['a', 'A', 'b', 'B'],
            states: vec!["q0".to_owned()],
            start: "q0".to_owned(),
            accept: vec!["q0".to_owned()],
            transitions: vec![t('a', "a", ""), t('A', "A", ""), t('b', "", "b"), t('B', "", "B")],
        };
        let hva = translate_efa_f2xf2(&m, 2).unwrap();
        assert!(hva.validate().is_empty());
        assert_eq!(hva.dimension, 4);
        let opts = RunOptions::default();
        for input in ["", "aA", "bB", "abAB", "aAbB", "ab", "a", "b"] {
            let direct = run_efa(&m, input, &opts).unwrap().outcome;
            let compiled = engine::run(&hva, input, &opts).unwrap().outcome;
            assert_eq!(direct, compiled, "input {input:?}");
        }
    }

    #[test]
    fn translations_reject_wrong_groups_and_scales() {
        let m = identity_language_machine();
        assert!(matches!(translate_efa_f2xf2(&m, 2), Err(TranslateError::WrongGroup { .. })));
        assert!(matches!(translate_efa_f2(&m, 1), Err(TranslateError::BadScale(1))));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reduction_is_idempotent(text in "[aAbB]{0,24}") {
                let w = word(&text);
                prop_assert_eq!(word(&w.to_string()), w);
            }

            #[test]
            fn inverse_cancels(text in "[aAbB]{0,24}") {
                let w = word(&text);
                prop_assert!(w.mul(&w.inverse()).is_identity());
            }

            #[test]
            fn phi_respects_products(x in "[aAbB]{0,8}", y in "[aAbB]{0,8}") {
                let (wx, wy) = (word(&x), word(&y));
                prop_assert_eq!(
                    phi(&wx.mul(&wy), 2),
                    phi(&wx, 2).mul_mat(&phi(&wy, 2)).unwrap()
                );
            }

            #[test]
            fn probe_detects_identity(text in "[aAbB]{0,10}") {
                let w = word(&text);
                let probe = QVector::from_i64(&[1, 0]);
                let moved = probe.mul_mat(&phi(&w, 2)).unwrap();
                prop_assert_eq!(moved == probe, w.is_identity());
            }
        }
    }
}
