//! Programmatic constructors for every catalog machine.

use crate::automata::{Control, Guard, Head, HvaMachine, ModeFlags, Transition};
use crate::constructions::{simulate_blind_counters, CounterMachine, CounterTransition};
use crate::freegroup::{EfaMachine, EfaTransition, GroupElement, GroupPair, GroupTag, GroupWord};
use crate::numerics::{QMatrix, QVector, Rational};
use crate::sternbrocot;

use super::ZooError;

fn t(from: &str, symbol: char, guard: Guard, to: &str, matrix: &QMatrix) -> Transition {
    Transition {
        from: from.to_owned(),
        symbol: Some(symbol),
        guard,
        to: to.to_owned(),
        matrix: matrix.clone(),
    }
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| (*s).to_owned()).collect()
}

/// Deterministic non-blind machine of dimension 2 for the strings
/// a^n b^p a^q (maximal blocks) with n = p or n = p + q. The first entry
/// counts a's up and b's down; the equality guard routes the tail: if the
/// vector is home when the tail of a's begins, the count must merely stay
/// home (n = p); otherwise every tail symbol keeps subtracting (n = p + q).
pub(crate) fn thm51() -> HvaMachine {
    let up = QMatrix::from_i64(&[&[1, 0], &[1, 1]]);
    let down = QMatrix::from_i64(&[&[1, 0], &[-1, 1]]);
    let id = QMatrix::identity(2);
    HvaMachine {
        name: "thm51".to_owned(),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, false),
        dimension: 2,
        alphabet: vec!['a', 'b'],
        states: owned(&["a_phase", "b_phase", "tail_eq", "tail_sum"]),
        start: "a_phase".to_owned(),
        accept: owned(&["a_phase", "b_phase", "tail_eq", "tail_sum"]),
        initial_vector: QVector::from_i64(&[1, 1]),
        transitions: vec![
            t("a_phase", 'a', Guard::Eq, "a_phase", &up),
            t("a_phase", 'a', Guard::Neq, "a_phase", &up),
            t("a_phase", 'b', Guard::Eq, "b_phase", &down),
            t("a_phase", 'b', Guard::Neq, "b_phase", &down),
            t("b_phase", 'b', Guard::Eq, "b_phase", &down),
            t("b_phase", 'b', Guard::Neq, "b_phase", &down),
            t("b_phase", 'a', Guard::Eq, "tail_eq", &id),
            t("b_phase", 'a', Guard::Neq, "tail_sum", &down),
            t("tail_eq", 'a', Guard::Eq, "tail_eq", &id),
            t("tail_sum", 'a', Guard::Eq, "tail_sum", &down),
            t("tail_sum", 'a', Guard::Neq, "tail_sum", &down),
        ],
    }
}

/// The same language and state graph as [`thm51`] with a one-dimensional
/// vector: a's double the single entry, b's and summed tail symbols halve
/// it, so the entry is 2^(difference) and homes exactly when the counts
/// match.
pub(crate) fn thm51_scalar() -> HvaMachine {
    let double = QMatrix::from_i64(&[&[2]]);
    let halve = QMatrix::from_rows(vec![vec![Rational::new(1, 2).expect("nonzero denominator")]])
        .expect("square");
    let id = QMatrix::identity(1);
    let mut m = thm51();
    m.name = "thm51_scalar".to_owned();
    m.dimension = 1;
    m.initial_vector = QVector::from_i64(&[1]);
    for tr in &mut m.transitions {
        tr.matrix = if tr.matrix == QMatrix::identity(2) {
            id.clone()
        } else if tr.symbol == Some('a') && tr.to != "tail_sum" {
            double.clone()
        } else {
            halve.clone()
        };
    }
    m
}

/// Nondeterministic blind machine of dimension 3 for the unary language
/// of lengths n + 2^n (n >= 1). Growing steps double the first two
/// entries; one guessed committing step applies the identity; shrinking
/// steps subtract 1 from the first entry and pin the second to 1, so the
/// all-ones vector returns after exactly 2^n - 1 of them.
pub(crate) fn upow() -> HvaMachine {
    let u1 = QMatrix::from_i64(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
    let u2 = QMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[-1, 1, 1]]);
    let id = QMatrix::identity(3);
    HvaMachine {
        name: "upow".to_owned(),
        mode: ModeFlags::new(Head::Realtime, Control::Nondeterministic, true),
        dimension: 3,
        alphabet: vec!['a'],
        states: owned(&["start", "grow", "shrink"]),
        start: "start".to_owned(),
        accept: owned(&["shrink"]),
        initial_vector: QVector::ones(3),
        transitions: vec![
            t("start", 'a', Guard::Any, "grow", &u1),
            t("grow", 'a', Guard::Any, "grow", &u1),
            t("grow", 'a', Guard::Any, "shrink", &id),
            t("shrink", 'a', Guard::Any, "shrink", &u2),
        ],
    }
}

/// Nondeterministic blind machine of dimension 5 deciding whether some
/// subset of the listed numbers sums to the target. The input is
/// t#x1#...#xm# with every number written least-significant bit first.
/// Entry 1 holds the target, entry 2 the value of the number being read
/// when it has been selected, entries 3 and 4 the current bit weight, and
/// entry 5 stays 1. Each terminating # subtracts the selected value from
/// the target and resets the bit weight, so the vector is home at the end
/// exactly when the selected values consumed the whole target.
pub(crate) fn subsetsum_r() -> HvaMachine {
    let m_t0 = QMatrix::from_i64(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let m_t1 = QMatrix::from_i64(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[1, 0, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let m_hash = QMatrix::from_i64(&[
        &[1, 0, 0, 0, 0],
        &[-1, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 0, 1, 1, 1],
    ]);
    let m_a0 = m_t0.clone();
    let m_a1 = QMatrix::from_i64(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[0, 1, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let any = Guard::Any;
    let mut transitions = vec![
        t("t_start", '0', any, "t_read", &m_t0),
        t("t_start", '1', any, "t_read", &m_t1),
        t("t_read", '0', any, "t_read", &m_t0),
        t("t_read", '1', any, "t_read", &m_t1),
        t("t_read", '#', any, "num_start", &m_hash),
    ];
    for opener in ["num_start", "num_end"] {
        transitions.push(t(opener, '0', any, "num_add", &m_a0));
        transitions.push(t(opener, '0', any, "num_skip", &m_t0));
        transitions.push(t(opener, '1', any, "num_add", &m_a1));
        transitions.push(t(opener, '1', any, "num_skip", &m_t0));
    }
    transitions.extend([
        t("num_add", '0', any, "num_add", &m_a0),
        t("num_add", '1', any, "num_add", &m_a1),
        t("num_add", '#', any, "num_end", &m_hash),
        t("num_skip", '0', any, "num_skip", &m_t0),
        t("num_skip", '1', any, "num_skip", &m_t0),
        t("num_skip", '#', any, "num_end", &m_hash),
    ]);
    HvaMachine {
        name: "subsetsum_r".to_owned(),
        mode: ModeFlags::new(Head::Realtime, Control::Nondeterministic, true),
        dimension: 5,
        alphabet: vec!['0', '1', '#'],
        states: owned(&["t_start", "t_read", "num_start", "num_add", "num_skip", "num_end"]),
        start: "t_start".to_owned(),
        accept: owned(&["num_end"]),
        initial_vector: QVector::from_i64(&[0, 0, 1, 1, 1]),
        transitions,
    }
}

/// Deterministic blind machine of dimension `l` for marked palindromes
/// w#reverse(w) over an l-letter alphabet. Before the marker each letter
/// applies its encoding matrix; after it, the inverse. The vector returns
/// to all ones exactly when the second half undoes the first in reverse
/// order, because the encoding is injective.
pub(crate) fn mpal(l: usize) -> Result<HvaMachine, ZooError> {
    let symbols = sternbrocot::index_symbols(l).map_err(|_| ZooError::BadAlphabetSize(l))?;
    let mut alphabet = symbols.clone();
    alphabet.push('#');
    let mut transitions = Vec::new();
    for (j, &symbol) in symbols.iter().enumerate() {
        let forward = sternbrocot::alphabet_matrix(l, j + 1).expect("valid letter index");
        transitions.push(t("enc", symbol, Guard::Any, "enc", &forward));
    }
    transitions.push(t("enc", '#', Guard::Any, "dec", &QMatrix::identity(l)));
    for (j, &symbol) in symbols.iter().enumerate() {
        let forward = sternbrocot::alphabet_matrix(l, j + 1).expect("valid letter index");
        let backward = forward.inverse().expect("unimodular");
        transitions.push(t("dec", symbol, Guard::Any, "dec", &backward));
    }
    Ok(HvaMachine {
        name: format!("mpal_{l}"),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, true),
        dimension: l,
        alphabet,
        states: owned(&["enc", "dec"]),
        start: "enc".to_owned(),
        accept: owned(&["dec"]),
        initial_vector: QVector::ones(l),
        transitions,
    })
}

/// Deterministic blind machine of dimension 3 for a^n b^(2^n) (n >= 0).
/// The a's double the first entry; the first b resets the second entry to
/// 1 (restoring that coordinate of the initial vector) and every further b
/// subtracts 1 from the first entry, so all ones returns after exactly
/// 2^n b's.
pub(crate) fn pow() -> HvaMachine {
    let u1 = QMatrix::from_i64(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
    let reset = QMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 1, 1]]);
    let dec = QMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[-1, 0, 1]]);
    HvaMachine {
        name: "pow".to_owned(),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, true),
        dimension: 3,
        alphabet: vec!['a', 'b'],
        states: owned(&["a_phase", "b_phase"]),
        start: "a_phase".to_owned(),
        accept: owned(&["b_phase"]),
        initial_vector: QVector::ones(3),
        transitions: vec![
            t("a_phase", 'a', Guard::Any, "a_phase", &u1),
            t("a_phase", 'b', Guard::Any, "b_phase", &reset),
            t("b_phase", 'b', Guard::Any, "b_phase", &dec),
        ],
    }
}

/// Deterministic blind machine of dimension 2 for a^(2^n) b^n (n >= 0).
/// The first a is a no-op, each further a adds 1 to the first entry
/// (reaching m after a^m), and each b halves it, so the vector homes
/// exactly when the a-count is 2^(b-count).
pub(crate) fn pow_r() -> HvaMachine {
    let id = QMatrix::identity(2);
    let bump = QMatrix::from_i64(&[&[1, 0], &[1, 1]]);
    let halve = QMatrix::from_rows(vec![
        vec![Rational::new(1, 2).expect("nonzero denominator"), Rational::zero()],
        vec![Rational::zero(), Rational::one()],
    ])
    .expect("square");
    HvaMachine {
        name: "pow_r".to_owned(),
        mode: ModeFlags::new(Head::Realtime, Control::Deterministic, true),
        dimension: 2,
        alphabet: vec!['a', 'b'],
        states: owned(&["start", "a_phase", "b_phase"]),
        start: "start".to_owned(),
        accept: owned(&["a_phase", "b_phase"]),
        initial_vector: QVector::from_i64(&[1, 1]),
        transitions: vec![
            t("start", 'a', Guard::Any, "a_phase", &id),
            t("a_phase", 'a', Guard::Any, "a_phase", &bump),
            t("a_phase", 'b', Guard::Any, "b_phase", &halve),
            t("b_phase", 'b', Guard::Any, "b_phase", &halve),
        ],
    }
}

fn blind_counter_transition(
    from: &str,
    symbol: char,
    to: &str,
    increments: &[i64],
) -> CounterTransition {
    CounterTransition {
        from: from.to_owned(),
        symbol,
        pattern: None,
        to: to.to_owned(),
        increments: increments.to_vec(),
    }
}

/// Blind one-counter machine for a^n b^n: up on a, down on b.
pub(crate) fn anbn_counter() -> CounterMachine {
    CounterMachine {
        name: "anbn".to_owned(),
        counters: 1,
        blind: true,
        zero_acceptance: true,
        alphabet: vec!['a', 'b'],
        states: owned(&["a_run", "b_run"]),
        start: "a_run".to_owned(),
        accept: owned(&["a_run", "b_run"]),
        transitions: vec![
            blind_counter_transition("a_run", 'a', "a_run", &[1]),
            blind_counter_transition("a_run", 'b', "b_run", &[-1]),
            blind_counter_transition("b_run", 'b', "b_run", &[-1]),
        ],
    }
}

/// Blind one-counter machine for a^n b^2n: up on a, down on every second b.
pub(crate) fn anb2n_counter() -> CounterMachine {
    CounterMachine {
        name: "anb2n".to_owned(),
        counters: 1,
        blind: true,
        zero_acceptance: true,
        alphabet: vec!['a', 'b'],
        states: owned(&["a_run", "b_odd", "b_even"]),
        start: "a_run".to_owned(),
        accept: owned(&["a_run", "b_even"]),
        transitions: vec![
            blind_counter_transition("a_run", 'a', "a_run", &[1]),
            blind_counter_transition("a_run", 'b', "b_odd", &[0]),
            blind_counter_transition("b_odd", 'b', "b_even", &[-1]),
            blind_counter_transition("b_even", 'b', "b_odd", &[0]),
        ],
    }
}

/// Deterministic blind machine of dimension 2 for a^n b^n, compiled from
/// the one-counter machine.
pub(crate) fn anbn() -> HvaMachine {
    let mut m = simulate_blind_counters(&anbn_counter()).expect("blind counter machine");
    m.name = "anbn".to_owned();
    m
}

/// Deterministic blind machine of dimension 2 for a^n b^2n, compiled from
/// the one-counter machine.
pub(crate) fn anb2n() -> HvaMachine {
    let mut m = simulate_blind_counters(&anb2n_counter()).expect("blind counter machine");
    m.name = "anb2n".to_owned();
    m
}

/// Blind two-counter machine for a^n b^n c^n: counter 1 is up on a and
/// down on b, counter 2 is up on b and down on c.
pub(crate) fn abc_counters() -> CounterMachine {
    CounterMachine {
        name: "abc_counters".to_owned(),
        counters: 2,
        blind: true,
        zero_acceptance: true,
        alphabet: vec!['a', 'b', 'c'],
        states: owned(&["a_run", "b_run", "c_run"]),
        start: "a_run".to_owned(),
        accept: owned(&["a_run", "b_run", "c_run"]),
        transitions: vec![
            blind_counter_transition("a_run", 'a', "a_run", &[1, 0]),
            blind_counter_transition("a_run", 'b', "b_run", &[-1, 1]),
            blind_counter_transition("b_run", 'b', "b_run", &[-1, 1]),
            blind_counter_transition("b_run", 'c', "c_run", &[0, -1]),
            blind_counter_transition("c_run", 'c', "c_run", &[0, -1]),
        ],
    }
}

/// One-state group automaton over the rank-two free group whose four
/// input symbols multiply the matching generator or inverse: it accepts
/// exactly the words that reduce to the identity.
pub(crate) fn wp_f2() -> EfaMachine {
    let t = |symbol: char, element: &str| EfaTransition {
        from: "q0".to_owned(),
        symbol: Some(symbol),
        to: "q0".to_owned(),
        element: GroupElement::F2(GroupWord::parse(element).expect("generator letters")),
    };
    EfaMachine {
        name: "wp_f2".to_owned(),
        group: GroupTag::F2,
        alphabet: vec!['a', 'A', 'b', 'B'],
        states: vec!["q0".to_owned()],
        start: "q0".to_owned(),
        accept: vec!["q0".to_owned()],
        transitions: vec![t('a', "a"), t('A', "A"), t('b', "b"), t('B', "B")],
    }
}

/// One-state group automaton over the product of two rank-two free
/// groups: a and A multiply the left component, b and B the right, so a
/// word is accepted exactly when both components cancel independently.
pub(crate) fn wp_f2xf2() -> EfaMachine {
    let t = |symbol: char, left: &str, right: &str| EfaTransition {
        from: "q0".to_owned(),
        symbol: Some(symbol),
        to: "q0".to_owned(),
        element: GroupElement::F2xF2(GroupPair {
            left: GroupWord::parse(left).expect("generator letters"),
            right: GroupWord::parse(right).expect("generator letters"),
        }),
    };
    EfaMachine {
        name: "wp_f2xf2".to_owned(),
        group: GroupTag::F2xF2,
        alphabet: vec!['a', 'A', 'b', 'B'],
        states: vec!["q0".to_owned()],
        start: "q0".to_owned(),
        accept: vec!["q0".to_owned()],
        transitions: vec![t('a', "a", ""), t('A', "A", ""), t('b', "", "b"), t('B', "", "B")],
    }
}
