//! A catalog of concrete machines paired with brute-force language
//! oracles, plus an exhaustive check harness that compares the two.
//!
//! Each entry bundles an executable machine, an independent membership
//! oracle written straight from the language definition, and a short
//! description. The harness in [`check`] walks all inputs up to a length
//! bound (or an explicit input list) and reports every disagreement; every
//! acceptance is additionally re-derived by the engine and its trace
//! replayed. A handful of languages are listed as oracles only: no machine
//! of the corresponding deterministic kind exists for them, and they are
//! used to exercise the closure constructions.

pub mod check;
pub(crate) mod machines;
pub(crate) mod oracles;

pub use check::{check, check_inputs, CheckFailure, CheckOptions, CheckReport};
pub use oracles::{ab_blocks, lsb_encoding, strings_over, subsetsum_instances, unary_strings};

use thiserror::Error;

use crate::automata::HvaMachine;
use crate::constructions::CounterMachine;
use crate::freegroup::EfaMachine;

/// A language membership test: total over the relevant alphabet.
pub type Oracle = Box<dyn Fn(&str) -> bool + Send + Sync>;

/// Any of the three machine kinds a catalog entry can carry.
#[derive(Debug, Clone)]
pub enum ZooMachine {
    Hva(HvaMachine),
    Efa(EfaMachine),
    Counter(CounterMachine),
}

impl ZooMachine {
    pub fn name(&self) -> &str {
        match self {
            ZooMachine::Hva(m) => &m.name,
            ZooMachine::Efa(m) => &m.name,
            ZooMachine::Counter(m) => &m.name,
        }
    }

    pub fn alphabet(&self) -> Vec<char> {
        match self {
            ZooMachine::Hva(m) => m.alphabet.clone(),
            ZooMachine::Efa(m) => m.alphabet.clone(),
            ZooMachine::Counter(m) => m.alphabet.clone(),
        }
    }

    /// Structural violations, empty when the machine is well-formed.
    pub fn violations(&self) -> Vec<crate::automata::Violation> {
        match self {
            ZooMachine::Hva(m) => m.validate(),
            ZooMachine::Efa(m) => m.validate(),
            ZooMachine::Counter(m) => m.validate(),
        }
    }

    /// The machine serialized in its on-disk document format.
    pub fn to_json(&self) -> String {
        match self {
            ZooMachine::Hva(m) => m.to_json(),
            ZooMachine::Efa(m) => m.to_json(),
            ZooMachine::Counter(m) => m.to_json(),
        }
    }
}

/// One catalog entry: a machine, the independent oracle for its language,
/// and a one-line description of that language.
pub struct ZooEntry {
    pub name: String,
    pub machine: ZooMachine,
    pub oracle: Oracle,
    pub notes: String,
}

impl std::fmt::Debug for ZooEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZooEntry")
            .field("name", &self.name)
            .field("machine", &self.machine)
            .field("notes", &self.notes)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZooError {
    #[error("unknown catalog name {0:?}")]
    UnknownName(String),
    #[error("marked palindrome machines need an alphabet size between 2 and 9, got {0}")]
    BadAlphabetSize(usize),
}

/// Names of the catalog entries that carry machines.
pub fn names() -> &'static [&'static str] {
    &[
        "thm51",
        "thm51_scalar",
        "upow",
        "subsetsum_r",
        "mpal_l",
        "pow",
        "pow_r",
        "anbn",
        "anb2n",
        "abc_counters",
        "wp_f2",
        "wp_f2xf2",
    ]
}

/// Names of languages that exist only as oracles: provably out of reach
/// for the corresponding deterministic machines, kept for exercising the
/// closure constructions.
pub fn oracle_only_names() -> &'static [&'static str] {
    &["union", "l_bab", "ijk", "union_c"]
}

/// One-line description of a catalog or oracle-only language.
pub fn describe(name: &str) -> Result<&'static str, ZooError> {
    Ok(match name {
        "thm51" => "a^n b^p a^q with n = p or n = p + q; deterministic, 2-dimensional",
        "thm51_scalar" => "same language as thm51 with a 1-dimensional vector of powers of 2",
        "upow" => "unary strings of length n + 2^n (n >= 1); nondeterministic, 3-dimensional",
        "subsetsum_r" => {
            "t#x1#...#xm# (numbers least-significant bit first) with a subset of the x's summing to t"
        }
        "mpal_l" => "marked palindromes w#reverse(w); deterministic, dimension = alphabet size",
        "pow" => "a^n b^(2^n) (n >= 0); deterministic, 3-dimensional",
        "pow_r" => "a^(2^n) b^n (n >= 0); deterministic, 2-dimensional",
        "anbn" => "a^n b^n, compiled from a blind one-counter machine",
        "anb2n" => "a^n b^2n, compiled from a blind one-counter machine",
        "abc_counters" => "a^n b^n c^n as a blind two-counter machine",
        "wp_f2" => "words over a, A, b, B reducing to the identity of the free group",
        "wp_f2xf2" => "words whose a/A part and b/B part each reduce to the identity",
        "union" => "a^n b^n union a^n b^2n (oracle only: no one-way deterministic machine)",
        "l_bab" => "b^n (a^n b^n)^k with n, k >= 1 (oracle only)",
        "ijk" => "a^i b^j c^k with i != j or j > k (oracle only)",
        "union_c" => "a^n b^n union a^n b^2n c (oracle only)",
        other => return Err(ZooError::UnknownName(other.to_owned())),
    })
}

/// Builds a catalog entry by name. `mpal_l` defaults to the two-letter
/// alphabet; `mpal_2` through `mpal_9` select a size explicitly.
pub fn build(name: &str) -> Result<ZooEntry, ZooError> {
    if let Some(rest) = name.strip_prefix("mpal_") {
        if rest == "l" {
            return build_mpal(2);
        }
        if let Ok(l) = rest.parse::<usize>() {
            return build_mpal(l);
        }
    }
    let (machine, oracle): (ZooMachine, Oracle) = match name {
        "thm51" => (ZooMachine::Hva(machines::thm51()), Box::new(oracles::thm51)),
        "thm51_scalar" => (ZooMachine::Hva(machines::thm51_scalar()), Box::new(oracles::thm51)),
        "upow" => (ZooMachine::Hva(machines::upow()), Box::new(oracles::upow)),
        "subsetsum_r" => (ZooMachine::Hva(machines::subsetsum_r()), Box::new(oracles::subsetsum_r)),
        "pow" => (ZooMachine::Hva(machines::pow()), Box::new(oracles::pow)),
        "pow_r" => (ZooMachine::Hva(machines::pow_r()), Box::new(oracles::pow_r)),
        "anbn" => (ZooMachine::Hva(machines::anbn()), Box::new(oracles::anbn)),
        "anb2n" => (ZooMachine::Hva(machines::anb2n()), Box::new(oracles::anb2n)),
        "abc_counters" => {
            (ZooMachine::Counter(machines::abc_counters()), Box::new(oracles::abc_counters))
        }
        "wp_f2" => (ZooMachine::Efa(machines::wp_f2()), Box::new(oracles::wp_f2)),
        "wp_f2xf2" => (ZooMachine::Efa(machines::wp_f2xf2()), Box::new(oracles::wp_f2xf2)),
        other => return Err(ZooError::UnknownName(other.to_owned())),
    };
    let notes = describe(name)?.to_owned();
    Ok(ZooEntry { name: name.to_owned(), machine, oracle, notes })
}

/// Builds the marked-palindrome entry over an `l`-letter alphabet
/// (2 <= l <= 9).
pub fn build_mpal(l: usize) -> Result<ZooEntry, ZooError> {
    let machine = machines::mpal(l)?;
    Ok(ZooEntry {
        name: format!("mpal_{l}"),
        machine: ZooMachine::Hva(machine),
        oracle: Box::new(move |s| oracles::mpal(l, s)),
        notes: describe("mpal_l")?.to_owned(),
    })
}

/// The membership oracle for any catalog or oracle-only language.
/// `mpal_l` defaults to the two-letter alphabet, as in [`build`].
pub fn oracle(name: &str) -> Result<Oracle, ZooError> {
    if let Some(rest) = name.strip_prefix("mpal_") {
        let l = if rest == "l" { Some(2) } else { rest.parse::<usize>().ok() };
        if let Some(l) = l {
            if !(2..=9).contains(&l) {
                return Err(ZooError::BadAlphabetSize(l));
            }
            return Ok(Box::new(move |s| oracles::mpal(l, s)));
        }
    }
    Ok(match name {
        "thm51" | "thm51_scalar" => Box::new(oracles::thm51),
        "upow" => Box::new(oracles::upow),
        "subsetsum_r" => Box::new(oracles::subsetsum_r),
        "pow" => Box::new(oracles::pow),
        "pow_r" => Box::new(oracles::pow_r),
        "anbn" => Box::new(oracles::anbn),
        "anb2n" => Box::new(oracles::anb2n),
        "abc_counters" => Box::new(oracles::abc_counters),
        "wp_f2" => Box::new(oracles::wp_f2),
        "wp_f2xf2" => Box::new(oracles::wp_f2xf2),
        "union" => Box::new(oracles::union),
        "l_bab" => Box::new(oracles::l_bab),
        "ijk" => Box::new(oracles::ijk),
        "union_c" => Box::new(oracles::union_c),
        other => return Err(ZooError::UnknownName(other.to_owned())),
    })
}

/// Every machine-carrying entry, built with default parameters.
pub fn all_entries() -> Vec<ZooEntry> {
    names().iter().map(|name| build(name).expect("catalog names build")).collect()
}
