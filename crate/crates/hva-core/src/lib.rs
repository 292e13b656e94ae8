//! Exact-arithmetic toolkit for homing vector automata (HVA) and group
//! automata over free groups.
//!
//! A homing vector automaton is a finite automaton that carries a row vector
//! of rationals. Every transition multiplies the vector on the right by a
//! square matrix, and an input is accepted when the machine ends in an
//! accept state with the vector restored to its initial value. Machines may
//! be deterministic or nondeterministic, real-time or one-way (epsilon moves
//! allowed), and "blind" machines may not observe the vector mid-run while
//! non-blind ones branch on a one-bit equality guard.
//!
//! The crate provides:
//!
//! * [`numerics`] — arbitrary-precision rationals, row vectors and square
//!   matrices with exact arithmetic;
//! * [`automata`] — the machine model, a total validator, and the JSON file
//!   format;
//! * [`engine`] — a breadth-first configuration-space executor with exact
//!   vector deduplication, budgets, and replayable accept traces;
//! * [`sternbrocot`] — a matrix codec that encodes words as integer vectors
//!   and decodes them back;
//! * [`freegroup`] — reduced words over a rank-2 free group, a faithful
//!   matrix representation, group automata, and their translation to blind
//!   vector automata;
//! * [`constructions`] — counter machines, DFAs, counter-to-vector-automaton
//!   compilers, and language closure constructions (intersection, union,
//!   concatenation, star);
//! * [`zoo`] — a catalog of worked machines with reference oracles and an
//!   exhaustive machine-vs-oracle check harness.

pub mod automata;
pub mod constructions;
pub mod engine;
pub mod freegroup;
pub mod numerics;
pub mod sternbrocot;
pub mod zoo;

pub use automata::{Guard, HvaMachine, ModeFlags, Transition, Violation, ViolationCode};
pub use engine::{Configuration, Outcome, RunOptions, RunStats, Verdict};
pub use numerics::{NumericsError, QMatrix, QVector, Rational};
