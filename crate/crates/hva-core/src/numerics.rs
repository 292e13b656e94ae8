//! Exact arbitrary-precision rational scalars, row vectors and square
//! matrices.
//!
//! Everything in this module is exact: no floating point, no rounding.
//! Rationals are kept normalized (positive denominator, gcd 1), so `==` is
//! structural equality of values and hashing agrees with it. Matrices are
//! dense and square; the dimensions in play are tiny (at most around eight),
//! so no sparse or blocked representations are used.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("malformed rational literal {0:?} (expected \"p\" or \"p/q\" with q > 0)")]
    MalformedRational(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix rows must all have the same length as the row count")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
}

/// An exact rational number, always stored normalized: the denominator is
/// positive and shares no common factor with the numerator. Two `Rational`s
/// are equal exactly when they denote the same number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `numer/denom`, normalizing the result. Fails if `denom` is 0.
    pub fn new(numer: i64, denom: i64) -> Result<Self, NumericsError> {
        Self::from_big(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self, NumericsError> {
        if denom.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, NumericsError> {
        if rhs.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Parses the text form used by the file formats: an optional leading
    /// `-`, digits, and optionally `/` followed by digits (the denominator
    /// carries no sign and must be nonzero). Examples: `"3"`, `"-3"`,
    /// `"1/2"`, `"-7/3"`.
    pub fn parse(text: &str) -> Result<Self, NumericsError> {
        let malformed = || NumericsError::MalformedRational(text.to_owned());
        let (numer_text, denom_text) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let digits = numer_text.strip_prefix('-').unwrap_or(numer_text);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let numer = BigInt::from_str(numer_text).map_err(|_| malformed())?;
        let denom = match denom_text {
            None => BigInt::one(),
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(malformed());
                }
                let d = BigInt::from_str(d).map_err(|_| malformed())?;
                if d.is_zero() {
                    return Err(NumericsError::ZeroDenominator);
                }
                d
            }
        };
        Self::from_big(numer, denom)
    }
}

/// Integers print without a denominator (`"3"`, never `"3/1"`); everything
/// else prints as `"p/q"` with `q > 0`.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Rational::parse(&text).map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(std::ops::$trait::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(std::ops::$trait::$method(self.0, rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// A row vector of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn from_rationals(entries: Vec<Rational>) -> Self {
        QVector(entries)
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        QVector(entries.iter().map(|&n| Rational::from_integer(n)).collect())
    }

    pub fn ones(dim: usize) -> Self {
        QVector(vec![Rational::one(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    /// Row-vector-times-matrix product: entry `j` of the result is
    /// `sum_i self[i] * m[i][j]`.
    pub fn mul_mat(&self, m: &QMatrix) -> Result<QVector, NumericsError> {
        if self.dim() != m.dim() {
            return Err(NumericsError::DimensionMismatch { left: self.dim(), right: m.dim() });
        }
        let k = self.dim();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = Rational::zero();
            for i in 0..k {
                if !self.0[i].is_zero() && !m.rows[i][j].is_zero() {
                    acc = acc + &self.0[i] * &m.rows[i][j];
                }
            }
            out.push(acc);
        }
        Ok(QVector(out))
    }

    /// Concatenation `[self rhs]`, used when machines are combined
    /// block-wise.
    pub fn concat(&self, rhs: &QVector) -> QVector {
        let mut entries = self.0.clone();
        entries.extend(rhs.0.iter().cloned());
        QVector(entries)
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// A dense square matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: Vec<Vec<Rational>>,
}

impl QMatrix {
    /// Builds a matrix from rows, requiring a square shape.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, NumericsError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(NumericsError::NotSquare);
        }
        Ok(QMatrix { rows })
    }

    /// Convenience constructor for integer matrix literals in code.
    ///
    /// Panics if the rows do not form a square matrix; intended for
    /// hand-written literals, not for file input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix literal must be square");
        QMatrix {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut rows = vec![vec![Rational::zero(); dim]; dim];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
        QMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, e)| if i == j { *e == Rational::one() } else { e.is_zero() })
        })
    }

    /// True when every entry is an integer.
    pub fn is_integer(&self) -> bool {
        self.rows.iter().flatten().all(Rational::is_integer)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.rows.iter().flatten()
    }

    pub fn mul_mat(&self, rhs: &QMatrix) -> Result<QMatrix, NumericsError> {
        if self.dim() != rhs.dim() {
            return Err(NumericsError::DimensionMismatch { left: self.dim(), right: rhs.dim() });
        }
        let n = self.dim();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (out_row, self_row) in rows.iter_mut().zip(&self.rows) {
            for (j, out) in out_row.iter_mut().enumerate() {
                let mut acc = Rational::zero();
                for (l, rhs_row) in rhs.rows.iter().enumerate() {
                    if !self_row[l].is_zero() && !rhs_row[j].is_zero() {
                        acc = acc + &self_row[l] * &rhs_row[j];
                    }
                }
                *out = acc;
            }
        }
        Ok(QMatrix { rows })
    }

    /// Exact inverse by Gauss-Jordan elimination. Fails on singular input.
    pub fn inverse(&self) -> Result<QMatrix, NumericsError> {
        let n = self.dim();
        let mut work = self.rows.clone();
        let mut inv = QMatrix::identity(n).rows;
        for col in 0..n {
            let pivot =
                (col..n).find(|&r| !work[r][col].is_zero()).ok_or(NumericsError::Singular)?;
            work.swap(col, pivot);
            inv.swap(col, pivot);
            let scale = work[col][col].clone();
            for j in 0..n {
                work[col][j] = work[col][j].checked_div(&scale)?;
                inv[col][j] = inv[col][j].checked_div(&scale)?;
            }
            for row in 0..n {
                if row == col || work[row][col].is_zero() {
                    continue;
                }
                let factor = work[row][col].clone();
                for j in 0..n {
                    work[row][j] = &work[row][j] - &(&factor * &work[col][j]);
                    inv[row][j] = &inv[row][j] - &(&factor * &inv[col][j]);
                }
            }
        }
        Ok(QMatrix { rows: inv })
    }

    /// Block-diagonal composition `[[a, 0], [0, b]]` of dimension
    /// `a.dim() + b.dim()`.
    pub fn block_diag(a: &QMatrix, b: &QMatrix) -> QMatrix {
        let n = a.dim() + b.dim();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (i, row) in a.rows.iter().enumerate() {
            rows[i][..a.dim()].clone_from_slice(row);
        }
        for (i, row) in b.rows.iter().enumerate() {
            rows[a.dim() + i][a.dim()..].clone_from_slice(row);
        }
        QMatrix { rows }
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
