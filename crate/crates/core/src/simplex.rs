//! Points of the standard simplex, their cumulative transforms and order
//! statistics.
//!
//! Index conventions: masses and partial sums are stored 0-based, but every
//! method that takes a site or column index (`column`, `CumulativeVector::at`)
//! uses the 1-based numbering of the ground space `{1, ..., n+1}`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A probability distribution on the sites `1..=n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    mass: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Same as [`validate_distribution`].
    pub fn new(raw: Vec<S>) -> Result<Self> {
        validate_distribution(raw)
    }

    /// Number of sites minus one.
    pub fn n(&self) -> usize {
        self.mass.len() - 1
    }

    /// Masses `x_1..x_{n+1}` (stored 0-based).
    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    pub fn cumulative(&self) -> CumulativeVector<S> {
        cumulative(self)
    }

    /// Point mass at `site` (1-based) on `n+1` sites.
    pub fn point_mass(n: usize, site: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::LengthTooShort(1));
        }
        if site == 0 || site > n + 1 {
            return Err(Error::IndexOutOfRange { index: site, lo: 1, hi: n + 1 });
        }
        let mut mass = vec![S::zero(); n + 1];
        mass[site - 1] = S::one();
        Ok(Distribution { mass })
    }

    /// Inverse of [`cumulative`]: recover masses by differencing.
    pub fn from_cumulative(cv: &CumulativeVector<S>) -> Result<Self> {
        let mut prev = S::zero();
        let mut mass = Vec::with_capacity(cv.n() + 1);
        for x in cv.partial() {
            mass.push(x.clone() - prev);
            prev = x.clone();
        }
        mass.push(S::one() - prev);
        validate_distribution(mass)
    }
}

/// Validate raw masses as a point of the simplex.
///
/// Float inputs whose sum is within [`crate::scalar::FLOAT_SUM_TOLERANCE`]
/// of 1 are renormalized; exact inputs must sum to exactly 1.
pub fn validate_distribution<S: Scalar>(raw: Vec<S>) -> Result<Distribution<S>> {
    if raw.len() < 2 {
        return Err(Error::LengthTooShort(raw.len()));
    }
    for (index, m) in raw.iter().enumerate() {
        if !m.is_finite_value() {
            return Err(Error::NonFinite { index });
        }
        if m.lt_zero() {
            return Err(Error::NegativeMass {
                index,
                value: m.to_string(),
            });
        }
    }
    let sum = raw.iter().cloned().fold(S::zero(), |acc, m| acc + m);
    if !S::sum_is_one(&sum) {
        return Err(Error::SumNotOne { sum: sum.to_string() });
    }
    let mass = if S::EXACT || sum.is_one() {
        raw
    } else {
        raw.into_iter().map(|m| m / sum.clone()).collect()
    };
    Ok(Distribution { mass })
}

/// Partial sums `X_1..X_n`; the final total (always 1) is suppressed.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeVector<S> {
    partial: Vec<S>,
}

impl<S: Scalar> CumulativeVector<S> {
    pub fn n(&self) -> usize {
        self.partial.len()
    }

    pub fn partial(&self) -> &[S] {
        &self.partial
    }

    /// `X_j` for `0 <= j <= n`, with `X_0 = 0`.
    pub fn at(&self, j: usize) -> S {
        if j == 0 {
            S::zero()
        } else {
            self.partial[j - 1].clone()
        }
    }
}

pub fn cumulative<S: Scalar>(x: &Distribution<S>) -> CumulativeVector<S> {
    let mut acc = S::zero();
    let partial = x.mass[..x.n()]
        .iter()
        .map(|m| {
            acc = acc.clone() + m.clone();
            acc.clone()
        })
        .collect();
    CumulativeVector { partial }
}

/// An ordered tuple of `d >= 2` distributions on a common simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DistTuple<S> {
    members: Vec<Distribution<S>>,
    cumulatives: Vec<CumulativeVector<S>>,
}

impl<S: Scalar> DistTuple<S> {
    pub fn new(members: Vec<Distribution<S>>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::TupleTooSmall(members.len()));
        }
        let n = members[0].n();
        if let Some(bad) = members.iter().find(|m| m.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.n() });
        }
        let cumulatives = members.iter().map(cumulative).collect();
        Ok(DistTuple { members, cumulatives })
    }

    /// Validate each row with [`validate_distribution`] and build a tuple.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let members = rows
            .into_iter()
            .map(validate_distribution)
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn d(&self) -> usize {
        self.members.len()
    }

    pub fn n(&self) -> usize {
        self.members[0].n()
    }

    pub fn members(&self) -> &[Distribution<S>] {
        &self.members
    }

    pub fn cumulatives(&self) -> &[CumulativeVector<S>] {
        &self.cumulatives
    }

    /// `(X^1_j, ..., X^d_j)` for 1-based `j` in `1..=n`.
    pub fn column(&self, j: usize) -> Result<Vec<S>> {
        column(self, j)
    }

    /// All columns `j = 1..=n`, in order.
    pub fn columns(&self) -> impl Iterator<Item = Vec<S>> + '_ {
        (1..=self.n()).map(move |j| self.cumulatives.iter().map(|c| c.at(j)).collect())
    }
}

pub fn column<S: Scalar>(xs: &DistTuple<S>, j: usize) -> Result<Vec<S>> {
    if j == 0 || j > xs.n() {
        return Err(Error::IndexOutOfRange { index: j, lo: 1, hi: xs.n() });
    }
    Ok(xs.cumulatives.iter().map(|c| c.at(j)).collect())
}

/// Sorted values and the gaps between successive order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatistics<S> {
    pub sorted: Vec<S>,
    pub deltas: Vec<S>,
}

pub fn order_stats<S: Scalar>(values: &[S]) -> Result<OrderStatistics<S>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(S::cmp_total);
    let deltas = sorted
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .collect();
    Ok(OrderStatistics { sorted, deltas })
}
