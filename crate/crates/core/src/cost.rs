//! The L¹ dispersion cost `C(y) = min_a Σ|y_i − a|` and the Monge property of
//! its cost array.
//!
//! `C` has three equivalent closed forms, all implemented here:
//!
//! * [`cost_epsilon`]: signed sum of order statistics, `Σ ε(i)·y_(i)`;
//! * [`cost_deltas`]: Lee-weighted order-statistic gaps, `Σ wt(i)·Δy_(i)`;
//! * [`cost_counting`]: for integer sites, `Σ_j wt(#{i : y_i > j})`.
//!
//! All three depend only on the multiset of inputs, so ties need no rule.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::order_stats;

/// Lee weight `min{k, d−k}` on `0..=d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeeWeight {
    d: usize,
}

impl LeeWeight {
    pub fn new(d: usize) -> Self {
        LeeWeight { d }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Panics if `k > d`.
    pub fn at(&self, k: usize) -> usize {
        assert!(k <= self.d, "Lee weight index {k} > d = {}", self.d);
        k.min(self.d - k)
    }

    /// Largest attained weight, `⌊d/2⌋`.
    pub fn max(&self) -> usize {
        self.d / 2
    }
}

/// The sign function `ε` on `1..=d`: −1 below the middle, +1 above, 0 at the
/// middle index when `d` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignFunction {
    d: usize,
}

impl SignFunction {
    pub fn new(d: usize) -> Self {
        SignFunction { d }
    }

    /// Panics unless `1 <= i <= d`.
    pub fn at(&self, i: usize) -> i8 {
        assert!(i >= 1 && i <= self.d, "sign index {i} outside 1..={}", self.d);
        // compare i with (d+1)/2 without leaving the integers
        match (2 * i).cmp(&(self.d + 1)) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }

    pub fn values(&self) -> Vec<i8> {
        (1..=self.d).map(|i| self.at(i)).collect()
    }
}

pub fn lee_weight(k: usize, d: usize) -> Result<usize> {
    if k > d {
        return Err(Error::IndexOutOfRange { index: k, lo: 0, hi: d });
    }
    Ok(LeeWeight::new(d).at(k))
}

pub fn epsilon(i: usize, d: usize) -> Result<i8> {
    if i == 0 || i > d {
        return Err(Error::IndexOutOfRange { index: i, lo: 1, hi: d });
    }
    Ok(SignFunction::new(d).at(i))
}

/// `Σ_i ε(i)·y_(i)`. Zero for empty input.
pub fn cost_epsilon<S: Scalar>(y: &[S]) -> S {
    let Ok(stats) = order_stats(y) else {
        return S::zero();
    };
    let sign = SignFunction::new(y.len());
    stats
        .sorted
        .into_iter()
        .enumerate()
        .fold(S::zero(), |acc, (idx, v)| match sign.at(idx + 1) {
            -1 => acc - v,
            1 => acc + v,
            _ => acc,
        })
}

/// `Σ_{i=1}^{d−1} wt(i)·Δy_(i)`. Zero for empty input.
pub fn cost_deltas<S: Scalar>(y: &[S]) -> S {
    let Ok(stats) = order_stats(y) else {
        return S::zero();
    };
    let wt = LeeWeight::new(y.len());
    stats
        .deltas
        .into_iter()
        .enumerate()
        .fold(S::zero(), |acc, (idx, gap)| {
            acc + S::from_int(wt.at(idx + 1) as i64) * gap
        })
}

/// `Σ_{j=1}^n wt(#{i : y_i > j})` for sites `y_i ∈ 1..=n+1`.
pub fn cost_counting(y: &[usize], n: usize) -> Result<u64> {
    if let Some(&bad) = y.iter().find(|&&v| v == 0 || v > n + 1) {
        return Err(Error::Domain { value: bad, max: n + 1 });
    }
    let wt = LeeWeight::new(y.len());
    Ok((1..=n)
        .map(|j| wt.at(y.iter().filter(|&&v| v > j).count()) as u64)
        .sum())
}

/// `min_{a ∈ 1..=n+1} Σ|y_i − a|` by direct search over the ground space.
fn dispersion_by_search(y: &[usize], n: usize) -> i64 {
    (1..=n + 1)
        .map(|a| y.iter().map(|&v| (v as i64 - a as i64).abs()).sum::<i64>())
        .min()
        .unwrap_or(0)
}

/// Default work budget for [`monge_check`], counted in adjacent-entry
/// inequalities (or array cells, whichever is larger).
pub const DEFAULT_MONGE_BUDGET: u128 = 1_000_000;

/// A dense `(n+1)^d` integer cost array indexed by 1-based site tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostArray {
    n: usize,
    d: usize,
    values: Vec<i64>,
}

impl CostArray {
    /// Materialize the dispersion cost array. The caller is responsible for
    /// keeping `(n+1)^d` small.
    pub fn dispersion(n: usize, d: usize) -> Self {
        let side = n + 1;
        let len = side.pow(d as u32);
        let mut values = Vec::with_capacity(len);
        let mut y = vec![1usize; d];
        for _ in 0..len {
            values.push(dispersion_by_search(&y, n));
            advance(&mut y, side);
        }
        CostArray { n, d, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn offset(&self, y: &[usize]) -> usize {
        let side = self.n + 1;
        y.iter().fold(0, |acc, &v| acc * side + (v - 1))
    }

    pub fn get(&self, y: &[usize]) -> i64 {
        self.values[self.offset(y)]
    }

    /// Add `delta` to a single entry (negative controls).
    pub fn perturb(&mut self, y: &[usize], delta: i64) {
        let at = self.offset(y);
        self.values[at] += delta;
    }
}

/// Lexicographic successor over `1..=side` in every coordinate; wraps to all ones.
fn advance(y: &mut [usize], side: usize) {
    for v in y.iter_mut().rev() {
        if *v < side {
            *v += 1;
            return;
        }
        *v = 1;
    }
}

/// A failing adjacent inequality
/// `A(y) + A(y + e_a + e_b) <= A(y + e_a) + A(y + e_b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MongeViolation {
    /// 1-based coordinate pair `(a, b)`, `a < b`.
    pub axes: (usize, usize),
    /// 1-based position `y`.
    pub position: Vec<usize>,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MongeReport {
    pub n: usize,
    pub d: usize,
    pub inequalities_checked: u64,
    /// First violation in (axes, position) lexicographic order.
    pub first_violation: Option<MongeViolation>,
    pub violations: u64,
}

impl MongeReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Work estimate for a Monge check: `max((n+1)^d, C(d,2)·n²·(n+1)^{d−2})`.
pub fn monge_work(n: usize, d: usize) -> u128 {
    let side = (n + 1) as u128;
    let cells = side.checked_pow(d as u32).unwrap_or(u128::MAX);
    if d < 2 {
        return cells;
    }
    let pairs = (d * (d - 1) / 2) as u128;
    let checks = side
        .checked_pow(d as u32 - 2)
        .and_then(|p| p.checked_mul(pairs * (n as u128) * (n as u128)))
        .unwrap_or(u128::MAX);
    cells.max(checks)
}

/// Exhaustively verify the Monge property of the dispersion cost array.
pub fn monge_check(n: usize, d: usize, budget: u128) -> Result<MongeReport> {
    let required = monge_work(n, d);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(monge_check_array(&CostArray::dispersion(n, d)))
}

/// Check every adjacent 2×2 sub-square of `array`, over all coordinate pairs.
pub fn monge_check_array(array: &CostArray) -> MongeReport {
    let (n, d) = (array.n, array.d);
    let mut report = MongeReport {
        n,
        d,
        inequalities_checked: 0,
        first_violation: None,
        violations: 0,
    };
    if d < 2 || n == 0 {
        return report;
    }
    let side = n + 1;
    let total = side.pow(d as u32);
    for a in 0..d {
        for b in a + 1..d {
            let mut y = vec![1usize; d];
            for _ in 0..total {
                if y[a] <= n && y[b] <= n {
                    let base = array.get(&y);
                    y[a] += 1;
                    let step_a = array.get(&y);
                    y[b] += 1;
                    let both = array.get(&y);
                    y[a] -= 1;
                    let step_b = array.get(&y);
                    y[b] -= 1;

                    report.inequalities_checked += 1;
                    let lhs = base + both;
                    let rhs = step_a + step_b;
                    if lhs > rhs {
                        report.violations += 1;
                        if report.first_violation.is_none() {
                            report.first_violation = Some(MongeViolation {
                                axes: (a + 1, b + 1),
                                position: y.clone(),
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
                advance(&mut y, side);
            }
        }
    }
    report
}
