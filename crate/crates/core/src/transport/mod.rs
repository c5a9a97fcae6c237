//! Optimal multi-marginal transport plans for the dispersion cost.
//!
//! Because the cost array is Monge, the d-dimensional northwest corner rule
//! ([`greedy_plan`]) is optimal. The same plan falls out of sweeping `t` over
//! `[0, 1)` and reading off which cumulative interval each member sits in
//! ([`sweep_plan`]), and its value collapses to a sum of column costs
//! ([`emd`]). [`lp_oracle_emd`] solves the transportation LP directly as an
//! independent check.
//!
//! Plan keys are 1-based site tuples `y ∈ {1..n+1}^d`.

mod lp;

use std::collections::BTreeMap;

pub use lp::{lp_oracle_emd, solve_standard_form, LpOutcome, DEFAULT_LP_BUDGET};

use crate::cost::{cost_counting, cost_deltas};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::{validate_distribution, DistTuple, Distribution};

/// Sparse transport plan: positive masses keyed by 1-based site tuples,
/// kept in lexicographic key order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<S> {
    n: usize,
    d: usize,
    entries: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> TransportPlan<S> {
    pub fn new(n: usize, d: usize) -> Self {
        TransportPlan {
            n,
            d,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, y: &[usize]) -> Option<&S> {
        self.entries.get(y)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.entries.iter()
    }

    /// Accumulate `mass` at `y`; non-positive masses are ignored.
    ///
    /// Panics if `y` has the wrong length or a site outside `1..=n+1`.
    pub fn add(&mut self, y: Vec<usize>, mass: S) {
        assert_eq!(y.len(), self.d, "plan key has wrong arity");
        assert!(
            y.iter().all(|&v| v >= 1 && v <= self.n + 1),
            "plan key {y:?} outside 1..={}",
            self.n + 1
        );
        if !mass.gt_zero() {
            return;
        }
        let slot = self.entries.entry(y).or_insert_with(S::zero);
        *slot = slot.clone() + mass;
    }

    /// Total cost `Σ C(y)·T(y)`.
    pub fn objective(&self) -> S {
        self.entries.iter().fold(S::zero(), |acc, (y, mass)| {
            let c = cost_counting(y, self.n).expect("plan keys are in range");
            acc + S::from_int(c as i64) * mass.clone()
        })
    }

    /// Marginal masses of member `i` (0-based), one per site.
    pub fn marginal(&self, i: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.n + 1];
        for (y, mass) in &self.entries {
            out[y[i] - 1] = out[y[i] - 1].clone() + mass.clone();
        }
        out
    }

    /// Verify every marginal constraint against `xs`. Float plans are
    /// compared at the snapping tolerance.
    pub fn check_marginals(&self, xs: &DistTuple<S>) -> Result<()> {
        if xs.d() != self.d || xs.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: xs.n(),
            });
        }
        for (member, x) in xs.members().iter().enumerate() {
            for (site, (have, want)) in self.marginal(member).iter().zip(x.mass()).enumerate() {
                let gap = have.clone() - want.clone();
                if !gap.is_negligible(1e-9) {
                    return Err(Error::MarginalMismatch {
                        member: member + 1,
                        site: site + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

/// d-dimensional northwest corner rule.
///
/// Start at `(1, ..., 1)`, place the smallest remaining mass among the
/// current sites, subtract it everywhere, and advance every member whose
/// current site is exhausted. Simultaneous exhaustion advances all such
/// members in the same step.
pub fn greedy_plan<S: Scalar>(xs: &DistTuple<S>) -> TransportPlan<S> {
    let (n, d) = (xs.n(), xs.d());
    let mut residual: Vec<Vec<S>> = xs.members().iter().map(|m| m.mass().to_vec()).collect();
    let mut plan = TransportPlan::new(n, d);
    // 0-based cursor
    let mut y = vec![0usize; d];
    while y.iter().all(|&v| v <= n) {
        let step = y
            .iter()
            .zip(&residual)
            .map(|(&site, r)| r[site].clone())
            .min_by(S::cmp_total)
            .expect("d >= 2");
        if step.gt_zero() {
            plan.add(y.iter().map(|v| v + 1).collect(), step.clone());
        }
        for (i, r) in residual.iter_mut().enumerate() {
            let left = (r[y[i]].clone() - step.clone()).snap();
            r[y[i]] = left;
        }
        for (i, r) in residual.iter().enumerate() {
            if !r[y[i]].gt_zero() {
                y[i] += 1;
            }
        }
    }
    plan
}

/// Piecewise-constant labelling of `[0, 1)` by site tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints<S> {
    n: usize,
    /// Strictly increasing, starting at 0, all `< 1`.
    pub cuts: Vec<S>,
    /// `labels[r]` is the 1-based site tuple on `[cuts[r], cuts[r+1])`.
    pub labels: Vec<Vec<usize>>,
}

impl<S: Scalar> Breakpoints<S> {
    /// `(start, end, label)` per interval; the last interval ends at 1.
    pub fn intervals(&self) -> impl Iterator<Item = (S, S, &[usize])> + '_ {
        self.cuts.iter().enumerate().map(move |(r, start)| {
            let end = self.cuts.get(r + 1).cloned().unwrap_or_else(S::one);
            (start.clone(), end, self.labels[r].as_slice())
        })
    }

    /// Interval lengths as a transport plan.
    pub fn to_plan(&self) -> TransportPlan<S> {
        let d = self.labels.first().map_or(0, Vec::len);
        let mut plan = TransportPlan::new(self.n, d);
        for (start, end, label) in self.intervals() {
            plan.add(label.to_vec(), end - start);
        }
        plan
    }

    /// `Σ C(label)·length` over the intervals.
    pub fn objective(&self) -> S {
        self.intervals().fold(S::zero(), |acc, (start, end, label)| {
            let c = cost_counting(label, self.n).expect("labels are in range");
            acc + S::from_int(c as i64) * (end - start)
        })
    }
}

/// Sweep `t` over `[0, 1)`: member `i` sits at site `#{0 <= k <= n : X^i_k <= t}`.
/// Intervals are half-open; `t = 1` carries no mass.
pub fn sweep_plan<S: Scalar>(xs: &DistTuple<S>) -> Breakpoints<S> {
    let n = xs.n();
    let one = S::one();
    let mut cuts: Vec<S> = std::iter::once(S::zero())
        .chain(xs.cumulatives().iter().flat_map(|c| c.partial().iter().cloned()))
        .filter(|v| *v < one)
        .collect();
    cuts.sort_by(S::cmp_total);
    cuts.dedup_by(|a, b| a == b);

    let labels = cuts
        .iter()
        .map(|t| {
            xs.cumulatives()
                .iter()
                .map(|c| 1 + c.partial().iter().filter(|x| *x <= t).count())
                .collect()
        })
        .collect();
    Breakpoints { n, cuts, labels }
}

/// Per-column costs `C(X•_j)` for `j = 1..=n`.
pub fn column_costs<S: Scalar>(xs: &DistTuple<S>) -> Vec<S> {
    xs.columns().map(|col| cost_deltas(&col)).collect()
}

/// Generalized EMD as the sum of column costs.
pub fn emd<S: Scalar>(xs: &DistTuple<S>) -> S {
    column_costs(xs)
        .into_iter()
        .fold(S::zero(), |acc, c| acc + c)
}

/// Classical two-distribution EMD, `Σ_j |X_j − Y_j|`.
pub fn emd_pairwise<S: Scalar>(x: &Distribution<S>, y: &Distribution<S>) -> Result<S> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    let (cx, cy) = (x.cumulative(), y.cumulative());
    Ok(cx
        .partial()
        .iter()
        .zip(cy.partial())
        .fold(S::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs()))
}

/// Equalize the members along `plan`: the whole mass `T(y)` of every cell is
/// sent to the lower median site `y_(⌊(d+1)/2⌋)`, which minimizes the cell's
/// dispersion. Returns the common distribution every member ends up as.
pub fn barycenter<S: Scalar>(xs: &DistTuple<S>, plan: &TransportPlan<S>) -> Result<Distribution<S>> {
    plan.check_marginals(xs)?;
    let (n, d) = (xs.n(), xs.d());
    let m = (d + 1) / 2;
    let mut common = vec![S::zero(); n + 1];
    for (y, mass) in plan.iter() {
        let mut sorted = y.clone();
        sorted.sort_unstable();
        let target = sorted[m - 1];
        common[target - 1] = common[target - 1].clone() + mass.clone();
    }
    validate_distribution(common)
}

/// Cost of moving every plan cell to its lower median site; equals
/// [`TransportPlan::objective`].
pub fn equalization_cost<S: Scalar>(plan: &TransportPlan<S>) -> S {
    let m = (plan.d() + 1) / 2;
    plan.iter().fold(S::zero(), |acc, (y, mass)| {
        let mut sorted = y.clone();
        sorted.sort_unstable();
        let a = sorted[m - 1] as i64;
        let moved: i64 = y.iter().map(|&v| (v as i64 - a).abs()).sum();
        acc + S::from_int(moved) * mass.clone()
    })
}
