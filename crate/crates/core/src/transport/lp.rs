//! Dense two-phase simplex method over exact rationals.
//!
//! Only used as a brute-force optimality oracle for the transportation LP, so
//! it favours obviously-correct pivoting over speed.

use num_traits::{Signed, Zero};

use crate::cost::cost_counting;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::simplex::DistTuple;

/// Default variable budget `(n+1)^d` for [`lp_oracle_emd`].
pub const DEFAULT_LP_BUDGET: u128 = 4096;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, solution: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    obj_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &p;
            }
        }
        self.rhs[row] = &self.rhs[row] / &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();

        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &factor * pv;
                }
            }
            self.rhs[r] = &self.rhs[r] - &factor * &pivot_rhs;
        }
        let factor = self.obj[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &factor * pv;
                }
            }
            self.obj_rhs = &self.obj_rhs - &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Minimize the current objective row over columns `< allowed`.
    /// Returns false if unbounded.
    ///
    /// Entering columns follow Dantzig's most-negative rule until a run of
    /// degenerate pivots, after which Bland's rule takes over until the
    /// objective moves again; Bland's rule alone cannot cycle.
    fn optimize(&mut self, allowed: usize) -> bool {
        let mut stalled = 0usize;
        loop {
            let col = if stalled >= STALL_LIMIT {
                (0..allowed).find(|&j| self.obj[j].is_negative())
            } else {
                (0..allowed)
                    .filter(|&j| self.obj[j].is_negative())
                    .min_by(|&a, &b| self.obj[a].cmp(&self.obj[b]).then(a.cmp(&b)))
            };
            let Some(col) = col else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, step)) => {
                    if step.is_zero() {
                        stalled += 1;
                    } else {
                        stalled = 0;
                    }
                    self.pivot(row, col);
                }
                None => return false,
            }
        }
    }
}

/// Minimize `c·x` subject to `a·x = b`, `x >= 0`.
pub fn solve_standard_form(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<LpOutcome> {
    let m = a.len();
    let nv = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != nv) {
        return Err(Error::InvalidArgument("inconsistent LP dimensions".into()));
    }

    // rows with b >= 0, then artificial identity appended
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut full: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        full.extend((0..m).map(|k| Rational::from_int((k == i) as i64)));
        rows.push(full);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }

    let width = nv + m;
    let mut obj = vec![Rational::zero(); width];
    for row in &rows {
        for (o, v) in obj.iter_mut().zip(&row[..nv]) {
            *o = &*o - v;
        }
    }
    let obj_rhs = rhs.iter().fold(Rational::zero(), |s, v| s - v);
    let mut t = Tableau {
        rows,
        rhs,
        basis: (nv..width).collect(),
        obj,
        obj_rhs,
    };

    t.optimize(nv);
    if !t.obj_rhs.is_zero() {
        return Ok(LpOutcome::Infeasible);
    }

    // drive remaining (zero-valued) artificials out, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= nv {
            if let Some(col) = (0..nv).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, col);
            } else {
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    let mut obj: Vec<Rational> = c.iter().cloned().chain((0..m).map(|_| Rational::zero())).collect();
    let mut obj_rhs = Rational::zero();
    for (row, (&bv, rv)) in t.rows.iter().zip(t.basis.iter().zip(&t.rhs)) {
        let cb = &c[bv];
        if cb.is_zero() {
            continue;
        }
        for (o, v) in obj.iter_mut().zip(row) {
            *o = &*o - cb * v;
        }
        obj_rhs = obj_rhs - cb * rv;
    }
    t.obj = obj;
    t.obj_rhs = obj_rhs;

    if !t.optimize(nv) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut solution = vec![Rational::zero(); nv];
    for (&bv, v) in t.basis.iter().zip(&t.rhs) {
        if bv < nv {
            solution[bv] = v.clone();
        }
    }
    Ok(LpOutcome::Optimal {
        value: -t.obj_rhs,
        solution,
    })
}

/// Solve the full transportation LP over all `(n+1)^d` cells.
pub fn lp_oracle_emd(xs: &DistTuple<Rational>, budget: u128) -> Result<Rational> {
    let (n, d) = (xs.n(), xs.d());
    let side = n + 1;
    let required = (side as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let cells = required as usize;

    let mut keys = Vec::with_capacity(cells);
    let mut y = vec![1usize; d];
    for _ in 0..cells {
        keys.push(y.clone());
        for v in y.iter_mut().rev() {
            if *v < side {
                *v += 1;
                break;
            }
            *v = 1;
        }
    }
    let costs: Vec<Rational> = keys
        .iter()
        .map(|k| Rational::from_int(cost_counting(k, n).expect("in range") as i64))
        .collect();

    // member 1 pins every site; later members skip their last site, whose
    // constraint is implied by total mass
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, member) in xs.members().iter().enumerate() {
        let sites = if i == 0 { side } else { n };
        for site in 1..=sites {
            a.push(
                keys.iter()
                    .map(|k| Rational::from_int((k[i] == site) as i64))
                    .collect(),
            );
            b.push(member.mass()[site - 1].clone());
        }
    }

    match solve_standard_form(&a, &b, &costs)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Invariant(format!("transportation LP returned {other:?}"))),
    }
}
