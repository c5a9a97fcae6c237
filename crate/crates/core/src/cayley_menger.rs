//! The weight-enumerating polynomial `G(x; q)` of a tuple, and the
//! Cayley–Menger-type identity it yields.
//!
//! `G(x; q) = Σ_{i,j} ΔX^{(i)}_j · q^{wt(i)}`, summed over order-statistic
//! gaps of every column. `G′(1)` is the EMD. `G″(1)` is the exact amount by
//! which `(d−1)·EMD` exceeds the sum of all pairwise EMDs:
//!
//! ```text
//! (d − 1)·EMD(x) = G″(x; 1) + Σ_{k<l} EMD(x^k, x^l)
//! ```
//!
//! The `k`-th derivative at `q = 1` vanishes exactly when the `k`-th through
//! `(d−k+1)`-th order statistics of every column coincide.

use std::collections::BTreeMap;

use crate::cost::LeeWeight;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::{order_stats, DistTuple};
use crate::transport::{emd, emd_pairwise};

/// Tolerance for float-backend identity and equality checks.
pub const FLOAT_CM_TOLERANCE: f64 = 1e-9;

/// Coefficients of `q^w` for `w = 1..=⌊d/2⌋`; no other powers occur.
#[derive(Debug, Clone, PartialEq)]
pub struct GPolynomial<S> {
    d: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> GPolynomial<S> {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Coefficient of `q^w`; zero outside `1..=⌊d/2⌋`.
    pub fn coeff(&self, w: usize) -> S {
        match w {
            0 => S::zero(),
            _ => self.coeffs.get(w - 1).cloned().unwrap_or_else(S::zero),
        }
    }

    /// `(w, coefficient)` for `w = 1..=⌊d/2⌋`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().enumerate().map(|(i, c)| (i + 1, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(0.0))
    }

    pub fn eval(&self, q: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| (acc + c.clone()) * q.clone())
    }
}

impl<S: Scalar> std::fmt::Display for GPolynomial<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (w, c) in self.terms() {
            if c.is_negligible(0.0) {
                continue;
            }
            if wrote {
                f.write_str(" + ")?;
            }
            wrote = true;
            match w {
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{w}")?,
            }
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

pub fn g_polynomial<S: Scalar>(xs: &DistTuple<S>) -> GPolynomial<S> {
    let d = xs.d();
    let wt = LeeWeight::new(d);
    let mut coeffs = vec![S::zero(); wt.max()];
    for col in xs.columns() {
        let stats = order_stats(&col).expect("columns have d >= 2 entries");
        for (i, gap) in stats.deltas.into_iter().enumerate() {
            // gap i (0-based) is between order statistics i+1 and i+2
            let w = wt.at(i + 1);
            coeffs[w - 1] = coeffs[w - 1].clone() + gap;
        }
    }
    GPolynomial { d, coeffs }
}

/// `w·(w−1)···(w−k+1)`, as an exact integer.
fn falling_factorial(w: usize, k: usize) -> i64 {
    if k > w {
        return 0;
    }
    ((w - k + 1)..=w).map(|v| v as i64).product()
}

/// `G^{(k)}(1) = Σ_w coeff(w)·w^{(k)}` with the falling factorial `w^{(k)}`.
pub fn g_derivative_at_one<S: Scalar>(g: &GPolynomial<S>, k: usize) -> Result<S> {
    if k == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    Ok(g.terms().fold(S::zero(), |acc, (w, c)| {
        acc + c.clone() * S::from_int(falling_factorial(w, k))
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmReport<S> {
    pub g: GPolynomial<S>,
    pub emd: S,
    pub pairwise_sum: S,
    /// `G″(x; 1)`.
    pub obstruction: S,
    /// 1-based member pairs `(k, l)`, `k < l`.
    pub pairwise: BTreeMap<(usize, usize), S>,
    /// Whether `EMD = pairwise_sum / (d − 1)`.
    pub equality_holds: bool,
    /// Set on the float backend, where checks use [`FLOAT_CM_TOLERANCE`].
    pub approximate: bool,
}

/// Whether `X^{(k)}_j = ... = X^{(d−k+1)}_j` for every column `j`.
pub fn middle_order_stats_equal<S: Scalar>(xs: &DistTuple<S>, k: usize) -> bool {
    let d = xs.d();
    if k == 0 || 2 * k > d {
        // empty or single-element range: vacuous
        return k > 0;
    }
    let tol = if S::EXACT { 0.0 } else { FLOAT_CM_TOLERANCE };
    xs.columns().all(|col| {
        let sorted = order_stats(&col).expect("non-empty column").sorted;
        let lo = &sorted[k - 1];
        let hi = &sorted[d - k];
        (hi.clone() - lo.clone()).is_negligible(tol)
    })
}

/// Compute every term of the identity and verify it. On the exact backend a
/// failed identity, or disagreement between the two equality tests, is
/// reported as an invariant violation.
pub fn cm_decompose<S: Scalar>(xs: &DistTuple<S>) -> Result<CmReport<S>> {
    let d = xs.d();
    let g = g_polynomial(xs);
    let emd_value = emd(xs);
    let obstruction = g_derivative_at_one(&g, 2)?;

    let mut pairwise = BTreeMap::new();
    let mut pairwise_sum = S::zero();
    let members = xs.members();
    for k in 0..d {
        for l in k + 1..d {
            let v = emd_pairwise(&members[k], &members[l])?;
            pairwise_sum = pairwise_sum + v.clone();
            pairwise.insert((k + 1, l + 1), v);
        }
    }

    let tol = if S::EXACT { 0.0 } else { FLOAT_CM_TOLERANCE };
    let first = g_derivative_at_one(&g, 1)?;
    if !(first - emd_value.clone()).is_negligible(tol) {
        return Err(Error::Invariant("G'(1) differs from the EMD".into()));
    }
    let lhs = S::from_int(d as i64 - 1) * emd_value.clone();
    let rhs = obstruction.clone() + pairwise_sum.clone();
    let scale = 1.0 + lhs.to_f64().abs();
    if !(lhs - rhs).is_negligible(tol * scale) {
        return Err(Error::Invariant("(d-1)·EMD differs from G''(1) + pairwise sum".into()));
    }

    let by_obstruction = obstruction.is_negligible(tol);
    if S::EXACT && by_obstruction != middle_order_stats_equal(xs, 2) {
        return Err(Error::Invariant(
            "equality tests disagree between G''(1) and order statistics".into(),
        ));
    }

    Ok(CmReport {
        g,
        emd: emd_value,
        pairwise_sum,
        obstruction,
        pairwise,
        equality_holds: by_obstruction,
        approximate: !S::EXACT,
    })
}

/// Smallest `k` whose derivative `G^{(k)}(1)` is nonzero, or `⌈d/2⌉ + 1` if
/// every derivative vanishes (all members equal). Since every derivative
/// vanishes once `G′(1) = 0`, the result is 1 whenever the EMD is positive.
pub fn vanishing_order<S: Scalar>(xs: &DistTuple<S>) -> usize {
    let g = g_polynomial(xs);
    let top = xs.d().div_ceil(2);
    (1..=top)
        .find(|&k| !g_derivative_at_one(&g, k).expect("k >= 1").is_negligible(0.0))
        .unwrap_or(top + 1)
}

/// Smallest `k >= 1` with `G^{(k)}(1) = 0`. Always at most `⌊d/2⌋ + 1`,
/// since `G` has degree at most `⌊d/2⌋`.
pub fn first_vanishing_derivative<S: Scalar>(xs: &DistTuple<S>) -> usize {
    let g = g_polynomial(xs);
    (1..)
        .find(|&k| g_derivative_at_one(&g, k).expect("k >= 1").is_negligible(0.0))
        .expect("derivatives past the degree vanish")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::test_support::{example_tuple, rats};
    use crate::transport::emd_pairwise;
    use proptest::prelude::*;

    fn tuple(rows: &[&[&str]]) -> DistTuple<Rational> {
        DistTuple::from_rows(rows.iter().map(|r| rats(r)).collect()).unwrap()
    }

    #[test]
    fn reference_polynomial() {
        let g = g_polynomial(&example_tuple());
        assert_eq!(g.d(), 6);
        assert_eq!(g.coeff(1), ratio(4, 5));
        assert_eq!(g.coeff(2), ratio(9, 10));
        assert_eq!(g.coeff(3), ratio(3, 10));
        assert_eq!(g.coeff(4), ratio(0, 1));
        assert_eq!(g_derivative_at_one(&g, 1).unwrap(), ratio(7, 2));
        assert_eq!(g_derivative_at_one(&g, 2).unwrap(), ratio(18, 5));
        assert_eq!(g_derivative_at_one(&g, 3).unwrap(), ratio(9, 5));
        assert_eq!(g_derivative_at_one(&g, 4).unwrap(), ratio(0, 1));
        assert_eq!(g.eval(&ratio(1, 1)), ratio(2, 1));
        assert!(g_derivative_at_one(&g, 0).is_err());
    }

    #[test]
    fn reference_decomposition() {
        let r = cm_decompose(&example_tuple()).unwrap();
        assert_eq!(r.emd, ratio(7, 2));
        assert_eq!(r.obstruction, ratio(18, 5));
        assert_eq!(r.pairwise_sum, ratio(139, 10));
        assert_eq!(r.pairwise.len(), 15);
        assert_eq!(r.pairwise[&(1, 2)], ratio(3, 10));
        assert_eq!(r.pairwise[&(4, 5)], ratio(2, 1));
        assert!(!r.equality_holds);
        assert!(!r.approximate);
    }

    #[test]
    fn identical_members() {
        let row: &[&str] = &[".2", ".3", ".5"];
        let xs = tuple(&[row, row, row, row]);
        let r = cm_decompose(&xs).unwrap();
        assert!(r.g.is_zero());
        assert_eq!(r.emd, ratio(0, 1));
        assert_eq!(r.obstruction, ratio(0, 1));
        assert_eq!(r.pairwise_sum, ratio(0, 1));
        assert!(r.equality_holds);
        assert_eq!(vanishing_order(&xs), 3);
        assert_eq!(first_vanishing_derivative(&xs), 1);
    }

    #[test]
    fn pairs_and_triples() {
        let xs = tuple(&[&[".3", ".7"], &[".8", ".2"]]);
        let g = g_polynomial(&xs);
        assert_eq!(g.coeff(1), emd_pairwise(&xs.members()[0], &xs.members()[1]).unwrap());
        let xs = tuple(&[&[".3", ".2", ".5"], &[".8", ".1", ".1"], &[".1", ".1", ".8"]]);
        let r = cm_decompose(&xs).unwrap();
        assert_eq!(r.obstruction, ratio(0, 1));
        assert!(r.equality_holds);
        assert_eq!(r.emd.clone() * ratio(2, 1), r.pairwise_sum);
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(vanishing_order(&example_tuple()), 1);
        assert_eq!(first_vanishing_derivative(&example_tuple()), 4);
        // middle order statistics coincide: G = .8q, G'' = 0
        let xs = tuple(&[&[".1", ".9"], &[".5", ".5"], &[".5", ".5"], &[".9", ".1"]]);
        let g = g_polynomial(&xs);
        assert_eq!(g_derivative_at_one(&g, 1).unwrap(), ratio(4, 5));
        assert_eq!(g_derivative_at_one(&g, 2).unwrap(), ratio(0, 1));
        assert_eq!(vanishing_order(&xs), 1);
        assert_eq!(first_vanishing_derivative(&xs), 2);
        assert!(middle_order_stats_equal(&xs, 2));
        assert!(!middle_order_stats_equal(&xs, 1));
    }

    #[test]
    fn float_backend_is_flagged() {
        let rows: Vec<Vec<f64>> = vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![0.5, 0.5], vec![0.1, 0.9]];
        let r = cm_decompose(&DistTuple::from_rows(rows).unwrap()).unwrap();
        assert!(r.approximate);
        assert!((3.0 * r.emd - (r.obstruction + r.pairwise_sum)).abs() < 1e-12);
    }

    fn arb_tuple() -> impl Strategy<Value = DistTuple<Rational>> {
        (1usize..=4, 2usize..=6).prop_flat_map(|(n, d)| {
            prop::collection::vec(prop::collection::vec(0i64..=6, n + 1), d).prop_map(|rows| {
                let rows = rows
                    .into_iter()
                    .map(|mut r| {
                        if r.iter().all(|&v| v == 0) {
                            r[0] = 1;
                        }
                        let total: i64 = r.iter().sum();
                        r.into_iter().map(|v| ratio(v, total)).collect()
                    })
                    .collect();
                DistTuple::from_rows(rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn first_derivative_is_emd(xs in arb_tuple()) {
            let g = g_polynomial(&xs);
            prop_assert_eq!(g_derivative_at_one(&g, 1).unwrap(), emd(&xs));
        }

        #[test]
        fn identity_and_bound(xs in arb_tuple()) {
            let r = cm_decompose(&xs).unwrap();
            let d1 = Rational::from_int(xs.d() as i64 - 1);
            prop_assert_eq!(&d1 * &r.emd, &r.obstruction + &r.pairwise_sum);
            prop_assert!(r.emd >= &r.pairwise_sum / &d1);
            prop_assert_eq!(r.emd == &r.pairwise_sum / &d1, r.equality_holds);
        }

        #[test]
        fn derivatives_nonnegative_and_characterized(xs in arb_tuple()) {
            let g = g_polynomial(&xs);
            for k in 1..=xs.d() {
                let v = g_derivative_at_one(&g, k).unwrap();
                prop_assert!(v >= ratio(0, 1));
                prop_assert_eq!(v == ratio(0, 1), middle_order_stats_equal(&xs, k));
            }
        }
    }
}
