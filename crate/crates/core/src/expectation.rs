//! Expected EMD when every member of the tuple is drawn uniformly from the
//! simplex.
//!
//! Under the uniform prior the cumulative `X_j` is `Beta(j, n − j + 1)`, whose
//! CDF `F_j` is a degree-`n` polynomial. Each column is `d` independent
//! copies of `X_j`, so the expected column cost integrates a polynomial in
//! `F_j(z)` over `[0, 1]`. That integral is done exactly ([`expected_emd_exact`])
//! or by Gauss–Legendre ([`expected_emd_quadrature`]). The integer recursion
//! in [`expected_emd_recursive`] is an independent oracle for small cases.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cost::{cost_epsilon, LeeWeight};
use crate::error::{Error, Result};
use crate::poly::{binomial_table, RationalPolynomial};
use crate::quadrature::{nodes_for_degree, GaussLegendre};
use crate::scalar::{Rational, Scalar};

/// Largest `d·n` handled by the exact path unless overridden.
pub const DEFAULT_EXACT_THRESHOLD: usize = 600;

/// Nodes added on top of the exactness minimum by default.
pub const EXTRA_QUADRATURE_NODES: usize = 8;

/// Default limit on the `C(Σdims + d, d)` state estimate for the recursion.
pub const DEFAULT_RECURSION_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactIntegral,
    Recursion,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactIntegral => "exact-integral",
            Method::Recursion => "recursion",
            Method::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedValue {
    Exact(Rational),
    Approx(f64),
}

impl ExpectedValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExpectedValue::Exact(r) => Scalar::to_f64(r),
            ExpectedValue::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ExpectedValue::Exact(r) => Some(r),
            ExpectedValue::Approx(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationResult {
    pub n: usize,
    pub d: usize,
    pub value: ExpectedValue,
    pub method: Method,
    /// `value / (n·⌊d/2⌋)`, the largest possible EMD on `P_n^d`.
    pub normalized: ExpectedValue,
}

impl ExpectationResult {
    fn new(n: usize, d: usize, value: ExpectedValue, method: Method) -> Self {
        let scale = (n * (d / 2)) as i64;
        let normalized = match &value {
            ExpectedValue::Exact(r) => ExpectedValue::Exact(r / Rational::from_int(scale)),
            ExpectedValue::Approx(v) => ExpectedValue::Approx(v / scale as f64),
        };
        ExpectationResult {
            n,
            d,
            value,
            method,
            normalized,
        }
    }
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::LengthTooShort(n + 1));
    }
    if d < 2 {
        return Err(Error::TupleTooSmall(d));
    }
    Ok(())
}

// Integer-coefficient helpers; every polynomial on the exact path has
// integer coefficients, so the hot loops skip rational normalization.

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn int_compose(outer: &[BigInt], inner: &[BigInt]) -> Vec<BigInt> {
    outer.iter().rev().fold(Vec::new(), |acc, c| {
        let mut next = int_mul(&acc, inner);
        if next.is_empty() {
            next.push(BigInt::zero());
        }
        next[0] += c;
        next
    })
}

fn add_into(acc: &mut Vec<BigInt>, p: &[BigInt]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(p) {
        *a += b;
    }
}

fn cdf_coeffs(n: usize, j: usize, binom: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for m in j..=n {
        let term = &binom[n][m] * &binom[m - 1][j - 1];
        coeffs[m] = if (m - j) % 2 == 0 { term } else { -term };
    }
    coeffs
}

/// `Σ_k w(k)·C(d,k)·u^k·(1−u)^{d−k}` expanded in powers of `u`.
fn bernstein_combination(d: usize, weight: impl Fn(usize) -> i64, binom: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); d + 1];
    for k in 0..=d {
        let w = weight(k);
        if w == 0 {
            continue;
        }
        let lead = &binom[d][k] * BigInt::from(w);
        for l in 0..=d - k {
            let term = &lead * &binom[d - k][l];
            if l % 2 == 0 {
                coeffs[k + l] += term;
            } else {
                coeffs[k + l] -= term;
            }
        }
    }
    coeffs
}

/// CDF of the partial sum `X_j` of a uniform point of `P_n`:
/// `F_j(z) = Σ_{m=j}^n (−1)^{m−j} C(n,m) C(m−1,j−1) z^m`.
pub fn cdf_fj(n: usize, j: usize) -> Result<RationalPolynomial> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, lo: 1, hi: n });
    }
    let binom = binomial_table(n);
    Ok(RationalPolynomial::from_bigints(cdf_coeffs(n, j, &binom)))
}

/// CDF of the `i`-th smallest of `d` independent copies of `X_j`:
/// `Σ_{k=i}^d C(d,k) F_j^k (1−F_j)^{d−k}`.
pub fn order_stat_cdf(n: usize, d: usize, i: usize, j: usize) -> Result<RationalPolynomial> {
    if i == 0 || i > d {
        return Err(Error::IndexOutOfRange { index: i, lo: 1, hi: d });
    }
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, lo: 1, hi: n });
    }
    let binom = binomial_table(n.max(d));
    let kernel = bernstein_combination(d, |k| (k >= i) as i64, &binom);
    let f = cdf_coeffs(n, j, &binom);
    Ok(RationalPolynomial::from_bigints(int_compose(&kernel, &f)))
}

/// `φ_d(u) = Σ_{k=1}^{d−1} wt(k)·C(d,k)·u^k·(1−u)^{d−k}`: the expected cost
/// of `d` independent Bernoulli(`u`) indicators.
pub fn dispersion_kernel(d: usize) -> RationalPolynomial {
    let binom = binomial_table(d);
    let wt = LeeWeight::new(d);
    RationalPolynomial::from_bigints(bernstein_combination(d, |k| wt.at(k) as i64, &binom))
}

/// `Σ_j φ_d(F_j(z))`, whose integral over `[0, 1]` is the expected EMD.
pub fn integrand(n: usize, d: usize) -> Result<RationalPolynomial> {
    check_shape(n, d)?;
    let binom = binomial_table(n.max(d));
    let wt = LeeWeight::new(d);
    let kernel = bernstein_combination(d, |k| wt.at(k) as i64, &binom);
    let mut total = Vec::new();
    for j in 1..=n {
        add_into(&mut total, &int_compose(&kernel, &cdf_coeffs(n, j, &binom)));
    }
    Ok(RationalPolynomial::from_bigints(total))
}

pub fn expected_emd_exact(n: usize, d: usize) -> Result<ExpectationResult> {
    expected_emd_exact_with_threshold(n, d, DEFAULT_EXACT_THRESHOLD)
}

/// Exact integral of [`integrand`]; refuses `d·n > threshold`.
pub fn expected_emd_exact_with_threshold(n: usize, d: usize, threshold: usize) -> Result<ExpectationResult> {
    check_shape(n, d)?;
    let size = d.saturating_mul(n);
    if size > threshold {
        return Err(Error::ThresholdExceeded { size, threshold });
    }
    let value = integrand(n, d)?.integrate_unit();
    Ok(ExpectationResult::new(n, d, ExpectedValue::Exact(value), Method::ExactIntegral))
}

/// Minimum node count that integrates the degree-`d·n` integrand exactly.
pub fn min_quadrature_nodes(n: usize, d: usize) -> usize {
    nodes_for_degree(d * n)
}

pub fn default_quadrature_nodes(n: usize, d: usize) -> usize {
    min_quadrature_nodes(n, d) + EXTRA_QUADRATURE_NODES
}

/// `ln k!` for `k = 0..=m`.
fn ln_factorials(m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 1..=m {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Float integrand at `z`. `F_j(z)` is the upper tail `P(Bin(n, z) >= j)`
/// and `1 − F_j(z)` the complementary lower tail, each summed from positive
/// terms so neither suffers cancellation.
struct FloatIntegrand {
    n: usize,
    d: usize,
    lnf: Vec<f64>,
    weights: Vec<f64>,
}

impl FloatIntegrand {
    fn new(n: usize, d: usize) -> Self {
        let wt = LeeWeight::new(d);
        FloatIntegrand {
            n,
            d,
            lnf: ln_factorials(n.max(d)),
            weights: (0..=d).map(|k| wt.at(k) as f64).collect(),
        }
    }

    fn ln_binom(&self, a: usize, b: usize) -> f64 {
        self.lnf[a] - self.lnf[b] - self.lnf[a - b]
    }

    fn eval(&self, z: f64) -> f64 {
        let (n, d) = (self.n, self.d);
        let (lz, l1z) = (z.ln(), (-z).ln_1p());
        let pmf: Vec<f64> = (0..=n)
            .map(|m| (self.ln_binom(n, m) + m as f64 * lz + (n - m) as f64 * l1z).exp())
            .collect();
        let mut total = 0.0;
        for j in 1..=n {
            let upper: f64 = pmf[j..].iter().sum();
            let lower: f64 = pmf[..j].iter().sum();
            let (lu, ll) = (upper.ln(), lower.ln());
            total += (1..d)
                .map(|k| {
                    self.weights[k] * (self.ln_binom(d, k) + k as f64 * lu + (d - k) as f64 * ll).exp()
                })
                .sum::<f64>();
        }
        total
    }
}

/// Gauss–Legendre evaluation of the same integral.
pub fn expected_emd_quadrature(n: usize, d: usize, nodes: usize) -> Result<ExpectationResult> {
    check_shape(n, d)?;
    let required = min_quadrature_nodes(n, d);
    if nodes < required {
        return Err(Error::InsufficientNodes {
            nodes,
            degree: d * n,
            required,
        });
    }
    let f = FloatIntegrand::new(n, d);
    let value = GaussLegendre::new(nodes).integrate(|z| f.eval(z));
    Ok(ExpectationResult::new(n, d, ExpectedValue::Approx(value), Method::Quadrature))
}

/// `C(Σdims + d, d)`, saturating.
fn recursion_states(dims: &[usize]) -> u128 {
    let d = dims.len() as u128;
    let top = dims.iter().map(|&v| v as u128).sum::<u128>() + d;
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `E(n_1..n_d) = [Σ_i n_i·E(.., n_i − 1, ..) + C(n_1..n_d)] / (1 + Σ_i n_i)`
/// with `E(0, .., 0) = 0`, memoized on the sorted tuple.
pub fn expected_emd_recursive(dims: &[usize], budget: u128) -> Result<Rational> {
    if dims.len() < 2 {
        return Err(Error::TupleTooSmall(dims.len()));
    }
    let required = recursion_states(dims);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut key = dims.to_vec();
    key.sort_unstable();
    let mut memo = HashMap::new();
    Ok(recurse(key, &mut memo))
}

fn recurse(key: Vec<usize>, memo: &mut HashMap<Vec<usize>, Rational>) -> Rational {
    if key.iter().all(|&v| v == 0) {
        return Rational::zero();
    }
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut acc = cost_epsilon(&key.iter().map(|&v| Rational::from_int(v as i64)).collect::<Vec<_>>());
    let mut i = 0;
    while i < key.len() {
        // equal entries give the same child, so handle each run once
        let run = key[i..].iter().take_while(|&&v| v == key[i]).count();
        if key[i] > 0 {
            let mut child = key.clone();
            child[i] -= 1;
            let weight = Rational::from_int((key[i] * run) as i64);
            acc += weight * recurse(child, memo);
        }
        i += run;
    }
    let total: usize = key.iter().sum();
    let value = acc / Rational::from_int(1 + total as i64);
    memo.insert(key, value.clone());
    value
}

/// `E[X_j^{(i)}] = 1 − ∫ CDF`, exactly.
pub fn order_stat_mean(n: usize, d: usize, i: usize, j: usize) -> Result<Rational> {
    let cdf = order_stat_cdf(n, d, i, j)?;
    Ok(Rational::from_int(1) - cdf.integrate_unit())
}
