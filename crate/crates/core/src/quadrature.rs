//! Gauss–Legendre quadrature on `[0, 1]`.
//!
//! An `m`-node rule integrates polynomials of degree `<= 2m − 1` exactly (up
//! to round-off). Nodes are roots of `P_m`, found by Newton's method on the
//! three-term recurrence.

use std::f64::consts::PI;

/// Newton stops once an update is below this.
const NEWTON_TOLERANCE: f64 = 1e-15;
const NEWTON_MAX_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    /// Ascending nodes in `(0, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_m(t), P_m'(t))` by the Bonnet recurrence.
fn legendre_with_derivative(m: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// Panics if `m == 0`.
    pub fn new(m: usize) -> Self {
        assert!(m > 0, "quadrature needs at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        // roots come in ± pairs; solve for the non-negative half
        for i in 0..m.div_ceil(2) {
            let mut t = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..NEWTON_MAX_STEPS {
                let (p, d) = legendre_with_derivative(m, t);
                dp = d;
                let step = p / d;
                t -= step;
                if step.abs() <= NEWTON_TOLERANCE {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, t);
            if d.is_finite() && d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            // map [-1, 1] to [0, 1]
            nodes[i] = (1.0 - t) / 2.0;
            nodes[m - 1 - i] = (1.0 + t) / 2.0;
            weights[i] = w / 2.0;
            weights[m - 1 - i] = w / 2.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫₀¹ f` under this rule, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Smallest node count that is exact for degree `deg`.
pub fn nodes_for_degree(deg: usize) -> usize {
    (deg + 1).div_ceil(2).max(1)
}
