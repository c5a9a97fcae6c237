//! Built-in consistency suites, run by `emdkit selftest`.

use emdkit::cost::{monge_check_array, monge_work, CostArray};
use emdkit::expectation::{expected_emd_exact, expected_emd_recursive, DEFAULT_RECURSION_BUDGET};
use emdkit::scalar::ratio;
use emdkit::simplex::{DistTuple, Distribution};
use emdkit::transport::{emd, greedy_plan, lp_oracle_emd, sweep_plan};
use emdkit::Rational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DEFAULT_SELFTEST_BUDGET: u128 = 1_000_000;

/// Cost-array cell perturbed by the corruption hook.
const CORRUPTED_CELL: [usize; 3] = [2, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestSummary {
    pub passed: bool,
    pub budget: String,
    pub suites: Vec<SuiteResult>,
}

pub struct SelftestOptions {
    /// Work limit per exhaustive check; checks above it are skipped.
    pub budget: u128,
    /// Corrupt one cost-array entry before the Monge suite.
    pub inject_corruption: bool,
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DistTuple<Rational> {
    let members = (0..d)
        .map(|_| {
            let mut w: Vec<i64> = (0..=n).map(|_| rng.random_range(0..=9)).collect();
            if w.iter().all(|&v| v == 0) {
                w[0] = 1;
            }
            let total: i64 = w.iter().sum();
            Distribution::new(w.into_iter().map(|v| ratio(v, total)).collect()).expect("normalized weights")
        })
        .collect();
    DistTuple::new(members).expect("d >= 2")
}

fn monge_suite(opts: &SelftestOptions) -> SuiteResult {
    let name = "monge-exhaustive";
    let mut checked = 0;
    let mut skipped = 0;
    for n in 1..=2 {
        for d in 2..=3 {
            if monge_work(n, d) > opts.budget {
                skipped += 1;
                continue;
            }
            let mut array = CostArray::dispersion(n, d);
            if opts.inject_corruption && (n, d) == (2, 3) {
                array.perturb(&CORRUPTED_CELL, 1);
            }
            let report = monge_check_array(&array);
            if let Some(v) = report.first_violation {
                return SuiteResult {
                    name,
                    status: Status::Fail,
                    detail: format!("(n={n}, d={d}) axes {:?} at {:?}: {} > {}", v.axes, v.position, v.lhs, v.rhs),
                };
            }
            checked += report.inequalities_checked;
        }
    }
    if skipped == 4 {
        return SuiteResult {
            name,
            status: Status::Skipped,
            detail: "every shape exceeds the budget".into(),
        };
    }
    SuiteResult {
        name,
        status: Status::Pass,
        detail: format!("{checked} inequalities hold, {skipped} shapes skipped"),
    }
}

fn triple_suite() -> SuiteResult {
    let name = "triple-agreement";
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let n = rng.random_range(1..=4);
        let d = rng.random_range(2..=5);
        let xs = random_tuple(&mut rng, n, d);
        let plan = greedy_plan(&xs);
        let (g, s, f) = (plan.objective(), sweep_plan(&xs).objective(), emd(&xs));
        if g != f || s != f || plan.check_marginals(&xs).is_err() {
            return SuiteResult {
                name,
                status: Status::Fail,
                detail: format!("case {case}: greedy {g}, sweep {s}, formula {f}"),
            };
        }
    }
    SuiteResult {
        name,
        status: Status::Pass,
        detail: "200 random tuples agree".into(),
    }
}

fn lp_suite(opts: &SelftestOptions) -> SuiteResult {
    let name = "lp-oracle";
    let limit = opts.budget.min(256);
    let shapes: Vec<(usize, usize)> = (1..=15)
        .flat_map(|n| (2..=8).map(move |d| (n, d)))
        .filter(|&(n, d)| ((n + 1) as u128).pow(d as u32) <= limit)
        .collect();
    if shapes.is_empty() {
        return SuiteResult {
            name,
            status: Status::Skipped,
            detail: "budget admits no LP instance".into(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..40 {
        let (n, d) = shapes[rng.random_range(0..shapes.len())];
        let xs = random_tuple(&mut rng, n, d);
        let want = emd(&xs);
        match lp_oracle_emd(&xs, limit) {
            Ok(v) if v == want => {}
            Ok(v) => {
                return SuiteResult {
                    name,
                    status: Status::Fail,
                    detail: format!("case {case} (n={n}, d={d}): LP {v}, formula {want}"),
                }
            }
            Err(e) => {
                return SuiteResult {
                    name,
                    status: Status::Fail,
                    detail: format!("case {case}: {e}"),
                }
            }
        }
    }
    SuiteResult {
        name,
        status: Status::Pass,
        detail: format!("40 instances over {} shapes", shapes.len()),
    }
}

fn recursion_suite() -> SuiteResult {
    let name = "integral-vs-recursion";
    let mut grid: Vec<(usize, usize)> = (1..=3).flat_map(|n| (2..=4).map(move |d| (n, d))).collect();
    grid.extend([(4, 2), (2, 5)]);
    for &(n, d) in &grid {
        let integral = expected_emd_exact(n, d).map(|r| r.value.exact().cloned());
        let rec = expected_emd_recursive(&vec![n; d], DEFAULT_RECURSION_BUDGET);
        match (integral, rec) {
            (Ok(Some(a)), Ok(b)) if a == b => {}
            (a, b) => {
                return SuiteResult {
                    name,
                    status: Status::Fail,
                    detail: format!("(n={n}, d={d}): {a:?} vs {b:?}"),
                }
            }
        }
    }
    SuiteResult {
        name,
        status: Status::Pass,
        detail: format!("{} grid points agree", grid.len()),
    }
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestSummary {
    let suites = vec![monge_suite(opts), triple_suite(), lp_suite(opts), recursion_suite()];
    SelftestSummary {
        passed: suites.iter().all(|s| s.status != Status::Fail),
        budget: opts.budget.to_string(),
        suites,
    }
}
