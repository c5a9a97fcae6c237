//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use emdkit::cayley_menger::{
    cm_decompose, g_derivative_at_one, g_polynomial, middle_order_stats_equal,
};
use emdkit::cost::{monge_check, monge_check_array, CostArray, DEFAULT_MONGE_BUDGET};
use emdkit::expectation::{
    default_quadrature_nodes, expected_emd_exact, expected_emd_quadrature, expected_emd_recursive,
    DEFAULT_RECURSION_BUDGET,
};
use emdkit::sampling::{mc_expected_emd, mc_expected_emd_with_workers};
use emdkit::scalar::{decimal_string, parse_rational, ratio};
use emdkit::simplex::{DistTuple, Distribution};
use emdkit::transport::{
    column_costs, emd, emd_pairwise, greedy_plan, lp_oracle_emd, sweep_plan, DEFAULT_LP_BUDGET,
};
use emdkit::Rational;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_secs as f64, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn reference_tuple() -> DistTuple<Rational> {
    let rows = [
        [".2", ".2", ".2", ".4"],
        [".3", ".0", ".4", ".3"],
        [".6", ".0", ".3", ".1"],
        [".0", ".2", ".1", ".7"],
        [".7", ".1", ".2", ".0"],
        [".1", ".4", ".0", ".5"],
    ];
    DistTuple::from_rows(rows.iter().map(|row| row.iter().map(|s| r(s)).collect()).collect()).unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Distribution<Rational> {
    let mut weights: Vec<i64> = (0..=n)
        .map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=12) })
        .collect();
    if weights.iter().all(|&w| w == 0) {
        let site = rng.random_range(0..=n);
        weights[site] = 1;
    }
    let total: i64 = weights.iter().sum();
    Distribution::new(weights.into_iter().map(|w| ratio(w, total)).collect()).unwrap()
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DistTuple<Rational> {
    DistTuple::new((0..d).map(|_| random_distribution(rng, n)).collect()).unwrap()
}

fn golden_reference() -> Outcome {
    let start = Instant::now();
    let xs = reference_tuple();
    let value = emd(&xs);
    check(value == ratio(7, 2), || format!("emd {value}"))?;
    let cols = column_costs(&xs);
    check(cols == vec![ratio(13, 10), ratio(1, 1), ratio(6, 5)], || format!("columns {cols:?}"))?;
    let g = g_polynomial(&xs);
    let coeffs: Vec<Rational> = (1..=3).map(|w| g.coeff(w)).collect();
    check(coeffs == vec![ratio(4, 5), ratio(9, 10), ratio(3, 10)], || format!("G {g}"))?;
    check(g_derivative_at_one(&g, 1).unwrap() == ratio(7, 2), || "G'(1)".into())?;
    check(g_derivative_at_one(&g, 2).unwrap() == ratio(18, 5), || "G''(1)".into())?;
    let report = cm_decompose(&xs).map_err(|e| e.to_string())?;
    check(report.pairwise_sum == ratio(139, 10), || format!("pairwise {}", report.pairwise_sum))?;
    let lhs = (report.obstruction.clone() + report.pairwise_sum.clone()) / ratio(5, 1);
    check(lhs == ratio(7, 2) && report.emd == ratio(7, 2), || "17.5/5 identity".into())?;
    let elapsed = start.elapsed();
    within(elapsed, 1)?;
    Ok(format!("EMD 7/2, G = {g}, identity 35/2 / 5 = 7/2 ({elapsed:.2?})"))
}

fn expected_exact_reference() -> Outcome {
    let start = Instant::now();
    let res = expected_emd_exact(8, 10).map_err(|e| e.to_string())?;
    let exact = res.value.exact().unwrap().clone();
    let rendered = decimal_string(&exact, 10);
    let value: f64 = rendered.parse().unwrap();
    check((value - 7.9002814).abs() <= 5e-7, || format!("value {rendered}"))?;
    let norm = decimal_string(res.normalized.exact().unwrap(), 10);
    let norm_value: f64 = norm.parse().unwrap();
    check((norm_value - 0.1975).abs() <= 5e-5, || format!("normalized {norm}"))?;
    check(exact.clone() / ratio(40, 1) == *res.normalized.exact().unwrap(), || "normalizer".into())?;
    let elapsed = start.elapsed();
    within(elapsed, 30)?;
    Ok(format!("(8,10) = {rendered}, normalized {norm} ({elapsed:.2?})"))
}

fn expected_quadrature_reference() -> Outcome {
    let start = Instant::now();
    let res = expected_emd_quadrature(6, 100, default_quadrature_nodes(6, 100)).map_err(|e| e.to_string())?;
    let value = res.value.to_f64();
    check((value - 72.6685).abs() <= 5e-3, || format!("value {value}"))?;
    let elapsed = start.elapsed();
    within(elapsed, 60)?;
    Ok(format!("(6,100) = {value:.6} ({elapsed:.2?})"))
}

fn oracle_grid() -> Outcome {
    let start = Instant::now();
    let mut grid: Vec<(usize, usize)> = (1..=3).flat_map(|n| (2..=4).map(move |d| (n, d))).collect();
    grid.extend([(4, 2), (2, 5)]);
    for &(n, d) in &grid {
        let integral = expected_emd_exact(n, d).map_err(|e| e.to_string())?;
        let integral = integral.value.exact().unwrap().clone();
        let rec = expected_emd_recursive(&vec![n; d], DEFAULT_RECURSION_BUDGET).map_err(|e| e.to_string())?;
        check(integral == rec, || format!("({n},{d}): integral {integral}, recursion {rec}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 60)?;
    Ok(format!("{} grid points agree exactly ({elapsed:.2?})", grid.len()))
}

fn small_closed_forms() -> Outcome {
    let a = expected_emd_exact(1, 2).map_err(|e| e.to_string())?;
    let b = expected_emd_exact(1, 3).map_err(|e| e.to_string())?;
    let (a, b) = (a.value.exact().unwrap().clone(), b.value.exact().unwrap().clone());
    check(a == ratio(1, 3), || format!("(1,2) = {a}"))?;
    check(b == ratio(1, 2), || format!("(1,3) = {b}"))?;
    // three members: the EMD is half the pairwise sum, and each pair has mean 1/3
    check(b == ratio(3, 2) * ratio(1, 3), || "half-sum cross-check".into())?;
    Ok("(1,2) = 1/3, (1,3) = 1/2".into())
}

fn triple_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a09e667);
    for case in 0..500 {
        let n = rng.random_range(1..=4);
        let d = rng.random_range(2..=5);
        let xs = random_tuple(&mut rng, n, d);
        let plan = greedy_plan(&xs);
        let greedy = plan.objective();
        let sweep = sweep_plan(&xs).objective();
        let formula = emd(&xs);
        check(greedy == formula && sweep == formula, || {
            format!("case {case}: greedy {greedy}, sweep {sweep}, formula {formula}")
        })?;
        plan.check_marginals(&xs).map_err(|e| format!("case {case}: {e}"))?;
        check(plan.len() <= d * n + 1, || format!("case {case}: {} cells", plan.len()))?;
    }
    Ok("500 tuples: greedy = sweep = column formula, exact marginals, <= dn+1 cells".into())
}

fn lp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbb67ae85);
    let shapes: Vec<(usize, usize)> = (1..=15)
        .flat_map(|n| (2..=8).map(move |d| (n, d)))
        .filter(|&(n, d)| ((n + 1) as u128).pow(d as u32) <= 256)
        .collect();
    for case in 0..100 {
        let &(n, d) = shapes.choose(&mut rng).unwrap();
        let xs = random_tuple(&mut rng, n, d);
        let lp = lp_oracle_emd(&xs, DEFAULT_LP_BUDGET).map_err(|e| format!("case {case}: {e}"))?;
        let value = emd(&xs);
        check(lp == value, || format!("case {case} (n={n}, d={d}): LP {lp}, formula {value}"))?;
    }
    Ok(format!("100 instances over {} shapes with (n+1)^d <= 256", shapes.len()))
}

fn monge_exhaustive() -> Outcome {
    let mut checked = 0;
    for n in 1..=2 {
        for d in 2..=3 {
            let report = monge_check(n, d, DEFAULT_MONGE_BUDGET).map_err(|e| e.to_string())?;
            check(report.passed(), || format!("(n={n}, d={d}): {:?}", report.first_violation))?;
            checked += report.inequalities_checked;
        }
    }
    let mut corrupted = CostArray::dispersion(2, 3);
    corrupted.perturb(&[2, 2, 3], 1);
    let report = monge_check_array(&corrupted);
    check(!report.passed(), || "corrupted array passed".into())?;
    Ok(format!("{checked} inequalities hold; corrupted array caught"))
}

/// Members that agree with `base` in order-statistic positions `k..=d−k+1`
/// of every column: `k − 1` members shifted toward the last site, `k − 1`
/// toward the first, the rest equal to `base`.
fn constructed_vanishing(rng: &mut ChaCha8Rng, n: usize, d: usize, k: usize) -> DistTuple<Rational> {
    let base = random_distribution(rng, n);
    let mix = |t: Rational, site: usize| -> Distribution<Rational> {
        let mass = base
            .mass()
            .iter()
            .enumerate()
            .map(|(s, m)| {
                let point = if s == site { ratio(1, 1) } else { ratio(0, 1) };
                &t * m + (ratio(1, 1) - &t) * point
            })
            .collect();
        Distribution::new(mass).unwrap()
    };
    let mut members = Vec::with_capacity(d);
    for _ in 0..k - 1 {
        let t = ratio(rng.random_range(0..=5), 5);
        members.push(mix(t, n));
        let t = ratio(rng.random_range(0..=5), 5);
        members.push(mix(t, 0));
    }
    while members.len() < d {
        members.push(base.clone());
    }
    members.shuffle(rng);
    DistTuple::new(members).unwrap()
}

fn cayley_menger_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3c6ef372);
    let zero = ratio(0, 1);
    let mut negatives = 0;
    for case in 0..500 {
        let n = rng.random_range(1..=4);
        let d = rng.random_range(2..=6);
        let xs = random_tuple(&mut rng, n, d);
        let g = g_polynomial(&xs);
        let value = emd(&xs);
        check(g_derivative_at_one(&g, 1).unwrap() == value, || format!("case {case}: G'(1)"))?;
        let report = cm_decompose(&xs).map_err(|e| format!("case {case}: {e}"))?;
        let d1 = ratio(d as i64 - 1, 1);
        check(&d1 * &report.emd == &report.obstruction + &report.pairwise_sum, || {
            format!("case {case}: identity")
        })?;
        let bound = &report.pairwise_sum / &d1;
        check(report.emd >= bound, || format!("case {case}: bound"))?;
        check((report.emd == bound) == report.equality_holds, || format!("case {case}: equality"))?;
        for k in 1..=d {
            let v = g_derivative_at_one(&g, k).unwrap();
            check(v >= zero, || format!("case {case}: G^({k})(1) = {v} < 0"))?;
            if v != zero {
                negatives += 1;
                check(!middle_order_stats_equal(&xs, k), || {
                    format!("case {case}: G^({k})(1) != 0 but middle order statistics agree")
                })?;
            }
        }

        let k = rng.random_range(1..=d.div_ceil(2));
        let built = constructed_vanishing(&mut rng, n, d, k);
        check(middle_order_stats_equal(&built, k), || format!("case {case}: construction k={k}"))?;
        let v = g_derivative_at_one(&g_polynomial(&built), k).unwrap();
        check(v == zero, || format!("case {case}: constructed k={k} has G^({k})(1) = {v}"))?;
    }
    Ok(format!(
        "500 tuples: identities, bound, nonnegativity; 500 constructed vanishing cases; {negatives} nonvanishing derivatives checked"
    ))
}

fn monte_carlo() -> Outcome {
    let seed = 20_240_601;
    let exact = expected_emd_exact(3, 4).map_err(|e| e.to_string())?.value.to_f64();
    let est = mc_expected_emd(3, 4, 100_000, seed).map_err(|e| e.to_string())?;
    check((est.mean - exact).abs() <= 3.0 * est.stderr, || {
        format!("mean {} ± {} vs exact {exact}", est.mean, est.stderr)
    })?;
    let again = mc_expected_emd(3, 4, 100_000, seed).map_err(|e| e.to_string())?;
    check(again.mean.to_bits() == est.mean.to_bits() && again.stderr.to_bits() == est.stderr.to_bits(), || {
        "rerun differs".into()
    })?;
    for workers in [1, 4] {
        let split = mc_expected_emd_with_workers(3, 4, 100_000, seed, workers).map_err(|e| e.to_string())?;
        check(split.mean.to_bits() == est.mean.to_bits() && split.stderr.to_bits() == est.stderr.to_bits(), || {
            format!("{workers} workers differ")
        })?;
    }
    Ok(format!("mean {:.6} ± {:.6}, exact {exact:.6}; bit-identical on rerun and 1/4 workers", est.mean, est.stderr))
}

fn metric_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa54ff53a);
    let zero = ratio(0, 1);
    for case in 0..200 {
        let n = rng.random_range(1..=6);
        let x = random_distribution(&mut rng, n);
        let y = if rng.random_bool(0.1) { x.clone() } else { random_distribution(&mut rng, n) };
        let z = random_distribution(&mut rng, n);
        let d = |a: &Distribution<Rational>, b: &Distribution<Rational>| emd_pairwise(a, b).unwrap();
        check(d(&x, &y) == d(&y, &x), || format!("case {case}: symmetry"))?;
        check(d(&x, &x) == zero, || format!("case {case}: d(x,x)"))?;
        check((d(&x, &y) == zero) == (x == y), || format!("case {case}: indiscernibles"))?;
        check(d(&x, &z) <= d(&x, &y) + d(&y, &z), || format!("case {case}: triangle"))?;
        let pair = DistTuple::new(vec![x.clone(), y.clone()]).unwrap();
        check(emd(&pair) == d(&x, &y), || format!("case {case}: d=2 tuple"))?;
    }
    Ok("200 triples: symmetry, identity of indiscernibles, triangle inequality".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("reference tuple golden values", golden_reference),
        ("expected value, exact path", expected_exact_reference),
        ("expected value, quadrature path", expected_quadrature_reference),
        ("integral vs recursion grid", oracle_grid),
        ("small closed forms", small_closed_forms),
        ("greedy / sweep / formula agreement", triple_agreement),
        ("LP oracle", lp_oracle),
        ("Monge exhaustive check", monge_exhaustive),
        ("Cayley-Menger property suite", cayley_menger_suite),
        ("Monte Carlo consistency", monte_carlo),
        ("d=2 metric suite", metric_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
