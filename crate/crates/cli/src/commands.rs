//! One function per subcommand, each producing a [`ResultDocument`].

use std::io::Read;
use std::path::{Path, PathBuf};

use emdkit::cayley_menger::{cm_decompose, first_vanishing_derivative, g_derivative_at_one, vanishing_order};
use emdkit::cost::{cost_counting, cost_deltas, cost_epsilon};
use emdkit::expectation::{
    default_quadrature_nodes, expected_emd_exact_with_threshold, expected_emd_quadrature, expected_emd_recursive,
    ExpectationResult, ExpectedValue,
};
use emdkit::sampling::mc_expected_emd_with_workers;
use emdkit::scalar::parse_rational;
use emdkit::simplex::DistTuple;
use emdkit::transport::{barycenter, column_costs, emd, greedy_plan, sweep_plan, TransportPlan};
use emdkit::{Rational, Scalar};
use serde_json::{json, Value};

use crate::document::{Format, TupleDocument};
use crate::error::{CliError, CliResult};
use crate::render::{digest, exact_list, exact_value, float_value, ResultDocument};

/// Raw bytes of a tuple input, with the path they came from (`None` for stdin).
pub struct Input {
    pub text: String,
    pub path: Option<PathBuf>,
}

impl Input {
    /// Read `path`, or standard input for `"-"`.
    pub fn read(path: &str) -> CliResult<Self> {
        if path == "-" {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            return Ok(Input { text, path: None });
        }
        Ok(Input {
            text: std::fs::read_to_string(path)?,
            path: Some(PathBuf::from(path)),
        })
    }

    pub fn from_text(text: impl Into<String>) -> Self {
        Input {
            text: text.into(),
            path: None,
        }
    }

    fn tuple(&self, format: Format) -> CliResult<DistTuple<Rational>> {
        TupleDocument::parse(&self.text, format, self.path.as_deref().map(Path::new))?.to_tuple()
    }

    fn digest(&self) -> String {
        digest(self.text.as_bytes())
    }
}

fn plan_cells(plan: &TransportPlan<Rational>, digits: usize) -> Value {
    Value::Array(
        plan.iter()
            .map(|(y, mass)| json!({ "sites": y, "mass": exact_value(mass, digits) }))
            .collect(),
    )
}

fn shape(doc: &mut ResultDocument, xs: &DistTuple<Rational>) {
    doc.set("n", json!(xs.n()));
    doc.set("d", json!(xs.d()));
}

pub struct EmdOptions {
    pub format: Format,
    pub plan: bool,
    pub barycenter: bool,
    pub digits: usize,
}

pub fn cmd_emd(input: &Input, opts: &EmdOptions) -> CliResult<ResultDocument> {
    let xs = input.tuple(opts.format)?;
    let mut doc = ResultDocument::new("emd", input.digest());
    doc.method = json!({ "name": "column-formula" });
    shape(&mut doc, &xs);
    doc.set("emd", exact_value(&emd(&xs), opts.digits));
    doc.set("columns", exact_list(&column_costs(&xs), opts.digits));
    if opts.plan || opts.barycenter {
        let plan = greedy_plan(&xs);
        if opts.plan {
            doc.set("plan", plan_cells(&plan, opts.digits));
        }
        if opts.barycenter {
            let center = barycenter(&xs, &plan)?;
            doc.set("barycenter", exact_list(center.mass(), opts.digits));
        }
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlanMethod {
    Greedy,
    Sweep,
}

pub fn cmd_plan(input: &Input, format: Format, method: PlanMethod, digits: usize) -> CliResult<ResultDocument> {
    let xs = input.tuple(format)?;
    let mut doc = ResultDocument::new("plan", input.digest());
    shape(&mut doc, &xs);
    let plan = match method {
        PlanMethod::Greedy => {
            doc.method = json!({ "name": "greedy" });
            greedy_plan(&xs)
        }
        PlanMethod::Sweep => {
            doc.method = json!({ "name": "sweep" });
            let bp = sweep_plan(&xs);
            let intervals: Vec<Value> = bp
                .intervals()
                .map(|(start, end, label)| {
                    json!({
                        "start": exact_value(&start, digits),
                        "end": exact_value(&end, digits),
                        "sites": label,
                    })
                })
                .collect();
            doc.set("intervals", Value::Array(intervals));
            bp.to_plan()
        }
    };
    plan.check_marginals(&xs)?;
    doc.set("objective", exact_value(&plan.objective(), digits));
    doc.set("cells", json!(plan.len()));
    doc.set("plan", plan_cells(&plan, digits));
    Ok(doc)
}

pub fn cmd_decompose(input: &Input, format: Format, digits: usize) -> CliResult<ResultDocument> {
    let xs = input.tuple(format)?;
    let report = cm_decompose(&xs)?;
    let mut doc = ResultDocument::new("decompose", input.digest());
    doc.method = json!({ "name": "exact" });
    shape(&mut doc, &xs);
    let coeffs: Vec<Value> = report
        .g
        .terms()
        .map(|(w, c)| json!({ "weight": w, "coefficient": exact_value(c, digits) }))
        .collect();
    doc.set("g", Value::Array(coeffs));
    doc.set("g_first_derivative", exact_value(&g_derivative_at_one(&report.g, 1)?, digits));
    doc.set("g_second_derivative", exact_value(&report.obstruction, digits));
    doc.set("emd", exact_value(&report.emd, digits));
    let pairs: Vec<Value> = report
        .pairwise
        .iter()
        .map(|(&(k, l), v)| json!({ "pair": [k, l], "emd": exact_value(v, digits) }))
        .collect();
    doc.set("pairwise", Value::Array(pairs));
    doc.set("pairwise_sum", exact_value(&report.pairwise_sum, digits));
    let lhs = Rational::from_int(xs.d() as i64 - 1) * report.emd.clone();
    let rhs = report.obstruction.clone() + report.pairwise_sum.clone();
    doc.set(
        "identity",
        json!({
            "lhs": exact_value(&lhs, digits),
            "rhs": exact_value(&rhs, digits),
            "holds": lhs == rhs,
        }),
    );
    doc.set("equality_holds", json!(report.equality_holds));
    doc.set("vanishing_order", json!(vanishing_order(&xs)));
    doc.set("first_vanishing_derivative", json!(first_vanishing_derivative(&xs)));
    Ok(doc)
}

/// Dispersion cost of one sample in every applicable form.
pub fn cmd_cost(values: &[String], sites: Option<usize>, digits: usize) -> CliResult<ResultDocument> {
    if values.is_empty() {
        return Err(emdkit::Error::EmptyInput.into());
    }
    let ys = values
        .iter()
        .map(|v| parse_rational(v))
        .collect::<emdkit::Result<Vec<Rational>>>()?;
    let mut doc = ResultDocument::new("cost", digest(values.join(" ").as_bytes()));
    doc.method = json!({ "name": "closed-forms" });
    doc.set("d", json!(ys.len()));
    doc.set("epsilon_form", exact_value(&cost_epsilon(&ys), digits));
    doc.set("gap_form", exact_value(&cost_deltas(&ys), digits));
    let integers: Option<Vec<usize>> = ys
        .iter()
        .map(|y| if y.is_integer() { y.to_integer().try_into().ok() } else { None })
        .collect();
    if let Some(sites_vec) = integers.filter(|v| v.iter().all(|&s| s >= 1)) {
        let n = sites.unwrap_or_else(|| sites_vec.iter().copied().max().unwrap_or(1).saturating_sub(1).max(1));
        let c = cost_counting(&sites_vec, n)?;
        doc.set("counting_form", json!({ "exact": c.to_string(), "decimal": c.to_string(), "n": n }));
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExpectedMethod {
    Exact,
    Recursive,
    Quadrature,
    Mc,
}

pub struct ExpectedOptions {
    pub n: usize,
    pub d: usize,
    pub method: ExpectedMethod,
    pub samples: usize,
    pub seed: u64,
    pub nodes: Option<usize>,
    pub normalized: bool,
    pub workers: usize,
    pub threshold: usize,
    pub budget: u128,
    pub digits: usize,
}

fn expected_value(v: &ExpectedValue, digits: usize) -> Value {
    match v {
        ExpectedValue::Exact(r) => exact_value(r, digits),
        ExpectedValue::Approx(x) => float_value(*x, digits),
    }
}

pub fn cmd_expected(opts: &ExpectedOptions) -> CliResult<ResultDocument> {
    let (n, d, digits) = (opts.n, opts.d, opts.digits);
    if n == 0 || d < 2 {
        return Err(CliError::Parse(format!("need n >= 1 and d >= 2, got n={n}, d={d}")));
    }
    let canonical = format!("expected n={n} d={d} method={:?}", opts.method);
    let mut doc = ResultDocument::new("expected", digest(canonical.as_bytes()));
    doc.set("n", json!(n));
    doc.set("d", json!(d));
    let scale = (n * (d / 2)) as i64;
    let result = match opts.method {
        ExpectedMethod::Exact => {
            doc.method = json!({ "name": "exact-integral", "threshold": opts.threshold });
            expected_emd_exact_with_threshold(n, d, opts.threshold)?
        }
        ExpectedMethod::Quadrature => {
            let nodes = opts.nodes.unwrap_or_else(|| default_quadrature_nodes(n, d));
            doc.method = json!({ "name": "quadrature", "nodes": nodes });
            expected_emd_quadrature(n, d, nodes)?
        }
        ExpectedMethod::Recursive => {
            doc.method = json!({ "name": "recursion", "budget": opts.budget.to_string() });
            let value = expected_emd_recursive(&vec![n; d], opts.budget)?;
            let normalized = &value / Rational::from_int(scale);
            ExpectationResult {
                n,
                d,
                value: ExpectedValue::Exact(value),
                method: emdkit::expectation::Method::Recursion,
                normalized: ExpectedValue::Exact(normalized),
            }
        }
        ExpectedMethod::Mc => {
            let est = mc_expected_emd_with_workers(n, d, opts.samples, opts.seed, opts.workers)?;
            doc.method = json!({
                "name": "mc",
                "seed": est.seed,
                "samples": est.samples,
                "stderr": float_value(est.stderr, digits),
            });
            doc.set("expected", float_value(est.mean, digits));
            if opts.normalized {
                doc.set("normalized", float_value(est.mean / scale as f64, digits));
            }
            return Ok(doc);
        }
    };
    doc.set("expected", expected_value(&result.value, digits));
    if opts.normalized {
        doc.set("normalized", expected_value(&result.normalized, digits));
    }
    Ok(doc)
}
