use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emdkit::expectation::DEFAULT_RECURSION_BUDGET;
use emdkit_cli::commands::{
    cmd_cost, cmd_decompose, cmd_emd, cmd_expected, cmd_plan, EmdOptions, ExpectedMethod, ExpectedOptions, Input,
    PlanMethod,
};
use emdkit_cli::document::Format;
use emdkit_cli::error::{EXIT_INPUT, EXIT_OK};
use emdkit_cli::render::{ResultDocument, DEFAULT_DIGITS};
use emdkit_cli::selftest::{run_selftest, SelftestOptions, DEFAULT_SELFTEST_BUDGET};
use emdkit_cli::{exact_threshold, CliResult};

/// Generalized earth mover's distance on the probability simplex.
#[derive(Parser)]
#[command(name = "emdkit", version, about)]
struct Cli {
    /// Significant digits in decimal renderings.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS as u16, value_parser = clap::value_parser!(u16).range(1..=1000))]
    digits: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// EMD of a tuple and its per-column costs.
    Emd {
        /// Input file (JSON or CSV), or `-` for stdin.
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        /// Include the optimal transport plan.
        #[arg(long)]
        plan: bool,
        /// Include a barycenter recovered from the plan.
        #[arg(long)]
        barycenter: bool,
    },
    /// Expected EMD of d uniform points of the n-simplex.
    Expected {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(short = 'd', long = "d")]
        d: usize,
        #[arg(long, value_enum, default_value_t = ExpectedMethod::Exact)]
        method: ExpectedMethod,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Monte Carlo seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gauss-Legendre node count (default: exactness minimum + 8).
        #[arg(long)]
        nodes: Option<usize>,
        /// Also report the value divided by n·⌊d/2⌋.
        #[arg(long)]
        normalized: bool,
        /// Monte Carlo worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        /// State budget for the recursion.
        #[arg(long, default_value_t = DEFAULT_RECURSION_BUDGET)]
        budget: u128,
    },
    /// G polynomial, pairwise EMDs and the decomposition identity.
    Decompose {
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
    },
    /// Dispersion cost of a single sample, in every closed form.
    Cost {
        /// Sample values (decimal or p/q).
        #[arg(required = true)]
        values: Vec<String>,
        /// Number of sites minus one, for the counting form.
        #[arg(long)]
        sites: Option<usize>,
    },
    /// Optimal transport plan by the greedy rule or the sweep.
    Plan {
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        #[arg(long, value_enum, default_value_t = PlanMethod::Greedy)]
        method: PlanMethod,
    },
    /// Run the built-in consistency suites.
    Selftest {
        /// Work limit per exhaustive check; 0 skips them.
        #[arg(long, default_value_t = DEFAULT_SELFTEST_BUDGET)]
        budget: u128,
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
}

fn run(cli: Cli) -> CliResult<(String, u8)> {
    let digits = cli.digits as usize;
    let doc: ResultDocument = match cli.command {
        Command::Emd {
            input,
            format,
            plan,
            barycenter,
        } => cmd_emd(
            &Input::read(&input)?,
            &EmdOptions {
                format,
                plan,
                barycenter,
                digits,
            },
        )?,
        Command::Expected {
            n,
            d,
            method,
            samples,
            seed,
            nodes,
            normalized,
            workers,
            budget,
        } => cmd_expected(&ExpectedOptions {
            n,
            d,
            method,
            samples,
            seed,
            nodes,
            normalized,
            workers: workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |w| w.get())),
            threshold: exact_threshold()?,
            budget,
            digits,
        })?,
        Command::Decompose { input, format } => cmd_decompose(&Input::read(&input)?, format, digits)?,
        Command::Cost { values, sites } => cmd_cost(&values, sites, digits)?,
        Command::Plan { input, format, method } => cmd_plan(&Input::read(&input)?, format, method, digits)?,
        Command::Selftest {
            budget,
            inject_corruption,
        } => {
            let summary = run_selftest(&SelftestOptions {
                budget,
                inject_corruption,
            });
            for suite in &summary.suites {
                eprintln!("{:?}: {} ({})", suite.status, suite.name, suite.detail);
            }
            let code = if summary.passed { EXIT_OK } else { EXIT_INPUT };
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            return Ok((text, code));
        }
    };
    Ok((doc.to_json(), EXIT_OK))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            println!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
