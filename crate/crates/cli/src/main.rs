use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use waveguide_cli::{execute, run, CliError, ScenarioConfig};
use waveguide_core::special_functions::MIN_TOL;
use waveguide_core::{bessel_j, gbessel_j, GBesselParams};

const BUNDLED: [(&str, &str); 3] = [
    (
        "fig1a_compare",
        include_str!("../scenarios/fig1a_compare.json"),
    ),
    (
        "fig2a_compare",
        include_str!("../scenarios/fig2a_compare.json"),
    ),
    (
        "fig3a_compare",
        include_str!("../scenarios/fig3a_compare.json"),
    ),
];

/// Closed-form light propagation in waveguide arrays with first- and
/// second-neighbor coupling.
#[derive(Parser)]
#[command(name = "waveguide", version, about)]
struct Cli {
    /// Run the bundled closed-form vs oracle comparisons and report pass/fail.
    #[arg(long)]
    validate: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario and write the field map.
    Simulate {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the Bessel function J_n(x).
    Bessel {
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(allow_negative_numbers = true)]
        x: f64,
    },
    /// Print the generalized Bessel function J_n(x, y; s) with s = +i or -i.
    Gbessel {
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
        #[arg(allow_hyphen_values = true, value_parser = parse_unit)]
        s: Complex64,
    },
}

fn parse_unit(text: &str) -> Result<Complex64, String> {
    match text {
        "i" | "+i" => Ok(Complex64::new(0.0, 1.0)),
        "-i" => Ok(Complex64::new(0.0, -1.0)),
        other => Err(format!("expected +i or -i, got {other:?}")),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

fn simulate(config: &PathBuf, output: &PathBuf) -> ExitCode {
    let scenario = match ScenarioConfig::from_path(config).and_then(|c| c.validate()) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    match run(&scenario, output) {
        Ok(execution) => {
            if let Some(r) = execution.report {
                println!(
                    "{}: max |closed - oracle| = {:e} at j = {}, z = {}; norm drift {:e}; {} steps",
                    scenario.name, r.max_abs_error, r.at_site, r.at_z, r.norm_drift, r.steps
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn validate() -> ExitCode {
    let mut failed = 0;
    for (name, text) in BUNDLED {
        let outcome = ScenarioConfig::from_json(text)
            .and_then(|c| c.validate())
            .and_then(|s| execute(&s).map(|e| (s, e)));
        match outcome {
            Ok((s, e)) if e.passed(s.tolerance) => {
                let r = e.report.expect("bundled scenarios run in compare mode");
                println!("[PASS] {name}: max error {:e}", r.max_abs_error);
            }
            Ok((s, e)) => {
                let r = e.report.expect("bundled scenarios run in compare mode");
                println!(
                    "[FAIL] {name}: max error {:e} exceeds {:e}",
                    r.max_abs_error, s.tolerance
                );
                failed += 1;
            }
            Err(err) => {
                println!("[FAIL] {name}: {err}");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if cli.validate {
        return validate();
    }
    match cli.command {
        Some(Command::Simulate { config, output }) => simulate(&config, &output),
        Some(Command::Bessel { n, x }) => match bessel_j(n, x) {
            Ok(v) => {
                println!("{v:?}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e.into()),
        },
        Some(Command::Gbessel { n, x, y, s }) => {
            let value = GBesselParams::new(n, x, y, s).and_then(|p| gbessel_j(&p, MIN_TOL));
            match value {
                Ok(v) => {
                    println!("value: {:?} {:+?}i", v.value.re, v.value.im);
                    println!("truncation_k: {}", v.truncation_k);
                    println!("est_error: {:e}", v.est_error);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e.into()),
            }
        }
        None => {
            eprintln!("error: no command given; try --help");
            ExitCode::from(1)
        }
    }
}
