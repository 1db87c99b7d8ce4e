use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symplectic_lab::cocycle::{verify_mixing, EigenFrame, Word};
use symplectic_lab::dynamics::Dynamics;
use symplectic_lab::entropy::{entropy_from_counts, separated_table, torus_grid_seeds};
use symplectic_lab::harness::{
    self, counts_csv, orbits_csv, parse_matrix, render_report, ComparisonReport, ExperimentConfig,
};
use symplectic_lab::models::{
    cat_matrix, cat_power_matrix, estimate_s, orbit_cocycle, MapModel,
};
use symplectic_lab::snake::{
    bracket_bounds, build_horseshoe, build_tangency_model, certify_against_estimator,
};
use symplectic_lab::sympl::{direct_sum_2x2, finite_time_exponents, SymplecticMatrix};
use symplectic_lab::{Error, Result};

/// Laboratory for symplectic map dynamics: periodic-orbit exponents,
/// separated-set entropy, and certified snake horseshoes.
#[derive(Parser)]
#[command(name = "symplab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Model family: cat | cat-product | standard-map | coupled | torus
    #[arg(long, default_value = "cat")]
    model: String,
    /// Standard-map kick strength.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Coupling strength of the coupled standard maps.
    #[arg(long)]
    c: Option<f64>,
    /// Number of cat blocks for cat-product.
    #[arg(long)]
    blocks: Option<usize>,
    /// Integer symplectic matrix, row-major, rows separated by ';'.
    #[arg(long)]
    matrix: Option<String>,
}

impl ModelArgs {
    fn build(&self) -> Result<MapModel> {
        match self.model.as_str() {
            "cat" => MapModel::torus_automorphism(cat_matrix()),
            "cat-product" => {
                MapModel::torus_automorphism(cat_power_matrix(self.blocks.unwrap_or(2)))
            }
            "standard-map" => Ok(MapModel::standard_map(self.k.unwrap_or(1.2))),
            "coupled" => Ok(MapModel::coupled_standard_maps(
                self.k1.unwrap_or(1.2),
                self.k2.unwrap_or(0.8),
                self.c.unwrap_or(0.2),
            )),
            "torus" => {
                let text = self
                    .matrix
                    .as_deref()
                    .ok_or_else(|| Error::Config("torus model requires --matrix".into()))?;
                MapModel::torus_automorphism(parse_matrix(text)?)
            }
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the model families and their conventions.
    Models,
    /// Newton scan for periodic orbits up to a maximal period.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        max_period: usize,
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        newton_tol: f64,
        /// Write the orbit table to this CSV path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-time Lyapunov exponents along one orbit.
    Lyapunov {
        #[command(flatten)]
        model: ModelArgs,
        /// Starting point, space-separated coordinates.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Separated-set entropy estimate on a torus model.
    Entropy {
        #[command(flatten)]
        model: ModelArgs,
        /// Space-separated list of separation scales.
        #[arg(long, default_value = "0.01 0.005")]
        eps_list: String,
        #[arg(long, default_value_t = 14)]
        n_max: usize,
        /// Seeds per dimension.
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Hash seed for the deterministic seed shuffle.
        #[arg(long, default_value_t = 42)]
        seed_order: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponent mixing demo: gap between n·χ⁺_min of the mixing word and
    /// the exponent sum of a diagonal base, per power m.
    MixDemo {
        /// Unstable diagonal entries of the base (stable are reciprocals).
        #[arg(long, default_value = "3 2")]
        entries: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Word-length budget for the search ladder.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Write the verification plus the serialized base word as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a tangency model, apply the snake, certify the horseshoe.
    SnakeDemo {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Unstable multipliers, space-separated, all > 1.
        #[arg(long, default_value = "2")]
        multipliers: String,
        #[arg(long, default_value_t = 1)]
        connector_time: usize,
        #[arg(long, default_value_t = 0.1)]
        disc_radius: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Snake frequencies (odd), space-separated.
        #[arg(long, default_value = "3")]
        frequencies: String,
        /// Seeds per dimension for the estimator cross-check.
        #[arg(long, default_value_t = 316)]
        estimator_grid: usize,
        /// Write the first certificate to this JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full comparison experiment from a config file.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render a previously written report JSON as text.
    Report {
        #[arg(long)]
        path: PathBuf,
    },
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad {what} entry `{t}`")))
        })
        .collect()
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad {what} entry `{t}`")))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(stage_failed) => {
            if stage_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Models => {
            println!("cat            Arnold cat automorphism [[2, 1], [1, 1]] on T^2");
            println!("cat-product    direct sum of --blocks cat blocks on T^(2n)");
            println!("standard-map   y' = y + (k/2pi) sin(2pi x), x' = x + y', mod 1");
            println!("coupled        two standard maps with a symmetric (c/2pi) sin(2pi(x1-x2)) momentum kick");
            println!("torus          integer symplectic matrix via --matrix \"2 1; 1 1\"");
            println!();
            println!("coordinates are ordered (x_1..x_n, y_1..y_n); torus coordinates live in [0, 1)");
        }
        Command::Scan {
            model,
            max_period,
            grid,
            newton_tol,
            out,
        } => {
            let m = model.build()?;
            let est = estimate_s(&m, max_period, grid, newton_tol)?;
            let csv = orbits_csv(&est.orbits);
            match out {
                Some(path) => harness::write_atomic(&path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            match est.best {
                Some(best) => println!(
                    "# S_lower = {:.6} (period {} witness)",
                    best.value, best.witness.period
                ),
                None => println!("# no hyperbolic orbit found"),
            }
        }
        Command::Lyapunov {
            model,
            point,
            steps,
        } => {
            let m = model.build()?;
            let start = parse_f64_list(&point, "--point")?;
            if start.len() != m.dim() {
                return Err(Error::Config(format!(
                    "--point needs {} coordinates",
                    m.dim()
                )));
            }
            let (_, word) = orbit_cocycle(&m, &start, steps)?;
            let exps = finite_time_exponents(word.letters())?;
            let worst = word
                .letters()
                .iter()
                .map(SymplecticMatrix::residual)
                .fold(0.0f64, f64::max);
            println!(
                "finite-time exponents over {steps} steps: [{}]",
                exps.iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!("sum = {:.3e}", exps.iter().sum::<f64>());
            println!("worst Jacobian symplecticity residual = {worst:.3e}");
        }
        Command::Entropy {
            model,
            eps_list,
            n_max,
            grid,
            seed_order,
            out,
        } => {
            if n_max < 3 {
                return Err(Error::Config(
                    "--n-max must be at least 3 for a growth fit".into(),
                ));
            }
            let m = model.build()?;
            let eps = parse_f64_list(&eps_list, "--eps-list")?;
            let seeds = torus_grid_seeds(&m, grid, Some(seed_order))?;
            let n_values: Vec<usize> = (0..=n_max).collect();
            let table = separated_table(&m, &seeds, &n_values, &eps)?;
            let est = entropy_from_counts(&table)?;
            let csv = counts_csv(&est);
            match out {
                Some(path) => harness::write_atomic(&path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            for f in &est.fits {
                println!(
                    "# eps = {}: rate {:.5} over window [{}, {}]{}",
                    f.epsilon,
                    f.rate,
                    f.window.0,
                    f.window.1,
                    if f.saturated {
                        " (saturated tail cut)"
                    } else {
                        ""
                    }
                );
            }
            println!("# h_est = {:.5}", est.value);
        }
        Command::MixDemo {
            entries,
            epsilon,
            budget,
            out,
        } => {
            let unstable = parse_f64_list(&entries, "--entries")?;
            if unstable.iter().any(|v| *v <= 1.0) {
                return Err(Error::Config(
                    "--entries must all exceed 1 (unstable multipliers)".into(),
                ));
            }
            let blocks: Vec<[f64; 4]> = unstable
                .iter()
                .map(|&s| [s, 0.0, 0.0, 1.0 / s])
                .collect();
            let base = Word::singleton(SymplecticMatrix::new(direct_sum_2x2(&blocks), 1e-12)?);
            let frame = EigenFrame::from_word(&base, 1e-8)?
                .ok_or_else(|| Error::Domain("diagonal base must be diagonalizable".into()))?;
            let verification = verify_mixing(&frame, epsilon, budget)?;
            println!("target S(base) = {:.6}", verification.target);
            println!(
                "{:>6} {:>8} {:>12} {:>14}",
                "m", "period", "gap", "pred_error"
            );
            for t in &verification.trials {
                println!(
                    "{:>6} {:>8} {:>12.6} {:>14.3e}",
                    t.m, t.period, t.gap, t.prediction_error
                );
            }
            println!(
                "reached gap {:.6} at m = {} (epsilon {epsilon})",
                verification.achieved_gap, verification.m0
            );
            if let Some(path) = out {
                let payload = serde_json::json!({
                    "verification": verification,
                    "base_word": harness::word_json(&base),
                });
                harness::write_atomic(&path, &serde_json::to_vec_pretty(&payload)?)?;
            }
        }
        Command::SnakeDemo {
            n,
            multipliers,
            connector_time,
            disc_radius,
            delta,
            frequencies,
            estimator_grid,
            out,
        } => {
            let mults = parse_f64_list(&multipliers, "--multipliers")?;
            let freqs = parse_usize_list(&frequencies, "--frequencies")?;
            let model = build_tangency_model(n, &mults, connector_time, disc_radius)?;
            let sweep = bracket_bounds(&model, &freqs, delta)?;
            println!(
                "{:>5} {:>12} {:>5} {:>12} {:>12} {:>10} {:>10}",
                "N", "A", "t", "bracket_lo", "bracket_hi", "entropy", "estimator"
            );
            let mut first = true;
            for (row, &freq) in sweep.rows.iter().zip(freqs.iter()) {
                let (cert, snake) = build_horseshoe(&model, freq, delta)?;
                let report = certify_against_estimator(&cert, &snake, estimator_grid, 0.1)?;
                println!(
                    "{:>5} {:>12.4e} {:>5} {:>12.4e} {:>12.4e} {:>10.5} {:>10.5}",
                    freq,
                    row.amplitude,
                    cert.t,
                    row.bracket_lower,
                    row.bracket_upper,
                    cert.certified_entropy,
                    report.estimator.value
                );
                if first {
                    if let Some(path) = &out {
                        harness::write_atomic(path, &serde_json::to_vec_pretty(&cert)?)?;
                    }
                    first = false;
                }
            }
            println!("bracket constant K = {:.4}", sweep.k);
        }
        Command::Compare { config, out_dir } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let dir = out_dir.unwrap_or_else(|| cfg.output_dir());
            let outcome = harness::run(&cfg, &dir)?;
            print!("{}", render_report(&outcome.report));
            if outcome.from_cache {
                println!("(reproduced from cache: {})", outcome.report_path.display());
            } else {
                println!("(artifacts under {})", dir.display());
            }
            if let Some(stage) = outcome.failed_stage {
                eprintln!("stage `{stage}` failed; report is partial");
                return Ok(true);
            }
        }
        Command::Report { path } => {
            let report: ComparisonReport =
                serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            print!("{}", render_report(&report));
        }
    }
    Ok(false)
}
