//! Reproducible experiment driver: plain-text configs with a canonical
//! content hash, staged pipelines (periodic scan, entropy estimation, snake
//! certificates), deterministic CSV/JSON artifacts keyed by the hash, and
//! the comparison report tying the three quantities together.
//!
//! Determinism contract: identical configs produce byte-identical CSV and
//! JSON payloads. All randomness flows from the config's seed-order hash;
//! artifact files are written atomically (temp + rename); reports carry no
//! timestamps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::entropy::{
    entropy_from_counts_windowed, ruelle_consistency, separated_table, torus_grid_seeds,
    EntropyEstimate, RateFit, RuelleReport,
};
use crate::error::{Error, Result};
use crate::models::{cat_matrix, cat_power_matrix, estimate_s, MapModel, PeriodicOrbit, SEstimate};
use crate::rng::fnv1a64;
use crate::snake::{bracket_bounds, build_horseshoe, build_tangency_model, certify_against_estimator};

pub const SCHEMA_VERSION: u32 = 1;

/// Known configuration keys; anything else is a config error.
const KNOWN_KEYS: &[&str] = &[
    "model.family",
    "model.k",
    "model.k1",
    "model.k2",
    "model.c",
    "model.matrix",
    "model.blocks",
    "entropy.enabled",
    "entropy.eps_list",
    "entropy.n_max",
    "entropy.grid",
    "entropy.seed_order",
    "entropy.fit_lo",
    "entropy.fit_hi",
    "scan.enabled",
    "scan.max_period",
    "scan.grid",
    "scan.newton_tol",
    "snake.enabled",
    "snake.n",
    "snake.multipliers",
    "snake.tau",
    "snake.connector_time",
    "snake.disc_radius",
    "snake.delta",
    "snake.frequencies",
    "snake.estimator_grid",
    "output.dir",
];

/// Parsed, validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Parses the `key = value` format (one pair per line, `#` comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
        }
        let config = Self { entries };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("`{key}` must be a number, got `{v}`"))),
        }
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("`{key}` must be an integer, got `{v}`"))),
        }
    }

    fn get_bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Error::Config(format!(
                "`{key}` must be true or false, got `{v}`"
            ))),
        }
    }

    fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Config(format!("`{key}`: bad number `{t}`")))
                })
                .collect(),
        }
    }

    fn get_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Config(format!("`{key}`: bad integer `{t}`")))
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.model()?;
        if self.get_bool("entropy.enabled", true)? {
            let n_max = self.get_usize("entropy.n_max", 14)?;
            if n_max < 3 {
                return Err(Error::Config(format!(
                    "entropy.n_max must be at least 3 for a growth fit, got {n_max}"
                )));
            }
            let eps = self.get_f64_list("entropy.eps_list", &[0.01, 0.005])?;
            if eps.iter().any(|e| *e <= 0.0) {
                return Err(Error::Config("entropy.eps_list entries must be positive".into()));
            }
            if self.get_usize("entropy.grid", 1000)? < 2 {
                return Err(Error::Config("entropy.grid must be at least 2".into()));
            }
        }
        if self.get_bool("scan.enabled", true)? && self.get_usize("scan.max_period", 1)? == 0 {
            return Err(Error::Config("scan.max_period must be positive".into()));
        }
        if self.get_bool("snake.enabled", false)? {
            let freqs = self.get_usize_list("snake.frequencies", &[3])?;
            if freqs.iter().any(|f| f % 2 == 0 || *f == 0) {
                return Err(Error::Config(
                    "snake.frequencies must be positive odd integers".into(),
                ));
            }
        }
        Ok(())
    }

    /// Canonical text: sorted keys, numerals reformatted to their shortest
    /// round-trip form, single-space token separation.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            let tokens: Vec<String> = value.split_whitespace().map(canonical_token).collect();
            let _ = writeln!(out, "{key} = {}", tokens.join(" "));
        }
        out
    }

    /// Content hash of the canonical text.
    pub fn hash(&self) -> u64 {
        fnv1a64(self.canonical_text().as_bytes())
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash())
    }

    /// Output directory named in the config (`runs` by default).
    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.get("output.dir").unwrap_or("runs"))
    }

    /// Builds the configured map model.
    pub fn model(&self) -> Result<MapModel> {
        let family = self.get("model.family").unwrap_or("cat");
        match family {
            "cat" => MapModel::torus_automorphism(cat_matrix()),
            "cat_product" => {
                let blocks = self.get_usize("model.blocks", 2)?;
                if blocks == 0 {
                    return Err(Error::Config("model.blocks must be positive".into()));
                }
                MapModel::torus_automorphism(cat_power_matrix(blocks))
            }
            "standard_map" => Ok(MapModel::standard_map(self.get_f64("model.k", 1.2)?)),
            "coupled_standard_maps" => Ok(MapModel::coupled_standard_maps(
                self.get_f64("model.k1", 1.2)?,
                self.get_f64("model.k2", 0.8)?,
                self.get_f64("model.c", 0.2)?,
            )),
            "torus_automorphism" => {
                let text = self.get("model.matrix").ok_or_else(|| {
                    Error::Config("torus_automorphism requires model.matrix".into())
                })?;
                MapModel::torus_automorphism(parse_matrix(text)?)
            }
            other => Err(Error::Config(format!("unknown model.family `{other}`"))),
        }
    }

    pub fn model_description(&self) -> String {
        let family = self.get("model.family").unwrap_or("cat");
        match family {
            "standard_map" => format!(
                "standard_map(k={})",
                self.get("model.k").unwrap_or("1.2")
            ),
            "coupled_standard_maps" => format!(
                "coupled_standard_maps(k1={}, k2={}, c={})",
                self.get("model.k1").unwrap_or("1.2"),
                self.get("model.k2").unwrap_or("0.8"),
                self.get("model.c").unwrap_or("0.2")
            ),
            "cat_product" => format!(
                "cat_product(blocks={})",
                self.get("model.blocks").unwrap_or("2")
            ),
            "torus_automorphism" => format!(
                "torus_automorphism({})",
                self.get("model.matrix").unwrap_or("")
            ),
            other => other.to_string(),
        }
    }
}

fn canonical_token(token: &str) -> String {
    let (body, suffix) = match token.strip_suffix(';') {
        Some(b) => (b, ";"),
        None => (token, ""),
    };
    match body.parse::<f64>() {
        Ok(v) if v.is_finite() => format!("{v}{suffix}"),
        _ => token.to_string(),
    }
}

/// Parses a row-major decimal text block: entries space-separated, rows
/// separated by `;`.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Config(format!("bad matrix entry `{t}`")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config("matrix must be square and non-empty".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Row-major decimal text block for a matrix (the inverse of
/// [`parse_matrix`]): entries space-separated, rows joined with `; `.
pub fn matrix_text(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format!("{}", m[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Word serialization for JSON artifacts: letters as row-major text blocks
/// in orbit order, plus the metadata consumers need to rebuild it.
pub fn word_json(word: &crate::cocycle::Word) -> serde_json::Value {
    serde_json::json!({
        "dim_half": word.dim_half(),
        "length": word.len(),
        "letters": word
            .letters()
            .iter()
            .map(|l| matrix_text(l.matrix()))
            .collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReportFlag {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OrbitSummary {
    pub period: usize,
    pub point: Vec<f64>,
    pub classification: String,
    pub residual: f64,
    pub exponents: Vec<f64>,
    pub exponent_sum: f64,
    /// Row-major decimal text block of the period-cocycle product.
    pub cocycle_product: String,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CertificateSummary {
    pub frequency: usize,
    pub t: usize,
    pub return_time: usize,
    pub certified_entropy: f64,
    pub estimator_value: f64,
    pub chi_min_plus: f64,
    pub entropy_bound_ok: bool,
    pub undercount_flagged: bool,
    pub bracket_k: f64,
}

/// The comparison report: entropy estimate vs exponent sums vs certificates.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub model: String,
    pub h_est: Option<f64>,
    pub entropy_fits: Vec<RateFit>,
    pub s_lower: Option<f64>,
    pub witness: Option<OrbitSummary>,
    pub certificates: Vec<CertificateSummary>,
    /// `h_est - s_lower` when both stages ran.
    pub gap: Option<f64>,
    pub ruelle: Option<RuelleReport>,
    pub flags: Vec<ReportFlag>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: ComparisonReport,
    pub report_path: PathBuf,
    pub from_cache: bool,
    /// Name of the first failed stage, if any; artifacts of completed stages
    /// are still on disk and the report carries the failure flag.
    pub failed_stage: Option<String>,
}

/// Executes the configured stages, writes artifacts keyed by the config
/// hash, and returns the comparison report. A completed run is cached: the
/// same config reproduces the report from disk without recomputation.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let prefix = config.hash_hex();
    let report_path = out_dir.join(format!("{prefix}-report.json"));
    if report_path.exists() {
        let report: ComparisonReport =
            serde_json::from_str(&std::fs::read_to_string(&report_path)?)?;
        return Ok(RunOutcome {
            report,
            report_path,
            from_cache: true,
            failed_stage: None,
        });
    }

    let model = config.model()?;
    let mut report = ComparisonReport {
        schema_version: SCHEMA_VERSION,
        config_hash: prefix.clone(),
        model: config.model_description(),
        h_est: None,
        entropy_fits: Vec::new(),
        s_lower: None,
        witness: None,
        certificates: Vec::new(),
        gap: None,
        ruelle: None,
        flags: Vec::new(),
    };
    let mut failed_stage = None;

    // Stage 1: periodic scan.
    if config.get_bool("scan.enabled", true)? {
        match run_scan_stage(config, &model, out_dir, &prefix) {
            Ok(est) => {
                if let Some(best) = &est.best {
                    report.s_lower = Some(best.value);
                    report.witness = Some(orbit_summary(&best.witness)?);
                } else {
                    report.flags.push(ReportFlag {
                        code: "NO_HYPERBOLIC_ORBIT".into(),
                        message: "periodic scan found no hyperbolic orbit; S_lower is \
                                  undefined (insufficient search, not S(f) = 0)"
                            .into(),
                    });
                }
            }
            Err(e) => {
                failed_stage.get_or_insert_with(|| "scan".to_string());
                report.flags.push(ReportFlag {
                    code: "STAGE_FAILED:scan".into(),
                    message: e.to_string(),
                });
            }
        }
    }

    // Stage 2: separated-set entropy estimate.
    if config.get_bool("entropy.enabled", true)? {
        match run_entropy_stage(config, &model, out_dir, &prefix) {
            Ok(est) => {
                report.h_est = Some(est.value);
                report.entropy_fits = est.fits.clone();
            }
            Err(e) => {
                failed_stage.get_or_insert_with(|| "entropy".to_string());
                report.flags.push(ReportFlag {
                    code: "STAGE_FAILED:entropy".into(),
                    message: e.to_string(),
                });
            }
        }
    }

    // Stage 3: snake pipeline on its own local model.
    if config.get_bool("snake.enabled", false)? {
        match run_snake_stage(config, out_dir, &prefix) {
            Ok(summaries) => {
                for s in &summaries {
                    if s.undercount_flagged {
                        report.flags.push(ReportFlag {
                            code: "ESTIMATOR_UNDERCOUNT".into(),
                            message: format!(
                                "N = {}: separated-count estimate {:.4} below certified {:.4}",
                                s.frequency, s.estimator_value, s.certified_entropy
                            ),
                        });
                    }
                    if !s.entropy_bound_ok {
                        report.flags.push(ReportFlag {
                            code: "ENTROPY_BOUND_FAILED".into(),
                            message: format!(
                                "N = {}: entropy bound does not meet the exponent target",
                                s.frequency
                            ),
                        });
                    }
                }
                report.certificates = summaries;
            }
            Err(e) => {
                failed_stage.get_or_insert_with(|| "snake".to_string());
                report.flags.push(ReportFlag {
                    code: "STAGE_FAILED:snake".into(),
                    message: e.to_string(),
                });
            }
        }
    }

    if let (Some(h), Some(s)) = (report.h_est, report.s_lower) {
        report.gap = Some(h - s);
        let ruelle = ruelle_consistency(h, s, 0.1);
        if ruelle.violated {
            report.flags.push(ReportFlag {
                code: "RUELLE_VIOLATION".into(),
                message: ruelle.cause.clone().unwrap_or_default(),
            });
        }
        report.ruelle = Some(ruelle);
    }

    // Cache only fully successful runs; partial reports get their own file.
    let final_path = if failed_stage.is_none() {
        report_path
    } else {
        out_dir.join(format!("{prefix}-report-partial.json"))
    };
    write_atomic(&final_path, &serde_json::to_vec_pretty(&report)?)?;
    Ok(RunOutcome {
        report,
        report_path: final_path,
        from_cache: false,
        failed_stage,
    })
}

fn run_scan_stage(
    config: &ExperimentConfig,
    model: &MapModel,
    out_dir: &Path,
    prefix: &str,
) -> Result<SEstimate> {
    let max_period = config.get_usize("scan.max_period", 1)?;
    let grid = config.get_usize("scan.grid", 24)?;
    let tol = config.get_f64("scan.newton_tol", 1e-10)?;
    let est = estimate_s(model, max_period, grid, tol)?;
    write_atomic(
        &out_dir.join(format!("{prefix}-orbits.csv")),
        orbits_csv(&est.orbits).as_bytes(),
    )?;
    Ok(est)
}

fn run_entropy_stage(
    config: &ExperimentConfig,
    model: &MapModel,
    out_dir: &Path,
    prefix: &str,
) -> Result<EntropyEstimate> {
    let eps = config.get_f64_list("entropy.eps_list", &[0.01, 0.005])?;
    let n_max = config.get_usize("entropy.n_max", 14)?;
    let grid = config.get_usize("entropy.grid", 1000)?;
    let order = config.get_usize("entropy.seed_order", 42)? as u64;
    let seeds = torus_grid_seeds(model, grid, Some(order))?;
    let n_values: Vec<usize> = (0..=n_max).collect();
    let table = separated_table(model, &seeds, &n_values, &eps)?;
    if !table.is_monotone() {
        return Err(Error::Numeric(
            "count table violates monotonicity; estimator is broken".into(),
        ));
    }
    let window = match (config.get("entropy.fit_lo"), config.get("entropy.fit_hi")) {
        (Some(lo), Some(hi)) => Some((
            lo.parse()
                .map_err(|_| Error::Config("bad entropy.fit_lo".into()))?,
            hi.parse()
                .map_err(|_| Error::Config("bad entropy.fit_hi".into()))?,
        )),
        _ => None,
    };
    let est = entropy_from_counts_windowed(&table, window)?;
    write_atomic(
        &out_dir.join(format!("{prefix}-entropy-counts.csv")),
        counts_csv(&est).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join(format!("{prefix}-entropy.json")),
        &serde_json::to_vec_pretty(&est)?,
    )?;
    Ok(est)
}

fn run_snake_stage(
    config: &ExperimentConfig,
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<CertificateSummary>> {
    let n = config.get_usize("snake.n", 1)?;
    let multipliers = config.get_f64_list("snake.multipliers", &[2.0])?;
    let connector_time = config.get_usize("snake.connector_time", 1)?;
    let disc_radius = config.get_f64("snake.disc_radius", 0.1)?;
    let delta = config.get_f64("snake.delta", 0.05)?;
    let tau = config.get_usize("snake.tau", 1)?;
    let frequencies = config.get_usize_list("snake.frequencies", &[3])?;
    let estimator_grid = config.get_usize("snake.estimator_grid", 316)?;

    let model = build_tangency_model(n, &multipliers, connector_time, disc_radius)?
        .with_period(tau)?;
    let sweep = bracket_bounds(&model, &frequencies, delta)?;

    let mut summaries = Vec::new();
    let mut csv = String::from(
        "frequency,amplitude,t,k_bracket_lower,k_bracket_upper,certified_entropy,estimator_entropy\n",
    );
    for (row, &freq) in sweep.rows.iter().zip(frequencies.iter()) {
        let (certificate, snake) = build_horseshoe(&model, freq, delta)?;
        let cert_report = certify_against_estimator(&certificate, &snake, estimator_grid, 0.1)?;
        write_atomic(
            &out_dir.join(format!("{prefix}-certificate-N{freq}.json")),
            &serde_json::to_vec_pretty(&certificate)?,
        )?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            freq,
            row.amplitude,
            certificate.t,
            row.bracket_lower,
            row.bracket_upper,
            certificate.certified_entropy,
            cert_report.estimator.value
        );
        summaries.push(CertificateSummary {
            frequency: freq,
            t: certificate.t,
            return_time: certificate.return_time(),
            certified_entropy: certificate.certified_entropy,
            estimator_value: cert_report.estimator.value,
            chi_min_plus: cert_report.chi_min_plus,
            entropy_bound_ok: cert_report.entropy_bound_ok,
            undercount_flagged: cert_report.undercount_flagged,
            bracket_k: certificate.bracket_k,
        });
    }
    write_atomic(&out_dir.join(format!("{prefix}-snake.csv")), csv.as_bytes())?;
    Ok(summaries)
}

fn orbit_summary(orbit: &PeriodicOrbit) -> Result<OrbitSummary> {
    Ok(OrbitSummary {
        period: orbit.period,
        point: orbit.points[0].clone(),
        classification: orbit.classification.to_string(),
        residual: orbit.residual,
        exponents: orbit.lyapunov.chis().to_vec(),
        exponent_sum: orbit.exponent_sum(),
        cocycle_product: matrix_text(orbit.cocycle.product()?.matrix()),
    })
}

/// Orbits CSV: period, point coordinates, residual, classification,
/// exponents, exponent sum. Rows sorted for determinism.
pub fn orbits_csv(orbits: &[PeriodicOrbit]) -> String {
    let mut rows: Vec<(usize, String, String)> = orbits
        .iter()
        .map(|o| {
            let point = o.points[0]
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(" ");
            let exponents = o
                .lyapunov
                .chis()
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(" ");
            let rest = format!(
                "{},{},{},{}",
                o.residual,
                o.classification,
                exponents,
                o.exponent_sum()
            );
            (o.period, point, rest)
        })
        .collect();
    rows.sort();
    let mut out = String::from("period,point,residual,classification,exponents,s\n");
    for (period, point, rest) in rows {
        let _ = writeln!(out, "{period},{point},{rest}");
    }
    out
}

/// Counts CSV: one row per (ε, n) pair.
pub fn counts_csv(est: &EntropyEstimate) -> String {
    let mut out = String::from("epsilon,n,count\n");
    for (e, eps) in est.table.epsilons.iter().enumerate() {
        for (j, n) in est.table.n_values.iter().enumerate() {
            let _ = writeln!(out, "{eps},{n},{}", est.table.counts[e][j]);
        }
    }
    out
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders a report as human-readable text.
pub fn render_report(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", report.model);
    let _ = writeln!(out, "config: {}", report.config_hash);
    match report.h_est {
        Some(h) => {
            let _ = writeln!(out, "h_est = {h:.5} (separated-set growth estimate)");
            for f in &report.entropy_fits {
                let _ = writeln!(
                    out,
                    "  ε = {:<8} rate = {:.5}  window = [{}, {}]  residual = {:.2e}{}",
                    f.epsilon,
                    f.rate,
                    f.window.0,
                    f.window.1,
                    f.fit_residual,
                    if f.saturated { "  (saturated tail)" } else { "" }
                );
            }
        }
        None => {
            let _ = writeln!(out, "h_est: not computed");
        }
    }
    match report.s_lower {
        Some(s) => {
            let _ = writeln!(out, "S_lower = {s:.5} (max exponent sum over found orbits)");
            if let Some(w) = &report.witness {
                let _ = writeln!(
                    out,
                    "  witness: period {} orbit at ({}), {}",
                    w.period,
                    w.point
                        .iter()
                        .map(|v| format!("{v:.4}"))
                        .collect::<Vec<_>>()
                        .join(", "),
                    w.classification
                );
            }
        }
        None => {
            let _ = writeln!(out, "S_lower: no hyperbolic orbit found");
        }
    }
    if let Some(gap) = report.gap {
        let _ = writeln!(out, "gap h_est - S_lower = {gap:.5}");
    }
    if let Some(r) = &report.ruelle {
        let _ = writeln!(
            out,
            "entropy <= exponent-sum direction: {}",
            if r.violated { "FLAGGED" } else { "consistent" }
        );
    }
    for c in &report.certificates {
        let _ = writeln!(
            out,
            "certificate N = {:<4} t = {:<3} entropy = {:.5}  estimator = {:.5}  χ⁺_min = {:.5}  K = {:.3}{}{}",
            c.frequency,
            c.t,
            c.certified_entropy,
            c.estimator_value,
            c.chi_min_plus,
            c.bracket_k,
            if c.entropy_bound_ok { "" } else { "  [bound not met]" },
            if c.undercount_flagged { "  [undercount]" } else { "" }
        );
    }
    for f in &report.flags {
        let _ = writeln!(out, "flag [{}]: {}", f.code, f.message);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_hash_are_canonical() {
        let a = ExperimentConfig::parse(
            "model.family = cat\nentropy.n_max = 8\nentropy.eps_list = 0.0100 0.05\n",
        )
        .unwrap();
        let b = ExperimentConfig::parse(
            "entropy.eps_list = 0.01 5.0e-2\nmodel.family = cat\nentropy.n_max = 8\n",
        )
        .unwrap();
        assert_eq!(a.canonical_text(), b.canonical_text());
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(
            ExperimentConfig::parse("model.banana = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("entropy.n_max = 2\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("snake.enabled = true\nsnake.frequencies = 4\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn matrix_roundtrip() {
        let m = cat_matrix();
        let text = matrix_text(&m);
        assert_eq!(text, "2 1; 1 1");
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn cached_rerun_is_noop() {
        let dir = std::env::temp_dir().join(format!("symplab-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let config = ExperimentConfig::parse(
            "model.family = cat\nscan.grid = 8\nentropy.grid = 60\nentropy.n_max = 8\nentropy.eps_list = 0.05\n",
        )
        .unwrap();
        let first = run(&config, &dir).unwrap();
        assert!(!first.from_cache);
        let second = run(&config, &dir).unwrap();
        assert!(second.from_cache);
        assert_eq!(
            serde_json::to_string(&first.report).unwrap(),
            serde_json::to_string(&second.report).unwrap()
        );
        let _ = std::fs::remove_dir_all(&dir);
    }
}
