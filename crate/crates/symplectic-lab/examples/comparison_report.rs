//! The experiment driver end to end: a plain-text config is canonicalized
//! and hashed, the stages run, artifacts land on disk keyed by the hash, and
//! the same config reproduces the report from cache.

use symplectic_lab::harness::{render_report, run, ExperimentConfig};

fn main() -> symplectic_lab::Result<()> {
    let text = "\
# comparison experiment: cat map
model.family = cat
scan.max_period = 2
scan.grid = 12
entropy.eps_list = 0.04 0.02
entropy.n_max = 10
entropy.grid = 250
entropy.seed_order = 42
";
    let config = ExperimentConfig::parse(text)?;
    println!("canonical config (hash {}):\n{}", config.hash_hex(), config.canonical_text());

    let dir = std::env::temp_dir().join("symplab-example-run");
    let outcome = run(&config, &dir)?;
    println!("{}", render_report(&outcome.report));

    let mut artifacts: Vec<String> = std::fs::read_dir(&dir)?
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    artifacts.sort();
    println!("artifacts in {}:", dir.display());
    for a in &artifacts {
        println!("  {a}");
    }

    let cached = run(&config, &dir)?;
    println!(
        "\nsecond run served from cache: {} (report {})",
        cached.from_cache,
        cached.report_path.display()
    );
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
