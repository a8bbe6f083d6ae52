use std::path::PathBuf;

use anyhow::Context;
use coilsense::data::{write_faults, write_measurements, write_tensile};
use coilsense::synthgen::{generate, write_ground_truth, GeneratorConfig};

use crate::manifest::{ensure_out_dir, RunManifest};
use crate::usage_error;

pub fn run(config_path: Option<PathBuf>, seed: Option<u64>, out: PathBuf) -> anyhow::Result<()> {
    let mut config = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| usage_error(format!("{e:#}")))?;
            toml::from_str::<GeneratorConfig>(&text)
                .map_err(|e| usage_error(format!("invalid config {}: {e}", path.display())))?
        }
        None => GeneratorConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config
        .validate()
        .map_err(|e| usage_error(format!("invalid config: {e}")))?;

    ensure_out_dir(&out)?;
    let data = generate(&config)?;

    let coils_file = std::fs::File::create(out.join("coils.csv"))?;
    write_measurements(coils_file, &data.coils)?;
    let tensile_file = std::fs::File::create(out.join("tensile.csv"))?;
    write_tensile(tensile_file, &data.tensile_samples())?;
    let faults_file = std::fs::File::create(out.join("faults.csv"))?;
    write_faults(faults_file, &data.fault_events())?;
    let truth_file = std::fs::File::create(out.join("truth.csv"))?;
    write_ground_truth(truth_file, &data.ground_truth)?;

    let mut manifest = RunManifest::new("generate").seed(config.seed);
    if let Some(path) = &config_path {
        manifest = manifest.config_digest(path)?;
    }
    manifest
        .output("coils.csv")
        .output("tensile.csv")
        .output("faults.csv")
        .output("truth.csv")
        .write(&out)?;

    eprintln!(
        "generated {} coils ({} faults) with usl_t1={} usl_t2={}",
        data.coils.len(),
        data.fault_events().len(),
        data.usl_t1,
        data.usl_t2
    );
    Ok(())
}
