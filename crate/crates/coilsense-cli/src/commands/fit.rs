use std::path::PathBuf;

use coilsense::models::{pls_fit, save_pls_model_file};

use crate::commands::{build_dataset, load_pipeline_inputs};
use crate::manifest::{ensure_out_dir, RunManifest};

pub fn run(coils: PathBuf, tensile: PathBuf, k: usize, out: PathBuf) -> anyhow::Result<()> {
    let loaded = load_pipeline_inputs(&coils, &tensile, None)?;
    let dataset = build_dataset(&loaded)?;
    let model = pls_fit(&dataset.x, &dataset.y, k)?;

    ensure_out_dir(&out)?;
    save_pls_model_file(out.join("model.json"), &model)?;
    RunManifest::new("fit")
        .input(&coils)?
        .input(&tensile)?
        .output("model.json")
        .write(&out)?;

    eprintln!(
        "fitted PLS with k={} on {} rows from {} coils",
        k,
        dataset.n(),
        dataset.distinct_coils().len()
    );
    Ok(())
}
