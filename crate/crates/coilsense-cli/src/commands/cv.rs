use std::path::PathBuf;

use coilsense::data::{format_f64, SENSOR_DIM};
use coilsense::evaluation::{leave_one_coil_out_cv, pls_loco_cv, select_k};
use coilsense::models::ols_fit_univariate;

use crate::commands::{build_dataset, load_pipeline_inputs};
use crate::manifest::{ensure_out_dir, RunManifest};

pub fn run(
    coils: PathBuf,
    tensile: PathBuf,
    k: usize,
    k_max: usize,
    out: PathBuf,
) -> anyhow::Result<()> {
    let loaded = load_pipeline_inputs(&coils, &tensile, None)?;
    let dataset = build_dataset(&loaded)?;
    ensure_out_dir(&out)?;

    // RMSE vs number of latent variables
    let selection = select_k(&dataset, k_max)?;
    let mut wtr = csv::Writer::from_path(out.join("rmse_vs_k.csv"))?;
    wtr.write_record(["k", "rmse_t1", "rmse_t2", "rmse_combined", "std_error", "selected"])?;
    for row in &selection.rows {
        wtr.write_record(&[
            row.k.to_string(),
            format_f64(row.mean_rmse[0]),
            format_f64(row.mean_rmse[1]),
            format_f64(row.combined),
            format_f64(row.std_error),
            (row.k == selection.selected_k).to_string(),
        ])?;
    }
    wtr.flush()?;

    // per-variable OLS baseline
    let mut wtr = csv::Writer::from_path(out.join("per-variable-ols.csv"))?;
    wtr.write_record(["sv", "rmse_t1", "rmse_t2"])?;
    for j in 0..SENSOR_DIM {
        let cv = leave_one_coil_out_cv(&dataset, |x, y| {
            let ds = coilsense::data::LabeledDataset::new(
                x.clone(),
                y.clone(),
                vec![coilsense::data::CoilId::from("train"); x.nrows()],
            )?;
            ols_fit_univariate(&ds, j)
        });
        match cv {
            Ok(cv) => {
                wtr.write_record(&[
                    (j + 1).to_string(),
                    format_f64(cv.mean_rmse[0]),
                    format_f64(cv.mean_rmse[1]),
                ])?;
            }
            Err(e) => {
                eprintln!("warning: sv{}: {e}", j + 1);
            }
        }
    }
    wtr.flush()?;

    // prediction scatter at the requested k
    let cv = pls_loco_cv(&dataset, k)?;
    for skipped in &cv.skipped {
        eprintln!("warning: fold {} skipped: {}", skipped.coil_id, skipped.reason);
    }
    let mut wtr = csv::Writer::from_path(out.join("cv_scatter.csv"))?;
    wtr.write_record(["row", "property", "target", "prediction", "coil_id", "fold"])?;
    for (fold, f) in cv.folds.iter().enumerate() {
        for (local, &row) in f.row_indices.iter().enumerate() {
            for (property, name) in [(0, "t1"), (1, "t2")] {
                wtr.write_record(&[
                    row.to_string(),
                    name.to_string(),
                    format_f64(f.targets[[local, property]]),
                    format_f64(f.predictions[[local, property]]),
                    f.coil_id.as_str().to_string(),
                    fold.to_string(),
                ])?;
            }
        }
    }
    wtr.flush()?;

    RunManifest::new("cv")
        .input(&coils)?
        .input(&tensile)?
        .output("rmse_vs_k.csv")
        .output("per-variable-ols.csv")
        .output("cv_scatter.csv")
        .write(&out)?;

    eprintln!(
        "cross-validated {} rows over {} coils; selected k = {}",
        dataset.n(),
        cv.folds.len() + cv.skipped.len(),
        selection.selected_k
    );
    Ok(())
}
