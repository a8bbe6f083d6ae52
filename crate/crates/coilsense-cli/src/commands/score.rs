use std::path::PathBuf;

use coilsense::data::format_f64;
use coilsense::fault::{stream_score, SpecificationLimits};
use coilsense::models::load_pls_model_file;

use crate::commands::load_clean_coils;
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::usage_error;

pub fn run(
    model_path: PathBuf,
    coils_path: PathBuf,
    usl_t1: f64,
    usl_t2: f64,
    window: usize,
    out: PathBuf,
) -> anyhow::Result<()> {
    let model = load_pls_model_file(&model_path)?;
    let limits = SpecificationLimits::new(usl_t1, usl_t2)
        .map_err(|e| usage_error(format!("{e}")))?;
    let coils = load_clean_coils(&coils_path)?;
    ensure_out_dir(&out)?;

    let mut est = csv::Writer::from_path(out.join("estimates.csv"))?;
    est.write_record([
        "coil_id",
        "position",
        "t1_hat",
        "t2_hat",
        "t1_smoothed",
        "t2_smoothed",
    ])?;
    let mut alerts = csv::Writer::from_path(out.join("alerts.csv"))?;
    alerts.write_record(["coil_id", "position", "property", "smoothed", "usl"])?;

    let mut total_alerts = 0;
    for coil in &coils {
        let result = stream_score(&model, coil, &limits, window)?;
        for (i, (e, s)) in result.estimates.iter().zip(&result.smoothed).enumerate() {
            est.write_record(&[
                coil.coil_id.as_str().to_string(),
                i.to_string(),
                format_f64(e[0]),
                format_f64(e[1]),
                format_f64(s[0]),
                format_f64(s[1]),
            ])?;
        }
        for a in &result.alerts {
            alerts.write_record(&[
                a.coil_id.as_str().to_string(),
                a.position.to_string(),
                a.property.to_string(),
                format_f64(a.smoothed),
                format_f64(a.usl),
            ])?;
            total_alerts += 1;
        }
    }
    est.flush()?;
    alerts.flush()?;

    RunManifest::new("score")
        .input(&model_path)?
        .input(&coils_path)?
        .output("estimates.csv")
        .output("alerts.csv")
        .write(&out)?;

    eprintln!("scored {} coils, {} alert(s)", coils.len(), total_alerts);
    Ok(())
}
