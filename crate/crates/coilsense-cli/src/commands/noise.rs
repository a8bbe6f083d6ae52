use std::ops::Range;
use std::path::PathBuf;

use coilsense::data::{format_f64, SENSOR_DIM};
use coilsense::preprocess::{moving_average, noise_ranking};

use crate::commands::load_clean_coils;
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::usage_error;

pub fn run(
    coils_path: PathBuf,
    coil_id: String,
    plateau: Range<usize>,
    window: usize,
    sv: Option<usize>,
    out: PathBuf,
) -> anyhow::Result<()> {
    let coils = load_clean_coils(&coils_path)?;
    let coil = coils
        .iter()
        .find(|c| c.coil_id.as_str() == coil_id)
        .ok_or_else(|| usage_error(format!("coil {coil_id:?} not found in input")))?;

    let ranking = noise_ranking(coil, plateau, window)?;
    for w in &ranking.warnings {
        eprintln!("warning: {w}");
    }

    ensure_out_dir(&out)?;
    let mut wtr = csv::Writer::from_path(out.join("noise.csv"))?;
    wtr.write_record(["sv", "noise_fraction", "rank"])?;
    let ranked = ranking.ranked_variables();
    for j in 0..SENSOR_DIM {
        let rank = ranked.iter().position(|&r| r == j).unwrap() + 1;
        wtr.write_record(&[
            (j + 1).to_string(),
            format_f64(ranking.fractions[j]),
            rank.to_string(),
        ])?;
    }
    wtr.flush()?;

    let mut manifest = RunManifest::new("noise")
        .input(&coils_path)?
        .output("noise.csv");

    if let Some(sv) = sv {
        if sv == 0 || sv > SENSOR_DIM {
            return Err(usage_error(format!("--sv must be in 1..={SENSOR_DIM}")));
        }
        let series = coil.variable_series(sv - 1);
        let smoothed = moving_average(&series, window)?;
        let name = format!("smoothed_sv{sv}.csv");
        let mut wtr = csv::Writer::from_path(out.join(&name))?;
        wtr.write_record(["position", "raw", "smoothed"])?;
        for (i, (r, s)) in series.iter().zip(&smoothed).enumerate() {
            wtr.write_record(&[i.to_string(), format_f64(*r), format_f64(*s)])?;
        }
        wtr.flush()?;
        manifest = manifest.output(&name);
    }

    manifest.write(&out)?;
    eprintln!(
        "noisiest variables first: {:?}",
        ranked.iter().map(|j| j + 1).take(5).collect::<Vec<_>>()
    );
    Ok(())
}
