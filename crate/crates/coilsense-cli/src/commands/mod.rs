pub mod cv;
pub mod fit;
pub mod generate;
pub mod gmlvq_eval;
pub mod monitor;
pub mod noise;
pub mod report;
pub mod score;

use std::path::Path;

use anyhow::Context;
use coilsense::data::{
    attach_records, build_labeled_dataset, clean_stream, parse_fault_file,
    parse_measurement_file, parse_tensile_file, AggregationPolicy, Coil, LabeledDataset,
    PlausibilityBounds,
};
use coilsense::fault::FaultRule;

use crate::usage_error;

pub fn parse_rule(s: &str) -> Result<FaultRule, String> {
    match s {
        "t1" => Ok(FaultRule::T1Only),
        "t2" => Ok(FaultRule::T2Only),
        "t1-or-t2" => Ok(FaultRule::T1OrT2),
        other => Err(format!("unknown rule {other:?}; use t1, t2 or t1-or-t2")),
    }
}

/// Parses and cleans a measurement file; parse-level record errors and
/// removed measurements are reported on stderr but do not abort.
pub fn load_clean_coils(path: &Path) -> anyhow::Result<Vec<Coil>> {
    let parsed = parse_measurement_file(path)
        .with_context(|| format!("parsing {}", path.display()))?;
    for e in &parsed.record_errors {
        eprintln!("warning: {} line {}: {}", path.display(), e.line, e.message);
    }
    let bounds = PlausibilityBounds::permissive();
    let mut coils = Vec::with_capacity(parsed.coils.len());
    for coil in &parsed.coils {
        let (cleaned, report) = clean_stream(coil, &bounds);
        if !report.removed.is_empty() {
            eprintln!(
                "warning: coil {}: removed {} implausible measurement(s)",
                coil.coil_id,
                report.removed.len()
            );
        }
        coils.push(cleaned);
    }
    Ok(coils)
}

/// Full ingestion: measurements + tensile samples (+ optional fault log),
/// cleaned and attached.
pub fn load_pipeline_inputs(
    coils_path: &Path,
    tensile_path: &Path,
    faults_path: Option<&Path>,
) -> anyhow::Result<Vec<Coil>> {
    let mut coils = load_clean_coils(coils_path)?;
    let samples = parse_tensile_file(tensile_path)
        .with_context(|| format!("parsing {}", tensile_path.display()))?;
    let faults = match faults_path {
        Some(p) => parse_fault_file(p).with_context(|| format!("parsing {}", p.display()))?,
        None => Vec::new(),
    };
    for warning in attach_records(&mut coils, samples, faults) {
        eprintln!("warning: {warning}");
    }
    Ok(coils)
}

/// Aggregates coils into the labeled dataset with the standard mixed
/// policy: start-of-coil samples use the first-200 mean, any other sample
/// its 5-measurement neighborhood.
pub fn build_dataset(coils: &[Coil]) -> anyhow::Result<LabeledDataset> {
    let (dataset, warnings) = build_labeled_dataset(coils, &AggregationPolicy::auto())?;
    for w in &warnings {
        eprintln!("warning: {w:?}");
    }
    if dataset.n() == 0 {
        return Err(usage_error(
            "no labeled rows: check that tensile samples match the coils",
        ));
    }
    Ok(dataset)
}

/// CSV cell for an optionally undefined metric.
pub fn metric_cell(v: Option<f64>) -> String {
    match v {
        Some(v) => coilsense::data::format_f64(v),
        None => "undefined".to_string(),
    }
}
