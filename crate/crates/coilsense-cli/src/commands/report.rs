use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use coilsense::data::{format_f64, CoilId};
use coilsense::evaluation::{confusion, pls_loco_cv, precision_recall_fbeta, ConfusionCounts};
use coilsense::fault::{
    classify_fault, link_faults, risk_report, stream_score, FaultRule, SpecificationLimits,
};
use coilsense::models::{pca_fit, pca_project, pearson_correlation, pls_fit};

use crate::commands::{build_dataset, load_pipeline_inputs, metric_cell};
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::usage_error;

pub struct Args {
    pub coils: PathBuf,
    pub tensile: PathBuf,
    pub faults: Option<PathBuf>,
    pub usl_t1: f64,
    pub usl_t2: f64,
    pub k: usize,
    pub rule: Option<FaultRule>,
    pub window: usize,
    pub min_count: usize,
    pub scatter: Option<PathBuf>,
    pub out: PathBuf,
}

/// One (target, prediction) pair per dataset row and property.
struct PredictionSet {
    targets: Vec<[f64; 2]>,
    predictions: Vec<[f64; 2]>,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let limits = SpecificationLimits::new(args.usl_t1, args.usl_t2)
        .map_err(|e| usage_error(format!("{e}")))?;
    let coils = load_pipeline_inputs(&args.coils, &args.tensile, args.faults.as_deref())?;
    let dataset = build_dataset(&coils)?;
    ensure_out_dir(&args.out)?;

    // ------------------------------------------------------------------
    // metrics.csv: fault classification from cross-validated predictions
    // ------------------------------------------------------------------
    let predictions = match &args.scatter {
        Some(path) => read_scatter(path)?,
        None => {
            let cv = pls_loco_cv(&dataset, args.k)?;
            for skipped in &cv.skipped {
                eprintln!("warning: fold {} skipped: {}", skipped.coil_id, skipped.reason);
            }
            let mut targets = Vec::new();
            let mut preds = Vec::new();
            for f in &cv.folds {
                for local in 0..f.targets.nrows() {
                    targets.push([f.targets[[local, 0]], f.targets[[local, 1]]]);
                    preds.push([f.predictions[[local, 0]], f.predictions[[local, 1]]]);
                }
            }
            PredictionSet {
                targets,
                predictions: preds,
            }
        }
    };

    let rules = match args.rule {
        Some(rule) => vec![rule],
        None => vec![FaultRule::T1Only, FaultRule::T2Only, FaultRule::T1OrT2],
    };
    let mut wtr = csv::Writer::from_path(args.out.join("metrics.csv"))?;
    wtr.write_record([
        "rule", "tp", "fn", "fp", "tn", "precision", "recall", "f1", "f3",
    ])?;
    for rule in rules {
        let counts = rule_confusion(&predictions, &limits, rule)?;
        let m1 = precision_recall_fbeta(&counts, 1.0)?;
        let m3 = precision_recall_fbeta(&counts, 3.0)?;
        wtr.write_record(&[
            rule.to_string(),
            counts.true_positive.to_string(),
            counts.false_negative.to_string(),
            counts.false_positive.to_string(),
            counts.true_negative.to_string(),
            metric_cell(m1.precision),
            metric_cell(m1.recall),
            metric_cell(m1.f_beta),
            metric_cell(m3.f_beta),
        ])?;
    }
    wtr.flush()?;

    // ------------------------------------------------------------------
    // correlations.csv: principal components vs material properties
    // ------------------------------------------------------------------
    let mut wtr = csv::Writer::from_path(args.out.join("correlations.csv"))?;
    wtr.write_record(["subset", "pair", "r"])?;
    write_correlations(&mut wtr, &dataset, None)?;
    // "production" = coils contributing exactly one row (multi-sampled
    // coils like a testcoil are excluded)
    let mut row_counts: HashMap<&CoilId, usize> = HashMap::new();
    for id in &dataset.row_coil {
        *row_counts.entry(id).or_insert(0) += 1;
    }
    let single_rows: Vec<usize> = (0..dataset.n())
        .filter(|&i| row_counts[&dataset.row_coil[i]] == 1)
        .collect();
    write_correlations(&mut wtr, &dataset, Some(&single_rows))?;
    wtr.flush()?;

    // ------------------------------------------------------------------
    // risk.csv + fault linkage: full-data model applied to every stream
    // ------------------------------------------------------------------
    let model = pls_fit(&dataset.x, &dataset.y, args.k)?;
    let risk = risk_report(&model, &coils, &limits, args.window, args.min_count)?;
    let mut wtr = csv::Writer::from_path(args.out.join("risk.csv"))?;
    wtr.write_record([
        "coil_id",
        "n_estimates",
        "fraction_out_of_spec_t1",
        "fraction_out_of_spec_t2",
        "reported_fault_count",
        "alert_state",
    ])?;
    for c in &risk.coils {
        wtr.write_record(&[
            c.coil_id.as_str().to_string(),
            c.n_estimates.to_string(),
            format_f64(c.fraction_out_of_spec_t1),
            format_f64(c.fraction_out_of_spec_t2),
            c.reported_fault_count.to_string(),
            c.alert_state.to_string(),
        ])?;
    }
    wtr.flush()?;
    for excluded in &risk.excluded {
        eprintln!(
            "note: coil {excluded} excluded from risk.csv (fewer than {} estimates)",
            args.min_count
        );
    }

    let mut estimates: HashMap<CoilId, Vec<[f64; 2]>> = HashMap::new();
    for coil in &coils {
        let scored = stream_score(&model, coil, &limits, args.window)?;
        estimates.insert(coil.coil_id.clone(), scored.estimates);
    }
    let linkage = link_faults(&coils, &estimates, &limits);
    let mut wtr = csv::Writer::from_path(args.out.join("faults_linked.csv"))?;
    wtr.write_record(["coil_id", "ref_kind", "ref_value", "n_linked", "category"])?;
    for f in &linkage.faults {
        let (kind, value) = match f.reference {
            coilsense::data::FaultRef::Measurement(p) => ("measurement", p as u64),
            coilsense::data::FaultRef::Hour(h) => ("hour", h),
        };
        wtr.write_record(&[
            f.coil_id.as_str().to_string(),
            kind.to_string(),
            value.to_string(),
            f.linked_positions.len().to_string(),
            f.category
                .map(|c| c.to_string())
                .unwrap_or_else(|| "unlinked".to_string()),
        ])?;
    }
    wtr.flush()?;

    let mut wtr = csv::Writer::from_path(args.out.join("fault_link_summary.csv"))?;
    wtr.write_record(["category", "count"])?;
    for (name, count) in [
        ("t1-and-t2", linkage.summary.both_violated),
        ("t1-only", linkage.summary.t1_only),
        ("t2-only", linkage.summary.t2_only),
        ("within-spec", linkage.summary.within_spec),
        ("unlinked", linkage.summary.unlinked),
    ] {
        wtr.write_record(&[name.to_string(), count.to_string()])?;
    }
    wtr.flush()?;

    let mut manifest = RunManifest::new("report")
        .input(&args.coils)?
        .input(&args.tensile)?;
    if let Some(p) = &args.faults {
        manifest = manifest.input(p)?;
    }
    if let Some(p) = &args.scatter {
        manifest = manifest.input(p)?;
    }
    manifest
        .output("metrics.csv")
        .output("correlations.csv")
        .output("risk.csv")
        .output("faults_linked.csv")
        .output("fault_link_summary.csv")
        .write(&args.out)?;

    eprintln!(
        "report complete: {} labeled rows, {} coils in risk table, {} fault(s) linked",
        dataset.n(),
        risk.coils.len(),
        linkage.faults.len()
    );
    Ok(())
}

fn rule_confusion(
    predictions: &PredictionSet,
    limits: &SpecificationLimits,
    rule: FaultRule,
) -> anyhow::Result<ConfusionCounts> {
    let pred_flags: Vec<bool> = predictions
        .predictions
        .iter()
        .map(|p| classify_fault(*p, limits, rule))
        .collect();
    let truth_flags: Vec<bool> = predictions
        .targets
        .iter()
        .map(|t| classify_fault(*t, limits, rule))
        .collect();
    Ok(confusion(&pred_flags, &truth_flags)?)
}

fn write_correlations(
    wtr: &mut csv::Writer<std::fs::File>,
    dataset: &coilsense::data::LabeledDataset,
    subset: Option<&[usize]>,
) -> anyhow::Result<()> {
    let (x, y, name) = match subset {
        None => (dataset.x.clone(), dataset.y.clone(), "all"),
        Some(rows) => {
            let mut x = ndarray::Array2::zeros((rows.len(), dataset.x.ncols()));
            let mut y = ndarray::Array2::zeros((rows.len(), 2));
            for (dst, &src) in rows.iter().enumerate() {
                x.row_mut(dst).assign(&dataset.x.row(src));
                y.row_mut(dst).assign(&dataset.y.row(src));
            }
            (x, y, "production")
        }
    };
    if x.nrows() < 3 {
        eprintln!("warning: subset {name} too small for correlations");
        return Ok(());
    }
    let pca = pca_fit(&x, 2, true)?;
    let scores = pca_project(&pca, &x)?;
    let pairs: [(&str, Vec<f64>, Vec<f64>); 5] = [
        ("pc1_t1", scores.column(0).to_vec(), y.column(0).to_vec()),
        ("pc1_t2", scores.column(0).to_vec(), y.column(1).to_vec()),
        ("pc2_t1", scores.column(1).to_vec(), y.column(0).to_vec()),
        ("pc2_t2", scores.column(1).to_vec(), y.column(1).to_vec()),
        ("t1_t2", y.column(0).to_vec(), y.column(1).to_vec()),
    ];
    for (pair, a, b) in pairs {
        match pearson_correlation(&a, &b) {
            Ok(r) => wtr.write_record(&[name.to_string(), pair.to_string(), format_f64(r)])?,
            Err(e) => eprintln!("warning: correlation {pair} on {name}: {e}"),
        }
    }
    Ok(())
}

/// Reads a cv_scatter.csv back into per-row prediction pairs.
fn read_scatter(path: &Path) -> anyhow::Result<PredictionSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut by_row: HashMap<u64, [Option<(f64, f64)>; 2]> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != 6 {
            return Err(usage_error(format!(
                "{}: expected 6 columns (row,property,target,prediction,coil_id,fold)",
                path.display()
            )));
        }
        let row: u64 = record[0].parse().context("bad row index in scatter")?;
        let property = match &record[1] {
            "t1" => 0usize,
            "t2" => 1,
            other => return Err(usage_error(format!("bad property {other:?} in scatter"))),
        };
        let target: f64 = record[2].parse().context("bad target in scatter")?;
        let prediction: f64 = record[3].parse().context("bad prediction in scatter")?;
        by_row.entry(row).or_default()[property] = Some((target, prediction));
    }
    let mut rows: Vec<u64> = by_row.keys().copied().collect();
    rows.sort_unstable();
    let mut targets = Vec::with_capacity(rows.len());
    let mut predictions = Vec::with_capacity(rows.len());
    for row in rows {
        let pair = by_row[&row];
        let (t1, p1) = pair[0].ok_or_else(|| usage_error(format!("row {row} missing t1")))?;
        let (t2, p2) = pair[1].ok_or_else(|| usage_error(format!("row {row} missing t2")))?;
        targets.push([t1, t2]);
        predictions.push([p1, p2]);
    }
    if targets.is_empty() {
        return Err(usage_error("scatter file contains no rows"));
    }
    Ok(PredictionSet {
        targets,
        predictions,
    })
}
