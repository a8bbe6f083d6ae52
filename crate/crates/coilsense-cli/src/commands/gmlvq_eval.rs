use std::collections::HashSet;
use std::path::PathBuf;

use coilsense::data::{format_f64, FaultRef, SENSOR_DIM};
use coilsense::fault::{classify_fault, FaultRule, SpecificationLimits};
use coilsense::gmlvq::{repeated_split_auc, SplitEvalConfig};
use coilsense::models::load_pls_model_file;
use coilsense::preprocess::Standardizer;
use ndarray::Array2;

use crate::commands::load_clean_coils;
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::usage_error;

pub struct Args {
    pub coils: PathBuf,
    pub faults: PathBuf,
    pub model: PathBuf,
    pub usl_t1: f64,
    pub usl_t2: f64,
    pub splits: usize,
    pub val_size: usize,
    pub per_class: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

/// Builds the two measurement classes of the discrimination experiment:
/// positives are measurement-linked fault measurements, negatives are
/// randomly chosen measurements whose estimates were out of specification
/// but which caused no logged fault. Reports per-split validation AUC of a
/// GMLVQ classifier over repeated random splits.
pub fn run(args: Args) -> anyhow::Result<()> {
    let model = load_pls_model_file(&args.model)?;
    let limits = SpecificationLimits::new(args.usl_t1, args.usl_t2)
        .map_err(|e| usage_error(format!("{e}")))?;
    let mut coils = load_clean_coils(&args.coils)?;
    let faults = coilsense::data::parse_fault_file(&args.faults)?;
    for w in coilsense::data::attach_records(&mut coils, Vec::new(), faults) {
        eprintln!("warning: {w}");
    }

    // collect positives and candidate negatives, in deterministic coil
    // order; negatives are out-of-spec estimates not resolvable to any
    // logged fault (neither by position nor by hour)
    let mut positives: Vec<[f64; SENSOR_DIM]> = Vec::new();
    let mut negatives: Vec<[f64; SENSOR_DIM]> = Vec::new();
    for coil in &coils {
        let mut fault_positions: HashSet<usize> = HashSet::new();
        let mut fault_hours: HashSet<u64> = HashSet::new();
        for f in &coil.fault_events {
            match f.reference {
                FaultRef::Measurement(p) => {
                    fault_positions.insert(p);
                }
                FaultRef::Hour(h) => {
                    fault_hours.insert(h);
                }
            }
        }
        for m in &coil.measurements {
            let estimate = model.predict_row(ndarray::ArrayView1::from(&m.values[..]))?;
            let out_of_spec =
                classify_fault([estimate[0], estimate[1]], &limits, FaultRule::T1OrT2);
            if fault_positions.contains(&m.position_index) {
                positives.push(m.values);
            } else if out_of_spec && !fault_hours.contains(&m.hour()) {
                negatives.push(m.values);
            }
        }
    }

    if positives.len() < 2 {
        return Err(usage_error(format!(
            "need at least 2 measurement-linked faults, found {}",
            positives.len()
        )));
    }
    if negatives.is_empty() {
        return Err(usage_error(
            "no out-of-spec measurements without faults to use as negatives",
        ));
    }

    let per_class = args
        .per_class
        .unwrap_or(positives.len())
        .min(positives.len())
        .min(negatives.len());
    if per_class < 2 {
        return Err(usage_error("need at least 2 samples per class"));
    }

    // seeded subsampling keeps the experiment reproducible
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(args.seed);
    let pos_sample = sample_rows(&positives, per_class, &mut rng);
    let neg_sample = sample_rows(&negatives, per_class, &mut rng);

    let n = 2 * per_class;
    let mut x = Array2::zeros((n, SENSOR_DIM));
    let mut labels = Vec::with_capacity(n);
    for (i, row) in neg_sample.iter().chain(pos_sample.iter()).enumerate() {
        for j in 0..SENSOR_DIM {
            x[[i, j]] = row[j];
        }
        labels.push(if i < per_class { 0usize } else { 1 });
    }
    let standardizer = Standardizer::fit(x.view())?;
    let x = standardizer.apply(x.view())?;

    let config = SplitEvalConfig {
        n_splits: args.splits,
        validation_size: args.val_size,
        seed: args.seed,
        ..Default::default()
    };
    let result = repeated_split_auc(&x, &labels, &config)?;

    ensure_out_dir(&args.out)?;
    let mut wtr = csv::Writer::from_path(args.out.join("auc_splits.csv"))?;
    wtr.write_record(["split", "auc"])?;
    for (i, auc) in result.per_split.iter().enumerate() {
        wtr.write_record(&[i.to_string(), format_f64(*auc)])?;
    }
    wtr.flush()?;

    RunManifest::new("gmlvq-eval")
        .seed(args.seed)
        .input(&args.coils)?
        .input(&args.faults)?
        .input(&args.model)?
        .output("auc_splits.csv")
        .write(&args.out)?;

    println!(
        "mean validation AUC over {} splits ({} per class): {:.4}",
        result.per_split.len(),
        per_class,
        result.mean_auc
    );
    Ok(())
}

fn sample_rows(
    rows: &[[f64; SENSOR_DIM]],
    count: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<[f64; SENSOR_DIM]> {
    use rand::Rng;
    let mut indices: Vec<usize> = (0..rows.len()).collect();
    for i in (1..indices.len()).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
    indices.truncate(count);
    indices.sort_unstable();
    indices.into_iter().map(|i| rows[i]).collect()
}
