use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use coilsense::data::{CoilId, SENSOR_DIM};
use coilsense::fault::{SpecificationLimits, StreamScorer};
use coilsense::models::load_pls_model_file;

use crate::usage_error;

/// Streams the measurement CSV from standard input through the model and
/// writes one JSON alert record per line to standard output, as soon as the
/// smoothed estimate crosses a limit. An empty stream is a successful run
/// with zero alerts.
pub fn run(model_path: PathBuf, usl_t1: f64, usl_t2: f64, window: usize) -> anyhow::Result<()> {
    let model = load_pls_model_file(&model_path)?;
    let limits = SpecificationLimits::new(usl_t1, usl_t2)
        .map_err(|e| usage_error(format!("{e}")))?;

    let stdin = std::io::stdin();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(stdin.lock());
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    let mut scorers: HashMap<CoilId, StreamScorer<'_>> = HashMap::new();
    let mut alert_count = 0usize;

    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                eprintln!("warning: skipping unreadable record: {e}");
                continue;
            }
        };
        if record.len() != 2 + SENSOR_DIM {
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            eprintln!(
                "warning: line {line}: expected {} columns, found {}",
                2 + SENSOR_DIM,
                record.len()
            );
            continue;
        }
        let coil_id = CoilId::new(record[1].to_string());
        let mut values = [0.0; SENSOR_DIM];
        let mut usable = true;
        for j in 0..SENSOR_DIM {
            match record[2 + j].parse::<f64>() {
                Ok(v) if v.is_finite() => values[j] = v,
                _ => {
                    usable = false;
                    break;
                }
            }
        }
        if !usable {
            continue; // implausible measurement, same rule as batch cleaning
        }

        let scorer = match scorers.entry(coil_id.clone()) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(StreamScorer::new(&model, coil_id, limits, window)?)
            }
        };
        let point = scorer.push(&values)?;
        for alert in &point.alerts {
            if let Err(e) = serde_json::to_writer(&mut out, alert)
                .map_err(std::io::Error::from)
                .and_then(|()| out.write_all(b"\n"))
                .and_then(|()| out.flush())
            {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return Ok(()); // downstream closed, stop quietly
                }
                return Err(e.into());
            }
            alert_count += 1;
        }
    }

    eprintln!("stream ended after {} coil(s), {} alert(s)", scorers.len(), alert_count);
    Ok(())
}
