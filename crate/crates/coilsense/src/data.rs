//! Domain types and file ingestion for sensor measurements, tensile tests
//! and fault logs.
//!
//! File formats (delimited text, header row, decimal dot):
//!
//! * measurements: `timestamp,coil_id,sv1..sv20`
//! * tensile tests: `coil_id,position_index,t1,t2,replicates`
//! * fault log: `coil_id,ref_kind,ref_value` with `ref_kind` one of
//!   `measurement` (a position index) or `hour` (an hour index).

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sensor variables per measurement: 10 amplitude gains followed
/// by 10 phase shifts. "SV j" in reports is 1-based, so SV 1 is index 0.
pub const SENSOR_DIM: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoilId(pub String);

impl CoilId {
    pub fn new(id: impl Into<String>) -> Self {
        CoilId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CoilId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for CoilId {
    fn from(s: &str) -> Self {
        CoilId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeatId(pub String);

impl fmt::Display for HeatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One timestamped 20-dimensional sensor reading bound to a coil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMeasurement {
    /// Seconds on a monotonic production clock. Only ordering and the
    /// containing hour (`timestamp / 3600`) are ever interpreted.
    pub timestamp: f64,
    pub coil_id: CoilId,
    /// Ordinal within the coil, contiguous from 0 after cleaning.
    pub position_index: usize,
    pub values: [f64; SENSOR_DIM],
}

impl SensorMeasurement {
    /// Hour bucket used to resolve hour-linked fault references.
    pub fn hour(&self) -> u64 {
        (self.timestamp / 3600.0).floor() as u64
    }
}

/// Aggregated destructive tensile test at one coil position. `t1`/`t2` are
/// the mean over `replicate_count` repeated tests on the same sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensileSample {
    pub coil_id: CoilId,
    pub position_index: usize,
    pub t1: f64,
    pub t2: f64,
    pub replicate_count: u32,
}

/// How a logged production fault refers back to the measured material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultRef {
    /// Identification code of an inline measurement, i.e. a position index.
    Measurement(usize),
    /// Only the hour during which the fault occurred was logged.
    Hour(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub coil_id: CoilId,
    pub reference: FaultRef,
}

/// A production coil: its ordered measurement stream plus metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coil {
    pub coil_id: CoilId,
    /// Production batch identity. Not carried by the file formats, so it is
    /// only present on generator-produced coils.
    pub heat_id: Option<HeatId>,
    pub measurements: Vec<SensorMeasurement>,
    pub tensile_samples: Vec<TensileSample>,
    pub fault_events: Vec<FaultEvent>,
}

impl Coil {
    pub fn new(coil_id: CoilId) -> Self {
        Coil {
            coil_id,
            heat_id: None,
            measurements: Vec::new(),
            tensile_samples: Vec::new(),
            fault_events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    /// Raw series of one sensor variable (0-based index).
    pub fn variable_series(&self, variable: usize) -> Vec<f64> {
        self.measurements
            .iter()
            .map(|m| m.values[variable])
            .collect()
    }
}

/// Paired matrix of aggregated sensor vectors and material properties.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// n x 20 aggregated sensor vectors.
    pub x: Array2<f64>,
    /// n x 2 material properties, columns t1, t2.
    pub y: Array2<f64>,
    /// Coil provenance per row.
    pub row_coil: Vec<CoilId>,
}

impl LabeledDataset {
    pub fn new(x: Array2<f64>, y: Array2<f64>, row_coil: Vec<CoilId>) -> Result<Self> {
        if x.nrows() != y.nrows() || x.nrows() != row_coil.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("matching row counts (x has {})", x.nrows()),
                actual: format!("y has {}, row_coil has {}", y.nrows(), row_coil.len()),
            });
        }
        if y.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: "2 target columns".into(),
                actual: format!("{}", y.ncols()),
            });
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "labeled dataset contains non-finite entries".into(),
            ));
        }
        Ok(LabeledDataset { x, y, row_coil })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Distinct coil ids in first-appearance order.
    pub fn distinct_coils(&self) -> Vec<CoilId> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for id in &self.row_coil {
            if seen.insert(id.clone(), ()).is_none() {
                out.push(id.clone());
            }
        }
        out
    }

    /// Appends the rows of `other` after the rows of `self`.
    pub fn concat(&self, other: &LabeledDataset) -> Result<LabeledDataset> {
        let x = ndarray::concatenate(ndarray::Axis(0), &[self.x.view(), other.x.view()])
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let y = ndarray::concatenate(ndarray::Axis(0), &[self.y.view(), other.y.view()])
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut row_coil = self.row_coil.clone();
        row_coil.extend(other.row_coil.iter().cloned());
        LabeledDataset::new(x, y, row_coil)
    }
}

// ---------------------------------------------------------------------------
// Measurement file parsing
// ---------------------------------------------------------------------------

/// A row that had the right shape but did not parse; the row is skipped and
/// reported rather than aborting the whole file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ParsedMeasurements {
    /// Coils in order of first appearance, each internally ordered by
    /// appearance with `position_index` assigned 0..len-1.
    pub coils: Vec<Coil>,
    pub record_errors: Vec<RecordError>,
}

fn expected_measurement_header() -> Vec<String> {
    let mut h = vec!["timestamp".to_string(), "coil_id".to_string()];
    for j in 1..=SENSOR_DIM {
        h.push(format!("sv{j}"));
    }
    h
}

pub fn parse_measurement_file(path: impl AsRef<Path>) -> Result<ParsedMeasurements> {
    let file = std::fs::File::open(path)?;
    parse_measurements(file)
}

/// Parses the measurement CSV format from any reader.
///
/// Wrong column count is fatal (the file does not match the contract);
/// unparseable fields within a well-shaped row are record-level errors.
pub fn parse_measurements(reader: impl Read) -> Result<ParsedMeasurements> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    let expected = expected_measurement_header();
    if header.len() != expected.len() {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected {} columns ({}...), found {}",
                expected.len(),
                "timestamp,coil_id,sv1",
                header.len()
            ),
        });
    }

    let mut coils: Vec<Coil> = Vec::new();
    let mut index: HashMap<CoilId, usize> = HashMap::new();
    let mut record_errors = Vec::new();

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != expected.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} columns, found {}",
                    expected.len(),
                    record.len()
                ),
            });
        }
        let timestamp = match record[0].parse::<f64>() {
            Ok(v) => v,
            Err(e) => {
                record_errors.push(RecordError {
                    line,
                    message: format!("bad timestamp {:?}: {e}", &record[0]),
                });
                continue;
            }
        };
        let coil_id = CoilId::new(record[1].to_string());
        if coil_id.as_str().is_empty() {
            record_errors.push(RecordError {
                line,
                message: "empty coil_id".into(),
            });
            continue;
        }
        let mut values = [0.0; SENSOR_DIM];
        let mut bad = None;
        for j in 0..SENSOR_DIM {
            match record[2 + j].parse::<f64>() {
                Ok(v) => values[j] = v,
                Err(e) => {
                    bad = Some(format!("bad sv{} value {:?}: {e}", j + 1, &record[2 + j]));
                    break;
                }
            }
        }
        if let Some(message) = bad {
            record_errors.push(RecordError { line, message });
            continue;
        }

        let slot = *index.entry(coil_id.clone()).or_insert_with(|| {
            coils.push(Coil::new(coil_id.clone()));
            coils.len() - 1
        });
        let coil = &mut coils[slot];
        let position_index = coil.measurements.len();
        coil.measurements.push(SensorMeasurement {
            timestamp,
            coil_id,
            position_index,
            values,
        });
    }

    Ok(ParsedMeasurements {
        coils,
        record_errors,
    })
}

/// Writes coils back out in the measurement CSV format (canonical layout:
/// coils in slice order, measurements in position order).
pub fn write_measurements(writer: impl Write, coils: &[Coil]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(expected_measurement_header())?;
    for coil in coils {
        for m in &coil.measurements {
            let mut record = Vec::with_capacity(2 + SENSOR_DIM);
            record.push(format_f64(m.timestamp));
            record.push(m.coil_id.as_str().to_string());
            for v in &m.values {
                record.push(format_f64(*v));
            }
            wtr.write_record(&record)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Canonical decimal form (shortest round-trip), shared by every CSV writer
/// so that reruns stay byte-identical.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// Tensile and fault files
// ---------------------------------------------------------------------------

pub fn parse_tensile_file(path: impl AsRef<Path>) -> Result<Vec<TensileSample>> {
    let file = std::fs::File::open(path)?;
    parse_tensile(file)
}

pub fn parse_tensile(reader: impl Read) -> Result<Vec<TensileSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse { line, message };
        if record.len() != 5 {
            return Err(parse_err(format!("expected 5 columns, found {}", record.len())));
        }
        let sample = TensileSample {
            coil_id: CoilId::new(record[0].to_string()),
            position_index: record[1]
                .parse()
                .map_err(|e| parse_err(format!("bad position_index: {e}")))?,
            t1: record[2]
                .parse()
                .map_err(|e| parse_err(format!("bad t1: {e}")))?,
            t2: record[3]
                .parse()
                .map_err(|e| parse_err(format!("bad t2: {e}")))?,
            replicate_count: record[4]
                .parse()
                .map_err(|e| parse_err(format!("bad replicates: {e}")))?,
        };
        if !sample.t1.is_finite() || !sample.t2.is_finite() {
            return Err(parse_err("non-finite tensile value".into()));
        }
        if sample.replicate_count == 0 {
            return Err(parse_err("replicates must be >= 1".into()));
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn write_tensile(writer: impl Write, samples: &[TensileSample]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["coil_id", "position_index", "t1", "t2", "replicates"])?;
    for s in samples {
        wtr.write_record(&[
            s.coil_id.as_str().to_string(),
            s.position_index.to_string(),
            format_f64(s.t1),
            format_f64(s.t2),
            s.replicate_count.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn parse_fault_file(path: impl AsRef<Path>) -> Result<Vec<FaultEvent>> {
    let file = std::fs::File::open(path)?;
    parse_faults(file)
}

pub fn parse_faults(reader: impl Read) -> Result<Vec<FaultEvent>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse { line, message };
        if record.len() != 3 {
            return Err(parse_err(format!("expected 3 columns, found {}", record.len())));
        }
        let value: u64 = record[2]
            .parse()
            .map_err(|e| parse_err(format!("bad ref_value: {e}")))?;
        let reference = match &record[1] {
            "measurement" => FaultRef::Measurement(value as usize),
            "hour" => FaultRef::Hour(value),
            other => {
                return Err(parse_err(format!(
                    "ref_kind must be `measurement` or `hour`, found {other:?}"
                )))
            }
        };
        out.push(FaultEvent {
            coil_id: CoilId::new(record[0].to_string()),
            reference,
        });
    }
    Ok(out)
}

pub fn write_faults(writer: impl Write, faults: &[FaultEvent]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["coil_id", "ref_kind", "ref_value"])?;
    for f in faults {
        let (kind, value) = match f.reference {
            FaultRef::Measurement(p) => ("measurement", p as u64),
            FaultRef::Hour(h) => ("hour", h),
        };
        wtr.write_record([f.coil_id.as_str(), kind, &value.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Attaches tensile samples and fault events to their coils by id. Samples
/// are kept sorted by position. Records naming unknown coils are returned as
/// warnings.
pub fn attach_records(
    coils: &mut [Coil],
    samples: Vec<TensileSample>,
    faults: Vec<FaultEvent>,
) -> Vec<String> {
    let mut index: HashMap<CoilId, usize> = HashMap::new();
    for (i, c) in coils.iter().enumerate() {
        index.insert(c.coil_id.clone(), i);
    }
    let mut warnings = Vec::new();
    for s in samples {
        match index.get(&s.coil_id) {
            Some(&i) => coils[i].tensile_samples.push(s),
            None => warnings.push(format!("tensile sample for unknown coil {}", s.coil_id)),
        }
    }
    for f in faults {
        match index.get(&f.coil_id) {
            Some(&i) => coils[i].fault_events.push(f),
            None => warnings.push(format!("fault event for unknown coil {}", f.coil_id)),
        }
    }
    for c in coils.iter_mut() {
        c.tensile_samples.sort_by_key(|s| s.position_index);
    }
    warnings
}

// ---------------------------------------------------------------------------
// Stream cleaning
// ---------------------------------------------------------------------------

/// Closed per-variable plausibility intervals. Production stops make the
/// sensor emit physically impossible values; anything non-finite or outside
/// these bounds is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PlausibilityBounds {
    pub lower: [f64; SENSOR_DIM],
    pub upper: [f64; SENSOR_DIM],
}

impl PlausibilityBounds {
    pub fn new(lower: [f64; SENSOR_DIM], upper: [f64; SENSOR_DIM]) -> Result<Self> {
        for j in 0..SENSOR_DIM {
            if !lower[j].is_finite() || !upper[j].is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "plausibility bounds for sv{} must be finite",
                    j + 1
                )));
            }
            if lower[j] > upper[j] {
                return Err(Error::InvalidConfig(format!(
                    "plausibility lower bound exceeds upper bound for sv{}",
                    j + 1
                )));
            }
        }
        Ok(PlausibilityBounds { lower, upper })
    }

    /// Widest finite bounds: only the non-finite rule removes anything.
    pub fn permissive() -> Self {
        PlausibilityBounds {
            lower: [f64::MIN; SENSOR_DIM],
            upper: [f64::MAX; SENSOR_DIM],
        }
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::new([lower; SENSOR_DIM], [upper; SENSOR_DIM])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RemovalReason {
    NonFinite { variable: usize },
    OutOfBounds { variable: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemovedMeasurement {
    /// Position in the coil as it was before cleaning.
    pub original_position: usize,
    pub reason: RemovalReason,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CleanReport {
    pub removed: Vec<RemovedMeasurement>,
    /// Set when cleaning removed every measurement.
    pub emptied: bool,
}

/// Removes implausible measurements and re-assigns contiguous positions.
pub fn clean_stream(coil: &Coil, bounds: &PlausibilityBounds) -> (Coil, CleanReport) {
    let mut cleaned = Coil {
        coil_id: coil.coil_id.clone(),
        heat_id: coil.heat_id.clone(),
        measurements: Vec::with_capacity(coil.measurements.len()),
        tensile_samples: coil.tensile_samples.clone(),
        fault_events: coil.fault_events.clone(),
    };
    let mut report = CleanReport::default();

    for m in &coil.measurements {
        let mut reason = None;
        for j in 0..SENSOR_DIM {
            let v = m.values[j];
            if !v.is_finite() {
                reason = Some(RemovalReason::NonFinite { variable: j });
                break;
            }
            if v < bounds.lower[j] || v > bounds.upper[j] {
                reason = Some(RemovalReason::OutOfBounds { variable: j, value: v });
                break;
            }
        }
        match reason {
            Some(reason) => report.removed.push(RemovedMeasurement {
                original_position: m.position_index,
                reason,
            }),
            None => {
                let mut kept = m.clone();
                kept.position_index = cleaned.measurements.len();
                cleaned.measurements.push(kept);
            }
        }
    }
    report.emptied = cleaned.measurements.is_empty() && !coil.measurements.is_empty();
    (cleaned, report)
}

// ---------------------------------------------------------------------------
// Aggregation into a labeled dataset
// ---------------------------------------------------------------------------

/// How sensor measurements are aggregated around each tensile sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AggregationPolicy {
    /// Mean of the first `window` measurements, paired with the start-of-coil
    /// sample (position 0). Coils shorter than `window` are excluded.
    ProductionStart { window: usize },
    /// Mean of the `count` measurements centered on each sample position
    /// (window clipped at coil ends).
    SampleNeighborhood { count: usize },
    /// Dispatch per sample: position 0 uses the production rule, any other
    /// position the neighborhood rule. This is what a mixed file of
    /// production coils plus a fully-sampled testcoil needs.
    Auto { window: usize, neighborhood: usize },
}

impl AggregationPolicy {
    pub fn production() -> Self {
        AggregationPolicy::ProductionStart { window: 200 }
    }

    pub fn testcoil() -> Self {
        AggregationPolicy::SampleNeighborhood { count: 5 }
    }

    pub fn auto() -> Self {
        AggregationPolicy::Auto {
            window: 200,
            neighborhood: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AggregationWarning {
    CoilExcluded { coil_id: CoilId, length: usize, required: usize },
    SampleSkipped { coil_id: CoilId, position: usize, reason: String },
}

/// One row per retained (coil, tensile sample) pairing.
pub fn build_labeled_dataset(
    coils: &[Coil],
    policy: &AggregationPolicy,
) -> Result<(LabeledDataset, Vec<AggregationWarning>)> {
    let mut rows: Vec<[f64; SENSOR_DIM]> = Vec::new();
    let mut targets: Vec<[f64; 2]> = Vec::new();
    let mut row_coil = Vec::new();
    let mut warnings = Vec::new();

    for coil in coils {
        let (prod_window, neighborhood) = match *policy {
            AggregationPolicy::ProductionStart { window } => (Some(window), None),
            AggregationPolicy::SampleNeighborhood { count } => (None, Some(count)),
            AggregationPolicy::Auto { window, neighborhood } => (Some(window), Some(neighborhood)),
        };

        let coil_too_short = prod_window.map(|w| coil.len() < w).unwrap_or(false);
        if coil_too_short && matches!(policy, AggregationPolicy::ProductionStart { .. }) {
            warnings.push(AggregationWarning::CoilExcluded {
                coil_id: coil.coil_id.clone(),
                length: coil.len(),
                required: prod_window.unwrap(),
            });
            continue;
        }

        for sample in &coil.tensile_samples {
            let use_production = match *policy {
                AggregationPolicy::ProductionStart { .. } => true,
                AggregationPolicy::SampleNeighborhood { .. } => false,
                AggregationPolicy::Auto { .. } => sample.position_index == 0,
            };

            let mean = if use_production {
                let window = prod_window.unwrap();
                if sample.position_index != 0 {
                    warnings.push(AggregationWarning::SampleSkipped {
                        coil_id: coil.coil_id.clone(),
                        position: sample.position_index,
                        reason: "production policy pairs only the start-of-coil sample".into(),
                    });
                    continue;
                }
                if coil.len() < window {
                    warnings.push(AggregationWarning::CoilExcluded {
                        coil_id: coil.coil_id.clone(),
                        length: coil.len(),
                        required: window,
                    });
                    break;
                }
                mean_of(&coil.measurements[..window])
            } else {
                let count = neighborhood.unwrap();
                if sample.position_index >= coil.len() || coil.is_empty() {
                    warnings.push(AggregationWarning::SampleSkipped {
                        coil_id: coil.coil_id.clone(),
                        position: sample.position_index,
                        reason: "no resolvable neighborhood".into(),
                    });
                    continue;
                }
                let (lo, hi) = neighborhood_range(sample.position_index, count, coil.len());
                mean_of(&coil.measurements[lo..hi])
            };

            rows.push(mean);
            targets.push([sample.t1, sample.t2]);
            row_coil.push(coil.coil_id.clone());
        }
    }

    let n = rows.len();
    let mut x = Array2::zeros((n, SENSOR_DIM));
    let mut y = Array2::zeros((n, 2));
    for (i, row) in rows.iter().enumerate() {
        for j in 0..SENSOR_DIM {
            x[[i, j]] = row[j];
        }
        y[[i, 0]] = targets[i][0];
        y[[i, 1]] = targets[i][1];
    }
    Ok((LabeledDataset::new(x, y, row_coil)?, warnings))
}

/// Centered window of up to `count` positions around `position`, clipped at
/// the coil ends. Returns a half-open index range.
pub fn neighborhood_range(position: usize, count: usize, len: usize) -> (usize, usize) {
    let radius = count / 2;
    let lo = position.saturating_sub(radius);
    let hi = (position + radius + 1).min(len);
    (lo, hi)
}

fn mean_of(measurements: &[SensorMeasurement]) -> [f64; SENSOR_DIM] {
    let mut acc = [0.0; SENSOR_DIM];
    for m in measurements {
        for (a, v) in acc.iter_mut().zip(&m.values) {
            *a += v;
        }
    }
    let n = measurements.len() as f64;
    for a in acc.iter_mut() {
        *a /= n;
    }
    acc
}

/// View of a 20-vector as an ndarray row, for model code.
pub fn values_view(values: &[f64; SENSOR_DIM]) -> ArrayView1<'_, f64> {
    ArrayView1::from(&values[..])
}
