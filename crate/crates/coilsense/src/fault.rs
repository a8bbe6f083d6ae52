//! Out-of-specification classification, coil-level risk scoring, streaming
//! estimation with alerting, and linkage of logged production faults.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{Coil, CoilId, FaultRef, SENSOR_DIM};
use crate::error::{Error, Result};
use crate::models::PlsModel;
use crate::preprocess::MovingAverage;

/// Upper specification limits for the material properties, in the same units
/// as the regression targets. These are plant configuration, never inferred
/// from data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecificationLimits {
    pub usl_t1: f64,
    pub usl_t2: f64,
}

impl SpecificationLimits {
    pub fn new(usl_t1: f64, usl_t2: f64) -> Result<Self> {
        if !usl_t1.is_finite() || !usl_t2.is_finite() {
            return Err(Error::InvalidConfig("specification limits must be finite".into()));
        }
        Ok(SpecificationLimits { usl_t1, usl_t2 })
    }
}

/// Which estimated property out-of-spec classification is based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultRule {
    T1Only,
    T2Only,
    T1OrT2,
}

impl fmt::Display for FaultRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultRule::T1Only => write!(f, "t1"),
            FaultRule::T2Only => write!(f, "t2"),
            FaultRule::T1OrT2 => write!(f, "t1-or-t2"),
        }
    }
}

/// Strict threshold classification of one estimate pair (t1_hat, t2_hat).
pub fn classify_fault(y_hat: [f64; 2], limits: &SpecificationLimits, rule: FaultRule) -> bool {
    let t1 = y_hat[0] > limits.usl_t1;
    let t2 = y_hat[1] > limits.usl_t2;
    match rule {
        FaultRule::T1Only => t1,
        FaultRule::T2Only => t2,
        FaultRule::T1OrT2 => t1 || t2,
    }
}

/// Per-property fraction of strict USL violations over a coil's estimates.
/// Coils with fewer than `min_count` estimates are reported as excluded
/// (`None`).
pub fn fraction_out_of_spec(
    coil_estimates: &[[f64; 2]],
    limits: &SpecificationLimits,
    min_count: usize,
) -> Option<(f64, f64)> {
    if coil_estimates.len() < min_count {
        return None;
    }
    let n = coil_estimates.len() as f64;
    let over_t1 = coil_estimates.iter().filter(|e| e[0] > limits.usl_t1).count();
    let over_t2 = coil_estimates.iter().filter(|e| e[1] > limits.usl_t2).count();
    Some((over_t1 as f64 / n, over_t2 as f64 / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    T1,
    T2,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::T1 => write!(f, "t1"),
            Property::T2 => write!(f, "t2"),
        }
    }
}

/// Alert raised when a smoothed estimate first exceeds its USL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertEvent {
    pub coil_id: CoilId,
    pub position: usize,
    pub property: Property,
    pub smoothed: f64,
    pub usl: f64,
}

/// Default hysteresis: an open alert closes only once the smoothed estimate
/// falls below USL minus this margin, so a noisy band around the limit
/// cannot retrigger per sample.
pub const DEFAULT_HYSTERESIS: f64 = 0.1;

/// Default smoothing window for streamed estimates.
pub const DEFAULT_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy)]
struct PropertyState {
    alert_open: bool,
}

/// Single-pass scorer for one coil's measurement stream: per-measurement
/// estimates, trailing moving average, and USL crossing alerts with
/// hysteresis. Memory use is bounded by the smoothing window.
pub struct StreamScorer<'m> {
    model: &'m PlsModel,
    limits: SpecificationLimits,
    hysteresis: f64,
    coil_id: CoilId,
    position: usize,
    smoothers: [MovingAverage; 2],
    states: [PropertyState; 2],
}

/// One scored stream position.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamPoint {
    pub position: usize,
    pub estimate: [f64; 2],
    pub smoothed: [f64; 2],
    pub alerts: Vec<AlertEvent>,
}

impl<'m> StreamScorer<'m> {
    pub fn new(
        model: &'m PlsModel,
        coil_id: CoilId,
        limits: SpecificationLimits,
        window: usize,
    ) -> Result<Self> {
        Self::with_hysteresis(model, coil_id, limits, window, DEFAULT_HYSTERESIS)
    }

    pub fn with_hysteresis(
        model: &'m PlsModel,
        coil_id: CoilId,
        limits: SpecificationLimits,
        window: usize,
        hysteresis: f64,
    ) -> Result<Self> {
        if hysteresis.is_nan() || hysteresis < 0.0 {
            return Err(Error::InvalidConfig("hysteresis must be non-negative".into()));
        }
        Ok(StreamScorer {
            model,
            limits,
            hysteresis,
            coil_id,
            position: 0,
            smoothers: [MovingAverage::new(window)?, MovingAverage::new(window)?],
            states: [PropertyState { alert_open: false }; 2],
        })
    }

    pub fn push(&mut self, values: &[f64; SENSOR_DIM]) -> Result<StreamPoint> {
        let estimate = self
            .model
            .predict_row(ndarray::ArrayView1::from(&values[..]))?;
        let estimate = [estimate[0], estimate[1]];
        let smoothed = [
            self.smoothers[0].push(estimate[0]),
            self.smoothers[1].push(estimate[1]),
        ];

        let mut alerts = Vec::new();
        for (idx, property) in [(0, Property::T1), (1, Property::T2)] {
            let usl = match property {
                Property::T1 => self.limits.usl_t1,
                Property::T2 => self.limits.usl_t2,
            };
            let state = &mut self.states[idx];
            if state.alert_open {
                if smoothed[idx] < usl - self.hysteresis {
                    state.alert_open = false;
                }
            } else if smoothed[idx] > usl {
                state.alert_open = true;
                alerts.push(AlertEvent {
                    coil_id: self.coil_id.clone(),
                    position: self.position,
                    property,
                    smoothed: smoothed[idx],
                    usl,
                });
            }
        }

        let point = StreamPoint {
            position: self.position,
            estimate,
            smoothed,
            alerts,
        };
        self.position += 1;
        Ok(point)
    }
}

/// All outputs of scoring one coil end to end.
#[derive(Debug, Clone)]
pub struct StreamResult {
    pub coil_id: CoilId,
    pub estimates: Vec<[f64; 2]>,
    pub smoothed: Vec<[f64; 2]>,
    pub alerts: Vec<AlertEvent>,
}

/// Scores a cleaned coil in one sequential pass.
pub fn stream_score(
    model: &PlsModel,
    coil: &Coil,
    limits: &SpecificationLimits,
    smoothing_window: usize,
) -> Result<StreamResult> {
    let mut scorer = StreamScorer::new(model, coil.coil_id.clone(), *limits, smoothing_window)?;
    let mut estimates = Vec::with_capacity(coil.len());
    let mut smoothed = Vec::with_capacity(coil.len());
    let mut alerts = Vec::new();
    for m in &coil.measurements {
        let point = scorer.push(&m.values)?;
        estimates.push(point.estimate);
        smoothed.push(point.smoothed);
        alerts.extend(point.alerts);
    }
    Ok(StreamResult {
        coil_id: coil.coil_id.clone(),
        estimates,
        smoothed,
        alerts,
    })
}

/// Per-coil risk summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CoilRisk {
    pub coil_id: CoilId,
    pub n_estimates: usize,
    pub fraction_out_of_spec_t1: f64,
    pub fraction_out_of_spec_t2: f64,
    pub reported_fault_count: usize,
    /// Whether any smoothed-estimate alert fired while scoring the coil.
    pub alert_state: bool,
}

#[derive(Debug, Clone)]
pub struct RiskReport {
    pub coils: Vec<CoilRisk>,
    /// Coils with fewer estimates than the minimum count.
    pub excluded: Vec<CoilId>,
}

/// Default minimum number of measurements for a coil to enter the risk
/// report.
pub const DEFAULT_MIN_COUNT: usize = 2000;

/// Scores every coil and summarizes out-of-spec fractions, logged fault
/// counts and alert states.
pub fn risk_report(
    model: &PlsModel,
    coils: &[Coil],
    limits: &SpecificationLimits,
    smoothing_window: usize,
    min_count: usize,
) -> Result<RiskReport> {
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for coil in coils {
        let scored = stream_score(model, coil, limits, smoothing_window)?;
        match fraction_out_of_spec(&scored.estimates, limits, min_count) {
            Some((f1, f2)) => rows.push(CoilRisk {
                coil_id: coil.coil_id.clone(),
                n_estimates: scored.estimates.len(),
                fraction_out_of_spec_t1: f1,
                fraction_out_of_spec_t2: f2,
                reported_fault_count: coil.fault_events.len(),
                alert_state: !scored.alerts.is_empty(),
            }),
            None => excluded.push(coil.coil_id.clone()),
        }
    }
    Ok(RiskReport {
        coils: rows,
        excluded,
    })
}

/// How a logged fault's linked estimates relate to the specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultCategory {
    /// Estimates exceeded the USL of both t1 and t2.
    BothViolated,
    T1Only,
    T2Only,
    WithinSpec,
}

impl fmt::Display for FaultCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultCategory::BothViolated => write!(f, "t1-and-t2"),
            FaultCategory::T1Only => write!(f, "t1-only"),
            FaultCategory::T2Only => write!(f, "t2-only"),
            FaultCategory::WithinSpec => write!(f, "within-spec"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkedFault {
    pub coil_id: CoilId,
    pub reference: FaultRef,
    /// Positions of the measurements the fault resolves to.
    pub linked_positions: Vec<usize>,
    /// Majority category over the linked estimates; `None` when the
    /// reference could not be resolved.
    pub category: Option<FaultCategory>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultLinkSummary {
    pub both_violated: usize,
    pub t1_only: usize,
    pub t2_only: usize,
    pub within_spec: usize,
    pub unlinked: usize,
}

#[derive(Debug, Clone)]
pub struct FaultLinkage {
    pub faults: Vec<LinkedFault>,
    pub summary: FaultLinkSummary,
}

fn categorize(estimate: [f64; 2], limits: &SpecificationLimits) -> FaultCategory {
    let t1 = estimate[0] > limits.usl_t1;
    let t2 = estimate[1] > limits.usl_t2;
    match (t1, t2) {
        (true, true) => FaultCategory::BothViolated,
        (true, false) => FaultCategory::T1Only,
        (false, true) => FaultCategory::T2Only,
        (false, false) => FaultCategory::WithinSpec,
    }
}

/// Resolves every logged fault to its estimate(s) and categorizes it.
///
/// Measurement-linked faults resolve to a single position; hour-linked
/// faults to every measurement of that coil whose timestamp falls in the
/// hour, summarized by majority category (ties resolve toward the more
/// severe category).
pub fn link_faults(
    coils: &[Coil],
    estimates: &HashMap<CoilId, Vec<[f64; 2]>>,
    limits: &SpecificationLimits,
) -> FaultLinkage {
    let mut faults = Vec::new();
    let mut summary = FaultLinkSummary::default();

    for coil in coils {
        let coil_estimates = estimates.get(&coil.coil_id);
        for event in &coil.fault_events {
            let positions: Vec<usize> = match event.reference {
                FaultRef::Measurement(p) => {
                    if p < coil.len() {
                        vec![p]
                    } else {
                        Vec::new()
                    }
                }
                FaultRef::Hour(h) => coil
                    .measurements
                    .iter()
                    .filter(|m| m.hour() == h)
                    .map(|m| m.position_index)
                    .collect(),
            };

            let category = coil_estimates.and_then(|est| {
                let linked: Vec<FaultCategory> = positions
                    .iter()
                    .filter_map(|&p| est.get(p).map(|e| categorize(*e, limits)))
                    .collect();
                if linked.is_empty() {
                    return None;
                }
                // majority, ties toward severity
                let count = |c: FaultCategory| linked.iter().filter(|&&l| l == c).count();
                let ordered = [
                    FaultCategory::BothViolated,
                    FaultCategory::T1Only,
                    FaultCategory::T2Only,
                    FaultCategory::WithinSpec,
                ];
                ordered
                    .into_iter()
                    .map(|c| (c, count(c)))
                    .max_by_key(|&(_, n)| n)
                    .map(|(c, _)| c)
            });

            match category {
                Some(FaultCategory::BothViolated) => summary.both_violated += 1,
                Some(FaultCategory::T1Only) => summary.t1_only += 1,
                Some(FaultCategory::T2Only) => summary.t2_only += 1,
                Some(FaultCategory::WithinSpec) => summary.within_spec += 1,
                None => summary.unlinked += 1,
            }
            faults.push(LinkedFault {
                coil_id: coil.coil_id.clone(),
                reference: event.reference,
                linked_positions: positions,
                category,
            });
        }
    }
    FaultLinkage { faults, summary }
}
