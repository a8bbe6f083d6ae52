//! Seeded synthetic production-line generator.
//!
//! A single latent hardness factor drives everything: sensor readings couple
//! negatively to it (harder material reads lower), both material properties
//! scale with it, and the fault hazard rises once t1 exceeds its USL. The
//! defaults are calibrated so that the generated data reproduces the
//! qualitative structure the pipeline is built for: one dominant principal
//! component around 85-90% explained variance, visibly noisier sensor
//! variables 3, 4 and 11, a testcoil with a mid-coil hardness transition,
//! and a small population of elevated-hardness coils that drive faults.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{
    format_f64, Coil, CoilId, FaultEvent, FaultRef, HeatId, SensorMeasurement, TensileSample,
    SENSOR_DIM,
};
use crate::error::{Error, Result};

/// Latent structure of the generated data. The production process is
/// one-factor; the two-factor mode exists to exercise component selection.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum LatentModel {
    #[default]
    OneFactor,
    TwoFactor { amplitude: f64 },
}



/// The deliberately mis-producible coil: fully measured, repeatedly sampled,
/// with a sigmoid hardness transition partway through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestcoilConfig {
    pub enabled: bool,
    pub measurements: usize,
    /// Transition midpoint as a fraction of the coil length.
    pub transition_center_frac: f64,
    /// Sigmoid width as a fraction of the coil length.
    pub transition_width_frac: f64,
    /// Hardness increase across the transition.
    pub transition_delta: f64,
    /// Hardness level before the transition.
    pub base_level: f64,
    pub sample_locations: usize,
    pub replicates_per_location: u32,
}

impl Default for TestcoilConfig {
    fn default() -> Self {
        TestcoilConfig {
            enabled: true,
            measurements: 12_000,
            transition_center_frac: 0.44,
            transition_width_frac: 1.0 / 60.0,
            transition_delta: 2.6,
            base_level: 0.2,
            sample_locations: 9,
            replicates_per_location: 2,
        }
    }
}

/// Controlled-experiment generator: strips modified to be harder or softer
/// around an unmodified reference group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModifiedGroupsConfig {
    /// Hardness offset of the hard (+) and soft (-) groups.
    pub group_offset: f64,
    pub strips_per_group: usize,
    /// Measurements are taken at this many spots per strip.
    pub locations_per_strip: usize,
    pub measurements_per_location: usize,
    pub strip_jitter_sd: f64,
    pub location_jitter_sd: f64,
    /// When set, the last strip of the hard group is drawn from the
    /// reference distribution, imitating a failed modification.
    pub include_failed_modification: bool,
}

impl Default for ModifiedGroupsConfig {
    fn default() -> Self {
        ModifiedGroupsConfig {
            group_offset: 2.0,
            strips_per_group: 3,
            locations_per_strip: 3,
            measurements_per_location: 200,
            strip_jitter_sd: 0.1,
            location_jitter_sd: 0.05,
            include_failed_modification: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Production coils (the testcoil, when enabled, is extra).
    pub n_coils: usize,
    pub coils_per_heat: usize,
    /// Trailing coils produced at elevated hardness, out of specification.
    pub n_elevated_coils: usize,
    pub min_measurements: usize,
    pub max_measurements: usize,
    pub sampling_interval_s: f64,
    pub coil_gap_s: f64,
    /// Heat-level hardness: normal with this sd, truncated to
    /// `heat_mean_range` so clean production stays clear of the limits.
    pub heat_mean_sd: f64,
    pub heat_mean_range: (f64, f64),
    pub coil_jitter_sd: f64,
    /// Amplitude of the smooth within-coil hardness drift.
    pub drift_amplitude: f64,
    pub elevated_offset: f64,
    pub elevated_jitter_sd: f64,
    pub sensor_baseline: [f64; SENSOR_DIM],
    /// Positive gains: harder material lowers every reading.
    pub sensor_gain: [f64; SENSOR_DIM],
    pub sensor_noise_sd: [f64; SENSOR_DIM],
    pub target_coeff_t1: f64,
    pub target_coeff_t2: f64,
    /// Noise of a single destructive test replicate.
    pub target_noise_sd: f64,
    pub usl_t1: f64,
    pub usl_t2: f64,
    /// Peak per-measurement fault probability, reached far above the USL.
    pub hazard_max: f64,
    pub hazard_steepness: f64,
    /// Share of faults logged only by the hour instead of the measurement.
    pub hour_link_fraction: f64,
    pub production_replicates: u32,
    pub latent: LatentModel,
    pub testcoil: TestcoilConfig,
    pub modified_groups: ModifiedGroupsConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let mut gain = [0.0; SENSOR_DIM];
        let mut baseline = [0.0; SENSOR_DIM];
        let mut noise = [0.0; SENSOR_DIM];
        for j in 0..SENSOR_DIM {
            gain[j] = 0.8 + 0.4 * j as f64 / (SENSOR_DIM - 1) as f64;
            baseline[j] = 2.0 + 0.25 * j as f64;
            // sensor variables 3, 4 and 11 (1-based) are markedly noisier
            let noisy = j == 2 || j == 3 || j == 10;
            noise[j] = gain[j] * if noisy { 0.9 } else { 0.18 };
        }
        GeneratorConfig {
            seed: 42,
            n_coils: 40,
            coils_per_heat: 4,
            n_elevated_coils: 3,
            min_measurements: 2200,
            max_measurements: 6000,
            sampling_interval_s: 0.5,
            coil_gap_s: 600.0,
            heat_mean_sd: 0.7,
            heat_mean_range: (-2.0, 0.55),
            coil_jitter_sd: 0.08,
            drift_amplitude: 0.25,
            elevated_offset: 2.6,
            elevated_jitter_sd: 0.15,
            sensor_baseline: baseline,
            sensor_gain: gain,
            sensor_noise_sd: noise,
            target_coeff_t1: 1.0,
            target_coeff_t2: 0.9,
            target_noise_sd: 0.1,
            usl_t1: 1.3,
            usl_t2: 1.4,
            hazard_max: 0.004,
            hazard_steepness: 12.0,
            hour_link_fraction: 0.6,
            production_replicates: 3,
            latent: LatentModel::OneFactor,
            testcoil: TestcoilConfig::default(),
            modified_groups: ModifiedGroupsConfig::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_coils == 0 {
            return Err(Error::InvalidConfig("n_coils must be >= 1".into()));
        }
        if self.coils_per_heat == 0 {
            return Err(Error::InvalidConfig("coils_per_heat must be >= 1".into()));
        }
        if self.n_elevated_coils > self.n_coils {
            return Err(Error::InvalidConfig(
                "n_elevated_coils exceeds n_coils".into(),
            ));
        }
        if self.min_measurements == 0 || self.min_measurements > self.max_measurements {
            return Err(Error::InvalidConfig(
                "need 1 <= min_measurements <= max_measurements".into(),
            ));
        }
        if self.sampling_interval_s.is_nan() || self.sampling_interval_s <= 0.0 {
            return Err(Error::InvalidConfig("sampling interval must be positive".into()));
        }
        for j in 0..SENSOR_DIM {
            if self.sensor_gain[j].is_nan() || self.sensor_gain[j] <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "sensor gain for sv{} must be positive",
                    j + 1
                )));
            }
            if self.sensor_noise_sd[j] < 0.0 || !self.sensor_noise_sd[j].is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "sensor noise for sv{} must be >= 0",
                    j + 1
                )));
            }
        }
        if self.target_noise_sd < 0.0 {
            return Err(Error::InvalidConfig("target noise must be >= 0".into()));
        }
        if !self.usl_t1.is_finite() || !self.usl_t2.is_finite() {
            return Err(Error::InvalidConfig("USL values must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.hazard_max) {
            return Err(Error::InvalidConfig("hazard_max must be in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.hour_link_fraction) {
            return Err(Error::InvalidConfig(
                "hour_link_fraction must be in [0, 1]".into(),
            ));
        }
        if self.production_replicates == 0 {
            return Err(Error::InvalidConfig("production_replicates must be >= 1".into()));
        }
        if self.heat_mean_range.0 > self.heat_mean_range.1 {
            return Err(Error::InvalidConfig("empty heat_mean_range".into()));
        }
        if let LatentModel::TwoFactor { amplitude } = self.latent {
            if amplitude.is_nan() || amplitude < 0.0 {
                return Err(Error::InvalidConfig("two-factor amplitude must be >= 0".into()));
            }
        }
        let t = &self.testcoil;
        if t.enabled {
            if t.measurements < 2 || t.sample_locations == 0 || t.replicates_per_location == 0 {
                return Err(Error::InvalidConfig("invalid testcoil configuration".into()));
            }
            if !(0.0..=1.0).contains(&t.transition_center_frac)
                || t.transition_width_frac.is_nan()
                || t.transition_width_frac <= 0.0
            {
                return Err(Error::InvalidConfig("invalid testcoil transition".into()));
            }
        }
        Ok(())
    }
}

/// Per-measurement latent state the generator used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRow {
    pub coil_id: CoilId,
    pub position_index: usize,
    pub h: f64,
    pub t1: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedData {
    /// Production coils (and the testcoil last, when enabled), with tensile
    /// samples and fault events already attached.
    pub coils: Vec<Coil>,
    pub ground_truth: Vec<GroundTruthRow>,
    /// Limits the generator drove the hazard with; scoring against these
    /// reproduces its notion of out-of-spec.
    pub usl_t1: f64,
    pub usl_t2: f64,
}

impl GeneratedData {
    pub fn tensile_samples(&self) -> Vec<TensileSample> {
        self.coils
            .iter()
            .flat_map(|c| c.tensile_samples.iter().cloned())
            .collect()
    }

    pub fn fault_events(&self) -> Vec<FaultEvent> {
        self.coils
            .iter()
            .flat_map(|c| c.fault_events.iter().cloned())
            .collect()
    }
}

fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn truncated_normal(rng: &mut ChaCha8Rng, sd: f64, range: (f64, f64)) -> f64 {
    if sd == 0.0 {
        return range.0.max(0.0).min(range.1);
    }
    let dist = Normal::new(0.0, sd).expect("valid sd");
    for _ in 0..10_000 {
        let v = dist.sample(rng);
        if v >= range.0 && v <= range.1 {
            return v;
        }
    }
    // fall back to the nearest bound; only reachable with an extreme range
    range.0
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

struct CoilPlan {
    coil_id: CoilId,
    heat_id: HeatId,
    base: f64,
    second_factor: f64,
    len: usize,
    drift_phase: f64,
    start_time: f64,
    is_testcoil: bool,
}

/// Generates the full production run: coils, tensile samples, fault log and
/// per-measurement ground truth. Identical config and seed give identical
/// output.
pub fn generate(config: &GeneratorConfig) -> Result<GeneratedData> {
    config.validate()?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    // heat-level hardness means
    let n_heats = config.n_coils.div_ceil(config.coils_per_heat);
    let mut heat_base = Vec::with_capacity(n_heats);
    for heat in 0..n_heats {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 10_000 + heat as u64));
        heat_base.push(truncated_normal(
            &mut rng,
            config.heat_mean_sd,
            config.heat_mean_range,
        ));
    }

    // lay out coils on the shared production clock
    let mut plans = Vec::new();
    let mut clock = 0.0;
    for i in 0..config.n_coils {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 20_000 + i as u64));
        let heat = i / config.coils_per_heat;
        let elevated = i >= config.n_coils - config.n_elevated_coils;
        let base = if elevated {
            config.elevated_offset + config.elevated_jitter_sd * normal.sample(&mut rng)
        } else {
            heat_base[heat] + config.coil_jitter_sd * normal.sample(&mut rng)
        };
        let len = rng.random_range(config.min_measurements..=config.max_measurements);
        let drift_phase = rng.random_range(0.0..(2.0 * PI));
        let second_factor = match config.latent {
            LatentModel::OneFactor => 0.0,
            LatentModel::TwoFactor { amplitude } => amplitude * normal.sample(&mut rng),
        };
        plans.push(CoilPlan {
            coil_id: CoilId::new(format!("C{:03}", i + 1)),
            heat_id: HeatId(format!("H{:03}", heat + 1)),
            base,
            second_factor,
            len,
            drift_phase,
            start_time: clock,
            is_testcoil: false,
        });
        clock += len as f64 * config.sampling_interval_s + config.coil_gap_s;
    }
    if config.testcoil.enabled {
        plans.push(CoilPlan {
            coil_id: CoilId::new("TESTCOIL".to_string()),
            heat_id: HeatId("H-TEST".to_string()),
            base: config.testcoil.base_level,
            second_factor: 0.0,
            len: config.testcoil.measurements,
            drift_phase: 0.0,
            start_time: clock,
            is_testcoil: true,
        });
    }

    let mut coils = Vec::with_capacity(plans.len());
    let mut ground_truth = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 50_000 + i as u64));
        let coil = generate_coil(config, plan, &mut rng, &normal, &mut ground_truth)?;
        coils.push(coil);
    }

    Ok(GeneratedData {
        coils,
        ground_truth,
        usl_t1: config.usl_t1,
        usl_t2: config.usl_t2,
    })
}

fn hardness_at(config: &GeneratorConfig, plan: &CoilPlan, position: usize) -> f64 {
    if plan.is_testcoil {
        let t = &config.testcoil;
        let center = t.transition_center_frac * plan.len as f64;
        let width = t.transition_width_frac * plan.len as f64;
        plan.base + t.transition_delta * logistic((position as f64 - center) / width)
    } else {
        plan.base
            + config.drift_amplitude
                * (2.0 * PI * position as f64 / plan.len as f64 + plan.drift_phase).sin()
    }
}

fn generate_coil(
    config: &GeneratorConfig,
    plan: &CoilPlan,
    rng: &mut ChaCha8Rng,
    normal: &Normal<f64>,
    ground_truth: &mut Vec<GroundTruthRow>,
) -> Result<Coil> {
    let mut coil = Coil::new(plan.coil_id.clone());
    coil.heat_id = Some(plan.heat_id.clone());

    // second-factor loadings: alternating pattern, linearly independent of
    // the gain vector
    let second_loading = |j: usize| if j.is_multiple_of(2) { 0.8 } else { -0.4 };

    let mut true_t1 = Vec::with_capacity(plan.len);
    for p in 0..plan.len {
        let h = hardness_at(config, plan, p);
        let g = plan.second_factor;
        let mut values = [0.0; SENSOR_DIM];
        for (j, value) in values.iter_mut().enumerate() {
            *value = config.sensor_baseline[j] - config.sensor_gain[j] * h
                + second_loading(j) * g
                + config.sensor_noise_sd[j] * normal.sample(rng);
        }
        let t1 = config.target_coeff_t1 * h + 0.8 * g
            + config.target_noise_sd * normal.sample(rng);
        let t2 = config.target_coeff_t2 * h - 0.8 * g
            + config.target_noise_sd * normal.sample(rng);
        coil.measurements.push(SensorMeasurement {
            timestamp: plan.start_time + p as f64 * config.sampling_interval_s,
            coil_id: plan.coil_id.clone(),
            position_index: p,
            values,
        });
        ground_truth.push(GroundTruthRow {
            coil_id: plan.coil_id.clone(),
            position_index: p,
            h,
            t1,
            t2,
        });
        true_t1.push(t1);
    }

    // destructive tensile samples
    let emit_sample = |position: usize, replicates: u32, rng: &mut ChaCha8Rng| {
        let h = hardness_at(config, plan, position);
        let g = plan.second_factor;
        let mut sum1 = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..replicates {
            sum1 += config.target_coeff_t1 * h + 0.8 * g
                + config.target_noise_sd * normal.sample(rng);
            sum2 += config.target_coeff_t2 * h - 0.8 * g
                + config.target_noise_sd * normal.sample(rng);
        }
        TensileSample {
            coil_id: plan.coil_id.clone(),
            position_index: position,
            t1: sum1 / replicates as f64,
            t2: sum2 / replicates as f64,
            replicate_count: replicates,
        }
    };

    if plan.is_testcoil {
        let t = &config.testcoil;
        for s in 0..t.sample_locations {
            let frac = (s as f64 + 0.5) / t.sample_locations as f64;
            let position = ((plan.len as f64 * frac) as usize).min(plan.len - 1);
            let sample = emit_sample(position, t.replicates_per_location, rng);
            coil.tensile_samples.push(sample);
        }
    } else {
        let sample = emit_sample(0, config.production_replicates, rng);
        coil.tensile_samples.push(sample);
    }

    // fault hazard; the testcoil was rejected from production and never ran
    // through the press, so it logs no faults
    if !plan.is_testcoil && config.hazard_max > 0.0 {
        for (p, t1) in true_t1.iter().enumerate() {
            let hazard =
                config.hazard_max * logistic(config.hazard_steepness * (t1 - config.usl_t1));
            let draw: f64 = rng.random_range(0.0..1.0);
            if draw < hazard {
                let kind: f64 = rng.random_range(0.0..1.0);
                let reference = if kind < config.hour_link_fraction {
                    FaultRef::Hour(coil.measurements[p].hour())
                } else {
                    FaultRef::Measurement(p)
                };
                coil.fault_events.push(FaultEvent {
                    coil_id: plan.coil_id.clone(),
                    reference,
                });
            }
        }
    }

    Ok(coil)
}

// ---------------------------------------------------------------------------
// Modified-material groups (controlled experiment)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedGroups {
    pub hard: ndarray::Array2<f64>,
    pub soft: ndarray::Array2<f64>,
    pub reference: ndarray::Array2<f64>,
}

/// Generates the three measurement groups of the controlled experiment:
/// strips modified to be harder and softer, plus unmodified reference
/// strips. Rows are ordered strip-major, then location, then measurement.
pub fn generate_modified_groups(config: &GeneratorConfig) -> Result<ModifiedGroups> {
    config.validate()?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let g = &config.modified_groups;
    let rows_per_group = g.strips_per_group * g.locations_per_strip * g.measurements_per_location;

    let make_group = |group_idx: usize, offset: f64| {
        let mut out = ndarray::Array2::zeros((rows_per_group, SENSOR_DIM));
        let mut row = 0;
        for strip in 0..g.strips_per_group {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                config.seed,
                40_000 + (group_idx * 100 + strip) as u64,
            ));
            let failed = g.include_failed_modification
                && group_idx == 0
                && strip == g.strips_per_group - 1;
            // a failed modification leaves the strip at reference hardness
            let strip_offset = if failed { 0.0 } else { offset };
            let strip_h = strip_offset + g.strip_jitter_sd * normal.sample(&mut rng);
            for _location in 0..g.locations_per_strip {
                let loc_h = strip_h + g.location_jitter_sd * normal.sample(&mut rng);
                for _m in 0..g.measurements_per_location {
                    for j in 0..SENSOR_DIM {
                        out[[row, j]] = config.sensor_baseline[j]
                            - config.sensor_gain[j] * loc_h
                            + config.sensor_noise_sd[j] * normal.sample(&mut rng);
                    }
                    row += 1;
                }
            }
        }
        out
    };

    // group 0 = hard (higher hardness, lower readings), 1 = soft, 2 = reference
    let hard = make_group(0, g.group_offset);
    let soft = make_group(1, -g.group_offset);
    let reference = make_group(2, 0.0);
    Ok(ModifiedGroups {
        hard,
        soft,
        reference,
    })
}

// ---------------------------------------------------------------------------
// Ground-truth sidecar file
// ---------------------------------------------------------------------------

pub fn write_ground_truth(writer: impl Write, rows: &[GroundTruthRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["coil_id", "position_index", "h", "t1", "t2"])?;
    for r in rows {
        wtr.write_record(&[
            r.coil_id.as_str().to_string(),
            r.position_index.to_string(),
            format_f64(r.h),
            format_f64(r.t1),
            format_f64(r.t2),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn parse_ground_truth(reader: impl Read) -> Result<Vec<GroundTruthRow>> {
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
        out.push(GroundTruthRow {
            coil_id: CoilId::new(record[0].to_string()),
            position_index: record[1]
                .parse()
                .map_err(|e| parse_err(format!("bad position_index: {e}")))?,
            h: record[2]
                .parse()
                .map_err(|e| parse_err(format!("bad h: {e}")))?,
            t1: record[3]
                .parse()
                .map_err(|e| parse_err(format!("bad t1: {e}")))?,
            t2: record[4]
                .parse()
                .map_err(|e| parse_err(format!("bad t2: {e}")))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_labeled_dataset, AggregationPolicy};
    use crate::evaluation::pls_loco_cv;
    use crate::models::{pca_fit, pls_fit};
    use crate::preprocess::{fit_reference_normalization, noise_ranking, Standardizer};
    use approx::assert_abs_diff_eq;
    use ndarray::{Array2, Axis};

    fn noiseless_config() -> GeneratorConfig {
        let mut c = GeneratorConfig::default();
        c.n_coils = 6;
        c.n_elevated_coils = 0;
        c.min_measurements = 250;
        c.max_measurements = 400;
        c.sensor_noise_sd = [0.0; SENSOR_DIM];
        c.target_noise_sd = 0.0;
        c.drift_amplitude = 0.0;
        c.hazard_max = 0.0;
        c.testcoil.enabled = false;
        c
    }

    #[test]
    fn zero_noise_data_is_exactly_rank_one() {
        let data = generate(&noiseless_config()).unwrap();
        let (ds, warnings) =
            build_labeled_dataset(&data.coils, &AggregationPolicy::auto()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(ds.n(), 6);

        let pca = pca_fit(&ds.x, 2, true).unwrap();
        assert!(pca.explained_variance_ratio[0] > 1.0 - 1e-9);

        let cv = pls_loco_cv(&ds, 1).unwrap();
        assert!(cv.mean_rmse[0] < 1e-6, "t1 rmse {}", cv.mean_rmse[0]);
        assert!(cv.mean_rmse[1] < 1e-6, "t2 rmse {}", cv.mean_rmse[1]);
    }

    #[test]
    fn zero_hazard_produces_no_faults() {
        let mut c = GeneratorConfig::default();
        c.hazard_max = 0.0;
        c.n_coils = 5;
        c.min_measurements = 300;
        c.max_measurements = 500;
        c.testcoil.enabled = false;
        let data = generate(&c).unwrap();
        assert!(data.fault_events().is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let mut c = GeneratorConfig::default();
        c.n_coils = 4;
        c.min_measurements = 300;
        c.max_measurements = 500;
        c.testcoil.measurements = 4500;
        let a = generate(&c).unwrap();
        let b = generate(&c).unwrap();
        assert_eq!(a, b);

        c.seed += 1;
        let other = generate(&c).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn default_calibration_matches_expected_structure() {
        let data = generate(&GeneratorConfig::default()).unwrap();
        assert_eq!(data.coils.len(), 41); // 40 production + testcoil

        // pooled raw measurements: one dominant component
        let n_rows: usize = data.coils.iter().map(|c| c.len()).sum();
        let mut x = Array2::zeros((n_rows, SENSOR_DIM));
        let mut row = 0;
        for coil in &data.coils {
            for m in &coil.measurements {
                for j in 0..SENSOR_DIM {
                    x[[row, j]] = m.values[j];
                }
                row += 1;
            }
        }
        let pca = pca_fit(&x, 2, true).unwrap();
        assert!(
            pca.explained_variance_ratio[0] >= 0.80,
            "first component explains {}",
            pca.explained_variance_ratio[0]
        );

        // noisy variables 3, 4, 11 rank in the top quartile
        let testcoil = data.coils.last().unwrap();
        assert_eq!(testcoil.coil_id.as_str(), "TESTCOIL");
        let ranking = noise_ranking(testcoil, 2000..4000, 50).unwrap();
        let ranked = ranking.ranked_variables();
        let top5: Vec<usize> = ranked[..5].to_vec();
        for sv_index in [2usize, 3, 10] {
            assert!(
                top5.contains(&sv_index),
                "sv{} not in top quartile: {:?}",
                sv_index + 1,
                &ranked[..5]
            );
        }
    }

    #[test]
    fn ground_truth_tracks_first_pls_component() {
        let mut c = GeneratorConfig::default();
        c.n_coils = 12;
        c.n_elevated_coils = 1;
        c.min_measurements = 400;
        c.max_measurements = 800;
        c.testcoil.measurements = 4200;
        let data = generate(&c).unwrap();
        let (ds, _) = build_labeled_dataset(&data.coils, &AggregationPolicy::auto()).unwrap();
        let model = pls_fit(&ds.x, &ds.y, 1).unwrap();

        // first-component scores of every measurement vs the latent truth
        let n_rows: usize = data.coils.iter().map(|c| c.len()).sum();
        let mut x = Array2::zeros((n_rows, SENSOR_DIM));
        let mut row = 0;
        for coil in &data.coils {
            for m in &coil.measurements {
                for j in 0..SENSOR_DIM {
                    x[[row, j]] = m.values[j];
                }
                row += 1;
            }
        }
        let scores = model.transform(&x).unwrap();
        let score_col: Vec<f64> = scores.column(0).to_vec();
        for target in 0..2 {
            let truth: Vec<f64> = data
                .ground_truth
                .iter()
                .map(|r| if target == 0 { r.t1 } else { r.t2 })
                .collect();
            let rho = crate::models::pearson_correlation(&score_col, &truth).unwrap();
            assert!(rho.abs() >= 0.9, "t{} |rho| = {}", target + 1, rho.abs());
        }
    }

    #[test]
    fn testcoil_samples_sit_on_both_plateaus() {
        let data = generate(&GeneratorConfig::default()).unwrap();
        let testcoil = data.coils.last().unwrap();
        assert_eq!(testcoil.tensile_samples.len(), 9);
        let below: Vec<&TensileSample> = testcoil
            .tensile_samples
            .iter()
            .filter(|s| s.t1 < data.usl_t1)
            .collect();
        let above: Vec<&TensileSample> = testcoil
            .tensile_samples
            .iter()
            .filter(|s| s.t1 > data.usl_t1)
            .collect();
        assert!(below.len() >= 3, "no in-spec plateau samples");
        assert!(above.len() >= 4, "no out-of-spec plateau samples");
        // samples stay well clear of the limit: at least half a target-sd
        for s in &testcoil.tensile_samples {
            assert!(
                (s.t1 - data.usl_t1).abs() > 0.25,
                "sample at {} hugs the USL {}",
                s.t1,
                data.usl_t1
            );
        }
    }

    #[test]
    fn modified_groups_normalize_and_separate() {
        let mut c = GeneratorConfig::default();
        c.modified_groups.measurements_per_location = 50;
        let groups = generate_modified_groups(&c).unwrap();
        assert_eq!(groups.hard.nrows(), 3 * 3 * 50);

        let norm = fit_reference_normalization(
            groups.hard.view(),
            groups.soft.view(),
            groups.reference.view(),
        )
        .unwrap();
        // the raw reference mean maps to the zero vector
        let ref_mean = groups.reference.mean_axis(Axis(0)).unwrap();
        let mapped = norm.apply(ref_mean.view()).unwrap();
        for v in mapped.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }

        // PCA on the standardized pooled groups separates them on PC1
        let pooled = ndarray::concatenate(
            Axis(0),
            &[groups.hard.view(), groups.soft.view(), groups.reference.view()],
        )
        .unwrap();
        let std = Standardizer::fit(pooled.view()).unwrap();
        let z = std.apply(pooled.view()).unwrap();
        let pca = pca_fit(&z, 1, false).unwrap();
        let scores = crate::models::pca_project(&pca, &z).unwrap();
        let n = groups.hard.nrows();
        let labels: Vec<usize> = (0..3 * n).map(|i| i / n).collect();
        let score_col: Vec<f64> = scores.column(0).to_vec();
        let sil = silhouette_1d(&score_col, &labels);
        assert!(sil > 0.5, "silhouette {sil}");
    }

    #[test]
    fn failed_modification_strip_clusters_with_reference() {
        let mut c = GeneratorConfig::default();
        c.modified_groups.measurements_per_location = 50;
        c.modified_groups.include_failed_modification = true;
        let groups = generate_modified_groups(&c).unwrap();

        let pooled = ndarray::concatenate(
            Axis(0),
            &[groups.hard.view(), groups.soft.view(), groups.reference.view()],
        )
        .unwrap();
        let std = Standardizer::fit(pooled.view()).unwrap();
        let z = std.apply(pooled.view()).unwrap();
        let pca = pca_fit(&z, 1, false).unwrap();
        let scores = crate::models::pca_project(&pca, &z).unwrap();
        let score_col: Vec<f64> = scores.column(0).to_vec();

        let rows_per_strip = 3 * 50;
        let n_group = 3 * rows_per_strip;
        let mean = |range: std::ops::Range<usize>| {
            score_col[range.clone()].iter().sum::<f64>() / range.len() as f64
        };
        let failed_strip = mean(2 * rows_per_strip..3 * rows_per_strip); // last hard strip
        let true_hard = mean(0..2 * rows_per_strip);
        let reference = mean(2 * n_group..3 * n_group);
        assert!(
            (failed_strip - reference).abs() < (failed_strip - true_hard).abs(),
            "failed strip at {failed_strip}, hard at {true_hard}, reference at {reference}"
        );
    }

    fn silhouette_1d(values: &[f64], labels: &[usize]) -> f64 {
        let k = labels.iter().max().unwrap() + 1;
        let mut total = 0.0;
        for i in 0..values.len() {
            let mut sums = vec![0.0; k];
            let mut counts = vec![0usize; k];
            for j in 0..values.len() {
                if i != j {
                    sums[labels[j]] += (values[i] - values[j]).abs();
                    counts[labels[j]] += 1;
                }
            }
            let a = sums[labels[i]] / counts[labels[i]] as f64;
            let b = (0..k)
                .filter(|&c| c != labels[i])
                .map(|c| sums[c] / counts[c] as f64)
                .fold(f64::INFINITY, f64::min);
            total += (b - a) / a.max(b);
        }
        total / values.len() as f64
    }

    #[test]
    fn ground_truth_file_round_trips() {
        let rows = vec![
            GroundTruthRow {
                coil_id: CoilId::from("C001"),
                position_index: 0,
                h: 0.5,
                t1: 0.55,
                t2: 0.45,
            },
            GroundTruthRow {
                coil_id: CoilId::from("C001"),
                position_index: 1,
                h: -0.25,
                t1: -0.2,
                t2: -0.3,
            },
        ];
        let mut buf = Vec::new();
        write_ground_truth(&mut buf, &rows).unwrap();
        let back = parse_ground_truth(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut c = GeneratorConfig::default();
        c.n_coils = 0;
        assert!(generate(&c).is_err());

        let mut c = GeneratorConfig::default();
        c.sensor_gain[3] = 0.0;
        assert!(generate(&c).is_err());

        let mut c = GeneratorConfig::default();
        c.hazard_max = 1.5;
        assert!(generate(&c).is_err());
    }
}
