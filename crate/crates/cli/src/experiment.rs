//! Resolving a configuration into curves and running them.

use std::time::Instant;

use fdssk_core::analytic::{abep, outage_asymptotic, outage_closed, pep_asymptotic, throughput_closed, PepMethod};
use fdssk_core::analytic::CLT_MIN_ELEMENTS;
use fdssk_core::{run_ber, run_outage, run_throughput, SystemParams, TrialPlan};
use serde::{Deserialize, Serialize};

use crate::config::{validate_grid, ExperimentConfig, Method, Metric};
use crate::error::{CliError, Result};
use crate::presets::{self, SeriesSpec, DEFAULT_TRIALS};

/// Simulation is skipped below this analytic probability; the row is emitted without a value.
pub const DEEP_TAIL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    /// `None` for points not evaluated (deep tail, no error floor).
    pub value: Option<f64>,
    /// Zero for closed-form values.
    pub std_error: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSeries {
    pub label: String,
    pub metric: Metric,
    pub methods: Vec<Method>,
    pub gcq_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gcq_difference_from: Option<usize>,
    pub params: SystemParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub preset: Option<String>,
    pub description: String,
    pub master_seed: u64,
    pub seed_scheme: String,
    pub trials_per_point: u64,
    pub snr_grid_db: Vec<f64>,
    pub deep_tail_threshold: f64,
    pub series: Vec<ManifestSeries>,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
}

/// A configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub preset: Option<String>,
    pub description: String,
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub series: Vec<SeriesSpec>,
    pub assumptions: Vec<String>,
}

pub fn resolve(config: &ExperimentConfig) -> Result<Resolved> {
    config.validate()?;
    let (preset, description, grid, mut series, assumptions) = match &config.preset {
        Some(name) => {
            let p = presets::preset(name).ok_or_else(|| {
                CliError::config(format!("unknown preset '{name}' (known: {})", presets::PRESET_NAMES.join(", ")))
            })?;
            if config.metric.is_some() {
                return Err(CliError::config("metric is fixed by the preset"));
            }
            let mut series = p.series;
            for s in &mut series {
                s.params = config.overrides.apply(s.params)?;
            }
            (Some(p.name.to_string()), p.description.to_string(), p.snr_grid_db, series, p.assumptions)
        }
        None => {
            let params = config.overrides.to_params()?;
            let metric = config.metric.unwrap_or(Metric::Abep);
            let grid = config
                .snr_grid_db
                .clone()
                .ok_or_else(|| CliError::config("snr_grid_db is required without a preset"))?;
            let label = config.label.clone().unwrap_or_else(|| format!("N={}", params.n_elements));
            let spec = SeriesSpec {
                label,
                params,
                metric,
                methods: vec![Method::Sim, Method::Exact],
                gcq_order: fdssk_core::specfun::GcqRule::DEFAULT_ORDER,
                gcq_difference_from: None,
            };
            (None, "free-form sweep".to_string(), grid, vec![spec], Vec::new())
        }
    };
    let grid = config.snr_grid_db.clone().unwrap_or(grid);
    validate_grid(&grid)?;
    for s in &mut series {
        if let Some(methods) = &config.methods {
            s.methods = methods.clone();
        }
        if let Some(q) = config.gcq_order {
            if s.gcq_difference_from.is_none() {
                s.gcq_order = q;
            }
        }
        if let Some(m) = s.methods.iter().find(|m| !s.metric.supports(**m)) {
            return Err(CliError::config(format!("method '{}' does not apply to {:?}", m.name(), s.metric)));
        }
        s.params.validate()?;
    }
    Ok(Resolved {
        preset,
        description,
        snr_grid_db: grid,
        trials: config.trials.unwrap_or(DEFAULT_TRIALS),
        master_seed: config.master_seed.unwrap_or(DEFAULT_SEED),
        series,
        assumptions,
    })
}

/// Seed of the simulation at (series, grid point); independent of evaluation order.
pub fn point_seed(master: u64, series: usize, point: usize) -> u64 {
    let mut z = master ^ ((series as u64) << 32 | point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pep_method(method: Method, order: usize) -> PepMethod {
    match method {
        Method::Exact | Method::Sim => PepMethod::Exact,
        Method::Gcq => PepMethod::Gcq { order },
        Method::Upper => PepMethod::Upper,
        Method::Asymptotic => PepMethod::Asymptotic,
    }
}

fn closed_point(spec: &SeriesSpec, params: &SystemParams, method: Method) -> Result<Option<f64>> {
    let value = match spec.metric {
        Metric::Abep => {
            if method == Method::Asymptotic && pep_asymptotic(params)?.flag.is_some() {
                return Ok(None);
            }
            let v = abep(params, pep_method(method, spec.gcq_order))?;
            match spec.gcq_difference_from {
                Some(q) if method == Method::Gcq => (v - abep(params, PepMethod::Gcq { order: q })?).abs(),
                _ => v,
            }
        }
        Metric::Outage { rate_bps } => {
            let f = if method == Method::Asymptotic {
                outage_asymptotic(params, rate_bps)?
            } else {
                outage_closed(params, rate_bps)?
            };
            if method == Method::Asymptotic && f.flag.is_some() {
                return Ok(None);
            }
            f.value
        }
        Metric::Throughput => throughput_closed(params, pep_method(method, spec.gcq_order))?,
    };
    Ok(Some(value))
}

/// Returns (value, std_error); `None` in the deep tail.
fn sim_point(spec: &SeriesSpec, params: &SystemParams, plan: &TrialPlan) -> Result<(Option<f64>, f64)> {
    match spec.metric {
        Metric::Abep => {
            if abep(params, PepMethod::Exact)? < DEEP_TAIL {
                return Ok((None, 0.0));
            }
            let r = run_ber(params, plan)?;
            Ok((Some(r.estimate), r.std_error))
        }
        Metric::Outage { rate_bps } => {
            if outage_closed(params, rate_bps)?.value < DEEP_TAIL {
                return Ok((None, 0.0));
            }
            let r = run_outage(params, rate_bps, plan)?;
            Ok((Some(r.estimate), r.std_error))
        }
        Metric::Throughput => {
            let t = run_throughput(params, plan)?;
            Ok((Some(t.value), t.std_error))
        }
    }
}

pub struct ExperimentOutput {
    pub series: Vec<CurveSeries>,
    pub manifest: Manifest,
}

pub fn run_resolved(r: &Resolved) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(r.series.len());
    for (si, spec) in r.series.iter().enumerate() {
        let analytic = spec.methods.iter().any(|m| *m != Method::Sim);
        if analytic && spec.params.n_elements < CLT_MIN_ELEMENTS {
            warnings.push(format!(
                "series {:?}: N={} is below {CLT_MIN_ELEMENTS}; the CLT-based closed forms are unreliable here",
                spec.label, spec.params.n_elements
            ));
        }
        let mut points = Vec::new();
        for (pi, &snr_db) in r.snr_grid_db.iter().enumerate() {
            let params = spec.params.with_snr_db(snr_db);
            for &method in &spec.methods {
                let (value, std_error) = if method == Method::Sim {
                    let plan = TrialPlan::new(point_seed(r.master_seed, si, pi), r.trials);
                    sim_point(spec, &params, &plan)?
                } else {
                    (closed_point(spec, &params, method)?, 0.0)
                };
                points.push(CurvePoint {
                    snr_db,
                    value,
                    std_error,
                    method: method.name().to_string(),
                });
            }
        }
        out.push(CurveSeries {
            label: spec.label.clone(),
            points,
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        preset: r.preset.clone(),
        description: r.description.clone(),
        master_seed: r.master_seed,
        seed_scheme: "splitmix64(master ^ golden * (series << 32 | point)), ChaCha8 stream per trial".into(),
        trials_per_point: r.trials,
        snr_grid_db: r.snr_grid_db.clone(),
        deep_tail_threshold: DEEP_TAIL,
        series: r
            .series
            .iter()
            .map(|s| ManifestSeries {
                label: s.label.clone(),
                metric: s.metric,
                methods: s.methods.clone(),
                gcq_order: s.gcq_order,
                gcq_difference_from: s.gcq_difference_from,
                params: s.params,
            })
            .collect(),
        assumptions: r.assumptions.clone(),
        warnings,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(ExperimentOutput { series: out, manifest })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_resolved(&resolve(config)?)
}
