//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Omitted keys take their
//! reference defaults. `sweep.<key> = v1, v2, ...` declares a sweep axis.

use std::fmt::Write as _;

use crate::error::{ConfigError, ParamError};
use crate::forcing::ForcingParams;
use crate::geometry::StenosisShape;
use crate::params::{DimensionlessParams, NumericalParams};
use crate::solver::stability_limit;

/// Every accepted key with its default, in echo order.
pub const KEYS: &[(&str, f64)] = &[
    ("L", 5.0),
    ("d", 2.0),
    ("l0", 1.0),
    ("delta", 0.25),
    ("Rbar", 1.0),
    ("Kr", 0.05),
    ("phi_r", 0.0),
    ("a0", 1.0),
    ("b", 1.0),
    ("phi_g", 0.0),
    ("Kbar", 7.30),
    ("Kp", 1.46),
    ("f_p", 1.2),
    ("K", 0.1),
    ("J", 0.1),
    ("m", 0.1),
    ("alpha", 3.0),
    ("H", 2.0),
    ("Ec", 0.0002),
    ("Pr", 21.0),
    ("dxi", 0.025),
    ("dz", 0.05),
    ("dt", 0.001),
    ("warmup_periods", 3.0),
    ("measure_periods", 1.0),
    ("cadence", 10.0),
];

const INTEGER_KEYS: &[&str] = &["warmup_periods", "measure_periods", "cadence"];
const SWEEP_PREFIX: &str = "sweep.";

/// `(key, value)` pairs that define one sweep point.
pub type Assignments = Vec<(String, f64)>;

fn key_index(key: &str) -> Option<usize> {
    KEYS.iter().position(|(k, _)| *k == key)
}

/// One swept key and its values, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<f64>,
}

/// A fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: Vec<f64>,
    pub params: DimensionlessParams,
    pub numerics: NumericalParams,
    /// Steps between stored time-series samples.
    pub cadence: u64,
    pub sweep: Vec<SweepAxis>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let values = KEYS.iter().map(|(_, v)| *v).collect();
        Self::from_values(values, Vec::new()).expect("defaults are valid")
    }
}

impl RunConfig {
    /// Current value of `key`.
    pub fn get(&self, key: &str) -> Option<f64> {
        key_index(key).map(|i| self.values[i])
    }

    /// Copy with `key` replaced and the result revalidated. Sweep axes are
    /// kept.
    pub fn with(&self, key: &str, value: f64) -> Result<Self, ConfigError> {
        let idx = key_index(key).ok_or_else(|| ConfigError::UnknownKey {
            line: 0,
            key: key.to_string(),
        })?;
        let mut values = self.values.clone();
        values[idx] = value;
        Self::from_values(values, self.sweep.clone())
    }

    /// The same configuration without sweep axes.
    pub fn without_sweep(&self) -> Self {
        Self {
            sweep: Vec::new(),
            ..self.clone()
        }
    }

    /// Cartesian product of the sweep axes, first axis slowest. Each entry
    /// lists the `(key, value)` assignments and the resulting single-run
    /// configuration.
    pub fn sweep_points(&self) -> Result<Vec<(Assignments, RunConfig)>, ConfigError> {
        let mut points: Vec<Assignments> = vec![Vec::new()];
        for axis in &self.sweep {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push((axis.key.clone(), v));
                        next
                    })
                })
                .collect();
        }
        points
            .into_iter()
            .map(|assign| {
                let mut cfg = self.without_sweep();
                for (k, v) in &assign {
                    cfg = cfg.with(k, *v).map_err(|e| match e {
                        ConfigError::Invalid(source) => ConfigError::InvalidPoint {
                            point: describe(&assign),
                            source,
                        },
                        other => other,
                    })?;
                }
                Ok((assign, cfg))
            })
            .collect()
    }

    fn from_values(values: Vec<f64>, sweep: Vec<SweepAxis>) -> Result<Self, ConfigError> {
        let v = |k: &str| values[key_index(k).expect("known key")];
        for key in INTEGER_KEYS {
            let x = v(key);
            if !(x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64) {
                return Err(ParamError::OutOfRange {
                    name: KEYS[key_index(key).expect("known key")].0,
                    requirement: "a non-negative integer",
                    value: x,
                }
                .into());
            }
        }
        if v("measure_periods") < 1.0 {
            return Err(ParamError::OutOfRange {
                name: "measure_periods",
                requirement: "≥ 1",
                value: v("measure_periods"),
            }
            .into());
        }
        if v("cadence") < 1.0 {
            return Err(ParamError::OutOfRange {
                name: "cadence",
                requirement: "≥ 1",
                value: v("cadence"),
            }
            .into());
        }
        let params = DimensionlessParams {
            viscosity_ratio: v("K"),
            material_constant: v("m"),
            gyration: v("J"),
            womersley: v("alpha"),
            hartmann: v("H"),
            prandtl: v("Pr"),
            eckert: v("Ec"),
            pulse_frequency: v("f_p"),
            shape: StenosisShape {
                mean_radius: v("Rbar"),
                depth: v("delta"),
                offset: v("d"),
                length: v("l0"),
                wall_amplitude: v("Kr"),
                wall_phase: v("phi_r"),
                tube_length: v("L"),
            },
            forcing: ForcingParams {
                body_amplitude: v("a0"),
                body_frequency: v("b"),
                body_phase: v("phi_g"),
                mean_gradient: v("Kbar"),
                pulsatile_gradient: v("Kp"),
            },
        };
        params.validate()?;
        let mut numerics = NumericalParams::new(v("L"), v("dz"), v("dxi"), v("dt"))?;
        numerics.warmup_periods = v("warmup_periods") as u32;
        numerics.measure_periods = v("measure_periods") as u32;
        let limit = stability_limit(&params, &numerics);
        if numerics.dt > limit {
            return Err(ParamError::Unstable { dt: numerics.dt, limit }.into());
        }
        let cfg = Self {
            params,
            numerics,
            cadence: v("cadence") as u64,
            sweep,
            values,
        };
        // Every sweep point must be valid on its own.
        if !cfg.sweep.is_empty() {
            cfg.sweep_points()?;
        }
        Ok(cfg)
    }

    /// Fully resolved text form; [`parse_config`] reproduces `self` from it.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for ((key, _), value) in KEYS.iter().zip(&self.values) {
            let _ = writeln!(out, "{key} = {value}");
        }
        for axis in &self.sweep {
            let list: Vec<String> = axis.values.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{SWEEP_PREFIX}{} = {}", axis.key, list.join(", "));
        }
        out
    }
}

fn describe(assign: &[(String, f64)]) -> String {
    assign
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_number(line: usize, key: &str, text: &str) -> Result<f64, ConfigError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::BadNumber {
            line,
            key: key.to_string(),
            value: text.to_string(),
        }),
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut values: Vec<f64> = KEYS.iter().map(|(_, v)| *v).collect();
    let mut seen = vec![false; KEYS.len()];
    let mut sweep: Vec<SweepAxis> = Vec::new();
    let mut sweep_seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "missing key before `=`".into(),
            });
        }
        if let Some(target) = key.strip_prefix(SWEEP_PREFIX) {
            if key_index(target).is_none() {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if sweep_seen.iter().any(|k| k == target) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            sweep_seen.push(target.to_string());
            let list = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_number(line, key, s))
                .collect::<Result<Vec<_>, _>>()?;
            if !list.is_empty() {
                sweep.push(SweepAxis {
                    key: target.to_string(),
                    values: list,
                });
            }
            continue;
        }
        let i = key_index(key).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: key.to_string(),
        })?;
        if seen[i] {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen[i] = true;
        values[i] = parse_number(line, key, value)?;
    }
    RunConfig::from_values(values, sweep)
}
