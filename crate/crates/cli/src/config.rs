use std::fmt;
use std::path::PathBuf;

use kppwaves::connect::ShootOptions;
use kppwaves::model::{nondimensionalize, CanonicalModel, GeneralModel, ScalingMap};
use kppwaves::ode::Tolerances;
use kppwaves::Error;
use serde::{Deserialize, Serialize};

/// Parameters of the equation. When any of `kappa`, `alpha`, `beta` is given the
/// model is the general one (missing coefficients default to 1) and every speed
/// in the config is read in its units; otherwise the model is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub m: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    pub n: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            x_min: None,
            x_max: None,
            n: 4000,
            cfl: 0.4,
            t_end: 5.0,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl SweepConfig {
    pub fn speeds(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub speeds: Vec<f64>,
    #[serde(default)]
    pub ode_tolerances: Tolerances,
    #[serde(default = "default_seed_eps")]
    pub seed_eps: f64,
    #[serde(default)]
    pub pde: PdeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_seed_eps() -> f64 {
    ShootOptions::default().eps
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A config rejected before any computation, with the path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

fn reject(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

/// The model resolved to canonical form together with the map back to the
/// units of the config.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub canonical: CanonicalModel,
    pub scaling: Option<ScalingMap>,
}

impl Resolved {
    /// Speed in canonical units.
    pub fn canonical_speed(&self, c: f64) -> f64 {
        self.scaling.map_or(c, |s| c * s.b / s.a)
    }
}

impl RunConfig {
    pub fn is_general(&self) -> bool {
        let m = &self.model;
        m.kappa.is_some() || m.alpha.is_some() || m.beta.is_some()
    }

    /// Checks every field against the preconditions of the module that consumes
    /// it. Hypotheses of the existence theorem are not checked here; they are
    /// reported by the subcommands with the failed hypothesis named.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |field: String, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(reject(field, format!("must be finite, got {v}")))
            }
        };
        let m = &self.model;
        for (name, v) in [("m", m.m), ("p", m.p), ("q", m.q)] {
            finite(format!("model.{name}"), v)?;
        }
        if m.m <= 0.0 {
            return Err(reject("model.m", format!("must be positive, got {}", m.m)));
        }
        for (name, v) in [("kappa", m.kappa), ("alpha", m.alpha), ("beta", m.beta)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(reject(format!("model.{name}"), format!("must be positive and finite, got {v}")));
                }
            }
        }
        for (i, &c) in self.speeds.iter().enumerate() {
            finite(format!("speeds[{i}]"), c)?;
        }
        for (name, v) in [("abs", self.ode_tolerances.abs), ("rel", self.ode_tolerances.rel)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(reject(format!("ode_tolerances.{name}"), format!("must lie in (0, 1), got {v}")));
            }
        }
        if !(self.seed_eps.is_finite() && self.seed_eps > 0.0 && self.seed_eps < 0.1) {
            return Err(reject("seed_eps", format!("must lie in (0, 0.1), got {}", self.seed_eps)));
        }
        let pde = &self.pde;
        if pde.n < 3 {
            return Err(reject("pde.n", format!("needs at least 3 cells, got {}", pde.n)));
        }
        if !(pde.cfl > 0.0 && pde.cfl <= 0.9) {
            return Err(reject("pde.cfl", format!("must lie in (0, 0.9], got {}", pde.cfl)));
        }
        if !(pde.t_end.is_finite() && pde.t_end >= 0.0) {
            return Err(reject("pde.t_end", format!("must be finite and non-negative, got {}", pde.t_end)));
        }
        for (i, &t) in pde.snapshot_times.iter().enumerate() {
            if !(t >= 0.0 && t <= pde.t_end) {
                return Err(reject(format!("pde.snapshot_times[{i}]"), format!("must lie in [0, t_end], got {t}")));
            }
        }
        match (pde.x_min, pde.x_max) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                finite("pde.x_min".into(), lo)?;
                finite("pde.x_max".into(), hi)?;
                if lo >= hi {
                    return Err(reject("pde.x_max", format!("must exceed x_min = {lo}, got {hi}")));
                }
            }
            (Some(_), None) => return Err(reject("pde.x_max", "required when x_min is given")),
            (None, Some(_)) => return Err(reject("pde.x_min", "required when x_max is given")),
        }
        if let Some(s) = &self.sweep {
            finite("sweep.from".into(), s.from)?;
            finite("sweep.to".into(), s.to)?;
            if !(s.step.is_finite() && s.step > 0.0) {
                return Err(reject("sweep.step", format!("must be positive, got {}", s.step)));
            }
            if s.to < s.from {
                return Err(reject("sweep.to", format!("must not be below from = {}, got {}", s.from, s.to)));
            }
            if (s.to - s.from) / s.step > 1e6 {
                return Err(reject("sweep.step", "grid would exceed a million points"));
            }
        }
        Ok(())
    }

    /// Canonical model and scaling. Fails with the library error when the
    /// general coefficients admit no scaling (`p = q`).
    pub fn resolve(&self) -> Result<Resolved, Error> {
        let m = &self.model;
        if self.is_general() {
            let g = GeneralModel {
                kappa: m.kappa.unwrap_or(1.0),
                alpha: m.alpha.unwrap_or(1.0),
                beta: m.beta.unwrap_or(1.0),
                m: m.m,
                p: m.p,
                q: m.q,
            };
            let (canonical, scaling) = nondimensionalize(&g)?;
            Ok(Resolved {
                canonical,
                scaling: Some(scaling),
            })
        } else {
            Ok(Resolved {
                canonical: CanonicalModel::new(m.m, m.p, m.q)?,
                scaling: None,
            })
        }
    }

    pub fn shoot_options(&self) -> ShootOptions {
        ShootOptions {
            eps: self.seed_eps,
            tolerances: self.ode_tolerances,
            ..ShootOptions::default()
        }
    }

    /// Speeds of the sweep grid, or the listed speeds when no grid is configured.
    pub fn sweep_speeds(&self) -> Vec<f64> {
        self.sweep.map_or_else(|| self.speeds.clone(), |s| s.speeds())
    }
}
