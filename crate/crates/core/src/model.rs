//! Model parameters, reduction to canonical form and the critical speed.
//!
//! The general equation `u_t = κ (u^{m-1} u_x)_x + α u^p − β u^q` is rescaled by
//! `x → a x`, `t → b t`, `u → l u` into the canonical equation
//! `u_t = (u^{m-1} u_x)_x + u^p − u^q`, which carries only the exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};

/// Coefficients and exponents of the general reaction-diffusion equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralModel {
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub p: f64,
    pub q: f64,
}

impl GeneralModel {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("m", self.m),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {value}"),
                });
            }
        }
        for (name, value) in [("p", self.p), ("q", self.q)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        if self.p == self.q {
            return Err(Error::DegenerateScale);
        }
        Ok(())
    }
}

/// Space, time and amplitude scales mapping the general equation onto the canonical one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    /// Space scale: `x_general = a · x_canonical`.
    pub a: f64,
    /// Time scale: `t_general = b · t_canonical`.
    pub b: f64,
    /// Amplitude scale: `u_general = l · u_canonical`.
    pub l: f64,
}

impl ScalingMap {
    pub fn from_model(g: &GeneralModel) -> Result<Self> {
        g.validate()?;
        let l = (g.beta / g.alpha).powf(1.0 / (g.p - g.q));
        let a = (g.kappa * l.powf(g.m - g.p) / g.alpha).sqrt();
        let b = l.powf(1.0 - g.p) / g.alpha;
        Ok(Self { a, b, l })
    }

    pub fn to_canonical(&self, x: f64, t: f64, u: f64) -> (f64, f64, f64) {
        (x / self.a, t / self.b, u / self.l)
    }

    pub fn to_general(&self, x: f64, t: f64, u: f64) -> (f64, f64, f64) {
        (x * self.a, t * self.b, u * self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `m + q > 2`.
    CaseI,
    /// `0 < m + q ≤ 2`.
    CaseII,
    Unsupported,
}

/// Exponent triple of the canonical equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalModel {
    pub m: f64,
    pub p: f64,
    pub q: f64,
    pub regime: Regime,
}

impl CanonicalModel {
    pub fn new(m: f64, p: f64, q: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("must be finite and positive, got {m}"),
            });
        }
        for (name, value) in [("p", p), ("q", q)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        let regime = if p <= q || m + q <= 0.0 {
            Regime::Unsupported
        } else if m + q > 2.0 {
            Regime::CaseI
        } else {
            Regime::CaseII
        };
        Ok(Self { m, p, q, regime })
    }

    /// `m + q`, the quantity that selects the phase-plane reduction.
    pub fn mq(&self) -> f64 {
        self.m + self.q
    }

    pub fn is_supported(&self) -> bool {
        self.regime != Regime::Unsupported
    }

    /// Checks both hypotheses and names the first one that fails.
    pub fn ensure_supported(&self) -> Result<()> {
        if self.p <= self.q {
            return Err(Error::Unsupported {
                hypothesis: Hypothesis::PGreaterThanQ,
                detail: format!("p = {}, q = {}", self.p, self.q),
            });
        }
        if self.m + self.q <= 0.0 {
            return Err(Error::Unsupported {
                hypothesis: Hypothesis::MPlusQPositive,
                detail: format!("m + q = {}", self.m + self.q),
            });
        }
        Ok(())
    }
}

pub fn nondimensionalize(g: &GeneralModel) -> Result<(CanonicalModel, ScalingMap)> {
    let scaling = ScalingMap::from_model(g)?;
    let canonical = CanonicalModel::new(g.m, g.p, g.q)?;
    Ok((canonical, scaling))
}

/// Threshold speed `|c*| = 2 √(p − q)` separating monotone from oscillatory waves.
pub fn critical_speed(cm: &CanonicalModel) -> Result<f64> {
    cm.ensure_supported()?;
    Ok(2.0 * (cm.p - cm.q).sqrt())
}

/// Wave class predicted from the speed alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpeedClass {
    NoWave,
    MonotoneWave,
    OscillatoryWave,
}

pub fn classify_speed(cm: &CanonicalModel, c: f64) -> Result<SpeedClass> {
    let c_star = critical_speed(cm)?;
    if !c.is_finite() {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("must be finite, got {c}"),
        });
    }
    Ok(if c >= 0.0 {
        SpeedClass::NoWave
    } else if c.abs() >= c_star {
        SpeedClass::MonotoneWave
    } else {
        SpeedClass::OscillatoryWave
    })
}
