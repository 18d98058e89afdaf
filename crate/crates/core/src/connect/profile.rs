use serde::{Deserialize, Serialize};

use super::classify::{classify_connection_with, oscillation_summary, Classification, ConnectionReport};
use super::shoot::{ShootOptions, Trajectory};
use crate::error::{Error, Result};
use crate::math::powr;
use crate::model::CanonicalModel;
use crate::ode::Step;
use crate::phaseplane::{build_system, FixedPointLabel, PhaseSystem};

const LOG_INTERPOLATION_LEVEL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub xi: f64,
    pub f: f64,
    /// `df/dξ`, used for Hermite interpolation between samples.
    pub df: f64,
}

/// Right travelling wave `u(x, t) = f(x − ct)` with `f → 1` on the left and
/// `f → 0` on the right, normalized so that `f(0) = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    /// Samples in increasing ξ.
    pub samples: Vec<ProfileSample>,
    /// Wave speed, negative for a genuine wave.
    pub c: f64,
    pub classification: Classification,
    /// Local maxima above 1, in increasing ξ.
    pub overshoot_extrema: Vec<(f64, f64)>,
    pub support_edge: Option<f64>,
    /// Growth rate `p − q` of the reaction at `f = 1`, which fixes the left tail.
    pub rest_rate: f64,
}

impl WaveProfile {
    /// The state `f ≡ 1`.
    pub fn constant(c: f64) -> WaveProfile {
        WaveProfile {
            samples: vec![ProfileSample { xi: 0.0, f: 1.0, df: 0.0 }],
            c,
            classification: Classification::None,
            overshoot_extrema: Vec::new(),
            support_edge: None,
            rest_rate: 0.0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.samples.iter().all(|s| s.f == 1.0 && s.df == 0.0)
    }

    pub fn xi_range(&self) -> (f64, f64) {
        (self.samples[0].xi, self.samples[self.samples.len() - 1].xi)
    }

    /// `f(ξ)` by Hermite interpolation, with exponential tails beyond the samples.
    pub fn eval(&self, xi: f64) -> f64 {
        if let Some(edge) = self.support_edge {
            if xi >= edge {
                return 0.0;
            }
        }
        let n = self.samples.len();
        let (first, last) = (self.samples[0], self.samples[n - 1]);
        if n == 1 {
            return first.f;
        }
        if xi <= first.xi {
            return 1.0 + self.left_tail(first.f - 1.0, first.df, xi - first.xi);
        }
        if xi >= last.xi {
            let rate = if last.f > 0.0 { last.df / last.f } else { 0.0 };
            return if rate < 0.0 { last.f * (rate * (xi - last.xi)).exp() } else { last.f };
        }
        let i = self.samples.partition_point(|s| s.xi <= xi).clamp(1, n - 1);
        hermite(&self.samples[i - 1], &self.samples[i], xi).max(0.0)
    }

    /// Solution `g` of the linearization `g'' + c g' + (p − q) g = 0` about
    /// `f = 1` with `g(0) = g0`, `g'(0) = dg0`, evaluated at `s ≤ 0`.
    fn left_tail(&self, g0: f64, dg0: f64, s: f64) -> f64 {
        let disc = self.c * self.c - 4.0 * self.rest_rate;
        let mu = -0.5 * self.c;
        if self.rest_rate <= 0.0 || mu <= 0.0 {
            return g0;
        }
        if disc < 0.0 {
            let w = 0.5 * (-disc).sqrt();
            let b = (dg0 - mu * g0) / w;
            (mu * s).exp() * (g0 * (w * s).cos() + b * (w * s).sin())
        } else if disc > 0.0 {
            let r = 0.5 * disc.sqrt();
            let (l1, l2) = (mu - r, mu + r);
            let b = (dg0 - l1 * g0) / (l2 - l1);
            (g0 - b) * (l1 * s).exp() + b * (l2 * s).exp()
        } else {
            (g0 + (dg0 - mu * g0) * s) * (mu * s).exp()
        }
    }

    /// Rightmost ξ at which `f` crosses `level` downward.
    pub fn level_crossing(&self, level: f64) -> Option<f64> {
        let i = (0..self.samples.len().saturating_sub(1))
            .rev()
            .find(|&i| self.samples[i].f >= level && self.samples[i + 1].f < level)?;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let (mut lo, mut hi) = (a.xi, b.xi);
        for _ in 0..200 {
            if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if hermite(a, b, mid) >= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// `|f − 1|` at the overshoots, ordered from the front toward `ξ → −∞`.
    pub fn overshoot_amplitudes(&self) -> Vec<f64> {
        self.overshoot_extrema.iter().rev().map(|&(_, f)| f - 1.0).collect()
    }

    pub fn min_f(&self) -> f64 {
        self.samples.iter().map(|s| s.f).fold(f64::INFINITY, f64::min)
    }
}

/// Cubic Hermite interpolation between two samples. Deep in the tail, where
/// `f` spans orders of magnitude between samples, `ln f` is interpolated instead.
fn hermite(a: &ProfileSample, b: &ProfileSample, xi: f64) -> f64 {
    if a.f > 0.0 && b.f > 0.0 && a.f.max(b.f) < LOG_INTERPOLATION_LEVEL {
        let step = Step {
            t0: a.xi,
            y0: [a.f.ln()],
            f0: [a.df / a.f],
            t1: b.xi,
            y1: [b.f.ln()],
            f1: [b.df / b.f],
        };
        return step.interpolate(xi)[0].exp();
    }
    let step = Step {
        t0: a.xi,
        y0: [a.f],
        f0: [a.df],
        t1: b.xi,
        y1: [b.f],
        f1: [b.df],
    };
    step.interpolate(xi)[0]
}

/// How the phase-plane coordinates map back to the profile.
struct Chart {
    /// `dξ/dτ` as a function of X.
    density_exp: f64,
    density_coef: f64,
    /// `f = X^{f_exp}`.
    f_exp: f64,
    /// `f' = Y · slope_coef · f^{slope_exp}`.
    slope_coef: f64,
    slope_exp: f64,
}

impl Chart {
    fn new(sys: &PhaseSystem, cm: &CanonicalModel) -> Result<Chart> {
        let (m, q, mq) = (cm.m, cm.q, cm.mq());
        match sys {
            PhaseSystem::CaseI(s) if mq > 2.0 => Ok(Chart {
                density_exp: (m - 1.0) / s.gamma,
                density_coef: 1.0,
                f_exp: 1.0 / s.gamma,
                slope_coef: 1.0,
                slope_exp: 2.0 - m,
            }),
            PhaseSystem::CaseII(s) if mq <= 2.0 => {
                let r = (2.0 / mq).sqrt();
                Ok(Chart {
                    density_exp: (m - q) / (2.0 * s.k),
                    density_coef: r,
                    f_exp: 1.0 / s.k,
                    slope_coef: r,
                    slope_exp: (2.0 + q - m) / 2.0,
                })
            }
            _ => Err(Error::InvalidParameter {
                name: "sys",
                reason: "phase system does not belong to the given model".into(),
            }),
        }
    }

    fn density(&self, x: f64) -> f64 {
        self.density_coef * powr(x, self.density_exp)
    }

    fn f(&self, x: f64) -> f64 {
        powr(x, self.f_exp)
    }

    /// `f` from `X − 1` without losing the small offset.
    fn f_from_offset(&self, offset: f64) -> f64 {
        (self.f_exp * offset.ln_1p()).exp()
    }

    fn df(&self, x: f64, y: f64) -> f64 {
        y * self.slope_coef * powr(self.f(x), self.slope_exp)
    }
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Turns a `P0`–`P2` connection into the wave profile in the travelling
/// coordinate, by integrating `dξ = ρ(X) dτ` along the orbit.
/// Classifies the connection at RTW speed `c` and, when there is one, the
/// profile it carries.
pub fn wave_profile(cm: &CanonicalModel, c: f64, opts: &ShootOptions) -> Result<(ConnectionReport, Option<WaveProfile>)> {
    let report = classify_connection_with(cm, c, opts)?;
    let profile = match &report.trajectory {
        Some(traj) => Some(reconstruct_profile(traj, &build_system(cm, -c)?, cm)?),
        None => None,
    };
    Ok((report, profile))
}

pub fn reconstruct_profile(traj: &Trajectory, sys: &PhaseSystem, cm: &CanonicalModel) -> Result<WaveProfile> {
    cm.ensure_supported()?;
    let chart = Chart::new(sys, cm)?;
    if traj
        .samples
        .iter()
        .all(|s| (s.x - 1.0).hypot(s.y) <= 1e-12)
    {
        return Ok(WaveProfile::constant(-traj.c));
    }
    match (traj.seed.point, traj.arrival()) {
        (Some(FixedPointLabel::P0), Some(FixedPointLabel::P2)) | (Some(FixedPointLabel::P2), Some(FixedPointLabel::P0)) => {}
        (start, end) => {
            return Err(Error::NotAConnection(format!(
                "orbit runs from {start:?} to {end:?} ({:?})",
                traj.termination
            )))
        }
    }

    // ξ in the transformed frame, accumulated sample by sample.
    let mut xi = Vec::with_capacity(traj.samples.len());
    let mut acc = 0.0;
    xi.push(acc);
    for w in traj.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        let step = Step {
            t0: a.tau,
            y0: [a.x, a.y],
            f0: sys.field(a.x, a.y),
            t1: b.tau,
            y1: [b.x, b.y],
            f1: sys.field(b.x, b.y),
        };
        let half = 0.5 * (b.tau - a.tau);
        let mid = 0.5 * (a.tau + b.tau);
        let floor = 0.5 * a.x.min(b.x);
        acc += half
            * GAUSS3
                .iter()
                .map(|&(node, weight)| weight * chart.density(step.interpolate(mid + half * node)[0].max(floor)))
                .sum::<f64>();
        xi.push(acc);
    }

    // The transformed frame runs with speed |c|; the wave itself is its mirror image.
    let mut samples: Vec<ProfileSample> = traj
        .samples
        .iter()
        .zip(&xi)
        .map(|(s, &x)| ProfileSample {
            xi: -x,
            f: chart.f(s.x),
            df: -chart.df(s.x, s.y),
        })
        .collect();
    let mut xi_of_sample: Vec<f64> = xi.iter().map(|x| -x).collect();
    if samples.len() > 1 && samples[0].xi > samples[samples.len() - 1].xi {
        samples.reverse();
    }
    samples.dedup_by(|b, a| b.xi <= a.xi);

    let mut profile = WaveProfile {
        samples,
        c: -traj.c,
        classification: Classification::Monotone,
        overshoot_extrema: Vec::new(),
        support_edge: None,
        rest_rate: cm.p - cm.q,
    };
    let shift = profile.level_crossing(0.5).unwrap_or(0.0);
    for s in &mut profile.samples {
        s.xi -= shift;
    }
    for x in &mut xi_of_sample {
        *x -= shift;
    }

    let (n_osc, _) = oscillation_summary(traj, &ShootOptions::default())?;
    if n_osc > 0 {
        profile.classification = Classification::Oscillatory;
    }
    profile.overshoot_extrema = traj
        .events_of(super::shoot::EventKind::XAxisCross)
        .filter(|e| e.offset > 0.0)
        .map(|e| (xi_of_sample[e.index], chart.f_from_offset(e.offset)))
        .collect();
    profile.overshoot_extrema.sort_by(|a, b| a.0.total_cmp(&b.0));
    profile.support_edge = profile.samples.iter().find(|s| s.f == 0.0).map(|s| s.xi);
    Ok(profile)
}

/// Largest residual of the integrated wave equation
/// `[f^{m−1} f' + c f]_{ξa}^{ξb} + ∫_{ξa}^{ξb} (f^p − f^q) dξ = 0`
/// over consecutive windows of length `span` inside `window`, with the profile
/// resampled on a uniform grid of spacing `h` (central differences for the
/// flux, trapezoidal rule for the reaction).
pub fn weak_form_residual(profile: &WaveProfile, cm: &CanonicalModel, h: f64, window: (f64, f64), span: f64) -> Result<f64> {
    let (a, b) = window;
    if !(h > 0.0 && span >= h && b - a >= span) {
        return Err(Error::InvalidParameter {
            name: "h",
            reason: format!("need 0 < h ≤ span ≤ window length, got h = {h}, span = {span}, window = {window:?}"),
        });
    }
    let per_window = (span / h).round() as usize;
    let n = ((b - a) / h).floor() as usize;
    let f: Vec<f64> = (0..=n + 2).map(|i| profile.eval(a + (i as f64 - 1.0) * h)).collect();
    // f[i + 1] is the value at node i.
    let flux = |i: usize| powr(f[i + 1], cm.m - 1.0) * (f[i + 2] - f[i]) / (2.0 * h);
    let reaction = |i: usize| powr(f[i + 1], cm.p) - powr(f[i + 1], cm.q);
    let mut worst: f64 = 0.0;
    let mut start = 0;
    while start + per_window <= n {
        let end = start + per_window;
        let integral = h
            * ((start + 1..end).map(reaction).sum::<f64>() + 0.5 * (reaction(start) + reaction(end)));
        let r = flux(end) - flux(start) + profile.c * (f[end + 1] - f[start + 1]) + integral;
        worst = worst.max(r.abs());
        start = end;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connect::{classify_connection, shoot::Direction};
    use crate::phaseplane::build_system;

    fn profile_of(m: f64, p: f64, q: f64, c: f64) -> (WaveProfile, CanonicalModel) {
        let cm = CanonicalModel::new(m, p, q).unwrap();
        let report = classify_connection(&cm, c).unwrap();
        let traj = report.trajectory.unwrap();
        let sys = build_system(&cm, -c).unwrap();
        (reconstruct_profile(&traj, &sys, &cm).unwrap(), cm)
    }

    #[test]
    fn monotone_profile_is_decreasing_and_anchored() {
        let (pr, _) = profile_of(2.0, 2.0, 1.0, -3.0);
        assert_eq!(pr.classification, Classification::Monotone);
        assert!((pr.eval(0.0) - 0.5).abs() < 1e-9);
        assert!(pr.samples.windows(2).all(|w| w[1].xi > w[0].xi && w[1].f <= w[0].f));
        assert!(pr.samples[0].f > 0.9999);
        assert!(pr.samples.last().unwrap().f < 1e-3);
        assert_eq!(pr.c, -3.0);
    }

    #[test]
    fn oscillatory_profile_overshoots_with_decaying_extrema() {
        let (pr, _) = profile_of(2.0, 2.0, 1.0, -1.0);
        assert_eq!(pr.classification, Classification::Oscillatory);
        let amps = pr.overshoot_amplitudes();
        assert!(!amps.is_empty() && amps[0] > 0.0);
        assert!(amps.windows(2).all(|w| w[1] < w[0]));
        assert!(pr.samples.iter().any(|s| s.f > 1.0));
    }

    #[test]
    fn stationary_orbit_gives_constant_profile() {
        let cm = CanonicalModel::new(2.0, 2.0, 1.0).unwrap();
        let sys = build_system(&cm, 1.0).unwrap();
        let traj = Trajectory::stationary(&sys, FixedPointLabel::P2).unwrap();
        let pr = reconstruct_profile(&traj, &sys, &cm).unwrap();
        assert!(pr.is_constant());
        assert_eq!(pr.eval(-5.0), 1.0);
        assert_eq!(pr.eval(5.0), 1.0);
    }

    #[test]
    fn partial_orbits_are_rejected() {
        let cm = CanonicalModel::new(2.0, 2.0, 1.0).unwrap();
        let sys = build_system(&cm, 1.0).unwrap();
        let traj = crate::connect::shoot_from(&sys, FixedPointLabel::P2, Direction::Backward, 1e-6).unwrap();
        if traj.arrival() != Some(FixedPointLabel::P0) {
            assert!(matches!(reconstruct_profile(&traj, &sys, &cm), Err(Error::NotAConnection(_))));
        }
    }

    #[test]
    fn weak_residual_shrinks_under_refinement() {
        let (pr, cm) = profile_of(1.0, 2.0, 1.0, -3.0);
        let r: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| weak_form_residual(&pr, &cm, h, (-8.0, 8.0), 1.0).unwrap())
            .collect();
        assert!(r[1] < r[0] / 3.0 && r[2] < r[1] / 3.0, "{r:?}");
    }
}
