//! Finite propagation: whether the profile vanishes identically beyond some ξ0.
//!
//! The ξ positions `x_j` where `f` falls through `10^{-j}` approach ξ0
//! geometrically when the support is compact, and drift off linearly when the
//! tail is exponential. The raw positions converge too slowly to decide
//! anything at a handful of decades (for a quartic edge the gap only shrinks by
//! `10^{1/4}` per decade), so they are accelerated with Aitken's Δ² process,
//! which removes the leading geometric term exactly.

use serde::{Deserialize, Serialize};

use super::profile::WaveProfile;
use crate::error::{Error, Result};
use crate::model::CanonicalModel;

/// Thresholds `10^{-first_decade}, 10^{-(first_decade+1)}, …`, as many as the
/// profile's tail reaches, between `min_decades` and `max_decades` of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub first_decade: u32,
    pub min_decades: usize,
    pub max_decades: usize,
    /// Largest admissible gap between the last two accelerated estimates.
    pub tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            first_decade: 2,
            min_decades: 4,
            max_decades: 12,
            tolerance: 1e-5,
        }
    }
}

impl Thresholds {
    fn level(&self, j: usize) -> f64 {
        10f64.powi(-((self.first_decade as usize + j) as i32))
    }

    /// Levels down to `floor`, or `None` if fewer than `min_decades` fit.
    pub fn levels_above(&self, floor: f64) -> Option<Vec<f64>> {
        let levels: Vec<f64> = (0..self.max_decades).map(|j| self.level(j)).filter(|&l| l >= floor).collect();
        (levels.len() >= self.min_decades).then_some(levels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePropagationReport {
    pub levels: Vec<f64>,
    /// Rightmost ξ where `f` falls through each level.
    pub positions: Vec<f64>,
    /// Ratios of successive position increments.
    pub ratios: Vec<f64>,
    /// Aitken-accelerated limits, one per consecutive triple of positions.
    pub estimates: Vec<f64>,
    /// `|e_{j+1} − e_j|` between consecutive estimates.
    pub gaps: Vec<f64>,
    pub converged: bool,
    pub edge: Option<f64>,
    /// `q < 1` and `m > q`, under which a compact support is expected.
    pub hypotheses_hold: bool,
}

pub fn finite_propagation_report(profile: &WaveProfile, cm: &CanonicalModel, thresholds: &Thresholds) -> Result<FinitePropagationReport> {
    let hypotheses_hold = cm.q < 1.0 && cm.m > cm.q;
    if thresholds.min_decades < 4 || thresholds.max_decades < thresholds.min_decades {
        return Err(Error::InvalidParameter {
            name: "thresholds",
            reason: "at least four decades are needed for two accelerated estimates".into(),
        });
    }
    if let Some(edge) = profile.support_edge {
        return Ok(FinitePropagationReport {
            levels: Vec::new(),
            positions: Vec::new(),
            ratios: Vec::new(),
            estimates: vec![edge],
            gaps: Vec::new(),
            converged: true,
            edge: Some(edge),
            hypotheses_hold,
        });
    }
    let reached = profile.min_f();
    let levels = thresholds.levels_above(reached).ok_or(Error::InsufficientTail {
        needed: thresholds.level(thresholds.min_decades - 1),
        reached,
    })?;
    let positions = levels
        .iter()
        .map(|&l| profile.level_crossing(l).ok_or(Error::InsufficientTail { needed: l, reached }))
        .collect::<Result<Vec<f64>>>()?;
    let deltas: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = deltas.windows(2).map(|w| w[1] / w[0]).collect();
    let estimates: Vec<f64> = positions
        .windows(3)
        .zip(deltas.windows(2))
        .map(|(x, d)| x[2] - d[1] * d[1] / (d[1] - d[0]))
        .collect();
    let gaps: Vec<f64> = estimates.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let geometric = ratios.iter().all(|&r| r > 0.0 && r < 0.9);
    let settled = gaps.last().is_some_and(|&g| g <= thresholds.tolerance);
    let converged = geometric && settled && estimates.iter().all(|e| e.is_finite());
    let edge = converged.then(|| *estimates.last().expect("non-empty when converged"));
    if converged != hypotheses_hold {
        log::debug!(
            "finite propagation {} although q < 1 and m > q {}",
            if converged { "detected" } else { "not detected" },
            if hypotheses_hold { "hold" } else { "fail" }
        );
    }
    Ok(FinitePropagationReport {
        levels,
        positions,
        ratios,
        estimates,
        gaps,
        converged,
        edge,
        hypotheses_hold,
    })
}

/// Support edge ξ0 of the profile, if the threshold crossings converge.
pub fn detect_finite_propagation(profile: &WaveProfile, cm: &CanonicalModel) -> Result<Option<f64>> {
    Ok(finite_propagation_report(profile, cm, &Thresholds::default())?.edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connect::{classify_connection, reconstruct_profile, Classification, ProfileSample};
    use crate::phaseplane::build_system;

    fn profile(m: f64, p: f64, q: f64, c: f64) -> (WaveProfile, CanonicalModel) {
        let cm = CanonicalModel::new(m, p, q).unwrap();
        let traj = classify_connection(&cm, c).unwrap().trajectory.unwrap();
        let sys = build_system(&cm, -c).unwrap();
        (reconstruct_profile(&traj, &sys, &cm).unwrap(), cm)
    }

    #[test]
    fn compact_support_is_detected() {
        let (pr, cm) = profile(1.0, 1.0, 0.5, -3.0);
        let rep = finite_propagation_report(&pr, &cm, &Thresholds::default()).unwrap();
        assert!(rep.hypotheses_hold);
        assert!(rep.converged, "{rep:?}");
        let edge = rep.edge.unwrap();
        assert!(edge > *rep.positions.last().unwrap() - 1e-9);
    }

    #[test]
    fn exponential_tail_diverges() {
        let (pr, cm) = profile(1.0, 2.0, 1.0, -3.0);
        assert_eq!(detect_finite_propagation(&pr, &cm).unwrap(), None);
    }

    #[test]
    fn explicit_zero_tail_is_the_edge() {
        let cm = CanonicalModel::new(1.0, 1.0, 0.5).unwrap();
        let samples = vec![
            ProfileSample { xi: -1.0, f: 1.0, df: 0.0 },
            ProfileSample { xi: 0.0, f: 0.5, df: -1.0 },
            ProfileSample { xi: 1.0, f: 0.0, df: 0.0 },
            ProfileSample { xi: 2.0, f: 0.0, df: 0.0 },
        ];
        let pr = WaveProfile {
            samples,
            c: -1.0,
            classification: Classification::Monotone,
            overshoot_extrema: Vec::new(),
            support_edge: Some(1.0),
            rest_rate: 0.5,
        };
        assert_eq!(detect_finite_propagation(&pr, &cm).unwrap(), Some(1.0));
    }

    #[test]
    fn shallow_tails_are_reported() {
        let (pr, cm) = profile(2.0, 2.0, 1.0, -3.0);
        assert!(matches!(
            detect_finite_propagation(&pr, &cm),
            Err(Error::InsufficientTail { .. })
        ));
    }
}
