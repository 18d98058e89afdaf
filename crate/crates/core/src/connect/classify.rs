use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shoot::{oscillation_tail, shoot_with, Direction, EventKind, ShootOptions, Trajectory};
use crate::error::{Error, Result};
use crate::model::{classify_speed, critical_speed, CanonicalModel, SpeedClass};
use crate::phaseplane::{build_system, FixedPointLabel, PhaseSystem};

/// An X = 1 crossing only counts as an oscillation if the extremum that
/// follows it deviates from 1 by more than this.
pub const OSCILLATION_THRESHOLD: f64 = 1e-6;
/// Speeds this close to the critical speed are flagged as low confidence:
/// overshoot amplitudes vanish continuously at the node/focus transition.
pub const LOW_CONFIDENCE_BAND: f64 = 1e-3;
/// The decay onto `P2` is followed until `|(X − 1, Y)|` is this small.
const TAIL_FLOOR: f64 = 1e-30;
/// Extrema below this are dominated by the floor and are not reported.
const EXTREMUM_FLOOR: f64 = 1e-26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Monotone,
    Oscillatory,
    None,
}

/// An extremum of the profile, i.e. a zero of `Y`, with its signed offset `X − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub tau: f64,
    pub offset: f64,
    /// Found while following the decay past the arrival radius.
    pub in_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub c_original: f64,
    pub classification: Classification,
    pub low_confidence: bool,
    /// First X-axis intersection of the orbit leaving `P0` (1 if it enters `P2` directly).
    pub x0: Option<f64>,
    pub n_oscillations: usize,
    /// Extrema in τ order, i.e. from the front toward `ξ → −∞`.
    pub extrema: Vec<Extremum>,
    pub trajectory: Option<Trajectory>,
}

impl ConnectionReport {
    /// Overshoot (`X > 1`) and undershoot amplitudes `|X − 1|`, each in τ order.
    pub fn side_amplitudes(&self) -> (Vec<f64>, Vec<f64>) {
        let pick = |above: bool| {
            self.extrema
                .iter()
                .filter(|e| (e.offset > 0.0) == above)
                .map(|e| e.offset.abs())
                .collect::<Vec<_>>()
        };
        (pick(true), pick(false))
    }

    /// Whether the overshoots and the undershoots each shrink strictly.
    pub fn amplitudes_decreasing(&self) -> bool {
        let (over, under) = self.side_amplitudes();
        let strictly = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        strictly(&over) && strictly(&under)
    }
}

pub fn classify_connection(cm: &CanonicalModel, c_original: f64) -> Result<ConnectionReport> {
    classify_connection_with(cm, c_original, &ShootOptions::default())
}

/// Computes the connection for a wave of speed `c_original` and classifies it.
///
/// A negative speed is mapped to the transformed system with `c = |c_original|`,
/// whose connection is the orbit leaving `P0`; it is integrated until it arrives
/// at `P2` and then followed further to measure the decay of the oscillations.
pub fn classify_connection_with(cm: &CanonicalModel, c_original: f64, opts: &ShootOptions) -> Result<ConnectionReport> {
    cm.ensure_supported()?;
    if !c_original.is_finite() {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("speed must be finite, got {c_original}"),
        });
    }
    if c_original >= 0.0 {
        return Ok(ConnectionReport {
            c_original,
            classification: Classification::None,
            low_confidence: false,
            x0: None,
            n_oscillations: 0,
            extrema: Vec::new(),
            trajectory: None,
        });
    }
    let c = -c_original;
    let sys = build_system(cm, c)?;
    let traj = shoot_with(&sys, FixedPointLabel::P0, Direction::Forward, opts)?;
    if traj.arrival() != Some(FixedPointLabel::P2) {
        return Err(Error::Inconclusive(format!(
            "orbit from P0 ended with {:?} after {} steps at ({:.6e}, {:.6e})",
            traj.termination,
            traj.steps,
            traj.end_offset.0 + 1.0,
            traj.end_offset.1
        )));
    }
    let (n_oscillations, extrema) = oscillation_summary(&traj, opts)?;
    // The first crossing can sit inside the arrival radius, where only the tail sees it.
    let x0 = extrema.first().map_or(1.0, |e| 1.0 + e.offset.max(0.0));
    let low_confidence = (c - critical_speed(cm)?).abs() < LOW_CONFIDENCE_BAND;
    Ok(ConnectionReport {
        c_original,
        classification: if n_oscillations > 0 {
            Classification::Oscillatory
        } else {
            Classification::Monotone
        },
        low_confidence,
        x0: Some(x0),
        n_oscillations,
        extrema,
        trajectory: Some(traj),
    })
}

/// Counts oscillations and collects extrema along a connection, following the
/// decay past the arrival radius when the orbit ends at `P2`.
pub(crate) fn oscillation_summary(traj: &Trajectory, opts: &ShootOptions) -> Result<(usize, Vec<Extremum>)> {
    let tail = if traj.arrival() == Some(FixedPointLabel::P2) {
        oscillation_tail(traj, opts, TAIL_FLOOR)?
    } else {
        Vec::new()
    };
    let mut extrema = Vec::new();
    let mut n_oscillations = 0;
    let mut crossed = false;
    let events = traj
        .events
        .iter()
        .map(|e| (e, false))
        .chain(tail.iter().map(|e| (e, true)));
    for (e, in_tail) in events {
        match e.kind {
            EventKind::UnitXCross => crossed = true,
            EventKind::XAxisCross => {
                if crossed && e.offset.abs() > OSCILLATION_THRESHOLD {
                    n_oscillations += 1;
                }
                crossed = false;
                if e.offset.abs() > EXTREMUM_FLOOR {
                    extrema.push(Extremum {
                        tau: e.tau,
                        offset: e.offset,
                        in_tail,
                    });
                }
            }
            _ => {}
        }
    }
    Ok((n_oscillations, extrema))
}

/// First crossing of the X axis by an orbit leaving `P0`, or 1 if the orbit
/// enters `P2` without crossing.
pub fn first_x_axis_intersection(traj: &Trajectory) -> Result<f64> {
    if traj.seed.point != Some(FixedPointLabel::P0) || traj.seed.direction != Direction::Forward {
        return Err(Error::InvalidParameter {
            name: "traj",
            reason: "expected an orbit shot forward from P0".into(),
        });
    }
    if let Some(e) = traj.events_of(EventKind::XAxisCross).find(|e| e.state.0 > 0.0) {
        let x0 = e.state.0;
        if x0 < 1.0 - 1e-6 {
            return Err(Error::Inconclusive(format!(
                "first X-axis intersection {x0} lies below 1"
            )));
        }
        return Ok(x0);
    }
    if traj.arrival() == Some(FixedPointLabel::P2) {
        return Ok(1.0);
    }
    Err(Error::NoIntersection)
}

fn x0_options() -> ShootOptions {
    ShootOptions {
        stop_at_x_axis: true,
        ..ShootOptions::default()
    }
}

/// X0 for each speed of a non-negative increasing list.
pub fn x0_monotonicity_check(cm: &CanonicalModel, speeds: &[f64]) -> Result<Vec<(f64, f64)>> {
    cm.ensure_supported()?;
    if speeds.iter().any(|c| !(c.is_finite() && *c >= 0.0)) || speeds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "speeds",
            reason: "speeds must be finite, non-negative and strictly increasing".into(),
        });
    }
    let opts = x0_options();
    speeds
        .par_iter()
        .map(|&c| {
            let sys = build_system(cm, c)?;
            let traj = shoot_with(&sys, FixedPointLabel::P0, Direction::Forward, &opts)?;
            Ok((c, first_x_axis_intersection(&traj)?))
        })
        .collect()
}

/// Change in X0 when the seed offsets at `P0` are halved; a converged seed
/// moves X0 by much less than the quantities being compared.
pub fn x0_seed_sensitivity(cm: &CanonicalModel, c: f64, opts: &ShootOptions) -> Result<f64> {
    let sys = build_system(cm, c)?;
    let base = ShootOptions {
        stop_at_x_axis: true,
        ..*opts
    };
    let halved = ShootOptions {
        eps: 0.5 * base.eps,
        center_eps: 0.5 * base.center_eps,
        ..base
    };
    let x0 = |o: &ShootOptions| first_x_axis_intersection(&shoot_with(&sys, FixedPointLabel::P0, Direction::Forward, o)?);
    Ok((x0(&base)? - x0(&halved)?).abs())
}

/// First X-axis intersection of the orbit arriving at `P1` (traced backward).
pub fn gamma1_first_crossing(sys: &PhaseSystem) -> Result<f64> {
    let traj = shoot_with(sys, FixedPointLabel::P1, Direction::Backward, &x0_options())?;
    let x1 = traj.events_of(EventKind::XAxisCross).next().map(|e| e.state.0);
    x1.ok_or(Error::NoIntersection)
}

pub fn is_non_increasing(rows: &[(f64, f64)], tol: f64) -> bool {
    rows.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub predicted: SpeedClass,
    pub observed: Option<Classification>,
    pub x0: Option<f64>,
    pub n_oscillations: usize,
    pub agreement: bool,
    pub low_confidence: bool,
    /// Per-row failure; the other rows are unaffected.
    pub error: Option<String>,
}

/// Classifies every speed, in parallel, returning rows in input order.
pub fn sweep(cm: &CanonicalModel, speeds: &[f64], opts: &ShootOptions) -> Result<Vec<SweepRow>> {
    cm.ensure_supported()?;
    Ok(speeds
        .par_iter()
        .map(|&c| {
            let predicted = classify_speed(cm, c);
            let observed = classify_connection_with(cm, c, opts);
            match (predicted, observed) {
                (Ok(predicted), Ok(report)) => {
                    let agreement = matches!(
                        (predicted, report.classification),
                        (SpeedClass::NoWave, Classification::None)
                            | (SpeedClass::MonotoneWave, Classification::Monotone)
                            | (SpeedClass::OscillatoryWave, Classification::Oscillatory)
                    );
                    SweepRow {
                        c,
                        predicted,
                        observed: Some(report.classification),
                        x0: report.x0,
                        n_oscillations: report.n_oscillations,
                        agreement,
                        low_confidence: report.low_confidence,
                        error: None,
                    }
                }
                (predicted, observed) => {
                    let error = match (&predicted, &observed) {
                        (Err(e), _) | (_, Err(e)) => e.to_string(),
                        _ => unreachable!("both succeeded above"),
                    };
                    SweepRow {
                        c,
                        predicted: predicted.unwrap_or(SpeedClass::NoWave),
                        observed: None,
                        x0: None,
                        n_oscillations: 0,
                        agreement: false,
                        low_confidence: false,
                        error: Some(error),
                    }
                }
            }
        })
        .collect())
}
