use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::powr;
use crate::ode::{locate_root, Dopri5, Step, Tolerances};
use crate::phaseplane::{eigenvalues, zero_speed_curve, FixedPointLabel, PhaseSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Knobs of a shot. The defaults are tuned so that the closed-form checks at
/// zero speed hold to `1e-6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootOptions {
    /// Offset of the seed from a hyperbolic equilibrium along its eigenvector.
    pub eps: f64,
    /// X coordinate of the seed on the centre manifold of the saddle-node `P0`.
    /// The flow there is algebraic (`X' ≈ γX²/c`), so this is much larger than `eps`.
    pub center_eps: f64,
    pub tolerances: Tolerances,
    /// Bisection tolerance in τ for event localization.
    pub event_tol: f64,
    pub arrival_radius: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub tau_span: f64,
    pub max_steps: usize,
    pub max_step: f64,
    /// Stop at the first crossing of the X axis instead of running to arrival.
    pub stop_at_x_axis: bool,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            center_eps: 1e-4,
            tolerances: Tolerances::default(),
            event_tol: 1e-12,
            arrival_radius: 1e-5,
            x_max: 1e3,
            y_max: 1e3,
            tau_span: 1e6,
            max_steps: 10_000_000,
            max_step: 0.5,
            stop_at_x_axis: false,
        }
    }
}

impl ShootOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps", self.eps),
            ("center_eps", self.center_eps),
            ("tolerances.abs", self.tolerances.abs),
            ("tolerances.rel", self.tolerances.rel),
            ("event_tol", self.event_tol),
            ("arrival_radius", self.arrival_radius),
            ("x_max", self.x_max),
            ("y_max", self.y_max),
            ("tau_span", self.tau_span),
            ("max_step", self.max_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "shoot options",
                    reason: format!("{name} must be positive and finite, got {v}"),
                });
            }
        }
        if self.eps >= 0.1 || self.center_eps >= 0.1 {
            return Err(Error::InvalidParameter {
                name: "shoot options",
                reason: "seed offsets must be small (< 0.1)".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// The orbit reached `X = 0` and left the admissible half-plane.
    YAxisCross,
    /// Sign change of `Y`, i.e. an extremum of the profile.
    XAxisCross,
    /// Crossing of `X = 1`, i.e. the profile crossing its limit value.
    UnitXCross,
    Escape,
    FixedPointArrival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub kind: EventKind,
    /// Index of the sample recorded at the event.
    pub index: usize,
    pub tau: f64,
    pub state: (f64, f64),
    /// `X − 1`, carried separately because it is computed without cancellation near `P2`.
    pub offset: f64,
    pub fixed_point: Option<FixedPointLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub point: Option<FixedPointLabel>,
    pub direction: Direction,
    pub state: (f64, f64),
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Arrival(FixedPointLabel),
    Escape,
    LeftRegion,
    XAxis,
    Budget,
}

/// An integrated orbit. Samples are in integration order, so τ increases for
/// forward shots and decreases for backward ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<TrajectoryEvent>,
    pub seed: Seed,
    /// Speed of the system in the transformed frame.
    pub c: f64,
    pub system: PhaseSystem,
    pub termination: Termination,
    /// `(X − 1, Y)` at the last sample, without cancellation.
    pub end_offset: (f64, f64),
    pub steps: usize,
}

impl Trajectory {
    /// The orbit that sits at an equilibrium.
    pub fn stationary(sys: &PhaseSystem, label: FixedPointLabel) -> Result<Trajectory> {
        let (x, y) = sys
            .fixed_point(label)
            .ok_or_else(|| Error::SeedFailure(format!("{label:?} does not exist for this system")))?;
        let event = TrajectoryEvent {
            kind: EventKind::FixedPointArrival,
            index: 0,
            tau: 0.0,
            state: (x, y),
            offset: x - 1.0,
            fixed_point: Some(label),
        };
        Ok(Trajectory {
            samples: vec![TrajectorySample { tau: 0.0, x, y }],
            events: vec![event],
            seed: Seed {
                point: Some(label),
                direction: Direction::Forward,
                state: (x, y),
                description: format!("resting at {label:?}"),
            },
            c: sys.speed(),
            system: *sys,
            termination: Termination::Arrival(label),
            end_offset: (x - 1.0, y),
            steps: 0,
        })
    }

    pub fn arrival(&self) -> Option<FixedPointLabel> {
        match self.termination {
            Termination::Arrival(label) => Some(label),
            _ => None,
        }
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &TrajectoryEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn tau_range(&self) -> (f64, f64) {
        let a = self.samples.first().map_or(0.0, |s| s.tau);
        let b = self.samples.last().map_or(0.0, |s| s.tau);
        (a.min(b), a.max(b))
    }

    /// State at an arbitrary τ inside the sampled range, by cubic Hermite
    /// interpolation with the vector field supplying the slopes.
    pub fn state_at(&self, tau: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.tau_range();
        if !(tau >= lo && tau <= hi) || self.samples.is_empty() {
            return None;
        }
        if self.samples.len() == 1 {
            let s = self.samples[0];
            return Some((s.x, s.y));
        }
        let forward = self.samples[1].tau > self.samples[0].tau;
        let pos = self
            .samples
            .partition_point(|s| if forward { s.tau < tau } else { s.tau > tau });
        let i = pos.clamp(1, self.samples.len() - 1);
        let (a, b) = (self.samples[i - 1], self.samples[i]);
        let step = Step {
            t0: a.tau,
            y0: [a.x, a.y],
            f0: self.system.field(a.x.max(0.0), a.y),
            t1: b.tau,
            y1: [b.x, b.y],
            f1: self.system.field(b.x.max(0.0), b.y),
        };
        let [x, y] = step.interpolate(tau);
        Some((x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    /// Plain `(X, Y)`.
    Origin,
    /// `(X − 1, Y)`, used near `P2` so that small offsets keep their precision.
    Unity,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ChartPoint {
    chart: Chart,
    z: [f64; 2],
}

impl ChartPoint {
    fn origin(x: f64, y: f64) -> Self {
        Self { chart: Chart::Origin, z: [x, y] }
    }

    pub(crate) fn unity(u: f64, y: f64) -> Self {
        Self { chart: Chart::Unity, z: [u, y] }
    }

    fn x(&self) -> f64 {
        match self.chart {
            Chart::Origin => self.z[0],
            Chart::Unity => 1.0 + self.z[0],
        }
    }

    fn offset(&self) -> f64 {
        match self.chart {
            Chart::Origin => self.z[0] - 1.0,
            Chart::Unity => self.z[0],
        }
    }

    fn y(&self) -> f64 {
        self.z[1]
    }

    fn in_chart(self, chart: Chart) -> Self {
        match chart {
            Chart::Origin => Self::origin(self.x(), self.y()),
            Chart::Unity => Self::unity(self.offset(), self.y()),
        }
    }
}

// Hysteresis band for switching charts.
const TO_UNITY: f64 = 0.75;
const TO_ORIGIN: f64 = 0.25;
/// Fraction of the local time scale allowed per step where that exceeds `max_step`.
const SLOW_STEP_FRACTION: f64 = 0.05;

fn preferred_chart(x: f64) -> Chart {
    if x > 0.5 {
        Chart::Unity
    } else {
        Chart::Origin
    }
}

type Rhs<'a> = Box<dyn Fn(f64, &[f64; 2]) -> [f64; 2] + 'a>;

fn rhs(sys: &PhaseSystem, chart: Chart) -> Rhs<'_> {
    match chart {
        Chart::Origin => Box::new(move |_, z| sys.field(z[0], z[1])),
        Chart::Unity => Box::new(move |_, z| sys.field_near_unity(z[0], z[1])),
    }
}

pub(crate) enum Mode {
    Shoot { stop_at_x_axis: bool },
    /// Follow the decay onto `P2` until `|(X − 1, Y)|` drops below the floor.
    Tail { floor: f64 },
}

pub(crate) struct Run {
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<TrajectoryEvent>,
    pub termination: Termination,
    pub last: ChartPoint,
    pub steps: usize,
}

struct Recorder {
    record: bool,
    samples: Vec<TrajectorySample>,
    events: Vec<TrajectoryEvent>,
}

impl Recorder {
    fn sample(&mut self, tau: f64, p: &ChartPoint) -> usize {
        if self.record {
            self.samples.push(TrajectorySample { tau, x: p.x(), y: p.y() });
        }
        self.samples.len().saturating_sub(1)
    }

    fn event(&mut self, kind: EventKind, index: usize, tau: f64, p: &ChartPoint, fp: Option<FixedPointLabel>) {
        self.events.push(TrajectoryEvent {
            kind,
            index,
            tau,
            state: (p.x(), p.y()),
            offset: p.offset(),
            fixed_point: fp,
        });
    }
}

fn distance(p: &ChartPoint, loc: (f64, f64)) -> f64 {
    if loc.0 == 1.0 {
        p.offset().hypot(p.y() - loc.1)
    } else {
        (p.x() - loc.0).hypot(p.y() - loc.1)
    }
}

/// Core integration loop shared by shots, free orbits and oscillation tails.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run(
    sys: &PhaseSystem,
    start: ChartPoint,
    tau0: f64,
    direction: Direction,
    opts: &ShootOptions,
    origin: Option<FixedPointLabel>,
    mode: Mode,
    record: bool,
) -> Result<Run> {
    let fixed: Vec<(FixedPointLabel, (f64, f64))> = [FixedPointLabel::P0, FixedPointLabel::P1, FixedPointLabel::P2]
        .into_iter()
        .filter_map(|l| sys.fixed_point(l).map(|loc| (l, loc)))
        .collect();
    let tol = match mode {
        Mode::Tail { floor } => Tolerances {
            abs: floor * 1e-6,
            rel: opts.tolerances.rel,
        },
        Mode::Shoot { .. } => opts.tolerances,
    };
    let mut rec = Recorder {
        record,
        samples: Vec::new(),
        events: Vec::new(),
    };
    let mut point = start.in_chart(preferred_chart(start.x()));
    let mut tau = tau0;
    let mut steps = 0usize;
    let mut departed = origin.is_none();
    rec.sample(tau, &point);

    let finish = |rec: Recorder, termination, last, steps| Run {
        samples: rec.samples,
        events: rec.events,
        termination,
        last,
        steps,
    };

    loop {
        let chart = point.chart;
        let mut stepper = Dopri5::new(rhs(sys, chart), tau, point.z, direction.sign(), tol, opts.max_step);
        loop {
            if steps >= opts.max_steps || (tau - tau0).abs() >= opts.tau_span {
                return Ok(finish(rec, Termination::Budget, point, steps));
            }
            // Cap steps by the local time scale |F| / (distance to the nearest
            // equilibrium): O(1/|λ|) around hyperbolic points, long on the slow
            // centre-manifold drift out of P0.
            let f = stepper.derivative();
            let r = fixed.iter().map(|&(_, loc)| distance(&point, loc)).fold(f64::INFINITY, f64::min);
            let rate = f[0].hypot(f[1]) / r;
            stepper.set_max_step(if rate > 0.0 { opts.max_step.max(SLOW_STEP_FRACTION / rate) } else { opts.max_step });
            let step = stepper.step()?;
            steps += 1;

            let unit_g = move |z: &[f64; 2]| match chart {
                Chart::Origin => z[0] - 1.0,
                Chart::Unity => z[0],
            };
            let axis_g = move |z: &[f64; 2]| match chart {
                Chart::Origin => z[0],
                Chart::Unity => 1.0 + z[0],
            };
            let mut found: Vec<(f64, [f64; 2], EventKind)> = Vec::new();
            let mut detect = |kind: EventKind, g: &dyn Fn(&[f64; 2]) -> f64| {
                if g(&step.y0) == 0.0 {
                    return;
                }
                if let Some((t, z)) = locate_root(&step, |_, z| g(z), opts.event_tol) {
                    found.push((t, z, kind));
                }
            };
            detect(EventKind::XAxisCross, &|z: &[f64; 2]| z[1]);
            detect(EventKind::UnitXCross, &unit_g);
            detect(EventKind::YAxisCross, &axis_g);
            found.sort_by(|a, b| ((a.0 - step.t0).abs()).total_cmp(&(b.0 - step.t0).abs()));

            for (t, z, kind) in found {
                let p = ChartPoint { chart, z };
                let index = if t != step.t1 {
                    rec.sample(t, &p)
                } else {
                    rec.samples.len()
                };
                match kind {
                    EventKind::YAxisCross => {
                        let p = ChartPoint::origin(0.0, p.y());
                        rec.event(kind, index, t, &p, None);
                        if let Some(s) = rec.samples.last_mut() {
                            s.x = 0.0;
                        }
                        return Ok(finish(rec, Termination::LeftRegion, p, steps));
                    }
                    EventKind::XAxisCross => {
                        rec.event(kind, index, t, &p, None);
                        if matches!(mode, Mode::Shoot { stop_at_x_axis: true }) {
                            if t == step.t1 {
                                rec.sample(t, &p);
                            }
                            return Ok(finish(rec, Termination::XAxis, p, steps));
                        }
                    }
                    _ => rec.event(kind, index, t, &p, None),
                }
            }

            tau = step.t1;
            point = ChartPoint { chart, z: step.y1 };
            let index = rec.sample(tau, &point);

            if !(point.x().abs() <= opts.x_max && point.y().abs() <= opts.y_max) {
                rec.event(EventKind::Escape, index, tau, &point, None);
                return Ok(finish(rec, Termination::Escape, point, steps));
            }

            match mode {
                Mode::Shoot { .. } => {
                    for &(label, loc) in &fixed {
                        let d = distance(&point, loc);
                        if Some(label) == origin && !departed {
                            departed = d > 10.0 * opts.arrival_radius;
                            continue;
                        }
                        if d < opts.arrival_radius {
                            rec.event(EventKind::FixedPointArrival, index, tau, &point, Some(label));
                            return Ok(finish(rec, Termination::Arrival(label), point, steps));
                        }
                    }
                }
                Mode::Tail { floor } => {
                    if point.offset().hypot(point.y()) < floor {
                        return Ok(finish(rec, Termination::Arrival(FixedPointLabel::P2), point, steps));
                    }
                }
            }

            let x = point.x();
            let switch = match chart {
                Chart::Origin => x > TO_UNITY,
                Chart::Unity => x < TO_ORIGIN,
            };
            if switch {
                let other = match chart {
                    Chart::Origin => Chart::Unity,
                    Chart::Unity => Chart::Origin,
                };
                point = point.in_chart(other);
                break;
            }
        }
    }
}

fn unit(v: (f64, f64)) -> (f64, f64) {
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

/// Seed point next to an equilibrium, on (an approximation of) the invariant
/// manifold through which orbits leave it in the requested τ direction.
fn seed(sys: &PhaseSystem, point: FixedPointLabel, direction: Direction, opts: &ShootOptions) -> Result<(ChartPoint, String)> {
    let d = direction.sign();
    let eps = opts.eps;
    let loc = sys
        .fixed_point(point)
        .ok_or_else(|| Error::SeedFailure(format!("{point:?} does not exist for this system")))?;
    match (sys, point) {
        (_, FixedPointLabel::P2) => {
            let j = sys.jacobian(1.0, 0.0);
            let ev = eigenvalues(&j);
            let v = if ev[0].im != 0.0 {
                if d * ev[0].re <= 0.0 {
                    return Err(Error::SeedFailure(format!(
                        "P2 is not a source in the {direction:?} direction (eigenvalues {:.6}±{:.6}i)",
                        ev[0].re,
                        ev[0].im.abs()
                    )));
                }
                (-1.0, 0.0)
            } else {
                let leaving: Vec<f64> = ev.iter().map(|z| z.re).filter(|&l| d * l > 0.0).collect();
                let lambda = leaving
                    .iter()
                    .copied()
                    .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                    .ok_or_else(|| Error::SeedFailure(format!("P2 has no eigenvalue leaving in the {direction:?} direction")))?;
                // (J − λ) v = 0 from the first row, with J₀₀ = 0 at P2.
                let v = unit((j[0][1], lambda - j[0][0]));
                if v.0 > 0.0 {
                    (-v.0, -v.1)
                } else {
                    v
                }
            };
            Ok((
                ChartPoint::unity(eps * v.0, eps * v.1),
                format!("P2 + {eps:e}·({:.6}, {:.6})", v.0, v.1),
            ))
        }
        (PhaseSystem::CaseI(s), FixedPointLabel::P0) => {
            let (g, k, c) = (s.gamma, s.k, s.c);
            if c == 0.0 {
                let y = d * zero_speed_curve(s, eps).max(0.0).sqrt();
                return Ok((ChartPoint::origin(eps, y), format!("zero-speed curve at X = {eps:e}")));
            }
            if d * c <= 0.0 {
                return Err(Error::SeedFailure(format!(
                    "P0 is reached only along X = 0 in the {direction:?} direction"
                )));
            }
            // Centre manifold Y = h(X) of the saddle-node, expanded from
            // γ X h h' + h² + c h − X + X^k = 0.
            let xs = opts.center_eps.min(0.02 * c * c / (g + 1.0));
            let ys = (xs - powr(xs, k)) / c - (g + 1.0) * xs * xs / (c * c * c);
            Ok((ChartPoint::origin(xs, ys), format!("P0 centre manifold at X = {xs:e}")))
        }
        (PhaseSystem::CaseI(s), FixedPointLabel::P1) => {
            let (g, c) = (s.gamma, s.c);
            if d * c >= 0.0 {
                return Err(Error::SeedFailure(format!(
                    "P1 has no eigendirection into X > 0 leaving in the {direction:?} direction"
                )));
            }
            let v = unit(((1.0 + g) * c.abs(), -c.signum()));
            Ok((
                ChartPoint::origin(eps * v.0, loc.1 + eps * v.1),
                format!("P1 + {eps:e}·({:.6}, {:.6})", v.0, v.1),
            ))
        }
        (PhaseSystem::CaseII(s), _) => {
            let ystar = loc.1;
            if d * ystar <= 0.0 {
                return Err(Error::SeedFailure(format!(
                    "{point:?} attracts along X in the {direction:?} direction"
                )));
            }
            // Invariant manifold Y = Y* + a₁X^{k₁} + a₂X^{k₂} to leading order.
            let axis_damping = if s.k1 == 0.0 { s.c1 } else { 0.0 };
            let mut ys = ystar - powr(eps, s.k2) / (ystar * (s.gamma * s.k2 + 2.0) + axis_damping);
            if s.k1 > 0.0 {
                ys -= s.c1 * powr(eps, s.k1) / (s.gamma * s.k1 + 2.0);
            }
            Ok((ChartPoint::origin(eps, ys), format!("{point:?} unstable manifold at X = {eps:e}")))
        }
    }
}

/// Shoots from an equilibrium with default options and the given seed offset.
pub fn shoot_from(sys: &PhaseSystem, point: FixedPointLabel, direction: Direction, eps: f64) -> Result<Trajectory> {
    let opts = ShootOptions { eps, ..ShootOptions::default() };
    shoot_with(sys, point, direction, &opts)
}

pub fn shoot_with(sys: &PhaseSystem, point: FixedPointLabel, direction: Direction, opts: &ShootOptions) -> Result<Trajectory> {
    opts.validate()?;
    let (start, description) = seed(sys, point, direction, opts)?;
    let seed = Seed {
        point: Some(point),
        direction,
        state: (start.x(), start.y()),
        description,
    };
    // Leaving a degenerate equilibrium is algebraic, not exponential: the
    // transit takes about distance / speed at the seed, which can dwarf the
    // nominal budget when the nonlinearity is weak.
    let loc = sys.fixed_point(point).expect("seeded at an existing equilibrium");
    let f = match start.chart {
        Chart::Origin => sys.field(start.x(), start.y()),
        Chart::Unity => sys.field_near_unity(start.offset(), start.y()),
    };
    let transit = distance(&start, loc) / f[0].hypot(f[1]);
    let opts = ShootOptions {
        tau_span: opts.tau_span + if transit.is_finite() { 10.0 * transit } else { 0.0 },
        ..*opts
    };
    let run = run(
        sys,
        start,
        0.0,
        direction,
        &opts,
        Some(point),
        Mode::Shoot {
            stop_at_x_axis: opts.stop_at_x_axis,
        },
        true,
    )?;
    Ok(assemble(sys, seed, run))
}

/// Integrates from an arbitrary point of the closed half-plane `X ≥ 0` for a
/// τ span of `tau_len` (or until an event terminates the orbit).
pub fn integrate_orbit(
    sys: &PhaseSystem,
    start: (f64, f64),
    direction: Direction,
    tau_len: f64,
    opts: &ShootOptions,
) -> Result<Trajectory> {
    if !(start.0 >= 0.0) {
        return Err(Error::Domain(format!("orbits start in X ≥ 0, got X = {}", start.0)));
    }
    let opts = ShootOptions { tau_span: tau_len, ..*opts };
    opts.validate()?;
    let seed = Seed {
        point: None,
        direction,
        state: start,
        description: format!("free start at ({}, {})", start.0, start.1),
    };
    let run = run(
        sys,
        ChartPoint::origin(start.0, start.1),
        0.0,
        direction,
        &opts,
        None,
        Mode::Shoot {
            stop_at_x_axis: opts.stop_at_x_axis,
        },
        true,
    )?;
    Ok(assemble(sys, seed, run))
}

fn assemble(sys: &PhaseSystem, seed: Seed, run: Run) -> Trajectory {
    Trajectory {
        samples: run.samples,
        events: run.events,
        seed,
        c: sys.speed(),
        system: *sys,
        termination: run.termination,
        end_offset: (run.last.offset(), run.last.y()),
        steps: run.steps,
    }
}

/// Events of the decay onto `P2` after a shot arrived there, continued until the
/// distance to `P2` falls below `floor`.
pub(crate) fn oscillation_tail(traj: &Trajectory, opts: &ShootOptions, floor: f64) -> Result<Vec<TrajectoryEvent>> {
    let tau = traj.samples.last().map_or(0.0, |s| s.tau);
    let start = ChartPoint::unity(traj.end_offset.0, traj.end_offset.1);
    let run = run(
        &traj.system,
        start,
        tau,
        traj.seed.direction,
        opts,
        None,
        Mode::Tail { floor },
        false,
    )?;
    Ok(run
        .events
        .into_iter()
        .filter(|e| matches!(e.kind, EventKind::XAxisCross | EventKind::UnitXCross))
        .collect())
}
