//! Explicit finite-volume solver for `u_t = κ (u^{m-1} u_x)_x + α u^p − β u^q`
//! on a uniform cell-centred grid, used to check wave profiles against the
//! full evolution.
//!
//! The diffusive flux across a face uses the arithmetic mean of `u^{m-1}` in
//! the two neighbouring cells, so it stays positive when one side is empty and
//! fronts of the degenerate problem keep moving. The time step is re-chosen
//! every step from the current state.

use serde::{Deserialize, Serialize};

use crate::connect::{Classification, WaveProfile};
use crate::error::{Error, Result};
use crate::model::{CanonicalModel, GeneralModel};

/// Coefficients and exponents of the equation being solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub p: f64,
    pub q: f64,
}

impl Coefficients {
    pub fn canonical(cm: &CanonicalModel) -> Self {
        Self {
            kappa: 1.0,
            alpha: 1.0,
            beta: 1.0,
            m: cm.m,
            p: cm.p,
            q: cm.q,
        }
    }

    pub fn general(g: &GeneralModel) -> Self {
        Self {
            kappa: g.kappa,
            alpha: g.alpha,
            beta: g.beta,
            m: g.m,
            p: g.p,
            q: g.q,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q < 0.0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("the solver needs q ≥ 0 (reaction unbounded at u = 0 otherwise), got {}", self.q),
            });
        }
        for (name, v) in [("kappa", self.kappa), ("alpha", self.alpha), ("beta", self.beta), ("m", self.m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// `u^k` for `u ≥ 0`, taking the cheap route for the common integer exponents.
fn pow(u: f64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else if k == 1.0 {
        u
    } else if k == 2.0 {
        u * u
    } else if k.fract() == 0.0 && k.abs() < 16.0 {
        u.powi(k as i32)
    } else {
        u.powf(k)
    }
}

/// Uniform grid of `n` cells on `[x_min, x_max]`; values live at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Grid> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            });
        }
        if n < 3 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need at least 3 cells, got {n}"),
            });
        }
        Ok(Grid { x_min, x_max, n })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centres(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    /// Fixed values in ghost cells beyond each end.
    Dirichlet { left: f64, right: f64 },
    /// No flux through either end; conserves mass when the reaction is off.
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeOptions {
    /// Fraction of the explicit diffusive stability limit, at most 0.9.
    pub cfl: f64,
    /// Below this the reaction is taken to be zero.
    pub u_floor: f64,
    /// Blow-up guard.
    pub u_max: f64,
    /// Largest negative excursion tolerated (and clamped) after a diffusive update.
    pub negativity_tol: f64,
    /// Switch for the reaction term, off only in tests of the diffusion alone.
    pub reaction: bool,
    pub boundary: Boundary,
    /// Level whose position is recorded after every step.
    pub front_level: f64,
}

impl Default for PdeOptions {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            u_floor: 1e-12,
            u_max: 10.0,
            negativity_tol: 1e-12,
            reaction: true,
            boundary: Boundary::Dirichlet { left: 1.0, right: 0.0 },
            front_level: 0.5,
        }
    }
}

/// Position of the tracked level at a given time; `None` when the level set is
/// absent or not a single downward crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub t: f64,
    pub x: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeRun {
    pub grid: Grid,
    /// Step size used by the most recent step.
    pub dt: f64,
    pub state: Vec<f64>,
    pub time: f64,
    pub front_track: Vec<FrontRecord>,
    pub coefficients: Coefficients,
    pub options: PdeOptions,
    pub steps: usize,
    #[serde(skip)]
    flux: Vec<f64>,
}

impl PdeRun {
    pub fn new(grid: Grid, state: Vec<f64>, coefficients: Coefficients, options: PdeOptions) -> Result<PdeRun> {
        coefficients.validate()?;
        if !(options.cfl > 0.0 && options.cfl <= 0.9) {
            return Err(Error::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 0.9], got {}", options.cfl),
            });
        }
        if !(options.front_level > 0.0 && options.front_level < options.u_max) {
            return Err(Error::InvalidParameter {
                name: "front_level",
                reason: format!("must be positive and below the blow-up guard, got {}", options.front_level),
            });
        }
        if state.len() != grid.n {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: format!("{} values for {} cells", state.len(), grid.n),
            });
        }
        if let Some(i) = state.iter().position(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(Error::Negativity {
                x: grid.x(i),
                u: state[i],
            });
        }
        let mut run = PdeRun {
            grid,
            dt: 0.0,
            state,
            time: 0.0,
            front_track: Vec::new(),
            coefficients,
            options,
            steps: 0,
            flux: vec![0.0; grid.n + 1],
        };
        run.record_front();
        Ok(run)
    }

    /// Canonical run with Dirichlet data `1` on the left and `0` on the right.
    pub fn canonical(grid: Grid, state: Vec<f64>, cm: &CanonicalModel, cfl: f64) -> Result<PdeRun> {
        PdeRun::new(
            grid,
            state,
            Coefficients::canonical(cm),
            PdeOptions {
                cfl,
                ..PdeOptions::default()
            },
        )
    }

    fn diffusivity(&self, u: f64) -> f64 {
        let k = self.coefficients.m - 1.0;
        if k < 0.0 {
            // Singular diffusivity: regularize at the reaction floor.
            pow(u.max(self.options.u_floor), k)
        } else {
            pow(u, k)
        }
    }

    fn reaction(&self, u: f64) -> f64 {
        if !self.options.reaction || u < self.options.u_floor {
            return 0.0;
        }
        let c = &self.coefficients;
        c.alpha * pow(u, c.p) - c.beta * pow(u, c.q)
    }

    fn ghosts(&self) -> Option<(f64, f64)> {
        match self.options.boundary {
            Boundary::Dirichlet { left, right } => Some((left, right)),
            Boundary::ZeroFlux => None,
        }
    }

    /// Largest stable step for the current state.
    pub fn stable_dt(&self) -> f64 {
        let dx = self.grid.dx();
        let mut d_max = self.state.iter().map(|&u| self.diffusivity(u)).fold(0.0, f64::max);
        let mut u_top = self.state.iter().copied().fold(0.0, f64::max);
        if let Some((l, r)) = self.ghosts() {
            d_max = d_max.max(self.diffusivity(l)).max(self.diffusivity(r));
            u_top = u_top.max(l).max(r);
        }
        let c = &self.coefficients;
        let dt_diff = if d_max > 0.0 {
            self.options.cfl * dx * dx / (2.0 * c.kappa * d_max)
        } else {
            f64::INFINITY
        };
        let rate = if self.options.reaction && u_top >= self.options.u_floor {
            (c.alpha * c.p * pow(u_top, c.p - 1.0) - c.beta * c.q * pow(u_top, c.q - 1.0)).abs()
        } else {
            0.0
        };
        let dt_react = if rate > 0.0 { 0.5 / rate } else { f64::INFINITY };
        let dt = dt_diff.min(dt_react);
        if dt.is_finite() {
            dt
        } else {
            self.options.cfl * dx * dx / (2.0 * c.kappa)
        }
    }

    /// One explicit step, no longer than `max_dt`.
    pub fn step_capped(&mut self, max_dt: f64) -> Result<()> {
        let dt = self.stable_dt().min(max_dt);
        let n = self.grid.n;
        let dx = self.grid.dx();
        let kappa = self.coefficients.kappa;
        let ghosts = self.ghosts();

        let mut flux = std::mem::take(&mut self.flux);
        flux.resize(n + 1, 0.0);
        let d: Vec<f64> = self.state.iter().map(|&u| self.diffusivity(u)).collect();
        for i in 1..n {
            flux[i] = -kappa * 0.5 * (d[i - 1] + d[i]) * (self.state[i] - self.state[i - 1]) / dx;
        }
        match ghosts {
            Some((l, r)) => {
                flux[0] = -kappa * 0.5 * (self.diffusivity(l) + d[0]) * (self.state[0] - l) / dx;
                flux[n] = -kappa * 0.5 * (d[n - 1] + self.diffusivity(r)) * (r - self.state[n - 1]) / dx;
            }
            None => {
                flux[0] = 0.0;
                flux[n] = 0.0;
            }
        }

        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let u = self.state[i];
            let diffused = u + dt / dx * (flux[i] - flux[i + 1]);
            if diffused < -self.options.negativity_tol {
                return Err(Error::Negativity {
                    x: self.grid.x(i),
                    u: diffused,
                });
            }
            let r = self.reaction(u);
            let mut v = diffused + dt * r;
            if v < 0.0 {
                // Only the sink can push a non-negative value below zero; for
                // q < 1 the local reaction ODE itself reaches zero in finite time.
                v = 0.0;
            }
            if !(v <= self.options.u_max) {
                return Err(Error::StabilityViolation { x: self.grid.x(i), u: v });
            }
            next.push(v);
        }
        self.flux = flux;
        self.state = next;
        self.time += dt;
        self.dt = dt;
        self.steps += 1;
        self.record_front();
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        self.step_capped(f64::INFINITY)
    }

    /// Advances to exactly `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.time < t {
            let remaining = t - self.time;
            self.step_capped(remaining)?;
            if t - self.time <= 1e-12 * t.abs().max(1.0) {
                self.time = t;
            }
        }
        Ok(())
    }

    fn record_front(&mut self) {
        let x = front_position(&self.grid, &self.state, self.options.front_level);
        self.front_track.push(FrontRecord { t: self.time, x });
    }

    pub fn mass(&self) -> f64 {
        self.state.iter().sum::<f64>() * self.grid.dx()
    }
}

/// Position of the single downward crossing of `level`, by linear interpolation
/// between cell centres.
pub fn front_position(grid: &Grid, u: &[f64], level: f64) -> Option<f64> {
    let mut found = None;
    for i in 0..u.len().saturating_sub(1) {
        let (a, b) = (u[i], u[i + 1]);
        let down = a >= level && b < level;
        let up = a < level && b >= level;
        if up || (down && found.is_some()) {
            return None;
        }
        if down {
            let s = (a - level) / (a - b);
            found = Some(grid.x(i) + s * grid.dx());
        }
    }
    found
}

/// Least-squares slope of the tracked front over `[t1, t2]`.
pub fn fit_front_speed(track: &[FrontRecord], window: (f64, f64)) -> Result<f64> {
    let (t1, t2) = window;
    let mut pts = Vec::new();
    for rec in track.iter().filter(|r| r.t >= t1 && r.t <= t2) {
        match rec.x {
            Some(x) => pts.push((rec.t, x)),
            None => {
                return Err(Error::NoFront(format!(
                    "level set absent or not monotone at t = {}",
                    rec.t
                )))
            }
        }
    }
    if pts.len() < 10 {
        return Err(Error::NoFront(format!(
            "{} front records in [{t1}, {t2}], at least 10 needed",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    if stt == 0.0 {
        return Err(Error::NoFront("all front records at one time".into()));
    }
    Ok(stx / stt)
}

/// Front speed of a run at its tracked level.
pub fn measure_front_speed(run: &PdeRun, level: f64, window: (f64, f64)) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("must lie in (0, 1), got {level}"),
        });
    }
    if level != run.options.front_level {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("run tracks level {}, not {level}", run.options.front_level),
        });
    }
    fit_front_speed(&run.front_track, window)
}

/// Rightmost cell centre where `u` exceeds `threshold`.
pub fn support_edge(run: &PdeRun, threshold: f64) -> Result<Option<f64>> {
    if !(threshold >= run.options.u_floor) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must be at least the reaction floor {}, got {threshold}", run.options.u_floor),
        });
    }
    Ok(run.state.iter().rposition(|&u| u > threshold).map(|i| run.grid.x(i)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectOptions {
    pub n: usize,
    pub cfl: f64,
    /// Computational domain; chosen from the profile's flat regions when absent.
    pub domain: Option<(f64, f64)>,
    /// Number of equally spaced times at which the error is measured.
    pub checkpoints: usize,
    /// Times at which the state is kept.
    pub snapshot_times: Vec<f64>,
}

impl Default for AdvectOptions {
    fn default() -> Self {
        Self {
            n: 4000,
            cfl: 0.4,
            domain: None,
            checkpoints: 50,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectReport {
    /// Largest `‖u(·, t) − f(· − ct)‖∞` over the checkpoints.
    pub max_error: f64,
    /// Fitted speed of the `u = 1/2` level; `None` when there is no front to track.
    pub measured_speed: Option<f64>,
    pub domain: (f64, f64),
    pub dx: f64,
    pub steps: usize,
    pub max_u: f64,
    pub snapshots: Vec<Snapshot>,
    pub front_track: Vec<FrontRecord>,
}

/// Deviation from the rest states that the boundary regions must stay within.
const FLAT: f64 = 1e-6;
const MARGIN: f64 = 2.0;

/// Domain whose ends sit in the flat parts of the profile at all times in `[0, t_end]`.
pub fn suggested_domain(profile: &WaveProfile, t_end: f64) -> (f64, f64) {
    let shift = profile.c * t_end;
    let left_flat = profile
        .samples
        .iter()
        .find(|s| (s.f - 1.0).abs() > FLAT)
        .map_or(-MARGIN, |s| s.xi);
    let right_flat = profile
        .samples
        .iter()
        .rev()
        .find(|s| s.f > FLAT)
        .map_or(MARGIN, |s| s.xi);
    (
        left_flat.min(left_flat + shift) - MARGIN,
        right_flat.max(right_flat + shift) + MARGIN,
    )
}

/// Evolves `u(x, 0) = f(x)` to `t_end` and compares with the translate `f(x − ct)`.
pub fn advect_profile_test(profile: &WaveProfile, cm: &CanonicalModel, t_end: f64, opts: &AdvectOptions) -> Result<AdvectReport> {
    cm.ensure_supported()?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "T",
            reason: format!("must be finite and non-negative, got {t_end}"),
        });
    }
    let constant = profile.is_constant();
    if profile.classification == Classification::None && !constant {
        return Err(Error::InvalidParameter {
            name: "profile",
            reason: "profile carries no travelling wave".into(),
        });
    }
    let suggested = if constant {
        (-10.0, 10.0)
    } else {
        suggested_domain(profile, t_end)
    };
    let (x_min, x_max) = opts.domain.unwrap_or(suggested);
    let grid = Grid::new(x_min, x_max, opts.n)?;
    let dx = grid.dx();
    let too_small = |cells: usize| Error::DomainTooSmall {
        cells,
        suggested_min: suggested.0,
        suggested_max: suggested.1,
    };
    let c = profile.c;
    let exact = |x: f64, t: f64| profile.eval(x - c * t);
    if !constant {
        for t in [0.0, t_end] {
            if (exact(x_min, t) - 1.0).abs() > 1e-3 || exact(x_max, t) > 1e-3 {
                return Err(too_small(0));
            }
        }
    }

    let xs = grid.centres();
    let state: Vec<f64> = xs.iter().map(|&x| exact(x, 0.0)).collect();
    let right = if constant { 1.0 } else { 0.0 };
    let mut run = PdeRun::new(
        grid,
        state,
        Coefficients::canonical(cm),
        PdeOptions {
            cfl: opts.cfl,
            boundary: Boundary::Dirichlet { left: 1.0, right },
            ..PdeOptions::default()
        },
    )?;

    let mut times: Vec<f64> = (1..=opts.checkpoints.max(1))
        .map(|k| t_end * k as f64 / opts.checkpoints.max(1) as f64)
        .chain(opts.snapshot_times.iter().copied().filter(|&t| t >= 0.0 && t <= t_end))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mut snapshots = Vec::new();
    let keep = |t: f64| opts.snapshot_times.contains(&t);
    if keep(0.0) {
        snapshots.push(Snapshot {
            t: 0.0,
            x: xs.clone(),
            u: run.state.clone(),
        });
    }
    let mut max_error: f64 = 0.0;
    let mut max_u: f64 = run.state.iter().copied().fold(0.0, f64::max);
    let guard = 10.0 * dx;
    for &t in times.iter().filter(|&&t| t > 0.0) {
        let before = run.front_track.len();
        run.advance_to(t)?;
        if !constant {
            for rec in &run.front_track[before..] {
                if let Some(x) = rec.x {
                    if x - x_min < guard || x_max - x < guard {
                        let cells = ((x - x_min).min(x_max - x) / dx).max(0.0) as usize;
                        return Err(too_small(cells));
                    }
                }
            }
        }
        let err = xs
            .iter()
            .zip(&run.state)
            .map(|(&x, &u)| (u - exact(x, t)).abs())
            .fold(0.0, f64::max);
        max_error = max_error.max(err);
        max_u = run.state.iter().copied().fold(max_u, f64::max);
        if keep(t) {
            snapshots.push(Snapshot {
                t,
                x: xs.clone(),
                u: run.state.clone(),
            });
        }
    }

    let measured_speed = if constant || t_end == 0.0 {
        None
    } else {
        match fit_front_speed(&run.front_track, (0.2 * t_end, t_end)) {
            Ok(s) => Some(s),
            Err(Error::NoFront(reason)) => {
                log::warn!("no front speed: {reason}");
                None
            }
            Err(e) => return Err(e),
        }
    };
    Ok(AdvectReport {
        max_error,
        measured_speed,
        domain: (x_min, x_max),
        dx,
        steps: run.steps,
        max_u,
        snapshots,
        front_track: run.front_track,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(m: f64, p: f64, q: f64) -> CanonicalModel {
        CanonicalModel::new(m, p, q).unwrap()
    }

    #[test]
    fn rest_states_are_preserved() {
        for (m, p, q) in [(2.0, 2.0, 1.0), (1.0, 1.0, 0.5), (3.0, 4.5, 0.5), (1.0, 2.0, 0.0)] {
            let cm = model(m, p, q);
            let grid = Grid::new(0.0, 1.0, 50).unwrap();
            let mut one = PdeRun::new(
                grid,
                vec![1.0; 50],
                Coefficients::canonical(&cm),
                PdeOptions {
                    boundary: Boundary::Dirichlet { left: 1.0, right: 1.0 },
                    ..PdeOptions::default()
                },
            )
            .unwrap();
            let mut zero = PdeRun::new(
                grid,
                vec![0.0; 50],
                Coefficients::canonical(&cm),
                PdeOptions {
                    boundary: Boundary::Dirichlet { left: 0.0, right: 0.0 },
                    ..PdeOptions::default()
                },
            )
            .unwrap();
            for _ in 0..20 {
                one.step().unwrap();
                zero.step().unwrap();
            }
            assert!(one.state.iter().all(|&u| u == 1.0), "({m},{p},{q})");
            assert!(zero.state.iter().all(|&u| u == 0.0), "({m},{p},{q})");
        }
    }

    #[test]
    fn mass_changes_by_the_reaction_only() {
        let cm = model(1.0, 2.0, 1.0);
        let grid = Grid::new(-5.0, 5.0, 200).unwrap();
        let bump: Vec<f64> = grid.centres().iter().map(|x| 0.8 * (-x * x).exp()).collect();
        let mut run = PdeRun::new(
            grid,
            bump.clone(),
            Coefficients::canonical(&cm),
            PdeOptions {
                boundary: Boundary::ZeroFlux,
                ..PdeOptions::default()
            },
        )
        .unwrap();
        let before = run.mass();
        let source: f64 = bump.iter().map(|&u| if u < 1e-12 { 0.0 } else { u * u - u }).sum::<f64>() * grid.dx();
        run.step().unwrap();
        assert!((run.mass() - before - run.dt * source).abs() < 1e-12);
    }

    #[test]
    fn diffusion_alone_conserves_mass() {
        let cm = model(2.0, 2.0, 1.0);
        let grid = Grid::new(-2.0, 2.0, 100).unwrap();
        let state = grid.centres().iter().map(|x| if x.abs() < 0.7 { 1.0 } else { 0.0 }).collect();
        let mut run = PdeRun::new(
            grid,
            state,
            Coefficients::canonical(&cm),
            PdeOptions {
                reaction: false,
                boundary: Boundary::ZeroFlux,
                ..PdeOptions::default()
            },
        )
        .unwrap();
        let mut mass = run.mass();
        for _ in 0..200 {
            run.step().unwrap();
            assert!((run.mass() - mass).abs() < 1e-12);
            mass = run.mass();
        }
    }

    #[test]
    fn synthetic_front_tracks() {
        let exact: Vec<FrontRecord> = (0..100)
            .map(|i| {
                let t = i as f64 * 0.01;
                FrontRecord { t, x: Some(2.0 - 3.0 * t) }
            })
            .collect();
        assert_relative_eq!(fit_front_speed(&exact, (0.0, 1.0)).unwrap(), -3.0, epsilon = 1e-12);
        assert!(matches!(fit_front_speed(&exact[..9], (0.0, 1.0)), Err(Error::NoFront(_))));
        let mut gap = exact.clone();
        gap[50].x = None;
        assert!(matches!(fit_front_speed(&gap, (0.0, 1.0)), Err(Error::NoFront(_))));
    }

    #[test]
    fn front_position_needs_a_single_crossing() {
        let grid = Grid::new(0.0, 4.0, 4).unwrap();
        assert_eq!(front_position(&grid, &[1.0, 1.0, 0.0, 0.0], 0.5), Some(2.0));
        assert_eq!(front_position(&grid, &[1.0, 0.0, 1.0, 0.0], 0.5), None);
        assert_eq!(front_position(&grid, &[0.0; 4], 0.5), None);
    }

    #[test]
    fn support_edge_of_simple_states() {
        let cm = model(1.0, 1.0, 0.5);
        let grid = Grid::new(-1.0, 2.0, 300).unwrap();
        let smooth: Vec<f64> = grid
            .centres()
            .iter()
            .map(|&x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 })
            .collect();
        let run = PdeRun::canonical(grid, smooth, &cm, 0.4).unwrap();
        let edge = support_edge(&run, 1e-6).unwrap().unwrap();
        assert!((edge - 1.0).abs() <= grid.dx());
        let empty = PdeRun::canonical(grid, vec![0.0; 300], &cm, 0.4).unwrap();
        assert_eq!(support_edge(&empty, 1e-6).unwrap(), None);
        assert!(support_edge(&empty, 1e-15).is_err());
    }

    #[test]
    fn invalid_runs_are_rejected() {
        let cm = model(2.0, 2.0, 1.0);
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        assert!(PdeRun::canonical(grid, vec![0.0; 10], &cm, 0.95).is_err());
        assert!(PdeRun::canonical(grid, vec![0.0; 9], &cm, 0.4).is_err());
        assert!(matches!(
            PdeRun::canonical(grid, vec![-1.0; 10], &cm, 0.4),
            Err(Error::Negativity { .. })
        ));
        assert!(PdeRun::canonical(grid, vec![0.0; 10], &model(2.0, 2.0, -0.5), 0.4).is_err());
        assert!(Grid::new(1.0, 0.0, 10).is_err());
    }

    #[test]
    fn blow_up_is_caught() {
        let cm = model(1.0, 3.0, 1.0);
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let mut run = PdeRun::new(
            grid,
            vec![9.5; 10],
            Coefficients::canonical(&cm),
            PdeOptions {
                boundary: Boundary::ZeroFlux,
                ..PdeOptions::default()
            },
        )
        .unwrap();
        let mut outcome = Ok(());
        for _ in 0..1000 {
            outcome = run.step();
            if outcome.is_err() {
                break;
            }
        }
        assert!(matches!(outcome, Err(Error::StabilityViolation { .. })));
    }

    #[test]
    fn constant_profile_has_no_front() {
        let cm = model(2.0, 2.0, 1.0);
        let profile = WaveProfile::constant(-1.0);
        let opts = AdvectOptions {
            n: 40,
            ..AdvectOptions::default()
        };
        let rep = advect_profile_test(&profile, &cm, 0.5, &opts).unwrap();
        assert!(rep.max_error < 1e-14);
        assert_eq!(rep.measured_speed, None);
        let rep = advect_profile_test(&profile, &cm, 0.0, &opts).unwrap();
        assert_eq!(rep.max_error, 0.0);
    }
}
