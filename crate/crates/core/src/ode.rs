//! Dormand–Prince 5(4) integrator with cubic Hermite dense output.
//!
//! The stepper only advances the state; event handling lives with the caller,
//! which inspects each accepted [`Step`] and localizes sign changes with
//! [`locate_root`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (fifth minus embedded fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// One accepted step, with enough data for cubic Hermite interpolation.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Cubic Hermite interpolant on `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.h();
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        })
    }
}

/// Localizes a sign change of `g` inside an accepted step by bisection on the
/// dense output, to `t_tol` in time. Returns `None` if `g` has no sign change
/// between the step end points.
pub fn locate_root<const N: usize>(
    step: &Step<N>,
    g: impl Fn(f64, &[f64; N]) -> f64,
    t_tol: f64,
) -> Option<(f64, [f64; N])> {
    let g0 = g(step.t0, &step.y0);
    let g1 = g(step.t1, &step.y1);
    if g0 == 0.0 {
        return Some((step.t0, step.y0));
    }
    if g0.signum() == g1.signum() && g1 != 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (step.t0, step.t1);
    let mut g_lo = g0;
    for _ in 0..200 {
        if (hi - lo).abs() <= t_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let y = step.interpolate(mid);
        let gm = g(mid, &y);
        if gm == 0.0 {
            return Some((mid, y));
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Some((t, step.interpolate(t)))
}

/// Adaptive Dormand–Prince stepper. Integrates forward when constructed with a
/// positive direction and backward otherwise.
pub struct Dopri5<const N: usize, F> {
    rhs: F,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    h: f64,
    direction: f64,
    tol: Tolerances,
    max_step: f64,
    accepted: usize,
    rejected: usize,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, t0: f64, y0: [f64; N], direction: f64, tol: Tolerances, max_step: f64) -> Self {
        let f = rhs(t0, &y0);
        let direction = if direction < 0.0 { -1.0 } else { 1.0 };
        let mut stepper = Self {
            rhs,
            t: t0,
            y: y0,
            f,
            h: 0.0,
            direction,
            tol,
            max_step,
            accepted: 0,
            rejected: 0,
        };
        stepper.h = direction * stepper.initial_step();
        stepper
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    pub fn accepted(&self) -> usize {
        self.accepted
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    /// Changes the step cap, shrinking the next trial step if needed.
    pub fn set_max_step(&mut self, max_step: f64) {
        self.max_step = max_step;
        self.h = self.direction * self.h.abs().min(max_step);
    }

    /// Derivative at the current point.
    pub fn derivative(&self) -> [f64; N] {
        self.f
    }

    fn scale(&self, i: usize, a: &[f64; N], b: &[f64; N]) -> f64 {
        self.tol.abs + self.tol.rel * a[i].abs().max(b[i].abs())
    }

    fn norm(&self, v: &[f64; N], ref_y: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let r = v[i] / self.scale(i, ref_y, ref_y);
                r * r
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    // Hairer–Nørsett–Wanner starting step heuristic.
    fn initial_step(&self) -> f64 {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.f, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_step);
        let y1: [f64; N] = std::array::from_fn(|i| self.y[i] + self.direction * h0 * self.f[i]);
        let f1 = (self.rhs)(self.t + self.direction * h0, &y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - self.f[i]);
        let d2 = self.norm(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step)
    }

    /// Attempts steps until one is accepted.
    pub fn step(&mut self) -> Result<Step<N>> {
        loop {
            let h = self.h;
            if h.abs() < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepFailure { tau: self.t, step: h });
            }
            let (y1, f1, err) = self.attempt(h);
            if err.is_finite() && err <= 1.0 {
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                let step = Step {
                    t0: self.t,
                    y0: self.y,
                    f0: self.f,
                    t1: self.t + h,
                    y1,
                    f1,
                };
                self.t += h;
                self.y = y1;
                self.f = f1;
                self.h = self.direction * (h.abs() * factor).min(self.max_step);
                self.accepted += 1;
                return Ok(step);
            }
            self.rejected += 1;
            let factor = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
            } else {
                MIN_FACTOR
            };
            self.h = h * factor;
        }
    }

    fn attempt(&self, h: f64) -> ([f64; N], [f64; N], f64) {
        let (t, y, k1) = (self.t, &self.y, &self.f);
        let stage = |coef: &[(f64, &[f64; N])]| -> [f64; N] {
            std::array::from_fn(|i| y[i] + h * coef.iter().map(|(a, k)| a * k[i]).sum::<f64>())
        };
        let k2 = (self.rhs)(t + C2 * h, &stage(&[(A21, k1)]));
        let k3 = (self.rhs)(t + C3 * h, &stage(&[(A31, k1), (A32, &k2)]));
        let k4 = (self.rhs)(t + C4 * h, &stage(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = (self.rhs)(
            t + C5 * h,
            &stage(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = (self.rhs)(
            t + h,
            &stage(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = stage(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = (self.rhs)(t + h, &y1);
        let mut sum = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let r = e / self.scale(i, y, &y1);
            sum += r * r;
        }
        (y1, k7, (sum / N as f64).sqrt())
    }
}
