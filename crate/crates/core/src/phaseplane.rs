//! First-order phase-plane systems for travelling waves, their fixed points and
//! the analytic certificates attached to them.
//!
//! Writing `u(x, t) = f(x − ct)` turns the canonical equation into
//! `(f^{m-1} f')' + c f' + f^p − f^q = 0`. Two changes of variables turn that
//! into a planar autonomous system:
//!
//! * Case I (`m + q > 2`): `X = f^{m+q-2}`, `Y = f^{m-2} f'`, giving
//!   `X' = γ X Y`, `Y' = −Y(Y + c) + X − X^k` with `γ = m+q−2`, `k = (m+p−2)/(m+q−2)`.
//! * Case II (`0 < m + q ≤ 2`): `X = f^k`, `Y = √((m+q)/2) f^{(m-q-2)/2} f'`, giving
//!   `X' = γ X Y`, `Y' = −Y(Y + c₁ X^{k₁}) + 1 − X^{k₂}`.
//!
//! In both cases `P2 = (1, 0)` is the state `f ≡ 1`, and the line `X = 0` is `f = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{dpowr, pow1p_m1, powr};
use crate::model::{CanonicalModel, Regime};

/// Case I system, `m + q > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSystemI {
    pub gamma: f64,
    pub k: f64,
    pub c: f64,
}

/// Case II system, `0 < m + q ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSystemII {
    pub gamma: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub c1: f64,
    /// Wave speed before rescaling, `c₁ = c √(2/(m+q))`.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhaseSystem {
    CaseI(PhaseSystemI),
    CaseII(PhaseSystemII),
}

/// Builds the reduced system for wave speed `c ≥ 0` in the transformed frame.
pub fn build_system(cm: &CanonicalModel, c: f64) -> Result<PhaseSystem> {
    cm.ensure_supported()?;
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("phase-plane speed must be finite and non-negative, got {c}"),
        });
    }
    let (m, p, q) = (cm.m, cm.p, cm.q);
    let mq = m + q;
    Ok(match cm.regime {
        Regime::CaseI => {
            let gamma = mq - 2.0;
            PhaseSystem::CaseI(PhaseSystemI {
                gamma,
                k: (m + p - 2.0) / gamma,
                c,
            })
        }
        Regime::CaseII => {
            let half_gap = (2.0 - mq) / 2.0;
            let (k, k1, k2) = if mq == 2.0 {
                (p - q, 0.0, 1.0)
            } else if half_gap <= p - q {
                (half_gap, 1.0, 2.0 * (p - q) / (2.0 - mq))
            } else {
                (p - q, (2.0 - mq) / (2.0 * (p - q)), 1.0)
            };
            PhaseSystem::CaseII(PhaseSystemII {
                gamma: 2.0 * k / mq,
                k,
                k1,
                k2,
                c1: c * (2.0 / mq).sqrt(),
                c,
            })
        }
        Regime::Unsupported => unreachable!("ensure_supported rejects this regime"),
    })
}

impl PhaseSystemI {
    fn field(&self, x: f64, y: f64) -> [f64; 2] {
        [self.gamma * x * y, -y * (y + self.c) + x - powr(x, self.k)]
    }

    fn field_near_unity(&self, u: f64, y: f64) -> [f64; 2] {
        [
            self.gamma * (1.0 + u) * y,
            -y * (y + self.c) + u - pow1p_m1(u, self.k),
        ]
    }

    fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [
            [self.gamma * y, self.gamma * x],
            [1.0 - dpowr(x, self.k), -2.0 * y - self.c],
        ]
    }
}

impl PhaseSystemII {
    fn field(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.gamma * x * y,
            -y * (y + self.c1 * powr(x, self.k1)) + 1.0 - powr(x, self.k2),
        ]
    }

    fn field_near_unity(&self, u: f64, y: f64) -> [f64; 2] {
        let damping = self.c1 * (self.k1 * u.ln_1p()).exp();
        [
            self.gamma * (1.0 + u) * y,
            -y * (y + damping) - pow1p_m1(u, self.k2),
        ]
    }

    fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [
            [self.gamma * y, self.gamma * x],
            [
                -y * self.c1 * dpowr(x, self.k1) - dpowr(x, self.k2),
                -2.0 * y - self.c1 * powr(x, self.k1),
            ],
        ]
    }

    /// Equilibria on the line `X = 0`, as `(positive root, negative root)` of
    /// `Y² + c₁·[k₁ = 0]·Y − 1 = 0`.
    fn axis_equilibria(&self) -> (f64, f64) {
        let damping = if self.k1 == 0.0 { self.c1 } else { 0.0 };
        let disc = (damping * damping + 4.0).sqrt();
        // Stable forms of the two quadratic roots.
        ((2.0) / (damping + disc), -(damping + disc) / 2.0)
    }
}

/// Which equilibrium of the reduced system a point refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointLabel {
    /// The state `f = 0` from which the wave leaves.
    P0,
    /// The second equilibrium on the line `X = 0`.
    P1,
    /// The state `f ≡ 1`.
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointKind {
    SaddleNode,
    Saddle,
    StableNode,
    StableFocus,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointInfo {
    pub label: FixedPointLabel,
    pub location: (f64, f64),
    pub jacobian: [[f64; 2]; 2],
    #[serde(serialize_with = "serialize_eigenvalues")]
    pub eigenvalues: [Complex64; 2],
    pub kind: FixedPointKind,
    /// Set when the discriminant vanishes (node/focus boundary) or an eigenvalue is zero.
    pub degenerate: bool,
}

fn serialize_eigenvalues<S: serde::Serializer>(ev: &[Complex64; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for z in ev {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Roots of `λ² − tr λ + det = 0`.
pub fn eigenvalues(j: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = if tr >= 0.0 { 0.5 * (tr + s) } else { 0.5 * (tr - s) };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (a, b) = if big <= small { (big, small) } else { (small, big) };
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(0.5 * tr, -im), Complex64::new(0.5 * tr, im)]
    }
}

/// `tr² − 4 det` of a 2×2 matrix; its sign separates nodes from foci.
pub fn discriminant(j: &[[f64; 2]; 2]) -> f64 {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    tr * tr - 4.0 * det
}

fn classify(j: &[[f64; 2]; 2]) -> (FixedPointKind, bool) {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let scale = tr * tr + 4.0 * det.abs();
    let disc = tr * tr - 4.0 * det;
    if det < 0.0 {
        (FixedPointKind::Saddle, false)
    } else if det == 0.0 {
        // Zero eigenvalue; the caller upgrades to a saddle-node when the
        // reduced flow has a non-vanishing quadratic term.
        (FixedPointKind::Degenerate, true)
    } else if tr >= 0.0 {
        (FixedPointKind::Degenerate, false)
    } else if disc.abs() <= 1e-12 * scale {
        (FixedPointKind::StableNode, true)
    } else if disc > 0.0 {
        (FixedPointKind::StableNode, false)
    } else {
        (FixedPointKind::StableFocus, false)
    }
}

impl PhaseSystem {
    /// Wave speed `c` in the transformed frame.
    pub fn speed(&self) -> f64 {
        match self {
            PhaseSystem::CaseI(s) => s.c,
            PhaseSystem::CaseII(s) => s.c,
        }
    }

    /// Speed parameter multiplying the damping term (`c` in Case I, `c₁` in Case II).
    pub fn damping(&self) -> f64 {
        match self {
            PhaseSystem::CaseI(s) => s.c,
            PhaseSystem::CaseII(s) => s.c1,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            PhaseSystem::CaseI(s) => s.gamma,
            PhaseSystem::CaseII(s) => s.gamma,
        }
    }

    /// The same system with the speed reversed, which is the image of this one
    /// under `(ξ, c) → (−ξ, −c)`.
    pub fn mirrored(&self) -> PhaseSystem {
        match *self {
            PhaseSystem::CaseI(s) => PhaseSystem::CaseI(PhaseSystemI { c: -s.c, ..s }),
            PhaseSystem::CaseII(s) => PhaseSystem::CaseII(PhaseSystemII { c1: -s.c1, c: -s.c, ..s }),
        }
    }

    pub fn vector_field(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("X must be non-negative, got {x}")));
        }
        let [dx, dy] = self.field(x, y);
        Ok((dx, dy))
    }

    pub(crate) fn field(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            PhaseSystem::CaseI(s) => s.field(x, y),
            PhaseSystem::CaseII(s) => s.field(x, y),
        }
    }

    /// Vector field in the coordinates `(X − 1, Y)`, evaluated without
    /// cancellation so that tiny offsets from `P2` keep full relative precision.
    pub(crate) fn field_near_unity(&self, u: f64, y: f64) -> [f64; 2] {
        match self {
            PhaseSystem::CaseI(s) => s.field_near_unity(u, y),
            PhaseSystem::CaseII(s) => s.field_near_unity(u, y),
        }
    }

    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        match self {
            PhaseSystem::CaseI(s) => s.jacobian(x, y),
            PhaseSystem::CaseII(s) => s.jacobian(x, y),
        }
    }

    /// Location of a labelled equilibrium, if it exists for this system.
    pub fn fixed_point(&self, label: FixedPointLabel) -> Option<(f64, f64)> {
        match (self, label) {
            (_, FixedPointLabel::P2) => Some((1.0, 0.0)),
            (PhaseSystem::CaseI(_), FixedPointLabel::P0) => Some((0.0, 0.0)),
            (PhaseSystem::CaseI(s), FixedPointLabel::P1) => (s.c != 0.0).then_some((0.0, -s.c)),
            (PhaseSystem::CaseII(s), FixedPointLabel::P0) => Some((0.0, s.axis_equilibria().0)),
            (PhaseSystem::CaseII(s), FixedPointLabel::P1) => Some((0.0, s.axis_equilibria().1)),
        }
    }

    pub fn fixed_points(&self) -> Vec<FixedPointInfo> {
        [FixedPointLabel::P0, FixedPointLabel::P1, FixedPointLabel::P2]
            .into_iter()
            .filter_map(|label| self.fixed_point(label).map(|loc| self.describe(label, loc)))
            .collect()
    }

    fn describe(&self, label: FixedPointLabel, (x, y): (f64, f64)) -> FixedPointInfo {
        let jacobian = self.jacobian(x, y);
        let (mut kind, degenerate) = classify(&jacobian);
        if let (PhaseSystem::CaseI(s), FixedPointLabel::P0) = (self, label) {
            // Zero eigenvalue with centre direction Y = X/c; on it the reduced
            // flow is X' = (γ/c) X², whose non-zero quadratic coefficient makes
            // P0 a saddle-node. With c = 0 both eigenvalues vanish.
            if s.c != 0.0 && s.gamma / s.c != 0.0 {
                kind = FixedPointKind::SaddleNode;
            }
        }
        FixedPointInfo {
            label,
            location: (x, y),
            jacobian,
            eigenvalues: eigenvalues(&jacobian),
            kind,
            degenerate,
        }
    }
}

/// Divergence of the Dulac-weighted field `B·(P, Q)` with `B = X^{2/γ − 1}`.
pub fn dulac_divergence(sys: &PhaseSystemI, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Dulac weight needs X > 0, got {x}")));
    }
    let weight = powr(x, 2.0 / sys.gamma - 1.0);
    // ∂(B γ X Y)/∂X = γ Y ∂(X^{2/γ})/∂X
    let d_bp_dx = sys.gamma * y * dpowr(x, 2.0 / sys.gamma);
    // B ∂Q/∂Y
    let d_bq_dy = weight * (-2.0 * y - sys.c);
    Ok(d_bp_dx + d_bq_dy)
}

/// Slope `a = c / (2(m+q−2))` of the sloped side of the invariant region.
pub fn region_g_slope(sys: &PhaseSystemI, mq: f64) -> f64 {
    sys.c / (2.0 * (mq - 2.0))
}

/// Normal flux `R(X) = n·V` of the vector field through the line `Y = a(1 − X)`.
pub fn region_g_residual(sys: &PhaseSystemI, mq: f64, x: f64) -> f64 {
    let a = region_g_slope(sys, mq);
    let c = sys.c;
    -x * x * a * a * (mq - 1.0) + x * (a * a * mq + c * a + 1.0) - a * a - c * a - powr(x, sys.k)
}

/// `Y²` on the explicit zero-speed trajectory through the origin.
pub fn zero_speed_curve(sys: &PhaseSystemI, x: f64) -> f64 {
    let (g, k) = (sys.gamma, sys.k);
    2.0 * x / (2.0 + g) - 2.0 * powr(x, k) / (2.0 + g * k)
}

/// Where the zero-speed trajectory through the origin meets the X axis again.
pub fn zero_speed_x0(sys: &PhaseSystemI) -> f64 {
    let (g, k) = (sys.gamma, sys.k);
    ((2.0 + g * k) / (2.0 + g)).powf(1.0 / (k - 1.0))
}

/// First integral of the zero-speed system, `X^{2/γ}(Y² − 2X/(2+γ) + 2X^k/(2+γk))`.
/// It vanishes on the trajectory through the origin.
pub fn zero_speed_first_integral(sys: &PhaseSystemI, x: f64, y: f64) -> f64 {
    powr(x, 2.0 / sys.gamma) * (y * y - zero_speed_curve(sys, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::critical_speed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn case_one(m: f64, p: f64, q: f64, c: f64) -> PhaseSystemI {
        match build_system(&CanonicalModel::new(m, p, q).unwrap(), c).unwrap() {
            PhaseSystem::CaseI(s) => s,
            other => panic!("expected Case I, got {other:?}"),
        }
    }

    fn case_two(m: f64, p: f64, q: f64, c: f64) -> PhaseSystemII {
        match build_system(&CanonicalModel::new(m, p, q).unwrap(), c).unwrap() {
            PhaseSystem::CaseII(s) => s,
            other => panic!("expected Case II, got {other:?}"),
        }
    }

    #[test]
    fn build_examples() {
        let s = case_one(2.0, 2.0, 1.0, 1.0);
        assert_eq!((s.gamma, s.k, s.c), (1.0, 2.0, 1.0));

        let s = case_two(1.0, 2.0, 1.0, 1.0);
        assert_eq!((s.k, s.k1, s.k2, s.gamma, s.c1), (1.0, 0.0, 1.0, 1.0, 1.0));

        let s = case_two(0.5, 2.0, 0.5, 1.0);
        assert_relative_eq!(s.k, 0.5);
        assert_relative_eq!(s.k1, 1.0);
        assert_relative_eq!(s.k2, 3.0);
        assert_relative_eq!(s.gamma, 1.0);
        assert_relative_eq!(s.c1, 2f64.sqrt());

        // k = p − q branch: k1 = (2−m−q)/(2(p−q)), k2 = 1
        let s = case_two(0.5, 0.7, 0.5, 1.0);
        assert_relative_eq!(s.k, 0.2, max_relative = 1e-12);
        assert_relative_eq!(s.k1, 1.0 / 0.4, max_relative = 1e-12);
        assert_eq!(s.k2, 1.0);
    }

    #[test]
    fn build_rejects_negative_speed_and_unsupported() {
        let cm = CanonicalModel::new(2.0, 2.0, 1.0).unwrap();
        assert!(matches!(build_system(&cm, -1.0), Err(Error::InvalidParameter { .. })));
        let cm = CanonicalModel::new(2.0, 1.0, 2.0).unwrap();
        assert!(matches!(build_system(&cm, 1.0), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn vector_field_examples() {
        let sys = PhaseSystem::CaseI(PhaseSystemI { gamma: 1.0, k: 2.0, c: 1.0 });
        assert_eq!(sys.vector_field(1.0, 0.0).unwrap(), (0.0, 0.0));
        let (dx, dy) = sys.vector_field(0.5, 0.2).unwrap();
        assert_relative_eq!(dx, 0.1, max_relative = 1e-15);
        assert_relative_eq!(dy, 0.01, max_relative = 1e-12);
        assert!(matches!(sys.vector_field(-0.1, 0.0), Err(Error::Domain(_))));

        let sys = PhaseSystem::CaseII(PhaseSystemII {
            gamma: 1.0,
            k: 1.0,
            k1: 0.0,
            k2: 1.0,
            c1: 1.0,
            c: 1.0,
        });
        assert_eq!(sys.vector_field(1.0, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn equilibria_are_zeros_of_the_field() {
        let cms = [(2.0, 2.0, 1.0), (3.0, 4.5, 0.5), (1.0, 2.0, 1.0), (0.5, 2.0, 0.5), (1.0, 1.0, 0.5)];
        for (m, p, q) in cms {
            let cm = CanonicalModel::new(m, p, q).unwrap();
            for c in [0.0, 0.7, 3.0] {
                let sys = build_system(&cm, c).unwrap();
                for fp in sys.fixed_points() {
                    let (dx, dy) = sys.vector_field(fp.location.0, fp.location.1).unwrap();
                    assert!(dx.abs() < 1e-15 && dy.abs() < 1e-15, "{fp:?}");
                }
            }
        }
    }

    #[test]
    fn near_unity_field_agrees_with_direct_form() {
        for sys in [
            build_system(&CanonicalModel::new(2.0, 2.0, 1.0).unwrap(), 1.3).unwrap(),
            build_system(&CanonicalModel::new(1.0, 1.0, 0.5).unwrap(), 1.3).unwrap(),
        ] {
            for (u, y) in [(-0.5, 0.3), (0.2, -0.1), (1e-3, 2e-3)] {
                let a = sys.field(1.0 + u, y);
                let b = sys.field_near_unity(u, y);
                assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn case_one_fixed_point_kinds() {
        let at = |c: f64| build_system(&CanonicalModel::new(2.0, 2.0, 1.0).unwrap(), c).unwrap().fixed_points();
        let fps = at(3.0);
        assert_eq!(fps[0].kind, FixedPointKind::SaddleNode);
        assert_eq!(fps[1].kind, FixedPointKind::Saddle);
        assert_eq!(fps[1].location, (0.0, -3.0));
        assert_eq!(fps[2].jacobian, [[0.0, 1.0], [-1.0, -3.0]]);
        assert_relative_eq!(discriminant(&fps[2].jacobian), 5.0);
        assert_eq!(fps[2].kind, FixedPointKind::StableNode);
        assert_eq!(at(1.0)[2].kind, FixedPointKind::StableFocus);
        let boundary = at(2.0)[2];
        assert_eq!(boundary.kind, FixedPointKind::StableNode);
        assert!(boundary.degenerate);
        // zero speed: P1 merges with P0, which loses both eigenvalues
        let fps = at(0.0);
        assert_eq!(fps.len(), 2);
        assert_eq!(fps[0].kind, FixedPointKind::Degenerate);
    }

    #[test]
    fn case_two_axis_equilibria() {
        // k1 = 0: Y² + c1 Y − 1 = 0
        let sys = build_system(&CanonicalModel::new(1.0, 2.0, 1.0).unwrap(), 3.0).unwrap();
        let fps = sys.fixed_points();
        assert_relative_eq!(fps[0].location.1, (-3.0 + 13f64.sqrt()) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(fps[1].location.1, (-3.0 - 13f64.sqrt()) / 2.0, max_relative = 1e-14);
        assert_eq!(fps[0].kind, FixedPointKind::Saddle);
        assert_eq!(fps[1].kind, FixedPointKind::Saddle);
        assert_eq!(fps[2].kind, FixedPointKind::StableNode);
        // k1 > 0: Y = ±1
        let sys = build_system(&CanonicalModel::new(1.0, 1.0, 0.5).unwrap(), 0.5).unwrap();
        let fps = sys.fixed_points();
        assert_eq!(fps[0].location, (0.0, 1.0));
        assert_eq!(fps[1].location, (0.0, -1.0));
        assert_eq!(fps[2].kind, FixedPointKind::StableFocus);
    }

    #[test]
    fn eigenvalues_solve_characteristic_polynomial() {
        for j in [[[0.0, 1.0], [-1.0, -3.0]], [[0.0, 1.0], [-1.0, -1.0]], [[2.0, 0.5], [1.0, -4.0]]] {
            let tr = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            for l in eigenvalues(&j) {
                let r = l * l - l * tr + det;
                assert!(r.norm() < 1e-12 * (1.0 + tr.abs() + det.abs()));
            }
        }
    }

    #[test]
    fn dulac_examples() {
        let s = PhaseSystemI { gamma: 1.0, k: 2.0, c: 1.0 };
        for y in [-1.0, 0.0, 2.5] {
            assert_relative_eq!(dulac_divergence(&s, 1.0, y).unwrap(), -1.0, max_relative = 1e-14);
        }
        let s = PhaseSystemI { gamma: 2.0, k: 2.0, c: 3.0 };
        assert_relative_eq!(dulac_divergence(&s, 4.0, 0.7).unwrap(), -3.0, max_relative = 1e-14);
        let s = PhaseSystemI { gamma: 1.5, k: 3.0, c: 0.0 };
        assert!(dulac_divergence(&s, 0.3, 1.1).unwrap().abs() < 1e-15);
        assert!(matches!(dulac_divergence(&s, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dulac_matches_finite_differences() {
        let s = PhaseSystemI { gamma: 0.8, k: 2.7, c: 1.4 };
        let h = 1e-5;
        let weighted = |x: f64, y: f64| {
            let b = x.powf(2.0 / s.gamma - 1.0);
            let [p, q] = s.field(x, y);
            (b * p, b * q)
        };
        for (x, y) in [(0.3, 0.5), (1.0, -0.2), (1.7, 1.1)] {
            let fd = (weighted(x + h, y).0 - weighted(x - h, y).0) / (2.0 * h)
                + (weighted(x, y + h).1 - weighted(x, y - h).1) / (2.0 * h);
            let closed = -s.c * x.powf(2.0 / s.gamma - 1.0);
            assert!((fd - closed).abs() < 1e-7, "{fd} vs {closed}");
        }
    }

    #[test]
    fn region_g_examples() {
        let cm = CanonicalModel::new(2.0, 2.0, 1.0).unwrap();
        let c_star = critical_speed(&cm).unwrap();
        let s = case_one(2.0, 2.0, 1.0, c_star);
        let a = region_g_slope(&s, cm.mq());
        assert!(region_g_residual(&s, cm.mq(), 1.0).abs() < 1e-15);
        assert_relative_eq!(region_g_residual(&s, cm.mq(), 0.0), -a * a - s.c * a);
        assert!(region_g_residual(&s, cm.mq(), 0.0) < 0.0);
        let worst = (0..=10_000)
            .map(|i| region_g_residual(&s, cm.mq(), i as f64 / 10_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-12, "{worst}");

        // R is the normal flux n·V on the line Y = a(1 − X)
        let sys = PhaseSystem::CaseI(s);
        for x in [0.1, 0.5, 0.9] {
            let y = a * (1.0 - x);
            let [p, q] = sys.field(x, y);
            assert_relative_eq!(a * p + q, region_g_residual(&s, cm.mq(), x), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_speed_examples() {
        let s = PhaseSystemI { gamma: 1.0, k: 2.0, c: 0.0 };
        assert_eq!(zero_speed_curve(&s, 0.0), 0.0);
        assert!(zero_speed_curve(&s, 4.0 / 3.0).abs() < 1e-15);
        assert_relative_eq!(zero_speed_curve(&s, 1.0), 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(zero_speed_x0(&s), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(zero_speed_x0(&PhaseSystemI { gamma: 2.0, k: 2.0, c: 0.0 }), 1.5, max_relative = 1e-15);
        assert_relative_eq!(
            zero_speed_x0(&PhaseSystemI { gamma: 2.0, k: 3.0, c: 0.0 }),
            2f64.sqrt(),
            max_relative = 1e-15
        );
    }

    proptest! {
        #[test]
        fn node_focus_boundary_is_critical_speed(
            m in 0.1f64..4.0, q in -1.0f64..3.0, gap in 0.05f64..4.0, frac in 0.1f64..3.0,
        ) {
            let p = q + gap;
            prop_assume!(m + q > 0.05);
            let cm = CanonicalModel::new(m, p, q).unwrap();
            let c_star = critical_speed(&cm).unwrap();
            let sys = build_system(&cm, frac * c_star).unwrap();
            if let PhaseSystem::CaseI(s) = sys {
                prop_assert!((s.gamma * (s.k - 1.0) - (p - q)).abs() < 1e-12 * (1.0 + p.abs() + q.abs()));
            }
            let p2 = sys.fixed_points().into_iter().find(|f| f.label == FixedPointLabel::P2).unwrap();
            // At the critical speed the repeated eigenvalue counts as a node.
            let expected = if frac > 1.0 - 1e-9 {
                FixedPointKind::StableNode
            } else {
                FixedPointKind::StableFocus
            };
            prop_assert_eq!(p2.kind, expected);
        }

        #[test]
        fn r_at_one_vanishes(m in 0.5f64..4.0, q in 0.0f64..3.0, gap in 0.05f64..3.0, c in 0.0f64..5.0) {
            prop_assume!(m + q > 2.05);
            let cm = CanonicalModel::new(m, q + gap, q).unwrap();
            let s = case_one(m, q + gap, q, c);
            prop_assert!(region_g_residual(&s, cm.mq(), 1.0).abs() < 1e-12 * (1.0 + c * c));
        }
    }
}
