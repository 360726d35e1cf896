//! Rolling without skidding or spinning.
//!
//! Given a unit-speed contact curve `γ` on `S` and its anti-development
//! `γ̃` on the rolling surface `S̃` (same start point, tangent and normal),
//! the motion is
//!
//! ```text
//! A_t = D_t D̃_tᵀ,   b_t = γ(t) - A_t γ̃(t),   Q_t = A'_t A_tᵀ = D_t (Λ̃_t - Λ_t) D_tᵀ
//! ```
//!
//! with `D_t`, `D̃_t` the Darboux frames and `Λ` the matrices of the frame
//! equations `D' = D Λᵀ`. It exists as long as `(κ_n, τ_g)` never coincides
//! with `(κ̃_n, τ̃_g)`, and its angular velocity has Darboux components
//! `(τ_g - τ̃_g, κ̃_n - κ_n, 0)`.

mod antidev;
mod motion;

pub use antidev::{anti_develop, AntiDevelopment, RollOptions, RollingSurface};
pub use motion::{build_motion, CenterTrajectory, MotionResiduals, RigidMotionFamily};

use serde::Serialize;

use crate::curves::{unit_speed_reparametrize, DarbouxTriple, SurfaceCurve};
use crate::numeric::asymmetry;
use crate::{Error, Mat3, Result, Vec3};

/// Relative tolerance of the existence test, scaled by the largest
/// curvature present.
pub const EXIST_TOL: f64 = 1e-9;

/// Threshold for a vanishing rotation rate or velocity in
/// [`classify_instantaneous`].
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Outcome of the existence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceCheck {
    pub exists: bool,
    /// Earliest `t` at which the curvature pairs coincide.
    pub first_violation: Option<f64>,
    /// Smallest `max(|κ_n - κ̃_n|, |τ_g - τ̃_g|)` seen, including between
    /// samples.
    pub min_separation: f64,
    pub tolerance: f64,
}

/// Tests whether `(κ_n, τ_g)` and `(κ̃_n, τ̃_g)` are never simultaneously
/// equal. Between samples the differences are interpolated linearly, so a
/// crossing of both through zero inside one interval is also detected. The
/// two slices are paired index by index.
pub fn rolling_exists(gamma: &[DarbouxTriple], tilde: &[DarbouxTriple]) -> ExistenceCheck {
    let scale = gamma
        .iter()
        .chain(tilde)
        .flat_map(|d| [d.kappa_n.abs(), d.tau_g.abs()])
        .fold(1.0, f64::max);
    let tolerance = EXIST_TOL * scale;
    let diffs: Vec<(f64, [f64; 2])> = gamma
        .iter()
        .zip(tilde)
        .map(|(a, b)| (a.t, [a.kappa_n - b.kappa_n, a.tau_g - b.tau_g]))
        .collect();
    let sep = |d: [f64; 2]| d[0].abs().max(d[1].abs());

    let mut min_separation = f64::INFINITY;
    let mut first_violation = None;
    for (i, &(t, d)) in diffs.iter().enumerate() {
        let here = sep(d);
        min_separation = min_separation.min(here);
        if here < tolerance {
            first_violation.get_or_insert(t);
        }
        let Some(&(t1, d1)) = diffs.get(i + 1) else { break };
        let (s, between) = segment_minimum(d, d1);
        min_separation = min_separation.min(between);
        if between < tolerance {
            first_violation.get_or_insert(t + s * (t1 - t));
        }
    }
    if min_separation.is_infinite() {
        min_separation = f64::NAN;
    }
    ExistenceCheck { exists: first_violation.is_none(), first_violation, min_separation, tolerance }
}

/// Minimum over `s` in `[0, 1]` of `max(|a0 + s (b0 - a0)|, |a1 + s (b1 - a1)|)`.
fn segment_minimum(a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
    let slope = [b[0] - a[0], b[1] - a[1]];
    let value = |s: f64| (a[0] + s * slope[0]).abs().max((a[1] + s * slope[1]).abs());
    let mut candidates = vec![0.0, 1.0];
    for k in 0..2 {
        if slope[k] != 0.0 {
            candidates.push(-a[k] / slope[k]);
        }
    }
    for sign in [1.0, -1.0] {
        let denom = slope[0] - sign * slope[1];
        if denom != 0.0 {
            candidates.push((sign * a[1] - a[0]) / denom);
        }
    }
    candidates
        .into_iter()
        .filter(|s| (0.0..=1.0).contains(s))
        .map(|s| (s, value(s)))
        .fold((0.0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
}

/// Angular velocity in the Darboux frame of `γ`: `(τ_g - τ̃_g, κ̃_n - κ_n, 0)`.
pub fn angular_velocity_components(triple: &DarbouxTriple, tilde: &DarbouxTriple) -> [f64; 3] {
    [triple.tau_g - tilde.tau_g, tilde.kappa_n - triple.kappa_n, 0.0]
}

/// Kind of the instantaneous motion `x -> Q x + v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum MotionClass {
    Standstill,
    Translation { velocity: Vec3 },
    /// `center` is the point of the rotation axis closest to the contact
    /// point.
    Rotation { center: Vec3, omega: Vec3 },
}

pub fn classify_instantaneous(q: &Mat3, v: &Vec3, contact: &Vec3) -> Result<MotionClass> {
    classify_instantaneous_with(q, v, contact, CLASSIFY_TOL)
}

/// As [`classify_instantaneous`] with an explicit threshold `tol` for
/// vanishing quantities.
pub fn classify_instantaneous_with(q: &Mat3, v: &Vec3, contact: &Vec3, tol: f64) -> Result<MotionClass> {
    let asym = asymmetry(q);
    if asym > CLASSIFY_TOL.max(tol) * q.norm().max(1.0) {
        return Err(Error::NotSkew { asymmetry: asym });
    }
    let omega = crate::numeric::vee(&(0.5 * (q - q.transpose())));
    let w = omega.norm();
    if w < tol {
        return Ok(if v.norm() < tol { MotionClass::Standstill } else { MotionClass::Translation { velocity: *v } });
    }
    // Q x + v = ω x x + v = 0 is solvable iff ω ⊥ v.
    let pitch = omega.dot(v) / w;
    if pitch.abs() > tol * (1.0 + v.norm()) {
        return Err(Error::NoCenter { pitch });
    }
    let base = omega.cross(v) / (w * w);
    let center = base + omega * (omega.dot(&(contact - base)) / (w * w));
    Ok(MotionClass::Rotation { center, omega })
}

/// Rolls `surface` on the host of `curve` along it. The curve is
/// reparametrized by arclength first if needed.
pub fn roll(curve: &SurfaceCurve, surface: &RollingSurface, opts: &RollOptions) -> Result<RigidMotionFamily> {
    let curve = unit_speed_reparametrize(curve)?;
    let j0 = curve.jet(0.0)?;
    let kappa_g = |t: f64| Ok(curve.darboux(t)?.kappa_g);
    let ad = anti_develop(surface, &kappa_g, j0.point, j0.velocity, j0.normal, curve.length(), opts)?;
    build_motion(&curve, &ad)
}

/// Rolls the ball `B_r` (center `p + r N_p`) along `curve`.
pub fn roll_ball(curve: &SurfaceCurve, r: f64, opts: &RollOptions) -> Result<RigidMotionFamily> {
    roll(curve, &RollingSurface::Sphere { r }, opts)
}
