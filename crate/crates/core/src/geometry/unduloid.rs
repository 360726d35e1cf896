//! Delaunay unduloid: a surface of revolution with constant mean curvature.
//!
//! The meridian `(x(s), z(s))` is parametrized by arclength with tangent
//! angle `φ`, and satisfies
//!
//! ```text
//! x' = cos φ,   z' = sin φ,   φ' = 2H - sin φ / x
//! ```
//!
//! which makes the mean curvature equal to `H` for the normal pointing toward
//! the axis. Starting at the neck (`x = a`, `φ = π/2`, `z = 0`) the profile
//! oscillates between the neck radius `a` and the bulge radius `1/H - a`.

use super::{ChartMap, Derivatives};
use crate::numeric::{quintic_hermite, rk4_step};
use crate::{Error, Result, Vec3};
use nalgebra::Vector3;

/// Constant-h residual targeted by the profile construction.
const PROFILE_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct DelaunayProfile {
    mean_curvature: f64,
    neck: f64,
    spacing: f64,
    /// Number of cells on each side of the neck.
    half_cells: usize,
    /// `(x, z, φ)` at `s = (k - half_cells) * spacing`.
    nodes: Vec<Vector3<f64>>,
}

/// Interpolated profile data at one arclength value.
#[derive(Debug, Clone, Copy)]
pub struct ProfileJet {
    pub x: f64,
    pub z: f64,
    pub phi: f64,
    pub dphi: f64,
}

impl DelaunayProfile {
    /// Integrates the profile over `[-half_length, half_length]`, halving the
    /// step until the mean-curvature residual inside every cell falls below
    /// the construction tolerance.
    pub fn new(mean_curvature: f64, neck: f64, half_length: f64) -> Result<Self> {
        if !(mean_curvature > 0.0) || !(neck > 0.0) || neck * mean_curvature >= 1.0 {
            return Err(Error::Config(format!(
                "unduloid needs H > 0 and 0 < neck < 1/H (got H = {mean_curvature}, neck = {neck})"
            )));
        }
        let mut spacing = neck.min(1.0 / mean_curvature) / 100.0;
        for _ in 0..6 {
            let profile = Self::integrate(mean_curvature, neck, half_length, spacing)?;
            if profile.max_mean_curvature_residual() < PROFILE_TOLERANCE {
                return Ok(profile);
            }
            spacing *= 0.5;
        }
        Err(Error::StepFailure("unduloid profile did not reach the target accuracy".into()))
    }

    fn integrate(h: f64, neck: f64, half_length: f64, spacing: f64) -> Result<Self> {
        let half_cells = (half_length / spacing).ceil() as usize;
        let rhs = |_s: f64, y: &Vector3<f64>| -> Result<Vector3<f64>, Error> {
            let (x, phi) = (y.x, y.z);
            if x <= 0.0 {
                return Err(Error::StepFailure("unduloid profile reached the axis".into()));
            }
            Ok(Vector3::new(phi.cos(), phi.sin(), 2.0 * h - phi.sin() / x))
        };
        let start = Vector3::new(neck, 0.0, std::f64::consts::FRAC_PI_2);
        let sweep = |step: f64| -> Result<Vec<Vector3<f64>>> {
            let mut out = Vec::with_capacity(half_cells);
            let mut y = start;
            for k in 0..half_cells {
                y = rk4_step(&rhs, k as f64 * step, &y, step)?;
                out.push(y);
            }
            Ok(out)
        };
        let forward = sweep(spacing)?;
        let backward = sweep(-spacing)?;
        let mut nodes: Vec<Vector3<f64>> = backward.into_iter().rev().collect();
        nodes.push(start);
        nodes.extend(forward);
        Ok(Self { mean_curvature: h, neck, spacing, half_cells, nodes })
    }

    pub fn mean_curvature(&self) -> f64 {
        self.mean_curvature
    }

    pub fn neck(&self) -> f64 {
        self.neck
    }

    pub fn half_length(&self) -> f64 {
        self.half_cells as f64 * self.spacing
    }

    /// `x sin φ - H x²`, conserved along exact solutions.
    pub fn first_integral(&self, s: f64) -> f64 {
        let j = self.jet(s);
        j.x * j.phi.sin() - self.mean_curvature * j.x * j.x
    }

    /// `(x, x', x'')`, `(z, z', z'')`, `(φ, φ', φ'')` at node `k`.
    fn node_data(&self, k: usize) -> [[f64; 3]; 3] {
        let n = self.nodes[k];
        let (x, phi) = (n.x, n.z);
        let (sp, cp) = phi.sin_cos();
        let dphi = 2.0 * self.mean_curvature - sp / x;
        let ddphi = -(cp * dphi * x - sp * cp) / (x * x);
        [[x, cp, -sp * dphi], [n.y, sp, cp * dphi], [phi, dphi, ddphi]]
    }

    /// Quintic Hermite interpolation between integration nodes; `s` outside
    /// the integrated range is clamped to it. The tangent angle is
    /// interpolated directly so that curvature needs only its first
    /// derivative.
    pub fn jet(&self, s: f64) -> ProfileJet {
        let offset = (s / self.spacing + self.half_cells as f64).clamp(0.0, (self.nodes.len() - 1) as f64);
        let k = (offset.floor() as usize).min(self.nodes.len() - 2);
        let t = offset - k as f64;
        let (a, b) = (self.node_data(k), self.node_data(k + 1));
        let x = quintic_hermite(t, self.spacing, a[0], b[0]);
        let z = quintic_hermite(t, self.spacing, a[1], b[1]);
        let phi = quintic_hermite(t, self.spacing, a[2], b[2]);
        ProfileJet { x: x[0], z: z[0], phi: phi[0], dphi: phi[1] }
    }

    /// Mean curvature of the surface of revolution built on the interpolated
    /// profile, with the axis-facing normal.
    pub fn mean_curvature_at(&self, s: f64) -> f64 {
        let j = self.jet(s);
        0.5 * (j.dphi + j.phi.sin() / j.x)
    }

    fn max_mean_curvature_residual(&self) -> f64 {
        (0..self.nodes.len() - 1)
            .flat_map(|k| [0.25, 0.5, 0.75].map(|f| (k as f64 + f - self.half_cells as f64) * self.spacing))
            .map(|s| (self.mean_curvature_at(s) - self.mean_curvature).abs())
            .fold(0.0, f64::max)
    }
}

/// Unduloid chart `(x(v) cos u, x(v) sin u, z(v))` with `v` the meridian
/// arclength measured from a neck. `r_u x r_v` points away from the axis.
#[derive(Debug, Clone)]
pub struct Unduloid {
    profile: DelaunayProfile,
}

impl Unduloid {
    /// Default half-length of the integrated meridian, in units of `1/H`.
    pub const HALF_LENGTH: f64 = 12.0;

    pub fn new(mean_curvature: f64, neck: f64) -> Result<Self> {
        let profile = DelaunayProfile::new(mean_curvature, neck, Self::HALF_LENGTH / mean_curvature)?;
        Ok(Self { profile })
    }

    pub fn profile(&self) -> &DelaunayProfile {
        &self.profile
    }
}

impl ChartMap for Unduloid {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let j = self.profile.jet(v);
        Vec3::new(j.x * u.cos(), j.x * u.sin(), j.z)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let j = self.profile.jet(v);
        let (su, cu) = u.sin_cos();
        let (sp, cp) = j.phi.sin_cos();
        let radial = Vec3::new(cu, su, 0.0);
        let around = Vec3::new(-su, cu, 0.0);
        Some(Derivatives {
            point: radial * j.x + Vec3::z() * j.z,
            ru: around * j.x,
            rv: radial * cp + Vec3::z() * sp,
            ruu: -radial * j.x,
            ruv: around * cp,
            rvv: (radial * -sp + Vec3::z() * cp) * j.dphi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unduloid as unduloid_chart;

    #[test]
    fn rejects_bad_parameters() {
        assert!(DelaunayProfile::new(1.0, 1.2, 5.0).is_err());
        assert!(DelaunayProfile::new(-1.0, 0.3, 5.0).is_err());
        assert!(DelaunayProfile::new(1.0, 0.0, 5.0).is_err());
    }

    #[test]
    fn oscillates_between_neck_and_bulge() {
        let p = DelaunayProfile::new(1.0, 0.3, 12.0).unwrap();
        let xs: Vec<f64> = (-1000..=1000).map(|k| p.jet(k as f64 * 0.012).x).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(0.0, f64::max);
        assert!((min - 0.3).abs() < 1e-6, "neck {min}");
        assert!((max - 0.7).abs() < 1e-6, "bulge {max}");
    }

    #[test]
    fn first_integral_is_conserved() {
        let p = DelaunayProfile::new(1.0, 0.3, 12.0).unwrap();
        let c0 = 0.3 - 0.09;
        for k in -50..=50 {
            let s = k as f64 * 0.237;
            assert!((p.first_integral(s) - c0).abs() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn surface_mean_curvature_is_constant() {
        let chart = unduloid_chart(1.0, 0.3, true).unwrap();
        for k in 0..100 {
            let u = -3.0 + 0.061 * k as f64;
            let v = -11.0 + 0.2197 * k as f64;
            let pg = chart.point_geometry(u, v).unwrap();
            assert!((pg.mean_curvature - 1.0).abs() < 1e-9, "h = {}", pg.mean_curvature);
            assert!(!pg.is_umbilic);
        }
    }
}
