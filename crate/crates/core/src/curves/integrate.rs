//! Curves with prescribed geodesic curvature, integrated in chart
//! coordinates. Geodesics are the case `κ_g ≡ 0`.
//!
//! For a unit-speed curve the tangential part of `γ''` equals
//! `κ_g N x γ'`. Writing `γ'' = J ü + r_ij u̇^i u̇^j` and projecting onto the
//! tangent plane gives
//!
//! ```text
//! I ü = Jᵀ (κ_g |γ'| N x γ' - r_ij u̇^i u̇^j)
//! ```
//!
//! which is the second-order geodesic equation (Christoffel symbols of the
//! first form) plus a forcing term.

use std::sync::Arc;

use nalgebra::{Vector2, Vector4};

use super::{ParameterPath, PathJet, SurfaceCurve};
use crate::geometry::{solve2, SurfaceChart};
use crate::numeric::{quintic_hermite, rk4_step, sampled_derivative};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Initial number of steps over the whole length.
    pub steps: usize,
    /// Richardson acceptance: nodes of successive refinements must agree to
    /// this distance.
    pub tolerance: f64,
    /// Maximum number of step halvings.
    pub max_refinements: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { steps: 2048, tolerance: 1e-7, max_refinements: 8 }
    }
}

/// Nodes of an integrated curve. Position and velocity are interpolated by
/// quintic Hermite polynomials in each coordinate; the acceleration between
/// nodes comes from the curve equation at the interpolated state.
#[derive(Debug, Clone)]
pub struct IntegratedPath {
    chart: SurfaceChart,
    spacing: f64,
    /// `(u, v, du, dv, ddu, ddv, κ_g)` at `t = k * spacing`.
    nodes: Vec<[f64; 7]>,
    kappa_g_residual: f64,
}

impl IntegratedPath {
    pub fn nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Largest deviation between the prescribed geodesic curvature and the
    /// one measured from finite differences of the sampled tangent.
    pub fn kappa_g_residual(&self) -> f64 {
        self.kappa_g_residual
    }
}

impl ParameterPath for IntegratedPath {
    fn t_end(&self) -> f64 {
        self.spacing * (self.nodes.len() - 1) as f64
    }

    fn coords(&self, t: f64) -> (f64, f64) {
        let j = self.jet(t).expect("integrated paths are analytic");
        (j.u, j.v)
    }

    fn jet(&self, t: f64) -> Option<PathJet> {
        let last = self.nodes.len() - 1;
        let x = t / self.spacing;
        let k = (x.floor().max(0.0) as usize).min(last - 1);
        let s = x - k as f64;
        let (a, b) = (&self.nodes[k], &self.nodes[k + 1]);
        if s == 0.0 {
            return Some(PathJet { u: a[0], v: a[1], du: a[2], dv: a[3], ddu: a[4], ddv: a[5] });
        }
        let u = quintic_hermite(s, self.spacing, [a[0], a[2], a[4]], [b[0], b[2], b[4]]);
        let v = quintic_hermite(s, self.spacing, [a[1], a[3], a[5]], [b[1], b[3], b[5]]);
        let y = Vector4::new(u[0], v[0], u[1], v[1]);
        let (ddu, ddv) = match acceleration(&self.chart, t, &y, self.kappa_at(k, s)) {
            Ok(a) => (a.x, a.y),
            Err(_) => (u[2], v[2]),
        };
        Some(PathJet { u: u[0], v: v[0], du: u[1], dv: v[1], ddu, ddv })
    }
}

impl IntegratedPath {
    /// Cubic Lagrange interpolation of the node curvatures around cell `k`.
    fn kappa_at(&self, k: usize, s: f64) -> f64 {
        let n = self.nodes.len();
        if n < 4 {
            return (1.0 - s) * self.nodes[k][6] + s * self.nodes[k + 1][6];
        }
        let first = k.saturating_sub(1).min(n - 4);
        let x = (k - first) as f64 + s;
        let mut sum = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if j != i {
                    w *= (x - j as f64) / (i as f64 - j as f64);
                }
            }
            sum += w * self.nodes[first + i][6];
        }
        sum
    }
}

/// Geodesic curvature as a function of arclength.
pub type KappaFn<'a> = dyn Fn(f64) -> Result<f64> + Sync + 'a;

/// Coordinate acceleration of a curve with geodesic curvature `kappa_g`.
fn acceleration(chart: &SurfaceChart, t: f64, y: &Vector4<f64>, kappa_g: f64) -> Result<Vector2<f64>> {
    let d = chart.derivatives(y[0], y[1]).map_err(|e| match e {
        Error::OutOfDomain { .. } => Error::DomainExit { t },
        other => other,
    })?;
    let (du, dv) = (y[2], y[3]);
    let velocity = d.ru * du + d.rv * dv;
    let quad = d.ruu * (du * du) + d.ruv * (2.0 * du * dv) + d.rvv * (dv * dv);
    let forcing = if kappa_g == 0.0 {
        Vec3::zeros()
    } else {
        chart.normal_from(&d).cross(&velocity) * (kappa_g * velocity.norm())
    };
    let rhs = forcing - quad;
    Ok(solve2(&d.metric(), &Vector2::new(d.ru.dot(&rhs), d.rv.dot(&rhs))))
}

fn run(
    chart: &SurfaceChart,
    start: Vector4<f64>,
    kappa_g: &KappaFn<'_>,
    length: f64,
    steps: usize,
) -> Result<Vec<[f64; 7]>> {
    let h = length / steps as f64;
    let rhs = |t: f64, y: &Vector4<f64>| -> Result<Vector4<f64>> {
        let a = acceleration(chart, t, y, kappa_g(t)?)?;
        Ok(Vector4::new(y[2], y[3], a.x, a.y))
    };
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut y = start;
    for k in 0..=steps {
        let t = k as f64 * h;
        let kappa = kappa_g(t)?;
        let a = acceleration(chart, t, &y, kappa)?;
        nodes.push([y[0], y[1], y[2], y[3], a.x, a.y, kappa]);
        if k < steps {
            y = rk4_step(&rhs, t, &y, h)?;
        }
    }
    Ok(nodes)
}

fn max_node_distance(chart: &SurfaceChart, coarse: &[[f64; 7]], fine: &[[f64; 7]]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (k, c) in coarse.iter().enumerate() {
        let f = &fine[2 * k];
        let d = (chart.point(c[0], c[1])? - chart.point(f[0], f[1])?).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

fn measured_kappa_g_residual(
    chart: &SurfaceChart,
    nodes: &[[f64; 7]],
    spacing: f64,
    kappa_g: &KappaFn<'_>,
) -> Result<f64> {
    if nodes.len() < 5 {
        return Ok(0.0);
    }
    let mut tangents = Vec::with_capacity(nodes.len());
    let mut normals = Vec::with_capacity(nodes.len());
    for n in nodes {
        let d = chart.derivatives(n[0], n[1])?;
        tangents.push((d.ru * n[2] + d.rv * n[3]).normalize());
        normals.push(chart.normal_from(&d));
    }
    let mut worst = 0.0f64;
    for i in 0..nodes.len() {
        let rate = sampled_derivative(&tangents, spacing, i);
        let measured = rate.dot(&normals[i].cross(&tangents[i]));
        worst = worst.max((measured - kappa_g(i as f64 * spacing)?).abs());
    }
    Ok(worst)
}

/// Largest deviation of the interpolated curve from unit speed and from
/// the prescribed geodesic curvature, at the cell midpoints.
fn interpolation_residual(
    chart: &SurfaceChart,
    nodes: &[[f64; 7]],
    spacing: f64,
    kappa_g: &KappaFn<'_>,
) -> Result<f64> {
    let path = IntegratedPath { chart: chart.clone(), spacing, nodes: nodes.to_vec(), kappa_g_residual: 0.0 };
    let curve = SurfaceCurve::with_unit_speed(chart.clone(), Arc::new(path));
    let mut worst = 0.0f64;
    for k in 0..nodes.len() - 1 {
        let t = (k as f64 + 0.5) * spacing;
        let j = curve.jet(t)?;
        worst = worst.max((j.speed() - 1.0).abs()).max((j.darboux().kappa_g - kappa_g(t)?).abs());
    }
    Ok(worst)
}

/// Unit-speed curve on `chart` starting at `(u0, v0)` with ambient unit
/// tangent `direction`, whose geodesic curvature is `kappa_g(t)`.
///
/// Fixed-step RK4; the step is halved until two successive solutions agree
/// at all shared nodes to `opts.tolerance` and the interpolated curve has
/// unit speed and the prescribed geodesic curvature to the same tolerance
/// between nodes.
pub fn curve_with_geodesic_curvature(
    chart: &SurfaceChart,
    u0: f64,
    v0: f64,
    direction: Vec3,
    kappa_g: &KappaFn<'_>,
    length: f64,
    opts: IntegrationOptions,
) -> Result<SurfaceCurve> {
    if !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("curve length must be positive, got {length}")));
    }
    let d = chart.derivatives(u0, v0)?;
    let normal = chart.normal(u0, v0)?;
    let tangent = (direction - normal * normal.dot(&direction)).normalize();
    let c = d.coordinates_of(&tangent);
    let start = Vector4::new(u0, v0, c.x, c.y);

    let mut steps = opts.steps.max(4);
    let mut coarse = run(chart, start, kappa_g, length, steps)?;
    let mut refinements = 0;
    let fine = loop {
        let fine = run(chart, start, kappa_g, length, 2 * steps)?;
        let diff = max_node_distance(chart, &coarse, &fine)?;
        steps *= 2;
        if diff < opts.tolerance && interpolation_residual(chart, &fine, length / steps as f64, kappa_g)? < opts.tolerance {
            break fine;
        }
        refinements += 1;
        if refinements > opts.max_refinements {
            return Err(Error::StepFailure(format!(
                "curve integration still changes by {diff:e} after {refinements} step halvings"
            )));
        }
        coarse = fine;
    };
    let spacing = length / steps as f64;
    let residual = measured_kappa_g_residual(chart, &fine, spacing, kappa_g)?;
    if residual > 10.0 * opts.tolerance {
        return Err(Error::StepFailure(format!("geodesic curvature residual {residual:e}")));
    }
    let path = IntegratedPath { chart: chart.clone(), spacing, nodes: fine, kappa_g_residual: residual };
    Ok(SurfaceCurve::with_unit_speed(chart.clone(), Arc::new(path)))
}

/// Unit-speed geodesic from `(u0, v0)` leaving at angle `theta` from the
/// first principal direction (toward the second). At umbilic points the
/// reference axis is `r_u`.
pub fn geodesic_from(chart: &SurfaceChart, u0: f64, v0: f64, theta: f64, length: f64) -> Result<SurfaceCurve> {
    geodesic_with(chart, u0, v0, theta, length, IntegrationOptions::default())
}

pub fn geodesic_with(
    chart: &SurfaceChart,
    u0: f64,
    v0: f64,
    theta: f64,
    length: f64,
    opts: IntegrationOptions,
) -> Result<SurfaceCurve> {
    let pg = chart.point_geometry(u0, v0)?;
    curve_with_geodesic_curvature(chart, u0, v0, pg.direction(theta), &|_| Ok(0.0), length, opts)
}
