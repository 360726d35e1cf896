//! Parametric surface charts and pointwise curvature.
//!
//! A [`SurfaceChart`] is a C² map from a closed parameter rectangle into
//! space. The unit normal is `r_u x r_v` normalized, negated when the chart's
//! orientation flag is set; the second fundamental form and every normal
//! curvature in this crate are measured against that normal. With this
//! convention the inward-oriented sphere of radius `R` has `κ1 = κ2 = 1/R`.

mod config;
mod library;
mod unduloid;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

pub use config::{parse_key_values, SurfaceSpec};
pub use library::{
    catenoid, cylinder, ellipsoid, graph, plane, sphere, torus, unduloid, Catenoid, Cylinder,
    Ellipsoid, Graph, Plane, Sphere, Torus, Transformed,
};
pub use unduloid::{DelaunayProfile, Unduloid};

use crate::{Error, Result, Vec3};

/// Relative threshold on `|r_u x r_v|` (scaled by the chart's length² scale).
pub const REGULARITY_EPS: f64 = 1e-10;
/// Relative umbilic threshold on `κ1 - κ2`.
pub const UMBILIC_EPS: f64 = 1e-7;

/// Position and partial derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub point: Vec3,
    pub ru: Vec3,
    pub rv: Vec3,
    pub ruu: Vec3,
    pub ruv: Vec3,
    pub rvv: Vec3,
}

impl Derivatives {
    /// `r_u x r_v`, unnormalized.
    pub fn cross(&self) -> Vec3 {
        self.ru.cross(&self.rv)
    }

    /// Metric `[[E, F], [F, G]]`.
    pub fn metric(&self) -> Matrix2<f64> {
        let f = self.ru.dot(&self.rv);
        Matrix2::new(self.ru.norm_squared(), f, f, self.rv.norm_squared())
    }

    /// Parameter-space coordinates of a tangent vector (least squares).
    pub fn coordinates_of(&self, w: &Vec3) -> Vector2<f64> {
        let rhs = Vector2::new(self.ru.dot(w), self.rv.dot(w));
        solve2(&self.metric(), &rhs)
    }

    /// Ambient vector with parameter coordinates `c`.
    pub fn push_forward(&self, c: &Vector2<f64>) -> Vec3 {
        self.ru * c.x + self.rv * c.y
    }
}

pub(crate) fn solve2(m: &Matrix2<f64>, rhs: &Vector2<f64>) -> Vector2<f64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Vector2::new(
        (m[(1, 1)] * rhs.x - m[(0, 1)] * rhs.y) / det,
        (m[(0, 0)] * rhs.y - m[(1, 0)] * rhs.x) / det,
    )
}

/// The map of a chart. Implementors supply the point map and, optionally,
/// analytic derivatives and closed-form principal curvatures.
pub trait ChartMap: fmt::Debug + Send + Sync {
    fn point(&self, u: f64, v: f64) -> Vec3;

    /// Analytic derivatives; `None` selects the finite-difference fallback.
    fn derivatives(&self, _u: f64, _v: f64) -> Option<Derivatives> {
        None
    }

    /// Closed-form `(κ1, κ2)` with respect to the unflipped normal
    /// `r_u x r_v`, when known.
    fn exact_curvatures(&self, _u: f64, _v: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Closed parameter rectangle `[u_min, u_max] x [v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl ParamRect {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Self {
        Self { u_min, u_max, v_min, v_max }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }

    /// Uniform grid of `nu x nv` points (row-major in `v`), including edges.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<(f64, f64)> {
        let lerp = |a: f64, b: f64, k: usize, n: usize| {
            if n <= 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                out.push((
                    lerp(self.u_min, self.u_max, i, nu),
                    lerp(self.v_min, self.v_max, j, nv),
                ));
            }
        }
        out
    }
}

/// A C² parametric surface patch with an orientation.
#[derive(Clone)]
pub struct SurfaceChart {
    map: Arc<dyn ChartMap>,
    domain: ParamRect,
    orientation_flip: bool,
    scale: f64,
    label: String,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("orientation_flip", &self.orientation_flip)
            .finish()
    }
}

impl SurfaceChart {
    /// `scale` is a characteristic length of the surface, used to make the
    /// regularity threshold dimensionless.
    pub fn new(
        map: Arc<dyn ChartMap>,
        domain: ParamRect,
        orientation_flip: bool,
        scale: f64,
        label: impl Into<String>,
    ) -> Self {
        Self { map, domain, orientation_flip, scale, label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> ParamRect {
        self.domain
    }

    pub fn orientation_flip(&self) -> bool {
        self.orientation_flip
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn map(&self) -> &Arc<dyn ChartMap> {
        &self.map
    }

    /// Same chart with the normal negated.
    pub fn flipped(&self) -> Self {
        Self { orientation_flip: !self.orientation_flip, ..self.clone() }
    }

    pub fn with_domain(&self, domain: ParamRect) -> Self {
        Self { domain, ..self.clone() }
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        if self.domain.contains(u, v) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { u, v })
        }
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check_domain(u, v)?;
        Ok(self.map.point(u, v))
    }

    /// Analytic derivatives when the map provides them, central differences
    /// otherwise.
    pub fn derivatives(&self, u: f64, v: f64) -> Result<Derivatives> {
        self.check_domain(u, v)?;
        Ok(self.map.derivatives(u, v).unwrap_or_else(|| self.fd_derivatives(u, v)))
    }

    /// Central finite differences of the point map. First derivatives use
    /// the step `eps^(1/3)`, second derivatives `eps^(1/4)`, each scaled by
    /// the coordinate magnitude.
    pub fn fd_derivatives(&self, u: f64, v: f64) -> Derivatives {
        let m = &self.map;
        let h1u = f64::EPSILON.cbrt() * u.abs().max(1.0);
        let h1v = f64::EPSILON.cbrt() * v.abs().max(1.0);
        let h2u = f64::EPSILON.powf(0.25) * u.abs().max(1.0);
        let h2v = f64::EPSILON.powf(0.25) * v.abs().max(1.0);
        let p = m.point(u, v);
        let ru = (m.point(u + h1u, v) - m.point(u - h1u, v)) / (2.0 * h1u);
        let rv = (m.point(u, v + h1v) - m.point(u, v - h1v)) / (2.0 * h1v);
        let ruu = (m.point(u + h2u, v) - p * 2.0 + m.point(u - h2u, v)) / (h2u * h2u);
        let rvv = (m.point(u, v + h2v) - p * 2.0 + m.point(u, v - h2v)) / (h2v * h2v);
        let ruv = (m.point(u + h2u, v + h2v) - m.point(u + h2u, v - h2v) - m.point(u - h2u, v + h2v)
            + m.point(u - h2u, v - h2v))
            / (4.0 * h2u * h2v);
        Derivatives { point: p, ru, rv, ruu, ruv, rvv }
    }

    /// Unit normal from already-evaluated derivatives.
    pub fn normal_from(&self, d: &Derivatives) -> Vec3 {
        let n = d.cross().normalize();
        if self.orientation_flip {
            -n
        } else {
            n
        }
    }

    pub fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        let d = self.derivatives(u, v)?;
        self.regular(u, v, &d)?;
        Ok(self.normal_from(&d))
    }

    fn regular(&self, u: f64, v: f64, d: &Derivatives) -> Result<()> {
        let norm = d.cross().norm();
        if norm < REGULARITY_EPS * self.scale * self.scale || !norm.is_finite() {
            Err(Error::DegenerateChart { u, v, norm })
        } else {
            Ok(())
        }
    }

    /// Closed-form `(κ1, κ2)` in this chart's orientation, when the map
    /// knows it.
    pub fn exact_curvatures(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        let (k1, k2) = self.map.exact_curvatures(u, v)?;
        Some(if self.orientation_flip { (-k2, -k1) } else { (k1, k2) })
    }

    /// Full pointwise curvature data.
    pub fn point_geometry(&self, u: f64, v: f64) -> Result<PointGeometry> {
        let d = self.derivatives(u, v)?;
        self.regular(u, v, &d)?;
        Ok(PointGeometry::from_derivatives(u, v, &d, self.normal_from(&d)))
    }
}

/// Fundamental forms, normal and principal data at one chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointGeometry {
    pub u: f64,
    pub v: f64,
    pub position: Vec3,
    pub normal: Vec3,
    /// `(E, F, G)`.
    pub first_form: [f64; 3],
    /// `(e, f, g)` with respect to `normal`.
    pub second_form: [f64; 3],
    pub kappa1: f64,
    pub kappa2: f64,
    pub e1: Vec3,
    pub e2: Vec3,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub is_umbilic: bool,
    #[serde(skip)]
    pub ru: Vec3,
    #[serde(skip)]
    pub rv: Vec3,
}

impl PointGeometry {
    fn from_derivatives(u: f64, v: f64, d: &Derivatives, normal: Vec3) -> Self {
        let big_e = d.ru.norm_squared();
        let big_f = d.ru.dot(&d.rv);
        let big_g = d.rv.norm_squared();
        let e = d.ruu.dot(&normal);
        let f = d.ruv.dot(&normal);
        let g = d.rvv.dot(&normal);

        // Second form in the orthonormal tangent basis (t1, t2 = N x t1).
        let t1 = d.ru.normalize();
        let t2 = normal.cross(&t1);
        let c1 = d.coordinates_of(&t1);
        let c2 = d.coordinates_of(&t2);
        let second = Matrix2::new(e, f, f, g);
        let m11 = c1.dot(&(second * c1));
        let m12 = c1.dot(&(second * c2));
        let m22 = c2.dot(&(second * c2));

        let mean = 0.5 * (m11 + m22);
        let radius = (0.25 * (m11 - m22).powi(2) + m12 * m12).sqrt();
        let kappa1 = mean + radius;
        let kappa2 = mean - radius;
        let is_umbilic = kappa1 - kappa2 < UMBILIC_EPS * kappa1.abs().max(kappa2.abs()).max(1.0);
        let e1 = if is_umbilic {
            t1
        } else {
            let alpha = 0.5 * (2.0 * m12).atan2(m11 - m22);
            (t1 * alpha.cos() + t2 * alpha.sin()).normalize()
        };
        let e2 = normal.cross(&e1);

        Self {
            u,
            v,
            position: d.point,
            normal,
            first_form: [big_e, big_f, big_g],
            second_form: [e, f, g],
            kappa1,
            kappa2,
            e1,
            e2,
            mean_curvature: mean,
            gaussian_curvature: kappa1 * kappa2,
            is_umbilic,
            ru: d.ru,
            rv: d.rv,
        }
    }

    /// Unit tangent at angle `theta` from `e1` toward `e2`.
    pub fn direction(&self, theta: f64) -> Vec3 {
        self.e1 * theta.cos() + self.e2 * theta.sin()
    }

    /// Shape operator `S = I^{-1} II` applied to a tangent vector.
    pub fn shape_operator(&self, w: &Vec3) -> Vec3 {
        let [big_e, big_f, big_g] = self.first_form;
        let [e, f, g] = self.second_form;
        let first = Matrix2::new(big_e, big_f, big_f, big_g);
        let c = solve2(&first, &Vector2::new(self.ru.dot(w), self.rv.dot(w)));
        let s = solve2(&first, &(Matrix2::new(e, f, f, g) * c));
        self.ru * s.x + self.rv * s.y
    }

    /// Gaussian curvature from the fundamental forms, `(eg - f²)/(EG - F²)`.
    pub fn gaussian_from_forms(&self) -> f64 {
        let [big_e, big_f, big_g] = self.first_form;
        let [e, f, g] = self.second_form;
        (e * g - f * f) / (big_e * big_g - big_f * big_f)
    }

    /// `κ1 + κ2` from the fundamental forms, `(eG - 2fF + gE)/(EG - F²)`.
    pub fn trace_from_forms(&self) -> f64 {
        let [big_e, big_f, big_g] = self.first_form;
        let [e, f, g] = self.second_form;
        (e * big_g - 2.0 * f * big_f + g * big_e) / (big_e * big_g - big_f * big_f)
    }
}

pub fn evaluate_point_geometry(chart: &SurfaceChart, u: f64, v: f64) -> Result<PointGeometry> {
    chart.point_geometry(u, v)
}

/// Sign-consistent principal frame sampled on a grid.
#[derive(Debug, Clone)]
pub struct PrincipalFrameField {
    pub nu: usize,
    pub nv: usize,
    /// Row-major in `v`: index `j * nu + i`.
    pub samples: Vec<PointGeometry>,
}

impl PrincipalFrameField {
    pub fn at(&self, i: usize, j: usize) -> &PointGeometry {
        &self.samples[j * self.nu + i]
    }

    /// Smallest `<e1(p), e1(q)>` over all grid-adjacent pairs.
    pub fn min_neighbor_alignment(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for j in 0..self.nv {
            for i in 0..self.nu {
                let here = self.at(i, j).e1;
                if i + 1 < self.nu {
                    worst = worst.min(here.dot(&self.at(i + 1, j).e1));
                }
                if j + 1 < self.nv {
                    worst = worst.min(here.dot(&self.at(i, j + 1).e1));
                }
            }
        }
        worst
    }
}

/// Continuous orthonormal principal frame over an umbilic-free region.
///
/// Eigenvectors are computed pointwise; their signs are fixed by propagation
/// from the seed corner, each sample aligned with its already-fixed
/// neighbour (left, or below for the first column).
pub fn principal_frame_field(
    chart: &SurfaceChart,
    region: ParamRect,
    nu: usize,
    nv: usize,
) -> Result<PrincipalFrameField> {
    let mut samples = Vec::with_capacity(nu * nv);
    for (u, v) in region.grid(nu, nv) {
        let pg = chart.point_geometry(u, v)?;
        if pg.is_umbilic {
            return Err(Error::UmbilicInRegion { u, v });
        }
        samples.push(pg);
    }
    for j in 0..nv {
        for i in 0..nu {
            let reference = if i > 0 {
                Some(samples[j * nu + i - 1].e1)
            } else if j > 0 {
                Some(samples[(j - 1) * nu].e1)
            } else {
                None
            };
            if let Some(reference) = reference {
                let s = &mut samples[j * nu + i];
                if s.e1.dot(&reference) < 0.0 {
                    s.e1 = -s.e1;
                    s.e2 = -s.e2;
                }
            }
        }
    }
    Ok(PrincipalFrameField { nu, nv, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn plane_is_flat_and_umbilic() {
        let pg = plane().point_geometry(0.3, -2.0).unwrap();
        assert_eq!(pg.kappa1, 0.0);
        assert_eq!(pg.kappa2, 0.0);
        assert_eq!(pg.mean_curvature, 0.0);
        assert!(pg.is_umbilic);
        assert_relative_eq!(pg.normal, Vec3::z(), epsilon = 1e-15);
    }

    #[test]
    fn inward_sphere_has_positive_curvature() {
        let pg = sphere(1.0, true).point_geometry(0.3, 0.7).unwrap();
        assert_relative_eq!(pg.kappa1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pg.kappa2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pg.mean_curvature, 1.0, epsilon = 1e-12);
        assert!(pg.is_umbilic);
        // Normal points at the center.
        assert_relative_eq!(pg.normal, -pg.position, epsilon = 1e-12);
    }

    #[test]
    fn inward_cylinder_principal_data() {
        let pg = cylinder(2.0, true).point_geometry(0.4, 1.0).unwrap();
        assert_relative_eq!(pg.kappa1, 0.5, epsilon = 1e-14);
        assert_relative_eq!(pg.kappa2, 0.0, epsilon = 1e-14);
        assert!(!pg.is_umbilic);
        let circumferential = Vec3::new(-(0.4f64).sin(), 0.4f64.cos(), 0.0);
        assert_relative_eq!(pg.e1.dot(&circumferential).abs(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(pg.e1.cross(&pg.e2), pg.normal, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_and_out_of_domain() {
        let s = sphere(1.0, true).with_domain(ParamRect::new(-PI, PI, -PI / 2.0, PI / 2.0));
        assert!(matches!(
            s.point_geometry(0.0, PI / 2.0),
            Err(Error::DegenerateChart { .. })
        ));
        assert!(matches!(
            sphere(1.0, true).point_geometry(0.0, 3.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn fundamental_form_identities() {
        let chart = ellipsoid(1.5, 1.0, 0.75, true);
        let pg = chart.point_geometry(0.4, 1.1).unwrap();
        assert_relative_eq!(pg.gaussian_curvature, pg.gaussian_from_forms(), epsilon = 1e-8);
        assert_relative_eq!(pg.kappa1 + pg.kappa2, pg.trace_from_forms(), epsilon = 1e-8);
        assert!(pg.normal.dot(&pg.ru).abs() < 1e-8 && pg.normal.dot(&pg.rv).abs() < 1e-8);
        assert!(pg.kappa1 >= pg.kappa2);
        assert_relative_eq!(pg.e1.dot(&pg.e2), 0.0, epsilon = 1e-14);
        assert_relative_eq!(pg.e1.cross(&pg.e2).dot(&pg.normal), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn weingarten_eigenvectors() {
        for chart in [ellipsoid(1.5, 1.0, 0.75, true), torus(2.0, 1.0, true), catenoid(1.0)] {
            let pg = chart.point_geometry(0.7, 0.3).unwrap();
            assert!((pg.shape_operator(&pg.e1) - pg.e1 * pg.kappa1).norm() < 1e-8);
            assert!((pg.shape_operator(&pg.e2) - pg.e2 * pg.kappa2).norm() < 1e-8);
        }
    }

    #[test]
    fn orientation_flip_negates_and_swaps() {
        let chart = torus(2.0, 1.0, true);
        let a = chart.point_geometry(0.2, 0.5).unwrap();
        let b = chart.flipped().point_geometry(0.2, 0.5).unwrap();
        assert_relative_eq!(b.kappa1, -a.kappa2, epsilon = 1e-12);
        assert_relative_eq!(b.kappa2, -a.kappa1, epsilon = 1e-12);
        assert_relative_eq!(b.mean_curvature.abs(), a.mean_curvature.abs(), epsilon = 1e-12);
        assert_relative_eq!(b.gaussian_curvature, a.gaussian_curvature, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_frame_field_is_circumferential() {
        let chart = cylinder(1.0, true);
        let field = principal_frame_field(&chart, ParamRect::new(-1.0, 2.0, -1.0, 1.0), 7, 5).unwrap();
        for pg in &field.samples {
            let circumferential = Vec3::new(-pg.u.sin(), pg.u.cos(), 0.0);
            assert_relative_eq!(pg.e1.dot(&circumferential).abs(), 1.0, epsilon = 1e-12);
        }
        assert!(field.min_neighbor_alignment() > 0.0);
    }

    #[test]
    fn sphere_region_has_umbilics() {
        let err = principal_frame_field(&sphere(1.0, true), ParamRect::new(0.0, 1.0, 0.0, 1.0), 3, 3)
            .unwrap_err();
        assert!(matches!(err, Error::UmbilicInRegion { .. }));
    }
}
