//! Built-in charts.
//!
//! Angular parameters get a domain several turns wide so that curves can wind
//! around without leaving the chart; only genuine coordinate singularities
//! (poles) bound the domains.

use std::f64::consts::PI;
use std::sync::Arc;

use exmex::prelude::*;

use super::{ChartMap, Derivatives, ParamRect, SurfaceChart};
use crate::{Error, Mat3, Result, Vec3};

const TURNS: f64 = 8.0 * PI;

/// The plane `z = 0`, `r(u, v) = (u, v, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct Plane;

impl ChartMap for Plane {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(u, v, 0.0)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::x(),
            rv: Vec3::y(),
            ruu: Vec3::zeros(),
            ruv: Vec3::zeros(),
            rvv: Vec3::zeros(),
        })
    }

    fn exact_curvatures(&self, _u: f64, _v: f64) -> Option<(f64, f64)> {
        Some((0.0, 0.0))
    }
}

pub fn plane() -> SurfaceChart {
    SurfaceChart::new(Arc::new(Plane), ParamRect::new(-1e3, 1e3, -1e3, 1e3), false, 1.0, "plane")
}

/// Longitude/latitude sphere `R (cos v cos u, cos v sin u, sin v)`;
/// `r_u x r_v` points outward.
#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    pub radius: f64,
}

impl ChartMap for Sphere {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Vec3::new(cv * cu, cv * su, sv) * self.radius
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let r = self.radius;
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::new(-su, cu, 0.0) * (r * cv),
            rv: Vec3::new(-sv * cu, -sv * su, cv) * r,
            ruu: Vec3::new(-cu, -su, 0.0) * (r * cv),
            ruv: Vec3::new(su, -cu, 0.0) * (r * sv),
            rvv: Vec3::new(-cv * cu, -cv * su, -sv) * r,
        })
    }

    fn exact_curvatures(&self, _u: f64, _v: f64) -> Option<(f64, f64)> {
        Some((-1.0 / self.radius, -1.0 / self.radius))
    }
}

/// Sphere of radius `R` about the origin; `inward` orients the normal
/// toward the center.
pub fn sphere(radius: f64, inward: bool) -> SurfaceChart {
    SurfaceChart::new(
        Arc::new(Sphere { radius }),
        ParamRect::new(-TURNS, TURNS, -1.55, 1.55),
        inward,
        radius.abs(),
        format!("sphere(R={radius})"),
    )
}

/// Circular cylinder `(R cos u, R sin u, v)`; `r_u x r_v` points outward.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder {
    pub radius: f64,
}

impl ChartMap for Cylinder {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(self.radius * u.cos(), self.radius * u.sin(), v)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let r = self.radius;
        let (su, cu) = u.sin_cos();
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::new(-su, cu, 0.0) * r,
            rv: Vec3::z(),
            ruu: Vec3::new(-cu, -su, 0.0) * r,
            ruv: Vec3::zeros(),
            rvv: Vec3::zeros(),
        })
    }

    fn exact_curvatures(&self, _u: f64, _v: f64) -> Option<(f64, f64)> {
        Some((0.0, -1.0 / self.radius))
    }
}

pub fn cylinder(radius: f64, inward: bool) -> SurfaceChart {
    SurfaceChart::new(
        Arc::new(Cylinder { radius }),
        ParamRect::new(-TURNS, TURNS, -1e3, 1e3),
        inward,
        radius.abs(),
        format!("cylinder(R={radius})"),
    )
}

/// Ellipsoid `(a cos v cos u, b cos v sin u, c sin v)`; `r_u x r_v` points
/// outward.
#[derive(Debug, Clone, Copy)]
pub struct Ellipsoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ChartMap for Ellipsoid {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Vec3::new(self.a * cv * cu, self.b * cv * su, self.c * sv)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let Self { a, b, c } = *self;
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::new(-a * cv * su, b * cv * cu, 0.0),
            rv: Vec3::new(-a * sv * cu, -b * sv * su, c * cv),
            ruu: Vec3::new(-a * cv * cu, -b * cv * su, 0.0),
            ruv: Vec3::new(a * sv * su, -b * sv * cu, 0.0),
            rvv: Vec3::new(-a * cv * cu, -b * cv * su, -c * sv),
        })
    }
}

pub fn ellipsoid(a: f64, b: f64, c: f64, inward: bool) -> SurfaceChart {
    SurfaceChart::new(
        Arc::new(Ellipsoid { a, b, c }),
        ParamRect::new(-TURNS, TURNS, -1.55, 1.55),
        inward,
        a.abs().max(b.abs()).max(c.abs()),
        format!("ellipsoid(a={a},b={b},c={c})"),
    )
}

/// Torus of revolution about the z-axis; `r_u x r_v` points away from the
/// tube core.
#[derive(Debug, Clone, Copy)]
pub struct Torus {
    pub major: f64,
    pub minor: f64,
}

impl ChartMap for Torus {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let rho = self.major + self.minor * cv;
        Vec3::new(rho * cu, rho * su, self.minor * sv)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let r = self.minor;
        let rho = self.major + r * cv;
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::new(-su, cu, 0.0) * rho,
            rv: Vec3::new(-sv * cu, -sv * su, cv) * r,
            ruu: Vec3::new(-cu, -su, 0.0) * rho,
            ruv: Vec3::new(su, -cu, 0.0) * (r * sv),
            rvv: Vec3::new(-cv * cu, -cv * su, -sv) * r,
        })
    }

    fn exact_curvatures(&self, _u: f64, v: f64) -> Option<(f64, f64)> {
        let meridian = -1.0 / self.minor;
        let parallel = -v.cos() / (self.major + self.minor * v.cos());
        Some((meridian.max(parallel), meridian.min(parallel)))
    }
}

pub fn torus(major: f64, minor: f64, inward: bool) -> SurfaceChart {
    SurfaceChart::new(
        Arc::new(Torus { major, minor }),
        ParamRect::new(-TURNS, TURNS, -TURNS, TURNS),
        inward,
        minor.abs(),
        format!("torus(R={major},r={minor})"),
    )
}

/// Catenoid `(c cosh(v/c) cos u, c cosh(v/c) sin u, v)`.
#[derive(Debug, Clone, Copy)]
pub struct Catenoid {
    pub c: f64,
}

impl ChartMap for Catenoid {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let rho = self.c * (v / self.c).cosh();
        Vec3::new(rho * u.cos(), rho * u.sin(), v)
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let c = self.c;
        let (su, cu) = u.sin_cos();
        let (sh, ch) = ((v / c).sinh(), (v / c).cosh());
        Some(Derivatives {
            point: self.point(u, v),
            ru: Vec3::new(-su, cu, 0.0) * (c * ch),
            rv: Vec3::new(sh * cu, sh * su, 1.0),
            ruu: Vec3::new(-cu, -su, 0.0) * (c * ch),
            ruv: Vec3::new(-su, cu, 0.0) * sh,
            rvv: Vec3::new(cu, su, 0.0) * (ch / c),
        })
    }

    fn exact_curvatures(&self, _u: f64, v: f64) -> Option<(f64, f64)> {
        let k = 1.0 / (self.c * (v / self.c).cosh().powi(2));
        Some((k, -k))
    }
}

pub fn catenoid(c: f64) -> SurfaceChart {
    SurfaceChart::new(
        Arc::new(Catenoid { c }),
        ParamRect::new(-TURNS, TURNS, -5.0 * c.abs(), 5.0 * c.abs()),
        false,
        c.abs(),
        format!("catenoid(c={c})"),
    )
}

pub fn unduloid(mean_curvature: f64, neck: f64, inward: bool) -> Result<SurfaceChart> {
    let map = super::Unduloid::new(mean_curvature, neck)?;
    let half = map.profile().half_length();
    Ok(SurfaceChart::new(
        Arc::new(map),
        ParamRect::new(-TURNS, TURNS, -half, half),
        inward,
        neck,
        format!("unduloid(H={mean_curvature},neck={neck})"),
    ))
}

/// Graph surface `(x, y, z(x, y))` from an arithmetic expression.
#[derive(Debug)]
pub struct Graph {
    source: String,
    expr: FlatEx<f64>,
    /// For each expression variable, 0 for `x` and 1 for `y`.
    slots: Vec<usize>,
}

impl Graph {
    pub fn parse(source: &str) -> Result<Self> {
        let expr = exmex::parse::<f64>(source)
            .map_err(|e| Error::Config(format!("cannot parse expression `{source}`: {e}")))?;
        let slots = expr
            .var_names()
            .iter()
            .map(|name| match name.as_str() {
                "x" => Ok(0),
                "y" => Ok(1),
                other => Err(Error::Config(format!(
                    "unknown variable `{other}` in `{source}` (expected x, y)"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { source: source.to_owned(), expr, slots })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        let xy = [x, y];
        let args: Vec<f64> = self.slots.iter().map(|&k| xy[k]).collect();
        self.expr.eval(&args).unwrap_or(f64::NAN)
    }
}

impl ChartMap for Graph {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(u, v, self.height(u, v))
    }
}

pub fn graph(expression: &str, domain: ParamRect) -> Result<SurfaceChart> {
    let map = Graph::parse(expression)?;
    Ok(SurfaceChart::new(Arc::new(map), domain, false, 1.0, format!("graph(z={expression})")))
}

/// A chart moved by a rigid motion `x -> R x + t` with `det R = 1`.
#[derive(Debug)]
pub struct Transformed {
    pub inner: Arc<dyn ChartMap>,
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl ChartMap for Transformed {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.rotation * self.inner.point(u, v) + self.translation
    }

    fn derivatives(&self, u: f64, v: f64) -> Option<Derivatives> {
        let d = self.inner.derivatives(u, v)?;
        let r = &self.rotation;
        Some(Derivatives {
            point: r * d.point + self.translation,
            ru: r * d.ru,
            rv: r * d.rv,
            ruu: r * d.ruu,
            ruv: r * d.ruv,
            rvv: r * d.rvv,
        })
    }

    fn exact_curvatures(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        self.inner.exact_curvatures(u, v)
    }
}

impl SurfaceChart {
    /// This chart moved rigidly by `x -> rotation * x + translation`.
    pub fn transformed(&self, rotation: Mat3, translation: Vec3) -> SurfaceChart {
        SurfaceChart::new(
            Arc::new(Transformed { inner: self.map().clone(), rotation, translation }),
            self.domain(),
            self.orientation_flip(),
            self.scale(),
            format!("{} (moved)", self.label()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Analytic derivatives against central differences of the map.
    fn check_against_fd(chart: &SurfaceChart, u: f64, v: f64) {
        let a = chart.derivatives(u, v).unwrap();
        let f = chart.fd_derivatives(u, v);
        let scale = chart.scale().max(1.0);
        assert!((a.ru - f.ru).norm() < 1e-8 * scale, "{}: ru", chart.label());
        assert!((a.rv - f.rv).norm() < 1e-8 * scale, "{}: rv", chart.label());
        assert!((a.ruu - f.ruu).norm() < 1e-6 * scale, "{}: ruu", chart.label());
        assert!((a.ruv - f.ruv).norm() < 1e-6 * scale, "{}: ruv", chart.label());
        assert!((a.rvv - f.rvv).norm() < 1e-6 * scale, "{}: rvv", chart.label());
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let charts = [
            plane(),
            sphere(1.3, true),
            cylinder(0.7, true),
            ellipsoid(1.5, 1.0, 0.75, true),
            torus(2.0, 1.0, true),
            catenoid(1.2),
            unduloid(1.0, 0.3, true).unwrap(),
        ];
        for chart in &charts {
            for &(u, v) in &[(0.1, 0.2), (-1.3, 0.9), (2.5, -0.4)] {
                check_against_fd(chart, u, v);
            }
        }
    }

    #[test]
    fn moved_chart_keeps_curvature() {
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.2, 1.1).into_inner();
        let base = torus(2.0, 1.0, false);
        let moved = base.transformed(rot, Vec3::new(1.0, 2.0, 3.0));
        let a = base.point_geometry(0.4, 0.9).unwrap();
        let b = moved.point_geometry(0.4, 0.9).unwrap();
        assert!((a.kappa1 - b.kappa1).abs() < 1e-12 && (a.kappa2 - b.kappa2).abs() < 1e-12);
        assert!((rot * a.normal - b.normal).norm() < 1e-12);
    }

    #[test]
    fn graph_expressions() {
        let g = Graph::parse("x^2 + sin(y) - exp(0) * sqrt(4) / 2").unwrap();
        assert!((g.height(2.0, 0.0) - 3.0).abs() < 1e-15);
        let only_y = Graph::parse("cos(y)").unwrap();
        assert!((only_y.height(5.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(Graph::parse("x + w").is_err());
        assert!(Graph::parse("x +* 2").is_err());
    }

    #[test]
    fn paraboloid_graph_curvature_at_apex() {
        // z = (x² + y²)/2 has κ1 = κ2 = 1 at the origin (upward normal).
        let chart = graph("(x^2 + y^2) / 2", ParamRect::new(-2.0, 2.0, -2.0, 2.0)).unwrap();
        let pg = chart.point_geometry(0.0, 0.0).unwrap();
        assert!((pg.kappa1 - 1.0).abs() < 1e-6 && (pg.kappa2 - 1.0).abs() < 1e-6);
    }
}
