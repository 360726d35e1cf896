//! Curves on surfaces, their Darboux frames and curvatures.
//!
//! Along a curve `γ` with surface normal `N` the Darboux frame is
//! `(γ', N x γ', N)`. For unit speed,
//!
//! ```text
//! κ_g = <γ'', N x γ'>,   κ_n = <γ'', N>,   τ_g = -<N', N x γ'>
//! ```
//!
//! and the frame matrix `D` (columns = frame) obeys `D' = D Λᵀ` with
//!
//! ```text
//!       |  0    κ_g  κ_n |
//! Λ  =  | -κ_g  0    τ_g |
//!       | -κ_n -τ_g  0   |
//! ```

mod integrate;
mod reparam;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use integrate::{
    curve_with_geodesic_curvature, geodesic_from, geodesic_with, IntegratedPath, IntegrationOptions,
    KappaFn,
};
pub use reparam::{curve_from_parameter_path, unit_speed_reparametrize, ArcLengthPath};

use crate::geometry::{PointGeometry, SurfaceChart, REGULARITY_EPS};
use crate::output::fmt17;
use crate::{Error, Mat3, Result, Vec3};

/// Parameter-space position with first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathJet {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub ddu: f64,
    pub ddv: f64,
}

/// A path `t -> (u(t), v(t))` in a chart's parameter domain, `t ∈ [0, t_end]`.
pub trait ParameterPath: fmt::Debug + Send + Sync {
    fn t_end(&self) -> f64;

    fn coords(&self, t: f64) -> (f64, f64);

    /// Analytic derivatives, when the path has them. Without them, curve
    /// derivatives fall back to finite differences in `t`.
    fn jet(&self, _t: f64) -> Option<PathJet> {
        None
    }
}

type CoordFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;
type JetFn = dyn Fn(f64) -> PathJet + Send + Sync;

/// A path given by closures.
pub struct FnPath {
    t_end: f64,
    coords: Box<CoordFn>,
    jet: Option<Box<JetFn>>,
}

impl fmt::Debug for FnPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPath")
            .field("t_end", &self.t_end)
            .field("analytic", &self.jet.is_some())
            .finish()
    }
}

impl FnPath {
    pub fn new(t_end: f64, coords: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self { t_end, coords: Box::new(coords), jet: None }
    }

    /// Path whose derivatives come from `jet`; positions are read from it too.
    pub fn analytic(t_end: f64, jet: impl Fn(f64) -> PathJet + Send + Sync + 'static) -> Self {
        let jet: Arc<JetFn> = Arc::new(jet);
        let for_coords = jet.clone();
        Self {
            t_end,
            coords: Box::new(move |t| {
                let j = for_coords(t);
                (j.u, j.v)
            }),
            jet: Some(Box::new(move |t| jet(t))),
        }
    }

    /// Path `(u(t), v(t))` given by two arithmetic expressions in `t`,
    /// differentiated symbolically.
    pub fn from_expressions(t_end: f64, u_expr: &str, v_expr: &str) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("path end must be positive, got {t_end}")));
        }
        let u = expression_in_t(u_expr)?;
        let v = expression_in_t(v_expr)?;
        Ok(Self::analytic(t_end, move |t| {
            let ([u, du, ddu], [v, dv, ddv]) = (u(t), v(t));
            PathJet { u, v, du, dv, ddu, ddv }
        }))
    }

    /// Straight segment in parameter space, `(u0 + a t, v0 + b t)`.
    pub fn segment(t_end: f64, start: (f64, f64), rate: (f64, f64)) -> Self {
        Self::analytic(t_end, move |t| PathJet {
            u: start.0 + rate.0 * t,
            v: start.1 + rate.1 * t,
            du: rate.0,
            dv: rate.1,
            ddu: 0.0,
            ddv: 0.0,
        })
    }
}

impl ParameterPath for FnPath {
    fn t_end(&self) -> f64 {
        self.t_end
    }

    fn coords(&self, t: f64) -> (f64, f64) {
        (self.coords)(t)
    }

    fn jet(&self, t: f64) -> Option<PathJet> {
        self.jet.as_ref().map(|j| j(t))
    }
}

/// Value, first and second derivative of an expression in `t`.
fn expression_in_t(source: &str) -> Result<impl Fn(f64) -> [f64; 3] + Send + Sync + 'static> {
    use exmex::prelude::*;
    use exmex::Differentiate;
    let err = |e: exmex::ExError| Error::Config(format!("cannot parse expression `{source}`: {e}"));
    let expr = exmex::parse::<f64>(source).map_err(err)?;
    match expr.var_names() {
        [] => {}
        [name] if name == "t" => {}
        names => {
            return Err(Error::Config(format!("`{source}` may only use the variable t, found {names:?}")));
        }
    }
    let derivatives = if expr.var_names().is_empty() {
        None
    } else {
        let first = expr.clone().partial(0).map_err(err)?;
        let second = first.clone().partial(0).map_err(err)?;
        Some((first, second))
    };
    Ok(move |t: f64| {
        let at = [t];
        let eval = |e: &FlatEx<f64>| e.eval(&at[..e.var_names().len().min(1)]).unwrap_or(f64::NAN);
        match &derivatives {
            None => [eval(&expr), 0.0, 0.0],
            Some((d1, d2)) => [eval(&expr), eval(d1), eval(d2)],
        }
    })
}

/// A path restricted to `[offset, offset + t_end]` and re-based to start at 0.
#[derive(Debug, Clone)]
pub struct ShiftedPath {
    base: Arc<dyn ParameterPath>,
    offset: f64,
    t_end: f64,
}

impl ParameterPath for ShiftedPath {
    fn t_end(&self) -> f64 {
        self.t_end
    }

    fn coords(&self, t: f64) -> (f64, f64) {
        self.base.coords(t + self.offset)
    }

    fn jet(&self, t: f64) -> Option<PathJet> {
        self.base.jet(t + self.offset)
    }
}

/// The curvature triple of a surface curve at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DarbouxTriple {
    pub t: f64,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
}

impl DarbouxTriple {
    /// The skew matrix `Λ` of the frame equation `D' = D Λᵀ`.
    pub fn lambda(&self) -> Mat3 {
        Mat3::new(
            0.0,
            self.kappa_g,
            self.kappa_n,
            -self.kappa_g,
            0.0,
            self.tau_g,
            -self.kappa_n,
            -self.tau_g,
            0.0,
        )
    }
}

/// Ambient position, velocity, acceleration, normal and normal rate at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub normal: Vec3,
    pub normal_rate: Vec3,
}

impl CurveJet {
    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    /// Curvatures normalized for the actual speed; equal to the unit-speed
    /// definitions when `|γ'| = 1`.
    pub fn darboux(&self) -> DarbouxTriple {
        let sigma = self.speed();
        let side = self.normal.cross(&self.velocity);
        DarbouxTriple {
            t: self.t,
            kappa_g: self.acceleration.dot(&side) / sigma.powi(3),
            kappa_n: self.acceleration.dot(&self.normal) / (sigma * sigma),
            tau_g: -self.normal_rate.dot(&side) / (sigma * sigma),
        }
    }

    /// Darboux frame matrix with columns `(T, N x T, N)`.
    pub fn frame(&self) -> Mat3 {
        let tangent = self.velocity.normalize();
        Mat3::from_columns(&[tangent, self.normal.cross(&tangent), self.normal])
    }
}

/// A curve on a host chart, given by a parameter path.
#[derive(Clone, Debug)]
pub struct SurfaceCurve {
    host: SurfaceChart,
    path: Arc<dyn ParameterPath>,
    length: f64,
    unit_speed: bool,
}

impl SurfaceCurve {
    /// Wraps a path of arbitrary (regular) speed; the length is computed by
    /// quadrature.
    pub fn new(host: SurfaceChart, path: Arc<dyn ParameterPath>) -> Result<Self> {
        let mut curve = Self { host, path, length: 0.0, unit_speed: false };
        curve.length = reparam::arclength(&curve, 0.0, curve.path.t_end())?;
        Ok(curve)
    }

    /// Wraps a path already parametrized by arclength.
    pub fn with_unit_speed(host: SurfaceChart, path: Arc<dyn ParameterPath>) -> Self {
        let length = path.t_end();
        Self { host, path, length, unit_speed: true }
    }

    pub fn host(&self) -> &SurfaceChart {
        &self.host
    }

    pub fn path(&self) -> &Arc<dyn ParameterPath> {
        &self.path
    }

    /// Arclength of the whole curve.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// End of the parameter interval (equal to the length at unit speed).
    pub fn t_end(&self) -> f64 {
        self.path.t_end()
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn coords(&self, t: f64) -> (f64, f64) {
        self.path.coords(t)
    }

    pub fn point(&self, t: f64) -> Result<Vec3> {
        let (u, v) = self.path.coords(t);
        self.host.point(u, v)
    }

    fn normal_at(&self, t: f64) -> Result<Vec3> {
        let (u, v) = self.path.coords(t);
        self.host.normal(u, v)
    }

    /// Derivatives of `γ` and `N` along the curve: chain rule when the path
    /// is analytic, central differences in `t` otherwise.
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        let jet = match self.path.jet(t) {
            Some(p) => self.analytic_jet(t, &p)?,
            None => self.fd_jet(t)?,
        };
        let speed = jet.speed();
        if !(speed > REGULARITY_EPS) {
            return Err(Error::SingularCurve { t, speed });
        }
        Ok(jet)
    }

    fn analytic_jet(&self, t: f64, p: &PathJet) -> Result<CurveJet> {
        let d = self.host.derivatives(p.u, p.v)?;
        let n = d.cross();
        let norm = n.norm();
        if norm < REGULARITY_EPS * self.host.scale().powi(2) {
            return Err(Error::DegenerateChart { u: p.u, v: p.v, norm });
        }
        let velocity = d.ru * p.du + d.rv * p.dv;
        let acceleration = d.ru * p.ddu
            + d.rv * p.ddv
            + d.ruu * (p.du * p.du)
            + d.ruv * (2.0 * p.du * p.dv)
            + d.rvv * (p.dv * p.dv);
        let n_rate = (d.ruu * p.du + d.ruv * p.dv).cross(&d.rv) + d.ru.cross(&(d.ruv * p.du + d.rvv * p.dv));
        let unit = n / norm;
        let sign = if self.host.orientation_flip() { -1.0 } else { 1.0 };
        Ok(CurveJet {
            t,
            u: p.u,
            v: p.v,
            point: d.point,
            velocity,
            acceleration,
            normal: unit * sign,
            normal_rate: (n_rate - unit * unit.dot(&n_rate)) * (sign / norm),
        })
    }

    fn fd_jet(&self, t: f64) -> Result<CurveJet> {
        let span = self.path.t_end();
        let h1 = 1e-5 * span;
        let h2 = 1e-4 * span;
        let (u, v) = self.path.coords(t);
        let p = self.point(t)?;
        let velocity = (self.point(t + h1)? - self.point(t - h1)?) / (2.0 * h1);
        let acceleration = (self.point(t + h2)? - p * 2.0 + self.point(t - h2)?) / (h2 * h2);
        let normal_rate = (self.normal_at(t + h1)? - self.normal_at(t - h1)?) / (2.0 * h1);
        Ok(CurveJet {
            t,
            u,
            v,
            point: p,
            velocity,
            acceleration,
            normal: self.normal_at(t)?,
            normal_rate,
        })
    }

    pub fn darboux(&self, t: f64) -> Result<DarbouxTriple> {
        Ok(self.jet(t)?.darboux())
    }

    /// Darboux frame matrix `D_t`.
    pub fn frame(&self, t: f64) -> Result<Mat3> {
        Ok(self.jet(t)?.frame())
    }

    /// The piece of this curve over `[t0, t0 + len]`, re-based to start at 0.
    pub fn subarc(&self, t0: f64, len: f64) -> SurfaceCurve {
        let path = Arc::new(ShiftedPath { base: self.path.clone(), offset: t0, t_end: len });
        if self.unit_speed {
            Self::with_unit_speed(self.host.clone(), path)
        } else {
            Self { host: self.host.clone(), path, length: len, unit_speed: false }
        }
    }

    /// `samples + 1` equally spaced parameter values over the curve.
    pub fn sample_times(&self, samples: usize) -> Vec<f64> {
        let n = samples.max(1);
        (0..=n).map(|i| self.t_end() * i as f64 / n as f64).collect()
    }

    /// CSV with columns `t,u,v,x,y,z,kappa_g,kappa_n,tau_g`.
    pub fn to_csv(&self, samples: usize) -> Result<String> {
        let mut out = String::from("t,u,v,x,y,z,kappa_g,kappa_n,tau_g\n");
        for t in self.sample_times(samples) {
            let j = self.jet(t)?;
            let d = j.darboux();
            let row = [t, j.u, j.v, j.point.x, j.point.y, j.point.z, d.kappa_g, d.kappa_n, d.tau_g];
            out.push_str(&row.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn darboux_data(curve: &SurfaceCurve, t: f64) -> Result<DarbouxTriple> {
    curve.darboux(t)
}

/// Normal curvature and geodesic torsion in the direction at angle `theta`
/// from `e1` (toward `e2`):
///
/// ```text
/// κ_n(θ) = κ1 cos²θ + κ2 sin²θ,   τ_g(θ) = (κ2 - κ1) sin θ cos θ
/// ```
pub fn euler_curvatures(pg: &PointGeometry, theta: f64) -> (f64, f64) {
    euler_curvatures_principal(pg.kappa1, pg.kappa2, theta)
}

/// [`euler_curvatures`] from the principal curvatures alone.
pub fn euler_curvatures_principal(kappa1: f64, kappa2: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (kappa1 * c * c + kappa2 * s * s, (kappa2 - kappa1) * s * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cylinder, plane, sphere};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn expression_paths() {
        let p = FnPath::from_expressions(2.0, "cos(t)", "0.5").unwrap();
        assert_eq!(p.coords(1.0), (1f64.cos(), 0.5));
        assert!(FnPath::from_expressions(1.0, "s + 1", "t").is_err());
        assert!(FnPath::from_expressions(0.0, "t", "t").is_err());
        let c = SurfaceCurve::new(plane(), Arc::new(FnPath::from_expressions(1.0, "t", "t^2").unwrap())).unwrap();
        let j = c.jet(0.5).unwrap();
        assert!((j.velocity - Vec3::new(1.0, 1.0, 0.0)).norm() < 1e-14);
        assert!((j.acceleration - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn euler_formula_cases() {
        let pg = cylinder(1.0, true).point_geometry(0.0, 0.0).unwrap();
        let (kn, tg) = euler_curvatures(&pg, 0.0);
        assert_relative_eq!(kn, pg.kappa1, epsilon = 1e-15);
        assert_eq!(tg, 0.0);
        let (kn, tg) = euler_curvatures(&pg, FRAC_PI_4);
        assert_relative_eq!(kn, 0.5 * (pg.kappa1 + pg.kappa2), epsilon = 1e-15);
        assert_relative_eq!(tg, 0.5 * (pg.kappa2 - pg.kappa1), epsilon = 1e-15);

        let umb = sphere(2.0, true).point_geometry(0.3, 0.2).unwrap();
        for k in 0..8 {
            let (kn, tg) = euler_curvatures(&umb, 0.4 * k as f64);
            assert_relative_eq!(kn, umb.kappa1, epsilon = 1e-12);
            assert!(tg.abs() < 1e-12);
        }
    }

    #[test]
    fn great_circle_triple() {
        // Equator of the unit sphere: u = t, v = 0.
        let chart = sphere(1.0, true);
        let curve = SurfaceCurve::with_unit_speed(chart, Arc::new(FnPath::segment(2.0, (0.0, 0.0), (1.0, 0.0))));
        for t in [0.0, 0.7, 2.0] {
            let d = curve.darboux(t).unwrap();
            assert!(d.kappa_g.abs() < 1e-14);
            assert_relative_eq!(d.kappa_n, 1.0, epsilon = 1e-14);
            assert!(d.tau_g.abs() < 1e-14);
        }
    }

    #[test]
    fn straight_line_on_plane() {
        let curve = SurfaceCurve::with_unit_speed(
            plane(),
            Arc::new(FnPath::segment(3.0, (1.0, 2.0), (0.6, 0.8))),
        );
        let d = curve.darboux(1.5).unwrap();
        assert_eq!((d.kappa_g, d.kappa_n, d.tau_g), (0.0, 0.0, 0.0));
    }

    #[test]
    fn latitude_circle_geodesic_curvature() {
        // Latitude v = φ on the unit sphere, unit speed: u = t / cos φ.
        let phi: f64 = 0.6;
        let c = phi.cos();
        let curve = SurfaceCurve::with_unit_speed(
            sphere(1.0, true),
            Arc::new(FnPath::segment(1.0, (0.0, phi), (1.0 / c, 0.0))),
        );
        let d = curve.darboux(0.3).unwrap();
        // Spherical latitude: |κ_g| = tan φ, κ_n = 1, τ_g = 0.
        assert_relative_eq!(d.kappa_g.abs(), phi.tan(), epsilon = 1e-13);
        assert_relative_eq!(d.kappa_n, 1.0, epsilon = 1e-13);
        assert!(d.tau_g.abs() < 1e-13);
    }

    #[test]
    fn finite_difference_route_agrees_with_chain_rule() {
        let chart = cylinder(1.0, true);
        let jet = |t: f64| PathJet { u: 0.3 * t + 0.1 * t * t, v: t, du: 0.3 + 0.2 * t, dv: 1.0, ddu: 0.2, ddv: 0.0 };
        let analytic = SurfaceCurve::new(chart.clone(), Arc::new(FnPath::analytic(1.0, jet))).unwrap();
        let fd = SurfaceCurve::new(chart, Arc::new(FnPath::new(1.0, move |t| (jet(t).u, jet(t).v)))).unwrap();
        for t in [0.2, 0.5, 0.8] {
            let a = analytic.darboux(t).unwrap();
            let b = fd.darboux(t).unwrap();
            assert!((a.kappa_g - b.kappa_g).abs() < 1e-6);
            assert!((a.kappa_n - b.kappa_n).abs() < 1e-6);
            assert!((a.tau_g - b.tau_g).abs() < 1e-6);
        }
        assert_relative_eq!(analytic.length(), fd.length(), epsilon = 1e-9);
    }

    #[test]
    fn frame_is_rotation_and_decomposes_acceleration() {
        let chart = sphere(1.0, true);
        let curve = SurfaceCurve::with_unit_speed(chart, Arc::new(FnPath::segment(PI, (0.0, 0.0), (1.0, 0.0))));
        let j = curve.jet(1.0).unwrap();
        let d = j.frame();
        assert!(crate::numeric::orthogonality_error(&d) < 1e-9);
        assert_relative_eq!(d.determinant(), 1.0, epsilon = 1e-12);
        let t = j.darboux();
        assert_relative_eq!(
            t.kappa_g.powi(2) + t.kappa_n.powi(2),
            j.acceleration.norm_squared(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn csv_header_and_rows() {
        let curve = SurfaceCurve::with_unit_speed(plane(), Arc::new(FnPath::segment(1.0, (0.0, 0.0), (1.0, 0.0))));
        let csv = curve.to_csv(4).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,u,v,x,y,z,kappa_g,kappa_n,tau_g");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').count(), 9);
    }
}
