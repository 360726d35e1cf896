//! Arclength reparametrization.

use std::sync::Arc;

use quadrature::double_exponential;

use super::{ParameterPath, PathJet, SurfaceCurve};
use crate::geometry::REGULARITY_EPS;
use crate::numeric::gauss_legendre;
use crate::{Error, Result};

const QUADRATURE_TOL: f64 = 1e-14;
const TABLE_SEGMENTS: usize = 64;

fn speed(curve: &SurfaceCurve, t: f64) -> Result<f64> {
    let s = curve.jet(t)?.speed();
    Ok(s)
}

/// Arclength of `curve` between parameters `a` and `b`.
pub(super) fn arclength(curve: &SurfaceCurve, a: f64, b: f64) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let out = double_exponential::integrate(
        |t| match speed(curve, t) {
            Ok(s) => s,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        QUADRATURE_TOL,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(out.integral),
    }
}

/// The base path re-expressed by arclength `s`. A table of `(t, s, |γ'|)`
/// at knots gives a cubic Hermite guess for `t(s)`, which Newton iteration
/// on `s(t) = ∫ |γ'|` then corrects, integrating by Gauss-Legendre within a
/// knot interval.
#[derive(Debug, Clone)]
pub struct ArcLengthPath {
    base: SurfaceCurve,
    knots_t: Vec<f64>,
    knots_s: Vec<f64>,
    knots_speed: Vec<f64>,
}

impl ArcLengthPath {
    fn new(base: SurfaceCurve) -> Result<Self> {
        let t_end = base.t_end();
        let segments = TABLE_SEGMENTS.max((TABLE_SEGMENTS as f64 * t_end).ceil() as usize);
        let s0 = speed(&base, 0.0)?;
        if s0 < REGULARITY_EPS {
            return Err(Error::SingularCurve { t: 0.0, speed: s0 });
        }
        let mut knots_t = vec![0.0];
        let mut knots_s = vec![0.0];
        let mut knots_speed = vec![s0];
        for k in 1..=segments {
            let t0 = t_end * (k - 1) as f64 / segments as f64;
            let t1 = t_end * k as f64 / segments as f64;
            // Regularity is checked at the knots and inside the quadrature.
            let sp = speed(&base, t1)?;
            if sp < REGULARITY_EPS {
                return Err(Error::SingularCurve { t: t1, speed: sp });
            }
            let s = knots_s[k - 1] + arclength(&base, t0, t1)?;
            knots_t.push(t1);
            knots_s.push(s);
            knots_speed.push(sp);
        }
        Ok(Self { base, knots_t, knots_s, knots_speed })
    }

    pub fn total_length(&self) -> f64 {
        *self.knots_s.last().expect("table is never empty")
    }

    /// Base parameter at arclength `s`.
    pub fn parameter_at(&self, s: f64) -> f64 {
        let k = match self.knots_s.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(k) => return self.knots_t[k],
            Err(k) => k.clamp(1, self.knots_s.len() - 1),
        };
        let (t_lo, t_hi) = (self.knots_t[k - 1], self.knots_t[k]);
        let (s_lo, s_hi) = (self.knots_s[k - 1], self.knots_s[k]);
        let ds = s_hi - s_lo;
        let x = ((s - s_lo) / ds).clamp(0.0, 1.0);
        // Hermite data for t(s): values and slopes 1/|γ'|.
        let (m0, m1) = (ds / self.knots_speed[k - 1], ds / self.knots_speed[k]);
        let (x2, x3) = (x * x, x * x * x);
        let mut t = t_lo * (2.0 * x3 - 3.0 * x2 + 1.0)
            + m0 * (x3 - 2.0 * x2 + x)
            + t_hi * (3.0 * x2 - 2.0 * x3)
            + m1 * (x3 - x2);
        let sp = |t: f64| speed(&self.base, t);
        let Ok(mut reached) = gauss_legendre(sp, t_lo, t).map(|a| s_lo + a) else { return t };
        for _ in 0..30 {
            let Ok(v) = sp(t) else { break };
            let step = (reached - s) / v;
            let next = t - step;
            let Ok(delta) = gauss_legendre(sp, t, next) else { break };
            reached += delta;
            t = next;
            if step.abs() <= 1e-15 * t_hi.abs().max(1.0) {
                break;
            }
        }
        t
    }
}

impl ParameterPath for ArcLengthPath {
    fn t_end(&self) -> f64 {
        self.total_length()
    }

    fn coords(&self, s: f64) -> (f64, f64) {
        self.base.coords(self.parameter_at(s))
    }

    fn jet(&self, s: f64) -> Option<PathJet> {
        let t = self.parameter_at(s);
        let p = self.base.path().jet(t)?;
        let j = self.base.jet(t).ok()?;
        let sigma = j.speed();
        let sigma_t = j.velocity.dot(&j.acceleration) / sigma;
        let second = |d1: f64, d2: f64| (d2 - d1 * sigma_t / sigma) / (sigma * sigma);
        Some(PathJet {
            u: p.u,
            v: p.v,
            du: p.du / sigma,
            dv: p.dv / sigma,
            ddu: second(p.du, p.ddu),
            ddv: second(p.dv, p.ddv),
        })
    }
}

/// Same image, parametrized by arclength.
pub fn unit_speed_reparametrize(curve: &SurfaceCurve) -> Result<SurfaceCurve> {
    if curve.is_unit_speed() {
        return Ok(curve.clone());
    }
    let path = ArcLengthPath::new(curve.clone())?;
    Ok(SurfaceCurve::with_unit_speed(curve.host().clone(), Arc::new(path)))
}

/// Wraps a user path on `chart` and reparametrizes it by arclength.
pub fn curve_from_parameter_path(
    chart: &crate::geometry::SurfaceChart,
    path: Arc<dyn ParameterPath>,
) -> Result<SurfaceCurve> {
    unit_speed_reparametrize(&SurfaceCurve::new(chart.clone(), path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::FnPath;
    use crate::geometry::plane;
    use std::f64::consts::PI;

    fn circle(speed: f64, radius: f64) -> SurfaceCurve {
        let w = speed / radius;
        SurfaceCurve::new(
            plane(),
            Arc::new(FnPath::analytic(2.0 * PI / w, move |t| PathJet {
                u: radius * (w * t).cos(),
                v: radius * (w * t).sin(),
                du: -radius * w * (w * t).sin(),
                dv: radius * w * (w * t).cos(),
                ddu: -radius * w * w * (w * t).cos(),
                ddv: -radius * w * w * (w * t).sin(),
            })),
        )
        .unwrap()
    }

    #[test]
    fn circle_at_speed_two() {
        let c = circle(2.0, 2.0);
        let unit = unit_speed_reparametrize(&c).unwrap();
        assert!((unit.length() - 4.0 * PI).abs() < 1e-12);
        for k in 0..=16 {
            let s = unit.length() * k as f64 / 16.0;
            let j = unit.jet(s).unwrap();
            assert!((j.speed() - 1.0).abs() < 1e-8);
            let angle = s / 2.0;
            let expected = crate::Vec3::new(2.0 * angle.cos(), 2.0 * angle.sin(), 0.0);
            assert!((j.point - expected).norm() < 1e-10);
            assert!((j.darboux().kappa_g - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn unit_speed_input_is_unchanged() {
        let c = circle(1.0, 1.5);
        let unit = unit_speed_reparametrize(&c).unwrap();
        for k in 0..=10 {
            let t = c.t_end() * k as f64 / 10.0;
            assert!((unit.point(t).unwrap() - c.point(t).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_path_is_rejected() {
        // u = t⁴ has zero speed at t = 0.
        let c = SurfaceCurve {
            host: plane(),
            path: Arc::new(FnPath::new(1.0, |t| (t.powi(4), 0.0))),
            length: 1.0,
            unit_speed: false,
        };
        assert!(matches!(unit_speed_reparametrize(&c), Err(Error::SingularCurve { .. })));
    }
}
