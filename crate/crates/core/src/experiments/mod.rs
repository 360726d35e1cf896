//! Speed of a rolling ball and the isotropy experiments built on it.
//!
//! When `B_r` rolls along a unit-speed curve, its center moves with
//! velocity `(1 - r κ_n) γ' - r τ_g N x γ'`, so the squared speed is
//! `(1 - r κ_n)² + r² τ_g²`. At the start point, in the direction at angle
//! `θ` from `e1`, this becomes
//!
//! ```text
//! ℓ(θ) = 1 + r²κ2² - 2rκ2 + r(κ2 - κ1)(2 - r(κ1 + κ2)) cos²θ
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{euler_curvatures, euler_curvatures_principal, geodesic_from};
use crate::geometry::{ParamRect, PointGeometry, SurfaceChart};
use crate::output::{csv_line, fmt17};
use crate::rolling::{roll_ball, RollOptions};
use crate::{Error, Result};

/// Isotropy threshold for closed-form speeds.
pub const TOL_ISO_CLOSED: f64 = 1e-8;
/// Isotropy threshold for simulated speeds.
pub const TOL_ISO_SIMULATED: f64 = 1e-4;
/// Default arclength of the rolled arc used for simulated initial speeds.
pub const DEFAULT_ARC: f64 = 1e-2;
/// Relative tolerance for constant or vanishing principal curvatures in
/// the classification.
pub const CURVATURE_TOL: f64 = 1e-6;

/// Squared initial speed from the principal curvatures, in the expanded
/// form affine in `cos²θ`.
pub fn speed_squared(pg: &PointGeometry, theta: f64, r: f64) -> f64 {
    speed_squared_principal(pg.kappa1, pg.kappa2, theta, r)
}

pub fn speed_squared_principal(kappa1: f64, kappa2: f64, theta: f64, r: f64) -> f64 {
    let c = theta.cos();
    1.0 + r * r * kappa2 * kappa2 - 2.0 * r * kappa2 + cos2_coefficient(kappa1, kappa2, r) * c * c
}

/// Coefficient of `cos²θ` in the squared speed: `r(κ2 - κ1)(2 - r(κ1 + κ2))`.
pub fn cos2_coefficient(kappa1: f64, kappa2: f64, r: f64) -> f64 {
    r * (kappa2 - kappa1) * (2.0 - r * (kappa1 + kappa2))
}

/// Squared speed of the center from the Darboux curvatures of the contact
/// curve: `(1 - r κ_n)² + r² τ_g²`.
pub fn speed_squared_darboux(kappa_n: f64, tau_g: f64, r: f64) -> f64 {
    (1.0 - r * kappa_n).powi(2) + (r * tau_g).powi(2)
}

/// The Darboux form evaluated on the Euler curvatures of direction `θ`.
pub fn speed_squared_euler(pg: &PointGeometry, theta: f64, r: f64) -> f64 {
    let (kappa_n, tau_g) = euler_curvatures(pg, theta);
    speed_squared_darboux(kappa_n, tau_g, r)
}

/// [`speed_squared_euler`] from the principal curvatures alone.
pub fn speed_squared_euler_principal(kappa1: f64, kappa2: f64, theta: f64, r: f64) -> f64 {
    let (kappa_n, tau_g) = euler_curvatures_principal(kappa1, kappa2, theta);
    speed_squared_darboux(kappa_n, tau_g, r)
}

/// Initial speed of `B_r` rolled along the geodesic leaving `(u, v)` at
/// angle `theta`, from a fourth-order one-sided difference of its center
/// trajectory over an arc of length `arc`.
pub fn initial_speed_simulated(chart: &SurfaceChart, u: f64, v: f64, theta: f64, r: f64, arc: f64) -> Result<f64> {
    let g = geodesic_from(chart, u, v, theta, arc)?;
    let family = roll_ball(&g, r, &RollOptions::default())?;
    Ok(family.center_trajectory(r).initial_speed())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Isotropic,
    Anisotropic,
}

/// Which branch of the isotropy criterion holds at the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "umbilic")]
    Umbilic,
    #[serde(rename = "r_equals_1_over_h")]
    RadiusMatchesMeanCurvature,
    #[serde(rename = "neither")]
    Neither,
}

#[derive(Debug, Clone, Copy)]
pub struct IsotropyOptions {
    pub simulate: bool,
    pub arc: f64,
    pub tol_closed: f64,
    pub tol_simulated: f64,
}

impl Default for IsotropyOptions {
    fn default() -> Self {
        Self { simulate: false, arc: DEFAULT_ARC, tol_closed: TOL_ISO_CLOSED, tol_simulated: TOL_ISO_SIMULATED }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotropyReport {
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub thetas: Vec<f64>,
    pub speeds_closed: Vec<f64>,
    pub speeds_simulated: Option<Vec<f64>>,
    /// `max - min` of the closed-form speeds.
    pub spread_closed: f64,
    pub spread_simulated: Option<f64>,
    pub verdict: Verdict,
    pub verdict_simulated: Option<Verdict>,
    pub relation: Relation,
    /// `cos²θ` coefficient fitted to the closed-form squared speeds.
    pub coefficient_fit: f64,
    pub coefficient_fit_simulated: Option<f64>,
    /// `r(κ2 - κ1)(2 - r(κ1 + κ2))`.
    pub coefficient_closed: f64,
}

/// Number of distinct directions modulo `π`.
fn distinct_directions(thetas: &[f64]) -> usize {
    let mut reps: Vec<f64> = Vec::new();
    for &t in thetas.iter().filter(|t| t.is_finite()) {
        let a = t.rem_euclid(std::f64::consts::PI);
        let same = |b: &f64| {
            let d = (a - b).abs();
            d.min(std::f64::consts::PI - d) < 1e-9
        };
        if !reps.iter().any(same) {
            reps.push(a);
        }
    }
    reps.len()
}

/// Least-squares fit of `y = α + c cos²θ`; returns `c`.
fn fit_cos2(thetas: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = thetas.iter().map(|t| t.cos().powi(2)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

fn verdict(spread: f64, tol: f64) -> Verdict {
    if spread < tol {
        Verdict::Isotropic
    } else {
        Verdict::Anisotropic
    }
}

/// Compares the initial speed of `B_r` over the directions `thetas`.
pub fn isotropy_test(
    chart: &SurfaceChart,
    u: f64,
    v: f64,
    r: f64,
    thetas: &[f64],
    opts: &IsotropyOptions,
) -> Result<IsotropyReport> {
    let distinct = distinct_directions(thetas);
    if distinct < 3 {
        return Err(Error::BadDirections { distinct });
    }
    let pg = chart.point_geometry(u, v)?;
    let squared: Vec<f64> = thetas.iter().map(|&t| speed_squared(&pg, t, r)).collect();
    let speeds_closed: Vec<f64> = squared.iter().map(|s| s.max(0.0).sqrt()).collect();
    let spread_closed = spread(&speeds_closed);

    let speeds_simulated = if opts.simulate {
        Some(
            thetas
                .par_iter()
                .map(|&t| initial_speed_simulated(chart, u, v, t, r, opts.arc))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };
    let spread_simulated = speeds_simulated.as_deref().map(spread);
    let coefficient_fit_simulated = speeds_simulated
        .as_ref()
        .map(|s| fit_cos2(thetas, &s.iter().map(|x| x * x).collect::<Vec<_>>()));

    let relation = if pg.is_umbilic {
        Relation::Umbilic
    } else if (2.0 - r * (pg.kappa1 + pg.kappa2)).abs() < opts.tol_closed {
        Relation::RadiusMatchesMeanCurvature
    } else {
        Relation::Neither
    };
    Ok(IsotropyReport {
        u,
        v,
        r,
        kappa1: pg.kappa1,
        kappa2: pg.kappa2,
        thetas: thetas.to_vec(),
        verdict: verdict(spread_closed, opts.tol_closed),
        verdict_simulated: spread_simulated.map(|s| verdict(s, opts.tol_simulated)),
        speeds_closed,
        speeds_simulated,
        spread_closed,
        spread_simulated,
        relation,
        coefficient_fit: fit_cos2(thetas, &squared),
        coefficient_fit_simulated,
        coefficient_closed: cos2_coefficient(pg.kappa1, pg.kappa2, r),
    })
}

impl IsotropyReport {
    /// Rows `u,v,r,theta,speed_closed,speed_simulated`; the simulated
    /// column is `nan` when no simulation was run.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["u", "v", "r", "theta", "speed_closed", "speed_simulated"].map(String::from));
        for (i, theta) in self.thetas.iter().enumerate() {
            let sim = self.speeds_simulated.as_ref().map_or(f64::NAN, |s| s[i]);
            out.push_str(&csv_line([self.u, self.v, self.r, *theta, self.speeds_closed[i], sim].map(fmt17)));
        }
        out
    }
}

/// The ball parameter `r = 2/(κ1 + κ2) = 1/h` for which the initial speed is
/// isotropic at a non-umbilic point; `None` where `h` vanishes.
pub fn cmc_radius(pg: &PointGeometry) -> Option<f64> {
    let sum = pg.kappa1 + pg.kappa2;
    let scale = pg.kappa1.abs().max(pg.kappa2.abs()).max(1.0);
    if sum.abs() < 1e-9 * scale {
        None
    } else {
        Some(2.0 / sum)
    }
}

/// Surfaces on which some ball rolls at constant speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ConstantSpeedClass {
    Plane,
    /// `radius = 1/κ`, positive when the normal points to the center.
    Sphere {
        radius: f64,
    },
    /// `radius = 1/κ` of the curved direction; `r_matches` reports whether
    /// `r = 2/κ` (that is, `r = 2R` for the inward orientation).
    Cylinder {
        radius: f64,
        r_matches: bool,
    },
    NotConstant,
    /// Constant speed on the grid, but the curvatures match none of the
    /// three models.
    Unclassified,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub verdict: ConstantSpeedClass,
    pub r: f64,
    pub samples: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    pub kappa1_min: f64,
    pub kappa1_max: f64,
    pub kappa2_min: f64,
    pub kappa2_max: f64,
    pub umbilic_everywhere: bool,
}

/// Number of directions sampled per grid point in the classification.
pub const CLASSIFY_DIRECTIONS: usize = 16;

/// Checks whether the closed-form speed of `B_r` is constant over a grid of
/// points and directions and, if so, identifies the surface type from its
/// principal curvatures.
pub fn classify_constant_speed(
    chart: &SurfaceChart,
    region: &ParamRect,
    nu: usize,
    nv: usize,
    r: f64,
    tol_iso: f64,
) -> Result<ClassifyReport> {
    let points = region.grid(nu, nv);
    let geometry = points
        .par_iter()
        .map(|&(u, v)| chart.point_geometry(u, v))
        .collect::<Result<Vec<PointGeometry>>>()?;
    let speeds: Vec<f64> = geometry
        .iter()
        .flat_map(|pg| {
            (0..CLASSIFY_DIRECTIONS).map(move |k| {
                let theta = std::f64::consts::PI * k as f64 / CLASSIFY_DIRECTIONS as f64;
                speed_squared(pg, theta, r).max(0.0).sqrt()
            })
        })
        .collect();
    let range = |f: &dyn Fn(&PointGeometry) -> f64| {
        geometry.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (k1_lo, k1_hi) = range(&|pg| pg.kappa1);
    let (k2_lo, k2_hi) = range(&|pg| pg.kappa2);
    let speed_min = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
    let speed_max = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let umbilic_everywhere = geometry.iter().all(|pg| pg.is_umbilic);

    let scale = k1_lo.abs().max(k1_hi.abs()).max(k2_lo.abs()).max(k2_hi.abs()).max(1.0);
    let tol = CURVATURE_TOL * scale;
    let constant = |lo: f64, hi: f64| hi - lo < tol;
    let zero = |lo: f64, hi: f64| lo.abs() < tol && hi.abs() < tol;
    let verdict = if speed_max - speed_min >= tol_iso {
        ConstantSpeedClass::NotConstant
    } else if zero(k1_lo, k1_hi) && zero(k2_lo, k2_hi) {
        ConstantSpeedClass::Plane
    } else if umbilic_everywhere && constant(k1_lo, k1_hi) {
        ConstantSpeedClass::Sphere { radius: 1.0 / k1_lo }
    } else if constant(k1_lo, k1_hi) && constant(k2_lo, k2_hi) && (zero(k1_lo, k1_hi) || zero(k2_lo, k2_hi)) {
        let kappa = if zero(k2_lo, k2_hi) { 0.5 * (k1_lo + k1_hi) } else { 0.5 * (k2_lo + k2_hi) };
        ConstantSpeedClass::Cylinder { radius: 1.0 / kappa.abs(), r_matches: (r * kappa - 2.0).abs() < tol }
    } else {
        ConstantSpeedClass::Unclassified
    };
    Ok(ClassifyReport {
        verdict,
        r,
        samples: speeds.len(),
        speed_min,
        speed_max,
        kappa1_min: k1_lo,
        kappa1_max: k1_hi,
        kappa2_min: k2_lo,
        kappa2_max: k2_hi,
        umbilic_everywhere,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedSample {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub r: f64,
    pub speed_closed: f64,
    /// `NaN` when not simulated or when the simulation has no rolling.
    pub speed_simulated: f64,
    /// Evaluation parameter along the curve; 0 for initial speeds.
    pub t: f64,
}

/// Closed-form (and optionally simulated) initial speeds on an `r` by `θ`
/// grid at one point, both ranges inclusive. Rows are ordered by `r`, then
/// `θ`.
#[allow(clippy::too_many_arguments)]
pub fn speed_landscape(
    chart: &SurfaceChart,
    u: f64,
    v: f64,
    r_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
    simulate: Option<f64>,
) -> Result<Vec<SpeedSample>> {
    let pg = chart.point_geometry(u, v)?;
    let lerp = |(a, b): (f64, f64), k: usize, n: usize| if n <= 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
    let (nr, nt) = resolution;
    let cells: Vec<(f64, f64)> = (0..nr)
        .flat_map(|i| (0..nt).map(move |j| (lerp(r_range, i, nr), lerp(theta_range, j, nt))))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(r, theta)| SpeedSample {
            u,
            v,
            theta,
            r,
            speed_closed: speed_squared(&pg, theta, r).max(0.0).sqrt(),
            speed_simulated: simulate
                .and_then(|arc| initial_speed_simulated(chart, u, v, theta, r, arc).ok())
                .unwrap_or(f64::NAN),
            t: 0.0,
        })
        .collect())
}

/// Rows `u,v,r,theta,speed_closed,speed_simulated`.
pub fn landscape_csv(samples: &[SpeedSample]) -> String {
    let mut out = csv_line(["u", "v", "r", "theta", "speed_closed", "speed_simulated"].map(String::from));
    for s in samples {
        out.push_str(&csv_line([s.u, s.v, s.r, s.theta, s.speed_closed, s.speed_simulated].map(fmt17)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catenoid, cylinder, plane, sphere, torus};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn closed_form_examples() {
        let p = plane().point_geometry(0.3, 0.1).unwrap();
        assert_eq!(speed_squared(&p, 0.7, 3.0), 1.0);
        let s = sphere(1.0, true).point_geometry(0.3, 0.1).unwrap();
        assert!((speed_squared(&s, 1.1, 0.5) - 0.25).abs() < 1e-12);
        let c = cylinder(1.0, true).point_geometry(0.0, 0.0).unwrap();
        for theta in [0.0, 0.4, 1.3] {
            assert!((speed_squared(&c, theta, 2.0) - 1.0).abs() < 1e-12);
        }
        assert!(speed_squared(&c, 0.0, 1.0).abs() < 1e-12);
        assert!((speed_squared(&c, FRAC_PI_2, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        let c = cylinder(1.0, true).point_geometry(0.0, 0.0).unwrap();
        assert!((cmc_radius(&c).unwrap() - 2.0).abs() < 1e-12);
        let s = sphere(1.7, true).point_geometry(0.2, 0.3).unwrap();
        assert!((cmc_radius(&s).unwrap() - 1.7).abs() < 1e-9);
        let k = catenoid(1.0).point_geometry(0.3, 0.4).unwrap();
        assert_eq!(cmc_radius(&k), None);
    }

    #[test]
    fn bad_directions_are_rejected() {
        let chart = sphere(1.0, true);
        let err = isotropy_test(&chart, 0.0, 0.0, 0.5, &[0.0, PI, 1.0], &IsotropyOptions::default()).unwrap_err();
        assert_eq!(err, Error::BadDirections { distinct: 2 });
    }

    #[test]
    fn cylinder_isotropy_and_fit() {
        let chart = cylinder(1.0, true);
        let dirs = [0.0, std::f64::consts::FRAC_PI_3, 2.0 * std::f64::consts::FRAC_PI_3];
        let iso = isotropy_test(&chart, 0.0, 0.0, 2.0, &dirs, &IsotropyOptions::default()).unwrap();
        assert_eq!(iso.verdict, Verdict::Isotropic);
        assert_eq!(iso.relation, Relation::RadiusMatchesMeanCurvature);
        let aniso = isotropy_test(&chart, 0.0, 0.0, 1.5, &dirs, &IsotropyOptions::default()).unwrap();
        assert_eq!(aniso.verdict, Verdict::Anisotropic);
        assert!((aniso.coefficient_fit - aniso.coefficient_closed).abs() < 1e-12);
        assert!((aniso.coefficient_closed - (-0.75)).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let region = ParamRect::new(-1.0, 1.0, -1.0, 1.0);
        let cyl = classify_constant_speed(&cylinder(1.0, true), &region, 5, 5, 2.0, TOL_ISO_CLOSED).unwrap();
        assert_eq!(cyl.verdict, ConstantSpeedClass::Cylinder { radius: 1.0, r_matches: true });
        let off = classify_constant_speed(&cylinder(1.0, true), &region, 5, 5, 1.9, TOL_ISO_CLOSED).unwrap();
        assert_eq!(off.verdict, ConstantSpeedClass::NotConstant);
        let p = classify_constant_speed(&plane(), &region, 5, 5, 1.0, TOL_ISO_CLOSED).unwrap();
        assert_eq!(p.verdict, ConstantSpeedClass::Plane);
        let s = classify_constant_speed(&sphere(2.0, true), &region, 5, 5, 0.7, TOL_ISO_CLOSED).unwrap();
        match s.verdict {
            ConstantSpeedClass::Sphere { radius } => assert!((radius - 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let t = classify_constant_speed(&torus(2.0, 1.0, true), &region, 5, 5, 1.0, TOL_ISO_CLOSED).unwrap();
        assert_eq!(t.verdict, ConstantSpeedClass::NotConstant);
    }

    #[test]
    fn landscape_structure() {
        let chart = torus(2.0, 1.0, true);
        let rows = speed_landscape(&chart, 0.2, 0.3, (-1.0, 2.0), (0.0, PI), (7, 9), None).unwrap();
        assert_eq!(rows.len(), 63);
        assert!(rows[0].speed_simulated.is_nan());
        let csv = landscape_csv(&rows);
        assert_eq!(csv.lines().count(), 64);
        assert!(csv.starts_with("u,v,r,theta,speed_closed,speed_simulated\n"));
    }
}
