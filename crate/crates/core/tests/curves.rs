use std::sync::Arc;

use proptest::prelude::*;

use rollcmc::curves::{
    curve_from_parameter_path, euler_curvatures, geodesic_from, unit_speed_reparametrize, FnPath, PathJet,
    SurfaceCurve,
};
use rollcmc::geometry::{cylinder, ellipsoid, plane, sphere, torus, unduloid, SurfaceChart};
use rollcmc::numeric::sampled_derivative;
use rollcmc::{Mat3, Vec3};

fn charts() -> Vec<SurfaceChart> {
    vec![
        sphere(1.0, true),
        cylinder(1.0, true),
        ellipsoid(1.5, 1.0, 0.75, true),
        torus(2.0, 1.0, true),
        unduloid(1.0, 0.3, true).unwrap(),
    ]
}

#[test]
fn parabola_length() {
    let path = FnPath::analytic(1.0, |t| PathJet { u: t, v: t * t, du: 1.0, dv: 2.0 * t, ddu: 0.0, ddv: 2.0 });
    let curve = curve_from_parameter_path(&plane(), Arc::new(path)).unwrap();
    assert!((curve.length() - 1.478_942_857_544_597_4).abs() < 1e-12);
    for k in 0..=20 {
        let s = curve.length() * k as f64 / 20.0;
        assert!((curve.jet(s).unwrap().speed() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn cylinder_geodesic_is_a_helix() {
    let g = geodesic_from(&cylinder(1.0, true), 0.0, 0.0, std::f64::consts::FRAC_PI_4, 3.0).unwrap();
    let d = g.jet(0.0).unwrap().velocity;
    assert!((d.y.abs() - d.z.abs()).abs() < 1e-12);
    for k in 0..=30 {
        let s = 0.1 * k as f64;
        let expected = Vec3::new((d.y * s).cos(), (d.y * s).sin(), d.z * s);
        assert!((g.point(s).unwrap() - expected).norm() < 1e-7);
    }
}

#[test]
fn lines_of_curvature_have_no_geodesic_torsion() {
    // Meridians and parallels of surfaces of revolution, rulings of a cylinder.
    type Case = (SurfaceChart, (f64, f64), (f64, f64));
    let cases: Vec<Case> = vec![
        (torus(2.0, 1.0, true), (0.0, 0.3), (1.0, 0.0)),
        (torus(2.0, 1.0, true), (0.4, 0.0), (0.0, 1.0)),
        (unduloid(1.0, 0.3, true).unwrap(), (0.2, -1.0), (0.0, 1.0)),
        (unduloid(1.0, 0.3, true).unwrap(), (0.2, 0.7), (1.0, 0.0)),
        (cylinder(1.0, true), (0.0, 0.0), (0.0, 1.0)),
    ];
    for (chart, start, rate) in cases {
        let curve = SurfaceCurve::new(chart, Arc::new(FnPath::segment(2.0, start, rate))).unwrap();
        let curve = unit_speed_reparametrize(&curve).unwrap();
        for t in curve.sample_times(40) {
            assert!(curve.darboux(t).unwrap().tau_g.abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn euler_consistency(idx in 0usize..5, u in -3.0f64..3.0, v in -1.2f64..1.2, theta in -3.2f64..3.2) {
        let chart = &charts()[idx];
        let pg = chart.point_geometry(u, v).unwrap();
        let g = geodesic_from(chart, u, v, theta, 0.05).unwrap();
        let d = g.darboux(0.0).unwrap();
        let (kn, tg) = euler_curvatures(&pg, theta);
        prop_assert!((d.kappa_n - kn).abs() < 1e-6, "{} vs {}", d.kappa_n, kn);
        prop_assert!((d.tau_g - tg).abs() < 1e-6, "{} vs {}", d.tau_g, tg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn geodesics_have_zero_geodesic_curvature(idx in 0usize..5, u in -3.0f64..3.0, v in -1.0f64..1.0, theta in -3.2f64..3.2) {
        let g = geodesic_from(&charts()[idx], u, v, theta, 1.0).unwrap();
        for t in g.sample_times(50) {
            let j = g.jet(t).unwrap();
            let d = j.darboux();
            prop_assert!(d.kappa_g.abs() < 1e-7);
            prop_assert!((j.speed() - 1.0).abs() < 1e-8);
            // κ_g² + κ_n² = |γ''|² at unit speed.
            prop_assert!((d.kappa_g.powi(2) + d.kappa_n.powi(2) - j.acceleration.norm_squared()).abs() < 1e-7);
        }
    }

    #[test]
    fn frame_equation(idx in 0usize..5, u in -3.0f64..3.0, v in -1.0f64..1.0, theta in -3.2f64..3.2) {
        let g = geodesic_from(&charts()[idx], u, v, theta, 1.0).unwrap();
        let times = g.sample_times(200);
        let h = times[1] - times[0];
        let frames: Vec<Mat3> = times.iter().map(|&t| g.frame(t).unwrap()).collect();
        for (i, &t) in times.iter().enumerate() {
            let d = frames[i];
            prop_assert!((d.transpose() * d - Mat3::identity()).abs().max() < 1e-9);
            prop_assert!((d.determinant() - 1.0).abs() < 1e-9);
            let rate = sampled_derivative(&frames, h, i);
            let lambda = g.darboux(t).unwrap().lambda();
            prop_assert!((rate - d * lambda.transpose()).abs().max() < 1e-5);
        }
    }
}
