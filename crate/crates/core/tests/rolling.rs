use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use rollcmc::curves::{geodesic_from, FnPath, SurfaceCurve};
use rollcmc::geometry::{cylinder, ellipsoid, plane, sphere, torus};
use rollcmc::rolling::{
    anti_develop, build_motion, roll, roll_ball, MotionClass, RigidMotionFamily, RollOptions, RollingSurface,
};
use rollcmc::{Error, Mat3, Vec3};

fn assert_invariants(family: &RigidMotionFamily) {
    let r = family.residuals();
    assert!(r.initial < 1e-12, "{r:?}");
    assert!(r.orthogonality < 1e-9, "{r:?}");
    assert!(r.determinant < 1e-9, "{r:?}");
    assert!(r.no_spin < 1e-8, "{r:?}");
    assert!(r.no_skid < 1e-7, "{r:?}");
    assert!(r.tangency < 1e-6, "{r:?}");
    assert!(r.omega_agreement < 1e-5, "{r:?}");
    assert!(family.anti_development.kappa_g_residual < 1e-7);
}

fn rotation_about_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

#[test]
fn ball_on_plane_matches_disk_rolling() {
    let line = SurfaceCurve::new(plane(), Arc::new(FnPath::segment(3.0, (0.0, 0.0), (1.0, 0.0)))).unwrap();
    for r in [1.0, 0.5, -0.7] {
        let family = roll_ball(&line, r, &RollOptions::default()).unwrap();
        assert_invariants(&family);
        for (i, &t) in family.times.iter().enumerate() {
            let expected = rotation_about_y(t / r);
            assert!((family.rotations[i] - expected).abs().max() < 1e-7, "r = {r}, t = {t}");
            assert!((family.omegas[i] - Vec3::new(0.0, 1.0 / r, 0.0)).norm() < 1e-12);
        }
        let centers = family.center_trajectory(r);
        assert!(centers.max_discrepancy < 1e-7);
        for (c, t) in centers.from_motion.iter().zip(&family.times) {
            assert!((c - Vec3::new(*t, 0.0, r)).norm() < 1e-7);
        }
    }
}

#[test]
fn small_ball_inside_unit_sphere() {
    let g = geodesic_from(&sphere(1.0, true), 0.3, 0.2, 0.9, 2.5).unwrap();
    let family = roll_ball(&g, 0.5, &RollOptions::default()).unwrap();
    assert_invariants(&family);
    let centers = family.center_trajectory(0.5);
    assert!(centers.max_discrepancy < 1e-7);
    for c in &centers.from_motion {
        assert!((c.norm() - 0.5).abs() < 1e-7);
    }
    for i in [0, family.len() / 2, family.len() - 1] {
        match family.classify_at(i).unwrap() {
            MotionClass::Rotation { center, omega } => {
                assert!((center - family.contacts[i]).norm() < 1e-6);
                assert!((omega - family.omegas[i]).norm() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn umbilic_ball_cannot_roll() {
    let g = geodesic_from(&sphere(1.0, true), 0.0, 0.0, 0.4, 0.5).unwrap();
    match roll_ball(&g, 1.0, &RollOptions::default()) {
        Err(Error::NotRolling { t }) => assert_eq!(t, 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cylinder_ball_twice_the_radius_rolls() {
    let g = geodesic_from(&cylinder(1.0, true), 0.0, 0.0, FRAC_PI_4, 1.5).unwrap();
    let family = roll_ball(&g, 2.0, &RollOptions::default()).unwrap();
    assert_invariants(&family);
    let t0 = family.triples[0];
    assert!((t0.kappa_n - 0.5).abs() < 1e-9 && (t0.tau_g + 0.5).abs() < 1e-9);
    let local = family.frames[0].transpose() * family.omegas[0];
    assert!((local - Vec3::new(-0.5, 0.0, 0.0)).norm() < 1e-9);
}

#[test]
fn latitude_circle_develops_onto_a_circle() {
    let phi: f64 = 0.6;
    let lat = SurfaceCurve::new(sphere(1.0, true), Arc::new(FnPath::segment(PI, (0.0, phi), (1.0, 0.0)))).unwrap();
    let lat = rollcmc::curves::unit_speed_reparametrize(&lat).unwrap();
    let j0 = lat.jet(0.0).unwrap();
    let kappa_g = j0.darboux().kappa_g;
    assert!((kappa_g.abs() - phi.tan()).abs() < 1e-8);
    let kg = |t: f64| Ok(lat.darboux(t)?.kappa_g);
    let ad = anti_develop(
        &RollingSurface::Plane,
        &kg,
        j0.point,
        j0.velocity,
        j0.normal,
        lat.length(),
        &RollOptions::default(),
    )
    .unwrap();
    assert!(ad.kappa_g_residual < 1e-7);
    let center = j0.point + j0.normal.cross(&j0.velocity) / kappa_g;
    for x in &ad.positions {
        assert!(((x - center).norm() - 1.0 / kappa_g.abs()).abs() < 1e-6);
        assert!((x - j0.point).dot(&j0.normal).abs() < 1e-12);
    }
    let family = build_motion(&lat, &ad).unwrap();
    assert_invariants(&family);
}

#[test]
fn rolling_is_a_group() {
    let g = geodesic_from(&ellipsoid(1.5, 1.0, 0.75, true), 0.4, 0.3, 0.7, 2.0).unwrap();
    let r = 0.4;
    let whole = roll_ball(&g, r, &RollOptions { samples: Some(256), ..Default::default() }).unwrap();
    let first = roll_ball(&g.subarc(0.0, 1.0), r, &RollOptions { samples: Some(128), ..Default::default() }).unwrap();
    let second = roll_ball(&g.subarc(1.0, 1.0), r, &RollOptions { samples: Some(128), ..Default::default() }).unwrap();
    let (a_s, b_s) = (first.rotations[128], first.translations[128]);
    for i in 0..=128 {
        let a = second.rotations[i] * a_s;
        let b = second.rotations[i] * b_s + second.translations[i];
        assert!((a - whole.rotations[128 + i]).abs().max() < 1e-6);
        assert!((b - whole.translations[128 + i]).norm() < 1e-6);
    }
}

#[test]
fn chart_defined_ball_matches_designated_ball() {
    let g = geodesic_from(&torus(2.0, 1.0, true), 0.1, 0.2, 0.3, 1.0).unwrap();
    let j0 = g.jet(0.0).unwrap();
    let ball = RollingSurface::place(&sphere(0.5, true), 0.0, 0.0, 0.0, j0.point, j0.velocity, j0.normal).unwrap();
    let general = roll(&g, &ball, &RollOptions::default()).unwrap();
    let designated = roll_ball(&g, 0.5, &RollOptions::default()).unwrap();
    assert_invariants(&general);
    for i in 0..general.len() {
        assert!((general.rotations[i] - designated.rotations[i]).abs().max() < 1e-6);
    }
}

#[test]
fn general_surface_must_touch_at_the_contact_point() {
    let kg = |_t: f64| Ok(0.0);
    let misplaced = RollingSurface::General { chart: sphere(1.0, true), u: 0.0, v: 0.0 };
    let err = anti_develop(
        &misplaced,
        &kg,
        Vec3::zeros(),
        Vec3::x(),
        Vec3::z(),
        1.0,
        &RollOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Misplaced(_)));
}

#[test]
fn general_surface_leaving_its_chart() {
    let line = SurfaceCurve::new(plane(), Arc::new(FnPath::segment(10.0, (0.0, 0.0), (1.0, 0.0)))).unwrap();
    let j0 = line.jet(0.0).unwrap();
    // Meridian direction on the ball chart, whose latitude range is bounded.
    let ball = RollingSurface::place(&sphere(1.0, true), 0.0, 0.0, 0.5 * PI, j0.point, j0.velocity, j0.normal).unwrap();
    let err = roll(&line, &ball, &RollOptions::default()).unwrap_err();
    assert!(matches!(err, Error::DomainExit { .. }), "{err:?}");
}

#[test]
fn motion_exports() {
    let line = SurfaceCurve::new(plane(), Arc::new(FnPath::segment(1.0, (0.0, 0.0), (1.0, 0.0)))).unwrap();
    let family = roll_ball(&line, 1.0, &RollOptions { samples: Some(8), ..Default::default() }).unwrap();
    let csv = family.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,a11,a12,a13,a21,a22,a23,a31,a32,a33,bx,by,bz,omega_x,omega_y,omega_z,contact_x,contact_y,contact_z"
    );
    assert_eq!(lines.count(), 9);
    let json: serde_json::Value = serde_json::from_str(&family.to_json()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 9);
    assert_eq!(json[0]["a11"].as_f64(), Some(1.0));
    assert_eq!(family.to_csv(), csv);
}
