//! Anti-development: the curve on the rolling surface whose geodesic
//! curvature coincides with that of the contact curve.

use nalgebra::Matrix3x4;

use crate::curves::{curve_with_geodesic_curvature, DarbouxTriple, IntegrationOptions, KappaFn, SurfaceCurve};
use crate::geometry::SurfaceChart;
use crate::numeric::{orthonormalize, rk4_step, sampled_derivative};
use crate::{Error, Mat3, Result, Vec3};

/// Position and Darboux frame packed as the columns `[x | T, N x T, N]`.
type FrameState = Matrix3x4<f64>;

/// Tolerance for the placement of a general rolling surface at the contact
/// point.
const PLACEMENT_TOL: f64 = 1e-8;

/// The surface that rolls.
#[derive(Debug, Clone)]
pub enum RollingSurface {
    /// Ball of radius `|r|` centered at `p + r N_p`.
    Sphere { r: f64 },
    /// The tangent plane of the contact surface at `p`.
    Plane,
    /// A chart whose point `(u, v)` is already placed at `p` and tangent
    /// there to the contact surface.
    General { chart: SurfaceChart, u: f64, v: f64 },
}

impl RollingSurface {
    /// Moves `chart` rigidly so that its point `(u, v)` lands on `p`, its
    /// normal on `normal`, and its tangent direction at angle `angle` from
    /// the first principal direction on `tangent`.
    pub fn place(
        chart: &SurfaceChart,
        u: f64,
        v: f64,
        angle: f64,
        p: Vec3,
        tangent: Vec3,
        normal: Vec3,
    ) -> Result<Self> {
        let pg = chart.point_geometry(u, v)?;
        let source = frame_of(pg.direction(angle), pg.normal);
        let target = frame_of(tangent, normal);
        let rotation = target * source.transpose();
        let translation = p - rotation * pg.position;
        Ok(Self::General { chart: chart.transformed(rotation, translation), u, v })
    }

    fn check(&self) -> Result<()> {
        match self {
            Self::Sphere { r } if !(r.is_finite() && *r != 0.0) => {
                Err(Error::InvalidArgument(format!("ball parameter r must be finite and nonzero, got {r}")))
            }
            _ => Ok(()),
        }
    }
}

/// Darboux frame `(T, N x T, N)` from a tangent and a normal.
fn frame_of(tangent: Vec3, normal: Vec3) -> Mat3 {
    let n = normal.normalize();
    let t = (tangent - n * n.dot(&tangent)).normalize();
    Mat3::from_columns(&[t, n.cross(&t), n])
}

#[derive(Debug, Clone, Copy)]
pub struct RollOptions {
    /// Number of output intervals; by default 256 per unit length, at
    /// least 64.
    pub samples: Option<usize>,
    /// Initial integration steps per unit length.
    pub steps_per_length: f64,
    /// Richardson acceptance distance between successive refinements.
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for RollOptions {
    fn default() -> Self {
        Self { samples: None, steps_per_length: 2048.0, tolerance: 1e-7, max_refinements: 8 }
    }
}

impl RollOptions {
    pub fn sample_count(&self, length: f64) -> usize {
        self.samples.unwrap_or_else(|| ((256.0 * length).ceil() as usize).max(64)).max(8)
    }

    fn initial_steps(&self, length: f64, samples: usize) -> usize {
        let wanted = (self.steps_per_length * length).ceil().max(samples as f64) as usize;
        wanted.div_ceil(samples) * samples
    }
}

/// The anti-development sampled at `samples + 1` equally spaced arclength
/// values.
#[derive(Debug, Clone)]
pub struct AntiDevelopment {
    pub times: Vec<f64>,
    pub positions: Vec<Vec3>,
    /// Darboux frames `D̃_t`.
    pub frames: Vec<Mat3>,
    /// Normal of the rolling surface at `γ̃(t)`, from its own geometry.
    pub surface_normals: Vec<Vec3>,
    /// `(κ̃_g, κ̃_n, τ̃_g)`, with `κ̃_g` the curvature driving the frame.
    pub triples: Vec<DarbouxTriple>,
    /// `κ̃_g` measured independently from the computed curve.
    pub measured_kappa_g: Vec<f64>,
    /// Largest `|κ̃_g - κ_g|` over the integration nodes.
    pub kappa_g_residual: f64,
    /// The curve on the rolling surface, for chart-defined surfaces.
    pub curve: Option<SurfaceCurve>,
    /// Integration steps of the accepted solution.
    pub steps: usize,
}

impl AntiDevelopment {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

/// Integrates the curve on `surface` that starts at `p` with unit tangent
/// `tangent`, shares the normal `normal` there, and has geodesic curvature
/// `kappa_g(t)` for `t` in `[0, length]`.
pub fn anti_develop(
    surface: &RollingSurface,
    kappa_g: &KappaFn<'_>,
    p: Vec3,
    tangent: Vec3,
    normal: Vec3,
    length: f64,
    opts: &RollOptions,
) -> Result<AntiDevelopment> {
    surface.check()?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument(format!("rolling length must be positive, got {length}")));
    }
    match surface {
        RollingSurface::Sphere { r } => {
            let center = p + normal.normalize() * *r;
            let ball = Ball { kappa_n: 1.0 / r, center: Some((center, *r)) };
            ball.develop(kappa_g, p, frame_of(tangent, normal), length, opts)
        }
        RollingSurface::Plane => {
            Ball { kappa_n: 0.0, center: None }.develop(kappa_g, p, frame_of(tangent, normal), length, opts)
        }
        RollingSurface::General { chart, u, v } => general(chart, *u, *v, kappa_g, p, tangent, normal, length, opts),
    }
}

/// A totally umbilic rolling surface: a sphere through `p` or the plane.
struct Ball {
    kappa_n: f64,
    /// Center and signed radius; `None` for the plane.
    center: Option<(Vec3, f64)>,
}

impl Ball {
    fn normal_at(&self, x: &Vec3, plane_normal: &Vec3) -> Vec3 {
        match self.center {
            Some((c, r)) => (c - x) / r,
            None => *plane_normal,
        }
    }

    fn run(&self, kappa_g: &KappaFn<'_>, start: &FrameState, length: f64, steps: usize) -> Result<Vec<FrameState>> {
        let h = length / steps as f64;
        let rhs = |t: f64, y: &FrameState| -> Result<FrameState> {
            let d: Mat3 = y.fixed_columns::<3>(1).into_owned();
            let lambda = DarbouxTriple { t, kappa_g: kappa_g(t)?, kappa_n: self.kappa_n, tau_g: 0.0 }.lambda();
            let mut out = FrameState::zeros();
            out.set_column(0, &d.column(0));
            out.fixed_columns_mut::<3>(1).copy_from(&(d * lambda.transpose()));
            Ok(out)
        };
        let mut nodes = Vec::with_capacity(steps + 1);
        let mut y = *start;
        nodes.push(y);
        for k in 0..steps {
            y = rk4_step(&rhs, k as f64 * h, &y, h)?;
            let d = orthonormalize(&y.fixed_columns::<3>(1).into_owned());
            y.fixed_columns_mut::<3>(1).copy_from(&d);
            if let Some((c, r)) = self.center {
                let x: Vec3 = y.column(0).into_owned();
                let offset = x - c;
                y.set_column(0, &(c + offset * (r.abs() / offset.norm())));
            }
            nodes.push(y);
        }
        Ok(nodes)
    }

    fn develop(
        &self,
        kappa_g: &KappaFn<'_>,
        p: Vec3,
        frame: Mat3,
        length: f64,
        opts: &RollOptions,
    ) -> Result<AntiDevelopment> {
        let samples = opts.sample_count(length);
        let mut steps = opts.initial_steps(length, samples);
        let mut start = FrameState::zeros();
        start.set_column(0, &p);
        start.fixed_columns_mut::<3>(1).copy_from(&frame);

        let mut coarse = self.run(kappa_g, &start, length, steps)?;
        let mut refinements = 0;
        let fine = loop {
            let fine = self.run(kappa_g, &start, length, 2 * steps)?;
            steps *= 2;
            let diff = coarse
                .iter()
                .zip(fine.iter().step_by(2))
                .map(|(a, b)| (a - b).abs().max())
                .fold(0.0, f64::max);
            if diff < opts.tolerance {
                break fine;
            }
            refinements += 1;
            if refinements > opts.max_refinements {
                return Err(Error::StepFailure(format!(
                    "anti-development still changes by {diff:e} after {refinements} step halvings"
                )));
            }
            coarse = fine;
        };

        let h = length / steps as f64;
        let tangents: Vec<Vec3> = fine.iter().map(|y| y.column(1).into_owned()).collect();
        let mut residual: f64 = 0.0;
        for (k, y) in fine.iter().enumerate() {
            let measured = sampled_derivative(&tangents, h, k).dot(&y.column(2));
            residual = residual.max((measured - kappa_g(k as f64 * h)?).abs());
        }
        if residual > 10.0 * opts.tolerance {
            return Err(Error::StepFailure(format!("anti-development geodesic curvature residual {residual:e}")));
        }

        let stride = steps / samples;
        let mut out = AntiDevelopment {
            times: Vec::with_capacity(samples + 1),
            positions: Vec::with_capacity(samples + 1),
            frames: Vec::with_capacity(samples + 1),
            surface_normals: Vec::with_capacity(samples + 1),
            triples: Vec::with_capacity(samples + 1),
            measured_kappa_g: Vec::with_capacity(samples + 1),
            kappa_g_residual: residual,
            curve: None,
            steps,
        };
        let plane_normal = frame.column(2).into_owned();
        for i in 0..=samples {
            let k = i * stride;
            let t = length * i as f64 / samples as f64;
            let y = &fine[k];
            let x: Vec3 = y.column(0).into_owned();
            out.times.push(t);
            out.positions.push(x);
            out.frames.push(y.fixed_columns::<3>(1).into_owned());
            out.surface_normals.push(self.normal_at(&x, &plane_normal));
            out.triples.push(DarbouxTriple { t, kappa_g: kappa_g(t)?, kappa_n: self.kappa_n, tau_g: 0.0 });
            out.measured_kappa_g.push(sampled_derivative(&tangents, h, k).dot(&y.column(2)));
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn general(
    chart: &SurfaceChart,
    u: f64,
    v: f64,
    kappa_g: &KappaFn<'_>,
    p: Vec3,
    tangent: Vec3,
    normal: Vec3,
    length: f64,
    opts: &RollOptions,
) -> Result<AntiDevelopment> {
    let at = chart.point(u, v)?;
    let scale = p.norm().max(chart.scale()).max(1.0);
    if (at - p).norm() > PLACEMENT_TOL * scale {
        return Err(Error::Misplaced(format!("chart point ({u}, {v}) is at distance {:e} from p", (at - p).norm())));
    }
    let n = chart.normal(u, v)?;
    let alignment = n.dot(&normal.normalize());
    let chart = if alignment > 1.0 - PLACEMENT_TOL {
        chart.clone()
    } else if alignment < -(1.0 - PLACEMENT_TOL) {
        chart.flipped()
    } else {
        return Err(Error::Misplaced(format!("normals differ: <N~, N_p> = {alignment}")));
    };

    let samples = opts.sample_count(length);
    let integration = IntegrationOptions {
        steps: opts.initial_steps(length, samples),
        tolerance: opts.tolerance,
        max_refinements: opts.max_refinements,
    };
    let curve = curve_with_geodesic_curvature(&chart, u, v, tangent, kappa_g, length, integration)?;

    let mut out = AntiDevelopment {
        times: Vec::with_capacity(samples + 1),
        positions: Vec::with_capacity(samples + 1),
        frames: Vec::with_capacity(samples + 1),
        surface_normals: Vec::with_capacity(samples + 1),
        triples: Vec::with_capacity(samples + 1),
        measured_kappa_g: Vec::with_capacity(samples + 1),
        kappa_g_residual: 0.0,
        curve: None,
        steps: integration.steps,
    };
    for i in 0..=samples {
        let t = length * i as f64 / samples as f64;
        let j = curve.jet(t)?;
        let triple = j.darboux();
        out.kappa_g_residual = out.kappa_g_residual.max((triple.kappa_g - kappa_g(t)?).abs());
        out.times.push(t);
        out.positions.push(j.point);
        out.frames.push(j.frame());
        out.surface_normals.push(j.normal);
        out.triples.push(triple);
        out.measured_kappa_g.push(triple.kappa_g);
    }
    out.curve = Some(curve);
    Ok(out)
}
