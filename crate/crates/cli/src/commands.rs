use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rollcmc::curves::{geodesic_from, unit_speed_reparametrize, FnPath, SurfaceCurve};
use rollcmc::experiments::{
    classify_constant_speed, isotropy_test, landscape_csv, speed_landscape, IsotropyOptions, DEFAULT_ARC,
    TOL_ISO_CLOSED,
};
use rollcmc::geometry::{ParamRect, SurfaceChart};
use rollcmc::output::to_json17;
use rollcmc::rolling::{roll, roll_ball, RollOptions, RollingSurface};
use rollcmc::Error;

use crate::config::{Format, Roller, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Curvature,
    Roll,
    Isotropy,
    Classify,
    Scan,
}

#[derive(Debug)]
pub enum Failure {
    Library(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Library(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Library(e) => write!(f, "{e}"),
            Self::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl Failure {
    /// 2 for bad input or domain errors, 3 when no rolling exists, 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 2,
            Self::Library(e) => match e {
                Error::NotRolling { .. } => 3,
                Error::StepFailure(_) | Error::NotSkew { .. } | Error::NoCenter { .. } => 4,
                _ => 2,
            },
        }
    }
}

type Outcome = Result<String, Failure>;

fn need<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, Failure> {
    value.clone().ok_or_else(|| Failure::Library(Error::InvalidArgument(format!("missing --{flag}"))))
}

fn chart(config: &RunConfig) -> Result<SurfaceChart, Failure> {
    Ok(need(&config.surface, "surface")?.build()?)
}

/// Writes `text` to `path`, or to standard output (returned) for `-`.
fn emit(path: &Path, text: String, stdout: &mut String) -> Result<(), Failure> {
    if path == Path::new("-") {
        stdout.push_str(&text);
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
    }
}

fn out_path(config: &RunConfig, stem: &str, format: Format) -> PathBuf {
    config.out.clone().unwrap_or_else(|| {
        PathBuf::from(match format {
            Format::Csv => format!("{stem}.csv"),
            Format::Json => format!("{stem}.json"),
        })
    })
}

/// Runs `command` in a thread pool of `config.jobs` workers (default: one
/// per core) and returns what goes to standard output.
pub fn run(command: Command, config: &RunConfig) -> Outcome {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()).into());
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Failure::Io(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match command {
        Command::Curvature => curvature(config),
        Command::Roll => roll_command(config),
        Command::Isotropy => isotropy(config),
        Command::Classify => classify(config),
        Command::Scan => scan(config),
    })
}

fn curvature(config: &RunConfig) -> Outcome {
    let (u, v) = need(&config.at, "at")?;
    let text = to_json17(&chart(config)?.point_geometry(u, v)?);
    let mut stdout = String::new();
    match &config.out {
        Some(path) => emit(path, text, &mut stdout)?,
        None => stdout = text,
    }
    Ok(stdout)
}

fn contact_curve(config: &RunConfig, chart: &SurfaceChart) -> Result<SurfaceCurve, Failure> {
    match (&config.path_u, &config.path_v) {
        (Some(u), Some(v)) => {
            let path = FnPath::from_expressions(need(&config.t_end, "t-end")?, u, v)?;
            Ok(unit_speed_reparametrize(&SurfaceCurve::new(chart.clone(), Arc::new(path))?)?)
        }
        (None, None) => {
            let (u, v) = need(&config.at, "at")?;
            Ok(geodesic_from(chart, u, v, config.theta.unwrap_or(0.0), config.length.unwrap_or(1.0))?)
        }
        _ => Err(Error::InvalidArgument("--path-u and --path-v go together".into()).into()),
    }
}

fn roll_command(config: &RunConfig) -> Outcome {
    let chart = chart(config)?;
    let curve = contact_curve(config, &chart)?;
    let opts = RollOptions { samples: config.samples, ..Default::default() };
    let roller = config.roller.unwrap_or(Roller::Ball);
    let family = match roller {
        Roller::Ball => roll_ball(&curve, need(&config.r, "r")?, &opts)?,
        Roller::Plane => roll(&curve, &RollingSurface::Plane, &opts)?,
    };
    let format = config.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => family.to_csv(),
        Format::Json => family.to_json(),
    };
    let mut stdout = String::new();
    emit(&out_path(config, "roll", format), text, &mut stdout)?;
    let mut summary = json!({
        "length": curve.length(),
        "samples": family.len(),
        "residuals": family.residuals(),
        "kappa_g_residual": family.anti_development.kappa_g_residual,
    });
    if let (Roller::Ball, Some(r)) = (roller, config.r) {
        summary["center_discrepancy"] = json!(family.center_trajectory(r).max_discrepancy);
    }
    stdout.push_str(&to_json17(&summary));
    Ok(stdout)
}

/// Explicit directions, seeded random ones, or 16 evenly spaced in `[0, π)`.
fn directions(config: &RunConfig) -> Vec<f64> {
    if let Some(dirs) = &config.dirs {
        return dirs.clone();
    }
    if let Some(n) = config.random_dirs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
        return (0..n).map(|_| rng.random_range(0.0..PI)).collect();
    }
    (0..16).map(|k| PI * k as f64 / 16.0).collect()
}

fn isotropy(config: &RunConfig) -> Outcome {
    let chart = chart(config)?;
    let (u, v) = need(&config.at, "at")?;
    let opts = IsotropyOptions {
        simulate: config.simulate.unwrap_or(false),
        arc: config.arc.unwrap_or(DEFAULT_ARC),
        tol_closed: config.tol_iso.unwrap_or(TOL_ISO_CLOSED),
        ..Default::default()
    };
    let report = isotropy_test(&chart, u, v, need(&config.r, "r")?, &directions(config), &opts)?;
    let format = config.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => to_json17(&report),
    };
    let mut stdout = String::new();
    emit(&out_path(config, "isotropy", format), text, &mut stdout)?;
    stdout.push_str(&to_json17(&json!({
        "verdict": report.verdict,
        "verdict_simulated": report.verdict_simulated,
        "relation": report.relation,
        "kappa1": report.kappa1,
        "kappa2": report.kappa2,
        "spread_closed": report.spread_closed,
        "spread_simulated": report.spread_simulated,
        "coefficient_fit": report.coefficient_fit,
        "coefficient_fit_simulated": report.coefficient_fit_simulated,
        "coefficient_closed": report.coefficient_closed,
    })));
    Ok(stdout)
}

fn default_region() -> ParamRect {
    ParamRect::new(-1.0, 1.0, -1.0, 1.0)
}

fn classify(config: &RunConfig) -> Outcome {
    if config.format == Some(Format::Csv) {
        return Err(Error::InvalidArgument("classify writes JSON only".into()).into());
    }
    let chart = chart(config)?;
    let (nu, nv) = config.grid.unwrap_or((9, 9));
    let region = config.region.unwrap_or_else(default_region);
    let report = classify_constant_speed(
        &chart,
        &region,
        nu,
        nv,
        need(&config.r, "r")?,
        config.tol_iso.unwrap_or(TOL_ISO_CLOSED),
    )?;
    let text = to_json17(&report);
    let mut stdout = String::new();
    emit(&out_path(config, "classify", Format::Json), text.clone(), &mut stdout)?;
    if !config.out.as_deref().is_some_and(|p| p == Path::new("-")) {
        stdout.push_str(&text);
    }
    Ok(stdout)
}

/// `--at`, or `--points` seeded random points in `--region`.
fn scan_points(config: &RunConfig) -> Result<Vec<(f64, f64)>, Failure> {
    match (config.at, config.points) {
        (Some(at), None) => Ok(vec![at]),
        (None, Some(n)) => {
            let d = config.region.unwrap_or_else(default_region);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
            Ok((0..n)
                .map(|_| (rng.random_range(d.u_min..d.u_max), rng.random_range(d.v_min..d.v_max)))
                .collect())
        }
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give either --at or --points".into()).into()),
        (None, None) => Err(Error::InvalidArgument("missing --at or --points".into()).into()),
    }
}

fn scan(config: &RunConfig) -> Outcome {
    let chart = chart(config)?;
    let r_range = need(&config.r_range, "r-range")?;
    let theta_range = config.theta_range.unwrap_or((0.0, PI));
    let resolution = config.resolution.unwrap_or((21, 37));
    let arc = config.simulate.unwrap_or(false).then(|| config.arc.unwrap_or(DEFAULT_ARC));
    let mut samples = Vec::new();
    for (u, v) in scan_points(config)? {
        samples.extend(speed_landscape(&chart, u, v, r_range, theta_range, resolution, arc)?);
    }
    let format = config.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => landscape_csv(&samples),
        Format::Json => to_json17(&samples),
    };
    let mut stdout = String::new();
    emit(&out_path(config, "landscape", format), text, &mut stdout)?;
    Ok(stdout)
}
