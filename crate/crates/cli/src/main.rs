use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rollcmc_cli::{run, Command, Failure, RunConfig};

/// Rolling of balls on parametric surfaces and isotropic-speed tests.
///
/// Angles are in radians, measured from the first principal direction.
/// Exit codes: 0 success, 2 input or domain error, 3 no rolling exists,
/// 4 numerical failure.
#[derive(Parser)]
#[command(name = "rollcmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Print the point geometry (forms, principal curvatures) as JSON.
    Curvature(Flags),
    /// Roll a ball (or the plane) along a geodesic or a given path.
    Roll(Flags),
    /// Compare initial speeds of a ball over several directions.
    Isotropy(Flags),
    /// Decide whether a ball rolls at constant speed over a region.
    Classify(Flags),
    /// Tabulate initial speeds over a grid of radii and directions.
    Scan(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Run configuration file (`key = value` lines); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline surface, e.g. `sphere:R=1` or `cylinder:R=2,inward`, or a
    /// surface definition file.
    #[arg(long)]
    surface: Option<String>,
    /// Parameter point `u,v`.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// Direction of the geodesic, from the first principal direction.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Length of the geodesic.
    #[arg(long)]
    length: Option<String>,
    /// Ball parameter (signed radius).
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// `ball` (default) or `plane`.
    #[arg(long)]
    roller: Option<String>,
    /// Contact path `u(t)`, an expression in `t`.
    #[arg(long, allow_hyphen_values = true)]
    path_u: Option<String>,
    /// Contact path `v(t)`, an expression in `t`.
    #[arg(long, allow_hyphen_values = true)]
    path_v: Option<String>,
    /// End of the contact path parameter.
    #[arg(long)]
    t_end: Option<String>,
    /// Number of output intervals along the rolling.
    #[arg(long)]
    samples: Option<String>,
    /// Directions `θ1,θ2,...`.
    #[arg(long, allow_hyphen_values = true)]
    dirs: Option<String>,
    /// Number of random directions in `[0, π)`, drawn with `--seed`.
    #[arg(long)]
    random_dirs: Option<String>,
    /// Also measure speeds by rolling along short geodesics.
    #[arg(long)]
    simulate: bool,
    /// Geodesic length for simulated speeds.
    #[arg(long)]
    arc: Option<String>,
    /// Isotropy tolerance on the closed-form speeds.
    #[arg(long)]
    tol_iso: Option<String>,
    /// `r_min,r_max` for `scan`.
    #[arg(long, allow_hyphen_values = true)]
    r_range: Option<String>,
    /// `θ_min,θ_max` for `scan`; default `0,π`.
    #[arg(long, allow_hyphen_values = true)]
    theta_range: Option<String>,
    /// `n_r,n_θ` for `scan`.
    #[arg(long)]
    resolution: Option<String>,
    /// `u_min,u_max,v_min,v_max`; default `-1,1,-1,1`.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// `n_u,n_v` grid for `classify`.
    #[arg(long)]
    grid: Option<String>,
    /// Number of random points in `--region` for `scan`.
    #[arg(long)]
    points: Option<String>,
    /// Output file; `-` for standard output.
    #[arg(long)]
    out: Option<String>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    /// Seed for random sampling.
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<String>,
}

impl Flags {
    fn to_config(&self) -> Result<RunConfig, Failure> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_text(&text)?
            }
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let given = [
            ("surface", &self.surface),
            ("at", &self.at),
            ("theta", &self.theta),
            ("length", &self.length),
            ("r", &self.r),
            ("roller", &self.roller),
            ("path_u", &self.path_u),
            ("path_v", &self.path_v),
            ("t_end", &self.t_end),
            ("samples", &self.samples),
            ("dirs", &self.dirs),
            ("random_dirs", &self.random_dirs),
            ("arc", &self.arc),
            ("tol_iso", &self.tol_iso),
            ("r_range", &self.r_range),
            ("theta_range", &self.theta_range),
            ("resolution", &self.resolution),
            ("region", &self.region),
            ("grid", &self.grid),
            ("points", &self.points),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
            ("jobs", &self.jobs),
        ];
        for (key, value) in given {
            if let Some(value) = value {
                flags.set(key, value)?;
            }
        }
        if self.simulate {
            flags.simulate = Some(true);
        }
        config.merge(flags);
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Sub::Curvature(f) => (Command::Curvature, f),
        Sub::Roll(f) => (Command::Roll, f),
        Sub::Isotropy(f) => (Command::Isotropy, f),
        Sub::Classify(f) => (Command::Classify, f),
        Sub::Scan(f) => (Command::Scan, f),
    };
    match flags.to_config().and_then(|config| run(command, &config)) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
