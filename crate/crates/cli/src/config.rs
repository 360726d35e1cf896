//! Run configuration shared by all subcommands.
//!
//! The same keys are accepted on the command line (`--r-range 0.5,2`) and in
//! a config file (`r_range = 0.5,2`, one per line, `#` comments). Flags
//! override file values. Every field is optional; each command checks the
//! ones it needs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rollcmc::geometry::{parse_key_values, ParamRect, SurfaceSpec};
use rollcmc::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// What rolls along the contact curve in `roll`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Roller {
    Ball,
    Plane,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub surface: Option<SurfaceSpec>,
    pub at: Option<(f64, f64)>,
    pub theta: Option<f64>,
    pub length: Option<f64>,
    pub r: Option<f64>,
    pub roller: Option<Roller>,
    pub path_u: Option<String>,
    pub path_v: Option<String>,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    pub dirs: Option<Vec<f64>>,
    pub random_dirs: Option<usize>,
    pub simulate: Option<bool>,
    pub arc: Option<f64>,
    pub tol_iso: Option<f64>,
    pub r_range: Option<(f64, f64)>,
    pub theta_range: Option<(f64, f64)>,
    pub resolution: Option<(usize, usize)>,
    pub region: Option<ParamRect>,
    pub grid: Option<(usize, usize)>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

/// Keys in canonical order.
pub const KEYS: &[&str] = &[
    "surface",
    "at",
    "theta",
    "length",
    "r",
    "roller",
    "path_u",
    "path_v",
    "t_end",
    "samples",
    "dirs",
    "random_dirs",
    "simulate",
    "arc",
    "tol_iso",
    "r_range",
    "theta_range",
    "resolution",
    "region",
    "grid",
    "points",
    "out",
    "format",
    "seed",
    "jobs",
];

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("`{key}` expects {what}, got `{value}`"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(bad(key, value, "a finite number")),
    }
}

fn count(key: &str, value: &str) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| bad(key, value, "a non-negative integer"))
}

fn numbers(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|x| number(key, x)).collect()
}

fn pair(key: &str, value: &str) -> Result<(f64, f64)> {
    match numbers(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(bad(key, value, "two comma-separated numbers")),
    }
}

fn count_pair(key: &str, value: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = value.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((count(key, a)?, count(key, b)?)),
        _ => Err(bad(key, value, "two comma-separated integers")),
    }
}

/// Inline surface spec, or the path of a surface definition file.
pub fn parse_surface(value: &str) -> Result<SurfaceSpec> {
    match SurfaceSpec::parse_inline(value.trim()) {
        Ok(spec) => Ok(spec),
        Err(inline_err) => {
            let path = Path::new(value.trim());
            if path.is_file() {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                SurfaceSpec::parse_config(&text)
            } else {
                Err(inline_err)
            }
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "surface" => self.surface = Some(parse_surface(v)?),
            "at" => self.at = Some(pair(key, v)?),
            "theta" => self.theta = Some(number(key, v)?),
            "length" => self.length = Some(number(key, v)?),
            "r" => self.r = Some(number(key, v)?),
            "roller" => {
                self.roller = Some(match v {
                    "ball" => Roller::Ball,
                    "plane" => Roller::Plane,
                    _ => return Err(bad(key, v, "`ball` or `plane`")),
                })
            }
            "path_u" => self.path_u = Some(v.to_owned()),
            "path_v" => self.path_v = Some(v.to_owned()),
            "t_end" => self.t_end = Some(number(key, v)?),
            "samples" => self.samples = Some(count(key, v)?),
            "dirs" => self.dirs = Some(numbers(key, v)?),
            "random_dirs" => self.random_dirs = Some(count(key, v)?),
            "simulate" => {
                self.simulate = Some(match v {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad(key, v, "`true` or `false`")),
                })
            }
            "arc" => self.arc = Some(number(key, v)?),
            "tol_iso" => self.tol_iso = Some(number(key, v)?),
            "r_range" => self.r_range = Some(pair(key, v)?),
            "theta_range" => self.theta_range = Some(pair(key, v)?),
            "resolution" => self.resolution = Some(count_pair(key, v)?),
            "region" => match numbers(key, v)?.as_slice() {
                [a, b, c, d] if a < b && c < d => self.region = Some(ParamRect::new(*a, *b, *c, *d)),
                _ => return Err(bad(key, v, "u_min,u_max,v_min,v_max with min < max")),
            },
            "grid" => self.grid = Some(count_pair(key, v)?),
            "points" => self.points = Some(count(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => {
                self.format = Some(match v {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad(key, v, "`csv` or `json`")),
                })
            }
            "seed" => self.seed = Some(v.parse().map_err(|_| bad(key, v, "a non-negative integer"))?),
            "jobs" => self.jobs = Some(count(key, v)?),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` text.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (key, value) in parse_key_values(text)? {
            config.set(&key, &value)?;
        }
        Ok(config)
    }

    /// Textual value of one field, `None` when unset.
    pub fn get(&self, key: &str) -> Option<String> {
        let pair = |(a, b): (f64, f64)| format!("{a:?},{b:?}");
        let count_pair = |(a, b): (usize, usize)| format!("{a},{b}");
        match key {
            "surface" => self.surface.as_ref().map(ToString::to_string),
            "at" => self.at.map(pair),
            "theta" => self.theta.map(|x| format!("{x:?}")),
            "length" => self.length.map(|x| format!("{x:?}")),
            "r" => self.r.map(|x| format!("{x:?}")),
            "roller" => self.roller.map(|r| match r {
                Roller::Ball => "ball".to_owned(),
                Roller::Plane => "plane".to_owned(),
            }),
            "path_u" => self.path_u.clone(),
            "path_v" => self.path_v.clone(),
            "t_end" => self.t_end.map(|x| format!("{x:?}")),
            "samples" => self.samples.map(|n| n.to_string()),
            "dirs" => self.dirs.as_deref().map(join),
            "random_dirs" => self.random_dirs.map(|n| n.to_string()),
            "simulate" => self.simulate.map(|b| b.to_string()),
            "arc" => self.arc.map(|x| format!("{x:?}")),
            "tol_iso" => self.tol_iso.map(|x| format!("{x:?}")),
            "r_range" => self.r_range.map(pair),
            "theta_range" => self.theta_range.map(pair),
            "resolution" => self.resolution.map(count_pair),
            "region" => self.region.map(|d| join(&[d.u_min, d.u_max, d.v_min, d.v_max])),
            "grid" => self.grid.map(count_pair),
            "points" => self.points.map(|n| n.to_string()),
            "out" => self.out.as_ref().map(|p| p.display().to_string()),
            "format" => self.format.map(|f| match f {
                Format::Csv => "csv".to_owned(),
                Format::Json => "json".to_owned(),
            }),
            "seed" => self.seed.map(|n| n.to_string()),
            "jobs" => self.jobs.map(|n| n.to_string()),
            _ => None,
        }
    }

    /// Canonical text: set fields only, in [`KEYS`] order. Parses back to an
    /// equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            if let Some(value) = self.get(key) {
                let _ = writeln!(out, "{key} = {value}");
            }
        }
        out
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(&mut self, other: RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            surface, at, theta, length, r, roller, path_u, path_v, t_end, samples, dirs, random_dirs, simulate,
            arc, tol_iso, r_range, theta_range, resolution, region, grid, points, out, format, seed, jobs
        );
    }
}
