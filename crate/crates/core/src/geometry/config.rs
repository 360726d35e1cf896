//! Textual surface definitions.
//!
//! Two equivalent forms are accepted:
//!
//! - inline: `sphere:R=1`, `cylinder:R=2,inward`, `ellipsoid:a=1.5,b=1,c=0.75`
//! - key-value file: one `key = value` per line, `#` starts a comment,
//!   `kind = <name>` selects the surface.
//!
//! Orientation is given by the bare words `inward` / `outward` (inline) or
//! `orientation = inward|outward` (file). Closed surfaces and surfaces of
//! revolution default to `inward`; plane, catenoid and graphs to the chart
//! orientation (`outward`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{library, ParamRect, SurfaceChart};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    Plane,
    Sphere { radius: f64, inward: bool },
    Cylinder { radius: f64, inward: bool },
    Ellipsoid { a: f64, b: f64, c: f64, inward: bool },
    Torus { major: f64, minor: f64, inward: bool },
    Catenoid { c: f64, inward: bool },
    Unduloid { mean_curvature: f64, neck: f64, inward: bool },
    Graph { expression: String, domain: ParamRect, inward: bool },
}

type Fields = BTreeMap<String, String>;

fn take_f64(fields: &mut Fields, key: &str, default: Option<f64>) -> Result<f64> {
    match fields.remove(key) {
        Some(text) => text
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("`{key}` must be a number, got `{text}`"))),
        None => default.ok_or_else(|| Error::Config(format!("missing parameter `{key}`"))),
    }
}

fn take_orientation(fields: &mut Fields, default_inward: bool) -> Result<bool> {
    let inward = fields.remove("inward").is_some();
    let outward = fields.remove("outward").is_some();
    let keyed = fields.remove("orientation");
    match (inward, outward, keyed.as_deref().map(str::trim)) {
        (true, true, _) => Err(Error::Config("both `inward` and `outward` given".into())),
        (true, false, None) | (false, false, Some("inward")) => Ok(true),
        (false, true, None) | (false, false, Some("outward")) => Ok(false),
        (false, false, None) => Ok(default_inward),
        (_, _, Some(other)) => Err(Error::Config(format!("bad orientation `{other}`"))),
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Config(format!("`{name}` must be positive, got {value}")))
    }
}

impl SurfaceSpec {
    fn from_fields(kind: &str, mut fields: Fields) -> Result<Self> {
        let f = &mut fields;
        let spec = match kind.trim() {
            "plane" => {
                take_orientation(f, false)?;
                Self::Plane
            }
            "sphere" => Self::Sphere {
                radius: positive("R", take_f64(f, "R", None)?)?,
                inward: take_orientation(f, true)?,
            },
            "cylinder" => Self::Cylinder {
                radius: positive("R", take_f64(f, "R", None)?)?,
                inward: take_orientation(f, true)?,
            },
            "ellipsoid" => Self::Ellipsoid {
                a: positive("a", take_f64(f, "a", None)?)?,
                b: positive("b", take_f64(f, "b", None)?)?,
                c: positive("c", take_f64(f, "c", None)?)?,
                inward: take_orientation(f, true)?,
            },
            "torus" => {
                let major = positive("R", take_f64(f, "R", None)?)?;
                let minor = positive("r", take_f64(f, "r", None)?)?;
                if minor >= major {
                    return Err(Error::Config("torus needs r < R".into()));
                }
                Self::Torus { major, minor, inward: take_orientation(f, true)? }
            }
            "catenoid" => Self::Catenoid {
                c: positive("c", take_f64(f, "c", Some(1.0))?)?,
                inward: take_orientation(f, false)?,
            },
            "unduloid" => Self::Unduloid {
                mean_curvature: positive("H", take_f64(f, "H", None)?)?,
                neck: positive("neck", take_f64(f, "neck", None)?)?,
                inward: take_orientation(f, true)?,
            },
            "graph" => {
                let expression = f
                    .remove("z")
                    .ok_or_else(|| Error::Config("graph needs `z = <expression>`".into()))?
                    .trim()
                    .to_owned();
                let domain = ParamRect::new(
                    take_f64(f, "x_min", Some(-10.0))?,
                    take_f64(f, "x_max", Some(10.0))?,
                    take_f64(f, "y_min", Some(-10.0))?,
                    take_f64(f, "y_max", Some(10.0))?,
                );
                Self::Graph { expression, domain, inward: take_orientation(f, false)? }
            }
            other => return Err(Error::Config(format!("unknown surface kind `{other}`"))),
        };
        if let Some(key) = fields.keys().next() {
            return Err(Error::Config(format!("unexpected parameter `{key}` for {kind}")));
        }
        Ok(spec)
    }

    /// Parses the inline form `kind:key=value,flag,...`.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut fields = Fields::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').unwrap_or((item, ""));
            if fields.insert(key.trim().to_owned(), value.trim().to_owned()).is_some() {
                return Err(Error::Config(format!("duplicate parameter `{}`", key.trim())));
            }
        }
        Self::from_fields(kind, fields)
    }

    /// Parses the key-value file form. Keys other than surface parameters
    /// are rejected; use [`parse_key_values`] to split a mixed file first.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut fields = parse_key_values(text)?;
        let kind = fields
            .remove("kind")
            .ok_or_else(|| Error::Config("missing `kind = ...`".into()))?;
        Self::from_fields(&kind, fields)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Plane => "plane",
            Self::Sphere { .. } => "sphere",
            Self::Cylinder { .. } => "cylinder",
            Self::Ellipsoid { .. } => "ellipsoid",
            Self::Torus { .. } => "torus",
            Self::Catenoid { .. } => "catenoid",
            Self::Unduloid { .. } => "unduloid",
            Self::Graph { .. } => "graph",
        }
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let orient = |inward: bool| ("orientation", if inward { "inward" } else { "outward" }.to_owned());
        let num = |x: f64| format!("{x:?}");
        match self {
            Self::Plane => vec![],
            Self::Sphere { radius, inward } | Self::Cylinder { radius, inward } => {
                vec![("R", num(*radius)), orient(*inward)]
            }
            Self::Ellipsoid { a, b, c, inward } => {
                vec![("a", num(*a)), ("b", num(*b)), ("c", num(*c)), orient(*inward)]
            }
            Self::Torus { major, minor, inward } => {
                vec![("R", num(*major)), ("r", num(*minor)), orient(*inward)]
            }
            Self::Catenoid { c, inward } => vec![("c", num(*c)), orient(*inward)],
            Self::Unduloid { mean_curvature, neck, inward } => {
                vec![("H", num(*mean_curvature)), ("neck", num(*neck)), orient(*inward)]
            }
            Self::Graph { expression, domain, inward } => vec![
                ("z", expression.clone()),
                ("x_min", num(domain.u_min)),
                ("x_max", num(domain.u_max)),
                ("y_min", num(domain.v_min)),
                ("y_max", num(domain.v_max)),
                orient(*inward),
            ],
        }
    }

    /// Canonical key-value text; parses back to an equal spec.
    pub fn to_config_text(&self) -> String {
        let mut out = format!("kind = {}\n", self.kind());
        for (k, v) in self.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn build(&self) -> Result<SurfaceChart> {
        Ok(match self {
            Self::Plane => library::plane(),
            Self::Sphere { radius, inward } => library::sphere(*radius, *inward),
            Self::Cylinder { radius, inward } => library::cylinder(*radius, *inward),
            Self::Ellipsoid { a, b, c, inward } => library::ellipsoid(*a, *b, *c, *inward),
            Self::Torus { major, minor, inward } => library::torus(*major, *minor, *inward),
            Self::Catenoid { c, inward } => {
                let chart = library::catenoid(*c);
                if *inward {
                    chart.flipped()
                } else {
                    chart
                }
            }
            Self::Unduloid { mean_curvature, neck, inward } => {
                library::unduloid(*mean_curvature, *neck, *inward)?
            }
            Self::Graph { expression, domain, inward } => {
                let chart = library::graph(expression, *domain)?;
                if *inward {
                    chart.flipped()
                } else {
                    chart
                }
            }
        })
    }
}

/// Inline canonical form, e.g. `cylinder:R=2.0,orientation=inward`.
impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.entries().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        if body.is_empty() {
            write!(f, "{}", self.kind())
        } else {
            write!(f, "{}:{}", self.kind(), body.join(","))
        }
    }
}

impl FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_inline(s)
    }
}

/// Parses `key = value` lines with `#` comments into an ordered map.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut fields = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_owned();
        if fields.insert(key.clone(), value.trim().to_owned()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_forms() {
        assert_eq!(
            SurfaceSpec::parse_inline("sphere:R=1").unwrap(),
            SurfaceSpec::Sphere { radius: 1.0, inward: true }
        );
        assert_eq!(
            SurfaceSpec::parse_inline("cylinder:R=2,inward").unwrap(),
            SurfaceSpec::Cylinder { radius: 2.0, inward: true }
        );
        assert_eq!(
            SurfaceSpec::parse_inline("cylinder:R=2,outward").unwrap(),
            SurfaceSpec::Cylinder { radius: 2.0, inward: false }
        );
        assert_eq!(SurfaceSpec::parse_inline("plane").unwrap(), SurfaceSpec::Plane);
        assert!(SurfaceSpec::parse_inline("sphere").is_err());
        assert!(SurfaceSpec::parse_inline("sphere:R=-1").is_err());
        assert!(SurfaceSpec::parse_inline("sphere:R=1,q=3").is_err());
        assert!(SurfaceSpec::parse_inline("blob:R=1").is_err());
    }

    #[test]
    fn config_file_form() {
        let text = "# an ellipsoid\nkind = ellipsoid\na = 1.5\nb = 1.0  # semi-axis\nc = 0.75\n";
        let spec = SurfaceSpec::parse_config(text).unwrap();
        assert_eq!(spec, SurfaceSpec::Ellipsoid { a: 1.5, b: 1.0, c: 0.75, inward: true });
        assert_eq!(SurfaceSpec::parse_config(&spec.to_config_text()).unwrap(), spec);
        assert_eq!(SurfaceSpec::parse_inline(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn graph_config() {
        let spec = SurfaceSpec::parse_config("kind = graph\nz = sin(x) * cos(y) + x^2 / 4\n").unwrap();
        let chart = spec.build().unwrap();
        let p = chart.point(1.0, 0.0).unwrap();
        assert!((p.z - (1f64.sin() + 0.25)).abs() < 1e-14);
        assert_eq!(SurfaceSpec::parse_config(&spec.to_config_text()).unwrap(), spec);
    }

    #[test]
    fn key_value_errors() {
        assert!(parse_key_values("a = 1\na = 2").is_err());
        assert!(parse_key_values("just words").is_err());
    }
}
