//! Run configuration: a single TOML file, parsed strictly.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use revsym_core::families::{self, Params};
use revsym_core::harness::CENSUS_CAP;
use revsym_core::revmaps::{build_from_involution, TOL_AREA, TOL_REVERSIBILITY};
use revsym_core::symmlines::{Resolution, ORBIT_TOL};
use revsym_core::{InvariantDomain, MapFlags, MapSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_N_MAX: u32 = 8;
pub const DEFAULT_Q_MAX: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Symmlines,
    Orbits,
    Twist,
    Spectrum,
    Census,
    Index,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Symmlines => "symmlines",
            Command::Orbits => "orbits",
            Command::Twist => "twist",
            Command::Spectrum => "spectrum",
            Command::Census => "census",
            Command::Index => "index",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub map: MapConfig,
    /// Overrides the family default; required for expression maps.
    #[serde(default)]
    pub domain: Option<InvariantDomain>,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub output: Output,
}

/// Either a builtin family with parameters, explicit forward expressions, or
/// an involution `J` from which `f = J ∘ I` is built.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub family: Option<String>,
    #[serde(default)]
    pub params: Params,
    pub forward: Option<[String; 2]>,
    pub inverse: Option<[String; 2]>,
    pub involution: Option<[String; 2]>,
    pub flags: Option<MapFlags>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numeric {
    pub n_max: u32,
    pub q_max: u32,
    /// Inclusive range of symmetry-line indices.
    pub m: [u32; 2],
    /// Recorded in every document; all algorithms are deterministic.
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub resolution: Resolution,
    pub index: IndexConfig,
}

impl Default for Numeric {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            q_max: DEFAULT_Q_MAX,
            m: [0, 4],
            seed: 0,
            samples: 10_000,
            tolerances: Tolerances::default(),
            resolution: Resolution::default(),
            index: IndexConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub reversibility: f64,
    pub area: f64,
    pub orbit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reversibility: TOL_REVERSIBILITY,
            area: TOL_AREA,
            orbit: ORBIT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexConfig {
    pub radius: f64,
    pub samples: usize,
    /// Centres of the index circles; empty means every symmetric fixed point.
    pub points: Vec<[f64; 2]>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            radius: 0.05,
            samples: 256,
            points: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Json, Format::Csv, Format::Svg],
        }
    }
}

/// A config file that did not parse, located by line and column.
#[derive(Debug)]
pub struct ParseError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path.display(), self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse(text: &str, path: &Path) -> Result<RunConfig, ParseError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ParseError {
            path: path.to_path_buf(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })
}

impl RunConfig {
    /// Semantic checks that the schema cannot express.
    pub fn validate(&self) -> Result<(), String> {
        let n = &self.numeric;
        let t = &n.tolerances;
        for (name, v) in [
            ("tolerances.reversibility", t.reversibility),
            ("tolerances.area", t.area),
            ("tolerances.orbit", t.orbit),
            ("resolution.line_tol", n.resolution.line_tol),
            ("index.radius", n.index.radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(e) = n.resolution.max_edge {
            if !(e.is_finite() && e > 0.0) {
                return Err(format!("resolution.max_edge must be positive, got {e}"));
            }
        }
        if n.n_max == 0 || n.n_max > CENSUS_CAP {
            return Err(format!("n_max must lie in 1..={CENSUS_CAP}, got {}", n.n_max));
        }
        if n.q_max == 0 {
            return Err("q_max must be at least 1".into());
        }
        if n.m[0] > n.m[1] {
            return Err(format!("empty line range {}..{}", n.m[0], n.m[1]));
        }
        if n.samples == 0 || n.index.samples < 8 {
            return Err("sample counts must be positive (index.samples at least 8)".into());
        }
        if n.resolution.base_samples < 2 {
            return Err("resolution.base_samples must be at least 2".into());
        }
        if self.output.formats.is_empty() {
            return Err("output.formats is empty".into());
        }
        if let Some(d) = &self.domain {
            d.validate().map_err(|e| e.to_string())?;
        }
        let m = &self.map;
        let kinds = [m.family.is_some(), m.forward.is_some(), m.involution.is_some()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err("map needs exactly one of `family`, `forward`, `involution`".into());
        }
        if m.family.is_none() && !m.params.is_empty() {
            return Err("map.params only applies to a family".into());
        }
        if m.forward.is_none() && m.inverse.is_some() {
            return Err("map.inverse only applies to `forward`".into());
        }
        if m.forward.is_some() && (m.flags.is_none() || self.domain.is_none()) {
            return Err("expression maps need `flags` and a `domain`".into());
        }
        if m.involution.is_some() && self.domain.is_none() {
            return Err("an involution needs a `domain`".into());
        }
        if m.family.is_some() && m.flags.is_some() {
            return Err("family maps carry their own flags".into());
        }
        Ok(())
    }

    pub fn build_map(&self) -> Result<MapSpec, String> {
        let m = &self.map;
        let f = if let Some(family) = &m.family {
            families::builtin(family, &m.params, self.domain)
        } else if let Some([f1, f2]) = &m.forward {
            let inv = m.inverse.as_ref().map(|[g1, g2]| [g1.as_str(), g2.as_str()]);
            families::from_expressions(
                [f1, f2],
                inv,
                self.domain.expect("checked in validate"),
                m.flags.expect("checked in validate"),
            )
        } else {
            let [j1, j2] = m.involution.as_ref().expect("checked in validate");
            families::involution_from_expressions([j1, j2], self.domain.expect("checked in validate"))
                .and_then(|j| build_from_involution(&j))
        };
        f.map_err(|e| e.to_string())
    }
}
