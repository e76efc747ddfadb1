//! Executes one configured command and writes its files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use revsym_core::harness::{
    dichotomy_census, disk_symmetric_fixed_point, farey_orbit_spectrum, twist_criterion,
    HarnessError, LiftedMap,
};
use revsym_core::revmaps::{validate_area, validate_inverse, validate_involution, validate_reversibility};
use revsym_core::symmlines::{find_with, LineSet, SymmetricOrbit, SymmetryLine};
use revsym_core::winding::{fixed_point_index, IndexValue};
use revsym_core::{InvariantDomain, MapSpec, Point, ValidationReport};
use serde::{Deserialize, Serialize};

use crate::config::{Command, Format, RunConfig};
use crate::output::{self, Document, Header, OrbitCatalogDocument};

/// Result of a run that did not hit an I/O error.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success,
    /// A check failed or a precondition of the command does not hold.
    Invalid(String),
    /// An object predicted to exist was not found.
    Falsified(Vec<String>),
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Invalid(_) => 2,
            Outcome::Falsified(_) => 3,
        }
    }
}

struct Emitter {
    dir: PathBuf,
    formats: Vec<Format>,
    verbose: bool,
}

impl Emitter {
    fn write(&self, format: Format, name: &str, contents: &str) -> anyhow::Result<()> {
        if !self.formats.contains(&format) {
            return Ok(());
        }
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        if self.verbose {
            eprintln!("[revsym] wrote {}", path.display());
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        self.write(Format::Json, name, &output::to_json(value))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateResult {
    pub reversibility: ValidationReport,
    pub inverse: ValidationReport,
    /// `f ∘ I` squared against the identity.
    pub involution: ValidationReport,
    pub area: ValidationReport,
    /// Area preservation is only required of maps flagged as such.
    pub area_claimed: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub point: Point,
    pub index: IndexValue,
    pub mirror_point: Point,
    pub mirror_index: IndexValue,
    /// `+1` when the indices should agree, `-1` when they should be opposite.
    pub expected_relation: i8,
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub radius: f64,
    pub samples: usize,
    pub entries: Vec<IndexEntry>,
    pub errors: Vec<String>,
}

/// Runs `config` and writes the requested formats into its output directory.
pub fn run(config: &RunConfig, verbose: bool) -> anyhow::Result<Outcome> {
    if let Err(e) = config.validate() {
        return Ok(Outcome::Invalid(format!("config: {e}")));
    }
    let f = match config.build_map() {
        Ok(f) => f,
        Err(e) => return Ok(Outcome::Invalid(format!("map: {e}"))),
    };
    let dir = &config.output.directory;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let out = Emitter {
        dir: dir.clone(),
        formats: config.output.formats.clone(),
        verbose,
    };
    if verbose {
        eprintln!("[revsym] {} on {} ({})", config.command.name(), f.name, f.domain.name());
    }
    let header = Header::new(config, &f);
    match config.command {
        Command::Validate => validate(config, &f, header, &out),
        Command::Symmlines => symmlines(config, f, header, &out),
        Command::Orbits => orbits(config, f, header, &out),
        Command::Twist => twist(config, &f, header, &out),
        Command::Spectrum => spectrum(config, f, header, &out),
        Command::Census => census(config, &f, header, &out),
        Command::Index => index(config, f, header, &out),
    }
}

fn invalid(e: impl std::fmt::Display) -> anyhow::Result<Outcome> {
    Ok(Outcome::Invalid(e.to_string()))
}

fn validate(config: &RunConfig, f: &MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let n = config.numeric.samples;
    let t = config.numeric.tolerances;
    let reversibility = validate_reversibility(f, n, t.reversibility);
    let inverse = validate_inverse(f, n, t.reversibility);
    let involution = validate_involution(&f.reversor(), n, t.reversibility);
    let area = validate_area(f, n, t.area);
    let area_claimed = f.flags.area_preserving;
    let pass = reversibility.pass && inverse.pass && involution.pass && (area.pass || !area_claimed);
    let result = ValidateResult {
        reversibility,
        inverse,
        involution,
        area,
        area_claimed,
        pass,
    };
    out.json("validate.json", &Document { header, result: result.clone() })?;
    if pass {
        Ok(Outcome::Success)
    } else {
        invalid(format!(
            "validation failed: reversibility {:e}, inverse {:e}, involution {:e}, area {:e}",
            result.reversibility.max_residual,
            result.inverse.max_residual,
            result.involution.max_residual,
            result.area.max_residual
        ))
    }
}

fn line_range(set: &LineSet, range: [u32; 2]) -> Result<Vec<SymmetryLine>, String> {
    (range[0]..=range[1]).map(|m| set.line(m).map_err(|e| e.to_string())).collect()
}

fn symmlines(config: &RunConfig, f: MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let domain = f.domain;
    let title = format!("symmetry lines of {}", f.name);
    let set = match LineSet::new(f, config.numeric.resolution) {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let lines = match line_range(&set, config.numeric.m) {
        Ok(l) => l,
        Err(e) => return invalid(e),
    };
    for l in &lines {
        out.write(Format::Csv, &format!("symmline_m{}.csv", l.m), &output::polyline_csv(l))?;
    }
    out.write(Format::Svg, "symmlines.svg", &output::emit_svg(&lines, &[], &domain, &title))?;
    out.json("symmlines.json", &Document { header, result: &lines })?;
    let uncertified: Vec<u32> = lines.iter().filter(|l| !l.certified).map(|l| l.m).collect();
    if uncertified.is_empty() {
        Ok(Outcome::Success)
    } else {
        invalid(format!("lines {uncertified:?} exceed the line tolerance"))
    }
}

fn is_disk(d: &InvariantDomain) -> bool {
    matches!(d, InvariantDomain::ClosedDisk | InvariantDomain::OpenDisk)
}

fn orbits(config: &RunConfig, f: MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let num = &config.numeric;
    let domain = f.domain;
    let title = format!("symmetric orbits of {}", f.name);
    let mut falsified = Vec::new();
    // a reversible area-preserving disk map has an interior symmetric fixed point
    let disk = if is_disk(&domain) && f.flags.area_preserving {
        match disk_symmetric_fixed_point(&f, &num.resolution) {
            Ok(p) => Some(p),
            Err(HarnessError::NotFound(why)) => {
                falsified.push(format!("no interior symmetric fixed point: {why}"));
                None
            }
            Err(e) => return invalid(e),
        }
    } else {
        None
    };
    let set = match LineSet::new(f, num.resolution) {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let catalog = match find_with(&set, num.n_max, num.tolerances.orbit) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let lines = match line_range(&set, num.m) {
        Ok(l) => l,
        Err(e) => return invalid(e),
    };
    out.write(Format::Csv, "orbits.csv", &output::orbits_csv(&catalog.orbits))?;
    out.write(Format::Svg, "orbits.svg", &output::emit_svg(&lines, &catalog.orbits, &domain, &title))?;
    let doc = OrbitCatalogDocument::new(header, catalog, disk);
    out.json("orbits.json", &doc)?;
    finish(falsified)
}

fn finish(falsified: Vec<String>) -> anyhow::Result<Outcome> {
    if falsified.is_empty() {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::Falsified(falsified))
    }
}

fn twist(config: &RunConfig, f: &MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let report = match twist_criterion(f, &config.numeric.resolution) {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    out.json("twist.json", &Document { header, result: &report })?;
    finish(report.falsification_candidates)
}

fn spectrum(config: &RunConfig, f: MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let domain = f.domain;
    let title = format!("rotation spectrum of {}", f.name);
    let lift = match LiftedMap::new(f.clone()) {
        Ok(l) => l,
        Err(e) => return invalid(e),
    };
    let spectrum = match farey_orbit_spectrum(&lift, config.numeric.q_max) {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    out.write(Format::Csv, "spectrum.csv", &output::spectrum_csv(&spectrum))?;
    if out.formats.contains(&Format::Svg) {
        let set = match LineSet::new(f, config.numeric.resolution) {
            Ok(s) => s,
            Err(e) => return invalid(e),
        };
        let lines = match line_range(&set, [0, 1]) {
            Ok(l) => l,
            Err(e) => return invalid(e),
        };
        let orbits: Vec<SymmetricOrbit> = spectrum.orbits().cloned().collect();
        out.write(Format::Svg, "spectrum.svg", &output::emit_svg(&lines, &orbits, &domain, &title))?;
    }
    out.json("spectrum.json", &Document { header, result: &spectrum })?;
    finish(spectrum.falsification_candidates)
}

fn census(config: &RunConfig, f: &MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let census = match dichotomy_census(f, config.numeric.n_max, &config.numeric.resolution) {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    out.write(Format::Csv, "census.csv", &output::census_csv(&census))?;
    out.json("census.json", &Document { header, result: &census })?;
    Ok(Outcome::Success)
}

fn index(config: &RunConfig, f: MapSpec, header: Header, out: &Emitter) -> anyhow::Result<Outcome> {
    let ic = &config.numeric.index;
    let d = f.domain;
    let points: Vec<Point> = if ic.points.is_empty() {
        let set = match LineSet::new(f.clone(), config.numeric.resolution) {
            Ok(s) => s,
            Err(e) => return invalid(e),
        };
        match find_with(&set, 1, config.numeric.tolerances.orbit) {
            Ok(c) => c.orbits.iter().map(|o| o.seed).collect(),
            Err(e) => return invalid(e),
        }
    } else {
        ic.points.iter().map(|&[x, y]| Point::new(x, y)).collect()
    };
    // the mirror identity flips sign for maps isotopic to the reflection
    let expected_relation: i8 = if f.flags.isotopic_to_identity { 1 } else { -1 };
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for p in points {
        let q = d.reflect_lift(p);
        let pair = fixed_point_index(&f, p, ic.radius, ic.samples)
            .and_then(|a| fixed_point_index(&f, q, ic.radius, ic.samples).map(|b| (a, b)));
        match pair {
            Ok((a, b)) => {
                let consistent = a
                    .rounded()
                    .zip(b.rounded())
                    .map(|(i, j)| i == i64::from(expected_relation) * j);
                entries.push(IndexEntry {
                    point: p,
                    index: a,
                    mirror_point: q,
                    mirror_index: b,
                    expected_relation,
                    consistent,
                });
            }
            Err(e) => errors.push(format!("{p}: {e}")),
        }
    }
    let falsified: Vec<String> = entries
        .iter()
        .filter(|e| e.consistent == Some(false))
        .map(|e| format!("index at {} differs from its mirror at {}", e.point, e.mirror_point))
        .collect();
    if out.formats.contains(&Format::Csv) {
        let mut csv = String::from("x,y,index,mirror_x,mirror_y,mirror_index,certified\n");
        for e in &entries {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.point.x,
                e.point.y,
                e.index.value,
                e.mirror_point.x,
                e.mirror_point.y,
                e.mirror_index.value,
                e.index.is_integer_certified && e.mirror_index.is_integer_certified
            ));
        }
        out.write(Format::Csv, "index.csv", &csv)?;
    }
    let result = IndexResult {
        radius: ic.radius,
        samples: ic.samples,
        entries,
        errors,
    };
    out.json("index.json", &Document { header, result })?;
    finish(falsified)
}

/// Reads and parses a config file; parse failures keep their position.
pub fn load(path: &Path) -> Result<RunConfig, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| LoadError::Read(path.to_path_buf(), e))?;
    crate::config::parse(&text, path).map_err(LoadError::Parse)
}

#[derive(Debug)]
pub enum LoadError {
    Read(PathBuf, std::io::Error),
    Parse(crate::config::ParseError),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Read(p, e) => write!(f, "{}: {e}", p.display()),
            LoadError::Parse(e) => e.fmt(f),
        }
    }
}
