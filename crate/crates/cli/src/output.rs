//! Documents and file formats: JSON envelopes, CSV tables and SVG overlays.
//!
//! Every emitter is a pure function of its inputs so repeated runs produce
//! byte-identical files.

use std::f64::consts::PI;
use std::fmt::Write as _;

use revsym_core::families::Params;
use revsym_core::harness::{CensusResult, DiskFixedPoint, Spectrum};
use revsym_core::symmlines::{Catalog, SymmetricOrbit, SymmetryLine};
use revsym_core::{InvariantDomain, MapFlags, MapSpec, Point};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How the map was specified, enough to rebuild it from a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDescription {
    pub name: String,
    pub family: Option<String>,
    pub params: Params,
    pub forward: Option<[String; 2]>,
    pub inverse: Option<[String; 2]>,
    pub involution: Option<[String; 2]>,
    pub flags: MapFlags,
}

impl MapDescription {
    pub fn new(config: &RunConfig, f: &MapSpec) -> Self {
        let m = &config.map;
        Self {
            name: f.name.clone(),
            family: m.family.clone(),
            params: m.params.clone(),
            forward: m.forward.clone(),
            inverse: m.inverse.clone(),
            involution: m.involution.clone(),
            flags: f.flags,
        }
    }
}

/// Common header of every JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub map: MapDescription,
    pub domain: InvariantDomain,
}

impl Header {
    pub fn new(config: &RunConfig, f: &MapSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command: config.command.name().to_string(),
            seed: config.numeric.seed,
            map: MapDescription::new(config, f),
            domain: f.domain,
        }
    }
}

/// A command result wrapped with the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document<T> {
    #[serde(flatten)]
    pub header: Header,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCatalogDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub map: MapDescription,
    pub domain: InvariantDomain,
    pub max_period: u32,
    pub degenerate: bool,
    pub orbits: Vec<SymmetricOrbit>,
    pub tangencies: Vec<Point>,
    /// Interior symmetric fixed point of a disk map, when one was sought.
    pub disk_fixed_point: Option<DiskFixedPoint>,
    pub warnings: Vec<String>,
}

impl OrbitCatalogDocument {
    pub fn new(header: Header, catalog: Catalog, disk_fixed_point: Option<DiskFixedPoint>) -> Self {
        Self {
            schema_version: header.schema_version,
            tool_version: header.tool_version,
            command: header.command,
            seed: header.seed,
            map: header.map,
            domain: header.domain,
            max_period: catalog.max_period,
            degenerate: catalog.degenerate,
            orbits: catalog.orbits,
            tangencies: catalog.tangencies,
            disk_fixed_point,
            warnings: catalog.warnings,
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let doc: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", doc.schema_version));
        }
        Ok(doc)
    }
}

/// Pretty JSON with a trailing newline. Floats use the shortest decimal
/// that reads back to the same double.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents are plain data");
    s.push('\n');
    s
}

/// Points of a symmetry line, one block per branch.
pub fn polyline_csv(line: &SymmetryLine) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# symmetry line m={} parity={}", line.m, format!("{:?}", line.parity).to_lowercase());
    let _ = writeln!(s, "# max_residual={:e} certified={}", line.max_residual, line.certified);
    let _ = writeln!(s, "# branches={}", line.branches.len());
    s.push_str("x,y\n");
    for (i, b) in line.branches.iter().enumerate() {
        let _ = writeln!(s, "# branch {i} component {}", b.component);
        for p in &b.points {
            let _ = writeln!(s, "{},{}", p.x, p.y);
        }
    }
    s
}

pub fn orbits_csv<'a>(orbits: impl IntoIterator<Item = &'a SymmetricOrbit>) -> String {
    let mut s = String::from("period,x,y,witness_k,witness_l,parity,residual,symmetric_residual,interior\n");
    for o in orbits {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:e},{:e},{}",
            o.period,
            o.seed.x,
            o.seed.y,
            o.witness.0,
            o.witness.1,
            format!("{:?}", o.parity).to_lowercase(),
            o.residual,
            o.symmetric_residual,
            o.interior
        );
    }
    s
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut s = String::from("p,q,component,roots,rotation_number,x,y,residual\n");
    for e in &spectrum.entries {
        let (x, y, r) = e
            .orbit
            .as_ref()
            .map_or((String::new(), String::new(), String::new()), |o| {
                (o.seed.x.to_string(), o.seed.y.to_string(), format!("{:e}", o.residual))
            });
        let rho = e.rotation_number.map_or(String::new(), |v| v.to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{rho},{x},{y},{r}",
            e.rational.p, e.rational.q, e.component, e.roots
        );
    }
    s
}

pub fn census_csv(census: &CensusResult) -> String {
    let mut s = String::from("max_period,count_all,count_odd,count_interior\n");
    for r in &census.rows {
        let _ = writeln!(s, "{},{},{},{}", r.max_period, r.count_all, r.count_odd, r.count_interior);
    }
    s
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 480.0;

struct Frame {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn new(domain: &InvariantDomain) -> Self {
        let w = domain.window();
        Self {
            x0: w.x_min,
            y0: w.y_max,
            sx: PLOT_W / w.width(),
            sy: PLOT_H / w.height(),
        }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (MARGIN + (p.x - self.x0) * self.sx, MARGIN + (self.y0 - p.y) * self.sy)
    }
}

/// Fixed-precision coordinate; `-0.00` is printed as `0.00`.
fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn path_data(line: &SymmetryLine, domain: &InvariantDomain, frame: &Frame) -> String {
    let mut d = String::new();
    for b in &line.branches {
        let mut prev: Option<Point> = None;
        for &p in &b.points {
            // break at seam crossings of periodic domains
            let jump = domain.is_periodic() && prev.is_some_and(|q| (p.x - q.x).abs() > PI);
            let (x, y) = frame.map(p);
            let cmd = if prev.is_none() || jump { 'M' } else { 'L' };
            if !d.is_empty() {
                d.push(' ');
            }
            let _ = write!(d, "{cmd}{},{}", c(x), c(y));
            prev = Some(p);
        }
    }
    d
}

/// Symmetry lines over the domain window, one marker per orbit seed.
///
/// The view box depends only on the domain; lines get one `<path>` each and
/// the legend lists their indices.
pub fn emit_svg(lines: &[SymmetryLine], orbits: &[SymmetricOrbit], domain: &InvariantDomain, title: &str) -> String {
    let frame = Frame::new(domain);
    let w = domain.window();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}"/></clipPath></defs>"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}"/>"#
    );
    let _ = writeln!(s, "</g>");
    let bottom = MARGIN + PLOT_H;
    let right = MARGIN + PLOT_W;
    let _ = writeln!(s, r#"<g class="ticks" fill="black">"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" text-anchor="start">{}</text>"#, c(bottom + 18.0), c(w.x_min));
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="end">{}</text>"#, c(bottom + 18.0), c(w.x_max));
    let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{}</text>"#, c(MARGIN - 6.0), c(w.y_min));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, c(MARGIN - 6.0), c(MARGIN + 12.0), c(w.y_max));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#, c(MARGIN + PLOT_W / 2.0), c(bottom + 36.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">y</text>"#, c(MARGIN - 36.0), c(MARGIN + PLOT_H / 2.0));
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="lines" clip-path="url(#plot)" fill="none" stroke-width="1.2">"#);
    for (i, line) in lines.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<path data-m="{}" stroke="{}" d="{}"/>"#,
            line.m,
            PALETTE[i % PALETTE.len()],
            path_data(line, domain, &frame)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="orbits" fill="black">"#);
    for o in orbits {
        let (x, y) = frame.map(o.seed);
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="3.5"/><text x="{}" y="{}">{}</text>"#,
            c(x),
            c(y),
            c(x + 5.0),
            c(y - 5.0),
            o.period
        );
    }
    let _ = writeln!(s, "</g>");

    let lx = MARGIN + PLOT_W + 30.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, line) in lines.iter().enumerate() {
        let y = MARGIN + 10.0 + 18.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">m = {}</text>"#,
            c(lx),
            c(y),
            c(lx + 24.0),
            c(y),
            c(lx + 30.0),
            c(y + 4.0),
            line.m
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use revsym_core::symmlines::{Branch, Parity, Provenance};

    fn line(m: u32, pts: Vec<Point>) -> SymmetryLine {
        SymmetryLine {
            m,
            parity: Parity::of(m),
            provenance: Provenance::BaseFixI,
            branches: vec![Branch {
                component: 0,
                params: vec![0.0; pts.len()],
                points: pts,
            }],
            max_residual: 0.0,
            certified: true,
        }
    }

    #[test]
    fn empty_svg_has_axes_only() {
        let s = emit_svg(&[], &[], &InvariantDomain::ClosedDisk, "empty");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<path").count(), 0);
        assert_eq!(s.matches("<circle").count(), 0);
        assert!(s.contains(r#"class="axes""#));
    }

    #[test]
    fn seam_crossings_start_new_subpaths() {
        let d = InvariantDomain::Cylinder { y_min: 0.0, y_max: 1.0 };
        let l = line(0, vec![Point::new(6.2, 0.1), Point::new(0.05, 0.2), Point::new(0.1, 0.3)]);
        let s = emit_svg(&[l], &[], &d, "seam");
        let d_attr = s.split(" d=\"").nth(1).unwrap();
        assert_eq!(d_attr.matches('M').count(), 2);
    }

    #[test]
    fn polyline_csv_layout() {
        let csv = polyline_csv(&line(3, vec![Point::new(0.0, 0.5), Point::new(0.25, 0.75)]));
        let rows: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, ["x,y", "0,0.5", "0.25,0.75"]);
    }

    #[test]
    fn coordinates_have_no_negative_zero() {
        assert_eq!(c(-1e-9), "0.00");
        assert_eq!(c(-0.5), "-0.50");
    }
}
