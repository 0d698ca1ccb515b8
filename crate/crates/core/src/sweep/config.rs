//! Sweep configuration: a TOML file with the schema below. Every key is
//! optional; SI units throughout except where the key name says otherwise.
//!
//! ```toml
//! [geometry]
//! ring_radius = 10e-6
//! height = 220e-9
//! rail_width = 240e-9
//! slot_width = 50e-9        # single width; excludes [sweep] widths
//! rail = "silicon"
//! substrate = "silica"
//! cladding = "vacuum"
//! fill = "helium"
//!
//! [sweep]
//! widths = [20e-9, 50e-9]   # or width_range
//! width_range = { start = 5e-9, stop = 150e-9, points = 21, spacing = "log" }
//! boundaries = ["sealed", "open"]
//!
//! [optics]
//! wavelength = 1550e-9
//! kappa_hz = 1e9            # kappa / 2 pi
//! n_eff_guess = 3.0
//! modes = 2
//!
//! [acoustics]
//! q = [1e4, 1e5, 1e8]
//! refine = 2
//!
//! [bath]
//! temperature = 0.02
//!
//! [mesh]
//! background = 40e-9
//! core = 10e-9
//! slot_cells = 10
//! grading = 1.2
//! padding_wavelengths = 1.5
//! max_cells = 250000
//! conformal = false
//!
//! [capillary]               # optional advisory column
//! film_thickness = 2e-9
//! surface_tension = 3.78e-4
//! vdw_coefficient = 3.77e-22
//!
//! [output]
//! csv = "sweep.csv"
//! svg = "sweep.svg"
//! ```
//!
//! `HESLOT_OUT_CSV`, `HESLOT_OUT_SVG` and `HESLOT_WORKERS` override the
//! output paths and worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::capillary::{CapillaryModel, HELIUM_SURFACE_TENSION, HELIUM_VDW_COEFFICIENT};
use crate::error::{ConfigIssue, Error, Result};
use crate::materials::{hz_to_rad, MaterialTable};
use crate::mesh::{BoundaryTag, MeshSpec, SlotRingGeometry};

use super::pipeline::PointSettings;

pub const MIN_WIDTH: f64 = 1e-9;
pub const MAX_WIDTH: f64 = 500e-9;

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "geometry",
        &[
            "ring_radius",
            "height",
            "rail_width",
            "slot_width",
            "rail",
            "substrate",
            "cladding",
            "fill",
        ],
    ),
    ("sweep", &["widths", "width_range", "boundaries"]),
    ("optics", &["wavelength", "kappa_hz", "n_eff_guess", "modes"]),
    ("acoustics", &["q", "refine"]),
    ("bath", &["temperature"]),
    (
        "mesh",
        &[
            "background",
            "core",
            "slot_cells",
            "grading",
            "padding_wavelengths",
            "max_cells",
            "conformal",
        ],
    ),
    ("capillary", &["film_thickness", "surface_tension", "vdw_coefficient"]),
    ("output", &["csv", "svg"]),
];

const RANGE_KEYS: &[&str] = &["start", "stop", "points", "spacing"];

#[derive(Debug, Clone, PartialEq)]
pub struct CapillarySettings {
    pub film_thickness: f64,
    pub surface_tension: f64,
    pub vdw_coefficient: f64,
}

impl CapillarySettings {
    pub fn model(&self, geometry: &SlotRingGeometry) -> CapillaryModel {
        CapillaryModel {
            vdw_coefficient: self.vdw_coefficient,
            surface_tension: self.surface_tension,
            slot_width: geometry.slot_width,
            slot_height: geometry.height,
            film_thickness: self.film_thickness,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Base geometry; the slot width is replaced by each sweep width.
    pub geometry: SlotRingGeometry,
    /// Ascending, without duplicates.
    pub widths: Vec<f64>,
    pub boundaries: Vec<BoundaryTag>,
    /// Optical linewidth `kappa / 2 pi`, Hz.
    pub kappa_hz: f64,
    pub q_values: Vec<f64>,
    pub temperature: f64,
    pub point: PointSettings,
    pub capillary: Option<CapillarySettings>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// `points` log-spaced values from `start` to `stop` inclusive.
pub fn log_space(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            (0..points)
                .map(|i| match i {
                    0 => start,
                    i if i == points - 1 => stop,
                    i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

pub fn linear_space(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            geometry: SlotRingGeometry::default(),
            widths: log_space(5e-9, 150e-9, 21),
            boundaries: BoundaryTag::ALL.to_vec(),
            kappa_hz: 1e9,
            q_values: vec![1e4, 1e5, 1e8],
            temperature: 0.02,
            point: PointSettings::default(),
            capillary: None,
            out_csv: None,
            out_svg: None,
            workers: None,
        }
    }
}

/// Collects issues while walking the raw table.
struct Reader {
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn unknown_keys(&mut self, table: &Table, prefix: &str, known: &[&str]) {
        for key in table.keys() {
            if known.contains(&key.as_str()) {
                continue;
            }
            let path = join(prefix, key);
            let message = match suggest(key, prefix, known) {
                Some(s) => format!("unknown key; did you mean `{s}`?"),
                None => "unknown key".to_string(),
            };
            self.issue(path, message);
        }
    }

    fn float(&mut self, table: &Table, section: &str, key: &str) -> Option<f64> {
        let path = join(section, key);
        match table.get(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.issue(path, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn positive(&mut self, table: &Table, section: &str, key: &str) -> Option<f64> {
        let v = self.float(table, section, key)?;
        if v.is_finite() && v > 0.0 {
            Some(v)
        } else {
            self.issue(join(section, key), format!("must be positive, got {v}"));
            None
        }
    }

    fn count(&mut self, table: &Table, section: &str, key: &str, min: i64) -> Option<usize> {
        match table.get(key)? {
            Value::Integer(i) if *i >= min => Some(*i as usize),
            Value::Integer(i) => {
                self.issue(join(section, key), format!("must be at least {min}, got {i}"));
                None
            }
            other => {
                self.issue(
                    join(section, key),
                    format!("expected an integer, found {}", other.type_str()),
                );
                None
            }
        }
    }

    fn string<'t>(&mut self, table: &'t Table, section: &str, key: &str) -> Option<&'t str> {
        match table.get(key)? {
            Value::String(s) => Some(s),
            other => {
                self.issue(
                    join(section, key),
                    format!("expected a string, found {}", other.type_str()),
                );
                None
            }
        }
    }

    fn boolean(&mut self, table: &Table, section: &str, key: &str) -> Option<bool> {
        match table.get(key)? {
            Value::Boolean(b) => Some(*b),
            other => {
                self.issue(
                    join(section, key),
                    format!("expected true or false, found {}", other.type_str()),
                );
                None
            }
        }
    }

    fn section<'t>(&mut self, root: &'t Table, prefix: &str, name: &str) -> Option<&'t Table> {
        match root.get(name)? {
            Value::Table(t) => Some(t),
            other => {
                self.issue(
                    join(prefix, name),
                    format!("expected a table, found {}", other.type_str()),
                );
                None
            }
        }
    }

    fn float_list(&mut self, table: &Table, section: &str, key: &str) -> Option<Vec<f64>> {
        let path = join(section, key);
        let Value::Array(items) = table.get(key)? else {
            self.issue(path, "expected an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, v) in items.iter().enumerate() {
            match v {
                Value::Float(f) => out.push(*f),
                Value::Integer(n) => out.push(*n as f64),
                other => {
                    self.issue(
                        format!("{path}[{i}]"),
                        format!("expected a number, found {}", other.type_str()),
                    );
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Nearest known key by edit distance; at the top level leaf keys of every
/// section are candidates too.
fn suggest(key: &str, prefix: &str, known: &[&str]) -> Option<String> {
    let mut candidates: Vec<String> = known.iter().map(|k| k.to_string()).collect();
    if prefix.is_empty() {
        for (section, keys) in SCHEMA {
            candidates.extend(keys.iter().map(|k| format!("{section}.{k}")));
        }
    }
    candidates
        .into_iter()
        .map(|c| {
            let leaf = c.rsplit('.').next().unwrap_or(&c).to_string();
            (strsim::damerau_levenshtein(key, &leaf), c)
        })
        .filter(|(d, c)| *d <= 3.max(c.len() / 3))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .map(|(_, c)| c)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates `text`, reporting every problem found.
pub fn validate_config(text: &str) -> Result<SweepConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map_or(1, |s| line_of(text, s.start));
        Error::Config(vec![ConfigIssue {
            path: format!("line {line}"),
            message: e.message().trim().to_string(),
        }])
    })?;

    let mut r = Reader { issues: Vec::new() };
    let mut cfg = SweepConfig::default();
    let sections: Vec<&str> = SCHEMA.iter().map(|(s, _)| *s).collect();
    r.unknown_keys(&root, "", &sections);

    let materials = MaterialTable::builtin();
    let mut single_width = None;
    if let Some(t) = r.section(&root, "", "geometry") {
        r.unknown_keys(t, "geometry", SCHEMA[0].1);
        let g = &mut cfg.geometry;
        if let Some(v) = r.positive(t, "geometry", "ring_radius") {
            g.ring_radius = v;
        }
        if let Some(v) = r.positive(t, "geometry", "height") {
            g.height = v;
        }
        if let Some(v) = r.positive(t, "geometry", "rail_width") {
            g.rail_width = v;
        }
        single_width = r.positive(t, "geometry", "slot_width");
        for key in ["rail", "substrate", "cladding", "fill"] {
            let Some(name) = r.string(t, "geometry", key) else {
                continue;
            };
            match materials.get(name) {
                Ok(m) => {
                    let slot = match key {
                        "rail" => &mut g.rail,
                        "substrate" => &mut g.substrate,
                        "cladding" => &mut g.cladding,
                        _ => &mut g.fill,
                    };
                    *slot = m.clone();
                }
                Err(e) => r.issue(join("geometry", key), e.to_string()),
            }
        }
        if cfg.geometry.fill.acoustics.is_none() {
            r.issue(
                "geometry.fill",
                format!("`{}` does not carry sound", cfg.geometry.fill.name),
            );
        }
    }

    let mut widths: Option<Vec<f64>> = single_width.map(|w| vec![w]);
    if let Some(t) = r.section(&root, "", "sweep") {
        r.unknown_keys(t, "sweep", SCHEMA[1].1);
        if t.contains_key("widths") && t.contains_key("width_range") {
            r.issue("sweep.widths", "give either `widths` or `width_range`, not both");
        }
        if let Some(list) = r.float_list(t, "sweep", "widths") {
            widths = Some(list);
        }
        if let Some(range) = r.section(t, "sweep", "width_range") {
            let prefix = "sweep.width_range";
            r.unknown_keys(range, prefix, RANGE_KEYS);
            let start = r.positive(range, prefix, "start");
            let stop = r.positive(range, prefix, "stop");
            let points = r.count(range, prefix, "points", 1).unwrap_or(21);
            let spacing = r.string(range, prefix, "spacing").unwrap_or("log");
            let (start, stop) = (start.unwrap_or(5e-9), stop.unwrap_or(150e-9));
            match spacing {
                "log" => widths = Some(log_space(start, stop, points)),
                "linear" => widths = Some(linear_space(start, stop, points)),
                other => r.issue(
                    join(prefix, "spacing"),
                    format!("unknown spacing `{other}` (expected `log` or `linear`)"),
                ),
            }
        }
        if single_width.is_some() && (t.contains_key("widths") || t.contains_key("width_range")) {
            r.issue("geometry.slot_width", "conflicts with the [sweep] width list");
        }
        if let Some(v) = t.get("boundaries") {
            match v {
                Value::Array(items) => {
                    let mut tags = Vec::new();
                    for (i, item) in items.iter().enumerate() {
                        match item.as_str().map(str::parse::<BoundaryTag>) {
                            Some(Ok(tag)) if !tags.contains(&tag) => tags.push(tag),
                            Some(Ok(tag)) => r.issue(format!("sweep.boundaries[{i}]"), format!("duplicate `{tag}`")),
                            _ => r.issue(format!("sweep.boundaries[{i}]"), "expected `sealed` or `open`"),
                        }
                    }
                    if tags.is_empty() {
                        r.issue("sweep.boundaries", "at least one boundary tag is required");
                    }
                    tags.sort();
                    cfg.boundaries = tags;
                }
                _ => r.issue("sweep.boundaries", "expected an array of strings"),
            }
        }
    }
    if let Some(list) = widths {
        let mut ok = !list.is_empty();
        if list.is_empty() {
            r.issue("sweep.widths", "at least one width is required");
        }
        for (i, w) in list.iter().enumerate() {
            if !(MIN_WIDTH..=MAX_WIDTH).contains(w) {
                r.issue(
                    format!("sweep.widths[{i}]"),
                    format!("width {w:e} m outside [{MIN_WIDTH:e}, {MAX_WIDTH:e}] m"),
                );
                ok = false;
            }
        }
        if ok {
            let mut list = list;
            list.sort_by(f64::total_cmp);
            list.dedup();
            cfg.widths = list;
        }
    }

    if let Some(t) = r.section(&root, "", "optics") {
        r.unknown_keys(t, "optics", SCHEMA[2].1);
        if let Some(v) = r.positive(t, "optics", "wavelength") {
            cfg.point.wavelength = v;
        }
        if let Some(v) = r.positive(t, "optics", "kappa_hz") {
            cfg.kappa_hz = v;
        }
        if let Some(v) = r.float(t, "optics", "n_eff_guess") {
            if v > 1.0 && v < 3.48 {
                cfg.point.n_eff_guess = v;
            } else {
                r.issue("optics.n_eff_guess", format!("must lie in (1, 3.48), got {v}"));
            }
        }
        if let Some(n) = r.count(t, "optics", "modes", 1) {
            if n <= 10 {
                cfg.point.mode_count = n;
            } else {
                r.issue("optics.modes", format!("at most 10 modes, got {n}"));
            }
        }
    }

    if let Some(t) = r.section(&root, "", "acoustics") {
        r.unknown_keys(t, "acoustics", SCHEMA[3].1);
        if let Some(list) = r.float_list(t, "acoustics", "q") {
            let bad: Vec<usize> = (0..list.len())
                .filter(|&i| !(list[i].is_finite() && list[i] > 0.0))
                .collect();
            for i in &bad {
                r.issue(
                    format!("acoustics.q[{i}]"),
                    format!("must be positive, got {}", list[*i]),
                );
            }
            if list.is_empty() {
                r.issue("acoustics.q", "at least one quality factor is required");
            } else if bad.is_empty() {
                cfg.q_values = list;
            }
        }
        if let Some(n) = r.count(t, "acoustics", "refine", 1) {
            cfg.point.acoustic_refine = n;
        }
    }

    if let Some(t) = r.section(&root, "", "bath") {
        r.unknown_keys(t, "bath", SCHEMA[4].1);
        if let Some(v) = r.float(t, "bath", "temperature") {
            if v >= 0.0 && v.is_finite() {
                cfg.temperature = v;
            } else {
                r.issue("bath.temperature", format!("must be non-negative, got {v}"));
            }
        }
    }

    if let Some(t) = r.section(&root, "", "mesh") {
        r.unknown_keys(t, "mesh", SCHEMA[5].1);
        let m = &mut cfg.point.mesh;
        if let Some(v) = r.positive(t, "mesh", "background") {
            m.background = v;
        }
        if let Some(v) = r.positive(t, "mesh", "core") {
            m.core = v;
        }
        if let Some(n) = r.count(t, "mesh", "slot_cells", 2) {
            m.slot_cells = n;
        }
        if let Some(v) = r.float(t, "mesh", "grading") {
            if v > 1.0 {
                m.grading = v;
            } else {
                r.issue("mesh.grading", format!("must exceed 1, got {v}"));
            }
        }
        if let Some(v) = r.float(t, "mesh", "padding_wavelengths") {
            if v >= 1.5 {
                m.padding_wavelengths = v;
            } else {
                r.issue("mesh.padding_wavelengths", format!("must be at least 1.5, got {v}"));
            }
        }
        if let Some(n) = r.count(t, "mesh", "max_cells", 1) {
            m.max_cells = n;
        }
        if let Some(b) = r.boolean(t, "mesh", "conformal") {
            m.conformal = b;
        }
    }
    cfg.point.mesh.wavelength = cfg.point.wavelength;

    if let Some(t) = r.section(&root, "", "capillary") {
        r.unknown_keys(t, "capillary", SCHEMA[6].1);
        let film = r.positive(t, "capillary", "film_thickness");
        if film.is_none() && !t.contains_key("film_thickness") {
            r.issue("capillary.film_thickness", "required when [capillary] is present");
        }
        let sigma = r.float(t, "capillary", "surface_tension");
        let alpha = r.float(t, "capillary", "vdw_coefficient");
        for (key, v) in [("surface_tension", sigma), ("vdw_coefficient", alpha)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    r.issue(join("capillary", key), format!("must be non-negative, got {v}"));
                }
            }
        }
        if let Some(d) = film {
            cfg.capillary = Some(CapillarySettings {
                film_thickness: d,
                surface_tension: sigma.unwrap_or(HELIUM_SURFACE_TENSION),
                vdw_coefficient: alpha.unwrap_or(HELIUM_VDW_COEFFICIENT),
            });
        }
    }

    if let Some(t) = r.section(&root, "", "output") {
        r.unknown_keys(t, "output", SCHEMA[7].1);
        cfg.out_csv = r.string(t, "output", "csv").map(PathBuf::from);
        cfg.out_svg = r.string(t, "output", "svg").map(PathBuf::from);
    }

    for w in &cfg.widths {
        if let Err(e) = cfg.geometry.with_slot_width(*w).validate() {
            r.issue("geometry", e.to_string());
            break;
        }
    }

    if r.issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(r.issues))
    }
}

pub fn load_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    validate_config(&text)
}

impl SweepConfig {
    /// Optical linewidth, rad/s.
    pub fn kappa(&self) -> f64 {
        hz_to_rad(self.kappa_hz)
    }

    /// Applies `HESLOT_OUT_CSV`, `HESLOT_OUT_SVG` and `HESLOT_WORKERS`
    /// looked up through `var`.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(p) = var("HESLOT_OUT_CSV") {
            self.out_csv = Some(PathBuf::from(p));
        }
        if let Some(p) = var("HESLOT_OUT_SVG") {
            self.out_svg = Some(PathBuf::from(p));
        }
        if let Some(n) = var("HESLOT_WORKERS") {
            match n.trim().parse::<usize>() {
                Ok(n) if n > 0 => self.workers = Some(n),
                _ => {
                    return Err(Error::Config(vec![ConfigIssue {
                        path: "HESLOT_WORKERS".into(),
                        message: format!("expected a positive integer, got `{n}`"),
                    }]))
                }
            }
        }
        Ok(())
    }

    /// The effective configuration in the input format.
    pub fn echo(&self) -> String {
        let g = &self.geometry;
        let m = &self.point.mesh;
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "[geometry]");
        let _ = writeln!(s, "ring_radius = {:e}", g.ring_radius);
        let _ = writeln!(s, "height = {:e}", g.height);
        let _ = writeln!(s, "rail_width = {:e}", g.rail_width);
        for (k, mat) in [
            ("rail", &g.rail),
            ("substrate", &g.substrate),
            ("cladding", &g.cladding),
            ("fill", &g.fill),
        ] {
            let _ = writeln!(s, "{k} = \"{}\"", mat.name);
        }
        let _ = writeln!(s, "\n[sweep]");
        let _ = writeln!(s, "widths = [{}]", list(&self.widths));
        let tags: Vec<String> = self.boundaries.iter().map(|b| format!("\"{b}\"")).collect();
        let _ = writeln!(s, "boundaries = [{}]", tags.join(", "));
        let _ = writeln!(s, "\n[optics]");
        let _ = writeln!(s, "wavelength = {:e}", self.point.wavelength);
        let _ = writeln!(s, "kappa_hz = {:e}", self.kappa_hz);
        let _ = writeln!(s, "n_eff_guess = {:?}", self.point.n_eff_guess);
        let _ = writeln!(s, "modes = {}", self.point.mode_count);
        let _ = writeln!(s, "\n[acoustics]");
        let _ = writeln!(s, "q = [{}]", list(&self.q_values));
        let _ = writeln!(s, "refine = {}", self.point.acoustic_refine);
        let _ = writeln!(s, "\n[bath]");
        let _ = writeln!(s, "temperature = {:?}", self.temperature);
        let _ = writeln!(s, "\n[mesh]");
        let _ = writeln!(s, "background = {:e}", m.background);
        let _ = writeln!(s, "core = {:e}", m.core);
        let _ = writeln!(s, "slot_cells = {}", m.slot_cells);
        let _ = writeln!(s, "grading = {:?}", m.grading);
        let _ = writeln!(s, "padding_wavelengths = {:?}", m.padding_wavelengths);
        let _ = writeln!(s, "max_cells = {}", m.max_cells);
        let _ = writeln!(s, "conformal = {}", m.conformal);
        if let Some(c) = &self.capillary {
            let _ = writeln!(s, "\n[capillary]");
            let _ = writeln!(s, "film_thickness = {:e}", c.film_thickness);
            let _ = writeln!(s, "surface_tension = {:e}", c.surface_tension);
            let _ = writeln!(s, "vdw_coefficient = {:e}", c.vdw_coefficient);
        }
        if self.out_csv.is_some() || self.out_svg.is_some() {
            let _ = writeln!(s, "\n[output]");
            if let Some(p) = &self.out_csv {
                let _ = writeln!(s, "csv = {:?}", p.display().to_string());
            }
            if let Some(p) = &self.out_svg {
                let _ = writeln!(s, "svg = {:?}", p.display().to_string());
            }
        }
        s
    }

    /// Settings of one sweep point with the mesh wavelength kept in step.
    pub fn point_settings(&self) -> PointSettings {
        let mut p = self.point.clone();
        p.mesh.wavelength = p.wavelength;
        p
    }

    pub fn mesh_spec(&self) -> &MeshSpec {
        &self.point.mesh
    }
}
