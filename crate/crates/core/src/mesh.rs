//! Slot-ring device geometry and the graded tensor-product mesh of its
//! cross-section.
//!
//! The cross-section is laid out with the slot centred on `x = 0`, the ring
//! axis towards negative `x`, the substrate below `y = 0` and the rails and
//! slot occupying `0 <= y <= h`. Every material interface coincides with a
//! mesh line, so region tags are exact and cell areas add up to the domain.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::materials::{builtin_material, Material};

/// Boundary condition for the superfluid at the top of the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryTag {
    /// Slot sealed shut: rigid lid, zero normal pressure gradient.
    Sealed,
    /// Slot open to a free surface: zero pressure at the top.
    Open,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 2] = [BoundaryTag::Sealed, BoundaryTag::Open];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Sealed => "sealed",
            BoundaryTag::Open => "open",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sealed" => Ok(BoundaryTag::Sealed),
            "open" => Ok(BoundaryTag::Open),
            other => Err(Error::domain(format!(
                "unknown boundary tag `{other}` (expected `sealed` or `open`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRingGeometry {
    /// Outer radius of the ring, m.
    pub ring_radius: f64,
    /// Gap between the two rails, m.
    pub slot_width: f64,
    /// Height of rails and slot, m.
    pub height: f64,
    /// Width of each silicon rail, m.
    pub rail_width: f64,
    pub rail: Material,
    pub substrate: Material,
    pub cladding: Material,
    pub fill: Material,
    pub top: BoundaryTag,
}

/// Per-rail width used when none is given. Not fixed by the device
/// description: 240 nm is close to the narrowest rail that keeps the TE
/// slot mode guided above the silica index over 5-150 nm slots, and it puts
/// the slot energy fraction near its largest attainable peak.
pub const DEFAULT_RAIL_WIDTH: f64 = 240e-9;

impl Default for SlotRingGeometry {
    fn default() -> Self {
        let m = |name| builtin_material(name).expect("bundled material");
        SlotRingGeometry {
            ring_radius: 10e-6,
            slot_width: 50e-9,
            height: 220e-9,
            rail_width: DEFAULT_RAIL_WIDTH,
            rail: m("silicon"),
            substrate: m("silica"),
            cladding: m("vacuum"),
            fill: m("helium"),
            top: BoundaryTag::Sealed,
        }
    }
}

impl SlotRingGeometry {
    pub fn with_slot_width(&self, w: f64) -> Self {
        SlotRingGeometry {
            slot_width: w,
            ..self.clone()
        }
    }

    pub fn with_top(&self, top: BoundaryTag) -> Self {
        SlotRingGeometry { top, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ring_radius", self.ring_radius),
            ("slot_width", self.slot_width),
            ("height", self.height),
            ("rail_width", self.rail_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.slot_width >= 2.0 * self.ring_radius {
            return Err(Error::domain("slot width must be below the ring diameter"));
        }
        if self.slot_width / 2.0 + self.rail_width >= self.ring_radius {
            return Err(Error::domain("rails and slot do not fit inside the ring radius"));
        }
        Ok(())
    }

    /// Radius of the slot centreline, used as the acoustic path radius and
    /// as the optical path radius for the resonance order.
    pub fn slot_center_radius(&self) -> f64 {
        self.ring_radius - self.rail_width - self.slot_width / 2.0
    }
}

/// Material role of a mesh cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Rail cells.
    Silicon,
    /// Substrate cells.
    Silica,
    HeliumSlot,
    Cladding,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Silicon, Region::Silica, Region::HeliumSlot, Region::Cladding];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Silicon => "silicon",
            Region::Silica => "silica",
            Region::HeliumSlot => "helium_slot",
            Region::Cladding => "cladding",
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown region tag `{s}`")))
    }
}

/// Mesh resolution controls.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    /// Largest cell edge in the padding region, m.
    pub background: f64,
    /// Largest cell edge inside the rails, m.
    pub core: f64,
    /// Minimum number of cells across the slot.
    pub slot_cells: usize,
    /// Largest allowed size ratio between adjacent cells.
    pub grading: f64,
    /// Free-space wavelength used to size the padding, m.
    pub wavelength: f64,
    /// Padding between the structure and the outer wall, in wavelengths.
    pub padding_wavelengths: f64,
    pub max_cells: usize,
    /// Multiply the permittivity by `exp(2x/R)` to account for ring bending.
    pub conformal: bool,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            background: 40e-9,
            core: 10e-9,
            slot_cells: 10,
            grading: 1.2,
            wavelength: 1550e-9,
            padding_wavelengths: 1.5,
            max_cells: 250_000,
            conformal: false,
        }
    }
}

impl MeshSpec {
    fn validate(&self) -> Result<()> {
        if !(self.background > 0.0 && self.core > 0.0 && self.wavelength > 0.0) {
            return Err(Error::domain("mesh cell sizes and wavelength must be positive"));
        }
        if self.slot_cells < 2 {
            return Err(Error::domain("at least two cells are needed across the slot"));
        }
        if !(self.grading > 1.0) {
            return Err(Error::domain("grading ratio must exceed 1"));
        }
        if !(self.padding_wavelengths >= 1.5) {
            return Err(Error::domain("padding must be at least 1.5 wavelengths"));
        }
        Ok(())
    }
}

/// Index ranges (half-open) of the slot cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl CellRange {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }
}

/// Graded tensor-product mesh. Cell `(i, j)` spans `[x[i], x[i+1]] x
/// [y[j], y[j+1]]`; per-cell arrays are row-major with `i` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub regions: Vec<Region>,
    pub permittivity: Vec<f64>,
    pub slot: CellRange,
}

impl Mesh2D {
    pub fn nx(&self) -> usize {
        self.x.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y.len() - 1
    }

    pub fn cell_count(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    #[inline]
    pub fn dx(&self, i: usize) -> f64 {
        self.x[i + 1] - self.x[i]
    }

    #[inline]
    pub fn dy(&self, j: usize) -> f64 {
        self.y[j + 1] - self.y[j]
    }

    pub fn area(&self, i: usize, j: usize) -> f64 {
        self.dx(i) * self.dy(j)
    }

    pub fn eps(&self, i: usize, j: usize) -> f64 {
        self.permittivity[self.cell(i, j)]
    }

    pub fn region(&self, i: usize, j: usize) -> Region {
        self.regions[self.cell(i, j)]
    }

    pub fn domain_area(&self) -> f64 {
        (self.x[self.nx()] - self.x[0]) * (self.y[self.ny()] - self.y[0])
    }

    pub fn region_area(&self, region: Region) -> f64 {
        let mut total = 0.0;
        for j in 0..self.ny() {
            for i in 0..self.nx() {
                if self.region(i, j) == region {
                    total += self.area(i, j);
                }
            }
        }
        total
    }

    /// Smallest cell width across the slot.
    pub fn min_slot_cell(&self) -> f64 {
        (self.slot.i0..self.slot.i1)
            .map(|i| self.dx(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest ratio between neighbouring cell sizes along either axis.
    pub fn max_grading(&self) -> f64 {
        fn ratio(edges: &[f64]) -> f64 {
            edges
                .windows(3)
                .map(|w| {
                    let (a, b) = (w[1] - w[0], w[2] - w[1]);
                    a.max(b) / a.min(b)
                })
                .fold(1.0, f64::max)
        }
        ratio(&self.x).max(ratio(&self.y))
    }

    /// Writes edges and per-cell region tags as plain text.
    pub fn write_debug(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "# heslot mesh v1")?;
        writeln!(out, "nx {} ny {}", self.nx(), self.ny())?;
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        writeln!(out, "x {}", join(&self.x))?;
        writeln!(out, "y {}", join(&self.y))?;
        for j in 0..self.ny() {
            let row: Vec<&str> = (0..self.nx()).map(|i| self.region(i, j).as_str()).collect();
            writeln!(out, "row {j} {}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn debug_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_debug(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Meshes the cross-section of `geometry`.
pub fn build_mesh(geometry: &SlotRingGeometry, spec: &MeshSpec) -> Result<Mesh2D> {
    geometry.validate()?;
    spec.validate()?;

    let w = geometry.slot_width;
    let h = geometry.height;
    let rail = geometry.rail_width;
    let pad = spec.padding_wavelengths * spec.wavelength;
    let slot_cell = w / spec.slot_cells as f64;
    let core = spec.core.max(slot_cell).min(spec.background);
    let bg = spec.background;

    let half = w / 2.0;
    let x_breaks = [
        -half - rail - pad,
        -half - rail,
        -half,
        half,
        half + rail,
        half + rail + pad,
    ];
    let x_sizes = [bg, core, slot_cell, core, bg];
    let y_breaks = [-pad, 0.0, h, h + pad];
    let y_sizes = [bg, core.min(h / 4.0), bg];

    let (x, y) = graded_pair(&x_breaks, &x_sizes, &y_breaks, &y_sizes, spec.grading);

    let (nx, ny) = (x.len() - 1, y.len() - 1);
    let cells = nx * ny;
    if cells > spec.max_cells {
        return Err(Error::Resource {
            message: format!("mesh needs {nx} x {ny} = {cells} cells, budget is {}", spec.max_cells),
            suggestion: format!(
                "a larger background ({:.0} nm) or core ({:.0} nm) cell, fewer slot cells, or a larger budget",
                bg * 2e9,
                spec.core * 2e9
            ),
        });
    }

    // the breakpoints are exact mesh lines
    let find = |edges: &[f64], v: f64| edges.iter().position(|&e| e == v).expect("breakpoint is a mesh line");
    let slot = CellRange {
        i0: find(&x, -half),
        i1: find(&x, half),
        j0: find(&y, 0.0),
        j1: find(&y, h),
    };
    let (rail_lo, rail_hi) = (find(&x, -half - rail), find(&x, half + rail));

    let mut regions = Vec::with_capacity(cells);
    let mut permittivity = Vec::with_capacity(cells);
    let bend_radius = geometry.slot_center_radius();
    for j in 0..ny {
        for i in 0..nx {
            let region = if j < slot.j0 {
                Region::Silica
            } else if j >= slot.j1 {
                Region::Cladding
            } else if (slot.i0..slot.i1).contains(&i) {
                Region::HeliumSlot
            } else if (rail_lo..rail_hi).contains(&i) {
                Region::Silicon
            } else {
                Region::Cladding
            };
            let mut eps = match region {
                Region::Silicon => geometry.rail.permittivity,
                Region::Silica => geometry.substrate.permittivity,
                Region::HeliumSlot => geometry.fill.permittivity,
                Region::Cladding => geometry.cladding.permittivity,
            };
            if spec.conformal {
                let xc = 0.5 * (x[i] + x[i + 1]);
                eps *= (2.0 * xc / bend_radius).exp();
            }
            regions.push(region);
            permittivity.push(eps);
        }
    }

    Ok(Mesh2D {
        x,
        y,
        regions,
        permittivity,
        slot,
    })
}

/// Grades both axes, tightening the growth rate until every adjacent-cell
/// ratio is within `grading`.
fn graded_pair(xb: &[f64], xs: &[f64], yb: &[f64], ys: &[f64], grading: f64) -> (Vec<f64>, Vec<f64>) {
    let mut growth = 0.9 * grading.ln();
    let mut best = None;
    for _ in 0..12 {
        let x = graded_edges(xb, xs, growth);
        let y = graded_edges(yb, ys, growth);
        let ok = max_ratio(&x) <= grading && max_ratio(&y) <= grading;
        best = Some((x, y));
        if ok {
            break;
        }
        growth *= 0.8;
    }
    best.expect("at least one attempt")
}

fn max_ratio(edges: &[f64]) -> f64 {
    edges
        .windows(3)
        .map(|w| {
            let (a, b) = (w[1] - w[0], w[2] - w[1]);
            a.max(b) / a.min(b)
        })
        .fold(1.0, f64::max)
}

/// One-dimensional graded edges through `breaks`, with target size
/// `sizes[k]` inside segment `k` and a size function that grows linearly
/// (slope `growth`) away from each segment.
pub(crate) fn graded_edges(breaks: &[f64], sizes: &[f64], growth: f64) -> Vec<f64> {
    debug_assert_eq!(breaks.len(), sizes.len() + 1);
    let size_at = |x: f64| {
        sizes
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let (a, b) = (breaks[k], breaks[k + 1]);
                let d = if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                };
                s + growth * d
            })
            .fold(f64::INFINITY, f64::min)
    };

    const SAMPLES: usize = 512;
    let mut edges = vec![breaks[0]];
    for k in 0..sizes.len() {
        let (a, b) = (breaks[k], breaks[k + 1]);
        let step = (b - a) / SAMPLES as f64;
        let mut cumulative = Vec::with_capacity(SAMPLES + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for m in 0..SAMPLES {
            let xm = a + (m as f64 + 0.5) * step;
            acc += step / size_at(xm);
            cumulative.push(acc);
        }
        let n = ((acc - 1e-9).ceil() as usize).max(1);
        let mut m = 0;
        for c in 1..n {
            let target = acc * c as f64 / n as f64;
            while cumulative[m + 1] < target {
                m += 1;
            }
            let t = (target - cumulative[m]) / (cumulative[m + 1] - cumulative[m]);
            edges.push(a + (m as f64 + t) * step);
        }
        edges.push(b);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mesh_for(w: f64, slot_cells: usize) -> Mesh2D {
        let g = SlotRingGeometry::default().with_slot_width(w);
        let spec = MeshSpec {
            slot_cells,
            ..MeshSpec::default()
        };
        build_mesh(&g, &spec).unwrap()
    }

    #[test]
    fn slot_resolution_follows_cell_count() {
        let m = mesh_for(50e-9, 10);
        assert_eq!(m.slot.i1 - m.slot.i0, 10);
        assert!(m.min_slot_cell() <= 5e-9 * (1.0 + 1e-9));
        let m = mesh_for(5e-9, 10);
        assert!(m.min_slot_cell() <= 0.5e-9 * (1.0 + 1e-9));
        assert!(m.max_grading() <= 1.2 + 1e-12);
    }

    #[test]
    fn grading_respected_over_slot_range() {
        for w in [5e-9, 15e-9, 50e-9, 130e-9, 150e-9] {
            for n in [10, 20] {
                let m = mesh_for(w, n);
                assert!(m.max_grading() <= 1.2 + 1e-12, "w={w} n={n}: {}", m.max_grading());
                assert!(m.slot.i1 - m.slot.i0 >= n);
            }
        }
    }

    #[test]
    fn areas_sum_to_domain() {
        let m = mesh_for(37e-9, 10);
        let total: f64 = (0..m.ny())
            .flat_map(|j| (0..m.nx()).map(move |i| (i, j)))
            .map(|(i, j)| m.area(i, j))
            .sum();
        assert_relative_eq!(total, m.domain_area(), max_relative = 1e-12);
    }

    #[test]
    fn regions_match_geometry() {
        let g = SlotRingGeometry::default();
        let m = build_mesh(&g, &MeshSpec::default()).unwrap();
        let w = g.slot_width;
        assert_relative_eq!(m.region_area(Region::HeliumSlot), w * g.height, max_relative = 1e-9);
        assert_relative_eq!(
            m.region_area(Region::Silicon),
            2.0 * g.rail_width * g.height,
            max_relative = 1e-9
        );
        for j in 0..m.ny() {
            for i in 0..m.nx() {
                if m.region(i, j) == Region::HeliumSlot {
                    let xc = 0.5 * (m.x[i] + m.x[i + 1]);
                    let yc = 0.5 * (m.y[j] + m.y[j + 1]);
                    assert!(xc.abs() < w / 2.0 && (0.0..g.height).contains(&yc));
                    assert_eq!(m.eps(i, j), g.fill.permittivity);
                }
            }
        }
        let pad = 1.5 * 1550e-9;
        assert!(m.x[0] <= -w / 2.0 - g.rail_width - pad + 1e-15);
        assert!(m.y[0] <= -pad + 1e-15);
        assert!(*m.y.last().unwrap() >= g.height + pad - 1e-15);
    }

    #[test]
    fn refinement_keeps_region_areas() {
        let g = SlotRingGeometry::default().with_slot_width(80e-9);
        let coarse = build_mesh(&g, &MeshSpec::default()).unwrap();
        let fine_spec = MeshSpec {
            background: 20e-9,
            core: 5e-9,
            slot_cells: 20,
            ..MeshSpec::default()
        };
        let fine = build_mesh(&g, &fine_spec).unwrap();
        for r in Region::ALL {
            let (a, b) = (coarse.region_area(r), fine.region_area(r));
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn tagging_is_deterministic() {
        let g = SlotRingGeometry::default();
        let a = build_mesh(&g, &MeshSpec::default()).unwrap();
        let b = build_mesh(&g, &MeshSpec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_geometry_rejected() {
        let g = SlotRingGeometry::default().with_slot_width(0.0);
        assert!(matches!(build_mesh(&g, &MeshSpec::default()), Err(Error::Domain(_))));
        let g = SlotRingGeometry::default().with_slot_width(-5e-9);
        assert!(matches!(build_mesh(&g, &MeshSpec::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn budget_exceeded_is_a_resource_error() {
        let spec = MeshSpec {
            max_cells: 1000,
            ..MeshSpec::default()
        };
        match build_mesh(&SlotRingGeometry::default(), &spec) {
            Err(Error::Resource { suggestion, .. }) => assert!(suggestion.contains("background")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conformal_flag_tilts_permittivity() {
        let g = SlotRingGeometry::default();
        let spec = MeshSpec {
            conformal: true,
            ..MeshSpec::default()
        };
        let m = build_mesh(&g, &spec).unwrap();
        let j = m.ny() - 1;
        assert!(m.eps(0, j) < 1.0 && m.eps(m.nx() - 1, j) > 1.0);
    }

    #[test]
    fn debug_dump_lists_every_row() {
        let m = mesh_for(50e-9, 10);
        let text = m.debug_string();
        assert!(text.starts_with("# heslot mesh v1\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("row ")).count(), m.ny());
        assert!(text.contains("helium_slot"));
    }
}
