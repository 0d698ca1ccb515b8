//! First-sound pressure modes of the fluid-filled slot.
//!
//! At azimuthal wavenumber `k = m / R` the pressure obeys
//! `(-lap_t + k^2) p = (Omega / c)^2 p` on the slot rectangle. Silicon and
//! silica walls are rigid (zero normal gradient); the top is rigid when the
//! slot is sealed and pressure-free when it is open. The transverse
//! Laplacian is discretised with cell-centred finite volumes and its lowest
//! eigenpairs are found by shift-and-invert iteration on the symmetrically
//! scaled operator.

use std::f64::consts::PI;

use crate::eigen::{eigs_near, EigenOptions};
use crate::error::{Error, Result};
use crate::materials::{Material, CONSTANTS};
use crate::mesh::{BoundaryTag, Mesh2D, SlotRingGeometry};
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Tensor grid covering the slot, `x` across the slot and `y` from the
/// slot floor (0) to its top (`h`).
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SlotGrid {
    pub fn uniform(width: f64, height: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::domain("slot grid needs positive size and cell counts"));
        }
        Ok(SlotGrid {
            x: (0..=nx).map(|i| -width / 2.0 + width * i as f64 / nx as f64).collect(),
            y: (0..=ny).map(|j| height * j as f64 / ny as f64).collect(),
        })
    }

    /// The slot cells of `mesh`, each split into `refine x refine` sub-cells.
    pub fn from_mesh(mesh: &Mesh2D, refine: usize) -> Result<Self> {
        if refine == 0 {
            return Err(Error::domain("refinement factor must be at least 1"));
        }
        let s = mesh.slot;
        if s.i1 <= s.i0 || s.j1 <= s.j0 {
            return Err(Error::domain("mesh has no slot cells"));
        }
        let split = |edges: &[f64]| {
            let mut out = vec![edges[0]];
            for w in edges.windows(2) {
                for r in 1..=refine {
                    out.push(if r == refine {
                        w[1]
                    } else {
                        w[0] + (w[1] - w[0]) * r as f64 / refine as f64
                    });
                }
            }
            out
        };
        Ok(SlotGrid {
            x: split(&mesh.x[s.i0..=s.i1]),
            y: split(&mesh.y[s.j0..=s.j1]),
        })
    }

    pub fn nx(&self) -> usize {
        self.x.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    pub fn dx(&self, i: usize) -> f64 {
        self.x[i + 1] - self.x[i]
    }

    pub fn dy(&self, j: usize) -> f64 {
        self.y[j + 1] - self.y[j]
    }

    pub fn area(&self, i: usize, j: usize) -> f64 {
        self.dx(i) * self.dy(j)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (0.5 * (self.x[i] + self.x[i + 1]), 0.5 * (self.y[j] + self.y[j + 1]))
    }

    pub fn width(&self) -> f64 {
        self.x[self.nx()] - self.x[0]
    }

    pub fn height(&self) -> f64 {
        self.y[self.ny()] - self.y[0]
    }

    /// `sum f(cell) * area` over the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for j in 0..self.ny() {
            for i in 0..self.nx() {
                total += values[self.cell(i, j)] * self.area(i, j);
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticMode {
    pub grid: SlotGrid,
    /// Pressure shape per grid cell, scaled to `max |p| = 1`.
    pub shape: Vec<f64>,
    /// Angular eigenfrequency, rad/s.
    pub omega: f64,
    /// Azimuthal order.
    pub order: u64,
    /// Azimuthal wavenumber `m / R`, 1/m.
    pub wavenumber: f64,
    /// Radius of the acoustic path, m.
    pub path_radius: f64,
    pub boundary: BoundaryTag,
    pub sound_speed: f64,
    /// Eigenvalue of the transverse operator, 1/m^2.
    pub transverse_eigenvalue: f64,
    /// False for the zero-frequency uniform mode of a sealed slot at `m = 0`.
    pub propagating: bool,
    /// Zero-point pressure amplitude, Pa; set by [`zero_point_normalize`].
    pub zero_point_pressure: Option<f64>,
    /// Zero-point volumetric strain per cell; set by [`zero_point_normalize`].
    pub strain: Option<Vec<f64>>,
}

impl AcousticMode {
    /// `int p^2 dA` over the cross-section.
    pub fn shape_norm(&self) -> f64 {
        let sq: Vec<f64> = self.shape.iter().map(|p| p * p).collect();
        self.grid.integrate(&sq)
    }
}

/// Transverse finite-volume operator scaled by `M^{-1/2} L M^{-1/2}`.
fn transverse_operator(grid: &SlotGrid, bc: BoundaryTag) -> CsrMatrix {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut b = TripletBuilder::new(grid.len());
    let sqrt_area = |i: usize, j: usize| grid.area(i, j).sqrt();
    let couple = |b: &mut TripletBuilder, (i0, j0): (usize, usize), (i1, j1): (usize, usize), t: f64| {
        let (p, q) = (grid.cell(i0, j0), grid.cell(i1, j1));
        let (sp, sq) = (sqrt_area(i0, j0), sqrt_area(i1, j1));
        b.add(p, p, t / (sp * sp));
        b.add(q, q, t / (sq * sq));
        b.add(p, q, -t / (sp * sq));
        b.add(q, p, -t / (sp * sq));
    };
    for j in 0..ny {
        for i in 0..nx {
            // diagonal entry always present
            b.add(grid.cell(i, j), grid.cell(i, j), 0.0);
            if i + 1 < nx {
                let t = grid.dy(j) / (0.5 * (grid.dx(i) + grid.dx(i + 1)));
                couple(&mut b, (i, j), (i + 1, j), t);
            }
            if j + 1 < ny {
                let t = grid.dx(i) / (0.5 * (grid.dy(j) + grid.dy(j + 1)));
                couple(&mut b, (i, j), (i, j + 1), t);
            }
        }
    }
    if bc == BoundaryTag::Open {
        let j = ny - 1;
        for i in 0..nx {
            let t = grid.dx(i) / (0.5 * grid.dy(j));
            let c = grid.cell(i, j);
            b.add(c, c, t / grid.area(i, j));
        }
    }
    b.build()
}

/// Lowest `count` pressure modes on `grid`, ordered by frequency.
pub fn solve_acoustic_modes(
    grid: &SlotGrid,
    fluid: &Material,
    order: u64,
    path_radius: f64,
    bc: BoundaryTag,
    count: usize,
) -> Result<Vec<AcousticMode>> {
    let sound_speed = fluid
        .sound_speed()
        .ok_or_else(|| Error::domain(format!("slot fill `{}` has no acoustic properties", fluid.name)))?;
    if !(path_radius > 0.0) {
        return Err(Error::domain("acoustic path radius must be positive"));
    }
    let op = transverse_operator(grid, bc);
    let scale = (PI / grid.width().max(grid.height())).powi(2);
    let pairs = eigs_near(&op, -0.01 * scale, count, &EigenOptions::default())?;
    let wavenumber = order as f64 / path_radius;

    let mut modes: Vec<AcousticMode> = pairs
        .into_iter()
        .map(|pair| {
            let mut lambda = pair.value;
            if lambda.abs() < 1e-10 * scale {
                lambda = 0.0;
            }
            let mut shape: Vec<f64> = (0..grid.ny())
                .flat_map(|j| (0..grid.nx()).map(move |i| (i, j)))
                .map(|(i, j)| pair.vector[grid.cell(i, j)] / grid.area(i, j).sqrt())
                .collect();
            let peak = shape
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(1.0);
            shape.iter_mut().for_each(|p| *p /= peak);
            let omega = sound_speed * (wavenumber * wavenumber + lambda.max(0.0)).sqrt();
            AcousticMode {
                grid: grid.clone(),
                shape,
                omega,
                order,
                wavenumber,
                path_radius,
                boundary: bc,
                sound_speed,
                transverse_eigenvalue: lambda,
                propagating: omega > 0.0,
                zero_point_pressure: None,
                strain: None,
            }
        })
        .collect();
    modes.sort_by(|a, b| a.transverse_eigenvalue.total_cmp(&b.transverse_eigenvalue));
    Ok(modes)
}

/// Fundamental pressure mode of the slot of `geometry` at azimuthal order
/// `order`, on the supplied discretisation of the slot.
pub fn solve_acoustic_mode(
    geometry: &SlotRingGeometry,
    fluid: &Material,
    order: u64,
    bc: BoundaryTag,
    grid: &SlotGrid,
) -> Result<AcousticMode> {
    geometry.validate()?;
    let tol = 1e-9 * geometry.height.max(geometry.slot_width);
    if (grid.width() - geometry.slot_width).abs() > tol || (grid.height() - geometry.height).abs() > tol {
        return Err(Error::domain(format!(
            "slot grid is {:e} x {:e} m but the slot is {:e} x {:e} m",
            grid.width(),
            grid.height(),
            geometry.slot_width,
            geometry.height
        )));
    }
    let mut modes = solve_acoustic_modes(grid, fluid, order, geometry.slot_center_radius(), bc, 1)?;
    Ok(modes.remove(0))
}

/// Normalises `mode` so its strain energy, `int K eps_v^2 / 2 dV` over the
/// ring (`2 pi R` times the cross-section integral), equals `hbar Omega / 2`.
/// Returns the zero-point pressure amplitude and stores the strain field.
pub fn zero_point_normalize(mode: &mut AcousticMode, bulk_modulus: f64) -> Result<f64> {
    if !(bulk_modulus > 0.0) {
        return Err(Error::domain("bulk modulus must be positive"));
    }
    if !mode.propagating || mode.omega <= 0.0 {
        return Err(Error::domain("zero-frequency mode has no zero-point normalisation"));
    }
    let volume = 2.0 * PI * mode.path_radius * mode.shape_norm();
    let p_zp = (CONSTANTS.hbar * mode.omega * bulk_modulus / volume).sqrt();
    mode.strain = Some(mode.shape.iter().map(|p| p_zp * p / bulk_modulus).collect());
    mode.zero_point_pressure = Some(p_zp);
    Ok(p_zp)
}

/// Re-integrates `int K eps_v^2 / 2 dV` for a normalised mode.
pub fn strain_energy(mode: &AcousticMode, bulk_modulus: f64) -> Result<f64> {
    let strain = mode
        .strain
        .as_ref()
        .ok_or_else(|| Error::State("acoustic mode has not been zero-point normalised".into()))?;
    let density: Vec<f64> = strain.iter().map(|e| 0.5 * bulk_modulus * e * e).collect();
    Ok(2.0 * PI * mode.path_radius * mode.grid.integrate(&density))
}

/// Energy decay rate `Omega / Q`, rad/s.
pub fn acoustic_linewidth(omega: f64, quality: f64) -> Result<f64> {
    if !(quality > 0.0) {
        return Err(Error::domain(format!("quality factor must be positive, got {quality}")));
    }
    Ok(omega / quality)
}
