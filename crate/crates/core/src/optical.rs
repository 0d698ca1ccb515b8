//! Full-vector finite-difference mode solver for the waveguide cross-section.
//!
//! Unknowns are the transverse electric field components on a staggered
//! (Yee) arrangement over the mesh: `Ex` at the midpoints of horizontal cell
//! edges, `Ey` at the midpoints of vertical cell edges, `Ez` at cell corners
//! and the longitudinal magnetic field at cell centres. With fields varying
//! as `exp(-i beta z)` the transverse-E equations read
//!
//! ```text
//! beta^2 Ex = k0^2 eps_x Ex + d/dx [ div(eps E_t) / eps_z ] + d/dy (dEx/dy - dEy/dx)
//! beta^2 Ey = k0^2 eps_y Ey + d/dy [ div(eps E_t) / eps_z ] - d/dx (dEx/dy - dEy/dx)
//! ```
//!
//! Interfaces lie on mesh lines, so each component only ever straddles
//! interfaces it is tangential to and samples the arithmetic mean of the
//! adjacent cells there. Continuity of the normal displacement is carried by
//! the flux form of `div(eps E_t)`, which reproduces the slot field jump
//! `E_slot / E_rail = eps_rail / eps_slot`. The outer boundary is a perfect
//! electric conductor.

use num_complex::Complex64;

use crate::eigen::{eigs_near, EigenOptions};
use crate::error::{Error, Result};
use crate::materials::optical_omega;
use crate::mesh::{Mesh2D, Region};
use crate::sparse::{CsrMatrix, TripletBuilder};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    /// Dominant `Ex`, across the slot.
    TeLike,
    /// Dominant `Ey`.
    TmLike,
}

impl Polarization {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::TeLike => "TE-like",
            Polarization::TmLike => "TM-like",
        }
    }
}

/// Index bookkeeping for the staggered unknowns.
#[derive(Debug, Clone, Copy)]
struct Layout {
    nx: usize,
    ny: usize,
}

impl Layout {
    fn n_ex(&self) -> usize {
        self.nx * (self.ny - 1)
    }

    fn len(&self) -> usize {
        self.n_ex() + (self.nx - 1) * self.ny
    }

    /// `Ex` at `(x_{i+1/2}, y_j)`; zero on the top and bottom walls.
    fn ex(&self, i: usize, j: usize) -> Option<usize> {
        (j >= 1 && j < self.ny && i < self.nx).then(|| (j - 1) * self.nx + i)
    }

    /// `Ey` at `(x_i, y_{j+1/2})`; zero on the side walls.
    fn ey(&self, i: usize, j: usize) -> Option<usize> {
        (i >= 1 && i < self.nx && j < self.ny).then(|| self.n_ex() + j * (self.nx - 1) + (i - 1))
    }

    fn interior_node(&self, i: usize, j: usize) -> bool {
        i >= 1 && i < self.nx && j >= 1 && j < self.ny
    }
}

type Stencil = Vec<(usize, f64)>;

/// Sparse operator of the transverse-E eigenproblem in `beta^2`.
#[derive(Debug, Clone)]
pub struct OpticalOperator<'m> {
    mesh: &'m Mesh2D,
    layout: Layout,
    pub wavelength: f64,
    pub k0: f64,
    pub matrix: CsrMatrix,
    eps_x: Vec<f64>,
    eps_y: Vec<f64>,
    eps_z: Vec<f64>,
}

impl<'m> OpticalOperator<'m> {
    pub fn mesh(&self) -> &'m Mesh2D {
        self.mesh
    }

    /// Number of rows: one per interior `Ex` and `Ey` sample.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn hx(&self, i: usize) -> f64 {
        0.5 * (self.mesh.dx(i - 1) + self.mesh.dx(i))
    }

    fn hy(&self, j: usize) -> f64 {
        0.5 * (self.mesh.dy(j - 1) + self.mesh.dy(j))
    }

    fn node(&self, i: usize, j: usize) -> usize {
        j * (self.layout.nx + 1) + i
    }

    /// `div(eps E_t)` at an interior node as a stencil over unknowns.
    fn divergence(&self, i: usize, j: usize) -> Stencil {
        let l = self.layout;
        let mut s = Stencil::with_capacity(4);
        let (hx, hy) = (self.hx(i), self.hy(j));
        if let Some(k) = l.ex(i, j) {
            s.push((k, self.eps_x[k] / hx));
        }
        if let Some(k) = l.ex(i - 1, j) {
            s.push((k, -self.eps_x[k] / hx));
        }
        if let Some(k) = l.ey(i, j) {
            s.push((k, self.eps_y[k - l.n_ex()] / hy));
        }
        if let Some(k) = l.ey(i, j - 1) {
            s.push((k, -self.eps_y[k - l.n_ex()] / hy));
        }
        s
    }

    /// `dEx/dy - dEy/dx` at the centre of cell `(i, j)`.
    fn curl(&self, i: usize, j: usize) -> Stencil {
        let l = self.layout;
        let (dx, dy) = (self.mesh.dx(i), self.mesh.dy(j));
        let mut s = Stencil::with_capacity(4);
        if let Some(k) = l.ex(i, j + 1) {
            s.push((k, 1.0 / dy));
        }
        if let Some(k) = l.ex(i, j) {
            s.push((k, -1.0 / dy));
        }
        if let Some(k) = l.ey(i + 1, j) {
            s.push((k, -1.0 / dx));
        }
        if let Some(k) = l.ey(i, j) {
            s.push((k, 1.0 / dx));
        }
        s
    }

    /// `div(eps E_t) / eps_z` at a node, zero on the conducting wall.
    fn scaled_divergence(&self, i: usize, j: usize) -> Stencil {
        if !self.layout.interior_node(i, j) {
            return Stencil::new();
        }
        let ez = self.eps_z[self.node(i, j)];
        self.divergence(i, j).into_iter().map(|(k, c)| (k, c / ez)).collect()
    }

    /// Longitudinal field `Ez = -i div(eps E_t) / (beta eps_z)` at every node.
    fn longitudinal(&self, et: &[f64], beta: f64) -> Vec<Complex64> {
        let (nx, ny) = (self.layout.nx, self.layout.ny);
        let mut ez = vec![Complex64::new(0.0, 0.0); (nx + 1) * (ny + 1)];
        for j in 1..ny {
            for i in 1..nx {
                let d: f64 = self.divergence(i, j).iter().map(|&(k, c)| c * et[k]).sum();
                ez[self.node(i, j)] = Complex64::new(0.0, -d / (beta * self.eps_z[self.node(i, j)]));
            }
        }
        ez
    }
}

/// Assembles the full-vector operator for `mesh` at vacuum wavelength
/// `wavelength`.
pub fn assemble_operator(mesh: &Mesh2D, wavelength: f64) -> Result<OpticalOperator<'_>> {
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    let (nx, ny) = (mesh.nx(), mesh.ny());
    if nx < 2 || ny < 2 {
        return Err(Error::domain("mesh needs at least 2x2 cells"));
    }
    let layout = Layout { nx, ny };
    let k0 = 2.0 * PI / wavelength;

    let mut eps_x = vec![0.0; layout.n_ex()];
    for j in 1..ny {
        for i in 0..nx {
            let (d0, d1) = (mesh.dy(j - 1), mesh.dy(j));
            let k = layout.ex(i, j).expect("interior");
            eps_x[k] = (d0 * mesh.eps(i, j - 1) + d1 * mesh.eps(i, j)) / (d0 + d1);
        }
    }
    let mut eps_y = vec![0.0; (nx - 1) * ny];
    for j in 0..ny {
        for i in 1..nx {
            let (d0, d1) = (mesh.dx(i - 1), mesh.dx(i));
            let k = layout.ey(i, j).expect("interior") - layout.n_ex();
            eps_y[k] = (d0 * mesh.eps(i - 1, j) + d1 * mesh.eps(i, j)) / (d0 + d1);
        }
    }
    let mut eps_z = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let (mut num, mut den) = (0.0, 0.0);
            for (ci, cj) in [
                (i.wrapping_sub(1), j.wrapping_sub(1)),
                (i, j.wrapping_sub(1)),
                (i.wrapping_sub(1), j),
                (i, j),
            ] {
                if ci < nx && cj < ny {
                    let a = mesh.area(ci, cj);
                    num += a * mesh.eps(ci, cj);
                    den += a;
                }
            }
            eps_z[j * (nx + 1) + i] = num / den;
        }
    }

    let mut op = OpticalOperator {
        mesh,
        layout,
        wavelength,
        k0,
        matrix: TripletBuilder::new(0).build(),
        eps_x,
        eps_y,
        eps_z,
    };

    let mut b = TripletBuilder::new(layout.len());
    let k0sq = k0 * k0;
    for j in 1..ny {
        for i in 0..nx {
            let row = layout.ex(i, j).expect("interior");
            b.add(row, row, k0sq * op.eps_x[row]);
            let dx = mesh.dx(i);
            for (k, c) in op.scaled_divergence(i + 1, j) {
                b.add(row, k, c / dx);
            }
            for (k, c) in op.scaled_divergence(i, j) {
                b.add(row, k, -c / dx);
            }
            let hy = op.hy(j);
            for (k, c) in op.curl(i, j) {
                b.add(row, k, c / hy);
            }
            for (k, c) in op.curl(i, j - 1) {
                b.add(row, k, -c / hy);
            }
        }
    }
    for j in 0..ny {
        for i in 1..nx {
            let row = layout.ey(i, j).expect("interior");
            b.add(row, row, k0sq * op.eps_y[row - layout.n_ex()]);
            let dy = mesh.dy(j);
            for (k, c) in op.scaled_divergence(i, j + 1) {
                b.add(row, k, c / dy);
            }
            for (k, c) in op.scaled_divergence(i, j) {
                b.add(row, k, -c / dy);
            }
            let hx = op.hx(i);
            for (k, c) in op.curl(i, j) {
                b.add(row, k, -c / hx);
            }
            for (k, c) in op.curl(i - 1, j) {
                b.add(row, k, c / hx);
            }
        }
    }
    op.matrix = b.build();
    Ok(op)
}

/// A guided mode on the staggered grid. Component arrays cover the whole
/// mesh including the (zero) wall samples:
/// `ex[j * nx + i]` at `(x_{i+1/2}, y_j)` for `j in 0..=ny`,
/// `ey[j * (nx + 1) + i]` at `(x_i, y_{j+1/2})` for `i in 0..=nx`,
/// `ez[j * (nx + 1) + i]` at the node `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalMode {
    pub nx: usize,
    pub ny: usize,
    pub ex: Vec<Complex64>,
    pub ey: Vec<Complex64>,
    pub ez: Vec<Complex64>,
    pub n_eff: f64,
    pub wavelength: f64,
    /// Optical angular frequency, rad/s.
    pub omega: f64,
    pub polarization: Polarization,
    pub slot_fraction: f64,
    /// Relative eigen-residual of the discrete problem.
    pub residual: f64,
}

impl OpticalMode {
    /// `|E|^2` averaged over cell `(i, j)` from its edge and corner samples.
    pub fn cell_intensity(&self, i: usize, j: usize) -> f64 {
        let (nx, _) = (self.nx, self.ny);
        let ex = 0.5 * (self.ex[j * nx + i].norm_sqr() + self.ex[(j + 1) * nx + i].norm_sqr());
        let w = nx + 1;
        let ey = 0.5 * (self.ey[j * w + i].norm_sqr() + self.ey[j * w + i + 1].norm_sqr());
        let ez = 0.25
            * (self.ez[j * w + i].norm_sqr()
                + self.ez[j * w + i + 1].norm_sqr()
                + self.ez[(j + 1) * w + i].norm_sqr()
                + self.ez[(j + 1) * w + i + 1].norm_sqr());
        ex + ey + ez
    }

    /// Transverse intensities `(int |Ex|^2, int |Ey|^2)` over the mesh.
    fn transverse_power(&self, mesh: &Mesh2D) -> (f64, f64) {
        let (nx, ny) = (self.nx, self.ny);
        let w = nx + 1;
        let (mut px, mut py) = (0.0, 0.0);
        for j in 0..ny {
            for i in 0..nx {
                let a = mesh.area(i, j);
                px += a * 0.5 * (self.ex[j * nx + i].norm_sqr() + self.ex[(j + 1) * nx + i].norm_sqr());
                py += a * 0.5 * (self.ey[j * w + i].norm_sqr() + self.ey[j * w + i + 1].norm_sqr());
            }
        }
        (px, py)
    }

    /// `int eps_r |E|^2 dA` over the whole mesh.
    pub fn energy(&self, mesh: &Mesh2D) -> f64 {
        let mut total = 0.0;
        for j in 0..mesh.ny() {
            for i in 0..mesh.nx() {
                total += mesh.eps(i, j) * self.cell_intensity(i, j) * mesh.area(i, j);
            }
        }
        total
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.ex.iter_mut().chain(self.ey.iter_mut()).chain(self.ez.iter_mut()) {
            *v *= factor;
        }
    }

    fn check_mesh(&self, mesh: &Mesh2D) -> Result<()> {
        if self.nx != mesh.nx() || self.ny != mesh.ny() {
            return Err(Error::domain(format!(
                "mode is {}x{} cells but mesh is {}x{}",
                self.nx,
                self.ny,
                mesh.nx(),
                mesh.ny()
            )));
        }
        Ok(())
    }
}

/// Fraction of `int eps_r |E|^2` stored in the slot cells.
pub fn slot_energy_fraction(mode: &OpticalMode, mesh: &Mesh2D) -> Result<f64> {
    mode.check_mesh(mesh)?;
    let (mut slot, mut total) = (0.0, 0.0);
    for j in 0..mesh.ny() {
        for i in 0..mesh.nx() {
            let u = mesh.eps(i, j) * mode.cell_intensity(i, j) * mesh.area(i, j);
            total += u;
            if mesh.region(i, j) == Region::HeliumSlot {
                slot += u;
            }
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(slot / total)
}

/// Solves for the `count` modes with effective index nearest `n_eff_guess`,
/// returned in descending `n_eff`, each normalised to unit `int eps_r |E|^2`.
pub fn solve_modes(op: &OpticalOperator<'_>, n_eff_guess: f64, count: usize) -> Result<Vec<OpticalMode>> {
    solve_modes_with(op, n_eff_guess, count, &EigenOptions::default())
}

pub fn solve_modes_with(
    op: &OpticalOperator<'_>,
    n_eff_guess: f64,
    count: usize,
    opts: &EigenOptions,
) -> Result<Vec<OpticalMode>> {
    if !(1..=10).contains(&count) {
        return Err(Error::domain(format!("mode count {count} outside 1..=10")));
    }
    if !(n_eff_guess > 1.0 && n_eff_guess < 3.48) {
        return Err(Error::domain(format!(
            "effective index guess {n_eff_guess} outside (1, 3.48)"
        )));
    }
    let shift = (n_eff_guess * op.k0).powi(2);
    let pairs = eigs_near(&op.matrix, shift, count, opts)?;
    let mesh = op.mesh;
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let l = op.layout;

    let mut modes = Vec::with_capacity(count);
    for pair in pairs {
        if !(pair.value > 0.0) {
            return Err(Error::State(format!(
                "eigenvalue beta^2 = {} is not a propagating mode",
                pair.value
            )));
        }
        let beta = pair.value.sqrt();
        let et = &pair.vector;
        let mut ex = vec![Complex64::new(0.0, 0.0); nx * (ny + 1)];
        let mut ey = vec![Complex64::new(0.0, 0.0); (nx + 1) * ny];
        for j in 0..=ny {
            for i in 0..nx {
                if let Some(k) = l.ex(i, j) {
                    ex[j * nx + i] = Complex64::new(et[k], 0.0);
                }
            }
        }
        for j in 0..ny {
            for i in 0..=nx {
                if let Some(k) = l.ey(i, j) {
                    ey[j * (nx + 1) + i] = Complex64::new(et[k], 0.0);
                }
            }
        }
        let ez = op.longitudinal(et, beta);
        let mut mode = OpticalMode {
            nx,
            ny,
            ex,
            ey,
            ez,
            n_eff: beta / op.k0,
            wavelength: op.wavelength,
            omega: optical_omega(op.wavelength),
            polarization: Polarization::TeLike,
            slot_fraction: 0.0,
            residual: pair.residual,
        };
        let energy = mode.energy(mesh);
        mode.scale(1.0 / energy.sqrt());
        let (px, py) = mode.transverse_power(mesh);
        mode.polarization = if px >= py {
            Polarization::TeLike
        } else {
            Polarization::TmLike
        };
        mode.slot_fraction = slot_energy_fraction(&mode, mesh)?;
        modes.push(mode);
    }
    modes.sort_by(|a, b| b.n_eff.total_cmp(&a.n_eff));
    Ok(modes)
}

/// Azimuthal resonance order of a ring mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOrder {
    /// `2 pi R n_eff / lambda`.
    pub exact: f64,
    pub nearest: u64,
}

pub fn resonance_order(n_eff: f64, radius: f64, wavelength: f64) -> Result<ResonanceOrder> {
    if !(n_eff > 0.0 && radius > 0.0 && wavelength > 0.0) {
        return Err(Error::domain("resonance order needs positive inputs"));
    }
    let exact = 2.0 * PI * radius * n_eff / wavelength;
    Ok(ResonanceOrder {
        exact,
        nearest: exact.round() as u64,
    })
}

/// Warning raised when an azimuthal order cannot be reached by any guided
/// mode of the given ring.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderWarning {
    pub order: u64,
    pub required_index: f64,
    pub max_index: f64,
}

impl std::fmt::Display for OrderWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "azimuthal order {} needs n_eff = {:.3}, above the largest index {:.3}",
            self.order, self.required_index, self.max_index
        )
    }
}

/// Checks that order `m` is reachable, i.e. `m lambda / (2 pi R) < max_index`.
pub fn check_order(m: u64, radius: f64, wavelength: f64, max_index: f64) -> Option<OrderWarning> {
    let required_index = m as f64 * wavelength / (2.0 * PI * radius);
    (required_index >= max_index).then_some(OrderWarning {
        order: m,
        required_index,
        max_index,
    })
}
