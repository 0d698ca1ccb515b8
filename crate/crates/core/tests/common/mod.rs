//! Helpers shared by the integration tests.
#![allow(dead_code)]

use heslot_core::acoustic::SlotGrid;
use heslot_core::materials::builtin_material;
use heslot_core::mesh::{build_mesh, CellRange, Mesh2D, MeshSpec, Region, SlotRingGeometry};
use heslot_core::optical::OpticalMode;
use heslot_core::sweep::{solve_optical, PointSettings};

use std::f64::consts::PI;

pub const LAMBDA: f64 = 1550e-9;

/// TE0 root of the symmetric slab equation `kappa tan(kappa d / 2) = gamma`,
/// found by bisection on `kappa d / 2 in (0, pi/2)`.
pub fn slab_te0(n_core: f64, n_clad: f64, d: f64) -> f64 {
    let k0 = 2.0 * PI / LAMBDA;
    let f = |n: f64| {
        let kappa = k0 * (n_core * n_core - n * n).sqrt();
        let gamma = k0 * (n * n - n_clad * n_clad).sqrt();
        kappa * (kappa * d / 2.0).tan() - gamma
    };
    // lower end of the TE0 branch: kappa d / 2 -> pi/2
    let n_lo = (n_core * n_core - (PI / (k0 * d)).powi(2)).max(n_clad * n_clad).sqrt() + 1e-12;
    let (mut lo, mut hi) = (n_lo, n_core - 1e-12);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Layered mesh: silicon slab of thickness `d` centred at `y = 0`, vacuum
/// elsewhere, uniform along `x`.
pub fn slab_mesh(d: f64, h: f64, pad: f64) -> Mesh2D {
    let eps_si = builtin_material("silicon").unwrap().permittivity;
    let nx = 4;
    let n_core = (d / h).round() as usize;
    let n_pad = (pad / h).round() as usize;
    let ny = n_core + 2 * n_pad;
    let y: Vec<f64> = (0..=ny).map(|j| -d / 2.0 - pad + j as f64 * h).collect();
    let x: Vec<f64> = (0..=nx).map(|i| i as f64 * 20e-9).collect();
    let mut regions = Vec::with_capacity(nx * ny);
    let mut permittivity = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let core = j >= n_pad && j < n_pad + n_core;
        for _ in 0..nx {
            regions.push(if core { Region::Silicon } else { Region::Cladding });
            permittivity.push(if core { eps_si } else { 1.0 });
        }
    }
    Mesh2D {
        x,
        y,
        regions,
        permittivity,
        slot: CellRange {
            i0: 0,
            i1: 0,
            j0: 0,
            j1: 0,
        },
    }
}

pub fn default_point(w: f64, slot_cells: usize) -> (Mesh2D, OpticalMode) {
    let mut s = PointSettings::default();
    s.mesh.slot_cells = slot_cells;
    solve_optical(&SlotRingGeometry::default().with_slot_width(w), &s).unwrap()
}

/// Normal field just inside the helium over that just inside the silicon at
/// the left slot wall, mid-height, each extrapolated linearly from the two
/// nearest samples. Returns `(ratio, eps_si / eps_he)`.
pub fn normal_field_ratio(mesh: &Mesh2D, mode: &OpticalMode) -> (f64, f64) {
    let s = mesh.slot;
    let nx = mesh.nx();
    let j = (s.j0 + s.j1) / 2;
    let xc = |i: usize| 0.5 * (mesh.x[i] + mesh.x[i + 1]);
    let ex = |i: usize| mode.ex[j * nx + i].re;
    let wall = mesh.x[s.i0];
    let extrapolate = |a: usize, b: usize| ex(a) + (ex(b) - ex(a)) * (wall - xc(a)) / (xc(b) - xc(a));
    let inside_he = extrapolate(s.i0, s.i0 + 1);
    let inside_si = extrapolate(s.i0 - 1, s.i0 - 2);
    (inside_he / inside_si, mesh.eps(s.i0 - 1, j) / mesh.eps(s.i0, j))
}

/// Acoustic grid of the default mesh for slot width `w`.
pub fn default_slot_grid(w: f64) -> SlotGrid {
    let g = SlotRingGeometry::default().with_slot_width(w);
    let mesh = build_mesh(&g, &MeshSpec::default()).unwrap();
    SlotGrid::from_mesh(&mesh, PointSettings::default().acoustic_refine).unwrap()
}
