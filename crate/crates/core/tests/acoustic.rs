mod common;

use common::default_slot_grid;
use heslot_core::acoustic::{solve_acoustic_modes, strain_energy, zero_point_normalize, AcousticMode, SlotGrid};
use heslot_core::field_io::{acoustic_dump, FieldDump};
use heslot_core::materials::{builtin_material, rad_to_hz, Material, CONSTANTS};
use heslot_core::mesh::BoundaryTag;

use std::f64::consts::PI;

const K: f64 = 1.62e7;
const ORDER: u64 = 160;

fn helium() -> Material {
    builtin_material("helium").unwrap()
}

fn radius() -> f64 {
    ORDER as f64 / K
}

fn fundamental(grid: &SlotGrid, bc: BoundaryTag) -> AcousticMode {
    solve_acoustic_modes(grid, &helium(), ORDER, radius(), bc, 1)
        .unwrap()
        .remove(0)
}

/// Rigid walls everywhere except the top, which is rigid (sealed) or a
/// pressure node (open).
fn rectangle_oracle(bc: BoundaryTag, h: f64) -> f64 {
    let c = helium().sound_speed().unwrap();
    match bc {
        BoundaryTag::Sealed => c * K,
        BoundaryTag::Open => c * (K * K + (PI / (2.0 * h)).powi(2)).sqrt(),
    }
}

#[test]
fn rectangle_eigenfrequencies() {
    for w in [5e-9, 50e-9, 150e-9] {
        let grid = default_slot_grid(w);
        for bc in BoundaryTag::ALL {
            let mode = fundamental(&grid, bc);
            let exact = rectangle_oracle(bc, grid.height());
            let rel = (mode.omega - exact).abs() / exact;
            assert!(rel < 1e-4, "w = {w:e} {bc}: {} vs {exact} ({rel:e})", mode.omega);
        }
    }
}

#[test]
fn reference_frequencies() {
    let grid = default_slot_grid(50e-9);
    let sealed = rad_to_hz(fundamental(&grid, BoundaryTag::Sealed).omega);
    let open = rad_to_hz(fundamental(&grid, BoundaryTag::Open).omega);
    assert!((sealed / 614e6 - 1.0).abs() < 5e-3, "{sealed}");
    assert!((open / 670e6 - 1.0).abs() < 5e-3, "{open}");
}

#[test]
fn sealed_shape_is_uniform_and_open_has_top_node() {
    let grid = default_slot_grid(50e-9);
    let sealed = fundamental(&grid, BoundaryTag::Sealed);
    assert!(sealed.shape.iter().all(|p| (p - 1.0).abs() < 1e-6));

    let open = fundamental(&grid, BoundaryTag::Open);
    let h = grid.height();
    let mut worst: f64 = 0.0;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let (_, y) = grid.center(i, j);
            let expected = (PI * y / (2.0 * h)).cos();
            worst = worst.max((open.shape[grid.cell(i, j)] - expected).abs());
        }
    }
    assert!(worst < 1e-2, "{worst}");
}

#[test]
fn open_top_is_stiffer() {
    for w in [5e-9, 50e-9, 150e-9] {
        let grid = default_slot_grid(w);
        let s = fundamental(&grid, BoundaryTag::Sealed);
        let o = fundamental(&grid, BoundaryTag::Open);
        assert!(o.omega > s.omega);
        assert!(o.omega > s.sound_speed * K);
    }
}

#[test]
fn strain_energy_is_half_quantum() {
    let k_he = helium().bulk_modulus().unwrap();
    for w in [5e-9, 50e-9, 150e-9] {
        let grid = default_slot_grid(w);
        for bc in BoundaryTag::ALL {
            let mut mode = fundamental(&grid, bc);
            zero_point_normalize(&mut mode, k_he).unwrap();
            let e = strain_energy(&mode, k_he).unwrap();
            let target = 0.5 * CONSTANTS.hbar * mode.omega;
            assert!((e / target - 1.0).abs() < 1e-6, "{e} vs {target}");
        }
    }
}

#[test]
fn zero_point_pressure_scaling() {
    let k_he = helium().bulk_modulus().unwrap();
    let p_zp = |w: f64, bc| {
        let mut mode = fundamental(&default_slot_grid(w), bc);
        zero_point_normalize(&mut mode, k_he).unwrap()
    };
    // uniform sealed mode: p_zp^2 = hbar Omega K / V
    let grid = default_slot_grid(50e-9);
    let volume = 2.0 * PI * radius() * grid.width() * grid.height();
    let omega = helium().sound_speed().unwrap() * K;
    let closed = (CONSTANTS.hbar * omega * k_he / volume).sqrt();
    let sealed = p_zp(50e-9, BoundaryTag::Sealed);
    assert!((sealed / closed - 1.0).abs() < 1e-9);
    assert!((2.0..2.5).contains(&sealed), "{sealed}");

    let doubled = p_zp(100e-9, BoundaryTag::Sealed);
    assert!(((sealed / doubled).powi(2) - 2.0).abs() < 1e-9);
    assert!(p_zp(50e-9, BoundaryTag::Open) > sealed);
}

#[test]
fn modes_are_orthogonal() {
    let grid = default_slot_grid(50e-9);
    for bc in BoundaryTag::ALL {
        let modes = solve_acoustic_modes(&grid, &helium(), ORDER, radius(), bc, 3).unwrap();
        assert_eq!(modes.len(), 3);
        for a in 0..3 {
            for b in a + 1..3 {
                let prod: Vec<f64> = modes[a].shape.iter().zip(&modes[b].shape).map(|(p, q)| p * q).collect();
                let overlap = grid.integrate(&prod) / (modes[a].shape_norm() * modes[b].shape_norm()).sqrt();
                assert!(overlap.abs() < 1e-8, "{bc} modes {a},{b}: {overlap:e}");
            }
        }
        assert!(modes.windows(2).all(|p| p[0].omega <= p[1].omega));
    }
}

#[test]
fn sealed_zero_order_cannot_be_normalised() {
    let grid = SlotGrid::uniform(50e-9, 220e-9, 8, 20).unwrap();
    let mut mode = solve_acoustic_modes(&grid, &helium(), 0, radius(), BoundaryTag::Sealed, 1)
        .unwrap()
        .remove(0);
    assert_eq!(mode.omega, 0.0);
    assert!(!mode.propagating);
    assert!(zero_point_normalize(&mut mode, helium().bulk_modulus().unwrap()).is_err());
}

#[test]
fn pressure_dump_reads_back_identically() {
    let mut mode = fundamental(&default_slot_grid(50e-9), BoundaryTag::Open);
    zero_point_normalize(&mut mode, helium().bulk_modulus().unwrap()).unwrap();
    let dump = acoustic_dump(&mode);
    let text = dump.to_text();
    let back = FieldDump::read(text.as_bytes()).unwrap();
    assert_eq!(back, dump);
    assert_eq!(back.meta("p_zp"), mode.zero_point_pressure);
}
