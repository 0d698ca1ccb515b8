mod common;

use common::{default_point, normal_field_ratio, slab_mesh, slab_te0, LAMBDA};
use heslot_core::field_io::{optical_dump, FieldDump};
use heslot_core::materials::builtin_material;
use heslot_core::mesh::{MeshSpec, Region};
use heslot_core::optical::{assemble_operator, slot_energy_fraction, solve_modes, Polarization};

#[test]
fn slab_te0_matches_transcendental_root() {
    let n_si = builtin_material("silicon").unwrap().index;
    let exact = slab_te0(n_si, 1.0, 220e-9);
    let mesh = slab_mesh(220e-9, MeshSpec::default().core, 1.5 * LAMBDA);
    let op = assemble_operator(&mesh, LAMBDA).unwrap();
    let modes = solve_modes(&op, exact, 1).unwrap();
    let rel = (modes[0].n_eff - exact).abs() / exact;
    assert_eq!(modes[0].polarization, Polarization::TeLike);
    assert!(rel < 1e-3, "n_eff {} vs slab root {exact}: {rel:e}", modes[0].n_eff);
}

#[test]
fn normal_field_jump_at_slot_wall() {
    let (mesh, mode) = default_point(50e-9, 10);
    let (ratio, expected) = normal_field_ratio(&mesh, &mode);
    assert!(
        (ratio / expected - 1.0).abs() < 0.05,
        "E_he / E_si = {ratio}, eps ratio {expected}"
    );
}

#[test]
fn slot_holds_peak_intensity() {
    let (mesh, mode) = default_point(50e-9, 10);
    let mut best = (0.0, Region::Cladding);
    for j in 0..mesh.ny() {
        for i in 0..mesh.nx() {
            let v = mode.cell_intensity(i, j);
            if v > best.0 {
                best = (v, mesh.region(i, j));
            }
        }
    }
    assert_eq!(best.1, Region::HeliumSlot);
    assert_eq!(mode.polarization, Polarization::TeLike);
    let clad = builtin_material("silica").unwrap().index;
    assert!(mode.n_eff > clad && mode.n_eff < 3.48);
}

#[test]
fn slot_fraction_ignores_field_scale() {
    let (mesh, mut mode) = default_point(50e-9, 10);
    let before = slot_energy_fraction(&mode, &mesh).unwrap();
    mode.scale(7.0);
    let after = slot_energy_fraction(&mode, &mesh).unwrap();
    assert!((before - after).abs() < 1e-12);
    assert!((0.0..=1.0).contains(&before));
}

#[test]
fn n_eff_converges_when_slot_cells_double() {
    for w in [15e-9, 50e-9, 130e-9] {
        let (_, coarse) = default_point(w, 10);
        let (_, fine) = default_point(w, 20);
        let rel = (coarse.n_eff - fine.n_eff).abs() / fine.n_eff;
        assert!(rel < 1e-3, "w = {w:e}: {} vs {} ({rel:e})", coarse.n_eff, fine.n_eff);
    }
}

#[test]
fn solves_are_deterministic() {
    let (_, a) = default_point(30e-9, 10);
    let (_, b) = default_point(30e-9, 10);
    assert_eq!(a, b);
}

#[test]
fn field_dump_reads_back_identically() {
    let (mesh, mode) = default_point(50e-9, 10);
    let dump = optical_dump(&mode, &mesh);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mode.txt");
    dump.save(&path).unwrap();
    let back = FieldDump::load(&path).unwrap();
    assert_eq!(back, dump);
    assert_eq!(back.meta("n_eff"), Some(mode.n_eff));
}
