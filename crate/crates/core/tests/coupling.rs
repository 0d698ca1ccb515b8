use heslot_core::coupling::{brillouin_shift, coupling_rate, uniform_field_oracle};
use heslot_core::materials::rad_to_hz;
use heslot_core::mesh::{BoundaryTag, SlotRingGeometry};
use heslot_core::sweep::{solve_point, PointSettings, PointSolution};

use std::sync::OnceLock;

fn point() -> &'static PointSolution {
    static P: OnceLock<PointSolution> = OnceLock::new();
    P.get_or_init(|| {
        let g = SlotRingGeometry::default().with_slot_width(50e-9);
        solve_point(&g, &PointSettings::default()).unwrap()
    })
}

#[test]
fn independent_of_optical_normalisation() {
    let p = point();
    let mut scaled = p.optical.clone();
    scaled.scale(13.0);
    let g = coupling_rate(&scaled, &p.acoustic, &p.mesh, &p.geometry).unwrap().g0;
    assert!((g / p.coupling.g0 - 1.0).abs() < 1e-12);
}

#[test]
fn linear_in_zero_point_pressure() {
    let p = point();
    let mut acoustic = p.acoustic.clone();
    for e in acoustic.strain.as_mut().unwrap() {
        *e *= 2.5;
    }
    let g = coupling_rate(&p.optical, &acoustic, &p.mesh, &p.geometry).unwrap().g0;
    assert!((g / p.coupling.g0 - 2.5).abs() < 1e-12);
}

#[test]
fn linear_in_fill_contrast() {
    let p = point();
    let mut geometry = p.geometry.clone();
    let base = geometry.fill.permittivity - 1.0;
    geometry.fill.permittivity = 1.0 + 3.0 * base;
    let g = coupling_rate(&p.optical, &p.acoustic, &p.mesh, &geometry).unwrap().g0;
    assert!((g / p.coupling.g0 - 3.0).abs() < 1e-12);

    geometry.fill.permittivity = 1.0;
    let g = coupling_rate(&p.optical, &p.acoustic, &p.mesh, &geometry).unwrap().g0;
    assert_eq!(g, 0.0);
}

#[test]
fn close_to_uniform_strain_estimate() {
    let p = point();
    let k = p.geometry.fill.bulk_modulus().unwrap();
    let est = uniform_field_oracle(
        p.optical.slot_fraction,
        p.acoustic.zero_point_pressure.unwrap(),
        k,
        p.optical.omega,
        p.geometry.fill.permittivity,
    )
    .unwrap();
    let ratio = p.coupling.g0 / est;
    assert!((1.0 / 3.0..3.0).contains(&ratio), "{ratio}");
    // sealed mode is uniform, so the two differ only through the |E|^2
    // sampling of the refined grid
    assert_eq!(p.geometry.top, BoundaryTag::Sealed);
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn magnitude_and_phase_matching() {
    let p = point();
    let g0 = rad_to_hz(p.coupling.g0);
    assert!(g0 > 1e4 && g0 < 1e7, "{g0}");
    assert_eq!(p.phase.acoustic_order, 2 * p.phase.optical_order);
    let shift = brillouin_shift(p.optical.n_eff, p.acoustic.sound_speed, p.optical.wavelength).unwrap();
    // Omega = c m_ac / R against 2 n_eff c / lambda, differing only by rounding m_opt
    assert!((p.acoustic.omega / shift - 1.0).abs() < 0.02);
}

#[test]
fn unnormalised_acoustic_mode_is_rejected() {
    let p = point();
    let mut acoustic = p.acoustic.clone();
    acoustic.strain = None;
    assert!(coupling_rate(&p.optical, &acoustic, &p.mesh, &p.geometry).is_err());
}
