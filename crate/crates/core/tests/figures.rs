use heslot_core::acoustic::acoustic_linewidth;
use heslot_core::capillary::{
    capillary_state, fill_energy_delta, fill_transition_thickness, CapillaryModel, CapillaryState, FillTransition,
};
use heslot_core::coupling::brillouin_shift;
use heslot_core::materials::{builtin_material, hz_to_rad, optical_omega, rad_to_hz};
use heslot_core::metrics::{
    coherence_check, cooperativity, intracavity_photons, lasing_threshold, sideband_resolved, thermal_occupancy,
};

fn reference() -> (f64, f64, f64) {
    (hz_to_rad(250e3), hz_to_rad(1e9), hz_to_rad(400e6))
}

#[test]
fn cooperativity_endpoints() {
    let (g0, kappa, omega) = reference();
    let c = |q| cooperativity(g0, kappa, acoustic_linewidth(omega, q).unwrap()).unwrap();
    assert!((c(1e5) - 0.0625).abs() < 1e-6);
    assert!((c(1e8) - 62.5).abs() < 1e-3);
    assert!((rad_to_hz(acoustic_linewidth(omega, 1e5).unwrap()) - 4e3).abs() < 1e-6);
}

#[test]
fn threshold_near_hundred_nanowatts() {
    let (g0, kappa, omega) = reference();
    let gamma = acoustic_linewidth(omega, 1e4).unwrap();
    let w = optical_omega(1550e-9);
    let p = lasing_threshold(g0, kappa, 0.5 * kappa, gamma, w, 0.0).unwrap();
    assert!((30e-9..300e-9).contains(&p), "{p}");
    // at threshold C0 n_p = 1
    let n = intracavity_photons(p, kappa, 0.5 * kappa, w, 0.0).unwrap();
    let c0 = cooperativity(g0, kappa, gamma).unwrap();
    assert!((c0 * n - 1.0).abs() < 1e-12);
    // detuning raises it
    assert!(lasing_threshold(g0, kappa, 0.5 * kappa, gamma, w, kappa).unwrap() > p);
}

#[test]
fn regimes_and_bath() {
    let (g0, kappa, omega) = reference();
    assert!(!sideband_resolved(omega, kappa));
    assert!(sideband_resolved(kappa * 1.0001, kappa));
    assert!(!sideband_resolved(kappa, kappa));
    let n_m = thermal_occupancy(omega, 0.02).unwrap();
    assert!((n_m - 0.6206).abs() < 1e-3, "{n_m}");
    let c0 = cooperativity(g0, kappa, acoustic_linewidth(omega, 1e8).unwrap()).unwrap();
    assert!(coherence_check(c0, 1.0, n_m).unwrap().satisfied);
    assert!(!coherence_check(1.0, n_m, n_m).unwrap().satisfied);
}

#[test]
fn brillouin_shift_spans_hundreds_of_megahertz() {
    let c = builtin_material("helium").unwrap().sound_speed().unwrap();
    let f = |n| rad_to_hz(brillouin_shift(n, c, 1550e-9).unwrap());
    assert!((f(1.0) / 307e6 - 1.0).abs() < 0.01);
    assert!((f(3.48) / 1.07e9 - 1.0).abs() < 0.01);
    let mut last = 0.0;
    for k in 0..=50 {
        let v = f(1.0 + 2.48 * k as f64 / 50.0);
        assert!(v > last);
        last = v;
    }
}

#[test]
fn capillary_transition_at_nanometre_films() {
    let model = CapillaryModel::helium(50e-9, 220e-9, 2e-9);
    let FillTransition::Root(d) = fill_transition_thickness(&model).unwrap() else {
        panic!("expected a transition");
    };
    assert!((0.5e-9..10e-9).contains(&d), "{d}");
    assert!(fill_energy_delta(&model.with_thickness(0.5 * d)).unwrap() > 0.0);
    assert!(fill_energy_delta(&model.with_thickness(2.0 * d)).unwrap() < 0.0);
    assert_eq!(capillary_state(&model.with_thickness(2.0 * d)), CapillaryState::Filled);
    assert_eq!(capillary_state(&model.with_thickness(0.5 * d)), CapillaryState::Empty);
}
