//! Phase matching and the electrostrictive single-photon coupling rate.
//!
//! For degenerate counter-propagating pump and Stokes modes the azimuthal
//! phase integral is unity at exact matching, and the coupling reduces to a
//! cross-section overlap
//!
//! ```text
//! g0 = (omega / 2) (eps_sf - 1) int_slot eps_v |E|^2 dA / int eps_r |E|^2 dA
//! ```
//!
//! with `|E|^2` summed over all three field components.

use std::f64::consts::PI;
use std::fmt;

use crate::acoustic::AcousticMode;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh2D, SlotRingGeometry};
use crate::optical::OpticalMode;

/// Brillouin shift `2 pi * 2 c n_eff / lambda`, rad/s.
pub fn brillouin_shift(n_eff: f64, sound_speed: f64, wavelength: f64) -> Result<f64> {
    if !(n_eff > 0.0 && sound_speed >= 0.0 && wavelength > 0.0) {
        return Err(Error::domain(format!(
            "brillouin shift needs positive inputs (n_eff={n_eff}, c={sound_speed}, lambda={wavelength})"
        )));
    }
    Ok(2.0 * PI * 2.0 * sound_speed * n_eff / wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Backward,
    Forward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Backward => "backward",
            Direction::Forward => "forward",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    CounterModal,
    IntraModal,
    InterModal,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::CounterModal => "counter-modal",
            Scheme::IntraModal => "intra-modal",
            Scheme::InterModal => "inter-modal",
        })
    }
}

/// Azimuthal bookkeeping of one scattering process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseMatch {
    pub optical_order: u64,
    pub acoustic_order: u64,
    pub direction: Direction,
}

/// Acoustic order matching pump and Stokes modes of order `m_opt`.
/// Only backward scattering between degenerate counter-propagating modes
/// is modelled.
pub fn phase_match(optical_order: u64, direction: Direction) -> Result<PhaseMatch> {
    if optical_order == 0 {
        return Err(Error::domain("optical order must be at least 1"));
    }
    match direction {
        Direction::Backward => Ok(PhaseMatch {
            optical_order,
            acoustic_order: 2 * optical_order,
            direction,
        }),
        Direction::Forward => Err(Error::Unsupported(
            "forward scattering (m near 0) is not modelled".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchRecord {
    pub omega_pump: f64,
    pub omega_stokes: f64,
    pub omega_b: f64,
    pub optical_order: u64,
    pub acoustic_order: u64,
    pub direction: Direction,
    /// `None` when the counter-modal process is ruled out by `Omega_B >= kappa`.
    pub scheme: Option<Scheme>,
}

impl PhaseMatchRecord {
    pub fn new(pm: PhaseMatch, omega_pump: f64, omega_b: f64, kappa: Option<f64>) -> Result<Self> {
        if !(omega_pump > 0.0 && omega_b >= 0.0 && omega_b < omega_pump) {
            return Err(Error::domain("need 0 <= Omega_B < omega_pump"));
        }
        let counter_modal = kappa.is_none_or(|k| omega_b < k);
        Ok(PhaseMatchRecord {
            omega_pump,
            omega_stokes: omega_pump - omega_b,
            omega_b,
            optical_order: pm.optical_order,
            acoustic_order: pm.acoustic_order,
            direction: pm.direction,
            scheme: counter_modal.then_some(Scheme::CounterModal),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    /// `|g0|`, rad/s.
    pub g0: f64,
    /// `int_slot eps_v |E|^2 dA`.
    pub numerator: f64,
    /// `int eps_r |E|^2 dA`.
    pub denominator: f64,
    pub geometry: SlotRingGeometry,
    pub boundary: BoundaryTag,
}

fn locate(edges: &[f64], v: f64) -> usize {
    edges.partition_point(|&e| e <= v).clamp(1, edges.len() - 1) - 1
}

/// Evaluates the overlap with each acoustic cell sampling `|E|^2` of the
/// optical cell containing its centre.
pub fn coupling_rate(
    optical: &OpticalMode,
    acoustic: &AcousticMode,
    mesh: &Mesh2D,
    geometry: &SlotRingGeometry,
) -> Result<CouplingResult> {
    if optical.nx != mesh.nx() || optical.ny != mesh.ny() {
        return Err(Error::domain("optical mode was not solved on this mesh"));
    }
    let strain = acoustic
        .strain
        .as_ref()
        .ok_or_else(|| Error::State("acoustic mode has not been zero-point normalised".into()))?;
    let s = mesh.slot;
    let g = &acoustic.grid;
    let tol = 1e-6 * (mesh.x[s.i1] - mesh.x[s.i0]).min(mesh.y[s.j1] - mesh.y[s.j0]);
    let aligned = (g.x[0] - mesh.x[s.i0]).abs() <= tol
        && (g.x[g.nx()] - mesh.x[s.i1]).abs() <= tol
        && (g.y[0] - mesh.y[s.j0]).abs() <= tol
        && (g.y[g.ny()] - mesh.y[s.j1]).abs() <= tol;
    if !aligned {
        return Err(Error::domain("acoustic grid does not cover the optical slot"));
    }

    let mut numerator = 0.0;
    for ja in 0..g.ny() {
        for ia in 0..g.nx() {
            let (xc, yc) = g.center(ia, ja);
            let (i, j) = (locate(&mesh.x, xc), locate(&mesh.y, yc));
            numerator += strain[g.cell(ia, ja)] * optical.cell_intensity(i, j) * g.area(ia, ja);
        }
    }
    let denominator = optical.energy(mesh);
    if !(denominator > 0.0 && numerator.is_finite()) {
        return Err(Error::domain("optical mode carries no energy"));
    }
    let eps_sf = geometry.fill.permittivity;
    let g0 = (0.5 * optical.omega * (eps_sf - 1.0) * numerator / denominator).abs();
    Ok(CouplingResult {
        g0,
        numerator,
        denominator,
        geometry: geometry.clone(),
        boundary: acoustic.boundary,
    })
}

/// Closed-form estimate for a uniform strain filling the slot:
/// `(omega / 2) (eps_sf - 1) (p_zp / K) eta_slot`.
pub fn uniform_field_oracle(eta_slot: f64, p_zp: f64, bulk_modulus: f64, omega: f64, eps_sf: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta_slot) {
        return Err(Error::domain(format!("slot fraction {eta_slot} outside [0, 1]")));
    }
    if !(p_zp >= 0.0 && bulk_modulus > 0.0 && omega > 0.0 && eps_sf >= 1.0) {
        return Err(Error::domain("uniform-field estimate needs positive inputs"));
    }
    Ok(0.5 * omega * (eps_sf - 1.0) * (p_zp / bulk_modulus) * eta_slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{hz_to_rad, optical_omega, rad_to_hz};
    use approx::assert_relative_eq;

    #[test]
    fn brillouin_shift_span() {
        let f = |n| rad_to_hz(brillouin_shift(n, 238.0, 1550e-9).unwrap());
        assert_relative_eq!(f(1.3), 399.2e6, max_relative = 1e-3);
        assert_relative_eq!(f(1.0), 307.1e6, max_relative = 1e-3);
        assert_relative_eq!(f(3.48), 1.0687e9, max_relative = 1e-3);
        assert_eq!(brillouin_shift(2.0, 0.0, 1550e-9).unwrap(), 0.0);
    }

    #[test]
    fn backward_orders_double() {
        assert_eq!(phase_match(93, Direction::Backward).unwrap().acoustic_order, 186);
        assert_eq!(phase_match(186, Direction::Backward).unwrap().acoustic_order, 372);
        assert!(matches!(
            phase_match(93, Direction::Forward),
            Err(Error::Unsupported(_))
        ));
        assert!(phase_match(0, Direction::Backward).is_err());
    }

    #[test]
    fn record_conserves_energy_and_tags_scheme() {
        let pm = phase_match(93, Direction::Backward).unwrap();
        let wp = optical_omega(1550e-9);
        let wb = hz_to_rad(400e6);
        let r = PhaseMatchRecord::new(pm, wp, wb, Some(hz_to_rad(1e9))).unwrap();
        assert_eq!(r.omega_stokes + r.omega_b, wp);
        assert_eq!(r.scheme, Some(Scheme::CounterModal));
        let r = PhaseMatchRecord::new(pm, wp, wb, Some(hz_to_rad(300e6))).unwrap();
        assert_eq!(r.scheme, None);
        let r = PhaseMatchRecord::new(pm, wp, wb, None).unwrap();
        assert_eq!(r.scheme, Some(Scheme::CounterModal));
    }

    #[test]
    fn oracle_arithmetic() {
        let w = optical_omega(1550e-9);
        let g = uniform_field_oracle(0.25, 2.2, 8.21e6, w, 1.029f64.powi(2)).unwrap();
        assert!((2e5..5e5).contains(&rad_to_hz(g)));
        assert_eq!(uniform_field_oracle(0.0, 2.2, 8.21e6, w, 1.0588).unwrap(), 0.0);
        let g2 = uniform_field_oracle(0.25, 4.4, 8.21e6, w, 1.029f64.powi(2)).unwrap();
        assert_relative_eq!(g2, 2.0 * g, max_relative = 1e-15);
        assert!(uniform_field_oracle(1.5, 2.2, 8.21e6, w, 1.0588).is_err());
    }

    #[test]
    fn locate_finds_containing_cell() {
        let e = [0.0, 1.0, 3.0, 4.0];
        assert_eq!(locate(&e, 0.5), 0);
        assert_eq!(locate(&e, 2.0), 1);
        assert_eq!(locate(&e, 3.9), 2);
        assert_eq!(locate(&e, 4.0), 2);
    }
}
