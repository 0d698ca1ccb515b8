//! Quantum figures of merit built from the coupling rate and the decay rates.
//!
//! Input coupling convention: an input power `P` sustains
//! `n_p = P kappa_ext / (hbar omega ((kappa/2)^2 + Delta^2))` intracavity
//! photons.

use crate::capillary::CapillaryState;
use crate::error::{Error, Result};
use crate::materials::CONSTANTS;
use crate::mesh::{BoundaryTag, SlotRingGeometry};

/// `C0 = 4 g0^2 / (kappa Gamma)`.
pub fn cooperativity(g0: f64, kappa: f64, gamma: f64) -> Result<f64> {
    if !(kappa > 0.0 && gamma > 0.0) {
        return Err(Error::domain(format!(
            "decay rates must be positive (kappa={kappa}, Gamma={gamma})"
        )));
    }
    Ok(4.0 * g0 * g0 / (kappa * gamma))
}

fn check_coupling(kappa: f64, kappa_ext: f64, omega: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa_ext > 0.0 && kappa_ext <= kappa) {
        return Err(Error::domain(format!(
            "need 0 < kappa_ext <= kappa (kappa={kappa}, kappa_ext={kappa_ext})"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::domain("optical frequency must be positive"));
    }
    Ok(())
}

/// Intracavity photon number sustained by input power `power`.
pub fn intracavity_photons(power: f64, kappa: f64, kappa_ext: f64, omega: f64, detuning: f64) -> Result<f64> {
    check_coupling(kappa, kappa_ext, omega)?;
    Ok(power * kappa_ext / (CONSTANTS.hbar * omega * (0.25 * kappa * kappa + detuning * detuning)))
}

/// Input power at which `C0 n_p = 1`, W.
pub fn lasing_threshold(g0: f64, kappa: f64, kappa_ext: f64, gamma: f64, omega: f64, detuning: f64) -> Result<f64> {
    check_coupling(kappa, kappa_ext, omega)?;
    let c0 = cooperativity(g0, kappa, gamma)?;
    if c0 == 0.0 {
        return Err(Error::domain("threshold undefined for zero cooperativity"));
    }
    Ok(CONSTANTS.hbar * omega * (0.25 * kappa * kappa + detuning * detuning) / (kappa_ext * c0))
}

/// Bose occupancy of a mode at angular frequency `omega`.
pub fn thermal_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !(omega > 0.0) {
        return Err(Error::domain(format!(
            "thermal occupancy needs omega > 0 and T >= 0 (omega={omega}, T={temperature})"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = CONSTANTS.hbar * omega / (CONSTANTS.k_b * temperature);
    Ok(1.0 / x.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    /// `C0 n_p > n_m`, strict.
    pub satisfied: bool,
    /// `C0 n_p / n_m`; infinite for a zero-temperature bath.
    pub margin: f64,
}

pub fn coherence_check(c0: f64, photons: f64, occupancy: f64) -> Result<Coherence> {
    if !(c0 >= 0.0 && photons >= 0.0 && occupancy >= 0.0) {
        return Err(Error::domain("coherence check needs non-negative inputs"));
    }
    let drive = c0 * photons;
    let margin = if occupancy > 0.0 {
        drive / occupancy
    } else if drive > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(Coherence {
        satisfied: drive > occupancy,
        margin,
    })
}

/// `Omega > kappa`, strict.
pub fn sideband_resolved(omega: f64, kappa: f64) -> bool {
    omega > kappa
}

/// Outcome of one design point.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub geometry: SlotRingGeometry,
    pub boundary: BoundaryTag,
    pub n_eff: f64,
    pub eta_slot: f64,
    pub m_opt: u64,
    pub m_ac: u64,
    /// Brillouin shift, rad/s.
    pub omega_b: f64,
    /// Zero-point pressure, Pa.
    pub p_zp: f64,
    /// Re-integrated strain energy of the normalised acoustic mode, J.
    pub strain_energy: f64,
    /// rad/s
    pub g0: f64,
    /// rad/s
    pub kappa: f64,
    /// rad/s
    pub gamma: f64,
    pub q_ac: f64,
    pub c0: f64,
    /// W
    pub p_th: f64,
    /// K
    pub temperature: f64,
    pub n_m: f64,
    pub sideband_resolved: bool,
    /// Photon number `n_m / C0` at which the coherence criterion is met.
    pub coherence_photons: f64,
    /// Filled state of the slot at the configured film thickness, if asked.
    pub capillary: Option<CapillaryState>,
}

/// Solved quantities of one design point; [`DesignReport::new`] derives the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInputs {
    pub geometry: SlotRingGeometry,
    pub boundary: BoundaryTag,
    pub n_eff: f64,
    pub eta_slot: f64,
    pub m_opt: u64,
    pub m_ac: u64,
    pub omega_b: f64,
    pub p_zp: f64,
    pub strain_energy: f64,
    pub g0: f64,
    /// Optical angular frequency, rad/s.
    pub omega_opt: f64,
    pub kappa: f64,
    pub q_ac: f64,
    pub temperature: f64,
}

impl DesignReport {
    /// Critical coupling (`kappa_ext = kappa / 2`) at zero detuning.
    pub fn new(inp: DesignInputs) -> Result<Self> {
        if !(inp.g0 >= 0.0) {
            return Err(Error::domain("g0 must be non-negative"));
        }
        let gamma = crate::acoustic::acoustic_linewidth(inp.omega_b, inp.q_ac)?;
        let c0 = cooperativity(inp.g0, inp.kappa, gamma)?;
        let p_th = lasing_threshold(inp.g0, inp.kappa, 0.5 * inp.kappa, gamma, inp.omega_opt, 0.0)?;
        let n_m = thermal_occupancy(inp.omega_b, inp.temperature)?;
        Ok(DesignReport {
            geometry: inp.geometry,
            boundary: inp.boundary,
            n_eff: inp.n_eff,
            eta_slot: inp.eta_slot,
            m_opt: inp.m_opt,
            m_ac: inp.m_ac,
            omega_b: inp.omega_b,
            p_zp: inp.p_zp,
            strain_energy: inp.strain_energy,
            g0: inp.g0,
            kappa: inp.kappa,
            gamma,
            q_ac: inp.q_ac,
            c0,
            p_th,
            temperature: inp.temperature,
            n_m,
            sideband_resolved: sideband_resolved(inp.omega_b, inp.kappa),
            coherence_photons: n_m / c0,
            capillary: None,
        })
    }
}
