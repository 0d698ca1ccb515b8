//! Evaluation of one design point: mesh, optical mode, phase matching,
//! acoustic mode, coupling rate.

use log::{debug, warn};

use crate::acoustic::{solve_acoustic_mode, zero_point_normalize, AcousticMode, SlotGrid};
use crate::coupling::{coupling_rate, phase_match, CouplingResult, Direction, PhaseMatch};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, Mesh2D, MeshSpec, SlotRingGeometry};
use crate::optical::{
    assemble_operator, check_order, resonance_order, solve_modes, OpticalMode, OrderWarning, Polarization,
    ResonanceOrder,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PointSettings {
    pub wavelength: f64,
    pub mesh: MeshSpec,
    /// Acoustic sub-cells per optical slot cell along each axis.
    pub acoustic_refine: usize,
    pub n_eff_guess: f64,
    /// Optical modes computed around the guess; the first TE-like one is used.
    pub mode_count: usize,
}

impl Default for PointSettings {
    fn default() -> Self {
        PointSettings {
            wavelength: 1550e-9,
            mesh: MeshSpec::default(),
            acoustic_refine: 2,
            n_eff_guess: 3.0,
            mode_count: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointSolution {
    pub geometry: SlotRingGeometry,
    pub mesh: Mesh2D,
    pub optical: OpticalMode,
    pub order: ResonanceOrder,
    pub order_warning: Option<OrderWarning>,
    pub phase: PhaseMatch,
    pub acoustic: AcousticMode,
    pub coupling: CouplingResult,
}

/// Fundamental TE-like optical mode of `geometry`.
pub fn solve_optical(geometry: &SlotRingGeometry, settings: &PointSettings) -> Result<(Mesh2D, OpticalMode)> {
    let mut spec = settings.mesh.clone();
    spec.wavelength = settings.wavelength;
    let mesh = build_mesh(geometry, &spec)?;
    debug!("mesh {}x{} for w = {:e}", mesh.nx(), mesh.ny(), geometry.slot_width);
    let op = assemble_operator(&mesh, settings.wavelength)?;
    let modes = solve_modes(&op, settings.n_eff_guess, settings.mode_count)?;
    let mode = modes
        .into_iter()
        .find(|m| m.polarization == Polarization::TeLike)
        .ok_or_else(|| Error::State("no TE-like mode among the computed modes".into()))?;
    Ok((mesh, mode))
}

pub fn solve_point(geometry: &SlotRingGeometry, settings: &PointSettings) -> Result<PointSolution> {
    let (mesh, optical) = solve_optical(geometry, settings)?;
    complete_point(geometry, settings, mesh, optical)
}

/// Acoustic and coupling stages for an already solved optical mode. The
/// boundary condition is taken from `geometry.top`.
pub fn complete_point(
    geometry: &SlotRingGeometry,
    settings: &PointSettings,
    mesh: Mesh2D,
    optical: OpticalMode,
) -> Result<PointSolution> {
    let radius = geometry.slot_center_radius();
    let order = resonance_order(optical.n_eff, radius, settings.wavelength)?;
    let order_warning = check_order(order.nearest, radius, settings.wavelength, geometry.rail.index);
    if let Some(w) = &order_warning {
        warn!("{w}");
    }
    let phase = phase_match(order.nearest.max(1), Direction::Backward)?;

    let grid = SlotGrid::from_mesh(&mesh, settings.acoustic_refine)?;
    let mut acoustic = solve_acoustic_mode(geometry, &geometry.fill, phase.acoustic_order, geometry.top, &grid)?;
    let bulk = geometry
        .fill
        .bulk_modulus()
        .ok_or_else(|| Error::domain("slot fill has no bulk modulus"))?;
    zero_point_normalize(&mut acoustic, bulk)?;
    let coupling = coupling_rate(&optical, &acoustic, &mesh, geometry)?;
    Ok(PointSolution {
        geometry: geometry.clone(),
        mesh,
        optical,
        order,
        order_warning,
        phase,
        acoustic,
        coupling,
    })
}
