//! Parameter sweeps over slot width and top boundary condition.
//!
//! Each width is solved optically once; the acoustic and coupling stages
//! then run for every boundary tag and one report is produced per acoustic
//! quality factor. Widths are evaluated concurrently when the `parallel`
//! feature is on; rows always come back in (width, boundary, Q) order.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod svg;

use log::{info, warn};

use crate::acoustic::strain_energy;
use crate::capillary::capillary_state;
use crate::error::{Error, Result};
use crate::mesh::BoundaryTag;
use crate::metrics::{DesignInputs, DesignReport};

pub use config::{load_config, validate_config, SweepConfig};
pub use output::{emit_csv, write_csv, CSV_HEADER};
pub use pipeline::{complete_point, solve_optical, solve_point, PointSettings, PointSolution};
pub use svg::{emit_svg, render_svg};

/// One line of sweep output: a report, or the reason the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub width: f64,
    pub boundary: BoundaryTag,
    pub q_ac: f64,
    pub kappa_hz: f64,
    pub temperature: f64,
    pub outcome: std::result::Result<DesignReport, String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn report(&self) -> Option<&DesignReport> {
        self.outcome.as_ref().ok()
    }
}

fn evaluate_width(cfg: &SweepConfig, width: f64) -> Vec<SweepRow> {
    let settings = cfg.point_settings();
    let base = cfg.geometry.with_slot_width(width);
    let optical = solve_optical(&base, &settings);
    let mut rows = Vec::with_capacity(cfg.boundaries.len() * cfg.q_values.len());
    for &bc in &cfg.boundaries {
        let geometry = base.with_top(bc);
        let point = optical.as_ref().map_err(|e| e.to_string()).and_then(|(mesh, mode)| {
            complete_point(&geometry, &settings, mesh.clone(), mode.clone()).map_err(|e| e.to_string())
        });
        for &q in &cfg.q_values {
            let outcome = point
                .clone()
                .and_then(|p| build_report(cfg, &p, q).map_err(|e| e.to_string()));
            match &outcome {
                Ok(r) => info!(
                    "w = {:.2} nm {bc} Q = {q:e}: n_eff = {:.5}, eta = {:.4}, g0/2pi = {:.1} kHz",
                    width * 1e9,
                    r.n_eff,
                    r.eta_slot,
                    r.g0 / (2.0 * std::f64::consts::PI) * 1e-3
                ),
                Err(e) => warn!("w = {:.2} nm {bc} Q = {q:e} failed: {e}", width * 1e9),
            }
            rows.push(SweepRow {
                width,
                boundary: bc,
                q_ac: q,
                kappa_hz: cfg.kappa_hz,
                temperature: cfg.temperature,
                outcome,
            });
        }
    }
    rows
}

fn build_report(cfg: &SweepConfig, p: &PointSolution, q: f64) -> Result<DesignReport> {
    let bulk = p
        .geometry
        .fill
        .bulk_modulus()
        .ok_or_else(|| Error::domain("slot fill has no bulk modulus"))?;
    let mut report = DesignReport::new(DesignInputs {
        geometry: p.geometry.clone(),
        boundary: p.geometry.top,
        n_eff: p.optical.n_eff,
        eta_slot: p.optical.slot_fraction,
        m_opt: p.phase.optical_order,
        m_ac: p.phase.acoustic_order,
        omega_b: p.acoustic.omega,
        p_zp: p.acoustic.zero_point_pressure.unwrap_or(0.0),
        strain_energy: strain_energy(&p.acoustic, bulk)?,
        g0: p.coupling.g0,
        omega_opt: p.optical.omega,
        kappa: cfg.kappa(),
        q_ac: q,
        temperature: cfg.temperature,
    })?;
    report.capillary = cfg.capillary.as_ref().map(|c| capillary_state(&c.model(&p.geometry)));
    Ok(report)
}

#[cfg(feature = "parallel")]
fn map_widths(cfg: &SweepConfig) -> Result<Vec<Vec<SweepRow>>> {
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Resource {
        message: format!("cannot start worker pool: {e}"),
        suggestion: "fewer workers".into(),
    })?;
    Ok(pool.install(|| cfg.widths.par_iter().map(|&w| evaluate_width(cfg, w)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_widths(cfg: &SweepConfig) -> Result<Vec<Vec<SweepRow>>> {
    if cfg.workers.is_some_and(|n| n > 1) {
        warn!("built without the `parallel` feature; running sequentially");
    }
    Ok(run_sequential(cfg))
}

/// Evaluates every width on the calling thread.
pub fn run_sequential(cfg: &SweepConfig) -> Vec<Vec<SweepRow>> {
    cfg.widths.iter().map(|&w| evaluate_width(cfg, w)).collect()
}

/// Runs the whole sweep; failed points are kept as rows with an error.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    Ok(map_widths(cfg)?.into_iter().flatten().collect())
}

/// Like [`run_sweep`] but always on the calling thread.
pub fn run_sweep_sequential(cfg: &SweepConfig) -> Vec<SweepRow> {
    run_sequential(cfg).into_iter().flatten().collect()
}
