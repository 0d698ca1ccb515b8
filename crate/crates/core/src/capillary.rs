//! Energy balance for capillary filling of the slot by the superfluid film.
//!
//! Model: before filling, the slot walls carry a film of thickness `d`;
//! after filling, the slot is full up to its top. Filling removes the two
//! free film surfaces on the lateral walls (height `h - d` each) and adds a
//! free surface of width `w` across the top. It also places fluid in the
//! core region farther than `d` from every wall, where the potential
//! `alpha / z^3` of each of the three walls (two sidewalls and the floor) is
//! summed. Per unit slot length:
//!
//! ```text
//! dE(d) = sigma (w - 2 (h - d))
//!       + alpha (h - d) (1/d^2 - 1/(w - d)^2)       two sidewalls
//!       + alpha (w - 2d) (1/(2 d^2) - 1/(2 h^2))   floor
//! ```
//!
//! `dE < 0` means filling is favoured.

use std::fmt;

use crate::error::{Error, Result};

/// Liquid helium-4 surface tension near 0 K, N/m.
pub const HELIUM_SURFACE_TENSION: f64 = 3.78e-4;

/// Van der Waals coefficient of the film potential per unit volume,
/// `rho * alpha'` with `alpha' = 2.6e-24 J m^3 / kg` and `rho = 145 kg/m^3`, J.
pub const HELIUM_VDW_COEFFICIENT: f64 = 145.0 * 2.6e-24;

/// Bisection tolerance on the film thickness, m.
pub const THICKNESS_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapillaryModel {
    /// J
    pub vdw_coefficient: f64,
    /// N/m
    pub surface_tension: f64,
    pub slot_width: f64,
    pub slot_height: f64,
    pub film_thickness: f64,
}

impl CapillaryModel {
    pub fn helium(slot_width: f64, slot_height: f64, film_thickness: f64) -> Self {
        CapillaryModel {
            vdw_coefficient: HELIUM_VDW_COEFFICIENT,
            surface_tension: HELIUM_SURFACE_TENSION,
            slot_width,
            slot_height,
            film_thickness,
        }
    }

    pub fn with_thickness(&self, d: f64) -> Self {
        CapillaryModel {
            film_thickness: d,
            ..*self
        }
    }

    /// Largest thickness for which the model is defined.
    pub fn max_thickness(&self) -> f64 {
        (0.5 * self.slot_width).min(self.slot_height)
    }

    fn validate(&self) -> Result<()> {
        if !(self.vdw_coefficient >= 0.0 && self.surface_tension >= 0.0) {
            return Err(Error::domain(
                "surface tension and vdW coefficient must be non-negative",
            ));
        }
        if !(self.slot_width > 0.0 && self.slot_height > 0.0 && self.film_thickness > 0.0) {
            return Err(Error::domain("slot size and film thickness must be positive"));
        }
        if self.film_thickness >= self.max_thickness() {
            return Err(Error::domain(format!(
                "film thickness {:e} m leaves no unfilled core in a {:e} x {:e} m slot",
                self.film_thickness, self.slot_width, self.slot_height
            )));
        }
        Ok(())
    }
}

/// `E_filled - E_unfilled` per unit slot length, J/m.
pub fn fill_energy_delta(model: &CapillaryModel) -> Result<f64> {
    model.validate()?;
    let CapillaryModel {
        vdw_coefficient: a,
        surface_tension: s,
        slot_width: w,
        slot_height: h,
        film_thickness: d,
    } = *model;
    let surface = s * (w - 2.0 * (h - d));
    let walls = a * (h - d) * (1.0 / (d * d) - 1.0 / ((w - d) * (w - d)));
    let floor = a * (w - 2.0 * d) * 0.5 * (1.0 / (d * d) - 1.0 / (h * h));
    Ok(surface + walls + floor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FillTransition {
    /// Filling is favoured for films thicker than this, m.
    Root(f64),
    AlwaysFilled,
    NeverFilled,
}

/// Film thickness at which `fill_energy_delta` changes sign, searched over
/// `(0, min(w/2, h))`.
pub fn fill_transition_thickness(model: &CapillaryModel) -> Result<FillTransition> {
    let top = model.max_thickness();
    let lo = (1e-3 * top).min(1e-12);
    let hi = top * (1.0 - 1e-9);
    let f = |d: f64| fill_energy_delta(&model.with_thickness(d));
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    match (fa < 0.0, fb < 0.0) {
        (true, true) => return Ok(FillTransition::AlwaysFilled),
        (false, false) => return Ok(FillTransition::NeverFilled),
        (true, false) => {
            return Err(Error::domain(
                "filling favoured only for thin films; energy balance is not monotone",
            ))
        }
        (false, true) => {}
    }
    while b - a > THICKNESS_TOLERANCE {
        let mid = 0.5 * (a + b);
        if f(mid)? < 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(FillTransition::Root(0.5 * (a + b)))
}

/// Advisory filling state at a given film thickness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapillaryState {
    Filled,
    Empty,
    /// Outside the model's validity range.
    Unknown,
}

impl fmt::Display for CapillaryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapillaryState::Filled => "yes",
            CapillaryState::Empty => "no",
            CapillaryState::Unknown => "unknown",
        })
    }
}

pub fn capillary_state(model: &CapillaryModel) -> CapillaryState {
    match fill_energy_delta(model) {
        Ok(e) if e < 0.0 => CapillaryState::Filled,
        Ok(_) => CapillaryState::Empty,
        Err(_) => CapillaryState::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn default_model() -> CapillaryModel {
        CapillaryModel::helium(50e-9, 220e-9, 2e-9)
    }

    fn root(m: &CapillaryModel) -> f64 {
        match fill_transition_thickness(m).unwrap() {
            FillTransition::Root(d) => d,
            other => panic!("no root: {other:?}"),
        }
    }

    #[test]
    fn default_transition_is_nanometre_scale() {
        let d = root(&default_model());
        assert!((0.5e-9..10e-9).contains(&d), "{d}");
    }

    #[test]
    fn no_surface_tension_never_fills() {
        let m = CapillaryModel {
            surface_tension: 0.0,
            ..default_model()
        };
        for d in [0.5e-9, 2e-9, 10e-9, 24e-9] {
            assert!(fill_energy_delta(&m.with_thickness(d)).unwrap() > 0.0);
        }
        assert_eq!(fill_transition_thickness(&m).unwrap(), FillTransition::NeverFilled);
    }

    #[test]
    fn deep_slot_fills_at_small_thickness() {
        let m = CapillaryModel {
            surface_tension: 1e-2,
            ..CapillaryModel::helium(20e-9, 2e-6, 1e-9)
        };
        assert!(fill_energy_delta(&m).unwrap() < 0.0);
        assert_eq!(capillary_state(&m), CapillaryState::Filled);
    }

    #[test]
    fn thick_film_is_invalid() {
        let m = default_model().with_thickness(25e-9);
        assert!(fill_energy_delta(&m).is_err());
        assert_eq!(capillary_state(&m), CapillaryState::Unknown);
    }

    #[test]
    fn root_satisfies_energy_balance() {
        let m = default_model();
        let d = root(&m);
        assert!(fill_energy_delta(&m.with_thickness(d - THICKNESS_TOLERANCE)).unwrap() > 0.0);
        assert!(fill_energy_delta(&m.with_thickness(d + THICKNESS_TOLERANCE)).unwrap() < 0.0);
    }

    #[test]
    fn transition_moves_with_constants() {
        let m = default_model();
        let d0 = root(&m);
        let stiffer = CapillaryModel {
            surface_tension: 2.0 * m.surface_tension,
            ..m
        };
        let stickier = CapillaryModel {
            vdw_coefficient: 2.0 * m.vdw_coefficient,
            ..m
        };
        assert!(root(&stiffer) < d0);
        assert!(root(&stickier) > d0);
    }

    proptest! {
        #[test]
        fn energy_monotone_in_constants(s in 1e-5f64..1e-2, a in 1e-23f64..1e-20, d in 0.3e-9f64..20e-9) {
            let m = CapillaryModel { surface_tension: s, vdw_coefficient: a, ..default_model().with_thickness(d) };
            let e = fill_energy_delta(&m).unwrap();
            let more_s = fill_energy_delta(&CapillaryModel { surface_tension: 1.1 * s, ..m }).unwrap();
            let more_a = fill_energy_delta(&CapillaryModel { vdw_coefficient: 1.1 * a, ..m }).unwrap();
            // the surface term is negative whenever h - d > w / 2
            prop_assert!(more_s < e);
            prop_assert!(more_a > e);
        }
    }
}
