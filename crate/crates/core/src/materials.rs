//! Physical constants, material records and material-level figures of merit.
//!
//! All quantities are SI. Angular frequencies are carried in rad/s throughout
//! the crate; [`rad_to_hz`] and [`hz_to_rad`] convert at the edges.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// CODATA 2018 values (the SI-exact ones are exact by definition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Speed of light in vacuum, m/s.
    pub c0: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    c0: 299_792_458.0,
    eps0: 8.854_187_812_8e-12,
};

pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

/// Optical angular frequency for a vacuum wavelength.
pub fn optical_omega(wavelength: f64) -> f64 {
    2.0 * PI * CONSTANTS.c0 / wavelength
}

/// Mechanical properties of a medium that carries sound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acoustics {
    /// Mass density, kg/m^3.
    pub density: f64,
    /// Sound speed, m/s.
    pub sound_speed: f64,
    /// Bulk modulus, Pa.
    pub bulk_modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Refractive index at the design wavelength.
    pub index: f64,
    /// Relative permittivity, `index^2`.
    pub permittivity: f64,
    pub acoustics: Option<Acoustics>,
}

impl Material {
    pub fn new(name: impl Into<String>, index: f64, acoustics: Option<Acoustics>) -> Result<Self> {
        let name = name.into();
        if !(index.is_finite() && index >= 1.0) {
            return Err(Error::domain(format!(
                "material `{name}`: refractive index {index} < 1"
            )));
        }
        if let Some(a) = acoustics {
            if !(a.density > 0.0 && a.sound_speed > 0.0 && a.bulk_modulus > 0.0) {
                return Err(Error::domain(format!(
                    "material `{name}`: acoustic properties must be positive"
                )));
            }
        }
        Ok(Material {
            name,
            index,
            permittivity: index * index,
            acoustics,
        })
    }

    pub fn electrostrictive_constant(&self) -> f64 {
        // index >= 1 is enforced at construction
        electrostrictive_constant(self.permittivity).unwrap_or(0.0)
    }

    /// `gamma_e / sqrt(K)`, or `None` when the material carries no sound.
    pub fn figure_of_merit(&self) -> Option<f64> {
        let k = self.acoustics?.bulk_modulus;
        material_fom(self.electrostrictive_constant(), k).ok()
    }

    pub fn bulk_modulus(&self) -> Option<f64> {
        self.acoustics.map(|a| a.bulk_modulus)
    }

    pub fn sound_speed(&self) -> Option<f64> {
        self.acoustics.map(|a| a.sound_speed)
    }
}

/// Clausius-Mossotti electrostrictive constant `(eps - 1)(eps + 2)/3`.
pub fn electrostrictive_constant(permittivity: f64) -> Result<f64> {
    if !(permittivity >= 1.0) {
        return Err(Error::domain(format!(
            "non-physical relative permittivity {permittivity} < 1"
        )));
    }
    Ok((permittivity - 1.0) * (permittivity + 2.0) / 3.0)
}

/// Permittivity change per unit strain energy, `gamma_e / sqrt(K)` in Pa^-1/2.
pub fn material_fom(gamma_e: f64, bulk_modulus: f64) -> Result<f64> {
    if !(bulk_modulus > 0.0) {
        return Err(Error::domain(format!(
            "bulk modulus must be positive, got {bulk_modulus}"
        )));
    }
    Ok(gamma_e / bulk_modulus.sqrt())
}

const REL_TOL_MODULUS: f64 = 1e-9;
const KEYS: [&str; 5] = ["name", "n", "rho", "c", "K"];

/// An ordered, immutable collection of materials keyed by name.
#[derive(Debug, Clone, Default)]
pub struct MaterialTable {
    materials: BTreeMap<String, Material>,
}

impl MaterialTable {
    /// Parses the plain-text material format (see `data/materials.txt`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut materials = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let perr = |message: String| Error::Parse { line: lineno, message };
            let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
            for tok in line.split_whitespace() {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| perr(format!("expected key=value, got `{tok}`")))?;
                if !KEYS.contains(&k) {
                    return Err(perr(format!("unknown key `{k}` (allowed: {})", KEYS.join(", "))));
                }
                if fields.insert(k, v).is_some() {
                    return Err(perr(format!("duplicate key `{k}`")));
                }
            }
            let name = *fields.get("name").ok_or_else(|| perr("missing `name`".into()))?;
            let num = |key: &str| -> Result<Option<f64>> {
                fields
                    .get(key)
                    .map(|v| {
                        v.parse::<f64>()
                            .map_err(|_| perr(format!("`{key}` is not a number: `{v}`")))
                    })
                    .transpose()
            };
            let index = num("n")?.ok_or_else(|| perr("missing `n`".into()))?;
            let acoustics = match (num("rho")?, num("c")?, num("K")?) {
                (None, None, None) => None,
                (Some(rho), Some(c), None) => Some((rho, c, rho * c * c)),
                (Some(rho), None, Some(k)) => Some((rho, (k / rho).sqrt(), k)),
                (None, Some(c), Some(k)) => Some((k / (c * c), c, k)),
                (Some(rho), Some(c), Some(k)) => {
                    let derived = rho * c * c;
                    if ((derived - k) / k).abs() > REL_TOL_MODULUS {
                        return Err(perr(format!("K = {k} disagrees with rho*c^2 = {derived}")));
                    }
                    Some((rho, c, k))
                }
                _ => return Err(perr("acoustic data needs at least two of rho, c, K".into())),
            }
            .map(|(density, sound_speed, bulk_modulus)| Acoustics {
                density,
                sound_speed,
                bulk_modulus,
            });
            let material = Material::new(name, index, acoustics).map_err(|e| perr(e.to_string()))?;
            if materials.insert(name.to_string(), material).is_some() {
                return Err(perr(format!("duplicate material `{name}`")));
            }
        }
        Ok(MaterialTable { materials })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static MaterialTable {
        static TABLE: OnceLock<MaterialTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            MaterialTable::parse(include_str!("../data/materials.txt")).expect("bundled material table is valid")
        })
    }

    pub fn get(&self, name: &str) -> Result<&Material> {
        self.materials.get(name).ok_or_else(|| Error::NotFound {
            what: "material",
            name: name.to_string(),
            available: self.names().map(str::to_string).collect(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Material> {
        self.materials.values()
    }
}

/// Looks up one of the bundled materials: silicon, silica, helium, vacuum.
pub fn builtin_material(name: &str) -> Result<Material> {
    MaterialTable::builtin().get(name).cloned()
}
