//! Plain-text field dumps.
//!
//! ```text
//! # heslot field v1
//! kind optical
//! meta n_eff 2.2301e0
//! component ex 3
//! <x> <y> <re> <im>
//! ...
//! ```
//!
//! Numbers use Rust's shortest round-trip exponent formatting, which does
//! not depend on the locale and parses back to the identical `f64`.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::acoustic::AcousticMode;
use crate::error::{Error, Result};
use crate::mesh::Mesh2D;
use crate::optical::OpticalMode;

const MAGIC: &str = "# heslot field v1";

#[derive(Debug, Clone, PartialEq)]
pub struct FieldComponent {
    pub name: String,
    /// `(x, y, value)` samples.
    pub samples: Vec<(f64, f64, Complex64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub kind: String,
    pub meta: Vec<(String, f64)>,
    pub components: Vec<FieldComponent>,
}

impl FieldDump {
    pub fn meta(&self, key: &str) -> Option<f64> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn component(&self, name: &str) -> Option<&FieldComponent> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn write(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "kind {}", self.kind)?;
        for (k, v) in &self.meta {
            writeln!(out, "meta {k} {v:e}")?;
        }
        for c in &self.components {
            writeln!(out, "component {} {}", c.name, c.samples.len())?;
            for (x, y, z) in &c.samples {
                writeln!(out, "{x:e} {y:e} {:e} {:e}", z.re, z.im)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let mut next = || -> Result<Option<(usize, String)>> {
            match lines.next() {
                None => Ok(None),
                Some((i, Ok(l))) => Ok(Some((i + 1, l))),
                Some((i, Err(e))) => Err(Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                }),
            }
        };
        let perr = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let num = |line: usize, tok: &str| -> Result<f64> {
            tok.parse::<f64>()
                .map_err(|_| perr(line, &format!("bad number `{tok}`")))
        };

        match next()? {
            Some((_, l)) if l == MAGIC => {}
            Some((n, _)) => return Err(perr(n, "missing field-dump header")),
            None => return Err(perr(1, "empty input")),
        }
        let kind = match next()? {
            Some((n, l)) => l
                .strip_prefix("kind ")
                .map(str::to_string)
                .ok_or_else(|| perr(n, "expected `kind`"))?,
            None => return Err(perr(2, "missing `kind`")),
        };
        let mut dump = FieldDump {
            kind,
            meta: Vec::new(),
            components: Vec::new(),
        };
        while let Some((n, line)) = next()? {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["meta", k, v] => dump.meta.push((k.to_string(), num(n, v)?)),
                ["component", name, count] => {
                    let count: usize = count.parse().map_err(|_| perr(n, "bad sample count"))?;
                    let mut samples = Vec::with_capacity(count);
                    for _ in 0..count {
                        let (n, l) = next()?.ok_or_else(|| perr(n, "truncated component"))?;
                        let t: Vec<&str> = l.split_whitespace().collect();
                        if t.len() != 4 {
                            return Err(perr(n, "expected `x y re im`"));
                        }
                        samples.push((
                            num(n, t[0])?,
                            num(n, t[1])?,
                            Complex64::new(num(n, t[2])?, num(n, t[3])?),
                        ));
                    }
                    dump.components.push(FieldComponent {
                        name: name.to_string(),
                        samples,
                    });
                }
                [] => {}
                _ => return Err(perr(n, "unrecognised line")),
            }
        }
        Ok(dump)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file))
    }
}

/// Dumps the three components of an optical mode at their staggered
/// sample positions.
pub fn optical_dump(mode: &OpticalMode, mesh: &Mesh2D) -> FieldDump {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let xc = |i: usize| 0.5 * (mesh.x[i] + mesh.x[i + 1]);
    let yc = |j: usize| 0.5 * (mesh.y[j] + mesh.y[j + 1]);
    let mut ex = Vec::with_capacity(mode.ex.len());
    for j in 0..=ny {
        for i in 0..nx {
            ex.push((xc(i), mesh.y[j], mode.ex[j * nx + i]));
        }
    }
    let mut ey = Vec::with_capacity(mode.ey.len());
    for j in 0..ny {
        for i in 0..=nx {
            ey.push((mesh.x[i], yc(j), mode.ey[j * (nx + 1) + i]));
        }
    }
    let mut ez = Vec::with_capacity(mode.ez.len());
    for j in 0..=ny {
        for i in 0..=nx {
            ez.push((mesh.x[i], mesh.y[j], mode.ez[j * (nx + 1) + i]));
        }
    }
    FieldDump {
        kind: "optical".into(),
        meta: vec![
            ("n_eff".into(), mode.n_eff),
            ("wavelength".into(), mode.wavelength),
            ("eta_slot".into(), mode.slot_fraction),
        ],
        components: vec![
            FieldComponent {
                name: "ex".into(),
                samples: ex,
            },
            FieldComponent {
                name: "ey".into(),
                samples: ey,
            },
            FieldComponent {
                name: "ez".into(),
                samples: ez,
            },
        ],
    }
}

/// Dumps the normalised pressure shape at the acoustic cell centres.
pub fn acoustic_dump(mode: &AcousticMode) -> FieldDump {
    let g = &mode.grid;
    let mut p = Vec::with_capacity(mode.shape.len());
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (x, y) = g.center(i, j);
            p.push((x, y, Complex64::new(mode.shape[g.cell(i, j)], 0.0)));
        }
    }
    let mut meta = vec![
        ("omega".into(), mode.omega),
        ("m".into(), mode.order as f64),
        ("k".into(), mode.wavenumber),
    ];
    if let Some(p_zp) = mode.zero_point_pressure {
        meta.push(("p_zp".into(), p_zp));
    }
    FieldDump {
        kind: format!("acoustic-{}", mode.boundary),
        meta,
        components: vec![FieldComponent {
            name: "p".into(),
            samples: p,
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn dump_round_trips_bit_exactly(
            vals in proptest::collection::vec((any::<f64>(), -1e3f64..1e3, -1e300f64..1e300, any::<f64>()), 0..20),
            meta in -1e-30f64..1e30,
        ) {
            let samples: Vec<_> = vals
                .iter()
                .filter(|v| v.0.is_finite() && v.3.is_finite())
                .map(|&(x, y, re, im)| (x, y, Complex64::new(re, im)))
                .collect();
            let dump = FieldDump {
                kind: "optical".into(),
                meta: vec![("n_eff".into(), meta)],
                components: vec![FieldComponent { name: "ex".into(), samples }],
            };
            let text = dump.to_text();
            let back = FieldDump::read(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &dump);
            for (a, b) in back.components[0].samples.iter().zip(&dump.components[0].samples) {
                prop_assert_eq!(a.2.re.to_bits(), b.2.re.to_bits());
            }
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(FieldDump::read("nope\n".as_bytes()).is_err());
        let text = "# heslot field v1\nkind optical\ncomponent ex 2\n1e0 2e0 3e0 4e0\n";
        assert!(matches!(FieldDump::read(text.as_bytes()), Err(Error::Parse { .. })));
    }
}
