//! CSV emission. Frequencies and rates are reported as ordinary
//! frequencies (`x / 2 pi`, Hz); numbers use nine significant digits in
//! scientific notation.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::materials::rad_to_hz;

use super::SweepRow;

pub const CSV_HEADER: [&str; 17] = [
    "width_m",
    "bc",
    "n_eff",
    "eta_slot",
    "m_opt",
    "m_ac",
    "omega_B_Hz",
    "g0_Hz",
    "kappa_Hz",
    "Q_ac",
    "Gamma_Hz",
    "C0",
    "P_th_W",
    "T_K",
    "n_m",
    "sideband_resolved",
    "status",
];

pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn record(row: &SweepRow) -> Vec<String> {
    let mut out = vec![sci(row.width), row.boundary.to_string()];
    match &row.outcome {
        Ok(r) => {
            out.extend([
                sci(r.n_eff),
                sci(r.eta_slot),
                r.m_opt.to_string(),
                r.m_ac.to_string(),
                sci(rad_to_hz(r.omega_b)),
                sci(rad_to_hz(r.g0)),
                sci(row.kappa_hz),
                sci(r.q_ac),
                sci(rad_to_hz(r.gamma)),
                sci(r.c0),
                sci(r.p_th),
                sci(r.temperature),
                sci(r.n_m),
                r.sideband_resolved.to_string(),
                "ok".to_string(),
            ]);
        }
        Err(e) => {
            out.extend(std::iter::repeat_n(String::new(), 6));
            out.extend([
                sci(row.kappa_hz),
                sci(row.q_ac),
                String::new(),
                String::new(),
                String::new(),
            ]);
            out.extend([sci(row.temperature), String::new(), String::new()]);
            out.push(format!("failed: {}", e.replace(['\n', '\r'], " ")));
        }
    }
    out
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let wrap = |e: csv::Error| Error::State(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(wrap)?;
    for row in rows {
        w.write_record(record(row)).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::State(format!("csv: {e}")))?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8")
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain("no sweep rows to write"));
    }
    std::fs::write(path, csv_string(rows)).map_err(|e| Error::io(path, e))
}
