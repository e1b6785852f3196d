//! CSV and JSON serialization of sweep results.
//!
//! Both formats carry the same flat rows. Floats are written in their
//! shortest round-trip form, so reading a file back recovers every value
//! bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ncc_core::{SerCurve, SerPoint};

pub const CSV_HEADER: &str = "topology,scenario,m,rs_n,rs_k,snr_db,ser,errors,symbols,ci95,iterations,seed";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One (scenario, SNR) point. `rs_n`/`rs_k` are empty for uncoded scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub topology: String,
    pub scenario: String,
    pub m: u32,
    pub rs_n: Option<usize>,
    pub rs_k: Option<usize>,
    pub snr_db: f64,
    pub ser: f64,
    pub errors: u64,
    pub symbols: u64,
    pub ci95: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl CurveRow {
    pub fn new(curve: &SerCurve, point: &SerPoint) -> Self {
        let c = &curve.config;
        let rs = if c.scenario.uses_rs() { c.rs } else { None };
        CurveRow {
            topology: c.topology.name().to_owned(),
            scenario: c.scenario.name().to_owned(),
            m: c.m,
            rs_n: rs.map(|r| r.0),
            rs_k: rs.map(|r| r.1),
            snr_db: point.snr_db,
            ser: point.ser,
            errors: point.errors,
            symbols: point.symbols,
            ci95: point.ci95,
            iterations: point.iterations,
            seed: c.seed,
        }
    }
}

pub fn rows(curves: &[SerCurve]) -> Vec<CurveRow> {
    curves.iter().flat_map(|c| c.points.iter().map(move |p| CurveRow::new(c, p))).collect()
}

pub fn write_csv<W: Write>(w: W, rows: &[CurveRow]) -> Result<(), OutputError> {
    // Header written by hand so an empty result still has one.
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<CurveRow>, OutputError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(OutputError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header '{}'", header.join(",")),
        )));
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_json<W: Write>(mut w: W, rows: &[CurveRow]) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<CurveRow>, OutputError> {
    Ok(serde_json::from_reader(r)?)
}
