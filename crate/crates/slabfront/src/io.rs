//! CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use slabfront_core::dielectric::Table;
use slabfront_core::timedomain::{KernelEstimate, Waveform};
use slabfront_core::Complex64;

/// Read `omega,re_eps,im_eps`.
pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names != ["omega", "re_eps", "im_eps"] {
        bail!("header must be omega,re_eps,im_eps, found {}", names.join(","));
    }
    let mut t = Table { omega: Vec::new(), eps: Vec::new() };
    for (i, rec) in rdr.deserialize::<(f64, f64, f64)>().enumerate() {
        let (w, re, im) = rec.with_context(|| format!("row {}", i + 2))?;
        if let Some(prev) = t.omega.last() {
            if w <= *prev || w.is_nan() {
                bail!("row {}: omega must be strictly increasing", i + 2);
            }
        }
        t.omega.push(w);
        t.eps.push(Complex64::new(re, im));
    }
    Ok(t)
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

/// Rows of floats under a header.
pub fn write_columns(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `t,V`, with times scaled by `time_unit`.
pub fn write_waveform(path: &Path, wave: &Waveform, time_unit: f64) -> Result<()> {
    let rows = wave.times().zip(&wave.samples).map(|(t, v)| vec![t * time_unit, *v]);
    write_columns(path, &["t", "V"], rows)
}

/// `s,g`, the kernel density per unit time.
pub fn write_kernel(path: &Path, k: &KernelEstimate, time_unit: f64) -> Result<()> {
    let rows = k.density.iter().enumerate().map(|(j, g)| vec![k.time(j) * time_unit, g / time_unit]);
    write_columns(path, &["s", "g"], rows)
}

/// `re_zeta,im_zeta,re_value,im_value`.
pub fn write_landscape(path: &Path, samples: &[(Complex64, Complex64)], freq_unit: f64) -> Result<()> {
    let rows = samples.iter().map(|(z, v)| vec![z.re * freq_unit, z.im * freq_unit, v.re, v.im]);
    write_columns(path, &["re_zeta", "im_zeta", "re_value", "im_value"], rows)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
