//! Observation files and per-coordinate interval records.
//!
//! Input is either one real per line or a single-column CSV whose header is `x`.
//! Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posterior::{ObservationVector, Posterior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn parse_observations(text: &str) -> Result<ObservationVector> {
    let mut values = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header && values.is_empty() && line.trim_matches('"').eq_ignore_ascii_case("x") {
            seen_header = true;
            continue;
        }
        if line.contains(',') {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected a single column, found `{line}`"),
            });
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("not a real number: `{line}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite value `{line}`"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Empty);
    }
    ObservationVector::new(values)
}

pub fn read_observations(path: impl AsRef<Path>) -> Result<ObservationVector> {
    parse_observations(&fs::read_to_string(path)?)
}

/// One plotted coordinate: observation, marginal median and credible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub index: usize,
    pub x: f64,
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
    pub inclusion_prob: f64,
}

impl IntervalRecord {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

pub fn interval_records(post: &Posterior) -> Result<Vec<IntervalRecord>> {
    let (median, lo, hi) = post.medians_and_intervals()?;
    Ok(post
        .observations()
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &x)| IntervalRecord {
            index: i,
            x,
            median: median[i],
            lo: lo[i],
            hi: hi[i],
            inclusion_prob: post.inclusion_prob()[i],
        })
        .collect())
}

pub fn write_records<W: Write, T: Serialize>(records: &[T], format: OutputFormat, mut w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            for r in records {
                wtr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
            }
            wtr.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, records).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Fit on the observations in `input` and write interval records to `output`.
///
/// The input is parsed and the posterior computed before `output` is created,
/// so a bad input never leaves a partial file behind.
pub fn emit_interval_data(
    input: impl AsRef<Path>,
    prior: &crate::harness::PriorSpec,
    slab: &crate::harness::SlabSpec,
    output: impl AsRef<Path>,
    format: OutputFormat,
) -> Result<Vec<IntervalRecord>> {
    let x = read_observations(input)?;
    let post = Posterior::fit(&x, &prior.build(x.len())?, &slab.build()?, Default::default())?;
    let records = interval_records(&post)?;
    let mut buf = Vec::new();
    write_records(&records, format, &mut buf)?;
    fs::write(output, buf)?;
    Ok(records)
}
