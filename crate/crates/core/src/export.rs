//! CSV and JSON exports of densities, trials and summaries.
//!
//! CSV files are RFC 4180 with a mandatory header row; JSON documents carry a
//! `schema_version` field.

use crate::classical::GaussianMixtureDensity;
use crate::config::ComplexSpec;
use crate::density::ReadingDensity;
use crate::error::{Error, Result};
use crate::montecarlo::{SampleSummary, TrialRecord};
use crate::pointer::{Slot, ALL_SLOTS};
use crate::quantum::CoherentGaussianDensity;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const SCHEMA_VERSION: u32 = 1;

/// Uniform grid of `points` samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 || !(start < stop) {
            return Err(Error::InvalidArgument(format!(
                "bad grid [{start}, {stop}] with {points} points"
            )));
        }
        Ok(GridSpec {
            start,
            stop,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.step();
        (0..self.points).map(move |i| self.start + step * i as f64)
    }
}

/// Default export window for one continuous slot: the term shifts padded by
/// four widths on both sides, so the truncated tail mass is far below 1e-6.
pub fn default_grid(density: &dyn ReadingDensity, slot: Slot, points: usize) -> Result<GridSpec> {
    let (lo, hi) = density.shift_range(slot)?;
    let width = density.width_of_slot(slot)?;
    GridSpec::new(lo - 4.0 * width, hi + 4.0 * width, points)
}

trait WidthLookup {
    fn width_of_slot(&self, slot: Slot) -> Result<f64>;
}

impl WidthLookup for dyn ReadingDensity + '_ {
    fn width_of_slot(&self, slot: Slot) -> Result<f64> {
        self.continuous_slots()
            .iter()
            .position(|&s| s == slot)
            .map(|i| self.continuous_widths()[i])
            .ok_or(Error::UnknownSlot(slot))
    }
}

/// Emit a gridded density as CSV: one reading-coordinate column per active
/// slot (continuous and accurate, in slot order) and a final `density` column.
/// Rows enumerate each accurate-reading combination over the cartesian product
/// of the continuous grids; the value is the joint density (continuous density
/// times discrete mass), so the whole file integrates and sums to one.
pub fn write_density_csv<W: Write>(
    out: W,
    density: &dyn ReadingDensity,
    grids: &[GridSpec],
) -> Result<()> {
    let continuous = density.continuous_slots().to_vec();
    let accurate = density.accurate_slots().to_vec();
    if grids.len() != continuous.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} grids, got {}",
            continuous.len(),
            grids.len()
        )));
    }
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<(Slot, bool)> = continuous
        .iter()
        .map(|&s| (s, true))
        .chain(accurate.iter().map(|&s| (s, false)))
        .collect();
    header.sort_by_key(|(s, _)| *s);
    let mut columns: Vec<String> = header.iter().map(|(s, _)| s.label().to_string()).collect();
    columns.push("density".into());
    writer
        .write_record(&columns)
        .map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;

    let outcomes = if accurate.is_empty() {
        vec![Vec::new()]
    } else {
        density.discrete_outcomes()
    };
    let mut point = vec![0.0; continuous.len()];
    for outcome in &outcomes {
        write_rows_rec(
            &mut writer,
            density,
            grids,
            &header,
            &continuous,
            &accurate,
            outcome,
            0,
            &mut point,
        )?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidArgument(format!("csv flush failed: {e}")))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_rows_rec<W: Write>(
    writer: &mut csv::Writer<W>,
    density: &dyn ReadingDensity,
    grids: &[GridSpec],
    header: &[(Slot, bool)],
    continuous: &[Slot],
    accurate: &[Slot],
    outcome: &[u8],
    dim: usize,
    point: &mut Vec<f64>,
) -> Result<()> {
    if dim == grids.len() {
        let value = density.value_given(point, outcome);
        let mut record: Vec<String> = Vec::with_capacity(header.len() + 1);
        for (slot, is_continuous) in header {
            if *is_continuous {
                let i = continuous.iter().position(|s| s == slot).unwrap();
                record.push(format_float(point[i]));
            } else {
                let i = accurate.iter().position(|s| s == slot).unwrap();
                record.push(outcome[i].to_string());
            }
        }
        record.push(format_float(value));
        writer
            .write_record(&record)
            .map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
        return Ok(());
    }
    let values: Vec<f64> = grids[dim].values().collect();
    for v in values {
        point[dim] = v;
        write_rows_rec(
            writer, density, grids, header, continuous, accurate, outcome,
            dim + 1, point,
        )?;
    }
    Ok(())
}

/// Shortest round-trippable decimal representation.
pub fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Serializable density document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityJson {
    pub schema_version: u32,
    pub kind: String,
    pub continuous_slots: Vec<u8>,
    pub widths: Vec<f64>,
    pub accurate_slots: Vec<u8>,
    /// Classical: probability that a raw trial passes selection.
    /// Quantum: normalization of the squared coherent sum.
    pub norm: f64,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff: Option<ComplexSpec>,
    pub shifts: Vec<f64>,
    pub discrete: Vec<u8>,
}

pub fn classical_density_json(density: &GaussianMixtureDensity) -> DensityJson {
    DensityJson {
        schema_version: SCHEMA_VERSION,
        kind: "classical".into(),
        continuous_slots: density.continuous_slots().iter().map(|s| s.index()).collect(),
        widths: density.continuous_widths().to_vec(),
        accurate_slots: density.accurate_slots().iter().map(|s| s.index()).collect(),
        norm: density.acceptance_probability(),
        terms: density
            .terms()
            .iter()
            .map(|t| TermJson {
                weight: Some(t.weight),
                coeff: None,
                shifts: t.shifts.clone(),
                discrete: t.discrete.clone(),
            })
            .collect(),
    }
}

pub fn quantum_density_json(density: &CoherentGaussianDensity) -> DensityJson {
    DensityJson {
        schema_version: SCHEMA_VERSION,
        kind: "quantum".into(),
        continuous_slots: density.continuous_slots().iter().map(|s| s.index()).collect(),
        widths: density.continuous_widths().to_vec(),
        accurate_slots: density.accurate_slots().iter().map(|s| s.index()).collect(),
        norm: density.norm(),
        terms: density
            .terms()
            .iter()
            .map(|t| TermJson {
                weight: None,
                coeff: Some(t.coeff.into()),
                shifts: t.shifts.clone(),
                discrete: t.discrete.clone(),
            })
            .collect(),
    }
}

/// Trial dump: one row per trial with the trial index, the selected flag and
/// the five reading columns (blank where no pointer is coupled).
pub fn write_trials_csv<W: Write>(out: W, trials: &[TrialRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["trial".to_string(), "selected".to_string()];
    header.extend(ALL_SLOTS.iter().map(|s| s.label().to_string()));
    writer
        .write_record(&header)
        .map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
    for (i, t) in trials.iter().enumerate() {
        let mut record = vec![i.to_string(), (t.selected as u8).to_string()];
        for slot in ALL_SLOTS {
            record.push(match t.readings.get(&slot) {
                Some(crate::montecarlo::Reading::Continuous(f)) => format_float(*f),
                Some(crate::montecarlo::Reading::Discrete(d)) => d.to_string(),
                None => String::new(),
            });
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidArgument(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Summary document wrapper with the schema version.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryJson<'a> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub summary: &'a SampleSummary,
}

pub fn summary_json(summary: &SampleSummary) -> SummaryJson<'_> {
    SummaryJson {
        schema_version: SCHEMA_VERSION,
        summary,
    }
}
