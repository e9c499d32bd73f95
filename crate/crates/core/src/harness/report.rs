//! CSV tables and the `ndgs-report/1` JSON summary.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::field_io::sha256_file;
use super::fit::RateFit;
use super::sweep::SweepRecord;
use super::HarnessError;

pub const SCHEMA_ID: &str = "ndgs-report/1";

pub const COLUMNS: [&str; 17] = [
    "c",
    "omega_c",
    "gap",
    "e_c",
    "g_norm_s0",
    "g_norm_s1",
    "g_norm_s1_5",
    "g_norm_s2",
    "neg_norm_l2",
    "neg_grad_l2",
    "orbit_dist",
    "pohozaev",
    "el_residual",
    "decay_delta_plus",
    "decay_ratio_minus",
    "h2_norm",
    "wall_time",
];

impl SweepRecord {
    pub fn values(&self) -> [f64; 17] {
        [
            self.c,
            self.omega_c,
            self.gap,
            self.e_c,
            self.g_norm_s0,
            self.g_norm_s1,
            self.g_norm_s1_5,
            self.g_norm_s2,
            self.neg_norm_l2,
            self.neg_grad_l2,
            self.orbit_dist,
            self.pohozaev,
            self.el_residual,
            self.decay_delta_plus,
            self.decay_ratio_minus,
            self.h2_norm,
            self.wall_time,
        ]
    }

    /// Inverse of [`SweepRecord::values`].
    pub fn from_values(v: [f64; 17]) -> Self {
        let [c, omega_c, gap, e_c, g_norm_s0, g_norm_s1, g_norm_s1_5, g_norm_s2, neg_norm_l2, neg_grad_l2, orbit_dist, pohozaev, el_residual, decay_delta_plus, decay_ratio_minus, h2_norm, wall_time] = v;
        Self {
            c,
            omega_c,
            gap,
            e_c,
            g_norm_s0,
            g_norm_s1,
            g_norm_s1_5,
            g_norm_s2,
            neg_norm_l2,
            neg_grad_l2,
            orbit_dist,
            pohozaev,
            el_residual,
            decay_delta_plus,
            decay_ratio_minus,
            h2_norm,
            wall_time,
        }
    }
}

/// Writes one row per record; floats carry 17 significant digits.
pub fn write_csv(w: impl Write, records: &[SweepRecord]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COLUMNS)?;
    for r in records {
        out.write_record(r.values().iter().map(|v| format!("{v:.16e}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Vec<SweepRecord>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(HarnessError::BadSweep(format!("unexpected CSV header {header:?}")));
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: RateFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `≤ 1e-10`.
    pub condition: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub status: Status,
    pub records: usize,
    pub fits: Vec<NamedFit>,
    pub tolerances: BTreeMap<String, f64>,
    pub criteria: Vec<CriterionRecord>,
    pub settings: serde_json::Value,
    pub fields: Vec<FieldEntry>,
}

/// Everything besides the records that goes into the JSON summary.
#[derive(Debug, Clone, Default)]
pub struct ReportInput {
    pub fits: Vec<NamedFit>,
    pub tolerances: BTreeMap<String, f64>,
    pub criteria: Vec<CriterionRecord>,
    pub settings: serde_json::Value,
    pub field_files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn build_report(records: &[SweepRecord], input: ReportInput) -> Result<Report, HarnessError> {
    let status = if input.fits.is_empty() {
        Status::Incomplete
    } else if input.criteria.iter().all(|c| c.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    let fields = input
        .field_files
        .iter()
        .map(|p| {
            Ok(FieldEntry {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<_, std::io::Error>>()?;
    Ok(Report {
        schema: SCHEMA_ID.into(),
        status,
        records: records.len(),
        fits: input.fits,
        tolerances: input.tolerances,
        criteria: input.criteria,
        settings: input.settings,
        fields,
    })
}

/// Writes `sweep.csv` and `report.json` into `dir`.
pub fn emit_report(records: &[SweepRecord], input: ReportInput, dir: impl AsRef<Path>) -> Result<ReportPaths, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::BadSweep("no records to report".into()));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("sweep.csv");
    write_csv(BufWriter::new(File::create(&csv)?), records)?;
    let report = build_report(records, input)?;
    let json = dir.join("report.json");
    let mut w = BufWriter::new(File::create(&json)?);
    serde_json::to_writer_pretty(&mut w, &report)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(ReportPaths { csv, json })
}
