//! Analysis report and its deterministic JSON/CSV rendering.
//!
//! All floating-point output is rounded to 12 significant digits so that
//! reports are byte-stable across platforms.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::analysis::ResolvedConfig;
use crate::eigsub::SubspacePartition;
use crate::error::Result;
use crate::gse::{BoundaryCode, MemoryEstimate};
use crate::inference::{GapRow, TestResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Text form used in CSV output.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    format!("{}", round_sig(x))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) => {
            if num.is_f64() {
                if let Some(x) = num.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                        *num = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded; key order follows field order.
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub n_input: usize,
    /// Length after differencing.
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub m: usize,
    pub m_n: usize,
    /// Identification threshold `C m_n^{−1/2+ε}`.
    pub threshold: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnEstimate {
    /// 1-based eigenvector (or input column) index.
    pub column: usize,
    pub d_hat: f64,
    pub se: f64,
    pub m_n: usize,
    pub band: (usize, usize),
    pub converged: bool,
    pub boundary: Option<BoundaryCode>,
}

impl ColumnEstimate {
    pub fn from_estimates(est: &[MemoryEstimate]) -> Vec<Self> {
        est.iter()
            .enumerate()
            .map(|(i, e)| ColumnEstimate {
                column: i + 1,
                d_hat: e.d_hat,
                se: e.se,
                m_n: e.m_n,
                band: e.band,
                converged: e.converged,
                boundary: e.boundary,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct BandwidthDiagnostics {
    pub assumed_rho: f64,
    /// `m_n^{1+2ρ} log² m_n / n^{2ρ}` at the assumed smoothness.
    pub smoothness_ratio: f64,
    pub gap_guess: Option<f64>,
    /// Same ratio with `ξ = min(gap_guess, ρ)`.
    pub separation_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Diagnostics {
    pub gaps: Vec<GapRow>,
    /// 1-based columns whose estimate hit the interval boundary.
    pub boundary_columns: Vec<usize>,
    pub ill_conditioned: bool,
    /// Some identified boundary has an observed gap ≤ 0.5.
    pub small_gap: bool,
    pub warnings: Vec<String>,
    pub bandwidth: BandwidthDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CointegrationReport {
    /// `subspace` or `gse_only`.
    pub mode: String,
    pub metadata: Metadata,
    pub config: ResolvedConfig,
    pub eigenvalues: Vec<f64>,
    /// Estimated cointegrating vectors, one inner vector per eigenvector.
    pub eigenvectors: Vec<Vec<f64>>,
    pub memory: Vec<ColumnEstimate>,
    pub partition: Option<SubspacePartition>,
    pub partition_source: Option<String>,
    pub test: Option<TestResult>,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub per_frequency: Vec<Vec<Complex64>>,
}

impl CointegrationReport {
    pub fn to_json(&self) -> String {
        to_stable_json(self)
    }

    /// Write `report.json` plus plot-ready CSV blocks into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;

        let mut eig = String::from("index,eigenvalue\n");
        for (j, v) in self.eigenvalues.iter().enumerate() {
            eig.push_str(&format!("{},{}\n", j + 1, fmt_sig(*v)));
        }
        fs::write(dir.join("eigenvalues.csv"), eig)?;

        let q = self.eigenvectors.len();
        let mut vecs = (1..=q).map(|j| format!("v{j}")).collect::<Vec<_>>().join(",");
        vecs.push('\n');
        for i in 0..q {
            let row: Vec<String> = self.eigenvectors.iter().map(|col| fmt_sig(col[i])).collect();
            vecs.push_str(&row.join(","));
            vecs.push('\n');
        }
        fs::write(dir.join("eigenvectors.csv"), vecs)?;

        let mut mem = String::from("column,d_hat,se,m_n,band_first,band_last,converged\n");
        for e in &self.memory {
            mem.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.column,
                fmt_sig(e.d_hat),
                fmt_sig(e.se),
                e.m_n,
                e.band.0,
                e.band.1,
                e.converged
            ));
        }
        fs::write(dir.join("memory.csv"), mem)?;

        let mut gaps = String::from("position,gap,threshold,boundary,negative\n");
        for g in &self.diagnostics.gaps {
            gaps.push_str(&format!(
                "{},{},{},{},{}\n",
                g.position,
                fmt_sig(g.gap),
                fmt_sig(g.threshold),
                g.boundary,
                g.negative
            ));
        }
        fs::write(dir.join("gaps.csv"), gaps)?;

        if !self.per_frequency.is_empty() {
            let mut dft = String::from("j,series,re,im\n");
            for (j, vals) in self.per_frequency.iter().enumerate() {
                for (c, v) in vals.iter().enumerate() {
                    dft.push_str(&format!("{},{},{},{}\n", j + 1, c + 1, fmt_sig(v.re), fmt_sig(v.im)));
                }
            }
            fs::write(dir.join("dft.csv"), dft)?;
        }
        Ok(())
    }
}
