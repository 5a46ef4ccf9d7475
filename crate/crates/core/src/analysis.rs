//! Full analysis pipeline: difference → taper → averaged periodogram →
//! eigendecomposition → residuals → per-column memory estimates →
//! identification → test.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::eigsub::{eig_sym_desc, residual_series, SubspacePartition};
use crate::error::{Error, Result, Stage, StageExt};
use crate::gse::{default_bandwidth, default_theta, gse_estimate, GseConfig, MemoryEstimate};
use crate::inference::{cointegration_test, identify_with_diagnostics, IdentificationRule};
use crate::kv::KvMap;
use crate::report::{BandwidthDiagnostics, ColumnEstimate, CointegrationReport, Diagnostics, Metadata};
use crate::spectral::{averaged_periodogram_with, difference, BandwidthCheck, SeriesMatrix, TaperSpec};

/// Smoothness exponent assumed for the short-memory transfer function.
pub const ASSUMED_RHO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// Levels; `p − 1` differences are taken before analysis.
    Levels,
    /// Already the stationary `(p − 1)`-th differences.
    #[default]
    Stationary,
}

impl std::str::FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "levels" => Ok(InputKind::Levels),
            "stationary" => Ok(InputKind::Stationary),
            other => Err(Error::arg("kind", format!("expected levels or stationary, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Bandwidth {
    /// `⌊n^{0.6}⌋`.
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        s.parse::<usize>()
            .map(Bandwidth::Fixed)
            .map_err(|_| Error::arg("mn", format!("expected a positive integer or auto, got {s:?}")))
    }
}

/// User-facing configuration; every field is optional so that CLI flags,
/// a config file and defaults can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisConfig {
    pub input_path: Option<PathBuf>,
    pub input_kind: Option<InputKind>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub m_n: Option<Bandwidth>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub epsilon: Option<f64>,
    pub omit_low: Option<bool>,
    pub partition_override: Option<SubspacePartition>,
    pub output_path: Option<PathBuf>,
    pub gse_only: Option<bool>,
    pub allow_small_m: Option<bool>,
    /// Guess of the smallest memory gap, echoed against the bandwidth.
    pub gap_guess: Option<f64>,
}

const CONFIG_KEYS: &[&str] = &[
    "input", "kind", "p", "m", "mn", "delta1", "delta2", "alpha", "c", "epsilon", "omit_low",
    "partition", "out", "gse_only", "allow_small_m", "gap_guess",
];

impl AnalysisConfig {
    pub fn from_kv(kv: &KvMap) -> Result<Self> {
        kv.check_known(CONFIG_KEYS)?;
        Ok(Self {
            input_path: kv.raw("input").map(PathBuf::from),
            input_kind: kv.raw("kind").map(str::parse).transpose()?,
            p: kv.get("p")?,
            m: kv.get("m")?,
            m_n: kv.raw("mn").map(str::parse).transpose()?,
            delta1: kv.get("delta1")?,
            delta2: kv.get("delta2")?,
            alpha: kv.get("alpha")?,
            c: kv.get("c")?,
            epsilon: kv.get("epsilon")?,
            omit_low: kv.get_bool("omit_low")?,
            partition_override: kv.raw("partition").map(SubspacePartition::parse).transpose()?,
            output_path: kv.raw("out").map(PathBuf::from),
            gse_only: kv.get_bool("gse_only")?,
            allow_small_m: kv.get_bool("allow_small_m")?,
            gap_guess: kv.get("gap_guess")?,
        })
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: AnalysisConfig) -> AnalysisConfig {
        AnalysisConfig {
            input_path: self.input_path.or(lower.input_path),
            input_kind: self.input_kind.or(lower.input_kind),
            p: self.p.or(lower.p),
            m: self.m.or(lower.m),
            m_n: self.m_n.or(lower.m_n),
            delta1: self.delta1.or(lower.delta1),
            delta2: self.delta2.or(lower.delta2),
            alpha: self.alpha.or(lower.alpha),
            c: self.c.or(lower.c),
            epsilon: self.epsilon.or(lower.epsilon),
            omit_low: self.omit_low.or(lower.omit_low),
            partition_override: self.partition_override.or(lower.partition_override),
            output_path: self.output_path.or(lower.output_path),
            gse_only: self.gse_only.or(lower.gse_only),
            allow_small_m: self.allow_small_m.or(lower.allow_small_m),
            gap_guess: self.gap_guess.or(lower.gap_guess),
        }
    }

    /// Fill defaults and validate against an input of `n_input` rows and
    /// `q` columns. No computation on the data happens here.
    pub fn resolve(&self, n_input: usize, q: usize) -> Result<ResolvedConfig> {
        let input_kind = self.input_kind.unwrap_or_default();
        let p = self.p.unwrap_or(2);
        if p < 1 {
            return Err(Error::arg("p", "must be at least 1"));
        }
        let n = match input_kind {
            InputKind::Levels => {
                if n_input <= p - 1 + 1 {
                    return Err(Error::arg(
                        "kind",
                        format!("{n_input} levels leave no data after {} differences", p - 1),
                    ));
                }
                n_input - (p - 1)
            }
            InputKind::Stationary => n_input,
        };
        if n < p + 2 {
            return Err(Error::arg("n", format!("series of length {n} too short for p = {p}")));
        }
        let gse_only = self.gse_only.unwrap_or(false);
        let allow_small_m = self.allow_small_m.unwrap_or(false);
        let m = self.m.unwrap_or(q + 4);
        if m == 0 {
            return Err(Error::arg("m", "must be positive"));
        }
        if !gse_only && !allow_small_m && m <= q + 3 {
            return Err(Error::BandwidthTooSmall { m, bound: q + 3 });
        }
        if !gse_only && m > n - p {
            return Err(Error::arg("m", format!("m = {m} exceeds n − p = {}", n - p)));
        }
        let m_n = match self.m_n.unwrap_or_default() {
            Bandwidth::Auto => default_bandwidth(n),
            Bandwidth::Fixed(v) => v,
        };
        let (d1, d2) = default_theta(p);
        let omit_low = self.omit_low.unwrap_or(!gse_only);
        let gse = GseConfig {
            m_n,
            p,
            delta1: self.delta1.unwrap_or(d1),
            delta2: self.delta2.unwrap_or(d2),
            omit_low,
            m,
        };
        gse.validate(n)?;
        let alpha = self.alpha.unwrap_or(0.05);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::arg("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        let default_rule = IdentificationRule::default();
        let rule = IdentificationRule::new(
            self.c.unwrap_or(default_rule.c),
            self.epsilon.unwrap_or(default_rule.epsilon),
        )?;
        if let Some(part) = &self.partition_override {
            if part.q() != q {
                return Err(Error::arg(
                    "partition",
                    format!("override covers {} columns, input has {q}", part.q()),
                ));
            }
        }
        if let Some(g) = self.gap_guess {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::arg("gap_guess", "must be positive"));
            }
        }
        Ok(ResolvedConfig {
            input_kind,
            p,
            m,
            m_n,
            delta1: gse.delta1,
            delta2: gse.delta2,
            alpha,
            c: rule.c,
            epsilon: rule.epsilon,
            omit_low,
            partition_override: self.partition_override.clone(),
            gse_only,
            allow_small_m,
            gap_guess: self.gap_guess,
        })
    }
}

/// Configuration with every default filled in; embedded in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub input_kind: InputKind,
    pub p: usize,
    pub m: usize,
    pub m_n: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub epsilon: f64,
    pub omit_low: bool,
    pub partition_override: Option<SubspacePartition>,
    pub gse_only: bool,
    pub allow_small_m: bool,
    pub gap_guess: Option<f64>,
}

impl ResolvedConfig {
    pub fn gse(&self) -> GseConfig {
        GseConfig {
            m_n: self.m_n,
            p: self.p,
            delta1: self.delta1,
            delta2: self.delta2,
            omit_low: self.omit_low,
            m: self.m,
        }
    }

    pub fn rule(&self) -> IdentificationRule {
        IdentificationRule {
            c: self.c,
            epsilon: self.epsilon,
        }
    }
}

/// `m_n^{1+2ξ} log² m_n / n^{2ξ}`; small values mean the bandwidth grows
/// slowly enough for smoothness/separation `ξ`.
pub fn bandwidth_ratio(m_n: usize, n: usize, xi: f64) -> f64 {
    let m = m_n as f64;
    m.powf(1.0 + 2.0 * xi) * m.ln().powi(2) / (n as f64).powf(2.0 * xi)
}

fn column_estimates(w: &SeriesMatrix, gse: &GseConfig, taper: &TaperSpec) -> Result<Vec<MemoryEstimate>> {
    use rayon::prelude::*;
    (0..w.q())
        .into_par_iter()
        .map(|c| gse_estimate(w.column(c), gse, taper))
        .collect()
}

/// Run the pipeline on `data` (levels or stationary per the config).
pub fn run_analysis(config: &AnalysisConfig, data: &SeriesMatrix) -> Result<CointegrationReport> {
    let resolved = config.resolve(data.n(), data.q())?;
    run_resolved(&resolved, data)
}

pub fn run_resolved(cfg: &ResolvedConfig, data: &SeriesMatrix) -> Result<CointegrationReport> {
    let q = data.q();
    if q == 1 && !cfg.gse_only {
        return Err(Error::Unsupported(
            "the subspace pipeline needs at least 2 series; use GSE-only mode for a single series".into(),
        )
        .at(Stage::Subspace));
    }
    let y = match cfg.input_kind {
        InputKind::Levels => difference(data, cfg.p - 1).stage(Stage::Difference)?,
        InputKind::Stationary => data.clone(),
    };
    let n = y.n();
    let taper = TaperSpec::new(n, cfg.p).stage(Stage::Periodogram)?;
    let gse = cfg.gse();
    let bandwidth = BandwidthDiagnostics {
        assumed_rho: ASSUMED_RHO,
        smoothness_ratio: bandwidth_ratio(cfg.m_n, n, ASSUMED_RHO),
        gap_guess: cfg.gap_guess,
        separation_ratio: cfg
            .gap_guess
            .map(|g| bandwidth_ratio(cfg.m_n, n, g.min(ASSUMED_RHO))),
    };
    let mut metadata = Metadata {
        n_input: data.n(),
        n,
        q,
        p: cfg.p,
        m: cfg.m,
        m_n: cfg.m_n,
        threshold: cfg.rule().threshold(cfg.m_n),
        seed: None,
    };

    if cfg.gse_only {
        let memory = column_estimates(&y, &gse, &taper).stage(Stage::Memory)?;
        let mut diagnostics = Diagnostics {
            bandwidth,
            ..Diagnostics::default()
        };
        diagnostics.boundary_columns = boundary_columns(&memory);
        metadata.threshold = f64::NAN;
        return Ok(CointegrationReport {
            mode: "gse_only".into(),
            metadata,
            config: cfg.clone(),
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            memory: ColumnEstimate::from_estimates(&memory),
            partition: None,
            partition_source: None,
            test: None,
            diagnostics,
            per_frequency: Vec::new(),
        });
    }

    let check = if cfg.allow_small_m {
        BandwidthCheck::Override
    } else {
        BandwidthCheck::Strict
    };
    let periodogram = averaged_periodogram_with(&y, &taper, cfg.m, check).stage(Stage::Periodogram)?;
    let decomp = eig_sym_desc(&periodogram.matrix).stage(Stage::Eigen)?;
    let w = residual_series(&y, &decomp.eigenvectors).stage(Stage::Subspace)?;
    let memory = column_estimates(&w, &gse, &taper).stage(Stage::Memory)?;
    let d_hats: Vec<f64> = memory.iter().map(|e| e.d_hat).collect();

    let ident = identify_with_diagnostics(&d_hats, cfg.m_n, &cfg.rule()).stage(Stage::Identification)?;
    let (partition, source) = match &cfg.partition_override {
        Some(p) => (p.clone(), "override"),
        None => (ident.partition.clone(), "identified"),
    };
    let test = cointegration_test(d_hats[0], d_hats[q - 1], cfg.m_n, cfg.p, cfg.alpha).stage(Stage::Test)?;

    let mut warnings = Vec::new();
    if ident.gaps.iter().any(|g| g.negative) {
        warnings.push(
            "memory estimates out of eigenvalue order; bandwidth or separation may be inadequate".to_string(),
        );
    }
    let small_gap = ident.gaps.iter().any(|g| g.boundary && g.gap <= 0.5);
    if small_gap {
        warnings.push("an identified gap is at most 0.5; consistency of identification is not guaranteed".into());
    }
    let ill_conditioned = decomp.is_ill_conditioned();
    if ill_conditioned {
        warnings.push("smallest eigenvalue is at rounding level relative to the largest".into());
    }
    let boundary = boundary_columns(&memory);
    if !boundary.is_empty() {
        warnings.push("some memory estimates lie on the parameter interval boundary".into());
    }

    let eigenvectors = (0..q)
        .map(|j| decomp.eigenvectors.column(j).iter().copied().collect())
        .collect();
    Ok(CointegrationReport {
        mode: "subspace".into(),
        metadata,
        config: cfg.clone(),
        eigenvalues: decomp.eigenvalues.clone(),
        eigenvectors,
        memory: ColumnEstimate::from_estimates(&memory),
        partition: Some(partition),
        partition_source: Some(source.into()),
        test: Some(test),
        diagnostics: Diagnostics {
            gaps: ident.gaps,
            boundary_columns: boundary,
            ill_conditioned,
            small_gap,
            warnings,
            bandwidth,
        },
        per_frequency: periodogram.per_frequency,
    })
}

fn boundary_columns(memory: &[MemoryEstimate]) -> Vec<usize> {
    memory
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.converged)
        .map(|(i, _)| i + 1)
        .collect()
}
