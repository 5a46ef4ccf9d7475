//! Seeded, parallel Monte Carlo replications of the simulator + pipeline,
//! summarized into the tables used to check the asymptotic claims.
//!
//! Replication `k` at grid point `g` uses seed
//! `derive_seed(derive_seed(master, g), k)`; results are collected in
//! replication order and reduced sequentially, so the summary does not
//! depend on the worker count.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{run_resolved, InputKind, ResolvedConfig};
use crate::eigsub::{group_eigenvectors, residual_series, subspace_sin_theta, EigenDecomposition};
use crate::error::{Error, Result};
use crate::gse::{bandwidth_for_exponent, default_theta, gse_estimate, phi_p, GseConfig};
use crate::inference::IdentificationRule;
use crate::kv::{format_list, KvMap};
use crate::model_sim::{simulate_model, Mixing, SimSpec};
use crate::report::to_stable_json;
use crate::rng::derive_seed;
use crate::spectral::{difference, TaperSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct McAnalysis {
    /// Averaged-periodogram bandwidth; `None` means `q + 4`.
    pub m: Option<usize>,
    /// `m_n = ⌊n^{exponent}⌋`.
    pub mn_exponent: f64,
    pub omit_low: bool,
    pub alpha: f64,
    pub rule: IdentificationRule,
    pub delta: Option<(f64, f64)>,
}

impl Default for McAnalysis {
    fn default() -> Self {
        Self {
            m: None,
            mn_exponent: 0.6,
            omit_low: true,
            alpha: 0.05,
            rule: IdentificationRule::default(),
            delta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub memory: bool,
    pub sin_theta: bool,
    pub rejection: bool,
    pub partition: bool,
    pub eigen_slope: bool,
    pub bias: bool,
}

impl Metrics {
    pub fn all() -> Self {
        Self {
            memory: true,
            sin_theta: true,
            rejection: true,
            partition: true,
            eigen_slope: true,
            bias: true,
        }
    }

    pub fn none() -> Self {
        Self {
            memory: false,
            sin_theta: false,
            rejection: false,
            partition: false,
            eigen_slope: false,
            bias: false,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::none();
        for item in text.split(',').map(str::trim) {
            match item {
                "all" => m = Self::all(),
                "memory" => m.memory = true,
                "sin_theta" => m.sin_theta = true,
                "rejection" => m.rejection = true,
                "partition" => m.partition = true,
                "eigen_slope" => m.eigen_slope = true,
                "bias" => m.bias = true,
                other => return Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
            }
        }
        Ok(m)
    }

    fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (on, name) in [
            (self.memory, "memory"),
            (self.sin_theta, "sin_theta"),
            (self.rejection, "rejection"),
            (self.partition, "partition"),
            (self.eigen_slope, "eigen_slope"),
            (self.bias, "bias"),
        ] {
            if on {
                v.push(name);
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSpec {
    /// Template; `n` and `seed` are replaced per replication.
    pub sim: SimSpec,
    pub reps: usize,
    pub n_grid: Vec<usize>,
    pub master_seed: u64,
    pub workers: usize,
    pub analysis: McAnalysis,
    /// Extra bandwidth exponents for the bias table.
    pub bias_exponents: Vec<f64>,
    pub metrics: Metrics,
}

const MC_KEYS: &[&str] = &[
    "reps",
    "n_grid",
    "master_seed",
    "workers",
    "m",
    "mn_exponent",
    "omit_low",
    "alpha",
    "c",
    "epsilon",
    "delta1",
    "delta2",
    "bias_exponents",
    "metrics",
];

impl McSpec {
    pub fn new(sim: SimSpec, reps: usize, n_grid: Vec<usize>, master_seed: u64) -> Self {
        Self {
            sim,
            reps,
            n_grid,
            master_seed,
            workers: 1,
            analysis: McAnalysis::default(),
            bias_exponents: Vec::new(),
            metrics: Metrics::all(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n_grid must be non-empty and strictly increasing".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        if !(self.analysis.mn_exponent > 0.0 && self.analysis.mn_exponent < 1.0) {
            return Err(Error::InvalidConfig("mn_exponent must lie in (0, 1)".into()));
        }
        if self.bias_exponents.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::InvalidConfig("bias exponents must lie in (0, 1)".into()));
        }
        self.analysis.rule.validate()?;
        let mut probe = self.sim.clone();
        probe.n = self.n_grid[0];
        probe.validate()
    }

    pub fn from_kv(kv: &KvMap) -> Result<Self> {
        let known: Vec<&str> = MC_KEYS
            .iter()
            .chain(
                [
                    "partition", "d", "mixing", "mixing_seed", "max_condition", "mixing_matrix",
                    "innovation_cov", "n", "burn_in", "p", "emit_levels",
                ]
                .iter(),
            )
            .copied()
            .collect();
        kv.check_known(&known)?;
        let n_grid = kv
            .get_list::<usize>("n_grid")?
            .ok_or_else(|| Error::InvalidConfig("missing key \"n_grid\"".into()))?;
        let mut sim_kv = kv.clone();
        if !sim_kv.contains("n") {
            sim_kv.insert("n", n_grid[0]);
        }
        let sim = SimSpec::from_kv_lenient(&sim_kv)?;
        let mut spec = McSpec::new(
            sim,
            kv.get("reps")?.unwrap_or(100),
            n_grid,
            kv.get("master_seed")?.unwrap_or(0),
        );
        spec.workers = kv.get("workers")?.unwrap_or(1);
        let a = &mut spec.analysis;
        a.m = kv.get("m")?;
        a.mn_exponent = kv.get("mn_exponent")?.unwrap_or(a.mn_exponent);
        a.omit_low = kv.get_bool("omit_low")?.unwrap_or(a.omit_low);
        a.alpha = kv.get("alpha")?.unwrap_or(a.alpha);
        a.rule.c = kv.get("c")?.unwrap_or(a.rule.c);
        a.rule.epsilon = kv.get("epsilon")?.unwrap_or(a.rule.epsilon);
        match (kv.get::<f64>("delta1")?, kv.get::<f64>("delta2")?) {
            (None, None) => {}
            (d1, d2) => {
                let (dd1, dd2) = default_theta(spec.sim.p);
                a.delta = Some((d1.unwrap_or(dd1), d2.unwrap_or(dd2)));
            }
        }
        spec.bias_exponents = kv.get_list("bias_exponents")?.unwrap_or_default();
        if let Some(m) = kv.raw("metrics") {
            spec.metrics = Metrics::parse(m)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Text echo of everything that affects results (excludes `workers`).
    fn echo(&self) -> String {
        let mut kv = self.sim.to_kv();
        kv.insert("reps", self.reps);
        kv.insert("n_grid", format_list(&self.n_grid));
        kv.insert("master_seed", self.master_seed);
        if let Some(m) = self.analysis.m {
            kv.insert("m", m);
        }
        kv.insert("mn_exponent", self.analysis.mn_exponent);
        kv.insert("omit_low", self.analysis.omit_low);
        kv.insert("alpha", self.analysis.alpha);
        kv.insert("c", self.analysis.rule.c);
        kv.insert("epsilon", self.analysis.rule.epsilon);
        if let Some((d1, d2)) = self.analysis.delta {
            kv.insert("delta1", d1);
            kv.insert("delta2", d2);
        }
        if !self.bias_exponents.is_empty() {
            kv.insert("bias_exponents", format_list(&self.bias_exponents));
        }
        kv.insert("metrics", self.metrics.names().join(","));
        kv.to_text()
    }
}

/// Raw output of one replication.
#[derive(Debug, Clone)]
struct Replication {
    d_hats: Vec<f64>,
    sin_theta: Vec<f64>,
    eigenvalues: Vec<f64>,
    reject: Option<bool>,
    recovered: Option<bool>,
    /// Per bias exponent, per column.
    bias_d_hats: Vec<Vec<f64>>,
}

struct Context<'a> {
    spec: &'a McSpec,
    mixing: DMatrix<f64>,
}

impl Context<'_> {
    fn config(&self, n: usize) -> ResolvedConfig {
        let spec = self.spec;
        let q = spec.sim.q();
        let p = spec.sim.p;
        let (d1, d2) = spec.analysis.delta.unwrap_or_else(|| default_theta(p));
        let gse_only = q == 1;
        ResolvedConfig {
            input_kind: if spec.sim.emit_levels { InputKind::Levels } else { InputKind::Stationary },
            p,
            m: spec.analysis.m.unwrap_or(q + 4),
            m_n: bandwidth_for_exponent(n, spec.analysis.mn_exponent),
            delta1: d1,
            delta2: d2,
            alpha: spec.analysis.alpha,
            c: spec.analysis.rule.c,
            epsilon: spec.analysis.rule.epsilon,
            omit_low: spec.analysis.omit_low,
            partition_override: None,
            gse_only,
            allow_small_m: false,
            gap_guess: None,
        }
    }

    fn replicate(&self, n: usize, seed: u64) -> Result<Replication> {
        let spec = self.spec;
        let mut sim_spec = spec.sim.clone();
        sim_spec.n = n;
        sim_spec.seed = seed;
        sim_spec.mixing = Mixing::Explicit(self.mixing.clone());
        let sim = simulate_model(&sim_spec)?;
        let cfg = self.config(n);
        let report = run_resolved(&cfg, &sim.series)?;
        let d_hats: Vec<f64> = report.memory.iter().map(|e| e.d_hat).collect();
        let q = sim_spec.q();
        let y = match cfg.input_kind {
            InputKind::Levels => difference(&sim.series, cfg.p - 1)?,
            InputKind::Stationary => sim.series.clone(),
        };
        let taper = TaperSpec::new(y.n(), cfg.p)?;

        if q == 1 {
            let bias_d_hats = self
                .bias_bandwidths(y.n())
                .into_iter()
                .map(|m_n| {
                    let g = GseConfig { m_n, ..cfg.gse() };
                    Ok(vec![gse_estimate(y.column(0), &g, &taper)?.d_hat])
                })
                .collect::<Result<_>>()?;
            return Ok(Replication {
                d_hats,
                sin_theta: Vec::new(),
                eigenvalues: Vec::new(),
                reject: None,
                recovered: None,
                bias_d_hats,
            });
        }

        let x = DMatrix::from_fn(q, q, |i, j| report.eigenvectors[j][i]);
        let decomp = EigenDecomposition {
            eigenvalues: report.eigenvalues.clone(),
            eigenvectors: x.clone(),
            source_trace: report.eigenvalues.iter().sum(),
        };
        let groups = group_eigenvectors(&decomp, &sim_spec.partition)?;
        let sin_theta = groups
            .iter()
            .zip(&sim.bases.bases)
            .map(|(est, truth)| subspace_sin_theta(est, truth))
            .collect::<Result<Vec<_>>>()?;

        let bias_d_hats = if spec.metrics.bias && !spec.bias_exponents.is_empty() {
            let w = residual_series(&y, &x)?;
            self.bias_bandwidths(y.n())
                .into_iter()
                .map(|m_n| {
                    let g = GseConfig { m_n, ..cfg.gse() };
                    (0..q)
                        .map(|c| Ok(gse_estimate(w.column(c), &g, &taper)?.d_hat))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };

        Ok(Replication {
            d_hats,
            sin_theta,
            eigenvalues: report.eigenvalues,
            reject: report.test.map(|t| t.reject),
            recovered: report.partition.map(|p| p == sim_spec.partition),
            bias_d_hats,
        })
    }

    fn bias_bandwidths(&self, n: usize) -> Vec<usize> {
        if !self.spec.metrics.bias {
            return Vec::new();
        }
        self.spec
            .bias_exponents
            .iter()
            .map(|&e| bandwidth_for_exponent(n, e))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub rep: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMemory {
    pub column: usize,
    pub group: usize,
    pub true_d: f64,
    pub mean_d_hat: f64,
    pub bias: f64,
    /// Monte Carlo standard error of the mean.
    pub mc_se: f64,
    /// Sample variance of `√m_n (d̂ − d)`; absent with fewer than 2 successes.
    pub var_scaled: Option<f64>,
    /// `var_scaled / (Φ_p / 4)`.
    pub var_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileRow {
    pub index: usize,
    pub group: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub mean: f64,
    /// Normal-theory standard error of the median.
    pub mc_se_median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rate {
    pub rate: f64,
    pub mc_se: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub exponent: f64,
    pub m_n: usize,
    pub column: usize,
    pub group: usize,
    pub mean_bias: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub n: usize,
    pub m_n: usize,
    pub successes: usize,
    /// False when some replications failed.
    pub complete: bool,
    pub failures: Vec<Failure>,
    pub memory: Vec<ColumnMemory>,
    /// Per true group `k`: `‖sin Θ(M(X_k), B_k)‖_F`.
    pub sin_theta: Vec<QuantileRow>,
    /// Per eigenvalue index: `log λ_j`.
    pub log_eigenvalues: Vec<QuantileRow>,
    pub rejection: Option<Rate>,
    pub partition_recovery: Option<Rate>,
    pub bias: Vec<BiasRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRow {
    pub index: usize,
    pub group: usize,
    pub slope: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub spec: String,
    pub reps: usize,
    pub master_seed: u64,
    pub phi_p: f64,
    pub grid: Vec<GridPoint>,
    /// Slope of log median sin Θ against log n, target `−α_k`.
    pub sin_theta_slopes: Vec<SlopeRow>,
    /// Slope of median log λ_j against log n, target `2 d_k`.
    pub eigenvalue_slopes: Vec<SlopeRow>,
}

impl McSummary {
    pub fn to_json(&self) -> String {
        to_stable_json(self)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = mean(v);
    Some(v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64)
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let pos = prob * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn quantile_row(index: usize, group: usize, values: &[f64]) -> QuantileRow {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sd = sample_var(values).unwrap_or(0.0).sqrt();
    QuantileRow {
        index,
        group,
        median: quantile(&sorted, 0.5),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
        mean: mean(values),
        mc_se_median: 1.253_314_137_315_500_3 * sd / (values.len() as f64).sqrt(),
    }
}

fn rate(flags: impl Iterator<Item = bool>) -> Option<Rate> {
    let v: Vec<bool> = flags.collect();
    if v.is_empty() {
        return None;
    }
    let count = v.iter().filter(|b| **b).count();
    let r = count as f64 / v.len() as f64;
    Some(Rate {
        rate: r,
        mc_se: (r * (1.0 - r) / v.len() as f64).sqrt(),
        count,
    })
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn run_monte_carlo(spec: &McSpec) -> Result<McSummary> {
    spec.validate()?;
    let q = spec.sim.q();
    let mixing = spec.sim.mixing.resolve(q)?;
    let ctx = Context { spec, mixing };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let phi = phi_p(spec.sim.p)?;
    let column_group: Vec<usize> = (0..q)
        .map(|c| spec.sim.partition.group_of(c).expect("partition covers q"))
        .collect();

    let mut grid = Vec::with_capacity(spec.n_grid.len());
    for (g, &n) in spec.n_grid.iter().enumerate() {
        let grid_seed = derive_seed(spec.master_seed, g as u64);
        let outcomes: Vec<(u64, Result<Replication>)> = pool.install(|| {
            (0..spec.reps)
                .into_par_iter()
                .map(|k| {
                    let seed = derive_seed(grid_seed, k as u64);
                    (seed, ctx.replicate(n, seed))
                })
                .collect()
        });

        let mut reps = Vec::with_capacity(spec.reps);
        let mut failures = Vec::new();
        for (k, (seed, out)) in outcomes.into_iter().enumerate() {
            match out {
                Ok(r) => reps.push(r),
                Err(e) => failures.push(Failure {
                    rep: k,
                    seed,
                    error: e.to_string(),
                }),
            }
        }
        let n_eff = if spec.sim.emit_levels { n - (spec.sim.p - 1) } else { n };
        let m_n = bandwidth_for_exponent(n_eff, spec.analysis.mn_exponent);
        let mut point = GridPoint {
            n,
            m_n,
            successes: reps.len(),
            complete: failures.is_empty(),
            failures,
            memory: Vec::new(),
            sin_theta: Vec::new(),
            log_eigenvalues: Vec::new(),
            rejection: None,
            partition_recovery: None,
            bias: Vec::new(),
        };
        if reps.is_empty() {
            grid.push(point);
            continue;
        }

        if spec.metrics.memory {
            let scale = (m_n as f64).sqrt();
            for (c, &k) in column_group.iter().enumerate() {
                let truth = spec.sim.d[k];
                let est: Vec<f64> = reps.iter().map(|r| r.d_hats[c]).collect();
                let scaled: Vec<f64> = est.iter().map(|d| scale * (d - truth)).collect();
                let var_scaled = sample_var(&scaled);
                let mean_d = mean(&est);
                point.memory.push(ColumnMemory {
                    column: c + 1,
                    group: k,
                    true_d: truth,
                    mean_d_hat: mean_d,
                    bias: mean_d - truth,
                    mc_se: sample_var(&est).map_or(0.0, |v| (v / est.len() as f64).sqrt()),
                    var_scaled,
                    var_ratio: var_scaled.map(|v| v / (phi / 4.0)),
                });
            }
        }
        if q > 1 {
            if spec.metrics.sin_theta {
                for k in 0..=spec.sim.partition.s() {
                    let v: Vec<f64> = reps.iter().map(|r| r.sin_theta[k]).collect();
                    point.sin_theta.push(quantile_row(k, k, &v));
                }
            }
            if spec.metrics.eigen_slope {
                for (j, &k) in column_group.iter().enumerate() {
                    let v: Vec<f64> = reps.iter().map(|r| r.eigenvalues[j].max(f64::MIN_POSITIVE).ln()).collect();
                    point.log_eigenvalues.push(quantile_row(j + 1, k, &v));
                }
            }
            if spec.metrics.rejection {
                point.rejection = rate(reps.iter().filter_map(|r| r.reject));
            }
            if spec.metrics.partition {
                point.partition_recovery = rate(reps.iter().filter_map(|r| r.recovered));
            }
        }
        if spec.metrics.bias {
            for (e_idx, &exponent) in spec.bias_exponents.iter().enumerate() {
                let bw = bandwidth_for_exponent(n_eff, exponent);
                for (c, &k) in column_group.iter().enumerate() {
                    let err: Vec<f64> = reps
                        .iter()
                        .map(|r| r.bias_d_hats[e_idx][c] - spec.sim.d[k])
                        .collect();
                    point.bias.push(BiasRow {
                        exponent,
                        m_n: bw,
                        column: c + 1,
                        group: k,
                        mean_bias: mean(&err),
                        mc_se: sample_var(&err).map_or(0.0, |v| (v / err.len() as f64).sqrt()),
                    });
                }
            }
        }
        grid.push(point);
    }

    let (sin_theta_slopes, eigenvalue_slopes) = slopes(spec, &grid, &column_group);
    Ok(McSummary {
        spec: spec.echo(),
        reps: spec.reps,
        master_seed: spec.master_seed,
        phi_p: phi,
        grid,
        sin_theta_slopes,
        eigenvalue_slopes,
    })
}

fn slopes(spec: &McSpec, grid: &[GridPoint], column_group: &[usize]) -> (Vec<SlopeRow>, Vec<SlopeRow>) {
    let usable: Vec<&GridPoint> = grid.iter().filter(|g| g.successes > 0).collect();
    if usable.len() < 2 {
        return (Vec::new(), Vec::new());
    }
    let log_n: Vec<f64> = usable.iter().map(|g| (g.n as f64).ln()).collect();
    let alphas = crate::model_sim::separation_rates(&spec.sim.d);
    let mut st = Vec::new();
    if usable.iter().all(|g| !g.sin_theta.is_empty()) {
        for (k, alpha) in alphas.iter().enumerate().take(spec.sim.partition.s() + 1) {
            let y: Vec<f64> = usable.iter().map(|g| g.sin_theta[k].median.ln()).collect();
            st.push(SlopeRow {
                index: k,
                group: k,
                slope: ols_slope(&log_n, &y),
                target: -alpha,
            });
        }
    }
    let mut ev = Vec::new();
    if usable.iter().all(|g| !g.log_eigenvalues.is_empty()) {
        for (j, &k) in column_group.iter().enumerate() {
            let y: Vec<f64> = usable.iter().map(|g| g.log_eigenvalues[j].median).collect();
            ev.push(SlopeRow {
                index: j + 1,
                group: k,
                slope: ols_slope(&log_n, &y),
                target: 2.0 * spec.sim.d[k],
            });
        }
    }
    (st, ev)
}
