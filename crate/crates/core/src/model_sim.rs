//! Simulation of the fractional common-components model `y_t = A z_t`, where
//! `z_t` stacks independent blocks of fractional noise with strictly
//! decreasing memory parameters, together with the true subspace bases.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::eigsub::{eig_sym_desc, SubspacePartition};
use crate::error::{Error, Result};
use crate::kv::{format_list, format_matrix, KvMap};
use crate::linalg::{normalize_column_signs, orthonormalize_columns};
use crate::rng::{derive_seed, gaussian_vec, stream};
use crate::spectral::{cumulative_sum, SeriesMatrix};

/// Relative floor on the smallest singular value of a mixing matrix.
pub const RANK_FLOOR: f64 = 1e-10;
pub const DEFAULT_MAX_CONDITION: f64 = 100.0;
const MAX_MIXING_DRAWS: usize = 10_000;
/// Below this length the filter is applied by direct convolution.
const DIRECT_FILTER_LEN: usize = 256;

/// MA(∞) coefficients of `(1 − L)^{−d}`: `ψ_0 = 1`, `ψ_j = ψ_{j−1}(j − 1 + d)/j`.
pub fn ma_coefficients(d: f64, len: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(len);
    let mut prev = 1.0;
    for j in 0..len {
        if j > 0 {
            prev *= (j as f64 - 1.0 + d) / j as f64;
        }
        psi.push(prev);
    }
    psi
}

/// Causal convolution `x_t = Σ_{j≤t} ψ_j e_{t−j}`, returning `x_t` for `t ≥ skip`.
fn causal_filter(innovations: &[f64], psi: &[f64], skip: usize) -> Vec<f64> {
    let len = innovations.len();
    if len <= DIRECT_FILTER_LEN {
        return (skip..len)
            .map(|t| (0..=t).map(|j| psi[j] * innovations[t - j]).sum())
            .collect();
    }
    let size = (2 * len).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let lift = |v: &[f64]| {
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(size, Complex64::new(0.0, 0.0));
        buf
    };
    let mut a = lift(innovations);
    let mut b = lift(&psi[..len]);
    fft.process(&mut a);
    fft.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    ifft.process(&mut a);
    let scale = 1.0 / size as f64;
    a[skip..len].iter().map(|c| c.re * scale).collect()
}

/// Apply the fractional filter with memory `d` (`−1/2 ≤ d < 1/2`) to the
/// given innovations and keep the last `innovations.len() − burn_in` values.
fn filter_direct(innovations: &[f64], d: f64, burn_in: usize) -> Vec<f64> {
    if d == 0.0 {
        return innovations[burn_in..].to_vec();
    }
    let psi = ma_coefficients(d, innovations.len());
    causal_filter(innovations, &psi, burn_in)
}

/// Number of integer differences needed to bring `d` into `[−1/2, 1/2)`.
fn differences_needed(d: f64) -> usize {
    let mut k = 0;
    while d + (k as f64) < -0.5 {
        k += 1;
    }
    k
}

/// Fractional noise from caller-supplied innovations. Memory below `−1/2` is
/// realized by differencing noise of memory `d + k`; the innovations must
/// have length `n + burn_in + k` with `k` from [`differences_needed`].
fn fractional_from_innovations(innovations: &[f64], d: f64, burn_in: usize) -> Vec<f64> {
    let k = differences_needed(d);
    let mut x = filter_direct(innovations, d + k as f64, burn_in);
    for _ in 0..k {
        x = x.windows(2).map(|w| w[1] - w[0]).collect();
    }
    x
}

/// Fractional Gaussian noise of memory `d`, `|d| < 1/2`, by the truncated
/// MA filter over `n + burn_in` seeded standard Gaussian innovations.
pub fn frac_noise(n: usize, d: f64, seed: u64, burn_in: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::arg("n", "series length must be positive"));
    }
    if d.is_nan() || d.abs() >= 0.5 {
        return Err(Error::arg("d", format!("direct generation needs |d| < 1/2, got {d}")));
    }
    let innovations = gaussian_vec(seed, n + burn_in);
    Ok(filter_direct(&innovations, d, burn_in))
}

/// Orthonormal bases `B_0, …, B_s` of the decomposition of `R^q`, and the
/// separation rates `α_k` when the memory parameters are known.
#[derive(Debug, Clone)]
pub struct TrueBases {
    pub bases: Vec<DMatrix<f64>>,
    /// Empty unless filled from the memory parameters.
    pub alphas: Vec<f64>,
}

/// `α_k`: distance from `d_k` to the nearest neighbouring memory parameter.
/// A single group has no neighbours and gets `+∞`.
pub fn separation_rates(d: &[f64]) -> Vec<f64> {
    let s = d.len().saturating_sub(1);
    if s == 0 {
        return vec![f64::INFINITY; d.len()];
    }
    (0..=s)
        .map(|k| match k {
            0 => d[0] - d[1],
            k if k == s => d[s - 1] - d[s],
            k => (d[k - 1] - d[k]).min(d[k] - d[k + 1]),
        })
        .collect()
}

/// Singular values of `a`, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let gram = a.transpose() * a;
    Ok(eig_sym_desc(&gram)?
        .eigenvalues
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect())
}

fn check_full_rank(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "mixing matrix must be square, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let sv = singular_values(a)?;
    let floor = RANK_FLOOR * sv[0];
    let smallest = *sv.last().unwrap();
    if sv[0] == 0.0 || smallest <= floor {
        return Err(Error::RankDeficient { smallest, floor });
    }
    Ok(())
}

/// `B_0 = M(A_0)`, and for `k ≥ 1` the part of `M(A_0, …, A_k)` orthogonal
/// to `M(A_0, …, A_{k−1})`: Gram–Schmidt over the columns of `A` in order.
pub fn true_subspace_bases(a: &DMatrix<f64>, partition: &SubspacePartition) -> Result<TrueBases> {
    check_full_rank(a)?;
    if partition.q() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} columns, mixing matrix has {}",
            partition.q(),
            a.ncols()
        )));
    }
    let q_mat = orthonormalize_columns(a, 1e-12).ok_or(Error::RankDeficient {
        smallest: 0.0,
        floor: RANK_FLOOR,
    })?;
    let bases = partition
        .ranges()
        .into_iter()
        .map(|r| {
            let mut b = q_mat.columns(r.start, r.len()).into_owned();
            normalize_column_signs(&mut b);
            b
        })
        .collect();
    Ok(TrueBases {
        bases,
        alphas: Vec::new(),
    })
}

/// iid standard Gaussian `q × q` matrix, redrawn until its condition number
/// is at most `max_condition`.
pub fn random_mixing(q: usize, seed: u64, max_condition: f64) -> Result<DMatrix<f64>> {
    use rand_distr::{Distribution, StandardNormal};
    if q == 0 {
        return Err(Error::arg("q", "dimension must be positive"));
    }
    if max_condition.is_nan() || max_condition < 1.0 {
        return Err(Error::arg("max_condition", "condition cap must be at least 1"));
    }
    let mut rng = stream(seed);
    for _ in 0..MAX_MIXING_DRAWS {
        let a = DMatrix::from_fn(q, q, |_, _| StandardNormal.sample(&mut rng));
        let sv = singular_values(&a)?;
        let smallest = *sv.last().unwrap();
        if smallest > 0.0 && sv[0] / smallest <= max_condition {
            return Ok(a);
        }
    }
    Err(Error::InvalidConfig(format!(
        "no {q}×{q} Gaussian matrix with condition ≤ {max_condition} in {MAX_MIXING_DRAWS} draws"
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mixing {
    Explicit(DMatrix<f64>),
    Random { seed: u64, max_condition: f64 },
}

impl Mixing {
    pub fn resolve(&self, q: usize) -> Result<DMatrix<f64>> {
        match self {
            Mixing::Explicit(a) => {
                if a.nrows() != q || a.ncols() != q {
                    return Err(Error::DimensionMismatch(format!(
                        "mixing matrix is {}×{}, expected {q}×{q}",
                        a.nrows(),
                        a.ncols()
                    )));
                }
                check_full_rank(a)?;
                Ok(a.clone())
            }
            Mixing::Random { seed, max_condition } => random_mixing(q, *seed, *max_condition),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub partition: SubspacePartition,
    /// `d_0 > d_1 > … > d_s`.
    pub d: Vec<f64>,
    pub mixing: Mixing,
    /// `None` means the identity.
    pub innovation_cov: Option<DMatrix<f64>>,
    pub n: usize,
    /// `None` means `10 n`.
    pub burn_in: Option<usize>,
    /// Taper/differencing order; bounds `d` from below by `−p + 1/2`.
    pub p: usize,
    pub emit_levels: bool,
    pub seed: u64,
}

const SIM_KEYS: &[&str] = &[
    "partition",
    "d",
    "mixing",
    "mixing_seed",
    "max_condition",
    "mixing_matrix",
    "innovation_cov",
    "n",
    "burn_in",
    "p",
    "emit_levels",
    "seed",
];

impl SimSpec {
    /// Spec with a random mixing matrix derived from `seed`, identity
    /// innovation covariance, default burn-in and stationary output.
    pub fn new(partition: SubspacePartition, d: Vec<f64>, n: usize, p: usize, seed: u64) -> Self {
        Self {
            partition,
            d,
            mixing: Mixing::Random {
                seed: derive_seed(seed, u64::MAX),
                max_condition: DEFAULT_MAX_CONDITION,
            },
            innovation_cov: None,
            n,
            burn_in: None,
            p,
            emit_levels: false,
            seed,
        }
    }

    pub fn q(&self) -> usize {
        self.partition.q()
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(10 * self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.partition.s();
        if self.d.len() != s + 1 {
            return Err(Error::InvalidConfig(format!(
                "{} memory parameters given for {} groups",
                self.d.len(),
                s + 1
            )));
        }
        if self.p < 1 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        let lower = -(self.p as f64) + 0.5;
        for (k, &dk) in self.d.iter().enumerate() {
            if !(dk > lower && dk < 0.5) {
                return Err(Error::InvalidConfig(format!(
                    "d_{k} = {dk} outside ({lower}, 0.5)"
                )));
            }
        }
        if self.d.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig("memory parameters must be strictly decreasing".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2".into()));
        }
        if let Some(cov) = &self.innovation_cov {
            if cov.nrows() != self.q() || cov.ncols() != self.q() {
                return Err(Error::InvalidConfig("innovation covariance has the wrong shape".into()));
            }
            if cov.clone().cholesky().is_none() {
                return Err(Error::InvalidConfig(
                    "innovation covariance is not symmetric positive definite".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_kv(kv: &KvMap) -> Result<Self> {
        kv.check_known(SIM_KEYS)?;
        Self::from_kv_lenient(kv)
    }

    /// Like [`SimSpec::from_kv`] but ignores keys it does not know, for
    /// embedding in larger configuration blocks.
    pub fn from_kv_lenient(kv: &KvMap) -> Result<Self> {
        let partition = kv
            .raw("partition")
            .ok_or_else(|| Error::InvalidConfig("missing key \"partition\"".into()))
            .and_then(|v| SubspacePartition::parse(v).map_err(|e| Error::InvalidConfig(e.to_string())))?;
        let d = kv
            .get_list::<f64>("d")?
            .ok_or_else(|| Error::InvalidConfig("missing key \"d\"".into()))?;
        let n = kv
            .get::<usize>("n")?
            .ok_or_else(|| Error::InvalidConfig("missing key \"n\"".into()))?;
        let seed = kv.get::<u64>("seed")?.unwrap_or(0);
        let p = kv.get::<usize>("p")?.unwrap_or(1);
        let mut spec = SimSpec::new(partition, d, n, p, seed);
        match kv.raw("mixing").unwrap_or("random") {
            "random" => {
                if let Some(ms) = kv.get::<u64>("mixing_seed")? {
                    spec.mixing = Mixing::Random {
                        seed: ms,
                        max_condition: DEFAULT_MAX_CONDITION,
                    };
                }
                if let Mixing::Random { max_condition, .. } = &mut spec.mixing {
                    if let Some(c) = kv.get::<f64>("max_condition")? {
                        *max_condition = c;
                    }
                }
            }
            "explicit" => {
                let a = kv
                    .get_matrix("mixing_matrix")?
                    .ok_or_else(|| Error::InvalidConfig("explicit mixing needs mixing_matrix".into()))?;
                spec.mixing = Mixing::Explicit(a);
            }
            other => {
                return Err(Error::InvalidConfig(format!("unknown mixing kind {other:?}")));
            }
        }
        spec.innovation_cov = match kv.raw("innovation_cov") {
            None | Some("identity") => None,
            Some(_) => kv.get_matrix("innovation_cov")?,
        };
        spec.burn_in = kv.get::<usize>("burn_in")?;
        spec.emit_levels = kv.get_bool("emit_levels")?.unwrap_or(false);
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_kv(&self) -> KvMap {
        let mut kv = KvMap::default();
        kv.insert("partition", &self.partition);
        kv.insert("d", format_list(&self.d));
        match &self.mixing {
            Mixing::Random { seed, max_condition } => {
                kv.insert("mixing", "random");
                kv.insert("mixing_seed", seed);
                kv.insert("max_condition", max_condition);
            }
            Mixing::Explicit(a) => {
                kv.insert("mixing", "explicit");
                kv.insert("mixing_matrix", format_matrix(a));
            }
        }
        kv.insert(
            "innovation_cov",
            self.innovation_cov
                .as_ref()
                .map_or_else(|| "identity".to_string(), format_matrix),
        );
        kv.insert("n", self.n);
        if let Some(b) = self.burn_in {
            kv.insert("burn_in", b);
        }
        kv.insert("p", self.p);
        kv.insert("emit_levels", self.emit_levels);
        kv.insert("seed", self.seed);
        kv
    }
}

/// Output of [`simulate_model`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub series: SeriesMatrix,
    pub bases: TrueBases,
    pub mixing: DMatrix<f64>,
}

/// Simulate `y_t = A z_t`. Component `a` of `z_t` is fractional noise with
/// the memory of its group, driven by the innovation stream derived from
/// `(seed, a)` and correlated through the Cholesky factor of the innovation
/// covariance when one is given.
pub fn simulate_model(spec: &SimSpec) -> Result<Simulation> {
    spec.validate()?;
    let q = spec.q();
    let mixing = spec.mixing.resolve(q)?;
    let mut bases = true_subspace_bases(&mixing, &spec.partition)?;
    bases.alphas = separation_rates(&spec.d);

    let memory: Vec<f64> = spec
        .partition
        .ranges()
        .iter()
        .enumerate()
        .flat_map(|(k, r)| std::iter::repeat_n(spec.d[k], r.len()))
        .collect();
    let extra = memory.iter().map(|&d| differences_needed(d)).max().unwrap_or(0);
    let burn_in = spec.burn_in();
    let len = spec.n + burn_in + extra;

    let mut innovations: Vec<Vec<f64>> = (0..q)
        .map(|a| gaussian_vec(derive_seed(spec.seed, a as u64), len))
        .collect();
    if let Some(cov) = &spec.innovation_cov {
        let l = cov.clone().cholesky().expect("validated SPD").l();
        let mut mixed = vec![vec![0.0; len]; q];
        for t in 0..len {
            for a in 0..q {
                mixed[a][t] = (0..=a).map(|b| l[(a, b)] * innovations[b][t]).sum();
            }
        }
        innovations = mixed;
    }

    let z: Vec<Vec<f64>> = innovations
        .iter()
        .zip(&memory)
        .map(|(e, &d)| {
            let k = differences_needed(d);
            fractional_from_innovations(&e[extra - k..], d, burn_in)
        })
        .collect();

    let z = DMatrix::from_fn(spec.n, q, |t, a| z[a][t]);
    let y = z * mixing.transpose();
    let series = if spec.emit_levels && spec.p > 1 {
        let cols: Vec<Vec<f64>> = (0..q)
            .map(|c| {
                let col: Vec<f64> = y.column(c).iter().copied().collect();
                cumulative_sum(&col, spec.p - 1)
            })
            .collect();
        SeriesMatrix::from_columns(&cols)?
    } else {
        SeriesMatrix::new(y)?
    };
    Ok(Simulation {
        series,
        bases,
        mixing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        let psi = ma_coefficients(0.3, 4);
        assert_eq!(psi[0], 1.0);
        assert!((psi[1] - 0.3).abs() < 1e-15);
        assert!((psi[2] - 0.3 * 1.3 / 2.0).abs() < 1e-15);
        assert_eq!(ma_coefficients(0.0, 5), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_memory_is_raw_innovations() {
        let x = frac_noise(100, 0.0, 42, 0).unwrap();
        assert_eq!(x, gaussian_vec(42, 100));
        let y = frac_noise(50, 0.0, 42, 30).unwrap();
        assert_eq!(y, gaussian_vec(42, 80)[30..].to_vec());
    }

    #[test]
    fn frac_noise_errors() {
        assert!(frac_noise(0, 0.1, 1, 0).is_err());
        assert!(frac_noise(10, 0.5, 1, 0).is_err());
        assert!(frac_noise(10, -0.5, 1, 0).is_err());
    }

    #[test]
    fn fft_filter_matches_direct_sum() {
        let e = gaussian_vec(9, 700);
        let psi = ma_coefficients(0.35, 700);
        let fast = causal_filter(&e, &psi, 100);
        for (i, t) in (100..700).step_by(37).enumerate() {
            let direct: f64 = (0..=t).map(|j| psi[j] * e[t - j]).sum();
            assert!((fast[t - 100] - direct).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn deep_antipersistence_is_differenced_noise() {
        let e = gaussian_vec(5, 60);
        let x = fractional_from_innovations(&e, -0.8, 10);
        let base = filter_direct(&e, 0.2, 10);
        assert_eq!(x.len(), 49);
        for t in 0..x.len() {
            assert!((x[t] - (base[t + 1] - base[t])).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_mixing_bases() {
        let p = SubspacePartition::new(vec![1, 1]).unwrap();
        let tb = true_subspace_bases(&DMatrix::identity(2, 2), &p).unwrap();
        assert_eq!(tb.bases[0], DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        assert_eq!(tb.bases[1], DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
    }

    #[test]
    fn triangular_mixing_bases() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let p = SubspacePartition::new(vec![1, 1]).unwrap();
        let tb = true_subspace_bases(&a, &p).unwrap();
        assert!((tb.bases[0][(0, 0)] - 1.0).abs() < 1e-15);
        assert!(tb.bases[0][(1, 0)].abs() < 1e-15);
        let beta = &tb.bases[1];
        assert!(beta[(0, 0)].abs() < 1e-15 && (beta[(1, 0)] - 1.0).abs() < 1e-15);
        let b_a0 = (beta.transpose() * a.column(0))[(0, 0)];
        let b_a1 = (beta.transpose() * a.column(1))[(0, 0)];
        assert!(b_a0.abs() < 1e-15);
        assert!((b_a1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_group_spans_everything() {
        let a = random_mixing(4, 3, 100.0).unwrap();
        let tb = true_subspace_bases(&a, &SubspacePartition::whole(4)).unwrap();
        assert_eq!(tb.bases.len(), 1);
        let b = &tb.bases[0];
        let gram = b.transpose() * b;
        assert!((gram - DMatrix::identity(4, 4)).abs().max() < 1e-12);
    }

    #[test]
    fn rank_deficient_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let p = SubspacePartition::new(vec![1, 1]).unwrap();
        assert!(matches!(
            true_subspace_bases(&a, &p),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn random_mixing_respects_cap() {
        for seed in 0..5 {
            let a = random_mixing(5, seed, 20.0).unwrap();
            let sv = singular_values(&a).unwrap();
            assert!(sv[0] / sv[4] <= 20.0);
        }
    }

    #[test]
    fn alphas_follow_gaps() {
        assert_eq!(separation_rates(&[0.4, -0.2]), vec![0.6000000000000001, 0.6000000000000001]);
        let a = separation_rates(&[0.4, 0.3, -0.3]);
        assert!((a[0] - 0.1).abs() < 1e-12);
        assert!((a[1] - 0.1).abs() < 1e-12);
        assert!((a[2] - 0.6).abs() < 1e-12);
        assert!(separation_rates(&[0.2])[0].is_infinite());
    }

    #[test]
    fn spec_validation() {
        let part = SubspacePartition::new(vec![2, 1]).unwrap();
        let mut spec = SimSpec::new(part, vec![0.4, 0.0], 100, 1, 1);
        assert!(spec.validate().is_ok());
        spec.d = vec![0.0, 0.4];
        assert!(spec.validate().is_err());
        spec.d = vec![0.4, -0.6];
        assert!(spec.validate().is_err());
        spec.p = 2;
        assert!(spec.validate().is_ok());
        spec.d = vec![0.4];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn scalar_white_noise_model() {
        let mut spec = SimSpec::new(SubspacePartition::whole(1), vec![0.0], 64, 1, 11);
        spec.mixing = Mixing::Explicit(DMatrix::identity(1, 1));
        spec.burn_in = Some(0);
        let sim = simulate_model(&spec).unwrap();
        assert_eq!(sim.series.column(0), gaussian_vec(derive_seed(11, 0), 64).as_slice());
    }

    #[test]
    fn kv_roundtrip() {
        let part = SubspacePartition::new(vec![2, 1]).unwrap();
        let mut spec = SimSpec::new(part, vec![0.4, -0.2], 512, 2, 99);
        spec.emit_levels = true;
        spec.burn_in = Some(64);
        spec.innovation_cov = Some(DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0]));
        let text = spec.to_kv().to_text();
        let back = SimSpec::from_kv(&KvMap::parse(&text).unwrap()).unwrap();
        assert_eq!(back, spec);

        spec.mixing = Mixing::Explicit(DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 0.25, 0.0, 0.0, 1.0]));
        let back = SimSpec::from_kv(&KvMap::parse(&spec.to_kv().to_text()).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
