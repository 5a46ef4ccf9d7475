//! Differencing, the complex-valued differencing taper, tapered DFTs and
//! the averaged periodogram matrix.
//!
//! Frequencies are indexed by `j`, with `ω_j = 2πj/n`. Only the low band
//! `1 ≤ j ≤ n − p` is ever evaluated; inside it the taper annihilates any
//! polynomial of degree `p − 1`, so the transforms are exactly invariant to
//! additive trends of that order in the levels.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// An `n × q` block of real observations, one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    values: DMatrix<f64>,
}

impl SeriesMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.ncols() == 0 || values.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if values.nrows() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "series needs at least 2 observations, got {}",
                values.nrows()
            )));
        }
        for col in 0..values.ncols() {
            for row in 0..values.nrows() {
                if !values[(row, col)].is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let q = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != q {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: q,
                    found: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, q, |i, j| rows[i][j]))
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("columns differ in length".into()));
        }
        Self::new(DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]))
    }

    /// Single-column series.
    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn q(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// Contiguous view of column `c` (storage is column-major).
    pub fn column(&self, c: usize) -> &[f64] {
        let n = self.n();
        &self.values.as_slice()[c * n..(c + 1) * n]
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        (0..self.q()).map(|c| self.values[(t, c)]).collect()
    }
}

/// Order-fold first differences. Order 0 returns the input unchanged.
pub fn difference(series: &SeriesMatrix, order: usize) -> Result<SeriesMatrix> {
    let n = series.n();
    if order >= n {
        return Err(Error::arg(
            "order",
            format!("differencing order {order} must be below the series length {n}"),
        ));
    }
    let mut cols: Vec<Vec<f64>> = (0..series.q()).map(|c| series.column(c).to_vec()).collect();
    for _ in 0..order {
        for col in &mut cols {
            *col = col.windows(2).map(|w| w[1] - w[0]).collect();
        }
    }
    if n - order < 2 {
        // Keep the SeriesMatrix invariant; a single differenced point is of no use.
        return Err(Error::arg(
            "order",
            format!("differencing order {order} leaves fewer than 2 observations"),
        ));
    }
    SeriesMatrix::from_columns(&cols)
}

/// Inverse of [`difference`] up to the dropped initial values: order-fold
/// cumulative sums starting from zero.
pub fn cumulative_sum(values: &[f64], order: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    for _ in 0..order {
        let mut acc = 0.0;
        for v in &mut out {
            acc += *v;
            *v = acc;
        }
    }
    out
}

/// Taper `h_t^{p−1}` with `h_t = ½(1 − e^{i2πt/n})`, together with the DFT
/// normalizer and a twiddle table for the sample length it was built for.
#[derive(Debug, Clone)]
pub struct TaperSpec {
    n: usize,
    p: usize,
    weights: Vec<Complex64>,
    normalizer: f64,
    twiddle: Vec<Complex64>,
}

impl TaperSpec {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::arg("p", "taper order must be at least 1"));
        }
        if n < p + 1 {
            return Err(Error::arg(
                "n",
                format!("sample length {n} too short for taper order {p}"),
            ));
        }
        let twiddle: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        let power = (p - 1) as i32;
        let weights: Vec<Complex64> = (1..=n)
            .map(|t| {
                if power == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let h = 0.5 * (Complex64::new(1.0, 0.0) - twiddle[t % n]);
                    h.powi(power)
                }
            })
            .collect();
        let normalizer = 2.0 * PI * weights.iter().map(|w| w.norm_sqr()).sum::<f64>();
        Ok(Self {
            n,
            p,
            weights,
            normalizer,
            twiddle,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Weights `h_t^{p−1}` for `t = 1..=n` (index `t − 1`).
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// `2π Σ_t |h_t^{p−1}|²`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Largest admissible frequency index, `n − p`.
    pub fn max_frequency(&self) -> usize {
        self.n - self.p
    }

    pub fn check_frequency(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.max_frequency() {
            return Err(Error::FrequencyOutOfRange {
                j,
                max: self.max_frequency(),
            });
        }
        Ok(())
    }

    fn check_length(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch(format!(
                "taper built for n = {}, series has {} observations",
                self.n, len
            )));
        }
        Ok(())
    }

    /// Tapered, normalized copy of `x`, ready for repeated DFT evaluation.
    fn prepare(&self, x: &[f64]) -> Vec<Complex64> {
        let scale = self.normalizer.sqrt().recip();
        self.weights
            .iter()
            .zip(x)
            .map(|(w, &v)| w * (v * scale))
            .collect()
    }

    /// `Σ_t tapered_t e^{iω_j t}` using exact phase indices `(j·t) mod n`.
    fn transform_prepared(&self, tapered: &[Complex64], j: usize) -> Complex64 {
        let n = self.n;
        let step = j % n;
        let mut idx = step;
        let mut acc = Complex64::new(0.0, 0.0);
        for v in tapered {
            acc += v * self.twiddle[idx];
            idx += step;
            if idx >= n {
                idx -= n;
            }
        }
        acc
    }
}

/// Tapered DFT of a real scalar series at frequency index `j`.
pub fn tapered_dft_scalar(x: &[f64], taper: &TaperSpec, j: usize) -> Result<Complex64> {
    taper.check_length(x.len())?;
    taper.check_frequency(j)?;
    Ok(taper.transform_prepared(&taper.prepare(x), j))
}

/// Tapered DFT `J(ω_j)` of every column of `series`.
pub fn tapered_dft(series: &SeriesMatrix, taper: &TaperSpec, j: usize) -> Result<Vec<Complex64>> {
    (0..series.q())
        .map(|c| tapered_dft_scalar(series.column(c), taper, j))
        .collect()
}

/// `|J(ω_j)|²` for a scalar series.
pub fn univariate_tapered_periodogram(x: &[f64], taper: &TaperSpec, j: usize) -> Result<f64> {
    Ok(tapered_dft_scalar(x, taper, j)?.norm_sqr())
}

/// Periodogram ordinates `|J(ω_j)|²` for every `j` in `range` (inclusive bounds).
pub fn periodogram_ordinates(
    x: &[f64],
    taper: &TaperSpec,
    first: usize,
    last: usize,
) -> Result<Vec<f64>> {
    taper.check_length(x.len())?;
    taper.check_frequency(first)?;
    taper.check_frequency(last)?;
    let tapered = taper.prepare(x);
    Ok((first..=last)
        .map(|j| taper.transform_prepared(&tapered, j).norm_sqr())
        .collect())
}

/// Whether the `m > q + 3` requirement on the averaged periodogram is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandwidthCheck {
    #[default]
    Strict,
    Override,
}

/// `Σ_{j=1}^m Re{J(ω_j) J*(ω_j)}` and the per-frequency DFT vectors.
#[derive(Debug, Clone)]
pub struct AveragedPeriodogram {
    pub matrix: DMatrix<f64>,
    pub m: usize,
    pub per_frequency: Vec<Vec<Complex64>>,
}

pub fn averaged_periodogram(
    series: &SeriesMatrix,
    taper: &TaperSpec,
    m: usize,
) -> Result<AveragedPeriodogram> {
    averaged_periodogram_with(series, taper, m, BandwidthCheck::Strict)
}

pub fn averaged_periodogram_with(
    series: &SeriesMatrix,
    taper: &TaperSpec,
    m: usize,
    check: BandwidthCheck,
) -> Result<AveragedPeriodogram> {
    let q = series.q();
    if m == 0 {
        return Err(Error::arg("m", "bandwidth must be positive"));
    }
    if check == BandwidthCheck::Strict && m <= q + 3 {
        return Err(Error::BandwidthTooSmall { m, bound: q + 3 });
    }
    taper.check_length(series.n())?;
    taper.check_frequency(m)?;

    let prepared: Vec<Vec<Complex64>> = (0..q).map(|c| taper.prepare(series.column(c))).collect();
    let per_frequency: Vec<Vec<Complex64>> = (1..=m)
        .map(|j| {
            prepared
                .iter()
                .map(|col| taper.transform_prepared(col, j))
                .collect()
        })
        .collect();

    let mut matrix = DMatrix::zeros(q, q);
    for dft in &per_frequency {
        for a in 0..q {
            for b in a..q {
                let v = (dft[a] * dft[b].conj()).re;
                matrix[(a, b)] += v;
            }
        }
    }
    for a in 0..q {
        for b in 0..a {
            matrix[(a, b)] = matrix[(b, a)];
        }
    }
    Ok(AveragedPeriodogram {
        matrix,
        m,
        per_frequency,
    })
}
