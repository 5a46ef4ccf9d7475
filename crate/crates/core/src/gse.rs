//! Gaussian semiparametric (local Whittle) estimation of a memory parameter
//! from a scalar residual series, using the tapered periodogram at the
//! unshifted Fourier frequencies and shifted frequencies `ω̃_j` in the weights.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::optimize::{golden_section, GOLDEN_TOL};
use crate::spectral::{periodogram_ordinates, TaperSpec};

const GRID_POINTS: usize = 129;
const BOUNDARY_TOL: f64 = 1e-6;
const DEGENERATE_RATIO: f64 = 1e-20;
const NEWTON_STEPS: usize = 20;

/// `Φ_p = Γ(4p−3) Γ⁴(p) / Γ⁴(2p−1)`, the variance inflation of the taper of order `p`.
pub fn phi_p(p: usize) -> Result<f64> {
    if p < 1 {
        return Err(Error::arg("p", "taper order must be at least 1"));
    }
    let p = p as f64;
    Ok((ln_gamma(4.0 * p - 3.0) + 4.0 * ln_gamma(p) - 4.0 * ln_gamma(2.0 * p - 1.0)).exp())
}

/// `⌊n^{0.6}⌋`.
pub fn default_bandwidth(n: usize) -> usize {
    bandwidth_for_exponent(n, 0.6)
}

pub fn bandwidth_for_exponent(n: usize, exponent: f64) -> usize {
    // The nudge keeps exact powers (e.g. 4096^0.5) from rounding down.
    ((n as f64).powf(exponent) * (1.0 + 1e-12)).floor() as usize
}

/// Default parameter interval `[−p + 0.51, 0.49]`.
pub fn default_theta(p: usize) -> (f64, f64) {
    (-(p as f64) + 0.51, 0.49)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GseConfig {
    pub m_n: usize,
    pub p: usize,
    pub delta1: f64,
    pub delta2: f64,
    /// Skip the first `m + p − 1` frequencies.
    pub omit_low: bool,
    /// Averaged-periodogram bandwidth; only used when `omit_low` is set.
    pub m: usize,
}

impl GseConfig {
    /// Defaults for a series of length `n`: `m_n = ⌊n^{0.6}⌋`, default Θ,
    /// low frequencies omitted.
    pub fn defaults(n: usize, p: usize, m: usize) -> Self {
        let (delta1, delta2) = default_theta(p);
        Self {
            m_n: default_bandwidth(n),
            p,
            delta1,
            delta2,
            omit_low: true,
            m,
        }
    }

    pub fn first_frequency(&self) -> usize {
        if self.omit_low {
            self.m + self.p
        } else {
            1
        }
    }

    pub fn last_frequency(&self) -> usize {
        self.first_frequency() + self.m_n - 1
    }

    /// Check the parameter interval and that the band fits below `n − p`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let lower = -(self.p as f64) + 0.5;
        if self.p < 1 {
            return Err(Error::arg("p", "taper order must be at least 1"));
        }
        if !(self.delta1.is_finite() && self.delta2.is_finite()) {
            return Err(Error::arg("delta", "interval bounds must be finite"));
        }
        if !(lower < self.delta1 && self.delta1 < self.delta2 && self.delta2 < 0.5) {
            return Err(Error::arg(
                "delta",
                format!(
                    "need {lower} < delta1 < delta2 < 0.5, got [{}, {}]",
                    self.delta1, self.delta2
                ),
            ));
        }
        if self.m_n < 2 {
            return Err(Error::arg("m_n", "bandwidth must be at least 2"));
        }
        if self.omit_low && self.m == 0 {
            return Err(Error::arg("m", "omitting low frequencies needs m ≥ 1"));
        }
        let max = n.saturating_sub(self.p);
        if self.last_frequency() > max {
            return Err(Error::arg(
                "m_n",
                format!(
                    "frequency band {}..={} exceeds n − p = {max}",
                    self.first_frequency(),
                    self.last_frequency()
                ),
            ));
        }
        Ok(())
    }
}

/// Why an estimate is not an interior optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCode {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryEstimate {
    pub d_hat: f64,
    pub se: f64,
    pub m_n: usize,
    pub objective_min: f64,
    /// Inclusive frequency index range used.
    pub band: (usize, usize),
    pub converged: bool,
    pub boundary: Option<BoundaryCode>,
}

/// Precomputed objective for one set of ordinates.
#[derive(Debug, Clone)]
pub struct GseObjective {
    ordinates: Vec<f64>,
    centered_log_freq: Vec<f64>,
}

impl GseObjective {
    pub fn new(ordinates: &[(usize, f64)], n: usize, p: usize) -> Result<Self> {
        if ordinates.len() < 2 {
            return Err(Error::arg("ordinates", "at least 2 ordinates are required"));
        }
        if n == 0 || p == 0 {
            return Err(Error::arg("n", "sample length and taper order must be positive"));
        }
        let mut values = Vec::with_capacity(ordinates.len());
        let mut logs = Vec::with_capacity(ordinates.len());
        for &(j, v) in ordinates {
            if j == 0 {
                return Err(Error::arg("ordinates", "frequency index must be positive"));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg("ordinates", format!("invalid periodogram ordinate {v}")));
            }
            values.push(v);
            let shifted = j as f64 + (p as f64 - 1.0) / 2.0;
            logs.push((2.0 * PI * shifted / n as f64).ln());
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateResidual);
        }
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        logs.iter_mut().for_each(|l| *l -= mean);
        Ok(Self {
            ordinates: values,
            centered_log_freq: logs,
        })
    }

    /// `R(d) = log Ĝ(d) − 2d · mean(log ω̃_j)`.
    ///
    /// Evaluated as `log mean(I_j exp(2d (log ω̃_j − mean log ω̃)))`, which is
    /// algebraically identical and avoids overflow for large |d|.
    pub fn value(&self, d: f64) -> f64 {
        let sum: f64 = self
            .ordinates
            .iter()
            .zip(&self.centered_log_freq)
            .map(|(i, l)| i * (2.0 * d * l).exp())
            .sum();
        (sum / self.ordinates.len() as f64).ln()
    }

    /// First and second derivatives of `R` at `d`. `R''` is a weighted
    /// variance of the centred log frequencies, so `R` is convex.
    pub fn derivatives(&self, d: f64) -> (f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for (i, l) in self.ordinates.iter().zip(&self.centered_log_freq) {
            let w = i * (2.0 * d * l).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let m1 = s1 / s0;
        (2.0 * m1, 4.0 * (s2 / s0 - m1 * m1))
    }

    /// Newton iterations on `R'(d) = 0`, kept inside `[lo, hi]`. Removes the
    /// last digits of bracketing noise left by golden section.
    fn polish(&self, mut d: f64, lo: f64, hi: f64) -> f64 {
        for _ in 0..NEWTON_STEPS {
            let (g, h) = self.derivatives(d);
            if !(h > 0.0 && g.is_finite()) {
                break;
            }
            let next = (d - g / h).clamp(lo, hi);
            if (next - d).abs() <= 1e-15 * (1.0 + d.abs()) {
                return next;
            }
            d = next;
        }
        d
    }
}

/// Objective `R(d)` for `(j, I(ω_j))` pairs from a series of length `n`.
pub fn gse_objective(ordinates: &[(usize, f64)], d: f64, n: usize, p: usize) -> Result<f64> {
    Ok(GseObjective::new(ordinates, n, p)?.value(d))
}

/// Minimize `R` over `[delta1, delta2]`: a 129-point grid, then golden
/// section on the bracket around the best grid point.
pub fn minimize_objective(obj: &GseObjective, delta1: f64, delta2: f64) -> (f64, f64, Option<BoundaryCode>) {
    let step = (delta2 - delta1) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| if i == GRID_POINTS - 1 { delta2 } else { delta1 + step * i as f64 })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&d| obj.value(d)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < values[b] { i } else { b });

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(GRID_POINTS - 1)];
    let (mut x, mut fx) = golden_section(|d| obj.value(d), lo, hi, GOLDEN_TOL);
    // Golden section never lands on the bracket ends; check them explicitly.
    for end in [lo, hi] {
        let fe = obj.value(end);
        if fe < fx {
            x = end;
            fx = fe;
        }
    }
    if x > lo && x < hi {
        let polished = obj.polish(x, lo, hi);
        let fp = obj.value(polished);
        if fp <= fx + 1e-12 * fx.abs().max(1.0) {
            x = polished;
            fx = fp;
        }
    }
    let boundary = if x - delta1 <= BOUNDARY_TOL {
        Some(BoundaryCode::Lower)
    } else if delta2 - x <= BOUNDARY_TOL {
        Some(BoundaryCode::Upper)
    } else {
        None
    };
    (x, fx, boundary)
}

/// GSE of the memory parameter of `residual`.
pub fn gse_estimate(residual: &[f64], config: &GseConfig, taper: &TaperSpec) -> Result<MemoryEstimate> {
    let n = residual.len();
    config.validate(n)?;
    if taper.p() != config.p {
        return Err(Error::arg(
            "p",
            format!("taper order {} differs from estimator order {}", taper.p(), config.p),
        ));
    }
    let first = config.first_frequency();
    let last = config.last_frequency();
    let values = periodogram_ordinates(residual, taper, first, last)?;
    // Rounding leaves ordinates near 1e-32 for series the taper annihilates
    // exactly (constants, low-order polynomials).
    let energy = residual.iter().map(|v| v * v).sum::<f64>() / (2.0 * PI);
    if values.iter().all(|&v| v <= DEGENERATE_RATIO * energy) {
        return Err(Error::DegenerateResidual);
    }
    let pairs: Vec<(usize, f64)> = (first..=last).zip(values).collect();
    let obj = GseObjective::new(&pairs, n, config.p)?;
    let (d_hat, objective_min, boundary) = minimize_objective(&obj, config.delta1, config.delta2);
    Ok(MemoryEstimate {
        d_hat,
        se: standard_error(config.p, config.m_n)?,
        m_n: config.m_n,
        objective_min,
        band: (first, last),
        converged: boundary.is_none(),
        boundary,
    })
}

/// `√(Φ_p / (4 m_n))`.
pub fn standard_error(p: usize, m_n: usize) -> Result<f64> {
    if m_n == 0 {
        return Err(Error::arg("m_n", "bandwidth must be positive"));
    }
    Ok((phi_p(p)? / (4.0 * m_n as f64)).sqrt())
}
