//! Identification of the subspace partition from ordered memory estimates,
//! and the conservative residual-based test of no fractional cointegration.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::eigsub::SubspacePartition;
use crate::error::{Error, Result};
use crate::gse::phi_p;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error below 1.2e-9) followed
/// by one Halley step against the erfc-based CDF.
pub fn normal_quantile(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::arg("probability", format!("{prob} is outside (0, 1)")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if prob < P_LOW {
        let q = (-2.0 * prob.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if prob <= 1.0 - P_LOW {
        let q = prob - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - prob).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    let e = normal_cdf(x) - prob;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    Ok(x - u / (1.0 + x * u / 2.0))
}

/// Gap rule `d̂_j − d̂_{j+1} > C · m_n^{−1/2+ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentificationRule {
    pub c: f64,
    pub epsilon: f64,
}

impl Default for IdentificationRule {
    fn default() -> Self {
        Self { c: 2.0, epsilon: 0.1 }
    }
}

impl IdentificationRule {
    pub fn new(c: f64, epsilon: f64) -> Result<Self> {
        let rule = Self { c, epsilon };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::arg("C", format!("must be positive, got {}", self.c)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::arg("epsilon", format!("must lie in (0, 1/2), got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn threshold(&self, m_n: usize) -> f64 {
        self.c * (m_n as f64).powf(-0.5 + self.epsilon)
    }
}

/// One consecutive comparison in the identification procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    /// 1-based position `j` of the pair `(j, j+1)`.
    pub position: usize,
    pub gap: f64,
    pub threshold: f64,
    pub boundary: bool,
    /// `d̂_j < d̂_{j+1}`: estimates out of eigenvalue order.
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    pub partition: SubspacePartition,
    pub threshold: f64,
    pub gaps: Vec<GapRow>,
}

/// Partition estimates kept in eigenvalue order; a boundary goes between
/// `j` and `j+1` exactly when `d̂_j − d̂_{j+1}` exceeds the threshold.
pub fn identify_partition(
    d_hats: &[f64],
    m_n: usize,
    rule: &IdentificationRule,
) -> Result<SubspacePartition> {
    Ok(identify_with_diagnostics(d_hats, m_n, rule)?.partition)
}

pub fn identify_with_diagnostics(
    d_hats: &[f64],
    m_n: usize,
    rule: &IdentificationRule,
) -> Result<Identification> {
    if d_hats.is_empty() {
        return Err(Error::arg("d_hats", "need at least one estimate"));
    }
    if m_n == 0 {
        return Err(Error::arg("m_n", "bandwidth must be positive"));
    }
    rule.validate()?;
    let threshold = rule.threshold(m_n);
    let mut sizes = Vec::new();
    let mut current = 1;
    let mut gaps = Vec::with_capacity(d_hats.len().saturating_sub(1));
    for (j, pair) in d_hats.windows(2).enumerate() {
        let gap = pair[0] - pair[1];
        let boundary = gap > threshold;
        gaps.push(GapRow {
            position: j + 1,
            gap,
            threshold,
            boundary,
            negative: gap < 0.0,
        });
        if boundary {
            sizes.push(current);
            current = 1;
        } else {
            current += 1;
        }
    }
    sizes.push(current);
    Ok(Identification {
        partition: SubspacePartition::new(sizes)?,
        threshold,
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub t_n: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    /// Upper bound on the one-sided p-value; not an exact p-value.
    pub conservative_p_upper: f64,
}

/// `T_n = √m_n (d̂_first − d̂_last)`, rejected when `T_n > √(Φ_p/2) z_{α/2}`.
pub fn cointegration_test(
    d_hat_first: f64,
    d_hat_last: f64,
    m_n: usize,
    p: usize,
    alpha: f64,
) -> Result<TestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::arg("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if m_n == 0 {
        return Err(Error::arg("m_n", "bandwidth must be positive"));
    }
    let scale = (phi_p(p)? / 2.0).sqrt();
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let t_n = (m_n as f64).sqrt() * (d_hat_first - d_hat_last);
    let critical_value = scale * z;
    let conservative_p_upper = (1.0 - normal_cdf(t_n / scale)).clamp(0.0, 1.0);
    Ok(TestResult {
        t_n,
        critical_value,
        alpha,
        reject: t_n > critical_value,
        conservative_p_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_roundtrip() {
        for alpha in [0.1, 0.05, 0.01] {
            for prob in [alpha / 2.0, 1.0 - alpha / 2.0, alpha, 1.0 - alpha] {
                let z = normal_quantile(prob).unwrap();
                assert!((normal_cdf(z) - prob).abs() < 1e-9);
            }
        }
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
    }

    #[test]
    fn identification_examples() {
        let rule = IdentificationRule::new(1.0, 0.1).unwrap();
        // Pick m_n so the threshold is easy to reason about, then check the
        // printed example with an explicit 0.05 threshold.
        let ident = identify_with_diagnostics(&[0.40, 0.38, 0.10], 1, &IdentificationRule { c: 0.05, epsilon: 0.25 }).unwrap();
        assert!((ident.threshold - 0.05).abs() < 1e-15);
        assert_eq!(ident.partition.sizes(), &[2, 1]);
        assert_eq!(ident.partition.s(), 1);

        let flat = identify_partition(&[0.2; 4], 100, &rule).unwrap();
        assert_eq!(flat.sizes(), &[4]);

        let spread = identify_partition(&[0.4, 0.0, -0.4, -0.8], 100, &rule).unwrap();
        assert_eq!(spread.sizes(), &[1, 1, 1, 1]);
        assert_eq!(spread.s(), 3);
    }

    #[test]
    fn negative_gaps_never_split() {
        let rule = IdentificationRule::default();
        let ident = identify_with_diagnostics(&[0.0, 0.9, 0.1], 400, &rule).unwrap();
        assert!(ident.gaps[0].negative);
        assert!(!ident.gaps[0].boundary);
        assert!(ident.gaps[1].boundary);
        assert_eq!(ident.partition.sizes(), &[2, 1]);
    }

    #[test]
    fn rule_validation() {
        assert!(IdentificationRule::new(0.0, 0.1).is_err());
        assert!(IdentificationRule::new(1.0, 0.0).is_err());
        assert!(IdentificationRule::new(1.0, 0.5).is_err());
    }

    #[test]
    fn test_examples() {
        let none = cointegration_test(0.3, 0.3, 200, 2, 0.5).unwrap();
        assert_eq!(none.t_n, 0.0);
        assert!(!none.reject);
        assert!((none.conservative_p_upper - 0.5).abs() < 1e-15);

        let r = cointegration_test(0.35, 0.15, 400, 1, 0.05).unwrap();
        assert!((r.t_n - 4.0).abs() < 1e-12);
        assert!((r.critical_value - 0.5f64.sqrt() * 1.959_963_984_540_054).abs() < 1e-9);
        assert!(r.reject);

        let c2 = cointegration_test(0.0, 0.0, 10, 2, 0.05).unwrap();
        assert!((c2.critical_value - 0.75f64.sqrt() * 1.959_963_984_540_054).abs() < 1e-9);
        assert!((c2.critical_value - 1.6974).abs() < 5e-5);

        assert!(cointegration_test(0.0, 0.0, 10, 2, 1.0).is_err());
        assert!(cointegration_test(0.0, 0.0, 10, 2, 0.0).is_err());
    }
}
