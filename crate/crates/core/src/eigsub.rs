//! Eigen-analysis of the averaged periodogram: a cyclic Jacobi solver,
//! grouping of eigenvectors into estimated subspaces, residual series and
//! the sin Θ distance between subspaces.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{normalize_sign, orthogonal_complement, orthonormality_deviation};
use crate::spectral::SeriesMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-8;
const ORTHONORMAL_TOL: f64 = 1e-8;
const COMPLEMENT_PIVOT: f64 = 1e-8;
const TIE_TOL: f64 = 1e-14;

/// Eigenvalues in descending order, with eigenvector `j` in column `j`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub source_trace: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `X Λ Xᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues));
        &self.eigenvectors * lambda * self.eigenvectors.transpose()
    }

    /// True when the smallest eigenvalue sits at rounding level relative to the largest.
    pub fn is_ill_conditioned(&self) -> bool {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(&hi), Some(&lo)) => lo < 1e-12 * hi,
            _ => false,
        }
    }
}

/// Contiguous grouping `(a_0, …, a_s)` of eigenvectors in eigenvalue order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubspacePartition {
    sizes: Vec<usize>,
}

impl SubspacePartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::arg("partition", "at least one group is required"));
        }
        if sizes.contains(&0) {
            return Err(Error::arg("partition", "group sizes must be positive"));
        }
        Ok(Self { sizes })
    }

    /// The single-group partition of `R^q`.
    pub fn whole(q: usize) -> Self {
        Self { sizes: vec![q] }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of cointegrating subspaces `s`.
    pub fn s(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn q(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Cointegrating rank `r = a_1 + … + a_s`.
    pub fn rank(&self) -> usize {
        self.q() - self.sizes[0]
    }

    /// Column index ranges `N_0, …, N_s` (zero-based, half-open).
    pub fn ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.sizes
            .iter()
            .map(|&a| {
                let r = start..start + a;
                start += a;
                r
            })
            .collect()
    }

    /// Group index of column `a`.
    pub fn group_of(&self, column: usize) -> Option<usize> {
        self.ranges().iter().position(|r| r.contains(&column))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let sizes = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::arg("partition", format!("not a positive integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }
}

impl TryFrom<Vec<usize>> for SubspacePartition {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        Self::new(sizes)
    }
}

impl From<SubspacePartition> for Vec<usize> {
    fn from(p: SubspacePartition) -> Self {
        p.sizes
    }
}

impl std::fmt::Display for SubspacePartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations, eigenvalues
/// sorted descending and eigenvector signs normalized.
pub fn eig_sym_desc(matrix: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let q = matrix.nrows();
    if q == 0 || matrix.ncols() != q {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a non-empty square matrix, got {}×{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let norm = frobenius(matrix);
    let mut asymmetry: f64 = 0.0;
    for i in 0..q {
        for j in 0..i {
            asymmetry = asymmetry.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if asymmetry > SYMMETRY_TOL * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let source_trace = matrix.trace();
    let mut a = (matrix + matrix.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(q, q);
    // Indefinite inputs can have a vanishing trace, so fall back to the norm.
    let tol = OFF_DIAGONAL_TOL * source_trace.abs().max(norm);

    let max_off = |a: &DMatrix<f64>| {
        let mut worst: f64 = 0.0;
        for i in 0..q {
            for j in (i + 1)..q {
                worst = worst.max(a[(i, j)].abs());
            }
        }
        worst
    };

    let mut sweeps = 0;
    while max_off(&a) >= tol && tol > 0.0 {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: max_off(&a),
            });
        }
        sweeps += 1;
        for p in 0..q {
            for r in (p + 1)..q {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..q {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..q {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..q {
                    let vkp = v[(k, p)];
                    let vkr = v[(k, r)];
                    v[(k, p)] = c * vkp - s * vkr;
                    v[(k, r)] = s * vkp + c * vkr;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..q)
        .map(|j| {
            let mut col: Vec<f64> = v.column(j).iter().copied().collect();
            normalize_sign(&mut col);
            (a[(j, j)], col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal));

    // Runs of numerically tied eigenvalues are ordered lexicographically
    // (descending) by their sign-normalized eigenvectors.
    let scale = source_trace.abs().max(norm);
    let mut start = 0;
    while start < q {
        let mut end = start + 1;
        while end < q && (pairs[end - 1].0 - pairs[end].0).abs() <= TIE_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lexicographic(&y.1, &x.1));
        }
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = DMatrix::from_fn(q, q, |i, j| pairs[j].1[i]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        source_trace,
    })
}

fn lexicographic(x: &[f64], y: &[f64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match a.partial_cmp(b) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Split the eigenvectors into `X_0, …, X_s` following `partition`.
pub fn group_eigenvectors(
    decomp: &EigenDecomposition,
    partition: &SubspacePartition,
) -> Result<Vec<DMatrix<f64>>> {
    if partition.q() != decomp.dim() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} columns, decomposition has {}",
            partition.q(),
            decomp.dim()
        )));
    }
    Ok(partition
        .ranges()
        .into_iter()
        .map(|r| decomp.eigenvectors.columns(r.start, r.len()).into_owned())
        .collect())
}

/// Residuals `w_t = Xᵀ y_t`; column `a` is the residual for eigenvector `a`.
pub fn residual_series(series: &SeriesMatrix, x: &DMatrix<f64>) -> Result<SeriesMatrix> {
    if x.nrows() != series.q() {
        return Err(Error::DimensionMismatch(format!(
            "projection has {} rows, series has {} columns",
            x.nrows(),
            series.q()
        )));
    }
    let deviation = orthonormality_deviation(x);
    if deviation > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    SeriesMatrix::new(series.values() * x)
}

/// `‖sin Θ(M(S), M(T))‖_F`, computed as `‖(T⊥)ᵀ S‖_F`.
pub fn subspace_sin_theta(s: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<f64> {
    if s.ncols() != t.ncols() || s.nrows() != t.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "subspace bases differ in shape: {}×{} vs {}×{}",
            s.nrows(),
            s.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    for m in [s, t] {
        let deviation = orthonormality_deviation(m);
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
    }
    let complement = orthogonal_complement(t, COMPLEMENT_PIVOT);
    if complement.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(frobenius(&(complement.transpose() * s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = eig_sym_desc(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        let expected = [0usize, 2, 1];
        for (col, &axis) in expected.iter().enumerate() {
            assert!(close(e.eigenvectors[(axis, col)].abs(), 1.0, 1e-15));
        }
    }

    #[test]
    fn two_by_two_analytic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = eig_sym_desc(&m).unwrap();
        assert!(close(e.eigenvalues[0], 3.0, 1e-14));
        assert!(close(e.eigenvalues[1], 1.0, 1e-14));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(e.eigenvectors[(0, 0)], r, 1e-14));
        assert!(close(e.eigenvectors[(1, 0)], r, 1e-14));
        // Sign convention: first largest-magnitude component positive.
        assert!(close(e.eigenvectors[(0, 1)], r, 1e-14));
        assert!(close(e.eigenvectors[(1, 1)], -r, 1e-14));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(eig_sym_desc(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn ties_break_deterministically() {
        let e = eig_sym_desc(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(e.eigenvectors, DMatrix::identity(3, 3));
        let e2 = eig_sym_desc(&(DMatrix::identity(3, 3) * 2.0)).unwrap();
        assert_eq!(e2.eigenvectors, e.eigenvectors);
    }

    #[test]
    fn zero_matrix_is_fine() {
        let e = eig_sym_desc(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        assert!(!e.is_ill_conditioned());
    }

    #[test]
    fn grouping_examples() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![5.0, 3.0, 1.0]));
        let e = eig_sym_desc(&m).unwrap();
        let whole = group_eigenvectors(&e, &SubspacePartition::whole(3)).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0], e.eigenvectors);
        let g = group_eigenvectors(&e, &SubspacePartition::new(vec![2, 1]).unwrap()).unwrap();
        assert_eq!(g[0], e.eigenvectors.columns(0, 2).into_owned());
        assert_eq!(g[1], e.eigenvectors.columns(2, 1).into_owned());
        let singles = group_eigenvectors(&e, &SubspacePartition::new(vec![1, 1, 1]).unwrap()).unwrap();
        for (k, gk) in singles.iter().enumerate() {
            assert_eq!(*gk, e.eigenvectors.columns(k, 1).into_owned());
        }
        assert!(group_eigenvectors(&e, &SubspacePartition::new(vec![2, 2]).unwrap()).is_err());
    }

    #[test]
    fn partition_accessors() {
        let p = SubspacePartition::parse("2, 1,3").unwrap();
        assert_eq!(p.s(), 2);
        assert_eq!(p.q(), 6);
        assert_eq!(p.rank(), 4);
        assert_eq!(p.group_of(2), Some(1));
        assert_eq!(p.group_of(5), Some(2));
        assert_eq!(p.to_string(), "2,1,3");
        assert!(SubspacePartition::parse("2,0").is_err());
        assert!(SubspacePartition::parse("x").is_err());
    }

    #[test]
    fn residuals_identity_and_permutation() {
        let y = SeriesMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let w = residual_series(&y, &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(w, y);
        let perm = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let w = residual_series(&y, &perm).unwrap();
        assert_eq!(w.column(0), y.column(1));
        assert_eq!(w.column(1), y.column(2));
        assert_eq!(w.column(2), y.column(0));
        assert!(residual_series(&y, &DMatrix::identity(2, 2)).is_err());
        assert!(residual_series(&y, &(DMatrix::identity(3, 3) * 2.0)).is_err());
    }

    #[test]
    fn sin_theta_examples() {
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert_eq!(subspace_sin_theta(&e1, &e1).unwrap(), 0.0);
        assert!(close(subspace_sin_theta(&e1, &e2).unwrap(), 1.0, 1e-15));
        let th = PI / 6.0;
        let s = DMatrix::from_column_slice(2, 1, &[th.cos(), th.sin()]);
        assert!(close(subspace_sin_theta(&s, &e1).unwrap(), 0.5, 1e-12));
        // Complement identity in the scalar case.
        let cos = (e1.transpose() * &s)[(0, 0)].abs();
        let sin = subspace_sin_theta(&s, &e1).unwrap();
        assert!(close(sin * sin + cos * cos, 1.0, 1e-10));
    }

    #[test]
    fn sin_theta_errors() {
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::identity(3, 2);
        assert!(matches!(subspace_sin_theta(&a, &b), Err(Error::DimensionMismatch(_))));
        let bad = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0]);
        assert!(matches!(subspace_sin_theta(&bad, &a), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn full_dimension_subspaces_coincide() {
        let a = DMatrix::identity(3, 3);
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(subspace_sin_theta(&a, &m).unwrap(), 0.0);
    }
}
