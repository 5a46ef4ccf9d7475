//! Small dense helpers shared by the subspace and simulation code.

use nalgebra::{DMatrix, DVector};

/// Largest absolute entry of `SᵀS − I`.
pub fn orthonormality_deviation(s: &DMatrix<f64>) -> f64 {
    let gram = s.transpose() * s;
    let mut worst: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Flip `v` so that its first component of largest magnitude is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v.get(pivot).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn normalize_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        normalize_sign(col.as_mut_slice());
    }
}

/// Orthogonalize `v` against the columns in `basis` (two passes of
/// modified Gram–Schmidt) and return the residual.
fn project_out(basis: &[DVector<f64>], mut v: DVector<f64>) -> DVector<f64> {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
    }
    v
}

/// Gram–Schmidt over the columns of `a` in order. Returns `None` if some
/// column is dependent on its predecessors to within `tol` (relative to its norm).
pub fn orthonormalize_columns(a: &DMatrix<f64>, tol: f64) -> Option<DMatrix<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(a.ncols());
    for col in a.column_iter() {
        let v: DVector<f64> = col.into_owned();
        let scale = v.norm();
        if scale == 0.0 {
            return None;
        }
        let r = project_out(&basis, v);
        let norm = r.norm();
        if norm <= tol * scale {
            return None;
        }
        basis.push(r / norm);
    }
    Some(DMatrix::from_columns(&basis))
}

/// Orthonormal basis of the orthogonal complement of `M(t)`: canonical
/// vectors are appended and orthogonalized, skipping those whose residual
/// norm falls below `pivot`.
pub fn orthogonal_complement(t: &DMatrix<f64>, pivot: f64) -> DMatrix<f64> {
    let q = t.nrows();
    let mut basis: Vec<DVector<f64>> = t.column_iter().map(|c| c.into_owned()).collect();
    let start = basis.len();
    for e in 0..q {
        if basis.len() == q {
            break;
        }
        let r = project_out(&basis, DVector::from_fn(q, |i, _| if i == e { 1.0 } else { 0.0 }));
        let norm = r.norm();
        if norm > pivot {
            basis.push(r / norm);
        }
    }
    if basis.len() == start {
        return DMatrix::zeros(q, 0);
    }
    DMatrix::from_columns(&basis[start..])
}
