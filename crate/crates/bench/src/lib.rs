//! Fixtures shared by the benchmarks.

use fracsub::{simulate_model, SeriesMatrix, SimSpec, SubspacePartition};
use nalgebra::DMatrix;

/// Cointegrated series with partition `(q − 1, 1)` and memory `(0.4, 0.0)`.
pub fn cointegrated_series(n: usize, q: usize, seed: u64) -> SeriesMatrix {
    let partition = SubspacePartition::new(vec![q - 1, 1]).expect("q ≥ 2");
    let spec = SimSpec::new(partition, vec![0.4, 0.0], n, 2, seed);
    simulate_model(&spec).expect("valid spec").series
}

/// Deterministic symmetric matrix with distinct eigenvalues.
pub fn symmetric_matrix(q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(q, q, |i, j| {
        let (a, b) = (i.min(j) as f64, i.max(j) as f64);
        if i == j {
            q as f64 + a
        } else {
            ((a + 1.0) * (b + 2.0)).sin()
        }
    })
}
