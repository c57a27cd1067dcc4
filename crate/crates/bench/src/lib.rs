//! Fixtures shared by the criterion benchmarks.

use cohesive_core::models::{lie_dualizing_data, LieAlgebraData};
use cohesive_core::functors::DualizingData;
use cohesive_core::{CohesiveModule, Scalar, SparseMatrix};
use std::sync::Arc;

/// A dense n×n integer matrix with entries in -3..=3 and rank n - 1.
pub fn singular_matrix(n: usize) -> SparseMatrix {
    let mut rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| Scalar::from_int(((i * 7 + j * 5 + i * j) % 7) as i64 - 3)).collect())
        .collect();
    if n > 1 {
        // The last row repeats the sum of the first two.
        rows[n - 1] = (0..n).map(|j| &rows[0][j] + &rows[1][j]).collect();
    }
    SparseMatrix::from_dense(rows)
}

/// Dualizing data for a Lie algebra with its trivial rank-one module.
pub fn lie_fixture(l: &LieAlgebraData) -> (DualizingData, Arc<CohesiveModule>) {
    let d = lie_dualizing_data(l);
    let o = Arc::new(CohesiveModule::rank_one("O", d.algebra().clone(), 0));
    (d, o)
}

/// A cyclotomic scalar with every power-basis coordinate nonzero.
pub fn dense_scalar(n: u32, shift: i64) -> Scalar {
    (0..n as i64).fold(Scalar::zero(), |s, k| &s + &(&Scalar::from_ratio(k + shift, 3) * &Scalar::zeta(n, k)))
}
