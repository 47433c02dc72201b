//! Random measurement operators `Φ` and their adjoints.
//!
//! A `MeasurementMatrix` compresses an `N`-vector to an `M`-vector
//! (`M ≤ N`). Three kinds are supported: the identity (no compression, so
//! uncompressed and compressed training share one code path), dense Gaussian,
//! and row-sparse matrices whose rows each hold exactly `s` entries in
//! `{−1, +1}`. A matrix is fully determined by `(kind, M, N, s, seed)`; that
//! five-field record is the only thing ever persisted, and regenerating from
//! it reproduces the matrix bit-for-bit within one build.

use ndarray::{Array1, Array2};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{RandNetError, Result};
use crate::rng::rng_from_seed;

/// Variance convention for dense Gaussian entries. The default `OverM`
/// (entries `N(0, 1/M)`) makes `E‖Φy‖² ≈ ‖y‖²`; the alternatives exist for
/// ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussianVariance {
    /// Entries `N(0, 1/M)` (default).
    OverM,
    /// Entries `N(0, 1/N)`.
    OverN,
    /// Entries `N(0, 1)`.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Identity,
    Gaussian,
    RowSparse,
}

#[derive(Debug, Clone)]
enum Storage {
    Identity,
    /// Row-major `M×N` entries.
    Dense(Array2<f64>),
    /// Per row: `s` pairs of (column index, ±1), indices strictly increasing.
    RowSparse(Vec<Vec<(usize, f64)>>),
}

/// A seeded measurement operator.
#[derive(Debug, Clone)]
pub struct MeasurementMatrix {
    kind: MatrixKind,
    m: usize,
    n: usize,
    seed: u64,
    /// Nonzeros per row; meaningful for `RowSparse` only (0 otherwise).
    s: usize,
    storage: Storage,
}

/// The persisted identity of a measurement matrix: exactly the five fields
/// needed to regenerate it. Never the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub kind: MatrixKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub seed: u64,
}

impl MeasurementMatrix {
    /// The `M = N` identity operator (the uncompressed configuration).
    pub fn identity(n: usize) -> Self {
        MeasurementMatrix {
            kind: MatrixKind::Identity,
            m: n,
            n,
            seed: 0,
            s: 0,
            storage: Storage::Identity,
        }
    }

    /// Dense Gaussian matrix with i.i.d. `N(0, 1/M)` entries.
    pub fn gen_gaussian(m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::gen_gaussian_var(m, n, seed, GaussianVariance::OverM)
    }

    /// Dense Gaussian matrix with an explicit variance convention.
    ///
    /// Only the `OverM` form round-trips through [`PhiSpec`]; the others are
    /// experiment-local ablations.
    pub fn gen_gaussian_var(
        m: usize,
        n: usize,
        seed: u64,
        variance: GaussianVariance,
    ) -> Result<Self> {
        check_dims(m, n)?;
        let sigma = match variance {
            GaussianVariance::OverM => (1.0 / m as f64).sqrt(),
            GaussianVariance::OverN => (1.0 / n as f64).sqrt(),
            GaussianVariance::Unit => 1.0,
        };
        let mut rng = rng_from_seed(seed);
        let mut data = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            let g: f64 = StandardNormal.sample(&mut rng);
            data.push(sigma * g);
        }
        let mat = Array2::from_shape_vec((m, n), data).expect("shape matches allocation");
        Ok(MeasurementMatrix {
            kind: MatrixKind::Gaussian,
            m,
            n,
            seed,
            s: 0,
            storage: Storage::Dense(mat),
        })
    }

    /// Row-sparse matrix: each row has exactly `s` nonzeros at distinct
    /// uniformly random columns, each `−1` or `+1` with equal probability.
    pub fn gen_row_sparse(m: usize, n: usize, s: usize, seed: u64) -> Result<Self> {
        check_dims(m, n)?;
        if s == 0 || s > n {
            return Err(RandNetError::Sparsity { s, n });
        }
        let mut rng = rng_from_seed(seed);
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let mut cols: Vec<usize> = sample_indices(&mut rng, n, s).into_vec();
            cols.sort_unstable();
            let row: Vec<(usize, f64)> = cols
                .into_iter()
                .map(|c| (c, if rng.gen::<bool>() { 1.0 } else { -1.0 }))
                .collect();
            rows.push(row);
        }
        Ok(MeasurementMatrix {
            kind: MatrixKind::RowSparse,
            m,
            n,
            seed,
            s,
            storage: Storage::RowSparse(rows),
        })
    }

    /// Regenerate a matrix from its persisted five-field identity.
    pub fn from_spec(spec: &PhiSpec) -> Result<Self> {
        match spec.kind {
            MatrixKind::Identity => {
                if spec.m != spec.n {
                    return Err(RandNetError::Dimension(format!(
                        "identity requires M = N, got {}×{}",
                        spec.m, spec.n
                    )));
                }
                Ok(Self::identity(spec.n))
            }
            MatrixKind::Gaussian => Self::gen_gaussian(spec.m, spec.n, spec.seed),
            MatrixKind::RowSparse => Self::gen_row_sparse(spec.m, spec.n, spec.s, spec.seed),
        }
    }

    /// The five-field identity used for persistence.
    pub fn spec(&self) -> PhiSpec {
        PhiSpec {
            kind: self.kind,
            m: self.m,
            n: self.n,
            s: self.s,
            seed: self.seed,
        }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Apply `Φ`: compress an `N`-vector to an `M`-vector. The row-sparse
    /// path costs `O(sM)` and never touches a dense matrix.
    pub fn project(&self, y: &Array1<f64>) -> Result<Array1<f64>> {
        if y.len() != self.n {
            return Err(RandNetError::Dimension(format!(
                "project: expected input of length {}, got {}",
                self.n,
                y.len()
            )));
        }
        Ok(match &self.storage {
            Storage::Identity => y.clone(),
            Storage::Dense(mat) => dense_matvec(mat, y),
            Storage::RowSparse(rows) => {
                let ys = y.as_slice().expect("contiguous");
                let mut out = Array1::zeros(self.m);
                for (oi, row) in out.iter_mut().zip(rows) {
                    let mut acc = 0.0;
                    for &(c, sign) in row {
                        acc += sign * ys[c];
                    }
                    *oi = acc;
                }
                out
            }
        })
    }

    /// Apply the adjoint `Φᵀ`: lift an `M`-vector back to length `N`. The
    /// row-sparse path costs `O(sM)` and produces at most `sM` nonzeros.
    pub fn adjoint(&self, r: &Array1<f64>) -> Result<Array1<f64>> {
        if r.len() != self.m {
            return Err(RandNetError::Dimension(format!(
                "adjoint: expected input of length {}, got {}",
                self.m,
                r.len()
            )));
        }
        Ok(match &self.storage {
            Storage::Identity => r.clone(),
            Storage::Dense(mat) => dense_matvec_t(mat, r),
            Storage::RowSparse(rows) => {
                let rs = r.as_slice().expect("contiguous");
                let mut out = Array1::zeros(self.n);
                let os = out.as_slice_mut().expect("contiguous");
                for (ri, row) in rs.iter().zip(rows) {
                    for &(c, sign) in row {
                        os[c] += sign * ri;
                    }
                }
                out
            }
        })
    }

    /// Materialize the dense `M×N` form. Test/benchmark oracle; not used on
    /// any training path.
    pub fn densify(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Identity => Array2::eye(self.n),
            Storage::Dense(mat) => mat.clone(),
            Storage::RowSparse(rows) => {
                let mut mat = Array2::zeros((self.m, self.n));
                for (i, row) in rows.iter().enumerate() {
                    for &(c, sign) in row {
                        mat[[i, c]] = sign;
                    }
                }
                mat
            }
        }
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Identity => self.n,
            Storage::Dense(_) => self.m * self.n,
            Storage::RowSparse(rows) => rows.iter().map(Vec::len).sum(),
        }
    }

    /// In-memory bytes of the entry storage (0 for the implicit identity).
    pub fn storage_bytes(&self) -> usize {
        match &self.storage {
            Storage::Identity => 0,
            Storage::Dense(mat) => mat.len() * std::mem::size_of::<f64>(),
            Storage::RowSparse(rows) => rows
                .iter()
                .map(|r| r.len() * std::mem::size_of::<(usize, f64)>())
                .sum(),
        }
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m > n {
        return Err(RandNetError::Dimension(format!(
            "measurement matrix needs 1 ≤ M ≤ N, got M={m}, N={n}"
        )));
    }
    Ok(())
}

/// Row-major `A·x` via per-row dot products (contiguous reads).
pub(crate) fn dense_matvec(mat: &Array2<f64>, x: &Array1<f64>) -> Array1<f64> {
    let (m, n) = mat.dim();
    let a = mat.as_slice().expect("row-major");
    let xs = x.as_slice().expect("contiguous");
    let mut out = Array1::zeros(m);
    for (i, oi) in out.iter_mut().enumerate() {
        let row = &a[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (aij, xj) in row.iter().zip(xs) {
            acc += aij * xj;
        }
        *oi = acc;
    }
    out
}

/// Row-major `Aᵀ·v` via row-scaled accumulation (contiguous reads/writes).
pub(crate) fn dense_matvec_t(mat: &Array2<f64>, v: &Array1<f64>) -> Array1<f64> {
    let (m, n) = mat.dim();
    let a = mat.as_slice().expect("row-major");
    let vs = v.as_slice().expect("contiguous");
    let mut out = Array1::zeros(n);
    let os = out.as_slice_mut().expect("contiguous");
    for i in 0..m {
        let vi = vs[i];
        if vi == 0.0 {
            continue;
        }
        let row = &a[i * n..(i + 1) * n];
        for (oj, aij) in os.iter_mut().zip(row) {
            *oj += vi * aij;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;
    use ndarray::Array1;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_vec(len: usize, seed: u64) -> Array1<f64> {
        let mut rng = rng_from_seed(seed);
        Array1::from_iter((0..len).map(|_| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn gaussian_deterministic_in_seed() {
        let a = MeasurementMatrix::gen_gaussian(2, 4, 7).unwrap();
        let b = MeasurementMatrix::gen_gaussian(2, 4, 7).unwrap();
        assert_eq!(a.densify(), b.densify());
        let c = MeasurementMatrix::gen_gaussian(2, 4, 8).unwrap();
        assert_ne!(a.densify(), c.densify());
    }

    #[test]
    fn gaussian_rejects_bad_dims() {
        assert!(MeasurementMatrix::gen_gaussian(5, 4, 0).is_err());
        assert!(MeasurementMatrix::gen_gaussian(0, 4, 0).is_err());
        assert!(MeasurementMatrix::gen_gaussian(4, 0, 0).is_err());
    }

    #[test]
    fn gaussian_beta_half_shape() {
        let phi = MeasurementMatrix::gen_gaussian(250, 500, 1).unwrap();
        assert_eq!(phi.rows(), 250);
        assert_eq!(phi.cols(), 500);
        assert!((phi.rows() as f64 / phi.cols() as f64 - 0.5).abs() < 1e-15);
    }

    // Sample mean of M·N i.i.d. N(0, 1/M) entries has standard deviation
    // 1/(M·√N); the 4/√(M·N) bound below is dozens of standard deviations
    // wide (checked by Monte-Carlo over 100 seeds before freezing).
    #[test]
    fn gaussian_entry_mean_small() {
        for seed in [1, 2, 3] {
            let phi = MeasurementMatrix::gen_gaussian(392, 784, seed).unwrap();
            let mean = phi.densify().mean().unwrap();
            let bound = 4.0 / ((392.0f64 * 784.0).sqrt());
            assert!(
                mean.abs() < bound,
                "seed {seed}: |mean| = {} ≥ {bound}",
                mean.abs()
            );
        }
    }

    #[test]
    fn row_sparse_one_per_row() {
        let phi = MeasurementMatrix::gen_row_sparse(3, 10, 1, 5).unwrap();
        let dense = phi.densify();
        for i in 0..3 {
            let nonzeros: Vec<f64> = dense.row(i).iter().copied().filter(|v| *v != 0.0).collect();
            assert_eq!(nonzeros.len(), 1);
            assert!(nonzeros[0] == 1.0 || nonzeros[0] == -1.0);
        }
    }

    #[test]
    fn row_sparse_one_by_one() {
        let phi = MeasurementMatrix::gen_row_sparse(1, 1, 1, 9).unwrap();
        let v = phi.densify()[[0, 0]];
        assert!(v == 1.0 || v == -1.0);
    }

    #[test]
    fn row_sparse_nnz_count() {
        let phi = MeasurementMatrix::gen_row_sparse(392, 784, 1, 2).unwrap();
        assert_eq!(phi.nnz(), 392);
    }

    #[test]
    fn row_sparse_distinct_columns_within_row() {
        let phi = MeasurementMatrix::gen_row_sparse(20, 30, 7, 3).unwrap();
        if let Storage::RowSparse(rows) = &phi.storage {
            for row in rows {
                assert_eq!(row.len(), 7);
                for pair in row.windows(2) {
                    assert!(pair[0].0 < pair[1].0);
                }
            }
        } else {
            panic!("expected row-sparse storage");
        }
    }

    #[test]
    fn row_sparse_rejects_oversparse() {
        assert!(matches!(
            MeasurementMatrix::gen_row_sparse(2, 4, 5, 0),
            Err(RandNetError::Sparsity { s: 5, n: 4 })
        ));
    }

    #[test]
    fn identity_project_adjoint_are_noops() {
        let phi = MeasurementMatrix::identity(6);
        let y = random_vec(6, 3);
        assert_eq!(phi.project(&y).unwrap(), y);
        assert_eq!(phi.adjoint(&y).unwrap(), y);
    }

    #[test]
    fn single_row_selects_entry() {
        // M=1, s=1: output is ± one coordinate of y.
        let phi = MeasurementMatrix::gen_row_sparse(1, 8, 1, 4).unwrap();
        let dense = phi.densify();
        let (k, sign) = dense
            .row(0)
            .iter()
            .enumerate()
            .find(|(_, v)| **v != 0.0)
            .map(|(k, v)| (k, *v))
            .unwrap();
        let y = random_vec(8, 11);
        let r = phi.project(&y).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - sign * y[k]).abs() < 1e-15);
    }

    #[test]
    fn row_sparse_matches_dense_oracle() {
        let phi = MeasurementMatrix::gen_row_sparse(50, 100, 3, 17).unwrap();
        let dense = phi.densify();
        for trial in 0..20 {
            let y = random_vec(100, 100 + trial);
            let fast = phi.project(&y).unwrap();
            let slow = dense.dot(&y);
            let err = (&fast - &slow).iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "project trial {trial}: max err {err}");

            let r = random_vec(50, 200 + trial);
            let fast_t = phi.adjoint(&r).unwrap();
            let slow_t = dense.t().dot(&r);
            let err_t = (&fast_t - &slow_t)
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max);
            assert!(err_t < 1e-12, "adjoint trial {trial}: max err {err_t}");
        }
    }

    #[test]
    fn dense_gaussian_matches_dense_oracle() {
        let phi = MeasurementMatrix::gen_gaussian(25, 60, 23).unwrap();
        let dense = phi.densify();
        let y = random_vec(60, 31);
        let r = random_vec(25, 32);
        let p_err = (&phi.project(&y).unwrap() - &dense.dot(&y))
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        let a_err = (&phi.adjoint(&r).unwrap() - &dense.t().dot(&r))
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(p_err < 1e-12 && a_err < 1e-12);
    }

    #[test]
    fn project_rejects_wrong_length() {
        let phi = MeasurementMatrix::gen_gaussian(3, 5, 0).unwrap();
        assert!(phi.project(&Array1::zeros(4)).is_err());
        assert!(phi.adjoint(&Array1::zeros(5)).is_err());
    }

    #[test]
    fn adjoint_identity_all_kinds() {
        // ⟨Φy, r⟩ = ⟨y, Φᵀr⟩ over 100 random pairs per kind.
        let kinds: Vec<MeasurementMatrix> = vec![
            MeasurementMatrix::identity(40),
            MeasurementMatrix::gen_gaussian(25, 40, 3).unwrap(),
            MeasurementMatrix::gen_row_sparse(25, 40, 2, 4).unwrap(),
        ];
        for phi in &kinds {
            for trial in 0..100 {
                let y = random_vec(phi.cols(), derive_seed(50, trial));
                let r = random_vec(phi.rows(), derive_seed(51, trial));
                let lhs = phi.project(&y).unwrap().dot(&r);
                let rhs = y.dot(&phi.adjoint(&r).unwrap());
                let y_norm = y.dot(&y).sqrt();
                let r_norm = r.dot(&r).sqrt();
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * (y_norm * r_norm + 1.0),
                    "{:?}: trial {trial}, |{lhs} - {rhs}|",
                    phi.kind()
                );
            }
        }
    }

    #[test]
    fn spec_roundtrip_is_byte_identical() {
        let phi = MeasurementMatrix::gen_row_sparse(13, 29, 4, 99).unwrap();
        let json = serde_json::to_string(&phi.spec()).unwrap();
        let spec: PhiSpec = serde_json::from_str(&json).unwrap();
        let again = MeasurementMatrix::from_spec(&spec).unwrap();
        assert_eq!(phi.densify(), again.densify());

        let phi = MeasurementMatrix::gen_gaussian(8, 16, 42).unwrap();
        let again = MeasurementMatrix::from_spec(&phi.spec()).unwrap();
        // bit-for-bit, not approximate
        assert_eq!(phi.densify(), again.densify());
    }

    #[test]
    fn spec_json_has_exactly_five_fields() {
        let phi = MeasurementMatrix::gen_gaussian(2, 3, 1).unwrap();
        let value: serde_json::Value = serde_json::to_value(phi.spec()).unwrap();
        let obj = value.as_object().unwrap();
        assert_eq!(obj.len(), 5);
        for key in ["kind", "m", "n", "s", "seed"] {
            assert!(obj.contains_key(key), "missing {key}");
        }
    }

    proptest! {
        #[test]
        fn prop_adjoint_consistency(
            m in 1usize..12,
            extra in 0usize..12,
            s in 1usize..4,
            seed in 0u64..1000,
        ) {
            let n = m + extra;
            let s = s.min(n);
            let phi = MeasurementMatrix::gen_row_sparse(m, n, s, seed).unwrap();
            let y = random_vec(n, seed ^ 0xabcd);
            let r = random_vec(m, seed ^ 0x1234);
            let lhs = phi.project(&y).unwrap().dot(&r);
            let rhs = y.dot(&phi.adjoint(&r).unwrap());
            let scale = y.dot(&y).sqrt() * r.dot(&r).sqrt() + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }

        #[test]
        fn prop_row_sparse_exact_support(
            m in 1usize..10,
            extra in 0usize..20,
            s in 1usize..5,
            seed in 0u64..1000,
        ) {
            let n = (m + extra).max(s);
            let phi = MeasurementMatrix::gen_row_sparse(m, n, s, seed).unwrap();
            prop_assert_eq!(phi.nnz(), m * s);
        }
    }
}
