//! The trainable dictionary `A` and its step-size bound.
//!
//! `A` is `N×p` with unit-norm columns (the norm constraint removes the
//! scaling ambiguity between dictionary and codes). The FISTA step size is
//! `1/L` with `L` an upper bound on `λ_max(AᵀΦᵀΦA)`, estimated here by power
//! iteration on the chained operator.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{RandNetError, Result};
use crate::measurement::MeasurementMatrix;
use crate::rng::rng_from_seed;

/// Columns with norm at or below this are treated as degenerate.
const MIN_COLUMN_NORM: f64 = 1e-12;

/// An `N×p` dictionary with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    a: Array2<f64>,
}

impl Dictionary {
    /// Wrap a matrix without normalizing. Columns must be nonzero.
    pub fn from_matrix(a: Array2<f64>) -> Result<Self> {
        check_columns(&a)?;
        Ok(Dictionary { a })
    }

    /// Random initialization: i.i.d. `N(0, 1/N)` entries, columns then
    /// normalized to unit length.
    pub fn init_gaussian(n: usize, p: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let sigma = (1.0 / n as f64).sqrt();
        let mut a = Array2::zeros((n, p));
        for v in a.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut rng);
            *v = sigma * g;
        }
        let mut dict = Dictionary { a };
        dict.normalize_columns()
            .expect("gaussian draw has nonzero columns");
        dict
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    /// Data dimension `N`.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Code dimension `p`.
    pub fn p(&self) -> usize {
        self.a.ncols()
    }

    /// Divide every column by its ℓ₂ norm. Near-zero columns signal
    /// training divergence and error out.
    pub fn normalize_columns(&mut self) -> Result<()> {
        for (col, mut c) in self.a.columns_mut().into_iter().enumerate() {
            let norm = c.dot(&c).sqrt();
            if norm <= MIN_COLUMN_NORM {
                return Err(RandNetError::DegenerateDictionary { col, norm });
            }
            c.mapv_inplace(|v| v / norm);
        }
        Ok(())
    }

    /// A normalized copy.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        out.normalize_columns()?;
        Ok(out)
    }

    /// `A·x` (code to data space).
    pub fn apply(&self, x: &Array1<f64>) -> Array1<f64> {
        crate::measurement::dense_matvec(&self.a, x)
    }

    /// `Aᵀ·v` (data to code space).
    pub fn apply_t(&self, v: &Array1<f64>) -> Array1<f64> {
        crate::measurement::dense_matvec_t(&self.a, v)
    }

    /// Flatten to the stacked-columns vector `[a₁ᵀ a₂ᵀ … a_pᵀ]ᵀ` of length
    /// `N·p` (column-major).
    pub fn to_stacked(&self) -> Array1<f64> {
        let (n, p) = self.a.dim();
        let mut out = Array1::zeros(n * p);
        for (i, col) in self.a.columns().into_iter().enumerate() {
            out.slice_mut(ndarray::s![i * n..(i + 1) * n])
                .assign(&col);
        }
        out
    }

    /// Rebuild from the stacked-columns vector (inverse of `to_stacked`).
    pub fn from_stacked(stacked: &Array1<f64>, n: usize, p: usize) -> Result<Self> {
        if stacked.len() != n * p {
            return Err(RandNetError::Dimension(format!(
                "stacked dictionary has length {}, expected {}",
                stacked.len(),
                n * p
            )));
        }
        let mut a = Array2::zeros((n, p));
        for i in 0..p {
            a.column_mut(i)
                .assign(&stacked.slice(ndarray::s![i * n..(i + 1) * n]));
        }
        Ok(Dictionary { a })
    }

    /// Write the checkpoint format: header `N, p` as little-endian `u32`,
    /// then `N·p` little-endian `f64` in column-major order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        let (n, p) = self.a.dim();
        file.write_all(&(n as u32).to_le_bytes())?;
        file.write_all(&(p as u32).to_le_bytes())?;
        for col in self.a.columns() {
            for v in col.iter() {
                file.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Read a checkpoint written by [`Dictionary::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        let mut header = [0u8; 8];
        file.read_exact(&mut header)?;
        let n = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
        let p = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let mut buf = Vec::new();
        file.read_to_end(&mut buf)?;
        if buf.len() != n * p * 8 {
            return Err(RandNetError::Format(format!(
                "dictionary checkpoint: expected {} payload bytes for {n}×{p}, found {}",
                n * p * 8,
                buf.len()
            )));
        }
        let mut a = Array2::zeros((n, p));
        for i in 0..p {
            for j in 0..n {
                let off = (i * n + j) * 8;
                a[[j, i]] = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
            }
        }
        Ok(Dictionary { a })
    }
}

fn check_columns(a: &Array2<f64>) -> Result<()> {
    for (col, c) in a.columns().into_iter().enumerate() {
        let norm = c.dot(&c).sqrt();
        if !norm.is_finite() || norm <= MIN_COLUMN_NORM {
            return Err(RandNetError::DegenerateDictionary { col, norm });
        }
    }
    Ok(())
}

/// Result of the power-iteration bound estimate.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzEstimate {
    /// `safety ×` the estimated dominant eigenvalue of `AᵀΦᵀΦA`.
    pub value: f64,
    /// False when the relative change had not dropped below `tol` within the
    /// iteration budget; `value` is then the best estimate so far.
    pub converged: bool,
    pub iterations: usize,
}

/// Power-iteration estimate of `λ_max(AᵀΦᵀΦA)` scaled by `safety`.
///
/// The Gram operator is applied as four chained products; nothing is
/// materialized. The start vector comes from a fixed internal seed so the
/// estimate is deterministic.
pub fn estimate_lipschitz(
    dict: &Dictionary,
    phi: &MeasurementMatrix,
    iters: usize,
    tol: f64,
    safety: f64,
) -> Result<LipschitzEstimate> {
    if iters == 0 {
        return Err(RandNetError::Config("power iteration needs iters ≥ 1".into()));
    }
    if safety < 1.0 {
        return Err(RandNetError::Config("safety factor must be ≥ 1".into()));
    }
    if phi.cols() != dict.n() {
        return Err(RandNetError::Dimension(format!(
            "Φ has {} columns but dictionary rows are {}",
            phi.cols(),
            dict.n()
        )));
    }
    let p = dict.p();
    let mut rng = rng_from_seed(0xf157a);
    let mut v: Array1<f64> = Array1::from_iter((0..p).map(|_| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g
    }));
    let norm = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / norm);

    let mut lambda = 0.0;
    let mut converged = false;
    let mut used = 0;
    for it in 1..=iters {
        used = it;
        let gv = phi_gram(dict, phi, &v)?;
        let new_lambda = v.dot(&gv);
        let gv_norm = gv.dot(&gv).sqrt();
        if gv_norm <= f64::MIN_POSITIVE {
            // Gram operator annihilates v: bound is ~0, e.g. Φ ≡ 0 rows.
            lambda = 0.0;
            converged = true;
            break;
        }
        v = gv / gv_norm;
        let change = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if it > 1 && change <= tol * lambda.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(LipschitzEstimate {
        value: safety * lambda,
        converged,
        iterations: used,
    })
}

/// `AᵀΦᵀΦA·v` as chained operator applications.
fn phi_gram(dict: &Dictionary, phi: &MeasurementMatrix, v: &Array1<f64>) -> Result<Array1<f64>> {
    let av = dict.apply(v);
    let pav = phi.project(&av)?;
    let ptpav = phi.adjoint(&pav)?;
    Ok(dict.apply_t(&ptpav))
}
