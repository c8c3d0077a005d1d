//! Complex-matrix subspace primitives.
//!
//! Everything in this crate is expressed in terms of dense complex matrices
//! ([`CMatrix`]). The routines here wrap nalgebra's SVD and Hermitian
//! eigendecomposition with the rank decisions and orderings the precoders
//! rely on: singular values are always consumed in descending order, ties
//! keep the decomposition's own order.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Numerical thresholds shared by the subspace routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values at or below `rank_rel_tol * s_max` count as zero.
    pub rank_rel_tol: f64,
    /// Largest residual accepted by orthogonality and Hermitian checks.
    pub orth_tol: f64,
    /// Eigenvalue floor used by log-determinants and whitening.
    pub psd_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel_tol: 1e-10,
            orth_tol: 1e-8,
            psd_floor: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rank_rel_tol) || !ok(self.orth_tol) || !ok(self.psd_floor) {
            return Err(Error::Domain("tolerances must be finite and > 0".into()));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(Error::Domain("rank_rel_tol must be < 1".into()));
        }
        Ok(())
    }
}

/// Indices of `values` sorted by descending value; equal values keep their
/// original relative order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

struct SortedSvd {
    values: Vec<f64>,
    u: Option<CMatrix>,
    v: Option<CMatrix>,
}

fn sorted_svd(a: &CMatrix, want_u: bool, want_v: bool) -> SortedSvd {
    let svd = a.clone().svd_unordered(want_u, want_v);
    let raw: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending_order(&raw);
    let values = order.iter().map(|&i| raw[i]).collect();
    let u = svd
        .u
        .map(|u| CMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]));
    let v = svd.v_t.map(|vt| {
        let v = vt.adjoint();
        CMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])])
    });
    SortedSvd { values, u, v }
}

/// Singular values of `a` in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    sorted_svd(a, false, false).values
}

/// Number of singular values above `rank_rel_tol` times the largest one.
pub fn numerical_rank(a: &CMatrix, tol: &Tolerances) -> usize {
    rank_of(&singular_values(a), tol)
}

fn rank_of(values: &[f64], tol: &Tolerances) -> usize {
    let smax = values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > tol.rank_rel_tol * smax).count()
}

/// Orthonormal basis of the orthogonal complement of the column space of `a`.
///
/// A matrix with zero columns has the whole space as its complement. Fails
/// with [`Error::NoNullSpace`] when `a` has full row rank.
pub fn orth_complement(a: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Dimension("orth_complement of a matrix with no rows".into()));
    }
    if a.ncols() == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let svd = sorted_svd(a, true, false);
    let r = rank_of(&svd.values, tol);
    if r == n {
        return Err(Error::NoNullSpace { rows: n });
    }
    if r == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let u = svd.u.expect("left singular vectors requested");
    let ur = u.columns(0, r);
    // The complementary projector has eigenvalues exactly 0 or 1, so its
    // eigenvectors for the unit eigenvalue are a well-separated basis.
    let projector = CMatrix::identity(n, n) - ur * ur.adjoint();
    let eig = SymmetricEigen::new(projector);
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&vals);
    let basis = CMatrix::from_fn(n, n - r, |row, c| eig.eigenvectors[(row, order[c])]);
    Ok(basis)
}

/// The `d` right singular vectors of `a` belonging to its `d` largest
/// singular values, as columns.
pub fn dominant_right_vectors(a: &CMatrix, d: usize) -> Result<CMatrix> {
    let k = a.nrows().min(a.ncols());
    if d == 0 || d > k {
        return Err(Error::Dimension(format!(
            "requested {d} dominant vectors of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let v = sorted_svd(a, false, true).v.expect("right singular vectors requested");
    Ok(v.columns(0, d).into_owned())
}

/// The `d` left singular vectors of `a` belonging to its `d` largest
/// singular values, as columns.
pub fn dominant_left_vectors(a: &CMatrix, d: usize) -> Result<CMatrix> {
    let k = a.nrows().min(a.ncols());
    if d == 0 || d > k {
        return Err(Error::Dimension(format!(
            "requested {d} dominant vectors of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let u = sorted_svd(a, true, false).u.expect("left singular vectors requested");
    Ok(u.columns(0, d).into_owned())
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Hermitian part of `m` after checking that `m` is Hermitian relative to
/// its own magnitude.
fn hermitian_part(m: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, f64)> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = max_abs(m).max(1.0);
    let residual = max_abs(&(m - m.adjoint()));
    if residual > tol.orth_tol * scale {
        return Err(Error::NotHermitian { residual });
    }
    let h = (m + m.adjoint()).scale(0.5);
    Ok((h, scale))
}

/// Natural log-determinant of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues are clamped below at `psd_floor`; a materially negative
/// eigenvalue (below `-orth_tol`, relative to the matrix magnitude) is an
/// error.
pub fn logdet_hermitian_psd(m: &CMatrix, tol: &Tolerances) -> Result<f64> {
    let (h, scale) = hermitian_part(m, tol)?;
    let eigenvalues = h.symmetric_eigenvalues();
    let mut acc = 0.0;
    for &lambda in eigenvalues.iter() {
        if lambda < -tol.orth_tol * scale {
            return Err(Error::NotPsd { eigenvalue: lambda });
        }
        acc += lambda.max(tol.psd_floor).ln();
    }
    Ok(acc)
}

/// Whitening transform `Λ^{-1/2} Eᴴ` of a Hermitian positive definite matrix
/// `m = E Λ Eᴴ`, so that `F m Fᴴ = I`.
pub fn whitener(m: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let (h, _) = hermitian_part(m, tol)?;
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if let Some(&bad) = vals.iter().find(|&&l| l <= tol.psd_floor) {
        return Err(Error::NotPositiveDefinite { eigenvalue: bad });
    }
    let order = descending_order(&vals);
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let k = order[r];
        eig.eigenvectors[(c, k)].conj() / vals[k].sqrt()
    }))
}

/// Horizontal concatenation of equally tall matrices. An empty slice yields
/// an `rows x 0` matrix.
pub fn hstack(blocks: &[&CMatrix], rows: usize) -> CMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.columns_mut(at, b.ncols()).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation of equally wide matrices. An empty slice yields a
/// `0 x cols` matrix.
pub fn vstack(blocks: &[&CMatrix], cols: usize) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.rows_mut(at, b.nrows()).copy_from(*b);
        at += b.nrows();
    }
    out
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::CMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_cmatrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }
}
