//! Complex matrices, Hilbert–Schmidt operator subspaces and tolerance
//! handling.

mod matrix;
mod subspace;

pub use matrix::{CMatrix, C64, I, ONE, ZERO};
pub use subspace::OperatorSubspace;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every subspace computation.
///
/// `rank_cut` is the singular-value cutoff relative to `max(σ_max, 1)`;
/// `eq_tol` bounds Frobenius distances between projectors and residuals of
/// axiom checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_cut: f64,
    pub eq_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_cut: 1e-10,
            eq_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_cut: f64, eq_tol: f64) -> Result<Self> {
        let tol = Tolerance { rank_cut, eq_tol };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0 && x < 1.0;
        if !ok(self.rank_cut) {
            return Err(Error::InvalidTolerance(format!(
                "rank_cut must lie in (0, 1), got {}",
                self.rank_cut
            )));
        }
        if !ok(self.eq_tol) {
            return Err(Error::InvalidTolerance(format!(
                "eq_tol must lie in (0, 1), got {}",
                self.eq_tol
            )));
        }
        Ok(())
    }

    /// Absolute singular-value threshold for a spectrum with maximum `smax`.
    pub(crate) fn cutoff(&self, smax: f64) -> f64 {
        self.rank_cut * smax.max(1.0)
    }
}

/// Reduces `a` (`m × n`) to a square `p × p` factor `b` with `p = min(m, n)`
/// and an isometry `l` such that `a` and `l b` have the same column space and
/// singular values.
fn square_factor(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let (m, n) = a.shape();
    if m >= n {
        let (q, r) = a.clone().qr().unpack();
        (q, r)
    } else {
        // a = R'† Q'† with a† = Q' R'.
        let (_, r) = a.adjoint().qr().unpack();
        (DMatrix::identity(m, m), r.adjoint())
    }
}

/// Singular values (descending) and the matching left singular vectors of
/// `a`, read off the eigenvectors of `[[0, b], [b†, 0]]` with positive
/// eigenvalues. Vectors belonging to (numerically) zero singular values are
/// not meaningful.
fn left_singular(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let (m, n) = a.shape();
    let p = m.min(n);
    if p == 0 {
        return (Vec::new(), DMatrix::zeros(m, 0));
    }
    let (l, b) = square_factor(a);
    let mut h = DMatrix::<C64>::zeros(2 * p, 2 * p);
    h.view_mut((0, p), (p, p)).copy_from(&b);
    h.view_mut((p, 0), (p, p)).copy_from(&b.adjoint());
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..2 * p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let sigma: Vec<f64> = order[..p].iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let mut u = DMatrix::<C64>::zeros(p, p);
    for (c, &i) in order[..p].iter().enumerate() {
        u.column_mut(c).copy_from(&eig.eigenvectors.view((0, i), (p, 1)));
    }
    (sigma, l * u)
}

/// Gram–Schmidt (applied twice) on the columns of `u`.
fn orthonormalize(u: &mut DMatrix<C64>) {
    for _ in 0..2 {
        for j in 0..u.ncols() {
            for k in 0..j {
                let proj = u.column(k).dotc(&u.column(j));
                let ck = u.column(k).clone_owned();
                u.column_mut(j).axpy(-proj, &ck, ONE);
            }
            let nrm = u.column(j).norm();
            if nrm > 0.0 {
                u.column_mut(j).unscale_mut(nrm);
            }
        }
    }
}

/// Orthonormal basis of the column space of `a`, keeping singular values
/// above the tolerance's cutoff. Columns are ordered by decreasing singular
/// value.
pub fn column_space(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let (sigma, u) = left_singular(a.inner());
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cut = tol.cutoff(smax);
    let keep = sigma.iter().take_while(|&&s| s > cut).count();
    let mut basis = u.columns(0, keep).clone_owned();
    orthonormalize(&mut basis);
    CMatrix::from_inner(basis)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    left_singular(a.inner()).0
}

/// Orthonormal basis of `ker A`, returned as the columns of an
/// `a.cols() × k` matrix (with `k = 0` allowed): the orthogonal complement
/// of the row space.
pub fn null_space(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let n = a.cols();
    let row = column_space(&a.adjoint(), tol);
    let proj = &CMatrix::identity(n) - &(&row * &row.adjoint());
    let (vals, vecs) = eigh(&proj);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.column_mut(c).copy_from(&vecs.inner().column(i));
    }
    CMatrix::from_inner(out)
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues in ascending order
/// with the matching orthonormal eigenvectors as columns.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (a.inner() + a.inner().adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = a.rows();
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Unitary polar factor `a (a†a)^{-1/2}` of a matrix with full column rank.
pub fn polar_isometry(a: &CMatrix) -> CMatrix {
    let (vals, v) = eigh(&(&a.adjoint() * a));
    let inv_sqrt: Vec<C64> = vals.iter().map(|&x| C64::new(1.0 / x.max(f64::MIN_POSITIVE).sqrt(), 0.0)).collect();
    a * &(&(&v * &CMatrix::diag(&inv_sqrt)) * &v.adjoint())
}

/// Numerical rank with the tolerance's cutoff.
pub fn rank(a: &CMatrix, tol: &Tolerance) -> usize {
    let s = singular_values(a);
    let cut = tol.cutoff(s.first().copied().unwrap_or(0.0));
    s.iter().filter(|&&x| x > cut).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-10, 1e-8).is_ok());
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1.0).is_err());
        assert!(Tolerance::new(f64::NAN, 1e-8).is_err());
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let tol = Tolerance::default();
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0]]);
        let k = null_space(&a, &tol);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).frob_norm() < 1e-12);
        let gram = &k.adjoint() * &k;
        assert!(gram.dist(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn null_space_of_injective_matrix_is_empty() {
        let tol = Tolerance::default();
        let k = null_space(&CMatrix::identity(3), &tol);
        assert_eq!(k.shape(), (3, 0));
    }

    #[test]
    fn eigh_sorts_ascending() {
        let a = CMatrix::diag(&[C64::new(3.0, 0.0), ONE, C64::new(2.0, 0.0)]);
        let (vals, vecs) = eigh(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[2] - 3.0).abs() < 1e-12);
        let back = &(&vecs * &CMatrix::diag(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>()))
            * &vecs.adjoint();
        assert!(back.dist(&a) < 1e-12);
    }

    #[test]
    fn column_space_of_rank_deficient_products() {
        // Products of thin random factors; the recovered basis must reproduce
        // every column.
        use rand::{Rng, SeedableRng};
        let tol = Tolerance::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut g = |r, c| CMatrix::from_fn(r, c, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        for (m, k, n) in [(6, 2, 6), (9, 3, 4), (4, 1, 9), (3, 3, 3), (8, 5, 2)] {
            let a = &g(m, k) * &g(k, n);
            let u = column_space(&a, &tol);
            assert_eq!(u.cols(), k.min(n).min(m));
            assert!((&u.adjoint() * &u).dist(&CMatrix::identity(u.cols())) < 1e-12);
            assert!((&(&u * &u.adjoint()) * &a).dist(&a) < 1e-12 * a.frob_norm().max(1.0));
            let z = null_space(&a, &tol);
            assert_eq!(z.cols(), n - u.cols());
            assert!((&a * &z).frob_norm() < 1e-12);
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = CMatrix::diag(&[C64::new(0.5, 0.0), C64::new(0.0, -3.0), ZERO]);
        let s = singular_values(&a);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 0.5).abs() < 1e-14 && s[2].abs() < 1e-14);
    }

    #[test]
    fn polar_of_scaled_unitary() {
        let u = CMatrix::from_row_slice(2, 2, &[ZERO, I, ONE, ZERO]);
        let p = polar_isometry(&u.scale_real(3.0));
        assert!(p.dist(&u) < 1e-12);
    }
}
