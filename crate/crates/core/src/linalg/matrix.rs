use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix, an element of `L(X, Y)` with `rows = dim Y` and
/// `cols = dim X`.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    /// The matrix unit `e_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(rows, cols);
        m[(i, j)] = ONE;
        CMatrix(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C64]) -> Self {
        CMatrix(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Column vector with the given entries.
    pub fn column(entries: &[C64]) -> Self {
        CMatrix::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Standard basis column vector `e_i` in dimension `n`.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        CMatrix::unit(n, 1, i, 0)
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        CMatrix(self.0.map(|z| z.conj()))
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        CMatrix(self.0.kronecker(&other.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        CMatrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Hilbert–Schmidt inner product `tr(self† · other)`, conjugate-linear in
    /// `self`.
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn frob_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius distance; panics on shape mismatch.
    pub fn dist(&self, other: &CMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn checked_mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows", self.cols()),
                found: format!("{}x{}", other.rows(), other.cols()),
            });
        }
        Ok(self * other)
    }

    /// Column-major vectorization; `vec(A)† vec(B) = tr(A† B)`.
    pub fn vectorize(&self) -> DVector<C64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_vectorized(rows: usize, cols: usize, v: &[C64]) -> Self {
        CMatrix(DMatrix::from_column_slice(rows, cols, v))
    }

    /// `‖A − A†‖_F`; zero for Hermitian matrices.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint()).norm()
    }

    /// `max(‖P² − P‖_F, ‖P − P†‖_F)`; zero for orthogonal projections.
    pub fn projection_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let sq = &self.0 * &self.0;
        (&sq - &self.0).norm().max(self.hermiticity_residual())
    }

    /// Extracts the sub-block of rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        CMatrix(self.0.view((r0, c0), (nr, nc)).into_owned())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &CMatrix) {
        self.0.view_mut((r0, c0), m.shape()).copy_from(&m.0);
    }

    pub fn row(&self, i: usize) -> CMatrix {
        self.block(i, 0, 1, self.cols())
    }

    pub fn col(&self, j: usize) -> CMatrix {
        self.block(0, j, self.rows(), 1)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}x{}[", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.get(i, j);
                write!(f, "{:.4}{:+.4}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut data = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.get(i, j);
                data.push([z.re, z.im]);
            }
        }
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.rows == 0 || repr.cols == 0 {
            return Err(D::Error::custom("matrix must have at least one row and one column"));
        }
        if repr.data.len() != repr.rows * repr.cols {
            return Err(D::Error::custom(format!(
                "matrix data has {} entries, expected {}",
                repr.data.len(),
                repr.rows * repr.cols
            )));
        }
        let entries: Vec<C64> = repr.data.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let m = CMatrix::from_row_slice(repr.rows, repr.cols, &entries);
        if !m.is_finite() {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs_inner_is_trace_of_adjoint_product() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, I, ZERO, C64::new(2.0, -1.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[I, ONE, C64::new(0.5, 0.5), ZERO]);
        let direct = (&a.adjoint() * &b).trace();
        assert!((a.hs_inner(&b) - direct).norm() < 1e-14);
    }

    #[test]
    fn json_is_row_major() {
        let a = CMatrix::from_row_slice(1, 2, &[ONE, I]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,0.0],[0.0,1.0]]}"#);
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn json_rejects_bad_lengths() {
        let bad = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
        let empty = r#"{"rows":0,"cols":2,"data":[]}"#;
        assert!(serde_json::from_str::<CMatrix>(empty).is_err());
    }

    #[test]
    fn kron_indexing() {
        let a = CMatrix::unit(2, 2, 0, 1);
        let b = CMatrix::unit(3, 3, 2, 0);
        let k = a.kron(&b);
        assert_eq!(k.get(2, 3), ONE);
        assert!((k.frob_norm() - 1.0).abs() < 1e-15);
    }
}
