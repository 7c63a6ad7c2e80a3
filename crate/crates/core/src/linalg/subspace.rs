use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{column_space, null_space, CMatrix, Tolerance, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// A subspace of `L(ℂ^dom, ℂ^cod)` held as a Hilbert–Schmidt orthonormal
/// basis of `cod × dom` matrices.
///
/// Two subspaces are compared through their orthogonal projectors, never
/// through their bases.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    dom: usize,
    cod: usize,
    basis: Vec<CMatrix>,
}

impl OperatorSubspace {
    pub fn zero(dom: usize, cod: usize) -> Self {
        OperatorSubspace {
            dom,
            cod,
            basis: Vec::new(),
        }
    }

    /// All of `L(ℂ^dom, ℂ^cod)`, spanned by matrix units.
    pub fn full(dom: usize, cod: usize) -> Self {
        let mut basis = Vec::with_capacity(dom * cod);
        for j in 0..dom {
            for i in 0..cod {
                basis.push(CMatrix::unit(cod, dom, i, j));
            }
        }
        OperatorSubspace { dom, cod, basis }
    }

    /// `ℂ·1_n`, with basis `1_n/√n`.
    pub fn scalar_identity(n: usize) -> Self {
        let b = CMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt());
        OperatorSubspace {
            dom: n,
            cod: n,
            basis: vec![b],
        }
    }

    /// Span of a nonempty list of equally shaped matrices.
    pub fn span(mats: &[CMatrix], tol: &Tolerance) -> Result<Self> {
        let first = mats.first().ok_or(Error::EmptyInput("span needs at least one matrix"))?;
        let (cod, dom) = first.shape();
        Self::span_in(dom, cod, mats, tol)
    }

    /// Span inside `L(ℂ^dom, ℂ^cod)`; an empty list gives the zero subspace.
    pub fn span_in(dom: usize, cod: usize, mats: &[CMatrix], tol: &Tolerance) -> Result<Self> {
        for m in mats {
            if m.shape() != (cod, dom) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{cod}x{dom}"),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
            if !m.is_finite() {
                return Err(Error::NonFinite { row: 0, col: 0 });
            }
        }
        Ok(Self::span_unchecked(dom, cod, mats, tol))
    }

    pub(crate) fn span_unchecked(dom: usize, cod: usize, mats: &[CMatrix], tol: &Tolerance) -> Self {
        if mats.is_empty() || dom == 0 || cod == 0 {
            return Self::zero(dom, cod);
        }
        let n = dom * cod;
        let mut stack = DMatrix::<C64>::zeros(n, mats.len());
        for (k, m) in mats.iter().enumerate() {
            stack.column_mut(k).copy_from_slice(m.inner().as_slice());
        }
        let u = column_space(&CMatrix::from_inner(stack), tol);
        let basis = (0..u.cols())
            .map(|i| CMatrix::from_vectorized(cod, dom, u.inner().column(i).as_slice()))
            .collect();
        OperatorSubspace { dom, cod, basis }
    }

    /// Wraps a basis the caller guarantees to be HS-orthonormal.
    pub(crate) fn from_orthonormal(dom: usize, cod: usize, basis: Vec<CMatrix>) -> Self {
        OperatorSubspace { dom, cod, basis }
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn same_shape(&self, other: &OperatorSubspace) -> bool {
        self.dom == other.dom && self.cod == other.cod
    }

    fn check_shape(&self, other: &OperatorSubspace) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.cod, self.dom),
                found: format!("{}x{}", other.cod, other.dom),
            })
        }
    }

    /// Orthogonal projection of `m` onto the subspace.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.cod, self.dom);
        for b in &self.basis {
            acc = &acc + &b.scale(b.hs_inner(m));
        }
        acc
    }

    /// Frobenius distance from `m` to the subspace.
    pub fn residual(&self, m: &CMatrix) -> f64 {
        // ‖m‖² − Σ|⟨b,m⟩|² is cancellation-prone; subtract the projection.
        m.dist(&self.project(m))
    }

    pub fn contains(&self, m: &CMatrix, tol: &Tolerance) -> bool {
        self.residual(m) < tol.eq_tol
    }

    /// `W·V = span{w v}`, where `self = W` and `V` maps into the domain of `W`.
    pub fn product(&self, v: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
        if v.cod != self.dom {
            return Err(Error::ShapeMismatch {
                expected: format!("right factor with codomain {}", self.dom),
                found: format!("codomain {}", v.cod),
            });
        }
        let mut mats = Vec::with_capacity(self.dim() * v.dim());
        for w in &self.basis {
            for x in &v.basis {
                mats.push(w * x);
            }
        }
        Ok(Self::span_unchecked(v.dom, self.cod, &mats, tol))
    }

    pub fn dagger(&self) -> OperatorSubspace {
        OperatorSubspace {
            dom: self.cod,
            cod: self.dom,
            basis: self.basis.iter().map(CMatrix::adjoint).collect(),
        }
    }

    /// Entrywise transpose, the Banach adjoint in the self-dual convention.
    pub fn transpose_dual(&self) -> OperatorSubspace {
        OperatorSubspace {
            dom: self.cod,
            cod: self.dom,
            basis: self.basis.iter().map(CMatrix::transpose).collect(),
        }
    }

    /// `V ⊗ W = span{v ⊗ w}`; Kronecker products of orthonormal bases stay
    /// orthonormal.
    pub fn tensor(&self, other: &OperatorSubspace) -> OperatorSubspace {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                basis.push(a.kron(b));
            }
        }
        OperatorSubspace {
            dom: self.dom * other.dom,
            cod: self.cod * other.cod,
            basis,
        }
    }

    /// Applies `f` to every basis element and re-spans. Used for linear maps
    /// that are not HS-isometric.
    pub fn map_span(
        &self,
        dom: usize,
        cod: usize,
        tol: &Tolerance,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<OperatorSubspace> {
        let mats: Vec<CMatrix> = self.basis.iter().map(f).collect();
        Self::span_in(dom, cod, &mats, tol)
    }

    /// Matrix whose columns are the vectorized basis elements.
    fn stacked(&self) -> CMatrix {
        let n = self.dom * self.cod;
        let mut m = DMatrix::zeros(n, self.dim());
        for (k, b) in self.basis.iter().enumerate() {
            m.column_mut(k).copy_from_slice(b.inner().as_slice());
        }
        CMatrix::from_inner(m)
    }

    /// HS-orthogonal complement inside `L(ℂ^dom, ℂ^cod)`.
    pub fn complement(&self, tol: &Tolerance) -> OperatorSubspace {
        if self.is_zero() {
            return Self::full(self.dom, self.cod);
        }
        let k = null_space(&self.stacked().adjoint(), tol);
        let basis = (0..k.cols())
            .map(|c| {
                let col: Vec<C64> = (0..k.rows()).map(|r| k.get(r, c)).collect();
                CMatrix::from_vectorized(self.cod, self.dom, &col)
            })
            .collect();
        OperatorSubspace {
            dom: self.dom,
            cod: self.cod,
            basis,
        }
    }

    pub fn join(&self, other: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
        self.check_shape(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mats: Vec<CMatrix> = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        Ok(Self::span_unchecked(self.dom, self.cod, &mats, tol))
    }

    /// `V ∧ W = ¬(¬V ∨ ¬W)`.
    pub fn meet(&self, other: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
        self.check_shape(other)?;
        let j = self.complement(tol).join(&other.complement(tol), tol)?;
        Ok(j.complement(tol))
    }

    /// Largest residual of a basis element of `self` against `other`.
    pub fn excess_over(&self, other: &OperatorSubspace) -> f64 {
        self.basis
            .iter()
            .map(|b| other.residual(b))
            .fold(0.0, f64::max)
    }

    pub fn leq(&self, other: &OperatorSubspace, tol: &Tolerance) -> Result<bool> {
        self.check_shape(other)?;
        Ok(self.excess_over(other) < tol.eq_tol)
    }

    /// Frobenius distance `‖P_V − P_W‖_F` between orthogonal projectors,
    /// computed as `√(Σ res(v_i, W)² + Σ res(w_j, V)²)`.
    pub fn distance(&self, other: &OperatorSubspace) -> Result<f64> {
        self.check_shape(other)?;
        let a: f64 = self.basis.iter().map(|b| other.residual(b).powi(2)).sum();
        let b: f64 = other.basis.iter().map(|b| self.residual(b).powi(2)).sum();
        Ok((a + b).sqrt())
    }

    pub fn eq(&self, other: &OperatorSubspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.distance(other)? < tol.eq_tol)
    }

    /// Largest `|⟨v, w⟩|` over basis pairs; zero iff `V ⊥ W`.
    pub fn overlap(&self, other: &OperatorSubspace) -> Result<f64> {
        self.check_shape(other)?;
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &other.basis {
                worst = worst.max(a.hs_inner(b).norm());
            }
        }
        Ok(worst)
    }

    pub fn perp(&self, other: &OperatorSubspace, tol: &Tolerance) -> Result<bool> {
        Ok(self.overlap(other)? < tol.eq_tol)
    }

    /// The same subspace with its basis mixed by a unitary `u`:
    /// `w'_j = Σ_i u_ij w_i`.
    pub fn rebased(&self, u: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let k = self.dim();
        if u.shape() != (k, k) {
            return Err(Error::ShapeMismatch {
                expected: format!("{k}x{k} unitary"),
                found: format!("{}x{}", u.rows(), u.cols()),
            });
        }
        let r = (&u.adjoint() * u).dist(&CMatrix::identity(k));
        if r >= tol.eq_tol {
            return Err(Error::InvalidArgument(format!("basis change is not unitary (residual {r:.3e})")));
        }
        let basis = (0..k)
            .map(|j| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(self.cod, self.dom), |acc, (i, w)| &acc + &w.scale(u.get(i, j)))
            })
            .collect();
        Ok(OperatorSubspace {
            dom: self.dom,
            cod: self.cod,
            basis,
        })
    }

    /// Largest deviation of the stored basis from HS-orthonormality.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((a.hs_inner(b) - target).norm());
            }
        }
        worst
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    dom: usize,
    cod: usize,
    basis: Vec<CMatrix>,
}

impl Serialize for OperatorSubspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr {
            dom: self.dom,
            cod: self.cod,
            basis: self.basis.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorSubspace {
    /// Any spanning list is accepted; it is re-orthonormalized with the
    /// default tolerance.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SubspaceRepr::deserialize(deserializer)?;
        if repr.dom == 0 || repr.cod == 0 {
            return Err(D::Error::custom("subspace dimensions must be positive"));
        }
        OperatorSubspace::span_in(repr.dom, repr.cod, &repr.basis, &Tolerance::default())
            .map_err(D::Error::custom)
    }
}
