//! Predicates on quantum sets, images along relations, coranges, and the
//! dictionary between predicates, relations to `𝟏`, projections and
//! functions to `` `𝔹 ``.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, CMatrix, OperatorSubspace, Tolerance, C64};
use crate::opalg::{star_map_unchecked, BlockOperator};
use crate::qfun::{require_function, require_partial_function};
use crate::qrel::Relation;
use crate::qset::{Atom, QuantumSet, UNIT_LABEL};

/// A subspace `P(X) ≤ X` for every atom, stored as column vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PredicateRepr", into = "PredicateRepr")]
pub struct Predicate {
    carrier: QuantumSet,
    spaces: BTreeMap<String, OperatorSubspace>,
}

#[derive(Serialize, Deserialize)]
struct PredicateRepr {
    carrier: QuantumSet,
    spaces: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

impl TryFrom<PredicateRepr> for Predicate {
    type Error = Error;
    fn try_from(repr: PredicateRepr) -> Result<Self> {
        let mut vectors = BTreeMap::new();
        for (label, vs) in repr.spaces {
            let cols = vs
                .into_iter()
                .map(|v| {
                    let entries: Vec<C64> = v.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                    CMatrix::column(&entries)
                })
                .collect();
            vectors.insert(label, cols);
        }
        Predicate::from_vectors(&repr.carrier, vectors, &Tolerance::default())
    }
}

impl From<Predicate> for PredicateRepr {
    fn from(p: Predicate) -> Self {
        let spaces = p
            .spaces
            .iter()
            .map(|(l, v)| {
                let cols = v
                    .basis()
                    .iter()
                    .map(|b| (0..b.rows()).map(|i| [b.get(i, 0).re, b.get(i, 0).im]).collect())
                    .collect();
                (l.clone(), cols)
            })
            .collect();
        PredicateRepr {
            carrier: p.carrier,
            spaces,
        }
    }
}

fn carrier_mismatch() -> Error {
    Error::SetMismatch("predicates live on different carriers".into())
}

impl Predicate {
    /// Builds a predicate from spanning column vectors; atoms without an
    /// entry get the zero subspace.
    pub fn from_vectors(
        carrier: &QuantumSet,
        vectors: BTreeMap<String, Vec<CMatrix>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        for label in vectors.keys() {
            carrier.atom(label)?;
        }
        let mut spaces = BTreeMap::new();
        for a in carrier.atoms() {
            let vs = vectors.get(&a.label).map(Vec::as_slice).unwrap_or(&[]);
            spaces.insert(a.label.clone(), OperatorSubspace::span_in(1, a.dim, vs, tol)?);
        }
        Ok(Predicate {
            carrier: carrier.clone(),
            spaces,
        })
    }

    fn from_fn(carrier: &QuantumSet, mut f: impl FnMut(&Atom) -> Result<OperatorSubspace>) -> Result<Self> {
        let mut spaces = BTreeMap::new();
        for a in carrier.atoms() {
            spaces.insert(a.label.clone(), f(a)?);
        }
        Ok(Predicate {
            carrier: carrier.clone(),
            spaces,
        })
    }

    pub fn top(carrier: &QuantumSet) -> Self {
        Self::from_fn(carrier, |a| Ok(OperatorSubspace::full(1, a.dim))).expect("infallible")
    }

    pub fn bottom(carrier: &QuantumSet) -> Self {
        Self::from_fn(carrier, |a| Ok(OperatorSubspace::zero(1, a.dim))).expect("infallible")
    }

    pub fn carrier(&self) -> &QuantumSet {
        &self.carrier
    }

    pub fn space(&self, label: &str) -> Result<&OperatorSubspace> {
        self.spaces
            .get(label)
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn spaces(&self) -> impl Iterator<Item = (&str, &OperatorSubspace)> {
        self.spaces.iter().map(|(l, v)| (l.as_str(), v))
    }

    fn zip(
        &self,
        other: &Predicate,
        f: impl Fn(&OperatorSubspace, &OperatorSubspace) -> Result<OperatorSubspace>,
    ) -> Result<Predicate> {
        if self.carrier != other.carrier {
            return Err(carrier_mismatch());
        }
        Self::from_fn(&self.carrier, |a| f(&self.spaces[&a.label], &other.spaces[&a.label]))
    }

    pub fn meet(&self, other: &Predicate, tol: &Tolerance) -> Result<Predicate> {
        self.zip(other, |a, b| a.meet(b, tol))
    }

    pub fn join(&self, other: &Predicate, tol: &Tolerance) -> Result<Predicate> {
        self.zip(other, |a, b| a.join(b, tol))
    }

    pub fn neg(&self, tol: &Tolerance) -> Predicate {
        Self::from_fn(&self.carrier, |a| Ok(self.spaces[&a.label].complement(tol))).expect("infallible")
    }

    pub fn leq(&self, other: &Predicate, tol: &Tolerance) -> Result<bool> {
        if self.carrier != other.carrier {
            return Err(carrier_mismatch());
        }
        for (l, v) in &self.spaces {
            if !v.leq(&other.spaces[l], tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `P ≤ Q^⊥`.
    pub fn disjoint(&self, other: &Predicate, tol: &Tolerance) -> Result<bool> {
        Ok(self.overlap(other)? < tol.eq_tol)
    }

    /// Largest `|⟨p, q⟩|` between basis vectors on a common atom.
    pub fn overlap(&self, other: &Predicate) -> Result<f64> {
        if self.carrier != other.carrier {
            return Err(carrier_mismatch());
        }
        let mut worst: f64 = 0.0;
        for (l, v) in &self.spaces {
            worst = worst.max(v.overlap(&other.spaces[l])?);
        }
        Ok(worst)
    }

    /// Largest projector distance over atoms.
    pub fn distance(&self, other: &Predicate) -> Result<f64> {
        if self.carrier != other.carrier {
            return Err(carrier_mismatch());
        }
        let mut worst: f64 = 0.0;
        for (l, v) in &self.spaces {
            worst = worst.max(v.distance(&other.spaces[l])?);
        }
        Ok(worst)
    }

    pub fn eq(&self, other: &Predicate, tol: &Tolerance) -> Result<bool> {
        Ok(self.distance(other)? < tol.eq_tol)
    }

    /// `P = p·X`, the ranges of a projection.
    pub fn from_projection(p: &BlockOperator, tol: &Tolerance) -> Result<Predicate> {
        check_projection(p, tol)?;
        Self::from_fn(p.carrier(), |a| {
            let m = p.block(&a.label)?;
            let cols: Vec<CMatrix> = (0..a.dim).map(|j| m.col(j)).collect();
            OperatorSubspace::span_in(1, a.dim, &cols, tol)
        })
    }

    /// `p(X) = proj_{P(X)}`.
    pub fn to_projection(&self) -> BlockOperator {
        BlockOperator::from_fn(&self.carrier, |l, d| {
            let mut acc = CMatrix::zeros(d, d);
            for b in self.spaces[l].basis() {
                acc = &acc + &(b * &b.adjoint());
            }
            acc
        })
    }

    /// `R(X, ℂ) = P(X)^{0⊥}`.
    pub fn to_relation(&self, tol: &Tolerance) -> Result<Relation> {
        let mut r = Relation::empty(self.carrier.clone(), QuantumSet::unit());
        for (l, v) in &self.spaces {
            r.set_block(l, UNIT_LABEL, polar_of_vectors(v, tol).complement(tol))?;
        }
        Ok(r)
    }

    /// `P(X) = R(X, ℂ)^{0⊥}`.
    pub fn from_relation(r: &Relation, tol: &Tolerance) -> Result<Predicate> {
        check_relation_to_unit(r)?;
        Self::from_fn(r.source(), |a| {
            let v = r.block(&a.label, UNIT_LABEL)?;
            Ok(polar_of_functionals(&v, tol).complement(tol))
        })
    }

    /// `F(X, ℂ_0) = P(X)^0` and `F(X, ℂ_1) = P(X)^{0⊥}`.
    pub fn to_function(&self, tol: &Tolerance) -> Result<Relation> {
        let mut f = Relation::empty(self.carrier.clone(), bool_set());
        for (l, v) in &self.spaces {
            let polar = polar_of_vectors(v, tol);
            f.set_block(l, "1", polar.complement(tol))?;
            f.set_block(l, "0", polar)?;
        }
        Ok(f)
    }

    /// `P(X) = F(X, ℂ_0)^0`.
    pub fn from_function(f: &Relation, tol: &Tolerance) -> Result<Predicate> {
        check_bool_function(f, tol)?;
        Self::from_fn(f.source(), |a| Ok(polar_of_functionals(&f.block(&a.label, "0")?, tol)))
    }
}

/// The classical set `` `𝔹 = `{0, 1} ``.
pub fn bool_set() -> QuantumSet {
    QuantumSet::classical(&["0", "1"]).expect("distinct labels")
}

/// `t(ℂ_b) = b` on `` `𝔹 ``.
pub fn truth() -> BlockOperator {
    BlockOperator::indicator(&bool_set(), "1").expect("atom exists")
}

fn check_projection(p: &BlockOperator, tol: &Tolerance) -> Result<()> {
    for (l, m) in p.blocks() {
        let residual = m.projection_residual();
        if residual >= tol.eq_tol {
            return Err(Error::NotProjection {
                label: l.to_string(),
                residual,
            });
        }
    }
    Ok(())
}

fn check_relation_to_unit(r: &Relation) -> Result<()> {
    if r.target() != &QuantumSet::unit() {
        return Err(Error::SetMismatch("expected a relation into the unit set".into()));
    }
    Ok(())
}

fn check_bool_function(f: &Relation, tol: &Tolerance) -> Result<()> {
    if f.target() != &bool_set() {
        return Err(Error::SetMismatch("expected a function into `{0, 1}".into()));
    }
    require_function(f, tol)
}

/// Polar of a subspace of `X = L(ℂ, X)` inside `L(X, ℂ)`:
/// `{v : v x = 0 for all x}`.
fn polar_of_vectors(v: &OperatorSubspace, tol: &Tolerance) -> OperatorSubspace {
    let n = v.cod();
    if v.is_zero() {
        return OperatorSubspace::full(n, 1);
    }
    // v x = xᵀ vᵀ, so solve the stacked transposes.
    let a = CMatrix::from_fn(v.dim(), n, |k, i| v.basis()[k].get(i, 0));
    let k = null_space(&a, tol);
    let rows: Vec<CMatrix> = (0..k.cols()).map(|c| k.col(c).transpose()).collect();
    OperatorSubspace::span_in(n, 1, &rows, tol).expect("shapes agree")
}

/// Polar of a subspace of `L(X, ℂ)` inside `X`: `{x : v x = 0 for all v}`.
fn polar_of_functionals(v: &OperatorSubspace, tol: &Tolerance) -> OperatorSubspace {
    let n = v.dom();
    if v.is_zero() {
        return OperatorSubspace::full(1, n);
    }
    let a = CMatrix::from_fn(v.dim(), n, |k, i| v.basis()[k].get(0, i));
    let k = null_space(&a, tol);
    let cols: Vec<CMatrix> = (0..k.cols()).map(|c| k.col(c)).collect();
    OperatorSubspace::span_in(1, n, &cols, tol).expect("shapes agree")
}

/// `R⋆(P)(Y) = span{r x}`.
pub fn direct_image(r: &Relation, p: &Predicate, tol: &Tolerance) -> Result<Predicate> {
    if r.source() != p.carrier() {
        return Err(carrier_mismatch());
    }
    let mut vectors: BTreeMap<String, Vec<CMatrix>> = BTreeMap::new();
    for (x, y, v) in r.blocks() {
        let px = p.space(x)?;
        let acc = vectors.entry(y.to_string()).or_default();
        for m in v.basis() {
            for b in px.basis() {
                acc.push(m * b);
            }
        }
    }
    Predicate::from_vectors(r.target(), vectors, tol)
}

/// `R^⋆(P) = (R†)⋆(P)`.
pub fn inverse_image(r: &Relation, p: &Predicate, tol: &Tolerance) -> Result<Predicate> {
    direct_image(&r.dagger(), p, tol)
}

/// Domain of definition of a partial function: the inverse image of the top
/// predicate.
pub fn corange(g: &Relation, tol: &Tolerance) -> Result<Predicate> {
    require_partial_function(g, tol)?;
    inverse_image(g, &Predicate::top(g.target()), tol)
}

/// Factorization `G = F ∘ K_P` through the corange.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorangeFactor {
    pub corange: Predicate,
    /// Atoms of `𝒫`, labeled by the source atom they come from.
    pub pset: QuantumSet,
    /// Isometries `u_X: P(X) → X`.
    pub isometries: BTreeMap<String, CMatrix>,
    /// `K_P: X → 𝒫` with `K_P(X, P_X) = ℂ·u_X†`.
    pub k: Relation,
    /// The function `F: 𝒫 → Y`.
    pub f: Relation,
    /// `max ‖F ∘ K_P − G‖`.
    pub residual: f64,
}

pub fn corange_factor(g: &Relation, tol: &Tolerance) -> Result<CorangeFactor> {
    let p = corange(g, tol)?;
    let mut atoms = Vec::new();
    let mut isometries = BTreeMap::new();
    for (l, v) in p.spaces() {
        if v.is_zero() {
            continue;
        }
        let d = g.source().dim_of(l)?;
        let mut u = CMatrix::zeros(d, v.dim());
        for (k, b) in v.basis().iter().enumerate() {
            u.set_block(0, k, b);
        }
        atoms.push(Atom::new(l, v.dim()));
        isometries.insert(l.to_string(), u);
    }
    let pset = QuantumSet::new(atoms)?;
    let mut k = Relation::empty(g.source().clone(), pset.clone());
    let mut f = Relation::empty(pset.clone(), g.target().clone());
    for (l, u) in &isometries {
        k.set_block(l, l, OperatorSubspace::span(&[u.adjoint()], tol)?)?;
        for (y, v) in g.blocks_from(l) {
            let mats: Vec<CMatrix> = v.basis().iter().map(|b| b * u).collect();
            f.set_block(l, y, OperatorSubspace::span_in(u.cols(), v.cod(), &mats, tol)?)?;
        }
    }
    require_function(&f, tol)?;
    let residual = Relation::compose(&f, &k, tol)?.distance(g)?;
    if residual >= tol.eq_tol {
        return Err(Error::InvalidArgument(format!(
            "corange factorization does not recompose (residual {residual:.3e})"
        )));
    }
    Ok(CorangeFactor {
        corange: p,
        pset,
        isometries,
        k,
        f,
        residual,
    })
}

/// `R(X, ℂ) = {v : v p = v}`.
pub fn projection_to_relation(p: &BlockOperator, tol: &Tolerance) -> Result<Relation> {
    check_projection(p, tol)?;
    let mut r = Relation::empty(p.carrier().clone(), QuantumSet::unit());
    for (l, m) in p.blocks() {
        r.set_block(l, UNIT_LABEL, left_eigenspace(m, 1.0, tol))?;
    }
    Ok(r)
}

/// `p = R⋆(1)`.
pub fn relation_to_projection(r: &Relation) -> Result<BlockOperator> {
    check_relation_to_unit(r)?;
    Ok(star_map_unchecked(r, &BlockOperator::identity(r.target())))
}

/// `F(X, ℂ_0) = {v : v p = 0}` and `F(X, ℂ_1) = {v : v p = v}`.
pub fn projection_to_function(p: &BlockOperator, tol: &Tolerance) -> Result<Relation> {
    check_projection(p, tol)?;
    let mut f = Relation::empty(p.carrier().clone(), bool_set());
    for (l, m) in p.blocks() {
        f.set_block(l, "0", left_eigenspace(m, 0.0, tol))?;
        f.set_block(l, "1", left_eigenspace(m, 1.0, tol))?;
    }
    Ok(f)
}

/// `p = F⋆(t)`.
pub fn function_to_projection(f: &Relation, tol: &Tolerance) -> Result<BlockOperator> {
    check_bool_function(f, tol)?;
    Ok(star_map_unchecked(f, &truth()))
}

/// `F = [R†, ¬R†]†`, with the first summand of `𝟏 ⊎ 𝟏` sent to `ℂ_1`.
pub fn relation_to_function(r: &Relation, tol: &Tolerance) -> Result<Relation> {
    check_relation_to_unit(r)?;
    let rd = r.dagger();
    let pair = Relation::copair(&rd, &rd.neg(tol))?.dagger();
    let one = QuantumSet::unit();
    let first = QuantumSet::left_label(UNIT_LABEL);
    let relabel = Relation::relabeling(one.disjoint_union(&one), bool_set(), |l| {
        if l == first {
            "1".to_string()
        } else {
            "0".to_string()
        }
    })?;
    pair.then(&relabel, tol)
}

/// `R = J_1† ∘ F`, identifying `` `{1} `` with `𝟏`.
pub fn function_to_relation(f: &Relation, tol: &Tolerance) -> Result<Relation> {
    check_bool_function(f, tol)?;
    let ones = QuantumSet::classical(&["1"])?;
    let j = crate::qfun::inclusion(&ones, &bool_set())?;
    let to_unit = Relation::relabeling(ones, QuantumSet::unit(), |_| UNIT_LABEL.to_string())?;
    f.then(&j.dagger(), tol)?.then(&to_unit, tol)
}

/// `{v ∈ L(X, ℂ) : v m = λ v}`.
fn left_eigenspace(m: &CMatrix, lambda: f64, tol: &Tolerance) -> OperatorSubspace {
    let n = m.rows();
    // v (m − λ) = 0  ⟺  (m − λ)ᵀ vᵀ = 0.
    let shifted = m - &CMatrix::identity(n).scale_real(lambda);
    let k = null_space(&shifted.transpose(), tol);
    let rows: Vec<CMatrix> = (0..k.cols()).map(|c| k.col(c).transpose()).collect();
    OperatorSubspace::span_in(n, 1, &rows, tol).expect("shapes agree")
}
