//! Functions, partial functions and their classification inside the category
//! of relations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, OperatorSubspace, Tolerance};
use crate::opalg::{generators, star_map_unchecked, BlockOperator};
use crate::qrel::Relation;
use crate::qset::{QuantumSet, UNIT_LABEL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub coinjective: f64,
    pub cosurjective: f64,
    pub injective: f64,
    pub surjective: f64,
}

/// Outcome of the four axiom checks on a relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionWitness {
    pub function: bool,
    pub partial_function: bool,
    pub coinjective: bool,
    pub cosurjective: bool,
    pub injective: bool,
    pub surjective: bool,
    pub residuals: Residuals,
}

/// `F F† ≤ I` residual: off-diagonal products must vanish, diagonal ones
/// must be scalar.
pub fn coinjectivity_residual(f: &Relation) -> f64 {
    let mut worst: f64 = 0.0;
    for x in f.source().labels() {
        let out: Vec<(&str, &OperatorSubspace)> = f.blocks_from(x).collect();
        for (y1, v1) in &out {
            for (y2, v2) in &out {
                for a in v1.basis() {
                    for b in v2.basis() {
                        let p = a * &b.adjoint();
                        let r = if y1 == y2 { scalar_residual(&p) } else { p.frob_norm() };
                        worst = worst.max(r);
                    }
                }
            }
        }
    }
    worst
}

/// `F† F ≥ I` residual: distance of `1_X/√n` from `(F†F)(X, X)`, maximized
/// over source atoms.
pub fn cosurjectivity_residual(f: &Relation, tol: &Tolerance) -> f64 {
    let mut worst: f64 = 0.0;
    for atom in f.source().atoms() {
        let n = atom.dim;
        let mut mats = Vec::new();
        for (_, v) in f.blocks_from(&atom.label) {
            for a in v.basis() {
                for b in v.basis() {
                    mats.push(&b.adjoint() * a);
                }
            }
        }
        let span = OperatorSubspace::span_unchecked(n, n, &mats, tol);
        let one = CMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt());
        worst = worst.max(span.residual(&one));
    }
    worst
}

/// Distance of `m` from `ℂ·1`.
fn scalar_residual(m: &CMatrix) -> f64 {
    let n = m.rows();
    let c = m.trace() / n as f64;
    m.dist(&CMatrix::identity(n).scale(c))
}

pub fn check_axioms(f: &Relation, tol: &Tolerance) -> FunctionWitness {
    let d = f.dagger();
    let residuals = Residuals {
        coinjective: coinjectivity_residual(f),
        cosurjective: cosurjectivity_residual(f, tol),
        injective: coinjectivity_residual(&d),
        surjective: cosurjectivity_residual(&d, tol),
    };
    let ok = |r: f64| r < tol.eq_tol;
    let coinjective = ok(residuals.coinjective);
    let cosurjective = ok(residuals.cosurjective);
    FunctionWitness {
        function: coinjective && cosurjective,
        partial_function: coinjective,
        coinjective,
        cosurjective,
        injective: ok(residuals.injective),
        surjective: ok(residuals.surjective),
        residuals,
    }
}

pub fn is_partial_function(f: &Relation, tol: &Tolerance) -> bool {
    coinjectivity_residual(f) < tol.eq_tol
}

pub fn is_function(f: &Relation, tol: &Tolerance) -> bool {
    is_partial_function(f, tol) && cosurjectivity_residual(f, tol) < tol.eq_tol
}

pub(crate) fn require_partial_function(f: &Relation, tol: &Tolerance) -> Result<()> {
    let residual = coinjectivity_residual(f);
    if residual < tol.eq_tol {
        Ok(())
    } else {
        Err(Error::NotPartialFunction { residual })
    }
}

pub(crate) fn require_function(f: &Relation, tol: &Tolerance) -> Result<()> {
    let coinjective = coinjectivity_residual(f);
    let cosurjective = cosurjectivity_residual(f, tol);
    if coinjective < tol.eq_tol && cosurjective < tol.eq_tol {
        Ok(())
    } else {
        Err(Error::NotFunction {
            coinjective,
            cosurjective,
        })
    }
}

/// An invertible function as an atom bijection with one unitary per atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertibleDecomposition {
    pub atom_bijection: BTreeMap<String, String>,
    pub unitaries: BTreeMap<String, CMatrix>,
}

impl InvertibleDecomposition {
    pub fn reconstruct(&self, source: &QuantumSet, target: &QuantumSet) -> Result<Relation> {
        let mut r = Relation::empty(source.clone(), target.clone());
        for (x, y) in &self.atom_bijection {
            let u = &self.unitaries[x];
            r.set_block(x, y, OperatorSubspace::span(std::slice::from_ref(u), &Tolerance::default())?)?;
        }
        Ok(r)
    }

    /// Largest `‖u†u − 1‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        self.unitaries
            .values()
            .map(|u| (&u.adjoint() * u).dist(&CMatrix::identity(u.cols())))
            .fold(0.0, f64::max)
    }
}

/// Splits an injective and surjective function into a bijection of atoms and
/// spanning unitaries; `None` when the function is not invertible.
pub fn invertible_decompose(f: &Relation, tol: &Tolerance) -> Result<Option<InvertibleDecomposition>> {
    require_function(f, tol)?;
    let w = check_axioms(f, tol);
    if !(w.injective && w.surjective) {
        return Ok(None);
    }
    let mut atom_bijection = BTreeMap::new();
    let mut unitaries = BTreeMap::new();
    for atom in f.source().atoms() {
        let out: Vec<(&str, &OperatorSubspace)> = f.blocks_from(&atom.label).collect();
        if out.len() != 1 || out[0].1.dim() != 1 {
            return Ok(None);
        }
        let (y, v) = out[0];
        let b = &v.basis()[0];
        if !b.is_square() {
            return Ok(None);
        }
        atom_bijection.insert(atom.label.clone(), y.to_string());
        unitaries.insert(atom.label.clone(), b.scale_real((atom.dim as f64).sqrt()));
    }
    let dec = InvertibleDecomposition {
        atom_bijection,
        unitaries,
    };
    if dec.unitarity_residual() >= tol.eq_tol {
        return Ok(None);
    }
    Ok(Some(dec))
}

/// `J: X → Y` for a subset `X ⊆ Y`, with blocks `ℂ·1`.
pub fn inclusion(sub: &QuantumSet, ambient: &QuantumSet) -> Result<Relation> {
    if !sub.is_subset_of(ambient) {
        let missing: Vec<&str> = sub
            .atoms()
            .iter()
            .filter(|a| ambient.get(&a.label) != Some(a))
            .map(|a| a.label.as_str())
            .collect();
        return Err(Error::NotSubset(format!("atoms {missing:?} are not atoms of the ambient set")));
    }
    Relation::relabeling(sub.clone(), ambient.clone(), |l| l.to_string())
}

/// `Q: X → `At(X)`, contracting each atom to a point: `Q(X, ℂ_X) = L(X, ℂ)`.
pub fn canonical_surjection(x: &QuantumSet) -> Relation {
    let labels: Vec<&str> = x.labels().collect();
    let target = QuantumSet::classical(&labels).expect("labels of a quantum set are distinct");
    let mut r = Relation::empty(x.clone(), target);
    for a in x.atoms() {
        r.set_block(&a.label, &a.label, OperatorSubspace::full(a.dim, 1))
            .expect("atoms exist");
    }
    r
}

/// `!: X → 𝟏`, with blocks `L(X, ℂ)`.
pub fn terminal(x: &QuantumSet) -> Relation {
    let mut r = Relation::empty(x.clone(), QuantumSet::unit());
    for a in x.atoms() {
        r.set_block(&a.label, UNIT_LABEL, OperatorSubspace::full(a.dim, 1))
            .expect("atoms exist");
    }
    r
}

/// `P1 = ρ ∘ (I × !)` and `P2 = λ ∘ (! × I)`.
pub fn projections(x: &QuantumSet, y: &QuantumSet, tol: &Tolerance) -> Result<(Relation, Relation)> {
    let p1 = Relation::identity(x)
        .times(&terminal(y))
        .then(&Relation::right_unitor(x), tol)?;
    let p2 = terminal(x)
        .times(&Relation::identity(y))
        .then(&Relation::left_unitor(y), tol)?;
    Ok((p1, p2))
}

/// Largest commutator norm between star images of generators under two
/// functions with a common source.
pub fn compatibility_residual(f1: &Relation, f2: &Relation, tol: &Tolerance) -> Result<f64> {
    require_function(f1, tol)?;
    require_function(f2, tol)?;
    if f1.source() != f2.source() {
        return Err(Error::SetMismatch("compatibility needs a common source".into()));
    }
    let imgs1: Vec<BlockOperator> = generators(f1.target())
        .map(|g| star_map_unchecked(f1, &g.op))
        .collect();
    let imgs2: Vec<BlockOperator> = generators(f2.target())
        .map(|g| star_map_unchecked(f2, &g.op))
        .collect();
    let mut worst: f64 = 0.0;
    for a in &imgs1 {
        for b in &imgs2 {
            worst = worst.max(a.commutator(b).norm());
        }
    }
    Ok(worst)
}

pub fn compatible(f1: &Relation, f2: &Relation, tol: &Tolerance) -> Result<bool> {
    Ok(compatibility_residual(f1, f2, tol)? < tol.eq_tol)
}

/// Largest distance of a star image of a generator from the scalars.
pub fn classicality_residual(f: &Relation, tol: &Tolerance) -> Result<f64> {
    require_function(f, tol)?;
    let mut worst: f64 = 0.0;
    for g in generators(f.target()) {
        let img = star_map_unchecked(f, &g.op);
        for (_, m) in img.blocks() {
            worst = worst.max(scalar_residual(m));
        }
    }
    Ok(worst)
}

pub fn is_classical(f: &Relation, tol: &Tolerance) -> Result<bool> {
    Ok(classicality_residual(f, tol)? < tol.eq_tol)
}

/// For a classical function, the ordinary map `f` on atom labels with
/// `F = J ∘ `f ∘ Q`; `None` otherwise.
pub fn classify_classical(f: &Relation, tol: &Tolerance) -> Result<Option<BTreeMap<String, String>>> {
    if !is_classical(f, tol)? {
        return Ok(None);
    }
    let mut map = BTreeMap::new();
    for x in f.source().labels() {
        let out: Vec<(&str, &OperatorSubspace)> = f.blocks_from(x).collect();
        if out.len() != 1 || f.target().dim_of(out[0].0)? != 1 {
            return Ok(None);
        }
        map.insert(x.to_string(), out[0].0.to_string());
    }
    Ok(Some(map))
}

/// The two-atom set `𝟏 ⊎ 𝟏`; the right atom plays the role of "true".
pub fn omega() -> QuantumSet {
    let one = QuantumSet::unit();
    one.disjoint_union(&one)
}

pub fn omega_true() -> String {
    QuantumSet::right_label(UNIT_LABEL)
}

pub fn omega_false() -> String {
    QuantumSet::left_label(UNIT_LABEL)
}

/// Classifying map `X → 𝟏 ⊎ 𝟏` of a monomorphism `J: Z ↣ X`; validated
/// against `F ∘ J = T ∘ !`.
pub fn classify_subobject(j: &Relation, tol: &Tolerance) -> Result<Relation> {
    require_function(j, tol)?;
    let residual = coinjectivity_residual(&j.dagger());
    if residual >= tol.eq_tol {
        return Err(Error::NotInjective { residual });
    }
    let x = j.target();
    let mut f = Relation::empty(x.clone(), omega());
    for a in x.atoms() {
        let hit = j.blocks_into(&a.label).next().is_some();
        let t = if hit { omega_true() } else { omega_false() };
        f.set_block(&a.label, &t, OperatorSubspace::full(a.dim, 1))?;
    }
    let one = QuantumSet::unit();
    let t = Relation::inj_right(&one, &one);
    let lhs = j.then(&f, tol)?;
    let rhs = terminal(j.source()).then(&t, tol)?;
    let d = lhs.distance(&rhs)?;
    if d >= tol.eq_tol {
        return Err(Error::InvalidArgument(format!(
            "classifying map does not restrict to true along the subobject (residual {d:.3e})"
        )));
    }
    Ok(f)
}
