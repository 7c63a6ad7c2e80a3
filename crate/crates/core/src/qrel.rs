//! Binary relations between quantum sets and the dagger compact structure.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, OperatorSubspace, Tolerance, ONE};
use crate::qset::{pair_label, QuantumSet, UNIT_LABEL};

/// A relation `R: X → Y`, stored sparsely: a missing block is the zero
/// subspace of `L(X, Y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RelationRepr", into = "RelationRepr")]
pub struct Relation {
    source: QuantumSet,
    target: QuantumSet,
    blocks: BTreeMap<(String, String), OperatorSubspace>,
}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    from: String,
    to: String,
    space: OperatorSubspace,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    source: QuantumSet,
    target: QuantumSet,
    blocks: Vec<BlockRepr>,
}

impl TryFrom<RelationRepr> for Relation {
    type Error = Error;
    fn try_from(repr: RelationRepr) -> Result<Self> {
        let mut rel = Relation::empty(repr.source, repr.target);
        let mut seen = BTreeSet::new();
        for b in repr.blocks {
            if !seen.insert((b.from.clone(), b.to.clone())) {
                return Err(Error::DuplicateLabel(format!("block ({}, {})", b.from, b.to)));
            }
            rel.set_block(&b.from, &b.to, b.space)?;
        }
        Ok(rel)
    }
}

impl From<Relation> for RelationRepr {
    fn from(rel: Relation) -> Self {
        RelationRepr {
            source: rel.source,
            target: rel.target,
            blocks: rel
                .blocks
                .into_iter()
                .map(|((from, to), space)| BlockRepr { from, to, space })
                .collect(),
        }
    }
}

fn set_mismatch(what: &str, a: &QuantumSet, b: &QuantumSet) -> Error {
    let show = |s: &QuantumSet| {
        s.atoms()
            .iter()
            .map(|a| format!("{}:{}{}", a.label, a.dim, if a.dual { "*" } else { "" }))
            .collect::<Vec<_>>()
            .join(",")
    };
    Error::SetMismatch(format!("{what}: {{{}}} vs {{{}}}", show(a), show(b)))
}

impl Relation {
    /// The empty (bottom) relation `X → Y`.
    pub fn empty(source: QuantumSet, target: QuantumSet) -> Self {
        Relation {
            source,
            target,
            blocks: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &QuantumSet {
        &self.source
    }

    pub fn target(&self) -> &QuantumSet {
        &self.target
    }

    /// Sets block `(x, y)`; zero subspaces are dropped.
    pub fn set_block(&mut self, x: &str, y: &str, space: OperatorSubspace) -> Result<()> {
        let dx = self.source.dim_of(x)?;
        let dy = self.target.dim_of(y)?;
        if space.dom() != dx || space.cod() != dy {
            return Err(Error::ShapeMismatch {
                expected: format!("block ({x}, {y}) of shape {dy}x{dx}"),
                found: format!("{}x{}", space.cod(), space.dom()),
            });
        }
        let key = (x.to_string(), y.to_string());
        if space.is_zero() {
            self.blocks.remove(&key);
        } else {
            self.blocks.insert(key, space);
        }
        Ok(())
    }

    pub fn with_block(mut self, x: &str, y: &str, space: OperatorSubspace) -> Result<Self> {
        self.set_block(x, y, space)?;
        Ok(self)
    }

    /// Block `(x, y)`, materializing the zero subspace when absent.
    pub fn block(&self, x: &str, y: &str) -> Result<OperatorSubspace> {
        let dx = self.source.dim_of(x)?;
        let dy = self.target.dim_of(y)?;
        Ok(self
            .blocks
            .get(&(x.to_string(), y.to_string()))
            .cloned()
            .unwrap_or_else(|| OperatorSubspace::zero(dx, dy)))
    }

    pub fn block_ref(&self, x: &str, y: &str) -> Option<&OperatorSubspace> {
        self.blocks.get(&(x.to_string(), y.to_string()))
    }

    /// Nonzero blocks in label order.
    pub fn blocks(&self) -> impl Iterator<Item = (&str, &str, &OperatorSubspace)> {
        self.blocks
            .iter()
            .map(|((x, y), v)| (x.as_str(), y.as_str(), v))
    }

    /// Nonzero blocks leaving the source atom `x`.
    pub fn blocks_from<'a>(&'a self, x: &'a str) -> impl Iterator<Item = (&'a str, &'a OperatorSubspace)> {
        self.blocks
            .iter()
            .filter(move |((a, _), _)| a == x)
            .map(|((_, y), v)| (y.as_str(), v))
    }

    /// Nonzero blocks entering the target atom `y`.
    pub fn blocks_into<'a>(&'a self, y: &'a str) -> impl Iterator<Item = (&'a str, &'a OperatorSubspace)> {
        self.blocks
            .iter()
            .filter(move |((_, b), _)| b == y)
            .map(|((x, _), v)| (x.as_str(), v))
    }

    pub fn nnz(&self) -> usize {
        self.blocks.len()
    }

    /// `I_X`, with diagonal blocks `ℂ·1`.
    pub fn identity(x: &QuantumSet) -> Relation {
        let mut r = Relation::empty(x.clone(), x.clone());
        for a in x.atoms() {
            r.blocks.insert(
                (a.label.clone(), a.label.clone()),
                OperatorSubspace::scalar_identity(a.dim),
            );
        }
        r
    }

    /// `S ∘ R` for `R: X → Y` and `S: Y → Z`.
    pub fn compose(s: &Relation, r: &Relation, tol: &Tolerance) -> Result<Relation> {
        if r.target != s.source {
            return Err(set_mismatch("cannot compose, middle sets differ", &r.target, &s.source));
        }
        let mut by_source: BTreeMap<&str, Vec<(&str, &OperatorSubspace)>> = BTreeMap::new();
        for (y, z, v) in s.blocks() {
            by_source.entry(y).or_default().push((z, v));
        }
        let mut products: BTreeMap<(String, String), Vec<CMatrix>> = BTreeMap::new();
        for (x, y, rv) in r.blocks() {
            let Some(outs) = by_source.get(y) else { continue };
            for (z, sv) in outs {
                let acc = products.entry((x.to_string(), z.to_string())).or_default();
                for sb in sv.basis() {
                    for rb in rv.basis() {
                        acc.push(sb * rb);
                    }
                }
            }
        }
        let mut out = Relation::empty(r.source.clone(), s.target.clone());
        for ((x, z), mats) in products {
            let dx = r.source.dim_of(&x)?;
            let dz = s.target.dim_of(&z)?;
            let v = OperatorSubspace::span_unchecked(dx, dz, &mats, tol);
            if !v.is_zero() {
                out.blocks.insert((x, z), v);
            }
        }
        Ok(out)
    }

    /// `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &Relation, tol: &Tolerance) -> Result<Relation> {
        Relation::compose(next, self, tol)
    }

    /// `R†: Y → X`, blockwise conjugate transpose.
    pub fn dagger(&self) -> Relation {
        Relation {
            source: self.target.clone(),
            target: self.source.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|((x, y), v)| ((y.clone(), x.clone()), v.dagger()))
                .collect(),
        }
    }

    /// `R*: Y* → X*`, blockwise transpose.
    pub fn dual(&self) -> Relation {
        Relation {
            source: self.target.dual(),
            target: self.source.dual(),
            blocks: self
                .blocks
                .iter()
                .map(|((x, y), v)| ((y.clone(), x.clone()), v.transpose_dual()))
                .collect(),
        }
    }

    /// `R1 × R2: X1 × X2 → Y1 × Y2`, blockwise tensor product.
    pub fn times(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(
            self.source.product(&other.source),
            self.target.product(&other.target),
        );
        for (x1, y1, v1) in self.blocks() {
            for (x2, y2, v2) in other.blocks() {
                out.blocks
                    .insert((pair_label(x1, x2), pair_label(y1, y2)), v1.tensor(v2));
            }
        }
        out
    }

    fn check_parallel(&self, other: &Relation) -> Result<()> {
        if self.source != other.source {
            return Err(set_mismatch("sources differ", &self.source, &other.source));
        }
        if self.target != other.target {
            return Err(set_mismatch("targets differ", &self.target, &other.target));
        }
        Ok(())
    }

    fn all_pairs(&self) -> Vec<(String, String, usize, usize)> {
        let mut v = Vec::new();
        for a in self.source.atoms() {
            for b in self.target.atoms() {
                v.push((a.label.clone(), b.label.clone(), a.dim, b.dim));
            }
        }
        v
    }

    pub fn join(&self, other: &Relation, tol: &Tolerance) -> Result<Relation> {
        self.check_parallel(other)?;
        let mut out = self.clone();
        for (x, y, v) in other.blocks() {
            let joined = match self.block_ref(x, y) {
                Some(w) => w.join(v, tol)?,
                None => v.clone(),
            };
            out.blocks.insert((x.to_string(), y.to_string()), joined);
        }
        Ok(out)
    }

    pub fn meet(&self, other: &Relation, tol: &Tolerance) -> Result<Relation> {
        self.check_parallel(other)?;
        let mut out = Relation::empty(self.source.clone(), self.target.clone());
        for (x, y, v) in self.blocks() {
            if let Some(w) = other.block_ref(x, y) {
                let m = v.meet(w, tol)?;
                if !m.is_zero() {
                    out.blocks.insert((x.to_string(), y.to_string()), m);
                }
            }
        }
        Ok(out)
    }

    /// `¬R`, the atomwise orthogonal complement.
    pub fn neg(&self, tol: &Tolerance) -> Relation {
        let mut out = Relation::empty(self.source.clone(), self.target.clone());
        for (x, y, dx, dy) in self.all_pairs() {
            let c = match self.block_ref(&x, &y) {
                Some(v) => v.complement(tol),
                None => OperatorSubspace::full(dx, dy),
            };
            if !c.is_zero() {
                out.blocks.insert((x, y), c);
            }
        }
        out
    }

    /// The top relation, every block the full operator space.
    pub fn top(source: QuantumSet, target: QuantumSet) -> Relation {
        let mut out = Relation::empty(source, target);
        for (x, y, dx, dy) in out.all_pairs() {
            out.blocks.insert((x, y), OperatorSubspace::full(dx, dy));
        }
        out
    }

    /// Largest residual of a block basis element of `self` against `other`.
    pub fn excess_over(&self, other: &Relation) -> Result<f64> {
        self.check_parallel(other)?;
        let mut worst: f64 = 0.0;
        for (x, y, v) in self.blocks() {
            let e = match other.block_ref(x, y) {
                Some(w) => v.excess_over(w),
                None => 1.0,
            };
            worst = worst.max(e);
        }
        Ok(worst)
    }

    pub fn leq(&self, other: &Relation, tol: &Tolerance) -> Result<bool> {
        Ok(self.excess_over(other)? < tol.eq_tol)
    }

    /// `R ⊥ S`: every block of `R` is orthogonal to the matching block of `S`.
    pub fn perp(&self, other: &Relation, tol: &Tolerance) -> Result<bool> {
        self.check_parallel(other)?;
        for (x, y, v) in self.blocks() {
            if let Some(w) = other.block_ref(x, y) {
                if !v.perp(w, tol)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Largest projector distance over all blocks.
    pub fn distance(&self, other: &Relation) -> Result<f64> {
        self.check_parallel(other)?;
        let keys: BTreeSet<&(String, String)> = self.blocks.keys().chain(other.blocks.keys()).collect();
        let mut worst: f64 = 0.0;
        for (x, y) in keys {
            let d = self.block(x, y)?.distance(&other.block(x, y)?)?;
            worst = worst.max(d);
        }
        Ok(worst)
    }

    pub fn eq(&self, other: &Relation, tol: &Tolerance) -> Result<bool> {
        Ok(self.distance(other)? < tol.eq_tol)
    }

    /// `η_X: 𝟏 → X × X*`, spanned by `Σ_i e_i ⊗ e_i` on each atom.
    pub fn unit(x: &QuantumSet) -> Relation {
        let mut out = Relation::empty(QuantumSet::unit(), x.product(&x.dual()));
        for a in x.atoms() {
            let n = a.dim;
            let mut eta = CMatrix::zeros(n * n, 1);
            for i in 0..n {
                eta.set(i * n + i, 0, ONE);
            }
            let eta = eta.scale_real(1.0 / (n as f64).sqrt());
            out.blocks.insert(
                (UNIT_LABEL.to_string(), pair_label(&a.label, &a.label)),
                OperatorSubspace::from_orthonormal(1, n * n, vec![eta]),
            );
        }
        out
    }

    /// `ε_X: X* × X → 𝟏`, spanned by `Σ_i e_i† ⊗ e_i†` on each atom.
    pub fn counit(x: &QuantumSet) -> Relation {
        let mut out = Relation::empty(x.dual().product(x), QuantumSet::unit());
        for a in x.atoms() {
            let n = a.dim;
            let mut eps = CMatrix::zeros(1, n * n);
            for i in 0..n {
                eps.set(0, i * n + i, ONE);
            }
            let eps = eps.scale_real(1.0 / (n as f64).sqrt());
            out.blocks.insert(
                (pair_label(&a.label, &a.label), UNIT_LABEL.to_string()),
                OperatorSubspace::from_orthonormal(n * n, 1, vec![eps]),
            );
        }
        out
    }

    /// Permutation matrix `e_i ⊗ e_j ↦ e_j ⊗ e_i` from `ℂ^dx ⊗ ℂ^dy`.
    pub fn swap_matrix(dx: usize, dy: usize) -> CMatrix {
        let n = dx * dy;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..dx {
            for j in 0..dy {
                m.set(j * dx + i, i * dy + j, ONE);
            }
        }
        m
    }

    /// `σ: X × Y → Y × X`.
    pub fn braiding(x: &QuantumSet, y: &QuantumSet) -> Relation {
        let mut out = Relation::empty(x.product(y), y.product(x));
        let n_scale = |n: usize| 1.0 / (n as f64).sqrt();
        for a in x.atoms() {
            for b in y.atoms() {
                let s = Self::swap_matrix(a.dim, b.dim).scale_real(n_scale(a.dim * b.dim));
                out.blocks.insert(
                    (pair_label(&a.label, &b.label), pair_label(&b.label, &a.label)),
                    OperatorSubspace::from_orthonormal(a.dim * b.dim, a.dim * b.dim, vec![s]),
                );
            }
        }
        out
    }

    /// Relabeling relation with `ℂ·1` blocks from `source` to `target`,
    /// following `map` on labels. Dimensions must agree.
    pub fn relabeling(
        source: QuantumSet,
        target: QuantumSet,
        map: impl Fn(&str) -> String,
    ) -> Result<Relation> {
        let mut out = Relation::empty(source, target);
        let pairs: Vec<(String, String, usize)> = out
            .source
            .atoms()
            .iter()
            .map(|a| (a.label.clone(), map(&a.label), a.dim))
            .collect();
        for (x, y, d) in pairs {
            let dy = out.target.dim_of(&y)?;
            if dy != d {
                return Err(Error::ShapeMismatch {
                    expected: format!("atom `{y}` of dimension {d}"),
                    found: format!("dimension {dy}"),
                });
            }
            out.blocks.insert((x, y), OperatorSubspace::scalar_identity(d));
        }
        Ok(out)
    }

    /// `α: (X × Y) × Z → X × (Y × Z)`.
    pub fn associator(x: &QuantumSet, y: &QuantumSet, z: &QuantumSet) -> Relation {
        let mut out = Relation::empty(x.product(y).product(z), x.product(&y.product(z)));
        for a in x.atoms() {
            for b in y.atoms() {
                for c in z.atoms() {
                    out.blocks.insert(
                        (
                            pair_label(&pair_label(&a.label, &b.label), &c.label),
                            pair_label(&a.label, &pair_label(&b.label, &c.label)),
                        ),
                        OperatorSubspace::scalar_identity(a.dim * b.dim * c.dim),
                    );
                }
            }
        }
        out
    }

    /// `λ: 𝟏 × X → X`.
    pub fn left_unitor(x: &QuantumSet) -> Relation {
        let mut out = Relation::empty(QuantumSet::unit().product(x), x.clone());
        for a in x.atoms() {
            out.blocks.insert(
                (pair_label(UNIT_LABEL, &a.label), a.label.clone()),
                OperatorSubspace::scalar_identity(a.dim),
            );
        }
        out
    }

    /// `ρ: X × 𝟏 → X`.
    pub fn right_unitor(x: &QuantumSet) -> Relation {
        let mut out = Relation::empty(x.product(&QuantumSet::unit()), x.clone());
        for a in x.atoms() {
            out.blocks.insert(
                (pair_label(&a.label, UNIT_LABEL), a.label.clone()),
                OperatorSubspace::scalar_identity(a.dim),
            );
        }
        out
    }

    /// `J_1: X → X ⊎ Y`.
    pub fn inj_left(x: &QuantumSet, y: &QuantumSet) -> Relation {
        let mut out = Relation::empty(x.clone(), x.disjoint_union(y));
        for a in x.atoms() {
            out.blocks.insert(
                (a.label.clone(), QuantumSet::left_label(&a.label)),
                OperatorSubspace::scalar_identity(a.dim),
            );
        }
        out
    }

    /// `J_2: Y → X ⊎ Y`.
    pub fn inj_right(x: &QuantumSet, y: &QuantumSet) -> Relation {
        let mut out = Relation::empty(y.clone(), x.disjoint_union(y));
        for a in y.atoms() {
            out.blocks.insert(
                (a.label.clone(), QuantumSet::right_label(&a.label)),
                OperatorSubspace::scalar_identity(a.dim),
            );
        }
        out
    }

    /// `[R, S]: X ⊎ Y → Z`.
    pub fn copair(r: &Relation, s: &Relation) -> Result<Relation> {
        if r.target != s.target {
            return Err(set_mismatch("copair needs a shared target", &r.target, &s.target));
        }
        let mut out = Relation::empty(r.source.disjoint_union(&s.source), r.target.clone());
        for (x, z, v) in r.blocks() {
            out.blocks
                .insert((QuantumSet::left_label(x), z.to_string()), v.clone());
        }
        for (y, z, v) in s.blocks() {
            out.blocks
                .insert((QuantumSet::right_label(y), z.to_string()), v.clone());
        }
        Ok(out)
    }

    /// `` `r `` for an ordinary relation `r ⊆ S × T`.
    pub fn from_classical<S: AsRef<str>>(
        source: &QuantumSet,
        target: &QuantumSet,
        pairs: &[(S, S)],
    ) -> Result<Relation> {
        if !source.is_classical() || !target.is_classical() {
            return Err(Error::InvalidArgument(
                "classical relations need classical source and target".into(),
            ));
        }
        let mut out = Relation::empty(source.clone(), target.clone());
        for (s, t) in pairs {
            out.set_block(s.as_ref(), t.as_ref(), OperatorSubspace::full(1, 1))?;
        }
        Ok(out)
    }

    /// The ordinary relation underlying a relation between classical sets.
    pub fn to_classical(&self) -> Option<BTreeSet<(String, String)>> {
        if !self.source.is_classical() || !self.target.is_classical() {
            return None;
        }
        Some(self.blocks.keys().cloned().collect())
    }

    /// Applies `f` to every basis element of every block, re-spanning the
    /// result. Used for fault injection and basis perturbation experiments.
    pub fn map_blocks(
        &self,
        tol: &Tolerance,
        f: impl Fn(&str, &str, &CMatrix) -> CMatrix,
    ) -> Result<Relation> {
        let mut out = Relation::empty(self.source.clone(), self.target.clone());
        for (x, y, v) in self.blocks() {
            let w = v.map_span(v.dom(), v.cod(), tol, |m| f(x, y, m))?;
            out.set_block(x, y, w)?;
        }
        Ok(out)
    }
}
