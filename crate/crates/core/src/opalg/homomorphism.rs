use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::block::{generators, BlockOperator};
use super::fission::Fission;
use super::star::{star_map_unchecked, HomomorphismReport};
use crate::error::{Error, Result};
use crate::linalg::{null_space, CMatrix, OperatorSubspace, Tolerance, C64, ZERO};
use crate::qfun::require_partial_function;
use crate::qrel::Relation;
use crate::qset::QuantumSet;

/// A linear map `φ: ℓ(Y) → ℓ(X)` given by the images of the matrix units of
/// `ℓ(Y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "HomRepr", into = "HomRepr")]
pub struct Homomorphism {
    domain: QuantumSet,
    codomain: QuantumSet,
    images: BTreeMap<(String, usize, usize), BlockOperator>,
}

#[derive(Serialize, Deserialize)]
struct ImageRepr {
    atom: String,
    row: usize,
    col: usize,
    blocks: BTreeMap<String, CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct HomRepr {
    domain: QuantumSet,
    codomain: QuantumSet,
    images: Vec<ImageRepr>,
}

impl TryFrom<HomRepr> for Homomorphism {
    type Error = Error;
    fn try_from(repr: HomRepr) -> Result<Self> {
        let mut images = BTreeMap::new();
        for img in repr.images {
            let d = repr.domain.dim_of(&img.atom)?;
            if img.row >= d || img.col >= d {
                return Err(Error::InvalidArgument(format!(
                    "generator ({}, {}) out of range for atom `{}`",
                    img.row, img.col, img.atom
                )));
            }
            let op = BlockOperator::from_blocks(repr.codomain.clone(), img.blocks)?;
            if images.insert((img.atom.clone(), img.row, img.col), op).is_some() {
                return Err(Error::DuplicateLabel(format!("image of ({}, {}, {})", img.atom, img.row, img.col)));
            }
        }
        for g in generators(&repr.domain) {
            if !images.contains_key(&(g.atom.clone(), g.row, g.col)) {
                return Err(Error::InvalidArgument(format!(
                    "missing image of generator ({}, {}, {})",
                    g.atom, g.row, g.col
                )));
            }
        }
        Ok(Homomorphism {
            domain: repr.domain,
            codomain: repr.codomain,
            images,
        })
    }
}

impl From<Homomorphism> for HomRepr {
    fn from(h: Homomorphism) -> Self {
        HomRepr {
            domain: h.domain,
            codomain: h.codomain,
            images: h
                .images
                .into_iter()
                .map(|((atom, row, col), op)| ImageRepr {
                    atom,
                    row,
                    col,
                    blocks: op.blocks().map(|(l, m)| (l.to_string(), m.clone())).collect(),
                })
                .collect(),
        }
    }
}

impl Homomorphism {
    /// Tabulates `f` on the generators of `ℓ(domain)`.
    pub fn from_fn(domain: &QuantumSet, codomain: &QuantumSet, f: impl Fn(&BlockOperator) -> BlockOperator) -> Self {
        let images = generators(domain)
            .map(|g| {
                let img = f(&g.op);
                assert_eq!(img.carrier(), codomain, "image on the wrong carrier");
                ((g.atom, g.row, g.col), img)
            })
            .collect();
        Homomorphism {
            domain: domain.clone(),
            codomain: codomain.clone(),
            images,
        }
    }

    /// `F⋆` of a partial function.
    pub fn from_function(f: &Relation, tol: &Tolerance) -> Result<Self> {
        require_partial_function(f, tol)?;
        Ok(Self::from_fn(f.target(), f.source(), |b| star_map_unchecked(f, b)))
    }

    /// `φ(b)(X) = Σ_Y f†(b(Y) ⊗ 1) f`.
    pub fn from_fission(fis: &Fission) -> Self {
        Self::from_fn(fis.target(), fis.source(), |b| fis.star(b))
    }

    pub fn domain(&self) -> &QuantumSet {
        &self.domain
    }

    pub fn codomain(&self) -> &QuantumSet {
        &self.codomain
    }

    pub fn image(&self, atom: &str, row: usize, col: usize) -> Option<&BlockOperator> {
        self.images.get(&(atom.to_string(), row, col))
    }

    /// Linear extension to an arbitrary element of `ℓ(Y)`.
    pub fn apply(&self, b: &BlockOperator) -> BlockOperator {
        let mut acc = BlockOperator::zeros(&self.codomain);
        for ((atom, i, j), img) in &self.images {
            let c = b.block(atom).expect("operator on the domain").get(*i, *j);
            if c != ZERO {
                acc = acc.add(&img.scale(c));
            }
        }
        acc
    }

    /// Residuals of `φ(e_ij)φ(e_kl) = δ_jk φ(e_il)` and `φ(e_ji) = φ(e_ij)†`.
    pub fn report(&self) -> HomomorphismReport {
        let zero = BlockOperator::zeros(&self.codomain);
        let mut mult: f64 = 0.0;
        let mut adj: f64 = 0.0;
        for ((a, i, j), x) in &self.images {
            adj = adj.max(self.images[&(a.clone(), *j, *i)].dist(&x.adjoint()));
            for ((b, k, l), y) in &self.images {
                let expect = if a == b && j == k {
                    &self.images[&(a.clone(), *i, *l)]
                } else {
                    &zero
                };
                mult = mult.max(x.mul(y).dist(expect));
            }
        }
        HomomorphismReport {
            multiplicative: mult,
            adjoint: adj,
            linear: 0.0,
            max: mult.max(adj),
        }
    }
}

/// Recovers `F(X, Y) = {v : b(Y) v = v φ(b)(X) for all b}` as a null space.
pub fn function_from_homomorphism(phi: &Homomorphism, tol: &Tolerance) -> Result<Relation> {
    let rep = phi.report();
    if !rep.passes(tol) {
        return Err(Error::NotHomomorphism { residual: rep.max });
    }
    let y_set = phi.domain();
    let x_set = phi.codomain();
    let gens: Vec<_> = generators(y_set).collect();
    let mut out = Relation::empty(x_set.clone(), y_set.clone());
    for xa in x_set.atoms() {
        for ya in y_set.atoms() {
            let (dx, dy) = (xa.dim, ya.dim);
            let n = dx * dy;
            // vec(b v) = (1 ⊗ b) vec v and vec(v c) = (cᵀ ⊗ 1) vec v.
            let mut rows: Vec<CMatrix> = Vec::with_capacity(gens.len());
            for g in &gens {
                let c = phi.images[&(g.atom.clone(), g.row, g.col)].block(&xa.label)?;
                let b = g.op.block(&ya.label)?;
                let lhs = CMatrix::identity(dx).kron(b);
                let rhs = c.transpose().kron(&CMatrix::identity(dy));
                rows.push(&lhs - &rhs);
            }
            let mut a = CMatrix::zeros(rows.len() * n, n);
            for (k, r) in rows.iter().enumerate() {
                a.set_block(k * n, 0, r);
            }
            let k = null_space(&a, tol);
            let mats: Vec<CMatrix> = (0..k.cols())
                .map(|c| {
                    let col: Vec<C64> = (0..n).map(|r| k.get(r, c)).collect();
                    CMatrix::from_vectorized(dy, dx, &col)
                })
                .collect();
            out.set_block(&xa.label, &ya.label, OperatorSubspace::span_in(dx, dy, &mats, tol)?)?;
        }
    }
    Ok(out)
}
