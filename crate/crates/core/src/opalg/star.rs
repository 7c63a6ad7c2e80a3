use serde::{Deserialize, Serialize};

use super::block::{generators, BlockOperator};
use crate::error::{Error, Result};
use crate::linalg::{rank, CMatrix, Tolerance, C64};
use crate::qfun::require_partial_function;
use crate::qrel::Relation;

/// `F⋆(b)(X) = Σ_Y Σ_w dim(Y)·w† b(Y) w` over HS-orthonormal bases of the
/// blocks `F(X, Y)`, without checking that `F` is a partial function.
pub fn star_map_unchecked(f: &Relation, b: &BlockOperator) -> BlockOperator {
    BlockOperator::from_fn(f.source(), |x, dx| {
        let mut acc = CMatrix::zeros(dx, dx);
        for (y, v) in f.blocks_from(x) {
            let by = b.block(y).expect("operator lives on the relation's target");
            let dy = v.cod() as f64;
            for w in v.basis() {
                acc = &acc + &(&(&w.adjoint() * by) * w).scale_real(dy);
            }
        }
        acc
    })
}

/// The *-homomorphism `F⋆: ℓ(Y) → ℓ(X)` of a partial function `F: X → Y`.
pub fn star_map(f: &Relation, b: &BlockOperator, tol: &Tolerance) -> Result<BlockOperator> {
    require_partial_function(f, tol)?;
    if b.carrier() != f.target() {
        return Err(Error::SetMismatch(
            "operator carrier differs from the relation's target".into(),
        ));
    }
    Ok(star_map_unchecked(f, b))
}

/// Largest residuals of the *-homomorphism identities on generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub linear: f64,
    pub max: f64,
}

impl HomomorphismReport {
    pub fn passes(&self, tol: &Tolerance) -> bool {
        self.max < tol.eq_tol
    }
}

/// Evaluates the star formula on all generator pairs and compares
/// `F⋆(ab)` with `F⋆(a)F⋆(b)`, `F⋆(a†)` with `F⋆(a)†`, and
/// `F⋆(a + i b)` with `F⋆(a) + i F⋆(b)`.
pub fn star_is_homomorphism(f: &Relation) -> HomomorphismReport {
    let gens: Vec<BlockOperator> = generators(f.target()).map(|g| g.op).collect();
    let imgs: Vec<BlockOperator> = gens.iter().map(|g| star_map_unchecked(f, g)).collect();
    let i = C64::new(0.0, 1.0);
    let mut mult: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let mut lin: f64 = 0.0;
    for (a, fa) in gens.iter().zip(&imgs) {
        adj = adj.max(star_map_unchecked(f, &a.adjoint()).dist(&fa.adjoint()));
        for (b, fb) in gens.iter().zip(&imgs) {
            let prod = star_map_unchecked(f, &a.mul(b));
            mult = mult.max(prod.dist(&fa.mul(fb)));
            let comb = star_map_unchecked(f, &a.add(&b.scale(i)));
            lin = lin.max(comb.dist(&fa.add(&fb.scale(i))));
        }
    }
    HomomorphismReport {
        multiplicative: mult,
        adjoint: adj,
        linear: lin,
        max: mult.max(adj).max(lin),
    }
}

/// `‖F⋆(1) − 1‖`.
pub fn unitality_residual(f: &Relation) -> f64 {
    let one = BlockOperator::identity(f.target());
    star_map_unchecked(f, &one).dist(&BlockOperator::identity(f.source()))
}

pub fn is_unital(f: &Relation, tol: &Tolerance) -> Result<bool> {
    require_partial_function(f, tol)?;
    Ok(unitality_residual(f) < tol.eq_tol)
}

/// `F⋆` is injective iff no central projection `δ_Y` lies in its kernel.
pub fn star_injective(f: &Relation, tol: &Tolerance) -> Result<bool> {
    require_partial_function(f, tol)?;
    for y in f.target().labels() {
        let delta = BlockOperator::indicator(f.target(), y)?;
        if star_map_unchecked(f, &delta).norm() < tol.eq_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `F⋆` is surjective iff the images of the generators span `ℓ(X)`.
pub fn star_surjective(f: &Relation, tol: &Tolerance) -> Result<bool> {
    require_partial_function(f, tol)?;
    let total = f.source().total_sq_dim();
    if total == 0 {
        return Ok(true);
    }
    let cols: Vec<Vec<C64>> = generators(f.target())
        .map(|g| star_map_unchecked(f, &g.op).vectorize())
        .collect();
    if cols.len() < total {
        return Ok(false);
    }
    let m = CMatrix::from_fn(total, cols.len(), |r, c| cols[c][r]);
    Ok(rank(&m, tol) == total)
}
