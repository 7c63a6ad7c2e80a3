//! Seeded generators for random quantum sets, relations, functions,
//! predicates and unitaries.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, OperatorSubspace, Tolerance, C64};
use crate::opalg::BlockOperator;
use crate::pred::Predicate;
use crate::qrel::Relation;
use crate::qset::{Atom, QuantumSet};

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag R` moved into `Q`.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = gaussian(rng, n, n).into_inner().qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    CMatrix::from_inner(q)
}

/// Random Hermitian matrix `(G + G†) / 2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// A quantum set with `1..=max_atoms` atoms `prefix0, prefix1, …` of
/// dimensions in `1..=max_dim`.
pub fn quantum_set<R: Rng + ?Sized>(rng: &mut R, prefix: &str, max_atoms: usize, max_dim: usize) -> QuantumSet {
    let n = rng.gen_range(1..=max_atoms.max(1));
    let atoms = (0..n)
        .map(|i| Atom::new(format!("{prefix}{i}"), rng.gen_range(1..=max_dim.max(1))))
        .collect();
    QuantumSet::new(atoms).expect("distinct labels and positive dimensions")
}

/// A random subspace of `L(ℂ^dom, ℂ^cod)`. Zero with probability `1/3`,
/// full with probability `1/6`, otherwise spanned by a few Gaussian
/// operators.
pub fn subspace<R: Rng + ?Sized>(rng: &mut R, dom: usize, cod: usize, tol: &Tolerance) -> OperatorSubspace {
    let n = dom * cod;
    let roll: f64 = rng.gen();
    if roll < 1.0 / 3.0 {
        return OperatorSubspace::zero(dom, cod);
    }
    if roll < 0.5 {
        return OperatorSubspace::full(dom, cod);
    }
    let k = rng.gen_range(1..=n);
    let mats: Vec<CMatrix> = (0..k).map(|_| gaussian(rng, cod, dom)).collect();
    OperatorSubspace::span_in(dom, cod, &mats, tol).expect("shapes agree")
}

pub fn relation<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet, y: &QuantumSet, tol: &Tolerance) -> Relation {
    let mut out = Relation::empty(x.clone(), y.clone());
    for a in x.atoms() {
        for b in y.atoms() {
            out.set_block(&a.label, &b.label, subspace(rng, a.dim, b.dim, tol))
                .expect("shapes agree");
        }
    }
    out
}

/// Multiplicities `m_Y` with `Σ m_Y d_Y = n` (or `≤ n` when `partial`).
fn multiplicities<R: Rng + ?Sized>(rng: &mut R, y: &QuantumSet, n: usize, partial: bool) -> Option<Vec<usize>> {
    let dims: Vec<usize> = y.atoms().iter().map(|a| a.dim).collect();
    let mut m = vec![0; dims.len()];
    let mut left = n;
    loop {
        let fits: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] <= left).collect();
        if left == 0 || fits.is_empty() || (partial && rng.gen_bool(0.25)) {
            break;
        }
        let i = *fits.choose(rng).expect("nonempty");
        m[i] += 1;
        left -= dims[i];
    }
    (partial || left == 0).then_some(m)
}

/// The relation whose star map is `b ↦ U (⊕_Y b(Y) ⊗ 1_{m_Y} ⊕ 0) U†` on
/// each source atom.
fn function_from_layout<R: Rng + ?Sized>(
    rng: &mut R,
    x: &QuantumSet,
    y: &QuantumSet,
    layout: &[Vec<usize>],
    tol: &Tolerance,
) -> Relation {
    let mut out = Relation::empty(x.clone(), y.clone());
    for (a, m) in x.atoms().iter().zip(layout) {
        let u = unitary(rng, a.dim);
        let mut col = 0;
        for (b, &mult) in y.atoms().iter().zip(m) {
            let mut mats = Vec::with_capacity(mult);
            for _ in 0..mult {
                mats.push(u.block(0, col, a.dim, b.dim).adjoint());
                col += b.dim;
            }
            if !mats.is_empty() {
                let space = OperatorSubspace::span_in(a.dim, b.dim, &mats, tol).expect("shapes agree");
                out.set_block(&a.label, &b.label, space).expect("shapes agree");
            }
        }
    }
    out
}

/// A random function `X → Y`, or `None` if some atom of `X` has a
/// dimension that is not a sum of dimensions of `Y`.
pub fn function<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet, y: &QuantumSet, tol: &Tolerance) -> Option<Relation> {
    let mut layout = Vec::with_capacity(x.len());
    for a in x.atoms() {
        let mut found = None;
        for _ in 0..16 {
            if let Some(m) = multiplicities(rng, y, a.dim, false) {
                found = Some(m);
                break;
            }
        }
        layout.push(found?);
    }
    Some(function_from_layout(rng, x, y, &layout, tol))
}

/// A random partial function `X → Y`.
pub fn partial_function<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet, y: &QuantumSet, tol: &Tolerance) -> Relation {
    let layout: Vec<Vec<usize>> = x
        .atoms()
        .iter()
        .map(|a| multiplicities(rng, y, a.dim, true).expect("partial layouts always exist"))
        .collect();
    function_from_layout(rng, x, y, &layout, tol)
}

/// A random source `X` and function `X → Y`. Every atom of `X` has
/// dimension `Σ m_Y d_Y ≤ max_dim` for nonzero multiplicities.
pub fn function_into<R: Rng + ?Sized>(
    rng: &mut R,
    prefix: &str,
    y: &QuantumSet,
    max_atoms: usize,
    max_dim: usize,
    tol: &Tolerance,
) -> Option<Relation> {
    let dmin = *y.dims().iter().min()?;
    if dmin > max_dim {
        return None;
    }
    let count = rng.gen_range(1..=max_atoms.max(1));
    let mut dims = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.gen_range(dmin..=max_dim);
        // Fill greedily up to the target; at least one summand.
        let mut d = 0;
        loop {
            let fits: Vec<usize> = y.dims().into_iter().filter(|&k| d + k <= target).collect();
            if fits.is_empty() || (d > 0 && rng.gen_bool(0.3)) {
                break;
            }
            d += *fits.choose(rng).expect("nonempty");
        }
        dims.push(d.max(dmin));
    }
    let atoms = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| Atom::new(format!("{prefix}{i}"), d))
        .collect();
    let x = QuantumSet::new(atoms).expect("distinct labels");
    function(rng, &x, y, tol)
}

/// A random predicate: each atom gets a subspace of random dimension.
pub fn predicate<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet, tol: &Tolerance) -> Predicate {
    let vectors = x
        .atoms()
        .iter()
        .map(|a| {
            let k = rng.gen_range(0..=a.dim);
            let u = unitary(rng, a.dim);
            (a.label.clone(), (0..k).map(|j| u.col(j)).collect())
        })
        .collect();
    Predicate::from_vectors(x, vectors, tol).expect("shapes agree")
}

/// A random projection in `ℓ∞(X)`.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet, tol: &Tolerance) -> BlockOperator {
    predicate(rng, x, tol).to_projection()
}

/// A random self-adjoint element of `ℓ∞(X)`.
pub fn self_adjoint<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet) -> BlockOperator {
    BlockOperator::from_fn(x, |_, d| hermitian(rng, d))
}

/// A random element of `ℓ∞(X)`.
pub fn element<R: Rng + ?Sized>(rng: &mut R, x: &QuantumSet) -> BlockOperator {
    BlockOperator::from_fn(x, |_, d| gaussian(rng, d, d))
}
