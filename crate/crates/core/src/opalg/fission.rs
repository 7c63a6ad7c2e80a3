use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::block::BlockOperator;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, OperatorSubspace, Tolerance};
use crate::qfun::require_partial_function;
use crate::qrel::Relation;
use crate::qset::{pair_label, QuantumSet};

/// One coisometry `f_X^Y: X → Y ⊗ ℂ^h`, stored as a `(dim Y·h) × dim X`
/// matrix with row index `y·h + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FissionEntry {
    pub h: usize,
    pub matrix: CMatrix,
}

/// A family of coisometries `f_X^Y`, one per pair of atoms with `h > 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FissionRepr", into = "FissionRepr")]
pub struct Fission {
    source: QuantumSet,
    target: QuantumSet,
    entries: BTreeMap<(String, String), FissionEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    from: String,
    to: String,
    h: usize,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct FissionRepr {
    source: QuantumSet,
    target: QuantumSet,
    entries: Vec<EntryRepr>,
}

impl TryFrom<FissionRepr> for Fission {
    type Error = Error;
    fn try_from(repr: FissionRepr) -> Result<Self> {
        let mut f = Fission::empty(repr.source, repr.target);
        for e in repr.entries {
            if f.entries.contains_key(&(e.from.clone(), e.to.clone())) {
                return Err(Error::DuplicateLabel(format!("entry ({}, {})", e.from, e.to)));
            }
            f.insert(&e.from, &e.to, e.h, e.matrix)?;
        }
        Ok(f)
    }
}

impl From<Fission> for FissionRepr {
    fn from(f: Fission) -> Self {
        FissionRepr {
            source: f.source,
            target: f.target,
            entries: f
                .entries
                .into_iter()
                .map(|((from, to), e)| EntryRepr {
                    from,
                    to,
                    h: e.h,
                    matrix: e.matrix,
                })
                .collect(),
        }
    }
}

impl Fission {
    pub fn empty(source: QuantumSet, target: QuantumSet) -> Self {
        Fission {
            source,
            target,
            entries: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &QuantumSet {
        &self.source
    }

    pub fn target(&self) -> &QuantumSet {
        &self.target
    }

    pub fn entry(&self, x: &str, y: &str) -> Option<&FissionEntry> {
        self.entries.get(&(x.to_string(), y.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &FissionEntry)> {
        self.entries
            .iter()
            .map(|((x, y), e)| (x.as_str(), y.as_str(), e))
    }

    /// Adds `f_X^Y`, checking its shape; `h = 0` entries are dropped.
    pub fn insert(&mut self, x: &str, y: &str, h: usize, matrix: CMatrix) -> Result<()> {
        let dx = self.source.dim_of(x)?;
        let dy = self.target.dim_of(y)?;
        if h == 0 {
            return Ok(());
        }
        if matrix.shape() != (dy * h, dx) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{dx} coisometry for ({x}, {y})", dy * h),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        self.entries
            .insert((x.to_string(), y.to_string()), FissionEntry { h, matrix });
        Ok(())
    }

    /// Largest violation of `f f† = 1` and of `f_1 f_2† = 0` for distinct
    /// targets over a common source.
    pub fn invariant_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (_, _, e) in self.entries() {
            let ff = &e.matrix * &e.matrix.adjoint();
            worst = worst.max(ff.dist(&CMatrix::identity(ff.rows())));
        }
        for x in self.source.labels() {
            let out: Vec<(&str, &FissionEntry)> = self
                .entries()
                .filter(|(a, _, _)| *a == x)
                .map(|(_, y, e)| (y, e))
                .collect();
            for (i, (_, e1)) in out.iter().enumerate() {
                for (_, e2) in out.iter().skip(i + 1) {
                    worst = worst.max((&e1.matrix * &e2.matrix.adjoint()).frob_norm());
                }
            }
        }
        worst
    }

    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        let r = self.invariant_residual();
        if r < tol.eq_tol {
            Ok(())
        } else {
            Err(Error::InvalidFission(format!("coisometry or orthogonality residual {r:.3e}")))
        }
    }

    /// `φ(b)(X) = Σ_Y f†(b(Y) ⊗ 1) f`.
    pub fn star(&self, b: &BlockOperator) -> BlockOperator {
        BlockOperator::from_fn(&self.source, |x, dx| {
            let mut acc = CMatrix::zeros(dx, dx);
            for (a, y, e) in self.entries() {
                if a != x {
                    continue;
                }
                let by = b.block(y).expect("operator lives on the fission's target");
                let lifted = by.kron(&CMatrix::identity(e.h));
                acc = &acc + &(&(&e.matrix.adjoint() * &lifted) * &e.matrix);
            }
            acc
        })
    }

    /// `‖Σ_Y f†f − 1‖`, zero exactly for fissions of total functions.
    pub fn unitality_residual(&self) -> f64 {
        self.star(&BlockOperator::identity(&self.target))
            .dist(&BlockOperator::identity(&self.source))
    }
}

/// Builds `f_X^Y(x) = Σ_v v(x) ⊗ v†` from an orthonormal basis of `F(X, Y)`
/// for the inner product `(v|v') 1_Y = v' v†`.
pub fn fission_from_function(f: &Relation, tol: &Tolerance) -> Result<Fission> {
    require_partial_function(f, tol)?;
    let mut out = Fission::empty(f.source().clone(), f.target().clone());
    for (x, y, v) in f.blocks() {
        let dy = v.cod();
        let h = v.dim();
        let scale = (dy as f64).sqrt();
        let mut m = CMatrix::zeros(dy * h, v.dom());
        for (k, w) in v.basis().iter().enumerate() {
            let wh = w.scale_real(scale);
            for r in 0..dy {
                for c in 0..v.dom() {
                    m.set(r * h + k, c, wh.get(r, c));
                }
            }
        }
        out.insert(x, y, h, m)?;
    }
    Ok(out)
}

/// Recovers `F(X, Y) = span{(1 ⊗ e_k†) f_X^Y}`.
pub fn function_from_fission(fis: &Fission, tol: &Tolerance) -> Result<Relation> {
    fis.validate(tol)?;
    let mut out = Relation::empty(fis.source.clone(), fis.target.clone());
    for (x, y, e) in fis.entries() {
        let dx = e.matrix.cols();
        let dy = e.matrix.rows() / e.h;
        let slices: Vec<CMatrix> = (0..e.h)
            .map(|k| CMatrix::from_fn(dy, dx, |r, c| e.matrix.get(r * e.h + k, c)))
            .collect();
        out.set_block(x, y, OperatorSubspace::span_in(dx, dy, &slices, tol)?)?;
    }
    Ok(out)
}

/// `(g ∘ f)_X^Z = Σ_Y (g_Y^Z ⊗ 1) f_X^Y` into `Z ⊗ (⊕_Y K_Y^Z ⊗ H_X^Y)`.
pub fn fission_compose(g: &Fission, f: &Fission) -> Result<Fission> {
    if f.target != g.source {
        return Err(Error::SetMismatch("fissions do not share the middle set".into()));
    }
    let mut out = Fission::empty(f.source.clone(), g.target.clone());
    for xa in f.source.atoms() {
        for za in g.target.atoms() {
            let mut parts: Vec<(&FissionEntry, &FissionEntry)> = Vec::new();
            for ya in f.target.atoms() {
                if let (Some(fe), Some(ge)) = (f.entry(&xa.label, &ya.label), g.entry(&ya.label, &za.label)) {
                    parts.push((fe, ge));
                }
            }
            let l: usize = parts.iter().map(|(fe, ge)| ge.h * fe.h).sum();
            if l == 0 {
                continue;
            }
            let dz = za.dim;
            let mut m = CMatrix::zeros(dz * l, xa.dim);
            let mut offset = 0;
            for (fe, ge) in parts {
                let (h, k) = (fe.h, ge.h);
                let lifted = ge.matrix.kron(&CMatrix::identity(h));
                let piece = &lifted * &fe.matrix;
                for z in 0..dz {
                    for kk in 0..k {
                        for hh in 0..h {
                            let src = (z * k + kk) * h + hh;
                            let dst = z * l + offset + kk * h + hh;
                            for c in 0..xa.dim {
                                m.set(dst, c, piece.get(src, c));
                            }
                        }
                    }
                }
                offset += k * h;
            }
            out.insert(&xa.label, &za.label, l, m)?;
        }
    }
    Ok(out)
}

/// `(1 ⊗ σ ⊗ 1)(f_1 ⊗ f_2)`, moving `H_1` past `Y_2`.
pub fn fission_tensor(f1: &Fission, f2: &Fission) -> Fission {
    let mut out = Fission::empty(f1.source.product(&f2.source), f1.target.product(&f2.target));
    for (x1, y1, e1) in f1.entries() {
        for (x2, y2, e2) in f2.entries() {
            let k = e1.matrix.kron(&e2.matrix);
            let (h1, h2) = (e1.h, e2.h);
            let d1 = e1.matrix.rows() / h1;
            let d2 = e2.matrix.rows() / h2;
            let mut m = CMatrix::zeros(k.rows(), k.cols());
            for a1 in 0..d1 {
                for b1 in 0..h1 {
                    for a2 in 0..d2 {
                        for b2 in 0..h2 {
                            let src = ((a1 * h1 + b1) * d2 + a2) * h2 + b2;
                            let dst = ((a1 * d2 + a2) * h1 + b1) * h2 + b2;
                            for c in 0..k.cols() {
                                m.set(dst, c, k.get(src, c));
                            }
                        }
                    }
                }
            }
            out.insert(&pair_label(x1, x2), &pair_label(y1, y2), h1 * h2, m)
                .expect("product atoms exist");
        }
    }
    out
}
