use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::block::BlockOperator;
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, OperatorSubspace, Tolerance, C64};
use crate::qrel::Relation;
use crate::qset::QuantumSet;

/// Eigenvalue labels of a self-adjoint block operator together with the
/// function onto the classical set of those labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: BTreeMap<String, f64>,
    pub function: Relation,
}

impl Spectrum {
    /// `r(ℂ_α) = α` on the classical set of eigenvalues.
    pub fn observable(&self) -> BlockOperator {
        let values: BTreeMap<String, C64> = self
            .values
            .iter()
            .map(|(l, v)| (l.clone(), C64::new(*v, 0.0)))
            .collect();
        BlockOperator::diagonal(self.function.target(), &values).expect("labels match the target")
    }
}

fn spectral_label(i: usize) -> String {
    format!("ev{i:03}")
}

/// Splits a self-adjoint `a ∈ ℓ(X)` into eigenspaces. Eigenvalues closer than
/// `eq_tol` (single linkage) share a label; labels follow ascending value.
pub fn spectral_function(a: &BlockOperator, tol: &Tolerance) -> Result<Spectrum> {
    let residual = a.self_adjoint_residual();
    if residual >= tol.eq_tol {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let mut eig: Vec<(f64, String, CMatrix)> = Vec::new();
    for (label, m) in a.blocks() {
        let (vals, vecs) = eigh(m);
        for (k, v) in vals.iter().enumerate() {
            eig.push((*v, label.to_string(), vecs.col(k)));
        }
    }
    eig.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut cluster_of = Vec::with_capacity(eig.len());
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for (i, (v, _, _)) in eig.iter().enumerate() {
        if i == 0 || v - eig[i - 1].0 > tol.eq_tol {
            sums.push((0.0, 0));
        }
        let c = sums.len() - 1;
        sums[c].0 += v;
        sums[c].1 += 1;
        cluster_of.push(c);
    }
    let labels: Vec<String> = (0..sums.len()).map(spectral_label).collect();
    let values = labels
        .iter()
        .zip(&sums)
        .map(|(l, (s, n))| (l.clone(), s / *n as f64))
        .collect();
    let target = QuantumSet::classical(&labels)?;
    let mut rows: BTreeMap<(String, usize), Vec<CMatrix>> = BTreeMap::new();
    for ((_, atom, v), c) in eig.iter().zip(&cluster_of) {
        rows.entry((atom.clone(), *c)).or_default().push(v.adjoint());
    }
    let mut function = Relation::empty(a.carrier().clone(), target);
    for ((atom, c), vs) in rows {
        let d = a.carrier().dim_of(&atom)?;
        function.set_block(&atom, &labels[c], OperatorSubspace::span_in(d, 1, &vs, tol)?)?;
    }
    Ok(Spectrum { values, function })
}
