use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::qset::{pair_label, QuantumSet};

/// An element of `ℓ(X)`: one square matrix per atom of the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockRepr", into = "BlockRepr")]
pub struct BlockOperator {
    carrier: QuantumSet,
    blocks: BTreeMap<String, CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    carrier: QuantumSet,
    blocks: BTreeMap<String, CMatrix>,
}

impl TryFrom<BlockRepr> for BlockOperator {
    type Error = Error;
    fn try_from(repr: BlockRepr) -> Result<Self> {
        BlockOperator::from_blocks(repr.carrier, repr.blocks)
    }
}

impl From<BlockOperator> for BlockRepr {
    fn from(b: BlockOperator) -> Self {
        BlockRepr {
            carrier: b.carrier,
            blocks: b.blocks,
        }
    }
}

/// A matrix unit `e_ij` on one atom, as a generator of `ℓ(X)`.
#[derive(Debug, Clone)]
pub struct Generator {
    pub atom: String,
    pub row: usize,
    pub col: usize,
    pub op: BlockOperator,
}

/// All matrix units of `ℓ(X)`, atom by atom, row-major within an atom.
pub fn generators(carrier: &QuantumSet) -> impl Iterator<Item = Generator> + '_ {
    carrier.atoms().iter().flat_map(move |a| {
        (0..a.dim).flat_map(move |i| {
            (0..a.dim).map(move |j| Generator {
                atom: a.label.clone(),
                row: i,
                col: j,
                op: BlockOperator::matrix_unit(carrier, &a.label, i, j).expect("atom exists"),
            })
        })
    })
}

impl BlockOperator {
    /// Checks that there is exactly one block of the right size per atom.
    pub fn from_blocks(carrier: QuantumSet, blocks: BTreeMap<String, CMatrix>) -> Result<Self> {
        for label in blocks.keys() {
            carrier.atom(label)?;
        }
        for a in carrier.atoms() {
            let m = blocks
                .get(&a.label)
                .ok_or_else(|| Error::InvalidArgument(format!("missing block for atom `{}`", a.label)))?;
            if m.shape() != (a.dim, a.dim) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{0}x{0} block for atom `{1}`", a.dim, a.label),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        Ok(BlockOperator { carrier, blocks })
    }

    pub fn from_fn(carrier: &QuantumSet, mut f: impl FnMut(&str, usize) -> CMatrix) -> Self {
        let blocks = carrier
            .atoms()
            .iter()
            .map(|a| (a.label.clone(), f(&a.label, a.dim)))
            .collect();
        BlockOperator {
            carrier: carrier.clone(),
            blocks,
        }
    }

    pub fn zeros(carrier: &QuantumSet) -> Self {
        Self::from_fn(carrier, |_, d| CMatrix::zeros(d, d))
    }

    pub fn identity(carrier: &QuantumSet) -> Self {
        Self::from_fn(carrier, |_, d| CMatrix::identity(d))
    }

    /// The central projection `δ_x`: identity on atom `x`, zero elsewhere.
    pub fn indicator(carrier: &QuantumSet, label: &str) -> Result<Self> {
        carrier.atom(label)?;
        Ok(Self::from_fn(carrier, |l, d| {
            if l == label {
                CMatrix::identity(d)
            } else {
                CMatrix::zeros(d, d)
            }
        }))
    }

    pub fn matrix_unit(carrier: &QuantumSet, label: &str, i: usize, j: usize) -> Result<Self> {
        let d = carrier.dim_of(label)?;
        if i >= d || j >= d {
            return Err(Error::InvalidArgument(format!(
                "matrix unit ({i}, {j}) out of range for atom `{label}` of dimension {d}"
            )));
        }
        Ok(Self::from_fn(carrier, |l, n| {
            if l == label {
                CMatrix::unit(n, n, i, j)
            } else {
                CMatrix::zeros(n, n)
            }
        }))
    }

    /// Scalar function on a classical carrier: `r(ℂ_s) = values[s]`.
    pub fn diagonal(carrier: &QuantumSet, values: &BTreeMap<String, C64>) -> Result<Self> {
        Self::from_blocks(
            carrier.clone(),
            carrier
                .atoms()
                .iter()
                .map(|a| {
                    let v = values.get(&a.label).copied().unwrap_or_default();
                    (a.label.clone(), CMatrix::identity(a.dim).scale(v))
                })
                .collect(),
        )
    }

    pub fn carrier(&self) -> &QuantumSet {
        &self.carrier
    }

    pub fn block(&self, label: &str) -> Result<&CMatrix> {
        self.blocks
            .get(label)
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&str, &CMatrix)> {
        self.blocks.iter().map(|(l, m)| (l.as_str(), m))
    }

    fn zip(&self, other: &BlockOperator, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> BlockOperator {
        assert_eq!(self.carrier, other.carrier, "block operators on different carriers");
        BlockOperator {
            carrier: self.carrier.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|(l, m)| (l.clone(), f(m, &other.blocks[l])))
                .collect(),
        }
    }

    fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> BlockOperator {
        BlockOperator {
            carrier: self.carrier.clone(),
            blocks: self.blocks.iter().map(|(l, m)| (l.clone(), f(m))).collect(),
        }
    }

    /// Panics if the carriers differ.
    pub fn mul(&self, other: &BlockOperator) -> BlockOperator {
        self.zip(other, |a, b| a * b)
    }

    pub fn add(&self, other: &BlockOperator) -> BlockOperator {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BlockOperator) -> BlockOperator {
        self.zip(other, |a, b| a - b)
    }

    pub fn commutator(&self, other: &BlockOperator) -> BlockOperator {
        self.zip(other, |a, b| a.commutator(b))
    }

    pub fn scale(&self, c: C64) -> BlockOperator {
        self.map(|m| m.scale(c))
    }

    pub fn adjoint(&self) -> BlockOperator {
        self.map(CMatrix::adjoint)
    }

    /// `√(Σ_X ‖b(X)‖²_F)`.
    pub fn norm(&self) -> f64 {
        self.blocks
            .values()
            .map(|m| m.frob_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist(&self, other: &BlockOperator) -> f64 {
        self.sub(other).norm()
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    /// `b1 ⊗ b2` on `X1 × X2`.
    pub fn tensor(&self, other: &BlockOperator) -> BlockOperator {
        let carrier = self.carrier.product(&other.carrier);
        let mut blocks = BTreeMap::new();
        for (l1, m1) in &self.blocks {
            for (l2, m2) in &other.blocks {
                blocks.insert(pair_label(l1, l2), m1.kron(m2));
            }
        }
        BlockOperator { carrier, blocks }
    }

    /// Concatenated column-major vectorization, for rank computations.
    pub(crate) fn vectorize(&self) -> Vec<C64> {
        self.blocks
            .values()
            .flat_map(|m| m.inner().as_slice().to_vec())
            .collect()
    }
}
