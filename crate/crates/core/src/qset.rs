//! Quantum sets: finite collections of labeled atoms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One atom, a nonzero finite-dimensional Hilbert space `ℂ^dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub label: String,
    pub dim: usize,
    #[serde(default)]
    pub dual: bool,
}

impl Atom {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Atom {
            label: label.into(),
            dim,
            dual: false,
        }
    }
}

/// A finite quantum set. Atoms are kept sorted by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuantumSetRepr", into = "QuantumSetRepr")]
pub struct QuantumSet {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct QuantumSetRepr {
    atoms: Vec<Atom>,
}

impl TryFrom<QuantumSetRepr> for QuantumSet {
    type Error = Error;
    fn try_from(repr: QuantumSetRepr) -> Result<Self> {
        QuantumSet::new(repr.atoms)
    }
}

impl From<QuantumSet> for QuantumSetRepr {
    fn from(set: QuantumSet) -> Self {
        QuantumSetRepr { atoms: set.atoms }
    }
}

/// Label of the product atom `(a|b)`.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

/// Inverse of [`pair_label`], splitting at the top-level bar.
pub fn split_pair(label: &str) -> Option<(&str, &str)> {
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => return Some((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Label of the single atom of the monoidal unit.
pub const UNIT_LABEL: &str = "*";

impl QuantumSet {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort();
        for a in &atoms {
            if a.dim == 0 {
                return Err(Error::InvalidDimension {
                    label: a.label.clone(),
                    dim: 0,
                });
            }
        }
        for w in atoms.windows(2) {
            if w[0].label == w[1].label {
                return Err(Error::DuplicateLabel(w[0].label.clone()));
            }
        }
        Ok(QuantumSet { atoms })
    }

    pub fn empty() -> Self {
        QuantumSet { atoms: Vec::new() }
    }

    /// `` `S ``: one 1-dimensional atom per label.
    pub fn classical<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(labels.iter().map(|l| Atom::new(l.as_ref(), 1)).collect())
    }

    /// A quantum set with a single atom, such as `H_n`.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(vec![Atom::new(label, dim)])
    }

    /// The monoidal unit `𝟏`.
    pub fn unit() -> Self {
        QuantumSet {
            atoms: vec![Atom::new(UNIT_LABEL, 1)],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.label.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&Atom> {
        self.atoms
            .binary_search_by(|a| a.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.atoms[i])
    }

    pub fn atom(&self, label: &str) -> Result<&Atom> {
        self.get(label).ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.atom(label).map(|a| a.dim)
    }

    pub fn is_classical(&self) -> bool {
        self.atoms.iter().all(|a| a.dim == 1)
    }

    /// `Σ dim(X)²`, the dimension of `ℓ(X)`.
    pub fn total_sq_dim(&self) -> usize {
        self.atoms.iter().map(|a| a.dim * a.dim).sum()
    }

    /// `X × Y`: atoms `(x|y)` of dimension `dim x · dim y`.
    pub fn product(&self, other: &QuantumSet) -> QuantumSet {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom::new(pair_label(&a.label, &b.label), a.dim * b.dim));
            }
        }
        atoms.sort();
        QuantumSet { atoms }
    }

    /// Label of the left copy of `x` inside `X ⊎ Y`.
    pub fn left_label(x: &str) -> String {
        pair_label(x, "0")
    }

    /// Label of the right copy of `y` inside `X ⊎ Y`.
    pub fn right_label(y: &str) -> String {
        pair_label(y, "1")
    }

    /// `X ⊎ Y`, tagging atoms as `(x|0)` and `(y|1)`.
    pub fn disjoint_union(&self, other: &QuantumSet) -> QuantumSet {
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                label: Self::left_label(&a.label),
                ..a.clone()
            })
            .chain(other.atoms.iter().map(|a| Atom {
                label: Self::right_label(&a.label),
                ..a.clone()
            }))
            .collect();
        atoms.sort();
        QuantumSet { atoms }
    }

    /// `X*`: same atoms with the dual flag toggled.
    pub fn dual(&self) -> QuantumSet {
        QuantumSet {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    dual: !a.dual,
                    ..a.clone()
                })
                .collect(),
        }
    }

    /// Sub-collection of atoms with the given labels.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<QuantumSet> {
        let atoms = labels
            .iter()
            .map(|l| self.atom(l.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        QuantumSet::new(atoms)
    }

    /// True when every atom of `self` is an atom of `other`.
    pub fn is_subset_of(&self, other: &QuantumSet) -> bool {
        self.atoms.iter().all(|a| other.get(&a.label) == Some(a))
    }

    /// Union of two subsets of a common ambient set. Labels shared by both
    /// sides must denote the same atom.
    pub fn union(&self, other: &QuantumSet) -> Result<QuantumSet> {
        let mut map: BTreeMap<&str, &Atom> = BTreeMap::new();
        for a in self.atoms.iter().chain(other.atoms.iter()) {
            if let Some(prev) = map.insert(&a.label, a) {
                if prev != a {
                    return Err(Error::SetMismatch(format!(
                        "label `{}` names different atoms in the two sets",
                        a.label
                    )));
                }
            }
        }
        Ok(QuantumSet {
            atoms: map.into_values().cloned().collect(),
        })
    }

    /// A dimension-preserving bijection of labels, if one exists.
    pub fn isomorphic(&self, other: &QuantumSet) -> Option<BTreeMap<String, String>> {
        if self.len() != other.len() {
            return None;
        }
        let mut a: Vec<&Atom> = self.atoms.iter().collect();
        let mut b: Vec<&Atom> = other.atoms.iter().collect();
        a.sort_by_key(|x| (x.dim, &x.label));
        b.sort_by_key(|x| (x.dim, &x.label));
        let mut map = BTreeMap::new();
        for (x, y) in a.iter().zip(b.iter()) {
            if x.dim != y.dim {
                return None;
            }
            map.insert(x.label.clone(), y.label.clone());
        }
        Some(map)
    }

    /// Multiset of atom dimensions.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.atoms.iter().map(|a| a.dim).collect();
        d.sort_unstable();
        d
    }

    pub fn label_set(&self) -> BTreeSet<String> {
        self.atoms.iter().map(|a| a.label.clone()).collect()
    }
}
