//! Quantum families of graph colorings: a verifier with two independent
//! routes and a see-saw search for projection-family certificates.

mod search;

pub use search::{search, SearchBudget, SearchOutcome};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, OperatorSubspace, Tolerance};
use crate::opalg::{star_map_unchecked, BlockOperator};
use crate::pred::{inverse_image, Predicate};
use crate::qfun::require_function;
use crate::qrel::Relation;
use crate::qset::{pair_label, split_pair, QuantumSet, UNIT_LABEL};

/// A simple undirected graph on labeled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    vertices: Vec<String>,
    edges: BTreeSet<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(repr: GraphRepr) -> Result<Self> {
        Graph::new(repr.vertices, repr.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            vertices: g.vertices,
            edges: g.edges.into_iter().collect(),
        }
    }
}

impl Graph {
    /// Edges are unordered; duplicates collapse, loops are rejected.
    pub fn new<S: Into<String>>(vertices: Vec<S>, edges: Vec<(S, S)>) -> Result<Self> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let set: BTreeSet<&String> = vertices.iter().collect();
        if set.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex".into()));
        }
        let mut es = BTreeSet::new();
        for (a, b) in edges {
            let (a, b): (String, String) = (a.into(), b.into());
            for v in [&a, &b] {
                if !set.contains(v) {
                    return Err(Error::InvalidGraph(format!("edge mentions unknown vertex `{v}`")));
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex `{a}`")));
            }
            es.insert(if a < b { (a, b) } else { (b, a) });
        }
        Ok(Graph { vertices, edges: es })
    }

    /// `K_n` on vertices `"0"`, …, `"n-1"`.
    pub fn complete(n: usize) -> Self {
        let vs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut es = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                es.push((vs[i].clone(), vs[j].clone()));
            }
        }
        Graph::new(vs, es).expect("well-formed")
    }

    /// `C_n` on vertices `"0"`, …, `"n-1"`.
    pub fn cycle(n: usize) -> Self {
        let vs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let es = (0..n).map(|i| (vs[i].clone(), vs[(i + 1) % n].clone())).collect();
        Graph::new(vs, es).expect("well-formed")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn neighbors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a str> {
        self.edges().filter_map(move |(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }
}

/// Projections `p_{gt}` on `ℂ^dim`, one per vertex and color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct ColoringFamily {
    dim: usize,
    colors: Vec<String>,
    projections: BTreeMap<(String, String), CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    dim: usize,
    colors: Vec<String>,
    projections: BTreeMap<String, CMatrix>,
}

impl TryFrom<FamilyRepr> for ColoringFamily {
    type Error = Error;
    fn try_from(repr: FamilyRepr) -> Result<Self> {
        let mut projections = BTreeMap::new();
        for (key, m) in repr.projections {
            // Keys are "g|t"; the color is matched against the declared list.
            let hits: Vec<&String> = repr
                .colors
                .iter()
                .filter(|t| key.len() > t.len() + 1 && key.ends_with(&format!("|{t}")))
                .collect();
            if hits.len() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "projection key `{key}` must have the form `vertex|color` with a declared color"
                )));
            }
            let t = hits[0];
            let g = &key[..key.len() - t.len() - 1];
            projections.insert((g.to_string(), t.clone()), m);
        }
        ColoringFamily::new(repr.dim, repr.colors, projections)
    }
}

impl From<ColoringFamily> for FamilyRepr {
    fn from(f: ColoringFamily) -> Self {
        FamilyRepr {
            dim: f.dim,
            colors: f.colors,
            projections: f
                .projections
                .into_iter()
                .map(|((g, t), m)| (format!("{g}|{t}"), m))
                .collect(),
        }
    }
}

/// Label of the single atom of the index set `ℋ`.
pub const INDEX_LABEL: &str = "h";

impl ColoringFamily {
    /// Checks shapes and completeness; projection and resolution properties
    /// are checked by [`ColoringFamily::validate`].
    pub fn new(dim: usize, colors: Vec<String>, projections: BTreeMap<(String, String), CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("family dimension must be positive".into()));
        }
        if colors.is_empty() {
            return Err(Error::InvalidArgument("at least one color is required".into()));
        }
        let cs: BTreeSet<&String> = colors.iter().collect();
        if cs.len() != colors.len() {
            return Err(Error::InvalidArgument("duplicate color".into()));
        }
        let vertices: BTreeSet<&String> = projections.keys().map(|(g, _)| g).collect();
        for ((g, t), m) in &projections {
            if !cs.contains(t) {
                return Err(Error::InvalidArgument(format!("unknown color `{t}`")));
            }
            if m.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{dim}x{dim} projection for ({g}, {t})"),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        for g in &vertices {
            for t in &colors {
                if !projections.contains_key(&((*g).clone(), t.clone())) {
                    return Err(Error::InvalidArgument(format!("missing projection for ({g}, {t})")));
                }
            }
        }
        Ok(ColoringFamily {
            dim,
            colors,
            projections,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn vertices(&self) -> BTreeSet<&str> {
        self.projections.keys().map(|(g, _)| g.as_str()).collect()
    }

    pub fn projection(&self, g: &str, t: &str) -> Option<&CMatrix> {
        self.projections.get(&(g.to_string(), t.to_string()))
    }

    /// Largest violation of the projection and resolution-of-identity
    /// conditions.
    pub fn invariant_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in self.projections.values() {
            worst = worst.max(m.projection_residual());
        }
        for g in self.vertices() {
            let mut sum = CMatrix::zeros(self.dim, self.dim);
            for t in &self.colors {
                sum = &sum + &self.projections[&(g.to_string(), t.clone())];
            }
            worst = worst.max(sum.dist(&CMatrix::identity(self.dim)));
        }
        worst
    }

    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        for ((g, t), m) in &self.projections {
            let r = m.projection_residual();
            if r >= tol.eq_tol {
                return Err(Error::InvalidFamily(format!("p[{g}|{t}] is not a projection (residual {r:.3e})")));
            }
        }
        for g in self.vertices() {
            let mut sum = CMatrix::zeros(self.dim, self.dim);
            for t in &self.colors {
                sum = &sum + &self.projections[&(g.to_string(), t.clone())];
            }
            let r = sum.dist(&CMatrix::identity(self.dim));
            if r >= tol.eq_tol {
                return Err(Error::InvalidFamily(format!(
                    "projections at vertex `{g}` do not sum to the identity (residual {r:.3e})"
                )));
            }
        }
        Ok(())
    }

    fn check_graph(&self, graph: &Graph) -> Result<()> {
        let ours = self.vertices();
        let theirs: BTreeSet<&str> = graph.vertices().iter().map(String::as_str).collect();
        if ours != theirs && !(graph.vertices().is_empty() && ours.is_empty()) {
            return Err(Error::InvalidFamily("family and graph have different vertex sets".into()));
        }
        Ok(())
    }

    /// Compresses the family to `J† p J` along an isometry `J` whose range is
    /// invariant under every projection.
    pub fn compress(&self, j: &CMatrix, tol: &Tolerance) -> Result<ColoringFamily> {
        if j.rows() != self.dim || (&j.adjoint() * j).dist(&CMatrix::identity(j.cols())) >= tol.eq_tol {
            return Err(Error::InvalidArgument("compression needs an isometry into the family space".into()));
        }
        let range = j * &j.adjoint();
        for m in self.projections.values() {
            if range.commutator(m).frob_norm() >= tol.eq_tol {
                return Err(Error::InvalidArgument("range of the isometry is not invariant".into()));
            }
        }
        let projections = self
            .projections
            .iter()
            .map(|(k, m)| (k.clone(), &(&j.adjoint() * m) * j))
            .collect();
        ColoringFamily::new(j.cols(), self.colors.clone(), projections)
    }

    /// Conjugates every projection by a unitary `u`.
    pub fn conjugate(&self, u: &CMatrix) -> ColoringFamily {
        ColoringFamily {
            dim: self.dim,
            colors: self.colors.clone(),
            projections: self
                .projections
                .iter()
                .map(|(k, m)| (k.clone(), &(u * m) * &u.adjoint()))
                .collect(),
        }
    }

    /// Replaces the measurement at one vertex.
    pub fn with_vertex(&self, g: &str, ps: &BTreeMap<String, CMatrix>) -> Result<ColoringFamily> {
        let mut projections = self.projections.clone();
        for (t, m) in ps {
            projections.insert((g.to_string(), t.clone()), m.clone());
        }
        ColoringFamily::new(self.dim, self.colors.clone(), projections)
    }
}

/// Verification outcome from both routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub pass: bool,
    /// `max ‖p_{g1 t} p_{g2 t}‖_F` over edges and colors.
    pub max_violation: f64,
    pub worst: Option<(String, String, String)>,
    /// Disjointness of the inverse-image predicates along `F_g`.
    pub predicate_route_pass: bool,
    pub predicate_route_overlap: f64,
}

/// Projection route only.
pub fn projection_violation(graph: &Graph, fam: &ColoringFamily) -> (f64, Option<(String, String, String)>) {
    let mut worst = 0.0;
    let mut at = None;
    for (a, b) in graph.edges() {
        for t in fam.colors() {
            let (Some(p), Some(q)) = (fam.projection(a, t), fam.projection(b, t)) else {
                continue;
            };
            let v = (p * q).frob_norm();
            if at.is_none() || v > worst {
                worst = v;
                at = Some((a.to_string(), b.to_string(), t.clone()));
            }
        }
    }
    (worst, at)
}

/// The classical sets `` `G ``, `ℋ` and `` `T `` of a coloring problem.
pub fn coloring_sets(graph: &Graph, fam: &ColoringFamily) -> Result<(QuantumSet, QuantumSet, QuantumSet)> {
    Ok((
        QuantumSet::classical(graph.vertices())?,
        QuantumSet::single(INDEX_LABEL, fam.dim())?,
        QuantumSet::classical(fam.colors())?,
    ))
}

/// `F: `G × ℋ → `T` with `F((g|h), ℂ_t) = {v : v p_{gt} = v}`.
pub fn to_function(graph: &Graph, fam: &ColoringFamily, tol: &Tolerance) -> Result<Relation> {
    fam.validate(tol)?;
    fam.check_graph(graph)?;
    let (g_set, h_set, t_set) = coloring_sets(graph, fam)?;
    let mut f = Relation::empty(g_set.product(&h_set), t_set);
    for g in graph.vertices() {
        for t in fam.colors() {
            let p = fam.projection(g, t).expect("validated");
            let rows: Vec<CMatrix> = (0..fam.dim()).map(|i| p.row(i)).collect();
            let v = OperatorSubspace::span_in(fam.dim(), 1, &rows, tol)?;
            f.set_block(&pair_label(g, INDEX_LABEL), t, v)?;
        }
    }
    Ok(f)
}

/// `p_{gt} = F⋆(δ_t)((g|h))` for a function `F: `G × ℋ → `T` whose source
/// atoms are labeled `(g|h)`.
pub fn from_function(f: &Relation, tol: &Tolerance) -> Result<ColoringFamily> {
    require_function(f, tol)?;
    if !f.target().is_classical() {
        return Err(Error::ShapeMismatch {
            expected: "classical set of colors as target".into(),
            found: "non-classical target".into(),
        });
    }
    let mut dim = None;
    for a in f.source().atoms() {
        if split_pair(&a.label).is_none() {
            return Err(Error::ShapeMismatch {
                expected: "source atoms labeled (vertex|index)".into(),
                found: a.label.clone(),
            });
        }
        if *dim.get_or_insert(a.dim) != a.dim {
            return Err(Error::ShapeMismatch {
                expected: "one index atom shared by all vertices".into(),
                found: format!("atoms of dimensions {} and {}", dim.unwrap_or(0), a.dim),
            });
        }
    }
    let colors: Vec<String> = f.target().labels().map(str::to_string).collect();
    let mut projections = BTreeMap::new();
    for t in &colors {
        let img = star_map_unchecked(f, &BlockOperator::indicator(f.target(), t)?);
        for (label, m) in img.blocks() {
            let (g, _) = split_pair(label).expect("checked above");
            projections.insert((g.to_string(), t.clone()), m.clone());
        }
    }
    ColoringFamily::new(dim.unwrap_or(1), colors, projections)
}

/// `F_g = F ∘ (cst_g × I_ℋ) ∘ λ†: ℋ → `T`.
pub fn vertex_function(f: &Relation, g_set: &QuantumSet, h_set: &QuantumSet, g: &str, tol: &Tolerance) -> Result<Relation> {
    let one = QuantumSet::unit();
    let cst = Relation::from_classical(&one, g_set, &[(UNIT_LABEL, g)])?;
    Relation::left_unitor(h_set)
        .dagger()
        .then(&cst.times(&Relation::identity(h_set)), tol)?
        .then(f, tol)
}

/// Largest overlap between `F_{g1}^⋆(`{t})` and `F_{g2}^⋆(`{t})` over edges.
pub fn predicate_route_overlap(graph: &Graph, fam: &ColoringFamily, tol: &Tolerance) -> Result<f64> {
    let f = to_function(graph, fam, tol)?;
    let (g_set, h_set, t_set) = coloring_sets(graph, fam)?;
    let mut cache: BTreeMap<(String, String), Predicate> = BTreeMap::new();
    let mut pred_at = |g: &str, t: &str| -> Result<Predicate> {
        let key = (g.to_string(), t.to_string());
        if let Some(p) = cache.get(&key) {
            return Ok(p.clone());
        }
        let fg = vertex_function(&f, &g_set, &h_set, g, tol)?;
        let single = Predicate::from_vectors(&t_set, [(t.to_string(), vec![CMatrix::identity(1)])].into(), tol)?;
        let p = inverse_image(&fg, &single, tol)?;
        cache.insert(key, p.clone());
        Ok(p)
    };
    let mut worst: f64 = 0.0;
    for (a, b) in graph.edges() {
        for t in fam.colors() {
            let pa = pred_at(a, t)?;
            let pb = pred_at(b, t)?;
            worst = worst.max(pa.overlap(&pb)?);
        }
    }
    Ok(worst)
}

pub fn verify(graph: &Graph, fam: &ColoringFamily, tol: &Tolerance) -> Result<ColoringReport> {
    fam.validate(tol)?;
    fam.check_graph(graph)?;
    let (max_violation, worst) = projection_violation(graph, fam);
    let overlap = predicate_route_overlap(graph, fam, tol)?;
    Ok(ColoringReport {
        pass: max_violation < tol.eq_tol,
        max_violation,
        worst,
        predicate_route_pass: overlap < tol.eq_tol,
        predicate_route_overlap: overlap,
    })
}

/// `K_d` with the family `p_{gt} = e_{(g+t) mod d}` on `ℂ^d`.
pub fn latin_square(d: usize) -> (Graph, ColoringFamily) {
    let graph = Graph::complete(d);
    let colors: Vec<String> = (0..d).map(|t| t.to_string()).collect();
    let mut projections = BTreeMap::new();
    for g in 0..d {
        for t in 0..d {
            let k = (g + t) % d;
            projections.insert((g.to_string(), t.to_string()), CMatrix::unit(d, d, k, k));
        }
    }
    let fam = ColoringFamily::new(d, colors, projections).expect("well-formed");
    (graph, fam)
}

/// A classical coloring as a family of `1 × 1` projections.
pub fn classical_family(coloring: &BTreeMap<String, String>, colors: &[String]) -> ColoringFamily {
    let mut projections = BTreeMap::new();
    for (g, c) in coloring {
        for t in colors {
            let v = if t == c { 1.0 } else { 0.0 };
            projections.insert((g.clone(), t.clone()), CMatrix::from_real_rows(&[&[v]]));
        }
    }
    ColoringFamily::new(1, colors.to_vec(), projections).expect("well-formed")
}
