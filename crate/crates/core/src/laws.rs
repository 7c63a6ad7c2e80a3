//! Randomized law suite over relations, functions, the star map and
//! predicates, with optional fault injection as a negative control.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Tolerance, C64};
use crate::opalg::{
    fission_from_function, function_from_fission, function_from_homomorphism, star_is_homomorphism,
    star_map_unchecked, Homomorphism,
};
use crate::pred::{
    function_to_projection, inverse_image, projection_to_function, projection_to_relation,
    relation_to_function, relation_to_projection, Predicate,
};
use crate::qfun::check_axioms;
use crate::qrel::Relation;
use crate::random;

/// Deliberate corruption of one primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fault {
    /// Replaces each basis element `v` of `R†` by `D v† D` with
    /// `D = diag(1, 2, …)`.
    Dagger,
}

impl std::str::FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dagger" => Ok(Fault::Dagger),
            other => Err(Error::InvalidArgument(format!("unknown fault `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_atoms: usize,
    pub max_dim: usize,
    pub fault: Option<Fault>,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            trials: 50,
            max_atoms: 3,
            max_dim: 3,
            fault: None,
        }
    }
}

impl LawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.max_atoms == 0 || self.max_dim == 0 {
            return Err(Error::InvalidArgument("max-atoms and max-dim must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawResult {
    pub law: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub law: String,
    pub trial: usize,
    pub seed: u64,
    pub residual: f64,
    pub inputs: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub pass: bool,
    pub trials: usize,
    pub laws: Vec<LawResult>,
    pub counterexample: Option<Counterexample>,
}

/// Trial `i` draws from stream `i` of the ChaCha generator seeded by `seed`,
/// so a counterexample replays from `(seed, trial)` alone.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct Ctx {
    tol: Tolerance,
    fault: Option<Fault>,
}

impl Ctx {
    fn dagger(&self, r: &Relation) -> Result<Relation> {
        match self.fault {
            None => Ok(r.dagger()),
            Some(Fault::Dagger) => {
                let d = |n: usize| CMatrix::diag(&(1..=n).map(|k| C64::new(k as f64, 0.0)).collect::<Vec<_>>());
                r.dagger().map_blocks(&self.tol, |_, _, m| &(&d(m.rows()) * m) * &d(m.cols()))
            }
        }
    }
}

type Inputs = Vec<(&'static str, serde_json::Value)>;

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

/// One trial: a list of `(law, residual, inputs)`.
fn run_trial(cfg: &LawConfig, ctx: &Ctx, trial: usize) -> Result<Vec<(&'static str, f64, Inputs)>> {
    let tol = &ctx.tol;
    let mut rng = trial_rng(cfg.seed, trial);
    let (a, d) = (cfg.max_atoms, cfg.max_dim);
    let x = random::quantum_set(&mut rng, "x", a, d);
    let y = random::quantum_set(&mut rng, "y", a, d);
    let z = random::quantum_set(&mut rng, "z", a, d);
    let w = random::quantum_set(&mut rng, "w", a, d);
    let r = random::relation(&mut rng, &x, &y, tol);
    let s = random::relation(&mut rng, &y, &z, tol);
    let t = random::relation(&mut rng, &z, &w, tol);
    let r2 = random::relation(&mut rng, &x, &y, tol);
    let rs = || vec![("r", json(&r)), ("s", json(&s))];
    let rst = || vec![("r", json(&r)), ("s", json(&s)), ("t", json(&t))];
    let mut out = Vec::new();

    // Category and dagger laws.
    let sr = Relation::compose(&s, &r, tol)?;
    let lhs = Relation::compose(&t, &sr, tol)?;
    let rhs = Relation::compose(&Relation::compose(&t, &s, tol)?, &r, tol)?;
    out.push(("associativity", lhs.distance(&rhs)?, rst()));
    let e1 = Relation::compose(&Relation::identity(&y), &r, tol)?.distance(&r)?;
    let e2 = Relation::compose(&r, &Relation::identity(&x), tol)?.distance(&r)?;
    out.push(("identity", e1.max(e2), vec![("r", json(&r))]));
    let lhs = ctx.dagger(&sr)?;
    let rhs = Relation::compose(&ctx.dagger(&r)?, &ctx.dagger(&s)?, tol)?;
    out.push(("dagger_contravariant", lhs.distance(&rhs)?, rs()));
    out.push(("dagger_involutive", ctx.dagger(&ctx.dagger(&r)?)?.distance(&r)?, vec![("r", json(&r))]));
    let lhs = Relation::compose(&t, &r2.join(&r, tol)?.then(&s, tol)?, tol)?;
    let rhs = Relation::compose(&t, &sr, tol)?.join(&Relation::compose(&t, &Relation::compose(&s, &r2, tol)?, tol)?, tol)?;
    out.push(("composition_preserves_join", lhs.distance(&rhs)?, rst()));

    // Monoidal structure.
    let lhs = Relation::compose(&s.times(&t), &r.times(&s), tol)?;
    let rhs = sr.times(&Relation::compose(&t, &s, tol)?);
    out.push(("interchange", lhs.distance(&rhs)?, rst()));
    let one_x = Relation::identity(&x);
    let snake = Relation::left_unitor(&x)
        .dagger()
        .then(&Relation::unit(&x).times(&one_x), tol)?
        .then(&Relation::associator(&x, &x.dual(), &x), tol)?
        .then(&one_x.times(&Relation::counit(&x)), tol)?
        .then(&Relation::right_unitor(&x), tol)?;
    out.push(("snake", snake.distance(&one_x)?, vec![("x", json(&x))]));
    let lhs = ctx.dagger(&Relation::counit(&x))?;
    let rhs = Relation::unit(&x).then(&Relation::braiding(&x, &x.dual()), tol)?;
    out.push(("counit_dagger_is_braided_unit", lhs.distance(&rhs)?, vec![("x", json(&x))]));

    // Functions and the star map.
    let g = random::function_into(&mut rng, "v", &z, a, d, tol).expect("z has an atom of dimension ≤ max_dim");
    let f = random::function_into(&mut rng, "u", g.source(), a, d * d, tol).expect("feasible");
    let fg = || vec![("f", json(&f)), ("g", json(&g))];
    let gf = Relation::compose(&g, &f, tol)?;
    let wit = check_axioms(&gf, tol);
    out.push(("functions_compose", wit.residuals.coinjective.max(wit.residuals.cosurjective), fg()));
    out.push(("star_is_homomorphism", star_is_homomorphism(&f).max, vec![("f", json(&f))]));
    let b = random::element(&mut rng, &z);
    let lhs = star_map_unchecked(&gf, &b);
    let rhs = star_map_unchecked(&f, &star_map_unchecked(&g, &b));
    out.push(("star_contravariant", lhs.dist(&rhs), fg()));
    let p = random::partial_function(&mut rng, &x, &y, tol);
    let back = function_from_fission(&fission_from_function(&p, tol)?, tol)?;
    out.push(("fission_roundtrip", back.distance(&p)?, vec![("p", json(&p))]));
    let back = function_from_homomorphism(&Homomorphism::from_function(&p, tol)?, tol)?;
    out.push(("homomorphism_roundtrip", back.distance(&p)?, vec![("p", json(&p))]));

    // Predicates.
    let pa = random::predicate(&mut rng, &x, tol);
    let pb = random::predicate(&mut rng, &x, tol);
    let pin = || vec![("p", json(&pa))];
    let proj = pa.to_projection();
    let e1 = Predicate::from_relation(&pa.to_relation(tol)?, tol)?.distance(&pa)?;
    let e2 = Predicate::from_function(&pa.to_function(tol)?, tol)?.distance(&pa)?;
    let e3 = relation_to_projection(&projection_to_relation(&proj, tol)?)?.dist(&proj);
    let e4 = function_to_projection(&projection_to_function(&proj, tol)?, tol)?.dist(&proj);
    let e5 = relation_to_function(&pa.to_relation(tol)?, tol)?.distance(&pa.to_function(tol)?)?;
    out.push(("predicate_dictionary", e1.max(e2).max(e3).max(e4).max(e5), pin()));
    let qa = random::predicate(&mut rng, &y, tol);
    let qb = random::predicate(&mut rng, &y, tol);
    let h = random::function(&mut rng, &x, &y, tol);
    if let Some(h) = h {
        let inv = |q: &Predicate| inverse_image(&h, q, tol);
        let m = inv(&qa.meet(&qb, tol)?)?.distance(&inv(&qa)?.meet(&inv(&qb)?, tol)?)?;
        let j = inv(&qa.join(&qb, tol)?)?.distance(&inv(&qa)?.join(&inv(&qb)?, tol)?)?;
        let n = inv(&qa.neg(tol))?.distance(&inv(&qa)?.neg(tol))?;
        out.push((
            "inverse_image_ortholattice",
            m.max(j).max(n),
            vec![("f", json(&h)), ("p", json(&qa)), ("q", json(&qb))],
        ));
    }
    // Orthomodularity: P ≤ Q implies Q = P ∨ (Q ∧ ¬P); Q is enlarged to P ∨ Q.
    let q = pa.join(&pb, tol)?;
    let om = q.distance(&pa.join(&q.meet(&pa.neg(tol), tol)?, tol)?)?;
    out.push(("orthomodularity", om, vec![("p", json(&pa)), ("q", json(&pb))]));
    Ok(out)
}

/// Runs the suite trial by trial; the report lists laws in a fixed order and
/// the counterexample is the first failing `(trial, law)`.
pub fn run_laws(cfg: &LawConfig, tol: &Tolerance) -> Result<LawReport> {
    cfg.validate()?;
    tol.validate()?;
    let ctx = Ctx {
        tol: *tol,
        fault: cfg.fault,
    };
    let mut order: Vec<&'static str> = Vec::new();
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut counterexample = None;
    for trial in 0..cfg.trials {
        for (law, res, inputs) in run_trial(cfg, &ctx, trial)? {
            if !worst.contains_key(law) {
                order.push(law);
            }
            let e = worst.entry(law).or_insert(0.0);
            *e = e.max(res);
            if counterexample.is_none() && (res.is_nan() || res >= tol.eq_tol) {
                counterexample = Some(Counterexample {
                    law: law.to_string(),
                    trial,
                    seed: cfg.seed,
                    residual: res,
                    inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                });
            }
        }
    }
    let laws: Vec<LawResult> = order
        .iter()
        .map(|l| LawResult {
            law: l.to_string(),
            max_residual: worst[l],
            pass: worst[l] < tol.eq_tol,
        })
        .collect();
    Ok(LawReport {
        pass: laws.iter().all(|l| l.pass),
        trials: cfg.trials,
        laws,
        counterexample,
    })
}
