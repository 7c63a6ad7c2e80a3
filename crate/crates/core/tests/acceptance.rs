//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsets::coloring::{self, classical_family, latin_square, search, ColoringFamily, Graph, SearchBudget};
use qsets::linalg::{eigh, C64};
use qsets::opalg::{
    fission_compose, fission_from_function, fission_tensor, function_from_homomorphism, generators,
    star_map_unchecked, star_injective, star_surjective, unitality_residual, Homomorphism,
};
use qsets::pred::{
    bool_set, corange, corange_factor, function_to_projection, function_to_relation, projection_to_function,
    projection_to_relation, relation_to_function, relation_to_projection, inverse_image, Predicate,
};
use qsets::qfun::{check_axioms, coinjectivity_residual, cosurjectivity_residual, is_function, terminal};
use qsets::qset::Atom;
use qsets::random;
use qsets::{CMatrix, OperatorSubspace, QuantumSet, Relation, Tolerance};

type Outcome = Result<String, String>;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

/// Fails with a message when `cond` is false.
fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

// ---------------------------------------------------------------------------
// 1. Dagger-compact laws.

fn snake_residuals(x: &QuantumSet) -> Result<f64, String> {
    let t = tol();
    let one = Relation::identity(x);
    let first = Relation::left_unitor(x)
        .dagger()
        .then(&Relation::unit(x).times(&one), &t)
        .and_then(|r| r.then(&Relation::associator(x, &x.dual(), x), &t))
        .and_then(|r| r.then(&one.times(&Relation::counit(x)), &t))
        .and_then(|r| r.then(&Relation::right_unitor(x), &t))
        .map_err(e)?;
    // Second snake on X*: (ε_X × I) ∘ α⁻¹ ∘ (I × η_X) through X* × X × X*.
    let xd = x.dual();
    let one_d = Relation::identity(&xd);
    let second = Relation::right_unitor(&xd)
        .dagger()
        .then(&one_d.times(&Relation::unit(x)), &t)
        .and_then(|r| r.then(&Relation::associator(&xd, x, &xd).dagger(), &t))
        .and_then(|r| r.then(&relabel_counit(x).times(&one_d), &t))
        .and_then(|r| r.then(&Relation::left_unitor(&xd), &t))
        .map_err(e)?;
    Ok(first.distance(&one).map_err(e)?.max(second.distance(&one_d).map_err(e)?))
}

/// `ε_X ∘ σ: X* × X → 𝟏`.
fn relabel_counit(x: &QuantumSet) -> Relation {
    Relation::braiding(&x.dual(), x)
        .then(&Relation::counit(x), &tol())
        .expect("composable")
}

fn criterion_1() -> Outcome {
    let t = tol();
    let mut rng = rng(1);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut bump = |k: &'static str, v: f64| {
        let w = worst.entry(k).or_insert(0.0);
        *w = w.max(v);
    };
    let trials = 200;
    for _ in 0..trials {
        let x = random::quantum_set(&mut rng, "x", 3, 3);
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let z = random::quantum_set(&mut rng, "z", 3, 3);
        let w = random::quantum_set(&mut rng, "w", 3, 3);
        let r = random::relation(&mut rng, &x, &y, &t);
        let s = random::relation(&mut rng, &y, &z, &t);
        let u = random::relation(&mut rng, &z, &w, &t);
        let sr = Relation::compose(&s, &r, &t).map_err(e)?;
        let us = Relation::compose(&u, &s, &t).map_err(e)?;
        let a1 = Relation::compose(&u, &sr, &t).map_err(e)?;
        let a2 = Relation::compose(&us, &r, &t).map_err(e)?;
        bump("associativity", a1.distance(&a2).map_err(e)?);
        let i1 = Relation::compose(&Relation::identity(&y), &r, &t).map_err(e)?.distance(&r).map_err(e)?;
        let i2 = Relation::compose(&r, &Relation::identity(&x), &t).map_err(e)?.distance(&r).map_err(e)?;
        bump("identity", i1.max(i2));
        let d = sr.dagger().distance(&Relation::compose(&r.dagger(), &s.dagger(), &t).map_err(e)?).map_err(e)?;
        bump("dagger", d.max(r.dagger().dagger().distance(&r).map_err(e)?));
        let lhs = Relation::compose(&s.times(&u), &r.times(&s), &t).map_err(e)?;
        let rhs = sr.times(&us);
        bump("interchange", lhs.distance(&rhs).map_err(e)?);
        let mut snake = snake_residuals(&x)?;
        for a in x.atoms() {
            snake = snake.max(snake_residuals(&x.subset(&[a.label.as_str()]).map_err(e)?)?);
        }
        bump("snake", snake);
    }
    let max = worst.values().cloned().fold(0.0, f64::max);
    let detail = worst.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect::<Vec<_>>().join(", ");
    ensure(max < 1e-8, || format!("residual {max:.2e} ≥ 1e-8 ({detail})"))?;
    Ok(format!("{trials} triples; {detail}"))
}

// ---------------------------------------------------------------------------
// 2. Classical embedding.

type Pairs = BTreeSet<(String, String)>;

fn oracle_compose(r: &Pairs, s: &Pairs) -> Pairs {
    let mut out = BTreeSet::new();
    for (a, b) in r {
        for (c, d) in s {
            if b == c {
                out.insert((a.clone(), d.clone()));
            }
        }
    }
    out
}

fn oracle_product(r: &Pairs, s: &Pairs) -> Pairs {
    let mut out = BTreeSet::new();
    for (a, b) in r {
        for (c, d) in s {
            out.insert((format!("({a}|{c})"), format!("({b}|{d})")));
        }
    }
    out
}

fn random_pairs(rng: &mut ChaCha8Rng, a: &[String], b: &[String]) -> Pairs {
    let p: f64 = rng.gen();
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            if rng.gen_bool(p) {
                out.insert((x.clone(), y.clone()));
            }
        }
    }
    out
}

fn classical_residual(r: &Relation, pairs: &Pairs) -> Result<f64, String> {
    let list: Vec<(String, String)> = pairs.iter().cloned().collect();
    let expect = Relation::from_classical(r.source(), r.target(), &list).map_err(e)?;
    let d = r.distance(&expect).map_err(e)?;
    let same = r.to_classical().as_ref() == Some(pairs);
    Ok(if same { d } else { f64::INFINITY })
}

fn criterion_2() -> Outcome {
    let t = tol();
    let mut rng = rng(2);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let trials = 500;
    let names = |p: &str, n: usize| -> Vec<String> { (0..n).map(|i| format!("{p}{i}")).collect() };
    for _ in 0..trials {
        let (na, nb, nc) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (a, b, c) = (names("a", na), names("b", nb), names("c", nc));
        let (sa, sb, sc) = (
            QuantumSet::classical(&a).map_err(e)?,
            QuantumSet::classical(&b).map_err(e)?,
            QuantumSet::classical(&c).map_err(e)?,
        );
        let r = random_pairs(&mut rng, &a, &b);
        let s = random_pairs(&mut rng, &b, &c);
        let qr = Relation::from_classical(&sa, &sb, &r.iter().cloned().collect::<Vec<_>>()).map_err(e)?;
        let qs = Relation::from_classical(&sb, &sc, &s.iter().cloned().collect::<Vec<_>>()).map_err(e)?;
        let comp = Relation::compose(&qs, &qr, &t).map_err(e)?;
        worst = worst.max(classical_residual(&comp, &oracle_compose(&r, &s))?);
        let dag: Pairs = r.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        worst = worst.max(classical_residual(&qr.dagger(), &dag)?);
        worst = worst.max(classical_residual(&qr.times(&qs), &oracle_product(&r, &s))?);
    }
    let el = start.elapsed();
    ensure(worst < 1e-10, || format!("residual {worst:.2e} ≥ 1e-10"))?;
    ensure(el < Duration::from_secs(10), || format!("took {el:.2?} ≥ 10 s"))?;
    Ok(format!("{trials} relations; max residual {worst:.1e}; {el:.2?}"))
}

// ---------------------------------------------------------------------------
// 3. Function ↔ fission ↔ homomorphism, and the unitality equivalence.

fn drop_one_block(rng: &mut ChaCha8Rng, f: &Relation) -> Relation {
    let blocks: Vec<(String, String)> = f.blocks().map(|(x, y, _)| (x.to_string(), y.to_string())).collect();
    let (x0, y0) = blocks.choose(rng).expect("functions have blocks").clone();
    let mut out = Relation::empty(f.source().clone(), f.target().clone());
    for (x, y, v) in f.blocks() {
        if (x, y) != (x0.as_str(), y0.as_str()) {
            out.set_block(x, y, v.clone()).expect("same shapes");
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let t = tol();
    let mut rng = rng(3);
    let mut cases: Vec<Relation> = Vec::new();
    while cases.len() < 70 {
        let x = random::quantum_set(&mut rng, "x", 3, 3);
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        if cases.len().is_multiple_of(2) {
            if let Some(f) = random::function(&mut rng, &x, &y, &t) {
                cases.push(f);
            }
        } else {
            cases.push(random::partial_function(&mut rng, &x, &y, &t));
        }
    }
    // Engineered non-unital cases: a function with one block removed.
    let mut engineered = 0;
    while engineered < 30 {
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let f = random::function_into(&mut rng, "x", &y, 3, 3, &t).expect("feasible");
        cases.push(drop_one_block(&mut rng, &f));
        engineered += 1;
    }
    let mut round: f64 = 0.0;
    let (mut unital, mut non_unital) = (0, 0);
    for (i, f) in cases.iter().enumerate() {
        let fis = fission_from_function(f, &t).map_err(e)?;
        let phi = Homomorphism::from_fission(&fis);
        let back = function_from_homomorphism(&phi, &t).map_err(e)?;
        round = round.max(back.distance(f).map_err(e)?);
        let a = fis.unitality_residual() < t.eq_tol;
        let b = unitality_residual(f) < t.eq_tol;
        let c = cosurjectivity_residual(f, &t) < t.eq_tol;
        ensure(a == b && b == c, || format!("case {i}: Σf†f=1 {a}, F⋆(1)=1 {b}, F†F≥I {c}"))?;
        if a {
            unital += 1;
        } else {
            non_unital += 1;
        }
    }
    ensure(round < 1e-8, || format!("roundtrip residual {round:.2e}"))?;
    ensure(non_unital >= 30, || format!("only {non_unital} non-unital cases"))?;
    Ok(format!(
        "{} partial functions ({unital} unital, {non_unital} non-unital); roundtrip {round:.1e}; equivalence agrees",
        cases.len()
    ))
}

// ---------------------------------------------------------------------------
// 4. Functoriality and monoidality of the star map.

fn criterion_4() -> Outcome {
    let t = tol();
    let mut rng = rng(4);
    let (mut comp, mut tens, mut fis): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let n = 100;
    for _ in 0..n {
        let z = random::quantum_set(&mut rng, "z", 2, 3);
        let g = random::function_into(&mut rng, "y", &z, 2, 3, &t).expect("feasible");
        let f = random::function_into(&mut rng, "x", g.source(), 2, 4, &t).expect("feasible");
        let gf = Relation::compose(&g, &f, &t).map_err(e)?;
        for gen in generators(&z) {
            let lhs = star_map_unchecked(&gf, &gen.op);
            let rhs = star_map_unchecked(&f, &star_map_unchecked(&g, &gen.op));
            comp = comp.max(lhs.dist(&rhs));
        }
        // Same identity through fissions.
        let fc = fission_compose(&fission_from_function(&g, &t).map_err(e)?, &fission_from_function(&f, &t).map_err(e)?)
            .map_err(e)?;
        for gen in generators(&z) {
            fis = fis.max(fc.star(&gen.op).dist(&star_map_unchecked(&gf, &gen.op)));
        }
    }
    for _ in 0..n {
        let y1 = random::quantum_set(&mut rng, "a", 2, 2);
        let y2 = random::quantum_set(&mut rng, "b", 2, 2);
        let f1 = random::function_into(&mut rng, "c", &y1, 2, 3, &t).expect("feasible");
        let f2 = random::function_into(&mut rng, "d", &y2, 2, 3, &t).expect("feasible");
        let prod = f1.times(&f2);
        let ft = fission_tensor(&fission_from_function(&f1, &t).map_err(e)?, &fission_from_function(&f2, &t).map_err(e)?);
        for g1 in generators(&y1) {
            for g2 in generators(&y2) {
                let lhs = star_map_unchecked(&prod, &g1.op.tensor(&g2.op));
                let rhs = star_map_unchecked(&f1, &g1.op).tensor(&star_map_unchecked(&f2, &g2.op));
                tens = tens.max(lhs.dist(&rhs));
                fis = fis.max(ft.star(&g1.op.tensor(&g2.op)).dist(&rhs));
            }
        }
    }
    let max = comp.max(tens).max(fis);
    ensure(max < 1e-8, || format!("composition {comp:.2e}, tensor {tens:.2e}, fission {fis:.2e}"))?;
    Ok(format!("{n}+{n} instances; composition {comp:.1e}, tensor {tens:.1e}, fission route {fis:.1e}"))
}

// ---------------------------------------------------------------------------
// 5. Basis independence.

fn criterion_5() -> Outcome {
    let t = tol();
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    let instances = 50;
    for _ in 0..instances {
        let x = random::quantum_set(&mut rng, "x", 3, 3);
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let f = random::partial_function(&mut rng, &x, &y, &t);
        let b = random::element(&mut rng, &y);
        let base = star_map_unchecked(&f, &b);
        for _ in 0..10 {
            let mut g = Relation::empty(x.clone(), y.clone());
            for (xl, yl, v) in f.blocks() {
                let u = random::unitary(&mut rng, v.dim());
                g.set_block(xl, yl, v.rebased(&u, &t).map_err(e)?).map_err(e)?;
            }
            worst = worst.max(star_map_unchecked(&g, &b).dist(&base));
        }
    }
    ensure(worst < 1e-8, || format!("residual {worst:.2e}"))?;
    Ok(format!("{instances} instances × 10 bases; max residual {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 6. Surjective ⟺ star-injective, injective ⟺ star-surjective.

fn with_extra_atom(f: &Relation) -> Result<Relation, String> {
    let mut atoms = f.target().atoms().to_vec();
    atoms.push(Atom::new("unused", 2));
    let target = QuantumSet::new(atoms).map_err(e)?;
    let mut out = Relation::empty(f.source().clone(), target);
    for (x, y, v) in f.blocks() {
        out.set_block(x, y, v.clone()).map_err(e)?;
    }
    Ok(out)
}

fn criterion_6() -> Outcome {
    let t = tol();
    let mut rng = rng(6);
    let mut counts = [0usize; 4];
    let n = 120;
    for i in 0..n {
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let mut f = random::function_into(&mut rng, "x", &y, 3, 4, &t).expect("feasible");
        if i % 4 == 0 {
            f = with_extra_atom(&f)?;
        }
        if i % 4 == 1 {
            // Identity-like relabelings are injective.
            f = Relation::identity(&y);
        }
        ensure(is_function(&f, &t), || format!("case {i} is not a function"))?;
        let w = check_axioms(&f, &t);
        let si = star_injective(&f, &t).map_err(e)?;
        let ss = star_surjective(&f, &t).map_err(e)?;
        ensure(w.surjective == si, || format!("case {i}: surjective {} vs star-injective {si}", w.surjective))?;
        ensure(w.injective == ss, || format!("case {i}: injective {} vs star-surjective {ss}", w.injective))?;
        counts[0] += w.surjective as usize;
        counts[1] += !w.surjective as usize;
        counts[2] += w.injective as usize;
        counts[3] += !w.injective as usize;
    }
    ensure(counts.iter().all(|&c| c > 0), || format!("class counts {counts:?} miss a case"))?;
    Ok(format!(
        "{n} functions; surjective {}/{} not, injective {}/{} not; all agree",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

// ---------------------------------------------------------------------------
// 7. The twelve converters and inverse images.

fn criterion_7() -> Outcome {
    let t = tol();
    let mut rng = rng(7);
    let mut worst: f64 = 0.0;
    let mut lattice: f64 = 0.0;
    let n = 100;
    for _ in 0..n {
        let x = random::quantum_set(&mut rng, "x", 3, 3);
        let p = random::predicate(&mut rng, &x, &t);
        // The same predicate in all four guises.
        let proj = p.to_projection();
        let rel = p.to_relation(&t).map_err(e)?;
        let fun = p.to_function(&t).map_err(e)?;
        let checks = [
            Predicate::from_projection(&proj, &t).map_err(e)?.distance(&p).map_err(e)?,
            Predicate::from_relation(&rel, &t).map_err(e)?.distance(&p).map_err(e)?,
            Predicate::from_function(&fun, &t).map_err(e)?.distance(&p).map_err(e)?,
            projection_to_relation(&proj, &t).map_err(e)?.distance(&rel).map_err(e)?,
            relation_to_projection(&rel).map_err(e)?.dist(&proj),
            projection_to_function(&proj, &t).map_err(e)?.distance(&fun).map_err(e)?,
            function_to_projection(&fun, &t).map_err(e)?.dist(&proj),
            relation_to_function(&rel, &t).map_err(e)?.distance(&fun).map_err(e)?,
            function_to_relation(&fun, &t).map_err(e)?.distance(&rel).map_err(e)?,
            // Round trips through each guise and back.
            Predicate::from_relation(&projection_to_relation(&proj, &t).map_err(e)?, &t)
                .map_err(e)?
                .distance(&p)
                .map_err(e)?,
            Predicate::from_function(&relation_to_function(&rel, &t).map_err(e)?, &t)
                .map_err(e)?
                .distance(&p)
                .map_err(e)?,
            function_to_projection(&projection_to_function(&proj, &t).map_err(e)?, &t)
                .map_err(e)?
                .dist(&proj),
        ];
        worst = checks.iter().cloned().fold(worst, f64::max);
        ensure(fun.target() == &bool_set(), || "function guise must land in the booleans".into())?;

        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let Some(f) = random::function(&mut rng, &x, &y, &t) else {
            continue;
        };
        let q1 = random::predicate(&mut rng, &y, &t);
        let q2 = random::predicate(&mut rng, &y, &t);
        let inv = |q: &Predicate| inverse_image(&f, q, &t).map_err(e);
        let m = inv(&q1.meet(&q2, &t).map_err(e)?)?.distance(&inv(&q1)?.meet(&inv(&q2)?, &t).map_err(e)?).map_err(e)?;
        let j = inv(&q1.join(&q2, &t).map_err(e)?)?.distance(&inv(&q1)?.join(&inv(&q2)?, &t).map_err(e)?).map_err(e)?;
        let ng = inv(&q1.neg(&t))?.distance(&inv(&q1)?.neg(&t)).map_err(e)?;
        let top = inv(&Predicate::top(&y))?.distance(&Predicate::top(&x)).map_err(e)?;
        let bot = inv(&Predicate::bottom(&y))?.distance(&Predicate::bottom(&x)).map_err(e)?;
        let q12 = q1.meet(&q2, &t).map_err(e)?;
        let order_ok = inv(&q12)?.leq(&inv(&q1)?, &t).map_err(e)?;
        ensure(order_ok, || "inverse image is not monotone".into())?;
        lattice = lattice.max(m).max(j).max(ng).max(top).max(bot);
    }
    ensure(worst < 1e-8, || format!("converter residual {worst:.2e}"))?;
    ensure(lattice < 1e-8, || format!("ortholattice residual {lattice:.2e}"))?;
    Ok(format!("{n} predicates; converters {worst:.1e}; inverse-image lattice {lattice:.1e}"))
}

// ---------------------------------------------------------------------------
// 8. Corange invariance and factorization.

fn criterion_8() -> Outcome {
    let t = tol();
    let mut rng = rng(8);
    let (mut inv, mut fac): (f64, f64) = (0.0, 0.0);
    let n = 60;
    for i in 0..n {
        let x = random::quantum_set(&mut rng, "x", 3, 3);
        let y = random::quantum_set(&mut rng, "y", 3, 3);
        let g = random::partial_function(&mut rng, &x, &y, &t);
        // H: Y → Z is any function; the terminal map is the fallback.
        let z = random::quantum_set(&mut rng, "z", 3, 3);
        let hy = random::function(&mut rng, &y, &z, &t).unwrap_or_else(|| terminal(&y));
        ensure(is_function(&hy, &t), || format!("case {i}: H is not a function"))?;
        let hg = Relation::compose(&hy, &g, &t).map_err(e)?;
        inv = inv.max(corange(&hg, &t).map_err(e)?.distance(&corange(&g, &t).map_err(e)?).map_err(e)?);
        let cf = corange_factor(&g, &t).map_err(e)?;
        ensure(is_function(&cf.f, &t), || format!("case {i}: factor is not a function"))?;
        let re = Relation::compose(&cf.f, &cf.k, &t).map_err(e)?;
        fac = fac.max(re.distance(&g).map_err(e)?);
    }
    ensure(inv.max(fac) < 1e-8, || format!("corange invariance {inv:.2e}, factorization {fac:.2e}"))?;
    Ok(format!("{n} partial functions; invariance {inv:.1e}; factorization {fac:.1e}"))
}

// ---------------------------------------------------------------------------
// 9. Coloring characterization.

fn all_graphs(n: usize) -> Vec<Graph> {
    let vs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
        // Canonical form: smallest sorted edge list over all relabelings.
        let canon = perms
            .iter()
            .map(|p| {
                let mut es: Vec<(usize, usize)> =
                    edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                es.sort();
                es
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canon) {
            let es = edges.iter().map(|&(a, b)| (vs[a].clone(), vs[b].clone())).collect();
            out.push(Graph::new(vs.clone(), es).expect("valid"));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_valid_family(rng: &mut ChaCha8Rng) -> (Graph, ColoringFamily) {
    let n = rng.gen_range(3..=6);
    let d = rng.gen_range(2..=3);
    let k = rng.gen_range(2..=3);
    let colors: Vec<String> = (0..k).map(|t| format!("c{t}")).collect();
    let assign: Vec<Vec<usize>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(0..k)).collect()).collect();
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if (0..d).all(|i| assign[a][i] != assign[b][i]) && rng.gen_bool(0.7) {
                edges.push((vs[a].clone(), vs[b].clone()));
            }
        }
    }
    let graph = Graph::new(vs.clone(), edges).expect("valid");
    let u = random::unitary(rng, d);
    let mut projections = BTreeMap::new();
    for (g, row) in assign.iter().enumerate() {
        for (ti, t) in colors.iter().enumerate() {
            let diag: Vec<C64> = row.iter().map(|&c| C64::new((c == ti) as u8 as f64, 0.0)).collect();
            let p = &(&u * &CMatrix::diag(&diag)) * &u.adjoint();
            projections.insert((vs[g].clone(), t.clone()), p);
        }
    }
    (graph, ColoringFamily::new(d, colors, projections).expect("well-formed"))
}

fn expm_i(h: &CMatrix, eps: f64) -> CMatrix {
    let (vals, v) = eigh(h);
    let phases: Vec<C64> = vals.iter().map(|&l| C64::from_polar(1.0, eps * l)).collect();
    &(&v * &CMatrix::diag(&phases)) * &v.adjoint()
}

fn criterion_9() -> Outcome {
    let t = tol();
    let mut notes = Vec::new();
    // (a) Latin squares.
    for d in 2..=4 {
        let (g, fam) = latin_square(d);
        let r = coloring::verify(&g, &fam, &t).map_err(e)?;
        ensure(r.pass && r.predicate_route_pass, || format!("(a) Latin square d={d} rejected"))?;
    }
    notes.push("(a) d=2,3,4 verified".to_string());

    // (b) Dimension one against the classical oracle: every graph up to
    // isomorphism on at most 6 vertices, every coloring with 1..=4 colors.
    let start = Instant::now();
    let (mut graphs, mut checked) = (0, 0);
    for n in 1..=6u32 {
        for g in all_graphs(n as usize) {
            graphs += 1;
            let vs = g.vertices().to_vec();
            for k in 1..=4usize {
                let colors: Vec<String> = (0..k).map(|c| c.to_string()).collect();
                let assignment = |code: usize| -> BTreeMap<String, String> {
                    vs.iter()
                        .enumerate()
                        .map(|(i, v)| (v.clone(), colors[code / k.pow(i as u32) % k].clone()))
                        .collect()
                };
                // Full two-route verification on the first proper and the
                // first improper coloring; the projection route on all.
                let mut seen = (false, false);
                for code in 0..k.pow(n) {
                    let assign = assignment(code);
                    let proper = g.edges().all(|(a, b)| assign[a] != assign[b]);
                    let fam = classical_family(&assign, &colors);
                    let (viol, _) = coloring::projection_violation(&g, &fam);
                    ensure((viol < t.eq_tol) == proper, || format!("(b) disagreement on {g:?} with {assign:?}"))?;
                    checked += 1;
                    let slot = if proper { &mut seen.0 } else { &mut seen.1 };
                    if !*slot {
                        *slot = true;
                        let r = coloring::verify(&g, &fam, &t).map_err(e)?;
                        ensure(r.pass == proper && r.predicate_route_pass == proper, || {
                            format!("(b) full verifier disagrees on {g:?} with {assign:?}")
                        })?;
                    }
                }
            }
        }
    }
    notes.push(format!("(b) {graphs} graphs, {checked} colorings in {:.1?}", start.elapsed()));

    // (c) Predicate route vs projection route. Perturbed families rotate
    // one vertex that shares a color with a neighbour and has a
    // non-scalar projection, so a generic rotation is visible.
    let mut rng = rng(9);
    let (mut instances, mut rejected) = (0, 0);
    while instances < 100 {
        let (g, mut fam) = random_valid_family(&mut rng);
        let perturb = instances % 2 == 1;
        if perturb {
            let used = |v: &str, c: &str| fam.projection(v, c).map_or(0.0, |p| p.frob_norm()) > 0.5;
            let scalar = |v: &str, c: &str| {
                fam.projection(v, c)
                    .is_some_and(|p| p.dist(&CMatrix::identity(fam.dim())) < 0.5 || p.frob_norm() < 0.5)
            };
            let sensitive: Vec<String> = g
                .vertices()
                .iter()
                .filter(|v| {
                    fam.colors().iter().any(|c| {
                        used(v, c) && !scalar(v, c) && g.neighbors(v).any(|w| used(w, c))
                    })
                })
                .cloned()
                .collect();
            let Some(v) = sensitive.choose(&mut rng).cloned() else {
                continue;
            };
            let u = expm_i(&random::hermitian(&mut rng, fam.dim()), 0.05);
            let ps: BTreeMap<String, CMatrix> = fam
                .colors()
                .iter()
                .map(|c| (c.clone(), &(&u * fam.projection(&v, c).unwrap()) * &u.adjoint()))
                .collect();
            fam = fam.with_vertex(&v, &ps).map_err(e)?;
        }
        let r = coloring::verify(&g, &fam, &t).map_err(e)?;
        ensure(r.pass == r.predicate_route_pass, || format!("(c) routes disagree on instance {instances}: {r:?}"))?;
        ensure(r.pass != perturb, || format!("(c) instance {instances} misclassified: {r:?}"))?;
        instances += 1;
        rejected += !r.pass as usize;
    }
    notes.push(format!("(c) {instances} families agree ({rejected} perturbed rejected)"));

    // (d) Search on K4.
    let start = Instant::now();
    let k4 = Graph::complete(4);
    let names: Vec<String> = (0..4).map(|c| c.to_string()).collect();
    let out = search(&k4, &names, 4, 2024, SearchBudget::default(), &t).map_err(e)?;
    let el = start.elapsed();
    let fam = out.family.ok_or_else(|| format!("(d) no certificate after {} restarts", out.restarts_used))?;
    let r = coloring::verify(&k4, &fam, &t).map_err(e)?;
    ensure(r.pass && r.predicate_route_pass, || "(d) certificate failed verification".into())?;
    ensure(out.restarts_used <= 200 && el < Duration::from_secs(120), || format!("(d) budget exceeded: {el:.1?}"))?;
    notes.push(format!("(d) K4 certificate after {} restart(s) in {el:.2?}", out.restarts_used));
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// 10. No right inverse for the measurement.

fn criterion_10() -> Outcome {
    let t = tol();
    let h2 = QuantumSet::single("q", 2).map_err(e)?;
    let bits = QuantumSet::classical(&["0", "1"]).map_err(e)?;
    let row = |i| OperatorSubspace::span(&[CMatrix::unit(1, 2, 0, i)], &t).unwrap();
    let m = Relation::empty(h2.clone(), bits.clone())
        .with_block("q", "0", row(0))
        .and_then(|r| r.with_block("q", "1", row(1)))
        .map_err(e)?;
    let w = check_axioms(&m, &t);
    ensure(w.function && w.surjective, || "measurement is not a surjective function".into())?;

    // Candidate classical sections G(b, q) = span{v_b} over a grid of
    // directions, plus the full space; keep those with M ∘ G = I.
    let mut dirs: Vec<CMatrix> = Vec::new();
    for a in 0..=8 {
        for ph in 0..4 {
            let th = std::f64::consts::FRAC_PI_2 * a as f64 / 8.0;
            let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * ph as f64);
            dirs.push(CMatrix::column(&[C64::new(th.cos(), 0.0), phase * th.sin()]));
        }
    }
    let spaces: Vec<OperatorSubspace> = dirs
        .iter()
        .map(|v| OperatorSubspace::span(std::slice::from_ref(v), &t).unwrap())
        .chain(std::iter::once(OperatorSubspace::full(1, 2)))
        .collect();
    let id = Relation::identity(&bits);
    let (mut candidates, mut min_res) = (0, f64::INFINITY);
    for s0 in &spaces {
        for s1 in &spaces {
            let g = Relation::empty(bits.clone(), h2.clone())
                .with_block("0", "q", s0.clone())
                .and_then(|r| r.with_block("1", "q", s1.clone()))
                .map_err(e)?;
            if !Relation::compose(&m, &g, &t).map_err(e)?.eq(&id, &t).map_err(e)? {
                continue;
            }
            candidates += 1;
            min_res = min_res.min(coinjectivity_residual(&g));
        }
    }
    ensure(candidates > 0, || "no candidate section satisfies M ∘ G = I".into())?;
    ensure(min_res >= 0.5, || format!("a section has coinjectivity residual {min_res:.3}"))?;
    let expected = 0.5f64.sqrt();
    ensure((min_res - expected).abs() < 1e-12, || format!("residual {min_res} differs from 1/√2"))?;
    Ok(format!("{candidates} section(s) satisfy M∘G = I; min coinjectivity residual {min_res:.4}"))
}

/// Name, check, and wall-clock limit in seconds where one is stated.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("dagger-compact laws", criterion_1, Some(60)),
        ("classical embedding", criterion_2, Some(10)),
        ("function/fission/homomorphism cycle", criterion_3, None),
        ("star-map functoriality and monoidality", criterion_4, None),
        ("star-map basis independence", criterion_5, None),
        ("epi/mono dualities", criterion_6, None),
        ("predicate converters", criterion_7, None),
        ("corange", criterion_8, None),
        ("graph colorings", criterion_9, None),
        ("measurement has no right inverse", criterion_10, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let el = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if el > Duration::from_secs(*s) => Err(format!("runtime {el:.1?} over {s} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{el:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{el:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
