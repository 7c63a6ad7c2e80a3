use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsets::coloring::{self, latin_square};
use qsets::opalg::{star_map_unchecked, BlockOperator};
use qsets::pred::{inverse_image, Predicate};
use qsets::qfun::{check_axioms, inclusion, is_function};
use qsets::qset::Atom;
use qsets::random;
use qsets::{OperatorSubspace, QuantumSet, Relation, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subspaces(seed: u64, n: usize) -> (usize, usize, Vec<OperatorSubspace>) {
    let mut r = rng(seed);
    let dom = 1 + (seed % 3) as usize;
    let cod = 1 + (seed / 3 % 3) as usize;
    let spaces = (0..n).map(|_| random::subspace(&mut r, dom, cod, &tol())).collect();
    (dom, cod, spaces)
}

fn near(a: &OperatorSubspace, b: &OperatorSubspace) -> bool {
    a.distance(b).unwrap() < 1e-8
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subspace_involutions(seed in any::<u64>()) {
        let t = tol();
        let (_, _, v) = subspaces(seed, 1);
        prop_assert!(near(&v[0].dagger().dagger(), &v[0]));
        prop_assert!(near(&v[0].complement(&t).complement(&t), &v[0]));
        prop_assert!(v[0].orthonormality_residual() < 1e-12);
    }

    #[test]
    fn subspace_de_morgan(seed in any::<u64>()) {
        let t = tol();
        let (_, _, v) = subspaces(seed, 2);
        let lhs = v[0].join(&v[1], &t).unwrap().complement(&t);
        let rhs = v[0].complement(&t).meet(&v[1].complement(&t), &t).unwrap();
        prop_assert!(near(&lhs, &rhs));
    }

    #[test]
    fn subspace_orthomodular(seed in any::<u64>()) {
        let t = tol();
        let (_, _, v) = subspaces(seed, 2);
        let w = v[0].join(&v[1], &t).unwrap();
        let lhs = v[0].join(&v[0].complement(&t).meet(&w, &t).unwrap(), &t).unwrap();
        prop_assert!(near(&lhs, &w));
    }

    #[test]
    fn span_absorbs_combinations(seed in any::<u64>()) {
        let t = tol();
        let (_, _, v) = subspaces(seed, 1);
        let mut mats = v[0].basis().to_vec();
        if let Some(first) = mats.first().cloned() {
            let extra = mats.iter().skip(1).fold(first.scale_real(0.5), |acc, m| &acc + &m.scale_real(-1.5));
            mats.push(extra);
        }
        let again = OperatorSubspace::span_in(v[0].dom(), v[0].cod(), &mats, &t).unwrap();
        prop_assert!(near(&again, &v[0]));
    }

    #[test]
    fn product_distributes_over_join(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let (a, b, c) = (1 + (seed % 3) as usize, 1 + (seed / 3 % 3) as usize, 1 + (seed / 9 % 3) as usize);
        let w = random::subspace(&mut r, b, c, &t);
        let v1 = random::subspace(&mut r, a, b, &t);
        let v2 = random::subspace(&mut r, a, b, &t);
        let lhs = w.product(&v1.join(&v2, &t).unwrap(), &t).unwrap();
        let rhs = w.product(&v1, &t).unwrap().join(&w.product(&v2, &t).unwrap(), &t).unwrap();
        prop_assert!(near(&lhs, &rhs));
    }

    #[test]
    fn quantum_set_counts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let y = random::quantum_set(&mut r, "y", 3, 3);
        let z = random::quantum_set(&mut r, "z", 3, 3);
        prop_assert!(x.product(&y).product(&z).isomorphic(&x.product(&y.product(&z))).is_some());
        prop_assert!(x.product(&QuantumSet::unit()).isomorphic(&x).is_some());
        let u = x.disjoint_union(&y);
        prop_assert_eq!(u.len(), x.len() + y.len());
        prop_assert_eq!(u.total_sq_dim(), x.total_sq_dim() + y.total_sq_dim());
        prop_assert_eq!(x.product(&y).total_sq_dim(), x.total_sq_dim() * y.total_sq_dim());
    }

    #[test]
    fn classical_products_embed(n in 1usize..4, m in 1usize..4) {
        let s: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let u: Vec<String> = (0..m).map(|i| format!("u{i}")).collect();
        let pairs: Vec<String> = s.iter().flat_map(|a| u.iter().map(move |b| qsets::qset::pair_label(a, b))).collect();
        let lhs = QuantumSet::classical(&pairs).unwrap();
        let rhs = QuantumSet::classical(&s).unwrap().product(&QuantumSet::classical(&u).unwrap());
        prop_assert!(lhs.isomorphic(&rhs).is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_preserves_join(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let y = random::quantum_set(&mut r, "y", 3, 3);
        let z = random::quantum_set(&mut r, "z", 3, 3);
        let r1 = random::relation(&mut r, &x, &y, &t);
        let r2 = random::relation(&mut r, &x, &y, &t);
        let s = random::relation(&mut r, &y, &z, &t);
        let lhs = Relation::compose(&s, &r1.join(&r2, &t).unwrap(), &t).unwrap();
        let rhs = Relation::compose(&s, &r1, &t).unwrap().join(&Relation::compose(&s, &r2, &t).unwrap(), &t).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-8);
    }

    #[test]
    fn braiding_is_natural(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let [x1, y1, x2, y2] = ["a", "b", "c", "d"].map(|p| random::quantum_set(&mut r, p, 2, 3));
        let r1 = random::relation(&mut r, &x1, &y1, &t);
        let r2 = random::relation(&mut r, &x2, &y2, &t);
        let lhs = Relation::compose(&Relation::braiding(&y1, &y2), &r1.times(&r2), &t).unwrap();
        let rhs = Relation::compose(&r2.times(&r1), &Relation::braiding(&x1, &x2), &t).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-8);
    }

    #[test]
    fn functions_compose_to_functions(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let z = random::quantum_set(&mut r, "z", 3, 3);
        let g = random::function_into(&mut r, "y", &z, 3, 3, &t).unwrap();
        let f = random::function_into(&mut r, "x", g.source(), 3, 4, &t).unwrap();
        prop_assert!(is_function(&Relation::compose(&g, &f, &t).unwrap(), &t));
    }

    #[test]
    fn invertible_functions_are_unitary_relabelings(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let atoms: Vec<Atom> = x.atoms().iter().map(|a| Atom::new(format!("y{}", a.label), a.dim)).collect();
        let y = QuantumSet::new(atoms).unwrap();
        let mut f = Relation::empty(x.clone(), y.clone());
        for a in x.atoms() {
            let u = random::unitary(&mut r, a.dim);
            f.set_block(&a.label, &format!("y{}", a.label), OperatorSubspace::span(&[u], &t).unwrap()).unwrap();
        }
        let w = check_axioms(&f, &t);
        prop_assert!(w.function && w.injective && w.surjective);
        let back = Relation::compose(&f.dagger(), &f, &t).unwrap();
        let forth = Relation::compose(&f, &f.dagger(), &t).unwrap();
        prop_assert!(back.distance(&Relation::identity(&x)).unwrap() < 1e-8);
        prop_assert!(forth.distance(&Relation::identity(&y)).unwrap() < 1e-8);
    }

    #[test]
    fn subobjects_ordered_by_inclusion(mask1 in 1u8..16, mask2 in 1u8..16) {
        let t = tol();
        let x = QuantumSet::new((0..4).map(|i| Atom::new(format!("a{i}"), 1 + i % 3)).collect()).unwrap();
        let pick = |m: u8| -> Vec<String> { (0..4).filter(|i| m >> i & 1 == 1).map(|i| format!("a{i}")).collect() };
        let (z1, z2) = (x.subset(&pick(mask1)).unwrap(), x.subset(&pick(mask2)).unwrap());
        let (j1, j2) = (inclusion(&z1, &x).unwrap(), inclusion(&z2, &x).unwrap());
        // j1 factors through j2 iff j2 j2† j1 = j1.
        let through = Relation::compose(&j2, &Relation::compose(&j2.dagger(), &j1, &t).unwrap(), &t).unwrap();
        let factors = through.distance(&j1).unwrap() < 1e-8;
        prop_assert_eq!(factors, mask1 & !mask2 == 0);
    }

    #[test]
    fn star_map_is_multiplicative(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let y = random::quantum_set(&mut r, "y", 3, 3);
        let f = random::partial_function(&mut r, &x, &y, &t);
        let (a, b) = (random::element(&mut r, &y), random::element(&mut r, &y));
        let lhs = star_map_unchecked(&f, &a.mul(&b));
        let rhs = star_map_unchecked(&f, &a).mul(&star_map_unchecked(&f, &b));
        prop_assert!(lhs.dist(&rhs) < 1e-8 * (1.0 + a.norm() * b.norm()));
        prop_assert!(star_map_unchecked(&f, &a.adjoint()).dist(&star_map_unchecked(&f, &a).adjoint()) < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn inverse_images_keep_disjointness(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let y = random::quantum_set(&mut r, "y", 3, 3);
        let f = random::function_into(&mut r, "x", &y, 3, 3, &t).unwrap();
        let p = random::predicate(&mut r, &y, &t);
        let q = p.neg(&t).meet(&random::predicate(&mut r, &y, &t), &t).unwrap();
        prop_assert!(p.disjoint(&q, &t).unwrap());
        let (ip, iq) = (inverse_image(&f, &p, &t).unwrap(), inverse_image(&f, &q, &t).unwrap());
        prop_assert!(ip.disjoint(&iq, &t).unwrap());
    }

    #[test]
    fn predicate_projection_is_projector_onto_spaces(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let p = random::predicate(&mut r, &x, &t);
        let via_rel = qsets::pred::relation_to_projection(&p.to_relation(&t).unwrap()).unwrap();
        prop_assert!(via_rel.dist(&p.to_projection()) < 1e-8);
        for (label, block) in p.to_projection().blocks() {
            prop_assert!(block.projection_residual() < 1e-10);
            prop_assert_eq!(block.trace().re.round() as usize, p.space(label).unwrap().dim());
        }
    }

    #[test]
    fn coloring_function_roundtrip(d in 2usize..5, seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let (g, fam) = latin_square(d);
        let fam = fam.conjugate(&random::unitary(&mut r, d));
        let f = coloring::to_function(&g, &fam, &t).unwrap();
        prop_assert!(is_function(&f, &t));
        let back = coloring::from_function(&f, &t).unwrap();
        for v in g.vertices() {
            for c in fam.colors() {
                prop_assert!(back.projection(v, c).unwrap().dist(fam.projection(v, c).unwrap()) < 1e-8);
            }
        }
        prop_assert!(coloring::verify(&g, &back, &t).unwrap().pass);
    }

    #[test]
    fn json_roundtrips(seed in any::<u64>()) {
        let t = tol();
        let mut r = rng(seed);
        let x = random::quantum_set(&mut r, "x", 3, 3);
        let y = random::quantum_set(&mut r, "y", 3, 3);
        let rel = random::relation(&mut r, &x, &y, &t);
        let back: Relation = serde_json::from_str(&serde_json::to_string(&rel).unwrap()).unwrap();
        prop_assert!(back.distance(&rel).unwrap() < 1e-12);
        let p = random::predicate(&mut r, &x, &t);
        let back: Predicate = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert!(back.distance(&p).unwrap() < 1e-12);
        let b = random::element(&mut r, &x);
        let back: BlockOperator = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        prop_assert!(back.dist(&b) < 1e-12);
        let back: QuantumSet = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}
