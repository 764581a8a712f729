use proptest::prelude::*;

use kmkit::adrep::{self, Representation};
use kmkit::cosheaf::{self, chain_complex, homology, trivial_cosheaf, SimplicialComplex, Verdict};
use kmkit::davis;
use kmkit::exactalg::{smith_of_rows, Matrix, Ring, Scalar};
use kmkit::gcm::{build_root_datum, catalog, Gcm, Variant};
use kmkit::kmalg::{assemble_g, GradedLieAlgebra};
use kmkit::weyl::{self, WeylElement};

fn field(q: u64) -> Ring {
    Ring::parse(&format!("F{q}")).unwrap()
}

fn finite_gcm(k: usize) -> Gcm {
    [catalog::a1(), catalog::a2(), catalog::b2(), catalog::g2(), catalog::a3()][k % 5].clone()
}

fn any_gcm(k: usize) -> Gcm {
    [catalog::a2(), catalog::b2(), catalog::g2(), catalog::affine_a1(), catalog::generic33(), catalog::a3()][k % 6].clone()
}

fn adjoint(g: &Gcm, q: u64) -> (GradedLieAlgebra, Representation) {
    let d = build_root_datum(g, Variant::Minimal).unwrap();
    let top = weyl::enumerate_real_roots(&d, 64).iter().map(|r| r.height).max().unwrap();
    let alg = assemble_g(&d, top + 1, &field(q)).unwrap();
    let rep = Representation::adjoint(&alg).unwrap();
    (alg, rep)
}

fn basis(alg: &GradedLieAlgebra, i: usize) -> Vec<Scalar> {
    let r = alg.ring();
    (0..alg.dim()).map(|j| if i == j { r.one() } else { r.zero() }).collect()
}

fn complex_strategy() -> impl Strategy<Value = SimplicialComplex> {
    (1usize..7).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(0..n, 1..5), 0..6)
            .prop_map(move |mut facets| {
                for f in &mut facets {
                    f.sort();
                    f.dedup();
                }
                SimplicialComplex::new(n, &facets).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_over_q_matches_rank_mod_good_primes(entries in proptest::collection::vec(-5i64..6, 12), pi in 0usize..4) {
        let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
        let p = [2u64, 3, 5, 7][pi];
        let snf = smith_of_rows(rows.iter().map(|r| r.iter().map(|&x| num_bigint::BigInt::from(x)).collect()).collect(), 4);
        let bad = snf.divisors.iter().any(|d| (d % num_bigint::BigInt::from(p)) == num_bigint::BigInt::from(0));
        let rq = Matrix::from_i64(&Ring::Q, &rows).rank();
        let rp = Matrix::from_i64(&field(p), &rows).rank();
        prop_assert_eq!(rq, snf.rank);
        if !bad {
            prop_assert_eq!(rq, rp);
        }
    }

    #[test]
    fn length_changes_by_one(k in 0usize..6, word in proptest::collection::vec(0usize..3, 0..8)) {
        let g = any_gcm(k);
        let d = build_root_datum(&g, Variant::Minimal).unwrap();
        let word: Vec<usize> = word.into_iter().map(|i| i % g.n()).collect();
        let w = WeylElement::from_word(&d, &word).unwrap();
        for i in 0..g.n() {
            let ws = w.mul_simple(&d, i).unwrap();
            prop_assert_eq!((ws.length() as i64 - w.length() as i64).abs(), 1);
        }
    }

    #[test]
    fn root_window_is_idempotent(k in 0usize..6, h in 1i64..6) {
        let d = build_root_datum(&any_gcm(k), Variant::Minimal).unwrap();
        let small = weyl::enumerate_real_roots(&d, h);
        let big: Vec<_> = weyl::enumerate_real_roots(&d, h + 2).into_iter().filter(|r| r.height <= h).collect();
        prop_assert_eq!(small, big);
    }

    #[test]
    fn exponential_is_an_automorphism(k in 0usize..4, qi in 0usize..2, t in 1u64..7, r in 0usize..64, x in 0usize..64, y in 0usize..64) {
        let q = [5u64, 7][qi];
        let (alg, _) = adjoint(&finite_gcm(k), q);
        let roots = adrep::real_roots_both(&alg);
        let root = &roots[r % roots.len()];
        let (x, y) = (x % alg.dim(), y % alg.dim());
        let m = adrep::ad_exponential(&alg, root, &alg.ring().from_i64(t as i64)).unwrap().matrix;
        let bx = m.apply(&basis(&alg, x));
        let by = m.apply(&basis(&alg, y));
        let lhs = m.apply(&alg.ad_of(&basis(&alg, x)).apply(&basis(&alg, y)));
        let rhs = alg.ad_of(&bx).apply(&by);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn torus_action_is_multiplicative(k in 0usize..4, s in 1i64..7, t in 1i64..7, hi in 0usize..4) {
        let g = finite_gcm(k);
        let (alg, _) = adjoint(&g, 7);
        let grading: Vec<Vec<i64>> = (0..alg.dim()).map(|a| alg.degree(a).to_vec()).collect();
        let mut h = vec![0i64; g.n()];
        h[hi % g.n()] = 1;
        let r = alg.ring();
        let ts = adrep::torus_action(&alg, &grading, &h, &r.from_i64(t)).unwrap();
        let ss = adrep::torus_action(&alg, &grading, &h, &r.from_i64(s)).unwrap();
        let both = adrep::torus_action(&alg, &grading, &h, &r.from_i64(s * t)).unwrap();
        prop_assert_eq!(ts.mul(&ss), both);
    }

    #[test]
    fn boundary_squares_to_zero(c in complex_strategy(), ri in 0usize..4, dim in 1usize..3) {
        let ring = [Ring::Z, Ring::Q, field(2), field(5)][ri].clone();
        prop_assert!(chain_complex(&trivial_cosheaf(&c, &ring, dim)).squares_to_zero());
    }

    #[test]
    fn euler_characteristic_is_consistent(c in complex_strategy(), ri in 0usize..3) {
        let ring = [Ring::Q, field(2), field(3)][ri].clone();
        let h = homology(&chain_complex(&trivial_cosheaf(&c, &ring, 1))).unwrap();
        prop_assert_eq!(h.euler_chains, h.euler_homology);
        prop_assert_eq!(h.euler_chains, c.euler_characteristic());
    }

    #[test]
    fn cones_are_acyclic(c in complex_strategy()) {
        let cone = c.cone("apex");
        let h = homology(&chain_complex(&trivial_cosheaf(&cone, &Ring::Z, 1))).unwrap();
        prop_assert!(h.acyclic_above_zero());
        prop_assert_eq!(h.rank(0), 1);
    }

    #[test]
    fn integer_and_rational_ranks_agree_without_torsion(c in complex_strategy()) {
        let hz = homology(&chain_complex(&trivial_cosheaf(&c, &Ring::Z, 1))).unwrap();
        let hq = homology(&chain_complex(&trivial_cosheaf(&c, &Ring::Q, 1))).unwrap();
        if hz.degrees.iter().all(|d| d.torsion.is_empty()) {
            let a: Vec<usize> = hz.degrees.iter().map(|d| d.rank).collect();
            let b: Vec<usize> = hq.degrees.iter().map(|d| d.rank).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn generated_systems_are_consistent(n in 1usize..10, d in 1usize..4, seed in 0u64..10_000, ri in 0usize..3) {
        let ring = [Ring::Q, field(2), field(5)][ri].clone();
        let tree = cosheaf::random_tree(n, seed);
        let s = cosheaf::generate_geodesic_system(&tree, d, &ring, seed, true).unwrap();
        prop_assert!(cosheaf::validate_geodesic_system(&s).unwrap().valid);
        prop_assert!(cosheaf::validate_cosheaf(&cosheaf::idempotent_cosheaf(&s).unwrap()).valid);
        prop_assert_eq!(cosheaf::conjecture_probe(&s).unwrap().verdict, Verdict::Consistent);
    }

    #[test]
    fn trees_are_acyclic(n in 1usize..14, seed in 0u64..10_000) {
        let t = cosheaf::random_tree(n, seed);
        prop_assert!(t.is_tree());
        let h = homology(&chain_complex(&trivial_cosheaf(&t, &Ring::Z, 1))).unwrap();
        prop_assert!(h.acyclic_above_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn building_panels_are_regular(qi in 0usize..3, radius in 0usize..4, k in 0usize..2) {
        let q = [2u64, 3, 4][qi];
        let g = [catalog::a2(), catalog::generic33()][k].clone();
        let d = build_root_datum(&g, Variant::Minimal).unwrap();
        let b = davis::building_ball(&d, q, radius).unwrap();
        for p in b.panels() {
            prop_assert_eq!(p.size, q + 1);
            prop_assert_eq!(p.complete, p.chambers.len() as u64 == q + 1);
            prop_assert!(p.chambers.len() as u64 <= q + 1);
        }
        let mut by_len = std::collections::BTreeMap::new();
        for c in &b.chambers {
            *by_len.entry(c.distance).or_insert(0u64) += 1;
        }
        let ball = weyl::enumerate_weyl_ball(&d, radius).unwrap();
        for (l, count) in by_len {
            let weyl_count = ball.iter().filter(|w| w.length() == l).count() as u64;
            prop_assert_eq!(count, weyl_count * q.pow(l as u32));
        }
    }

    #[test]
    fn finite_davis_complexes_are_pure(k in 0usize..5) {
        let g = finite_gcm(k);
        let d = build_root_datum(&g, Variant::Minimal).unwrap();
        let w0 = weyl::longest_element(&d, &(0..g.n()).collect::<Vec<_>>()).unwrap();
        let dc = davis::coxeter_davis_ball(&d, w0.length()).unwrap();
        for f in dc.complex.facets() {
            prop_assert_eq!(f.len(), g.n() + 1);
        }
        let h = homology(&chain_complex(&trivial_cosheaf(&dc.complex, &Ring::Z, 1))).unwrap();
        prop_assert!(h.acyclic_above_zero());
    }

    #[test]
    fn generic_balls_are_trees(a in 2i64..6, b in 2i64..6, len in 1usize..6) {
        prop_assume!(a * b >= 4);
        let g = Gcm::new(&[vec![2, -a], vec![-b, 2]]).unwrap();
        let d = build_root_datum(&g, Variant::Minimal).unwrap();
        prop_assert!(davis::coxeter_davis_ball(&d, len).unwrap().complex.is_tree());
    }

    #[test]
    fn cli_reports_are_reproducible(seed in 0u64..1000, n in 2usize..9) {
        let n = n.to_string();
        let seed = seed.to_string();
        let args = ["kmkit", "geodesic", "probe", "--vertices", &n, "--dim", "3", "--seed", &seed, "--count", "3", "--archive", "/nonexistent"];
        let go = || {
            let mut out = Vec::new();
            let code = kmkit::cli::run(args, &mut out, &mut Vec::new());
            (code, out)
        };
        let first = go();
        prop_assert_eq!(first.0, 0);
        prop_assert_eq!(first, go());
    }
}
