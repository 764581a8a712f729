use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::*;
use crate::gcm::{build_root_datum, catalog::*, Gcm, Variant};

fn datum(g: Gcm) -> RootDatum {
    build_root_datum(&g, Variant::Minimal).unwrap()
}

fn alg(g: Gcm, h: i64, ring: &Ring) -> GradedLieAlgebra {
    assemble_g(&datum(g), h, ring).unwrap()
}

/// Root multiplicities read off the denominator identity
/// `sum_w sign(w) e^{w rho - rho} = prod_a (1 - e^{-a})^{mult a}`, used as an
/// independent oracle for the Serre quotient: the coefficients of
/// `-log(lhs)` are `c_b = sum_k mult(b/k)/k`.
fn denominator_oracle(a: &Gcm, window: i64) -> BTreeMap<Vec<i64>, i64> {
    use crate::weyl::enumerate_weyl_ball;
    let n = a.n();
    let d = datum(a.clone());
    type Series = BTreeMap<Vec<i64>, BigRational>;
    let height = |v: &[i64]| v.iter().sum::<i64>();
    // X = 1 - lhs, keyed by rho - w rho in simple-root coordinates.
    let mut x: Series = BTreeMap::new();
    for w in enumerate_weyl_ball(&d, window as usize).unwrap() {
        let mut shift = vec![0i64; n];
        let mut u = crate::weyl::WeylElement::identity(&d);
        for &i in w.word() {
            let img = u.act(&(0..n).map(|k| (k == i) as i64).collect::<Vec<_>>());
            shift = shift.iter().zip(&img).map(|(s, t)| s + t).collect();
            u = u.mul(&d, &crate::weyl::simple_reflection(&d, i).unwrap());
        }
        if w.length() == 0 || height(&shift) > window {
            continue;
        }
        let sign = if w.length() % 2 == 0 { -1 } else { 1 };
        *x.entry(shift).or_insert_with(BigRational::zero) += BigRational::from_integer(sign.into());
    }
    let mul = |p: &Series, q: &Series| -> Series {
        let mut out = Series::new();
        for (a, x) in p {
            for (b, y) in q {
                let c: Vec<i64> = a.iter().zip(b).map(|(s, t)| s + t).collect();
                if height(&c) <= window {
                    *out.entry(c).or_insert_with(BigRational::zero) += x * y;
                }
            }
        }
        out
    };
    // -log(1 - X) = sum_k X^k / k.
    let mut c = Series::new();
    let mut pow = x.clone();
    for k in 1..=window {
        for (deg, v) in &pow {
            *c.entry(deg.clone()).or_insert_with(BigRational::zero) += v / BigRational::from_integer(k.into());
        }
        pow = mul(&pow, &x);
    }
    let mut mult: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for h in 1..=window {
        for beta in free::degrees_of_height(n, h) {
            let mut m = c.get(&beta).cloned().unwrap_or_else(BigRational::zero);
            for k in 2..=h {
                if beta.iter().all(|&x| x % k == 0) {
                    let sub: Vec<i64> = beta.iter().map(|x| x / k).collect();
                    m -= BigRational::from_integer(mult.get(&sub).copied().unwrap_or(0).into())
                        / BigRational::from_integer(k.into());
                }
            }
            assert!(m.is_integer(), "beta {beta:?}: {m}");
            let m: i64 = m.to_integer().try_into().unwrap();
            if m != 0 {
                mult.insert(beta, m);
            }
        }
    }
    mult
}

fn serre_mults(a: &Gcm, window: i64) -> BTreeMap<Vec<i64>, i64> {
    build_nplus_serre(a, window)
        .unwrap()
        .multiplicities()
        .into_iter()
        .map(|m| (m.root, m.mult as i64))
        .collect()
}

#[test]
fn multiplicities_match_denominator_oracle() {
    for (g, h) in [(a2(), 4), (b2(), 5), (g2(), 6), (affine_a1(), 7), (generic33(), 6), (a3(), 5)] {
        assert_eq!(serre_mults(&g, h), denominator_oracle(&g, h), "gcm {:?}", g.rows());
    }
    let affine_a2 = Gcm::new(&[vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap();
    assert_eq!(serre_mults(&affine_a2, 6), denominator_oracle(&affine_a2, 6));
}

#[test]
fn dimensions_of_finite_types() {
    assert_eq!(alg(a2(), 3, &Ring::Z).dim(), 8);
    assert_eq!(alg(b2(), 4, &Ring::Z).dim(), 10);
    assert_eq!(alg(g2(), 6, &Ring::Z).dim(), 14);
    assert!(alg(g2(), 6, &Ring::Z).is_exact());
    assert!(!alg(affine_a1(), 4, &Ring::Z).is_exact());
}

fn vec_of(alg: &GradedLieAlgebra, entries: &[(usize, i64)]) -> Vec<Scalar> {
    let mut v = vec![alg.ring().zero(); alg.dim()];
    for &(i, c) in entries {
        v[i] = alg.ring().from_i64(c);
    }
    v
}

fn value(b: Bracket) -> Vec<Scalar> {
    match b {
        Bracket::Value(v) => v,
        Bracket::Truncated => panic!("unexpected truncation"),
    }
}

#[test]
fn sl2_relations() {
    let g = alg(a1(), 2, &Ring::Z);
    assert_eq!(g.dim(), 3);
    let labels: Vec<_> = g.basis().iter().map(|l| l.label.clone()).collect();
    assert_eq!(labels, vec!["e[1]", "h1", "f[1]"]);
    let (e, h, f) = (0, 1, 2);
    assert_eq!(value(g.bracket(e, f)), vec_of(&g, &[(h, 1)]));
    assert_eq!(value(g.bracket(h, e)), vec_of(&g, &[(e, 2)]));
    assert_eq!(value(g.bracket(h, f)), vec_of(&g, &[(f, -2)]));
}

#[test]
fn defining_relations_hold() {
    for (gm, h) in [(a2(), 3), (g2(), 6), (affine_a1(), 5), (generic33(), 4), (a3(), 4)] {
        let g = alg(gm, h, &Ring::Z);
        let d = g.datum().clone();
        for i in 0..d.n() {
            for j in 0..d.n() {
                let v = value(g.bracket(g.e(i), g.f(j)));
                let expect: Vec<(usize, i64)> = if i == j {
                    (0..d.dim).map(|k| (g.cartan(k), d.coroots[i][k])).collect()
                } else {
                    Vec::new()
                };
                assert_eq!(v, vec_of(&g, &expect));
            }
            for k in 0..d.dim {
                let v = value(g.bracket(g.cartan(k), g.e(i)));
                assert_eq!(v, vec_of(&g, &[(g.e(i), d.roots[i][k])]));
                let v = value(g.bracket(g.cartan(k), g.f(i)));
                assert_eq!(v, vec_of(&g, &[(g.f(i), -d.roots[i][k])]));
            }
        }
    }
}

#[test]
fn serre_relations_and_affine_brackets() {
    let g = alg(a2(), 3, &Ring::Z);
    let e12 = value(g.bracket(g.e(0), g.e(1)));
    assert!(e12.iter().any(|x| !g.ring().is_zero(x)));
    let target = g.indices(&[1, 1])[0];
    let m = g.ad_of(&e12);
    assert!(m.apply(&vec_of(&g, &[(g.e(1), 1)])).iter().all(|x| g.ring().is_zero(x)));
    assert!(!g.ring().is_zero(&e12[target]));

    let g = alg(affine_a1(), 4, &Ring::Z);
    let x = value(g.bracket(g.e(0), g.e(1)));
    assert_eq!(g.indices(&[1, 1]).len(), 1);
    assert!(!g.ring().is_zero(&x[g.indices(&[1, 1])[0]]));
    let y = value(g.bracket(g.f(0), g.f(1)));
    let z = g.ad_of(&x).apply(&y);
    let cartan: Vec<usize> = (0..g.datum().dim).map(|k| g.cartan(k)).collect();
    assert!(z.iter().enumerate().all(|(i, s)| cartan.contains(&i) || g.ring().is_zero(s)));
    assert!(cartan.iter().any(|&i| !g.ring().is_zero(&z[i])));
}

fn in_window(g: &GradedLieAlgebra, deg: &[i64]) -> bool {
    g.in_window(deg)
}

fn sum(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn jacobi_and_grading() {
    for (gm, h) in [(a2(), 3), (g2(), 6), (affine_a1(), 6), (generic33(), 4)] {
        let g = alg(gm, h, &Ring::Z);
        let n = g.dim();
        let ad: Vec<&SparseOp<BigInt>> = (0..n).map(|a| g.ad_integer(a)).collect();
        // Grading.
        for a in 0..n {
            for (i, j, _) in ad[a].entries() {
                assert_eq!(g.degree(i), sum(g.degree(a), g.degree(j)).as_slice());
            }
        }
        // Antisymmetry.
        for a in 0..n {
            for b in 0..n {
                let ab: BTreeMap<usize, BigInt> = ad[a].column(b).iter().cloned().collect();
                let ba: BTreeMap<usize, BigInt> = ad[b].column(a).iter().map(|(i, x)| (*i, -x)).collect();
                if in_window(&g, &sum(g.degree(a), g.degree(b))) {
                    assert_eq!(ab, ba);
                }
            }
        }
        // Jacobi on triples whose partial brackets stay in the window.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (da, db, dc) = (g.degree(a), g.degree(b), g.degree(c));
                    let total = sum(&sum(da, db), dc);
                    if ![sum(da, db), sum(db, dc), sum(da, dc), total].iter().all(|x| in_window(&g, x)) {
                        continue;
                    }
                    let one = |x: usize, y: usize, z: usize| ad[x].apply(ad[y].column(z));
                    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for v in [one(a, b, c), one(b, c, a), one(c, a, b)] {
                        for (i, x) in v {
                            *acc.entry(i).or_insert_with(BigInt::zero) += x;
                        }
                    }
                    assert!(acc.values().all(Zero::is_zero), "Jacobi fails on {a},{b},{c}");
                }
            }
        }
    }
}

#[test]
fn real_root_spaces_are_lines() {
    for (gm, h) in [(g2(), 6), (affine_a1(), 6), (generic33(), 5)] {
        let g = alg(gm, h, &Ring::Z);
        for r in g.real_roots() {
            assert_eq!(g.indices(&r.coords).len(), 1);
            let e = g.root_vector(&r.coords).unwrap();
            let neg: Vec<i64> = r.coords.iter().map(|x| -x).collect();
            let f = g.root_vector(&neg).unwrap();
            let hv = g.coroot_vector(&r.coords).unwrap();
            let expect: Vec<(usize, i64)> = hv.iter().enumerate().map(|(k, &x)| (g.cartan(k), x)).collect();
            assert_eq!(value(g.bracket(e, f)), vec_of(&g, &expect));
        }
    }
}

#[test]
fn divided_powers_are_integral() {
    for (gm, h) in [(a2(), 6), (g2(), 6), (affine_a1(), 6)] {
        let g = alg(gm, h, &Ring::Z);
        for r in g.real_roots().to_vec() {
            let neg: Vec<i64> = r.coords.iter().map(|x| -x).collect();
            for root in [r.coords.clone(), neg] {
                for n in 0..=4 {
                    divided_power_ad(&g, &root, n).unwrap();
                }
            }
        }
    }
}

#[test]
fn sl2_divided_square() {
    let g = alg(a1(), 2, &Ring::Z);
    let op = divided_power_ad(&g, &[1], 2).unwrap();
    assert!(op.string_complete);
    let image = op.matrix.apply(&vec_of(&g, &[(2, 1)]));
    assert_eq!(image, vec_of(&g, &[(0, -1)]));
    assert!(divided_power_ad(&g, &[1], 3).unwrap().matrix.is_zero());
    assert!(divided_power_ad(&g, &[2], 1).is_err());
}

#[test]
fn a2_divided_square_on_negative_string() {
    let g = alg(a2(), 3, &Ring::Z);
    let op = divided_power_ad(&g, &[1, 0], 2).unwrap();
    let x = g.indices(&[-1, -1])[0];
    let img = op.matrix.apply(&vec_of(&g, &[(x, 1)]));
    assert!(img.iter().all(|s| g.ring().is_zero(s)));
}

#[test]
fn string_completeness() {
    let g = alg(affine_a1(), 4, &Ring::Z);
    assert!(!g.string_complete(&[1, 0]));
    let g = alg(a2(), 2, &Ring::Z);
    assert!(!g.is_exact());
    assert!(!g.string_complete(&[1, 0]));
    let g = alg(a2(), 3, &Ring::Z);
    assert!(g.string_complete(&[1, 0]));
}

#[test]
fn base_change_examples() {
    let g = alg(a1(), 2, &Ring::prime_field(2).unwrap());
    assert!(value(g.bracket(1, 0)).iter().all(|x| g.ring().is_zero(x)));
    let g = alg(a2(), 3, &Ring::prime_field(5).unwrap());
    assert_eq!(g.dim(), 8);
    let g = alg(affine_a1(), 4, &Ring::prime_field(3).unwrap());
    assert_eq!(g.graded_dims(), &[2, 1, 2, 1]);
    assert!(g.base_change(&Ring::Q).is_err());
}

#[test]
fn p_operation_rules() {
    let p = 5;
    let g = alg(a2(), 3, &Ring::prime_field(p).unwrap());
    let fp = Ring::prime_field(p).unwrap();
    for a in 0..g.dim() {
        let y = p_operation(&g, a, p).unwrap();
        let lhs = g.ad_of(&y);
        let rhs = g.ad_matrix(a).pow(p as u32);
        assert_eq!(lhs, rhs);
        if g.basis()[a].part == Part::Cartan {
            assert!(fp.is_one(&y[a]));
        } else {
            assert!(y.iter().all(|s| fp.is_zero(s)));
        }
    }
}

#[test]
fn p_operation_on_imaginary_vectors() {
    let p = 3;
    let g = alg(affine_a1(), 6, &Ring::prime_field(p).unwrap());
    let x = g.indices(&[1, 1])[0];
    let y = p_operation(&g, x, p).unwrap();
    let lhs = g.ad_of(&y);
    let rhs = g.ad_matrix(x).pow(p as u32);
    assert_eq!(lhs, rhs);
    let target = g.indices(&[3, 3])[0];
    assert!(!g.ring().is_zero(&y[target]));
    let g = alg(affine_a1(), 4, &Ring::prime_field(p).unwrap());
    let x = g.indices(&[1, 1])[0];
    assert!(matches!(p_operation(&g, x, p), Err(Error::WindowExceeded(_))));
    let ps = p_structure(&g, p).unwrap();
    assert_eq!(ps.entries.iter().filter(|e| e.status == "window-exceeded").count(), 4);
}

#[test]
fn dump_is_deterministic() {
    let g = alg(a2(), 3, &Ring::Z);
    let a = serde_json::to_string(&g.dump()).unwrap();
    let b = serde_json::to_string(&alg(a2(), 3, &Ring::Z).dump()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"dim\":8"));
}
