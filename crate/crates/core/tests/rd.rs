use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use rdbench::rd::*;
use rdbench::seed::rng_for;
use rdbench::{enumerate_ball, Element, GroupModel};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Free reduction on strings over `aAbB`.
fn reduce(s: &str) -> String {
    let mut st: Vec<char> = Vec::new();
    for c in s.chars() {
        let inv = if c.is_ascii_lowercase() {
            c.to_ascii_uppercase()
        } else {
            c.to_ascii_lowercase()
        };
        if st.last() == Some(&inv) {
            st.pop();
        } else {
            st.push(c);
        }
    }
    st.into_iter().collect()
}

fn word(m: &GroupModel, e: &Element) -> String {
    let s = m.format(e);
    if s == "1" {
        String::new()
    } else {
        s
    }
}

#[test]
fn sphere_indicator_squares() {
    let m = GroupModel::parse("free(2)").unwrap();
    let ball = enumerate_ball(&m, 2).unwrap();
    let chi: FiniteFunction<BigRational> = FiniteFunction::indicator(&m, ball.sphere(1));
    let sq = convolve(&m, &chi, &chi).unwrap();
    assert_eq!(sq.len(), 13);
    assert_eq!(sq.value(&Element::identity()), q(4, 1));
    for e in ball.sphere(2) {
        assert_eq!(sq.value(e), q(1, 1), "{}", m.format(e));
    }

    let z = GroupModel::parse("free-abelian(1)").unwrap();
    let zb = enumerate_ball(&z, 1).unwrap();
    let chi: FiniteFunction<BigRational> = FiniteFunction::indicator(&z, zb.sphere(1));
    let sq = convolve(&z, &chi, &chi).unwrap();
    let e = |s: &str| z.element(s).unwrap();
    assert_eq!(sq.value(&Element::identity()), q(2, 1));
    assert_eq!((sq.value(&e("aa")), sq.value(&e("AA"))), (q(1, 1), q(1, 1)));
    assert_eq!(sq.len(), 3);
}

fn random_rational<R: Rng>(m: &GroupModel, support: &[Element], rng: &mut R) -> FiniteFunction<BigRational> {
    let mut pairs = Vec::new();
    for e in support {
        if rng.gen_bool(0.6) {
            pairs.push((e.clone(), q(rng.gen_range(-9..=9), rng.gen_range(1..=7))));
        }
    }
    FiniteFunction::from_pairs(m, pairs)
}

/// Sphere decomposition of the square norm is exact, and convolution agrees
/// with concatenation plus free reduction.
#[test]
fn rational_pairs_are_exact() {
    let m = GroupModel::parse("free(2)").unwrap();
    let ball = enumerate_ball(&m, 3).unwrap();
    let support = ball.sub_ball(3);
    for n in 0..100 {
        let mut rng = rng_for(5, &format!("rd-test/{n}"));
        let x = random_rational(&m, support, &mut rng);
        let y = random_rational(&m, support, &mut rng);
        let xy = convolve(&m, &x, &y).unwrap();
        let by_sphere = (0..=6).fold(q(0, 1), |acc, p| acc + restrict_sphere(&xy, p).norm_sq_exact());
        assert_eq!(xy.norm_sq_exact(), by_sphere);

        let mut naive: BTreeMap<String, BigRational> = BTreeMap::new();
        for (h, a) in x.iter() {
            for (k, b) in y.iter() {
                let g = reduce(&(word(&m, h) + &word(&m, k)));
                *naive.entry(g).or_insert_with(|| q(0, 1)) += a * b;
            }
        }
        naive.retain(|_, v| *v != q(0, 1));
        let got: BTreeMap<String, BigRational> = xy.iter().map(|(e, v)| (word(&m, e), v.clone())).collect();
        assert_eq!(got, naive, "pair {n}");
    }
}

#[test]
fn op_norm_on_the_line() {
    let m = GroupModel::parse("free-abelian(1)").unwrap();
    let ball = enumerate_ball(&m, 31).unwrap();
    let x: FiniteFunction<f64> = FiniteFunction::indicator(&m, ball.sphere(1));
    let mut prev = 0.0;
    for r in [1, 2, 5, 10, 20, 30] {
        let est = op_norm_lower(&m, &ball, &x, r, OPNORM_TOLERANCE).unwrap();
        // Largest singular value of the path incidence from B(R) to B(R+1).
        let exact = (2.0 + 2.0 * (std::f64::consts::PI / (r as f64 + 2.0)).cos()).sqrt();
        assert!(est.converged);
        assert!(est.value <= exact + 1e-9, "R = {r}");
        assert!(exact - est.value < 1e-4, "R = {r}: {} vs {exact}", est.value);
        assert!(est.value >= prev);
        prev = est.value;
    }
    assert!(op_norm_lower(&m, &ball, &x, 31, 1e-8).is_err());
}

#[test]
fn op_norm_on_free_group() {
    let m = GroupModel::parse("free(2)").unwrap();
    let ball = enumerate_ball(&m, 7).unwrap();
    let x: FiniteFunction<f64> = FiniteFunction::indicator(&m, ball.sphere(1));
    let limit = 2.0 * 3f64.sqrt();
    let mut prev = 0.0;
    for r in 1..=6 {
        let est = op_norm_lower(&m, &ball, &x, r, OPNORM_TOLERANCE).unwrap();
        assert!(est.value <= limit + 1e-9 && est.value >= prev);
        prev = est.value;
    }
    let zero = FiniteFunction::<f64>::zero(&m);
    assert_eq!(op_norm_lower(&m, &ball, &zero, 3, 1e-8).unwrap().value, 0.0);
}

#[test]
fn best_matches_brute() {
    let z = GroupModel::parse("free-abelian(1)").unwrap();
    let zb = enumerate_ball(&z, 6).unwrap();
    let f = GroupModel::parse("free(2)").unwrap();
    let fb = enumerate_ball(&f, 2).unwrap();
    let mut cases = Vec::new();
    for r1 in 0..=3usize {
        for r2 in 0..=3usize {
            for p in r1.abs_diff(r2)..=r1 + r2 {
                cases.push((&z, &zb, r1, r2, p));
            }
        }
    }
    for p in 0..=2 {
        cases.push((&f, &fb, 1, 1, p));
    }
    for (m, ball, r1, r2, p) in cases {
        let t = SphereTensor::build(m, ball, r1, r2, p).unwrap();
        let est = best_constant(m, &t, 20, DEFAULT_TOLERANCE, 3);
        let brute = brute_constant(&t, 12).unwrap();
        assert!(
            (est.lower - brute).abs() < 1e-4,
            "({r1},{r2},{p}) {} vs {brute}",
            est.lower
        );
        assert!(est.lower <= est.upper + 1e-12);
    }
}

/// On `Z²` with both inputs on `S(1)`, the best `p = 2` value is `√(3/2)`,
/// reached at `x = y = (δ_a + δ_b)/√2`.
#[test]
fn small_profiles() {
    let z = GroupModel::parse("free-abelian(2)").unwrap();
    let ball = enumerate_ball(&z, 2).unwrap();
    let t = SphereTensor::build(&z, &ball, 1, 1, 2).unwrap();
    let est = best_constant(&z, &t, 20, DEFAULT_TOLERANCE, 0);
    assert!((est.lower - 1.5f64.sqrt()).abs() < 1e-6, "{}", est.lower);
    let prof = rd_profile(&z, &ball, 1, 20, DEFAULT_TOLERANCE, 7).unwrap();
    assert!((prof.constants[0].1 - 1.0).abs() < 1e-9);
    assert!((prof.constants[1].1 - 1.5f64.sqrt()).abs() < 1e-6);

    let f = GroupModel::parse("free(2)").unwrap();
    let fb = enumerate_ball(&f, 4).unwrap();
    let prof = rd_profile(&f, &fb, 2, 10, DEFAULT_TOLERANCE, 7).unwrap();
    for (r, c, up) in prof.constants {
        assert!(c <= 1.0 + 1e-6 && c <= up + 1e-12, "r = {r}: {c}");
    }
    assert!(rd_profile(&f, &fb, 3, 1, 1e-6, 0).is_err());
}

#[test]
fn assembled_polynomials() {
    let p = assemble_p(&[PolynomialBound::linear(1.0, 1.0)], 1);
    assert_eq!(p.eval(2.0), 26.0);
    assert_eq!(
        assemble_p(&vec![PolynomialBound::constant(1.0); 2], 4).coeffs,
        vec![3.0]
    );
    assert_eq!(assemble_p(&[], 3).eval(10.0), 1.0);
}

#[test]
fn complex_reduction_examples() {
    let m = GroupModel::parse("free(2)").unwrap();
    let ball = enumerate_ball(&m, 2).unwrap();
    let x: FiniteFunction<f64> = FiniteFunction::indicator(&m, ball.sphere(1));
    let psi: FiniteFunction<Complex64> = FiniteFunction::indicator(&m, ball.sphere(2));
    let rep = complex_reduction_check(&m, &x, &psi, 2.0).unwrap();
    assert!(rep.pass());
    assert_eq!(rep.part_norms[1..], [0.0; 3]);
    assert!((rep.lhs - rep.part_values[0]).abs() < 1e-12);

    let neg = psi.map(|v| -v);
    let rep2 = complex_reduction_check(&m, &x, &neg, 2.0).unwrap();
    assert!(rep2.pass());
    assert_eq!(rep2.part_values[1], rep.part_values[0]);
    assert!(complex_reduction_check(&m, &x.map(|v| -v), &psi, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lower_never_exceeds_upper(seed in any::<u64>(), r1 in 0usize..3, r2 in 0usize..3, dp in 0usize..5) {
        let m = GroupModel::parse("free-product(free-abelian(1),free-abelian(1))").unwrap();
        let ball = enumerate_ball(&m, 4).unwrap();
        let p = r1.abs_diff(r2) + dp.min(2 * r1.min(r2));
        let t = SphereTensor::build(&m, &ball, r1, r2, p).unwrap();
        let est = best_constant(&m, &t, 3, 1e-8, seed);
        prop_assert!(est.lower >= 0.0 && est.lower <= est.upper + 1e-12);
        prop_assert!(est.upper <= est.bounds.young + 1e-12);
    }

    #[test]
    fn parts_recombine(vals in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 5)) {
        let m = GroupModel::parse("free(2)").unwrap();
        let ball = enumerate_ball(&m, 1).unwrap();
        let phi = FiniteFunction::from_pairs(
            &m,
            ball.elements().iter().cloned().zip(vals.iter().map(|&(a, b)| Complex64::new(a, b))),
        );
        let [p1, p2, p3, p4] = nonnegative_parts(&phi);
        for e in ball.elements() {
            let back = Complex64::new(p1.value(e) - p2.value(e), p3.value(e) - p4.value(e));
            prop_assert_eq!(back, phi.value(e));
        }
    }
}
