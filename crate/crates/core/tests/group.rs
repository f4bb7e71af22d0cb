use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use rdbench::group::growth_function;
use rdbench::{enumerate_ball, Element, GroupModel, Letter};

const FAMILIES: [&str; 6] = [
    "free(2)",
    "free-abelian(2)",
    "free-product(free-abelian(1),free-abelian(1))",
    "cyclic(5)",
    "direct-product(free(1),cyclic(3))",
    "free-product(cyclic(2),cyclic(3))",
];

fn model(i: usize) -> GroupModel {
    GroupModel::parse(FAMILIES[i]).unwrap()
}

fn word(m: &GroupModel, idx: &[usize]) -> Vec<Letter> {
    let letters: Vec<Letter> = m.letters().collect();
    idx.iter().map(|&i| letters[i % letters.len()]).collect()
}

/// Free reduction with letters `2j` and `2j+1` mutually inverse.
fn free_reduce(w: &[Letter]) -> Vec<u16> {
    let mut st: Vec<u16> = Vec::new();
    for l in w {
        if st.last() == Some(&(l.0 ^ 1)) {
            st.pop();
        } else {
            st.push(l.0);
        }
    }
    st
}

/// Exponent sums per generator.
fn exponents(w: &[Letter], rank: usize) -> Vec<i64> {
    let mut v = vec![0; rank];
    for l in w {
        v[l.0 as usize / 2] += if l.0 % 2 == 0 { 1 } else { -1 };
    }
    v
}

/// BFS over the Cayley graph, keyed by the model's elements but measuring
/// edges only.
fn bfs_distances(m: &GroupModel, r: usize) -> HashMap<Element, usize> {
    let mut dist = HashMap::new();
    dist.insert(Element::identity(), 0);
    let mut q = VecDeque::from([Element::identity()]);
    while let Some(x) = q.pop_front() {
        let d = dist[&x];
        if d == r {
            continue;
        }
        for l in m.letters() {
            let y = m.mul_letter(&x, l);
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

#[test]
fn documented_examples() {
    let f = GroupModel::parse("free(2)").unwrap();
    let z = GroupModel::parse("free-abelian(2)").unwrap();
    let e = |m: &GroupModel, s: &str| m.element(s).unwrap();
    assert_eq!(f.format(&e(&f, "aAb")), "b");
    assert_eq!(z.format(&e(&z, "aba")), "aab");
    assert!(e(&f, "").is_identity());
    assert!(f.mul(&e(&f, "a"), &e(&f, "A")).is_identity());
    assert_eq!(f.format(&f.mul(&e(&f, "a"), &e(&f, "b"))), "ab");
    assert_eq!(z.mul(&e(&z, "a"), &e(&z, "b")), e(&z, "ab"));
    assert_eq!(f.format(&f.inverse(&e(&f, "ab"))), "BA");
    assert_eq!(z.inverse(&e(&z, "aaabbbb")), e(&z, "AAABBBB"));
    assert_eq!(z.word_length(&e(&z, "aaabbbb")), 7);
    assert_eq!(f.word_length(&e(&f, "abA")), 3);

    let b = enumerate_ball(&f, 2).unwrap();
    assert_eq!((b.sphere_size(1), b.sphere_size(2)), (4, 12));
    assert_eq!(enumerate_ball(&z, 3).unwrap().sphere_size(3), 12);
    assert_eq!(enumerate_ball(&f, 0).unwrap().len(), 1);

    let bz = enumerate_ball(&z, 2).unwrap();
    assert_eq!(z.format_word(&bz.canonical_geodesic(&e(&z, "ba")).unwrap()), "ab");
    assert_eq!(f.format_word(&b.canonical_geodesic(&e(&f, "ab")).unwrap()), "ab");
    assert!(b.canonical_geodesic(&Element::identity()).unwrap().is_empty());

    assert_eq!(growth_function(&z, 2).unwrap(), 13);
    assert_eq!(growth_function(&f, 1).unwrap(), 5);
    assert_eq!(growth_function(&z, 0).unwrap(), 1);
}

#[test]
fn sphere_sizes_match_closed_forms() {
    let f3 = enumerate_ball(&GroupModel::parse("free(3)").unwrap(), 5).unwrap();
    for k in 1..=5 {
        assert_eq!(f3.sphere_size(k), 6 * 5usize.pow(k as u32 - 1));
    }
    let z2 = enumerate_ball(&GroupModel::parse("free-abelian(2)").unwrap(), 8).unwrap();
    for k in 1..=8 {
        assert_eq!(z2.sphere_size(k), 4 * k);
    }
    // Lattice points of Z³ with |x|₁ = k, counted directly.
    let z3 = enumerate_ball(&GroupModel::parse("free-abelian(3)").unwrap(), 6).unwrap();
    for k in 0..=6i64 {
        let mut n = 0;
        for x in -k..=k {
            for y in -k..=k {
                let rest = k - x.abs() - y.abs();
                n += match rest {
                    r if r < 0 => 0,
                    0 => 1,
                    _ => 2,
                };
            }
        }
        assert_eq!(z3.sphere_size(k as usize), n, "k = {k}");
    }
    let c7 = enumerate_ball(&GroupModel::parse("cyclic(7)").unwrap(), 4).unwrap();
    assert_eq!(c7.len(), 7);
    assert_eq!((0..=4).map(|k| c7.sphere_size(k)).collect::<Vec<_>>(), [1, 2, 2, 2, 0]);
}

#[test]
fn bfs_distance_is_word_length() {
    for (i, r) in [(0, 6), (1, 7), (2, 6), (3, 4), (4, 5), (5, 7)] {
        let m = model(i);
        let ball = enumerate_ball(&m, r).unwrap();
        let dist = bfs_distances(&m, r);
        assert_eq!(dist.len(), ball.len(), "{}", FAMILIES[i]);
        for (rank, e) in ball.elements().iter().enumerate() {
            assert_eq!(dist[e], e.len());
            assert_eq!(ball.length(rank), e.len());
            if let Some((p, l)) = ball.parent(rank) {
                assert_eq!(ball.length(p) + 1, e.len());
                assert_eq!(m.mul_letter(ball.element(p), l), *e);
            }
        }
        for w in ball.elements().windows(2) {
            assert!(w[0].len() < w[1].len() || w[0] < w[1]);
        }
    }
}

proptest! {
    #[test]
    fn normal_form_is_idempotent(i in 0..FAMILIES.len(), idx in prop::collection::vec(0usize..8, 0..24)) {
        let m = model(i);
        let e = m.normalize(&word(&m, &idx)).unwrap();
        prop_assert_eq!(m.normalize(&e).unwrap(), e);
    }

    #[test]
    fn product_depends_on_normal_forms(
        i in 0..FAMILIES.len(),
        u in prop::collection::vec(0usize..8, 0..16),
        v in prop::collection::vec(0usize..8, 0..16),
    ) {
        let m = model(i);
        let (wu, wv) = (word(&m, &u), word(&m, &v));
        let joined: Vec<Letter> = wu.iter().chain(&wv).copied().collect();
        let nu = m.normalize(&wu).unwrap();
        let nv = m.normalize(&wv).unwrap();
        prop_assert_eq!(m.normalize(&joined).unwrap(), m.mul(&nu, &nv));
    }

    #[test]
    fn group_axioms(
        i in 0..FAMILIES.len(),
        a in prop::collection::vec(0usize..8, 0..12),
        b in prop::collection::vec(0usize..8, 0..12),
        c in prop::collection::vec(0usize..8, 0..12),
    ) {
        let m = model(i);
        let [x, y, z] = [a, b, c].map(|w| m.normalize(&word(&m, &w)).unwrap());
        prop_assert_eq!(m.mul(&m.mul(&x, &y), &z), m.mul(&x, &m.mul(&y, &z)));
        prop_assert!(m.mul(&x, &m.inverse(&x)).is_identity());
        prop_assert_eq!(m.mul(&x, &Element::identity()), x.clone());
        // Length axioms.
        prop_assert!(m.word_length(&m.mul(&x, &y)) <= x.len() + y.len());
        prop_assert_eq!(m.word_length(&m.inverse(&x)), x.len());
        prop_assert_eq!(m.distance(&x, &y), m.word_length(&m.left_divide(&x, &y)));
    }

    #[test]
    fn free_normal_form_is_free_reduction(idx in prop::collection::vec(0usize..4, 0..30)) {
        let m = GroupModel::parse("free(2)").unwrap();
        let w = word(&m, &idx);
        let e = m.normalize(&w).unwrap();
        prop_assert_eq!(e.letters().iter().map(|l| l.0).collect::<Vec<_>>(), free_reduce(&w));
    }

    #[test]
    fn abelian_length_is_l1(idx in prop::collection::vec(0usize..6, 0..30)) {
        let m = GroupModel::parse("free-abelian(3)").unwrap();
        let w = word(&m, &idx);
        let e = m.normalize(&w).unwrap();
        let v = exponents(&w, 3);
        prop_assert_eq!(e.len() as i64, v.iter().map(|x| x.abs()).sum::<i64>());
        prop_assert_eq!(exponents(e.letters(), 3), v);
    }

    #[test]
    fn cyclic_length(k in 0usize..40, n in 2u64..12) {
        let m = GroupModel::parse(&format!("cyclic({n})")).unwrap();
        let e = m.normalize(&vec![m.letter(0, false).unwrap(); k]).unwrap();
        let r = k as u64 % n;
        prop_assert_eq!(e.len() as u64, r.min(n - r));
    }
}
