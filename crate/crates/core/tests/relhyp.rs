mod common;

use proptest::prelude::*;
use rdbench::relhyp::*;
use rdbench::{enumerate_ball, Element, GroupModel};

const ZZ: &str = "free-product(free-abelian(1),free-abelian(1))";

fn zz() -> (GroupModel, PeripheralStructure) {
    let m = GroupModel::parse(ZZ).unwrap();
    let p = PeripheralStructure::parse(&m, "factors").unwrap();
    (m, p)
}

#[test]
fn entrance_and_exit() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let e = |s: &str| m.element(s).unwrap();
    let one = Element::identity();
    let a_coset = per.coset(0, &one);
    let side = geo.side(&one, &e("aaa"));
    let p = geo.entrance_exit(&side, &a_coset).unwrap();
    assert_eq!((p.entrance, p.exit), (one.clone(), e("aaa")));
    let side = geo.side(&e("b"), &e("a"));
    assert_eq!(side, vec![e("b"), one.clone(), e("a")]);
    let p = geo.entrance_exit(&side, &a_coset).unwrap();
    assert_eq!((p.entrance, p.exit), (one.clone(), e("a")));
    let far = per.coset(0, &e("bb"));
    assert!(geo.entrance_exit(&geo.side(&one, &e("a")), &far).is_none());
}

#[test]
fn central_cosets() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let e = |s: &str| m.element(s).unwrap();
    let one = Element::identity();
    let c = geo.find_central_coset(&one, &e("a"), &e("b")).unwrap();
    assert_eq!((c.coset.index, c.pair_distances), (0, [0, 0, 0]));
    let c = geo.find_central_coset(&one, &e("aaa"), &e("aaab")).unwrap();
    assert_eq!((c.coset.index, c.pair_distances), (0, [0, 0, 0]));
    let c = geo.find_central_coset(&one, &one, &one).unwrap();
    assert_eq!((c.coset.index, c.pair_distances), (0, [0, 0, 0]));
}

#[test]
fn verification_and_calibration() {
    let f = GroupModel::parse("free(2)").unwrap();
    let triv = PeripheralStructure::parse(&f, "trivial").unwrap();
    let ball = enumerate_ball(&f, 4).unwrap();
    let r = verify_star(&f, &triv, StarConstants::new(0, 1), &ball, 4, GeodesicMode::Canonical).unwrap();
    assert!(r.pass);
    let cal = calibrate_constants(&f, &triv, &ball, 4, 2, 2, GeodesicMode::Canonical).unwrap();
    assert_eq!(cal.constants, Some(StarConstants::new(0, 1)));

    let z = GroupModel::parse("free-abelian(2)").unwrap();
    let zt = PeripheralStructure::parse(&z, "trivial").unwrap();
    let zb = enumerate_ball(&z, 4).unwrap();
    let cal = calibrate_constants(&z, &zt, &zb, 4, 2, 2, GeodesicMode::Canonical).unwrap();
    assert_eq!(cal.constants, None);
    assert_eq!(cal.tried.len(), 9);
    let r = verify_star(&z, &zt, StarConstants::new(1, 1), &zb, 4, GeodesicMode::Canonical).unwrap();
    let again = verify_star(&z, &zt, StarConstants::new(1, 1), &zb, 4, GeodesicMode::Canonical).unwrap();
    assert!(!r.pass);
    assert_eq!(r.counterexample, again.counterexample);
}

#[test]
fn monotone_in_constants() {
    let z = GroupModel::parse("free-abelian(2)").unwrap();
    let zt = PeripheralStructure::parse(&z, "generator(a)").unwrap();
    let ball = enumerate_ball(&z, 3).unwrap();
    let mut grid = [[false; 4]; 4];
    for (s, row) in grid.iter_mut().enumerate() {
        for (d, cell) in row.iter_mut().enumerate() {
            *cell = verify_star(&z, &zt, StarConstants::new(s, d), &ball, 3, GeodesicMode::Canonical)
                .unwrap()
                .pass;
        }
    }
    for s in 0..4 {
        for d in 0..4 {
            if grid[s][d] {
                assert!(grid[s..].iter().all(|r| r[d..].iter().all(|&p| p)), "({s}, {d})");
            }
        }
    }
}

#[test]
fn decomposition_examples() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let e = |s: &str| m.element(s).unwrap();
    let one = Element::identity();
    let decs = geo.central_decompositions(&e("ab"), &e("a"));
    assert!(decs.iter().any(|d| d.g1 == one
        && d.g2 == e("b")
        && d.g3 == one
        && d.eta == e("a")
        && d.eta1 == e("a")
        && d.eta2 == one
        && d.index == 0));
    let decs = geo.central_decompositions(&e("aB"), &e("aB"));
    assert!(decs.iter().any(|d| d.eta2.is_identity()));
    let decs = geo.central_decompositions(&one, &one);
    assert_eq!(decs[0].index, 0);
    assert!([&decs[0].g1, &decs[0].g2, &decs[0].g3, &decs[0].eta]
        .iter()
        .all(|x| x.is_identity()));

    let ball = enumerate_ball(&m, 4).unwrap();
    let idx = decomposition_index(&geo, &ball, &e("ab"), 2, 1, 1).unwrap();
    assert!(idx.d_g().any(|t| t.g1 == one && t.eta == e("a") && t.g2 == e("b")));
    assert!(decomposition_index(&geo, &ball, &e("ab"), 2, 0, 1).unwrap().is_empty());
    assert!(!decomposition_index(&geo, &ball, &one, 0, 1, 1).unwrap().is_empty());
}

#[test]
fn decompositions_satisfy_identities() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let ball = enumerate_ball(&m, 3).unwrap();
    let kappa = geo.constants.kappa;
    for g in ball.elements() {
        for h in ball.elements() {
            let k = m.left_divide(h, g);
            for d in geo.central_decompositions(g, h) {
                let w = &d.witness;
                assert_eq!(m.mul(&m.mul(&d.g1, &d.eta), &d.g2), *g);
                assert_eq!(m.mul(&m.mul(&d.g1, &d.eta1), &d.g3), *h);
                assert_eq!(m.mul(&m.mul(&m.inverse(&d.g3), &d.eta2), &d.g2), k);
                assert_eq!(m.mul(&d.eta1, &d.eta2), d.eta);
                let pi = per.get(d.index);
                assert!(pi.contains(&d.eta) && pi.contains(&d.eta1) && pi.contains(&d.eta2));
                let u = m.mul(&d.g1, &d.eta);
                let v = m.mul(&d.g1, &d.eta1);
                assert!(m.distance(&d.g1, &w.a1) <= kappa && m.distance(&d.g1, &w.a2) <= kappa);
                assert!(m.distance(&u, &w.c1) <= kappa && m.distance(&u, &w.c2) <= kappa);
                assert!(m.distance(&v, &w.b1) <= kappa && m.distance(&v, &w.b2) <= kappa);
            }
        }
    }
}

/// Every `|D_g|` agrees with the tree oracle.
#[test]
fn decomposition_counts_match_tree_oracle() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let ball = enumerate_ball(&m, 4).unwrap();
    let oracle = common::dg_counts(4, 3);
    let mut checked = 0;
    for r1 in 0..=3usize {
        for r2 in 0..=4usize {
            for p in r1.abs_diff(r2)..=(r1 + r2).min(4) {
                let set = DeltaSet::build(&geo, &ball, p, r1, r2).unwrap();
                assert!(set.is_complete());
                for (g, idx) in &set.per_g {
                    let key = (p, r1, r2, m.format(g));
                    assert_eq!(idx.count(), oracle[&key], "{key:?}");
                    checked += 1;
                }
                let expected = oracle
                    .iter()
                    .filter(|((pp, a, b, _), n)| (*pp, *a, *b) == (p, r1, r2) && **n > 0)
                    .count();
                assert_eq!(set.per_g.values().filter(|i| i.count() > 0).count(), expected);
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn count_fit_on_zz() {
    let (m, per) = zz();
    let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
    let ball = enumerate_ball(&m, 4).unwrap();
    let fit = count_bound_fit(&geo, &ball, 4, 3, Some(3)).unwrap();
    assert!(fit.envelope.dominates(&fit.points()));
    assert_eq!(fit.incomplete_pairs, 0);
    // |D_g| is 18 for every g here; the fitted bound also covers the
    // right-hand multiplicity, which is 36·r1 + 54.
    assert!(fit.rows.iter().all(|r| r.max_left == 18));
    assert_eq!(
        fit.rows.iter().map(|r| r.max_right).collect::<Vec<_>>(),
        [54, 90, 126, 162]
    );
    assert_eq!((fit.envelope.c1, fit.envelope.c2), (36.0, 54.0));
    assert_eq!(common::max_dg_per_r1(4, 3), [18, 18, 18, 18]);

    let zero = count_bound_fit(&geo, &ball, 2, 0, None).unwrap();
    assert_eq!(zero.envelope.c2, zero.rows[0].observed as f64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn central_coset_conditions_hold(a in 0usize..161, b in 0usize..161, c in 0usize..161) {
        let (m, per) = zz();
        let ball = enumerate_ball(&m, 4).unwrap();
        let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
        let (x, y, z) = (ball.element(a), ball.element(b), ball.element(c));
        let found = geo.find_central_coset(x, y, z);
        prop_assert!(found.is_some());
        let cc = found.unwrap();
        prop_assert!(cc.pair_distances.iter().all(|&d| d < 1));
        prop_assert!(cc.point_distances.iter().all(|&d| d == 0));
        for p in cc.record.points() {
            prop_assert!(per.contains(&cc.coset, p));
        }
    }

    #[test]
    fn coset_keys_are_members(i in 0usize..2, idx in prop::collection::vec(0usize..4, 0..10)) {
        let (m, per) = zz();
        let letters: Vec<_> = m.letters().collect();
        let w: Vec<_> = idx.iter().map(|&k| letters[k]).collect();
        let g = m.normalize(&w).unwrap();
        let c = per.coset(i, &g);
        prop_assert!(per.contains(&c, &g));
        prop_assert!(per.contains(&c, &c.key));
        let tw: Vec<(usize, i64)> = {
            let mut v = Vec::new();
            for l in g.letters() {
                let (j, inv) = m.generator_of(*l);
                common::push(&mut v, j, if inv { -1 } else { 1 });
            }
            v
        };
        prop_assert_eq!(m.format(&c.key), common::to_string(&common::coset_rep(&tw, i)));
    }
}
