use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Family, GroupModel};
use crate::relhyp::{CentralDecomposition, StarGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TMapKind {
    Z2Median,
    PolygrowthShortestSide,
    DerivedFromStar,
}

impl TMapKind {
    pub fn name(self) -> &'static str {
        match self {
            TMapKind::Z2Median => "z2-median",
            TMapKind::PolygrowthShortestSide => "polygrowth-shortest-side",
            TMapKind::DerivedFromStar => "derived-from-star",
        }
    }
}

/// `T(g, h) = (a, g′, h′)` with `(g′, h′) ∈ H_i × H_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TValue {
    pub a: Element,
    pub g1: Element,
    pub h1: Element,
    pub index: usize,
}

/// A concrete map `T` on `G × G`.
#[derive(Clone, Debug)]
pub enum TMap<'a> {
    Z2 { model: &'a GroupModel },
    Polygrowth { model: &'a GroupModel },
    FromStar { geo: StarGeometry<'a> },
}

impl<'a> TMap<'a> {
    pub fn z2(model: &'a GroupModel) -> Result<Self> {
        if model.family() != &Family::FreeAbelian(2) {
            return Err(Error::usage(format!(
                "the median map needs free-abelian(2), not {}",
                model.descriptor()
            )));
        }
        Ok(TMap::Z2 { model })
    }

    pub fn polygrowth(model: &'a GroupModel) -> Self {
        TMap::Polygrowth { model }
    }

    pub fn from_star(geo: StarGeometry<'a>) -> Self {
        TMap::FromStar { geo }
    }

    pub fn kind(&self) -> TMapKind {
        match self {
            TMap::Z2 { .. } => TMapKind::Z2Median,
            TMap::Polygrowth { .. } => TMapKind::PolygrowthShortestSide,
            TMap::FromStar { .. } => TMapKind::DerivedFromStar,
        }
    }

    pub fn model(&self) -> &'a GroupModel {
        match self {
            TMap::Z2 { model } | TMap::Polygrowth { model } => model,
            TMap::FromStar { geo } => geo.model,
        }
    }

    pub fn eval(&self, g: &Element, h: &Element) -> Result<TValue> {
        match self {
            TMap::Z2 { model } => tmap_z2(model, g, h),
            TMap::Polygrowth { model } => Ok(tmap_polygrowth(model, g, h)),
            TMap::FromStar { geo } => tmap_from_star(geo, g, h),
        }
    }
}

fn z2_coords(model: &GroupModel, e: &Element) -> [i64; 2] {
    let mut v = [0i64; 2];
    for &l in e.iter() {
        let (j, inv) = model.generator_of(l);
        v[j] += if inv { -1 } else { 1 };
    }
    v
}

fn z2_element(model: &GroupModel, v: [i64; 2]) -> Element {
    let mut cur = model.cursor(&Element::identity());
    for (j, &x) in v.iter().enumerate() {
        let l = model.letter(j, x < 0).expect("generator exists");
        for _ in 0..x.unsigned_abs() {
            cur.push(l);
        }
    }
    cur.element()
}

fn median(a: i64, b: i64, c: i64) -> i64 {
    a.max(b).min(a.min(b).max(c))
}

/// Coordinatewise median of `0`, `g` and `h` in `Z²`.
pub fn tmap_z2(model: &GroupModel, g: &Element, h: &Element) -> Result<TValue> {
    if model.family() != &Family::FreeAbelian(2) {
        return Err(Error::usage(format!(
            "the median map needs free-abelian(2), not {}",
            model.descriptor()
        )));
    }
    let (u, v) = (z2_coords(model, g), z2_coords(model, h));
    let m = [median(0, u[0], v[0]), median(0, u[1], v[1])];
    Ok(TValue {
        a: z2_element(model, m),
        g1: Element::identity(),
        h1: Element::identity(),
        index: 0,
    })
}

const RELABELINGS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Evaluates `centers` on the ShortLex-least relabeling `(1, U, V)` of the
/// triangle `(1, g, h)` and transports the three centers back. `centers`
/// returns one point per vertex of `(1, U, V)` and a peripheral index.
fn equivariant(
    model: &GroupModel,
    g: &Element,
    h: &Element,
    centers: impl Fn(&Element, &Element) -> Result<([Element; 3], usize)>,
) -> Result<TValue> {
    let verts = [Element::identity(), g.clone(), h.clone()];
    let (perm, u, v) = RELABELINGS
        .iter()
        .map(|p| {
            let base = &verts[p[0]];
            (
                p,
                model.left_divide(base, &verts[p[1]]),
                model.left_divide(base, &verts[p[2]]),
            )
        })
        .min_by(|x, y| (&x.1, &x.2).cmp(&(&y.1, &y.2)))
        .expect("six relabelings");
    let (c, index) = centers(&u, &v)?;
    let base = &verts[perm[0]];
    let mut back: [Element; 3] = Default::default();
    for k in 0..3 {
        back[perm[k]] = model.mul(base, &c[k]);
    }
    let a = back[0].clone();
    Ok(TValue {
        g1: model.left_divide(&a, &back[1]),
        h1: model.left_divide(&a, &back[2]),
        a,
        index,
    })
}

/// Picks a shortest side of `(1, g, h)` and returns its end farther from the
/// third vertex. Ties fall back to "`g` when `g` is one of its ends, else
/// `1`", applied in the canonical relabeling.
pub fn tmap_polygrowth(model: &GroupModel, g: &Element, h: &Element) -> TValue {
    equivariant(model, g, h, |u, v| {
        let one = Element::identity();
        // Sides [1,U], [1,V], [U,V] with their ends and opposite vertex.
        let sides = [(&one, u, v), (&one, v, u), (u, v, &one)];
        let len = |s: &(&Element, &Element, &Element)| model.distance(s.0, s.1);
        let (p, q, w) = sides.iter().min_by_key(|s| len(s)).expect("three sides");
        let (dp, dq) = (model.distance(w, p), model.distance(w, q));
        let a = match dp.cmp(&dq) {
            std::cmp::Ordering::Greater => (*p).clone(),
            std::cmp::Ordering::Less => (*q).clone(),
            std::cmp::Ordering::Equal if *p == u || *q == u => u.clone(),
            std::cmp::Ordering::Equal => one.clone(),
        };
        Ok(([a.clone(), a.clone(), a], 0))
    })
    .expect("infallible")
}

/// `a = g₁`, `g′ = η`, `h′ = η′` from a central decomposition of the
/// canonical relabeling: the one whose three centers lie closest to their
/// entrance and exit points, first in enumeration order on ties. Coinciding
/// vertices prefer decompositions whose centers coincide as well.
pub fn tmap_from_star(geo: &StarGeometry<'_>, g: &Element, h: &Element) -> Result<TValue> {
    let model = geo.model;
    equivariant(model, g, h, |u, v| {
        // Triangle (1, h = U, g = V).
        let decs = geo.central_decompositions(v, u);
        let one = Element::identity();
        let key = |d: &CentralDecomposition| {
            let fits =
                (u != v || d.eta1 == d.eta) && (!u.is_empty() || d.eta1 == one) && (!v.is_empty() || d.eta == one);
            let w = &d.witness;
            let cu = model.mul(&d.g1, &d.eta1);
            let cv = model.mul(&d.g1, &d.eta);
            let spread = model.distance(&d.g1, &w.a1)
                + model.distance(&d.g1, &w.a2)
                + model.distance(&cu, &w.b1)
                + model.distance(&cu, &w.b2)
                + model.distance(&cv, &w.c1)
                + model.distance(&cv, &w.c2);
            (!fits, spread)
        };
        let d = decs
            .iter()
            .enumerate()
            .min_by_key(|(k, d)| (key(d), *k))
            .map(|(_, d)| d)
            .ok_or_else(|| {
                Error::Structural(format!(
                    "no central decomposition for the triangle (1, {}, {})",
                    model.format(u),
                    model.format(v)
                ))
            })?;
        let c1 = d.g1.clone();
        let cu = model.mul(&d.g1, &d.eta1);
        let cv = model.mul(&d.g1, &d.eta);
        Ok(([c1, cu, cv], d.index))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relhyp::{PeripheralStructure, StarConstants};

    #[test]
    fn medians() {
        let m = GroupModel::parse("free-abelian(2)").unwrap();
        let e = |s: &str| m.element(s).unwrap();
        assert_eq!(tmap_z2(&m, &e("aa"), &e("bbb")).unwrap().a, Element::identity());
        assert_eq!(tmap_z2(&m, &e("aaaab"), &e("aabbbbb")).unwrap().a, e("aab"));
        assert_eq!(tmap_z2(&m, &e("aB"), &e("aB")).unwrap().a, e("aB"));
        assert!(tmap_z2(&GroupModel::parse("free(2)").unwrap(), &e("a"), &e("b")).is_err());
    }

    #[test]
    fn shortest_side_rule() {
        let m = GroupModel::parse("free-abelian(2)").unwrap();
        let e = |s: &str| m.element(s).unwrap();
        // L(g)=1, L(h)=3, L(h⁻¹g)=3.
        assert_eq!(tmap_polygrowth(&m, &e("a"), &e("bbb")).a, e("a"));
        // L(h)=1 strictly shortest.
        assert_eq!(tmap_polygrowth(&m, &e("aaab"), &e("b")).a, Element::identity());
        assert_eq!(
            tmap_polygrowth(&m, &Element::identity(), &Element::identity()).a,
            Element::identity()
        );
    }

    #[test]
    fn star_map_example() {
        let m = GroupModel::parse("free-product(free-abelian(1),free-abelian(1))").unwrap();
        let per = PeripheralStructure::parse(&m, "factors").unwrap();
        let geo = StarGeometry::new(&m, &per, StarConstants::new(0, 1)).unwrap();
        let e = |s: &str| m.element(s).unwrap();
        let t = tmap_from_star(&geo, &e("ab"), &e("a")).unwrap();
        assert_eq!(
            t,
            TValue {
                a: Element::identity(),
                g1: e("a"),
                h1: e("a"),
                index: 0
            }
        );
        let t = tmap_from_star(&geo, &e("aB"), &e("aB")).unwrap();
        assert_eq!(t.g1, t.h1);
        let one = Element::identity();
        let t = tmap_from_star(&geo, &one, &one).unwrap();
        assert_eq!(
            t,
            TValue {
                a: one.clone(),
                g1: one.clone(),
                h1: one,
                index: 0
            }
        );
    }
}
