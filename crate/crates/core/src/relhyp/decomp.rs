//! Central decompositions of triangles `(1, h, g)` and their counts.

use std::collections::{BTreeMap, BTreeSet};

use super::peripheral::Coset;
use super::triangle::{EntryExitRecord, SideCosets, StarConstants, StarGeometry};
use crate::error::{Error, Result};
use crate::fit::LinearEnvelope;
use crate::group::{BallIndex, Element};

/// One tuple `(g₁, g₂, g₃, η, η′, η″, i)` with its witness points.
///
/// `g = g₁ η g₂`, `h = g₁ η′ g₃`, `k = h⁻¹g = g₃⁻¹ η″ g₂` and `η = η′ η″`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralDecomposition {
    pub g1: Element,
    pub g2: Element,
    pub g3: Element,
    pub eta: Element,
    pub eta1: Element,
    pub eta2: Element,
    pub index: usize,
    pub coset: Coset,
    pub witness: EntryExitRecord,
}

/// A decomposition `(g₁, η, g₂)` of `g`, tagged with the peripheral index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub g1: Element,
    pub eta: Element,
    pub g2: Element,
    pub index: usize,
}

/// The companion `(η′, η″, g₃)` of a decomposition of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Companion {
    pub eta1: Element,
    pub eta2: Element,
    pub g3: Element,
}

/// All central decompositions of one `g ∈ S(p)` over the triangles with
/// `h ∈ S(r1)` and `h⁻¹g ∈ S(r2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionIndex {
    pub g: Element,
    pub p: usize,
    pub r1: usize,
    pub r2: usize,
    /// `D_g`, each triple mapped to `C_d`.
    pub decompositions: BTreeMap<Triple, BTreeSet<Companion>>,
    /// Pairs `(h, k)` with `hk = g` that have no central decomposition.
    pub missing: Vec<(Element, Element)>,
}

impl DecompositionIndex {
    fn empty(g: &Element, p: usize, r1: usize, r2: usize) -> Self {
        DecompositionIndex {
            g: g.clone(),
            p,
            r1,
            r2,
            ..Default::default()
        }
    }

    /// `|D_g|`.
    pub fn count(&self) -> usize {
        self.decompositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decompositions.is_empty()
    }

    pub fn d_g(&self) -> impl Iterator<Item = &Triple> {
        self.decompositions.keys()
    }

    pub fn left_parts(&self) -> BTreeSet<&Element> {
        self.d_g().map(|d| &d.g1).collect()
    }

    pub fn right_parts(&self) -> BTreeSet<&Element> {
        self.d_g().map(|d| &d.g2).collect()
    }

    pub fn left_right_pairs(&self) -> BTreeSet<(&Element, &Element)> {
        self.d_g().map(|d| (&d.g1, &d.g2)).collect()
    }

    pub fn c_d(&self, d: &Triple) -> Option<&BTreeSet<Companion>> {
        self.decompositions.get(d)
    }

    pub fn e_d(&self, d: &Triple) -> BTreeSet<(&Element, &Element)> {
        self.c_d(d).into_iter().flatten().map(|c| (&c.eta1, &c.eta2)).collect()
    }

    pub fn e1_d(&self, d: &Triple) -> BTreeSet<&Element> {
        self.c_d(d).into_iter().flatten().map(|c| &c.eta1).collect()
    }

    pub fn e2_d(&self, d: &Triple) -> BTreeSet<&Element> {
        self.c_d(d).into_iter().flatten().map(|c| &c.eta2).collect()
    }

    pub fn u_d(&self, d: &Triple) -> BTreeSet<&Element> {
        self.c_d(d).into_iter().flatten().map(|c| &c.g3).collect()
    }

    fn insert(&mut self, dec: CentralDecomposition) {
        let t = Triple {
            g1: dec.g1,
            eta: dec.eta,
            g2: dec.g2,
            index: dec.index,
        };
        self.decompositions.entry(t).or_default().insert(Companion {
            eta1: dec.eta1,
            eta2: dec.eta2,
            g3: dec.g3,
        });
    }
}

/// The set `Δ` for fixed `(p, r1, r2)`, grouped by `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSet {
    pub p: usize,
    pub r1: usize,
    pub r2: usize,
    pub per_g: BTreeMap<Element, DecompositionIndex>,
}

impl DeltaSet {
    pub fn build(geo: &StarGeometry<'_>, ball: &BallIndex, p: usize, r1: usize, r2: usize) -> Result<Self> {
        Ok(delta_sets(geo, ball, p, r1, r2, r2)?
            .remove(&r2)
            .unwrap_or_else(|| DeltaSet::empty(p, r1, r2)))
    }

    fn empty(p: usize, r1: usize, r2: usize) -> Self {
        DeltaSet {
            p,
            r1,
            r2,
            per_g: BTreeMap::new(),
        }
    }

    pub fn missing(&self) -> impl Iterator<Item = &(Element, Element)> {
        self.per_g.values().flat_map(|d| d.missing.iter())
    }

    pub fn is_complete(&self) -> bool {
        self.missing().next().is_none()
    }

    /// `max_g |D_g|` with the ShortLex-first maximizer.
    pub fn max_count(&self) -> Option<(usize, &Element)> {
        self.per_g
            .iter()
            .map(|(g, d)| (d.count(), g))
            .fold(None, |best, cur| match best {
                Some((b, _)) if b >= cur.0 => best,
                _ => Some(cur),
            })
    }

    /// For every `h`, the number of distinct `(g₁, η, i, η′, g₃)` in `Δ` with
    /// `g₁ η′ g₃ = h`. The middle part is kept so that regrouping by `(g₁, g₂)`
    /// never counts a term more often than this.
    pub fn left_multiplicities(&self, geo: &StarGeometry<'_>) -> BTreeMap<Element, usize> {
        let m = geo.model;
        let mut seen: BTreeMap<Element, BTreeSet<LeftKey<'_>>> = BTreeMap::new();
        for idx in self.per_g.values() {
            for (d, cs) in &idx.decompositions {
                for c in cs {
                    let h = m.mul(&m.mul(&d.g1, &c.eta1), &c.g3);
                    seen.entry(h)
                        .or_default()
                        .insert((&d.g1, &d.eta, d.index, &c.eta1, &c.g3));
                }
            }
        }
        seen.into_iter().map(|(h, s)| (h, s.len())).collect()
    }

    /// For every `k`, the number of distinct `(g₂, η, i, η″, g₃)` in `Δ` with
    /// `g₃⁻¹ η″ g₂ = k`.
    pub fn right_multiplicities(&self, geo: &StarGeometry<'_>) -> BTreeMap<Element, usize> {
        let m = geo.model;
        let mut seen: BTreeMap<Element, BTreeSet<LeftKey<'_>>> = BTreeMap::new();
        for idx in self.per_g.values() {
            for (d, cs) in &idx.decompositions {
                for c in cs {
                    let k = m.left_divide(&c.g3, &m.mul(&c.eta2, &d.g2));
                    seen.entry(k)
                        .or_default()
                        .insert((&d.g2, &d.eta, d.index, &c.eta2, &c.g3));
                }
            }
        }
        seen.into_iter().map(|(k, s)| (k, s.len())).collect()
    }
}

type LeftKey<'a> = (&'a Element, &'a Element, usize, &'a Element, &'a Element);

impl StarGeometry<'_> {
    /// All central decompositions of the triangle `(1, h, g)`, ordered by
    /// coset, then `g₁`, then `η′`, then `η`.
    pub fn central_decompositions(&self, g: &Element, h: &Element) -> Vec<CentralDecomposition> {
        let one = Element::identity();
        let pg = self.side_cosets(&self.side(&one, g));
        let ph = self.side_cosets(&self.side(&one, h));
        self.decompose(g, h, &pg, &ph)
    }

    fn decompose(&self, g: &Element, h: &Element, pg: &SideCosets, ph: &SideCosets) -> Vec<CentralDecomposition> {
        let m = self.model;
        let StarConstants { delta, kappa, .. } = self.constants;
        let mut out = Vec::new();
        if delta == 0 {
            return out;
        }
        let pk = self.side_cosets(&self.side(h, g));
        for (coset, on_h) in &ph.entries {
            let (Some(on_k), Some(on_g)) = (pk.get(coset), pg.get(coset)) else {
                continue;
            };
            let (a1, b2) = (&on_h.entrance, &on_h.exit);
            let (b1, c2) = (&on_k.entrance, &on_k.exit);
            let (a2, c1) = (&on_g.entrance, &on_g.exit);
            if m.distance(a1, a2) >= delta || m.distance(b1, b2) >= delta || m.distance(c1, c2) >= delta {
                continue;
            }
            let near = |p: &Element, q: &Element| -> Vec<Element> {
                let mut v: Vec<Element> = self
                    .kappa_ball
                    .iter()
                    .map(|s| m.mul(p, s))
                    .filter(|x| self.peripherals.contains(coset, x) && m.distance(x, q) <= kappa)
                    .collect();
                v.sort_unstable();
                v
            };
            let g1s = near(a1, a2);
            let us = near(c1, c2);
            let ws = near(b2, b1);
            if g1s.is_empty() || us.is_empty() || ws.is_empty() {
                continue;
            }
            let witness = EntryExitRecord {
                a1: a1.clone(),
                b2: b2.clone(),
                b1: b1.clone(),
                c2: c2.clone(),
                c1: c1.clone(),
                a2: a2.clone(),
                excursion: on_h.excursion || on_k.excursion || on_g.excursion,
            };
            for g1 in &g1s {
                let mut wl: Vec<(Element, &Element)> = ws.iter().map(|w| (m.left_divide(g1, w), w)).collect();
                wl.sort_unstable();
                let mut ul: Vec<(Element, &Element)> = us.iter().map(|u| (m.left_divide(g1, u), u)).collect();
                ul.sort_unstable();
                for (eta1, w) in &wl {
                    let g3 = m.left_divide(w, h);
                    for (eta, u) in &ul {
                        out.push(CentralDecomposition {
                            g1: g1.clone(),
                            g2: m.left_divide(u, g),
                            g3: g3.clone(),
                            eta: eta.clone(),
                            eta1: eta1.clone(),
                            eta2: m.left_divide(w, u),
                            index: coset.index,
                            coset: coset.clone(),
                            witness: witness.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

fn admissible(p: usize, r1: usize, r2: usize) -> bool {
    p <= r1 + r2 && r1 <= p + r2 && r2 <= p + r1
}

/// `Δ` for `(p, r1, r2)` with `r2` in `r2_min..=r2_max`, built in one sweep
/// over `S(p) × S(r1)`.
fn delta_sets(
    geo: &StarGeometry<'_>,
    ball: &BallIndex,
    p: usize,
    r1: usize,
    r2_min: usize,
    r2_max: usize,
) -> Result<BTreeMap<usize, DeltaSet>> {
    if ball.radius() < p.max(r1) {
        return Err(Error::Range(format!(
            "ball of radius {} is too small for p = {p}, r1 = {r1}",
            ball.radius()
        )));
    }
    let m = geo.model;
    let one = Element::identity();
    let mut out: BTreeMap<usize, DeltaSet> = BTreeMap::new();
    let h_profiles: Vec<SideCosets> = ball
        .sphere(r1)
        .iter()
        .map(|h| geo.side_cosets(&geo.side(&one, h)))
        .collect();
    for g in ball.sphere(p) {
        let pg = geo.side_cosets(&geo.side(&one, g));
        for (h, ph) in ball.sphere(r1).iter().zip(&h_profiles) {
            let k = m.left_divide(h, g);
            let r2 = k.len();
            if r2 < r2_min || r2 > r2_max || !admissible(p, r1, r2) {
                continue;
            }
            let set = out.entry(r2).or_insert_with(|| DeltaSet::empty(p, r1, r2));
            let idx = set
                .per_g
                .entry(g.clone())
                .or_insert_with(|| DecompositionIndex::empty(g, p, r1, r2));
            let decs = geo.decompose(g, h, &pg, ph);
            if decs.is_empty() {
                idx.missing.push((h.clone(), k));
            }
            for d in decs {
                idx.insert(d);
            }
        }
    }
    Ok(out)
}

/// The views `D_g`, `C_d`, … for one `g`, aggregated over `h ∈ S(r1)` with
/// `h⁻¹g ∈ S(r2)`. Inadmissible `(p, r1, r2)` give an empty index.
pub fn decomposition_index(
    geo: &StarGeometry<'_>,
    ball: &BallIndex,
    g: &Element,
    p: usize,
    r1: usize,
    r2: usize,
) -> Result<DecompositionIndex> {
    let mut idx = DecompositionIndex::empty(g, p, r1, r2);
    if g.len() != p || !admissible(p, r1, r2) {
        return Ok(idx);
    }
    if ball.radius() < r1 {
        return Err(Error::Range(format!(
            "ball of radius {} is too small for r1 = {r1}",
            ball.radius()
        )));
    }
    let one = Element::identity();
    let pg = geo.side_cosets(&geo.side(&one, g));
    for h in ball.sphere(r1) {
        let k = geo.model.left_divide(h, g);
        if k.len() != r2 {
            continue;
        }
        let ph = geo.side_cosets(&geo.side(&one, h));
        let decs = geo.decompose(g, h, &pg, &ph);
        if decs.is_empty() {
            idx.missing.push((h.clone(), k));
        }
        for d in decs {
            idx.insert(d);
        }
    }
    Ok(idx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountRow {
    pub r1: usize,
    /// `max |D_g|` over `g ∈ S(p)`, `p ≤ p_max`, admissible `r2`.
    pub max_left: usize,
    /// `(p, r2, g)` attaining `max_left`.
    pub left_witness: Option<(usize, usize, Element)>,
    /// Largest number of right decompositions of any `k ∈ S(r2)`.
    pub max_right: usize,
    pub right_witness: Option<(usize, usize, Element)>,
    pub observed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountFit {
    pub constants: StarConstants,
    pub p_max: usize,
    pub r1_max: usize,
    pub r2_max: Option<usize>,
    pub rows: Vec<CountRow>,
    pub envelope: LinearEnvelope,
    /// Product pairs without any central decomposition.
    pub incomplete_pairs: usize,
}

impl CountFit {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.r1 as f64, r.observed as f64)).collect()
    }

    /// `C1·r1 + C2`.
    pub fn bound(&self, r1: usize) -> f64 {
        self.envelope.eval(r1 as f64)
    }
}

/// Largest observed numbers of central decompositions per `r1`, with the
/// dominating linear envelope.
pub fn count_bound_fit(
    geo: &StarGeometry<'_>,
    ball: &BallIndex,
    p_max: usize,
    r1_max: usize,
    r2_max: Option<usize>,
) -> Result<CountFit> {
    let mut rows = Vec::new();
    let mut incomplete = 0;
    for r1 in 0..=r1_max {
        let mut row = CountRow {
            r1,
            max_left: 0,
            left_witness: None,
            max_right: 0,
            right_witness: None,
            observed: 0,
        };
        for p in 0..=p_max {
            let hi = r2_max.map_or(p + r1, |m| m.min(p + r1));
            let lo = p.abs_diff(r1);
            if lo > hi {
                continue;
            }
            for (r2, set) in delta_sets(geo, ball, p, r1, lo, hi)? {
                incomplete += set.missing().count();
                if let Some((c, g)) = set.max_count() {
                    if c > row.max_left {
                        row.max_left = c;
                        row.left_witness = Some((p, r2, g.clone()));
                    }
                }
                for (k, c) in set.right_multiplicities(geo) {
                    if c > row.max_right {
                        row.max_right = c;
                        row.right_witness = Some((p, r2, k));
                    }
                }
            }
        }
        row.observed = row.max_left.max(row.max_right);
        rows.push(row);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.r1 as f64, r.observed as f64)).collect();
    Ok(CountFit {
        constants: geo.constants,
        p_max,
        r1_max,
        r2_max,
        rows,
        envelope: LinearEnvelope::fit(&pts),
        incomplete_pairs: incomplete,
    })
}
