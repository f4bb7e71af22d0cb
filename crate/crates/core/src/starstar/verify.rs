use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::tmap::{TMap, TMapKind, TValue};
use crate::error::{Error, Result};
use crate::fit::LinearEnvelope;
use crate::group::{BallIndex, Element};

type PerR = Vec<(usize, f64)>;

/// Number of distinct `(a, g′)` for one `g` over all `h` of length `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountCell {
    pub g: Element,
    pub r: usize,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct TMapReport {
    pub kind: TMapKind,
    pub ball_radius: usize,
    pub pairs_checked: usize,
    pub condition_i: bool,
    /// ShortLex-first `(g, h)` violating (i).
    pub counterexample_i: Option<(Element, Element)>,
    /// `(r, max L(h′))` over `h ∈ S(r)`.
    pub middle_lengths: Vec<(usize, usize)>,
    pub q1_fit: LinearEnvelope,
    pub condition_ii: bool,
    pub counts: Vec<CountCell>,
    pub q2_fit: LinearEnvelope,
    /// Per `r`: the reference value of `Q₂(r)` for this construction, if any.
    pub q2_claim: Vec<(usize, f64)>,
    /// Cells whose count exceeds the reference `Q₂`; recorded, not failed.
    pub claim_excess: Vec<CountCell>,
    /// Per `r`: the bound checked for (iii).
    pub q2_limit: Vec<(usize, f64)>,
    pub condition_iii: bool,
}

impl TMapReport {
    pub fn pass(&self) -> bool {
        self.condition_i && self.condition_ii && self.condition_iii
    }

    /// `max_g count(g, r)` for every `r`.
    pub fn max_counts(&self) -> Vec<(usize, usize)> {
        let mut m: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &self.counts {
            let e = m.entry(c.r).or_default();
            *e = (*e).max(c.count);
        }
        m.into_iter().collect()
    }
}

fn consistent(t: &TMap<'_>, g: &Element, h: &Element, v: &TValue) -> Result<bool> {
    let m = t.model();
    let swapped = t.eval(h, g)?;
    if swapped
        != (TValue {
            a: v.a.clone(),
            g1: v.h1.clone(),
            h1: v.g1.clone(),
            index: v.index,
        })
    {
        return Ok(false);
    }
    let hi = m.inverse(h);
    let rebased = t.eval(&hi, &m.mul(&hi, g))?;
    let hp_inv = m.inverse(&v.h1);
    let expect = TValue {
        a: m.mul(&m.mul(&hi, &v.a), &v.h1),
        g1: hp_inv.clone(),
        h1: m.mul(&hp_inv, &v.g1),
        index: v.index,
    };
    Ok(rebased == expect)
}

/// Checks (i)–(iii) on every pair `(g, h)` of the ball. Condition (ii) and
/// (iii) are compared with the reference polynomials for the median and
/// shortest-side maps, and with fitted linear envelopes for the map built
/// from central decompositions.
pub fn verify_tmap(tmap: &TMap<'_>, ball: &BallIndex) -> Result<TMapReport> {
    let model = tmap.model();
    if ball.model_id() != model.id() {
        return Err(Error::usage("ball belongs to a different model"));
    }
    let elems = ball.elements();
    let radius = ball.radius();
    // Per g: (first violation of (i), per-r sets of (a, g′), per-r max L(h′)).
    type Row = (
        Option<Element>,
        BTreeMap<usize, BTreeSet<(Element, Element)>>,
        BTreeMap<usize, usize>,
    );
    let rows: Vec<Row> = elems
        .par_iter()
        .map(|g| {
            let mut bad = None;
            let mut sets: BTreeMap<usize, BTreeSet<(Element, Element)>> = BTreeMap::new();
            let mut mids: BTreeMap<usize, usize> = BTreeMap::new();
            for h in elems {
                let v = tmap.eval(g, h)?;
                if bad.is_none() && !consistent(tmap, g, h, &v)? {
                    bad = Some(h.clone());
                }
                let r = h.len();
                let mid = mids.entry(r).or_default();
                *mid = (*mid).max(v.h1.len());
                sets.entry(r).or_default().insert((v.a, v.g1));
            }
            Ok((bad, sets, mids))
        })
        .collect::<Result<_>>()?;

    let counterexample_i = elems
        .iter()
        .zip(&rows)
        .find_map(|(g, row)| row.0.clone().map(|h| (g.clone(), h)));
    let mut mids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut counts = Vec::new();
    for (g, (_, sets, m)) in elems.iter().zip(&rows) {
        for (&r, &l) in m {
            let e = mids.entry(r).or_default();
            *e = (*e).max(l);
        }
        for (&r, s) in sets {
            counts.push(CountCell {
                g: g.clone(),
                r,
                count: s.len(),
            });
        }
    }
    let middle_lengths: Vec<(usize, usize)> = mids.into_iter().collect();
    let q1_pts: Vec<(f64, f64)> = middle_lengths.iter().map(|&(r, l)| (r as f64, l as f64)).collect();
    let q1_fit = LinearEnvelope::fit(&q1_pts);

    let mut per_r: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &counts {
        let e = per_r.entry(c.r).or_default();
        *e = (*e).max(c.count);
    }
    let q2_pts: Vec<(f64, f64)> = per_r.iter().map(|(&r, &c)| (r as f64, c as f64)).collect();
    let q2_fit = LinearEnvelope::fit(&q2_pts);

    let rs = 0..=radius;
    let (q2_claim, q2_limit, condition_ii): (PerR, PerR, bool) = match tmap.kind() {
        TMapKind::Z2Median => (
            rs.clone().map(|r| (r, 2.0 * r as f64)).collect(),
            rs.map(|r| (r, 2.0 * r as f64 + 2.0)).collect(),
            middle_lengths.iter().all(|&(_, l)| l == 0),
        ),
        TMapKind::PolygrowthShortestSide => {
            let f: Vec<(usize, f64)> = rs.map(|r| (r, 2.0 * ball.sub_ball(r).len() as f64 + 2.0)).collect();
            (f.clone(), f, middle_lengths.iter().all(|&(_, l)| l == 0))
        }
        TMapKind::DerivedFromStar => (
            Vec::new(),
            rs.map(|r| (r, q2_fit.eval(r as f64))).collect(),
            q1_fit.dominates(&q1_pts),
        ),
    };
    let limit: BTreeMap<usize, f64> = q2_limit.iter().copied().collect();
    let claim: BTreeMap<usize, f64> = q2_claim.iter().copied().collect();
    let condition_iii = counts.iter().all(|c| (c.count as f64) <= limit[&c.r] + 1e-9);
    let claim_excess = counts
        .iter()
        .filter(|c| claim.get(&c.r).is_some_and(|&q| c.count as f64 > q))
        .cloned()
        .collect();

    Ok(TMapReport {
        kind: tmap.kind(),
        ball_radius: radius,
        pairs_checked: elems.len() * elems.len(),
        condition_i: counterexample_i.is_none(),
        counterexample_i,
        middle_lengths,
        q1_fit,
        condition_ii,
        counts,
        q2_fit,
        q2_claim,
        claim_excess,
        q2_limit,
        condition_iii,
    })
}
