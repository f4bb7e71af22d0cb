//! Independent arithmetic for `Z*Z = ⟨a⟩*⟨b⟩` used as a test oracle.
//!
//! Elements are reduced syllable lists `(generator, power)`. Nothing here
//! calls into the library, so agreement with it is a real cross-check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

pub type Tw = Vec<(usize, i64)>;

pub fn push(w: &mut Tw, g: usize, p: i64) {
    if p == 0 {
        return;
    }
    match w.last_mut() {
        Some(last) if last.0 == g => {
            last.1 += p;
            if last.1 == 0 {
                w.pop();
            }
        }
        _ => w.push((g, p)),
    }
}

pub fn mul(x: &Tw, y: &Tw) -> Tw {
    let mut out = x.clone();
    for &(g, p) in y {
        push(&mut out, g, p);
    }
    out
}

pub fn inv(x: &Tw) -> Tw {
    x.iter().rev().map(|&(g, p)| (g, -p)).collect()
}

pub fn len(x: &Tw) -> usize {
    x.iter().map(|s| s.1.unsigned_abs() as usize).sum()
}

pub fn dist(x: &Tw, y: &Tw) -> usize {
    len(&mul(&inv(x), y))
}

pub fn to_string(x: &Tw) -> String {
    if x.is_empty() {
        return "1".into();
    }
    let mut s = String::new();
    for &(g, p) in x {
        let c = match (g, p > 0) {
            (0, true) => 'a',
            (0, false) => 'A',
            (1, true) => 'b',
            _ => 'B',
        };
        s.extend(std::iter::repeat_n(c, p.unsigned_abs() as usize));
    }
    s
}

/// All elements of length exactly `n`.
pub fn sphere(n: usize) -> Vec<Tw> {
    let mut layer: Vec<Tw> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for (g, s) in [(0, 1), (0, -1), (1, 1), (1, -1)] {
                let mut v = w.clone();
                push(&mut v, g, s);
                if len(&v) == len(w) + 1 {
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Vertices of the unique geodesic from `x` to `y`.
pub fn side(x: &Tw, y: &Tw) -> Vec<Tw> {
    let mut cur = x.clone();
    let mut out = vec![cur.clone()];
    for (g, p) in mul(&inv(x), y) {
        for _ in 0..p.abs() {
            push(&mut cur, g, p.signum());
            out.push(cur.clone());
        }
    }
    out
}

/// `v ∈ c⟨g_i⟩`.
pub fn in_coset(v: &Tw, c: &Tw, i: usize) -> bool {
    let d = mul(&inv(c), v);
    d.is_empty() || (d.len() == 1 && d[0].0 == i)
}

/// Representative with the trailing `g_i` syllable removed.
pub fn coset_rep(v: &Tw, i: usize) -> Tw {
    let mut r = v.clone();
    if r.last().is_some_and(|s| s.0 == i) {
        r.pop();
    }
    r
}

fn first_last(side: &[Tw], c: &Tw, i: usize) -> Option<(Tw, Tw)> {
    let first = side.iter().find(|v| in_coset(v, c, i))?;
    let last = side.iter().rev().find(|v| in_coset(v, c, i))?;
    Some((first.clone(), last.clone()))
}

const UNIT_BALL: [(usize, i64); 4] = [(0, 1), (0, -1), (1, 1), (1, -1)];

/// Points of the coset within distance 1 of both `p` and `q`.
fn near(p: &Tw, q: &Tw, c: &Tw, i: usize) -> Vec<Tw> {
    let mut cands = vec![p.clone()];
    for &(g, s) in &UNIT_BALL {
        let mut v = p.clone();
        push(&mut v, g, s);
        cands.push(v);
    }
    cands
        .into_iter()
        .filter(|x| in_coset(x, c, i) && dist(x, q) <= 1)
        .collect()
}

/// Triples `(g₁, η, g₂, i)` of the triangle `(1, h, g)` for σ = 0, δ = 1
/// with the two factors as peripherals.
pub fn triples(g: &Tw, h: &Tw) -> BTreeSet<(String, String, String, usize)> {
    let one: Tw = Vec::new();
    let (sh, sk, sg) = (side(&one, h), side(h, g), side(&one, g));
    let mut cosets = BTreeSet::new();
    for v in &sh {
        for i in 0..2 {
            cosets.insert((coset_rep(v, i), i));
        }
    }
    let mut out = BTreeSet::new();
    // Reverse coset order on purpose.
    for (c, i) in cosets.iter().rev() {
        let (Some((a1, b2)), Some((b1, c2)), Some((a2, c1))) =
            (first_last(&sh, c, *i), first_last(&sk, c, *i), first_last(&sg, c, *i))
        else {
            continue;
        };
        if a1 != a2 || b1 != b2 || c1 != c2 {
            continue;
        }
        let g1s = near(&a1, &a2, c, *i);
        let us = near(&c1, &c2, c, *i);
        if near(&b2, &b1, c, *i).is_empty() {
            continue;
        }
        for g1 in &g1s {
            for u in &us {
                let eta = mul(&inv(g1), u);
                let g2 = mul(&inv(u), g);
                out.insert((to_string(g1), to_string(&eta), to_string(&g2), *i));
            }
        }
    }
    out
}

/// `|D_g|` for every `(p, r1, r2, g)` with `p ≤ p_max`, `r1 ≤ r1_max`.
/// Loops run over `h` first, then `g`.
pub fn dg_counts(p_max: usize, r1_max: usize) -> BTreeMap<(usize, usize, usize, String), usize> {
    let mut sets: BTreeMap<(usize, usize, usize, String), BTreeSet<_>> = BTreeMap::new();
    for r1 in (0..=r1_max).rev() {
        for h in sphere(r1) {
            for p in (0..=p_max).rev() {
                for g in sphere(p) {
                    let r2 = dist(&h, &g);
                    let t = triples(&g, &h);
                    sets.entry((p, r1, r2, to_string(&g))).or_default().extend(t);
                }
            }
        }
    }
    sets.into_iter().map(|(k, s)| (k, s.len())).collect()
}

/// `max |D_g|` per `r1`.
pub fn max_dg_per_r1(p_max: usize, r1_max: usize) -> Vec<usize> {
    let mut out = vec![0; r1_max + 1];
    for ((_, r1, _, _), n) in dg_counts(p_max, r1_max) {
        out[r1] = out[r1].max(n);
    }
    out
}
