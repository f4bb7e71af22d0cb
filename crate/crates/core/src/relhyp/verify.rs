//! Exhaustive checking of the triangle condition over a ball.
//!
//! For a fixed σ every ordered pair of ball elements gets a side profile:
//! the cosets met by the σ-neighbourhood of the side with their entrance and
//! exit vertices. Cosets are numbered in key order, so checking a triangle is
//! a three-way merge of sorted profiles.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::peripheral::{Coset, PeripheralStructure};
use super::triangle::{StarConstants, StarGeometry};
use crate::error::{Error, Result};
use crate::group::{BallIndex, Element, GroupModel};

/// Largest ball radius accepted by [`GeodesicMode::Exhaustive`].
pub const EXHAUSTIVE_MAX_RADIUS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicMode {
    /// Sides are the ShortLex geodesics `x · q_{x⁻¹y}`.
    Canonical,
    /// Every geodesic between the two endpoints is a possible side.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarReport {
    pub constants: StarConstants,
    pub ball_radius: usize,
    pub mode: GeodesicMode,
    pub pass: bool,
    pub triangles_checked: u64,
    /// ShortLex-first failing triangle `(A, B, C)`.
    pub counterexample: Option<[Element; 3]>,
    /// Side profiles where a side re-entered a neighbourhood after leaving it.
    pub excursions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calibration {
    pub constants: Option<StarConstants>,
    /// Every `(σ, δ, pass)` tried, in search order.
    pub tried: Vec<(usize, usize, bool)>,
}

#[derive(Clone, Copy)]
struct Entry {
    coset: u32,
    entrance: u32,
    exit: u32,
}

/// Side profiles of all ordered pairs of `B(R)` for one σ.
struct ProfileTable<'a> {
    model: &'a GroupModel,
    sigma: usize,
    n: usize,
    vertices: Vec<Element>,
    entries: Vec<Entry>,
    /// Profile `i` is `entries[profile_offsets[i]..profile_offsets[i + 1]]`.
    profile_offsets: Vec<usize>,
    /// Pair `x * n + y` owns profiles `pair_offsets[p]..pair_offsets[p + 1]`.
    pair_offsets: Vec<usize>,
    excursions: u64,
}

impl<'a> ProfileTable<'a> {
    fn build(geo: &StarGeometry<'a>, points: &[Element], mode: GeodesicMode) -> Self {
        let n = points.len();
        let mut vertex_ids: HashMap<Element, u32> = HashMap::new();
        let mut vertices = Vec::new();
        let mut coset_ids: HashMap<Coset, u32> = HashMap::new();
        let mut cosets = Vec::new();
        let mut entries = Vec::new();
        let mut profile_offsets = vec![0];
        let mut pair_offsets = vec![0];
        let mut excursions = 0;
        let intern = |e: &Element, ids: &mut HashMap<Element, u32>, store: &mut Vec<Element>| {
            *ids.entry(e.clone()).or_insert_with(|| {
                store.push(e.clone());
                (store.len() - 1) as u32
            })
        };
        for x in points {
            for y in points {
                let sides = match mode {
                    GeodesicMode::Canonical => vec![geo.side(x, y)],
                    GeodesicMode::Exhaustive => all_geodesic_sides(geo.model, x, y),
                };
                for side in sides {
                    let prof = geo.side_cosets(&side);
                    for (c, p) in prof.entries {
                        excursions += p.excursion as u64;
                        let next = cosets.len() as u32;
                        let id = *coset_ids.entry(c.clone()).or_insert_with(|| {
                            cosets.push(c);
                            next
                        });
                        entries.push(Entry {
                            coset: id,
                            entrance: intern(&p.entrance, &mut vertex_ids, &mut vertices),
                            exit: intern(&p.exit, &mut vertex_ids, &mut vertices),
                        });
                    }
                    profile_offsets.push(entries.len());
                }
                pair_offsets.push(profile_offsets.len() - 1);
            }
        }
        // Renumber cosets so that ids follow key order.
        let mut order: Vec<u32> = (0..cosets.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| cosets[a as usize].cmp(&cosets[b as usize]));
        let mut rank = vec![0u32; cosets.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        for e in &mut entries {
            e.coset = rank[e.coset as usize];
        }
        for w in profile_offsets.windows(2) {
            entries[w[0]..w[1]].sort_unstable_by_key(|e| e.coset);
        }
        ProfileTable {
            model: geo.model,
            sigma: geo.constants.sigma,
            n,
            vertices,
            entries,
            profile_offsets,
            pair_offsets,
            excursions,
        }
    }

    fn profiles(&self, x: usize, y: usize) -> impl Iterator<Item = &[Entry]> {
        let p = x * self.n + y;
        (self.pair_offsets[p]..self.pair_offsets[p + 1])
            .map(move |i| &self.entries[self.profile_offsets[i]..self.profile_offsets[i + 1]])
    }

    fn close(&self, delta: usize, a: u32, b: u32, cache: &mut HashMap<(u32, u32), usize>) -> bool {
        if a == b {
            return delta > 0;
        }
        let key = (a.min(b), a.max(b));
        let d = *cache.entry(key).or_insert_with(|| {
            self.model
                .distance(&self.vertices[a as usize], &self.vertices[b as usize])
        });
        d < delta
    }

    fn triangle_ok(
        &self,
        delta: usize,
        ab: &[Entry],
        bc: &[Entry],
        ca: &[Entry],
        cache: &mut HashMap<(u32, u32), usize>,
    ) -> bool {
        let (mut i, mut j, mut k) = (0, 0, 0);
        while i < ab.len() && j < bc.len() && k < ca.len() {
            let top = ab[i].coset.max(bc[j].coset).max(ca[k].coset);
            if ab[i].coset < top {
                i += 1;
            } else if bc[j].coset < top {
                j += 1;
            } else if ca[k].coset < top {
                k += 1;
            } else {
                if self.close(delta, ab[i].entrance, ca[k].exit, cache)
                    && self.close(delta, bc[j].entrance, ab[i].exit, cache)
                    && self.close(delta, ca[k].entrance, bc[j].exit, cache)
                {
                    return true;
                }
                i += 1;
                j += 1;
                k += 1;
            }
        }
        false
    }

    /// First failing triangle with first vertex `a`.
    fn scan_from(&self, delta: usize, a: usize) -> Option<(usize, usize)> {
        if delta == 0 {
            return Some((0, 0));
        }
        let mut cache = HashMap::new();
        for b in 0..self.n {
            for c in 0..self.n {
                for ab in self.profiles(a, b) {
                    for bc in self.profiles(b, c) {
                        for ca in self.profiles(c, a) {
                            if !self.triangle_ok(delta, ab, bc, ca, &mut cache) {
                                return Some((b, c));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn run(&self, delta: usize, points: &[Element], ball_radius: usize, mode: GeodesicMode) -> StarReport {
        let n = self.n;
        let failure = (0..n)
            .into_par_iter()
            .find_map_first(|a| self.scan_from(delta, a).map(|(b, c)| (a, b, c)));
        let total = (n as u64).pow(3);
        let (pass, checked, counterexample) = match failure {
            None => (true, total, None),
            Some((a, b, c)) => (
                false,
                ((a * n + b) * n + c + 1) as u64,
                Some([points[a].clone(), points[b].clone(), points[c].clone()]),
            ),
        };
        StarReport {
            constants: StarConstants::new(self.sigma, delta),
            ball_radius,
            mode,
            pass,
            triangles_checked: checked,
            counterexample,
            excursions: self.excursions,
        }
    }
}

/// Every geodesic side from `x` to `y`, as vertex lists in ShortLex order of
/// their words.
fn all_geodesic_sides(model: &GroupModel, x: &Element, y: &Element) -> Vec<Vec<Element>> {
    fn walk(model: &GroupModel, path: &mut Vec<Element>, y: &Element, left: usize, out: &mut Vec<Vec<Element>>) {
        if left == 0 {
            out.push(path.clone());
            return;
        }
        let cur = path.last().expect("nonempty").clone();
        for l in model.letters() {
            let next = model.mul_letter(&cur, l);
            if model.distance(&next, y) + 1 == left {
                path.push(next);
                walk(model, path, y, left - 1, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut path = vec![x.clone()];
    walk(model, &mut path, y, model.distance(x, y), &mut out);
    out
}

fn check_inputs(model: &GroupModel, ball: &BallIndex, ball_radius: usize, mode: GeodesicMode) -> Result<()> {
    if ball.model_id() != model.id() {
        return Err(Error::usage("ball was enumerated for a different model"));
    }
    if ball.radius() < ball_radius {
        return Err(Error::Range(format!(
            "ball of radius {} cannot supply triangles of radius {ball_radius}",
            ball.radius()
        )));
    }
    if mode == GeodesicMode::Exhaustive && ball_radius > EXHAUSTIVE_MAX_RADIUS {
        return Err(Error::usage(format!(
            "exhaustive geodesics are limited to radius {EXHAUSTIVE_MAX_RADIUS}"
        )));
    }
    Ok(())
}

/// Checks every triangle with vertices in `B(ball_radius)`.
pub fn verify_star(
    model: &GroupModel,
    peripherals: &PeripheralStructure,
    constants: StarConstants,
    ball: &BallIndex,
    ball_radius: usize,
    mode: GeodesicMode,
) -> Result<StarReport> {
    check_inputs(model, ball, ball_radius, mode)?;
    let geo = StarGeometry::new(model, peripherals, constants)?;
    let points = ball.sub_ball(ball_radius);
    let table = ProfileTable::build(&geo, points, mode);
    Ok(table.run(constants.delta, points, ball_radius, mode))
}

/// Lexicographically least `(σ, δ)` within the caps that passes [`verify_star`].
pub fn calibrate_constants(
    model: &GroupModel,
    peripherals: &PeripheralStructure,
    ball: &BallIndex,
    ball_radius: usize,
    sigma_max: usize,
    delta_max: usize,
    mode: GeodesicMode,
) -> Result<Calibration> {
    check_inputs(model, ball, ball_radius, mode)?;
    let points = ball.sub_ball(ball_radius);
    let mut tried = Vec::new();
    for sigma in 0..=sigma_max {
        let geo = StarGeometry::new(model, peripherals, StarConstants::new(sigma, 0))?;
        let table = ProfileTable::build(&geo, points, mode);
        for delta in 0..=delta_max {
            let pass = table.run(delta, points, ball_radius, mode).pass;
            tried.push((sigma, delta, pass));
            if pass {
                return Ok(Calibration {
                    constants: Some(StarConstants::new(sigma, delta)),
                    tried,
                });
            }
        }
    }
    Ok(Calibration { constants: None, tried })
}
