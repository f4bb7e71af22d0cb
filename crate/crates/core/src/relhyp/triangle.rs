use serde::{Deserialize, Serialize};

use super::peripheral::{Coset, PeripheralStructure};
use crate::error::{Error, Result};
use crate::group::{enumerate_ball, Element, GroupModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StarConstants {
    pub sigma: usize,
    pub delta: usize,
    pub kappa: usize,
}

impl StarConstants {
    pub fn new(sigma: usize, delta: usize) -> Self {
        StarConstants {
            sigma,
            delta,
            kappa: sigma + delta,
        }
    }

    /// `d < δ` on integer distances.
    #[inline]
    pub fn close(&self, d: usize) -> bool {
        d < self.delta
    }
}

/// Where a side enters and leaves the σ-neighbourhood of a coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Passage {
    pub entrance: Element,
    pub exit: Element,
    pub entrance_pos: usize,
    pub exit_pos: usize,
    /// The side left the neighbourhood between entrance and exit.
    pub excursion: bool,
}

/// Entrance and exit points of the three sides of a triangle `ABC`:
/// `A1, B2` on `[A,B]`, `B1, C2` on `[B,C]`, `C1, A2` on `[C,A]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryExitRecord {
    pub a1: Element,
    pub b2: Element,
    pub b1: Element,
    pub c2: Element,
    pub c1: Element,
    pub a2: Element,
    pub excursion: bool,
}

impl EntryExitRecord {
    pub fn points(&self) -> [&Element; 6] {
        [&self.a1, &self.b2, &self.b1, &self.c2, &self.c1, &self.a2]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCoset {
    pub coset: Coset,
    pub record: EntryExitRecord,
    /// Distances of `A1, B2, B1, C2, C1, A2` to the coset (each at most σ).
    pub point_distances: [usize; 6],
    /// `d(A1,A2)`, `d(B1,B2)`, `d(C1,C2)`.
    pub pair_distances: [usize; 3],
}

/// Cosets met by the σ-neighbourhood of a side, each with its passage.
pub(crate) struct SideCosets {
    pub entries: Vec<(Coset, Passage)>,
}

impl SideCosets {
    pub fn get(&self, c: &Coset) -> Option<&Passage> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(c))
            .ok()
            .map(|i| &self.entries[i].1)
    }
}

/// A model, its peripherals and the constants `(σ, δ)`, with the small balls
/// `B(σ)` and `B(κ)` needed for neighbourhood tests.
#[derive(Clone, Debug)]
pub struct StarGeometry<'a> {
    pub model: &'a GroupModel,
    pub peripherals: &'a PeripheralStructure,
    pub constants: StarConstants,
    pub(crate) sigma_ball: Vec<Element>,
    pub(crate) kappa_ball: Vec<Element>,
}

impl<'a> StarGeometry<'a> {
    pub fn new(model: &'a GroupModel, peripherals: &'a PeripheralStructure, constants: StarConstants) -> Result<Self> {
        if peripherals.model_id() != model.id() {
            return Err(Error::usage("peripheral structure belongs to a different model"));
        }
        let kappa_ball = enumerate_ball(model, constants.kappa)?.elements().to_vec();
        let sigma_ball = kappa_ball
            .iter()
            .take_while(|e| e.len() <= constants.sigma)
            .cloned()
            .collect();
        Ok(StarGeometry {
            model,
            peripherals,
            constants,
            sigma_ball,
            kappa_ball,
        })
    }

    /// Vertices of the side from `x` to `y`, i.e. of `x · q_{x⁻¹y}`.
    pub fn side(&self, x: &Element, y: &Element) -> Vec<Element> {
        let q = self.model.left_divide(x, y);
        let mut cur = self.model.cursor(x);
        let mut out = Vec::with_capacity(q.len() + 1);
        out.push(x.clone());
        for &l in q.iter() {
            cur.push(l);
            out.push(cur.element());
        }
        out
    }

    /// Entrance and exit of a side (given by its vertices) into the closed
    /// σ-neighbourhood of a coset.
    pub fn entrance_exit(&self, side: &[Element], coset: &Coset) -> Option<Passage> {
        let within: Vec<usize> = side
            .iter()
            .enumerate()
            .filter(|(_, v)| self.peripherals.distance_to(self.model, v, coset) <= self.constants.sigma)
            .map(|(i, _)| i)
            .collect();
        let (&first, &last) = (within.first()?, within.last()?);
        Some(Passage {
            entrance: side[first].clone(),
            exit: side[last].clone(),
            entrance_pos: first,
            exit_pos: last,
            excursion: within.len() != last - first + 1,
        })
    }

    /// Every coset whose σ-neighbourhood meets the side, sorted.
    pub(crate) fn side_cosets(&self, side: &[Element]) -> SideCosets {
        let m = self.peripherals.len();
        // (coset, first, last, hits)
        let mut acc: Vec<(Coset, usize, usize, usize)> = Vec::new();
        for (pos, v) in side.iter().enumerate() {
            let mut here: Vec<Coset> = Vec::with_capacity(self.sigma_ball.len() * m);
            for s in &self.sigma_ball {
                let vs = self.model.mul(v, s);
                for i in 0..m {
                    here.push(self.peripherals.coset(i, &vs));
                }
            }
            here.sort_unstable();
            here.dedup();
            for c in here {
                match acc.iter_mut().find(|e| e.0 == c) {
                    Some(e) => {
                        e.2 = pos;
                        e.3 += 1;
                    }
                    None => acc.push((c, pos, pos, 1)),
                }
            }
        }
        let mut entries: Vec<(Coset, Passage)> = acc
            .into_iter()
            .map(|(c, first, last, hits)| {
                let p = Passage {
                    entrance: side[first].clone(),
                    exit: side[last].clone(),
                    entrance_pos: first,
                    exit_pos: last,
                    excursion: hits != last - first + 1,
                };
                (c, p)
            })
            .collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        SideCosets { entries }
    }

    fn qualify(&self, c: &Coset, ab: &Passage, bc: &Passage, ca: &Passage) -> Option<CentralCoset> {
        let k = self.constants;
        if k.delta == 0 {
            return None;
        }
        let d = |x: &Element, y: &Element| self.model.distance(x, y);
        let pair_distances = [
            d(&ab.entrance, &ca.exit),
            d(&bc.entrance, &ab.exit),
            d(&ca.entrance, &bc.exit),
        ];
        if !pair_distances.iter().all(|&x| k.close(x)) {
            return None;
        }
        let record = EntryExitRecord {
            a1: ab.entrance.clone(),
            b2: ab.exit.clone(),
            b1: bc.entrance.clone(),
            c2: bc.exit.clone(),
            c1: ca.entrance.clone(),
            a2: ca.exit.clone(),
            excursion: ab.excursion || bc.excursion || ca.excursion,
        };
        let point_distances = record.points().map(|p| self.peripherals.distance_to(self.model, p, c));
        Some(CentralCoset {
            coset: c.clone(),
            record,
            point_distances,
            pair_distances,
        })
    }

    /// All cosets satisfying the three strict distance conditions for the
    /// triangle with canonical sides, in key order.
    pub fn all_central_cosets(&self, a: &Element, b: &Element, c: &Element) -> Vec<CentralCoset> {
        self.central_cosets_impl(a, b, c, false)
    }

    /// The first qualifying coset for the triangle `ABC`, if any.
    pub fn find_central_coset(&self, a: &Element, b: &Element, c: &Element) -> Option<CentralCoset> {
        self.central_cosets_impl(a, b, c, true).into_iter().next()
    }

    fn central_cosets_impl(&self, a: &Element, b: &Element, c: &Element, first: bool) -> Vec<CentralCoset> {
        let ab = self.side_cosets(&self.side(a, b));
        let bc = self.side_cosets(&self.side(b, c));
        let ca = self.side_cosets(&self.side(c, a));
        let mut out = Vec::new();
        for (coset, p_ab) in &ab.entries {
            let (Some(p_bc), Some(p_ca)) = (bc.get(coset), ca.get(coset)) else {
                continue;
            };
            if let Some(found) = self.qualify(coset, p_ab, p_bc, p_ca) {
                out.push(found);
                if first {
                    break;
                }
            }
        }
        out
    }
}
