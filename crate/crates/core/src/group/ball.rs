use std::collections::HashMap;

use super::element::{Element, Letter};
use super::model::{GroupModel, ModelId};
use crate::error::{Error, Result};

/// Default cap on the number of elements a ball may hold.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// The closed ball of radius `r` around the identity, in BFS order.
///
/// Elements are stored sphere by sphere; inside a sphere they are in ShortLex
/// order, so an element's position is also its global ShortLex rank.
#[derive(Clone, Debug)]
pub struct BallIndex {
    model: ModelId,
    descriptor: String,
    order: String,
    radius: usize,
    elements: Vec<Element>,
    parents: Vec<Option<(u32, Letter)>>,
    offsets: Vec<usize>,
    index: HashMap<Element, u32>,
}

pub fn enumerate_ball(model: &GroupModel, r: usize) -> Result<BallIndex> {
    enumerate_ball_with_budget(model, r, DEFAULT_BUDGET)
}

pub fn enumerate_ball_with_budget(model: &GroupModel, r: usize, budget: usize) -> Result<BallIndex> {
    let over = || Error::Resource {
        what: format!("ball of radius {r} in {}", model.descriptor()),
        budget,
    };
    if budget == 0 {
        return Err(over());
    }
    let mut elements = vec![Element::identity()];
    let mut parents = vec![None];
    let mut index = HashMap::new();
    index.insert(Element::identity(), 0u32);
    let mut offsets = vec![0, 1];
    for _ in 0..r {
        let (start, end) = (offsets[offsets.len() - 2], offsets[offsets.len() - 1]);
        for rank in start..end {
            for l in model.letters() {
                let next = model.mul_letter(&elements[rank], l);
                if index.contains_key(&next) {
                    continue;
                }
                if elements.len() >= budget {
                    return Err(over());
                }
                index.insert(next.clone(), elements.len() as u32);
                elements.push(next);
                parents.push(Some((rank as u32, l)));
            }
        }
        offsets.push(elements.len());
    }
    Ok(BallIndex {
        model: model.id(),
        descriptor: model.descriptor(),
        order: model.order_string(),
        radius: r,
        elements,
        parents,
        offsets,
        index,
    })
}

/// `f(r) = |B(r)|`.
pub fn growth_function(model: &GroupModel, r: usize) -> Result<usize> {
    Ok(enumerate_ball(model, r)?.len())
}

impl BallIndex {
    /// Rebuilds a ball from stored parts, checking every structural invariant.
    pub(crate) fn from_parts(
        model: &GroupModel,
        radius: usize,
        elements: Vec<Element>,
        parents: Vec<Option<(u32, Letter)>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::Integrity(m);
        if elements.first().is_none_or(|e| !e.is_identity()) || parents.len() != elements.len() {
            return Err(bad("ball must start with the identity".into()));
        }
        let mut offsets = Vec::with_capacity(radius + 2);
        let mut index = HashMap::with_capacity(elements.len());
        for (rank, e) in elements.iter().enumerate() {
            let len = e.len();
            if len > radius {
                return Err(bad(format!("element {rank} has length {len} > radius {radius}")));
            }
            while offsets.len() <= len {
                offsets.push(rank);
            }
            if offsets.len() != len + 1 {
                return Err(bad(format!("element {rank} breaks the sphere order")));
            }
            if rank > 0 && elements[rank - 1].len() == len && elements[rank - 1] >= *e {
                return Err(bad(format!("element {rank} breaks ShortLex order")));
            }
            if model.normalize(e)? != *e {
                return Err(bad(format!("element {rank} is not in normal form")));
            }
            match parents[rank] {
                None if rank == 0 => {}
                Some((p, l)) if (p as usize) < rank => {
                    let parent = &elements[p as usize];
                    if parent.len() + 1 != len || parent[..] != e[..len - 1] || l != e[len - 1] {
                        return Err(bad(format!("element {rank} has an inconsistent parent")));
                    }
                }
                _ => return Err(bad(format!("element {rank} has an invalid parent"))),
            }
            if index.insert(e.clone(), rank as u32).is_some() {
                return Err(bad(format!("element {rank} is duplicated")));
            }
        }
        while offsets.len() <= radius + 1 {
            offsets.push(elements.len());
        }
        Ok(BallIndex {
            model: model.id(),
            descriptor: model.descriptor(),
            order: model.order_string(),
            radius,
            elements,
            parents,
            offsets,
            index,
        })
    }

    pub fn model_id(&self) -> ModelId {
        self.model
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn order(&self) -> &str {
        &self.order
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, rank: usize) -> &Element {
        &self.elements[rank]
    }

    pub fn rank_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).map(|&r| r as usize)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    /// BFS parent: the rank of the parent and the letter leading to this element.
    pub fn parent(&self, rank: usize) -> Option<(usize, Letter)> {
        self.parents[rank].map(|(p, l)| (p as usize, l))
    }

    pub fn length(&self, rank: usize) -> usize {
        self.elements[rank].len()
    }

    /// Start index of every sphere, plus the total size as a final entry.
    pub fn sphere_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn sphere_range(&self, k: usize) -> std::ops::Range<usize> {
        if k > self.radius {
            return self.len()..self.len();
        }
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn sphere(&self, k: usize) -> &[Element] {
        &self.elements[self.sphere_range(k)]
    }

    pub fn sphere_size(&self, k: usize) -> usize {
        self.sphere_range(k).len()
    }

    /// Elements of length at most `k` (a prefix of the ball).
    pub fn sub_ball(&self, k: usize) -> &[Element] {
        &self.elements[..self.offsets[k.min(self.radius) + 1]]
    }

    /// ShortLex-least geodesic word from the identity to `g`, read off the
    /// BFS parent chain.
    pub fn canonical_geodesic(&self, g: &Element) -> Result<Vec<Letter>> {
        let mut rank = self.rank_of(g).ok_or_else(|| {
            Error::Range(format!(
                "element of length {} lies outside the ball of radius {}",
                g.len(),
                self.radius
            ))
        })?;
        let mut word = Vec::with_capacity(g.len());
        while let Some((p, l)) = self.parent(rank) {
            word.push(l);
            rank = p;
        }
        word.reverse();
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: &str) -> GroupModel {
        GroupModel::parse(s).unwrap()
    }

    #[test]
    fn free_sphere_sizes() {
        let m = model("free(2)");
        let b = enumerate_ball(&m, 2).unwrap();
        assert_eq!(b.sphere_size(1), 4);
        assert_eq!(b.sphere_size(2), 12);
        assert_eq!(growth_function(&m, 1).unwrap(), 5);
    }

    #[test]
    fn abelian_spheres() {
        let m = model("free-abelian(2)");
        let b = enumerate_ball(&m, 3).unwrap();
        assert_eq!(b.sphere_size(3), 12);
        assert_eq!(growth_function(&m, 2).unwrap(), 13);
        assert_eq!(growth_function(&m, 0).unwrap(), 1);
    }

    #[test]
    fn geodesics_follow_parents() {
        let m = model("free-abelian(2)");
        let b = enumerate_ball(&m, 3).unwrap();
        let g = m.element("ba").unwrap();
        assert_eq!(m.format_word(&b.canonical_geodesic(&g).unwrap()), "ab");
        assert!(b.canonical_geodesic(&Element::identity()).unwrap().is_empty());
        let far = m.element("aaaa").unwrap();
        assert!(matches!(b.canonical_geodesic(&far), Err(Error::Range(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let m = model("free(2)");
        let err = enumerate_ball_with_budget(&m, 5, 100).unwrap_err();
        assert!(matches!(err, Error::Resource { budget: 100, .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn rebuild_from_parts() {
        let m = model("free(2)");
        let b = enumerate_ball(&m, 3).unwrap();
        let again = BallIndex::from_parts(&m, 3, b.elements.clone(), b.parents.clone()).unwrap();
        assert_eq!(again.sphere_offsets(), b.sphere_offsets());
        let mut shuffled = b.elements.clone();
        shuffled.swap(1, 2);
        assert!(BallIndex::from_parts(&m, 3, shuffled, b.parents.clone()).is_err());
    }
}
