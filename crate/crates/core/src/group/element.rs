use std::cmp::Ordering;
use std::ops::Deref;

use smallvec::SmallVec;

/// A letter of the generator alphabet.
///
/// The wrapped value is the letter's position in the model's total order, so
/// comparing letters compares them in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u16);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) type Word = SmallVec<[Letter; 16]>;

/// A group element, stored as its normal-form word.
///
/// Normal forms are ShortLex-least geodesic words, so the word length of an
/// element is the length of its normal form. `Ord` is ShortLex: shorter
/// words first, then lexicographic in letter order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Element(pub(crate) Word);

impl Element {
    pub fn identity() -> Self {
        Element(Word::new())
    }

    pub(crate) fn from_word(w: Word) -> Self {
        Element(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Word length with respect to the model's generators.
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Deref for Element {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(xs: &[u16]) -> Element {
        Element(xs.iter().map(|&x| Letter(x)).collect())
    }

    #[test]
    fn shortlex_order() {
        assert!(el(&[]) < el(&[3]));
        assert!(el(&[3]) < el(&[0, 0]));
        assert!(el(&[0, 2]) < el(&[1, 0]));
        assert_eq!(el(&[1, 2]).cmp(&el(&[1, 2])), Ordering::Equal);
    }
}
