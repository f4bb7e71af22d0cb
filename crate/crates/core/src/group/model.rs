//! Finitely generated groups with a computable ShortLex normal form.
//!
//! Every family builds a tree of [`Node`]s. A word is normalized by folding
//! its letters into a per-family [`State`] and emitting the ShortLex-least
//! geodesic word of the resulting element:
//!
//! - free groups keep a freely reduced word;
//! - free abelian groups keep an exponent vector and emit its letters sorted;
//! - cyclic groups keep a residue and emit the shorter power;
//! - free products keep alternating syllables, one factor state each;
//! - direct products keep one state per factor and emit the greedy merge of
//!   the factor words (factor alphabets are disjoint).

use std::fmt;

use sha2::{Digest, Sha256};
use smallvec::SmallVec;

use super::element::{Element, Letter, Word};
use super::family::Family;
use crate::error::{Error, Result};

/// Largest supported number of generators; letters are named `a`..`z` and
/// their inverses `A`..`Z`.
pub const MAX_GENERATORS: usize = 26;

/// Stable fingerprint of a model (descriptor plus generator order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelId(pub u64);

#[derive(Clone, Debug)]
pub struct GroupModel {
    family: Family,
    /// `order[rank]` is the natural code `2j + inverse` of the letter ranked `rank`.
    order: Vec<usize>,
    inverse: Vec<Letter>,
    root: Node,
    id: ModelId,
}

#[derive(Clone, Debug)]
enum Node {
    Free,
    Cyclic {
        n: u64,
        gen: Letter,
        inv: Letter,
    },
    Abelian {
        /// (generator letter, inverse letter) per coordinate.
        gens: Vec<(Letter, Letter)>,
        /// Indexed by letter: (coordinate, +1 / -1).
        coord: Vec<(u16, i8)>,
    },
    FreeProduct {
        children: Vec<Node>,
        factor_of: Vec<u8>,
    },
    Direct {
        children: Vec<Node>,
        factor_of: Vec<u8>,
    },
}

#[derive(Clone, Debug)]
enum State {
    Free(Word),
    Cyclic(u64),
    Abelian(SmallVec<[i64; 4]>),
    FreeProduct(Vec<(u8, State)>),
    Direct(Vec<State>),
}

impl Node {
    fn identity(&self) -> State {
        match self {
            Node::Free => State::Free(Word::new()),
            Node::Cyclic { .. } => State::Cyclic(0),
            Node::Abelian { gens, .. } => State::Abelian(SmallVec::from_elem(0, gens.len())),
            Node::FreeProduct { .. } => State::FreeProduct(Vec::new()),
            Node::Direct { children, .. } => State::Direct(children.iter().map(Node::identity).collect()),
        }
    }

    fn is_identity(&self, st: &State) -> bool {
        match (self, st) {
            (Node::Free, State::Free(w)) => w.is_empty(),
            (Node::Cyclic { .. }, State::Cyclic(e)) => *e == 0,
            (Node::Abelian { .. }, State::Abelian(v)) => v.iter().all(|&x| x == 0),
            (Node::FreeProduct { .. }, State::FreeProduct(s)) => s.is_empty(),
            (Node::Direct { children, .. }, State::Direct(s)) => children.iter().zip(s).all(|(c, x)| c.is_identity(x)),
            _ => unreachable!("state does not match node"),
        }
    }

    fn push(&self, st: &mut State, l: Letter, inverse: &[Letter]) {
        match (self, st) {
            (Node::Free, State::Free(w)) => {
                if w.last() == Some(&inverse[l.index()]) {
                    w.pop();
                } else {
                    w.push(l);
                }
            }
            (Node::Cyclic { n, gen, .. }, State::Cyclic(e)) => {
                *e = if l == *gen { (*e + 1) % n } else { (*e + n - 1) % n };
            }
            (Node::Abelian { coord, .. }, State::Abelian(v)) => {
                let (c, s) = coord[l.index()];
                v[c as usize] += s as i64;
            }
            (Node::FreeProduct { children, factor_of }, State::FreeProduct(syl)) => {
                let f = factor_of[l.index()];
                let child = &children[f as usize];
                match syl.last_mut() {
                    Some((lf, s)) if *lf == f => {
                        child.push(s, l, inverse);
                        if child.is_identity(s) {
                            syl.pop();
                        }
                    }
                    _ => {
                        let mut s = child.identity();
                        child.push(&mut s, l, inverse);
                        if !child.is_identity(&s) {
                            syl.push((f, s));
                        }
                    }
                }
            }
            (Node::Direct { children, factor_of }, State::Direct(parts)) => {
                let f = factor_of[l.index()] as usize;
                children[f].push(&mut parts[f], l, inverse);
            }
            _ => unreachable!("state does not match node"),
        }
    }

    fn emit(&self, st: &State, out: &mut Word) {
        match (self, st) {
            (Node::Free, State::Free(w)) => out.extend_from_slice(w),
            (Node::Cyclic { n, gen, inv }, State::Cyclic(e)) => {
                if *e == 0 {
                    return;
                }
                let up = *e;
                let down = n - e;
                let (letter, count) = match up.cmp(&down) {
                    std::cmp::Ordering::Less => (*gen, up),
                    std::cmp::Ordering::Greater => (*inv, down),
                    std::cmp::Ordering::Equal => ((*gen).min(*inv), up),
                };
                out.extend(std::iter::repeat_n(letter, count as usize));
            }
            (Node::Abelian { gens, .. }, State::Abelian(v)) => {
                let mut runs: SmallVec<[(Letter, u64); 8]> = v
                    .iter()
                    .zip(gens)
                    .filter(|(&x, _)| x != 0)
                    .map(|(&x, &(g, gi))| if x > 0 { (g, x as u64) } else { (gi, x.unsigned_abs()) })
                    .collect();
                runs.sort_unstable();
                for (l, k) in runs {
                    out.extend(std::iter::repeat_n(l, k as usize));
                }
            }
            (Node::FreeProduct { children, .. }, State::FreeProduct(syl)) => {
                for (f, s) in syl {
                    children[*f as usize].emit(s, out);
                }
            }
            (Node::Direct { children, .. }, State::Direct(parts)) => {
                let words: SmallVec<[Word; 4]> = children
                    .iter()
                    .zip(parts)
                    .map(|(c, s)| {
                        let mut w = Word::new();
                        c.emit(s, &mut w);
                        w
                    })
                    .collect();
                let mut heads: SmallVec<[usize; 4]> = SmallVec::from_elem(0, words.len());
                loop {
                    let mut best: Option<(Letter, usize)> = None;
                    for (i, w) in words.iter().enumerate() {
                        if let Some(&l) = w.get(heads[i]) {
                            if best.is_none_or(|(b, _)| l < b) {
                                best = Some((l, i));
                            }
                        }
                    }
                    match best {
                        Some((l, i)) => {
                            out.push(l);
                            heads[i] += 1;
                        }
                        None => break,
                    }
                }
            }
            _ => unreachable!("state does not match node"),
        }
    }
}

/// Incremental right multiplication by letters, starting from an element.
pub struct Cursor<'m> {
    model: &'m GroupModel,
    state: State,
}

impl Cursor<'_> {
    #[inline]
    pub fn push(&mut self, l: Letter) {
        self.model.root.push(&mut self.state, l, &self.model.inverse);
    }

    pub fn push_all(&mut self, word: &[Letter]) {
        for &l in word {
            self.push(l);
        }
    }

    pub fn element(&self) -> Element {
        let mut w = Word::new();
        self.model.root.emit(&self.state, &mut w);
        Element::from_word(w)
    }

    pub fn is_identity(&self) -> bool {
        self.model.root.is_identity(&self.state)
    }
}

impl GroupModel {
    pub fn new(family: Family) -> Result<Self> {
        let n = family.rank();
        if n > MAX_GENERATORS {
            return Err(Error::Alphabet(format!(
                "{n} generators requested; at most {MAX_GENERATORS} are supported"
            )));
        }
        let order = (0..2 * n).collect();
        Self::build(family, order)
    }

    /// Builds a model with an explicit total order on the letters, given as
    /// a string listing every letter once, e.g. `"bBaA"`.
    pub fn with_order(family: Family, order: &str) -> Result<Self> {
        let n = family.rank();
        if n > MAX_GENERATORS {
            return Err(Error::Alphabet(format!(
                "{n} generators requested; at most {MAX_GENERATORS} are supported"
            )));
        }
        let mut codes = Vec::with_capacity(2 * n);
        let mut seen = vec![false; 2 * n];
        for c in order.chars().filter(|c| !c.is_whitespace()) {
            let code = letter_code(c)
                .filter(|&k| k < 2 * n)
                .ok_or_else(|| Error::Alphabet(format!("`{c}` is not a letter of a rank-{n} alphabet")))?;
            if std::mem::replace(&mut seen[code], true) {
                return Err(Error::Alphabet(format!("letter `{c}` listed twice in the order")));
            }
            codes.push(code);
        }
        if codes.len() != 2 * n {
            return Err(Error::Alphabet(format!(
                "generator order must list all {} letters",
                2 * n
            )));
        }
        Self::build(family, codes)
    }

    pub fn parse(descriptor: &str) -> Result<Self> {
        Self::new(descriptor.parse()?)
    }

    fn build(family: Family, order: Vec<usize>) -> Result<Self> {
        let len = order.len();
        let mut rank_of = vec![Letter(0); len];
        for (r, &code) in order.iter().enumerate() {
            rank_of[code] = Letter(r as u16);
        }
        let inverse = order.iter().map(|&code| rank_of[code ^ 1]).collect();
        let mut next_gen = 0usize;
        let root = build_node(&family, &rank_of, &mut next_gen, len);
        let mut model = GroupModel {
            family,
            order,
            inverse,
            root,
            id: ModelId(0),
        };
        let mut hasher = Sha256::new();
        hasher.update(model.descriptor().as_bytes());
        hasher.update(b" ");
        hasher.update(model.order_string().as_bytes());
        let digest = hasher.finalize();
        model.id = ModelId(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")));
        Ok(model)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Canonical family descriptor, without whitespace.
    pub fn descriptor(&self) -> String {
        self.family.to_string()
    }

    /// The letter order as a string of letter names, e.g. `"aAbB"`.
    pub fn order_string(&self) -> String {
        self.order.iter().map(|&c| code_name(c)).collect()
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.order.len() / 2
    }

    pub fn alphabet_len(&self) -> usize {
        self.order.len()
    }

    /// All letters, in the model's total order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.order.len()).map(|r| Letter(r as u16))
    }

    pub fn inverse_letter(&self, l: Letter) -> Letter {
        self.inverse[l.index()]
    }

    /// Index of the generator a letter belongs to (in descriptor order) and
    /// whether it is the formal inverse.
    pub fn generator_of(&self, l: Letter) -> (usize, bool) {
        let code = self.order[l.index()];
        (code / 2, code % 2 == 1)
    }

    pub fn letter(&self, generator: usize, inverse: bool) -> Option<Letter> {
        let code = 2 * generator + inverse as usize;
        self.order.iter().position(|&c| c == code).map(|r| Letter(r as u16))
    }

    pub fn letter_name(&self, l: Letter) -> char {
        code_name(self.order[l.index()])
    }

    pub fn identity(&self) -> Element {
        Element::identity()
    }

    pub fn cursor(&self, start: &Element) -> Cursor<'_> {
        let mut c = Cursor {
            model: self,
            state: self.root.identity(),
        };
        c.push_all(start);
        c
    }

    fn check_letters(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|l| l.index() >= self.order.len()) {
            Some(l) => Err(Error::Alphabet(format!(
                "letter index {} outside an alphabet of {} letters",
                l.0,
                self.order.len()
            ))),
            None => Ok(()),
        }
    }

    /// Normal form of an arbitrary word over the alphabet.
    pub fn normalize(&self, word: &[Letter]) -> Result<Element> {
        self.check_letters(word)?;
        let mut c = self.cursor(&Element::identity());
        c.push_all(word);
        Ok(c.element())
    }

    /// Parses a word such as `"aBa"` (uppercase letters are inverses; `1`
    /// or the empty string is the identity; whitespace and `.` are ignored).
    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>> {
        let s = s.trim();
        if s == "1" {
            return Ok(Vec::new());
        }
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '.')
            .map(|c| {
                letter_code(c)
                    .filter(|&k| k < self.order.len())
                    .map(|k| Letter(self.order.iter().position(|&o| o == k).expect("permutation") as u16))
                    .ok_or_else(|| Error::Alphabet(format!("unknown letter `{c}`")))
            })
            .collect()
    }

    pub fn element(&self, s: &str) -> Result<Element> {
        self.normalize(&self.parse_word(s)?)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter().map(|&l| self.letter_name(l)).collect()
    }

    pub fn format(&self, e: &Element) -> String {
        self.format_word(e)
    }

    /// Group product with a membership check on both operands.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_letters(a)
            .and_then(|_| self.check_letters(b))
            .map_err(|_| Error::usage("operands do not belong to this model"))?;
        Ok(self.mul(a, b))
    }

    /// Group product without operand validation.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut c = self.cursor(a);
        c.push_all(b);
        c.element()
    }

    pub fn mul_letter(&self, a: &Element, l: Letter) -> Element {
        let mut c = self.cursor(a);
        c.push(l);
        c.element()
    }

    pub fn inverse(&self, a: &Element) -> Element {
        let mut c = self.cursor(&Element::identity());
        for &l in a.iter().rev() {
            c.push(self.inverse[l.index()]);
        }
        c.element()
    }

    /// `a⁻¹ b`.
    pub fn left_divide(&self, a: &Element, b: &Element) -> Element {
        let mut c = self.cursor(&Element::identity());
        for &l in a.iter().rev() {
            c.push(self.inverse[l.index()]);
        }
        c.push_all(b);
        c.element()
    }

    pub fn word_length(&self, a: &Element) -> usize {
        a.len()
    }

    /// Word-metric distance `L(a⁻¹ b)`.
    pub fn distance(&self, a: &Element, b: &Element) -> usize {
        self.left_divide(a, b).len()
    }

    pub(crate) fn top_level_kind(&self) -> TopLevel {
        match self.root {
            Node::Free | Node::FreeProduct { .. } => TopLevel::FreeLike,
            _ => TopLevel::Commuting,
        }
    }

    /// Letters belonging to the `i`-th factor of a product model.
    pub(crate) fn factor_letters(&self, i: usize) -> Option<Vec<bool>> {
        match &self.root {
            Node::FreeProduct { children, factor_of } | Node::Direct { children, factor_of } => {
                (i < children.len()).then(|| factor_of.iter().map(|&f| f as usize == i).collect())
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TopLevel {
    /// Free groups and free products: coset representatives strip a suffix.
    FreeLike,
    /// Abelian, cyclic and direct products: factors commute with the rest.
    Commuting,
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.descriptor(), self.order_string())
    }
}

fn code_name(code: usize) -> char {
    let c = (b'a' + (code / 2) as u8) as char;
    if code % 2 == 1 {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

fn letter_code(c: char) -> Option<usize> {
    if c.is_ascii_lowercase() {
        Some(2 * (c as usize - 'a' as usize))
    } else if c.is_ascii_uppercase() {
        Some(2 * (c as usize - 'A' as usize) + 1)
    } else {
        None
    }
}

fn build_node(f: &Family, rank_of: &[Letter], next_gen: &mut usize, len: usize) -> Node {
    let mut take = || {
        let j = *next_gen;
        *next_gen += 1;
        (rank_of[2 * j], rank_of[2 * j + 1])
    };
    match f {
        Family::Free(n) => {
            for _ in 0..*n {
                take();
            }
            Node::Free
        }
        Family::Cyclic(n) => {
            let (gen, inv) = take();
            Node::Cyclic { n: *n, gen, inv }
        }
        Family::FreeAbelian(k) => {
            let mut coord = vec![(0u16, 0i8); len];
            let gens: Vec<_> = (0..*k)
                .map(|c| {
                    let (g, gi) = take();
                    coord[g.index()] = (c as u16, 1);
                    coord[gi.index()] = (c as u16, -1);
                    (g, gi)
                })
                .collect();
            Node::Abelian { gens, coord }
        }
        Family::FreeProduct(fs) | Family::DirectProduct(fs) => {
            let mut factor_of = vec![u8::MAX; len];
            let children = fs
                .iter()
                .enumerate()
                .map(|(i, sub)| {
                    let first = *next_gen;
                    let child = build_node(sub, rank_of, next_gen, len);
                    for j in first..*next_gen {
                        factor_of[rank_of[2 * j].index()] = i as u8;
                        factor_of[rank_of[2 * j + 1].index()] = i as u8;
                    }
                    child
                })
                .collect();
            if matches!(f, Family::FreeProduct(_)) {
                Node::FreeProduct { children, factor_of }
            } else {
                Node::Direct { children, factor_of }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: &str) -> GroupModel {
        GroupModel::parse(s).unwrap()
    }

    fn nf(m: &GroupModel, w: &str) -> String {
        m.format(&m.element(w).unwrap())
    }

    #[test]
    fn free_reduction() {
        let m = model("free(2)");
        assert_eq!(nf(&m, "aAb"), "b");
        assert_eq!(nf(&m, ""), "1");
        assert_eq!(nf(&m, "abBA"), "1");
    }

    #[test]
    fn abelian_collection() {
        let m = model("free-abelian(2)");
        assert_eq!(nf(&m, "aba"), "aab");
        assert_eq!(nf(&m, "bAAb"), "AAbb");
        let e = m.element("aaabbbb").unwrap();
        assert_eq!(m.format(&m.inverse(&e)), "AAABBBB");
        assert_eq!(m.word_length(&e), 7);
    }

    #[test]
    fn cyclic_prefers_shorter_power_and_smaller_letter_on_ties() {
        let m = model("cyclic(7)");
        assert_eq!(nf(&m, "aaaa"), "AAA");
        assert_eq!(nf(&m, "aaaaaaa"), "1");
        let m = model("cyclic(4)");
        assert_eq!(nf(&m, "AA"), "aa");
        let m = GroupModel::with_order("cyclic(4)".parse().unwrap(), "Aa").unwrap();
        assert_eq!(nf(&m, "aa"), "AA");
        let m = model("cyclic(1)");
        assert_eq!(nf(&m, "aAa"), "1");
    }

    #[test]
    fn free_product_syllables() {
        let m = model("free-product(free-abelian(1),free-abelian(1))");
        assert_eq!(nf(&m, "abBa"), "aa");
        assert_eq!(nf(&m, "aAb"), "b");
        let m = model("free-product(cyclic(2),cyclic(3))");
        assert_eq!(nf(&m, "aa"), "1");
        assert_eq!(nf(&m, "abbab"), "aBab");
    }

    #[test]
    fn direct_product_merges_with_custom_order() {
        let fam: Family = "direct-product(free(1),free(1))".parse().unwrap();
        let m = GroupModel::with_order(fam, "bBaA").unwrap();
        assert_eq!(nf(&m, "ab"), "ba");
        let m = model("direct-product(free(1),free(1))");
        assert_eq!(nf(&m, "ba"), "ab");
    }

    #[test]
    fn multiply_and_inverse() {
        let m = model("free(2)");
        let a = m.element("a").unwrap();
        let ai = m.inverse(&a);
        assert!(m.multiply(&a, &ai).unwrap().is_identity());
        let ab = m.element("ab").unwrap();
        assert_eq!(m.format(&m.inverse(&ab)), "BA");
        assert!(m.inverse(&Element::identity()).is_identity());
        let z2 = model("free-abelian(2)");
        let x = z2.element("a").unwrap();
        let y = z2.element("b").unwrap();
        assert_eq!(z2.format(&z2.mul(&x, &y)), "ab");
    }

    #[test]
    fn alphabet_errors() {
        let m = model("free(2)");
        assert!(matches!(m.element("c"), Err(Error::Alphabet(_))));
        assert!(matches!(m.normalize(&[Letter(4)]), Err(Error::Alphabet(_))));
        let big = model("free(3)");
        let c = big.element("c").unwrap();
        assert!(matches!(m.multiply(&c, &c), Err(Error::Usage(_))));
        assert!(GroupModel::with_order("free(2)".parse().unwrap(), "aAb").is_err());
        assert!(GroupModel::with_order("free(2)".parse().unwrap(), "aAbb").is_err());
    }

    #[test]
    fn fingerprint_tracks_order() {
        let f: Family = "free(2)".parse().unwrap();
        let a = GroupModel::new(f.clone()).unwrap();
        let b = GroupModel::with_order(f.clone(), "aAbB").unwrap();
        let c = GroupModel::with_order(f, "bBaA").unwrap();
        assert_eq!(a.id(), b.id());
        assert_ne!(a.id(), c.id());
        assert_eq!(c.order_string(), "bBaA");
    }
}
