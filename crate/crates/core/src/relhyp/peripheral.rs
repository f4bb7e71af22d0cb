use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{BallIndex, Element, Family, GroupModel, ModelId, TopLevel, Word};

/// Which subgroup a peripheral is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum PeripheralKind {
    Trivial,
    /// The `i`-th factor of a free or direct product (0-based).
    Factor(usize),
    /// The cyclic subgroup generated by the `j`-th generator (0-based).
    Generator(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum KeyMode {
    /// Minimal coset members drop the trailing run of subgroup letters.
    TrailingRun,
    /// Subgroup letters commute with everything else and are deleted.
    Remove,
}

#[derive(Clone, Debug)]
pub struct Peripheral {
    kind: PeripheralKind,
    mask: Vec<bool>,
    mode: KeyMode,
}

impl Peripheral {
    pub fn kind(&self) -> PeripheralKind {
        self.kind
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.iter().all(|l| self.mask[l.index()])
    }

    /// ShortLex-least element of minimal length in `g H`.
    pub fn key(&self, g: &Element) -> Element {
        let w: Word = match self.mode {
            KeyMode::TrailingRun => {
                let keep = g.iter().rposition(|l| !self.mask[l.index()]).map_or(0, |i| i + 1);
                g[..keep].iter().copied().collect()
            }
            KeyMode::Remove => g.iter().copied().filter(|l| !self.mask[l.index()]).collect(),
        };
        Element::from_word(w)
    }
}

/// A left coset `γ H_i`, identified by its canonical key.
///
/// Ordering is by key (ShortLex), then by peripheral index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    pub key: Element,
    pub index: usize,
}

/// The peripheral subgroups `H_1, …, H_m` of a model.
#[derive(Clone, Debug)]
pub struct PeripheralStructure {
    model: ModelId,
    list: Vec<Peripheral>,
}

impl PeripheralStructure {
    pub fn new(model: &GroupModel, kinds: &[PeripheralKind]) -> Result<Self> {
        let list = kinds.iter().map(|&k| build(model, k)).collect::<Result<Vec<_>>>()?;
        Ok(PeripheralStructure {
            model: model.id(),
            list,
        })
    }

    /// Parses a comma-separated list of `trivial`, `factors`, `factor(i)` and
    /// `generator(x)` (a generator letter or a 0-based index).
    pub fn parse(model: &GroupModel, desc: &str) -> Result<Self> {
        let mut kinds = Vec::new();
        for item in split_top_level(desc) {
            let item = item.trim();
            let arg = |name: &str| -> Option<String> {
                item.strip_prefix(name)
                    .map(str::trim)
                    .and_then(|r| r.strip_prefix('('))
                    .and_then(|r| r.strip_suffix(')'))
                    .map(|r| r.trim().to_string())
            };
            if item == "trivial" {
                kinds.push(PeripheralKind::Trivial);
            } else if item == "factors" {
                let n = model.family().factors().len();
                if n == 0 {
                    return Err(Error::usage("`factors` needs a free or direct product"));
                }
                kinds.extend((0..n).map(PeripheralKind::Factor));
            } else if let Some(a) = arg("factor") {
                let i = a.parse().map_err(|_| Error::usage(format!("bad factor index `{a}`")))?;
                kinds.push(PeripheralKind::Factor(i));
            } else if let Some(a) = arg("generator") {
                let j = match a.parse::<usize>() {
                    Ok(j) => j,
                    Err(_) => {
                        let letters = model.parse_word(&a)?;
                        match letters.as_slice() {
                            [l] => model.generator_of(*l).0,
                            _ => return Err(Error::usage(format!("bad generator `{a}`"))),
                        }
                    }
                };
                kinds.push(PeripheralKind::Generator(j));
            } else {
                return Err(Error::usage(format!("unknown peripheral `{item}`")));
            }
        }
        if kinds.is_empty() {
            return Err(Error::usage("empty peripheral structure"));
        }
        Self::new(model, &kinds)
    }

    pub fn model_id(&self) -> ModelId {
        self.model
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &Peripheral {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Peripheral> {
        self.list.iter()
    }

    pub fn kinds(&self) -> Vec<PeripheralKind> {
        self.list.iter().map(|p| p.kind).collect()
    }

    pub fn coset(&self, i: usize, g: &Element) -> Coset {
        Coset {
            key: self.list[i].key(g),
            index: i,
        }
    }

    /// Word-metric distance from `v` to the coset.
    pub fn distance_to(&self, model: &GroupModel, v: &Element, c: &Coset) -> usize {
        self.list[c.index].key(&model.left_divide(v, &c.key)).len()
    }

    pub fn contains(&self, c: &Coset, e: &Element) -> bool {
        self.list[c.index].key(e) == c.key
    }

    /// `H_i ∩ B(r)` in ShortLex order.
    pub fn members_in_ball(&self, i: usize, ball: &BallIndex) -> Vec<Element> {
        ball.elements()
            .iter()
            .filter(|e| self.list[i].contains(e))
            .cloned()
            .collect()
    }

    pub fn describe(&self, model: &GroupModel) -> String {
        self.list
            .iter()
            .map(|p| match p.kind {
                PeripheralKind::Trivial => "trivial".to_string(),
                PeripheralKind::Factor(i) => format!("factor({i})"),
                PeripheralKind::Generator(j) => format!(
                    "generator({})",
                    model.letter(j, false).map_or('?', |l| model.letter_name(l))
                ),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for PeripheralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeripheralKind::Trivial => f.write_str("trivial"),
            PeripheralKind::Factor(i) => write!(f, "factor({i})"),
            PeripheralKind::Generator(j) => write!(f, "generator({j})"),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(&s[start..]);
    }
    out
}

/// The factor containing generator `j`, and that factor's family.
fn factor_of_generator(family: &Family, j: usize) -> Option<(usize, &Family)> {
    let mut first = 0;
    for (i, f) in family.factors().iter().enumerate() {
        if j < first + f.rank() {
            return Some((i, f));
        }
        first += f.rank();
    }
    None
}

fn build(model: &GroupModel, kind: PeripheralKind) -> Result<Peripheral> {
    let len = model.alphabet_len();
    let unsupported = || Error::usage(format!("peripheral {kind} is not supported for {}", model.descriptor()));
    let (mask, mode) = match kind {
        PeripheralKind::Trivial => (vec![false; len], KeyMode::Remove),
        PeripheralKind::Factor(i) => {
            let mask = model.factor_letters(i).ok_or_else(unsupported)?;
            let mode = match model.top_level_kind() {
                TopLevel::FreeLike => KeyMode::TrailingRun,
                TopLevel::Commuting => KeyMode::Remove,
            };
            (mask, mode)
        }
        PeripheralKind::Generator(j) => {
            if j >= model.rank() {
                return Err(Error::usage(format!("generator index {j} out of range")));
            }
            let mut mask = vec![false; len];
            for inv in [false, true] {
                mask[model.letter(j, inv).expect("in range").index()] = true;
            }
            let mode = match model.family() {
                Family::Free(_) => KeyMode::TrailingRun,
                Family::FreeAbelian(_) | Family::Cyclic(_) => KeyMode::Remove,
                Family::FreeProduct(_) => match factor_of_generator(model.family(), j) {
                    Some((_, Family::Free(_) | Family::Cyclic(_) | Family::FreeAbelian(1))) => KeyMode::TrailingRun,
                    _ => return Err(unsupported()),
                },
                Family::DirectProduct(_) => match factor_of_generator(model.family(), j) {
                    Some((_, Family::Free(1) | Family::Cyclic(_) | Family::FreeAbelian(_))) => KeyMode::Remove,
                    _ => return Err(unsupported()),
                },
            };
            (mask, mode)
        }
    };
    Ok(Peripheral { kind, mask, mode })
}
