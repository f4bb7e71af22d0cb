use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Element, GroupModel, ModelId};

/// Scalar types a [`FiniteFunction`] can take values in.
pub trait Value: Clone + Debug + PartialEq + Zero + Add<Output = Self> + Mul<Output = Self> + Send + Sync {
    fn is_nonnegative(&self) -> bool;
    /// `|v|²` as a float.
    fn abs_sq(&self) -> f64;
}

impl Value for f64 {
    fn is_nonnegative(&self) -> bool {
        *self >= 0.0
    }

    fn abs_sq(&self) -> f64 {
        self * self
    }
}

impl Value for BigRational {
    fn is_nonnegative(&self) -> bool {
        !self.is_negative()
    }

    fn abs_sq(&self) -> f64 {
        let f = num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN);
        f * f
    }
}

impl Value for Complex64 {
    fn is_nonnegative(&self) -> bool {
        self.im == 0.0 && self.re >= 0.0
    }

    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
}

/// A finitely supported function on the group. Zero values are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFunction<V> {
    model: ModelId,
    values: BTreeMap<Element, V>,
    nonnegative: bool,
}

impl<V: Value> FiniteFunction<V> {
    pub fn zero(model: &GroupModel) -> Self {
        FiniteFunction {
            model: model.id(),
            values: BTreeMap::new(),
            nonnegative: false,
        }
    }

    /// Sums values given for the same element and drops zeros.
    pub fn from_pairs(model: &GroupModel, pairs: impl IntoIterator<Item = (Element, V)>) -> Self {
        let mut f = Self::zero(model);
        for (e, v) in pairs {
            f.add_at(e, v);
        }
        f
    }

    /// Marks the function as nonnegative after checking every value.
    pub fn into_nonnegative(mut self) -> Result<Self> {
        if let Some((_, v)) = self.values.iter().find(|(_, v)| !v.is_nonnegative()) {
            return Err(Error::usage(format!("value {v:?} is not nonnegative")));
        }
        self.nonnegative = true;
        Ok(self)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative || self.values.values().all(Value::is_nonnegative)
    }

    pub fn model_id(&self) -> ModelId {
        self.model
    }

    pub fn get(&self, e: &Element) -> Option<&V> {
        self.values.get(e)
    }

    pub fn value(&self, e: &Element) -> V {
        self.values.get(e).cloned().unwrap_or_else(V::zero)
    }

    pub fn set(&mut self, e: Element, v: V) -> Result<()> {
        if self.nonnegative && !v.is_nonnegative() {
            return Err(Error::usage("negative value in a nonnegative function"));
        }
        if v.is_zero() {
            self.values.remove(&e);
        } else {
            self.values.insert(e, v);
        }
        Ok(())
    }

    fn add_at(&mut self, e: Element, v: V) {
        let cur = self.values.remove(&e).unwrap_or_else(V::zero);
        let next = cur + v;
        if !next.is_zero() {
            self.values.insert(e, next);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &V)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest word length in the support.
    pub fn radius(&self) -> usize {
        self.values.keys().map(Element::len).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.values().map(Value::abs_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.values().map(|v| v.abs_sq().sqrt()).sum()
    }

    pub fn map<W: Value>(&self, f: impl Fn(&V) -> W) -> FiniteFunction<W> {
        FiniteFunction {
            model: self.model,
            values: self
                .values
                .iter()
                .map(|(e, v)| (e.clone(), f(v)))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
            nonnegative: false,
        }
    }
}

impl<V: Value + One> FiniteFunction<V> {
    /// Indicator function of a set of elements.
    pub fn indicator<'e>(model: &GroupModel, elements: impl IntoIterator<Item = &'e Element>) -> Self {
        let mut f = Self::from_pairs(model, elements.into_iter().map(|e| (e.clone(), V::one())));
        f.nonnegative = true;
        f
    }

    pub fn delta(model: &GroupModel, e: &Element) -> Self {
        Self::indicator(model, [e])
    }
}

impl FiniteFunction<BigRational> {
    pub fn norm_sq_exact(&self) -> BigRational {
        self.values.values().fold(BigRational::zero(), |acc, v| acc + v * v)
    }
}

impl FiniteFunction<f64> {
    /// Uniform values in `(0, 1]` on the given elements.
    pub fn random_nonnegative<'e, R: Rng>(
        model: &GroupModel,
        elements: impl IntoIterator<Item = &'e Element>,
        rng: &mut R,
    ) -> Self {
        let mut f = Self::from_pairs(model, elements.into_iter().map(|e| (e.clone(), 1.0 - rng.gen::<f64>())));
        f.nonnegative = true;
        f
    }
}

fn same_model<V, W>(model: &GroupModel, x: &FiniteFunction<V>, y: &FiniteFunction<W>) -> Result<()> {
    if x.model != model.id() || y.model != model.id() {
        return Err(Error::usage("functions belong to different models"));
    }
    Ok(())
}

/// `(x*y)(g) = Σ_{hk=g} x(h) y(k)`, accumulated in ShortLex order of `(h, k)`.
pub fn convolve<V: Value>(
    model: &GroupModel,
    x: &FiniteFunction<V>,
    y: &FiniteFunction<V>,
) -> Result<FiniteFunction<V>> {
    same_model(model, x, y)?;
    let mut acc: HashMap<Element, V> = HashMap::new();
    for (h, a) in &x.values {
        for (k, b) in &y.values {
            let g = model.mul(h, k);
            let term = a.clone() * b.clone();
            match acc.get_mut(&g) {
                Some(v) => *v = v.clone() + term,
                None => {
                    acc.insert(g, term);
                }
            }
        }
    }
    let values: BTreeMap<Element, V> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    Ok(FiniteFunction {
        model: x.model,
        values,
        nonnegative: x.nonnegative && y.nonnegative,
    })
}

/// `f_p`: the restriction of `f` to the sphere `S(p)`.
pub fn restrict_sphere<V: Value>(f: &FiniteFunction<V>, p: usize) -> FiniteFunction<V> {
    FiniteFunction {
        model: f.model,
        values: f
            .values
            .iter()
            .filter(|(e, _)| e.len() == p)
            .map(|(e, v)| (e.clone(), v.clone()))
            .collect(),
        nonnegative: f.nonnegative,
    }
}

/// Splits `φ` into nonnegative parts with `φ = φ₁ − φ₂ + i(φ₃ − φ₄)`.
pub fn nonnegative_parts(phi: &FiniteFunction<Complex64>) -> [FiniteFunction<f64>; 4] {
    let part = |f: fn(&Complex64) -> f64| {
        let mut g = phi.map(f);
        g.nonnegative = true;
        g
    };
    [
        part(|v| v.re.max(0.0)),
        part(|v| (-v.re).max(0.0)),
        part(|v| v.im.max(0.0)),
        part(|v| (-v.im).max(0.0)),
    ]
}
