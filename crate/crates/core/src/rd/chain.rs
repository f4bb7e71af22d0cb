//! Step-by-step numerical trace of the bound on `‖(x*y)_p‖²` through the
//! central decompositions of the triangles `(1, h, g)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::function::{convolve, nonnegative_parts, restrict_sphere, FiniteFunction};
use super::poly::{assemble_p, PolynomialBound};
use crate::error::{Error, Result};
use crate::fit::LinearEnvelope;
use crate::group::{Element, Family, GroupModel};
use crate::relhyp::{DeltaSet, PeripheralKind, StarGeometry, Triple};

pub const CHAIN_TOLERANCE: f64 = 1e-9;

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + CHAIN_TOLERANCE * lhs.abs().max(rhs.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// The functions `X_d` and `Y_d` on the peripheral subgroup of one
/// decomposition `d = (g₁, η, g₂, i)` of `g`.
#[derive(Clone, Debug)]
pub struct XYPair {
    pub g: Element,
    pub triple: Triple,
    pub x: FiniteFunction<f64>,
    pub y: FiniteFunction<f64>,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub p: usize,
    pub r1: usize,
    pub r2: usize,
    pub norm_x_sq: f64,
    pub norm_y_sq: f64,
    /// Product pairs `(h, k)` with `x(h)y(k) > 0` and no central decomposition.
    pub missing_pairs: Vec<(Element, Element)>,
    pub steps: Vec<ChainStep>,
    /// `Q(r1)·P(r1)·‖x‖²‖y‖²`.
    pub final_bound: f64,
    pub count_bound: f64,
    pub k1: f64,
    pub p_value: f64,
    pub xy: Vec<XYPair>,
}

impl ChainReport {
    pub fn complete(&self) -> bool {
        self.missing_pairs.is_empty()
    }

    pub fn pass(&self) -> bool {
        self.complete() && self.steps.iter().all(|s| s.pass)
    }

    pub fn step(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }
}

/// Constants entering the chain besides the decompositions themselves.
#[derive(Clone, Debug)]
pub struct ChainConstants {
    /// `r1 ↦ C1·r1 + C2`, the count bound for central decompositions.
    pub envelope: LinearEnvelope,
    /// One bound per peripheral subgroup.
    pub peripheral_bounds: Vec<PolynomialBound>,
    pub k1: f64,
}

/// Default polynomial bound for convolution on a peripheral subgroup:
/// `1` for the trivial group, `√n` for a cyclic group of order `n`,
/// `(2r+1)^⌈k/2⌉` for `Z^k` (square root of the ball size) and `(r+1)²` for a
/// free group.
pub fn default_peripheral_bound(model: &GroupModel, kind: PeripheralKind) -> Result<PolynomialBound> {
    fn family_bound(f: &Family) -> Result<PolynomialBound> {
        match f {
            Family::Cyclic(n) => Ok(PolynomialBound::constant((*n as f64).sqrt())),
            Family::FreeAbelian(k) => {
                let step = PolynomialBound::linear(2.0, 1.0);
                Ok((0..k.div_ceil(2)).fold(PolynomialBound::constant(1.0), |acc, _| acc.mul(&step)))
            }
            Family::Free(_) => {
                let l = PolynomialBound::linear(1.0, 1.0);
                Ok(l.mul(&l))
            }
            other => Err(Error::usage(format!(
                "no default convolution bound for peripheral {other}; give one explicitly"
            ))),
        }
    }
    fn leaf(f: &Family, mut j: usize) -> &Family {
        for g in f.factors() {
            if j < g.rank() {
                return leaf(g, j);
            }
            j -= g.rank();
        }
        f
    }
    match kind {
        PeripheralKind::Trivial => Ok(PolynomialBound::constant(1.0)),
        PeripheralKind::Factor(i) => model
            .family()
            .factors()
            .get(i)
            .ok_or_else(|| Error::usage(format!("no factor {i}")))
            .and_then(family_bound),
        PeripheralKind::Generator(j) => match leaf(model.family(), j) {
            Family::Cyclic(n) => Ok(PolynomialBound::constant((*n as f64).sqrt())),
            _ => Ok(PolynomialBound::linear(1.0, 1.0)),
        },
    }
}

/// `K1`: the largest left multiplicity per unit of `r1` over the given sets.
/// Sets with `r1 = 0` are measured against `1`.
pub fn fit_k1(geo: &StarGeometry<'_>, sets: &[DeltaSet]) -> f64 {
    sets.iter()
        .map(|s| {
            let m = s.left_multiplicities(geo).into_values().max().unwrap_or(0);
            m as f64 / s.r1.max(1) as f64
        })
        .fold(0.0, f64::max)
}

#[derive(Default)]
struct Sides {
    a: f64,
    b: f64,
}

/// Evaluates every inequality of the chain for nonnegative `x` on `S(r1)` and
/// `y` on `S(r2)` against a precomputed `Δ` for `(p, r1, r2)`.
pub fn trace_proof_chain(
    geo: &StarGeometry<'_>,
    delta: &DeltaSet,
    x: &FiniteFunction<f64>,
    y: &FiniteFunction<f64>,
    constants: &ChainConstants,
) -> Result<ChainReport> {
    let m = geo.model;
    let (p, r1, r2) = (delta.p, delta.r1, delta.r2);
    if !x.is_nonnegative() || !y.is_nonnegative() {
        return Err(Error::usage("chain inputs must be nonnegative"));
    }
    if x.support().any(|e| e.len() != r1) || y.support().any(|e| e.len() != r2) {
        return Err(Error::usage(format!("x must live on S({r1}) and y on S({r2})")));
    }
    if constants.peripheral_bounds.len() != geo.peripherals.len() {
        return Err(Error::usage(format!(
            "{} peripheral bounds given for {} peripherals",
            constants.peripheral_bounds.len(),
            geo.peripherals.len()
        )));
    }
    let kappa = geo.constants.kappa;
    let r1f = r1 as f64;
    let cnt = constants.envelope.eval(r1f);
    let p_poly = assemble_p(&constants.peripheral_bounds, kappa);
    let p_value = p_poly.eval(r1f);
    let k1r = constants.k1 * r1.max(1) as f64;

    let lhs = restrict_sphere(&convolve(m, x, y)?, p).norm_sq();
    let missing_pairs: Vec<(Element, Element)> = delta
        .missing()
        .filter(|(h, k)| x.value(h) * y.value(k) > 0.0)
        .cloned()
        .collect();

    let (mut t1, mut t2a, mut sum_inner, mut sum_cs, mut sum_xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut s_conv, mut s_p, mut s_n) = (0.0, 0.0, 0.0);
    let mut support_ok = true;
    let mut regroup: BTreeMap<(Element, Element), Sides> = BTreeMap::new();
    // Distinct (g₁, η, i, η′, g₃) and (g₂, η, i, η″, g₃) with their squared values.
    let mut left_set: BTreeMap<(&Element, &Element, usize, &Element, &Element), f64> = BTreeMap::new();
    let mut right_set: BTreeMap<(&Element, &Element, usize, &Element, &Element), f64> = BTreeMap::new();
    let mut xy = Vec::new();
    let radius = r1 + 2 * kappa;

    for (g, idx) in &delta.per_g {
        let mut row = 0.0;
        let mut row_sq = 0.0;
        for (d, companions) in &idx.decompositions {
            let mut inner = 0.0;
            // C_d(e) grouped by e = (η′, η″).
            let mut by_e: BTreeMap<(&Element, &Element), (f64, f64)> = BTreeMap::new();
            for c in companions {
                let h = m.mul(&m.mul(&d.g1, &c.eta1), &c.g3);
                let k = m.left_divide(&c.g3, &m.mul(&c.eta2, &d.g2));
                let (xv, yv) = (x.value(&h), y.value(&k));
                inner += xv * yv;
                let e = by_e.entry((&c.eta1, &c.eta2)).or_default();
                e.0 += xv * xv;
                e.1 += yv * yv;
                left_set.insert((&d.g1, &d.eta, d.index, &c.eta1, &c.g3), xv * xv);
                right_set.insert((&d.g2, &d.eta, d.index, &c.eta2, &c.g3), yv * yv);
            }
            row += inner;
            row_sq += inner * inner;
            let cs: f64 = by_e.values().map(|(a, b)| a.sqrt() * b.sqrt()).sum();
            sum_cs += cs * cs;

            let xd = FiniteFunction::from_pairs(m, by_e.iter().map(|((e1, _), (a, _))| ((*e1).clone(), a.sqrt())));
            let yd = FiniteFunction::from_pairs(m, by_e.iter().map(|((_, e2), (_, b))| ((*e2).clone(), b.sqrt())));
            let conv = convolve(m, &xd, &yd)?;
            let at_eta = conv.value(&d.eta);
            sum_xy += at_eta * at_eta;
            s_conv += conv.norm_sq();
            support_ok &= xd.radius() <= radius;
            let pi = constants.peripheral_bounds[d.index].eval(radius as f64);
            let (nx, ny) = (xd.norm_sq(), yd.norm_sq());
            s_p += pi * pi * nx * ny;
            s_n += nx * ny;
            let side = regroup.entry((d.g1.clone(), d.g2.clone())).or_default();
            side.a += nx;
            side.b += ny;
            xy.push(XYPair {
                g: g.clone(),
                triple: d.clone(),
                x: xd,
                y: yd,
            });
        }
        t1 += row * row;
        t2a += idx.count() as f64 * row_sq;
        sum_inner += row_sq;
    }
    let s_e: f64 = regroup.values().map(|s| s.a * s.b).sum();
    let a_set: f64 = left_set.values().sum();
    let b_set: f64 = right_set.values().sum();
    let m_x = delta.left_multiplicities(geo).into_values().max().unwrap_or(0) as f64;
    let m_y = delta.right_multiplicities(geo).into_values().max().unwrap_or(0) as f64;
    let (nx, ny) = (x.norm_sq(), y.norm_sq());
    let q = k1r * cnt * cnt;
    let final_bound = q * p_value * nx * ny;
    let max_count = delta.max_count().map_or(0, |(c, _)| c) as f64;

    let step = |name, lhs: f64, rhs: f64| ChainStep {
        name,
        lhs,
        rhs,
        pass: holds(lhs, rhs),
    };
    let mut steps = vec![
        step("expand", lhs, t1),
        step("quadratic-mean", t1, t2a),
        step("count", t2a, cnt * sum_inner),
        step("decomposition-count", max_count, cnt),
        step("cauchy-schwarz", cnt * sum_inner, cnt * sum_cs),
        step("xy-factor", cnt * sum_cs, cnt * sum_xy),
        step("two-sums", cnt * sum_xy, cnt * sum_cs),
        step("convolution", sum_xy, s_conv),
        step("peripheral", s_conv, s_p),
        step("assembled", s_p, p_value * s_n),
        step("regroup", s_n, s_e),
        step("split", s_e, a_set * b_set),
        step("left-multiplicity", a_set, m_x * nx),
        step("left-count", m_x, k1r),
        step("right-multiplicity", b_set, m_y * ny),
        step("right-count", m_y, cnt),
        step("final", lhs, final_bound),
    ];
    if !support_ok {
        let s = steps.iter_mut().find(|s| s.name == "peripheral").expect("step exists");
        s.pass = false;
    }
    Ok(ChainReport {
        p,
        r1,
        r2,
        norm_x_sq: nx,
        norm_y_sq: ny,
        missing_pairs,
        steps,
        final_bound,
        count_bound: cnt,
        k1: constants.k1,
        p_value,
        xy,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub norm_x: f64,
    pub norm_phi: f64,
    /// `‖x*φ‖`.
    pub lhs: f64,
    /// `‖x*φ_i‖` for the four nonnegative parts.
    pub part_values: [f64; 4],
    pub part_norms: [f64; 4],
    /// `‖φ‖² = Σ‖φ_i‖²`.
    pub orthogonal: bool,
    /// `‖x*φ‖ ≤ Σ‖x*φ_i‖`.
    pub triangle: bool,
    /// Every part satisfies `‖x*φ_i‖ ≤ P·‖x‖·‖φ_i‖`.
    pub premise: bool,
    /// `‖x*φ‖ ≤ 2P·‖x‖·‖φ‖`.
    pub factor_two: bool,
    pub bound: f64,
}

impl ReductionReport {
    pub fn pass(&self) -> bool {
        self.orthogonal && self.triangle && (!self.premise || self.factor_two)
    }
}

/// Checks the passage from nonnegative to complex test functions.
pub fn complex_reduction_check(
    model: &GroupModel,
    x: &FiniteFunction<f64>,
    phi: &FiniteFunction<Complex64>,
    p_value: f64,
) -> Result<ReductionReport> {
    if !x.is_nonnegative() {
        return Err(Error::usage("x must be nonnegative"));
    }
    let xc = x.map(|v| Complex64::new(*v, 0.0));
    let lhs = convolve(model, &xc, phi)?.norm();
    let parts = nonnegative_parts(phi);
    let mut part_values = [0.0; 4];
    let mut part_norms = [0.0; 4];
    for (k, part) in parts.iter().enumerate() {
        part_values[k] = convolve(model, x, part)?.norm();
        part_norms[k] = part.norm();
    }
    let (norm_x, norm_phi) = (x.norm(), phi.norm());
    let parts_sq: f64 = part_norms.iter().map(|n| n * n).sum();
    let sum: f64 = part_values.iter().sum();
    let bound = 2.0 * p_value * norm_x * norm_phi;
    Ok(ReductionReport {
        norm_x,
        norm_phi,
        lhs,
        part_values,
        part_norms,
        orthogonal: (parts_sq - norm_phi * norm_phi).abs() <= CHAIN_TOLERANCE * parts_sq.max(1.0),
        triangle: holds(lhs, sum),
        premise: part_values
            .iter()
            .zip(&part_norms)
            .all(|(v, n)| holds(*v, p_value * norm_x * n)),
        factor_two: holds(lhs, bound),
        bound,
    })
}
