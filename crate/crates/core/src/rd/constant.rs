use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::function::FiniteFunction;
use crate::error::{Error, Result};
use crate::group::{BallIndex, Element, GroupModel};
use crate::seed::rng_for;

pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 20_000;
/// Largest `|S(r1)|·|S(r2)|` accepted by [`brute_constant`].
pub const BRUTE_MAX_DIMENSION: usize = 36;

/// The bilinear map `(x, y) ↦ (x*y)_p` on sphere-supported functions, stored as
/// the list of `(i, j, row)` with `s_i t_j` the `row`-th element of `S(p)`.
#[derive(Clone, Debug)]
pub struct SphereTensor {
    pub r1: usize,
    pub r2: usize,
    pub p: usize,
    left: Vec<Element>,
    right: Vec<Element>,
    rows: usize,
    triples: Vec<(u32, u32, u32)>,
}

impl SphereTensor {
    pub fn build(model: &GroupModel, ball: &BallIndex, r1: usize, r2: usize, p: usize) -> Result<Self> {
        if ball.model_id() != model.id() {
            return Err(Error::usage("ball belongs to a different model"));
        }
        let need = r1.max(r2).max(p);
        if ball.radius() < need {
            return Err(Error::Range(format!(
                "ball of radius {} is too small, need radius {need}",
                ball.radius()
            )));
        }
        let left = ball.sphere(r1).to_vec();
        let right = ball.sphere(r2).to_vec();
        let base = ball.sphere_range(p).start;
        let mut triples = Vec::new();
        if p >= r1.abs_diff(r2) && p <= r1 + r2 {
            for (i, s) in left.iter().enumerate() {
                for (j, t) in right.iter().enumerate() {
                    let g = model.mul(s, t);
                    if g.len() == p {
                        let row = ball.rank_of(&g).expect("sphere element in ball") - base;
                        triples.push((i as u32, j as u32, row as u32));
                    }
                }
            }
        }
        Ok(SphereTensor {
            r1,
            r2,
            p,
            left,
            right,
            rows: ball.sphere_size(p),
            triples,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }

    pub fn is_zero(&self) -> bool {
        self.triples.is_empty()
    }

    /// `‖(x*y)_p‖` for coordinate vectors on the two spheres.
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut out = vec![0.0; self.rows];
        for &(i, j, row) in &self.triples {
            out[row as usize] += x[i as usize] * y[j as usize];
        }
        out.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Gradients of `½‖(x*y)_p‖²` with respect to `x` and `y`.
    fn gradients(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let mut out = vec![0.0; self.rows];
        for &(i, j, row) in &self.triples {
            out[row as usize] += x[i as usize] * y[j as usize];
        }
        let mut gx = vec![0.0; x.len()];
        let mut gy = vec![0.0; y.len()];
        for &(i, j, row) in &self.triples {
            let o = out[row as usize];
            gx[i as usize] += o * y[j as usize];
            gy[j as usize] += o * x[i as usize];
        }
        (gx, gy, out.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Young bound and the spectral norms of the three matrix unfoldings.
    ///
    /// Each unfolding has a diagonal Gram matrix because `s t = s' t` forces
    /// `s = s'` (and likewise on the right), so its norm is the square root of
    /// the largest row count.
    pub fn upper_bounds(&self) -> UpperBounds {
        let (n1, n2) = self.dims();
        let young = (n1.min(n2) as f64).sqrt();
        if self.is_zero() {
            return UpperBounds {
                young,
                unfoldings: [0.0; 3],
            };
        }
        let mut ci = vec![0usize; n1];
        let mut cj = vec![0usize; n2];
        let mut cr = vec![0usize; self.rows];
        for &(i, j, row) in &self.triples {
            ci[i as usize] += 1;
            cj[j as usize] += 1;
            cr[row as usize] += 1;
        }
        let top = |c: &[usize]| (*c.iter().max().unwrap_or(&0) as f64).sqrt();
        UpperBounds {
            young,
            unfoldings: [top(&ci), top(&cj), top(&cr)],
        }
    }

    fn to_function(&self, model: &GroupModel, elems: &[Element], v: &[f64]) -> FiniteFunction<f64> {
        let f = FiniteFunction::from_pairs(model, elems.iter().cloned().zip(v.iter().copied()));
        f.into_nonnegative().expect("projected iterates are nonnegative")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperBounds {
    pub young: f64,
    pub unfoldings: [f64; 3],
}

impl UpperBounds {
    pub fn best(&self) -> f64 {
        self.unfoldings.iter().copied().fold(self.young, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct BestConstantEstimate {
    pub r1: usize,
    pub r2: usize,
    pub p: usize,
    pub lower: f64,
    pub upper: f64,
    pub bounds: UpperBounds,
    pub restarts: usize,
    pub best_restart: Option<usize>,
    pub argmax: Option<(FiniteFunction<f64>, FiniteFunction<f64>)>,
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|e| e * e).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|e| *e /= n);
    true
}

/// One run of alternating maximization: with `y` fixed, one power step of
/// `M_yᵀM_y` on `x` projected to the nonnegative cone, then the same for `y`.
fn ascend(t: &SphereTensor, mut x: Vec<f64>, mut y: Vec<f64>, tol: f64) -> (f64, Vec<f64>, Vec<f64>) {
    let mut best = t.value(&x, &y);
    for _ in 0..MAX_SWEEPS {
        let (mut gx, _, _) = t.gradients(&x, &y);
        gx.iter_mut().for_each(|e| *e = e.max(0.0));
        if normalize(&mut gx) {
            x = gx;
        }
        let (_, mut gy, _) = t.gradients(&x, &y);
        gy.iter_mut().for_each(|e| *e = e.max(0.0));
        if normalize(&mut gy) {
            y = gy;
        }
        let f = t.value(&x, &y);
        let done = (f - best).abs() < tol * f;
        best = best.max(f);
        if done {
            break;
        }
    }
    (t.value(&x, &y), x, y)
}

fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    normalize(&mut v);
    v
}

/// Lower estimate of `sup ‖(x*y)_p‖` over nonnegative unit `x` on `S(r1)` and
/// `y` on `S(r2)`, bracketed by a certified upper bound.
///
/// Restart `k` starts from a point drawn with the seed derived from
/// `(seed, "best_constant/r1/r2/p/k")`. Ties keep the lowest restart.
pub fn best_constant(
    model: &GroupModel,
    tensor: &SphereTensor,
    restarts: usize,
    tol: f64,
    seed: u64,
) -> BestConstantEstimate {
    let bounds = tensor.upper_bounds();
    let (n1, n2) = tensor.dims();
    let base = BestConstantEstimate {
        r1: tensor.r1,
        r2: tensor.r2,
        p: tensor.p,
        lower: 0.0,
        upper: bounds.best(),
        bounds,
        restarts,
        best_restart: None,
        argmax: None,
    };
    if tensor.is_zero() || restarts == 0 {
        return base;
    }
    let runs: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let label = format!("best_constant/{}/{}/{}/{k}", tensor.r1, tensor.r2, tensor.p);
            let mut rng = rng_for(seed, &label);
            let x = random_unit(n1, &mut rng);
            let y = random_unit(n2, &mut rng);
            ascend(tensor, x, y, tol)
        })
        .collect();
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = k;
        }
    }
    let (lower, x, y) = &runs[best];
    BestConstantEstimate {
        lower: *lower,
        best_restart: Some(best),
        argmax: Some((
            tensor.to_function(model, &tensor.left, x),
            tensor.to_function(model, &tensor.right, y),
        )),
        ..base
    }
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<f64>> {
    fn rec(parts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(parts - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(parts, total, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| c.into_iter().map(|k| (k as f64 / total as f64).sqrt()).collect())
        .collect()
}

/// Grid search over points `(√(k_1/N), …)` of both nonnegative unit spheres,
/// then projected gradient ascent with backtracking from the best few grid
/// points. Meant as an independent check on small instances.
pub fn brute_constant(tensor: &SphereTensor, grid: usize) -> Result<f64> {
    let (n1, n2) = tensor.dims();
    if n1 * n2 > BRUTE_MAX_DIMENSION {
        return Err(Error::usage(format!(
            "{n1}x{n2} exceeds the brute-force limit of {BRUTE_MAX_DIMENSION}"
        )));
    }
    if tensor.is_zero() || grid == 0 {
        return Ok(0.0);
    }
    let gx = compositions(n1, grid);
    let gy = compositions(n2, grid);
    let mut scored: Vec<(f64, usize, usize)> = gx
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, x)| gy.iter().enumerate().map(move |(b, y)| (tensor.value(x, y), a, b)))
        .collect();
    scored.sort_by(|u, v| v.0.total_cmp(&u.0).then((u.1, u.2).cmp(&(v.1, v.2))));
    let mut best = scored[0].0;
    for &(_, a, b) in scored.iter().take(8) {
        best = best.max(gradient_ascent(tensor, gx[a].clone(), gy[b].clone()));
    }
    Ok(best)
}

fn gradient_ascent(t: &SphereTensor, mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
    let mut f = t.value(&x, &y);
    let mut step = 0.1;
    for _ in 0..50_000 {
        let (gx, gy, _) = t.gradients(&x, &y);
        let mut nx: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| (a + step * g).max(0.0)).collect();
        let mut ny: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| (a + step * g).max(0.0)).collect();
        if !normalize(&mut nx) || !normalize(&mut ny) {
            break;
        }
        let nf = t.value(&nx, &ny);
        if nf > f {
            let gain = nf - f;
            x = nx;
            y = ny;
            f = nf;
            step *= 1.5;
            if gain < 1e-15 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    f
}

#[derive(Clone, Debug)]
pub struct RdProfile {
    pub r_max: usize,
    pub cells: Vec<BestConstantEstimate>,
    /// `(r, C(r), max certified upper bound over the same cells)`.
    pub constants: Vec<(usize, f64, f64)>,
}

/// Runs [`best_constant`] on every `(r1, r2, p)` with `r1, r2 ≤ r_max` and
/// `|r1 − r2| ≤ p ≤ r1 + r2`, then takes running maxima.
pub fn rd_profile(
    model: &GroupModel,
    ball: &BallIndex,
    r_max: usize,
    restarts: usize,
    tol: f64,
    seed: u64,
) -> Result<RdProfile> {
    if ball.radius() < 2 * r_max {
        return Err(Error::Range(format!(
            "ball of radius {} is too small, need radius {}",
            ball.radius(),
            2 * r_max
        )));
    }
    let mut keys = Vec::new();
    for r1 in 0..=r_max {
        for r2 in 0..=r_max {
            for p in r1.abs_diff(r2)..=r1 + r2 {
                keys.push((r1, r2, p));
            }
        }
    }
    let cells: Vec<BestConstantEstimate> = keys
        .par_iter()
        .map(|&(r1, r2, p)| {
            let t = SphereTensor::build(model, ball, r1, r2, p)?;
            Ok(best_constant(model, &t, restarts, tol, seed))
        })
        .collect::<Result<_>>()?;
    let constants = (0..=r_max)
        .map(|r| {
            let within = cells.iter().filter(|c| c.r1 <= r && c.r2 <= r);
            let (lo, hi) = within.fold((0.0f64, 0.0f64), |(lo, hi), c| (lo.max(c.lower), hi.max(c.upper)));
            (r, lo, hi)
        })
        .collect();
    Ok(RdProfile {
        r_max,
        cells,
        constants,
    })
}
