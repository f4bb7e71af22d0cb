use serde::Serialize;

use super::function::FiniteFunction;
use crate::error::{Error, Result};
use crate::group::{BallIndex, GroupModel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OpNormEstimate {
    /// Lower bound for the operator norm of `ξ ↦ x * ξ`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const OPNORM_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200_000;

/// Power iteration for the largest singular value of left convolution by `x`
/// restricted to functions supported on `B(R)`. Starts from the normalized
/// all-ones vector and stops when the Rayleigh quotient changes by less than
/// the relative tolerance.
///
/// Needs the ball to reach `radius(x) + R`.
pub fn op_norm_lower(
    model: &GroupModel,
    ball: &BallIndex,
    x: &FiniteFunction<f64>,
    big_r: usize,
    tolerance: f64,
) -> Result<OpNormEstimate> {
    if x.model_id() != model.id() || ball.model_id() != model.id() {
        return Err(Error::usage("function, ball and model disagree"));
    }
    let need = x.radius() + big_r;
    if ball.radius() < need {
        return Err(Error::Range(format!(
            "ball of radius {} is too small, need radius {need}",
            ball.radius()
        )));
    }
    let cols = ball.sub_ball(big_r);
    let nc = cols.len();
    let terms: Vec<_> = x.iter().collect();
    let nt = terms.len();
    // Column-major: column t has entries rows[t*nt..(t+1)*nt] with values vals[..].
    let mut rows = Vec::with_capacity(nc * nt);
    for t in cols {
        for (s, _) in &terms {
            let r = ball.rank_of(&model.mul(s, t)).expect("product inside the ball");
            rows.push(r as u32);
        }
    }
    let vals: Vec<f64> = terms.iter().map(|(_, v)| **v).collect();
    let n_rows = ball.sub_ball(need).len();

    if nt == 0 {
        return Ok(OpNormEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let mut v = vec![1.0 / (nc as f64).sqrt(); nc];
    let mut w = vec![0.0; n_rows];
    let mut prev = 0.0;
    for it in 1..=MAX_ITERATIONS {
        w.iter_mut().for_each(|e| *e = 0.0);
        for (c, vc) in v.iter().enumerate() {
            for (k, val) in vals.iter().enumerate() {
                w[rows[c * nt + k] as usize] += val * vc;
            }
        }
        let lambda: f64 = w.iter().map(|e| e * e).sum();
        for (c, vc) in v.iter_mut().enumerate() {
            *vc = vals
                .iter()
                .enumerate()
                .map(|(k, val)| val * w[rows[c * nt + k] as usize])
                .sum();
        }
        let norm = v.iter().map(|e| e * e).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(OpNormEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        v.iter_mut().for_each(|e| *e /= norm);
        if it > 1 && (lambda - prev).abs() <= tolerance * lambda {
            return Ok(OpNormEstimate {
                value: lambda.sqrt(),
                iterations: it,
                converged: true,
            });
        }
        prev = lambda;
    }
    Ok(OpNormEstimate {
        value: prev.sqrt(),
        iterations: MAX_ITERATIONS,
        converged: false,
    })
}
