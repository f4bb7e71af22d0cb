use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use super::cache::cached_ball;
use super::config::{need, parse_function, ExperimentConfig, ExperimentKind, MapChoice, TraceMode};
use super::report::{ExperimentReport, Status, Table};
use crate::error::{Error, Result};
use crate::group::{BallIndex, Element, GroupModel, DEFAULT_BUDGET};
use crate::rd::{
    assemble_p, complex_reduction_check, default_peripheral_bound, fit_k1, op_norm_lower, rd_profile,
    trace_proof_chain, ChainConstants, FiniteFunction, DEFAULT_RESTARTS, DEFAULT_TOLERANCE, OPNORM_TOLERANCE,
};
use crate::relhyp::{
    calibrate_constants, count_bound_fit, verify_star, DeltaSet, GeodesicMode, PeripheralStructure, StarConstants,
    StarGeometry,
};
use crate::seed::rng_for;
use crate::starstar::{verify_tmap, TMap};

/// Settings that affect where data lives but not what a report says.
#[derive(Clone, Debug, Default)]
pub struct RunContext {
    pub cache_dir: Option<PathBuf>,
}

struct Setup<'c> {
    cfg: &'c ExperimentConfig,
    ctx: &'c RunContext,
    model: GroupModel,
}

type Outcome = (Status, Value, Option<Table>);

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<GroupModel> {
    let wrap = |field: &'static str| move |e: Error| Error::config(field, e.to_string());
    let model = GroupModel::parse(&cfg.group).map_err(wrap("group"))?;
    match &cfg.generator_order {
        Some(o) => GroupModel::with_order(model.family().clone(), o).map_err(wrap("generator_order")),
        None => Ok(model),
    }
}

impl Setup<'_> {
    fn ball(&self, radius: usize) -> Result<BallIndex> {
        let budget = self.cfg.budget.unwrap_or(DEFAULT_BUDGET);
        cached_ball(&self.model, radius, budget, self.ctx.cache_dir.as_deref())
    }

    fn peripherals(&self) -> Result<PeripheralStructure> {
        PeripheralStructure::parse(&self.model, &self.cfg.peripheral)
            .map_err(|e| Error::config("peripheral", e.to_string()))
    }

    fn constants(&self) -> Result<StarConstants> {
        let k = self.cfg.kind;
        Ok(StarConstants::new(
            need(self.cfg.sigma, "sigma", k)?,
            need(self.cfg.delta, "delta", k)?,
        ))
    }

    fn fmt(&self, e: &Element) -> String {
        self.model.format(e)
    }
}

/// Runs one experiment. Property failures come back as a report with
/// [`Status::Fail`]; invalid input and exhausted budgets as errors.
pub fn run_experiment(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<ExperimentReport> {
    cfg.validate()?;
    let s = Setup {
        cfg,
        ctx,
        model: build_model(cfg)?,
    };
    let (st, payload, table) = match cfg.kind {
        ExperimentKind::Ball => run_ball(&s)?,
        ExperimentKind::StarVerify => run_star(&s)?,
        ExperimentKind::Calibrate => run_calibrate(&s)?,
        ExperimentKind::DecompCount => run_decomp(&s)?,
        ExperimentKind::RdProfile => run_profile(&s)?,
        ExperimentKind::Opnorm => run_opnorm(&s)?,
        ExperimentKind::TmapVerify => run_tmap(&s)?,
        ExperimentKind::Trace => match cfg.mode.unwrap_or_default() {
            TraceMode::Chain => run_chain(&s)?,
            TraceMode::Reduction => run_reduction(&s)?,
        },
    };
    Ok(ExperimentReport {
        kind: cfg.kind,
        config: cfg.clone(),
        status: st,
        payload,
        table,
    })
}

fn run_ball(s: &Setup) -> Result<Outcome> {
    let r = need(s.cfg.radius, "radius", s.cfg.kind)?;
    let ball = s.ball(r)?;
    let spheres: Vec<usize> = (0..=r).map(|k| ball.sphere_size(k)).collect();
    let payload = json!({
        "descriptor": ball.descriptor(),
        "order": ball.order(),
        "radius": r,
        "size": ball.len(),
        "sphere_sizes": spheres,
    });
    let mut t = Table::new(&["r", "sphere", "ball"]);
    let mut acc = 0;
    for (k, n) in spheres.iter().enumerate() {
        acc += n;
        t.push(vec![k.into(), (*n).into(), acc.into()]);
    }
    Ok((Status::Pass, payload, Some(t)))
}

fn run_star(s: &Setup) -> Result<Outcome> {
    let r = need(s.cfg.radius, "radius", s.cfg.kind)?;
    let mode = s.cfg.geodesics.unwrap_or(GeodesicMode::Canonical);
    let per = s.peripherals()?;
    let ball = s.ball(r)?;
    let rep = verify_star(&s.model, &per, s.constants()?, &ball, r, mode)?;
    let payload = json!({
        "sigma": rep.constants.sigma,
        "delta": rep.constants.delta,
        "kappa": rep.constants.kappa,
        "geodesics": mode,
        "peripheral": per.describe(&s.model),
        "ball_radius": rep.ball_radius,
        "pass": rep.pass,
        "triangles_checked": rep.triangles_checked,
        "counterexample": rep.counterexample.as_ref().map(|t| t.iter().map(|e| s.fmt(e)).collect::<Vec<_>>()),
        "excursions": rep.excursions,
    });
    Ok((status(rep.pass), payload, None))
}

fn run_calibrate(s: &Setup) -> Result<Outcome> {
    let r = need(s.cfg.radius, "radius", s.cfg.kind)?;
    let mode = s.cfg.geodesics.unwrap_or(GeodesicMode::Canonical);
    let per = s.peripherals()?;
    let ball = s.ball(r)?;
    let cal = calibrate_constants(
        &s.model,
        &per,
        &ball,
        r,
        s.cfg.sigma_max.unwrap_or(3),
        s.cfg.delta_max.unwrap_or(3),
        mode,
    )?;
    let tried: Vec<Value> = cal
        .tried
        .iter()
        .map(|&(sigma, delta, pass)| json!({"sigma": sigma, "delta": delta, "pass": pass}))
        .collect();
    let payload = json!({
        "ball_radius": r,
        "geodesics": mode,
        "constants": cal.constants.map(|c| json!({"sigma": c.sigma, "delta": c.delta})),
        "tried": tried,
    });
    Ok((status(cal.constants.is_some()), payload, None))
}

fn run_decomp(s: &Setup) -> Result<Outcome> {
    let k = s.cfg.kind;
    let (p_max, r1_max) = (need(s.cfg.p_max, "p_max", k)?, need(s.cfg.r1_max, "r1_max", k)?);
    let per = s.peripherals()?;
    let geo = StarGeometry::new(&s.model, &per, s.constants()?)?;
    let ball = s.ball(p_max.max(r1_max))?;
    let fit = count_bound_fit(&geo, &ball, p_max, r1_max, s.cfg.r2_max)?;
    let dominates = fit.envelope.dominates(&fit.points());
    let witness = |w: &Option<(usize, usize, Element)>| {
        w.as_ref()
            .map(|(p, r2, g)| json!({"p": p, "r2": r2, "element": s.fmt(g)}))
    };
    let rows: Vec<Value> = fit
        .rows
        .iter()
        .map(|r| {
            json!({
                "r1": r.r1,
                "max_left": r.max_left,
                "left_witness": witness(&r.left_witness),
                "max_right": r.max_right,
                "right_witness": witness(&r.right_witness),
                "observed": r.observed,
                "bound": fit.bound(r.r1),
            })
        })
        .collect();
    let mut t = Table::new(&["r1", "max_left", "max_right", "observed", "bound"]);
    for r in &fit.rows {
        t.push(vec![
            r.r1.into(),
            r.max_left.into(),
            r.max_right.into(),
            r.observed.into(),
            fit.bound(r.r1).into(),
        ]);
    }
    let payload = json!({
        "sigma": fit.constants.sigma,
        "delta": fit.constants.delta,
        "p_max": p_max,
        "r1_max": r1_max,
        "r2_max": s.cfg.r2_max,
        "rows": rows,
        "envelope": fit.envelope,
        "dominates": dominates,
        "incomplete_pairs": fit.incomplete_pairs,
    });
    Ok((status(dominates && fit.incomplete_pairs == 0), payload, Some(t)))
}

fn run_profile(s: &Setup) -> Result<Outcome> {
    let r_max = need(s.cfg.r_max, "r_max", s.cfg.kind)?;
    let restarts = s.cfg.restarts.unwrap_or(DEFAULT_RESTARTS);
    let tol = s.cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let ball = s.ball(2 * r_max)?;
    let prof = rd_profile(&s.model, &ball, r_max, restarts, tol, s.cfg.seed)?;
    let mut t = Table::new(&["r1", "r2", "p", "lower", "upper", "restarts"]);
    let mut cells = Vec::new();
    let mut bracketed = true;
    for c in &prof.cells {
        bracketed &= c.lower <= c.upper * (1.0 + 1e-9) + 1e-12;
        t.push(vec![
            c.r1.into(),
            c.r2.into(),
            c.p.into(),
            c.lower.into(),
            c.upper.into(),
            c.restarts.into(),
        ]);
        cells.push(json!({
            "r1": c.r1,
            "r2": c.r2,
            "p": c.p,
            "lower": c.lower,
            "upper": c.upper,
            "young": c.bounds.young,
            "unfoldings": c.bounds.unfoldings,
            "restarts": c.restarts,
            "best_restart": c.best_restart,
        }));
    }
    let constants: Vec<Value> = prof
        .constants
        .iter()
        .map(|&(r, lo, hi)| json!({"r": r, "lower": lo, "upper": hi}))
        .collect();
    let payload = json!({
        "r_max": r_max,
        "restarts": restarts,
        "tolerance": tol,
        "seed": s.cfg.seed,
        "constants": constants,
        "cells": cells,
    });
    Ok((status(bracketed), payload, Some(t)))
}

fn run_opnorm(s: &Setup) -> Result<Outcome> {
    let spec = s.cfg.function.clone().unwrap_or_else(|| "sphere(1)".into());
    let (sphere, k) = parse_function(&spec)?;
    let radii = s.cfg.radii.clone().unwrap_or_default();
    let tol = s.cfg.tolerance.unwrap_or(OPNORM_TOLERANCE);
    let big = *radii.last().ok_or_else(|| Error::config("radii", "empty list"))?;
    let ball = s.ball(k + big)?;
    let support = if sphere { ball.sphere(k) } else { ball.sub_ball(k) };
    let x = FiniteFunction::<f64>::indicator(&s.model, support);
    let mut t = Table::new(&["R", "value", "iterations", "converged"]);
    let mut estimates = Vec::new();
    let mut values = Vec::new();
    for &r in &radii {
        let e = op_norm_lower(&s.model, &ball, &x, r, tol)?;
        t.push(vec![r.into(), e.value.into(), e.iterations.into(), e.converged.into()]);
        estimates.push(json!({"R": r, "value": e.value, "iterations": e.iterations, "converged": e.converged}));
        values.push((e.value, e.converged));
    }
    let monotone = values.windows(2).all(|w| w[1].0 >= w[0].0 * (1.0 - 1e-9));
    let converged = values.iter().all(|v| v.1);
    let payload = json!({
        "function": spec,
        "norm_l2": x.norm(),
        "tolerance": tol,
        "estimates": estimates,
        "nondecreasing": monotone,
        "converged": converged,
    });
    Ok((status(monotone && converged), payload, Some(t)))
}

fn run_tmap(s: &Setup) -> Result<Outcome> {
    let r = need(s.cfg.radius, "radius", s.cfg.kind)?;
    let map = need(s.cfg.map, "map", s.cfg.kind)?;
    let ball = s.ball(r)?;
    let per;
    let t = match map {
        MapChoice::Z2 => TMap::z2(&s.model).map_err(|e| Error::config("group", e.to_string()))?,
        MapChoice::Polygrowth => TMap::polygrowth(&s.model),
        MapChoice::FromStar => {
            per = s.peripherals()?;
            TMap::from_star(StarGeometry::new(&s.model, &per, s.constants()?)?)
        }
    };
    let rep = verify_tmap(&t, &ball)?;
    let limit: std::collections::BTreeMap<usize, f64> = rep.q2_limit.iter().copied().collect();
    let mut table = Table::new(&["g", "r", "count", "Q2"]);
    for c in &rep.counts {
        table.push(vec![s.fmt(&c.g).into(), c.r.into(), c.count.into(), limit[&c.r].into()]);
    }
    let per_r = |v: &[(usize, f64)]| v.iter().map(|&(r, q)| json!({"r": r, "value": q})).collect::<Vec<_>>();
    let excess: Vec<Value> = rep
        .claim_excess
        .iter()
        .map(|c| json!({"g": s.fmt(&c.g), "r": c.r, "count": c.count}))
        .collect();
    let payload = json!({
        "map": rep.kind,
        "ball_radius": rep.ball_radius,
        "pairs_checked": rep.pairs_checked,
        "condition_i": rep.condition_i,
        "counterexample_i": rep.counterexample_i.as_ref().map(|(g, h)| [s.fmt(g), s.fmt(h)]),
        "middle_lengths": rep.middle_lengths.iter().map(|&(r, l)| json!({"r": r, "max": l})).collect::<Vec<_>>(),
        "q1_fit": rep.q1_fit,
        "condition_ii": rep.condition_ii,
        "max_counts": rep.max_counts().iter().map(|&(r, c)| json!({"r": r, "max": c})).collect::<Vec<_>>(),
        "q2_fit": rep.q2_fit,
        "q2_limit": per_r(&rep.q2_limit),
        "q2_claim": per_r(&rep.q2_claim),
        "claim_excess": excess,
        "condition_iii": rep.condition_iii,
    });
    Ok((status(rep.pass()), payload, Some(table)))
}

fn run_chain(s: &Setup) -> Result<Outcome> {
    let k = s.cfg.kind;
    let (r1_max, r2_max) = (need(s.cfg.r1_max, "r1_max", k)?, need(s.cfg.r2_max, "r2_max", k)?);
    let pairs = s.cfg.pairs.unwrap_or(50);
    let per = s.peripherals()?;
    let geo = StarGeometry::new(&s.model, &per, s.constants()?)?;
    let ball = s.ball(r1_max + r2_max)?;
    let mut sets = Vec::new();
    for r1 in 0..=r1_max {
        for r2 in 0..=r2_max {
            for p in r1.abs_diff(r2)..=r1 + r2 {
                sets.push(DeltaSet::build(&geo, &ball, p, r1, r2)?);
            }
        }
    }
    let fit = count_bound_fit(&geo, &ball, r1_max + r2_max, r1_max, Some(r2_max))?;
    let bounds = per
        .kinds()
        .into_iter()
        .map(|kind| default_peripheral_bound(&s.model, kind))
        .collect::<Result<Vec<_>>>()?;
    let p_poly = assemble_p(&bounds, geo.constants.kappa);
    let constants = ChainConstants {
        envelope: fit.envelope,
        peripheral_bounds: bounds,
        k1: fit_k1(&geo, &sets),
    };
    let mut t = Table::new(&["pair", "p", "r1", "r2", "step", "lhs", "rhs", "pass"]);
    let mut out = Vec::new();
    let mut all = true;
    for n in 0..pairs {
        let d = &sets[n % sets.len()];
        let mut rng = rng_for(s.cfg.seed, &format!("trace/chain/{n}"));
        let x = FiniteFunction::random_nonnegative(&s.model, ball.sphere(d.r1), &mut rng);
        let y = FiniteFunction::random_nonnegative(&s.model, ball.sphere(d.r2), &mut rng);
        let rep = trace_proof_chain(&geo, d, &x, &y, &constants)?;
        all &= rep.pass();
        for st in &rep.steps {
            t.push(vec![
                n.into(),
                d.p.into(),
                d.r1.into(),
                d.r2.into(),
                st.name.into(),
                st.lhs.into(),
                st.rhs.into(),
                st.pass.into(),
            ]);
        }
        out.push(json!({
            "pair": n,
            "p": d.p,
            "r1": d.r1,
            "r2": d.r2,
            "pass": rep.pass(),
            "complete": rep.complete(),
            "norm_x_sq": rep.norm_x_sq,
            "norm_y_sq": rep.norm_y_sq,
            "count_bound": rep.count_bound,
            "p_value": rep.p_value,
            "final_bound": rep.final_bound,
            "steps": rep.steps,
        }));
    }
    let payload = json!({
        "sigma": geo.constants.sigma,
        "delta": geo.constants.delta,
        "kappa": geo.constants.kappa,
        "envelope": constants.envelope,
        "k1": constants.k1,
        "p_polynomial": p_poly.coeffs,
        "cells": sets.len(),
        "pairs": out,
    });
    Ok((status(all), payload, Some(t)))
}

fn run_reduction(s: &Setup) -> Result<Outcome> {
    let r = need(s.cfg.radius, "radius", s.cfg.kind)?;
    let samples = s.cfg.pairs.unwrap_or(50);
    let ball = s.ball(2 * r)?;
    let pts = ball.sub_ball(r);
    // ‖x*φ‖ ≤ ‖x‖₁‖φ‖ ≤ √|B(r)|·‖x‖·‖φ‖, so this default always satisfies the premise.
    let p_value = s.cfg.p_value.unwrap_or((pts.len() as f64).sqrt());
    let mut t = Table::new(&["sample", "lhs", "bound", "premise", "pass"]);
    let mut out = Vec::new();
    let mut all = true;
    for n in 0..samples {
        let mut rng = rng_for(s.cfg.seed, &format!("trace/reduction/{n}"));
        let x = FiniteFunction::random_nonnegative(&s.model, pts, &mut rng);
        let phi = FiniteFunction::from_pairs(
            &s.model,
            pts.iter().map(|e| {
                (
                    e.clone(),
                    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
                )
            }),
        );
        let rep = complex_reduction_check(&s.model, &x, &phi, p_value)?;
        all &= rep.pass();
        t.push(vec![
            n.into(),
            rep.lhs.into(),
            rep.bound.into(),
            rep.premise.into(),
            rep.pass().into(),
        ]);
        out.push(json!({"sample": n, "pass": rep.pass(), "report": rep}));
    }
    let payload = json!({
        "radius": r,
        "p_value": p_value,
        "samples": out,
    });
    Ok((status(all), payload, Some(t)))
}
