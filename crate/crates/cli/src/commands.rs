//! The `factors` and `apply` subcommands.

use std::io::Write;

use ambient_exact::{Rat, RatFn};
use ambient_gjms::chart_geometry::{is_tt, lichnerowicz, trace, TtVerdict};
use ambient_gjms::einstein_model::{pk_tt_factors, q_hessian, FactorList, HessianVerdict};
use ambient_gjms::gjms_core::{ambient_lift, gjms_pk, lift_weight, required_order, LiftOptions};
use ambient_gjms::{GeometryError, TensorField};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::Format;
use crate::suites::lift_orders_json;
use crate::CliError;

#[derive(Serialize)]
pub struct FactorReport {
    pub factors: FactorList,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian: Option<HessianVerdict>,
}

pub fn factors(n: usize, k: usize, lambda: &Rat, alpha: Option<&Rat>) -> Result<FactorReport, CliError> {
    let factors = pk_tt_factors(n, k, &RatFn::from_rat(lambda.clone()))?;
    let hessian = alpha.map(|a| q_hessian(n, lambda, a)).transpose()?;
    Ok(FactorReport { factors, hessian })
}

pub fn write_factors(out: &mut dyn Write, format: Format, r: &FactorReport) -> std::io::Result<()> {
    let f = &r.factors;
    match format {
        Format::Ndjson => writeln!(out, "{}", serde_json::to_string(r).expect("factor report serialises"))?,
        Format::Csv => {
            writeln!(out, "m,shift")?;
            for (m, c) in f.shifts.iter().enumerate() {
                writeln!(out, "{m},{c}")?;
            }
            if let Some(h) = &r.hessian {
                writeln!(out, "verdict,{}", verdict_name(h))?;
            }
        }
        Format::Table => {
            writeln!(out, "P_{} on TT tensors, n = {}, lambda = {}: prod (Delta_L + c_m)", f.k, f.n, f.lambda)?;
            for (m, c) in f.shifts.iter().enumerate() {
                writeln!(out, "  c_{m} = {c}")?;
            }
            if let Some(h) = &r.hessian {
                writeln!(out, "Hessian at alpha = {}: factors {}", h.alpha, h.factors.join(", "))?;
                writeln!(out, "verdict: {}", verdict_name(h))?;
            }
        }
    }
    Ok(())
}

fn verdict_name(h: &HessianVerdict) -> String {
    serde_json::to_value(h.verdict).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyOp {
    Pk,
    Lift,
    Lichnerowicz,
}

fn require_trace_free(g: &ambient_gjms::chart_geometry::ChartMetric, phi: &TensorField) -> Result<(), CliError> {
    let tr = trace(g, phi)?;
    if !tr.is_zero() {
        return Err(GeometryError::NotTraceFree { residual: tr.to_string() }.into());
    }
    Ok(())
}

fn check_shape(cfg: &RunConfig, phi: &TensorField) -> Result<(), CliError> {
    if phi.valence() != (0, 2) || !phi.symmetries_hold() {
        return Err(GeometryError::Malformed("phi must be a symmetric (0,2) tensor".into()).into());
    }
    if phi.dim() != cfg.n {
        return Err(CliError::Usage(format!("phi has dimension {}, but --n is {}", phi.dim(), cfg.n)));
    }
    Ok(())
}

/// Applies `op` to `phi` on the configured model. The result carries its
/// weight and a provenance block.
pub fn apply(op: ApplyOp, cfg: &RunConfig, phi: &TensorField) -> Result<Value, CliError> {
    check_shape(cfg, phi)?;
    let (g, _) = cfg.base()?;
    match op {
        ApplyOp::Lichnerowicz => {
            require_trace_free(&g, phi)?;
            let out = lichnerowicz(&g, phi)?.map(|c| c.reduce());
            Ok(json!({
                "tensor": out.to_document(None),
                "weight": Value::Null,
                "provenance": { "pipeline": "chart Lichnerowicz Laplacian", "model": cfg.model_label() },
            }))
        }
        ApplyOp::Lift => {
            require_trace_free(&g, phi)?;
            let order = cfg.order(required_order(cfg.n, cfg.k));
            let amb = cfg.ambient(order)?.ok_or_else(|| CliError::Usage("the lift needs a flat, space-form or Einstein model".into()))?;
            let l = ambient_lift(&amb, phi, cfg.k, LiftOptions::default())?;
            Ok(json!({
                "sigma": l.sigma.to_document(),
                "weight": lift_weight(cfg.n, cfg.k).to_string(),
                "target": l.target,
                "orders": lift_orders_json(&l.orders),
                "certificates": l.certificates,
                "certified": l.is_certified(),
                "provenance": { "pipeline": "ambient lift", "model": cfg.model_label(), "k": cfg.k, "ambient-order": amb.order(), "steps": l.steps },
            }))
        }
        ApplyOp::Pk => {
            if let TtVerdict::No { trace, divergence } = is_tt(&g, phi)? {
                let residual = match divergence {
                    Some((i, v)) => format!("trace {trace}, divergence component {} = {v}", i + 1),
                    None => format!("trace {trace}"),
                };
                return Err(GeometryError::NotTT { residual }.into());
            }
            let order = cfg.order(required_order(cfg.n, cfg.k));
            let amb = cfg.ambient(order)?.ok_or_else(|| CliError::Usage("P_k needs a flat, space-form or Einstein model".into()))?;
            let p = gjms_pk(&amb, phi, cfg.k)?;
            Ok(json!({
                "tensor": p.value.tensor.to_document(None),
                "weight": p.value.weight.to_string(),
                "routes-agree": p.routes_agree,
                "output-certificates": p.output_certificates,
                "provenance": {
                    "pipeline": "ambient lift, Lichnerowicz power, restriction to TM",
                    "model": cfg.model_label(),
                    "k": cfg.k,
                    "ambient-order": amb.order(),
                    "lift-orders": lift_orders_json(&p.lift.orders),
                    "trace-free-part-taken": p.trace_free_applied,
                },
            }))
        }
    }
}
