//! Verification suites. Each claim is pure and gets its own report line;
//! errors inside a claim become failing verdicts with the error as witness.

use std::io;
use std::time::Instant;

use ambient_exact::{Rat, RatFn, RhoJet};
use ambient_gjms::ambient_geometry::{chart_straightness, straightness_check, CrossTerm, IdentityCheck, NormalFormAmbient};
use ambient_gjms::chart_geometry::{
    flat_tt, laplacian, linearized_bach_flat, random_symmetric, space_form_metric, trace_free, ChartMetric,
};
use ambient_gjms::einstein_model::{christoffel_table_check, einstein_ambient_check, pk_tt_factors, q_hessian, sphere_check, Verdict};
use ambient_gjms::gjms_core::{
    ambient_lift, check_range, gjms_pk, lift_weight, obstruction_gjms_factor, obstruction_linearization_flat, required_order,
    sl2_commutator_check, LiftChoice, LiftOptions, LiftOrders, Sl2CheckConfig,
};
use ambient_gjms::{GeometryError, TensorField};
use num_traits::One;
use serde_json::{json, Value};

use crate::config::{Model, RunConfig};
use crate::report::ReportDoc;
use crate::{truncation, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Sl2,
    AmbientEinstein,
    EinsteinLaplacian,
    Lift,
    Harmonic,
    ObstructionFlat,
    Sphere,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Sl2, Suite::AmbientEinstein, Suite::EinsteinLaplacian, Suite::Lift, Suite::Harmonic, Suite::ObstructionFlat, Suite::Sphere];

    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "sl2" => Suite::Sl2,
            "ambient-einstein" => Suite::AmbientEinstein,
            "einstein-laplacian" => Suite::EinsteinLaplacian,
            "lift" => Suite::Lift,
            "harmonic" => Suite::Harmonic,
            "obstruction-flat" => Suite::ObstructionFlat,
            "sphere" => Suite::Sphere,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sl2 => "sl2",
            Suite::AmbientEinstein => "ambient-einstein",
            Suite::EinsteinLaplacian => "einstein-laplacian",
            Suite::Lift => "lift",
            Suite::Harmonic => "harmonic",
            Suite::ObstructionFlat => "obstruction-flat",
            Suite::Sphere => "sphere",
            Suite::All => "all",
        }
    }

    /// Suites that need `k` check its range before anything runs.
    fn uses_k(self) -> bool {
        matches!(self, Suite::Lift | Suite::Harmonic | Suite::All)
    }
}

/// What a claim body decided.
pub enum Claim {
    Judged(bool, Value),
    Skipped(String),
}

/// Tallies verdicts while streaming them to a sink.
pub struct Runner<'a> {
    emit: &'a mut dyn FnMut(&ReportDoc) -> io::Result<()>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Largest order asked for by a truncation shortfall.
    pub truncation: Option<(usize, usize)>,
    /// Order known to suffice for the suite being run, quoted on shortfalls.
    pub sufficient_order: Option<usize>,
}

impl<'a> Runner<'a> {
    pub fn new(emit: &'a mut dyn FnMut(&ReportDoc) -> io::Result<()>) -> Runner<'a> {
        Runner { emit, passed: 0, failed: 0, skipped: 0, truncation: None, sufficient_order: None }
    }

    fn push(&mut self, doc: ReportDoc) -> io::Result<()> {
        match doc.verdict {
            crate::report::Outcome::Pass => self.passed += 1,
            crate::report::Outcome::Fail => self.failed += 1,
            crate::report::Outcome::Skipped => self.skipped += 1,
        }
        (self.emit)(&doc)
    }

    fn error_witness(&mut self, e: &GeometryError) -> Value {
        if let Some((needed, available)) = truncation(e) {
            self.truncation = Some(match self.truncation {
                Some((n0, a0)) if n0 >= needed => (n0, a0),
                _ => (needed, available),
            });
            let mut w = json!({ "error": e.to_string(), "needed-order": needed, "available-order": available });
            if let Some(o) = self.sufficient_order {
                w["sufficient-ambient-order"] = json!(o);
            }
            return w;
        }
        json!({ "error": e.to_string() })
    }

    /// Runs one claim and reports it.
    pub fn claim(
        &mut self,
        id: impl Into<String>,
        anchor: &str,
        inputs: Value,
        body: impl FnOnce() -> Result<Claim, GeometryError>,
    ) -> io::Result<()> {
        let start = Instant::now();
        let doc = ReportDoc::new(id, anchor, inputs);
        let doc = match body() {
            Ok(Claim::Judged(holds, w)) => doc.judge(holds, w),
            Ok(Claim::Skipped(why)) => doc.skip(why),
            Err(e) => {
                let w = self.error_witness(&e);
                doc.fail(w)
            }
        };
        self.push(doc.timed(start))
    }

    /// A pre-computed batch of identity checks, timed as a group.
    fn identities(&mut self, prefix: &str, anchor: &str, inputs: &Value, start: Instant, checks: Vec<IdentityCheck>) -> io::Result<()> {
        let ms = start.elapsed().as_millis() as u64;
        for c in checks {
            let doc = ReportDoc::new(format!("{prefix}/{}", slug(&c.name)), anchor, inputs.clone())
                .judge(c.holds, c.witness.map(Value::String).unwrap_or(Value::Null));
            let mut doc = doc;
            doc.wall_time_ms = ms;
            self.push(doc)?;
        }
        Ok(())
    }

    fn batch_error(&mut self, id: String, anchor: &str, inputs: &Value, start: Instant, e: &GeometryError) -> io::Result<()> {
        let w = self.error_witness(e);
        let doc = ReportDoc::new(id, anchor, inputs.clone()).fail(w).timed(start);
        self.push(doc)
    }

    fn skip(&mut self, id: String, anchor: &str, inputs: &Value, why: impl Into<String>) -> io::Result<()> {
        self.push(ReportDoc::new(id, anchor, inputs.clone()).skip(why))
    }

    pub fn exit_code(&self) -> i32 {
        if self.truncation.is_some() {
            3
        } else if self.failed > 0 {
            1
        } else {
            0
        }
    }
}

/// Claim-id fragment from a check name: the trailing `(trial .., w = ..)`
/// tag is dropped (the prefix carries it), spaces around `=` go, and other
/// whitespace becomes `-`.
pub fn slug(name: &str) -> String {
    let core = match name.rfind(" (") {
        Some(i) if name.ends_with(')') => &name[..i],
        _ => name,
    };
    let joined = core.replace(", ", " ").replace(" = ", "=");
    joined.split_whitespace().collect::<Vec<_>>().join("-")
}

/// Order as JSON, with exact jets shown as `"exact"`.
pub fn order_json(o: usize) -> Value {
    if o == RhoJet::EXACT {
        json!("exact")
    } else {
        json!(o)
    }
}

pub fn lift_orders_json(o: &LiftOrders) -> Value {
    json!({ "divergence": order_json(o.divergence), "t-contraction": order_json(o.t_contraction), "trace": order_json(o.trace) })
}

fn jet_text(j: &RhoJet) -> String {
    let terms: Vec<String> =
        j.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(p, c)| format!("({c}) rho^{p}")).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn render(t: &TensorField) -> Value {
    serde_json::to_value(t.to_document(None)).unwrap_or(Value::Null)
}

fn first_difference(a: &TensorField, b: &TensorField) -> Value {
    match a.sub(b).ok().and_then(|d| d.map(|c| c.reduce()).first_nonzero()) {
        Some((idx, v)) => json!({ "component": TensorField::index_key(&idx), "difference": v.to_string() }),
        None => Value::Null,
    }
}

fn inputs(cfg: &RunConfig, extra: Value) -> Value {
    let mut v = json!({ "n": cfg.n, "model": cfg.model_label(), "seed": cfg.seed });
    if let Some(t) = cfg.trunc {
        v["trunc"] = json!(t);
    }
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// Runs `suite`; range problems in the configuration are reported before any
/// claim runs.
pub fn run(suite: Suite, cfg: &RunConfig, runner: &mut Runner) -> Result<(), CliError> {
    if cfg.n < 3 {
        return Err(CliError::Usage(format!("n = {} is below the supported range (n >= 3)", cfg.n)));
    }
    if suite.uses_k() {
        check_range(cfg.n, cfg.k)?;
    }
    match suite {
        Suite::All => {
            for s in Suite::EACH {
                run_one(s, cfg, runner)?;
            }
        }
        s => run_one(s, cfg, runner)?,
    }
    Ok(())
}

fn run_one(suite: Suite, cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    r.sufficient_order = match suite {
        Suite::Lift | Suite::Harmonic => Some(required_order(cfg.n, cfg.k)),
        Suite::ObstructionFlat => Some(required_order(cfg.n, cfg.n / 2)),
        _ => None,
    };
    match suite {
        Suite::Sl2 => sl2(cfg, r)?,
        Suite::AmbientEinstein => ambient_einstein(cfg, r)?,
        Suite::EinsteinLaplacian => einstein_laplacian(cfg, r)?,
        Suite::Lift => lift(cfg, r)?,
        Suite::Harmonic => harmonic(cfg, r)?,
        Suite::ObstructionFlat => obstruction(cfg, r)?,
        Suite::Sphere => sphere(cfg, r)?,
        Suite::All => unreachable!("expanded by run"),
    }
    Ok(())
}

/// The ambient metric, or a skipped claim when the model has no Einstein
/// certificate (general metrics only run chart-level checks).
fn ambient_or_skip(cfg: &RunConfig, r: &mut Runner, suite: &str, anchor: &str, order: usize) -> Result<Option<NormalFormAmbient>, CliError> {
    match cfg.ambient(order) {
        Ok(Some(a)) => Ok(Some(a)),
        Ok(None) => {
            r.skip(format!("{suite}/ambient"), anchor, &inputs(cfg, json!({})), "metric carries no Einstein certificate")?;
            Ok(None)
        }
        Err(CliError::Truncation { needed, available, .. }) => {
            let e = GeometryError::Truncation { needed, available };
            r.batch_error(format!("{suite}/ambient"), anchor, &inputs(cfg, json!({})), Instant::now(), &e)?;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// The Einstein-form ambient `2 rho dt^2 + 2t dt drho + t^2 (1 + lambda rho)^2 g`.
fn einstein_ambient(cfg: &RunConfig, order: usize) -> Result<Option<NormalFormAmbient>, CliError> {
    let (g, lambda) = cfg.base()?;
    match lambda {
        Some(l) => Ok(Some(NormalFormAmbient::einstein(&g, &l, cfg.order(order))?)),
        None => Ok(None),
    }
}

const SL2_ANCHOR: &str = "x = r/4, y = ambient Lichnerowicz Laplacian and h = w + n/2 - 1 satisfy [h,x] = 2x, [h,y] = -2y, [x,y] = h, \
[y^m,x] = -m y^(m-1)(h-m+1) and [x^m,y] = m x^(m-1)(h+m-1) on weight-w symmetric 2-tensors";

fn sl2(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let Some(amb) = ambient_or_skip(cfg, r, "sl2", SL2_ANCHOR, 10)? else { return Ok(()) };
    let max_m = if cfg.model == Model::Flat { 3 } else { 2 };
    let half = Rat::new((-1).into(), 2.into());
    for (i, w) in [half, Rat::from_integer(2.into())].into_iter().enumerate() {
        let sc = Sl2CheckConfig {
            weights: vec![w.clone()],
            trials: 1,
            max_m,
            order: cfg.trunc.map(|t| t + 1).unwrap_or(2 * max_m + 2),
            seed: cfg.seed.wrapping_mul(1000).wrapping_add(i as u64),
        };
        let inp = inputs(cfg, json!({ "weight": w.to_string(), "max-m": max_m, "tensor-order": sc.order }));
        let start = Instant::now();
        match sl2_commutator_check(&amb, &sc) {
            Ok(checks) => r.identities(&format!("sl2/w={w}"), SL2_ANCHOR, &inp, start, checks)?,
            Err(e) => r.batch_error(format!("sl2/w={w}"), SL2_ANCHOR, &inp, start, &e)?,
        }
    }
    Ok(())
}

const CHRISTOFFEL_ANCHOR: &str = "Christoffel symbols of 2 rho dt^2 + 2t dt drho + t^2 (1 + lambda rho)^2 g, with P = lambda g, match the closed forms";
const RICCI_ANCHOR: &str = "the Einstein-form ambient metric is Ricci flat to the computed order";
const STRAIGHT_ANCHOR: &str = "the normal form is straight: nabla T = id, T.R = 0, T.Ric = 0";
const DISPLAY_ANCHOR: &str = "the variant metric with a 2 rho dt drho cross term is not straight";

fn ambient_einstein(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let inp = inputs(cfg, json!({}));
    let Some(amb) = einstein_ambient(cfg, 6)? else {
        r.skip("ambient-einstein/christoffel".into(), CHRISTOFFEL_ANCHOR, &inp, "metric carries no Einstein certificate")?;
        return Ok(());
    };
    let start = Instant::now();
    match christoffel_table_check(&amb) {
        Ok(checks) => r.identities("ambient-einstein/christoffel", CHRISTOFFEL_ANCHOR, &inp, start, checks)?,
        Err(e) => r.batch_error("ambient-einstein/christoffel".into(), CHRISTOFFEL_ANCHOR, &inp, start, &e)?,
    }
    r.claim("ambient-einstein/ricci-flat", RICCI_ANCHOR, inp.clone(), || {
        let ric = amb.ricci()?;
        let w = match ric.first_nonzero() {
            Some((idx, j)) => json!({ "component": ambient_gjms::ambient_geometry::AmbientTensor::index_label(amb.n(), &idx), "jet": jet_text(&j) }),
            None => json!({ "known-modulo-rho^": ric.order() }),
        };
        Ok(Claim::Judged(ric.is_zero(), w))
    })?;
    let start = Instant::now();
    match straightness_check(&amb, 3, cfg.seed) {
        Ok(checks) => r.identities("ambient-einstein/straightness", STRAIGHT_ANCHOR, &inp, start, checks)?,
        Err(e) => r.batch_error("ambient-einstein/straightness".into(), STRAIGHT_ANCHOR, &inp, start, &e)?,
    }
    for (id, cross, anchor) in [
        ("ambient-einstein/chart-straightness", CrossTerm::TDtDrho, STRAIGHT_ANCHOR),
        ("ambient-einstein/rho-cross-term-not-straight", CrossTerm::RhoDtDrho, DISPLAY_ANCHOR),
    ] {
        r.claim(id, anchor, inp.clone(), || match chart_straightness(&amb, cross) {
            Ok(c) => {
                let w = c.witness.map(Value::String).unwrap_or(Value::Null);
                Ok(match cross {
                    CrossTerm::TDtDrho => Claim::Judged(c.holds, w),
                    // the expected outcome is a failure with a witness
                    CrossTerm::RhoDtDrho => {
                        let ok = !c.holds && !w.is_null();
                        Claim::Judged(ok, if ok { w } else { json!("straightness unexpectedly held") })
                    }
                })
            }
            Err(GeometryError::Range(why)) | Err(GeometryError::Precondition(why)) => Ok(Claim::Skipped(why)),
            Err(e) => Err(e),
        })?;
    }
    Ok(())
}

const LAPLACIAN_ANCHOR: &str = "on an Einstein metric, the ambient Lichnerowicz Laplacian of t^w (1 + lambda rho)^w sigma is \
t^(w-2) (1 + lambda rho)^(w-2) (Delta + 4n lambda - 2 W o - 4(n-1) lambda - 2(w-2)(n+w-3) lambda) sigma on the base block";

fn einstein_laplacian(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let Some(amb) = einstein_ambient(cfg, 4)? else {
        r.skip("einstein-laplacian/ambient".into(), LAPLACIAN_ANCHOR, &inputs(cfg, json!({})), "metric carries no Einstein certificate")?;
        return Ok(());
    };
    for w in -2..=4i64 {
        let seed = cfg.seed.wrapping_mul(100).wrapping_add((w + 2) as u64);
        let inp = inputs(cfg, json!({ "weight": w, "sigma-degree": 2 }));
        r.claim(format!("einstein-laplacian/w={w}"), LAPLACIAN_ANCHOR, inp, || {
            let sigma = random_symmetric(cfg.n, 2, seed);
            let c = einstein_ambient_check(&amb, &sigma, &Rat::from_integer(w.into()))?;
            Ok(Claim::Judged(c.holds, c.witness.map(Value::String).unwrap_or(Value::Null)))
        })?;
    }
    let inp = inputs(cfg, json!({ "weight": lift_weight(cfg.n, 1).to_string(), "sigma": "TT" }));
    r.claim("einstein-laplacian/tt-full-tensor", LAPLACIAN_ANCHOR, inp, || {
        let Some(phi) = tt_input(cfg, 2)? else { return Ok(Claim::Skipped("no exact TT inputs for a custom metric".into())) };
        let c = einstein_ambient_check(&amb, &phi, &lift_weight(cfg.n, 1))?;
        let ok = c.holds && c.off_block_vanishes;
        Ok(Claim::Judged(ok, json!({ "block": c.witness, "off-block": c.off_block_witness })))
    })?;
    Ok(())
}

/// Exact TT test tensor on the model: flat polynomial TT, transplanted to
/// space forms as `D^(n-2) chi`.
fn tt_input(cfg: &RunConfig, degree: u32) -> Result<Option<TensorField>, GeometryError> {
    let chi = flat_tt(cfg.n, degree, cfg.seed)?;
    match &cfg.model {
        Model::Flat => Ok(Some(chi)),
        Model::SpaceForm(c) => Ok(Some(space_form_metric(cfg.n, c)?.transplant_tt(&chi)?)),
        Model::Custom(_) => Ok(None),
    }
}

const LIFT_ANCHOR: &str = "the ambient lift of a trace-free phi has divergence O^-(r^c), T-contraction O^-(r^c) and trace O(r^c) with \
c = ceil((n/2 + k)/2), and its restriction to G is independent of the choices made";

fn lift(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let (n, k) = (cfg.n, cfg.k);
    let Some(amb) = ambient_or_skip(cfg, r, "lift", LIFT_ANCHOR, required_order(n, k))? else { return Ok(()) };
    let phi = trace_free(amb.base(), &random_symmetric(n, 2, cfg.seed))?.map(|c| c.reduce());
    let base_inp = inputs(cfg, json!({ "k": k }));
    let mut reference = None;
    r.claim("lift/canonical", LIFT_ANCHOR, base_inp.clone(), || {
        let l = ambient_lift(&amb, &phi, k, LiftOptions::default())?;
        let ok = l.is_certified() && l.orders.divergence >= l.target;
        let w = json!({ "target": l.target, "orders": lift_orders_json(&l.orders), "certificates": l.certificates });
        reference = Some(l);
        Ok(Claim::Judged(ok, w))
    })?;
    let Some(reference) = reference else { return Ok(()) };
    for s in 1..=3u64 {
        for completion in [LiftChoice::Canonical, LiftChoice::Perturbed(cfg.seed.wrapping_add(7))] {
            let seed = LiftChoice::Perturbed(cfg.seed.wrapping_mul(10).wrapping_add(s));
            let label = match completion {
                LiftChoice::Canonical => "canonical",
                LiftChoice::Perturbed(_) => "perturbed",
            };
            let inp = inputs(cfg, json!({ "k": k, "seed-choice": seed, "completion": completion }));
            r.claim(format!("lift/seed-{s}/completion-{label}"), LIFT_ANCHOR, inp, || {
                let l = ambient_lift(&amb, &phi, k, LiftOptions { seed, completion })?;
                let same = l.phi_tilde.equals_through(&reference.phi_tilde);
                let w = if same {
                    json!({ "orders": lift_orders_json(&l.orders) })
                } else {
                    json!({ "restriction-differs": l.phi_tilde.first_difference(&reference.phi_tilde).map(|(i, j)| format!("{i:?}: {}", jet_text(&j))) })
                };
                Ok(Claim::Judged(same && l.is_certified(), w))
            })?;
        }
    }
    Ok(())
}

const HARMONIC_ANCHOR: &str = "P_k phi = tf(Lichnerowicz^k sigma|_TM) agrees with 4^(k-1) (k-1)!^2 times the harmonic-extension \
obstruction, satisfies the output order clauses, and on Einstein metrics equals prod_m (Delta_L + c_m) phi";

fn harmonic(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let (n, k) = (cfg.n, cfg.k);
    let Some(amb) = ambient_or_skip(cfg, r, "harmonic", HARMONIC_ANCHOR, required_order(n, k))? else { return Ok(()) };
    let degree = if cfg.model == Model::Flat { 2 * k as u32 } else { 2 };
    let inp = inputs(cfg, json!({ "k": k, "phi-degree": degree }));
    let phi = match tt_input(cfg, degree) {
        Ok(Some(p)) => p,
        Ok(None) => return Ok(r.skip("harmonic/pk".into(), HARMONIC_ANCHOR, &inp, "no exact TT inputs for a custom metric")?),
        Err(e) => return Ok(r.batch_error("harmonic/pk".into(), HARMONIC_ANCHOR, &inp, Instant::now(), &e)?),
    };
    let mut result = None;
    r.claim("harmonic/routes-agree", HARMONIC_ANCHOR, inp.clone(), || {
        let p = gjms_pk(&amb, &phi, k)?;
        let ok = p.routes_agree && p.lift.is_certified();
        let w = if ok {
            json!({ "weight": p.value.weight.to_string(), "lift-orders": lift_orders_json(&p.lift.orders) })
        } else {
            json!({ "routes-agree": p.routes_agree, "lift-certificates": p.lift.certificates })
        };
        result = Some(p);
        Ok(Claim::Judged(ok, w))
    })?;
    let Some(p) = result else { return Ok(()) };
    r.claim("harmonic/output-orders", HARMONIC_ANCHOR, inp.clone(), || {
        let ok = p.output_certificates.iter().all(|c| c.holds);
        Ok(Claim::Judged(ok, json!(p.output_certificates)))
    })?;
    r.claim("harmonic/factor-list", HARMONIC_ANCHOR, inp, || {
        let Some(lambda) = amb.lambda().cloned().or_else(|| (cfg.model == Model::Flat).then(RatFn::zero)) else {
            return Ok(Claim::Skipped("not an Einstein model".into()));
        };
        let factors = pk_tt_factors(n, k, &lambda)?;
        let expected = factors.apply(amb.base(), &phi)?;
        let ok = p.value.tensor.equals(&expected);
        Ok(Claim::Judged(ok, if ok { json!({ "shifts": factors.shifts }) } else { first_difference(&p.value.tensor, &expected) }))
    })?;
    Ok(())
}

const OBSTRUCTION_ANCHOR: &str = "at flat space the first variation of the obstruction tensor on TT phi is (-1)^(n/2-1)/(2(n-2)) P_{n/2} phi, \
i.e. -Delta^2 phi / 4 in dimension four, where it equals the linearised Bach tensor";

fn obstruction(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let n = cfg.n;
    let inp = inputs(cfg, json!({ "phi-degree": n }));
    if n % 2 == 1 || cfg.model != Model::Flat {
        return Ok(r.skip("obstruction-flat/linearization".into(), OBSTRUCTION_ANCHOR, &inp, "needs even n >= 4 and the flat model")?);
    }
    let amb = match NormalFormAmbient::flat(n, cfg.order(2 * n)) {
        Ok(a) => a,
        Err(e) => return Ok(r.batch_error("obstruction-flat/linearization".into(), OBSTRUCTION_ANCHOR, &inp, Instant::now(), &e)?),
    };
    let phi = flat_tt(n, n as u32, cfg.seed)?;
    let mut lin = None;
    r.claim("obstruction-flat/certificates", OBSTRUCTION_ANCHOR, inp.clone(), || {
        let o = obstruction_linearization_flat(&amb, &phi)?;
        let failing: Vec<Value> =
            o.certificates.iter().filter(|c| !c.verdict.holds).map(|c| json!({ "name": c.name, "witness": c.verdict.witness })).collect();
        let ok = failing.is_empty();
        let names: Vec<&str> = o.certificates.iter().map(|c| c.name).collect();
        lin = Some(o);
        Ok(Claim::Judged(ok, if ok { json!({ "checked": names }) } else { Value::Array(failing) }))
    })?;
    let Some(o) = lin else { return Ok(()) };
    r.claim("obstruction-flat/laplacian-power", OBSTRUCTION_ANCHOR, inp.clone(), || {
        let g = ChartMetric::flat(n);
        let mut lap = phi.clone();
        for _ in 0..n / 2 {
            lap = laplacian(&g, &lap)?;
        }
        let expected = lap.map(|c| c.scale(&obstruction_gjms_factor(n)).reduce());
        let ok = o.value.tensor.equals(&expected);
        Ok(Claim::Judged(ok, if ok { json!({ "factor": obstruction_gjms_factor(n).to_string() }) } else { first_difference(&o.value.tensor, &expected) }))
    })?;
    r.claim("obstruction-flat/gjms-pipeline", OBSTRUCTION_ANCHOR, inp.clone(), || {
        let p = gjms_pk(&NormalFormAmbient::flat(n, cfg.order(required_order(n, n / 2)))?, &phi, n / 2)?;
        let ok = o.matches_gjms(&p.value.tensor);
        Ok(Claim::Judged(ok, if ok { Value::Null } else { json!({ "value": render(&o.value.tensor), "p-phi": render(&p.value.tensor) }) }))
    })?;
    r.claim("obstruction-flat/bach", OBSTRUCTION_ANCHOR, inp, || {
        if n != 4 {
            return Ok(Claim::Skipped("the Bach tensor is the obstruction only in dimension four".into()));
        }
        let b = linearized_bach_flat(&phi)?;
        let ok = b.equals(&o.value.tensor);
        Ok(Claim::Judged(ok, if ok { Value::Null } else { first_difference(&o.value.tensor, &b) }))
    })?;
    Ok(())
}

const SPHERE_ANCHOR: &str = "the round sphere has P = g/2 and Delta_L = Delta + 2n on trace-free tensors; with the first TT eigenvalue \
at least 2n every Hessian factor is positive, so the round metric is a local maximum of the total Q-curvature";

fn sphere(cfg: &RunConfig, r: &mut Runner) -> Result<(), CliError> {
    let n = cfg.n;
    let c = match &cfg.model {
        Model::SpaceForm(c) => c.clone(),
        _ => Rat::one(),
    };
    let inp = inputs(cfg, json!({ "c": c.to_string() }));
    r.claim("sphere/einstein-and-lichnerowicz", SPHERE_ANCHOR, inp.clone(), || {
        if n > 6 {
            return Ok(Claim::Skipped("chart check supports n <= 6".into()));
        }
        let s = sphere_check(n, &c, 2, cfg.seed)?;
        Ok(Claim::Judged(s.passes(), serde_json::to_value(&s).unwrap_or(Value::Null)))
    })?;
    let alpha = Rat::from_integer((2 * n as i64).into());
    r.claim("sphere/hessian", SPHERE_ANCHOR, json!({ "n": n, "lambda": (&c / Rat::from_integer(2.into())).to_string(), "alpha": alpha.to_string() }), || {
        if n % 2 == 1 {
            return Ok(Claim::Skipped("total Q-curvature Hessian needs even n".into()));
        }
        let h = q_hessian(n, &(&c / Rat::from_integer(2.into())), &alpha)?;
        let ok = h.verdict == Verdict::LocalMax && h.all_positive;
        Ok(Claim::Judged(ok, serde_json::to_value(&h).unwrap_or(Value::Null)))
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_stable_and_readable() {
        assert_eq!(slug("[h,x] = 2x (trial 0, w = -1/2)"), "[h,x]=2x");
        assert_eq!(slug("y^1x^1 on G, m = 2 (trial 0, w = 2)"), "y^1x^1-on-G-m=2");
        assert_eq!(slug("Gamma^k"), "Gamma^k");
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
    }
}
