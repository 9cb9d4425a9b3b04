//! Subcommand arguments and dispatch. Every command returns the `result`
//! object of its report; `run` wraps it in the common envelope.

use clap::Args;
use lacuna_core::constructions::{
    case3_driver, check_blocks_trace, check_sparse_trace, classify_and_construct, large_blocks, large_blocks_plan,
    seed_window, sparse_k0, sparse_regularize, thin_above, DriverOptions, SparseOptions,
};
use lacuna_core::counterexample::{
    circle_lambda_check, circle_s_check, dyadic_escape, obstruction_demo, verify_dyadic, PreciseValue,
};
use lacuna_core::distset::{DistanceSet, LimitFamily, SetKind};
use lacuna_core::exactreal::{parse_rational, DEFAULT_PRECISION_BITS};
use lacuna_core::semigroup::{density_threshold, member, threshold_recipe};
use lacuna_core::sumwalk::{
    an_enumerate, tame_refine_constant, tame_refine_general, verify_tame_constant, verify_tame_general, EnumOptions,
    StepSet, SumWalkSpec, TameSet, DEFAULT_MAX_STATES,
};
use lacuna_core::{Basis, RealQ, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Severity};
use crate::wire::{self, approx, real, reals};
use crate::{Command, Global};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// Distance set: a JSON file, inline JSON, or a comma list of reals.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value = "64")]
    pub probe_bound: String,
}

#[derive(Args, Debug, Serialize)]
pub struct TileArgs {
    #[arg(long)]
    pub t: String,
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    /// Finite generating set F.
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub epsilon: String,
    /// Skip the exhaustive density validation.
    #[arg(long)]
    pub no_validate: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct AnArgs {
    /// Walk specification (see docs/an.md).
    #[arg(long)]
    pub spec: String,
    /// Drop tail elements of tame step sets closer than this to their limit.
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: usize,
    /// Include one witness path per total.
    #[arg(long)]
    pub paths: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TameConstantArgs {
    #[arg(long)]
    pub spec: String,
    /// Recheck witnesses for this many tail indices past M.
    #[arg(long, default_value_t = 0)]
    pub verify_extra: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct TameGeneralArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value_t = 0)]
    pub verify_extra: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SparseFlags {
    #[arg(long, default_value_t = 8)]
    pub stage_budget: usize,
    #[arg(long, default_value = "1")]
    pub eps_scale: String,
    #[arg(long)]
    pub k_growth: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct RegularizeArgs {
    /// Windows file (see docs/windows.md).
    #[arg(long)]
    pub windows: String,
    #[arg(long)]
    pub set: String,
    #[command(flatten)]
    pub sparse: SparseFlags,
    /// Remove points until every gap exceeds K_0 before regularizing.
    #[arg(long)]
    pub thin: bool,
    /// Full per-stage trace destination.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BlocksArgs {
    /// A `limit_family` set.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 1)]
    pub rank_max: usize,
    /// Windows to process; without it a window of the required length is seeded at `start`.
    #[arg(long)]
    pub windows: Option<String>,
    #[arg(long, default_value = "0")]
    pub start: String,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DriveArgs {
    #[arg(long)]
    pub windows: String,
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value = "16")]
    pub probe_bound: String,
    #[command(flatten)]
    pub sparse: SparseFlags,
    #[arg(long, default_value_t = 1)]
    pub rank_max: usize,
    /// Treat the windows as blocked pieces and run only the blocked-piece driver.
    #[arg(long)]
    pub blocked: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CircleArgs {
    #[arg(long)]
    pub length: String,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub set: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DyadicArgs {
    /// sqrtN, golden, or an integer enclosure given as `lo:hi` (scaled by 2^bits).
    #[arg(long)]
    pub gamma: String,
    #[arg(long, default_value_t = 0)]
    pub m0: u64,
    #[arg(long, default_value_t = 256)]
    pub bits: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ObstructionArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// all, distset, semigroup, sumwalk, orbits, constructions, counterexample.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Instances per randomized invariant.
    #[arg(long, default_value_t = 24)]
    pub cases: usize,
}

// ---------------------------------------------------------------------------

pub fn run(global: &Global, command: &Command) -> Result<Value, CliError> {
    let basis = Basis::standard().with_precision(precision_bits(global)?);
    let (operation, tag, result) = match command {
        Command::Classify(a) => ("classify", "distset.classify", classify(&basis, a)?),
        Command::Tile(a) => ("tile", "semigroup.member", tile(&basis, a)?),
        Command::Threshold(a) => ("threshold", "semigroup.density_threshold", threshold(&basis, a)?),
        Command::An(a) => ("an", "sumwalk.an_enumerate", an(&basis, a)?),
        Command::TameConstant(a) => ("tame-constant", "sumwalk.tame_refine_constant", tame_constant(&basis, a)?),
        Command::TameGeneral(a) => ("tame-general", "sumwalk.tame_refine_general", tame_general(&basis, a)?),
        Command::Regularize(a) => ("regularize", "constructions.sparse_regularize", regularize(&basis, a)?),
        Command::Blocks(a) => ("blocks", "constructions.large_blocks", blocks(&basis, a)?),
        Command::Drive(a) => ("drive", "constructions.classify_and_construct", drive(&basis, a)?),
        Command::Circle(a) => ("circle", "counterexample.circle_checks", circle(&basis, a)?),
        Command::Dyadic(a) => ("dyadic", "counterexample.dyadic_escape", dyadic(a)?),
        Command::Obstruction(a) => ("obstruction", "counterexample.obstruction_demo", obstruction(&basis, a)?),
        Command::Verify(a) => ("verify", "suite.verify", crate::suite::verify(&basis, global.seed, a)?),
    };
    let config = json!({
        "precision_bits": basis.precision_bits(),
        "seed": global.seed,
        "arguments": serde_json::to_value(command).map_err(|e| CliError::io(e.to_string()))?,
    });
    let report = json!({
        "tool": "lacuna",
        "version": VERSION,
        "operation": operation,
        "tag": tag,
        "config": config,
        "result": result,
    });
    if let Some(failed) = report["result"].get("failed").and_then(Value::as_u64).filter(|&f| f > 0) {
        eprintln!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
        return Err(CliError::new(Severity::SuiteFailed, "cli", "SuiteFailed", format!("{failed} invariant checks failed")));
    }
    Ok(report)
}

fn precision_bits(global: &Global) -> Result<u32, CliError> {
    let bits = match global.precision_bits {
        Some(b) => b,
        None => match std::env::var("LACUNA_PRECISION_BITS") {
            Ok(s) => s.trim().parse().map_err(|_| CliError::input("Config", format!("LACUNA_PRECISION_BITS=`{s}`")))?,
            Err(_) => DEFAULT_PRECISION_BITS,
        },
    };
    if bits == 0 {
        return Err(CliError::input("Config", "precision bits must be positive"));
    }
    Ok(bits)
}

/// Inline JSON when the argument starts with `{` or `[`; otherwise a file.
pub fn load(arg: &str) -> Result<Value, CliError> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| CliError::io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input("Json", format!("{arg}: {e}")))
}

fn scalar(b: &Basis, s: &str, what: &str) -> Result<RealQ, CliError> {
    Ok(wire::parse_real(b, &Value::String(s.to_string()), what)?)
}

fn rational_arg(s: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|_| CliError::input("Parse", format!("{what}: cannot parse `{s}`")))
}

/// A set from a file, inline JSON, or a comma list of reals.
pub fn load_set(b: &Basis, arg: &str) -> Result<DistanceSet, CliError> {
    let t = arg.trim_start();
    let looks_inline_list = !(t.starts_with('{') || t.starts_with('[')) && !Path::new(arg).exists();
    if looks_inline_list {
        let elems = arg.split(',').map(|x| scalar(b, x.trim(), "set")).collect::<Result<Vec<_>, _>>()?;
        return Ok(DistanceSet::finite(elems, None)?);
    }
    let v = load(arg)?;
    match &v {
        Value::Array(_) => Ok(DistanceSet::finite(wire::parse_reals(b, &v, "set")?, None)?),
        _ => Ok(wire::parse_set(b, &v, "set")?),
    }
}

fn family_of(s: &DistanceSet) -> Result<LimitFamily, CliError> {
    match s.kind() {
        SetKind::LimitFamily(f) => Ok(f.clone()),
        _ => Err(CliError::input("Schema", "this command needs a `limit_family` set")),
    }
}

fn sparse_options(f: &SparseFlags) -> Result<SparseOptions, CliError> {
    if f.stage_budget == 0 {
        return Err(CliError::input("Config", "stage budget must be positive"));
    }
    Ok(SparseOptions {
        stage_budget: f.stage_budget,
        eps_scale: rational_arg(&f.eps_scale, "eps-scale")?,
        k_growth: f.k_growth.as_deref().map(|k| rational_arg(k, "k-growth")).transpose()?,
    })
}

fn write_trace(path: &Option<PathBuf>, v: &Value) -> Result<(), CliError> {
    if let Some(p) = path {
        let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::io(e.to_string()))?;
        text.push('\n');
        std::fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn classify(b: &Basis, a: &ClassifyArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let probe = scalar(b, &a.probe_bound, "probe-bound")?;
    let class = s.classify(&probe)?;
    Ok(json!({"set": wire::set_json(&s), "probe_bound": real(&probe), "classification": wire::group_class(&class)}))
}

fn tile(b: &Basis, a: &TileArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let t = scalar(b, &a.t, "t")?;
    match member(&t, &s)? {
        Some(tl) => Ok(json!({"t": real(&t), "tiling": wire::tiling(&tl)})),
        None => Err(lacuna_core::semigroup::SemigroupError::NotInSemigroup(t).into()),
    }
}

fn threshold(b: &Basis, a: &ThresholdArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let SetKind::Finite(f) = s.kind() else {
        return Err(CliError::input("Schema", "threshold needs a finite set"));
    };
    let eps = scalar(b, &a.epsilon, "epsilon")?;
    let cert = if a.no_validate { threshold_recipe(f, &eps)? } else { density_threshold(f, &eps)? };
    Ok(json!({"validated": !a.no_validate, "certificate": wire::certificate(&cert)}))
}

fn step_set(b: &Basis, v: &Value, d: &RealQ, eps: &RealQ, path: &str) -> Result<StepSet, CliError> {
    if let Some(e) = v.get("elements") {
        return Ok(StepSet::Finite(wire::parse_reals(b, e, &format!("{path}.elements"))?));
    }
    if let Some(t) = v.get("tame") {
        return Ok(StepSet::Tame(tame_set(b, t, d, eps, &format!("{path}.tame"))?));
    }
    Err(wire::WireError { path: path.into(), message: "a step needs `elements` or `tame`".into() }.into())
}

/// `{family, r, l?}`; without `l` the set is saturated from `T_r^*`.
fn tame_set(b: &Basis, v: &Value, d: &RealQ, eps: &RealQ, path: &str) -> Result<TameSet, CliError> {
    let fam = wire::parse_family(b, wire::field(v, "family", path)?, &format!("{path}.family"))?;
    let r = wire::usize_field(v, "r", path)?;
    Ok(match v.get("l") {
        Some(l) => TameSet::new(wire::parse_reals(b, l, &format!("{path}.l"))?, r, d.clone(), eps.clone(), fam)?,
        None => TameSet::saturate(&fam, r, d, eps)?,
    })
}

/// `{"eps", "steps": [{"d", "elements" | "tame", "repeat"?}]}`.
fn walk_spec(b: &Basis, v: &Value) -> Result<SumWalkSpec, CliError> {
    let eps = wire::real_field(b, v, "eps", "spec")?;
    let Some(list) = wire::field(v, "steps", "spec")?.as_array() else {
        return Err(CliError::input("Schema", "spec.steps: expected an array"));
    };
    let mut steps = Vec::new();
    for (i, st) in list.iter().enumerate() {
        let path = format!("spec.steps[{i}]");
        let d = wire::real_field(b, st, "d", &path)?;
        let set = step_set(b, st, &d, &eps, &path)?;
        let repeat = st.get("repeat").and_then(Value::as_u64).unwrap_or(1);
        for _ in 0..repeat {
            steps.push((d.clone(), set.clone()));
        }
    }
    Ok(SumWalkSpec { eps, steps })
}

fn an(b: &Basis, a: &AnArgs) -> Result<Value, CliError> {
    let spec = walk_spec(b, &load(&a.spec)?)?;
    let resolution = a.resolution.as_deref().map(|r| scalar(b, r, "resolution")).transpose()?;
    let elems = an_enumerate(&spec, &EnumOptions { resolution, max_states: a.max_states })?;
    let list: Vec<Value> = elems
        .iter()
        .map(|e| {
            let mut v = json!({"total": real(&e.total), "approx": approx(&e.total)});
            if a.paths {
                v["path"] = reals(&e.path);
            }
            v
        })
        .collect();
    Ok(json!({"n": spec.steps.len(), "eps": real(&spec.eps), "target": real(&spec.target()), "count": list.len(), "totals": list}))
}

fn tame_constant(b: &Basis, a: &TameConstantArgs) -> Result<Value, CliError> {
    let v = load(&a.spec)?;
    let eps = wire::real_field(b, &v, "eps", "spec")?;
    let delta = wire::real_field(b, &v, "delta", "spec")?;
    let d = wire::real_field(b, &v, "d", "spec")?;
    let r = tame_set(b, &v, &d, &eps, "spec")?;
    let out = tame_refine_constant(&eps, &delta, &d, &r)?;
    let checked = if a.verify_extra > 0 { Some(verify_tame_constant(&out, &r, a.verify_extra)?) } else { None };
    Ok(json!({"input": wire::tame_set(&r), "refinement": wire::tame_constant(&out), "witnesses_checked": checked}))
}

fn tame_general(b: &Basis, a: &TameGeneralArgs) -> Result<Value, CliError> {
    let v = load(&a.spec)?;
    let eps = wire::real_field(b, &v, "eps", "spec")?;
    let delta = wire::real_field(b, &v, "delta", "spec")?;
    let big_d = wire::real_field(b, &v, "big_d", "spec")?;
    let r = wire::usize_field(&v, "r", "spec")?;
    let fam = wire::field(&v, "family", "spec")?;
    let Some(list) = wire::field(&v, "steps", "spec")?.as_array() else {
        return Err(CliError::input("Schema", "spec.steps: expected an array"));
    };
    let mut steps = Vec::new();
    for (i, st) in list.iter().enumerate() {
        let path = format!("spec.steps[{i}]");
        let d = wire::real_field(b, st, "d", &path)?;
        let mut tv = st.clone();
        if tv.get("family").is_none() {
            tv["family"] = fam.clone();
        }
        if tv.get("r").is_none() {
            tv["r"] = json!(r);
        }
        let set = tame_set(b, &tv, &d, &eps, &path)?;
        for _ in 0..st.get("repeat").and_then(Value::as_u64).unwrap_or(1) {
            steps.push((d.clone(), set.clone()));
        }
    }
    let out = tame_refine_general(&eps, &delta, &big_d, r, &steps)?;
    let checked = if a.verify_extra > 0 { Some(verify_tame_general(&out, &steps, a.verify_extra)?) } else { None };
    Ok(json!({"n": steps.len(), "refinement": wire::tame_general(&out), "witnesses_checked": checked}))
}

fn regularize(b: &Basis, a: &RegularizeArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let opts = sparse_options(&a.sparse)?;
    let windows = wire::parse_windows(b, &load(&a.windows)?)?;
    let k0 = sparse_k0(&s, &opts)?;
    let mut results = Vec::new();
    let mut traces = Vec::new();
    for w in &windows {
        let input = if a.thin { thin_above(w, &k0)? } else { w.clone() };
        let trace = sparse_regularize(&input, &s, &opts)?;
        let report = check_sparse_trace(&trace, &input, &s, &opts)?;
        results.push(json!({
            "orbit_id": w.orbit_id,
            "input_points": input.len(),
            "stages": trace.stages.len(),
            "output": wire::window(&trace.final_window),
            "invariants": {"checks": report.checks, "violations": report.violations},
        }));
        traces.push(json!({"orbit_id": w.orbit_id, "trace": wire::sparse_trace(&trace)}));
    }
    write_trace(&a.trace_out, &json!({"k0": real(&k0), "traces": traces}))?;
    Ok(json!({"set": wire::set_json(&s), "k0": real(&k0), "k0_approx": approx(&k0), "windows": results}))
}

fn blocks(b: &Basis, a: &BlocksArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let fam = family_of(&s)?;
    let plan = large_blocks_plan(&fam, a.rank_max)?;
    let windows = match &a.windows {
        Some(p) => wire::parse_windows(b, &load(p)?)?,
        None => vec![seed_window("seeded", &scalar(b, &a.start, "start")?, &plan.required_length, &plan)?],
    };
    let mut results = Vec::new();
    let mut traces = Vec::new();
    for w in &windows {
        let trace = large_blocks(w, &fam, &plan)?;
        let report = check_blocks_trace(&trace, &fam)?;
        let mut summary = wire::blocks_trace(&trace, false);
        summary["orbit_id"] = json!(w.orbit_id);
        summary["invariants"] = json!({"checks": report.checks, "violations": report.violations});
        results.push(summary);
        traces.push(json!({"orbit_id": w.orbit_id, "trace": wire::blocks_trace(&trace, true)}));
    }
    write_trace(&a.trace_out, &json!({"traces": traces}))?;
    Ok(json!({"family": wire::family_json(&fam), "plan": wire::blocks_plan(&plan), "windows": results}))
}

fn drive(b: &Basis, a: &DriveArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let sparse = sparse_options(&a.sparse)?;
    let input = load(&a.windows)?;
    if a.blocked {
        let pieces = wire::parse_blocked(b, &input)?;
        let entries = case3_driver(&pieces, &s, &sparse)?;
        let list: Vec<Value> = entries
            .iter()
            .map(|e| {
                json!({
                    "orbit_id": e.orbit_id,
                    "category": e.category.name(),
                    "endpoints": reals(&e.endpoints),
                    "output": e.output.as_ref().map(wire::window),
                    "stages": e.trace.as_ref().map(|t| t.stages.len()),
                })
            })
            .collect();
        return Ok(json!({"set": wire::set_json(&s), "entries": list}));
    }
    let windows = wire::parse_windows(b, &input)?;
    let opts = DriverOptions { probe_bound: scalar(b, &a.probe_bound, "probe-bound")?, sparse, rank_max: a.rank_max };
    let flow = classify_and_construct(&windows, &s, &opts)?;
    let list: Vec<Value> = flow
        .entries
        .iter()
        .map(|e| {
            json!({
                "orbit_id": e.orbit_id,
                "route": e.route,
                "category": e.category.as_ref().map(|c| c.name()),
                "output": e.output.as_ref().map(wire::window),
                "note": e.note,
            })
        })
        .collect();
    Ok(json!({"set": wire::set_json(&s), "classification": wire::group_class(&flow.class), "entries": list}))
}

fn circle(b: &Basis, a: &CircleArgs) -> Result<Value, CliError> {
    let l = scalar(b, &a.length, "length")?;
    if a.lambda.is_none() && a.set.is_none() {
        return Err(CliError::input("Config", "circle needs --lambda or --set"));
    }
    let mut out = json!({"length": real(&l)});
    if let Some(lam) = &a.lambda {
        let lam = scalar(b, lam, "lambda")?;
        out["lambda"] = real(&lam);
        out["lambda_section"] = json!(circle_lambda_check(&l, &lam)?);
    }
    if let Some(s) = &a.set {
        let s = load_set(b, s)?;
        out["set"] = wire::set_json(&s);
        out["s_section"] = match circle_s_check(&l, &s)? {
            Some(t) => wire::tiling(&t),
            None => Value::Null,
        };
    }
    Ok(out)
}

fn dyadic(a: &DyadicArgs) -> Result<Value, CliError> {
    let gamma = match a.gamma.split_once(':') {
        Some((lo, hi)) => {
            let p = |x: &str| x.trim().parse::<num_bigint::BigInt>().map_err(|_| CliError::input("Parse", format!("gamma bound `{x}`")));
            PreciseValue::new("custom", p(lo)?, p(hi)?, a.bits)?
        }
        None => PreciseValue::named(&a.gamma, a.bits)?,
    };
    let w = dyadic_escape(&gamma, a.m0)?;
    let recheck_bits = a.bits.saturating_mul(2);
    let recheck = match a.gamma.contains(':') {
        true => None,
        false => Some(verify_dyadic(&w, &PreciseValue::named(&a.gamma, recheck_bits)?)?),
    };
    let pair = |p: &(Rational, Rational)| json!([wire::rational(&p.0), wire::rational(&p.1)]);
    Ok(json!({
        "gamma": w.gamma,
        "bits": w.bits,
        "gamma_enclosure": pair(&w.gamma_enclosure),
        "m0": w.m0,
        "k_m0": w.k_m0.to_string(),
        "a": pair(&w.a),
        "p": w.p,
        "m": w.m,
        "scaled": pair(&w.scaled),
        "distance_to_z": pair(&w.distance_to_z),
        "distance_to_z_approx": lacuna_core::exactreal::decimal_string(&w.distance_to_z.0, 12),
        "recheck": {"bits": recheck_bits, "certified": recheck},
    }))
}

fn obstruction(b: &Basis, a: &ObstructionArgs) -> Result<Value, CliError> {
    let s = load_set(b, &a.set)?;
    let alpha = scalar(b, &a.alpha, "alpha")?;
    let rep = obstruction_demo(&s, &alpha, a.n_max)?;
    Ok(json!({
        "scope": rep.scope,
        "alpha": real(&rep.alpha),
        "rows": rep.rows.iter().map(|r| json!({"n": r.n, "lambda": real(&r.lambda), "independent": r.independent})).collect::<Vec<_>>(),
    }))
}
