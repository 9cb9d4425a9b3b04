//! JSON encodings. Rationals are `"p/q"` strings; an exact real is either a
//! rational string or an object mapping symbol names to rational strings.

use lacuna_core::constructions::{BlockedWindow, BlocksPlan, BlocksTrace, SparseTrace};
use lacuna_core::distset::{
    DistanceSet, GroupClass, MAX_ENUMERATED, DensityWitness, LambdaEntry, LimitFamily, ReciprocalTail, Sequence, SetKind,
    TruncationStatus,
};
use lacuna_core::exactreal::{format_rational, parse_rational, sort_values};
use lacuna_core::orbits::{CrossSectionWindow, Geometry};
use lacuna_core::semigroup::{DensityCertificate, ThresholdRoute, Tiling};
use lacuna_core::sumwalk::{DensityBound, DensityMode, TameConstant, TameGeneral, TameSet};
use lacuna_core::{Basis, RealQ, Rational};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
#[error("{path}: {message}")]
pub struct WireError {
    pub path: String,
    pub message: String,
}

pub type WireResult<T> = Result<T, WireError>;

fn err<T>(path: &str, message: impl Into<String>) -> WireResult<T> {
    Err(WireError { path: path.to_string(), message: message.into() })
}

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

/// Exact real as `"p/q"` when rational, else `{symbol: "p/q"}`; an `approx`
/// decimal is never part of the value itself.
pub fn real(x: &RealQ) -> Value {
    if let Some(q) = x.as_rational() {
        return rational(q);
    }
    let mut m = Map::new();
    for (name, c) in x.terms() {
        m.insert(name.to_string(), rational(c));
    }
    Value::Object(m)
}

pub fn reals(xs: &[RealQ]) -> Value {
    Value::Array(xs.iter().map(real).collect())
}

/// Advisory decimal rendering.
pub fn approx(x: &RealQ) -> Value {
    Value::String(x.approx_decimal(12))
}

pub fn parse_real(b: &Basis, v: &Value, path: &str) -> WireResult<RealQ> {
    match v {
        Value::String(s) => match parse_rational(s) {
            Ok(q) => Ok(RealQ::rational(b, q)),
            Err(_) => RealQ::symbol(b, s.trim()).or_else(|_| err(path, format!("cannot parse `{s}` as an exact real"))),
        },
        Value::Object(m) => {
            let mut terms = Vec::new();
            for (k, c) in m {
                let Value::String(s) = c else {
                    return err(&format!("{path}.{k}"), "coefficients must be \"p/q\" strings");
                };
                let q = parse_rational(s).or_else(|_| err(&format!("{path}.{k}"), format!("bad rational `{s}`")))?;
                terms.push((k.as_str(), q));
            }
            RealQ::from_terms(b, terms).or_else(|e| err(path, e.to_string()))
        }
        Value::Number(n) if n.is_i64() => Ok(RealQ::integer(b, n.as_i64().unwrap_or(0))),
        _ => err(path, "expected \"p/q\", an integer, or an object of symbol coefficients"),
    }
}

pub fn parse_reals(b: &Basis, v: &Value, path: &str) -> WireResult<Vec<RealQ>> {
    let Value::Array(a) = v else { return err(path, "expected an array") };
    a.iter().enumerate().map(|(i, x)| parse_real(b, x, &format!("{path}[{i}]"))).collect()
}

pub fn field<'a>(v: &'a Value, key: &str, path: &str) -> WireResult<&'a Value> {
    v.get(key).ok_or_else(|| WireError { path: path.to_string(), message: format!("missing field `{key}`") })
}

pub fn usize_field(v: &Value, key: &str, path: &str) -> WireResult<usize> {
    field(v, key, path)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| WireError { path: format!("{path}.{key}"), message: "expected a nonnegative integer".into() })
}

pub fn real_field(b: &Basis, v: &Value, key: &str, path: &str) -> WireResult<RealQ> {
    parse_real(b, field(v, key, path)?, &format!("{path}.{key}"))
}

// ---------------------------------------------------------------------------
// distance sets

/// Tail `scale / (m + shift)` from top-level fields or from
/// `"t": {"formula": "reciprocal_shifted", "params": {...}, "m_max"}`.
fn tail_fields(b: &Basis, v: &Value, path: &str) -> WireResult<(RealQ, u64, usize)> {
    let (src, src_path) = match v.get("t") {
        Some(t) => {
            if let Some(f) = t.get("formula").and_then(Value::as_str) {
                if f != "reciprocal_shifted" {
                    return err(&format!("{path}.t.formula"), format!("unknown formula `{f}` (reciprocal_shifted)"));
                }
            }
            (t.get("params").unwrap_or(t), format!("{path}.t.params"))
        }
        None => (v, path.to_string()),
    };
    let scale = match src.get("scale") {
        Some(s) => parse_real(b, s, &format!("{src_path}.scale"))?,
        None => RealQ::integer(b, 1),
    };
    let shift = usize_field(src, "shift", &src_path)? as u64;
    let m_max = v
        .get("t")
        .and_then(|t| t.get("m_max"))
        .or_else(|| v.get("m_max"))
        .and_then(Value::as_u64)
        .unwrap_or(4096) as usize;
    Ok((scale, shift, m_max))
}

pub fn parse_family(b: &Basis, v: &Value, path: &str) -> WireResult<LimitFamily> {
    let upsilon = real_field(b, v, "upsilon", path)?;
    let (scale, shift, m_max) = tail_fields(b, v, path)?;
    LimitFamily::new(upsilon, ReciprocalTail { scale, shift }, m_max).or_else(|e| err(path, e.to_string()))
}

/// `kind` is `finite`, `limit_family`, `enumerated` (with `name`), or one of
/// the named families `harmonic_partial_sums`, `two_generators`,
/// `upsilon_plus_reciprocal`.
pub fn parse_set(b: &Basis, v: &Value, path: &str) -> WireResult<DistanceSet> {
    let mut kind = field(v, "kind", path)?.as_str().unwrap_or_default();
    if kind == "enumerated" {
        kind = v.get("name").and_then(Value::as_str).unwrap_or_default();
    }
    let lower = match v.get("lower_bound") {
        Some(x) => Some(parse_real(b, x, &format!("{path}.lower_bound"))?),
        None => None,
    };
    let elements = || parse_reals(b, field(v, "elements", path)?, &format!("{path}.elements"));
    let made = match kind {
        "finite" => DistanceSet::finite(elements()?, lower),
        "harmonic" | "harmonic_partial_sums" => {
            let n = v.get("max_index").and_then(Value::as_u64).map_or(MAX_ENUMERATED, |n| n as usize);
            Ok(DistanceSet::harmonic(b, n))
        }
        "two_generators" => {
            let [x, y] = <[RealQ; 2]>::try_from(elements()?).or_else(|_| err(path, "two_generators needs exactly two elements"))?;
            DistanceSet::two_generators(x, y)
        }
        "upsilon_plus_reciprocal" => {
            let upsilon = real_field(b, v, "upsilon", path)?;
            let (scale, shift, m_max) = tail_fields(b, v, path)?;
            DistanceSet::upsilon_plus_reciprocal(upsilon, scale, shift, m_max)
        }
        "limit_family" => DistanceSet::limit_family(parse_family(b, v, path)?, lower),
        other => {
            return err(
                path,
                format!(
                    "unknown set kind `{other}` (finite, limit_family, enumerated, harmonic_partial_sums, two_generators, upsilon_plus_reciprocal)"
                ),
            )
        }
    };
    made.or_else(|e| err(path, e.to_string()))
}

pub fn set_json(s: &DistanceSet) -> Value {
    match s.kind() {
        SetKind::Finite(v) => json!({"kind": "finite", "elements": reals(v)}),
        SetKind::LimitFamily(f) => family_json(f),
        SetKind::Enumerated { sequence: Sequence::HarmonicPartialSums, max_index } => {
            json!({"kind": "enumerated", "name": "harmonic_partial_sums", "max_index": max_index})
        }
        SetKind::Enumerated { sequence: Sequence::ShiftedReciprocal { base, tail }, max_index } => json!({
            "kind": "enumerated", "name": "upsilon_plus_reciprocal", "upsilon": real(base),
            "t": {"formula": "reciprocal_shifted", "params": {"scale": real(&tail.scale), "shift": tail.shift}, "m_max": max_index},
        }),
    }
}

pub fn family_json(f: &LimitFamily) -> Value {
    json!({
        "kind": "limit_family",
        "upsilon": real(&f.upsilon),
        "t": {"formula": "reciprocal_shifted", "params": {"scale": real(&f.tail.scale), "shift": f.tail.shift}, "m_max": f.m_max},
    })
}

fn status(s: &TruncationStatus) -> &'static str {
    match s {
        TruncationStatus::Empty => "empty",
        TruncationStatus::Lattice => "lattice",
        TruncationStatus::NonLattice => "non_lattice",
    }
}

pub fn lambda_entry(e: &LambdaEntry) -> Value {
    json!({"n": e.n, "lambda": real(&e.lambda), "status": status(&e.status)})
}

pub fn group_class(c: &GroupClass) -> Value {
    match c {
        GroupClass::Lattice { lambda } => json!({"class": c.name(), "lambda": real(lambda)}),
        GroupClass::DenseLocallyLattice { table } => {
            json!({"class": c.name(), "table": table.iter().map(lambda_entry).collect::<Vec<_>>()})
        }
        GroupClass::DenseBounded { n0, witness } => {
            let w = match witness {
                DensityWitness::Incommensurable(a, b) => json!({"incommensurable": [real(a), real(b)]}),
                DensityWitness::LimitPoint(u) => json!({"limit_point": real(u)}),
            };
            json!({"class": c.name(), "n0": n0, "witness": w})
        }
    }
}

// ---------------------------------------------------------------------------
// semigroup

pub fn tiling(t: &Tiling) -> Value {
    json!({"length": real(&t.length), "increments": reals(&t.increments)})
}

pub fn certificate(c: &DensityCertificate) -> Value {
    let route = match &c.route {
        ThresholdRoute::Euclid { s_tilde, epsilon_used, g, coeffs, m } => json!({
            "route": "euclid",
            "s_tilde": real(s_tilde),
            "epsilon_used": real(epsilon_used),
            "g": real(g),
            "coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "m": m.to_string(),
        }),
        ThresholdRoute::Lattice { lambda, stabilization_index } => {
            json!({"route": "lattice", "lambda": real(lambda), "stabilization_index": stabilization_index})
        }
    };
    json!({
        "generators": reals(&c.generators),
        "epsilon": real(&c.epsilon),
        "k": real(&c.k),
        "k_approx": approx(&c.k),
        "route": route,
        "window_checked": real(&c.window_checked),
        "witness_count": c.witnesses.len(),
    })
}

// ---------------------------------------------------------------------------
// walks

pub fn tame_set(t: &TameSet) -> Value {
    json!({
        "l": reals(&t.l),
        "r": t.r,
        "d": real(&t.d),
        "eps": real(&t.eps),
        "family": family_json(&t.family),
        "density": real(&t.density),
    })
}

pub fn density_bound(d: &DensityBound) -> Value {
    let mode = match &d.mode {
        DensityMode::DeltaDense => json!({"mode": "delta_dense"}),
        DensityMode::LatticeSteps(g) => json!({"mode": "lattice_steps", "step": real(g)}),
    };
    json!({"n": d.n, "mode": mode, "gcd": real(&d.gcd), "a": real(&d.a), "b": real(&d.b)})
}

pub fn tame_constant(c: &TameConstant) -> Value {
    json!({
        "eps": real(&c.eps),
        "delta": real(&c.delta),
        "d": real(&c.d),
        "n": c.n,
        "m": c.m,
        "n_tilde": c.n_tilde,
        "l_minus": real(&c.l_minus),
        "l_plus": real(&c.l_plus),
        "m1": c.m1,
        "m2": c.m2,
        "x": real(&c.x),
        "y": real(&c.y),
        "bound": density_bound(&c.bound),
        "level": c.level,
        "rbar": tame_set(&c.rbar),
        "lbar_paths": c.lbar_paths.iter().map(|(plus, p)| json!({"uses_plus": plus, "path": reals(p)})).collect::<Vec<_>>(),
    })
}

pub fn tame_general(g: &TameGeneral) -> Value {
    json!({
        "eps": real(&g.eps),
        "delta": real(&g.delta),
        "r_used": g.r_used,
        "n_required": g.n_required,
        "m": g.m,
        "dtilde": reals(&g.dtilde),
        "pairs": g.pairs.iter().map(|(d, t)| json!({"dtilde": real(d), "set": tame_set(t)})).collect::<Vec<_>>(),
        "assignment": g.assignment,
        "chosen": g.chosen,
        "indices": g.indices,
        "constant": tame_constant(&g.constant),
        "rbar": tame_set(&g.rbar),
        "rbar_sources": g.rbar_sources,
    })
}

// ---------------------------------------------------------------------------
// windows

pub fn window(w: &CrossSectionWindow) -> Value {
    let geometry = match &w.geometry {
        Geometry::Line { start, end } => json!({"kind": "line", "start": real(start), "end": real(end)}),
        Geometry::Circle { length } => json!({"kind": "circle", "length": real(length), "analogue": true}),
    };
    json!({
        "orbit_id": w.orbit_id,
        "geometry": geometry,
        "points": reals(w.points()),
        "lacunarity_floor": real(&w.lacunarity_floor),
    })
}

/// A window from `points` (or `start` + `gaps`), optionally on a circle.
pub fn parse_window(b: &Basis, v: &Value, path: &str) -> WireResult<CrossSectionWindow> {
    let id = v.get("orbit_id").and_then(Value::as_str).unwrap_or("orbit").to_string();
    let mut points = match (v.get("points"), v.get("gaps")) {
        (Some(p), _) => parse_reals(b, p, &format!("{path}.points"))?,
        (None, Some(g)) => {
            let start = real_field(b, v, "start", path)?;
            let gaps = parse_reals(b, g, &format!("{path}.gaps"))?;
            let mut pts = vec![start];
            for g in gaps {
                let next = pts.last().map(|p| p + &g).unwrap_or(g);
                pts.push(next);
            }
            pts
        }
        _ => return err(path, "a window needs `points` or `start` and `gaps`"),
    };
    if points.is_empty() {
        return err(path, "a window needs at least one point");
    }
    let floor = match v.get("lacunarity_floor") {
        Some(f) => parse_real(b, f, &format!("{path}.lacunarity_floor"))?,
        None => {
            let mut m: Option<RealQ> = None;
            for w in points.windows(2) {
                let g = &w[1] - &w[0];
                if m.as_ref().map_or(true, |x| g.lt(x).unwrap_or(false)) {
                    m = Some(g);
                }
            }
            m.unwrap_or_else(|| RealQ::integer(b, 1))
        }
    };
    let circle = match v.get("geometry") {
        Some(g) => match g.get("kind").and_then(Value::as_str) {
            Some("circle") => Some(real_field(b, g, "length", &format!("{path}.geometry"))?),
            Some("line") | None => None,
            Some(other) => return err(&format!("{path}.geometry.kind"), format!("unknown geometry `{other}`")),
        },
        None => None,
    };
    let made = if let Some(length) = circle {
        sort_values(&mut points).or_else(|e| err(path, e.to_string()))?;
        CrossSectionWindow::new(id, Geometry::Circle { length }, points, floor)
    } else {
        CrossSectionWindow::line(id, points, floor)
    };
    made.or_else(|e| err(path, e.to_string()))
}

/// `{"windows": [...]}`, a bare array, or a single window object.
pub fn parse_windows(b: &Basis, v: &Value) -> WireResult<Vec<CrossSectionWindow>> {
    let list = match v {
        Value::Array(a) => a.clone(),
        Value::Object(o) if o.contains_key("windows") => match &o["windows"] {
            Value::Array(a) => a.clone(),
            _ => return err("windows", "expected an array"),
        },
        other => vec![other.clone()],
    };
    list.iter().enumerate().map(|(i, w)| parse_window(b, w, &format!("windows[{i}]"))).collect()
}

pub fn parse_blocked(b: &Basis, v: &Value) -> WireResult<Vec<BlockedWindow>> {
    let list = match v {
        Value::Array(a) => a.clone(),
        Value::Object(o) if o.contains_key("windows") => o["windows"].as_array().cloned().unwrap_or_default(),
        other => vec![other.clone()],
    };
    list.iter()
        .enumerate()
        .map(|(i, w)| {
            let window = parse_window(b, w, &format!("windows[{i}]"))?;
            let flag = |k: &str| w.get(k).and_then(Value::as_bool).unwrap_or(false);
            Ok(BlockedWindow { window, infinite_left: flag("infinite_left"), infinite_right: flag("infinite_right") })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// traces

pub fn sparse_trace(t: &SparseTrace) -> Value {
    json!({
        "k0": real(&t.k0),
        "stages": t.stages.iter().map(|s| json!({
            "n": s.n,
            "eps": real(&s.eps),
            "k": real(&s.k),
            "k_next": s.k_next.as_ref().map(real),
            "generators": reals(&s.generators),
            "points": reals(&s.points),
            "classes": s.classes,
            "shifts": reals(&s.h_next),
        })).collect::<Vec<_>>(),
        "limit": reals(&t.limit),
        "total_shift": reals(&t.total_shift),
        "tilings": t.tilings.iter().map(tiling).collect::<Vec<_>>(),
        "final_window": window(&t.final_window),
    })
}

pub fn blocks_plan(p: &BlocksPlan) -> Value {
    json!({
        "rank_max": p.rank_max,
        "k0": real(&p.k0),
        "levels": p.levels.iter().map(|l| json!({
            "n": l.n,
            "eps": real(&l.eps),
            "level": l.level,
            "spacing": l.spacing,
            "refine_level": l.refine_level,
            "d": real(&l.d),
        })).collect::<Vec<_>>(),
        "required_length": real(&p.required_length),
    })
}

/// The trace; `full` adds every point and tiling.
pub fn blocks_trace(t: &BlocksTrace, full: bool) -> Value {
    let mut ranks = vec![0usize; t.plan.rank_max + 1];
    for b in &t.blocks {
        ranks[b.rank] += 1;
    }
    let mut v = json!({
        "plan": blocks_plan(&t.plan),
        "points": t.window.len(),
        "blocks_by_rank": ranks,
        "moves": t.moves.iter().map(|m| json!({"stage": m.stage, "rank": m.rank, "shift": real(&m.shift)})).collect::<Vec<_>>(),
        "pairs": t.pairs.iter().map(|p| json!({
            "stage": p.stage, "intermediates": p.intermediates, "skipped_before": p.skipped_before,
        })).collect::<Vec<_>>(),
    });
    if full {
        v["window"] = window(&t.window);
        v["blocks"] = Value::Array(
            t.blocks.iter().map(|b| json!({"first": b.first, "last": b.last, "rank": b.rank})).collect(),
        );
        v["tilings"] = Value::Array(t.tilings.iter().map(tiling).collect());
        v["total_shift"] = reals(&t.total_shift);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_through_json() {
        let b = Basis::standard();
        for v in [json!("3/4"), json!("-2"), json!({"unit": "1/2", "sqrt2": "3"}), json!({"sqrt5": "-1/7"})] {
            let x = parse_real(&b, &v, "x").unwrap();
            assert_eq!(parse_real(&b, &real(&x), "x").unwrap(), x);
        }
        assert_eq!(real(&RealQ::ratio(&b, 6, 4)), json!("3/2"));
        assert!(parse_real(&b, &json!("pi"), "x").is_err());
        assert!(parse_real(&b, &json!(1.5), "x").is_err());
    }

    #[test]
    fn sets_round_trip_through_json() {
        let b = Basis::standard();
        for v in [
            json!({"kind": "finite", "elements": ["1", {"sqrt2": "1"}]}),
            json!({"kind": "harmonic_partial_sums", "max_index": 50}),
            json!({"kind": "limit_family", "upsilon": "1", "t": {"formula": "reciprocal_shifted", "params": {"scale": "1", "shift": 2}, "m_max": 64}}),
            json!({"kind": "upsilon_plus_reciprocal", "upsilon": "2", "scale": "1/2", "shift": 3, "m_max": 40}),
        ] {
            let s = parse_set(&b, &v, "set").unwrap();
            assert_eq!(parse_set(&b, &set_json(&s), "set").unwrap(), s);
        }
        assert!(parse_set(&b, &json!({"kind": "two_generators", "elements": ["1"]}), "set").is_err());
    }

    #[test]
    fn windows_from_gaps_and_circles() {
        let b = Basis::standard();
        let w = parse_window(&b, &json!({"orbit_id": "a", "start": "1", "gaps": ["1/2", "1"]}), "w").unwrap();
        assert_eq!(w.points(), &[RealQ::integer(&b, 1), RealQ::ratio(&b, 3, 2), RealQ::ratio(&b, 5, 2)]);
        assert_eq!(w.lacunarity_floor, RealQ::ratio(&b, 1, 2));
        let c = parse_window(
            &b,
            &json!({"points": ["1", "0"], "geometry": {"kind": "circle", "length": "2"}, "lacunarity_floor": "1"}),
            "w",
        )
        .unwrap();
        assert!(c.is_circle());
        assert_eq!(parse_window(&b, &window(&c), "w").unwrap(), c);
    }
}
