//! Randomized property suite behind `lacuna verify`. Each invariant is checked
//! against a direct oracle written here, independent of the search code.

use lacuna_core::constructions::{lambda_to_s, s_to_lambda, sparse_k0, sparse_regularize, SparseOptions};
use lacuna_core::counterexample::{circle_lambda_check, circle_s_check, dyadic_escape, verify_dyadic, PreciseValue};
use lacuna_core::distset::{DistanceSet, GroupClass};
use lacuna_core::orbits::{is_regular, translate, CrossSectionWindow};
use lacuna_core::semigroup::{frobenius_number, member};
use lacuna_core::sumwalk::{an_enumerate, EnumOptions, StepSet, SumWalkSpec};
use lacuna_core::{Basis, RealQ};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::VerifyArgs;
use crate::error::CliError;

const SUITES: [&str; 6] = ["distset", "semigroup", "sumwalk", "orbits", "constructions", "counterexample"];

struct Tally {
    module: &'static str,
    name: &'static str,
    cases: usize,
    passed: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(module: &'static str, name: &'static str) -> Self {
        Tally { module, name, cases: 0, passed: 0, first_failure: None }
    }

    fn record(&mut self, ok: Result<bool, String>, case: impl FnOnce() -> String) {
        self.cases += 1;
        match ok {
            Ok(true) => self.passed += 1,
            Ok(false) => {
                self.first_failure.get_or_insert_with(case);
            }
            Err(e) => {
                self.first_failure.get_or_insert_with(|| format!("{}: {e}", case()));
            }
        }
    }

    fn json(&self) -> Value {
        json!({
            "module": self.module,
            "invariant": self.name,
            "cases": self.cases,
            "passed": self.passed,
            "failed": self.cases - self.passed,
            "first_failure": self.first_failure,
        })
    }
}

fn e2s<E: ToString>(e: E) -> String {
    e.to_string()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn verify(b: &Basis, seed: u64, a: &VerifyArgs) -> Result<Value, CliError> {
    let chosen: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&a.suite.as_str()) {
        vec![a.suite.as_str()]
    } else {
        return Err(CliError::input("Config", format!("unknown suite `{}`", a.suite)));
    };
    if a.cases == 0 {
        return Err(CliError::input("Config", "cases must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = Vec::new();
    for s in chosen {
        match s {
            "distset" => tallies.push(lattice_lambda(b, &mut rng, a.cases)),
            "semigroup" => {
                tallies.push(member_matches_coin_table(b, &mut rng, a.cases));
                tallies.push(frobenius_matches_table(&mut rng, a.cases));
            }
            "sumwalk" => tallies.push(walks_match_brute_force(b, &mut rng, a.cases)),
            "orbits" => tallies.push(regularity_is_translation_invariant(b, &mut rng, a.cases)),
            "constructions" => {
                tallies.push(lattice_round_trip(b, &mut rng, a.cases));
                tallies.push(sparse_regularize_equivariant(b, &mut rng, a.cases.min(8)));
            }
            "counterexample" => {
                tallies.push(circle_checks_agree(b, &mut rng, a.cases));
                tallies.push(dyadic_rechecks(&mut rng, a.cases.min(9)));
            }
            _ => unreachable!(),
        }
    }
    let failed: usize = tallies.iter().map(|t| t.cases - t.passed).sum();
    let cases: usize = tallies.iter().map(|t| t.cases).sum();
    Ok(json!({
        "suite": a.suite,
        "cases": cases,
        "failed": failed,
        "invariants": tallies.iter().map(Tally::json).collect::<Vec<_>>(),
    }))
}

/// Sets `{a_i / den}` classify as the lattice `gcd(a_i) / den`.
fn lattice_lambda(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("distset", "lattice_lambda_is_integer_gcd");
    for _ in 0..cases {
        let den = rng.gen_range(1..10);
        let k = rng.gen_range(1..5);
        let mut nums: Vec<i64> = (0..k).map(|_| rng.gen_range(1..40)).collect();
        nums.sort_unstable();
        nums.dedup();
        let g = nums.iter().fold(0, |g, &n| gcd(g, n));
        let expect = RealQ::ratio(b, g, den);
        let ok = DistanceSet::finite(nums.iter().map(|&n| RealQ::ratio(b, n, den)).collect(), None)
            .and_then(|s| s.classify(&RealQ::integer(b, 64)))
            .map(|c| matches!(c, GroupClass::Lattice { lambda } if lambda == expect))
            .map_err(e2s);
        t.record(ok, || format!("{nums:?}/{den}"));
    }
    t
}

/// Membership of `t` in the semigroup of integers `{a_i} / den` by a
/// reachability table.
fn reachable(nums: &[i64], target: i64) -> bool {
    if target < 0 {
        return false;
    }
    let mut reach = vec![false; target as usize + 1];
    reach[0] = true;
    for n in 1..=target as usize {
        reach[n] = nums.iter().any(|&g| n as i64 >= g && reach[n - g as usize]);
    }
    reach[target as usize]
}

fn member_matches_coin_table(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("semigroup", "member_matches_coin_table");
    for _ in 0..cases {
        let den = rng.gen_range(1..6);
        let k = rng.gen_range(1..4);
        let mut nums: Vec<i64> = (0..k).map(|_| rng.gen_range(2..15)).collect();
        nums.sort_unstable();
        nums.dedup();
        let target = rng.gen_range(1..(30 * nums[0]));
        let tv = RealQ::ratio(b, target, den);
        let elems: Vec<RealQ> = nums.iter().map(|&n| RealQ::ratio(b, n, den)).collect();
        let ok = (|| {
            let s = DistanceSet::finite(elems.clone(), None).map_err(e2s)?;
            let got = member(&tv, &s).map_err(e2s)?;
            let expect = reachable(&nums, target);
            Ok(match got {
                None => !expect,
                Some(tl) => {
                    let total = tl.increments.iter().fold(RealQ::zero(b), |a, x| &a + x);
                    expect && total == tv && tl.increments.iter().all(|x| elems.contains(x))
                }
            })
        })();
        t.record(ok, || format!("t = {target}/{den}, S = {nums:?}/{den}"));
    }
    t
}

fn frobenius_matches_table(rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("semigroup", "frobenius_matches_coin_table");
    let mut done = 0;
    while done < cases {
        let k = rng.gen_range(2..4);
        let mut gens: Vec<u64> = (0..k).map(|_| rng.gen_range(2..13)).collect();
        gens.sort_unstable();
        gens.dedup();
        if gens.iter().fold(0, |g, &n| gcd(g, n as i64)) != 1 {
            continue;
        }
        done += 1;
        let ints: Vec<i64> = gens.iter().map(|&g| g as i64).collect();
        let limit = ints[ints.len() - 1] * ints[ints.len() - 1];
        let expect = (0..=limit).rev().find(|&n| !reachable(&ints, n)).unwrap_or(-1);
        t.record(frobenius_number(&gens).map(|f| f == expect).map_err(e2s), || format!("{gens:?}"));
    }
    t
}

/// `A_n` for finite rational step sets against enumeration of every tuple.
fn walks_match_brute_force(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("sumwalk", "an_matches_tuple_enumeration");
    for _ in 0..cases {
        let e = rng.gen_range(1..5);
        let eps = RealQ::ratio(b, e, 4);
        let d = RealQ::integer(b, rng.gen_range(2..6));
        let k = rng.gen_range(1..5);
        let mut r: Vec<RealQ> = (0..k).map(|_| &d + &RealQ::ratio(b, rng.gen_range(1 - 2 * e..2 * e), 8)).collect();
        r.push(d.clone());
        lacuna_core::exactreal::sort_values(&mut r).expect("rationals");
        r.dedup();
        let n = rng.gen_range(1..5);
        let ok = (|| {
            let spec = SumWalkSpec::constant(eps.clone(), d.clone(), StepSet::Finite(r.clone()), n);
            let got: Vec<RealQ> = an_enumerate(&spec, &EnumOptions::default()).map_err(e2s)?.into_iter().map(|e| e.total).collect();
            let mut expect: Vec<RealQ> = Vec::new();
            let mut idx = vec![0usize; n];
            'outer: loop {
                let mut dev = RealQ::zero(b);
                let mut total = RealQ::zero(b);
                let mut inside = true;
                for &i in &idx {
                    dev = &dev + &(&r[i] - &d);
                    total = &total + &r[i];
                    inside &= dev.abs().map_err(e2s)?.lt(&eps).map_err(e2s)?;
                }
                if inside && !expect.contains(&total) {
                    expect.push(total);
                }
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if *slot < r.len() {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            Ok(got.len() == expect.len() && expect.iter().all(|x| got.contains(x)))
        })();
        t.record(ok, || format!("eps = {eps}, d = {d}, n = {n}"));
    }
    t
}

fn random_window(b: &Basis, rng: &mut ChaCha8Rng, elems: &[RealQ], n: usize) -> CrossSectionWindow {
    let gaps: Vec<RealQ> = (0..n).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect();
    let start = RealQ::ratio(b, rng.gen_range(-70..70), 7);
    let floor = elems.iter().fold(elems[0].clone(), |m, e| m.min(e).unwrap_or(m));
    CrossSectionWindow::from_gaps("w", start, &gaps, floor).expect("positive gaps")
}

fn sqrt2(b: &Basis) -> RealQ {
    RealQ::symbol(b, "sqrt2").expect("standard basis")
}

fn regularity_is_translation_invariant(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("orbits", "regularity_is_translation_invariant");
    let elems = vec![RealQ::integer(b, 1), sqrt2(b)];
    let s = DistanceSet::finite(elems.clone(), None).expect("valid set");
    for _ in 0..cases {
        let n = rng.gen_range(2..10);
        let mut w = random_window(b, rng, &elems, n);
        let regular = rng.gen_bool(0.5);
        if !regular {
            let mut pts = w.points().to_vec();
            let last = pts.len() - 1;
            pts[last] = &pts[last] + &RealQ::ratio(b, 1, 3);
            w = CrossSectionWindow::line("w", pts, RealQ::integer(b, 1)).expect("increasing");
        }
        let shift = RealQ::ratio(b, rng.gen_range(-50..50), 11);
        let ok = (|| {
            let here = is_regular(&w, &s).map_err(e2s)?.regular;
            let there = is_regular(&translate(&w, &shift).map_err(e2s)?, &s).map_err(e2s)?.regular;
            Ok(here == regular && there == regular)
        })();
        t.record(ok, || format!("shift {shift}"));
    }
    t
}

fn lattice_round_trip(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("constructions", "lattice_round_trip");
    for _ in 0..cases {
        let lam = RealQ::ratio(b, 1, rng.gen_range(1..9));
        let s = DistanceSet::finite(vec![lam.scale_int(3), lam.scale_int(5)], None).expect("valid set");
        let n = rng.gen_range(8..40);
        let w = random_window(b, rng, std::slice::from_ref(&lam), n);
        let ok = (|| {
            let out = lambda_to_s(&w, &lam, &s).map_err(e2s)?;
            let back = s_to_lambda(&out, &s, &lam).map_err(e2s)?;
            Ok(is_regular(&out, &s).map_err(e2s)?.regular && back == w)
        })();
        t.record(ok, || format!("lambda = {lam}, {n} gaps"));
    }
    t
}

fn sparse_regularize_equivariant(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("constructions", "sparse_regularize_regular_and_equivariant");
    let s = DistanceSet::finite(vec![RealQ::integer(b, 1), sqrt2(b)], None).expect("valid set");
    let opts = SparseOptions::default();
    let Ok(k0) = sparse_k0(&s, &opts) else {
        t.record(Err("no K_0".into()), String::new);
        return t;
    };
    for _ in 0..cases {
        let n = rng.gen_range(4..9);
        let gaps: Vec<RealQ> =
            (0..n).map(|_| &(&k0 + &RealQ::ratio(b, rng.gen_range(1..40), 5)) + &sqrt2(b).scale_int(rng.gen_range(0..3))).collect();
        let w = CrossSectionWindow::from_gaps("w", RealQ::ratio(b, rng.gen_range(-20..20), 3), &gaps, k0.clone())
            .expect("positive gaps");
        let shift = RealQ::ratio(b, rng.gen_range(-100..100), 13);
        let ok = (|| {
            let out = sparse_regularize(&w, &s, &opts).map_err(e2s)?.final_window;
            let moved = sparse_regularize(&translate(&w, &shift).map_err(e2s)?, &s, &opts).map_err(e2s)?.final_window;
            Ok(is_regular(&out, &s).map_err(e2s)?.regular && moved == translate(&out, &shift).map_err(e2s)?)
        })();
        t.record(ok, || format!("{n} gaps, shift {shift}"));
    }
    t
}

/// On a circle of length `l`, `{lambda}` fits iff `l / lambda` is a positive integer.
fn circle_checks_agree(b: &Basis, rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("counterexample", "circle_checks_match_divisibility");
    for _ in 0..cases {
        let (ln, ld) = (rng.gen_range(1..60), rng.gen_range(1..7));
        let (mn, md) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let l = RealQ::ratio(b, ln, ld);
        let lam = RealQ::ratio(b, mn, md);
        // l / lam = ln md / (ld mn)
        let expect = (ln * md) % (ld * mn) == 0;
        let ok = (|| {
            let single = DistanceSet::finite(vec![lam.clone()], None).map_err(e2s)?;
            let a = circle_lambda_check(&l, &lam).map_err(e2s)?;
            let c = circle_s_check(&l, &single).map_err(e2s)?.is_some();
            Ok(a == expect && c == expect)
        })();
        t.record(ok, || format!("l = {l}, lambda = {lam}"));
    }
    t
}

fn dyadic_rechecks(rng: &mut ChaCha8Rng, cases: usize) -> Tally {
    let mut t = Tally::new("counterexample", "dyadic_witness_rechecks_at_double_precision");
    let names = ["sqrt2", "sqrt3", "golden"];
    for i in 0..cases {
        let name = names[i % names.len()];
        let m0 = rng.gen_range(0..80);
        let ok = (|| {
            let w = dyadic_escape(&PreciseValue::named(name, 256).map_err(e2s)?, m0).map_err(e2s)?;
            verify_dyadic(&w, &PreciseValue::named(name, 512).map_err(e2s)?).map_err(e2s)
        })();
        t.record(ok, || format!("{name}, m0 = {m0}"));
    }
    t
}
