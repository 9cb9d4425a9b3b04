//! Independent oracles shared by the integration tests. None of them call
//! into the search code they check; they enumerate directly.

#![allow(dead_code)]

use lacuna_core::exactreal::sort_values;
use lacuna_core::orbits::CrossSectionWindow;
use lacuna_core::{Basis, RealQ, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(b: &Basis, p: i64, d: i64) -> RealQ {
    RealQ::ratio(b, p, d)
}

pub fn rat(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub fn sqrt2(b: &Basis) -> RealQ {
    RealQ::symbol(b, "sqrt2").unwrap()
}

pub fn sum(b: &Basis, xs: &[RealQ]) -> RealQ {
    xs.iter().fold(RealQ::zero(b), |a, x| &a + x)
}

/// Random rational in `[lo, hi]` with denominator `den`.
pub fn rand_rational(rng: &mut ChaCha8Rng, b: &Basis, lo: i64, hi: i64, den: i64) -> RealQ {
    q(b, rng.gen_range(lo * den..=hi * den), den)
}

/// Every tuple in `r^n` whose partial deviations from `k d` stay below `eps`;
/// returns the distinct totals, sorted.
pub fn brute_an(eps: &RealQ, d: &RealQ, r: &[RealQ], n: usize) -> Vec<RealQ> {
    let b = eps.basis();
    let mut out: Vec<RealQ> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let mut dev = RealQ::zero(b);
        let mut total = RealQ::zero(b);
        let mut ok = true;
        for &i in &idx {
            dev = &dev + &(&r[i] - d);
            total = &total + &r[i];
            ok &= dev.abs().unwrap().lt(eps).unwrap();
        }
        if ok && !out.contains(&total) {
            out.push(total);
        }
        let mut k = 0;
        loop {
            if k == n {
                sort_values(&mut out).unwrap();
                return out;
            }
            idx[k] += 1;
            if idx[k] < r.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Whether some multiplicity vector sums to `t`, trying every vector with
/// `c_i <= t / g_i` (floats only propose; equality is decided exactly).
pub fn multiset_member(t: &RealQ, gens: &[RealQ]) -> bool {
    let tf = t.approx_f64();
    let gf: Vec<f64> = gens.iter().map(|g| g.approx_f64()).collect();
    let mut counts = vec![0i64; gens.len()];
    fn rec(k: usize, acc: f64, counts: &mut Vec<i64>, gf: &[f64], tf: f64, t: &RealQ, gens: &[RealQ]) -> bool {
        if k == gf.len() {
            if (acc - tf).abs() > 1e-6 {
                return false;
            }
            let b = t.basis();
            let s = gens.iter().zip(counts.iter()).fold(RealQ::zero(b), |a, (g, &c)| &a + &g.scale_int(c));
            return &s == t;
        }
        let mut c = 0;
        while acc + c as f64 * gf[k] <= tf + 1e-6 {
            counts[k] = c;
            if rec(k + 1, acc + c as f64 * gf[k], counts, gf, tf, t, gens) {
                return true;
            }
            c += 1;
        }
        counts[k] = 0;
        false
    }
    rec(0, 0.0, &mut counts, &gf, tf, t, gens)
}

/// All nonempty sums of `gens` in `[lo, hi]`, sorted and distinct. The last
/// multiplicity is solved for directly; floats only bound the loops.
pub fn semigroup_points(gens: &[RealQ], lo: &RealQ, hi: &RealQ) -> Vec<RealQ> {
    let b = lo.basis();
    let gf: Vec<f64> = gens.iter().map(|g| g.approx_f64()).collect();
    let (lf, hf) = (lo.approx_f64() - 1e-6, hi.approx_f64() + 1e-6);
    let mut out = Vec::new();
    let mut counts = vec![0i64; gens.len()];
    fn rec(k: usize, acc: f64, counts: &mut Vec<i64>, gf: &[f64], lf: f64, hf: f64, gens: &[RealQ], b: &Basis, out: &mut Vec<RealQ>) {
        let last = gf.len() - 1;
        if k == last {
            let from = ((lf - acc) / gf[k]).floor().max(0.0) as i64;
            let to = ((hf - acc) / gf[k]).ceil() as i64;
            for c in from..=to {
                counts[k] = c;
                if counts.iter().any(|&c| c > 0) {
                    out.push(gens.iter().zip(counts.iter()).fold(RealQ::zero(b), |a, (g, &c)| &a + &g.scale_int(c)));
                }
            }
            counts[k] = 0;
            return;
        }
        let mut c = 0;
        while acc + c as f64 * gf[k] <= hf {
            counts[k] = c;
            rec(k + 1, acc + c as f64 * gf[k], counts, gf, lf, hf, gens, b, out);
            c += 1;
        }
        counts[k] = 0;
    }
    rec(0, 0.0, &mut counts, &gf, lf, hf, gens, b, &mut out);
    // floats decide clear cases; anything near a bound is compared exactly
    let near = |x: f64, y: f64| (x - y).abs() < 1e-6;
    let mut keyed: Vec<(f64, RealQ)> = out
        .into_iter()
        .map(|p| (p.approx_f64(), p))
        .filter(|(f, p)| {
            let above = if near(*f, lf + 1e-6) { p.ge(lo).unwrap() } else { *f > lf };
            let below = if near(*f, hf - 1e-6) { p.le(hi).unwrap() } else { *f < hf };
            above && below
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut inside: Vec<RealQ> = keyed.into_iter().map(|(_, p)| p).collect();
    if inside.windows(2).any(|w| w[0].gt(&w[1]).unwrap()) {
        sort_values(&mut inside).unwrap();
    }
    inside.dedup();
    inside
}

/// Every open interval of length `eps` inside `[lo, hi]` meets `points`.
pub fn dense_in(points: &[RealQ], lo: &RealQ, hi: &RealQ, eps: &RealQ) -> bool {
    let mut prev = lo.clone();
    for p in points.iter().filter(|p| p.gt(lo).unwrap() && p.lt(hi).unwrap()).chain(std::iter::once(hi)) {
        if !(p - &prev).lt(eps).unwrap() {
            return false;
        }
        prev = p.clone();
    }
    true
}

/// Largest integer not a sum of `gens` (gcd 1), by reachability table.
pub fn coin_frobenius(gens: &[u64]) -> i64 {
    let max = *gens.iter().max().unwrap();
    let limit = (max * max + max) as usize;
    let mut reach = vec![false; limit + 1];
    reach[0] = true;
    for n in 1..=limit {
        reach[n] = gens.iter().any(|&g| n >= g as usize && reach[n - g as usize]);
    }
    (0..=limit).rev().find(|&n| !reach[n]).map_or(-1, |n| n as i64)
}

/// gcd of reduced fractions: `gcd(numerators) / lcm(denominators)`.
pub fn rational_gcd(values: &[Rational]) -> Rational {
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(1);
    for v in values {
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    Rational::new(num, den)
}

/// Harmonic partial sums not exceeding `bound`.
pub fn harmonic_upto(bound: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut h = rat(0, 1);
    let mut k = 1;
    loop {
        h += rat(1, k);
        if h > rat(bound, 1) {
            return out;
        }
        out.push(h.clone());
        k += 1;
    }
}

/// Smallest integer `i >= 1` with every gap `<= i`.
pub fn gap_sup_index(w: &CrossSectionWindow) -> u64 {
    let pts = w.points();
    let mut i = 1u64;
    for p in pts.windows(2) {
        let g = &p[1] - &p[0];
        while g.gt(&RealQ::integer(g.basis(), i as i64)).unwrap() {
            i += 1;
        }
    }
    i
}

/// Random line window with `n` gaps drawn from `elems`.
pub fn random_s_window(rng: &mut ChaCha8Rng, b: &Basis, elems: &[RealQ], n: usize) -> CrossSectionWindow {
    let gaps: Vec<RealQ> = (0..n).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect();
    let start = rand_rational(rng, b, -20, 20, 7);
    let floor = elems.iter().fold(elems[0].clone(), |m, e| m.min(e).unwrap());
    CrossSectionWindow::from_gaps("w", start, &gaps, floor).unwrap()
}
