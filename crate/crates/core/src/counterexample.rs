//! Periodic-orbit checks, dyadic escape witnesses and the locally lattice
//! obstruction skeleton.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::distset::{DistanceSet, GroupClass, SetError, TruncationStatus};
use crate::exactreal::{ExactError, RealQ, Rational};
use crate::semigroup::{member, SemigroupError, Tiling};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CounterexampleError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error("precision exhausted after {doublings} doublings at {bits} bits")]
    PrecisionExhausted { bits: u32, doublings: u64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

type Result<T> = core::result::Result<T, CounterexampleError>;

/// A circle of length `l` carries a cross section with all gaps `lambda`
/// iff `l / lambda` is a positive integer.
pub fn circle_lambda_check(l: &RealQ, lambda: &RealQ) -> Result<bool> {
    if !l.is_positive()? || !lambda.is_positive()? {
        return Err(CounterexampleError::Invalid("lengths must be positive".into()));
    }
    Ok(l.commensurability_ratio(lambda).is_some_and(|r| r.is_integer() && r.is_positive()))
}

/// A tiling of the circumference by elements of `s`, if one exists.
pub fn circle_s_check(l: &RealQ, s: &DistanceSet) -> Result<Option<Tiling>> {
    if !l.is_positive()? {
        return Err(CounterexampleError::Invalid("circumference must be positive".into()));
    }
    Ok(member(l, s)?)
}

/// A real number known only through the enclosure `[lo, hi] / 2^bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreciseValue {
    pub name: String,
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl PreciseValue {
    pub fn new(name: impl Into<String>, lo: BigInt, hi: BigInt, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(CounterexampleError::Invalid("empty enclosure".into()));
        }
        Ok(PreciseValue { name: name.into(), lo, hi, bits })
    }

    /// `sqrt(n)` for a non-square `n`.
    pub fn sqrt(n: u32, bits: u32) -> Result<Self> {
        let r = BigInt::from(n).sqrt();
        if &r * &r == BigInt::from(n) {
            return Err(CounterexampleError::Invalid(alloc::format!("sqrt({n}) is rational")));
        }
        let s = (BigInt::from(n) << (2 * bits as usize)).sqrt();
        Self::new(alloc::format!("sqrt{n}"), s.clone(), s + 1, bits)
    }

    /// `(1 + sqrt 5) / 2`.
    pub fn golden(bits: u32) -> Result<Self> {
        let s = (BigInt::from(5) << (2 * bits as usize)).sqrt();
        let lo = ((BigInt::one() << bits as usize) + s) >> 1usize;
        Self::new("golden", lo.clone(), lo + 1, bits)
    }

    /// `sqrtN` or `golden`.
    pub fn named(name: &str, bits: u32) -> Result<Self> {
        if name == "golden" || name == "phi" {
            return Self::golden(bits);
        }
        let n = name
            .strip_prefix("sqrt")
            .and_then(|d| d.parse::<u32>().ok())
            .ok_or_else(|| CounterexampleError::Invalid(alloc::format!("unknown constant {name}")))?;
        Self::sqrt(n, bits)
    }

    fn denom(&self) -> BigInt {
        BigInt::one() << self.bits as usize
    }

    pub fn enclosure(&self) -> (Rational, Rational) {
        let d = self.denom();
        (Rational::new(self.lo.clone(), d.clone()), Rational::new(self.hi.clone(), d))
    }
}

/// A certified `m >= m0` with `||2^m gamma||` in `[1/4, 1/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicWitness {
    pub gamma: String,
    pub bits: u32,
    pub gamma_enclosure: (Rational, Rational),
    pub m0: u64,
    /// Nearest integer `k_{m0}` to `2^{m0} gamma`.
    pub k_m0: BigInt,
    /// Enclosure of `a = 2^{m0} gamma - k_{m0}`.
    pub a: (Rational, Rational),
    pub p: u64,
    pub m: u64,
    /// Enclosure of `2^p a` (signed).
    pub scaled: (Rational, Rational),
    /// Enclosure of `||2^m gamma||`.
    pub distance_to_z: (Rational, Rational),
}

fn quarter() -> Rational {
    Rational::new(1.into(), 4.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Enclosure of `|x|` for an interval that does not contain 0.
fn abs_interval(lo: &Rational, hi: &Rational) -> Option<(Rational, Rational)> {
    if lo.is_positive() {
        Some((lo.clone(), hi.clone()))
    } else if hi.is_negative() {
        Some((-hi.clone(), -lo.clone()))
    } else {
        None
    }
}

/// Finds the smallest `p` with `|2^p a| >= 1/4` starting from the nearest
/// integer to `2^{m0} gamma`; then `|2^p a| < 1/2` and `m = m0 + p`.
pub fn dyadic_escape(gamma: &PreciseValue, m0: u64) -> Result<DyadicWitness> {
    let exhausted = |d| CounterexampleError::PrecisionExhausted { bits: gamma.bits, doublings: d };
    let den = gamma.denom();
    let shift = usize::try_from(m0).map_err(|_| exhausted(m0))?;
    let lo = Rational::new(&gamma.lo << shift, den.clone());
    let hi = Rational::new(&gamma.hi << shift, den);
    let k = lo.round();
    if hi.round() != k {
        return Err(exhausted(m0));
    }
    let (a_lo, a_hi) = (&lo - &k, &hi - &k);
    let (mut s_lo, mut s_hi) = (a_lo.clone(), a_hi.clone());
    let mut p = 0u64;
    loop {
        let (abs_lo, abs_hi) = abs_interval(&s_lo, &s_hi).ok_or_else(|| exhausted(m0 + p))?;
        if abs_lo >= quarter() {
            if abs_hi >= half() {
                return Err(exhausted(m0 + p));
            }
            return Ok(DyadicWitness {
                gamma: gamma.name.clone(),
                bits: gamma.bits,
                gamma_enclosure: gamma.enclosure(),
                m0,
                k_m0: k.to_integer(),
                a: (a_lo, a_hi),
                p,
                m: m0 + p,
                scaled: (s_lo, s_hi),
                distance_to_z: (abs_lo, abs_hi),
            });
        }
        if abs_hi >= quarter() {
            return Err(exhausted(m0 + p));
        }
        let two = Rational::from_integer(2.into());
        s_lo = &s_lo * &two;
        s_hi = &s_hi * &two;
        p += 1;
    }
}

/// Recomputes `||2^m gamma||` from a fresh enclosure of `gamma` and checks
/// it lies in `[1/4, 1/2)` and inside the witness interval.
pub fn verify_dyadic(w: &DyadicWitness, gamma: &PreciseValue) -> Result<bool> {
    let den = gamma.denom();
    let shift = usize::try_from(w.m).map_err(|_| CounterexampleError::Invalid("m too large".into()))?;
    let lo = Rational::new(&gamma.lo << shift, den.clone());
    let hi = Rational::new(&gamma.hi << shift, den);
    let n = lo.floor();
    if hi.floor() != n {
        return Ok(false);
    }
    let (f_lo, f_hi) = (&lo - &n, &hi - &n);
    let (d_lo, d_hi) = if f_hi <= half() {
        (f_lo, f_hi)
    } else if f_lo >= half() {
        (Rational::one() - f_hi, Rational::one() - f_lo)
    } else {
        return Ok(false);
    };
    let meets = d_lo <= w.distance_to_z.1 && d_hi >= w.distance_to_z.0;
    Ok(d_lo >= quarter() && d_hi < half() && meets)
}

/// Header attached to every obstruction report.
pub const OBSTRUCTION_SCOPE: &str = "checks the arithmetic hypotheses only: every truncation is a lattice \
     and alpha is incommensurable with each lambda_n; the flow-level conclusion rests on a category argument \
     that is not computed";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionRow {
    pub n: u64,
    pub lambda: RealQ,
    /// `alpha / lambda_n` is irrational.
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub scope: &'static str,
    pub alpha: RealQ,
    pub rows: Vec<ObstructionRow>,
}

/// Verifies, for `n <= n_max`, that `S ∩ [0, n]` generates a lattice
/// `lambda_n Z` and that `alpha` is independent of it.
pub fn obstruction_demo(s: &DistanceSet, alpha: &RealQ, n_max: u64) -> Result<ObstructionReport> {
    let b = s.basis();
    let probe = RealQ::integer(b, n_max as i64);
    match s.classify(&probe) {
        Ok(GroupClass::DenseLocallyLattice { .. }) => {}
        Ok(other) => {
            return Err(CounterexampleError::HypothesisViolation(alloc::format!(
                "S is not dense and locally lattice ({})",
                other.name()
            )))
        }
        Err(SetError::Inconclusive { .. }) => {
            return Err(CounterexampleError::HypothesisViolation("classification inconclusive".into()))
        }
        Err(e) => return Err(e.into()),
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let t = s.lambda_trunc(&RealQ::integer(b, n as i64))?;
        match t.status {
            TruncationStatus::Lattice => {}
            TruncationStatus::Empty => continue,
            TruncationStatus::NonLattice => {
                return Err(CounterexampleError::HypothesisViolation(alloc::format!(
                    "S ∩ [0, {n}] is not a lattice"
                )))
            }
        }
        let independent = alpha.commensurability_ratio(&t.lambda).is_none();
        if !independent {
            return Err(CounterexampleError::HypothesisViolation(alloc::format!(
                "alpha is a rational multiple of lambda_{n} = {}",
                t.lambda
            )));
        }
        rows.push(ObstructionRow { n, lambda: t.lambda, independent });
    }
    Ok(ObstructionReport { scope: OBSTRUCTION_SCOPE, alpha: alpha.clone(), rows })
}

/// `||x||` for an exact rational.
pub fn distance_to_integer(x: &Rational) -> Rational {
    let f = x - x.floor();
    let g = Rational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::string::ToString;
    use crate::exactreal::Basis;
    use alloc::vec;

    #[test]
    fn circle_lambda() {
        let b = Basis::standard();
        let lam = RealQ::ratio(&b, 2, 3);
        assert!(circle_lambda_check(&lam.scale_int(4), &lam).unwrap());
        assert!(!circle_lambda_check(&lam.scale(&Rational::new(7.into(), 2.into())), &lam).unwrap());
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        assert!(!circle_lambda_check(&s2, &RealQ::integer(&b, 1)).unwrap());
    }

    #[test]
    fn circle_s() {
        let b = Basis::rationals();
        let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), RealQ::ratio(&b, 3, 2)], None).unwrap();
        let t = circle_s_check(&RealQ::integer(&b, 4), &s).unwrap().unwrap();
        assert_eq!(t.increments.iter().fold(RealQ::zero(&b), |a, x| &a + x), RealQ::integer(&b, 4));
        let one = DistanceSet::finite(vec![RealQ::integer(&b, 1)], None).unwrap();
        assert!(circle_s_check(&RealQ::ratio(&b, 1, 2), &one).unwrap().is_none());
        let lam = RealQ::ratio(&b, 3, 7);
        let single = DistanceSet::finite(vec![lam.clone()], None).unwrap();
        assert_eq!(circle_s_check(&lam, &single).unwrap().unwrap().increments, vec![lam]);
    }

    fn oracle_distance(name: &str, m: u64) -> f64 {
        // 1024-bit recomputation
        let g = PreciseValue::named(name, 1024).unwrap();
        let (lo, _) = g.enclosure();
        let x = lo * Rational::from_integer(BigInt::one() << m as usize);
        let d = distance_to_integer(&x);
        let scaled = (d * Rational::from_integer(BigInt::from(1u64 << 40))).floor().to_integer();
        scaled.to_string().parse::<f64>().unwrap() / (1u64 << 40) as f64
    }

    #[test]
    fn dyadic_witnesses() {
        for name in ["sqrt2", "sqrt3", "golden"] {
            for m0 in [0u64, 10, 50] {
                let g = PreciseValue::named(name, 256).unwrap();
                let w = dyadic_escape(&g, m0).unwrap();
                assert!(w.m >= m0);
                assert!(w.distance_to_z.0 >= quarter() && w.distance_to_z.1 < half());
                assert!(verify_dyadic(&w, &PreciseValue::named(name, 512).unwrap()).unwrap());
                let d = oracle_distance(name, w.m);
                assert!((0.25..0.5).contains(&d), "{name} {m0}: {d}");
                // p is minimal: every earlier doubling stays below 1/4
                for q in m0..w.m {
                    assert!(oracle_distance(name, q) < 0.25);
                }
                let sc_abs = abs_interval(&w.scaled.0, &w.scaled.1).unwrap();
                assert!(sc_abs.1 < half());
            }
        }
    }

    #[test]
    fn dyadic_immediate_and_exhausted() {
        let g = PreciseValue::golden(256).unwrap();
        let w = dyadic_escape(&g, 0).unwrap();
        assert_eq!((w.m, w.p), (0, 0));
        assert!(matches!(
            dyadic_escape(&PreciseValue::sqrt(2, 16).unwrap(), 40),
            Err(CounterexampleError::PrecisionExhausted { .. })
        ));
        assert!(PreciseValue::sqrt(4, 64).is_err());
    }

    /// gcd of the harmonic partial sums in `[0, n]`, for each `n`.
    fn harmonic_lambdas_oracle(n_max: i64) -> Vec<Rational> {
        use num_integer::Integer;
        let mut out = Vec::new();
        for n in 1..=n_max {
            let (mut h, mut k) = (Rational::from_integer(0.into()), 1i64);
            let (mut num, mut den) = (BigInt::from(0), BigInt::from(1));
            loop {
                h += Rational::new(1.into(), k.into());
                if h > Rational::from_integer(n.into()) {
                    break;
                }
                // gcd(a/b, c/d) = gcd(a, c) / lcm(b, d) for reduced fractions
                num = num.gcd(h.numer());
                den = den.lcm(h.denom());
                k += 1;
            }
            out.push(Rational::new(num, den));
        }
        out
    }

    #[test]
    fn obstruction() {
        let b = Basis::standard();
        let h = DistanceSet::harmonic(&b, 200);
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let rep = obstruction_demo(&h, &s2, 3).unwrap();
        let lambdas: Vec<RealQ> = rep.rows.iter().map(|r| r.lambda.clone()).collect();
        assert_eq!(lambdas, harmonic_lambdas_oracle(3).iter().map(|q| RealQ::rational(&b, q.clone())).collect::<Vec<_>>());
        assert_eq!(lambdas[..2], [RealQ::integer(&b, 1), RealQ::ratio(&b, 1, 6)]);
        assert!(rep.rows.iter().all(|r| r.independent));
        assert!(matches!(
            obstruction_demo(&h, &RealQ::ratio(&b, 3, 2), 3),
            Err(CounterexampleError::HypothesisViolation(_))
        ));
        let dense = DistanceSet::finite(vec![RealQ::integer(&b, 1), s2.clone()], None).unwrap();
        assert!(matches!(obstruction_demo(&dense, &s2, 3), Err(CounterexampleError::HypothesisViolation(_))));
    }
}
