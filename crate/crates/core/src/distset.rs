//! Distance sets and the classification of the group they generate.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactreal::{sort_values, Basis, ExactError, RealQ, Rational};

/// Hard cap on the number of elements a single enumeration may produce.
pub const MAX_ENUMERATED: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("enumeration cutoff {cutoff} exhausted before reaching the bound")]
    CutoffExceeded { cutoff: usize },
    #[error("the set has infinitely many elements below {bound}")]
    NotLocallyFinite { bound: String },
    #[error("classification inconclusive up to the probe bound ({} truncations examined)", evidence.len())]
    Inconclusive { evidence: Vec<LambdaEntry> },
    #[error("invalid distance set: {0}")]
    Invalid(String),
}

/// `t_m = scale / (m + shift)`, a strictly monotone sequence tending to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocalTail {
    pub scale: RealQ,
    pub shift: u64,
}

impl ReciprocalTail {
    pub fn term(&self, m: usize) -> RealQ {
        let denom = Rational::from_integer(BigInt::from(m as u64 + self.shift));
        self.scale.scale(&(Rational::one() / denom))
    }

    /// Index `m` with `term(m) == t`, if any.
    pub fn index_of(&self, t: &RealQ) -> Option<usize> {
        if t.is_zero() {
            return None;
        }
        // t = scale / (m + shift)  <=>  scale = (m + shift) * t
        let r = self.scale.commensurability_ratio(t)?;
        if !r.is_integer() || r.is_negative() {
            return None;
        }
        let k = r.to_integer().to_u64()?;
        (k >= self.shift).then(|| (k - self.shift) as usize)
    }

    /// Whether the terms increase towards 0 from below.
    pub fn from_below(&self) -> Result<bool, ExactError> {
        Ok(self.scale.signum()? == Ordering::Less)
    }
}

/// The family `{ upsilon + t_m : m >= 0 }` with its enumeration cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitFamily {
    pub upsilon: RealQ,
    pub tail: ReciprocalTail,
    pub m_max: usize,
}

impl LimitFamily {
    pub fn new(upsilon: RealQ, tail: ReciprocalTail, m_max: usize) -> Result<Self, SetError> {
        if tail.shift == 0 {
            return Err(SetError::Invalid("tail shift must be at least 1".into()));
        }
        if tail.scale.is_zero() {
            return Err(SetError::Invalid("tail scale must be nonzero".into()));
        }
        if !upsilon.is_positive()? {
            return Err(SetError::Invalid("upsilon must be positive".into()));
        }
        let fam = LimitFamily { upsilon, tail, m_max };
        if !fam.element(0).is_positive()? {
            return Err(SetError::Invalid("upsilon + t_0 must be positive".into()));
        }
        Ok(fam)
    }

    /// `t_m`.
    pub fn t(&self, m: usize) -> RealQ {
        self.tail.term(m)
    }

    /// `upsilon + t_m`.
    pub fn element(&self, m: usize) -> RealQ {
        &self.upsilon + &self.t(m)
    }

    /// The generators `upsilon + t_0, ..., upsilon + t_m`.
    pub fn generators(&self, m: usize) -> Vec<RealQ> {
        (0..=m).map(|i| self.element(i)).collect()
    }

    pub fn basis(&self) -> &Basis {
        self.upsilon.basis()
    }

    /// Index of `x` in the family, if `x = upsilon + t_m`.
    pub fn index_of(&self, x: &RealQ) -> Option<usize> {
        self.tail.index_of(&(x - &self.upsilon))
    }
}

/// Built-in deterministic sequences for enumerated distance sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sequence {
    /// `H_{m+1} = 1 + 1/2 + ... + 1/(m+1)`; increasing and unbounded.
    HarmonicPartialSums,
    /// `base + tail_m`; monotone and accumulating at `base`.
    ShiftedReciprocal { base: RealQ, tail: ReciprocalTail },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetKind {
    /// Pairwise distinct elements, kept sorted ascending.
    Finite(Vec<RealQ>),
    LimitFamily(LimitFamily),
    Enumerated { sequence: Sequence, max_index: usize },
}

/// A set `S` of positive reals bounded away from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSet {
    kind: SetKind,
    lower_bound: RealQ,
}

/// One row of the truncated-lattice table: `<S ∩ [0, n]> = lambda Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaEntry {
    pub n: u64,
    pub lambda: RealQ,
    pub status: TruncationStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationStatus {
    Empty,
    Lattice,
    NonLattice,
}

/// Why a truncation generates a dense group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityWitness {
    Incommensurable(RealQ, RealQ),
    LimitPoint(RealQ),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupClass {
    Lattice { lambda: RealQ },
    DenseLocallyLattice { table: Vec<LambdaEntry> },
    DenseBounded { n0: u64, witness: DensityWitness },
}

impl GroupClass {
    pub fn name(&self) -> &'static str {
        match self {
            GroupClass::Lattice { .. } => "lattice",
            GroupClass::DenseLocallyLattice { .. } => "dense_locally_lattice",
            GroupClass::DenseBounded { .. } => "dense_bounded",
        }
    }
}

/// The gcd of a truncation together with its status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedLambda {
    pub lambda: RealQ,
    pub status: TruncationStatus,
}

/// Running gcd of `values`; zero with `NonLattice` as soon as two are
/// incommensurable.
pub fn gcd_all(basis: &Basis, values: &[RealQ]) -> Result<TruncatedLambda, ExactError> {
    let mut it = values.iter();
    let Some(first) = it.next() else {
        return Ok(TruncatedLambda { lambda: RealQ::zero(basis), status: TruncationStatus::Empty });
    };
    let mut g = first.abs()?;
    for v in it {
        g = g.gcd(v)?;
        if g.is_zero() {
            return Ok(TruncatedLambda { lambda: g, status: TruncationStatus::NonLattice });
        }
    }
    Ok(TruncatedLambda { lambda: g, status: TruncationStatus::Lattice })
}

impl DistanceSet {
    pub fn finite(mut elements: Vec<RealQ>, lower_bound: Option<RealQ>) -> Result<Self, SetError> {
        if elements.is_empty() {
            return Err(SetError::Invalid("a finite distance set needs at least one element".into()));
        }
        let basis = elements[0].basis().clone();
        sort_values(&mut elements)?;
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(SetError::Invalid("finite elements must be pairwise distinct".into()));
        }
        let min = elements[0].clone();
        let c = lower_bound.unwrap_or_else(|| min.clone());
        if c.basis() != &basis {
            return Err(ExactError::BasisMismatch.into());
        }
        Self::check_bound(&c, &min)?;
        Ok(DistanceSet { kind: SetKind::Finite(elements), lower_bound: c })
    }

    pub fn limit_family(family: LimitFamily, lower_bound: Option<RealQ>) -> Result<Self, SetError> {
        let inf = if family.tail.from_below()? { family.element(0) } else { family.upsilon.clone() };
        let c = lower_bound.unwrap_or_else(|| inf.clone());
        Self::check_bound(&c, &inf)?;
        Ok(DistanceSet { kind: SetKind::LimitFamily(family), lower_bound: c })
    }

    pub fn enumerated(sequence: Sequence, max_index: usize, lower_bound: Option<RealQ>) -> Result<Self, SetError> {
        let inf = match &sequence {
            Sequence::HarmonicPartialSums => None,
            Sequence::ShiftedReciprocal { base, tail } => {
                if tail.shift == 0 || tail.scale.is_zero() {
                    return Err(SetError::Invalid("degenerate reciprocal tail".into()));
                }
                Some(if tail.from_below()? { base + &tail.term(0) } else { base.clone() })
            }
        };
        let basis = match &sequence {
            Sequence::HarmonicPartialSums => lower_bound.as_ref().map(|c| c.basis().clone()),
            Sequence::ShiftedReciprocal { base, .. } => Some(base.basis().clone()),
        }
        .unwrap_or_else(Basis::rationals);
        let inf = inf.unwrap_or_else(|| RealQ::integer(&basis, 1));
        let c = lower_bound.unwrap_or_else(|| inf.clone());
        Self::check_bound(&c, &inf)?;
        Ok(DistanceSet { kind: SetKind::Enumerated { sequence, max_index }, lower_bound: c })
    }

    /// Partial sums of the harmonic series over `basis`.
    pub fn harmonic(basis: &Basis, max_index: usize) -> Self {
        Self::enumerated(Sequence::HarmonicPartialSums, max_index, Some(RealQ::integer(basis, 1)))
            .expect("harmonic sums are bounded below by 1")
    }

    /// `{a, b}`.
    pub fn two_generators(a: RealQ, b: RealQ) -> Result<Self, SetError> {
        Self::finite(alloc::vec![a, b], None)
    }

    /// `{upsilon + scale/(m + shift)}` as a limit family.
    pub fn upsilon_plus_reciprocal(upsilon: RealQ, scale: RealQ, shift: u64, m_max: usize) -> Result<Self, SetError> {
        Self::limit_family(LimitFamily::new(upsilon, ReciprocalTail { scale, shift }, m_max)?, None)
    }

    fn check_bound(c: &RealQ, inf: &RealQ) -> Result<(), SetError> {
        if !c.is_positive()? {
            return Err(SetError::Invalid("lower bound must be positive".into()));
        }
        if c.gt(inf)? {
            return Err(SetError::Invalid("lower bound exceeds the smallest element".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn lower_bound(&self) -> &RealQ {
        &self.lower_bound
    }

    pub fn basis(&self) -> &Basis {
        self.lower_bound.basis()
    }

    /// The element with index `m` for indexed sets (sorted position for finite ones).
    pub fn element(&self, m: usize) -> Option<RealQ> {
        match &self.kind {
            SetKind::Finite(v) => v.get(m).cloned(),
            SetKind::LimitFamily(f) => Some(f.element(m)),
            SetKind::Enumerated { sequence, max_index } => (m <= *max_index).then(|| sequence_term(sequence, self.basis(), m)),
        }
    }

    /// Number of elements, when finite.
    pub fn finite_len(&self) -> Option<usize> {
        match &self.kind {
            SetKind::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    /// All elements `<= bound`, sorted ascending.
    pub fn enumerate_upto(&self, bound: &RealQ) -> Result<Vec<RealQ>, SetError> {
        if bound.lt(&self.lower_bound)? {
            return Ok(Vec::new());
        }
        match &self.kind {
            SetKind::Finite(v) => {
                let mut out = Vec::new();
                for x in v {
                    if x.gt(bound)? {
                        break;
                    }
                    out.push(x.clone());
                }
                Ok(out)
            }
            SetKind::LimitFamily(f) => {
                monotone_upto(&f.upsilon, &f.tail, bound, f.m_max, |m| f.element(m))
            }
            SetKind::Enumerated { sequence, max_index } => match sequence {
                Sequence::HarmonicPartialSums => {
                    let mut out = Vec::new();
                    let mut h = RealQ::zero(self.basis());
                    for m in 0.. {
                        if m > *max_index || m >= MAX_ENUMERATED {
                            return Err(SetError::CutoffExceeded { cutoff: (*max_index).min(MAX_ENUMERATED) });
                        }
                        h = &h + &RealQ::ratio(self.basis(), 1, m as i64 + 1);
                        if h.gt(bound)? {
                            break;
                        }
                        out.push(h.clone());
                    }
                    Ok(out)
                }
                Sequence::ShiftedReciprocal { base, tail } => {
                    monotone_upto(base, tail, bound, *max_index, |m| base + &tail.term(m))
                }
            },
        }
    }

    /// Exact membership test.
    pub fn contains(&self, x: &RealQ) -> Result<bool, SetError> {
        if x.lt(&self.lower_bound)? {
            return Ok(false);
        }
        match &self.kind {
            SetKind::Finite(v) => Ok(v.iter().any(|e| e == x)),
            SetKind::LimitFamily(f) => Ok(f.index_of(x).is_some()),
            SetKind::Enumerated { sequence, .. } => match sequence {
                Sequence::HarmonicPartialSums => {
                    let below = self.enumerate_upto(x)?;
                    Ok(below.last() == Some(x))
                }
                Sequence::ShiftedReciprocal { base, tail } => Ok(tail.index_of(&(x - base)).is_some()),
            },
        }
    }

    /// `lambda_n`: the gcd of `S ∩ [0, n]`, zero when empty or non-lattice.
    pub fn lambda_trunc(&self, n: &RealQ) -> Result<TruncatedLambda, SetError> {
        let elems = self.enumerate_upto(n)?;
        Ok(gcd_all(self.basis(), &elems)?)
    }

    /// Trichotomy of the generated group, probing truncations up to `probe_bound`.
    pub fn classify(&self, probe_bound: &RealQ) -> Result<GroupClass, SetError> {
        let basis = self.basis();
        match &self.kind {
            SetKind::Finite(v) => {
                let mut g = v[0].clone();
                for x in &v[1..] {
                    g = g.gcd(x)?;
                    if g.is_zero() {
                        let n0 = ceil_u64(x)?;
                        let partner = v.iter().find(|y| y.commensurability_ratio(x).is_none()).cloned();
                        let partner = partner.unwrap_or_else(|| v[0].clone());
                        return Ok(GroupClass::DenseBounded {
                            n0,
                            witness: DensityWitness::Incommensurable(partner, x.clone()),
                        });
                    }
                }
                Ok(GroupClass::Lattice { lambda: g })
            }
            SetKind::LimitFamily(f) => Ok(GroupClass::DenseBounded {
                n0: limit_n0(&f.upsilon, &f.tail)?,
                witness: DensityWitness::LimitPoint(f.upsilon.clone()),
            }),
            SetKind::Enumerated { sequence, .. } => {
                if let Sequence::ShiftedReciprocal { base, tail } = sequence {
                    return Ok(GroupClass::DenseBounded {
                        n0: limit_n0(base, tail)?,
                        witness: DensityWitness::LimitPoint(base.clone()),
                    });
                }
                let top = probe_bound.floor_div(&RealQ::integer(basis, 1))?;
                let top = top.to_u64().unwrap_or(0);
                if let (Sequence::HarmonicPartialSums, SetKind::Enumerated { max_index, .. }) = (sequence, &self.kind) {
                    let table = harmonic_lambdas(basis, top, (*max_index).min(MAX_ENUMERATED))?;
                    let decreased = table.windows(2).any(|w| w[0].lambda != w[1].lambda);
                    return if decreased {
                        Ok(GroupClass::DenseLocallyLattice { table })
                    } else {
                        Err(SetError::Inconclusive { evidence: table })
                    };
                }
                let elems = self.enumerate_upto(&RealQ::integer(basis, top as i64))?;
                let mut table = Vec::new();
                let mut idx = 0;
                let mut g: Option<RealQ> = None;
                for n in 1..=top {
                    let bound = RealQ::integer(basis, n as i64);
                    while idx < elems.len() && elems[idx].le(&bound)? {
                        let x = &elems[idx];
                        g = Some(match g {
                            None => x.clone(),
                            Some(prev) => prev.gcd(x)?,
                        });
                        if g.as_ref().is_some_and(RealQ::is_zero) {
                            return Ok(GroupClass::DenseBounded {
                                n0: n,
                                witness: DensityWitness::Incommensurable(elems[0].clone(), x.clone()),
                            });
                        }
                        idx += 1;
                    }
                    let entry = match &g {
                        None => LambdaEntry { n, lambda: RealQ::zero(basis), status: TruncationStatus::Empty },
                        Some(l) => LambdaEntry { n, lambda: l.clone(), status: TruncationStatus::Lattice },
                    };
                    table.push(entry);
                }
                let lattice: Vec<&LambdaEntry> =
                    table.iter().filter(|e| e.status == TruncationStatus::Lattice).collect();
                let decreased = lattice.windows(2).any(|w| w[0].lambda != w[1].lambda);
                if decreased {
                    Ok(GroupClass::DenseLocallyLattice { table })
                } else {
                    Err(SetError::Inconclusive { evidence: table })
                }
            }
        }
    }

    /// A limit point of `S` with a monotone subsequence converging to it.
    pub fn limit_point(&self) -> Option<LimitFamily> {
        match &self.kind {
            SetKind::Finite(_) => None,
            SetKind::LimitFamily(f) => Some(f.clone()),
            SetKind::Enumerated { sequence, max_index } => match sequence {
                Sequence::HarmonicPartialSums => None,
                Sequence::ShiftedReciprocal { base, tail } => Some(LimitFamily {
                    upsilon: base.clone(),
                    tail: tail.clone(),
                    m_max: *max_index,
                }),
            },
        }
    }

    /// `q * S` for a positive rational `q`.
    pub fn scaled(&self, q: &Rational) -> Result<Self, SetError> {
        if !q.is_positive() {
            return Err(SetError::Invalid("scale factor must be positive".into()));
        }
        let c = self.lower_bound.scale(q);
        let kind = match &self.kind {
            SetKind::Finite(v) => SetKind::Finite(v.iter().map(|x| x.scale(q)).collect()),
            SetKind::LimitFamily(f) => SetKind::LimitFamily(LimitFamily {
                upsilon: f.upsilon.scale(q),
                tail: ReciprocalTail { scale: f.tail.scale.scale(q), shift: f.tail.shift },
                m_max: f.m_max,
            }),
            SetKind::Enumerated { sequence: Sequence::ShiftedReciprocal { base, tail }, max_index } => {
                SetKind::Enumerated {
                    sequence: Sequence::ShiftedReciprocal {
                        base: base.scale(q),
                        tail: ReciprocalTail { scale: tail.scale.scale(q), shift: tail.shift },
                    },
                    max_index: *max_index,
                }
            }
            SetKind::Enumerated { sequence: Sequence::HarmonicPartialSums, .. } => {
                return Err(SetError::Invalid("harmonic sums cannot be rescaled in place".into()))
            }
        };
        Ok(DistanceSet { kind, lower_bound: c })
    }
}

/// `lambda_n` for the harmonic partial sums, `n = 1..=top`, over the running
/// denominator `L_k = lcm(1..k)`: `H_k = N_k / L_k` and the numerator gcd stays
/// small, so no step needs a gcd of two large integers.
fn harmonic_lambdas(basis: &Basis, top: u64, cutoff: usize) -> Result<Vec<LambdaEntry>, SetError> {
    let small_gcd = |a: &BigInt, b: &BigInt| -> BigInt {
        if a.is_zero() {
            return b.clone();
        }
        a.gcd(&(b % a))
    };
    let mut l = BigInt::one();
    let mut num = BigInt::zero();
    let mut g = BigInt::zero();
    let mut k: u64 = 0;
    let mut table = Vec::new();
    for n in 1..=top {
        loop {
            let next = k + 1;
            let r = (&l % next).to_u64().unwrap_or(0);
            let f = next / num_integer::gcd(r, next);
            let l2 = &l * f;
            let num2 = &num * f + &l2 / next;
            if num2 > &l2 * n {
                break;
            }
            if next as usize > cutoff {
                return Err(SetError::CutoffExceeded { cutoff });
            }
            g = small_gcd(&(&g * f), &num2);
            l = l2;
            num = num2;
            k = next;
        }
        let entry = if k == 0 {
            LambdaEntry { n, lambda: RealQ::zero(basis), status: TruncationStatus::Empty }
        } else {
            let c = small_gcd(&g, &l);
            LambdaEntry {
                n,
                lambda: RealQ::rational(basis, Rational::new_raw(&g / &c, &l / &c)),
                status: TruncationStatus::Lattice,
            }
        };
        table.push(entry);
    }
    Ok(table)
}

fn sequence_term(seq: &Sequence, basis: &Basis, m: usize) -> RealQ {
    match seq {
        Sequence::HarmonicPartialSums => {
            let mut h = Rational::zero();
            for k in 1..=m as u64 + 1 {
                h += Rational::new(BigInt::one(), BigInt::from(k));
            }
            RealQ::rational(basis, h)
        }
        Sequence::ShiftedReciprocal { base, tail } => base + &tail.term(m),
    }
}

/// Elements `<= bound` of the monotone family `base + tail_m`.
fn monotone_upto(
    base: &RealQ,
    tail: &ReciprocalTail,
    bound: &RealQ,
    cutoff: usize,
    elem: impl Fn(usize) -> RealQ,
) -> Result<Vec<RealQ>, SetError> {
    let from_below = tail.from_below()?;
    let infinite = if from_below { bound.ge(base)? } else { bound.gt(base)? };
    if infinite {
        return Err(SetError::NotLocallyFinite { bound: alloc::format!("{bound}") });
    }
    if !from_below {
        // every element exceeds base >= bound
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for m in 0.. {
        if m > cutoff {
            return Err(SetError::CutoffExceeded { cutoff });
        }
        let x = elem(m);
        if x.gt(bound)? {
            break;
        }
        out.push(x);
    }
    Ok(out)
}

/// Smallest integer `n` with infinitely many family elements in `[0, n]`.
fn limit_n0(base: &RealQ, tail: &ReciprocalTail) -> Result<u64, SetError> {
    let one = RealQ::integer(base.basis(), 1);
    let n = if tail.from_below()? { base.ceil_div(&one)? } else { base.floor_div(&one)? + 1 };
    Ok(n.to_u64().unwrap_or(u64::MAX))
}

fn ceil_u64(x: &RealQ) -> Result<u64, ExactError> {
    let one = RealQ::integer(x.basis(), 1);
    Ok(x.ceil_div(&one)?.to_u64().unwrap_or(u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn harmonic_table_matches_direct_gcds() {
        let b = Basis::standard();
        let h = DistanceSet::harmonic(&b, 1000);
        let fast = harmonic_lambdas(&b, 5, 1000).unwrap();
        for e in &fast {
            let direct = gcd_all(&b, &h.enumerate_upto(&RealQ::integer(&b, e.n as i64)).unwrap()).unwrap();
            assert_eq!(e.lambda, direct.lambda);
        }
        assert!(matches!(harmonic_lambdas(&b, 5, 20), Err(SetError::CutoffExceeded { .. })));
    }

    #[test]
    fn harmonic_enumeration() {
        let b = Basis::rationals();
        let h = DistanceSet::harmonic(&b, 1000);
        let got = h.enumerate_upto(&RealQ::integer(&b, 2)).unwrap();
        assert_eq!(got, vec![RealQ::integer(&b, 1), RealQ::ratio(&b, 3, 2), RealQ::ratio(&b, 11, 6)]);
        assert!(h.enumerate_upto(&RealQ::ratio(&b, 1, 2)).unwrap().is_empty());
        assert!(h.contains(&RealQ::ratio(&b, 25, 12)).unwrap());
        assert!(!h.contains(&RealQ::integer(&b, 2)).unwrap());
    }

    #[test]
    fn finite_enumeration_and_bounds() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let s = DistanceSet::finite(vec![s2.clone()], None).unwrap();
        assert!(s.enumerate_upto(&RealQ::integer(&b, 1)).unwrap().is_empty());
        assert!(DistanceSet::finite(vec![s2.clone(), s2.clone()], None).is_err());
        assert!(DistanceSet::finite(vec![s2.clone()], Some(RealQ::integer(&b, 2))).is_err());
    }

    #[test]
    fn lambda_truncations() {
        let b = Basis::rationals();
        let h = DistanceSet::harmonic(&b, 1000);
        let l2 = h.lambda_trunc(&RealQ::integer(&b, 2)).unwrap();
        assert_eq!(l2.lambda, RealQ::ratio(&b, 1, 6));
        assert_eq!(h.lambda_trunc(&RealQ::integer(&b, 1)).unwrap().lambda, RealQ::integer(&b, 1));
        let empty = h.lambda_trunc(&RealQ::ratio(&b, 1, 2)).unwrap();
        assert_eq!(empty.status, TruncationStatus::Empty);
        assert!(empty.lambda.is_zero());

        let sb = Basis::standard();
        let s = DistanceSet::two_generators(RealQ::integer(&sb, 1), RealQ::symbol(&sb, "sqrt2").unwrap()).unwrap();
        let l = s.lambda_trunc(&RealQ::integer(&sb, 2)).unwrap();
        assert!(l.lambda.is_zero());
        assert_eq!(l.status, TruncationStatus::NonLattice);
    }

    #[test]
    fn limit_family_truncation_is_infinite_past_the_limit() {
        let b = Basis::rationals();
        let s = DistanceSet::upsilon_plus_reciprocal(RealQ::integer(&b, 1), RealQ::integer(&b, 1), 2, 50).unwrap();
        assert!(matches!(s.lambda_trunc(&RealQ::integer(&b, 2)), Err(SetError::NotLocallyFinite { .. })));
        assert!(s.enumerate_upto(&RealQ::integer(&b, 1)).unwrap().is_empty());
        assert!(s.contains(&RealQ::ratio(&b, 5, 4)).unwrap());
        assert!(!s.contains(&RealQ::ratio(&b, 7, 5)).unwrap());
    }

    #[test]
    fn classification_examples() {
        let b = Basis::standard();
        let l = RealQ::symbol(&b, "sqrt3").unwrap();
        let s = DistanceSet::finite(vec![l.scale_int(3), l.scale_int(5)], None).unwrap();
        assert_eq!(s.classify(&RealQ::integer(&b, 10)).unwrap(), GroupClass::Lattice { lambda: l });

        let s = DistanceSet::two_generators(RealQ::integer(&b, 1), RealQ::symbol(&b, "sqrt2").unwrap()).unwrap();
        match s.classify(&RealQ::integer(&b, 10)).unwrap() {
            GroupClass::DenseBounded { n0, .. } => assert_eq!(n0, 2),
            other => panic!("{other:?}"),
        }

        let r = Basis::rationals();
        let h = DistanceSet::harmonic(&r, 10_000);
        match h.classify(&RealQ::integer(&r, 3)).unwrap() {
            GroupClass::DenseLocallyLattice { table } => {
                assert_eq!(table[0].lambda, RealQ::integer(&r, 1));
                assert_eq!(table[1].lambda, RealQ::ratio(&r, 1, 6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn limit_points() {
        let b = Basis::rationals();
        let fam = DistanceSet::upsilon_plus_reciprocal(RealQ::integer(&b, 1), RealQ::integer(&b, 1), 2, 50).unwrap();
        assert_eq!(fam.limit_point().unwrap().upsilon, RealQ::integer(&b, 1));
        let fin = DistanceSet::finite(vec![RealQ::integer(&b, 1), RealQ::ratio(&b, 3, 2)], None).unwrap();
        assert!(fin.limit_point().is_none());
        let seq = Sequence::ShiftedReciprocal {
            base: RealQ::integer(&b, 1),
            tail: ReciprocalTail { scale: RealQ::integer(&b, 1), shift: 2 },
        };
        let en = DistanceSet::enumerated(seq, 100, None).unwrap();
        let lp = en.limit_point().unwrap();
        assert_eq!(lp.upsilon, RealQ::integer(&b, 1));
        // the exposed subsequence decreases towards the limit and stays below 2
        assert!(lp.element(0).lt(&RealQ::integer(&b, 2)).unwrap());
        assert!(lp.element(1).lt(&lp.element(0)).unwrap());
    }

    #[test]
    fn incommensurable_enumerated_set_is_dense_bounded() {
        let b = Basis::standard();
        let seq = Sequence::ShiftedReciprocal {
            base: RealQ::symbol(&b, "sqrt2").unwrap(),
            tail: ReciprocalTail { scale: RealQ::integer(&b, -1), shift: 3 },
        };
        let en = DistanceSet::enumerated(seq, 100, None).unwrap();
        assert!(matches!(en.classify(&RealQ::integer(&b, 4)).unwrap(), GroupClass::DenseBounded { n0: 2, .. }));
    }
}
