//! The additive semigroup `T(S)` of finite sums of elements of `S`.
//!
//! Membership and the canonical tiling run an exact depth-first search over
//! multiplicities, largest element first. When every generator is a rational
//! multiple of a common `lambda` the search switches to integers and prunes
//! with Apéry tables. Interval queries ("which sums land in `(lo, hi)`") use a
//! floating-point filter to propose candidates and confirm each one exactly.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::distset::{DistanceSet, SetError, SetKind};
use crate::exactreal::{sort_values, Basis, ExactError, ExactKey, RealQ, Rational};

/// Largest modulus accepted for integer Apéry tables.
pub const MAX_APERY_MODULUS: u64 = 1 << 22;

/// Upper bound on the number of elements a working generator set may hold.
pub const MAX_WORKING_GENERATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemigroupError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("{0} is not in the semigroup")]
    NotInSemigroup(RealQ),
    #[error("the generated group is the lattice {lambda}Z, not dense at scale {epsilon}")]
    NotDense { lambda: RealQ, epsilon: RealQ },
    #[error("density validation failed: no sum in the open interval ({lo}, {hi})")]
    ValidationFailed { lo: RealQ, hi: RealQ },
    #[error("no semigroup element within {epsilon} of {x}")]
    NoCorrection { x: RealQ, epsilon: RealQ },
    #[error("integer generators have gcd {gcd} > 1")]
    GcdNotOne { gcd: u64 },
    #[error("numeric budget exceeded: {0}")]
    Budget(&'static str),
}

impl From<SemigroupError> for SetError {
    fn from(e: SemigroupError) -> Self {
        match e {
            SemigroupError::Set(s) => s,
            SemigroupError::Exact(x) => SetError::Exact(x),
            other => SetError::Invalid(alloc::format!("{other}")),
        }
    }
}

/// A decomposition `0 = t_0 < t_1 < ... < t_m = length` with increments in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub length: RealQ,
    pub increments: Vec<RealQ>,
    pub partial_sums: Vec<RealQ>,
}

impl Tiling {
    pub fn from_increments(basis: &Basis, increments: Vec<RealQ>) -> Self {
        let mut partial_sums = Vec::with_capacity(increments.len() + 1);
        let mut acc = RealQ::zero(basis);
        partial_sums.push(acc.clone());
        for inc in &increments {
            acc = &acc + inc;
            partial_sums.push(acc.clone());
        }
        Tiling { length: acc, increments, partial_sums }
    }

    /// Re-sums the increments and checks each against `is_member`.
    pub fn verify(&self, mut is_member: impl FnMut(&RealQ) -> bool) -> bool {
        let basis = self.length.basis();
        let mut acc = RealQ::zero(basis);
        if self.partial_sums.first() != Some(&acc) || self.partial_sums.len() != self.increments.len() + 1 {
            return false;
        }
        for (k, inc) in self.increments.iter().enumerate() {
            if !is_member(inc) || !inc.is_positive().unwrap_or(false) {
                return false;
            }
            acc = &acc + inc;
            if self.partial_sums[k + 1] != acc {
                return false;
            }
        }
        acc == self.length
    }
}

/// A numerical semigroup given by positive integer generators with gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
    modulus: u64,
    /// `apery[r]`: the least element congruent to `r` modulo `modulus`
    /// (with `apery[0] = 0`).
    apery: Vec<u64>,
}

impl NumericalSemigroup {
    pub fn new(generators: &[u64]) -> Result<Self, SemigroupError> {
        let mut gens: Vec<u64> = generators.iter().copied().filter(|&g| g > 0).collect();
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() {
            return Err(SemigroupError::Exact(ExactError::InvalidArgument("no positive generators".into())));
        }
        let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
        if g != 1 {
            return Err(SemigroupError::GcdNotOne { gcd: g });
        }
        let m = gens[0];
        if m > MAX_APERY_MODULUS {
            return Err(SemigroupError::Budget("Apéry modulus too large"));
        }
        let apery = apery_table(&gens, m);
        Ok(NumericalSemigroup { generators: gens, modulus: m, apery })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Membership of a positive integer in the semigroup (sums of at least one generator).
    pub fn contains(&self, n: u64) -> bool {
        n > 0 && self.apery[(n % self.modulus) as usize] <= n
    }

    /// The largest integer not in the semigroup, or `-1` when `1` is a generator.
    pub fn frobenius(&self) -> i64 {
        let max = *self.apery.iter().max().expect("nonempty table");
        max as i64 - self.modulus as i64
    }

    /// Smallest `N >= 1` with every `n >= N` in the semigroup.
    pub fn stabilization_index(&self) -> u64 {
        (self.frobenius() + 1).max(1) as u64
    }
}

/// Least representatives of each residue class modulo `m`, `u64::MAX` when unreachable.
fn apery_table(gens: &[u64], m: u64) -> Vec<u64> {
    // Dijkstra on residues; edge weights are the generators.
    let m_us = m as usize;
    let mut dist = alloc::vec![u64::MAX; m_us];
    dist[0] = 0;
    let mut heap = alloc::collections::BinaryHeap::new();
    heap.push(core::cmp::Reverse((0u64, 0usize)));
    while let Some(core::cmp::Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &g in gens {
            let nd = d.saturating_add(g);
            let nr = ((r as u64 + g) % m) as usize;
            if nd < dist[nr] {
                dist[nr] = nd;
                heap.push(core::cmp::Reverse((nd, nr)));
            }
        }
    }
    dist
}

/// Frobenius number of positive integer generators with gcd 1.
pub fn frobenius_number(generators: &[u64]) -> Result<i64, SemigroupError> {
    Ok(NumericalSemigroup::new(generators)?.frobenius())
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LatticeData {
    lambda: RealQ,
    /// Generator `i` equals `ints[i] * lambda`.
    ints: Vec<u64>,
    semigroup: NumericalSemigroup,
}

/// A finite working set `F` of generators together with its search kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators {
    basis: Basis,
    /// Pairwise distinct, sorted descending.
    gens: Vec<RealQ>,
    approx: Vec<f64>,
    lattice: Option<LatticeData>,
}

impl Generators {
    pub fn new(mut gens: Vec<RealQ>) -> Result<Self, SemigroupError> {
        if gens.is_empty() {
            return Err(ExactError::InvalidArgument("empty generator set".into()).into());
        }
        let basis = gens[0].basis().clone();
        for g in &gens {
            if g.basis() != &basis {
                return Err(ExactError::BasisMismatch.into());
            }
            if !g.is_positive()? {
                return Err(ExactError::InvalidArgument("generators must be positive".into()).into());
            }
        }
        sort_values(&mut gens)?;
        gens.dedup();
        gens.reverse();
        let approx = gens.iter().map(RealQ::approx_f64).collect();
        let lattice = lattice_data(&gens)?;
        Ok(Generators { basis, gens, approx, lattice })
    }

    /// Generators sorted descending.
    pub fn elements(&self) -> &[RealQ] {
        &self.gens
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// `lambda` when every generator is an integer multiple of it.
    pub fn lattice_lambda(&self) -> Option<&RealQ> {
        self.lattice.as_ref().map(|l| &l.lambda)
    }

    pub fn smallest(&self) -> &RealQ {
        self.gens.last().expect("nonempty")
    }

    pub fn largest(&self) -> &RealQ {
        &self.gens[0]
    }

    pub fn sum(&self) -> RealQ {
        self.gens.iter().fold(RealQ::zero(&self.basis), |a, b| &a + b)
    }

    /// Canonical decomposition of `t` as multiplicities aligned with `elements()`:
    /// the lexicographically greatest multiplicity vector, largest generator first.
    pub fn decompose(&self, t: &RealQ) -> Result<Option<Vec<u64>>, SemigroupError> {
        if !t.is_positive()? {
            return Ok(None);
        }
        if let Some(lat) = &self.lattice {
            let Some(n) = integer_ratio(t, &lat.lambda) else { return Ok(None) };
            if !lat.semigroup.contains(n) {
                return Ok(None);
            }
            return Ok(integer_decompose(&lat.ints, n));
        }
        let mut memo = BTreeSet::new();
        let mut counts = alloc::vec![0u64; self.gens.len()];
        if self.exact_dfs(0, t.clone(), &mut counts, &mut memo)? {
            Ok(Some(counts))
        } else {
            Ok(None)
        }
    }

    fn exact_dfs(
        &self,
        i: usize,
        rem: RealQ,
        counts: &mut [u64],
        memo: &mut BTreeSet<(usize, ExactKey)>,
    ) -> Result<bool, SemigroupError> {
        if rem.is_zero() {
            return Ok(true);
        }
        if i == self.gens.len() {
            return Ok(false);
        }
        let key = (i, ExactKey::of(&rem));
        if memo.contains(&key) {
            return Ok(false);
        }
        let g = &self.gens[i];
        let kmax = rem.floor_div(g)?;
        let kmax = kmax.to_u64().ok_or(SemigroupError::Budget("multiplicity overflow"))?;
        if i + 1 == self.gens.len() {
            if g.scale_big(&BigInt::from(kmax)) == rem {
                counts[i] = kmax;
                return Ok(true);
            }
            memo.insert(key);
            return Ok(false);
        }
        for k in (0..=kmax).rev() {
            let next = &rem - &g.scale_big(&BigInt::from(k));
            counts[i] = k;
            if self.exact_dfs(i + 1, next, counts, memo)? {
                return Ok(true);
            }
        }
        counts[i] = 0;
        memo.insert(key);
        Ok(false)
    }

    /// Exact membership in `T(F)`.
    pub fn contains(&self, t: &RealQ) -> Result<bool, SemigroupError> {
        Ok(self.decompose(t)?.is_some())
    }

    /// The canonical tiling `zeta(t)` over `F`, increments in decreasing order.
    pub fn tile(&self, t: &RealQ) -> Result<Tiling, SemigroupError> {
        let counts = self.decompose(t)?.ok_or_else(|| SemigroupError::NotInSemigroup(t.clone()))?;
        let mut incs = Vec::new();
        for (g, &c) in self.gens.iter().zip(&counts) {
            for _ in 0..c {
                incs.push(g.clone());
            }
        }
        Ok(Tiling::from_increments(&self.basis, incs))
    }

    fn value_of(&self, counts: &[u64]) -> RealQ {
        let mut acc = RealQ::zero(&self.basis);
        for (g, &c) in self.gens.iter().zip(counts) {
            if c > 0 {
                acc = &acc + &g.scale_big(&BigInt::from(c));
            }
        }
        acc
    }

    /// All sums in the interval between `lo` and `hi` (bounds open or closed
    /// as flagged), sorted ascending. At most `limit` values are produced.
    pub fn points_in(&self, iv: &Interval, limit: usize) -> Result<Vec<RealQ>, SemigroupError> {
        let mut out = Vec::new();
        self.scan(iv, &mut |x| {
            out.push(x);
            out.len() < limit
        })?;
        if out.len() >= limit {
            return Err(SemigroupError::Budget("interval holds too many sums"));
        }
        sort_values(&mut out)?;
        out.dedup();
        Ok(out)
    }

    /// Some sum in the interval, if any.
    pub fn find_in(&self, iv: &Interval) -> Result<Option<RealQ>, SemigroupError> {
        let mut found = None;
        self.scan(iv, &mut |x| {
            found = Some(x);
            false
        })?;
        Ok(found)
    }

    /// A sum in the interval, preferring the upper half (the largest one for lattices).
    pub fn find_high_in(&self, iv: &Interval) -> Result<Option<RealQ>, SemigroupError> {
        if let Some(lat) = &self.lattice {
            let Some((lo_n, hi_n)) = lattice_range(iv, &lat.lambda)? else { return Ok(None) };
            let n = (lo_n..=hi_n).rev().find(|&n| lat.semigroup.contains(n));
            return Ok(n.map(|n| lat.lambda.scale_big(&BigInt::from(n))));
        }
        let mid = (&iv.lo + &iv.hi).scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
        let upper = Interval { lo: mid, hi: iv.hi.clone(), lo_open: false, hi_open: iv.hi_open };
        match self.find_in(&upper)? {
            Some(x) => Ok(Some(x)),
            None => self.find_in(iv),
        }
    }

    fn scan(&self, iv: &Interval, sink: &mut dyn FnMut(RealQ) -> bool) -> Result<(), SemigroupError> {
        if iv.hi.lt(&iv.lo)? {
            return Ok(());
        }
        if let Some(lat) = &self.lattice {
            let Some((lo_n, hi_n)) = lattice_range(iv, &lat.lambda)? else { return Ok(()) };
            for n in lo_n..=hi_n {
                if lat.semigroup.contains(n) && !sink(lat.lambda.scale_big(&BigInt::from(n))) {
                    return Ok(());
                }
            }
            return Ok(());
        }
        let lo_f = iv.lo.approx_f64();
        let hi_f = iv.hi.approx_f64();
        let slack = 1e-9 * (1.0 + hi_f.abs());
        let mut counts = alloc::vec![0u64; self.gens.len()];
        self.scan_dfs(0, 0.0, lo_f - slack, hi_f + slack, iv, &mut counts, sink)?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_dfs(
        &self,
        i: usize,
        acc: f64,
        lo_f: f64,
        hi_f: f64,
        iv: &Interval,
        counts: &mut [u64],
        sink: &mut dyn FnMut(RealQ) -> bool,
    ) -> Result<bool, SemigroupError> {
        let g = self.approx[i];
        let room = hi_f - acc;
        if room < 0.0 {
            return Ok(true);
        }
        let kmax = floor_f64(room / g);
        if i + 1 == self.gens.len() {
            let kmin = ceil_f64((lo_f - acc) / g).max(0.0);
            let (kmin, kmax) = (kmin as u64, kmax as u64);
            for k in kmin..=kmax {
                counts[i] = k;
                if counts.iter().all(|&c| c == 0) {
                    continue;
                }
                let v = self.value_of(counts);
                if iv.contains(&v)? && !sink(v) {
                    counts[i] = 0;
                    return Ok(false);
                }
            }
            counts[i] = 0;
            return Ok(true);
        }
        for k in (0..=kmax as u64).rev() {
            counts[i] = k;
            if !self.scan_dfs(i + 1, acc + k as f64 * g, lo_f, hi_f, iv, counts, sink)? {
                counts[i] = 0;
                return Ok(false);
            }
        }
        counts[i] = 0;
        Ok(true)
    }

    /// `xi(x)`: the smallest-magnitude correction with `x + xi` in `T(F)`
    /// and `|xi| < epsilon`; ties go to the positive side.
    pub fn xi(&self, x: &RealQ, epsilon: &RealQ) -> Result<RealQ, SemigroupError> {
        if self.contains(x)? {
            return Ok(RealQ::zero(&self.basis));
        }
        if let Some(lat) = &self.lattice {
            return self.xi_lattice(lat, x, epsilon);
        }
        let mut radius = epsilon.scale(&Rational::new(BigInt::from(1), BigInt::from(1u64 << 12)));
        let two = Rational::from_integer(BigInt::from(2));
        loop {
            let r = radius.min(epsilon)?;
            let iv = Interval::open(x - &r, x + &r);
            let pts = self.points_in(&iv, 1 << 20)?;
            if let Some(best) = nearest(x, &pts)? {
                return Ok(&best - x);
            }
            if r == *epsilon {
                return Err(SemigroupError::NoCorrection { x: x.clone(), epsilon: epsilon.clone() });
            }
            radius = radius.scale(&two);
        }
    }

    fn xi_lattice(&self, lat: &LatticeData, x: &RealQ, epsilon: &RealQ) -> Result<RealQ, SemigroupError> {
        let no = || SemigroupError::NoCorrection { x: x.clone(), epsilon: epsilon.clone() };
        let base = x.floor_div(&lat.lambda)?;
        let base = base.to_i64().ok_or(SemigroupError::Budget("lattice index overflow"))?;
        // candidates above: base+1, base+2, ...; below: base, base-1, ...
        let mut up = base + 1;
        let mut down = base;
        loop {
            let up_v = lat.lambda.scale_int(up);
            let down_v = lat.lambda.scale_int(down);
            let du = &up_v - x;
            let dd = x - &down_v;
            let up_ok = du.lt(epsilon)?;
            let down_ok = down >= 1 && dd.lt(epsilon)?;
            if !up_ok && !down_ok {
                return Err(no());
            }
            // pick the nearer candidate, positive side on ties
            let take_up = up_ok && (!down_ok || du.le(&dd)?);
            if take_up {
                if lat.semigroup.contains(up as u64) {
                    return Ok(du);
                }
                up += 1;
            } else {
                if lat.semigroup.contains(down as u64) {
                    return Ok(-&dd);
                }
                down -= 1;
            }
        }
    }
}

/// Nearest element of `pts` to `x`, preferring the larger one on ties.
fn nearest(x: &RealQ, pts: &[RealQ]) -> Result<Option<RealQ>, ExactError> {
    let mut best: Option<(RealQ, RealQ)> = None;
    for p in pts {
        let d = (p - x).abs()?;
        let better = match &best {
            None => true,
            Some((bp, bd)) => match d.try_cmp(bd)? {
                Ordering::Less => true,
                Ordering::Equal => p.gt(bp)?,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((p.clone(), d));
        }
    }
    Ok(best.map(|(p, _)| p))
}

fn floor_f64(x: f64) -> f64 {
    if !x.is_finite() || x < 0.0 {
        return 0.0;
    }
    let t = x as u64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

fn ceil_f64(x: f64) -> f64 {
    if !x.is_finite() {
        return 0.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    let t = x as u64 as f64;
    if t < x {
        t + 1.0
    } else {
        t
    }
}

/// An interval with independently open or closed endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: RealQ,
    pub hi: RealQ,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn open(lo: RealQ, hi: RealQ) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn closed(lo: RealQ, hi: RealQ) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn contains(&self, x: &RealQ) -> Result<bool, ExactError> {
        let lo_ok = if self.lo_open { x.gt(&self.lo)? } else { x.ge(&self.lo)? };
        if !lo_ok {
            return Ok(false);
        }
        if self.hi_open {
            x.lt(&self.hi)
        } else {
            x.le(&self.hi)
        }
    }
}

/// Integer index range `n` with `n * lambda` inside `iv`, restricted to `n >= 1`.
fn lattice_range(iv: &Interval, lambda: &RealQ) -> Result<Option<(u64, u64)>, ExactError> {
    let mut lo = iv.lo.ceil_div(lambda)?;
    if iv.lo_open && lambda.scale_big(&lo) == iv.lo {
        lo += 1;
    }
    let mut hi = iv.hi.floor_div(lambda)?;
    if iv.hi_open && lambda.scale_big(&hi) == iv.hi {
        hi -= 1;
    }
    if lo < BigInt::from(1) {
        lo = BigInt::from(1);
    }
    if hi < lo {
        return Ok(None);
    }
    match (lo.to_u64(), hi.to_u64()) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => Err(ExactError::InvalidArgument("lattice index out of range".into())),
    }
}

/// `t / lambda` as a positive integer, if it is one.
fn integer_ratio(t: &RealQ, lambda: &RealQ) -> Option<u64> {
    let r = t.commensurability_ratio(lambda)?;
    if !r.is_integer() || !r.is_positive() {
        return None;
    }
    r.to_integer().to_u64()
}

fn lattice_data(gens: &[RealQ]) -> Result<Option<LatticeData>, SemigroupError> {
    let mut g = gens[0].clone();
    for x in &gens[1..] {
        g = g.gcd(x)?;
        if g.is_zero() {
            return Ok(None);
        }
    }
    let ints: Vec<u64> = match gens.iter().map(|x| integer_ratio(x, &g)).collect::<Option<Vec<u64>>>() {
        Some(v) => v,
        None => return Ok(None),
    };
    let min = *ints.iter().min().expect("nonempty");
    if min > MAX_APERY_MODULUS {
        return Ok(None);
    }
    let semigroup = NumericalSemigroup::new(&ints)?;
    Ok(Some(LatticeData { lambda: g, ints, semigroup }))
}

/// Lexicographically greatest multiplicity vector for `n` over `ints`
/// (sorted descending), pruned by per-suffix Apéry tables.
fn integer_decompose(ints: &[u64], n: u64) -> Option<Vec<u64>> {
    let k = ints.len();
    // suffix feasibility: gcd and Apéry table of ints[i..]
    let mut suffix: Vec<(u64, u64, Vec<u64>)> = Vec::with_capacity(k);
    for i in 0..k {
        let g = ints[i..].iter().fold(0u64, |a, &b| a.gcd(&b));
        let reduced: Vec<u64> = ints[i..].iter().map(|x| x / g).collect();
        let m = *reduced.iter().min().expect("nonempty");
        suffix.push((g, m, apery_table(&reduced, m)));
    }
    let feasible = |i: usize, rem: u64| -> bool {
        if rem == 0 {
            return true;
        }
        if i >= k {
            return false;
        }
        let (g, m, ref tab) = suffix[i];
        rem % g == 0 && tab[((rem / g) % m) as usize] <= rem / g
    };
    let mut counts = alloc::vec![0u64; k];
    let mut rem = n;
    for i in 0..k {
        let mut c = rem / ints[i];
        loop {
            let r = rem - c * ints[i];
            if feasible(i + 1, r) {
                counts[i] = c;
                rem = r;
                break;
            }
            if c == 0 {
                return None;
            }
            c -= 1;
        }
        if rem == 0 {
            break;
        }
    }
    (rem == 0).then_some(counts)
}

/// `member(t, S)`: the canonical tiling of `t` if `t` is a finite sum of
/// elements of `S`.
pub fn member(t: &RealQ, s: &DistanceSet) -> Result<Option<Tiling>, SemigroupError> {
    if !t.is_positive()? {
        return Err(ExactError::InvalidArgument("t must be positive".into()).into());
    }
    let elems = s.enumerate_upto(t)?;
    if elems.is_empty() {
        return Ok(None);
    }
    let gens = Generators::new(elems)?;
    match gens.tile(t) {
        Ok(tiling) => Ok(Some(tiling)),
        Err(SemigroupError::NotInSemigroup(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `zeta(t)`: the canonical tiling; errors when `t` is not in `T(S)`.
pub fn zeta_tile(t: &RealQ, s: &DistanceSet) -> Result<Tiling, SemigroupError> {
    member(t, s)?.ok_or_else(|| SemigroupError::NotInSemigroup(t.clone()))
}

/// How a density threshold was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdRoute {
    /// Euclidean reduction to a small `g` in the generated group.
    Euclid {
        s_tilde: RealQ,
        epsilon_used: RealQ,
        g: RealQ,
        /// `g = sum coeffs[k] * F[k]` (indices into the certificate's `generators`).
        coeffs: Vec<BigInt>,
        m: BigInt,
    },
    /// `F` spans a lattice `lambda Z` with `lambda < epsilon`.
    Lattice { lambda: RealQ, stabilization_index: u64 },
}

/// A density threshold: `T(F)` is `epsilon`-dense in `[k, infinity)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityCertificate {
    pub generators: Vec<RealQ>,
    pub epsilon: RealQ,
    pub k: RealQ,
    pub route: ThresholdRoute,
    /// Length of the validated window `[k, k + window_checked]`; zero when unvalidated.
    pub window_checked: RealQ,
    /// Chain witnesses: each open interval `(lo, lo + epsilon)` contains `witness`.
    pub witnesses: Vec<(RealQ, RealQ)>,
}

/// The threshold recipe without validation.
pub fn threshold_recipe(f: &[RealQ], epsilon: &RealQ) -> Result<DensityCertificate, SemigroupError> {
    if f.is_empty() {
        return Err(ExactError::InvalidArgument("empty F".into()).into());
    }
    if !epsilon.is_positive()? {
        return Err(ExactError::InvalidArgument("epsilon must be positive".into()).into());
    }
    let basis = f[0].basis().clone();
    let mut gens = f.to_vec();
    sort_values(&mut gens)?;
    gens.dedup();
    let total = gens.iter().fold(RealQ::zero(&basis), |a, b| &a + b);
    let s_tilde = gens[0].clone();
    let partner = gens.iter().position(|x| x.commensurability_ratio(&s_tilde).is_none());
    let Some(p) = partner else {
        let lambda = gens[1..].iter().try_fold(s_tilde.abs()?, |g, x| g.gcd(x))?;
        if lambda.ge(epsilon)? {
            return Err(SemigroupError::NotDense { lambda, epsilon: epsilon.clone() });
        }
        let ints: Vec<u64> = gens
            .iter()
            .map(|x| integer_ratio(x, &lambda).ok_or(SemigroupError::Budget("generator index overflow")))
            .collect::<Result<_, _>>()?;
        let n = NumericalSemigroup::new(&ints)?.stabilization_index();
        return Ok(DensityCertificate {
            generators: gens,
            epsilon: epsilon.clone(),
            k: lambda.scale_big(&BigInt::from(n)),
            route: ThresholdRoute::Lattice { lambda, stabilization_index: n },
            window_checked: RealQ::zero(&basis),
            witnesses: Vec::new(),
        });
    };
    let half_s = s_tilde.scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
    let eps_used = if epsilon.lt(&half_s)? {
        epsilon.clone()
    } else {
        s_tilde.scale(&Rational::new(BigInt::from(1), BigInt::from(4)))
    };
    let target = eps_used.scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
    let n = gens.len();
    let unit_vec = |i: usize| {
        let mut v = alloc::vec![BigInt::zero(); n];
        v[i] = BigInt::from(1);
        v
    };
    let (mut a, mut ca) = (s_tilde.clone(), unit_vec(0));
    let (mut b, mut cb) = (gens[p].clone(), unit_vec(p));
    let mut steps = 0;
    loop {
        if a.lt(&b)? {
            core::mem::swap(&mut a, &mut b);
            core::mem::swap(&mut ca, &mut cb);
        }
        if b.lt(&target)? {
            break;
        }
        let q = a.floor_div(&b)?;
        let r = &a - &b.scale_big(&q);
        let cr: Vec<BigInt> = ca.iter().zip(&cb).map(|(x, y)| x - &q * y).collect();
        a = b;
        ca = cb;
        b = r;
        cb = cr;
        steps += 1;
        if steps > 100_000 {
            return Err(SemigroupError::Budget("Euclidean reduction did not converge"));
        }
    }
    let g = b;
    let j = s_tilde.floor_div(&g)?;
    let max_c = cb.iter().map(|c| c.abs()).max().unwrap_or_default();
    let m = &j * &max_c;
    Ok(DensityCertificate {
        generators: gens,
        epsilon: epsilon.clone(),
        k: total.scale_big(&m),
        route: ThresholdRoute::Euclid { s_tilde, epsilon_used: eps_used, g, coeffs: cb, m },
        window_checked: RealQ::zero(&basis),
        witnesses: Vec::new(),
    })
}

/// Checks that every open subinterval of length `epsilon` of `[k, k + window]`
/// meets `T(F)`, recording a chain of witnesses.
pub fn validate_density(cert: &mut DensityCertificate, window: &RealQ) -> Result<(), SemigroupError> {
    let gens = Generators::new(cert.generators.clone())?;
    let eps = cert.epsilon.clone();
    let end = &cert.k + window;
    let stop = &end - &eps;
    let mut q = cert.k.clone();
    let mut witnesses = Vec::new();
    // chain q_0 = k < q_1 < ... with q_{i+1} in (q_i, q_i + eps) until q > k + window - eps
    while q.le(&stop)? {
        let iv = Interval::open(q.clone(), &q + &eps);
        let Some(w) = gens.find_high_in(&iv)? else {
            return Err(SemigroupError::ValidationFailed { lo: q.clone(), hi: &q + &eps });
        };
        witnesses.push((q, w.clone()));
        q = w;
    }
    cert.window_checked = window.clone();
    cert.witnesses = witnesses;
    Ok(())
}

/// `T(F)` is `epsilon`-dense beyond the returned `K`; validated on
/// `[K, K + 10 max F]`.
pub fn density_threshold(f: &[RealQ], epsilon: &RealQ) -> Result<DensityCertificate, SemigroupError> {
    let mut cert = threshold_recipe(f, epsilon)?;
    let max = cert.generators.last().expect("nonempty").scale_int(10);
    validate_density(&mut cert, &max)?;
    Ok(cert)
}

/// Smallest prefix of `S` (in its natural order) whose sums are
/// `epsilon`-dense eventually: it holds two incommensurable elements, or its
/// lattice step is below `epsilon`.
pub fn select_generators(s: &DistanceSet, epsilon: &RealQ) -> Result<Generators, SemigroupError> {
    let mut prefix: Vec<RealQ> = Vec::new();
    let mut lambda: Option<RealQ> = None;
    let cap = match s.kind() {
        SetKind::Finite(v) => v.len(),
        _ => MAX_WORKING_GENERATORS,
    };
    for m in 0..cap {
        let Some(x) = s.element(m) else { break };
        lambda = Some(match lambda {
            None => x.clone(),
            Some(l) => l.gcd(&x)?,
        });
        prefix.push(x);
        let l = lambda.as_ref().expect("set above");
        if l.is_zero() || l.lt(epsilon)? {
            return Generators::new(prefix);
        }
    }
    match lambda {
        Some(l) if !l.is_zero() => Err(SemigroupError::NotDense { lambda: l, epsilon: epsilon.clone() }),
        _ => Err(SemigroupError::Set(SetError::CutoffExceeded { cutoff: cap })),
    }
}

/// Report of a stabilization-index computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilization {
    pub lambda: RealQ,
    pub integer_generators: Vec<u64>,
    pub frobenius: i64,
    pub index: u64,
}

/// Smallest `N` with `n * lambda` in `T(F)` for every `n >= N`.
pub fn stabilization_index_of(f: &[RealQ], lambda: &RealQ) -> Result<Stabilization, SemigroupError> {
    if !lambda.is_positive()? {
        return Err(ExactError::InvalidArgument("lambda must be positive".into()).into());
    }
    let mut ints = Vec::with_capacity(f.len());
    for x in f {
        let n = integer_ratio(x, lambda)
            .ok_or_else(|| ExactError::InvalidArgument(alloc::format!("{x} is not a multiple of {lambda}")))?;
        ints.push(n);
    }
    let sg = NumericalSemigroup::new(&ints)?;
    let index = sg.stabilization_index();
    // direct confirmation on [N, N + max generator]
    let top = *sg.generators().last().expect("nonempty");
    let confirmed = (index..=index + top).all(|n| sg.contains(n)) && (index == 1 || !sg.contains(index - 1));
    if !confirmed {
        return Err(SemigroupError::Budget("stabilization index failed confirmation"));
    }
    ints.sort_unstable();
    ints.dedup();
    Ok(Stabilization { lambda: lambda.clone(), integer_generators: ints, frobenius: sg.frobenius(), index })
}

/// Stabilization index for a finite distance set (or an enumerated one up to `bound`).
pub fn stabilization_index(s: &DistanceSet, lambda: &RealQ, bound: Option<&RealQ>) -> Result<Stabilization, SemigroupError> {
    let elems = match (s.kind(), bound) {
        (SetKind::Finite(v), _) => v.clone(),
        (_, Some(b)) => s.enumerate_upto(b)?,
        (_, None) => return Err(ExactError::InvalidArgument("an enumeration bound is required".into()).into()),
    };
    stabilization_index_of(&elems, lambda)
}

/// `xi` over the working generators chosen from `S` for scale `epsilon`.
pub fn xi(x: &RealQ, s: &DistanceSet, epsilon: &RealQ) -> Result<RealQ, SemigroupError> {
    let gens = match s.kind() {
        SetKind::Finite(v) => Generators::new(v.clone())?,
        _ => select_generators(s, epsilon)?,
    };
    gens.xi(x, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(b: &Basis, p: i64, q: i64) -> RealQ {
        RealQ::ratio(b, p, q)
    }

    /// Unpruned multiset search: every multiplicity vector with at most
    /// `floor(t / min)` summands.
    fn brute_member(t: &RealQ, gens: &[RealQ]) -> bool {
        fn go(i: usize, rem: &RealQ, gens: &[RealQ]) -> bool {
            if rem.is_zero() {
                return true;
            }
            if i == gens.len() || rem.lt(&RealQ::zero(rem.basis())).unwrap() {
                return false;
            }
            let mut k = 0i64;
            loop {
                let next = rem - &gens[i].scale_int(k);
                if next.lt(&RealQ::zero(rem.basis())).unwrap() {
                    return false;
                }
                if go(i + 1, &next, gens) {
                    return true;
                }
                k += 1;
            }
        }
        go(0, t, gens)
    }

    fn coin_dp(gens: &[u64], limit: usize) -> Vec<bool> {
        let mut ok = vec![false; limit + 1];
        ok[0] = true;
        for n in 1..=limit {
            ok[n] = gens.iter().any(|&g| g as usize <= n && ok[n - g as usize]);
        }
        ok
    }

    #[test]
    fn member_examples() {
        let b = Basis::rationals();
        let lam = DistanceSet::finite(vec![r(&b, 1, 1)], None).unwrap();
        let t = member(&r(&b, 3, 1), &lam).unwrap().unwrap();
        assert_eq!(t.increments, vec![r(&b, 1, 1); 3]);
        let s = DistanceSet::finite(vec![r(&b, 1, 1), r(&b, 3, 2)], None).unwrap();
        assert!(member(&r(&b, 4, 1), &s).unwrap().is_some());
        assert!(member(&r(&b, 1, 2), &s).unwrap().is_none());
    }

    #[test]
    fn zeta_examples() {
        let b = Basis::rationals();
        let s = DistanceSet::finite(vec![r(&b, 1, 1), r(&b, 3, 2)], None).unwrap();
        let t = zeta_tile(&r(&b, 4, 1), &s).unwrap();
        assert_eq!(t.increments, vec![r(&b, 3, 2), r(&b, 3, 2), r(&b, 1, 1)]);
        assert_eq!(t.partial_sums.last().unwrap(), &r(&b, 4, 1));
        let t = zeta_tile(&r(&b, 2, 1), &s).unwrap();
        assert_eq!(t.increments, vec![r(&b, 1, 1), r(&b, 1, 1)]);
        assert!(matches!(zeta_tile(&r(&b, 1, 2), &s), Err(SemigroupError::NotInSemigroup(_))));
    }

    #[test]
    fn zeta_irrational() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), s2.clone()], None).unwrap();
        let t = &RealQ::integer(&b, 5) + &s2.scale_int(3);
        let tiling = zeta_tile(&t, &s).unwrap();
        assert_eq!(tiling.increments.len(), 8);
        assert_eq!(tiling.increments[0], s2);
        assert!(tiling.verify(|x| s.contains(x).unwrap()));
        assert!(member(&s2.scale_int(2).checked_sub(&RealQ::integer(&b, 1)).unwrap(), &s).unwrap().is_none());
    }

    #[test]
    fn member_agrees_with_brute_force() {
        let b = Basis::rationals();
        let gens = vec![r(&b, 3, 2), r(&b, 5, 3), r(&b, 7, 4)];
        let s = DistanceSet::finite(gens.clone(), None).unwrap();
        for num in 1..=120 {
            let t = r(&b, num, 12);
            assert_eq!(member(&t, &s).unwrap().is_some(), brute_member(&t, &gens), "t = {t}");
        }
    }

    #[test]
    fn frobenius_matches_coin_dp() {
        for gens in [vec![3u64, 5], vec![2, 3], vec![1], vec![6, 9, 20], vec![5, 7, 11]] {
            let sg = NumericalSemigroup::new(&gens).unwrap();
            let ok = coin_dp(&gens, 400);
            let frob = (1..=400).rev().find(|&n| !ok[n]).map(|n| n as i64).unwrap_or(-1);
            assert_eq!(sg.frobenius(), frob, "{gens:?}");
        }
        assert_eq!(frobenius_number(&[3, 5]).unwrap(), 7);
        assert!(matches!(NumericalSemigroup::new(&[4, 6]), Err(SemigroupError::GcdNotOne { gcd: 2 })));
    }

    #[test]
    fn stabilization_examples() {
        let b = Basis::standard();
        let l = RealQ::symbol(&b, "sqrt3").unwrap();
        let idx = |ints: &[i64]| {
            let f: Vec<RealQ> = ints.iter().map(|&n| l.scale_int(n)).collect();
            stabilization_index_of(&f, &l).unwrap().index
        };
        assert_eq!(idx(&[3, 5]), 8);
        assert_eq!(idx(&[2, 3]), 2);
        assert_eq!(idx(&[1]), 1);
    }

    #[test]
    fn integer_decomposition_is_lexicographically_greatest() {
        let ints = [7u64, 5, 3];
        for n in 1..80u64 {
            let got = integer_decompose(&ints, n);
            let mut best: Option<Vec<u64>> = None;
            for a in (0..=n / 7).rev() {
                for c in (0..=n / 5).rev() {
                    let rest = n as i64 - 7 * a as i64 - 5 * c as i64;
                    if rest >= 0 && rest % 3 == 0 {
                        let v = vec![a, c, rest as u64 / 3];
                        if best.as_ref().map_or(true, |bv| v > *bv) {
                            best = Some(v);
                        }
                    }
                }
            }
            assert_eq!(got, best, "n = {n}");
        }
    }

    #[test]
    fn threshold_for_one_and_sqrt2() {
        let b = Basis::standard();
        let f = vec![RealQ::integer(&b, 1), RealQ::symbol(&b, "sqrt2").unwrap()];
        let cert = density_threshold(&f, &RealQ::integer(&b, 1)).unwrap();
        assert!(!cert.witnesses.is_empty());
        // independent check: every unit interval in [K, K + 10] meets {a + b sqrt2}
        let k = cert.k.approx_f64();
        let s2 = core::f64::consts::SQRT_2;
        let mut pts = Vec::new();
        for bb in 0..=((k + 25.0) / s2) as i64 {
            for aa in 0..=(k + 25.0) as i64 {
                let v = aa as f64 + bb as f64 * s2;
                if v >= k - 1.0 && v <= k + 11.0 && (aa, bb) != (0, 0) {
                    pts.push(v);
                }
            }
        }
        pts.sort_by(|a, c| a.partial_cmp(c).unwrap());
        let inside: Vec<f64> = pts.iter().copied().filter(|&v| v > k && v < k + 10.0).collect();
        let mut prev = k;
        for v in inside.iter().copied().chain([k + 10.0]) {
            assert!(v - prev < 1.0);
            prev = v;
        }
    }

    #[test]
    fn threshold_lattice_cases() {
        let b = Basis::rationals();
        let f = vec![r(&b, 2, 1), r(&b, 3, 1)];
        assert!(matches!(density_threshold(&f, &r(&b, 1, 1)), Err(SemigroupError::NotDense { .. })));
        let f = vec![r(&b, 1, 1), r(&b, 3, 2)];
        let cert = density_threshold(&f, &r(&b, 10, 1)).unwrap();
        assert_eq!(cert.k, r(&b, 1, 1));
    }

    #[test]
    fn xi_examples() {
        let b = Basis::standard();
        let l = RealQ::symbol(&b, "sqrt3").unwrap();
        let s = DistanceSet::finite(vec![l.clone()], None).unwrap();
        let x = &l.scale_int(3) + &l.scale(&Rational::new(BigInt::from(1), BigInt::from(10)));
        let got = xi(&x, &s, &l.scale(&Rational::new(BigInt::from(1), BigInt::from(2)))).unwrap();
        assert_eq!(got, -&l.scale(&Rational::new(BigInt::from(1), BigInt::from(10))));
        assert!(xi(&l.scale_int(2), &s, &l).unwrap().is_zero());

        let r2 = Basis::rationals();
        let s = DistanceSet::finite(vec![r(&r2, 1, 1), r(&r2, 3, 2)], None).unwrap();
        assert!(xi(&r(&r2, 5, 1), &s, &r(&r2, 1, 4)).unwrap().is_zero());
        // 21/4 is equidistant from 5 and 11/2
        assert_eq!(xi(&r(&r2, 21, 4), &s, &r(&r2, 1, 2)).unwrap(), r(&r2, 1, 4));
    }

    #[test]
    fn xi_dense_pair() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let gens = Generators::new(vec![RealQ::integer(&b, 1), s2.clone()]).unwrap();
        let eps = r(&b, 1, 6);
        let cert = threshold_recipe(gens.elements(), &eps).unwrap();
        for k in 0..5 {
            let x = &cert.k + &r(&b, 7 * k + 1, 13);
            let c = gens.xi(&x, &eps).unwrap();
            assert!(c.abs().unwrap().lt(&eps).unwrap());
            assert!(gens.contains(&(&x + &c)).unwrap());
        }
    }

    #[test]
    fn select_generators_for_harmonic() {
        let b = Basis::rationals();
        let h = DistanceSet::harmonic(&b, 1000);
        let g = select_generators(&h, &r(&b, 1, 6)).unwrap();
        assert_eq!(g.lattice_lambda(), Some(&r(&b, 1, 12)));
        let s = DistanceSet::two_generators(RealQ::integer(&Basis::standard(), 1), RealQ::symbol(&Basis::standard(), "sqrt2").unwrap()).unwrap();
        assert!(select_generators(&s, &r(&Basis::standard(), 1, 100)).unwrap().lattice_lambda().is_none());
    }
}
