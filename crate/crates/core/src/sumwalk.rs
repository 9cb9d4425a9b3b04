//! Constrained sum walks `A_n(eps, (d_i), (R_i))` and tame density.
//!
//! A walk picks `x_i` from `R_i` so that every partial deviation
//! `|sum_{i<=r} (d_i - x_i)|` stays below `eps`. The enumerator keeps one
//! node per distinct deviation and layer, so the work is bounded by the
//! number of reachable deviations rather than by the number of paths.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::distset::{LimitFamily, SetError};
use crate::exactreal::{sort_values, ExactError, ExactKey, RealQ, Rational};
use crate::semigroup::{Generators, Interval, SemigroupError};

/// Default cap on the number of distinct deviations kept per layer.
pub const DEFAULT_MAX_STATES: usize = 400_000;

/// Elements of `L` tried on each side of `d` when straddling.
pub const STRADDLE_CANDIDATES: usize = 8;

/// Tail indices searched past `r` when the family cutoff is lower.
pub const TAIL_SEARCH_SPAN: usize = 64;

/// Default cap on walk lengths probed by searches.
pub const DEFAULT_MAX_STEPS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error("budget exceeded after {partial} partial results: {what}")]
    BudgetExceeded { what: &'static str, partial: usize },
    #[error("no elements of L straddle d")]
    NotStraddling,
    #[error("family cutoff {cutoff} reached before {what}")]
    CutoffExceeded { cutoff: usize, what: &'static str },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid walk specification: {0}")]
    Invalid(String),
}

fn half(x: &RealQ) -> RealQ {
    x.scale(&Rational::new(BigInt::from(1), BigInt::from(2)))
}

fn frac(x: &RealQ, p: i64, q: i64) -> RealQ {
    x.scale(&Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// `|x - c| < r`.
pub fn within(x: &RealQ, c: &RealQ, r: &RealQ) -> Result<bool, ExactError> {
    (x - c).abs()?.lt(r)
}

/// Largest gap of `points` inside `(c - r, c + r)`, the endpoints counting as
/// virtual points. A set is `delta`-dense in the interval iff this is `< delta`.
pub fn max_gap_in(points: &[RealQ], c: &RealQ, r: &RealQ) -> Result<RealQ, ExactError> {
    let lo = c - r;
    let hi = c + r;
    let mut inside: Vec<RealQ> = Vec::new();
    for p in points {
        if p.gt(&lo)? && p.lt(&hi)? {
            inside.push(p.clone());
        }
    }
    sort_values(&mut inside)?;
    let mut prev = lo;
    let mut best = RealQ::zero(c.basis());
    for p in inside.into_iter().chain(core::iter::once(hi)) {
        let g = &p - &prev;
        if g.gt(&best)? {
            best = g;
        }
        prev = p;
    }
    Ok(best)
}

/// `(L + (t_m)_{m >= r}) ∩ U_eps(d)` with `L ⊆ T_r^*` finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameSet {
    /// Sorted ascending.
    pub l: Vec<RealQ>,
    pub r: usize,
    pub d: RealQ,
    pub eps: RealQ,
    pub family: LimitFamily,
    /// Largest gap of `L` in `U_eps(d)`: `L` is `delta`-dense for every `delta` above it.
    pub density: RealQ,
}

impl TameSet {
    pub fn new(mut l: Vec<RealQ>, r: usize, d: RealQ, eps: RealQ, family: LimitFamily) -> Result<Self, WalkError> {
        sort_values(&mut l)?;
        l.dedup();
        let density = max_gap_in(&l, &d, &eps)?;
        Ok(TameSet { l, r, d, eps, family, density })
    }

    /// `L = T_r^* ∩ U_eps(d)`.
    pub fn saturate(family: &LimitFamily, r: usize, d: &RealQ, eps: &RealQ) -> Result<Self, WalkError> {
        let l = tstar_window(family, r, d, eps)?;
        TameSet::new(l, r, d.clone(), eps.clone(), family.clone())
    }

    pub fn is_dense(&self, delta: &RealQ) -> Result<bool, ExactError> {
        self.density.lt(delta)
    }

    /// Exact membership in the represented set.
    pub fn contains(&self, x: &RealQ) -> Result<bool, ExactError> {
        if !within(x, &self.d, &self.eps)? {
            return Ok(false);
        }
        for l in &self.l {
            if let Some(m) = self.family.tail.index_of(&(x - l)) {
                if m >= self.r {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Largest tail index enumerated at `resolution`: the first `m >= r` with
    /// `|t_m| < resolution`, capped by the family cutoff.
    pub fn tail_stop(&self, resolution: Option<&RealQ>) -> Result<usize, ExactError> {
        let cap = self.family.m_max.max(self.r);
        let Some(res) = resolution else { return Ok(cap) };
        for m in self.r..=cap {
            if self.family.t(m).abs()?.lt(res)? {
                return Ok(m);
            }
        }
        Ok(cap)
    }

    /// Elements `l + t_m` for `r <= m <= tail_stop(resolution)`, sorted.
    pub fn elements(&self, resolution: Option<&RealQ>) -> Result<Vec<RealQ>, ExactError> {
        let stop = self.tail_stop(resolution)?;
        let mut out = Vec::new();
        for m in self.r..=stop {
            let t = self.family.t(m);
            for l in &self.l {
                let x = l + &t;
                if within(&x, &self.d, &self.eps)? {
                    out.push(x);
                }
            }
        }
        sort_values(&mut out)?;
        out.dedup();
        Ok(out)
    }

    /// Checks `L ⊆ U_eps(d)` and `L ⊆ T_r^*` exactly.
    pub fn check_structure(&self) -> Result<(), WalkError> {
        self.check_structure_at(self.r)
    }

    /// Checks `L ⊆ U_eps(d)` and `L ⊆ T_level^*` for some `level <= r`, which
    /// implies `L ⊆ T_r^*` and keeps the generator set small.
    pub fn check_structure_at(&self, level: usize) -> Result<(), WalkError> {
        if level > self.r {
            return Err(WalkError::Invalid("structure level above r".into()));
        }
        let gens = Generators::new(self.family.generators(level))?;
        for l in &self.l {
            if !within(l, &self.d, &self.eps)? {
                return Err(WalkError::Invalid(alloc::format!("{l} lies outside U_eps(d)")));
            }
            if !gens.contains(&(l - &self.family.upsilon))? {
                return Err(WalkError::Invalid(alloc::format!("{l} is not in T_r^*")));
            }
        }
        Ok(())
    }
}

/// `T_r^* ∩ U_eps(d)`, sorted.
pub fn tstar_window(family: &LimitFamily, r: usize, d: &RealQ, eps: &RealQ) -> Result<Vec<RealQ>, WalkError> {
    let gens = Generators::new(family.generators(r))?;
    let shift = &family.upsilon;
    let iv = Interval::open(&(d - eps) - shift, &(d + eps) - shift);
    let pts = gens.points_in(&iv, 1 << 22)?;
    Ok(pts.into_iter().map(|p| &p + shift).collect())
}

/// `T_r ∩ U_eps(d)`, sorted.
pub fn t_window(family: &LimitFamily, r: usize, d: &RealQ, eps: &RealQ) -> Result<Vec<RealQ>, WalkError> {
    let gens = Generators::new(family.generators(r))?;
    Ok(gens.points_in(&Interval::open(d - eps, d + eps), 1 << 22)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepSet {
    Finite(Vec<RealQ>),
    Tame(TameSet),
}

impl StepSet {
    pub fn elements(&self, resolution: Option<&RealQ>) -> Result<Vec<RealQ>, ExactError> {
        match self {
            StepSet::Finite(v) => {
                let mut v = v.clone();
                sort_values(&mut v)?;
                v.dedup();
                Ok(v)
            }
            StepSet::Tame(t) => t.elements(resolution),
        }
    }

    pub fn contains(&self, x: &RealQ) -> Result<bool, ExactError> {
        match self {
            StepSet::Finite(v) => Ok(v.contains(x)),
            StepSet::Tame(t) => t.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumWalkSpec {
    pub eps: RealQ,
    pub steps: Vec<(RealQ, StepSet)>,
}

impl SumWalkSpec {
    pub fn constant(eps: RealQ, d: RealQ, r: StepSet, n: usize) -> Self {
        SumWalkSpec { eps, steps: (0..n).map(|_| (d.clone(), r.clone())).collect() }
    }

    pub fn target(&self) -> RealQ {
        let basis = self.eps.basis();
        self.steps.iter().fold(RealQ::zero(basis), |a, (d, _)| &a + d)
    }
}

/// A member of `A_n` with the steps that realize it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkElement {
    pub total: RealQ,
    pub path: Vec<RealQ>,
}

#[derive(Debug, Clone)]
struct Node {
    dev: RealQ,
    parent: usize,
    x: RealQ,
}

/// Layered deviation automaton for `A_n`; layer `k` holds the distinct
/// deviations `sum_{i<=k}(x_i - d_i)` reachable within the window.
#[derive(Debug, Clone)]
pub struct WalkDp {
    eps: RealQ,
    target: RealQ,
    layers: Vec<Vec<Node>>,
    max_states: usize,
}

impl WalkDp {
    pub fn new(eps: &RealQ, max_states: usize) -> Self {
        let root = Node { dev: RealQ::zero(eps.basis()), parent: usize::MAX, x: RealQ::zero(eps.basis()) };
        WalkDp { eps: eps.clone(), target: RealQ::zero(eps.basis()), layers: alloc::vec![alloc::vec![root]], max_states }
    }

    pub fn len(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends a step with center `d` and choices `elems` (sorted).
    pub fn push(&mut self, d: &RealQ, elems: &[RealQ]) -> Result<(), WalkError> {
        let prev = self.layers.last().expect("root layer");
        let mut next: Vec<Node> = Vec::new();
        let mut seen: BTreeMap<ExactKey, ()> = BTreeMap::new();
        let offsets: Vec<RealQ> = elems.iter().map(|x| x - d).collect();
        let eps_f = self.eps.approx_f64();
        let off_f: Vec<f64> = offsets.iter().map(RealQ::approx_f64).collect();
        for (pi, node) in prev.iter().enumerate() {
            let dev_f = node.dev.approx_f64();
            for ((x, off), of) in elems.iter().zip(&offsets).zip(&off_f) {
                let guess = dev_f + of;
                if guess.abs() > eps_f * (1.0 + 1e-9) + 1e-12 {
                    continue;
                }
                let dev = &node.dev + off;
                if !dev.abs()?.lt(&self.eps)? {
                    continue;
                }
                let key = ExactKey::of(&dev);
                if seen.insert(key, ()).is_none() {
                    next.push(Node { dev, parent: pi, x: x.clone() });
                    if next.len() > self.max_states {
                        return Err(WalkError::BudgetExceeded { what: "walk states", partial: next.len() });
                    }
                }
            }
        }
        self.target = &self.target + d;
        self.layers.push(next);
        Ok(())
    }

    /// Totals of the last layer, sorted ascending.
    pub fn totals(&self) -> Result<Vec<RealQ>, ExactError> {
        let mut out: Vec<RealQ> = self.layers.last().expect("layer").iter().map(|n| &self.target + &n.dev).collect();
        sort_values(&mut out)?;
        Ok(out)
    }

    /// Witness path of a total in the last layer.
    pub fn witness(&self, total: &RealQ) -> Option<Vec<RealQ>> {
        let dev = total - &self.target;
        let layer = self.layers.last()?;
        let idx = layer.iter().position(|n| n.dev == dev)?;
        Some(self.path_of(self.layers.len() - 1, idx))
    }

    fn path_of(&self, mut layer: usize, mut idx: usize) -> Vec<RealQ> {
        let mut path = Vec::with_capacity(layer);
        while layer > 0 {
            let node = &self.layers[layer][idx];
            path.push(node.x.clone());
            idx = node.parent;
            layer -= 1;
        }
        path.reverse();
        path
    }

    /// All elements of the last layer with witnesses, sorted by total.
    pub fn elements(&self) -> Result<Vec<WalkElement>, ExactError> {
        let last = self.layers.len() - 1;
        let mut out: Vec<WalkElement> = self.layers[last]
            .iter()
            .enumerate()
            .map(|(i, n)| WalkElement { total: &self.target + &n.dev, path: self.path_of(last, i) })
            .collect();
        let mut err = None;
        out.sort_by(|a, b| {
            a.total.try_cmp(&b.total).unwrap_or_else(|e| {
                err.get_or_insert(e);
                core::cmp::Ordering::Equal
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

/// Options for enumerating step sets.
#[derive(Debug, Clone)]
pub struct EnumOptions {
    pub resolution: Option<RealQ>,
    pub max_states: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { resolution: None, max_states: DEFAULT_MAX_STATES }
    }
}

/// `A_n` with one witness path per total, sorted by total.
pub fn an_enumerate(spec: &SumWalkSpec, opts: &EnumOptions) -> Result<Vec<WalkElement>, WalkError> {
    check_spec(spec, opts)?;
    let mut dp = WalkDp::new(&spec.eps, opts.max_states);
    for (d, r) in &spec.steps {
        let elems = r.elements(opts.resolution.as_ref())?;
        dp.push(d, &elems)?;
    }
    Ok(dp.elements()?)
}

fn check_spec(spec: &SumWalkSpec, opts: &EnumOptions) -> Result<(), WalkError> {
    if !spec.eps.is_positive()? {
        return Err(WalkError::Invalid("eps must be positive".into()));
    }
    for (i, (d, r)) in spec.steps.iter().enumerate() {
        let elems = r.elements(opts.resolution.as_ref())?;
        if elems.is_empty() {
            return Err(WalkError::Invalid(alloc::format!("R_{} is empty", i + 1)));
        }
        for x in &elems {
            if !within(x, d, &spec.eps)? {
                return Err(WalkError::Invalid(alloc::format!("{x} in R_{} is not within eps of {d}", i + 1)));
            }
        }
    }
    Ok(())
}

/// Exact check that `path` witnesses membership of its sum in `A_n(spec)`.
pub fn verify_walk(spec: &SumWalkSpec, path: &[RealQ]) -> Result<bool, WalkError> {
    if path.len() != spec.steps.len() {
        return Ok(false);
    }
    let mut dev = RealQ::zero(spec.eps.basis());
    for ((d, r), x) in spec.steps.iter().zip(path) {
        if !r.contains(x)? {
            return Ok(false);
        }
        dev = &dev + &(x - d);
        if !dev.abs()?.lt(&spec.eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One instance for the additivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdditivityInstance {
    /// `y_i ∈ R` with `|nd - sum y_i| < eps` gives `sum y_i ∈ A_n`.
    Sum(Vec<RealQ>),
    /// `x_i ∈ A_{n_i}` with `|sum (x_i - n_i d)| < eps` gives `sum x_i ∈ A_{sum n_i}`.
    Concat(Vec<(usize, RealQ)>),
    /// `A_m + (n - m) d ⊆ A_n` when `d ∈ R`.
    Inclusion { m: usize, n: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdditivityReport {
    /// Instances checked per property (i), (ii), (iii).
    pub checked: [usize; 3],
    /// Instances whose hypotheses did not hold (not counted as checked).
    pub skipped: usize,
    pub counterexamples: Vec<(usize, String)>,
}

impl AdditivityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Verifies the additivity properties on `instances` against enumerated `A_n`.
pub fn an_additivity_check(
    eps: &RealQ,
    d: &RealQ,
    r: &[RealQ],
    instances: &[AdditivityInstance],
) -> Result<AdditivityReport, WalkError> {
    let mut r_sorted = r.to_vec();
    sort_values(&mut r_sorted)?;
    r_sorted.dedup();
    let mut cache: BTreeMap<usize, Vec<RealQ>> = BTreeMap::new();
    let mut dp = WalkDp::new(eps, DEFAULT_MAX_STATES);
    let mut totals = |n: usize, dp: &mut WalkDp| -> Result<Vec<RealQ>, WalkError> {
        while dp.len() < n {
            dp.push(d, &r_sorted)?;
            cache.insert(dp.len(), dp.totals()?);
        }
        Ok(cache.get(&n).cloned().unwrap_or_default())
    };
    let mut rep = AdditivityReport::default();
    for inst in instances {
        match inst {
            AdditivityInstance::Sum(ys) => {
                let n = ys.len();
                if n == 0 || !ys.iter().all(|y| r_sorted.contains(y)) {
                    rep.skipped += 1;
                    continue;
                }
                let sum = ys.iter().fold(RealQ::zero(eps.basis()), |a, b| &a + b);
                if !within(&sum, &d.scale_int(n as i64), eps)? {
                    rep.skipped += 1;
                    continue;
                }
                rep.checked[0] += 1;
                if !totals(n, &mut dp)?.contains(&sum) {
                    rep.counterexamples.push((1, alloc::format!("sum {sum} of {n} steps missing from A_{n}")));
                }
            }
            AdditivityInstance::Concat(parts) => {
                let mut ok = !parts.is_empty();
                let mut total_n = 0;
                let mut sum = RealQ::zero(eps.basis());
                let mut dev = RealQ::zero(eps.basis());
                for (ni, xi) in parts {
                    if *ni == 0 || !totals(*ni, &mut dp)?.contains(xi) {
                        ok = false;
                        break;
                    }
                    total_n += ni;
                    sum = &sum + xi;
                    dev = &dev + &(xi - &d.scale_int(*ni as i64));
                }
                if !ok || !dev.abs()?.lt(eps)? {
                    rep.skipped += 1;
                    continue;
                }
                rep.checked[1] += 1;
                if !totals(total_n, &mut dp)?.contains(&sum) {
                    rep.counterexamples.push((2, alloc::format!("concatenation {sum} missing from A_{total_n}")));
                }
            }
            AdditivityInstance::Inclusion { m, n } => {
                if !r_sorted.contains(d) || m > n || *m == 0 {
                    rep.skipped += 1;
                    continue;
                }
                rep.checked[2] += 1;
                let am = totals(*m, &mut dp)?;
                let an = totals(*n, &mut dp)?;
                let shift = d.scale_int((n - m) as i64);
                for x in am {
                    let y = &x + &shift;
                    if an.binary_search_by(|p| p.try_cmp(&y).unwrap_or(core::cmp::Ordering::Less)).is_err() {
                        rep.counterexamples.push((3, alloc::format!("{x} + {shift} missing from A_{n}")));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// All instances of the three properties for walks of length at most `n_max`.
pub fn exhaustive_additivity_instances(
    eps: &RealQ,
    d: &RealQ,
    r: &[RealQ],
    n_max: usize,
) -> Result<Vec<AdditivityInstance>, WalkError> {
    let mut out = Vec::new();
    // (i): every multiset of size n (orderings are irrelevant to the sum)
    fn multisets(r: &[RealQ], n: usize, start: usize, cur: &mut Vec<RealQ>, out: &mut Vec<Vec<RealQ>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..r.len() {
            cur.push(r[i].clone());
            multisets(r, n, i, cur, out);
            cur.pop();
        }
    }
    for n in 1..=n_max {
        let mut ms = Vec::new();
        multisets(r, n, 0, &mut Vec::new(), &mut ms);
        out.extend(ms.into_iter().map(AdditivityInstance::Sum));
    }
    // (ii): pairs x_1 ∈ A_{n_1}, x_2 ∈ A_{n_2} with n_1 + n_2 <= n_max
    let mut dp = WalkDp::new(eps, DEFAULT_MAX_STATES);
    let mut r_sorted = r.to_vec();
    sort_values(&mut r_sorted)?;
    r_sorted.dedup();
    let mut layers = alloc::vec![Vec::new()];
    for _ in 1..n_max {
        dp.push(d, &r_sorted)?;
        layers.push(dp.totals()?);
    }
    for n1 in 1..n_max {
        for n2 in n1..=(n_max - n1) {
            for x1 in &layers[n1] {
                for x2 in &layers[n2] {
                    out.push(AdditivityInstance::Concat(alloc::vec![(n1, x1.clone()), (n2, x2.clone())]));
                }
            }
        }
    }
    // (iii)
    for n in 1..=n_max {
        for m in 1..=n {
            out.push(AdditivityInstance::Inclusion { m, n });
        }
    }
    Ok(out)
}

/// Which of the two density regimes applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityMode {
    /// `delta > gcd(a, b)`: `A_n` is `delta`-dense in `U_eps(nd)`.
    DeltaDense,
    /// `delta <= gcd(a, b) = g`: `nd + kg ∈ A_n` for every `|kg| < eps`.
    LatticeSteps(RealQ),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityBound {
    pub n: usize,
    pub mode: DensityMode,
    pub gcd: RealQ,
    pub a: RealQ,
    pub b: RealQ,
}

/// Smallest `N` (found by search) such that the density conclusion holds at
/// `n = N` and `n = N + 1`.
#[allow(clippy::too_many_arguments)]
pub fn an_density_bound(
    eps: &RealQ,
    delta: &RealQ,
    d: &RealQ,
    r: &[RealQ],
    x: &RealQ,
    y: &RealQ,
    m: usize,
    n_max: usize,
) -> Result<DensityBound, WalkError> {
    let mut rs = r.to_vec();
    sort_values(&mut rs)?;
    rs.dedup();
    if !rs.contains(d) {
        return Err(WalkError::HypothesisViolation("d must belong to R".into()));
    }
    if !delta.is_positive()? || delta.gt(eps)? {
        return Err(WalkError::HypothesisViolation("need 0 < delta <= eps".into()));
    }
    let md = d.scale_int(m as i64);
    let a = x - &md;
    let b = y - &md;
    let zero = RealQ::zero(eps.basis());
    if !(a.lt(&zero)? && zero.lt(&b)?) {
        return Err(WalkError::HypothesisViolation("need a < 0 < b".into()));
    }
    let mut dp = WalkDp::new(eps, DEFAULT_MAX_STATES);
    for _ in 0..m {
        dp.push(d, &rs)?;
    }
    let am = dp.totals()?;
    if !am.contains(x) || !am.contains(y) {
        return Err(WalkError::HypothesisViolation("x and y must belong to A_m".into()));
    }
    let g = a.gcd(&b)?;
    let mode = if delta.gt(&g)? { DensityMode::DeltaDense } else { DensityMode::LatticeSteps(g.clone()) };
    let mut dp = WalkDp::new(eps, DEFAULT_MAX_STATES);
    let mut prev_ok = false;
    for n in 1..=n_max + 1 {
        dp.push(d, &rs)?;
        let totals = dp.totals()?;
        let center = d.scale_int(n as i64);
        let ok = match &mode {
            DensityMode::DeltaDense => max_gap_in(&totals, &center, eps)?.lt(delta)?,
            DensityMode::LatticeSteps(g) => lattice_points_present(&totals, &center, g, eps)?,
        };
        if ok && prev_ok {
            return Ok(DensityBound { n: n - 1, mode, gcd: g, a, b });
        }
        prev_ok = ok;
    }
    Err(WalkError::BudgetExceeded { what: "density search", partial: n_max })
}

/// Whether `center + k g` is in `totals` for every integer `k` with `|k g| < eps`.
pub fn lattice_points_present(totals: &[RealQ], center: &RealQ, g: &RealQ, eps: &RealQ) -> Result<bool, ExactError> {
    let kmax = eps.ceil_div(g)?.to_i64().unwrap_or(i64::MAX) - 1;
    for k in -kmax..=kmax {
        let p = center + &g.scale_int(k);
        if !within(&p, center, eps)? {
            continue;
        }
        if totals.binary_search_by(|q| q.try_cmp(&p).unwrap_or(core::cmp::Ordering::Less)).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest `m` with `|t_m| < g` (`g > 0`).
pub fn first_tail_below(family: &LimitFamily, g: &RealQ) -> Result<usize, ExactError> {
    let scale = family.tail.scale.abs()?;
    // |t_m| < g  iff  m + shift > |scale| / g
    let k = scale.floor_div(g)?;
    let m = k + BigInt::from(1) - BigInt::from(family.tail.shift);
    Ok(if m.sign() == num_bigint::Sign::Minus { 0 } else { m.to_usize().unwrap_or(usize::MAX) })
}

/// Smallest `m` such that `p + t_k` stays in `U_eps(c)` for every `k >= m`.
/// `p` must lie in `U_eps(c)`; the tail is monotone with a fixed sign.
pub fn tail_index_inside(family: &LimitFamily, p: &RealQ, c: &RealQ, eps: &RealQ) -> Result<usize, ExactError> {
    let room = if family.tail.from_below()? { &(p - c) + eps } else { &(c + eps) - p };
    first_tail_below(family, &room)
}

/// Output of the constant-step refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameConstant {
    pub eps: RealQ,
    pub delta: RealQ,
    pub d: RealQ,
    pub n: usize,
    pub m: usize,
    pub n_tilde: usize,
    pub l_minus: RealQ,
    pub l_plus: RealQ,
    pub m1: usize,
    pub m2: usize,
    pub x: RealQ,
    pub y: RealQ,
    pub bound: DensityBound,
    /// Level at which `Lbar ⊆ T_level^*` already holds (at most `m`).
    pub level: usize,
    /// `Rbar`: `M`-tamely `delta`-dense in `U_eps(Nd)`.
    pub rbar: TameSet,
    /// For each element of `Rbar.l`: which of `l-`/`l+` it uses and its `A_Ñ` path.
    pub lbar_paths: Vec<(bool, Vec<RealQ>)>,
}

impl TameConstant {
    /// A path witnessing `rbar.l[i] + t_m ∈ A_N(eps, d, R)`.
    pub fn witness_path(&self, i: usize, m: usize) -> Vec<RealQ> {
        let (plus, path) = &self.lbar_paths[i];
        let first = &(if *plus { &self.l_plus } else { &self.l_minus }).clone() + &self.rbar.family.t(m);
        interleave_constant(&first, path, &self.d, &self.eps)
    }
}

/// Places `first` among `rest` so every prefix deviation from `d` stays
/// below `eps`; falls back to putting it first.
fn interleave_constant(first: &RealQ, rest: &[RealQ], d: &RealQ, eps: &RealQ) -> Vec<RealQ> {
    let lead = first - d;
    for pos in 0..=rest.len() {
        let mut dev = RealQ::zero(d.basis());
        let mut ok = true;
        for (k, x) in rest.iter().enumerate() {
            if k == pos {
                dev = &dev + &lead;
                if !dev.abs().and_then(|v| v.lt(eps)).unwrap_or(false) {
                    ok = false;
                    break;
                }
            }
            dev = &dev + &(x - d);
            if !dev.abs().and_then(|v| v.lt(eps)).unwrap_or(false) {
                ok = false;
                break;
            }
        }
        if ok {
            let mut out = rest[..pos].to_vec();
            out.push(first.clone());
            out.extend_from_slice(&rest[pos..]);
            return out;
        }
    }
    let mut out = alloc::vec![first.clone()];
    out.extend_from_slice(rest);
    out
}

/// Constant-step refinement: `A_n(eps, d, R)` contains an `M`-tamely
/// `delta`-dense subset of `U_eps(nd)` for all `n >= N`.
pub fn tame_refine_constant(eps: &RealQ, delta: &RealQ, d: &RealQ, r: &TameSet) -> Result<TameConstant, WalkError> {
    if !delta.is_positive()? || delta.gt(eps)? {
        return Err(WalkError::HypothesisViolation("need 0 < delta <= eps".into()));
    }
    if r.d != *d || r.eps != *eps {
        return Err(WalkError::HypothesisViolation("R must live in U_eps(d)".into()));
    }
    if !r.contains(d)? {
        return Err(WalkError::HypothesisViolation("d must belong to R".into()));
    }
    if !r.is_dense(eps)? {
        return Err(WalkError::HypothesisViolation("R must be tamely eps-dense".into()));
    }
    let fam = &r.family;
    // up to STRADDLE_CANDIDATES elements of L on either side of d, nearest first
    let mut below: Vec<RealQ> = Vec::new();
    let mut above: Vec<RealQ> = Vec::new();
    for l in &r.l {
        if l.lt(d)? {
            below.push(l.clone());
        } else if l.gt(d)? {
            above.push(l.clone());
        }
    }
    below.reverse();
    below.truncate(STRADDLE_CANDIDATES);
    above.truncate(STRADDLE_CANDIDATES);
    if below.is_empty() || above.is_empty() {
        return Err(WalkError::NotStraddling);
    }
    let half_delta = half(delta);
    let cutoff = fam.m_max.max(r.r + TAIL_SEARCH_SPAN);
    // candidates bucketed by tail index
    let mut xs: Vec<Vec<(RealQ, RealQ)>> = alloc::vec![Vec::new(); cutoff + 1];
    let mut ys: Vec<Vec<(RealQ, RealQ)>> = alloc::vec![Vec::new(); cutoff + 1];
    for m in r.r..=cutoff {
        let t = fam.t(m);
        for l in &below {
            let x = l + &t;
            if x.lt(d)? && within(&x, d, eps)? {
                xs[m].push((l.clone(), x));
            }
        }
        for l in &above {
            let y = l + &t;
            if y.gt(d)? && within(&y, d, eps)? {
                ys[m].push((l.clone(), y));
            }
        }
    }
    // first pair by largest index used, then m1, then m2, with gcd(x - d, y - d) < delta / 2
    let mut best: Option<(usize, usize, RealQ, RealQ, RealQ, RealQ)> = None;
    'outer: for top in r.r..=cutoff {
        for m1 in r.r..=top {
            let m2s: Vec<usize> = if m1 == top { (r.r..=top).collect() } else { alloc::vec![top] };
            for m2 in m2s {
                for (lm, x) in &xs[m1] {
                    for (lp, y) in &ys[m2] {
                        let g = (x - d).gcd(&(y - d))?;
                        if g.lt(&half_delta)? {
                            best = Some((m1, m2, lm.clone(), lp.clone(), x.clone(), y.clone()));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let Some((m1, m2, l_minus, l_plus, x, y)) = best else {
        return Err(WalkError::CutoffExceeded { cutoff, what: "finding m1, m2 with small gcd" });
    };
    let rt = alloc::vec![d.clone(), x.clone(), y.clone()];
    let bound = an_density_bound(eps, &half_delta, d, &rt, &x, &y, 1, DEFAULT_MAX_STEPS)?;
    let n_tilde = bound.n;
    let n = n_tilde + 1;
    let mut rt_sorted = rt.clone();
    sort_values(&mut rt_sorted)?;
    let mut dp = WalkDp::new(eps, DEFAULT_MAX_STATES);
    for _ in 0..n_tilde {
        dp.push(d, &rt_sorted)?;
    }
    let a_nt = dp.elements()?;
    let nd = d.scale_int(n as i64);
    let mut lbar: BTreeMap<ExactKey, (RealQ, bool, Vec<RealQ>)> = BTreeMap::new();
    for (plus, l) in [(false, &l_minus), (true, &l_plus)] {
        for w in &a_nt {
            let z = l + &w.total;
            if within(&z, &nd, eps)? {
                lbar.entry(ExactKey::of(&z)).or_insert((z, plus, w.path.clone()));
            }
        }
    }
    let mut entries: Vec<(RealQ, bool, Vec<RealQ>)> = lbar.into_values().collect();
    let mut err = None;
    entries.sort_by(|a, b| {
        a.0.try_cmp(&b.0).unwrap_or_else(|e| {
            err.get_or_insert(e);
            core::cmp::Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    let lbar_pts: Vec<RealQ> = entries.iter().map(|e| e.0.clone()).collect();
    // M: tails of Lbar stay in U_eps(Nd) and tails of l-, l+ stay in U_eps(d);
    // by monotonicity of t it suffices to test the first tail element
    let d_index = r.l.iter().find_map(|l| fam.tail.index_of(&(d - l)).filter(|&m| m >= r.r)).unwrap_or(r.r);
    let start = r.r.max(m1).max(m2).max(d_index);
    let mut m = start;
    for (p, c) in [(&l_minus, d), (&l_plus, d)].into_iter().chain(lbar_pts.iter().map(|z| (z, &nd))) {
        m = m.max(tail_index_inside(fam, p, c, eps)?);
    }
    let rbar = TameSet::new(lbar_pts, m, nd, eps.clone(), fam.clone())?;
    if !rbar.is_dense(delta)? {
        return Err(WalkError::HypothesisViolation("refined set is not delta-dense (internal)".into()));
    }
    let lbar_paths = entries.into_iter().map(|(_, p, path)| (p, path)).collect();
    Ok(TameConstant {
        eps: eps.clone(),
        delta: delta.clone(),
        d: d.clone(),
        n,
        m,
        n_tilde,
        l_minus,
        l_plus,
        m1,
        m2,
        x,
        y,
        bound,
        level: start,
        rbar,
        lbar_paths,
    })
}

/// Checks every element of `out.rbar` for tail indices `M..=M + extra` against
/// `A_N(eps, d, R)` with exact witnesses.
pub fn verify_tame_constant(out: &TameConstant, r: &TameSet, extra: usize) -> Result<usize, WalkError> {
    let spec = SumWalkSpec::constant(out.eps.clone(), out.d.clone(), StepSet::Tame(r.clone()), out.n);
    let mut checked = 0;
    for m in out.m..=out.m + extra {
        for i in 0..out.rbar.l.len() {
            let z = &out.rbar.l[i] + &out.rbar.family.t(m);
            if !within(&z, &out.rbar.d, &out.rbar.eps)? {
                continue;
            }
            let path = out.witness_path(i, m);
            let sum = path.iter().fold(RealQ::zero(z.basis()), |a, b| &a + b);
            if sum != z || !verify_walk(&spec, &path)? {
                return Err(WalkError::HypothesisViolation(alloc::format!("witness for {z} failed")));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Output of the general refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameGeneral {
    pub eps: RealQ,
    pub delta: RealQ,
    /// The raised tail index `r'` (with `|t_m| < eps/12` for `m >= r'`).
    pub r_used: usize,
    /// `N = |Q| * max N`, over the realized pairs.
    pub n_required: usize,
    pub m: usize,
    pub dtilde: Vec<RealQ>,
    /// Distinct pairs `(d~, R~)` realized along the walk.
    pub pairs: Vec<(RealQ, TameSet)>,
    /// Pair index for each step.
    pub assignment: Vec<usize>,
    /// The pigeonhole pair and the step indices where it occurs.
    pub chosen: usize,
    pub indices: Vec<usize>,
    pub constant: TameConstant,
    /// `Rbar`: `M`-tamely `delta`-dense in `U_{eps/2}(sum d_i)`.
    pub rbar: TameSet,
    /// Index into `constant.rbar.l` for each element of `rbar.l`.
    pub rbar_sources: Vec<usize>,
}

impl TameGeneral {
    /// A path witnessing `rbar.l[i] + t_m ∈ A_n(eps, (d_i), (R_i))`.
    pub fn witness_path(&self, i: usize, m: usize) -> Vec<RealQ> {
        let src = self.rbar_sources[i];
        let mut inner = self.constant.witness_path(src, m);
        let (dt, _) = &self.pairs[self.chosen];
        while inner.len() < self.indices.len() {
            inner.push(dt.clone());
        }
        let mut path = self.dtilde.clone();
        for (slot, x) in self.indices.iter().zip(inner) {
            path[*slot] = x;
        }
        path
    }
}

/// Constants of the general refinement for `steps`, without requiring the
/// walk to be long enough.
pub fn tame_general_plan(
    eps: &RealQ,
    delta: &RealQ,
    big_d: &RealQ,
    r: usize,
    steps: &[(RealQ, TameSet)],
) -> Result<TamePlan, WalkError> {
    let zero = RealQ::zero(eps.basis());
    let one = RealQ::integer(eps.basis(), 1);
    if !(eps.gt(&zero)? && eps.le(&one)?) {
        return Err(WalkError::HypothesisViolation("need 0 < eps <= 1".into()));
    }
    if !(delta.gt(&zero)? && delta.le(eps)?) {
        return Err(WalkError::HypothesisViolation("need 0 < delta <= eps".into()));
    }
    if steps.is_empty() {
        return Err(WalkError::HypothesisViolation("need at least one step".into()));
    }
    let eps12 = frac(eps, 1, 12);
    let eps4 = frac(eps, 1, 4);
    let eps34 = frac(eps, 3, 4);
    let two_eps = eps.scale_int(2);
    let fam = steps[0].1.family.clone();
    for (i, (d, rs)) in steps.iter().enumerate() {
        if !(d.gt(&two_eps)? && d.le(big_d)?) {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: need 2 eps < d_i <= D", i + 1)));
        }
        if rs.family != fam {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: family differs", i + 1)));
        }
        if rs.d != *d || rs.eps != *eps {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: R_i must live in U_eps(d_i)", i + 1)));
        }
        if rs.r > r {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: need r_i <= r", i + 1)));
        }
        if !rs.is_dense(&eps12)? {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: R_i must be eps/12-dense", i + 1)));
        }
    }
    // raise r until the tail is below eps/12
    let r_used = r.max(first_tail_below(&fam, &eps12)?);
    let t_r = fam.t(r_used);
    // balancing choice of d~
    let mut dtilde = Vec::with_capacity(steps.len());
    let mut run = zero.clone();
    for (i, (d, rs)) in steps.iter().enumerate() {
        let want_above = run.lt(&zero)?;
        let mut best: Option<(RealQ, RealQ)> = None;
        for l in &rs.l {
            let c = l + &t_r;
            let off = &c - d;
            let side_ok = if i == 0 { !off.is_zero() } else if want_above { off.gt(&zero)? } else { off.lt(&zero)? };
            if !side_ok || !off.abs()?.lt(&eps4)? || !rs.contains(&c)? {
                continue;
            }
            let dist = off.abs()?;
            if best.as_ref().map_or(Ok(true), |(_, bd)| dist.lt(bd))? {
                best = Some((c, dist));
            }
        }
        let Some((c, _)) = best else {
            return Err(WalkError::HypothesisViolation(alloc::format!("step {}: no balancing choice within eps/4", i + 1)));
        };
        run = &run + &(&c - d);
        dtilde.push(c);
    }
    // realized pairs (d~_i, R~_i)
    let mut pairs: Vec<(RealQ, TameSet)> = Vec::new();
    let mut assignment = Vec::with_capacity(steps.len());
    for ((_, rs), dt) in steps.iter().zip(&dtilde) {
        let mut lt = Vec::new();
        for l in &rs.l {
            if within(l, dt, &eps34)? {
                lt.push(l.clone());
            }
        }
        let rt = TameSet::new(lt, r_used, dt.clone(), eps34.clone(), fam.clone())?;
        let idx = match pairs.iter().position(|(pd, pr)| pd == dt && pr.l == rt.l) {
            Some(k) => k,
            None => {
                pairs.push((dt.clone(), rt));
                pairs.len() - 1
            }
        };
        assignment.push(idx);
    }
    let mut consts = Vec::with_capacity(pairs.len());
    for (dt, rt) in &pairs {
        consts.push(tame_refine_constant(&eps34, delta, dt, rt)?);
    }
    let max_n = consts.iter().map(|c| c.n).max().unwrap_or(1);
    let n_required = pairs.len() * max_n;
    let m = consts.iter().map(|c| c.m).max().unwrap_or(r_used).max(r_used);
    Ok(TamePlan { r_used, n_required, m, dtilde, pairs, assignment, consts })
}

/// Intermediate data of the general refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TamePlan {
    pub r_used: usize,
    pub n_required: usize,
    pub m: usize,
    pub dtilde: Vec<RealQ>,
    pub pairs: Vec<(RealQ, TameSet)>,
    pub assignment: Vec<usize>,
    pub consts: Vec<TameConstant>,
}

/// General refinement over steps `(d_i, R_i)`.
pub fn tame_refine_general(
    eps: &RealQ,
    delta: &RealQ,
    big_d: &RealQ,
    r: usize,
    steps: &[(RealQ, TameSet)],
) -> Result<TameGeneral, WalkError> {
    let TamePlan { r_used, n_required, m, dtilde, pairs, assignment, mut consts } =
        tame_general_plan(eps, delta, big_d, r, steps)?;
    let zero = RealQ::zero(eps.basis());
    if steps.len() < n_required {
        return Err(WalkError::HypothesisViolation(alloc::format!(
            "n = {} is below the required N = {n_required}",
            steps.len()
        )));
    }
    // pigeonhole: the most frequent pair (first on ties)
    let mut counts = alloc::vec![0usize; pairs.len()];
    for &a in &assignment {
        counts[a] += 1;
    }
    let chosen = (0..pairs.len()).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).expect("pairs");
    let indices: Vec<usize> = (0..steps.len()).filter(|&i| assignment[i] == chosen).collect();
    let constant = consts.swap_remove(chosen);
    if indices.len() < constant.n {
        return Err(WalkError::HypothesisViolation("pigeonhole multiplicity below N (internal)".into()));
    }
    let (dt, _) = &pairs[chosen];
    let extra = dt.scale_int((indices.len() - constant.n) as i64);
    let others = (0..steps.len()).filter(|i| assignment[*i] != chosen).fold(zero.clone(), |a, i| &a + &dtilde[i]);
    let shift = &extra + &others;
    let sum_d = steps.iter().fold(zero.clone(), |a, (d, _)| &a + d);
    let eps2 = half(eps);
    let mut l = Vec::new();
    let mut sources = Vec::new();
    for (k, lb) in constant.rbar.l.iter().enumerate() {
        let z = lb + &shift;
        if within(&z, &sum_d, &eps2)? {
            l.push(z);
            sources.push(k);
        }
    }
    let rbar = TameSet { density: max_gap_in(&l, &sum_d, &eps2)?, l, r: m, d: sum_d, eps: eps2, family: steps[0].1.family.clone() };
    if !rbar.is_dense(delta)? {
        return Err(WalkError::HypothesisViolation("refined set is not delta-dense (internal)".into()));
    }
    Ok(TameGeneral {
        eps: eps.clone(),
        delta: delta.clone(),
        r_used,
        n_required,
        m,
        dtilde,
        pairs,
        assignment,
        chosen,
        indices,
        constant,
        rbar,
        rbar_sources: sources,
    })
}

/// Checks the general refinement's running deviations and its witnesses for
/// tail indices `M..=M + extra`.
pub fn verify_tame_general(out: &TameGeneral, steps: &[(RealQ, TameSet)], extra: usize) -> Result<usize, WalkError> {
    let eps4 = frac(&out.eps, 1, 4);
    let mut run = RealQ::zero(out.eps.basis());
    for ((d, _), dt) in steps.iter().zip(&out.dtilde) {
        if !within(dt, d, &eps4)? {
            return Err(WalkError::HypothesisViolation("d~ not within eps/4".into()));
        }
        run = &run + &(dt - d);
        if !run.abs()?.lt(&eps4)? {
            return Err(WalkError::HypothesisViolation("running deviation reached eps/4".into()));
        }
    }
    let spec = SumWalkSpec {
        eps: out.eps.clone(),
        steps: steps.iter().map(|(d, r)| (d.clone(), StepSet::Tame(r.clone()))).collect(),
    };
    let mut checked = 0;
    for m in out.m..=out.m + extra {
        let t = out.rbar.family.t(m);
        for i in 0..out.rbar.l.len() {
            let z = &out.rbar.l[i] + &t;
            if !within(&z, &out.rbar.d, &out.rbar.eps)? {
                continue;
            }
            let path = out.witness_path(i, m);
            let sum = path.iter().fold(RealQ::zero(z.basis()), |a, b| &a + b);
            if sum != z || !verify_walk(&spec, &path)? {
                return Err(WalkError::HypothesisViolation(alloc::format!("witness for {z} failed")));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
