//! Regular cross-section constructions on finite windows.
//!
//! * `sparse_regularize`: staged merging of classes whose gaps fall below
//!   `K_{n+1}`, shifting each class by `xi` so that class distances land in
//!   `T(S)`, then tiling the limit gaps.
//! * `large_blocks`: recursive pairing of adjacent blocks for
//!   `S = {upsilon + t_m}`, producing blocks of every rank up to `rank_max`.
//! * Case drivers for lattice, locally lattice and bounded-dense `S`.
//!
//! Every decision depends on gaps only and the leftmost point of each merged
//! group stays fixed, so all constructions commute with translation.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::distset::{DensityWitness, DistanceSet, GroupClass, LimitFamily, SetError, SetKind};
use crate::exactreal::{ExactError, RealQ, Rational};
use crate::orbits::{self, blocks, gaps, is_regular, sparseness_profile, CrossSectionWindow, Geometry, OrbitError};
use crate::semigroup::{
    select_generators, stabilization_index_of, threshold_recipe, Generators, Interval, SemigroupError, Tiling,
};
use crate::sumwalk::{tame_general_plan, TameSet, WalkError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("gap {gap} at index {index} does not exceed K_0 = {k0}")]
    GapsTooSmall { index: usize, gap: RealQ, k0: RealQ },
    #[error("gap {gap} at index {index} is outside [{lo}, {hi}]")]
    GapsOutOfRange { index: usize, gap: RealQ, lo: RealQ, hi: RealQ },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("window length {length} is below the required {required}")]
    WindowTooShort { required: RealQ, length: RealQ },
    #[error("window is not lambda-regular (gap index {0})")]
    NotLambdaRegular(usize),
    #[error("window is not S-regular (gap index {0})")]
    NotSRegular(usize),
    #[error("{0} is not an integer multiple of lambda")]
    NotLatticeCompatible(RealQ),
    #[error("sparseness proxy failed for orbit {0}")]
    SparsenessProxyFailed(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

type Result<T> = core::result::Result<T, ConstructionError>;

/// `scale * 2^{-n-1} / 3`.
pub fn stage_epsilon(n: usize, scale: &Rational) -> Rational {
    let den = BigInt::from(3) * (BigInt::one() << (n + 1));
    scale / Rational::from_integer(den)
}

fn sum_all(basis: &crate::exactreal::Basis, xs: &[RealQ]) -> RealQ {
    xs.iter().fold(RealQ::zero(basis), |a, b| &a + b)
}

fn window_length(c: &CrossSectionWindow) -> RealQ {
    let pts = c.points();
    match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => b - a,
        _ => RealQ::zero(c.lacunarity_floor.basis()),
    }
}

/// Tiles `t` with the first generator set (in order) whose semigroup holds it.
fn tile_with(levels: &[Generators], t: &RealQ) -> Result<Tiling> {
    for g in levels {
        if g.contains(t)? {
            return Ok(g.tile(t)?);
        }
    }
    Err(SemigroupError::NotInSemigroup(t.clone()).into())
}

fn in_levels(levels: &[Generators], t: &RealQ) -> Result<bool> {
    for g in levels {
        if g.contains(t)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Inserts tile points into every gap of `pts`.
fn expand(pts: &[RealQ], tilings: &[Tiling]) -> Vec<RealQ> {
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        out.push(p.clone());
        if let Some(t) = tilings.get(i) {
            for s in &t.partial_sums[1..t.partial_sums.len().saturating_sub(1)] {
                out.push(p + s);
            }
        }
    }
    out
}

fn min_increment(tilings: &[Tiling], fallback: &RealQ) -> Result<RealQ> {
    let mut best = fallback.clone();
    for t in tilings {
        for x in &t.increments {
            if x.lt(&best)? {
                best = x.clone();
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// sparse regularization

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOptions {
    pub stage_budget: usize,
    /// Multiplies every `eps_n`; `1` reproduces `2^{-n-1}/3`.
    pub eps_scale: Rational,
    /// When set, also forces `K_{n+1} >= growth * K_n`.
    pub k_growth: Option<Rational>,
}

impl Default for SparseOptions {
    fn default() -> Self {
        SparseOptions { stage_budget: 8, eps_scale: Rational::one(), k_growth: None }
    }
}

/// One stage `n`: the section `C_n`, its classes `E_n` and the shifts `h_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageState {
    pub n: usize,
    pub eps: RealQ,
    pub k: RealQ,
    /// `K_{n+1}`; absent on the terminal stage.
    pub k_next: Option<RealQ>,
    /// Working generators `F_n ⊆ S` used for `xi` at this stage.
    pub generators: Vec<RealQ>,
    pub points: Vec<RealQ>,
    pub classes: Vec<Vec<usize>>,
    /// Shift per class.
    pub h_next: Vec<RealQ>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTrace {
    pub k0: RealQ,
    pub stages: Vec<StageState>,
    /// The limit section (`C_n` of the terminal stage).
    pub limit: Vec<RealQ>,
    /// Total shift per original point.
    pub total_shift: Vec<RealQ>,
    /// Tiling of each limit gap.
    pub tilings: Vec<Tiling>,
    pub final_window: CrossSectionWindow,
}

struct Level {
    eps: RealQ,
    k: RealQ,
    gens: Generators,
}

fn sparse_level(s: &DistanceSet, n: usize, opts: &SparseOptions, prev_k: Option<&RealQ>) -> Result<Level> {
    let eps = RealQ::rational(s.basis(), stage_epsilon(n, &opts.eps_scale));
    let gens = select_generators(s, &eps)?;
    let cert = threshold_recipe(gens.elements(), &eps)?;
    let mut k = &cert.k + &RealQ::integer(s.basis(), 2);
    if let Some(p) = prev_k {
        let floor = p + &RealQ::integer(s.basis(), 2);
        if floor.gt(&k)? {
            k = floor;
        }
        if let Some(gr) = &opts.k_growth {
            let g = p.scale(gr);
            if g.gt(&k)? {
                k = g;
            }
        }
    }
    Ok(Level { eps, k, gens })
}

/// `K_0` for `S` under `opts`.
pub fn sparse_k0(s: &DistanceSet, opts: &SparseOptions) -> Result<RealQ> {
    Ok(sparse_level(s, 0, opts, None)?.k)
}

/// Staged regularization of a sparse line window.
pub fn sparse_regularize(c0: &CrossSectionWindow, s: &DistanceSet, opts: &SparseOptions) -> Result<SparseTrace> {
    if c0.is_circle() {
        return Err(ConstructionError::NotApplicable("circle windows are never sparse".into()));
    }
    let mut level = sparse_level(s, 0, opts, None)?;
    let k0 = level.k.clone();
    let mut points = c0.points().to_vec();
    let mut classes: Vec<Vec<usize>> = (0..points.len()).map(|i| alloc::vec![i]).collect();
    if points.len() >= 2 {
        for (i, g) in gaps(c0)?.iter().enumerate() {
            if !g.gt(&k0)? {
                return Err(ConstructionError::GapsTooSmall { index: i, gap: g.clone(), k0 });
            }
        }
    }
    let mut levels: Vec<Generators> = Vec::new();
    let mut stages = Vec::new();
    let mut n = 0;
    loop {
        levels.push(level.gens.clone());
        if classes.len() <= 1 {
            let zeros = classes.iter().map(|_| RealQ::zero(s.basis())).collect();
            stages.push(StageState {
                n,
                eps: level.eps.clone(),
                k: level.k.clone(),
                k_next: None,
                generators: level.gens.elements().to_vec(),
                points: points.clone(),
                classes: classes.clone(),
                h_next: zeros,
            });
            break;
        }
        if n >= opts.stage_budget {
            return Err(ConstructionError::BudgetExceeded(alloc::format!(
                "{} classes remain after {} stages",
                classes.len(),
                opts.stage_budget
            )));
        }
        let next = sparse_level(s, n + 1, opts, Some(&level.k))?;
        // group adjacent classes whose gap is at most K_{n+1}
        let mut groups: Vec<Vec<usize>> = alloc::vec![alloc::vec![0]];
        for c in 1..classes.len() {
            let left = *classes[c - 1].last().expect("class");
            let right = classes[c][0];
            let d = &points[right] - &points[left];
            if d.le(&next.k)? {
                groups.last_mut().expect("group").push(c);
            } else {
                groups.push(alloc::vec![c]);
            }
        }
        let mut h: Vec<RealQ> = alloc::vec![RealQ::zero(s.basis()); classes.len()];
        for g in &groups {
            for w in g.windows(2) {
                let (a, b) = (w[0], w[1]);
                let d = &points[classes[b][0]] - &points[*classes[a].last().expect("class")];
                let x = &d - &h[a];
                let xi = level.gens.xi(&x, &level.eps)?;
                h[b] = xi;
            }
        }
        stages.push(StageState {
            n,
            eps: level.eps.clone(),
            k: level.k.clone(),
            k_next: Some(next.k.clone()),
            generators: level.gens.elements().to_vec(),
            points: points.clone(),
            classes: classes.clone(),
            h_next: h.clone(),
        });
        for (c, cl) in classes.iter().enumerate() {
            for &i in cl {
                points[i] = &points[i] + &h[c];
            }
        }
        classes = groups.iter().map(|g| g.iter().flat_map(|&c| classes[c].iter().copied()).collect()).collect();
        level = next;
        n += 1;
    }
    let total_shift: Vec<RealQ> = points.iter().zip(c0.points()).map(|(a, b)| a - b).collect();
    let mut tilings = Vec::new();
    for w in points.windows(2) {
        tilings.push(tile_with(&levels, &(&w[1] - &w[0]))?);
    }
    let all = expand(&points, &tilings);
    let floor = min_increment(&tilings, &c0.lacunarity_floor)?;
    let final_window = if all.is_empty() {
        c0.clone()
    } else {
        CrossSectionWindow::line(c0.orbit_id.clone(), all, floor)?
    };
    Ok(SparseTrace { k0, stages, limit: points, total_shift, tilings, final_window })
}

/// Outcome of re-checking a trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub stages: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Re-checks the eight stage properties, the shift bounds, displacement
/// below `scale/3`, the tilings and final regularity.
pub fn check_sparse_trace(
    trace: &SparseTrace,
    c0: &CrossSectionWindow,
    s: &DistanceSet,
    opts: &SparseOptions,
) -> Result<InvariantReport> {
    let mut rep = InvariantReport { stages: trace.stages.len(), ..Default::default() };
    let one = RealQ::integer(s.basis(), 1);
    let mut levels: Vec<Generators> = Vec::new();
    for (idx, st) in trace.stages.iter().enumerate() {
        levels.push(Generators::new(st.generators.clone())?);
        let n = st.n;
        rep.check(st.eps == RealQ::rational(s.basis(), stage_epsilon(n, &opts.eps_scale)), || {
            alloc::format!("stage {n}: eps mismatch")
        });
        // (1)
        if n == 0 {
            rep.check(st.classes.iter().all(|c| c.len() == 1), || "stage 0: E_0 is not trivial".into());
        }
        // (2) gaps at least 1
        for w in st.points.windows(2) {
            rep.check((&w[1] - &w[0]).ge(&one)?, || alloc::format!("stage {n}: gap below 1"));
        }
        // (4) one shift per class, every point in exactly one class
        let mut owner = alloc::vec![usize::MAX; st.points.len()];
        for (c, cl) in st.classes.iter().enumerate() {
            for &i in cl {
                rep.check(owner[i] == usize::MAX, || alloc::format!("stage {n}: point {i} in two classes"));
                owner[i] = c;
            }
        }
        rep.check(owner.iter().all(|&o| o != usize::MAX) && st.h_next.len() == st.classes.len(), || {
            alloc::format!("stage {n}: shifts not constant on classes")
        });
        for h in &st.h_next {
            rep.check(h.abs()?.lt(&st.eps)?, || alloc::format!("stage {n}: |h| >= eps_n"));
        }
        // (5), (8) inside classes; (7) between adjacent classes
        let k_minus = &st.k - &one;
        let k_plus = &st.k + &one;
        for cl in &st.classes {
            for w in cl.windows(2) {
                let d = &st.points[w[1]] - &st.points[w[0]];
                rep.check(in_levels(&levels, &d)?, || alloc::format!("stage {n}: class distance {d} not in T(S)"));
                rep.check(d.le(&k_plus)?, || alloc::format!("stage {n}: adjacent equivalent points beyond K_n + 1"));
            }
        }
        for w in st.classes.windows(2) {
            let d = &st.points[w[1][0]] - &st.points[*w[0].last().expect("class")];
            rep.check(d.gt(&k_minus)?, || alloc::format!("stage {n}: classes within K_n - 1"));
        }
        if let Some(next) = trace.stages.get(idx + 1) {
            // (3) C_{n+1} = C_n + h
            for (c, cl) in st.classes.iter().enumerate() {
                for &i in cl {
                    rep.check(next.points[i] == &st.points[i] + &st.h_next[c], || {
                        alloc::format!("stage {n}: C_(n+1) is not C_n + h")
                    });
                }
            }
            // (6) coarsening
            let mut next_owner = alloc::vec![usize::MAX; next.points.len()];
            for (c, cl) in next.classes.iter().enumerate() {
                for &i in cl {
                    next_owner[i] = c;
                }
            }
            for cl in &st.classes {
                let o = next_owner[cl[0]];
                rep.check(cl.iter().all(|&i| next_owner[i] == o), || alloc::format!("stage {n}: E_(n+1) not coarser"));
            }
            let kn = st.k_next.clone().unwrap_or_else(|| next.k.clone());
            rep.check(kn == next.k && next.k.gt(&k_plus)?, || alloc::format!("stage {n}: K_(n+1) <= K_n + 1"));
        }
    }
    let bound = RealQ::rational(s.basis(), &opts.eps_scale / Rational::from_integer(BigInt::from(3)));
    for sh in &trace.total_shift {
        rep.check(sh.abs()?.lt(&bound)?, || alloc::format!("displacement {sh} reaches the bound"));
    }
    rep.check(trace.total_shift.len() == c0.len(), || "shift count mismatch".into());
    for (w, t) in trace.limit.windows(2).zip(&trace.tilings) {
        let sum = sum_all(s.basis(), &t.increments);
        rep.check(sum == &w[1] - &w[0], || "tiling does not re-sum to its gap".into());
        for x in &t.increments {
            rep.check(s.contains(x)?, || alloc::format!("tile increment {x} not in S"));
        }
    }
    if trace.final_window.len() >= 2 {
        rep.check(is_regular(&trace.final_window, s)?.regular, || "final window is not S-regular".into());
    }
    Ok(rep)
}

/// Greedy sub-section with every gap above `k`, keeping both anchors.
pub fn thin_above(c: &CrossSectionWindow, k: &RealQ) -> Result<CrossSectionWindow> {
    let pts = c.points();
    if pts.len() <= 1 {
        return Ok(c.clone());
    }
    let mut kept = alloc::vec![pts[0].clone()];
    for p in &pts[1..] {
        if (p - kept.last().expect("kept")).gt(k)? {
            kept.push(p.clone());
        }
    }
    let last = pts.last().expect("nonempty");
    if kept.last() != Some(last) {
        if kept.len() > 1 {
            kept.pop();
        }
        if (last - kept.last().expect("kept")).gt(k)? {
            kept.push(last.clone());
        }
    }
    let floor = if kept.len() >= 2 {
        let mut m = &kept[1] - &kept[0];
        for w in kept.windows(2) {
            let g = &w[1] - &w[0];
            if g.lt(&m)? {
                m = g;
            }
        }
        m
    } else {
        c.lacunarity_floor.clone()
    };
    Ok(CrossSectionWindow::line(c.orbit_id.clone(), kept, floor)?)
}

// ---------------------------------------------------------------------------
// large blocks

/// Constants of level `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelConstants {
    pub n: usize,
    pub eps: RealQ,
    /// Level `M` whose `T_M` carries the moves made at this level.
    pub level: usize,
    /// `N_n` (pair spacing); `N_0 = 1`.
    pub spacing: usize,
    /// Tail index returned by the refinement for this level, if computed.
    pub refine_level: Option<usize>,
    /// `D_n`.
    pub d: RealQ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlocksPlan {
    pub rank_max: usize,
    pub k0: RealQ,
    pub levels: Vec<LevelConstants>,
    /// `D_{rank_max}`.
    pub required_length: RealQ,
}

impl BlocksPlan {
    /// Admissible range `[K_0 + 1, K_0 + 2]` for initial gaps.
    pub fn gap_range(&self) -> (RealQ, RealQ) {
        let b = self.k0.basis();
        (&self.k0 + &RealQ::integer(b, 1), &self.k0 + &RealQ::integer(b, 2))
    }
}

fn family_eps(family: &LimitFamily, n: usize) -> Result<RealQ> {
    let b = family.basis();
    let one = RealQ::integer(b, 1);
    let mut m = one.min(&family.element(0))?;
    m = m.min(&family.upsilon)?;
    Ok(m.scale(&stage_epsilon(n, &Rational::one())))
}

/// Smallest level `M >= from` whose generators are `target`-dense eventually.
fn dense_level(family: &LimitFamily, from: usize, target: &RealQ) -> Result<usize> {
    let cap = family.m_max.max(from);
    let mut g = family.element(0);
    for m in 1..=cap {
        g = g.gcd(&family.element(m))?;
        if m >= from && (g.is_zero() || g.lt(target)?) {
            return Ok(m);
        }
    }
    Err(SetError::CutoffExceeded { cutoff: cap }.into())
}

/// Constants for `rank_max` stages over `family`.
pub fn large_blocks_plan(family: &LimitFamily, rank_max: usize) -> Result<BlocksPlan> {
    let b = family.basis().clone();
    let two = RealQ::integer(&b, 2);
    let mut lvl = Vec::new();
    let mut level = 0;
    let mut k0 = family.upsilon.max(&family.element(0))? + two.clone();
    for n in 0..rank_max.max(1) {
        let eps = family_eps(family, n)?;
        level = dense_level(family, level, &eps.scale(&Rational::new(1.into(), 12.into())))?;
        let gens = family.generators(level);
        let cert = threshold_recipe(&gens, &eps.scale(&Rational::new(1.into(), 8.into())))?;
        let k = &cert.k + &two;
        if k.gt(&k0)? {
            k0 = k;
        }
        lvl.push((eps, level));
    }
    let k0 = RealQ::integer(&b, k0.ceil_div(&RealQ::integer(&b, 1))?.to_i64().unwrap_or(i64::MAX));
    let mut d = &k0 + &RealQ::integer(&b, 3);
    let mut levels =
        alloc::vec![LevelConstants { n: 0, eps: lvl[0].0.clone(), level: lvl[0].1, spacing: 1, refine_level: None, d: d.clone() }];
    if rank_max > 0 {
        let canonical = &k0 + &RealQ::ratio(&b, 3, 2);
        for n in 0..rank_max {
            let (eps, level) = lvl[n].clone();
            let next_eps = family_eps(family, n + 1)?;
            let delta = next_eps.scale(&Rational::new(1.into(), 12.into()));
            let r = TameSet::saturate(family, level, &canonical, &eps)?;
            let steps = alloc::vec![(canonical.clone(), r); 3];
            let plan = tame_general_plan(&eps, &delta, &d, level, &steps)?;
            d = d.scale_int(2 * plan.n_required as i64 + 2);
            let next_level = lvl.get(n + 1).map_or(level, |x| x.1);
            levels.push(LevelConstants {
                n: n + 1,
                eps: next_eps,
                level: next_level,
                spacing: plan.n_required,
                refine_level: Some(plan.m),
                d: d.clone(),
            });
        }
    }
    let required_length = levels[rank_max].d.clone();
    Ok(BlocksPlan { rank_max, k0, levels, required_length })
}

/// A block of the output, by point indices into the final window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedBlock {
    pub first: usize,
    pub last: usize,
    pub rank: usize,
}

/// Displacement of one block when passing to stage `stage`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMove {
    pub stage: usize,
    pub rank: usize,
    pub shift: RealQ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub stage: usize,
    /// Units strictly between the two paired blocks.
    pub intermediates: usize,
    /// Rank `stage - 1` blocks skipped since the previous pair at this stage.
    pub skipped_before: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlocksTrace {
    pub plan: BlocksPlan,
    pub window: CrossSectionWindow,
    pub blocks: Vec<RankedBlock>,
    pub moves: Vec<BlockMove>,
    pub pairs: Vec<PairRecord>,
    pub tilings: Vec<Tiling>,
    /// Total shift of each original point.
    pub total_shift: Vec<RealQ>,
}

#[derive(Debug, Clone)]
struct Unit {
    /// Indices into the point store.
    pts: Vec<usize>,
    rank: usize,
}

/// The balancing choice: a point of `T` in `(d, d + tau)` or `(d - tau, d)`.
fn balanced_gap(gens: &Generators, d: &RealQ, tau: &RealQ, run: &RealQ) -> Result<RealQ> {
    let zero = RealQ::zero(d.basis());
    let iv = if run.lt(&zero)? {
        Interval::open(d.clone(), d + tau)
    } else if run.gt(&zero)? {
        Interval::open(d - tau, d.clone())
    } else {
        Interval::open(d - tau, d + tau)
    };
    let pts = gens.points_in(&iv, 1 << 16)?;
    let mut best: Option<(RealQ, RealQ)> = None;
    for p in pts {
        let dist = (&p - d).abs()?;
        if best.as_ref().map_or(Ok(true), |(_, bd)| dist.lt(bd))? {
            best = Some((p, dist));
        }
    }
    best.map(|(p, _)| p).ok_or_else(|| SemigroupError::NoCorrection { x: d.clone(), epsilon: tau.clone() }.into())
}

/// Recursive block construction on one window with gaps in `[K_0 + 1, K_0 + 2]`.
pub fn large_blocks(window: &CrossSectionWindow, family: &LimitFamily, plan: &BlocksPlan) -> Result<BlocksTrace> {
    let b = family.basis().clone();
    if window.is_circle() {
        return Err(ConstructionError::NotApplicable("large blocks need a line window".into()));
    }
    let mut store: Vec<RealQ> = window.points().to_vec();
    let n0 = store.len();
    let mut units: Vec<Unit> = (0..n0).map(|i| Unit { pts: alloc::vec![i], rank: 0 }).collect();
    let mut moves = Vec::new();
    let mut pairs = Vec::new();
    let mut tilings = Vec::new();
    if plan.rank_max > 0 {
        let (lo, hi) = plan.gap_range();
        for (i, g) in gaps(window)?.iter().enumerate() {
            if g.lt(&lo)? || g.gt(&hi)? {
                return Err(ConstructionError::GapsOutOfRange { index: i, gap: g.clone(), lo, hi });
            }
        }
        let len = window_length(window);
        if len.lt(&plan.required_length)? {
            return Err(ConstructionError::WindowTooShort { required: plan.required_length.clone(), length: len });
        }
    }
    let quarter = Rational::new(1.into(), 4.into());
    for stage in 1..=plan.rank_max {
        let lc = &plan.levels[stage - 1];
        let gens = Generators::new(family.generators(lc.level))?;
        let tau = lc.eps.scale(&quarter);
        let spacing = plan.levels[stage].spacing;
        let cands: Vec<usize> = (0..units.len()).filter(|&u| units[u].rank == stage - 1).collect();
        let mut selected: Vec<(usize, usize, Option<usize>)> = Vec::new();
        let mut c = 0;
        let mut first = true;
        while c + 1 < cands.len() {
            selected.push((cands[c], cands[c + 1], if first { None } else { Some(spacing) }));
            first = false;
            c += 2 + spacing;
        }
        // merge from the right so earlier unit indices stay valid
        let mut new_units: Vec<Unit> = Vec::new();
        let mut cursor = 0;
        for &(l, r, skipped) in &selected {
            while cursor < l {
                new_units.push(units[cursor].clone());
                cursor += 1;
            }
            pairs.push(PairRecord { stage, intermediates: r - l - 1, skipped_before: skipped });
            let mut run = RealQ::zero(&b);
            let mut merged: Vec<usize> = units[l].pts.clone();
            for u in l + 1..=r {
                let left_end = &store[*units[u - 1].pts.last().expect("unit")];
                let right_start = &store[units[u].pts[0]];
                let d = right_start - left_end;
                // `d` already reflects the shift applied to unit u - 1
                let d_orig = &d - &run;
                let g = balanced_gap(&gens, &d_orig, &tau, &run)?;
                run = &run + &(&g - &d_orig);
                for &p in &units[u].pts {
                    store[p] = &store[p] + &run;
                }
                moves.push(BlockMove { stage, rank: units[u].rank, shift: run.clone() });
                let tiling = gens.tile(&g)?;
                let base = store[*merged.last().expect("merged")].clone();
                for s in &tiling.partial_sums[1..tiling.partial_sums.len() - 1] {
                    store.push(&base + s);
                    merged.push(store.len() - 1);
                }
                tilings.push(tiling);
                merged.extend(units[u].pts.iter().copied());
            }
            new_units.push(Unit { pts: merged, rank: stage });
            cursor = r + 1;
        }
        while cursor < units.len() {
            new_units.push(units[cursor].clone());
            cursor += 1;
        }
        units = new_units;
    }
    let total_shift: Vec<RealQ> = (0..n0).map(|i| &store[i] - &window.points()[i]).collect();
    let mut all: Vec<RealQ> = Vec::new();
    let mut blocks = Vec::new();
    for u in &units {
        let first = all.len();
        all.extend(u.pts.iter().map(|&p| store[p].clone()));
        blocks.push(RankedBlock { first, last: all.len() - 1, rank: u.rank });
    }
    let floor = min_increment(&tilings, &window.lacunarity_floor)?;
    let out = CrossSectionWindow::new(
        window.orbit_id.clone(),
        Geometry::Line { start: all[0].clone(), end: all[all.len() - 1].clone() },
        all,
        floor,
    )?;
    Ok(BlocksTrace { plan: plan.clone(), window: out, blocks, moves, pairs, tilings, total_shift })
}

/// Re-checks a blocks trace: intra-block gaps in `S`, separators outside `S`,
/// displacement of every rank-`k` block below `eps_k`, pair spacing and rank
/// presence.
pub fn check_blocks_trace(trace: &BlocksTrace, family: &LimitFamily) -> Result<InvariantReport> {
    let mut rep = InvariantReport { stages: trace.plan.rank_max, ..Default::default() };
    let pts = trace.window.points();
    for blk in &trace.blocks {
        for i in blk.first..blk.last {
            let g = &pts[i + 1] - &pts[i];
            rep.check(family.index_of(&g).is_some(), || alloc::format!("intra-block gap {g} not in S"));
        }
    }
    for w in trace.blocks.windows(2) {
        let g = &pts[w[1].first] - &pts[w[0].last];
        rep.check(family.index_of(&g).is_none(), || alloc::format!("separator {g} lies in S"));
    }
    for mv in &trace.moves {
        let eps = &trace.plan.levels[mv.rank].eps;
        rep.check(mv.shift.abs()?.lt(eps)?, || alloc::format!("rank {} block moved by {}", mv.rank, mv.shift));
    }
    for p in &trace.pairs {
        if let Some(k) = p.skipped_before {
            let n = trace.plan.levels[p.stage].spacing;
            rep.check(k >= n && k <= 2 * n + 1, || alloc::format!("pair spacing {k} outside [{n}, {}]", 2 * n + 1));
        }
    }
    for r in 0..=trace.plan.rank_max {
        rep.check(trace.blocks.iter().any(|b| b.rank == r), || alloc::format!("no block of rank {r}"));
    }
    let bound = family_eps(family, 0)?.scale_int(2);
    for sh in &trace.total_shift {
        rep.check(sh.abs()?.lt(&bound)?, || alloc::format!("total shift {sh} too large"));
    }
    let computed = blocks_by_family(&trace.window, family)?;
    rep.check(computed.classes.len() == trace.blocks.len(), || "block partition disagrees with membership".into());
    Ok(rep)
}

fn blocks_by_family(c: &CrossSectionWindow, family: &LimitFamily) -> Result<orbits::BlockPartition> {
    Ok(orbits::blocks_by(c, |g| Ok::<bool, OrbitError>(family.index_of(g).is_some()))?)
}

/// Evenly spaced line window from `start` covering `length` with gaps in
/// `[K_0 + 1, K_0 + 2]`.
pub fn seed_window(
    orbit_id: impl Into<String>,
    start: &RealQ,
    length: &RealQ,
    plan: &BlocksPlan,
) -> Result<CrossSectionWindow> {
    let (lo, _) = plan.gap_range();
    let k = length.floor_div(&lo)?;
    let count = k.to_i64().filter(|&c| c >= 1).ok_or_else(|| ConstructionError::WindowTooShort {
        required: lo.clone(),
        length: length.clone(),
    })?;
    let gap = length.scale(&Rational::new(1.into(), count.into()));
    let gs = alloc::vec![gap; count as usize];
    Ok(CrossSectionWindow::from_gaps(orbit_id, start.clone(), &gs, lo)?)
}

// ---------------------------------------------------------------------------
// lattice conversions

fn integer_multiple(x: &RealQ, lambda: &RealQ) -> Option<BigInt> {
    let r = x.commensurability_ratio(lambda)?;
    r.is_integer().then(|| r.to_integer())
}

/// Thins a `{lambda}`-regular window to gaps of at least `N lambda` and tiles
/// them by `gens` (all integer multiples of `lambda`, gcd `lambda`).
pub fn lambda_to_gens(c: &CrossSectionWindow, lambda: &RealQ, gens: &[RealQ]) -> Result<(CrossSectionWindow, Vec<Tiling>)> {
    let gs = gaps(c)?;
    for (i, g) in gs.iter().enumerate() {
        if g != lambda {
            return Err(ConstructionError::NotLambdaRegular(i));
        }
    }
    let st = stabilization_index_of(gens, lambda)?;
    let n = st.index as usize;
    let pts = c.points();
    let mut kept: Vec<RealQ> = pts.iter().step_by(n.max(1)).cloned().collect();
    let last = pts.last().expect("points");
    if kept.last() != Some(last) {
        if kept.len() > 1 {
            kept.pop();
        }
        kept.push(last.clone());
    }
    let g = Generators::new(gens.to_vec())?;
    let mut tilings = Vec::new();
    for w in kept.windows(2) {
        tilings.push(g.tile(&(&w[1] - &w[0]))?);
    }
    let all = expand(&kept, &tilings);
    let floor = min_increment(&tilings, &c.lacunarity_floor)?;
    let out = CrossSectionWindow::new(
        c.orbit_id.clone(),
        match &c.geometry {
            Geometry::Line { start, end } => Geometry::Line { start: start.clone(), end: end.clone() },
            g => g.clone(),
        },
        all,
        floor,
    )?;
    Ok((out, tilings))
}

/// `{lambda}`-regular to `S`-regular for a finite lattice `S`.
pub fn lambda_to_s(c: &CrossSectionWindow, lambda: &RealQ, s: &DistanceSet) -> Result<CrossSectionWindow> {
    let SetKind::Finite(v) = s.kind() else {
        return Err(ConstructionError::NotApplicable("lambda_to_s needs a finite S".into()));
    };
    Ok(lambda_to_gens(c, lambda, v)?.0)
}

/// Largest number of points `s_to_lambda` will produce.
pub const MAX_SUBDIVISION_POINTS: u64 = 1 << 20;

/// `S`-regular to `{lambda}`-regular by subdividing each gap `n lambda`.
pub fn s_to_lambda(c: &CrossSectionWindow, s: &DistanceSet, lambda: &RealQ) -> Result<CrossSectionWindow> {
    if let SetKind::Finite(v) = s.kind() {
        for x in v {
            if integer_multiple(x, lambda).is_none() {
                return Err(ConstructionError::NotLatticeCompatible(x.clone()));
            }
        }
    }
    let gs = gaps(c)?;
    let mut counts = Vec::with_capacity(gs.len());
    let mut total = 0u64;
    for (i, g) in gs.iter().enumerate() {
        if !s.contains(g)? {
            return Err(ConstructionError::NotSRegular(i));
        }
        let k = integer_multiple(g, lambda).ok_or_else(|| ConstructionError::NotLatticeCompatible(g.clone()))?;
        let k = k.to_u64().filter(|&k| k <= MAX_SUBDIVISION_POINTS).unwrap_or(u64::MAX);
        total = total.saturating_add(k);
        if total > MAX_SUBDIVISION_POINTS {
            return Err(ConstructionError::BudgetExceeded(alloc::format!(
                "subdivision into steps of {lambda} needs more than {MAX_SUBDIVISION_POINTS} points"
            )));
        }
        counts.push(k);
    }
    let mut out = alloc::vec![c.points()[0].clone()];
    for k in counts {
        let start = out.last().expect("point").clone();
        for j in 1..=k {
            out.push(&start + &lambda.scale_int(j as i64));
        }
    }
    let geometry = match &c.geometry {
        Geometry::Line { start, end } => Geometry::Line { start: start.clone(), end: end.clone() },
        Geometry::Circle { length } => {
            out.pop();
            Geometry::Circle { length: length.clone() }
        }
    };
    Ok(CrossSectionWindow::new(c.orbit_id.clone(), geometry, out, lambda.clone())?)
}

// ---------------------------------------------------------------------------
// case drivers

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Category {
    /// Gap supremum in `(i - 1, i]`.
    X(u64),
    /// Gaps beyond the probe; `both_halves` is the sparseness proxy.
    XInfinity { both_halves: bool },
    Dr,
    D0,
    Ds,
}

impl Category {
    pub fn name(&self) -> String {
        match self {
            Category::X(i) => alloc::format!("X_{i}"),
            Category::XInfinity { .. } => "X_inf".into(),
            Category::Dr => "D_r".into(),
            Category::D0 => "D_0".into(),
            Category::Ds => "D_s".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case2Piece {
    pub orbit_id: String,
    pub category: Category,
    pub gap_sup: RealQ,
    /// `lambda_i` for `X_i`.
    pub lambda: Option<RealQ>,
    /// The `{lambda_i}`-regular conversion for `X_i`; absent when it would
    /// exceed `MAX_SUBDIVISION_POINTS`.
    pub converted: Option<CrossSectionWindow>,
}

/// Splits S-regular windows by their gap supremum.
pub fn partition_case2(windows: &[CrossSectionWindow], s: &DistanceSet, n_max: u64) -> Result<Vec<Case2Piece>> {
    let mut out = Vec::with_capacity(windows.len());
    for w in windows {
        let gs = gaps(w)?;
        let mut sup = gs[0].clone();
        for g in &gs[1..] {
            sup = sup.max(g)?;
        }
        let one = RealQ::integer(s.basis(), 1);
        let i = sup.ceil_div(&one)?.to_u64().unwrap_or(u64::MAX).max(1);
        if i <= n_max {
            let bound = RealQ::integer(s.basis(), i as i64);
            let lambda = s.lambda_trunc(&bound)?.lambda;
            let piece = DistanceSet::finite(s.enumerate_upto(&bound)?, None)?;
            let converted = match s_to_lambda(w, &piece, &lambda) {
                Ok(c) => Some(c),
                Err(ConstructionError::BudgetExceeded(_)) => None,
                Err(e) => return Err(e),
            };
            out.push(Case2Piece {
                orbit_id: w.orbit_id.clone(),
                category: Category::X(i),
                gap_sup: sup,
                lambda: Some(lambda),
                converted,
            });
        } else {
            let both_halves =
                !w.is_circle() && sparseness_profile(w, &[RealQ::integer(s.basis(), n_max as i64)])?[0];
            out.push(Case2Piece {
                orbit_id: w.orbit_id.clone(),
                category: Category::XInfinity { both_halves },
                gap_sup: sup,
                lambda: None,
                converted: None,
            });
        }
    }
    Ok(out)
}

/// A window with block structure; the flags mark a first/last block that
/// continues past the window boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedWindow {
    pub window: CrossSectionWindow,
    pub infinite_left: bool,
    pub infinite_right: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case3Entry {
    pub orbit_id: String,
    pub category: Category,
    /// Block endpoints (for `D_0` and `D_s`).
    pub endpoints: Vec<RealQ>,
    pub output: Option<CrossSectionWindow>,
    pub trace: Option<SparseTrace>,
}

/// `D_r` windows pass through, `D_0` windows are flagged, `D_s` windows are
/// reduced to block endpoints and regularized.
pub fn case3_driver(windows: &[BlockedWindow], s: &DistanceSet, opts: &SparseOptions) -> Result<Vec<Case3Entry>> {
    let k0 = sparse_k0(s, opts)?;
    let mut out = Vec::with_capacity(windows.len());
    for bw in windows {
        let w = &bw.window;
        let part = blocks(w, s)?;
        let pts = w.points();
        let mut endpoints = Vec::new();
        for cl in &part.classes {
            endpoints.push(pts[cl[0]].clone());
            if cl.len() > 1 {
                endpoints.push(pts[*cl.last().expect("class")].clone());
            }
        }
        let id = w.orbit_id.clone();
        if part.classes.len() <= 1 {
            out.push(Case3Entry { orbit_id: id, category: Category::Dr, endpoints: Vec::new(), output: Some(w.clone()), trace: None });
            continue;
        }
        if bw.infinite_left || bw.infinite_right {
            out.push(Case3Entry { orbit_id: id, category: Category::D0, endpoints, output: None, trace: None });
            continue;
        }
        let ends = CrossSectionWindow::line(id.clone(), endpoints.clone(), w.lacunarity_floor.clone())?;
        if !sparseness_profile(&ends, core::slice::from_ref(&k0))?[0] {
            return Err(ConstructionError::SparsenessProxyFailed(id));
        }
        let thin = thin_above(&ends, &k0)?;
        let trace = sparse_regularize(&thin, s, opts)?;
        out.push(Case3Entry {
            orbit_id: id,
            category: Category::Ds,
            endpoints,
            output: Some(trace.final_window.clone()),
            trace: Some(trace),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEntry {
    pub orbit_id: String,
    pub route: &'static str,
    pub category: Option<Category>,
    pub output: Option<CrossSectionWindow>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowReport {
    pub class: GroupClass,
    pub entries: Vec<FlowEntry>,
}

/// Options for the dispatching driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriverOptions {
    pub probe_bound: RealQ,
    pub sparse: SparseOptions,
    pub rank_max: usize,
}

/// Classifies `S` and builds S-regular windows along the matching route.
pub fn classify_and_construct(flow: &[CrossSectionWindow], s: &DistanceSet, opts: &DriverOptions) -> Result<FlowReport> {
    let class = s.classify(&opts.probe_bound)?;
    let mut entries = Vec::new();
    match &class {
        GroupClass::Lattice { lambda } => {
            for w in flow {
                let lambda_regular = gaps(w).map(|g| g.iter().all(|x| x == lambda)).unwrap_or(false);
                let entry = if lambda_regular {
                    let gens = match s.kind() {
                        SetKind::Finite(v) => v.clone(),
                        _ => s.enumerate_upto(&opts.probe_bound)?,
                    };
                    let (out, _) = lambda_to_gens(w, lambda, &gens)?;
                    FlowEntry { orbit_id: w.orbit_id.clone(), route: "lambda_to_s", category: None, output: Some(out), note: None }
                } else {
                    FlowEntry {
                        orbit_id: w.orbit_id.clone(),
                        route: "lambda_to_s",
                        category: None,
                        output: None,
                        note: Some("input is not lambda-regular".into()),
                    }
                };
                entries.push(entry);
            }
        }
        GroupClass::DenseLocallyLattice { .. } => {
            let n_max = opts.probe_bound.floor_div(&RealQ::integer(s.basis(), 1))?.to_u64().unwrap_or(0);
            let pieces = partition_case2(flow, s, n_max)?;
            for (w, p) in flow.iter().zip(pieces) {
                match (&p.category, &p.converted, &p.lambda) {
                    (Category::X(i), Some(conv), Some(lambda)) => {
                        let gens = s.enumerate_upto(&RealQ::integer(s.basis(), *i as i64))?;
                        let (out, _) = lambda_to_gens(conv, lambda, &gens)?;
                        entries.push(FlowEntry {
                            orbit_id: p.orbit_id,
                            route: "case2_piece",
                            category: Some(p.category),
                            output: Some(out),
                            note: None,
                        });
                    }
                    (Category::X(_), None, _) => entries.push(FlowEntry {
                        orbit_id: p.orbit_id,
                        route: "case2_piece",
                        category: Some(p.category),
                        output: None,
                        note: Some("lambda_i subdivision exceeds the point budget".into()),
                    }),
                    _ => {
                        let thin = thin_above(w, &sparse_k0(s, &opts.sparse)?)?;
                        let trace = sparse_regularize(&thin, s, &opts.sparse)?;
                        entries.push(FlowEntry {
                            orbit_id: p.orbit_id,
                            route: "sparse_regularize",
                            category: Some(p.category),
                            output: Some(trace.final_window),
                            note: None,
                        });
                    }
                }
            }
        }
        GroupClass::DenseBounded { witness, .. } => match (witness, s.limit_point()) {
            (DensityWitness::LimitPoint(_), Some(family)) => {
                let plan = large_blocks_plan(&family, opts.rank_max)?;
                let mut blocked = Vec::new();
                for w in flow {
                    let seeded = seed_window(w.orbit_id.clone(), &w.points()[0], &window_length(w), &plan)?;
                    let bt = large_blocks(&seeded, &family, &plan)?;
                    blocked.push(BlockedWindow { window: bt.window, infinite_left: false, infinite_right: false });
                }
                let mut sparse = opts.sparse.clone();
                if sparse.k_growth.is_none() {
                    sparse.k_growth = Some(Rational::from_integer(2.into()));
                }
                for e in case3_driver(&blocked, s, &sparse)? {
                    entries.push(FlowEntry {
                        orbit_id: e.orbit_id,
                        route: "large_blocks_case3",
                        category: Some(e.category),
                        output: e.output,
                        note: None,
                    });
                }
            }
            _ => {
                let k0 = sparse_k0(s, &opts.sparse)?;
                for w in flow {
                    let thin = thin_above(w, &k0)?;
                    let trace = sparse_regularize(&thin, s, &opts.sparse)?;
                    entries.push(FlowEntry {
                        orbit_id: w.orbit_id.clone(),
                        route: "thin_and_regularize",
                        category: None,
                        output: Some(trace.final_window),
                        note: None,
                    });
                }
            }
        },
    }
    Ok(FlowReport { class, entries })
}

/// Sum of the displacement bounds `sum_n eps_n` for `scale`.
pub fn displacement_bound(basis: &crate::exactreal::Basis, scale: &Rational) -> RealQ {
    RealQ::rational(basis, scale / Rational::from_integer(BigInt::from(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distset::ReciprocalTail;
    use crate::exactreal::Basis;
    use crate::orbits::translate;
    use alloc::vec;

    fn q(b: &Basis, p: i64, d: i64) -> RealQ {
        RealQ::ratio(b, p, d)
    }

    #[test]
    fn epsilons() {
        assert_eq!(stage_epsilon(0, &Rational::one()), Rational::new(1.into(), 6.into()));
        assert_eq!(stage_epsilon(2, &Rational::one()), Rational::new(1.into(), 24.into()));
    }

    #[test]
    fn single_point_is_unchanged() {
        let b = Basis::standard();
        let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), RealQ::symbol(&b, "sqrt2").unwrap()], None).unwrap();
        let w = CrossSectionWindow::line("a", vec![q(&b, 5, 1)], q(&b, 1, 1)).unwrap();
        let t = sparse_regularize(&w, &s, &SparseOptions::default()).unwrap();
        assert_eq!(t.final_window, w);
        assert!(t.tilings.is_empty());
    }

    #[test]
    fn sparse_three_points() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), s2.clone()], None).unwrap();
        let opts = SparseOptions::default();
        let k0 = sparse_k0(&s, &opts).unwrap();
        let g1 = &k0 + &q(&b, 7, 3);
        let g2 = &(&k0 + &s2) + &q(&b, 1, 5);
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[g1, g2], q(&b, 1, 1)).unwrap();
        let t = sparse_regularize(&w, &s, &opts).unwrap();
        let rep = check_sparse_trace(&t, &w, &s, &opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert!(is_regular(&t.final_window, &s).unwrap().regular);
        let r = q(&b, 13, 7);
        let tt = sparse_regularize(&translate(&w, &r).unwrap(), &s, &opts).unwrap();
        assert_eq!(tt.final_window, translate(&t.final_window, &r).unwrap());
    }

    #[test]
    fn gaps_too_small() {
        let b = Basis::standard();
        let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), RealQ::symbol(&b, "sqrt2").unwrap()], None).unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 3, 1)], q(&b, 1, 1)).unwrap();
        assert!(matches!(
            sparse_regularize(&w, &s, &SparseOptions::default()),
            Err(ConstructionError::GapsTooSmall { .. })
        ));
    }

    #[test]
    fn lattice_round_trip() {
        let b = Basis::rationals();
        let lam = q(&b, 1, 7);
        let s = DistanceSet::finite(vec![lam.scale_int(3), lam.scale_int(5)], None).unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 2, 1), &vec![lam.clone(); 9], lam.clone()).unwrap();
        let out = lambda_to_s(&w, &lam, &s).unwrap();
        assert!(is_regular(&out, &s).unwrap().regular);
        assert_eq!(out.points().first(), w.points().first());
        assert_eq!(out.points().last(), w.points().last());
        let back = s_to_lambda(&out, &s, &lam).unwrap();
        assert_eq!(back.points(), w.points());
        let ones = DistanceSet::finite(vec![lam.clone()], None).unwrap();
        assert_eq!(lambda_to_s(&w, &lam, &ones).unwrap().points(), w.points());
        let bad = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[lam.clone(), lam.scale_int(2)], lam.clone()).unwrap();
        assert_eq!(lambda_to_s(&bad, &lam, &s), Err(ConstructionError::NotLambdaRegular(1)));
    }

    #[test]
    fn not_lattice_compatible() {
        let b = Basis::standard();
        let lam = RealQ::integer(&b, 1);
        let s = DistanceSet::finite(vec![lam.clone(), RealQ::symbol(&b, "sqrt2").unwrap()], None).unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[lam.clone()], lam.clone()).unwrap();
        assert!(matches!(s_to_lambda(&w, &s, &lam), Err(ConstructionError::NotLatticeCompatible(_))));
    }

    #[test]
    fn case2_harmonic() {
        let b = Basis::rationals();
        let s = DistanceSet::harmonic(&b, 200);
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 1, 1), q(&b, 11, 6), q(&b, 3, 2)], q(&b, 1, 1)).unwrap();
        let p = partition_case2(&[w], &s, 10).unwrap();
        assert_eq!(p[0].category, Category::X(2));
        assert_eq!(p[0].lambda, Some(q(&b, 1, 6)));
        assert!(partition_case2(&[], &s, 10).unwrap().is_empty());
    }

    #[test]
    fn blocks_rank_one() {
        let b = Basis::rationals();
        let fam = LimitFamily::new(RealQ::integer(&b, 1), ReciprocalTail { scale: RealQ::integer(&b, 1), shift: 2 }, 60).unwrap();
        let plan = large_blocks_plan(&fam, 1).unwrap();
        assert_eq!(plan.levels[1].spacing, plan.levels[1].spacing.max(1));
        let len = plan.required_length.scale_int(1);
        let w = seed_window("a", &q(&b, 0, 1), &len, &plan).unwrap();
        let t = large_blocks(&w, &fam, &plan).unwrap();
        let rep = check_blocks_trace(&t, &fam).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        let zero = large_blocks_plan(&fam, 0).unwrap();
        let t0 = large_blocks(&w, &fam, &zero).unwrap();
        assert_eq!(t0.window.points(), w.points());
        assert!(t0.blocks.iter().all(|b| b.first == b.last));
    }
}
