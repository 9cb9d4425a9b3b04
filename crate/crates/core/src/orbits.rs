//! Finite windows of a cross section on one orbit.
//!
//! A line window stands in for a bi-infinite orbit: its two extreme points
//! are anchors. A circle window models a periodic orbit of circumference `L`
//! and always includes the wrap-around gap.

use alloc::string::String;
use alloc::vec::Vec;

use crate::distset::{DistanceSet, SetError};
use crate::exactreal::{sort_values, ExactError, RealQ};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("too few points for gaps")]
    Degenerate,
    #[error("operation not applicable to circle windows")]
    NotApplicable,
    #[error("invalid window: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Geometry {
    Line { start: RealQ, end: RealQ },
    Circle { length: RealQ },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossSectionWindow {
    pub orbit_id: String,
    pub geometry: Geometry,
    points: Vec<RealQ>,
    pub lacunarity_floor: RealQ,
}

impl CrossSectionWindow {
    /// Validated window; `points` must be strictly increasing.
    pub fn new(
        orbit_id: impl Into<String>,
        geometry: Geometry,
        points: Vec<RealQ>,
        lacunarity_floor: RealQ,
    ) -> Result<Self, OrbitError> {
        let w = CrossSectionWindow { orbit_id: orbit_id.into(), geometry, points, lacunarity_floor };
        w.validate()?;
        Ok(w)
    }

    /// Line window spanning exactly from the first to the last point.
    pub fn line(orbit_id: impl Into<String>, points: Vec<RealQ>, lacunarity_floor: RealQ) -> Result<Self, OrbitError> {
        let (Some(first), Some(last)) = (points.first(), points.last()) else {
            return Err(OrbitError::Invalid("a line window needs at least one point".into()));
        };
        let geometry = Geometry::Line { start: first.clone(), end: last.clone() };
        CrossSectionWindow::new(orbit_id, geometry, points, lacunarity_floor)
    }

    /// Line window through points with the given gaps, starting at `start`.
    pub fn from_gaps(
        orbit_id: impl Into<String>,
        start: RealQ,
        gaps: &[RealQ],
        lacunarity_floor: RealQ,
    ) -> Result<Self, OrbitError> {
        let mut pts = alloc::vec![start];
        for g in gaps {
            let next = pts.last().expect("nonempty") + g;
            pts.push(next);
        }
        CrossSectionWindow::line(orbit_id, pts, lacunarity_floor)
    }

    pub fn points(&self) -> &[RealQ] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.geometry, Geometry::Circle { .. })
    }

    fn validate(&self) -> Result<(), OrbitError> {
        if !self.lacunarity_floor.is_positive()? {
            return Err(OrbitError::Invalid("lacunarity floor must be positive".into()));
        }
        for w in self.points.windows(2) {
            if !w[0].lt(&w[1])? {
                return Err(OrbitError::Invalid("points must be strictly increasing".into()));
            }
        }
        match &self.geometry {
            Geometry::Line { start, end } => {
                if start.gt(end)? {
                    return Err(OrbitError::Invalid("window start exceeds end".into()));
                }
                for p in &self.points {
                    if p.lt(start)? || p.gt(end)? {
                        return Err(OrbitError::Invalid(alloc::format!("point {p} outside the window")));
                    }
                }
            }
            Geometry::Circle { length } => {
                if !length.is_positive()? {
                    return Err(OrbitError::Invalid("circumference must be positive".into()));
                }
                let zero = RealQ::zero(length.basis());
                for p in &self.points {
                    if p.lt(&zero)? || p.ge(length)? {
                        return Err(OrbitError::Invalid(alloc::format!("point {p} outside [0, L)")));
                    }
                }
            }
        }
        if let Ok(gs) = gaps(self) {
            for g in gs {
                if g.lt(&self.lacunarity_floor)? {
                    return Err(OrbitError::Invalid(alloc::format!("gap {g} below the lacunarity floor")));
                }
            }
        }
        Ok(())
    }
}

/// Consecutive gaps; a circle appends `L - last + first`.
pub fn gaps(c: &CrossSectionWindow) -> Result<Vec<RealQ>, OrbitError> {
    let pts = &c.points;
    let mut out: Vec<RealQ> = pts.windows(2).map(|w| &w[1] - &w[0]).collect();
    match &c.geometry {
        Geometry::Line { .. } => {
            if pts.len() < 2 {
                return Err(OrbitError::Degenerate);
            }
        }
        Geometry::Circle { length } => {
            if pts.is_empty() {
                return Err(OrbitError::Degenerate);
            }
            out.push(&(length - &pts[pts.len() - 1]) + &pts[0]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// Index of the first gap outside `S`.
    pub first_violation: Option<usize>,
}

/// Whether every gap lies in the set decided by `is_member`.
pub fn is_regular_by<E>(
    c: &CrossSectionWindow,
    mut is_member: impl FnMut(&RealQ) -> Result<bool, E>,
) -> Result<Regularity, OrbitError>
where
    OrbitError: From<E>,
{
    for (i, g) in gaps(c)?.iter().enumerate() {
        if !is_member(g)? {
            return Ok(Regularity { regular: false, first_violation: Some(i) });
        }
    }
    Ok(Regularity { regular: true, first_violation: None })
}

/// Whether every gap is a member of `S`.
pub fn is_regular(c: &CrossSectionWindow, s: &DistanceSet) -> Result<Regularity, OrbitError> {
    is_regular_by(c, |g| s.contains(g))
}

/// Maximal runs of points joined by gaps in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    /// Point indices per class, in orbit order.
    pub classes: Vec<Vec<usize>>,
    /// Gaps between adjacent classes (none of them in `S`).
    pub separators: Vec<RealQ>,
}

impl BlockPartition {
    /// Class index for every point.
    pub fn class_of(&self, n: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; n];
        for (k, cl) in self.classes.iter().enumerate() {
            for &i in cl {
                out[i] = k;
            }
        }
        out
    }
}

pub fn blocks_by<E>(
    c: &CrossSectionWindow,
    mut is_member: impl FnMut(&RealQ) -> Result<bool, E>,
) -> Result<BlockPartition, OrbitError>
where
    OrbitError: From<E>,
{
    let n = c.points.len();
    if n == 0 {
        return Ok(BlockPartition { classes: Vec::new(), separators: Vec::new() });
    }
    let gs = if n == 1 && !c.is_circle() { Vec::new() } else { gaps(c)? };
    let inner = n - 1;
    let mut classes: Vec<Vec<usize>> = alloc::vec![alloc::vec![0]];
    let mut separators = Vec::new();
    for (i, g) in gs.iter().take(inner).enumerate() {
        if is_member(g)? {
            classes.last_mut().expect("class").push(i + 1);
        } else {
            separators.push(g.clone());
            classes.push(alloc::vec![i + 1]);
        }
    }
    if c.is_circle() {
        let wrap = &gs[inner];
        if is_member(wrap)? {
            if classes.len() > 1 {
                // the last run continues into the first across the wrap
                let mut last = classes.pop().expect("class");
                last.extend(classes[0].iter().copied());
                classes[0] = last;
            }
        } else {
            separators.push(wrap.clone());
        }
    }
    Ok(BlockPartition { classes, separators })
}

pub fn blocks(c: &CrossSectionWindow, s: &DistanceSet) -> Result<BlockPartition, OrbitError> {
    blocks_by(c, |g| s.contains(g))
}

/// For each threshold `K`, whether a gap exceeding `K` occurs in both halves
/// of the gap sequence (the middle gap of an odd count belongs to neither).
/// A finite proxy for gaps unbounded in both directions.
pub fn sparseness_profile(c: &CrossSectionWindow, thresholds: &[RealQ]) -> Result<Vec<bool>, OrbitError> {
    if c.is_circle() {
        return Err(OrbitError::NotApplicable);
    }
    let gs = gaps(c)?;
    let h = gs.len() / 2;
    let (left, right) = (&gs[..h], &gs[gs.len() - h..]);
    let mut out = Vec::with_capacity(thresholds.len());
    for k in thresholds {
        let mut l = false;
        for g in left {
            l |= g.gt(k)?;
        }
        let mut r = false;
        for g in right {
            r |= g.gt(k)?;
        }
        out.push(l && r);
    }
    Ok(out)
}

/// Shift by `r`; circle points rotate modulo `L`.
pub fn translate(c: &CrossSectionWindow, r: &RealQ) -> Result<CrossSectionWindow, OrbitError> {
    match &c.geometry {
        Geometry::Line { start, end } => Ok(CrossSectionWindow {
            orbit_id: c.orbit_id.clone(),
            geometry: Geometry::Line { start: start + r, end: end + r },
            points: c.points.iter().map(|p| p + r).collect(),
            lacunarity_floor: c.lacunarity_floor.clone(),
        }),
        Geometry::Circle { length } => {
            let mut pts = Vec::with_capacity(c.points.len());
            for p in &c.points {
                let q = p + r;
                let k = q.floor_div(length)?;
                pts.push(&q - &length.scale_big(&k));
            }
            sort_values(&mut pts)?;
            Ok(CrossSectionWindow {
                orbit_id: c.orbit_id.clone(),
                geometry: c.geometry.clone(),
                points: pts,
                lacunarity_floor: c.lacunarity_floor.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::Basis;
    use alloc::vec;

    fn q(b: &Basis, p: i64, d: i64) -> RealQ {
        RealQ::ratio(b, p, d)
    }

    #[test]
    fn gap_examples() {
        let b = Basis::rationals();
        let w = CrossSectionWindow::line("a", vec![q(&b, 0, 1), q(&b, 1, 1), q(&b, 5, 2)], q(&b, 1, 2)).unwrap();
        assert_eq!(gaps(&w).unwrap(), vec![q(&b, 1, 1), q(&b, 3, 2)]);
        let c = CrossSectionWindow::new("c", Geometry::Circle { length: q(&b, 3, 1) }, vec![q(&b, 0, 1), q(&b, 1, 1)], q(&b, 1, 2))
            .unwrap();
        assert_eq!(gaps(&c).unwrap(), vec![q(&b, 1, 1), q(&b, 2, 1)]);
        let single = CrossSectionWindow::line("s", vec![q(&b, 0, 1)], q(&b, 1, 1)).unwrap();
        assert_eq!(gaps(&single), Err(OrbitError::Degenerate));
    }

    #[test]
    fn regularity_examples() {
        let b = Basis::rationals();
        let s = DistanceSet::finite(vec![q(&b, 1, 1), q(&b, 3, 2)], None).unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 1, 1), q(&b, 3, 2), q(&b, 5, 4)], q(&b, 1, 2)).unwrap();
        assert_eq!(is_regular(&w, &s).unwrap(), Regularity { regular: false, first_violation: Some(2) });
        let ones = DistanceSet::finite(vec![q(&b, 1, 1)], None).unwrap();
        let c = CrossSectionWindow::new(
            "c",
            Geometry::Circle { length: q(&b, 4, 1) },
            (0..4).map(|i| q(&b, i, 1)).collect(),
            q(&b, 1, 1),
        )
        .unwrap();
        assert!(is_regular(&c, &ones).unwrap().regular);
    }

    #[test]
    fn block_examples() {
        let b = Basis::rationals();
        let ones = DistanceSet::finite(vec![q(&b, 1, 1)], None).unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 1, 1), q(&b, 2, 1), q(&b, 1, 1)], q(&b, 1, 1)).unwrap();
        let p = blocks(&w, &ones).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(p.separators, vec![q(&b, 2, 1)]);
        let twos = DistanceSet::finite(vec![q(&b, 7, 1)], None).unwrap();
        assert_eq!(blocks(&w, &twos).unwrap().classes.len(), 4);
        let w1 = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &vec![q(&b, 1, 1); 3], q(&b, 1, 1)).unwrap();
        assert_eq!(blocks(&w1, &ones).unwrap().classes, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn sparseness_examples() {
        let b = Basis::rationals();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 10, 1), q(&b, 1, 1), q(&b, 12, 1)], q(&b, 1, 1)).unwrap();
        assert_eq!(sparseness_profile(&w, &[q(&b, 9, 1)]).unwrap(), vec![true]);
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 5, 1), q(&b, 1, 1), q(&b, 4, 1)], q(&b, 1, 1)).unwrap();
        assert_eq!(sparseness_profile(&w, &[q(&b, 9, 1)]).unwrap(), vec![false]);
        let c = CrossSectionWindow::new("c", Geometry::Circle { length: q(&b, 3, 1) }, vec![q(&b, 0, 1)], q(&b, 1, 1)).unwrap();
        assert_eq!(sparseness_profile(&c, &[q(&b, 1, 1)]), Err(OrbitError::NotApplicable));
    }

    #[test]
    fn translation() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let w = CrossSectionWindow::from_gaps("a", q(&b, 0, 1), &[q(&b, 1, 1), s2.clone()], q(&b, 1, 2)).unwrap();
        let r = q(&b, 7, 3);
        let t = translate(&w, &r).unwrap();
        assert_eq!(gaps(&t).unwrap(), gaps(&w).unwrap());
        assert_eq!(translate(&t, &-&r).unwrap(), w);
        let len = q(&b, 5, 1);
        let c = CrossSectionWindow::new("c", Geometry::Circle { length: len.clone() }, vec![q(&b, 0, 1), s2.clone()], q(&b, 1, 2))
            .unwrap();
        assert_eq!(translate(&c, &len).unwrap(), c);
        let rot = translate(&c, &q(&b, 4, 1)).unwrap();
        assert_eq!(rot.points(), &[&s2 - &q(&b, 1, 1), q(&b, 4, 1)]);
        let ones = DistanceSet::finite(vec![q(&b, 1, 1)], None).unwrap();
        assert_eq!(blocks(&t, &ones).unwrap(), blocks(&w, &ones).unwrap());
    }
}
