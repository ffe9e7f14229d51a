use serde::{Deserialize, Serialize};

use super::ChainError;
use crate::numeric::{Interval, PlMap, Scalar};

/// Closed boxes `[c_i, c_{i+1}]` covering a domain. A point on a shared
/// boundary belongs to the lower-index box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxPartition {
    cuts: Vec<Scalar>,
    diam: Scalar,
}

impl BoxPartition {
    pub fn from_cuts(cuts: Vec<Scalar>) -> Result<Self, ChainError> {
        if cuts.len() < 2 || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ChainError::Resolution("cut points must be strictly ascending, at least two".into()));
        }
        let diam = cuts.windows(2).map(|w| &w[1] - &w[0]).max().expect("at least one box");
        Ok(BoxPartition { cuts, diam })
    }

    /// `n` equal boxes.
    pub fn uniform(domain: &Interval, n: usize) -> Result<Self, ChainError> {
        if n == 0 || domain.diameter().is_zero() {
            return Err(ChainError::Resolution("uniform partition needs n > 0 and a nondegenerate domain".into()));
        }
        let width = domain.diameter() / Scalar::int(n as i64);
        let cuts = (0..=n).map(|i| domain.lo() + &width * Scalar::int(i as i64)).collect();
        BoxPartition::from_cuts(cuts)
    }

    /// Smallest power-of-two uniform partition fine enough that Inner-mode
    /// chains at `eps` exist between boxes joined by genuine steps:
    /// `diam * (L + 3) / 2 < eps`, `L` the largest absolute slope.
    pub fn for_eps(map: &PlMap, eps: &Scalar) -> Result<Self, ChainError> {
        let (_, lip) = map.slope_bounds();
        Self::finer_than(map, &(eps * Scalar::int(2) / (lip + Scalar::int(3))))
    }

    /// Smallest power-of-two uniform partition with box diameter `< bound`.
    pub fn finer_than(map: &PlMap, bound: &Scalar) -> Result<Self, ChainError> {
        if !bound.is_positive() {
            return Err(ChainError::Resolution(format!("diameter bound {bound} must be positive")));
        }
        let dom = map.domain();
        let mut n: usize = 1;
        while dom.diameter() / Scalar::int(n as i64) >= *bound {
            n = n.checked_mul(2).ok_or_else(|| ChainError::Size("partition too fine".into()))?;
            if n > 1 << 24 {
                return Err(ChainError::Size(format!("partition would exceed {} boxes", 1 << 24)));
            }
        }
        BoxPartition::uniform(&dom, n)
    }

    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cuts(&self) -> &[Scalar] {
        &self.cuts
    }

    pub fn diam(&self) -> &Scalar {
        &self.diam
    }

    pub fn domain(&self) -> Interval {
        Interval::spanning(self.cuts[0].clone(), self.cuts[self.len()].clone())
    }

    pub fn get(&self, i: usize) -> Interval {
        Interval::spanning(self.cuts[i].clone(), self.cuts[i + 1].clone())
    }

    pub fn rep(&self, i: usize) -> Scalar {
        self.cuts[i].midpoint(&self.cuts[i + 1])
    }

    /// Index of the box owning `x`, or `None` outside the domain.
    pub fn box_of(&self, x: &Scalar) -> Option<usize> {
        if x < &self.cuts[0] || x > &self.cuts[self.len()] {
            return None;
        }
        // first cut >= x, excluding cut 0
        let j = self.cuts[1..].partition_point(|c| c < x);
        Some(j.min(self.len() - 1))
    }

    /// Sorted, deduplicated owners of the given points.
    pub fn boxes_of(&self, points: &[Scalar]) -> Result<Vec<usize>, ChainError> {
        let mut out = points
            .iter()
            .map(|p| self.box_of(p).ok_or_else(|| ChainError::Precondition(format!("{p} outside the partition"))))
            .collect::<Result<Vec<_>, _>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Boxes at distance `< r` from the closed interval `j` (`r > 0`).
    pub fn boxes_near(&self, j: &Interval, r: &Scalar) -> std::ops::Range<usize> {
        let lo = j.lo() - r;
        let hi = j.hi() + r;
        // box i qualifies iff cuts[i+1] > lo and cuts[i] < hi
        let start = self.cuts[1..].partition_point(|c| c <= &lo);
        let end = self.cuts[..self.len()].partition_point(|c| c < &hi);
        start..end.max(start)
    }

    /// Boxes whose representative lies in the open interval `(y - r, y + r)`.
    pub fn reps_near(&self, y: &Scalar, r: &Scalar) -> std::ops::Range<usize> {
        let lo = y - r;
        let hi = y + r;
        let n = self.len();
        let start = partition_point_by(n, |i| self.rep(i) <= lo);
        let end = partition_point_by(n, |i| self.rep(i) < hi);
        start..end.max(start)
    }
}

fn partition_point_by(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
