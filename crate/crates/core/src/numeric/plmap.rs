use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Budget, Interval, NumericError, Scalar};

/// A continuous piecewise-linear self-map of `[c_0, c_m]`, given by its
/// breakpoints `c_0 < ... < c_m` and the values `v_i = f(c_i)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawPlMap", into = "RawPlMap")]
pub struct PlMap {
    breakpoints: Vec<Scalar>,
    values: Vec<Scalar>,
    slopes: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct RawPlMap {
    breakpoints: Vec<Scalar>,
    values: Vec<Scalar>,
}

impl TryFrom<RawPlMap> for PlMap {
    type Error = NumericError;
    fn try_from(raw: RawPlMap) -> Result<Self, Self::Error> {
        PlMap::new(raw.breakpoints, raw.values)
    }
}

impl From<PlMap> for RawPlMap {
    fn from(map: PlMap) -> Self {
        RawPlMap { breakpoints: map.breakpoints, values: map.values }
    }
}

/// A maximal interval on which the map is monotone (or constant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lap {
    pub interval: Interval,
    /// `Greater` for increasing, `Less` for decreasing, `Equal` for flat.
    pub direction: Ordering,
    pub first_piece: usize,
    pub last_piece: usize,
}

impl PlMap {
    pub fn new(breakpoints: Vec<Scalar>, values: Vec<Scalar>) -> Result<Self, NumericError> {
        if breakpoints.len() < 2 {
            return Err(NumericError::Parameter("need at least two breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(NumericError::Parameter(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NumericError::Parameter("breakpoints must be strictly ascending".into()));
        }
        let (lo, hi) = (&breakpoints[0], &breakpoints[breakpoints.len() - 1]);
        if let Some(v) = values.iter().find(|v| *v < lo || *v > hi) {
            return Err(NumericError::Parameter(format!(
                "value {v} leaves the domain [{lo}, {hi}]; not a self-map"
            )));
        }
        let slopes = breakpoints
            .windows(2)
            .zip(values.windows(2))
            .map(|(c, v)| (&v[1] - &v[0]) / (&c[1] - &c[0]))
            .collect();
        Ok(PlMap { breakpoints, values, slopes })
    }

    /// Tent map with apex `λ/2` at `1/2` on `[0, 1]`, for `1 < λ <= 2`.
    pub fn tent(lambda: Scalar) -> Result<Self, NumericError> {
        if lambda <= Scalar::one() || lambda > Scalar::int(2) {
            return Err(NumericError::Parameter(format!("tent slope {lambda} outside (1, 2]")));
        }
        let half = Scalar::new(1, 2);
        PlMap::new(
            vec![Scalar::zero(), half.clone(), Scalar::one()],
            vec![Scalar::zero(), &lambda * &half, Scalar::zero()],
        )
    }

    /// The full tent map with slope 2.
    pub fn tent2() -> Self {
        PlMap::tent(Scalar::int(2)).expect("slope 2 is a valid tent parameter")
    }

    /// The topologically exact seven-piece map of `[-2, 2]` through
    /// `(-2,2), (-3/2,-2), (-1,0), (-1/2,-2), (1/2,2), (1,0), (3/2,2), (2,-2)`.
    pub fn exact_map() -> Self {
        let pts: [(i64, i64, i64); 8] =
            [(-2, 1, 2), (-3, 2, -2), (-1, 1, 0), (-1, 2, -2), (1, 2, 2), (1, 1, 0), (3, 2, 2), (2, 1, -2)];
        let (bps, vals) = pts.iter().map(|&(p, q, v)| (Scalar::new(p, q), Scalar::int(v))).unzip();
        PlMap::new(bps, vals).expect("exact map data is a valid self-map")
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn slopes(&self) -> &[Scalar] {
        &self.slopes
    }

    pub fn piece_count(&self) -> usize {
        self.slopes.len()
    }

    pub fn domain(&self) -> Interval {
        Interval::spanning(self.breakpoints[0].clone(), self.breakpoints[self.breakpoints.len() - 1].clone())
    }

    pub fn in_domain(&self, x: &Scalar) -> bool {
        &self.breakpoints[0] <= x && x <= &self.breakpoints[self.breakpoints.len() - 1]
    }

    /// Piece `[c_i, c_{i+1}]` containing `x`; shared breakpoints go to the lower piece.
    pub fn piece_of(&self, x: &Scalar) -> Result<usize, NumericError> {
        if !self.in_domain(x) {
            return Err(NumericError::Domain(format!("{x} outside {}", self.domain())));
        }
        // first breakpoint index >= x, minus one
        let idx = self.breakpoints.partition_point(|c| c < x);
        Ok(idx.saturating_sub(1).min(self.piece_count() - 1))
    }

    fn eval_on_piece(&self, i: usize, x: &Scalar) -> Scalar {
        &self.values[i] + &self.slopes[i] * (x - &self.breakpoints[i])
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar, NumericError> {
        let i = self.piece_of(x)?;
        Ok(self.eval_on_piece(i, x))
    }

    /// `f^n(x)`, checking the budget after every step.
    pub fn iterate(&self, x: &Scalar, n: usize, budget: &Budget) -> Result<Scalar, NumericError> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
            budget.check(&y)?;
        }
        Ok(y)
    }

    /// `[x, f(x), ..., f^n(x)]`.
    pub fn orbit(&self, x: &Scalar, n: usize, budget: &Budget) -> Result<Vec<Scalar>, NumericError> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for _ in 0..n {
            let next = self.eval(out.last().expect("nonempty"))?;
            budget.check(&next)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Exact image `f(J)`: extremes over the endpoints and interior breakpoints.
    pub fn image_interval(&self, j: &Interval) -> Result<Interval, NumericError> {
        let a = self.eval(j.lo())?;
        let b = self.eval(j.hi())?;
        let mut lo = Scalar::min_of(&a, &b).clone();
        let mut hi = Scalar::max_of(&a, &b).clone();
        for (c, v) in self.breakpoints.iter().zip(&self.values) {
            if j.contains_interior(c) {
                if v < &lo {
                    lo = v.clone();
                }
                if v > &hi {
                    hi = v.clone();
                }
            }
        }
        Ok(Interval::spanning(lo, hi))
    }

    /// All solutions of `f(z) = y`, ascending and deduplicated. Empty when
    /// `y` is outside the range of the map.
    pub fn preimages(&self, y: &Scalar) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::new();
        for i in 0..self.piece_count() {
            let (v0, v1) = (&self.values[i], &self.values[i + 1]);
            let range = Interval::spanning(v0.clone(), v1.clone());
            if !range.contains(y) {
                continue;
            }
            if self.slopes[i].is_zero() {
                // a flat piece at height y: its whole interval solves; report endpoints
                out.push(self.breakpoints[i].clone());
                out.push(self.breakpoints[i + 1].clone());
            } else {
                out.push(&self.breakpoints[i] + (y - v0) / &self.slopes[i]);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Exact `(min |s_i|, max |s_i|)` over the pieces.
    pub fn slope_bounds(&self) -> (Scalar, Scalar) {
        let abs: Vec<Scalar> = self.slopes.iter().map(Scalar::abs).collect();
        let min = abs.iter().min().expect("at least one piece").clone();
        let max = abs.iter().max().expect("at least one piece").clone();
        (min, max)
    }

    /// Strictly expanding: every piece has `|slope| > 1`.
    pub fn is_expanding(&self) -> bool {
        self.slope_bounds().0 > Scalar::one()
    }

    /// Maximal monotone laps, left to right.
    pub fn laps(&self) -> Vec<Lap> {
        let dir = |i: usize| self.slopes[i].cmp(&Scalar::zero());
        let mut laps = Vec::new();
        let mut start = 0;
        for i in 1..=self.piece_count() {
            if i == self.piece_count() || dir(i) != dir(start) {
                laps.push(Lap {
                    interval: Interval::spanning(self.breakpoints[start].clone(), self.breakpoints[i].clone()),
                    direction: dir(start),
                    first_piece: start,
                    last_piece: i - 1,
                });
                start = i;
            }
        }
        laps
    }

    /// Interior breakpoints where the direction of monotonicity changes.
    pub fn critical_points(&self) -> Vec<Scalar> {
        let laps = self.laps();
        laps.iter().skip(1).map(|l| l.interval.lo().clone()).collect()
    }

    /// Index of a lap containing `J ∩ domain`, if any.
    pub fn lap_containing(&self, j: &Interval) -> Option<usize> {
        let clipped = j.intersect(&self.domain())?;
        self.laps().iter().position(|l| l.interval.contains_interval(&clipped))
    }

    /// The unique `z` in a strictly monotone lap with `f(z) = y`.
    pub fn inverse_on_lap(&self, lap: &Lap, y: &Scalar) -> Option<Scalar> {
        if lap.direction == Ordering::Equal {
            return None;
        }
        (lap.first_piece..=lap.last_piece).find_map(|i| {
            let range = Interval::spanning(self.values[i].clone(), self.values[i + 1].clone());
            range
                .contains(y)
                .then(|| &self.breakpoints[i] + (y - &self.values[i]) / &self.slopes[i])
        })
    }

    /// All `|slope|` equal and `> 1`, and every turning point maps to an
    /// endpoint of the domain.
    pub fn validate_uniform_pl(&self) -> bool {
        let (min, max) = self.slope_bounds();
        if min != max || min <= Scalar::one() {
            return false;
        }
        let dom = self.domain();
        self.critical_points().iter().all(|c| {
            let v = self.eval(c).expect("critical point lies in the domain");
            &v == dom.lo() || &v == dom.hi()
        })
    }
}
