use std::fmt;

use serde::{Deserialize, Serialize};

use super::{NumericError, Scalar};

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self, NumericError> {
        if lo > hi {
            return Err(NumericError::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// Hull of two arbitrary scalars.
    pub fn spanning(a: Scalar, b: Scalar) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Closed ball `[c - r, c + r]`.
    pub fn ball(center: &Scalar, radius: &Scalar) -> Self {
        Interval::spanning(center - radius, center + radius)
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn diameter(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `x` lies strictly between the endpoints.
    pub fn contains_interior(&self, x: &Scalar) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = Scalar::max_of(&self.lo, &other.lo).clone();
        let hi = Scalar::min_of(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: Scalar::min_of(&self.lo, &other.lo).clone(),
            hi: Scalar::max_of(&self.hi, &other.hi).clone(),
        }
    }

    /// Gap between two intervals; zero when they meet.
    pub fn distance(&self, other: &Interval) -> Scalar {
        if other.lo > self.hi {
            &other.lo - &self.hi
        } else if self.lo > other.hi {
            &self.lo - &other.hi
        } else {
            Scalar::zero()
        }
    }

    /// Distance from a point to the interval.
    pub fn distance_to(&self, x: &Scalar) -> Scalar {
        self.distance(&Interval::point(x.clone()))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn rejects_reversed_endpoints() {
        assert!(Interval::new(q(1, 2), q(1, 3)).is_err());
        assert!(Interval::new(q(1, 2), q(1, 2)).is_ok());
    }

    #[test]
    fn distance_and_intersection() {
        let a = Interval::new(q(0, 1), q(1, 4)).unwrap();
        let b = Interval::new(q(1, 2), q(1, 1)).unwrap();
        assert_eq!(a.distance(&b), q(1, 4));
        assert_eq!(b.distance(&a), q(1, 4));
        assert!(a.intersect(&b).is_none());
        let c = Interval::new(q(1, 8), q(3, 4)).unwrap();
        assert_eq!(a.intersect(&c).unwrap(), Interval::new(q(1, 8), q(1, 4)).unwrap());
        assert_eq!(a.distance(&c), Scalar::zero());
        assert_eq!(a.hull(&b).diameter(), Scalar::one());
    }
}
