use serde::{Deserialize, Serialize};

use super::ChainError;
use crate::graph::Digraph;
use crate::numeric::Scalar;

/// Largest `Λ` accepted by the brute-force checks.
pub const MAX_SUBSET: usize = 20;

/// A finite metric space with a self-map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct FiniteModel {
    map: Vec<usize>,
    metric: Vec<Vec<Scalar>>,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    map: Vec<usize>,
    metric: Vec<Vec<Scalar>>,
}

impl TryFrom<RawModel> for FiniteModel {
    type Error = ChainError;

    fn try_from(raw: RawModel) -> Result<Self, ChainError> {
        FiniteModel::new(raw.map, raw.metric)
    }
}

impl From<FiniteModel> for RawModel {
    fn from(m: FiniteModel) -> Self {
        RawModel { map: m.map, metric: m.metric }
    }
}

impl FiniteModel {
    /// Checks totality of the map and the metric axioms.
    pub fn new(map: Vec<usize>, metric: Vec<Vec<Scalar>>) -> Result<Self, ChainError> {
        let n = map.len();
        let bad = |m: &str| Err(ChainError::Precondition(format!("finite model: {m}")));
        if n == 0 {
            return bad("no points");
        }
        if map.iter().any(|&y| y >= n) {
            return bad("map leaves the space");
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return bad("metric table has the wrong shape");
        }
        for i in 0..n {
            for j in 0..n {
                let d = &metric[i][j];
                if d.is_negative() || (i == j) != d.is_zero() || d != &metric[j][i] {
                    return bad("metric is not a metric");
                }
                if metric[i].iter().zip(&metric).any(|(ik, row_k)| &(ik + &row_k[j]) < d) {
                    return bad("triangle inequality fails");
                }
            }
        }
        Ok(FiniteModel { map, metric })
    }

    /// Points at distinct positions on a line with `d(x, y) = |x - y|`.
    pub fn on_line(positions: &[Scalar], map: Vec<usize>) -> Result<Self, ChainError> {
        let metric = positions.iter().map(|a| positions.iter().map(|b| a.dist(b)).collect()).collect();
        FiniteModel::new(map, metric)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn distance(&self, x: usize, y: usize) -> &Scalar {
        &self.metric[x][y]
    }

    fn subset(&self, lambda: &[usize]) -> Result<Vec<usize>, ChainError> {
        let mut s = lambda.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(ChainError::Precondition("Λ must be nonempty".into()));
        }
        if s.len() > MAX_SUBSET {
            return Err(ChainError::Size(format!("|Λ| = {} exceeds {MAX_SUBSET}", s.len())));
        }
        if s.iter().any(|&x| x >= self.len()) {
            return Err(ChainError::Precondition("Λ contains a point outside the model".into()));
        }
        Ok(s)
    }
}

/// Weak incompressibility by enumeration: every nonempty proper `M ⊂ Λ`
/// meets `f(Λ \ M)`. Closures are trivial in a finite space.
pub fn wi_bruteforce(model: &FiniteModel, lambda: &[usize]) -> Result<bool, ChainError> {
    let s = model.subset(lambda)?;
    let n = s.len();
    // bit of f(x) inside Λ, or 0 when f(x) leaves Λ
    let image_bit: Vec<u32> = s
        .iter()
        .map(|&x| s.binary_search(&model.image(x)).map_or(0, |i| 1u32 << i))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for m in 1..full {
        let mut img = 0u32;
        for (i, bit) in image_bit.iter().enumerate() {
            if m & (1 << i) == 0 {
                img |= bit;
            }
        }
        if img & m == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Internal chain transitivity at a resolution below every positive
/// distance, where ε-chains are exact orbit segments: every ordered pair of
/// `Λ` is joined by an orbit path of length `>= 1` staying in `Λ`.
pub fn ict_finite(model: &FiniteModel, lambda: &[usize]) -> Result<bool, ChainError> {
    let s = model.subset(lambda)?;
    let edges = s.iter().enumerate().filter_map(|(i, &x)| s.binary_search(&model.image(x)).ok().map(|j| (i, j)));
    let g = Digraph::from_edges(s.len(), edges);
    Ok(g.is_strongly_connected() && g.cyclic_vertices().len() == s.len())
}

/// `f(Λ) = Λ` exactly.
pub fn invariance_check_finite(model: &FiniteModel, lambda: &[usize]) -> bool {
    let mut s = lambda.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.iter().any(|&x| x >= model.len()) {
        return false;
    }
    let mut img: Vec<usize> = s.iter().map(|&x| model.image(x)).collect();
    img.sort_unstable();
    img.dedup();
    img == s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(map: Vec<usize>) -> FiniteModel {
        let pos: Vec<Scalar> = (0..map.len()).map(|i| Scalar::int(i as i64)).collect();
        FiniteModel::on_line(&pos, map).unwrap()
    }

    #[test]
    fn three_cycle() {
        let m = line(vec![1, 2, 0]);
        assert!(wi_bruteforce(&m, &[0, 1, 2]).unwrap());
        assert!(ict_finite(&m, &[0, 1, 2]).unwrap());
        assert!(invariance_check_finite(&m, &[0, 1, 2]));
    }

    #[test]
    fn cycle_plus_fixed_point() {
        let m = line(vec![1, 2, 0, 3]);
        assert!(!wi_bruteforce(&m, &[0, 1, 2, 3]).unwrap());
        assert!(!ict_finite(&m, &[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn single_fixed_point() {
        let m = line(vec![0, 0]);
        assert!(wi_bruteforce(&m, &[0]).unwrap());
        assert!(ict_finite(&m, &[0]).unwrap());
    }

    #[test]
    fn agree_on_every_subset_of_size_at_least_two() {
        let m = line(vec![1, 2, 0, 0, 5, 4, 6]);
        for mask in 1u32..(1 << 7) {
            let lambda: Vec<usize> = (0..7).filter(|i| mask & (1 << i) != 0).collect();
            if lambda.len() >= 2 {
                assert_eq!(wi_bruteforce(&m, &lambda).unwrap(), ict_finite(&m, &lambda).unwrap(), "{lambda:?}");
            }
        }
    }

    /// A singleton whose point is not fixed has no nonempty proper closed
    /// subset, so incompressibility holds vacuously while no chain of length
    /// at least one returns to the point inside the set.
    #[test]
    fn non_fixed_singleton_separates_the_two_notions() {
        let m = line(vec![1, 0]);
        assert!(wi_bruteforce(&m, &[0]).unwrap());
        assert!(!ict_finite(&m, &[0]).unwrap());
        assert!(!invariance_check_finite(&m, &[0]));
    }

    #[test]
    fn pair_escaping_is_not_invariant() {
        let m = line(vec![1, 2, 2]);
        assert!(!invariance_check_finite(&m, &[0, 1]));
    }

    #[test]
    fn size_guard() {
        let m = line((0..25).map(|i| (i + 1) % 25).collect());
        let all: Vec<usize> = (0..25).collect();
        assert!(matches!(wi_bruteforce(&m, &all), Err(ChainError::Size(_))));
        assert!(matches!(ict_finite(&m, &all), Err(ChainError::Size(_))));
    }

    #[test]
    fn metric_axioms_are_enforced() {
        let z = Scalar::zero;
        let one = Scalar::one;
        let bad = vec![vec![z(), one()], vec![Scalar::int(2), z()]];
        assert!(FiniteModel::new(vec![0, 1], bad).is_err());
        let tri = vec![
            vec![z(), one(), Scalar::int(5)],
            vec![one(), z(), one()],
            vec![Scalar::int(5), one(), z()],
        ];
        assert!(FiniteModel::new(vec![0, 1, 2], tri).is_err());
    }
}
