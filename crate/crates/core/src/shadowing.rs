//! Constructive shadowing with exact final hits: reverse tracking for the
//! slope-2 tent map, inverse-branch nesting for expanding PL maps, splicing
//! for shifts of finite type, and a range-based obstruction certificate.

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::numeric::{Budget, Interval, NumericError, PlMap, Scalar};
use crate::pseudo_orbit::{verify_h_shadow, OrbitError, PseudoOrbit};
use crate::symbolic::{ShiftPresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShadowError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("map is not expanding: minimal |slope| {0} <= 1")]
    NotExpanding(Scalar),
    #[error("the {eps}-ball around state {index} crosses a turning point")]
    Lap { index: usize, eps: Scalar },
    #[error("inverse-branch nest emptied at state {index}")]
    EmptyNest { index: usize },
    #[error("blocks {index} and {next} do not overlap in k-1 symbols or are not allowed")]
    Overlap { index: usize, next: usize },
    #[error("h-shadowing splices need a shift of finite type; got a sofic presentation")]
    Sofic,
    #[error("result failed re-verification")]
    Verification,
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// The shadowing point: a rational, or a word for shift spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShadowPoint {
    Point(Scalar),
    Stream { word: Word, text: String },
}

impl Serialize for ShadowPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ShadowPoint::Point(x) => x.serialize(s),
            ShadowPoint::Stream { text, .. } => s.serialize_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowResult {
    pub z: ShadowPoint,
    pub epsilon: Scalar,
    pub exact_hit: bool,
    /// Piece index used for each backward step, in forward order.
    pub branches: Vec<usize>,
}

impl ShadowResult {
    pub fn point(&self) -> Option<&Scalar> {
        match &self.z {
            ShadowPoint::Point(x) => Some(x),
            ShadowPoint::Stream { .. } => None,
        }
    }
}

/// Safe tolerance for reverse tracking under the slope-2 tent map.
pub fn lambda_star() -> Scalar {
    Scalar::new(1, 4)
}

/// Given `|T^n(x) - y| < δ`, pulls `y` back along the preimages closest to
/// the orbit of `x` (ties toward the smaller preimage). The result `z`
/// satisfies `T^n(z) = y` and `|T^i(x) - T^i(z)| < 2δ` for `i <= n`.
pub fn reverse_track_tent2(x: &Scalar, y: &Scalar, n: usize, delta: &Scalar) -> Result<ShadowResult, ShadowError> {
    let t = PlMap::tent2();
    let pre = |m: String| Err(ShadowError::Precondition(m));
    if n == 0 {
        return pre("n must be positive".into());
    }
    if !delta.is_positive() || delta >= &lambda_star() {
        return pre(format!("need 0 < δ < {}", lambda_star()));
    }
    if !t.in_domain(x) || !t.in_domain(y) {
        return pre("x and y must lie in [0, 1]".into());
    }
    let orbit = t.orbit(x, n, &Budget::unlimited())?;
    if orbit[n].dist(y) >= *delta {
        return pre(format!("|T^n(x) - y| = {} is not below δ", orbit[n].dist(y)));
    }
    let mut cur = y.clone();
    let mut branches = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let target = &orbit[i];
        let best = t
            .preimages(&cur)
            .into_iter()
            .min_by(|a, b| a.dist(target).cmp(&b.dist(target)).then(a.cmp(b)))
            .ok_or(ShadowError::EmptyNest { index: i })?;
        branches.push(t.piece_of(&best)?);
        cur = best;
    }
    branches.reverse();
    let two_delta = delta * Scalar::int(2);
    let mut states = orbit[..n].to_vec();
    states.push(y.clone());
    let po = PseudoOrbit::new(states)?;
    if !verify_h_shadow(&t, &po, &cur, &two_delta) {
        return Err(ShadowError::Verification);
    }
    Ok(ShadowResult { z: ShadowPoint::Point(cur), epsilon: two_delta, exact_hit: true, branches })
}

/// `δ = ε (μ - 1) / μ` with `μ` the minimal absolute slope.
pub fn delta_for_eps(map: &PlMap, eps: &Scalar) -> Result<Scalar, ShadowError> {
    let (mu, _) = map.slope_bounds();
    if mu <= Scalar::one() {
        return Err(ShadowError::NotExpanding(mu));
    }
    Ok(eps * (&mu - Scalar::one()) / mu)
}

/// h-shadowing for an expanding PL map by backward nesting: `y_m = x_m`,
/// then `y_i` is the preimage of `y_{i+1}` on the lap containing the closed
/// `ε`-ball around `x_i`, required to stay strictly within `ε` of `x_i`.
pub fn h_shadow_expanding(map: &PlMap, po: &PseudoOrbit<Scalar>, eps: &Scalar) -> Result<ShadowResult, ShadowError> {
    delta_for_eps(map, eps)?;
    if !eps.is_positive() {
        return Err(ShadowError::Precondition("epsilon must be positive".into()));
    }
    let laps = map.laps();
    let xs = po.states();
    let m = xs.len() - 1;
    let mut cur = xs[m].clone();
    if !map.in_domain(&cur) {
        return Err(ShadowError::Precondition(format!("final state {cur} outside the domain")));
    }
    let mut branches = Vec::with_capacity(m);
    for i in (0..m).rev() {
        let lap = map
            .lap_containing(&Interval::ball(&xs[i], eps))
            .ok_or_else(|| ShadowError::Lap { index: i, eps: eps.clone() })?;
        let prev = map.inverse_on_lap(&laps[lap], &cur).ok_or(ShadowError::EmptyNest { index: i })?;
        if prev.dist(&xs[i]) >= *eps {
            return Err(ShadowError::EmptyNest { index: i });
        }
        branches.push(map.piece_of(&prev)?);
        cur = prev;
    }
    branches.reverse();
    if !verify_h_shadow(map, po, &cur, eps) {
        return Err(ShadowError::Verification);
    }
    Ok(ShadowResult { z: ShadowPoint::Point(cur), epsilon: eps.clone(), exact_hit: true, branches })
}

/// Splices a chain of overlapping `k`-blocks into one word and extends it
/// by the least allowed continuation of length `k`. The `i`-th shift agrees
/// with `b_i` on `k` symbols, so the word `2^{-(k-1)}`-shadows the chain and
/// hits the last block exactly.
pub fn sft_h_shadow(shift: &ShiftPresentation, blocks: &[Word], k: usize) -> Result<ShadowResult, ShadowError> {
    let sft = shift.as_sft().ok_or(ShadowError::Sofic)?;
    if k == 0 || blocks.is_empty() {
        return Err(ShadowError::Precondition("need k >= 1 and at least one block".into()));
    }
    if sft.memory() > k {
        return Err(ShadowError::Precondition(format!("memory {} exceeds k = {k}", sft.memory())));
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.len() != k || !shift.is_allowed(b) {
            return Err(ShadowError::Overlap { index: i, next: i });
        }
    }
    let mut word = blocks[0].clone();
    for (i, w) in blocks.windows(2).enumerate() {
        if w[0][1..] != w[1][..k - 1] {
            return Err(ShadowError::Overlap { index: i, next: i + 1 });
        }
        word.push(w[1][k - 1]);
        if !shift.is_allowed(&word) {
            return Err(ShadowError::Overlap { index: i, next: i + 1 });
        }
    }
    for _ in 0..k {
        let next = (0..shift.alphabet().len() as u8).find(|&s| {
            let mut w = word.clone();
            w.push(s);
            shift.is_allowed(&w)
        });
        match next {
            Some(s) => word.push(s),
            None => return Err(ShadowError::Precondition("no allowed continuation".into())),
        }
    }
    let eps = Scalar::dyadic(k as u32 - 1);
    let po = PseudoOrbit::new(blocks.to_vec())?;
    if !verify_h_shadow(shift, &po, &word, &eps) {
        return Err(ShadowError::Verification);
    }
    let text = shift.alphabet().render(&word);
    Ok(ShadowResult { z: ShadowPoint::Stream { word, text }, epsilon: eps, exact_hit: true, branches: Vec::new() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum NegativeCert {
    /// The final state is outside the exact range of `f^m`.
    Impossible { reason: String, range: Interval, last: Scalar, steps: usize },
    Inconclusive { range: Interval, steps: usize },
}

impl NegativeCert {
    pub fn is_impossible(&self) -> bool {
        matches!(self, NegativeCert::Impossible { .. })
    }
}

/// Exact range of `f^m` over the whole domain.
pub fn range_of_iterate(map: &PlMap, m: usize) -> Result<Interval, NumericError> {
    let mut range = map.domain();
    for _ in 0..m {
        let next = map.image_interval(&range)?;
        if next == range {
            break;
        }
        range = next;
    }
    Ok(range)
}

/// No point can hit `x_m` exactly after `m` steps when `x_m` lies outside
/// the range of `f^m`, whatever `ε` is.
pub fn negative_h_shadow_cert(map: &PlMap, po: &PseudoOrbit<Scalar>, _eps: &Scalar) -> Result<NegativeCert, ShadowError> {
    let m = po.len() - 1;
    let range = range_of_iterate(map, m)?;
    let last = po.last().clone();
    if range.contains(&last) {
        Ok(NegativeCert::Inconclusive { range, steps: m })
    } else {
        let reason = format!("x_{m} = {last} lies outside f^{m}(domain) = {range}");
        Ok(NegativeCert::Impossible { reason, range, last, steps: m })
    }
}

/// Pseudo-orbit of the tent map with slope 3/2 whose last state overshoots
/// the critical value by `δ/2`: `{2/9, 1/3, 1/2, 3/4 + δ/2}`.
pub fn overshoot_pseudo_orbit(delta: &Scalar) -> PseudoOrbit<Scalar> {
    let last = Scalar::new(3, 4) + delta / Scalar::int(2);
    PseudoOrbit::new(vec![Scalar::new(2, 9), Scalar::new(1, 3), Scalar::new(1, 2), last]).expect("nonempty")
}

pub fn negative_cert_json(cert: &NegativeCert) -> Value {
    json!(cert)
}
