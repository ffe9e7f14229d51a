//! ω-limit sets: sampling them at finite resolution, realizing certified
//! chain-transitive sets as ω-limit sets of explicit points (symbol streams
//! for shifts of finite type, nested interval enclosures for expanding PL
//! maps), and machine-checked obstructions for the sets that cannot be
//! realized.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chain::{self, is_ict, BoxPartition, ChainError, IctVerdict, Mode};
use crate::graph::Digraph;
use crate::numeric::{Budget, Interval, NumericError, PlMap, Scalar};
use crate::par::Execution;
use crate::pseudo_orbit::{is_eps_pseudo_orbit, PseudoOrbit};
use crate::shadowing::{delta_for_eps, h_shadow_expanding, ShadowError};
use crate::symbolic::{ConstraintCertificate, ShiftPresentation, SubsystemSpec, Symbol, Word};

pub use crate::chain::{omega_of_sequence_interval, omega_of_sequence_shift};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("realizations inside strictly sofic presentations are not constructed")]
    Sofic,
    #[error("turning point too close to the set: {0}")]
    Lap(String),
    #[error("nest emptied at stage {stage}, index {index}")]
    EmptyNest { stage: usize, index: usize },
    #[error("final diameter {achieved} exceeds the target {target}")]
    Precision { achieved: String, target: String },
    #[error("forward verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Shadow(#[from] ShadowError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Boxes hit by `f^n(x)` for `burn <= n < burn + keep`. This samples the
/// orbit tail: it can miss ω-limit boxes visited later and include boxes
/// the orbit has not yet left for good.
pub fn omega_approx_interval(
    map: &PlMap,
    x: &Scalar,
    burn: usize,
    keep: usize,
    partition: &BoxPartition,
    budget: &Budget,
) -> Result<BTreeSet<usize>, RealizeError> {
    let orbit = map.orbit(x, burn + keep, budget)?;
    Ok(orbit[burn..burn + keep].iter().filter_map(|y| partition.box_of(y)).collect())
}

/// `k`-blocks of a stream prefix starting at positions `burn..burn + keep`.
pub fn omega_approx_shift(stream: &[Symbol], burn: usize, keep: usize, k: usize) -> Result<BTreeSet<Word>, RealizeError> {
    if k == 0 || stream.len() < burn + keep + k - 1 {
        return Err(RealizeError::Precondition(format!(
            "stream prefix of length {} is too short for burn {burn}, keep {keep}, k {k}",
            stream.len()
        )));
    }
    Ok((burn..burn + keep).map(|i| stream[i..i + k].to_vec()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub k: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    pub gap_bound: usize,
}

/// An infinite symbol stream: a finite head followed by a repeated cycle.
/// Every position starts a `level`-block of `Λ`.
#[derive(Clone, Debug)]
pub struct SymbolStream {
    shift: ShiftPresentation,
    level: usize,
    head: Word,
    cycle: Word,
    pub schedule: Vec<ScheduleEntry>,
}

impl SymbolStream {
    pub fn symbol(&self, i: usize) -> Symbol {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn render(&self, n: usize) -> String {
        self.shift.alphabet().render(&self.prefix(n))
    }

    pub fn to_json(&self, prefix_len: usize) -> Value {
        json!({
            "kind": "stream",
            "prefix": self.render(prefix_len),
            "head_length": self.head.len(),
            "cycle_length": self.cycle.len(),
            "schedule": self.schedule,
        })
    }
}

fn tour_stage(g: &Digraph, blocks: &[Word], anchor: usize, k: usize) -> Result<Vec<usize>, RealizeError> {
    let mut targets: Vec<&[Symbol]> = blocks.iter().map(|b| &b[..k]).collect();
    targets.dedup();
    let mut walk = vec![anchor];
    let mut cur = anchor;
    for t in targets {
        let p = g
            .shortest_path_where(cur, 0, |v| blocks[v].starts_with(t))
            .ok_or_else(|| RealizeError::Precondition("block graph is not strongly connected".into()))?;
        walk.extend_from_slice(&p[1..]);
        cur = *walk.last().expect("nonempty walk");
    }
    let back = g
        .shortest_path(cur, anchor)
        .ok_or_else(|| RealizeError::Precondition("block graph is not strongly connected".into()))?;
    walk.extend_from_slice(&back[1..]);
    walk.pop();
    Ok(walk)
}

/// Realizes a chain-transitive shift of finite type `Λ` as the ω-limit set
/// of a stream in `Λ`: stage `k` visits every `k`-block and returns to the
/// anchor block, and the last stage repeats forever.
pub fn realize_sft(lambda: &ShiftPresentation, k_max: usize) -> Result<SymbolStream, RealizeError> {
    let sft = lambda.as_sft().ok_or(RealizeError::Sofic)?;
    if k_max == 0 {
        return Err(RealizeError::Precondition("k_max must be positive".into()));
    }
    let level = k_max.max(sft.memory());
    for k in 1..=level {
        let (_, verdict) = chain::certify_blocks(lambda, None, k)?;
        if !verdict.is_yes() {
            return Err(RealizeError::Precondition(format!("k = {k}: ICT verdict is {}", verdict.name())));
        }
    }
    let bg = lambda.block_graph(level).map_err(ChainError::from)?;
    let anchor = 0;
    let stages: Vec<Vec<usize>> =
        (1..=k_max).map(|k| tour_stage(&bg.graph, &bg.blocks, anchor, k)).collect::<Result<_, _>>()?;
    let first = |v: &usize| bg.blocks[*v][0];
    let head: Word = stages[..k_max - 1].iter().flatten().map(first).collect();
    let cycle: Word = stages[k_max - 1].iter().map(first).collect();
    let lens: Vec<usize> = stages.iter().map(Vec::len).collect();
    let mut ends = Vec::with_capacity(k_max);
    let mut acc = 0;
    for l in &lens {
        acc += l;
        ends.push(acc);
    }
    let schedule = (1..=k_max)
        .map(|k| {
            let gap = (k - 1..k_max)
                .map(|j| lens[j] + if j + 1 < k_max { lens[j + 1] } else { lens[k_max - 1] })
                .max()
                .expect("k <= k_max");
            ScheduleEntry { k, n_k: ends[k - 1], gap_bound: gap + level }
        })
        .collect();
    Ok(SymbolStream { shift: lambda.clone(), level, head, cycle, schedule })
}

/// One stage of a nested realization.
#[derive(Clone, Debug, Serialize)]
pub struct NestStage {
    pub k: usize,
    pub epsilon: Scalar,
    /// Shadowing radius used along this stage's tour.
    pub radius: Scalar,
    pub delta: Scalar,
    pub boxes: usize,
    /// Indices `start..=end` of the committed states.
    pub start: usize,
    pub end: usize,
    /// Admissible starting points after committing to stages `1..=k`.
    pub interval: Interval,
    /// h-shadow of stages `1..=k` landing exactly on the final state.
    pub witness: Scalar,
    /// For each point of `S`, an index in this stage's window where the
    /// whole image of the final enclosure lies within `epsilon` of it.
    pub visits: Vec<(Scalar, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalNest {
    pub domain: Interval,
    pub stages: Vec<NestStage>,
    pub commitments: Vec<Scalar>,
}

impl IntervalNest {
    pub fn enclosure(&self) -> &Interval {
        &self.stages.last().expect("at least one stage").interval
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "nest",
            "intervals": std::iter::once(json!({"k": 0, "lo": self.domain.lo(), "hi": self.domain.hi(), "diameter": self.domain.diameter()}))
                .chain(self.stages.iter().map(|s| json!({
                    "k": s.k, "lo": s.interval.lo(), "hi": s.interval.hi(), "diameter": s.interval.diameter(),
                    "epsilon": s.epsilon, "radius": s.radius, "witness": s.witness,
                    "visits": s.visits.iter().map(|(p, n)| json!({"point": p, "index": n})).collect::<Vec<_>>(),
                })))
                .collect::<Vec<_>>(),
            "schedule": self.stages.iter().map(|s| ScheduleEntry { k: s.k, n_k: s.end, gap_bound: s.end - s.start }).collect::<Vec<_>>(),
        })
    }
}

/// Exact `{z in lap : f(z) in j}` for a strictly monotone lap.
fn preimage_on_lap(map: &PlMap, lap: &crate::numeric::Lap, j: &Interval) -> Option<Interval> {
    let image = map.image_interval(&lap.interval).ok()?;
    let j = j.intersect(&image)?;
    let a = map.inverse_on_lap(lap, j.lo())?;
    let b = map.inverse_on_lap(lap, j.hi())?;
    Some(Interval::spanning(a, b))
}

/// Realizes a finite set `S` of an expanding PL map as the ω-limit set of
/// any point of a nested enclosure, to depth `depth`.
///
/// Stage `k` tours the boxes of `S` at resolution `ε_k = 2^{-k}` as a
/// `δ_k`-pseudo-orbit that starts and ends exactly at `min S`; the tours are
/// concatenated and pulled back through inverse branches on closed balls of
/// radius `r_k = min(ε_k, margin) / 2`, where `margin` is the distance from
/// `S` to the turning points.
pub fn realize_expanding(
    map: &PlMap,
    set: &[Scalar],
    depth: usize,
    precision: &Scalar,
    budget: &Budget,
    exec: Execution,
) -> Result<IntervalNest, RealizeError> {
    let (mu, lip) = map.slope_bounds();
    delta_for_eps(map, &Scalar::one())?;
    if depth == 0 || set.is_empty() {
        return Err(RealizeError::Precondition("need depth >= 1 and a nonempty set".into()));
    }
    let mut s: Vec<Scalar> = set.to_vec();
    s.sort();
    s.dedup();
    if s.iter().any(|p| !map.in_domain(p)) {
        return Err(RealizeError::Precondition("set leaves the domain".into()));
    }
    let margin = map.critical_points().iter().flat_map(|c| s.iter().map(move |p| p.dist(c))).min();
    if margin.as_ref().is_some_and(Scalar::is_zero) {
        return Err(RealizeError::Lap("the set contains a turning point".into()));
    }
    let anchor = s[0].clone();
    let two = Scalar::int(2);
    let laps = map.laps();

    let mut commitments: Vec<Scalar> = Vec::new();
    // radius per committed index, assuming the nest is closed at the current stage
    let mut radii: Vec<Scalar> = Vec::new();
    let mut stages: Vec<NestStage> = Vec::new();
    for k in 1..=depth {
        let eps = Scalar::dyadic(k as u32);
        let r = match &margin {
            Some(m) => Scalar::min_of(&eps, m).clone() / &two,
            None => &eps / &two,
        };
        let delta = &r * (&mu - Scalar::one()) / &mu;
        let partition = BoxPartition::finer_than(map, &(&delta / (&lip + Scalar::one())))?;
        let diam = partition.diam().clone();
        let eps_chain = &delta - &lip * &diam / &two + &diam;
        let boxes = partition.boxes_of(&s)?;
        let inner = chain::build_eps_graph(map, &partition, &eps_chain, Mode::Inner, exec)?;
        let outer = chain::build_eps_graph(map, &partition, &eps_chain, Mode::Outer, exec)?;
        let verdict = is_ict(&inner, &outer, &boxes)?;
        if !verdict.is_yes() {
            return Err(RealizeError::Precondition(format!(
                "stage {k}: ICT verdict on the boxes of S is {}",
                verdict.name()
            )));
        }
        let (sub, idx) = inner.graph.induced(&boxes);
        let start = idx.binary_search(&partition.box_of(&anchor).expect("in domain")).expect("anchor box in S");
        let mut walk = vec![start];
        let mut cur = start;
        for target in 0..sub.len() {
            if target != cur {
                let p = sub.shortest_path(cur, target).ok_or(ChainError::NoPath { from: cur, to: target })?;
                walk.extend_from_slice(&p[1..]);
                cur = target;
            }
        }
        let back = sub.shortest_path(cur, start).ok_or(ChainError::NoPath { from: cur, to: start })?;
        walk.extend_from_slice(&back[1..]);
        let mut tour: Vec<Scalar> = walk[1..walk.len() - 1].iter().map(|&v| partition.rep(idx[v])).collect();
        tour.insert(0, anchor.clone());
        tour.push(anchor.clone());
        let tour_po = PseudoOrbit::new(tour.clone()).expect("nonempty");
        if !is_eps_pseudo_orbit(map, &tour_po, &delta) {
            return Err(RealizeError::Verification(format!("stage {k} tour is not a δ-pseudo-orbit")));
        }
        // this stage on its own is h-shadowable
        h_shadow_expanding(map, &tour_po, &r)?;

        let start_index = if commitments.is_empty() { 0 } else { commitments.len() - 1 };
        if commitments.is_empty() {
            commitments.push(anchor.clone());
            radii.push(r.clone());
        } else {
            *radii.last_mut().expect("nonempty") = r.clone();
        }
        for x in &tour[1..] {
            commitments.push(x.clone());
            radii.push(r.clone());
        }
        let end_index = commitments.len() - 1;

        // backward propagation of the closed-ball constraints
        let mut j = Interval::ball(&commitments[end_index], &radii[end_index])
            .intersect(&map.domain())
            .ok_or(RealizeError::EmptyNest { stage: k, index: end_index })?;
        let mut y = commitments[end_index].clone();
        for n in (0..end_index).rev() {
            let ball = Interval::ball(&commitments[n], &radii[n]);
            let lap = map
                .lap_containing(&ball)
                .ok_or_else(|| RealizeError::Lap(format!("ball around state {n} at stage {k}")))?;
            j = preimage_on_lap(map, &laps[lap], &j)
                .and_then(|p| p.intersect(&ball))
                .and_then(|p| p.intersect(&map.domain()))
                .ok_or(RealizeError::EmptyNest { stage: k, index: n })?;
            budget.check(j.lo())?;
            budget.check(j.hi())?;
            y = map.inverse_on_lap(&laps[lap], &y).ok_or(RealizeError::EmptyNest { stage: k, index: n })?;
            if y.dist(&commitments[n]) >= radii[n] {
                return Err(RealizeError::EmptyNest { stage: k, index: n });
            }
        }
        if let Some(prev) = stages.last() {
            if !prev.interval.contains_interval(&j) {
                return Err(RealizeError::Verification(format!("stage {k} enclosure escapes stage {}", k - 1)));
            }
        }
        if !j.contains(&y) {
            return Err(RealizeError::Verification(format!("stage {k} witness outside its enclosure")));
        }
        stages.push(NestStage {
            k,
            epsilon: eps,
            radius: r,
            delta,
            boxes: partition.len(),
            start: start_index,
            end: end_index,
            interval: j,
            witness: y,
            visits: Vec::new(),
        });
    }

    let last = stages.last().expect("depth >= 1").interval.clone();
    if last.diameter() > *precision {
        return Err(RealizeError::Precision { achieved: last.diameter().to_string(), target: precision.to_string() });
    }
    verify_forward(map, &s, &commitments, &radii, &mut stages, &last)?;
    Ok(IntervalNest { domain: map.domain(), stages, commitments })
}

/// Pushes the final enclosure forward exactly, checks every committed
/// closeness bound and records one `ε_k`-visit per point of `S` and stage.
fn verify_forward(
    map: &PlMap,
    s: &[Scalar],
    commitments: &[Scalar],
    radii: &[Scalar],
    stages: &mut [NestStage],
    enclosure: &Interval,
) -> Result<(), RealizeError> {
    let mut images = Vec::with_capacity(commitments.len());
    let mut x = enclosure.clone();
    for (n, (c, r)) in commitments.iter().zip(radii).enumerate() {
        if !Interval::ball(c, r).contains_interval(&x) {
            return Err(RealizeError::Verification(format!("image {n} leaves the committed ball")));
        }
        images.push(x.clone());
        if n + 1 < commitments.len() {
            x = map.image_interval(&x)?;
        }
    }
    for st in stages.iter_mut() {
        st.visits = s
            .iter()
            .map(|p| {
                (st.start..=st.end)
                    .find(|&n| images[n].lo().dist(p) < st.epsilon && images[n].hi().dist(p) < st.epsilon)
                    .map(|n| (p.clone(), n))
                    .ok_or_else(|| RealizeError::Verification(format!("stage {} never visits {p}", st.k)))
            })
            .collect::<Result<_, _>>()?;
        let po = PseudoOrbit::new(commitments[..=st.end].to_vec()).expect("nonempty");
        let mut y = st.witness.clone();
        for (n, c) in po.states().iter().enumerate() {
            if n > 0 {
                y = map.eval(&y)?;
            }
            let bound = if n == st.end { Scalar::zero() } else { radii[n].clone() };
            if (n == st.end && &y != c) || (n < st.end && y.dist(c) >= bound) {
                return Err(RealizeError::Verification(format!("stage {} witness misses state {n}", st.k)));
            }
        }
    }
    Ok(())
}

/// Nested realization for the slope-2 tent map.
pub fn realize_tent2(set: &[Scalar], depth: usize, precision: &Scalar) -> Result<IntervalNest, RealizeError> {
    realize_expanding(&PlMap::tent2(), set, depth, precision, &Budget::unlimited(), Execution::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizabilityExample {
    SoficIct,
    ExactMapH,
    GoldenMean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Realizability {
    Realizable,
    NotRealizable,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizabilityReport {
    pub example: RealizabilityExample,
    pub verdict: Realizability,
    pub obstruction: Value,
}

fn unsat_table(cert: &ConstraintCertificate, shift: &ShiftPresentation) -> Value {
    match cert {
        ConstraintCertificate::Unsat { reachable } => json!({
            "result": "unsat",
            "reachable": reachable
                .iter()
                .map(|(state, seen)| json!({"state": state, "seen": shift.alphabet().render(seen)}))
                .collect::<Vec<_>>(),
        }),
        ConstraintCertificate::Sat { witness } => json!({"result": "sat", "witness": shift.alphabet().render(witness)}),
    }
}

/// Machine-checked (non)realizability of the bundled examples.
pub fn nonrealizability_report(example: RealizabilityExample) -> Result<RealizabilityReport, RealizeError> {
    match example {
        RealizabilityExample::SoficIct => {
            let x = ShiftPresentation::bridged_loops();
            let lambda = SubsystemSpec::Presentation(ShiftPresentation::unbridged_loops());
            let sym = |c| x.alphabet().index(c).expect("symbol of the example");
            let cert = x.word_constraint_empty(&[sym('b'), sym('c')], &[sym('d')]);
            let ict: Vec<bool> = (1..=6)
                .map(|k| chain::certify_blocks(&x, Some(&lambda), k).map(|(_, v)| v.is_yes()))
                .collect::<Result<_, _>>()?;
            let verdict = if cert.is_unsat() && ict.iter().all(|&b| b) {
                Realizability::NotRealizable
            } else {
                Realizability::Undetermined
            };
            Ok(RealizabilityReport {
                example,
                verdict,
                obstruction: json!({
                    "constraint": "contains b and c, avoids d",
                    "certificate": unsat_table(&cert, &x),
                    "lambda_ict_k1_to_6": ict,
                    "argument": "every word of X containing both b and c contains d, so an orbit accumulating on b-blocks and c-blocks reads d infinitely often and its limit set contains a point with d, which lies outside the set",
                }),
            })
        }
        RealizabilityExample::ExactMapH => {
            let f = PlMap::exact_map();
            let q = Scalar::new;
            let left = f.image_interval(&Interval::spanning(q(0, 1), q(7, 4)))?;
            let right = f.image_interval(&Interval::spanning(q(7, 4), q(2, 1)))?;
            let ok = left == Interval::spanning(q(0, 1), q(2, 1)) && right == Interval::spanning(q(-2, 1), q(0, 1));
            Ok(RealizabilityReport {
                example,
                verdict: if ok { Realizability::NotRealizable } else { Realizability::Undetermined },
                obstruction: json!({
                    "image_0_7/4": left,
                    "image_7/4_2": right,
                    "hull_of_H": Interval::spanning(q(-1, 1), q(1, 1)),
                    "argument": "nonnegative points below 7/4 map to nonnegative points, so an orbit accumulating on both halves of H passes through (7/4, 2] infinitely often and has a limit point in [7/4, 2], outside H",
                }),
            })
        }
        RealizabilityExample::GoldenMean => {
            let stream = realize_sft(&ShiftPresentation::golden_mean(), 6)?;
            Ok(RealizabilityReport {
                example,
                verdict: Realizability::Realizable,
                obstruction: json!({"realization": stream.to_json(64)}),
            })
        }
    }
}

/// ICT verdict of a shift subsystem at each `k <= k_max`, for reports.
pub fn block_verdicts(
    ambient: &ShiftPresentation,
    lambda: Option<&SubsystemSpec>,
    k_max: usize,
) -> Result<Vec<IctVerdict>, RealizeError> {
    (1..=k_max).map(|k| Ok(chain::certify_blocks(ambient, lambda, k)?.1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn omega_approx_examples() {
        let t = PlMap::tent2();
        let p = BoxPartition::uniform(&t.domain(), 64).unwrap();
        let b = Budget::default();
        let fixed = omega_approx_interval(&t, &q(2, 3), 5, 10, &p, &b).unwrap();
        assert_eq!(fixed.into_iter().collect::<Vec<_>>(), vec![p.box_of(&q(2, 3)).unwrap()]);
        let cyc = omega_approx_interval(&t, &q(2, 7), 3, 9, &p, &b).unwrap();
        assert_eq!(cyc, p.boxes_of(&[q(2, 7), q(4, 7), q(6, 7)]).unwrap().into_iter().collect());
        let zeros = vec![0u8; 40];
        let blocks = omega_approx_shift(&zeros, 10, 20, 5).unwrap();
        assert_eq!(blocks.into_iter().collect::<Vec<_>>(), vec![vec![0u8; 5]]);
    }

    #[test]
    fn golden_mean_stream() {
        let gm = ShiftPresentation::golden_mean();
        let s = realize_sft(&gm, 4).unwrap();
        let w = s.prefix(2000);
        assert!(gm.is_allowed(&w));
        let blocks = gm.allowed_blocks(4).unwrap();
        let seen: BTreeSet<Word> = (1000..w.len() - 4).map(|i| w[i..i + 4].to_vec()).collect();
        assert_eq!(seen, blocks);
        assert!(s.schedule.windows(2).all(|p| p[0].n_k < p[1].n_k));
    }

    #[test]
    fn fixed_block_stream() {
        let zero = ShiftPresentation::sft(
            crate::symbolic::Alphabet::new(vec!['0', '1']).unwrap(),
            vec![vec![1]],
        )
        .unwrap();
        let s = realize_sft(&zero, 3).unwrap();
        assert!(s.prefix(50).iter().all(|&c| c == 0));
    }

    #[test]
    fn refused_cases() {
        assert!(matches!(realize_sft(&ShiftPresentation::fixed0_cycle01(), 2), Err(RealizeError::Precondition(_))));
        assert!(matches!(realize_sft(&ShiftPresentation::unbridged_loops(), 2), Err(RealizeError::Sofic)));
    }

    #[test]
    fn fixed_point_nest() {
        let n = realize_tent2(&[q(2, 3)], 5, &Scalar::one()).unwrap();
        let e = n.enclosure();
        assert!(e.contains(&q(2, 3)) || e.distance_to(&q(2, 3)) < Scalar::dyadic(5));
    }

    #[test]
    fn three_cycle_nest() {
        let n = realize_tent2(&[q(2, 7), q(4, 7), q(6, 7)], 4, &Scalar::one()).unwrap();
        for w in n.stages.windows(2) {
            assert!(w[0].interval.contains_interval(&w[1].interval));
        }
        assert!(n.stages.iter().all(|s| s.visits.len() == 3));
    }

    #[test]
    fn disjoint_cycles_are_refused() {
        let r = realize_tent2(&[q(2, 7), q(4, 7), q(6, 7), q(2, 3)], 3, &Scalar::one());
        assert!(matches!(r, Err(RealizeError::Precondition(_))), "{r:?}");
    }

    #[test]
    fn reports() {
        let r = nonrealizability_report(RealizabilityExample::SoficIct).unwrap();
        assert_eq!(r.verdict, Realizability::NotRealizable);
        let r = nonrealizability_report(RealizabilityExample::ExactMapH).unwrap();
        assert_eq!(r.verdict, Realizability::NotRealizable);
        let r = nonrealizability_report(RealizabilityExample::GoldenMean).unwrap();
        assert_eq!(r.verdict, Realizability::Realizable);
    }
}
