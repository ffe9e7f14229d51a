use std::collections::BTreeSet;

use serde::Serialize;

use super::transition::{build_block_graph, build_eps_graph, is_ict, IctVerdict, Mode};
use super::{BoxPartition, ChainError};
use crate::graph::Digraph;
use crate::numeric::{PlMap, Scalar};
use crate::par::Execution;
use crate::symbolic::{ShiftPresentation, Word};

/// A finite prefix of an asymptotic pseudo-orbit together with the defect
/// schedule it was built against. `schedule[n]` bounds the gap from state
/// `n` to state `n + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticPrefix<P> {
    pub states: Vec<P>,
    pub schedule: Vec<Scalar>,
    /// First index of the final stage; the tail from here on realizes the
    /// finest resolution.
    pub burn_in: usize,
    pub stage_starts: Vec<usize>,
}

/// Closed walk in `g` from `start` visiting every vertex in ascending order
/// and returning to `start` with at least one step.
fn tour(g: &Digraph, start: usize) -> Result<Vec<usize>, ChainError> {
    let mut walk = vec![start];
    let mut cur = start;
    for target in 0..g.len() {
        if target == cur {
            continue;
        }
        let p = g.shortest_path(cur, target).ok_or(ChainError::NoPath { from: cur, to: target })?;
        walk.extend_from_slice(&p[1..]);
        cur = target;
    }
    let back = g.shortest_path(cur, start).ok_or(ChainError::NoPath { from: cur, to: start })?;
    walk.extend_from_slice(&back[1..]);
    Ok(walk)
}

fn require_yes(v: IctVerdict, k: usize) -> Result<(), ChainError> {
    if v.is_yes() {
        Ok(())
    } else {
        Err(ChainError::Precondition(format!("stage {k}: ICT verdict is {}", v.name())))
    }
}

/// Interval-map version: stage `k` tours the boxes of `lambda` on the
/// partition prescribed for `ε_k = 2^{-k}`, stepping between box midpoints
/// along Inner edges. Each tour starts at the box of `lambda[0]`; the last
/// step of a tour lands on the next stage's start midpoint.
pub fn build_asymptotic_pseudo_orbit_interval(
    map: &PlMap,
    lambda: &[Scalar],
    depth: usize,
    exec: Execution,
) -> Result<(AsymptoticPrefix<Scalar>, BoxPartition), ChainError> {
    if lambda.is_empty() || depth == 0 {
        return Err(ChainError::Precondition("need a nonempty set and depth >= 1".into()));
    }
    let mut out = AsymptoticPrefix { states: Vec::new(), schedule: Vec::new(), burn_in: 0, stage_starts: Vec::new() };
    let mut last_partition = None;
    for k in 1..=depth {
        let eps = Scalar::dyadic(k as u32);
        let partition = BoxPartition::for_eps(map, &eps)?;
        let s = partition.boxes_of(lambda)?;
        let inner = build_eps_graph(map, &partition, &eps, Mode::Inner, exec)?;
        let outer = build_eps_graph(map, &partition, &eps, Mode::Outer, exec)?;
        require_yes(is_ict(&inner, &outer, &s)?, k)?;
        let (sub, idx) = inner.graph.induced(&s);
        let start = idx.binary_search(&partition.box_of(&lambda[0]).expect("boxes_of succeeded")).expect("in S");
        let walk = tour(&sub, start)?;
        out.stage_starts.push(out.states.len());
        let keep = if k == depth { walk.len() } else { walk.len() - 1 };
        for &v in &walk[..keep] {
            out.states.push(partition.rep(idx[v]));
            out.schedule.push(eps.clone());
        }
        last_partition = Some(partition);
    }
    out.schedule.pop();
    out.burn_in = *out.stage_starts.last().expect("depth >= 1");
    Ok((out, last_partition.expect("depth >= 1")))
}

/// Shift version for a subsystem `lambda` given by its own presentation:
/// stage `k` tours the `k`-blocks of `lambda` along its block graph, each
/// state a `k`-block, with defect at most `2^{-(k-1)}`. Stage `k + 1` starts
/// at the least `(k+1)`-block extending the start block of stage `k`.
pub fn build_asymptotic_pseudo_orbit_shift(
    lambda: &ShiftPresentation,
    depth: usize,
) -> Result<AsymptoticPrefix<Word>, ChainError> {
    if depth == 0 {
        return Err(ChainError::Precondition("depth must be at least 1".into()));
    }
    let mut out = AsymptoticPrefix { states: Vec::new(), schedule: Vec::new(), burn_in: 0, stage_starts: Vec::new() };
    let mut start_block: Word = Vec::new();
    for k in 1..=depth {
        let inner = build_block_graph(lambda, None, k, Mode::Inner)?;
        let outer = inner.with_mode(Mode::Outer, Execution::Sequential)?;
        let all: Vec<usize> = (0..inner.len()).collect();
        if all.is_empty() {
            return Err(ChainError::Precondition("empty shift".into()));
        }
        require_yes(is_ict(&inner, &outer, &all)?, k)?;
        let super::transition::Phase::Shift { blocks, .. } = &inner.phase else { unreachable!() };
        let start = blocks
            .blocks
            .iter()
            .position(|b| b.starts_with(&start_block))
            .ok_or_else(|| ChainError::Precondition("start block does not extend".into()))?;
        start_block = blocks.blocks[start].clone();
        let walk = tour(&inner.graph, start)?;
        out.stage_starts.push(out.states.len());
        let keep = if k == depth { walk.len() } else { walk.len() - 1 };
        let eps = Scalar::dyadic(k as u32 - 1);
        for &v in &walk[..keep] {
            out.states.push(blocks.blocks[v].clone());
            out.schedule.push(eps.clone());
        }
    }
    out.schedule.pop();
    out.burn_in = *out.stage_starts.last().expect("depth >= 1");
    Ok(out)
}

/// Boxes visited by `states[burn_in..]`.
pub fn omega_of_sequence_interval(states: &[Scalar], burn_in: usize, partition: &BoxPartition) -> BTreeSet<usize> {
    states.iter().skip(burn_in).filter_map(|x| partition.box_of(x)).collect()
}

/// Leading `k`-blocks of `states[burn_in..]` (states shorter than `k` are skipped).
pub fn omega_of_sequence_shift(states: &[Word], burn_in: usize, k: usize) -> BTreeSet<Word> {
    states.iter().skip(burn_in).filter(|w| w.len() >= k).map(|w| w[..k].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use crate::pseudo_orbit::{is_asymptotic_prefix, PseudoOrbit};

    #[test]
    fn fixed_point_gives_stagewise_constant_sequence() {
        let t = PlMap::tent2();
        let (a, p) = build_asymptotic_pseudo_orbit_interval(&t, &[q(2, 3)], 4, Execution::Sequential).unwrap();
        let last = &a.states[a.burn_in..];
        assert!(last.iter().all(|x| x == &last[0]));
        assert_eq!(omega_of_sequence_interval(&a.states, a.burn_in, &p).len(), 1);
        let po = PseudoOrbit::new(a.states.clone()).unwrap();
        assert!(is_asymptotic_prefix(&t, &po, &a.schedule));
    }

    #[test]
    fn golden_mean_tail_blocks() {
        let gm = ShiftPresentation::golden_mean();
        let a = build_asymptotic_pseudo_orbit_shift(&gm, 4).unwrap();
        let po = PseudoOrbit::new(a.states.clone()).unwrap();
        assert!(is_asymptotic_prefix(&gm, &po, &a.schedule));
        assert_eq!(omega_of_sequence_shift(&a.states, a.burn_in, 4), gm.allowed_blocks(4).unwrap());
    }

    #[test]
    fn refuted_set_is_rejected() {
        let t = PlMap::tent2();
        let err = build_asymptotic_pseudo_orbit_interval(&t, &[q(0, 1), q(2, 3)], 2, Execution::Sequential);
        assert!(matches!(err, Err(ChainError::Precondition(_))));
    }
}
