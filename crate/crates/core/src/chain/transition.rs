use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{BoxPartition, ChainError};
use crate::graph::Digraph;
use crate::numeric::{PlMap, Scalar};
use crate::par::{self, Execution};
use crate::pseudo_orbit::{is_eps_pseudo_orbit, PseudoOrbit};
use crate::symbolic::{BlockGraph, ShiftPresentation, SubsystemSpec, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Over-approximation of the ε-step relation; used for refutations.
    Outer,
    /// Under-approximation among box representatives; used for witnesses.
    Inner,
}

/// What the vertices of a transition graph stand for.
#[derive(Clone, Debug)]
pub enum Phase {
    Interval { map: PlMap, partition: BoxPartition },
    Shift {
        ambient: ShiftPresentation,
        /// The subsystem whose words label the vertices, when given by a presentation.
        lambda: Option<ShiftPresentation>,
        blocks: BlockGraph,
    },
}

/// Finite-resolution ε-step relation.
///
/// For interval maps `eps` is the certification level: an Inner path is an
/// `eps`-chain of representatives, and a missing Outer connection rules out
/// `(eps - diam)`-chains. For `k`-block graphs the relation is exact: a
/// path is a `2^{-(k-1)}`-chain and any `2^{-k}`-chain inside the subsystem
/// follows a path, so `eps = 2^{-(k-1)}` and the refutation level is `2^{-k}`.
#[derive(Clone, Debug)]
pub struct TransitionGraph {
    pub graph: Digraph,
    pub mode: Mode,
    pub eps: Scalar,
    pub phase: Phase,
}

/// Interval-map graph on a box partition.
pub fn build_eps_graph(
    map: &PlMap,
    partition: &BoxPartition,
    eps: &Scalar,
    mode: Mode,
    exec: Execution,
) -> Result<TransitionGraph, ChainError> {
    if !eps.is_positive() {
        return Err(ChainError::Resolution(format!("epsilon {eps} must be positive")));
    }
    if partition.domain() != map.domain() {
        return Err(ChainError::Resolution("partition does not cover the map's domain".into()));
    }
    let adj: Vec<Vec<usize>> = match mode {
        Mode::Outer => {
            let images = par::map_range(exec, partition.len(), |i| map.image_interval(&partition.get(i)));
            images
                .into_iter()
                .map(|img| Ok(partition.boxes_near(&img?, eps).collect()))
                .collect::<Result<_, ChainError>>()?
        }
        Mode::Inner => {
            let slack = eps - partition.diam();
            if !slack.is_positive() {
                return Err(ChainError::Resolution(format!(
                    "inner mode needs epsilon {eps} above the box diameter {}",
                    partition.diam()
                )));
            }
            let images = par::map_range(exec, partition.len(), |i| map.eval(&partition.rep(i)));
            images
                .into_iter()
                .map(|y| Ok(partition.reps_near(&y?, &slack).collect()))
                .collect::<Result<_, ChainError>>()?
        }
    };
    Ok(TransitionGraph {
        graph: Digraph::from_adjacency(adj),
        mode,
        eps: eps.clone(),
        phase: Phase::Interval { map: map.clone(), partition: partition.clone() },
    })
}

/// `k`-block graph of a subsystem (or of the whole shift when `lambda` is `None`).
pub fn build_block_graph(
    ambient: &ShiftPresentation,
    lambda: Option<&SubsystemSpec>,
    k: usize,
    mode: Mode,
) -> Result<TransitionGraph, ChainError> {
    let blocks = match lambda {
        Some(spec) => ambient.restrict_blocks(spec, k)?,
        None => ambient.block_graph(k)?,
    };
    let lambda = match lambda {
        Some(SubsystemSpec::Presentation(p)) => Some(p.clone()),
        None => Some(ambient.clone()),
        Some(SubsystemSpec::Blocks(_)) => None,
    };
    Ok(TransitionGraph {
        graph: blocks.graph.clone(),
        mode,
        eps: Scalar::dyadic(k as u32 - 1),
        phase: Phase::Shift { ambient: ambient.clone(), lambda, blocks },
    })
}

impl TransitionGraph {
    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Level below which a missing Outer connection rules out chains.
    pub fn refutation_eps(&self) -> Scalar {
        match &self.phase {
            Phase::Interval { partition, .. } => &self.eps - partition.diam(),
            Phase::Shift { blocks, .. } => Scalar::dyadic(blocks.k as u32),
        }
    }

    pub fn vertex_label(&self, v: usize) -> String {
        match &self.phase {
            Phase::Interval { partition, .. } => partition.get(v).to_string(),
            Phase::Shift { ambient, blocks, .. } => ambient.alphabet().render(&blocks.blocks[v]),
        }
    }

    fn same_source(&self, other: &TransitionGraph) -> bool {
        if self.eps != other.eps || self.len() != other.len() {
            return false;
        }
        match (&self.phase, &other.phase) {
            (Phase::Interval { map: a, partition: p }, Phase::Interval { map: b, partition: r }) => a == b && p == r,
            (Phase::Shift { blocks: a, .. }, Phase::Shift { blocks: b, .. }) => a == b,
            _ => false,
        }
    }

    /// Same vertex set and ε, the other mode. Shift graphs are exact, so the
    /// edges are shared.
    pub fn with_mode(&self, mode: Mode, exec: Execution) -> Result<TransitionGraph, ChainError> {
        match &self.phase {
            Phase::Interval { map, partition } => build_eps_graph(map, partition, &self.eps, mode, exec),
            Phase::Shift { .. } => Ok(TransitionGraph { mode, ..self.clone() }),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transitions {\n");
        let _ = writeln!(out, "  label=\"{:?} eps={}\";", self.mode, self.eps);
        for v in 0..self.len() {
            let _ = writeln!(out, "  {v} [label=\"{}\"];", self.vertex_label(v));
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "  {u} -> {v};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode,
            "epsilon": self.eps,
            "vertices": (0..self.len()).map(|v| self.vertex_label(v)).collect::<Vec<_>>(),
            "edges": self.graph.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        })
    }
}

/// Chain states in the graph's phase space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainStates {
    Points(Vec<Scalar>),
    Words(Vec<Word>),
}

/// An explicit ε-pseudo-orbit between two vertices, already verified.
#[derive(Clone, Debug, Serialize)]
pub struct ChainCertificate {
    pub from: usize,
    pub to: usize,
    pub epsilon: Scalar,
    /// States rendered as `"p/q"` or as words.
    pub states: Vec<String>,
    #[serde(skip)]
    pub raw: ChainStates,
}

impl ChainCertificate {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Shortest Inner-mode chain from `u` to `v` (length `>= 1`), optionally
/// confined to `within`.
pub fn chain(graph: &TransitionGraph, within: Option<&[usize]>, u: usize, v: usize) -> Result<ChainCertificate, ChainError> {
    if graph.mode != Mode::Inner {
        return Err(ChainError::Mode("chains are read off Inner-mode graphs".into()));
    }
    let path = match within {
        None => graph.graph.shortest_path(u, v),
        Some(subset) => {
            let (sub, map) = graph.graph.induced(subset);
            let (Ok(iu), Ok(iv)) = (map.binary_search(&u), map.binary_search(&v)) else {
                return Err(ChainError::Precondition("chain endpoints must lie in the subset".into()));
            };
            sub.shortest_path(iu, iv).map(|p| p.into_iter().map(|i| map[i]).collect())
        }
    };
    let path = path.ok_or(ChainError::NoPath { from: u, to: v })?;
    certificate_from_path(graph, &path)
}

fn certificate_from_path(graph: &TransitionGraph, path: &[usize]) -> Result<ChainCertificate, ChainError> {
    let (from, to) = (path[0], *path.last().expect("nonempty path"));
    let fail = || ChainError::Precondition("emitted chain failed re-verification".into());
    match &graph.phase {
        Phase::Interval { map, partition } => {
            let pts: Vec<Scalar> = path.iter().map(|&b| partition.rep(b)).collect();
            let po = PseudoOrbit::new(pts.clone())?;
            if !is_eps_pseudo_orbit(map, &po, &graph.eps) {
                return Err(fail());
            }
            Ok(ChainCertificate {
                from,
                to,
                epsilon: graph.eps.clone(),
                states: pts.iter().map(Scalar::to_string).collect(),
                raw: ChainStates::Points(pts),
            })
        }
        Phase::Shift { ambient, lambda, blocks } => {
            let k = blocks.k;
            let mut words: Vec<Word> = path
                .windows(2)
                .map(|w| {
                    let mut m = blocks.blocks[w[0]].clone();
                    m.push(blocks.blocks[w[1]][k - 1]);
                    m
                })
                .collect();
            words.push(blocks.blocks[to].clone());
            let system = lambda.as_ref().unwrap_or(ambient);
            let po = PseudoOrbit::new(words.clone())?;
            if !is_eps_pseudo_orbit(system, &po, &graph.eps) {
                return Err(fail());
            }
            Ok(ChainCertificate {
                from,
                to,
                epsilon: graph.eps.clone(),
                states: words.iter().map(|w| ambient.alphabet().render(w)).collect(),
                raw: ChainStates::Words(words),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum IctVerdict {
    /// Inner subgraph on `S` strongly connected with every vertex on a cycle.
    Yes { epsilon: Scalar },
    /// Outer subgraph on `S` splits; no chains at level `refuted_below`.
    No { refuted_below: Scalar, components: Vec<Vec<usize>> },
    Unknown { epsilon: Scalar },
}

impl IctVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            IctVerdict::Yes { .. } => "yes",
            IctVerdict::No { .. } => "no",
            IctVerdict::Unknown { .. } => "unknown",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, IctVerdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, IctVerdict::No { .. })
    }
}

fn normalized(s: &[usize], n: usize) -> Result<Vec<usize>, ChainError> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(ChainError::Precondition("the vertex subset must be nonempty".into()));
    }
    if s.last().is_some_and(|&v| v >= n) {
        return Err(ChainError::Precondition("vertex out of range".into()));
    }
    Ok(s)
}

fn is_ict_subgraph(g: &Digraph) -> bool {
    g.is_strongly_connected() && g.cyclic_vertices().len() == g.len()
}

/// Two-sided ICT certification of the vertex set `s`.
pub fn is_ict(inner: &TransitionGraph, outer: &TransitionGraph, s: &[usize]) -> Result<IctVerdict, ChainError> {
    if inner.mode != Mode::Inner || outer.mode != Mode::Outer {
        return Err(ChainError::Mode("is_ict needs an Inner graph and an Outer graph, in that order".into()));
    }
    if !inner.same_source(outer) {
        return Err(ChainError::Mode("Inner and Outer graphs describe different partitions".into()));
    }
    let s = normalized(s, inner.len())?;
    let (sub_in, _) = inner.graph.induced(&s);
    if is_ict_subgraph(&sub_in) {
        return Ok(IctVerdict::Yes { epsilon: inner.eps.clone() });
    }
    let (sub_out, map) = outer.graph.induced(&s);
    if !is_ict_subgraph(&sub_out) {
        let components = sub_out.sccs().into_iter().map(|c| c.into_iter().map(|i| map[i]).collect()).collect();
        return Ok(IctVerdict::No { refuted_below: outer.refutation_eps(), components });
    }
    Ok(IctVerdict::Unknown { epsilon: inner.eps.clone() })
}

/// Chains witnessing a `Yes` verdict: from the first vertex of `s` to every
/// vertex (itself included) and back, at most `limit` in total.
pub fn ict_certificates(inner: &TransitionGraph, s: &[usize], limit: usize) -> Result<Vec<ChainCertificate>, ChainError> {
    let s = normalized(s, inner.len())?;
    let hub = s[0];
    let mut out = Vec::new();
    for &v in &s {
        if out.len() >= limit {
            break;
        }
        out.push(chain(inner, Some(&s), hub, v)?);
        if v != hub && out.len() < limit {
            out.push(chain(inner, Some(&s), v, hub)?);
        }
    }
    Ok(out)
}

/// Verdict JSON: `{"verdict", "epsilon", "mode", "certificates", ...}`.
pub fn verdict_json(verdict: &IctVerdict, inner: &TransitionGraph, certificates: &[ChainCertificate]) -> Value {
    let mut v = json!({
        "verdict": verdict.name(),
        "epsilon": inner.eps,
        "mode": match verdict { IctVerdict::No { .. } => Mode::Outer, _ => Mode::Inner },
        "certificates": certificates,
    });
    if let IctVerdict::No { refuted_below, components } = verdict {
        v["refuted_below"] = json!(refuted_below);
        v["components"] = json!(components);
    }
    if let Phase::Interval { partition, .. } = &inner.phase {
        v["boxes"] = json!(partition.len());
        v["diameter"] = json!(partition.diam());
    }
    if let Phase::Shift { blocks, .. } = &inner.phase {
        v["k"] = json!(blocks.k);
    }
    v
}

/// No nonempty proper subset of `s` is absorbing in the induced subgraph.
pub fn attractor_free_check(graph: &TransitionGraph, s: &[usize]) -> bool {
    let Ok(s) = normalized(s, graph.len()) else { return false };
    let (sub, _) = graph.graph.induced(&s);
    let terminal = sub.terminal_components();
    terminal.len() == 1 && terminal[0].len() == sub.len()
}

/// Necessary condition for invariance: every vertex of `s` has an in-edge
/// and an out-edge inside `s`.
pub fn invariance_check_graph(graph: &TransitionGraph, s: &[usize]) -> bool {
    let Ok(s) = normalized(s, graph.len()) else { return false };
    let (sub, _) = graph.graph.induced(&s);
    let mut has_in = vec![false; sub.len()];
    for (_, v) in sub.edges() {
        has_in[v] = true;
    }
    (0..sub.len()).all(|v| has_in[v] && !sub.successors(v).is_empty())
}

/// Vertices lying on a directed cycle.
pub fn chain_recurrent_vertices(graph: &TransitionGraph) -> Vec<usize> {
    graph.graph.cyclic_vertices()
}

/// Inner and Outer graphs plus the verdict for a finite point set of an
/// interval map, on the partition prescribed for `eps`.
pub fn certify_points(
    map: &PlMap,
    points: &[Scalar],
    eps: &Scalar,
    partition: Option<BoxPartition>,
    exec: Execution,
) -> Result<(TransitionGraph, TransitionGraph, Vec<usize>, IctVerdict), ChainError> {
    let partition = match partition {
        Some(p) => p,
        None => BoxPartition::for_eps(map, eps)?,
    };
    let s = partition.boxes_of(points)?;
    let inner = build_eps_graph(map, &partition, eps, Mode::Inner, exec)?;
    let outer = build_eps_graph(map, &partition, eps, Mode::Outer, exec)?;
    let verdict = is_ict(&inner, &outer, &s)?;
    Ok((inner, outer, s, verdict))
}

/// Verdict for a subsystem's `k`-block graph.
pub fn certify_blocks(
    ambient: &ShiftPresentation,
    lambda: Option<&SubsystemSpec>,
    k: usize,
) -> Result<(TransitionGraph, IctVerdict), ChainError> {
    let inner = build_block_graph(ambient, lambda, k, Mode::Inner)?;
    if inner.is_empty() {
        return Err(ChainError::Precondition("the subsystem has no blocks".into()));
    }
    let outer = inner.with_mode(Mode::Outer, Execution::Sequential)?;
    let all: Vec<usize> = (0..inner.len()).collect();
    let verdict = is_ict(&inner, &outer, &all)?;
    Ok((inner, verdict))
}
