//! One-sided shift spaces presented either by finitely many forbidden words
//! (shifts of finite type) or by a labeled directed graph (sofic shifts).
//!
//! Words are stored as symbol indices into an [`Alphabet`]; the text form
//! uses one character per symbol. The metric on sequences is the cylinder
//! metric `d(x, y) = 2^{-i}` where `i` is the first index at which `x` and
//! `y` differ.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;
use crate::numeric::Scalar;

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

/// Default cap on `|alphabet|^k` for block enumeration.
pub const DEFAULT_BLOCK_CAP: u128 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("block enumeration too large: {size} candidate words exceeds cap {cap}")]
    Resource { size: u128, cap: u128 },
    #[error("not a subsystem: word {0:?} is not allowed in the ambient shift")]
    NotSubsystem(String),
    #[error("symbol {0:?} not in alphabet")]
    UnknownSymbol(char),
}

/// Finite ordered set of single-character symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self, ShiftError> {
        if symbols.is_empty() {
            return Err(ShiftError::Invalid("empty alphabet".into()));
        }
        if symbols.len() > Symbol::MAX as usize + 1 {
            return Err(ShiftError::Invalid("alphabet too large".into()));
        }
        let distinct: BTreeSet<char> = symbols.iter().copied().collect();
        if distinct.len() != symbols.len() {
            return Err(ShiftError::Invalid("repeated alphabet symbol".into()));
        }
        Ok(Alphabet { symbols })
    }

    pub fn from_tokens(tokens: &[String]) -> Result<Self, ShiftError> {
        let chars = tokens
            .iter()
            .map(|t| {
                let mut it = t.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(ShiftError::Invalid(format!("symbol token {t:?} must be one character"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(chars)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index(&self, c: char) -> Option<Symbol> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as Symbol)
    }

    pub fn char_of(&self, s: Symbol) -> char {
        self.symbols[s as usize]
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ShiftError> {
        text.chars().map(|c| self.index(c).ok_or(ShiftError::UnknownSymbol(c))).collect()
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.char_of(s)).collect()
    }

    pub fn tokens(&self) -> Vec<String> {
        self.symbols.iter().map(|c| c.to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub label: Symbol,
}

/// Shift of finite type given by forbidden words. `core` holds the
/// `memory`-blocks that begin at least one infinite allowed sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sft {
    alphabet: Alphabet,
    forbidden: Vec<Word>,
    memory: usize,
    core: Vec<Word>,
}

/// Sofic shift given by a labeled graph with every vertex having an out-edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sofic {
    alphabet: Alphabet,
    vertices: Vec<String>,
    edges: Vec<LabeledEdge>,
    out: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPresentation", into = "RawPresentation")]
pub enum ShiftPresentation {
    Sft(Sft),
    Sofic(Sofic),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawPresentation {
    Sft {
        alphabet: Vec<String>,
        forbidden: Vec<String>,
    },
    Sofic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<Vec<String>>,
        vertices: Vec<String>,
        edges: Vec<RawEdge>,
    },
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    from: String,
    to: String,
    label: String,
}

impl TryFrom<RawPresentation> for ShiftPresentation {
    type Error = ShiftError;
    fn try_from(raw: RawPresentation) -> Result<Self, ShiftError> {
        match raw {
            RawPresentation::Sft { alphabet, forbidden } => {
                let alphabet = Alphabet::from_tokens(&alphabet)?;
                let forbidden = forbidden.iter().map(|w| alphabet.parse_word(w)).collect::<Result<_, _>>()?;
                ShiftPresentation::sft(alphabet, forbidden)
            }
            RawPresentation::Sofic { alphabet, vertices, edges } => {
                let alphabet = match alphabet {
                    Some(tokens) => Alphabet::from_tokens(&tokens)?,
                    None => {
                        let labels: BTreeSet<String> = edges.iter().map(|e| e.label.clone()).collect();
                        Alphabet::from_tokens(&labels.into_iter().collect::<Vec<_>>())?
                    }
                };
                let vindex = |name: &str| {
                    vertices
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| ShiftError::Invalid(format!("unknown vertex {name:?}")))
                };
                let mut parsed = Vec::with_capacity(edges.len());
                for e in &edges {
                    let label = alphabet.parse_word(&e.label)?;
                    if label.len() != 1 {
                        return Err(ShiftError::Invalid(format!("edge label {:?} must be one symbol", e.label)));
                    }
                    parsed.push(LabeledEdge { from: vindex(&e.from)?, to: vindex(&e.to)?, label: label[0] });
                }
                ShiftPresentation::sofic(alphabet, vertices, parsed)
            }
        }
    }
}

impl From<ShiftPresentation> for RawPresentation {
    fn from(p: ShiftPresentation) -> Self {
        match p {
            ShiftPresentation::Sft(s) => RawPresentation::Sft {
                alphabet: s.alphabet.tokens(),
                forbidden: s.forbidden.iter().map(|w| s.alphabet.render(w)).collect(),
            },
            ShiftPresentation::Sofic(s) => RawPresentation::Sofic {
                alphabet: Some(s.alphabet.tokens()),
                edges: s
                    .edges
                    .iter()
                    .map(|e| RawEdge {
                        from: s.vertices[e.from].clone(),
                        to: s.vertices[e.to].clone(),
                        label: s.alphabet.char_of(e.label).to_string(),
                    })
                    .collect(),
                vertices: s.vertices,
            },
        }
    }
}

fn has_forbidden_suffix(word: &[Symbol], forbidden: &[Word]) -> bool {
    forbidden.iter().any(|f| word.ends_with(f))
}

fn check_cap(alphabet: usize, k: usize, cap: u128) -> Result<(), ShiftError> {
    let size = (alphabet as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > cap {
        Err(ShiftError::Resource { size, cap })
    } else {
        Ok(())
    }
}

impl Sft {
    /// Allowed means avoiding every forbidden factor; extendability is separate.
    fn clean_words(&self, k: usize) -> Vec<Word> {
        let n = self.alphabet.len() as Symbol;
        let mut out = Vec::new();
        let mut stack: Vec<Word> = vec![Vec::new()];
        // depth-first in reverse so that output is lexicographic
        while let Some(w) = stack.pop() {
            if w.len() == k {
                out.push(w);
                continue;
            }
            for s in (0..n).rev() {
                let mut next = w.clone();
                next.push(s);
                if !has_forbidden_suffix(&next, &self.forbidden) {
                    stack.push(next);
                }
            }
        }
        out
    }

    fn compute_core(&mut self) -> Result<(), ShiftError> {
        let blocks = self.clean_words(self.memory);
        let index: BTreeMap<&Word, usize> = blocks.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut alive = vec![true; blocks.len()];
        let succ: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                (0..self.alphabet.len() as Symbol)
                    .filter_map(|s| {
                        let mut ext = b.clone();
                        ext.push(s);
                        if has_forbidden_suffix(&ext, &self.forbidden) {
                            return None;
                        }
                        index.get(&ext[1..].to_vec()).copied()
                    })
                    .collect()
            })
            .collect();
        loop {
            let mut changed = false;
            for i in 0..blocks.len() {
                if alive[i] && !succ[i].iter().any(|&j| alive[j]) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.core = blocks.iter().zip(&alive).filter(|(_, &a)| a).map(|(b, _)| b.clone()).collect();
        if self.core.is_empty() {
            return Err(ShiftError::Invalid("the forbidden words exclude every infinite sequence".into()));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    /// Window length minus one: every constraint fits in `memory + 1` symbols.
    pub fn memory(&self) -> usize {
        self.memory
    }

    fn in_core(&self, block: &[Symbol]) -> bool {
        self.core.binary_search_by(|c| c.as_slice().cmp(block)).is_ok()
    }

    fn is_allowed(&self, word: &[Symbol]) -> bool {
        for end in 1..=word.len() {
            if has_forbidden_suffix(&word[..end], &self.forbidden) {
                return false;
            }
        }
        if word.len() >= self.memory {
            self.in_core(&word[word.len() - self.memory..])
        } else {
            self.core.iter().any(|c| c.starts_with(word))
        }
    }
}

impl Sofic {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// Vertices reachable by reading `s` from any vertex of `from`.
    fn step(&self, from: &[usize], s: Symbol) -> Vec<usize> {
        let mut next: Vec<usize> = from
            .iter()
            .flat_map(|&v| self.out[v].iter().map(|&e| &self.edges[e]))
            .filter(|e| e.label == s)
            .map(|e| e.to)
            .collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    fn is_allowed(&self, word: &[Symbol]) -> bool {
        let mut current: Vec<usize> = (0..self.vertices.len()).collect();
        for &s in word {
            current = self.step(&current, s);
            if current.is_empty() {
                return false;
            }
        }
        true
    }
}

impl ShiftPresentation {
    pub fn sft(alphabet: Alphabet, forbidden: Vec<Word>) -> Result<Self, ShiftError> {
        if forbidden.iter().any(Vec::is_empty) {
            return Err(ShiftError::Invalid("empty forbidden word".into()));
        }
        let max_len = forbidden.iter().map(Vec::len).max().unwrap_or(0);
        let mut sft = Sft { alphabet, forbidden, memory: max_len.saturating_sub(1).max(1), core: Vec::new() };
        sft.compute_core()?;
        Ok(ShiftPresentation::Sft(sft))
    }

    /// Builds a sofic presentation, pruning stranded vertices until every
    /// remaining vertex has an out-edge.
    pub fn sofic(alphabet: Alphabet, vertices: Vec<String>, edges: Vec<LabeledEdge>) -> Result<Self, ShiftError> {
        let n = vertices.len();
        if edges.iter().any(|e| e.from >= n || e.to >= n) {
            return Err(ShiftError::Invalid("edge endpoint out of range".into()));
        }
        if edges.iter().any(|e| e.label as usize >= alphabet.len()) {
            return Err(ShiftError::Invalid("edge label outside alphabet".into()));
        }
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] && !edges.iter().any(|e| e.from == v && alive[e.to]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut kept = Vec::new();
        for v in 0..n {
            if alive[v] {
                remap[v] = kept.len();
                kept.push(vertices[v].clone());
            }
        }
        if kept.is_empty() {
            return Err(ShiftError::Invalid("no vertex supports an infinite path".into()));
        }
        let edges: Vec<LabeledEdge> = edges
            .into_iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| LabeledEdge { from: remap[e.from], to: remap[e.to], label: e.label })
            .collect();
        let mut out = vec![Vec::new(); kept.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.from].push(i);
        }
        Ok(ShiftPresentation::Sofic(Sofic { alphabet, vertices: kept, edges, out }))
    }

    /// Parses from the JSON presentation format.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            ShiftPresentation::Sft(s) => &s.alphabet,
            ShiftPresentation::Sofic(s) => &s.alphabet,
        }
    }

    pub fn is_sft(&self) -> bool {
        matches!(self, ShiftPresentation::Sft(_))
    }

    pub fn as_sft(&self) -> Option<&Sft> {
        match self {
            ShiftPresentation::Sft(s) => Some(s),
            ShiftPresentation::Sofic(_) => None,
        }
    }

    /// `word` occurs in some point of the shift.
    pub fn is_allowed(&self, word: &[Symbol]) -> bool {
        if word.iter().any(|&s| s as usize >= self.alphabet().len()) {
            return false;
        }
        match self {
            ShiftPresentation::Sft(s) => s.is_allowed(word),
            ShiftPresentation::Sofic(s) => s.is_allowed(word),
        }
    }

    pub fn allowed_blocks(&self, k: usize) -> Result<BTreeSet<Word>, ShiftError> {
        self.allowed_blocks_capped(k, DEFAULT_BLOCK_CAP)
    }

    /// All length-`k` words of the language, in lexicographic order.
    pub fn allowed_blocks_capped(&self, k: usize, cap: u128) -> Result<BTreeSet<Word>, ShiftError> {
        check_cap(self.alphabet().len(), k, cap)?;
        match self {
            ShiftPresentation::Sft(s) => Ok(s.clean_words(k).into_iter().filter(|w| s.is_allowed(w)).collect()),
            ShiftPresentation::Sofic(s) => {
                let mut out = BTreeSet::new();
                let all: Vec<usize> = (0..s.vertices.len()).collect();
                let mut stack: Vec<(Word, Vec<usize>)> = vec![(Vec::new(), all)];
                while let Some((w, reach)) = stack.pop() {
                    if w.len() == k {
                        out.insert(w);
                        continue;
                    }
                    for sym in 0..s.alphabet.len() as Symbol {
                        let next = s.step(&reach, sym);
                        if !next.is_empty() {
                            let mut nw = w.clone();
                            nw.push(sym);
                            stack.push((nw, next));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn block_graph(&self, k: usize) -> Result<BlockGraph, ShiftError> {
        self.block_graph_capped(k, DEFAULT_BLOCK_CAP)
    }

    pub fn block_graph_capped(&self, k: usize, cap: u128) -> Result<BlockGraph, ShiftError> {
        if k == 0 {
            return Err(ShiftError::Invalid("block length must be positive".into()));
        }
        let blocks = self.allowed_blocks_capped(k, cap)?;
        let longer = self.allowed_blocks_capped(k + 1, cap)?;
        Ok(BlockGraph::from_blocks(k, blocks, longer.iter()))
    }

    /// Block graph of a subsystem `Λ` inside this shift.
    pub fn restrict_blocks(&self, lambda: &SubsystemSpec, k: usize) -> Result<BlockGraph, ShiftError> {
        if k == 0 {
            return Err(ShiftError::Invalid("block length must be positive".into()));
        }
        match lambda {
            SubsystemSpec::Presentation(sub) => {
                let translate = |w: &Word| -> Result<Word, ShiftError> {
                    let text = sub.alphabet().render(w);
                    let mapped = self.alphabet().parse_word(&text).map_err(|_| ShiftError::NotSubsystem(text.clone()))?;
                    if self.is_allowed(&mapped) {
                        Ok(mapped)
                    } else {
                        Err(ShiftError::NotSubsystem(text))
                    }
                };
                let blocks: BTreeSet<Word> =
                    sub.allowed_blocks(k)?.iter().map(translate).collect::<Result<_, _>>()?;
                let longer: BTreeSet<Word> =
                    sub.allowed_blocks(k + 1)?.iter().map(translate).collect::<Result<_, _>>()?;
                Ok(BlockGraph::from_blocks(k, blocks, longer.iter()))
            }
            SubsystemSpec::Blocks(words) => {
                let mut blocks = BTreeSet::new();
                for w in words {
                    if w.len() != k || !self.is_allowed(w) {
                        return Err(ShiftError::NotSubsystem(self.alphabet().render(w)));
                    }
                    blocks.insert(w.clone());
                }
                let merged: Vec<Word> = blocks
                    .iter()
                    .flat_map(|u| {
                        blocks.iter().filter(move |v| u[1..] == v[..k - 1]).map(move |v| {
                            let mut m = u.clone();
                            m.push(v[k - 1]);
                            m
                        })
                    })
                    .filter(|m| self.is_allowed(m))
                    .collect();
                Ok(BlockGraph::from_blocks(k, blocks, merged.iter()))
            }
        }
    }

    /// Decides whether some allowed word contains every symbol of `must_contain`
    /// while avoiding every symbol of `must_avoid`.
    pub fn word_constraint_empty(&self, must_contain: &[Symbol], must_avoid: &[Symbol]) -> ConstraintCertificate {
        ConstraintSearch::new(self, must_contain, must_avoid).run()
    }

    /// Golden-mean shift over `{0, 1}`: the word `11` is forbidden.
    pub fn golden_mean() -> Self {
        let a = Alphabet::new(vec!['0', '1']).expect("valid alphabet");
        ShiftPresentation::sft(a, vec![vec![1, 1]]).expect("golden mean is nonempty")
    }

    /// Full shift on the given symbols.
    pub fn full_shift(symbols: &[char]) -> Self {
        let a = Alphabet::new(symbols.to_vec()).expect("valid alphabet");
        ShiftPresentation::sft(a, Vec::new()).expect("full shift is nonempty")
    }

    /// `{0^∞} ∪ orbit of (01)^∞`, as the SFT avoiding `11`, `001`, `100`.
    pub fn fixed0_cycle01() -> Self {
        let a = Alphabet::new(vec!['0', '1']).expect("valid alphabet");
        ShiftPresentation::sft(a, vec![vec![1, 1], vec![0, 0, 1], vec![1, 0, 0]]).expect("nonempty")
    }

    /// Two states `A` (loops `a`, `b`) and `B` (loops `a`, `c`) joined both
    /// ways by `d`-edges.
    pub fn bridged_loops() -> Self {
        let a = Alphabet::new(vec!['a', 'b', 'c', 'd']).expect("valid alphabet");
        let e = |from, to, label| LabeledEdge { from, to, label };
        ShiftPresentation::sofic(
            a,
            vec!["A".into(), "B".into()],
            vec![e(0, 0, 0), e(0, 0, 1), e(1, 1, 2), e(1, 1, 0), e(0, 1, 3), e(1, 0, 3)],
        )
        .expect("valid presentation")
    }

    /// `{a,b}^∞ ∪ {a,c}^∞`: the bridged loops with the `d`-edges removed.
    pub fn unbridged_loops() -> Self {
        let a = Alphabet::new(vec!['a', 'b', 'c', 'd']).expect("valid alphabet");
        let e = |from, to, label| LabeledEdge { from, to, label };
        ShiftPresentation::sofic(
            a,
            vec!["A".into(), "B".into()],
            vec![e(0, 0, 0), e(0, 0, 1), e(1, 1, 2), e(1, 1, 0)],
        )
        .expect("valid presentation")
    }
}

/// How a subsystem `Λ` of a shift is described.
#[derive(Clone, Debug)]
pub enum SubsystemSpec {
    Presentation(ShiftPresentation),
    /// An explicit set of `k`-blocks; edges join overlapping pairs whose
    /// merged `(k+1)`-block is allowed in the ambient shift.
    Blocks(Vec<Word>),
}

/// Allowed `k`-blocks with the overlap relation: `u -> v` iff `u[1..] = v[..k-1]`
/// and the merged `(k+1)`-block is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGraph {
    pub k: usize,
    pub blocks: Vec<Word>,
    pub graph: Digraph,
}

impl BlockGraph {
    fn from_blocks<'a>(k: usize, blocks: BTreeSet<Word>, longer: impl Iterator<Item = &'a Word>) -> Self {
        let blocks: Vec<Word> = blocks.into_iter().collect();
        let find = |w: &[Symbol]| blocks.binary_search_by(|b| b.as_slice().cmp(w)).ok();
        let edges: Vec<(usize, usize)> =
            longer.filter_map(|w| Some((find(&w[..k])?, find(&w[1..])?))).collect();
        BlockGraph { k, graph: Digraph::from_edges(blocks.len(), edges), blocks }
    }

    pub fn index_of(&self, block: &[Symbol]) -> Option<usize> {
        self.blocks.binary_search_by(|b| b.as_slice().cmp(block)).ok()
    }

    /// Every vertex has an out-edge.
    pub fn is_extendable(&self) -> bool {
        (0..self.graph.len()).all(|v| !self.graph.successors(v).is_empty())
    }

    /// Spells the word read along a vertex path: first block, then the last
    /// symbol of every subsequent block.
    pub fn spell(&self, path: &[usize]) -> Word {
        let mut w = Vec::with_capacity(self.k + path.len());
        if let Some(&first) = path.first() {
            w.extend_from_slice(&self.blocks[first]);
        }
        for &v in path.iter().skip(1) {
            w.push(self.blocks[v][self.k - 1]);
        }
        w
    }
}

/// Outcome of a language-constraint query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintCertificate {
    /// A shortest (then lexicographically least) witness word.
    Sat { witness: Word },
    /// Every reachable product state `(automaton state, symbols seen)`; none
    /// has seen all required symbols.
    Unsat { reachable: Vec<(String, Vec<Symbol>)> },
}

impl ConstraintCertificate {
    pub fn is_unsat(&self) -> bool {
        matches!(self, ConstraintCertificate::Unsat { .. })
    }
}

/// Product of the presentation's reader automaton with the subset of
/// required symbols seen so far.
struct ConstraintSearch<'a> {
    shift: &'a ShiftPresentation,
    contain: Vec<Symbol>,
    avoid: BTreeSet<Symbol>,
    /// reader states: (label, transitions (symbol, target))
    labels: Vec<String>,
    trans: Vec<Vec<(Symbol, usize)>>,
    /// start states with the word already read on entering them
    starts: Vec<(usize, Word)>,
}

impl<'a> ConstraintSearch<'a> {
    fn new(shift: &'a ShiftPresentation, contain: &[Symbol], avoid: &[Symbol]) -> Self {
        let mut contain = contain.to_vec();
        contain.sort_unstable();
        contain.dedup();
        let avoid: BTreeSet<Symbol> = avoid.iter().copied().collect();
        let (labels, trans, starts) = match shift {
            ShiftPresentation::Sofic(s) => {
                let trans = (0..s.vertices.len())
                    .map(|v| s.out[v].iter().map(|&e| (s.edges[e].label, s.edges[e].to)).collect())
                    .collect();
                let starts = (0..s.vertices.len()).map(|v| (v, Vec::new())).collect();
                (s.vertices.clone(), trans, starts)
            }
            ShiftPresentation::Sft(s) => {
                let core = &s.core;
                let trans = core
                    .iter()
                    .map(|b| {
                        (0..s.alphabet.len() as Symbol)
                            .filter_map(|sym| {
                                let mut ext = b.clone();
                                ext.push(sym);
                                if has_forbidden_suffix(&ext, &s.forbidden) {
                                    return None;
                                }
                                core.binary_search(&ext[1..].to_vec()).ok().map(|t| (sym, t))
                            })
                            .collect()
                    })
                    .collect();
                let labels = core.iter().map(|b| s.alphabet.render(b)).collect();
                let starts = core.iter().cloned().enumerate().collect();
                (labels, trans, starts)
            }
        };
        ConstraintSearch { shift, contain, avoid, labels, trans, starts }
    }

    fn bit(&self, s: Symbol) -> u32 {
        self.contain.iter().position(|&c| c == s).map_or(0, |i| 1 << i)
    }

    fn mask_of(&self, w: &[Symbol]) -> u32 {
        w.iter().fold(0, |m, &s| m | self.bit(s))
    }

    fn admissible(&self, w: &[Symbol]) -> bool {
        w.iter().all(|s| !self.avoid.contains(s))
    }

    fn run(&self) -> ConstraintCertificate {
        assert!(self.contain.len() <= 16, "at most 16 required symbols");
        let full: u32 = (1u32 << self.contain.len()) - 1;
        let masks = 1usize << self.contain.len();
        let n = self.trans.len();
        let id = |s: usize, m: u32| s * masks + m as usize;

        // words shorter than every start prefix (SFT with memory > 1)
        let min_start = self.starts.iter().map(|(_, w)| w.len()).min().unwrap_or(0);
        for len in 0..min_start {
            if let Ok(words) = self.shift.allowed_blocks(len) {
                if let Some(w) = words.iter().find(|w| self.admissible(w) && self.mask_of(w) == full) {
                    return ConstraintCertificate::Sat { witness: w.clone() };
                }
            }
        }

        // backward distances to a goal state
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n * masks];
        for s in 0..n {
            for m in 0..masks as u32 {
                for &(sym, t) in &self.trans[s] {
                    if !self.avoid.contains(&sym) {
                        rev[id(t, m | self.bit(sym))].push(id(s, m));
                    }
                }
            }
        }
        let mut dist = vec![usize::MAX; n * masks];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist[id(s, full)] = 0;
            queue.push_back(id(s, full));
        }
        while let Some(x) = queue.pop_front() {
            for &y in &rev[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }

        let candidates: Vec<(usize, &Word, usize)> = self
            .starts
            .iter()
            .filter(|(_, w)| self.admissible(w))
            .filter_map(|(s, w)| {
                let d = dist[id(*s, self.mask_of(w))];
                (d != usize::MAX).then(|| (w.len() + d, w, id(*s, self.mask_of(w))))
            })
            .collect();
        let Some(best) = candidates.iter().map(|c| c.0).min() else {
            return self.unsat_table(masks);
        };
        let prefix = candidates.iter().filter(|c| c.0 == best).map(|c| c.1).min().expect("nonempty").clone();
        let mut current: Vec<usize> =
            candidates.iter().filter(|c| c.0 == best && *c.1 == prefix).map(|c| c.2).collect();
        let mut witness = prefix;
        let mut remaining = best - witness.len();
        while remaining > 0 {
            let mut choice: Option<(Symbol, Vec<usize>)> = None;
            for &x in &current {
                let (s, m) = (x / masks, (x % masks) as u32);
                for &(sym, t) in &self.trans[s] {
                    if self.avoid.contains(&sym) {
                        continue;
                    }
                    let y = id(t, m | self.bit(sym));
                    if dist[y] != remaining - 1 {
                        continue;
                    }
                    match &mut choice {
                        Some((c, targets)) if *c == sym => targets.push(y),
                        Some((c, _)) if *c < sym => {}
                        _ => choice = Some((sym, vec![y])),
                    }
                }
            }
            let (sym, mut next) = choice.expect("distance labels guarantee a successor");
            next.sort_unstable();
            next.dedup();
            witness.push(sym);
            current = next;
            remaining -= 1;
        }
        ConstraintCertificate::Sat { witness }
    }

    fn unsat_table(&self, masks: usize) -> ConstraintCertificate {
        let mut seen = vec![false; self.trans.len() * masks];
        let mut queue = VecDeque::new();
        for (s, w) in &self.starts {
            if self.admissible(w) {
                let x = s * masks + self.mask_of(w) as usize;
                if !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        while let Some(x) = queue.pop_front() {
            let (s, m) = (x / masks, (x % masks) as u32);
            for &(sym, t) in &self.trans[s] {
                if self.avoid.contains(&sym) {
                    continue;
                }
                let y = t * masks + (m | self.bit(sym)) as usize;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let reachable = (0..seen.len())
            .filter(|&x| seen[x])
            .map(|x| {
                let m = x % masks;
                let syms = self.contain.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &c)| c).collect();
                (self.labels[x / masks].clone(), syms)
            })
            .collect();
        ConstraintCertificate::Unsat { reachable }
    }
}

/// Result of comparing two finite prefixes of one-sided sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixComparison {
    /// First disagreement at this index: distance exactly `2^{-i}`.
    DifferAt(usize),
    /// Equal on the first `n` symbols (all that both prefixes store):
    /// distance at most `2^{-n}`.
    AgreeThrough(usize),
}

pub fn compare_prefixes(a: &[Symbol], b: &[Symbol]) -> PrefixComparison {
    let n = a.len().min(b.len());
    match (0..n).find(|&i| a[i] != b[i]) {
        Some(i) => PrefixComparison::DifferAt(i),
        None => PrefixComparison::AgreeThrough(n),
    }
}

/// `max{k : 2^{-k} >= ε}` for `0 < ε`; zero when `ε > 1`.
pub fn resolution_for_eps(eps: &Scalar) -> u32 {
    assert!(eps.is_positive(), "resolution requires a positive epsilon");
    let mut k = 0u32;
    while Scalar::dyadic(k + 1) >= *eps {
        k += 1;
    }
    k
}
