//! Small directed-graph toolkit shared by the block graphs and the
//! ε-transition graphs: strongly connected components, shortest paths,
//! induced subgraphs and condensation queries.

use std::collections::VecDeque;

/// Directed graph on vertices `0..n` with sorted, deduplicated adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Digraph {
    adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { adj: vec![Vec::new(); n] }
    }

    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        for succ in &mut adj {
            succ.sort_unstable();
            succ.dedup();
            assert!(succ.iter().all(|&w| w < n), "edge target out of range");
        }
        Digraph { adj }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            adj[u].push(v);
        }
        Digraph::from_adjacency(adj)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced on `subset` (given in any order; duplicates ignored).
    /// Returns the subgraph and the map from new to old indices.
    pub fn induced(&self, subset: &[usize]) -> (Digraph, Vec<usize>) {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter_map(|&w| (index[w] != usize::MAX).then_some(index[w])).collect())
            .collect();
        (Digraph { adj }, keep)
    }

    /// Tarjan's algorithm (iterative). Components are returned in reverse
    /// topological order of the condensation: sink components first.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0usize;
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            call.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&(v, pos)) = call.last() {
                if let Some(&w) = self.adj[v].get(pos) {
                    call.last_mut().expect("nonempty call stack").1 += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// Component id per vertex, matching the order of [`Digraph::sccs`].
    pub fn scc_ids(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let comps = self.sccs();
        let mut id = vec![0; self.len()];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                id[v] = c;
            }
        }
        (id, comps)
    }

    /// One strongly connected component covering every vertex (an empty
    /// graph is not strongly connected).
    pub fn is_strongly_connected(&self) -> bool {
        !self.is_empty() && self.sccs().len() == 1
    }

    /// Vertices lying on a directed cycle: members of nontrivial components
    /// plus vertices with a self-loop.
    pub fn cyclic_vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .sccs()
            .into_iter()
            .filter(|c| c.len() > 1 || self.has_edge(c[0], c[0]))
            .flatten()
            .collect();
        out.sort_unstable();
        out
    }

    /// Components with no edge leaving them.
    pub fn terminal_components(&self) -> Vec<Vec<usize>> {
        let (id, comps) = self.scc_ids();
        comps
            .iter()
            .enumerate()
            .filter(|(c, comp)| comp.iter().all(|&v| self.adj[v].iter().all(|&w| id[w] == *c)))
            .map(|(_, comp)| comp.clone())
            .collect()
    }

    /// Breadth-first distances from `sources`.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance");
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest path `from -> ... -> v` with `target(v)` true and at least
    /// `min_len` edges (`min_len` is 0 or 1). Ties resolve toward the
    /// smaller successor index.
    pub fn shortest_path_where(
        &self,
        from: usize,
        min_len: usize,
        target: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        if min_len == 0 && target(from) {
            return Some(vec![from]);
        }
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &w in &self.adj[from] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = from;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            if target(v) {
                let mut path = vec![v];
                let mut cur = v;
                loop {
                    cur = parent[cur];
                    path.push(cur);
                    if cur == from {
                        break;
                    }
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Shortest path of length `>= 1` from `u` to `v` (a cycle when `u == v`).
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        self.shortest_path_where(u, 1, |w| w == v)
    }

    pub fn reversed(&self) -> Digraph {
        Digraph::from_edges(self.len(), self.edges().map(|(u, v)| (v, u)))
    }
}
