//! Finite simple labelled graphs and the handful of constructors the toolkit needs.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest graph accepted by [`Graph::chromatic_number`].
pub const CHROMATIC_CAP: usize = 12;

/// Simple graph on vertices `0..vertex_count`; edges kept sorted with `u < v`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        Graph::new(j.vertices, j.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson { vertices: g.n, edges: g.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; ", self.n)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, ")")
    }
}

/// The standard graphs used throughout.
#[derive(Debug, Clone)]
pub enum StandardKind {
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Paw,
    Wheel5,
    DisjointUnion(Vec<Graph>),
}

pub fn make_standard(kind: StandardKind) -> Result<Graph> {
    match kind {
        StandardKind::Complete(n) => Ok(Graph::complete(n)),
        StandardKind::Cycle(n) => Graph::cycle(n),
        StandardKind::Path(n) => Ok(Graph::path(n)),
        StandardKind::Paw => Ok(Graph::paw()),
        StandardKind::Wheel5 => Ok(Graph::wheel5()),
        StandardKind::DisjointUnion(gs) => Ok(Graph::disjoint_union(&gs)),
    }
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut es = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {u}-{v} out of range for {n} vertices")));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        let len = es.len();
        es.dedup();
        if es.len() != len {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Graph { n, edges: es })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Graph {
        Graph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    /// Triangle 0-1-2 with pendant vertex 3 attached to 0.
    pub fn paw() -> Graph {
        Graph { n: 4, edges: vec![(0, 1), (0, 2), (0, 3), (1, 2)] }
    }

    /// Hub 5 joined to the 5-cycle 0..4.
    pub fn wheel5() -> Graph {
        let rim = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, 5));
        Graph::new(6, rim.chain(spokes)).expect("wheel is simple")
    }

    pub fn disjoint_union(gs: &[Graph]) -> Graph {
        let mut n = 0;
        let mut edges = Vec::new();
        for g in gs {
            edges.extend(g.edges.iter().map(|&(u, v)| (u + n, v + n)));
            n += g.n;
        }
        Graph { n, edges }
    }

    /// `times` disjoint copies of `self`.
    pub fn copies(&self, times: usize) -> Graph {
        Graph::disjoint_union(&vec![self.clone(); times])
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Vertex sets of the connected components, each in increasing order,
    /// components ordered by smallest vertex.
    pub fn component_vertex_sets(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected components, each relabelled from 0 in increasing vertex order.
    pub fn components(&self) -> Vec<Graph> {
        self.component_vertex_sets().iter().map(|vs| self.induced(vs)).collect()
    }

    pub fn component_count(&self) -> usize {
        self.component_vertex_sets().len()
    }

    /// Subgraph induced by `vs`, relabelled by position in `vs`.
    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vs.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Graph::new(vs.len(), edges).expect("induced subgraph is simple")
    }

    /// Applies the vertex relabelling `perm` (old vertex `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidGraph("permutation length mismatch".into()));
        }
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Least number of colours in a proper colouring; 0 for the null graph.
    pub fn chromatic_number(&self) -> Result<usize> {
        if self.n > CHROMATIC_CAP {
            return Err(Error::SizeExceeded { vertices: self.n, cap: CHROMATIC_CAP });
        }
        if self.n == 0 {
            return Ok(0);
        }
        let masks = self.neighbour_masks();
        let lower = max_clique(&masks).max(1);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(masks[v].count_ones()));
        for k in lower..=self.n {
            let mut colour = vec![usize::MAX; self.n];
            if colourable(&masks, &order, 0, k, 0, &mut colour) {
                return Ok(k);
            }
        }
        unreachable!("n colours always suffice")
    }

    fn neighbour_masks(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.n];
        for &(u, v) in &self.edges {
            m[u] |= 1 << v;
            m[v] |= 1 << u;
        }
        m
    }

    /// Parses expressions such as `"2*K3+3*K2"`, `"paw"`, `"W5"`, `"C7"`, `"P4"`.
    /// `Kn`, `Cn`, `Pn` are complete, cycle and path graphs on n vertices.
    pub fn parse_expr(s: &str) -> Result<Graph> {
        let mut parts = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let (times, name) = match term.split_once('*') {
                Some((t, n)) => {
                    let t: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity in {term:?}")))?;
                    (t, n.trim())
                }
                None => (1, term),
            };
            let g = match name {
                "paw" | "P" => Graph::paw(),
                "W5" | "wheel5" => Graph::wheel5(),
                _ => {
                    let (head, num) = name.split_at(1.min(name.len()));
                    let n: usize = num.parse().map_err(|_| Error::Parse(format!("unknown graph {name:?}")))?;
                    match head {
                        "K" => Graph::complete(n),
                        "C" => Graph::cycle(n)?,
                        "P" => Graph::path(n),
                        "E" => Graph::empty(n),
                        _ => return Err(Error::Parse(format!("unknown graph {name:?}"))),
                    }
                }
            };
            parts.push(g.copies(times));
        }
        Ok(Graph::disjoint_union(&parts))
    }
}

fn max_clique(masks: &[u32]) -> usize {
    let n = masks.len();
    let mut best = 0;
    for set in 1u32..(1u32 << n) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        let clique = (0..n).filter(|&v| set >> v & 1 == 1).all(|v| set & !(1 << v) & !masks[v] == 0);
        if clique {
            best = size;
        }
    }
    best
}

fn colourable(masks: &[u32], order: &[usize], idx: usize, k: usize, used: usize, colour: &mut [usize]) -> bool {
    if idx == order.len() {
        return true;
    }
    let v = order[idx];
    // a fresh colour is interchangeable with any other fresh colour
    let limit = (used + 1).min(k);
    for c in 0..limit {
        let clash = (0..masks.len()).any(|u| masks[v] >> u & 1 == 1 && colour[u] == c);
        if clash {
            continue;
        }
        colour[v] = c;
        if colourable(masks, order, idx + 1, k, used.max(c + 1), colour) {
            return true;
        }
        colour[v] = usize::MAX;
    }
    false
}
