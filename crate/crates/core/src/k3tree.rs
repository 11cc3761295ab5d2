//! Triangle trees: graphs glued from pieces of K3 along a tree pattern, and the
//! correlation records they carry.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rat::{self, qi, Q};

pub type Label = BTreeSet<u8>;

/// A tree `T` with every node labelled by a subset of {0,1,2} and every edge
/// labelled by a proper subset of the intersection of its end labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "K3TreeJson", into = "K3TreeJson")]
pub struct K3Tree {
    tree: Graph,
    vertex_labels: Vec<Label>,
    edge_labels: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
struct K3TreeJson {
    tree_edges: Vec<[usize; 2]>,
    vertex_labels: BTreeMap<String, Vec<u8>>,
    edge_labels: BTreeMap<String, Vec<u8>>,
}

impl TryFrom<K3TreeJson> for K3Tree {
    type Error = Error;
    fn try_from(j: K3TreeJson) -> Result<Self> {
        let n = j.vertex_labels.len();
        let mut vl = vec![None; n];
        for (k, v) in &j.vertex_labels {
            let t: usize = k.parse().map_err(|_| Error::InvalidTree(format!("bad tree vertex {k:?}")))?;
            if t >= n {
                return Err(Error::InvalidTree(format!("tree vertex {t} out of range; labels must cover 0..{n}")));
            }
            vl[t] = Some(v.iter().copied().collect::<Label>());
        }
        let vertex_labels: Vec<Label> = vl.into_iter().map(|l| l.expect("keys are distinct and in range")).collect();
        let mut lookup = BTreeMap::new();
        for (k, v) in &j.edge_labels {
            let (a, b) = k.split_once('-').ok_or_else(|| Error::InvalidTree(format!("bad edge key {k:?}")))?;
            let a: usize = a.parse().map_err(|_| Error::InvalidTree(format!("bad edge key {k:?}")))?;
            let b: usize = b.parse().map_err(|_| Error::InvalidTree(format!("bad edge key {k:?}")))?;
            lookup.insert((a.min(b), a.max(b)), v.iter().copied().collect::<Label>());
        }
        let edges: Vec<(usize, usize)> = j.tree_edges.iter().map(|e| (e[0], e[1])).collect();
        let mut labels = Vec::new();
        for &(s, t) in &edges {
            let key = (s.min(t), s.max(t));
            labels.push((key, lookup.remove(&key).ok_or_else(|| Error::InvalidTree(format!("no label for tree edge {s}-{t}")))?));
        }
        if let Some((k, _)) = lookup.into_iter().next() {
            return Err(Error::InvalidTree(format!("label for non-edge {}-{}", k.0, k.1)));
        }
        K3Tree::new(vertex_labels, labels)
    }
}

impl From<K3Tree> for K3TreeJson {
    fn from(t: K3Tree) -> Self {
        let vertex_labels = t.vertex_labels.iter().enumerate().map(|(i, l)| (i.to_string(), l.iter().copied().collect())).collect();
        let edge_labels = t
            .tree
            .edges()
            .iter()
            .zip(&t.edge_labels)
            .map(|(&(s, u), l)| (format!("{s}-{u}"), l.iter().copied().collect()))
            .collect();
        K3TreeJson { tree_edges: t.tree.edges().iter().map(|&(s, u)| [s, u]).collect(), vertex_labels, edge_labels }
    }
}

/// Counts v_j (nodes with |label| = j) and e_j (edges with |label| = j).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCounts {
    pub v: [usize; 4],
    pub e: [usize; 3],
}

impl TreeCounts {
    /// gamma = e_2 - v_2
    pub fn gamma(&self) -> i64 {
        self.e[2] as i64 - self.v[2] as i64
    }
}

impl K3Tree {
    /// `vertex_labels[t]` labels tree node t; `edges` lists tree edges with labels.
    pub fn new(vertex_labels: Vec<Label>, edges: Vec<((usize, usize), Label)>) -> Result<K3Tree> {
        let n = vertex_labels.len();
        if n == 0 {
            return Err(Error::InvalidTree("tree must have a node".into()));
        }
        if vertex_labels.iter().flatten().any(|&w| w > 2) {
            return Err(Error::InvalidTree("labels must be subsets of {0,1,2}".into()));
        }
        let tree = Graph::new(n, edges.iter().map(|e| e.0)).map_err(|e| Error::InvalidTree(e.to_string()))?;
        if tree.edge_count() + 1 != n || tree.component_count() != 1 {
            return Err(Error::InvalidTree("pattern graph is not a tree".into()));
        }
        let mut by_edge: BTreeMap<(usize, usize), Label> = BTreeMap::new();
        for ((s, t), l) in edges {
            let common: Label = vertex_labels[s].intersection(&vertex_labels[t]).copied().collect();
            if !(l.is_subset(&common) && l.len() < common.len()) {
                return Err(Error::InvalidTree(format!("edge label of {s}-{t} is not a proper subset of {common:?}")));
            }
            by_edge.insert((s.min(t), s.max(t)), l);
        }
        let edge_labels = tree.edges().iter().map(|k| by_edge[k].clone()).collect();
        Ok(K3Tree { tree, vertex_labels, edge_labels })
    }

    /// Star with `k` full triangles and empty edge labels; realizes k·K3.
    pub fn disjoint_triangles(k: usize) -> Result<K3Tree> {
        let full: Label = [0, 1, 2].into();
        K3Tree::new(vec![full; k], (1..k).map(|i| ((0, i), Label::new())).collect())
    }

    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    pub fn vertex_labels(&self) -> &[Label] {
        &self.vertex_labels
    }

    pub fn edge_labels(&self) -> &[Label] {
        &self.edge_labels
    }

    pub fn counts(&self) -> TreeCounts {
        let mut c = TreeCounts { v: [0; 4], e: [0; 3] };
        for l in &self.vertex_labels {
            c.v[l.len()] += 1;
        }
        for l in &self.edge_labels {
            c.e[l.len()] += 1;
        }
        c
    }

    /// The glued graph H(T, phi).
    pub fn realize(&self) -> Result<Graph> {
        // slot (t, w) for each w in phi(t)
        let mut base = vec![0usize; self.vertex_labels.len() + 1];
        for (t, l) in self.vertex_labels.iter().enumerate() {
            base[t + 1] = base[t] + l.len();
        }
        let slot = |t: usize, w: u8| base[t] + self.vertex_labels[t].iter().position(|&x| x == w).expect("label member");
        let mut parent: Vec<usize> = (0..base[base.len() - 1]).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (&(s, t), l) in self.tree.edges().iter().zip(&self.edge_labels) {
            for &w in l {
                let (a, b) = (find(&mut parent, slot(s, w)), find(&mut parent, slot(t, w)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut id = BTreeMap::new();
        let mut class = vec![0usize; parent.len()];
        for s in 0..parent.len() {
            let r = find(&mut parent, s);
            let next = id.len();
            class[s] = *id.entry(r).or_insert(next);
        }
        let mut edges = BTreeSet::new();
        for (t, l) in self.vertex_labels.iter().enumerate() {
            let ws: Vec<u8> = l.iter().copied().collect();
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    let (a, b) = (class[slot(t, ws[i])], class[slot(t, ws[j])]);
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        let n = id.len();
        let expected: usize = self.vertex_labels.iter().map(|l| l.len()).sum::<usize>() - self.edge_labels.iter().map(|l| l.len()).sum::<usize>();
        if n != expected {
            return Err(Error::Consistency(format!("glued graph has {n} vertices, expected {expected}")));
        }
        Graph::new(n, edges)
    }
}

/// H is (J, k, l)-correlated: e(H) = k e(J) + l and t(H,W) >= t(J,W)^k t(K2,W)^l.
/// Construction checks the edge identity; the density inequality is the
/// responsibility of the constructor that produced the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub base_graph: Graph,
    #[serde(with = "rat::as_text")]
    pub power: Q,
    #[serde(with = "rat::as_text")]
    pub edge_exponent: Q,
    pub subject: Graph,
}

impl CorrelationRecord {
    pub fn new(base_graph: Graph, power: Q, edge_exponent: Q, subject: Graph) -> Result<Self> {
        if power.is_zero() {
            return Err(Error::Precondition("correlation power must be nonzero".into()));
        }
        let rhs = &power * qi(base_graph.edge_count() as i64) + &edge_exponent;
        if rhs != qi(subject.edge_count() as i64) {
            return Err(Error::Consistency(format!(
                "e(H) = {} but k e(J) + l = {}",
                subject.edge_count(),
                rat::fmt_q(&rhs)
            )));
        }
        Ok(CorrelationRecord { base_graph, power, edge_exponent, subject })
    }

    /// (k K3) ⊔ (l K2) is (K3, k, l)-correlated with equality, by multiplicativity.
    pub fn k3_k2_union(k: usize, l: usize) -> Self {
        let h = Graph::disjoint_union(&[Graph::complete(3).copies(k), Graph::complete(2).copies(l)]);
        CorrelationRecord::new(Graph::complete(3), qi(k as i64), qi(l as i64), h).expect("edge count identity")
    }

    pub fn integer_power(&self) -> Option<i64> {
        self.power.is_integer().then(|| self.power.to_integer().to_i64()).flatten()
    }
}

/// The record (K3, v3, -gamma) for the realized tree. Only trees with
/// gamma = e2 - v2 >= 0 are accepted, since that is when the density
/// inequality is known to hold.
pub fn k3_tree_correlation(t: &K3Tree) -> Result<CorrelationRecord> {
    let c = t.counts();
    if c.gamma() < 0 {
        return Err(Error::Precondition(format!("e2 = {} < v2 = {}; no correlation inequality available", c.e[2], c.v[2])));
    }
    let h = t.realize()?;
    let k = c.v[3] as i64;
    if h.edge_count() as i64 != 3 * k - c.gamma() {
        return Err(Error::Consistency(format!("e(H) = {} but 3k - gamma = {}", h.edge_count(), 3 * k - c.gamma())));
    }
    if k == 0 {
        return Err(Error::Precondition("tree has no full triangle node".into()));
    }
    CorrelationRecord::new(Graph::complete(3), qi(k), qi(-c.gamma()), h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full() -> Label {
        [0, 1, 2].into()
    }

    #[test]
    fn star_gives_disjoint_triangles() {
        let t = K3Tree::disjoint_triangles(4).unwrap();
        assert_eq!(t.realize().unwrap(), Graph::complete(3).copies(4));
        let rec = k3_tree_correlation(&t).unwrap();
        assert_eq!((rec.power.clone(), rec.edge_exponent.clone()), (qi(4), qi(0)));
    }

    #[test]
    fn edge_glued_pair() {
        let t = K3Tree::new(vec![full(), full()], vec![((0, 1), [0, 1].into())]).unwrap();
        let h = t.realize().unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (4, 5));
        let rec = k3_tree_correlation(&t).unwrap();
        assert_eq!((rec.power.clone(), rec.edge_exponent.clone()), (qi(2), qi(-1)));
    }

    #[test]
    fn bowtie() {
        let t = K3Tree::new(vec![full(), full()], vec![((0, 1), [0].into())]).unwrap();
        let h = t.realize().unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (5, 6));
        assert_eq!(h.component_count(), 1);
        let rec = k3_tree_correlation(&t).unwrap();
        assert_eq!(rec.edge_exponent, qi(0));
    }

    #[test]
    fn rejects_bad_labels() {
        // edge label equal to the full intersection
        assert!(K3Tree::new(vec![full(), full()], vec![((0, 1), full())]).is_err());
        assert!(K3Tree::new(vec![full(), [0, 1].into()], vec![((0, 1), [2].into())]).is_err());
        // not a tree
        assert!(K3Tree::new(vec![full(), full()], vec![]).is_err());
    }

    #[test]
    fn negative_gamma_is_refused() {
        let t = K3Tree::new(vec![full(), [0, 1].into()], vec![((0, 1), [0].into())]).unwrap();
        assert_eq!(t.counts().gamma(), -1);
        assert!(matches!(k3_tree_correlation(&t), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"tree_edges":[[0,1]],"vertex_labels":{"0":[0,1,2],"1":[0,1,2]},"edge_labels":{"0-1":[0]}}"#;
        let t: K3Tree = serde_json::from_str(src).unwrap();
        let back: K3Tree = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, back);
    }
}
