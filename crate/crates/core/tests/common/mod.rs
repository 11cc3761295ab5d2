//! Independent reference implementations used only by tests.
//!
//! Nothing here calls into the library's evaluation code: densities are plain
//! sums over every map `V(H) → blocks`, cycles go through a matrix trace, and
//! the reduction objective is written out by hand.

#![allow(dead_code)]

use commons_core::graphon::StepGraphon;
use commons_core::rat::{q, Q};
use commons_core::Graph;
use num_traits::{One, Zero};
use rand::Rng;

/// `t(H, W)` by enumerating all `n^v` block assignments.
pub fn brute_density(h: &Graph, w: &StepGraphon) -> Q {
    brute_parts(h.vertex_count(), h.edges(), w.weights(), w.values())
}

pub fn brute_parts(v: usize, edges: &[(usize, usize)], weights: &[Q], values: &[Vec<Q>]) -> Q {
    let n = weights.len();
    let mut total = Q::zero();
    let mut phi = vec![0usize; v];
    loop {
        let mut term = Q::one();
        for &x in &phi {
            term *= &weights[x];
        }
        for &(a, b) in edges {
            if term.is_zero() {
                break;
            }
            term *= &values[phi[a]][phi[b]];
        }
        total += term;
        // odometer
        let mut i = 0;
        loop {
            if i == v {
                return total;
            }
            phi[i] += 1;
            if phi[i] < n {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
    }
}

pub fn brute_density_f64(h: &Graph, weights: &[f64], values: &[Vec<f64>]) -> f64 {
    let (v, n) = (h.vertex_count(), weights.len());
    let mut total = 0.0;
    let mut phi = vec![0usize; v];
    loop {
        let mut term: f64 = phi.iter().map(|&x| weights[x]).product();
        for &(a, b) in h.edges() {
            term *= values[phi[a]][phi[b]];
        }
        total += term;
        let mut i = 0;
        loop {
            if i == v {
                return total;
            }
            phi[i] += 1;
            if phi[i] < n {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
    }
}

pub fn brute_mono(h: &Graph, w: &StepGraphon) -> Q {
    brute_density(h, w) + brute_density(h, &w.complement())
}

/// `t(C_len, W) = tr((A·D)^len)` with `D = diag(weights)`.
pub fn cycle_trace(len: usize, w: &StepGraphon) -> Q {
    let n = w.blocks();
    let ad: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| w.value(i, j) * &w.weights()[j]).collect()).collect();
    let mut acc: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for _ in 0..len {
        acc = (0..n).map(|i| (0..n).map(|j| (0..n).map(|t| &acc[i][t] * &ad[t][j]).sum()).collect()).collect();
    }
    (0..n).map(|i| acc[i][i].clone()).sum()
}

/// `2·(1/2)^{e(H)}`.
pub fn random_threshold(edges: usize) -> Q {
    q(1, 1i64 << (edges - 1).min(62))
}

/// Objective with `g(z) = z^m`, written out directly.
pub fn f_direct(k: f64, l: f64, m: f64, x: f64, y: f64) -> f64 {
    (1.0 + x).powf(l) * ((1.0 + x).powf(m) - y).powf(k) + (1.0 - x).powf(l) * ((1.0 - x).powf(m) + y).powf(k)
}

pub fn df_dy_direct(k: f64, l: f64, m: f64, x: f64, y: f64) -> f64 {
    -k * (1.0 + x).powf(l) * ((1.0 + x).powf(m) - y).powf(k - 1.0) + k * (1.0 - x).powf(l) * ((1.0 - x).powf(m) + y).powf(k - 1.0)
}

/// `max(0, 16(z−1)/3)` at `z = 1 + x`.
pub fn linear_floor(x: f64) -> f64 {
    (16.0 * x / 3.0).max(0.0)
}

/// Whether two graphs on at most 8 vertices are isomorphic, by trying every
/// permutation.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    assert!(n <= 8, "isomorphism oracle is exhaustive");
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| a.edges().iter().all(|&(u, v)| b.has_edge(p[u], p[v])))
}

fn permute(p: &mut Vec<usize>, i: usize, ok: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if i == p.len() {
        return ok(p);
    }
    for j in i..p.len() {
        p.swap(i, j);
        if permute(p, i + 1, ok) {
            return true;
        }
        p.swap(i, j);
    }
    false
}

/// Chromatic number by trying every colouring with `c` colours, `c = 1, 2, …`.
pub fn chromatic_brute(h: &Graph) -> usize {
    let v = h.vertex_count();
    if v == 0 {
        return 0;
    }
    for c in 1..=v {
        let mut col = vec![0usize; v];
        loop {
            if h.edges().iter().all(|&(a, b)| col[a] != col[b]) {
                return c;
            }
            let mut i = 0;
            while i < v {
                col[i] += 1;
                if col[i] < c {
                    break;
                }
                col[i] = 0;
                i += 1;
            }
            if i == v {
                break;
            }
        }
    }
    v
}

/// Random rational step graphon, 1 to `max_blocks` blocks, values in multiples of 1/6.
pub fn random_graphon(rng: &mut impl Rng, max_blocks: usize) -> StepGraphon {
    let n = rng.gen_range(1..=max_blocks);
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    let mut values = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = q(rng.gen_range(0..=6), 6);
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    StepGraphon::new(raw.iter().map(|&a| q(a, total)).collect(), values).unwrap()
}

/// Random graph on `v` vertices with edge probability 1/2.
pub fn random_graph(rng: &mut impl Rng, v: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            if rng.gen_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(v, edges).unwrap()
}
