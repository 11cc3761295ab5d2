//! Homomorphism densities on step graphons.
//!
//! `t(H, W) = Σ_f Π_v z_{f(v)} Π_{uv} A_{f(u) f(v)}`, summed over maps
//! `f: V(H) → [n]`. The sum factorizes over connected components, so each
//! distinct component is enumerated once and raised to its multiplicity.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::StepGraphon;
use crate::interval::Interval;
use crate::rat::{self, q, NumRepr, Q};

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Unit roundoff assumed for double-double arithmetic (generous).
const DD_UNIT: f64 = 7.888609052210118e-31; // 2^-100

// Below this many terms a component is enumerated on the calling thread.
const PARALLEL_TERMS: u128 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Rational when the graphon is exact, float otherwise.
    #[default]
    Auto,
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy)]
pub struct DensityOptions {
    pub mode: Mode,
    pub budget: u128,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions { mode: Mode::Auto, budget: DEFAULT_BUDGET }
    }
}

/// A density value: exact, or a double-double with an absolute error bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Exact(Q),
    Approx { value: TwoFloat, error_bound: f64 },
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    mode: Mode,
    value: NumRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error_bound: Option<f64>,
}

impl Serialize for Density {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            Density::Exact(r) => DensityJson { mode: Mode::Rational, value: NumRepr::exact(r), value_lo: None, error_bound: None },
            Density::Approx { value, error_bound } => DensityJson {
                mode: Mode::Float,
                value: NumRepr::Float(value.hi()),
                value_lo: Some(value.lo()),
                error_bound: Some(*error_bound),
            },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Density {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DensityJson::deserialize(d)?;
        match j.mode {
            Mode::Rational => {
                let (r, exact) = j.value.value().map_err(D::Error::custom)?;
                if !exact {
                    return Err(D::Error::custom("rational density must be written exactly"));
                }
                Ok(Density::Exact(r))
            }
            _ => {
                let (r, _) = j.value.value().map_err(D::Error::custom)?;
                let hi = rat::to_f64(&r);
                Ok(Density::Approx { value: TwoFloat::new_add(hi, j.value_lo.unwrap_or(0.0)), error_bound: j.error_bound.unwrap_or(0.0) })
            }
        }
    }
}

impl Density {
    pub fn is_exact(&self) -> bool {
        matches!(self, Density::Exact(_))
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Density::Exact(r) => Some(r),
            Density::Approx { .. } => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Density::Exact(r) => rat::to_f64(r),
            Density::Approx { value, .. } => value.hi() + value.lo(),
        }
    }

    pub fn error_bound(&self) -> f64 {
        match self {
            Density::Exact(_) => 0.0,
            Density::Approx { error_bound, .. } => *error_bound,
        }
    }

    /// Enclosure of the true value.
    pub fn enclosure(&self) -> Interval {
        match self {
            Density::Exact(r) => Interval::from_q(r),
            Density::Approx { value, error_bound } => {
                let e = Interval::new(-error_bound, *error_bound);
                Interval::point(value.hi()) + Interval::point(value.lo()) + e
            }
        }
    }

    pub fn mode(&self) -> Mode {
        if self.is_exact() {
            Mode::Rational
        } else {
            Mode::Float
        }
    }
}

impl Add for Density {
    type Output = Density;
    fn add(self, o: Density) -> Density {
        match (self, o) {
            (Density::Exact(a), Density::Exact(b)) => Density::Exact(a + b),
            (a, b) => {
                let (va, ea) = a.as_dd();
                let (vb, eb) = b.as_dd();
                let v = va + vb;
                Density::Approx { value: v, error_bound: ea + eb + v.hi().abs() * DD_UNIT }
            }
        }
    }
}

impl Sub for Density {
    type Output = Density;
    fn sub(self, o: Density) -> Density {
        match (self, o) {
            (Density::Exact(a), Density::Exact(b)) => Density::Exact(a - b),
            (a, b) => {
                let (va, ea) = a.as_dd();
                let (vb, eb) = b.as_dd();
                let v = va - vb;
                Density::Approx { value: v, error_bound: ea + eb + v.hi().abs() * DD_UNIT }
            }
        }
    }
}

impl Mul for Density {
    type Output = Density;
    fn mul(self, o: Density) -> Density {
        match (self, o) {
            (Density::Exact(a), Density::Exact(b)) => Density::Exact(a * b),
            (a, b) => {
                let (va, ea) = a.as_dd();
                let (vb, eb) = b.as_dd();
                let v = va * vb;
                let err = va.hi().abs() * eb + vb.hi().abs() * ea + ea * eb + 2.0 * v.hi().abs() * DD_UNIT;
                Density::Approx { value: v, error_bound: err * (1.0 + 4.0 * f64::EPSILON) }
            }
        }
    }
}

impl Density {
    pub fn powi(&self, e: u32) -> Density {
        let mut out = match self {
            Density::Exact(_) => Density::Exact(Q::one()),
            Density::Approx { .. } => Density::Approx { value: TwoFloat::from(1.0), error_bound: 0.0 },
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        out
    }

    /// Whether the value is certainly greater than `t` (exactly, or by the
    /// whole enclosure).
    pub fn certainly_above(&self, t: f64) -> bool {
        match self {
            Density::Exact(r) => rat::from_f64(t).map(|q| r > &q).unwrap_or(false),
            Density::Approx { .. } => self.enclosure().lo > t,
        }
    }

    fn as_dd(&self) -> (TwoFloat, f64) {
        match self {
            Density::Exact(r) => {
                let v = dd_from_q(r);
                (v, v.hi().abs() * DD_UNIT)
            }
            Density::Approx { value, error_bound } => (*value, *error_bound),
        }
    }
}

/// Nearest double-double to a rational.
pub fn dd_from_q(r: &Q) -> TwoFloat {
    let hi = rat::to_f64(r);
    let rest = match rat::from_f64(hi) {
        Ok(h) => rat::to_f64(&(r - h)),
        Err(_) => 0.0,
    };
    TwoFloat::new_add(hi, rest)
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("GRAPHON_COMMONS_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            if n > 0 {
                b = b.num_threads(n);
            }
        }
        b.build().expect("thread pool")
    })
}

/// Runs `f` on the library's thread pool (size capped by `GRAPHON_COMMONS_THREADS`).
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    pool().install(f)
}

pub trait Scalar: Clone + Send + Sync + Zero + One + Mul<Output = Self> + Add<Output = Self> {}
impl<T: Clone + Send + Sync + Zero + One + Mul<Output = T> + Add<Output = T>> Scalar for T {}

/// Vertex order for enumeration: BFS order plus, for each position, the
/// earlier positions it is adjacent to.
#[derive(Debug, Clone, PartialEq)]
struct Order {
    back: Vec<Vec<usize>>,
    edges: usize,
}

impl Order {
    fn new(g: &Graph) -> Order {
        let n = g.vertex_count();
        let adj = g.adjacency();
        let mut pos = vec![usize::MAX; n];
        let mut seq = Vec::with_capacity(n);
        for s in 0..n {
            if pos[s] != usize::MAX {
                continue;
            }
            pos[s] = seq.len();
            seq.push(s);
            let mut head = seq.len() - 1;
            while head < seq.len() {
                let u = seq[head];
                head += 1;
                for &v in &adj[u] {
                    if pos[v] == usize::MAX {
                        pos[v] = seq.len();
                        seq.push(v);
                    }
                }
            }
        }
        let back = seq
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let mut b: Vec<usize> = adj[u].iter().map(|&v| pos[v]).filter(|&p| p < i).collect();
                b.sort_unstable();
                b
            })
            .collect();
        Order { back, edges: g.edge_count() }
    }

    fn len(&self) -> usize {
        self.back.len()
    }
}

/// Weights and values of a graphon in some scalar type, with zero flags for pruning.
pub struct Tables<T> {
    n: usize,
    w: Vec<T>,
    a: Vec<T>,
    wz: Vec<bool>,
    az: Vec<bool>,
}

impl<T: Scalar> Tables<T> {
    pub fn new(w: Vec<T>, a: Vec<T>) -> Tables<T> {
        let n = w.len();
        assert_eq!(a.len(), n * n);
        let wz = w.iter().map(|x| x.is_zero()).collect();
        let az = a.iter().map(|x| x.is_zero()).collect();
        Tables { n, w, a, wz, az }
    }

    pub fn blocks(&self) -> usize {
        self.n
    }

    fn rec(&self, ord: &Order, i: usize, assign: &mut [usize]) -> T {
        if i == ord.len() {
            return T::one();
        }
        let mut s = T::zero();
        for b in 0..self.n {
            if let Some(t) = self.term(ord, i, b, assign) {
                s = s + t;
            }
        }
        s
    }

    // Contribution of assigning block b at position i, or None if it vanishes.
    fn term(&self, ord: &Order, i: usize, b: usize, assign: &mut [usize]) -> Option<T> {
        if self.wz[b] {
            return None;
        }
        let mut f = self.w[b].clone();
        for &j in &ord.back[i] {
            let idx = b * self.n + assign[j];
            if self.az[idx] {
                return None;
            }
            f = f * self.a[idx].clone();
        }
        assign[i] = b;
        let rest = self.rec(ord, i + 1, assign);
        Some(f * rest)
    }

    fn enumerate(&self, ord: &Order, parallel: bool) -> T {
        let v = ord.len();
        if v == 0 {
            return T::one();
        }
        let terms = (self.n as u128).saturating_pow(v as u32);
        if parallel && self.n > 1 && terms >= PARALLEL_TERMS {
            let parts: Vec<Option<T>> = (0..self.n)
                .into_par_iter()
                .map(|b| {
                    let mut assign = vec![0usize; v];
                    self.term(ord, 0, b, &mut assign)
                })
                .collect();
            parts.into_iter().flatten().fold(T::zero(), |s, t| s + t)
        } else {
            let mut assign = vec![0usize; v];
            self.rec(ord, 0, &mut assign)
        }
    }
}

/// A graph prepared for repeated density evaluation: distinct components
/// with multiplicities.
#[derive(Debug, Clone)]
pub struct DensityPlan {
    parts: Vec<(Order, u32)>,
    vertices: usize,
    edges: usize,
}

impl DensityPlan {
    pub fn new(h: &Graph) -> DensityPlan {
        let mut uniq: Vec<(Graph, u32)> = Vec::new();
        for c in h.components() {
            match uniq.iter_mut().find(|(g, _)| *g == c) {
                Some((_, m)) => *m += 1,
                None => uniq.push((c, 1)),
            }
        }
        DensityPlan {
            parts: uniq.iter().map(|(g, m)| (Order::new(g), *m)).collect(),
            vertices: h.vertex_count(),
            edges: h.edge_count(),
        }
    }

    /// Single enumeration over all of `h`, ignoring the component structure.
    pub fn unfactorized(h: &Graph) -> DensityPlan {
        let parts = if h.vertex_count() == 0 { vec![] } else { vec![(Order::new(h), 1)] };
        DensityPlan { parts, vertices: h.vertex_count(), edges: h.edge_count() }
    }

    /// Largest number of terms any single enumeration needs on `n` blocks.
    pub fn terms(&self, n: usize) -> u128 {
        self.parts.iter().map(|(o, _)| (n as u128).saturating_pow(o.len() as u32)).max().unwrap_or(0)
    }

    fn total_terms(&self, n: usize) -> u128 {
        self.parts.iter().map(|(o, _)| (n as u128).saturating_pow(o.len() as u32)).fold(0u128, |a, b| a.saturating_add(b))
    }

    pub fn check_budget(&self, n: usize, budget: u128) -> Result<()> {
        let t = self.terms(n);
        if t > budget {
            return Err(Error::BudgetExceeded { terms: t, budget });
        }
        Ok(())
    }

    pub fn eval<T: Scalar>(&self, t: &Tables<T>, parallel: bool) -> T {
        let mut out = T::one();
        for (ord, m) in &self.parts {
            let c = t.enumerate(ord, parallel);
            out = out * num_traits::pow(c, *m as usize);
        }
        out
    }

    /// Plain double evaluation, for search loops.
    pub fn eval_f64(&self, w: &[f64], a: &[f64]) -> f64 {
        self.eval(&Tables::new(w.to_vec(), a.to_vec()), false)
    }

    fn dd_error(&self, value: f64, n: usize) -> f64 {
        let ops = 2.0 * (self.vertices + self.edges) as f64 + self.total_terms(n) as f64 + 2.0;
        value.abs() * ops * DD_UNIT
    }
}

fn tables_q(w: &StepGraphon) -> Tables<Q> {
    Tables::new(w.weights().to_vec(), w.values().iter().flatten().cloned().collect())
}

fn tables_dd(w: &StepGraphon) -> Tables<TwoFloat> {
    Tables::new(w.weights().iter().map(dd_from_q).collect(), w.values().iter().flatten().map(dd_from_q).collect())
}

pub fn tables_f64(w: &StepGraphon) -> Tables<f64> {
    Tables::new(w.weights_f64(), w.values_f64())
}

fn resolve(mode: Mode, w: &StepGraphon) -> Result<Mode> {
    match (mode, w.is_exact()) {
        (Mode::Auto, true) | (Mode::Rational, true) => Ok(Mode::Rational),
        (Mode::Rational, false) => Err(Error::ModeMismatch("rational mode requested on a float-valued graphon".into())),
        _ => Ok(Mode::Float),
    }
}

fn eval_plan(plan: &DensityPlan, w: &StepGraphon, opts: &DensityOptions) -> Result<Density> {
    plan.check_budget(w.blocks(), opts.budget)?;
    match resolve(opts.mode, w)? {
        Mode::Rational => Ok(Density::Exact(install(|| plan.eval(&tables_q(w), true)))),
        _ => {
            let v = install(|| plan.eval(&tables_dd(w), true));
            let error_bound = plan.dd_error(v.hi(), w.blocks());
            Ok(Density::Approx { value: v, error_bound })
        }
    }
}

/// `t(H, W)` with default options.
pub fn density(h: &Graph, w: &StepGraphon) -> Result<Density> {
    density_with(h, w, &DensityOptions::default())
}

pub fn density_with(h: &Graph, w: &StepGraphon, opts: &DensityOptions) -> Result<Density> {
    eval_plan(&DensityPlan::new(h), w, opts)
}

/// `t(H, W)` by one enumeration over all vertices, without factorizing.
pub fn density_unfactorized(h: &Graph, w: &StepGraphon, opts: &DensityOptions) -> Result<Density> {
    eval_plan(&DensityPlan::unfactorized(h), w, opts)
}

/// `t(H, W) + t(H, 1 − W)`.
pub fn mono_density(h: &Graph, w: &StepGraphon) -> Result<Density> {
    mono_density_with(h, w, &DensityOptions::default())
}

pub fn mono_density_with(h: &Graph, w: &StepGraphon, opts: &DensityOptions) -> Result<Density> {
    let plan = DensityPlan::new(h);
    Ok(eval_plan(&plan, w, opts)? + eval_plan(&plan, &w.complement(), opts)?)
}

/// The commonality threshold `2·(1/2)^{e(H)}`.
pub fn threshold(h: &Graph) -> Q {
    q(2, 1) / rat::pow_q(&q(2, 1), h.edge_count() as u32)
}

fn mat_mul<T: Scalar>(x: &[T], y: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            if x[i * n + k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j].clone() + x[i * n + k].clone() * y[k * n + j].clone();
            }
        }
    }
    out
}

fn cycle_trace<T: Scalar>(w: &[T], a: &[T], len: usize) -> T {
    let n = w.len();
    // M = D_z A
    let m: Vec<T> = (0..n * n).map(|idx| w[idx / n].clone() * a[idx].clone()).collect();
    let mut result: Option<Vec<T>> = None;
    let mut base = m;
    let mut e = len;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => mat_mul(&r, &base, n),
            });
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base, n);
        }
    }
    let r = result.expect("len >= 1");
    (0..n).fold(T::zero(), |s, i| s + r[i * n + i].clone())
}

/// `t(C_len, W) = tr((D_z A)^len)`.
pub fn cycle_density(len: usize, w: &StepGraphon, mode: Mode) -> Result<Density> {
    if len < 3 {
        return Err(Error::Domain(format!("cycle length {len} < 3")));
    }
    match resolve(mode, w)? {
        Mode::Rational => {
            let t = tables_q(w);
            Ok(Density::Exact(cycle_trace(&t.w, &t.a, len)))
        }
        _ => {
            let t = tables_dd(w);
            let v = cycle_trace(&t.w, &t.a, len);
            let n = w.blocks() as f64;
            let steps = 2.0 * (usize::BITS - len.leading_zeros()) as f64;
            let error_bound = v.hi().abs() * (steps * (n + 1.0) + 2.0 * len as f64 + n + 2.0) * DD_UNIT;
            Ok(Density::Approx { value: v, error_bound })
        }
    }
}
