//! Upper bounds on Ramsey multiplicity: explicit step-graphon witnesses for
//! uncommonness and for failures of strong commonness, and a parameter search
//! over the standard construction families.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{self, cycle_density, density_with, mono_density_with, Density, DensityOptions, DensityPlan, Mode};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::StepGraphon;
use crate::interval::Interval;
use crate::rat::{self, q, qi, Q};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Edge-to-triangle ratio from which the two-block witness works.
pub fn family_ratio() -> Q {
    q(19_665, 10_000)
}

/// Per-triangle factor the two-block witness stays below.
pub fn family_factor() -> Q {
    q(9_999_994, 10_000_000)
}

const GRID: usize = 64;
const SIMPLEX_ITERS: usize = 200;
const RESTARTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    ThreeBlockZy,
    TwoBlockDiagP,
    Turan,
    Custom,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<FamilyKind> {
        match s {
            "three_block_zy" | "zy" => Ok(FamilyKind::ThreeBlockZy),
            "two_block_diag_p" | "diag_p" => Ok(FamilyKind::TwoBlockDiagP),
            "turan" => Ok(FamilyKind::Turan),
            "custom" => Ok(FamilyKind::Custom),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::ThreeBlockZy => "three_block_zy",
            FamilyKind::TwoBlockDiagP => "two_block_diag_p",
            FamilyKind::Turan => "turan",
            FamilyKind::Custom => "custom",
        }
    }

    /// Parameter names and their box.
    fn parameter_box(self) -> Vec<(&'static str, f64, f64)> {
        match self {
            FamilyKind::ThreeBlockZy => vec![("z", 0.0, 0.5), ("y", 0.0, 1.0)],
            FamilyKind::TwoBlockDiagP => vec![("p", 0.0, 1.0)],
            _ => vec![],
        }
    }
}

/// One member of a construction family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionFamily {
    ThreeBlockZy { z: f64, y: f64 },
    TwoBlockDiagP { p: f64 },
    Turan { k: usize },
    Custom { graphon: StepGraphon },
}

impl ConstructionFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            ConstructionFamily::ThreeBlockZy { .. } => FamilyKind::ThreeBlockZy,
            ConstructionFamily::TwoBlockDiagP { .. } => FamilyKind::TwoBlockDiagP,
            ConstructionFamily::Turan { .. } => FamilyKind::Turan,
            ConstructionFamily::Custom { .. } => FamilyKind::Custom,
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        match self {
            ConstructionFamily::ThreeBlockZy { z, y } => [("z".to_string(), *z), ("y".to_string(), *y)].into(),
            ConstructionFamily::TwoBlockDiagP { p } => [("p".to_string(), *p)].into(),
            ConstructionFamily::Turan { k } => [("k".to_string(), *k as f64)].into(),
            ConstructionFamily::Custom { .. } => BTreeMap::new(),
        }
    }

    /// The graphon, with parameters taken as the binary doubles given.
    pub fn graphon(&self) -> Result<StepGraphon> {
        match self {
            ConstructionFamily::ThreeBlockZy { z, y } => StepGraphon::three_block_zy_f64(*z, *y),
            ConstructionFamily::TwoBlockDiagP { p } => StepGraphon::two_block_diag_p_f64(*p),
            ConstructionFamily::Turan { k } => StepGraphon::turan(*k),
            ConstructionFamily::Custom { graphon } => Ok(graphon.clone()),
        }
    }

    /// The graphon with parameters read as the decimals they print as, exactly.
    pub fn graphon_exact(&self) -> Result<StepGraphon> {
        let dec = |x: f64| rat::parse_q(&format!("{x}"));
        match self {
            ConstructionFamily::ThreeBlockZy { z, y } => StepGraphon::three_block_zy(&dec(*z)?, &dec(*y)?),
            ConstructionFamily::TwoBlockDiagP { p } => StepGraphon::two_block_diag_p(&dec(*p)?),
            _ => self.graphon(),
        }
    }

    fn from_point(kind: FamilyKind, x: &[f64]) -> ConstructionFamily {
        match kind {
            FamilyKind::ThreeBlockZy => ConstructionFamily::ThreeBlockZy { z: x[0], y: x[1] },
            _ => ConstructionFamily::TwoBlockDiagP { p: x[0] },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    UncommonWitness,
    NotStronglyCommonWitness,
    NoConclusion,
}

/// A graphon tested against one of the two thresholds. `margin` is
/// `threshold − mono_value`; a witness needs `margin > tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub graph: Graph,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub graphon: StepGraphon,
    pub mono_value: Density,
    pub threshold: Density,
    pub margin: Density,
    pub tolerance: f64,
    pub verdict: WitnessVerdict,
}

impl WitnessReport {
    pub fn is_witness(&self) -> bool {
        self.verdict != WitnessVerdict::NoConclusion
    }
}

pub(crate) fn build_report(h: &Graph, w: &StepGraphon, mono: Density, threshold: Density, tol: f64, hit: WitnessVerdict) -> WitnessReport {
    let margin = threshold.clone() - mono.clone();
    let verdict = if margin.certainly_above(tol) { hit } else { WitnessVerdict::NoConclusion };
    WitnessReport {
        graph: h.clone(),
        family: FamilyKind::Custom.name().into(),
        params: BTreeMap::new(),
        graphon: w.clone(),
        mono_value: mono,
        threshold,
        margin,
        tolerance: tol,
        verdict,
    }
}

/// Uncommon witness iff `t(H,W) + t(H,1−W) < 2·(1/2)^{e(H)} − tol`.
pub fn check_uncommon(h: &Graph, w: &StepGraphon, tol: f64) -> Result<WitnessReport> {
    check_uncommon_with(h, w, tol, &DensityOptions::default())
}

pub fn check_uncommon_with(h: &Graph, w: &StepGraphon, tol: f64, opts: &DensityOptions) -> Result<WitnessReport> {
    let mono = mono_density_with(h, w, opts)?;
    Ok(build_report(h, w, mono, Density::Exact(density::threshold(h)), tol, WitnessVerdict::UncommonWitness))
}

/// `t(K2,W)^{e(H)} + t(K2,1−W)^{e(H)}`.
pub fn strong_threshold(h: &Graph, w: &StepGraphon, opts: &DensityOptions) -> Result<Density> {
    let k2 = Graph::complete(2);
    let e = h.edge_count() as u32;
    Ok(density_with(&k2, w, opts)?.powi(e) + density_with(&k2, &w.complement(), opts)?.powi(e))
}

/// Witness iff `t(H,W) + t(H,1−W) < t(K2,W)^{e(H)} + t(K2,1−W)^{e(H)}`, strictly.
pub fn check_not_strongly_common(h: &Graph, w: &StepGraphon) -> Result<WitnessReport> {
    check_not_strongly_common_with(h, w, 0.0, &DensityOptions::default())
}

pub fn check_not_strongly_common_with(h: &Graph, w: &StepGraphon, tol: f64, opts: &DensityOptions) -> Result<WitnessReport> {
    let mono = mono_density_with(h, w, opts)?;
    let t = strong_threshold(h, w, opts)?;
    Ok(build_report(h, w, mono, t, tol, WitnessVerdict::NotStronglyCommonWitness))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChromaticTest {
    pub chromatic_number: usize,
    pub components: usize,
    /// `(1/(k−1))^{v(H)−m}`.
    #[serde(with = "opt_q")]
    pub lhs: Option<Q>,
    /// `((k−2)/(k−1))^{e(H)} + (1/(k−1))^{e(H)}`.
    #[serde(with = "opt_q")]
    pub rhs: Option<Q>,
    /// Whether `t(H,W) = 0` and `t(H,1−W) = lhs` were confirmed by enumeration.
    pub cross_checked: bool,
    pub report: WitnessReport,
}

mod opt_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.as_ref().map(rat::fmt_q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let v: Option<String> = Option::deserialize(d)?;
        v.map(|s| rat::parse_q(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Tests the chromatic-number criterion for failing strong commonness, using
/// the complete `(χ−1)`-partite graphon.
pub fn chromatic_strongly_common_test(h: &Graph) -> Result<ChromaticTest> {
    let k = h.chromatic_number()?;
    let m = h.component_count();
    let (v, e) = (h.vertex_count() as u32, h.edge_count() as u32);
    let w = StepGraphon::turan(k.max(2))?;
    if k < 2 {
        let mono = Density::Exact(qi(1) + if e == 0 { qi(1) } else { Q::zero() });
        let mut report = build_report(h, &w, mono.clone(), mono, 0.0, WitnessVerdict::NotStronglyCommonWitness);
        report.family = FamilyKind::Turan.name().into();
        return Ok(ChromaticTest { chromatic_number: k, components: m, lhs: None, rhs: None, cross_checked: false, report });
    }
    let inv = q(1, k as i64 - 1);
    let lhs = rat::pow_q(&inv, v - m as u32);
    let rhs = rat::pow_q(&(q(k as i64 - 2, 1) * &inv), e) + rat::pow_q(&inv, e);
    let opts = DensityOptions { mode: Mode::Rational, ..Default::default() };
    let cross_checked = match (density_with(h, &w, &opts), density_with(h, &w.complement(), &opts)) {
        (Ok(a), Ok(b)) => {
            if a != Density::Exact(Q::zero()) || b != Density::Exact(lhs.clone()) {
                return Err(Error::Consistency(format!("chromatic test: t(H,W) = {a:?}, t(H,1-W) = {b:?}, expected 0 and {}", rat::fmt_q(&lhs))));
            }
            true
        }
        (Err(Error::BudgetExceeded { .. }), _) | (_, Err(Error::BudgetExceeded { .. })) => false,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let mut report = build_report(h, &w, Density::Exact(lhs.clone()), Density::Exact(rhs.clone()), 0.0, WitnessVerdict::NotStronglyCommonWitness);
    report.family = FamilyKind::Turan.name().into();
    report.params = ConstructionFamily::Turan { k }.params();
    Ok(ChromaticTest { chromatic_number: k, components: m, lhs: Some(lhs), rhs: Some(rhs), cross_checked, report })
}

/// `p = 1 − 2^{−1/e}`: the diagonal value making `2(1−p)^e = 2^{1−…}` balance.
fn balanced_p(e: f64) -> f64 {
    1.0 - 2f64.powf(-1.0 / e)
}

fn two_pow(e: u32) -> Density {
    Density::Exact(rat::pow_q(&qi(2), e))
}

/// `2(1−u)(2−u)^α(3 + (u−1)²)` with `u = 2^{−1/(3+α)}`: the scaled
/// two-block density per triangle.
pub fn two_block_factor(alpha: &Q) -> Interval {
    let a = Interval::from_q(alpha);
    let u = Interval::point(2.0).pow(&(-(Interval::point(1.0) / (Interval::point(3.0) + a))));
    let one = Interval::point(1.0);
    let two = Interval::point(2.0);
    two * (one - u) * (two - u).pow(&a) * (Interval::point(3.0) + (u - one).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBound {
    pub k: u32,
    pub ell: u32,
    pub alpha: f64,
    pub p: f64,
    pub graph_edges: u32,
    pub t_w: Density,
    pub t_complement: Density,
    /// `t(H,W)·2^{3k+ℓ}`; must stay below `factor^k`.
    pub scaled_w: f64,
    pub factor_power: f64,
    /// `t(H,1−W)·2^{3k+ℓ}`; equal to 1 up to rounding of `p`.
    pub bracket: f64,
    pub bracket_error: f64,
    /// Upper end of the per-triangle factor at the ratio itself.
    pub factor_at_ratio: f64,
    /// Whether the factor was seen to decrease on a grid of `α ∈ [0, 2]`.
    pub factor_decreasing: bool,
    pub holds: bool,
    pub report: WitnessReport,
}

/// The two-block witness for `(k·K3) ⊔ (ℓ·K2)` with `ℓ = ⌈1.9665·k⌉`.
pub fn uncommon_family_bound(k: u32) -> Result<FamilyBound> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let ell = rat::ceil_q(&(family_ratio() * qi(k as i64)));
    let ell: u32 = ell.try_into().map_err(|_| Error::Domain("ℓ too large".into()))?;
    let alpha_q = q(ell as i64, k as i64);
    let alpha = rat::to_f64(&alpha_q);
    let p = balanced_p(3.0 + alpha);
    let h = Graph::disjoint_union(&[Graph::complete(3).copies(k as usize), Graph::complete(2).copies(ell as usize)]);
    let w = ConstructionFamily::TwoBlockDiagP { p }.graphon()?;
    let opts = DensityOptions { mode: Mode::Float, ..Default::default() };
    let t_w = density_with(&h, &w, &opts)?;
    let t_c = density_with(&h, &w.complement(), &opts)?;
    let e = 3 * k + ell;
    let scaled = (t_w.clone() * two_pow(e)).enclosure();
    let bracket = (t_c.clone() * two_pow(e)).enclosure();
    let factor_power = Interval::from_q(&family_factor()).powi(k as i32);
    let at_ratio = two_block_factor(&family_ratio());
    let grid: Vec<f64> = (0..=200).map(|i| two_block_factor(&q(i, 100)).mid()).collect();
    let factor_decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    let mut report = check_uncommon_with(&h, &w, 0.0, &opts)?;
    report.family = FamilyKind::TwoBlockDiagP.name().into();
    report.params = ConstructionFamily::TwoBlockDiagP { p }.params();
    let bracket_error = (bracket.hi - 1.0).max(1.0 - bracket.lo);
    let holds = scaled.hi < factor_power.lo && bracket_error <= 1e-12 && at_ratio.hi < rat::to_f64(&family_factor()) && report.verdict == WitnessVerdict::UncommonWitness;
    Ok(FamilyBound {
        k,
        ell,
        alpha,
        p,
        graph_edges: e,
        t_w,
        t_complement: t_c,
        scaled_w: scaled.hi,
        factor_power: factor_power.lo,
        bracket: bracket.mid(),
        bracket_error,
        factor_at_ratio: at_ratio.hi,
        factor_decreasing,
        holds,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleMethod {
    Direct,
    AmGm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddCycleCertificate {
    pub k: u32,
    pub r: u32,
    pub p: f64,
    pub graph_edges: u32,
    /// `rhs − lhs` of `(2−u)^{4r+1} < 1 + 2^{−(2r+1)/(4r+1)} (2−u)^{2r}`, `u = 2^{−1/(4r+1)}` (lower end).
    pub direct_margin: f64,
    /// `2^{(6r+1)/(8r+2)} − (2−u)^{3r+1}` (lower end).
    pub amgm_step_margin: f64,
    /// `1/(4r+1) − 1/(2(3r+1)(4r+1)) − √(1/(ln 4 (3r+1)(4r+1)))` (lower end).
    pub amgm_final_margin: f64,
    pub method: CycleMethod,
    /// `t(C_{2r+1},W)` by the transfer matrix and by the eigenvalue formula.
    pub cycle_density: f64,
    pub cycle_closed_form: f64,
    pub bracket: f64,
    pub bracket_error: f64,
    pub scaled_w: f64,
    pub holds: bool,
    pub report: WitnessReport,
}

/// The two-block witness for `(k·C_{2r+1}) ⊔ (2rk·K2)`.
pub fn uncommon_odd_cycle_family(k: u32, r: u32) -> Result<OddCycleCertificate> {
    if k == 0 || r == 0 {
        return Err(Error::Domain("k and r must be at least 1".into()));
    }
    let len = 2 * r + 1;
    let n = 4 * r + 1;
    let p = balanced_p(n as f64);
    let w = ConstructionFamily::TwoBlockDiagP { p }.graphon()?;
    let opts = DensityOptions { mode: Mode::Float, ..Default::default() };
    let k2 = Graph::complete(2);
    let t_c = cycle_density(len as usize, &w, Mode::Float)?;
    let t_cc = cycle_density(len as usize, &w.complement(), Mode::Float)?;
    let t_e = density_with(&k2, &w, &opts)?;
    let t_ec = density_with(&k2, &w.complement(), &opts)?;
    let t_w = t_c.powi(k) * t_e.powi(2 * r * k);
    let t_comp = t_cc.powi(k) * t_ec.powi(2 * r * k);
    let e = n * k;
    let scaled = (t_w * two_pow(e)).enclosure();
    let bracket = (t_comp * two_pow(e)).enclosure();
    let closed = ((p + 1.0) / 2.0).powi(len as i32) + ((p - 1.0) / 2.0).powi(len as i32);

    let (one, two) = (Interval::point(1.0), Interval::point(2.0));
    let ni = Interval::point(n as f64);
    let u = two.pow(&(-(one / ni)));
    let lhs = (two - u).powi(n as i32);
    let rhs = one + two.pow(&(-(Interval::point(len as f64) / ni))) * (two - u).powi(2 * r as i32);
    let direct_margin = (rhs - lhs).lo;
    let step = two.pow(&(Interval::point((6 * r + 1) as f64) / Interval::point((8 * r + 2) as f64))) - (two - u).powi(3 * r as i32 + 1);
    let prod = Interval::point((3 * r + 1) as f64) * ni;
    let fin = one / ni - one / (two * prod) - (one / (Interval::point(4.0).ln() * prod)).sqrt();
    let method = if r <= 6 { CycleMethod::Direct } else { CycleMethod::AmGm };
    let chain_ok = match method {
        CycleMethod::Direct => direct_margin > 0.0,
        CycleMethod::AmGm => step.lo >= 0.0 && fin.lo > 0.0,
    };
    let h = Graph::disjoint_union(&[Graph::cycle(len as usize)?.copies(k as usize), k2.copies((2 * r * k) as usize)]);
    let mono = (t_c.powi(k) * t_e.powi(2 * r * k)) + (t_cc.powi(k) * t_ec.powi(2 * r * k));
    let mut report = build_report(&h, &w, mono, Density::Exact(density::threshold(&h)), 0.0, WitnessVerdict::UncommonWitness);
    report.family = FamilyKind::TwoBlockDiagP.name().into();
    report.params = ConstructionFamily::TwoBlockDiagP { p }.params();
    let bracket_error = (bracket.hi - 1.0).max(1.0 - bracket.lo);
    let holds = chain_ok && scaled.hi < 1.0 && bracket_error <= 1e-12 && report.verdict == WitnessVerdict::UncommonWitness;
    Ok(OddCycleCertificate {
        k,
        r,
        p,
        graph_edges: e,
        direct_margin,
        amgm_step_margin: step.lo,
        amgm_final_margin: fin.lo,
        method,
        cycle_density: t_c.to_f64(),
        cycle_closed_form: closed,
        bracket: bracket.mid(),
        bracket_error,
        scaled_w: scaled.hi,
        holds,
        report,
    })
}

/// Result of a parameter search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub family: FamilyKind,
    pub best: ConstructionFamily,
    /// Objective at the best point, in plain doubles.
    pub best_value: f64,
    pub evaluations: u64,
    pub report: WitnessReport,
}

struct Objective {
    plan: DensityPlan,
    kind: FamilyKind,
}

impl Objective {
    fn tables(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            FamilyKind::ThreeBlockZy => {
                let (z, y) = (x[0], x[1]);
                (vec![1.0 - 2.0 * z, z, z], vec![0.0, 1.0, 1.0, 1.0, 0.0, y, 1.0, y, 0.0])
            }
            _ => (vec![0.5, 0.5], vec![x[0], 1.0, 1.0, x[0]]),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let (w, a) = self.tables(x);
        let ac: Vec<f64> = a.iter().map(|v| 1.0 - v).collect();
        self.plan.eval_f64(&w, &a) + self.plan.eval_f64(&w, &ac)
    }
}

fn clamp_box(x: &mut [f64], bx: &[(&str, f64, f64)]) {
    for (v, &(_, lo, hi)) in x.iter_mut().zip(bx) {
        *v = v.clamp(lo, hi);
    }
}

// Nelder–Mead on a box (points are clamped into it); returns (value, point, evaluations).
fn simplex_descent(obj: &Objective, start: &[f64], bx: &[(&str, f64, f64)], max_evals: u64) -> (f64, Vec<f64>, u64) {
    let d = start.len();
    let mut evals = 0u64;
    let f = |x: &[f64], evals: &mut u64| {
        *evals += 1;
        obj.eval(x)
    };
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d + 1);
    simplex.push((f(start, &mut evals), start.to_vec()));
    for i in 0..d {
        let mut x = start.to_vec();
        let step = 0.05 * (bx[i].2 - bx[i].1);
        x[i] = if x[i] + step <= bx[i].2 { x[i] + step } else { x[i] - step };
        simplex.push((f(&x, &mut evals), x));
    }
    for _ in 0..SIMPLEX_ITERS {
        if evals + (d as u64 + 2) > max_evals {
            break;
        }
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)));
        let worst = simplex[d].clone();
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|(_, x)| x[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| {
            let mut x: Vec<f64> = (0..d).map(|j| centroid[j] + t * (worst.1[j] - centroid[j])).collect();
            clamp_box(&mut x, bx);
            x
        };
        let xr = along(-1.0);
        let fr = f(&xr, &mut evals);
        if fr < simplex[0].0 {
            let xe = along(-2.0);
            let fe = f(&xe, &mut evals);
            simplex[d] = if fe < fr { (fe, xe) } else { (fr, xr) };
        } else if fr < simplex[d - 1].0 {
            simplex[d] = (fr, xr);
        } else {
            let xc = if fr < worst.0 { along(-0.5) } else { along(0.5) };
            let fc = f(&xc, &mut evals);
            if fc < worst.0.min(fr) {
                simplex[d] = (fc, xc);
            } else {
                let best = simplex[0].1.clone();
                for s in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..d).map(|j| best[j] + 0.5 * (s.1[j] - best[j])).collect();
                    *s = (f(&x, &mut evals), x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (v, x) = simplex.swap_remove(0);
    (v, x, evals)
}

fn best_report(h: &Graph, w: &StepGraphon, tol: f64) -> Result<WitnessReport> {
    let opts = DensityOptions::default();
    let u = check_uncommon_with(h, w, tol, &opts)?;
    if u.is_witness() {
        return Ok(u);
    }
    let s = check_not_strongly_common_with(h, w, tol, &opts)?;
    Ok(if s.is_witness() { s } else { u })
}

/// Grid scan followed by simplex descent from the best grid point and from
/// seeded random restarts, minimizing `t(H,W) + t(H,1−W)` over the family.
/// `budget` caps objective evaluations.
pub fn search_witness(h: &Graph, family: FamilyKind, budget: u64, seed: u64, tol: f64) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Domain("search budget must be positive".into()));
    }
    match family {
        FamilyKind::Custom => return Err(Error::Unsupported("a custom graphon has no parameters to search".into())),
        FamilyKind::Turan => return search_turan(h, budget, tol),
        _ => {}
    }
    let bx = family.parameter_box();
    let d = bx.len();
    let plan = DensityPlan::new(h);
    plan.check_budget(if d == 2 { 3 } else { 2 }, density::DEFAULT_BUDGET)?;
    let obj = Objective { plan, kind: family };

    let per_axis = if d == 2 { GRID.min(((budget / 2) as f64).sqrt() as usize).max(2) } else { GRID.min(budget as usize / 2).max(2) };
    let points: Vec<Vec<f64>> = if d == 2 {
        (0..per_axis * per_axis).map(|i| vec![axis(&bx[0], i / per_axis, per_axis), axis(&bx[1], i % per_axis, per_axis)]).collect()
    } else {
        (0..per_axis).map(|i| vec![axis(&bx[0], i, per_axis)]).collect()
    };
    let values: Vec<f64> = density::install(|| points.par_iter().map(|x| obj.eval(x)).collect());
    let mut evaluations = points.len() as u64;
    let best_grid = (0..points.len()).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(points[a].partial_cmp(&points[b]).unwrap())).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![points[best_grid].clone()];
    for _ in 1..RESTARTS {
        starts.push(bx.iter().map(|&(_, lo, hi)| rng.gen_range(lo..=hi)).collect());
    }
    let remaining = budget.saturating_sub(evaluations);
    let share = remaining / RESTARTS as u64;
    let mut candidates: Vec<(f64, Vec<f64>)> = vec![(values[best_grid], points[best_grid].clone())];
    if share > d as u64 + 3 {
        let runs: Vec<(f64, Vec<f64>, u64)> = density::install(|| starts.par_iter().map(|s| simplex_descent(&obj, s, &bx, share)).collect());
        for (v, x, n) in runs {
            evaluations += n;
            candidates.push((v, x));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
    let (best_value, x) = candidates.swap_remove(0);
    let best = ConstructionFamily::from_point(family, &x);
    let mut report = best_report(h, &best.graphon()?, tol)?;
    report.family = family.name().into();
    report.params = best.params();
    Ok(SearchResult { family, best, best_value, evaluations, report })
}

fn axis(b: &(&str, f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        b.2
    } else {
        b.1 + (b.2 - b.1) * i as f64 / (n - 1) as f64
    }
}

// Tries every complete-partite graphon with up to v(H) parts.
fn search_turan(h: &Graph, budget: u64, tol: f64) -> Result<SearchResult> {
    let top = (h.vertex_count() + 1).clamp(2, 13).min(budget as usize + 1);
    let mut best: Option<(WitnessReport, usize, f64)> = None;
    let mut evaluations = 0;
    for k in 2..=top {
        let w = StepGraphon::turan(k)?;
        let mut r = best_report(h, &w, tol)?;
        evaluations += 1;
        r.family = FamilyKind::Turan.name().into();
        r.params = ConstructionFamily::Turan { k }.params();
        let rank = |r: &WitnessReport| match r.verdict {
            WitnessVerdict::UncommonWitness => 0,
            WitnessVerdict::NotStronglyCommonWitness => 1,
            WitnessVerdict::NoConclusion => 2,
        };
        let score = r.margin.to_f64() / r.threshold.to_f64().max(f64::MIN_POSITIVE);
        let better = match &best {
            None => true,
            Some((b, _, s)) => (rank(&r), -score) < (rank(b), -*s),
        };
        if better {
            best = Some((r, k, score));
        }
    }
    let (report, k, _) = best.expect("at least one part count tried");
    Ok(SearchResult { family: FamilyKind::Turan, best: ConstructionFamily::Turan { k }, best_value: report.mono_value.to_f64(), evaluations, report })
}

/// `t(K3,W)` and `t(K3,1−W)` for the two-block family, in closed form.
pub fn two_block_triangle_densities(p: &Q) -> (Q, Q) {
    let one = Q::one();
    let t = rat::pow_q(p, 3) / qi(4) + qi(3) * p / qi(4);
    let c = rat::pow_q(&(&one - p), 3) / qi(4);
    (t, c)
}
