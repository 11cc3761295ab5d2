//! Classification of graphs built from triangles and edges: correlation
//! records are matched against the known commonness rules, and uncommon
//! verdicts are backed by an explicit, re-checked step graphon.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bound::BoundFunction;
use crate::commonality::{self, ConstructionFamily, WitnessReport, WitnessVerdict};
use crate::density::{self, density_with, Density, DensityOptions, Mode};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::StepGraphon;
use crate::k3tree::{k3_tree_correlation, CorrelationRecord, K3Tree};
use crate::rat::{self, q, qi, Q};
use crate::reduction::verify::DEFAULT_RESOLUTION;
use crate::reduction::{self, Certificate, ReductionProblem, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Common,
    Uncommon,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub graph: Graph,
    pub status: Status,
    /// Which rule produced the status.
    pub rule: String,
    /// Reference to the evidence: a reduction certificate or a witness graphon.
    pub certificate_ref: Option<String>,
}

impl Verdict {
    fn unknown(graph: Graph, rule: impl Into<String>) -> Verdict {
        Verdict { graph, status: Status::Unknown, rule: rule.into(), certificate_ref: None }
    }
}

/// The arithmetic of the Hölder step that lifts the three-triangle base case
/// to `k ≥ 4` triangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReduction {
    pub k: i64,
    #[serde(with = "rat::as_text")]
    pub ell: Q,
    #[serde(with = "rat::as_text")]
    pub p: Q,
    #[serde(with = "rat::as_text")]
    pub q: Q,
    #[serde(with = "rat::as_text")]
    pub alpha: Q,
    /// Base-case exponent: the three-triangle problem with `ℓ = r/3`.
    pub r: i64,
    #[serde(with = "rat::as_text")]
    pub alpha_q: Q,
}

/// `3ℓ/k + α = r/3`, `0 ≤ r ≤ 15`, `αq ≤ 1`, and the final power of 2
/// collapsing to `2·(1/2)^{3k+ℓ}`, all checked exactly.
pub fn holder_reduce(k: i64, ell: &Q) -> Result<HolderReduction> {
    if k < 4 {
        return Err(Error::Domain(format!("Hölder step needs k ≥ 4, got {k}")));
    }
    if ell.is_negative() || *ell > q(5 * k, 3) {
        return Err(Error::Domain(format!("ℓ = {} outside [0, 5k/3]", rat::fmt_q(ell))));
    }
    let kq = qi(k);
    let nine = qi(9) * ell / &kq;
    let r = rat::ceil_q(&nine).to_i64().ok_or_else(|| Error::Domain("r out of range".into()))?;
    let alpha = (qi(r) - &nine) / qi(3);
    let p = &kq / qi(3);
    let qq = &kq / qi(k - 3);
    let alpha_q = &alpha * &qq;
    let red = HolderReduction { k, ell: ell.clone(), p, q: qq, alpha, r, alpha_q };
    red.check()?;
    Ok(red)
}

impl HolderReduction {
    fn check(&self) -> Result<()> {
        let kq = qi(self.k);
        let fail = |what: &str| Err(Error::Consistency(format!("Hölder step, k = {}, ℓ = {}: {what}", self.k, rat::fmt_q(&self.ell))));
        if qi(3) * &self.ell / &kq + &self.alpha != q(self.r, 3) {
            return fail("3ℓ/k + α ≠ r/3");
        }
        if !(0..=15).contains(&self.r) {
            return fail("r outside [0, 15]");
        }
        if self.alpha_q > qi(1) || self.alpha.is_negative() {
            return fail("αq outside [0, 1]");
        }
        // 2^{−(8+r/3)k/3} / (2^{(k−3)/3} 2^{−αk/3}) = 2^{1−3k−ℓ}
        let rq = qi(self.r);
        let exponent = -(qi(8) + &rq / qi(3)) * &kq / qi(3) - (&kq - qi(3)) / qi(3) + &self.alpha * &kq / qi(3);
        if exponent != qi(1) - qi(3) * &kq - &self.ell {
            return fail("power of 2 does not collapse to 2·(1/2)^{e(H)}");
        }
        Ok(())
    }

    /// `t(K2,W)^ℓ t(K3,W)^k + t(K2,1−W)^ℓ t(K3,1−W)^k` and the bound it must
    /// exceed, in doubles.
    pub fn endpoint(&self, t2: f64, t3: f64, t2c: f64, t3c: f64) -> (f64, f64) {
        let (k, l) = (self.k as f64, rat::to_f64(&self.ell));
        let lhs = t2.powf(l) * t3.powf(k) + t2c.powf(l) * t3c.powf(k);
        (lhs, 2f64.powf(1.0 - 3.0 * k - l))
    }
}

/// Problem behind the two-triangle rule, with the linear triangle floor.
pub fn two_triangle_problem(ell: i64) -> ReductionProblem {
    ReductionProblem { rho: BoundFunction::BollobasLinear, ..ReductionProblem::two_triangles(ell) }
}

fn two_triangle_ref(ell: i64) -> String {
    format!("reduction/two_triangles/ell={ell}")
}

fn three_triangle_ref(r: i64) -> String {
    format!("reduction/three_triangles/r={r}")
}

fn certificate_cache() -> &'static Mutex<HashMap<String, Arc<Certificate>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Certificate>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Builds (once per process) the reduction certificate a verdict refers to.
pub fn resolve_certificate(reference: &str) -> Result<Arc<Certificate>> {
    if let Some(c) = certificate_cache().lock().unwrap().get(reference) {
        return Ok(c.clone());
    }
    let bad = || Error::Parse(format!("unknown certificate reference {reference:?}"));
    let (head, value) = reference.rsplit_once('=').ok_or_else(bad)?;
    let n: i64 = value.parse().map_err(|_| bad())?;
    let problem = match head {
        "reduction/two_triangles/ell" if (0..=2).contains(&n) => two_triangle_problem(n),
        "reduction/three_triangles/r" if (0..=15).contains(&n) => ReductionProblem::three_triangles(n),
        _ => return Err(bad()),
    };
    let cert = Arc::new(reduction::verify_reduction(&problem, Strategy::GridWithMargin, DEFAULT_RESOLUTION)?);
    certificate_cache().lock().unwrap().insert(reference.to_string(), cert.clone());
    Ok(cert)
}

fn cited(graph: Graph, rule: &str, reference: String) -> Result<Verdict> {
    let cert = resolve_certificate(&reference)?;
    if cert.verdict != reduction::Verdict::Holds {
        return Ok(Verdict::unknown(graph, format!("{rule} (base case not certified)")));
    }
    Ok(Verdict { graph, status: Status::Common, rule: rule.into(), certificate_ref: Some(reference) })
}

/// The commonness rule for a `(K3, k, ℓ)`-correlated graph with integer
/// parameters, with the certificate it rests on.
fn common_rule(k: i64, ell: i64) -> Option<(&'static str, String)> {
    if ell < 0 {
        return None;
    }
    match k {
        2 if ell <= 2 => Some(("two_triangle_reduction", two_triangle_ref(ell))),
        3 if ell <= 5 => Some(("three_triangle_reduction", three_triangle_ref(3 * ell))),
        k if k >= 4 && 3 * ell <= 5 * k => {
            let h = holder_reduce(k, &qi(ell)).ok()?;
            Some(("holder_reduction", three_triangle_ref(h.r)))
        }
        _ => None,
    }
}

/// `10000·ℓ ≥ 19665·k`, compared exactly.
fn meets_edge_ratio(k: i64, ell: i64) -> bool {
    k >= 1 && qi(ell) >= commonality::family_ratio() * qi(k)
}

/// Rules declaring `(k·K3) ⊔ (ℓ·K2)` uncommon.
fn uncommon_rule(k: i64, ell: i64) -> Option<&'static str> {
    match (k, ell) {
        (1, 1) => Some("triangle_edge_witness"),
        (2, 3) => Some("two_triangle_three_edge_witness"),
        _ if meets_edge_ratio(k, ell) => Some("two_block_witness"),
        _ => None,
    }
}

/// Rules declaring `(k·K3) ⊔ (ℓ·K2)` common, including the ones outside the
/// correlation framework.
fn union_common_rule(k: i64, ell: i64) -> Option<(&'static str, Option<String>)> {
    match (k, ell) {
        (0, _) => Some(("edges_are_sidorenko", None)),
        (1, 0) => Some(("goodman", None)),
        _ => common_rule(k, ell).map(|(r, c)| (r, Some(c))),
    }
}

/// `(z, y)` of the three-block witnesses used for small unions.
fn zy_witness(k: i64, ell: i64) -> Option<(&'static str, &'static str)> {
    match (k, ell) {
        (1, 1) => Some(("0.263661", "0.2177")),
        (2, 3) => Some(("0.28", "0.42")),
        _ => None,
    }
}

/// Two-block graphon for edge-to-triangle ratio `alpha`: diagonal
/// `p = 1 − 2^{−1/(3+α)}`, off-diagonal 1.
pub fn two_block_witness(alpha: f64) -> Result<StepGraphon> {
    ConstructionFamily::TwoBlockDiagP { p: 1.0 - 2f64.powf(-1.0 / (3.0 + alpha)) }.graphon()
}

fn witness_verdict(graph: Graph, rule: &str, report: &WitnessReport) -> Verdict {
    if report.verdict != WitnessVerdict::UncommonWitness {
        return Verdict::unknown(graph, format!("{rule} (witness not confirmed)"));
    }
    let params = report.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
    Verdict { graph, status: Status::Uncommon, rule: rule.into(), certificate_ref: Some(format!("witness/{}/{params}", report.family)) }
}

/// Status of `(k·K3) ⊔ (ℓ·K2)`.
pub fn classify_k3_k2_union(k: usize, ell: usize) -> Result<Verdict> {
    let graph = Graph::disjoint_union(&[Graph::complete(3).copies(k), Graph::complete(2).copies(ell)]);
    let (ki, li) = (k as i64, ell as i64);
    if let Some((rule, reference)) = union_common_rule(ki, li) {
        return match reference {
            Some(r) => cited(graph, rule, r),
            None => Ok(Verdict { graph, status: Status::Common, rule: rule.into(), certificate_ref: None }),
        };
    }
    let Some(rule) = uncommon_rule(ki, li) else {
        return Ok(Verdict::unknown(graph, "between_known_bounds"));
    };
    let mut report = if let Some((z, y)) = zy_witness(ki, li) {
        let w = StepGraphon::three_block_zy(&rat::parse_q(z)?, &rat::parse_q(y)?)?;
        let mut r = commonality::check_uncommon(&graph, &w, 0.0)?;
        r.family = "three_block_zy".into();
        r.params = [("z".to_string(), z.parse().unwrap()), ("y".to_string(), y.parse().unwrap())].into();
        r
    } else {
        let alpha = li as f64 / ki as f64;
        let w = two_block_witness(alpha)?;
        let opts = DensityOptions { mode: Mode::Float, ..Default::default() };
        commonality::check_uncommon_with(&graph, &w, 0.0, &opts)?
    };
    if report.family == "custom" {
        report.family = "two_block_diag_p".into();
        report.params = [("p".to_string(), report.graphon.values_f64()[0])].into();
    }
    Ok(witness_verdict(graph, rule, &report))
}

/// Whether a graph with `v` vertices and `e` edges is a triangle.
fn is_triangle(g: &Graph) -> bool {
    g.vertex_count() == 3 && g.edge_count() == 3
}

/// Commonness of a `(K3, k, ℓ)`-correlated graph.
pub fn check_correlated_common(rec: &CorrelationRecord) -> Result<Verdict> {
    if !is_triangle(&rec.base_graph) {
        return Err(Error::Unsupported("only triangle-based correlation records are classified".into()));
    }
    let graph = rec.subject.clone();
    let (Some(k), true) = (rec.integer_power(), rec.edge_exponent.is_integer()) else {
        return Ok(Verdict::unknown(graph, "non_integer_parameters"));
    };
    let ell = rec.edge_exponent.to_integer().to_i64().ok_or_else(|| Error::Domain("ℓ out of range".into()))?;
    match common_rule(k, ell) {
        Some((rule, reference)) => cited(graph, rule, reference),
        None => Ok(Verdict::unknown(graph, "outside_correlation_rules")),
    }
}

/// `H(T) ⊔ F` for a Sidorenko graph `F` with `f_edges` edges: common when the
/// combined record `(K3, v3, e(F) − e2 + v2)` falls under a correlation rule.
pub fn check_union_with_sidorenko(t: &K3Tree, f_edges: usize) -> Result<Verdict> {
    let c = t.counts();
    if c.gamma() < 0 {
        return Err(Error::Precondition(format!("needs e2 ≥ v2, got e2 = {}, v2 = {}", c.e[2], c.v[2])));
    }
    let h = t.realize()?;
    let k = c.v[3] as i64;
    let ell = f_edges as i64 - c.gamma();
    let rule = format!("tree_plus_sidorenko(e(F)={f_edges})");
    if k < 2 || ell < 0 {
        return Ok(Verdict::unknown(h, rule));
    }
    // the record is certified by the tree correlation and the Sidorenko property of F
    k3_tree_correlation(t)?;
    match common_rule(k, ell) {
        Some((base, reference)) => cited(h, &format!("{rule}+{base}"), reference),
        None => Ok(Verdict::unknown(h, rule)),
    }
}

/// Uncommonness of a vertex-glued triangle tree with enough pendant edges:
/// `v2 ≥ 1.9665·v3` (compared exactly), witnessed by the two-block graphon.
pub fn triangle_vertex_tree_uncommon(t: &K3Tree) -> Result<Verdict> {
    let c = t.counts();
    if c.e[2] != 0 {
        return Err(Error::Precondition(format!("needs e2 = 0, got {}", c.e[2])));
    }
    let h = t.realize()?;
    let (v2, v3) = (c.v[2] as i64, c.v[3] as i64);
    if v3 == 0 || !meets_edge_ratio(v3, v2) {
        return Ok(Verdict::unknown(h, "vertex_tree_ratio_not_met"));
    }
    let w = two_block_witness(v2 as f64 / v3 as f64)?;
    let report = vertex_tree_witness(&h, &w, v3 as u32, v2 as u32)?;
    Ok(witness_verdict(h, "vertex_tree_two_block_witness", &report))
}

/// Checks the witness directly when the enumeration fits the budget, and
/// otherwise through the product formula, which holds here because every
/// vertex of the two-block graphon has the same degree and the tree glues
/// only at single vertices.
fn vertex_tree_witness(h: &Graph, w: &StepGraphon, v3: u32, v2: u32) -> Result<WitnessReport> {
    let opts = DensityOptions { mode: Mode::Float, ..Default::default() };
    let mut report = match commonality::check_uncommon_with(h, w, 0.0, &opts) {
        Err(Error::BudgetExceeded { .. }) => {
            let (k3, k2) = (Graph::complete(3), Graph::complete(2));
            let wc = w.complement();
            let side = |w: &StepGraphon| -> Result<Density> { Ok(density_with(&k3, w, &opts)?.powi(v3) * density_with(&k2, w, &opts)?.powi(v2)) };
            let mono = side(w)? + side(&wc)?;
            commonality::build_report(h, w, mono, Density::Exact(density::threshold(h)), 0.0, WitnessVerdict::UncommonWitness)
        }
        other => other?,
    };
    report.family = "two_block_diag_p".into();
    report.params = [("p".to_string(), w.values_f64()[0])].into();
    Ok(report)
}

/// Largest common and smallest uncommon `ℓ` known for `k` triangles, as
/// `(common_max, uncommon_min)`. `None` where no rule applies.
pub fn known_edge_range(k: usize) -> (Option<usize>, Option<usize>) {
    let ki = k as i64;
    let common = (0..=4 * k + 4).rev().find(|&l| union_common_rule(ki, l as i64).is_some());
    let uncommon = if k == 0 { None } else { (0..=4 * k + 4).find(|&l| uncommon_rule(ki, l as i64).is_some()) };
    (common, uncommon)
}

/// Pairs `(k, ℓ)` in range for which both a common and an uncommon rule fire.
pub fn rule_conflicts(k_max: usize, l_max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        for l in 0..=l_max {
            if union_common_rule(k as i64, l as i64).is_some() && uncommon_rule(k as i64, l as i64).is_some() {
                out.push((k, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn holder_examples() {
        let h = holder_reduce(9, &qi(15)).unwrap();
        assert_eq!((h.r, h.alpha.clone()), (15, Q::zero()));
        let h = holder_reduce(4, &qi(0)).unwrap();
        assert_eq!((h.r, h.q.clone()), (0, qi(4)));
        let h = holder_reduce(5, &qi(8)).unwrap();
        assert_eq!((h.r, h.alpha.clone(), h.alpha_q.clone()), (15, q(1, 5), q(1, 2)));
        assert!(holder_reduce(3, &qi(1)).is_err());
        assert!(holder_reduce(6, &qi(11)).is_err());
    }

    #[test]
    fn union_examples() {
        let s = |k, l| classify_k3_k2_union(k, l).unwrap().status;
        assert_eq!(s(2, 2), Status::Common);
        assert_eq!(s(2, 3), Status::Uncommon);
        assert_eq!(s(3, 5), Status::Common);
        assert_eq!(s(3, 6), Status::Uncommon);
        assert_eq!(s(4, 7), Status::Unknown);
        assert_eq!(s(1, 1), Status::Uncommon);
        assert_eq!(s(1, 0), Status::Common);
        assert_eq!(s(0, 4), Status::Common);
        assert_eq!(s(1, 2), Status::Uncommon);
        let v = classify_k3_k2_union(2, 3).unwrap();
        assert!(v.certificate_ref.unwrap().starts_with("witness/three_block_zy/"));
    }

    #[test]
    fn no_conflicts() {
        assert!(rule_conflicts(20, 40).is_empty());
        assert_eq!(known_edge_range(2), (Some(2), Some(3)));
        assert_eq!(known_edge_range(4), (Some(6), Some(8)));
    }

    #[test]
    fn correlated_records() {
        let full = || [0u8, 1, 2].into();
        let bowtie = K3Tree::new(vec![full(), full()], vec![((0, 1), [0u8].into())]).unwrap();
        let rec = k3_tree_correlation(&bowtie).unwrap();
        assert_eq!(check_correlated_common(&rec).unwrap().status, Status::Common);
        let rec = CorrelationRecord::k3_k2_union(3, 5);
        assert_eq!(check_correlated_common(&rec).unwrap().status, Status::Common);
        // no graph has 8.5 edges, so such a record only exists unvalidated
        assert!(CorrelationRecord::new(Graph::complete(3), qi(2), q(5, 2), Graph::complete(4)).is_err());
        let half = CorrelationRecord { base_graph: Graph::complete(3), power: qi(2), edge_exponent: q(5, 2), subject: Graph::complete(4) };
        assert_eq!(check_correlated_common(&half).unwrap().status, Status::Unknown);
        let bad = CorrelationRecord::new(Graph::complete(2), qi(1), qi(0), Graph::complete(2)).unwrap();
        assert!(check_correlated_common(&bad).is_err());
    }

    #[test]
    fn sidorenko_unions() {
        let full = || [0u8, 1, 2].into();
        let glued = K3Tree::new(vec![full(), full()], vec![((0, 1), [0u8, 1].into())]).unwrap();
        assert_eq!(check_union_with_sidorenko(&glued, 3).unwrap().status, Status::Common);
        let star = K3Tree::disjoint_triangles(3).unwrap();
        assert_eq!(check_union_with_sidorenko(&star, 5).unwrap().status, Status::Common);
        assert_eq!(check_union_with_sidorenko(&star, 6).unwrap().status, Status::Unknown);
    }

    #[test]
    fn pendant_tree() {
        let full = || [0u8, 1, 2].into();
        let t = K3Tree::new(vec![full(), [0u8, 1].into(), [1u8, 2].into()], vec![((0, 1), [0u8].into()), ((0, 2), [1u8].into())]).unwrap();
        let v = triangle_vertex_tree_uncommon(&t).unwrap();
        assert_eq!(v.status, Status::Uncommon, "{v:?}");
        let bowtie = K3Tree::new(vec![full(), full()], vec![((0, 1), [0u8].into())]).unwrap();
        assert_eq!(triangle_vertex_tree_uncommon(&bowtie).unwrap().status, Status::Unknown);
    }
}
