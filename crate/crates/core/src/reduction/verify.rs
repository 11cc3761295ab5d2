//! Covering `[0, 1]` by cells on which one of the condition sets holds.
//!
//! Two strategies. `GridWithMargin` samples each cell at its midpoint and
//! pads by a finite-difference slope estimate; it is fast and what the
//! numerical claims amount to. `CertifiedInterval` bounds each margin on the
//! whole cell in outward-rounded interval arithmetic (natural extension,
//! mean-value form, second-order form, and for even margins a Taylor bound
//! around zero), bisecting cells that fail.

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{conditions_label, parse_conditions_label, Condition, ReductionProblem};
use crate::density;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rat::{self, qi};
use crate::real::Jet;

pub const DEFAULT_RESOLUTION: f64 = 1e-4;
pub const MAX_DEPTH: u32 = 40;
const GRID_SUBDIVISIONS: u32 = 8;
const INTERVAL_CELLS: usize = 64;
const PAD_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    GridWithMargin,
    CertifiedInterval,
}

impl Strategy {
    pub fn parse(s: &str) -> Result<Strategy> {
        match s {
            "grid" | "grid_with_margin" => Ok(Strategy::GridWithMargin),
            "interval" | "certified_interval" => Ok(Strategy::CertifiedInterval),
            other => Err(Error::Parse(format!("unknown strategy {other:?}"))),
        }
    }

    fn depth_cap(self) -> u32 {
        match self {
            Strategy::GridWithMargin => GRID_SUBDIVISIONS,
            Strategy::CertifiedInterval => MAX_DEPTH,
        }
    }
}

/// Evidence for one x-range: every condition in `condition` has margin at
/// least `margin` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub x_lo: f64,
    pub x_hi: f64,
    pub condition: String,
    pub margin: f64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    /// A feasible point with `f(x, y) < c`, certified in interval arithmetic.
    FailsAt { x: f64, y: f64, value: f64 },
    /// No condition set could be established on `[x_lo, x_hi]`.
    Inconclusive { x_lo: f64, x_hi: f64 },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::FailsAt { .. } => "fails_at",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub problem: ReductionProblem,
    pub strategy: Strategy,
    pub resolution: f64,
    pub records: Vec<Record>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub ok: bool,
    pub verdict: String,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone)]
enum Piece {
    Ok(Record),
    Fail { x: f64, y: f64, value: f64 },
    Gap(f64, f64),
}

/// Checks the standing hypotheses; returns whether `ρ(2) > 0`.
fn check_hypotheses(p: &ReductionProblem) -> Result<bool> {
    p.validate()?;
    if p.ell.is_negative() {
        return Err(Error::Unsupported("verification needs ℓ ≥ 0".into()));
    }
    if p.k < qi(1) {
        return Err(Error::Unsupported("verification needs k ≥ 1".into()));
    }
    for i in 0..=2000 {
        let x = -1.0 + i as f64 / 1000.0;
        let (r, g) = (p.rho.eval_f64(x), p.g.eval_f64(x));
        if r > g + 1e-12 * g.abs().max(1.0) {
            return Err(Error::Precondition(format!("ρ(1+x) = {r} exceeds g(1+x) = {g} at x = {x}")));
        }
    }
    Ok(p.rho.eval_f64(1.0) > 0.0)
}

/// A certified violation at `x`, if `f(x, y*) < c` for the minimizing `y*`.
fn genuine_failure(p: &ReductionProblem, x: f64) -> Option<Piece> {
    let y = p.argmin_y(x);
    let v = p.f(&Interval::point(x), &Interval::point(y));
    let c = Interval::from_q(&p.c);
    (v.hi < c.lo).then(|| Piece::Fail { x, y, value: p.f(&x, &y) })
}

fn point_provable(p: &ReductionProblem, sets: &[Vec<Condition>], x: f64) -> bool {
    sets.iter().any(|set| set.iter().all(|c| p.margin_f64(c, x) >= 0.0))
}

fn exact_zero_margin(p: &ReductionProblem, cond: &Condition) -> f64 {
    p.margin_at_zero(cond).map(|m| Interval::from_q(&m).lo).unwrap_or_else(|| p.margin_f64(cond, 0.0))
}

fn grid_lower(p: &ReductionProblem, cond: &Condition, lo: f64, hi: f64) -> f64 {
    let h = hi - lo;
    let (ma, mb) = (p.margin_f64(cond, lo), p.margin_f64(cond, hi));
    let mid = p.margin_f64(cond, lo + 0.5 * h);
    if lo == 0.0 && cond.is_even() {
        // slope padding is useless where an even margin touches zero
        let m0 = exact_zero_margin(p, cond);
        return if m0 >= 0.0 && mid >= m0 && mb >= m0 { m0 } else { m0.min(mid).min(mb).min(-f64::MIN_POSITIVE) };
    }
    let slope = ((mb - ma) / h).abs();
    mid - PAD_FACTOR * slope * h / 2.0
}

fn interval_lower(p: &ReductionProblem, cond: &Condition, lo: f64, hi: f64) -> f64 {
    let x = Interval::new(lo, hi);
    let natural = p.margin(cond, &x).lo;
    if natural >= 0.0 {
        return natural;
    }
    let mid = x.mid();
    let xm = Interval::point(mid);
    let jx = p.margin(cond, &Jet::var(x));
    let jm = p.margin(cond, &Jet::var(xm));
    let dx = x - xm;
    let mean_value = (jm.v + jx.d1 * dx).lo;
    if mean_value >= 0.0 {
        return mean_value;
    }
    let second = (jm.v + jm.d1 * dx + Interval::point(0.5) * jx.d2 * dx.powi(2)).lo;
    if second >= 0.0 {
        return second;
    }
    let mut best = natural.max(mean_value).max(second);
    if lo == 0.0 && cond.is_even() {
        // even and smooth at 0: m(x) = m(0) + m''(ξ) x² / 2
        if let Some(m0) = p.margin_at_zero(cond) {
            let curv = Interval::point(jx.d2.lo.min(0.0));
            let t = (Interval::from_q(&m0) + Interval::point(0.5) * curv * x.powi(2)).lo;
            best = best.max(t);
        }
    }
    best
}

fn set_lower(p: &ReductionProblem, set: &[Condition], lo: f64, hi: f64, strategy: Strategy) -> Option<f64> {
    let mut worst = f64::INFINITY;
    for cond in set {
        let m = match strategy {
            Strategy::GridWithMargin => grid_lower(p, cond, lo, hi),
            Strategy::CertifiedInterval => interval_lower(p, cond, lo, hi),
        };
        if !(m >= 0.0) {
            return None;
        }
        worst = worst.min(m);
    }
    Some(worst)
}

fn cover(p: &ReductionProblem, sets: &[Vec<Condition>], lo: f64, hi: f64, strategy: Strategy, depth: u32, out: &mut Vec<Piece>) {
    for set in sets {
        if let Some(margin) = set_lower(p, set, lo, hi, strategy) {
            out.push(Piece::Ok(Record { x_lo: lo, x_hi: hi, condition: conditions_label(set), margin, strategy }));
            return;
        }
    }
    let mid = 0.5 * (lo + hi);
    if let Some(fail) = genuine_failure(p, mid) {
        out.push(fail);
        return;
    }
    if depth >= strategy.depth_cap() || !point_provable(p, sets, mid) || mid <= lo || mid >= hi {
        match [lo, hi].into_iter().find_map(|x| genuine_failure(p, x)) {
            Some(fail) => out.push(fail),
            None => out.push(Piece::Gap(lo, hi)),
        }
        return;
    }
    cover(p, sets, lo, mid, strategy, depth + 1, out);
    cover(p, sets, mid, hi, strategy, depth + 1, out);
}

fn top_cells(lo: f64, hi: f64, strategy: Strategy, resolution: f64) -> Vec<(f64, f64)> {
    let per_unit = match strategy {
        Strategy::GridWithMargin => 1.0 / resolution,
        Strategy::CertifiedInterval => INTERVAL_CELLS as f64,
    };
    let n = (((hi - lo) * per_unit).round() as usize).max(1);
    let at = |i: usize| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
    (0..n).map(|i| (at(i), at(i + 1))).collect()
}

fn run(p: &ReductionProblem, sets: &[Vec<Condition>], lo: f64, hi: f64, strategy: Strategy, resolution: f64) -> Vec<Piece> {
    let cells = top_cells(lo, hi, strategy, resolution);
    let parts: Vec<Vec<Piece>> = density::install(|| {
        cells
            .par_iter()
            .map(|&(a, b)| {
                let mut out = Vec::new();
                cover(p, sets, a, b, strategy, 0, &mut out);
                out
            })
            .collect()
    });
    parts.into_iter().flatten().collect()
}

fn merge(records: Vec<Record>) -> Vec<Record> {
    let mut out: Vec<Record> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some(last) if last.condition == r.condition && last.x_hi == r.x_lo => {
                last.x_hi = r.x_hi;
                last.margin = last.margin.min(r.margin);
            }
            _ => out.push(r),
        }
    }
    out
}

fn check_resolution(resolution: f64) -> Result<()> {
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::Domain(format!("resolution {resolution} outside (0, 1/2]")));
    }
    Ok(())
}

/// Tries to establish `min f ≥ c` over the feasible region.
pub fn verify_reduction(p: &ReductionProblem, strategy: Strategy, resolution: f64) -> Result<Certificate> {
    check_resolution(resolution)?;
    let rho2_positive = check_hypotheses(p)?;
    let sets = p.condition_sets();
    if p.k > qi(1) && !rho2_positive {
        // the covering argument needs ρ(2) > 0; only a violation can be reported
        let n = (1.0 / resolution).round() as usize;
        let fail = (0..=n).map(|i| i as f64 / n as f64).find_map(|x| genuine_failure(p, x));
        return match fail {
            Some(Piece::Fail { x, y, value }) => Ok(Certificate { problem: p.clone(), strategy, resolution, records: vec![], verdict: Verdict::FailsAt { x, y, value } }),
            _ => Err(Error::Precondition("ρ(2) > 0 is needed to certify a lower bound".into())),
        };
    }
    let pieces = run(p, &sets, 0.0, 1.0, strategy, resolution);
    let mut records = Vec::new();
    let mut verdict = Verdict::Holds;
    for piece in pieces {
        match piece {
            Piece::Ok(r) => records.push(r),
            Piece::Fail { x, y, value } => {
                if !matches!(verdict, Verdict::FailsAt { .. }) {
                    verdict = Verdict::FailsAt { x, y, value };
                }
            }
            Piece::Gap(a, b) => {
                if verdict == Verdict::Holds {
                    verdict = Verdict::Inconclusive { x_lo: a, x_hi: b };
                }
            }
        }
    }
    Ok(Certificate { problem: p.clone(), strategy, resolution, records: merge(records), verdict })
}

/// Establishes every condition in `conds` on `[lo, hi]`; the smallest
/// certified margin, or `None` when some part could not be established.
pub fn certify_condition(p: &ReductionProblem, conds: &[Condition], lo: f64, hi: f64, strategy: Strategy, resolution: f64) -> Result<Option<f64>> {
    check_resolution(resolution)?;
    check_hypotheses(p)?;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::Domain(format!("range [{lo}, {hi}] not inside [0, 1]")));
    }
    let sets = vec![conds.to_vec()];
    let mut worst = f64::INFINITY;
    for piece in run(p, &sets, lo, hi, strategy, resolution) {
        match piece {
            Piece::Ok(r) => worst = worst.min(r.margin),
            _ => return Ok(None),
        }
    }
    Ok(Some(worst))
}

/// Re-derives a certificate's evidence.
pub fn replay(cert: &Certificate) -> Result<ReplayReport> {
    let p = &cert.problem;
    let mut bad = Vec::new();
    match &cert.verdict {
        Verdict::Holds => {
            let mut at = 0.0;
            for r in &cert.records {
                if r.x_lo != at {
                    bad.push(format!("coverage gap or overlap at x = {at} (next record starts at {})", r.x_lo));
                }
                at = r.x_hi;
                let conds = parse_conditions_label(&r.condition)?;
                let allowed = p.condition_sets().contains(&conds);
                if !allowed {
                    bad.push(format!("[{}, {}]: {} does not bound the minimum", r.x_lo, r.x_hi, r.condition));
                    continue;
                }
                match certify_condition(p, &conds, r.x_lo, r.x_hi, r.strategy, cert.resolution)? {
                    Some(m) if m >= 0.0 && r.margin <= m + 1e-9 * m.abs().max(1.0) => {}
                    Some(m) if m >= 0.0 => bad.push(format!("[{}, {}]: recorded margin {} exceeds re-derived {m}", r.x_lo, r.x_hi, r.margin)),
                    _ => bad.push(format!("[{}, {}]: {} not re-established", r.x_lo, r.x_hi, r.condition)),
                }
            }
            if at != 1.0 {
                bad.push(format!("records end at x = {at}, not 1"));
            }
        }
        Verdict::FailsAt { x, y, .. } => {
            check_hypotheses(p)?;
            let ymax = p.y_max(&Interval::point(*x));
            let feasible = (-1.0..=1.0).contains(x) && *y >= 0.0 && *y <= ymax.lo;
            let v = p.f(&Interval::point(*x), &Interval::point(*y));
            if !feasible {
                bad.push(format!("(x, y) = ({x}, {y}) is not feasible"));
            } else if !(v.hi < Interval::from_q(&p.c).lo) {
                bad.push(format!("f({x}, {y}) ∈ {v:?} is not certainly below c"));
            }
        }
        Verdict::Inconclusive { .. } => {
            let again = verify_reduction(p, cert.strategy, cert.resolution)?;
            if again.verdict.name() != "inconclusive" {
                bad.push(format!("rerun gives {} instead of inconclusive", again.verdict.name()));
            }
        }
    }
    Ok(ReplayReport { ok: bad.is_empty(), verdict: cert.verdict.name().into(), mismatches: bad })
}

/// Lower bound on `c(H)` implied by a certificate that holds: `c / 2^{k·e(J) + ℓ}`.
pub fn implied_bound(cert: &Certificate, edges_j: u32) -> Option<f64> {
    if cert.verdict != Verdict::Holds || !cert.problem.ell.is_integer() || !cert.problem.k.is_integer() {
        return None;
    }
    let exp = &cert.problem.k * qi(edges_j as i64) + &cert.problem.ell;
    let two = rat::pow_q(&qi(2), exp.to_integer().try_into().ok()?);
    Some(rat::to_f64(&(&cert.problem.c / two)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::BoundFunction;

    #[test]
    fn two_triangles_hold_on_grid() {
        for ell in 0..=2 {
            let c = verify_reduction(&ReductionProblem::two_triangles(ell), Strategy::GridWithMargin, DEFAULT_RESOLUTION).unwrap();
            assert_eq!(c.verdict, Verdict::Holds, "ℓ = {ell}");
            assert_eq!(c.records.first().unwrap().x_lo, 0.0);
            assert_eq!(c.records.last().unwrap().x_hi, 1.0);
        }
    }

    #[test]
    fn two_triangles_hold_in_intervals() {
        for ell in 0..=2 {
            let c = verify_reduction(&ReductionProblem::two_triangles(ell), Strategy::CertifiedInterval, DEFAULT_RESOLUTION).unwrap();
            assert_eq!(c.verdict, Verdict::Holds, "ℓ = {ell}: {:?}", c.verdict);
            assert!(replay(&c).unwrap().ok);
        }
    }

    #[test]
    fn no_floor_three_edges_fails() {
        let p = ReductionProblem { ell: qi(3), rho: BoundFunction::Zero, ..ReductionProblem::two_triangles(3) };
        let c = verify_reduction(&p, Strategy::GridWithMargin, DEFAULT_RESOLUTION).unwrap();
        match c.verdict {
            Verdict::FailsAt { x, y, value } => {
                assert!(value < 2.0);
                assert!((p.f_gkl(x, y).unwrap() - value).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(replay(&c).unwrap().ok);
    }

    #[test]
    fn negative_ell_unsupported() {
        let p = ReductionProblem { ell: qi(-1), ..ReductionProblem::two_triangles(0) };
        assert!(matches!(verify_reduction(&p, Strategy::GridWithMargin, 1e-3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tampered_certificate_rejected() {
        let mut c = verify_reduction(&ReductionProblem::two_triangles(1), Strategy::GridWithMargin, 1e-3).unwrap();
        c.records.pop();
        assert!(!replay(&c).unwrap().ok);
        let mut c2 = verify_reduction(&ReductionProblem::two_triangles(1), Strategy::GridWithMargin, 1e-3).unwrap();
        c2.problem.c = qi(3);
        assert!(!replay(&c2).unwrap().ok);
    }
}
