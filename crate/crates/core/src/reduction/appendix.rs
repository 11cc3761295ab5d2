//! Simpler sufficient conditions for the reduction conditions, and the
//! elementary inequalities behind them.
//!
//! The inequality helpers evaluate both sides in interval arithmetic and
//! report `false` only when the inequality is certainly violated, so rounding
//! at equality cases never produces a spurious failure.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{Condition, ReductionProblem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rat::{self, qi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppendixVariant {
    /// `2ρ(1+x) ≥ g(1+x) + g(1−x)`.
    X1Star,
    /// `G^k ≥ c 2^{k−2} ((1+x)^{ℓ0} + (1−x)^{ℓ0}) / ((1+x)^{ℓ0} (1−x)^{ℓ0})`.
    X0Star { l0: i64 },
    /// `(((1+x)^m + (1−x)^m)/2)^{k−ℓ/m} ≥ c / (2 (1+x)^ℓ (1−x)^ℓ)` for `g = z^m`.
    X0Dagger,
}

impl AppendixVariant {
    pub fn condition(&self) -> Condition {
        match *self {
            AppendixVariant::X1Star => Condition::X1Star,
            AppendixVariant::X0Star { l0 } => Condition::X0Star { l0 },
            AppendixVariant::X0Dagger => Condition::X0Dagger,
        }
    }

    /// The reduction condition implied by a nonnegative margin.
    pub fn implies(&self) -> Condition {
        match self {
            AppendixVariant::X1Star => Condition::X1,
            _ => Condition::X0,
        }
    }
}

/// Checks the hypotheses under which `variant` implies its target condition.
pub fn check_appendix_preconditions(p: &ReductionProblem, variant: &AppendixVariant) -> Result<()> {
    if p.k <= qi(1) {
        return Err(Error::Precondition("appendix conditions need k > 1".into()));
    }
    if p.ell.is_negative() {
        return Err(Error::Precondition("appendix conditions need ℓ ≥ 0".into()));
    }
    match variant {
        AppendixVariant::X1Star => Ok(()),
        AppendixVariant::X0Star { l0 } => {
            if qi(*l0) < p.ell {
                return Err(Error::Precondition(format!("x0_star needs ℓ0 = {l0} ≥ ℓ = {}", rat::fmt_q(&p.ell))));
            }
            if p.k < qi(2) {
                // the Hölder step compares exponents ℓ and ℓ/(k−1)
                return Err(Error::Precondition("x0_star needs k ≥ 2".into()));
            }
            Ok(())
        }
        AppendixVariant::X0Dagger => match p.g.power_exponent() {
            Some(m) if m.is_positive() && *m >= p.s() => Ok(()),
            Some(_) => Err(Error::Precondition("x0_dagger needs m ≥ ℓ/(k−1)".into())),
            None => Err(Error::Precondition("x0_dagger needs g(z) = z^m".into())),
        },
    }
}

/// Margin of an appendix condition at `x ∈ [0, 1]` (`x < 1` for the `x0` variants).
pub fn cond_appendix(p: &ReductionProblem, x: f64, variant: &AppendixVariant) -> Result<f64> {
    check_appendix_preconditions(p, variant)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    if x == 1.0 && !matches!(variant, AppendixVariant::X1Star) {
        return Err(Error::Domain("x0 relaxations need x < 1".into()));
    }
    Ok(p.margin_f64(&variant.condition(), x))
}

fn pt(x: f64) -> Interval {
    Interval::point(x)
}

fn not_below(lhs: Interval, rhs: Interval) -> bool {
    !(lhs.hi < rhs.lo)
}

/// `(a+b)^k ≥ a^k + k b a^{k−1}` for `a ≥ 0`, `a + b ≥ 0`, `k > 1`.
pub fn bernoulli_ineq(a: f64, b: f64, k: f64) -> Result<bool> {
    if !(a >= 0.0 && a + b >= 0.0 && k > 1.0) {
        return Err(Error::Precondition("needs a ≥ 0, a + b ≥ 0, k > 1".into()));
    }
    let ab = (pt(a) + pt(b)).clamp_nonneg();
    let lhs = ab.pow(&pt(k));
    let rhs = pt(a).pow(&pt(k)) + pt(k) * pt(b) * pt(a).pow(&(pt(k) - pt(1.0)));
    Ok(not_below(lhs, rhs))
}

/// `(a b^s − c d^s)(b^t + d^t) ≥ (a b^t − c d^t)(b^s + d^s)` for nonnegative
/// arguments with `b ≥ d` and `s ≥ t`.
pub fn rearrange_ineq(a: f64, b: f64, c: f64, d: f64, s: f64, t: f64) -> Result<bool> {
    if [a, b, c, d, s, t].iter().any(|v| !(*v >= 0.0)) || b < d || s < t {
        return Err(Error::Precondition("needs a,b,c,d,s,t ≥ 0, b ≥ d, s ≥ t".into()));
    }
    let (bs, ds, bt, dt) = (pt(b).pow(&pt(s)), pt(d).pow(&pt(s)), pt(b).pow(&pt(t)), pt(d).pow(&pt(t)));
    let lhs = (pt(a) * bs - pt(c) * ds) * (bt + dt);
    let rhs = (pt(a) * bt - pt(c) * dt) * (bs + ds);
    Ok(not_below(lhs, rhs))
}

/// `(b1^s + b2^s)^m ≤ 2^{m−s} (b1^m + b2^m)^s` for `b1, b2 ≥ 0`, `m ≥ s > 0`.
pub fn holder_claim(b1: f64, b2: f64, s: f64, m: f64) -> Result<bool> {
    if !(b1 >= 0.0 && b2 >= 0.0 && s > 0.0 && m >= s) {
        return Err(Error::Precondition("needs b1, b2 ≥ 0 and m ≥ s > 0".into()));
    }
    let lhs = (pt(b1).pow(&pt(s)) + pt(b2).pow(&pt(s))).pow(&pt(m));
    let rhs = pt(2.0).pow(&(pt(m) - pt(s))) * (pt(b1).pow(&pt(m)) + pt(b2).pow(&pt(m))).pow(&pt(s));
    Ok(not_below(rhs, lhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::BoundFunction;
    use crate::rat::q;

    #[test]
    fn helper_examples() {
        assert!(bernoulli_ineq(0.0, 1.0, 2.0).unwrap());
        assert!(holder_claim(0.3, 1.7, 1.5, 1.5).unwrap());
        assert!(rearrange_ineq(1.0, 2.0, 0.5, 1.0, 3.0, 1.0).unwrap());
        assert!(bernoulli_ineq(-1.0, 2.0, 2.0).is_err());
        assert!(holder_claim(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn x1_star_root() {
        // 32x/3 ≥ (1+x)^3 + (1-x)^3 from x1 = (8 − √37)/9 on
        let p = ReductionProblem { rho: BoundFunction::BollobasLinear, ..ReductionProblem::two_triangles(2) };
        let x1 = (8.0 - 37f64.sqrt()) / 9.0;
        assert!(cond_appendix(&p, x1 - 1e-6, &AppendixVariant::X1Star).unwrap() < 0.0);
        assert!(cond_appendix(&p, x1 + 1e-6, &AppendixVariant::X1Star).unwrap() > 0.0);
        assert!((p.onset(&Condition::X1Star) - x1).abs() < 1e-9);
    }

    #[test]
    fn x0_star_two_triangles() {
        let p = ReductionProblem::two_triangles(2);
        let v = AppendixVariant::X0Star { l0: 2 };
        assert!(cond_appendix(&p, 0.49, &v).unwrap() >= 0.0);
        // h increases up to ≈0.495 and stays above 2 until ≈0.7192
        assert!(cond_appendix(&p, 0.60, &v).unwrap() >= 0.0);
        assert!(cond_appendix(&p, 0.72, &v).unwrap() < 0.0);
        assert!((p.crossover_from_zero(&v.condition()) - 0.71925).abs() < 1e-4);
        assert!(cond_appendix(&p, 1.0, &v).is_err());
        assert!(cond_appendix(&p, 0.2, &AppendixVariant::X0Star { l0: 1 }).is_err());
    }

    #[test]
    fn x0_dagger_matches_weaker_form() {
        // ((1+x)^r/3 (1-x)^r/3 ((1+x)^3+(1-x)^3)/2)^(3-r/9) ≥ 1 rearranged
        for r in [0, 5, 13] {
            let p = ReductionProblem::three_triangles(r);
            for &x in &[0.1, 0.3, 0.6] {
                let rr = r as f64;
                let x: f64 = x;
                let lhs = (1.0 - x * x).powf(rr / 3.0) * (((1.0 + x).powi(3) + (1.0 - x).powi(3)) / 2.0).powf(3.0 - rr / 9.0);
                let m = cond_appendix(&p, x, &AppendixVariant::X0Dagger).unwrap();
                assert_eq!(m >= 0.0, lhs >= 1.0, "r={r} x={x}");
            }
        }
        let bad = ReductionProblem { g: BoundFunction::FisherK3, ..ReductionProblem::three_triangles(3) };
        assert!(cond_appendix(&bad, 0.1, &AppendixVariant::X0Dagger).is_err());
        let small_m = ReductionProblem { g: BoundFunction::Power { m: q(1, 2) }, ..ReductionProblem::three_triangles(15) };
        assert!(cond_appendix(&small_m, 0.1, &AppendixVariant::X0Dagger).is_err());
    }
}
