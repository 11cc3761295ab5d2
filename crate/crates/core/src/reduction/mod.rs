//! The two-variable lower-bound problem
//!
//! `f(x, y) = (1+x)^ℓ (g(1+x) − y)^k + (1−x)^ℓ (g(1−x) + y)^k`,
//! minimized over `x ∈ [−1, 1]`, `0 ≤ y ≤ g(1+x) − ρ(1+x)`, and the
//! single-variable conditions that certify `min f ≥ c`.

pub mod appendix;
pub mod k3k2;
pub mod verify;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bound::BoundFunction;
use crate::error::{Error, Result};
use crate::rat::{self, q, qi, Q};
use crate::real::Real;

pub use appendix::{bernoulli_ineq, holder_claim, rearrange_ineq};
pub use k3k2::{lower_bound_k3_k2, K3K2Bound};
pub use verify::{certify_condition, replay, verify_reduction, Certificate, Record, ReplayReport, Strategy, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionProblem {
    #[serde(with = "rat::as_text")]
    pub k: Q,
    #[serde(with = "rat::as_text")]
    pub ell: Q,
    pub g: BoundFunction,
    pub rho: BoundFunction,
    #[serde(with = "rat::as_text")]
    pub c: Q,
}

/// A single-variable condition on `x ∈ [0, 1]`; each margin is "left side
/// minus right side", so a nonnegative margin means the condition holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// The value at the interior critical point `y0` is at least `c`.
    X0,
    /// `y0` lies at or beyond the upper end of the `y` range.
    X1,
    /// The value at the upper end of the `y` range is at least `c`.
    X1Prime,
    /// `k = 1`: the value at `y = 0` is at least `c`.
    LinearAtZero,
    /// `k = 1`: the value at the upper end of the `y` range is at least `c`.
    LinearAtMax,
    /// `2ρ(1+x) ≥ g(1+x) + g(1−x)`; implies `X1` when `ℓ ≥ 0`.
    X1Star,
    /// Hölder relaxation of `X0` with exponent `ℓ0 ≥ ℓ`.
    X0Star { l0: i64 },
    /// Power-mean relaxation of `X0` for `g(z) = z^m`.
    X0Dagger,
}

impl Condition {
    pub fn name(&self) -> String {
        match self {
            Condition::X0 => "x0".into(),
            Condition::X1 => "x1".into(),
            Condition::X1Prime => "x1_prime".into(),
            Condition::LinearAtZero => "linear_at_zero".into(),
            Condition::LinearAtMax => "linear_at_max".into(),
            Condition::X1Star => "x1_star".into(),
            Condition::X0Star { l0 } => format!("x0_star({l0})"),
            Condition::X0Dagger => "x0_dagger".into(),
        }
    }

    pub fn from_name(s: &str) -> Result<Condition> {
        Ok(match s {
            "x0" => Condition::X0,
            "x1" => Condition::X1,
            "x1_prime" => Condition::X1Prime,
            "linear_at_zero" => Condition::LinearAtZero,
            "linear_at_max" => Condition::LinearAtMax,
            "x1_star" => Condition::X1Star,
            "x0_dagger" => Condition::X0Dagger,
            other => {
                let inner = other.strip_prefix("x0_star(").and_then(|r| r.strip_suffix(')'));
                match inner.and_then(|v| v.parse().ok()) {
                    Some(l0) => Condition::X0Star { l0 },
                    None => return Err(Error::Parse(format!("unknown condition {other:?}"))),
                }
            }
        })
    }

    /// Whether the margin is an even function of `x`.
    pub fn is_even(&self) -> bool {
        matches!(self, Condition::X0 | Condition::X0Star { .. } | Condition::X0Dagger)
    }
}

/// Names a set of conditions that must hold together, e.g. `"x1+x1_prime"`.
pub fn conditions_label(cs: &[Condition]) -> String {
    cs.iter().map(|c| c.name()).collect::<Vec<_>>().join("+")
}

pub fn parse_conditions_label(s: &str) -> Result<Vec<Condition>> {
    s.split('+').map(Condition::from_name).collect()
}

// x^e for rationals when it is rational and easy.
fn pow_exact(base: &Q, e: &Q) -> Option<Q> {
    if e.is_zero() || base.is_one() {
        return Some(qi(1));
    }
    if base.is_zero() {
        return e.is_positive().then(Q::zero);
    }
    if e.is_integer() {
        let n: i32 = e.to_integer().try_into().ok()?;
        let p = rat::pow_q(base, n.unsigned_abs());
        return Some(if n < 0 { p.recip() } else { p });
    }
    None
}

impl ReductionProblem {
    pub fn new(k: Q, ell: Q, g: BoundFunction, rho: BoundFunction, c: Q) -> Result<ReductionProblem> {
        let p = ReductionProblem { k, ell, g, rho, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k.is_positive() {
            return Err(Error::Domain("k must be positive".into()));
        }
        if !self.c.is_positive() {
            return Err(Error::Domain("target c must be positive".into()));
        }
        self.g.validate()?;
        self.rho.validate()
    }

    /// `k = 2`, `g(z) = z³`, `ρ` the triangle floor, `c = 2`.
    pub fn two_triangles(ell: i64) -> ReductionProblem {
        ReductionProblem { k: qi(2), ell: qi(ell), g: BoundFunction::cube(), rho: BoundFunction::FisherK3, c: qi(2) }
    }

    /// `k = 3`, `ℓ = r/3`, `g(z) = z³`, `ρ` the linear floor, `c = 2`.
    pub fn three_triangles(r: i64) -> ReductionProblem {
        ReductionProblem { k: qi(3), ell: q(r, 3), g: BoundFunction::cube(), rho: BoundFunction::BollobasLinear, c: qi(2) }
    }

    fn require_k_gt_1(&self) -> Result<()> {
        if self.k <= qi(1) {
            return Err(Error::Domain("this quantity needs k > 1".into()));
        }
        Ok(())
    }

    /// `ℓ/(k−1)`; only meaningful for `k > 1`.
    pub fn s(&self) -> Q {
        &self.ell / (&self.k - qi(1))
    }

    pub fn f<T: Real>(&self, x: &T, y: &T) -> T {
        let one = T::lift(1.0);
        let xp = one.clone() + x.clone();
        let xm = one - x.clone();
        let gp = self.g.eval_shifted(x);
        let gm = self.g.eval_shifted(&-x.clone());
        xp.powq(&self.ell) * (gp - y.clone()).powq(&self.k) + xm.powq(&self.ell) * (gm + y.clone()).powq(&self.k)
    }

    /// `f(x, y)` with domain checks.
    pub fn f_gkl(&self, x: f64, y: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
        }
        if self.ell.is_negative() && x.abs() == 1.0 {
            return Err(Error::Domain("negative ℓ is singular at x = ±1".into()));
        }
        let gp = self.g.eval_f64(x);
        if y < 0.0 || y > gp {
            return Err(Error::Domain(format!("y = {y} outside [0, g(1+x)] = [0, {gp}]")));
        }
        Ok(self.f(&x, &y))
    }

    /// Upper end of the `y` range, `g(1+x) − ρ(1+x)`.
    pub fn y_max<T: Real>(&self, x: &T) -> T {
        self.g.eval_shifted(x) - self.rho.eval_shifted(x)
    }

    /// `∂f/∂y`.
    pub fn partial_y(&self, x: f64, y: f64) -> f64 {
        let k = rat::to_f64(&self.k);
        let km1 = &self.k - qi(1);
        let gp = self.g.eval_f64(x);
        let gm = self.g.eval_f64(-x);
        -k * (1.0 + x).powq(&self.ell) * (gp - y).powq(&km1) + k * (1.0 - x).powq(&self.ell) * (gm + y).powq(&km1)
    }

    fn weights<T: Real>(&self, x: &T) -> (T, T) {
        let one = T::lift(1.0);
        let s = self.s();
        ((one.clone() + x.clone()).powq(&s), (one - x.clone()).powq(&s))
    }

    pub fn y0_generic<T: Real>(&self, x: &T) -> T {
        let (a, b) = self.weights(x);
        let gp = self.g.eval_shifted(x);
        let gm = self.g.eval_shifted(&-x.clone());
        (a.clone() * gp - b.clone() * gm) / (a + b)
    }

    /// Interior critical point in `y`.
    pub fn critical_y0(&self, x: f64) -> Result<f64> {
        self.require_k_gt_1()?;
        Ok(self.y0_generic(&x))
    }

    /// The second critical point; `+∞` when its denominator vanishes.
    pub fn critical_y1(&self, x: f64) -> Result<f64> {
        self.require_k_gt_1()?;
        let (a, b) = self.weights(&x);
        if a == b {
            return Ok(f64::INFINITY);
        }
        Ok((a * self.g.eval_f64(x) + b * self.g.eval_f64(-x)) / (a - b))
    }

    /// Margin of a condition at `x`.
    pub fn margin<T: Real>(&self, cond: &Condition, x: &T) -> T {
        let one = T::lift(1.0);
        let xp = one.clone() + x.clone();
        let xm = one.clone() - x.clone();
        let gp = self.g.eval_shifted(x);
        let gm = self.g.eval_shifted(&-x.clone());
        let big_g = gp.clone() + gm.clone();
        let c = T::cst(&self.c);
        let k1 = &self.k - qi(1);
        match cond {
            Condition::X0 => {
                let (a, b) = self.weights(x);
                let prod = (one - x.powi(2)).powq(&self.ell);
                big_g.powq(&self.k) * prod / (a + b).powq(&k1) - c
            }
            Condition::X1 => {
                let (a, b) = self.weights(x);
                self.rho.eval_shifted(x) - b.clone() * big_g / (a + b)
            }
            Condition::X1Prime => {
                let r = self.rho.eval_shifted(x);
                xp.powq(&self.ell) * r.powq(&self.k) + xm.powq(&self.ell) * (big_g - r).powq(&self.k) - c
            }
            Condition::LinearAtZero => self.f(x, &T::lift(0.0)) - c,
            Condition::LinearAtMax => self.f(x, &self.y_max(x)) - c,
            Condition::X1Star => T::lift(2.0) * self.rho.eval_shifted(x) - big_g,
            Condition::X0Star { l0 } => {
                let l0 = qi(*l0);
                let (p, m) = (xp.powq(&l0), xm.powq(&l0));
                let scale = T::cst(&(&self.c * pow2(&(&self.k - qi(2)))));
                big_g.powq(&self.k) - scale * (p.clone() + m.clone()) / (p * m)
            }
            Condition::X0Dagger => {
                let m = self.g.power_exponent().cloned().unwrap_or_else(|| qi(1));
                let mean = (xp.powq(&m) + xm.powq(&m)) / T::lift(2.0);
                let e = &self.k - &self.ell / &m;
                mean.powq(&e) - c / (T::lift(2.0) * (one - x.powi(2)).powq(&self.ell))
            }
        }
    }

    pub fn margin_f64(&self, cond: &Condition, x: f64) -> f64 {
        self.margin(cond, &x)
    }

    /// Exact margin at `x = 0` for the even conditions, when rational.
    pub fn margin_at_zero(&self, cond: &Condition) -> Option<Q> {
        let g1 = self.g.eval_q(&Q::zero())?;
        match cond {
            Condition::X0 => Some(qi(2) * pow_exact(&g1, &self.k)? - &self.c),
            Condition::X0Star { .. } => Some(pow_exact(&(qi(2) * g1), &self.k)? - &self.c * pow_exact(&qi(2), &(&self.k - qi(1)))?),
            Condition::X0Dagger => Some(qi(1) - &self.c / qi(2)),
            _ => None,
        }
    }

    /// Which conditions certify the minimum at a given `x`: `X0` alone, or
    /// the pair `X1` and `X1Prime` (for `k > 1`); the two endpoint values
    /// for `k = 1`.
    pub fn condition_sets(&self) -> Vec<Vec<Condition>> {
        if self.k.is_one() {
            vec![vec![Condition::LinearAtZero, Condition::LinearAtMax]]
        } else {
            vec![vec![Condition::X0], vec![Condition::X1, Condition::X1Prime]]
        }
    }

    /// The `y` minimizing `f(x, ·)` over the feasible range.
    pub fn argmin_y(&self, x: f64) -> f64 {
        let ymax = self.y_max(&x).max(0.0);
        if self.k.is_one() {
            if self.f(&x, &0.0) <= self.f(&x, &ymax) {
                0.0
            } else {
                ymax
            }
        } else {
            self.y0_generic(&x).clamp(0.0, ymax)
        }
    }

    /// Largest `x0` such that `X0` holds on all of `[0, x0]`, by scanning with
    /// step `1e-4` and bisecting the first sign change.
    pub fn x0_crossover(&self) -> Result<f64> {
        self.require_k_gt_1()?;
        Ok(crossover(|x| self.margin_f64(&Condition::X0, x), false))
    }

    /// Smallest `x1` such that `cond` holds on all of `[x1, 1]`.
    pub fn onset(&self, cond: &Condition) -> f64 {
        crossover(|x| self.margin_f64(cond, x), true)
    }

    /// Crossover of an arbitrary condition from the left end, as for `x0_crossover`.
    pub fn crossover_from_zero(&self, cond: &Condition) -> f64 {
        crossover(|x| self.margin_f64(cond, x), false)
    }
}

fn pow2(e: &Q) -> Q {
    pow_exact(&qi(2), e).unwrap_or_else(|| rat::from_f64(2f64.powf(rat::to_f64(e))).unwrap_or_else(|_| qi(1)))
}

fn crossover(m: impl Fn(f64) -> f64, from_right: bool) -> f64 {
    const STEP: f64 = 1e-4;
    let n = (1.0 / STEP).round() as usize;
    let at = |i: usize| if from_right { 1.0 - i as f64 * STEP } else { i as f64 * STEP };
    let mut good = at(0);
    for i in 1..=n {
        let x = at(i);
        if m(x) < 0.0 {
            let (mut ok, mut bad) = (good, x);
            for _ in 0..60 {
                let mid = 0.5 * (ok + bad);
                if m(mid) >= 0.0 {
                    ok = mid;
                } else {
                    bad = mid;
                }
            }
            return ok;
        }
        good = x;
    }
    if from_right {
        0.0
    } else {
        1.0
    }
}
