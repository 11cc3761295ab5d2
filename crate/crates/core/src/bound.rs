//! Closed-form functions on `[0, 2]`, used for the bounding function `g` and
//! the triangle-density floor `ρ`. All evaluation is in the shifted variable:
//! `eval_shifted(x)` is the value at `1 + x`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, q, qi, Q};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundFunction {
    /// `z^m`.
    Power {
        #[serde(with = "rat::as_text")]
        m: Q,
    },
    /// Triangle-density floor: 0 below edge density 1/2, the Fisher bound up
    /// to `1 + x = 4/3`, then the linear bound `16x/3`.
    FisherK3,
    /// `max(0, 16x/3)`.
    BollobasLinear,
    PiecewiseMax { parts: Vec<BoundFunction> },
    Zero,
}

impl BoundFunction {
    pub fn power(m: Q) -> Result<BoundFunction> {
        if m.is_negative() {
            return Err(Error::Domain("power bound needs m >= 0".into()));
        }
        Ok(BoundFunction::Power { m })
    }

    pub fn cube() -> BoundFunction {
        BoundFunction::Power { m: qi(3) }
    }

    /// Checks the shape constraints (nonnegative exponents, nonempty maxima).
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundFunction::Power { m } if m.is_negative() => Err(Error::Domain("power bound needs m >= 0".into())),
            BoundFunction::PiecewiseMax { parts } if parts.is_empty() => Err(Error::Domain("empty piecewise maximum".into())),
            BoundFunction::PiecewiseMax { parts } => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }

    pub fn power_exponent(&self) -> Option<&Q> {
        match self {
            BoundFunction::Power { m } => Some(m),
            _ => None,
        }
    }

    /// Value at `1 + x` for `x ∈ [-1, 1]`.
    pub fn eval_shifted<T: Real>(&self, x: &T) -> T {
        match self {
            BoundFunction::Power { m } => (T::lift(1.0) + x.clone()).powq(m),
            BoundFunction::Zero => T::lift(0.0),
            BoundFunction::BollobasLinear => {
                let lin = T::cst(&q(16, 3)) * x.clone();
                match side(x, &Q::zero()) {
                    Side::Below => T::lift(0.0),
                    Side::Above => lin,
                    Side::Straddle => lin.max(&T::lift(0.0)),
                }
            }
            BoundFunction::FisherK3 => fisher_k3(x),
            BoundFunction::PiecewiseMax { parts } => {
                let mut it = parts.iter().map(|p| p.eval_shifted(x));
                let first = it.next().unwrap_or_else(|| T::lift(0.0));
                it.fold(first, |a, b| a.max(&b))
            }
        }
    }

    /// Exact value at `1 + x` when it is rational and cheaply available.
    pub fn eval_q(&self, x: &Q) -> Option<Q> {
        match self {
            BoundFunction::Power { m } => {
                let base = qi(1) + x;
                if m.is_zero() {
                    Some(qi(1))
                } else if m.is_integer() {
                    let e: u32 = m.to_integer().try_into().ok()?;
                    Some(rat::pow_q(&base, e))
                } else if base.is_zero() {
                    Some(Q::zero())
                } else if base == qi(1) {
                    Some(qi(1))
                } else {
                    None
                }
            }
            BoundFunction::Zero => Some(Q::zero()),
            BoundFunction::BollobasLinear => Some(if x.is_positive() { q(16, 3) * x } else { Q::zero() }),
            BoundFunction::FisherK3 => {
                if !x.is_positive() {
                    Some(Q::zero())
                } else if x > &q(1, 3) {
                    Some(q(16, 3) * x)
                } else {
                    let s = rational_sqrt(&(qi(1) - qi(3) * x))?;
                    Some(fisher_formula_q(x, &s))
                }
            }
            BoundFunction::PiecewiseMax { parts } => {
                let vals: Option<Vec<Q>> = parts.iter().map(|p| p.eval_q(x)).collect();
                vals?.into_iter().max()
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_shifted(&x)
    }
}

/// `(4/9)(1 - s + 3x(3 + s))` with `s = √(1 - 3x)`.
fn fisher_formula<T: Real>(x: &T) -> T {
    let s = (T::lift(1.0) - T::lift(3.0) * x.clone()).sqrt();
    T::cst(&q(4, 9)) * (T::lift(1.0) - s.clone() + T::lift(3.0) * x.clone() * (T::lift(3.0) + s))
}

fn fisher_formula_q(x: &Q, s: &Q) -> Q {
    q(4, 9) * (qi(1) - s + qi(3) * x * (qi(3) + s))
}

fn fisher_k3<T: Real>(x: &T) -> T {
    let third = q(1, 3);
    let lo_side = side(x, &Q::zero());
    let hi_side = side(x, &third);
    let zero = || T::lift(0.0);
    let lin = || T::cst(&q(16, 3)) * x.clone();
    match (lo_side, hi_side) {
        (Side::Below, _) => zero(),
        (_, Side::Above) => lin(),
        (Side::Above, Side::Below) => fisher_formula(x),
        _ => {
            // The pieces join continuously; hull each piece over its part of x.
            let (lo, hi) = x.range();
            let mut out: Option<T> = None;
            let mut push = |v: T| out = Some(match out.take() {
                None => v,
                Some(o) => o.hull(&v),
            });
            if lo < 0.0 {
                push(zero());
            }
            if hi >= 0.0 && lo <= rat::to_f64(&third).next_up() {
                push(fisher_formula(&x.clip(0.0, rat::to_f64(&third).next_up())));
            }
            if hi > rat::to_f64(&third).next_down() {
                push(T::cst(&q(16, 3)) * x.clip(rat::to_f64(&third).next_down(), f64::INFINITY));
            }
            out.unwrap_or_else(zero)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Above,
    Straddle,
}

// Where the value range of x lies relative to the breakpoint t, decided with
// exact rational comparisons of the range endpoints. Points equal to t count
// as Above (the branches agree there).
fn side<T: Real>(x: &T, t: &Q) -> Side {
    let (lo, hi) = x.range();
    let below = |v: f64| rat::from_f64(v).map(|r| &r < t).unwrap_or(v < 0.0);
    match (below(lo), below(hi)) {
        (true, true) => Side::Below,
        (false, false) => Side::Above,
        _ => Side::Straddle,
    }
}

/// `√r` when it is rational.
pub fn rational_sqrt(r: &Q) -> Option<Q> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().clone(), r.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == n && &sd * &sd == d).then(|| Q::new(sn, sd))
}
