//! Closed intervals of doubles with outward rounding.
//!
//! Every basic operation is computed in round-to-nearest and then widened:
//! correctly rounded operations by one ulp, library transcendental calls by a
//! few ulps. Loose but correct.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::rat::Q;

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

// Relative slack for libm calls (exp, ln, powf); glibc stays well under this.
const LIBM_ULPS: f64 = 4.0;

fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

fn down_rel(x: f64, ulps: f64) -> f64 {
    if x.is_nan() {
        return f64::NEG_INFINITY;
    }
    if x.is_infinite() {
        return x;
    }
    (x - x.abs() * ulps * f64::EPSILON).next_down()
}

fn up_rel(x: f64, ulps: f64) -> f64 {
    if x.is_nan() {
        return f64::INFINITY;
    }
    if x.is_infinite() {
        return x;
    }
    (x + x.abs() * ulps * f64::EPSILON).next_up()
}

// a + b is exact when either term is zero
fn round_down(a: f64, b: f64, s: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        s
    } else {
        down(s)
    }
}

fn round_up(a: f64, b: f64, s: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        s
    } else {
        up(s)
    }
}

// 0 * inf is taken as 0: the zero factor is exact, the infinite one is a bound.
fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Interval {
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    /// Tight enclosure of a rational.
    pub fn from_q(r: &Q) -> Interval {
        let x = r.to_f64().unwrap_or(f64::NAN);
        match Q::from_float(x) {
            Some(back) if &back == r => Interval::point(x),
            _ => Interval { lo: down(x), hi: up(x) },
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * self.lo + 0.5 * self.hi
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn intersect(&self, lo: f64, hi: f64) -> Option<Interval> {
        let (a, b) = (self.lo.max(lo), self.hi.min(hi));
        (a <= b).then_some(Interval { lo: a, hi: b })
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Drops the part below zero; for quantities known to be nonnegative.
    pub fn clamp_nonneg(&self) -> Interval {
        Interval { lo: self.lo.max(0.0), hi: self.hi.max(0.0) }
    }

    pub fn sqrt(&self) -> Interval {
        let c = self.clamp_nonneg();
        Interval { lo: down(c.lo.sqrt()).max(0.0), hi: up(c.hi.sqrt()) }
    }

    pub fn exp(&self) -> Interval {
        Interval { lo: down_rel(self.lo.exp(), LIBM_ULPS).max(0.0), hi: up_rel(self.hi.exp(), LIBM_ULPS) }
    }

    /// Natural log of the nonnegative part.
    pub fn ln(&self) -> Interval {
        let c = self.clamp_nonneg();
        let lo = if c.lo == 0.0 { f64::NEG_INFINITY } else { c.lo.ln() };
        let hi = if c.hi == 0.0 { f64::NEG_INFINITY } else { c.hi.ln() };
        Interval { lo: down_rel(lo, LIBM_ULPS) - f64::MIN_POSITIVE, hi: up_rel(hi, LIBM_ULPS) + f64::MIN_POSITIVE }
    }

    pub fn powi(&self, n: i32) -> Interval {
        if n == 0 {
            return Interval::point(1.0);
        }
        if n < 0 {
            return Interval::point(1.0) / self.powi(-n);
        }
        let ulps = n as f64 + 1.0;
        let f = |x: f64| x.powi(n);
        if n % 2 == 1 {
            Interval { lo: down_rel(f(self.lo), ulps), hi: up_rel(f(self.hi), ulps) }
        } else if self.lo >= 0.0 {
            Interval { lo: down_rel(f(self.lo), ulps).max(0.0), hi: up_rel(f(self.hi), ulps) }
        } else if self.hi <= 0.0 {
            Interval { lo: down_rel(f(self.hi), ulps).max(0.0), hi: up_rel(f(self.lo), ulps) }
        } else {
            Interval { lo: 0.0, hi: up_rel(f(self.lo.abs().max(self.hi)), ulps) }
        }
    }

    /// `self^e` for a nonnegative base (the negative part is discarded) and an
    /// exponent interval; `0^0 = 1`.
    pub fn pow(&self, e: &Interval) -> Interval {
        let b = self.clamp_nonneg();
        if e.lo == 0.0 && e.hi == 0.0 {
            return Interval::point(1.0);
        }
        let corner = |x: f64, y: f64| -> f64 { x.powf(y) };
        let vals = [corner(b.lo, e.lo), corner(b.lo, e.hi), corner(b.hi, e.lo), corner(b.hi, e.hi)];
        let mut lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if b.lo == 0.0 && e.contains(0.0) {
            // 0^y jumps at y = 0
            lo = lo.min(0.0);
            hi = hi.max(1.0);
        }
        if vals.iter().any(|v| v.is_nan()) {
            return Interval { lo: 0.0, hi: f64::INFINITY };
        }
        Interval { lo: down_rel(lo, 2.0 * LIBM_ULPS).max(0.0), hi: up_rel(hi, 2.0 * LIBM_ULPS) }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: round_down(self.lo, o.lo, self.lo + o.lo), hi: round_up(self.hi, o.hi, self.hi + o.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: round_down(self.lo, -o.hi, self.lo - o.hi), hi: round_up(self.hi, -o.lo, self.hi - o.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            let p = mul0(a, b);
            let exact = a == 0.0 || b == 0.0;
            lo = lo.min(if exact { p } else { down(p) });
            hi = hi.max(if exact { p } else { up(p) });
        }
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Interval::ENTIRE;
        }
        let q = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        if q.iter().any(|v| v.is_nan()) {
            return Interval::ENTIRE;
        }
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo), hi: up(hi) }
    }
}
