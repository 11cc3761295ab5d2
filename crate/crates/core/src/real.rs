//! A small numeric trait so the reduction formulas are written once and
//! evaluated in plain doubles, in intervals, or as second-order Taylor jets.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{ToPrimitive, Zero};

use crate::interval::Interval;
use crate::rat::{self, Q};

pub trait Real:
    Clone + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// Constant (for intervals, a tight enclosure).
    fn cst(q: &Q) -> Self;
    /// An exactly representable constant.
    fn lift(x: f64) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// Power with a rational exponent of a nonnegative base; `0^0 = 1`.
    fn powq(&self, e: &Q) -> Self;
    fn sqrt(&self) -> Self;
    /// Bounds on the value.
    fn range(&self) -> (f64, f64);
    /// Value restricted to `[lo, hi]`; derivative information is dropped.
    fn clip(&self, lo: f64, hi: f64) -> Self;
    /// Join of two evaluations; derivative information is dropped.
    fn hull(&self, other: &Self) -> Self;
    fn max(&self, other: &Self) -> Self;
}

fn powq_exponent(e: &Q) -> Option<i32> {
    if e.is_integer() {
        e.to_integer().to_i32()
    } else {
        None
    }
}

impl Real for f64 {
    fn cst(q: &Q) -> Self {
        rat::to_f64(q)
    }
    fn lift(x: f64) -> Self {
        x
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powq(&self, e: &Q) -> Self {
        if e.is_zero() {
            return 1.0;
        }
        match powq_exponent(e) {
            Some(n) => f64::powi(*self, n),
            None => f64::max(*self, 0.0).powf(rat::to_f64(e)),
        }
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(f64::max(*self, 0.0))
    }
    fn range(&self) -> (f64, f64) {
        (*self, *self)
    }
    fn clip(&self, lo: f64, hi: f64) -> Self {
        self.clamp(lo, hi)
    }
    fn hull(&self, other: &Self) -> Self {
        f64::max(*self, *other)
    }
    fn max(&self, other: &Self) -> Self {
        f64::max(*self, *other)
    }
}

impl Real for Interval {
    fn cst(q: &Q) -> Self {
        Interval::from_q(q)
    }
    fn lift(x: f64) -> Self {
        Interval::point(x)
    }
    fn powi(&self, n: i32) -> Self {
        Interval::powi(self, n)
    }
    fn powq(&self, e: &Q) -> Self {
        if e.is_zero() {
            return Interval::point(1.0);
        }
        match powq_exponent(e) {
            Some(n) => Interval::powi(self, n),
            None => self.pow(&Interval::from_q(e)),
        }
    }
    fn sqrt(&self) -> Self {
        Interval::sqrt(self)
    }
    fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    fn clip(&self, lo: f64, hi: f64) -> Self {
        self.intersect(lo, hi).unwrap_or(*self)
    }
    fn hull(&self, other: &Self) -> Self {
        Interval::hull(self, other)
    }
    fn max(&self, other: &Self) -> Self {
        Interval::max(self, other)
    }
}

/// Value with first and second derivative with respect to one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    pub fn var(x: T) -> Self {
        Jet { v: x, d1: T::lift(1.0), d2: T::lift(0.0) }
    }

    fn constant(v: T) -> Self {
        Jet { v, d1: T::lift(0.0), d2: T::lift(0.0) }
    }

    /// Composes with a scalar function given its value and two derivatives at `v`.
    fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let d1 = f1.clone() * self.d1.clone();
        let d2 = f2 * self.d1.clone() * self.d1.clone() + f1 * self.d2.clone();
        Jet { v: f0, d1, d2 }
    }
}

/// Marker for "no derivative information".
pub trait Unbounded {
    fn unbounded() -> Self;
}

impl Unbounded for Interval {
    fn unbounded() -> Self {
        Interval::ENTIRE
    }
}

impl Unbounded for f64 {
    fn unbounded() -> Self {
        f64::NAN
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::lift(2.0);
        Jet {
            v: self.v.clone() * o.v.clone(),
            d1: self.d1.clone() * o.v.clone() + self.v.clone() * o.d1.clone(),
            d2: self.d2 * o.v + two * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let one = T::lift(1.0);
        let inv = one.clone() / o.v.clone();
        let inv2 = inv.clone() * inv.clone();
        let recip = o.chain(inv.clone(), -inv2.clone(), T::lift(2.0) * inv2 * inv);
        self * recip
    }
}

impl<T: Real + Unbounded> Real for Jet<T> {
    fn cst(q: &Q) -> Self {
        Jet::constant(T::cst(q))
    }
    fn lift(x: f64) -> Self {
        Jet::constant(T::lift(x))
    }
    fn powi(&self, n: i32) -> Self {
        match n {
            0 => Jet::constant(T::lift(1.0)),
            1 => self.clone(),
            _ => {
                let nf = T::lift(n as f64);
                let f0 = self.v.powi(n);
                let f1 = nf.clone() * self.v.powi(n - 1);
                let f2 = nf * T::lift((n - 1) as f64) * self.v.powi(n - 2);
                self.chain(f0, f1, f2)
            }
        }
    }
    fn powq(&self, e: &Q) -> Self {
        if e.is_zero() {
            return Jet::constant(T::lift(1.0));
        }
        if let Some(n) = powq_exponent(e) {
            return Real::powi(self, n);
        }
        let one = Q::from_integer(1.into());
        let ec = T::cst(e);
        let f0 = self.v.powq(e);
        let f1 = ec.clone() * self.v.powq(&(e - &one));
        let f2 = ec * T::cst(&(e - &one)) * self.v.powq(&(e - one.clone() - one));
        self.chain(f0, f1, f2)
    }
    fn sqrt(&self) -> Self {
        let half = Q::new(1.into(), 2.into());
        self.powq(&half)
    }
    fn range(&self) -> (f64, f64) {
        self.v.range()
    }
    fn clip(&self, lo: f64, hi: f64) -> Self {
        Jet { v: self.v.clip(lo, hi), d1: T::unbounded(), d2: T::unbounded() }
    }
    fn hull(&self, other: &Self) -> Self {
        Jet { v: self.v.hull(&other.v), d1: T::unbounded(), d2: T::unbounded() }
    }
    fn max(&self, other: &Self) -> Self {
        let (alo, ahi) = self.v.range();
        let (blo, bhi) = other.v.range();
        if alo >= bhi {
            self.clone()
        } else if blo >= ahi {
            other.clone()
        } else {
            Jet { v: self.v.max(&other.v), d1: T::unbounded(), d2: T::unbounded() }
        }
    }
}
