//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rat::{fmt_q, qi, Q};

/// Coefficients from the constant term upward; trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<Q>);

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    /// From integer coefficients, constant term first.
    pub fn from_ints(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| qi(c)).collect())
    }

    pub fn constant(c: Q) -> Poly {
        Poly::new(vec![c])
    }

    pub fn x() -> Poly {
        Poly::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + crate::rat::to_f64(c))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect())
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(qi(1)), |acc, _| &acc * self)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.0.iter().rev().fold(Poly::default(), |acc, c| &(&acc * inner) + &Poly::constant(c.clone()))
    }

    /// Sign of the value at `x`: -1, 0 or 1.
    pub fn sign_at(&self, x: &Q) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("({})x^{i}", fmt_q(c))).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.0.get(i).cloned().unwrap_or_default() + o.0.get(i).cloned().unwrap_or_default()).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn arithmetic() {
        let p = Poly::from_ints(&[1, 1]);
        assert_eq!(p.pow(2), Poly::from_ints(&[1, 2, 1]));
        assert_eq!(p.pow(3).derivative(), Poly::from_ints(&[3, 6, 3]));
        assert_eq!((&p - &p).degree(), None);
        assert_eq!(Poly::from_ints(&[0, 0, 1]).compose(&p), Poly::from_ints(&[1, 2, 1]));
        assert_eq!(p.eval(&q(1, 2)), q(3, 2));
        assert_eq!(Poly::from_ints(&[-2, 0, 1]).sign_at(&q(3, 2)), 1);
    }
}
