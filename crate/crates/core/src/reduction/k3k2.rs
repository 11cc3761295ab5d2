//! Exact replay of the lower bound for `c(K3 ⊔ K2)`.
//!
//! With `k = ℓ = 1`, `g(z) = z³` and the triangle floor `ρ`, the reduced
//! objective is `E(x, y) = ((1+x)⁴ + (1−x)⁴)/16 − xy/8`, minimized at the
//! largest feasible `y = (1+x)³ − ρ(1+x)` for `x > 0`. Every step below is
//! an identity or sign check in exact rational arithmetic.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::rat::{self, q, qi, Q};

/// Bracket around the root of `h` on `[0, 1]`.
pub const Z0: (i64, i64) = (908_638_793, 1_000_000_000);
pub const Z1: (i64, i64) = (908_638_794, 1_000_000_000);

/// The bound stated for the problem.
pub fn claimed_bound() -> Q {
    q(121_423, 1_000_000)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K3K2Bound {
    /// Proven lower bound (exact).
    #[serde(with = "rat::as_text")]
    pub bound: Q,
    pub bound_f64: f64,
    pub steps: Vec<Step>,
}

impl K3K2Bound {
    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }
}

fn step(name: &str, holds: bool, detail: String) -> Step {
    Step { name: name.into(), holds, detail }
}

fn c(n: i64, d: i64) -> Poly {
    Poly::constant(q(n, d))
}

/// `((1+x)⁴ + (1−x)⁴)/16` as a polynomial in `x`.
fn even_part() -> Poly {
    let x = Poly::x();
    let one = c(1, 1);
    (&(&one + &x).pow(4) + &(&one - &x).pow(4)).scale(&q(1, 16))
}

/// `h(z) = 9z⁴ + 10z³ + 24z² − 6z − 28`.
pub fn h_poly() -> Poly {
    Poly::from_ints(&[-28, -6, 24, 10, 9])
}

/// `P(z) = (3z⁶ + 4z⁵ + 12z⁴ − 4z³ − 28z² + 40)/216`.
pub fn p_poly() -> Poly {
    Poly::from_ints(&[40, 0, -28, -4, 12, 4, 3]).scale(&q(1, 216))
}

/// Replays the case analysis and returns the exact bound with its steps.
pub fn lower_bound_k3_k2() -> K3K2Bound {
    let x = Poly::x();
    let one = c(1, 1);
    let mut steps = Vec::new();

    // Branch 1/3 < x ≤ 1 with ρ = 16x/3.
    let lin = &even_part() - &(&x * &(&(&one + &x).pow(3) - &x.scale(&q(16, 3)))).scale(&q(1, 8));
    let quad = Poly::from_ints(&[3, -50, 27]);
    let want = quad.scale(&q(-1, 24));
    steps.push(step("linear-branch-derivative", lin.derivative() == want, format!("d/dx = {:?}", lin.derivative())));
    // quad is convex, so negative at both ends of [1/3, 1] means negative throughout
    let q13 = quad.eval(&q(1, 3));
    let q1 = quad.eval(&qi(1));
    steps.push(step(
        "linear-branch-increasing",
        quad.coeffs()[2].is_positive() && q13.is_negative() && q1.is_negative(),
        format!("27x²−50x+3 at 1/3: {}, at 1: {}", rat::fmt_q(&q13), rat::fmt_q(&q1)),
    ));
    let lin_at = lin.eval(&q(1, 3));
    steps.push(step("linear-branch-endpoint", lin_at == q(5, 27), format!("value at x = 1/3: {}", rat::fmt_q(&lin_at))));

    // Branch 0 ≤ x ≤ 1/3: x = (1 − z²)/3, √(1 − 3x) = z.
    let z = Poly::x();
    let xz = (&one - &z.pow(2)).scale(&q(1, 3));
    let fisher = (&(&one - &z) + &(&xz.scale(&qi(3)) * &(&c(3, 1) + &z))).scale(&q(4, 9));
    let fisher_branch = &even_part().compose(&xz) - &(&xz * &(&(&one + &xz).pow(3) - &fisher)).scale(&q(1, 8));
    let p = p_poly();
    steps.push(step("substitution-identity", fisher_branch == p, format!("{:?}", fisher_branch)));
    let h = h_poly();
    let dp_want = (&z * &h).scale(&q(1, 108));
    steps.push(step("derivative-factor", p.derivative() == dp_want, format!("P' = {:?}", p.derivative())));
    let h2 = h.derivative().derivative();
    let h2_want = &c(119, 3) + &Poly::from_ints(&[5, 18]).pow(2).scale(&q(1, 3));
    steps.push(step("h-convex", h2 == h2_want, format!("h'' = {:?}", h2)));
    let h0 = h.eval(&Q::zero());
    steps.push(step("h-negative-at-0", h0.is_negative(), format!("h(0) = {}", rat::fmt_q(&h0))));
    let (z0, z1) = (q(Z0.0, Z0.1), q(Z1.0, Z1.1));
    let (hz0, hz1) = (h.eval(&z0), h.eval(&z1));
    steps.push(step(
        "root-bracket",
        hz0.is_negative() && hz1.is_positive(),
        format!("h(z0) = {:.3e}, h(z1) = {:.3e}", rat::to_f64(&hz0), rat::to_f64(&hz1)),
    ));
    let mixed = (qi(3) * rat::pow_q(&z0, 6) + qi(4) * rat::pow_q(&z0, 5) + qi(12) * rat::pow_q(&z0, 4) - qi(4) * rat::pow_q(&z1, 3) - qi(28) * rat::pow_q(&z1, 2) + qi(40)) / qi(216);
    steps.push(step("mixed-bound", mixed > claimed_bound(), format!("{:.11} > 0.121423", rat::to_f64(&mixed))));
    let p_at0 = p.eval(&Q::zero());
    let p_at1 = p.eval(&qi(1));
    steps.push(step("endpoint-z0", p_at0 == q(5, 27), format!("P(0) = {}", rat::fmt_q(&p_at0))));
    steps.push(step("endpoint-z1", p_at1 == q(1, 8), format!("P(1) = {}", rat::fmt_q(&p_at1))));
    // x ≤ 0: the y term is nonnegative and ((1+x)⁴+(1−x)⁴)/16 ≥ 1/8 by convexity.
    let e = even_part();
    let e_min = e.eval(&Q::zero());
    let e_quad = &e - &c(1, 8);
    let nonneg_coeffs = e_quad.coeffs().iter().all(|c| !c.is_negative());
    steps.push(step("nonpositive-x", e_min == q(1, 8) && nonneg_coeffs, format!("even part − 1/8 = {:?}", e_quad)));

    let bound = [q(5, 27), mixed, p_at0, p_at1, e_min].into_iter().min().unwrap();
    K3K2Bound { bound_f64: rat::to_f64(&bound), bound, steps }
}
