//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Values the library derives are re-derived here by the brute-force oracle
//! in `common`. Two criteria state numbers that are mathematically false;
//! they print FAIL and are marked `known`, which does not fail the run.
//! Any other FAIL exits nonzero.

mod common;

use std::time::Instant;

use common::*;
use commons_core::commonality::{self, CycleMethod, FamilyKind, WitnessVerdict};
use commons_core::density::cycle_density;
use commons_core::graphon::StepGraphon;
use commons_core::rat::{self, q, qi, Q};
use commons_core::reduction::k3k2::{h_poly, Z0, Z1};
use commons_core::reduction::{self, ReductionProblem, Strategy, Verdict};
use commons_core::repro::{self, CROSSOVER_TABLE};
use commons_core::{density, mono_density, Graph, Mode};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_WITNESS: f64 = 5e-8;
const TOL_FAMILY: f64 = 5e-6;
const TOL_PAW_PARTS: f64 = 5e-7;
const TOL_BRACKET: f64 = 1e-12;
const TOL_FD: f64 = 1e-6;

struct Check {
    id: u32,
    name: &'static str,
    pass: bool,
    /// A FAIL whose stated value is unattainable.
    known: bool,
    detail: String,
}

fn check(id: u32, name: &'static str, pass: bool, detail: String) -> Check {
    Check { id, name, pass, known: false, detail }
}

fn dec(s: &str) -> Q {
    rat::parse_q(s).unwrap()
}

fn zy(z: &str, y: &str) -> StepGraphon {
    StepGraphon::three_block_zy(&dec(z), &dec(y)).unwrap()
}

fn exact(h: &Graph, w: &StepGraphon) -> Q {
    density(h, w).unwrap().exact().cloned().unwrap()
}

fn exact_mono(h: &Graph, w: &StepGraphon) -> Q {
    mono_density(h, w).unwrap().exact().cloned().unwrap()
}

fn f(x: &Q) -> f64 {
    rat::to_f64(x)
}

fn k3_pair() -> Check {
    let start = Instant::now();
    let w = repro::k3_pair_graphon().unwrap();
    let k3 = Graph::complete(3);
    let (t, tc, m) = (exact(&k3, &w), exact(&k3, &w.complement()), exact_mono(&k3.copies(2), &w));
    let oracle = brute_density(&k3, &w) == t && brute_density(&k3, &w.complement()) == tc && brute_mono(&k3.copies(2), &w) == m;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let stated = t == q(55, 216) && tc == q(1, 27) && m == q(3089, 46656);
    let below = m < q(65, 729);
    let mut c = check(
        1,
        "exact densities for two triangles",
        stated && below && oracle && ms < 1000.0,
        format!(
            "t(K3,W)={} t(K3,1-W)={} mono={} (stated 55/216, 1/27, 3089/46656); oracle agrees: {oracle}; mono < 65/729: {below}; {ms:.1} ms",
            rat::fmt_q(&t),
            rat::fmt_q(&tc),
            rat::fmt_q(&m)
        ),
    );
    c.known = !stated && below && oracle;
    c
}

fn two_triangles_three_edges() -> Check {
    let h = Graph::parse_expr("2*K3+3*K2").unwrap();
    let w = zy("0.28", "0.42");
    let m = exact_mono(&h, &w);
    let (k2, k3) = (Graph::complete(2), Graph::complete(3));
    let wc = w.complement();
    let oracle = rat::pow_q(&brute_density(&k3, &w), 2) * rat::pow_q(&brute_density(&k2, &w), 3)
        + rat::pow_q(&brute_density(&k3, &wc), 2) * rat::pow_q(&brute_density(&k2, &wc), 3);
    let v = f(&m);
    check(
        2,
        "two triangles and three edges witness",
        (v - 0.00390226).abs() <= TOL_WITNESS && m < q(1, 256) && oracle == m,
        format!("mono = {v:.10} (want 0.00390226 ± {TOL_WITNESS:e}), < 2^-8: {}, oracle agrees: {}", m < q(1, 256), oracle == m),
    )
}

fn triangle_edge_upper() -> Check {
    let h = Graph::parse_expr("K3+K2").unwrap();
    let w = zy("0.263661", "0.2177");
    let m = exact_mono(&h, &w);
    let v = f(&m);
    let oracle = brute_mono(&h, &w) == m;
    let s = commonality::search_witness(&h, FamilyKind::ThreeBlockZy, 100_000, 0, commonality::DEFAULT_TOL).unwrap();
    check(
        3,
        "triangle plus edge upper bound",
        (v - 0.12145).abs() <= TOL_FAMILY && oracle && s.best_value <= 0.121450 && s.evaluations <= 100_000,
        format!("value {v:.8} (want 0.12145 ± {TOL_FAMILY:e}), oracle agrees: {oracle}; search best {:.8} in {} evaluations", s.best_value, s.evaluations),
    )
}

fn paw_upper() -> Check {
    let w = zy("0.266491", "0.2187477");
    let m = exact_mono(&Graph::paw(), &w);
    let v = f(&m);
    let oracle = brute_mono(&Graph::paw(), &w) == m;
    check(4, "paw upper bound", (v - 0.121415).abs() <= TOL_FAMILY && oracle, format!("value {v:.8} (want 0.121415 ± {TOL_FAMILY:e}), oracle agrees: {oracle}"))
}

fn three_paws() -> Check {
    let w = repro::three_paws_graphon().unwrap();
    let wc = w.complement();
    let (k2, paw) = (Graph::complete(2), Graph::paw());
    let h = Graph::disjoint_union(&[paw.copies(3), k2.copies(2)]);
    let m = exact_mono(&h, &w);
    let (tp, tpc, t2, t2c) = (brute_density(&paw, &w), brute_density(&paw, &wc), brute_density(&k2, &w), brute_density(&k2, &wc));
    let oracle = rat::pow_q(&tp, 3) * rat::pow_q(&t2, 2) + rat::pow_q(&tpc, 3) * rat::pow_q(&t2c, 2) == m;
    let parts = (f(&tp) - 0.0506164).abs() <= TOL_PAW_PARTS && (f(&tpc) - 0.074879).abs() <= TOL_PAW_PARTS;
    let below_stated = f(&m) < 0.000121856;
    let below_literal = m < q(1, 1 << 14);
    let below_random = m < random_threshold(14);
    let mut c = check(
        5,
        "three paws and two edges witness",
        below_stated && below_literal && parts && oracle,
        format!(
            "mono = {:.6e}; < 0.000121856: {below_stated}; < 2^-14: {below_literal}; < 2*(1/2)^14: {below_random}; t(P,W) = {:.7}, t(P,1-W) = {:.7}; oracle agrees: {oracle}",
            f(&m),
            f(&tp),
            f(&tpc)
        ),
    );
    c.known = !below_literal && below_stated && below_random && parts && oracle;
    c
}

fn triangle_edge_lower() -> Check {
    let b = reduction::lower_bound_k3_k2();
    let h = h_poly();
    // h at the bracket ends, by Horner in rationals
    let horner = |z: &Q| [9, 10, 24, -6, -28].iter().fold(qi(0), |acc, &c| acc * z + qi(c));
    let (z0, z1) = (q(Z0.0, Z0.1), q(Z1.0, Z1.1));
    let sign = horner(&z0).is_negative() && horner(&z1).is_positive() && h.eval(&z0) == horner(&z0);
    let third = q(1, 3);
    let four3 = qi(1) + &third;
    let two3 = qi(1) - &third;
    let endpoint = q(1, 16) * rat::pow_q(&four3, 4) + q(1, 16) * rat::pow_q(&two3, 4) - q(1, 8) * &third * (rat::pow_q(&four3, 3) - q(16, 9));
    let ok = b.all_hold() && sign && f(&b.bound) > 0.121423 && endpoint == q(5, 27);
    check(
        6,
        "triangle plus edge lower bound",
        ok,
        format!("sign change on [{}, {}]: {sign}; bound {:.9} > 0.121423; endpoint {}; {} steps hold", rat::fmt_q(&z0), rat::fmt_q(&z1), b.bound_f64, rat::fmt_q(&endpoint), b.steps.len()),
    )
}

fn two_triangle_certs() -> Check {
    let mut bad = Vec::new();
    for ell in 0..=2 {
        for s in [Strategy::GridWithMargin, Strategy::CertifiedInterval] {
            let c = reduction::verify_reduction(&ReductionProblem::two_triangles(ell), s, reduction::verify::DEFAULT_RESOLUTION).unwrap();
            if c.verdict != Verdict::Holds || !reduction::replay(&c).unwrap().ok {
                bad.push(format!("l={ell} {s:?}: {}", c.verdict.name()));
            }
        }
    }
    check(7, "two-triangle reduction certificates", bad.is_empty(), if bad.is_empty() { "l = 0, 1, 2 hold under grid and interval, replay ok".into() } else { bad.join("; ") })
}

fn three_triangle_certs() -> Check {
    let mut bad = Vec::new();
    let mut shown = Vec::new();
    for r in 0..=15i64 {
        let p = ReductionProblem::three_triangles(r);
        let c = reduction::verify_reduction(&p, Strategy::GridWithMargin, reduction::verify::DEFAULT_RESOLUTION).unwrap();
        let x0 = p.x0_crossover().unwrap();
        if c.verdict != Verdict::Holds || x0 < CROSSOVER_TABLE[r as usize] {
            bad.push(format!("r={r}: {} crossover {x0:.4}", c.verdict.name()));
        }
        if [5, 10, 13, 15].contains(&r) {
            shown.push(format!("x0[{r}]={x0:.4}>={}", CROSSOVER_TABLE[r as usize]));
        }
    }
    check(8, "three-triangle certificates and crossovers", bad.is_empty(), if bad.is_empty() { format!("r = 0..15 hold; {}", shown.join(" ")) } else { bad.join("; ") })
}

fn two_block_family() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [1u32, 3, 10] {
        let b = commonality::uncommon_family_bound(k).unwrap();
        // oracle: component densities by enumeration, then the product
        let w = [0.5, 0.5];
        let a = vec![vec![b.p, 1.0], vec![1.0, b.p]];
        let ac = vec![vec![1.0 - b.p, 0.0], vec![0.0, 1.0 - b.p]];
        let (k2, k3) = (Graph::complete(2), Graph::complete(3));
        let e = (3 * k + b.ell) as i32;
        let scaled = brute_density_f64(&k3, &w, &a).powi(k as i32) * brute_density_f64(&k2, &w, &a).powi(b.ell as i32) * 2f64.powi(e);
        let bracket = brute_density_f64(&k3, &w, &ac).powi(k as i32) * brute_density_f64(&k2, &w, &ac).powi(b.ell as i32) * 2f64.powi(e);
        let factor = f(&commonality::family_factor()).powi(k as i32);
        let this = b.holds && b.bracket_error <= TOL_BRACKET && (bracket - 1.0).abs() <= 1e-12 && scaled < factor && (scaled - b.scaled_w).abs() <= 1e-12 * scaled;
        ok &= this;
        parts.push(format!("k={k} l={}: bracket-1={:.1e} scaled={:.9}<{:.9}", b.ell, b.bracket - 1.0, scaled, factor));
    }
    check(9, "two-block witness family", ok, parts.join("; "))
}

fn odd_cycles() -> Check {
    let mut ok = true;
    for r in 1..=20u32 {
        let c = commonality::uncommon_odd_cycle_family(1, r).unwrap();
        let want = if r <= 6 { CycleMethod::Direct } else { CycleMethod::AmGm };
        let chain = match want {
            CycleMethod::Direct => c.direct_margin > 0.0,
            CycleMethod::AmGm => c.amgm_step_margin >= 0.0 && c.amgm_final_margin > 0.0,
        };
        ok &= c.holds && c.method == want && chain;
    }
    let w = repro::three_block_sample().unwrap();
    let mut agree = true;
    for len in [5, 7] {
        let lib = cycle_density(len, &w, Mode::Rational).unwrap().exact().cloned().unwrap();
        agree &= lib == brute_density(&Graph::cycle(len).unwrap(), &w) && lib == cycle_trace(len, &w);
    }
    check(10, "odd cycle witness family", ok && agree, format!("r = 1..6 direct, 7..20 AM-GM: {ok}; C5, C7 transfer matrix = enumeration: {agree}"))
}

fn wheel() -> Check {
    let h = Graph::wheel5();
    let t = commonality::chromatic_strongly_common_test(&h).unwrap();
    let w = StepGraphon::turan(chromatic_brute(&h)).unwrap();
    let oracle = brute_density(&h, &w) == qi(0) && Some(brute_density(&h, &w.complement())) == t.lhs;
    let (lhs, rhs) = (t.lhs.clone().unwrap(), t.rhs.clone().unwrap());
    check(
        11,
        "chromatic test on the 5-wheel",
        lhs == q(1, 243) && rhs == q(1025, 59049) && lhs < rhs && oracle && t.report.verdict == WitnessVerdict::NotStronglyCommonWitness,
        format!("{} < {}; oracle agrees: {oracle}", rat::fmt_q(&lhs), rat::fmt_q(&rhs)),
    )
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (k2, k3) = (Graph::complete(2), Graph::complete(3));
    let pieces = [k2.clone(), k3.clone(), Graph::paw(), Graph::path(3), Graph::cycle(4).unwrap()];

    let mut mult = 0;
    for _ in 0..500 {
        let w = random_graphon(&mut rng, 4);
        let (a, b) = (&pieces[rng.gen_range(0..5)], &pieces[rng.gen_range(0..5)]);
        let joint = density(&Graph::disjoint_union(&[a.clone(), b.clone()]), &w).unwrap();
        mult += (joint == density(a, &w).unwrap() * density(b, &w).unwrap()) as usize;
    }

    let mut goodman = 0;
    let mut base = 0;
    for _ in 0..1000 {
        let w = random_graphon(&mut rng, 4);
        let wc = w.complement();
        let (t2, t3, t2c, t3c) = (exact(&k2, &w), exact(&k3, &w), exact(&k2, &wc), exact(&k3, &wc));
        goodman += (&t3 + &t3c >= rat::pow_q(&t2, 3) + rat::pow_q(&t2c, 3)) as usize;
        let (t2, t3, t2c, t3c) = (f(&t2), f(&t3), f(&t2c), f(&t3c));
        base += (0..=15).all(|r| {
            let e = r as f64 / 3.0;
            2f64.powf(9.0 + e) * (t2.powf(e) * t3.powi(3) + t2c.powf(e) * t3c.powi(3)) >= 2.0 - 1e-12
        }) as usize;
    }

    let mut fd = 0;
    let mut worst = 0f64;
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=5);
        let r = rng.gen_range(0..=15);
        let p = ReductionProblem::three_triangles(r);
        let p = ReductionProblem { k: qi(k), ..p };
        let x: f64 = rng.gen_range(-0.9..0.9);
        let y = rng.gen_range(0.05..0.95) * (1.0 + x).powi(3);
        let (kf, lf) = (k as f64, r as f64 / 3.0);
        let h = 1e-6;
        let num = (f_direct(kf, lf, 3.0, x, y + h) - f_direct(kf, lf, 3.0, x, y - h)) / (2.0 * h);
        let closed = p.partial_y(x, y);
        let rel = (num - closed).abs() / closed.abs().max(1.0);
        worst = worst.max(rel);
        fd += (rel < TOL_FD) as usize;
    }

    let (mut bern, mut rearr, mut hold) = (0, 0, 0);
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(0.0..3.0);
        let b = rng.gen_range(-a..3.0);
        bern += reduction::bernoulli_ineq(a, b, rng.gen_range(1.0001..6.0)).unwrap() as usize;
        let (s, t): (f64, f64) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
        let d: f64 = rng.gen_range(0.0..2.0);
        let bb = d + rng.gen_range(0.0..2.0);
        rearr += reduction::rearrange_ineq(rng.gen_range(0.0..3.0), bb, rng.gen_range(0.0..3.0), d, s.max(t), s.min(t)).unwrap() as usize;
        let lo = rng.gen_range(0.01..3.0);
        hold += reduction::holder_claim(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0), lo, lo + rng.gen_range(0.0..3.0)).unwrap() as usize;
    }

    let ok = mult == 500 && goodman == 1000 && base == 1000 && fd == 10_000 && bern == 1000 && rearr == 1000 && hold == 1000;
    check(
        12,
        "property suites",
        ok,
        format!("multiplicativity {mult}/500; triangle strong bound {goodman}/1000; base case {base}/1000; d/dy max rel err {worst:.1e} ({fd}/10000); helper inequalities {bern}/{rearr}/{hold} of 1000"),
    )
}

fn main() {
    let start = Instant::now();
    let runs: [fn() -> Check; 12] = [
        k3_pair,
        two_triangles_three_edges,
        triangle_edge_upper,
        paw_upper,
        three_paws,
        triangle_edge_lower,
        two_triangle_certs,
        three_triangle_certs,
        two_block_family,
        odd_cycles,
        wheel,
        property_suites,
    ];
    let mut unexpected = 0;
    let mut known = 0;
    for run in runs {
        let t = Instant::now();
        let c = run();
        let tag = match (c.pass, c.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag:<12} #{:<2} {:<44} {:>7.2}s  {}", c.id, c.name, t.elapsed().as_secs_f64(), c.detail);
        if !c.pass {
            if c.known {
                known += 1;
            } else {
                unexpected += 1;
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {} pass, {known} known fail, {unexpected} unexpected fail, {total:.1}s", 12 - known - unexpected);
    if unexpected > 0 || total > 300.0 {
        std::process::exit(1);
    }
}
