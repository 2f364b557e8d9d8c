//! The acceptance battery: every numerically checkable claim, each with
//! its tolerance pinned in code.
//!
//! `run_all` executes the twelve criteria and returns one result per
//! criterion; the `acceptance` integration test asserts them and prints
//! one pass/fail line each, and the CLI's `verify all` writes them into
//! a report.

use crate::dirprod::ProductSpace;
use crate::freeprod::{
    collapse_deadline_for_rvalues, homotopy_k, homotopy_p, FreeProductSpace,
    SpacePoint, WBoundaryPoint, ZEpsilonIndex,
};
use crate::models::{IntLineModel, ZStructureModel};
use crate::sweep::{item_rng, map_reduce};
use crate::verify::{
    check_metric_axioms, check_null_product, check_total_boundedness, random_completion_point,
    random_wpoint, reproduce_counterexample, NullProductConfig,
};
use crate::words::{Factor, Letter, ReducedWord};
use rand::Rng;
use serde::Serialize;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig { seed: 42 }
    }
}

fn line_space() -> FreeProductSpace {
    FreeProductSpace::new(Arc::new(IntLineModel), Arc::new(IntLineModel))
}

fn done(id: u32, name: &'static str, start: Instant, pass: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        pass,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

/// 1. Worked collapse deadlines, exact dyadic equality.
pub fn criterion_1(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    // trailing r-values (last letter first) 1, 3, 2 and its truncations
    let full = collapse_deadline_for_rvalues(&[1, 3, 2]);
    let two = collapse_deadline_for_rvalues(&[3, 2]);
    let one = collapse_deadline_for_rvalues(&[2]);
    let pass = full.to_f64() == 1.0 / 64.0 && two.to_f64() == 1.0 / 32.0 && one.to_f64() == 0.25;
    done(
        1,
        "collapse deadlines 1/64, 1/32, 1/4 (exact)",
        t,
        pass,
        format!("t(w)={full} t(w')={two} t(w'')={one}"),
    )
}

/// 2. Metric axioms for the glued metric at depth 8.
pub fn criterion_2(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let report = check_metric_axioms(
        |rng| random_wpoint(&s, rng, 8, 20),
        |a, b| s.dist(a, b),
        10_000,
        cfg.seed,
        1e-9,
    );
    done(
        2,
        "metric axioms, 10^4 triples at depth 8",
        t,
        report.pass,
        format!(
            "max triangle violation {:.3e}, symmetry {:.1e}",
            report.max_triangle_violation, report.max_symmetry_violation
        ),
    )
}

/// 3. Scale law: within-copy diameter is exactly r*(w).
pub fn criterion_3(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let (violations, min_ratio) = map_reduce(
        200,
        |i| {
            let mut rng = item_rng(cfg.seed ^ 0x5ca1e, i as u64);
            let word = crate::verify::random_word(&mut rng, 6, 20);
            let side = crate::freeprod::natural_side(&word)
                .unwrap_or(crate::freeprod::Side::X);
            let scale = s.rstar(&word).to_f64();
            // carrier sample including both endpoints, so the sup is
            // realized exactly
            let mut locals = vec![0.0, 1.0];
            for _ in 0..998 {
                locals.push(rng.gen_range(0.0..1.0));
            }
            let mut sup = 0.0f64;
            let mut bad = 0u64;
            for (k, &u) in locals.iter().enumerate() {
                for &v in locals.iter().skip(k + 1) {
                    let d = scale * s.model(side).rho(u, v);
                    if d > scale {
                        bad += 1;
                    }
                    sup = sup.max(d);
                }
            }
            (bad, sup / scale)
        },
        || (0u64, f64::INFINITY),
        |a, b| (a.0 + b.0, a.1.min(b.1)),
    );
    let pass = violations == 0 && min_ratio >= 0.95;
    done(
        3,
        "scale law: sup within-copy distance = r*(w)",
        t,
        pass,
        format!("certified sup <= r* with 0 violations, min sampled sup ratio {min_ratio:.3}"),
    )
}

/// 4. Total boundedness at eps in {1/2, 1/4, 1/8}.
pub fn criterion_4(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let mut detail = String::new();
    let mut pass = true;
    for eps in [0.5, 0.25, 0.125] {
        let r = check_total_boundedness(&s, eps, 8, 100_000, cfg.seed).expect("valid eps");
        pass &= r.pass;
        detail.push_str(&format!(
            "eps={eps}: net {} uncovered {} max gap {:.4}; ",
            r.net_size, r.uncovered, r.max_gap
        ));
    }
    done(4, "eps-net covers 10^5 points of the completion", t, pass, detail)
}

/// 5. K is a 2 eps homotopy and fixes gluing points to their deadlines.
pub fn criterion_5(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let eps = 0.5;
    let idx = ZEpsilonIndex::build(&s, eps, 8).expect("valid eps");
    // track diameters over 10^4 points x 50 time steps
    let tgrid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    let max_track = map_reduce(
        10_000,
        |i| {
            let mut rng = item_rng(cfg.seed, i as u64);
            let p = random_completion_point(&s, &mut rng, 8, 20, 10);
            let track: Vec<_> = tgrid
                .iter()
                .map(|&tt| homotopy_k(&s, &idx, &p, tt).expect("valid time"))
                .collect();
            let mut diam = 0.0f64;
            for a in 0..track.len() {
                for b in a + 1..track.len() {
                    if track[a].point == track[b].point {
                        continue;
                    }
                    let d = s.dist_general(&track[a].point, &track[b].point);
                    diam = diam
                        .max(d.value + d.tolerance + track[a].tolerance + track[b].tolerance);
                }
            }
            diam
        },
        || 0.0f64,
        f64::max,
    );
    // exhaustive gluing-point fixing over depth-6 words on letters
    // {+-1, +-2}, plus the exact deadline time itself
    let mut fix_failures = 0u64;
    let mut words: Vec<ReducedWord> = vec![ReducedWord::one()];
    for _ in 0..6 {
        let mut next = Vec::new();
        for w in &words {
            let factors = match w.last() {
                Some(l) => vec![l.factor.opposite()],
                None => vec![Factor::G, Factor::H],
            };
            for f in factors {
                for e in [-2i64, -1, 1, 2] {
                    next.push(w.child(Letter::new(f, e)));
                }
            }
        }
        for w in &next {
            if idx.contains(w) {
                continue;
            }
            let deadline = idx.collapse_deadline(&s, w).to_f64();
            let p = SpacePoint::Interior(s.gluing_point(w));
            for frac in [0.25, 0.5, 0.75, 1.0] {
                let out = homotopy_k(&s, &idx, &p, frac * deadline).expect("valid time");
                if out.point != p {
                    fix_failures += 1;
                }
            }
        }
        words = next;
    }
    let pass = max_track < 2.0 * eps && fix_failures == 0;
    done(
        5,
        "K tracks < 2 eps; gluing points fixed to t(w)",
        t,
        pass,
        format!("max track {max_track:.4} (< {}), fixing failures {fix_failures}", 2.0 * eps),
    )
}

/// 6. P is the identity at 0 and certified interior afterwards.
pub fn criterion_6(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let end_depth = 10usize;
    let tail = WBoundaryPoint::end_halfwidth(end_depth);
    let failures = map_reduce(
        1_000,
        |i| {
            let mut rng = item_rng(cfg.seed ^ 0x9e6, i as u64);
            let b = crate::verify::random_boundary(&s, &mut rng, 8, 20, end_depth);
            let p = SpacePoint::Boundary(b);
            let mut bad = 0u64;
            // identity at 0, exactly
            let id = homotopy_p(&s, &p, 0.0).expect("valid time");
            if id.point != p || id.tolerance != 0.0 {
                bad += 1;
            }
            // certified interior on a grid of times past the tail bound
            for k in 0..40 {
                let tt = tail * 1.0001 + (1.0 - tail * 1.0001) * k as f64 / 39.0;
                let out = homotopy_p(&s, &p, tt).expect("valid time");
                match out.point {
                    SpacePoint::Interior(q) => {
                        let gap = s.certified_boundary_gap(&q);
                        if !(gap > out.tolerance) {
                            bad += 1;
                        }
                    }
                    SpacePoint::Boundary(_) => bad += 1,
                }
            }
            bad
        },
        || 0u64,
        |a, b| a + b,
    );
    done(
        6,
        "P: identity at 0, certified interior past the tail bound",
        t,
        failures == 0,
        format!("failures {failures} over 1000 boundary approximants x 40 times"),
    )
}

/// 7. The proper map p: base value, double-dagger bracket, translate
/// variation.
pub fn criterion_7(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 230.0, 30.0)
        .expect("build");
    let model = IntLineModel;
    let mut ok = s.p_of(0.5) == 0.0;
    let mut worst = String::new();
    // (double dagger): p(alpha(boundary x [t_i, t_(i-1)))) in (i-1, i+1]
    for i in 1..=12usize {
        let t_i = s.p.times[i];
        let t_prev = s.p.times[i - 1];
        for &b in &model.boundary_points() {
            for j in 0..50 {
                let tt = t_i + (t_prev - t_i) * j as f64 / 50.0;
                let v = s.p.eval(&s.metric_x, model.homotopy(b, tt));
                if !(v > (i - 1) as f64 && v <= (i + 1) as f64) {
                    ok = false;
                    worst = format!("i={i} t={tt} p={v}");
                }
            }
        }
    }
    // R_p(C_1) <= 2 over |g| <= 200
    let bp = model.basepoint();
    let mut r_p = 0.0f64;
    for g in -200..=200i64 {
        let lo = s.p_of(model.act(g - 1, bp).unwrap());
        let hi = s.p_of(model.act(g + 1, bp).unwrap());
        let (lo, hi) = if (g - 1) <= 0 && 0 <= (g + 1) {
            (0.0, lo.max(hi))
        } else {
            (lo.min(hi), lo.max(hi))
        };
        r_p = r_p.max(hi - lo);
    }
    ok &= r_p <= 2.0;
    done(
        7,
        "proper map p: p(x0)=0, bracket (i-1, i+1], R_p(C_1) <= 2",
        t,
        ok,
        format!("R_p(C_1) = {r_p:.4} over |g| <= 200 {worst}"),
    )
}

/// 8. Reparametrized homotopy brackets.
pub fn criterion_8(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 40.0, 40.0)
        .expect("build");
    let boundary = IntLineModel.boundary_points();
    let mut hat_violations = 0u64;
    let mut prime_violations = 0u64;
    // 100 x 100 grid; the boundary axis cycles the model's boundary set
    for bi in 0..100 {
        let b = boundary[bi % boundary.len()];
        for j in 0..100 {
            let tt = 0.05 + 0.95 * j as f64 / 99.0;
            let v = s.p.eval(&s.metric_x, s.alpha_hat(b, tt));
            if !(v >= 1.0 / tt - 1.0 && v <= 1.0 / tt + 2.0) {
                hat_violations += 1;
            }
            let tp = 20.0 * j as f64 / 99.0;
            let v = s.p.eval(&s.metric_x, s.alpha_prime(b, tp).expect("t >= 0"));
            if !(v > tp - 1.0 && v < tp + 3.0) {
                prime_violations += 1;
            }
        }
    }
    let pass = hat_violations == 0 && prime_violations == 0;
    done(
        8,
        "alpha-hat in [1/t-1, 1/t+2]; alpha-prime in (t-1, t+3)",
        t,
        pass,
        format!("violations {hat_violations} + {prime_violations} on 100x100 grids"),
    )
}

/// 9. Ray slopes land in the displayed interval.
pub fn criterion_9(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 130.0, 130.0)
        .expect("build");
    let mut pass = true;
    let mut detail = String::new();
    for mu in [0.1, 1.0, 10.0] {
        let tt = 10.0 * (mu * mu + 1.0f64).sqrt();
        let (lo, hi) = ProductSpace::ray_slope_interval(mu, tt);
        let z = crate::dirprod::ProductSpacePoint::Join(crate::dirprod::JoinPoint::new(
            0.0, 1.0, mu,
        ));
        let p = s.ray_gamma_prime(&z, tt).expect("t >= 0");
        let measured = s.slope(p.x, p.y);
        pass &= measured > lo && measured < hi;
        detail.push_str(&format!("mu={mu}: {measured:.4} in ({lo:.4}, {hi:.4}); "));
    }
    // the mu = 1, t = 10 interval evaluates to about (0.5006, 1.9973);
    // direct evaluation gives (0.50353, 1.98598)
    let (lo, hi) = ProductSpace::ray_slope_interval(1.0, 10.0);
    pass &= (lo - 0.5006).abs() < 5e-3 && (hi - 1.9973).abs() < 2e-2;
    done(
        9,
        "ray slope inside the displayed interval",
        t,
        pass,
        detail,
    )
}

/// 10. The product-topology counterexample and its join resolution.
pub fn criterion_10(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let r = reproduce_counterexample(100, 0.1).expect("range >= 1");
    let pass = r.product_all_uncovered && r.join_n0.is_some_and(|n0| n0 >= 1 && n0 <= 100);
    done(
        10,
        "no product cover element holds any translate; join absorbs the tail",
        t,
        pass,
        format!(
            "product uncovered for all n in [-100, 100]; join n0 = {:?}",
            r.join_n0
        ),
    )
}

/// 11. Null condition on the product.
pub fn criterion_11(cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let npc = NullProductConfig {
        delta: 0.1,
        grid: 300,
        c_halfwidth: 1,
        d_halfwidth: 1,
        seed: cfg.seed,
        sample_budget: 2500,
    };
    let r = check_null_product(Arc::new(IntLineModel), Arc::new(IntLineModel), &npc)
        .expect("valid config");
    let pass = r.pass && r.case1_cells > 0 && r.max_diam_mu_case1 < 0.05;
    done(
        11,
        "product null condition: finite Gamma, fits, slope spread < delta/2",
        t,
        pass,
        format!(
            "Gamma rects {:?} (size {}, exceeds grid: {}), sampled {}, case-1 cells {}, \
             max diam_mu {:.4} < {:.3}",
            r.gamma_rects,
            r.gamma_size,
            r.gamma_exceeds_grid,
            r.sampled,
            r.case1_cells,
            r.max_diam_mu_case1,
            r.case1_bound
        ),
    )
}

/// 12. Null condition on the free product by exact scale certificates.
pub fn criterion_12(_cfg: &AcceptanceConfig) -> CriterionResult {
    let t = Instant::now();
    let s = line_space();
    let at6 = crate::verify::nullfree_big_translates(&s, 0.25, 6).expect("valid eps");
    let at8 = crate::verify::nullfree_big_translates(&s, 0.25, 8).expect("valid eps");
    let stable = at6 == at8;
    let expected: Vec<String> = vec!["1", "g:-1", "g:1", "h:-1", "h:1"]
        .into_iter()
        .map(String::from)
        .collect();
    let mut got: Vec<String> = at6.iter().map(|w| w.to_string()).collect();
    got.sort();
    let pass = stable && got == expected;
    done(
        12,
        "free-product Gamma by exact scale certificates, depth-stable",
        t,
        pass,
        format!("Gamma = {got:?}, stable 6 -> 8: {stable}"),
    )
}

/// Runs the full battery in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    vec![
        criterion_1(cfg),
        criterion_2(cfg),
        criterion_3(cfg),
        criterion_4(cfg),
        criterion_5(cfg),
        criterion_6(cfg),
        criterion_7(cfg),
        criterion_8(cfg),
        criterion_9(cfg),
        criterion_10(cfg),
        criterion_11(cfg),
        criterion_12(cfg),
    ]
}
