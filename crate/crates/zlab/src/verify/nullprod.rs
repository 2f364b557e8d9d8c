//! Null condition on the join compactification of a product.
//!
//! The exceptional set is built from the claims' displayed thresholds:
//! `J` keeps the translates with `p` at most `(4/delta)(R_q + R_p/delta)`
//! (or still too far from the boundary), `P_J` those with `q` at most
//! `M_J/delta`, and symmetrically `K`, `Q_K`.  All four bounds are found
//! by galloping on monotone predicates, so the exceptional set comes out
//! as an exact union of two integer rectangles.  Every sampled translate
//! outside it must fit a single element of the canonical `delta`-net of
//! join neighborhoods; interval arithmetic on the translate rectangles
//! makes each membership test exact.

use crate::dirprod::{gallop_frontier, slope_of, JoinPoint, ProductSpace};
use crate::error::{Result, ZlabError};
use crate::models::ZStructureModel;
use crate::sweep::{item_rng, map_reduce};
use crate::verify::{CoverElement, CoverSpec, NullReport};
use rand::Rng;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct NullProductConfig {
    pub delta: f64,
    /// The user window: cells with |g|, |h| up to this bound.
    pub grid: i64,
    /// Compacta are the intervals between the -hw and +hw orbit points.
    pub c_halfwidth: i64,
    pub d_halfwidth: i64,
    pub seed: u64,
    pub sample_budget: usize,
}

impl Default for NullProductConfig {
    fn default() -> Self {
        NullProductConfig {
            delta: 0.1,
            grid: 300,
            c_halfwidth: 1,
            d_halfwidth: 1,
            seed: 42,
            sample_budget: 2500,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullProductReport {
    pub config: NullProductConfig,
    pub r_p: f64,
    pub r_q: f64,
    /// `(4/delta)(R_q + R_p/delta)`.
    pub j_threshold: f64,
    pub m_j: f64,
    /// `M_J / delta`.
    pub pj_threshold: f64,
    pub m_k: f64,
    pub qk_threshold: f64,
    /// Exceptional rectangles: `|g| <= gamma_rects[i][0]` and
    /// `|h| <= gamma_rects[i][1]`.
    pub gamma_rects: [[i64; 2]; 2],
    pub gamma_size: u64,
    pub gamma_exceeds_grid: bool,
    pub nonexceptional_in_grid: u64,
    pub sampled: u64,
    /// Exceptional-set description, sampled witnesses, fit failures.
    pub report: NullReport,
    pub case1_cells: u64,
    pub max_diam_mu_case1: f64,
    /// `delta/2`: the doubled Case-1 slope-spread bound.
    pub case1_bound: f64,
    pub cover_elements: usize,
    /// `g,h,p_lo,p_hi,q_lo,q_hi,mu_lo,mu_hi,fit,case1` rows for sampled
    /// cells.
    pub per_cell_csv: String,
    pub pass: bool,
}

/// Exact value ranges of `p`, `q`, the carrier hulls, and the slope over
/// one translate rectangle `gC x hD`.
struct CellRanges {
    p_lo: f64,
    p_hi: f64,
    q_lo: f64,
    q_hi: f64,
    x_hull: (f64, f64),
    y_hull: (f64, f64),
    mu_lo: f64,
    mu_hi: f64,
}

fn interval_range(
    model: &dyn ZStructureModel,
    metric: &crate::dirprod::ProperMetric,
    map: &crate::dirprod::ProperMap,
    g: i64,
    hw: i64,
) -> ((f64, f64), (f64, f64)) {
    let bp = model.basepoint();
    let lo_u = model.act(g - hw, bp).expect("orbit interior");
    let hi_u = model.act(g + hw, bp).expect("orbit interior");
    let p_lo_end = map.eval(metric, lo_u);
    let p_hi_end = map.eval(metric, hi_u);
    let (p_lo, p_hi) = if g - hw <= 0 && 0 <= g + hw {
        (0.0, p_lo_end.max(p_hi_end))
    } else {
        (p_lo_end.min(p_hi_end), p_lo_end.max(p_hi_end))
    };
    ((lo_u.min(hi_u), lo_u.max(hi_u)), (p_lo, p_hi))
}

fn cell_ranges(space: &ProductSpace, cfg: &NullProductConfig, g: i64, h: i64) -> CellRanges {
    let (x_hull, (p_lo, p_hi)) = interval_range(
        space.x.as_ref(),
        &space.metric_x,
        &space.p,
        g,
        cfg.c_halfwidth,
    );
    let (y_hull, (q_lo, q_hi)) = interval_range(
        space.y.as_ref(),
        &space.metric_y,
        &space.q,
        h,
        cfg.d_halfwidth,
    );
    CellRanges {
        p_lo,
        p_hi,
        q_lo,
        q_hi,
        x_hull,
        y_hull,
        mu_lo: slope_of(p_hi, q_lo),
        mu_hi: slope_of(p_lo, q_hi),
    }
}

fn hull_within(hull: (f64, f64), center: f64, eps: f64) -> bool {
    (hull.0 - center).abs() < eps && (hull.1 - center).abs() < eps
}

/// `Some(index)` of the first canonical cover element containing the
/// whole cell.
fn fit_cell(cover: &[(JoinPoint, f64)], cell: &CellRanges) -> Option<usize> {
    for (idx, (center, eps)) in cover.iter().enumerate() {
        let ok = if center.mu == 0.0 {
            hull_within(cell.x_hull, center.xbar, *eps) && cell.mu_hi < *eps
        } else if center.mu.is_infinite() {
            hull_within(cell.y_hull, center.ybar, *eps) && cell.mu_lo > 1.0 / *eps
        } else {
            hull_within(cell.x_hull, center.xbar, *eps)
                && hull_within(cell.y_hull, center.ybar, *eps)
                && (cell.mu_lo - center.mu).abs() < *eps
                && (cell.mu_hi - center.mu).abs() < *eps
                && cell.mu_hi.is_finite()
        };
        if ok {
            return Some(idx);
        }
    }
    None
}

struct ClaimBounds {
    g_j_meet: i64,
    h_pj_meet: i64,
    h_k_meet: i64,
    g_qk_meet: i64,
    m_j: f64,
    pj_threshold: f64,
    m_k: f64,
    qk_threshold: f64,
}

/// The four compacta of the claims, as integer frontier bounds found by
/// galloping on monotone failure predicates; `_meet` bounds include the
/// translates that merely intersect.
fn claim_bounds(space: &ProductSpace, cfg: &NullProductConfig, j_threshold: f64) -> ClaimBounds {
    let delta = cfg.delta;
    let quarter = delta / 4.0;
    let half = delta / 2.0;
    let x_cell = |g: i64| {
        interval_range(space.x.as_ref(), &space.metric_x, &space.p, g, cfg.c_halfwidth)
    };
    let y_cell = |h: i64| {
        interval_range(space.y.as_ref(), &space.metric_y, &space.q, h, cfg.d_halfwidth)
    };
    let j_fail = |g: i64| {
        let (hull, (p_lo, _)) = x_cell(g);
        let diam = hull.1 - hull.0;
        let to_boundary = hull.0.min(1.0 - hull.1);
        p_lo <= j_threshold || diam >= quarter || to_boundary >= quarter
    };
    let g_j = gallop_frontier(cfg.c_halfwidth, j_fail);
    let g_j_meet = g_j + 2 * cfg.c_halfwidth;
    let m_j = space.p_of(
        space
            .x
            .act(g_j_meet + cfg.c_halfwidth, space.x.basepoint())
            .expect("orbit interior"),
    );
    let pj_threshold = m_j / delta;
    let pj_fail = |h: i64| {
        let (hull, (q_lo, _)) = y_cell(h);
        let diam = hull.1 - hull.0;
        let to_boundary = hull.0.min(1.0 - hull.1);
        q_lo <= pj_threshold || diam >= half || to_boundary >= half
    };
    let h_pj = gallop_frontier(cfg.d_halfwidth, pj_fail);
    let h_pj_meet = h_pj + 2 * cfg.d_halfwidth;

    let k_fail = |h: i64| {
        let (hull, _) = y_cell(h);
        let diam = hull.1 - hull.0;
        let to_boundary = hull.0.min(1.0 - hull.1);
        diam >= quarter || to_boundary >= quarter
    };
    let h_k = gallop_frontier(cfg.d_halfwidth, k_fail);
    let h_k_meet = h_k + 2 * cfg.d_halfwidth;
    let m_k = space.q_of(
        space
            .y
            .act(h_k_meet + cfg.d_halfwidth, space.y.basepoint())
            .expect("orbit interior"),
    );
    let qk_threshold = m_k / delta;
    let qk_fail = |g: i64| {
        let (hull, (p_lo, _)) = x_cell(g);
        let diam = hull.1 - hull.0;
        let to_boundary = hull.0.min(1.0 - hull.1);
        p_lo <= qk_threshold || diam >= quarter || to_boundary >= quarter
    };
    let g_qk = gallop_frontier(cfg.c_halfwidth, qk_fail);
    let g_qk_meet = g_qk + 2 * cfg.c_halfwidth;
    ClaimBounds {
        g_j_meet,
        h_pj_meet,
        h_k_meet,
        g_qk_meet,
        m_j,
        pj_threshold,
        m_k,
        qk_threshold,
    }
}

/// The canonical cover as a [`CoverSpec`] of join neighborhoods.
pub fn canonical_join_cover(space: &ProductSpace, delta: f64) -> CoverSpec {
    CoverSpec {
        elements: canonical_cover(space, delta)
            .into_iter()
            .map(|(center, eps)| CoverElement::JoinNbhd { center, eps })
            .collect(),
    }
}

/// The canonical cover: `U(<xbar,0>, delta)`, `U(<ybar,inf>, delta)`,
/// and interior-slope neighborhoods on a `delta/2` grid over
/// `[delta, 1/delta]`.
fn canonical_cover(space: &ProductSpace, delta: f64) -> Vec<(JoinPoint, f64)> {
    let mut cover = Vec::new();
    for &xbar in &space.x.boundary_points() {
        cover.push((JoinPoint::new(xbar, space.y.boundary_points()[0], 0.0), delta));
    }
    for &ybar in &space.y.boundary_points() {
        cover.push((
            JoinPoint::new(space.x.boundary_points()[0], ybar, f64::INFINITY),
            delta,
        ));
    }
    let mut mu = 1.5 * delta;
    while mu <= 1.0 / delta + delta {
        for &xbar in &space.x.boundary_points() {
            for &ybar in &space.y.boundary_points() {
                cover.push((JoinPoint::new(xbar, ybar, mu), delta));
            }
        }
        mu += 0.5 * delta;
    }
    cover
}

pub fn check_null_product(
    x: Arc<dyn ZStructureModel>,
    y: Arc<dyn ZStructureModel>,
    cfg: &NullProductConfig,
) -> Result<NullProductReport> {
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(ZlabError::ParamOutOfRange {
            name: "delta",
            value: cfg.delta,
            what: "must lie strictly between 0 and 1",
        });
    }
    let delta = cfg.delta;
    // phase 1: maps just past the measurement window to read off the
    // variations
    let warm_target = cfg.grid as f64 / 2.0 + 24.0;
    let space = ProductSpace::build(x.clone(), y.clone(), warm_target, warm_target)?;
    let measure_var = |side_x: bool| -> f64 {
        let mut worst = 0.0f64;
        for g in -cfg.grid..=cfg.grid {
            let (_, (lo, hi)) = if side_x {
                interval_range(space.x.as_ref(), &space.metric_x, &space.p, g, cfg.c_halfwidth)
            } else {
                interval_range(space.y.as_ref(), &space.metric_y, &space.q, g, cfg.d_halfwidth)
            };
            worst = worst.max(hi - lo);
        }
        worst
    };
    let r_p = measure_var(true);
    let r_q = measure_var(false);
    let j_threshold = 4.0 / delta * (r_q + r_p / delta);

    // phase 2: rebuild deep enough that every threshold preimage and the
    // sampling ring beyond it stay inside the constructed annuli; the
    // gallop results tell us how far that is, so retry until covered
    let m_j_estimate = j_threshold + r_p + 2.0;
    let mut target_p = (j_threshold + r_p + 8.0) * 1.4;
    let mut target_q = (m_j_estimate / delta + r_q + 8.0) * 1.4;
    let mut space = ProductSpace::build(
        space.x.clone(),
        space.y.clone(),
        target_p.max(warm_target),
        target_q.max(warm_target),
    )?;
    let mut bounds;
    let mut attempt = 0;
    loop {
        bounds = claim_bounds(&space, cfg, j_threshold);
        // everything sampled later (the ring out to 1.25x the
        // rectangles) must stay inside the constructed annuli
        let g_reach = (bounds.g_j_meet.max(bounds.g_qk_meet) as f64 * 1.3) as i64
            + cfg.c_halfwidth
            + 8;
        let h_reach = (bounds.h_pj_meet.max(bounds.h_k_meet) as f64 * 1.3) as i64
            + cfg.d_halfwidth
            + 8;
        let need_p = space.metric_x.dist_to_base(
            space.x.act(g_reach, space.x.basepoint()).expect("orbit interior"),
        );
        let need_q = space.metric_y.dist_to_base(
            space.y.act(h_reach, space.y.basepoint()).expect("orbit interior"),
        );
        if space.p.covers_radius(need_p) && space.q.covers_radius(need_q) {
            break;
        }
        if attempt >= 3 {
            return Err(ZlabError::SearchExhausted(format!(
                "proper maps not deep enough after {attempt} rebuilds \
                 (need radii {need_p:.1}/{need_q:.1})"
            )));
        }
        target_p = (target_p * 1.5).max(space.p.eval_at_radius(need_p) * 1.2);
        target_q = (target_q * 1.5).max(space.q.eval_at_radius(need_q) * 1.2);
        space = ProductSpace::build(
            space.x.clone(),
            space.y.clone(),
            target_p.max(warm_target),
            target_q.max(warm_target),
        )?;
        attempt += 1;
    }
    let ClaimBounds {
        g_j_meet,
        h_pj_meet,
        h_k_meet,
        g_qk_meet,
        m_j,
        pj_threshold,
        m_k,
        qk_threshold,
    } = bounds;

    let gamma_rects = [[g_j_meet, h_pj_meet], [g_qk_meet, h_k_meet]];
    let count = |a: i64, b: i64| (2 * a as u64 + 1) * (2 * b as u64 + 1);
    // inclusion-exclusion; the overlap is the smaller rectangle in each
    // coordinate
    let gamma_size = count(g_j_meet, h_pj_meet) + count(g_qk_meet, h_k_meet)
        - count(g_j_meet.min(g_qk_meet), h_pj_meet.min(h_k_meet));
    let gamma_exceeds_grid =
        g_j_meet.max(g_qk_meet) > cfg.grid || h_pj_meet.max(h_k_meet) > cfg.grid;
    let in_gamma = |g: i64, h: i64| {
        (g.abs() <= g_j_meet && h.abs() <= h_pj_meet)
            || (g.abs() <= g_qk_meet && h.abs() <= h_k_meet)
    };
    let grid_cells = count(cfg.grid, cfg.grid);
    let gamma_in_grid = count(g_j_meet.min(cfg.grid), h_pj_meet.min(cfg.grid))
        + count(g_qk_meet.min(cfg.grid), h_k_meet.min(cfg.grid))
        - count(
            g_j_meet.min(g_qk_meet).min(cfg.grid),
            h_pj_meet.min(h_k_meet).min(cfg.grid),
        );
    let nonexceptional_in_grid = grid_cells - gamma_in_grid;

    // sampling: in-grid non-exceptional cells when they exist, the ring
    // just outside the exceptional rectangles, and far log-spread cells
    let g_max = g_j_meet.max(g_qk_meet);
    let h_max = h_pj_meet.max(h_k_meet);
    let g_span = (g_max as f64 * 1.25) as i64 + 4;
    let h_span = (h_max as f64 * 1.25) as i64 + 4;
    let cover = canonical_cover(&space, delta);
    let budget = cfg.sample_budget.max(64);
    let cells: Vec<(i64, i64)> = (0..budget)
        .filter_map(|i| {
            let mut rng = item_rng(cfg.seed, i as u64);
            for _ in 0..64 {
                let (g, h) = match i % 3 {
                    0 => {
                        // in-grid attempt
                        (
                            rng.gen_range(-cfg.grid..=cfg.grid),
                            rng.gen_range(-cfg.grid..=cfg.grid),
                        )
                    }
                    1 => {
                        // ring just outside the rectangles
                        if rng.gen() {
                            let g = g_max + 1 + rng.gen_range(0..=g_max.max(4) / 4);
                            let h = rng.gen_range(0..=h_span);
                            (if rng.gen() { g } else { -g }, if rng.gen() { h } else { -h })
                        } else {
                            let h = h_max + 1 + rng.gen_range(0..=h_max.max(4) / 4);
                            let g = rng.gen_range(0..=g_span);
                            (if rng.gen() { g } else { -g }, if rng.gen() { h } else { -h })
                        }
                    }
                    _ => {
                        // log-spread over the certified build range
                        let lg = rng.gen_range(0.0..(g_span as f64).ln().max(1.0));
                        let lh = rng.gen_range(0.0..(h_span as f64).ln().max(1.0));
                        let g = lg.exp() as i64;
                        let h = lh.exp() as i64;
                        (if rng.gen() { g } else { -g }, if rng.gen() { h } else { -h })
                    }
                };
                if !in_gamma(g, h) {
                    return Some((g, h));
                }
            }
            None
        })
        .collect();

    struct CellOut {
        row: String,
        fit: Option<usize>,
        case1: bool,
        diam_mu: f64,
    }
    let outs: Vec<CellOut> = map_reduce(
        cells.len(),
        |i| {
            let (g, h) = cells[i];
            let cell = cell_ranges(&space, cfg, g, h);
            let fit = fit_cell(&cover, &cell);
            // Case 1: misses both J and K, slope range meets
            // [delta, 1/delta]
            let case1 = g.abs() > g_j_meet
                && h.abs() > h_k_meet
                && cell.mu_hi >= delta
                && cell.mu_lo <= 1.0 / delta;
            let diam_mu = if case1 && cell.mu_hi.is_finite() {
                cell.mu_hi - cell.mu_lo
            } else {
                0.0
            };
            let row = format!(
                "{g},{h},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
                cell.p_lo,
                cell.p_hi,
                cell.q_lo,
                cell.q_hi,
                cell.mu_lo,
                cell.mu_hi,
                fit.map_or(-1i64, |v| v as i64),
                case1 as u8
            );
            vec![CellOut {
                row,
                fit,
                case1,
                diam_mu,
            }]
        },
        Vec::new,
        |mut a, b| {
            a.extend(b);
            a
        },
    );

    let mut fit_failures = Vec::new();
    let mut witness = Vec::new();
    let mut case1_cells = 0u64;
    let mut max_diam_mu = 0.0f64;
    let mut csv = String::from("g,h,p_lo,p_hi,q_lo,q_hi,mu_lo,mu_hi,fit,case1\n");
    for (idx, out) in outs.iter().enumerate() {
        if csv.len() < 1 << 20 {
            csv.push_str(&out.row);
            csv.push('\n');
        }
        let (g, h) = cells[idx];
        match out.fit {
            Some(e) if witness.len() < 200 => witness.push((format!("g={g},h={h}"), e)),
            Some(_) => {}
            None => fit_failures.push(format!("g={g},h={h}")),
        }
        if out.case1 {
            case1_cells += 1;
            max_diam_mu = max_diam_mu.max(out.diam_mu);
        }
    }
    let case1_bound = delta / 2.0;
    let pass = fit_failures.is_empty() && (case1_cells == 0 || max_diam_mu < case1_bound);
    Ok(NullProductReport {
        config: cfg.clone(),
        r_p,
        r_q,
        j_threshold,
        m_j,
        pj_threshold,
        m_k,
        qk_threshold,
        gamma_rects,
        gamma_size,
        gamma_exceeds_grid,
        nonexceptional_in_grid,
        sampled: cells.len() as u64,
        report: NullReport {
            exceptional: vec![
                format!("|g| <= {} x |h| <= {}", gamma_rects[0][0], gamma_rects[0][1]),
                format!("|g| <= {} x |h| <= {}", gamma_rects[1][0], gamma_rects[1][1]),
            ],
            exceptional_size: gamma_size,
            witness,
            fit_failures,
            cover_defects: Vec::new(),
            pass,
        },
        case1_cells,
        max_diam_mu_case1: max_diam_mu,
        case1_bound,
        cover_elements: cover.len(),
        per_cell_csv: csv,
        pass,
    })
}
