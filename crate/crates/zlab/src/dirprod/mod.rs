//! The join compactification of a direct product.
//!
//! A proper metric on each factor comes from graphing a gauge over the
//! compact carrier.  The proper maps `p` and `q` rescale distance to the
//! basepoint annulus by annulus, chosen so that their variation over
//! translates is bounded and the factor homotopies escape each annulus
//! by a known time.  The slope `mu = q/p` separates boundary directions:
//! the boundary of the product is the join of the factor boundaries with
//! `mu` as the join coordinate.

use crate::error::{Result, ZlabError};
use crate::models::ZStructureModel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Proper metric on the interior of a factor, pulled back from the
/// graph embedding `x -> (x, h^-1(gauge(x)))` into carrier x `[0, inf)`
/// with the Pythagorean combination, `h(s) = s/(1+s)`.
#[derive(Clone)]
pub struct ProperMetric {
    model: Arc<dyn ZStructureModel>,
}

impl ProperMetric {
    pub fn new(model: Arc<dyn ZStructureModel>) -> Result<ProperMetric> {
        let bp = model.basepoint();
        if model.gauge(bp) != 0.0 {
            return Err(ZlabError::Config(format!(
                "gauge({bp}) = {} at the basepoint, expected 0",
                model.gauge(bp)
            )));
        }
        for b in model.boundary_points() {
            if model.gauge(b) != 1.0 {
                return Err(ZlabError::Config(format!(
                    "gauge({b}) = {} on the boundary, expected 1",
                    model.gauge(b)
                )));
            }
        }
        Ok(ProperMetric { model })
    }

    /// Height of the graph over a carrier point; diverges toward the
    /// boundary, which is what makes closed balls compact.
    pub fn lift(&self, a: f64) -> f64 {
        let g = self.model.gauge(a);
        g / (1.0 - g)
    }

    pub fn dist(&self, a: f64, b: f64) -> f64 {
        let dr = self.model.rho(a, b);
        let dl = self.lift(a) - self.lift(b);
        (dr * dr + dl * dl).sqrt()
    }

    pub fn dist_to_base(&self, a: f64) -> f64 {
        self.dist(a, self.model.basepoint())
    }
}

/// Tunables for the annulus construction; defaults reproduce the shipped
/// line-model runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProperMapConfig {
    /// Half-width (in pre-embedding coordinates for the line model) of
    /// the fundamental compactum `C_1`; its translates must cover.
    pub c1_halfwidth: f64,
    /// Multiplicative slack applied to escape times (below the supremum)
    /// and covering radii (above the infimum).
    pub safety: f64,
    /// Samples per homotopy time window when bounding escape radii.
    pub time_samples: usize,
}

impl Default for ProperMapConfig {
    fn default() -> Self {
        ProperMapConfig {
            // the closed interval between the +-1 orbit points: translates
            // tile the interior, and it contains the basepoint
            c1_halfwidth: 1.0,
            // thin margin: the escape-track term feeds back into the next
            // radius, so the slack compounds; anything fatter turns the
            // annulus growth geometric long before the null-condition
            // thresholds are reached
            safety: 0.99999,
            time_samples: 64,
        }
    }
}

/// The proper map `p`: a piecewise rescaling of distance-to-basepoint
/// taking the closed annulus between `r_(i-1)` and `r_i` onto `[i-1, i]`.
/// Serializes in full (radii, times, config) so a constructed map can be
/// reused across runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProperMap {
    /// Strictly increasing annulus radii `r_1 < r_2 < ...` (r_0 = 0).
    pub radii: Vec<f64>,
    /// Escape times `1 = t_0 > t_1 > ...`; the factor homotopy keeps the
    /// boundary outside the closed `r_i`-ball before time `t_i`.
    pub times: Vec<f64>,
    pub config: ProperMapConfig,
}

impl ProperMap {
    /// Builds annuli until the map value covers `target_value`.
    ///
    /// Per annulus: `r_i'` bounds the homotopy tracks from the boundary
    /// after `t_(i-1)`; `r_i` additionally swallows every translate of
    /// `C_1` meeting the previous ball; `t_i` is found by bisection as a
    /// time by which the boundary tracks still clear the closed ball,
    /// shrunk by the safety factor.
    pub fn build(
        model: &dyn ZStructureModel,
        metric: &ProperMetric,
        target_value: f64,
        config: ProperMapConfig,
    ) -> Result<ProperMap> {
        let c1 = compactum_cloud(model, config.c1_halfwidth);
        let mut radii: Vec<f64> = Vec::new();
        let mut times: Vec<f64> = vec![1.0];
        // r_1: a ball around the basepoint containing C_1
        let r1 = c1
            .iter()
            .map(|&u| metric.dist_to_base(u))
            .fold(0.0, f64::max)
            * (2.0 - config.safety);
        radii.push(r1);
        let mut frontier = 0i64; // largest |g| with g C_1 meeting the previous ball
        let max_annuli = (target_value as usize).saturating_mul(4) + 64;
        while (radii.len() as f64) < target_value + 2.0 {
            if radii.len() > max_annuli {
                return Err(ZlabError::SearchExhausted(format!(
                    "{} annuli built without reaching map value {target_value}",
                    radii.len()
                )));
            }
            let i = radii.len();
            let r_i = radii[i - 1];
            let t_prev = times[i - 1];
            let t_i = escape_time(model, metric, r_i, t_prev, &config)?;
            times.push(t_i);
            let pad = 2.0 - config.safety;
            // r'_(i+1): tracks of the boundary after t_i stay inside
            let mut r_next = track_radius(model, metric, t_i, &config) * pad;
            let near_dist = |g: i64| {
                (0..=1)
                    .map(|s| {
                        let u = translate_end(model, g, config.c1_halfwidth * (2 * s - 1) as f64);
                        metric.dist_to_base(u)
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            // translates of C_1 meeting the current ball fit inside;
            // nearness is monotone in |g|, so gallop to the last one
            frontier = gallop_frontier(frontier, |g| near_dist(g) < r_i);
            for g in [frontier, -frontier] {
                for s in [-1.0, 1.0] {
                    let u = translate_end(model, g, config.c1_halfwidth * s);
                    r_next = r_next.max(metric.dist_to_base(u) * pad);
                }
            }
            // reach the next orbit translate so the annuli advance by at
            // least one fundamental domain per level
            r_next = r_next.max(near_dist(frontier + 1) * pad);
            if r_next <= r_i {
                r_next = r_i * pad;
            }
            radii.push(r_next);
        }
        Ok(ProperMap {
            radii,
            times,
            config,
        })
    }

    /// `p` at a carrier point.
    pub fn eval(&self, metric: &ProperMetric, a: f64) -> f64 {
        self.eval_at_radius(metric.dist_to_base(a))
    }

    /// Piecewise-linear interpolation of annulus index by radius.
    pub fn eval_at_radius(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        match self.radii.binary_search_by(|r| r.partial_cmp(&rho).unwrap()) {
            Ok(i) => (i + 1) as f64,
            Err(0) => rho / self.radii[0],
            Err(i) if i < self.radii.len() => {
                i as f64 + (rho - self.radii[i - 1]) / (self.radii[i] - self.radii[i - 1])
            }
            Err(_) => {
                // past the built range: continue with the last slope
                let n = self.radii.len();
                let span = self.radii[n - 1] - self.radii[n - 2];
                n as f64 + (rho - self.radii[n - 1]) / span
            }
        }
    }

    /// Largest map value the construction certifies (beyond it the
    /// evaluator extrapolates).
    pub fn built_value(&self) -> f64 {
        self.radii.len() as f64
    }

    /// Whether a radius lies inside the constructed annuli (evaluation
    /// past them extrapolates and carries no certificate).
    pub fn covers_radius(&self, rho: f64) -> bool {
        self.radii.last().is_some_and(|&r| rho <= r)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Largest `g >= from` satisfying the monotone predicate (false stays
/// false as `g` grows); doubling search then bisection.
pub(crate) fn gallop_frontier(from: i64, qualifies: impl Fn(i64) -> bool) -> i64 {
    if !qualifies(from + 1) {
        return from;
    }
    let mut lo = from + 1;
    let mut step = 1i64;
    while qualifies(lo + step) {
        lo += step;
        step = step.saturating_mul(2);
        if step > i64::MAX / 4 {
            break;
        }
    }
    let mut hi = lo + step;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if qualifies(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn compactum_cloud(model: &dyn ZStructureModel, halfwidth: f64) -> Vec<f64> {
    let n = 9;
    (0..=n)
        .map(|i| {
            let x = -halfwidth + 2.0 * halfwidth * i as f64 / n as f64;
            line_coord(model, x)
        })
        .collect()
}

// The fundamental compactum is an interval in pre-embedding coordinates;
// models expose enough structure to place it through the basepoint orbit.
fn line_coord(model: &dyn ZStructureModel, x: f64) -> f64 {
    let below = x.floor() as i64;
    let frac = x - below as f64;
    let a = model
        .act(below, model.basepoint())
        .expect("basepoint orbit is interior");
    let b = model
        .act(below + 1, model.basepoint())
        .expect("basepoint orbit is interior");
    a + (b - a) * frac
}

fn translate_end(model: &dyn ZStructureModel, g: i64, end: f64) -> f64 {
    model
        .act(g, line_coord(model, end))
        .expect("compactum stays interior")
}

/// Largest time (shrunk by the safety factor) by which every boundary
/// track still avoids the closed `radius`-ball around the basepoint.
fn escape_time(
    model: &dyn ZStructureModel,
    metric: &ProperMetric,
    radius: f64,
    t_prev: f64,
    config: &ProperMapConfig,
) -> Result<f64> {
    let clears = |t: f64| -> bool {
        model.boundary_points().iter().all(|&b| {
            (1..=config.time_samples).all(|j| {
                let s = t * j as f64 / config.time_samples as f64;
                metric.dist_to_base(model.homotopy(b, s)) > radius
            })
        })
    };
    let mut lo = 0.0f64;
    let mut hi = t_prev;
    if clears(hi) {
        // escape even at the previous time; keep times strictly falling
        return Ok(hi * config.safety);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if clears(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = lo * config.safety;
    if !(t > 0.0) {
        return Err(ZlabError::SearchExhausted(format!(
            "no positive escape time below {t_prev} for radius {radius}"
        )));
    }
    Ok(t.min(t_prev * config.safety))
}

/// Upper bound on the distance-to-basepoint of boundary tracks over
/// `[t, 1]`.
fn track_radius(
    model: &dyn ZStructureModel,
    metric: &ProperMetric,
    t: f64,
    config: &ProperMapConfig,
) -> f64 {
    let mut worst = 0.0f64;
    for &b in &model.boundary_points() {
        for j in 0..=config.time_samples {
            let s = t + (1.0 - t) * j as f64 / config.time_samples as f64;
            worst = worst.max(metric.dist_to_base(model.homotopy(b, s)));
        }
    }
    worst
}

/// Max-minus-min of a proper map over translated compacta:
/// `R_p(C) = sup_g (max p - min p on g C)`.
pub fn variation_r(
    model: &dyn ZStructureModel,
    metric: &ProperMetric,
    map: &ProperMap,
    cloud: &[f64],
    gset: &[i64],
) -> Result<f64> {
    if cloud.is_empty() || gset.is_empty() {
        return Err(ZlabError::ParamOutOfRange {
            name: "samples",
            value: 0.0,
            what: "compactum cloud and group sample must be nonempty",
        });
    }
    let mut worst = 0.0f64;
    for &g in gset {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &u in cloud {
            let v = map.eval(metric, model.act(g, u)?);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

/// The reparametrization `xi`: piecewise linear through `(0,0)`, the
/// knots `(1/i, t_i)` for `i >= 2`, and `(1,1)`.
///
/// This sends the window `[1/(i+1), 1/i]` into `[t_(i+1), t_i]`, which
/// is what makes `p(alpha(x, xi(t)))` land in `[1/t - 1, 1/t + 2]`: on
/// `[t_(i+1), t_i)` the map value sits in `(i, i+2]` while `1/t` runs
/// through `[i, i+1]`.
#[derive(Clone, Debug)]
pub struct Reparam {
    times: Vec<f64>,
}

impl Reparam {
    pub fn new(times: &[f64]) -> Result<Reparam> {
        if times.len() < 3 || times[0] != 1.0 {
            return Err(ZlabError::Config(
                "times must start at t_0 = 1 with at least t_1, t_2 built".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] >= w[0]) || times.iter().any(|&t| t <= 0.0) {
            return Err(ZlabError::Config(
                "times must be strictly decreasing within (0, 1]".into(),
            ));
        }
        Ok(Reparam {
            times: times.to_vec(),
        })
    }

    pub fn xi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let n = self.times.len();
        if t >= 0.5 {
            // top segment: (1/2, t_2) to (1, 1)
            let t2 = self.times[2];
            return t2 + (t - 0.5) * (1.0 - t2) / 0.5;
        }
        let i = (1.0 / t).floor() as usize; // t in [1/(i+1), 1/i)
        if i + 1 >= n {
            // below the deepest knot: linear down to the origin
            let last = n - 1;
            return t * (last as f64) * self.times[last];
        }
        let (x0, y0) = (1.0 / (i + 1) as f64, self.times[i + 1]);
        let (x1, y1) = (1.0 / i as f64, self.times[i]);
        y0 + (t - x0) * (y1 - y0) / (x1 - x0)
    }
}

/// Extended nonnegative reals: `1/0 = inf` and `1/inf = 0` exactly.
pub fn slope_of(p_val: f64, q_val: f64) -> f64 {
    if p_val == 0.0 {
        f64::INFINITY
    } else {
        q_val / p_val
    }
}

/// An element `<xbar, ybar, mu>` of the join of the factor boundaries.
///
/// `mu = 0` collapses the Y coordinate; `mu = inf` collapses X.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JoinPoint {
    pub xbar: f64,
    pub ybar: f64,
    pub mu: f64,
}

impl JoinPoint {
    pub fn new(xbar: f64, ybar: f64, mu: f64) -> JoinPoint {
        JoinPoint { xbar, ybar, mu }
    }

    /// Equality under the join identifications.
    pub fn same_class(&self, other: &JoinPoint) -> bool {
        if self.mu != other.mu {
            return false;
        }
        if self.mu == 0.0 {
            self.xbar == other.xbar
        } else if self.mu.is_infinite() {
            self.ybar == other.ybar
        } else {
            self.xbar == other.xbar && self.ybar == other.ybar
        }
    }
}

impl fmt::Display for JoinPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mu.is_infinite() {
            write!(f, "xbar={}|ybar={}|mu=inf", self.xbar, self.ybar)
        } else {
            write!(f, "xbar={}|ybar={}|mu={}", self.xbar, self.ybar, self.mu)
        }
    }
}

impl FromStr for JoinPoint {
    type Err = ZlabError;

    fn from_str(s: &str) -> Result<JoinPoint> {
        let mut xbar = None;
        let mut ybar = None;
        let mut mu = None;
        for part in s.split('|') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| ZlabError::PointParse(s.to_string()))?;
            let slot = match key.trim() {
                "xbar" => &mut xbar,
                "ybar" => &mut ybar,
                "mu" => &mut mu,
                _ => return Err(ZlabError::PointParse(s.to_string())),
            };
            let v = value.trim();
            *slot = Some(if v == "inf" {
                f64::INFINITY
            } else {
                v.parse::<f64>()
                    .map_err(|_| ZlabError::PointParse(s.to_string()))?
            });
        }
        match (xbar, ybar, mu) {
            (Some(x), Some(y), Some(m)) if m >= 0.0 => Ok(JoinPoint::new(x, y, m)),
            _ => Err(ZlabError::PointParse(s.to_string())),
        }
    }
}

/// An interior point of the product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x: f64,
    pub y: f64,
}

/// A point of the compactified product.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum ProductSpacePoint {
    Interior(ProductPoint),
    Join(JoinPoint),
}

/// The assembled lab for one product: factor models, proper metrics, and
/// the maps `p`, `q` with their reparametrized homotopies.
#[derive(Clone)]
pub struct ProductSpace {
    pub x: Arc<dyn ZStructureModel>,
    pub y: Arc<dyn ZStructureModel>,
    pub metric_x: ProperMetric,
    pub metric_y: ProperMetric,
    pub p: ProperMap,
    pub q: ProperMap,
    reparam_x: Reparam,
    reparam_y: Reparam,
}

impl ProductSpace {
    pub fn build(
        x: Arc<dyn ZStructureModel>,
        y: Arc<dyn ZStructureModel>,
        target_p: f64,
        target_q: f64,
    ) -> Result<ProductSpace> {
        let metric_x = ProperMetric::new(x.clone())?;
        let metric_y = ProperMetric::new(y.clone())?;
        let p = ProperMap::build(x.as_ref(), &metric_x, target_p, ProperMapConfig::default())?;
        let q = ProperMap::build(y.as_ref(), &metric_y, target_q, ProperMapConfig::default())?;
        let reparam_x = Reparam::new(&p.times)?;
        let reparam_y = Reparam::new(&q.times)?;
        Ok(ProductSpace {
            x,
            y,
            metric_x,
            metric_y,
            p,
            q,
            reparam_x,
            reparam_y,
        })
    }

    pub fn p_of(&self, x: f64) -> f64 {
        self.p.eval(&self.metric_x, x)
    }

    pub fn q_of(&self, y: f64) -> f64 {
        self.q.eval(&self.metric_y, y)
    }

    /// The slope `mu(x, y) = q(y)/p(x)`, `inf` when `p(x) = 0`.
    pub fn slope(&self, x: f64, y: f64) -> f64 {
        slope_of(self.p_of(x), self.q_of(y))
    }

    /// `alpha_hat`: the factor homotopy reparametrized so that
    /// `p(alpha_hat(xbar, t))` tracks `1/t` within `[1/t - 1, 1/t + 2]`.
    pub fn alpha_hat(&self, xhat: f64, t: f64) -> f64 {
        self.x.homotopy(xhat, self.reparam_x.xi(t))
    }

    pub fn beta_hat(&self, yhat: f64, t: f64) -> f64 {
        self.y.homotopy(yhat, self.reparam_y.xi(t))
    }

    /// `alpha'(x, t) = alpha_hat(x, 1/(1+t))` for `t >= 0`.
    pub fn alpha_prime(&self, xhat: f64, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(ZlabError::TimeOutOfRange(t));
        }
        Ok(self.alpha_hat(xhat, 1.0 / (1.0 + t)))
    }

    pub fn beta_prime(&self, yhat: f64, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(ZlabError::TimeOutOfRange(t));
        }
        Ok(self.beta_hat(yhat, 1.0 / (1.0 + t)))
    }

    /// Membership in the neighborhood `U(center, eps)`; the three case
    /// definitions are implemented verbatim with strict inequalities.
    pub fn nbhd_contains(
        &self,
        center: &JoinPoint,
        eps: f64,
        z: &ProductSpacePoint,
    ) -> Result<bool> {
        if !(eps > 0.0) {
            return Err(ZlabError::ParamOutOfRange {
                name: "eps",
                value: eps,
                what: "must be positive",
            });
        }
        if center.mu > 0.0 && center.mu.is_finite() && eps >= center.mu {
            return Err(ZlabError::ParamOutOfRange {
                name: "eps",
                value: eps,
                what: "interior-slope neighborhoods require eps < mu",
            });
        }
        Ok(if center.mu == 0.0 {
            match z {
                ProductSpacePoint::Interior(p) => {
                    self.x.rho(p.x, center.xbar) < eps && self.slope(p.x, p.y) < eps
                }
                ProductSpacePoint::Join(j) => {
                    self.x.rho(j.xbar, center.xbar) < eps && j.mu < eps
                }
            }
        } else if center.mu.is_infinite() {
            match z {
                ProductSpacePoint::Interior(p) => {
                    self.y.rho(p.y, center.ybar) < eps
                        && recip(self.slope(p.x, p.y)) < eps
                }
                ProductSpacePoint::Join(j) => {
                    self.y.rho(j.ybar, center.ybar) < eps && recip(j.mu) < eps
                }
            }
        } else {
            match z {
                ProductSpacePoint::Interior(p) => {
                    self.x.rho(p.x, center.xbar) < eps
                        && self.y.rho(p.y, center.ybar) < eps
                        && (self.slope(p.x, p.y) - center.mu).abs() < eps
                }
                ProductSpacePoint::Join(j) => {
                    self.x.rho(j.xbar, center.xbar) < eps
                        && self.y.rho(j.ybar, center.ybar) < eps
                        && (j.mu - center.mu).abs() < eps
                }
            }
        })
    }

    /// The ray `gamma'`: speeds split as `t/sqrt(mu^2+1)` and
    /// `mu t/sqrt(mu^2+1)` so the slope of the output converges to `mu`.
    pub fn ray_gamma_prime(&self, z: &ProductSpacePoint, t: f64) -> Result<ProductPoint> {
        if t < 0.0 {
            return Err(ZlabError::TimeOutOfRange(t));
        }
        let (xhat, yhat, mu) = match z {
            ProductSpacePoint::Interior(p) => (p.x, p.y, self.slope(p.x, p.y)),
            ProductSpacePoint::Join(j) => match j.mu {
                m if m == 0.0 => {
                    return Ok(ProductPoint {
                        x: self.alpha_prime(j.xbar, t)?,
                        y: self.y.basepoint(),
                    })
                }
                m if m.is_infinite() => {
                    return Ok(ProductPoint {
                        x: self.x.basepoint(),
                        y: self.beta_prime(j.ybar, t)?,
                    })
                }
                _ => (j.xbar, j.ybar, j.mu),
            },
        };
        let (sx, sy) = if mu.is_infinite() {
            (0.0, t)
        } else {
            let denom = (mu * mu + 1.0).sqrt();
            (t / denom, mu * t / denom)
        };
        Ok(ProductPoint {
            x: self.alpha_prime(xhat, sx)?,
            y: self.beta_prime(yhat, sy)?,
        })
    }

    /// The open interval certified to contain the slope of
    /// `gamma'(<xbar, ybar, mu>, t)` once `t > 2 sqrt(mu^2+1)`.
    pub fn ray_slope_interval(mu: f64, t: f64) -> (f64, f64) {
        let s = (mu * mu + 1.0).sqrt();
        ((mu * t - 2.0 * s) / (t + 3.0 * s), (mu * t + 3.0 * s) / (t - 2.0 * s))
    }

    /// The homotopy pulling the compactification inward along the rays:
    /// identity at 0, interior for `t > 0`, the basepoint pair at 1.
    pub fn homotopy_gamma(&self, z: &ProductSpacePoint, t: f64) -> Result<ProductSpacePoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(ZlabError::TimeOutOfRange(t));
        }
        if t == 0.0 {
            return Ok(*z);
        }
        let ray_t = (1.0 - t) / t;
        Ok(ProductSpacePoint::Interior(self.ray_gamma_prime(z, ray_t)?))
    }

    /// Componentwise product of the factor Z-set homotopies.
    pub fn product_zset_homotopy(&self, xhat: f64, yhat: f64, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&t) {
            return Err(ZlabError::TimeOutOfRange(t));
        }
        Ok((self.x.homotopy(xhat, t), self.y.homotopy(yhat, t)))
    }

    /// The extended action on the compactification; the slope coordinate
    /// of join points is preserved exactly.
    pub fn extend_action_product(
        &self,
        g: i64,
        h: i64,
        z: &ProductSpacePoint,
    ) -> Result<ProductSpacePoint> {
        for m in [self.x.as_ref(), self.y.as_ref()] {
            if !m.extends_to_boundary() {
                return Err(ZlabError::NotEzModel(m.name().to_string()));
            }
        }
        Ok(match z {
            ProductSpacePoint::Interior(p) => ProductSpacePoint::Interior(ProductPoint {
                x: self.x.act(g, p.x)?,
                y: self.y.act(h, p.y)?,
            }),
            ProductSpacePoint::Join(j) => ProductSpacePoint::Join(JoinPoint {
                xbar: self.x.act(g, j.xbar)?,
                ybar: self.y.act(h, j.ybar)?,
                mu: j.mu,
            }),
        })
    }
}

fn recip(mu: f64) -> f64 {
    if mu == 0.0 {
        f64::INFINITY
    } else if mu.is_infinite() {
        0.0
    } else {
        1.0 / mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{embed_line, IntLineModel};

    fn space() -> ProductSpace {
        ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 30.0, 30.0).unwrap()
    }

    #[test]
    fn proper_metric_grows_toward_boundary() {
        let m = ProperMetric::new(Arc::new(IntLineModel)).unwrap();
        assert_eq!(m.dist(0.5, 0.5), 0.0);
        // lift of e(n) is exactly |n|
        for n in 1..20 {
            assert!((m.lift(embed_line(n as f64)) - n as f64).abs() < 1e-9);
        }
        // monotone unbounded along the orbit
        let mut prev = 0.0;
        for n in 1..100 {
            let d = m.dist_to_base(embed_line(n as f64));
            assert!(d > prev);
            prev = d;
        }
        assert!(prev > 90.0);
    }

    #[test]
    fn proper_map_basics() {
        let s = space();
        assert_eq!(s.p_of(0.5), 0.0);
        // radii strictly increase, times strictly decrease
        assert!(s.p.radii.windows(2).all(|w| w[0] < w[1]));
        assert!(s.p.times.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(s.p.times[0], 1.0);
        // first annulus maps onto [0, 1]
        assert!((s.p.eval_at_radius(s.p.radii[0]) - 1.0).abs() < 1e-12);
        assert!(s.p.eval_at_radius(0.5 * s.p.radii[0]) < 1.0);
    }

    #[test]
    fn double_dagger_bracket_holds() {
        // p(alpha(boundary x [t_i, t_(i-1)))) inside (i-1, i+1]
        let s = space();
        let model = IntLineModel;
        let metric = &s.metric_x;
        for i in 1..=12usize {
            let t_i = s.p.times[i];
            let t_prev = s.p.times[i - 1];
            for &b in &model.boundary_points() {
                for j in 0..50 {
                    let t = t_i + (t_prev - t_i) * j as f64 / 50.0;
                    let v = s.p.eval(metric, model.homotopy(b, t));
                    assert!(
                        v > (i - 1) as f64 && v <= (i + 1) as f64,
                        "i={i} t={t} p={v}"
                    );
                }
            }
        }
    }

    #[test]
    fn variation_over_fundamental_translates_is_at_most_two() {
        // needs the map built past the |g| <= 200 range; the certified
        // bound only covers translates inside the constructed annuli
        let s =
            ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 230.0, 30.0)
                .unwrap();
        let model = IntLineModel;
        assert!(s.p.radii.last().unwrap() > &202.0);
        let cloud = compactum_cloud(&model, ProperMapConfig::default().c1_halfwidth);
        let gset: Vec<i64> = (-200..=200).collect();
        let r = variation_r(&model, &s.metric_x, &s.p, &cloud, &gset).unwrap();
        assert!(r <= 2.0, "R_p(C_1) = {r}");
        // singleton compactum has zero variation
        let r0 = variation_r(&model, &s.metric_x, &s.p, &[0.5], &gset).unwrap();
        assert_eq!(r0, 0.0);
        assert!(variation_r(&model, &s.metric_x, &s.p, &[], &gset).is_err());
    }

    #[test]
    fn reparam_hits_its_knots() {
        let s = space();
        let rp = Reparam::new(&s.p.times).unwrap();
        assert_eq!(rp.xi(1.0), 1.0);
        assert_eq!(rp.xi(0.0), 0.0);
        // interpolation knots sit at (1/i, t_i)
        assert!((rp.xi(1.0 / 3.0) - s.p.times[3]).abs() < 1e-15);
        assert!((rp.xi(0.5) - s.p.times[2]).abs() < 1e-15);
        assert!(rp.xi(0.75) > s.p.times[2] && rp.xi(0.75) < 1.0);
        assert!(Reparam::new(&[1.0, 0.5, 0.6]).is_err());
    }

    #[test]
    fn alpha_hat_bracket_on_a_grid() {
        let s = space();
        for &b in &IntLineModel.boundary_points() {
            for j in 1..=100 {
                let t = 0.05 + 0.95 * (j - 1) as f64 / 99.0;
                let v = s.p.eval(&s.metric_x, s.alpha_hat(b, t));
                assert!(
                    v >= 1.0 / t - 1.0 && v <= 1.0 / t + 2.0,
                    "t={t} p={v} bracket=[{}, {}]",
                    1.0 / t - 1.0,
                    1.0 / t + 2.0
                );
            }
        }
    }

    #[test]
    fn alpha_prime_bracket_and_base_cases() {
        let s = space();
        // alpha'(x, 0) = alpha_hat(x, 1) = x_0
        assert_eq!(s.alpha_prime(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(s.alpha_prime(0.5, 7.3).unwrap(), 0.5);
        for &b in &IntLineModel.boundary_points() {
            for j in 0..100 {
                let t = 20.0 * j as f64 / 99.0;
                let v = s.p.eval(&s.metric_x, s.alpha_prime(b, t).unwrap());
                assert!(v > t - 1.0 && v < t + 3.0, "t={t} p={v}");
            }
        }
        assert!(s.alpha_prime(0.0, -1.0).is_err());
    }

    #[test]
    fn slope_special_values() {
        let s = space();
        assert_eq!(s.slope(0.5, 0.5), f64::INFINITY);
        assert_eq!(slope_of(2.0, 1.0), 0.5);
        assert_eq!(slope_of(1.0, 0.0), 0.0);
        assert_eq!(recip(0.0), f64::INFINITY);
        assert_eq!(recip(f64::INFINITY), 0.0);
    }

    #[test]
    fn join_equivalence_classes() {
        let a = JoinPoint::new(0.0, 1.0, 0.0);
        let b = JoinPoint::new(0.0, 0.0, 0.0);
        assert!(a.same_class(&b)); // mu = 0 ignores ybar
        let c = JoinPoint::new(1.0, 0.0, f64::INFINITY);
        let d = JoinPoint::new(0.0, 0.0, f64::INFINITY);
        assert!(c.same_class(&d)); // mu = inf ignores xbar
        assert!(!a.same_class(&c));
        let e: JoinPoint = "xbar=0|ybar=1|mu=inf".parse().unwrap();
        assert!(e.mu.is_infinite());
    }

    #[test]
    fn nbhd_membership_cases() {
        let s = space();
        // center <xbar, 0>: both strict inequalities at eps/2 pass
        let center = JoinPoint::new(0.0, 0.0, 0.0);
        let eps = 0.2;
        // pick (x, y) with x near the left end and slope < eps:
        // p large (x far out), q small (y near basepoint)
        let z = ProductSpacePoint::Interior(ProductPoint {
            x: embed_line(-40.0),
            y: 0.5,
        });
        assert!(s.nbhd_contains(&center, eps, &z).unwrap());
        // strictness: 1/mu exactly equal to eps fails for an inf center
        let center = JoinPoint::new(0.0, 1.0, f64::INFINITY);
        let j = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, 1.0 / eps));
        assert!(!s.nbhd_contains(&center, eps, &j).unwrap());
        // interior-mu center: all three conditions checked
        let center = JoinPoint::new(0.0, 1.0, 1.0);
        let z = ProductSpacePoint::Join(JoinPoint::new(0.1, 0.9, 1.2));
        assert!(s.nbhd_contains(&center, 0.3, &z).unwrap());
        assert!(s.nbhd_contains(&center, 1.0, &z).is_err()); // eps >= mu
        // mu = 0 and mu = inf classes give identical answers
        let c0 = JoinPoint::new(0.0, 0.3, 0.0);
        let c1 = JoinPoint::new(0.0, 0.8, 0.0);
        let probe = ProductSpacePoint::Join(JoinPoint::new(0.05, 0.5, 0.01));
        assert_eq!(
            s.nbhd_contains(&c0, 0.1, &probe).unwrap(),
            s.nbhd_contains(&c1, 0.1, &probe).unwrap()
        );
    }

    #[test]
    fn rays_respect_their_collapsed_coordinates() {
        let s = space();
        // <xbar, 0>: the second coordinate is y_0 exactly, for any t
        let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, 0.0));
        for t in [0.0, 1.0, 17.0] {
            let p = s.ray_gamma_prime(&z, t).unwrap();
            assert_eq!(p.y, 0.5);
        }
        // <ybar, inf>: the first coordinate is x_0
        let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, f64::INFINITY));
        let p = s.ray_gamma_prime(&z, 9.0).unwrap();
        assert_eq!(p.x, 0.5);
        // interior point at t = 0 collapses to the basepoint pair
        let z = ProductSpacePoint::Interior(ProductPoint {
            x: embed_line(3.0),
            y: embed_line(-2.0),
        });
        let p = s.ray_gamma_prime(&z, 0.0).unwrap();
        assert_eq!(p, ProductPoint { x: 0.5, y: 0.5 });
    }

    #[test]
    fn variation_bound_scales_with_covering_count() {
        // three compacta: a singleton, the fundamental domain (k = 1),
        // and two adjacent domains (k = 2, bound 2k = 4)
        let s =
            ProductSpace::build(Arc::new(IntLineModel), Arc::new(IntLineModel), 230.0, 30.0)
                .unwrap();
        let model = IntLineModel;
        let gset: Vec<i64> = (-200..=200).collect();
        let single = variation_r(&model, &s.metric_x, &s.p, &[0.5], &gset).unwrap();
        assert_eq!(single, 0.0);
        let c1 = compactum_cloud(&model, 1.0);
        let r1 = variation_r(&model, &s.metric_x, &s.p, &c1, &gset).unwrap();
        assert!(r1 <= 2.0);
        // C_1 union g_1 C_1: the interval between the -1 and +2 orbit
        // points, connected and covered by two domains
        let mut c2 = c1.clone();
        c2.extend(c1.iter().map(|&u| model.act(1, u).unwrap()));
        let r2 = variation_r(&model, &s.metric_x, &s.p, &c2, &gset).unwrap();
        assert!(r2 <= 4.0, "R_p = {r2}");
        assert!(r2 >= r1);
    }

    #[test]
    fn ray_slopes_converge_past_the_interval_threshold() {
        // |slope - mu| < 0.05 (1 + mu) once the displayed interval fits
        // inside that window
        let s = ProductSpace::build(
            Arc::new(IntLineModel),
            Arc::new(IntLineModel),
            900.0,
            900.0,
        )
        .unwrap();
        for mu in [0.1, 1.0, 10.0] {
            let window = 0.05 * (1.0 + mu);
            let mut t = 1.0;
            loop {
                let (lo, hi) = ProductSpace::ray_slope_interval(mu, t);
                if t > 2.0 * (mu * mu + 1.0f64).sqrt() && mu - lo < window && hi - mu < window {
                    break;
                }
                t += 1.0;
                assert!(t < 2_000.0, "no threshold found for mu = {mu}");
            }
            for factor in [1.0, 1.5, 2.0] {
                let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, mu));
                let p = s.ray_gamma_prime(&z, t * factor).unwrap();
                let measured = s.slope(p.x, p.y);
                assert!(
                    (measured - mu).abs() < window,
                    "mu={mu} t={} measured={measured}",
                    t * factor
                );
            }
        }
    }

    #[test]
    fn nbhd_membership_is_monotone_in_eps() {
        let s = space();
        let center = JoinPoint::new(0.0, 1.0, 2.0);
        let probes = [
            ProductSpacePoint::Join(JoinPoint::new(0.05, 0.93, 2.3)),
            ProductSpacePoint::Join(JoinPoint::new(0.3, 0.6, 2.0)),
            ProductSpacePoint::Interior(ProductPoint {
                x: embed_line(-30.0),
                y: embed_line(40.0),
            }),
        ];
        let grid = [0.1, 0.3, 0.7, 1.2, 1.9];
        for z in &probes {
            let mut seen_inside = false;
            for eps in grid {
                let inside = s.nbhd_contains(&center, eps, z).unwrap();
                assert!(inside || !seen_inside, "membership must be monotone in eps");
                seen_inside |= inside;
            }
        }
    }

    #[test]
    fn ray_slope_interval_example() {
        // mu = 1, t = 10: interval from the displayed bounds
        let (lo, hi) = ProductSpace::ray_slope_interval(1.0, 10.0);
        assert!((lo - 0.5035).abs() < 2e-3 && (hi - 1.9860).abs() < 2e-2);
        let s = space();
        let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, 1.0));
        let p = s.ray_gamma_prime(&z, 10.0).unwrap();
        let measured = s.slope(p.x, p.y);
        assert!(measured > lo && measured < hi, "{measured} not in ({lo}, {hi})");
    }

    #[test]
    fn gamma_endpoints_and_interiority() {
        let s = space();
        let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, 2.0));
        // gamma(z, 0) = z
        match s.homotopy_gamma(&z, 0.0).unwrap() {
            ProductSpacePoint::Join(j) => assert!(j.same_class(&JoinPoint::new(0.0, 1.0, 2.0))),
            _ => panic!("gamma_0 must be the identity"),
        }
        // gamma(z, 1) = (x_0, y_0)
        match s.homotopy_gamma(&z, 1.0).unwrap() {
            ProductSpacePoint::Interior(p) => {
                assert_eq!(p, ProductPoint { x: 0.5, y: 0.5 })
            }
            _ => panic!("gamma_1 must be the basepoint pair"),
        }
        // interior for every t > 0
        for t in [1e-6, 0.25, 0.5, 0.99] {
            match s.homotopy_gamma(&z, t).unwrap() {
                ProductSpacePoint::Interior(p) => {
                    assert!(!s.x.is_boundary(p.x) && !s.y.is_boundary(p.y));
                }
                _ => panic!("gamma_t interior for t > 0"),
            }
        }
    }

    #[test]
    fn product_homotopy_and_action() {
        let s = space();
        assert_eq!(s.product_zset_homotopy(0.3, 0.9, 0.0).unwrap(), (0.3, 0.9));
        assert_eq!(s.product_zset_homotopy(0.0, 1.0, 1.0).unwrap(), (0.5, 0.5));
        let (a, b) = s.product_zset_homotopy(0.0, 1.0, 0.25).unwrap();
        assert!(!s.x.is_boundary(a) && !s.y.is_boundary(b));

        let z = ProductSpacePoint::Join(JoinPoint::new(0.0, 1.0, 0.5));
        match s.extend_action_product(3, -2, &z).unwrap() {
            ProductSpacePoint::Join(j) => {
                // boundary points are fixed by the line action; mu exact
                assert_eq!((j.xbar, j.ybar, j.mu), (0.0, 1.0, 0.5));
            }
            _ => panic!("join points stay join points"),
        }
        let z = ProductSpacePoint::Interior(ProductPoint { x: 0.5, y: 0.5 });
        match s.extend_action_product(1, 0, &z).unwrap() {
            ProductSpacePoint::Interior(p) => {
                assert_eq!(p.x, embed_line(1.0));
                assert_eq!(p.y, 0.5);
            }
            _ => panic!(),
        }
    }
}
