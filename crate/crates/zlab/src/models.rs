//! Pluggable compact-metric models with boundary.
//!
//! A [`ZStructureModel`] packages what the constructions need from one
//! factor: a compact carrier of diameter 1 with a distinguished boundary,
//! a basepoint, a proper cocompact group action on the interior, and a
//! slowed strong-deformation-retraction homotopy that instantly leaves
//! the boundary.  The shipped instance compactifies the real line by two
//! points, with the integers acting by translation.

use crate::error::{Result, ZlabError};
use crate::words::Factor;

/// Contract every factor model satisfies.
///
/// Carrier points are `f64` coordinates; group elements are opaque `i64`
/// identifiers whose arithmetic the model supplies.  Required invariants:
///
/// * `rho` is a metric on the carrier with diameter exactly 1;
/// * `homotopy(., 0)` is the identity, `homotopy(., 1)` is the basepoint,
///   the basepoint is fixed at every time, and interior output for t > 0;
/// * slowed: `homotopy(u, t) == u` (bit-exact) whenever
///   `boundary_distance(u) >= 1/2^k` and `t <= 1/2^k` for some integer k;
/// * `r_value(g)` is the unique n >= 1 with
///   `1/2^n <= boundary_distance(act(g, basepoint)) < 1/2^(n-1)`.
pub trait ZStructureModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn basepoint(&self) -> f64;

    /// Carrier metric, diameter 1.
    fn rho(&self, a: f64, b: f64) -> f64;

    fn check_carrier(&self, a: f64) -> Result<()>;

    fn boundary_distance(&self, a: f64) -> f64;

    fn is_boundary(&self, a: f64) -> bool;

    /// Finite sample of the boundary; exact for models with finite boundary.
    fn boundary_points(&self) -> Vec<f64>;

    // -- factor-group arithmetic on element identifiers --

    fn elem_mul(&self, a: i64, b: i64) -> i64;
    fn elem_inverse(&self, a: i64) -> i64;
    fn elem_is_identity(&self, a: i64) -> bool;

    /// Group action on the carrier.  Boundary input is an error unless
    /// the model extends its action to the compactification.
    fn act(&self, g: i64, a: f64) -> Result<f64>;

    /// True when the action extends to the whole compactified carrier.
    fn extends_to_boundary(&self) -> bool;

    /// The slowed Z-set homotopy F.
    fn homotopy(&self, a: f64, t: f64) -> f64;

    /// Dyadic depth of the basepoint orbit: the unique n >= 1 with
    /// `1/2^n <= boundary_distance(g . basepoint) < 1/2^(n-1)`.
    fn r_value(&self, g: i64) -> u32;

    /// Minimum of `r_value` over non-identity elements.
    fn min_r(&self) -> u32;

    /// All non-identity elements g with `r_value(g) <= rmax`.
    fn elems_with_r_at_most(&self, rmax: u32) -> Vec<i64>;

    /// Detects basepoint-orbit carrier points: `Some(g)` iff
    /// `a == act(g, basepoint)` bit-exactly (including the identity).
    fn orbit_element(&self, a: f64) -> Option<i64>;

    /// Continuous gauge with `gauge(basepoint) = 0`, `gauge == 1` exactly
    /// on the boundary; feeds the proper-metric construction.
    fn gauge(&self, a: f64) -> f64;
}

/// Embedding of the real line into (0,1):
/// `e(x) = 1/2 + x / (2 (1 + |x|))`.
pub fn embed_line(x: f64) -> f64 {
    0.5 + x / (2.0 * (1.0 + x.abs()))
}

/// Inverse of [`embed_line`] on (0,1).
pub fn unembed_line(u: f64) -> f64 {
    let v = u - 0.5;
    v / (0.5 - v.abs())
}

/// The compactification of the real line by two points.
///
/// Carrier `[0,1]`, boundary `{0,1}`, basepoint `e(0) = 1/2`; `n` in `Z`
/// acts by translation before embedding.  The action extends to the
/// boundary (translation fixes both ends), so this is an EZ-model.
#[derive(Clone, Copy, Default, Debug)]
pub struct IntLineModel;

impl IntLineModel {
    /// Gate used by the homotopy: points are clamped into
    /// `[t/2, 1 - t/2]`.  The gate satisfies `c(t) <= t`, which gives the
    /// slowed property exactly, and `c(t) >= t/4` for `t <= 1/2`.
    fn gate(t: f64) -> f64 {
        0.5 * t
    }
}

impl ZStructureModel for IntLineModel {
    fn name(&self) -> &'static str {
        "int-line"
    }

    fn basepoint(&self) -> f64 {
        0.5
    }

    fn rho(&self, a: f64, b: f64) -> f64 {
        (a - b).abs()
    }

    fn check_carrier(&self, a: f64) -> Result<()> {
        if (0.0..=1.0).contains(&a) {
            Ok(())
        } else {
            Err(ZlabError::InvalidCarrier(a))
        }
    }

    fn boundary_distance(&self, a: f64) -> f64 {
        a.min(1.0 - a)
    }

    fn is_boundary(&self, a: f64) -> bool {
        a == 0.0 || a == 1.0
    }

    fn boundary_points(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }

    fn elem_mul(&self, a: i64, b: i64) -> i64 {
        a + b
    }

    fn elem_inverse(&self, a: i64) -> i64 {
        -a
    }

    fn elem_is_identity(&self, a: i64) -> bool {
        a == 0
    }

    fn act(&self, g: i64, a: f64) -> Result<f64> {
        self.check_carrier(a)?;
        if self.is_boundary(a) {
            // Translation fixes both ends of the line.
            return Ok(a);
        }
        Ok(embed_line(unembed_line(a) + g as f64))
    }

    fn extends_to_boundary(&self) -> bool {
        true
    }

    fn homotopy(&self, a: f64, t: f64) -> f64 {
        let c = Self::gate(t);
        a.clamp(c, 1.0 - c)
    }

    fn r_value(&self, g: i64) -> u32 {
        // closed form: the unique n with 2^(n-2) < 1 + |g| <= 2^(n-1)
        let m = 1 + g.unsigned_abs();
        let mut n = 1u32;
        while (1u64 << (n - 1)) < m {
            n += 1;
        }
        n
    }

    fn min_r(&self) -> u32 {
        2
    }

    fn elems_with_r_at_most(&self, rmax: u32) -> Vec<i64> {
        // r(g) <= R iff 1 + |g| <= 2^(R-1)
        if rmax < 2 {
            return Vec::new();
        }
        let hi = (1i64 << (rmax - 1)) - 1;
        let mut out = Vec::with_capacity(2 * hi as usize);
        for k in 1..=hi {
            out.push(k);
            out.push(-k);
        }
        out
    }

    fn orbit_element(&self, a: f64) -> Option<i64> {
        if !(0.0..=1.0).contains(&a) || self.is_boundary(a) {
            return None;
        }
        let x = unembed_line(a);
        let k = x.round();
        if k.abs() > i64::MAX as f64 {
            return None;
        }
        let k = k as i64;
        (embed_line(k as f64) == a).then_some(k)
    }

    fn gauge(&self, a: f64) -> f64 {
        2.0 * (a - 0.5).abs()
    }
}

/// Looks up a shipped model by its CLI name.
pub fn model_by_name(name: &str) -> Result<IntLineModel> {
    match name {
        "int-line" => Ok(IntLineModel),
        other => Err(ZlabError::UnknownModel(other.to_string())),
    }
}

/// The factor-pair adapter: word arithmetic delegates to the two models.
pub struct PairOps<'a> {
    pub x: &'a dyn ZStructureModel,
    pub y: &'a dyn ZStructureModel,
}

impl crate::words::FactorOps for PairOps<'_> {
    fn mul(&self, factor: Factor, a: i64, b: i64) -> i64 {
        match factor {
            Factor::G => self.x.elem_mul(a, b),
            Factor::H => self.y.elem_mul(a, b),
        }
    }

    fn inverse(&self, factor: Factor, a: i64) -> i64 {
        match factor {
            Factor::G => self.x.elem_inverse(a),
            Factor::H => self.y.elem_inverse(a),
        }
    }

    fn is_identity(&self, factor: Factor, a: i64) -> bool {
        match factor {
            Factor::G => self.x.elem_is_identity(a),
            Factor::H => self.y.elem_is_identity(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: IntLineModel = IntLineModel;

    #[test]
    fn embedding_round_trips_integers() {
        for n in -50..=50 {
            let u = embed_line(n as f64);
            assert_eq!(unembed_line(u).round() as i64, n);
            assert_eq!(M.orbit_element(u), Some(n));
        }
        assert_eq!(M.orbit_element(0.3), None);
        assert_eq!(M.orbit_element(0.0), None);
    }

    #[test]
    fn metric_basics() {
        assert_eq!(M.rho(0.25, 0.25), 0.0);
        assert_eq!(M.rho(0.0, 1.0), 1.0); // endpoints realize diameter 1
        // oracle: closed-form embedding, e(1) = 3/4
        assert_eq!(M.rho(embed_line(0.0), embed_line(1.0)), 0.25);
    }

    #[test]
    fn boundary_distance_closed_form() {
        assert_eq!(M.boundary_distance(0.5), 0.5);
        assert_eq!(M.boundary_distance(0.0), 0.0);
        // 1/(2 (1 + |n|)) with n = 2
        assert!((M.boundary_distance(embed_line(2.0)) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn action_laws() {
        assert_eq!(M.act(0, 0.37).unwrap(), 0.37);
        assert_eq!(M.act(1, embed_line(0.0)).unwrap(), 0.75);
        assert_eq!(M.act(-3, embed_line(3.0)).unwrap(), 0.5);
        let a = M.act(2, M.act(3, 0.41).unwrap()).unwrap();
        let b = M.act(5, 0.41).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(M.act(7, 2.0).is_err());
    }

    #[test]
    fn r_value_closed_form() {
        assert_eq!(M.r_value(0), 1); // distance exactly 1/2 maps to n = 1
        assert_eq!(M.r_value(1), 2); // 1/4 in [1/4, 1/2)
        assert_eq!(M.r_value(2), 3); // 1/6 in [1/8, 1/4)
        assert_eq!(M.r_value(3), 3);
        assert_eq!(M.r_value(4), 4);
        assert_eq!(M.r_value(-7), 4);
        // consistency with the definition through boundary_distance
        for g in 1..200i64 {
            let n = M.r_value(g);
            let d = M.boundary_distance(M.act(g, 0.5).unwrap());
            assert!((-(n as f64)).exp2() <= d && d < (-(n as f64 - 1.0)).exp2());
        }
    }

    #[test]
    fn elems_by_r_budget() {
        assert_eq!(M.elems_with_r_at_most(1), Vec::<i64>::new());
        let r2: Vec<i64> = M.elems_with_r_at_most(2);
        assert_eq!(r2.len(), 2); // |g| <= 1
        assert_eq!(M.elems_with_r_at_most(4).len(), 14); // |g| <= 7
    }

    #[test]
    fn homotopy_invariants() {
        // F_0 = id
        assert_eq!(M.homotopy(0.123, 0.0), 0.123);
        // F_1 is the basepoint
        assert_eq!(M.homotopy(0.9, 1.0), 0.5);
        assert_eq!(M.homotopy(0.0, 1.0), 0.5);
        // basepoint fixed throughout
        assert_eq!(M.homotopy(0.5, 0.7), 0.5);
        // interior for t > 0
        assert!(M.boundary_distance(M.homotopy(0.0, 1e-9)) > 0.0);
        // slowed: bit-exact fixing when boundary_distance >= 2^-k, t <= 2^-k
        for k in 1..=10u32 {
            let thresh = (-(k as f64)).exp2();
            for i in 0..1000 {
                let u = thresh + (1.0 - 2.0 * thresh) * (i as f64) / 999.0;
                assert!(M.boundary_distance(u) >= thresh - 1e-15);
                if M.boundary_distance(u) >= thresh {
                    assert_eq!(M.homotopy(u, thresh), u);
                    assert_eq!(M.homotopy(u, 0.37 * thresh), u);
                }
            }
        }
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        use rand::Rng;
        use rand_chacha::ChaCha8Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let a: f64 = rng.gen();
            let b: f64 = rng.gen();
            let c: f64 = rng.gen();
            assert_eq!(M.rho(a, b), M.rho(b, a));
            assert!(M.rho(a, c) <= M.rho(a, b) + M.rho(b, c) + 1e-12);
            assert_eq!(M.rho(a, a), 0.0);
            assert!(M.rho(a, b) <= 1.0);
        }
    }

    #[test]
    fn properness_proxy_on_compactum() {
        // oracle: interval arithmetic on R before embedding.
        // C = e([-1, 1]); g C meets C iff [g-1, g+1] meets [-1, 1] iff |g| <= 2.
        let meets: Vec<i64> = (-20..=20)
            .filter(|&g| (g as f64 - 1.0) <= 1.0 && (g as f64 + 1.0) >= -1.0)
            .collect();
        assert_eq!(meets, vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn gauge_endpoints() {
        assert_eq!(M.gauge(0.5), 0.0);
        assert_eq!(M.gauge(0.0), 1.0);
        assert_eq!(M.gauge(1.0), 1.0);
    }
}
