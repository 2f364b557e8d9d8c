//! Metric-axiom sweeps on random triples.

use crate::sweep::{item_rng, map_reduce};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub max_triangle_violation: f64,
    pub max_symmetry_violation: f64,
    pub identity_violations: u64,
    pub worst_triple: Option<[String; 3]>,
    pub pass: bool,
}

struct Acc {
    tri: f64,
    sym: f64,
    idv: u64,
    worst: Option<[String; 3]>,
}

/// Checks symmetry (expected exact), the triangle inequality (within
/// `tolerance`), and `d(a, a) = 0` on `n` random triples.
pub fn check_metric_axioms<P, S, D>(
    sampler: S,
    dist: D,
    n: u64,
    seed: u64,
    tolerance: f64,
) -> MetricReport
where
    P: ToString + Send,
    S: Fn(&mut ChaCha8Rng) -> P + Sync + Send,
    D: Fn(&P, &P) -> f64 + Sync + Send,
{
    let acc = map_reduce(
        n as usize,
        |i| {
            let mut rng = item_rng(seed, i as u64);
            let a = sampler(&mut rng);
            let b = sampler(&mut rng);
            let c = sampler(&mut rng);
            let ab = dist(&a, &b);
            let ba = dist(&b, &a);
            let bc = dist(&b, &c);
            let ac = dist(&a, &c);
            let cb = dist(&c, &b);
            let ca = dist(&c, &a);
            let sym = (ab - ba).abs();
            let tri = (ac - ab - bc)
                .max(ab - ac - cb)
                .max(bc - ba - ac)
                .max(ca - cb - ba);
            let idv = u64::from(dist(&a, &a) != 0.0);
            let worst = (tri > 0.0 || sym > 0.0)
                .then(|| [a.to_string(), b.to_string(), c.to_string()]);
            Acc {
                tri,
                sym,
                idv,
                worst,
            }
        },
        || Acc {
            tri: f64::NEG_INFINITY,
            sym: 0.0,
            idv: 0,
            worst: None,
        },
        |x, y| {
            let worst = if y.tri > x.tri && y.worst.is_some() {
                y.worst
            } else {
                x.worst.or(y.worst)
            };
            Acc {
                tri: x.tri.max(y.tri),
                sym: x.sym.max(y.sym),
                idv: x.idv + y.idv,
                worst,
            }
        },
    );
    MetricReport {
        samples: n,
        seed,
        tolerance,
        max_triangle_violation: acc.tri.max(0.0),
        max_symmetry_violation: acc.sym,
        identity_violations: acc.idv,
        worst_triple: acc.worst,
        pass: acc.tri <= tolerance && acc.sym == 0.0 && acc.idv == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeprod::FreeProductSpace;
    use crate::models::IntLineModel;
    use crate::verify::random_wpoint;
    use std::sync::Arc;

    fn line_space() -> FreeProductSpace {
        FreeProductSpace::new(Arc::new(IntLineModel), Arc::new(IntLineModel))
    }

    #[test]
    fn degenerate_single_point_passes() {
        let report = check_metric_axioms(
            |_rng| 0.5f64,
            |a: &f64, b: &f64| (a - b).abs(),
            10,
            1,
            0.0,
        );
        assert!(report.pass);
        assert_eq!(report.max_triangle_violation, 0.0);
    }

    #[test]
    fn free_product_metric_passes_at_depth_six() {
        let s = line_space();
        let report = check_metric_axioms(
            |rng| random_wpoint(&s, rng, 6, 9),
            |a, b| s.dist(a, b),
            2_000,
            42,
            1e-9,
        );
        assert!(report.pass, "{report:?}");
        assert_eq!(report.max_symmetry_violation, 0.0);
    }

    #[test]
    fn corrupted_metric_fails_with_witness() {
        // fixture: one leg scaled by 0.5 breaks the triangle inequality
        let s = line_space();
        let bad = |a: &crate::freeprod::WPoint, b: &crate::freeprod::WPoint| {
            let d = s.dist(a, b);
            if a.local < 0.3 && b.local < 0.3 {
                0.5 * d
            } else {
                d
            }
        };
        let report = check_metric_axioms(|rng| random_wpoint(&s, rng, 3, 4), bad, 2_000, 7, 1e-9);
        assert!(!report.pass);
        assert!(report.worst_triple.is_some());
    }
}
