//! The product-topology counterexample and its join-topology fix.
//!
//! On the two-point compactification of the plane with the product
//! topology there is a four-element open cover such that no vertical
//! translate of `C = [-1,1] x {0}` fits in any single element.  Switching
//! to the join compactification with the slope coordinate, the same
//! translates eventually fit inside one `U(<ybar, inf>, eps)`.  The two
//! verdicts are produced side by side in one report.

use crate::dirprod::{slope_of, ProductSpace};
use crate::error::Result;
use crate::models::{embed_line, IntLineModel, ZStructureModel};
use serde::Serialize;
use std::sync::Arc;

/// A basic open set of the two-point compactification of the line:
/// an open real interval, optionally together with one or both ends.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtLineSet {
    pub with_alpha: bool,
    pub lo: f64,
    pub hi: f64,
    pub with_beta: bool,
}

impl ExtLineSet {
    fn contains_interval(&self, a: f64, b: f64) -> bool {
        self.lo < a && b < self.hi
    }

    fn contains_real(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }
}

/// A product rectangle of basic sets.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProductRect {
    pub x: ExtLineSet,
    pub y: ExtLineSet,
}

/// The example's cover of the product compactification.
pub fn counterexample_cover() -> [ProductRect; 4] {
    let full = ExtLineSet {
        with_alpha: true,
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        with_beta: true,
    };
    [
        // (-3/4, 3/4) x ((-1/2, inf) + beta)
        ProductRect {
            x: ExtLineSet {
                with_alpha: false,
                lo: -0.75,
                hi: 0.75,
                with_beta: false,
            },
            y: ExtLineSet {
                with_alpha: false,
                lo: -0.5,
                hi: f64::INFINITY,
                with_beta: true,
            },
        },
        // (-3/4, 3/4) x (alpha + (-inf, 1/2))
        ProductRect {
            x: ExtLineSet {
                with_alpha: false,
                lo: -0.75,
                hi: 0.75,
                with_beta: false,
            },
            y: ExtLineSet {
                with_alpha: true,
                lo: f64::NEG_INFINITY,
                hi: 0.5,
                with_beta: false,
            },
        },
        // (alpha + (-inf, -1/2)) x everything
        ProductRect {
            x: ExtLineSet {
                with_alpha: true,
                lo: f64::NEG_INFINITY,
                hi: -0.5,
                with_beta: false,
            },
            y: full,
        },
        // ((1/2, inf) + beta) x everything
        ProductRect {
            x: ExtLineSet {
                with_alpha: false,
                lo: 0.5,
                hi: f64::INFINITY,
                with_beta: true,
            },
            y: full,
        },
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub range: i64,
    /// For each n, the indices of cover elements containing
    /// `[-1,1] x {n}` (expected empty for every n).
    pub product_covered_by: Vec<(i64, Vec<usize>)>,
    pub product_all_uncovered: bool,
    /// Smallest n from which every translate up to `range` fits
    /// `U(<ybar, inf>, eps)` on the join compactification.
    pub join_eps: f64,
    pub join_n0: Option<i64>,
    pub pass: bool,
}

/// Runs both sides of the example on `n` in `[-range, range]`.
pub fn reproduce_counterexample(range: i64, join_eps: f64) -> Result<CounterexampleReport> {
    let cover = counterexample_cover();
    let mut product_covered_by = Vec::new();
    let mut all_uncovered = true;
    for n in -range..=range {
        // (0, n) . C = [-1, 1] x {n}: exact interval containment
        let hit: Vec<usize> = cover
            .iter()
            .enumerate()
            .filter(|(_, u)| u.x.contains_interval(-1.0, 1.0) && u.y.contains_real(n as f64))
            .map(|(i, _)| i)
            .collect();
        if !hit.is_empty() {
            all_uncovered = false;
        }
        product_covered_by.push((n, hit));
    }

    // join side: q grows along the translates while p stays bounded on
    // C, so the slope reciprocal drops under eps cofinitely
    let target = range as f64 / 2.0 + 24.0;
    let space = ProductSpace::build(
        Arc::new(IntLineModel),
        Arc::new(IntLineModel),
        target,
        target,
    )?;
    let p_hi = space
        .p_of(embed_line(1.0))
        .max(space.p_of(embed_line(-1.0)));
    let fits = |n: i64| {
        let yn = IntLineModel
            .act(n, IntLineModel.basepoint())
            .expect("orbit interior");
        let tau_to_top = 1.0 - yn;
        let mu_lo = slope_of(p_hi, space.q_of(yn));
        tau_to_top < join_eps && 1.0 / mu_lo < join_eps
    };
    let mut join_n0 = None;
    for n in (1..=range).rev() {
        if fits(n) {
            join_n0 = Some(n);
        } else {
            break;
        }
    }

    Ok(CounterexampleReport {
        range,
        product_all_uncovered: all_uncovered,
        product_covered_by,
        join_eps,
        join_n0,
        pass: all_uncovered && join_n0.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_translate_fits_the_product_cover() {
        let r = reproduce_counterexample(25, 0.1).unwrap();
        assert!(r.product_all_uncovered);
        for (_, hits) in &r.product_covered_by {
            assert!(hits.is_empty());
        }
    }

    #[test]
    fn join_side_fits_cofinitely() {
        let r = reproduce_counterexample(60, 0.1).unwrap();
        let n0 = r.join_n0.expect("join neighborhood absorbs the tail");
        assert!(n0 > 1 && n0 < 60, "n0 = {n0}");
        assert!(r.pass);
    }

    #[test]
    fn cover_is_a_cover_of_the_compactification() {
        // spot-check that the four sets really cover: sampled interior
        // points and all four corner/boundary combinations
        let cover = counterexample_cover();
        for i in -40..=40 {
            for j in -40..=40 {
                let (x, y) = (i as f64 / 10.0, j as f64 / 10.0);
                assert!(
                    cover
                        .iter()
                        .any(|u| u.x.contains_real(x) && u.y.contains_real(y)),
                    "({x}, {y}) uncovered"
                );
            }
        }
        // boundary pieces: alpha/beta in x cross everything
        assert!(cover[2].x.with_alpha && cover[3].x.with_beta);
        assert!(cover[0].y.with_beta && cover[1].y.with_alpha);
    }
}
