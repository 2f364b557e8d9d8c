//! The property harness.
//!
//! Every checker consumes a seed and a budget, fans the work out over
//! the sweep helpers (per-item RNG streams keep the outcome independent
//! of thread count), and returns a serializable report with a `pass`
//! flag.  Failing checks distinguish a genuine property violation from a
//! cover defect (the canonical cover failing to cover a sampled point).

pub mod acceptance;
mod bounded;
mod counterexample;
mod metric;
mod nullfree;
mod nullprod;
mod tracks;

pub use bounded::{check_total_boundedness, BoundednessReport};
pub use counterexample::{reproduce_counterexample, CounterexampleReport};
pub use metric::{check_metric_axioms, MetricReport};
pub use nullfree::{big_translate_words as nullfree_big_translates, check_null_free, FreeCompactum, NullFreeReport};
pub use nullprod::{check_null_product, NullProductConfig, NullProductReport};
pub use tracks::{check_homotopy_tracks, TrackHandle, TrackReport};

use crate::freeprod::{FreeProductSpace, Side, SpacePoint, WBoundaryPoint, WPoint};
use crate::words::{Factor, Letter, ReducedWord};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One element of an open cover; membership is decidable for interior
/// and boundary points of the relevant compactification.
#[derive(Clone, Debug, Serialize)]
pub enum CoverElement {
    /// Metric ball in the free-product completion.
    FreeBall {
        center_word: ReducedWord,
        center_side: Side,
        center_local: f64,
        radius: f64,
    },
    /// Join neighborhood `U(center, eps)` in the product
    /// compactification.
    JoinNbhd {
        center: crate::dirprod::JoinPoint,
        eps: f64,
    },
}

/// A finite open cover.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSpec {
    pub elements: Vec<CoverElement>,
}

impl CoverElement {
    /// Membership for points of the free-product completion (strict,
    /// with end approximants widened by their tail bound).
    pub fn contains_free(&self, space: &FreeProductSpace, p: &SpacePoint) -> Option<bool> {
        match self {
            CoverElement::FreeBall {
                center_word,
                center_side,
                center_local,
                radius,
            } => {
                let center = SpacePoint::Boundary(WBoundaryPoint::Translate {
                    translate: crate::freeprod::Translate {
                        word: center_word.clone(),
                        side: *center_side,
                    },
                    local: *center_local,
                });
                let d = space.dist_general(p, &center);
                Some(d.value + d.tolerance < *radius)
            }
            CoverElement::JoinNbhd { .. } => None,
        }
    }

    /// Membership for points of the product compactification.
    pub fn contains_join(
        &self,
        space: &crate::dirprod::ProductSpace,
        z: &crate::dirprod::ProductSpacePoint,
    ) -> Option<bool> {
        match self {
            CoverElement::JoinNbhd { center, eps } => {
                space.nbhd_contains(center, *eps, z).ok()
            }
            CoverElement::FreeBall { .. } => None,
        }
    }
}

/// Outcome of a null-condition sweep.
#[derive(Clone, Debug, Serialize)]
pub struct NullReport {
    /// The exceptional set, as display strings of its members.
    pub exceptional: Vec<String>,
    pub exceptional_size: u64,
    /// Sampled non-exceptional members and the index of the cover
    /// element each fits into.
    pub witness: Vec<(String, usize)>,
    pub fit_failures: Vec<String>,
    pub cover_defects: Vec<String>,
    pub pass: bool,
}

/// A random reduced word of length up to `max_len`, letters drawn from
/// `+-1..=max_abs` with alternating factors.
pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize, max_abs: i64) -> ReducedWord {
    let len = rng.gen_range(0..=max_len);
    let mut factor = if rng.gen() { Factor::G } else { Factor::H };
    let mut word = ReducedWord::one();
    for _ in 0..len {
        let mag = rng.gen_range(1..=max_abs);
        let elem = if rng.gen() { mag } else { -mag };
        word = word.child(Letter::new(factor, elem));
        factor = factor.opposite();
    }
    word
}

fn word_side(word: &ReducedWord, rng: &mut ChaCha8Rng) -> Side {
    crate::freeprod::natural_side(word).unwrap_or(if rng.gen() { Side::X } else { Side::Y })
}

/// A random interior point of `W` at word depth up to `max_len`.
pub fn random_wpoint(
    space: &FreeProductSpace,
    rng: &mut ChaCha8Rng,
    max_len: usize,
    max_abs: i64,
) -> WPoint {
    let word = random_word(rng, max_len, max_abs);
    let side = word_side(&word, rng);
    // interior local; endpoints excluded by the open-interval draw
    let local = rng.gen_range(0.0001..0.9999);
    space.canonicalize(crate::freeprod::Translate { word, side }, local)
}

/// A random boundary approximant: either a translate-boundary point or
/// an end of prefix length exactly `end_depth`.
pub fn random_boundary(
    space: &FreeProductSpace,
    rng: &mut ChaCha8Rng,
    max_len: usize,
    max_abs: i64,
    end_depth: usize,
) -> WBoundaryPoint {
    if rng.gen_bool(0.5) {
        let word = random_word(rng, max_len, max_abs);
        let side = word_side(&word, rng);
        let boundary = space.model(side).boundary_points();
        let local = boundary[rng.gen_range(0..boundary.len())];
        WBoundaryPoint::Translate {
            translate: crate::freeprod::Translate { word, side },
            local,
        }
    } else {
        let mut factor = if rng.gen() { Factor::G } else { Factor::H };
        let mut word = ReducedWord::one();
        for _ in 0..end_depth {
            let mag = rng.gen_range(1..=max_abs);
            let elem = if rng.gen() { mag } else { -mag };
            word = word.child(Letter::new(factor, elem));
            factor = factor.opposite();
        }
        WBoundaryPoint::End { prefix: word }
    }
}

/// Mixed sample of the completion: mostly interior, some boundary
/// approximants.
pub fn random_completion_point(
    space: &FreeProductSpace,
    rng: &mut ChaCha8Rng,
    max_len: usize,
    max_abs: i64,
    end_depth: usize,
) -> SpacePoint {
    if rng.gen_bool(0.15) {
        SpacePoint::Boundary(random_boundary(space, rng, max_len, max_abs, end_depth))
    } else {
        SpacePoint::Interior(random_wpoint(space, rng, max_len, max_abs))
    }
}
