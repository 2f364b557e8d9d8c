//! Total-boundedness sweep: sampled coverage of an explicit net.

use crate::error::Result;
use crate::freeprod::{EpsilonNet, FreeProductSpace};
use crate::sweep::{item_rng, map_reduce};
use crate::verify::random_completion_point;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    pub eps: f64,
    pub net_size: usize,
    pub samples: u64,
    pub seed: u64,
    pub uncovered: u64,
    /// Largest distance from a sample to its nearest center (upper
    /// bounds for end approximants include the tail).
    pub max_gap: f64,
    pub tail_depth: usize,
    pub depth_capped: bool,
    pub pass: bool,
}

/// Builds the `eps`-net and verifies each random point of the
/// completion (end approximants included) lies within `eps` of a
/// center.
pub fn check_total_boundedness(
    space: &FreeProductSpace,
    eps: f64,
    depth: usize,
    samples: u64,
    seed: u64,
) -> Result<BoundednessReport> {
    let net = EpsilonNet::build(space, eps, depth)?;
    let end_depth = 10.max(depth + 2);
    let (uncovered, max_gap) = map_reduce(
        samples as usize,
        |i| {
            let mut rng = item_rng(seed, i as u64);
            let p = random_completion_point(space, &mut rng, depth, 40, end_depth);
            let gap = net.gap_to_nearest(space, &p);
            (u64::from(gap >= eps), gap)
        },
        || (0u64, 0.0f64),
        |a, b| (a.0 + b.0, a.1.max(b.1)),
    );
    Ok(BoundednessReport {
        eps,
        net_size: net.len(),
        samples,
        seed,
        uncovered,
        max_gap,
        tail_depth: net.tail_depth,
        depth_capped: net.depth_capped,
        pass: uncovered == 0,
    })
}
