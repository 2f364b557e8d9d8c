//! Homotopy track-diameter sweeps.

use crate::dirprod::{JoinPoint, ProductSpace, ProductSpacePoint};
use crate::error::Result;
use crate::freeprod::{homotopy_k, homotopy_p, FreeProductSpace, ZEpsilonIndex};
use crate::sweep::{item_rng, map_reduce};
use crate::verify::random_completion_point;
use rand::Rng;
use serde::Serialize;

/// Which homotopy a track sweep exercises.
pub enum TrackHandle<'a> {
    /// `K` for the given core; tracks must stay below `2 eps`.
    K {
        space: &'a FreeProductSpace,
        idx: &'a ZEpsilonIndex,
    },
    /// The boundary-clearing homotopy `P`; diameter reported, not
    /// bounded.
    P { space: &'a FreeProductSpace },
    /// The inward-ray homotopy on the product; diameter reported in the
    /// max of the two carrier metrics, and every track must end at the
    /// basepoint pair.
    Gamma { space: &'a ProductSpace },
    /// Constant homotopy fixture; tracks have diameter zero.
    Constant { space: &'a FreeProductSpace },
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackReport {
    pub handle: String,
    pub samples: u64,
    pub seed: u64,
    pub time_steps: usize,
    pub max_track_diam: f64,
    /// `2 eps` for `K`; absent for the unconstrained homotopies.
    pub bound: Option<f64>,
    pub endpoint_failures: u64,
    pub pass: bool,
}

/// Evaluates each sampled point along the time grid and reports the
/// largest track diameter.
pub fn check_homotopy_tracks(
    handle: &TrackHandle<'_>,
    samples: u64,
    time_steps: usize,
    seed: u64,
) -> Result<TrackReport> {
    let tgrid: Vec<f64> = (0..=time_steps)
        .map(|i| i as f64 / time_steps as f64)
        .collect();
    let (name, bound) = match handle {
        TrackHandle::K { idx, .. } => ("K".to_string(), Some(2.0 * idx.eps())),
        TrackHandle::P { .. } => ("P".to_string(), None),
        TrackHandle::Gamma { .. } => ("gamma".to_string(), None),
        TrackHandle::Constant { .. } => ("constant".to_string(), Some(0.0)),
    };
    let (max_diam, endpoint_failures) = map_reduce(
        samples as usize,
        |i| {
            let mut rng = item_rng(seed, i as u64);
            match handle {
                TrackHandle::K { space, idx } => {
                    let p = random_completion_point(space, &mut rng, 8, 20, 10);
                    (free_track_diam(space, &tgrid, |t| {
                        homotopy_k(space, idx, &p, t).expect("valid time")
                    }), 0)
                }
                TrackHandle::P { space } => {
                    let p = random_completion_point(space, &mut rng, 8, 20, 10);
                    (free_track_diam(space, &tgrid, |t| {
                        homotopy_p(space, &p, t).expect("valid time")
                    }), 0)
                }
                TrackHandle::Constant { space } => {
                    let p = random_completion_point(space, &mut rng, 8, 20, 10);
                    (free_track_diam(space, &tgrid, |_t| {
                        crate::freeprod::Evaluated {
                            point: p.clone(),
                            tolerance: 0.0,
                        }
                    }), 0)
                }
                TrackHandle::Gamma { space } => {
                    let z = random_join_point(space, &mut rng);
                    let track: Vec<(f64, f64)> = tgrid
                        .iter()
                        .map(|&t| match space.homotopy_gamma(&z, t).expect("valid time") {
                            ProductSpacePoint::Interior(p) => (p.x, p.y),
                            ProductSpacePoint::Join(j) => (j.xbar, j.ybar),
                        })
                        .collect();
                    let mut diam = 0.0f64;
                    for i in 0..track.len() {
                        for j in i + 1..track.len() {
                            let dx = space.x.rho(track[i].0, track[j].0);
                            let dy = space.y.rho(track[i].1, track[j].1);
                            diam = diam.max(dx.max(dy));
                        }
                    }
                    let last = track[track.len() - 1];
                    let at_base =
                        last.0 == space.x.basepoint() && last.1 == space.y.basepoint();
                    (diam, u64::from(!at_base))
                }
            }
        },
        || (0.0f64, 0u64),
        |a, b| (a.0.max(b.0), a.1 + b.1),
    );
    let pass = bound.map_or(true, |b| max_diam < b || (b == 0.0 && max_diam == 0.0))
        && endpoint_failures == 0;
    Ok(TrackReport {
        handle: name,
        samples,
        seed,
        time_steps,
        max_track_diam: max_diam,
        bound,
        endpoint_failures,
        pass,
    })
}

fn free_track_diam(
    space: &FreeProductSpace,
    tgrid: &[f64],
    eval: impl Fn(f64) -> crate::freeprod::Evaluated,
) -> f64 {
    let track: Vec<crate::freeprod::Evaluated> = tgrid.iter().map(|&t| eval(t)).collect();
    let mut diam = 0.0f64;
    for i in 0..track.len() {
        for j in i + 1..track.len() {
            if track[i].point == track[j].point {
                // the same completion point exactly; no tail widening
                continue;
            }
            let d = space.dist_general(&track[i].point, &track[j].point);
            diam = diam.max(d.value + d.tolerance + track[i].tolerance + track[j].tolerance);
        }
    }
    diam
}

fn random_join_point(space: &ProductSpace, rng: &mut rand_chacha::ChaCha8Rng) -> ProductSpacePoint {
    let bx = space.x.boundary_points();
    let by = space.y.boundary_points();
    let xbar = bx[rng.gen_range(0..bx.len())];
    let ybar = by[rng.gen_range(0..by.len())];
    let mu = match rng.gen_range(0..4) {
        0 => 0.0,
        1 => f64::INFINITY,
        _ => (rng.gen_range(-1.0f64..1.0)).exp2() * rng.gen_range(0.1..10.0),
    };
    ProductSpacePoint::Join(JoinPoint::new(xbar, ybar, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::IntLineModel;
    use std::sync::Arc;

    fn line_space() -> FreeProductSpace {
        FreeProductSpace::new(Arc::new(IntLineModel), Arc::new(IntLineModel))
    }

    #[test]
    fn constant_homotopy_has_zero_tracks() {
        let s = line_space();
        let r = check_homotopy_tracks(&TrackHandle::Constant { space: &s }, 200, 10, 5).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_track_diam, 0.0);
    }

    #[test]
    fn k_tracks_stay_below_twice_eps() {
        let s = line_space();
        let idx = ZEpsilonIndex::build(&s, 0.5, 8).unwrap();
        let r = check_homotopy_tracks(
            &TrackHandle::K {
                space: &s,
                idx: &idx,
            },
            1_000,
            25,
            42,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_track_diam < 1.0);
    }

    #[test]
    fn gamma_tracks_end_at_the_basepoint_pair() {
        let s = ProductSpace::build(
            Arc::new(IntLineModel),
            Arc::new(IntLineModel),
            30.0,
            30.0,
        )
        .unwrap();
        let r = check_homotopy_tracks(&TrackHandle::Gamma { space: &s }, 300, 20, 9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.endpoint_failures, 0);
    }
}
