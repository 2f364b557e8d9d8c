//! Explicit finite `eps`-nets witnessing total boundedness of the
//! completion.
//!
//! Following the compactness proof: peel exceptional letter sets level
//! by level to get the finite set of copies whose branches are not yet
//! certified small (this is the `eps/2` core), lay an `eps/4`-fine grid
//! over each of those copies, and inflate the radii to `eps`.  Branches
//! off the core sit within their certified radius of a gluing point that
//! the grid already covers, so the inflated balls swallow them, ends
//! included.

use super::index::ZEpsilonIndex;
use super::{natural_side, FreeProductSpace, Side, SpacePoint, Translate};
use crate::error::{Result, ZlabError};
use crate::words::ReducedWord;
use serde::Serialize;

/// A ball center; the local coordinate may be a boundary point of its
/// copy (the proof places balls on `w bdry-X_0` too).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetCenter {
    pub translate: Translate,
    pub local: f64,
}

/// A finite cover of the completion by `eps`-balls.
#[derive(Clone, Debug, Serialize)]
pub struct EpsilonNet {
    pub eps: f64,
    pub centers: Vec<NetCenter>,
    /// Grid guarantee: every point of the completion is within this
    /// fraction of `eps` of some center (the rest is inflation slack).
    pub coverage_fraction: f64,
    /// Smallest k with 1/2^(k-1) < eps/4; branches below depth k are
    /// always certified small.
    pub tail_depth: usize,
    pub depth_capped: bool,
}

impl EpsilonNet {
    /// Builds the net.  `depth` caps the core peel.
    pub fn build(space: &FreeProductSpace, eps: f64, depth: usize) -> Result<EpsilonNet> {
        if !(eps > 0.0) {
            return Err(ZlabError::ParamOutOfRange {
                name: "eps",
                value: eps,
                what: "must be positive",
            });
        }
        let mut tail_depth = 1usize;
        while (1.0 - tail_depth as f64).exp2() >= eps / 4.0 {
            tail_depth += 1;
        }
        // the whole completion fits in one ball around the basepoint
        // when the global radius certificate already beats eps
        if space.global_radius_cert() < eps {
            return Ok(EpsilonNet {
                eps,
                centers: vec![NetCenter {
                    translate: Translate::base(Side::X),
                    local: space.model(Side::X).basepoint(),
                }],
                coverage_fraction: space.global_radius_cert() / eps,
                tail_depth,
                depth_capped: false,
            });
        }
        let core = ZEpsilonIndex::build(space, eps / 2.0, depth)?;
        let mut centers = Vec::new();
        for word in core.words() {
            for side in copy_sides(word) {
                let scale = space.rstar(word).to_f64();
                grid_centers(space, word, side, scale, eps, &mut centers);
            }
        }
        Ok(EpsilonNet {
            eps,
            centers,
            coverage_fraction: 0.75,
            tail_depth,
            depth_capped: core.depth_capped(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Distance from a point of the completion to the nearest center
    /// (upper bound for end approximants: anchor distance plus tail).
    pub fn gap_to_nearest(&self, space: &FreeProductSpace, p: &SpacePoint) -> f64 {
        self.centers
            .iter()
            .map(|c| {
                let site = SpacePoint::Boundary(super::WBoundaryPoint::Translate {
                    translate: c.translate.clone(),
                    local: c.local,
                });
                let d = space.dist_general(p, &site);
                d.value + d.tolerance
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn copy_sides(word: &ReducedWord) -> Vec<Side> {
    match natural_side(word) {
        Some(side) => vec![side],
        None => vec![Side::X, Side::Y],
    }
}

/// Carrier grid fine enough that every point of the copy is within
/// `eps/4` of a center; includes both carrier endpoints, covering the
/// copy's boundary piece exactly as the proof does.
fn grid_centers(
    space: &FreeProductSpace,
    word: &ReducedWord,
    side: Side,
    scale: f64,
    eps: f64,
    out: &mut Vec<NetCenter>,
) {
    let translate = Translate {
        word: word.clone(),
        side,
    };
    if scale <= eps / 4.0 {
        out.push(NetCenter {
            local: space.model(side).basepoint(),
            translate,
        });
        return;
    }
    // carrier step h with scale * h/2 <= eps/4
    let steps = (2.0 * scale / eps).ceil().max(1.0) as usize;
    for i in 0..=steps {
        out.push(NetCenter {
            translate: translate.clone(),
            local: i as f64 / steps as f64,
        });
    }
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
    fn huge_eps_gives_a_single_ball() {
        let s = line_space();
        let net = EpsilonNet::build(&s, 5.0, 8).unwrap();
        assert_eq!(net.len(), 1);
    }

    #[test]
    fn net_size_grows_as_eps_shrinks() {
        let s = line_space();
        let n_half = EpsilonNet::build(&s, 0.5, 10).unwrap().len();
        let n_quarter = EpsilonNet::build(&s, 0.25, 10).unwrap().len();
        let n_eighth = EpsilonNet::build(&s, 0.125, 10).unwrap().len();
        assert!(n_half < n_quarter && n_quarter < n_eighth);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let s = line_space();
        assert!(EpsilonNet::build(&s, 0.0, 8).is_err());
        assert!(EpsilonNet::build(&s, -1.0, 8).is_err());
    }

    #[test]
    fn deep_interior_points_are_covered() {
        let s = line_space();
        let net = EpsilonNet::build(&s, 0.25, 10).unwrap();
        // a point far down an off-core branch
        let word: ReducedWord = "g:40,h:3,g:-2,h:1".parse().unwrap();
        let p = SpacePoint::Interior(s.wpoint(word, Side::X, 0.77).unwrap());
        assert!(net.gap_to_nearest(&s, &p) < net.eps);
        // and an end approximant
        let end = SpacePoint::Boundary(super::super::WBoundaryPoint::End {
            prefix: "g:1,h:-1,g:1,h:-1,g:1,h:-1,g:1,h:-1,g:1,h:-1".parse().unwrap(),
        });
        assert!(net.gap_to_nearest(&s, &end) < net.eps);
    }
}
