//! The core-projection homotopy `K` and the boundary-clearing homotopy `P`.
//!
//! `K` concatenates translated copies of the slowed factor homotopies:
//! each copy below the core collapses onto its gluing point by its
//! deadline `t(w)`, then rides the parent copy's schedule.  `P` is the
//! `eps = 1` instance, time-compressed on each first-level branch into
//! `[0, 1/2^r]` and followed by the base copy's homotopy applied to the
//! collapsed image.
//!
//! End approximants stabilize: once `t` reaches the prefix deadline, the
//! evaluation at the anchor gluing point equals the true limit exactly,
//! so the returned tolerance drops to zero.

use super::index::ZEpsilonIndex;
use super::{FreeProductSpace, SpacePoint, Translate, WBoundaryPoint};
use crate::error::{Result, ZlabError};
use serde::Serialize;

/// Output of a homotopy evaluation: a point plus the halfwidth of the
/// interval certified to contain the true value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluated {
    pub point: SpacePoint,
    pub tolerance: f64,
}

impl Evaluated {
    fn exact(point: SpacePoint) -> Evaluated {
        Evaluated {
            point,
            tolerance: 0.0,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ZlabError::TimeOutOfRange(t));
    }
    Ok(())
}

/// Runs the translate-site recursion: stay in the copy with the sped-up
/// factor homotopy until the deadline, then continue from the gluing
/// point inside the parent copy.
fn k_site(
    space: &FreeProductSpace,
    idx: &ZEpsilonIndex,
    translate: &Translate,
    local: f64,
    t: f64,
) -> (Translate, f64) {
    let mut cur = translate.clone();
    let mut u = local;
    loop {
        if idx.contains(&cur.word) {
            return (cur, u);
        }
        let deadline = idx.collapse_deadline(space, &cur.word).to_f64();
        if t <= deadline {
            let s = t / deadline;
            let moved = space.model(cur.side).homotopy(u, s);
            return (cur, moved);
        }
        let (parent, glue_local) = space
            .glue_in_parent(&cur)
            .expect("words off the core are nonempty");
        cur = parent;
        u = glue_local;
    }
}

fn wrap_site(space: &FreeProductSpace, translate: Translate, local: f64) -> SpacePoint {
    if space.model(translate.side).is_boundary(local) {
        SpacePoint::Boundary(WBoundaryPoint::Translate { translate, local })
    } else {
        SpacePoint::Interior(space.canonicalize(translate, local))
    }
}

/// The homotopy `K` for the given core index.
///
/// `K(., 0)` is the identity, `K(., 1)` is the core projection, core
/// points are fixed at every time, and for a point in the branch at `w`
/// the whole track stays inside the branch at `w|_(m(w)+1)`.
pub fn homotopy_k(
    space: &FreeProductSpace,
    idx: &ZEpsilonIndex,
    p: &SpacePoint,
    t: f64,
) -> Result<Evaluated> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Evaluated::exact(p.clone()));
    }
    match p {
        SpacePoint::Interior(q) => {
            let (tr, u) = k_site(space, idx, &q.translate, q.local, t);
            Ok(Evaluated::exact(wrap_site(space, tr, u)))
        }
        SpacePoint::Boundary(WBoundaryPoint::Translate { translate, local }) => {
            let (tr, u) = k_site(space, idx, translate, *local, t);
            Ok(Evaluated::exact(wrap_site(space, tr, u)))
        }
        SpacePoint::Boundary(WBoundaryPoint::End { prefix }) => {
            if idx.contains(prefix) {
                return Err(ZlabError::EndPrefixInsideCore(prefix.to_string()));
            }
            let anchor = space.gluing_point(prefix);
            let deadline = idx.collapse_deadline(space, prefix);
            // Every continuation of the prefix has a strictly smaller
            // deadline, so for t at or past the prefix deadline the
            // recursion from any deeper gluing point funnels through the
            // anchor: the anchor evaluation is the limit, exactly.
            if deadline.le_f64(t) {
                let (tr, u) = k_site(space, idx, &anchor.translate, anchor.local, t);
                return Ok(Evaluated::exact(wrap_site(space, tr, u)));
            }
            // before the deadline the track is still inside the branch at
            // the prefix; report the fixed anchor with the tail bound
            Ok(Evaluated {
                point: SpacePoint::Interior(anchor),
                tolerance: WBoundaryPoint::end_halfwidth(prefix.len()),
            })
        }
    }
}

/// The Z-set homotopy `P` for the completion: `P(., 0)` is the identity
/// and `P(., t)` lands in `W` for every `t > 0`.
///
/// Built from `K` with the core fixed to the two base copies, run at
/// `2^r`-fold speed on the branch with first-letter depth `r`, then the
/// homotopy of the base copy containing the attach point takes over.
pub fn homotopy_p(space: &FreeProductSpace, p: &SpacePoint, t: f64) -> Result<Evaluated> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Evaluated::exact(p.clone()));
    }
    let core = ZEpsilonIndex::base_core(space);
    let word = match p {
        SpacePoint::Interior(q) => &q.translate.word,
        SpacePoint::Boundary(WBoundaryPoint::Translate { translate, .. }) => &translate.word,
        SpacePoint::Boundary(WBoundaryPoint::End { prefix }) => prefix,
    };
    match word.first() {
        None => {
            // base copies: the factor homotopies act directly
            let (translate, local) = match p {
                SpacePoint::Interior(q) => (q.translate.clone(), q.local),
                SpacePoint::Boundary(WBoundaryPoint::Translate { translate, local }) => {
                    (translate.clone(), *local)
                }
                SpacePoint::Boundary(WBoundaryPoint::End { .. }) => unreachable!(),
            };
            let moved = space.model(translate.side).homotopy(local, t);
            Ok(Evaluated::exact(wrap_site(space, translate, moved)))
        }
        Some(first) => {
            let r = space.r_of_letter(first);
            let gate = (-(r as f64)).exp2();
            if t <= gate {
                // compressed K phase; the scaled time is an exact
                // power-of-two rescaling
                homotopy_k(space, &core, p, t * (r as f64).exp2())
            } else {
                // the branch has collapsed onto its attach point in a
                // base copy; run that copy's homotopy
                let attach = space
                    .glue_in_parent(&Translate {
                        word: word.prefix(1).expect("nonempty"),
                        side: super::natural_side(&word.prefix(1).unwrap()).unwrap(),
                    })
                    .expect("first-level copies attach to a base copy");
                let (base, glue_local) = attach;
                let moved = space.model(base.side).homotopy(glue_local, t);
                Ok(Evaluated::exact(wrap_site(space, base, moved)))
            }
        }
    }
}
