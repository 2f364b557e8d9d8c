//! Null condition on the free-product completion.
//!
//! The translate of the base copy named by `w` has `d`-diameter exactly
//! `r*(w)`, so the translates too big for a given `eps` are enumerated
//! exactly by budgeted search over letter depths.  For a general
//! compactum supported in the base copies, a certified diameter bound
//! (`r*`-scales, not samples) cuts the word tree to a finite exceptional
//! set, and the sampled remainder is checked to fit single elements of
//! the canonical cover.

use crate::error::{Result, ZlabError};
use crate::freeprod::{EpsilonNet, FreeProductSpace, SpacePoint, WBoundaryPoint, WPoint};
use crate::sweep::{item_rng, map_reduce};
use crate::verify::{random_word, NullReport};
use crate::words::{Factor, Letter, ReducedWord};
use serde::Serialize;

/// A compactum supported in the two base copies: a sample cloud plus a
/// declared carrier covering radius.
#[derive(Clone, Debug)]
pub struct FreeCompactum {
    pub points: Vec<WPoint>,
    pub carrier_radius: f64,
}

impl FreeCompactum {
    /// The base fundamental-domain compactum: carrier grids of both base
    /// copies out to the given radius around the basepoint.
    pub fn base_domain(space: &FreeProductSpace, carrier_halfwidth: f64, n: usize) -> Self {
        let mut points = Vec::new();
        for side in [crate::freeprod::Side::X, crate::freeprod::Side::Y] {
            let bp = space.model(side).basepoint();
            for i in 0..=n {
                let u = bp - carrier_halfwidth + 2.0 * carrier_halfwidth * i as f64 / n as f64;
                points.push(space.canonicalize(
                    crate::freeprod::Translate {
                        word: ReducedWord::one(),
                        side,
                    },
                    u,
                ));
            }
        }
        FreeCompactum {
            points,
            carrier_radius: carrier_halfwidth / n as f64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullFreeReport {
    pub eps: f64,
    pub depth: usize,
    pub seed: u64,
    /// Words whose base-copy translates have diameter >= eps; exact.
    pub big_translates: Vec<String>,
    /// The same set recomputed two levels deeper; equality certifies
    /// depth stability.
    pub depth_stable: bool,
    pub report: NullReport,
    pub net_size: usize,
}

/// The canonical cover used by the fit verification: metric balls around
/// the net centers at the given radius.
pub fn net_cover(net: &EpsilonNet, radius: f64) -> crate::verify::CoverSpec {
    crate::verify::CoverSpec {
        elements: net
            .centers
            .iter()
            .map(|c| crate::verify::CoverElement::FreeBall {
                center_word: c.translate.word.clone(),
                center_side: c.translate.side,
                center_local: c.local,
                radius,
            })
            .collect(),
    }
}

/// Exact enumeration of `{w : r*(w) >= eps}` by letter budget.
pub fn big_translate_words(
    space: &FreeProductSpace,
    eps: f64,
    depth: usize,
) -> Result<Vec<ReducedWord>> {
    if !(eps > 0.0) {
        return Err(ZlabError::ParamOutOfRange {
            name: "eps",
            value: eps,
            what: "must be positive",
        });
    }
    // r*(w) >= eps iff the exponent sum stays within the budget; no word
    // qualifies once eps exceeds the base scale 1
    if !crate::dyadic::DyadicScale::ONE.ge_f64(eps) {
        return Ok(Vec::new());
    }
    let mut budget = 0u32;
    while crate::dyadic::DyadicScale::from_exponent(budget as u64 + 1).ge_f64(eps) && budget < 64 {
        budget += 1;
    }
    let mut out = Vec::new();
    let mut stack: Vec<(ReducedWord, u32)> = vec![(ReducedWord::one(), budget)];
    while let Some((word, rem)) = stack.pop() {
        out.push(word.clone());
        if word.len() >= depth {
            continue;
        }
        let factors: Vec<Factor> = match word.last() {
            Some(l) => vec![l.factor.opposite()],
            None => vec![Factor::G, Factor::H],
        };
        for factor in factors {
            let model = space.model_for(factor);
            for elem in model.elems_with_r_at_most(rem) {
                let r = model.r_value(elem);
                stack.push((word.child(Letter::new(factor, elem)), rem - r));
            }
        }
    }
    out.sort_by_key(|w| w.to_string());
    Ok(out)
}

/// Certified upper bound on the diameter of `w . C` for a base-supported
/// compactum: sampled pairwise distances plus the covering-radius slack.
/// The cloud's carrier neighborhoods land in the copies named by `w` or
/// its parent, so the slack scales by the parent's `r*`.
fn translated_diam_cert(space: &FreeProductSpace, w: &ReducedWord, c: &FreeCompactum) -> f64 {
    let moved: Vec<WPoint> = c.points.iter().map(|p| space.translate_point(w, p)).collect();
    let mut diam = 0.0f64;
    for (i, a) in moved.iter().enumerate() {
        for b in moved.iter().skip(i + 1) {
            diam = diam.max(space.dist(a, b));
        }
    }
    let slack_scale = match w.parent() {
        Some(parent) => space.rstar(&parent).to_f64(),
        None => 1.0,
    };
    diam + 2.0 * slack_scale * c.carrier_radius
}

/// Null-condition check for the free product: the exceptional set is cut
/// by certified diameter bounds and every sampled word outside it must
/// fit one inflated ball of the canonical `eps`-net.
pub fn check_null_free(
    space: &FreeProductSpace,
    compactum: &FreeCompactum,
    eps: f64,
    depth: usize,
    seed: u64,
) -> Result<NullFreeReport> {
    for p in &compactum.points {
        // base-copy points: word 1, or a first-level gluing point (its
        // canonical form is one letter deep but the point sits in the
        // base copy)
        let in_base = p.translate.word.is_one()
            || (p.translate.word.len() == 1
                && p.local == space.model(p.translate.side).basepoint());
        if !in_base {
            return Err(ZlabError::Config(
                "compactum must be supported in the base copies".into(),
            ));
        }
    }
    let big = big_translate_words(space, eps, depth)?;
    let big_deeper = big_translate_words(space, eps, depth + 2)?;
    let depth_stable = big == big_deeper;

    // exceptional set for the compactum: certified diameter >= eps.
    // Everything below w stays within (3 + 2 rad) r*(w), so the search
    // tree is cut there.
    let prune = |word: &ReducedWord| {
        space.rstar(word).to_f64() * (3.0 + 2.0 * compactum.carrier_radius) < eps
    };
    let mut exceptional = Vec::new();
    let mut boundary_ring: Vec<ReducedWord> = Vec::new();
    let mut stack = vec![ReducedWord::one()];
    while let Some(word) = stack.pop() {
        if translated_diam_cert(space, &word, compactum) >= eps {
            exceptional.push(word.clone());
        } else if word.len() > 0 {
            boundary_ring.push(word.clone());
        }
        if word.len() >= depth || prune(&word) {
            continue;
        }
        let factors: Vec<Factor> = match word.last() {
            Some(l) => vec![l.factor.opposite()],
            None => vec![Factor::G, Factor::H],
        };
        for factor in factors {
            let model = space.model_for(factor);
            // descend only into children whose whole branch could still
            // carry a certificate >= eps:
            // (3 + 2 rad) r*(w) 2^-r >= eps
            let threshold = eps / (3.0 + 2.0 * compactum.carrier_radius);
            let parent_exp = space.rstar(&word).exponent();
            let mut rmax = 0u32;
            while rmax < 60
                && crate::dyadic::DyadicScale::from_exponent(parent_exp + (rmax + 1) as u64)
                    .ge_f64(threshold)
            {
                rmax += 1;
            }
            for elem in model.elems_with_r_at_most(rmax) {
                stack.push(word.child(Letter::new(factor, elem)));
            }
            // a couple of certified-small children feed the sampled ring
            for elem in model
                .elems_with_r_at_most(rmax + 1)
                .into_iter()
                .filter(|&e| model.r_value(e) == rmax + 1)
                .take(2)
            {
                boundary_ring.push(word.child(Letter::new(factor, elem)));
            }
        }
    }
    exceptional.sort_by_key(|w| w.to_string());
    boundary_ring.sort_by_key(|w| w.to_string());
    boundary_ring.dedup();

    // canonical cover: the eps-net balls inflated to 2 eps; a set of
    // diameter < eps near a covered point fits one inflated ball
    let net = EpsilonNet::build(space, eps, depth.max(6))?;
    let fit_radius = 2.0 * eps;
    let cover = net_cover(&net, fit_radius);

    // sampled non-exceptional words: the ring just outside the
    // exceptional set plus random words to depth
    let mut sampled: Vec<ReducedWord> = boundary_ring;
    let random_budget = 200usize;
    for i in 0..random_budget {
        let mut rng = item_rng(seed, i as u64);
        let w = random_word(&mut rng, depth, 30);
        if !exceptional.contains(&w) {
            sampled.push(w);
        }
    }
    sampled.dedup();

    let results: Vec<(String, std::result::Result<usize, bool>)> = map_reduce(
        sampled.len(),
        |i| {
            let word = &sampled[i];
            let moved: Vec<WPoint> = compactum
                .points
                .iter()
                .map(|p| space.translate_point(word, p))
                .collect();
            let verdict = fit_into_cover(space, &cover, &net, &moved, compactum.carrier_radius);
            vec![(word.to_string(), verdict)]
        },
        Vec::new,
        |mut a, b| {
            a.extend(b);
            a
        },
    );

    let mut witness = Vec::new();
    let mut fit_failures = Vec::new();
    let mut cover_defects = Vec::new();
    for (word, verdict) in results {
        match verdict {
            Ok(idx) => witness.push((word, idx)),
            Err(true) => cover_defects.push(word),
            Err(false) => fit_failures.push(word),
        }
    }
    let pass = fit_failures.is_empty() && cover_defects.is_empty();
    Ok(NullFreeReport {
        eps,
        depth,
        seed,
        big_translates: big.iter().map(|w| w.to_string()).collect(),
        depth_stable,
        report: NullReport {
            exceptional_size: exceptional.len() as u64,
            exceptional: exceptional.iter().map(|w| w.to_string()).collect(),
            witness,
            fit_failures,
            cover_defects,
            pass,
        },
        net_size: net.len(),
    })
}

/// `Ok(index)` when the translated cloud (inflated by its covering
/// radius) fits inside one cover element; `Err(true)` marks a cover
/// defect (a point not even covered at the net's own radius),
/// `Err(false)` a genuine fit failure.
fn fit_into_cover(
    space: &FreeProductSpace,
    cover: &crate::verify::CoverSpec,
    net: &EpsilonNet,
    moved: &[WPoint],
    carrier_radius: f64,
) -> std::result::Result<usize, bool> {
    'elements: for (idx, element) in cover.elements.iter().enumerate() {
        let crate::verify::CoverElement::FreeBall {
            center_word,
            center_side,
            center_local,
            radius,
        } = element
        else {
            continue;
        };
        let site = SpacePoint::Boundary(WBoundaryPoint::Translate {
            translate: crate::freeprod::Translate {
                word: center_word.clone(),
                side: *center_side,
            },
            local: *center_local,
        });
        for p in moved {
            let slack = space.rstar(&p.translate.word).to_f64() * carrier_radius;
            let d = space.dist_general(&SpacePoint::Interior(p.clone()), &site);
            if d.value + slack >= *radius {
                continue 'elements;
            }
        }
        return Ok(idx);
    }
    // distinguish: is some point of the cloud not even covered?
    let defect = moved
        .iter()
        .any(|p| net.gap_to_nearest(space, &SpacePoint::Interior(p.clone())) >= net.eps);
    Err(defect)
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
    fn big_translates_at_quarter_eps() {
        let s = line_space();
        // r*(w) >= 1/4: the identity and the four r = 2 letters
        let big = big_translate_words(&s, 0.25, 6).unwrap();
        let strings: Vec<String> = big.iter().map(|w| w.to_string()).collect();
        assert_eq!(big.len(), 5, "{strings:?}");
        assert!(strings.contains(&"1".to_string()));
        assert!(strings.contains(&"g:1".to_string()));
        assert!(strings.contains(&"h:-1".to_string()));
    }

    #[test]
    fn gamma_empty_for_giant_eps() {
        let s = line_space();
        let c = FreeCompactum::base_domain(&s, 0.45, 8);
        let r = check_null_free(&s, &c, 4.0, 6, 1).unwrap();
        assert_eq!(r.report.exceptional_size, 0);
        assert!(r.report.pass, "{:?}", r.report.fit_failures);
    }

    #[test]
    fn quarter_eps_passes_and_is_depth_stable() {
        let s = line_space();
        let c = FreeCompactum::base_domain(&s, 0.45, 8);
        let r = check_null_free(&s, &c, 0.25, 6, 2).unwrap();
        assert!(r.depth_stable);
        assert!(r.report.exceptional_size > 0);
        assert!(r.report.pass, "fit failures: {:?}", r.report.fit_failures);
        assert!(!r.report.witness.is_empty());
    }
}
