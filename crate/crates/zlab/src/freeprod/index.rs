//! The finite core `Z_eps` and its branch bookkeeping.
//!
//! `M_eps` is a prefix-closed finite set of words whose translates make
//! up the core.  Membership is decided by the certified branch-diameter
//! bound, not by sampling: a word stays out of the core exactly when the
//! whole branch hanging off it is certified smaller than `eps`.

use super::{natural_side, FreeProductSpace, SpacePoint, WBoundaryPoint, WPoint};
use crate::dyadic::DyadicScale;
use crate::error::{Result, ZlabError};
use crate::words::{Letter, ReducedWord};
use serde::Serialize;
use std::collections::HashSet;

/// Core index for one choice of `eps`.
#[derive(Clone, Debug)]
pub struct ZEpsilonIndex {
    eps: f64,
    members: HashSet<ReducedWord>,
    max_len: usize,
    depth_capped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZEpsilonSummary {
    pub eps: f64,
    pub word_count: usize,
    pub max_word_len: usize,
    pub depth_capped: bool,
}

impl ZEpsilonIndex {
    /// Builds `M_eps` by peeling exceptional letter sets level by level:
    /// a child enters the core while its certified branch diameter is
    /// still at least `eps`.  `depth` caps the peel; hitting the cap is
    /// flagged, not an error.
    pub fn build(space: &FreeProductSpace, eps: f64, depth: usize) -> Result<ZEpsilonIndex> {
        if !(eps > 0.0) {
            return Err(ZlabError::ParamOutOfRange {
                name: "eps",
                value: eps,
                what: "must be positive",
            });
        }
        if depth == 0 {
            return Err(ZlabError::ParamOutOfRange {
                name: "depth",
                value: depth as f64,
                what: "must be at least 1",
            });
        }
        let mut members = HashSet::new();
        let mut frontier = vec![ReducedWord::one()];
        members.insert(ReducedWord::one());
        let mut depth_capped = false;
        let mut max_len = 0usize;
        while let Some(word) = frontier.pop() {
            if word.len() >= depth {
                depth_capped = true;
                continue;
            }
            for factor in child_factors(&word) {
                let model = space.model_for(factor);
                // keep child iff diam cert >= eps, i.e.
                // 2^-(E + r) >= eps (2^p - 1)/(2^p + 1)
                let p = (space_min_r(space) as f64).exp2();
                let threshold = eps * (p - 1.0) / (p + 1.0);
                let parent_exp = space.rstar(&word).exponent();
                let mut rmax = 0u32;
                while rmax < 64
                    && DyadicScale::from_exponent(parent_exp + (rmax + 1) as u64)
                        .ge_f64(threshold)
                {
                    rmax += 1;
                }
                for elem in model.elems_with_r_at_most(rmax) {
                    let child = word.child(Letter::new(factor, elem));
                    if space.branch_diam_cert(&child) >= eps {
                        members.insert(child.clone());
                        max_len = max_len.max(child.len());
                        frontier.push(child);
                    }
                }
            }
        }
        Ok(ZEpsilonIndex {
            eps,
            members,
            max_len,
            depth_capped,
        })
    }

    /// The core used by the Z-set homotopy `P`: just the two base copies.
    pub fn base_core(_space: &FreeProductSpace) -> ZEpsilonIndex {
        let mut members = HashSet::new();
        members.insert(ReducedWord::one());
        ZEpsilonIndex {
            eps: 1.0,
            members,
            max_len: 0,
            depth_capped: false,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn contains(&self, word: &ReducedWord) -> bool {
        self.members.contains(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &ReducedWord> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn depth_capped(&self) -> bool {
        self.depth_capped
    }

    pub fn summary(&self) -> ZEpsilonSummary {
        ZEpsilonSummary {
            eps: self.eps,
            word_count: self.members.len(),
            max_word_len: self.max_len,
            depth_capped: self.depth_capped,
        }
    }

    /// `m(w)`: the length of the deepest prefix of `w` inside the core.
    pub fn m_of(&self, word: &ReducedWord) -> usize {
        let mut k = word.len().min(self.max_len);
        loop {
            if self.members.contains(&word.prefix(k).expect("k <= len")) {
                return k;
            }
            debug_assert!(k > 0, "the identity word is always in the core");
            k -= 1;
        }
    }

    /// `j(w) = |w| - m(w)`: how far the translate projects.
    pub fn j_of(&self, word: &ReducedWord) -> usize {
        word.len() - self.m_of(word)
    }

    /// The collapse deadline `t(w)`: the branch at `w x_0` is pulled in
    /// to `w x_0` on `[0, t(w)]`.  Product of the scales of the last
    /// `j(w) - 1` letters; defined here for all `j >= 1` (empty product
    /// for `j = 1`), while the public [`t_of_w`] keeps the `j >= 2`
    /// contract.
    pub fn collapse_deadline(
        &self,
        space: &FreeProductSpace,
        word: &ReducedWord,
    ) -> DyadicScale {
        let j = self.j_of(word);
        debug_assert!(j >= 1);
        let rs: Vec<u32> = trailing_rvalues(space, word, j.saturating_sub(1));
        collapse_deadline_for_rvalues(&rs)
    }

    /// `t(w)` per its contract: requires overhang depth `j(w) >= 2`.
    pub fn t_of_w(&self, space: &FreeProductSpace, word: &ReducedWord) -> Result<DyadicScale> {
        let j = self.j_of(word);
        if j < 2 {
            return Err(ZlabError::OverhangTooShallow(j));
        }
        Ok(self.collapse_deadline(space, word))
    }

    /// The projection `psi`: identity on the core, otherwise the gluing
    /// point `w|_(m(w)+1) x_0`.
    pub fn project_psi(&self, space: &FreeProductSpace, p: &SpacePoint) -> Result<WPoint> {
        let word = match p {
            SpacePoint::Interior(q) => &q.translate.word,
            SpacePoint::Boundary(WBoundaryPoint::Translate { translate, .. }) => &translate.word,
            SpacePoint::Boundary(WBoundaryPoint::End { prefix }) => {
                if self.members.contains(prefix) {
                    return Err(ZlabError::EndPrefixInsideCore(prefix.to_string()));
                }
                prefix
            }
        };
        if self.members.contains(word) {
            return match p {
                SpacePoint::Interior(q) => Ok(q.clone()),
                SpacePoint::Boundary(WBoundaryPoint::Translate { translate, local }) => {
                    Ok(WPoint {
                        translate: translate.clone(),
                        local: *local,
                    })
                }
                SpacePoint::Boundary(WBoundaryPoint::End { .. }) => unreachable!(),
            };
        }
        let m = self.m_of(word);
        Ok(space.gluing_point(&word.prefix(m + 1).expect("m < |w|")))
    }
}

fn space_min_r(space: &FreeProductSpace) -> u32 {
    space
        .model(super::Side::X)
        .min_r()
        .min(space.model(super::Side::Y).min_r())
}

fn child_factors(word: &ReducedWord) -> Vec<crate::words::Factor> {
    match natural_side(word) {
        // word ends in H: children extend by G letters, and vice versa;
        // the identity branches both ways
        Some(side) => vec![side.factor()],
        None => vec![crate::words::Factor::G, crate::words::Factor::H],
    }
}

fn trailing_rvalues(space: &FreeProductSpace, word: &ReducedWord, count: usize) -> Vec<u32> {
    let n = word.len();
    (0..count)
        .map(|i| {
            let letter = word.letters()[n - 1 - i];
            space.r_of_letter(letter)
        })
        .collect()
}

/// The deadline formula on raw r-values of the trailing letters
/// (`rs[0]` is the last letter of the word):
/// `t = prod_i 1/2^rs[i]`.
pub fn collapse_deadline_for_rvalues(rs: &[u32]) -> DyadicScale {
    let e: u64 = rs.iter().map(|&r| r as u64).sum();
    DyadicScale::from_exponent(e)
}
