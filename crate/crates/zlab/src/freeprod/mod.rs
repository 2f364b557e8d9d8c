//! The glued free-product space `W` and its scaled tree metric.
//!
//! `W` is a tree of translated copies of the two factor carriers, glued
//! along basepoint orbits.  A copy with word `w` carries the factor
//! metric rescaled to diameter `r*(w) = prod 1/2^{r(letter)}`; distances
//! across copies add up the legs along the unique tree path through the
//! gluing points.  The gluing tree is never materialized: adjacency and
//! paths are derived from word prefixes on demand.

mod homotopy;
mod index;
mod net;

pub use homotopy::{homotopy_k, homotopy_p, Evaluated};
pub use index::{collapse_deadline_for_rvalues, ZEpsilonIndex};
pub use net::{EpsilonNet, NetCenter};

use crate::dyadic::DyadicScale;
use crate::error::{Result, ZlabError};
use crate::models::{PairOps, ZStructureModel};
use crate::words::{concat, Factor, Letter, ReducedWord};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Which base copy a translate rescales.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }

    /// The factor acting inside this copy.
    pub fn factor(self) -> Factor {
        match self {
            Side::X => Factor::G,
            Side::Y => Factor::H,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Side::X => 'X',
            Side::Y => 'Y',
        }
    }
}

/// A translated copy `w X_0` or `w Y_0`.
///
/// A word other than `1` names exactly one translate: the X copy when it
/// ends in an H letter, the Y copy when it ends in a G letter.  The empty
/// word names both base copies.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Translate {
    pub word: ReducedWord,
    pub side: Side,
}

impl Translate {
    pub fn base(side: Side) -> Translate {
        Translate {
            word: ReducedWord::one(),
            side,
        }
    }
}

/// The side a nonempty word's translate lives on.
pub fn natural_side(word: &ReducedWord) -> Option<Side> {
    word.last().map(|l| match l.factor {
        Factor::H => Side::X,
        Factor::G => Side::Y,
    })
}

/// A point of `W`: a translate plus a carrier coordinate of its side.
///
/// Stored in canonical form; gluing points always live in the deeper of
/// the two copies that contain them, at that copy's basepoint.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct WPoint {
    pub translate: Translate,
    pub local: f64,
}

/// A point of the completion boundary.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum WBoundaryPoint {
    /// A boundary point of one translate, `w bar-X_0` or `w bar-Y_0`.
    Translate { translate: Translate, local: f64 },
    /// A depth-`|prefix|` approximant of an end: the limit of the gluing
    /// points along an infinite word.  Every computation involving it
    /// returns an interval of halfwidth `1/2^(|prefix|-1)`.
    End { prefix: ReducedWord },
}

impl WBoundaryPoint {
    /// A-priori tail bound carried by an end approximant.
    pub fn end_halfwidth(prefix_len: usize) -> f64 {
        (1.0 - prefix_len as f64).exp2()
    }

    pub fn halfwidth(&self) -> f64 {
        match self {
            WBoundaryPoint::Translate { .. } => 0.0,
            WBoundaryPoint::End { prefix } => Self::end_halfwidth(prefix.len()),
        }
    }
}

/// A point of the compactified space: interior or boundary.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum SpacePoint {
    Interior(WPoint),
    Boundary(WBoundaryPoint),
}

/// A value together with the halfwidth of its certified interval.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub value: f64,
    /// 0 for exact answers; the end tail bound otherwise.
    pub tolerance: f64,
}

impl Interval {
    pub fn exact(value: f64) -> Interval {
        Interval {
            value,
            tolerance: 0.0,
        }
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tolerance
    }
}

/// The glued space for one pair of factor models.
#[derive(Clone)]
pub struct FreeProductSpace {
    x: Arc<dyn ZStructureModel>,
    y: Arc<dyn ZStructureModel>,
    min_r: u32,
    /// Certified lower bounds on d(v x_0, boundary below v) / r*(v),
    /// indexed by the side of the translate v.
    glue_gap: [f64; 2],
}

/// Enumeration cap for per-copy child sweeps inside certificates.
const GAP_R_CAP: u32 = 18;
/// Cheaper cap for the one-time glue-gap fixed point; its tail floor is
/// far from binding for the shipped models.
const GLUE_GAP_R_CAP: u32 = 12;

impl FreeProductSpace {
    pub fn new(x: Arc<dyn ZStructureModel>, y: Arc<dyn ZStructureModel>) -> Self {
        let min_r = x.min_r().min(y.min_r()).max(1);
        let mut space = FreeProductSpace {
            x,
            y,
            min_r,
            glue_gap: [0.0, 0.0],
        };
        space.glue_gap = space.solve_glue_gap();
        space
    }

    pub fn model(&self, side: Side) -> &dyn ZStructureModel {
        match side {
            Side::X => self.x.as_ref(),
            Side::Y => self.y.as_ref(),
        }
    }

    pub fn model_for(&self, factor: Factor) -> &dyn ZStructureModel {
        match factor {
            Factor::G => self.x.as_ref(),
            Factor::H => self.y.as_ref(),
        }
    }

    pub fn ops(&self) -> PairOps<'_> {
        PairOps {
            x: self.x.as_ref(),
            y: self.y.as_ref(),
        }
    }

    pub fn r_of_letter(&self, letter: Letter) -> u32 {
        self.model_for(letter.factor).r_value(letter.elem)
    }

    /// `r*(w)`: the exact dyadic scale of the translate named by `w`.
    pub fn rstar(&self, word: &ReducedWord) -> DyadicScale {
        let e: u64 = word
            .letters()
            .iter()
            .map(|&l| self.r_of_letter(l) as u64)
            .sum();
        DyadicScale::from_exponent(e)
    }

    fn check_translate(&self, t: &Translate) -> Result<()> {
        if let Some(natural) = natural_side(&t.word) {
            if natural != t.side {
                return Err(ZlabError::BadTranslateSide {
                    side: t.side.tag(),
                    expected: match t.side {
                        Side::X => 'H',
                        Side::Y => 'G',
                    },
                });
            }
        }
        Ok(())
    }

    /// Builds a canonical point, validating the translate and carrier.
    pub fn wpoint(&self, word: ReducedWord, side: Side, local: f64) -> Result<WPoint> {
        let t = Translate { word, side };
        self.check_translate(&t)?;
        self.model(side).check_carrier(local)?;
        Ok(self.canonicalize(t, local))
    }

    /// Canonical form: basepoint-orbit locals become the gluing point of
    /// the one-letter-deeper translate; the base Y basepoint folds onto
    /// the base X basepoint (`x_0 ~ y_0`).
    pub fn canonicalize(&self, translate: Translate, local: f64) -> WPoint {
        let model = self.model(translate.side);
        if let Some(k) = model.orbit_element(local) {
            if !model.elem_is_identity(k) {
                let letter = Letter::new(translate.side.factor(), k);
                let child = translate.word.child(letter);
                let side = translate.side.opposite();
                return WPoint {
                    local: self.model(side).basepoint(),
                    translate: Translate { word: child, side },
                };
            }
            if local == model.basepoint()
                && translate.word.is_one()
                && translate.side == Side::Y
            {
                return WPoint {
                    translate: Translate::base(Side::X),
                    local: self.x.basepoint(),
                };
            }
        }
        WPoint { translate, local }
    }

    /// The canonical form of the gluing point `w x_0 ~ w y_0`.
    pub fn gluing_point(&self, word: &ReducedWord) -> WPoint {
        let side = natural_side(word).unwrap_or(Side::X);
        WPoint {
            translate: Translate {
                word: word.clone(),
                side,
            },
            local: self.model(side).basepoint(),
        }
    }

    /// The copy one step up the gluing tree, and the gluing point's
    /// carrier coordinate there.  `None` only for the base X copy.
    pub fn glue_in_parent(&self, t: &Translate) -> Option<(Translate, f64)> {
        match t.word.last() {
            None => match t.side {
                Side::X => None,
                Side::Y => Some((Translate::base(Side::X), self.x.basepoint())),
            },
            Some(letter) => {
                let side = t.side.opposite();
                let model = self.model(side);
                let local = model
                    .act(letter.elem, model.basepoint())
                    .expect("basepoint is interior");
                let word = t.word.parent().expect("nonempty word");
                Some((Translate { word, side }, local))
            }
        }
    }

    fn ascend(&self, t: &Translate, local: f64, stop_len: usize) -> (f64, Side, f64) {
        let mut sum = 0.0;
        let mut cur = t.clone();
        let mut u = local;
        while cur.word.len() > stop_len {
            let model = self.model(cur.side);
            sum += self.rstar(&cur.word).to_f64() * model.rho(u, model.basepoint());
            let (parent, glue_local) = self
                .glue_in_parent(&cur)
                .expect("nonempty word has a parent copy");
            cur = parent;
            u = glue_local;
        }
        (sum, cur.side, u)
    }

    fn site_dist(&self, a: (&Translate, f64), b: (&Translate, f64)) -> f64 {
        if a.0 == b.0 {
            let model = self.model(a.0.side);
            return self.rstar(&a.0.word).to_f64() * model.rho(a.1, b.1);
        }
        // order the endpoints so the fixed summation order makes the
        // result exactly symmetric
        let (a, b) = if site_key(a) <= site_key(b) { (a, b) } else { (b, a) };
        let l = common_prefix_len(&a.0.word, &b.0.word);
        let (da, sa, ua) = self.ascend(a.0, a.1, l);
        let (db, sb, ub) = self.ascend(b.0, b.1, l);
        let meet = a.0.word.prefix(l).expect("common prefix");
        let scale = self.rstar(&meet).to_f64();
        if sa == sb {
            da + db + scale * self.model(sa).rho(ua, ub)
        } else {
            // only the base copies share a word; cross through x_0 ~ y_0
            debug_assert!(meet.is_one());
            let leg_a = self.model(sa).rho(ua, self.model(sa).basepoint());
            let leg_b = self.model(sb).rho(ub, self.model(sb).basepoint());
            da + db + scale * (leg_a + leg_b)
        }
    }

    /// The metric `d` on canonical points of `W`.
    pub fn dist(&self, a: &WPoint, b: &WPoint) -> f64 {
        self.site_dist((&a.translate, a.local), (&b.translate, b.local))
    }

    /// Distance on the completion; end approximants widen the answer by
    /// their tail bound.
    pub fn dist_general(&self, a: &SpacePoint, b: &SpacePoint) -> Interval {
        let (sa, ta) = self.anchor_site(a);
        let (sb, tb) = self.anchor_site(b);
        Interval {
            value: self.site_dist((&sa.0, sa.1), (&sb.0, sb.1)),
            tolerance: ta + tb,
        }
    }

    fn anchor_site(&self, p: &SpacePoint) -> ((Translate, f64), f64) {
        match p {
            SpacePoint::Interior(q) => ((q.translate.clone(), q.local), 0.0),
            SpacePoint::Boundary(WBoundaryPoint::Translate { translate, local }) => {
                ((translate.clone(), *local), 0.0)
            }
            SpacePoint::Boundary(WBoundaryPoint::End { prefix }) => {
                let anchor = self.gluing_point(prefix);
                (
                    (anchor.translate, anchor.local),
                    WBoundaryPoint::end_halfwidth(prefix.len()),
                )
            }
        }
    }

    /// Gluing points along the tree path between the translates of `a`
    /// and `b`; empty when they share a translate.
    pub fn connecting_sequence(&self, a: &WPoint, b: &WPoint) -> Vec<WPoint> {
        if a.translate == b.translate {
            return Vec::new();
        }
        let wa = &a.translate.word;
        let wb = &b.translate.word;
        let l = common_prefix_len(wa, wb);
        let mut seq = Vec::new();
        for k in (l + 1..=wa.len()).rev() {
            seq.push(self.gluing_point(&wa.prefix(k).unwrap()));
        }
        // crossing between the two base copies passes through x_0 ~ y_0
        let (_, sa, _) = self.ascend(&a.translate, a.local, l);
        let (_, sb, _) = self.ascend(&b.translate, b.local, l);
        if sa != sb {
            seq.push(self.gluing_point(&ReducedWord::one()));
        }
        for k in l + 1..=wb.len() {
            seq.push(self.gluing_point(&wb.prefix(k).unwrap()));
        }
        seq
    }

    fn translate_site(&self, w: &ReducedWord, site: (&Translate, f64)) -> Result<(Translate, f64)> {
        let (t, local) = site;
        let product = concat(w, &t.word, &self.ops());
        let side = t.side;
        match natural_side(&product) {
            None => Ok((Translate::base(side), local)),
            Some(ns) if ns == side => Ok((Translate { word: product, side }, local)),
            Some(_) => {
                // final letter acts inside the copy instead of deepening it
                let letter = product.last().expect("nonempty word");
                let parent = product.parent().expect("nonempty word");
                let moved = self.model(side).act(letter.elem, local)?;
                Ok((Translate { word: parent, side }, moved))
            }
        }
    }

    /// The action of `w` on `W`.
    pub fn translate_point(&self, w: &ReducedWord, p: &WPoint) -> WPoint {
        let (t, local) = self
            .translate_site(w, (&p.translate, p.local))
            .expect("interior carrier points stay interior under the action");
        self.canonicalize(t, local)
    }

    /// Extends the action to the completion boundary.  Requires both
    /// factor actions to extend to their compactifications.
    pub fn extend_action_boundary(
        &self,
        w: &ReducedWord,
        b: &WBoundaryPoint,
    ) -> Result<WBoundaryPoint> {
        for side in [Side::X, Side::Y] {
            if !self.model(side).extends_to_boundary() {
                return Err(ZlabError::NotEzModel(self.model(side).name().to_string()));
            }
        }
        match b {
            WBoundaryPoint::Translate { translate, local } => {
                let (t, u) = self.translate_site(w, (translate, *local))?;
                Ok(WBoundaryPoint::Translate {
                    translate: t,
                    local: u,
                })
            }
            WBoundaryPoint::End { prefix } => {
                // prefix-wise action: the reduced product may shorten by
                // at most |w|
                let moved = concat(w, prefix, &self.ops());
                if moved.is_one() {
                    return Err(ZlabError::EndPrefixInsideCore(prefix.to_string()));
                }
                Ok(WBoundaryPoint::End { prefix: moved })
            }
        }
    }

    // ---- certified bounds ----

    /// Smallest per-letter scale shrink: `kappa = 2^(-min_r) <= 1/2`.
    pub fn kappa(&self) -> f64 {
        (-(self.min_r as f64)).exp2()
    }

    /// Certified upper bound on the diameter of the whole branch hanging
    /// at (and below) the translate of `word`:
    /// `r*(w) (2^p + 1)/(2^p - 1)` with `p = min_r`.  At word length k
    /// this is at most `3/2^k`, the tail-sum bound.
    pub fn branch_diam_cert(&self, word: &ReducedWord) -> f64 {
        let p = (self.min_r as f64).exp2();
        self.rstar(word).to_f64() * ((p + 1.0) / (p - 1.0))
    }

    /// Certified upper bound on sup d(x, w x_0) over the branch at `word`.
    pub fn branch_radius_cert(&self, word: &ReducedWord) -> f64 {
        let p = (self.min_r as f64).exp2();
        self.rstar(word).to_f64() * (p / (p - 1.0))
    }

    /// Certified upper bound on sup d(x_0, x) over all of the completion.
    pub fn global_radius_cert(&self) -> f64 {
        1.0 / (1.0 - self.kappa())
    }

    /// Certified lower bounds L_side on
    /// `d(v x_0, boundary points at or below v) / r*(v)`.
    ///
    /// Monotone fixed-point iteration from 0: every iterate stays below
    /// the true infimum, so the result is a sound certificate.
    fn solve_glue_gap(&self) -> [f64; 2] {
        let mut l = [0.0f64; 2];
        for _ in 0..24 {
            let mut next = [0.0f64; 2];
            for (i, side) in [Side::X, Side::Y].into_iter().enumerate() {
                let model = self.model(side);
                let bp = model.basepoint();
                let child = l[1 - i];
                let mut best = model.boundary_distance(bp);
                for k in model.elems_with_r_at_most(GLUE_GAP_R_CAP) {
                    let r = model.r_value(k);
                    let glue = model.act(k, bp).expect("basepoint orbit is interior");
                    let cand = model.rho(bp, glue) + (-(r as f64)).exp2() * child;
                    best = best.min(cand);
                }
                // letters beyond the enumeration cap sit within
                // 2^(1-CAP) of the boundary
                let tail =
                    (model.boundary_distance(bp) - (1.0 - GLUE_GAP_R_CAP as f64).exp2()).max(0.0);
                best = best.min(tail);
                next[i] = best;
            }
            l = next;
        }
        l
    }

    fn side_index(side: Side) -> usize {
        match side {
            Side::X => 0,
            Side::Y => 1,
        }
    }

    /// A certified positive lower bound on `d(p, boundary of W)` for
    /// interior points.  Never overestimates.
    pub fn certified_boundary_gap(&self, p: &WPoint) -> f64 {
        self.gap_rec(&p.translate, p.local, None, true)
    }

    fn gap_rec(
        &self,
        t: &Translate,
        u: f64,
        excluded_child: Option<Letter>,
        look_up: bool,
    ) -> f64 {
        let model = self.model(t.side);
        let scale = self.rstar(&t.word).to_f64();
        let bd = model.boundary_distance(u);
        let mut best = scale * bd;
        let bp = model.basepoint();
        // boundary hiding below each child gluing point
        let child_gap = self.glue_gap[1 - Self::side_index(t.side)];
        'levels: for r in self.model(t.side).min_r()..=GAP_R_CAP {
            // once every remaining candidate exceeds the best bound, stop
            if scale * (bd - (1.0 - r as f64).exp2()).max(0.0) >= best {
                break 'levels;
            }
            for k in model.elems_with_r_at_most(r) {
                if model.r_value(k) != r {
                    continue;
                }
                if excluded_child.is_some_and(|l| l.factor == t.side.factor() && l.elem == k) {
                    continue;
                }
                let glue = model.act(k, bp).expect("orbit point is interior");
                let cand = scale * (model.rho(u, glue) + (-(r as f64)).exp2() * child_gap);
                best = best.min(cand);
            }
        }
        // children past the cap accumulate at the carrier boundary
        best = best.min(scale * (bd - (1.0 - GAP_R_CAP as f64).exp2()).max(0.0));
        if look_up {
            match self.glue_in_parent(t) {
                Some((parent, glue_local)) => {
                    let leg = scale * model.rho(u, bp);
                    let up = self.gap_rec(&parent, glue_local, t.word.last(), true);
                    best = best.min(leg + up);
                }
                None => {
                    // from the base X copy the space continues into the
                    // base Y copy through x_0 ~ y_0
                    let leg = scale * model.rho(u, bp);
                    let twin = Translate::base(Side::Y);
                    let up = self.gap_rec(&twin, self.y.basepoint(), None, false);
                    best = best.min(leg + up);
                }
            }
        }
        best
    }
}

fn site_key(site: (&Translate, f64)) -> (Vec<(u8, i64)>, u8, u64) {
    let letters = site
        .0
        .word
        .letters()
        .iter()
        .map(|l| {
            (
                match l.factor {
                    Factor::G => 0u8,
                    Factor::H => 1u8,
                },
                l.elem,
            )
        })
        .collect();
    let side = match site.0.side {
        Side::X => 0u8,
        Side::Y => 1u8,
    };
    (letters, side, site.1.to_bits())
}

pub fn common_prefix_len(a: &ReducedWord, b: &ReducedWord) -> usize {
    a.letters()
        .iter()
        .zip(b.letters())
        .take_while(|(x, y)| x == y)
        .count()
}

// ---- text encodings ----

impl fmt::Display for WPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "word={}|side={}|local={}",
            self.translate.word,
            self.translate.side.tag(),
            self.local
        )
    }
}

impl fmt::Display for WBoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WBoundaryPoint::Translate { translate, local } => write!(
                f,
                "word={}|side={}|local={}",
                translate.word,
                translate.side.tag(),
                local
            ),
            WBoundaryPoint::End { prefix } => {
                write!(f, "end={}|depth={}", prefix, prefix.len())
            }
        }
    }
}

impl fmt::Display for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacePoint::Interior(p) => write!(f, "{p}"),
            SpacePoint::Boundary(b) => write!(f, "{b}"),
        }
    }
}

/// Parsed form of the CLI point encodings; resolve against a space with
/// [`FreeProductSpace::resolve_point`].
#[derive(Clone, Debug, PartialEq)]
pub struct PointSpec {
    pub word: ReducedWord,
    pub side: Option<Side>,
    pub local: Option<f64>,
    pub is_end: bool,
    pub declared_depth: Option<usize>,
}

impl FromStr for PointSpec {
    type Err = ZlabError;

    fn from_str(s: &str) -> Result<PointSpec> {
        let mut word = None;
        let mut side = None;
        let mut local = None;
        let mut is_end = false;
        let mut declared_depth = None;
        for part in s.split('|') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| ZlabError::PointParse(s.to_string()))?;
            match key.trim() {
                "word" => word = Some(value.parse::<ReducedWord>()?),
                "end" => {
                    is_end = true;
                    word = Some(value.parse::<ReducedWord>()?);
                }
                "side" => {
                    side = Some(match value.trim() {
                        "X" | "x" => Side::X,
                        "Y" | "y" => Side::Y,
                        _ => return Err(ZlabError::PointParse(s.to_string())),
                    })
                }
                "local" => {
                    local = Some(
                        value
                            .trim()
                            .parse::<f64>()
                            .map_err(|_| ZlabError::PointParse(s.to_string()))?,
                    )
                }
                "depth" => {
                    declared_depth = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| ZlabError::PointParse(s.to_string()))?,
                    )
                }
                _ => return Err(ZlabError::PointParse(s.to_string())),
            }
        }
        Ok(PointSpec {
            word: word.ok_or_else(|| ZlabError::PointParse(s.to_string()))?,
            side,
            local,
            is_end,
            declared_depth,
        })
    }
}

impl FreeProductSpace {
    pub fn resolve_point(&self, spec: &PointSpec) -> Result<SpacePoint> {
        if spec.is_end {
            if let Some(d) = spec.declared_depth {
                if d != spec.word.len() {
                    return Err(ZlabError::Config(format!(
                        "end depth {} does not match prefix length {}",
                        d,
                        spec.word.len()
                    )));
                }
            }
            if spec.word.is_one() {
                return Err(ZlabError::PointParse("end prefix must be nonempty".into()));
            }
            return Ok(SpacePoint::Boundary(WBoundaryPoint::End {
                prefix: spec.word.clone(),
            }));
        }
        let side = spec
            .side
            .or_else(|| natural_side(&spec.word))
            .unwrap_or(Side::X);
        let local = spec
            .local
            .ok_or_else(|| ZlabError::PointParse("missing local coordinate".into()))?;
        let t = Translate {
            word: spec.word.clone(),
            side,
        };
        self.check_translate(&t)?;
        self.model(side).check_carrier(local)?;
        if self.model(side).is_boundary(local) {
            return Ok(SpacePoint::Boundary(WBoundaryPoint::Translate {
                translate: t,
                local,
            }));
        }
        Ok(SpacePoint::Interior(self.canonicalize(t, local)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{embed_line, IntLineModel};

    pub(crate) fn line_space() -> FreeProductSpace {
        FreeProductSpace::new(Arc::new(IntLineModel), Arc::new(IntLineModel))
    }

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn rstar_examples() {
        let s = line_space();
        assert_eq!(s.rstar(&ReducedWord::one()), DyadicScale::ONE);
        // r(+-1) = 2 on each side
        assert_eq!(s.rstar(&w("g:1,h:1")).exponent(), 4);
        // 2 + 3 + 2
        assert_eq!(s.rstar(&w("g:1,h:2,g:1")).exponent(), 7);
    }

    #[test]
    fn canonical_gluing_points() {
        let s = line_space();
        // y_0 folds onto x_0
        let p = s.wpoint(ReducedWord::one(), Side::Y, 0.5).unwrap();
        assert_eq!(p.translate, Translate::base(Side::X));
        // e(1) inside the base X copy is the gluing point of word g:1
        let p = s.wpoint(ReducedWord::one(), Side::X, embed_line(1.0)).unwrap();
        assert_eq!(p.translate.word, w("g:1"));
        assert_eq!(p.translate.side, Side::Y);
        assert_eq!(p.local, 0.5);
        // generic points stay put
        let p = s.wpoint(ReducedWord::one(), Side::X, 0.37).unwrap();
        assert_eq!(p.translate, Translate::base(Side::X));
    }

    #[test]
    fn dist_examples() {
        let s = line_space();
        let x0 = s.gluing_point(&ReducedWord::one());
        assert_eq!(s.dist(&x0, &x0), 0.0);
        // base copy has scale r*(1) = 1; carrier distance 0.25
        let gx0 = s.gluing_point(&w("g:1"));
        assert_eq!(s.dist(&x0, &gx0), 0.25);
        // within g:1 Y-copy: r*("g:1") = 1/4 times the carrier distance
        let p = s.wpoint(w("g:1"), Side::Y, 0.9).unwrap();
        assert_eq!(s.dist(&p, &gx0), 0.25 * 0.4);
    }

    #[test]
    fn dist_is_symmetric_bitwise() {
        let s = line_space();
        let a = s.wpoint(w("g:1,h:2"), Side::X, 0.31).unwrap();
        let b = s.wpoint(w("g:-1"), Side::Y, 0.77).unwrap();
        assert_eq!(s.dist(&a, &b).to_bits(), s.dist(&b, &a).to_bits());
    }

    #[test]
    fn connecting_sequences() {
        let s = line_space();
        let a = s.wpoint(ReducedWord::one(), Side::X, 0.3).unwrap();
        let a2 = s.wpoint(ReducedWord::one(), Side::X, 0.6).unwrap();
        assert!(s.connecting_sequence(&a, &a2).is_empty());

        let b = s.wpoint(w("g:1"), Side::Y, 0.77).unwrap();
        let seq = s.connecting_sequence(&a, &b);
        assert_eq!(seq, vec![s.gluing_point(&w("g:1"))]);

        let c = s.wpoint(w("g:2"), Side::Y, 0.77).unwrap();
        let seq = s.connecting_sequence(&b, &c);
        assert_eq!(seq, vec![s.gluing_point(&w("g:1")), s.gluing_point(&w("g:2"))]);

        // crossing between the two base copies passes through x_0
        let d = s.wpoint(w("h:1"), Side::X, 0.77).unwrap();
        let seq = s.connecting_sequence(&b, &d);
        assert_eq!(
            seq,
            vec![
                s.gluing_point(&w("g:1")),
                s.gluing_point(&ReducedWord::one()),
                s.gluing_point(&w("h:1")),
            ]
        );
    }

    #[test]
    fn path_distance_matches_leg_sum() {
        let s = line_space();
        let a = s.wpoint(w("g:1,h:1"), Side::X, 0.3).unwrap();
        let b = s.wpoint(w("g:1,h:-2"), Side::X, 0.8).unwrap();
        // legs: within (g:1,h:1) X-copy to its basepoint, across the
        // (g:1) Y-copy between the two gluing points, then into
        // (g:1,h:-2)
        let d_expected = s.rstar(&w("g:1,h:1")).to_f64() * 0.2
            + s.rstar(&w("g:1")).to_f64() * (embed_line(1.0) - embed_line(-2.0)).abs()
            + s.rstar(&w("g:1,h:-2")).to_f64() * 0.3;
        assert!((s.dist(&a, &b) - d_expected).abs() < 1e-15);
    }

    #[test]
    fn translate_action_examples() {
        let s = line_space();
        let p = s.wpoint(ReducedWord::one(), Side::X, 0.37).unwrap();
        assert_eq!(s.translate_point(&ReducedWord::one(), &p), p);
        // g:1 acts inside the base X copy
        let x0 = s.gluing_point(&ReducedWord::one());
        let moved = s.translate_point(&w("g:1"), &x0);
        assert_eq!(moved, s.gluing_point(&w("g:1")));
        // h:1 moves the whole copy deeper
        let moved = s.translate_point(&w("h:1"), &p);
        assert_eq!(moved.translate.word, w("h:1"));
        assert_eq!(moved.translate.side, Side::X);
        assert_eq!(moved.local, 0.37);
    }

    #[test]
    fn nonmerging_translation_rescales_distances_exactly() {
        // a word ending in the other factor carries the whole copy:
        // distances scale by exactly r*(w)
        let s = line_space();
        let a = s.wpoint(ReducedWord::one(), Side::X, 0.31).unwrap();
        let b = s.wpoint(ReducedWord::one(), Side::X, 0.62).unwrap();
        let g = w("g:2,h:1");
        let ta = s.translate_point(&g, &a);
        let tb = s.translate_point(&g, &b);
        assert_eq!(ta.translate.word, g);
        let scale = s.rstar(&g).to_f64();
        assert!((s.dist(&ta, &tb) - scale * s.dist(&a, &b)).abs() < 1e-15);
    }

    #[test]
    fn action_laws_on_random_words() {
        let s = line_space();
        let ops = s.ops();
        let words = ["g:1", "h:-2,g:1", "g:3,h:1,g:-1", "h:2", "g:-1,h:1"];
        let p = s.wpoint(w("g:1,h:1"), Side::X, 0.27).unwrap();
        for a in &words {
            for b in &words {
                let wa = w(a);
                let wb = w(b);
                let lhs = s.translate_point(&wa, &s.translate_point(&wb, &p));
                let rhs = s.translate_point(&concat(&wa, &wb, &ops), &p);
                assert_eq!(lhs.translate, rhs.translate, "{a} * {b}");
                assert!((lhs.local - rhs.local).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_action_extension() {
        let s = line_space();
        let b = WBoundaryPoint::Translate {
            translate: Translate {
                word: w("g:1"),
                side: Side::Y,
            },
            local: 1.0,
        };
        assert_eq!(s.extend_action_boundary(&ReducedWord::one(), &b).unwrap(), b);
        // no cancellation: words concatenate
        let moved = s.extend_action_boundary(&w("h:2"), &b).unwrap();
        assert_eq!(
            moved,
            WBoundaryPoint::Translate {
                translate: Translate {
                    word: w("h:2,g:1"),
                    side: Side::Y
                },
                local: 1.0
            }
        );
        // ends act prefix-wise with re-reduction
        let end = WBoundaryPoint::End {
            prefix: w("g:1,h:1,g:1"),
        };
        let moved = s.extend_action_boundary(&w("g:-1"), &end).unwrap();
        assert_eq!(
            moved,
            WBoundaryPoint::End {
                prefix: w("h:1,g:1")
            }
        );
    }

    #[test]
    fn branch_certificates_match_tail_bounds() {
        let s = line_space();
        // tail bound: certified branch diameter <= 1/2^(k-1) + 1/2^k
        for depth in 1..=8usize {
            let word: ReducedWord = (0..depth)
                .map(|i| if i % 2 == 0 { "g:1" } else { "h:1" })
                .collect::<Vec<_>>()
                .join(",")
                .parse()
                .unwrap();
            let k = word.len() as f64;
            let bound = (1.0 - k).exp2() + (-k).exp2();
            assert!(s.branch_diam_cert(&word) <= bound + 1e-15);
        }
    }

    #[test]
    fn glue_gap_is_positive_and_sound() {
        let s = line_space();
        // line model fixed point: L = min(1/2, 1/4 + L/4, ...) = 1/3
        assert!(s.glue_gap[0] > 0.32 && s.glue_gap[0] < 1.0 / 3.0 + 1e-9);
        // gap certificate never exceeds the true distance to a sampled
        // boundary point
        let p = s.wpoint(w("g:1"), Side::Y, 0.6).unwrap();
        let gap = s.certified_boundary_gap(&p);
        assert!(gap > 0.0);
        for bnd in [0.0, 1.0] {
            let q = SpacePoint::Boundary(WBoundaryPoint::Translate {
                translate: Translate {
                    word: w("g:1"),
                    side: Side::Y,
                },
                local: bnd,
            });
            let d = s.dist_general(&SpacePoint::Interior(p.clone()), &q);
            assert!(gap <= d.value + 1e-15);
        }
    }

    #[test]
    fn point_text_round_trip() {
        let s = line_space();
        let spec: PointSpec = "word=g:1|side=Y|local=0.2".parse().unwrap();
        let p = s.resolve_point(&spec).unwrap();
        assert!(matches!(p, SpacePoint::Interior(_)));
        let spec: PointSpec = "end=g:1,h:1,g:1|depth=3".parse().unwrap();
        let p = s.resolve_point(&spec).unwrap();
        assert!(matches!(p, SpacePoint::Boundary(WBoundaryPoint::End { .. })));
        assert!("word=g:1|side=X|local=0.5".parse::<PointSpec>().is_ok());
        assert!(s
            .resolve_point(&"word=g:1|side=X|local=0.5".parse().unwrap())
            .is_err());
    }
}
