//! Reduced words in the free product of two factor groups.
//!
//! A word alternates letters from the two factors, with no identity
//! letters.  The factor groups are pluggable through [`FactorOps`]; the
//! shipped model is the integers under addition on both sides, which
//! makes `Z * Z` (the free group of rank two) available as a self-test.

use crate::error::ZlabError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which free-product factor a letter comes from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Factor {
    G,
    H,
}

impl Factor {
    pub fn opposite(self) -> Factor {
        match self {
            Factor::G => Factor::H,
            Factor::H => Factor::G,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Factor::G => 'g',
            Factor::H => 'h',
        }
    }
}

/// Group arithmetic on factor-group element identifiers.
///
/// Words store elements as opaque `i64` identifiers; what they mean is up
/// to the model supplying these operations.
pub trait FactorOps {
    fn mul(&self, factor: Factor, a: i64, b: i64) -> i64;
    fn inverse(&self, factor: Factor, a: i64) -> i64;
    fn is_identity(&self, factor: Factor, a: i64) -> bool;
}

/// Both factors are the integers under addition.
#[derive(Clone, Copy, Default, Debug)]
pub struct IntFactors;

impl FactorOps for IntFactors {
    fn mul(&self, _factor: Factor, a: i64, b: i64) -> i64 {
        a + b
    }

    fn inverse(&self, _factor: Factor, a: i64) -> i64 {
        -a
    }

    fn is_identity(&self, _factor: Factor, a: i64) -> bool {
        a == 0
    }
}

/// A single non-identity letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub factor: Factor,
    pub elem: i64,
}

impl Letter {
    pub fn new(factor: Factor, elem: i64) -> Self {
        Letter { factor, elem }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.factor.tag(), self.elem)
    }
}

/// A reduced word: alternating factors, no identity letters.
///
/// The empty word is the identity `1` with `|1| = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn one() -> Self {
        ReducedWord::default()
    }

    /// Validates alternation and non-identity; use [`reduce`] for raw input.
    pub fn from_letters(letters: Vec<Letter>, ops: &impl FactorOps) -> Result<Self, ZlabError> {
        for (i, l) in letters.iter().enumerate() {
            if ops.is_identity(l.factor, l.elem) {
                return Err(ZlabError::IdentityLetter { position: i });
            }
            if i > 0 && letters[i - 1].factor == l.factor {
                return Err(ZlabError::NonAlternating { position: i });
            }
        }
        Ok(ReducedWord { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The `k`th letter, 1-based.  `letter_at(1, 0)` on the identity word
    /// returns `None`, the distinguished identity token.
    pub fn letter_at(&self, k: usize) -> Result<Option<Letter>, ZlabError> {
        if k == 0 {
            if self.is_one() {
                return Ok(None);
            }
            return Err(ZlabError::LetterIndex { k, len: self.len() });
        }
        self.letters
            .get(k - 1)
            .copied()
            .map(Some)
            .ok_or(ZlabError::LetterIndex { k, len: self.len() })
    }

    /// The leftmost length-`k` subword.
    pub fn prefix(&self, k: usize) -> Result<ReducedWord, ZlabError> {
        if k > self.len() {
            return Err(ZlabError::PrefixTooLong { k, len: self.len() });
        }
        Ok(ReducedWord {
            letters: self.letters[..k].to_vec(),
        })
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn parent(&self) -> Option<ReducedWord> {
        if self.is_one() {
            None
        } else {
            Some(ReducedWord {
                letters: self.letters[..self.len() - 1].to_vec(),
            })
        }
    }

    #[must_use]
    pub fn child(&self, letter: Letter) -> ReducedWord {
        debug_assert!(self.last().map_or(true, |l| l.factor != letter.factor));
        let mut letters = self.letters.clone();
        letters.push(letter);
        ReducedWord { letters }
    }

    pub fn inverse(&self, ops: &impl FactorOps) -> ReducedWord {
        ReducedWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter::new(l.factor, ops.inverse(l.factor, l.elem)))
                .collect(),
        }
    }

    pub fn is_prefix_of(&self, other: &ReducedWord) -> bool {
        other.len() >= self.len() && other.letters[..self.len()] == self.letters[..]
    }
}

/// Reduces a raw letter sequence (identities allowed) to the unique
/// reduced word equal to its product.
pub fn reduce(raw: &[(Factor, i64)], ops: &impl FactorOps) -> ReducedWord {
    let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
    for &(factor, elem) in raw {
        if ops.is_identity(factor, elem) {
            continue;
        }
        push_reduced(&mut stack, Letter::new(factor, elem), ops);
    }
    ReducedWord { letters: stack }
}

fn push_reduced(stack: &mut Vec<Letter>, letter: Letter, ops: &impl FactorOps) {
    match stack.last() {
        Some(top) if top.factor == letter.factor => {
            let merged = ops.mul(letter.factor, top.elem, letter.elem);
            stack.pop();
            if !ops.is_identity(letter.factor, merged) {
                stack.push(Letter::new(letter.factor, merged));
            }
        }
        _ => stack.push(letter),
    }
}

/// The reduced product `w v`.
pub fn concat(w: &ReducedWord, v: &ReducedWord, ops: &impl FactorOps) -> ReducedWord {
    let mut stack = w.letters.clone();
    for &l in &v.letters {
        push_reduced(&mut stack, l, ops);
    }
    ReducedWord { letters: stack }
}

impl fmt::Display for ReducedWord {
    /// Text form used by the CLI: `g:1,h:-2,g:3`; `1` is the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = ZlabError;

    /// Rejects non-alternating or identity-containing input.
    fn from_str(s: &str) -> Result<Self, ZlabError> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(ReducedWord::one());
        }
        let mut letters = Vec::new();
        for token in s.split(',') {
            let (tag, value) = token
                .split_once(':')
                .ok_or_else(|| ZlabError::WordParse(token.to_string()))?;
            let factor = match tag.trim() {
                "g" | "G" => Factor::G,
                "h" | "H" => Factor::H,
                other => return Err(ZlabError::UnknownFactor(other.to_string())),
            };
            let elem: i64 = value
                .trim()
                .parse()
                .map_err(|_| ZlabError::WordParse(token.to_string()))?;
            letters.push(Letter::new(factor, elem));
        }
        ReducedWord::from_letters(letters, &IntFactors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn empty_product_is_one() {
        assert!(reduce(&[], &IntFactors).is_one());
    }

    #[test]
    fn inverse_pair_cancels() {
        let r = reduce(&[(Factor::G, 1), (Factor::G, -1)], &IntFactors);
        assert!(r.is_one());
    }

    #[test]
    fn same_factor_letters_merge() {
        // oracle: factor-group multiplication in Z
        let r = reduce(&[(Factor::G, 1), (Factor::G, 2), (Factor::H, 1)], &IntFactors);
        assert_eq!(r, w("g:3,h:1"));
    }

    #[test]
    fn concat_cancels_step_by_step() {
        // "g1 h1" * "h-1 g2" = g1 (h1 h-1) g2 = g1 g2 = g3, by hand
        let a = w("g:1,h:1");
        let b = w("h:-1,g:2");
        assert_eq!(concat(&a, &b, &IntFactors), w("g:3"));
    }

    #[test]
    fn concat_identity_and_inverse() {
        let a = w("g:1,h:2,g:-1");
        assert_eq!(concat(&ReducedWord::one(), &a, &IntFactors), a);
        assert_eq!(concat(&a, &ReducedWord::one(), &IntFactors), a);
        assert!(concat(&a, &a.inverse(&IntFactors), &IntFactors).is_one());
    }

    #[test]
    fn prefix_and_letters() {
        let word = w("g:1,h:2,g:3");
        assert_eq!(word.prefix(2).unwrap(), w("g:1,h:2"));
        assert_eq!(word.prefix(0).unwrap(), ReducedWord::one());
        assert_eq!(word.prefix(3).unwrap(), word);
        assert!(word.prefix(4).is_err());
        assert_eq!(word.letter_at(3).unwrap(), Some(Letter::new(Factor::G, 3)));
        assert_eq!(w("g:1,h:2").letter_at(2).unwrap(), Some(Letter::new(Factor::H, 2)));
        // 1(0) = 1, the identity token
        assert_eq!(ReducedWord::one().letter_at(0).unwrap(), None);
        assert!(word.letter_at(0).is_err());
    }

    #[test]
    fn parser_rejects_bad_words() {
        assert!("g:1,g:2".parse::<ReducedWord>().is_err());
        assert!("g:0".parse::<ReducedWord>().is_err());
        assert!("q:1".parse::<ReducedWord>().is_err());
        assert_eq!(w("1"), ReducedWord::one());
    }

    #[test]
    fn display_roundtrip() {
        let word = w("g:1,h:-2,g:3");
        assert_eq!(word.to_string().parse::<ReducedWord>().unwrap(), word);
        assert_eq!(ReducedWord::one().to_string(), "1");
    }
}
