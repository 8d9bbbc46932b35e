//! Finite presentations of piece groups and verified quotient homomorphisms
//! into free products of cyclic groups.
//!
//! Words over named generators are [`GenWord`]s; they print as
//! `name^exp.name^exp` (identity: `1`) and parse back, so certificates can
//! carry them as strings. [`seifert_presentation`] builds the standard
//! presentation of the fundamental group of a fibered piece:
//!
//! - orientable base of genus `g`, `p` exceptional fibers, `k` boundary
//!   components: generators `a1..ag, b1..bg, c1..cp, d1..dk, h`; the fiber
//!   class `h` commutes with everything, each exceptional generator satisfies
//!   `ci^alpha_i h^beta_i = 1`, and the long relator
//!   `[a1,b1]..[ag,bg] c1..cp d1..dk = 1` closes the base surface;
//! - nonorientable base with `g` crosscaps: generators `a1..ag, c1..cp,
//!   d1..dk, h`; crosscap generators reverse the fiber (`ai h ai^-1 = h^-1`),
//!   exceptional generators preserve or reverse it according to their sign
//!   (`ci h ci^-1 = h^delta_i`), boundary generators preserve it, and the
//!   long relator is `a1^2..ag^2 c1..cp d1..dk = 1`.
//!
//! A [`QuotientHom`] maps a presentation into a free product of cyclic
//! groups. It is built by [`quotient_map`] from a set of kept generators
//! (everything else is sent to the identity); kept generators may be left
//! *pending* and get their images later via
//! [`QuotientHom::eliminate_generator`], which solves a relator in which the
//! pending generator occurs exactly once with exponent ±1. Every relator
//! whose symbols are all mapped is checked to die in the codomain; the
//! homomorphism is `verified` once every generator has an image and every
//! relator has been checked. Only verified homomorphisms can be applied to
//! words, so a successful [`QuotientHom::apply`] is backed by a complete
//! relator check.

use crate::freeprod::{Group, GroupError, NFWord};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A word in named generators with integer exponents. No reduction is
/// implied: it is a formal product, evaluated left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GenWord(pub Vec<(String, i64)>);

impl GenWord {
    /// The empty word.
    pub fn one() -> GenWord {
        GenWord(Vec::new())
    }

    pub fn letter(name: &str, exp: i64) -> GenWord {
        GenWord::from_pairs(&[(name, exp)])
    }

    /// Builds a word, dropping zero exponents.
    pub fn from_pairs(pairs: &[(&str, i64)]) -> GenWord {
        GenWord(
            pairs
                .iter()
                .filter(|(_, e)| *e != 0)
                .map(|&(n, e)| (n.to_string(), e))
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &GenWord) -> GenWord {
        let mut letters = self.0.clone();
        letters.extend(other.0.iter().cloned());
        GenWord(letters)
    }

    pub fn inverse(&self) -> GenWord {
        GenWord(self.0.iter().rev().map(|(n, e)| (n.clone(), -e)).collect())
    }

    pub fn pow(&self, k: i64) -> GenWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = GenWord::one();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// The distinct generator names appearing in the word.
    pub fn symbols(&self) -> BTreeSet<&str> {
        self.0.iter().map(|(n, _)| n.as_str()).collect()
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (name, exp)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}^{}", name, exp)?;
        }
        Ok(())
    }
}

/// Why a word failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad word syntax at `{part}`: {reason}")]
pub struct WordParseError {
    pub part: String,
    pub reason: String,
}

impl FromStr for GenWord {
    type Err = WordParseError;

    /// Parses `name^exp.name^exp`; a missing `^exp` means exponent 1, and
    /// the word `1` is the identity.
    fn from_str(s: &str) -> Result<GenWord, WordParseError> {
        let s = s.trim();
        if s == "1" {
            return Ok(GenWord::one());
        }
        if s.is_empty() {
            return Err(WordParseError {
                part: String::new(),
                reason: "empty word (use `1` for the identity)".into(),
            });
        }
        let mut letters = Vec::new();
        for part in s.split('.') {
            let (name, exp) = match part.split_once('^') {
                Some((n, e)) => {
                    let exp: i64 = e.parse().map_err(|_| WordParseError {
                        part: part.to_string(),
                        reason: format!("`{}` is not an integer exponent", e),
                    })?;
                    (n, exp)
                }
                None => (part, 1),
            };
            if name.is_empty()
                || !name.chars().next().unwrap().is_ascii_alphabetic() && !name.starts_with('_')
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(WordParseError {
                    part: part.to_string(),
                    reason: format!("`{}` is not a generator name", name),
                });
            }
            if exp != 0 {
                letters.push((name.to_string(), exp));
            }
        }
        Ok(GenWord(letters))
    }
}

impl Serialize for GenWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GenWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<GenWord, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite presentation: named generators and relator words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<GenWord>,
}

impl GroupPresentation {
    pub fn has_generator(&self, name: &str) -> bool {
        self.generators.iter().any(|g| g == name)
    }
}

/// The standard presentation of the fundamental group of a fibered piece.
pub fn seifert_presentation(piece: &crate::decomposition::SeifertPiece) -> GroupPresentation {
    let g = piece.genus as usize;
    let p = piece.fibers.len();
    let k = piece.boundary as usize;
    let mut generators: Vec<String> = Vec::new();
    let a: Vec<String> = (1..=g).map(|i| format!("a{}", i)).collect();
    let b: Vec<String> = (1..=g).map(|i| format!("b{}", i)).collect();
    let c: Vec<String> = (1..=p).map(|i| format!("c{}", i)).collect();
    let d: Vec<String> = (1..=k).map(|i| format!("d{}", i)).collect();
    generators.extend(a.iter().cloned());
    if piece.base_orientable {
        generators.extend(b.iter().cloned());
    }
    generators.extend(c.iter().cloned());
    generators.extend(d.iter().cloned());
    generators.push("h".to_string());

    let mut relators: Vec<GenWord> = Vec::new();
    let commute = |x: &str| GenWord::from_pairs(&[(x, 1), ("h", 1), (x, -1), ("h", -1)]);
    if piece.base_orientable {
        for x in a.iter().chain(b.iter()).chain(c.iter()).chain(d.iter()) {
            relators.push(commute(x));
        }
    } else {
        for x in &a {
            relators.push(GenWord::from_pairs(&[(x, 1), ("h", 1), (x, -1), ("h", 1)]));
        }
        for (i, x) in c.iter().enumerate() {
            relators.push(GenWord::from_pairs(&[
                (x, 1),
                ("h", 1),
                (x, -1),
                ("h", -i64::from(piece.delta(i))),
            ]));
        }
        for x in &d {
            relators.push(commute(x));
        }
    }
    for (i, &(alpha, beta)) in piece.fibers.iter().enumerate() {
        relators.push(GenWord::from_pairs(&[
            (&c[i], i64::from(alpha)),
            ("h", i64::from(beta)),
        ]));
    }
    let mut long: Vec<(&str, i64)> = Vec::new();
    if piece.base_orientable {
        for i in 0..g {
            long.push((&a[i], 1));
            long.push((&b[i], 1));
            long.push((&a[i], -1));
            long.push((&b[i], -1));
        }
    } else {
        for x in &a {
            long.push((x, 2));
        }
    }
    for x in &c {
        long.push((x, 1));
    }
    for x in &d {
        long.push((x, 1));
    }
    relators.push(GenWord::from_pairs(&long));
    GroupPresentation {
        generators,
        relators,
    }
}

/// Why a quotient map could not be built, extended, or applied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("`{name}` is not a generator of the presentation")]
    UnknownGenerator { name: String },
    #[error("`{name}` is not kept, so it may not be given an image")]
    KilledGeneratorHasImage { name: String },
    #[error("image of `{name}` lives in the wrong group (expected {expected}, got {got})")]
    GroupMismatch {
        name: String,
        expected: String,
        got: String,
    },
    #[error("relator {relator} does not die: its image is {image}")]
    WellDefinedness { relator: GenWord, image: NFWord },
    #[error("`{name}` has no image yet")]
    PendingSymbol { name: String },
    #[error("the homomorphism is not verified yet (pending generators remain)")]
    NotVerified,
    #[error("{relator} is not a relator of the presentation")]
    NotARelator { relator: GenWord },
    #[error("cannot solve {relator} for `{name}`: it must occur exactly once, with exponent 1 or -1")]
    NotSolvable { name: String, relator: GenWord },
    #[error("`{name}` already has an image")]
    AlreadyMapped { name: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A homomorphism from a presented group into a free product of cyclic
/// groups, together with its verification state.
#[derive(Debug, Clone)]
pub struct QuotientHom {
    pres: GroupPresentation,
    codomain: Group,
    images: BTreeMap<String, NFWord>,
    verified: bool,
}

impl QuotientHom {
    pub fn presentation(&self) -> &GroupPresentation {
        &self.pres
    }

    pub fn codomain(&self) -> &Group {
        &self.codomain
    }

    pub fn image_of(&self, name: &str) -> Option<&NFWord> {
        self.images.get(name)
    }

    /// Generators that still have no image.
    pub fn pending(&self) -> Vec<&str> {
        self.pres
            .generators
            .iter()
            .filter(|g| !self.images.contains_key(*g))
            .map(|g| g.as_str())
            .collect()
    }

    /// Whether every generator is mapped and every relator has been checked
    /// to die in the codomain.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// The images of all generators, by name.
    pub fn images(&self) -> &BTreeMap<String, NFWord> {
        &self.images
    }

    /// Evaluates a word if all its symbols are mapped.
    fn partial_eval(&self, word: &GenWord) -> Result<Option<NFWord>, PresentationError> {
        let mut acc = self.codomain.identity();
        for (name, exp) in &word.0 {
            if !self.pres.has_generator(name) {
                return Err(PresentationError::UnknownGenerator { name: name.clone() });
            }
            match self.images.get(name) {
                None => return Ok(None),
                Some(img) => acc = acc.multiply(&img.pow(*exp))?,
            }
        }
        Ok(Some(acc))
    }

    /// Checks every fully-mapped relator; updates the verified flag.
    fn recheck(&mut self) -> Result<(), PresentationError> {
        for relator in &self.pres.relators {
            if let Some(image) = self.partial_eval(relator)? {
                if !image.is_identity() {
                    return Err(PresentationError::WellDefinedness {
                        relator: relator.clone(),
                        image,
                    });
                }
            }
        }
        self.verified = self.pending().is_empty();
        Ok(())
    }

    /// Applies the homomorphism to a word. The homomorphism must be
    /// verified, so the result really is the image of a group element.
    pub fn apply(&self, word: &GenWord) -> Result<NFWord, PresentationError> {
        if !self.verified {
            return Err(PresentationError::NotVerified);
        }
        match self.partial_eval(word)? {
            Some(img) => Ok(img),
            None => {
                let name = word
                    .symbols()
                    .into_iter()
                    .find(|s| !self.images.contains_key(*s))
                    .unwrap_or_default();
                Err(PresentationError::PendingSymbol {
                    name: name.to_string(),
                })
            }
        }
    }

    /// Extends the homomorphism by solving `relator` (which must be one of
    /// the presentation's relators) for the pending generator `name`: the
    /// generator must occur exactly once, with exponent ±1, and every other
    /// symbol of the relator must be mapped. All relators are rechecked.
    pub fn eliminate_generator(
        &self,
        relator: &GenWord,
        name: &str,
    ) -> Result<QuotientHom, PresentationError> {
        if !self.pres.relators.iter().any(|r| r == relator) {
            return Err(PresentationError::NotARelator {
                relator: relator.clone(),
            });
        }
        if !self.pres.has_generator(name) {
            return Err(PresentationError::UnknownGenerator {
                name: name.to_string(),
            });
        }
        if self.images.contains_key(name) {
            return Err(PresentationError::AlreadyMapped {
                name: name.to_string(),
            });
        }
        let hits: Vec<(usize, i64)> = relator
            .0
            .iter()
            .enumerate()
            .filter(|(_, (n, _))| n == name)
            .map(|(i, (_, e))| (i, *e))
            .collect();
        let (pos, eps) = match hits.as_slice() {
            [(i, e)] if e.abs() == 1 => (*i, *e),
            _ => {
                return Err(PresentationError::NotSolvable {
                    name: name.to_string(),
                    relator: relator.clone(),
                })
            }
        };
        let left = GenWord(relator.0[..pos].to_vec());
        let right = GenWord(relator.0[pos + 1..].to_vec());
        let left_img = self
            .partial_eval(&left)?
            .ok_or_else(|| pending_in(self, &left))?;
        let right_img = self
            .partial_eval(&right)?
            .ok_or_else(|| pending_in(self, &right))?;
        // left * x^eps * right = 1, so x = (left^-1 * right^-1)^eps.
        let solved = left_img
            .inverse()
            .multiply(&right_img.inverse())?
            .pow(eps);
        let mut next = self.clone();
        next.images.insert(name.to_string(), solved);
        next.recheck()?;
        Ok(next)
    }

    /// Builds a fully-specified homomorphism directly from generator images
    /// and verifies every relator. This is entry point used when replaying a
    /// certificate, where all images are spelled out.
    pub fn from_total_images(
        pres: &GroupPresentation,
        codomain: &Group,
        images: BTreeMap<String, NFWord>,
    ) -> Result<QuotientHom, PresentationError> {
        for name in images.keys() {
            if !pres.has_generator(name) {
                return Err(PresentationError::UnknownGenerator { name: name.clone() });
            }
        }
        for gen in &pres.generators {
            match images.get(gen) {
                None => return Err(PresentationError::PendingSymbol { name: gen.clone() }),
                Some(img) => check_same_group(gen, codomain, img)?,
            }
        }
        let mut hom = QuotientHom {
            pres: pres.clone(),
            codomain: codomain.clone(),
            images,
            verified: false,
        };
        hom.recheck()?;
        Ok(hom)
    }
}

fn pending_in(hom: &QuotientHom, word: &GenWord) -> PresentationError {
    let name = word
        .symbols()
        .into_iter()
        .find(|s| hom.images.get(*s).is_none())
        .unwrap_or_default();
    PresentationError::PendingSymbol {
        name: name.to_string(),
    }
}

fn check_same_group(name: &str, codomain: &Group, img: &NFWord) -> Result<(), PresentationError> {
    if img.group() != codomain {
        return Err(PresentationError::GroupMismatch {
            name: name.to_string(),
            expected: codomain.to_string(),
            got: img.group().to_string(),
        });
    }
    Ok(())
}

/// Builds the quotient map that keeps the named generators (sending each to
/// its given image, or leaving it pending if no image is given) and kills
/// every other generator. Every relator whose symbols are all mapped is
/// checked to die; the rest are checked as images arrive via
/// [`QuotientHom::eliminate_generator`].
pub fn quotient_map(
    pres: &GroupPresentation,
    kept: &[&str],
    codomain: &Group,
    images: BTreeMap<String, NFWord>,
) -> Result<QuotientHom, PresentationError> {
    for name in kept {
        if !pres.has_generator(name) {
            return Err(PresentationError::UnknownGenerator {
                name: name.to_string(),
            });
        }
    }
    let kept_set: BTreeSet<&str> = kept.iter().copied().collect();
    for (name, img) in &images {
        if !pres.has_generator(name) {
            return Err(PresentationError::UnknownGenerator { name: name.clone() });
        }
        if !kept_set.contains(name.as_str()) {
            return Err(PresentationError::KilledGeneratorHasImage { name: name.clone() });
        }
        check_same_group(name, codomain, img)?;
    }
    let mut full = images;
    for gen in &pres.generators {
        if !kept_set.contains(gen.as_str()) {
            full.insert(gen.clone(), codomain.identity());
        }
    }
    let mut hom = QuotientHom {
        pres: pres.clone(),
        codomain: codomain.clone(),
        images: full,
        verified: false,
    };
    hom.recheck()?;
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::SeifertPiece;

    #[test]
    fn word_print_parse_roundtrip() {
        let w = GenWord::from_pairs(&[("a1", 1), ("h", -2), ("c3", 5)]);
        assert_eq!(w.to_string(), "a1^1.h^-2.c3^5");
        assert_eq!("a1^1.h^-2.c3^5".parse::<GenWord>().unwrap(), w);
        assert_eq!("a1.h^-2.c3^5".parse::<GenWord>().unwrap(), w);
        assert_eq!(GenWord::one().to_string(), "1");
        assert_eq!("1".parse::<GenWord>().unwrap(), GenWord::one());
        // Zero exponents vanish on input.
        assert_eq!("a1^0.h^3".parse::<GenWord>().unwrap().to_string(), "h^3");
        assert!("".parse::<GenWord>().is_err());
        assert!("a^x".parse::<GenWord>().is_err());
        assert!("3a".parse::<GenWord>().is_err());
        assert!("a..b".parse::<GenWord>().is_err());
    }

    #[test]
    fn word_algebra() {
        let w = GenWord::from_pairs(&[("a", 2), ("b", -1)]);
        assert_eq!(w.inverse().to_string(), "b^1.a^-2");
        assert_eq!(w.pow(2).to_string(), "a^2.b^-1.a^2.b^-1");
        assert_eq!(w.pow(-1), w.inverse());
        assert_eq!(w.pow(0), GenWord::one());
    }

    #[test]
    fn solid_torus_presentation() {
        let pres = seifert_presentation(&SeifertPiece::orientable(0, 1, &[]));
        assert_eq!(pres.generators, vec!["d1".to_string(), "h".to_string()]);
        assert_eq!(
            pres.relators,
            vec![
                "d1^1.h^1.d1^-1.h^-1".parse().unwrap(),
                "d1^1".parse().unwrap(),
            ]
        );
    }

    #[test]
    fn nonorientable_example_presentation() {
        let pres = seifert_presentation(&SeifertPiece::nonorientable(1, 2, &[]));
        assert_eq!(pres.generators, vec!["a1", "d1", "d2", "h"]);
        assert!(pres.relators.contains(&"a1^1.h^1.a1^-1.h^1".parse().unwrap()));
        assert!(pres.relators.contains(&"a1^2.d1^1.d2^1".parse().unwrap()));
        // Fiber signs flip the conjugation relator.
        let mut p = SeifertPiece::nonorientable(1, 1, &[(3, 1), (3, 2)]);
        p.deltas = Some(vec![1, -1]);
        let pres = seifert_presentation(&p);
        assert!(pres.relators.contains(&"c1^1.h^1.c1^-1.h^-1".parse().unwrap()));
        assert!(pres.relators.contains(&"c2^1.h^1.c2^-1.h^1".parse().unwrap()));
    }

    #[test]
    fn relator_counts_match_formulas() {
        for g in 0..3u32 {
            for p in 0..3usize {
                for k in 0..3u32 {
                    let fibers: Vec<(u32, u32)> = (0..p).map(|i| (i as u32 + 2, 1)).collect();
                    let or = seifert_presentation(&SeifertPiece::orientable(g, k, &fibers));
                    assert_eq!(
                        or.relators.len(),
                        2 * g as usize + p + k as usize + p + 1
                    );
                    assert_eq!(
                        or.generators.len(),
                        2 * g as usize + p + k as usize + 1
                    );
                    if g >= 1 {
                        let non =
                            seifert_presentation(&SeifertPiece::nonorientable(g, k, &fibers));
                        assert_eq!(
                            non.relators.len(),
                            g as usize + p + k as usize + p + 1
                        );
                        assert_eq!(non.generators.len(), g as usize + p + k as usize + 1);
                    }
                }
            }
        }
    }

    fn torsion_pair_hom() -> (GroupPresentation, QuotientHom, Group) {
        // Disk base, fibers (2,1) and (3,1), one boundary. Kill h, send the
        // torsion generators to cyclic letters, and solve the long relator
        // for the boundary generator.
        let pres = seifert_presentation(&SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]));
        let codomain = Group::new(vec![("x1", 2), ("x2", 3)]).unwrap();
        let mut images = BTreeMap::new();
        images.insert("c1".to_string(), codomain.letter(0, 1).unwrap());
        images.insert("c2".to_string(), codomain.letter(1, 1).unwrap());
        let hom = quotient_map(&pres, &["c1", "c2", "d1"], &codomain, images).unwrap();
        (pres, hom, codomain)
    }

    #[test]
    fn quotient_map_keeps_pending_boundary() {
        let (_pres, hom, _codomain) = torsion_pair_hom();
        assert!(!hom.is_verified());
        assert_eq!(hom.pending(), vec!["d1"]);
        assert!(hom.image_of("h").unwrap().is_identity());
        assert!(matches!(
            hom.apply(&"c1^1".parse().unwrap()),
            Err(PresentationError::NotVerified)
        ));
    }

    #[test]
    fn eliminate_boundary_generator_and_apply() {
        let (pres, hom, codomain) = torsion_pair_hom();
        let long = pres.relators.last().unwrap().clone();
        assert_eq!(long, "c1^1.c2^1.d1^1".parse().unwrap());
        let hom = hom.eliminate_generator(&long, "d1").unwrap();
        assert!(hom.is_verified());
        // d1 = (c1 c2)^-1 = c2^-1 c1^-1 = x2^2 x1.
        let expected = codomain.reduce(&[(1, 2), (0, 1)]).unwrap();
        assert_eq!(hom.image_of("d1").unwrap(), &expected);
        // h dies, so h^r d1^s maps to (x1 x2)^-s.
        let w: GenWord = "h^7.d1^2".parse().unwrap();
        let img = hom.apply(&w).unwrap();
        let x1x2 = codomain.reduce(&[(0, 1), (1, 1)]).unwrap();
        assert_eq!(img, x1x2.pow(-2));
    }

    #[test]
    fn ill_defined_images_are_rejected() {
        // Sending the order-3 torsion generator to an order-2 letter breaks
        // its torsion relator.
        let pres = seifert_presentation(&SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]));
        let codomain = Group::new(vec![("x1", 2), ("x2", 3)]).unwrap();
        let mut images = BTreeMap::new();
        images.insert("c1".to_string(), codomain.letter(0, 1).unwrap());
        images.insert("c2".to_string(), codomain.letter(0, 1).unwrap());
        let err = quotient_map(&pres, &["c1", "c2", "d1"], &codomain, images).unwrap_err();
        match err {
            PresentationError::WellDefinedness { relator, image } => {
                assert_eq!(relator, "c2^3.h^1".parse().unwrap());
                assert_eq!(image, codomain.letter(0, 1).unwrap());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn eliminate_rejects_bad_requests() {
        let (pres, hom, codomain) = torsion_pair_hom();
        // Exponent 2: the torsion relator cannot be solved for c1.
        let torsion = pres.relators[3].clone();
        assert_eq!(torsion, "c1^2.h^1".parse().unwrap());
        let fresh = quotient_map(&pres, &["c1", "c2", "d1"], &codomain, BTreeMap::new()).unwrap();
        assert!(matches!(
            fresh.eliminate_generator(&torsion, "c1"),
            Err(PresentationError::NotSolvable { .. })
        ));
        // Not a relator.
        assert!(matches!(
            hom.eliminate_generator(&"d1^1.c1^1".parse().unwrap(), "d1"),
            Err(PresentationError::NotARelator { .. })
        ));
        // Already mapped.
        let long = pres.relators.last().unwrap().clone();
        assert!(matches!(
            hom.eliminate_generator(&long, "c1"),
            Err(PresentationError::AlreadyMapped { .. })
        ));
        // Solving requires the other symbols to be mapped already.
        assert!(matches!(
            fresh.eliminate_generator(&long, "d1"),
            Err(PresentationError::PendingSymbol { .. })
        ));
    }

    #[test]
    fn killed_generators_cannot_get_images() {
        let pres = seifert_presentation(&SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]));
        let codomain = Group::new(vec![("x1", 2), ("x2", 3)]).unwrap();
        let mut images = BTreeMap::new();
        images.insert("h".to_string(), codomain.letter(0, 1).unwrap());
        assert!(matches!(
            quotient_map(&pres, &["c1", "c2", "d1"], &codomain, images),
            Err(PresentationError::KilledGeneratorHasImage { .. })
        ));
    }

    #[test]
    fn total_images_verify_all_relators() {
        let (pres, hom, codomain) = torsion_pair_hom();
        let long = pres.relators.last().unwrap().clone();
        let hom = hom.eliminate_generator(&long, "d1").unwrap();
        let rebuilt =
            QuotientHom::from_total_images(&pres, &codomain, hom.images().clone()).unwrap();
        assert!(rebuilt.is_verified());
        assert_eq!(rebuilt.images(), hom.images());
        // Breaking one image is caught.
        let mut bad = hom.images().clone();
        bad.insert("c2".to_string(), codomain.letter(1, 2).unwrap());
        assert!(matches!(
            QuotientHom::from_total_images(&pres, &codomain, bad),
            Err(PresentationError::WellDefinedness { .. })
        ));
        // Missing images are caught.
        let mut missing = hom.images().clone();
        missing.remove("h");
        assert!(matches!(
            QuotientHom::from_total_images(&pres, &codomain, missing),
            Err(PresentationError::PendingSymbol { .. })
        ));
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        fn arb_genword() -> impl Strategy<Value = GenWord> {
            let letter = (
                proptest::sample::select(vec!["c1", "c2", "d1", "h"]),
                -3i64..=3,
            );
            proptest::collection::vec(letter, 0..6).prop_map(|pairs| {
                GenWord(
                    pairs
                        .into_iter()
                        .filter(|(_, e)| *e != 0)
                        .map(|(n, e)| (n.to_string(), e))
                        .collect(),
                )
            })
        }

        proptest! {
            #[test]
            fn apply_is_a_morphism(u in arb_genword(), v in arb_genword()) {
                let (pres, hom, _codomain) = torsion_pair_hom();
                let long = pres.relators.last().unwrap().clone();
                let hom = hom.eliminate_generator(&long, "d1").unwrap();
                let lhs = hom.apply(&u.concat(&v)).unwrap();
                let rhs = hom.apply(&u).unwrap().multiply(&hom.apply(&v).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);

                let inv = hom.apply(&u.inverse()).unwrap();
                prop_assert_eq!(inv, hom.apply(&u).unwrap().inverse());
            }

            #[test]
            fn word_roundtrip(w in arb_genword()) {
                let printed = w.to_string();
                let parsed: GenWord = printed.parse().unwrap();
                prop_assert_eq!(parsed, w);
            }
        }
    }
}
