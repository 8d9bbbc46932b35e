//! Witness pairs for the extended loop product and the mod-2 accounting that
//! turns exact conjugacy computations into nontriviality proofs.
//!
//! Each argument ([`ArgumentId`]) pairs two families of loops in the
//! manifold (or its double cover) and expands their product into a fixed
//! list of free homotopy classes, written as words in a handful of named
//! generators. The expansion tables are part of the contract: they are
//! emitted into certificates and replayed by the verifier, and the geometric
//! content of each argument is captured by the claim that the product class
//! decomposes into exactly these terms.
//!
//! Two tests extract nontriviality from an expansion after mapping the terms
//! into a free product of cyclic groups:
//!
//! - [`mod2_survivors`] partitions the terms by conjugacy class of their
//!   images (equality of canonical cyclic words) and keeps the classes hit
//!   an odd number of times. A nonempty survivor list means the image of the
//!   product is a nonzero mod-2 combination of classes, so the product
//!   itself is nonzero.
//! - [`three_distinct_criterion`] handles the four-term expansions
//!   `[ab, a, b, 1]`: if at least three of the four image classes are
//!   pairwise distinct, the term `[ab]` (or one of the middle terms) cannot
//!   be cancelled, so the product is nonzero.
//!
//! Degrees and construction tags on the two classes record how each family
//! is built (a marked loop, a torus or sphere family, the fiber family of a
//! closed fibered manifold) and in which degree it lives after applying the
//! one-dimensional suspension where applicable; [`build_witness`] checks the
//! bookkeeping is consistent (`degree = base degree of the tag + 1` if the
//! suspension was applied).

use crate::freeprod::{CyclicWord, Group, GroupError, NFWord};
use crate::presentations::GenWord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// The named arguments the decision procedure can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentId {
    /// Two boundary curves of a piece with at least three boundary tori.
    TwoCurves,
    /// Two curves generating a rank-2 free quotient of a piece group, via
    /// the figure-eight style commutator expansion.
    FigureEight,
    /// The figure-eight expansion applied to a boundary curve and a
    /// crosscap curve of a nonorientable-base piece.
    NonorientableFigureEight,
    /// A single closed fibered manifold: the fiber family against a marked
    /// loop.
    ClosedSeifert,
    /// Two essential summands: the composed sphere family against a marked
    /// loop through both summands.
    ConnectedSum,
    /// A non-separating sphere: its family against a loop crossing it.
    NonseparatingSphere,
    /// A non-separating torus: its family against a loop crossing it.
    NonseparatingTorus,
    /// A hyperbolic piece glued to a neighbor: two crossing loops separated
    /// by malnormality of the cusp subgroup.
    HyperbolicGluing,
}

impl ArgumentId {
    pub const ALL: [ArgumentId; 8] = [
        ArgumentId::TwoCurves,
        ArgumentId::FigureEight,
        ArgumentId::NonorientableFigureEight,
        ArgumentId::ClosedSeifert,
        ArgumentId::ConnectedSum,
        ArgumentId::NonseparatingSphere,
        ArgumentId::NonseparatingTorus,
        ArgumentId::HyperbolicGluing,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ArgumentId::TwoCurves => "two_curves",
            ArgumentId::FigureEight => "figure_eight",
            ArgumentId::NonorientableFigureEight => "nonorientable_figure_eight",
            ArgumentId::ClosedSeifert => "closed_seifert",
            ArgumentId::ConnectedSum => "connected_sum",
            ArgumentId::NonseparatingSphere => "nonseparating_sphere",
            ArgumentId::NonseparatingTorus => "nonseparating_torus",
            ArgumentId::HyperbolicGluing => "hyperbolic_gluing",
        }
    }

    pub fn from_name(name: &str) -> Option<ArgumentId> {
        ArgumentId::ALL.iter().copied().find(|a| a.name() == name)
    }

    /// How many generator names the witness tables need.
    pub fn generator_count(&self) -> usize {
        match self {
            ArgumentId::TwoCurves | ArgumentId::HyperbolicGluing => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a witness family is constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionTag {
    /// A single marked loop (a 0-dimensional family).
    MarkedLoop,
    /// The circle family of loops sweeping a vertical torus.
    VerticalTorusFamily,
    /// The sphere family composed with loops entering both sides.
    SphereFamilyComposed,
    /// The evaluation family of a closed fibered manifold (all fibers).
    FiberFamily,
    /// The constant-loop cycle of the whole manifold.
    ConstantLoopCycle,
}

impl ConstructionTag {
    pub fn name(&self) -> &'static str {
        match self {
            ConstructionTag::MarkedLoop => "marked_loop",
            ConstructionTag::VerticalTorusFamily => "vertical_torus_family",
            ConstructionTag::SphereFamilyComposed => "sphere_family_composed",
            ConstructionTag::FiberFamily => "fiber_family",
            ConstructionTag::ConstantLoopCycle => "constant_loop_cycle",
        }
    }

    /// The homology degree of a family built this way, before the
    /// suspension.
    pub fn base_degree(&self) -> i64 {
        match self {
            ConstructionTag::MarkedLoop => 0,
            ConstructionTag::VerticalTorusFamily => 1,
            ConstructionTag::SphereFamilyComposed => 1,
            ConstructionTag::FiberFamily => 3,
            ConstructionTag::ConstantLoopCycle => 0,
        }
    }
}

/// One side of a witness pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessClass {
    /// Homology degree of the class as used (after the suspension when
    /// `delta_applied`).
    pub degree: i64,
    /// The free homotopy class the family sweeps.
    pub class_word: GenWord,
    pub construction_tag: ConstructionTag,
    /// Whether the one-dimensional suspension was applied to the family.
    pub delta_applied: bool,
}

/// One term of a product expansion. Signs are deliberately not tracked:
/// every count is taken mod 2, where they cannot matter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub class_word: GenWord,
    pub sign_tracked: bool,
}

/// A witness pair: the two classes and the fixed expansion of their product
/// into free homotopy classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub argument_id: ArgumentId,
    pub a: WitnessClass,
    pub b: WitnessClass,
    pub expansion: Vec<ExpansionTerm>,
}

/// Why a witness operation failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("argument {argument} takes {expected} generators, got {got}")]
    WrongGeneratorCount {
        argument: ArgumentId,
        expected: usize,
        got: usize,
    },
    #[error("witness generators must be distinct and nonempty")]
    BadGenerators,
    #[error("expansion has {terms} terms but {images} images were supplied")]
    LengthMismatch { terms: usize, images: usize },
    #[error("the distinctness criterion needs exactly 4 terms, got {got}")]
    NotFourTerms { got: usize },
    #[error("`{name}` has no image")]
    UnknownSymbol { name: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn class(
    degree_tag: (ConstructionTag, bool),
    word: GenWord,
) -> WitnessClass {
    let (construction_tag, delta_applied) = degree_tag;
    WitnessClass {
        degree: construction_tag.base_degree() + i64::from(delta_applied),
        class_word: word,
        construction_tag,
        delta_applied,
    }
}

/// Builds the witness pair for an argument over the given generator names.
/// The expansion tables are fixed; only the names are substituted.
pub fn build_witness(argument_id: ArgumentId, gens: &[&str]) -> Result<WitnessPair, WitnessError> {
    let expected = argument_id.generator_count();
    if gens.len() != expected {
        return Err(WitnessError::WrongGeneratorCount {
            argument: argument_id,
            expected,
            got: gens.len(),
        });
    }
    {
        let mut sorted: Vec<&str> = gens.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != gens.len() || gens.iter().any(|g| g.is_empty()) {
            return Err(WitnessError::BadGenerators);
        }
    }
    let w = |pairs: &[(&str, i64)]| GenWord::from_pairs(pairs);
    let marked = (ConstructionTag::MarkedLoop, true);
    let (a, b, expansion): (WitnessClass, WitnessClass, Vec<GenWord>) = match argument_id {
        ArgumentId::TwoCurves => {
            let (x1, x2, x3) = (gens[0], gens[1], gens[2]);
            (
                class(marked, w(&[(x1, 1), (x2, 1)])),
                class(marked, w(&[(x2, 1), (x3, 1)])),
                vec![
                    w(&[(x1, 1), (x2, 1), (x3, 1), (x2, 1)]),
                    w(&[(x1, 1), (x2, 1)]),
                    w(&[(x2, 1), (x3, 1)]),
                    GenWord::one(),
                    w(&[(x1, 1), (x2, 2), (x3, 1)]),
                    w(&[(x1, 1), (x2, 1)]),
                    w(&[(x2, 1), (x3, 1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::FigureEight | ArgumentId::NonorientableFigureEight => {
            let (x1, x2) = (gens[0], gens[1]);
            (
                class(marked, w(&[(x1, 1), (x2, -1)])),
                class(marked, w(&[(x1, -1), (x2, 1)])),
                vec![
                    w(&[(x1, 1), (x2, 1), (x1, -1), (x2, -1)]),
                    w(&[(x1, -1), (x2, 1)]),
                    w(&[(x1, 1), (x2, -1)]),
                    GenWord::one(),
                    w(&[(x1, 1), (x2, -1), (x1, -1), (x2, 1)]),
                    w(&[(x1, -1), (x2, 1)]),
                    w(&[(x1, 1), (x2, -1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::ClosedSeifert => {
            let (alpha, h) = (gens[0], gens[1]);
            (
                class((ConstructionTag::FiberFamily, false), w(&[(h, 1)])),
                class(marked, w(&[(alpha, 1)])),
                vec![
                    w(&[(alpha, 1), (h, 1)]),
                    w(&[(h, 1)]),
                    w(&[(alpha, 1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::ConnectedSum => {
            let (g1, g2) = (gens[0], gens[1]);
            (
                class(
                    (ConstructionTag::SphereFamilyComposed, true),
                    w(&[(g1, 1), (g2, 1)]),
                ),
                class(marked, w(&[(g1, 1), (g2, 1)])),
                vec![
                    w(&[(g1, 1), (g2, 1), (g1, 1), (g2, 1)]),
                    w(&[(g1, 1), (g2, 1)]),
                    w(&[(g1, 1), (g2, 1)]),
                    GenWord::one(),
                    w(&[(g2, 1), (g1, 1), (g1, 1), (g2, 1)]),
                    w(&[(g2, 1), (g1, 1)]),
                    w(&[(g1, 1), (g2, 1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::NonseparatingSphere => {
            let (g1, g2) = (gens[0], gens[1]);
            (
                class(
                    (ConstructionTag::SphereFamilyComposed, true),
                    w(&[(g1, 1)]),
                ),
                class(marked, w(&[(g2, 1)])),
                vec![
                    w(&[(g1, 1), (g2, 1)]),
                    w(&[(g1, 1)]),
                    w(&[(g2, 1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::NonseparatingTorus => {
            let (l, h) = (gens[0], gens[1]);
            (
                class(
                    (ConstructionTag::VerticalTorusFamily, true),
                    w(&[(l, 1)]),
                ),
                class(marked, w(&[(h, 1)])),
                vec![
                    w(&[(l, 1), (h, 1)]),
                    w(&[(l, 1)]),
                    w(&[(h, 1)]),
                    GenWord::one(),
                ],
            )
        }
        ArgumentId::HyperbolicGluing => {
            let (h, g1, g2) = (gens[0], gens[1], gens[2]);
            (
                class(marked, w(&[(h, 1)])),
                class(marked, w(&[(g1, 1), (g2, 1)])),
                vec![
                    w(&[(h, 1), (g1, 1), (g2, 1)]),
                    w(&[(h, 1)]),
                    w(&[(g1, 1), (g2, 1)]),
                    GenWord::one(),
                    w(&[(h, 1), (g2, 1), (g1, 1)]),
                    w(&[(h, 1)]),
                    w(&[(g1, 1), (g2, 1)]),
                    GenWord::one(),
                ],
            )
        }
    };
    debug_assert_eq!(a.degree, a.construction_tag.base_degree() + i64::from(a.delta_applied));
    debug_assert_eq!(b.degree, b.construction_tag.base_degree() + i64::from(b.delta_applied));
    Ok(WitnessPair {
        argument_id,
        a,
        b,
        expansion: expansion
            .into_iter()
            .map(|class_word| ExpansionTerm {
                class_word,
                sign_tracked: false,
            })
            .collect(),
    })
}

/// Evaluates a word over named letters with the given images.
pub fn eval_letters(
    word: &GenWord,
    group: &Group,
    images: &BTreeMap<String, NFWord>,
) -> Result<NFWord, WitnessError> {
    let mut acc = group.identity();
    for (name, exp) in &word.0 {
        let img = images
            .get(name)
            .ok_or_else(|| WitnessError::UnknownSymbol { name: name.clone() })?;
        acc = acc.multiply(&img.pow(*exp))?;
    }
    Ok(acc)
}

/// A conjugacy class of expansion-term images that is hit an odd number of
/// times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivor {
    /// Index of the first expansion term in the class.
    pub index: usize,
    /// That term's word (before mapping).
    pub class_word: GenWord,
    /// The canonical cyclic word of the image conjugacy class.
    pub image_class: CyclicWord,
    /// How many expansion terms landed in the class (odd).
    pub multiplicity: usize,
}

/// Partitions the expansion terms by the conjugacy class of their images
/// (`images[i]` is the image of `terms[i]`) and returns the classes with odd
/// multiplicity, in order of first appearance.
pub fn mod2_survivors(
    terms: &[ExpansionTerm],
    images: &[NFWord],
) -> Result<Vec<Survivor>, WitnessError> {
    if terms.len() != images.len() {
        return Err(WitnessError::LengthMismatch {
            terms: terms.len(),
            images: images.len(),
        });
    }
    let mut classes: Vec<(CyclicWord, usize, usize)> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let (cyc, _) = img.cyclically_reduce();
        match classes.iter_mut().find(|(c, _, _)| *c == cyc) {
            Some((_, _, count)) => *count += 1,
            None => classes.push((cyc, i, 1)),
        }
    }
    Ok(classes
        .into_iter()
        .filter(|(_, _, count)| count % 2 == 1)
        .map(|(image_class, index, multiplicity)| Survivor {
            index,
            class_word: terms[index].class_word.clone(),
            image_class,
            multiplicity,
        })
        .collect())
}

/// For a four-term expansion `[ab, a, b, 1]`: whether at least three of the
/// four image conjugacy classes are pairwise distinct. When they are, no
/// cancellation pattern can kill the expansion, so the product is nonzero.
pub fn three_distinct_criterion(
    terms: &[ExpansionTerm],
    images: &[NFWord],
) -> Result<bool, WitnessError> {
    if terms.len() != 4 {
        return Err(WitnessError::NotFourTerms { got: terms.len() });
    }
    if images.len() != 4 {
        return Err(WitnessError::LengthMismatch {
            terms: terms.len(),
            images: images.len(),
        });
    }
    let mut distinct: Vec<CyclicWord> = Vec::new();
    for img in images {
        let (cyc, _) = img.cyclically_reduce();
        if !distinct.contains(&cyc) {
            distinct.push(cyc);
        }
    }
    Ok(distinct.len() >= 3)
}
