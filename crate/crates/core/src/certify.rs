//! Certificates: self-contained, machine-checkable records of why a
//! manifold description was judged to have nontrivial extended loop
//! products (possibly only after passing to an explicit double cover), or
//! why the products vanish.
//!
//! A certificate carries the digest of the input document, a verdict, a
//! list of steps, and free-form scope notes. Every step that makes a
//! mathematical claim is replayed exactly by [`verify`]:
//!
//! * homomorphisms are given by total generator images and re-verified
//!   against every relator of the piece presentation they quotient;
//! * conjugacy, power-conjugacy, and mod-2 class-partition claims are
//!   recomputed with the exact free-product algorithms;
//! * cover steps are re-assembled from the input graph and compared
//!   node-for-node and edge-for-edge;
//! * the two step kinds that import a fact not checked here — `axiom`
//!   (a stated geometric input) and `cited_rule` (a named vanishing rule)
//!   — are restricted to a per-argument whitelist, so a certificate cannot
//!   smuggle in an unchecked claim where an exact computation is expected.
//!
//! Finally, the verifier recomputes the canonical certificate for the
//! input from scratch and requires byte-level agreement, so any edit to a
//! canonical certificate is rejected even if it happens to remain
//! mathematically consistent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covers::{assemble_double_cover, CoverRecipe};
use crate::decomposition::{DecompositionGraph, ManifoldSpec, SeifertPiece, Summand};
use crate::docfmt;
use crate::freeprod::{
    are_conjugate, conjugate_into_cyclic_subgroup_family, Group, NFWord,
};
use crate::presentations::{seifert_presentation, GenWord, QuotientHom};
use crate::witness::{
    build_witness, eval_letters, mod2_survivors, three_distinct_criterion, ArgumentId, Survivor,
    WitnessPair,
};

pub const CERTIFICATE_VERSION: &str = "1";

/// What group a homomorphism is defined on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HomDomain {
    /// The fundamental group of one piece of the current decomposition
    /// graph, presented by [`seifert_presentation`].
    PieceGroup { node: usize },
    /// Free abstract letters (no relations); used by the whole-manifold
    /// models where loops are named directly.
    AbstractLetters,
}

/// A homomorphism into a free product of cyclic groups, spelled out by
/// total generator images so it can be re-verified without trusting the
/// producer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpec {
    pub domain: HomDomain,
    /// Codomain factors as `(name, order)`, order `0` meaning infinite.
    pub codomain: Vec<(String, u32)>,
    /// Image of every domain generator, as a word in the codomain letters.
    pub images: BTreeMap<String, GenWord>,
}

/// Problems turning certificate data back into group elements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("unknown letter `{0}` in a codomain word")]
    UnknownLetter(String),
    #[error("bad codomain: {0}")]
    BadCodomain(String),
    #[error("no decomposition graph in scope for a piece-group homomorphism")]
    NoGraphContext,
    #[error("piece {0} does not exist or is not a fibered piece")]
    BadPiece(usize),
    #[error("homomorphism does not kill every relator: {0}")]
    BadHom(String),
    #[error("cannot apply homomorphism: {0}")]
    Apply(String),
}

/// Converts a normal-form word to its named spelling.
pub fn nf_to_genword(w: &NFWord) -> GenWord {
    let names = w.group().factors();
    GenWord(
        w.letters()
            .iter()
            .map(|l| (names[l.factor].name.clone(), l.exponent))
            .collect(),
    )
}

/// Parses a named word as an element of `group`.
pub fn genword_to_nf(group: &Group, w: &GenWord) -> Result<NFWord, CertifyError> {
    let mut letters = Vec::with_capacity(w.0.len());
    for (name, exp) in &w.0 {
        let idx = group
            .factor_index(name)
            .ok_or_else(|| CertifyError::UnknownLetter(name.clone()))?;
        letters.push((idx, *exp));
    }
    group
        .reduce(&letters)
        .map_err(|e| CertifyError::BadCodomain(e.to_string()))
}

/// A [`HomSpec`] resolved against its domain: ready to apply, with all
/// relator checks already passed.
pub enum ResolvedHom {
    Piece(QuotientHom),
    Letters {
        codomain: Group,
        images: BTreeMap<String, NFWord>,
    },
}

impl ResolvedHom {
    pub fn codomain(&self) -> &Group {
        match self {
            ResolvedHom::Piece(hom) => hom.codomain(),
            ResolvedHom::Letters { codomain, .. } => codomain,
        }
    }

    pub fn apply(&self, word: &GenWord) -> Result<NFWord, CertifyError> {
        match self {
            ResolvedHom::Piece(hom) => hom
                .apply(word)
                .map_err(|e| CertifyError::Apply(e.to_string())),
            ResolvedHom::Letters { codomain, images } => eval_letters(word, codomain, images)
                .map_err(|e| CertifyError::Apply(e.to_string())),
        }
    }
}

impl HomSpec {
    /// Records a verified piece-group quotient.
    pub fn from_quotient(node: usize, hom: &QuotientHom) -> HomSpec {
        let codomain = hom
            .codomain()
            .factors()
            .iter()
            .map(|f| (f.name.clone(), f.order))
            .collect();
        let images = hom
            .images()
            .iter()
            .map(|(k, v)| (k.clone(), nf_to_genword(v)))
            .collect();
        HomSpec {
            domain: HomDomain::PieceGroup { node },
            codomain,
            images,
        }
    }

    /// Records a homomorphism defined on abstract letters.
    pub fn from_letters(codomain: &Group, images: &BTreeMap<String, NFWord>) -> HomSpec {
        HomSpec {
            domain: HomDomain::AbstractLetters,
            codomain: codomain
                .factors()
                .iter()
                .map(|f| (f.name.clone(), f.order))
                .collect(),
            images: images
                .iter()
                .map(|(k, v)| (k.clone(), nf_to_genword(v)))
                .collect(),
        }
    }

    pub fn codomain_group(&self) -> Result<Group, CertifyError> {
        Group::new(self.codomain.clone()).map_err(|e| CertifyError::BadCodomain(e.to_string()))
    }

    /// Rebuilds the homomorphism, re-verifying every relator for
    /// piece-group domains.
    pub fn resolve(&self, graph: Option<&DecompositionGraph>) -> Result<ResolvedHom, CertifyError> {
        let codomain = self.codomain_group()?;
        let mut images: BTreeMap<String, NFWord> = BTreeMap::new();
        for (name, w) in &self.images {
            images.insert(name.clone(), genword_to_nf(&codomain, w)?);
        }
        match &self.domain {
            HomDomain::AbstractLetters => Ok(ResolvedHom::Letters { codomain, images }),
            HomDomain::PieceGroup { node } => {
                let graph = graph.ok_or(CertifyError::NoGraphContext)?;
                let seifert = graph
                    .pieces
                    .get(*node)
                    .and_then(|p| p.as_seifert())
                    .ok_or(CertifyError::BadPiece(*node))?;
                let pres = seifert_presentation(seifert);
                let hom = QuotientHom::from_total_images(&pres, &codomain, images)
                    .map_err(|e| CertifyError::BadHom(e.to_string()))?;
                Ok(ResolvedHom::Piece(hom))
            }
        }
    }
}

/// A geometric input stated, not recomputed, by the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    /// Cusp subgroups of a finite-volume hyperbolic piece are malnormal,
    /// so the abstract-letter model detects conjugacy across the gluing.
    HyperbolicMalnormality,
    /// A fibered piece admits loops whose centralizer pattern matches the
    /// chosen representatives even when no finite cyclic quotient
    /// separates them.
    SeifertCentralizerChoice,
    /// Intersection number with a fixed non-separating torus induces the
    /// homomorphism used by the model.
    HomologicalIntersection,
    /// In a free product of the summand groups, the chosen loops realize
    /// cyclic subgroups of the declared orders.
    AbstractFactorOrder,
}

impl AxiomKind {
    pub fn name(&self) -> &'static str {
        match self {
            AxiomKind::HyperbolicMalnormality => "hyperbolic_malnormality",
            AxiomKind::SeifertCentralizerChoice => "seifert_centralizer_choice",
            AxiomKind::HomologicalIntersection => "homological_intersection",
            AxiomKind::AbstractFactorOrder => "abstract_factor_order",
        }
    }
}

/// A named vanishing rule that settles the verdict without a witness pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitedRuleId {
    /// Manifolds with finite fundamental group have no nontrivial
    /// extended products.
    FiniteFundamentalGroup,
    /// A closed hyperbolic manifold has no essential pair: all products
    /// vanish by the hyperbolicity rule.
    AlgebraicallyHyperbolic,
}

impl CitedRuleId {
    pub fn name(&self) -> &'static str {
        match self {
            CitedRuleId::FiniteFundamentalGroup => "finite_fundamental_group",
            CitedRuleId::AlgebraicallyHyperbolic => "algebraically_hyperbolic",
        }
    }
}

/// One verifiable step of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum CertStep {
    /// The expansion terms of `pair`, mapped through `hom`, partition into
    /// conjugacy classes of which exactly the listed term words survive
    /// with odd multiplicity.
    Mod2Survivors {
        pair: WitnessPair,
        hom: HomSpec,
        survivors: Vec<GenWord>,
    },
    /// At least three of the four expansion-term images lie in pairwise
    /// distinct conjugacy classes, so no cancellation pattern exists.
    ThreeDistinct { pair: WitnessPair, hom: HomSpec },
    /// The images of `w1` and `w2` lie in distinct conjugacy classes.
    QuotientDistinctness {
        hom: HomSpec,
        w1: GenWord,
        w2: GenWord,
    },
    /// `hom` kills the fiber generator, keeps `word` nontrivial, and the
    /// image of `word` is not conjugate to any power of the image of any
    /// boundary generator — the listed family must be the complete
    /// boundary of the piece.
    BoundaryExclusion {
        hom: HomSpec,
        word: GenWord,
        boundary_bases: Vec<GenWord>,
    },
    /// Because `w1` avoids the boundary of the piece (step `exclusion`),
    /// its class and `w2`'s remain distinct and nontrivial in the whole
    /// manifold group.
    InjectivityLemma {
        piece: usize,
        w1: GenWord,
        w2: GenWord,
        exclusion: usize,
    },
    /// Replaces the current decomposition graph by an explicitly assembled
    /// double cover; later piece references point into `output`.
    CoverStep {
        recipe: CoverRecipe,
        input: DecompositionGraph,
        output: DecompositionGraph,
    },
    /// A stated geometric input (whitelisted per argument).
    Axiom { axiom: AxiomKind, statement: String },
    /// A named vanishing rule (whitelisted per manifold shape).
    CitedRule { rule: CitedRuleId },
}

impl CertStep {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CertStep::Mod2Survivors { .. } => "mod2_survivors",
            CertStep::ThreeDistinct { .. } => "three_distinct",
            CertStep::QuotientDistinctness { .. } => "quotient_distinctness",
            CertStep::BoundaryExclusion { .. } => "boundary_exclusion",
            CertStep::InjectivityLemma { .. } => "injectivity_lemma",
            CertStep::CoverStep { .. } => "cover_step",
            CertStep::Axiom { .. } => "axiom",
            CertStep::CitedRule { .. } => "cited_rule",
        }
    }
}

/// The decision the certificate supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// All extended loop products vanish.
    Trivial { reason: String },
    /// The witness pair has a nonzero extended product on the manifold
    /// itself.
    NontrivialOnManifold { pair: Option<WitnessPair> },
    /// The witness pair has a nonzero extended product on the assembled
    /// double cover.
    NontrivialOnDoubleCover {
        recipe: CoverRecipe,
        cover: DecompositionGraph,
        pair: WitnessPair,
    },
}

impl Verdict {
    /// The one-word verdict line printed by tools.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Trivial { .. } => "TRIVIAL",
            Verdict::NontrivialOnManifold { .. } => "NONTRIVIAL_ON_M",
            Verdict::NontrivialOnDoubleCover { .. } => "NONTRIVIAL_ON_DOUBLE_COVER",
        }
    }

    pub fn pair(&self) -> Option<&WitnessPair> {
        match self {
            Verdict::Trivial { .. } => None,
            Verdict::NontrivialOnManifold { pair } => pair.as_ref(),
            Verdict::NontrivialOnDoubleCover { pair, .. } => Some(pair),
        }
    }
}

/// A complete decision record for one manifold document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    /// SHA-256 of the compact canonical input document.
    pub spec_digest: String,
    pub verdict: Verdict,
    pub steps: Vec<CertStep>,
    pub scope_notes: Vec<String>,
}

/// The result of re-checking a certificate. `errors` empty means the
/// certificate verified; `checks` lists every confirmation that ran.
#[derive(Debug, Clone, Default)]
pub struct VerifyOutcome {
    pub checks: Vec<String>,
    pub errors: Vec<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty()
    }

    fn ok(&mut self, msg: impl Into<String>) {
        self.checks.push(msg.into());
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }
}

/// Extracts the generator names of a witness pair, in order, from the
/// first expansion term (every frozen expansion opens with a term that
/// uses all generators in order).
fn pair_generators(pair: &WitnessPair) -> Vec<String> {
    let mut gens: Vec<String> = Vec::new();
    if let Some(t0) = pair.expansion.first() {
        for (name, _) in &t0.class_word.0 {
            if !gens.iter().any(|g| g == name) {
                gens.push(name.clone());
            }
        }
    }
    gens
}

/// Recomputes the frozen expansion for the pair's argument and generator
/// names and requires exact agreement.
fn check_pair_integrity(pair: &WitnessPair, out: &mut VerifyOutcome, at: &str) -> bool {
    let gens = pair_generators(pair);
    let gen_refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    match build_witness(pair.argument_id, &gen_refs) {
        Ok(expected) if expected == *pair => {
            out.ok(format!(
                "{at}: witness pair matches the frozen {} expansion over ({})",
                pair.argument_id.name(),
                gens.join(", ")
            ));
            true
        }
        Ok(_) => {
            out.fail(format!(
                "{at}: witness pair does not match the frozen {} expansion",
                pair.argument_id.name()
            ));
            false
        }
        Err(e) => {
            out.fail(format!("{at}: cannot rebuild witness pair: {e}"));
            false
        }
    }
}

/// Per-step replay state.
struct ReplayState {
    /// Graph that `PieceGroup` nodes refer to (after any cover step).
    graph: Option<DecompositionGraph>,
    /// Recomputed survivors of each `Mod2Survivors` step, by step index.
    mod2: BTreeMap<usize, Vec<Survivor>>,
    cover_steps: Vec<usize>,
}

/// Replays one step's mathematical claims. Returns `false` when the
/// failure invalidates everything after it (context breakage).
fn replay_step(
    index: usize,
    step: &CertStep,
    steps: &[CertStep],
    state: &mut ReplayState,
    out: &mut VerifyOutcome,
) -> bool {
    let at = format!("step {index} ({})", step.kind_name());
    match step {
        CertStep::CoverStep {
            recipe,
            input,
            output,
        } => {
            if !state.cover_steps.is_empty() {
                out.fail(format!("{at}: more than one cover step"));
                return false;
            }
            match &state.graph {
                Some(g) if g == input => out.ok(format!(
                    "{at}: recorded input graph equals the decomposition in scope"
                )),
                Some(_) => {
                    out.fail(format!(
                        "{at}: recorded input graph differs from the decomposition in scope"
                    ));
                    return false;
                }
                None => {
                    out.fail(format!("{at}: no decomposition graph in scope"));
                    return false;
                }
            }
            match assemble_double_cover(input, *recipe) {
                Ok(cover) if cover.output == *output => {
                    out.ok(format!(
                        "{at}: reassembled the {} cover; graphs agree",
                        recipe.name()
                    ));
                    state.graph = Some(output.clone());
                    state.cover_steps.push(index);
                    true
                }
                Ok(_) => {
                    out.fail(format!(
                        "{at}: reassembled {} cover differs from the recorded output",
                        recipe.name()
                    ));
                    false
                }
                Err(e) => {
                    out.fail(format!("{at}: cover does not assemble: {e}"));
                    false
                }
            }
        }
        CertStep::Mod2Survivors {
            pair,
            hom,
            survivors,
        } => {
            if !check_pair_integrity(pair, out, &at) {
                return true;
            }
            let resolved = match hom.resolve(state.graph.as_ref()) {
                Ok(r) => {
                    out.ok(format!("{at}: homomorphism re-verified on every relator"));
                    r
                }
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            let mut images = Vec::new();
            for term in &pair.expansion {
                match resolved.apply(&term.class_word) {
                    Ok(w) => images.push(w),
                    Err(e) => {
                        out.fail(format!("{at}: {e}"));
                        return true;
                    }
                }
            }
            match mod2_survivors(&pair.expansion, &images) {
                Ok(recomputed) => {
                    let words: Vec<GenWord> =
                        recomputed.iter().map(|s| s.class_word.clone()).collect();
                    if words == *survivors {
                        out.ok(format!(
                            "{at}: recomputed odd classes match ({} survivors)",
                            words.len()
                        ));
                        state.mod2.insert(index, recomputed);
                    } else {
                        out.fail(format!(
                            "{at}: recomputed odd classes are [{}], certificate lists [{}]",
                            words
                                .iter()
                                .map(ToString::to_string)
                                .collect::<Vec<_>>()
                                .join(", "),
                            survivors
                                .iter()
                                .map(ToString::to_string)
                                .collect::<Vec<_>>()
                                .join(", ")
                        ));
                    }
                }
                Err(e) => out.fail(format!("{at}: {e}")),
            }
            true
        }
        CertStep::ThreeDistinct { pair, hom } => {
            if !check_pair_integrity(pair, out, &at) {
                return true;
            }
            let resolved = match hom.resolve(state.graph.as_ref()) {
                Ok(r) => {
                    out.ok(format!("{at}: homomorphism re-verified on every relator"));
                    r
                }
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            let mut images = Vec::new();
            for term in &pair.expansion {
                match resolved.apply(&term.class_word) {
                    Ok(w) => images.push(w),
                    Err(e) => {
                        out.fail(format!("{at}: {e}"));
                        return true;
                    }
                }
            }
            match three_distinct_criterion(&pair.expansion, &images) {
                Ok(true) => out.ok(format!(
                    "{at}: at least three of the four image classes are distinct"
                )),
                Ok(false) => out.fail(format!(
                    "{at}: fewer than three distinct image classes; the criterion fails"
                )),
                Err(e) => out.fail(format!("{at}: {e}")),
            }
            true
        }
        CertStep::QuotientDistinctness { hom, w1, w2 } => {
            let resolved = match hom.resolve(state.graph.as_ref()) {
                Ok(r) => r,
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            let (img1, img2) = match (resolved.apply(w1), resolved.apply(w2)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            match are_conjugate(&img1, &img2) {
                Ok(None) => out.ok(format!(
                    "{at}: images of {w1} and {w2} are in distinct conjugacy classes"
                )),
                Ok(Some(_)) => out.fail(format!(
                    "{at}: images of {w1} and {w2} are conjugate; the claim is false"
                )),
                Err(e) => out.fail(format!("{at}: {e}")),
            }
            true
        }
        CertStep::BoundaryExclusion {
            hom,
            word,
            boundary_bases,
        } => {
            let node = match hom.domain {
                HomDomain::PieceGroup { node } => node,
                HomDomain::AbstractLetters => {
                    out.fail(format!(
                        "{at}: boundary exclusion needs a piece-group homomorphism"
                    ));
                    return true;
                }
            };
            let piece: Option<SeifertPiece> = state
                .graph
                .as_ref()
                .and_then(|g| g.pieces.get(node))
                .and_then(|p| p.as_seifert())
                .cloned();
            let piece = match piece {
                Some(p) => p,
                None => {
                    out.fail(format!("{at}: piece {node} is not in scope"));
                    return true;
                }
            };
            let expected_bases: Vec<GenWord> = (1..=piece.boundary)
                .map(|i| GenWord::letter(&format!("d{i}"), 1))
                .collect();
            if *boundary_bases != expected_bases {
                out.fail(format!(
                    "{at}: listed boundary family is not the complete boundary of piece {node}"
                ));
                return true;
            }
            out.ok(format!(
                "{at}: boundary family covers all {} boundary components",
                piece.boundary
            ));
            let resolved = match hom.resolve(state.graph.as_ref()) {
                Ok(r) => r,
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            match resolved.apply(&GenWord::letter("h", 1)) {
                Ok(img) if img.is_identity() => {
                    out.ok(format!("{at}: the fiber generator dies in the quotient"))
                }
                Ok(_) => {
                    out.fail(format!("{at}: the fiber generator survives; exclusion needs it dead"));
                    return true;
                }
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            }
            let img_w = match resolved.apply(word) {
                Ok(w) => w,
                Err(e) => {
                    out.fail(format!("{at}: {e}"));
                    return true;
                }
            };
            if img_w.is_identity() {
                out.fail(format!("{at}: the excluded word dies in the quotient"));
                return true;
            }
            let mut base_images = Vec::new();
            for base in boundary_bases {
                match resolved.apply(base) {
                    Ok(w) => base_images.push(w),
                    Err(e) => {
                        out.fail(format!("{at}: {e}"));
                        return true;
                    }
                }
            }
            match conjugate_into_cyclic_subgroup_family(&img_w, &base_images) {
                Ok(None) => out.ok(format!(
                    "{at}: {word} is not conjugate to any power of any boundary image"
                )),
                Ok(Some(m)) => out.fail(format!(
                    "{at}: {word} is conjugate to boundary base {} to the power {}",
                    m.base_index, m.exponent
                )),
                Err(e) => out.fail(format!("{at}: {e}")),
            }
            true
        }
        CertStep::InjectivityLemma {
            piece,
            w1,
            w2,
            exclusion,
        } => {
            if w1 == w2 {
                out.fail(format!("{at}: the two words are identical"));
                return true;
            }
            if state
                .graph
                .as_ref()
                .map(|g| *piece >= g.pieces.len())
                .unwrap_or(true)
            {
                out.fail(format!("{at}: piece {piece} is not in scope"));
                return true;
            }
            if *exclusion >= index {
                out.fail(format!(
                    "{at}: exclusion reference {exclusion} is not an earlier step"
                ));
                return true;
            }
            match &steps[*exclusion] {
                CertStep::BoundaryExclusion { hom, word, .. } => {
                    if *word != *w1 {
                        out.fail(format!(
                            "{at}: referenced exclusion is about a different word"
                        ));
                    } else if hom.domain != (HomDomain::PieceGroup { node: *piece }) {
                        out.fail(format!(
                            "{at}: referenced exclusion is about a different piece"
                        ));
                    } else {
                        out.ok(format!(
                            "{at}: boundary exclusion for {w1} on piece {piece} is in place"
                        ));
                    }
                }
                CertStep::Axiom {
                    axiom: AxiomKind::HyperbolicMalnormality,
                    ..
                } => out.ok(format!(
                    "{at}: lifting is justified by the stated malnormality input"
                )),
                other => out.fail(format!(
                    "{at}: step {exclusion} ({}) cannot justify the lift",
                    other.kind_name()
                )),
            }
            true
        }
        CertStep::Axiom { axiom, statement } => {
            if statement.trim().is_empty() {
                out.fail(format!("{at}: empty statement"));
            } else {
                out.ok(format!("{at}: stated input `{}`", axiom.name()));
            }
            true
        }
        CertStep::CitedRule { rule } => {
            out.ok(format!("{at}: cites `{}`", rule.name()));
            true
        }
    }
}

/// Checks a cited rule against the actual shape of the manifold.
fn check_cited_rule(rule: CitedRuleId, manifold: &ManifoldSpec, out: &mut VerifyOutcome) {
    let nontrivial: Vec<&Summand> = manifold
        .summands
        .iter()
        .filter(|s| !s.is_simply_connected())
        .collect();
    match rule {
        CitedRuleId::FiniteFundamentalGroup => {
            let finite = match nontrivial.as_slice() {
                [] => true,
                [Summand::FinitePi1 { .. }] => true,
                [Summand::Irreducible { graph }] => {
                    graph.pieces.len() == 1
                        && graph.edges.is_empty()
                        && graph.pieces[0]
                            .as_seifert()
                            .map(|s| {
                                s.boundary == 0
                                    && crate::covers::orbifold_euler(s)
                                        > num_rational::Rational64::from_integer(0)
                            })
                            .unwrap_or(false)
                }
                _ => false,
            };
            if finite {
                out.ok(
                    "cited rule: the fundamental group is indeed finite for this description"
                        .to_string(),
                );
            } else {
                out.fail(
                    "cited rule finite_fundamental_group does not apply to this manifold"
                        .to_string(),
                );
            }
        }
        CitedRuleId::AlgebraicallyHyperbolic => {
            if matches!(nontrivial.as_slice(), [Summand::ClosedHyperbolic]) {
                out.ok("cited rule: the manifold is a single closed hyperbolic summand".to_string());
            } else {
                out.fail(
                    "cited rule algebraically_hyperbolic does not apply to this manifold"
                        .to_string(),
                );
            }
        }
    }
}

/// Which stated inputs each argument may use.
fn allowed_axioms(argument: ArgumentId) -> &'static [AxiomKind] {
    match argument {
        ArgumentId::TwoCurves
        | ArgumentId::FigureEight
        | ArgumentId::NonorientableFigureEight
        | ArgumentId::NonseparatingSphere => &[],
        ArgumentId::ClosedSeifert => &[AxiomKind::SeifertCentralizerChoice],
        ArgumentId::ConnectedSum => &[AxiomKind::AbstractFactorOrder],
        ArgumentId::NonseparatingTorus => &[AxiomKind::HomologicalIntersection],
        ArgumentId::HyperbolicGluing => &[
            AxiomKind::HyperbolicMalnormality,
            AxiomKind::SeifertCentralizerChoice,
        ],
    }
}

/// Checks that the step list has exactly the shape the argument calls for
/// and that the steps quote each other consistently.
fn check_entailment(cert: &Certificate, state: &ReplayState, out: &mut VerifyOutcome) {
    // Cover steps are only allowed with a double-cover verdict, at index 0.
    match &cert.verdict {
        Verdict::NontrivialOnDoubleCover {
            recipe,
            cover,
            pair,
        } => {
            match cert.steps.first() {
                Some(CertStep::CoverStep {
                    recipe: r, output, ..
                }) => {
                    if r != recipe {
                        out.fail("verdict cover recipe differs from the cover step".to_string());
                    }
                    if output != cover {
                        out.fail("verdict cover graph differs from the cover step output".to_string());
                    }
                }
                _ => out.fail("double-cover verdict without a leading cover step".to_string()),
            }
            if state.cover_steps != vec![0] {
                out.fail("expected exactly one cover step, at the front".to_string());
                return;
            }
            check_argument_shape(pair, &cert.steps[1..], 1, state, out);
        }
        Verdict::NontrivialOnManifold { pair } => {
            if !state.cover_steps.is_empty() {
                out.fail("cover step present but the verdict is about the manifold itself".to_string());
                return;
            }
            match pair {
                Some(p) => check_argument_shape(p, &cert.steps, 0, state, out),
                None => out.fail("nontrivial verdict without a witness pair".to_string()),
            }
        }
        Verdict::Trivial { reason } => {
            if reason.trim().is_empty() {
                out.fail("trivial verdict without a reason".to_string());
            }
            match cert.steps.as_slice() {
                [CertStep::CitedRule { .. }] => {
                    out.ok("trivial verdict rests on exactly one cited rule".to_string())
                }
                _ => out.fail(
                    "a trivial verdict must consist of exactly one cited rule".to_string(),
                ),
            }
        }
    }

    // Axiom whitelist, judged against the verdict's argument.
    if let Some(pair) = cert.verdict.pair() {
        let allowed = allowed_axioms(pair.argument_id);
        for (i, step) in cert.steps.iter().enumerate() {
            if let CertStep::Axiom { axiom, .. } = step {
                if !allowed.contains(axiom) {
                    out.fail(format!(
                        "step {i}: axiom `{}` is not allowed in a {} argument",
                        axiom.name(),
                        pair.argument_id.name()
                    ));
                }
            }
        }
    }
}

/// The expected step shape for each argument, applied to the steps after
/// any cover step. `base` is the absolute index of `steps[0]`.
fn check_argument_shape(
    pair: &WitnessPair,
    steps: &[CertStep],
    base: usize,
    state: &ReplayState,
    out: &mut VerifyOutcome,
) {
    let arg = pair.argument_id;
    match arg {
        ArgumentId::TwoCurves | ArgumentId::FigureEight | ArgumentId::NonorientableFigureEight => {
            match steps {
                [CertStep::Mod2Survivors {
                    pair: mp,
                    hom: mh,
                    survivors,
                }, CertStep::QuotientDistinctness { hom: qh, w1, w2 }, CertStep::BoundaryExclusion {
                    hom: bh,
                    word,
                    ..
                }, CertStep::InjectivityLemma {
                    piece,
                    w1: iw1,
                    w2: iw2,
                    exclusion,
                }] => {
                    if mp != pair {
                        out.fail("mod-2 step is about a different pair than the verdict".to_string());
                    }
                    if survivors.len() != 2 {
                        out.fail(format!(
                            "piece-level argument needs exactly two surviving classes, found {}",
                            survivors.len()
                        ));
                    }
                    if let Some(survs) = state.mod2.get(&base) {
                        for s in survs {
                            if s.multiplicity != 1 {
                                out.fail(format!(
                                    "surviving class {} has multiplicity {}, expected 1",
                                    s.class_word, s.multiplicity
                                ));
                            }
                        }
                    }
                    if qh != mh || bh != mh {
                        out.fail("all piece-level steps must use the same homomorphism".to_string());
                    }
                    if survivors.first() != Some(w1) || survivors.get(1) != Some(w2) {
                        out.fail("distinctness words are not the two survivors".to_string());
                    }
                    if word != w1 || iw1 != w1 || iw2 != w2 {
                        out.fail("exclusion and lifting steps must quote the survivors".to_string());
                    }
                    if *exclusion != base + 2 {
                        out.fail("the lift must reference the boundary-exclusion step".to_string());
                    }
                    if mh.domain != (HomDomain::PieceGroup { node: *piece }) {
                        out.fail("the lift names a different piece than the homomorphism".to_string());
                    }
                    out.ok(format!("{} argument has the required step shape", arg.name()));
                }
                _ => out.fail(format!(
                    "{} argument must consist of mod-2 survivors, distinctness, boundary exclusion, and the lift",
                    arg.name()
                )),
            }
        }
        ArgumentId::ClosedSeifert => match steps {
            [CertStep::ThreeDistinct { pair: tp, .. }] => {
                if tp != pair {
                    out.fail("criterion step is about a different pair than the verdict".to_string());
                } else {
                    out.ok("closed-fibered argument has the required step shape".to_string());
                }
            }
            [CertStep::Axiom {
                axiom: AxiomKind::SeifertCentralizerChoice,
                ..
            }] => {
                // No finite cyclic quotient separates the classes; the
                // stated input stands in. Pair integrity is checked here
                // since no computational step carries the pair.
                check_pair_integrity(pair, out, "verdict pair");
                out.ok("closed-fibered argument falls back to the stated input".to_string());
            }
            _ => out.fail(
                "closed-fibered argument must be one criterion step or one stated input"
                    .to_string(),
            ),
        },
        ArgumentId::ConnectedSum => match steps {
            [CertStep::Mod2Survivors {
                pair: mp,
                hom: mh,
                survivors,
            }, CertStep::QuotientDistinctness { hom: qh, w1, w2 }, CertStep::Axiom {
                axiom: AxiomKind::AbstractFactorOrder,
                ..
            }] => {
                if mp != pair {
                    out.fail("mod-2 step is about a different pair than the verdict".to_string());
                }
                if qh != mh {
                    out.fail("distinctness must use the mod-2 homomorphism".to_string());
                }
                if survivors.len() != 2
                    || survivors.first() != Some(w1)
                    || survivors.get(1) != Some(w2)
                {
                    out.fail("distinctness words are not the two survivors".to_string());
                }
                out.ok("summand argument has the required step shape".to_string());
            }
            _ => out.fail(
                "summand argument must be mod-2 survivors, distinctness, and the factor-order input"
                    .to_string(),
            ),
        },
        ArgumentId::NonseparatingSphere => match steps {
            [CertStep::ThreeDistinct { pair: tp, .. }] => {
                if tp != pair {
                    out.fail("criterion step is about a different pair than the verdict".to_string());
                } else {
                    out.ok("crossing-sphere argument has the required step shape".to_string());
                }
            }
            _ => out.fail("crossing-sphere argument must be one criterion step".to_string()),
        },
        ArgumentId::NonseparatingTorus => match steps {
            [CertStep::ThreeDistinct { pair: tp, .. }, CertStep::Axiom {
                axiom: AxiomKind::HomologicalIntersection,
                ..
            }] => {
                if tp != pair {
                    out.fail("criterion step is about a different pair than the verdict".to_string());
                } else {
                    out.ok("crossing-torus argument has the required step shape".to_string());
                }
            }
            _ => out.fail(
                "crossing-torus argument must be the criterion step plus the intersection input"
                    .to_string(),
            ),
        },
        ArgumentId::HyperbolicGluing => {
            let core: &[CertStep] = if steps.len() == 5 {
                &steps[..4]
            } else {
                steps
            };
            if steps.len() == 5 {
                match &steps[4] {
                    CertStep::Axiom {
                        axiom: AxiomKind::SeifertCentralizerChoice,
                        ..
                    } => {}
                    _ => {
                        out.fail(
                            "the optional fifth step must be the centralizer input".to_string(),
                        );
                        return;
                    }
                }
            }
            match core {
                [CertStep::Mod2Survivors {
                    pair: mp,
                    hom: mh,
                    survivors,
                }, CertStep::QuotientDistinctness { hom: qh, w1, w2 }, CertStep::Axiom {
                    axiom: AxiomKind::HyperbolicMalnormality,
                    ..
                }, CertStep::InjectivityLemma {
                    w1: iw1,
                    w2: iw2,
                    exclusion,
                    ..
                }] => {
                    if mp != pair {
                        out.fail("mod-2 step is about a different pair than the verdict".to_string());
                    }
                    if qh != mh {
                        out.fail("distinctness must use the mod-2 homomorphism".to_string());
                    }
                    if survivors.len() != 2
                        || survivors.first() != Some(w1)
                        || survivors.get(1) != Some(w2)
                    {
                        out.fail("distinctness words are not the two survivors".to_string());
                    }
                    if iw1 != w1 || iw2 != w2 {
                        out.fail("the lift must quote the survivors".to_string());
                    }
                    if *exclusion != base + 2 {
                        out.fail("the lift must reference the malnormality input".to_string());
                    }
                    out.ok("gluing argument has the required step shape".to_string());
                }
                _ => out.fail(
                    "gluing argument must be mod-2 survivors, distinctness, the malnormality input, and the lift"
                        .to_string(),
                ),
            }
        }
    }
}

/// Re-checks a certificate against the manifold description it claims to
/// be about. All mathematical claims are recomputed; the certificate must
/// also equal the canonical certificate for the description.
pub fn verify(cert: &Certificate, manifold: &ManifoldSpec) -> VerifyOutcome {
    let mut out = VerifyOutcome::default();

    if cert.version != CERTIFICATE_VERSION {
        out.fail(format!(
            "unsupported certificate version `{}`",
            cert.version
        ));
        return out;
    }

    let digest = docfmt::spec_digest(manifold);
    if digest == cert.spec_digest {
        out.ok("input digest matches the certificate".to_string());
    } else {
        out.fail(format!(
            "certificate is for a different input: digest {} vs {}",
            cert.spec_digest, digest
        ));
        return out;
    }

    // The certificate must be the canonical one for this input.
    match crate::decide::decide(manifold) {
        Ok(expected) => {
            if expected == *cert {
                out.ok("certificate equals the canonical certificate for this input".to_string());
            } else {
                if expected.verdict != cert.verdict {
                    out.fail(format!(
                        "verdict {} differs from the canonical verdict {}",
                        cert.verdict.label(),
                        expected.verdict.label()
                    ));
                }
                if expected.steps.len() != cert.steps.len() {
                    out.fail(format!(
                        "certificate has {} steps, canonical has {}",
                        cert.steps.len(),
                        expected.steps.len()
                    ));
                } else {
                    for (i, (got, want)) in cert.steps.iter().zip(&expected.steps).enumerate() {
                        if got != want {
                            out.fail(format!("step {i} deviates from the canonical certificate"));
                        }
                    }
                }
                if expected.scope_notes != cert.scope_notes {
                    out.fail("scope notes deviate from the canonical certificate".to_string());
                }
                if out.errors.is_empty() {
                    out.fail("certificate deviates from the canonical certificate".to_string());
                }
            }
        }
        Err(e) => {
            out.fail(format!("the input itself does not classify: {e}"));
            return out;
        }
    }

    // Independent replay of every step.
    let initial_graph = {
        let irreducibles: Vec<&DecompositionGraph> = manifold
            .summands
            .iter()
            .filter_map(|s| match s {
                Summand::Irreducible { graph } => Some(graph),
                _ => None,
            })
            .collect();
        if irreducibles.len() == 1 {
            let (normalized, _) = crate::decomposition::normalize_moebius(irreducibles[0]);
            Some(normalized)
        } else {
            None
        }
    };
    let mut state = ReplayState {
        graph: initial_graph,
        mod2: BTreeMap::new(),
        cover_steps: Vec::new(),
    };
    for (i, step) in cert.steps.iter().enumerate() {
        if !replay_step(i, step, &cert.steps, &mut state, &mut out) {
            return out;
        }
    }

    // Cited rules are checked against the manifold shape.
    for step in &cert.steps {
        if let CertStep::CitedRule { rule } = step {
            check_cited_rule(*rule, manifold, &mut out);
        }
    }

    check_entailment(cert, &state, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{quotient_map, GroupPresentation};

    #[test]
    fn word_conversion_roundtrip() {
        let g = Group::new(vec![("x1", 3u32), ("x2", 0u32)]).unwrap();
        let w = g
            .reduce(&[(0, 2), (1, -3), (0, 1)])
            .unwrap();
        let gen = nf_to_genword(&w);
        assert_eq!(gen.to_string(), "x1^2.x2^-3.x1^1");
        let back = genword_to_nf(&g, &gen).unwrap();
        assert_eq!(back, w);
        assert!(genword_to_nf(&g, &GenWord::letter("zz", 1)).is_err());
    }

    #[test]
    fn hom_spec_roundtrip_through_resolution() {
        // A solid-torus-like presentation quotient recorded and replayed.
        let piece = SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]);
        let pres = seifert_presentation(&piece);
        let codomain = Group::new(vec![("x1", 2u32), ("x2", 3u32)]).unwrap();
        let images = BTreeMap::from([
            ("c1".to_string(), codomain.letter(0, 1).unwrap()),
            ("c2".to_string(), codomain.letter(1, 1).unwrap()),
        ]);
        let partial = quotient_map(&pres, &["c1", "c2", "d1"], &codomain, images).unwrap();
        let long = pres.relators.last().unwrap().clone();
        let hom = partial.eliminate_generator(&long, "d1").unwrap();
        assert!(hom.is_verified());

        let spec = HomSpec::from_quotient(0, &hom);
        assert_eq!(spec.domain, HomDomain::PieceGroup { node: 0 });
        let graph = DecompositionGraph {
            pieces: vec![crate::decomposition::Piece::Seifert(piece)],
            edges: vec![],
        };
        let resolved = spec.resolve(Some(&graph)).unwrap();
        let w = GenWord::from_pairs(&[("c1", 1), ("c2", 1)]);
        assert_eq!(resolved.apply(&w).unwrap(), hom.apply(&w).unwrap());

        // Tampering with an image breaks a relator and resolution fails.
        let mut bad = spec.clone();
        bad.images
            .insert("c1".to_string(), GenWord::letter("x2", 1));
        assert!(matches!(
            bad.resolve(Some(&graph)),
            Err(CertifyError::BadHom(_))
        ));
    }

    #[test]
    fn step_serialization_uses_stable_tags() {
        let step = CertStep::Axiom {
            axiom: AxiomKind::AbstractFactorOrder,
            statement: "stated".to_string(),
        };
        let v = serde_json::to_value(&step).unwrap();
        assert_eq!(v["step"], "axiom");
        assert_eq!(v["axiom"], "abstract_factor_order");
        let rule = CertStep::CitedRule {
            rule: CitedRuleId::FiniteFundamentalGroup,
        };
        let v = serde_json::to_value(&rule).unwrap();
        assert_eq!(v["rule"], "finite_fundamental_group");
        let back: CertStep = serde_json::from_value(v).unwrap();
        assert_eq!(back, rule);
    }

    #[test]
    fn verdict_labels() {
        assert_eq!(
            Verdict::Trivial {
                reason: "r".into()
            }
            .label(),
            "TRIVIAL"
        );
        assert_eq!(
            Verdict::NontrivialOnManifold { pair: None }.label(),
            "NONTRIVIAL_ON_M"
        );
    }

    #[test]
    fn pair_generator_extraction() {
        let pair = build_witness(ArgumentId::TwoCurves, &["c1", "d1", "d2"]).unwrap();
        assert_eq!(pair_generators(&pair), vec!["c1", "d1", "d2"]);
        let pair = build_witness(ArgumentId::ClosedSeifert, &["a1", "h"]).unwrap();
        assert_eq!(pair_generators(&pair), vec!["a1", "h"]);
        let _ = GroupPresentation {
            generators: vec![],
            relators: vec![],
        };
    }
}
