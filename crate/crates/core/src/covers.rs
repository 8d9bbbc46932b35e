//! Double covers of fibered pieces and of piece graphs, with exact Euler
//! bookkeeping.
//!
//! Piece-level recipes (each input is one [`SeifertPiece`], each output a
//! [`SeifertCover`] recording where every boundary slot of the cover lies
//! over the base):
//!
//! - [`orientation_double_cover`]: the fiberwise orientation double cover of
//!   a piece with nonorientable base. Crosscap count `g` becomes orientable
//!   genus `g - 1`, every boundary torus and every exceptional fiber gets two
//!   copies.
//! - [`pants_cover`]: for a genus-0 piece with two boundary tori and a single
//!   multiplicity-2 fiber, the double cover branched so the exceptional point
//!   unwinds: the base becomes a pair of pants (three boundary tori, no
//!   exceptional fibers). One chosen boundary torus (the *involution slot*)
//!   is covered by one torus of degree 2; the other is covered by two tori of
//!   degree 1.
//! - [`unfold_cover`]: for a genus-0 piece with one boundary torus and two
//!   exceptional fibers, one of multiplicity 2, the double cover that unfolds
//!   across the multiplicity-2 point: the other fiber `(r, s)` appears twice
//!   and the boundary torus is covered once with degree 2.
//! - [`annulus_cover`]: for a genus-0 piece with one boundary torus and two
//!   multiplicity-2 fibers, the double cover with annulus base: no
//!   exceptional fibers, two boundary tori of degree 1.
//!
//! Graph-level recipes ([`assemble_double_cover`]) build a double cover of a
//! whole graph out of the piece-level ones, duplicating every other piece and
//! wiring lifted edges deterministically (the first lift of one endpoint
//! joins the first lift of the other):
//!
//! - [`CoverRecipe::ChainDouble`]: a path of three or more small pieces;
//!   unfolds the lower-indexed end and takes the pants cover of its
//!   neighbor, so the cover contains a three-boundary piece.
//! - [`CoverRecipe::PairDouble`]: two small pieces where some multiplicity
//!   differs from 2; unfolds both, so the cover contains a piece with two
//!   equal fibers of multiplicity at least 3.
//! - [`CoverRecipe::CycleDouble`]: two pieces with all multiplicities 2;
//!   takes annulus covers of both, producing a two-node cycle — the cover
//!   has a non-separating gluing torus.
//! - [`CoverRecipe::ReorientDouble`]: the fiberwise orientation cover at a
//!   designated nonorientable piece (also usable for a single closed
//!   nonorientable piece), all other pieces duplicated.
//!
//! Every assembly is checked on construction: the cover validates as a piece
//! graph, its total orbifold Euler number is exactly twice the base one
//! (rational arithmetic, no rounding), and the lifts of each base edge have
//! total degree 2.

use crate::decomposition::{
    self, DecompositionGraph, GluedCase, GluingEdge, ManifoldSpec, Piece, SeifertPiece,
    SmallPattern, Summand,
};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Orbifold Euler number of the base orbifold of a fibered piece:
/// `2 - 2g - b - sum(1 - 1/alpha)` for an orientable base of genus `g`, and
/// `2 - g - b - sum(1 - 1/alpha)` for a nonorientable base with `g`
/// crosscaps.
pub fn orbifold_euler(piece: &SeifertPiece) -> Rational64 {
    let surface = if piece.base_orientable {
        2 - 2 * i64::from(piece.genus) - i64::from(piece.boundary)
    } else {
        2 - i64::from(piece.genus) - i64::from(piece.boundary)
    };
    let mut chi = Rational64::from_integer(surface);
    for &(alpha, _) in &piece.fibers {
        chi -= Rational64::new(i64::from(alpha) - 1, i64::from(alpha));
    }
    chi
}

/// A named double-cover recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverRecipe {
    Orientation,
    Pants,
    Unfold,
    Annulus,
    ChainDouble,
    PairDouble,
    CycleDouble,
    ReorientDouble,
}

impl CoverRecipe {
    pub const ALL: [CoverRecipe; 8] = [
        CoverRecipe::Orientation,
        CoverRecipe::Pants,
        CoverRecipe::Unfold,
        CoverRecipe::Annulus,
        CoverRecipe::ChainDouble,
        CoverRecipe::PairDouble,
        CoverRecipe::CycleDouble,
        CoverRecipe::ReorientDouble,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CoverRecipe::Orientation => "orientation",
            CoverRecipe::Pants => "pants",
            CoverRecipe::Unfold => "unfold",
            CoverRecipe::Annulus => "annulus",
            CoverRecipe::ChainDouble => "chain_double",
            CoverRecipe::PairDouble => "pair_double",
            CoverRecipe::CycleDouble => "cycle_double",
            CoverRecipe::ReorientDouble => "reorient_double",
        }
    }

    pub fn from_name(name: &str) -> Option<CoverRecipe> {
        CoverRecipe::ALL.iter().copied().find(|r| r.name() == name)
    }

    /// Whether the recipe acts on a single piece (as opposed to a graph).
    pub fn is_piece_level(&self) -> bool {
        matches!(
            self,
            CoverRecipe::Orientation
                | CoverRecipe::Pants
                | CoverRecipe::Unfold
                | CoverRecipe::Annulus
        )
    }
}

impl fmt::Display for CoverRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a cover could not be built.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("recipe `{recipe}` does not apply: {reason}")]
    NotApplicable { recipe: CoverRecipe, reason: String },
    #[error("involution slot {slot} out of range (piece has {boundary} boundary tori)")]
    BadInvolutionSlot { slot: u32, boundary: u32 },
    #[error("internal cover check failed: {0}")]
    Check(String),
}

fn not_applicable(recipe: CoverRecipe, reason: impl Into<String>) -> CoverError {
    CoverError::NotApplicable {
        recipe,
        reason: reason.into(),
    }
}

/// A double cover of a single piece. `slot_map[cover_slot]` records which
/// base boundary slot each cover boundary torus lies over and the degree (1
/// or 2) of the covering restricted to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertCover {
    pub total: SeifertPiece,
    pub slot_map: Vec<(u32, u32)>,
}

impl SeifertCover {
    /// The lifts of a base slot: `(cover_slot, degree)` pairs, in slot
    /// order. Their degrees sum to 2.
    pub fn lifts_of(&self, base_slot: u32) -> Vec<(u32, u32)> {
        self.slot_map
            .iter()
            .enumerate()
            .filter(|(_, (b, _))| *b == base_slot)
            .map(|(s, (_, d))| (s as u32, *d))
            .collect()
    }

    fn check_degrees(self, base: &SeifertPiece) -> Result<SeifertCover, CoverError> {
        for slot in 0..base.boundary {
            let total: u32 = self.lifts_of(slot).iter().map(|(_, d)| d).sum();
            if total != 2 {
                return Err(CoverError::Check(format!(
                    "lifts of base slot {} have total degree {}, want 2",
                    slot, total
                )));
            }
        }
        if orbifold_euler(&self.total) != Rational64::from_integer(2) * orbifold_euler(base) {
            return Err(CoverError::Check(
                "cover Euler number is not twice the base one".into(),
            ));
        }
        Ok(self)
    }
}

/// Fiberwise orientation double cover of a piece with nonorientable base.
pub fn orientation_double_cover(piece: &SeifertPiece) -> Result<SeifertCover, CoverError> {
    let recipe = CoverRecipe::Orientation;
    if piece.base_orientable {
        return Err(not_applicable(recipe, "the base is already orientable"));
    }
    let mut fibers = Vec::new();
    for &f in &piece.fibers {
        fibers.push(f);
        fibers.push(f);
    }
    let total = SeifertPiece::orientable(piece.genus - 1, 2 * piece.boundary, &fibers);
    let slot_map = (0..piece.boundary)
        .flat_map(|j| [(j, 1), (j, 1)])
        .collect();
    SeifertCover { total, slot_map }.check_degrees(piece)
}

/// Pair-of-pants double cover of a genus-0 piece with two boundary tori and
/// one multiplicity-2 fiber. The torus at `involution_slot` is covered with
/// degree 2; the other torus gets two degree-1 lifts.
pub fn pants_cover(piece: &SeifertPiece, involution_slot: u32) -> Result<SeifertCover, CoverError> {
    let recipe = CoverRecipe::Pants;
    if !(piece.base_orientable
        && piece.genus == 0
        && piece.boundary == 2
        && piece.fibers == [(2, 1)])
    {
        return Err(not_applicable(
            recipe,
            "need an orientable genus-0 piece with two boundary tori and fibers exactly [(2,1)]",
        ));
    }
    if involution_slot >= piece.boundary {
        return Err(CoverError::BadInvolutionSlot {
            slot: involution_slot,
            boundary: piece.boundary,
        });
    }
    let other = 1 - involution_slot;
    let total = SeifertPiece::orientable(0, 3, &[]);
    let slot_map = vec![(involution_slot, 2), (other, 1), (other, 1)];
    SeifertCover { total, slot_map }.check_degrees(piece)
}

/// Unfolding double cover of a genus-0 piece with one boundary torus and two
/// exceptional fibers, at least one of multiplicity 2: the first
/// multiplicity-2 fiber unwinds and the other fiber appears twice.
pub fn unfold_cover(piece: &SeifertPiece) -> Result<SeifertCover, CoverError> {
    let recipe = CoverRecipe::Unfold;
    if !(piece.base_orientable && piece.genus == 0 && piece.boundary == 1) {
        return Err(not_applicable(
            recipe,
            "need an orientable genus-0 piece with one boundary torus",
        ));
    }
    let [f1, f2] = piece.fibers.as_slice() else {
        return Err(not_applicable(recipe, "need exactly two exceptional fibers"));
    };
    let double = if *f1 == (2, 1) {
        *f2
    } else if *f2 == (2, 1) {
        *f1
    } else {
        return Err(not_applicable(recipe, "need a fiber of multiplicity 2"));
    };
    let total = SeifertPiece::orientable(0, 1, &[double, double]);
    SeifertCover {
        total,
        slot_map: vec![(0, 2)],
    }
    .check_degrees(piece)
}

/// Annulus double cover of a genus-0 piece with one boundary torus and two
/// multiplicity-2 fibers: both exceptional points unwind, the boundary torus
/// gets two degree-1 lifts.
pub fn annulus_cover(piece: &SeifertPiece) -> Result<SeifertCover, CoverError> {
    let recipe = CoverRecipe::Annulus;
    if !(piece.base_orientable
        && piece.genus == 0
        && piece.boundary == 1
        && piece.fibers == [(2, 1), (2, 1)])
    {
        return Err(not_applicable(
            recipe,
            "need an orientable genus-0 piece with one boundary torus and fibers [(2,1),(2,1)]",
        ));
    }
    let total = SeifertPiece::orientable(0, 2, &[]);
    SeifertCover {
        total,
        slot_map: vec![(0, 1), (0, 1)],
    }
    .check_degrees(piece)
}

/// Applies a piece-level recipe by name.
pub fn piece_cover(
    piece: &SeifertPiece,
    recipe: CoverRecipe,
    involution_slot: u32,
) -> Result<SeifertCover, CoverError> {
    match recipe {
        CoverRecipe::Orientation => orientation_double_cover(piece),
        CoverRecipe::Pants => pants_cover(piece, involution_slot),
        CoverRecipe::Unfold => unfold_cover(piece),
        CoverRecipe::Annulus => annulus_cover(piece),
        other => Err(not_applicable(other, "this is a graph-level recipe")),
    }
}

/// A double cover of a piece graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCover {
    pub recipe: CoverRecipe,
    pub output: DecompositionGraph,
    /// `node_map[cover_node]` is the base node it lies over.
    pub node_map: Vec<usize>,
    /// `edge_map[cover_edge]` is `(base_edge, degree)`.
    pub edge_map: Vec<(usize, u32)>,
}

/// How one base node expands in the cover.
enum Expansion {
    /// One cover node; `lifts[base_slot]` lists its `(cover_slot, degree)`
    /// lifts.
    One {
        index: usize,
        lifts: Vec<Vec<(u32, u32)>>,
    },
    /// Two untouched copies of the base piece.
    Two { index0: usize, index1: usize },
}

/// Wires lifted edges: a degree-2 lift joins a degree-2 lift; a pair of
/// degree-1 lifts joins a pair of degree-1 lifts first-to-first.
fn wire(
    recipe: CoverRecipe,
    base: &DecompositionGraph,
    expansions: &[Expansion],
    cover_nodes: Vec<Piece>,
    node_map: Vec<usize>,
) -> Result<GraphCover, CoverError> {
    let lifts_of = |node: usize, slot: u32| -> Vec<(usize, u32, u32)> {
        match &expansions[node] {
            Expansion::One { index, lifts, .. } => lifts[slot as usize]
                .iter()
                .map(|&(s, d)| (*index, s, d))
                .collect(),
            Expansion::Two { index0, index1 } => {
                vec![(*index0, slot, 1), (*index1, slot, 1)]
            }
        }
    };
    let mut edges = Vec::new();
    let mut edge_map = Vec::new();
    for (ei, e) in base.edges.iter().enumerate() {
        let lu = lifts_of(e.0, e.1);
        let lv = lifts_of(e.2, e.3);
        match (lu.as_slice(), lv.as_slice()) {
            ([(un, us, 2)], [(vn, vs, 2)]) => {
                edges.push(GluingEdge(*un, *us, *vn, *vs));
                edge_map.push((ei, 2));
            }
            ([(un0, us0, 1), (un1, us1, 1)], [(vn0, vs0, 1), (vn1, vs1, 1)]) => {
                edges.push(GluingEdge(*un0, *us0, *vn0, *vs0));
                edge_map.push((ei, 1));
                edges.push(GluingEdge(*un1, *us1, *vn1, *vs1));
                edge_map.push((ei, 1));
            }
            _ => {
                return Err(CoverError::Check(format!(
                    "edge {} lifts with mismatched degrees",
                    ei
                )))
            }
        }
    }
    let output = DecompositionGraph {
        pieces: cover_nodes,
        edges,
    };
    let cover = GraphCover {
        recipe,
        output,
        node_map,
        edge_map,
    };
    check_graph_cover(base, &cover)?;
    Ok(cover)
}

fn seifert(piece: &Piece) -> &SeifertPiece {
    piece
        .as_seifert()
        .expect("assemblies only run on all-fibered graphs")
}

fn check_graph_cover(base: &DecompositionGraph, cover: &GraphCover) -> Result<(), CoverError> {
    // The cover must itself be a valid closed piece graph.
    let as_spec = ManifoldSpec {
        summands: vec![Summand::Irreducible {
            graph: cover.output.clone(),
        }],
    };
    if let Err(errs) = decomposition::validate(&as_spec) {
        return Err(CoverError::Check(format!(
            "cover graph fails validation: {}",
            errs[0]
        )));
    }
    // Exact doubling of the total orbifold Euler number.
    let base_chi: Rational64 = base.pieces.iter().map(|p| orbifold_euler(seifert(p))).sum();
    let cover_chi: Rational64 = cover
        .output
        .pieces
        .iter()
        .map(|p| orbifold_euler(seifert(p)))
        .sum();
    if cover_chi != Rational64::from_integer(2) * base_chi {
        return Err(CoverError::Check(format!(
            "cover Euler number {} is not twice the base {}",
            cover_chi, base_chi
        )));
    }
    // Every base edge must be covered with total degree 2.
    for ei in 0..base.edges.len() {
        let total: u32 = cover
            .edge_map
            .iter()
            .filter(|(b, _)| *b == ei)
            .map(|(_, d)| d)
            .sum();
        if total != 2 {
            return Err(CoverError::Check(format!(
                "base edge {} is covered with total degree {}, want 2",
                ei, total
            )));
        }
    }
    Ok(())
}

/// Builds the double cover of a piece graph by the given graph-level recipe.
/// The recipe re-derives which pieces it acts on, so the construction is a
/// function of `(graph, recipe)` alone and can be replayed by a verifier.
pub fn assemble_double_cover(
    graph: &DecompositionGraph,
    recipe: CoverRecipe,
) -> Result<GraphCover, CoverError> {
    match recipe {
        CoverRecipe::ChainDouble => assemble_chain(graph),
        CoverRecipe::PairDouble => assemble_pair(graph),
        CoverRecipe::CycleDouble => assemble_cycle(graph),
        CoverRecipe::ReorientDouble => assemble_reorient(graph),
        other => Err(not_applicable(other, "this is a piece-level recipe")),
    }
}

/// Lays out expansions: the given special nodes first (in the given order),
/// then two copies of every other node, in ascending base order.
fn layout(
    base: &DecompositionGraph,
    special: Vec<(usize, SeifertPiece, Vec<Vec<(u32, u32)>>)>,
) -> (Vec<Expansion>, Vec<Piece>, Vec<usize>) {
    let mut expansions: Vec<Option<Expansion>> = (0..base.pieces.len()).map(|_| None).collect();
    let mut cover_nodes = Vec::new();
    let mut node_map = Vec::new();
    for (node, piece, lifts) in special {
        let index = cover_nodes.len();
        cover_nodes.push(Piece::Seifert(piece));
        node_map.push(node);
        expansions[node] = Some(Expansion::One { index, lifts });
    }
    for (node, piece) in base.pieces.iter().enumerate() {
        if expansions[node].is_some() {
            continue;
        }
        let index0 = cover_nodes.len();
        cover_nodes.push(piece.clone());
        cover_nodes.push(piece.clone());
        node_map.push(node);
        node_map.push(node);
        expansions[node] = Some(Expansion::Two {
            index0,
            index1: index0 + 1,
        });
    }
    (
        expansions.into_iter().map(Option::unwrap).collect(),
        cover_nodes,
        node_map,
    )
}

fn small_pattern(graph: &DecompositionGraph, recipe: CoverRecipe) -> Result<SmallPattern, CoverError> {
    match decomposition::classify_pieces(graph) {
        Ok(GluedCase::SmallPieces(p)) => Ok(p),
        Ok(other) => Err(not_applicable(
            recipe,
            format!("the graph is handled directly ({other:?}), no cover is needed"),
        )),
        Err(e) => Err(not_applicable(recipe, e.to_string())),
    }
}

fn assemble_chain(graph: &DecompositionGraph) -> Result<GraphCover, CoverError> {
    let recipe = CoverRecipe::ChainDouble;
    let (end, neighbor) = match small_pattern(graph, recipe)? {
        SmallPattern::Chain { end, neighbor } => (end, neighbor),
        other => {
            return Err(not_applicable(
                recipe,
                format!("the small-piece pattern is {other:?}, not a chain"),
            ))
        }
    };
    // The end piece unfolds. Its single slot gets the degree-2 lift.
    let end_cover = unfold_cover(seifert(&graph.pieces[end]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    // The neighbor takes the pants cover with the involution on the slot
    // facing the end.
    let (_, _, facing_slot) = graph
        .through_slot(end, 0)
        .ok_or_else(|| not_applicable(recipe, "the end slot is not glued"))?;
    let nb_cover = pants_cover(seifert(&graph.pieces[neighbor]), facing_slot)
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let specials = vec![
        (end, end_cover.total.clone(), slot_lifts(&end_cover)),
        (neighbor, nb_cover.total.clone(), slot_lifts(&nb_cover)),
    ];
    let (expansions, cover_nodes, node_map) = layout(graph, specials);
    wire(recipe, graph, &expansions, cover_nodes, node_map)
}

fn assemble_pair(graph: &DecompositionGraph) -> Result<GraphCover, CoverError> {
    let recipe = CoverRecipe::PairDouble;
    let (m1, m2) = match small_pattern(graph, recipe)? {
        SmallPattern::PairMixed { m1, m2 } => (m1, m2),
        other => {
            return Err(not_applicable(
                recipe,
                format!("the small-piece pattern is {other:?}, not a mixed pair"),
            ))
        }
    };
    let c1 = unfold_cover(seifert(&graph.pieces[m1]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let c2 = unfold_cover(seifert(&graph.pieces[m2]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let specials = vec![
        (m1, c1.total.clone(), slot_lifts(&c1)),
        (m2, c2.total.clone(), slot_lifts(&c2)),
    ];
    let (expansions, cover_nodes, node_map) = layout(graph, specials);
    wire(recipe, graph, &expansions, cover_nodes, node_map)
}

fn assemble_cycle(graph: &DecompositionGraph) -> Result<GraphCover, CoverError> {
    let recipe = CoverRecipe::CycleDouble;
    let (m1, m2) = match small_pattern(graph, recipe)? {
        SmallPattern::PairUniform { m1, m2 } => (m1, m2),
        other => {
            return Err(not_applicable(
                recipe,
                format!("the small-piece pattern is {other:?}, not a uniform pair"),
            ))
        }
    };
    let c1 = annulus_cover(seifert(&graph.pieces[m1]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let c2 = annulus_cover(seifert(&graph.pieces[m2]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let specials = vec![
        (m1, c1.total.clone(), slot_lifts(&c1)),
        (m2, c2.total.clone(), slot_lifts(&c2)),
    ];
    let (expansions, cover_nodes, node_map) = layout(graph, specials);
    let cover = wire(recipe, graph, &expansions, cover_nodes, node_map)?;
    // The whole point of this recipe: the cover is a cycle, so it has a
    // non-separating gluing torus.
    if decomposition::bridge_edges(&cover.output).iter().all(|b| *b) {
        return Err(CoverError::Check(
            "cycle cover has no non-separating gluing torus".into(),
        ));
    }
    Ok(cover)
}

fn assemble_reorient(graph: &DecompositionGraph) -> Result<GraphCover, CoverError> {
    let recipe = CoverRecipe::ReorientDouble;
    // Single closed nonorientable piece: just the orientation cover.
    if graph.pieces.len() == 1 && graph.edges.is_empty() {
        let s = match &graph.pieces[0] {
            Piece::Seifert(s) if !s.base_orientable => s,
            _ => {
                return Err(not_applicable(
                    recipe,
                    "a single closed piece must be fibered with nonorientable base",
                ))
            }
        };
        let c = orientation_double_cover(s).map_err(|e| not_applicable(recipe, e.to_string()))?;
        let specials = vec![(0, c.total.clone(), slot_lifts(&c))];
        let (expansions, cover_nodes, node_map) = layout(graph, specials);
        return wire(recipe, graph, &expansions, cover_nodes, node_map);
    }
    let node = match decomposition::classify_pieces(graph) {
        Ok(GluedCase::NonorientableSingleBoundary { piece }) => piece,
        Ok(other) => {
            return Err(not_applicable(
                recipe,
                format!("the graph is handled without this cover ({other:?})"),
            ))
        }
        Err(e) => return Err(not_applicable(recipe, e.to_string())),
    };
    let c = orientation_double_cover(seifert(&graph.pieces[node]))
        .map_err(|e| not_applicable(recipe, e.to_string()))?;
    let specials = vec![(node, c.total.clone(), slot_lifts(&c))];
    let (expansions, cover_nodes, node_map) = layout(graph, specials);
    wire(recipe, graph, &expansions, cover_nodes, node_map)
}

/// Regroups a piece cover's slot map by base slot: `out[base_slot]` lists
/// the `(cover_slot, degree)` lifts.
fn slot_lifts(cover: &SeifertCover) -> Vec<Vec<(u32, u32)>> {
    let max_base = cover
        .slot_map
        .iter()
        .map(|(b, _)| *b + 1)
        .max()
        .unwrap_or(0);
    (0..max_base).map(|b| cover.lifts_of(b)).collect()
}
