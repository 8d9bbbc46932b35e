//! Input model for closed oriented 3-manifolds and the case analysis used by
//! the decision procedure.
//!
//! A manifold is described by its prime summands. Most summand kinds are
//! atomic (`finite_pi1`, `s2xs1`, `closed_hyperbolic`); an `irreducible`
//! summand carries a [`DecompositionGraph`]: nodes are fibered
//! ([`SeifertPiece`]) or hyperbolic pieces, and each edge glues two torus
//! boundary slots. The manifold is closed, so validation requires every slot
//! to be glued exactly once.
//!
//! [`validate`] checks the numeric side conditions (fiber invariants
//! `0 < beta < alpha`, crosscap counts, fiber signs), the gluing combinatorics
//! (slot ranges, uniqueness, completeness, connectivity), and minimality: a
//! piece over an orientable genus-0 base with `boundary + fibers <= 2` is a
//! solid torus, a fibered annulus cross circle, or a small lens-type filling,
//! and gluing one across a separating torus means the torus could have been
//! removed, so such a piece may only sit on a non-separating (cycle) edge.
//!
//! [`bridge_edges`] computes which gluing tori separate the manifold (DFS
//! low-link on the multigraph; parallel edges and self-loops are never
//! bridges). [`has_nonseparating_torus`] reports an explicit witness: either
//! a non-bridge gluing edge or a vertical torus inside a fibered piece whose
//! orientable base has positive genus. (Over a nonorientable base a vertical
//! torus over an orientation-reversing curve is a Klein bottle, so positive
//! genus is only used on orientable bases.)
//!
//! [`classify_pieces`] routes an all-fibered graph with no non-separating
//! torus — necessarily a tree — to the argument that will be used on it. The
//! match arms are mutually exclusive by construction and exhaustive for
//! validated inputs: after Möbius-band pieces are rewritten
//! ([`normalize_moebius`]), every piece of such a tree is either orientable
//! of genus 0 with `boundary + fibers >= 3`, or nonorientable. The order of
//! the arms is part of the contract (earlier arms win), so certificates are
//! reproducible.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// One exceptional fiber: `(alpha, beta)` with `alpha >= 2` and
/// `0 < beta < alpha`.
pub type Fiber = (u32, u32);

/// A fibered piece: a circle fibration over a compact surface with `boundary`
/// torus boundary components and the listed exceptional fibers.
///
/// For a nonorientable base, `genus` counts crosscaps (so it must be at least
/// 1) and `deltas` optionally records the sign of each exceptional fiber
/// (`+1` by default): the sign says whether the fiber direction is preserved
/// around that exceptional point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeifertPiece {
    pub base_orientable: bool,
    pub genus: u32,
    pub boundary: u32,
    #[serde(default)]
    pub fibers: Vec<Fiber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<i8>>,
}

impl SeifertPiece {
    pub fn orientable(genus: u32, boundary: u32, fibers: &[Fiber]) -> SeifertPiece {
        SeifertPiece {
            base_orientable: true,
            genus,
            boundary,
            fibers: fibers.to_vec(),
            deltas: None,
        }
    }

    pub fn nonorientable(genus: u32, boundary: u32, fibers: &[Fiber]) -> SeifertPiece {
        SeifertPiece {
            base_orientable: false,
            genus,
            boundary,
            fibers: fibers.to_vec(),
            deltas: None,
        }
    }

    /// Number of exceptional fibers.
    pub fn fiber_count(&self) -> u32 {
        self.fibers.len() as u32
    }

    /// Number of exceptional fibers with multiplicity larger than 2.
    pub fn fiber_count_over_2(&self) -> u32 {
        self.fibers.iter().filter(|f| f.0 > 2).count() as u32
    }

    /// The set of fiber multiplicities.
    pub fn multiplicities(&self) -> BTreeSet<u32> {
        self.fibers.iter().map(|f| f.0).collect()
    }

    /// Sign of the `i`-th exceptional fiber (`+1` when no sign list is
    /// given). Only meaningful over a nonorientable base.
    pub fn delta(&self, i: usize) -> i8 {
        self.deltas.as_ref().map_or(1, |d| d[i])
    }

    /// Whether the circle fibration itself is orientable. The total spaces
    /// here are oriented, so the fibration is orientable exactly when the
    /// base is.
    pub fn fibration_orientable(&self) -> bool {
        self.base_orientable
    }

    /// Whether this is the twisted fibration of the solid torus over the
    /// Möbius band (nonorientable base, one crosscap, one boundary, no
    /// exceptional fibers).
    pub fn is_moebius_fibration(&self) -> bool {
        !self.base_orientable && self.genus == 1 && self.boundary == 1 && self.fibers.is_empty()
    }

    /// The other fibration of the same solid-torus-over-Möbius-band total
    /// space: over the disk with two exceptional fibers of multiplicity 2.
    pub fn moebius_normal_form() -> SeifertPiece {
        SeifertPiece::orientable(0, 1, &[(2, 1), (2, 1)])
    }
}

/// A node of a [`DecompositionGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    Seifert(SeifertPiece),
    Hyperbolic { cusps: u32 },
}

impl Piece {
    /// Number of torus boundary slots the piece offers for gluing.
    pub fn slot_count(&self) -> u32 {
        match self {
            Piece::Seifert(s) => s.boundary,
            Piece::Hyperbolic { cusps } => *cusps,
        }
    }

    pub fn as_seifert(&self) -> Option<&SeifertPiece> {
        match self {
            Piece::Seifert(s) => Some(s),
            Piece::Hyperbolic { .. } => None,
        }
    }
}

/// One gluing torus: `(piece_a, slot_a, piece_b, slot_b)`. Self-gluings
/// (`piece_a == piece_b`, distinct slots) are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GluingEdge(pub usize, pub u32, pub usize, pub u32);

impl GluingEdge {
    pub fn endpoints(&self) -> [(usize, u32); 2] {
        [(self.0, self.1), (self.2, self.3)]
    }

    /// Whether the edge touches the given piece at the given slot.
    pub fn uses(&self, piece: usize, slot: u32) -> bool {
        (self.0 == piece && self.1 == slot) || (self.2 == piece && self.3 == slot)
    }

    /// The endpoint opposite to `(piece, slot)`. For a self-loop the two
    /// endpoints are distinguished by slot.
    pub fn opposite(&self, piece: usize, slot: u32) -> (usize, u32) {
        if self.0 == piece && self.1 == slot {
            (self.2, self.3)
        } else {
            (self.0, self.1)
        }
    }
}

/// The torus decomposition of one irreducible summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecompositionGraph {
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub edges: Vec<GluingEdge>,
}

impl DecompositionGraph {
    /// Edges incident to `piece`, as `(edge_index, local_slot)`. A self-loop
    /// appears twice, once per slot.
    pub fn incident(&self, piece: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for (n, s) in e.endpoints() {
                if n == piece {
                    out.push((i, s));
                }
            }
        }
        out
    }

    /// The `(edge_index, opposite_piece, opposite_slot)` reached through the
    /// given slot, if that slot is glued.
    pub fn through_slot(&self, piece: usize, slot: u32) -> Option<(usize, usize, u32)> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.uses(piece, slot) {
                let (n, s) = e.opposite(piece, slot);
                return Some((i, n, s));
            }
        }
        None
    }
}

/// One prime summand of the manifold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summand {
    /// A summand with finite fundamental group of the given order. `fake`
    /// marks a homotopy sphere not known to be standard; it must then have
    /// order 1.
    FinitePi1 {
        order: u64,
        #[serde(default)]
        fake: bool,
    },
    /// The orientable sphere bundle over the circle.
    #[serde(rename = "s2xs1")]
    S2xS1,
    /// A closed hyperbolic summand.
    ClosedHyperbolic,
    /// An irreducible summand with a nontrivial torus decomposition,
    /// described by its piece graph.
    Irreducible { graph: DecompositionGraph },
}

impl Summand {
    /// Whether the summand has trivial fundamental group (a genuine or fake
    /// 3-sphere). Only `finite_pi1` summands of order 1 qualify.
    pub fn is_simply_connected(&self) -> bool {
        matches!(self, Summand::FinitePi1 { order: 1, .. })
    }
}

/// A closed oriented 3-manifold, as a list of prime summands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub summands: Vec<Summand>,
}

/// A reason the input fails validation. `validate` collects all of them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("manifold has no summands")]
    EmptyManifold,
    #[error("summand {summand}: fundamental group order must be at least 1")]
    BadOrder { summand: usize },
    #[error("summand {summand}: fundamental group order {order} exceeds the supported range")]
    OrderTooLarge { summand: usize, order: u64 },
    #[error("summand {summand}: a fake sphere must have order 1, got {order}")]
    FakeWithOrder { summand: usize, order: u64 },
    #[error("summand {summand}: piece graph has no pieces")]
    EmptyGraph { summand: usize },
    #[error("summand {summand}, piece {piece}, fiber {fiber}: need alpha >= 2 and 0 < beta < alpha, got ({alpha},{beta})")]
    BadFiber {
        summand: usize,
        piece: usize,
        fiber: usize,
        alpha: u32,
        beta: u32,
    },
    #[error("summand {summand}, piece {piece}: nonorientable base needs at least one crosscap")]
    NonorientableGenusZero { summand: usize, piece: usize },
    #[error("summand {summand}, piece {piece}: fiber signs are only meaningful over a nonorientable base")]
    DeltasOnOrientable { summand: usize, piece: usize },
    #[error("summand {summand}, piece {piece}: expected {expected} fiber signs, got {got}")]
    DeltaLength {
        summand: usize,
        piece: usize,
        expected: usize,
        got: usize,
    },
    #[error("summand {summand}, piece {piece}: fiber signs must be +1 or -1")]
    DeltaValue { summand: usize, piece: usize },
    #[error("summand {summand}, edge {edge}: piece index {piece} out of range")]
    EdgeNodeRange {
        summand: usize,
        edge: usize,
        piece: usize,
    },
    #[error("summand {summand}, edge {edge}: piece {piece} has no boundary slot {slot}")]
    EdgeSlotRange {
        summand: usize,
        edge: usize,
        piece: usize,
        slot: u32,
    },
    #[error("summand {summand}: slot {slot} of piece {piece} is glued more than once")]
    SlotReused {
        summand: usize,
        piece: usize,
        slot: u32,
    },
    #[error("summand {summand}: slot {slot} of piece {piece} is not glued, but the manifold must be closed")]
    DanglingSlot {
        summand: usize,
        piece: usize,
        slot: u32,
    },
    #[error("summand {summand}: piece graph is not connected")]
    Disconnected { summand: usize },
    #[error("summand {summand}: piece {piece} (orientable genus-0 base, boundary + fibers <= 2) sits on a separating gluing torus, so the torus decomposition is not minimal")]
    MinimalityViolation { summand: usize, piece: usize },
    #[error("summand {summand}: a single hyperbolic piece with no cusps should be the closed_hyperbolic summand kind")]
    LoneClosedHyperbolicPiece { summand: usize },
    #[error("summand {summand}: a closed fibered piece over an orientable genus-0 base with at most 2 exceptional fibers is a lens-type space whose gluing data is not determined here; use finite_pi1 or s2xs1 summands")]
    LensSpaceNode { summand: usize },
    #[error("summand {summand}: a closed fibered piece over a projective-plane base with no exceptional fibers is a connected sum of two projective spaces; list the prime summands directly")]
    ProjectiveBaseNode { summand: usize },
}

/// Checks a manifold description and reports every violation found.
pub fn validate(spec: &ManifoldSpec) -> Result<(), Vec<ValidationError>> {
    let mut errs = Vec::new();
    if spec.summands.is_empty() {
        errs.push(ValidationError::EmptyManifold);
    }
    for (si, summand) in spec.summands.iter().enumerate() {
        match summand {
            Summand::FinitePi1 { order, fake } => {
                if *order == 0 {
                    errs.push(ValidationError::BadOrder { summand: si });
                } else if *order > u64::from(u32::MAX) {
                    errs.push(ValidationError::OrderTooLarge {
                        summand: si,
                        order: *order,
                    });
                } else if *fake && *order != 1 {
                    errs.push(ValidationError::FakeWithOrder {
                        summand: si,
                        order: *order,
                    });
                }
            }
            Summand::S2xS1 | Summand::ClosedHyperbolic => {}
            Summand::Irreducible { graph } => validate_graph(si, graph, &mut errs),
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn validate_graph(si: usize, graph: &DecompositionGraph, errs: &mut Vec<ValidationError>) {
    if graph.pieces.is_empty() {
        errs.push(ValidationError::EmptyGraph { summand: si });
        return;
    }
    for (pi, piece) in graph.pieces.iter().enumerate() {
        if let Piece::Seifert(s) = piece {
            if !s.base_orientable && s.genus == 0 {
                errs.push(ValidationError::NonorientableGenusZero {
                    summand: si,
                    piece: pi,
                });
            }
            for (fi, &(alpha, beta)) in s.fibers.iter().enumerate() {
                if alpha < 2 || beta == 0 || beta >= alpha {
                    errs.push(ValidationError::BadFiber {
                        summand: si,
                        piece: pi,
                        fiber: fi,
                        alpha,
                        beta,
                    });
                }
            }
            if let Some(deltas) = &s.deltas {
                if s.base_orientable {
                    errs.push(ValidationError::DeltasOnOrientable {
                        summand: si,
                        piece: pi,
                    });
                } else if deltas.len() != s.fibers.len() {
                    errs.push(ValidationError::DeltaLength {
                        summand: si,
                        piece: pi,
                        expected: s.fibers.len(),
                        got: deltas.len(),
                    });
                } else if deltas.iter().any(|d| *d != 1 && *d != -1) {
                    errs.push(ValidationError::DeltaValue {
                        summand: si,
                        piece: pi,
                    });
                }
            }
        }
    }

    // Gluing combinatorics: ranges, uniqueness, completeness.
    let mut edges_ok = true;
    for (ei, e) in graph.edges.iter().enumerate() {
        for (n, s) in e.endpoints() {
            if n >= graph.pieces.len() {
                errs.push(ValidationError::EdgeNodeRange {
                    summand: si,
                    edge: ei,
                    piece: n,
                });
                edges_ok = false;
            } else if s >= graph.pieces[n].slot_count() {
                errs.push(ValidationError::EdgeSlotRange {
                    summand: si,
                    edge: ei,
                    piece: n,
                    slot: s,
                });
                edges_ok = false;
            }
        }
    }
    if !edges_ok {
        // Slot bookkeeping and connectivity need in-range edges.
        return;
    }
    let mut seen: BTreeSet<(usize, u32)> = BTreeSet::new();
    let mut reused: BTreeSet<(usize, u32)> = BTreeSet::new();
    for e in &graph.edges {
        for (n, s) in e.endpoints() {
            if !seen.insert((n, s)) {
                reused.insert((n, s));
            }
        }
    }
    for &(piece, slot) in &reused {
        errs.push(ValidationError::SlotReused {
            summand: si,
            piece,
            slot,
        });
    }
    for (pi, piece) in graph.pieces.iter().enumerate() {
        for slot in 0..piece.slot_count() {
            if !seen.contains(&(pi, slot)) {
                errs.push(ValidationError::DanglingSlot {
                    summand: si,
                    piece: pi,
                    slot,
                });
            }
        }
    }
    if !reused.is_empty() {
        return;
    }

    if !is_connected(graph) {
        errs.push(ValidationError::Disconnected { summand: si });
        return;
    }

    // Minimality: small filling pieces may not sit on separating tori.
    if graph.pieces.len() > 1 {
        let bridges = bridge_edges(graph);
        for (pi, piece) in graph.pieces.iter().enumerate() {
            if let Piece::Seifert(s) = piece {
                let small = s.base_orientable
                    && s.genus == 0
                    && s.boundary + s.fiber_count() <= 2
                    && s.boundary >= 1;
                if small && graph.incident(pi).iter().any(|&(ei, _)| bridges[ei]) {
                    errs.push(ValidationError::MinimalityViolation {
                        summand: si,
                        piece: pi,
                    });
                }
            }
        }
    }

    // Single closed pieces that stand for manifolds with their own summand
    // kinds, or whose gluing data this model cannot pin down.
    if graph.pieces.len() == 1 && graph.edges.is_empty() {
        match &graph.pieces[0] {
            Piece::Hyperbolic { cusps: 0 } => {
                errs.push(ValidationError::LoneClosedHyperbolicPiece { summand: si });
            }
            Piece::Hyperbolic { .. } => {}
            Piece::Seifert(s) => {
                if s.base_orientable && s.genus == 0 && s.fibers.len() <= 2 {
                    errs.push(ValidationError::LensSpaceNode { summand: si });
                } else if !s.base_orientable && s.genus == 1 && s.fibers.is_empty() {
                    errs.push(ValidationError::ProjectiveBaseNode { summand: si });
                }
            }
        }
    }
}

fn is_connected(graph: &DecompositionGraph) -> bool {
    if graph.pieces.is_empty() {
        return true;
    }
    let mut seen = vec![false; graph.pieces.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(n) = stack.pop() {
        for e in &graph.edges {
            for (a, b) in [(e.0, e.2), (e.2, e.0)] {
                if a == n && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.into_iter().all(|v| v)
}

/// For each edge, whether it is a bridge (removing it disconnects the graph,
/// equivalently the gluing torus separates the manifold). Parallel edges and
/// self-loops are never bridges. Edges must be in range.
pub fn bridge_edges(graph: &DecompositionGraph) -> Vec<bool> {
    let n = graph.pieces.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ei, e) in graph.edges.iter().enumerate() {
        adj[e.0].push((e.2, ei));
        if e.0 != e.2 {
            adj[e.2].push((e.0, ei));
        }
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut bridge = vec![false; graph.edges.len()];
    let mut timer = 0usize;
    // Iterative DFS: (node, entering edge index or MAX, next adjacency index).
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (u, entering, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let (v, ei) = adj[u][*next];
                *next += 1;
                if ei == entering {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, ei, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        bridge[entering] = true;
                    }
                }
            }
        }
    }
    bridge
}

/// An explicit non-separating torus in the summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TorusWitness {
    /// The gluing torus of a non-bridge edge.
    NonBridgeEdge { edge: usize },
    /// A vertical torus over a non-separating base curve of a fibered piece
    /// with orientable base of positive genus.
    VerticalTorus { piece: usize },
}

/// Finds a non-separating torus, if there is one: first a non-bridge gluing
/// edge (lowest index), then a vertical torus in a piece whose orientable
/// base has positive genus (lowest index).
pub fn has_nonseparating_torus(graph: &DecompositionGraph) -> Option<TorusWitness> {
    let bridges = bridge_edges(graph);
    if let Some(edge) = bridges.iter().position(|b| !b) {
        return Some(TorusWitness::NonBridgeEdge { edge });
    }
    for (pi, piece) in graph.pieces.iter().enumerate() {
        if let Piece::Seifert(s) = piece {
            if s.base_orientable && s.genus >= 1 {
                return Some(TorusWitness::VerticalTorus { piece: pi });
            }
        }
    }
    None
}

/// Rewrites every solid-torus-over-Möbius-band piece into its disk-base form
/// with two multiplicity-2 fibers. Slot counts are unchanged, so the edges
/// still make sense. Returns the rewritten graph and the indices of the
/// rewritten pieces.
pub fn normalize_moebius(graph: &DecompositionGraph) -> (DecompositionGraph, Vec<usize>) {
    let mut out = graph.clone();
    let mut rewritten = Vec::new();
    for (pi, piece) in out.pieces.iter_mut().enumerate() {
        if let Piece::Seifert(s) = piece {
            if s.is_moebius_fibration() {
                *s = SeifertPiece::moebius_normal_form();
                rewritten.push(pi);
            }
        }
    }
    (out, rewritten)
}

/// Where [`classify_pieces`] sends a graph in which every piece is small
/// (orientable genus-0 base, boundary + fibers = 3, some multiplicity-2
/// fiber): such graphs need a double cover before a witness pair exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallPattern {
    /// Three or more pieces in a path. `end` is the lower-indexed
    /// single-boundary end of the path and `neighbor` its unique neighbor.
    Chain { end: usize, neighbor: usize },
    /// Exactly two pieces, and `m1` has an exceptional fiber of multiplicity
    /// other than 2 (`m2` is the other piece).
    PairMixed { m1: usize, m2: usize },
    /// Exactly two pieces, all exceptional fibers of multiplicity 2.
    PairUniform { m1: usize, m2: usize },
}

/// The argument [`classify_pieces`] picks for an all-fibered tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluedCase {
    /// An orientable-base piece with at least 3 boundary tori: two boundary
    /// curves generate a rank-2 free quotient.
    BoundaryTriple { piece: usize },
    /// A nonorientable-base piece with at least 2 boundary tori: a boundary
    /// curve and an orientation-reversing base curve generate the quotient.
    NonorientableBoundaryPair { piece: usize },
    /// An orientable-base piece with boundary + fibers >= 4: three of those
    /// curves give a three-letter witness.
    MixedQuadruple { piece: usize },
    /// An orientable-base piece with boundary + fibers = 3 and no
    /// multiplicity-2 fiber: two torsion-or-boundary curves suffice.
    TorsionPair { piece: usize },
    /// Every piece is small with a multiplicity-2 fiber; pass to a double
    /// cover.
    SmallPieces(SmallPattern),
    /// No orientable case applies, so some piece has a nonorientable base
    /// (with a single boundary torus); pass to its fiberwise orientation
    /// double cover.
    NonorientableSingleBoundary { piece: usize },
}

/// Why [`classify_pieces`] refused to classify.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("piece {piece} is hyperbolic; classification only covers all-fibered graphs")]
    NotAllSeifert { piece: usize },
    #[error("the graph has a non-separating torus; it is handled before classification")]
    HasNonseparatingTorus,
    #[error("piece {piece} is a Möbius-band fibration; rewrite it with normalize_moebius first")]
    UnnormalizedMoebius { piece: usize },
    #[error("piece {piece} is closed; single closed pieces are handled before classification")]
    ClosedPiece { piece: usize },
    #[error("the graph has no pieces")]
    NoPieces,
    #[error("piece {piece} is an orientable genus-0 piece with boundary + fibers <= 2 on a tree edge; the input is not minimal")]
    NotMinimal { piece: usize },
}

/// Picks the argument for a validated all-fibered graph with no
/// non-separating torus. Earlier arms win; the outcome is deterministic and
/// the lowest eligible piece index is reported.
pub fn classify_pieces(graph: &DecompositionGraph) -> Result<GluedCase, ClassifyError> {
    if graph.pieces.is_empty() {
        return Err(ClassifyError::NoPieces);
    }
    let mut seif: Vec<&SeifertPiece> = Vec::new();
    for (pi, piece) in graph.pieces.iter().enumerate() {
        match piece {
            Piece::Seifert(s) => seif.push(s),
            Piece::Hyperbolic { .. } => {
                return Err(ClassifyError::NotAllSeifert { piece: pi });
            }
        }
    }
    if has_nonseparating_torus(graph).is_some() {
        return Err(ClassifyError::HasNonseparatingTorus);
    }
    if let Some(pi) = seif.iter().position(|s| s.is_moebius_fibration()) {
        return Err(ClassifyError::UnnormalizedMoebius { piece: pi });
    }
    if let Some(pi) = seif.iter().position(|s| s.boundary == 0) {
        return Err(ClassifyError::ClosedPiece { piece: pi });
    }

    if let Some(pi) = seif.iter().position(|s| s.base_orientable && s.boundary >= 3) {
        return Ok(GluedCase::BoundaryTriple { piece: pi });
    }
    if let Some(pi) = seif.iter().position(|s| !s.base_orientable && s.boundary >= 2) {
        return Ok(GluedCase::NonorientableBoundaryPair { piece: pi });
    }
    if let Some(pi) = seif
        .iter()
        .position(|s| s.base_orientable && s.boundary + s.fiber_count() >= 4)
    {
        return Ok(GluedCase::MixedQuadruple { piece: pi });
    }
    if let Some(pi) = seif.iter().position(|s| {
        s.base_orientable
            && s.boundary + s.fiber_count() == 3
            && !s.multiplicities().contains(&2)
    }) {
        return Ok(GluedCase::TorsionPair { piece: pi });
    }

    if seif.iter().all(|s| s.base_orientable) {
        // Every piece now has genus 0 (no non-separating torus), boundary +
        // fibers <= 3, and a multiplicity-2 fiber if boundary + fibers = 3.
        // Smaller pieces would sit on tree edges, which validation rejects.
        if let Some(pi) = seif
            .iter()
            .position(|s| s.genus == 0 && s.boundary + s.fiber_count() < 3)
        {
            return Err(ClassifyError::NotMinimal { piece: pi });
        }
        // All pieces: genus 0, boundary + fibers = 3, 2 among the
        // multiplicities, boundary in {1, 2}. The tree has max degree 2, so
        // it is a path.
        if graph.pieces.len() >= 3 {
            let end = seif
                .iter()
                .position(|s| s.boundary == 1)
                .expect("a path with >= 3 nodes has single-boundary ends");
            let (_, neighbor, _) = graph
                .through_slot(end, 0)
                .expect("validated closed graph glues every slot");
            return Ok(GluedCase::SmallPieces(SmallPattern::Chain { end, neighbor }));
        }
        // Exactly two pieces, each with boundary 1 and two exceptional
        // fibers, at least one of multiplicity 2.
        if let Some(m1) = seif.iter().position(|s| s.fibers.iter().any(|f| f.0 != 2)) {
            let m2 = 1 - m1;
            return Ok(GluedCase::SmallPieces(SmallPattern::PairMixed { m1, m2 }));
        }
        return Ok(GluedCase::SmallPieces(SmallPattern::PairUniform { m1: 0, m2: 1 }));
    }

    // Some piece is nonorientable; by the earlier arms it has boundary 1 and
    // is not a Möbius-band fibration.
    let pi = seif
        .iter()
        .position(|s| !s.base_orientable)
        .expect("checked above");
    Ok(GluedCase::NonorientableSingleBoundary { piece: pi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf_piece() -> Piece {
        // Orientable, genus 0, one boundary, two fibers: a standard small
        // end piece for trees.
        Piece::Seifert(SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]))
    }

    fn graph(pieces: Vec<Piece>, edges: Vec<GluingEdge>) -> DecompositionGraph {
        DecompositionGraph { pieces, edges }
    }

    fn one_irreducible(g: DecompositionGraph) -> ManifoldSpec {
        ManifoldSpec {
            summands: vec![Summand::Irreducible { graph: g }],
        }
    }

    #[test]
    fn accepts_two_leaves_glued() {
        let g = graph(
            vec![leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(validate(&one_irreducible(g)), Ok(()));
    }

    #[test]
    fn rejects_bad_fibers_and_crosscaps() {
        let bad = SeifertPiece::orientable(0, 1, &[(1, 1), (3, 0), (3, 3)]);
        let g = graph(
            vec![Piece::Seifert(bad), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        let fiber_errs: Vec<_> = errs
            .iter()
            .filter(|e| matches!(e, ValidationError::BadFiber { .. }))
            .collect();
        assert_eq!(fiber_errs.len(), 3);

        let g = graph(
            vec![Piece::Seifert(SeifertPiece::nonorientable(0, 1, &[])), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::NonorientableGenusZero { .. })));
    }

    #[test]
    fn rejects_bad_fiber_signs() {
        let mut p = SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1)]);
        p.deltas = Some(vec![1, -1]);
        let g = graph(
            vec![Piece::Seifert(p), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DeltasOnOrientable { .. })));

        let mut p = SeifertPiece::nonorientable(1, 2, &[(2, 1), (3, 1)]);
        p.deltas = Some(vec![1]);
        let g = graph(
            vec![Piece::Seifert(p), leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 2, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DeltaLength { expected: 2, got: 1, .. })));

        let mut p = SeifertPiece::nonorientable(1, 2, &[(2, 1)]);
        p.deltas = Some(vec![2]);
        let g = graph(
            vec![Piece::Seifert(p), leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 2, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DeltaValue { .. })));
    }

    #[test]
    fn rejects_bad_gluings() {
        // Out-of-range node and slot.
        let g = graph(vec![leaf_piece()], vec![GluingEdge(0, 0, 5, 0)]);
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::EdgeNodeRange { piece: 5, .. })));

        let g = graph(
            vec![leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 3)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::EdgeSlotRange { slot: 3, .. })));

        // Slot reuse.
        let g = graph(
            vec![leaf_piece(), leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 0, 2, 0)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::SlotReused { piece: 0, slot: 0, .. })));

        // Dangling slot.
        let g = graph(vec![leaf_piece()], vec![]);
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::DanglingSlot { piece: 0, slot: 0, .. })));

        // Disconnected: two self-glued components.
        let two = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));
        let g = graph(
            vec![two.clone(), two],
            vec![GluingEdge(0, 0, 0, 1), GluingEdge(1, 0, 1, 1)],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::Disconnected { .. })));
    }

    #[test]
    fn rejects_solid_torus_on_tree_edge() {
        let solid = Piece::Seifert(SeifertPiece::orientable(0, 1, &[]));
        let g = graph(vec![solid, leaf_piece()], vec![GluingEdge(0, 0, 1, 0)]);
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert_eq!(
            errs,
            vec![ValidationError::MinimalityViolation {
                summand: 0,
                piece: 0
            }]
        );
    }

    #[test]
    fn accepts_small_piece_on_cycle() {
        // A two-boundary fibered annulus self-glued: both slots on a
        // self-loop, which is not a bridge.
        let p = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));
        let g = graph(vec![p], vec![GluingEdge(0, 0, 0, 1)]);
        assert_eq!(validate(&one_irreducible(g)), Ok(()));

        // Same piece type on a 2-cycle between two nodes.
        let p = Piece::Seifert(SeifertPiece::orientable(0, 2, &[]));
        let q = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(3, 1)]));
        let g = graph(
            vec![p, q],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 1, 1)],
        );
        assert_eq!(validate(&one_irreducible(g)), Ok(()));
    }

    #[test]
    fn rejects_special_single_nodes() {
        let g = graph(vec![Piece::Hyperbolic { cusps: 0 }], vec![]);
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert_eq!(
            errs,
            vec![ValidationError::LoneClosedHyperbolicPiece { summand: 0 }]
        );

        let g = graph(
            vec![Piece::Seifert(SeifertPiece::orientable(0, 0, &[(2, 1), (3, 1)]))],
            vec![],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert_eq!(errs, vec![ValidationError::LensSpaceNode { summand: 0 }]);

        let g = graph(
            vec![Piece::Seifert(SeifertPiece::nonorientable(1, 0, &[]))],
            vec![],
        );
        let errs = validate(&one_irreducible(g)).unwrap_err();
        assert_eq!(errs, vec![ValidationError::ProjectiveBaseNode { summand: 0 }]);

        // Three fibers over the disk, or a projective base with a fiber, are
        // fine as single closed nodes.
        let g = graph(
            vec![Piece::Seifert(SeifertPiece::orientable(
                0,
                0,
                &[(2, 1), (3, 1), (7, 1)],
            ))],
            vec![],
        );
        assert_eq!(validate(&one_irreducible(g)), Ok(()));
        let g = graph(
            vec![Piece::Seifert(SeifertPiece::nonorientable(1, 0, &[(2, 1)]))],
            vec![],
        );
        assert_eq!(validate(&one_irreducible(g)), Ok(()));
    }

    #[test]
    fn rejects_bad_summand_scalars() {
        let spec = ManifoldSpec { summands: vec![] };
        assert_eq!(
            validate(&spec).unwrap_err(),
            vec![ValidationError::EmptyManifold]
        );
        let spec = ManifoldSpec {
            summands: vec![Summand::FinitePi1 {
                order: 0,
                fake: false,
            }],
        };
        assert_eq!(
            validate(&spec).unwrap_err(),
            vec![ValidationError::BadOrder { summand: 0 }]
        );
        let spec = ManifoldSpec {
            summands: vec![Summand::FinitePi1 {
                order: 8,
                fake: true,
            }],
        };
        assert_eq!(
            validate(&spec).unwrap_err(),
            vec![ValidationError::FakeWithOrder {
                summand: 0,
                order: 8
            }]
        );
    }

    #[test]
    fn bridges_on_paths_cycles_and_multi_edges() {
        // Path 0-1-2: both edges are bridges.
        let b2 = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));
        let g = graph(
            vec![leaf_piece(), b2.clone(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(1, 1, 2, 0)],
        );
        assert_eq!(bridge_edges(&g), vec![true, true]);

        // 2-cycle: neither parallel edge is a bridge.
        let g = graph(
            vec![b2.clone(), b2.clone()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 1, 1)],
        );
        assert_eq!(bridge_edges(&g), vec![false, false]);

        // Self-loop next to a pendant edge: loop is not a bridge, pendant is.
        let three = Piece::Seifert(SeifertPiece::orientable(0, 3, &[]));
        let g = graph(
            vec![three, leaf_piece()],
            vec![GluingEdge(0, 0, 0, 1), GluingEdge(0, 2, 1, 0)],
        );
        assert_eq!(bridge_edges(&g), vec![false, true]);
    }

    #[test]
    fn nonseparating_torus_witnesses() {
        // Tree of small orientable pieces: none.
        let g = graph(
            vec![leaf_piece(), leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(has_nonseparating_torus(&g), None);

        // Cycle: the first non-bridge edge.
        let b2 = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));
        let g = graph(
            vec![b2.clone(), b2.clone()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 1, 1)],
        );
        assert_eq!(
            has_nonseparating_torus(&g),
            Some(TorusWitness::NonBridgeEdge { edge: 0 })
        );

        // Positive-genus orientable base: vertical torus.
        let genus = Piece::Seifert(SeifertPiece::orientable(1, 1, &[]));
        let g = graph(vec![genus, leaf_piece()], vec![GluingEdge(0, 0, 1, 0)]);
        assert_eq!(
            has_nonseparating_torus(&g),
            Some(TorusWitness::VerticalTorus { piece: 0 })
        );

        // Nonorientable base of any genus does not produce one.
        let non = Piece::Seifert(SeifertPiece::nonorientable(3, 1, &[]));
        let g = graph(vec![non, leaf_piece()], vec![GluingEdge(0, 0, 1, 0)]);
        assert_eq!(has_nonseparating_torus(&g), None);
    }

    #[test]
    fn moebius_rewrite() {
        let g = graph(
            vec![
                Piece::Seifert(SeifertPiece::nonorientable(1, 1, &[])),
                leaf_piece(),
            ],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        let (normalized, rewritten) = normalize_moebius(&g);
        assert_eq!(rewritten, vec![0]);
        assert_eq!(
            normalized.pieces[0],
            Piece::Seifert(SeifertPiece::orientable(0, 1, &[(2, 1), (2, 1)]))
        );
        assert_eq!(normalized.edges, g.edges);
        // Idempotent and silent on already-normal graphs.
        let (again, rewritten) = normalize_moebius(&normalized);
        assert_eq!(again, normalized);
        assert!(rewritten.is_empty());
    }

    #[test]
    fn classification_precedence() {
        let hub3 = Piece::Seifert(SeifertPiece::orientable(0, 3, &[(3, 1)]));
        let non2 = Piece::Seifert(SeifertPiece::nonorientable(1, 2, &[(3, 1)]));
        let quad = Piece::Seifert(SeifertPiece::orientable(0, 1, &[(2, 1), (3, 1), (5, 1)]));
        let tor = Piece::Seifert(SeifertPiece::orientable(0, 1, &[(3, 1), (5, 2)]));
        let leaf = leaf_piece();

        // Boundary triple wins over everything downstream.
        let g = graph(
            vec![hub3, non2.clone(), leaf.clone(), leaf.clone()],
            vec![
                GluingEdge(0, 0, 1, 0),
                GluingEdge(0, 1, 2, 0),
                GluingEdge(0, 2, 3, 0),
                GluingEdge(1, 1, 3, 0),
            ],
        );
        // (Edge list above reuses a slot; rebuild a clean star.)
        let g = graph(
            vec![g.pieces[0].clone(), leaf.clone(), leaf.clone(), leaf.clone()],
            vec![
                GluingEdge(0, 0, 1, 0),
                GluingEdge(0, 1, 2, 0),
                GluingEdge(0, 2, 3, 0),
            ],
        );
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::BoundaryTriple { piece: 0 })
        );

        // Nonorientable pair beats the quadruple and torsion cases.
        let g = graph(
            vec![non2, quad.clone(), tor.clone()],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 2, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::NonorientableBoundaryPair { piece: 0 })
        );

        // Quadruple beats torsion pair.
        let g = graph(
            vec![tor.clone(), quad],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(classify_pieces(&g), Ok(GluedCase::MixedQuadruple { piece: 1 }));

        // Torsion pair.
        let g = graph(vec![tor, leaf], vec![GluingEdge(0, 0, 1, 0)]);
        assert_eq!(classify_pieces(&g), Ok(GluedCase::TorsionPair { piece: 0 }));
    }

    #[test]
    fn small_piece_patterns() {
        let end = |f: &[Fiber]| Piece::Seifert(SeifertPiece::orientable(0, 1, f));
        let mid = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));

        // Chain of three.
        let g = graph(
            vec![end(&[(2, 1), (3, 1)]), mid, end(&[(2, 1), (2, 1)])],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(1, 1, 2, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::SmallPieces(SmallPattern::Chain {
                end: 0,
                neighbor: 1
            }))
        );

        // Mixed pair: the piece with a non-2 multiplicity is m1.
        let g = graph(
            vec![end(&[(2, 1), (2, 1)]), end(&[(2, 1), (3, 1)])],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::SmallPieces(SmallPattern::PairMixed { m1: 1, m2: 0 }))
        );

        // Uniform pair.
        let g = graph(
            vec![end(&[(2, 1), (2, 1)]), end(&[(2, 1), (2, 1)])],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::SmallPieces(SmallPattern::PairUniform { m1: 0, m2: 1 }))
        );
    }

    #[test]
    fn nonorientable_single_boundary_fallback() {
        let non = Piece::Seifert(SeifertPiece::nonorientable(1, 1, &[(2, 1), (2, 1)]));
        let g = graph(vec![non, leaf_piece()], vec![GluingEdge(0, 0, 1, 0)]);
        assert_eq!(
            classify_pieces(&g),
            Ok(GluedCase::NonorientableSingleBoundary { piece: 0 })
        );
    }

    #[test]
    fn classify_guards() {
        let g = graph(
            vec![Piece::Hyperbolic { cusps: 1 }, leaf_piece()],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Err(ClassifyError::NotAllSeifert { piece: 0 })
        );

        let b2 = Piece::Seifert(SeifertPiece::orientable(0, 2, &[(2, 1)]));
        let g = graph(
            vec![b2.clone(), b2],
            vec![GluingEdge(0, 0, 1, 0), GluingEdge(0, 1, 1, 1)],
        );
        assert_eq!(
            classify_pieces(&g),
            Err(ClassifyError::HasNonseparatingTorus)
        );

        let g = graph(
            vec![
                Piece::Seifert(SeifertPiece::nonorientable(1, 1, &[])),
                leaf_piece(),
            ],
            vec![GluingEdge(0, 0, 1, 0)],
        );
        assert_eq!(
            classify_pieces(&g),
            Err(ClassifyError::UnnormalizedMoebius { piece: 0 })
        );

        let g = graph(
            vec![Piece::Seifert(SeifertPiece::orientable(
                0,
                0,
                &[(2, 1), (3, 1), (7, 1)],
            ))],
            vec![],
        );
        assert_eq!(classify_pieces(&g), Err(ClassifyError::ClosedPiece { piece: 0 }));
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        fn arb_multigraph() -> impl Strategy<Value = DecompositionGraph> {
            // Node count and an edge list as (a, b) pairs; boundary counts
            // are derived so every slot is glued.
            (1usize..=5).prop_flat_map(|n| {
                proptest::collection::vec((0..n, 0..n), 0..=6).prop_map(move |pairs| {
                    let mut degree = vec![0u32; n];
                    let mut edges = Vec::new();
                    for (a, b) in pairs {
                        let sa = degree[a];
                        degree[a] += 1;
                        let sb = degree[b];
                        degree[b] += 1;
                        edges.push(GluingEdge(a, sa, b, sb));
                    }
                    let pieces = degree
                        .into_iter()
                        .map(|d| {
                            Piece::Seifert(SeifertPiece::orientable(0, d, &[(2, 1), (3, 1)]))
                        })
                        .collect();
                    DecompositionGraph { pieces, edges }
                })
            })
        }

        fn component_count(graph: &DecompositionGraph, skip_edge: Option<usize>) -> usize {
            let n = graph.pieces.len();
            let mut seen = vec![false; n];
            let mut count = 0;
            for root in 0..n {
                if seen[root] {
                    continue;
                }
                count += 1;
                seen[root] = true;
                let mut stack = vec![root];
                while let Some(u) = stack.pop() {
                    for (ei, e) in graph.edges.iter().enumerate() {
                        if Some(ei) == skip_edge {
                            continue;
                        }
                        for (a, b) in [(e.0, e.2), (e.2, e.0)] {
                            if a == u && !seen[b] {
                                seen[b] = true;
                                stack.push(b);
                            }
                        }
                    }
                }
            }
            count
        }

        proptest! {
            #[test]
            fn bridge_matches_removal_oracle(g in arb_multigraph()) {
                let bridges = bridge_edges(&g);
                let base = component_count(&g, None);
                for ei in 0..g.edges.len() {
                    let removed = component_count(&g, Some(ei));
                    prop_assert_eq!(
                        bridges[ei],
                        removed > base,
                        "edge {} of {:?}", ei, g.edges
                    );
                }
            }
        }
    }
}
