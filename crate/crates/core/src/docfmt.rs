//! The JSON documents the tools read and write, the canonical serialization
//! rules, and the short text syntaxes for words and groups.
//!
//! A *manifold document* is `{"version": "1", "manifold": {"summands":
//! [...]}}`. Summands and pieces are tagged objects (`"kind":
//! "finite_pi1" | "s2xs1" | "closed_hyperbolic" | "irreducible"`, pieces
//! `"kind": "seifert" | "hyperbolic"`); gluing edges are 4-element arrays
//! `[piece_a, slot_a, piece_b, slot_b]`. [`parse_spec`] checks the object
//! keys strictly before the typed parse, so typos fail loudly instead of
//! silently defaulting.
//!
//! Canonical form: JSON with object keys sorted recursively. Digests are
//! SHA-256 over the compact canonical form of the document; files are
//! written in pretty canonical form with a trailing newline. Parsing and
//! re-serializing a document therefore yields one fixed byte string, no
//! matter how the input was formatted.
//!
//! Text syntaxes: words are `name^exp.name^exp` (`^1` optional on input,
//! identity `1`); groups are `*`-separated cyclic factors `Z` (infinite) or
//! `Z<n>` (order `n`), e.g. `Z3*Z5*Z`; the `i`-th factor of a group given
//! this way is named `g<i>` starting at `g1`.

use crate::certify::Certificate;
use crate::covers::{CoverRecipe, GraphCover, SeifertCover};
use crate::decomposition::{ManifoldSpec, SeifertPiece};
use crate::freeprod::Group;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DOCUMENT_VERSION: &str = "1";

/// The top-level manifold document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub version: String,
    pub manifold: ManifoldSpec,
}

/// Why a document failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("not valid JSON: {0}")]
    Json(String),
    #[error("{at}: {reason}")]
    Shape { at: String, reason: String },
    #[error("unsupported document version `{0}` (expected \"1\")")]
    Version(String),
    #[error("bad group syntax at `{part}`: {reason}")]
    GroupSyntax { part: String, reason: String },
}

fn shape(at: &str, reason: impl Into<String>) -> DocError {
    DocError::Shape {
        at: at.to_string(),
        reason: reason.into(),
    }
}

/// Sorts all object keys recursively. Arrays keep their order.
pub fn canonical_json(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut sorted: Vec<(&String, &Value)> = map.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(b.0));
            let mut out = Map::new();
            for (k, v) in sorted {
                out.insert(k.clone(), canonical_json(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical_json).collect()),
        other => other.clone(),
    }
}

/// Compact canonical serialization (for digests).
pub fn to_canonical_compact(value: &Value) -> String {
    serde_json::to_string(&canonical_json(value)).expect("serializing a Value cannot fail")
}

/// Pretty canonical serialization with a trailing newline (for files).
pub fn to_canonical_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical_json(value))
        .expect("serializing a Value cannot fail");
    s.push('\n');
    s
}

fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{:02x}", byte));
    }
    out
}

/// The identity of a manifold description: SHA-256 of the compact canonical
/// form of its document.
pub fn spec_digest(manifold: &ManifoldSpec) -> String {
    let doc = SpecDocument {
        version: DOCUMENT_VERSION.to_string(),
        manifold: manifold.clone(),
    };
    let value = serde_json::to_value(&doc).expect("document serialization cannot fail");
    sha256_hex(&to_canonical_compact(&value))
}

/// Serializes a manifold document in canonical pretty form.
pub fn spec_to_string(manifold: &ManifoldSpec) -> String {
    let doc = SpecDocument {
        version: DOCUMENT_VERSION.to_string(),
        manifold: manifold.clone(),
    };
    let value = serde_json::to_value(&doc).expect("document serialization cannot fail");
    to_canonical_pretty(&value)
}

/// Parses and shape-checks a manifold document.
pub fn parse_spec(text: &str) -> Result<SpecDocument, DocError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocError::Json(e.to_string()))?;
    check_spec_shape(&value)?;
    let doc: SpecDocument =
        serde_json::from_value(value).map_err(|e| DocError::Json(e.to_string()))?;
    if doc.version != DOCUMENT_VERSION {
        return Err(DocError::Version(doc.version));
    }
    Ok(doc)
}

fn want_object<'v>(v: &'v Value, at: &str) -> Result<&'v Map<String, Value>, DocError> {
    v.as_object().ok_or_else(|| shape(at, "expected an object"))
}

fn want_array<'v>(v: &'v Value, at: &str) -> Result<&'v Vec<Value>, DocError> {
    v.as_array().ok_or_else(|| shape(at, "expected an array"))
}

fn check_keys(
    map: &Map<String, Value>,
    at: &str,
    required: &[&str],
    optional: &[&str],
) -> Result<(), DocError> {
    for key in map.keys() {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(shape(at, format!("unknown key `{key}`")));
        }
    }
    for key in required {
        if !map.contains_key(*key) {
            return Err(shape(at, format!("missing key `{key}`")));
        }
    }
    Ok(())
}

fn check_spec_shape(value: &Value) -> Result<(), DocError> {
    let root = want_object(value, "document")?;
    check_keys(root, "document", &["version", "manifold"], &[])?;
    let manifold = want_object(&root["manifold"], "manifold")?;
    check_keys(manifold, "manifold", &["summands"], &[])?;
    let summands = want_array(&manifold["summands"], "manifold.summands")?;
    for (i, s) in summands.iter().enumerate() {
        let at = format!("summands[{i}]");
        let obj = want_object(s, &at)?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| shape(&at, "missing or non-string `kind`"))?;
        match kind {
            "finite_pi1" => check_keys(obj, &at, &["kind", "order"], &["fake"])?,
            "s2xs1" | "closed_hyperbolic" => check_keys(obj, &at, &["kind"], &[])?,
            "irreducible" => {
                check_keys(obj, &at, &["kind", "graph"], &[])?;
                check_graph_shape(&obj["graph"], &format!("{at}.graph"))?;
            }
            other => {
                return Err(shape(
                    &at,
                    format!("unknown summand kind `{other}` (expected finite_pi1, s2xs1, closed_hyperbolic, or irreducible)"),
                ))
            }
        }
    }
    Ok(())
}

fn check_graph_shape(value: &Value, at: &str) -> Result<(), DocError> {
    let graph = want_object(value, at)?;
    check_keys(graph, at, &["pieces"], &["edges"])?;
    let pieces = want_array(&graph["pieces"], &format!("{at}.pieces"))?;
    for (i, p) in pieces.iter().enumerate() {
        let pat = format!("{at}.pieces[{i}]");
        let obj = want_object(p, &pat)?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| shape(&pat, "missing or non-string `kind`"))?;
        match kind {
            "seifert" => check_keys(
                obj,
                &pat,
                &["kind", "base_orientable", "genus", "boundary"],
                &["fibers", "deltas"],
            )?,
            "hyperbolic" => check_keys(obj, &pat, &["kind", "cusps"], &[])?,
            other => {
                return Err(shape(
                    &pat,
                    format!("unknown piece kind `{other}` (expected seifert or hyperbolic)"),
                ))
            }
        }
        if let Some(fibers) = obj.get("fibers") {
            let arr = want_array(fibers, &format!("{pat}.fibers"))?;
            for (j, f) in arr.iter().enumerate() {
                let pair = want_array(f, &format!("{pat}.fibers[{j}]"))?;
                if pair.len() != 2 || !pair.iter().all(|x| x.is_u64()) {
                    return Err(shape(
                        &format!("{pat}.fibers[{j}]"),
                        "expected a pair [alpha, beta] of nonnegative integers",
                    ));
                }
            }
        }
    }
    if let Some(edges) = graph.get("edges") {
        let arr = want_array(edges, &format!("{at}.edges"))?;
        for (j, e) in arr.iter().enumerate() {
            let quad = want_array(e, &format!("{at}.edges[{j}]"))?;
            if quad.len() != 4 || !quad.iter().all(|x| x.is_u64()) {
                return Err(shape(
                    &format!("{at}.edges[{j}]"),
                    "expected [piece_a, slot_a, piece_b, slot_b] with nonnegative integers",
                ));
            }
        }
    }
    Ok(())
}

/// Serializes a certificate in canonical pretty form.
pub fn certificate_to_string(cert: &Certificate) -> String {
    let value = serde_json::to_value(cert).expect("certificate serialization cannot fail");
    to_canonical_pretty(&value)
}

/// Parses a certificate document.
pub fn parse_certificate(text: &str) -> Result<Certificate, DocError> {
    serde_json::from_str(text).map_err(|e| DocError::Json(e.to_string()))
}

/// The document emitted for a piece-level cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceCoverDocument {
    pub version: String,
    pub recipe: CoverRecipe,
    pub input: SeifertPiece,
    pub total: SeifertPiece,
    /// `slot_map[cover_slot] = [base_slot, degree]`.
    pub slot_map: Vec<(u32, u32)>,
}

pub fn piece_cover_to_string(
    recipe: CoverRecipe,
    input: &SeifertPiece,
    cover: &SeifertCover,
) -> String {
    let doc = PieceCoverDocument {
        version: DOCUMENT_VERSION.to_string(),
        recipe,
        input: input.clone(),
        total: cover.total.clone(),
        slot_map: cover.slot_map.clone(),
    };
    let value = serde_json::to_value(&doc).expect("cover serialization cannot fail");
    to_canonical_pretty(&value)
}

/// The document emitted for a graph-level cover: the covering manifold as a
/// full manifold document plus the covering bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCoverDocument {
    pub version: String,
    pub recipe: CoverRecipe,
    pub cover: ManifoldSpec,
    pub node_map: Vec<usize>,
    /// `edge_map[cover_edge] = [base_edge, degree]`.
    pub edge_map: Vec<(usize, u32)>,
}

pub fn graph_cover_to_string(cover: &GraphCover) -> String {
    let doc = GraphCoverDocument {
        version: DOCUMENT_VERSION.to_string(),
        recipe: cover.recipe,
        cover: ManifoldSpec {
            summands: vec![crate::decomposition::Summand::Irreducible {
                graph: cover.output.clone(),
            }],
        },
        node_map: cover.node_map.clone(),
        edge_map: cover.edge_map.clone(),
    };
    let value = serde_json::to_value(&doc).expect("cover serialization cannot fail");
    to_canonical_pretty(&value)
}

/// Parses `Z3*Z5*Z` style group syntax. Factor `i` (from 1) is named `g<i>`.
pub fn parse_group(text: &str) -> Result<Group, DocError> {
    let mut factors: Vec<(String, u32)> = Vec::new();
    for (i, part) in text.trim().split('*').enumerate() {
        let part = part.trim();
        let order = match part.strip_prefix('Z') {
            Some("") => 0u32,
            Some(num) => {
                let n: u32 = num.parse().map_err(|_| DocError::GroupSyntax {
                    part: part.to_string(),
                    reason: format!("`{num}` is not a factor order"),
                })?;
                if n == 1 {
                    return Err(DocError::GroupSyntax {
                        part: part.to_string(),
                        reason: "order-1 factors are trivial; drop them".into(),
                    });
                }
                n
            }
            None => {
                return Err(DocError::GroupSyntax {
                    part: part.to_string(),
                    reason: "expected `Z` or `Z<order>`".into(),
                })
            }
        };
        factors.push((format!("g{}", i + 1), order));
    }
    Group::new(factors).map_err(|e| DocError::GroupSyntax {
        part: text.to_string(),
        reason: e.to_string(),
    })
}
