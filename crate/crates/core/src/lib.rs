//! Loop-product nontriviality certificates for closed oriented 3-manifolds.
//!
//! The library takes a description of a closed oriented 3-manifold — its
//! prime summands, and for irreducible summands the graph of geometric pieces
//! glued along tori — and decides whether the manifold (or an explicitly
//! constructed double cover of it) carries a nontrivial extended loop
//! product. The positive answers are backed by certificates whose steps are
//! exact computations in free products of cyclic groups: quotient
//! homomorphisms that are verified relator-by-relator, conjugacy decisions
//! with explicit conjugating elements, and power/subgroup exclusions. A
//! separate verifier replays every computation from the certificate payload
//! alone, so a certificate can be checked without trusting the prover.
//!
//! Module map:
//! - [`freeprod`]: reduced and cyclic words in free products of cyclic
//!   groups; conjugacy, power conjugacy, and a naive search oracle.
//! - [`presentations`]: finite presentations, the standard fibered-piece
//!   presentations, and verified quotient homomorphisms.
//! - [`decomposition`]: input model (summands, piece graphs), validation,
//!   and the case analysis that picks an argument.
//! - [`covers`]: orientation and fiberwise double covers, assembled
//!   double covers of graphs, with exact Euler-number bookkeeping.
//! - [`witness`]: the loop pairs used as witnesses, their product
//!   expansions, and the mod-2 survivor computation.
//! - [`certify`]: certificate data model, serialization, and the
//!   independent verifier.
//! - [`decide`]: the top-level decision procedure tying it all together.
//! - [`docfmt`]: the JSON documents and the word/group text syntax.

pub mod certify;
pub mod covers;
pub mod decide;
pub mod decomposition;
pub mod docfmt;
pub mod freeprod;
pub mod presentations;
pub mod witness;

pub use certify::{CertStep, Certificate, Verdict};
pub use decide::{decide, explain, DecideError};
pub use freeprod::{CyclicWord, Group, NFWord};
/// Exact rational type used for orbifold Euler numbers.
pub use num_rational::Rational64;
