//! Words and conjugacy in free products of cyclic groups.
//!
//! A group here is `Z_{n_1} * Z_{n_2} * ... * Z_{n_k}` where each factor is
//! cyclic of finite order `n ≥ 2` or infinite (`order = 0`). Elements are
//! reduced words: sequences of letters `x_i^e` with nonzero exponents in which
//! adjacent letters come from distinct factors. For finite factors the
//! exponent is kept in the canonical range `1..=n-1`, so e.g. the inverse of
//! the order-2 generator is the generator itself and degenerate identities
//! like `c1*c2*c1^-1*c2^-1 = c1*c2*c1*c2` in `Z2*Z2` hold on the nose.
//!
//! Conjugacy is decided through cyclic words: every element is conjugate to a
//! cyclically reduced word (first and last letters from distinct factors,
//! or length ≤ 1), and two cyclically reduced words are conjugate exactly
//! when one is a rotation of the other. Each decision ships evidence — a
//! conjugating element that multiplies out exactly — and a deliberately naive
//! search oracle is provided so the rotation-based decision can be checked
//! against exhaustive enumeration.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// One free factor: a named cyclic group. `order == 0` means infinite cyclic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicFactor {
    pub name: String,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GroupData {
    factors: Vec<CyclicFactor>,
}

/// A free product of cyclic groups. Cheap to clone; compared by value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Group(Arc<GroupData>);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group must have at least one factor")]
    Empty,
    #[error("factor order {0} is invalid (must be 0 for infinite or >= 2)")]
    BadOrder(u32),
    #[error("duplicate factor name `{0}`")]
    DuplicateName(String),
    #[error("factor index {index} out of range (group has {count} factors)")]
    NoSuchFactor { index: usize, count: usize },
    #[error("words belong to different groups")]
    GroupMismatch,
    #[error("letter exponent must be nonzero")]
    ZeroExponent,
}

/// A single letter `factor^exponent` of a reduced word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: usize,
    pub exponent: i64,
}

/// A reduced word: adjacent letters from distinct factors, all exponents
/// nonzero and canonical. The empty word is the identity.
#[derive(Clone)]
pub struct NFWord {
    group: Group,
    letters: Vec<Letter>,
}

/// A cyclically reduced word stored in its canonical rotation (the
/// lexicographically least one under `(factor, exponent)` order). Two
/// elements are conjugate exactly when their canonical cyclic words coincide.
#[derive(Clone)]
pub struct CyclicWord {
    group: Group,
    letters: Vec<Letter>,
}

impl Group {
    pub fn new<S: Into<String>>(factors: Vec<(S, u32)>) -> Result<Group, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::Empty);
        }
        let mut out = Vec::with_capacity(factors.len());
        for (name, order) in factors {
            let name = name.into();
            if order == 1 {
                return Err(GroupError::BadOrder(order));
            }
            if out.iter().any(|f: &CyclicFactor| f.name == name) {
                return Err(GroupError::DuplicateName(name));
            }
            out.push(CyclicFactor { name, order });
        }
        Ok(Group(Arc::new(GroupData { factors: out })))
    }

    /// Convenience constructor with positional factor names `c1, c2, ...`.
    pub fn from_orders(orders: &[u32]) -> Result<Group, GroupError> {
        Group::new(
            orders
                .iter()
                .enumerate()
                .map(|(i, &n)| (format!("c{}", i + 1), n))
                .collect(),
        )
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.0.factors
    }

    pub fn factor_count(&self) -> usize {
        self.0.factors.len()
    }

    pub fn factor_order(&self, index: usize) -> Result<u32, GroupError> {
        self.0
            .factors
            .get(index)
            .map(|f| f.order)
            .ok_or(GroupError::NoSuchFactor {
                index,
                count: self.0.factors.len(),
            })
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.0.factors.iter().position(|f| f.name == name)
    }

    pub fn identity(&self) -> NFWord {
        NFWord {
            group: self.clone(),
            letters: Vec::new(),
        }
    }

    /// The single-letter word `factor^exponent` (reduced; may be the identity
    /// if the exponent vanishes modulo the factor order).
    pub fn letter(&self, factor: usize, exponent: i64) -> Result<NFWord, GroupError> {
        self.reduce(&[(factor, exponent)])
    }

    /// Reduces a raw letter sequence: merges adjacent letters from the same
    /// factor, folds finite-factor exponents into `1..=n-1`, drops vanishing
    /// letters, and repeats until the word is reduced.
    pub fn reduce(&self, raw: &[(usize, i64)]) -> Result<NFWord, GroupError> {
        let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
        for &(factor, exponent) in raw {
            let order = self.factor_order(factor)?;
            push_reduced(&mut stack, Letter { factor, exponent }, order, self)?;
        }
        Ok(NFWord {
            group: self.clone(),
            letters: stack,
        })
    }

    fn canonical_exponent(&self, factor: usize, exponent: i64) -> i64 {
        let order = self.0.factors[factor].order;
        if order == 0 {
            exponent
        } else {
            exponent.rem_euclid(order as i64)
        }
    }
}

fn push_reduced(
    stack: &mut Vec<Letter>,
    letter: Letter,
    order: u32,
    group: &Group,
) -> Result<(), GroupError> {
    let _ = order;
    let mut exponent = group.canonical_exponent(letter.factor, letter.exponent);
    if let Some(top) = stack.last() {
        if top.factor == letter.factor {
            let merged = group.canonical_exponent(letter.factor, top.exponent + letter.exponent);
            stack.pop();
            if merged == 0 {
                return Ok(());
            }
            exponent = merged;
            // The merge may expose a new same-factor adjacency only if the
            // merged letter vanished, which we just handled; a nonzero merge
            // keeps the stack reduced.
            stack.push(Letter {
                factor: letter.factor,
                exponent,
            });
            return Ok(());
        }
    }
    if exponent != 0 {
        stack.push(Letter {
            factor: letter.factor,
            exponent,
        });
    }
    Ok(())
}

impl NFWord {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &NFWord) -> Result<NFWord, GroupError> {
        if self.group != other.group {
            return Err(GroupError::GroupMismatch);
        }
        let raw: Vec<(usize, i64)> = self
            .letters
            .iter()
            .chain(other.letters.iter())
            .map(|l| (l.factor, l.exponent))
            .collect();
        self.group.reduce(&raw)
    }

    pub fn inverse(&self) -> NFWord {
        let raw: Vec<(usize, i64)> = self
            .letters
            .iter()
            .rev()
            .map(|l| (l.factor, -l.exponent))
            .collect();
        self.group
            .reduce(&raw)
            .expect("inverting a reduced word cannot fail")
    }

    pub fn pow(&self, s: i64) -> NFWord {
        if s == 0 {
            return self.group.identity();
        }
        let base = if s > 0 { self.clone() } else { self.inverse() };
        let mut out = self.group.identity();
        for _ in 0..s.unsigned_abs() {
            out = out.multiply(&base).expect("same group");
        }
        out
    }

    /// Conjugation `u * self * u^-1`.
    pub fn conjugated_by(&self, u: &NFWord) -> Result<NFWord, GroupError> {
        u.multiply(self)?.multiply(&u.inverse())
    }

    /// Cyclic reduction: returns `(c, u)` with `self = u * c * u^-1` where `c`
    /// is the canonical cyclic word. The conjugator is built from the stripped
    /// prefix letters and the rotation offset.
    pub fn cyclically_reduce(&self) -> (CyclicWord, NFWord) {
        let mut letters = self.letters.clone();
        let mut conj: Vec<Letter> = Vec::new();
        // Strip: while the first and last letters share a factor, conjugate by
        // the first letter. This rotates it to the end where it merges.
        loop {
            if letters.len() < 2 {
                break;
            }
            let first = letters[0];
            let last = *letters.last().unwrap();
            if first.factor != last.factor {
                break;
            }
            conj.push(first);
            let merged = self
                .group
                .canonical_exponent(first.factor, last.exponent + first.exponent);
            letters.remove(0);
            letters.pop();
            if merged != 0 {
                letters.push(Letter {
                    factor: first.factor,
                    exponent: merged,
                });
            }
        }
        // Rotate to the canonical (lexicographically least) rotation.
        let offset = canonical_rotation_offset(&letters);
        if offset > 0 {
            conj.extend_from_slice(&letters[..offset]);
            letters.rotate_left(offset);
        }
        let conj_word = self
            .group
            .reduce(
                &conj
                    .iter()
                    .map(|l| (l.factor, l.exponent))
                    .collect::<Vec<_>>(),
            )
            .expect("valid letters");
        (
            CyclicWord {
                group: self.group.clone(),
                letters,
            },
            conj_word,
        )
    }
}

fn canonical_rotation_offset(letters: &[Letter]) -> usize {
    if letters.len() < 2 {
        return 0;
    }
    let n = letters.len();
    let key = |start: usize| (0..n).map(move |i| letters[(start + i) % n]);
    let mut best = 0;
    for cand in 1..n {
        if key(cand).lt(key(best)) {
            best = cand;
        }
    }
    best
}

impl CyclicWord {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The canonical rotation, read back as a reduced word.
    pub fn as_nfword(&self) -> NFWord {
        NFWord {
            group: self.group.clone(),
            letters: self.letters.clone(),
        }
    }
}

impl PartialEq for NFWord {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.letters == other.letters
    }
}
impl Eq for NFWord {}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.letters == other.letters
    }
}
impl Eq for CyclicWord {}

impl std::hash::Hash for NFWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl std::hash::Hash for CyclicWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

fn fmt_letters(group: &Group, letters: &[Letter], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            write!(f, ".")?;
        }
        write!(f, "{}^{}", group.factors()[l.factor].name, l.exponent)?;
    }
    Ok(())
}

impl fmt::Display for NFWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(&self.group, &self.letters, f)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(&self.group, &self.letters, f)
    }
}

impl fmt::Debug for NFWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NFWord({})", self)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({})", self)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors().iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if fac.order == 0 {
                write!(f, "Z")?;
            } else {
                write!(f, "Z{}", fac.order)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group(")?;
        for (i, fac) in self.factors().iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}:", fac.name)?;
            if fac.order == 0 {
                write!(f, "Z")?;
            } else {
                write!(f, "Z{}", fac.order)?;
            }
        }
        write!(f, ")")
    }
}

/// Decides conjugacy. Returns a conjugator `u` with `u * w1 * u^-1 = w2` when
/// the words are conjugate, `None` otherwise.
pub fn are_conjugate(w1: &NFWord, w2: &NFWord) -> Result<Option<NFWord>, GroupError> {
    if w1.group() != w2.group() {
        return Err(GroupError::GroupMismatch);
    }
    let (c1, u1) = w1.cyclically_reduce();
    let (c2, u2) = w2.cyclically_reduce();
    if c1 != c2 {
        return Ok(None);
    }
    // w1 = u1 c u1^-1 and w2 = u2 c u2^-1, so (u2 u1^-1) w1 (u2 u1^-1)^-1 = w2.
    let u = u2.multiply(&u1.inverse())?;
    debug_assert_eq!(w1.conjugated_by(&u)?, *w2);
    Ok(Some(u))
}

/// Evidence that `w` is conjugate to `base^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerConjugacy {
    pub exponent: i64,
    pub conjugator: NFWord,
}

/// Searches for a nonzero `s` with `w` conjugate to `base^s`.
///
/// Cyclic length is a conjugacy invariant that is multiplicative on powers of
/// cyclic words of length ≥ 2, so only finitely many exponents can match; for
/// single-letter (or trivial) bases the candidates are bounded by the factor
/// order. If both words are the identity the convention is `s = 1`.
pub fn conjugate_to_power(w: &NFWord, base: &NFWord) -> Result<Option<PowerConjugacy>, GroupError> {
    if w.group() != base.group() {
        return Err(GroupError::GroupMismatch);
    }
    let (cb, _) = base.cyclically_reduce();
    let (cw, _) = w.cyclically_reduce();
    if cb.is_empty() {
        // base is the identity: only the identity is conjugate to its powers.
        return if cw.is_empty() {
            Ok(Some(PowerConjugacy {
                exponent: 1,
                conjugator: w.group().identity(),
            }))
        } else {
            Ok(None)
        };
    }
    let candidates: Vec<i64> = if cb.len() >= 2 {
        if cw.len() % cb.len() != 0 || cw.is_empty() {
            Vec::new()
        } else {
            let s = (cw.len() / cb.len()) as i64;
            vec![s, -s]
        }
    } else {
        // Single-letter base x^e: powers stay in the same factor, so try
        // exponents up to the factor order (both signs), smallest first.
        let order = w.group().factor_order(cb.letters()[0].factor)?;
        let bound = if order == 0 {
            // x^(e*s) must equal the single letter of cw (same factor); any
            // solution satisfies |e*s| = |f|, so |s| <= |f|.
            if cw.len() == 1 && cw.letters()[0].factor == cb.letters()[0].factor {
                cw.letters()[0].exponent.unsigned_abs()
            } else if cw.is_empty() {
                0 // infinite order: no nonzero power is trivial
            } else {
                0
            }
        } else {
            order as u64
        };
        let mut v = Vec::new();
        for k in 1..=bound as i64 {
            v.push(k);
            v.push(-k);
        }
        v
    };
    for s in candidates {
        if s == 0 {
            continue;
        }
        if let Some(u) = are_conjugate(&base.pow(s), w)? {
            // u * base^s * u^-1 = w, so the conjugator carrying w to base^s
            // is u^-1; report it pointing from w.
            return Ok(Some(PowerConjugacy {
                exponent: s,
                conjugator: u.inverse(),
            }));
        }
    }
    Ok(None)
}

/// Evidence that `w` lands in the cyclic subgroup generated by one of the
/// `bases`, up to conjugacy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMembership {
    pub base_index: usize,
    pub exponent: i64,
    pub conjugator: NFWord,
}

/// Tests `w` against each cyclic subgroup `<base>` in input order and reports
/// the first membership found. Identity bases are skipped (their subgroup is
/// trivial and can only absorb the identity).
pub fn conjugate_into_cyclic_subgroup_family(
    w: &NFWord,
    bases: &[NFWord],
) -> Result<Option<FamilyMembership>, GroupError> {
    for (i, base) in bases.iter().enumerate() {
        if base.is_identity() {
            if w.is_identity() {
                return Ok(Some(FamilyMembership {
                    base_index: i,
                    exponent: 1,
                    conjugator: w.group().identity(),
                }));
            }
            continue;
        }
        if let Some(p) = conjugate_to_power(w, base)? {
            return Ok(Some(FamilyMembership {
                base_index: i,
                exponent: p.exponent,
                conjugator: p.conjugator,
            }));
        }
    }
    Ok(None)
}

/// Exhaustive conjugacy search: enumerates reduced words `u` in order of
/// length, then lexicographically, and returns the first with
/// `u * w1 * u^-1 = w2`. Exponents of infinite factors are enumerated up to a
/// bound derived from the inputs (the rotation conjugator of any conjugate
/// pair only ever merges letters of the inputs, so the bound keeps the search
/// complete for `max_len >= len(w1) + len(w2)`).
pub fn oracle_conjugate_search(
    w1: &NFWord,
    w2: &NFWord,
    max_len: usize,
) -> Result<Option<NFWord>, GroupError> {
    if w1.group() != w2.group() {
        return Err(GroupError::GroupMismatch);
    }
    let group = w1.group().clone();
    if w1 == w2 {
        return Ok(Some(group.identity()));
    }
    let exp_bound: i64 = w1
        .letters()
        .iter()
        .chain(w2.letters().iter())
        .map(|l| l.exponent.abs())
        .sum::<i64>()
        .max(1);
    // Letter alphabet in lexicographic order.
    let mut alphabet: Vec<Letter> = Vec::new();
    for (i, fac) in group.factors().iter().enumerate() {
        if fac.order == 0 {
            for e in -exp_bound..=exp_bound {
                if e != 0 {
                    alphabet.push(Letter {
                        factor: i,
                        exponent: e,
                    });
                }
            }
        } else {
            for e in 1..fac.order as i64 {
                alphabet.push(Letter {
                    factor: i,
                    exponent: e,
                });
            }
        }
    }
    alphabet.sort();
    // Depth-first enumeration by length.
    for len in 1..=max_len {
        let mut stack: Vec<Letter> = Vec::new();
        if let Some(found) = enumerate(&group, &alphabet, &mut stack, len, w1, w2)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn enumerate(
    group: &Group,
    alphabet: &[Letter],
    stack: &mut Vec<Letter>,
    target_len: usize,
    w1: &NFWord,
    w2: &NFWord,
) -> Result<Option<NFWord>, GroupError> {
    if stack.len() == target_len {
        let u = NFWord {
            group: group.clone(),
            letters: stack.clone(),
        };
        if w1.conjugated_by(&u)? == *w2 {
            return Ok(Some(u));
        }
        return Ok(None);
    }
    for &l in alphabet {
        if let Some(top) = stack.last() {
            if top.factor == l.factor {
                continue;
            }
        }
        stack.push(l);
        if let Some(found) = enumerate(group, alphabet, stack, target_len, w1, w2)? {
            return Ok(Some(found));
        }
        stack.pop();
    }
    Ok(None)
}

/// Enumerates all reduced words up to `max_len`, exponents of infinite
/// factors bounded by `exp_bound`.
pub fn enumerate_reduced(g: &Group, max_len: usize, exp_bound: i64) -> Vec<NFWord> {
    let mut alphabet: Vec<Letter> = Vec::new();
    for (i, fac) in g.factors().iter().enumerate() {
        if fac.order == 0 {
            for e in -exp_bound..=exp_bound {
                if e != 0 {
                    alphabet.push(Letter {
                        factor: i,
                        exponent: e,
                    });
                }
            }
        } else {
            for e in 1..fac.order as i64 {
                alphabet.push(Letter {
                    factor: i,
                    exponent: e,
                });
            }
        }
    }
    let mut out = vec![g.identity()];
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &alphabet {
                if w.last().map(|t| t.factor) == Some(l.factor) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for v in &next {
            out.push(NFWord {
                group: g.clone(),
                letters: v.clone(),
            });
        }
        frontier = next;
    }
    out
}
