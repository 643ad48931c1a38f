//! Positive Dehn-twist words and the moves that rewrite them.
//!
//! A word `A₁A₂⋯Aₙ` stands for the composition with `Aₙ` applied first, so
//! its homology action is `M(A₁)·M(A₂)⋯M(Aₙ)`. With this order the Hurwitz
//! move `(A, B) → (B^A, A)`, where `B^A` is the twist about `A(b)`, keeps the
//! product fixed.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{HomologyClass, Matrix};
use crate::ledger::{h1_of_fiber_quotient, InvariantLedger, LedgerError};
use crate::relators::RelatorTemplate;
use crate::scalar::{cast, Scalar};
use crate::surface::{CurveExpr, CurveName, HomologyEvaluator, MapExpr, SurfaceError, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("index {index} out of range for a word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("word has {found} literal {curve} letters, {wanted} requested")]
    InsufficientOccurrences { curve: CurveName, found: usize, wanted: usize },
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("word is not flagged as a relator")]
    NotRelator,
    #[error("ledger twist count {n} does not match {len} letters")]
    LedgerLength { n: i64, len: usize },
    #[error("{template} does not match at position {at}")]
    PatternMismatch { template: String, at: usize },
    #[error("bad template parameters: {0}")]
    TemplateParameters(String),
    #[error("letters {0} and {1} are not declared disjoint")]
    NotDisjoint(String, String),
    #[error("homology check failed: {0}")]
    Homology(String),
    #[error("letter budget exceeded: {needed} letters needed, limit {limit}")]
    Budget { needed: u128, limit: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    Forward,
    Inverse,
}

/// One applied operation, for the human-readable trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntry {
    pub op: String,
    pub detail: String,
}

/// A positive factorization with its ledger. Letters are kept normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    genus: usize,
    letters: Vec<CurveExpr>,
    ledger: InvariantLedger<i64>,
    provenance: Vec<ProvenanceEntry>,
}

impl Factorization {
    pub fn new(
        genus: usize,
        letters: Vec<CurveExpr>,
        ledger: InvariantLedger<i64>,
        provenance: Vec<ProvenanceEntry>,
    ) -> Result<Self, WordError> {
        if ledger.genus != genus {
            return Err(WordError::GenusMismatch(genus, ledger.genus));
        }
        if ledger.n != letters.len() as i64 {
            return Err(WordError::LedgerLength { n: ledger.n, len: letters.len() });
        }
        Ok(Self { genus, letters, ledger, provenance })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[CurveExpr] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn ledger(&self) -> &InvariantLedger<i64> {
        &self.ledger
    }

    pub fn provenance(&self) -> &[ProvenanceEntry] {
        &self.provenance
    }

    pub fn into_parts(self) -> (usize, Vec<CurveExpr>, InvariantLedger<i64>, Vec<ProvenanceEntry>) {
        (self.genus, self.letters, self.ledger, self.provenance)
    }

    pub fn with_note(mut self, op: &str, detail: impl Into<String>) -> Self {
        self.provenance.push(ProvenanceEntry { op: op.to_string(), detail: detail.into() });
        self
    }

    /// Number of letters literally equal to `Named(c)`.
    pub fn count_literal(&self, c: CurveName) -> usize {
        self.letters.iter().filter(|l| l.is_named(c)).count()
    }

    fn rebuilt(&self, letters: Vec<CurveExpr>, ledger: InvariantLedger<i64>, op: &str, detail: String) -> Self {
        debug_assert_eq!(ledger.n, letters.len() as i64);
        let mut provenance = self.provenance.clone();
        provenance.push(ProvenanceEntry { op: op.to_string(), detail });
        Self { genus: self.genus, letters, ledger, provenance }
    }

    fn check_genus<S: Scalar>(&self, surface: &SurfaceModel<S>) -> Result<(), WordError> {
        if surface.genus() != self.genus {
            return Err(WordError::GenusMismatch(self.genus, surface.genus()));
        }
        Ok(())
    }

    /// One Hurwitz move on the letters at `i` and `i + 1` (0-based).
    /// Right: `(A, B) → (B^A, A)`. Left: `(A, B) → (B, A^{B⁻¹})`.
    pub fn hurwitz_move<S: Scalar>(
        &self,
        surface: &SurfaceModel<S>,
        i: usize,
        direction: Direction,
    ) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        if i + 1 >= self.len() {
            return Err(WordError::IndexOutOfRange { index: i, len: self.len() });
        }
        let (a, b) = (self.letters[i].clone(), self.letters[i + 1].clone());
        let mut letters = self.letters.clone();
        match direction {
            Direction::Right => {
                let t = MapExpr::Twist(Arc::new(a.clone()));
                letters[i] = surface.reduce_image(&t, b);
                letters[i + 1] = a;
            }
            Direction::Left => {
                let t = MapExpr::power(MapExpr::Twist(Arc::new(b.clone())), -1);
                letters[i] = b;
                letters[i + 1] = surface.reduce_image(&t, a);
            }
        }
        Ok(self.rebuilt(letters, self.ledger.clone(), "hurwitz", format!("{direction:?} at {i}").to_lowercase()))
    }

    /// Moves the block `[start, start + len)` to the right past the letters up
    /// to `end`, each passed letter `U` becoming `B(U)` for the block product
    /// `B`. Same result as the corresponding sequence of right Hurwitz moves.
    pub fn move_block_right<S: Scalar>(
        &self,
        surface: &SurfaceModel<S>,
        start: usize,
        len: usize,
        end: usize,
    ) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        if start + len > end || end > self.len() {
            return Err(WordError::IndexOutOfRange { index: end, len: self.len() });
        }
        let block = &self.letters[start..start + len];
        let map = surface.normalize_map(&block_product(block));
        let mut letters = Vec::with_capacity(self.len());
        letters.extend_from_slice(&self.letters[..start]);
        letters.extend(self.letters[start + len..end].iter().map(|u| surface.reduce_image(&map, u.clone())));
        letters.extend_from_slice(block);
        letters.extend_from_slice(&self.letters[end..]);
        let detail = format!("block [{start}, {}) past [{}, {end})", start + len, start + len);
        Ok(self.rebuilt(letters, self.ledger.clone(), "move_block_right", detail))
    }

    /// Brings the last `count` literal `c` letters to the end of the word,
    /// conjugating the letters they pass. Equivalent to repeated right
    /// Hurwitz moves, done in a single pass.
    pub fn gather_right<S: Scalar>(
        &self,
        surface: &SurfaceModel<S>,
        c: CurveName,
        count: usize,
    ) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        let c = surface.table().canonical(c);
        let positions: Vec<usize> = (0..self.len()).filter(|&i| self.letters[i].is_named(c)).collect();
        if positions.len() < count {
            return Err(WordError::InsufficientOccurrences { curve: c, found: positions.len(), wanted: count });
        }
        let first_selected = positions.len() - count;
        let first = positions.get(first_selected).copied().unwrap_or(self.len());
        let twist = MapExpr::twist_named(c);
        let mut letters = Vec::with_capacity(self.len());
        letters.extend_from_slice(&self.letters[..first]);
        let mut k = 0i64;
        for letter in &self.letters[first..] {
            if letter.is_named(c) {
                k += 1;
                continue;
            }
            let map = if k == 1 { twist.clone() } else { MapExpr::power(twist.clone(), k) };
            letters.push(surface.reduce_image(&map, letter.clone()));
        }
        letters.extend(std::iter::repeat_n(CurveExpr::Named(c), count));
        Ok(self.rebuilt(letters, self.ledger.clone(), "gather_right", format!("{count} x {c}")))
    }

    /// Every letter `e` becomes `m(e)`; the ledger is unchanged.
    pub fn global_conjugate<S: Scalar>(&self, surface: &SurfaceModel<S>, m: &MapExpr) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        surface.matrix_of_map(m)?;
        let m = surface.normalize_map(m);
        let letters = self.letters.iter().map(|e| surface.reduce_image(&m, e.clone())).collect();
        Ok(self.rebuilt(letters, self.ledger.clone(), "conjugate", m.to_string()))
    }

    /// `W₁ W₂^ψ`.
    pub fn fiber_sum<S: Scalar>(
        &self,
        other: &Factorization,
        surface: &SurfaceModel<S>,
        psi: &MapExpr,
    ) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        other.check_genus(surface)?;
        if !self.ledger.flags.is_relator || !other.ledger.flags.is_relator {
            return Err(WordError::NotRelator);
        }
        let conj = other.global_conjugate(surface, psi)?;
        let mut letters = self.letters.clone();
        letters.extend(conj.letters);
        let ledger = self.ledger.fiber_sum(&other.ledger)?;
        let detail = format!("{} letters + {} letters under {psi}", self.len(), other.len());
        Ok(self.rebuilt(letters, ledger, "fiber_sum", detail))
    }

    /// `(a^r)(b^r) → (ab)^r` at `start`, for disjoint `a`, `b`: a sequence of
    /// Hurwitz moves that only swap commuting letters.
    pub fn interleave<S: Scalar>(&self, surface: &SurfaceModel<S>, start: usize, r: usize) -> Result<Self, WordError> {
        if start + 2 * r > self.len() {
            return Err(WordError::IndexOutOfRange { index: start + 2 * r, len: self.len() });
        }
        if r == 0 {
            return Ok(self.clone());
        }
        let a = &self.letters[start];
        let b = &self.letters[start + r];
        let uniform = self.letters[start..start + r].iter().all(|l| l == a)
            && self.letters[start + r..start + 2 * r].iter().all(|l| l == b);
        if !uniform {
            return Err(WordError::PatternMismatch { template: format!("({a})^{r}({b})^{r}"), at: start });
        }
        if !surface.curves_disjoint(a, b) {
            return Err(WordError::NotDisjoint(a.to_string(), b.to_string()));
        }
        let mut letters = self.letters.clone();
        for j in 0..r {
            letters[start + 2 * j] = a.clone();
            letters[start + 2 * j + 1] = b.clone();
        }
        Ok(self.rebuilt(letters, self.ledger.clone(), "interleave", format!("({a} {b})^{r} at {start}")))
    }

    /// Replaces one side of `t` at `at` by the other.
    pub fn substitute<S: Scalar>(
        &self,
        surface: &SurfaceModel<S>,
        at: usize,
        t: &RelatorTemplate,
        direction: Substitution,
    ) -> Result<Self, WordError> {
        self.substitute_many(surface, &[at], t, direction)
    }

    /// Substitutions at several non-overlapping positions of the current
    /// word, processed front to back. Same as applying them one at a time
    /// with positions shifted accordingly.
    pub fn substitute_many<S: Scalar>(
        &self,
        surface: &SurfaceModel<S>,
        positions: &[usize],
        t: &RelatorTemplate,
        direction: Substitution,
    ) -> Result<Self, WordError> {
        self.check_genus(surface)?;
        if t.genus != self.genus {
            return Err(WordError::GenusMismatch(self.genus, t.genus));
        }
        let (pattern, replacement, sign) = match direction {
            Substitution::Forward => (&t.lhs, &t.rhs, 1),
            Substitution::Inverse => (&t.rhs, &t.lhs, -1),
        };
        check_template_homology(surface, t)?;
        let mut letters = Vec::with_capacity(
            self.len() + positions.len() * replacement.len().saturating_sub(pattern.len()),
        );
        let mut cursor = 0;
        for &at in positions {
            if at < cursor || at + pattern.len() > self.len() {
                return Err(WordError::IndexOutOfRange { index: at, len: self.len() });
            }
            if self.letters[at..at + pattern.len()] != pattern[..] {
                return Err(WordError::PatternMismatch { template: t.name(), at });
            }
            letters.extend_from_slice(&self.letters[cursor..at]);
            letters.extend_from_slice(replacement);
            cursor = at + pattern.len();
        }
        letters.extend_from_slice(&self.letters[cursor..]);
        let k = positions.len() as i64;
        let mut ledger = self.ledger.shifted(&(sign * k * t.delta_n), &(sign * k * t.delta_sigma));
        ledger.flags.is_fiber_sum = false;
        let detail = format!("{} {:?} at {positions:?}", t.name(), direction).to_lowercase();
        Ok(self.rebuilt(letters, ledger, "substitute", detail))
    }

    /// First position where `t` applies in the given direction.
    pub fn find_pattern(&self, t: &RelatorTemplate, direction: Substitution) -> Option<usize> {
        let pattern = match direction {
            Substitution::Forward => &t.lhs,
            Substitution::Inverse => &t.rhs,
        };
        if pattern.is_empty() {
            return Some(0);
        }
        self.letters.windows(pattern.len()).position(|w| w == &pattern[..])
    }

    pub fn homology_classes<S: Scalar>(&self, surface: &SurfaceModel<S>) -> Result<Vec<HomologyClass<S>>, WordError> {
        self.check_genus(surface)?;
        let mut eval = HomologyEvaluator::new(surface);
        Ok(self.letters.iter().map(|e| eval.curve(e)).collect::<Result<_, _>>()?)
    }

    /// `M(A₁)⋯M(Aₙ)`.
    pub fn product_matrix<S: Scalar>(&self, surface: &SurfaceModel<S>) -> Result<Matrix<S>, WordError> {
        let classes = self.homology_classes(surface)?;
        transvection_product(surface.lattice().dim(), &classes)
    }

    /// Whether the word acts trivially on homology.
    pub fn verify_relator_homology<S: Scalar>(&self, surface: &SurfaceModel<S>) -> Result<bool, WordError> {
        Ok(self.product_matrix(surface)?.is_identity())
    }

    pub fn h1_quotient<S: Scalar>(&self, surface: &SurfaceModel<S>) -> Result<Vec<S>, WordError> {
        self.check_genus(surface)?;
        Ok(h1_of_fiber_quotient(surface, &self.letters)?)
    }
}

/// `T_{b₁}∘T_{b₂}∘⋯` with runs of equal curves collapsed to powers.
fn block_product(block: &[CurveExpr]) -> MapExpr {
    let mut factors: Vec<MapExpr> = Vec::new();
    let mut i = 0;
    while i < block.len() {
        let mut j = i;
        while j < block.len() && block[j] == block[i] {
            j += 1;
        }
        let t = MapExpr::Twist(Arc::new(block[i].clone()));
        factors.push(if j - i == 1 { t } else { MapExpr::power(t, (j - i) as i64) });
        i = j;
    }
    if factors.len() == 1 { factors.pop().unwrap() } else { MapExpr::Compose(factors) }
}

fn check_template_homology<S: Scalar>(surface: &SurfaceModel<S>, t: &RelatorTemplate) -> Result<(), WordError> {
    let dim = surface.lattice().dim();
    let mut eval = HomologyEvaluator::new(surface);
    let mut side = |v: &[CurveExpr]| -> Result<Matrix<S>, WordError> {
        let classes: Vec<HomologyClass<S>> = v.iter().map(|e| eval.curve(e)).collect::<Result<_, _>>()?;
        transvection_product(dim, &classes)
    };
    if side(&t.lhs)? != side(&t.rhs)? {
        return Err(WordError::Homology(format!("{}: sides act differently on homology", t.name())));
    }
    Ok(())
}

/// `P · T_c` in place, for row-major `p` of size `dim × dim`:
/// column `j` gains `⟨e_j, c⟩ · (P c)`.
macro_rules! right_multiply_transvection {
    ($p:expr, $c:expr, $dim:expr, $mul:expr, $add:expr) => {{
        let g = $dim / 2;
        let mut pc = Vec::with_capacity($dim);
        for i in 0..$dim {
            let mut acc = Default::default();
            for k in 0..$dim {
                if !$c[k].is_zero() {
                    acc = $add(acc, $mul(&$p[i * $dim + k], &$c[k])?)?;
                }
            }
            pc.push(acc);
        }
        for j in 0..$dim {
            let f = if j < g { $c[j + g].clone() } else { -$c[j - g].clone() };
            if f.is_zero() {
                continue;
            }
            for i in 0..$dim {
                let delta = $mul(&f, &pc[i])?;
                let cell = std::mem::take(&mut $p[i * $dim + j]);
                $p[i * $dim + j] = $add(cell, delta)?;
            }
        }
    }};
}

fn product_i128(dim: usize, classes: &[Vec<i128>]) -> Option<Vec<i128>> {
    let mut p = vec![0i128; dim * dim];
    for i in 0..dim {
        p[i * dim + i] = 1;
    }
    let mul = |a: &i128, b: &i128| a.checked_mul(*b);
    let add = |a: i128, b: i128| a.checked_add(b);
    for c in classes {
        right_multiply_transvection!(p, c, dim, mul, add);
    }
    Some(p)
}

fn product_bigint(dim: usize, classes: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); dim * dim];
    for i in 0..dim {
        p[i * dim + i] = BigInt::from(1);
    }
    let mul = |a: &BigInt, b: &BigInt| Some(a * b);
    let add = |a: BigInt, b: BigInt| Some(a + b);
    let mut run = || -> Option<()> {
        for c in classes {
            right_multiply_transvection!(p, c, dim, mul, add);
        }
        Some(())
    };
    run().expect("bigint arithmetic does not fail");
    p
}

/// Ordered product of the transvections about `classes`. Runs in `i128`
/// and falls back to big integers if an intermediate entry overflows.
pub fn transvection_product<S: Scalar>(dim: usize, classes: &[HomologyClass<S>]) -> Result<Matrix<S>, WordError> {
    let small: Option<Vec<Vec<i128>>> =
        classes.iter().map(|c| c.coeffs().iter().map(ToPrimitive::to_i128).collect()).collect();
    let entries: Vec<S> = match small.and_then(|cs| product_i128(dim, &cs)) {
        Some(p) => p.iter().map(|v| S::from_i128(*v)).collect::<Option<_>>(),
        None => {
            let big: Vec<Vec<BigInt>> = classes
                .iter()
                .map(|c| c.coeffs().iter().map(|v| cast::<S, BigInt>(v).expect("bigint holds any scalar")).collect())
                .collect();
            product_bigint(dim, &big).iter().map(cast::<BigInt, S>).collect::<Option<_>>()
        }
    }
    .ok_or_else(|| WordError::Homology("product matrix does not fit the scalar type".to_string()))?;
    let rows = entries.chunks(dim.max(1)).map(<[S]>::to_vec).collect();
    Ok(Matrix::from_rows(rows).map_err(SurfaceError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::LedgerFlags;
    use crate::relators::{hyperelliptic_word, relator_library, RelatorKind};
    use CurveName::*;

    type Surface = SurfaceModel<i64>;

    fn named(n: CurveName) -> CurveExpr {
        CurveExpr::Named(n)
    }

    fn word(g: usize, letters: Vec<CurveExpr>) -> Factorization {
        let n = letters.len() as i64;
        Factorization::new(g, letters, InvariantLedger::new(g, n, 0, LedgerFlags::default()), vec![]).unwrap()
    }

    fn base(g: usize) -> Factorization {
        let letters = hyperelliptic_word(g);
        let n = letters.len() as i64;
        let ledger = InvariantLedger::relator(g, n, -4 * (g as i64 + 1), "hyperelliptic");
        Factorization::new(g, letters, ledger, vec![]).unwrap()
    }

    #[test]
    fn hurwitz_examples() {
        let s = Surface::standard(3).unwrap();
        let w = word(3, vec![named(C(1)), named(C(2))]);
        let r = w.hurwitz_move(&s, 0, Direction::Right).unwrap();
        assert_eq!(r.letters()[0], CurveExpr::image(MapExpr::twist_named(C(1)), named(C(2))));
        assert_eq!(r.letters()[1], named(C(1)));
        let back = r.hurwitz_move(&s, 0, Direction::Left).unwrap();
        assert_eq!(back.letters(), w.letters());
        let again = w.hurwitz_move(&s, 0, Direction::Left).unwrap().hurwitz_move(&s, 0, Direction::Right).unwrap();
        assert_eq!(again.letters(), w.letters());

        let commuting = word(3, vec![named(C(1)), named(C(3))]).hurwitz_move(&s, 0, Direction::Right).unwrap();
        assert_eq!(commuting.letters(), &[named(C(3)), named(C(1))]);
        assert!(matches!(w.hurwitz_move(&s, 1, Direction::Right), Err(WordError::IndexOutOfRange { .. })));
    }

    #[test]
    fn hurwitz_keeps_product() {
        let s = Surface::standard(3).unwrap();
        let w = word(3, vec![named(C(1)), named(C(2)), named(U), named(C(4)), named(D(2))]);
        let p = w.product_matrix(&s).unwrap();
        let mut cur = w.clone();
        for (i, d) in [(0, Direction::Right), (2, Direction::Left), (1, Direction::Right), (3, Direction::Left)] {
            cur = cur.hurwitz_move(&s, i, d).unwrap();
            assert_eq!(cur.product_matrix(&s).unwrap(), p);
        }
    }

    #[test]
    fn gather_examples() {
        let s = Surface::standard(3).unwrap();
        let w = word(3, vec![named(C(1)), named(C(2)), named(C(1))]);
        let got = w.gather_right(&s, C(1), 2).unwrap();
        assert_eq!(
            got.letters(),
            &[CurveExpr::image(MapExpr::twist_named(C(1)), named(C(2))), named(C(1)), named(C(1))]
        );
        let w = word(3, vec![named(C(3)), named(C(1))]);
        assert_eq!(w.gather_right(&s, C(1), 1).unwrap().letters(), w.letters());
        let b = base(3);
        assert_eq!(b.gather_right(&s, C(1), 1).unwrap().letters(), b.letters());
        assert!(matches!(
            w.gather_right(&s, C(1), 2),
            Err(WordError::InsufficientOccurrences { found: 1, wanted: 2, .. })
        ));
    }

    /// The batched gather against literal Hurwitz moves.
    fn gather_by_moves(s: &Surface, w: &Factorization, c: CurveName, count: usize) -> Factorization {
        let mut cur = w.clone();
        for placed in 0..count {
            let end = cur.len() - placed;
            let pos = (0..end).rev().find(|&i| cur.letters()[i].is_named(c)).unwrap();
            for i in pos..end - 1 {
                cur = cur.hurwitz_move(s, i, Direction::Right).unwrap();
            }
        }
        cur
    }

    #[test]
    fn batched_gather_equals_moves() {
        let s = Surface::standard(3).unwrap();
        let b = base(3);
        for count in 1..=4 {
            let fast = b.gather_right(&s, C(1), count).unwrap();
            let slow = gather_by_moves(&s, &b, C(1), count);
            assert_eq!(fast.letters(), slow.letters(), "count {count}");
            assert_eq!(fast.count_literal(C(1)), 4);
            assert!(fast.letters()[b.len() - count..].iter().all(|l| l.is_named(C(1))));
        }
        let w = word(3, vec![named(C(2)), named(C(1)), named(C(2)), named(U), named(C(1)), named(C(2))]);
        for count in 1..=2 {
            assert_eq!(w.gather_right(&s, C(1), count).unwrap().letters(), gather_by_moves(&s, &w, C(1), count).letters());
        }
    }

    #[test]
    fn block_move_equals_moves() {
        let s = Surface::standard(3).unwrap();
        let w = word(3, vec![named(D(2)), named(D(2)), named(C(4)), named(U), named(C(5)), named(E(2))]);
        let fast = w.move_block_right(&s, 0, 2, 5).unwrap();
        let mut slow = w.clone();
        for i in [1, 2, 3, 0, 1, 2] {
            slow = slow.hurwitz_move(&s, i, Direction::Right).unwrap();
        }
        assert_eq!(fast.letters(), slow.letters());
        assert_eq!(fast.product_matrix(&s).unwrap(), w.product_matrix(&s).unwrap());
    }

    #[test]
    fn relators_act_trivially() {
        for g in 3..=6 {
            let s = Surface::standard(g).unwrap();
            assert!(base(g).verify_relator_homology(&s).unwrap());
            let mut templates = vec![relator_library(RelatorKind::Lantern, None, g).unwrap()];
            for h in 1..g {
                templates.push(relator_library(RelatorKind::OddChain, Some(h), g).unwrap());
                templates.push(relator_library(RelatorKind::EvenChain, Some(h), g).unwrap());
            }
            for t in templates {
                check_template_homology(&s, &t).unwrap();
            }
        }
        let s = Surface::standard(3).unwrap();
        assert!(!word(3, vec![named(C(1))]).verify_relator_homology(&s).unwrap());
    }

    #[test]
    fn conjugation_and_fiber_sum() {
        let s = Surface::standard(3).unwrap();
        let b = base(3);
        assert_eq!(b.global_conjugate(&s, &MapExpr::identity()).unwrap().letters(), b.letters());
        let f = b.fiber_sum(&b, &s, &MapExpr::identity()).unwrap();
        assert_eq!((f.ledger().n, f.ledger().sigma), (56, -32));
        assert!(f.ledger().flags.is_fiber_sum);
        assert!(f.verify_relator_homology(&s).unwrap());
        let not_relator = word(3, vec![named(C(1))]);
        assert_eq!(b.fiber_sum(&not_relator, &s, &MapExpr::identity()), Err(WordError::NotRelator));
    }

    #[test]
    fn substitution_deltas() {
        let s = Surface::standard(3).unwrap();
        let odd = relator_library(RelatorKind::OddChain, Some(1), 3).unwrap();
        let w = base(3);
        let mut letters = w.letters().to_vec();
        letters.extend([named(D(2)), named(E(2))]);
        let ledger = InvariantLedger::relator(3, 30, -16, "test");
        let w = Factorization::new(3, letters, ledger, vec![]).unwrap();
        let at = w.find_pattern(&odd, Substitution::Forward).unwrap();
        assert_eq!(at, 28);
        let fwd = w.substitute(&s, at, &odd, Substitution::Forward).unwrap();
        assert_eq!((fwd.ledger().n - w.ledger().n, fwd.ledger().sigma - w.ledger().sigma), (10, -6));
        assert_eq!(fwd.product_matrix(&s).unwrap(), w.product_matrix(&s).unwrap());
        let inv = fwd.substitute(&s, at, &odd, Substitution::Inverse).unwrap();
        assert_eq!(inv.letters(), w.letters());
        assert_eq!(inv.ledger().sigma, w.ledger().sigma);

        let lantern = relator_library(RelatorKind::Lantern, None, 3).unwrap();
        let lw = word(3, vec![named(LanternX), named(LanternY), named(LanternZ)]);
        let down = lw.substitute(&s, 0, &lantern, Substitution::Forward).unwrap();
        assert_eq!((down.ledger().n, down.ledger().sigma), (4, -1));
        let up = down.substitute(&s, 0, &lantern, Substitution::Inverse).unwrap();
        assert_eq!((up.ledger().n, up.ledger().sigma), (3, 0));
        assert!(matches!(
            lw.substitute(&s, 1, &lantern, Substitution::Forward),
            Err(WordError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            w.substitute(&s, 0, &odd, Substitution::Forward),
            Err(WordError::PatternMismatch { .. })
        ));
    }

    #[test]
    fn many_substitutions_equal_sequential() {
        let s = Surface::standard(3).unwrap();
        let odd = relator_library(RelatorKind::OddChain, Some(1), 3).unwrap();
        let letters = vec![named(D(2)), named(E(2)), named(C(4)), named(D(2)), named(E(2))];
        let w = word(3, letters);
        let batch = w.substitute_many(&s, &[0, 3], &odd, Substitution::Forward).unwrap();
        let seq = w
            .substitute(&s, 0, &odd, Substitution::Forward)
            .unwrap()
            .substitute(&s, 3 + 10, &odd, Substitution::Forward)
            .unwrap();
        assert_eq!(batch.letters(), seq.letters());
        assert_eq!(batch.ledger(), seq.ledger());
    }

    #[test]
    fn interleave_disjoint_blocks() {
        let s = Surface::standard(3).unwrap();
        let w = word(3, vec![named(D(2)), named(D(2)), named(E(2)), named(E(2))]);
        let out = w.interleave(&s, 0, 2).unwrap();
        assert_eq!(out.letters(), &[named(D(2)), named(E(2)), named(D(2)), named(E(2))]);
        let bad = word(3, vec![named(C(1)), named(C(2))]);
        assert!(matches!(bad.interleave(&s, 0, 1), Err(WordError::NotDisjoint(..))));
    }

    #[test]
    fn big_entries_fall_back() {
        let s = SurfaceModel::<BigInt>::standard(2).unwrap();
        let one = [C(1), C(1), C(1), C(2), C(2), C(2)].map(named);
        let letters = std::iter::repeat_n(one, 60).flatten().collect();
        let w = word(2, letters);
        let p = w.product_matrix(&s).unwrap();
        assert!(!p.is_identity());
    }
}
