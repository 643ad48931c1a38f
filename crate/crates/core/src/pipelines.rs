//! The slope constructions: doubling sequences built from one self fiber
//! sum plus odd chain substitutions, the simply connected low-slope family,
//! and lantern walks that push the slope down or up by a step.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Pow;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extension::{symplectic_extension, Constraint, ExtensionError};
use crate::ledger::{sanity_bounds, slope_report, BoundsReport, InvariantLedger, LedgerError, SlopeReport};
use crate::relators::{hyperelliptic_word, relator_library, RelatorKind, RelatorTemplate};
use crate::scalar::Scalar;
use crate::surface::{CurveExpr, CurveName, DeclaredDiffeo, MapExpr, SurfaceError, SurfaceModel};
use crate::word::{Factorization, Substitution, WordError};

pub const DEFAULT_MAX_LETTERS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("letter budget exceeded: {needed} letters needed, limit {limit}")]
    Budget { needed: BigInt, limit: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Build every word letter by letter.
    Explicit,
    /// Track `(n, σ)` only, in big integers.
    Ledger,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explicit => "explicit",
            Mode::Ledger => "ledger",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkDirection {
    Down,
    Up,
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn check_budget(needed: &BigInt, limit: usize) -> Result<(), PipelineError> {
    if *needed > BigInt::from(limit) {
        return Err(PipelineError::Budget { needed: needed.clone(), limit });
    }
    Ok(())
}

pub fn hyperelliptic_ledger(g: usize) -> InvariantLedger<BigInt> {
    let gg = g as i64;
    InvariantLedger::relator(g, big(8 * gg + 4), big(-4 * gg - 4), "hyperelliptic")
}

pub fn hyperelliptic_base(g: usize) -> Result<Factorization, PipelineError> {
    if g < 2 {
        return Err(PipelineError::Surface(SurfaceError::InvalidGenus(g)));
    }
    let letters = hyperelliptic_word(g);
    let ledger = hyperelliptic_ledger(g).cast()?;
    Ok(Factorization::new(g, letters, ledger, vec![])?.with_note("base", format!("hyperelliptic, genus {g}")))
}

/// `4h/(h+1)`.
pub fn slope_limit<S: Scalar>(h: &S) -> Ratio<S> {
    Ratio::new(S::of(4) * h.clone(), h.clone() + S::one())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm<S: Scalar> {
    pub k_sq: S,
    /// `4χ_f`, an integer even where `χ_f` is not yet known to be one.
    pub four_chi: S,
    pub lambda: Ratio<S>,
}

/// Invariants after `n` doubling steps from a base with `(K₀², χ₀)`.
pub fn closed_form_invariants<S: Scalar>(k0: &S, chi0: &S, r: &S, h: &S, n: u32) -> ClosedForm<S> {
    let two_n = num_traits::pow(S::of(2), n as usize);
    let grow = num_traits::pow(h.clone() + S::one(), n as usize) - S::one();
    let common = two_n.clone() * r.clone() * grow;
    let k_sq = two_n.clone() * k0.clone() + common.clone() * h.clone();
    let four_chi = two_n * S::of(4) * chi0.clone() + common * (h.clone() + S::one());
    let lambda = Ratio::new(S::of(4) * k_sq.clone(), four_chi.clone());
    ClosedForm { k_sq, four_chi, lambda }
}

/// The low-slope family value `(2^{n+1} + 8g − 10)/(2ⁿ + 2g − 1)`.
pub fn low_slope_family(g: usize, n: u32) -> Ratio<BigInt> {
    let two_n: BigInt = BigInt::from(2).pow(n);
    let g = BigInt::from(g);
    Ratio::new(&two_n * 2 + &g * 8 - 10, two_n + &g * 2 - 1)
}

/// The open window `(2, 2 + (4g − 8)/2ⁿ)` the family must fall into.
pub fn low_slope_window(g: usize, n: u32) -> (Ratio<BigInt>, Ratio<BigInt>) {
    let two = Ratio::from_integer(big(2));
    let width = Ratio::new(BigInt::from(4 * g as i64 - 8), BigInt::from(2).pow(n));
    (two.clone(), two + width)
}

fn declare_checked<S: Scalar>(surface: &mut SurfaceModel<S>, d: DeclaredDiffeo<S>) -> Result<MapExpr, PipelineError> {
    let report = surface.check_declared_consistency(&d);
    if !report.passed() {
        return Err(PipelineError::Precondition(format!("declared map {}: {}", report.map, report.failures.join("; "))));
    }
    let name = d.name.clone();
    surface.redeclare(d)?;
    Ok(MapExpr::Declared(name))
}

/// Declares a map `name` sending `source ↦ target` (up to sign on homology)
/// with the matrix found by [`symplectic_extension`].
pub fn declare_transport<S: Scalar>(
    surface: &mut SurfaceModel<S>,
    name: &str,
    pairs: &[(CurveName, CurveName)],
) -> Result<MapExpr, PipelineError> {
    let table = surface.table();
    let constraints = pairs
        .iter()
        .map(|(a, b)| Ok(Constraint::up_to_sign(table.class(*a)?.clone(), table.class(*b)?.clone())))
        .collect::<Result<Vec<_>, SurfaceError>>()?;
    let matrix = symplectic_extension(surface.lattice(), &constraints)?;
    let axioms: Vec<(CurveName, CurveName)> =
        pairs.iter().map(|(a, b)| (table.canonical(*a), table.canonical(*b))).collect();
    declare_checked(surface, DeclaredDiffeo::new(name, axioms, matrix))
}

/// The twist word `T_u T_b T_{c₁} T_u`, as a map expression.
pub fn chain_twist_word(b: CurveName) -> MapExpr {
    use CurveName::*;
    MapExpr::Compose(vec![
        MapExpr::twist_named(U),
        MapExpr::twist_named(b),
        MapExpr::twist_named(C(1)),
        MapExpr::twist_named(U),
    ])
}

/// `φ₁ = U D₂ C₁ U` and `φ₂ = U E₂ C₁ U`, declared with the curve images
/// the construction relies on. Both are checked against their matrices.
pub fn declare_low_slope_maps<S: Scalar>(surface: &mut SurfaceModel<S>) -> Result<(MapExpr, MapExpr), PipelineError> {
    use CurveName::*;
    let g = surface.genus();
    if g < 3 {
        return Err(PipelineError::Precondition(format!("genus {g} < 3")));
    }
    let fixed: Vec<CurveName> = std::iter::once(C(3)).chain((6..=2 * g + 1).map(C)).collect();
    let mut out = Vec::new();
    for (name, b) in [("phi1", D(2)), ("phi2", E(2))] {
        let matrix = surface.matrix_of_map(&chain_twist_word(b))?;
        let axioms = std::iter::once((C(1), b)).chain(fixed.iter().map(|&c| (c, c)));
        out.push(declare_checked(surface, DeclaredDiffeo::new(name, axioms, matrix))?);
    }
    let phi2 = out.pop().unwrap();
    Ok((out.pop().unwrap(), phi2))
}

/// `ψ` with `c₁ ↦ c₄`, `c₂ ↦ c₅`.
pub fn declare_psi<S: Scalar>(surface: &mut SurfaceModel<S>) -> Result<MapExpr, PipelineError> {
    use CurveName::*;
    declare_transport(surface, "psi", &[(C(1), C(4)), (C(2), C(5))])
}

/// Maps for a general doubling step: `c₁ ↦ d_{h+1}` and `c₁ ↦ e_{h+1}`.
pub fn declare_chain_maps<S: Scalar>(
    surface: &mut SurfaceModel<S>,
    h: usize,
) -> Result<(MapExpr, MapExpr), PipelineError> {
    use CurveName::*;
    let phi1 = declare_transport(surface, &format!("phi1_h{h}"), &[(C(1), D(h + 1))])?;
    let phi2 = declare_transport(surface, &format!("phi2_h{h}"), &[(C(1), E(h + 1))])?;
    Ok((phi1, phi2))
}

/// One row of a doubling sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRow {
    pub i: usize,
    pub r: BigInt,
    pub report: SlopeReport<BigInt>,
    pub closed_form_ok: bool,
    /// Explicit mode only: the word acts trivially on homology.
    pub homology_ok: Option<bool>,
    /// Explicit mode only: twist count and literal `c₁` count laws.
    pub count_ok: Option<bool>,
}

impl StepRow {
    pub fn passed(&self) -> bool {
        self.closed_form_ok && self.homology_ok != Some(false) && self.count_ok != Some(false)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineState {
    pub word: Option<Factorization>,
    pub ledger: InvariantLedger<BigInt>,
    pub r: BigInt,
    pub step: usize,
    pub h: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceParams {
    pub h: usize,
    pub r: usize,
    pub n: usize,
    pub mode: Mode,
    pub max_letters: usize,
}

/// One doubling step: `W_{i+1} = V^{φ₁} V^{D^r φ₂} (C₁⋯C_{2h+1})^{(2h+2)r}`.
pub fn thm124_step<S: Scalar>(
    surface: &SurfaceModel<S>,
    state: &PipelineState,
    phi1: &MapExpr,
    phi2: &MapExpr,
    max_letters: usize,
) -> Result<PipelineState, PipelineError> {
    let h = state.h;
    let t = relator_library(RelatorKind::OddChain, Some(h), surface.genus())?;
    let d = BigInt::from(t.delta_n);
    let ds = BigInt::from(t.delta_sigma);
    let mut next_ledger = state.ledger.fiber_sum(&state.ledger)?.shifted(&(&state.r * &d), &(&state.r * &ds));
    // The chain substitutions follow the sum, so the result is no longer a
    // plain fiber sum.
    next_ledger.flags.is_fiber_sum = false;
    let next_r = &state.r * BigInt::from(2 * (h + 1));
    let word = match &state.word {
        None => None,
        Some(w) => {
            check_budget(&next_ledger.n, max_letters)?;
            let r: usize = (&state.r).try_into().map_err(|_| PipelineError::Precondition("r too large".into()))?;
            Some(explicit_step(surface, w, &t, r, phi1, phi2)?)
        }
    };
    Ok(PipelineState { word, ledger: next_ledger, r: next_r, step: state.step + 1, h })
}

fn explicit_step<S: Scalar>(
    surface: &SurfaceModel<S>,
    w: &Factorization,
    t: &RelatorTemplate,
    r: usize,
    phi1: &MapExpr,
    phi2: &MapExpr,
) -> Result<Factorization, PipelineError> {
    let w = w.gather_right(surface, CurveName::C(1), r)?;
    let n = w.len();
    let first = w.global_conjugate(surface, phi1)?;
    let doubled = first.fiber_sum(&w, surface, phi2)?;
    // V^{φ₁} D^r V^{φ₂} E^r → V^{φ₁} V^{D^r φ₂} D^r E^r → … (DE)^r
    let moved = doubled.move_block_right(surface, n - r, r, 2 * n - r)?;
    let start = 2 * n - 2 * r;
    let woven = moved.interleave(surface, start, r)?;
    let positions: Vec<usize> = (0..r).map(|j| start + 2 * j).collect();
    let out = woven.substitute_many(surface, &positions, t, Substitution::Forward)?;
    Ok(out)
}

/// Result of a doubling sequence.
#[derive(Debug, Clone)]
pub struct SequenceRun {
    pub rows: Vec<StepRow>,
    pub last: PipelineState,
}

impl SequenceRun {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(StepRow::passed)
    }
}

/// Runs the doubling sequence from `base` for `n` steps, checking each step
/// against the closed forms and, in explicit mode, the word itself.
pub fn thm124_sequence<S: Scalar>(
    surface: &mut SurfaceModel<S>,
    base: &Factorization,
    designated: CurveName,
    params: SequenceParams,
) -> Result<SequenceRun, PipelineError> {
    let SequenceParams { h, r, n, mode, max_letters } = params;
    let g = surface.genus();
    if h < 1 || h >= g {
        return Err(PipelineError::Precondition(format!("need 1 <= h <= g-1, got h={h}, g={g}")));
    }
    if r < 1 {
        return Err(PipelineError::Precondition("need r >= 1".into()));
    }
    let designated = surface.table().canonical(designated);
    if surface.table().is_separating(designated) {
        return Err(PipelineError::Precondition(format!("{designated} is separating")));
    }
    let found = base.count_literal(designated);
    if found < r {
        return Err(PipelineError::Precondition(format!("base has {found} literal {designated}, need {r}")));
    }
    if !base.ledger().flags.is_relator {
        return Err(PipelineError::Word(WordError::NotRelator));
    }
    let base = if designated == CurveName::C(1) {
        base.clone()
    } else {
        let rho = declare_transport(surface, "rho", &[(designated, CurveName::C(1))])?;
        base.global_conjugate(surface, &rho)?
    };
    let (phi1, phi2) = if h == 1 && g >= 3 && surface.declared("phi1").is_ok() && surface.declared("phi2").is_ok() {
        (MapExpr::declared("phi1"), MapExpr::declared("phi2"))
    } else {
        declare_chain_maps(surface, h)?
    };

    let base_ledger: InvariantLedger<BigInt> = base.ledger().cast()?;
    let base_report = slope_report(&base_ledger)?;
    let mut state = PipelineState {
        word: (mode == Mode::Explicit).then(|| base.clone()),
        ledger: base_ledger,
        r: BigInt::from(r),
        step: 0,
        h,
    };
    let mut rows = Vec::with_capacity(n + 1);
    rows.push(step_row(surface, &state, &base_report, None, r)?);
    for _ in 0..n {
        let prev_r = state.r.clone();
        state = thm124_step(surface, &state, &phi1, &phi2, max_letters)?;
        rows.push(step_row(surface, &state, &base_report, Some(&prev_r), r)?);
    }
    Ok(SequenceRun { rows, last: state })
}

fn step_row<S: Scalar>(
    surface: &SurfaceModel<S>,
    state: &PipelineState,
    base: &SlopeReport<BigInt>,
    prev_r: Option<&BigInt>,
    r0: usize,
) -> Result<StepRow, PipelineError> {
    let report = slope_report(&state.ledger)?;
    let cf = closed_form_invariants(&base.k_sq, &base.chi_f, &BigInt::from(r0), &BigInt::from(state.h), state.step as u32);
    let closed_form_ok = cf.k_sq == report.k_sq && cf.four_chi == &report.chi_f * 4 && cf.lambda == report.lambda;
    let (homology_ok, count_ok) = match &state.word {
        None => (None, None),
        Some(w) => {
            let homology = w.verify_relator_homology(surface)?;
            let mut counts = BigInt::from(w.len()) == state.ledger.n && w.ledger().n == w.len() as i64;
            if let Some(prev) = prev_r {
                counts &= BigInt::from(w.count_literal(CurveName::C(1))) == prev * BigInt::from(2 * state.h + 2);
            }
            (Some(homology), Some(counts))
        }
    };
    Ok(StepRow { i: state.step, r: state.r.clone(), report, closed_form_ok, homology_ok, count_ok })
}

/// Named pass/fail results for one constructed fibration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateSet {
    pub homology_identity: Option<bool>,
    /// Chain curves missing from the normalized vanishing cycles.
    pub missing_chain: Option<Vec<CurveName>>,
    pub h1_trivial: Option<bool>,
    pub minimal: bool,
    pub bounds: BoundsReport,
    pub slope_window: bool,
}

impl CertificateSet {
    pub fn simply_connected(&self) -> Option<bool> {
        Some(self.missing_chain.as_ref()?.is_empty() && self.h1_trivial?)
    }

    /// Every computed certificate holds (unchecked ones do not count
    /// against it).
    pub fn passed(&self) -> bool {
        self.homology_identity != Some(false)
            && self.simply_connected() != Some(false)
            && self.minimal
            && self.bounds.passed()
            && self.slope_window
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.homology_identity == Some(false) {
            out.push("homology_identity".to_string());
        }
        if let Some(missing) = self.missing_chain.as_ref().filter(|m| !m.is_empty()) {
            let names: Vec<String> = missing.iter().map(ToString::to_string).collect();
            out.push(format!("chain_presence (missing {})", names.join(",")));
        }
        if self.h1_trivial == Some(false) {
            out.push("h1_trivial".to_string());
        }
        if !self.minimal {
            out.push("minimal".to_string());
        }
        out.extend(self.bounds.failures().iter().map(ToString::to_string));
        if !self.slope_window {
            out.push("slope_window".to_string());
        }
        out
    }
}

/// Chain curves `c₁…c_{2g+1}` that do not occur literally among `letters`.
pub fn missing_chain_curves(g: usize, letters: &[CurveExpr]) -> Vec<CurveName> {
    let present: BTreeSet<CurveName> = letters.iter().filter_map(CurveExpr::as_named).collect();
    (1..=2 * g + 1).map(CurveName::C).filter(|c| !present.contains(c)).collect()
}

#[derive(Debug, Clone)]
pub struct LowSlopeFibration {
    pub sequence: SequenceRun,
    /// `F_n = W_n W_n^ψ`, explicit mode only.
    pub word: Option<Factorization>,
    pub ledger: InvariantLedger<BigInt>,
    pub report: SlopeReport<BigInt>,
    pub certificates: CertificateSet,
}

/// The simply connected minimal family: `n` doubling steps with `h = r = 1`
/// from the hyperelliptic base, then the twisted self fiber sum by `ψ`.
pub fn thm12_fibration<S: Scalar>(
    surface: &mut SurfaceModel<S>,
    n: usize,
    mode: Mode,
    max_letters: usize,
) -> Result<LowSlopeFibration, PipelineError> {
    let g = surface.genus();
    if g < 3 {
        return Err(PipelineError::Precondition(format!("genus {g} < 3")));
    }
    declare_low_slope_maps(surface)?;
    let psi = declare_psi(surface)?;
    let base = hyperelliptic_base(g)?;
    let params = SequenceParams { h: 1, r: 1, n, mode, max_letters };
    let sequence = thm124_sequence(surface, &base, CurveName::C(1), params)?;
    let ledger = sequence.last.ledger.fiber_sum(&sequence.last.ledger)?;
    let word = match &sequence.last.word {
        None => None,
        Some(w) => {
            check_budget(&ledger.n, max_letters)?;
            Some(w.fiber_sum(w, surface, &psi)?)
        }
    };
    let report = slope_report(&ledger)?;
    let (lo, hi) = low_slope_window(g, n as u32);
    let slope_window = report.lambda > lo && report.lambda < hi && report.lambda == low_slope_family(g, n as u32);
    let certificates = match &word {
        None => CertificateSet {
            homology_identity: None,
            missing_chain: None,
            h1_trivial: None,
            minimal: ledger.flags.is_fiber_sum,
            bounds: sanity_bounds(&report),
            slope_window,
        },
        Some(w) => CertificateSet {
            homology_identity: Some(w.verify_relator_homology(surface)?),
            missing_chain: Some(missing_chain_curves(g, w.letters())),
            h1_trivial: Some(w.h1_quotient(surface)?.is_empty()),
            minimal: w.ledger().flags.is_fiber_sum,
            bounds: sanity_bounds(&report),
            slope_window,
        },
    };
    if !certificates.passed() || !sequence.passed() {
        let mut failures = certificates.failures();
        failures.extend(sequence.rows.iter().filter(|r| !r.passed()).map(|r| format!("step {}", r.i)));
        return Err(PipelineError::Certificate(failures.join(", ")));
    }
    Ok(LowSlopeFibration { sequence, word, ledger, report, certificates })
}

#[derive(Debug, Clone)]
pub struct LanternWalk {
    pub direction: WalkDirection,
    pub before: SlopeReport<BigInt>,
    /// The fiber sum of copies before the lantern step.
    pub summed: SlopeReport<BigInt>,
    pub after: SlopeReport<BigInt>,
    pub word: Option<Factorization>,
}

impl LanternWalk {
    /// Down must lower the slope and up must raise it, while the
    /// intermediate fiber sum keeps it.
    pub fn passed(&self) -> bool {
        let moved = match self.direction {
            WalkDirection::Down => self.after.lambda < self.before.lambda,
            WalkDirection::Up => self.after.lambda > self.before.lambda,
        };
        moved && self.summed.lambda == self.before.lambda && self.after.chi_f == self.summed.chi_f
    }
}

fn walk_targets(direction: WalkDirection) -> (Vec<CurveName>, Substitution) {
    use CurveName::*;
    match direction {
        WalkDirection::Down => (vec![LanternX, LanternY, LanternZ], Substitution::Forward),
        WalkDirection::Up => ((1..=4).map(LanternA).collect(), Substitution::Inverse),
    }
}

/// Ledger of a lantern walk: `k` copies summed, then one lantern step.
pub fn lantern_walk_ledger(
    ledger: &InvariantLedger<BigInt>,
    direction: WalkDirection,
) -> Result<(InvariantLedger<BigInt>, InvariantLedger<BigInt>), PipelineError> {
    let copies = walk_targets(direction).0.len();
    let mut summed = ledger.clone();
    for _ in 1..copies {
        summed = summed.fiber_sum(ledger)?;
    }
    let sign = match direction {
        WalkDirection::Down => 1,
        WalkDirection::Up => -1,
    };
    let mut after = summed.shifted(&big(sign), &big(-sign));
    after.flags.is_fiber_sum = false;
    Ok((summed, after))
}

/// Sums copies of `w` conjugated so that a literal `c` lands on each lantern
/// curve, brings those letters together and applies the lantern relation.
pub fn lantern_walk<S: Scalar>(
    surface: &mut SurfaceModel<S>,
    w: &Factorization,
    c: CurveName,
    direction: WalkDirection,
    max_letters: usize,
) -> Result<LanternWalk, PipelineError> {
    let g = surface.genus();
    let c = surface.table().canonical(c);
    if surface.table().is_separating(c) {
        return Err(PipelineError::Precondition(format!("{c} is separating")));
    }
    if w.count_literal(c) == 0 {
        return Err(PipelineError::Word(WordError::InsufficientOccurrences { curve: c, found: 0, wanted: 1 }));
    }
    let template = relator_library(RelatorKind::Lantern, None, g)?;
    let (targets, sub) = walk_targets(direction);
    let k = targets.len();
    let ledger: InvariantLedger<BigInt> = w.ledger().cast()?;
    let (summed_ledger, after_ledger) = lantern_walk_ledger(&ledger, direction)?;
    check_budget(&summed_ledger.n, max_letters)?;

    let gathered = w.gather_right(surface, c, 1)?;
    let n = gathered.len();
    let maps: Vec<MapExpr> = targets
        .iter()
        .map(|t| declare_transport(surface, &format!("lantern_{c}_{t}"), &[(c, *t)]))
        .collect::<Result<_, _>>()?;
    let mut sum = gathered.global_conjugate(surface, &maps[0])?;
    for m in &maps[1..] {
        sum = sum.fiber_sum(&gathered, surface, m)?;
    }
    // Each copy ends with its lantern letter; slide them together at the end.
    let mut word = sum.clone();
    for j in 1..k {
        let start = j * n - j;
        word = word.move_block_right(surface, start, j, (j + 1) * n - 1)?;
    }
    let at = k * n - k;
    let word = word.substitute(surface, at, &template, sub)?;
    debug_assert_eq!(BigInt::from(word.len()), after_ledger.n);

    Ok(LanternWalk {
        direction,
        before: slope_report(&ledger)?,
        summed: slope_report(&summed_ledger)?,
        after: slope_report(&after_ledger)?,
        word: Some(word),
    })
}

/// The ledger-only version of [`lantern_walk`].
pub fn lantern_walk_from_ledger(
    ledger: &InvariantLedger<BigInt>,
    direction: WalkDirection,
) -> Result<LanternWalk, PipelineError> {
    let (summed, after) = lantern_walk_ledger(ledger, direction)?;
    Ok(LanternWalk {
        direction,
        before: slope_report(ledger)?,
        summed: slope_report(&summed)?,
        after: slope_report(&after)?,
        word: None,
    })
}

/// `(K², χ_f)` as a pair of big integers, for comparisons in tests.
pub fn k_chi(r: &SlopeReport<BigInt>) -> (BigInt, BigInt) {
    (r.k_sq.clone(), r.chi_f.clone())
}
