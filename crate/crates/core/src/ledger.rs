//! Twist count and signature bookkeeping, and the invariants derived from
//! them: Euler characteristic, holomorphic Euler characteristic, K² and
//! the slope, all exact.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::HomologyClass;
use crate::scalar::{cast, Scalar};
use crate::snf::quotient_invariants;
use crate::surface::{CurveExpr, HomologyEvaluator, SurfaceError, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("sigma + e = {0} is not divisible by 4")]
    NotDivisible(String),
    #[error("chi_f = {0} is not positive")]
    NonPositiveChi(String),
    #[error("ledger value {0} does not fit the target scalar type")]
    Overflow(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerFlags {
    pub is_relator: bool,
    pub is_fiber_sum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_name: Option<String>,
}

/// `(n, σ)` for a genus-g fibration over the sphere. σ is never computed from
/// the word; it is carried along through base values, substitution deltas
/// and fiber-sum additivity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct InvariantLedger<S> {
    pub genus: usize,
    pub n: S,
    pub sigma: S,
    pub flags: LedgerFlags,
}

impl<S: Scalar> InvariantLedger<S> {
    pub fn new(genus: usize, n: S, sigma: S, flags: LedgerFlags) -> Self {
        Self { genus, n, sigma, flags }
    }

    pub fn relator(genus: usize, n: S, sigma: S, base_name: &str) -> Self {
        let flags = LedgerFlags { is_relator: true, is_fiber_sum: false, base_name: Some(base_name.to_string()) };
        Self::new(genus, n, sigma, flags)
    }

    fn g(&self) -> S {
        S::from_usize(self.genus).expect("genus fits every scalar")
    }

    /// `e = 4 − 4g + n`.
    pub fn euler(&self) -> S {
        S::of(4) - S::of(4) * self.g() + self.n.clone()
    }

    pub fn shifted(&self, dn: &S, dsigma: &S) -> Self {
        Self {
            genus: self.genus,
            n: self.n.clone() + dn.clone(),
            sigma: self.sigma.clone() + dsigma.clone(),
            flags: self.flags.clone(),
        }
    }

    /// Ledger of `W₁W₂^ψ`: twist counts and signatures add.
    pub fn fiber_sum(&self, other: &Self) -> Result<Self, LedgerError> {
        if self.genus != other.genus {
            return Err(LedgerError::GenusMismatch(self.genus, other.genus));
        }
        Ok(Self {
            genus: self.genus,
            n: self.n.clone() + other.n.clone(),
            sigma: self.sigma.clone() + other.sigma.clone(),
            flags: LedgerFlags {
                is_relator: self.flags.is_relator && other.flags.is_relator,
                is_fiber_sum: true,
                base_name: self.flags.base_name.clone(),
            },
        })
    }

    pub fn cast<T: Scalar>(&self) -> Result<InvariantLedger<T>, LedgerError> {
        let conv = |v: &S| cast::<S, T>(v).ok_or_else(|| LedgerError::Overflow(v.to_string()));
        Ok(InvariantLedger { genus: self.genus, n: conv(&self.n)?, sigma: conv(&self.sigma)?, flags: self.flags.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeReport<S: Scalar> {
    pub genus: usize,
    pub n: S,
    pub e: S,
    pub sigma: S,
    pub chi_h: S,
    pub c1_sq: S,
    pub k_sq: S,
    pub chi_f: S,
    pub lambda: Ratio<S>,
}

pub fn slope_report<S: Scalar>(ledger: &InvariantLedger<S>) -> Result<SlopeReport<S>, LedgerError> {
    let e = ledger.euler();
    let g1 = ledger.g() - S::one();
    let sigma = ledger.sigma.clone();
    let four = S::of(4);
    let sum = sigma.clone() + e.clone();
    if !sum.is_multiple_of(&four) {
        return Err(LedgerError::NotDivisible(sum.to_string()));
    }
    let chi_h = sum / four;
    let c1_sq = S::of(3) * sigma.clone() + S::of(2) * e.clone();
    let k_sq = c1_sq.clone() + S::of(8) * g1.clone();
    let chi_f = chi_h.clone() + g1;
    if !chi_f.is_positive() {
        return Err(LedgerError::NonPositiveChi(chi_f.to_string()));
    }
    let lambda = Ratio::new(k_sq.clone(), chi_f.clone());
    Ok(SlopeReport { genus: ledger.genus, n: ledger.n.clone(), e, sigma, chi_h, c1_sq, k_sq, chi_f, lambda })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    /// `K² ≥ 4g − 4`.
    KSquared,
    /// `χ_f ≥ 1`.
    ChiF,
    /// `4 | σ + e`.
    Divisibility,
    /// `λ < 10`.
    SlopeBelowTen,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::KSquared => "k2_at_least_4g_minus_4",
            Bound::ChiF => "chi_f_positive",
            Bound::Divisibility => "sigma_plus_e_divisible_by_4",
            Bound::SlopeBelowTen => "slope_below_10",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub checks: Vec<(Bound, bool)>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<Bound> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(b, _)| *b).collect()
    }
}

/// Checks a report against the general bounds every fibration must meet.
/// Reports may be assembled by hand, so nothing is assumed about them.
pub fn sanity_bounds<S: Scalar>(r: &SlopeReport<S>) -> BoundsReport {
    let g = S::from_usize(r.genus).expect("genus fits every scalar");
    let k_ok = r.k_sq >= S::of(4) * g - S::of(4);
    let chi_ok = r.chi_f >= S::one();
    let div_ok = (r.sigma.clone() + r.e.clone()).is_multiple_of(&S::of(4));
    let slope_ok = chi_ok && r.k_sq < S::of(10) * r.chi_f.clone();
    BoundsReport {
        checks: vec![
            (Bound::KSquared, k_ok),
            (Bound::ChiF, chi_ok),
            (Bound::Divisibility, div_ok),
            (Bound::SlopeBelowTen, slope_ok),
        ],
    }
}

/// Elementary divisors of `H₁(Σ_g)` modulo the classes of `letters`.
/// Empty means the quotient is trivial; `0` entries are free summands.
pub fn h1_of_fiber_quotient<S: Scalar>(
    surface: &SurfaceModel<S>,
    letters: &[CurveExpr],
) -> Result<Vec<S>, SurfaceError> {
    let mut eval = HomologyEvaluator::new(surface);
    let classes: Vec<HomologyClass<S>> = letters.iter().map(|e| eval.curve(e)).collect::<Result<_, _>>()?;
    Ok(quotient_invariants(surface.lattice().dim(), &classes))
}
