//! Positive relators in the mapping class group, instantiated on the named
//! curve system, with their twist-count and signature contributions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::surface::{CurveExpr, CurveName, MapExpr, SurfaceModel};
use crate::word::WordError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelatorKind {
    /// `XYZ = A₁A₂A₃A₄`.
    Lantern,
    /// `DE = (C₁⋯C_{2h+1})^{2h+2}`.
    OddChain,
    /// `D = (C₁⋯C_{2h})^{4h+2}` with `D` separating.
    EvenChain,
    /// `1 = (C₁⋯C_{2g+1}C_{2g+1}⋯C₁)²`.
    Hyperelliptic,
}

impl fmt::Display for RelatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelatorKind::Lantern => "lantern",
            RelatorKind::OddChain => "odd_chain",
            RelatorKind::EvenChain => "even_chain",
            RelatorKind::Hyperelliptic => "hyperelliptic",
        })
    }
}

impl FromStr for RelatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lantern" => Ok(RelatorKind::Lantern),
            "odd_chain" => Ok(RelatorKind::OddChain),
            "even_chain" => Ok(RelatorKind::EvenChain),
            "hyperelliptic" => Ok(RelatorKind::Hyperelliptic),
            other => Err(format!("unknown relator {other:?}")),
        }
    }
}

/// A substitution rule `lhs → rhs`. Applying it forward changes the twist
/// count by `delta_n` and the signature by `delta_sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorTemplate {
    pub kind: RelatorKind,
    pub h: Option<usize>,
    pub genus: usize,
    pub lhs: Vec<CurveExpr>,
    pub rhs: Vec<CurveExpr>,
    pub delta_n: i64,
    pub delta_sigma: i64,
}

impl RelatorTemplate {
    pub fn name(&self) -> String {
        match self.h {
            Some(h) => format!("{}({h})", self.kind),
            None => self.kind.to_string(),
        }
    }

    /// The template transported by a mapping class: every curve `c` becomes
    /// `m(c)`, normalized. Deltas are unchanged.
    pub fn conjugated<S: crate::scalar::Scalar>(&self, surface: &SurfaceModel<S>, m: &MapExpr) -> Self {
        let m = surface.normalize_map(m);
        let tr = |v: &[CurveExpr]| v.iter().map(|c| surface.reduce_image(&m, c.clone())).collect();
        Self { lhs: tr(&self.lhs), rhs: tr(&self.rhs), ..self.clone() }
    }
}

fn named(n: CurveName) -> CurveExpr {
    CurveExpr::Named(n)
}

fn chain_block(len: usize, reps: usize) -> Vec<CurveExpr> {
    let one: Vec<CurveExpr> = (1..=len).map(|i| named(CurveName::C(i))).collect();
    std::iter::repeat_n(one, reps).flatten().collect()
}

/// The hyperelliptic relator word on `c₁, …, c_{2g+1}`.
pub fn hyperelliptic_word(g: usize) -> Vec<CurveExpr> {
    let n = 2 * g + 1;
    let half: Vec<CurveExpr> = (1..=n).chain((1..=n).rev()).map(|i| named(CurveName::C(i))).collect();
    half.iter().chain(&half).cloned().collect()
}

pub fn relator_library(kind: RelatorKind, h: Option<usize>, g: usize) -> Result<RelatorTemplate, WordError> {
    let out_of_range = |why: &str| WordError::TemplateParameters(format!("{kind} h={h:?} g={g}: {why}"));
    if g < 2 {
        return Err(out_of_range("genus must be at least 2"));
    }
    let need_h = || match h {
        Some(h) if (1..g).contains(&h) => Ok(h),
        _ => Err(out_of_range("need 1 <= h <= g-1")),
    };
    let (lhs, rhs, delta_n, delta_sigma, h) = match kind {
        RelatorKind::Lantern => {
            if g < 3 {
                return Err(out_of_range("the lantern configuration needs genus at least 3"));
            }
            let lhs = vec![named(CurveName::LanternX), named(CurveName::LanternY), named(CurveName::LanternZ)];
            let rhs = (1..=4).map(|i| named(CurveName::LanternA(i))).collect();
            (lhs, rhs, 1, -1, None)
        }
        RelatorKind::OddChain => {
            let h = need_h()?;
            let lhs = vec![named(CurveName::D(h + 1)), named(CurveName::E(h + 1))];
            let rhs = chain_block(2 * h + 1, 2 * h + 2);
            let (hh, n) = (h as i64, (2 * h + 1) * (2 * h + 2));
            (lhs, rhs, n as i64 - 2, -2 * hh * (hh + 2), Some(h))
        }
        RelatorKind::EvenChain => {
            let h = need_h()?;
            let lhs = vec![named(CurveName::Sep(h))];
            let rhs = chain_block(2 * h, 4 * h + 2);
            let (hh, n) = (h as i64, 2 * h * (4 * h + 2));
            (lhs, rhs, n as i64 - 1, -4 * hh * (hh + 1) + 1, Some(h))
        }
        RelatorKind::Hyperelliptic => {
            let rhs = hyperelliptic_word(g);
            let n = rhs.len() as i64;
            (Vec::new(), rhs, n, -4 * (g as i64 + 1), None)
        }
    };
    // e_g is stored under its canonical name c_{2g+1}.
    let canon = |v: Vec<CurveExpr>| {
        v.into_iter()
            .map(|c| match c {
                CurveExpr::Named(CurveName::E(i)) if i == g => named(CurveName::C(2 * g + 1)),
                other => other,
            })
            .collect()
    };
    Ok(RelatorTemplate { kind, h, genus: g, lhs: canon(lhs), rhs: canon(rhs), delta_n, delta_sigma })
}
