//! Symplectic integer matrices with prescribed images of a few classes.
//!
//! Both the sources and the targets are moved to the same standard position
//! (`x_1, ±y_1, x_2, ...`) by products of elementary symplectic matrices;
//! the answer is `P_target⁻¹ · P_source`.
//!
//! Supported constraint shapes: any number of hyperbolic pairs (two sources
//! pairing to ±1), plus isotropic sources orthogonal to everything else whose
//! span is saturated. Anything else is rejected as unsupported.

use thiserror::Error;

use crate::lattice::{HomologyClass, Matrix, SymplecticLattice};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("constraint {index}: {which} class {class} is not primitive")]
    NotPrimitive { index: usize, which: &'static str, class: String },
    #[error("constraint {index}: class has dimension {found}, expected {expected}")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("constraints {i} and {j}: sources pair to {source_pairing}, targets to {target_pairing}")]
    PairingMismatch { i: usize, j: usize, source_pairing: String, target_pairing: String },
    #[error("no symplectic extension found: {0}")]
    NoSolution(String),
}

/// `source ↦ target`, optionally allowing `source ↦ -target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint<S> {
    pub source: HomologyClass<S>,
    pub target: HomologyClass<S>,
    pub sign_tolerant: bool,
}

impl<S: Scalar> Constraint<S> {
    pub fn exact(source: HomologyClass<S>, target: HomologyClass<S>) -> Self {
        Self { source, target, sign_tolerant: false }
    }

    pub fn up_to_sign(source: HomologyClass<S>, target: HomologyClass<S>) -> Self {
        Self { source, target, sign_tolerant: true }
    }
}

/// Returns a symplectic matrix `M` with `M·source = target` (or `-target`
/// where the constraint is sign tolerant) for every constraint.
pub fn symplectic_extension<S: Scalar>(
    lattice: &SymplecticLattice<S>,
    constraints: &[Constraint<S>],
) -> Result<Matrix<S>, ExtensionError> {
    let dim = lattice.dim();
    for (index, c) in constraints.iter().enumerate() {
        for (which, v) in [("source", &c.source), ("target", &c.target)] {
            if v.dim() != dim {
                return Err(ExtensionError::Dimension { index, expected: dim, found: v.dim() });
            }
            if !v.is_primitive() {
                return Err(ExtensionError::NotPrimitive { index, which, class: v.to_string() });
            }
        }
    }
    let signs = choose_signs(constraints)?;
    let sources: Vec<HomologyClass<S>> = constraints.iter().map(|c| c.source.clone()).collect();
    let targets: Vec<HomologyClass<S>> = constraints
        .iter()
        .zip(&signs)
        .map(|(c, &neg)| if neg { -c.target.clone() } else { c.target.clone() })
        .collect();

    let plan = Plan::from_sources(&sources)?;
    let p_source = standardize(lattice, &plan, &sources)?;
    let p_target = standardize(lattice, &plan, &targets)?;
    let m = &lattice.symplectic_inverse(&p_target) * &p_source;
    debug_assert!(lattice.is_symplectic(&m));
    debug_assert!(sources.iter().zip(&targets).all(|(s, t)| m.apply(s).unwrap() == *t));
    Ok(m)
}

/// Picks target negations (only where tolerated) so that all pairwise
/// pairings of targets equal those of the sources.
fn choose_signs<S: Scalar>(constraints: &[Constraint<S>]) -> Result<Vec<bool>, ExtensionError> {
    let k = constraints.len();
    let pairings = |i: usize, j: usize| {
        (
            constraints[i].source.pairing_unchecked(&constraints[j].source),
            constraints[i].target.pairing_unchecked(&constraints[j].target),
        )
    };
    // Each pair (i, j) forces sign_i XOR sign_j, or is unconstrained when
    // both pairings vanish. Propagate over each connected component.
    let mut sign: Vec<Option<bool>> = vec![None; k];
    for start in 0..k {
        if sign[start].is_some() {
            continue;
        }
        sign[start] = Some(false);
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if j == i {
                    continue;
                }
                let (ps, pt) = pairings(i, j);
                if ps.is_zero() && pt.is_zero() {
                    continue;
                }
                let flip = if ps == pt {
                    false
                } else if ps == -pt.clone() {
                    true
                } else {
                    return Err(mismatch(i, j, &ps, &pt));
                };
                let want = sign[i].unwrap() ^ flip;
                match sign[j] {
                    Some(s) if s != want => return Err(mismatch(i, j, &ps, &pt)),
                    Some(_) => {}
                    None => {
                        sign[j] = Some(want);
                        component.push(j);
                        stack.push(j);
                    }
                }
            }
        }
        // The whole component may be flipped; prefer leaving intolerant
        // constraints unsigned.
        if component.iter().any(|&i| sign[i] == Some(true) && !constraints[i].sign_tolerant) {
            for &i in &component {
                sign[i] = sign[i].map(|s| !s);
            }
        }
    }
    let signs: Vec<bool> = sign.into_iter().map(|s| s.unwrap_or(false)).collect();
    for (i, c) in constraints.iter().enumerate() {
        if signs[i] && !c.sign_tolerant {
            let j = (0..k).find(|&j| j != i && !pairings(i, j).0.is_zero()).unwrap_or(i);
            let (ps, pt) = pairings(i, j);
            return Err(mismatch(i, j, &ps, &pt));
        }
    }
    Ok(signs)
}

fn mismatch<S: Scalar>(i: usize, j: usize, ps: &S, pt: &S) -> ExtensionError {
    ExtensionError::PairingMismatch {
        i,
        j,
        source_pairing: ps.to_string(),
        target_pairing: pt.to_string(),
    }
}

/// Order in which sources are sent to standard position.
#[derive(Debug, Clone)]
struct Plan {
    /// `(first, second)` constraint indices of hyperbolic pairs.
    pairs: Vec<(usize, usize)>,
    singles: Vec<usize>,
}

impl Plan {
    fn from_sources<S: Scalar>(sources: &[HomologyClass<S>]) -> Result<Self, ExtensionError> {
        let k = sources.len();
        let p = |i: usize, j: usize| sources[i].pairing_unchecked(&sources[j]);
        let mut partner: Vec<Option<usize>> = vec![None; k];
        for i in 0..k {
            let others: Vec<usize> = (0..k).filter(|&j| j != i && !p(i, j).is_zero()).collect();
            match others.as_slice() {
                [] => {}
                [j] if p(i, *j).abs().is_one() => partner[i] = Some(*j),
                _ => {
                    return Err(ExtensionError::NoSolution(format!(
                        "source {i} pairs nontrivially with {others:?}; only disjoint hyperbolic pairs are supported"
                    )))
                }
            }
        }
        let mut pairs = Vec::new();
        let mut singles = Vec::new();
        for i in 0..k {
            match partner[i] {
                Some(j) if partner[j] != Some(i) => {
                    return Err(ExtensionError::NoSolution(format!("sources {i} and {j} do not form a pair")))
                }
                Some(j) if i < j => pairs.push((i, j)),
                Some(_) => {}
                None => singles.push(i),
            }
        }
        Ok(Self { pairs, singles })
    }
}

/// Elementary symplectic matrices on `Z^{2g}` (0-based plane indices).
struct Elementary<'a, S> {
    lattice: &'a SymplecticLattice<S>,
}

impl<'a, S: Scalar> Elementary<'a, S> {
    fn g(&self) -> usize {
        self.lattice.genus()
    }

    fn x(&self, i: usize) -> HomologyClass<S> {
        HomologyClass::x(self.g(), i + 1)
    }

    fn y(&self, i: usize) -> HomologyClass<S> {
        HomologyClass::y(self.g(), i + 1)
    }

    /// `a x_i + b y_i ↦ (a - t b) x_i + b y_i`
    fn shear_x(&self, i: usize, t: &S) -> Matrix<S> {
        self.lattice.transvection_power(&self.x(i), t).expect("dimension")
    }

    /// `a x_i + b y_i ↦ a x_i + (b + t a) y_i`
    fn shear_y(&self, i: usize, t: &S) -> Matrix<S> {
        self.lattice.transvection_power(&self.y(i), t).expect("dimension")
    }

    fn negate_plane(&self, i: usize) -> Matrix<S> {
        let g = self.g();
        let mut m = Matrix::identity(2 * g);
        m[(i, i)] = -S::one();
        m[(g + i, g + i)] = -S::one();
        m
    }

    fn swap_planes(&self, i: usize, j: usize) -> Matrix<S> {
        let g = self.g();
        let mut m = Matrix::identity(2 * g);
        m.swap_rows(i, j);
        m.swap_rows(g + i, g + j);
        m
    }

    /// `x_j ↦ x_j + t x_i`, `y_i ↦ y_i - t y_j`: adds `t` times the
    /// `x_j`-coefficient to the `x_i`-coefficient.
    fn cross_add(&self, i: usize, j: usize, t: &S) -> Matrix<S> {
        let g = self.g();
        let mut m = Matrix::identity(2 * g);
        m[(i, j)] = t.clone();
        m[(g + j, g + i)] = -t.clone();
        m
    }

    /// `v ↦ v + <v,x>u + <v,u>x` for isotropic `x ⟂ u`.
    fn shift(&self, x: &HomologyClass<S>, u: &HomologyClass<S>) -> Matrix<S> {
        let l = self.lattice;
        let a = l.transvection(&(x.clone() + u.clone())).expect("dimension");
        let b = l.transvection_power(x, &-S::one()).expect("dimension");
        let c = l.transvection_power(u, &-S::one()).expect("dimension");
        &(&a * &b) * &c
    }
}

struct Standardizer<'a, S> {
    el: Elementary<'a, S>,
    acc: Matrix<S>,
}

impl<'a, S: Scalar> Standardizer<'a, S> {
    fn push(&mut self, e: Matrix<S>, w: &mut HomologyClass<S>) {
        *w = e.apply(w).expect("dimension");
        self.acc = &e * &self.acc;
    }

    /// Sends `w` (supported on planes `>= slot`, plus `x`-coordinates of the
    /// planes in `singles_before`) to `x_slot`, fixing all earlier planes.
    fn to_x(&mut self, w: &mut HomologyClass<S>, slot: usize, singles_before: &[usize]) -> Result<(), ExtensionError> {
        let g = self.el.g();
        let active_content = (slot..g).fold(S::zero(), |acc, i| {
            acc.gcd(&w.coeffs()[i]).gcd(&w.coeffs()[g + i])
        });
        if !active_content.is_one() {
            return Err(ExtensionError::NoSolution(format!(
                "isotropic sources do not span a saturated sublattice (content {active_content})"
            )));
        }
        // Each plane: (a, b) -> (gcd, 0).
        for i in slot..g {
            loop {
                let a = w.coeffs()[i].clone();
                let b = w.coeffs()[g + i].clone();
                let e = if b.is_zero() {
                    break;
                } else if a.is_zero() {
                    self.el.shear_x(i, &-S::one())
                } else if b.abs() >= a.abs() {
                    self.el.shear_y(i, &-(b / a))
                } else {
                    self.el.shear_x(i, &(a / b))
                };
                self.push(e, w);
            }
        }
        // Across planes: x-coefficients -> (1, 0, ..., 0) at `slot`.
        loop {
            let nonzero: Vec<usize> = (slot..g).filter(|&i| !w.coeffs()[i].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let pivot = *nonzero
                .iter()
                .min_by(|&&p, &&q| w.coeffs()[p].abs().cmp(&w.coeffs()[q].abs()))
                .unwrap();
            for &i in &nonzero {
                if i != pivot {
                    let q = w.coeffs()[i].clone() / w.coeffs()[pivot].clone();
                    let e = self.el.cross_add(i, pivot, &-q);
                    self.push(e, w);
                }
            }
        }
        let i = (slot..g).find(|&i| !w.coeffs()[i].is_zero()).expect("primitive vector is nonzero");
        if i != slot {
            let e = self.el.swap_planes(i, slot);
            self.push(e, w);
        }
        if w.coeffs()[slot].is_negative() {
            let e = self.el.negate_plane(slot);
            self.push(e, w);
        }
        debug_assert!(w.coeffs()[slot].is_one());
        // Clear x-coordinates left on earlier isotropic planes.
        for &q in singles_before {
            let a = w.coeffs()[q].clone();
            if !a.is_zero() {
                let u = self.el.y(slot).scaled(&-a);
                let e = self.el.shift(&self.el.x(q), &u);
                self.push(e, w);
            }
        }
        Ok(())
    }

    /// With `x_slot` fixed and `<x_slot, w> = eps`, sends `w` to `eps·y_slot`.
    fn to_y(&mut self, w: &mut HomologyClass<S>, slot: usize) {
        let g = self.el.g();
        let eps = w.coeffs()[g + slot].clone();
        debug_assert!(eps.abs().is_one());
        let mut rest = w.clone();
        for i in 0..slot + 1 {
            rest = rest.clone() - self.component(&rest, i);
        }
        if !rest.is_zero() {
            let e = self.el.shift(&self.el.x(slot), &rest.scaled(&eps));
            self.push(e, w);
        }
        let a = w.coeffs()[slot].clone();
        if !a.is_zero() {
            let e = self.el.shear_x(slot, &(a * eps));
            self.push(e, w);
        }
    }

    fn component(&self, v: &HomologyClass<S>, i: usize) -> HomologyClass<S> {
        let g = self.el.g();
        self.el.x(i).scaled(&v.coeffs()[i]) + self.el.y(i).scaled(&v.coeffs()[g + i])
    }
}

fn standardize<S: Scalar>(
    lattice: &SymplecticLattice<S>,
    plan: &Plan,
    vectors: &[HomologyClass<S>],
) -> Result<Matrix<S>, ExtensionError> {
    let g = lattice.genus();
    if plan.pairs.len() + plan.singles.len() > g {
        return Err(ExtensionError::NoSolution(format!(
            "{} independent constraints exceed genus {g}",
            plan.pairs.len() + plan.singles.len()
        )));
    }
    let mut st = Standardizer { el: Elementary { lattice }, acc: Matrix::identity(2 * g) };
    let mut slot = 0;
    for &(a, b) in &plan.pairs {
        let mut w = st.acc.apply(&vectors[a]).expect("dimension");
        st.to_x(&mut w, slot, &[])?;
        let mut w = st.acc.apply(&vectors[b]).expect("dimension");
        st.to_y(&mut w, slot);
        slot += 1;
    }
    let mut singles_done = Vec::new();
    for &a in &plan.singles {
        let mut w = st.acc.apply(&vectors[a]).expect("dimension");
        st.to_x(&mut w, slot, &singles_done)?;
        singles_done.push(slot);
        slot += 1;
    }
    Ok(st.acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = HomologyClass<i64>;

    fn check(lattice: &SymplecticLattice<i64>, cs: &[Constraint<i64>]) -> Matrix<i64> {
        let m = symplectic_extension(lattice, cs).unwrap();
        assert!(lattice.is_symplectic(&m));
        for c in cs {
            let img = m.apply(&c.source).unwrap();
            if c.sign_tolerant {
                assert!(img.eq_up_to_sign(&c.target), "{img} vs {}", c.target);
            } else {
                assert_eq!(img, c.target);
            }
        }
        m
    }

    #[test]
    fn identity_is_acceptable() {
        let l = SymplecticLattice::<i64>::new(3);
        check(&l, &[Constraint::exact(C::y(3, 1), C::y(3, 1))]);
        check(&l, &[]);
    }

    #[test]
    fn hyperbolic_pair() {
        let l = SymplecticLattice::<i64>::new(3);
        let cs = [
            Constraint::exact(C::y(3, 1), C::x(3, 2)),
            Constraint::exact(C::x(3, 1), C::y(3, 3) - C::y(3, 2)),
        ];
        check(&l, &cs);
    }

    #[test]
    fn single_vectors_with_large_coefficients() {
        let l = SymplecticLattice::<i64>::new(4);
        let src = C::from_i64s(&[3, -5, 0, 7, 2, 0, 11, -4]).unwrap();
        let tgt = C::from_i64s(&[0, 0, 1, 1, 0, 0, 0, 0]).unwrap();
        check(&l, &[Constraint::exact(src, tgt)]);
    }

    #[test]
    fn sign_tolerance() {
        let l = SymplecticLattice::<i64>::new(3);
        let cs = [
            Constraint::exact(C::y(3, 1), C::x(3, 2)),
            Constraint::up_to_sign(C::x(3, 1), C::y(3, 2)),
        ];
        // <y1, x1> = -1 but <x2, y2> = 1: only the negated target works.
        let m = check(&l, &cs);
        assert_eq!(m.apply(&C::x(3, 1)).unwrap(), -C::y(3, 2));
        let strict = [cs[0].clone(), Constraint::exact(C::x(3, 1), C::y(3, 2))];
        assert!(matches!(
            symplectic_extension(&l, &strict),
            Err(ExtensionError::PairingMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_primitive_target() {
        let l = SymplecticLattice::<i64>::new(3);
        let err = symplectic_extension(&l, &[Constraint::exact(C::y(3, 1), C::x(3, 1).scaled(&2))]);
        assert!(matches!(err, Err(ExtensionError::NotPrimitive { which: "target", .. })));
    }

    #[test]
    fn isotropic_families() {
        let l = SymplecticLattice::<i64>::new(3);
        let cs = [
            Constraint::exact(C::y(3, 1), C::x(3, 1) + C::x(3, 2)),
            Constraint::exact(C::y(3, 2), C::x(3, 3)),
            Constraint::exact(C::y(3, 1) + C::y(3, 2) + C::y(3, 3), C::x(3, 2)),
        ];
        check(&l, &cs);
        let unsaturated = [
            Constraint::exact(C::x(3, 1), C::x(3, 1)),
            Constraint::exact(C::x(3, 1) + C::x(3, 2).scaled(&2), C::x(3, 2)),
        ];
        assert!(matches!(symplectic_extension(&l, &unsaturated), Err(ExtensionError::NoSolution(_))));
    }
}
