//! Smith normal form over the integers and the derived quotient invariants.


use crate::lattice::{HomologyClass, Matrix};
use crate::scalar::Scalar;

/// `diag = left · input · right`, with `left`, `right` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<S> {
    pub left: Matrix<S>,
    pub diag: Matrix<S>,
    pub right: Matrix<S>,
}

impl<S: Scalar> SmithForm<S> {
    /// Diagonal entries `d_1 | d_2 | ...`, length `min(rows, cols)`.
    pub fn divisors(&self) -> Vec<S> {
        let n = self.diag.nrows().min(self.diag.ncols());
        (0..n).map(|i| self.diag[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().iter().take_while(|d| !d.is_zero()).count()
    }

    /// Invariant factors of `Z^rows / column span`, dropping the trivial `1`s.
    /// A `0` stands for a free `Z` summand; an empty list is the trivial group.
    pub fn cokernel_invariants(&self) -> Vec<S> {
        let mut out: Vec<S> = self.divisors().into_iter().filter(|d| !d.is_one()).collect();
        let extra = self.diag.nrows().saturating_sub(self.diag.ncols());
        out.extend(std::iter::repeat_with(S::zero).take(extra));
        out
    }
}

fn smallest_nonzero<S: Scalar>(m: &Matrix<S>, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, S)> = None;
    for i in from..m.nrows() {
        for j in from..m.ncols() {
            let a = m[(i, j)].abs();
            if a.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smith normal form by elementary operations, always pivoting on the
/// smallest nonzero absolute value of the remaining block.
pub fn smith_normal_form<S: Scalar>(input: &Matrix<S>) -> SmithForm<S> {
    let (rows, cols) = (input.nrows(), input.ncols());
    let mut a = input.clone();
    let mut left = Matrix::identity(rows);
    let mut right = Matrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&a, t) else {
                return SmithForm { left, diag: a, right };
            };
            a.swap_rows(t, pi);
            left.swap_rows(t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[(i, t)].clone() / pivot.clone();
                let neg = -q;
                a.add_row_multiple(i, t, &neg);
                left.add_row_multiple(i, t, &neg);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                let q = a[(t, j)].clone() / pivot.clone();
                let neg = -q;
                a.add_col_multiple(j, t, &neg);
                right.add_col_multiple(j, t, &neg);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let offending = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    a.add_row_multiple(t, i, &S::one());
                    left.add_row_multiple(t, i, &S::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
    }
    SmithForm { left, diag: a, right }
}

/// Column-echelon basis of the lattice spanned by the columns of `m`.
/// Returns a matrix with linearly independent columns spanning the same lattice.
pub fn column_span_basis<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut pivot_col = 0;
    for row in 0..rows {
        if pivot_col == cols {
            break;
        }
        loop {
            let best = (pivot_col..cols)
                .filter(|&j| !a[(row, j)].is_zero())
                .min_by(|&x, &y| a[(row, x)].abs().cmp(&a[(row, y)].abs()));
            let Some(best) = best else { break };
            a.swap_cols(pivot_col, best);
            let p = a[(row, pivot_col)].clone();
            let mut clean = true;
            for j in pivot_col + 1..cols {
                let q = a[(row, j)].clone() / p.clone();
                a.add_col_multiple(j, pivot_col, &-q);
                clean &= a[(row, j)].is_zero();
            }
            if clean {
                break;
            }
        }
        if pivot_col < cols && !a[(row, pivot_col)].is_zero() {
            if a[(row, pivot_col)].is_negative() {
                a.negate_col(pivot_col);
            }
            let p = a[(row, pivot_col)].clone();
            for j in 0..pivot_col {
                let q = a[(row, j)].div_floor(&p);
                a.add_col_multiple(j, pivot_col, &-q);
            }
            pivot_col += 1;
        }
    }
    let mut basis = Matrix::zeros(rows, pivot_col);
    for i in 0..rows {
        for j in 0..pivot_col {
            basis[(i, j)] = a[(i, j)].clone();
        }
    }
    basis
}

/// Invariant factors of `Z^{dim} / span(classes)`, as in
/// [`SmithForm::cokernel_invariants`]. Handles long class lists by
/// deduplicating up to sign and reducing in chunks.
pub fn quotient_invariants<S: Scalar>(dim: usize, classes: &[HomologyClass<S>]) -> Vec<S> {
    let mut seen = std::collections::HashSet::new();
    let distinct: Vec<HomologyClass<S>> = classes
        .iter()
        .filter(|c| !c.is_zero())
        .map(HomologyClass::up_to_sign)
        .filter(|c| seen.insert(c.clone()))
        .collect();

    let mut basis: Vec<HomologyClass<S>> = Vec::new();
    for chunk in distinct.chunks(dim.max(1)) {
        let mut cols = basis.clone();
        cols.extend_from_slice(chunk);
        let m = Matrix::from_columns(dim, &cols).expect("classes share the lattice dimension");
        let reduced = column_span_basis(&m);
        basis = (0..reduced.ncols())
            .map(|j| HomologyClass::new(reduced.column(j)).expect("even dimension"))
            .collect();
    }
    let m = Matrix::from_columns(dim, &basis).expect("classes share the lattice dimension");
    smith_normal_form(&m).cokernel_invariants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn check_form(m: &Matrix<i64>) {
        let f = smith_normal_form(m);
        assert_eq!(&(&f.left * m) * &f.right, f.diag);
        let d = f.divisors();
        for i in 0..f.diag.nrows() {
            for j in 0..f.diag.ncols() {
                if i != j {
                    assert_eq!(f.diag[(i, j)], 0);
                }
            }
        }
        for w in d.windows(2) {
            assert!(w[0] >= 0 && w[1] >= 0);
            if w[0] == 0 {
                assert_eq!(w[1], 0);
            } else {
                assert_eq!(w[1] % w[0], 0);
            }
        }
    }

    #[test]
    fn identity_and_diagonal() {
        let id = Matrix::<i64>::identity(4);
        assert_eq!(smith_normal_form(&id).diag, id);
        let m = Matrix::<i64>::from_i64_rows(&[&[2, 0], &[0, 0]]).unwrap();
        let f = smith_normal_form(&m);
        assert_eq!(f.diag, m);
        assert_eq!(f.cokernel_invariants(), vec![2, 0]);
    }

    #[test]
    fn classic_example() {
        let m = Matrix::<i64>::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).unwrap();
        check_form(&m);
        assert_eq!(smith_normal_form(&m).divisors(), vec![2, 6, 12]);
        let m = Matrix::<i64>::from_i64_rows(&[&[2, 3], &[4, 5], &[6, 7]]).unwrap();
        check_form(&m);
        assert_eq!(smith_normal_form(&m).divisors(), vec![1, 2]);
    }

    #[test]
    fn divisibility_is_enforced() {
        let m = Matrix::<i64>::from_i64_rows(&[&[2, 0], &[0, 3]]).unwrap();
        check_form(&m);
        assert_eq!(smith_normal_form(&m).divisors(), vec![1, 6]);
    }

    #[test]
    fn bigint_agrees_with_i64() {
        let m = Matrix::<BigInt>::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).unwrap();
        let d: Vec<i64> = smith_normal_form(&m).divisors().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
    }

    #[test]
    fn quotient_of_long_list_matches_direct_snf() {
        let classes: Vec<HomologyClass<i64>> = [
            [2, 0, 0, 0],
            [0, 4, 0, 0],
            [2, 2, 0, 0],
            [-2, 0, 0, 0],
            [0, 0, 0, 6],
            [0, 0, 0, 9],
            [0, 2, 0, 0],
        ]
        .iter()
        .map(|c| HomologyClass::from_i64s(c).unwrap())
        .collect();
        let direct = smith_normal_form(&Matrix::from_columns(4, &classes).unwrap()).cokernel_invariants();
        assert_eq!(quotient_invariants(4, &classes), direct);
        assert_eq!(direct, vec![2, 6, 0]);
        assert_eq!(quotient_invariants::<i64>(4, &[]), vec![0, 0, 0, 0]);
    }
}
