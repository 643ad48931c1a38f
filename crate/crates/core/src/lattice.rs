//! Integer symplectic lattice `H_1(Σ_g; Z)`: homology classes, dense integer
//! matrices, the intersection pairing and Dehn-twist transvections.
//!
//! Coordinates are ordered `x_1..x_g, y_1..y_g` with `<x_i, y_i> = 1`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("odd coordinate count {0} is not a symplectic lattice dimension")]
    OddDimension(usize),
}

/// A class in `H_1(Σ_g; Z)`, stored as its `2g` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyClass<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> HomologyClass<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self, LatticeError> {
        if !coeffs.len().is_multiple_of(2) {
            return Err(LatticeError::OddDimension(coeffs.len()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self, LatticeError> {
        Self::new(coeffs.iter().map(|&c| S::of(c)).collect())
    }

    pub fn zero(genus: usize) -> Self {
        Self { coeffs: vec![S::zero(); 2 * genus] }
    }

    /// The basis class `x_i`, 1-based.
    pub fn x(genus: usize, i: usize) -> Self {
        assert!((1..=genus).contains(&i), "x_{i} outside genus {genus}");
        let mut v = Self::zero(genus);
        v.coeffs[i - 1] = S::one();
        v
    }

    /// The basis class `y_i`, 1-based.
    pub fn y(genus: usize, i: usize) -> Self {
        assert!((1..=genus).contains(&i), "y_{i} outside genus {genus}");
        let mut v = Self::zero(genus);
        v.coeffs[genus + i - 1] = S::one();
        v
    }

    pub fn genus(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// gcd of the coordinates (0 for the zero class).
    pub fn content(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn scaled(&self, k: &S) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect() }
    }

    /// Sign-canonical representative: first nonzero coordinate positive.
    pub fn up_to_sign(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => -self.clone(),
            _ => self.clone(),
        }
    }

    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self == other || *self == -other.clone()
    }

    fn check_dim(&self, other: &Self) -> Result<(), LatticeError> {
        if self.dim() != other.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// The intersection pairing `<self, other>`.
    pub fn pairing(&self, other: &Self) -> Result<S, LatticeError> {
        self.check_dim(other)?;
        Ok(self.pairing_unchecked(other))
    }

    pub(crate) fn pairing_unchecked(&self, other: &Self) -> S {
        let g = self.genus();
        let mut acc = S::zero();
        for i in 0..g {
            acc = acc + self.coeffs[i].clone() * other.coeffs[g + i].clone()
                - self.coeffs[g + i].clone() * other.coeffs[i].clone();
        }
        acc
    }

    /// Applies `T_c^k : v ↦ v + k<v, c>c` in place.
    pub fn twist_by(&mut self, c: &Self, k: &S) {
        let p = self.pairing_unchecked(c) * k.clone();
        if p.is_zero() {
            return;
        }
        for (v, ci) in self.coeffs.iter_mut().zip(&c.coeffs) {
            *v = v.clone() + p.clone() * ci.clone();
        }
    }
}

impl<S: Scalar> Neg for HomologyClass<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<S: Scalar> Add for HomologyClass<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "adding classes of different genus");
        Self { coeffs: self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<S: Scalar> Sub for HomologyClass<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> fmt::Display for HomologyClass<S> {
    /// Renders as a combination of basis classes, e.g. `x1 + x2 - y3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.genus();
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label = if idx < g { format!("x{}", idx + 1) } else { format!("y{}", idx - g + 1) };
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (first, c.is_negative()) {
                (true, false) => {}
                (true, true) => write!(f, "-")?,
                (false, _) => write!(f, " {sign} ")?,
            }
            if mag.is_one() {
                write!(f, "{label}")?;
            } else {
                write!(f, "{mag}{label}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<S>>", try_from = "Vec<Vec<S>>")]
#[serde(bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LatticeError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(LatticeError::DimensionMismatch { expected: ncols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: nrows, cols: ncols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| S::of(v)).collect()).collect())
    }

    /// Matrix whose columns are the given classes.
    pub fn from_columns(dim: usize, columns: &[HomologyClass<S>]) -> Result<Self, LatticeError> {
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.dim() != dim {
                return Err(LatticeError::DimensionMismatch { expected: dim, found: c.dim() });
            }
            for i in 0..dim {
                m[(i, j)] = c.coeffs[i].clone();
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, LatticeError> {
        if self.cols != rhs.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &HomologyClass<S>) -> Result<HomologyClass<S>, LatticeError> {
        if self.cols != v.dim() || self.rows != v.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, found: v.dim() });
        }
        let coeffs = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.coeffs())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect();
        Ok(HomologyClass { coeffs })
    }

    pub fn pow(&self, exp: u64) -> Self {
        assert!(self.is_square());
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &S) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * k.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// `col[dst] += k * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &S) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * k.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<S: Scalar> From<Matrix<S>> for Vec<Vec<S>> {
    fn from(m: Matrix<S>) -> Self {
        m.to_rows()
    }
}

impl<S: Scalar> TryFrom<Vec<Vec<S>>> for Matrix<S> {
    type Error = LatticeError;
    fn try_from(rows: Vec<Vec<S>>) -> Result<Self, Self::Error> {
        Matrix::from_rows(rows)
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// The lattice `Z^{2g}` with its standard symplectic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticLattice<S> {
    genus: usize,
    form: Matrix<S>,
}

impl<S: Scalar> SymplecticLattice<S> {
    pub fn new(genus: usize) -> Self {
        let n = 2 * genus;
        let mut form = Matrix::zeros(n, n);
        for i in 0..genus {
            form[(i, genus + i)] = S::one();
            form[(genus + i, i)] = -S::one();
        }
        Self { genus, form }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    /// The pairing matrix `J`.
    pub fn form(&self) -> &Matrix<S> {
        &self.form
    }

    fn check(&self, v: &HomologyClass<S>) -> Result<(), LatticeError> {
        if v.dim() != self.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        Ok(())
    }

    pub fn pairing(&self, u: &HomologyClass<S>, v: &HomologyClass<S>) -> Result<S, LatticeError> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.pairing_unchecked(v))
    }

    /// Matrix of `v ↦ v + <v, c>c`, the homology action of the positive twist about `c`.
    pub fn transvection(&self, c: &HomologyClass<S>) -> Result<Matrix<S>, LatticeError> {
        self.transvection_power(c, &S::one())
    }

    /// Matrix of `T_c^k : v ↦ v + k<v, c>c`.
    pub fn transvection_power(&self, c: &HomologyClass<S>, k: &S) -> Result<Matrix<S>, LatticeError> {
        self.check(c)?;
        let n = self.dim();
        let mut m = Matrix::identity(n);
        for col in 0..n {
            let mut e = HomologyClass::zero(self.genus);
            e.coeffs[col] = S::one();
            e.twist_by(c, k);
            for row in 0..n {
                m[(row, col)] = e.coeffs[row].clone();
            }
        }
        Ok(m)
    }

    /// `Mᵀ J M = J`.
    pub fn is_symplectic(&self, m: &Matrix<S>) -> bool {
        m.nrows() == self.dim()
            && m.ncols() == self.dim()
            && &(&m.transpose() * &self.form) * m == self.form
    }

    /// Inverse of a symplectic matrix, `-J Mᵀ J`.
    pub fn symplectic_inverse(&self, m: &Matrix<S>) -> Matrix<S> {
        let jm = &(&self.form * &m.transpose()) * &self.form;
        let n = self.dim();
        let mut out = jm;
        for i in 0..n {
            out.negate_row(i);
        }
        out
    }
}
