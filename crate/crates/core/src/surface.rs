//! The fixed genus-g curve system, symbolic curve / mapping-class
//! expressions, and their evaluation on homology.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{HomologyClass, LatticeError, Matrix, SymplecticLattice};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("genus {0} is not supported (need g >= 2)")]
    InvalidGenus(usize),
    #[error("curve {0} does not exist on the genus-{1} surface")]
    UnknownCurve(CurveName, usize),
    #[error("unknown declared map `{0}`")]
    UnknownMap(String),
    #[error("declared map `{0}` is already defined")]
    DuplicateMap(String),
    #[error("declared map `{0}` has a {1}x{1} matrix, expected {2}x{2}")]
    MatrixShape(String, usize, usize),
    #[error("cannot parse curve name `{0}`")]
    BadCurveName(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Names of the curves in the fixed system.
///
/// `C(i)` for `1 <= i <= 2g+1` is the maximal chain, `D(i)`/`E(i)` the pair
/// cobounding the neighbourhood of `c_1..c_{2i-1}`, `U` the curve used by the
/// explicit twist words of the low-slope family. `LanternA(1..=4)` with
/// `LanternX/Y/Z` form the lantern configuration and `Sep(h)` is the
/// separating boundary of the neighbourhood of `c_1..c_{2h}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveName {
    C(usize),
    D(usize),
    E(usize),
    U,
    LanternA(usize),
    LanternX,
    LanternY,
    LanternZ,
    Sep(usize),
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveName::C(i) => write!(f, "c{i}"),
            CurveName::D(i) => write!(f, "d{i}"),
            CurveName::E(i) => write!(f, "e{i}"),
            CurveName::U => write!(f, "u"),
            CurveName::LanternA(i) => write!(f, "a{i}"),
            CurveName::LanternX => write!(f, "x"),
            CurveName::LanternY => write!(f, "y"),
            CurveName::LanternZ => write!(f, "z"),
            CurveName::Sep(h) => write!(f, "s{h}"),
        }
    }
}

impl FromStr for CurveName {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SurfaceError::BadCurveName(s.to_string());
        match s {
            "u" => return Ok(CurveName::U),
            "x" => return Ok(CurveName::LanternX),
            "y" => return Ok(CurveName::LanternY),
            "z" => return Ok(CurveName::LanternZ),
            _ => {}
        }
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) || tail.starts_with('0') {
            return Err(bad());
        }
        let idx: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "c" => Ok(CurveName::C(idx)),
            "d" => Ok(CurveName::D(idx)),
            "e" => Ok(CurveName::E(idx)),
            "a" => Ok(CurveName::LanternA(idx)),
            "s" => Ok(CurveName::Sep(idx)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for CurveName {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CurveName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A simple closed curve: a named curve, or the image of one under a mapping class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveExpr {
    Named(CurveName),
    Image { map: Arc<MapExpr>, of: Arc<CurveExpr> },
}

/// A mapping-class expression. `Compose` applies its rightmost factor first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapExpr {
    Twist(Arc<CurveExpr>),
    Declared(Arc<str>),
    Compose(Vec<MapExpr>),
    Power { map: Arc<MapExpr>, exp: i64 },
    Inverse(Arc<MapExpr>),
}

impl CurveExpr {
    pub fn named(name: CurveName) -> Self {
        CurveExpr::Named(name)
    }

    pub fn image(map: MapExpr, of: CurveExpr) -> Self {
        CurveExpr::Image { map: Arc::new(map), of: Arc::new(of) }
    }

    pub fn as_named(&self) -> Option<CurveName> {
        match self {
            CurveExpr::Named(n) => Some(*n),
            CurveExpr::Image { .. } => None,
        }
    }

    pub fn is_named(&self, name: CurveName) -> bool {
        self.as_named() == Some(name)
    }

    /// Node count of the expression tree.
    pub fn size(&self) -> usize {
        match self {
            CurveExpr::Named(_) => 1,
            CurveExpr::Image { map, of } => 1 + map.size() + of.size(),
        }
    }
}

impl MapExpr {
    pub fn twist(c: CurveExpr) -> Self {
        MapExpr::Twist(Arc::new(c))
    }

    pub fn twist_named(name: CurveName) -> Self {
        Self::twist(CurveExpr::Named(name))
    }

    pub fn declared(name: &str) -> Self {
        MapExpr::Declared(Arc::from(name))
    }

    pub fn power(map: MapExpr, exp: i64) -> Self {
        MapExpr::Power { map: Arc::new(map), exp }
    }

    pub fn inverse(map: MapExpr) -> Self {
        MapExpr::Inverse(Arc::new(map))
    }

    pub fn identity() -> Self {
        MapExpr::Compose(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, MapExpr::Compose(v) if v.is_empty())
    }

    pub fn size(&self) -> usize {
        match self {
            MapExpr::Twist(c) => 1 + c.size(),
            MapExpr::Declared(_) => 1,
            MapExpr::Compose(v) => 1 + v.iter().map(MapExpr::size).sum::<usize>(),
            MapExpr::Power { map, .. } | MapExpr::Inverse(map) => 1 + map.size(),
        }
    }

    /// `(twist curve, exponent)` for `Twist(c)` and `Power(Twist(c), k)`.
    fn as_twist_power(&self) -> Option<(&Arc<CurveExpr>, i64)> {
        match self {
            MapExpr::Twist(c) => Some((c, 1)),
            MapExpr::Power { map, exp } => match map.as_ref() {
                MapExpr::Twist(c) => Some((c, *exp)),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for CurveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveExpr::Named(n) => write!(f, "{n}"),
            CurveExpr::Image { map, of } => write!(f, "{map}({of})"),
        }
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapExpr::Twist(c) => match c.as_ref() {
                CurveExpr::Named(n) => write!(f, "T[{n}]"),
                other => write!(f, "T[{other}]"),
            },
            MapExpr::Declared(name) => write!(f, "{name}"),
            MapExpr::Compose(v) if v.is_empty() => write!(f, "id"),
            MapExpr::Compose(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join("∘"))
            }
            MapExpr::Power { map, exp } => write!(f, "{map}^{exp}"),
            MapExpr::Inverse(map) => write!(f, "{map}^-1"),
        }
    }
}

/// Homology classes and declared relations of the named curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCurveTable<S> {
    genus: usize,
    classes: BTreeMap<CurveName, HomologyClass<S>>,
    separating: BTreeSet<CurveName>,
    disjoint: BTreeSet<(CurveName, CurveName)>,
    identified: BTreeMap<CurveName, CurveName>,
}

fn ordered(a: CurveName, b: CurveName) -> (CurveName, CurveName) {
    if a <= b { (a, b) } else { (b, a) }
}

impl<S: Scalar> NamedCurveTable<S> {
    /// The standard curve system on the closed genus-`g` surface.
    pub fn standard(genus: usize) -> Result<Self, SurfaceError> {
        if genus < 2 {
            return Err(SurfaceError::InvalidGenus(genus));
        }
        let g = genus;
        let x = |i| HomologyClass::<S>::x(g, i);
        let y = |i| HomologyClass::<S>::y(g, i);
        let mut classes = BTreeMap::new();
        classes.insert(CurveName::C(1), y(1));
        for i in 1..=g {
            classes.insert(CurveName::C(2 * i), x(i));
            classes.insert(CurveName::D(i), y(i));
            classes.insert(CurveName::E(i), -y(i));
        }
        for i in 1..g {
            classes.insert(CurveName::C(2 * i + 1), y(i + 1) - y(i));
        }
        classes.insert(CurveName::C(2 * g + 1), -y(g));
        classes.insert(CurveName::U, x(1) + x(2));
        let mut separating = BTreeSet::new();
        for h in 1..g {
            classes.insert(CurveName::Sep(h), HomologyClass::zero(g));
            separating.insert(CurveName::Sep(h));
        }
        if g >= 3 {
            classes.insert(CurveName::LanternA(1), x(1));
            classes.insert(CurveName::LanternA(2), x(2));
            classes.insert(CurveName::LanternA(3), x(3));
            classes.insert(CurveName::LanternA(4), -(x(1) + x(2) + x(3)));
            classes.insert(CurveName::LanternX, x(1) + x(2));
            classes.insert(CurveName::LanternY, x(2) + x(3));
            classes.insert(CurveName::LanternZ, x(1) + x(3));
        }
        // e_g and c_{2g+1} are the same curve; the c-name is canonical.
        classes.remove(&CurveName::E(g));
        let mut identified = BTreeMap::new();
        identified.insert(CurveName::E(g), CurveName::C(2 * g + 1));

        let mut table =
            Self { genus, classes, separating, disjoint: BTreeSet::new(), identified };
        table.declare_standard_disjointness();
        Ok(table)
    }

    fn declare(&mut self, a: CurveName, b: CurveName) {
        let (a, b) = (self.canonical(a), self.canonical(b));
        if a != b && self.classes.contains_key(&a) && self.classes.contains_key(&b) {
            self.disjoint.insert(ordered(a, b));
        }
    }

    fn declare_standard_disjointness(&mut self) {
        use CurveName::*;
        let g = self.genus;
        let n = 2 * g + 1;
        for i in 1..=n {
            for j in i + 2..=n {
                self.declare(C(i), C(j));
            }
        }
        for i in 1..=g {
            self.declare(D(i), E(i));
            for j in 1..=n {
                if j < 2 * i || j >= 2 * i + 2 {
                    self.declare(D(i), C(j));
                    self.declare(E(i), C(j));
                }
            }
            for k in 1..=g {
                if k != i {
                    self.declare(D(i), D(k));
                    self.declare(E(i), E(k));
                    self.declare(D(i), E(k));
                }
            }
        }
        for h in 1..g {
            for j in 1..=n {
                if j <= 2 * h || j >= 2 * h + 2 {
                    self.declare(Sep(h), C(j));
                }
            }
        }
        if g >= 3 {
            for i in 1..=4 {
                for j in i + 1..=4 {
                    self.declare(LanternA(i), LanternA(j));
                }
                for t in [LanternX, LanternY, LanternZ] {
                    self.declare(LanternA(i), t);
                }
            }
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Resolves declared identifications (`e_g ≡ c_{2g+1}`).
    pub fn canonical(&self, name: CurveName) -> CurveName {
        self.identified.get(&name).copied().unwrap_or(name)
    }

    pub fn contains(&self, name: CurveName) -> bool {
        self.classes.contains_key(&self.canonical(name))
    }

    pub fn class(&self, name: CurveName) -> Result<&HomologyClass<S>, SurfaceError> {
        self.classes
            .get(&self.canonical(name))
            .ok_or(SurfaceError::UnknownCurve(name, self.genus))
    }

    pub fn is_separating(&self, name: CurveName) -> bool {
        self.separating.contains(&self.canonical(name))
    }

    pub fn are_disjoint(&self, a: CurveName, b: CurveName) -> bool {
        self.disjoint.contains(&ordered(self.canonical(a), self.canonical(b)))
    }

    pub fn names(&self) -> impl Iterator<Item = CurveName> + '_ {
        self.classes.keys().copied()
    }

    pub fn disjoint_pairs(&self) -> impl Iterator<Item = (CurveName, CurveName)> + '_ {
        self.disjoint.iter().copied()
    }

    pub fn identifications(&self) -> impl Iterator<Item = (CurveName, CurveName)> + '_ {
        self.identified.iter().map(|(a, b)| (*a, *b))
    }

    /// Checks the necessary homological conditions of the table: primitive
    /// nonseparating classes, zero separating classes, zero pairing on
    /// declared-disjoint pairs. Returns a description of each violation.
    pub fn validate(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for (name, class) in &self.classes {
            if self.separating.contains(name) {
                if !class.is_zero() {
                    failures.push(format!("separating curve {name} has nonzero class {class}"));
                }
            } else if !class.is_primitive() {
                failures.push(format!("nonseparating curve {name} has non-primitive class {class}"));
            }
        }
        for (a, b) in &self.disjoint {
            let p = self.classes[a].pairing_unchecked(&self.classes[b]);
            if !p.is_zero() {
                failures.push(format!("declared disjoint {a}, {b} pair to {p}"));
            }
        }
        failures
    }
}

/// A diffeomorphism known only through its homology matrix and a finite
/// table of curve images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct DeclaredDiffeo<S> {
    pub name: Arc<str>,
    pub axioms: BTreeMap<CurveName, CurveName>,
    pub matrix: Matrix<S>,
}

impl<S: Scalar> DeclaredDiffeo<S> {
    pub fn new(
        name: &str,
        axioms: impl IntoIterator<Item = (CurveName, CurveName)>,
        matrix: Matrix<S>,
    ) -> Self {
        Self { name: Arc::from(name), axioms: axioms.into_iter().collect(), matrix }
    }

    pub fn image_of(&self, name: CurveName) -> Option<CurveName> {
        self.axioms.get(&name).copied()
    }
}

/// Outcome of checking a declared map against the curve table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub map: String,
    pub symplectic: bool,
    pub failures: Vec<String>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.symplectic && self.failures.is_empty()
    }
}

/// The genus-g surface: lattice, named curves and declared maps.
#[derive(Debug, Clone)]
pub struct SurfaceModel<S> {
    lattice: SymplecticLattice<S>,
    table: NamedCurveTable<S>,
    declared: BTreeMap<Arc<str>, DeclaredDiffeo<S>>,
}

impl<S: Scalar> SurfaceModel<S> {
    pub fn standard(genus: usize) -> Result<Self, SurfaceError> {
        Ok(Self {
            lattice: SymplecticLattice::new(genus),
            table: NamedCurveTable::standard(genus)?,
            declared: BTreeMap::new(),
        })
    }

    pub fn genus(&self) -> usize {
        self.table.genus()
    }

    pub fn lattice(&self) -> &SymplecticLattice<S> {
        &self.lattice
    }

    pub fn table(&self) -> &NamedCurveTable<S> {
        &self.table
    }

    pub fn declare(&mut self, map: DeclaredDiffeo<S>) -> Result<(), SurfaceError> {
        let dim = self.lattice.dim();
        if map.matrix.nrows() != dim || map.matrix.ncols() != dim {
            return Err(SurfaceError::MatrixShape(map.name.to_string(), map.matrix.nrows(), dim));
        }
        for (a, b) in &map.axioms {
            self.table.class(*a)?;
            self.table.class(*b)?;
        }
        if self.declared.contains_key(&map.name) {
            return Err(SurfaceError::DuplicateMap(map.name.to_string()));
        }
        self.declared.insert(map.name.clone(), map);
        Ok(())
    }

    /// Declares `map`, replacing any earlier map with the same name.
    pub fn redeclare(&mut self, map: DeclaredDiffeo<S>) -> Result<(), SurfaceError> {
        self.declared.remove(&map.name);
        self.declare(map)
    }

    pub fn declared(&self, name: &str) -> Result<&DeclaredDiffeo<S>, SurfaceError> {
        self.declared.get(name).ok_or_else(|| SurfaceError::UnknownMap(name.to_string()))
    }

    pub fn declared_maps(&self) -> impl Iterator<Item = &DeclaredDiffeo<S>> {
        self.declared.values()
    }

    pub fn named(&self, name: CurveName) -> Result<CurveExpr, SurfaceError> {
        self.table.class(name)?;
        Ok(CurveExpr::Named(self.table.canonical(name)))
    }

    pub fn homology_of_curve(&self, e: &CurveExpr) -> Result<HomologyClass<S>, SurfaceError> {
        HomologyEvaluator::new(self).curve(e)
    }

    pub fn matrix_of_map(&self, m: &MapExpr) -> Result<Matrix<S>, SurfaceError> {
        HomologyEvaluator::new(self).matrix(m)
    }

    /// Applies the homology action of `m` to `v`.
    pub fn apply_map(&self, m: &MapExpr, v: &HomologyClass<S>) -> Result<HomologyClass<S>, SurfaceError> {
        HomologyEvaluator::new(self).apply(m, v.clone())
    }

    pub fn check_declared_consistency(&self, d: &DeclaredDiffeo<S>) -> ConsistencyReport {
        let symplectic = self.lattice.is_symplectic(&d.matrix);
        let mut failures = Vec::new();
        if !symplectic {
            failures.push("matrix is not symplectic".to_string());
        }
        for (a, b) in &d.axioms {
            match (self.table.class(*a), self.table.class(*b)) {
                (Ok(ca), Ok(cb)) => match d.matrix.apply(ca) {
                    Ok(img) if img.eq_up_to_sign(cb) => {}
                    Ok(img) => failures.push(format!("{a} ↦ {b}: matrix sends [{a}] = {ca} to {img}, not ±{cb}")),
                    Err(e) => failures.push(format!("{a} ↦ {b}: {e}")),
                },
                (Err(e), _) | (_, Err(e)) => failures.push(e.to_string()),
            }
        }
        ConsistencyReport { map: d.name.to_string(), symplectic, failures }
    }

    /// Declared disjointness lifted to expressions: images under a common
    /// map, and twists that fix the other curve, are peeled off.
    pub fn curves_disjoint(&self, a: &CurveExpr, b: &CurveExpr) -> bool {
        match (a, b) {
            (CurveExpr::Named(x), CurveExpr::Named(y)) => self.table.are_disjoint(*x, *y),
            (CurveExpr::Image { map: ma, of: oa }, CurveExpr::Image { map: mb, of: ob }) if ma == mb => {
                self.curves_disjoint(oa, ob)
            }
            (CurveExpr::Image { map, of }, other) | (other, CurveExpr::Image { map, of }) => {
                match map.as_twist_power() {
                    Some((t, _)) if self.twist_fixes(t, other) => self.curves_disjoint(of, other),
                    _ => false,
                }
            }
        }
    }

    /// True when the twist about `t` fixes the curve `c` up to isotopy
    /// by the declared data: `t = c` or `t, c` disjoint.
    fn twist_fixes(&self, t: &CurveExpr, c: &CurveExpr) -> bool {
        t == c || self.curves_disjoint(t, c)
    }

    /// Rewrites `e` to a fixed point of the conjugation, commutation and
    /// axiom rules. The homology class is preserved up to sign.
    pub fn normalize_curve(&self, e: &CurveExpr) -> CurveExpr {
        match e {
            CurveExpr::Named(n) => CurveExpr::Named(self.table.canonical(*n)),
            CurveExpr::Image { map, of } => {
                let of = self.normalize_curve(of);
                let map = self.normalize_map(map);
                self.reduce_image(&map, of)
            }
        }
    }

    /// `map(of)` for an already normalized `map` and `of`. Cheaper than
    /// `normalize_curve` when a normalized map is applied to many curves.
    pub fn reduce_image(&self, map: &MapExpr, of: CurveExpr) -> CurveExpr {
        match map {
            MapExpr::Compose(factors) => {
                factors.iter().rev().fold(of, |acc, f| self.reduce_image(f, acc))
            }
            MapExpr::Declared(name) => {
                if let (CurveExpr::Named(a), Ok(d)) = (&of, self.declared(name)) {
                    if let Some(b) = d.image_of(*a) {
                        return CurveExpr::Named(self.table.canonical(b));
                    }
                }
                CurveExpr::image(map.clone(), of)
            }
            _ => {
                let Some((t, k)) = map.as_twist_power() else {
                    return CurveExpr::image(map.clone(), of);
                };
                if k == 0 || self.twist_fixes(t, &of) {
                    return of;
                }
                if let CurveExpr::Image { map: inner_map, of: inner } = &of {
                    if let Some((t2, k2)) = inner_map.as_twist_power() {
                        if t2 == t {
                            let total = k + k2;
                            let inner = inner.as_ref().clone();
                            if total == 0 {
                                return inner;
                            }
                            return CurveExpr::image(twist_power(t.clone(), total), inner);
                        }
                    }
                }
                CurveExpr::image(map.clone(), of)
            }
        }
    }

    pub fn normalize_map(&self, m: &MapExpr) -> MapExpr {
        match m {
            MapExpr::Twist(c) => MapExpr::Twist(Arc::new(self.normalize_curve(c))),
            MapExpr::Declared(_) => m.clone(),
            MapExpr::Compose(factors) => {
                let mut flat = Vec::with_capacity(factors.len());
                for f in factors {
                    match self.normalize_map(f) {
                        MapExpr::Compose(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 { flat.pop().unwrap() } else { MapExpr::Compose(flat) }
            }
            MapExpr::Inverse(inner) => self.normalize_power(self.normalize_map(inner), -1),
            MapExpr::Power { map, exp } => self.normalize_power(self.normalize_map(map), *exp),
        }
    }

    fn normalize_power(&self, base: MapExpr, exp: i64) -> MapExpr {
        if exp == 0 || base.is_identity() {
            return MapExpr::identity();
        }
        if exp == 1 {
            return base;
        }
        match base {
            MapExpr::Power { map, exp: inner } => self.normalize_power(map.as_ref().clone(), inner * exp),
            MapExpr::Compose(factors) if exp < 0 => {
                let inverted: Vec<MapExpr> =
                    factors.into_iter().rev().map(|f| self.normalize_power(f, -1)).collect();
                self.normalize_power(MapExpr::Compose(inverted), -exp)
            }
            other => MapExpr::Power { map: Arc::new(other), exp },
        }
    }
}

fn twist_power(c: Arc<CurveExpr>, k: i64) -> MapExpr {
    if k == 1 {
        MapExpr::Twist(c)
    } else {
        MapExpr::Power { map: Arc::new(MapExpr::Twist(c)), exp: k }
    }
}

/// Homology evaluation with memoization on shared subexpressions.
///
/// Keys are `Arc` addresses; the memo holds a clone of each keyed `Arc`,
/// so no address can be reused while the evaluator lives.
pub struct HomologyEvaluator<'a, S> {
    surface: &'a SurfaceModel<S>,
    curves: HashMap<usize, (Arc<CurveExpr>, HomologyClass<S>)>,
}

impl<'a, S: Scalar> HomologyEvaluator<'a, S> {
    pub fn new(surface: &'a SurfaceModel<S>) -> Self {
        Self { surface, curves: HashMap::new() }
    }

    fn shared(&mut self, e: &Arc<CurveExpr>) -> Result<HomologyClass<S>, SurfaceError> {
        if let CurveExpr::Named(n) = e.as_ref() {
            return Ok(self.surface.table.class(*n)?.clone());
        }
        let key = Arc::as_ptr(e) as usize;
        if let Some((_, v)) = self.curves.get(&key) {
            return Ok(v.clone());
        }
        let v = self.curve(e)?;
        self.curves.insert(key, (e.clone(), v.clone()));
        Ok(v)
    }

    pub fn curve(&mut self, e: &CurveExpr) -> Result<HomologyClass<S>, SurfaceError> {
        match e {
            CurveExpr::Named(n) => Ok(self.surface.table.class(*n)?.clone()),
            CurveExpr::Image { map, of } => {
                let inner = self.shared(of)?;
                self.apply(map, inner)
            }
        }
    }

    pub fn apply(&mut self, m: &MapExpr, v: HomologyClass<S>) -> Result<HomologyClass<S>, SurfaceError> {
        if let Some((t, k)) = m.as_twist_power() {
            let c = self.shared(t)?;
            let mut v = v;
            if c.dim() != v.dim() {
                return Err(LatticeError::DimensionMismatch { expected: c.dim(), found: v.dim() }.into());
            }
            v.twist_by(&c, &S::of(k));
            return Ok(v);
        }
        match m {
            MapExpr::Declared(name) => Ok(self.surface.declared(name)?.matrix.apply(&v)?),
            MapExpr::Compose(factors) => {
                factors.iter().rev().try_fold(v, |acc, f| self.apply(f, acc))
            }
            MapExpr::Inverse(inner) => {
                let mat = self.matrix(inner)?;
                Ok(self.surface.lattice.symplectic_inverse(&mat).apply(&v)?)
            }
            MapExpr::Power { map, exp } => {
                let mat = self.matrix(map)?;
                let base = if *exp < 0 { self.surface.lattice.symplectic_inverse(&mat) } else { mat };
                Ok(base.pow(exp.unsigned_abs()).apply(&v)?)
            }
            MapExpr::Twist(_) => unreachable!("handled by the twist fast path"),
        }
    }

    pub fn matrix(&mut self, m: &MapExpr) -> Result<Matrix<S>, SurfaceError> {
        let lattice = &self.surface.lattice;
        match m {
            MapExpr::Twist(c) => {
                let c = self.shared(c)?;
                Ok(lattice.transvection(&c)?)
            }
            MapExpr::Declared(name) => Ok(self.surface.declared(name)?.matrix.clone()),
            MapExpr::Compose(factors) => {
                let mut acc = Matrix::identity(lattice.dim());
                for f in factors {
                    acc = &acc * &self.matrix(f)?;
                }
                Ok(acc)
            }
            MapExpr::Inverse(inner) => {
                let mat = self.matrix(inner)?;
                Ok(self.surface.lattice.symplectic_inverse(&mat))
            }
            MapExpr::Power { map, exp } => {
                if let MapExpr::Twist(c) = map.as_ref() {
                    let c = self.shared(c)?;
                    return Ok(self.surface.lattice.transvection_power(&c, &S::of(*exp))?);
                }
                let mat = self.matrix(map)?;
                let base = if *exp < 0 { self.surface.lattice.symplectic_inverse(&mat) } else { mat };
                Ok(base.pow(exp.unsigned_abs()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CurveName::*;

    type Surface = SurfaceModel<i64>;
    type C = HomologyClass<i64>;

    fn named(n: CurveName) -> CurveExpr {
        CurveExpr::Named(n)
    }

    #[test]
    fn curve_names_round_trip() {
        for n in [C(1), C(13), D(2), E(4), U, LanternA(3), LanternX, LanternY, LanternZ, Sep(2)] {
            assert_eq!(n.to_string().parse::<CurveName>().unwrap(), n);
        }
        for bad in ["", "c", "c0", "q1", "c01", "cx"] {
            assert!(bad.parse::<CurveName>().is_err(), "{bad}");
        }
    }

    #[test]
    fn standard_table_is_valid() {
        for g in 2..=8 {
            let t = NamedCurveTable::<i64>::standard(g).unwrap();
            assert!(t.validate().is_empty(), "g={g}: {:?}", t.validate());
            assert_eq!(t.class(E(g)).unwrap(), t.class(C(2 * g + 1)).unwrap());
        }
        assert_eq!(NamedCurveTable::<i64>::standard(1).unwrap_err(), SurfaceError::InvalidGenus(1));
    }

    #[test]
    fn committed_classes() {
        let s = Surface::standard(3).unwrap();
        let t = s.table();
        assert_eq!(t.class(C(1)).unwrap(), &C::y(3, 1));
        assert_eq!(t.class(C(2)).unwrap(), &C::x(3, 1));
        assert_eq!(t.class(C(5)).unwrap(), &(C::y(3, 3) - C::y(3, 2)));
        assert_eq!(t.class(C(7)).unwrap(), &-C::y(3, 3));
        assert_eq!(t.class(U).unwrap(), &(C::x(3, 1) + C::x(3, 2)));
        let p = s.lattice().pairing(t.class(C(1)).unwrap(), t.class(C(2)).unwrap()).unwrap();
        assert_eq!(p.abs(), 1);
    }

    #[test]
    fn chain_adjacency_pairs_to_unit() {
        for g in 2..=6 {
            let s = Surface::standard(g).unwrap();
            for i in 1..=2 * g {
                let a = s.table().class(C(i)).unwrap();
                let b = s.table().class(C(i + 1)).unwrap();
                assert_eq!(a.pairing(b).unwrap().abs(), 1, "c{i}, c{}", i + 1);
            }
        }
    }

    #[test]
    fn homology_of_expressions() {
        let s = Surface::standard(3).unwrap();
        assert_eq!(s.homology_of_curve(&named(C(2))).unwrap(), C::x(3, 1));
        let fixed = CurveExpr::image(MapExpr::twist_named(C(1)), named(C(1)));
        assert_eq!(s.homology_of_curve(&fixed).unwrap(), C::y(3, 1));
        let ut = s.apply_map(&MapExpr::twist_named(U), &C::y(3, 1)).unwrap();
        assert_eq!(ut, C::y(3, 1) - C::x(3, 1) - C::x(3, 2));
        assert!(matches!(
            s.homology_of_curve(&named(C(9))),
            Err(SurfaceError::UnknownCurve(C(9), 3))
        ));
    }

    #[test]
    fn matrix_of_map_examples() {
        let s = Surface::standard(3).unwrap();
        let sep = s.matrix_of_map(&MapExpr::twist_named(Sep(1))).unwrap();
        assert!(sep.is_identity());
        let t = MapExpr::twist_named(C(1));
        let m = MapExpr::Compose(vec![
            t.clone(),
            t.clone(),
            MapExpr::inverse(t.clone()),
            MapExpr::inverse(t.clone()),
        ]);
        assert!(s.matrix_of_map(&m).unwrap().is_identity());
        let phi = MapExpr::Compose(vec![
            MapExpr::twist_named(U),
            MapExpr::twist_named(D(2)),
            MapExpr::twist_named(C(1)),
            MapExpr::twist_named(U),
        ]);
        let mat = s.matrix_of_map(&phi).unwrap();
        assert!(s.lattice().is_symplectic(&mat));
        assert_eq!(mat.apply(&C::y(3, 1)).unwrap(), -C::y(3, 2));
        assert!(matches!(
            s.matrix_of_map(&MapExpr::declared("nope")),
            Err(SurfaceError::UnknownMap(_))
        ));
    }

    #[test]
    fn compose_is_rightmost_first() {
        let s = Surface::standard(2).unwrap();
        let a = MapExpr::twist_named(C(1));
        let b = MapExpr::twist_named(C(2));
        let ab = s.matrix_of_map(&MapExpr::Compose(vec![a.clone(), b.clone()])).unwrap();
        let expected = &s.matrix_of_map(&a).unwrap() * &s.matrix_of_map(&b).unwrap();
        assert_eq!(ab, expected);
        let v = C::x(2, 2);
        let direct = s.apply_map(&a, &s.apply_map(&b, &v).unwrap()).unwrap();
        assert_eq!(ab.apply(&v).unwrap(), direct);
    }

    #[test]
    fn normalization_rules() {
        let mut s = Surface::standard(3).unwrap();
        s.declare(DeclaredDiffeo::new("psi", [(C(1), C(4)), (C(2), C(5))], Matrix::identity(6)))
            .unwrap();
        let e = CurveExpr::image(MapExpr::declared("psi"), named(C(1)));
        assert_eq!(s.normalize_curve(&e), named(C(4)));
        let e = CurveExpr::image(MapExpr::twist_named(D(2)), named(C(3)));
        assert_eq!(s.normalize_curve(&e), named(C(3)));
        let e = CurveExpr::image(MapExpr::twist_named(C(1)), named(C(1)));
        assert_eq!(s.normalize_curve(&e), named(C(1)));
        let e = CurveExpr::image(MapExpr::power(MapExpr::twist_named(C(1)), 0), named(C(2)));
        assert_eq!(s.normalize_curve(&e), named(C(2)));
        // e_g is stored under its chain name
        assert_eq!(s.normalize_curve(&named(E(3))), named(C(7)));
    }

    #[test]
    fn opposite_twists_cancel() {
        let s = Surface::standard(3).unwrap();
        let t = MapExpr::twist_named(C(1));
        let e = CurveExpr::image(
            MapExpr::inverse(t.clone()),
            CurveExpr::image(t.clone(), named(C(2))),
        );
        assert_eq!(s.normalize_curve(&e), named(C(2)));
        let e = CurveExpr::image(t.clone(), CurveExpr::image(t.clone(), named(C(2))));
        let n = s.normalize_curve(&e);
        assert_eq!(n, CurveExpr::image(MapExpr::power(t, 2), named(C(2))));
        assert_eq!(s.normalize_curve(&n), n);
    }

    #[test]
    fn declared_consistency_reports() {
        let mut s = Surface::standard(3).unwrap();
        let bad = DeclaredDiffeo::new("bad", [(C(1), C(2))], Matrix::identity(6));
        let report = s.check_declared_consistency(&bad);
        assert!(report.symplectic);
        assert!(!report.passed());
        assert_eq!(report.failures.len(), 1);
        let mut not_sp = Matrix::<i64>::identity(6);
        not_sp[(0, 0)] = 2;
        let r = s.check_declared_consistency(&DeclaredDiffeo::new("m", [], not_sp));
        assert!(!r.symplectic);
        s.declare(bad.clone()).unwrap();
        assert!(matches!(s.declare(bad), Err(SurfaceError::DuplicateMap(_))));
    }

    #[test]
    fn disjointness_through_images() {
        let s = Surface::standard(3).unwrap();
        let a = CurveExpr::image(MapExpr::twist_named(C(2)), named(C(1)));
        assert!(!s.curves_disjoint(&a, &named(C(2))));
        // c_4 is disjoint from c_2 and c_1
        assert!(s.curves_disjoint(&a, &named(C(4))));
        let m = MapExpr::declared("f");
        let b1 = CurveExpr::image(m.clone(), named(C(1)));
        let b2 = CurveExpr::image(m, named(C(3)));
        assert!(s.curves_disjoint(&b1, &b2));
    }
}
