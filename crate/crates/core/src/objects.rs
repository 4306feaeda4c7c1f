//! Objects of D(P^1) as formal sums of shifted indecomposable Kronecker
//! modules.
//!
//! The Kronecker heart is generated by `S1 = O(-1)[1]` and `S2 = O`; under
//! this tilting dictionary
//!
//! | indecomposable   | dimension vector | sheaf                   |
//! |------------------|------------------|-------------------------|
//! | `Preproj(n)`     | `(n, n+1)`       | `O(n)`                  |
//! | `Preinj(n)`      | `(n+1, n)`       | `O(-n-1)[1]`            |
//! | `Regular(x, n)`  | `(n, n)`         | length-`n` torsion at x |
//!
//! Since the heart is hereditary, every object is a finite direct sum of
//! shifted indecomposables, which is what [`ObjectExpr`] stores.
//!
//! # Hom table
//!
//! `hom^0` and `hom^1` between module indecomposables (`m`, `n` are the
//! parameters of the first and second argument):
//!
//! | first \ second | `Preproj(n)`                          | `Regular(y, n)`             | `Preinj(n)`                          |
//! |----------------|---------------------------------------|-----------------------------|--------------------------------------|
//! | `Preproj(m)`   | `max(0, n-m+1)` / `max(0, m-n-1)`     | `n` / `0`                   | `m+n` / `0`                          |
//! | `Regular(x,m)` | `0` / `m`                             | `[x=y] min` / `[x=y] min`   | `m` / `0`                            |
//! | `Preinj(m)`    | `0` / `m+n+2`                         | `0` / `n`                   | `max(0, m-n+1)` / `max(0, n-m-1)`    |
//!
//! Every cell satisfies `hom^0 - hom^1 = euler_a`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rational, Q};
use crate::lattice::{KClassA, KClassCY};

/// A point of P^1 with exact coordinates, normalised to `[1:t]` or `[0:1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ProjPoint {
    Affine(Q),
    Infinity,
}

impl ProjPoint {
    pub fn new(lambda: Q, mu: Q) -> Result<Self> {
        if lambda.is_zero() {
            if mu.is_zero() {
                return Err(Error::Parse {
                    pos: 0,
                    msg: "point [0:0] is not in P^1".into(),
                });
            }
            Ok(ProjPoint::Infinity)
        } else {
            Ok(ProjPoint::Affine(mu / lambda))
        }
    }

    pub fn affine(t: i64) -> Self {
        ProjPoint::Affine(Q::from_integer(t.into()))
    }

    /// The `p + 1` points of P^1(F_p) as rational representatives
    /// `[1:0], ..., [1:p-1], [0:1]`.
    pub fn over_prime(p: u32) -> Vec<ProjPoint> {
        (0..p as i64)
            .map(ProjPoint::affine)
            .chain(std::iter::once(ProjPoint::Infinity))
            .collect()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Affine(t) => write!(f, "[1:{}]", format_rational(t)),
            ProjPoint::Infinity => write!(f, "[0:1]"),
        }
    }
}

/// Indecomposable representation of the Kronecker quiver.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Indec {
    Preproj(u32),
    Preinj(u32),
    Regular(ProjPoint, u32),
}

impl Indec {
    pub const S1: Indec = Indec::Preinj(0);
    pub const S2: Indec = Indec::Preproj(0);

    pub fn dim(&self) -> (u64, u64) {
        match *self {
            Indec::Preproj(n) => (n as u64, n as u64 + 1),
            Indec::Preinj(n) => (n as u64 + 1, n as u64),
            Indec::Regular(_, n) => (n as u64, n as u64),
        }
    }

    pub fn class(&self) -> KClassA {
        let (a, b) = self.dim();
        KClassA::new(a, b)
    }

    pub fn is_simple(&self) -> bool {
        *self == Indec::S1 || *self == Indec::S2
    }
}

impl fmt::Display for Indec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Indec::Preproj(n) => write!(f, "P({n})"),
            Indec::Preinj(n) => write!(f, "I({n})"),
            Indec::Regular(x, n) => write!(f, "R({x},{n})"),
        }
    }
}

/// A shifted indecomposable, the building block of [`ObjectExpr`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Summand {
    pub indec: Indec,
    pub shift: i64,
}

impl Summand {
    pub fn new(indec: Indec, shift: i64) -> Self {
        Self { indec, shift }
    }
}

/// Formal direct sum of shifted indecomposables with multiplicities.
///
/// The map is the canonical form: keys are ordered by kind, parameters and
/// then shift, and every stored multiplicity is at least one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ObjectExpr {
    terms: BTreeMap<Summand, BigUint>,
}

impl ObjectExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indec(indec: Indec) -> Self {
        Self::summand(indec, 0, BigUint::one())
    }

    pub fn summand(indec: Indec, shift: i64, mult: impl Into<BigUint>) -> Self {
        let mut obj = Self::zero();
        obj.add_summand(Summand::new(indec, shift), mult.into());
        obj
    }

    /// `O(n)` under the tilting dictionary.
    pub fn line_bundle(n: i64) -> Self {
        let (indec, shift) = line_bundle_summand(n);
        Self::summand(indec, shift, 1u32)
    }

    /// The skyscraper sheaf `O_x`.
    pub fn point(x: ProjPoint) -> Self {
        Self::indec(Indec::Regular(x, 1))
    }

    pub fn add_summand(&mut self, s: Summand, mult: BigUint) {
        if mult.is_zero() {
            return;
        }
        *self.terms.entry(s).or_insert_with(BigUint::zero) += mult;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Summand, &BigUint)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// One summand with multiplicity one.
    pub fn as_indecomposable(&self) -> Option<&Summand> {
        match self.terms.iter().next() {
            Some((s, m)) if self.terms.len() == 1 && m.is_one() => Some(s),
            _ => None,
        }
    }

    pub fn direct_sum(&self, other: &ObjectExpr) -> ObjectExpr {
        let mut out = self.clone();
        for (s, m) in other.terms() {
            out.add_summand(s.clone(), m.clone());
        }
        out
    }

    pub fn shift(&self, k: i64) -> ObjectExpr {
        ObjectExpr {
            terms: self
                .terms
                .iter()
                .map(|(s, m)| (Summand::new(s.indec.clone(), s.shift + k), m.clone()))
                .collect(),
        }
    }

    /// `n` copies of `self`.
    pub fn power(&self, n: &BigUint) -> ObjectExpr {
        if n.is_zero() {
            return ObjectExpr::zero();
        }
        ObjectExpr {
            terms: self.terms.iter().map(|(s, m)| (s.clone(), m * n)).collect(),
        }
    }

    /// The common shift of all summands, if there is one.
    pub fn uniform_shift(&self) -> Option<i64> {
        let mut shifts = self.terms.keys().map(|s| s.shift);
        let first = shifts.next()?;
        shifts.all(|k| k == first).then_some(first)
    }

    /// Splits into maximal pieces of a single shift, in increasing shift order.
    pub fn by_shift(&self) -> BTreeMap<i64, ObjectExpr> {
        let mut out: BTreeMap<i64, ObjectExpr> = BTreeMap::new();
        for (s, m) in self.terms() {
            out.entry(s.shift)
                .or_default()
                .add_summand(s.clone(), m.clone());
        }
        out
    }

    /// Total dimension vector ignoring shift signs.
    pub fn unsigned_dim(&self) -> (BigUint, BigUint) {
        let mut d = (BigUint::zero(), BigUint::zero());
        for (s, m) in self.terms() {
            let (a, b) = s.indec.dim();
            d.0 += m * a;
            d.1 += m * b;
        }
        d
    }

    /// Class with the shift undone: the dimension vector of the underlying
    /// module.
    pub fn heart_class(&self) -> KClassA {
        let (a, b) = self.unsigned_dim();
        KClassA::new(BigInt::from(a), BigInt::from(b))
    }
}

impl fmt::Display for ObjectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::grammar::format_object(self))
    }
}

fn sign_of_shift(shift: i64) -> BigInt {
    if shift.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `O(n)` as a shifted indecomposable.
pub fn line_bundle_summand(n: i64) -> (Indec, i64) {
    if n >= 0 {
        (Indec::Preproj(n as u32), 0)
    } else {
        (Indec::Preinj((-n - 1) as u32), -1)
    }
}

/// Sheaf-theoretic reading of a shifted indecomposable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SheafAtom {
    /// `O(degree)[shift]`
    Line { degree: i64, shift: i64 },
    /// length-`length` torsion sheaf at `point`, shifted
    Torsion {
        point: ProjPoint,
        length: u32,
        shift: i64,
    },
}

pub fn as_sheaf(s: &Summand) -> SheafAtom {
    match &s.indec {
        Indec::Preproj(n) => SheafAtom::Line {
            degree: *n as i64,
            shift: s.shift,
        },
        Indec::Preinj(n) => SheafAtom::Line {
            degree: -(*n as i64) - 1,
            shift: s.shift + 1,
        },
        Indec::Regular(x, n) => SheafAtom::Torsion {
            point: x.clone(),
            length: *n,
            shift: s.shift,
        },
    }
}

pub fn from_sheaf(a: &SheafAtom) -> Summand {
    match a {
        SheafAtom::Line { degree, shift } => {
            let (indec, k) = line_bundle_summand(*degree);
            Summand::new(indec, shift + k)
        }
        SheafAtom::Torsion {
            point,
            length,
            shift,
        } => Summand::new(Indec::Regular(point.clone(), *length), *shift),
    }
}

/// The autoequivalence `- (x) O(w)`: line bundles move by `w`, torsion is
/// fixed.
pub fn tensor_line_bundle(x: &ObjectExpr, w: i64) -> ObjectExpr {
    let mut out = ObjectExpr::zero();
    for (s, m) in x.terms() {
        let atom = match as_sheaf(s) {
            SheafAtom::Line { degree, shift } => SheafAtom::Line {
                degree: degree + w,
                shift,
            },
            t => t,
        };
        out.add_summand(from_sheaf(&atom), m.clone());
    }
    out
}

/// Signed class in `K(D(P^1))`; odd shifts negate.
pub fn class_of(x: &ObjectExpr) -> KClassA {
    let mut c = KClassA::zero();
    for (s, m) in x.terms() {
        let k = sign_of_shift(s.shift) * BigInt::from(m.clone());
        c = &c + &s.indec.class().scale(&k);
    }
    c
}

/// Class in `K(local P^1) = Z[O_x] + Z[O]` of the pushforward from the zero
/// section.
pub fn cy_class(x: &ObjectExpr) -> KClassCY {
    let mut c = KClassCY::default();
    for (s, m) in x.terms() {
        let base = match &s.indec {
            Indec::Preproj(n) => KClassCY::line_bundle(*n as i64),
            Indec::Regular(_, n) => KClassCY::point().scale(&BigInt::from(*n)),
            Indec::Preinj(n) => -&KClassCY::line_bundle(-(*n as i64) - 1),
        };
        let k = sign_of_shift(s.shift) * BigInt::from(m.clone());
        c = &c + &base.scale(&k);
    }
    c
}

/// Dimensions of `Hom^i` between module indecomposables, `i` in `{0, 1}`.
pub trait HomTable {
    fn hom(&self, m: &Indec, n: &Indec, i: u8) -> u64;
}

/// The closed-form table for the Kronecker quiver.
#[derive(Clone, Copy, Debug, Default)]
pub struct KroneckerHom;

impl HomTable for KroneckerHom {
    fn hom(&self, m: &Indec, n: &Indec, i: u8) -> u64 {
        use Indec::*;
        let pos = |x: i64| x.max(0) as u64;
        let (h0, h1) = match (m, n) {
            (Preproj(a), Preproj(b)) => {
                let (a, b) = (*a as i64, *b as i64);
                (pos(b - a + 1), pos(a - b - 1))
            }
            (Preproj(_), Regular(_, b)) => (*b as u64, 0),
            (Preproj(a), Preinj(b)) => (*a as u64 + *b as u64, 0),
            (Regular(_, a), Preproj(_)) => (0, *a as u64),
            (Regular(x, a), Regular(y, b)) => {
                let v = if x == y { (*a).min(*b) as u64 } else { 0 };
                (v, v)
            }
            (Regular(_, a), Preinj(_)) => (*a as u64, 0),
            (Preinj(a), Preproj(b)) => (0, *a as u64 + *b as u64 + 2),
            (Preinj(_), Regular(_, b)) => (0, *b as u64),
            (Preinj(a), Preinj(b)) => {
                let (a, b) = (*a as i64, *b as i64);
                (pos(a - b + 1), pos(b - a - 1))
            }
        };
        match i {
            0 => h0,
            1 => h1,
            _ => 0,
        }
    }
}

pub fn hom_dim(m: &Indec, n: &Indec, i: u8) -> u64 {
    KroneckerHom.hom(m, n, i)
}

/// `dim Hom^i(X, Y)` in D(P^1), extended bilinearly over summands.
pub fn hom_a_with(table: &dyn HomTable, x: &ObjectExpr, y: &ObjectExpr, i: i64) -> BigUint {
    let mut total = BigUint::zero();
    for (sx, mx) in x.terms() {
        for (sy, my) in y.terms() {
            let degree = i + sy.shift - sx.shift;
            if degree == 0 || degree == 1 {
                let h = table.hom(&sx.indec, &sy.indec, degree as u8);
                if h != 0 {
                    total += mx * my * h;
                }
            }
        }
    }
    total
}

pub fn hom_a(x: &ObjectExpr, y: &ObjectExpr, i: i64) -> BigUint {
    hom_a_with(&KroneckerHom, x, y, i)
}

/// `dim Hom^i` between pushforwards in the 2-Calabi-Yau category:
/// `hom^i(X, Y) + hom^{2-i}(Y, X)` computed in D(P^1).
pub fn hom_dim_cy_with(table: &dyn HomTable, x: &ObjectExpr, y: &ObjectExpr, i: i64) -> BigUint {
    hom_a_with(table, x, y, i) + hom_a_with(table, y, x, 2 - i)
}

pub fn hom_dim_cy(x: &ObjectExpr, y: &ObjectExpr, i: i64) -> BigUint {
    hom_dim_cy_with(&KroneckerHom, x, y, i)
}

/// All nonzero `Hom^i_CY(X, Y)`, keyed by degree.
pub fn hom_cy_degrees_with(
    table: &dyn HomTable,
    x: &ObjectExpr,
    y: &ObjectExpr,
) -> BTreeMap<i64, BigUint> {
    let mut degrees = std::collections::BTreeSet::new();
    for (sx, _) in x.terms() {
        for (sy, _) in y.terms() {
            let base = sx.shift - sy.shift;
            degrees.extend([base, base + 1, base + 2]);
        }
    }
    degrees
        .into_iter()
        .map(|i| (i, hom_dim_cy_with(table, x, y, i)))
        .filter(|(_, h)| !h.is_zero())
        .collect()
}

pub fn hom_cy_degrees(x: &ObjectExpr, y: &ObjectExpr) -> BTreeMap<i64, BigUint> {
    hom_cy_degrees_with(&KroneckerHom, x, y)
}

/// `Hom^0 = Hom^2 = C` and every other self-extension vanishes.
pub fn is_spherical_cy(x: &ObjectExpr) -> bool {
    let degrees = hom_cy_degrees(x, x);
    let one = BigUint::one();
    degrees.len() == 2 && degrees.get(&0) == Some(&one) && degrees.get(&2) == Some(&one)
}

/// `sum_i (-1)^i hom^i` from a degree map.
pub fn alternating_sum(degrees: &BTreeMap<i64, BigUint>) -> BigInt {
    degrees
        .iter()
        .map(|(i, h)| sign_of_shift(*i) * BigInt::from(h.clone()))
        .sum()
}
