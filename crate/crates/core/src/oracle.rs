//! Brute-force ground truth over small prime fields.
//!
//! Objects are realised as explicit pairs of matrices over F_p. HN
//! filtrations are found by enumerating every subrepresentation, and Hom
//! dimensions by solving the intertwiner equations.

use std::collections::BTreeSet;

use num::{BigInt, Integer, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::Q;
use crate::lattice::{euler_a, Charge, KClassA};
use crate::objects::{HomTable, Indec, ObjectExpr, ProjPoint};
use crate::stability::{hn_profile, Phase};

/// Largest admissible `p^(d1*d2)` for subrepresentation enumeration.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

type Mat = Vec<Vec<u64>>;

fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0; cols]; rows]
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Rank of a matrix over F_p.
pub fn rank_mod(mut m: Mat, p: u64) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inv_mod(m[rank][c], p);
        for v in m[rank].iter_mut() {
            *v = *v * inv % p;
        }
        let prow = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A subspace of F_p^n in reduced row echelon form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    fn reduce(&self, v: &[u64], p: u64) -> Vec<u64> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                for j in 0..self.n {
                    v[j] = (v[j] + (p - f) * row[j]) % p;
                }
            }
        }
        v
    }

    pub fn contains_vec(&self, v: &[u64], p: u64) -> bool {
        self.reduce(v, p).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace, p: u64) -> bool {
        other.rows.iter().all(|v| self.contains_vec(v, p))
    }
}

fn pivot_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = pivot_sets(n - 1, k);
    for mut s in pivot_sets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Every subspace of F_p^n, each listed once by its RREF basis.
pub fn all_subspaces(n: usize, p: u64) -> Vec<Subspace> {
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in pivot_sets(n, k) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &c)| {
                    let pivots = &pivots;
                    (c + 1..n)
                        .filter(move |j| !pivots.contains(j))
                        .map(move |j| (r, j))
                })
                .collect();
            let count = (p as usize).pow(free.len() as u32);
            for code in 0..count {
                let mut rows = zeros(k, n);
                for (r, &c) in pivots.iter().enumerate() {
                    rows[r][c] = 1;
                }
                let mut rest = code;
                for &(r, j) in &free {
                    rows[r][j] = (rest % p as usize) as u64;
                    rest /= p as usize;
                }
                out.push(Subspace {
                    n,
                    rows,
                    pivots: pivots.clone(),
                });
            }
        }
    }
    out
}

/// A representation `A, B : F_p^d1 -> F_p^d2` of the Kronecker quiver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixRep {
    pub p: u32,
    pub d1: usize,
    pub d2: usize,
    /// `d2` rows of length `d1`.
    pub a: Mat,
    pub b: Mat,
}

impl MatrixRep {
    pub fn zero(p: u32) -> Self {
        Self {
            p,
            d1: 0,
            d2: 0,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn class(&self) -> KClassA {
        KClassA::new(self.d1 as u64, self.d2 as u64)
    }

    pub fn direct_sum(&self, other: &MatrixRep) -> MatrixRep {
        let (d1, d2) = (self.d1 + other.d1, self.d2 + other.d2);
        let block = |x: &Mat, y: &Mat| {
            let mut m = zeros(d2, d1);
            for (r, row) in x.iter().enumerate() {
                m[r][..self.d1].copy_from_slice(row);
            }
            for (r, row) in y.iter().enumerate() {
                m[self.d2 + r][self.d1..].copy_from_slice(row);
            }
            m
        };
        MatrixRep {
            p: self.p,
            d1,
            d2,
            a: block(&self.a, &other.a),
            b: block(&self.b, &other.b),
        }
    }

    fn apply(m: &Mat, v: &[u64], p: u64) -> Vec<u64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y % p).sum::<u64>() % p)
            .collect()
    }
}

fn rational_mod(t: &Q, p: u32) -> Option<u64> {
    let p_big = BigInt::from(p);
    let num = t.numer().mod_floor(&p_big).to_u64()?;
    let den = t.denom().mod_floor(&p_big).to_u64()?;
    (den != 0).then(|| num * inv_mod(den, p as u64) % p as u64)
}

/// Coordinate of a point in P^1(F_p): `Some(t)` for `[1:t]`, `None` for `[0:1]`.
pub fn point_mod(x: &ProjPoint, p: u32) -> Result<Option<u64>> {
    match x {
        ProjPoint::Infinity => Ok(None),
        ProjPoint::Affine(t) => rational_mod(t, p)
            .map(Some)
            .ok_or_else(|| Error::PointNotRepresentable(x.to_string(), p)),
    }
}

fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn jordan(n: usize, t: u64) -> Mat {
    let mut m = zeros(n, n);
    for i in 0..n {
        m[i][i] = t;
        if i + 1 < n {
            m[i][i + 1] = 1;
        }
    }
    m
}

/// Canonical matrices of an indecomposable.
pub fn indec_rep(m: &Indec, p: u32) -> Result<MatrixRep> {
    if !is_prime(p) {
        return Err(Error::InvalidBounds(format!("{p} is not prime")));
    }
    let (d1, d2) = m.dim();
    let (d1, d2) = (d1 as usize, d2 as usize);
    let (a, b) = match m {
        Indec::Preproj(n) => {
            let n = *n as usize;
            let (mut a, mut b) = (zeros(n + 1, n), zeros(n + 1, n));
            for i in 0..n {
                a[i][i] = 1;
                b[i + 1][i] = 1;
            }
            (a, b)
        }
        Indec::Preinj(n) => {
            let n = *n as usize;
            let (mut a, mut b) = (zeros(n, n + 1), zeros(n, n + 1));
            for i in 0..n {
                a[i][i] = 1;
                b[i][i + 1] = 1;
            }
            (a, b)
        }
        Indec::Regular(x, n) => {
            let n = *n as usize;
            match point_mod(x, p)? {
                Some(t) => (identity(n), jordan(n, t)),
                None => (jordan(n, 0), identity(n)),
            }
        }
    };
    Ok(MatrixRep { p, d1, d2, a, b })
}

/// Block-diagonal representation of an unshifted object.
pub fn matrix_rep(x: &ObjectExpr, p: u32) -> Result<MatrixRep> {
    let mut rep = MatrixRep::zero(p);
    for (s, m) in x.terms() {
        if s.shift != 0 {
            return Err(Error::ShiftedObject(x.to_string()));
        }
        let block = indec_rep(&s.indec, p)?;
        let copies = m
            .to_usize()
            .ok_or_else(|| Error::GuardExceeded(format!("multiplicity {m}")))?;
        for _ in 0..copies {
            rep = rep.direct_sum(&block);
        }
    }
    Ok(rep)
}

/// A pair `U1 ⊆ F^d1`, `U2 ⊆ F^d2` with `A(U1), B(U1) ⊆ U2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subrep {
    pub u1: Subspace,
    pub u2: Subspace,
}

impl Subrep {
    pub fn dims(&self) -> (u64, u64) {
        (self.u1.dim() as u64, self.u2.dim() as u64)
    }

    pub fn class(&self) -> KClassA {
        let (a, b) = self.dims();
        KClassA::new(a, b)
    }

    fn contains(&self, other: &Subrep, p: u64) -> bool {
        self.u1.contains(&other.u1, p) && self.u2.contains(&other.u2, p)
    }
}

fn check_guard(r: &MatrixRep) -> Result<()> {
    let exponent = (r.d1 * r.d2) as u32;
    match (r.p as u64).checked_pow(exponent) {
        Some(n) if n <= ENUMERATION_GUARD => Ok(()),
        _ => Err(Error::GuardExceeded(format!(
            "{}^({}*{}) exceeds {ENUMERATION_GUARD}",
            r.p, r.d1, r.d2
        ))),
    }
}

/// Every subrepresentation of `r`.
pub fn subreps(r: &MatrixRep) -> Result<Vec<Subrep>> {
    check_guard(r)?;
    let p = r.p as u64;
    let spaces2 = all_subspaces(r.d2, p);
    let mut out = Vec::new();
    for u1 in all_subspaces(r.d1, p) {
        let images: Vec<Vec<u64>> = u1
            .basis()
            .iter()
            .flat_map(|v| [MatrixRep::apply(&r.a, v, p), MatrixRep::apply(&r.b, v, p)])
            .collect();
        for u2 in &spaces2 {
            if images.iter().all(|v| u2.contains_vec(v, p)) {
                out.push(Subrep {
                    u1: u1.clone(),
                    u2: u2.clone(),
                });
            }
        }
    }
    Ok(out)
}

pub fn subrep_classes(r: &MatrixRep) -> Result<BTreeSet<KClassA>> {
    Ok(subreps(r)?.iter().map(Subrep::class).collect())
}

/// HN factors of a representation whose subrepresentations are already
/// enumerated. Each step takes the subrepresentation `F ⊋ E` maximising the
/// phase of `F/E`, then the dimension of `F`.
pub fn oracle_hn_from_subreps(z: &Charge, r: &MatrixRep, subs: &[Subrep]) -> Result<Vec<(KClassA, Phase)>> {
    let p = r.p as u64;
    let full = (r.d1 as u64, r.d2 as u64);
    let mut current = subs
        .iter()
        .find(|s| s.dims() == (0, 0))
        .expect("zero subrepresentation");
    let mut out = Vec::new();
    while current.dims() != full {
        let base = current.class();
        let mut best: Option<(Phase, u64, &Subrep)> = None;
        let mut tied = false;
        for f in subs {
            if f.dims() == current.dims() || !f.contains(current, p) {
                continue;
            }
            let phase = Phase::new(z, 0, &(&f.class() - &base));
            let size = f.dims().0 + f.dims().1;
            match &best {
                Some((bp, bs, _)) if (&phase, size) < (bp, *bs) => {}
                Some((bp, bs, _)) if (&phase, size) == (bp, *bs) => tied = true,
                _ => {
                    best = Some((phase, size, f));
                    tied = false;
                }
            }
        }
        let (phase, _, next) = best.expect("the whole representation is a candidate");
        if tied {
            return Err(Error::DestabilizerTie(format!(
                "maximal destabilizer of class {} over {}",
                next.class(),
                base
            )));
        }
        out.push((&next.class() - &base, phase));
        current = next;
    }
    Ok(out)
}

pub fn oracle_hn(z: &Charge, r: &MatrixRep) -> Result<Vec<(KClassA, Phase)>> {
    let subs = subreps(r)?;
    oracle_hn_from_subreps(z, r, &subs)
}

/// Enumerated subrepresentations of every shift piece of an object.
#[derive(Clone, Debug)]
pub struct OracleObject {
    pieces: Vec<(i64, MatrixRep, Vec<Subrep>)>,
}

impl OracleObject {
    pub fn new(x: &ObjectExpr, p: u32) -> Result<Self> {
        let mut pieces = Vec::new();
        for (k, piece) in x.by_shift().into_iter().rev() {
            let rep = matrix_rep(&piece.shift(-k), p)?;
            let subs = subreps(&rep)?;
            pieces.push((k, rep, subs));
        }
        Ok(Self { pieces })
    }

    /// HN factors of the whole object; shift pieces never share phases.
    pub fn hn(&self, z: &Charge) -> Result<Vec<(KClassA, Phase)>> {
        let mut out = Vec::new();
        for (k, rep, subs) in &self.pieces {
            for (c, ph) in oracle_hn_from_subreps(z, rep, subs)? {
                out.push((c, ph.shifted(*k)));
            }
        }
        Ok(out)
    }

    /// No proper nonzero subobject of phase at least that of the object.
    pub fn is_stable(&self, z: &Charge) -> Result<bool> {
        let [(_, rep, subs)] = &self.pieces[..] else {
            return Ok(false);
        };
        let total = rep.class();
        let own = Phase::new(z, 0, &total);
        Ok(subs.iter().all(|s| {
            let c = s.class();
            c.is_zero() || c == total || Phase::new(z, 0, &c) < own
        }))
    }

    pub fn is_semistable(&self, z: &Charge) -> Result<bool> {
        Ok(self.hn(z)?.len() == 1)
    }
}

pub fn oracle_hn_object(z: &Charge, x: &ObjectExpr, p: u32) -> Result<Vec<(KClassA, Phase)>> {
    OracleObject::new(x, p)?.hn(z)
}

/// `dim Hom(M, N)` from the intertwiner system
/// `f2 A_M = A_N f1`, `f2 B_M = B_N f1`.
pub fn oracle_hom_dim_reps(m: &MatrixRep, n: &MatrixRep) -> u64 {
    let p = m.p as u64;
    // unknowns: f1 (n.d1 x m.d1) then f2 (n.d2 x m.d2), row-major
    let f1 = |i: usize, j: usize| i * m.d1 + j;
    let f2 = |i: usize, j: usize| n.d1 * m.d1 + i * m.d2 + j;
    let unknowns = n.d1 * m.d1 + n.d2 * m.d2;
    let mut rows = Vec::new();
    for (am, an) in [(&m.a, &n.a), (&m.b, &n.b)] {
        // entry (i, j) of f2 * am - an * f1, with i < n.d2 and j < m.d1
        for i in 0..n.d2 {
            for j in 0..m.d1 {
                let mut row = vec![0u64; unknowns];
                for k in 0..m.d2 {
                    row[f2(i, k)] = (row[f2(i, k)] + am[k][j]) % p;
                }
                for k in 0..n.d1 {
                    row[f1(k, j)] = (row[f1(k, j)] + (p - an[i][k]) % p) % p;
                }
                rows.push(row);
            }
        }
    }
    (unknowns - rank_mod(rows, p)) as u64
}

pub fn oracle_hom_dim(m: &Indec, n: &Indec, p: u32) -> Result<u64> {
    Ok(oracle_hom_dim_reps(&indec_rep(m, p)?, &indec_rep(n, p)?))
}

/// Indecomposables with both dimension components at most `max_component`
/// whose points are the canonical points of P^1(F_p).
pub fn indecomposables_up_to(max_component: u32, p: u32) -> Vec<Indec> {
    let mut out = Vec::new();
    for n in 0..max_component {
        out.push(Indec::Preproj(n));
        out.push(Indec::Preinj(n));
    }
    for x in ProjPoint::over_prime(p) {
        for n in 1..=max_component {
            out.push(Indec::Regular(x.clone(), n));
        }
    }
    out
}

/// Compares a Hom table against the oracle (degree 0) and against the
/// Euler form (degree 1) on all small indecomposable pairs.
pub fn hom_table_violations(table: &dyn HomTable, primes: &[u32], max_component: u32) -> Result<Vec<String>> {
    let mut violations = Vec::new();
    for &p in primes {
        let indecs = indecomposables_up_to(max_component, p);
        let reps: Vec<MatrixRep> = indecs.iter().map(|m| indec_rep(m, p)).collect::<Result<_>>()?;
        for (m, rm) in indecs.iter().zip(&reps) {
            for (n, rn) in indecs.iter().zip(&reps) {
                let h0 = table.hom(m, n, 0);
                let h1 = table.hom(m, n, 1);
                let oracle = oracle_hom_dim_reps(rm, rn);
                if h0 != oracle {
                    violations.push(format!("hom0({m}, {n}) = {h0}, oracle over F_{p} gives {oracle}"));
                }
                let chi = euler_a(&m.class(), &n.class());
                if BigInt::from(h0) - BigInt::from(h1) != chi {
                    violations.push(format!("hom0 - hom1 for ({m}, {n}) is not {chi}"));
                }
            }
        }
    }
    Ok(violations)
}

/// Objects on which the engine's HN profile differs from the oracle's.
pub fn hn_violations(z: &Charge, objects: &[(ObjectExpr, OracleObject)]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (x, oracle) in objects {
        let engine = hn_profile(z, x);
        let brute = oracle.hn(z)?;
        if !same_profile(&engine, &brute) {
            out.push(format!("HN of {x} under {z}: engine {}, oracle {}", show(&engine), show(&brute)));
        }
    }
    Ok(out)
}

/// Equal factor classes, equal exact phases, in the same order.
pub fn same_profile(a: &[(KClassA, Phase)], b: &[(KClassA, Phase)]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|((ca, pa), (cb, pb))| ca == cb && pa == pb && pa.shift() == pb.shift())
}

fn show(profile: &[(KClassA, Phase)]) -> String {
    let parts: Vec<String> = profile.iter().map(|(c, p)| format!("{c}@{p}")).collect();
    format!("[{}]", parts.join(", "))
}

/// The canonical F_p points as exact rationals reduce to themselves.
pub fn canonical_points_roundtrip(p: u32) -> bool {
    ProjPoint::over_prime(p).iter().enumerate().all(|(i, x)| match point_mod(x, p) {
        Ok(Some(t)) => t == i as u64,
        Ok(None) => i == p as usize,
        Err(_) => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_object;
    use crate::objects::KroneckerHom;

    fn ch(z1: (i64, i64), z2: (i64, i64)) -> Charge {
        Charge::from_ints(z1, z2).unwrap()
    }

    fn obj(s: &str) -> ObjectExpr {
        parse_object(s).unwrap()
    }

    fn classes(v: &[(u64, u64)]) -> BTreeSet<KClassA> {
        v.iter().map(|&(a, b)| KClassA::new(a, b)).collect()
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        assert_eq!(all_subspaces(3, 2).len(), 16);
        assert_eq!(all_subspaces(2, 3).len(), 6);
        assert_eq!(all_subspaces(0, 5).len(), 1);
        assert_eq!(all_subspaces(4, 2).len(), 67);
    }

    #[test]
    fn matrix_rep_examples() {
        let r = matrix_rep(&obj("P(1)"), 2).unwrap();
        assert_eq!((r.a.clone(), r.b.clone()), (vec![vec![1], vec![0]], vec![vec![0], vec![1]]));
        let r = matrix_rep(&obj("R([1:0],1)"), 2).unwrap();
        assert_eq!((r.a.clone(), r.b.clone()), (vec![vec![1]], vec![vec![0]]));
        let r = matrix_rep(&obj("S1"), 2).unwrap();
        assert_eq!((r.d1, r.d2), (1, 0));
        assert!(matches!(matrix_rep(&obj("P(1)[1]"), 2), Err(Error::ShiftedObject(_))));
        assert!(matches!(
            matrix_rep(&obj("R([2:1],1)"), 2),
            Err(Error::PointNotRepresentable(_, 2))
        ));
        assert!(canonical_points_roundtrip(5));
    }

    #[test]
    fn subrep_class_examples() {
        let sc = |s: &str| subrep_classes(&matrix_rep(&obj(s), 2).unwrap()).unwrap();
        assert_eq!(sc("R([1:0],1)"), classes(&[(0, 0), (0, 1), (1, 1)]));
        assert_eq!(sc("P(1)"), classes(&[(0, 0), (0, 1), (0, 2), (1, 2)]));
        assert_eq!(sc("S2"), classes(&[(0, 0), (0, 1)]));
        let big = matrix_rep(&obj("P(1)^4"), 2).unwrap();
        assert!(matches!(subreps(&big), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn oracle_hn_examples() {
        let z = ch((0, 1), (-1, 0));
        let r = matrix_rep(&obj("P(1)"), 2).unwrap();
        let hn = oracle_hn(&z, &r).unwrap();
        assert_eq!(hn.len(), 2);
        assert_eq!(hn[0].0, KClassA::new(0, 2));
        assert_eq!(hn[1].0, KClassA::new(1, 0));
        assert!((hn[0].1.to_f64() - 1.0).abs() < 1e-12);
        assert!((hn[1].1.to_f64() - 0.5).abs() < 1e-12);

        let z = ch((-1, 0), (0, 1));
        let hn = oracle_hn(&z, &matrix_rep(&obj("R([1:1],1)"), 2).unwrap()).unwrap();
        assert_eq!(hn.len(), 1);
        assert!((hn[0].1.to_f64() - 0.75).abs() < 1e-12);
        assert!(oracle_hn(&z, &MatrixRep::zero(2)).unwrap().is_empty());
    }

    #[test]
    fn oracle_stability_examples() {
        let z = ch((-1, 0), (0, 1));
        let r2 = OracleObject::new(&obj("R([1:0],2)"), 2).unwrap();
        assert!(r2.is_semistable(&z).unwrap());
        assert!(!r2.is_stable(&z).unwrap());
        assert!(OracleObject::new(&obj("P(1)"), 2).unwrap().is_stable(&z).unwrap());
    }

    #[test]
    fn oracle_hom_examples() {
        let (x, y) = (ProjPoint::affine(0), ProjPoint::affine(1));
        assert_eq!(oracle_hom_dim(&Indec::Preproj(0), &Indec::Preproj(1), 2).unwrap(), 2);
        assert_eq!(oracle_hom_dim(&Indec::Regular(x.clone(), 1), &Indec::Regular(y, 1), 3).unwrap(), 0);
        assert_eq!(oracle_hom_dim(&Indec::Regular(x.clone(), 2), &Indec::Regular(x, 1), 3).unwrap(), 1);
        assert_eq!(oracle_hom_dim(&Indec::S1, &Indec::S1, 2).unwrap(), 1);
    }

    #[test]
    fn table_agrees_with_oracle_on_small_range() {
        let v = hom_table_violations(&KroneckerHom, &[2, 3], 3).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_mod(vec![vec![1, 1], vec![1, 1]], 2), 1);
        assert_eq!(rank_mod(vec![vec![1, 2], vec![2, 1]], 3), 1);
        assert_eq!(rank_mod(vec![vec![1, 2], vec![2, 1]], 5), 2);
    }
}
