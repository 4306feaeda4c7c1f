//! The extended central charge `Z~` into `P^1 = C + {inf}` and the closed
//! sets it generates, queried over finite enumerated universes of objects.
//!
//! A semistable factor of mass `m` and phase `phi` sits at the complex
//! number `log m + i pi phi`; phases are not reduced modulo 2, so distinct
//! shifts give distinct points. The zero object maps to `inf`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use num::{BigUint, One};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, ln_rational, Q};
use crate::grammar::parse_point;
use crate::lattice::Charge;
use crate::objects::{Indec, ObjectExpr, ProjPoint, Summand};
use crate::stability::{hn, is_semistable, Phase};

/// Absolute tolerance on chordal distance for ball membership.
pub const BALL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FinitePoint {
    pub mass_sq: Q,
    pub phase: Phase,
    /// `log m`
    pub re: f64,
    /// `pi * phi`
    pub im: f64,
}

impl FinitePoint {
    pub fn new(mass_sq: Q, phase: Phase) -> Self {
        let re = 0.5 * ln_rational(&mass_sq);
        let im = PI * phase.to_f64();
        Self {
            mass_sq,
            phase,
            re,
            im,
        }
    }

    fn abs_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// A point of the Riemann sphere. Equality is exact and ignores the float
/// coordinates.
#[derive(Clone, Debug)]
pub enum SpherePoint {
    Finite(FinitePoint),
    Infinity,
}

impl SpherePoint {
    pub fn approx(&self) -> Option<(f64, f64)> {
        match self {
            SpherePoint::Finite(p) => Some((p.re, p.im)),
            SpherePoint::Infinity => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SpherePoint::Infinity => Value::from("infinity"),
            SpherePoint::Finite(p) => json!({
                "mass_sq": format_rational(&p.mass_sq),
                "phase": p.phase.to_json(),
                "approx": [p.re, p.im],
            }),
        }
    }
}

impl PartialEq for SpherePoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                a.phase == b.phase && a.mass_sq == b.mass_sq
            }
            _ => false,
        }
    }
}

impl Eq for SpherePoint {}

impl Hash for SpherePoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            SpherePoint::Infinity => 0u8.hash(state),
            SpherePoint::Finite(p) => {
                1u8.hash(state);
                p.phase.hash(state);
                p.mass_sq.hash(state);
            }
        }
    }
}

/// Chordal metric on the Riemann sphere; antipodal points are at distance 2.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    match (p, q) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(a), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(a)) => 2.0 / (1.0 + a.abs_sq()).sqrt(),
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            let d = (a.re - b.re).hypot(a.im - b.im);
            2.0 * d / ((1.0 + a.abs_sq()) * (1.0 + b.abs_sq())).sqrt()
        }
    }
}

/// Finite set of sphere points, kept sorted by decreasing phase (infinity
/// first) and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PointSet {
    points: Vec<SpherePoint>,
}

fn point_order(a: &SpherePoint, b: &SpherePoint) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => Equal,
        (SpherePoint::Infinity, _) => Less,
        (_, SpherePoint::Infinity) => Greater,
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => y
            .phase
            .cmp(&x.phase)
            .then_with(|| x.mass_sq.cmp(&y.mass_sq)),
    }
}

impl PointSet {
    pub fn new(mut points: Vec<SpherePoint>) -> Self {
        points.sort_by(point_order);
        points.dedup();
        Self { points }
    }

    pub fn infinity() -> Self {
        Self {
            points: vec![SpherePoint::Infinity],
        }
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.points.contains(p)
    }

    pub fn is_infinity(&self) -> bool {
        self.points == [SpherePoint::Infinity]
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.points.iter().chain(other.points.iter()).cloned().collect())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.points.iter().map(SpherePoint::to_json).collect())
    }
}

/// One point per Harder-Narasimhan factor; `{inf}` for the zero object.
pub fn ztilde(z: &Charge, x: &ObjectExpr) -> PointSet {
    if x.is_zero() {
        return PointSet::infinity();
    }
    let points = hn(z, x)
        .factors()
        .iter()
        .map(|f| SpherePoint::Finite(FinitePoint::new(f.mass_sq(z), f.phase.clone())))
        .collect();
    PointSet::new(points)
}

/// Point of a semistable object.
pub fn ztilde_point(z: &Charge, x: &ObjectExpr) -> Result<SpherePoint> {
    if !is_semistable(z, x)? {
        return Err(Error::NotSemistable(x.to_string()));
    }
    Ok(ztilde(z, x).points()[0].clone())
}

#[derive(Clone, Debug)]
pub enum RegionPart {
    Points(PointSet),
    Ball { center: SpherePoint, radius: f64 },
}

/// A finite union of exact point sets and closed chordal balls.
#[derive(Clone, Debug, Default)]
pub struct Region {
    pub parts: Vec<RegionPart>,
}

impl Region {
    pub fn points(set: PointSet) -> Self {
        Self {
            parts: vec![RegionPart::Points(set)],
        }
    }

    pub fn ball(center: SpherePoint, radius: f64) -> Self {
        Self {
            parts: vec![RegionPart::Ball { center, radius }],
        }
    }

    pub fn union(mut self, other: Region) -> Self {
        self.parts.extend(other.parts);
        self
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.parts.iter().any(|part| match part {
            RegionPart::Points(set) => set.contains(p),
            RegionPart::Ball { center, radius } => {
                chordal_distance(center, p) <= radius + BALL_TOLERANCE
            }
        })
    }

    pub fn contains_all(&self, set: &PointSet) -> bool {
        set.points().iter().all(|p| self.contains(p))
    }
}

/// Finite window on the object universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniverseBounds {
    pub max_d1: u32,
    pub max_d2: u32,
    pub min_shift: i64,
    pub max_shift: i64,
    pub points: Vec<ProjPoint>,
}

impl UniverseBounds {
    pub fn new(max_d1: u32, max_d2: u32, shifts: (i64, i64), points: Vec<ProjPoint>) -> Self {
        Self {
            max_d1,
            max_d2,
            min_shift: shifts.0,
            max_shift: shifts.1,
            points,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsRepr {
    max_d1: u32,
    max_d2: u32,
    shifts: [i64; 2],
    points: Vec<String>,
}

impl Serialize for UniverseBounds {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoundsRepr {
            max_d1: self.max_d1,
            max_d2: self.max_d2,
            shifts: [self.min_shift, self.max_shift],
            points: self.points.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniverseBounds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = BoundsRepr::deserialize(d)?;
        let points = r
            .points
            .iter()
            .map(|p| parse_point(p))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(UniverseBounds::new(
            r.max_d1,
            r.max_d2,
            (r.shifts[0], r.shifts[1]),
            points,
        ))
    }
}

fn universe_atoms(b: &UniverseBounds) -> Vec<Summand> {
    let (m1, m2) = (b.max_d1 as u64, b.max_d2 as u64);
    let mut indecs = Vec::new();
    for n in 0..=m1.max(m2) as u32 {
        for indec in [Indec::Preproj(n), Indec::Preinj(n)] {
            let (a, c) = indec.dim();
            if a <= m1 && c <= m2 {
                indecs.push(indec);
            }
        }
    }
    for x in &b.points {
        for n in 1..=m1.min(m2) as u32 {
            indecs.push(Indec::Regular(x.clone(), n));
        }
    }
    let mut atoms: Vec<Summand> = indecs
        .into_iter()
        .flat_map(|i| (b.min_shift..=b.max_shift).map(move |k| Summand::new(i.clone(), k)))
        .collect();
    atoms.sort();
    atoms.dedup();
    atoms
}

/// Every object whose total unsigned dimension vector fits the bounds, with
/// shifts in the interval and regular summands supported at the listed
/// points. Sorted by canonical form, so the zero object comes first.
pub fn enumerate_universe(b: &UniverseBounds) -> Result<Vec<ObjectExpr>> {
    if b.min_shift > b.max_shift {
        return Err(Error::InvalidBounds(format!(
            "empty shift interval [{}, {}]",
            b.min_shift, b.max_shift
        )));
    }
    if b.points.is_empty() && b.max_d1 >= 1 && b.max_d2 >= 1 {
        return Err(Error::InvalidBounds(
            "regular dimensions requested without any points".into(),
        ));
    }
    let atoms = universe_atoms(b);
    let mut out = Vec::new();
    let mut current = ObjectExpr::zero();
    extend_universe(&atoms, 0, b.max_d1 as u64, b.max_d2 as u64, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn extend_universe(
    atoms: &[Summand],
    i: usize,
    rem1: u64,
    rem2: u64,
    current: &mut ObjectExpr,
    out: &mut Vec<ObjectExpr>,
) {
    if i == atoms.len() {
        out.push(current.clone());
        return;
    }
    let (a, b) = atoms[i].indec.dim();
    let cap = |rem: u64, d: u64| rem.checked_div(d).unwrap_or(u64::MAX);
    let max_mult = cap(rem1, a).min(cap(rem2, b));
    extend_universe(atoms, i + 1, rem1, rem2, current, out);
    for m in 1..=max_mult {
        let mut next = current.clone();
        next.add_summand(atoms[i].clone(), BigUint::from(m));
        extend_universe(atoms, i + 1, rem1 - m * a, rem2 - m * b, &mut next, out);
    }
}

/// Members of the universe with the given image.
pub fn fiber(z: &Charge, target: &PointSet, universe: &[ObjectExpr]) -> Vec<ObjectExpr> {
    universe
        .iter()
        .filter(|x| &ztilde(z, x) == target)
        .cloned()
        .collect()
}

/// Precomputed images of a universe, for repeated fiber queries.
pub struct ZtildeIndex<'a> {
    universe: &'a [ObjectExpr],
    images: Vec<PointSet>,
    fibers: HashMap<PointSet, Vec<usize>>,
}

impl<'a> ZtildeIndex<'a> {
    pub fn new(z: &Charge, universe: &'a [ObjectExpr]) -> Self {
        let images: Vec<PointSet> = universe.iter().map(|x| ztilde(z, x)).collect();
        let mut fibers: HashMap<PointSet, Vec<usize>> = HashMap::new();
        for (i, img) in images.iter().enumerate() {
            fibers.entry(img.clone()).or_default().push(i);
        }
        Self {
            universe,
            images,
            fibers,
        }
    }

    pub fn image(&self, i: usize) -> &PointSet {
        &self.images[i]
    }

    pub fn fiber(&self, target: &PointSet) -> Vec<&'a ObjectExpr> {
        self.fibers
            .get(target)
            .map(|ids| ids.iter().map(|&i| &self.universe[i]).collect())
            .unwrap_or_default()
    }

    pub fn universe(&self) -> &'a [ObjectExpr] {
        self.universe
    }
}

/// A semistable `S2^n` whose point lies within `eps` of infinity, found by
/// repeatedly doubling `n`.
pub fn witness_near_infinity(z: &Charge, eps: f64) -> ObjectExpr {
    assert!(eps > 0.0, "eps must be positive");
    let mut n = BigUint::one();
    loop {
        let candidate = ObjectExpr::summand(Indec::S2, 0, n.clone());
        let point = ztilde(z, &candidate).points()[0].clone();
        if chordal_distance(&point, &SpherePoint::Infinity) < eps {
            return candidate;
        }
        n <<= 1u32;
    }
}

/// A nonzero semistable member of the universe whose point lies in the
/// region, if any.
pub fn semistable_in_region(
    z: &Charge,
    region: &Region,
    universe: &[ObjectExpr],
) -> Option<ObjectExpr> {
    universe
        .iter()
        .filter(|x| !x.is_zero())
        .find(|x| {
            let img = ztilde(z, x);
            img.len() == 1 && region.contains(&img.points()[0])
        })
        .cloned()
}

/// Members whose whole image lies in the region.
pub fn region_preimage(z: &Charge, region: &Region, universe: &[ObjectExpr]) -> Vec<ObjectExpr> {
    universe
        .iter()
        .filter(|x| region.contains_all(&ztilde(z, x)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionScan {
    pub witness: Option<ObjectExpr>,
    pub preimage: Vec<ObjectExpr>,
    /// When no semistable object lands in the region, the preimage holds at
    /// most the zero object.
    pub consistent: bool,
}

pub fn scan_region(z: &Charge, region: &Region, universe: &[ObjectExpr]) -> RegionScan {
    let witness = semistable_in_region(z, region, universe);
    let preimage = region_preimage(z, region, universe);
    let consistent = witness.is_some() || preimage.iter().all(ObjectExpr::is_zero);
    RegionScan {
        witness,
        preimage,
        consistent,
    }
}

/// `Z~(E + F) = Z~(E) u Z~(F)` for semistable `E`, `F` of distinct phases.
pub fn union_law_check(z: &Charge, e: &ObjectExpr, f: &ObjectExpr) -> Result<bool> {
    let pe = crate::stability::phase(z, e)?;
    let pf = crate::stability::phase(z, f)?;
    if pe == pf {
        return Err(Error::PhaseCollision(format!("{e} and {f} at {pe}")));
    }
    Ok(ztilde(z, &e.direct_sum(f)) == ztilde(z, e).union(&ztilde(z, f)))
}
