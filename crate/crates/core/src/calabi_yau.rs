//! The 2-Calabi-Yau category of complexes on the cotangent bundle of P^1
//! supported on the zero section, modelled through pushforwards of D(P^1).
//!
//! Hearts `H_w` are generated by `O(w-1)[1]` and `O(w)`. An object of a
//! universe attached to `H_w` is written in the Kronecker coordinates of
//! that heart: `S1` stands for `O(w-1)[1]`, `S2` for `O(w)`, and in general
//! the sheaf is recovered by tensoring with `O(w)`.
//!
//! Only pushforwards are modelled, so fiber checks are statements about
//! the enumerated universe.

use std::collections::BTreeMap;

use num::{BigInt, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{euler_cy, is_faithful, Charge, KClassCY};
use crate::objects::{
    as_sheaf, cy_class, from_sheaf, is_spherical_cy, tensor_line_bundle, Indec, ObjectExpr,
    ProjPoint, SheafAtom,
};
use crate::stability::{is_semistable, is_stable, regime, stable_factors, Regime};
use crate::ztilde::{enumerate_universe, ztilde, UniverseBounds, ZtildeIndex};

/// Generators `(O(w-1)[1], O(w))` of the heart `H_w`, as D(P^1) objects.
pub fn heart_generators(w: i64) -> (ObjectExpr, ObjectExpr) {
    (
        ObjectExpr::line_bundle(w - 1).shift(1),
        ObjectExpr::line_bundle(w),
    )
}

/// The D(P^1) object written as `x` in the coordinates of `H_w`.
pub fn from_heart_coords(w: i64, x: &ObjectExpr) -> ObjectExpr {
    tensor_line_bundle(x, w)
}

pub fn to_heart_coords(w: i64, x: &ObjectExpr) -> ObjectExpr {
    tensor_line_bundle(x, -w)
}

/// CY class of an object given in `H_w` coordinates.
pub fn cy_class_in(w: i64, x: &ObjectExpr) -> KClassCY {
    cy_class(&from_heart_coords(w, x))
}

/// Coordinates `(x, y)` of a class in the basis `[O(w-1)[1]], [O(w)]`.
pub fn heart_coordinates(w: i64, c: &KClassCY) -> (BigInt, BigInt) {
    let x = &c.a - BigInt::from(w) * &c.b;
    let y = &c.b + &x;
    (x, y)
}

/// Reflection `f -> f - chi(s, f) s` induced by the spherical twist along
/// an object of class `s`.
pub fn twist_k(s: &KClassCY, f: &KClassCY) -> Result<KClassCY> {
    if euler_cy(s, s) != BigInt::from(2) {
        return Err(Error::NotSpherical(s.to_string()));
    }
    Ok(f - &s.scale(&euler_cy(s, f)))
}

fn map_summands(
    x: &ObjectExpr,
    f: impl Fn(i64, i64) -> Option<(i64, i64)>,
) -> Result<ObjectExpr> {
    let mut out = ObjectExpr::zero();
    for (s, m) in x.terms() {
        let image = match as_sheaf(s) {
            SheafAtom::Line { degree, shift } => f(degree, shift),
            SheafAtom::Torsion { .. } => None,
        };
        let Some((degree, shift)) = image else {
            return Err(Error::OutsideTwistDomain(
                ObjectExpr::summand(s.indec.clone(), s.shift, 1u32).to_string(),
            ));
        };
        out.add_summand(from_sheaf(&SheafAtom::Line { degree, shift }), m.clone());
    }
    Ok(out)
}

/// The twist `T_{O(w-1)}` on shifts of the generators of `H_w`:
/// `O(w-1)[1] -> O(w-1)` and `O(w) -> O(w-2)[1]`.
pub fn twist_obj(w: i64, x: &ObjectExpr) -> Result<ObjectExpr> {
    map_summands(x, |degree, shift| {
        if degree == w - 1 {
            Some((w - 1, shift - 1))
        } else if degree == w {
            Some((w - 2, shift + 1))
        } else {
            None
        }
    })
}

/// Inverse of [`twist_obj`] on its image, shifts of `O(w-1)` and `O(w-2)`.
pub fn twist_obj_inverse(w: i64, x: &ObjectExpr) -> Result<ObjectExpr> {
    map_summands(x, |degree, shift| {
        if degree == w - 1 {
            Some((w - 1, shift + 1))
        } else if degree == w - 2 {
            Some((w, shift - 1))
        } else {
            None
        }
    })
}

/// A charge carried to another heart by an autoequivalence.
#[derive(Clone, Debug, PartialEq)]
pub struct Transported {
    pub w: i64,
    pub charge: Charge,
    pub regime: Regime,
}

/// `Z o T^{-1}` for `T = T_{O(w-1)}`, expressed on the heart
/// `T(H_w) = H_{w-1}`.
pub fn pushforward_charge(w: i64, z: &Charge) -> Result<Transported> {
    let s = KClassCY::line_bundle(w - 1);
    let (g1, g2) = heart_generators(w - 1);
    let mut values = Vec::with_capacity(2);
    for g in [g1, g2] {
        // T is an involution on K, so T^{-1} acts by the same reflection
        let preimage = twist_k(&s, &cy_class(&g))?;
        let (x, y) = heart_coordinates(w, &preimage);
        values.push(&z.z1().scale(&x) + &z.z2().scale(&y));
    }
    let z2 = values.pop().unwrap();
    let z1 = values.pop().unwrap();
    let charge = Charge::new(z1, z2)?;
    let regime = regime(&charge);
    Ok(Transported {
        w: w - 1,
        charge,
        regime,
    })
}

/// Objects of a universe in the coordinates of the heart `H_w`.
#[derive(Clone, Debug)]
pub struct CYUniverse {
    pub w: i64,
    pub bounds: UniverseBounds,
    pub objects: Vec<ObjectExpr>,
}

impl CYUniverse {
    pub fn enumerate(w: i64, bounds: UniverseBounds) -> Result<Self> {
        let objects = enumerate_universe(&bounds)?;
        Ok(Self { w, bounds, objects })
    }
}

#[derive(Clone, Debug)]
pub struct PropReport {
    pub proposition: String,
    pub charge: Charge,
    pub heart: i64,
    pub universe_bounds: UniverseBounds,
    pub checked: usize,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl PropReport {
    fn new(proposition: &str, charge: &Charge, heart: i64, bounds: &UniverseBounds) -> Self {
        Self {
            proposition: proposition.into(),
            charge: charge.clone(),
            heart,
            universe_bounds: bounds.clone(),
            checked: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "proposition": self.proposition,
            "charge": serde_json::to_value(&self.charge).expect("plain data"),
            "heart": self.heart,
            "universe_bounds": self.universe_bounds.to_json(),
            "checked": self.checked,
            "violations": self.violations,
            "notes": self.notes,
        })
    }
}

/// For a faithful charge: every semistable `E` with `chi(E, E) > 0` is alone
/// in its fiber and is a power of one stable spherical object.
pub fn check_prop_point(z: &Charge, universe: &CYUniverse) -> Result<PropReport> {
    if !is_faithful(z) {
        return Err(Error::NotFaithful);
    }
    let mut report = PropReport::new("point-fiber", z, universe.w, &universe.bounds);
    let index = ZtildeIndex::new(z, &universe.objects);
    for (i, x) in universe.objects.iter().enumerate() {
        if x.is_zero() || index.image(i).len() != 1 {
            continue;
        }
        let c = cy_class_in(universe.w, x);
        if !euler_cy(&c, &c).is_positive() {
            continue;
        }
        report.checked += 1;
        let fiber = index.fiber(index.image(i));
        if fiber != [x] {
            let members: Vec<String> = fiber.iter().map(ToString::to_string).collect();
            report
                .violations
                .push(format!("fiber of {x} is {{{}}}", members.join(", ")));
        }
        let factors = stable_factors(z, x)?;
        let single = match factors.terms().collect::<Vec<_>>()[..] {
            [(s, _)] => Some(ObjectExpr::summand(s.indec.clone(), s.shift, 1u32)),
            _ => None,
        };
        match single {
            Some(s) => {
                let sheaf = from_heart_coords(universe.w, &s);
                if !is_stable(z, &s)? || !is_spherical_cy(&sheaf) {
                    report
                        .violations
                        .push(format!("stable factor {s} of {x} is not a stable spherical object"));
                }
            }
            None => report
                .violations
                .push(format!("{x} has several distinct stable factors: {factors}")),
        }
    }
    Ok(report)
}

/// Twist coherence on the generators of `H_w`: the two object identities
/// and their agreement with the K-theoretic reflection.
pub fn twist_identity_violations(w: i64) -> Vec<String> {
    let mut violations = Vec::new();
    let (s1, s2) = heart_generators(w);
    let (t1, t2) = heart_generators(w - 1);
    let s = KClassCY::line_bundle(w - 1);
    let expected = [(&s1, &t2), (&s2, &t1)];
    for (src, dst) in expected {
        match twist_obj(w, src) {
            Ok(img) if &img == dst => {}
            other => violations.push(format!("T({src}) = {other:?}, expected {dst}")),
        }
        match twist_k(&s, &cy_class(src)) {
            Ok(c) if c == cy_class(dst) => {}
            other => violations.push(format!("class of T({src}) = {other:?}")),
        }
    }
    violations
}

/// Reduces a faithful charge on `H_w` to one with `phi(S1) > phi(S2)`,
/// applying the twist along `O(w-1)` when the simples are in the other
/// order.
fn reduce_to_all_semistable(
    z: &Charge,
    w: i64,
    report: &mut PropReport,
) -> Result<(Charge, i64)> {
    match regime(z) {
        Regime::AllSemistable => Ok((z.clone(), w)),
        Regime::Degenerate => Err(Error::NotFaithful),
        Regime::Collapsed => {
            report.violations.extend(twist_identity_violations(w));
            let t = pushforward_charge(w, z)?;
            report.notes.push(format!(
                "twisted by T_O({}) onto heart {}; regime {}",
                w - 1,
                t.w,
                t.regime
            ));
            if t.regime != Regime::AllSemistable {
                report
                    .violations
                    .push(format!("transported charge is {}", t.regime));
            }
            Ok((t.charge, t.w))
        }
    }
}

/// Up to the twist, the fiber of every point object is exactly the family
/// of point objects (within the universe).
pub fn check_prop_p1(z: &Charge, w: i64, bounds: &UniverseBounds) -> Result<PropReport> {
    if !is_faithful(z) {
        return Err(Error::NotFaithful);
    }
    let mut report = PropReport::new("point-objects-fiber", z, w, bounds);
    let (zr, wr) = reduce_to_all_semistable(z, w, &mut report)?;
    report.heart = wr;

    // O(w) -> O_x -> O(w-1)[1] puts O_x in the heart with class [S1] + [S2]
    let (g1, g2) = heart_generators(wr);
    let generators_sum = &cy_class(&g1) + &cy_class(&g2);
    if generators_sum != KClassCY::point() {
        report
            .violations
            .push(format!("[S1] + [S2] = {generators_sum}, expected [O_x]"));
    }
    if regime(&zr) == Regime::Degenerate {
        report.violations.push("generator phases coincide".into());
    }

    let universe = enumerate_universe(bounds)?;
    let index = ZtildeIndex::new(&zr, &universe);
    let mut expected: Vec<ObjectExpr> =
        bounds.points.iter().cloned().map(ObjectExpr::point).collect();
    expected.sort();
    for x in &bounds.points {
        report.checked += 1;
        let ox = ObjectExpr::point(x.clone());
        if cy_class_in(wr, &ox) != KClassCY::point() {
            report.violations.push(format!("class of {ox} is not [O_x]"));
        }
        if !is_stable(&zr, &ox)? {
            report.violations.push(format!("{ox} is not stable"));
        }
        let mut fiber: Vec<ObjectExpr> = index.fiber(&ztilde(&zr, &ox)).into_iter().cloned().collect();
        fiber.sort();
        if fiber != expected {
            let members: Vec<String> = fiber.iter().map(ToString::to_string).collect();
            report
                .violations
                .push(format!("fiber of {ox} is {{{}}}", members.join(", ")));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct SequivReport {
    pub n: u32,
    pub heart: i64,
    /// Fiber member -> multiset of support points of its stable factors.
    pub classes: BTreeMap<ObjectExpr, BTreeMap<ProjPoint, u64>>,
    pub violations: Vec<String>,
}

impl SequivReport {
    /// Fiber members grouped by S-equivalence class.
    pub fn s_classes(&self) -> BTreeMap<&BTreeMap<ProjPoint, u64>, Vec<&ObjectExpr>> {
        let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for (x, cycle) in &self.classes {
            out.entry(cycle).or_default().push(x);
        }
        out
    }
}

/// Each member of the fiber at the point of `n[O_x]`, mapped to the points
/// of its Jordan-Holder factors.
pub fn sequiv_classes_at(
    z: &Charge,
    w: i64,
    n: u32,
    bounds: &UniverseBounds,
) -> Result<SequivReport> {
    if n == 0 {
        return Err(Error::InvalidBounds("n must be at least 1".into()));
    }
    if bounds.max_d1 < n || bounds.max_d2 < n || bounds.points.is_empty() {
        return Err(Error::InvalidBounds(format!(
            "universe must contain dimension ({n}, {n}) and at least one point"
        )));
    }
    let mut scratch = PropReport::new("sequiv", z, w, bounds);
    let (zr, wr) = reduce_to_all_semistable(z, w, &mut scratch)?;
    let universe = enumerate_universe(bounds)?;
    let target_obj = ObjectExpr::point(bounds.points[0].clone()).power(&n.into());
    let target = ztilde(&zr, &target_obj);
    let mut report = SequivReport {
        n,
        heart: wr,
        classes: BTreeMap::new(),
        violations: scratch.violations,
    };
    for x in universe.iter().filter(|x| ztilde(&zr, x) == target) {
        if !is_semistable(&zr, x)? {
            report.violations.push(format!("{x} is not semistable"));
            continue;
        }
        let mut cycle: BTreeMap<ProjPoint, u64> = BTreeMap::new();
        for (s, m) in stable_factors(&zr, x)?.terms() {
            match &s.indec {
                Indec::Regular(p, 1) if s.shift == 0 => {
                    *cycle.entry(p.clone()).or_default() += m.to_u64().unwrap_or(u64::MAX);
                }
                _ => report
                    .violations
                    .push(format!("{x} has a stable factor {} that is not a point", s.indec)),
            }
        }
        let total: u64 = cycle.values().sum();
        if total != n as u64 {
            report
                .violations
                .push(format!("{x} has {total} point factors, expected {n}"));
        }
        report.classes.insert(x.clone(), cycle);
    }
    Ok(report)
}

/// `chi_CY(E, F)` computed from the Hom dimensions of the model.
pub fn euler_cy_from_homs(x: &ObjectExpr, y: &ObjectExpr) -> BigInt {
    crate::objects::alternating_sum(&crate::objects::hom_cy_degrees(x, y))
}
