//! Phases, masses and Harder-Narasimhan filtrations on the Kronecker heart.
//!
//! A charge on the heart falls into one of three regimes according to the
//! phases of the simples. When `phi(S1) > phi(S2)` every indecomposable is
//! semistable and the filtration only sorts summands by phase. When
//! `phi(S1) < phi(S2)` only semisimple objects are semistable and a module
//! `M` of dimension `(a, b)` splits as `0 < S2^b < M`. When the phases agree
//! the whole heart is one slice.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::{BigUint, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{Gauss, Q};
use crate::grammar::int_json;
use crate::lattice::{charge_eval, is_faithful, random_grid_charge, Charge, KClassA};
use crate::objects::{class_of, Indec, ObjectExpr, Summand};

/// Exact phase `shift + arg(Z(direction)) / pi`, with the argument in
/// `(0, pi]`.
///
/// Comparison goes through the cotangent of the argument, which is a
/// rational and strictly decreasing on `(0, pi)`; `None` stands for the
/// argument `pi`.
#[derive(Clone, Debug)]
pub struct Phase {
    shift: i64,
    direction: KClassA,
    value: Gauss,
    cot: Option<Q>,
}

impl Phase {
    /// Phase of a heart class `class` shifted by `shift`.
    pub fn new(z: &Charge, shift: i64, class: &KClassA) -> Self {
        assert!(class.is_effective(), "phase of a non-effective class {class}");
        let direction = class.primitive();
        let value = charge_eval(z, &direction);
        Self::from_value(shift, direction, value)
    }

    /// Phase of a value already known to lie in the stability cone.
    pub fn from_value(shift: i64, direction: KClassA, value: Gauss) -> Self {
        debug_assert!(value.in_stability_cone());
        let cot = (!value.im.is_zero()).then(|| &value.re / &value.im);
        Self {
            shift,
            direction,
            value,
            cot,
        }
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn direction(&self) -> &KClassA {
        &self.direction
    }

    /// `Z(direction)`
    pub fn value(&self) -> &Gauss {
        &self.value
    }

    pub fn shifted(&self, k: i64) -> Phase {
        Phase {
            shift: self.shift + k,
            ..self.clone()
        }
    }

    /// Fractional part in `(0, 1]`.
    pub fn fractional_f64(&self) -> f64 {
        match &self.cot {
            None => 1.0,
            Some(_) => self.value.arg_f64() / std::f64::consts::PI,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.shift as f64 + self.fractional_f64()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shift": self.shift,
            "direction": [int_json(&self.direction.d1), int_json(&self.direction.d2)],
        })
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Self) -> bool {
        self.shift == other.shift && self.cot == other.cot
    }
}

impl Eq for Phase {}

impl Hash for Phase {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.shift.hash(state);
        self.cot.hash(state);
    }
}

impl Ord for Phase {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shift.cmp(&other.shift).then_with(|| match (&self.cot, &other.cot) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => b.cmp(a),
        })
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Regime {
    /// `phi(S1) > phi(S2)`
    AllSemistable,
    /// `phi(S1) < phi(S2)`
    Collapsed,
    /// `phi(S1) = phi(S2)`
    Degenerate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::AllSemistable => "AllSemistable",
            Regime::Collapsed => "Collapsed",
            Regime::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

pub fn regime(z: &Charge) -> Regime {
    match z.z1().cmp_arg(z.z2()) {
        Ordering::Greater => Regime::AllSemistable,
        Ordering::Less => Regime::Collapsed,
        Ordering::Equal => Regime::Degenerate,
    }
}

/// Seeded grid charge in the requested regime. Degenerate charges take
/// `z2` as a positive rational multiple of `z1`.
pub fn random_charge_in(rng: &mut impl Rng, reg: Regime, grid_bound: i64) -> Charge {
    loop {
        let z = random_grid_charge(rng, grid_bound);
        let z = if reg == Regime::Degenerate {
            let k = Q::new(rng.gen_range(1..=grid_bound).into(), rng.gen_range(1..=grid_bound).into());
            Charge::new(z.z1().clone(), z.z1().scale_q(&k)).expect("same ray as z1")
        } else {
            z
        };
        if regime(&z) == reg {
            return z;
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HnFactor {
    pub factor: ObjectExpr,
    pub phase: Phase,
}

impl HnFactor {
    pub fn mass_sq(&self, z: &Charge) -> Q {
        charge_eval(z, &self.factor.heart_class()).norm_sq()
    }
}

/// Semistable factors in strictly decreasing phase order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HnFiltration {
    factors: Vec<HnFactor>,
}

impl HnFiltration {
    pub fn factors(&self) -> &[HnFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn phases(&self) -> impl Iterator<Item = &Phase> {
        self.factors.iter().map(|f| &f.phase)
    }

    pub fn to_json(&self, z: &Charge) -> Value {
        Value::Array(
            self.factors
                .iter()
                .map(|f| {
                    let c = class_of(&f.factor);
                    json!({
                        "factor": f.factor.to_string(),
                        "class": [int_json(&c.d1), int_json(&c.d2)],
                        "phase": f.phase.to_json(),
                        "phase_approx": f.phase.to_f64(),
                        "mass_sq": crate::exact::format_rational(&f.mass_sq(z)),
                    })
                })
                .collect(),
        )
    }
}

fn big(m: &BigUint, k: u64) -> BigUint {
    m * k
}

/// Harder-Narasimhan filtration of any object, the zero object included.
pub fn hn(z: &Charge, x: &ObjectExpr) -> HnFiltration {
    let reg = regime(z);
    let mut pieces: Vec<(Phase, ObjectExpr)> = Vec::with_capacity(x.num_terms() * 2);
    for (s, m) in x.terms() {
        let split = reg == Regime::Collapsed && !s.indec.is_simple();
        if split {
            let (a, b) = s.indec.dim();
            pieces.push((
                Phase::new(z, s.shift, &Indec::S2.class()),
                ObjectExpr::summand(Indec::S2, s.shift, big(m, b)),
            ));
            pieces.push((
                Phase::new(z, s.shift, &Indec::S1.class()),
                ObjectExpr::summand(Indec::S1, s.shift, big(m, a)),
            ));
        } else {
            pieces.push((
                Phase::new(z, s.shift, &s.indec.class()),
                ObjectExpr::summand(s.indec.clone(), s.shift, m.clone()),
            ));
        }
    }
    pieces.sort_by(|a, b| b.0.cmp(&a.0));
    let mut factors: Vec<HnFactor> = Vec::new();
    for (phase, obj) in pieces {
        match factors.last_mut() {
            Some(last) if last.phase == phase => {
                last.factor = last.factor.direct_sum(&obj);
            }
            _ => factors.push(HnFactor { factor: obj, phase }),
        }
    }
    for f in &mut factors {
        let shift = f.phase.shift();
        f.phase = Phase::new(z, shift, &f.factor.heart_class());
    }
    HnFiltration { factors }
}

fn require_nonzero(x: &ObjectExpr) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroObject)
    } else {
        Ok(())
    }
}

pub fn is_semistable(z: &Charge, x: &ObjectExpr) -> Result<bool> {
    require_nonzero(x)?;
    Ok(hn(z, x).len() == 1)
}

/// Stable objects per regime: every preprojective, preinjective and
/// `Regular(x, 1)` when all indecomposables are semistable, and only the
/// simples otherwise.
pub fn is_stable(z: &Charge, x: &ObjectExpr) -> Result<bool> {
    require_nonzero(x)?;
    let Some(s) = x.as_indecomposable() else {
        return Ok(false);
    };
    Ok(is_stable_summand(regime(z), s))
}

fn is_stable_summand(reg: Regime, s: &Summand) -> bool {
    match reg {
        Regime::AllSemistable => !matches!(s.indec, Indec::Regular(_, n) if n > 1),
        Regime::Collapsed | Regime::Degenerate => s.indec.is_simple(),
    }
}

pub fn phase(z: &Charge, x: &ObjectExpr) -> Result<Phase> {
    require_nonzero(x)?;
    let filtration = hn(z, x);
    match filtration.factors() {
        [only] => Ok(only.phase.clone()),
        _ => Err(Error::NotSemistable(x.to_string())),
    }
}

/// Exact `|Z(X)|^2` of a semistable object.
pub fn mass_sq(z: &Charge, x: &ObjectExpr) -> Result<Q> {
    phase(z, x)?;
    Ok(charge_eval(z, &x.heart_class()).norm_sq())
}

pub fn mass_log(z: &Charge, x: &ObjectExpr) -> Result<f64> {
    Ok(0.5 * crate::exact::ln_rational(&mass_sq(z, x)?))
}

/// Jordan-Holder factors of a semistable object, returned as their direct
/// sum (the cycle of simple components).
pub fn stable_factors(z: &Charge, x: &ObjectExpr) -> Result<ObjectExpr> {
    phase(z, x)?;
    let reg = regime(z);
    let mut out = ObjectExpr::zero();
    for (s, m) in x.terms() {
        match (reg, &s.indec) {
            (Regime::AllSemistable, Indec::Regular(p, n)) => {
                out.add_summand(
                    Summand::new(Indec::Regular(p.clone(), 1), s.shift),
                    big(m, *n as u64),
                );
            }
            (Regime::AllSemistable, _) | (Regime::Collapsed, _) => {
                out.add_summand(s.clone(), m.clone());
            }
            (Regime::Degenerate, indec) => {
                let (a, b) = indec.dim();
                out.add_summand(Summand::new(Indec::S1, s.shift), big(m, a));
                out.add_summand(Summand::new(Indec::S2, s.shift), big(m, b));
            }
        }
    }
    Ok(out)
}

fn same_phase(z: &Charge, x: &ObjectExpr, y: &ObjectExpr) -> Result<Phase> {
    let px = phase(z, x)?;
    let py = phase(z, y)?;
    if px != py {
        return Err(Error::PhaseMismatch(format!("{x} at {px}, {y} at {py}")));
    }
    Ok(px)
}

pub fn s_equivalent(z: &Charge, x: &ObjectExpr, y: &ObjectExpr) -> Result<bool> {
    same_phase(z, x, y)?;
    Ok(stable_factors(z, x)? == stable_factors(z, y)?)
}

/// For a faithful charge and two semistable objects of equal phase, the
/// positive rational `q` with `[X] = q [Y]`.
pub fn proportionality_witness(z: &Charge, x: &ObjectExpr, y: &ObjectExpr) -> Result<Q> {
    if !is_faithful(z) {
        return Err(Error::NotFaithful);
    }
    same_phase(z, x, y)?;
    let (cx, cy) = (class_of(x), class_of(y));
    match cx.ratio_to(&cy) {
        Some(q) if q.is_positive() => Ok(q),
        _ => Err(Error::NotProportional(cx.to_string(), cy.to_string())),
    }
}

/// Classes and phases of the factors; what the oracle comparison consumes.
pub fn hn_profile(z: &Charge, x: &ObjectExpr) -> Vec<(KClassA, Phase)> {
    hn(z, x)
        .factors()
        .iter()
        .map(|f| (f.factor.heart_class(), f.phase.clone()))
        .collect()
}

/// Sum of the factor classes, with shift signs.
pub fn factor_class_sum(f: &HnFiltration) -> KClassA {
    f.factors()
        .iter()
        .fold(KClassA::zero(), |acc, h| &acc + &class_of(&h.factor))
}
