//! Grothendieck-group lattices of the two models and central charges on the
//! Kronecker heart.
//!
//! `KClassA` lives in `K(D(P^1)) = Z[S1] + Z[S2]` where `S1 = O(-1)[1]` and
//! `S2 = O` are the simple Kronecker modules. `KClassCY` lives in
//! `K = Z[O_x] + Z[O]` of the 2-Calabi-Yau local P^1 category.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{BigInt, Integer, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grammar::int_json;
use crate::exact::{format_rational, parse_rational, q, Gauss, Q};

/// Dimension vector `(d1, d2)` over the Kronecker heart, basis `[S1], [S2]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct KClassA {
    pub d1: BigInt,
    pub d2: BigInt,
}

impl KClassA {
    pub fn new(d1: impl Into<BigInt>, d2: impl Into<BigInt>) -> Self {
        Self {
            d1: d1.into(),
            d2: d2.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero()
    }

    /// Both coordinates nonnegative and not both zero: the class of a
    /// nonzero heart object.
    pub fn is_effective(&self) -> bool {
        !self.d1.is_negative() && !self.d2.is_negative() && !self.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.d1 * k, &self.d2 * k)
    }

    /// Divides out the gcd of the coordinates (sign kept).
    pub fn primitive(&self) -> Self {
        let g = self.d1.gcd(&self.d2);
        if g.is_zero() {
            return self.clone();
        }
        Self::new(&self.d1 / &g, &self.d2 / &g)
    }

    /// `Some(q)` with `self = q * other` if the classes are proportional.
    pub fn ratio_to(&self, other: &KClassA) -> Option<Q> {
        if other.is_zero() {
            return None;
        }
        if &self.d1 * &other.d2 != &self.d2 * &other.d1 {
            return None;
        }
        let q = if other.d1.is_zero() {
            Q::new(self.d2.clone(), other.d2.clone())
        } else {
            Q::new(self.d1.clone(), other.d1.clone())
        };
        Some(q)
    }

    /// Small-coordinate view, for tests and display.
    /// `[d1, d2]`, with components beyond `i64` written as strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([int_json(&self.d1), int_json(&self.d2)])
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        use num::ToPrimitive;
        Some((self.d1.to_i64()?, self.d2.to_i64()?))
    }
}

impl Add for &KClassA {
    type Output = KClassA;
    fn add(self, rhs: &KClassA) -> KClassA {
        KClassA::new(&self.d1 + &rhs.d1, &self.d2 + &rhs.d2)
    }
}

impl Sub for &KClassA {
    type Output = KClassA;
    fn sub(self, rhs: &KClassA) -> KClassA {
        KClassA::new(&self.d1 - &rhs.d1, &self.d2 - &rhs.d2)
    }
}

impl Neg for &KClassA {
    type Output = KClassA;
    fn neg(self) -> KClassA {
        KClassA::new(-&self.d1, -&self.d2)
    }
}

impl fmt::Display for KClassA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Class `a[O_x] + b[O]` in the Grothendieck group of local P^1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct KClassCY {
    pub a: BigInt,
    pub b: BigInt,
}

impl KClassCY {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
        }
    }

    /// `[O_x]`
    pub fn point() -> Self {
        Self::new(1, 0)
    }

    /// `[O(n)]`
    pub fn line_bundle(n: i64) -> Self {
        Self::new(n, 1)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.a * k, &self.b * k)
    }
}

impl Add for &KClassCY {
    type Output = KClassCY;
    fn add(self, rhs: &KClassCY) -> KClassCY {
        KClassCY::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &KClassCY {
    type Output = KClassCY;
    fn sub(self, rhs: &KClassCY) -> KClassCY {
        KClassCY::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Neg for &KClassCY {
    type Output = KClassCY;
    fn neg(self) -> KClassCY {
        KClassCY::new(-&self.a, -&self.b)
    }
}

impl fmt::Display for KClassCY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[O_x] + {}[O]", self.a, self.b)
    }
}

/// Euler form of the Kronecker quiver (two arrows 1 -> 2).
pub fn euler_a(e: &KClassA, f: &KClassA) -> BigInt {
    &e.d1 * &f.d1 + &e.d2 * &f.d2 - BigInt::from(2) * &e.d1 * &f.d2
}

/// Euler form of local P^1: `[O_x]` spans the radical and `chi(O, O) = 2`.
pub fn euler_cy(e: &KClassCY, f: &KClassCY) -> BigInt {
    BigInt::from(2) * &e.b * &f.b
}

/// Image in the numerical Grothendieck group `K / Z[O_x] = Z`.
pub fn numerical_class(e: &KClassCY) -> BigInt {
    e.b.clone()
}

/// A stability function on the Kronecker heart, given by its values on the
/// two simple objects.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Charge {
    z1: Gauss,
    z2: Gauss,
}

impl Charge {
    pub fn new(z1: Gauss, z2: Gauss) -> Result<Self> {
        for z in [&z1, &z2] {
            if !z.in_stability_cone() {
                return Err(Error::InvalidCharge(z.to_string()));
            }
        }
        Ok(Self { z1, z2 })
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_ints(z1: (i64, i64), z2: (i64, i64)) -> Result<Self> {
        Self::new(Gauss::from_ints(z1.0, z1.1), Gauss::from_ints(z2.0, z2.1))
    }

    pub fn z1(&self) -> &Gauss {
        &self.z1
    }

    pub fn z2(&self) -> &Gauss {
        &self.z2
    }

    /// `Re(z1) Im(z2) - Re(z2) Im(z1)`
    pub fn determinant(&self) -> Q {
        self.z1.cross(&self.z2)
    }

    pub fn eval(&self, e: &KClassA) -> Gauss {
        charge_eval(self, e)
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z1 = {}, z2 = {})", self.z1, self.z2)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussRepr {
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChargeRepr {
    z1: GaussRepr,
    z2: GaussRepr,
}

impl GaussRepr {
    fn from_gauss(z: &Gauss) -> Self {
        Self {
            re: format_rational(&z.re),
            im: format_rational(&z.im),
        }
    }

    fn to_gauss(&self) -> Result<Gauss> {
        Ok(Gauss::new(parse_rational(&self.re)?, parse_rational(&self.im)?))
    }
}

impl Serialize for Charge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChargeRepr {
            z1: GaussRepr::from_gauss(&self.z1),
            z2: GaussRepr::from_gauss(&self.z2),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Charge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ChargeRepr::deserialize(d)?;
        let z1 = repr.z1.to_gauss().map_err(D::Error::custom)?;
        let z2 = repr.z2.to_gauss().map_err(D::Error::custom)?;
        Charge::new(z1, z2).map_err(D::Error::custom)
    }
}

pub fn charge_eval(z: &Charge, e: &KClassA) -> Gauss {
    &z.z1.scale(&e.d1) + &z.z2.scale(&e.d2)
}

/// On the rank-two Kronecker heart, two independent classes share a phase
/// exactly when `Z` collapses the plane, i.e. when the determinant vanishes.
pub fn is_faithful(z: &Charge) -> bool {
    !z.determinant().is_zero()
}

/// A pair of independent heart classes with equal phase, if any.
pub fn faithfulness_witness(z: &Charge) -> Option<(KClassA, KClassA)> {
    (!is_faithful(z)).then(|| (KClassA::new(1, 0), KClassA::new(0, 1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulnessReport {
    pub samples: usize,
    pub non_faithful: usize,
    pub fraction_non_faithful: Q,
    pub witnesses: Vec<Charge>,
}

/// Uniform rational `n/d` with `|n| <= bound` and `1 <= d <= bound`.
fn grid_rational(rng: &mut impl Rng, bound: i64) -> Q {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=bound);
    Q::new(n.into(), d.into())
}

fn grid_value(rng: &mut impl Rng, bound: i64) -> Gauss {
    loop {
        let z = Gauss::new(grid_rational(rng, bound), grid_rational(rng, bound));
        if z.in_stability_cone() {
            return z;
        }
    }
}

/// Draws a valid charge from the rational grid by rejection sampling.
pub fn random_grid_charge(rng: &mut impl Rng, grid_bound: i64) -> Charge {
    let z1 = grid_value(rng, grid_bound);
    let z2 = grid_value(rng, grid_bound);
    Charge::new(z1, z2).expect("both values drawn from the cone")
}

/// Infinite deterministic stream of grid charges.
pub fn grid_charges(grid_bound: i64, seed: u64) -> impl Iterator<Item = Charge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || random_grid_charge(&mut rng, grid_bound))
}

/// Classifies every charge of a stream, keeping each non-faithful one.
pub fn classify_faithfulness(charges: impl IntoIterator<Item = Charge>) -> FaithfulnessReport {
    let mut samples = 0;
    let mut witnesses = Vec::new();
    for z in charges {
        samples += 1;
        if !is_faithful(&z) {
            witnesses.push(z);
        }
    }
    let non_faithful = witnesses.len();
    let fraction_non_faithful = if samples == 0 {
        Q::zero()
    } else {
        Q::new(non_faithful.into(), samples.into())
    };
    FaithfulnessReport {
        samples,
        non_faithful,
        fraction_non_faithful,
        witnesses,
    }
}

pub fn sample_faithfulness(grid_bound: i64, count: usize, seed: u64) -> Result<FaithfulnessReport> {
    if grid_bound < 1 {
        return Err(Error::InvalidBounds(format!("grid_bound = {grid_bound}")));
    }
    if count < 1 {
        return Err(Error::InvalidBounds("count must be at least 1".into()));
    }
    Ok(classify_faithfulness(grid_charges(grid_bound, seed).take(count)))
}

/// Moves `z2` by less than `eps` so that the charge becomes faithful.
///
/// For a degenerate charge `det = 0`, adding `delta*i` to `z2` changes the
/// determinant to `Re(z1)*delta`, and adding the real `delta` changes it to
/// `-Im(z1)*delta`; at least one of the two is nonzero.
pub fn perturb_to_faithful(z: &Charge, eps: &Q) -> Charge {
    assert!(eps.is_positive(), "eps must be positive");
    if is_faithful(z) {
        return z.clone();
    }
    let mut delta = eps / q(2);
    loop {
        let candidates = [
            Gauss::new(z.z2.re.clone(), &z.z2.im + &delta),
            Gauss::new(&z.z2.re + &delta, z.z2.im.clone()),
        ];
        for z2 in candidates {
            if let Ok(c) = Charge::new(z.z1.clone(), z2) {
                if is_faithful(&c) {
                    return c;
                }
            }
        }
        delta /= q(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use num::One;

    fn ka(d1: i64, d2: i64) -> KClassA {
        KClassA::new(d1, d2)
    }

    #[test]
    fn euler_a_examples() {
        assert_eq!(euler_a(&ka(0, 1), &ka(1, 2)), BigInt::from(2));
        assert_eq!(euler_a(&ka(1, 1), &ka(1, 1)), BigInt::zero());
        assert_eq!(euler_a(&ka(0, 0), &ka(3, -2)), BigInt::zero());
    }

    #[test]
    fn euler_cy_examples() {
        let o = KClassCY::line_bundle(0);
        let ox = KClassCY::point();
        assert_eq!(euler_cy(&o, &o), BigInt::from(2));
        assert_eq!(euler_cy(&ox, &KClassCY::new(5, -3)), BigInt::zero());
        assert_eq!(numerical_class(&ox), BigInt::zero());
        assert_eq!(numerical_class(&o), BigInt::one());
        assert_eq!(numerical_class(&KClassCY::new(3, 2)), BigInt::from(2));
    }

    #[test]
    fn charge_eval_examples() {
        let z = Charge::from_ints((0, 1), (-1, 0)).unwrap();
        assert_eq!(charge_eval(&z, &ka(1, 1)), Gauss::from_ints(-1, 1));
        let z = Charge::from_ints((0, 1), (0, 2)).unwrap();
        assert_eq!(charge_eval(&z, &ka(0, 3)), Gauss::from_ints(0, 6));
        let z = Charge::from_ints((-1, 0), (0, 1)).unwrap();
        assert_eq!(charge_eval(&z, &ka(2, 1)), Gauss::from_ints(-2, 1));
    }

    #[test]
    fn charge_rejects_values_outside_cone() {
        assert!(Charge::from_ints((1, 0), (0, 1)).is_err());
        assert!(Charge::from_ints((0, 0), (0, 1)).is_err());
        assert!(Charge::from_ints((0, -1), (0, 1)).is_err());
    }

    #[test]
    fn faithfulness_examples() {
        assert!(!is_faithful(&Charge::from_ints((0, 1), (0, 2)).unwrap()));
        assert!(is_faithful(&Charge::from_ints((-1, 0), (0, 1)).unwrap()));
        let z = Charge::from_ints((1, 1), (-2, 2)).unwrap();
        assert_eq!(z.determinant(), q(4));
        assert!(is_faithful(&z));
    }

    #[test]
    fn planted_witness_is_reported() {
        let planted = Charge::from_ints((0, 1), (0, 2)).unwrap();
        let report = classify_faithfulness([planted.clone()]);
        assert_eq!(report.witnesses, vec![planted]);
        assert_eq!(report.fraction_non_faithful, q(1));
    }

    #[test]
    fn sampling_is_total_and_deterministic() {
        let a = sample_faithfulness(1, 200, 9).unwrap();
        let b = sample_faithfulness(1, 200, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 200);
        assert!(sample_faithfulness(0, 10, 1).is_err());
        assert!(sample_faithfulness(10, 0, 1).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let eps = q_frac(1, 1024);
        let z = Charge::from_ints((0, 1), (0, 2)).unwrap();
        let p = perturb_to_faithful(&z, &eps);
        assert!(is_faithful(&p));
        assert!(p.z1().linf_dist(z.z1()) < eps && p.z2().linf_dist(z.z2()) < eps);

        let faithful = Charge::from_ints((-1, 0), (0, 1)).unwrap();
        assert_eq!(perturb_to_faithful(&faithful, &eps), faithful);

        let eps = q_frac(1, 4);
        let z = Charge::from_ints((-1, 0), (-2, 0)).unwrap();
        let p = perturb_to_faithful(&z, &eps);
        assert!(is_faithful(&p));
        assert!(p.z2().linf_dist(z.z2()) < eps);
    }

    #[test]
    fn charge_json_is_exact() {
        let z = Charge::new(Gauss::new(q_frac(-1, 3), q(0)), Gauss::new(q(0), q_frac(7, 2))).unwrap();
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(
            text,
            r#"{"z1":{"re":"-1/3","im":"0"},"z2":{"re":"0","im":"7/2"}}"#
        );
        let back: Charge = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
        assert!(serde_json::from_str::<Charge>(r#"{"z1":{"re":"1","im":"0"},"z2":{"re":"0","im":"1"}}"#).is_err());
        assert!(serde_json::from_str::<Charge>(r#"{"z1":{"re":"-1","im":"0","x":"1"},"z2":{"re":"0","im":"1"}}"#).is_err());
    }
}
