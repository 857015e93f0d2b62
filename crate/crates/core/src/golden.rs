//! Exact arithmetic in the golden field Q(τ) and the projection of the
//! five-dimensional hypercubic lattice onto the tiling plane and its
//! perpendicular (complementary) plane.
//!
//! Every accept/reject decision in the crate goes through this module. Floats
//! appear only in [`Projection::phys`] and the `to_f64` helpers, which feed
//! rendering and statistics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// τ = (1 + √5) / 2 as a double.
pub const TAU: f64 = 1.618_033_988_749_895;

/// sin(π/5), the unit in which exact cross products and areas are reported.
pub const SIN36: f64 = 0.587_785_252_292_473_1;

type Q = Rational64;

/// An exact element `a + b·τ` of Q(τ) with rational `a`, `b`.
///
/// Coefficients are always stored reduced with positive denominators, so the
/// derived `Eq`/`Hash` agree with numeric equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GoldenNumber {
    a: Q,
    b: Q,
}

/// The arithmetic operations exposed through [`golden_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldenOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` exactly. Division by zero is reported, never panics.
pub fn golden_arith(x: GoldenNumber, y: GoldenNumber, op: GoldenOp) -> Result<GoldenNumber> {
    match op {
        GoldenOp::Add => Ok(x + y),
        GoldenOp::Sub => Ok(x - y),
        GoldenOp::Mul => Ok(x * y),
        GoldenOp::Div => x.checked_div(y),
    }
}

impl GoldenNumber {
    pub fn new(a: Q, b: Q) -> Self {
        GoldenNumber { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        GoldenNumber { a: Q::from_integer(a), b: Q::from_integer(b) }
    }

    /// `(a_num/a_den) + (b_num/b_den)·τ`.
    pub fn from_fracs(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        GoldenNumber { a: Q::new(a_num, a_den), b: Q::new(b_num, b_den) }
    }

    pub fn rational(q: Q) -> Self {
        GoldenNumber { a: q, b: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn tau() -> Self {
        Self::from_ints(0, 1)
    }

    /// Rational part.
    pub fn a(&self) -> Q {
        self.a
    }

    /// Coefficient of τ.
    pub fn b(&self) -> Q {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        *self.a.numer() as f64 / *self.a.denom() as f64
            + TAU * (*self.b.numer() as f64 / *self.b.denom() as f64)
    }

    /// Galois conjugate `a + b·τ'` with `τ' = 1 − τ`.
    pub fn conj(&self) -> Self {
        GoldenNumber { a: self.a + self.b, b: -self.b }
    }

    /// Field norm `a² + ab − b²`.
    pub fn norm(&self) -> Q {
        self.a * self.a + self.a * self.b - self.b * self.b
    }

    pub fn checked_div(&self, rhs: GoldenNumber) -> Result<GoldenNumber> {
        let n = rhs.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = *self * rhs.conj();
        Ok(GoldenNumber { a: c.a / n, b: c.b / n })
    }

    pub fn inv(&self) -> Result<GoldenNumber> {
        GoldenNumber::one().checked_div(*self)
    }

    /// τᵏ for any integer k (negative powers use 1/τ = τ − 1).
    pub fn tau_pow(k: i32) -> Self {
        let base = if k >= 0 { Self::tau() } else { Self::from_ints(-1, 1) };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = out * base;
        }
        out
    }

    /// (−τ)ᵏ, the perpendicular-space factor of k hyper-scalings inverted.
    pub fn neg_tau_pow(k: i32) -> Self {
        let t = Self::tau_pow(k);
        if k.rem_euclid(2) == 1 {
            -t
        } else {
            t
        }
    }

    /// Exact sign of the real number `a + b·τ`, via `((2a + b) + b√5) / 2`
    /// and an integer comparison of squares.
    pub fn sign(&self) -> i8 {
        let p = self.a * 2 + self.b;
        let q = self.b;
        let den = p.denom().lcm(q.denom());
        let pi = (*p.numer() as i128) * (den / p.denom()) as i128;
        let qi = (*q.numer() as i128) * (den / q.denom()) as i128;
        sign_of_surd(pi, qi)
    }

    pub fn signum(&self) -> GoldenNumber {
        GoldenNumber::from_ints(self.sign() as i64, 0)
    }

    pub fn abs(&self) -> GoldenNumber {
        if self.sign() < 0 {
            -*self
        } else {
            *self
        }
    }

    /// The golden number `(a + b τ)` with `|a|, |b| ≤ max_coeff` and
    /// denominators up to `max_den` closest to `x`, together with the
    /// distance to the runner-up candidate (a rough confidence margin).
    pub fn snap(x: f64, max_den: i64, max_coeff: i64) -> Snapped {
        let mut best: Option<(GoldenNumber, f64)> = None;
        let mut second = f64::INFINITY;
        for den in 1..=max_den {
            let lim = max_coeff * den;
            for bn in -lim..=lim {
                let b = bn as f64 / den as f64;
                let an = ((x - b * TAU) * den as f64).round() as i64;
                if an.abs() > lim {
                    continue;
                }
                let g = GoldenNumber::from_fracs(an, den, bn, den);
                let err = (g.to_f64() - x).abs();
                match best {
                    Some((bg, be)) if bg == g => {
                        let _ = be;
                    }
                    Some((_, be)) if err < be => {
                        second = second.min(be);
                        best = Some((g, err));
                    }
                    Some(_) => second = second.min(err),
                    None => best = Some((g, err)),
                }
            }
        }
        let (value, error) = best.expect("at least one candidate");
        Snapped { value, error, margin: second }
    }
}

/// Result of [`GoldenNumber::snap`].
#[derive(Clone, Copy, Debug)]
pub struct Snapped {
    pub value: GoldenNumber,
    pub error: f64,
    /// Distance from `x` to the second-best candidate.
    pub margin: f64,
}

/// Sign of `p + q√5` for integers.
fn sign_of_surd(p: i128, q: i128) -> i8 {
    match (p.signum(), q.signum()) {
        (0, 0) => 0,
        (s, 0) | (0, s) => s as i8,
        (1, 1) => 1,
        (-1, -1) => -1,
        (1, -1) => (p * p - 5 * q * q).signum() as i8,
        _ => (5 * q * q - p * p).signum() as i8,
    }
}

impl fmt::Debug for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}τ", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}τ", self.a, -self.b)
                } else {
                    write!(f, "{} + {}τ", self.a, self.b)
                }
            }
        }
    }
}

impl PartialOrd for GoldenNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).sign().cmp(&0)
    }
}

impl Add for GoldenNumber {
    type Output = GoldenNumber;
    fn add(self, rhs: Self) -> Self {
        GoldenNumber { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl AddAssign for GoldenNumber {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for GoldenNumber {
    type Output = GoldenNumber;
    fn sub(self, rhs: Self) -> Self {
        GoldenNumber { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl SubAssign for GoldenNumber {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for GoldenNumber {
    type Output = GoldenNumber;
    fn neg(self) -> Self {
        GoldenNumber { a: -self.a, b: -self.b }
    }
}

impl Mul for GoldenNumber {
    type Output = GoldenNumber;
    // (a + bτ)(c + dτ) = (ac + bd) + (ad + bc + bd)τ
    fn mul(self, rhs: Self) -> Self {
        let bd = self.b * rhs.b;
        GoldenNumber { a: self.a * rhs.a + bd, b: self.a * rhs.b + self.b * rhs.a + bd }
    }
}

impl Mul<i64> for GoldenNumber {
    type Output = GoldenNumber;
    fn mul(self, rhs: i64) -> Self {
        GoldenNumber { a: self.a * rhs, b: self.b * rhs }
    }
}

impl Div for GoldenNumber {
    type Output = GoldenNumber;
    /// Panics on division by zero; use [`GoldenNumber::checked_div`] when the
    /// divisor is not known to be nonzero.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(rhs).expect("golden division by zero")
    }
}

impl Div<i64> for GoldenNumber {
    type Output = GoldenNumber;
    fn div(self, rhs: i64) -> Self {
        GoldenNumber { a: self.a / rhs, b: self.b / rhs }
    }
}

impl From<i64> for GoldenNumber {
    fn from(v: i64) -> Self {
        GoldenNumber::from_ints(v, 0)
    }
}

impl Serialize for GoldenNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_ratio(self.a), fmt_ratio(self.b)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoldenNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let a = parse_ratio(&a).map_err(serde::de::Error::custom)?;
        let b = parse_ratio(&b).map_err(serde::de::Error::custom)?;
        Ok(GoldenNumber { a, b })
    }
}

/// Fixed rational formatting used by every serialized document: `"num/den"`.
pub fn fmt_ratio(q: Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_ratio(s: &str) -> std::result::Result<Q, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: i64 = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

/// An element `a + b·τ` of Z[τ] with machine integers; the hot path of lattice
/// acceptance tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GoldenInt {
    pub a: i64,
    pub b: i64,
}

impl GoldenInt {
    pub const ZERO: GoldenInt = GoldenInt { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        GoldenInt { a, b }
    }

    pub fn sign(&self) -> i8 {
        sign_of_surd(2 * self.a as i128 + self.b as i128, self.b as i128)
    }

    pub fn scale(&self, k: i64) -> Self {
        GoldenInt { a: self.a * k, b: self.b * k }
    }

    /// Converts a golden number whose denominators divide `den`.
    pub fn from_scaled(g: GoldenNumber, den: i64) -> Self {
        let a = g.a * den;
        let b = g.b * den;
        debug_assert!(a.is_integer() && b.is_integer());
        GoldenInt { a: a.to_integer(), b: b.to_integer() }
    }
}

impl Add for GoldenInt {
    type Output = GoldenInt;
    fn add(self, r: Self) -> Self {
        GoldenInt { a: self.a + r.a, b: self.b + r.b }
    }
}

impl Sub for GoldenInt {
    type Output = GoldenInt;
    fn sub(self, r: Self) -> Self {
        GoldenInt { a: self.a - r.a, b: self.b - r.b }
    }
}

impl Mul for GoldenInt {
    type Output = GoldenInt;
    fn mul(self, r: Self) -> Self {
        let bd = self.b * r.b;
        GoldenInt { a: self.a * r.a + bd, b: self.a * r.b + self.b * r.a + bd }
    }
}

/// Least common multiple of the denominators of both coefficients.
pub fn denominator(g: &GoldenNumber) -> i64 {
    g.a.denom().lcm(g.b.denom())
}

/// A vector in the plane with exact golden coordinates over the skew basis
/// `f₀ = (1, 0)`, `f₁ = (cos 72°, sin 72°)`.
///
/// Both the physical images `Σ nⱼ eⱼ` and the perpendicular images
/// `Σ nⱼ e₂ⱼ` of lattice points live in the Z[τ]-span of the unit vectors
/// at multiples of 72°, and every such vector has exactly one pair of
/// coordinates in this basis, so equality and hashing are structural.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GoldenVector {
    pub x: GoldenNumber,
    pub y: GoldenNumber,
}

/// Complementary-space coordinates of a lattice point.
pub type PerpVector = GoldenVector;

impl fmt::Debug for GoldenVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})f0 + ({})f1", self.x, self.y)
    }
}

impl GoldenVector {
    pub fn new(x: GoldenNumber, y: GoldenNumber) -> Self {
        GoldenVector { x, y }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector at angle `72°·m` (`m` taken mod 5).
    pub fn unit(m: i64) -> Self {
        let g = GoldenNumber::from_ints;
        let (x, y) = match m.rem_euclid(5) {
            0 => (g(1, 0), g(0, 0)),
            1 => (g(0, 0), g(1, 0)),
            2 => (g(-1, 0), g(-1, 1)),
            3 => (g(1, -1), g(1, -1)),
            _ => (g(-1, 1), g(-1, 0)),
        };
        GoldenVector { x, y }
    }

    /// The unit vector at angle `36°·d` (`d` taken mod 10).
    pub fn unit10(d: i64) -> Self {
        let d = d.rem_euclid(10);
        if d % 2 == 0 {
            Self::unit(d / 2)
        } else {
            -Self::unit((d + 5) / 2)
        }
    }

    pub fn scale(&self, k: GoldenNumber) -> Self {
        GoldenVector { x: self.x * k, y: self.y * k }
    }

    /// `self × other` in units of sin 36°.
    pub fn cross(&self, other: &GoldenVector) -> GoldenNumber {
        (self.x * other.y - self.y * other.x) * GoldenNumber::tau()
    }

    /// Exact dot product.
    pub fn dot(&self, other: &GoldenVector) -> GoldenNumber {
        let cos72 = GoldenNumber::from_fracs(-1, 2, 1, 2);
        self.x * other.x + self.y * other.y + (self.x * other.y + self.y * other.x) * cos72
    }

    pub fn norm2(&self) -> GoldenNumber {
        self.dot(self)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        let (c, s) = ((2.0 * std::f64::consts::PI / 5.0).cos(), (2.0 * std::f64::consts::PI / 5.0).sin());
        let x = self.x.to_f64();
        let y = self.y.to_f64();
        [x + y * c, y * s]
    }

    /// Inverse of [`GoldenVector::to_f64`]: skew coordinates of a float point.
    pub fn skew_coords(p: [f64; 2]) -> [f64; 2] {
        let (c, s) = ((2.0 * std::f64::consts::PI / 5.0).cos(), (2.0 * std::f64::consts::PI / 5.0).sin());
        let y = p[1] / s;
        [p[0] - y * c, y]
    }
}

impl Add for GoldenVector {
    type Output = GoldenVector;
    fn add(self, r: Self) -> Self {
        GoldenVector { x: self.x + r.x, y: self.y + r.y }
    }
}

impl Sub for GoldenVector {
    type Output = GoldenVector;
    fn sub(self, r: Self) -> Self {
        GoldenVector { x: self.x - r.x, y: self.y - r.y }
    }
}

impl Neg for GoldenVector {
    type Output = GoldenVector;
    fn neg(self) -> Self {
        GoldenVector { x: -self.x, y: -self.y }
    }
}

impl Mul<i64> for GoldenVector {
    type Output = GoldenVector;
    fn mul(self, k: i64) -> Self {
        GoldenVector { x: self.x * k, y: self.y * k }
    }
}

/// Orientation predicate in units of sin 36°; see [`GoldenVector::cross`].
pub fn exact_cross(u: &PerpVector, w: &PerpVector) -> GoldenNumber {
    u.cross(w)
}

/// Canonical integer coordinates `[n₀ … n₄]` of a lattice point, normalised so
/// that the level `p = Σ nⱼ` lies in `0..5`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct IndexVector(pub [i32; 5]);

impl fmt::Debug for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0;
        write!(f, "[{} {} {} {} {}]", n[0], n[1], n[2], n[3], n[4])
    }
}

/// Representative of `raw` with `Σ nⱼ ∈ {0, …, 4}`; valid because `Σ eⱼ = 0`.
pub fn canonicalize(raw: [i64; 5]) -> IndexVector {
    let sum: i64 = raw.iter().sum();
    let k = sum.div_euclid(5);
    let mut n = [0i32; 5];
    for j in 0..5 {
        n[j] = (raw[j] - k) as i32;
    }
    IndexVector(n)
}

impl IndexVector {
    pub fn origin() -> Self {
        IndexVector([0; 5])
    }

    pub fn level(&self) -> u8 {
        self.0.iter().sum::<i32>() as u8
    }

    pub fn raw(&self) -> [i64; 5] {
        self.0.map(|v| v as i64)
    }

    /// `self + delta`, canonicalised.
    pub fn offset(&self, delta: &[i64; 5]) -> IndexVector {
        let mut r = self.raw();
        for j in 0..5 {
            r[j] += delta[j];
        }
        canonicalize(r)
    }

    /// Raw difference `self − other` (not canonicalised).
    pub fn diff(&self, other: &IndexVector) -> [i64; 5] {
        let mut d = [0i64; 5];
        for j in 0..5 {
            d[j] = (self.0[j] - other.0[j]) as i64;
        }
        d
    }

    pub fn perp(&self) -> PerpVector {
        perp_of(&self.raw())
    }

    pub fn phys_exact(&self) -> GoldenVector {
        phys_of(&self.raw())
    }

    pub fn phys(&self) -> [f64; 2] {
        phys_f64(&self.raw())
    }
}

/// Exact `Σ nⱼ e₂ⱼ` for a raw tuple.
pub fn perp_of(n: &[i64; 5]) -> PerpVector {
    let mut v = GoldenVector::zero();
    for (j, &c) in n.iter().enumerate() {
        if c != 0 {
            v = v + GoldenVector::unit(2 * j as i64) * c;
        }
    }
    v
}

/// Exact `Σ nⱼ eⱼ` for a raw tuple.
pub fn phys_of(n: &[i64; 5]) -> GoldenVector {
    let mut v = GoldenVector::zero();
    for (j, &c) in n.iter().enumerate() {
        if c != 0 {
            v = v + GoldenVector::unit(j as i64) * c;
        }
    }
    v
}

pub fn phys_f64(n: &[i64; 5]) -> [f64; 2] {
    let b = Basis::get();
    let mut p = [0.0; 2];
    for j in 0..5 {
        p[0] += n[j] as f64 * b.phys[j][0];
        p[1] += n[j] as f64 * b.phys[j][1];
    }
    p
}

/// Integer skew coordinates of `e₂ⱼ`, used by the compiled acceptance tests.
pub(crate) fn perp_unit_int(j: usize) -> (GoldenInt, GoldenInt) {
    let u = GoldenVector::unit(2 * j as i64);
    (GoldenInt::from_scaled(u.x, 1), GoldenInt::from_scaled(u.y, 1))
}

/// `(−1/τ)ˢ`, the perpendicular-space factor of `s` hyper-scalings.
pub fn neg_tau_pow_perp(s: u32) -> GoldenNumber {
    GoldenNumber::neg_tau_pow(-(s as i32))
}

/// Result of [`project`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub phys: [f64; 2],
    pub perp: PerpVector,
    pub level: u8,
}

pub fn project(v: &IndexVector) -> Projection {
    Projection { phys: v.phys(), perp: v.perp(), level: v.level() }
}

/// Float copies of the physical and perpendicular star vectors and the lift
/// `ẽⱼ = (eⱼ, e₂ⱼ, 1/√2)`.
#[derive(Clone, Debug)]
pub struct Basis {
    pub phys: [[f64; 2]; 5],
    pub perp: [[f64; 2]; 5],
}

impl Basis {
    pub fn get() -> &'static Basis {
        static BASIS: std::sync::OnceLock<Basis> = std::sync::OnceLock::new();
        BASIS.get_or_init(|| {
            let ang = |m: usize| 2.0 * std::f64::consts::PI * (m % 5) as f64 / 5.0;
            let mut phys = [[0.0; 2]; 5];
            let mut perp = [[0.0; 2]; 5];
            for j in 0..5 {
                phys[j] = [ang(j).cos(), ang(j).sin()];
                perp[j] = [ang(2 * j).cos(), ang(2 * j).sin()];
            }
            Basis { phys, perp }
        })
    }

    /// The five lifted basis vectors in R⁵.
    pub fn lifted(&self) -> [[f64; 5]; 5] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = [[0.0; 5]; 5];
        for j in 0..5 {
            out[j] = [self.phys[j][0], self.phys[j][1], self.perp[j][0], self.perp[j][1], h];
        }
        out
    }
}

/// Index-space image of the edge vector `τˢ·eⱼ`: row `j` of `Sˢ`, where `S`
/// is the hyper-scaling matrix with `S_ij = −1` iff `j ≡ i ± 2 (mod 5)`.
pub fn scaled_edge(j: usize, s: u32) -> [i64; 5] {
    let mut v = [0i64; 5];
    v[j % 5] = 1;
    for _ in 0..s {
        v = apply_scaling(&v);
    }
    v
}

/// `n ↦ n·S` on raw tuples.
pub fn apply_scaling(n: &[i64; 5]) -> [i64; 5] {
    let mut out = [0i64; 5];
    for i in 0..5 {
        out[(i + 2) % 5] -= n[i];
        out[(i + 3) % 5] -= n[i];
    }
    out
}

/// Level of `τ̃ˢ` applied to a point of unit level `q`: `((−2)ˢ·q) mod 5`.
pub fn scaled_level(q: u8, s: u32) -> u8 {
    let mut p = q as i64;
    for _ in 0..s {
        p = (-2 * p).rem_euclid(5);
    }
    p as u8
}

/// Inverse of [`scaled_level`].
pub fn unit_level(p: u8, s: u32) -> u8 {
    (0..5u8).find(|&q| scaled_level(q, s) == p).expect("scaling permutes levels")
}
