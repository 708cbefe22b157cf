//! Exact arithmetic in the real quadratic field Q(beta), beta^2 = a*beta + b.
//!
//! Elements are stored on the basis (1, beta) with arbitrary-precision
//! rational coordinates, so that membership in the integer span of (1, beta) is a denominator
//! check. All comparisons are exact integer/rational sign computations;
//! floating point only ever appears behind [`QuadElem::approx`], which
//! returns an outward-rounded rational enclosure.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Largest coefficient magnitude accepted by [`PisotQuad::new`]. Keeps the
/// discriminant small enough for exact square-free factorization by trial
/// division.
pub const MAX_COEFF: i64 = 1 << 20;

fn rat_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The defining data of the field: beta^2 = a*beta + b.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Coeffs {
    pub a: i64,
    pub b: i64,
}

impl Coeffs {
    /// Discriminant a^2 + 4b of the minimal polynomial.
    pub fn disc(&self) -> i64 {
        self.a * self.a + 4 * self.b
    }
}

/// An element u + v*beta of Q(beta).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    u: Rational,
    v: Rational,
    ctx: Coeffs,
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*B", self.u, self.v)
    }
}

impl QuadElem {
    pub fn new(u: Rational, v: Rational, ctx: Coeffs) -> Self {
        QuadElem { u, v, ctx }
    }

    pub fn zero(ctx: Coeffs) -> Self {
        QuadElem::new(Rational::zero(), Rational::zero(), ctx)
    }

    pub fn one(ctx: Coeffs) -> Self {
        QuadElem::from_int(1, ctx)
    }

    pub fn beta(ctx: Coeffs) -> Self {
        QuadElem::new(Rational::zero(), Rational::one(), ctx)
    }

    pub fn from_int(n: i64, ctx: Coeffs) -> Self {
        QuadElem::new(rat_i64(n), Rational::zero(), ctx)
    }

    pub fn from_rational(r: Rational, ctx: Coeffs) -> Self {
        QuadElem::new(r, Rational::zero(), ctx)
    }

    /// Integer-coordinate element K + L*beta.
    pub fn from_pair(k: i64, l: i64, ctx: Coeffs) -> Self {
        QuadElem::new(rat_i64(k), rat_i64(l), ctx)
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn v(&self) -> &Rational {
        &self.v
    }

    pub fn coeffs(&self) -> Coeffs {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// True when both coordinates are rational integers, i.e. the element
    /// lies in the integer span of (1, beta).
    pub fn is_integral(&self) -> bool {
        self.u.is_integer() && self.v.is_integer()
    }

    /// Integer coordinates (K, L) when the element is integral over (1, beta).
    pub fn integral_pair(&self) -> Option<(BigInt, BigInt)> {
        if self.is_integral() {
            Some((self.u.to_integer(), self.v.to_integer()))
        } else {
            None
        }
    }

    fn check_ctx(&self, other: &QuadElem) {
        assert_eq!(self.ctx, other.ctx, "quadratic field context mismatch");
    }

    /// Galois conjugation: beta maps to beta_2 = a - beta.
    pub fn conj(&self) -> QuadElem {
        let a = rat_i64(self.ctx.a);
        QuadElem::new(&self.u + &self.v * a, -self.v.clone(), self.ctx)
    }

    /// Field norm x * conj(x) = u^2 + a*u*v - b*v^2, a rational number.
    pub fn norm(&self) -> Rational {
        let a = rat_i64(self.ctx.a);
        let b = rat_i64(self.ctx.b);
        &self.u * &self.u + a * &self.u * &self.v - b * &self.v * &self.v
    }

    /// Exact sign of the real value u + v*beta: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        if self.v.is_zero() {
            return sign_of(&self.u);
        }
        if self.u.is_zero() {
            return sign_of(&self.v); // beta > 0
        }
        // value = v * (beta - r) with r = -u/v; beta = r is impossible
        // since the minimal polynomial is irreducible.
        let r = -&self.u / &self.v;
        let a = rat_i64(self.ctx.a);
        let beta_minus_r: i8 = if &r + &r <= a {
            // r <= a/2 < beta
            1
        } else {
            // right branch of f(t) = t^2 - at - b: f(r) < 0 iff r < beta
            let f = &r * &r - a * &r - rat_i64(self.ctx.b);
            -sign_of(&f)
        };
        sign_of(&self.v) * beta_minus_r
    }

    /// Exact total order matching the real embedding.
    pub fn try_cmp(&self, other: &QuadElem) -> Result<Ordering, Error> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(self.cmp_same_ctx(other))
    }

    /// Comparison when both operands are known to share the context.
    pub fn cmp_same_ctx(&self, other: &QuadElem) -> Ordering {
        self.check_ctx(other);
        let diff = self - other;
        match diff.sign() {
            0 => Ordering::Equal,
            s if s < 0 => Ordering::Less,
            _ => Ordering::Greater,
        }
    }

    pub fn cmp_int(&self, n: i64) -> Ordering {
        self.cmp_same_ctx(&QuadElem::from_int(n, self.ctx))
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.cmp_same_ctx(&QuadElem::from_rational(r.clone(), self.ctx))
    }

    pub fn abs(&self) -> QuadElem {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer k with k <= u + v*beta.
    pub fn floor(&self) -> BigInt {
        if self.v.is_zero() {
            return self.u.floor().to_integer();
        }
        // Estimate from an enclosure tight enough that |v| * width < 1,
        // then fix up exactly.
        let denom = self.v.denom().magnitude().bits().max(1) as u32;
        let bits = self.v.numer().magnitude().bits() as u32 + denom + 3;
        let (lo, hi) = beta_bracket(self.ctx, bits);
        let est = if self.v.is_positive() {
            &self.u + &self.v * lo
        } else {
            &self.u + &self.v * hi
        };
        let mut k = est.floor().to_integer();
        // slide k upward while k+1 <= x, downward while k > x
        loop {
            let kq = QuadElem::from_rational(Rational::from_integer(&k + 1), self.ctx);
            if self.cmp_same_ctx(&kq) != Ordering::Less {
                k += 1;
            } else {
                break;
            }
        }
        loop {
            let kq = QuadElem::from_rational(Rational::from_integer(k.clone()), self.ctx);
            if self.cmp_same_ctx(&kq) == Ordering::Less {
                k -= 1;
            } else {
                break;
            }
        }
        k
    }

    /// Rational enclosure [lo, hi] of width at most 2^-bits containing the
    /// real value. For reporting only; exact decisions go through `sign`.
    pub fn approx(&self, bits: u32) -> (Rational, Rational) {
        if self.v.is_zero() {
            return (self.u.clone(), self.u.clone());
        }
        // |v| * beta_width <= 2^-bits
        let extra = (self.v.numer().magnitude().bits() as i64
            - self.v.denom().magnitude().bits() as i64)
            .max(0) as u32;
        let (blo, bhi) = beta_bracket(self.ctx, bits + extra + 2);
        let x1 = &self.u + &self.v * &blo;
        let x2 = &self.u + &self.v * &bhi;
        if x1 <= x2 {
            (x1, x2)
        } else {
            (x2, x1)
        }
    }

    /// Double-precision estimate via a 64-bit enclosure midpoint.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.approx(64);
        let mid = (lo + hi) / rat_i64(2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Multiplicative inverse conj(x) / N(x).
    pub fn inv(&self) -> Result<QuadElem, Error> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        Ok(QuadElem::new(c.u / &n, c.v / &n, self.ctx))
    }

    /// Product with beta: (u + v*beta) * beta = v*b + (u + v*a)*beta.
    pub fn times_beta(&self) -> QuadElem {
        let a = rat_i64(self.ctx.a);
        let b = rat_i64(self.ctx.b);
        QuadElem::new(&self.v * b, &self.u + &self.v * a, self.ctx)
    }

    /// Quotient by beta: x / beta = x * (beta - a) / b.
    pub fn div_beta(&self) -> QuadElem {
        let a = rat_i64(self.ctx.a);
        let b = rat_i64(self.ctx.b);
        // (u + v*beta)(beta - a) = (v*b - u*a) + u*beta
        QuadElem::new((&self.v * b.clone() - &self.u * a) / &b, &self.u / b, self.ctx)
    }

    pub fn scale(&self, r: &Rational) -> QuadElem {
        QuadElem::new(&self.u * r, &self.v * r, self.ctx)
    }

    /// Coordinates (x, y) with value = x + y*sqrt(d), where d is the
    /// square-free part of the discriminant. Display helper.
    pub fn sqrt_coords(&self, sqrt_scale: i64) -> (Rational, Rational) {
        // beta = (a + s*sqrt(d))/2 with disc = s^2 d
        let a = rat_i64(self.ctx.a);
        let two = rat_i64(2);
        let x = &self.u + &self.v * a / &two;
        let y = &self.v * rat_i64(sqrt_scale) / two;
        (x, y)
    }

    /// Exact k-th power, by repeated squaring.
    pub fn pow(&self, k: u32) -> QuadElem {
        let mut acc = QuadElem::one(self.ctx);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact sign of X + Y*beta for integer coordinates small enough that the
/// quadratic form X^2 + aXY - bY^2 fits in i128 (|X|, |Y| < 2^52 with the
/// coefficient cap). Integer-only counterpart of [`QuadElem::sign`].
pub(crate) fn sign_pair_i128(x: i128, y: i128, a: i64, b: i64) -> i8 {
    if y == 0 {
        return x.signum() as i8;
    }
    let a = a as i128;
    let b = b as i128;
    let two_x_plus_ay = 2 * x + a * y;
    let r_le_half_a = if y > 0 { two_x_plus_ay >= 0 } else { two_x_plus_ay <= 0 };
    let beta_minus_r: i8 = if r_le_half_a {
        1
    } else {
        let f = x * x + a * x * y - b * y * y;
        -(f.signum() as i8)
    };
    (y.signum() as i8) * beta_minus_r
}

/// Rational bracket around beta of width at most 2^-bits, computed by
/// bisection on X^2 - aX - b starting from integer-square-root bounds.
pub fn beta_bracket(ctx: Coeffs, bits: u32) -> (Rational, Rational) {
    let disc = BigInt::from(ctx.disc());
    let s = disc.sqrt();
    let two = rat_i64(2);
    let mut lo = (rat_i64(ctx.a) + Rational::from_integer(s.clone())) / &two;
    let mut hi = (rat_i64(ctx.a) + Rational::from_integer(s + 1)) / &two;
    let target = Rational::new(BigInt::one(), BigInt::one() << bits);
    let a = rat_i64(ctx.a);
    let b = rat_i64(ctx.b);
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        let f = &mid * &mid - &a * &mid - &b;
        if f.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

macro_rules! quad_binop {
    ($trait:ident, $fn:ident, |$lhs:ident, $rhs:ident| $body:expr) => {
        impl $trait<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $fn(self, other: &QuadElem) -> QuadElem {
                self.check_ctx(other);
                let $lhs = self;
                let $rhs = other;
                $body
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $fn(self, other: QuadElem) -> QuadElem {
                $trait::$fn(&self, &other)
            }
        }
        impl $trait<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $fn(self, other: &QuadElem) -> QuadElem {
                $trait::$fn(&self, other)
            }
        }
    };
}

quad_binop!(Add, add, |x, y| QuadElem::new(&x.u + &y.u, &x.v + &y.v, x.ctx));
quad_binop!(Sub, sub, |x, y| QuadElem::new(&x.u - &y.u, &x.v - &y.v, x.ctx));
quad_binop!(Mul, mul, |x, y| {
    // (u1 + v1 B)(u2 + v2 B) = u1 u2 + v1 v2 b + (u1 v2 + u2 v1 + v1 v2 a) B
    let a = rat_i64(x.ctx.a);
    let b = rat_i64(x.ctx.b);
    let vv = &x.v * &y.v;
    QuadElem::new(
        &x.u * &y.u + &vv * b,
        &x.u * &y.v + &y.u * &x.v + vv * a,
        x.ctx,
    )
});

impl Div<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn div(self, other: &QuadElem) -> QuadElem {
        self * &other.inv().expect("division by zero in Q(beta)")
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-self.u.clone(), -self.v.clone(), self.ctx)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// How d_beta(1) terminates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DOne {
    /// d_beta(1) = t_1 ... t_k 0^inf (simple Parry number).
    Finite(Vec<i64>),
    /// d_beta(1) = pre . per^inf (non-simple Parry number).
    Eventually { pre: Vec<i64>, per: Vec<i64> },
}

/// Parry data of the context: d_beta(1), the quasi-greedy d*_beta(1)
/// written as t_1 .. t_m (t_{m+1} .. t_n)^inf, and the digit list t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParryData {
    pub d_one: DOne,
    /// Preperiod length of d*_beta(1); zero exactly for simple Parry numbers.
    pub m: usize,
    /// t_1 .. t_n governing the admissibility graph.
    pub t: Vec<i64>,
}

impl ParryData {
    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// The period t_{m+1} .. t_n of d*_beta(1).
    pub fn d_star_period(&self) -> &[i64] {
        &self.t[self.m..]
    }

    pub fn d_star_pre(&self) -> &[i64] {
        &self.t[..self.m]
    }
}

/// A validated quadratic Pisot context.
#[derive(Clone, Debug)]
pub struct PisotQuad {
    coeffs: Coeffs,
    d: i64,
    sqrt_scale: i64,
    field_disc: i64,
    floor_beta: i64,
    is_unit: bool,
    parry: ParryData,
    orbit: Vec<QuadElem>,
    orbit_ascending: Vec<usize>,
}

impl PisotQuad {
    /// Validates beta^2 = a*beta + b as a quadratic Pisot number and
    /// computes its Parry data and orbit of 1.
    pub fn new(a: i64, b: i64) -> Result<Self, Error> {
        if a.abs() > MAX_COEFF || b.abs() > MAX_COEFF {
            return Err(Error::CoefficientTooLarge);
        }
        if b == 0 {
            return Err(Error::DegreeOne);
        }
        let coeffs = Coeffs { a, b };
        let disc = coeffs.disc();
        if disc >= 0 {
            let s = BigInt::from(disc).sqrt();
            if &s * &s == BigInt::from(disc) {
                return Err(Error::Reducible { a, b });
            }
        }
        if disc < 0 {
            return Err(Error::NotPisot { a, b });
        }
        // beta > 1  <=>  a >= 2 or a + b > 1
        // |beta_2| < 1  <=>  a >= -1, b <= a, and (a <= 2 or a + b > 1)
        let dominant = a >= 2 || a + b > 1;
        let conj_small = a >= -1 && b <= a && (a <= 2 || a + b > 1);
        if !(dominant && conj_small) {
            return Err(Error::NotPisot { a, b });
        }
        let floor_beta = if b >= 1 { a } else { a - 1 };
        let (d, sqrt_scale) = squarefree_part(disc);
        let field_disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let parry = compute_parry(coeffs, floor_beta);
        let orbit = compute_orbit(coeffs, floor_beta, &parry);
        let mut orbit_ascending: Vec<usize> = (1..=parry.n()).collect();
        orbit_ascending.sort_by(|&x, &y| orbit[x - 1].cmp_same_ctx(&orbit[y - 1]));
        Ok(PisotQuad {
            coeffs,
            d,
            sqrt_scale,
            field_disc,
            floor_beta,
            is_unit: b.abs() == 1,
            parry,
            orbit,
            orbit_ascending,
        })
    }

    pub fn coeffs(&self) -> Coeffs {
        self.coeffs
    }

    pub fn a(&self) -> i64 {
        self.coeffs.a
    }

    pub fn b(&self) -> i64 {
        self.coeffs.b
    }

    /// N(beta) = -b.
    pub fn norm_beta(&self) -> i64 {
        -self.coeffs.b
    }

    /// Square-free d with Q(beta) = Q(sqrt(d)).
    pub fn d(&self) -> i64 {
        self.d
    }

    /// s with a^2 + 4b = s^2 d.
    pub fn sqrt_scale(&self) -> i64 {
        self.sqrt_scale
    }

    /// Field discriminant: d if d = 1 mod 4, else 4d.
    pub fn field_disc(&self) -> i64 {
        self.field_disc
    }

    pub fn is_unit(&self) -> bool {
        self.is_unit
    }

    /// floor(beta) = ceil(beta) - 1, the largest digit.
    pub fn digit_max(&self) -> i64 {
        self.floor_beta
    }

    /// Sign of the conjugate root beta_2 = a - beta (negative iff b > 0).
    pub fn conj_negative(&self) -> bool {
        self.coeffs.b > 0
    }

    pub fn parry(&self) -> &ParryData {
        &self.parry
    }

    /// Number of admissibility-graph nodes (preperiod + period of d*).
    pub fn n(&self) -> usize {
        self.parry.n()
    }

    /// Exact orbit values T^0(1), ..., T^{n-1}(1).
    pub fn orbit(&self) -> &[QuadElem] {
        &self.orbit
    }

    /// T^{(node-1)}(1) for a node of the alphabet {1..n}.
    pub fn orbit_value(&self, node: usize) -> &QuadElem {
        &self.orbit[node - 1]
    }

    /// Nodes a_1..a_n relabelled so T^{(a_1-1)}(1) < ... < T^{(a_n-1)}(1) = 1.
    pub fn orbit_ascending(&self) -> &[usize] {
        &self.orbit_ascending
    }

    pub fn elem(&self, u: Rational, v: Rational) -> QuadElem {
        QuadElem::new(u, v, self.coeffs)
    }

    pub fn beta(&self) -> QuadElem {
        QuadElem::beta(self.coeffs)
    }

    pub fn zero(&self) -> QuadElem {
        QuadElem::zero(self.coeffs)
    }

    pub fn one(&self) -> QuadElem {
        QuadElem::one(self.coeffs)
    }

    pub fn from_int(&self, n: i64) -> QuadElem {
        QuadElem::from_int(n, self.coeffs)
    }

    pub fn from_rational(&self, r: &Rational) -> QuadElem {
        QuadElem::from_rational(r.clone(), self.coeffs)
    }

    /// |beta_2| as an exact element of the field.
    pub fn conj_abs(&self) -> QuadElem {
        let b2 = self.beta().conj();
        if self.conj_negative() {
            -b2
        } else {
            b2
        }
    }
}

fn squarefree_part(n: i64) -> (i64, i64) {
    debug_assert!(n > 0);
    let mut rest = n;
    let mut d = 1i64;
    let mut s = 1i64;
    let mut p = 2i64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            s *= p.pow((e / 2) as u32);
            if e % 2 == 1 {
                d *= p;
            }
        }
        p += 1;
    }
    (d * rest, s)
}

/// Greedy expansion of 1 with exact cycle detection. The first digit is
/// floor(beta); subsequent digits apply T_beta to the remainder.
fn compute_parry(ctx: Coeffs, floor_beta: i64) -> ParryData {
    let mut digits: Vec<i64> = vec![floor_beta];
    let mut r = QuadElem::beta(ctx) - QuadElem::from_int(floor_beta, ctx);
    let mut seen: HashMap<QuadElem, usize> = HashMap::new();
    loop {
        if r.is_zero() {
            // simple Parry: d_beta(1) = digits, d* = (t_1..t_{k-1}(t_k - 1))^inf
            let mut t = digits.clone();
            let last = t.last_mut().expect("digits non-empty");
            *last -= 1;
            return ParryData {
                d_one: DOne::Finite(digits),
                m: 0,
                t,
            };
        }
        if let Some(&j) = seen.get(&r) {
            // digits = d_1 .. d_k with remainder after d_i stored at index i
            let m = j;
            let pre = digits[..m].to_vec();
            let per = digits[m..].to_vec();
            let t = digits.clone();
            return ParryData {
                d_one: DOne::Eventually { pre, per },
                m,
                t,
            };
        }
        seen.insert(r.clone(), digits.len());
        let br = r.times_beta();
        let digit = br.floor();
        let digit_i64 = digit.to_i64().expect("digit fits in i64");
        r = br - QuadElem::from_rational(Rational::from_integer(digit), ctx);
        digits.push(digit_i64);
    }
}

fn compute_orbit(ctx: Coeffs, floor_beta: i64, parry: &ParryData) -> Vec<QuadElem> {
    let n = parry.n();
    let mut orbit = Vec::with_capacity(n);
    orbit.push(QuadElem::one(ctx));
    let mut r = QuadElem::beta(ctx) - QuadElem::from_int(floor_beta, ctx);
    for _ in 1..n {
        orbit.push(r.clone());
        let br = r.times_beta();
        let digit = br.floor();
        r = br - QuadElem::new(Rational::from_integer(digit), Rational::zero(), ctx);
    }
    orbit
}
