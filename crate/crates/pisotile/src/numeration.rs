//! The beta-transformation engine: greedy expansions, admissibility against
//! d*_beta(1), exact pure-periodicity orbits, and the arithmetic criteria
//! (finiteness property, denominator obstruction, density conditions).
//!
//! Orbits of rationals are detected by hashing exact states. Small rational
//! inputs take an integer fast path: a state (U + V*beta)/q keeps a fixed
//! denominator under T_beta, so the whole orbit runs on i128 coordinate
//! pairs with exact sign tests.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::error::Error;
use crate::qfield::{PisotQuad, QuadElem, Rational};

/// Default guard on orbit length; inputs in Q(beta) always cycle long before
/// this for sane denominators.
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// A beta-expansion split into integer digits (most significant first),
/// fractional preperiod and fractional period. An empty period means the
/// expansion is finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub integer: Vec<i64>,
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

impl Expansion {
    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.integer.is_empty() && self.preperiod.is_empty() && !self.period.is_empty()
    }
}

/// One step of T_beta: x in [0,1) maps to (floor(beta x), beta x - floor).
pub fn t_beta_step(x: &QuadElem, ctx: &PisotQuad) -> Result<(i64, QuadElem), Error> {
    if x.sign() < 0 || x.cmp_int(1) != Ordering::Less {
        return Err(Error::OutOfRange { what: "T_beta needs x in [0,1)" });
    }
    let bx = x.times_beta();
    let digit = bx.floor();
    let d = digit.to_i64().expect("digit bounded by beta");
    let next = bx - ctx.from_rational(&Rational::from_integer(digit));
    Ok((d, next))
}

enum OrbitEnd {
    Zero,
    Cycle { enters: usize, len: usize },
}

/// Exact greedy orbit of x in [0,1): digits plus how the orbit terminates.
fn orbit_digits(
    x: &QuadElem,
    ctx: &PisotQuad,
    cap: usize,
) -> Result<(Vec<i64>, OrbitEnd), Error> {
    if let Some(fast) = FastOrbit::try_new(x, ctx) {
        return fast.run(cap);
    }
    let mut digits = Vec::new();
    let mut seen: HashMap<QuadElem, usize> = HashMap::new();
    let mut state = x.clone();
    loop {
        if state.is_zero() {
            return Ok((digits, OrbitEnd::Zero));
        }
        if let Some(&j) = seen.get(&state) {
            let len = digits.len() - j;
            return Ok((digits, OrbitEnd::Cycle { enters: j, len }));
        }
        if digits.len() >= cap {
            return Err(Error::IterationCap { cap });
        }
        seen.insert(state.clone(), digits.len());
        let (d, next) = t_beta_step(&state, ctx)?;
        digits.push(d);
        state = next;
    }
}

/// Integer fast path for rational starting points with small denominator.
#[derive(Clone)]
struct FastOrbit {
    a: i128,
    b: i128,
    q: i128,
    u: i128,
    v: i128,
    beta_f: f64,
}

const FAST_COORD_LIMIT: i128 = 1 << 40;
const FAST_DENOM_LIMIT: i128 = 1 << 30;

impl FastOrbit {
    fn try_new(x: &QuadElem, ctx: &PisotQuad) -> Option<FastOrbit> {
        if !x.is_rational() {
            return None;
        }
        let q = x.u().denom().to_i128()?;
        let u = x.u().numer().to_i128()?;
        if q >= FAST_DENOM_LIMIT || u.abs() >= FAST_COORD_LIMIT {
            return None;
        }
        Some(FastOrbit {
            a: ctx.a() as i128,
            b: ctx.b() as i128,
            q,
            u,
            v: 0,
            beta_f: ctx.beta().to_f64(),
        })
    }

    /// Sign of X + Y*beta, exact, for |X|, |Y| < 2^40.
    fn sign(&self, x: i128, y: i128) -> i8 {
        if y == 0 {
            return x.signum() as i8;
        }
        // value = y * (beta - r), r = -x/y
        let two_x_plus_ay = 2 * x + self.a * y;
        let r_le_half_a = if y > 0 { two_x_plus_ay >= 0 } else { two_x_plus_ay <= 0 };
        let beta_minus_r: i8 = if r_le_half_a {
            1
        } else {
            // sign of f(r) = (x^2 + a x y - b y^2) / y^2
            let f = x * x + self.a * x * y - self.b * y * y;
            -(f.signum() as i8)
        };
        (y.signum() as i8) * beta_minus_r
    }

    /// floor((A + B*beta)/q) for the current q.
    fn floor(&self, aa: i128, bb: i128) -> i128 {
        let est = (aa as f64 + bb as f64 * self.beta_f) / self.q as f64;
        let mut k = est.floor() as i128;
        // fix up: need A - k q + B beta >= 0 > A - (k+1) q + B beta
        while self.sign(aa - (k + 1) * self.q, bb) >= 0 {
            k += 1;
        }
        while self.sign(aa - k * self.q, bb) < 0 {
            k -= 1;
        }
        k
    }

    /// Applies T_beta once to the state (u + v*beta)/q; returns the digit.
    fn step(&mut self) -> Result<i64, Error> {
        // beta * x = (Vb + (U + Va) beta)/q
        let aa = self.v * self.b;
        let bb = self.u + self.v * self.a;
        if aa.abs() >= FAST_COORD_LIMIT || bb.abs() >= FAST_COORD_LIMIT {
            return Err(Error::IterationCap { cap: 0 }); // unreachable for valid inputs
        }
        let k = self.floor(aa, bb);
        self.u = aa - k * self.q;
        self.v = bb;
        Ok(k as i64)
    }

    fn run(mut self, cap: usize) -> Result<(Vec<i64>, OrbitEnd), Error> {
        let mut digits = Vec::new();
        let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
        loop {
            if self.u == 0 && self.v == 0 {
                return Ok((digits, OrbitEnd::Zero));
            }
            if let Some(&j) = seen.get(&(self.u, self.v)) {
                let len = digits.len() - j;
                return Ok((digits, OrbitEnd::Cycle { enters: j, len }));
            }
            if digits.len() >= cap {
                return Err(Error::IterationCap { cap });
            }
            seen.insert((self.u, self.v), digits.len());
            let k = self.step()?;
            digits.push(k);
        }
    }

    /// Brent cycle detection, allocation-free: finds the cycle length and
    /// reports whether the starting state itself recurs.
    fn pure_period(&self, cap: usize) -> Result<(bool, Option<usize>), Error> {
        let start = (self.u, self.v);
        let mut tortoise = start;
        let mut hare = self.clone();
        hare_step(&mut hare)?;
        let mut power = 1usize;
        let mut lam = 1usize;
        let mut total = 0usize;
        while tortoise != (hare.u, hare.v) {
            if power == lam {
                tortoise = (hare.u, hare.v);
                power *= 2;
                lam = 0;
            }
            hare_step(&mut hare)?;
            lam += 1;
            total += 1;
            if total > 3 * cap {
                return Err(Error::IterationCap { cap });
            }
        }
        // purely periodic iff T^lam returns to the start
        let mut probe = self.clone();
        for _ in 0..lam {
            hare_step(&mut probe)?;
        }
        if (probe.u, probe.v) == start {
            Ok((true, Some(lam)))
        } else {
            Ok((false, None))
        }
    }
}

fn hare_step(orbit: &mut FastOrbit) -> Result<(), Error> {
    if orbit.u == 0 && orbit.v == 0 {
        return Ok(()); // zero is a fixed point of T_beta
    }
    orbit.step()?;
    Ok(())
}

/// Greedy expansion of any x >= 0 in Q(beta). The integer part is obtained
/// by rescaling (repeated division by beta), the fractional part by exact
/// T_beta iteration with cycle detection.
pub fn expand(x: &QuadElem, ctx: &PisotQuad) -> Result<Expansion, Error> {
    expand_with_cap(x, ctx, DEFAULT_ORBIT_CAP)
}

pub fn expand_with_cap(x: &QuadElem, ctx: &PisotQuad, cap: usize) -> Result<Expansion, Error> {
    if x.sign() < 0 {
        return Err(Error::NegativeInput);
    }
    // smallest p with beta^-p x < 1
    let mut p = 0usize;
    let mut y = x.clone();
    while y.cmp_int(1) != Ordering::Less {
        y = y.div_beta();
        p += 1;
    }
    let (mut digits, end) = orbit_digits(&y, ctx, cap)?;
    match end {
        OrbitEnd::Zero => {
            while digits.len() < p {
                digits.push(0);
            }
            let frac = digits.split_off(p);
            Ok(Expansion { integer: digits, preperiod: frac, period: Vec::new() })
        }
        OrbitEnd::Cycle { enters, len } => {
            let cycle: Vec<i64> = digits[enters..enters + len].to_vec();
            if p <= enters {
                let integer = digits[..p].to_vec();
                let preperiod = digits[p..enters].to_vec();
                Ok(Expansion { integer, preperiod, period: cycle })
            } else {
                // the integer part ate into the cycle: rotate
                let integer = digits[..p].to_vec();
                let phase = (p - enters) % len;
                let mut period = cycle[phase..].to_vec();
                period.extend_from_slice(&cycle[..phase]);
                Ok(Expansion { integer, preperiod: Vec::new(), period })
            }
        }
    }
}

/// Expansion of a non-negative rational.
pub fn expand_rational(x: &Rational, ctx: &PisotQuad) -> Result<Expansion, Error> {
    expand(&ctx.from_rational(x), ctx)
}

/// The first `count` greedy digits of x in [0,1), streamed without cycle
/// detection (constant memory), for probing very long orbits.
pub fn greedy_digits(x: &QuadElem, ctx: &PisotQuad, count: usize) -> Result<Vec<i64>, Error> {
    if x.sign() < 0 || x.cmp_int(1) != Ordering::Less {
        return Err(Error::OutOfRange { what: "greedy_digits needs x in [0,1)" });
    }
    let mut out = Vec::with_capacity(count);
    if let Some(mut fast) = FastOrbit::try_new(x, ctx) {
        for _ in 0..count {
            if fast.u == 0 && fast.v == 0 {
                break;
            }
            out.push(fast.step()?);
        }
        return Ok(out);
    }
    let mut state = x.clone();
    for _ in 0..count {
        if state.is_zero() {
            break;
        }
        let (d, next) = t_beta_step(&state, ctx)?;
        out.push(d);
        state = next;
    }
    Ok(out)
}

/// Exact pure-periodicity oracle for x in [0,1): iterates T_beta, hashing
/// visited states, and reports whether x itself recurs together with the
/// cycle length.
pub fn is_purely_periodic(x: &QuadElem, ctx: &PisotQuad) -> Result<(bool, Option<usize>), Error> {
    is_purely_periodic_with_cap(x, ctx, DEFAULT_ORBIT_CAP)
}

pub fn is_purely_periodic_with_cap(
    x: &QuadElem,
    ctx: &PisotQuad,
    cap: usize,
) -> Result<(bool, Option<usize>), Error> {
    if x.sign() < 0 || x.cmp_int(1) != Ordering::Less {
        return Err(Error::OutOfRange { what: "pure periodicity is defined on [0,1)" });
    }
    if x.is_zero() {
        // 0 = .(0)^inf recurs immediately
        return Ok((true, Some(1)));
    }
    if let Some(fast) = FastOrbit::try_new(x, ctx) {
        return fast.pure_period(cap);
    }
    let (_, end) = orbit_digits(x, ctx, cap)?;
    match end {
        OrbitEnd::Zero => Ok((false, None)),
        OrbitEnd::Cycle { enters, len } => {
            if enters == 0 {
                Ok((true, Some(len)))
            } else {
                Ok((false, None))
            }
        }
    }
}

pub fn is_purely_periodic_rational(
    x: &Rational,
    ctx: &PisotQuad,
) -> Result<(bool, Option<usize>), Error> {
    is_purely_periodic(&ctx.from_rational(x), ctx)
}

/// Deterministic transition of the admissibility automaton derived from the
/// Parry digits t_1..t_n: from node a, digits below t_a lead to node 1, the
/// digit t_a leads to a+1 (wrapping from n to m+1), larger digits reject.
pub fn adm_delta(ctx: &PisotQuad, node: usize, digit: i64) -> Option<usize> {
    let parry = ctx.parry();
    let n = parry.n();
    debug_assert!((1..=n).contains(&node));
    let t = parry.t[node - 1];
    if digit < 0 {
        None
    } else if digit < t {
        Some(1)
    } else if digit == t {
        if node < n {
            Some(node + 1)
        } else {
            Some(parry.m + 1)
        }
    } else {
        None
    }
}

/// Runs a word through the admissibility graph from node 1; the terminal
/// node classifies w in L_beta^(a). `None` is reject.
pub fn language_node(w: &[i64], ctx: &PisotQuad) -> Option<usize> {
    let mut node = 1usize;
    for &d in w {
        node = adm_delta(ctx, node, d)?;
    }
    Some(node)
}

/// Strict lexicographic comparison of two eventually periodic digit
/// sequences pre1.per1^inf and pre2.per2^inf, decided on a finite horizon.
fn cmp_lex_eventually_periodic(
    pre1: &[i64],
    per1: &[i64],
    pre2: &[i64],
    per2: &[i64],
) -> Ordering {
    let l1 = per1.len().max(1);
    let l2 = per2.len().max(1);
    let horizon = pre1.len().max(pre2.len()) + 2 * l1.lcm(&l2);
    let digit = |pre: &[i64], per: &[i64], i: usize| -> i64 {
        if i < pre.len() {
            pre[i]
        } else if per.is_empty() {
            0
        } else {
            per[(i - pre.len()) % per.len()]
        }
    };
    for i in 0..horizon {
        let d1 = digit(pre1, per1, i);
        let d2 = digit(pre2, per2, i);
        match d1.cmp(&d2) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn check_digits(w: &[i64], ctx: &PisotQuad) -> Result<(), Error> {
    let max = ctx.digit_max();
    for &d in w {
        if d < 0 || d > max {
            return Err(Error::DigitOutOfRange { digit: d, max });
        }
    }
    Ok(())
}

/// Admissibility of a finite word: every shift of w.0^inf must be strictly
/// below d*_beta(1).
pub fn is_admissible(w: &[i64], ctx: &PisotQuad) -> Result<bool, Error> {
    check_digits(w, ctx)?;
    Ok((0..w.len()).all(|k| shift_below_dstar(&w[k..], &[], ctx)))
}

/// Admissibility of an eventually periodic sequence pre.per^inf.
pub fn is_admissible_tail(pre: &[i64], per: &[i64], ctx: &PisotQuad) -> Result<bool, Error> {
    check_digits(pre, ctx)?;
    check_digits(per, ctx)?;
    let total = pre.len() + per.len();
    for k in 0..total.max(1) {
        let (p, s): (Vec<i64>, Vec<i64>) = if k <= pre.len() {
            (pre[k..].to_vec(), per.to_vec())
        } else {
            let phase = (k - pre.len()) % per.len().max(1);
            let mut rot = per[phase..].to_vec();
            rot.extend_from_slice(&per[..phase]);
            (Vec::new(), rot)
        };
        if !shift_below_dstar(&p, &s, ctx) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn shift_below_dstar(pre: &[i64], per: &[i64], ctx: &PisotQuad) -> bool {
    let parry = ctx.parry();
    cmp_lex_eventually_periodic(pre, per, parry.d_star_pre(), parry.d_star_period())
        == Ordering::Less
}

/// Frougny-Solomyak finiteness criterion for quadratic Pisot numbers:
/// a >= b >= 1, or a >= 3 and -a+2 <= b <= -1.
pub fn satisfies_f(ctx: &PisotQuad) -> bool {
    let (a, b) = (ctx.a(), ctx.b());
    (a >= b && b >= 1) || (a >= 3 && -a + 2 <= b && b <= -1)
}

/// Blocking criterion: gcd(q, N(beta)) > 1 makes pure periodicity of p/q
/// impossible.
pub fn lem_pp_blocks(x: &Rational, ctx: &PisotQuad) -> Result<bool, Error> {
    if x.is_negative() || x >= &Rational::from_integer(BigInt::from(1)) {
        return Err(Error::OutOfRange { what: "lem_pp_blocks needs x in [0,1)" });
    }
    let norm = BigInt::from(ctx.norm_beta().abs());
    Ok(x.denom().gcd(&norm) > BigInt::from(1))
}

/// How a rational prime behaves in Q(sqrt(d)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeClass {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub splitting: Splitting,
}

/// The four exactness conditions for the non-unit embedding, evaluated
/// exactly, plus the split/inert/ramified classification of every prime
/// dividing N(beta).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub b_squarefree: bool,
    pub b_coprime_disc: bool,
    pub qr_all_odd_primes: bool,
    pub mod8_ok: bool,
    pub overall: bool,
    pub per_prime: Vec<PrimeClass>,
}

pub fn density_report(ctx: &PisotQuad) -> DensityReport {
    if ctx.is_unit() {
        return DensityReport {
            b_squarefree: true,
            b_coprime_disc: true,
            qr_all_odd_primes: true,
            mod8_ok: true,
            overall: true,
            per_prime: Vec::new(),
        };
    }
    let b_abs = ctx.b().unsigned_abs();
    let d = ctx.d();
    let factors = factorize(b_abs);
    let b_squarefree = factors.iter().all(|&(_, e)| e == 1);
    let b_coprime_disc = gcd_u64(b_abs, ctx.field_disc().unsigned_abs()) == 1;
    let mut qr_all_odd_primes = true;
    let mut mod8_ok = true;
    let mut per_prime = Vec::new();
    for &(p, _) in &factors {
        let class = classify_prime(p, d);
        if p % 2 == 1 && legendre(d, p) != 1 {
            qr_all_odd_primes = false;
        }
        if p == 2 && d.rem_euclid(8) != 1 {
            mod8_ok = false;
        }
        per_prime.push(class);
    }
    let overall = b_squarefree && b_coprime_disc && qr_all_odd_primes && mod8_ok;
    DensityReport { b_squarefree, b_coprime_disc, qr_all_odd_primes, mod8_ok, overall, per_prime }
}

fn classify_prime(p: u64, d: i64) -> PrimeClass {
    let splitting = if p == 2 {
        match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    } else if d.rem_euclid(p as i64) == 0 {
        Splitting::Ramified
    } else {
        match legendre(d, p) {
            1 => Splitting::Split,
            _ => Splitting::Inert,
        }
    };
    let (e, f) = match splitting {
        Splitting::Split => (1, 1),
        Splitting::Inert => (1, 2),
        Splitting::Ramified => (2, 1),
    };
    PrimeClass { p, e, f, splitting }
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Legendre symbol (d/p) for odd prime p, via Euler's criterion.
pub(crate) fn legendre(d: i64, p: u64) -> i32 {
    let dm = d.rem_euclid(p as i64) as u64;
    if dm == 0 {
        return 0;
    }
    let r = modpow(dm, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

fn modpow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}
