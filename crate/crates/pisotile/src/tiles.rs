//! Embedding of beta-integers into R x Z_p for the split non-unit case.
//!
//! The real coordinate is the Galois conjugate; the p-adic coordinate is
//! evaluation at the Hensel-lifted root r = 0 mod p of X^2 - aX - b. The
//! Monna map reverses base-p digits into [0,1) for plotting. Points are
//! enumerated by walking the admissibility graph, so a depth-N cloud is
//! exactly the set of admissible words of length N.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::graphs::AdmGraph;
use crate::numeration::{density_report, factorize, Splitting};
use crate::qfield::{PisotQuad, QuadElem, Rational};
use crate::text::format_digit_word;

/// A p-adic evaluation context: the unique root of X^2 - aX - b congruent
/// to 0 mod p, lifted to modulus p^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicCtx {
    pub p: u64,
    pub k: u32,
    pub modulus: BigInt,
    pub root: BigInt,
}

/// Hensel-lifts the root of X^2 - aX - b that vanishes mod p. Requires
/// p | N(beta) and that p splits with e = f = 1.
pub fn hensel_root(ctx: &PisotQuad, p: u64, k: u32) -> Result<PadicCtx, Error> {
    if k == 0 {
        return Err(Error::OutOfRange { what: "p-adic precision must be at least 1" });
    }
    let b_abs = ctx.b().unsigned_abs();
    if p == 0 || b_abs % p != 0 {
        return Err(Error::NotDividingNorm { prime: p });
    }
    let report = density_report(ctx);
    let class = report
        .per_prime
        .iter()
        .find(|c| c.p == p)
        .ok_or(Error::NotDividingNorm { prime: p })?;
    if class.splitting != Splitting::Split {
        return Err(Error::NonSplitPrime { prime: p });
    }
    let a = BigInt::from(ctx.a());
    let b = BigInt::from(ctx.b());
    let pb = BigInt::from(p);
    // f(0) = -b = 0 mod p; f'(0) = -a is a unit mod p (else p would ramify)
    let mut modulus = pb.clone();
    let mut root = BigInt::zero();
    for _ in 1..k {
        let next_mod = &modulus * &pb;
        // solve f(root + t*modulus) = 0 mod next_mod for t in 0..p
        let f = (&root * &root - &a * &root - &b).mod_floor(&next_mod);
        let fq = (&f / &modulus).mod_floor(&pb);
        let fprime = (BigInt::from(2) * &root - &a).mod_floor(&pb);
        let inv = mod_inverse(&fprime, &pb).expect("f' is a unit mod p");
        let t = (-fq * inv).mod_floor(&pb);
        root += t * &modulus;
        modulus = next_mod;
    }
    root = root.mod_floor(&modulus);
    debug_assert!((&root * &root - &a * &root - &b).mod_floor(&modulus).is_zero());
    Ok(PadicCtx { p, k, modulus, root })
}

fn mod_inverse(x: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = x.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Evaluation phi_f(u + v*beta) = u + v*root mod p^k. Denominators of u, v
/// must be invertible mod p^k.
pub fn phi_f(x: &QuadElem, pc: &PadicCtx) -> Result<BigInt, Error> {
    let to_residue = |r: &Rational| -> Result<BigInt, Error> {
        let den = r.denom().mod_floor(&pc.modulus);
        let inv = mod_inverse(&den, &pc.modulus)
            .ok_or(Error::DenominatorNotInvertible { prime: pc.p })?;
        Ok((r.numer().mod_floor(&pc.modulus) * inv).mod_floor(&pc.modulus))
    };
    let u = to_residue(x.u())?;
    let v = to_residue(x.v())?;
    Ok((u + v * &pc.root).mod_floor(&pc.modulus))
}

/// Monna map: the residue sum a_i p^i (i < k) goes to sum a_i p^{-i-1},
/// a digit reversal landing in [0, 1).
pub fn monna(residue: &BigInt, pc: &PadicCtx) -> Rational {
    debug_assert!(!residue.is_negative() && residue < &pc.modulus);
    let p = BigInt::from(pc.p);
    let mut rest = residue.clone();
    let mut num = BigInt::zero();
    for _ in 0..pc.k {
        let (q, digit) = rest.div_rem(&p);
        num = num * &p + digit;
        rest = q;
    }
    Rational::new(num, pc.modulus.clone())
}

/// One embedded beta-integer (or shifted point of an x-tile).
#[derive(Clone, Debug)]
pub struct TilePoint {
    /// Terminal node of the admissible word in the alphabet {1..n}.
    pub subtile: usize,
    /// Galois-conjugate coordinate, rounded from the exact value.
    pub real: f64,
    /// Monna coordinate of the residue, an exact fraction in [0,1).
    pub monna: Rational,
    /// Residue mod p^k.
    pub residue: BigInt,
    /// The admissible word, most significant digit first.
    pub word: Vec<i64>,
}

/// Enumerates the depth-N tile cloud in word-lexicographic order, streaming
/// each point to `sink`. With a shift x, points of the x-tile are emitted
/// instead: value + x over subtiles a with x < T^(a-1)(1).
pub fn for_each_tile_point<F: FnMut(TilePoint)>(
    ctx: &PisotQuad,
    pc: &PadicCtx,
    depth: usize,
    x_shift: Option<&QuadElem>,
    sink: F,
) -> Result<(), Error> {
    for_each_tile_point_from(ctx, pc, depth, x_shift, &[], sink)
}

/// Restriction of the enumeration to words starting with `prefix`; the
/// parallel driver partitions by first digit and merges in digit order.
pub fn for_each_tile_point_from<F: FnMut(TilePoint)>(
    ctx: &PisotQuad,
    pc: &PadicCtx,
    depth: usize,
    x_shift: Option<&QuadElem>,
    prefix: &[i64],
    mut sink: F,
) -> Result<(), Error> {
    let shift = match x_shift {
        Some(x) if !x.is_zero() => {
            let conj = x.conj();
            let residue = phi_f(x, pc)?;
            Some((conj, residue))
        }
        _ => None,
    };
    let adm = AdmGraph::new(ctx);
    let n = ctx.n();
    // allowed terminal nodes under a shift
    let allowed: Vec<bool> = (1..=n)
        .map(|a| match x_shift {
            Some(x) if !x.is_zero() => {
                x.cmp_same_ctx(ctx.orbit_value(a)) == Ordering::Less
            }
            _ => true,
        })
        .collect();
    let beta2 = ctx.beta().conj();
    let root = pc.root.mod_floor(&pc.modulus);

    // DFS emitting exactly the words of length `depth`
    struct Frame {
        node: usize,
        digit: i64,
    }
    if prefix.len() > depth {
        return Ok(());
    }
    let exhausted = ctx.digit_max() + 1;
    let mut word: Vec<i64> = Vec::with_capacity(depth);
    // conj value and residue of the consumed digits, updated incrementally:
    // value_new = value_old * beta2 + digit, residue likewise with root
    let mut conj_stack: Vec<QuadElem> = vec![QuadElem::zero(ctx.coeffs())];
    let mut res_stack: Vec<BigInt> = vec![BigInt::zero()];
    let mut stack: Vec<Frame> = Vec::new();
    // seed the forced prefix; its frames are marked exhausted so the DFS
    // never enumerates their siblings
    {
        let mut node = 1usize;
        stack.push(Frame { node, digit: if prefix.is_empty() { 0 } else { exhausted } });
        for (i, &d) in prefix.iter().enumerate() {
            match adm.delta(node, d) {
                Some(next) => {
                    let conj_next = conj_stack.last().unwrap() * &beta2
                        + QuadElem::from_int(d, ctx.coeffs());
                    let res_next = (res_stack.last().unwrap() * &root + BigInt::from(d))
                        .mod_floor(&pc.modulus);
                    word.push(d);
                    conj_stack.push(conj_next);
                    res_stack.push(res_next);
                    node = next;
                    let last = i + 1 == prefix.len();
                    stack.push(Frame { node, digit: if last { 0 } else { exhausted } });
                }
                None => return Ok(()),
            }
        }
    }

    while let Some(frame) = stack.last_mut() {
        if word.len() == depth {
            // emit leaf
            let node = frame.node;
            if allowed[node - 1] {
                let (conj_val, residue) = match &shift {
                    Some((cshift, rshift)) => (
                        conj_stack.last().unwrap() + cshift,
                        (res_stack.last().unwrap() + rshift).mod_floor(&pc.modulus),
                    ),
                    None => (
                        conj_stack.last().unwrap().clone(),
                        res_stack.last().unwrap().clone(),
                    ),
                };
                sink(TilePoint {
                    subtile: node,
                    real: conj_val.to_f64(),
                    monna: monna(&residue, pc),
                    residue,
                    word: word.clone(),
                });
            }
            stack.pop();
            word.pop();
            conj_stack.pop();
            res_stack.pop();
            continue;
        }
        let node = frame.node;
        let digit = frame.digit;
        match adm.delta(node, digit) {
            Some(next) => {
                frame.digit += 1;
                let conj_next = conj_stack.last().unwrap() * &beta2
                    + QuadElem::from_int(digit, ctx.coeffs());
                let res_next = (res_stack.last().unwrap() * &root + BigInt::from(digit))
                    .mod_floor(&pc.modulus);
                word.push(digit);
                conj_stack.push(conj_next);
                res_stack.push(res_next);
                stack.push(Frame { node: next, digit: 0 });
            }
            None => {
                stack.pop();
                word.pop();
                conj_stack.pop();
                res_stack.pop();
            }
        }
    }
    Ok(())
}

/// Collects the depth-N cloud into memory.
pub fn tile_points(
    ctx: &PisotQuad,
    pc: &PadicCtx,
    depth: usize,
    x_shift: Option<&QuadElem>,
) -> Result<Vec<TilePoint>, Error> {
    tile_points_with_prefix(ctx, pc, depth, x_shift, &[])
}

/// Collects the cloud restricted to words starting with `prefix`.
pub fn tile_points_with_prefix(
    ctx: &PisotQuad,
    pc: &PadicCtx,
    depth: usize,
    x_shift: Option<&QuadElem>,
    prefix: &[i64],
) -> Result<Vec<TilePoint>, Error> {
    let mut out = Vec::new();
    for_each_tile_point_from(ctx, pc, depth, x_shift, prefix, |p| out.push(p))?;
    Ok(out)
}

/// CSV schema: `subtile,real,monna,residue,word`; real with 12 significant
/// digits, monna as an exact fraction, word quoted comma-separated digits.
pub fn write_csv<W: Write>(points: &[TilePoint], out: &mut W) -> Result<(), Error> {
    writeln!(out, "subtile,real,monna,residue,word")?;
    for pt in points {
        writeln!(
            out,
            "{},{},{},{},\"{}\"",
            pt.subtile,
            format_real(pt.real),
            crate::text::format_rational(&pt.monna),
            pt.residue,
            format_digit_word(&pt.word)
        )?;
    }
    Ok(())
}

fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:.12e}");
    // normalize "1.234e0" exponents into plain decimal when small
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            if (-4..12).contains(&e) {
                let val: f64 = s.parse().unwrap_or(x);
                let prec = (12 - 1 - e).max(0) as usize;
                let mut t = format!("{val:.prec$}");
                if t.contains('.') {
                    while t.ends_with('0') {
                        t.pop();
                    }
                    if t.ends_with('.') {
                        t.pop();
                    }
                }
                t
            } else {
                format!("{mant}e{e}")
            }
        }
        None => s,
    }
}

/// Residues mod p^k hit by depth-N points whose conjugate coordinate lies
/// in (-window, window). Enumerates words last-digit-first over the
/// reversed admissibility graph so the window prunes early; the walk runs
/// on exact integer coordinate pairs in the basis (1, beta).
pub fn stripe_residues(
    ctx: &PisotQuad,
    pc: &PadicCtx,
    depth: usize,
    window: &Rational,
) -> Result<BTreeSet<u64>, Error> {
    let adm = AdmGraph::new(ctx);
    let n = ctx.n();
    let rev = adm.reversed_digit_graph();
    // shortest path lengths from node 1 in the forward graph
    let mut dist = vec![usize::MAX; n + 1];
    dist[1] = 0;
    let mut frontier = vec![1usize];
    while let Some(v) = frontier.pop() {
        for &(from, _, to) in adm.edges().iter() {
            if from == v && dist[to] > dist[v] + 1 {
                dist[to] = dist[v] + 1;
                frontier.push(to);
            }
        }
    }
    let (a, b) = (ctx.a(), ctx.b());
    let beta2 = ctx.beta().conj();
    let to_pair = |x: &QuadElem| -> Option<(i128, i128)> {
        let (k, l) = x.integral_pair()?;
        Some((k.to_i128()?, l.to_i128()?))
    };
    // beta2^j and |beta2|^j as integer pairs in the basis (1, beta)
    let mut pow_pairs: Vec<(i128, i128)> = Vec::with_capacity(depth);
    let mut pow = ctx.one();
    for _ in 0..depth {
        pow_pairs
            .push(to_pair(&pow).ok_or(Error::OutOfRange { what: "stripe depth too large" })?);
        pow = &pow * &beta2;
    }
    // scale everything by the window denominator: exact comparisons become
    // integer sign tests of (C1 - D*A) + (C2 - D*B)*beta
    let d_big = window.denom().clone();
    let d_scale = d_big.to_i128().ok_or(Error::OutOfRange { what: "window denominator" })?;
    let win_num = window.numer().to_i128().ok_or(Error::OutOfRange { what: "window numerator" })?;
    // bound_pairs[j] = D * (window + digit_max * sum_{i=j}^{depth-1} |beta2|^i)
    let digit_rat = Rational::from_integer(ctx.digit_max().into());
    let mut bound_pairs: Vec<(i128, i128)> = vec![(win_num, 0); depth + 1];
    {
        let mut tail = ctx.zero();
        let mut abs_pow = ctx.one();
        let mut abs_pows = Vec::with_capacity(depth);
        for _ in 0..depth {
            abs_pows.push(abs_pow.clone());
            abs_pow = &abs_pow * &ctx.conj_abs();
        }
        for j in (0..depth).rev() {
            tail = &tail + &abs_pows[j].scale(&digit_rat);
            let scaled = tail.scale(&Rational::from_integer(d_big.clone()));
            let (c1, c2) =
                to_pair(&scaled).ok_or(Error::OutOfRange { what: "stripe depth too large" })?;
            bound_pairs[j] = (win_num + c1, c2);
        }
    }
    // overflow guard for the sign tests
    let coord_bound: i128 = pow_pairs
        .iter()
        .map(|&(k, l)| k.abs().max(l.abs()))
        .max()
        .unwrap_or(1)
        .saturating_mul(ctx.digit_max() as i128)
        .saturating_mul(depth.max(1) as i128)
        .saturating_mul(d_scale)
        .saturating_add(bound_pairs.iter().map(|&(c1, c2)| c1.abs().max(c2.abs())).max().unwrap());
    if coord_bound >= 1 << 52 {
        return Err(Error::OutOfRange { what: "stripe depth too large" });
    }
    // |x| < (C1 + C2*beta)/D  <=>  both C +- D*x are positive
    let within = |acc: (i128, i128), bound: (i128, i128)| -> bool {
        let (aa, bb) = (d_scale * acc.0, d_scale * acc.1);
        crate::qfield::sign_pair_i128(bound.0 - aa, bound.1 - bb, a, b) > 0
            && crate::qfield::sign_pair_i128(bound.0 + aa, bound.1 + bb, a, b) > 0
    };
    let modulus = pc.modulus.to_u64().ok_or(Error::OutOfRange { what: "modulus too large" })?;
    let root = pc.root.to_u64().unwrap_or(0) % modulus.max(1);
    let mut root_pows: Vec<u64> = Vec::with_capacity(depth);
    let mut rp = 1u64 % modulus;
    for _ in 0..depth {
        root_pows.push(rp);
        rp = ((rp as u128 * root as u128) % modulus as u128) as u64;
    }

    let mut hits = BTreeSet::new();
    struct RFrame {
        node: usize,
        edge: usize,
    }
    for start in 1..=n {
        let mut stack = vec![RFrame { node: start, edge: 0 }];
        let mut acc_stack: Vec<(i128, i128)> = vec![(0, 0)];
        let mut res_stack: Vec<u64> = vec![0];
        while !stack.is_empty() {
            let j = stack.len() - 1; // digits consumed so far
            let frame = stack.last_mut().expect("stack non-empty");
            if j == depth {
                if dist[frame.node] == 0 && within(*acc_stack.last().unwrap(), (win_num, 0)) {
                    hits.insert(*res_stack.last().unwrap());
                }
                stack.pop();
                acc_stack.pop();
                res_stack.pop();
                continue;
            }
            let node = frame.node;
            let edges = &rev.edges[node - 1];
            if frame.edge >= edges.len() {
                stack.pop();
                acc_stack.pop();
                res_stack.pop();
                continue;
            }
            let (digit, target0) = edges[frame.edge];
            frame.edge += 1;
            let target = target0 + 1;
            // completability: need a length-(depth-j-1) forward path from 1
            if dist[target] == usize::MAX || dist[target] > depth - j - 1 {
                continue;
            }
            let prev = *acc_stack.last().unwrap();
            let acc = (
                prev.0 + digit as i128 * pow_pairs[j].0,
                prev.1 + digit as i128 * pow_pairs[j].1,
            );
            if !within(acc, bound_pairs[j + 1]) {
                continue;
            }
            let res = (*res_stack.last().unwrap() as u128
                + digit as u128 * root_pows[j] as u128)
                % modulus as u128;
            acc_stack.push(acc);
            res_stack.push(res as u64);
            stack.push(RFrame { node: target, edge: 0 });
        }
    }
    Ok(hits)
}

/// Default prime for a context: the smallest prime dividing |N(beta)|.
pub fn default_prime(ctx: &PisotQuad) -> Option<u64> {
    factorize(ctx.b().unsigned_abs()).first().map(|&(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(a: i64, b: i64) -> PisotQuad {
        PisotQuad::new(a, b).unwrap()
    }

    #[test]
    fn hensel_examples() {
        let p = ctx(10, 3);
        assert_eq!(hensel_root(&p, 3, 1).unwrap().root, BigInt::zero());
        assert_eq!(hensel_root(&p, 3, 3).unwrap().root, BigInt::from(6));
        assert_eq!(hensel_root(&p, 3, 4).unwrap().root, BigInt::from(60));
        assert!(matches!(hensel_root(&p, 5, 2), Err(Error::NotDividingNorm { .. })));
        // (2,2): 2 ramifies
        assert!(matches!(hensel_root(&ctx(2, 2), 2, 2), Err(Error::NonSplitPrime { .. })));
    }

    #[test]
    fn hensel_brute_force_oracle() {
        // all roots of X^2 - 10X - 3 mod 3^k with r = 0 mod 3, k <= 6
        let p = ctx(10, 3);
        for k in 1..=6u32 {
            let m = 3i64.pow(k);
            let mut expected = None;
            for r in (0..m).step_by(3) {
                if (r * r - 10 * r - 3).rem_euclid(m) == 0 {
                    assert!(expected.is_none(), "root not unique mod {m}");
                    expected = Some(r);
                }
            }
            let got = hensel_root(&p, 3, k).unwrap();
            assert_eq!(got.root, BigInt::from(expected.unwrap()));
        }
    }

    #[test]
    fn phi_f_examples() {
        let p = ctx(10, 3);
        let pc = hensel_root(&p, 3, 4).unwrap();
        assert_eq!(phi_f(&p.beta(), &pc).unwrap(), BigInt::from(60));
        assert_eq!(phi_f(&p.one(), &pc).unwrap(), BigInt::from(1));
        let third = p.from_rational(&Rational::new(1.into(), 3.into()));
        assert!(matches!(
            phi_f(&third, &pc),
            Err(Error::DenominatorNotInvertible { prime: 3 })
        ));
    }

    #[test]
    fn monna_examples() {
        let p = ctx(10, 3);
        let pc = hensel_root(&p, 3, 4).unwrap();
        assert_eq!(monna(&BigInt::zero(), &pc), Rational::from_integer(0.into()));
        // 60 = 0 + 2*3 + 0*9 + 2*27 -> 2/9 + 2/81 = 20/81
        assert_eq!(monna(&BigInt::from(60), &pc), Rational::new(20.into(), 81.into()));
        // bijection onto j/p^k
        let pc2 = hensel_root(&p, 3, 2).unwrap();
        let mut seen = BTreeSet::new();
        for r in 0..9 {
            let m = monna(&BigInt::from(r), &pc2);
            assert_eq!(m.denom().to_u64().map(|d| 9 % d), Some(0));
            seen.insert(m);
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn point_count_depth_3() {
        let p = ctx(10, 3);
        let pc = hensel_root(&p, 3, 2).unwrap();
        let pts = tile_points(&p, &pc, 3, None).unwrap();
        assert_eq!(pts.len(), 1163);
        // lexicographic word order
        for w in pts.windows(2) {
            assert!(w[0].word < w[1].word);
        }
    }

    #[test]
    fn depth_zero_single_point() {
        let p = ctx(10, 3);
        let pc = hensel_root(&p, 3, 2).unwrap();
        let pts = tile_points(&p, &pc, 0, None).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].subtile, 1);
        assert_eq!(pts[0].real, 0.0);
    }

    #[test]
    fn csv_shape() {
        let p = ctx(4, 3);
        let pc = hensel_root(&p, 3, 3).unwrap();
        let pts = tile_points(&p, &pc, 6, None).unwrap();
        let mut buf = Vec::new();
        write_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("subtile,real,monna,residue,word"));
        assert_eq!(text.lines().count(), pts.len() + 1);
        // two subtile labels present
        let labels: BTreeSet<&str> =
            text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(labels, BTreeSet::from(["1", "2"]));
        // empty stream gives a header-only file
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), "subtile,real,monna,residue,word\n");
    }

    #[test]
    fn stripe_matches_brute_force_small_depth() {
        let p = ctx(10, 3);
        let pc = hensel_root(&p, 3, 2).unwrap();
        let window = Rational::new(1.into(), 2.into());
        let fast = stripe_residues(&p, &pc, 4, &window).unwrap();
        let mut slow = BTreeSet::new();
        for pt in tile_points(&p, &pc, 4, None).unwrap() {
            let conj_exact = {
                // recompute exactly: sum w_i beta2^(N-i)
                let b2 = p.beta().conj();
                let mut acc = p.zero();
                for &d in &pt.word {
                    acc = &acc * &b2 + p.from_int(d);
                }
                acc
            };
            if conj_exact.abs().cmp_rational(&window) == Ordering::Less {
                slow.insert(pt.residue.to_u64().unwrap());
            }
        }
        assert_eq!(fast, slow);
    }
}
