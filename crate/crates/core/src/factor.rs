//! Irreducibility testing and factorization of univariate polynomials.
//!
//! Over 𝔽_p: square-free decomposition, distinct-degree and Cantor–Zassenhaus
//! equal-degree splitting. Over ℚ: square-free decomposition followed by
//! Zassenhaus (factor modulo a prime, Hensel lift, recombine), capped at degree 16.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::poly::Poly;

/// Degree cap for factorization over ℚ.
pub const MAX_RATIONAL_DEGREE: usize = 16;

/// Monic irreducible factors with multiplicities, sorted by degree then coefficients.
pub fn factor(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    let mut out = match f.field() {
        Field::Prime(_) => factor_fp(&f.monic()),
        Field::Rational => factor_q(&f.monic())?,
    };
    out.sort_by(|(a, ma), (b, mb)| poly_key(a).cmp(&poly_key(b)).then(ma.cmp(mb)));
    let mut merged: Vec<(Poly, usize)> = Vec::new();
    for (g, m) in out {
        match merged.last_mut() {
            Some((h, k)) if *h == g => *k += m,
            _ => merged.push((g, m)),
        }
    }
    Ok(merged)
}

pub fn is_irreducible(f: &Poly) -> Result<bool> {
    match f.degree() {
        None | Some(0) => Err(Error::invalid("irreducibility is defined for polynomials of degree >= 1")),
        Some(1) => Ok(true),
        Some(_) => {
            let fs = factor(f)?;
            Ok(fs.len() == 1 && fs[0].1 == 1)
        }
    }
}

fn poly_key(p: &Poly) -> (usize, Vec<String>) {
    let mut cs: Vec<String> = p
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Fp { v, .. } => format!("{v:020}"),
            q => q.to_string(),
        })
        .collect();
    cs.reverse();
    (p.degree().unwrap_or(0), cs)
}

// ---------------------------------------------------------------- 𝔽_p

fn factor_fp(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (g, mult) in squarefree_fp(f) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, mult));
            }
        }
    }
    out
}

fn pth_root(f: &Poly, p: u64) -> Poly {
    let field = f.field();
    let coeffs = f.coeffs().iter().step_by(p as usize).cloned().collect();
    Poly::new(field, coeffs)
}

fn squarefree_fp(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.field().characteristic();
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while w.degree() != Some(0) {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).unwrap();
        if z.degree() != Some(0) {
            out.push((z, i));
        }
        i += 1;
        w = y.clone();
        c = c.div_exact(&y).unwrap();
    }
    if c.degree() != Some(0) {
        for (g, m) in squarefree_fp(&pth_root(&c, p)) {
            out.push((g, m * p as usize));
        }
    }
    out
}

fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field();
    let p = field.characteristic();
    let x = Poly::monomial(field.one(), 1);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut i = 1;
    while rest.degree().unwrap() >= 2 * i {
        h = rest.powmod(&h, p);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() != Some(0) {
            rest = rest.div_exact(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.degree() != Some(0) {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    out
}

fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field();
    let p = field.characteristic();
    let bits = if p == 2 {
        Vec::new()
    } else {
        let e: BigUint = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
        (0..e.bits()).rev().map(|i| e.bit(i)).collect()
    };
    loop {
        let a = Poly::new(field, (0..n).map(|_| field.random(rng, 0)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            let mut acc = a.clone();
            let mut term = a.clone();
            for _ in 1..d {
                term = term.mul(&term).rem(f);
                acc = acc.add(&term);
            }
            acc
        } else {
            f.powmod_bits(&a, &bits).sub(&Poly::one(field))
        };
        let g = b.gcd(f);
        if let Some(k) = g.degree() {
            if k > 0 && k < n {
                let mut out = equal_degree(&g, d, rng);
                out.extend(equal_degree(&f.div_exact(&g).unwrap(), d, rng));
                return out;
            }
        }
    }
}

// ---------------------------------------------------------------- ℚ

fn factor_q(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let n = f.degree().unwrap();
    if n > MAX_RATIONAL_DEGREE {
        return Err(Error::Unsupported(format!(
            "factorization over Q is limited to degree {MAX_RATIONAL_DEGREE}, got {n}"
        )));
    }
    let mut out = Vec::new();
    for (g, mult) in squarefree_q(f) {
        for h in zassenhaus(&primitive_int(&g)) {
            out.push((to_rational_monic(&h), mult));
        }
    }
    Ok(out)
}

fn squarefree_q(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return out;
    }
    let b = f.gcd(&f.derivative());
    let mut c = f.div_exact(&b).unwrap();
    let mut d = f.derivative().div_exact(&b).unwrap().sub(&c.derivative());
    let mut i = 1;
    while c.degree() != Some(0) {
        let a = c.gcd(&d);
        let next = c.div_exact(&a).unwrap();
        if a.degree() != Some(0) {
            out.push((a.clone(), i));
        }
        d = d.div_exact(&a).unwrap().sub(&next.derivative());
        c = next;
        i += 1;
    }
    out
}

type ZPoly = Vec<BigInt>;

fn trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn primitive_int(f: &Poly) -> ZPoly {
    let lcm = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.as_rational().unwrap().denom()));
    let ints: ZPoly = f
        .coeffs()
        .iter()
        .map(|c| (c.as_rational().unwrap() * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    primitive_part(ints)
}

fn primitive_part(a: ZPoly) -> ZPoly {
    let a = trim(a);
    let g = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return a;
    }
    let sign = if a.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    a.into_iter().map(|c| c / &g * &sign).collect()
}

fn to_rational_monic(a: &ZPoly) -> Poly {
    let field = Field::Rational;
    let lead = BigRational::from_integer(a.last().unwrap().clone());
    Poly::new(
        field,
        a.iter().map(|c| Scalar::Q(BigRational::from_integer(c.clone()) / &lead)).collect(),
    )
}

fn zmod(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

fn zmod_poly(a: &ZPoly, m: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| zmod(c, m)).collect())
}

fn zadd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Division by a monic polynomial modulo m.
fn zdivrem_monic(a: &ZPoly, h: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let dh = h.len() - 1;
    let mut r = zmod_poly(a, m);
    if r.len() <= dh {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - dh];
    for k in (0..q.len()).rev() {
        let c = zmod(&r[k + dh], m);
        if c.is_zero() {
            continue;
        }
        for (j, hc) in h.iter().enumerate() {
            r[k + j] = zmod(&(&r[k + j] - &c * hc), m);
        }
        q[k] = c;
    }
    r.truncate(dh);
    (trim(q), trim(r))
}

fn to_fp(a: &ZPoly, p: u64) -> Poly {
    let f = Field::Prime(p);
    Poly::new(f, a.iter().map(|c| f.from_bigint(c)).collect())
}

fn from_fp(a: &Poly) -> ZPoly {
    a.coeffs().iter().map(|c| BigInt::from(c.residue().unwrap())).collect()
}

/// Lifts F ≡ g·h (mod p), h monic, to F ≡ g*·h* (mod m) with m = p^(2^j) ≥ target.
fn hensel_pair(f: &ZPoly, g: &Poly, h: &Poly, p: u64, target: &BigInt) -> (ZPoly, ZPoly, BigInt) {
    let (one, s, t) = g.xgcd(h);
    debug_assert!(one.is_one());
    let (mut g, mut h, mut s, mut t) = (from_fp(g), from_fp(h), from_fp(&s), from_fp(&t));
    let mut m = BigInt::from(p);
    while &m < target {
        let m2 = &m * &m;
        let e = zmod_poly(&zsub(f, &zmul(&g, &h)), &m2);
        let (q, r) = zdivrem_monic(&zmul(&s, &e), &h, &m2);
        let g2 = zmod_poly(&zadd(&zadd(&g, &zmul(&t, &e)), &zmul(&q, &g)), &m2);
        let h2 = zmod_poly(&zadd(&h, &r), &m2);
        let b = zmod_poly(&zsub(&zadd(&zmul(&s, &g2), &zmul(&t, &h2)), &vec![BigInt::one()]), &m2);
        let (c, d) = zdivrem_monic(&zmul(&s, &b), &h2, &m2);
        s = zmod_poly(&zsub(&s, &d), &m2);
        t = zmod_poly(&zsub(&zsub(&t, &zmul(&t, &b)), &zmul(&c, &g2)), &m2);
        g = g2;
        h = h2;
        m = m2;
    }
    (g, h, m)
}

/// Lifts the factorization f ≡ lc·∏ gs (mod p) to monic factors modulo some m ≥ target.
fn hensel_multi(f: &ZPoly, gs: &[Poly], p: u64, target: &BigInt) -> (Vec<ZPoly>, BigInt) {
    if gs.len() == 1 {
        let mut m = BigInt::from(p);
        while &m < target {
            m = &m * &m;
        }
        let lc = f.last().unwrap();
        let inv = lc.modinv(&m).expect("leading coefficient invertible mod p");
        return (vec![zmod_poly(&f.iter().map(|c| c * &inv).collect(), &m)], m);
    }
    let (left, right) = gs.split_at(gs.len() / 2);
    let fp = to_fp(f, p);
    let h = right.iter().fold(Poly::one(Field::Prime(p)), |acc, q| acc.mul(q));
    let g = left.iter().fold(Poly::constant(fp.lead()), |acc, q| acc.mul(q));
    let (g_l, h_l, _) = hensel_pair(f, &g, &h, p, target);
    let (mut a, m) = hensel_multi(&g_l, left, p, target);
    let (b, _) = hensel_multi(&h_l, right, p, target);
    a.extend(b);
    (a, m)
}

fn symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half: BigInt = m / 2;
    trim(
        a.iter()
            .map(|c| {
                let c = zmod(c, m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn zdiv_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.clone();
    if r.len() <= db {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] -= &c * bc;
        }
        q[k] = c;
    }
    r.iter().all(|c| c.is_zero()).then(|| trim(q))
}

fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    let lc = f.last().unwrap().clone();
    let mut best: Option<(u64, Vec<Poly>)> = None;
    let mut tried = 0;
    for p in (3u64..).filter(|&q| crate::field::is_prime_u64(q)) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_fp(f, p);
        if fp.gcd(&fp.derivative()).degree() != Some(0) {
            continue;
        }
        let fs: Vec<Poly> = factor_fp(&fp.monic()).into_iter().map(|(g, _)| g).collect();
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        tried += 1;
        if tried == 5 {
            break;
        }
    }
    let (p, local) = best.unwrap();
    if local.len() == 1 {
        return vec![f.clone()];
    }
    let norm = f.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = BigInt::from(2) * lc.abs() * (BigInt::one() << n) * norm * BigInt::from(n + 1) + 1;
    let (mut lifted, m) = hensel_multi(f, &local, p, &bound);

    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut hit = None;
        for subset in combinations(lifted.len(), size) {
            let lead = rest.last().unwrap().clone();
            let prod = subset.iter().fold(vec![lead.clone()], |acc, &i| zmod_poly(&zmul(&acc, &lifted[i]), &m));
            let cand = primitive_part(symmetric(&prod, &m));
            if let Some(q) = zdiv_exact(&rest, &cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                found.push(cand);
                rest = primitive_part(q);
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => size += 1,
        }
    }
    found.push(rest);
    found
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
