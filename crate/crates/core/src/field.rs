//! Exact scalars over ℚ and prime fields 𝔽_p.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest admissible prime modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 61;

/// A base field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// 𝔽_p, checking that `p` is a prime below 2⁶¹.
    pub fn prime(p: u64) -> Result<Field> {
        if p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not a prime below 2^61")));
        }
        Ok(Field::Prime(p))
    }

    /// Parses `q` or `f<p>`.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        let digits = s
            .strip_prefix('f')
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::invalid(format!("unknown field `{s}` (expected q or f<p>)")))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad field modulus `{digits}`")))?;
        Field::prime(p)
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rational => "q".into(),
            Field::Prime(p) => format!("f{p}"),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Number of elements, `None` for ℚ.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        match *self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp { v: reduce_i128(n as i128, p), p },
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            Field::Rational => Scalar::Q(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Fp { v: r.to_u64().unwrap(), p }
            }
        }
    }

    /// Image of a rational number; fails in 𝔽_p when the denominator vanishes.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Q(q.clone())),
            Field::Prime(_) => {
                let den = self.from_bigint(q.denom());
                let inv = den.inv().ok_or_else(|| {
                    Error::invalid(format!("{q} has no image in {}", self.name()))
                })?;
                Ok(self.from_bigint(q.numer()) * inv)
            }
        }
    }

    /// The i-th element in a fixed enumeration of a finite field.
    pub fn element(&self, i: u64) -> Scalar {
        match *self {
            Field::Rational => self.int(i as i64),
            Field::Prime(p) => Scalar::Fp { v: i % p, p },
        }
    }

    /// Uniform element of 𝔽_p, or an integer in [-bound, bound] for ℚ.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        match *self {
            Field::Rational => self.int(rng.gen_range(-bound..=bound)),
            Field::Prime(p) => Scalar::Fp { v: rng.gen_range(0..p), p },
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        loop {
            let x = self.random(rng, bound);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Parses `3/4`, `-2`, `2 mod 5` or `5` as an element of this field.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some((val, modulus)) = s.split_once("mod") {
            let m: u64 = modulus
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad modulus in `{s}`")))?;
            if *self != Field::Prime(m) {
                return Err(Error::invalid(format!(
                    "scalar `{s}` does not belong to field {}",
                    self.name()
                )));
            }
            return self.parse_scalar(val);
        }
        let q: BigRational = if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::invalid(format!("bad scalar `{s}`")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::invalid(format!("bad scalar `{s}`")))?;
            if d.is_zero() {
                return Err(Error::invalid(format!("zero denominator in `{s}`")));
            }
            BigRational::new(n, d)
        } else {
            let n: BigInt = s.parse().map_err(|_| Error::invalid(format!("bad scalar `{s}`")))?;
            BigRational::from_integer(n)
        };
        self.from_rational(&q)
    }

    pub fn parse_json_scalar(&self, v: &serde_json::Value) -> Result<Scalar> {
        match v {
            serde_json::Value::String(s) => self.parse_scalar(s),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(self.int(i)),
                None => Err(Error::invalid(format!("non-integer JSON number {n}; use a string like \"3/4\""))),
            },
            other => Err(Error::invalid(format!("expected a scalar, found {other}"))),
        }
    }
}

/// An element of ℚ or 𝔽_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

fn reduce_i128(n: i128, p: u64) -> u64 {
    n.rem_euclid(p as i128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { v, p } => Scalar::Fp { v: pow_mod(*v, p - 2, *p), p: *p },
        })
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field().one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// Residue in 𝔽_p as an integer.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Fp { v, .. } => Some(*v),
            Scalar::Q(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(q) => Some(q),
            Scalar::Fp { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { v, p } => write!(f, "{v} mod {p}"),
        }
    }
}

fn same_field(a: &Scalar, b: &Scalar) -> u64 {
    match (a, b) {
        (Scalar::Fp { p, .. }, Scalar::Fp { p: q, .. }) if p == q => *p,
        (Scalar::Q(_), Scalar::Q(_)) => 0,
        _ => panic!("arithmetic between {} and {} mixes fields", a.field().name(), b.field().name()),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match same_field(self, rhs) {
            0 => Scalar::Q(self.as_rational().unwrap() + rhs.as_rational().unwrap()),
            p => {
                let s = self.residue().unwrap() as u128 + rhs.residue().unwrap() as u128;
                Scalar::Fp { v: (s % p as u128) as u64, p }
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match same_field(self, rhs) {
            0 => Scalar::Q(self.as_rational().unwrap() - rhs.as_rational().unwrap()),
            p => {
                let a = self.residue().unwrap();
                let b = rhs.residue().unwrap();
                Scalar::Fp { v: if a >= b { a - b } else { p - (b - a) }, p }
            }
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match same_field(self, rhs) {
            0 => Scalar::Q(self.as_rational().unwrap() * rhs.as_rational().unwrap()),
            p => Scalar::Fp { v: mul_mod(self.residue().unwrap(), rhs.residue().unwrap(), p), p },
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(q) => Scalar::Q(-q),
            Scalar::Fp { v, p } => Scalar::Fp { v: if *v == 0 { 0 } else { p - v }, p: *p },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_print() {
        let q = Field::Rational;
        assert_eq!(q.parse_scalar("3/4").unwrap().to_string(), "3/4");
        assert_eq!(q.parse_scalar("-6/3").unwrap().to_string(), "-2");
        let f5 = Field::parse("f5").unwrap();
        assert_eq!(f5.parse_scalar("2 mod 5").unwrap().to_string(), "2 mod 5");
        assert_eq!(f5.parse_scalar("3/4").unwrap(), f5.int(2));
        assert!(f5.parse_scalar("1 mod 7").is_err());
        assert!(Field::parse("f6").is_err());
        assert!(Field::parse("f5").unwrap().parse_scalar("1/5").is_err());
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime_u64(2305843009213693951)); // 2^61 - 1
        assert!(Field::prime(2305843009213693951).is_ok());
        assert!(Field::prime(2305843009213693951 + 2).is_err());
        assert!(!is_prime_u64(3215031751));
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [Field::Rational, Field::Prime(7), Field::Prime(2305843009213693951)] {
            for _ in 0..1000 {
                let a = field.random(&mut rng, 1000);
                let b = field.random_nonzero(&mut rng, 1000);
                let c = field.random(&mut rng, 1000);
                assert_eq!(&(&a + &b) - &b, a);
                assert_eq!(&(&a * &b) / &b, a);
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert_eq!(b.pow(-3) * b.pow(3), field.one());
            }
        }
    }
}
