//! Curve shapes and the discrete data classifying indecomposable sheaves on cycles of lines.

use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::field::{Field, Scalar};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveShape {
    Cycle(usize),
    Chain(usize),
    Cuspidal,
}

impl CurveShape {
    pub fn cycle(n: usize) -> Result<CurveShape> {
        if n == 0 {
            return Err(Error::invalid("a cycle needs at least one component"));
        }
        Ok(CurveShape::Cycle(n))
    }

    pub fn to_json(&self) -> Value {
        match self {
            CurveShape::Cycle(n) => json!({ "cycle": n }),
            CurveShape::Chain(k) => json!({ "chain": k }),
            CurveShape::Cuspidal => json!("cuspidal"),
        }
    }

    pub fn from_json(v: &Value) -> Result<CurveShape> {
        if v.as_str() == Some("cuspidal") {
            return Ok(CurveShape::Cuspidal);
        }
        let obj = v.as_object().ok_or_else(|| Error::invalid(format!("bad curve {v}")))?;
        let count = |key: &str| -> Option<Result<usize>> {
            obj.get(key).map(|x| {
                x.as_u64()
                    .filter(|&n| n >= 1)
                    .map(|n| n as usize)
                    .ok_or_else(|| Error::invalid(format!("`{key}` must be a positive integer")))
            })
        };
        if let Some(n) = count("cycle") {
            return Ok(CurveShape::Cycle(n?));
        }
        if let Some(k) = count("chain") {
            return Ok(CurveShape::Chain(k?));
        }
        Err(Error::invalid(format!("bad curve {v}")))
    }
}

impl fmt::Display for CurveShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveShape::Cycle(n) => write!(f, "E{n}"),
            CurveShape::Chain(k) => write!(f, "I{k}"),
            CurveShape::Cuspidal => write!(f, "cuspidal cubic"),
        }
    }
}

/// (rank, degree).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Charge {
    pub rank: i64,
    pub degree: i64,
}

impl Charge {
    pub fn new(rank: i64, degree: i64) -> Charge {
        Charge { rank, degree }
    }

    pub fn to_json(&self) -> Value {
        json!({ "rank": self.rank, "degree": self.degree })
    }
}

impl std::ops::Add for Charge {
    type Output = Charge;
    fn add(self, o: Charge) -> Charge {
        Charge::new(self.rank + o.rank, self.degree + o.degree)
    }
}

impl std::iter::Sum for Charge {
    fn sum<I: Iterator<Item = Charge>>(iter: I) -> Charge {
        iter.fold(Charge::default(), |a, b| a + b)
    }
}

/// ⟨a, b⟩ = deg(b)·rk(a) − deg(a)·rk(b).
pub fn euler_form(a: Charge, b: Charge) -> i64 {
    b.degree * a.rank - a.degree * b.rank
}

/// Smallest e with d = e^s, s ≥ 2 and n | |e|.
pub fn is_periodic(d: &[i64], n: usize) -> Option<(Vec<i64>, usize)> {
    let len = d.len();
    if n == 0 || len == 0 || !len.is_multiple_of(n) {
        return None;
    }
    (n..len)
        .step_by(n)
        .filter(|p| len.is_multiple_of(*p))
        .find(|&p| (p..len).all(|i| d[i] == d[i - p]))
        .map(|p| (d[..p].to_vec(), len / p))
}

fn seq(d: &[i64]) -> String {
    d.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn poly_str(p: &Poly) -> String {
    let s = p.to_string();
    s.split(" (mod").next().unwrap_or(&s).to_string()
}

fn parse_seq(v: Option<&Value>) -> Result<Vec<i64>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::invalid("`d` must be an integer array"))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::invalid(format!("`d` entry {x} is not an integer"))))
        .collect()
}

fn parse_cycle(v: &Value) -> Result<usize> {
    match v.get("curve") {
        None => Ok(1),
        Some(c) => match CurveShape::from_json(c)? {
            CurveShape::Cycle(n) => Ok(n),
            other => Err(Error::invalid(format!("bands and strings live on cycles, not on {other}"))),
        },
    }
}

/// B(d, m, p): d of length r·n non-periodic, m ≥ 1, p monic irreducible with p ≠ t.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BandDescriptor {
    pub n: usize,
    pub d: Vec<i64>,
    pub m: usize,
    pub p: Poly,
}

impl BandDescriptor {
    pub fn new(n: usize, d: Vec<i64>, m: usize, p: Poly) -> Result<BandDescriptor> {
        let b = BandDescriptor { n, d, m, p: p.monic() };
        b.validate()?;
        Ok(b)
    }

    /// B(d, m, t − λ).
    pub fn linear(n: usize, d: Vec<i64>, m: usize, lambda: &Scalar) -> Result<BandDescriptor> {
        BandDescriptor::new(n, d, m, Poly::linear(lambda))
    }

    /// The unipotent bundle F_m = B((0,…,0), m, t − 1).
    pub fn unipotent(field: Field, n: usize, m: usize) -> BandDescriptor {
        BandDescriptor::linear(n, vec![0; n], m, &field.one()).expect("valid")
    }

    /// The structure sheaf of E_n.
    pub fn structure_sheaf(field: Field, n: usize) -> BandDescriptor {
        BandDescriptor::unipotent(field, n, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("cycle length must be positive"));
        }
        if self.d.is_empty() || !self.d.len().is_multiple_of(self.n) {
            return Err(Error::validation(format!("length {} of d is not a positive multiple of n = {}", self.d.len(), self.n)));
        }
        if let Some((e, s)) = is_periodic(&self.d, self.n) {
            return Err(Error::validation(format!("d = ({}) is periodic: ({})^{s}", seq(&self.d), seq(&e))));
        }
        if self.m == 0 {
            return Err(Error::validation("multiplicity m must be positive"));
        }
        match self.p.degree() {
            None | Some(0) => return Err(Error::validation("p must have positive degree")),
            _ => {}
        }
        if self.p.coeff(0).is_zero() {
            return Err(Error::validation("p(0) must be nonzero"));
        }
        if !is_irreducible(&self.p)? {
            return Err(Error::validation(format!("p = {} is reducible", poly_str(&self.p))));
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.p.field()
    }

    /// Number of passes r = |d| / n.
    pub fn r(&self) -> usize {
        self.d.len() / self.n
    }

    /// k = deg p.
    pub fn k(&self) -> usize {
        self.p.degree().unwrap_or(0)
    }

    /// λ when p = t − λ.
    pub fn lambda(&self) -> Option<Scalar> {
        (self.k() == 1).then(|| -&self.p.coeff(0))
    }

    pub fn charge(&self) -> Charge {
        let mk = (self.m * self.k()) as i64;
        Charge::new(self.r() as i64 * mk, mk * self.d.iter().sum::<i64>())
    }

    /// Splitting degrees on component c (0-based), each with multiplicity m·k.
    pub fn component_degrees(&self, c: usize) -> Vec<i64> {
        let mut v: Vec<i64> = self.d.iter().skip(c).step_by(self.n).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "band",
            "curve": CurveShape::Cycle(self.n).to_json(),
            "d": self.d,
            "m": self.m,
            "p": self.p.to_json(),
        })
    }

    pub fn from_json(field: Field, v: &Value) -> Result<BandDescriptor> {
        if v.get("kind").and_then(Value::as_str) != Some("band") {
            return Err(Error::invalid("expected \"kind\": \"band\""));
        }
        let n = parse_cycle(v)?;
        let d = parse_seq(v.get("d"))?;
        let m = match v.get("m") {
            None => 1,
            Some(x) => x.as_u64().ok_or_else(|| Error::invalid("`m` must be a positive integer"))? as usize,
        };
        let p = match (v.get("p"), v.get("lambda")) {
            (Some(p), _) => Poly::from_json(field, p)?,
            (None, Some(l)) => Poly::linear(&field.parse_json_scalar(l)?),
            (None, None) => return Err(Error::invalid("band needs `p` (coefficients, low degree first) or `lambda`")),
        };
        BandDescriptor::new(n, d, m, p)
    }
}

impl fmt::Display for BandDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B(({}), {}, {})", seq(&self.d), self.m, poly_str(&self.p))?;
        if self.n > 1 {
            write!(f, " on E{}", self.n)?;
        }
        Ok(())
    }
}

/// S(d, f) on E_n; `f` is the 1-based starting component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StringDescriptor {
    pub n: usize,
    pub d: Vec<i64>,
    pub f: usize,
}

impl StringDescriptor {
    pub fn new(n: usize, d: Vec<i64>, f: usize) -> Result<StringDescriptor> {
        let s = StringDescriptor { n, d, f };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("cycle length must be positive"));
        }
        if self.d.is_empty() {
            return Err(Error::validation("a string needs a nonempty degree sequence"));
        }
        if self.f == 0 || self.f > self.n {
            return Err(Error::validation(format!("starting component f = {} outside 1..={}", self.f, self.n)));
        }
        Ok(())
    }

    /// 0-based component of letter i.
    pub fn component_of(&self, i: usize) -> usize {
        (self.f - 1 + i) % self.n
    }

    /// Letters on each component.
    pub fn component_ranks(&self) -> Vec<i64> {
        let mut v = vec![0; self.n];
        for i in 0..self.d.len() {
            v[self.component_of(i)] += 1;
        }
        v
    }

    /// Rank is the largest component rank; degree Σd + 1.
    pub fn charge(&self) -> Charge {
        Charge::new(self.component_ranks().into_iter().max().unwrap_or(0), self.d.iter().sum::<i64>() + 1)
    }

    pub fn component_degrees(&self, c: usize) -> Vec<i64> {
        let mut v: Vec<i64> = (0..self.d.len()).filter(|&i| self.component_of(i) == c).map(|i| self.d[i]).collect();
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "kind": "string", "curve": CurveShape::Cycle(self.n).to_json(), "d": self.d });
        if self.n > 1 {
            v["f"] = json!(self.f);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<StringDescriptor> {
        if v.get("kind").and_then(Value::as_str) != Some("string") {
            return Err(Error::invalid("expected \"kind\": \"string\""));
        }
        let n = parse_cycle(v)?;
        let d = parse_seq(v.get("d"))?;
        let f = match v.get("f") {
            None => 1,
            Some(x) => x.as_u64().ok_or_else(|| Error::invalid("`f` must be a positive integer"))? as usize,
        };
        StringDescriptor::new(n, d, f)
    }
}

impl fmt::Display for StringDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "S(({}))", seq(&self.d))
        } else {
            write!(f, "S(({}), f={}) on E{}", seq(&self.d), self.f, self.n)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Band(BandDescriptor),
    String(StringDescriptor),
}

impl Descriptor {
    pub fn n(&self) -> usize {
        match self {
            Descriptor::Band(b) => b.n,
            Descriptor::String(s) => s.n,
        }
    }

    pub fn charge(&self) -> Charge {
        match self {
            Descriptor::Band(b) => b.charge(),
            Descriptor::String(s) => s.charge(),
        }
    }

    pub fn component_degrees(&self, c: usize) -> Vec<i64> {
        match self {
            Descriptor::Band(b) => b.component_degrees(c),
            Descriptor::String(s) => s.component_degrees(c),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Descriptor::Band(b) => b.to_json(),
            Descriptor::String(s) => s.to_json(),
        }
    }

    pub fn from_json(field: Field, v: &Value) -> Result<Descriptor> {
        match v.get("kind").and_then(Value::as_str) {
            Some("band") => Ok(Descriptor::Band(BandDescriptor::from_json(field, v)?)),
            Some("string") => Ok(Descriptor::String(StringDescriptor::from_json(v)?)),
            _ => Err(Error::invalid("descriptor needs \"kind\": \"band\" or \"string\"")),
        }
    }

    pub fn canonical(&self) -> Descriptor {
        match self {
            Descriptor::Band(b) => Descriptor::Band(canonical_band(b)),
            Descriptor::String(s) => Descriptor::String(s.clone()),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Band(b) => b.fmt(f),
            Descriptor::String(s) => s.fmt(f),
        }
    }
}

/// Rotation of d by whole passes: d_{jn+1}, …, d_{rn}, d_1, …, d_{jn}.
pub fn rotate(b: &BandDescriptor, passes: usize) -> BandDescriptor {
    let mut d = b.d.clone();
    let len = d.len();
    d.rotate_left((passes * b.n) % len);
    BandDescriptor { d, ..b.clone() }
}

/// Lexicographically least rotation of d by multiples of n.
pub fn canonical_band(b: &BandDescriptor) -> BandDescriptor {
    (0..b.r()).map(|j| rotate(b, j)).min_by(|x, y| x.d.cmp(&y.d)).expect("r ≥ 1")
}

/// Random valid band with |d| = r·n, entries in [−spread, spread] and linear p.
pub fn random_band<R: Rng>(field: Field, n: usize, max_r: usize, spread: i64, max_m: usize, rng: &mut R) -> BandDescriptor {
    loop {
        let r = rng.gen_range(1..=max_r);
        let d: Vec<i64> = (0..r * n).map(|_| rng.gen_range(-spread..=spread)).collect();
        if is_periodic(&d, n).is_some() {
            continue;
        }
        let lambda = field.random_nonzero(rng, 5);
        return BandDescriptor::linear(n, d, rng.gen_range(1..=max_m), &lambda).expect("valid");
    }
}

pub fn random_string<R: Rng>(n: usize, max_len: usize, spread: i64, rng: &mut R) -> StringDescriptor {
    let len = rng.gen_range(1..=max_len);
    let d = (0..len).map(|_| rng.gen_range(-spread..=spread)).collect();
    StringDescriptor::new(n, d, rng.gen_range(1..=n)).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn charges() {
        let fm = BandDescriptor::unipotent(q(), 3, 4);
        assert_eq!(fm.charge(), Charge::new(4, 0));
        let l = BandDescriptor::linear(1, vec![1], 1, &q().int(2)).unwrap();
        assert_eq!(l.charge(), Charge::new(1, 1));
        let p = Poly::from_ints(q(), &[1, 0, 1]);
        let b = BandDescriptor::new(2, vec![0, 1, 1, 3, 1, -2], 2, p).unwrap();
        assert_eq!(b.charge(), Charge::new(3 * 2 * 2, 4 * 2 * 2));
        assert_eq!(b.component_degrees(0), vec![0, 1, 1]);
        assert_eq!(b.component_degrees(1), vec![-2, 1, 3]);
        let s = StringDescriptor::new(1, vec![-1], 1).unwrap();
        assert_eq!(s.charge(), Charge::new(1, 0));
        assert_eq!(StringDescriptor::new(1, vec![0], 1).unwrap().charge(), Charge::new(1, 1));
        let s = StringDescriptor::new(2, vec![-1, 0, 1, -1, 1], 2).unwrap();
        assert_eq!(s.charge().degree, 1);
        assert_eq!(s.component_ranks(), vec![2, 3]);
    }

    #[test]
    fn periodicity() {
        assert_eq!(is_periodic(&[1, 1], 1), Some((vec![1], 2)));
        assert_eq!(is_periodic(&[0, 1, 1, 3, 1, -2], 2), None);
        assert_eq!(is_periodic(&[0, 1, 0, 1], 2), Some((vec![0, 1], 2)));
        assert_eq!(is_periodic(&[0, 0], 2), None);
        assert!(BandDescriptor::linear(1, vec![2, 2], 1, &q().one()).is_err());
    }

    #[test]
    fn validation() {
        assert!(BandDescriptor::new(1, vec![0], 1, Poly::from_ints(q(), &[0, 1])).is_err());
        assert!(BandDescriptor::new(1, vec![0], 1, Poly::from_ints(q(), &[-1, 0, 1])).is_err());
        assert!(BandDescriptor::new(2, vec![0], 1, Poly::from_ints(q(), &[-1, 1])).is_err());
        assert!(BandDescriptor::new(1, vec![0], 0, Poly::from_ints(q(), &[-1, 1])).is_err());
        assert!(StringDescriptor::new(2, vec![0], 3).is_err());
    }

    #[test]
    fn canonical_examples() {
        let l = q().int(3);
        let b = BandDescriptor::linear(1, vec![1, 0], 1, &l).unwrap();
        assert_eq!(canonical_band(&b).d, vec![0, 1]);
        let p = Poly::from_ints(q(), &[1, 0, 1]);
        let b = BandDescriptor::new(2, vec![0, 1, 1, 3, 1, -2], 1, p).unwrap();
        let c = canonical_band(&b);
        assert_eq!(c, b);
        assert_eq!(canonical_band(&c), c);
    }

    #[test]
    fn json_round_trip() {
        let f5 = Field::Prime(5);
        let v: Value = serde_json::from_str(r#"{"kind":"band","curve":{"cycle":2},"d":[0,1,1,3,1,-2],"m":1,"p":["-2",1]}"#).unwrap();
        let b = BandDescriptor::from_json(f5, &v).unwrap();
        assert_eq!(b.lambda(), Some(f5.int(2)));
        assert_eq!(BandDescriptor::from_json(f5, &b.to_json()).unwrap(), b);
        let s = StringDescriptor::new(1, vec![-1], 1).unwrap();
        assert!(s.to_json().get("f").is_none());
        assert_eq!(Descriptor::from_json(f5, &s.to_json()).unwrap(), Descriptor::String(s));
        assert_eq!(b.to_string(), "B((0,1,1,3,1,-2), 1, t + 3) on E2");
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_form(Charge::new(1, 0), Charge::new(0, 1)), 1);
        assert_eq!(euler_form(Charge::new(2, 1), Charge::new(3, 5)), 7);
    }

    proptest! {
        #[test]
        fn euler_antisymmetric(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9) {
            let (x, y) = (Charge::new(a, b), Charge::new(c, d));
            prop_assert_eq!(euler_form(x, y), -euler_form(y, x));
            prop_assert_eq!(euler_form(x, x), 0);
        }

        #[test]
        fn canonical_constant_on_orbit(seed in any::<u64>(), n in 1usize..4) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = random_band(Field::Prime(7), n, 4, 3, 2, &mut rng);
            let c = canonical_band(&b);
            prop_assert_eq!(canonical_band(&c), c.clone());
            for j in 0..b.r() {
                prop_assert_eq!(canonical_band(&rotate(&b, j)), c.clone());
            }
            prop_assert_eq!(c.charge(), b.charge());
        }
    }
}
