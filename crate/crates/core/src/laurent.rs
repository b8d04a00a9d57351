//! Laurent polynomials in z and square matrices over k[z, 1/z].

use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::poly::Poly;

/// Σ cᵢ zⁱ with finitely many nonzero terms, stored as z^low·(c₀ + c₁z + …).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    field: Field,
    low: i64,
    coeffs: Vec<Scalar>,
}

impl Laurent {
    pub fn zero(field: Field) -> Laurent {
        Laurent { field, low: 0, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Laurent {
        Laurent::monomial(field.one(), 0)
    }

    pub fn monomial(c: Scalar, e: i64) -> Laurent {
        Laurent::new(c.field(), e, vec![c])
    }

    pub fn new(field: Field, low: i64, mut coeffs: Vec<Scalar>) -> Laurent {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Laurent::zero(field);
        }
        coeffs.drain(..lead);
        Laurent { field, low: low + lead as i64, coeffs }
    }

    /// z^shift · p(z).
    pub fn from_poly(p: &Poly, shift: i64) -> Laurent {
        Laurent::new(p.field(), shift, p.coeffs().to_vec())
    }

    pub fn from_terms(field: Field, terms: &[(i64, i64)]) -> Laurent {
        terms.iter().fold(Laurent::zero(field), |acc, &(e, c)| acc.add(&Laurent::monomial(field.int(c), e)))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> Scalar {
        let i = e - self.low;
        if i < 0 {
            return self.field.zero();
        }
        self.coeffs.get(i as usize).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.low + i as i64, c))
    }

    /// (c, e) when self = c·z^e.
    pub fn as_monomial(&self) -> Option<(Scalar, i64)> {
        (self.coeffs.len() == 1).then(|| (self.coeffs[0].clone(), self.low))
    }

    /// The polynomial p with self = z^shift·p(z).
    pub fn to_poly(&self, shift: i64) -> Poly {
        assert!(self.is_zero() || self.low >= shift, "negative exponent after shift");
        let mut c = vec![self.field.zero(); (self.low - shift).max(0) as usize];
        c.extend(self.coeffs.iter().cloned());
        Poly::new(self.field, c)
    }

    pub fn in_polynomial_ring(&self) -> bool {
        self.val().is_none_or(|v| v >= 0)
    }

    pub fn in_inverse_ring(&self) -> bool {
        self.top().is_none_or(|t| t <= 0)
    }

    /// Terms with exponent in lo..=hi.
    pub fn filter(&self, lo: i64, hi: i64) -> Laurent {
        Laurent::new(
            self.field,
            self.low,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let e = self.low + i as i64;
                    if e >= lo && e <= hi { c.clone() } else { self.field.zero() }
                })
                .collect(),
        )
    }

    pub fn shift(&self, k: i64) -> Laurent {
        Laurent { field: self.field, low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.low.min(other.low);
        let hi = self.top().unwrap().max(other.top().unwrap());
        Laurent::new(self.field, lo, (lo..=hi).map(|e| &self.coeff(e) + &other.coeff(e)).collect())
    }

    pub fn neg(&self) -> Laurent {
        Laurent { field: self.field, low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Laurent {
        Laurent::new(self.field, self.low, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Laurent::new(self.field, self.low + other.low, out)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (e, c) in self.terms() {
            m.insert(e.to_string(), c.to_json());
        }
        Value::Object(m)
    }

    pub fn from_json(field: Field, v: &Value) -> Result<Laurent> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::invalid(format!("Laurent polynomial must be an {{exponent: coefficient}} object, got {v}")))?;
        let mut acc = Laurent::zero(field);
        for (k, c) in obj {
            let e: i64 = k.trim().parse().map_err(|_| Error::invalid(format!("bad exponent `{k}`")))?;
            acc = acc.add(&Laurent::monomial(field.parse_json_scalar(c)?, e));
        }
        Ok(acc)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let c = match c {
                    Scalar::Fp { v, .. } => v.to_string(),
                    q => q.to_string(),
                };
                match e {
                    0 => c,
                    1 if c == "1" => "z".into(),
                    _ if c == "1" => format!("z^{e}"),
                    1 => format!("{c}*z"),
                    _ => format!("{c}*z^{e}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Square matrix over k[z, 1/z].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    field: Field,
    n: usize,
    entries: Vec<Laurent>,
}

impl LaurentMatrix {
    pub fn zeros(field: Field, n: usize) -> LaurentMatrix {
        LaurentMatrix { field, n, entries: vec![Laurent::zero(field); n * n] }
    }

    pub fn identity(field: Field, n: usize) -> LaurentMatrix {
        let mut m = LaurentMatrix::zeros(field, n);
        for i in 0..n {
            m.set(i, i, Laurent::one(field));
        }
        m
    }

    /// diag(z^{e₁}, …, z^{e_r}).
    pub fn diagonal(field: Field, exps: &[i64]) -> LaurentMatrix {
        let mut m = LaurentMatrix::zeros(field, exps.len());
        for (i, &e) in exps.iter().enumerate() {
            m.set(i, i, Laurent::monomial(field.one(), e));
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Laurent>>) -> Result<LaurentMatrix> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("Laurent matrix must be square and nonempty"));
        }
        Ok(LaurentMatrix { field, n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Laurent) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &LaurentMatrix) -> LaurentMatrix {
        let n = self.n;
        let mut m = LaurentMatrix::zeros(self.field, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Laurent::zero(self.field);
                for k in 0..n {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc = acc.add(&a.mul(other.get(k, j)));
                    }
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    pub fn entries(&self) -> &[Laurent] {
        &self.entries
    }

    /// All entries lie in k[z].
    pub fn over_polynomials(&self) -> bool {
        self.entries.iter().all(Laurent::in_polynomial_ring)
    }

    /// All entries lie in k[1/z].
    pub fn over_inverse_polynomials(&self) -> bool {
        self.entries.iter().all(Laurent::in_inverse_ring)
    }

    /// Exponents of a diagonal matrix of monic monomials.
    pub fn monomial_diagonal(&self) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let e = self.get(i, j);
                if i == j {
                    let (c, k) = e.as_monomial()?;
                    if !c.is_one() {
                        return None;
                    }
                    out.push(k);
                } else if !e.is_zero() {
                    return None;
                }
            }
        }
        Some(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.n)
                .map(|i| Value::Array((0..self.n).map(|j| self.get(i, j).to_json()).collect()))
                .collect(),
        )
    }

    pub fn from_json(field: Field, v: &Value) -> Result<LaurentMatrix> {
        let rows = v.as_array().ok_or_else(|| Error::invalid("Laurent matrix must be an array of rows"))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::invalid("each row must be an array"))?
                    .iter()
                    .map(|e| Laurent::from_json(field, e))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LaurentMatrix::from_rows(field, rows)
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[ {} ]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let q = Field::Rational;
        let a = Laurent::from_terms(q, &[(-1, 1), (2, 3)]);
        let b = Laurent::from_terms(q, &[(1, 1)]);
        assert_eq!(a.mul(&b), Laurent::from_terms(q, &[(0, 1), (3, 3)]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.val(), Some(-1));
        assert_eq!(a.top(), Some(2));
        assert_eq!(a.filter(0, 5), Laurent::from_terms(q, &[(2, 3)]));
        assert_eq!(a.to_string(), "z^-1 + 3*z^2");
    }

    #[test]
    fn json_round_trip() {
        let q = Field::Rational;
        let v: Value = serde_json::from_str(r#"[[{"1":"1"},{}],[{"0":1},{"-1":"2/3"}]]"#).unwrap();
        let m = LaurentMatrix::from_json(q, &v).unwrap();
        assert_eq!(LaurentMatrix::from_json(q, &m.to_json()).unwrap(), m);
        assert_eq!(m.get(1, 1).coeff(-1), q.parse_scalar("2/3").unwrap());
    }
}
