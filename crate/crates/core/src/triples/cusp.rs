//! Triples on the cuspidal cubic: F̃ on P¹, a vector space M and ĩ = i(0) + ε·i_ε(0) with
//! ε² = 0, the preimage of the cusp sitting at (0:1).

use std::fmt;

use serde_json::{json, Value};

use super::hom::{search_invertible, Cohomology, IsoResult};
use super::write_labeled;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Mat, SparseSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspidalTriple {
    pub field: Field,
    /// Splitting degrees of F̃, one per row.
    pub degrees: Vec<i64>,
    /// dim M.
    pub cols: usize,
    pub i0: Mat,
    pub ieps: Mat,
}

impl CuspidalTriple {
    pub fn new(field: Field, degrees: Vec<i64>, i0: Mat, ieps: Mat) -> Result<CuspidalTriple> {
        let t = CuspidalTriple { field, cols: i0.cols(), degrees, i0, ieps };
        t.validate()?;
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum::<i64>() + self.cols as i64 - self.rank() as i64
    }

    pub fn is_locally_free(&self) -> bool {
        self.cols == self.rank()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if self.i0.rows() != r || self.ieps.rows() != r || self.i0.cols() != self.cols || self.ieps.cols() != self.cols {
            return Err(Error::validation("i(0) and i_eps(0) must both be rank × columns"));
        }
        if self.i0.rank() != r {
            return Err(Error::validation("i(0) is not of full row rank"));
        }
        if self.i0.vstack(&self.ieps).rank() != self.cols {
            return Err(Error::validation("M does not embed into the fiber"));
        }
        Ok(())
    }

    pub fn structure_sheaf(field: Field) -> CuspidalTriple {
        CuspidalTriple { field, degrees: vec![0], cols: 1, i0: Mat::identity(field, 1), ieps: Mat::zeros(field, 1, 1) }
    }

    pub fn direct_sum(&self, other: &CuspidalTriple) -> CuspidalTriple {
        CuspidalTriple {
            field: self.field,
            degrees: [self.degrees.clone(), other.degrees.clone()].concat(),
            cols: self.cols + other.cols,
            i0: self.i0.direct_sum(&other.i0),
            ieps: self.ieps.direct_sum(&other.ieps),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "curve": "cuspidal",
            "field": self.field.name(),
            "columns": self.cols,
            "degrees": self.degrees,
            "i0": self.i0.to_json(),
            "ieps": self.ieps.to_json(),
        })
    }

    pub fn from_json(field: Field, v: &Value) -> Result<CuspidalTriple> {
        let degrees: Vec<i64> = v
            .get("degrees")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("cuspidal triple needs `degrees`"))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Error::invalid("bad degree")))
            .collect::<Result<_>>()?;
        let cols = v
            .get("columns")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::invalid("cuspidal triple needs `columns`"))? as usize;
        let r = degrees.len();
        let i0 = Mat::from_json(field, v.get("i0").unwrap_or(&Value::Null), r, cols)?;
        let ieps = Mat::from_json(field, v.get("ieps").unwrap_or(&Value::Null), r, cols)?;
        CuspidalTriple::new(field, degrees, i0, ieps)
    }

    /// h⁰ and h¹ through the evaluation H⁰(F̃) ⊕ M → F̃ ⊗ k[ε]/ε².
    pub fn cohomology(&self) -> Cohomology {
        let mut nvars = 0;
        let mut free = 0;
        let mut h1_tilde = 0;
        let mut sec = Vec::with_capacity(self.rank());
        for &a in &self.degrees {
            if a < 0 {
                h1_tilde += (-a - 1) as usize;
                sec.push(None);
                continue;
            }
            let c0 = nvars;
            let c1 = if a >= 1 { Some(nvars + 1) } else { None };
            nvars += if a >= 1 { 2 } else { 1 };
            free += (a - 1).max(0) as usize;
            sec.push(Some((c0, c1)));
        }
        let m_off = nvars;
        nvars += self.cols;
        let mut system = SparseSystem::new(self.field, nvars);
        for (b, s) in sec.iter().enumerate() {
            for eps in [false, true] {
                let m = if eps { &self.ieps } else { &self.i0 };
                let mut row = Vec::new();
                match (s, eps) {
                    (Some((c0, _)), false) => row.push((*c0, self.field.one())),
                    (Some((_, Some(c1))), true) => row.push((*c1, self.field.one())),
                    _ => {}
                }
                for k in 0..self.cols {
                    row.push((m_off + k, -m.get(b, k)));
                }
                system.push(row);
            }
        }
        let rank = system.rank();
        Cohomology { h0: nvars - rank + free, h1: 2 * self.rank() - rank + h1_tilde }
    }

    /// Hom(F, O). The dual jets are the annihilator of M under ⟨(α, β), (x, y)⟩ = x·β + y·α on
    /// F̃* ⊗ k[ε]; elementary transforms at the cusp then restore a full-rank i(0).
    pub fn dual(&self) -> CuspidalTriple {
        let field = self.field;
        let r = self.rank();
        let a = self.ieps.transpose().hstack(&self.i0.transpose());
        let basis = a.nullspace();
        let mut consts = Mat::zeros(field, r, basis.len());
        let mut eps = Mat::zeros(field, r, basis.len());
        for (k, v) in basis.iter().enumerate() {
            for b in 0..r {
                consts.set(b, k, v[b].clone());
                eps.set(b, k, v[r + b].clone());
            }
        }
        let mut degrees: Vec<i64> = self.degrees.iter().map(|a| -a).collect();
        while consts.rank() < r {
            let phi = consts.transpose().nullspace().remove(0);
            let j = (0..r).filter(|&b| !phi[b].is_zero()).max_by_key(|&b| (degrees[b], b)).unwrap();
            let row = |m: &Mat| -> Vec<Scalar> {
                (0..m.cols())
                    .map(|k| (0..r).fold(field.zero(), |acc, b| &acc + &(&phi[b] * m.get(b, k))))
                    .collect()
            };
            let new_const = row(&eps);
            let cols = consts.cols();
            let mut c2 = Mat::zeros(field, r, cols + 1);
            let mut e2 = Mat::zeros(field, r, cols + 1);
            for b in 0..r {
                for k in 0..cols {
                    if b == j {
                        c2.set(b, k, new_const[k].clone());
                    } else {
                        c2.set(b, k, consts.get(b, k).clone());
                        e2.set(b, k, eps.get(b, k).clone());
                    }
                }
            }
            e2.set(j, cols, field.one());
            consts = c2;
            eps = e2;
            degrees[j] -= 1;
        }
        CuspidalTriple::normalized(field, degrees, consts, eps)
    }

    /// Rows sorted by degree, i(0) = (I | 0) and the entries of i_ε(0) from a lower to a
    /// higher degree summand on the first r columns cleared.
    pub fn normalized(field: Field, degrees: Vec<i64>, i0: Mat, ieps: Mat) -> CuspidalTriple {
        let r = degrees.len();
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by_key(|&b| degrees[b]);
        let all: Vec<usize> = (0..i0.cols()).collect();
        let (i0, ieps) = (i0.select(&order, &all), ieps.select(&order, &all));
        let degrees: Vec<i64> = order.iter().map(|&b| degrees[b]).collect();
        let (_, pivots) = i0.rref();
        let inv = i0.select(&(0..r).collect::<Vec<_>>(), &pivots).inverse().expect("i(0) has full row rank");
        let mut change = Mat::zeros(field, all.len(), all.len());
        for (i, &p) in pivots.iter().enumerate() {
            for k in 0..r {
                change.set(p, k, inv.get(i, k).clone());
            }
        }
        for (k, v) in i0.nullspace().into_iter().enumerate() {
            for (i, x) in v.into_iter().enumerate() {
                change.set(i, r + k, x);
            }
        }
        let i0 = i0.mul(&change);
        let mut ieps = ieps.mul(&change);
        for b in 0..r {
            for k in 0..r {
                if degrees[b] > degrees[k] {
                    ieps.set(b, k, field.zero());
                }
            }
        }
        CuspidalTriple { field, cols: all.len(), degrees, i0, ieps }
    }

    pub fn end_dim(&self) -> usize {
        hom_dim_cuspidal(self, self)
    }

    pub fn is_isomorphic(&self, other: &CuspidalTriple, seed: u64) -> IsoResult {
        if self.cols != other.cols || self.rank() != other.rank() {
            return IsoResult::NotIsomorphic;
        }
        let ab = CuspHom::new(self, other);
        let dims = [ab.dim(), hom_dim_cuspidal(other, self), self.end_dim(), other.end_dim()];
        if dims.iter().any(|&d| d != dims[0]) {
            return IsoResult::NotIsomorphic;
        }
        let basis = ab.system.nullspace();
        search_invertible(self.field, &basis, seed, |x| ab.is_invertible(self, other, x))
    }
}

impl fmt::Display for CuspidalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "i(0)")?;
        write_labeled(f, &self.i0, &self.degrees)?;
        writeln!(f, "i_eps(0)")?;
        write_labeled(f, &self.ieps, &self.degrees)
    }
}

struct FormVar {
    src: usize,
    dst: usize,
    c0: usize,
    c1: Option<usize>,
}

/// Morphisms (F, f): F̄ = F(0:1) + ε·∂F/∂z₀(0:1), with F₀ i0₁ = i0₂ f and
/// F₀ iε₁ + F₁ i0₁ = iε₂ f.
struct CuspHom {
    system: SparseSystem,
    free: usize,
    forms: Vec<FormVar>,
    f_off: usize,
}

impl CuspHom {
    fn new(src: &CuspidalTriple, dst: &CuspidalTriple) -> CuspHom {
        let mut nvars = 0;
        let mut free = 0;
        let mut forms = Vec::new();
        for (b, &db) in dst.degrees.iter().enumerate() {
            for (a, &da) in src.degrees.iter().enumerate() {
                let e = db - da;
                if e < 0 {
                    continue;
                }
                let c0 = nvars;
                let c1 = (e >= 1).then_some(nvars + 1);
                nvars += if e >= 1 { 2 } else { 1 };
                free += (e - 1).max(0) as usize;
                forms.push(FormVar { src: a, dst: b, c0, c1 });
            }
        }
        let f_off = nvars;
        let (k1, k2) = (src.cols, dst.cols);
        nvars += k1 * k2;
        let mut system = SparseSystem::new(src.field, nvars);
        for b in 0..dst.rank() {
            for k in 0..k1 {
                let mut row = Vec::new();
                for fv in forms.iter().filter(|fv| fv.dst == b) {
                    row.push((fv.c0, src.i0.get(fv.src, k).clone()));
                }
                for l in 0..k2 {
                    row.push((f_off + l * k1 + k, -dst.i0.get(b, l)));
                }
                system.push(row);
                let mut row = Vec::new();
                for fv in forms.iter().filter(|fv| fv.dst == b) {
                    row.push((fv.c0, src.ieps.get(fv.src, k).clone()));
                    if let Some(c1) = fv.c1 {
                        row.push((c1, src.i0.get(fv.src, k).clone()));
                    }
                }
                for l in 0..k2 {
                    row.push((f_off + l * k1 + k, -dst.ieps.get(b, l)));
                }
                system.push(row);
            }
        }
        CuspHom { system, free, forms, f_off }
    }

    fn dim(&self) -> usize {
        self.system.nullity() + self.free
    }

    fn is_invertible(&self, src: &CuspidalTriple, dst: &CuspidalTriple, x: &[Scalar]) -> bool {
        let field = src.field;
        let mut degs = src.degrees.clone();
        degs.sort_unstable();
        degs.dedup();
        for &g in &degs {
            let rows: Vec<usize> = (0..dst.rank()).filter(|&b| dst.degrees[b] == g).collect();
            let cols: Vec<usize> = (0..src.rank()).filter(|&a| src.degrees[a] == g).collect();
            if rows.len() != cols.len() {
                return false;
            }
            let mut m = Mat::zeros(field, rows.len(), cols.len());
            for fv in &self.forms {
                if src.degrees[fv.src] != g {
                    continue;
                }
                if let (Some(i), Some(j)) = (rows.iter().position(|&b| b == fv.dst), cols.iter().position(|&a| a == fv.src)) {
                    m.set(i, j, x[fv.c0].clone());
                }
            }
            if m.rank() != rows.len() {
                return false;
            }
        }
        let k = src.cols;
        let mut f = Mat::zeros(field, k, k);
        for l in 0..k {
            for j in 0..k {
                f.set(l, j, x[self.f_off + l * k + j].clone());
            }
        }
        f.rank() == k
    }
}

/// dim Hom(T₁, T₂) for cuspidal triples.
pub fn hom_dim_cuspidal(src: &CuspidalTriple, dst: &CuspidalTriple) -> usize {
    CuspHom::new(src, dst).dim()
}
