//! Triples (F̃, M, ĩ): splitting data on the normalization plus gluing matrices at the
//! preimages of the singular points.
//!
//! On a cycle E_n (components and nodes 0-based), component c carries the preimage of node c
//! at 0 = (0:1) and the preimage of node c+1 (mod n) at ∞ = (1:0). Fibers are trivialized by
//! ζ ↦ ζ/z₁ᵃ at 0 and ζ ↦ ζ/z₀ᵃ at ∞ for ζ a section of O(a).

mod cusp;
mod hom;

use std::fmt;

use serde_json::{json, Value};

pub use cusp::{hom_dim_cuspidal, CuspidalTriple};
pub use hom::{cohomology, hom_dim, is_isomorphic, Cohomology, IsoResult, DEFAULT_ISO_SEED};

use crate::descriptors::{BandDescriptor, Descriptor, StringDescriptor};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Mat;

/// A triple on either kind of singular curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triple {
    Nodal(NodalTriple),
    Cuspidal(CuspidalTriple),
}

impl Triple {
    pub fn field(&self) -> Field {
        match self {
            Triple::Nodal(t) => t.field,
            Triple::Cuspidal(t) => t.field,
        }
    }

    pub fn end_dim(&self) -> usize {
        match self {
            Triple::Nodal(t) => hom_dim(t, t),
            Triple::Cuspidal(t) => t.end_dim(),
        }
    }

    pub fn cohomology(&self) -> Cohomology {
        match self {
            Triple::Nodal(t) => cohomology(t),
            Triple::Cuspidal(t) => t.cohomology(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Triple::Nodal(t) => t.to_json(),
            Triple::Cuspidal(t) => t.to_json(),
        }
    }

    /// Reads either JSON shape; `"curve": "cuspidal"` selects the cuspidal one.
    pub fn from_json(field: Field, v: &Value) -> Result<Triple> {
        if v.get("curve").and_then(Value::as_str) == Some("cuspidal") {
            CuspidalTriple::from_json(field, v).map(Triple::Cuspidal)
        } else {
            NodalTriple::from_json(field, v).map(Triple::Nodal)
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triple::Nodal(t) => t.fmt(f),
            Triple::Cuspidal(t) => t.fmt(f),
        }
    }
}

/// Triple on E_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalTriple {
    pub field: Field,
    pub n: usize,
    /// Splitting degrees of F̃ on each component, one per row.
    pub degrees: Vec<Vec<i64>>,
    /// dim M at each node.
    pub cols: Vec<usize>,
    /// Gluing matrix at 0 of component c: rows `degrees[c]`, columns `cols[c]`.
    pub at_zero: Vec<Mat>,
    /// Gluing matrix at ∞ of component c: rows `degrees[c]`, columns `cols[(c + 1) % n]`.
    pub at_inf: Vec<Mat>,
}

impl NodalTriple {
    pub fn new(field: Field, degrees: Vec<Vec<i64>>, cols: Vec<usize>, at_zero: Vec<Mat>, at_inf: Vec<Mat>) -> Result<NodalTriple> {
        let t = NodalTriple { field, n: degrees.len(), degrees, cols, at_zero, at_inf };
        t.validate()?;
        Ok(t)
    }

    pub fn inf_node(&self, c: usize) -> usize {
        (c + 1) % self.n
    }

    /// Shape checks, full row rank of every gluing matrix and injectivity of M into the fibers.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || self.cols.len() != n || self.at_zero.len() != n || self.at_inf.len() != n {
            return Err(Error::validation("triple needs one entry per component and node"));
        }
        for c in 0..n {
            let rows = self.degrees[c].len();
            let (z, w) = (&self.at_zero[c], &self.at_inf[c]);
            if z.rows() != rows || w.rows() != rows || z.cols() != self.cols[c] || w.cols() != self.cols[self.inf_node(c)] {
                return Err(Error::validation(format!("gluing matrices on component {} have the wrong shape", c + 1)));
            }
            if z.rank() != rows || w.rank() != rows {
                return Err(Error::validation(format!("gluing matrix on component {} is not of full row rank", c + 1)));
            }
        }
        for node in 0..n {
            let prev = (node + n - 1) % n;
            let stacked = self.at_zero[node].vstack(&self.at_inf[prev]);
            if stacked.rank() != self.cols[node] {
                return Err(Error::validation(format!("M does not embed into the fibers at node {}", node + 1)));
            }
        }
        Ok(())
    }

    pub fn rank_on(&self, c: usize) -> usize {
        self.degrees[c].len()
    }

    pub fn is_locally_free(&self) -> bool {
        (0..self.n).all(|c| self.cols[c] == self.rank_on(c) && self.rank_on(c) == self.rank_on(0))
    }

    /// The structure sheaf of E_n.
    pub fn structure_sheaf(field: Field, n: usize) -> NodalTriple {
        let one = Mat::identity(field, 1);
        NodalTriple {
            field,
            n,
            degrees: vec![vec![0]; n],
            cols: vec![1; n],
            at_zero: vec![one.clone(); n],
            at_inf: vec![one; n],
        }
    }

    /// Bands carry their field in p; strings take `field`.
    pub fn from_descriptor(d: &Descriptor, field: Field) -> NodalTriple {
        match d {
            Descriptor::Band(b) => band_to_triple(b),
            Descriptor::String(s) => string_to_triple(s, field),
        }
    }

    pub fn direct_sum(&self, other: &NodalTriple) -> NodalTriple {
        assert_eq!(self.n, other.n, "direct sum of triples on different curves");
        NodalTriple {
            field: self.field,
            n: self.n,
            degrees: (0..self.n).map(|c| [self.degrees[c].clone(), other.degrees[c].clone()].concat()).collect(),
            cols: (0..self.n).map(|c| self.cols[c] + other.cols[c]).collect(),
            at_zero: (0..self.n).map(|c| self.at_zero[c].direct_sum(&other.at_zero[c])).collect(),
            at_inf: (0..self.n).map(|c| self.at_inf[c].direct_sum(&other.at_inf[c])).collect(),
        }
    }

    pub fn sum_all(parts: &[NodalTriple]) -> Option<NodalTriple> {
        let (first, rest) = parts.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, t| acc.direct_sum(t)))
    }

    /// Component-wise Kronecker product of the gluing data; row (i, j) has degree aᵢ + bⱼ.
    pub fn tensor(&self, other: &NodalTriple) -> NodalTriple {
        assert_eq!(self.n, other.n, "tensor of triples on different curves");
        NodalTriple {
            field: self.field,
            n: self.n,
            degrees: (0..self.n)
                .map(|c| self.degrees[c].iter().flat_map(|a| other.degrees[c].iter().map(move |b| a + b)).collect())
                .collect(),
            cols: (0..self.n).map(|c| self.cols[c] * other.cols[c]).collect(),
            at_zero: (0..self.n).map(|c| self.at_zero[c].kron(&other.at_zero[c])).collect(),
            at_inf: (0..self.n).map(|c| self.at_inf[c].kron(&other.at_inf[c])).collect(),
        }
    }

    /// Dual of a vector bundle: degrees negated, gluing matrices replaced by their inverse transposes.
    pub fn dual(&self) -> Result<NodalTriple> {
        if !self.is_locally_free() {
            return Err(Error::Unsupported("the triple dual is only defined for vector bundles".into()));
        }
        let inv_t = |m: &Mat| m.inverse().map(|i| i.transpose()).ok_or_else(|| Error::validation("singular gluing matrix"));
        Ok(NodalTriple {
            field: self.field,
            n: self.n,
            degrees: self.degrees.iter().map(|d| d.iter().map(|x| -x).collect()).collect(),
            cols: self.cols.clone(),
            at_zero: self.at_zero.iter().map(inv_t).collect::<Result<_>>()?,
            at_inf: self.at_inf.iter().map(inv_t).collect::<Result<_>>()?,
        })
    }

    /// Pullback along the étale cover E_{nr} → E_n.
    pub fn pullback(&self, r: usize) -> NodalTriple {
        let n = self.n;
        let idx = |c: usize| c % n;
        NodalTriple {
            field: self.field,
            n: n * r,
            degrees: (0..n * r).map(|c| self.degrees[idx(c)].clone()).collect(),
            cols: (0..n * r).map(|c| self.cols[idx(c)]).collect(),
            at_zero: (0..n * r).map(|c| self.at_zero[idx(c)].clone()).collect(),
            at_inf: (0..n * r).map(|c| self.at_inf[idx(c)].clone()).collect(),
        }
    }

    /// Pushforward along the étale cover E_n → E_{n/r}.
    pub fn pushforward(&self, r: usize) -> Result<NodalTriple> {
        if r == 0 || !self.n.is_multiple_of(r) {
            return Err(Error::invalid(format!("cannot push forward from E{} along a cover of degree {r}", self.n)));
        }
        let big = self.n;
        let n = big / r;
        let f = self.field;
        let mut degrees = Vec::with_capacity(n);
        let mut cols = Vec::with_capacity(n);
        let mut at_zero = Vec::with_capacity(n);
        let mut at_inf = Vec::with_capacity(n);
        // node c of E_n lifts to nodes c + jn; columns are concatenated in order of j
        let col_off = |node: usize| -> usize { (0..node / n).map(|j| self.cols[node % n + j * n]).sum() };
        for c in 0..n {
            let lifts: Vec<usize> = (0..r).map(|j| c + j * n).collect();
            degrees.push(lifts.iter().flat_map(|&l| self.degrees[l].clone()).collect::<Vec<_>>());
            cols.push(lifts.iter().map(|&l| self.cols[l]).sum());
        }
        for c in 0..n {
            let rows: usize = degrees[c].len();
            let inf = (c + 1) % n;
            let mut z = Mat::zeros(f, rows, cols[c]);
            let mut w = Mat::zeros(f, rows, cols[inf]);
            let mut row = 0;
            for j in 0..r {
                let l = c + j * n;
                z.set_block(row, col_off(l), &self.at_zero[l]);
                w.set_block(row, col_off((l + 1) % big), &self.at_inf[l]);
                row += self.degrees[l].len();
            }
            at_zero.push(z);
            at_inf.push(w);
        }
        Ok(NodalTriple { field: f, n, degrees, cols, at_zero, at_inf })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "curve": { "cycle": self.n },
            "field": self.field.name(),
            "columns": self.cols,
            "components": (0..self.n).map(|c| json!({
                "degrees": self.degrees[c],
                "at_zero": self.at_zero[c].to_json(),
                "at_inf": self.at_inf[c].to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: Field, v: &Value) -> Result<NodalTriple> {
        let comps = v
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("triple needs a `components` array"))?;
        let cols: Vec<usize> = v
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("triple needs a `columns` array"))?
            .iter()
            .map(|x| x.as_u64().map(|c| c as usize).ok_or_else(|| Error::invalid("bad column count")))
            .collect::<Result<_>>()?;
        let n = comps.len();
        if cols.len() != n {
            return Err(Error::invalid("`columns` must have one entry per component"));
        }
        let mut degrees = Vec::new();
        let mut at_zero = Vec::new();
        let mut at_inf = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            let d: Vec<i64> = comp
                .get("degrees")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::invalid("component needs `degrees`"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| Error::invalid("bad degree")))
                .collect::<Result<_>>()?;
            let rows = d.len();
            at_zero.push(Mat::from_json(field, comp.get("at_zero").unwrap_or(&Value::Null), rows, cols[c])?);
            at_inf.push(Mat::from_json(field, comp.get("at_inf").unwrap_or(&Value::Null), rows, cols[(c + 1) % n])?);
            degrees.push(d);
        }
        NodalTriple::new(field, degrees, cols, at_zero, at_inf)
    }
}

impl fmt::Display for NodalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.n {
            let label = |pt: &str, node: usize| format!("M(L{}, {pt}) [node {}]", c + 1, node + 1);
            for (name, m) in [(label("0", c), &self.at_zero[c]), (label("inf", self.inf_node(c)), &self.at_inf[c])] {
                writeln!(f, "{name}")?;
                write_labeled(f, m, &self.degrees[c])?;
            }
        }
        Ok(())
    }
}

pub(crate) fn write_labeled(f: &mut fmt::Formatter<'_>, m: &Mat, labels: &[i64]) -> fmt::Result {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| match m.get(i, j) {
                    crate::field::Scalar::Fp { v, .. } => v.to_string(),
                    q => q.to_string(),
                })
                .collect()
        })
        .collect();
    let w = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    for (i, row) in cells.iter().enumerate() {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>w$}")).collect();
        writeln!(f, "  [ {} ]  {}", line.join(" "), labels[i])?;
    }
    Ok(())
}

/// Row position of every letter after sorting a component's letters by (degree, occurrence).
fn row_blocks(letters_on: &[Vec<(i64, usize)>]) -> Vec<Vec<usize>> {
    letters_on
        .iter()
        .map(|ls| {
            let mut order: Vec<usize> = (0..ls.len()).collect();
            order.sort_by_key(|&i| ls[i].0);
            let mut pos = vec![0; ls.len()];
            for (p, &i) in order.iter().enumerate() {
                pos[i] = p;
            }
            pos
        })
        .collect()
}

/// Walks the word: letter t sits on `comp[t]`; returns the column of its 0- and ∞-preimages.
/// With `closed`, the last ∞ reuses the first column (bands); otherwise both ends are fresh.
fn walk_columns(n: usize, comp: &[usize], closed: bool) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let len = comp.len();
    let mut count = vec![0usize; n];
    let mut alloc = |node: usize| {
        count[node] += 1;
        count[node] - 1
    };
    let mut zero = vec![0; len];
    let mut inf = vec![0; len];
    zero[0] = alloc(comp[0]);
    for t in 0..len {
        let node = (comp[t] + 1) % n;
        if t + 1 == len {
            inf[t] = if closed { zero[0] } else { alloc(node) };
        } else {
            inf[t] = alloc(node);
            zero[t + 1] = inf[t];
        }
    }
    (zero, inf, count)
}

/// Gluing matrices of B(d, m, p) by unrolling d; the last ∞-block is the companion matrix of p^m.
pub fn band_to_triple(b: &BandDescriptor) -> NodalTriple {
    let field = b.field();
    let n = b.n;
    let bs = b.m * b.k();
    let len = b.d.len();
    let comp: Vec<usize> = (0..len).map(|t| t % n).collect();
    let frob = Mat::companion(&b.p.pow(b.m as u64));
    build(field, n, &b.d, &comp, bs, true, Some(frob))
}

/// Gluing matrices of S(d, f): unit entries along the open word starting at component f.
pub fn string_to_triple(s: &StringDescriptor, field: Field) -> NodalTriple {
    let comp: Vec<usize> = (0..s.d.len()).map(|t| s.component_of(t)).collect();
    build(field, s.n, &s.d, &comp, 1, false, None)
}

fn build(field: Field, n: usize, d: &[i64], comp: &[usize], bs: usize, closed: bool, frob: Option<Mat>) -> NodalTriple {
    let len = d.len();
    let mut letters_on: Vec<Vec<(i64, usize)>> = vec![Vec::new(); n];
    let mut slot = vec![0; len];
    for t in 0..len {
        slot[t] = letters_on[comp[t]].len();
        letters_on[comp[t]].push((d[t], t));
    }
    let pos = row_blocks(&letters_on);
    let (zero, inf, count) = walk_columns(n, comp, closed);
    let id = Mat::identity(field, bs);
    let degrees: Vec<Vec<i64>> = letters_on
        .iter()
        .map(|ls| {
            let mut v: Vec<i64> = ls.iter().flat_map(|&(deg, _)| std::iter::repeat_n(deg, bs)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut at_zero: Vec<Mat> = (0..n).map(|c| Mat::zeros(field, degrees[c].len(), count[c] * bs)).collect();
    let mut at_inf: Vec<Mat> = (0..n).map(|c| Mat::zeros(field, degrees[c].len(), count[(c + 1) % n] * bs)).collect();
    for t in 0..len {
        let c = comp[t];
        let row = pos[c][slot[t]] * bs;
        at_zero[c].set_block(row, zero[t] * bs, &id);
        let block = match (&frob, t + 1 == len) {
            (Some(j), true) => j,
            _ => &id,
        };
        at_inf[c].set_block(row, inf[t] * bs, block);
    }
    let cols = count.iter().map(|k| k * bs).collect();
    NodalTriple { field, n, degrees, cols, at_zero, at_inf }
}

#[cfg(test)]
mod tests;
