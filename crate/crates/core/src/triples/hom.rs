//! Morphism spaces between nodal triples as exact linear systems, cohomology and isomorphism tests.
//!
//! A morphism (F, f) consists of homogeneous forms F_{ba} of degree deg(b) − deg(a) between
//! line summands on each component (zero for negative degree) and a linear map f at each node,
//! subject to F(pt)·ĩ₁(pt) = ĩ₂(pt)·f at every preimage pt of a node. Only the values of a form
//! at 0 and ∞ enter the equations; its remaining coefficients are free.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::NodalTriple;
use crate::field::{Field, Scalar};
use crate::linalg::{Mat, SparseSystem};

pub const DEFAULT_ISO_SEED: u64 = 0x5eed;

const ISO_TRIES: usize = 20;
const EXHAUSTIVE_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub h0: usize,
    pub h1: usize,
}

impl Cohomology {
    pub fn chi(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoResult {
    Isomorphic,
    NotIsomorphic,
    /// No invertible morphism was found by sampling, but one may exist.
    Inconclusive,
}

impl IsoResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            IsoResult::Isomorphic => "isomorphic",
            IsoResult::NotIsomorphic => "not-isomorphic",
            IsoResult::Inconclusive => "inconclusive",
        }
    }
}

/// Unknowns for one form F_{ba}: its values at 0 and ∞ (one unknown when the degree is 0).
struct FormVar {
    src: usize,
    dst: usize,
    at_zero: usize,
    at_inf: usize,
}

pub(crate) struct NodalHom {
    system: SparseSystem,
    free: usize,
    forms: Vec<Vec<FormVar>>,
    f_off: Vec<usize>,
}

impl NodalHom {
    pub(crate) fn new(src: &NodalTriple, dst: &NodalTriple) -> NodalHom {
        assert_eq!(src.n, dst.n, "triples live on different curves");
        let n = src.n;
        let mut nvars = 0;
        let mut free = 0;
        let mut forms = Vec::with_capacity(n);
        for c in 0..n {
            let mut v = Vec::new();
            for (b, &db) in dst.degrees[c].iter().enumerate() {
                for (a, &da) in src.degrees[c].iter().enumerate() {
                    let e = db - da;
                    if e < 0 {
                        continue;
                    }
                    let at_zero = nvars;
                    let at_inf = if e == 0 { nvars } else { nvars + 1 };
                    nvars = at_inf + 1;
                    free += (e - 1).max(0) as usize;
                    v.push(FormVar { src: a, dst: b, at_zero, at_inf });
                }
            }
            forms.push(v);
        }
        let mut f_off = Vec::with_capacity(n);
        for node in 0..n {
            f_off.push(nvars);
            nvars += dst.cols[node] * src.cols[node];
        }
        let mut system = SparseSystem::new(src.field, nvars);
        for c in 0..n {
            for (zero_pt, node) in [(true, c), (false, src.inf_node(c))] {
                let (m1, m2) = if zero_pt { (&src.at_zero[c], &dst.at_zero[c]) } else { (&src.at_inf[c], &dst.at_inf[c]) };
                let (k1, k2) = (src.cols[node], dst.cols[node]);
                for b in 0..dst.degrees[c].len() {
                    for k in 0..k1 {
                        let mut row = Vec::new();
                        for fv in forms[c].iter().filter(|fv| fv.dst == b) {
                            let var = if zero_pt { fv.at_zero } else { fv.at_inf };
                            row.push((var, m1.get(fv.src, k).clone()));
                        }
                        for l in 0..k2 {
                            row.push((f_off[node] + l * k1 + k, -m2.get(b, l)));
                        }
                        system.push(row);
                    }
                }
            }
        }
        NodalHom { system, free, forms, f_off }
    }

    pub(crate) fn dim(&self) -> usize {
        self.system.nullity() + self.free
    }

    /// Whether the morphism given by a solution vector is an isomorphism: on each component the
    /// constant blocks between summands of equal degree are invertible, and so is f at every node.
    fn is_invertible(&self, src: &NodalTriple, dst: &NodalTriple, x: &[Scalar]) -> bool {
        let field = src.field;
        for c in 0..src.n {
            let mut degs: Vec<i64> = src.degrees[c].clone();
            degs.sort_unstable();
            degs.dedup();
            for &g in &degs {
                let rows: Vec<usize> = (0..dst.degrees[c].len()).filter(|&b| dst.degrees[c][b] == g).collect();
                let cols: Vec<usize> = (0..src.degrees[c].len()).filter(|&a| src.degrees[c][a] == g).collect();
                if rows.len() != cols.len() {
                    return false;
                }
                let mut m = Mat::zeros(field, rows.len(), cols.len());
                for fv in &self.forms[c] {
                    if let (Some(i), Some(j)) = (rows.iter().position(|&b| b == fv.dst), cols.iter().position(|&a| a == fv.src)) {
                        if src.degrees[c][fv.src] == g {
                            m.set(i, j, x[fv.at_zero].clone());
                        }
                    }
                }
                if m.rank() != rows.len() {
                    return false;
                }
            }
            if dst.degrees[c].len() != src.degrees[c].len() {
                return false;
            }
        }
        for node in 0..src.n {
            let (k1, k2) = (src.cols[node], dst.cols[node]);
            if k1 != k2 {
                return false;
            }
            let mut m = Mat::zeros(field, k2, k1);
            for l in 0..k2 {
                for k in 0..k1 {
                    m.set(l, k, x[self.f_off[node] + l * k1 + k].clone());
                }
            }
            if m.rank() != k1 {
                return false;
            }
        }
        true
    }
}

/// dim Hom(T₁, T₂) over the base field.
pub fn hom_dim(src: &NodalTriple, dst: &NodalTriple) -> usize {
    NodalHom::new(src, dst).dim()
}

/// h⁰ and h¹ from 0 → F → F̃ ⊕ M → F̃ ⊗ Ã → 0: h⁰ is the kernel of the evaluation map on global
/// sections, h¹ its cokernel plus h¹(F̃).
pub fn cohomology(t: &NodalTriple) -> Cohomology {
    let n = t.n;
    let mut nvars = 0;
    let mut sec: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(n);
    let mut free = 0;
    let mut h1_tilde = 0;
    for c in 0..n {
        let mut v = Vec::new();
        for &a in &t.degrees[c] {
            if a < 0 {
                h1_tilde += (-a - 1) as usize;
                v.push(None);
                continue;
            }
            let z = nvars;
            let w = if a == 0 { nvars } else { nvars + 1 };
            nvars = w + 1;
            free += (a - 1).max(0) as usize;
            v.push(Some((z, w)));
        }
        sec.push(v);
    }
    let m_off: Vec<usize> = (0..n)
        .map(|node| {
            let o = nvars;
            nvars += t.cols[node];
            o
        })
        .collect();
    let mut system = SparseSystem::new(t.field, nvars);
    let mut target = 0;
    for c in 0..n {
        for (zero_pt, node) in [(true, c), (false, t.inf_node(c))] {
            let m = if zero_pt { &t.at_zero[c] } else { &t.at_inf[c] };
            for (b, s) in sec[c].iter().enumerate() {
                target += 1;
                let mut row = Vec::new();
                if let Some((z, w)) = s {
                    row.push((if zero_pt { *z } else { *w }, t.field.one()));
                }
                for k in 0..t.cols[node] {
                    row.push((m_off[node] + k, -m.get(b, k)));
                }
                system.push(row);
            }
        }
    }
    let rank = system.rank();
    Cohomology { h0: nvars - rank + free, h1: target - rank + h1_tilde }
}

/// Searches the span of `basis` for a vector accepted by `invertible`.
pub(crate) fn search_invertible(field: Field, basis: &[Vec<Scalar>], seed: u64, invertible: impl Fn(&[Scalar]) -> bool) -> IsoResult {
    let dim = basis.len();
    if dim == 0 {
        return IsoResult::NotIsomorphic;
    }
    let combine = |coeffs: &[Scalar]| -> Vec<Scalar> {
        let len = basis[0].len();
        let mut x = vec![field.zero(); len];
        for (c, v) in coeffs.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &(c * vi);
            }
        }
        x
    };
    if let Some(q) = field.size() {
        let total = (q as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total <= EXHAUSTIVE_LIMIT as u128 {
            for idx in 1..total as u64 {
                let mut rest = idx;
                let coeffs: Vec<Scalar> = (0..dim)
                    .map(|_| {
                        let d = rest % q;
                        rest /= q;
                        field.element(d)
                    })
                    .collect();
                if invertible(&combine(&coeffs)) {
                    return IsoResult::Isomorphic;
                }
            }
            return IsoResult::NotIsomorphic;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (4 * dim as i64).max(16);
    for _ in 0..ISO_TRIES {
        let coeffs: Vec<Scalar> = (0..dim).map(|_| field.random(&mut rng, bound)).collect();
        if invertible(&combine(&coeffs)) {
            return IsoResult::Isomorphic;
        }
    }
    IsoResult::Inconclusive
}

/// Decides T₁ ≅ T₂. Mismatched Hom dimensions settle the question at once; otherwise the
/// Hom space is enumerated (small finite fields) or sampled.
pub fn is_isomorphic(a: &NodalTriple, b: &NodalTriple, seed: u64) -> IsoResult {
    if a.n != b.n || (0..a.n).any(|c| a.cols[c] != b.cols[c] || a.degrees[c].len() != b.degrees[c].len()) {
        return IsoResult::NotIsomorphic;
    }
    let ab = NodalHom::new(a, b);
    let dims = [ab.dim(), hom_dim(b, a), hom_dim(a, a), hom_dim(b, b)];
    if dims.iter().any(|&d| d != dims[0]) {
        return IsoResult::NotIsomorphic;
    }
    let basis = ab.system.nullspace();
    search_invertible(a.field, &basis, seed, |x| ab.is_invertible(a, b, x))
}
