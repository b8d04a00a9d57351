//! Birkhoff factorization T⁻¹·M·S = diag(z^{d₁}, …, z^{d_r}) of matrices over k[z, 1/z].

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::laurent::{Laurent, LaurentMatrix};
use crate::poly::Poly;

/// S over k[z], T over k[1/z], both with inverses, and the sorted exponents.
#[derive(Clone, Debug)]
pub struct Birkhoff {
    pub s: LaurentMatrix,
    pub s_inv: LaurentMatrix,
    pub t: LaurentMatrix,
    pub t_inv: LaurentMatrix,
    pub exponents: Vec<i64>,
}

impl Birkhoff {
    /// Checks T⁻¹MS = diag, S·S⁻¹ = 1 = T·T⁻¹ and the ring conditions.
    pub fn verify(&self, m: &LaurentMatrix) -> bool {
        let f = m.field();
        let n = m.size();
        let id = LaurentMatrix::identity(f, n);
        self.t_inv.mul(m).mul(&self.s) == LaurentMatrix::diagonal(f, &self.exponents)
            && self.s.mul(&self.s_inv) == id
            && self.t.mul(&self.t_inv) == id
            && self.s.over_polynomials()
            && self.s_inv.over_polynomials()
            && self.t.over_inverse_polynomials()
            && self.t_inv.over_inverse_polynomials()
    }

    pub fn splitting_type(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.exponents.iter().map(|d| -d).collect();
        v.sort_unstable();
        v
    }
}

/// Working state: n = T⁻¹·M·S with all four transforms kept in sync.
struct State {
    field: Field,
    r: usize,
    n: Vec<Vec<Laurent>>,
    s: Vec<Vec<Laurent>>,
    s_inv: Vec<Vec<Laurent>>,
    t: Vec<Vec<Laurent>>,
    t_inv: Vec<Vec<Laurent>>,
    /// det of the accumulated S (constant during the triangular phase).
    s_det: Scalar,
}

fn ident(f: Field, r: usize) -> Vec<Vec<Laurent>> {
    (0..r).map(|i| (0..r).map(|j| if i == j { Laurent::one(f) } else { Laurent::zero(f) }).collect()).collect()
}

fn to_matrix(f: Field, rows: Vec<Vec<Laurent>>) -> LaurentMatrix {
    LaurentMatrix::from_rows(f, rows).expect("square")
}

impl State {
    fn new(m: &LaurentMatrix) -> State {
        let f = m.field();
        let r = m.size();
        State {
            field: f,
            r,
            n: (0..r).map(|i| (0..r).map(|j| m.get(i, j).clone()).collect()).collect(),
            s: ident(f, r),
            s_inv: ident(f, r),
            t: ident(f, r),
            t_inv: ident(f, r),
            s_det: f.one(),
        }
    }

    /// col_dst += c·col_src, c ∈ k[z].
    fn col_addmul(&mut self, dst: usize, src: usize, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        for row in self.n.iter_mut().chain(self.s.iter_mut()) {
            let v = row[dst].add(&c.mul(&row[src]));
            row[dst] = v;
        }
        let neg = c.neg();
        let (a, b) = (self.s_inv[dst].clone(), &mut self.s_inv[src]);
        for (x, y) in b.iter_mut().zip(&a) {
            *x = x.add(&neg.mul(y));
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.n.iter_mut().chain(self.s.iter_mut()) {
            row.swap(i, j);
        }
        self.s_inv.swap(i, j);
        self.s_det = -&self.s_det;
    }

    fn col_scale(&mut self, j: usize, c: &Scalar) {
        let inv = c.inv().expect("nonzero scale");
        for row in self.n.iter_mut().chain(self.s.iter_mut()) {
            row[j] = row[j].scale(c);
        }
        for x in self.s_inv[j].iter_mut() {
            *x = x.scale(&inv);
        }
        self.s_det = &self.s_det * c;
    }

    /// row_dst += c·row_src, c ∈ k[1/z].
    fn row_addmul(&mut self, dst: usize, src: usize, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.n, &mut self.t_inv] {
            let src_row = m[src].clone();
            for (x, y) in m[dst].iter_mut().zip(&src_row) {
                *x = x.add(&c.mul(y));
            }
        }
        let neg = c.neg();
        for row in self.t.iter_mut() {
            let v = row[src].add(&neg.mul(&row[dst]));
            row[src] = v;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.n.swap(i, j);
        self.t_inv.swap(i, j);
        for row in self.t.iter_mut() {
            row.swap(i, j);
        }
    }

    /// Step 1: reduce to lower triangular form with diagonal z^{mᵢ}.
    /// Returns the diagonal exponents, or the offending determinant.
    fn triangularize(&mut self) -> Result<Vec<i64>> {
        let f = self.field;
        let r = self.r;
        let mut diag: Vec<Laurent> = Vec::with_capacity(r);
        for k in 0..r {
            loop {
                let nz: Vec<usize> = (k..r).filter(|&c| !self.n[k][c].is_zero()).collect();
                if nz.is_empty() {
                    return Err(Error::NotInvertible { determinant: "0".into() });
                }
                let shift = nz.iter().map(|&c| self.n[k][c].val().unwrap()).min().unwrap();
                let deg = |c: usize| self.n[k][c].top().unwrap() - shift;
                let p = *nz.iter().min_by_key(|&&c| (deg(c), c)).unwrap();
                if nz.len() == 1 {
                    self.col_swap(k, p);
                    break;
                }
                let a = self.n[k][p].to_poly(shift);
                for &c in nz.iter().filter(|&&c| c != p) {
                    let b = self.n[k][c].to_poly(shift);
                    let q = b.divrem(&a).0;
                    self.col_addmul(c, p, &Laurent::from_poly(&q.neg(), 0));
                }
            }
            diag.push(self.n[k][k].clone());
        }
        let mut exps = Vec::with_capacity(r);
        let mut det = Laurent::one(f);
        let mut unit = true;
        for g in &diag {
            det = det.mul(g);
            unit &= g.as_monomial().is_some();
        }
        if !unit {
            let det = det.scale(&self.s_det.inv().unwrap());
            return Err(Error::NotInvertible { determinant: det.to_string() });
        }
        for (k, g) in diag.iter().enumerate() {
            let (c, e) = g.as_monomial().unwrap();
            self.col_scale(k, &c.inv().unwrap());
            exps.push(e);
        }
        Ok(exps)
    }

    /// Clears the part of entry (i, j), i > j, outside the open interval (m_j, m_i).
    fn reduce_entry(&mut self, i: usize, j: usize, m: &[i64]) {
        let e = self.n[i][j].clone();
        if e.is_zero() {
            return;
        }
        let top = e.top().unwrap();
        let high = e.filter(m[i], top);
        if !high.is_zero() {
            self.col_addmul(j, i, &high.shift(-m[i]).neg());
        }
        let rest = self.n[i][j].clone();
        let low = rest.filter(rest.val().unwrap_or(0), m[j]);
        if !low.is_zero() {
            self.row_addmul(i, j, &low.shift(-m[j]).neg());
        }
    }

    /// Step 2 on the block of rows/columns (j, i), j < i, with diagonal z^{m_j}, z^{m_i} and
    /// p = entry (i, j) supported strictly between.
    fn exchange(&mut self, i: usize, j: usize, m: &mut [i64]) {
        let f = self.field;
        let p = self.n[i][j].clone();
        let (mj, mi) = (m[j], m[i]);
        let d = p.val().unwrap();
        debug_assert!(mj < d && p.top().unwrap() < mi);
        let u = p.to_poly(d);
        let gap = (mi - d) as usize;
        let zg = Poly::monomial(f.one(), gap);
        let (g, a, b) = u.xgcd(&zg);
        debug_assert!(g.is_one());
        let (a, b, u) = (Laurent::from_poly(&a, 0), Laurent::from_poly(&b, 0), Laurent::from_poly(&u, 0));
        let zl = Laurent::monomial(f.one(), gap as i64);
        // [col_j, col_i] ← [col_j, col_i]·[[a, z^gap], [b, −u]]
        for row in self.n.iter_mut().chain(self.s.iter_mut()) {
            let (x, y) = (row[j].clone(), row[i].clone());
            row[j] = a.mul(&x).add(&b.mul(&y));
            row[i] = zl.mul(&x).sub(&u.mul(&y));
        }
        // rows (j, i) of S⁻¹ ← [[u, z^gap], [b, −a]]·rows
        let (x, y) = (self.s_inv[j].clone(), self.s_inv[i].clone());
        self.s_inv[j] = x.iter().zip(&y).map(|(x, y)| u.mul(x).add(&zl.mul(y))).collect();
        self.s_inv[i] = x.iter().zip(&y).map(|(x, y)| b.mul(x).sub(&a.mul(y))).collect();
        self.row_swap(i, j);
        m[j] = d;
        m[i] = mj + mi - d;
    }

    /// Step 3: alternate reduction passes and exchanges until diagonal.
    fn diagonalize(&mut self, m: &mut [i64]) {
        let r = self.r;
        loop {
            let mut target = None;
            'scan: for dist in 1..r {
                for j in 0..r - dist {
                    let i = j + dist;
                    self.reduce_entry(i, j, m);
                    if !self.n[i][j].is_zero() {
                        target = Some((i, j));
                        break 'scan;
                    }
                }
            }
            match target {
                Some((i, j)) => self.exchange(i, j, m),
                None => return,
            }
        }
    }

    /// Simultaneous row/column permutation into increasing exponent order.
    fn sort(&mut self, m: &mut [i64]) {
        for k in 0..self.r {
            let best = (k..self.r).min_by_key(|&i| (m[i], i)).unwrap();
            if best != k {
                m.swap(k, best);
                self.row_swap(k, best);
                self.col_swap(k, best);
            }
        }
    }
}

/// Factors M with unit determinant as T·diag(z^{dᵢ})·S⁻¹, exponents sorted increasingly.
pub fn birkhoff_factor(m: &LaurentMatrix) -> Result<Birkhoff> {
    let f = m.field();
    let mut st = State::new(m);
    let mut exps = st.triangularize()?;
    st.diagonalize(&mut exps);
    st.sort(&mut exps);
    Ok(Birkhoff {
        s: to_matrix(f, st.s),
        s_inv: to_matrix(f, st.s_inv),
        t: to_matrix(f, st.t),
        t_inv: to_matrix(f, st.t_inv),
        exponents: exps,
    })
}

/// The multidegree {−dᵢ} of the bundle on P¹ glued by M.
pub fn splitting_type(m: &LaurentMatrix) -> Result<Vec<i64>> {
    Ok(birkhoff_factor(m)?.splitting_type())
}

/// Random product of `steps` elementary matrices over k[z] (or k[1/z] when `inverse`).
pub fn random_elementary<R: Rng>(field: Field, r: usize, steps: usize, span: i64, inverse: bool, rng: &mut R) -> LaurentMatrix {
    let mut acc = LaurentMatrix::identity(field, r);
    if r < 2 {
        let mut m = LaurentMatrix::zeros(field, 1);
        m.set(0, 0, Laurent::monomial(field.random_nonzero(rng, 5), 0));
        return m;
    }
    for _ in 0..steps {
        let mut e = LaurentMatrix::identity(field, r);
        if rng.gen_bool(0.2) {
            let i = rng.gen_range(0..r);
            e.set(i, i, Laurent::monomial(field.random_nonzero(rng, 5), 0));
        } else {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            let deg = rng.gen_range(0..=span.max(0));
            let coeffs = (0..=deg).map(|_| field.random(rng, 5)).collect();
            let c = if inverse {
                Laurent::new(field, -deg, coeffs)
            } else {
                Laurent::new(field, 0, coeffs)
            };
            e.set(i, j, c);
        }
        acc = acc.mul(&e);
    }
    acc
}
