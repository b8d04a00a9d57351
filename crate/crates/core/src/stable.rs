//! Stable bundles: degree sequences of stable bands on the nodal cubic, the Euclidean matrix
//! recursion on the cuspidal cubic and simplicity certificates.

use num_integer::Integer;
use serde_json::{json, Value};

use crate::descriptors::BandDescriptor;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Mat;
use crate::triples::{band_to_triple, CuspidalTriple, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowUp {
    A,
    B,
}

/// One reduction (x, y, x+y) → (x′, y′, x′+y′) with its blow-up type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub kind: BlowUp,
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSequence {
    pub rank: i64,
    pub degree: i64,
    /// The sequence for degree d − twist·r, with 0 ≤ d − twist·r < r.
    pub base: Vec<i64>,
    /// Every entry of `base` shifted by `twist`; sums to `degree`.
    pub sequence: Vec<i64>,
    pub twist: i64,
    pub chain: Vec<ReductionStep>,
}

impl StableSequence {
    /// B(d, 1, t − λ) on E₁.
    pub fn band(&self, lambda: &Scalar) -> Result<BandDescriptor> {
        BandDescriptor::linear(1, self.sequence.clone(), 1, lambda)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "degree": self.degree,
            "twist": self.twist,
            "base": self.base,
            "sequence": self.sequence,
            "chain": self.chain.iter().map(|s| json!({
                "from": [s.from.0, s.from.1, s.from.0 + s.from.1],
                "to": [s.to.0, s.to.1, s.to.0 + s.to.1],
                "type": if s.kind == BlowUp::A { "A" } else { "B" },
                "k": s.k,
            })).collect::<Vec<_>>(),
        })
    }
}

fn require_coprime(r: i64, d: i64) -> Result<()> {
    if r <= 0 {
        return Err(Error::invalid(format!("rank must be positive, got {r}")));
    }
    if r.gcd(&d) != 1 {
        return Err(Error::NotCoprime { rank: r, degree: d });
    }
    Ok(())
}

/// Degree sequence d of the stable bands B(d, 1, λ) of rank r and degree d on E₁.
pub fn stable_sequence(r: i64, d: i64) -> Result<StableSequence> {
    require_coprime(r, d)?;
    let twist = d.div_euclid(r);
    let d0 = d - twist * r;
    let mut chain = Vec::new();
    let base = if r == 1 {
        vec![0]
    } else {
        let (mut x, mut y) = (d0.max(r - d0), d0.min(r - d0));
        // letters: false = α, true = β
        let word = if x == y {
            vec![false, true]
        } else {
            while y > 1 {
                let k = (x + y) / y - 1;
                let s = (x + y) % y;
                assert!(s > 0, "coprime input gives 0 < s < y");
                let (kind, to) = if 2 * s >= y { (BlowUp::A, (s, y - s)) } else { (BlowUp::B, (y - s, s)) };
                chain.push(ReductionStep { from: (x, y), to, kind, k });
                (x, y) = to;
            }
            let mut word = vec![false; x as usize];
            word.push(true);
            for step in chain.iter().rev() {
                let (ka, kb) = match step.kind {
                    BlowUp::A => (step.k + 1, step.k),
                    BlowUp::B => (step.k, step.k + 1),
                };
                let mut next = Vec::new();
                for &letter in &word {
                    let len = if letter { kb } else { ka };
                    next.extend(std::iter::repeat_n(false, len as usize));
                    next.push(true);
                }
                word = next;
            }
            word
        };
        let alpha_is_one = d0 > r - d0;
        assert_eq!(word.len(), r as usize);
        word.iter().map(|&beta| i64::from(beta != alpha_is_one)).collect()
    };
    let sequence = base.iter().map(|x| x + twist).collect();
    Ok(StableSequence { rank: r, degree: d, base, sequence, twist, chain })
}

/// c, r₁, r₂ with c·r + r₂ = d, r₁ + r₂ = r and 0 ≤ r₂ < r.
pub fn splitting_data(r: i64, d: i64) -> (i64, usize, usize) {
    let c = d.div_euclid(r);
    let r2 = d.rem_euclid(r) as usize;
    (c, r as usize - r2, r2)
}

/// The simple block matrix B(λ) with blocks of sizes (r₁, r₂), built by reversing Euclid.
pub fn block_matrix(field: Field, r1: usize, r2: usize, lambda: &Scalar) -> Mat {
    assert!(r1 >= 1 && r1.gcd(&r2) == 1, "block sizes ({r1}, {r2}) must be coprime");
    let r = r1 + r2;
    let mut m = Mat::zeros(field, r, r);
    match (r1, r2) {
        (1, 0) => m.set(0, 0, lambda.clone()),
        (1, 1) => {
            m.set(0, 1, field.one());
            m.set(1, 1, lambda.clone());
        }
        _ if r1 > r2 => {
            m.set_block(0, 0, &block_matrix(field, r1 - r2, r2, lambda));
            m.set_block(r1 - r2, r1, &Mat::identity(field, r2));
        }
        _ => {
            m.set_block(0, r1, &Mat::identity(field, r1));
            m.set_block(r1, r1, &block_matrix(field, r1, r2 - r1, lambda));
        }
    }
    m
}

/// Block sizes visited by `block_matrix`, from (r₁, r₂) down to the base case.
pub fn block_chain(r1: usize, r2: usize) -> Vec<(usize, usize)> {
    let mut chain = vec![(r1, r2)];
    let (mut a, mut b) = (r1, r2);
    while a >= 1 && (a, b) != (1, 0) && (a, b) != (1, 1) {
        if a > b {
            a -= b;
        } else {
            b -= a;
        }
        chain.push((a, b));
    }
    chain
}

/// The simple vector bundle of rank r and degree d on the cuspidal cubic with parameter λ:
/// ĩ = I + ε·B(λ) over Õ(c)^{r₁} ⊕ Õ(c+1)^{r₂}.
pub fn cuspidal_simple_matrix(r: i64, d: i64, lambda: &Scalar) -> Result<CuspidalTriple> {
    require_coprime(r, d)?;
    let field = lambda.field();
    let (c, r1, r2) = splitting_data(r, d);
    let degrees = [vec![c; r1], vec![c + 1; r2]].concat();
    let i0 = Mat::identity(field, r as usize);
    let ieps = block_matrix(field, r1, r2, lambda);
    CuspidalTriple::new(field, degrees, i0, ieps)
}

/// The simple torsion-free sheaf of rank r and degree d that is not locally free:
/// Õ(c)^{r₁} ⊕ Õ(c+1)^{r₂} with c·r + r₂ = d − 1, i(0) = (I_r | 0) and i_ε(0) = tf_matrix(r₁, r₂).
pub fn cuspidal_tf_nonlocallyfree(r: i64, d: i64, field: Field) -> Result<CuspidalTriple> {
    require_coprime(r, d)?;
    let (c, r1, r2) = splitting_data(r, d - 1);
    let n = r as usize;
    let degrees = [vec![c; r1], vec![c + 1; r2]].concat();
    let mut i0 = Mat::zeros(field, n, n + 1);
    i0.set_block(0, 0, &Mat::identity(field, n));
    CuspidalTriple::new(field, degrees, i0, tf_matrix(field, r1, r2))
}

/// i_ε(0) of the simple non-locally-free sheaf over Õ(c)^{r₁} ⊕ Õ(c+1)^{r₂}, an r × (r+1)
/// matrix; needs gcd(r₁ − 1, r₂ + 1) = 1. For r₁ > r₂ the top right block is (0 | I_{r₂+1})
/// over the matrix for (r₁ − r₂ − 1, r₂) padded by a zero row; otherwise the sheaf is the dual
/// of the one for (r₂ + 2, r₁ − 2).
pub fn tf_matrix(field: Field, r1: usize, r2: usize) -> Mat {
    let r = r1 + r2;
    let mut m = Mat::zeros(field, r, r + 1);
    if r1 == 0 {
        for i in 0..r {
            m.set(i, i + 1, field.one());
        }
        return m;
    }
    if r1 > r2 {
        let inner = tf_matrix(field, r1 - r2 - 1, r2);
        m.set_block(0, 0, &inner);
        m.set_block(r1 - r2 - 1, r1, &Mat::identity(field, r2 + 1));
        return m;
    }
    assert!(r1 >= 2 && (r1 - 1).gcd(&(r2 + 1)) == 1, "no simple sheaf for blocks ({r1}, {r2})");
    let (s1, s2) = (r2 + 2, r1 - 2);
    let degrees = [vec![0i64; s1], vec![1; s2]].concat();
    let mut i0 = Mat::zeros(field, r, r + 1);
    i0.set_block(0, 0, &Mat::identity(field, r));
    let t = CuspidalTriple { field, degrees, cols: r + 1, i0, ieps: tf_matrix(field, s1, s2) }.dual();
    assert_eq!(t.degrees.iter().filter(|&&a| a == t.degrees[0]).count(), r1);
    t.ieps
}

/// End-dimension one, by the triples oracle.
pub fn certify_simple(t: &Triple) -> bool {
    t.end_dim() == 1
}

/// The stable band of rank r and degree d on E₁ with parameter λ, as a triple.
pub fn stable_band_triple(r: i64, d: i64, lambda: &Scalar) -> Result<Triple> {
    let b = stable_sequence(r, d)?.band(lambda)?;
    Ok(Triple::Nodal(band_to_triple(&b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::{IsoResult, NodalTriple};

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    fn m(field: Field, rows: &[&[i64]]) -> Mat {
        Mat::from_ints(field, rows)
    }

    #[test]
    fn block_chain_follows_euclid() {
        assert_eq!(block_chain(3, 2), vec![(3, 2), (1, 2), (1, 1)]);
        assert_eq!(block_chain(1, 0), vec![(1, 0)]);
        assert_eq!(block_chain(4, 1), vec![(4, 1), (3, 1), (2, 1), (1, 1)]);
    }

    #[test]
    fn golden_sequence() {
        let s = stable_sequence(19, 11).unwrap();
        assert_eq!(s.sequence, vec![1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0]);
        let trace: Vec<(i64, i64)> = s.chain.iter().map(|c| c.to).collect();
        assert_eq!(trace, vec![(5, 3), (2, 1)]);
        assert_eq!(stable_sequence(2, 1).unwrap().sequence, vec![0, 1]);
        assert_eq!(stable_sequence(3, 1).unwrap().sequence, vec![0, 0, 1]);
    }

    #[test]
    fn twisting() {
        let s = stable_sequence(3, 7).unwrap();
        assert_eq!(s.twist, 2);
        assert_eq!(s.sequence.iter().sum::<i64>(), 7);
        let s = stable_sequence(2, -1).unwrap();
        assert_eq!(s.sequence, vec![-1, 0]);
        assert!(matches!(stable_sequence(4, 2), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn sequences_are_simple_and_balanced() {
        for r in 1..=8i64 {
            for d in 0..r {
                if r.gcd(&d) != 1 {
                    continue;
                }
                let s = stable_sequence(r, d).unwrap();
                assert_eq!(s.sequence.len(), r as usize);
                assert_eq!(s.sequence.iter().sum::<i64>(), d);
                assert!(certify_simple(&stable_band_triple(r, d, &f7().int(3)).unwrap()), "({r}, {d})");
            }
        }
    }

    #[test]
    fn golden_cuspidal_bundles() {
        let q = Field::Rational;
        let l = q.int(5);
        let t = cuspidal_simple_matrix(1, 0, &l).unwrap();
        assert_eq!((t.i0.clone(), t.ieps.clone()), (m(q, &[&[1]]), m(q, &[&[5]])));
        let t = cuspidal_simple_matrix(2, 1, &l).unwrap();
        assert_eq!(t.degrees, vec![0, 1]);
        assert_eq!(t.ieps, m(q, &[&[0, 1], &[0, 5]]));
        let t = cuspidal_simple_matrix(7, 12, &l).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 2, 2, 2, 2, 2]);
        let expect = m(
            q,
            &[
                &[0, 0, 1, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0, 5, 1],
                &[0, 0, 0, 0, 0, 0, 0],
            ],
        );
        assert_eq!(t.ieps, expect);
        assert_eq!(t.i0, Mat::identity(q, 7));
    }

    #[test]
    fn golden_cuspidal_torsion_free() {
        let q = Field::Rational;
        let t = cuspidal_tf_nonlocallyfree(1, 0, q).unwrap();
        assert_eq!(t.degrees, vec![-1]);
        assert_eq!((t.i0.clone(), t.ieps.clone()), (m(q, &[&[1, 0]]), m(q, &[&[0, 1]])));
        let t = cuspidal_tf_nonlocallyfree(2, 1, q).unwrap();
        assert_eq!(t.degrees, vec![0, 0]);
        assert_eq!(t.i0, m(q, &[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(t.ieps, m(q, &[&[0, 1, 0], &[0, 0, 1]]));
    }

    #[test]
    fn cuspidal_objects_are_simple() {
        for r in 1..=8i64 {
            for d in -r..=r {
                if r.gcd(&d) != 1 {
                    continue;
                }
                let vb = cuspidal_simple_matrix(r, d, &f7().int(2)).unwrap();
                assert_eq!(vb.end_dim(), 1, "vector bundle ({r}, {d})");
                assert_eq!(vb.degree(), d);
                let tf = cuspidal_tf_nonlocallyfree(r, d, f7()).unwrap();
                assert_eq!(tf.end_dim(), 1, "torsion free ({r}, {d})");
                assert_eq!(tf.degree(), d);
            }
        }
    }

    #[test]
    fn parameters_separate_bundles() {
        for r in 1..=5i64 {
            for d in 0..r {
                if r.gcd(&d) != 1 {
                    continue;
                }
                let ts: Vec<CuspidalTriple> = (0..7).map(|l| cuspidal_simple_matrix(r, d, &f7().int(l)).unwrap()).collect();
                for (i, a) in ts.iter().enumerate() {
                    for (j, b) in ts.iter().enumerate() {
                        let expect = if i == j { IsoResult::Isomorphic } else { IsoResult::NotIsomorphic };
                        assert_eq!(a.is_isomorphic(b, 1), expect, "({r}, {d}) λ = {i}, {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_simple_examples() {
        let f = f7();
        let o = NodalTriple::structure_sheaf(f, 1);
        assert!(!certify_simple(&Triple::Nodal(o.direct_sum(&o))));
        let f2 = band_to_triple(&BandDescriptor::unipotent(f, 1, 2));
        assert!(!certify_simple(&Triple::Nodal(f2)));
    }
}
