//! Closed formulas on descriptors: duals, tensor products, unipotent Clebsch–Gordan rules,
//! étale pullback and pushforward, and the cohomology of bands.

use std::fmt;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::descriptors::{is_periodic, BandDescriptor, Charge, Descriptor, StringDescriptor};
use crate::error::{Error, Result};
use crate::factor::factor;
use crate::field::{Field, Scalar};
use crate::linalg::Mat;
use crate::poly::Poly;
use crate::triples::Cohomology;

/// A direct sum of indecomposables with multiplicities, in canonical form and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub summands: Vec<(Descriptor, usize)>,
}

impl DecompositionResult {
    pub fn new(parts: impl IntoIterator<Item = Descriptor>) -> DecompositionResult {
        let mut keyed: Vec<(String, Descriptor)> = parts
            .into_iter()
            .map(|d| {
                let c = d.canonical();
                (c.to_string(), c)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let mut summands: Vec<(Descriptor, usize)> = Vec::new();
        for (_, d) in keyed {
            match summands.last_mut() {
                Some((e, k)) if *e == d => *k += 1,
                _ => summands.push((d, 1)),
            }
        }
        DecompositionResult { summands }
    }

    pub fn charge(&self) -> Charge {
        self.summands.iter().map(|(d, k)| {
            let c = d.charge();
            Charge::new(c.rank * *k as i64, c.degree * *k as i64)
        }).sum()
    }

    /// Every summand repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<Descriptor> {
        self.summands.iter().flat_map(|(d, k)| std::iter::repeat_n(d.clone(), *k)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "summands": self.summands.iter().map(|(d, k)| json!({
                "descriptor": d.to_json(),
                "multiplicity": k,
                "display": d.to_string(),
            })).collect::<Vec<_>>(),
            "charge": self.charge().to_json(),
        })
    }
}

impl fmt::Display for DecompositionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|(d, k)| if *k == 1 { d.to_string() } else { format!("{k} x {d}") })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// B(d, m, p)∨ = B(−d, m, p*) with p* the monic reciprocal of p.
pub fn dual_band(b: &BandDescriptor) -> BandDescriptor {
    let d = b.d.iter().map(|x| -x).collect();
    BandDescriptor::new(b.n, d, b.m, b.p.reversed()).expect("the reciprocal of a valid parameter is valid")
}

/// S(e, f)∨ = S(κ − e, f) with κ = (−1, 0, …, 0, −1), or (−2) for a single letter.
pub fn dual_string(s: &StringDescriptor) -> StringDescriptor {
    let len = s.d.len();
    let mut d: Vec<i64> = s.d.iter().map(|x| -x).collect();
    d[0] -= 1;
    d[len - 1] -= 1;
    StringDescriptor { d, ..s.clone() }
}

pub fn dual(x: &Descriptor) -> Descriptor {
    match x {
        Descriptor::Band(b) => Descriptor::Band(dual_band(b)),
        Descriptor::String(s) => Descriptor::String(dual_string(s)),
    }
}

/// Jordan type (block sizes, descending) of a nilpotent matrix.
fn nilpotent_jordan_type(n: &Mat) -> Vec<usize> {
    let dim = n.rows();
    let mut ranks = vec![dim];
    let mut power = Mat::identity(n.field(), dim);
    while *ranks.last().unwrap() > 0 {
        power = power.mul(n);
        ranks.push(power.rank());
    }
    // blocks of size ≥ j: ranks[j-1] − ranks[j]
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut sizes = Vec::new();
    for j in (1..=at_least.len()).rev() {
        let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(j, exact));
    }
    sizes
}

fn shift_matrix(field: Field, e: usize) -> Mat {
    let mut j = Mat::zeros(field, e, e);
    for i in 0..e.saturating_sub(1) {
        j.set(i, i + 1, field.one());
    }
    j
}

/// The h with F_e ⊗ F_f ≅ ⊕ F_h, descending. In characteristic p this is the Jordan type of
/// t⊗1 + 1⊗t on k[t]/tᵉ ⊗ k[t]/tᶠ.
pub fn tensor_unipotent(e: usize, f: usize, field: Field) -> Result<Vec<usize>> {
    if e == 0 || f == 0 {
        return Err(Error::invalid("unipotent ranks must be positive"));
    }
    let (e, f) = (e.max(f), e.min(f));
    if field.characteristic() == 0 {
        return Ok((0..f).map(|i| e + f - 2 * i - 1).collect());
    }
    let (je, jf) = (shift_matrix(field, e), shift_matrix(field, f));
    let n = je.kron(&Mat::identity(field, f)).add(&Mat::identity(field, e).kron(&jf));
    Ok(nilpotent_jordan_type(&n))
}

/// B(seq, m, t − Λ), with a periodic seq = gˢ split along the factors of tˢ − Λ: each qᵉ
/// contributes B(g, m·e, q).
pub fn split_periodic(n: usize, seq: &[i64], m: usize, lambda: &Scalar) -> Result<Vec<BandDescriptor>> {
    match is_periodic(seq, n) {
        None => Ok(vec![BandDescriptor::linear(n, seq.to_vec(), m, lambda)?]),
        Some((g, s)) => {
            let field = lambda.field();
            let poly = Poly::monomial(field.one(), s).sub(&Poly::constant(lambda.clone()));
            factor(&poly)?
                .into_iter()
                .map(|(q, e)| BandDescriptor::new(n, g.clone(), m * e, q))
                .collect()
        }
    }
}

fn require_linear(b: &BandDescriptor) -> Result<Scalar> {
    b.lambda().ok_or_else(|| {
        Error::Unsupported(format!("{b}: closed formulas need a linear parameter; use the triple-level tensor instead"))
    })
}

fn require_char_zero_for_blocks(field: Field, m: usize) -> Result<()> {
    if m > 1 && field.characteristic() != 0 {
        return Err(Error::Unsupported(format!(
            "splitting off F_m (m = {m}) relies on characteristic 0, but the field is {}",
            field.name()
        )));
    }
    Ok(())
}

/// B(d, m, λ) ⊗ B(e, m′, μ) ≅ ⊕ᵢ ⊕_h B(fᵢ, h, λ^{l/g} μ^{k/g}), where k, l are the numbers of
/// passes, g = gcd(k, l), fᵢ(j) = d(j) + e(j + i·n) read cyclically over lcm(k, l) passes and h
/// runs over F_m ⊗ F_{m′}.
pub fn tensor_bands(a: &BandDescriptor, b: &BandDescriptor) -> Result<DecompositionResult> {
    if a.n != b.n {
        return Err(Error::invalid(format!("bands live on E{} and E{}", a.n, b.n)));
    }
    if a.field() != b.field() {
        return Err(Error::invalid("bands are defined over different fields"));
    }
    let (lambda, mu) = (require_linear(a)?, require_linear(b)?);
    let field = a.field();
    require_char_zero_for_blocks(field, a.m.max(b.m))?;
    let n = a.n;
    let (k, l) = (a.r(), b.r());
    let g = k.gcd(&l);
    let big = k.lcm(&l) * n;
    let param = &lambda.pow((l / g) as i64) * &mu.pow((k / g) as i64);
    let hs = tensor_unipotent(a.m, b.m, field)?;
    let mut parts = Vec::new();
    for i in 0..g {
        let f: Vec<i64> = (0..big).map(|j| a.d[j % a.d.len()] + b.d[(j + i * n) % b.d.len()]).collect();
        for &h in &hs {
            parts.extend(split_periodic(n, &f, h, &param)?.into_iter().map(Descriptor::Band));
        }
    }
    Ok(DecompositionResult::new(parts))
}

/// π_r* B(d, m, λ) on E_{nr}. With k passes and g = gcd(k, r) this is
/// ⊕_{i<g} B(σⁱ(d)^{r/g}, m, λ^{r/g}) where σ rotates d by n places; for g = 1 it is B(dʳ, m, λʳ).
pub fn pullback_etale(b: &BandDescriptor, r: usize) -> Result<DecompositionResult> {
    if r == 0 {
        return Err(Error::invalid("covering degree must be positive"));
    }
    let lambda = require_linear(b)?;
    require_char_zero_for_blocks(b.field(), b.m)?;
    let g = b.r().gcd(&r);
    let param = lambda.pow((r / g) as i64);
    let mut parts = Vec::with_capacity(g);
    for i in 0..g {
        let mut d = b.d.clone();
        d.rotate_left(i * b.n);
        parts.push(Descriptor::Band(BandDescriptor::linear(b.n * r, d.repeat(r / g), b.m, &param)?));
    }
    Ok(DecompositionResult::new(parts))
}

/// π_* (L(d, λ) ⊗ F_m) for d of length divisible by n, which is B(d, m, t − λ) when d is not
/// periodic and decomposable otherwise.
pub fn pushforward_line(n: usize, d: &[i64], lambda: &Scalar, m: usize) -> Result<BandDescriptor> {
    if n == 0 || d.is_empty() || !d.len().is_multiple_of(n) {
        return Err(Error::invalid(format!("a line bundle on a cover of E{n} needs a multidegree of length divisible by {n}")));
    }
    if is_periodic(d, n).is_some() {
        let parts = split_periodic(n, d, m, lambda)?;
        return Err(Error::Decomposable { summands: parts.iter().map(|b| b.to_string()).collect() });
    }
    BandDescriptor::linear(n, d.to_vec(), m, lambda)
}

/// θ(d): d read cyclically; each maximal run p of nonnegative entries counts |p|, plus one unless
/// p is all zeros or covers all of d.
pub fn theta(d: &[i64]) -> i64 {
    let len = d.len();
    let Some(start) = d.iter().position(|&x| x < 0) else {
        return len as i64;
    };
    let mut total = 0;
    let mut run = 0;
    let mut zeros = true;
    for step in 1..=len {
        let x = d[(start + step) % len];
        if x >= 0 {
            run += 1;
            zeros &= x == 0;
        } else if run > 0 {
            total += run + if zeros { 0 } else { 1 };
            run = 0;
            zeros = true;
        }
    }
    total
}

/// h⁰ = mk(Σ(dᵢ+1)⁺ − θ(d)) + δ with δ = 1 exactly for F_m, and h¹ = h⁰ − deg.
pub fn cohomology_formula(b: &BandDescriptor) -> Cohomology {
    let mk = (b.m * b.k()) as i64;
    let positive: i64 = b.d.iter().map(|&x| (x + 1).max(0)).sum();
    let delta = b.d.iter().all(|&x| x == 0) && b.lambda().is_some_and(|l| l.is_one());
    let h0 = mk * (positive - theta(&b.d)) + i64::from(delta);
    let h1 = h0 - b.charge().degree;
    Cohomology {
        h0: usize::try_from(h0).expect("h0 formula is nonnegative"),
        h1: usize::try_from(h1).expect("h1 formula is nonnegative"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::{band_to_triple, cohomology, string_to_triple};

    fn q() -> Field {
        Field::Rational
    }

    fn band(n: usize, d: &[i64], lambda: i64) -> BandDescriptor {
        BandDescriptor::linear(n, d.to_vec(), 1, &q().int(lambda)).unwrap()
    }

    #[test]
    fn duals() {
        let b = band(1, &[1, -1], 3);
        let d = dual_band(&b);
        assert_eq!(d.d, vec![-1, 1]);
        assert_eq!(d.lambda().unwrap(), q().int(3).inv().unwrap());
        let s = StringDescriptor::new(1, vec![-1], 1).unwrap();
        assert_eq!(dual_string(&s), s);
        let s = StringDescriptor::new(2, vec![2, 0, 1], 2).unwrap();
        assert_eq!(dual_string(&s).d, vec![-3, 0, -2]);
        assert_eq!(dual_string(&dual_string(&s)), s);
    }

    #[test]
    fn unipotent_products() {
        assert_eq!(tensor_unipotent(2, 2, q()).unwrap(), vec![3, 1]);
        assert_eq!(tensor_unipotent(1, 4, q()).unwrap(), vec![4]);
        assert_eq!(tensor_unipotent(2, 2, Field::prime(2).unwrap()).unwrap(), vec![2, 2]);
        assert_eq!(tensor_unipotent(3, 2, Field::prime(5).unwrap()).unwrap(), vec![4, 2]);
        assert_eq!(tensor_unipotent(3, 3, Field::prime(3).unwrap()).unwrap(), vec![3, 3, 3]);
    }

    #[test]
    fn line_bundle_tensor() {
        let t = tensor_bands(&band(1, &[1], 2), &band(1, &[-1], 3)).unwrap();
        assert_eq!(t.to_string(), "B((0), 1, t - 6)");
        let o = BandDescriptor::structure_sheaf(q(), 1);
        let x = band(1, &[0, 2, -1], 5);
        let t = tensor_bands(&x, &o).unwrap();
        assert_eq!(t.summands, vec![(Descriptor::Band(x).canonical(), 1)]);
    }

    #[test]
    fn periodic_tensor_splits() {
        let t = tensor_bands(&band(1, &[0, 1], 2), &band(1, &[1, 0], 2)).unwrap();
        assert_eq!(t.charge(), Charge::new(4, 4));
        assert_eq!(t.to_string(), "B((0,2), 1, t - 4) + B((1), 1, t + 2) + B((1), 1, t - 2)");
        let t = tensor_bands(&band(1, &[0, 1], 2), &band(1, &[1, 0], 3)).unwrap();
        assert!(t.to_string().contains("B((1), 1, t^2 - 6)"), "{t}");
    }

    #[test]
    fn pullbacks() {
        let o = BandDescriptor::structure_sheaf(q(), 1);
        assert_eq!(pullback_etale(&o, 2).unwrap().to_string(), "B((0,0), 1, t - 1) on E2");
        let l = band(1, &[1], 3);
        assert_eq!(pullback_etale(&l, 2).unwrap().to_string(), "B((1,1), 1, t - 9) on E2");
        let b = band(1, &[0, 1], 4);
        assert_eq!(pullback_etale(&b, 2).unwrap().to_string(), "B((0,1), 1, t - 4) on E2 + B((1,0), 1, t - 4) on E2");
    }

    #[test]
    fn pushforwards() {
        let f3 = pushforward_line(1, &[0], &q().one(), 3).unwrap();
        assert_eq!(f3, BandDescriptor::unipotent(q(), 1, 3));
        match pushforward_line(1, &[0, 0], &q().one(), 1) {
            Err(Error::Decomposable { summands }) => assert_eq!(summands, vec!["B((0), 1, t - 1)", "B((0), 1, t + 1)"]),
            other => panic!("{other:?}"),
        }
        let f2 = Field::prime(2).unwrap();
        match pushforward_line(1, &[0, 0], &f2.one(), 1) {
            Err(Error::Decomposable { summands }) => assert_eq!(summands, vec!["B((0), 2, t + 1)"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(&[1]), 1);
        assert_eq!(theta(&[0, 0]), 2);
        assert_eq!(theta(&[-1]), 0);
        assert_eq!(theta(&[2, -1, 0, 0, -3, 1, 0]), 4 + 2);
    }

    #[test]
    fn formula_examples() {
        for m in 1..4 {
            assert_eq!(cohomology_formula(&BandDescriptor::unipotent(q(), 1, m)), Cohomology { h0: 1, h1: 1 });
        }
        assert_eq!(cohomology_formula(&band(1, &[1], 7)), Cohomology { h0: 1, h1: 0 });
        assert_eq!(cohomology_formula(&band(1, &[-1], 7)), Cohomology { h0: 0, h1: 1 });
    }

    #[test]
    fn formula_matches_oracle_on_small_grid() {
        let f = Field::prime(5).unwrap();
        for n in 1..=2 {
            for len in [n, 2 * n] {
                let total = 5usize.pow(len as u32);
                for idx in 0..total {
                    let d: Vec<i64> = (0..len).map(|i| (idx / 5usize.pow(i as u32) % 5) as i64 - 2).collect();
                    if is_periodic(&d, n).is_some() {
                        continue;
                    }
                    for lambda in [1, 3] {
                        let b = BandDescriptor::linear(n, d.clone(), 1, &f.int(lambda)).unwrap();
                        assert_eq!(cohomology_formula(&b), cohomology(&band_to_triple(&b)), "{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn string_duals_against_hom() {
        let f = Field::prime(5).unwrap();
        let probes: Vec<BandDescriptor> = (-2..=2).map(|a| BandDescriptor::linear(1, vec![a], 1, &f.int(2)).unwrap()).collect();
        for d in [vec![-1], vec![0], vec![2], vec![1, -1], vec![0, 2, -1], vec![3, 0, 0, 1]] {
            let s = StringDescriptor::new(1, d, 1).unwrap();
            let t = string_to_triple(&s, f);
            let dt = string_to_triple(&dual_string(&s), f);
            for p in &probes {
                let l = band_to_triple(p);
                assert_eq!(cohomology(&dt.tensor(&l)).h0, crate::triples::hom_dim(&t, &l), "{s} vs {p}");
            }
        }
    }
}

#[cfg(test)]
mod oracle_tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::descriptors::random_band;
    use crate::triples::{band_to_triple, hom_dim, is_isomorphic, IsoResult, NodalTriple};

    fn sum_triple(d: &DecompositionResult, field: Field) -> NodalTriple {
        let parts: Vec<NodalTriple> = d.expanded().iter().map(|x| NodalTriple::from_descriptor(x, field)).collect();
        NodalTriple::sum_all(&parts).unwrap()
    }

    #[test]
    fn tensor_matches_block_tensor() {
        let f = Field::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2 {
            for _ in 0..15 {
                let a = random_band(f, n, 3, 2, 1, &mut rng);
                let b = random_band(f, n, 3, 2, 1, &mut rng);
                let pred = sum_triple(&tensor_bands(&a, &b).unwrap(), f);
                let block = band_to_triple(&a).tensor(&band_to_triple(&b));
                assert_eq!(is_isomorphic(&pred, &block, 3), IsoResult::Isomorphic, "{a} x {b}");
            }
        }
    }

    #[test]
    fn periodic_tensor_matches_block_tensor() {
        let f = Field::prime(7).unwrap();
        for (d, e, l, m) in [(vec![0, 1], vec![1, 0], 2, 3), (vec![0, 1], vec![1, 0], 1, 1), (vec![1, 0, 0], vec![0, 0, 1], 3, 5)] {
            let a = BandDescriptor::linear(1, d, 1, &f.int(l)).unwrap();
            let b = BandDescriptor::linear(1, e, 1, &f.int(m)).unwrap();
            let pred = tensor_bands(&a, &b).unwrap();
            assert!(pred.summands.len() > 1);
            let block = band_to_triple(&a).tensor(&band_to_triple(&b));
            assert_eq!(is_isomorphic(&sum_triple(&pred, f), &block, 3), IsoResult::Isomorphic, "{pred}");
        }
    }

    #[test]
    fn pullback_matches_triple_pullback() {
        let f = Field::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = random_band(f, 1, 3, 2, 1, &mut rng);
            for r in 2..=3 {
                let pred = sum_triple(&pullback_etale(&b, r).unwrap(), f);
                let t = band_to_triple(&b).pullback(r);
                assert_eq!(hom_dim(&pred, &t), hom_dim(&t, &t), "{b} r={r}");
                assert_eq!(is_isomorphic(&pred, &t, 3), IsoResult::Isomorphic, "{b} r={r}");
            }
        }
    }
}
