//! Oracle cross-check suites shared by the acceptance tests and the `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::birkhoff::{birkhoff_factor, random_elementary};
use crate::descriptors::{is_periodic, random_band, random_string, BandDescriptor, Descriptor, StringDescriptor};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::laurent::LaurentMatrix;
use crate::linalg::Mat;
use crate::sheaf_ops::{cohomology_formula, dual, tensor_bands, tensor_unipotent};
use crate::stable::{certify_simple, cuspidal_simple_matrix, cuspidal_tf_nonlocallyfree, stable_band_triple, stable_sequence};
use crate::triples::{band_to_triple, cohomology, hom_dim, is_isomorphic, string_to_triple, CuspidalTriple, IsoResult, NodalTriple};

pub const SUITES: [&str; 8] = ["birkhoff", "gluing", "cohomology", "stable", "cuspidal", "tensor", "pushforward", "duality"];

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> SuiteReport {
        SuiteReport { name, cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({ "suite": self.name, "cases": self.cases, "mismatches": self.failures.len(), "failures": self.failures })
    }
}

/// Runs one suite; `field` overrides the default field where the suite has one.
pub fn run_suite(name: &str, field: Option<Field>, seed: u64) -> Result<SuiteReport> {
    Ok(match name {
        "birkhoff" => birkhoff_suite(seed),
        "gluing" => gluing_suite(),
        "cohomology" => cohomology_suite(field.unwrap_or(Field::Prime(5))),
        "stable" => stable_suite(field.unwrap_or(Field::Prime(7))),
        "cuspidal" => cuspidal_suite(field.unwrap_or(Field::Prime(7))),
        "tensor" => tensor_suite(seed),
        "pushforward" => pushforward_suite(),
        "duality" => duality_suite(field.unwrap_or(Field::Rational), seed),
        _ => return Err(Error::invalid(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", ")))),
    })
}

/// Random B·D·A with elementary B over k[1/z] and A over k[z]; the factorization must return D.
pub fn birkhoff_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("birkhoff");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..200 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(7) };
        let r = rng.gen_range(1..=5);
        let exps: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
        let a = random_elementary(field, r, r, 1, false, &mut rng);
        let b = random_elementary(field, r, r, 1, true, &mut rng);
        let m = b.mul(&LaurentMatrix::diagonal(field, &exps)).mul(&a);
        let mut want = exps.clone();
        want.sort_unstable();
        match birkhoff_factor(&m) {
            Ok(f) => rep.check(f.exponents == want && f.verify(&m), || format!("{m}: got {:?}, want {want:?}", f.exponents)),
            Err(e) => rep.check(false, || format!("{m}: {e}")),
        }
    }
    rep
}

fn ints(field: Field, rows: &[&[i64]]) -> Mat {
    Mat::from_ints(field, rows)
}

/// The gluing matrices of B((0,1,1,3,1,−2), 1, t − λ) and S((−1,0,1,−1,1), 2) on E₂.
pub fn gluing_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("gluing");
    for field in [Field::Rational, Field::Prime(5)] {
        let lambda = field.int(3);
        let b = BandDescriptor::linear(2, vec![0, 1, 1, 3, 1, -2], 1, &lambda).expect("valid");
        let t = band_to_triple(&b);
        let id = Mat::identity(field, 3);
        let mut inf1 = Mat::identity(field, 3);
        inf1.set(0, 0, lambda.clone());
        rep.check(t.degrees == vec![vec![0, 1, 1], vec![-2, 1, 3]], || format!("band degrees {:?}", t.degrees));
        rep.check(t.at_zero[0] == id && t.at_inf[0] == id, || "band, first component".into());
        rep.check(t.at_inf[1] == inf1, || format!("band M(L2, inf):\n{}", t.at_inf[1]));
        rep.check(t.at_zero[1] == ints(field, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]), || format!("band M(L2, 0):\n{}", t.at_zero[1]));

        let s = StringDescriptor::new(2, vec![-1, 0, 1, -1, 1], 2).expect("valid");
        let t = string_to_triple(&s, field);
        rep.check(t.degrees == vec![vec![-1, 0], vec![-1, 1, 1]], || format!("string degrees {:?}", t.degrees));
        rep.check(t.at_zero[0] == ints(field, &[&[0, 1, 0], &[1, 0, 0]]), || format!("string M(L1, 0):\n{}", t.at_zero[0]));
        rep.check(t.at_inf[0] == ints(field, &[&[0, 0, 1], &[0, 1, 0]]), || format!("string M(L1, inf):\n{}", t.at_inf[0]));
        let id = Mat::identity(field, 3);
        rep.check(t.at_zero[1] == id && t.at_inf[1] == id, || "string, second component".into());
    }
    rep
}

fn grid_sequences(len: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..5usize.pow(len as u32)).map(move |idx| (0..len).map(|i| (idx / 5usize.pow(i as u32) % 5) as i64 - 2).collect())
}

/// Formula against oracle on all bands of E₁ and E₂ with |d| ≤ 4, entries in [−2, 2], m ≤ 2,
/// p = t − λ; χ = degree on every band and string of the same grid.
pub fn cohomology_suite(field: Field) -> SuiteReport {
    let mut rep = SuiteReport::new("cohomology");
    let lambdas = [field.one(), field.int(3)];
    for n in 1..=2usize {
        for len in (n..=4).step_by(n) {
            for d in grid_sequences(len) {
                for f in 1..=n {
                    let s = StringDescriptor::new(n, d.clone(), f).expect("valid");
                    let h = cohomology(&string_to_triple(&s, field));
                    rep.check(h.chi() == s.charge().degree, || format!("{s}: χ = {} ≠ degree", h.chi()));
                }
                if is_periodic(&d, n).is_some() {
                    continue;
                }
                for lambda in &lambdas {
                    if lambda.is_zero() {
                        continue;
                    }
                    for m in 1..=2 {
                        let b = BandDescriptor::linear(n, d.clone(), m, lambda).expect("valid");
                        let oracle = cohomology(&band_to_triple(&b));
                        let formula = cohomology_formula(&b);
                        rep.check(formula == oracle, || format!("{b}: formula {formula:?}, oracle {oracle:?}"));
                        rep.check(oracle.chi() == b.charge().degree, || format!("{b}: χ = {} ≠ degree", oracle.chi()));
                    }
                }
            }
        }
    }
    rep
}

/// The (19, 11) sequence and simplicity of every stable band with r ≤ 8.
pub fn stable_suite(field: Field) -> SuiteReport {
    let mut rep = SuiteReport::new("stable");
    let golden = vec![1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0];
    match stable_sequence(19, 11) {
        Ok(s) => rep.check(s.sequence == golden, || format!("(19, 11) gave {:?}", s.sequence)),
        Err(e) => rep.check(false, || e.to_string()),
    }
    let lambda = if field.characteristic() == 2 { field.one() } else { field.int(3) };
    for r in 1..=8i64 {
        for d in 0..r {
            if num_integer::Integer::gcd(&r, &d) != 1 {
                continue;
            }
            let ok = stable_band_triple(r, d, &lambda).map(|t| certify_simple(&t)).unwrap_or(false);
            rep.check(ok, || format!("band for ({r}, {d}) is not simple"));
        }
    }
    rep
}

/// Cuspidal displays, End-dimension one and separation of parameters.
pub fn cuspidal_suite(field: Field) -> SuiteReport {
    let mut rep = SuiteReport::new("cuspidal");
    let q = Field::Rational;
    let l = q.int(5);
    let goldens: Vec<(i64, i64, Vec<i64>, Mat)> = vec![
        (1, 0, vec![0], ints(q, &[&[5]])),
        (2, 1, vec![0, 1], ints(q, &[&[0, 1], &[0, 5]])),
        (
            7,
            12,
            vec![1, 1, 2, 2, 2, 2, 2],
            ints(
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
            ),
        ),
    ];
    for (r, d, degrees, ieps) in goldens {
        match cuspidal_simple_matrix(r, d, &l) {
            Ok(t) => {
                rep.check(t.degrees == degrees && t.ieps == ieps && t.i0.is_identity(), || format!("display ({r}, {d}):\n{t}"));
                rep.check(t.end_dim() == 1, || format!("({r}, {d}) not simple"));
            }
            Err(e) => rep.check(false, || e.to_string()),
        }
    }
    let tf_goldens = [
        (1, 0, vec![-1], ints(q, &[&[1, 0]]), ints(q, &[&[0, 1]])),
        (2, 1, vec![0, 0], ints(q, &[&[1, 0, 0], &[0, 1, 0]]), ints(q, &[&[0, 1, 0], &[0, 0, 1]])),
    ];
    for (r, d, degrees, i0, ieps) in tf_goldens {
        match cuspidal_tf_nonlocallyfree(r, d, q) {
            Ok(t) => {
                rep.check(t.degrees == degrees && t.i0 == i0 && t.ieps == ieps, || format!("torsion-free display ({r}, {d}):\n{t}"));
                rep.check(t.end_dim() == 1, || format!("torsion-free ({r}, {d}) not simple"));
            }
            Err(e) => rep.check(false, || e.to_string()),
        }
    }
    let lambda = if field.characteristic() == 2 { field.one() } else { field.int(2) };
    for r in 1..=8i64 {
        for d in -r..=r {
            if num_integer::Integer::gcd(&r, &d) != 1 {
                continue;
            }
            let vb = cuspidal_simple_matrix(r, d, &lambda).map(|t| t.end_dim() == 1 && t.degree() == d);
            rep.check(vb == Ok(true), || format!("vector bundle ({r}, {d})"));
            let tf = cuspidal_tf_nonlocallyfree(r, d, field).map(|t| t.end_dim() == 1 && t.degree() == d && !t.is_locally_free());
            rep.check(tf == Ok(true), || format!("torsion-free ({r}, {d})"));
        }
    }
    if let Some(size) = field.size() {
        for r in 1..=5i64 {
            for d in 0..r {
                if num_integer::Integer::gcd(&r, &d) != 1 {
                    continue;
                }
                let ts: Vec<CuspidalTriple> = (0..size).map(|i| cuspidal_simple_matrix(r, d, &field.element(i)).expect("coprime")).collect();
                for (i, a) in ts.iter().enumerate() {
                    for (j, b) in ts.iter().enumerate() {
                        let want = if i == j { IsoResult::Isomorphic } else { IsoResult::NotIsomorphic };
                        rep.check(a.is_isomorphic(b, 1) == want, || format!("({r}, {d}) parameters {i}, {j}"));
                    }
                }
            }
        }
    }
    rep
}

fn sum_triple(parts: &[Descriptor], field: Field) -> Option<NodalTriple> {
    let ts: Vec<NodalTriple> = parts.iter().map(|x| NodalTriple::from_descriptor(x, field)).collect();
    NodalTriple::sum_all(&ts)
}

/// Hom-dimensions against every probe, in both directions.
pub fn fingerprint(t: &NodalTriple, probes: &[NodalTriple]) -> Vec<(usize, usize)> {
    probes.iter().map(|p| (hom_dim(p, t), hom_dim(t, p))).collect()
}

/// Predicted tensor decompositions against the block tensor of triples on E₁ over F₇.
pub fn tensor_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("tensor");
    let f = Field::Prime(7);
    let mut probes = Vec::new();
    for a in -2..=2 {
        for l in [1, 2, 3] {
            probes.push(band_to_triple(&BandDescriptor::linear(1, vec![a], 1, &f.int(l)).expect("valid")));
        }
    }
    probes.push(band_to_triple(&BandDescriptor::unipotent(f, 1, 2)));
    probes.push(string_to_triple(&StringDescriptor::new(1, vec![-1], 1).expect("valid"), f));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        let a = random_band(f, 1, 3, 2, 1, &mut rng);
        let b = random_band(f, 1, 3, 2, 1, &mut rng);
        let block = band_to_triple(&a).tensor(&band_to_triple(&b));
        match tensor_bands(&a, &b) {
            Ok(pred) => {
                let ok = sum_triple(&pred.expanded(), f).is_some_and(|p| fingerprint(&p, &probes) == fingerprint(&block, &probes));
                rep.check(ok, || format!("{a} ⊗ {b} predicted {pred}"));
            }
            Err(e) => rep.check(false, || format!("{a} ⊗ {b}: {e}")),
        }
    }
    rep.check(tensor_unipotent(2, 2, Field::Rational) == Ok(vec![3, 1]), || "F2 ⊗ F2 over Q".into());
    rep.check(tensor_unipotent(2, 2, Field::Prime(2)) == Ok(vec![2, 2]), || "F2 ⊗ F2 over F2".into());
    for field in [Field::Rational, Field::Prime(2)] {
        let f2 = band_to_triple(&BandDescriptor::unipotent(field, 1, 2));
        let block = f2.tensor(&f2);
        let parts: Vec<Descriptor> = tensor_unipotent(2, 2, field)
            .unwrap_or_default()
            .into_iter()
            .map(|m| Descriptor::Band(BandDescriptor::unipotent(field, 1, m)))
            .collect();
        let ok = sum_triple(&parts, field).is_some_and(|p| is_isomorphic(&p, &block, 1) == IsoResult::Isomorphic);
        rep.check(ok, || format!("F2 ⊗ F2 block tensor over {}", field.name()));
    }
    rep
}

/// π₂*O on E₁ from E₂: O ⊕ B((0), 1, t + 1) over Q and F₂ over F₂.
pub fn pushforward_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("pushforward");
    let q = Field::Rational;
    let ok = NodalTriple::structure_sheaf(q, 2).pushforward(2).map(|p| {
        let o = band_to_triple(&BandDescriptor::structure_sheaf(q, 1));
        let l = band_to_triple(&BandDescriptor::linear(1, vec![0], 1, &q.int(-1)).expect("valid"));
        is_isomorphic(&p, &o.direct_sum(&l), 1)
    });
    rep.check(ok == Ok(IsoResult::Isomorphic), || format!("over Q: {ok:?}"));
    let f2 = Field::Prime(2);
    let ok = NodalTriple::structure_sheaf(f2, 2)
        .pushforward(2)
        .map(|p| is_isomorphic(&p, &band_to_triple(&BandDescriptor::unipotent(f2, 1, 2)), 1));
    rep.check(ok == Ok(IsoResult::Isomorphic), || format!("over F2: {ok:?}"));
    rep
}

/// dual∘dual on canonical forms, self-duality of S((−1)) and Hom(F, G) = H⁰(F∨ ⊗ G).
pub fn duality_suite(field: Field, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("duality");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..200 {
        let n = rng.gen_range(1..=3);
        let x = if i % 2 == 0 {
            Descriptor::Band(random_band(field, n, 3, 3, 2, &mut rng))
        } else {
            Descriptor::String(random_string(n, 6, 3, &mut rng))
        };
        let back = dual(&dual(&x));
        rep.check(back.canonical() == x.canonical(), || format!("{x} came back as {back}"));
    }
    let s = Descriptor::String(StringDescriptor::new(1, vec![-1], 1).expect("valid"));
    rep.check(dual(&s) == s, || format!("S((-1)) dualizes to {}", dual(&s)));
    let p = field.characteristic();
    for _ in 0..20 {
        let line = |rng: &mut ChaCha8Rng| {
            let lambda = field.random_nonzero(rng, 5);
            BandDescriptor::linear(1, vec![rng.gen_range(-3..=3)], 1, &lambda).expect("valid")
        };
        let (a, b) = (line(&mut rng), line(&mut rng));
        let (ta, tb) = (band_to_triple(&a), band_to_triple(&b));
        let da = NodalTriple::from_descriptor(&dual(&Descriptor::Band(a.clone())), field);
        let lhs = hom_dim(&ta, &tb);
        let rhs = cohomology(&da.tensor(&tb)).h0;
        rep.check(lhs == rhs, || format!("Hom({a}, {b}) = {lhs}, h0 = {rhs} (char {p})"));
    }
    rep
}
