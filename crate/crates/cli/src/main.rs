use std::io::{Read, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ellsheaf::birkhoff::birkhoff_factor;
use ellsheaf::descriptors::{is_periodic, BandDescriptor, Descriptor};
use ellsheaf::gpfm::{fm_image, TorsionModuleDescriptor};
use ellsheaf::sheaf_ops::{cohomology_formula, dual, pullback_etale, pushforward_line, split_periodic, tensor_bands, DecompositionResult};
use ellsheaf::stable::{
    block_chain, certify_simple, cuspidal_simple_matrix, cuspidal_tf_nonlocallyfree, splitting_data, stable_band_triple,
    stable_sequence, BlowUp,
};
use ellsheaf::triples::{hom_dim, hom_dim_cuspidal, is_isomorphic, Cohomology, IsoResult, NodalTriple, Triple};
use ellsheaf::verify::{run_suite, DEFAULT_SEED, SUITES};
use ellsheaf::{Error, Field, LaurentMatrix, Result};

const INPUT_HELP: &str = "JSON text, @path to read a file, or - for stdin; an array means a direct sum";

#[derive(Parser)]
#[command(name = "ellsheaf", version, about = "Bundles and torsion-free sheaves on cycles of projective lines and cuspidal cubics")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Print structured JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Base field: q (rationals) or f<p> for a prime p. Defaults to q; `verify` uses each suite's own field.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Seed for randomized steps (isomorphism sampling, random suites). Defaults to 2024.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Birkhoff factorization T⁻¹·M·S = diag(z^a) of a Laurent matrix.
    Birkhoff {
        #[arg(help = INPUT_HELP)]
        matrix: String,
    },
    /// Charge, per-component multidegrees and canonical form of a band or string.
    Describe {
        #[arg(help = INPUT_HELP)]
        descriptor: String,
    },
    /// Gluing triple of a band or string.
    Triple {
        #[arg(help = INPUT_HELP)]
        descriptor: String,
    },
    /// h0 and h1 of a descriptor or triple.
    Cohomology {
        #[arg(help = INPUT_HELP)]
        object: String,
        #[command(flatten)]
        mode: CohomologyMode,
    },
    /// Decomposition of the tensor product of two bands.
    Tensor {
        #[arg(help = INPUT_HELP)]
        a: String,
        #[arg(help = INPUT_HELP)]
        b: String,
        /// Compare with the block tensor of the triples.
        #[arg(long)]
        check: bool,
    },
    /// Dual of a descriptor or of a vector-bundle triple.
    Dual {
        #[arg(help = INPUT_HELP)]
        object: String,
    },
    /// Pullback of a band (or nodal triple) along the étale cover of degree r.
    Pullback {
        #[arg(help = INPUT_HELP)]
        object: String,
        r: usize,
    },
    /// Pushforward of L(d, λ) ⊗ F_m from a cover of E_n.
    Pushforward {
        n: usize,
        /// Multidegree, comma separated.
        #[arg(allow_hyphen_values = true)]
        d: String,
        lambda: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Binary sequence of the stable band of rank r and degree d on E1, with its reduction chain.
    StableSeq {
        r: i64,
        d: i64,
        /// Certify End = k for the band with this parameter.
        #[arg(long)]
        certify: Option<String>,
    },
    /// Simple vector bundle of rank r and degree d on the cuspidal cubic.
    CuspMatrix { r: i64, d: i64, lambda: String },
    /// Simple torsion-free sheaf of rank r and degree d on the cuspidal cubic that is not locally free.
    CuspTf { r: i64, d: i64 },
    /// dim Hom(A, B).
    Hom {
        #[arg(help = INPUT_HELP)]
        a: String,
        #[arg(help = INPUT_HELP)]
        b: String,
    },
    /// Isomorphism test; exits 2 when inconclusive.
    Isomorphic {
        #[arg(help = INPUT_HELP)]
        a: String,
        #[arg(help = INPUT_HELP)]
        b: String,
    },
    /// Image of a torsion module M or N on E1.
    Fm {
        #[arg(help = INPUT_HELP)]
        module: String,
    },
    /// Run oracle cross-check suites.
    Verify {
        /// One of birkhoff, gluing, cohomology, stable, cuspidal, tensor, pushforward, duality, or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct CohomologyMode {
    /// Closed formula (bands only).
    #[arg(long)]
    formula: bool,
    /// Linear-algebra oracle on the triple (default).
    #[arg(long)]
    oracle: bool,
    /// Both, with a match flag.
    #[arg(long)]
    both: bool,
}

enum Status {
    Ok,
    Inconclusive,
    Failed,
}

struct Output {
    json: Value,
    text: String,
    status: Status,
}

impl Output {
    fn ok(json: Value, text: impl Into<String>) -> Output {
        Output { json, text: text.into(), status: Status::Ok }
    }
}

enum Object {
    Descriptor(Descriptor),
    Triple(Triple),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let json = std::env::args().any(|a| a == "--json");
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            report(json, &json!({ "code": "usage", "message": first, "context": { "usage": msg.trim() } }));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.json { serde_json::to_string_pretty(&out.json).expect("serializable") } else { out.text };
            let _ = writeln!(std::io::stdout(), "{}", text.trim_end());
            match out.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Failed => ExitCode::from(1),
                Status::Inconclusive => ExitCode::from(2),
            }
        }
        Err(e) => {
            report(cli.json, &e.to_json());
            ExitCode::from(1)
        }
    }
}

fn report(json: bool, err: &Value) {
    let text = serde_json::to_string_pretty(err).expect("serializable");
    let _ = if json { writeln!(std::io::stdout(), "{text}") } else { writeln!(std::io::stderr(), "{text}") };
}

fn run(cli: &Cli) -> Result<Output> {
    let field = match &cli.field {
        Some(s) => Field::parse(s)?,
        None => Field::Rational,
    };
    let iso_seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.cmd {
        Cmd::Birkhoff { matrix } => birkhoff(field, matrix),
        Cmd::Describe { descriptor } => describe(field, descriptor),
        Cmd::Triple { descriptor } => {
            let d = Descriptor::from_json(field, &read_input(descriptor)?)?;
            let t = NodalTriple::from_descriptor(&d, field);
            Ok(Output::ok(t.to_json(), format!("{d}\n{t}")))
        }
        Cmd::Cohomology { object, mode } => cohomology(field, object, mode),
        Cmd::Tensor { a, b, check } => tensor(field, a, b, *check, iso_seed),
        Cmd::Dual { object } => match read_object(field, object)? {
            Object::Descriptor(d) => {
                let e = dual(&d);
                Ok(Output::ok(json!({ "descriptor": e.to_json(), "display": e.to_string() }), e.to_string()))
            }
            Object::Triple(Triple::Nodal(t)) => {
                let u = t.dual()?;
                Ok(Output::ok(u.to_json(), u.to_string()))
            }
            Object::Triple(Triple::Cuspidal(t)) => {
                let u = t.dual();
                Ok(Output::ok(u.to_json(), u.to_string()))
            }
        },
        Cmd::Pullback { object, r } => match read_object(field, object)? {
            Object::Descriptor(Descriptor::Band(b)) => Ok(decomposition(&pullback_etale(&b, *r)?)),
            Object::Triple(Triple::Nodal(t)) => {
                if *r == 0 {
                    return Err(Error::invalid("covering degree must be positive"));
                }
                let u = t.pullback(*r);
                Ok(Output::ok(u.to_json(), u.to_string()))
            }
            _ => Err(Error::invalid("pullback takes a band or a nodal triple")),
        },
        Cmd::Pushforward { n, d, lambda, m } => {
            let d = parse_ints(d)?;
            let lambda = field.parse_scalar(lambda)?;
            let parts = if *n > 0 && d.len() % n == 0 && is_periodic(&d, *n).is_some() {
                split_periodic(*n, &d, *m, &lambda)?
            } else {
                vec![pushforward_line(*n, &d, &lambda, *m)?]
            };
            Ok(decomposition(&DecompositionResult::new(parts.into_iter().map(Descriptor::Band))))
        }
        Cmd::StableSeq { r, d, certify } => stable_seq(field, *r, *d, certify.as_deref()),
        Cmd::CuspMatrix { r, d, lambda } => cusp_matrix(field, *r, *d, lambda),
        Cmd::CuspTf { r, d } => {
            let t = cuspidal_tf_nonlocallyfree(*r, *d, field)?;
            let (c, r1, r2) = splitting_data(*r, *d - 1);
            let end = t.end_dim();
            let text = format!("rank {r}, degree {d}: {}, not locally free\n{t}End dimension: {end}", splitting(c, r1, r2));
            Ok(Output::ok(
                json!({ "rank": r, "degree": d, "splitting": { "c": c, "r1": r1, "r2": r2 }, "triple": t.to_json(), "end_dim": end }),
                text,
            ))
        }
        Cmd::Hom { a, b } => {
            let (a, b) = (to_triple(field, read_object(field, a)?), to_triple(field, read_object(field, b)?));
            let dim = match (&a, &b) {
                (Triple::Nodal(x), Triple::Nodal(y)) if x.n == y.n => hom_dim(x, y),
                (Triple::Cuspidal(x), Triple::Cuspidal(y)) => hom_dim_cuspidal(x, y),
                _ => return Err(Error::invalid("both objects must live on the same curve")),
            };
            Ok(Output::ok(json!({ "hom_dim": dim }), format!("dim Hom = {dim}")))
        }
        Cmd::Isomorphic { a, b } => {
            let (a, b) = (to_triple(field, read_object(field, a)?), to_triple(field, read_object(field, b)?));
            let res = match (&a, &b) {
                (Triple::Nodal(x), Triple::Nodal(y)) if x.n == y.n => is_isomorphic(x, y, iso_seed),
                (Triple::Cuspidal(x), Triple::Cuspidal(y)) => x.is_isomorphic(y, iso_seed),
                _ => IsoResult::NotIsomorphic,
            };
            Ok(Output {
                json: json!({ "result": res.as_str(), "seed": iso_seed }),
                text: res.as_str().to_string(),
                status: if res == IsoResult::Inconclusive { Status::Inconclusive } else { Status::Ok },
            })
        }
        Cmd::Fm { module } => {
            let t = TorsionModuleDescriptor::from_json(field, &read_input(module)?)?;
            let img = fm_image(&t)?;
            Ok(Output::ok(
                json!({ "module": t.to_json(), "length": t.length(), "image": img.to_json(), "display": img.to_string() }),
                format!("{t} (length {}) -> {img}", t.length()),
            ))
        }
        Cmd::Verify { suite } => verify(cli, suite),
    }
}

fn read_input(arg: &str) -> Result<Value> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::invalid(format!("cannot read stdin: {e}")))?;
        s
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {path}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))
}

fn read_object(field: Field, arg: &str) -> Result<Object> {
    parse_object(field, &read_input(arg)?)
}

/// A descriptor, a triple, or an array of either read as their direct sum.
fn parse_object(field: Field, v: &Value) -> Result<Object> {
    if let Some(items) = v.as_array() {
        let parts = items.iter().map(|x| parse_object(field, x).map(|o| to_triple(field, o))).collect::<Result<Vec<_>>>()?;
        let mut it = parts.into_iter();
        let first = it.next().ok_or_else(|| Error::invalid("empty direct sum"))?;
        return it
            .try_fold(first, |acc, t| match (acc, t) {
                (Triple::Nodal(x), Triple::Nodal(y)) if x.n == y.n => Ok(Triple::Nodal(x.direct_sum(&y))),
                (Triple::Cuspidal(x), Triple::Cuspidal(y)) => Ok(Triple::Cuspidal(x.direct_sum(&y))),
                _ => Err(Error::invalid("direct sum of objects on different curves")),
            })
            .map(Object::Triple);
    }
    if v.get("kind").is_some() {
        Descriptor::from_json(field, v).map(Object::Descriptor)
    } else {
        Triple::from_json(field, v).map(Object::Triple)
    }
}

fn to_triple(field: Field, o: Object) -> Triple {
    match o {
        Object::Descriptor(d) => Triple::Nodal(NodalTriple::from_descriptor(&d, field)),
        Object::Triple(t) => t,
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.trim_matches(|c| c == '[' || c == ']' || c == '(' || c == ')')
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::invalid(format!("bad integer `{}` in `{s}`", x.trim()))))
        .collect()
}

fn cohomology_json(h: Cohomology) -> Value {
    json!({ "h0": h.h0, "h1": h.h1 })
}

fn decomposition(r: &DecompositionResult) -> Output {
    let c = r.charge();
    Output::ok(r.to_json(), format!("{r}\nrank {}, degree {}", c.rank, c.degree))
}

fn birkhoff(field: Field, arg: &str) -> Result<Output> {
    let m = LaurentMatrix::from_json(field, &read_input(arg)?)?;
    let b = birkhoff_factor(&m)?;
    let verified = b.verify(&m);
    let split = b.splitting_type();
    let text = format!(
        "exponents: {:?}\nsplitting type: {}\nS =\n{}T =\n{}verified: {verified}",
        b.exponents,
        split.iter().map(|a| format!("O({a})")).collect::<Vec<_>>().join(" + "),
        b.s,
        b.t,
    );
    Ok(Output::ok(
        json!({
            "exponents": b.exponents,
            "splitting_type": split,
            "s": b.s.to_json(),
            "s_inv": b.s_inv.to_json(),
            "t": b.t.to_json(),
            "t_inv": b.t_inv.to_json(),
            "verified": verified,
        }),
        text,
    ))
}

fn describe(field: Field, arg: &str) -> Result<Output> {
    let d = Descriptor::from_json(field, &read_input(arg)?)?;
    let c = d.canonical();
    let charge = c.charge();
    let kind = if matches!(c, Descriptor::Band(_)) { "band" } else { "string" };
    let comps: Vec<Vec<i64>> = (0..c.n()).map(|i| c.component_degrees(i)).collect();
    let mut text = format!("{d}\ncanonical: {c}\nkind: {kind}\nrank {}, degree {}\n", charge.rank, charge.degree);
    for (i, ds) in comps.iter().enumerate() {
        text += &format!("component {}: {ds:?}\n", i + 1);
    }
    Ok(Output::ok(
        json!({
            "kind": kind,
            "descriptor": c.to_json(),
            "display": c.to_string(),
            "charge": charge.to_json(),
            "components": comps,
        }),
        text,
    ))
}

fn cohomology(field: Field, arg: &str, mode: &CohomologyMode) -> Result<Output> {
    let obj = read_object(field, arg)?;
    let formula = match &obj {
        Object::Descriptor(Descriptor::Band(b)) => Some(cohomology_formula(b)),
        _ => None,
    };
    if (mode.formula || mode.both) && formula.is_none() {
        return Err(Error::Unsupported("the closed formula covers bands only".into()));
    }
    if mode.formula {
        let h = formula.expect("band");
        return Ok(Output::ok(json!({ "formula": cohomology_json(h) }), format!("h0 = {}, h1 = {}", h.h0, h.h1)));
    }
    let oracle = to_triple(field, obj).cohomology();
    if !mode.both {
        return Ok(Output::ok(json!({ "oracle": cohomology_json(oracle) }), format!("h0 = {}, h1 = {}", oracle.h0, oracle.h1)));
    }
    let h = formula.expect("band");
    let matched = h == oracle;
    Ok(Output {
        json: json!({ "formula": cohomology_json(h), "oracle": cohomology_json(oracle), "match": matched }),
        text: format!("formula ({}, {})\noracle ({}, {})\nmatch={matched}", h.h0, h.h1, oracle.h0, oracle.h1),
        status: if matched { Status::Ok } else { Status::Failed },
    })
}

fn band(field: Field, arg: &str) -> Result<BandDescriptor> {
    BandDescriptor::from_json(field, &read_input(arg)?)
}

fn tensor(field: Field, a: &str, b: &str, check: bool, seed: u64) -> Result<Output> {
    let (a, b) = (band(field, a)?, band(field, b)?);
    let r = tensor_bands(&a, &b)?;
    let mut out = decomposition(&r);
    if !check {
        return Ok(out);
    }
    let parts: Vec<NodalTriple> = r.expanded().iter().map(|d| NodalTriple::from_descriptor(d, a.field())).collect();
    let predicted = NodalTriple::sum_all(&parts).expect("nonempty tensor product");
    let res = is_isomorphic(&predicted, &band_to_triple(&a).tensor(&band_to_triple(&b)), seed);
    out.json["check"] = json!(res.as_str());
    out.text += &format!("\nblock tensor: {}", res.as_str());
    out.status = match res {
        IsoResult::Isomorphic => Status::Ok,
        IsoResult::NotIsomorphic => Status::Failed,
        IsoResult::Inconclusive => Status::Inconclusive,
    };
    Ok(out)
}

fn band_to_triple(b: &BandDescriptor) -> NodalTriple {
    ellsheaf::triples::band_to_triple(b)
}

fn stable_seq(field: Field, r: i64, d: i64, certify: Option<&str>) -> Result<Output> {
    let s = stable_sequence(r, d)?;
    let bits: String = s.base.iter().map(|x| x.to_string()).collect();
    let mut text = format!("{bits}\n");
    if s.twist != 0 {
        text += &format!("twisted by {}: {:?}\n", s.twist, s.sequence);
    }
    for step in &s.chain {
        let kind = if step.kind == BlowUp::A { "A" } else { "B" };
        text += &format!(
            "({}, {}, {}) -> ({}, {}, {})  type ({kind}, {})\n",
            step.from.0,
            step.from.1,
            step.from.0 + step.from.1,
            step.to.0,
            step.to.1,
            step.to.0 + step.to.1,
            step.k
        );
    }
    let mut json = s.to_json();
    if let Some(l) = certify {
        let lambda = field.parse_scalar(l)?;
        let simple = certify_simple(&stable_band_triple(r, d, &lambda)?);
        text += &format!("simple: {simple}\n");
        json["simple"] = json!(simple);
        if !simple {
            return Ok(Output { json, text, status: Status::Failed });
        }
    }
    Ok(Output::ok(json, text))
}

fn cusp_matrix(field: Field, r: i64, d: i64, lambda: &str) -> Result<Output> {
    let lambda = field.parse_scalar(lambda)?;
    let t = cuspidal_simple_matrix(r, d, &lambda)?;
    let (c, r1, r2) = splitting_data(r, d);
    let chain = block_chain(r1, r2);
    let end = t.end_dim();
    let trace: Vec<String> = chain.iter().map(|(a, b)| format!("({a}, {b})")).collect();
    let text = format!(
        "rank {r}, degree {d}: {}\nblocks: {}\n{t}End dimension: {end}",
        splitting(c, r1, r2),
        trace.join(" -> ")
    );
    Ok(Output::ok(
        json!({
            "rank": r,
            "degree": d,
            "splitting": { "c": c, "r1": r1, "r2": r2 },
            "chain": chain,
            "triple": t.to_json(),
            "end_dim": end,
        }),
        text,
    ))
}

fn splitting(c: i64, r1: usize, r2: usize) -> String {
    [(c, r1), (c + 1, r2)]
        .iter()
        .filter(|(_, k)| *k > 0)
        .map(|(a, k)| if *k == 1 { format!("O~({a})") } else { format!("O~({a})^{k}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn verify(cli: &Cli, suite: &str) -> Result<Output> {
    let field = cli.field.as_deref().map(Field::parse).transpose()?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    let mut text = String::new();
    for name in names {
        let rep = run_suite(name, field, seed)?;
        text += &format!("{name}: {} cases, {} mismatches\n", rep.cases, rep.failures.len());
        for f in rep.failures.iter().take(10) {
            text += &format!("  {f}\n");
        }
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.passed());
    Ok(Output {
        json: json!({ "seed": seed, "passed": ok, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() }),
        text,
        status: if ok { Status::Ok } else { Status::Failed },
    })
}
