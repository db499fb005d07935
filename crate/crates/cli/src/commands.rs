use std::collections::BTreeSet;
use std::fmt::Write as _;

use anyhow::{bail, Context as _, Result};
use dihedral::arith::{self, kronecker};
use dihedral::modcheck::trace_table;
use dihedral::serretrick::splits;
use dihedral::{
    char_poly, classify_reducible, find_auxiliary, fundamental_unit_norm, hecke_consistency,
    reduce_mod_p, reduce_qexp, splitting_type, tp_matrix, verify_modularity, AuxiliaryPrime,
    ClassCharacter, CycElt, DihedralRep, FundamentalDiscriminant, IdealCharacter, QExpansion,
    Reducibility, ResElt, ResidueField, Scalar, SplittingType,
};
use serde_json::{json, Value};

use crate::{CharArgs, Command, Context, Format, Outcome};

const HECKE_PRIME_BOUND: u64 = 100;

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn ok(v: Value) -> Result<Outcome> {
    Ok(Outcome {
        body: pretty(&v)?,
        violations: false,
    })
}

fn json_only(ctx: &Context, what: &str) -> Result<()> {
    if ctx.format == Some(Format::Csv) {
        bail!("{what} has no CSV form; use --json");
    }
    Ok(())
}

fn disc(d: i64) -> Result<FundamentalDiscriminant> {
    Ok(FundamentalDiscriminant::new(d)?)
}

fn character(ctx: &Context, args: &CharArgs) -> Result<IdealCharacter> {
    let d = disc(args.d)?;
    let group = ctx.cache.class_group(d)?;
    let chi = ClassCharacter::new(group, &args.chi)?;
    if !args.twist {
        return Ok(IdealCharacter::new(chi));
    }
    let aux = find_auxiliary(d, 1, ctx.config.aux_height(args.aux_height))?;
    Ok(IdealCharacter::twisted(chi, aux)?)
}

fn representation(ctx: &Context, args: &CharArgs, p: u64) -> Result<DihedralRep> {
    Ok(DihedralRep::from_ideal_character(character(ctx, args)?, p)?)
}

fn header(rep: &DihedralRep) -> Value {
    json!({
        "D": rep.discriminant().get(),
        "chi": rep.chi().exponents(),
        "m": rep.chi().order(),
        "p": rep.p(),
        "twist": rep.ideal_character().twist(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

pub fn dispatch(ctx: &Context, command: Command) -> Result<Outcome> {
    match command {
        Command::Classgroup { d } => classgroup(ctx, d),
        Command::Rep { chi, p, bound } => rep(ctx, &chi, p, bound),
        Command::Traces { chi, p, bound } => traces(ctx, &chi, p, bound),
        Command::Serre { chi, p, bound } => serre(ctx, &chi, p, bound),
        Command::Theta { chi, b, mod_p } => theta(ctx, &chi, b, mod_p),
        Command::Verify {
            chi,
            p,
            bound,
            perturb,
        } => verify(ctx, &chi, p, bound, perturb),
        Command::Oldform {
            ap,
            eps,
            k,
            delta,
            r,
            p,
        } => oldform(ctx, ap, eps, k, delta == 1, r, p),
        Command::Trick { d, f, bound, chi } => trick(ctx, d, f, bound, chi),
        Command::Irred { chi, p, bound } => irred(ctx, &chi, p, bound),
        Command::PaperExamples { bound } => paper_examples(ctx, bound),
    }
}

fn classgroup(ctx: &Context, d: i64) -> Result<Outcome> {
    json_only(ctx, "classgroup")?;
    let group = ctx.cache.class_group(disc(d)?)?;
    let mut v = serde_json::to_value(group.to_record())?;
    if d > 0 {
        v = merge(
            v,
            json!({
                "narrow": true,
                "wide_h": group.wide_class_number(),
                "unit_norm": fundamental_unit_norm(group.discriminant())?,
            }),
        );
    }
    ok(v)
}

struct TraceRow {
    l: u64,
    kind: SplittingType,
    trace: CycElt,
    reduced: ResElt,
}

fn trace_rows(rep: &DihedralRep, bound: u64) -> Result<(Vec<TraceRow>, Vec<u64>)> {
    let mut rows = Vec::new();
    let mut ramified = Vec::new();
    for l in arith::primes_up_to(bound) {
        match rep.frob_trace(l) {
            Ok(trace) => {
                let reduced = reduce_mod_p(&trace, rep.residue_field())?;
                rows.push(TraceRow {
                    l,
                    kind: splitting_type(rep.discriminant(), l),
                    trace,
                    reduced,
                });
            }
            Err(dihedral::Error::RamifiedPrime { .. }) => ramified.push(l),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((rows, ramified))
}

fn kind_name(kind: SplittingType) -> &'static str {
    match kind {
        SplittingType::Split => "split",
        SplittingType::Inert => "inert",
        SplittingType::Ramified => "ramified",
    }
}

fn rows_json(rows: &[TraceRow]) -> Value {
    rows.iter()
        .map(|r| {
            json!({
                "l": r.l,
                "splitting": kind_name(r.kind),
                "trace": r.trace,
                "reduced": r.reduced,
            })
        })
        .collect()
}

fn rep(ctx: &Context, args: &CharArgs, p: u64, bound: Option<u64>) -> Result<Outcome> {
    json_only(ctx, "rep")?;
    let rep = representation(ctx, args, p)?;
    let bound = ctx.config.trace_bound(bound);
    let (rows, ramified) = trace_rows(&rep, bound)?;
    let inv = rep.serre_invariants(0)?;
    ok(merge(
        header(&rep),
        json!({
            "N": inv.conductor,
            "conductor": rep.conductor(),
            "weight_report": inv.weight_report,
            "exceptional": inv.exceptional,
            "lift_case": rep.lift_case(),
            "odd": rep.is_odd(),
            "bound": bound,
            "ramified": ramified,
            "traces": rows_json(&rows),
        }),
    ))
}

fn joined<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn traces(ctx: &Context, args: &CharArgs, p: u64, bound: Option<u64>) -> Result<Outcome> {
    let rep = representation(ctx, args, p)?;
    let (rows, ramified) = trace_rows(&rep, ctx.config.trace_bound(bound))?;
    if ctx.format != Some(Format::Csv) {
        return ok(merge(
            header(&rep),
            json!({ "ramified": ramified, "traces": rows_json(&rows) }),
        ));
    }
    let mut out = String::from("l,splitting,trace,reduced");
    for r in &rows {
        write!(
            out,
            "\n{},{},{},{}",
            r.l,
            kind_name(r.kind),
            joined(r.trace.coeffs(), " "),
            joined(r.reduced.coeffs(), " ")
        )?;
    }
    Ok(Outcome {
        body: out,
        violations: false,
    })
}

fn serre(ctx: &Context, args: &CharArgs, p: u64, bound: Option<u64>) -> Result<Outcome> {
    json_only(ctx, "serre")?;
    let rep = representation(ctx, args, p)?;
    let inv = rep.serre_invariants(ctx.config.trace_bound(bound))?;
    let weight = match inv.weight_report {
        dihedral::WeightReport::MinimalWeightOne => json!(1),
        dihedral::WeightReport::UnsupportedRamifiedAtP => Value::Null,
    };
    ok(merge(
        merge(header(&rep), serde_json::to_value(&inv)?),
        json!({
            "weight": weight,
            "lift_case": rep.lift_case(),
            "odd": rep.is_odd(),
            "no_char0_lift_same_level": rep.no_char0_lift_same_level(),
        }),
    ))
}

fn theta(ctx: &Context, args: &CharArgs, b: Option<u64>, mod_p: Option<u64>) -> Result<Outcome> {
    let character = character(ctx, args)?;
    let b = ctx.config.theta_b(b);
    let f = ctx.cache.theta(&character, b)?;
    let body = match mod_p {
        None if ctx.format == Some(Format::Csv) => coefficient_csv(&f, |c| c.coeffs().to_vec()),
        None => pretty(&serde_json::to_value(&f)?)?,
        Some(p) => {
            let field = ResidueField::over(character.base().modulus(), p)?;
            let g = reduce_qexp(&f, &field)?;
            if ctx.format == Some(Format::Csv) {
                coefficient_csv(&g, |c| c.coeffs().to_vec())
            } else {
                pretty(&serde_json::to_value(&g)?)?
            }
        }
    };
    Ok(Outcome {
        body,
        violations: false,
    })
}

fn coefficient_csv<S: Scalar, T: ToString>(
    f: &QExpansion<S>,
    coords: impl Fn(&S) -> Vec<T>,
) -> String {
    let width = coords(f.a(0)).len();
    let mut out = String::from("n");
    for i in 0..width {
        let _ = write!(out, ",c{i}");
    }
    for n in 1..=f.bound() {
        let _ = write!(out, "\n{n},{}", joined(&coords(f.a(n)), ","));
    }
    out
}

fn verify(
    ctx: &Context,
    args: &CharArgs,
    p: u64,
    bound: Option<u64>,
    perturb: Option<u64>,
) -> Result<Outcome> {
    json_only(ctx, "verify")?;
    let rep = representation(ctx, args, p)?;
    let bound = ctx.config.verify_bound(bound);
    let theta = ctx.cache.theta(rep.ideal_character(), bound)?;
    let mut f = reduce_qexp(&theta, rep.residue_field())?;
    if let Some(n) = perturb {
        if n == 0 || n > bound {
            bail!("--perturb must lie in 1..={bound}");
        }
        f.set(n, f.a(n).plus(&f.a(n).one_like()));
    }
    let modularity = verify_modularity(&rep, &f, bound, &BTreeSet::new())?;

    let md = rep.chi().modulus().clone();
    let eps = |l: u64| rep.frob_det(l).unwrap_or_else(|_| CycElt::zero(&md));
    let hecke = if perturb.is_some() {
        let field = rep.residue_field().clone();
        let eps_red = |l: u64| reduce_mod_p(&eps(l), &field).expect("same modulus");
        hecke_consistency(&f, eps_red, 1, rep.conductor(), HECKE_PRIME_BOUND, bound)?
    } else {
        hecke_consistency(&theta, eps, 1, rep.conductor(), HECKE_PRIME_BOUND, bound)?
    };

    let mut violations: Vec<Value> = modularity
        .violations
        .iter()
        .map(serde_json::to_value)
        .collect::<serde_json::Result<_>>()?;
    for v in &hecke.violations {
        violations.push(serde_json::to_value(v)?);
    }
    let found = !violations.is_empty();
    let v = merge(
        header(&rep),
        json!({
            "bound": bound,
            "traces_checked": modularity.traces_checked,
            "matches": modularity.matches,
            "determinants_checked": modularity.determinants_checked,
            "skipped": modularity.skipped,
            "multiplicative_checked": hecke.multiplicative_checked,
            "recursions_checked": hecke.recursions_checked,
            "violations": violations,
        }),
    );
    Ok(Outcome {
        body: pretty(&v)?,
        violations: found,
    })
}

fn oldform(
    ctx: &Context,
    ap: i64,
    eps: i64,
    k: u32,
    delta: bool,
    r: usize,
    p: u64,
) -> Result<Outcome> {
    json_only(ctx, "oldform")?;
    if !arith::is_prime(p) {
        bail!("--p {p} is not prime");
    }
    let block = tp_matrix(ap, eps, k, delta, r, p);
    ok(json!({
        "p": p,
        "k": k,
        "r": r,
        "delta": delta as u8,
        "a_p": ap,
        "beta": block.beta,
        "matrix": block.matrix,
        "char_poly": char_poly(&block),
        "stabilizer": block.kernel_vector(),
    }))
}

fn trick(
    ctx: &Context,
    d: i64,
    f: u64,
    bound: Option<u64>,
    chi: Option<Vec<i64>>,
) -> Result<Outcome> {
    json_only(ctx, "trick")?;
    if f == 0 {
        bail!("--f must be positive");
    }
    let d = disc(d)?;
    let height = ctx.config.aux_height(bound);
    let aux: AuxiliaryPrime = find_auxiliary(d, f, height)?;
    let lam = aux.lambda();
    let l = aux.l();
    let modulus = aux.congruence_modulus() as i64;
    let mut checks = json!({
        "norm_is_minus_prime": lam.norm(d) == -(l as i128) && arith::is_prime(l),
        "congruent_to_one": lam.x.rem_euclid(modulus) == 1 % modulus && lam.y.rem_euclid(modulus) == 0,
        "splits": splits(d, l),
    });
    if let Some(exps) = chi {
        let group = ctx.cache.class_group(d)?;
        let rep = DihedralRep::new(ClassCharacter::new(group, &exps)?, 2)
            .context("the mod-2 trace check needs a character of odd order")?;
        let tr = reduce_mod_p(&rep.frob_trace(l)?, rep.residue_field())?;
        checks = merge(checks, json!({ "trace_zero_mod_2": tr.is_zero() }));
    }
    let failed = checks
        .as_object()
        .expect("object")
        .values()
        .any(|v| v == &Value::Bool(false));
    let v = json!({
        "D": d.get(),
        "f": f,
        "height_bound": height,
        "lambda": lam,
        "l": l,
        "norm": lam.norm(d) as i64,
        "congruence_modulus": aux.congruence_modulus(),
        "checks": checks,
    });
    Ok(Outcome {
        body: pretty(&v)?,
        violations: failed,
    })
}

fn irred(ctx: &Context, args: &CharArgs, p: u64, bound: Option<u64>) -> Result<Outcome> {
    json_only(ctx, "irred")?;
    let rep = representation(ctx, args, p)?;
    let bound = ctx.config.verify_bound(bound);
    let traces = trace_table(&rep, bound)?;
    let level = rep.conductor();
    let verdict = classify_reducible(&traces, p, level, bound)?;
    let violations: Vec<Value> = match verdict {
        Reducibility::Irreducible | Reducibility::IrreducibleOrTrivial => Vec::new(),
        other => vec![json!({ "kind": "reducible_pattern", "verdict": other })],
    };
    let found = !violations.is_empty();
    let v = merge(
        header(&rep),
        json!({
            "level": level,
            "sample_bound": bound,
            "primes_sampled": traces.len(),
            "verdict": verdict,
            "violations": violations,
        }),
    );
    Ok(Outcome {
        body: pretty(&v)?,
        violations: found,
    })
}

struct Row {
    check: &'static str,
    expected: String,
    got: String,
}

fn paper_examples(ctx: &Context, bound: Option<u64>) -> Result<Outcome> {
    let cubic = |d: i64| -> Result<ClassCharacter> {
        let g = ctx.cache.class_group(disc(d)?)?;
        let mut exps = vec![0i64; g.cyclic().len()];
        let last = g.cyclic().last().context("trivial class group")?.1 as i64;
        *exps.last_mut().unwrap() = last / 3;
        Ok(ClassCharacter::new(g, &exps)?)
    };
    let mut rows = Vec::new();
    let mut row = |check, expected: &dyn ToString, got: &dyn ToString| {
        rows.push(Row {
            check,
            expected: expected.to_string(),
            got: got.to_string(),
        })
    };

    for (check, d) in [
        ("h(-23)", -23i64),
        ("h(2089)", 2089),
        ("narrow h(229)", 229),
    ] {
        row(check, &3, &ctx.cache.class_group(disc(d)?)?.h());
    }
    let g = ctx.cache.class_group(disc(2089)?)?;
    row(
        "2 splits in Q(sqrt 2089)",
        &"split",
        &kind_name(splitting_type(g.discriminant(), 2)),
    );
    row(
        "Frobenius class of 2 principal (2089)",
        &true,
        &(g.prime_class(2)? == g.identity()),
    );
    let rep = DihedralRep::new(cubic(2089)?, 2)?;
    row("exceptional at 2 (2089)", &true, &rep.exceptionality()?);
    row(
        "2 inert in Q(sqrt 229)",
        &"inert",
        &kind_name(splitting_type(disc(229)?, 2)),
    );
    let rep = DihedralRep::new(cubic(229)?, 2)?;
    row("exceptional at 2 (229)", &true, &rep.exceptionality()?);
    row(
        "fundamental unit norm (229)",
        &-1,
        &fundamental_unit_norm(disc(229)?)?,
    );
    row(
        "no odd char-0 lift at level 229",
        &true,
        &rep.no_char0_lift_same_level(),
    );

    let bound = ctx.config.verify_bound(bound);
    let rep = DihedralRep::new(cubic(-23)?, 2)?;
    let theta = ctx.cache.theta(rep.ideal_character(), bound)?;
    let f = reduce_qexp(&theta, rep.residue_field())?;
    let report = verify_modularity(&rep, &f, bound, &BTreeSet::new())?;
    row(
        "theta vs traces mismatches (-23, p=2)",
        &0,
        &report.violations.len(),
    );
    let md = rep.chi().modulus();
    let a2 = theta.a(2).clone();
    row(
        "a_2 of the cubic theta series (-23)",
        &CycElt::from_int(md, -1),
        &a2,
    );
    row("(-23/2)", &1, &kronecker(-23, 2));

    let failed = rows.iter().any(|r| r.expected != r.got);
    let body = match ctx.format {
        None => table(&rows),
        Some(Format::Json) => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "check": r.check,
                        "expected": r.expected,
                        "got": r.got,
                        "pass": r.expected == r.got,
                    })
                })
                .collect(),
        ))?,
        Some(Format::Csv) => bail!("paper-examples has no CSV form; use --json"),
    };
    Ok(Outcome {
        body,
        violations: failed,
    })
}

fn table(rows: &[Row]) -> String {
    let w = rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let verdict = if r.expected == r.got { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{verdict}  {:<w$}  expected {}, got {}",
            r.check, r.expected, r.got
        );
    }
    out.pop();
    out
}
