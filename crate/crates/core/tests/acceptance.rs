//! Acceptance suite: one line per criterion, non-zero exit status on failure.
//!
//! Each criterion checks the library against an oracle computed here, not
//! against values produced by the library itself. Wall-clock limits are
//! pinned below and are part of the verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dihedral::arith::{self, kronecker};
use dihedral::galoisrep::character_exponents;
use dihedral::heckeold::{ap_zero_stabilize, char_poly, degeneracy_embed, hecke_tn, tp_matrix};
use dihedral::modcheck::trace_table;
use dihedral::quadfield::{cf_period, fundamental_discriminants};
use dihedral::serretrick::splits;
use dihedral::{
    classify_reducible, find_auxiliary, fundamental_unit_norm, hecke_consistency, reduce_mod_p,
    reduce_qexp, splitting_type, theta_coeffs, tp_action_level_divisible, twisted_character,
    verify_modularity, ClassCharacter, CycElt, DihedralRep, Form, FormClassGroup,
    FundamentalDiscriminant, IdealCharacter, QExpansion, Reducibility, ResElt, ResidueField,
    Scalar, SplittingType,
};

const CLASS_GROUP_LIMIT: Duration = Duration::from_secs(5);
const SPLITTING_LIMIT: Duration = Duration::from_secs(5);
const CF_LIMIT: Duration = Duration::from_secs(1);
const MODULARITY_LIMIT: Duration = Duration::from_secs(60);
const AUXILIARY_LIMIT: Duration = Duration::from_secs(60);

const MODULARITY_BOUND: u64 = 10_000;
const ETA_TERMS: u64 = 50;
const RECURSION_PRIME_BOUND: u64 = 100;
const RECURSION_BOUND: u64 = 10_000;
const MAX_BLOCK_RANK: usize = 5;
const OLDFORM_BOUND: u64 = 200;
const COMMUTATION_N: u64 = 50;
const AUXILIARY_HEIGHT: u64 = 10_000;
const TWIST_SAMPLE: usize = 200;
const IRRED_DISC_BOUND: i64 = 500;
const IRRED_SAMPLE: u64 = 1_000;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fd(d: i64) -> FundamentalDiscriminant {
    FundamentalDiscriminant::new(d).expect("fundamental")
}

fn group(d: i64) -> Arc<FormClassGroup> {
    Arc::new(FormClassGroup::new(fd(d)).expect("class group"))
}

/// A character of order 3 on the last cyclic factor.
fn cubic(g: &Arc<FormClassGroup>) -> ClassCharacter {
    let mut exps = vec![0i64; g.cyclic().len()];
    let last = g.cyclic().last().expect("nontrivial group").1 as i64;
    *exps.last_mut().unwrap() = last / 3;
    ClassCharacter::new(g.clone(), &exps).expect("order 3")
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let out = match out {
        Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
        other => other,
    };
    (out, elapsed)
}

// 1 ---------------------------------------------------------------------

/// Reduced forms `|b| <= a <= c` with `b >= 0` when `|b| = a` or `a = c`.
fn reduced_forms_by_scan(d: i64) -> BTreeSet<Form> {
    let mut out = BTreeSet::new();
    let n = d.unsigned_abs() as i64;
    for a in 1..=n {
        if 3 * a * a > n {
            break;
        }
        for b in -a..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a || ((b.abs() == a || a == c) && b < 0) {
                continue;
            }
            if arith::gcd(arith::gcd(a, b), c) == 1 {
                out.insert(Form { a, b, c });
            }
        }
    }
    out
}

fn criterion_1() -> Check {
    let mut notes = Vec::new();
    for (d, h) in [(-23i64, 3usize), (2089, 3), (229, 3)] {
        let (res, t) = timed(CLASS_GROUP_LIMIT, || {
            let g = group(d);
            ensure(g.h() == h, || format!("D={d}: h={} expected {h}", g.h()))?;
            let orders: Vec<u64> = g.cyclic().iter().map(|c| c.1).collect();
            ensure(orders == [3], || {
                format!("D={d}: cyclic factors {orders:?}")
            })?;
            if d < 0 {
                let scan = reduced_forms_by_scan(d);
                let got: BTreeSet<Form> = g.classes().iter().copied().collect();
                ensure(scan == got, || format!("D={d}: {got:?} vs scan {scan:?}"))?;
            }
            Ok(String::new())
        });
        res?;
        notes.push(format!("h({d})={h} in {t:.1?}"));
    }
    Ok(notes.join(", "))
}

// 2 ---------------------------------------------------------------------

fn criterion_2() -> Check {
    timed(SPLITTING_LIMIT, || {
        let g = group(2089);
        ensure(splitting_type(fd(2089), 2) == SplittingType::Split, || {
            "2 does not split in Q(sqrt 2089)".into()
        })?;
        let c = g.prime_class(2).map_err(|e| e.to_string())?;
        ensure(c == g.identity(), || {
            format!("Frobenius class of 2 is {:?}", g.form(c))
        })?;
        let rep = DihedralRep::new(cubic(&g), 2).map_err(|e| e.to_string())?;
        ensure(rep.exceptionality() == Ok(true), || {
            "D=2089 not exceptional at 2".into()
        })?;

        ensure(splitting_type(fd(229), 2) == SplittingType::Inert, || {
            "2 is not inert in Q(sqrt 229)".into()
        })?;
        let rep = DihedralRep::new(cubic(&group(229)), 2).map_err(|e| e.to_string())?;
        ensure(rep.exceptionality() == Ok(true), || {
            "D=229 not exceptional at 2".into()
        })?;
        Ok("2089: 2 split, principal; 229: 2 inert; both exceptional".into())
    })
    .0
}

// 3 ---------------------------------------------------------------------

fn criterion_3() -> Check {
    let (unit, t) = timed(CF_LIMIT, || {
        let n = fundamental_unit_norm(fd(229)).map_err(|e| e.to_string())?;
        ensure(n == -1, || format!("unit norm {n}"))?;
        let period = cf_period(fd(229)).len();
        ensure(period % 2 == 1, || {
            format!("period length {period} is even")
        })?;
        Ok(format!("N(eps)=-1, period {period}"))
    });
    let unit = unit?;
    let rep = DihedralRep::new(cubic(&group(229)), 2).map_err(|e| e.to_string())?;
    ensure(rep.no_char0_lift_same_level(), || {
        "a characteristic zero lift at the same level was not excluded".into()
    })?;
    Ok(format!("{unit} in {t:.1?}; no odd char-0 lift"))
}

// 4 ---------------------------------------------------------------------

/// `q * prod (1 - q^n)(1 - q^(23n))` to `terms` coefficients.
fn eta_product_23(terms: u64) -> Vec<i64> {
    let len = terms as usize + 1;
    let mut s = vec![0i64; len];
    s[1] = 1;
    for n in 1..len {
        for step in [n, 23 * n] {
            if step >= len {
                continue;
            }
            for i in (step..len).rev() {
                s[i] -= s[i - step];
            }
        }
    }
    s
}

/// Representation numbers `#{(x, y) : Q(x, y) = n}` for a definite form.
fn representations(f: Form, terms: u64) -> Vec<i64> {
    let mut r = vec![0i64; terms as usize + 1];
    let lim = 2 * (terms as i64) + 2;
    for x in -lim..=lim {
        for y in -lim..=lim {
            let v = f.eval(x, y);
            if v >= 0 && v <= terms as i128 {
                r[v as usize] += 1;
            }
        }
    }
    r
}

fn criterion_4() -> Check {
    timed(MODULARITY_LIMIT, || {
        let g = group(-23);
        let chi = cubic(&g);
        let rep = DihedralRep::new(chi.clone(), 2).map_err(|e| e.to_string())?;
        let theta =
            theta_coeffs(&IdealCharacter::new(chi), MODULARITY_BOUND).map_err(|e| e.to_string())?;
        let reduced = reduce_qexp(&theta, rep.residue_field()).map_err(|e| e.to_string())?;
        let report = verify_modularity(&rep, &reduced, MODULARITY_BOUND, &BTreeSet::new())
            .map_err(|e| e.to_string())?;
        ensure(report.passed(), || {
            format!(
                "{} mismatches, first {:?}",
                report.violations.len(),
                report.violations[0]
            )
        })?;
        ensure(report.skipped == [23], || {
            format!("skipped {:?}", report.skipped)
        })?;
        ensure(report.traces_checked == report.matches, || {
            "trace count".into()
        })?;

        let eta = eta_product_23(ETA_TERMS);
        let principal = representations(Form { a: 1, b: 1, c: 6 }, ETA_TERMS);
        let other = representations(Form { a: 2, b: 1, c: 3 }, ETA_TERMS);
        for n in 1..=ETA_TERMS as usize {
            let combo = principal[n] - other[n];
            ensure(combo % 2 == 0 && combo / 2 == eta[n], || {
                format!("form oracle disagrees with eta product at n={n}")
            })?;
            let a = theta.a(n as u64).as_integer();
            ensure(a == Some(eta[n]), || {
                format!(
                    "theta a_{n} = {:?}, eta product {}",
                    theta.a(n as u64),
                    eta[n]
                )
            })?;
        }
        Ok(format!(
            "{} traces, {} determinants, 0 mismatches; eta product to {ETA_TERMS}",
            report.traces_checked, report.determinants_checked
        ))
    })
    .0
}

// 5 ---------------------------------------------------------------------

fn criterion_5() -> Check {
    let chi = cubic(&group(-23));
    let md = chi.modulus().clone();
    let theta =
        theta_coeffs(&IdealCharacter::new(chi), RECURSION_BOUND).map_err(|e| e.to_string())?;
    let eps = |l: u64| CycElt::from_int(&md, kronecker(-23, l) as i64);
    let report = hecke_consistency(&theta, eps, 1, 23, RECURSION_PRIME_BOUND, RECURSION_BOUND)
        .map_err(|e| e.to_string())?;
    ensure(report.violations.is_empty(), || {
        format!("violations {:?}", report.violations)
    })?;
    ensure(
        report.recursions_checked > 0 && report.multiplicative_checked > 0,
        || "nothing checked".into(),
    )?;
    Ok(format!(
        "{} recursions, {} coprime pairs",
        report.recursions_checked, report.multiplicative_checked
    ))
}

// 6 ---------------------------------------------------------------------

/// Integer polynomials in two commuting variables `a` and `b`.
#[derive(Debug, Clone, PartialEq, Default)]
struct Poly2(BTreeMap<(u32, u32), i64>);

impl Poly2 {
    fn monomial(c: i64, i: u32, j: u32) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert((i, j), c);
        }
        Poly2(m)
    }

    fn normalised(mut self) -> Self {
        self.0.retain(|_, c| *c != 0);
        self
    }
}

impl Scalar for Poly2 {
    fn zero_like(&self) -> Self {
        Poly2::default()
    }
    fn one_like(&self) -> Self {
        Poly2::monomial(1, 0, 0)
    }
    fn int_like(&self, n: i64) -> Self {
        Poly2::monomial(n, 0, 0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.0.clone();
        for (k, c) in &rhs.0 {
            *out.entry(*k).or_default() += c;
        }
        Poly2(out).normalised()
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut out = BTreeMap::new();
        for ((i, j), c) in &self.0 {
            for ((k, l), d) in &rhs.0 {
                *out.entry((i + k, j + l)).or_default() += c * d;
            }
        }
        Poly2(out).normalised()
    }
    fn negated(&self) -> Self {
        Poly2(self.0.iter().map(|(k, c)| (*k, -c)).collect())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn same_ring(&self, _other: &Self) -> bool {
        true
    }
}

fn integer_theta_23(bound: u64) -> std::result::Result<QExpansion<i64>, String> {
    let theta =
        theta_coeffs(&IdealCharacter::new(cubic(&group(-23))), bound).map_err(|e| e.to_string())?;
    let coeffs: Option<Vec<i64>> = theta.coeffs().iter().map(CycElt::as_integer).collect();
    Ok(QExpansion::new(coeffs.ok_or("non-integral coefficient")?))
}

fn criterion_6() -> Check {
    // x^(r-1) (x^2 - a x + delta * b), lowest degree first
    let (a, b) = (Poly2::monomial(1, 1, 0), Poly2::monomial(1, 0, 1));
    let zero = Poly2::default();
    let one = zero.one_like();
    for r in 0..=MAX_BLOCK_RANK {
        for delta in [true, false] {
            let block = tp_matrix(a.clone(), b.clone(), 1, delta, r, 7);
            let beta = if delta { b.clone() } else { zero.clone() };
            let mut expected = vec![zero.clone(); r + 2];
            if r == 0 {
                expected = vec![a.negated(), one.clone()];
            } else {
                expected[r - 1] = beta;
                expected[r] = a.negated();
                expected[r + 1] = one.clone();
            }
            let got = char_poly(&block);
            ensure(got == expected, || format!("r={r} delta={delta}: {got:?}"))?;
        }
    }

    let f = integer_theta_23(OLDFORM_BOUND * COMMUTATION_N * 5)?;
    let primes = [2u64, 3, 5, 7];
    for &p in &primes {
        let a_p = *f.a(p);
        let eps_p = kronecker(-23, p) as i64;
        for r in 1..=3usize {
            let block = tp_matrix(a_p, eps_p, 1, true, r, p);
            let c: Vec<i64> = (0..=r as i64).map(|i| 2 * i - 3).collect();
            let embed = |c: &[i64], bound: u64| {
                let fs: Vec<QExpansion<i64>> = c.iter().map(|x| f.scale(x)).collect();
                degeneracy_embed(&fs, p, bound).map_err(|e| e.to_string())
            };
            let lhs = tp_action_level_divisible(&embed(&c, OLDFORM_BOUND * p)?, p, OLDFORM_BOUND)
                .map_err(|e| e.to_string())?;
            let rhs = embed(&block.apply(&c), OLDFORM_BOUND)?;
            ensure(lhs == rhs, || format!("matrix/action mismatch p={p} r={r}"))?;
        }

        let g =
            ap_zero_stabilize(&f, &a_p, &eps_p, 1, p, OLDFORM_BOUND).map_err(|e| e.to_string())?;
        ensure(*g.a(p) == 0, || format!("stabilised a_{p} = {}", g.a(p)))?;
        for l in arith::primes_up_to(OLDFORM_BOUND) {
            ensure(l == p || g.a(l) == f.a(l), || {
                format!("p={p}: a_{l} changed")
            })?;
        }

        let level = 23 * p * p;
        let eps = |d: u64| kronecker(-23, d) as i64;
        let comps = [f.clone(), f.scale(&-2), f.scale(&5)];
        for n in (1..=COMMUTATION_N).filter(|n| n % p != 0) {
            let embedded =
                degeneracy_embed(&comps, p, OLDFORM_BOUND * n).map_err(|e| e.to_string())?;
            let lhs =
                hecke_tn(&embedded, n, 1, level, eps, OLDFORM_BOUND).map_err(|e| e.to_string())?;
            let moved: Vec<QExpansion<i64>> = comps
                .iter()
                .map(|h| hecke_tn(h, n, 1, level, eps, OLDFORM_BOUND))
                .collect::<dihedral::Result<_>>()
                .map_err(|e| e.to_string())?;
            let rhs = degeneracy_embed(&moved, p, OLDFORM_BOUND).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || {
                format!("T_{n} does not commute with the p={p} embedding")
            })?;
        }
    }
    Ok(format!(
        "char poly r<={MAX_BLOCK_RANK}; action, stabilisation, T_n (n<={COMMUTATION_N}) at p in {primes:?}"
    ))
}

// 7 ---------------------------------------------------------------------

fn criterion_7() -> Check {
    timed(AUXILIARY_LIMIT, || {
        let d = fd(229);
        let aux = find_auxiliary(d, 1, AUXILIARY_HEIGHT).map_err(|e| e.to_string())?;
        let lam = aux.lambda();
        let l = aux.l();
        ensure(lam.norm(d) == -(l as i128), || {
            format!("N({lam:?}) != -{l}")
        })?;
        ensure(arith::factorize(l) == [(l, 1)], || format!("{l} not prime"))?;
        ensure(
            lam.x.rem_euclid(916) == 1 && lam.y.rem_euclid(916) == 0,
            || format!("{lam:?} is not 1 mod 916"),
        )?;
        ensure(splits(d, l), || format!("{l} does not split"))?;

        let chi = cubic(&group(229));
        let plain = DihedralRep::new(chi.clone(), 2).map_err(|e| e.to_string())?;
        let field = plain.residue_field().clone();
        let at_l = reduce_mod_p(&plain.frob_trace(l).map_err(|e| e.to_string())?, &field)
            .map_err(|e| e.to_string())?;
        ensure(at_l.is_zero(), || format!("mod-2 trace at {l} is {at_l:?}"))?;

        let twisted = twisted_character(chi, aux).map_err(|e| e.to_string())?;
        let sample: Vec<u64> = arith::primes_up_to(100_000)
            .into_iter()
            .filter(|&q| q != 2 && q != 229 && q != l)
            .take(TWIST_SAMPLE)
            .collect();
        let bound = *sample.last().unwrap();
        let theta = theta_coeffs(&twisted, bound).map_err(|e| e.to_string())?;
        let reduced = reduce_qexp(&theta, &field).map_err(|e| e.to_string())?;
        for &q in &sample {
            let tr = reduce_mod_p(&plain.frob_trace(q).map_err(|e| e.to_string())?, &field)
                .map_err(|e| e.to_string())?;
            ensure(*reduced.a(q) == tr, || {
                format!("twisted a_{q} differs from the trace")
            })?;
        }
        Ok(format!(
            "lambda = {} + {} omega, l = {l}; {TWIST_SAMPLE} primes up to {bound}",
            lam.x, lam.y
        ))
    })
    .0
}

// 8 ---------------------------------------------------------------------

fn synthesized(p: u64, j: u64, bound: u64) -> BTreeMap<u64, ResElt> {
    let field = ResidueField::new(1, p).expect("prime field");
    arith::primes_up_to(bound)
        .into_iter()
        .filter(|&l| l != p)
        .map(|l| {
            let x = arith::mod_pow(l % p, j, p);
            let xinv = arith::mod_pow(x, p - 2, p);
            (l, ResElt::from_int(&field, (x + xinv) as i64))
        })
        .collect()
}

fn criterion_8() -> Check {
    let f4 = ResidueField::new(3, 2).map_err(|e| e.to_string())?;
    let zeros: BTreeMap<u64, ResElt> = arith::primes_up_to(IRRED_SAMPLE)
        .into_iter()
        .map(|l| (l, ResElt::from_int(&f4, 0)))
        .collect();
    let v = classify_reducible(&zeros, 2, 23, IRRED_SAMPLE).map_err(|e| e.to_string())?;
    ensure(v == Reducibility::IrreducibleOrTrivial, || {
        format!("all-zero: {v:?}")
    })?;

    let mut patterns = 0;
    for p in [3u64, 5, 7, 11, 13] {
        for order in arith::divisors(p - 1) {
            // l -> l^j has order `order` on (Z/p)^*
            let j = (p - 1) / order;
            let got = classify_reducible(&synthesized(p, j, IRRED_SAMPLE), p, 1, IRRED_SAMPLE)
                .map_err(|e| e.to_string())?;
            let expected = Reducibility::EisensteinPattern { order };
            ensure(got == expected, || format!("p={p} d={order}: {got:?}"))?;
            patterns += 1;
        }
    }

    let mut reps = 0;
    for d in fundamental_discriminants(-IRRED_DISC_BOUND, IRRED_DISC_BOUND) {
        if d.rem_euclid(4) != 1 {
            continue;
        }
        let g = group(d);
        for exps in character_exponents(&g) {
            let exps: Vec<i64> = exps.iter().map(|&e| e as i64).collect();
            let Ok(chi) = ClassCharacter::new(g.clone(), &exps) else {
                continue;
            };
            if chi.order() % 2 == 0 {
                continue;
            }
            let rep = DihedralRep::new(chi, 2).map_err(|e| e.to_string())?;
            let traces = trace_table(&rep, IRRED_SAMPLE).map_err(|e| e.to_string())?;
            let v = classify_reducible(&traces, 2, d.unsigned_abs(), IRRED_SAMPLE)
                .map_err(|e| e.to_string())?;
            ensure(v == Reducibility::Irreducible, || {
                format!("D={d} {exps:?}: {v:?}")
            })?;
            reps += 1;
        }
    }
    Ok(format!(
        "{patterns} Eisenstein patterns, {reps} dihedral trace sets"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("class groups", criterion_1),
        ("splitting and exceptionality", criterion_2),
        ("unit norm obstruction", criterion_3),
        ("modularity D=-23 p=2", criterion_4),
        ("eigenform recursions", criterion_5),
        ("oldform algebra", criterion_6),
        ("auxiliary twist D=229", criterion_7),
        ("reducibility patterns", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({t:.2?}) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({t:.2?}) {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
