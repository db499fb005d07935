//! Comparing Frobenius traces with q-expansion coefficients, and recognising
//! reducible mod-`p` trace patterns.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, gcd, is_squarefree, mod_inv, mod_pow};
use crate::cyclotomic::{reduce_mod_p, ResElt};
use crate::error::{Error, Result};
use crate::galoisrep::DihedralRep;
use crate::scalar::Scalar;
use crate::theta::QExpansion;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mismatch {
    Trace {
        prime: u64,
        expected: ResElt,
        found: ResElt,
    },
    Determinant {
        prime: u64,
        expected: ResElt,
        found: ResElt,
    },
}

impl Mismatch {
    pub fn prime(&self) -> u64 {
        match self {
            Mismatch::Trace { prime, .. } | Mismatch::Determinant { prime, .. } => *prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularityReport {
    pub bound: u64,
    pub traces_checked: u64,
    pub matches: u64,
    pub determinants_checked: u64,
    /// Primes at which the representation ramifies and no comparison is made.
    pub skipped: Vec<u64>,
    pub violations: Vec<Mismatch>,
}

impl ModularityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `a_q(f)` with the reduced trace of Frobenius at every prime
/// `q <= bound` outside `excluded`, and `a_q^2 - a_(q^2)` (that is,
/// `eps(q) q^(k-1)` with `k = 1`) with the reduced determinant whenever `q^2`
/// is within the precision of `f`.
pub fn verify_modularity(
    rep: &DihedralRep,
    f: &QExpansion<ResElt>,
    bound: u64,
    excluded: &BTreeSet<u64>,
) -> Result<ModularityReport> {
    f.require(bound)?;
    let field = rep.residue_field();
    if !f.a(0).same_ring(&ResElt::from_int(field, 0)) {
        return Err(Error::RingMismatch);
    }
    let primes: Vec<u64> = arith::primes_up_to(bound)
        .into_iter()
        .filter(|q| !excluded.contains(q))
        .collect();
    // (prime, mismatches or None when ramified, determinant compared)
    type Outcome = (u64, Option<Vec<Mismatch>>, bool);
    let per_prime: Vec<Result<Outcome>> = primes
        .par_iter()
        .map(|&q| {
            let Ok(trace) = rep.frob_trace(q) else {
                return Ok((q, None, false));
            };
            let mut bad = Vec::new();
            let expected = reduce_mod_p(&trace, field)?;
            if *f.a(q) != expected {
                bad.push(Mismatch::Trace {
                    prime: q,
                    expected,
                    found: f.a(q).clone(),
                });
            }
            let det_checked = q.checked_mul(q).is_some_and(|qq| qq <= f.bound());
            if det_checked {
                let expected = reduce_mod_p(&rep.frob_det(q)?, field)?;
                let found = f.a(q).times(f.a(q)).minus(f.a(q * q));
                if found != expected {
                    bad.push(Mismatch::Determinant {
                        prime: q,
                        expected,
                        found,
                    });
                }
            }
            Ok((q, Some(bad), det_checked))
        })
        .collect();
    let mut report = ModularityReport {
        bound,
        traces_checked: 0,
        matches: 0,
        determinants_checked: 0,
        skipped: Vec::new(),
        violations: Vec::new(),
    };
    for item in per_prime {
        let (q, bad, det) = item?;
        let Some(bad) = bad else {
            report.skipped.push(q);
            continue;
        };
        report.traces_checked += 1;
        report.determinants_checked += det as u64;
        if !bad.iter().any(|m| matches!(m, Mismatch::Trace { .. })) {
            report.matches += 1;
        }
        report.violations.extend(bad);
    }
    Ok(report)
}

/// A representation of conductor `n` can only occur at levels `m` with `n | m`.
pub fn conductor_divides_level(n: u64, m: u64) -> bool {
    m.is_multiple_of(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reducibility {
    /// Characteristic 2 with every sampled trace zero.
    IrreducibleOrTrivial,
    /// Consistent with `chi + chi^-1` for a character of `(Z/p)^*` of this order.
    EisensteinPattern {
        order: u64,
    },
    Irreducible,
    /// The sample is empty or lives in the wrong characteristic.
    Inconsistent,
}

/// Classifies sampled traces of a mod-`p` representation of squarefree level
/// `n` with trivial determinant. The verdict is only as strong as the sample:
/// a pattern match means "consistent with", not a proof.
pub fn classify_reducible(
    traces: &BTreeMap<u64, ResElt>,
    p: u64,
    n: u64,
    sample_bound: u64,
) -> Result<Reducibility> {
    if !is_squarefree(n) {
        return Err(Error::NonSquarefreeLevel(n));
    }
    if n.is_multiple_of(p) {
        return Err(Error::BadCharacteristic { p, n });
    }
    let sample: Vec<(u64, &ResElt)> = traces
        .range(..=sample_bound)
        .filter(|(&l, _)| l != p && !n.is_multiple_of(l))
        .map(|(&l, t)| (l, t))
        .collect();
    if sample.is_empty() || sample.iter().any(|(_, t)| t.field().p() != p) {
        return Ok(Reducibility::Inconsistent);
    }
    if p == 2 {
        return Ok(if sample.iter().all(|(_, t)| t.is_zero()) {
            Reducibility::IrreducibleOrTrivial
        } else {
            Reducibility::Irreducible
        });
    }
    // characters of (Z/p)^* with values in F_p: l -> l^j
    for j in 0..p - 1 {
        let fits = sample.iter().all(|&(l, t)| {
            let x = mod_pow(l % p, j, p);
            let xinv = mod_inv(x as i128, p as i128).expect("unit") as u64;
            *t == ResElt::from_int(t.field(), ((x + xinv) % p) as i64)
        });
        if fits {
            let order = (p - 1) / gcd(j as i64, (p - 1) as i64) as u64;
            return Ok(Reducibility::EisensteinPattern { order });
        }
    }
    Ok(Reducibility::Irreducible)
}

/// Reduced traces of `rep` at unramified primes `l <= bound`, `l != p`.
pub fn trace_table(rep: &DihedralRep, bound: u64) -> Result<BTreeMap<u64, ResElt>> {
    arith::primes_up_to(bound)
        .into_par_iter()
        .filter(|&l| l != rep.p())
        .filter_map(|l| rep.frob_trace(l).ok().map(|t| (l, t)))
        .map(|(l, t)| Ok((l, reduce_mod_p(&t, rep.residue_field())?)))
        .collect()
}
