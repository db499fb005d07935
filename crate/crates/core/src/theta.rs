//! Theta series `sum_a chi(a) q^N(a)` of ideal characters of quadratic fields.

use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{self, FactorSieve};
use crate::cyclotomic::{reduce_mod_p, CycElt, ResElt, ResidueField};
use crate::error::{Error, Result};
use crate::galoisrep::ClassCharacter;
use crate::quadfield::{primes_above, FormClassGroup, PrimeIdeal, SplittingType};
use crate::scalar::Scalar;
use crate::serretrick::AuxiliaryPrime;

/// A value `+-zeta_m^index` or `0` of an ideal character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root { index: u64, negate: bool },
}

impl CharValue {
    pub const ONE: Self = CharValue::Root {
        index: 0,
        negate: false,
    };

    /// Product of two values in `mu_m`.
    pub fn mul_mod(self, other: Self, m: u64) -> Self {
        match (self, other) {
            (
                CharValue::Root {
                    index: a,
                    negate: s,
                },
                CharValue::Root {
                    index: b,
                    negate: t,
                },
            ) => CharValue::Root {
                index: (a + b) % m,
                negate: s ^ t,
            },
            _ => CharValue::Zero,
        }
    }
}

/// A class group character, optionally multiplied by the quadratic character
/// of `K(sqrt lambda)` attached to an auxiliary prime.
#[derive(Debug, Clone)]
pub struct IdealCharacter {
    base: ClassCharacter,
    twist: Option<Arc<AuxiliaryPrime>>,
}

impl IdealCharacter {
    pub fn new(base: ClassCharacter) -> Self {
        Self { base, twist: None }
    }

    pub fn twisted(base: ClassCharacter, aux: AuxiliaryPrime) -> Result<Self> {
        if aux.discriminant() != base.discriminant() {
            return Err(Error::DiscriminantMismatch(
                aux.discriminant().get(),
                base.discriminant().get(),
            ));
        }
        Ok(Self {
            base,
            twist: Some(Arc::new(aux)),
        })
    }

    pub fn base(&self) -> &ClassCharacter {
        &self.base
    }

    pub fn twist(&self) -> Option<&AuxiliaryPrime> {
        self.twist.as_deref()
    }

    /// Norm of the conductor: 1, or the auxiliary prime.
    pub fn conductor_norm(&self) -> u64 {
        self.twist.as_ref().map_or(1, |t| t.l())
    }

    /// `chi^sigma`: the base character inverted and the twist conjugated.
    pub fn conjugate(&self) -> Self {
        Self {
            base: self.base.sigma_conjugate(),
            twist: self.twist.as_ref().map(|t| Arc::new(t.conjugate())),
        }
    }

    fn group(&self) -> &FormClassGroup {
        self.base.group()
    }

    /// Value on a prime ideal. Inert primes are principal with a totally
    /// positive generator, so the class character is trivial on them.
    pub fn value(&self, q: &PrimeIdeal) -> CharValue {
        let index = self.base.value_index(self.group().ideal_class(q));
        let sign = self.twist.as_ref().map_or(1, |t| t.xi(q));
        match sign {
            0 => CharValue::Zero,
            s => CharValue::Root {
                index,
                negate: s < 0,
            },
        }
    }

    /// The coefficient of `q^(l^e)`: the sum of the character over ideals of
    /// norm `l^e`.
    fn prime_power_coeff(&self, l: u64, e: u32) -> Vec<CharValue> {
        let ps = primes_above(self.base.discriminant(), l).expect("l is prime");
        let m = self.base.order();
        let pow = |v: CharValue, k: u32| (0..k).fold(CharValue::ONE, |acc, _| acc.mul_mod(v, m));
        match ps[0].kind {
            SplittingType::Split => {
                let (a, b) = (self.value(&ps[0]), self.value(&ps[1]));
                (0..=e)
                    .map(|i| pow(a, i).mul_mod(pow(b, e - i), m))
                    .collect()
            }
            SplittingType::Inert if e.is_multiple_of(2) => vec![pow(self.value(&ps[0]), e / 2)],
            SplittingType::Inert => Vec::new(),
            SplittingType::Ramified => vec![pow(self.value(&ps[0]), e)],
        }
    }

    fn sum_values(&self, values: &[CharValue]) -> CycElt {
        let md = self.base.modulus();
        let mut counts = vec![0i64; self.base.order() as usize];
        for v in values {
            if let CharValue::Root { index, negate } = *v {
                counts[index as usize] += if negate { -1 } else { 1 };
            }
        }
        CycElt::from_coeffs(md, counts).expect("same modulus")
    }
}

/// An integral ideal given by its prime factorisation, with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealDescriptor {
    pub factors: Vec<(PrimeIdeal, u32)>,
    pub class: usize,
}

/// All integral ideals of norm `n`.
pub fn ideals_of_norm(group: &FormClassGroup, n: u64) -> Vec<IdealDescriptor> {
    let d = group.discriminant();
    let mut out = vec![IdealDescriptor {
        factors: Vec::new(),
        class: 0,
    }];
    for (l, e) in arith::factorize(n) {
        let ps = primes_above(d, l).expect("prime");
        let local: Vec<(Vec<(PrimeIdeal, u32)>, usize)> = match ps[0].kind {
            SplittingType::Split => (0..=e)
                .map(|i| {
                    let (a, b) = (group.ideal_class(&ps[0]), group.ideal_class(&ps[1]));
                    let class = group.op(group.pow(a, i as i64), group.pow(b, (e - i) as i64));
                    let f = [(ps[0], i), (ps[1], e - i)]
                        .into_iter()
                        .filter(|&(_, k)| k > 0)
                        .collect();
                    (f, class)
                })
                .collect(),
            SplittingType::Inert if e % 2 == 0 => vec![(vec![(ps[0], e / 2)], 0)],
            SplittingType::Inert => return Vec::new(),
            SplittingType::Ramified => {
                let c = group.ideal_class(&ps[0]);
                vec![(vec![(ps[0], e)], group.pow(c, e as i64))]
            }
        };
        out = out
            .into_iter()
            .flat_map(|ideal| {
                local.iter().map(move |(f, c)| {
                    let mut factors = ideal.factors.clone();
                    factors.extend(f.iter().copied());
                    IdealDescriptor {
                        factors,
                        class: group.op(ideal.class, *c),
                    }
                })
            })
            .collect();
    }
    out
}

/// Which ring the coefficients of a [`QExpansion`] live in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientRing {
    Cyclotomic { m: u64 },
    Residue { p: u64, m: u64, factor: Vec<u64> },
    Integer,
}

pub trait RingLabel {
    fn ring_label(&self) -> CoefficientRing;
}

impl RingLabel for CycElt {
    fn ring_label(&self) -> CoefficientRing {
        CoefficientRing::Cyclotomic {
            m: self.modulus().m(),
        }
    }
}

impl RingLabel for ResElt {
    fn ring_label(&self) -> CoefficientRing {
        let f = self.field();
        CoefficientRing::Residue {
            p: f.p(),
            m: f.m(),
            factor: f.factor().to_vec(),
        }
    }
}

impl RingLabel for i64 {
    fn ring_label(&self) -> CoefficientRing {
        CoefficientRing::Integer
    }
}

/// A q-expansion `a_0 + a_1 q + ... + a_B q^B`, known exactly up to `q^B`.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> QExpansion<S> {
    /// From coefficients `a_0, ..., a_B`; `coeffs` must be nonempty.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a q-expansion needs at least a_0");
        Self { coeffs }
    }

    /// The zero expansion to precision `bound`, in the ring of `like`.
    pub fn zero(like: &S, bound: u64) -> Self {
        Self::new(vec![like.zero_like(); bound as usize + 1])
    }

    pub fn bound(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    /// `a_n`; panics beyond the precision.
    pub fn a(&self, n: u64) -> &S {
        &self.coeffs[n as usize]
    }

    pub fn get(&self, n: u64) -> Result<&S> {
        self.coeffs
            .get(n as usize)
            .ok_or(Error::InsufficientPrecision {
                needed: n,
                have: self.bound(),
            })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn set(&mut self, n: u64, v: S) {
        self.coeffs[n as usize] = v;
    }

    pub fn truncate(&self, bound: u64) -> Result<Self> {
        self.require(bound)?;
        Ok(Self::new(self.coeffs[..=bound as usize].to_vec()))
    }

    pub fn require(&self, bound: u64) -> Result<()> {
        if self.bound() < bound {
            return Err(Error::InsufficientPrecision {
                needed: bound,
                have: self.bound(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.coeffs[0].same_ring(&other.coeffs[0]) {
            return Err(Error::RingMismatch);
        }
        let b = self.bound().min(other.bound()) as usize;
        Ok(Self::new(
            (0..=b)
                .map(|i| self.coeffs[i].plus(&other.coeffs[i]))
                .collect(),
        ))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> QExpansion<T> {
        QExpansion::new(self.coeffs.iter().map(f).collect())
    }
}

impl<S: Scalar + Serialize + RingLabel> Serialize for QExpansion<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut st = s.serialize_struct("QExpansion", 3)?;
        st.serialize_field("ring", &self.coeffs[0].ring_label())?;
        st.serialize_field("B", &self.bound())?;
        st.serialize_field("a", &self.coeffs[1..])?;
        st.end()
    }
}

/// Exact coefficients `a_0, ..., a_B` of the theta series of `chi`.
pub fn theta_coeffs(chi: &IdealCharacter, bound: u64) -> Result<QExpansion<CycElt>> {
    let d = chi.base().discriminant();
    if d.is_real() && chi.twist().is_none() {
        return Err(Error::UnsupportedSignature);
    }
    if d.get() == -3 || d.get() == -4 {
        return Err(Error::SmallDiscriminant(d.get()));
    }
    let sieve = FactorSieve::new(bound.max(2));
    Ok(theta_with_sieve(chi, bound, &sieve))
}

/// As [`theta_coeffs`], reusing a factorisation sieve covering `1..=bound`.
pub fn theta_with_sieve(
    chi: &IdealCharacter,
    bound: u64,
    sieve: &FactorSieve,
) -> QExpansion<CycElt> {
    assert!(sieve.limit() >= bound);
    let md = chi.base().modulus();
    let m = chi.base().order();
    let mut coeffs: Vec<CycElt> = (0..=bound)
        .into_par_iter()
        .map(|n| {
            if n == 0 {
                return CycElt::zero(md);
            }
            let mut terms = vec![CharValue::ONE];
            for (l, e) in sieve.factor(n) {
                let local = chi.prime_power_coeff(l, e);
                terms = terms
                    .iter()
                    .flat_map(|t| local.iter().map(move |u| t.mul_mod(*u, m)))
                    .collect();
                if terms.is_empty() {
                    break;
                }
            }
            chi.sum_values(&terms)
        })
        .collect();
    coeffs.shrink_to_fit();
    QExpansion::new(coeffs)
}

/// Coefficientwise reduction modulo the prime of `field`.
pub fn reduce_qexp(
    f: &QExpansion<CycElt>,
    field: &Arc<ResidueField>,
) -> Result<QExpansion<ResElt>> {
    let coeffs = f
        .coeffs()
        .par_iter()
        .map(|a| reduce_mod_p(a, field))
        .collect::<Result<Vec<_>>>()?;
    Ok(QExpansion::new(coeffs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeckeViolation {
    Multiplicative { m: u64, n: u64 },
    Recursion { l: u64, r: u32 },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct HeckeReport {
    pub multiplicative_checked: u64,
    pub recursions_checked: u64,
    pub violations: Vec<HeckeViolation>,
}

/// Checks the eigenform relations `a_mn = a_m a_n` for coprime `m, n` with
/// `mn <= bound`, and `a_{l^(r+1)} = a_l a_{l^r} - eps(l) l^(k-1) a_{l^(r-1)}`
/// for primes `l <= prime_bound` (the last term dropped when `l | level`).
pub fn hecke_consistency<S: Scalar>(
    f: &QExpansion<S>,
    epsilon: impl Fn(u64) -> S + Sync,
    k: u32,
    level: u64,
    prime_bound: u64,
    bound: u64,
) -> Result<HeckeReport> {
    f.require(bound)?;
    let mut report = HeckeReport::default();
    let mult: Vec<(u64, Option<HeckeViolation>)> = (2..=bound / 2)
        .into_par_iter()
        .map(|m| {
            let mut checked = 0;
            let mut bad = None;
            for n in (m + 1)..=bound / m {
                if num_integer::Integer::gcd(&m, &n) != 1 {
                    continue;
                }
                checked += 1;
                if bad.is_none() && *f.a(m * n) != f.a(m).times(f.a(n)) {
                    bad = Some(HeckeViolation::Multiplicative { m, n });
                }
            }
            (checked, bad)
        })
        .collect();
    for (c, bad) in mult {
        report.multiplicative_checked += c;
        report.violations.extend(bad);
    }
    for l in arith::primes_up_to(prime_bound.min(bound)) {
        let weight = f.a(1).int_like((l as i64).pow(k.saturating_sub(1)));
        let eps = (!level.is_multiple_of(l)).then(|| epsilon(l).times(&weight));
        let mut r = 1u32;
        let mut prev = 1u64;
        let mut cur = l;
        while cur.checked_mul(l).is_some_and(|x| x <= bound) {
            let next = cur * l;
            let mut rhs = f.a(l).times(f.a(cur));
            if let Some(e) = &eps {
                rhs = rhs.minus(&e.times(f.a(prev)));
            }
            report.recursions_checked += 1;
            if *f.a(next) != rhs {
                report.violations.push(HeckeViolation::Recursion { l, r });
            }
            prev = cur;
            cur = next;
            r += 1;
        }
    }
    Ok(report)
}
