//! Class group characters and the two-dimensional representations of
//! `Gal(Qbar/Q)` induced from them.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::arith::{self, lcm};
use crate::cyclotomic::{reduce_mod_p, CycElt, CycModulus, ResElt, ResidueField};
use crate::error::{Error, Result};
use crate::quadfield::{
    fundamental_unit_norm, primes_above, FormClassGroup, FundamentalDiscriminant, PrimeIdeal,
    SplittingType,
};
use crate::scalar::Scalar;
use crate::serretrick::AuxiliaryPrime;
use crate::theta::{CharValue, IdealCharacter};

/// A character of a form class group with values in `mu_m`.
///
/// The character sends the `i`-th cyclic generator (of order `d_i`) to
/// `zeta_{d_i}^{e_i}`.
#[derive(Debug, Clone)]
pub struct ClassCharacter {
    group: Arc<FormClassGroup>,
    exponents: Vec<u64>,
    order: u64,
    modulus: Arc<CycModulus>,
    /// `chi(class) = zeta_m^values[class]`
    values: Vec<u64>,
}

impl PartialEq for ClassCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.discriminant() == other.group.discriminant() && self.values == other.values
    }
}

/// All exponent vectors of characters of `group`, in odometer order.
pub fn character_exponents(group: &FormClassGroup) -> Vec<Vec<u64>> {
    let orders: Vec<u64> = group.cyclic().iter().map(|&(_, d)| d).collect();
    let mut out = vec![Vec::new()];
    for d in orders {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..d).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

impl ClassCharacter {
    /// Character with the given exponents; rejects characters of order 1 or 2.
    pub fn new(group: Arc<FormClassGroup>, exponents: &[i64]) -> Result<Self> {
        let chi = Self::any(group, exponents)?;
        if chi.order <= 2 {
            return Err(Error::NotDihedral(chi.order));
        }
        Ok(chi)
    }

    /// Like [`Self::new`] but also accepts quadratic and trivial characters.
    pub fn any(group: Arc<FormClassGroup>, exponents: &[i64]) -> Result<Self> {
        let cyclic = group.cyclic();
        if exponents.len() != cyclic.len() {
            return Err(Error::ExponentCount {
                expected: cyclic.len(),
                got: exponents.len(),
            });
        }
        let exps: Vec<u64> = exponents
            .iter()
            .zip(cyclic)
            .map(|(&e, &(_, d))| e.rem_euclid(d as i64) as u64)
            .collect();
        let order = exps.iter().zip(cyclic).fold(1, |acc, (&e, &(_, d))| {
            lcm(acc, d / arith::gcd(d as i64, e as i64) as u64)
        });
        let big = group.exponent();
        let values = (0..group.h())
            .map(|class| {
                let idx = group
                    .coords(class)
                    .iter()
                    .zip(&exps)
                    .zip(cyclic)
                    .map(|((&c, &e), &(_, d))| (c * e % d) * (big / d))
                    .sum::<u64>()
                    % big;
                idx / (big / order)
            })
            .collect();
        Ok(Self {
            modulus: CycModulus::new(order),
            group,
            exponents: exps,
            order,
            values,
        })
    }

    pub fn group(&self) -> &Arc<FormClassGroup> {
        &self.group
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.group.discriminant()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Order `m` of the character.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// The coefficient ring `Z[zeta_m]`.
    pub fn modulus(&self) -> &Arc<CycModulus> {
        &self.modulus
    }

    /// `k` with `chi(class) = zeta_m^k`.
    pub fn value_index(&self, class: usize) -> u64 {
        self.values[class]
    }

    pub fn value(&self, class: usize) -> CycElt {
        CycElt::zeta_pow(&self.modulus, self.values[class] as i64)
    }

    /// The conjugate character `g -> chi(s^-1 g s)`, which on ideal classes of
    /// a quadratic field is `chi^-1`.
    pub fn sigma_conjugate(&self) -> Self {
        let exps: Vec<i64> = self.exponents.iter().map(|&e| -(e as i64)).collect();
        Self::any(self.group.clone(), &exps).expect("same group")
    }

    /// Whether the character is trivial on the sign class, i.e. factors
    /// through the wide class group.
    pub fn trivial_on_sign_class(&self) -> bool {
        self.values[self.group.sign_class()] == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightReport {
    MinimalWeightOne,
    UnsupportedRamifiedAtP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftCase {
    CaseA,
    CaseB,
}

#[derive(Debug, Clone, Serialize)]
pub struct SerreInvariants {
    #[serde(rename = "N")]
    pub conductor: u64,
    pub epsilon: BTreeMap<u64, ResElt>,
    pub weight_report: WeightReport,
    pub exceptional: bool,
}

/// The mod-`p` representation `Ind_K^Q chi`, optionally twisted by the
/// quadratic character of `K(sqrt lambda)` for an auxiliary element `lambda`.
#[derive(Debug, Clone)]
pub struct DihedralRep {
    character: IdealCharacter,
    p: u64,
    field: Arc<ResidueField>,
}

impl DihedralRep {
    pub fn new(chi: ClassCharacter, p: u64) -> Result<Self> {
        Self::from_ideal_character(IdealCharacter::new(chi), p)
    }

    pub fn twisted(chi: ClassCharacter, aux: AuxiliaryPrime, p: u64) -> Result<Self> {
        Self::from_ideal_character(IdealCharacter::twisted(chi, aux)?, p)
    }

    pub fn from_ideal_character(character: IdealCharacter, p: u64) -> Result<Self> {
        let field = ResidueField::over(character.base().modulus(), p)?;
        Ok(Self {
            character,
            p,
            field,
        })
    }

    pub fn chi(&self) -> &ClassCharacter {
        self.character.base()
    }

    pub fn ideal_character(&self) -> &IdealCharacter {
        &self.character
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.chi().discriminant()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn residue_field(&self) -> &Arc<ResidueField> {
        &self.field
    }

    pub fn is_twisted(&self) -> bool {
        self.character.twist().is_some()
    }

    /// The same representation built from `chi^-1` (isomorphic to this one).
    pub fn conjugate(&self) -> Self {
        Self {
            character: self.character.conjugate(),
            p: self.p,
            field: self.field.clone(),
        }
    }

    fn unramified(&self, l: u64) -> Result<Vec<PrimeIdeal>> {
        let d = self.discriminant();
        let ps = primes_above(d, l)?;
        if ps[0].kind == SplittingType::Ramified
            || self.character.conductor_norm().is_multiple_of(l)
        {
            return Err(Error::RamifiedPrime { d: d.get(), l });
        }
        Ok(ps)
    }

    /// Trace of Frobenius at an unramified prime `l` (exact, in `Z[zeta_m]`).
    pub fn frob_trace(&self, l: u64) -> Result<CycElt> {
        let ps = self.unramified(l)?;
        let md = self.chi().modulus();
        Ok(match ps[0].kind {
            SplittingType::Split => self
                .character
                .value(&ps[0])
                .to_cyc(md)
                .plus(&self.character.value(&ps[1]).to_cyc(md)),
            _ => CycElt::zero(md),
        })
    }

    /// Determinant of Frobenius at an unramified prime `l`: the quadratic
    /// character of `K` times the character on the ideal `(l)`.
    pub fn frob_det(&self, l: u64) -> Result<CycElt> {
        let ps = self.unramified(l)?;
        let md = self.chi().modulus();
        let on_l = match ps[0].kind {
            SplittingType::Split => self
                .character
                .value(&ps[0])
                .mul_mod(self.character.value(&ps[1]), self.chi().order()),
            _ => self.character.value(&ps[0]),
        };
        let sign = arith::kronecker(self.discriminant().get(), l) as i64;
        Ok(on_l.to_cyc(md).times(&CycElt::from_int(md, sign)))
    }

    /// Artin conductor: `|D|`, times the auxiliary prime for a twist.
    pub fn conductor(&self) -> u64 {
        self.discriminant().abs() * self.character.conductor_norm()
    }

    /// Whether the residual characteristic ramifies.
    pub fn ramified_at_p(&self) -> bool {
        self.conductor().is_multiple_of(self.p)
    }

    /// Whether `rho|D_p` is (up to semisimplification) two copies of one
    /// unramified character: the two Frobenius eigenvalues at `p` agree mod `P`.
    pub fn exceptionality(&self) -> Result<bool> {
        if self.ramified_at_p() {
            return Err(Error::RamifiedAtP {
                d: self.discriminant().get(),
                p: self.p,
            });
        }
        let ps = primes_above(self.discriminant(), self.p)?;
        Ok(match ps[0].kind {
            SplittingType::Split => {
                let md = self.chi().modulus();
                let x = reduce_mod_p(&self.character.value(&ps[0]).to_cyc(md), &self.field)?;
                let y = reduce_mod_p(&self.character.value(&ps[1]).to_cyc(md), &self.field)?;
                x == y
            }
            // eigenvalues are the two square roots of chi((p)), distinct unless p = 2
            _ => self.p == 2,
        })
    }

    pub fn serre_invariants(&self, epsilon_bound: u64) -> Result<SerreInvariants> {
        let mut n = self.conductor();
        while n.is_multiple_of(self.p) {
            n /= self.p;
        }
        let mut epsilon = BTreeMap::new();
        for l in arith::primes_up_to(epsilon_bound) {
            if l == self.p || n.is_multiple_of(l) || self.conductor().is_multiple_of(l) {
                continue;
            }
            epsilon.insert(l, reduce_mod_p(&self.frob_det(l)?, &self.field)?);
        }
        let weight_report = if self.ramified_at_p() {
            WeightReport::UnsupportedRamifiedAtP
        } else {
            WeightReport::MinimalWeightOne
        };
        Ok(SerreInvariants {
            conductor: n,
            epsilon,
            weight_report,
            exceptional: self.exceptionality().unwrap_or(false),
        })
    }

    /// Whether complex conjugation has determinant `-1` (automatic in
    /// characteristic 2, where `-1 = 1`).
    pub fn is_odd(&self) -> bool {
        self.discriminant().get() < 0 || self.is_twisted() || self.p == 2
    }

    /// Which alternative of the lifting dichotomy applies: case B exactly when
    /// `p = 2`, `K` is real and `chi` factors through the wide class group, so
    /// that every characteristic zero induction is even.
    pub fn lift_case(&self) -> LiftCase {
        if self.p == 2
            && self.discriminant().is_real()
            && !self.is_twisted()
            && self.chi().trivial_on_sign_class()
        {
            LiftCase::CaseB
        } else {
            LiftCase::CaseA
        }
    }

    /// The unit obstruction: for `p = 2`, a real field whose discriminant is
    /// the (odd) conductor and whose fundamental unit has norm `-1`, no odd
    /// characteristic zero lift of the same conductor exists.
    pub fn no_char0_lift_same_level(&self) -> bool {
        let d = self.discriminant();
        let n = self.conductor();
        self.p == 2
            && n % 2 == 1
            && d.is_real()
            && d.abs() == n
            && fundamental_unit_norm(d) == Ok(-1)
    }
}

impl CharValue {
    pub fn to_cyc(self, modulus: &Arc<CycModulus>) -> CycElt {
        match self {
            CharValue::Zero => CycElt::zero(modulus),
            CharValue::Root { index, negate } => {
                let z = CycElt::zeta_pow(modulus, index as i64);
                if negate {
                    z.negated()
                } else {
                    z
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::FundamentalDiscriminant as Fd;

    fn group(d: i64) -> Arc<FormClassGroup> {
        Arc::new(FormClassGroup::new(Fd::new(d).unwrap()).unwrap())
    }

    /// A character of order 3 (exponent `e` or its inverse) on the last cyclic factor.
    fn cubic(d: i64, e: i64, p: u64) -> DihedralRep {
        let g = group(d);
        let mut exps = vec![0i64; g.cyclic().len()];
        let last = g.cyclic().last().unwrap().1 as i64;
        *exps.last_mut().unwrap() = e * last / 3;
        DihedralRep::new(ClassCharacter::new(g, &exps).unwrap(), p).unwrap()
    }

    #[test]
    fn character_orders() {
        let g = group(-23);
        assert_eq!(ClassCharacter::new(g.clone(), &[1]).unwrap().order(), 3);
        assert_eq!(
            ClassCharacter::new(g.clone(), &[0]),
            Err(Error::NotDihedral(1))
        );
        assert!(matches!(
            ClassCharacter::new(g, &[1, 1]),
            Err(Error::ExponentCount {
                expected: 1,
                got: 2
            })
        ));
        let g = group(229);
        let a = ClassCharacter::new(g.clone(), &[1]).unwrap();
        let b = ClassCharacter::new(g, &[2]).unwrap();
        assert_eq!(b.order(), 3);
        assert_eq!(a.sigma_conjugate(), b);
    }

    #[test]
    fn character_is_a_homomorphism() {
        for d in [-23i64, -420, -3299, 229, 316, -47] {
            let g = group(d);
            for exps in character_exponents(&g) {
                let exps: Vec<i64> = exps.iter().map(|&e| e as i64).collect();
                let chi = ClassCharacter::any(g.clone(), &exps).unwrap();
                let m = chi.order();
                for i in 0..g.h() {
                    for j in 0..g.h() {
                        let lhs = chi.value_index(g.op(i, j));
                        assert_eq!(lhs, (chi.value_index(i) + chi.value_index(j)) % m);
                    }
                }
                // the order is attained
                let attained =
                    (0..g.h()).map(|c| m / arith::gcd(m as i64, chi.value_index(c) as i64) as u64);
                assert_eq!(attained.fold(1, lcm), m);
            }
        }
    }

    #[test]
    fn traces_at_two() {
        let rep = cubic(-23, 1, 2);
        let md = rep.chi().modulus().clone();
        assert_eq!(rep.frob_trace(2).unwrap(), CycElt::from_int(&md, -1));
        assert_eq!(
            cubic(229, 1, 2).frob_trace(2).unwrap().as_integer(),
            Some(0)
        );
        assert_eq!(
            cubic(2089, 1, 2).frob_trace(2).unwrap().as_integer(),
            Some(2)
        );
        assert!(matches!(
            rep.frob_trace(23),
            Err(Error::RamifiedPrime { .. })
        ));
    }

    #[test]
    fn determinants() {
        let rep = cubic(229, 1, 2);
        assert_eq!(rep.frob_det(2).unwrap().as_integer(), Some(-1));
        let rep = cubic(-23, 1, 2);
        assert_eq!(rep.frob_det(5).unwrap().as_integer(), Some(-1));
        assert_eq!(rep.frob_det(2).unwrap().as_integer(), Some(1));
    }

    #[test]
    fn split_and_inert_trace_identities() {
        for d in [-23i64, -47, 229, -3299] {
            let rep = cubic(d, 1, 2);
            let g = rep.chi().group().clone();
            let md = rep.chi().modulus().clone();
            for l in arith::primes_up_to(10_000) {
                if d.unsigned_abs() % l == 0 {
                    continue;
                }
                let tr = rep.frob_trace(l).unwrap();
                let det = rep.frob_det(l).unwrap();
                let eps = arith::kronecker(d, l) as i64;
                if eps == -1 {
                    assert!(tr.is_zero());
                    assert_eq!(det.as_integer(), Some(-1));
                    continue;
                }
                // x + x^-1 = tr and x * x^-1 = det with x = chi([Lambda])
                let x = rep.chi().value(g.prime_class(l).unwrap());
                let xinv = x.conj();
                assert_eq!(tr, x.plus(&xinv));
                assert_eq!(det, x.times(&xinv));
                assert_eq!(tr.times(&x), x.times(&x).plus(&det));
                assert_eq!(det, CycElt::one(&md));
            }
        }
    }

    #[test]
    fn epsilon_is_multiplicative() {
        let rep = cubic(-23, 1, 7);
        let inv = rep.serre_invariants(400).unwrap();
        let kron = |n: u64| arith::kronecker(-23, n) as i64;
        let primes: Vec<u64> = inv.epsilon.keys().copied().collect();
        for (i, &a) in primes.iter().enumerate().take(12) {
            for &b in &primes[i..i + 9] {
                let prod = inv.epsilon[&a].times(&inv.epsilon[&b]);
                assert_eq!(prod, ResElt::from_int(rep.residue_field(), kron(a * b)));
            }
        }
    }

    #[test]
    fn invariants_of_named_examples() {
        let inv = cubic(-23, 1, 2).serre_invariants(50).unwrap();
        assert_eq!(inv.conductor, 23);
        assert_eq!(inv.weight_report, WeightReport::MinimalWeightOne);
        assert!(!inv.exceptional);

        let inv = cubic(229, 1, 2).serre_invariants(50).unwrap();
        assert_eq!(inv.conductor, 229);
        assert!(inv.exceptional);

        let rep = cubic(-23, 1, 23);
        assert_eq!(
            rep.serre_invariants(50).unwrap().weight_report,
            WeightReport::UnsupportedRamifiedAtP
        );
        assert!(matches!(
            rep.exceptionality(),
            Err(Error::RamifiedAtP { .. })
        ));
        assert!(matches!(
            DihedralRep::new(ClassCharacter::new(group(-23), &[1]).unwrap(), 3),
            Err(Error::NonCoprimeModulus { m: 3, p: 3 })
        ));
    }

    #[test]
    fn exceptionality_examples() {
        assert!(cubic(2089, 1, 2).exceptionality().unwrap());
        assert!(cubic(229, 1, 2).exceptionality().unwrap());
        assert!(!cubic(-23, 1, 2).exceptionality().unwrap());
        assert!(!cubic(229, 1, 5).exceptionality().unwrap());
    }

    #[test]
    fn lift_cases() {
        assert_eq!(cubic(-23, 1, 2).lift_case(), LiftCase::CaseA);
        assert_eq!(cubic(229, 1, 2).lift_case(), LiftCase::CaseB);
        assert_eq!(cubic(229, 1, 5).lift_case(), LiftCase::CaseA);
        assert!(cubic(229, 1, 2).no_char0_lift_same_level());
        assert!(!cubic(-23, 1, 2).no_char0_lift_same_level());
        assert!(!cubic(229, 1, 5).no_char0_lift_same_level());
        assert!(!cubic(2089, 1, 5).no_char0_lift_same_level());
    }

    #[test]
    fn conjugate_character_gives_same_invariants() {
        for d in [-23i64, -47, 229, 2089, -3299] {
            for p in [2u64, 5, 7] {
                let Ok(rep) = DihedralRep::new(cubic(d, 1, 2).chi().clone(), p) else {
                    continue;
                };
                let conj = rep.conjugate();
                assert_eq!(rep.exceptionality().ok(), conj.exceptionality().ok());
                for l in arith::primes_up_to(500) {
                    assert_eq!(rep.frob_trace(l).ok(), conj.frob_trace(l).ok());
                    assert_eq!(rep.frob_det(l).ok(), conj.frob_det(l).ok());
                }
            }
        }
    }
}
