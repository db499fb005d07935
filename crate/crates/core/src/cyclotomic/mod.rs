//! Exact arithmetic in the cyclotomic integers `Z[zeta_m]` and reduction to a
//! residue field `Z[zeta_m] / P` for a fixed prime `P` above `p`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(phi(m)-1)` and
//! every operation reduces modulo the cyclotomic polynomial, so equality of
//! elements is equality of coefficient vectors.

pub mod fp_poly;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::{self, gcd};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use fp_poly::FpPoly;

/// The m-th cyclotomic polynomial, coefficients lowest degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    assert!(m >= 1, "cyclotomic polynomial needs m >= 1");
    let mut memo = HashMap::new();
    cyclotomic_memo(m, &mut memo)
}

fn cyclotomic_memo(m: u64, memo: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&m) {
        return p.clone();
    }
    // x^m - 1
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in arith::divisors(m) {
        if d == m {
            continue;
        }
        let phi_d = cyclotomic_memo(d, memo);
        num = exact_div_monic(&num, &phi_d);
    }
    memo.insert(m, num.clone());
    num
}

/// Exact quotient of integer polynomials by a monic divisor. Panics on a nonzero remainder.
pub(crate) fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let mut r = num.to_vec();
    let mut q = vec![0i64; dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = r[i + dd];
        q[i] = c;
        for j in 0..=dd {
            r[i + j] -= c * den[j];
        }
    }
    assert!(r.iter().all(|&c| c == 0), "inexact cyclotomic division");
    q
}

/// `Z[zeta_m]` described by the minimal polynomial of `zeta_m`.
#[derive(Debug, PartialEq, Eq)]
pub struct CycModulus {
    m: u64,
    min_poly: Vec<i64>,
    /// `zeta^k` in the power basis for `k` in `0..m`.
    powers: Vec<Vec<i64>>,
}

impl CycModulus {
    pub fn new(m: u64) -> Arc<Self> {
        let min_poly = cyclotomic_poly(m);
        let phi = min_poly.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..m {
            powers.push(cur.clone());
            cur = times_zeta(&cur, &min_poly);
        }
        Arc::new(Self {
            m,
            min_poly,
            powers,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[i64] {
        &self.min_poly
    }
}

fn times_zeta(c: &[i64], min_poly: &[i64]) -> Vec<i64> {
    let phi = c.len();
    let top = c[phi - 1];
    let mut out = vec![0i64; phi];
    for i in (1..phi).rev() {
        out[i] = c[i - 1];
    }
    for i in 0..phi {
        out[i] -= top * min_poly[i];
    }
    out
}

/// An element of `Z[zeta_m]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CycElt {
    modulus: Arc<CycModulus>,
    coeffs: Vec<i64>,
}

impl fmt::Debug for CycElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElt(m={}, {:?})", self.modulus.m, self.coeffs)
    }
}

impl fmt::Display for CycElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycEltRepr {
    m: u64,
    coeffs: Vec<i64>,
}

impl Serialize for CycElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycEltRepr {
            m: self.modulus.m,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycElt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycEltRepr::deserialize(d)?;
        if repr.m == 0 {
            return Err(serde::de::Error::custom("m must be positive"));
        }
        let modulus = CycModulus::new(repr.m);
        CycElt::from_coeffs(&modulus, repr.coeffs).map_err(serde::de::Error::custom)
    }
}

impl CycElt {
    pub fn zero(modulus: &Arc<CycModulus>) -> Self {
        Self {
            modulus: modulus.clone(),
            coeffs: vec![0; modulus.phi()],
        }
    }

    pub fn from_int(modulus: &Arc<CycModulus>, n: i64) -> Self {
        let mut e = Self::zero(modulus);
        e.coeffs[0] = n;
        e
    }

    pub fn one(modulus: &Arc<CycModulus>) -> Self {
        Self::from_int(modulus, 1)
    }

    /// `zeta_m^k` for any integer `k`.
    pub fn zeta_pow(modulus: &Arc<CycModulus>, k: i64) -> Self {
        let idx = k.rem_euclid(modulus.m as i64) as usize;
        Self {
            modulus: modulus.clone(),
            coeffs: modulus.powers[idx].clone(),
        }
    }

    /// Builds an element from power-basis coordinates of any length, reducing
    /// higher powers of zeta.
    pub fn from_coeffs(modulus: &Arc<CycModulus>, coeffs: Vec<i64>) -> Result<Self> {
        let mut out = Self::zero(modulus);
        let m = modulus.m as usize;
        for (i, c) in coeffs.into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pw = &modulus.powers[i % m];
            for (o, &x) in out.coeffs.iter_mut().zip(pw) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    pub fn modulus(&self) -> &Arc<CycModulus> {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The rational integer this element equals, if it lies in `Z`.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus.m != other.modulus.m {
            return Err(Error::ModulusMismatch(
                format!("Z[zeta_{}]", self.modulus.m),
                format!("Z[zeta_{}]", other.modulus.m),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.plus(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.minus(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.times(other))
    }

    /// Image under the automorphism `zeta -> zeta^j` (`gcd(j, m) = 1`).
    pub fn galois_conjugate(&self, j: i64) -> Self {
        let m = self.modulus.m as i64;
        debug_assert_eq!(gcd(j, m).abs(), 1);
        let mut out = Self::zero(&self.modulus);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pw = &self.modulus.powers[(i as i64 * j).rem_euclid(m) as usize];
            for (o, &x) in out.coeffs.iter_mut().zip(pw) {
                *o += c * x;
            }
        }
        out
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        self.galois_conjugate(-1)
    }

    fn reduce_product(&self, prod: Vec<i64>) -> Vec<i64> {
        let phi = self.modulus.phi();
        let mp = &self.modulus.min_poly;
        let mut prod = prod;
        for i in (phi..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..=phi {
                prod[i - phi + j] -= c * mp[j];
            }
        }
        prod.truncate(phi);
        prod
    }
}

impl Scalar for CycElt {
    fn zero_like(&self) -> Self {
        Self::zero(&self.modulus)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.modulus)
    }
    fn int_like(&self, n: i64) -> Self {
        Self::from_int(&self.modulus, n)
    }
    fn plus(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus.m, rhs.modulus.m);
        Self {
            modulus: self.modulus.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus.m, rhs.modulus.m);
        Self {
            modulus: self.modulus.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        assert_eq!(self.modulus.m, rhs.modulus.m, "cyclotomic modulus mismatch");
        let phi = self.modulus.phi();
        let mut prod = vec![0i64; 2 * phi - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        Self {
            modulus: self.modulus.clone(),
            coeffs: self.reduce_product(prod),
        }
    }
    fn negated(&self) -> Self {
        Self {
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.modulus.m == other.modulus.m
    }
}

/// The residue field `Z[zeta_m] / P` for the prime `P` above `p` chosen as the
/// lexicographically smallest monic irreducible factor of `Phi_m mod p`
/// (coefficients compared from the constant term upwards).
#[derive(Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    modulus: Arc<CycModulus>,
    factor: FpPoly,
}

impl ResidueField {
    pub fn new(m: u64, p: u64) -> Result<Arc<Self>> {
        Self::over(&CycModulus::new(m), p)
    }

    pub fn over(modulus: &Arc<CycModulus>, p: u64) -> Result<Arc<Self>> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let m = modulus.m;
        if num_integer::Integer::gcd(&m, &p) != 1 {
            return Err(Error::NonCoprimeModulus { m, p });
        }
        let d = arith::mult_order(p % m, m) as usize;
        let phi_mod_p = fp_poly::from_ints(&modulus.min_poly, p);
        let mut rng = ChaCha8Rng::seed_from_u64(m ^ (p << 32));
        let mut factors = fp_poly::equal_degree_factors(&phi_mod_p, d, p, &mut rng);
        factors.sort();
        let factor = factors.into_iter().next().expect("Phi_m has a factor");
        Ok(Arc::new(Self {
            p,
            modulus: modulus.clone(),
            factor,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u64 {
        self.modulus.m
    }

    pub fn modulus(&self) -> &Arc<CycModulus> {
        &self.modulus
    }

    /// The chosen monic irreducible factor, lowest degree first.
    pub fn factor(&self) -> &[u64] {
        &self.factor
    }

    /// Degree `d` of the field over `F_p`.
    pub fn degree(&self) -> usize {
        self.factor.len() - 1
    }

    /// `p^d`.
    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.degree() as u32)
    }
}

/// An element of a [`ResidueField`].
#[derive(Clone, PartialEq, Eq)]
pub struct ResElt {
    field: Arc<ResidueField>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for ResElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ResElt(p={}, m={}, {:?})",
            self.field.p,
            self.field.m(),
            self.coeffs
        )
    }
}

impl Serialize for ResElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ResElt", 4)?;
        st.serialize_field("p", &self.field.p)?;
        st.serialize_field("m", &self.field.m())?;
        st.serialize_field("factor", &self.field.factor)?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.end()
    }
}

impl ResElt {
    fn from_poly(field: &Arc<ResidueField>, poly: FpPoly) -> Self {
        let mut coeffs = fp_poly::rem(&poly, &field.factor, field.p);
        coeffs.resize(field.degree(), 0);
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_int(field: &Arc<ResidueField>, n: i64) -> Self {
        Self::from_poly(field, fp_poly::from_ints(&[n], field.p))
    }

    pub fn field(&self) -> &Arc<ResidueField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let a = fp_poly::trim(self.coeffs.clone());
        fp_poly::inverse_mod(&a, &self.field.factor, self.field.p)
            .map(|inv| Self::from_poly(&self.field, inv))
    }

    /// Multiplicative order of an element known to satisfy `x^n = 1`.
    pub fn order_dividing(&self, n: u64) -> Option<u64> {
        if !self.pow(n).is_one() {
            return None;
        }
        arith::divisors(n)
            .into_iter()
            .find(|&d| self.pow(d).is_one())
    }
}

impl Scalar for ResElt {
    fn zero_like(&self) -> Self {
        Self::from_int(&self.field, 0)
    }
    fn one_like(&self) -> Self {
        Self::from_int(&self.field, 1)
    }
    fn int_like(&self, n: i64) -> Self {
        Self::from_int(&self.field, n)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let p = self.field.p;
        Self {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| (a + b) % p)
                .collect(),
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        let p = self.field.p;
        Self {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| (a + p - b) % p)
                .collect(),
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        assert!(self.same_ring(rhs), "residue field mismatch");
        let p = self.field.p;
        let prod = fp_poly::mul(
            &fp_poly::trim(self.coeffs.clone()),
            &fp_poly::trim(rhs.coeffs.clone()),
            p,
        );
        Self::from_poly(&self.field, prod)
    }
    fn negated(&self) -> Self {
        let p = self.field.p;
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }
}

/// Reduction `Z[zeta_m] -> Z[zeta_m] / P`.
pub fn reduce_mod_p(a: &CycElt, field: &Arc<ResidueField>) -> Result<ResElt> {
    if a.modulus.m != field.m() {
        return Err(Error::ModulusMismatch(
            format!("Z[zeta_{}]", a.modulus.m),
            format!("F_{}^{} over zeta_{}", field.p, field.degree(), field.m()),
        ));
    }
    Ok(ResElt::from_poly(
        field,
        fp_poly::from_ints(&a.coeffs, field.p),
    ))
}
