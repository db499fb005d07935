//! Quadratic fields `Q(sqrt D)` given by their fundamental discriminant.
//!
//! Ideal classes are modelled by classes of primitive binary quadratic forms:
//! the ideal `l Z + ((-b + sqrt D) / 2) Z` corresponds to the form `(l, b, c)`.
//! For real fields the classes are narrow classes.

pub mod classgroup;
pub mod forms;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use classgroup::{ClassGroupRecord, FormClassGroup, DEFAULT_BOUND};
pub use forms::{compose, reduce_form, Form};

use crate::arith::{self, is_prime, isqrt, kronecker, sqrt_mod_prime};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct FundamentalDiscriminant(i64);

impl fmt::Debug for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={}", self.0)
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<i64> for FundamentalDiscriminant {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<FundamentalDiscriminant> for i64 {
    fn from(d: FundamentalDiscriminant) -> i64 {
        d.0
    }
}

pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => arith::is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Fundamental discriminants in `lo..=hi`.
pub fn fundamental_discriminants(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).filter(|&d| is_fundamental(d)).collect()
}

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental(d) {
            Ok(Self(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_real(self) -> bool {
        self.0 > 0
    }

    /// `(t, n)` with `omega^2 - t*omega + n = 0`, where `omega` is the standard
    /// integral basis element `(1 + sqrt D)/2` or `sqrt(D/4)`.
    pub fn omega_poly(self) -> (i64, i64) {
        if self.0 % 4 == 0 {
            (0, -self.0 / 4)
        } else {
            (1, (1 - self.0) / 4)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    kronecker(d, n)
}

pub fn splitting_type(d: FundamentalDiscriminant, l: u64) -> SplittingType {
    match kronecker(d.get(), l) {
        1 => SplittingType::Split,
        -1 => SplittingType::Inert,
        _ => SplittingType::Ramified,
    }
}

/// A prime ideal of `O_K` lying over the rational prime `l`.
///
/// For degree-one primes `root` is the residue `r` of `omega` modulo the
/// prime, i.e. the prime is `(l, omega - r)`, and `form` is the corresponding
/// (unreduced) form `(l, 2r - t, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub l: u64,
    pub kind: SplittingType,
    pub root: Option<u64>,
    pub form: Option<Form>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        match self.kind {
            SplittingType::Inert => self.l * self.l,
            _ => self.l,
        }
    }
}

/// The prime ideal(s) above `l`: two for split, one otherwise. For split `l`
/// the first entry is the canonical choice `Lambda` (root `(b + t)/2` for the
/// smallest admissible `b >= 0`) and the second its conjugate.
pub fn primes_above(d: FundamentalDiscriminant, l: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    let kind = splitting_type(d, l);
    if kind == SplittingType::Inert {
        return Ok(vec![PrimeIdeal {
            l,
            kind,
            root: None,
            form: None,
        }]);
    }
    let dd = d.get();
    let (t, _) = d.omega_poly();
    let b = if l == 2 {
        (0..4i64)
            .find(|&b| (b - dd).rem_euclid(2) == 0 && (b * b - dd).rem_euclid(8) == 0)
            .expect("l = 2 is not inert")
    } else {
        let r = sqrt_mod_prime(dd, l).expect("D is a square mod l") as i64;
        let r = r.min(l as i64 - r);
        if (r - dd).rem_euclid(2) == 0 {
            r
        } else {
            r + l as i64
        }
    };
    let make = |b: i64| {
        let form = Form::from_ab(l as i64, b, dd).expect("b^2 = D mod 4l");
        let root = ((b + t) / 2).rem_euclid(l as i64) as u64;
        PrimeIdeal {
            l,
            kind,
            root: Some(root),
            form: Some(form),
        }
    };
    let lam = make(b);
    if kind == SplittingType::Ramified {
        Ok(vec![lam])
    } else {
        Ok(vec![lam, make(-b)])
    }
}

/// The form of the canonical prime above a split or ramified `l`.
pub fn prime_form(d: FundamentalDiscriminant, l: u64) -> Result<Form> {
    let ps = primes_above(d, l)?;
    ps[0].form.ok_or(Error::InertPrime { d: d.get(), l })
}

impl FormClassGroup {
    /// Class of the canonical prime `Lambda` above `l`. For split `l` the
    /// conjugate prime lies in the inverse class.
    pub fn prime_class(&self, l: u64) -> Result<usize> {
        self.class_of(prime_form(self.discriminant(), l)?)
    }

    /// Class of a degree-one prime ideal (principal for inert primes).
    pub fn ideal_class(&self, q: &PrimeIdeal) -> usize {
        match q.form {
            Some(f) => self.class_of(f).expect("prime forms are primitive"),
            None => 0,
        }
    }
}

/// Sign of the norm of the fundamental unit of a real quadratic field, from
/// the parity of the period of the continued fraction of `omega`.
pub fn fundamental_unit_norm(d: FundamentalDiscriminant) -> Result<i32> {
    if !d.is_real() {
        return Err(Error::ImaginaryField(d.get()));
    }
    Ok(if cf_period(d).len() % 2 == 1 { -1 } else { 1 })
}

/// Partial quotients of one period of the continued fraction of `omega`.
pub fn cf_period(d: FundamentalDiscriminant) -> Vec<i64> {
    // omega = (P + sqrt N) / Q with Q | N - P^2
    let dd = d.get() as i128;
    let (mut p, mut q, n) = if dd % 4 == 0 {
        (0i128, 1i128, dd / 4)
    } else {
        (1, 2, dd)
    };
    let s = isqrt(n);
    let step = |p: i128, q: i128| {
        let a = (p + s).div_euclid(q);
        let np = a * q - p;
        let nq = (n - np * np) / q;
        (a, np, nq)
    };
    let (_, p1, q1) = step(p, q);
    p = p1;
    q = q1;
    let mut period = Vec::new();
    loop {
        let (a, np, nq) = step(p, q);
        period.push(a as i64);
        p = np;
        q = nq;
        if p == p1 && q == q1 {
            return period;
        }
    }
}

/// Element `x + y*omega` of `O_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: i64,
    pub y: i64,
}

impl QuadInt {
    pub fn norm(&self, d: FundamentalDiscriminant) -> i128 {
        let (t, n) = d.omega_poly();
        let (x, y) = (self.x as i128, self.y as i128);
        x * x + t as i128 * x * y + n as i128 * y * y
    }

    pub fn trace(&self, d: FundamentalDiscriminant) -> i128 {
        let (t, _) = d.omega_poly();
        2 * self.x as i128 + t as i128 * self.y as i128
    }

    /// Image in `O_K / Q = F_l` for a degree-one prime `Q = (l, omega - r)`.
    pub fn residue(&self, l: u64, root: u64) -> u64 {
        let l = l as i128;
        ((self.x as i128 + self.y as i128 * root as i128).rem_euclid(l)) as u64
    }
}
