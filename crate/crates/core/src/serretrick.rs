//! Auxiliary elements of negative prime norm in a prescribed congruence class,
//! and the quadratic character of `K(sqrt lambda)` they define.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, kronecker, mod_inv, mod_pow};
use crate::error::{Error, Result};
use crate::galoisrep::ClassCharacter;
use crate::quadfield::{Form, FundamentalDiscriminant, PrimeIdeal, QuadInt, SplittingType};
use crate::theta::IdealCharacter;

/// `lambda = x + y*omega` with `Norm(lambda) = -l`, `l` an odd prime, and
/// `lambda = 1 mod 4Df`. The prime `Lambda = (lambda)` is `(l, omega - root)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxiliaryPrime {
    #[serde(rename = "D")]
    d: FundamentalDiscriminant,
    lambda: QuadInt,
    l: u64,
    congruence_modulus: u64,
    root: u64,
}

impl AuxiliaryPrime {
    /// Validates `lambda` and computes its prime ideal.
    pub fn new(
        d: FundamentalDiscriminant,
        lambda: QuadInt,
        congruence_modulus: u64,
    ) -> Result<Self> {
        let norm = lambda.norm(d);
        let bad = || Error::Invalid(format!("{lambda:?} is not an admissible auxiliary element"));
        if norm >= 0 || (-norm) > u64::MAX as i128 {
            return Err(bad());
        }
        let l = (-norm) as u64;
        let md = congruence_modulus as i128;
        let congruent =
            (lambda.x as i128 - 1).rem_euclid(md) == 0 && (lambda.y as i128).rem_euclid(md) == 0;
        if l == 2 || !is_prime(l) || congruence_modulus.is_multiple_of(l) || !congruent {
            return Err(bad());
        }
        // lambda = X + Y*omega vanishes at omega = root mod l
        let y_inv = mod_inv(lambda.y as i128, l as i128).ok_or_else(bad)?;
        let root = (-(lambda.x as i128) * y_inv).rem_euclid(l as i128) as u64;
        Ok(Self {
            d,
            lambda,
            l,
            congruence_modulus,
            root,
        })
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.d
    }

    pub fn lambda(&self) -> QuadInt {
        self.lambda
    }

    /// The rational prime `l = -Norm(lambda)`.
    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn congruence_modulus(&self) -> u64 {
        self.congruence_modulus
    }

    /// The degree-one prime `Lambda = (lambda)`.
    pub fn prime_ideal(&self) -> PrimeIdeal {
        let (t, _) = self.d.omega_poly();
        let b = 2 * self.root as i64 - t;
        PrimeIdeal {
            l: self.l,
            kind: SplittingType::Split,
            root: Some(self.root),
            form: Form::from_ab(self.l as i64, b, self.d.get()),
        }
    }

    /// The Galois conjugate `sigma(lambda)`.
    pub fn conjugate(&self) -> Self {
        let (t, _) = self.d.omega_poly();
        let QuadInt { x, y } = self.lambda;
        Self {
            lambda: QuadInt {
                x: x + t * y,
                y: -y,
            },
            root: (t - self.root as i64).rem_euclid(self.l as i64) as u64,
            ..self.clone()
        }
    }

    /// The quadratic character of `K(sqrt lambda)` on a prime ideal: `0` on
    /// `Lambda` itself (the only ramified prime), `+-1` elsewhere.
    pub fn xi(&self, q: &PrimeIdeal) -> i8 {
        let QuadInt { x, y } = self.lambda;
        if q.l == 2 {
            // lambda = 1 mod 4, so K(sqrt lambda) is generated by a root of
            // T^2 - T - (lambda - 1)/4 and Frobenius acts through the trace.
            let (t, _) = self.d.omega_poly();
            let (u, v) = ((x as i128 - 1) / 4, y as i128 / 4);
            let tr = match q.root {
                Some(r) => u + v * r as i128,
                None => v * t as i128,
            };
            return if tr.rem_euclid(2) == 0 { 1 } else { -1 };
        }
        if q.l == self.l && q.root == Some(self.root) {
            return 0;
        }
        match q.root {
            Some(r) => legendre(x as i128 + y as i128 * r as i128, q.l),
            None => legendre(self.lambda.norm(self.d), q.l),
        }
    }
}

fn legendre(a: i128, q: u64) -> i8 {
    let a = a.rem_euclid(q as i128) as u64;
    match mod_pow(a, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Euler's criterion for `lambda` modulo a prime ideal `Q` over an odd prime:
/// in `F_q` for degree-one `Q`, and via the norm to `F_q` for inert `Q`.
pub fn residue_symbol(d: FundamentalDiscriminant, lambda: QuadInt, q: &PrimeIdeal) -> Result<i8> {
    let norm = lambda.norm(d);
    if q.l == 2 || norm.rem_euclid(q.l as i128) == 0 || d.abs().is_multiple_of(q.l) {
        return Err(Error::BadPrime(q.l));
    }
    Ok(match q.root {
        Some(r) => legendre(lambda.x as i128 + lambda.y as i128 * r as i128, q.l),
        None => legendre(norm, q.l),
    })
}

fn candidate(d: FundamentalDiscriminant, step: i64, x: i64, y: i64) -> Option<(QuadInt, u64)> {
    let lambda = QuadInt {
        x: 1 + step * x,
        y: step * y,
    };
    let norm = lambda.norm(d);
    if norm >= 0 {
        return None;
    }
    let l = u64::try_from(-norm).ok()?;
    (l % 2 == 1 && !(step as u64).is_multiple_of(l) && is_prime(l)).then_some((lambda, l))
}

/// Points of height exactly `h` (`max(|x|, |y|) = h`), in a fixed order.
fn shell(h: i64) -> Vec<(i64, i64)> {
    let mut pts = Vec::new();
    for x in -h..=h {
        for y in -h..=h {
            if x.abs().max(y.abs()) == h {
                pts.push((x, y));
            }
        }
    }
    pts
}

/// The auxiliary elements `lambda = 1 + 4Df(x + y*omega)` in order of
/// increasing height `max(|x|, |y|)`, up to `max_height`.
pub struct AuxiliarySearch {
    d: FundamentalDiscriminant,
    modulus: u64,
    height: i64,
    max_height: u64,
    pending: std::vec::IntoIter<AuxiliaryPrime>,
}

impl Iterator for AuxiliarySearch {
    type Item = AuxiliaryPrime;

    fn next(&mut self) -> Option<AuxiliaryPrime> {
        loop {
            if let Some(a) = self.pending.next() {
                return Some(a);
            }
            if self.height as u64 >= self.max_height {
                return None;
            }
            self.height += 1;
            let (d, step) = (self.d, self.modulus as i64);
            let found: Vec<AuxiliaryPrime> = shell(self.height)
                .into_par_iter()
                .filter_map(|(x, y)| candidate(d, step, x, y))
                .map(|(lambda, _)| AuxiliaryPrime::new(d, lambda, step as u64).expect("admissible"))
                .collect();
            self.pending = found.into_iter();
        }
    }
}

/// Lazily enumerates all auxiliary elements for `(D, f)` up to `max_height`.
pub fn auxiliary_primes(
    d: FundamentalDiscriminant,
    f: u64,
    max_height: u64,
) -> Result<AuxiliarySearch> {
    if !d.is_real() {
        return Err(Error::ImaginaryField(d.get()));
    }
    Ok(AuxiliarySearch {
        d,
        modulus: 4 * d.abs() * f,
        height: 0,
        max_height,
        pending: Vec::new().into_iter(),
    })
}

/// The first auxiliary element in height order.
pub fn find_auxiliary(
    d: FundamentalDiscriminant,
    f: u64,
    max_height: u64,
) -> Result<AuxiliaryPrime> {
    auxiliary_primes(d, f, max_height)?
        .next()
        .ok_or(Error::SearchExhausted(max_height))
}

/// The character `chi * xi` of the auxiliary twist.
pub fn twisted_character(chi: ClassCharacter, aux: AuxiliaryPrime) -> Result<IdealCharacter> {
    if !chi.discriminant().is_real() {
        return Err(Error::ImaginaryField(chi.discriminant().get()));
    }
    if chi.order() <= 2 {
        return Err(Error::NotDihedral(chi.order()));
    }
    IdealCharacter::twisted(chi, aux)
}

/// A non-rational element of negative norm of smallest height
/// `max(|x|, |y|)`. Within a height, `y > 0` runs upwards and `x` runs
/// `0, 1, -1, 2, -2, ...` (`lambda` and `-lambda` have the same norm).
pub fn simple_negative_norm(d: FundamentalDiscriminant) -> Result<QuadInt> {
    if !d.is_real() {
        return Err(Error::ImaginaryField(d.get()));
    }
    let by_height = |h: i64| {
        let xs: Vec<i64> = std::iter::once(0)
            .chain((1..=h).flat_map(|a| [a, -a]))
            .collect();
        (1..=h).flat_map(move |y| {
            let xs = xs.clone();
            xs.into_iter()
                .filter(move |x| x.abs().max(y) == h)
                .map(move |x| QuadInt { x, y })
        })
    };
    Ok((1..)
        .flat_map(by_height)
        .find(|z| z.norm(d) < 0)
        .expect("omega or 1 + omega has negative norm for large D"))
}

/// `(D/l) = 1`: the auxiliary prime splits in `K`.
pub fn splits(d: FundamentalDiscriminant, l: u64) -> bool {
    kronecker(d.get(), l) == 1
}
