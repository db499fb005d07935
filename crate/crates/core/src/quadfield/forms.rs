//! Primitive binary quadratic forms `ax^2 + bxy + cy^2`: reduction and Gauss composition.
//!
//! Definite forms (D < 0) reduce to the unique representative with
//! `|b| <= a <= c` (and `b >= 0` when `|b| = a` or `a = c`). Indefinite forms
//! (D > 0) reduce to a cycle under the `rho` operator; the cycle is the narrow
//! (proper equivalence) class and its minimum under [`Form::cycle_key`] is the
//! canonical representative.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{ext_gcd, gcd, isqrt};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[i64; 3]>::deserialize(d)?;
        Ok(Form { a, b, c })
    }
}

impl Form {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// The form `(a, b, (b^2 - d) / 4a)`, if that is integral.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - d as i128;
        let den = 4 * a as i128;
        (a != 0 && num % den == 0).then(|| Self::new(a, b, (num / den) as i64))
    }

    /// The principal form of discriminant `d`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Self::new(1, b, (b * b - d) / 4)
    }

    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c).abs() == 1
    }

    /// `(a, -b, c)`, the inverse class.
    pub fn opposite(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    /// `(-a, b, -c)`; for indefinite forms this multiplies the narrow class by
    /// the class of principal ideals with a generator of negative norm.
    pub fn negation(&self) -> Self {
        Self::new(-self.a, self.b, -self.c)
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Total order used to pick the canonical form in an indefinite cycle:
    /// smallest `|a|`, positive `a` first, then `b`, then `c`.
    pub fn cycle_key(&self) -> (i64, bool, i64, i64) {
        (self.a.abs(), self.a < 0, self.b, self.c)
    }

    fn validate(&self, d: i64) -> Result<()> {
        if self.discriminant() != d as i128 || !self.is_primitive() || (d < 0 && self.a <= 0) {
            return Err(Error::BadForm((self.a, self.b, self.c), d));
        }
        Ok(())
    }
}

/// Reduction of a positive definite form.
fn reduce_definite(f: Form) -> Form {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    let d = b * b - 4 * a * c;
    loop {
        // bring b into (-a, a]
        if b <= -a || b > a {
            let two_a = 2 * a;
            let mut nb = b.rem_euclid(two_a);
            if nb > a {
                nb -= two_a;
            }
            b = nb;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if b < 0 && (a == c || -b == a) {
        b = -b;
    }
    Form::new(a as i64, b as i64, c as i64)
}

/// Helper for exact comparisons against the irrational `sqrt(d)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SqrtD {
    d: i128,
    /// `floor(sqrt(d))`
    s: i128,
}

impl SqrtD {
    pub(crate) fn new(d: i64) -> Self {
        let d = d as i128;
        Self { d, s: isqrt(d) }
    }

    /// Whether `|sqrt(D) - 2|a|| < b < sqrt(D)`.
    pub(crate) fn is_reduced(&self, f: &Form) -> bool {
        let (a, b) = ((f.a as i128).abs(), f.b as i128);
        b > 0 && b <= self.s && 2 * a + b > self.s && 2 * a - b <= self.s
    }

    /// The normalised `r` of `rho`: `r ≡ b (mod 2|a|)` in `(-|a|, |a|]` when
    /// `|a| > sqrt(D)`, and in `(sqrt(D) - 2|a|, sqrt(D))` otherwise.
    fn normalise(&self, b: i128, a: i128) -> i128 {
        let a = a.abs();
        let two_a = 2 * a;
        if a > self.s {
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            r
        } else {
            self.s - (self.s - b).rem_euclid(two_a)
        }
    }

    /// One step of the reduction operator `(a, b, c) -> (c, r(-b, c), ...)`.
    pub(crate) fn rho(&self, f: &Form) -> Form {
        let c = f.c as i128;
        let r = self.normalise(-(f.b as i128), c);
        let nc = (r * r - self.d) / (4 * c);
        Form::new(f.c, r as i64, nc as i64)
    }

    /// The full `rho`-cycle of a reduced form, starting at that form.
    pub(crate) fn cycle(&self, f: &Form) -> Vec<Form> {
        let mut out = vec![*f];
        let mut g = self.rho(f);
        while g != *f {
            out.push(g);
            g = self.rho(&g);
        }
        out
    }

    fn reduce(&self, f: &Form) -> Form {
        let mut g = *f;
        while !self.is_reduced(&g) {
            g = self.rho(&g);
        }
        g
    }

    fn canonical(&self, f: &Form) -> Form {
        let g = self.reduce(f);
        self.cycle(&g)
            .into_iter()
            .min_by_key(Form::cycle_key)
            .expect("cycle is nonempty")
    }
}

/// Canonical representative of the (narrow) class of `f` in discriminant `d`.
pub fn reduce_form(f: Form, d: i64) -> Result<Form> {
    f.validate(d)?;
    Ok(reduce_unchecked(f, d))
}

pub(crate) fn reduce_unchecked(f: Form, d: i64) -> Form {
    if d < 0 {
        reduce_definite(f)
    } else {
        SqrtD::new(d).canonical(&f)
    }
}

/// A form properly equivalent to `f` whose first coefficient is positive.
fn with_positive_a(f: Form, d: i64) -> Form {
    if f.a > 0 {
        return f;
    }
    // reduced indefinite forms have ac < 0, so swapping the outer
    // coefficients (a proper equivalence) makes a positive
    let g = SqrtD::new(d).reduce(&f);
    if g.a > 0 {
        g
    } else {
        Form::new(g.c, -g.b, g.a)
    }
}

/// Gauss composition of two forms of discriminant `d`, returning the canonical
/// representative of the product class.
pub fn compose(f: Form, g: Form, d: i64) -> Result<Form> {
    for h in [&f, &g] {
        if h.discriminant() != d as i128 {
            return Err(Error::DiscriminantMismatch(h.discriminant() as i64, d));
        }
        h.validate(d)?;
    }
    Ok(compose_unchecked(f, g, d))
}

pub(crate) fn compose_unchecked(f: Form, g: Form, d: i64) -> Form {
    let (f, g) = if d > 0 {
        (with_positive_a(f, d), with_positive_a(g, d))
    } else {
        (f, g)
    };
    let (mut f1, mut f2) = (f, g);
    if f1.a > f2.a {
        std::mem::swap(&mut f1, &mut f2);
    }
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, dd) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (g, u, _v) = ext_gcd(a2, a1);
        (u, g)
    };
    let (x2, y2, d1) = if s % dd == 0 {
        (0, -1, dd)
    } else {
        let (g, x, y) = ext_gcd(s, dd);
        (x, -y, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - d as i128) / (4 * a3);
    let composed = Form::new(a3 as i64, b3 as i64, c3 as i64);
    reduce_unchecked(composed, d)
}
