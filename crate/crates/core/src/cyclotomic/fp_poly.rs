//! Dense polynomials over the prime field `F_p`, coefficients stored lowest degree first.

use rand::Rng;

pub type FpPoly = Vec<u64>;

pub fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv(a: u64, p: u64) -> u64 {
    crate::arith::mod_pow(a, p - 2, p)
}

pub fn from_ints(c: &[i64], p: u64) -> FpPoly {
    trim(c.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulm(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv(b[db], p);
    let mut r = trim(a.to_vec());
    let Some(da) = degree(&r) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let coef = mulm(r[dr], lead_inv, p);
        q[dr - db] = coef;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            let idx = dr - db + j;
            r[idx] = (r[idx] + p - mulm(coef, bj, p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn make_monic(a: &[u64], p: u64) -> FpPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let li = inv(a[d], p);
            a[..=d].iter().map(|&c| mulm(c, li, p)).collect()
        }
    }
}

/// Monic gcd.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&x, p)
}

/// Extended gcd: `(g, s)` with `s*a ≡ g (mod b)`, `g` monic.
pub fn inverse_mod(a: &[u64], modulus: &[u64], p: u64) -> Option<FpPoly> {
    let (mut r0, mut r1) = (trim(modulus.to_vec()), rem(a, modulus, p));
    let (mut s0, mut s1): (FpPoly, FpPoly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let li = inv(r0[0], p);
    Some(trim(s0.iter().map(|&c| mulm(c, li, p)).collect()))
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> FpPoly {
    let mut base = rem(a, m, p);
    let mut acc = rem(&[1], m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

/// Splits a squarefree polynomial whose irreducible factors all have degree `d`
/// (Cantor–Zassenhaus). Returns the monic factors in no particular order.
pub fn equal_degree_factors<R: Rng>(f: &[u64], d: usize, p: u64, rng: &mut R) -> Vec<FpPoly> {
    let f = make_monic(f, p);
    let n = degree(&f).unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f];
    }
    let q = (p as u128).pow(d as u32);
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if degree(&a).is_none() {
            continue;
        }
        let g = gcd(&a, &f, p);
        let candidate = if degree(&g).unwrap_or(0) > 0 {
            g
        } else if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1)) mod f
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = mulmod(&t, &t, &f, p);
                acc = add(&acc, &t, p);
            }
            gcd(&acc, &f, p)
        } else {
            let h = powmod(&a, (q - 1) / 2, &f, p);
            gcd(&sub(&h, &[1], p), &f, p)
        };
        let dc = degree(&candidate).unwrap_or(0);
        if dc > 0 && dc < n {
            let other = divrem(&f, &candidate, p).0;
            let mut out = equal_degree_factors(&candidate, d, p, rng);
            out.extend(equal_degree_factors(&other, d, p, rng));
            return out;
        }
    }
}
