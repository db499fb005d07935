//! Oldforms at level `Np^r`: the degeneracy embedding `(f_0, ..., f_r) ->
//! sum f_i(q^(p^i))`, the matrix of `T_p` on the span of `f(q^(p^i))`, and
//! the stabilisation killing the `p`-th coefficient.

use serde::Serialize;

use crate::arith::{self, gcd};
use crate::cyclotomic::ResElt;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::theta::QExpansion;

fn check_rings<S: Scalar>(fs: &[QExpansion<S>]) -> Result<()> {
    let first = fs
        .first()
        .ok_or_else(|| Error::Invalid("no expansions given".into()))?;
    if fs.iter().any(|f| !f.a(0).same_ring(first.a(0))) {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

/// `sum_i f_i(q^(p^i))` to precision `bound`; `f_i` must be known to `bound / p^i`.
pub fn degeneracy_embed<S: Scalar>(
    fs: &[QExpansion<S>],
    p: u64,
    bound: u64,
) -> Result<QExpansion<S>> {
    check_rings(fs)?;
    let mut out = QExpansion::zero(fs[0].a(0), bound);
    let mut step = 1u64;
    for f in fs {
        if step > bound {
            break;
        }
        f.require(bound / step)?;
        for n in (0..=bound).step_by(step as usize) {
            out.set(n, out.a(n).plus(f.a(n / step)));
        }
        step = step.saturating_mul(p);
    }
    Ok(out)
}

/// The matrix of `T_p` on `g_0, ..., g_r` with `g_i = f(q^(p^i))`: column `i`
/// holds the coordinates of `T_p g_i`, so `T_p g_0 = a_p g_0 - beta g_1` and
/// `T_p g_i = g_(i-1)` for `i >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OldformBlock<S> {
    pub r: usize,
    pub a_p: S,
    pub beta: S,
    pub matrix: Vec<Vec<S>>,
}

/// `beta = delta * p^(k-1) * eps(p)`.
pub fn tp_matrix<S: Scalar>(
    a_p: S,
    eps_p: S,
    k: u32,
    delta: bool,
    r: usize,
    p: u64,
) -> OldformBlock<S> {
    let beta = if delta {
        eps_p.times(&a_p.int_like(p as i64).pow(k.saturating_sub(1) as u64))
    } else {
        a_p.zero_like()
    };
    let zero = a_p.zero_like();
    let mut matrix = vec![vec![zero; r + 1]; r + 1];
    matrix[0][0] = a_p.clone();
    if r >= 1 {
        matrix[1][0] = beta.negated();
    }
    for i in 0..r {
        matrix[i][i + 1] = a_p.one_like();
    }
    OldformBlock {
        r,
        a_p,
        beta,
        matrix,
    }
}

impl<S: Scalar> OldformBlock<S> {
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(self.a_p.zero_like(), |acc, (m, x)| acc.plus(&m.times(x)))
            })
            .collect()
    }

    /// For `r = 2`: the coordinates `(1, -a_p, beta)` of the kernel vector.
    pub fn kernel_vector(&self) -> Option<Vec<S>> {
        (self.r == 2).then(|| vec![self.a_p.one_like(), self.a_p.negated(), self.beta.clone()])
    }
}

/// `det(xI - M)` by Berkowitz's division-free algorithm, lowest degree first.
pub fn char_poly<S: Scalar>(block: &OldformBlock<S>) -> Vec<S> {
    let mut c = berkowitz(&block.matrix, &block.a_p);
    c.reverse();
    c
}

/// Characteristic polynomial coefficients of a square matrix, highest degree first.
pub fn berkowitz<S: Scalar>(a: &[Vec<S>], like: &S) -> Vec<S> {
    let n = a.len();
    let one = like.one_like();
    let mut poly = vec![one.clone()];
    for k in 0..n {
        // leading k x k block A, column C = a[0..k][k], row R = a[k][0..k]
        let mut t = vec![one.clone(), a[k][k].negated()];
        let mut col: Vec<S> = (0..k).map(|i| a[i][k].clone()).collect();
        for _ in 0..k {
            let rc = (0..k).fold(like.zero_like(), |acc, j| acc.plus(&a[k][j].times(&col[j])));
            t.push(rc.negated());
            col = (0..k)
                .map(|i| (0..k).fold(like.zero_like(), |acc, j| acc.plus(&a[i][j].times(&col[j]))))
                .collect();
        }
        // Toeplitz product: new[i] = sum_j t[i-j] * poly[j]
        poly = (0..k + 2)
            .map(|i| {
                (0..poly.len())
                    .filter(|&j| j <= i && i - j < t.len())
                    .fold(like.zero_like(), |acc, j| {
                        acc.plus(&t[i - j].times(&poly[j]))
                    })
            })
            .collect();
    }
    poly
}

/// `f(q) - a_p f(q^p) + p^(k-1) eps(p) f(q^(p^2))`, which has the same `a_l`
/// as `f` for primes `l != p` and `a_p = 0`.
pub fn ap_zero_stabilize<S: Scalar>(
    f: &QExpansion<S>,
    a_p: &S,
    eps_p: &S,
    k: u32,
    p: u64,
    bound: u64,
) -> Result<QExpansion<S>> {
    let block = tp_matrix(a_p.clone(), eps_p.clone(), k, true, 2, p);
    let comps: Vec<QExpansion<S>> = block
        .kernel_vector()
        .expect("r = 2")
        .iter()
        .map(|c| f.scale(c))
        .collect();
    degeneracy_embed(&comps, p, bound)
}

/// `T_p` at a level divisible by `p`: `a_n -> a_(np)`.
pub fn tp_action_level_divisible<S: Scalar>(
    f: &QExpansion<S>,
    p: u64,
    bound: u64,
) -> Result<QExpansion<S>> {
    f.require(bound * p)?;
    Ok(QExpansion::new(
        (0..=bound).map(|n| f.a(n * p).clone()).collect(),
    ))
}

/// `T_n` in weight `k` and level `level` with nebentypus `eps`:
/// `a_m(T_n f) = sum_{d | (m, n), (d, level) = 1} eps(d) d^(k-1) a_(mn/d^2)`.
pub fn hecke_tn<S: Scalar>(
    f: &QExpansion<S>,
    n: u64,
    k: u32,
    level: u64,
    eps: impl Fn(u64) -> S,
    bound: u64,
) -> Result<QExpansion<S>> {
    f.require(bound * n)?;
    let like = f.a(0);
    let weights: Vec<(u64, S)> = arith::divisors(n)
        .into_iter()
        .filter(|&d| gcd(d as i64, level as i64) == 1)
        .map(|d| {
            (
                d,
                eps(d).times(&like.int_like(d as i64).pow(k.saturating_sub(1) as u64)),
            )
        })
        .collect();
    let coeffs = (0..=bound)
        .map(|m| {
            weights
                .iter()
                .filter(|(d, _)| m % d == 0)
                .fold(like.zero_like(), |acc, (d, w)| {
                    acc.plus(&w.times(f.a(m * n / (d * d))))
                })
        })
        .collect();
    Ok(QExpansion::new(coeffs))
}

/// The normalised eigenform with prescribed prime coefficients: `a_1 = 1`,
/// multiplicative, and `a_(l^(r+1)) = a_l a_(l^r) - eps(l) l^(k-1) a_(l^(r-1))`
/// (no last term for `l | level`).
pub fn eigenform_from_primes<S: Scalar>(
    like: &S,
    a_prime: impl Fn(u64) -> S,
    eps: impl Fn(u64) -> S,
    k: u32,
    level: u64,
    bound: u64,
) -> QExpansion<S> {
    let sieve = arith::FactorSieve::new(bound.max(2));
    let mut f = QExpansion::zero(like, bound);
    if bound >= 1 {
        f.set(1, like.one_like());
    }
    for l in arith::primes_up_to(bound) {
        let al = a_prime(l);
        let beta = if level.is_multiple_of(l) {
            like.zero_like()
        } else {
            eps(l).times(&like.int_like(l as i64).pow(k.saturating_sub(1) as u64))
        };
        let (mut prev, mut cur) = (1u64, l);
        f.set(l, al.clone());
        while let Some(next) = cur.checked_mul(l).filter(|&x| x <= bound) {
            let v = al.times(f.a(cur)).minus(&beta.times(f.a(prev)));
            f.set(next, v);
            prev = cur;
            cur = next;
        }
    }
    for n in 2..=bound {
        let fac = sieve.factor(n);
        if fac.len() > 1 {
            let v = fac
                .iter()
                .fold(like.one_like(), |acc, &(l, e)| acc.times(f.a(l.pow(e))));
            f.set(n, v);
        }
    }
    f
}

/// Rank of a matrix over a residue field, by Gaussian elimination.
pub fn rank(rows: &[Vec<ResElt>]) -> usize {
    let mut m: Vec<Vec<ResElt>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][c].inverse().expect("nonzero");
        let pivot_row: Vec<ResElt> = m[rank].iter().map(|x| x.times(&inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = x.minus(&factor.times(y));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// The `(bound + 1) x (r + 1)` grid of coefficients of `f(q^(p^i))`.
pub fn oldform_grid<S: Scalar>(
    f: &QExpansion<S>,
    p: u64,
    r: usize,
    bound: u64,
) -> Result<Vec<Vec<S>>> {
    let comps: Result<Vec<QExpansion<S>>> = (0..=r)
        .map(|i| {
            let mut fs = vec![QExpansion::zero(f.a(0), bound); i];
            fs.push(f.clone());
            degeneracy_embed(&fs, p, bound)
        })
        .collect();
    let comps = comps?;
    Ok((0..=bound)
        .map(|n| comps.iter().map(|g| g.a(n).clone()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> QExpansion<i64> {
        QExpansion::new(v.to_vec())
    }

    #[test]
    fn embedding_examples() {
        let f = q(&[0, 1, 2, 3, 4]);
        let z = QExpansion::zero(&0i64, 4);
        assert_eq!(degeneracy_embed(&[f.clone(), z.clone()], 2, 4).unwrap(), f);
        assert_eq!(
            degeneracy_embed(&[z, f.clone()], 2, 4).unwrap(),
            q(&[0, 0, 1, 0, 2])
        );
        assert_eq!(
            degeneracy_embed(&[f.clone(), f.clone()], 2, 4).unwrap(),
            q(&[0, 1, 3, 3, 6])
        );
        let short = q(&[0, 1]);
        assert!(matches!(
            degeneracy_embed(&[short.clone(), short], 2, 4),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn matrix_shapes() {
        let m = tp_matrix(5i64, 1, 1, true, 0, 2);
        assert_eq!(m.matrix, vec![vec![5]]);
        let m = tp_matrix(5i64, 3, 1, true, 2, 2);
        assert_eq!(m.matrix, vec![vec![5, 1, 0], vec![-3, 0, 1], vec![0, 0, 0]]);
        let m = tp_matrix(5i64, 3, 1, false, 1, 2);
        assert_eq!(m.matrix, vec![vec![5, 1], vec![0, 0]]);
        let m = tp_matrix(5i64, 3, 3, true, 1, 2);
        assert_eq!(m.beta, 12);
    }

    /// det(xI - A) by cofactor expansion over `Z[x]`.
    fn cofactor_char_poly(a: &[Vec<i64>]) -> Vec<i64> {
        fn det(m: &[Vec<Vec<i64>>]) -> Vec<i64> {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut acc = vec![0i64; m.len() + 1];
            for (j, entry) in m[0].iter().enumerate() {
                let minor: Vec<Vec<Vec<i64>>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let sub = det(&minor);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                for (i, x) in entry.iter().enumerate() {
                    for (k, y) in sub.iter().enumerate() {
                        if i + k < acc.len() {
                            acc[i + k] += sign * x * y;
                        }
                    }
                }
            }
            acc
        }
        let n = a.len();
        let m: Vec<Vec<Vec<i64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            vec![-a[i][j], 1]
                        } else {
                            vec![-a[i][j], 0]
                        }
                    })
                    .collect()
            })
            .collect();
        let mut d = det(&m);
        d.truncate(n + 1);
        d
    }

    #[test]
    fn berkowitz_agrees_with_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            for _ in 0..20 {
                let a: Vec<Vec<i64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect())
                    .collect();
                let mut b = berkowitz(&a, &0i64);
                b.reverse();
                assert_eq!(b, cofactor_char_poly(&a));
            }
        }
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&tp_matrix(7i64, 2, 1, true, 0, 3)), vec![-7, 1]);
        assert_eq!(
            char_poly(&tp_matrix(7i64, 2, 1, true, 2, 3)),
            vec![0, 2, -7, 1]
        );
        assert_eq!(
            char_poly(&tp_matrix(7i64, 2, 1, false, 1, 3)),
            vec![0, -7, 1]
        );
    }

    #[test]
    fn stabilised_form_kills_ap() {
        // a synthetic weight-2 eigenform of level 11 with arbitrary prime data
        let eps = |_| 1i64;
        let f = eigenform_from_primes(&0i64, |l| (l as i64 % 7) - 3, eps, 2, 11, 2000);
        let p = 3;
        let g = ap_zero_stabilize(&f, f.a(p), &1, 2, p, 600).unwrap();
        assert_eq!(*g.a(p), 0);
        for l in arith::primes_up_to(600) {
            if l != p {
                assert_eq!(g.a(l), f.a(l));
            }
        }
        for j in 1..=5 {
            assert_eq!(*g.a(p.pow(j)), 0);
        }
    }

    #[test]
    fn rank_over_residue_field() {
        use crate::cyclotomic::ResidueField;
        let field = ResidueField::new(1, 7).unwrap();
        let e = |n: i64| ResElt::from_int(&field, n);
        assert_eq!(rank(&[vec![e(1), e(2)], vec![e(2), e(4)]]), 1);
        assert_eq!(
            rank(&[vec![e(1), e(2)], vec![e(2), e(5)], vec![e(0), e(0)]]),
            2
        );
    }
}
