//! Form class groups of fundamental discriminants: enumeration, composition
//! table and an invariant-factor decomposition.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::forms::{compose_unchecked, reduce_form, reduce_unchecked, Form, SqrtD};
use super::FundamentalDiscriminant;
use crate::arith::{factorize, isqrt};
use crate::error::{Error, Result};

/// Default upper bound on `|D|` for class group enumeration.
pub const DEFAULT_BOUND: u64 = 10_000_000;

/// The class group (narrow for D > 0) of a fundamental discriminant.
///
/// Class 0 is always the principal class.
#[derive(Debug, Clone)]
pub struct FormClassGroup {
    disc: FundamentalDiscriminant,
    classes: Vec<Form>,
    index: HashMap<Form, usize>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    cyclic: Vec<(usize, u64)>,
    coords: Vec<Vec<u64>>,
}

/// On-disk / JSON shape of a class group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupRecord {
    #[serde(rename = "D")]
    pub d: i64,
    pub h: usize,
    pub cyclic: Vec<(Form, u64)>,
    pub classes: Vec<Form>,
}

impl FormClassGroup {
    /// Enumerates the classes of discriminant `d` (with the default bound).
    pub fn new(disc: FundamentalDiscriminant) -> Result<Self> {
        Self::with_bound(disc, DEFAULT_BOUND)
    }

    pub fn with_bound(disc: FundamentalDiscriminant, bound: u64) -> Result<Self> {
        if disc.abs() > bound {
            return Err(Error::BoundExceeded(disc.abs(), bound));
        }
        let classes = enumerate_classes(disc.get());
        let mut group = Self::from_classes(disc, classes);
        group.cyclic = group.decompose();
        group.coords = group.coordinates();
        Ok(group)
    }

    fn from_classes(disc: FundamentalDiscriminant, mut classes: Vec<Form>) -> Self {
        let d = disc.get();
        let principal = reduce_unchecked(Form::principal(d), d);
        classes.sort_by_key(|f| (*f != principal, f.cycle_key()));
        let index: HashMap<Form, usize> =
            classes.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let h = classes.len();
        let mut table = vec![0u32; h * h];
        for i in 0..h {
            for j in i..h {
                let k = index[&compose_unchecked(classes[i], classes[j], d)] as u32;
                table[i * h + j] = k;
                table[j * h + i] = k;
            }
        }
        let inverse = (0..h)
            .map(|i| {
                (0..h)
                    .find(|&j| table[i * h + j] == 0)
                    .expect("inverse exists")
            })
            .collect();
        Self {
            disc,
            classes,
            index,
            table,
            inverse,
            cyclic: Vec::new(),
            coords: Vec::new(),
        }
    }

    /// Rebuilds a group from a cached record, checking it against the
    /// composition law.
    pub fn from_record(rec: &ClassGroupRecord) -> Result<Self> {
        let disc = FundamentalDiscriminant::new(rec.d)?;
        let classes = rec
            .classes
            .iter()
            .map(|f| reduce_form(*f, rec.d))
            .collect::<Result<Vec<_>>>()?;
        if classes.len() != rec.h {
            return Err(Error::Invalid("class count does not match h".into()));
        }
        let mut group = Self::from_classes(disc, classes);
        if group.index.len() != rec.h {
            return Err(Error::Invalid("duplicate classes in record".into()));
        }
        group.cyclic = rec
            .cyclic
            .iter()
            .map(|(f, n)| group.class_of(*f).map(|i| (i, *n)))
            .collect::<Result<Vec<_>>>()?;
        if group.cyclic.iter().any(|&(g, n)| group.order_of(g) != n)
            || group.cyclic.iter().map(|&(_, n)| n).product::<u64>() != rec.h as u64
        {
            return Err(Error::Invalid("cyclic decomposition does not match".into()));
        }
        group.coords = group.coordinates();
        Ok(group)
    }

    pub fn to_record(&self) -> ClassGroupRecord {
        ClassGroupRecord {
            d: self.disc.get(),
            h: self.h(),
            cyclic: self
                .cyclic
                .iter()
                .map(|&(g, n)| (self.classes[g], n))
                .collect(),
            classes: self.classes.clone(),
        }
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.disc
    }

    pub fn h(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Form] {
        &self.classes
    }

    pub fn form(&self, class: usize) -> Form {
        self.classes[class]
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Index of the class containing `f`.
    pub fn class_of(&self, f: Form) -> Result<usize> {
        let g = reduce_form(f, self.disc.get())?;
        self.index
            .get(&g)
            .copied()
            .ok_or(Error::BadForm((f.a, f.b, f.c), self.disc.get()))
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i * self.h() + j] as usize
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn pow(&self, i: usize, e: i64) -> usize {
        let base = if e < 0 { self.inverse(i) } else { i };
        let mut e = e.unsigned_abs() % self.h() as u64;
        let (mut acc, mut sq) = (0, base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, sq);
            }
            sq = self.op(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn order_of(&self, i: usize) -> u64 {
        let mut acc = i;
        let mut n = 1;
        while acc != 0 {
            acc = self.op(acc, i);
            n += 1;
        }
        n
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> u64 {
        self.cyclic.last().map_or(1, |&(_, n)| n)
    }

    /// Invariant factors `(generator, order)` with `d_1 | d_2 | ...`.
    pub fn cyclic(&self) -> &[(usize, u64)] {
        &self.cyclic
    }

    /// Exponent vector of a class with respect to [`Self::cyclic`].
    pub fn coords(&self, class: usize) -> &[u64] {
        &self.coords[class]
    }

    /// For D > 0: the class of principal ideals with a generator of negative
    /// norm (the kernel of narrow -> wide). Principal for D < 0.
    pub fn sign_class(&self) -> usize {
        let d = self.disc.get();
        if d < 0 {
            return 0;
        }
        self.index[&reduce_unchecked(Form::principal(d).negation(), d)]
    }

    /// Order of the wide class group: narrow classes modulo the sign class.
    pub fn wide_class_number(&self) -> usize {
        self.h() / self.order_of(self.sign_class()) as usize
    }

    fn decompose(&self) -> Vec<(usize, u64)> {
        let h = self.h() as u64;
        let orders: Vec<u64> = (0..self.h()).map(|i| self.order_of(i)).collect();
        let mut per_prime: Vec<Vec<(usize, u64)>> = Vec::new();
        for (p, _) in factorize(h) {
            let sylow: Vec<usize> = (0..self.h())
                .filter(|&i| factorize(orders[i]).iter().all(|&(q, _)| q == p))
                .collect();
            let mut sub = vec![0usize];
            let mut member = vec![false; self.h()];
            member[0] = true;
            let mut factors = Vec::new();
            while sub.len() < sylow.len() {
                // element of maximal order modulo the current subgroup
                let (x, t) = sylow
                    .iter()
                    .map(|&x| {
                        let mut acc = x;
                        let mut t = 1u64;
                        while !member[acc] {
                            acc = self.pow(acc, p as i64);
                            t *= p;
                        }
                        (x, t)
                    })
                    .max_by_key(|&(x, t)| (t, std::cmp::Reverse(x)))
                    .expect("sylow subgroup is nonempty");
                let target = self.pow(x, t as i64);
                let y = *sub
                    .iter()
                    .find(|&&y| self.pow(y, t as i64) == target)
                    .expect("the subgroup is pure");
                let g = self.op(x, self.inverse(y));
                let mut grown = Vec::with_capacity(sub.len() * t as usize);
                let mut gk = 0;
                for _ in 0..t {
                    for &s in &sub {
                        grown.push(self.op(s, gk));
                    }
                    gk = self.op(gk, g);
                }
                for &e in &grown {
                    member[e] = true;
                }
                sub = grown;
                factors.push((g, t));
            }
            factors.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
            per_prime.push(factors);
        }
        let k = per_prime.iter().map(Vec::len).max().unwrap_or(0);
        let mut invariant: Vec<(usize, u64)> = (0..k)
            .map(|i| {
                per_prime
                    .iter()
                    .filter_map(|fs| fs.get(i))
                    .fold((0usize, 1u64), |(g, n), &(gp, np)| (self.op(g, gp), n * np))
            })
            .collect();
        invariant.reverse();
        invariant
    }

    fn coordinates(&self) -> Vec<Vec<u64>> {
        let mut coords = vec![Vec::new(); self.h()];
        let k = self.cyclic.len();
        let mut exps = vec![0u64; k];
        loop {
            let class = exps
                .iter()
                .zip(&self.cyclic)
                .fold(0, |acc, (&e, &(g, _))| self.op(acc, self.pow(g, e as i64)));
            assert!(
                coords[class].is_empty() || k == 0,
                "generators are not independent"
            );
            coords[class] = exps.clone();
            // odometer increment
            let mut i = 0;
            while i < k {
                exps[i] += 1;
                if exps[i] < self.cyclic[i].1 {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        coords
    }
}

/// All canonical class representatives of discriminant `d` (unsorted).
pub(crate) fn enumerate_classes(d: i64) -> Vec<Form> {
    if d < 0 {
        let mut out = Vec::new();
        let amax = isqrt((-d as i128) / 3) as i64;
        for a in 1..=amax {
            for b in (-a + 1)..=a {
                if (b - d).rem_euclid(2) != 0 {
                    continue;
                }
                let Some(f) = Form::from_ab(a, b, d) else {
                    continue;
                };
                if f.c < a || (b < 0 && a == f.c) || !f.is_primitive() {
                    continue;
                }
                out.push(f);
            }
        }
        out
    } else {
        let sq = SqrtD::new(d);
        let s = isqrt(d as i128) as i64;
        let mut reduced = Vec::new();
        for b in 1..=s {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let n = (d - b * b) / 4;
            let lo = (s + 1 - b + 1).div_euclid(2).max(1);
            let hi = (s + b).div_euclid(2);
            for a in lo..=hi {
                if n % a != 0 {
                    continue;
                }
                for sa in [a, -a] {
                    let f = Form::new(sa, b, -n / sa);
                    if f.is_primitive() && sq.is_reduced(&f) {
                        reduced.push(f);
                    }
                }
            }
        }
        let mut seen: BTreeMap<Form, Form> = BTreeMap::new();
        let mut out = Vec::new();
        for f in reduced {
            if seen.contains_key(&f) {
                continue;
            }
            let cycle = sq.cycle(&f);
            let canon = *cycle.iter().min_by_key(|g| g.cycle_key()).unwrap();
            for g in cycle {
                seen.insert(g, canon);
            }
            out.push(canon);
        }
        out
    }
}
