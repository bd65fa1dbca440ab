//! Multiplicity tables for `a ∘ b` over `A × B`.
//!
//! This is the counting kernel behind energies, representation functions and
//! the extractors. Pairs are never sorted; each one bumps a counter in an
//! associative table. Rationals are first brought to a common denominator so
//! sums and products become integer operations on the numerators; quotients
//! are keyed by reduced numerator pairs. Machine integers are used whenever
//! the numerators are small enough, big integers otherwise.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::field::{inv_mod, FieldElem, FieldKind, GroundField};
use crate::set::{FiniteSet, Law};

const DENSE_LIMIT: u64 = 1 << 24;
const SMALL: i128 = 1 << 62;

enum Repr {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
    /// value = key / denom
    Int(HashMap<i128, u64>, BigInt),
    Big(HashMap<BigInt, u64>, BigInt),
    /// value = (n / d) · scale
    Frac(HashMap<(i128, i128), u64>, BigRational),
    BigFrac(HashMap<(BigInt, BigInt), u64>, BigRational),
}

/// Exact multiplicities `x ↦ |{(a, b) ∈ A × B : a ∘ b = x}|`.
pub struct PairTable {
    field: GroundField,
    repr: Repr,
    pairs: u128,
}

fn bump<K: Hash + Eq>(m: &mut HashMap<K, u64>, k: K) {
    *m.entry(k).or_insert(0) += 1;
}

/// Numerators over the least common denominator.
fn common_denominator(s: &FiniteSet) -> (Vec<BigInt>, BigInt) {
    let d = s
        .iter()
        .map(|x| x.as_rational().expect("rational").denom().clone())
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let nums = s
        .iter()
        .map(|x| {
            let q = x.as_rational().expect("rational");
            q.numer() * (&d / q.denom())
        })
        .collect();
    (nums, d)
}

fn rescale(nums: &[BigInt], factor: &BigInt) -> Vec<BigInt> {
    nums.iter().map(|n| n * factor).collect()
}

fn small(nums: &[BigInt]) -> Option<Vec<i128>> {
    nums.iter()
        .map(|n| n.to_i128().filter(|v| v.abs() <= SMALL))
        .collect()
}

fn reduced_i128(n: i128, d: i128) -> (i128, i128) {
    let g = n.gcd(&d);
    let (n, d) = (n / g, d / g);
    if d < 0 {
        (-n, -d)
    } else {
        (n, d)
    }
}

fn reduced_big(n: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
    let g = n.gcd(d);
    let (n, d) = (n / &g, d / &g);
    if d.is_negative() {
        (-n, -d)
    } else {
        (n, d)
    }
}

impl PairTable {
    /// Counts `a ∘ b` over all pairs. Division requires `0 ∉ B`.
    pub fn build(a: &FiniteSet, b: &FiniteSet, law: Law) -> Result<Self> {
        a.same_field(b)?;
        if law == Law::Div && !b.excludes_zero() {
            return Err(Error::ZeroDivisor("quotient set with 0 in the denominator set"));
        }
        let field = a.field();
        let pairs = a.len() as u128 * b.len() as u128;
        let repr = match field.kind() {
            FieldKind::Prime(p) => Self::build_prime(a, b, law, p),
            FieldKind::Char0 => Self::build_rational(a, b, law),
        };
        Ok(PairTable { field, repr, pairs })
    }

    fn build_prime(a: &FiniteSet, b: &FiniteSet, law: Law, p: u64) -> Repr {
        let ra: Vec<u64> = a.iter().map(|x| x.as_residue().unwrap()).collect();
        let mut rb: Vec<u64> = b.iter().map(|x| x.as_residue().unwrap()).collect();
        let op: fn(u64, u64, u64) -> u64 = match law {
            Law::Add => |x, y, p| (x + y) % p,
            Law::Sub => |x, y, p| (x + p - y) % p,
            Law::Mul | Law::Div => |x, y, p| x * y % p,
        };
        if law == Law::Div {
            rb.iter_mut().for_each(|y| *y = inv_mod(*y, p));
        }
        if p <= DENSE_LIMIT {
            let mut counts = vec![0u64; p as usize];
            for &x in &ra {
                for &y in &rb {
                    counts[op(x, y, p) as usize] += 1;
                }
            }
            Repr::Dense(counts)
        } else {
            let mut counts = HashMap::new();
            for &x in &ra {
                for &y in &rb {
                    bump(&mut counts, op(x, y, p));
                }
            }
            Repr::Sparse(counts)
        }
    }

    fn build_rational(a: &FiniteSet, b: &FiniteSet, law: Law) -> Repr {
        let (na, da) = common_denominator(a);
        let (nb, db) = common_denominator(b);
        match law {
            Law::Add | Law::Sub => {
                let d = da.lcm(&db);
                let na = rescale(&na, &(&d / &da));
                let nb = rescale(&nb, &(&d / &db));
                let sign: i8 = if law == Law::Add { 1 } else { -1 };
                match (small(&na), small(&nb)) {
                    (Some(xa), Some(xb)) => {
                        let mut m = HashMap::with_capacity(xa.len() * xb.len() / 2 + 1);
                        for &x in &xa {
                            for &y in &xb {
                                bump(&mut m, if sign > 0 { x + y } else { x - y });
                            }
                        }
                        Repr::Int(m, d)
                    }
                    _ => {
                        let mut m = HashMap::new();
                        for x in &na {
                            for y in &nb {
                                bump(&mut m, if sign > 0 { x + y } else { x - y });
                            }
                        }
                        Repr::Big(m, d)
                    }
                }
            }
            Law::Mul => {
                let d = &da * &db;
                match (small(&na), small(&nb)) {
                    (Some(xa), Some(xb)) => {
                        let mut m = HashMap::with_capacity(xa.len() * xb.len() / 2 + 1);
                        for &x in &xa {
                            for &y in &xb {
                                bump(&mut m, x * y);
                            }
                        }
                        Repr::Int(m, d)
                    }
                    _ => {
                        let mut m = HashMap::new();
                        for x in &na {
                            for y in &nb {
                                bump(&mut m, x * y);
                            }
                        }
                        Repr::Big(m, d)
                    }
                }
            }
            Law::Div => {
                // (x/da) / (y/db) = (x/y) · (db/da)
                let scale = BigRational::new(db, da);
                match (small(&na), small(&nb)) {
                    (Some(xa), Some(xb)) => {
                        let mut m = HashMap::with_capacity(xa.len() * xb.len() / 2 + 1);
                        for &x in &xa {
                            for &y in &xb {
                                bump(&mut m, reduced_i128(x, y));
                            }
                        }
                        Repr::Frac(m, scale)
                    }
                    _ => {
                        let mut m = HashMap::new();
                        for x in &na {
                            for y in &nb {
                                bump(&mut m, reduced_big(x, y));
                            }
                        }
                        Repr::BigFrac(m, scale)
                    }
                }
            }
        }
    }

    /// Number of pairs counted, `|A|·|B|`.
    pub fn total(&self) -> u128 {
        self.pairs
    }

    fn counts(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match &self.repr {
            Repr::Dense(v) => Box::new(v.iter().copied().filter(|&c| c > 0)),
            Repr::Sparse(m) => Box::new(m.values().copied()),
            Repr::Int(m, _) => Box::new(m.values().copied()),
            Repr::Big(m, _) => Box::new(m.values().copied()),
            Repr::Frac(m, _) => Box::new(m.values().copied()),
            Repr::BigFrac(m, _) => Box::new(m.values().copied()),
        }
    }

    /// `Σ_x r(x)²`. Each count is at most `|A||B|` and there are at most
    /// `|A||B|` of them, so the sum is below `(|A||B|)²` and fits a `u128`.
    pub fn energy(&self) -> u128 {
        self.counts().map(|c| c as u128 * c as u128).sum()
    }

    /// Size of the support, `|A ∘ B|`.
    pub fn support_len(&self) -> usize {
        match &self.repr {
            Repr::Dense(v) => v.iter().filter(|&&c| c > 0).count(),
            Repr::Sparse(m) => m.len(),
            Repr::Int(m, _) => m.len(),
            Repr::Big(m, _) => m.len(),
            Repr::Frac(m, _) => m.len(),
            Repr::BigFrac(m, _) => m.len(),
        }
    }

    /// `(value, count)` pairs in canonical value order.
    pub fn entries(&self) -> Vec<(FieldElem, u64)> {
        let f = self.field;
        let mut out: Vec<(FieldElem, u64)> = match &self.repr {
            Repr::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(x, &c)| (f.residue(x as u64), c))
                .collect(),
            Repr::Sparse(m) => m.iter().map(|(&x, &c)| (f.residue(x), c)).collect(),
            Repr::Int(m, d) => m
                .iter()
                .map(|(k, &c)| (FieldElem::Rational(BigRational::new(BigInt::from(*k), d.clone())), c))
                .collect(),
            Repr::Big(m, d) => m
                .iter()
                .map(|(k, &c)| (FieldElem::Rational(BigRational::new(k.clone(), d.clone())), c))
                .collect(),
            Repr::Frac(m, s) => m
                .iter()
                .map(|((n, d), &c)| {
                    let q = BigRational::new(BigInt::from(*n), BigInt::from(*d)) * s;
                    (FieldElem::Rational(q), c)
                })
                .collect(),
            Repr::BigFrac(m, s) => m
                .iter()
                .map(|((n, d), &c)| {
                    let q = BigRational::new(n.clone(), d.clone()) * s;
                    (FieldElem::Rational(q), c)
                })
                .collect(),
        };
        out.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        out
    }

    /// The support `A ∘ B` as a canonical set.
    pub fn support(&self) -> FiniteSet {
        let v = self.entries().into_iter().map(|(x, _)| x).collect();
        FiniteSet::from_sorted_unchecked(self.field, v)
    }

    pub fn to_map(&self) -> HashMap<FieldElem, u64> {
        self.entries().into_iter().collect()
    }
}

/// Every pair `(aᵢ, bⱼ)` labelled with the id of its value `aᵢ ∘ bⱼ`.
/// Ids are assigned in canonical value order.
pub(crate) struct PairClasses {
    /// Row-major, `ids[i·|B| + j]`.
    pub ids: Vec<u32>,
    pub values: Vec<FieldElem>,
    pub counts: Vec<u64>,
    pub cols: usize,
}

impl PairClasses {
    pub fn id(&self, i: usize, j: usize) -> u32 {
        self.ids[i * self.cols + j]
    }
}

fn classify<K: Hash + Eq + Clone>(rows: usize, cols: usize, key: impl Fn(usize, usize) -> K) -> (Vec<u32>, Vec<K>) {
    let mut index: HashMap<K, u32> = HashMap::new();
    let mut keys = Vec::new();
    let mut ids = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let k = key(i, j);
            let id = *index.entry(k.clone()).or_insert_with(|| {
                keys.push(k);
                (keys.len() - 1) as u32
            });
            ids.push(id);
        }
    }
    (ids, keys)
}

fn finish(mut ids: Vec<u32>, values: Vec<FieldElem>, cols: usize) -> PairClasses {
    // relabel so that ids follow value order
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_by(|&x, &y| values[x as usize].cmp(&values[y as usize]));
    let mut rank = vec![0u32; values.len()];
    for (r, &o) in order.iter().enumerate() {
        rank[o as usize] = r as u32;
    }
    let mut counts = vec![0u64; values.len()];
    for id in ids.iter_mut() {
        *id = rank[*id as usize];
        counts[*id as usize] += 1;
    }
    let values = order.into_iter().map(|o| values[o as usize].clone()).collect();
    PairClasses { ids, values, counts, cols }
}

pub(crate) fn pair_classes(a: &FiniteSet, b: &FiniteSet, law: Law) -> Result<PairClasses> {
    a.same_field(b)?;
    if law == Law::Div && !b.excludes_zero() {
        return Err(Error::ZeroDivisor("quotient set with 0 in the denominator set"));
    }
    let f = a.field();
    let (rows, cols) = (a.len(), b.len());
    if let FieldKind::Prime(p) = f.kind() {
        let ra: Vec<u64> = a.iter().map(|x| x.as_residue().unwrap()).collect();
        let mut rb: Vec<u64> = b.iter().map(|x| x.as_residue().unwrap()).collect();
        if law == Law::Div {
            rb.iter_mut().for_each(|y| *y = inv_mod(*y, p));
        }
        let (ids, keys) = classify(rows, cols, |i, j| {
            let (x, y) = (ra[i], rb[j]);
            match law {
                Law::Add => (x + y) % p,
                Law::Sub => (x + p - y) % p,
                Law::Mul | Law::Div => x * y % p,
            }
        });
        let values = keys.into_iter().map(|k| f.residue(k)).collect();
        return Ok(finish(ids, values, cols));
    }
    let (na, da) = common_denominator(a);
    let (nb, db) = common_denominator(b);
    let rat = |n: BigInt, d: &BigInt| FieldElem::Rational(BigRational::new(n, d.clone()));
    let (ids, values) = match law {
        Law::Add | Law::Sub => {
            let d = da.lcm(&db);
            let na = rescale(&na, &(&d / &da));
            let nb = rescale(&nb, &(&d / &db));
            let add = law == Law::Add;
            match (small(&na), small(&nb)) {
                (Some(xa), Some(xb)) => {
                    let (ids, keys) = classify(rows, cols, |i, j| if add { xa[i] + xb[j] } else { xa[i] - xb[j] });
                    (ids, keys.into_iter().map(|k| rat(BigInt::from(k), &d)).collect())
                }
                _ => {
                    let (ids, keys) = classify(rows, cols, |i, j| if add { &na[i] + &nb[j] } else { &na[i] - &nb[j] });
                    (ids, keys.into_iter().map(|k| rat(k, &d)).collect())
                }
            }
        }
        Law::Mul => {
            let d = &da * &db;
            match (small(&na), small(&nb)) {
                (Some(xa), Some(xb)) => {
                    let (ids, keys) = classify(rows, cols, |i, j| xa[i] * xb[j]);
                    (ids, keys.into_iter().map(|k| rat(BigInt::from(k), &d)).collect())
                }
                _ => {
                    let (ids, keys) = classify(rows, cols, |i, j| &na[i] * &nb[j]);
                    (ids, keys.into_iter().map(|k| rat(k, &d)).collect())
                }
            }
        }
        Law::Div => {
            let scale = BigRational::new(db, da);
            let frac = |n: BigInt, d: BigInt| FieldElem::Rational(BigRational::new(n, d) * &scale);
            match (small(&na), small(&nb)) {
                (Some(xa), Some(xb)) => {
                    let (ids, keys) = classify(rows, cols, |i, j| reduced_i128(xa[i], xb[j]));
                    (ids, keys.into_iter().map(|(n, d)| frac(BigInt::from(n), BigInt::from(d))).collect())
                }
                _ => {
                    let (ids, keys) = classify(rows, cols, |i, j| reduced_big(&na[i], &nb[j]));
                    (ids, keys.into_iter().map(|(n, d)| frac(n, d)).collect())
                }
            }
        }
    };
    Ok(finish(ids, values, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_and_small_paths_agree() {
        let f = GroundField::char0();
        // Values with huge numerators take the big-integer path.
        let huge = FiniteSet::new(
            f,
            (0..6).map(|i| f.rational(&BigRational::from_integer(BigInt::from(1u8) << (70 + i))).unwrap()),
        )
        .unwrap();
        let small = FiniteSet::new(f, (0..6).map(|i| f.int(1 << i))).unwrap();
        for law in [Law::Add, Law::Sub, Law::Mul, Law::Div] {
            let e1 = PairTable::build(&huge, &huge, law).unwrap().energy();
            let e2 = PairTable::build(&small, &small, law).unwrap().energy();
            assert_eq!(e1, e2, "{law}");
        }
    }

    #[test]
    fn fractional_elements() {
        let f = GroundField::char0();
        let a = FiniteSet::new(f, ["1/2", "1/3", "2/3"].iter().map(|s| f.parse(s).unwrap())).unwrap();
        let t = PairTable::build(&a, &a, Law::Add).unwrap();
        let m = t.to_map();
        assert_eq!(m[&f.int(1)], 3); // 1/3 + 2/3 twice, 1/2 + 1/2
        assert_eq!(m[&f.parse("5/6").unwrap()], 2);
        let d = PairTable::build(&a, &a, Law::Div).unwrap().to_map();
        assert_eq!(d[&f.int(2)], 1); // (2/3)/(1/3)
        assert_eq!(d[&f.parse("3/2").unwrap()], 1); // (1/2)/(1/3)
        assert_eq!(d[&f.int(1)], 3);
    }

    #[test]
    fn pair_classes_match_table() {
        let f = GroundField::char0();
        let a = FiniteSet::new(f, ["1/2", "1/3", "2/3", "5"].iter().map(|s| f.parse(s).unwrap())).unwrap();
        let fp = GroundField::prime(11).unwrap();
        let b = FiniteSet::from_ints(fp, &[1, 3, 4, 9]).unwrap();
        for s in [&a, &b] {
            for law in [Law::Add, Law::Sub, Law::Mul, Law::Div] {
                let t = PairTable::build(s, s, law).unwrap().entries();
                let c = pair_classes(s, s, law).unwrap();
                let got: Vec<(FieldElem, u64)> = c.values.iter().cloned().zip(c.counts.iter().copied()).collect();
                assert_eq!(got, t);
                let xs: Vec<&FieldElem> = s.iter().collect();
                for i in 0..s.len() {
                    for j in 0..s.len() {
                        let v = match law {
                            Law::Add => xs[i] + xs[j],
                            Law::Sub => xs[i] - xs[j],
                            Law::Mul => xs[i] * xs[j],
                            Law::Div => xs[i] / xs[j],
                        };
                        assert_eq!(c.values[c.id(i, j) as usize], v);
                    }
                }
            }
        }
    }
}
