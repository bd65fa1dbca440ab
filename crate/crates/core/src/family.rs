//! Generators for the set families used throughout: progressions, the
//! Balog–Wooley constructions, seeded random subsets and multiplicative
//! subgroups of `F_p*`.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{pow_mod, FieldElem, GroundField};
use crate::set::FiniteSet;

/// A family description. Identical specs (and seeds) always produce
/// identical sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `{start + i·step : 0 ≤ i < n}`
    Ap {
        #[serde(serialize_with = "ser_rat")]
        start: BigRational,
        #[serde(serialize_with = "ser_rat")]
        step: BigRational,
        n: usize,
    },
    /// `{start · ratio^i : 0 ≤ i < n}`
    Gp {
        #[serde(serialize_with = "ser_rat")]
        start: BigRational,
        #[serde(serialize_with = "ser_rat")]
        ratio: BigRational,
        n: usize,
    },
    /// `ap(1, 1, n) ∪ gp(gp_start, gp_ratio, n)`; the progression parameters
    /// are free, defaults put the GP just above the AP.
    BwUnion {
        n: usize,
        #[serde(serialize_with = "ser_rat")]
        gp_start: BigRational,
        #[serde(serialize_with = "ser_rat")]
        gp_ratio: BigRational,
    },
    /// `⋃_{i<n} 2^i · [n², 2n²)`, of size `n³`.
    BwIntertwined { n: usize },
    /// Each element of `parent` kept independently with probability `density`.
    RandomSubset {
        #[serde(skip)]
        parent: FiniteSet,
        density: f64,
        seed: u64,
    },
    /// A uniformly random `size`-element subset of `parent`.
    RandomSized {
        #[serde(skip)]
        parent: FiniteSet,
        size: usize,
        seed: u64,
    },
    /// The order-`order` subgroup of `F_p*`.
    MultSubgroup { p: u64, order: u64 },
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&FieldElem::Rational(q.clone()))
}

fn int(v: i64) -> BigRational {
    crate::field::rat_int(v)
}

impl FamilySpec {
    pub fn ap(start: i64, step: i64, n: usize) -> Self {
        FamilySpec::Ap {
            start: int(start),
            step: int(step),
            n,
        }
    }

    pub fn gp(start: i64, ratio: i64, n: usize) -> Self {
        FamilySpec::Gp {
            start: int(start),
            ratio: int(ratio),
            n,
        }
    }

    /// Balog–Wooley union with the default GP `gp(n + 1, 2, n)`.
    pub fn bw_union(n: usize) -> Self {
        FamilySpec::BwUnion {
            n,
            gp_start: int(n as i64 + 1),
            gp_ratio: int(2),
        }
    }

    pub fn bw_intertwined(n: usize) -> Self {
        FamilySpec::BwIntertwined { n }
    }

    pub fn random_subset(parent: FiniteSet, density: f64, seed: u64) -> Self {
        FamilySpec::RandomSubset { parent, density, seed }
    }

    pub fn random_sized(parent: FiniteSet, size: usize, seed: u64) -> Self {
        FamilySpec::RandomSized { parent, size, seed }
    }

    pub fn mult_subgroup(p: u64, order: u64) -> Self {
        FamilySpec::MultSubgroup { p, order }
    }

    /// Generates over the rationals (progressions and Balog–Wooley sets) or
    /// the parent's / subgroup's own field.
    pub fn generate(&self) -> Result<FiniteSet> {
        self.generate_in(GroundField::char0())
    }

    /// Generates with progressions mapped into `field`.
    pub fn generate_in(&self, field: GroundField) -> Result<FiniteSet> {
        match self {
            FamilySpec::Ap { start, step, n } => {
                let start = field.rational(start)?;
                let step = field.rational(step)?;
                let mut v = Vec::with_capacity(*n);
                let mut x = start;
                for _ in 0..*n {
                    v.push(x.clone());
                    x = &x + &step;
                }
                FiniteSet::new_distinct(field, v)
            }
            FamilySpec::Gp { start, ratio, n } => {
                let start = field.rational(start)?;
                let ratio = field.rational(ratio)?;
                if start.is_zero() || ratio.is_zero() {
                    return Err(Error::Collision("geometric progression through zero".into()));
                }
                let mut v = Vec::with_capacity(*n);
                let mut x = start;
                for _ in 0..*n {
                    v.push(x.clone());
                    x = &x * &ratio;
                }
                FiniteSet::new_distinct(field, v)
            }
            FamilySpec::BwUnion { n, gp_start, gp_ratio } => {
                let ap = FamilySpec::ap(1, 1, *n).generate_in(field)?;
                let gp = FamilySpec::Gp {
                    start: gp_start.clone(),
                    ratio: gp_ratio.clone(),
                    n: *n,
                }
                .generate_in(field)?;
                if !ap.is_disjoint(&gp) {
                    return Err(Error::Collision(format!(
                        "arithmetic and geometric parts of bw_union({n}) intersect"
                    )));
                }
                ap.union(&gp)
            }
            FamilySpec::BwIntertwined { n } => {
                let n = *n as i64;
                let mut v = Vec::new();
                for i in 0..n {
                    let dil = 1i64
                        .checked_shl(i as u32)
                        .filter(|_| i < 62)
                        .ok_or_else(|| Error::OutOfRange(format!("bw_intertwined({n}) too large")))?;
                    for x in n * n..2 * n * n {
                        v.push(field.rational(&(int(x) * int(dil)))?);
                    }
                }
                FiniteSet::new_distinct(field, v)
            }
            FamilySpec::RandomSubset { parent, density, seed } => {
                if !(0.0..=1.0).contains(density) {
                    return Err(Error::OutOfRange(format!("density {density} not in [0, 1]")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(parent.filter_indexed(|_, _| rng.gen_bool(*density)))
            }
            FamilySpec::RandomSized { parent, size, seed } => {
                if *size > parent.len() {
                    return Err(Error::OutOfRange(format!(
                        "cannot sample {size} of {} elements",
                        parent.len()
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut idx: Vec<usize> = (0..parent.len()).collect();
                idx.shuffle(&mut rng);
                let keep: std::collections::HashSet<usize> = idx.into_iter().take(*size).collect();
                Ok(parent.filter_indexed(|i, _| keep.contains(&i)))
            }
            FamilySpec::MultSubgroup { p, order } => mult_subgroup(*p, *order),
        }
    }
}

/// `F_p*` minus nothing: the nonzero residues `{1, …, p − 1}`.
pub fn nonzero_residues(field: GroundField) -> Result<FiniteSet> {
    let p = field
        .modulus()
        .ok_or_else(|| Error::Precondition("nonzero_residues needs a prime field".into()))?;
    FiniteSet::new(field, (1..p).map(|v| field.residue(v)))
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime field has a primitive root")
}

fn mult_subgroup(p: u64, order: u64) -> Result<FiniteSet> {
    let field = GroundField::prime(p)?;
    if order == 0 || (p - 1) % order != 0 {
        return Err(Error::InvalidSubgroupOrder { p, order });
    }
    let h = pow_mod(primitive_root(p), (p - 1) / order, p);
    let mut v = Vec::with_capacity(order as usize);
    let mut x = 1;
    for _ in 0..order {
        v.push(field.residue(x));
        x = x * h % p;
    }
    FiniteSet::new_distinct(field, v)
}
