//! A constructive Balog–Szemerédi–Gowers extractor with explicit constants.
//!
//! With `E(A) = |A|³/K` and `ε = 1/(4k)`, it finds `A_* ⊆ A` and a symmetric
//! `P` of popular differences (ratios) such that `|A_*| ≥ |A|/(8kK)`,
//! `|P| ≤ 8kK|A|`, and every `k`-tuple from `A_*` has at least `|A|/(4K)`
//! common neighbours `x ∈ A` with `x − aᵢ ∈ P` (or `x/aᵢ ∈ P`).

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{self_energy, EnergyLaw, EnergyValue};
use crate::error::{Error, Result};
use crate::field::{rat_int, ser_rational, FieldElem};
use crate::kernel::pair_classes;
use crate::precise::{precision_digits, BoundRatio, PowerProduct};
use crate::set::{FiniteSet, Law};

#[derive(Clone, Debug, Serialize)]
pub struct BsgCertificate {
    pub law: EnergyLaw,
    pub k: u32,
    pub source_size: usize,
    pub energy: EnergyValue,
    /// `|A|³/E(A)`.
    #[serde(rename = "K", serialize_with = "ser_rational")]
    pub big_k: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: BigRational,
    pub s_witness: FieldElem,
    /// `A ∩ (A − s)` or `A ∩ (A/s)`: the vertex set of the graph.
    pub a_s: FiniteSet,
    pub a_star: FiniteSet,
    pub p: FiniteSet,
    /// Ordered pairs `(x, y) ∈ A_s²`, loops included, with `x − y ∈ P`.
    pub edge_count: u64,
    /// `|A_*| ≥ |A|/(8kK)`.
    pub star_bound: bool,
    /// `|P| ≤ 8kK|A|`.
    pub p_bound: bool,
    /// `|edges| > (1 − ε)|A_s|²`.
    pub edge_bound: bool,
    pub p_symmetric: bool,
}

impl BsgCertificate {
    pub fn constants_hold(&self) -> bool {
        self.star_bound && self.p_bound && self.edge_bound && self.p_symmetric
    }

    /// The intersection bound `|A|/(4K)`.
    pub fn intersection_bound(&self) -> BigRational {
        let n = rat_int(self.source_size as u64);
        n / (rat_int(4u8) * &self.big_k)
    }
}

fn pair_law(law: EnergyLaw) -> Law {
    match law {
        EnergyLaw::Add => Law::Sub,
        EnergyLaw::Mul => Law::Div,
    }
}

/// Scans `s` in canonical order for the first witness whose graph has more
/// than `(1 − ε)|A_s|²` edges, then keeps its high-degree vertices.
pub fn bsg_extract(a: &FiniteSet, k: u32, law: EnergyLaw) -> Result<BsgCertificate> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    if law == EnergyLaw::Mul && !a.excludes_zero() {
        return Err(Error::ZeroElement("multiplicative BSG"));
    }
    // id(i, j) labels aᵢ − aⱼ (or aᵢ/aⱼ); |A_s| = r(s) and A_s = {aⱼ : aᵢ ∘ aⱼ⁻¹ = s}.
    let c = pair_classes(a, a, pair_law(law))?;
    let e: u128 = c.counts.iter().map(|&r| r as u128 * r as u128).sum();
    let (nn, kk) = (n as u128, k as u128);
    // ε|A|/(2K) ≤ |A_s|  ⇔  8k|A|²|A_s| ≥ E
    let in_p: Vec<bool> = c.counts.iter().map(|&r| 8 * kk * nn * nn * r as u128 >= e).collect();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); c.values.len()];
    for i in 0..n {
        for j in 0..n {
            members[c.id(i, j) as usize].push(j);
        }
    }
    let adjacent = |x: usize, y: usize| in_p[c.id(x, y) as usize];

    let mut found = None;
    for (sid, &r) in c.counts.iter().enumerate() {
        // |A_s| ≥ |A|/(2K)  ⇔  2|A|²|A_s| ≥ E
        if 2 * nn * nn * (r as u128) < e {
            continue;
        }
        let v = &members[sid];
        let edges: u64 = v
            .par_iter()
            .map(|&x| v.iter().filter(|&&y| adjacent(x, y)).count() as u64)
            .sum();
        let vv = v.len() as u128;
        // edges > (1 − 1/(4k))|V|²
        if 4 * kk * edges as u128 > (4 * kk - 1) * vv * vv {
            found = Some((sid, edges));
            break;
        }
    }
    let Some((sid, edge_count)) = found else {
        return Err(Error::InvariantBreach("no translate satisfies the edge inequality".into()));
    };
    let v = &members[sid];
    let vv = v.len() as u128;
    // deg ≥ (1 − 2ε)|V|  ⇔  2k·deg ≥ (2k − 1)|V|
    let star: Vec<usize> = v
        .iter()
        .copied()
        .filter(|&x| {
            let deg = v.iter().filter(|&&y| adjacent(x, y)).count() as u128;
            2 * kk * deg >= (2 * kk - 1) * vv
        })
        .collect();

    let field = a.field();
    let pick = |idx: &[usize]| FiniteSet::from_sorted_unchecked(field, idx.iter().map(|&i| a.elems()[i].clone()).collect());
    let p = FiniteSet::from_sorted_unchecked(
        field,
        (0..c.values.len()).filter(|&i| in_p[i]).map(|i| c.values[i].clone()).collect(),
    );
    let mirrored = match law {
        EnergyLaw::Add => p.negate(),
        EnergyLaw::Mul => p.reciprocal()?,
    };
    let a_star = pick(&star);
    let np = p.len() as u128;
    Ok(BsgCertificate {
        law,
        k,
        source_size: n,
        energy: EnergyValue(e),
        big_k: BigRational::new(BigInt::from(nn.pow(3)), BigInt::from(e)),
        epsilon: BigRational::new(1.into(), BigInt::from(4 * k)),
        s_witness: c.values[sid].clone(),
        a_s: pick(v),
        // |A_*| ≥ |A|/(8kK)  ⇔  8k|A|²|A_*| ≥ E
        star_bound: 8 * kk * nn * nn * a_star.len() as u128 >= e,
        // |P| ≤ 8kK|A|  ⇔  |P|·E ≤ 8k|A|⁴
        p_bound: np * e <= 8 * kk * nn.pow(4),
        edge_bound: 4 * kk * edge_count as u128 > (4 * kk - 1) * vv * vv,
        p_symmetric: mirrored == p,
        a_star,
        p,
        edge_count,
    })
}

/// How many `k`-tuples [`verify_bsg`] checks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Every multiset of size `k` from `A_*`.
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

/// Exhaustive when `|A_*|^k` is at most this, sampled otherwise.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

impl VerifyMode {
    pub fn auto(cert: &BsgCertificate, trials: u64, seed: u64) -> Self {
        let m = cert.a_star.len() as u128;
        if m.checked_pow(cert.k).is_some_and(|w| w <= EXHAUSTIVE_LIMIT) {
            VerifyMode::Exhaustive
        } else {
            VerifyMode::Sampled { trials, seed }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BsgVerification {
    pub mode: VerifyMode,
    pub checked_tuples: u64,
    pub min_intersection: usize,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<FieldElem>>,
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

fn and_count(sets: &[&Bits]) -> usize {
    (0..sets[0].0.len())
        .map(|w| sets.iter().fold(u64::MAX, |acc, s| acc & s.0[w]).count_ones() as usize)
        .sum()
}

/// Checks `|A ∩ (P + a₁) ∩ … ∩ (P + a_k)| ≥ |A|/(4K)` on tuples from `A_*`.
/// Neighbourhoods are recomputed from `P` by field arithmetic.
pub fn verify_bsg(cert: &BsgCertificate, a: &FiniteSet, mode: VerifyMode) -> Result<BsgVerification> {
    if a.len() != cert.source_size || !cert.a_star.is_subset(a) {
        return Err(Error::Precondition("certificate was produced from a different set".into()));
    }
    let n = a.len();
    let nbhd: Vec<Bits> = cert
        .a_star
        .iter()
        .map(|s| {
            let mut b = Bits::new(n);
            for (i, x) in a.iter().enumerate() {
                let d = match cert.law {
                    EnergyLaw::Add => x - s,
                    EnergyLaw::Mul => x / s,
                };
                if cert.p.contains(&d) {
                    b.set(i);
                }
            }
            b
        })
        .collect();
    let m = nbhd.len();
    let k = cert.k as usize;
    let tuples: Vec<Vec<usize>> = match mode {
        VerifyMode::Exhaustive => multisets(m, k),
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials)
                .map(|_| (0..k).map(|_| rng.gen_range(0..m)).collect())
                .collect()
        }
    };
    let bound = cert.intersection_bound();
    let (min, worst) = tuples
        .par_iter()
        .map(|t| {
            let sets: Vec<&Bits> = t.iter().map(|&i| &nbhd[i]).collect();
            (and_count(&sets), t)
        })
        .min_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(y.1)))
        .map(|(c, t)| (c, Some(t.clone())))
        .unwrap_or((usize::MAX, None));
    let pass = tuples.is_empty() || rat_int(min as u64) >= bound;
    Ok(BsgVerification {
        mode,
        checked_tuples: tuples.len() as u64,
        min_intersection: if tuples.is_empty() { 0 } else { min },
        bound,
        pass,
        counterexample: if pass {
            None
        } else {
            worst.map(|t| t.iter().map(|&i| cert.a_star.elems()[i].clone()).collect())
        },
    })
}

/// Nondecreasing index tuples of length `k` over `0..m`.
fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&i| cur[i] + 1 < m) else {
            return out;
        };
        let v = cur[pos] + 1;
        for c in cur.iter_mut().skip(pos) {
            *c = v;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpEnergyReport {
    pub certificate: BsgCertificate,
    pub a1: FiniteSet,
    pub add_energy_a1: EnergyValue,
    /// `|A1|` against `E^×(A)/|A|²`.
    pub size_ratio: BoundRatio,
    /// `E⁺(A1)²E^×(A)⁹ / |A|³²`.
    pub ratio: BoundRatio,
}

/// Multiplicative extraction with `k = 2`, reporting the additive energy
/// of `A1 = A_*`.
pub fn sp_energy_pipeline(a: &FiniteSet) -> Result<SpEnergyReport> {
    if !a.field().is_char0() {
        return Err(Error::Precondition("this pipeline is only available over the rationals".into()));
    }
    let cert = bsg_extract(a, 2, EnergyLaw::Mul)?;
    let a1 = cert.a_star.clone();
    let n = rat_int(a.len() as u64);
    let e = cert.energy.to_rational();
    let e1 = self_energy(&a1, EnergyLaw::Add)?;
    let size_ratio = BoundRatio::of_int(
        "|A1| / E×(A)|A|^{-2}",
        a1.len() as u128,
        PowerProduct::new().pow(e.clone(), 1, 1).pow(n.clone(), -2, 1),
    )?;
    let ratio = BoundRatio::new(
        "E+(A1)^2 E×(A)^9 / |A|^32",
        PowerProduct::new().pow(e1.to_rational(), 2, 1).pow(e, 9, 1),
        PowerProduct::new().pow(n, 32, 1),
        precision_digits(),
    )?;
    Ok(SpEnergyReport {
        certificate: cert,
        a1,
        add_energy_a1: e1,
        size_ratio,
        ratio,
    })
}
