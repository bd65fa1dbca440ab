//! Growth of `(ab − c)/(a − d)` over prime fields: exact representation
//! counts, range sizes, and energies over all dilates and translates.
//!
//! Everything here works on residues directly with dense tables of size `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::balanced_decompose;
use crate::energy::EnergyValue;
use crate::error::{Error, Result};
use crate::field::{inv_mod, mul_mod, rat_int, ratio, ser_rational, FieldKind};
use crate::precise::{precision_digits, sig6, BoundRatio, Decimal, PowerProduct};
use crate::set::FiniteSet;

fn residues(a: &FiniteSet) -> Result<(u64, Vec<u64>)> {
    match a.field().kind() {
        FieldKind::Prime(p) => Ok((p, a.iter().map(|x| x.as_residue().unwrap()).collect())),
        FieldKind::Char0 => Err(Error::Precondition("a prime field is required".into())),
    }
}

fn same_prime(b: &FiniteSet, c: &FiniteSet) -> Result<(u64, Vec<u64>, Vec<u64>)> {
    if b.field() != c.field() {
        return Err(Error::FieldMismatch(b.field(), c.field()));
    }
    let (p, bs) = residues(b)?;
    let (_, cs) = residues(c)?;
    Ok((p, bs, cs))
}

/// Which of the two expressions `(ab − c)/(a − d)` or `(ab + c)/(a + d)`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HadSign {
    #[default]
    Minus,
    Plus,
}

/// `N(x)` for every `x ∈ 𝔽p`.
#[derive(Clone, Debug, Serialize)]
pub struct HadCounts {
    pub p: u64,
    pub sign: HadSign,
    pub b_size: usize,
    pub c_size: usize,
    #[serde(skip)]
    pub counts: Vec<u64>,
    /// Quadruples with a vanishing denominator.
    pub excluded: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionCount {
    /// `Σ_{x≠0} N(x)²`.
    pub e_cal: u128,
    /// `N(0)²`.
    pub zero_term: u128,
}

impl HadCounts {
    pub fn get(&self, x: u64) -> u64 {
        self.counts[x as usize]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    pub fn support_len(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Nonzero `(x, N(x))` in increasing `x`.
    pub fn entries(&self) -> Vec<(u64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (x as u64, c))
            .collect()
    }

    pub fn solution_count(&self) -> SolutionCount {
        let sq = |c: u64| c as u128 * c as u128;
        SolutionCount {
            e_cal: self.counts.iter().skip(1).map(|&c| sq(c)).sum(),
            zero_term: sq(self.counts[0]),
        }
    }
}

/// Counts `x = (ab − c)/(a − d)` over `a, b ∈ B` and `c, d ∈ C`.
pub fn had_representation_counts(b: &FiniteSet, c: &FiniteSet) -> Result<HadCounts> {
    had_representation_counts_signed(b, c, HadSign::Minus)
}

pub fn had_representation_counts_signed(b: &FiniteSet, c: &FiniteSet, sign: HadSign) -> Result<HadCounts> {
    let (p, bs, cs) = same_prime(b, c)?;
    let (counts, excluded) = bs
        .par_iter()
        .fold(
            || (vec![0u64; p as usize], 0u64),
            |(mut t, mut ex), &a| {
                for &d in &cs {
                    let den = match sign {
                        HadSign::Minus => (a + p - d) % p,
                        HadSign::Plus => (a + d) % p,
                    };
                    if den == 0 {
                        ex += (bs.len() * cs.len()) as u64;
                        continue;
                    }
                    let inv = inv_mod(den, p);
                    for &bb in &bs {
                        let ab = mul_mod(a, bb, p);
                        for &cc in &cs {
                            let num = match sign {
                                HadSign::Minus => (ab + p - cc) % p,
                                HadSign::Plus => (ab + cc) % p,
                            };
                            t[mul_mod(num, inv, p) as usize] += 1;
                        }
                    }
                }
                (t, ex)
            },
        )
        .reduce(
            || (vec![0u64; p as usize], 0u64),
            |(mut t, ex), (u, ey)| {
                t.iter_mut().zip(&u).for_each(|(x, y)| *x += y);
                (t, ex + ey)
            },
        );
    Ok(HadCounts {
        p,
        sign,
        b_size: b.len(),
        c_size: c.len(),
        counts,
        excluded,
    })
}

pub fn had_solution_count(b: &FiniteSet, c: &FiniteSet) -> Result<SolutionCount> {
    Ok(had_representation_counts(b, c)?.solution_count())
}

#[derive(Copy, Clone, Debug, Serialize)]
pub struct RangeReport {
    pub p: u64,
    pub size: usize,
    pub q: usize,
    /// `Q/p` to six significant digits.
    pub coverage: f64,
}

/// `Q = |{(ab − c)/(a − d) : a, b, c, d ∈ A, a ≠ d}|`.
pub fn range_set(a: &FiniteSet) -> Result<RangeReport> {
    let (p, xs) = residues(a)?;
    if xs.len() < 2 {
        return Err(Error::TooSmall { needed: 2, got: xs.len() });
    }
    let mut seen = vec![false; p as usize];
    let mut q = 0usize;
    'outer: for &x in &xs {
        for &d in &xs {
            if x == d {
                continue;
            }
            let inv = inv_mod((x + p - d) % p, p);
            for &y in &xs {
                let ab = mul_mod(x, y, p);
                for &c in &xs {
                    let v = mul_mod((ab + p - c) % p, inv, p) as usize;
                    if !seen[v] {
                        seen[v] = true;
                        q += 1;
                        if q as u64 == p {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Ok(RangeReport {
        p,
        size: xs.len(),
        q,
        coverage: sig6(q as f64 / p as f64),
    })
}

/// `E⁺(A, xA)` or `E^×(A, x + A)` as `x` runs over `𝔽p*`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilateLaw {
    AddDilate,
    MulTranslate,
}

/// `E(X, Y) = Σ r²` over residues, using (and restoring) a zeroed scratch table.
fn residue_energy(xs: &[u64], ys: &[u64], add: bool, p: u64, scratch: &mut [u32]) -> u128 {
    let op = |x: u64, y: u64| if add { (x + y) % p } else { mul_mod(x, y, p) } as usize;
    let mut e = 0u128;
    for &x in xs {
        for &y in ys {
            let s = &mut scratch[op(x, y)];
            // (r+1)² − r² = 2r + 1
            e += 2 * *s as u128 + 1;
            *s += 1;
        }
    }
    for &x in xs {
        for &y in ys {
            scratch[op(x, y)] = 0;
        }
    }
    e
}

#[derive(Clone, Debug, Serialize)]
pub struct DilateEnergies {
    pub p: u64,
    pub law: DilateLaw,
    pub size: usize,
    /// `E⁺(A)` for dilates, `E^×(A)` for translates.
    pub energy: EnergyValue,
    /// Entry `x − 1` holds the energy for `x`.
    #[serde(skip)]
    pub per_x: Vec<u128>,
    pub total: u128,
    /// `total / |A|⁴`.
    pub total_ratio: f64,
}

/// All `p − 1` energies, checking the floor `p·E ≥ |A|⁴` for each.
pub fn energy_over_dilates(a: &FiniteSet, law: DilateLaw) -> Result<DilateEnergies> {
    let (p, xs) = residues(a)?;
    if !a.excludes_zero() {
        return Err(Error::ZeroElement("energies over dilates"));
    }
    let add = law == DilateLaw::AddDilate;
    let per_x: Vec<u128> = (1..p)
        .into_par_iter()
        .map_init(
            || vec![0u32; p as usize],
            |scratch, x| {
                let ys: Vec<u64> = match law {
                    DilateLaw::AddDilate => xs.iter().map(|&a| mul_mod(a, x, p)).collect(),
                    DilateLaw::MulTranslate => xs.iter().map(|&a| (a + x) % p).collect(),
                };
                residue_energy(&xs, &ys, add, p, scratch)
            },
        )
        .collect();
    let n4 = (xs.len() as u128).pow(4);
    if let Some(i) = per_x.iter().position(|&e| p as u128 * e < n4) {
        return Err(Error::InvariantBreach(format!(
            "energy {} at x = {} is below |A|^4/p",
            per_x[i],
            i + 1
        )));
    }
    let mut scratch = vec![0u32; p as usize];
    let energy = residue_energy(&xs, &xs, add, p, &mut scratch);
    let total: u128 = per_x.iter().sum();
    Ok(DilateEnergies {
        p,
        law,
        size: xs.len(),
        energy: EnergyValue(energy),
        total_ratio: sig6(total as f64 / n4 as f64),
        per_x,
        total,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    #[serde(serialize_with = "ser_rational")]
    pub s: BigRational,
    /// `Σ_{x≠0} (E_x − |A|⁴/p)^{1+s}`.
    pub lhs: Decimal,
    /// `p^{1−s/3} E^{2s/3} |A|^{2+4s/3}`.
    pub rhs: Decimal,
    pub ratio: f64,
    /// `p^{1/2} < |A| ≤ p^{2/3}`.
    pub in_range: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RichReport {
    #[serde(rename = "K", serialize_with = "ser_rational")]
    pub k: BigRational,
    pub x: Vec<u64>,
    /// `|X|` against `K⁴|A|⁶/E²`.
    pub bound: BoundRatio,
}

/// Dyadic levels `X_i = {x : 2^i E/M < E_x ≤ 2^{i+1} E/M}` with
/// `M³ = pE/(8|A|⁴)`; the top level is unbounded above.
#[derive(Clone, Debug, Serialize)]
pub struct Ladder {
    #[serde(serialize_with = "ser_rational")]
    pub m_cubed: BigRational,
    pub levels: Vec<usize>,
    /// `|{x : E_x ≤ E/M}|`.
    pub small: usize,
    pub partition_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialReport {
    pub x_size: usize,
    pub sum: u128,
    /// `Σ_X E_x` against `E^{1/2}|A|^{3/2}|X|^{3/4}`.
    pub bound_inccount: Option<BoundRatio>,
    /// `Σ_X E_x` against `|A|^{13/4}|X|^{1/2}`.
    pub bound_remark: Option<BoundRatio>,
    /// `|X| ≤ |A|²`.
    pub x_small: bool,
    /// `|A|²|X| ≤ p²`.
    pub x_vs_p: bool,
    /// `Σ_X (E_x − |A|⁴/p)`.
    #[serde(serialize_with = "ser_rational")]
    pub excess: BigRational,
    /// `excess ≤ p|A|²`.
    pub bkt_ok: bool,
}

impl DilateEnergies {
    pub fn get(&self, x: u64) -> u128 {
        self.per_x[(x - 1) as usize]
    }

    fn n(&self) -> BigRational {
        rat_int(self.size as u64)
    }

    /// `p^{1/2} < |A| ≤ p^{2/3}`.
    pub fn in_moment_range(&self) -> bool {
        let (n, p) = (self.size as u128, self.p as u128);
        n * n > p && n.pow(3) <= p * p
    }

    pub fn moment(&self, s: &BigRational) -> Result<MomentReport> {
        if *s <= BigRational::zero() || *s >= rat_int(3) {
            return Err(Error::OutOfRange(format!("s = {s} must lie in (0, 3)")));
        }
        let digits = precision_digits();
        let p = rat_int(self.p);
        let floor = self.n().pow(4) / &p;
        let exp = s + BigRational::one();
        let terms: Vec<Decimal> = self
            .per_x
            .par_iter()
            .map(|&e| PowerProduct::new().pow_q(rat_int(e) - &floor, exp.clone()).eval(digits))
            .collect::<Result<_>>()?;
        let lhs = terms.iter().fold(Decimal::zero(digits), |acc, t| acc.add(t));
        let third = BigRational::new(1.into(), 3.into());
        let rhs_pp = PowerProduct::new()
            .pow_q(p, BigRational::one() - s * &third)
            .pow_q(self.energy.to_rational(), s * &third * rat_int(2))
            .pow_q(self.n(), rat_int(2) + s * &third * rat_int(4));
        let rhs = rhs_pp.eval(digits)?;
        let ratio = if rhs.scaled().is_zero() {
            f64::INFINITY
        } else {
            sig6(
                BigRational::new(
                    BigInt::from(lhs.scaled().clone()),
                    BigInt::from(rhs.scaled().clone()),
                )
                .to_f64_lossy(),
            )
        };
        Ok(MomentReport {
            s: s.clone(),
            lhs,
            rhs,
            ratio,
            in_range: self.in_moment_range(),
        })
    }

    /// Largest admissible `K`: `pE/(2|A|⁴)`.
    pub fn max_k(&self) -> BigRational {
        rat_int(self.p) * self.energy.to_rational() / (rat_int(2) * self.n().pow(4))
    }

    /// `X = {x : E_x > E/K}` for `1 ≤ K ≤ pE/(2|A|⁴)`.
    pub fn rich(&self, k: &BigRational) -> Result<RichReport> {
        if (self.size as u128).pow(2) <= self.p as u128 {
            return Err(Error::Precondition("rich dilates need |A| > p^{1/2}".into()));
        }
        if *k < BigRational::one() || *k > self.max_k() {
            return Err(Error::OutOfRange(format!("K = {k} must lie in [1, {}]", self.max_k())));
        }
        let e = self.energy.to_rational();
        let x: Vec<u64> = (1..self.p).filter(|&x| rat_int(self.get(x)) * k > e).collect();
        let bound = BoundRatio::of_int(
            "|X| / K^4 |A|^6 E^-2",
            x.len() as u128,
            PowerProduct::new().pow_q(k.clone(), rat_int(4)).pow(self.n(), 6, 1).pow(e, -2, 1),
        )?;
        Ok(RichReport { k: k.clone(), x, bound })
    }

    pub fn ladder(&self) -> Ladder {
        let n4 = BigInt::from(self.size).pow(4u32);
        let e = BigInt::from(self.energy.get());
        let p = BigInt::from(self.p);
        let m_cubed = BigRational::new(&p * &e, BigInt::from(8) * &n4);
        // 8^i < M³  ⇔  8^{i+1}·|A|⁴ < pE
        let mut top = 0usize;
        while BigInt::from(8).pow(top as u32 + 2) * &n4 < &p * &e {
            top += 1;
        }
        // E_x > 2^i E/M  ⇔  E_x³·p > 8^{i+1}·|A|⁴·E²
        let e2n4 = &e * &e * &n4;
        let above = |ex: u128, i: usize| BigInt::from(ex).pow(3u32) * &p > BigInt::from(8).pow(i as u32 + 1) * &e2n4;
        let mut levels = vec![0usize; top + 1];
        let mut small = 0usize;
        for &ex in &self.per_x {
            match (0..=top).rev().find(|&i| above(ex, i)) {
                Some(i) => levels[i] += 1,
                None => small += 1,
            }
        }
        let partition_ok = levels.iter().sum::<usize>() + small == (self.p - 1) as usize;
        Ladder {
            m_cubed,
            levels,
            small,
            partition_ok,
        }
    }

    pub fn partial(&self, x: &[u64]) -> Result<PartialReport> {
        if let Some(&bad) = x.iter().find(|&&v| v == 0 || v >= self.p) {
            return Err(Error::OutOfRange(format!("{bad} is not in F_p*")));
        }
        let mut xs = x.to_vec();
        xs.sort_unstable();
        xs.dedup();
        let m = xs.len() as u128;
        let sum: u128 = xs.iter().map(|&v| self.get(v)).sum();
        let (n, p) = (self.size as u128, self.p as u128);
        let n4 = n.pow(4);
        let excess_num: BigInt = xs.iter().map(|&v| BigInt::from(p * self.get(v)) - BigInt::from(n4)).sum();
        let excess = BigRational::new(excess_num, BigInt::from(p));
        let bkt_ok = excess <= rat_int(p * n * n);
        let (bound_inccount, bound_remark) = if xs.is_empty() {
            (None, None)
        } else {
            let mm = rat_int(m);
            (
                Some(BoundRatio::of_int(
                    "sum / E^{1/2}|A|^{3/2}|X|^{3/4}",
                    sum,
                    PowerProduct::new()
                        .pow(self.energy.to_rational(), 1, 2)
                        .pow(self.n(), 3, 2)
                        .pow(mm.clone(), 3, 4),
                )?),
                Some(BoundRatio::of_int(
                    "sum / |A|^{13/4}|X|^{1/2}",
                    sum,
                    PowerProduct::new().pow(self.n(), 13, 4).pow(mm, 1, 2),
                )?),
            )
        };
        Ok(PartialReport {
            x_size: xs.len(),
            sum,
            bound_inccount,
            bound_remark,
            x_small: m <= n * n,
            x_vs_p: n * n * m <= p * p,
            excess,
            bkt_ok,
        })
    }
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
}

pub fn moment_sum(a: &FiniteSet, s: &BigRational, law: DilateLaw) -> Result<MomentReport> {
    energy_over_dilates(a, law)?.moment(s)
}

pub fn rich_dilate_count(a: &FiniteSet, k: &BigRational, law: DilateLaw) -> Result<RichReport> {
    energy_over_dilates(a, law)?.rich(k)
}

pub fn partial_energy_sum(a: &FiniteSet, x: &[u64], law: DilateLaw) -> Result<PartialReport> {
    energy_over_dilates(a, law)?.partial(x)
}

/// The `s` values matching the Hölder exponents `5/3` and `5/2`.
pub fn default_moments() -> [BigRational; 2] {
    [ratio(2, 3), ratio(3, 2)]
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub p: u64,
    pub sign: HadSign,
    pub source_size: usize,
    /// The canonical prefix actually used, with `|A|⁵ ≤ p³`.
    pub a: FiniteSet,
    /// Part with small multiplicative energy.
    pub b: FiniteSet,
    /// Part with small additive energy.
    pub c: FiniteSet,
    pub n_table: Vec<(u64, u64)>,
    pub excluded: u64,
    /// `Σ N(x) = |B|²|C|²`.
    pub mass_ok: bool,
    pub q_bc: usize,
    pub range: RangeReport,
    pub solutions: SolutionCount,
    /// `Q·(ℰ + N(0)²) ≥ |B|⁴|C|⁴`.
    pub cs_ok: bool,
    /// `Σ_{x≠0} E^×(B, x+B)·E⁺(C, xC)`.
    pub int_rhs: u128,
    pub int_ok: bool,
    /// `ℰ·p/|A|⁸`.
    pub e_cal_normalized: f64,
    /// `|A|⁸/p`.
    pub almost_first: Decimal,
    /// `p^{2/3}|A|^{10/3}[E⁺(C)E^×(B)^{3/2}]^{4/15}`.
    pub almost_second: Decimal,
    pub ladder_b: Ladder,
    pub ladder_c: Ladder,
    pub warnings: Vec<String>,
}

impl GrowthReport {
    /// The exact identities every run must satisfy.
    pub fn identities_hold(&self) -> bool {
        self.mass_ok && self.cs_ok && self.ladder_b.partition_ok && self.ladder_c.partition_ok
    }
}

/// Largest `n` with `n⁵ ≤ p³`.
pub fn growth_prefix_len(p: u64) -> usize {
    let p3 = (p as u128).pow(3);
    let mut n = 0usize;
    while ((n + 1) as u128).pow(5) <= p3 {
        n += 1;
    }
    n
}

/// Decomposes a canonical prefix of `A`, then counts `(ab ∓ c)/(a ∓ d)` on the parts.
pub fn had_pipeline(a: &FiniteSet, sign: HadSign) -> Result<GrowthReport> {
    let (p, _) = residues(a)?;
    let source_size = a.len();
    let mut warnings = Vec::new();
    let keep = growth_prefix_len(p).min(a.len());
    if keep < a.len() {
        warnings.push(format!("truncated |A| = {} to its first {keep} elements so that |A|^5 ≤ p^3", a.len()));
    }
    let a = a.prefix(keep);
    let n = a.len();
    if (n as u128).pow(2) <= p as u128 {
        warnings.push(format!("|A| = {n} is not above p^(1/2)"));
    }
    let split = balanced_decompose(&a)?;
    let (b, c) = (split.c.clone(), split.b.clone());
    let counts = had_representation_counts_signed(&b, &c, sign)?;
    let (nb, nc) = (b.len() as u128, c.len() as u128);
    let mass_ok = counts.total() + counts.excluded as u128 == nb * nb * nc * nc
        && (!b.is_disjoint(&c) || counts.excluded == 0);
    let solutions = counts.solution_count();
    let range = range_set(&a)?;
    let cs_lhs = BigInt::from(range.q) * BigInt::from(solutions.e_cal + solutions.zero_term);
    let cs_ok = cs_lhs >= BigInt::from(nb * nc).pow(4u32);

    let db = energy_over_dilates(&b, DilateLaw::MulTranslate)?;
    let dc = energy_over_dilates(&c, DilateLaw::AddDilate)?;
    let int_rhs: u128 = db.per_x.iter().zip(&dc.per_x).map(|(x, y)| x * y).sum();
    let int_ok = sign == HadSign::Plus || solutions.e_cal <= int_rhs;

    let digits = precision_digits();
    let nn = rat_int(n as u64);
    let almost_first = PowerProduct::new().pow(nn.clone(), 8, 1).pow(rat_int(p), -1, 1).eval(digits)?;
    let almost_second = PowerProduct::new()
        .pow(rat_int(p), 2, 3)
        .pow(nn.clone(), 10, 3)
        .pow(dc.energy.to_rational(), 4, 15)
        .pow(db.energy.to_rational(), 2, 5)
        .eval(digits)?;
    let normalized = BigRational::new(
        BigInt::from(solutions.e_cal) * BigInt::from(p),
        BigInt::from(n).pow(8u32),
    );
    Ok(GrowthReport {
        p,
        sign,
        source_size,
        n_table: counts.entries(),
        excluded: counts.excluded,
        mass_ok,
        q_bc: counts.support_len(),
        range,
        solutions,
        cs_ok,
        int_rhs,
        int_ok,
        e_cal_normalized: sig6(normalized.to_f64_lossy()),
        almost_first,
        almost_second,
        ladder_b: db.ladder(),
        ladder_c: dc.ladder(),
        warnings,
        a,
        b,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{energy, self_energy, EnergyLaw};
    use crate::family::{nonzero_residues, FamilySpec};
    use crate::field::GroundField;

    fn fp(p: u64, v: &[i64]) -> FiniteSet {
        FiniteSet::from_ints(GroundField::prime(p).unwrap(), v).unwrap()
    }

    /// Direct enumeration of `(ab − c)(a' − d') = (a'b' − c')(a − d)` octuples.
    fn octuples(b: &[u64], c: &[u64], p: u64) -> (u128, u128) {
        let mut quads = Vec::new();
        for &a in b {
            for &bb in b {
                for &cc in c {
                    for &d in c {
                        if a != d {
                            quads.push(((a * bb + p * p - cc) % p, (a + p - d) % p));
                        }
                    }
                }
            }
        }
        let (mut all, mut zero) = (0u128, 0u128);
        for &(n1, d1) in &quads {
            for &(n2, d2) in &quads {
                if n1 * d2 % p == n2 * d1 % p {
                    all += 1;
                    if n1 == 0 {
                        zero += 1;
                    }
                }
            }
        }
        (all - zero, zero)
    }

    #[test]
    fn small_table_matches_enumeration() {
        let (b, c) = (fp(7, &[1, 2]), fp(7, &[3, 5]));
        let h = had_representation_counts(&b, &c).unwrap();
        assert_eq!(h.total(), 16);
        assert_eq!(h.excluded, 0);
        let mut direct = vec![0u64; 7];
        for a in [1u64, 2] {
            for bb in [1u64, 2] {
                for cc in [3u64, 5] {
                    for d in [3u64, 5] {
                        let x = (a * bb + 7 - cc) % 7 * inv_mod((a + 7 - d) % 7, 7) % 7;
                        direct[x as usize] += 1;
                    }
                }
            }
        }
        assert_eq!(h.counts, direct);
        let s = h.solution_count();
        assert_eq!((s.e_cal, s.zero_term), octuples(&[1, 2], &[3, 5], 7));
        let one = had_representation_counts(&fp(7, &[1]), &fp(7, &[3])).unwrap();
        assert_eq!(one.support_len(), 1);
    }

    #[test]
    fn overlapping_parts_report_exclusions() {
        let h = had_representation_counts(&fp(11, &[1, 2, 3]), &fp(11, &[3, 4])).unwrap();
        assert_eq!(h.excluded, 3 * 2);
        assert_eq!(h.total() + h.excluded as u128, 36);
        let plus = had_representation_counts_signed(&fp(11, &[1, 2]), &fp(11, &[9, 10]), HadSign::Plus).unwrap();
        assert_eq!(plus.excluded, 2 * 2 * 2);
    }

    #[test]
    fn range_of_everything() {
        let r = range_set(&nonzero_residues(GroundField::prime(7).unwrap()).unwrap()).unwrap();
        assert_eq!(r.q, 7);
        assert_eq!(r.coverage, 1.0);
        assert!(range_set(&fp(7, &[1, 2])).unwrap().q >= 1);
        assert!(range_set(&fp(7, &[1])).is_err());
    }

    #[test]
    fn dilates_small_example() {
        let a = fp(7, &[1, 2, 4]);
        let d = energy_over_dilates(&a, DilateLaw::MulTranslate).unwrap();
        assert_eq!(d.get(1), 15);
        assert_eq!(d.per_x.len(), 6);
        let add = energy_over_dilates(&a, DilateLaw::AddDilate).unwrap();
        assert_eq!(add.get(1), self_energy(&a, EnergyLaw::Add).unwrap().get());
        for x in 1..7u64 {
            let r = a.field().residue(x);
            let xa = a.iter().map(|v| v * &r);
            let xa = FiniteSet::new(a.field(), xa).unwrap();
            assert_eq!(add.get(x), energy(&a, &xa, EnergyLaw::Add).unwrap().get());
        }
    }

    #[test]
    fn dilates_larger_prime() {
        let a = FamilySpec::random_sized(nonzero_residues(GroundField::prime(101).unwrap()).unwrap(), 15, 3)
            .generate()
            .unwrap();
        for law in [DilateLaw::AddDilate, DilateLaw::MulTranslate] {
            let d = energy_over_dilates(&a, law).unwrap();
            assert!(d.total_ratio > 0.0);
            assert!(d.ladder().partition_ok);
            let all: Vec<u64> = (1..101).collect();
            assert!(d.partial(&all).unwrap().bkt_ok);
        }
    }

    #[test]
    fn moments() {
        let a = FamilySpec::mult_subgroup(101, 20).generate().unwrap();
        let d = energy_over_dilates(&a, DilateLaw::AddDilate).unwrap();
        assert!(d.in_moment_range());
        let [s1, s2] = default_moments();
        let m = d.moment(&s1).unwrap();
        assert!(m.ratio > 0.0 && m.ratio.is_finite());
        assert!(d.moment(&s2).unwrap().in_range);
        assert!(d.moment(&rat_int(3)).is_err());
        assert!(d.moment(&BigRational::zero()).is_err());
    }

    #[test]
    fn full_group_has_flat_energies() {
        let a = nonzero_residues(GroundField::prime(5).unwrap()).unwrap();
        let d = energy_over_dilates(&a, DilateLaw::AddDilate).unwrap();
        assert!(d.per_x.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn rich_dilates() {
        let a = FamilySpec::mult_subgroup(101, 20).generate().unwrap();
        // pE⁺/(2|A|⁴) < 1 here, so no K is admissible for dilates
        let add = energy_over_dilates(&a, DilateLaw::AddDilate).unwrap();
        assert!(add.max_k() < rat_int(1));
        assert!(add.rich(&rat_int(1)).is_err());
        let d = energy_over_dilates(&a, DilateLaw::MulTranslate).unwrap();
        assert_eq!(d.energy.get(), 8000);
        let r = d.rich(&rat_int(2)).unwrap();
        let e = d.energy.get();
        assert_eq!(r.x.len(), (1..101u64).filter(|&x| d.get(x) * 2 > e).count());
        let kmax = d.max_k();
        let all = d.rich(&kmax).unwrap();
        assert!(all.x.len() >= r.x.len());
        assert!(d.rich(&(kmax + rat_int(1))).is_err());
        assert!(d.rich(&BigRational::new(1.into(), 2.into())).is_err());
    }

    #[test]
    fn partial_sums() {
        let a = FamilySpec::random_sized(nonzero_residues(GroundField::prime(101).unwrap()).unwrap(), 15, 9)
            .generate()
            .unwrap();
        let d = energy_over_dilates(&a, DilateLaw::AddDilate).unwrap();
        let empty = d.partial(&[]).unwrap();
        assert_eq!(empty.sum, 0);
        assert!(empty.bound_inccount.is_none());
        assert_eq!(d.partial(&[1]).unwrap().sum, d.energy.get());
        let r = d.partial(&(1..=20).collect::<Vec<_>>()).unwrap();
        assert!(r.bkt_ok && r.x_small);
        assert!(d.partial(&[0]).is_err());
    }

    #[test]
    fn octuple_oracle_on_random_pairs() {
        for (k, p) in [7u64, 11].into_iter().enumerate() {
            let all = nonzero_residues(GroundField::prime(p).unwrap()).unwrap();
            for seed in 0..6 {
                let s = seed as u64 + 10 * k as u64;
                let pick = FamilySpec::random_sized(all.clone(), 4, s).generate().unwrap();
                let b = pick.prefix(2);
                let c = pick.difference(&b).unwrap();
                let bs: Vec<u64> = b.iter().map(|x| x.as_residue().unwrap()).collect();
                let cs: Vec<u64> = c.iter().map(|x| x.as_residue().unwrap()).collect();
                let s = had_solution_count(&b, &c).unwrap();
                assert_eq!((s.e_cal, s.zero_term), octuples(&bs, &cs, p));
            }
        }
    }

    #[test]
    fn pipeline_identities() {
        let a = FamilySpec::random_sized(nonzero_residues(GroundField::prime(101).unwrap()).unwrap(), 17, 5)
            .generate()
            .unwrap();
        for sign in [HadSign::Minus, HadSign::Plus] {
            let g = had_pipeline(&a, sign).unwrap();
            assert!(g.identities_hold());
            assert!(g.int_ok);
            assert_eq!(g.a.len(), 15);
            assert!(!g.warnings.is_empty());
            assert!(g.q_bc <= g.range.q || sign == HadSign::Plus);
        }
        assert_eq!(growth_prefix_len(101), 15);
        assert_eq!(growth_prefix_len(499), 41);
    }

    #[test]
    fn char0_is_rejected() {
        let a = FiniteSet::rationals(&[1, 2, 3]);
        assert!(range_set(&a).is_err());
        assert!(had_representation_counts(&a, &a).is_err());
    }
}
