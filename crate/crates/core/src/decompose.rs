//! Dyadic-pigeonhole extraction of structured subsets, and the decompositions
//! obtained by iterating it.
//!
//! The extractor picks a dyadic class `P` of popular ratios (or sums, or
//! differences), the point set `S ⊆ A × A` lying on the corresponding lines,
//! and then a dyadic class of popular abscissae of `S`, falling back to
//! ordinates when the abscissa level exceeds the class size. Dyadic classes
//! are `[t, 2t)` with `t = 2^⌊log₂ r⌋`.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use crate::energy::{self_energy, EnergyLaw, EnergyValue};
use crate::error::{Error, Result};
use crate::field::{rat_int, ser_rational, FieldElem, FieldKind, GroundField};
use crate::kernel::{pair_classes, PairClasses};
use crate::precise::{BoundRatio, PowerProduct};
use crate::set::{affine_image, r_set, FiniteSet, Law};

/// Which structure the extractor pigeonholes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractLaw {
    /// Ratios `v/u`, weighted by `|A ∩ xA|`.
    MulSlopes,
    /// Sums `u + v`, weighted by `r_{A+A}`.
    AddSums,
    /// Differences `v − u`, weighted by `r_{A−A}`.
    SubDifferences,
}

impl ExtractLaw {
    fn pair_law(self) -> Law {
        match self {
            ExtractLaw::MulSlopes => Law::Div,
            ExtractLaw::AddSums => Law::Add,
            ExtractLaw::SubDifferences => Law::Sub,
        }
    }

    /// The energy whose dyadic decomposition is taken.
    pub fn energy_law(self) -> EnergyLaw {
        match self {
            ExtractLaw::MulSlopes => EnergyLaw::Mul,
            ExtractLaw::AddSums | ExtractLaw::SubDifferences => EnergyLaw::Add,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Abscissae,
    Ordinates,
}

fn floor_pow2(r: u64) -> u64 {
    1 << (63 - r.leading_zeros())
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub(crate) fn ceil_log2(n: u64) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

/// Groups `(index, count)` by dyadic level and returns the level and members
/// of the admissible class with the largest weight. Ties go to the smaller
/// level.
fn pick_class(
    counts: impl IntoIterator<Item = (usize, u64)>,
    weight: impl Fn(u64, usize) -> u128,
    admissible: impl Fn(u64, usize) -> bool,
) -> Option<(u64, Vec<usize>)> {
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, c) in counts {
        if c > 0 {
            classes.entry(floor_pow2(c)).or_default().push(i);
        }
    }
    let mut best: Option<(u128, u64, Vec<usize>)> = None;
    for (level, members) in classes {
        if !admissible(level, members.len()) {
            continue;
        }
        let w = weight(level, members.len());
        if best.as_ref().map_or(true, |(bw, _, _)| w > *bw) {
            best = Some((w, level, members));
        }
    }
    best.map(|(_, l, m)| (l, m))
}

fn subset(a: &FiniteSet, idx: &[usize]) -> FiniteSet {
    FiniteSet::from_sorted_unchecked(a.field(), idx.iter().map(|&i| a.elems()[i].clone()).collect())
}

/// Value id of the point `(aᵢ, aⱼ)`: its slope, sum or difference.
fn point_id(c: &PairClasses, law: ExtractLaw, i: usize, j: usize) -> usize {
    match law {
        ExtractLaw::MulSlopes | ExtractLaw::SubDifferences => c.id(j, i) as usize,
        ExtractLaw::AddSums => c.id(i, j) as usize,
    }
}

/// Output of [`extract_structured_subset`]; every field can be recounted by
/// [`ExtractionCertificate::verify`].
#[derive(Clone, Debug, Serialize)]
pub struct ExtractionCertificate {
    pub law: ExtractLaw,
    pub source_size: usize,
    pub source_energy: EnergyValue,
    pub a1: FiniteSet,
    pub p: FiniteSet,
    pub t: u64,
    /// Points of `S` as index pairs into the source set.
    #[serde(skip)]
    pub s: Vec<(u32, u32)>,
    pub s_size: usize,
    pub q: u64,
    pub axis: Axis,
    /// Popular abscissae and their level, kept when the ordinate stage ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<(FiniteSet, u64)>,
    /// No ordinate class had its level below its size, so every ordinate of
    /// `S'` was taken and `q` is only a lower level.
    pub fallback: bool,
    #[serde(serialize_with = "ser_rational")]
    pub d_star: BigRational,
    /// `8⌈log₂ 2|A|⌉·|P|t² ≥ E`.
    pub weight_bound: bool,
    /// `8|A|⌈log₂ 2|A|⌉²·|A1|² ≥ E`.
    pub size_bound: bool,
    /// `|P|·E ≤ 8⌈log₂ 2|A|⌉·|A1|⁴`.
    pub count_bound: bool,
}

fn breach(msg: impl Into<String>) -> Error {
    Error::InvariantBreach(msg.into())
}

/// Pigeonholes popular slopes (sums, differences) and then popular
/// abscissae or ordinates.
pub fn extract_structured_subset(a: &FiniteSet, law: ExtractLaw) -> Result<ExtractionCertificate> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    if law == ExtractLaw::MulSlopes && !a.excludes_zero() {
        return Err(Error::ZeroElement("ratio extraction"));
    }
    let c = pair_classes(a, a, law.pair_law())?;
    let energy: u128 = c.counts.iter().map(|&r| r as u128 * r as u128).sum();

    let (t, chosen) = pick_class(
        c.counts.iter().copied().enumerate(),
        |t, k| t as u128 * t as u128 * k as u128,
        |_, _| true,
    )
    .expect("pair table is nonempty");
    let mut in_p = vec![false; c.values.len()];
    for &id in &chosen {
        in_p[id] = true;
    }
    let mut s = Vec::new();
    let mut rows = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            if in_p[point_id(&c, law, i, j)] {
                s.push((i as u32, j as u32));
                rows[i] += 1;
            }
        }
    }

    let linear = |q: u64, k: usize| q as u128 * k as u128;
    let (q1, abscissae) = pick_class(rows.iter().copied().enumerate(), linear, |_, _| true).expect("S is nonempty");
    let (a1_idx, q, axis, a_prime, fallback) = if q1 as usize <= abscissae.len() {
        (abscissae, q1, Axis::Abscissae, None, false)
    } else {
        let mut keep = vec![false; n];
        for &i in &abscissae {
            keep[i] = true;
        }
        let mut cols = vec![0u64; n];
        for &(i, j) in &s {
            if keep[i as usize] {
                cols[j as usize] += 1;
            }
        }
        let a_prime = Some((subset(a, &abscissae), q1));
        match pick_class(cols.iter().copied().enumerate(), linear, |q, k| q as usize <= k) {
            Some((q2, ords)) => (ords, q2, Axis::Ordinates, a_prime, false),
            None => {
                let ords: Vec<usize> = (0..n).filter(|&j| cols[j] > 0).collect();
                let q2 = floor_pow2(ords.iter().map(|&j| cols[j]).min().unwrap());
                (ords, q2, Axis::Ordinates, a_prime, true)
            }
        }
    };

    let p = FiniteSet::from_sorted_unchecked(a.field(), chosen.iter().map(|&id| c.values[id].clone()).collect());
    let mirrored = match law {
        ExtractLaw::MulSlopes => Some(p.reciprocal()?),
        ExtractLaw::SubDifferences => Some(p.negate()),
        ExtractLaw::AddSums => None,
    };
    if mirrored.is_some_and(|m| m != p) {
        return Err(breach("popular slope class is not symmetric"));
    }

    let a1 = subset(a, &a1_idx);
    let nn = n as u128;
    let l = ceil_log2(2 * n as u64) as u128;
    let k1 = a1.len() as u128;
    let np = p.len() as u128;
    let d_star = BigRational::new(
        BigInt::from(nn * nn) * BigInt::from(k1).pow(4u32),
        BigInt::from(energy).pow(2u32),
    );
    Ok(ExtractionCertificate {
        law,
        source_size: n,
        source_energy: EnergyValue(energy),
        weight_bound: 8 * l * np * t as u128 * t as u128 >= energy,
        size_bound: 8 * nn * l * l * k1 * k1 >= energy,
        count_bound: np * energy <= 8 * l * k1.pow(4),
        a1,
        p,
        t,
        s_size: s.len(),
        s,
        q,
        axis,
        a_prime,
        fallback,
        d_star,
    })
}

impl ExtractionCertificate {
    /// The points of `S` as elements of `A × A`.
    pub fn s_points(&self, a: &FiniteSet) -> Vec<(FieldElem, FieldElem)> {
        let e = a.elems();
        self.s
            .iter()
            .map(|&(i, j)| (e[i as usize].clone(), e[j as usize].clone()))
            .collect()
    }

    /// Recounts every field from scratch against the source set `a`.
    pub fn verify(&self, a: &FiniteSet) -> Result<()> {
        let n = a.len();
        if n != self.source_size {
            return Err(breach("source size differs"));
        }
        let c = pair_classes(a, a, self.law.pair_law())?;
        let energy: u128 = c.counts.iter().map(|&r| r as u128 * r as u128).sum();
        if energy != self.source_energy.get() {
            return Err(breach("source energy differs"));
        }
        let class: Vec<FieldElem> = c
            .values
            .iter()
            .zip(&c.counts)
            .filter(|(_, &r)| floor_pow2(r) == self.t)
            .map(|(x, _)| x.clone())
            .collect();
        if class != self.p.elems() {
            return Err(breach("P is not the level-t class"));
        }
        let mut s = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.p.contains(&c.values[point_id(&c, self.law, i, j)]) {
                    s.push((i as u32, j as u32));
                }
            }
        }
        if s != self.s || s.len() != self.s_size {
            return Err(breach("S differs from the points on lines of P"));
        }
        let (np, t) = (self.p.len() as u64, self.t);
        let ns = s.len() as u64;
        if !(np * t <= ns && ns < 2 * np * t) {
            return Err(breach("|P|t ≤ |S| < 2|P|t fails"));
        }
        if !self.a1.is_subset(a) {
            return Err(breach("A1 is not a subset of A"));
        }
        if self.q as usize > self.a1.len() {
            return Err(breach("q exceeds |A1|"));
        }
        let mut rows = vec![0u64; n];
        for &(i, _) in &s {
            rows[i as usize] += 1;
        }
        let level_class = |counts: &[u64], q: u64| -> FiniteSet {
            let idx: Vec<usize> = (0..n).filter(|&i| counts[i] > 0 && floor_pow2(counts[i]) == q).collect();
            subset(a, &idx)
        };
        match (self.axis, &self.a_prime) {
            (Axis::Abscissae, None) => {
                if level_class(&rows, self.q) != self.a1 {
                    return Err(breach("A1 is not the level-q abscissa class"));
                }
            }
            (Axis::Ordinates, Some((ap, q1))) => {
                if level_class(&rows, *q1) != *ap || *q1 as usize <= ap.len() {
                    return Err(breach("A' is not an oversized level-q' abscissa class"));
                }
                let mut cols = vec![0u64; n];
                for &(i, j) in &s {
                    if ap.contains(&a.elems()[i as usize]) {
                        cols[j as usize] += 1;
                    }
                }
                if self.fallback {
                    let idx: Vec<usize> = (0..n).filter(|&j| cols[j] > 0).collect();
                    if subset(a, &idx) != self.a1 || idx.iter().any(|&j| cols[j] < self.q) {
                        return Err(breach("fallback A1 is not the ordinate set of S'"));
                    }
                } else if level_class(&cols, self.q) != self.a1 {
                    return Err(breach("A1 is not the level-q ordinate class"));
                }
            }
            _ => return Err(breach("axis and A' disagree")),
        }
        Ok(())
    }
}

/// Which upper bound on an extracted subset to compare against.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundTarget {
    /// `E⁺(A1) vs |A1|^{11/2}|A|^{3/2}E^×(A)^{-3/2}` (point-plane route, any field).
    PlaneIncidence,
    /// `E⁺(A1)E^×(A) vs |A1|^{9/2}|A|` (point-line route, complex numbers).
    LineIncidence,
    /// `E^×(A1) vs q^{-4}|P|³|A|³` from popular sums.
    ProductsOfSums,
}

/// Evaluates the chosen bound for a certificate produced from `a`.
pub fn verify_extraction_bound(cert: &ExtractionCertificate, a: &FiniteSet, target: BoundTarget) -> Result<BoundRatio> {
    let want = match target {
        BoundTarget::PlaneIncidence | BoundTarget::LineIncidence => ExtractLaw::MulSlopes,
        BoundTarget::ProductsOfSums => ExtractLaw::AddSums,
    };
    if cert.law != want {
        return Err(Error::LawMismatch(format!("{target:?} needs a {want:?} certificate, got {:?}", cert.law)));
    }
    if a.len() != cert.source_size {
        return Err(Error::Precondition("certificate was produced from a different set".into()));
    }
    let n = rat_int(a.len() as u64);
    let k1 = rat_int(cert.a1.len() as u64);
    let e = cert.source_energy.to_rational();
    match target {
        BoundTarget::PlaneIncidence => BoundRatio::of_int(
            "E+(A1) / |A1|^{11/2}|A|^{3/2}E×(A)^{-3/2}",
            self_energy(&cert.a1, EnergyLaw::Add)?.get(),
            PowerProduct::new().pow(k1, 11, 2).pow(n, 3, 2).pow(e, -3, 2),
        ),
        BoundTarget::LineIncidence => BoundRatio::of_int(
            "E+(A1)E×(A) / |A1|^{9/2}|A|",
            self_energy(&cert.a1, EnergyLaw::Add)?.get() * cert.source_energy.get(),
            PowerProduct::new().pow(k1, 9, 2).pow(n, 1, 1),
        ),
        BoundTarget::ProductsOfSums => BoundRatio::of_int(
            "E×(A1) / q^{-4}|P|^3|A|^3",
            self_energy(&cert.a1, EnergyLaw::Mul)?.get(),
            PowerProduct::new()
                .pow(rat_int(cert.q), -4, 1)
                .pow(rat_int(cert.p.len() as u64), 3, 1)
                .pow(n, 3, 1),
        ),
    }
}

/// One removal `C_{j+1} = C_j \ D_j`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionStep {
    pub j: usize,
    pub c_size: usize,
    /// Monitored energy of `C_j`.
    pub c_energy: EnergyValue,
    pub d: FiniteSet,
    /// Present on the first piece of each extraction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ExtractionCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionTrace {
    pub variant: String,
    pub monitor: String,
    pub extraction: ExtractLaw,
    #[serde(serialize_with = "ser_opt_rational", skip_serializing_if = "Option::is_none")]
    pub m: Option<BigRational>,
    pub steps: Vec<DecompositionStep>,
    pub b: FiniteSet,
    pub c: FiniteSet,
    /// Monitored energy of the final `C`.
    pub final_energy: EnergyValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_cap: Option<u64>,
    pub reports: Vec<BoundRatio>,
    pub warnings: Vec<String>,
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

impl DecompositionTrace {
    pub fn within_step_cap(&self) -> bool {
        self.step_cap.map_or(true, |cap| self.steps.len() as u64 <= cap)
    }

    /// `B ⊔ C = A`, `B = ⊔ Dⱼ` and `|C_{j+1}| < |C_j|`.
    pub fn check_partition(&self, a: &FiniteSet) -> Result<()> {
        if !self.b.is_disjoint(&self.c) || self.b.union(&self.c)? != *a {
            return Err(breach("B and C do not partition A"));
        }
        let mut acc = FiniteSet::empty(a.field());
        for w in self.steps.windows(2) {
            if w[1].c_size >= w[0].c_size {
                return Err(breach("C did not shrink"));
            }
        }
        for s in &self.steps {
            if s.d.is_empty() || !acc.is_disjoint(&s.d) {
                return Err(breach("pieces D_j overlap or are empty"));
            }
            acc = acc.union(&s.d)?;
        }
        if acc != self.b {
            return Err(breach("B is not the union of the pieces"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Monitor {
    Energy(EnergyLaw),
    MulOfTranslate(FieldElem),
    AddOfReciprocal,
}

impl Monitor {
    fn eval(&self, c: &FiniteSet) -> Result<u128> {
        Ok(match self {
            Monitor::Energy(law) => self_energy(c, *law)?.get(),
            Monitor::MulOfTranslate(alpha) => {
                let moved = affine_image(c, &c.field().one(), alpha)?;
                self_energy(&moved, EnergyLaw::Mul)?.get()
            }
            Monitor::AddOfReciprocal => self_energy(&c.reciprocal()?, EnergyLaw::Add)?.get(),
        })
    }

    fn name(&self) -> String {
        match self {
            Monitor::Energy(EnergyLaw::Mul) => "E×(C)".into(),
            Monitor::Energy(EnergyLaw::Add) => "E+(C)".into(),
            Monitor::MulOfTranslate(a) => format!("E×({a} + C)"),
            Monitor::AddOfReciprocal => "E+(1/C)".into(),
        }
    }
}

struct Run {
    steps: Vec<DecompositionStep>,
    b: FiniteSet,
    c: FiniteSet,
    final_energy: u128,
}

fn chunks(d: FiniteSet, size: usize) -> Vec<FiniteSet> {
    if size == 0 || d.len() <= size {
        return vec![d];
    }
    d.elems()
        .chunks(size)
        .map(|ch| FiniteSet::from_sorted_unchecked(d.field(), ch.to_vec()))
        .collect()
}

/// Removes extracted pieces from `C` until `stop(|B|, monitored(C))` holds.
fn run(
    a: &FiniteSet,
    extraction: ExtractLaw,
    monitor: &Monitor,
    chunk: usize,
    mut stop: impl FnMut(usize, u128) -> bool,
) -> Result<Run> {
    let mut c = a.clone();
    let mut b = FiniteSet::empty(a.field());
    let mut steps: Vec<DecompositionStep> = Vec::new();
    let mut pending: VecDeque<(FiniteSet, Option<ExtractionCertificate>)> = VecDeque::new();
    loop {
        let e = monitor.eval(&c)?;
        if stop(b.len(), e) {
            return Ok(Run {
                steps,
                b,
                c,
                final_energy: e,
            });
        }
        if steps.len() >= a.len() {
            return Err(breach("decomposition exceeded |A| steps"));
        }
        if pending.is_empty() {
            let cert = extract_structured_subset(&c, extraction).map_err(|e| match e {
                Error::TooSmall { .. } => breach("stopping rule unreachable: C has fewer than 2 elements"),
                other => other,
            })?;
            let mut cert = Some(cert);
            for piece in chunks(cert.as_ref().unwrap().a1.clone(), chunk) {
                pending.push_back((piece, cert.take()));
            }
        }
        let (d, certificate) = pending.pop_front().unwrap();
        steps.push(DecompositionStep {
            j: steps.len() + 1,
            c_size: c.len(),
            c_energy: EnergyValue(e),
            d: d.clone(),
            certificate,
        });
        c = c.difference(&d)?;
        b = b.union(&d)?;
    }
}

/// `(1, 4)` over the rationals, `(1, 5)` over prime fields.
fn delta(field: GroundField) -> (i64, i64) {
    if field.is_char0() {
        (1, 4)
    } else {
        (1, 5)
    }
}

/// `⌈n^{1/den}⌉`.
fn ceil_root(n: u64, den: u32) -> u64 {
    let mut k = (n as f64).powf(1.0 / den as f64).floor() as u64;
    while k.pow(den) > n {
        k -= 1;
    }
    while k.pow(den) < n {
        k += 1;
    }
    k.max(1)
}

fn resolve_m(a: &FiniteSet, m: Option<BigRational>) -> Result<BigRational> {
    let n = a.len() as u64;
    let m = m.unwrap_or_else(|| rat_int(ceil_root(n, delta(a.field()).1 as u32)));
    if m < BigRational::one() || m > rat_int(n.pow(3).max(1)) {
        return Err(Error::OutOfRange(format!("M = {m} must lie in [1, |A|³]")));
    }
    Ok(m)
}

fn pow_n(n: usize, num: i64, den: i64) -> PowerProduct {
    PowerProduct::new().pow(rat_int(n as u64), num, den)
}

fn int_pp(v: u128) -> PowerProduct {
    PowerProduct::new().pow(rat_int(v), 1, 1)
}

/// `⌈√(8M)·⌈log₂ 2|A|⌉⌉`, the step count allowed by the lower bound on `|D_j|`.
fn step_cap(n: usize, m: &BigRational) -> u64 {
    let l = ceil_log2(2 * n as u64) as u64;
    let x = m * rat_int(8 * l * l);
    let target = x.ceil().to_integer();
    let mut k = target.sqrt();
    if &k * &k < target {
        k += 1;
    }
    k.to_u64().unwrap_or(u64::MAX)
}

fn max_ratio(label: &str, x: u128, y: u128, n: usize, field: GroundField) -> Result<BoundRatio> {
    let (dn, dd) = delta(field);
    BoundRatio::of_int(label, x.max(y), pow_n(n, 3 * dd - dn, dd))
}

/// Iteratively removes low-additive-energy pieces until
/// `E^×(C) ≤ |A|³/M`. `M` defaults to `⌈|A|^{1/4}⌉` over the rationals and
/// `⌈|A|^{1/5}⌉` over prime fields.
pub fn bw_decompose(a: &FiniteSet, m: Option<BigRational>) -> Result<DecompositionTrace> {
    if !a.excludes_zero() {
        return Err(Error::ZeroElement("decomposition"));
    }
    if a.is_empty() {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    let n = a.len();
    let m = resolve_m(a, m)?;
    let n3 = rat_int((n as u128).pow(3));
    let monitor = Monitor::Energy(EnergyLaw::Mul);
    let r = run(a, ExtractLaw::MulSlopes, &monitor, 0, |_, e| rat_int(e) * &m <= n3)?;

    let mut warnings = Vec::new();
    if let FieldKind::Prime(p) = a.field().kind() {
        let p2 = BigInt::from(p).pow(2u32);
        let e_a = self_energy(a, EnergyLaw::Mul)?.get();
        if BigInt::from(n).pow(6u32) > &p2 * BigInt::from(e_a) {
            warnings.push(format!("|A|^6 > p^2 E×(A) for |A| = {n}, p = {p}"));
        }
        if rat_int(BigInt::from(n).pow(3u32)) * &m > rat_int(p2.clone()) {
            warnings.push(format!("|A|^3 > p^2/M for |A| = {n}, p = {p}"));
        }
        let bad = r
            .steps
            .iter()
            .filter(|s| BigInt::from(s.c_size).pow(6u32) > &p2 * BigInt::from(s.c_energy.get()))
            .count();
        if bad > 0 {
            warnings.push(format!("|C_j|^6 > p^2 E×(C_j) at {bad} step(s)"));
        }
    }

    let e_b = self_energy(&r.b, EnergyLaw::Add)?.get();
    let m_pow = if a.field().is_char0() { (1, 1) } else { (3, 2) };
    let label = if a.field().is_char0() {
        "E+(B) / M|A|^{5/2}"
    } else {
        "E+(B) / M^{3/2}|A|^{5/2}"
    };
    let reports = vec![
        BoundRatio::of_int(label, e_b, pow_n(n, 5, 2).pow_q(m.clone(), BigRational::new(m_pow.0.into(), m_pow.1.into())))?,
        max_ratio("max(E+(B), E×(C)) / |A|^{3-δ}", e_b, r.final_energy, n, a.field())?,
    ];
    Ok(DecompositionTrace {
        variant: "bw".into(),
        monitor: monitor.name(),
        extraction: ExtractLaw::MulSlopes,
        step_cap: Some(step_cap(n, &m)),
        m: Some(m),
        steps: r.steps,
        b: r.b,
        c: r.c,
        final_energy: EnergyValue(r.final_energy),
        reports,
        warnings,
    })
}

/// How [`balanced_decompose`] reached its split.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalancedBranch {
    /// `E(A)³ ≤ |A|⁸` already; `A` halved by alternating canonical order.
    OutsetSplit,
    /// Stopped once `|B| > |A|/3`.
    SizeStop,
    /// Stopped on the energy threshold with `|B| ≥ |A|/3`.
    EnergyStop,
    /// Stopped on the energy threshold with `B` too small; `C` is the
    /// alternating half of the remainder and `B` the rest of `A`.
    EnergyStopSplit,
}

/// Two disjoint parts, each of size at least `⌈|A|/3⌉`.
#[derive(Clone, Debug, Serialize)]
pub struct BalancedSplit {
    pub b: FiniteSet,
    pub c: FiniteSet,
    pub branch: BalancedBranch,
    /// Whether the roles of the two energies are exchanged: then `B` has
    /// small multiplicative and `C` small additive energy.
    pub swapped: bool,
    /// `E⁺(B)` (`E^×(B)` when swapped).
    pub b_energy: EnergyValue,
    /// `E^×(C)` (`E⁺(C)` when swapped).
    pub c_energy: EnergyValue,
    pub trace: DecompositionTrace,
    /// `E(B)·E(C)^{3/2} / |A|⁷`.
    pub ratio_three_halves: BoundRatio,
    /// `E(B)·E(C) / |A|^{11/2}`, over the rationals only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_complex: Option<BoundRatio>,
}

/// Splits `A` into disjoint `B, C` of size at least `⌈|A|/3⌉` with
/// `E⁺(B)` and `E^×(C)` small together. Pieces are capped at
/// `max(1, ⌊|A|/100⌋)` elements.
pub fn balanced_decompose(a: &FiniteSet) -> Result<BalancedSplit> {
    balanced_impl(a, false)
}

/// [`balanced_decompose`] with the two energies exchanged.
pub fn balanced_decompose_swapped(a: &FiniteSet) -> Result<BalancedSplit> {
    balanced_impl(a, true)
}

fn balanced_impl(a: &FiniteSet, swapped: bool) -> Result<BalancedSplit> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    if !a.excludes_zero() {
        return Err(Error::ZeroElement("decomposition"));
    }
    if let FieldKind::Prime(p) = a.field().kind() {
        if BigInt::from(n).pow(5u32) > BigInt::from(p).pow(3u32) {
            return Err(Error::Precondition(format!("balanced decomposition needs |A|^5 ≤ p^3, got |A| = {n}, p = {p}")));
        }
    }
    let (mon_law, small_law, extraction) = if swapped {
        (EnergyLaw::Add, EnergyLaw::Mul, ExtractLaw::AddSums)
    } else {
        (EnergyLaw::Mul, EnergyLaw::Add, ExtractLaw::MulSlopes)
    };
    let monitor = Monitor::Energy(mon_law);
    let n8 = BigInt::from(n).pow(8u32);
    let cube = |e: u128| BigInt::from(e).pow(3u32);
    let e_a = self_energy(a, mon_law)?.get();

    let (b, c, branch, r) = if cube(e_a) <= n8 {
        let b = a.filter_indexed(|i, _| i % 2 == 0);
        let c = a.filter_indexed(|i, _| i % 2 == 1);
        let r = Run {
            steps: Vec::new(),
            b: FiniteSet::empty(a.field()),
            c: a.clone(),
            final_energy: e_a,
        };
        (b, c, BalancedBranch::OutsetSplit, r)
    } else {
        let chunk = (n / 100).max(1);
        let r = run(a, extraction, &monitor, chunk, |bl, e| cube(e) < n8 || 3 * bl > n)?;
        if 3 * r.b.len() > n {
            (r.b.clone(), r.c.clone(), BalancedBranch::SizeStop, r)
        } else if 3 * r.b.len() >= n {
            (r.b.clone(), r.c.clone(), BalancedBranch::EnergyStop, r)
        } else {
            let c = r.c.filter_indexed(|i, _| i % 2 == 0);
            let b = a.difference(&c)?;
            (b, c, BalancedBranch::EnergyStopSplit, r)
        }
    };
    let third = n.div_ceil(3);
    if b.len() < third || c.len() < third || !b.is_disjoint(&c) {
        return Err(breach(format!("balanced split sizes {} and {} below ⌈|A|/3⌉ = {third}", b.len(), c.len())));
    }

    let e_b = self_energy(&b, small_law)?.get();
    let e_c = self_energy(&c, mon_law)?.get();
    let (sb, sc) = if swapped { ("E×(B)", "E+(C)") } else { ("E+(B)", "E×(C)") };
    let ratio_three_halves = BoundRatio::new(
        format!("{sb}·{sc}^{{3/2}} / |A|^7"),
        int_pp(e_b).pow(rat_int(e_c), 3, 2),
        pow_n(n, 7, 1),
        crate::precise::precision_digits(),
    )?;
    let ratio_complex = if a.field().is_char0() {
        Some(BoundRatio::of_int(format!("{sb}·{sc} / |A|^{{11/2}}"), e_b * e_c, pow_n(n, 11, 2))?)
    } else {
        None
    };
    let trace = DecompositionTrace {
        variant: if swapped { "balanced-swapped" } else { "balanced" }.into(),
        monitor: monitor.name(),
        extraction,
        m: None,
        steps: r.steps,
        b: r.b,
        c: r.c,
        final_energy: EnergyValue(r.final_energy),
        step_cap: None,
        reports: Vec::new(),
        warnings: Vec::new(),
    };
    Ok(BalancedSplit {
        b,
        c,
        branch,
        swapped,
        b_energy: EnergyValue(e_b),
        c_energy: EnergyValue(e_c),
        trace,
        ratio_three_halves,
        ratio_complex,
    })
}

/// Disjoint `B, C ⊆ A` of size at least `⌈|A|/9⌉` with `E⁺(B)·E^×(C)` small.
#[derive(Clone, Debug, Serialize)]
pub struct ProductSplit {
    pub b: FiniteSet,
    pub c: FiniteSet,
    pub add_energy_b: EnergyValue,
    pub mul_energy_c: EnergyValue,
    /// The first split `(B₁, C₁)` of `A`.
    pub first: BalancedSplit,
    /// The exchanged split of `C₁` into a small-product part `V` and a
    /// small-sum part `U`.
    pub second: BalancedSplit,
    /// `true` when the output is `(U, V)`, `false` when it is `(B₁, V)`.
    pub took_second: bool,
    /// `E⁺(B)·E^×(C) / |A|^{28/5}`.
    pub ratio: BoundRatio,
}

/// Splits `A` into `(B₁, C₁)`, splits `C₁` again with the energies exchanged
/// into `(V, U)`, and keeps `(U, V)` when `E^×(C₁)E⁺(U) ≤ E⁺(B₁)E^×(V)`,
/// otherwise `(B₁, V)`.
pub fn product_energy_pipeline(a: &FiniteSet) -> Result<ProductSplit> {
    if a.len() < 4 {
        return Err(Error::TooSmall { needed: 4, got: a.len() });
    }
    let first = balanced_decompose(a)?;
    let second = balanced_decompose_swapped(&first.c)?;
    let (u, v) = (&second.c, &second.b);
    let e_u = second.c_energy.get();
    let e_v = second.b_energy.get();
    let lhs = BigInt::from(first.c_energy.get()) * BigInt::from(e_u);
    let rhs = BigInt::from(first.b_energy.get()) * BigInt::from(e_v);
    let took_second = lhs <= rhs;
    let (b, add_b) = if took_second { (u.clone(), e_u) } else { (first.b.clone(), first.b_energy.get()) };
    let c = v.clone();
    let n = a.len();
    let ninth = n.div_ceil(9);
    if b.len() < ninth || c.len() < ninth || !b.is_disjoint(&c) {
        return Err(breach("product split sizes below ⌈|A|/9⌉"));
    }
    let ratio = BoundRatio::of_int("E+(B)·E×(C) / |A|^{28/5}", add_b * e_v, pow_n(n, 28, 5))?;
    Ok(ProductSplit {
        b,
        c,
        add_energy_b: EnergyValue(add_b),
        mul_energy_c: EnergyValue(e_v),
        first,
        second,
        took_second,
        ratio,
    })
}

/// The translated-energy variants of the decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslateVariant {
    /// Small `E^×(B)` and `E^×(α + C)`.
    MultTranslate(FieldElem),
    /// Small `E⁺(B)` and `E⁺(1/C)`; rationals only.
    Reciprocal,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslateSplit {
    pub variant: TranslateVariant,
    pub b: FiniteSet,
    pub c: FiniteSet,
    /// `E^×(B)` or `E⁺(B)`.
    pub b_energy: EnergyValue,
    /// `E^×(α + C)` or `E⁺(1/C)`.
    pub c_energy: EnergyValue,
    pub trace: DecompositionTrace,
    /// Larger energy over `|A|^{3−δ}`; absent for empty input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<BoundRatio>,
}

/// Iterates like [`bw_decompose`], monitoring `E^×(α + C)` with popular
/// differences, or `E⁺(1/C)` with popular ratios.
pub fn translate_decompose(a: &FiniteSet, variant: TranslateVariant, m: Option<BigRational>) -> Result<TranslateSplit> {
    if !a.excludes_zero() {
        return Err(Error::ZeroElement("decomposition"));
    }
    let (monitor, extraction, b_law) = match &variant {
        TranslateVariant::MultTranslate(alpha) => {
            if alpha.field() != a.field() {
                return Err(Error::FieldMismatch(a.field(), alpha.field()));
            }
            if alpha.is_zero() {
                return Err(Error::Precondition("translate α must be nonzero".into()));
            }
            let moved = affine_image(a, &a.field().one(), alpha)?;
            if !moved.excludes_zero() {
                return Err(Error::ZeroElement("α + A"));
            }
            (Monitor::MulOfTranslate(alpha.clone()), ExtractLaw::SubDifferences, EnergyLaw::Mul)
        }
        TranslateVariant::Reciprocal => {
            if !a.field().is_char0() {
                return Err(Error::Precondition("the reciprocal variant is only available over the rationals".into()));
            }
            (Monitor::AddOfReciprocal, ExtractLaw::MulSlopes, EnergyLaw::Add)
        }
    };
    let n = a.len();
    let (m, r) = if n == 0 {
        let r = Run {
            steps: Vec::new(),
            b: a.clone(),
            c: a.clone(),
            final_energy: 0,
        };
        (None, r)
    } else {
        let m = resolve_m(a, m)?;
        let n3 = rat_int((n as u128).pow(3));
        let r = run(a, extraction, &monitor, 0, |_, e| rat_int(e) * &m <= n3)?;
        (Some(m), r)
    };
    let e_b = self_energy(&r.b, b_law)?.get();
    let ratio = if n == 0 {
        None
    } else {
        let label = match variant {
            TranslateVariant::MultTranslate(_) => "max(E×(B), E×(α+C)) / |A|^{3-δ}",
            TranslateVariant::Reciprocal => "max(E+(B), E+(1/C)) / |A|^{3-δ}",
        };
        Some(max_ratio(label, e_b, r.final_energy, n, a.field())?)
    };
    let trace = DecompositionTrace {
        variant: match variant {
            TranslateVariant::MultTranslate(_) => "mult-translate",
            TranslateVariant::Reciprocal => "reciprocal",
        }
        .into(),
        monitor: monitor.name(),
        extraction,
        m,
        steps: r.steps,
        b: r.b.clone(),
        c: r.c.clone(),
        final_energy: EnergyValue(r.final_energy),
        step_cap: None,
        reports: ratio.iter().cloned().collect(),
        warnings: Vec::new(),
    };
    Ok(TranslateSplit {
        variant,
        b: r.b,
        c: r.c,
        b_energy: EnergyValue(e_b),
        c_energy: EnergyValue(r.final_energy),
        trace,
        ratio,
    })
}

/// Large subsets of `R[A]` with small multiplicative and small additive energy.
#[derive(Clone, Debug, Serialize)]
pub struct RSetSplit {
    pub r: FiniteSet,
    /// `B ∪ {1}` or `(1 − C) ∪ {1}`.
    pub r_prime: FiniteSet,
    pub r_prime_from_b: bool,
    /// `B' ∪ {0}` or `(1/C') ∪ {0}`.
    pub r_dprime: FiniteSet,
    pub r_dprime_from_b: bool,
    pub translate: TranslateSplit,
    pub reciprocal: TranslateSplit,
    /// `E^×(R') / |R'|^{11/4}`.
    pub mul_ratio: BoundRatio,
    /// `E⁺(R'') / |R''|^{11/4}`.
    pub add_ratio: BoundRatio,
}

/// Uses `R = 1 − R` and `(R \ {0})⁻¹ = R \ {0}` to turn the translate and
/// reciprocal decompositions of `R = R[A]` into halves of `R`.
pub fn r_set_decompose(a: &FiniteSet) -> Result<RSetSplit> {
    if !a.field().is_char0() {
        return Err(Error::Precondition("R[A] decomposition is only available over the rationals".into()));
    }
    if a.len() < 2 {
        return Err(Error::TooSmall { needed: 2, got: a.len() });
    }
    let f = a.field();
    let (zero, one) = (f.zero(), f.one());
    let r = r_set(a);
    let flipped = affine_image(&r, &f.int(-1), &one)?;
    if flipped != r {
        return Err(breach("R[A] ≠ 1 − R[A]"));
    }
    let zero_set = FiniteSet::new(f, [zero.clone()])?;
    let r_star = r.difference(&zero_set)?;
    if r_star.reciprocal()? != r_star {
        return Err(breach("(R*)^{-1} ≠ R*"));
    }
    let one_set = FiniteSet::new(f, [one.clone()])?;
    let core = r_star.difference(&one_set)?;

    let translate = translate_decompose(&core, TranslateVariant::MultTranslate(f.int(-1)), None)?;
    let half = |k: usize| 2 * (k + 1) >= r.len();
    let r_prime_from_b = half(translate.b.len());
    let r_prime = if r_prime_from_b {
        translate.b.union(&one_set)?
    } else {
        affine_image(&translate.c, &f.int(-1), &one)?.union(&one_set)?
    };

    let reciprocal = translate_decompose(&r_star, TranslateVariant::Reciprocal, None)?;
    let r_dprime_from_b = half(reciprocal.b.len());
    let r_dprime = if r_dprime_from_b {
        reciprocal.b.union(&zero_set)?
    } else {
        reciprocal.c.reciprocal()?.union(&zero_set)?
    };
    if !r_prime.is_subset(&r) || !r_dprime.is_subset(&r) || !half(r_prime.len() - 1) || !half(r_dprime.len() - 1) {
        return Err(breach("R' or R'' is not a half of R"));
    }
    let mul_ratio = BoundRatio::of_int(
        "E×(R') / |R'|^{11/4}",
        self_energy(&r_prime, EnergyLaw::Mul)?.get(),
        pow_n(r_prime.len(), 11, 4),
    )?;
    let add_ratio = BoundRatio::of_int(
        "E+(R'') / |R''|^{11/4}",
        self_energy(&r_dprime, EnergyLaw::Add)?.get(),
        pow_n(r_dprime.len(), 11, 4),
    )?;
    Ok(RSetSplit {
        r,
        r_prime,
        r_prime_from_b,
        r_dprime,
        r_dprime_from_b,
        translate,
        reciprocal,
        mul_ratio,
        add_ratio,
    })
}
