//! Representation functions and additive / multiplicative energies.
//!
//! [`energy`] goes through the multiplicity table of the counting kernel;
//! [`energy_bruteforce`] enumerates quadruples literally and exists as the
//! oracle for it.

use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{rat_int, FieldElem, GroundField};
use crate::kernel::PairTable;
use crate::precise::{precision_digits, rational_power, Decimal};
use crate::set::{FiniteSet, Law};

/// The two laws an energy can be taken over.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyLaw {
    Add,
    Mul,
}

impl EnergyLaw {
    pub fn law(self) -> Law {
        match self {
            EnergyLaw::Add => Law::Add,
            EnergyLaw::Mul => Law::Mul,
        }
    }

    pub fn other(self) -> EnergyLaw {
        match self {
            EnergyLaw::Add => EnergyLaw::Mul,
            EnergyLaw::Mul => EnergyLaw::Add,
        }
    }
}

impl fmt::Display for EnergyLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyLaw::Add => "add",
            EnergyLaw::Mul => "mul",
        })
    }
}

/// An exact energy. `u128` is wide enough for any table that fits in memory
/// (see [`PairTable::energy`]).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EnergyValue(pub u128);

impl EnergyValue {
    pub fn get(self) -> u128 {
        self.0
    }

    pub fn to_rational(self) -> BigRational {
        rat_int(self.0)
    }
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `x ↦ r_{A∘B}(x)`, stored sorted by value.
#[derive(Clone, Debug, Serialize)]
pub struct RepFunction {
    law: Law,
    field: GroundField,
    table: Vec<(FieldElem, u64)>,
}

impl RepFunction {
    pub fn law(&self) -> Law {
        self.law
    }

    pub fn field(&self) -> GroundField {
        self.field
    }

    pub fn entries(&self) -> &[(FieldElem, u64)] {
        &self.table
    }

    pub fn get(&self, x: &FieldElem) -> u64 {
        self.table
            .binary_search_by(|(k, _)| k.cmp(x))
            .map(|i| self.table[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.table.iter().map(|(_, c)| *c as u128).sum()
    }

    pub fn support(&self) -> FiniteSet {
        FiniteSet::from_sorted_unchecked(self.field, self.table.iter().map(|(x, _)| x.clone()).collect())
    }

    pub fn energy(&self) -> EnergyValue {
        EnergyValue(self.table.iter().map(|(_, c)| *c as u128 * *c as u128).sum())
    }

    /// Two-column CSV dump, `value,count`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "count"]).unwrap();
        for (x, c) in &self.table {
            w.write_record([x.to_string(), c.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

pub fn rep_function(a: &FiniteSet, b: &FiniteSet, law: Law) -> Result<RepFunction> {
    let t = PairTable::build(a, b, law)?;
    Ok(RepFunction {
        law,
        field: a.field(),
        table: t.entries(),
    })
}

fn check_mul(a: &FiniteSet, b: &FiniteSet, law: EnergyLaw) -> Result<()> {
    if law == EnergyLaw::Mul && !(a.excludes_zero() && b.excludes_zero()) {
        return Err(Error::ZeroElement("multiplicative energy"));
    }
    Ok(())
}

/// `E(A, B) = Σ_x r_{A∘B}(x)²`.
pub fn energy(a: &FiniteSet, b: &FiniteSet, law: EnergyLaw) -> Result<EnergyValue> {
    check_mul(a, b, law)?;
    Ok(EnergyValue(PairTable::build(a, b, law.law())?.energy()))
}

/// `E(A) = E(A, A)`.
pub fn self_energy(a: &FiniteSet, law: EnergyLaw) -> Result<EnergyValue> {
    energy(a, a, law)
}

/// Default cap on quadruples for [`energy_bruteforce`].
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

/// Counts `(a₁, a₂, b₁, b₂)` with `a₁ ∘ b₁ = a₂ ∘ b₂` one quadruple at a time.
/// Refuses to run when `|A|²|B|² > cap`.
pub fn energy_bruteforce(a: &FiniteSet, b: &FiniteSet, law: EnergyLaw, cap: u128) -> Result<EnergyValue> {
    a.same_field(b)?;
    check_mul(a, b, law)?;
    let pairs = a.len() as u128 * b.len() as u128;
    let work = pairs * pairs;
    if work > cap {
        return Err(Error::CapExceeded { work, cap });
    }
    let op = |x: &FieldElem, y: &FieldElem| match law {
        EnergyLaw::Add => x + y,
        EnergyLaw::Mul => x * y,
    };
    let vals: Vec<FieldElem> = a.iter().flat_map(|x| b.iter().map(move |y| op(x, y))).collect();
    let n: u128 = vals
        .par_iter()
        .map(|v1| vals.iter().filter(|v2| *v2 == v1).count() as u128)
        .sum();
    Ok(EnergyValue(n))
}

/// Both sides of the Cauchy–Schwarz bounds `E(A)·|A∘A| ≥ |A|⁴`.
#[derive(Clone, Debug, Serialize)]
pub struct CauchySchwarzReport {
    pub size: usize,
    pub a4: u128,
    pub add_energy: EnergyValue,
    pub sumset: usize,
    pub add_lhs: u128,
    /// `A − A` in place of `A + A`.
    pub difference_set: usize,
    pub diff_lhs: u128,
    /// Absent when `0 ∈ A`.
    pub mul_energy: Option<EnergyValue>,
    pub productset: Option<usize>,
    pub mul_lhs: Option<u128>,
    pub pass: bool,
}

pub fn cauchy_schwarz_check(a: &FiniteSet) -> Result<CauchySchwarzReport> {
    let n = a.len() as u128;
    let a4 = n.pow(4);
    let sums = PairTable::build(a, a, Law::Add)?;
    let diffs = PairTable::build(a, a, Law::Sub)?;
    let add_energy = EnergyValue(sums.energy());
    let sumset = sums.support_len();
    let difference_set = diffs.support_len();
    let add_lhs = add_energy.0 * sumset as u128;
    let diff_lhs = add_energy.0 * difference_set as u128;
    let (mul_energy, productset, mul_lhs) = if a.excludes_zero() {
        let prods = PairTable::build(a, a, Law::Mul)?;
        let e = EnergyValue(prods.energy());
        let s = prods.support_len();
        (Some(e), Some(s), Some(e.0 * s as u128))
    } else {
        (None, None, None)
    };
    let pass = add_lhs >= a4 && diff_lhs >= a4 && mul_lhs.map_or(true, |m| m >= a4);
    Ok(CauchySchwarzReport {
        size: a.len(),
        a4,
        add_energy,
        sumset,
        add_lhs,
        difference_set,
        diff_lhs,
        mul_energy,
        productset,
        mul_lhs,
        pass,
    })
}

/// `E(⋃ Aᵢ)^{1/4}` against `Σ E(Aᵢ)^{1/4}`.
#[derive(Clone, Debug, Serialize)]
pub struct QuarterPowerReport {
    pub law: EnergyLaw,
    pub union_energy: EnergyValue,
    pub part_energies: Vec<EnergyValue>,
    pub lhs: Decimal,
    pub rhs: Decimal,
    pub pass: bool,
}

/// Relative slack allowed when comparing the truncated fourth roots.
pub const QUARTER_TOLERANCE_EXP: u32 = 20;

pub fn quarter_power_check(parts: &[FiniteSet], law: EnergyLaw) -> Result<QuarterPowerReport> {
    let Some(first) = parts.first() else {
        return Err(Error::Precondition("quarter_power_check needs at least one part".into()));
    };
    let mut union = FiniteSet::empty(first.field());
    for p in parts {
        p.same_field(first)?;
        if let Some(x) = p.iter().find(|x| union.contains(x)) {
            return Err(Error::OverlappingParts(x.to_string()));
        }
        union = union.union(p)?;
    }
    let digits = precision_digits();
    let union_energy = self_energy(&union, law)?;
    let part_energies = parts
        .iter()
        .map(|p| self_energy(p, law))
        .collect::<Result<Vec<_>>>()?;
    let lhs = rational_power(&union_energy.to_rational(), 1, 4, digits)?;
    let mut rhs = Decimal::zero(digits);
    for e in &part_energies {
        rhs = rhs.add(&rational_power(&e.to_rational(), 1, 4, digits)?);
    }
    let pass = lhs.le_rel(&rhs, QUARTER_TOLERANCE_EXP);
    Ok(QuarterPowerReport {
        law,
        union_energy,
        part_energies,
        lhs,
        rhs,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilySpec;

    fn q(v: &[i64]) -> FiniteSet {
        FiniteSet::rationals(v)
    }

    fn f7(v: &[i64]) -> FiniteSet {
        FiniteSet::from_ints(GroundField::prime(7).unwrap(), v).unwrap()
    }

    #[test]
    fn rep_function_examples() {
        let r = rep_function(&q(&[1, 2, 3]), &q(&[1, 2, 3]), Law::Add).unwrap();
        let got: Vec<(String, u64)> = r.entries().iter().map(|(x, c)| (x.to_string(), *c)).collect();
        let want: Vec<(String, u64)> = [(2, 1), (3, 2), (4, 3), (5, 2), (6, 1)]
            .iter()
            .map(|(x, c)| (x.to_string(), *c))
            .collect();
        assert_eq!(got, want);
        assert_eq!(r.total(), 9);
        let r = rep_function(&q(&[5]), &q(&[5]), Law::Add).unwrap();
        assert_eq!(r.entries().len(), 1);
        assert_eq!(r.get(&GroundField::char0().int(10)), 1);
        let r = rep_function(&f7(&[1, 2, 4]), &f7(&[1, 2, 4]), Law::Mul).unwrap();
        let f = GroundField::prime(7).unwrap();
        for x in [1, 2, 4] {
            assert_eq!(r.get(&f.int(x)), 3);
        }
        assert_eq!(r.to_csv(), "value,count\n1,3\n2,3\n4,3\n");
    }

    #[test]
    fn energy_examples() {
        assert_eq!(self_energy(&q(&[1, 2, 3]), EnergyLaw::Add).unwrap().get(), 19);
        assert_eq!(self_energy(&q(&[1, 2, 4]), EnergyLaw::Mul).unwrap().get(), 19);
        assert_eq!(self_energy(&f7(&[1, 2, 4]), EnergyLaw::Mul).unwrap().get(), 27);
        assert!(matches!(
            self_energy(&q(&[0, 1]), EnergyLaw::Mul),
            Err(Error::ZeroElement(_))
        ));
    }

    #[test]
    fn brute_force_examples() {
        let cap = BRUTE_FORCE_CAP;
        assert_eq!(energy_bruteforce(&q(&[1, 2]), &q(&[10, 20]), EnergyLaw::Add, cap).unwrap().get(), 4);
        assert_eq!(energy_bruteforce(&q(&[1, 2, 5, 11]), &q(&[1, 2, 5, 11]), EnergyLaw::Add, cap).unwrap().get(), 28);
        assert_eq!(energy_bruteforce(&q(&[5]), &q(&[5]), EnergyLaw::Add, cap).unwrap().get(), 1);
        let big = FamilySpec::ap(1, 1, 40).generate().unwrap();
        assert!(matches!(
            energy_bruteforce(&big, &big, EnergyLaw::Add, cap),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let r = cauchy_schwarz_check(&q(&[1, 2, 3])).unwrap();
        assert_eq!((r.add_energy.get(), r.sumset, r.add_lhs), (19, 5, 95));
        assert!(r.pass);
        let r = cauchy_schwarz_check(&q(&[5])).unwrap();
        assert_eq!((r.add_lhs, r.a4), (1, 1));
        assert!(r.pass);
        let r = cauchy_schwarz_check(&q(&[1, 2, 4])).unwrap();
        assert_eq!((r.mul_energy.unwrap().get(), r.productset.unwrap(), r.mul_lhs.unwrap()), (19, 5, 95));
        assert!(r.pass);
    }

    #[test]
    fn quarter_power_examples() {
        let r = quarter_power_check(&[q(&[1, 2, 3])], EnergyLaw::Add).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(r.pass);
        let r = quarter_power_check(&[q(&[1, 2, 3]), q(&[10, 20, 30])], EnergyLaw::Add).unwrap();
        assert!(r.pass);
        let r = quarter_power_check(&[q(&[1, 2]), q(&[4, 8]), q(&[16, 32])], EnergyLaw::Mul).unwrap();
        assert!(r.pass);
        assert!(matches!(
            quarter_power_check(&[q(&[1, 2]), q(&[2, 3])], EnergyLaw::Add),
            Err(Error::OverlappingParts(_))
        ));
    }
}
