//! Canonical finite sets and the basic set arithmetic on them.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, GroundField};
use crate::kernel::PairTable;

/// A binary law for pointwise set arithmetic.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Add,
    Sub,
    Mul,
    Div,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Add => "add",
            Law::Sub => "sub",
            Law::Mul => "mul",
            Law::Div => "div",
        })
    }
}

/// A deduplicated, canonically ordered set of elements of one field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteSet {
    field: GroundField,
    elems: Vec<FieldElem>,
    excludes_zero: bool,
}

impl FiniteSet {
    pub fn empty(field: GroundField) -> Self {
        FiniteSet {
            field,
            elems: Vec::new(),
            excludes_zero: true,
        }
    }

    /// Builds a set, sorting and removing duplicates. All elements must
    /// belong to `field`.
    pub fn new(field: GroundField, elems: impl IntoIterator<Item = FieldElem>) -> Result<Self> {
        let mut v: Vec<FieldElem> = elems.into_iter().collect();
        if let Some(bad) = v.iter().find(|e| e.field() != field) {
            return Err(Error::FieldMismatch(field, bad.field()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self::from_sorted_unchecked(field, v))
    }

    /// Like [`FiniteSet::new`] but rejects duplicates instead of merging them.
    pub fn new_distinct(field: GroundField, elems: impl IntoIterator<Item = FieldElem>) -> Result<Self> {
        let v: Vec<FieldElem> = elems.into_iter().collect();
        let n = v.len();
        let s = Self::new(field, v)?;
        if s.len() != n {
            return Err(Error::Collision(format!(
                "{} of {} elements coincide",
                n - s.len(),
                n
            )));
        }
        Ok(s)
    }

    pub fn from_ints(field: GroundField, vals: &[i64]) -> Result<Self> {
        Self::new(field, vals.iter().map(|&v| field.int(v)))
    }

    /// Shorthand for integer sets over the rationals.
    pub fn rationals(vals: &[i64]) -> Self {
        Self::from_ints(GroundField::char0(), vals).expect("rational set")
    }

    pub(crate) fn from_sorted_unchecked(field: GroundField, elems: Vec<FieldElem>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let excludes_zero = !elems.iter().any(FieldElem::is_zero);
        FiniteSet {
            field,
            elems,
            excludes_zero,
        }
    }

    pub fn field(&self) -> GroundField {
        self.field
    }

    pub fn elems(&self) -> &[FieldElem] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FieldElem> {
        self.elems.iter()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn excludes_zero(&self) -> bool {
        self.excludes_zero
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    pub fn index_of(&self, x: &FieldElem) -> Option<usize> {
        self.elems.binary_search(x).ok()
    }

    pub(crate) fn same_field(&self, other: &FiniteSet) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field, other.field))
        }
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.field == other.field && self.elems.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_field(other)?;
        let mut v: BTreeSet<FieldElem> = self.elems.iter().cloned().collect();
        v.extend(other.elems.iter().cloned());
        Ok(Self::from_sorted_unchecked(self.field, v.into_iter().collect()))
    }

    pub fn intersection(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_field(other)?;
        let v = self.elems.iter().filter(|x| other.contains(x)).cloned().collect();
        Ok(Self::from_sorted_unchecked(self.field, v))
    }

    pub fn difference(&self, other: &FiniteSet) -> Result<FiniteSet> {
        self.same_field(other)?;
        let v = self.elems.iter().filter(|x| !other.contains(x)).cloned().collect();
        Ok(Self::from_sorted_unchecked(self.field, v))
    }

    pub fn is_disjoint(&self, other: &FiniteSet) -> bool {
        self.elems.iter().all(|x| !other.contains(x))
    }

    /// Elements in canonical order whose positions satisfy `keep`.
    pub fn filter_indexed(&self, mut keep: impl FnMut(usize, &FieldElem) -> bool) -> FiniteSet {
        let v = self
            .elems
            .iter()
            .enumerate()
            .filter(|(i, x)| keep(*i, x))
            .map(|(_, x)| x.clone())
            .collect();
        Self::from_sorted_unchecked(self.field, v)
    }

    /// The first `n` elements in canonical order.
    pub fn prefix(&self, n: usize) -> FiniteSet {
        Self::from_sorted_unchecked(self.field, self.elems[..n.min(self.len())].to_vec())
    }

    /// `{x ∘ a : a ∈ A}` for a fixed left operand, as an unordered vector.
    fn map(&self, f: impl Fn(&FieldElem) -> Result<FieldElem>) -> Result<FiniteSet> {
        let v: Result<Vec<_>> = self.elems.iter().map(f).collect();
        FiniteSet::new(self.field, v?)
    }

    /// `{-a}`.
    pub fn negate(&self) -> FiniteSet {
        self.map(|a| Ok(-a)).expect("negation is total")
    }

    /// `{1/a}`; requires `0 ∉ A`.
    pub fn reciprocal(&self) -> Result<FiniteSet> {
        if !self.excludes_zero {
            return Err(Error::ZeroElement("reciprocal set"));
        }
        self.map(FieldElem::inv)
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a FieldElem;
    type IntoIter = std::slice::Iter<'a, FieldElem>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// `A ∘ B = {a ∘ b : a ∈ A, b ∈ B}`.
pub fn pointwise_combine(a: &FiniteSet, b: &FiniteSet, law: Law) -> Result<FiniteSet> {
    Ok(PairTable::build(a, b, law)?.support())
}

/// `{scale·a + shift : a ∈ A}`.
pub fn affine_image(a: &FiniteSet, scale: &FieldElem, shift: &FieldElem) -> Result<FiniteSet> {
    if scale.is_zero() {
        return Err(Error::ZeroScale);
    }
    if scale.field() != a.field() {
        return Err(Error::FieldMismatch(a.field(), scale.field()));
    }
    if shift.field() != a.field() {
        return Err(Error::FieldMismatch(a.field(), shift.field()));
    }
    a.map(|x| Ok(&(scale * x) + shift))
}

/// `R[A] = {(a₁ − a)/(a₂ − a) : a, a₁, a₂ ∈ A, a₂ ≠ a}`.
///
/// A singleton has no admissible triple and yields the empty set.
pub fn r_set(a: &FiniteSet) -> FiniteSet {
    let mut out = BTreeSet::new();
    for pivot in a {
        let diffs: Vec<FieldElem> = a.iter().map(|x| x - pivot).collect();
        for num in &diffs {
            for den in diffs.iter().filter(|d| !d.is_zero()) {
                out.insert(num / den);
            }
        }
    }
    FiniteSet::from_sorted_unchecked(a.field(), out.into_iter().collect())
}

/// Which group law a translate intersection uses.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TranslateLaw {
    Add,
    Mul,
}

/// `A ∩ (A + s)` for [`TranslateLaw::Add`], `A ∩ (s/A)` for [`TranslateLaw::Mul`].
pub fn translate_intersection(a: &FiniteSet, s: &FieldElem, law: TranslateLaw) -> Result<FiniteSet> {
    if s.field() != a.field() {
        return Err(Error::FieldMismatch(a.field(), s.field()));
    }
    let moved = match law {
        TranslateLaw::Add => a.map(|x| Ok(x + s))?,
        TranslateLaw::Mul => {
            if s.is_zero() {
                return Err(Error::ZeroDivisor("multiplicative translate by s = 0"));
            }
            if !a.excludes_zero() {
                return Err(Error::ZeroElement("s/A"));
            }
            a.map(|x| s.try_div(x))?
        }
    };
    a.intersection(&moved)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(vals: &[i64]) -> FiniteSet {
        FiniteSet::rationals(vals)
    }

    fn f7(vals: &[i64]) -> FiniteSet {
        FiniteSet::from_ints(GroundField::prime(7).unwrap(), vals).unwrap()
    }

    fn qs(strs: &[&str]) -> FiniteSet {
        let f = GroundField::char0();
        FiniteSet::new(f, strs.iter().map(|s| f.parse(s).unwrap())).unwrap()
    }

    #[test]
    fn combine_examples() {
        assert_eq!(pointwise_combine(&q(&[1, 2]), &q(&[1, 2]), Law::Add).unwrap(), q(&[2, 3, 4]));
        assert_eq!(
            pointwise_combine(&f7(&[1, 2, 4]), &f7(&[1, 2, 4]), Law::Mul).unwrap(),
            f7(&[1, 2, 4])
        );
        assert_eq!(
            pointwise_combine(&q(&[1, 2, 3]), &q(&[1, 2, 3]), Law::Div).unwrap(),
            qs(&["1/3", "1/2", "2/3", "1", "3/2", "2", "3"])
        );
    }

    #[test]
    fn combine_errors() {
        assert!(matches!(
            pointwise_combine(&q(&[1]), &q(&[0, 1]), Law::Div),
            Err(Error::ZeroDivisor(_))
        ));
        assert!(matches!(
            pointwise_combine(&q(&[1]), &f7(&[1]), Law::Add),
            Err(Error::FieldMismatch(..))
        ));
    }

    #[test]
    fn affine_examples() {
        let f = GroundField::char0();
        let a = q(&[1, 2, 3]);
        assert_eq!(affine_image(&a, &f.int(1), &f.int(0)).unwrap(), a);
        let g = GroundField::prime(7).unwrap();
        assert_eq!(affine_image(&f7(&[1, 2, 4]), &g.int(1), &g.int(3)).unwrap(), f7(&[4, 5, 0]));
        assert_eq!(affine_image(&q(&[1, 2]), &f.int(2), &f.int(-1)).unwrap(), q(&[1, 3]));
        assert_eq!(affine_image(&a, &f.int(0), &f.int(1)), Err(Error::ZeroScale));
    }

    #[test]
    fn r_set_examples() {
        assert_eq!(r_set(&q(&[0, 1])), q(&[0, 1]));
        assert_eq!(r_set(&q(&[0, 1, 2])), qs(&["-1", "0", "1/2", "1", "2"]));
        assert!(r_set(&q(&[5])).is_empty());
    }

    #[test]
    fn translate_examples() {
        let f = GroundField::char0();
        let a = q(&[1, 2, 3, 5]);
        assert_eq!(translate_intersection(&a, &f.int(1), TranslateLaw::Add).unwrap(), q(&[2, 3]));
        assert_eq!(translate_intersection(&a, &f.int(0), TranslateLaw::Add).unwrap(), a);
        let g = GroundField::prime(7).unwrap();
        assert_eq!(
            translate_intersection(&f7(&[1, 2, 4]), &g.int(3), TranslateLaw::Add).unwrap(),
            f7(&[4])
        );
        assert!(translate_intersection(&a, &f.int(0), TranslateLaw::Mul).is_err());
        // 6/A = {6, 3, 2, 6/5}
        assert_eq!(translate_intersection(&a, &f.int(6), TranslateLaw::Mul).unwrap(), q(&[2, 3]));
    }

    #[test]
    fn sets_are_canonical() {
        let s = FiniteSet::from_ints(GroundField::char0(), &[3, 1, 2, 1]).unwrap();
        assert_eq!(s.elems().len(), 3);
        assert_eq!(s.to_string(), "{1, 2, 3}");
        assert!(s.excludes_zero());
        assert!(!q(&[0, 1]).excludes_zero());
        assert!(FiniteSet::new_distinct(GroundField::char0(), vec![GroundField::char0().int(1); 2]).is_err());
    }
}
