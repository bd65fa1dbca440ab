//! Exact point–line incidences in the plane and point–plane incidences in
//! space, with the plane family that turns additive energy into incidences.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{rat_int, FieldElem, FieldKind, GroundField};
use crate::precise::{precision_digits, sig6, Decimal, PowerProduct};
use crate::set::FiniteSet;
use crate::setfile::parse_header;

pub type Point = Vec<FieldElem>;

/// Distinct points of `𝔽²` or `𝔽³`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointSet {
    field: GroundField,
    dim: usize,
    points: Vec<Point>,
}

fn check_field(field: GroundField, xs: &[FieldElem]) -> Result<()> {
    match xs.iter().find(|x| x.field() != field) {
        Some(x) => Err(Error::FieldMismatch(field, x.field())),
        None => Ok(()),
    }
}

impl PointSet {
    /// Duplicates are merged.
    pub fn new(field: GroundField, dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::OutOfRange(format!("dimension {dim} (need 2 or 3)")));
        }
        let mut pts: Vec<Point> = points.into_iter().collect();
        for p in &pts {
            if p.len() != dim {
                return Err(Error::OutOfRange(format!("point with {} coordinates in dimension {dim}", p.len())));
            }
            check_field(field, p)?;
        }
        pts.sort();
        pts.dedup();
        Ok(PointSet { field, dim, points: pts })
    }

    /// The product set `s₁ × … × s_dim`.
    pub fn grid(sets: &[&FiniteSet]) -> Result<Self> {
        let field = sets.first().map_or(GroundField::char0(), |s| s.field());
        let mut pts: Vec<Point> = vec![Vec::new()];
        for s in sets {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    s.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x.clone());
                        q
                    })
                })
                .collect();
        }
        Self::new(field, sets.len(), pts)
    }

    pub fn field(&self) -> GroundField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[FieldElem]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }
}

/// `y = slope·x + intercept`, or `x = c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Sloped { slope: FieldElem, intercept: FieldElem },
    Vertical(FieldElem),
}

impl Line {
    /// The line `ax + by + c = 0`.
    pub fn general(a: &FieldElem, b: &FieldElem, c: &FieldElem) -> Result<Self> {
        if !b.is_zero() {
            Ok(Line::Sloped {
                slope: -&(a / b),
                intercept: -&(c / b),
            })
        } else if !a.is_zero() {
            Ok(Line::Vertical(-&(c / a)))
        } else {
            Err(Error::OutOfRange("a line needs (a, b) ≠ 0".into()))
        }
    }

    pub fn through(p: &[FieldElem], q: &[FieldElem]) -> Result<Self> {
        if p == q {
            return Err(Error::Precondition("two distinct points determine a line".into()));
        }
        if p[0] == q[0] {
            return Ok(Line::Vertical(p[0].clone()));
        }
        let slope = &(&q[1] - &p[1]) / &(&q[0] - &p[0]);
        let intercept = &p[1] - &(&slope * &p[0]);
        Ok(Line::Sloped { slope, intercept })
    }

    pub fn contains(&self, p: &[FieldElem]) -> bool {
        match self {
            Line::Sloped { slope, intercept } => p[1] == &(slope * &p[0]) + intercept,
            Line::Vertical(c) => p[0] == *c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineFamily {
    field: GroundField,
    lines: Vec<Line>,
}

impl LineFamily {
    /// Duplicates are merged.
    pub fn new(field: GroundField, lines: impl IntoIterator<Item = Line>) -> Result<Self> {
        let mut lines: Vec<Line> = lines.into_iter().collect();
        for l in &lines {
            match l {
                Line::Sloped { slope, intercept } => check_field(field, &[slope.clone(), intercept.clone()])?,
                Line::Vertical(c) => check_field(field, std::slice::from_ref(c))?,
            }
        }
        lines.sort();
        lines.dedup();
        Ok(LineFamily { field, lines })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// `αx + βy + γz + δ = 0`, scaled so the first nonzero of `(α, β, γ)` is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Plane([FieldElem; 4]);

impl Plane {
    pub fn new(alpha: FieldElem, beta: FieldElem, gamma: FieldElem, delta: FieldElem) -> Result<Self> {
        let c = [alpha, beta, gamma, delta];
        check_field(c[0].field(), &c)?;
        let Some(lead) = c[..3].iter().find(|x| !x.is_zero()).cloned() else {
            return Err(Error::OutOfRange("a plane needs (α, β, γ) ≠ 0".into()));
        };
        Ok(Plane(c.map(|x| &x / &lead)))
    }

    pub fn through(p: &[FieldElem], q: &[FieldElem], r: &[FieldElem]) -> Result<Self> {
        let u: Vec<FieldElem> = (0..3).map(|i| &q[i] - &p[i]).collect();
        let v: Vec<FieldElem> = (0..3).map(|i| &r[i] - &p[i]).collect();
        let cross = |i: usize, j: usize| &(&u[i] * &v[j]) - &(&u[j] * &v[i]);
        let n = [cross(1, 2), cross(2, 0), cross(0, 1)];
        if n.iter().all(|x| x.is_zero()) {
            return Err(Error::Precondition("three collinear points do not determine a plane".into()));
        }
        let d = -&(0..3).fold(p[0].field().zero(), |acc, i| &acc + &(&n[i] * &p[i]));
        let [a, b, c] = n;
        Plane::new(a, b, c, d)
    }

    pub fn coeffs(&self) -> &[FieldElem; 4] {
        &self.0
    }

    fn eval(&self, p: &[FieldElem]) -> FieldElem {
        (0..3).fold(self.0[3].clone(), |acc, i| &acc + &(&self.0[i] * &p[i]))
    }

    pub fn contains(&self, p: &[FieldElem]) -> bool {
        self.eval(p).is_zero()
    }

    /// Index of the leading (unit) coefficient.
    fn pivot(&self) -> usize {
        (0..3).find(|&i| !self.0[i].is_zero()).unwrap()
    }

    /// Solves for the pivot coordinate given the other two, in order.
    fn solve(&self, rest: &[FieldElem; 2]) -> FieldElem {
        let k = self.pivot();
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        let s = &(&self.0[others[0]] * &rest[0]) + &(&self.0[others[1]] * &rest[1]);
        -&(&s + &self.0[3])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneFamily {
    field: GroundField,
    planes: Vec<Plane>,
}

impl PlaneFamily {
    /// Duplicates (up to scaling) are merged.
    pub fn new(field: GroundField, planes: impl IntoIterator<Item = Plane>) -> Result<Self> {
        let mut planes: Vec<Plane> = planes.into_iter().collect();
        for p in &planes {
            check_field(field, &p.0)?;
        }
        planes.sort();
        planes.dedup();
        Ok(PlaneFamily { field, planes })
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LineIncidences {
    #[serde(rename = "I")]
    pub incidences: u64,
    pub m: usize,
    pub n: usize,
    /// `(mn)^{2/3} + m + n`.
    pub bound: Decimal,
    pub ratio: f64,
    /// `I ≤ 3·bound`, over the rationals only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_harness_constant: Option<bool>,
}

/// Empirical constant for the point–line bound over the rationals.
pub const LINE_HARNESS_CONSTANT: u64 = 3;

fn line_bound(m: usize, n: usize) -> Result<Decimal> {
    let digits = precision_digits();
    let mn = rat_int((m as u128) * (n as u128));
    let main = PowerProduct::new().pow(mn, 2, 3).eval(digits)?;
    Ok(main.add(&Decimal::from_rational(&rat_int((m + n) as u64), digits)))
}

fn decimal_ratio(i: u64, bound: &Decimal) -> f64 {
    let b = bound.to_f64();
    if b == 0.0 {
        return if i == 0 { 0.0 } else { f64::INFINITY };
    }
    sig6(i as f64 / b)
}

pub fn count_line_incidences(points: &PointSet, lines: &LineFamily) -> Result<LineIncidences> {
    if points.dim != 2 {
        return Err(Error::Precondition("line incidences need points in the plane".into()));
    }
    if !points.is_empty() && !lines.is_empty() && points.field != lines.field {
        return Err(Error::FieldMismatch(points.field, lines.field));
    }
    let mut xs: HashMap<&FieldElem, u64> = HashMap::new();
    for p in &points.points {
        *xs.entry(&p[0]).or_default() += 1;
    }
    let incidences: u64 = lines
        .lines
        .par_iter()
        .map(|l| match l {
            Line::Vertical(c) => xs.get(c).copied().unwrap_or(0),
            Line::Sloped { slope, intercept } => xs
                .keys()
                .filter(|&&x| points.contains(&[(*x).clone(), &(slope * x) + intercept]))
                .count() as u64,
        })
        .sum();
    let (m, n) = (lines.len(), points.len());
    let bound = line_bound(m, n)?;
    let within = points.field.is_char0().then(|| {
        let lhs = Decimal::from_rational(&rat_int(incidences), bound.digits());
        lhs.le_rel(&bound.times(LINE_HARNESS_CONSTANT), bound.digits())
    });
    Ok(LineIncidences {
        ratio: decimal_ratio(incidences, &bound),
        incidences,
        m,
        n,
        bound,
        within_harness_constant: within,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneIncidences {
    #[serde(rename = "I")]
    pub incidences: u64,
    pub m: usize,
    pub n: usize,
    /// Maximum number of collinear points.
    pub k: usize,
    /// `m(n^{1/2} + k)`.
    pub bound: Decimal,
    pub ratio: f64,
    /// `n ≤ p²`; always true over the rationals.
    pub n_within_p2: bool,
    /// `n ≤ m`, as the point–plane bound assumes.
    pub n_at_most_m: bool,
}

/// Counts by solving each plane for its pivot coordinate over the projections
/// of the point set.
fn plane_incidence_count(points: &PointSet, planes: &[Plane]) -> u64 {
    let proj: Vec<Vec<[FieldElem; 2]>> = (0..3)
        .map(|k| {
            let mut v: Vec<[FieldElem; 2]> = points
                .points
                .iter()
                .map(|p| {
                    let o: Vec<&FieldElem> = (0..3).filter(|&i| i != k).map(|i| &p[i]).collect();
                    [o[0].clone(), o[1].clone()]
                })
                .collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let set: HashSet<&[FieldElem]> = points.points.iter().map(|p| p.as_slice()).collect();
    planes
        .par_iter()
        .map(|pl| {
            let k = pl.pivot();
            proj[k]
                .iter()
                .filter(|rest| {
                    let mut pt = Vec::with_capacity(3);
                    let mut it = rest.iter();
                    for i in 0..3 {
                        pt.push(if i == k { pl.solve(rest) } else { it.next().unwrap().clone() });
                    }
                    set.contains(pt.as_slice())
                })
                .count() as u64
        })
        .sum()
}

pub fn count_plane_incidences(points: &PointSet, planes: &PlaneFamily) -> Result<PlaneIncidences> {
    if points.dim != 3 {
        return Err(Error::Precondition("plane incidences need points in space".into()));
    }
    if !points.is_empty() && !planes.is_empty() && points.field != planes.field {
        return Err(Error::FieldMismatch(points.field, planes.field));
    }
    let incidences = plane_incidence_count(points, &planes.planes);
    let (m, n) = (planes.len(), points.len());
    let k = if n >= 2 { max_collinear(points)? } else { n };
    let digits = precision_digits();
    let root = PowerProduct::new().pow(rat_int(n as u64), 1, 2).eval(digits)?;
    let inner = root.add(&Decimal::from_rational(&rat_int(k as u64), digits));
    let bound = inner.times(m as u64);
    let n_within_p2 = match points.field.kind() {
        FieldKind::Prime(p) => (n as u128) <= (p as u128).pow(2),
        FieldKind::Char0 => true,
    };
    Ok(PlaneIncidences {
        ratio: decimal_ratio(incidences, &bound),
        incidences,
        m,
        n,
        k,
        bound,
        n_within_p2,
        n_at_most_m: n <= m,
    })
}

/// The largest number of points on one line.
pub fn max_collinear(points: &PointSet) -> Result<usize> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    let pts = &points.points;
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dirs: HashMap<Vec<FieldElem>, usize> = HashMap::new();
            for q in &pts[i + 1..] {
                let d: Vec<FieldElem> = q.iter().zip(&pts[i]).map(|(a, b)| a - b).collect();
                let lead = d.iter().find(|x| !x.is_zero()).unwrap().clone();
                *dirs.entry(d.iter().map(|x| x / &lead).collect()).or_default() += 1;
            }
            dirs.values().max().map_or(1, |&c| c + 1)
        })
        .max()
        .unwrap_or(1);
    Ok(best)
}

/// Work cap on each side of the energy/plane cross-check.
pub const CROSSCHECK_CAP: u128 = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct Crosscheck {
    pub m: usize,
    pub n: usize,
    pub plane_incidences: u64,
    pub equation_solutions: u64,
    pub equal: bool,
}

/// Planes `α'x + y − z/p − a = 0` for `(a, p, α') ∈ A1 × P × A` against the
/// points `(1/p', a', α) ∈ P⁻¹ × A1 × A`; an incidence is exactly a solution
/// of `a + α/p = a' + α'/p'`, which is also counted directly.
pub fn energy_plane_crosscheck(a1: &FiniteSet, p: &FiniteSet, a: &FiniteSet) -> Result<Crosscheck> {
    let field = a.field();
    for s in [a1, p] {
        if s.field() != field {
            return Err(Error::FieldMismatch(field, s.field()));
        }
    }
    if !p.excludes_zero() {
        return Err(Error::ZeroElement("the ratio set of the cross-check"));
    }
    let m = (a1.len() as u128) * (p.len() as u128) * (a.len() as u128);
    if m > CROSSCHECK_CAP {
        return Err(Error::CapExceeded { work: m, cap: CROSSCHECK_CAP });
    }
    let one = field.one();
    let mut planes = Vec::with_capacity(m as usize);
    for x in a1 {
        for q in p {
            for al in a {
                planes.push(Plane::new(al.clone(), one.clone(), -&q.inv()?, -x)?);
            }
        }
    }
    let pinv = p.reciprocal()?;
    let points = PointSet::grid(&[&pinv, a1, a])?;
    let plane_incidences = plane_incidence_count(&points, &planes);

    let mut reps: HashMap<FieldElem, u64> = HashMap::new();
    for x in a1 {
        for q in p {
            for al in a {
                *reps.entry(x + &(al / q)).or_default() += 1;
            }
        }
    }
    let equation_solutions: u64 = reps.values().map(|r| r * r).sum();
    Ok(Crosscheck {
        m: planes.len(),
        n: points.len(),
        plane_incidences,
        equation_solutions,
        equal: plane_incidences == equation_solutions,
    })
}

fn read_rows(text: &str) -> Result<(GroundField, Vec<Vec<FieldElem>>)> {
    let mut field = GroundField::char0();
    if let Some(first) = text.lines().next() {
        if let Some(h) = parse_header(first) {
            field = h?;
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row = rec
            .iter()
            .map(|s| field.parse(s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line, msg },
                other => other,
            })?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok((field, rows))
}

fn same_width(rows: &[Vec<FieldElem>], want: &[usize], what: &str) -> Result<usize> {
    let w = rows.first().map_or(want[0], |r| r.len());
    if !want.contains(&w) || rows.iter().any(|r| r.len() != w) {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{what} rows must all have one of {want:?} columns"),
        });
    }
    Ok(w)
}

/// One point per row: `x,y` or `x,y,z`.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let (field, rows) = read_rows(text)?;
    let dim = same_width(&rows, &[2, 3], "point")?;
    PointSet::new(field, dim, rows)
}

/// One line per row, `a,b,c` for `ax + by + c = 0`.
pub fn parse_lines(text: &str) -> Result<LineFamily> {
    let (field, rows) = read_rows(text)?;
    same_width(&rows, &[3], "line")?;
    let lines = rows.iter().map(|r| Line::general(&r[0], &r[1], &r[2])).collect::<Result<Vec<_>>>()?;
    LineFamily::new(field, lines)
}

/// One plane per row, `α,β,γ,δ` for `αx + βy + γz + δ = 0`.
pub fn parse_planes(text: &str) -> Result<PlaneFamily> {
    let (field, rows) = read_rows(text)?;
    same_width(&rows, &[4], "plane")?;
    let planes = rows
        .into_iter()
        .map(|r| {
            let [a, b, c, d]: [FieldElem; 4] = r.try_into().unwrap();
            Plane::new(a, b, c, d)
        })
        .collect::<Result<Vec<_>>>()?;
    PlaneFamily::new(field, planes)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&std::fs::read_to_string(path)?)
}

pub fn read_lines(path: &Path) -> Result<LineFamily> {
    parse_lines(&std::fs::read_to_string(path)?)
}

pub fn read_planes(path: &Path) -> Result<PlaneFamily> {
    parse_planes(&std::fs::read_to_string(path)?)
}
