//! JSON reports for single runs and CSV tables for sweeps.

use serde::Serialize;
use serde_json::Value;

use crate::decompose::bw_decompose;
use crate::energy::{self_energy, EnergyLaw};
use crate::error::{Error, Result};
use crate::family::{nonzero_residues, FamilySpec};
use crate::field::GroundField;
use crate::fpgrowth::{had_pipeline, range_set, HadSign};
use crate::precise::sig6;

pub const SCHEMA: &str = "energylab.report/v1";

/// A versioned, replayable report: the config echo reproduces the results.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub results: Value,
    /// Whether every exact check of the run held.
    pub pass: bool,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvariantBreach(format!("serialization failed: {e}")))
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize, results: &impl Serialize) -> Result<Self> {
        Ok(Report {
            schema: SCHEMA,
            command: command.to_string(),
            config: to_value(config)?,
            results: to_value(results)?,
            pass: true,
            warnings: Vec::new(),
            timing_ms: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }
}

/// One row of a decomposition sweep.
#[derive(Clone, Debug, Serialize)]
pub struct DecomposeRow {
    pub n: usize,
    pub size: usize,
    pub add_energy_b: u128,
    pub mul_energy_c: u128,
    /// `|A|^{3−δ}`.
    pub bound: String,
    /// `max(E⁺(B), E^×(C)) / |A|^{3−δ}`.
    pub ratio: f64,
    /// `ratio / log₂³|A|`.
    pub ratio_over_log3: f64,
}

pub const DECOMPOSE_HEADER: [&str; 7] = ["n", "size", "add_energy_b", "mul_energy_c", "bound", "ratio", "ratio_over_log3"];

/// Which family a decomposition sweep generates for each `n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    BwUnion,
    BwIntertwined,
    Ap,
    Gp,
}

impl SweepFamily {
    pub fn spec(self, n: usize) -> FamilySpec {
        match self {
            SweepFamily::BwUnion => FamilySpec::bw_union(n),
            SweepFamily::BwIntertwined => FamilySpec::bw_intertwined(n),
            SweepFamily::Ap => FamilySpec::ap(1, 1, n),
            SweepFamily::Gp => FamilySpec::gp(1, 2, n),
        }
    }
}

pub fn decompose_sweep(family: SweepFamily, ladder: &[usize]) -> Result<Vec<DecomposeRow>> {
    ladder
        .iter()
        .map(|&n| {
            let a = family.spec(n).generate()?;
            let trace = bw_decompose(&a, None)?;
            trace.check_partition(&a)?;
            let e_b = self_energy(&trace.b, EnergyLaw::Add)?.get();
            let r = &trace.reports[1];
            let log = (a.len() as f64).log2().max(1.0);
            Ok(DecomposeRow {
                n,
                size: a.len(),
                add_energy_b: e_b,
                mul_energy_c: trace.final_energy.get(),
                bound: r.rhs.sig6().to_string(),
                ratio: r.ratio,
                ratio_over_log3: sig6(r.ratio / log.powi(3)),
            })
        })
        .collect()
}

/// Whether the ratio column never decreases along the ladder.
pub fn ratios_nondecreasing(rows: &[DecomposeRow]) -> bool {
    rows.windows(2).all(|w| w[0].ratio <= w[1].ratio)
}

/// One row of a prime-field growth sweep.
#[derive(Clone, Debug, Serialize)]
pub struct FpRow {
    pub p: u64,
    pub size: usize,
    pub q: usize,
    pub q_over_p: f64,
    /// Size of the prefix the pipeline used (`n⁵ ≤ p³`).
    pub used: usize,
    pub e_cal: u128,
    /// `ℰ·p/used⁸`.
    pub e_cal_normalized: f64,
}

pub const FP_HEADER: [&str; 7] = ["p", "size", "q", "q_over_p", "used", "e_cal", "e_cal_normalized"];

/// `⌈p^exponent⌉`, the set size used by the growth sweep.
pub fn growth_size(p: u64, exponent: f64) -> usize {
    (p as f64).powf(exponent).ceil() as usize
}

/// For each prime, a seeded random `A ⊆ 𝔽p*` of size `⌈p^exponent⌉`.
pub fn fp_sweep(primes: &[u64], exponent: f64, seed: u64) -> Result<Vec<FpRow>> {
    primes
        .iter()
        .map(|&p| {
            let field = GroundField::prime(p)?;
            let size = growth_size(p, exponent).min((p - 1) as usize);
            let a = FamilySpec::random_sized(nonzero_residues(field)?, size, seed).generate()?;
            let range = range_set(&a)?;
            let g = had_pipeline(&a, HadSign::Minus)?;
            Ok(FpRow {
                p,
                size,
                q: range.q,
                q_over_p: range.coverage,
                used: g.a.len(),
                e_cal: g.solutions.e_cal,
                e_cal_normalized: g.e_cal_normalized,
            })
        })
        .collect()
}

/// CSV with a fixed header, written even when there are no rows.
pub fn to_csv<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
