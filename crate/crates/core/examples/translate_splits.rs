//! The translate and reciprocal variants of the decomposition, and the split
//! built from the set `R(A)` of ratios.
//!
//! `cargo run --release --example translate_splits -- 16`

use energylab::decompose::{r_set_decompose, translate_decompose, TranslateVariant};
use energylab::set::r_set;
use energylab::{FamilySpec, GroundField};

fn main() -> energylab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let q = GroundField::char0();
    let a = FamilySpec::gp(1, 2, n).generate()?;
    for (label, variant) in [
        ("α = 1", TranslateVariant::MultTranslate(q.int(1))),
        ("α = -3", TranslateVariant::MultTranslate(q.int(-3))),
        ("reciprocal", TranslateVariant::Reciprocal),
    ] {
        let t = translate_decompose(&a, variant, None)?;
        println!(
            "{label}: |B| = {}, |C| = {}, E(B) = {}, E(C') = {}, ratio {}",
            t.b.len(),
            t.c.len(),
            t.b_energy,
            t.c_energy,
            t.ratio.as_ref().map_or(f64::NAN, |r| r.ratio)
        );
    }
    let small = FamilySpec::ap(1, 1, 6).generate()?;
    println!("|R(ap(1,1,6))| = {}", r_set(&small).len());
    let r = r_set_decompose(&small)?;
    println!(
        "R-split: |R| = {}, |R'| = {}, |R''| = {}, mul ratio {}, add ratio {}",
        r.r.len(),
        r.r_prime.len(),
        r.r_dprime.len(),
        r.mul_ratio.ratio,
        r.add_ratio.ratio
    );
    Ok(())
}
