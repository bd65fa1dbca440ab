//! One extraction step on a set: the popular-slope class, the point set on
//! those lines, the extracted subset and the incidence bounds it satisfies.
//!
//! `cargo run --example extract_certificate -- 24`

use energylab::decompose::{extract_structured_subset, verify_extraction_bound, BoundTarget, ExtractLaw};
use energylab::FamilySpec;

fn main() -> energylab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(24);
    let a = FamilySpec::bw_union(n).generate()?;
    for law in [ExtractLaw::MulSlopes, ExtractLaw::AddSums, ExtractLaw::SubDifferences] {
        let c = extract_structured_subset(&a, law)?;
        c.verify(&a)?;
        println!(
            "{law:?}: E = {}, |P| = {}, t = {}, |S| = {}, |A1| = {} via {:?} (q = {}){}",
            c.source_energy,
            c.p.len(),
            c.t,
            c.s_size,
            c.a1.len(),
            c.axis,
            c.q,
            if c.fallback { ", fallback" } else { "" }
        );
        let targets: &[BoundTarget] = match law {
            ExtractLaw::MulSlopes => &[BoundTarget::PlaneIncidence, BoundTarget::LineIncidence],
            ExtractLaw::AddSums => &[BoundTarget::ProductsOfSums],
            ExtractLaw::SubDifferences => &[],
        };
        for &t in targets {
            let r = verify_extraction_bound(&c, &a, t)?;
            println!("    {}: {} / {} = {}", r.label, r.lhs.sig6(), r.rhs.sig6(), r.ratio);
        }
    }
    Ok(())
}
