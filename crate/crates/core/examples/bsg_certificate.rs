//! Extracts `A*` and `P` so that any `k` elements of `A*` share many
//! representations through `P`, then checks the claim, exhaustively when the
//! tuple count is small.
//!
//! `cargo run --release --example bsg_certificate -- 32 3`

use energylab::bsg::{bsg_extract, verify_bsg, VerifyMode};
use energylab::{EnergyLaw, FamilySpec};

fn main() -> energylab::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|s| s.parse::<u64>().ok());
    let n = args.next().unwrap_or(32) as usize;
    let k = args.next().unwrap_or(2) as u32;
    for (name, spec, law) in [
        ("ap", FamilySpec::ap(1, 1, n), EnergyLaw::Add),
        ("bw_union", FamilySpec::bw_union(n), EnergyLaw::Add),
        ("gp", FamilySpec::gp(1, 2, n), EnergyLaw::Mul),
    ] {
        let a = spec.generate()?;
        let c = bsg_extract(&a, k, law)?;
        let v = verify_bsg(&c, &a, VerifyMode::auto(&c, 1000, 1))?;
        println!(
            "{name:<9} |A| = {:<4} E = {:<9} K = {:<12} |A*| = {:<4} |P| = {:<5} constants {} verify {:?}: {} tuples, min {} ≥ {} {}",
            a.len(),
            c.energy,
            c.big_k.to_string(),
            c.a_star.len(),
            c.p.len(),
            if c.constants_hold() { "ok" } else { "FAIL" },
            v.mode,
            v.checked_tuples,
            v.min_intersection,
            v.bound,
            if v.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
