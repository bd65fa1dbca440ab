//! Runs the Balog–Wooley decomposition on `bw_union(n)` for a ladder of `n`
//! and prints how `max(E⁺(B), E^×(C))` compares with `|A|^{3−δ}`.
//!
//! `cargo run --release --example bw_ladder -- 16 32 64 128`

use std::time::Instant;

use energylab::decompose::bw_decompose;
use energylab::{self_energy, EnergyLaw, FamilySpec};

fn main() -> energylab::Result<()> {
    let mut ladder: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if ladder.is_empty() {
        ladder = vec![16, 32, 64, 128];
    }
    println!("{:>5} {:>6} {:>14} {:>14} {:>6} {:>12} {:>8}", "n", "|A|", "E+(B)", "E×(C)", "steps", "ratio", "secs");
    for n in ladder {
        let a = FamilySpec::bw_union(n).generate()?;
        let t = Instant::now();
        let trace = bw_decompose(&a, None)?;
        let e_b = self_energy(&trace.b, EnergyLaw::Add)?;
        println!(
            "{:>5} {:>6} {:>14} {:>14} {:>6} {:>12} {:>8.2}",
            n,
            a.len(),
            e_b.get(),
            trace.final_energy.get(),
            trace.steps.len(),
            trace.reports[1].ratio,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
