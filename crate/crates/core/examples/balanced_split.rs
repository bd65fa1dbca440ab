//! Balanced splits of `bw_union(n)`: both parts keep a third of the set,
//! and the three energy-product ratios are printed for each `n`.
//!
//! `cargo run --release --example balanced_split -- 16 32 64`
//! (prefix the sizes with `gp` to use geometric progressions instead)

use std::time::Instant;

use energylab::decompose::{balanced_decompose, product_energy_pipeline};
use energylab::FamilySpec;

fn main() -> energylab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let geometric = args.first().is_some_and(|a| a == "gp");
    let mut ladder: Vec<usize> = args.iter().filter_map(|s| s.parse().ok()).collect();
    if ladder.is_empty() {
        ladder = vec![16, 32, 64];
    }
    println!("{:>5} {:>6} {:>5} {:>5} {:>16} {:>12} {:>12} {:>12} {:>8}", "n", "|A|", "|B|", "|C|", "branch", "3/2-ratio", "C-ratio", "28/5-ratio", "secs");
    for n in ladder {
        let spec = if geometric { FamilySpec::gp(1, 2, n) } else { FamilySpec::bw_union(n) };
        let a = spec.generate()?;
        let t = Instant::now();
        let s = balanced_decompose(&a)?;
        let p = product_energy_pipeline(&a)?;
        println!(
            "{:>5} {:>6} {:>5} {:>5} {:>16} {:>12} {:>12} {:>12} {:>8.2}",
            n,
            a.len(),
            s.b.len(),
            s.c.len(),
            format!("{:?}", s.branch),
            s.ratio_three_halves.ratio,
            s.ratio_complex.as_ref().map_or(f64::NAN, |r| r.ratio),
            p.ratio.ratio,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
