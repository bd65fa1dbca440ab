//! Prime-field side: energies over dilates, their moments and dyadic ladder,
//! the representation-count pipeline and the range set `Q`.
//!
//! `cargo run --release --example fp_growth -- 499 7`

use energylab::family::nonzero_residues;
use energylab::fpgrowth::{energy_over_dilates, growth_prefix_len, had_pipeline, range_set, DilateLaw, HadSign};
use energylab::{FamilySpec, GroundField};

fn main() -> energylab::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|s| s.parse::<u64>().ok());
    let p = args.next().unwrap_or(499);
    let seed = args.next().unwrap_or(7);
    let field = GroundField::prime(p)?;
    let size = (p as f64).powf(0.61).ceil() as usize;
    let a = FamilySpec::random_sized(nonzero_residues(field)?, size, seed).generate()?;

    let r = range_set(&a)?;
    println!("p = {p}, |A| = {size}: |Q| = {}, Q/p = {}", r.q, r.coverage);

    for law in [DilateLaw::AddDilate, DilateLaw::MulTranslate] {
        let d = energy_over_dilates(&a, law)?;
        let l = d.ladder();
        println!("{law:?}: E = {}, Σ E_x = {} ({}·|A|⁴), levels {:?}, small {}", d.energy, d.total, d.total_ratio, l.levels, l.small);
        for s in energylab::fpgrowth::default_moments() {
            let m = d.moment(&s)?;
            println!("    moment s = {}: ratio {}", m.s, m.ratio);
        }
    }

    let g = had_pipeline(&a, HadSign::Minus)?;
    println!(
        "pipeline on the first {} elements (n⁵ ≤ p³ allows {}): |B| = {}, |C| = {}, ℰ = {}, ℰ·p/n⁸ = {}, identities {}",
        g.a.len(),
        growth_prefix_len(p),
        g.b.len(),
        g.c.len(),
        g.solutions.e_cal,
        g.e_cal_normalized,
        if g.identities_hold() { "hold" } else { "FAIL" }
    );
    for w in &g.warnings {
        println!("    warning: {w}");
    }
    Ok(())
}
