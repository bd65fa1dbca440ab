//! Additive and multiplicative energies of the standard families, with the
//! Cauchy–Schwarz lower bounds on sumset and product set sizes.
//!
//! `cargo run --example energy_basics -- 12`

use energylab::energy::cauchy_schwarz_check;
use energylab::{self_energy, EnergyLaw, FamilySpec, FiniteSet, GroundField};

fn main() -> energylab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let f7 = GroundField::prime(7)?;
    let sets = [
        ("ap(1,1,n)", FamilySpec::ap(1, 1, n).generate()?),
        ("gp(1,2,n)", FamilySpec::gp(1, 2, n).generate()?),
        ("bw_union(n)", FamilySpec::bw_union(n).generate()?),
        ("Sidon {1,2,5,11}", FiniteSet::rationals(&[1, 2, 5, 11])),
        ("{1,2,4} in F_7", FiniteSet::from_ints(f7, &[1, 2, 4])?),
    ];
    println!("{:<18} {:>5} {:>10} {:>10} {:>7} {:>7}", "set", "|A|", "E+", "Ex", "|A+A|", "|AA|");
    for (name, a) in &sets {
        let add = self_energy(a, EnergyLaw::Add)?;
        let mul = self_energy(a, EnergyLaw::Mul)?;
        let cs = cauchy_schwarz_check(a)?;
        assert!(cs.pass);
        println!(
            "{:<18} {:>5} {:>10} {:>10} {:>7} {:>7}",
            name,
            a.len(),
            add.get(),
            mul.get(),
            cs.sumset,
            cs.productset.unwrap_or(0)
        );
    }
    Ok(())
}
