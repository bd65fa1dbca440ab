//! The two CSV sweeps: decomposition ratios along a `bw_union` ladder, and
//! range coverage plus the normalized solution count over a list of primes.
//!
//! `cargo run --release --example sweeps`

use energylab::report::{decompose_sweep, fp_sweep, ratios_nondecreasing, to_csv, SweepFamily, DECOMPOSE_HEADER, FP_HEADER};

fn main() -> energylab::Result<()> {
    let rows = decompose_sweep(SweepFamily::BwUnion, &[16, 32, 64, 128])?;
    print!("{}", to_csv(&DECOMPOSE_HEADER, &rows)?);
    println!("ratios nondecreasing: {}\n", ratios_nondecreasing(&rows));
    print!("{}", to_csv(&FP_HEADER, &fp_sweep(&[101, 499, 1009], 0.61, 1)?)?);
    Ok(())
}
