//! Point-line and point-plane incidences on grids, and the check that
//! energy solutions and plane incidences count the same thing.
//!
//! `cargo run --release --example incidences`

use energylab::incidence::{
    count_line_incidences, count_plane_incidences, energy_plane_crosscheck, Line, LineFamily, Plane, PlaneFamily, PointSet,
};
use energylab::{FamilySpec, GroundField};

fn main() -> energylab::Result<()> {
    let q = GroundField::char0();
    for n in [4i64, 8, 16] {
        let a = FamilySpec::ap(1, 1, n as usize).generate()?;
        let b = FamilySpec::ap(1, 1, 2 * n as usize).generate()?;
        let points = PointSet::grid(&[&a, &b])?;
        // lines y = mx + c with small slopes and intercepts meet the grid often
        let mut lines = Vec::new();
        for m in 1..=n / 2 {
            for c in 0..n {
                lines.push(Line::Sloped { slope: q.int(m), intercept: q.int(c) });
            }
        }
        let r = count_line_incidences(&points, &LineFamily::new(q, lines)?)?;
        println!("grid {n}×{}: I = {}, m = {}, n = {}, I/bound = {}", 2 * n, r.incidences, r.m, r.n, r.ratio);
    }

    let f = GroundField::prime(13)?;
    let c = FamilySpec::ap(1, 1, 4).generate_in(f)?;
    let points = PointSet::grid(&[&c, &c, &c])?;
    let mut planes = Vec::new();
    for a in 1..4 {
        for d in 0..6 {
            planes.push(Plane::new(f.int(a), f.int(1), f.int(-1), f.int(d))?);
        }
    }
    let r = count_plane_incidences(&points, &PlaneFamily::new(f, planes)?)?;
    println!("F_13 cube: I = {}, m = {}, n = {}, k = {}, I/bound = {}", r.incidences, r.m, r.n, r.k, r.ratio);

    let a1 = FamilySpec::ap(1, 1, 5).generate()?;
    let p = FamilySpec::gp(1, 2, 4).generate()?;
    let a = FamilySpec::ap(2, 3, 6).generate()?;
    let x = energy_plane_crosscheck(&a1, &p, &a)?;
    println!("crosscheck: {} incidences, {} solutions, equal = {}", x.plane_incidences, x.equation_solutions, x.equal);
    Ok(())
}
