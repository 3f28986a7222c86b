//! Smooth Littlewood-Paley blocks and the pieces T_j of a square function.

use lpsq::harness::{FamilyKind, TestFamily};
use lpsq::operators::{time_grid_for, tj_diagnostic, LPDecomposition};
use lpsq::{Geometry, Kernel};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::default_for(1)?;
    let dec = LPDecomposition::covering(&geom);
    println!(
        "partition of unity residual {:.2e}",
        dec.partition_residual(&geom)
    );
    let k = Kernel::Haar1D;
    let tg = time_grid_for(&k, &geom);
    let f = TestFamily::new(FamilyKind::ModulatedBumps, 1, 7)?.member(geom, 0)?;
    let d = tj_diagnostic(&k, &f, &dec, (-6, 6), &tg)?;
    for (j, n) in d.j.iter().zip(&d.norms) {
        println!("  j = {j:>3}  ||T_j f|| = {n:.4e}");
    }
    println!("max(S f - sum_j T_j f) = {:.2e}", d.domination_excess);
    println!("decay slope for j in 2..6: {:.3}", d.decay_slope(2, 6));
    Ok(())
}
