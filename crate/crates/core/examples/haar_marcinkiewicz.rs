//! The Haar square function agrees with the Marcinkiewicz integral in one dimension.

use lpsq::harness::{FamilyKind, TestFamily};
use lpsq::operators::{marcinkiewicz_1d, square_function, time_grid_for};
use lpsq::{Geometry, Kernel};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::default_for(1)?;
    let k = Kernel::Haar1D;
    let tg = time_grid_for(&k, &geom);
    for f in TestFamily::new(FamilyKind::Steps, 4, 3)?.members(geom)? {
        let s = square_function(&k, &f, &tg)?.values;
        let m = marcinkiewicz_1d(&f, &tg)?;
        let dev = s
            .values()
            .iter()
            .zip(m.values())
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max);
        println!(
            "max |S f - M f| = {dev:.3e}  (sup S f = {:.4})",
            s.sup_abs()
        );
    }
    Ok(())
}
