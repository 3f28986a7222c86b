//! Carleson measure of |b * psi_t|^2 dx dt/t for b = log|x|, normalized by cube size.
//!
//! The ratio stays bounded across scales, which is the numerical face of
//! b being in BMO.

use lpsq::carleson::{carleson_ratio, CarlesonExperiment};
use lpsq::operators::time_grid_for;
use lpsq::weights::log_abs_cell_means;
use lpsq::{CubeFamily, Geometry, Kernel, Weight};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::default_for(1)?;
    let k = Kernel::poisson(1);
    let mut exp = CarlesonExperiment {
        time_grid: time_grid_for(&k, &geom),
        kernel: k,
        b: log_abs_cell_means(geom)?,
        weight: None,
        cubes: CubeFamily::dyadic(&geom, 5, 7)?,
        bmo_cubes: Some(CubeFamily::dyadic(&geom, 5, 11)?),
    };
    let r = carleson_ratio(&exp)?;
    println!("||b||_BMO ~ {:.4}", r.bmo);
    for (side, sup) in &r.per_scale {
        println!("  side {side:<6} sup ratio {sup:.4}");
    }
    println!("scale variation {:.3}", r.scale_variation());

    exp.weight = Some(Weight::power(0.5));
    let w = carleson_ratio(&exp)?;
    println!("with w = |x|^0.5: sup ratio {:.4}", w.sup_ratio);
    Ok(())
}
