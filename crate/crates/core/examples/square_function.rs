//! Square function of the Poisson derivative kernel.
//!
//! For band-limited input with no mean the L^2 ratio ||S f|| / ||f|| is 1/2.
//! A Gaussian has a nonzero mean that the periodic box cannot see, so its
//! ratio falls short unless the box is large.

use lpsq::grid::lp_norm;
use lpsq::harness::{FamilyKind, TestFamily};
use lpsq::operators::{square_function, time_grid_for};
use lpsq::{Geometry, Kernel, SampledFunction};

fn ratio(k: &Kernel, f: &SampledFunction) -> lpsq::Result<f64> {
    let tg = time_grid_for(k, f.geometry());
    let s = square_function(k, f, &tg)?;
    Ok(lp_norm(&s.values, 2.0, None)? / lp_norm(f, 2.0, None)?)
}

fn main() -> lpsq::Result<()> {
    let k = Kernel::poisson(1);
    let geom = Geometry::default_for(1)?;
    for f in TestFamily::new(FamilyKind::BandLimited, 4, 1)?.members(geom)? {
        println!("band-limited       ratio {:.5}", ratio(&k, &f)?);
    }
    for (r, n) in [(16.0, 4096), (64.0, 16384), (256.0, 65536)] {
        let g = Geometry::new(1, r, n)?;
        let f = SampledFunction::from_real_fn(g, |x| (-x[0] * x[0] / 2.0).exp())?;
        println!("gaussian, R = {r:<5} ratio {:.5}", ratio(&k, &f)?);
    }
    Ok(())
}
