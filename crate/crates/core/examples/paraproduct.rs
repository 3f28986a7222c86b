//! A truncated paraproduct with b = log|x| and a check of its dual form.

use lpsq::carleson::{dual_pairing, pairing, paraproduct};
use lpsq::harness::modulated_gaussian;
use lpsq::weights::log_abs_cell_means;
use lpsq::{Geometry, Kernel, TimeGrid};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::new(1, 16.0, 1024)?;
    let tg = TimeGrid::new(-4, 1, 8)?;
    let (eta, psi, phi) = (
        Kernel::poisson(1),
        Kernel::Haar1D,
        Kernel::PoissonKernel { dim: 1 },
    );
    let b = log_abs_cell_means(geom)?;
    let f = modulated_gaussian(geom, [0.5, 0.0], 0.7, [2.0, 0.0], 0.0)?;
    let g = modulated_gaussian(geom, [-0.3, 0.0], 1.2, [0.5, 0.0], 1.0)?;

    let pi = paraproduct(&eta, &psi, &phi, &b, &f, &tg, 0.25, 2.0)?;
    println!("sup |pi_b f| = {:.4e}", pi.sup_abs());
    let lhs = pairing(&pi, &g)?;
    let rhs = dual_pairing(&eta, &psi, &phi, &b, &f, &g, &tg, 0.25, 2.0)?;
    println!("<pi_b f, g>      = {lhs:.10}");
    println!("dual computation = {rhs:.10}");
    println!("gap              = {:.2e}", (lhs - rhs).norm());
    Ok(())
}
