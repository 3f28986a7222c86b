//! Pointwise domination of sup_t |psi_t * f| by the rough maximal operator M_Omega f.
//!
//! For each input the smallest c with sup_t |psi_t * f| <= c M_Omega f is
//! recorded. The constants should not drift between the two halves of the family.

use lpsq::harness::{domination_sweep, FamilyKind, TestFamily};
use lpsq::{Geometry, Kernel, SphereFunction};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::default_for(1)?;
    let fam = TestFamily::new(FamilyKind::ModulatedBumps, 20, 11)?;
    for k in [
        Kernel::Haar1D,
        Kernel::poisson(1),
        Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2))?,
    ] {
        let d = domination_sweep(&k, &fam, geom)?;
        println!(
            "{:<24} c = {:.3} / {:.3}  spread {:.3}",
            d.kernel, d.first_half, d.second_half, d.spread
        );
    }
    Ok(())
}
