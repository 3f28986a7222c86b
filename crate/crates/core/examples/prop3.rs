//! Monte Carlo check of the log-energy identity for the Haar kernel at xi = 1.

use lpsq::fourier_checks::prop3_identity;
use lpsq::Kernel;

fn main() -> lpsq::Result<()> {
    for samples in [10_000, 100_000, 1_000_000] {
        let r = prop3_identity(&Kernel::Haar1D, [1.0, 0.0], samples, 2024)?;
        println!(
            "n = {samples:>8}  lhs {:.6}  Re rhs {:.6} +- {:.1e}  Im rhs {:.1e}  gap {:.2e}",
            r.lhs, r.rhs_re, r.stderr_re, r.rhs_im, r.rel_gap
        );
    }
    Ok(())
}
