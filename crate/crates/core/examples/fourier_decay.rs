//! Averaged Fourier energy of the Haar kernel near zero and infinity.
//!
//! The energy should behave like |xi|^2 for small frequencies and |xi|^-2 for large ones.

use lpsq::fourier_checks::{check_14, decay_profile, default_directions, dyadic_radii};
use lpsq::Kernel;

fn main() -> lpsq::Result<()> {
    let k = Kernel::Haar1D;
    let profile = decay_profile(&k, &default_directions(1, 1), &dyadic_radii(-8, 8, 2), 64)?;
    profile.write_csv(std::io::stdout())?;
    println!();
    println!(
        "slope near 0:   {:.3}",
        profile.slope(2f64.powi(-8), 2f64.powi(-4))
    );
    println!(
        "slope near inf: {:.3}",
        profile.slope(2f64.powi(4), 2f64.powi(8))
    );
    let c = check_14(&k, 0.5)?;
    println!(
        "decay constant {:.4} (doubled range {:.4}), holds: {}",
        c.measured_c, c.measured_c_doubled, c.holds
    );
    Ok(())
}
