//! Size and smoothness seminorms for a few kernels, plus which results apply.
//!
//! ```text
//! cargo run --release --example kernel_seminorms
//! ```

use lpsq::conditions::{classify, seminorm_report, ClassifyParams, McSettings};
use lpsq::{Kernel, SphereFunction};

fn main() -> lpsq::Result<()> {
    let kernels = [
        Kernel::Haar1D,
        Kernel::poisson(1),
        Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2))?,
    ];
    let mc = McSettings {
        samples: 100_000,
        ..McSettings::default()
    };
    for k in &kernels {
        let r = seminorm_report(k, 0.5, 2.0, &mc)?;
        println!("{}", k.name());
        println!("  B_0.5 = {:.6}", r.b_eps.get());
        println!("  D_2   = {:.6}", r.d_u.get());
        println!("  J_0.5 = {:.6}", r.j_eps.get());
        let cls = classify(k, &ClassifyParams::default());
        for c in &cls.checks {
            println!(
                "  {:<12} {}",
                c.result,
                if c.applicable { "applies" } else { "-" }
            );
        }
    }
    Ok(())
}
