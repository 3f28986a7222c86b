//! Weighted norm ratios of the rough square function over a family of step functions.
//!
//! A ratio that kept growing with the family size would hint at an unbounded
//! operator; the trend compares the later half of the sweep with the earlier half.

use lpsq::harness::{norm_ratio_sweep, FamilyKind, OperatorSpec, TestFamily};
use lpsq::{Geometry, Kernel, SphereFunction, Weight};

fn main() -> lpsq::Result<()> {
    let geom = Geometry::default_for(1)?;
    let op = OperatorSpec::SquareFunction {
        kernel: Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2))?,
        time_grid: None,
    };
    let fam = TestFamily::new(FamilyKind::Steps, 60, 10)?;
    for a in [0.0, 0.5, 1.5] {
        let w = Weight::power(a);
        let r = norm_ratio_sweep(&op, &fam, geom, 2.0, Some(&w), Some(30))?;
        println!(
            "w = |x|^{a:<4} max {:.4}  median {:.4}  trend {:.3}  flags {:?}",
            r.max, r.median, r.trend, r.flags
        );
    }
    Ok(())
}
