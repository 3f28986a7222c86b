//! Test-function families and empirical operator-norm sweeps.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carleson::{paraproduct, tb_operator};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, Geometry, SampledFunction, TimeGrid};
use crate::kernels::Kernel;
use crate::operators::{
    default_radii, marcinkiewicz_1d, maximal_omega, square_function, sup_dilation, time_grid_for,
};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Gaussians with varied centre and width.
    Gaussians,
    /// Gaussians times a plane wave.
    ModulatedBumps,
    /// Real trigonometric polynomials with grid frequencies `1/4 <= |xi| <= 2`.
    BandLimited,
    /// Sums of indicators of random intervals or boxes.
    Steps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
}

/// Modulated Gaussian `exp(-|x - c|^2 / (2 width^2)) cos(2 pi <nu, x - c> + phase)`.
pub fn modulated_gaussian(
    geom: Geometry,
    center: [f64; 2],
    width: f64,
    nu: [f64; 2],
    phase: f64,
) -> Result<SampledFunction> {
    SampledFunction::from_real_fn(geom, |x| {
        let d = [x[0] - center[0], x[1] - center[1]];
        let r2 = d[0] * d[0] + d[1] * d[1];
        (-r2 / (2.0 * width * width)).exp()
            * (2.0 * PI * (nu[0] * d[0] + nu[1] * d[1]) + phase).cos()
    })
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 2] {
    if dim == 1 {
        [if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0]
    } else {
        let th = rng.gen_range(0.0..2.0 * PI);
        [th.cos(), th.sin()]
    }
}

fn point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> [f64; 2] {
    let x = rng.gen_range(-r..r);
    let y = if dim == 2 { rng.gen_range(-r..r) } else { 0.0 };
    [x, y]
}

/// A grid frequency with `lo <= |xi| <= hi`.
fn lattice_frequency(rng: &mut ChaCha8Rng, geom: &Geometry, lo: f64, hi: f64) -> [f64; 2] {
    let df = 1.0 / (2.0 * geom.halfwidth);
    let kmax = (hi / df).floor() as i64;
    loop {
        let kx = rng.gen_range(-kmax..=kmax);
        let ky = if geom.dim == 2 {
            rng.gen_range(-kmax..=kmax)
        } else {
            0
        };
        let xi = [kx as f64 * df, ky as f64 * df];
        let r = xi[0].hypot(xi[1]);
        if r >= lo && r <= hi {
            return xi;
        }
    }
}

impl TestFamily {
    pub fn new(kind: FamilyKind, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyFamily);
        }
        Ok(Self { kind, count, seed })
    }

    /// Member `i`, drawn from its own stream so it does not depend on `count`.
    pub fn member(&self, geom: Geometry, i: usize) -> Result<SampledFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        let dim = geom.dim;
        let reach = 0.25 * geom.halfwidth;
        match self.kind {
            FamilyKind::Gaussians => {
                let c = point(&mut rng, dim, reach);
                let w = 2f64.powf(rng.gen_range(-1.5..1.0));
                modulated_gaussian(geom, c, w, [0.0, 0.0], 0.0)
            }
            FamilyKind::ModulatedBumps => {
                let c = point(&mut rng, dim, reach);
                let w = 2f64.powf(rng.gen_range(-1.0..1.0));
                let s = 2f64.powf(rng.gen_range(-2.0..1.0));
                let u = unit(&mut rng, dim);
                let ph = rng.gen_range(0.0..2.0 * PI);
                modulated_gaussian(geom, c, w, [s * u[0], s * u[1]], ph)
            }
            FamilyKind::BandLimited => {
                let modes: Vec<([f64; 2], f64, f64)> = (0..4)
                    .map(|_| {
                        let xi = lattice_frequency(&mut rng, &geom, 0.25, 2.0);
                        (xi, rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI))
                    })
                    .collect();
                SampledFunction::from_real_fn(geom, |x| {
                    modes
                        .iter()
                        .map(|(xi, a, ph)| {
                            a * (2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]) + ph).cos()
                        })
                        .sum()
                })
            }
            FamilyKind::Steps => {
                let pieces: Vec<([f64; 2], [f64; 2], f64)> = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let lo = point(&mut rng, dim, reach);
                        let side = [rng.gen_range(0.25..3.0), rng.gen_range(0.25..3.0)];
                        (lo, side, rng.gen_range(0.5..2.0))
                    })
                    .collect();
                SampledFunction::from_real_fn(geom, |x| {
                    pieces
                        .iter()
                        .filter(|(lo, s, _)| (0..dim).all(|d| x[d] >= lo[d] && x[d] < lo[d] + s[d]))
                        .map(|p| p.2)
                        .sum()
                })
            }
        }
    }

    pub fn members(&self, geom: Geometry) -> Result<Vec<SampledFunction>> {
        (0..self.count)
            .into_par_iter()
            .map(|i| self.member(geom, i))
            .collect()
    }
}

/// Operators a sweep can run. Time grids default to `time_grid_for`.
#[derive(Debug, Clone)]
pub enum OperatorSpec {
    Identity,
    SquareFunction {
        kernel: Kernel,
        time_grid: Option<TimeGrid>,
    },
    Marcinkiewicz {
        time_grid: Option<TimeGrid>,
    },
    Tb {
        psi: Kernel,
        phi: Kernel,
        b: SampledFunction,
        time_grid: Option<TimeGrid>,
    },
    /// `|pi_b f|` on the truncation `[u, v]`.
    Paraproduct {
        eta: Kernel,
        psi: Kernel,
        phi: Kernel,
        b: SampledFunction,
        time_grid: Option<TimeGrid>,
        u: f64,
        v: f64,
    },
}

impl OperatorSpec {
    pub fn name(&self) -> String {
        match self {
            OperatorSpec::Identity => "identity".into(),
            OperatorSpec::SquareFunction { kernel, .. } => {
                format!("square_function({})", kernel.name())
            }
            OperatorSpec::Marcinkiewicz { .. } => "marcinkiewicz_1d".into(),
            OperatorSpec::Tb { psi, phi, .. } => {
                format!("tb_operator({}, {})", psi.name(), phi.name())
            }
            OperatorSpec::Paraproduct {
                eta,
                psi,
                phi,
                u,
                v,
                ..
            } => {
                format!(
                    "paraproduct({}, {}, {}, [{u}, {v}])",
                    eta.name(),
                    psi.name(),
                    phi.name()
                )
            }
        }
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let geom = f.geometry();
        let grid = |tg: &Option<TimeGrid>, k: &Kernel| {
            tg.clone().unwrap_or_else(|| time_grid_for(k, geom))
        };
        match self {
            OperatorSpec::Identity => Ok(f.clone()),
            OperatorSpec::SquareFunction { kernel, time_grid } => {
                Ok(square_function(kernel, f, &grid(time_grid, kernel))?.values)
            }
            OperatorSpec::Marcinkiewicz { time_grid } => {
                marcinkiewicz_1d(f, &grid(time_grid, &Kernel::Haar1D))
            }
            OperatorSpec::Tb {
                psi,
                phi,
                b,
                time_grid,
            } => tb_operator(psi, phi, b, f, &grid(time_grid, psi)),
            OperatorSpec::Paraproduct {
                eta,
                psi,
                phi,
                b,
                time_grid,
                u,
                v,
            } => paraproduct(eta, psi, phi, b, f, &grid(time_grid, psi), *u, *v),
        }
    }
}

/// `||T f||_{L^p_w} / ||f||_{L^p_w}`.
pub fn norm_ratio(
    op: &OperatorSpec,
    f: &SampledFunction,
    p: f64,
    w: Option<&Weight>,
) -> Result<f64> {
    let den = lp_norm(f, p, w)?;
    if den == 0.0 {
        return Err(Error::InvalidParameter("zero test function".into()));
    }
    Ok(lp_norm(&op.apply(f)?, p, w)? / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub operator: String,
    pub family: TestFamily,
    pub p: f64,
    pub weight: Option<Weight>,
    pub ratios: Vec<f64>,
    pub max: f64,
    pub median: f64,
    /// Members before this index form the first half of the trend statistic.
    pub split: usize,
    /// `max(ratios[split..]) / max(ratios[..split])`.
    pub trend: f64,
    pub flags: Vec<String>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "member,ratio")?;
        for (i, r) in self.ratios.iter().enumerate() {
            writeln!(out, "{i},{r:e}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(0.0, f64::max)
}

/// Ratio of the later members' maximum to the earlier members' maximum.
pub fn trend_statistic(xs: &[f64], split: usize) -> f64 {
    if split == 0 || split >= xs.len() {
        return 1.0;
    }
    let (a, b) = (max_of(&xs[..split]), max_of(&xs[split..]));
    if a > 0.0 {
        b / a
    } else if b == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Runs `op` over the family. `split` defaults to half the family.
pub fn norm_ratio_sweep(
    op: &OperatorSpec,
    fam: &TestFamily,
    geom: Geometry,
    p: f64,
    w: Option<&Weight>,
    split: Option<usize>,
) -> Result<SweepReport> {
    if fam.count == 0 {
        return Err(Error::EmptyFamily);
    }
    let mut flags = Vec::new();
    if let Some(Weight::Power { a, dim }) = w {
        if !Weight::power_in_ap(*a, *dim, p) {
            flags.push(format!("|x|^{a} is not in A_{p}"));
        }
    }
    let ratios: Vec<f64> = (0..fam.count)
        .into_par_iter()
        .map(|i| norm_ratio(op, &fam.member(geom, i)?, p, w))
        .collect::<Result<_>>()?;
    let split = split.unwrap_or(fam.count / 2);
    let trend = trend_statistic(&ratios, split);
    if trend > 2.0 {
        flags.push(format!("trend {trend:.3} exceeds 2"));
    }
    Ok(SweepReport {
        operator: op.name(),
        family: fam.clone(),
        p,
        weight: w.cloned(),
        max: max_of(&ratios),
        median: median(&ratios),
        ratios,
        split,
        trend,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentStep {
    pub width: f64,
    pub modulation: f64,
    pub ratio: f64,
}

/// Coordinate ascent over `(log2 width, modulation)` of a modulated Gaussian
/// centred at `center`, maximising the norm ratio. Each step tries one
/// coordinate in both directions; the step size halves after a full round
/// without improvement.
pub fn near_extremizer(
    op: &OperatorSpec,
    geom: Geometry,
    center: [f64; 2],
    p: f64,
    w: Option<&Weight>,
    steps: usize,
) -> Result<Vec<AscentStep>> {
    let eval = |lw: f64, s: f64| -> Result<f64> {
        let f = modulated_gaussian(geom, center, 2f64.powf(lw), [s, 0.0], 0.0)?;
        norm_ratio(op, &f, p, w)
    };
    let (mut lw, mut s) = (0.0, 0.5);
    let mut best = eval(lw, s)?;
    let mut delta = [0.5, 0.25];
    let mut history = vec![AscentStep {
        width: 1.0,
        modulation: s,
        ratio: best,
    }];
    let mut stale = 0;
    for step in 0..steps {
        let c = step % 2;
        let trials: Vec<(f64, f64)> = [-1.0, 1.0]
            .iter()
            .map(|sg| {
                if c == 0 {
                    (lw + sg * delta[0], s)
                } else {
                    (lw, (s + sg * delta[1]).max(0.0))
                }
            })
            .collect();
        let vals: Vec<f64> = trials
            .par_iter()
            .map(|&(a, b)| eval(a, b))
            .collect::<Result<_>>()?;
        let (i, v) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
                if *v > acc.1 {
                    (i, *v)
                } else {
                    acc
                }
            });
        if v > best {
            best = v;
            (lw, s) = trials[i];
            stale = 0;
        } else {
            stale += 1;
            if stale >= 2 {
                delta = [0.5 * delta[0], 0.5 * delta[1]];
                stale = 0;
            }
        }
        history.push(AscentStep {
            width: 2f64.powf(lw),
            modulation: s,
            ratio: best,
        });
    }
    Ok(history)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub kernel: String,
    /// Per member `max_x sup_t |psi_t * f| / M_Omega f`.
    pub constants: Vec<f64>,
    pub first_half: f64,
    pub second_half: f64,
    /// `max(first, second) / min(first, second)`.
    pub spread: f64,
}

/// Points where `M_Omega f` falls below this fraction of its maximum are
/// skipped: the averaging radii stop at a quarter of the box.
pub const DOMINATION_FLOOR: f64 = 1e-3;

/// `max_x sup_t |psi_t * f(x)| / M_Omega f(x)` with `Omega` the kernel's
/// angular majorant.
pub fn domination_constant(k: &Kernel, f: &SampledFunction, tg: &TimeGrid) -> Result<f64> {
    let geom = *f.geometry();
    let sup = sup_dilation(k, f, tg)?;
    let m = maximal_omega(f, &k.sphere_majorant(), &default_radii(&geom))?;
    let floor = DOMINATION_FLOOR * m.sup_abs();
    Ok(sup
        .values()
        .iter()
        .zip(m.values())
        .filter(|(_, mv)| mv.re > floor)
        .map(|(s, mv)| s.re / mv.re)
        .fold(0.0, f64::max))
}

pub fn domination_sweep(k: &Kernel, fam: &TestFamily, geom: Geometry) -> Result<DominationReport> {
    if fam.count < 2 {
        return Err(Error::InvalidParameter("need at least two members".into()));
    }
    let tg = time_grid_for(k, &geom);
    let constants: Vec<f64> = (0..fam.count)
        .into_par_iter()
        .map(|i| domination_constant(k, &fam.member(geom, i)?, &tg))
        .collect::<Result<_>>()?;
    let half = fam.count / 2;
    let (a, b) = (max_of(&constants[..half]), max_of(&constants[half..]));
    Ok(DominationReport {
        kernel: k.name(),
        first_half: a,
        second_half: b,
        spread: a.max(b) / a.min(b),
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom1() -> Geometry {
        Geometry::new(1, 16.0, 1024).unwrap()
    }

    #[test]
    fn members_are_nonzero_and_reproducible() {
        for kind in [
            FamilyKind::Gaussians,
            FamilyKind::ModulatedBumps,
            FamilyKind::BandLimited,
            FamilyKind::Steps,
        ] {
            let fam = TestFamily::new(kind, 6, 7).unwrap();
            for g in [geom1(), Geometry::new(2, 8.0, 64).unwrap()] {
                for i in 0..fam.count {
                    let a = fam.member(g, i).unwrap();
                    assert!(a.sup_abs() > 0.0, "{kind:?} {i}");
                    assert_eq!(a, fam.member(g, i).unwrap());
                }
            }
        }
        let big = TestFamily::new(FamilyKind::Gaussians, 20, 7).unwrap();
        let small = TestFamily::new(FamilyKind::Gaussians, 3, 7).unwrap();
        assert_eq!(
            big.member(geom1(), 2).unwrap(),
            small.member(geom1(), 2).unwrap()
        );
    }

    #[test]
    fn identity_sweep_is_flat() {
        let fam = TestFamily::new(FamilyKind::Steps, 10, 1).unwrap();
        let r = norm_ratio_sweep(
            &OperatorSpec::Identity,
            &fam,
            geom1(),
            3.0,
            Some(&Weight::power(0.5)),
            None,
        )
        .unwrap();
        assert!(r.ratios.iter().all(|x| (x - 1.0).abs() < 1e-15));
        assert_eq!(r.trend, 1.0);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn poisson_band_limited_ratio_is_half() {
        let fam = TestFamily::new(FamilyKind::BandLimited, 4, 3).unwrap();
        let op = OperatorSpec::SquareFunction {
            kernel: Kernel::poisson(1),
            time_grid: None,
        };
        let r = norm_ratio_sweep(&op, &fam, geom1(), 2.0, None, None).unwrap();
        assert!(
            r.ratios.iter().all(|x| (x - 0.5).abs() < 1e-3),
            "{:?}",
            r.ratios
        );
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let op = OperatorSpec::SquareFunction {
            kernel: Kernel::Haar1D,
            time_grid: None,
        };
        let f = TestFamily::new(FamilyKind::ModulatedBumps, 1, 5)
            .unwrap()
            .member(geom1(), 0)
            .unwrap();
        let a = norm_ratio(&op, &f, 2.0, None).unwrap();
        assert_eq!(a, norm_ratio(&op, &f.scale(4.0), 2.0, None).unwrap());
        let b = norm_ratio(&op, &f.translate([17, 0]), 2.0, None).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn out_of_class_weight_is_flagged() {
        let fam = TestFamily::new(FamilyKind::Gaussians, 2, 1).unwrap();
        let r = norm_ratio_sweep(
            &OperatorSpec::Identity,
            &fam,
            geom1(),
            2.0,
            Some(&Weight::power(1.5)),
            None,
        )
        .unwrap();
        assert_eq!(r.flags.len(), 1);
    }

    #[test]
    fn ascent_never_decreases() {
        let op = OperatorSpec::SquareFunction {
            kernel: Kernel::Haar1D,
            time_grid: None,
        };
        let h = near_extremizer(&op, geom1(), [0.0, 0.0], 2.0, None, 6).unwrap();
        assert_eq!(h.len(), 7);
        assert!(h.windows(2).all(|w| w[1].ratio >= w[0].ratio));
    }

    #[test]
    fn trend_edge_cases() {
        assert_eq!(trend_statistic(&[1.0, 2.0], 1), 2.0);
        assert_eq!(trend_statistic(&[0.0, 0.0], 1), 1.0);
        assert_eq!(trend_statistic(&[1.0], 0), 1.0);
    }
}
