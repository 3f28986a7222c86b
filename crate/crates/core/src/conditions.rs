//! Kernel seminorms `B_eps`, `D_u`, `J_eps`, `L`, the majorant norm
//! `||H_psi||_1`, and the hypothesis checks built on them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quad::{self, Estimate};

/// A reported number with its error estimate and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    /// `None` when the quantity was flagged infinite.
    pub value: Option<f64>,
    pub stderr: f64,
    pub settings: String,
}

impl Quantity {
    fn from_estimate(e: Estimate, settings: String) -> Self {
        Self {
            value: e.value.is_finite().then_some(e.value),
            stderr: if e.error.is_finite() {
                e.error
            } else {
                f64::INFINITY
            },
            settings,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }

    pub fn get(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

/// `B_eps = int_{|x| > 1} |psi(x)| |x|^eps dx`.
pub fn seminorm_b(k: &Kernel, eps: f64) -> Result<Estimate> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (0, 1]"
        )));
    }
    Ok(k.radial_integral(1.0, &|r| r.powf(eps), 1.0, None))
}

/// `D_u = (int_{|x| < 1} |psi|^u)^(1/u)`.
pub fn seminorm_d(k: &Kernel, u: f64) -> Result<Estimate> {
    if !(u > 1.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must exceed 1")));
    }
    let e = k.radial_integral(u, &|_| 1.0, 0.0, Some(1.0));
    if !e.is_finite() || e.value > 1e300 {
        return Ok(Estimate::infinite());
    }
    let v = e.value.max(0.0).powf(1.0 / u);
    let err = if e.value > 0.0 {
        v * e.error / (u * e.value)
    } else {
        0.0
    };
    Ok(Estimate {
        value: v,
        error: err,
    })
}

/// `||H_psi||_1` for the least non-increasing radial majorant.
pub fn majorant_norm(k: &Kernel) -> Estimate {
    k.majorant_l1()
}

/// Monte-Carlo settings for the double integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    /// Number of directions in 2-D (uniform on a half circle).
    pub directions: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            directions: 64,
            samples: 200_000,
            seed: 0,
        }
    }
}

/// Monte-Carlo estimate of a supremum over directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Direction attaining the maximum.
    pub direction: [f64; 2],
    /// Set when the estimate kept growing under sample doubling.
    pub divergent: bool,
}

/// Importance sampler for `x` with density roughly proportional to `|psi(x)|`.
pub(crate) struct KernelSampler<'a> {
    k: &'a Kernel,
    dim: usize,
    edges: Vec<f64>,
    cdf: Vec<f64>,
    masses: Vec<f64>,
    total: f64,
    /// Width of the slab sampler in both the normal and transverse direction.
    reach: f64,
}

impl<'a> KernelSampler<'a> {
    pub(crate) fn new(k: &'a Kernel) -> Result<Self> {
        let dim = k.dim();
        let r_max = k.support_radius().unwrap_or(1e8);
        let mut edges = vec![0.0];
        let mut r = 1e-12;
        while r < r_max {
            edges.push(r);
            r *= std::f64::consts::SQRT_2;
        }
        edges.push(r_max);
        edges.extend(
            k.radial_breaks()
                .into_iter()
                .filter(|&b| b > 0.0 && b < r_max),
        );
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let masses: Vec<f64> = edges
            .windows(2)
            .map(|w| {
                k.radial_integral(1.0, &|_| 1.0, w[0], Some(w[1]))
                    .value
                    .max(0.0)
            })
            .collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(
                "kernel has no mass to sample".into(),
            ));
        }
        let mut acc = 0.0;
        let cdf = masses
            .iter()
            .map(|m| {
                acc += m / total;
                acc
            })
            .collect();
        let reach = 2.0 * k.support_radius().unwrap_or(2.0);
        Ok(Self {
            k,
            dim,
            edges,
            cdf,
            masses,
            total,
            reach,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let u: f64 = rng.gen();
        let b = self
            .cdf
            .partition_point(|&c| c < u)
            .min(self.masses.len() - 1);
        let r = self.edges[b] + rng.gen::<f64>() * (self.edges[b + 1] - self.edges[b]);
        if self.dim == 1 {
            let p = self.k.value([r, 0.0]).abs();
            let m = self.k.value([-r, 0.0]).abs();
            let right = if p + m > 0.0 { p / (p + m) } else { 0.5 };
            if rng.gen::<f64>() < right {
                [r, 0.0]
            } else {
                [-r, 0.0]
            }
        } else {
            let th = 2.0 * PI * rng.gen::<f64>();
            [r * th.cos(), r * th.sin()]
        }
    }

    fn density(&self, x: [f64; 2]) -> f64 {
        let r = if self.dim == 1 {
            x[0].abs()
        } else {
            x[0].hypot(x[1])
        };
        let last = *self.edges.last().unwrap();
        if r >= last || r == 0.0 {
            return 0.0;
        }
        let b = self.edges.partition_point(|&e| e <= r) - 1;
        let radial = self.masses[b] / self.total / (self.edges[b + 1] - self.edges[b]);
        if self.dim == 1 {
            let p = self.k.value([r, 0.0]).abs();
            let m = self.k.value([-r, 0.0]).abs();
            let share = if p + m > 0.0 {
                if x[0] >= 0.0 {
                    p / (p + m)
                } else {
                    m / (p + m)
                }
            } else {
                0.5
            };
            radial * share
        } else {
            radial / (2.0 * PI * r)
        }
    }
}

/// Running sums of a weighted Monte-Carlo stream.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PairSums {
    pub re: f64,
    pub im: f64,
    pub re2: f64,
    pub im2: f64,
    pub n: usize,
}

impl PairSums {
    pub(crate) fn mean(&self) -> Complex64 {
        Complex64::new(self.re, self.im) / self.n as f64
    }

    /// Standard errors of the real and imaginary means.
    pub(crate) fn stderr(&self) -> (f64, f64) {
        let n = self.n as f64;
        let var =
            |s: f64, s2: f64| ((s2 / n - (s / n).powi(2)).max(0.0) / (n - 1.0).max(1.0)).sqrt();
        (var(self.re, self.re2), var(self.im, self.im2))
    }
}

/// Monte-Carlo estimate of `iint g(x) g(y) K(<xi, x - y>) dx dy` where `g`
/// is `|psi|` (`signed = false`) or `psi`. The `y` proposal mixes the kernel
/// sampler with a slab density `~ |z|^-kappa` around the hyperplane.
#[allow(clippy::too_many_arguments)]
pub(crate) fn pair_integral(
    sampler: &KernelSampler<'_>,
    xi: [f64; 2],
    kernel: &(dyn Fn(f64) -> Complex64 + Sync),
    kappa: f64,
    signed: bool,
    samples: usize,
    rng: &mut ChaCha8Rng,
    checkpoints: &[usize],
) -> (PairSums, Vec<f64>) {
    let k = sampler.k;
    let dim = sampler.dim;
    let zr = sampler.reach;
    let vr = sampler.reach;
    let perp = [-xi[1], xi[0]];
    let z_density = |z: f64| (1.0 - kappa) / (2.0 * zr.powf(1.0 - kappa)) * z.abs().powf(-kappa);
    let g = |x: [f64; 2]| {
        let v = k.value(x);
        if signed {
            v
        } else {
            v.abs()
        }
    };
    let mut sums = PairSums::default();
    let mut marks = Vec::new();
    for i in 0..samples {
        let x = sampler.sample(rng);
        let px = sampler.density(x);
        let y = if rng.gen::<f64>() < 0.5 {
            sampler.sample(rng)
        } else {
            let mag = zr * rng.gen::<f64>().powf(1.0 / (1.0 - kappa));
            let z = if rng.gen::<f64>() < 0.5 { mag } else { -mag };
            let v = if dim == 2 {
                vr * (2.0 * rng.gen::<f64>() - 1.0)
            } else {
                0.0
            };
            [
                x[0] - z * xi[0] - v * perp[0],
                x[1] - z * xi[1] - v * perp[1],
            ]
        };
        let d = [x[0] - y[0], x[1] - y[1]];
        let z = d[0] * xi[0] + d[1] * xi[1];
        let mut w = Complex64::new(0.0, 0.0);
        if z != 0.0 && px > 0.0 {
            let slab =
                if z.abs() <= zr && (dim == 1 || (d[0] * perp[0] + d[1] * perp[1]).abs() <= vr) {
                    z_density(z) / if dim == 2 { 2.0 * vr } else { 1.0 }
                } else {
                    0.0
                };
            let q = 0.5 * sampler.density(y) + 0.5 * slab;
            let gx = g(x);
            let gy = g(y);
            if q > 0.0 && gx != 0.0 && gy != 0.0 {
                w = kernel(z) * (gx * gy / (px * q));
            }
        }
        sums.re += w.re;
        sums.im += w.im;
        sums.re2 += w.re * w.re;
        sums.im2 += w.im * w.im;
        sums.n += 1;
        if checkpoints.contains(&(i + 1)) {
            marks.push(sums.re / sums.n as f64);
        }
    }
    (sums, marks)
}

fn directions(dim: usize, count: usize) -> Vec<[f64; 2]> {
    if dim == 1 {
        vec![[1.0, 0.0]]
    } else {
        (0..count.max(1))
            .map(|k| {
                let th = PI * k as f64 / count.max(1) as f64;
                [th.cos(), th.sin()]
            })
            .collect()
    }
}

fn growth_flag(marks: &[f64]) -> bool {
    marks
        .windows(3)
        .any(|w| w[0] > 0.0 && w[1] >= 1.5 * w[0] && w[2] >= 1.5 * w[1])
}

fn sup_over_directions(
    k: &Kernel,
    settings: &McSettings,
    kernel: &(dyn Fn(f64) -> Complex64 + Sync),
    kappa: f64,
) -> Result<McEstimate> {
    if settings.samples < 8 {
        return Err(Error::InvalidParameter(
            "need at least 8 Monte-Carlo samples".into(),
        ));
    }
    if k.l1_norm() == 0.0 {
        return Ok(McEstimate {
            value: 0.0,
            stderr: 0.0,
            direction: [1.0, 0.0],
            divergent: false,
        });
    }
    let sampler = KernelSampler::new(k)?;
    let n = settings.samples;
    let checkpoints = [n / 4, n / 2, n];
    let dirs = directions(k.dim(), settings.directions);
    let results: Vec<(f64, f64, [f64; 2], bool)> = dirs
        .par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(i as u64);
            let (sums, marks) = pair_integral(
                &sampler,
                xi,
                kernel,
                kappa,
                false,
                n,
                &mut rng,
                &checkpoints,
            );
            (sums.mean().re, sums.stderr().0, xi, growth_flag(&marks))
        })
        .collect();
    let best = results
        .iter()
        .fold(None::<&(f64, f64, [f64; 2], bool)>, |m, r| match m {
            Some(b) if b.0 >= r.0 => Some(b),
            _ => Some(r),
        })
        .expect("at least one direction");
    Ok(McEstimate {
        value: best.0,
        stderr: best.1,
        direction: best.2,
        divergent: results.iter().any(|r| r.3),
    })
}

/// `J_eps = sup_xi iint |psi(x) psi(y)| |<xi, x - y>|^-eps dx dy`.
pub fn seminorm_j(k: &Kernel, eps: f64, settings: &McSettings) -> Result<McEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (0, 1)"
        )));
    }
    sup_over_directions(
        k,
        settings,
        &move |z: f64| Complex64::new(z.abs().powf(-eps), 0.0),
        eps,
    )
}

/// `L = sup_xi iint |psi(x) psi(y)| |log|<xi, x - y>|| dx dy`.
pub fn seminorm_l(k: &Kernel, settings: &McSettings) -> Result<McEstimate> {
    sup_over_directions(
        k,
        settings,
        &|z: f64| Complex64::new(z.abs().ln().abs(), 0.0),
        0.5,
    )
}

/// All seminorms at one parameter choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub kernel: String,
    pub eps: f64,
    pub u: f64,
    pub b_eps: Quantity,
    pub d_u: Quantity,
    pub j_eps: Quantity,
    pub l: Quantity,
    pub h_l1: Quantity,
}

pub fn seminorm_report(k: &Kernel, eps: f64, u: f64, mc: &McSettings) -> Result<SeminormReport> {
    let quad_note = "tanh-sinh, dyadic tail".to_string();
    let mc_note = format!(
        "monte-carlo samples={} directions={} seed={}",
        mc.samples,
        if k.dim() == 1 { 1 } else { mc.directions },
        mc.seed
    );
    let mc_q = |e: McEstimate| Quantity {
        value: (!e.divergent && e.value.is_finite()).then_some(e.value),
        stderr: e.stderr,
        settings: mc_note.clone(),
    };
    let j = if eps < 1.0 {
        mc_q(seminorm_j(k, eps, mc)?)
    } else {
        Quantity {
            value: None,
            stderr: f64::INFINITY,
            settings: "eps = 1 is outside the range of J".into(),
        }
    };
    Ok(SeminormReport {
        kernel: k.name(),
        eps,
        u,
        b_eps: Quantity::from_estimate(seminorm_b(k, eps)?, quad_note.clone()),
        d_u: Quantity::from_estimate(seminorm_d(k, u)?, quad_note.clone()),
        j_eps: j,
        l: mc_q(seminorm_l(k, mc)?),
        h_l1: Quantity::from_estimate(majorant_norm(k), quad_note),
    })
}

/// Parameter grids searched by [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub eps: Vec<f64>,
    pub u: Vec<f64>,
    /// Exponents for `L^q` checks; `f64::INFINITY` stands for `L^inf`.
    pub q: Vec<f64>,
    /// Relative tolerance for `|int psi| <= tol ||psi||_1`.
    pub cancellation_tol: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            eps: vec![0.1, 0.25, 0.5, 1.0],
            u: vec![1.25, 1.5, 2.0, 4.0],
            q: vec![2.0, 4.0, f64::INFINITY],
            cancellation_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub result: String,
    pub hypotheses: Vec<Hypothesis>,
    pub applicable: bool,
    /// Claimed `(p, w)` range when applicable.
    pub range: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremApplicability {
    pub kernel: String,
    pub checks: Vec<TheoremCheck>,
}

impl TheoremApplicability {
    pub fn check(&self, result: &str) -> Option<&TheoremCheck> {
        self.checks.iter().find(|c| c.result == result)
    }
}

fn hyp(name: &str, satisfied: bool, detail: String) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        satisfied,
        detail,
    }
}

fn theorem(result: &str, hypotheses: Vec<Hypothesis>, range: String) -> TheoremCheck {
    let applicable = hypotheses.iter().all(|h| h.satisfied);
    TheoremCheck {
        result: result.into(),
        hypotheses,
        applicable,
        range: applicable.then_some(range),
    }
}

fn first_finite(grid: &[f64], f: impl Fn(f64) -> Result<Estimate>) -> (bool, String) {
    for &x in grid {
        if let Ok(e) = f(x) {
            if e.is_finite() {
                return (true, format!("finite at {x}: {:.6e}", e.value));
            }
        }
    }
    (false, format!("infinite on the grid {grid:?}"))
}

fn q_conjugate(q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

/// 1-D integrals `int |psi| log(2 + |x|)` and `int |psi| log(2 + |psi|)`.
fn log_conditions(k: &Kernel) -> (Estimate, Estimate) {
    let breaks = k.radial_breaks();
    let both = |f: &dyn Fn(f64) -> f64| -> Estimate {
        let hi = k.support_radius();
        match hi {
            Some(h) => quad::integrate_pieces(f, 0.0, h, &breaks, 1e-10),
            None => {
                let head = quad::integrate_pieces(f, 0.0, 1.0, &breaks, 1e-10);
                let tail = quad::integrate_to_infinity(f, 1.0, &breaks, 1e-10, 80);
                Estimate {
                    value: head.value + tail.value,
                    error: head.error + tail.error,
                }
            }
        }
    };
    let size = both(&|r| (k.value([r, 0.0]).abs() + k.value([-r, 0.0]).abs()) * (2.0 + r).ln());
    let entropy = both(&|r| {
        [r, -r]
            .iter()
            .map(|&x| {
                let a = k.value([x, 0.0]).abs();
                a * (2.0 + a).ln()
            })
            .sum()
    });
    (size, entropy)
}

/// Checks which boundedness results' hypotheses hold numerically for `k`.
pub fn classify(k: &Kernel, params: &ClassifyParams) -> TheoremApplicability {
    let l1 = k.l1_norm();
    let mean = k.integral();
    let cancel = hyp(
        "cancellation",
        l1.is_finite() && mean.abs() <= params.cancellation_tol * l1.max(1e-300),
        format!("int psi = {mean:.3e}, ||psi||_1 = {l1:.6e}"),
    );
    let integrable = hyp("L1", l1.is_finite(), format!("||psi||_1 = {l1:.6e}"));
    let (b_ok, b_detail) = first_finite(&params.eps, |e| seminorm_b(k, e));
    let (d_ok, d_detail) = first_finite(&params.u, |u| seminorm_d(k, u));
    let h = majorant_norm(k);
    let h_ok = h.is_finite();
    let h_detail = format!("||H||_1 = {:.6e}", h.value);

    let mut checks = vec![theorem(
        "theorem_1",
        vec![
            integrable.clone(),
            cancel.clone(),
            hyp("B_eps finite", b_ok, b_detail.clone()),
            hyp("D_u finite", d_ok, d_detail.clone()),
            hyp("H_psi in L1", h_ok, h_detail.clone()),
        ],
        "p in (1, inf), w in A_p".into(),
    )];

    // Factorisation |psi| <= h(|x|) Omega(x'): the catalog pair is the radial
    // majorant with the kernel's angular factor.
    let omega = k.sphere_majorant();
    let best_q = params
        .q
        .iter()
        .copied()
        .filter(|&q| q >= 2.0 && omega.lq_norm(q).is_finite())
        .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |b| b.max(q))));
    let q_detail = match best_q {
        Some(q) => format!("Omega in L^{q}, norm {:.6e}", omega.lq_norm(q)),
        None => "no q >= 2 on the grid".into(),
    };
    let qp2 = best_q.map(q_conjugate).unwrap_or(f64::NAN);
    checks.push(theorem(
        "theorem_2",
        vec![
            integrable.clone(),
            cancel.clone(),
            hyp("B_eps finite", b_ok, b_detail),
            hyp("D_u finite", d_ok, d_detail),
            hyp("h non-increasing with H in L1", h_ok, h_detail),
            hyp("Omega in L^q, q >= 2", best_q.is_some(), q_detail),
        ],
        format!("p > {qp2}, w in A_(p/{qp2})"),
    ));

    let compact = k.support_radius();
    let lq = params
        .q
        .iter()
        .copied()
        .chain(match k {
            Kernel::CompactLq { q, .. } => Some(*q),
            _ => None,
        })
        .filter(|&q| q >= 2.0 && q.is_finite())
        .filter(|&q| k.abs_pow_integral(q).is_finite())
        .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |b| b.max(q))));
    let qp3 = lq.map(q_conjugate).unwrap_or(f64::NAN);
    checks.push(theorem(
        "theorem_3",
        vec![
            integrable.clone(),
            cancel.clone(),
            hyp(
                "compact support",
                compact.is_some(),
                compact.map_or("unbounded support".into(), |r| format!("radius {r}")),
            ),
            hyp(
                "psi in L^q, q >= 2",
                lq.is_some(),
                lq.map_or("no finite q >= 2 on the grid".into(), |q| {
                    format!("q = {q}")
                }),
            ),
        ],
        format!("p > {qp3}, w in A_(p/{qp3})"),
    ));

    if let Kernel::TruncatedHomogeneous { eps, omega } = k {
        checks.push(theorem(
            "corollary_1",
            vec![
                hyp("eps > 0", *eps > 0.0, format!("eps = {eps}")),
                hyp(
                    "Omega in L^inf",
                    omega.sup_abs().is_finite(),
                    format!("sup = {}", omega.sup_abs()),
                ),
                hyp(
                    "Omega mean zero",
                    omega.integral().abs() <= 1e-10,
                    format!("int Omega = {:.3e}", omega.integral()),
                ),
            ],
            "p in (1, inf), w in A_p".into(),
        ));
    }

    if k.dim() == 1 {
        let (size, entropy) = log_conditions(k);
        checks.push(theorem(
            "log_conditions",
            vec![
                integrable,
                cancel,
                hyp(
                    "int |psi| log(2 + |x|) finite",
                    size.is_finite(),
                    format!("{:.6e}", size.value),
                ),
                hyp(
                    "int |psi| log(2 + |psi|) finite",
                    entropy.is_finite(),
                    format!("{:.6e}", entropy.value),
                ),
            ],
            "p = 2, w = 1".into(),
        ));
    }

    TheoremApplicability {
        kernel: k.name(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::SphereFunction;

    #[test]
    fn haar_b_and_d() {
        assert_eq!(seminorm_b(&Kernel::Haar1D, 0.5).unwrap().value, 0.0);
        let d = seminorm_d(&Kernel::Haar1D, 2.0).unwrap();
        assert!((d.value - 2f64.sqrt()).abs() < 1e-12);
        assert!(seminorm_b(&Kernel::Haar1D, 0.0).is_err());
        assert!(seminorm_d(&Kernel::Haar1D, 1.0).is_err());
    }

    #[test]
    fn trunc_hom_d() {
        let k = Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap();
        let d = seminorm_d(&k, 1.5).unwrap();
        // (2 int_0^1 r^-0.75 dr)^(2/3) = 8^(2/3) = 4
        assert!((d.value - 4.0).abs() < 1e-6, "{d:?}");
    }

    #[test]
    fn haar_j_close_to_closed_form() {
        let mc = McSettings {
            directions: 1,
            samples: 100_000,
            seed: 3,
        };
        let j = seminorm_j(&Kernel::Haar1D, 0.5, &mc).unwrap();
        let exact = 2f64.powf(2.5) / (0.5 * 1.5);
        assert!((j.value - exact).abs() < 4.0 * j.stderr, "{j:?} vs {exact}");
        assert!(!j.divergent);
    }

    #[test]
    fn zero_kernel_seminorms() {
        let k = Kernel::Haar1D.scaled(0.0);
        let mc = McSettings::default();
        assert_eq!(seminorm_j(&k, 0.5, &mc).unwrap().value, 0.0);
        assert_eq!(seminorm_l(&k, &mc).unwrap().value, 0.0);
        assert_eq!(seminorm_d(&k, 2.0).unwrap().value, 0.0);
    }

    #[test]
    fn haar_satisfies_theorem_1() {
        let c = classify(&Kernel::Haar1D, &ClassifyParams::default());
        assert!(c.check("theorem_1").unwrap().applicable);
        assert!(c.check("theorem_3").unwrap().applicable);
    }

    #[test]
    fn positive_kernel_fails_cancellation() {
        let c = classify(
            &Kernel::PoissonKernel { dim: 1 },
            &ClassifyParams::default(),
        );
        assert!(!c.check("theorem_1").unwrap().applicable);
    }
}
