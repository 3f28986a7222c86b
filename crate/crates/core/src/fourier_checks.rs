//! Fourier-side diagnostics: averaged decay profiles, the decay condition
//! `int_1^2 |psi^(t xi)|^2 dt <= c min(|xi|^eps, |xi|^-eps)`, small-frequency
//! bounds and the `L^2` identity behind the log seminorm.

use std::f64::consts::PI;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::{pair_integral, KernelSampler};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quad;

/// Table of `I(xi) = int_1^2 |psi^(t xi)|^2 dt` over directions and radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub directions: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    /// `values[d][r]`.
    pub values: Vec<Vec<f64>>,
}

/// `count` unit directions on a half circle (`[1, 0]` alone in 1-D).
pub fn default_directions(dim: usize, count: usize) -> Vec<[f64; 2]> {
    if dim == 1 {
        return vec![[1.0, 0.0]];
    }
    (0..count)
        .map(|k| {
            let th = PI * k as f64 / count as f64;
            [th.cos(), th.sin()]
        })
        .collect()
}

/// Radii `2^(k / per_octave)` for `lo <= k / per_octave <= hi`.
pub fn dyadic_radii(lo: i32, hi: i32, per_octave: usize) -> Vec<f64> {
    let m = per_octave as i32;
    (lo * m..=hi * m)
        .map(|k| 2f64.powf(k as f64 / m as f64))
        .collect()
}

/// `int_1^2 |psi^(t xi)|^2 dt` by composite Gauss-Legendre with at least
/// `nodes` points and at least two panels per oscillation.
pub fn averaged_energy(k: &Kernel, xi: [f64; 2], nodes: usize) -> f64 {
    let size = xi[0].hypot(xi[1]);
    let panels = (nodes.div_ceil(16))
        .max(4)
        .max((2.0 * size).ceil() as usize);
    quad::gauss_panels(
        |t| k.fourier([t * xi[0], t * xi[1]]).norm_sqr(),
        1.0,
        2.0,
        panels,
        16,
    )
}

pub fn decay_profile(
    k: &Kernel,
    directions: &[[f64; 2]],
    radii: &[f64],
    t_nodes: usize,
) -> Result<DecayProfile> {
    if t_nodes < 64 {
        return Err(Error::InvalidParameter(format!(
            "{t_nodes} t-nodes, need at least 64"
        )));
    }
    if directions.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter(
            "empty direction or radius list".into(),
        ));
    }
    let values = directions
        .iter()
        .map(|d| {
            radii
                .par_iter()
                .map(|&r| averaged_energy(k, [r * d[0], r * d[1]], t_nodes))
                .collect()
        })
        .collect();
    Ok(DecayProfile {
        directions: directions.to_vec(),
        radii: radii.to_vec(),
        values,
    })
}

impl DecayProfile {
    /// Maximum over directions at each radius.
    pub fn envelope(&self) -> Vec<f64> {
        (0..self.radii.len())
            .map(|i| self.values.iter().map(|row| row[i]).fold(0.0, f64::max))
            .collect()
    }

    /// Least-squares log-log slope of the envelope over `lo <= r <= hi`.
    pub fn slope(&self, lo: f64, hi: f64) -> f64 {
        let env = self.envelope();
        let pts: Vec<(f64, f64)> = self
            .radii
            .iter()
            .zip(&env)
            .filter(|(r, v)| **r >= lo && **r <= hi && **v > 0.0)
            .map(|(r, v)| (r.ln(), v.ln()))
            .collect();
        fit_slope(&pts)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "direction_index,radius,value")?;
        for (d, row) in self.values.iter().enumerate() {
            for (r, v) in self.radii.iter().zip(row) {
                writeln!(out, "{d},{r:e},{v:e}")?;
            }
        }
        Ok(())
    }
}

/// Least-squares slope of `(x, y)` pairs.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check14 {
    pub eps: f64,
    pub holds: bool,
    /// `max I(xi) / min(|xi|^eps, |xi|^-eps)` on `[2^-8, 2^8]`.
    pub measured_c: f64,
    /// The same on `[2^-16, 2^16]`.
    pub measured_c_doubled: f64,
    pub growth: f64,
}

fn ratio_max(p: &DecayProfile, eps: f64) -> f64 {
    p.envelope()
        .iter()
        .zip(&p.radii)
        .map(|(v, r)| v / r.powf(eps).min(r.powf(-eps)))
        .fold(0.0, f64::max)
}

/// Measures the decay condition; it holds when the constant is finite and
/// grows by less than 10% when the log-range of radii doubles.
pub fn check_14(k: &Kernel, eps: f64) -> Result<Check14> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (0, 1)"
        )));
    }
    let dirs = default_directions(k.dim(), 8);
    let base = decay_profile(k, &dirs, &dyadic_radii(-8, 8, 4), 64)?;
    let wide = decay_profile(k, &dirs, &dyadic_radii(-16, 16, 4), 64)?;
    let c = ratio_max(&base, eps);
    let c2 = ratio_max(&wide, eps);
    let growth = if c > 0.0 { c2 / c - 1.0 } else { 0.0 };
    Ok(Check14 {
        eps,
        holds: c2.is_finite() && growth < 0.1,
        measured_c: c,
        measured_c_doubled: c2,
        growth,
    })
}

/// `max |psi^(xi)| / |xi|^eps` over `2^-12 <= |xi| <= 1` and sample directions.
pub fn lemma1_check(k: &Kernel, eps: f64) -> f64 {
    let dirs = default_directions(k.dim(), 16);
    let radii = dyadic_radii(-12, 0, 8);
    dirs.iter()
        .flat_map(|d| radii.iter().map(move |&r| (d, r)))
        .map(|(d, r)| k.fourier([r * d[0], r * d[1]]).norm() / r.powf(eps))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop3Result {
    /// `int_0^inf |psi^(t xi)|^2 dt / t`.
    pub lhs: f64,
    /// Extrapolated contribution from outside `[2^-12, 2^12]`.
    pub lhs_tail: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub rel_gap: f64,
    /// Set when the truncation tail exceeds 1% of `lhs`.
    pub truncation_flag: bool,
}

/// `int_0^inf |psi^(t xi)|^2 dt / t` as `(value, extrapolated tail)`.
pub fn log_energy(k: &Kernel, xi: [f64; 2]) -> (f64, f64) {
    let size = xi[0].hypot(xi[1]);
    let octave = |j: i32| -> f64 {
        let (a, b) = (2f64.powi(j), 2f64.powi(j + 1));
        let panels = 4.max((2.0 * b * size).ceil() as usize);
        quad::gauss_panels(
            |s: f64| {
                let t = s.exp();
                k.fourier([t * xi[0], t * xi[1]]).norm_sqr()
            },
            a.ln(),
            b.ln(),
            panels,
            16,
        )
    };
    let octs: Vec<f64> = (-12..12)
        .collect::<Vec<i32>>()
        .par_iter()
        .map(|&j| octave(j))
        .collect();
    let body: f64 = octs.iter().sum();
    let geometric = |last: f64, prev: f64| {
        if last <= 0.0 || prev <= 0.0 {
            return 0.0;
        }
        let rho = last / prev;
        if rho < 1.0 {
            last * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        }
    };
    let n = octs.len();
    let tail = geometric(octs[0], octs[1]) + geometric(octs[n - 1], octs[n - 2]);
    (body + tail, tail)
}

/// Compares `int_0^inf |psi^(t xi)|^2 dt/t` with the double integral
/// `iint psi(x) psi(y) (-log|<xi, x-y>| - i pi/2 sgn<xi, x-y>) dx dy`.
pub fn prop3_identity(k: &Kernel, xi: [f64; 2], samples: usize, seed: u64) -> Result<Prop3Result> {
    let norm = xi[0].hypot(xi[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("xi must be a unit vector".into()));
    }
    let (lhs, tail) = log_energy(k, xi);
    if k.l1_norm() == 0.0 {
        return Ok(Prop3Result {
            lhs,
            lhs_tail: tail,
            rhs_re: 0.0,
            rhs_im: 0.0,
            stderr_re: 0.0,
            stderr_im: 0.0,
            rel_gap: 0.0,
            truncation_flag: false,
        });
    }
    let sampler = KernelSampler::new(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernel = |z: f64| Complex64::new(-z.abs().ln(), -0.5 * PI * z.signum());
    let (sums, _) = pair_integral(&sampler, xi, &kernel, 0.5, true, samples, &mut rng, &[]);
    let rhs = sums.mean();
    let (se_re, se_im) = sums.stderr();
    Ok(Prop3Result {
        lhs,
        lhs_tail: tail,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        stderr_re: se_re,
        stderr_im: se_im,
        rel_gap: (lhs - rhs.re).abs() / lhs.max(1e-300),
        truncation_flag: tail > 0.01 * lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_log_energy_is_quarter() {
        let (v, tail) = log_energy(&Kernel::poisson(1), [1.0, 0.0]);
        assert!((v - 0.25).abs() < 1e-7, "{v}");
        assert!(tail < 1e-5);
    }

    #[test]
    fn haar_log_energy() {
        let (v, _) = log_energy(&Kernel::Haar1D, [1.0, 0.0]);
        assert!((v - 4.0 * 2f64.ln()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn zero_kernel_profile() {
        let k = Kernel::Haar1D.scaled(0.0);
        let p = decay_profile(&k, &[[1.0, 0.0]], &dyadic_radii(-8, 8, 1), 64).unwrap();
        assert!(p.values[0].iter().all(|&v| v == 0.0));
        let c = check_14(&k, 0.5).unwrap();
        assert!(c.holds && c.measured_c == 0.0);
    }

    #[test]
    fn lemma1_is_linear() {
        let a = lemma1_check(&Kernel::Haar1D, 1.0);
        let b = lemma1_check(&Kernel::Haar1D.scaled(2.0), 1.0);
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn profile_rejects_few_nodes() {
        assert!(decay_profile(&Kernel::Haar1D, &[[1.0, 0.0]], &[1.0], 16).is_err());
    }
}
