//! Kernel catalog: pointwise values, Fourier transforms, dilations and
//! radial majorants.
//!
//! Sampling on a grid uses hat-function averages,
//! `s_j = h^-dim int psi_t(y) Lambda((y - y_j) / h) dy`, which is the exact
//! projection dual to piecewise-linear interpolation. For 1-D kernels the
//! averages are second differences of a closed-form second antiderivative,
//! so jump and integrable point singularities are handled exactly.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fourier_transform, Geometry, SampledFunction, SpectralFunction};
use crate::quad::{self, Estimate};

/// Default bound on kernel mass outside the half-box, relative to `||psi||_1`.
pub const DEFAULT_LEAKAGE_BOUND: f64 = 1e-3;

/// Function on the unit sphere `S^(n-1)`.
///
/// In 1-D this is the pair `[value at +1, value at -1]`. In 2-D it holds `M`
/// values, piecewise constant on the arcs centred at `2 pi k / M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFunction {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl SphereFunction {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        match dim {
            1 if values.len() == 2 => {}
            2 if !values.is_empty() => {}
            1 | 2 => {
                return Err(Error::InvalidParameter(format!(
                    "{} sphere samples in dimension {dim}",
                    values.len()
                )))
            }
            d => return Err(Error::UnsupportedDimension(d)),
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sphere value".into()));
        }
        Ok(Self { dim, values })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let values = if dim == 1 { vec![c, c] } else { vec![c; 64] };
        Self { dim, values }
    }

    /// Odd sign function: `+1` on the right half, `-1` on the left.
    pub fn odd_sign(dim: usize, samples: usize) -> Self {
        if dim == 1 {
            return Self {
                dim,
                values: vec![1.0, -1.0],
            };
        }
        let values = (0..samples)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / samples as f64;
                if th.cos() > 1e-12 {
                    1.0
                } else if th.cos() < -1e-12 {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self { dim, values }
    }

    /// Samples `f(theta)` at the arc centres.
    pub fn from_angle_fn(samples: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..samples)
            .map(|k| f(2.0 * PI * k as f64 / samples as f64))
            .collect();
        Self { dim: 2, values }
    }

    fn arc(&self) -> f64 {
        2.0 * PI / self.values.len() as f64
    }

    /// Value in the direction of the (nonzero) point `x`.
    pub fn eval_dir(&self, x: [f64; 2]) -> f64 {
        if self.dim == 1 {
            if x[0] >= 0.0 {
                self.values[0]
            } else {
                self.values[1]
            }
        } else {
            self.eval_angle(x[1].atan2(x[0]))
        }
    }

    pub fn eval_angle(&self, theta: f64) -> f64 {
        let m = self.values.len();
        let k = (theta.rem_euclid(2.0 * PI) / self.arc()).round() as usize % m;
        self.values[k]
    }

    /// `int Omega d sigma`, with unit point masses when `dim == 1`.
    pub fn integral(&self) -> f64 {
        if self.dim == 1 {
            self.values[0] + self.values[1]
        } else {
            self.values.iter().sum::<f64>() * self.arc()
        }
    }

    /// `int |Omega|^u d sigma`.
    pub fn abs_pow_integral(&self, u: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.abs().powf(u)).sum();
        if self.dim == 1 {
            s
        } else {
            s * self.arc()
        }
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            self.sup_abs()
        } else {
            self.abs_pow_integral(q).powf(1.0 / q)
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn abs(&self) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }
}

/// Surface measure of `S^(n-1)` (counting measure on `{-1, 1}` for `n = 1`).
pub fn sphere_area(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

/// Non-increasing radial profile `h(r)` at increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Trapezoid rule for `int_{R^n} h(|x|) dx` over the sampled radii.
    pub fn integral(&self, dim: usize) -> f64 {
        let s = sphere_area(dim);
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| {
                let a = v[0] * r[0].powi(dim as i32 - 1);
                let b = v[1] * r[1].powi(dim as i32 - 1);
                0.5 * (a + b) * (r[1] - r[0])
            })
            .sum::<f64>()
            * s
    }
}

/// Piecewise-constant values on the cells of `[-radius, radius]^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellProfile {
    pub dim: usize,
    pub radius: f64,
    pub cells: usize,
    pub values: Vec<f64>,
}

impl CellProfile {
    pub fn new(dim: usize, radius: f64, cells: usize, values: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(radius > 0.0 && radius.is_finite()) || cells == 0 {
            return Err(Error::InvalidParameter("cell profile geometry".into()));
        }
        if values.len() != cells.pow(dim as u32) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("cell profile values".into()));
        }
        Ok(Self {
            dim,
            radius,
            cells,
            values,
        })
    }

    /// Cell averages of `f` (4-point Gauss rule per axis).
    pub fn from_fn(
        dim: usize,
        radius: f64,
        cells: usize,
        f: impl Fn([f64; 2]) -> f64,
    ) -> Result<Self> {
        let (gx, gw) = quad::gauss_legendre(4);
        let w = 2.0 * radius / cells as f64;
        let edge = |a: usize| -radius + a as f64 * w;
        let mut values = Vec::with_capacity(cells.pow(dim as u32));
        if dim == 1 {
            for a in 0..cells {
                let v: f64 = gx
                    .iter()
                    .zip(&gw)
                    .map(|(x, wt)| wt * f([edge(a) + 0.5 * w * (x + 1.0), 0.0]))
                    .sum();
                values.push(0.5 * v);
            }
        } else {
            for a in 0..cells {
                for b in 0..cells {
                    let mut v = 0.0;
                    for (x, wx) in gx.iter().zip(&gw) {
                        for (y, wy) in gx.iter().zip(&gw) {
                            v += wx
                                * wy
                                * f([edge(a) + 0.5 * w * (x + 1.0), edge(b) + 0.5 * w * (y + 1.0)]);
                        }
                    }
                    values.push(0.25 * v);
                }
            }
        }
        Self::new(dim, radius, cells, values)
    }

    pub fn width(&self) -> f64 {
        2.0 * self.radius / self.cells as f64
    }

    fn edge(&self, a: usize) -> f64 {
        -self.radius + a as f64 * self.width()
    }

    fn cell_of(&self, x: f64) -> Option<usize> {
        if x < -self.radius || x >= self.radius {
            return None;
        }
        Some((((x + self.radius) / self.width()) as usize).min(self.cells - 1))
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self.dim {
            1 => self.cell_of(x[0]).map_or(0.0, |a| self.values[a]),
            _ => match (self.cell_of(x[0]), self.cell_of(x[1])) {
                (Some(a), Some(b)) => self.values[a * self.cells + b],
                _ => 0.0,
            },
        }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.width().powi(self.dim as i32)
    }

    /// Subtracts the mean over the support; returns the mean removed.
    pub fn remove_mean(&mut self) -> f64 {
        let mean = self.values.iter().sum::<f64>() / self.values.len() as f64;
        for v in &mut self.values {
            *v -= mean;
        }
        mean
    }

    fn second_antiderivative(&self, x: f64) -> f64 {
        let w = self.width();
        let g = |s: f64| {
            if s <= 0.0 {
                0.0
            } else if s < w {
                0.5 * s * s
            } else {
                0.5 * w * w + w * (s - w)
            }
        };
        self.values
            .iter()
            .enumerate()
            .map(|(a, c)| c * g(x - self.edge(a)))
            .sum()
    }

    fn fourier(&self, xi: [f64; 2]) -> Complex64 {
        let w = self.width();
        let factor = |a: usize, f: f64| -> Complex64 {
            let mid = self.edge(a) + 0.5 * w;
            Complex64::from_polar(w * sinc(w * f), -2.0 * PI * mid * f)
        };
        if self.dim == 1 {
            (0..self.cells)
                .map(|a| factor(a, xi[0]) * self.values[a])
                .sum()
        } else {
            let fx: Vec<Complex64> = (0..self.cells).map(|a| factor(a, xi[0])).collect();
            let fy: Vec<Complex64> = (0..self.cells).map(|b| factor(b, xi[1])).collect();
            let mut s = Complex64::new(0.0, 0.0);
            for (row, ga) in self.values.chunks(self.cells).zip(&fx) {
                for (v, gb) in row.iter().zip(&fy) {
                    s += ga * gb * v;
                }
            }
            s
        }
    }

    /// Largest distance from the origin to a point of cell `idx`.
    fn far_distance(&self, idx: usize) -> f64 {
        let far = |a: usize| self.edge(a).abs().max(self.edge(a + 1).abs());
        if self.dim == 1 {
            far(idx)
        } else {
            far(idx / self.cells).hypot(far(idx % self.cells))
        }
    }

    fn abs_pow_integral(&self, u: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(u)).sum::<f64>()
            * self.width().powi(self.dim as i32)
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - (PI * z).powi(2) / 6.0
    } else {
        (PI * z).sin() / (PI * z)
    }
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// A kernel `psi` on `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    /// `chi_[-1,0] - chi_[0,1]` on the line.
    #[serde(rename = "haar")]
    Haar1D,
    /// `d/dt P_t` at `t = 1`, with `P_t` the mass-one Poisson kernel.
    #[serde(rename = "poisson")]
    PoissonDerivative {
        #[serde(default = "one")]
        dim: usize,
    },
    /// The Poisson kernel `P_1` itself; positive, so it is only a size-bound kernel.
    PoissonKernel {
        #[serde(default = "one")]
        dim: usize,
    },
    /// `|x|^(-n+eps) Omega(x') chi_(0,1](|x|)`.
    #[serde(rename = "trunc_hom")]
    TruncatedHomogeneous { eps: f64, omega: SphereFunction },
    /// Compactly supported kernel claimed to lie in `L^q`, `q >= 2`.
    CompactLq { q: f64, profile: CellProfile },
    /// User kernel with declared compact support.
    Custom {
        profile: CellProfile,
        #[serde(default = "yes")]
        enforce_mean: bool,
        /// Mean subtracted by [`Kernel::normalized`].
        #[serde(default)]
        enforced_mean: f64,
    },
    /// `psi(-x)`.
    Reflected { inner: Box<Kernel> },
    /// `c psi(x)`.
    Scaled { factor: f64, inner: Box<Kernel> },
}

impl Kernel {
    pub fn poisson(dim: usize) -> Self {
        Kernel::PoissonDerivative { dim }
    }

    pub fn trunc_hom(eps: f64, omega: SphereFunction) -> Result<Self> {
        Kernel::TruncatedHomogeneous { eps, omega }.validated()
    }

    pub fn compact_lq(q: f64, profile: CellProfile) -> Result<Self> {
        Kernel::CompactLq { q, profile }.validated()
    }

    pub fn custom(profile: CellProfile, enforce_mean: bool) -> Result<Self> {
        Kernel::Custom {
            profile,
            enforce_mean,
            enforced_mean: 0.0,
        }
        .validated()
    }

    /// Parses a JSON descriptor and normalises it.
    pub fn from_json(s: &str) -> Result<Self> {
        let k: Kernel = serde_json::from_str(s)?;
        k.validated()
    }

    /// Checks parameters and enforces cancellation on sampled kernels.
    pub fn validated(self) -> Result<Self> {
        match self {
            Kernel::PoissonDerivative { dim } | Kernel::PoissonKernel { dim }
                if dim != 1 && dim != 2 =>
            {
                Err(Error::UnsupportedDimension(dim))
            }
            Kernel::TruncatedHomogeneous { eps, ref omega } => {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::InvalidParameter(format!("eps = {eps}")));
                }
                SphereFunction::new(omega.dim, omega.values.clone())?;
                if omega.integral().abs() > 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "Omega must have zero mean, got {:e}",
                        omega.integral()
                    )));
                }
                Ok(self)
            }
            Kernel::CompactLq { q, mut profile } => {
                if !(q >= 2.0) {
                    return Err(Error::InvalidParameter(format!("q = {q} < 2")));
                }
                let profile_checked = CellProfile::new(
                    profile.dim,
                    profile.radius,
                    profile.cells,
                    profile.values.clone(),
                )?;
                profile.values = profile_checked.values;
                profile.remove_mean();
                Ok(Kernel::CompactLq { q, profile })
            }
            Kernel::Custom {
                mut profile,
                enforce_mean,
                enforced_mean,
            } => {
                CellProfile::new(
                    profile.dim,
                    profile.radius,
                    profile.cells,
                    profile.values.clone(),
                )?;
                let removed = if enforce_mean {
                    profile.remove_mean()
                } else {
                    0.0
                };
                Ok(Kernel::Custom {
                    profile,
                    enforce_mean,
                    enforced_mean: enforced_mean + removed,
                })
            }
            Kernel::Reflected { inner } => Ok(Kernel::Reflected {
                inner: Box::new(inner.validated()?),
            }),
            Kernel::Scaled { factor, inner } => Ok(Kernel::Scaled {
                factor,
                inner: Box::new(inner.validated()?),
            }),
            k => Ok(k),
        }
    }

    pub fn reflected(self) -> Self {
        Kernel::Reflected {
            inner: Box::new(self),
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Kernel::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Kernel::Haar1D => 1,
            Kernel::PoissonDerivative { dim } | Kernel::PoissonKernel { dim } => *dim,
            Kernel::TruncatedHomogeneous { omega, .. } => omega.dim,
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => profile.dim,
            Kernel::Reflected { inner } | Kernel::Scaled { inner, .. } => inner.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Haar1D => "haar".into(),
            Kernel::PoissonDerivative { dim } => format!("poisson_derivative_{dim}d"),
            Kernel::PoissonKernel { dim } => format!("poisson_kernel_{dim}d"),
            Kernel::TruncatedHomogeneous { eps, omega } => {
                format!("trunc_hom_{}d_eps{eps}", omega.dim)
            }
            Kernel::CompactLq { q, profile } => format!("compact_l{q}_{}d", profile.dim),
            Kernel::Custom { profile, .. } => format!("custom_{}d", profile.dim),
            Kernel::Reflected { inner } => format!("reflected_{}", inner.name()),
            Kernel::Scaled { factor, inner } => format!("{factor}x_{}", inner.name()),
        }
    }

    /// Whether the catalog entry is meant to satisfy `int psi = 0`.
    pub fn is_cancellative(&self) -> bool {
        match self {
            Kernel::PoissonKernel { .. } => false,
            Kernel::Custom { enforce_mean, .. } => *enforce_mean,
            Kernel::Reflected { inner } | Kernel::Scaled { inner, .. } => inner.is_cancellative(),
            _ => true,
        }
    }

    /// Whether convolutions use the closed-form multiplier rather than samples.
    pub fn uses_spectral_route(&self) -> bool {
        match self {
            Kernel::PoissonDerivative { .. } | Kernel::PoissonKernel { .. } => true,
            Kernel::Reflected { inner } | Kernel::Scaled { inner, .. } => {
                inner.uses_spectral_route()
            }
            _ => false,
        }
    }

    /// Radius of a ball containing the support, if compact.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Kernel::Haar1D | Kernel::TruncatedHomogeneous { .. } => Some(1.0),
            Kernel::PoissonDerivative { .. } | Kernel::PoissonKernel { .. } => None,
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                Some(profile.radius * (profile.dim as f64).sqrt())
            }
            Kernel::Reflected { inner } | Kernel::Scaled { inner, .. } => inner.support_radius(),
        }
    }

    /// Pointwise value. `TruncatedHomogeneous` is defined as 0 at the origin.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        match self {
            Kernel::Haar1D => {
                let x = x[0];
                let left = if (-1.0..=0.0).contains(&x) { 1.0 } else { 0.0 };
                let right = if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 };
                left - right
            }
            Kernel::PoissonDerivative { dim } => {
                let r2 = x[0] * x[0] + if *dim == 2 { x[1] * x[1] } else { 0.0 };
                if *dim == 1 {
                    (r2 - 1.0) / (PI * (r2 + 1.0).powi(2))
                } else {
                    (r2 - 2.0) / (2.0 * PI * (r2 + 1.0).powf(2.5))
                }
            }
            Kernel::PoissonKernel { dim } => {
                if *dim == 1 {
                    1.0 / (PI * (1.0 + x[0] * x[0]))
                } else {
                    1.0 / (2.0 * PI * (1.0 + x[0] * x[0] + x[1] * x[1]).powf(1.5))
                }
            }
            Kernel::TruncatedHomogeneous { eps, omega } => {
                let r = norm(x, omega.dim);
                if r == 0.0 || r > 1.0 {
                    0.0
                } else {
                    r.powf(-(omega.dim as f64) + eps) * omega.eval_dir(x)
                }
            }
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => profile.eval(x),
            Kernel::Reflected { inner } => inner.value([-x[0], -x[1]]),
            Kernel::Scaled { factor, inner } => factor * inner.value(x),
        }
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Complex64 {
        Complex64::new(self.value(x), 0.0)
    }

    /// Continuous Fourier transform `int psi(x) exp(-2 pi i <x, xi>) dx`.
    pub fn fourier(&self, xi: [f64; 2]) -> Complex64 {
        match self {
            Kernel::Haar1D => {
                let f = xi[0];
                if f == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let s = (PI * f).sin();
                    Complex64::new(0.0, 2.0 * s * s / (PI * f))
                }
            }
            Kernel::PoissonDerivative { dim } => {
                let r = norm(xi, *dim);
                Complex64::new(-2.0 * PI * r * (-2.0 * PI * r).exp(), 0.0)
            }
            Kernel::PoissonKernel { dim } => {
                Complex64::new((-2.0 * PI * norm(xi, *dim)).exp(), 0.0)
            }
            Kernel::TruncatedHomogeneous { eps, omega } => trunc_hom_fourier(*eps, omega, xi),
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                profile.fourier(xi)
            }
            Kernel::Reflected { inner } => inner.fourier([-xi[0], -xi[1]]),
            Kernel::Scaled { factor, inner } => inner.fourier(xi) * *factor,
        }
    }

    /// Second antiderivative anchored at `-inf` (1-D kernels only).
    fn second_antiderivative(&self, x: f64) -> f64 {
        match self {
            Kernel::Haar1D => {
                if x <= -1.0 {
                    0.0
                } else if x <= 0.0 {
                    0.5 * (x + 1.0).powi(2)
                } else if x <= 1.0 {
                    0.5 + x - 0.5 * x * x
                } else {
                    1.0
                }
            }
            Kernel::PoissonDerivative { .. } => -(x * x).ln_1p() / (2.0 * PI),
            Kernel::PoissonKernel { .. } => (x * x.atan() - 0.5 * (x * x).ln_1p()) / PI + 0.5 * x,
            Kernel::TruncatedHomogeneous { eps, omega } => {
                let (op, om) = (omega.values[0], omega.values[1]);
                let e = *eps;
                if x <= -1.0 {
                    0.0
                } else if x <= 0.0 {
                    let ax = -x;
                    om / e * ((x + 1.0) - (1.0 - ax.powf(1.0 + e)) / (1.0 + e))
                } else if x <= 1.0 {
                    om / (1.0 + e) + om * x / e + op * x.powf(1.0 + e) / (e * (1.0 + e))
                } else {
                    om / (1.0 + e) + om / e + op / (e * (1.0 + e)) + (x - 1.0) * (om + op) / e
                }
            }
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                profile.second_antiderivative(x)
            }
            Kernel::Reflected { inner } => inner.second_antiderivative(-x),
            Kernel::Scaled { factor, inner } => factor * inner.second_antiderivative(x),
        }
    }

    /// `int_{S^(n-1)} |psi(r theta)|^u d sigma(theta)`.
    pub fn sphere_abs_pow(&self, r: f64, u: f64) -> f64 {
        match self {
            Kernel::Haar1D => {
                if r > 0.0 && r <= 1.0 {
                    2.0
                } else {
                    0.0
                }
            }
            Kernel::PoissonDerivative { dim } | Kernel::PoissonKernel { dim } => {
                sphere_area(*dim) * self.value([r, 0.0]).abs().powf(u)
            }
            Kernel::TruncatedHomogeneous { eps, omega } => {
                if r > 0.0 && r <= 1.0 {
                    r.powf((eps - omega.dim as f64) * u) * omega.abs_pow_integral(u)
                } else {
                    0.0
                }
            }
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                if profile.dim == 1 {
                    profile.eval([r, 0.0]).abs().powf(u) + profile.eval([-r, 0.0]).abs().powf(u)
                } else {
                    let m = 720;
                    (0..m)
                        .map(|k| {
                            let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                            profile.eval([r * th.cos(), r * th.sin()]).abs().powf(u)
                        })
                        .sum::<f64>()
                        * (2.0 * PI / m as f64)
                }
            }
            Kernel::Reflected { inner } => inner.sphere_abs_pow(r, u),
            Kernel::Scaled { factor, inner } => factor.abs().powf(u) * inner.sphere_abs_pow(r, u),
        }
    }

    /// Radii where `|psi|` is not smooth; quadrature splits there.
    pub fn radial_breaks(&self) -> Vec<f64> {
        match self {
            Kernel::Haar1D | Kernel::TruncatedHomogeneous { .. } => vec![1.0],
            Kernel::PoissonDerivative { dim } => vec![(*dim as f64).sqrt()],
            Kernel::PoissonKernel { .. } => vec![],
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                let mut b: Vec<f64> = (0..=profile.cells)
                    .map(|a| profile.edge(a).abs())
                    .filter(|&r| r > 0.0)
                    .collect();
                if profile.dim == 2 {
                    b.push(profile.radius * 2f64.sqrt());
                }
                b.sort_by(f64::total_cmp);
                b.dedup();
                b
            }
            Kernel::Reflected { inner } | Kernel::Scaled { inner, .. } => inner.radial_breaks(),
        }
    }

    /// `int_{lo < |x| < hi} |psi(x)|^u weight(|x|) dx`; `hi = None` means infinity.
    pub fn radial_integral(
        &self,
        u: f64,
        weight: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: Option<f64>,
    ) -> Estimate {
        let n = self.dim() as i32;
        let f = |r: f64| r.powi(n - 1) * self.sphere_abs_pow(r, u) * weight(r);
        let breaks = self.radial_breaks();
        let tol = 1e-12;
        let hi = match (hi, self.support_radius()) {
            (Some(h), Some(s)) => Some(h.min(s)),
            (None, Some(s)) => Some(s),
            (h, None) => h,
        };
        match hi {
            Some(h) if h <= lo => Estimate::exact(0.0),
            Some(h) => quad::integrate_pieces(&f, lo, h, &breaks, tol),
            None => {
                let start = lo.max(1.0);
                let head = if lo < start {
                    quad::integrate_pieces(&f, lo, start, &breaks, tol)
                } else {
                    Estimate::exact(0.0)
                };
                let tail = quad::integrate_to_infinity(&f, start, &breaks, tol, 80);
                Estimate {
                    value: head.value + tail.value,
                    error: head.error + tail.error,
                }
            }
        }
    }

    /// `||psi||_1`.
    pub fn l1_norm(&self) -> f64 {
        match self {
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                profile.abs_pow_integral(1.0)
            }
            Kernel::Reflected { inner } => inner.l1_norm(),
            Kernel::Scaled { factor, inner } => factor.abs() * inner.l1_norm(),
            _ => self.radial_integral(1.0, &|_| 1.0, 0.0, None).value,
        }
    }

    /// `int psi`, analytic where available.
    pub fn integral(&self) -> f64 {
        match self {
            Kernel::PoissonKernel { .. } => 1.0,
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                profile.integral()
            }
            Kernel::Reflected { inner } => inner.integral(),
            Kernel::Scaled { factor, inner } => factor * inner.integral(),
            Kernel::TruncatedHomogeneous { eps, omega } => omega.integral() / eps,
            _ => 0.0,
        }
    }

    /// `int |psi|^q` over the whole space, used for `L^q` membership checks.
    pub fn abs_pow_integral(&self, q: f64) -> Estimate {
        match self {
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => {
                Estimate::exact(profile.abs_pow_integral(q))
            }
            _ => self.radial_integral(q, &|_| 1.0, 0.0, None),
        }
    }

    /// Least non-increasing radial majorant `sup_{|y| >= r} |psi(y)|`.
    pub fn majorant_value(&self, r: f64) -> f64 {
        match self {
            Kernel::Haar1D => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kernel::PoissonDerivative { dim } => {
                let a = |s: f64| self.value([s, 0.0]).abs();
                // |psi| decreases to a zero at r0, rises to a bump at r1, then decays.
                let (r0, r1) = if *dim == 1 {
                    (1.0, 3f64.sqrt())
                } else {
                    (2f64.sqrt(), 2.0)
                };
                if r <= r0 {
                    a(r.max(0.0)).max(a(r1))
                } else if r <= r1 {
                    a(r1)
                } else {
                    a(r)
                }
            }
            Kernel::PoissonKernel { .. } => self.value([r.max(0.0), 0.0]),
            Kernel::TruncatedHomogeneous { eps, omega } => {
                if r > 1.0 {
                    0.0
                } else if r <= 0.0 {
                    f64::INFINITY
                } else {
                    r.powf(eps - omega.dim as f64) * omega.sup_abs()
                }
            }
            Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } => profile
                .values
                .iter()
                .enumerate()
                .filter(|(i, _)| profile.far_distance(*i) > r)
                .fold(0.0, |m, (_, v)| m.max(v.abs())),
            Kernel::Reflected { inner } => inner.majorant_value(r),
            Kernel::Scaled { factor, inner } => factor.abs() * inner.majorant_value(r),
        }
    }

    /// `int_{R^n} h_psi(|x|) dx` by quadrature of the majorant.
    pub fn majorant_l1(&self) -> Estimate {
        let n = self.dim() as i32;
        let s = sphere_area(self.dim());
        let f = move |r: f64| s * r.powi(n - 1) * self.majorant_value(r);
        let mut breaks = self.radial_breaks();
        if let Kernel::PoissonDerivative { dim } = self {
            breaks.push(if *dim == 1 { 3f64.sqrt() } else { 2.0 });
        }
        match self.support_radius() {
            Some(rad) => quad::integrate_pieces(&f, 0.0, rad, &breaks, 1e-12),
            None => {
                let head = quad::integrate_pieces(&f, 0.0, 1.0, &breaks, 1e-12);
                let tail = quad::integrate_to_infinity(&f, 1.0, &breaks, 1e-12, 80);
                Estimate {
                    value: head.value + tail.value,
                    error: head.error + tail.error,
                }
            }
        }
    }

    /// Angular factor `Omega` with `|psi(x)| <= h(|x|) Omega(x')`.
    pub fn sphere_majorant(&self) -> SphereFunction {
        match self {
            Kernel::TruncatedHomogeneous { omega, .. } => omega.abs(),
            Kernel::Reflected { inner } => {
                let om = inner.sphere_majorant();
                if om.dim == 1 {
                    SphereFunction {
                        dim: 1,
                        values: vec![om.values[1], om.values[0]],
                    }
                } else {
                    let m = om.values.len();
                    SphereFunction {
                        dim: 2,
                        values: (0..m).map(|k| om.values[(k + m / 2) % m]).collect(),
                    }
                }
            }
            Kernel::Scaled { inner, .. } => inner.sphere_majorant(),
            k => SphereFunction::constant(k.dim(), 1.0),
        }
    }

    /// Mass of `|psi|` outside the ball of radius `r`, when known in closed form.
    pub fn tail_mass_beyond(&self, r: f64) -> Option<f64> {
        match self {
            Kernel::PoissonDerivative { dim: 1 } => {
                let a = r.max(0.0);
                Some(if a >= 1.0 {
                    2.0 / PI * a / (1.0 + a * a)
                } else {
                    2.0 / PI * (1.0 - a / (1.0 + a * a))
                })
            }
            Kernel::PoissonDerivative { dim: 2 } => {
                let g = |u: f64| -u.powf(-0.5) + u.powf(-1.5);
                let u0 = r * r + 1.0;
                Some(if r >= 2f64.sqrt() {
                    -g(u0)
                } else {
                    g(u0) - 2.0 * g(3.0)
                })
            }
            Kernel::PoissonKernel { dim: 1 } => Some(1.0 - 2.0 / PI * r.max(0.0).atan()),
            Kernel::PoissonKernel { dim: 2 } => Some((1.0 + r * r).powf(-0.5)),
            Kernel::Scaled { factor, inner } => inner.tail_mass_beyond(r).map(|m| m * factor.abs()),
            Kernel::Reflected { inner } => inner.tail_mass_beyond(r),
            k => k
                .support_radius()
                .map(|s| if r >= s { 0.0 } else { f64::NAN }),
        }
    }

    /// Hat-function average of `psi_t` centred at `y` for grid step `h`.
    pub fn hat_average(&self, t: f64, y: [f64; 2], h: f64) -> f64 {
        if self.dim() == 1 {
            let phi2 = |x: f64| t * self.second_antiderivative(x / t);
            let y = y[0];
            (phi2(y + h) - 2.0 * phi2(y) + phi2(y - h)) / (h * h)
        } else {
            hat_average_2d(self, t, y, h)
        }
    }
}

fn norm(x: [f64; 2], dim: usize) -> f64 {
    if dim == 1 {
        x[0].abs()
    } else {
        x[0].hypot(x[1])
    }
}

fn trunc_hom_fourier(eps: f64, omega: &SphereFunction, xi: [f64; 2]) -> Complex64 {
    // r^(eps-1) dr = ds / eps with r = s^(1/eps); the s-integrand is smooth.
    let size = xi[0].hypot(xi[1]);
    let panels = 4 + (2.0 * size / eps).ceil() as usize;
    if omega.dim == 1 {
        let (op, om) = (omega.values[0], omega.values[1]);
        let re = quad::gauss_panels(
            |s| {
                let r = s.powf(1.0 / eps);
                let ph = 2.0 * PI * r * xi[0];
                (op + om) * ph.cos()
            },
            0.0,
            1.0,
            panels,
            16,
        ) / eps;
        let im = quad::gauss_panels(
            |s| {
                let r = s.powf(1.0 / eps);
                let ph = 2.0 * PI * r * xi[0];
                (om - op) * ph.sin()
            },
            0.0,
            1.0,
            panels,
            16,
        ) / eps;
        return Complex64::new(re, im);
    }
    // 2-D: r^(eps-2) r dr = ds / eps; angular integral arc by arc.
    let m = omega.values.len();
    let arc = 2.0 * PI / m as f64;
    let (gx, gw) = quad::gauss_legendre(8);
    let sub = 1 + (size * arc).ceil() as usize;
    let mut dirs = Vec::new();
    for (k, &v) in omega.values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let lo = (k as f64 - 0.5) * arc;
        let w = arc / sub as f64;
        for p in 0..sub {
            for (x, wt) in gx.iter().zip(&gw) {
                let th = lo + p as f64 * w + 0.5 * w * (x + 1.0);
                dirs.push((th.cos() * xi[0] + th.sin() * xi[1], v * wt * 0.5 * w));
            }
        }
    }
    let inner = |s: f64, part: usize| -> f64 {
        let r = s.powf(1.0 / eps);
        dirs.iter()
            .map(|(proj, wt)| {
                let ph = -2.0 * PI * r * proj;
                wt * if part == 0 { ph.cos() } else { ph.sin() }
            })
            .sum()
    };
    let re = quad::gauss_panels(|s| inner(s, 0), 0.0, 1.0, panels, 16) / eps;
    let im = quad::gauss_panels(|s| inner(s, 1), 0.0, 1.0, panels, 16) / eps;
    Complex64::new(re, im)
}

fn hat_average_2d(k: &Kernel, t: f64, y: [f64; 2], h: f64) -> f64 {
    if let Kernel::CompactLq { profile, .. } | Kernel::Custom { profile, .. } = k {
        return cell_hat_average_2d(profile, t, y, h);
    }
    if let Kernel::Scaled { factor, inner } = k {
        return factor * hat_average_2d(inner, t, y, h);
    }
    let (gx, gw) = quad::gauss_legendre(4);
    let f = |p: [f64; 2]| {
        let lam =
            (1.0 - (p[0] - y[0]).abs() / h).max(0.0) * (1.0 - (p[1] - y[1]).abs() / h).max(0.0);
        lam * k.value([p[0] / t, p[1] / t]) / (t * t)
    };
    let support = k.support_radius().map(|s| s * t);
    let mut total = 0.0;
    for (sx, sy) in [(-1.0, -1.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 0.0)] {
        let lo = [y[0] + sx * h, y[1] + sy * h];
        total += square_quad(&f, lo, h, t, support, &gx, &gw, 0);
    }
    total / (h * h)
}

#[allow(clippy::too_many_arguments)]
fn square_quad(
    f: &dyn Fn([f64; 2]) -> f64,
    lo: [f64; 2],
    side: f64,
    t: f64,
    support: Option<f64>,
    gx: &[f64],
    gw: &[f64],
    depth: u32,
) -> f64 {
    let hi = [lo[0] + side, lo[1] + side];
    let near = [lo[0].abs().min(hi[0].abs()), lo[1].abs().min(hi[1].abs())];
    let near_d = if lo[0] <= 0.0 && hi[0] >= 0.0 {
        0.0
    } else {
        near[0]
    }
    .hypot(if lo[1] <= 0.0 && hi[1] >= 0.0 {
        0.0
    } else {
        near[1]
    });
    let far_d = lo[0]
        .abs()
        .max(hi[0].abs())
        .hypot(lo[1].abs().max(hi[1].abs()));
    if let Some(s) = support {
        if near_d > s {
            return 0.0;
        }
    }
    let contains_origin = near_d == 0.0;
    let crosses_edge = support.is_some_and(|s| near_d < s && far_d > s);
    let refine =
        (contains_origin && depth < 14) || (crosses_edge && depth < 5) || side > t && depth < 3;
    if refine {
        let half = 0.5 * side;
        let mut s = 0.0;
        for (a, b) in [(0.0, 0.0), (half, 0.0), (0.0, half), (half, half)] {
            s += square_quad(
                f,
                [lo[0] + a, lo[1] + b],
                half,
                t,
                support,
                gx,
                gw,
                depth + 1,
            );
        }
        return s;
    }
    let mut s = 0.0;
    for (x, wx) in gx.iter().zip(gw) {
        for (yv, wy) in gx.iter().zip(gw) {
            s += wx
                * wy
                * f([
                    lo[0] + 0.5 * side * (x + 1.0),
                    lo[1] + 0.5 * side * (yv + 1.0),
                ]);
        }
    }
    0.25 * side * side * s
}

fn cell_hat_average_2d(profile: &CellProfile, t: f64, y: [f64; 2], h: f64) -> f64 {
    // Separable: psi_t is piecewise constant on cells of width t w scaled by t^-2.
    let w = profile.width() * t;
    let axis = |c: f64| -> Vec<(usize, f64)> {
        (0..profile.cells)
            .filter_map(|a| {
                let lo = profile.edge(a) * t;
                let v = hat_segment(lo - c, lo + w - c, h);
                (v != 0.0).then_some((a, v))
            })
            .collect()
    };
    let ax = axis(y[0]);
    let ay = axis(y[1]);
    let mut s = 0.0;
    for (a, va) in &ax {
        for (b, vb) in &ay {
            s += profile.values[a * profile.cells + b] * va * vb;
        }
    }
    s / (t * t * h * h)
}

/// `int_a^b Lambda(s / h) ds` for the unit hat of half-width `h`.
fn hat_segment(a: f64, b: f64, h: f64) -> f64 {
    let big = |s: f64| {
        let s = s.clamp(-h, h);
        if s <= 0.0 {
            s + h + s * s / (2.0 * h) - h / 2.0
        } else {
            s - s * s / (2.0 * h) + h / 2.0
        }
    };
    big(b) - big(a)
}

/// How grid samples of a kernel are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    /// Point values at grid nodes.
    Point,
    /// Hat-function averages (consistent with linear interpolation).
    Averaged,
}

/// Samples of `psi_t` with their leakage accounting.
#[derive(Debug, Clone)]
pub struct DilatedKernel {
    pub t: f64,
    pub samples: SampledFunction,
    /// Mass of `|psi_t|` outside the half-box (absolute).
    pub leakage: f64,
    /// `leakage / ||psi||_1`.
    pub leakage_relative: f64,
    pub flagged: bool,
}

/// Samples `psi_t(x) = t^-n psi(x / t)` on the grid.
pub fn dilate_sample(k: &Kernel, t: f64, geom: Geometry, mode: Sampling) -> Result<DilatedKernel> {
    dilate_sample_bounded(k, t, geom, mode, DEFAULT_LEAKAGE_BOUND)
}

pub fn dilate_sample_bounded(
    k: &Kernel,
    t: f64,
    geom: Geometry,
    mode: Sampling,
    bound: f64,
) -> Result<DilatedKernel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t = {t}")));
    }
    if k.dim() != geom.dim {
        return Err(Error::GeometryMismatch(format!(
            "kernel dimension {} on a {}-D grid",
            k.dim(),
            geom.dim
        )));
    }
    let h = geom.step();
    let n = geom.dim as i32;
    let reach = k.support_radius().map(|s| s * t + 2.0 * h);
    let values: Vec<Complex64> = (0..geom.len())
        .map(|i| {
            let x = geom.point(i);
            if let Some(r) = reach {
                if norm(x, geom.dim) > r {
                    return Complex64::new(0.0, 0.0);
                }
            }
            let v = match mode {
                Sampling::Point => k.value([x[0] / t, x[1] / t]) / t.powi(n),
                Sampling::Averaged => k.hat_average(t, x, h),
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    let samples = SampledFunction::new(geom, values)?;
    let vol = geom.cell_volume();
    let outside: f64 = samples
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| !geom.in_half_box(geom.point(*i)))
        .map(|(_, v)| v.norm())
        .sum::<f64>()
        * vol;
    let l1 = k.l1_norm();
    // Mass beyond the box is never sampled at all.
    let beyond = match k.tail_mass_beyond(geom.halfwidth / t) {
        Some(m) if m.is_finite() => m,
        _ => l1,
    };
    let leakage = outside + beyond;
    let leakage_relative = if l1 > 0.0 { leakage / l1 } else { 0.0 };
    Ok(DilatedKernel {
        t,
        samples,
        leakage,
        leakage_relative,
        flagged: leakage_relative > bound,
    })
}

/// Leakage of `psi_t` for the spectral route: closed-form mass beyond the half-box.
pub fn spectral_leakage(k: &Kernel, t: f64, geom: &Geometry) -> f64 {
    let l1 = k.l1_norm();
    match k.tail_mass_beyond(0.5 * geom.halfwidth / t) {
        Some(m) if m.is_finite() && l1 > 0.0 => m / l1,
        _ => 0.0,
    }
}

/// Grid spectrum of `psi_t` as used by every convolution-based operator,
/// together with its relative leakage.
pub fn dilated_spectrum(k: &Kernel, t: f64, geom: Geometry) -> Result<(SpectralFunction, f64)> {
    if k.uses_spectral_route() {
        if k.dim() != geom.dim {
            return Err(Error::GeometryMismatch("kernel dimension".into()));
        }
        let s = SpectralFunction::from_multiplier(geom, |xi| k.fourier([t * xi[0], t * xi[1]]));
        Ok((s, spectral_leakage(k, t, &geom)))
    } else {
        let d = dilate_sample(k, t, geom, Sampling::Averaged)?;
        Ok((fourier_transform(&d.samples), d.leakage_relative))
    }
}

/// Samples `radial_majorant` at the given increasing radii.
pub fn radial_majorant(k: &Kernel, radii: &[f64]) -> Result<RadialProfile> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must increase".into()));
    }
    Ok(RadialProfile {
        radii: radii.to_vec(),
        values: radii.iter().map(|&r| k.majorant_value(r)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar_profile() -> CellProfile {
        CellProfile::new(1, 1.0, 2, vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn haar_values() {
        let k = Kernel::Haar1D;
        assert_eq!(k.value([-0.5, 0.0]), 1.0);
        assert_eq!(k.value([0.5, 0.0]), -1.0);
        assert_eq!(k.value([2.0, 0.0]), 0.0);
        assert_eq!(k.value([0.0, 0.0]), 0.0);
    }

    #[test]
    fn poisson_derivative_at_origin() {
        let k = Kernel::poisson(1);
        assert!((k.value([0.0, 0.0]) + 1.0 / PI).abs() < 1e-15);
        // finite difference in t of P_t(0) = 1 / (pi t)
        let p = |t: f64| 1.0 / (PI * t);
        let d = 1e-5;
        let fd = (p(1.0 + d) - p(1.0 - d)) / (2.0 * d);
        assert!((fd - k.value([0.0, 0.0])).abs() < 1e-8);
    }

    #[test]
    fn trunc_hom_origin_is_zero() {
        let k = Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap();
        assert_eq!(k.value([0.0, 0.0]), 0.0);
        assert!((k.value([0.25, 0.0]) - 2.0).abs() < 1e-12);
        assert!((k.value([-0.25, 0.0]) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn trunc_hom_rejects_nonzero_mean() {
        let om = SphereFunction::new(1, vec![1.0, 0.5]).unwrap();
        assert!(Kernel::trunc_hom(0.5, om).is_err());
    }

    #[test]
    fn second_antiderivatives_are_consistent() {
        // Second differences with a small step recover point values.
        let d = 1e-4;
        let kernels = [
            Kernel::Haar1D,
            Kernel::poisson(1),
            Kernel::PoissonKernel { dim: 1 },
            Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap(),
            Kernel::custom(haar_profile(), false).unwrap(),
        ];
        for k in &kernels {
            for &x in &[-1.7, -0.6, -0.3, 0.2, 0.45, 0.77, 1.4, 3.0] {
                let approx = (k.second_antiderivative(x + d) - 2.0 * k.second_antiderivative(x)
                    + k.second_antiderivative(x - d))
                    / (d * d);
                assert!(
                    (approx - k.value([x, 0.0])).abs() < 1e-4,
                    "{} at {x}: {approx} vs {}",
                    k.name(),
                    k.value([x, 0.0])
                );
            }
        }
    }

    #[test]
    fn haar_fourier_magnitude() {
        let v = Kernel::Haar1D.fourier([0.5, 0.0]);
        assert!((v.norm() - 4.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn fourier_matches_direct_quadrature() {
        let k = Kernel::trunc_hom(0.5, SphereFunction::new(1, vec![1.0, -1.0]).unwrap()).unwrap();
        for &xi in &[0.3, 1.7, 6.0] {
            // Direct: -2i int_0^1 r^-0.5 sin(2 pi r xi) dr = -2i int_0^1 2 sin(2 pi s^2 xi) ds.
            let direct =
                quad::gauss_panels(|s| 2.0 * (2.0 * PI * s * s * xi).sin(), 0.0, 1.0, 200, 16);
            let got = k.fourier([xi, 0.0]);
            assert!(got.re.abs() < 1e-12);
            assert!(
                (got.im + 2.0 * direct).abs() < 1e-10,
                "{xi}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn custom_mean_is_enforced_and_reported() {
        let p = CellProfile::new(1, 1.0, 4, vec![1.0, 2.0, 3.0, 2.0]).unwrap();
        let k = Kernel::custom(p.clone(), true).unwrap();
        match &k {
            Kernel::Custom { enforced_mean, .. } => assert_eq!(*enforced_mean, 2.0),
            _ => unreachable!(),
        }
        assert!(k.integral().abs() < 1e-15);
        let broken = Kernel::custom(p, false).unwrap();
        assert!((broken.integral() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn json_descriptors() {
        let k = Kernel::from_json(r#"{"type":"haar"}"#).unwrap();
        assert_eq!(k, Kernel::Haar1D);
        let k = Kernel::from_json(r#"{"type":"poisson"}"#).unwrap();
        assert_eq!(k, Kernel::poisson(1));
        let k = Kernel::from_json(
            r#"{"type":"trunc_hom","eps":0.5,"omega":{"dim":1,"values":[1.0,-1.0]}}"#,
        )
        .unwrap();
        assert_eq!(k.dim(), 1);
        let k = Kernel::from_json(
            r#"{"type":"compact_lq","q":2,"profile":{"dim":1,"radius":1,"cells":2,"values":[3,1]}}"#,
        )
        .unwrap();
        assert!(k.integral().abs() < 1e-15);
        assert!(Kernel::from_json(r#"{"type":"nope"}"#).is_err());
    }

    #[test]
    fn haar_majorant() {
        let p = radial_majorant(&Kernel::Haar1D, &[0.0, 0.5, 1.0, 1.5]).unwrap();
        assert_eq!(p.values, vec![1.0, 1.0, 1.0, 0.0]);
        assert!(radial_majorant(&Kernel::Haar1D, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn point_sampling_reproduces_values() {
        let geom = Geometry::new(1, 4.0, 256).unwrap();
        let d = dilate_sample(&Kernel::Haar1D, 1.0, geom, Sampling::Point).unwrap();
        for (i, v) in d.samples.values().iter().enumerate() {
            assert_eq!(v.re, Kernel::Haar1D.value(geom.point(i)));
        }
    }

    #[test]
    fn tail_mass_matches_quadrature() {
        for k in [
            Kernel::poisson(1),
            Kernel::poisson(2),
            Kernel::PoissonKernel { dim: 2 },
        ] {
            for &r in &[0.5, 1.2, 3.0] {
                let q = k.radial_integral(1.0, &|_| 1.0, r, None).value;
                let c = k.tail_mass_beyond(r).unwrap();
                assert!((q - c).abs() < 1e-8, "{} r={r}: {q} vs {c}", k.name());
            }
        }
    }

    #[test]
    fn cell_profile_2d_hat_average_mass() {
        let p = CellProfile::from_fn(2, 1.0, 8, |x| x[0] * (1.0 - x[1] * x[1])).unwrap();
        let k = Kernel::custom(p, true).unwrap();
        let geom = Geometry::new(2, 4.0, 64).unwrap();
        let d = dilate_sample(&k, 0.7, geom, Sampling::Averaged).unwrap();
        assert!(d.samples.integral().norm() < 1e-12);
        assert_eq!(d.leakage, 0.0);
    }
}
