//! Sampled functions on a periodic box, their discrete Fourier duals,
//! FFT convolution and weighted Lebesgue norms.
//!
//! The box `[-R, R)^dim` is treated as one period cell. Sample `i` along an
//! axis sits at `x_i = -R + i * step` with `step = 2R / N`, so the origin is
//! always the grid point `i = N / 2`.
//!
//! Spectral coefficients approximate the continuous transform
//! `f^(xi) = int f(x) exp(-2 pi i <x, xi>) dx` at the frequencies `k / (2R)`,
//! `k` in `(-N/2, N/2]`, and are stored in FFT order.

use std::cell::RefCell;
use std::io::{Read, Write};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Pairwise summation; keeps reductions bit-stable and accurate.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Geometry shared by a sampled function and its spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dim: usize,
    pub halfwidth: f64,
    pub n: usize,
}

impl Geometry {
    pub fn new(dim: usize, halfwidth: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidParameter(format!("halfwidth {halfwidth}")));
        }
        Ok(Self { dim, halfwidth, n })
    }

    /// Default grid: `R = 16, N = 4096` in 1-D and `R = 8, N = 512` in 2-D.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 16.0, 4096),
            2 => Self::new(2, 8.0, 512),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.halfwidth / self.n as f64
    }

    /// Volume of one grid cell, `step^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.step().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.halfwidth + i as f64 * self.step()
    }

    /// Axis coordinates of every sample.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Point of flat index `idx` (row-major, first coordinate slowest).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.coord(idx), 0.0]
        } else {
            [self.coord(idx / self.n), self.coord(idx % self.n)]
        }
    }

    /// Signed integer frequency of FFT bin `m`, in `(-N/2, N/2]`.
    pub fn freq_index(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Frequency (cycles per unit length) of FFT bin `m`.
    pub fn freq(&self, m: usize) -> f64 {
        self.freq_index(m) as f64 / (2.0 * self.halfwidth)
    }

    /// Frequency vector of flat spectral index `idx`.
    pub fn freq_point(&self, idx: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.freq(idx), 0.0]
        } else {
            [self.freq(idx / self.n), self.freq(idx % self.n)]
        }
    }

    /// Flat index of the grid point shifted by `shift` samples per axis.
    pub fn shifted_index(&self, idx: usize, shift: [i64; 2]) -> usize {
        let n = self.n as i64;
        let wrap = |i: i64| i.rem_euclid(n) as usize;
        if self.dim == 1 {
            wrap(idx as i64 + shift[0])
        } else {
            let (i, j) = ((idx / self.n) as i64, (idx % self.n) as i64);
            wrap(i + shift[0]) * self.n + wrap(j + shift[1])
        }
    }

    /// Whether the point lies in the half-box `[-R/2, R/2]^dim`.
    pub fn in_half_box(&self, x: [f64; 2]) -> bool {
        let h = 0.5 * self.halfwidth;
        x[..self.dim].iter().all(|c| c.abs() <= h)
    }

    fn check_same(&self, other: &Geometry) -> Result<()> {
        if self != other {
            return Err(Error::GeometryMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Complex samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    geom: Geometry,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(geom: Geometry, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} values for a grid of {}",
                values.len(),
                geom.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { geom, values })
    }

    pub fn zeros(geom: Geometry) -> Self {
        Self {
            geom,
            values: vec![Complex64::new(0.0, 0.0); geom.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(geom: Geometry, f: impl Fn([f64; 2]) -> Complex64) -> Result<Self> {
        let values = (0..geom.len()).map(|i| f(geom.point(i))).collect();
        Self::new(geom, values)
    }

    pub fn from_real_fn(geom: Geometry, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::from_fn(geom, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real(geom: Geometry, values: &[f64]) -> Result<Self> {
        Self::new(
            geom,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            geom: self.geom,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.geom.check_same(&other.geom)?;
        Ok(Self {
            geom: self.geom,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `f(. - a)` for a shift of whole grid steps.
    pub fn translate(&self, shift: [i64; 2]) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (i, v) in self.values.iter().enumerate() {
            values[self.geom.shifted_index(i, shift)] = *v;
        }
        Self {
            geom: self.geom,
            values,
        }
    }

    /// `f(-x)` on the grid (index `i -> N - i`).
    pub fn reflect(&self) -> Self {
        let n = self.geom.n;
        let r = |i: usize| (n - i) % n;
        let values = (0..self.values.len())
            .map(|idx| {
                if self.geom.dim == 1 {
                    self.values[r(idx)]
                } else {
                    self.values[r(idx / n) * n + r(idx % n)]
                }
            })
            .collect();
        Self {
            geom: self.geom,
            values,
        }
    }

    /// Riemann-sum integral of the samples.
    pub fn integral(&self) -> Complex64 {
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * self.geom.cell_volume()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV rows `x,|f|` (1-D) or `x,y,|f|` (2-D).
    pub fn write_abs_csv<W: Write>(&self, mut out: W) -> Result<()> {
        if self.geom.dim == 1 {
            writeln!(out, "x,abs")?;
        } else {
            writeln!(out, "x,y,abs")?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.geom.point(i);
            if self.geom.dim == 1 {
                writeln!(out, "{},{}", p[0], v.norm())?;
            } else {
                writeln!(out, "{},{},{}", p[0], p[1], v.norm())?;
            }
        }
        Ok(())
    }

    pub fn to_record(&self) -> SampledRecord {
        SampledRecord {
            dim: self.geom.dim,
            halfwidth: self.geom.halfwidth,
            n: self.geom.n,
            values: self.values.iter().flat_map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn from_record(rec: &SampledRecord) -> Result<Self> {
        let geom = Geometry::new(rec.dim, rec.halfwidth, rec.n)?;
        if rec.values.len() != 2 * geom.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} interleaved reals for {} samples",
                rec.values.len(),
                geom.len()
            )));
        }
        let values = rec
            .values
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Self::new(geom, values)
    }

    /// Flat little-endian record: `u32 dim, f64 R, u32 N`, then interleaved
    /// `re, im` pairs as `f64`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.geom.dim as u32).to_le_bytes())?;
        out.write_all(&self.geom.halfwidth.to_le_bytes())?;
        out.write_all(&(self.geom.n as u32).to_le_bytes())?;
        for v in &self.values {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b8)?;
        let halfwidth = f64::from_le_bytes(b8);
        input.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let geom = Geometry::new(dim, halfwidth, n)?;
        let mut values = Vec::with_capacity(geom.len());
        for _ in 0..geom.len() {
            input.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            input.read_exact(&mut b8)?;
            values.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Self::new(geom, values)
    }
}

/// JSON form of a [`SampledFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRecord {
    pub dim: usize,
    #[serde(rename = "R")]
    pub halfwidth: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Interleaved `re, im` pairs.
    pub values: Vec<f64>,
}

/// Discrete Fourier dual of a [`SampledFunction`], in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    geom: Geometry,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(geom: Geometry, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != geom.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} coefficients for a grid of {}",
                coeffs.len(),
                geom.len()
            )));
        }
        Ok(Self { geom, coeffs })
    }

    /// Spectrum whose coefficient at frequency `xi` is `m(xi)`.
    pub fn from_multiplier(geom: Geometry, m: impl Fn([f64; 2]) -> Complex64) -> Self {
        let coeffs = (0..geom.len()).map(|i| m(geom.freq_point(i))).collect();
        Self { geom, coeffs }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Pointwise product of two spectra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.geom.check_same(&other.geom)?;
        Ok(Self {
            geom: self.geom,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Multiplies by a frequency-dependent symbol.
    pub fn apply(&self, m: impl Fn([f64; 2]) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.geom.freq_point(i)))
            .collect();
        Self {
            geom: self.geom,
            coeffs,
        }
    }

    /// `(sum |c|^2 / (2R)^dim)^(1/2)`, the continuous L2 norm of the dual.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        (pairwise_sum(&sq) / (2.0 * self.geom.halfwidth).powi(self.geom.dim as i32)).sqrt()
    }
}

fn fft_in_place(geom: &Geometry, data: &mut [Complex64], inverse: bool) {
    let n = geom.n;
    let fft = plan(n, inverse);
    if geom.dim == 1 {
        fft.process(data);
        return;
    }
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

fn parity(geom: &Geometry, idx: usize) -> f64 {
    let k = if geom.dim == 1 {
        geom.freq_index(idx)
    } else {
        geom.freq_index(idx / geom.n) + geom.freq_index(idx % geom.n)
    };
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled discrete transform approximating `int f(x) exp(-2 pi i <x, xi>) dx`.
pub fn fourier_transform(f: &SampledFunction) -> SpectralFunction {
    let geom = f.geom;
    let mut data = f.values.clone();
    fft_in_place(&geom, &mut data, false);
    let vol = geom.cell_volume();
    for (i, c) in data.iter_mut().enumerate() {
        *c *= vol * parity(&geom, i);
    }
    SpectralFunction { geom, coeffs: data }
}

/// Inverse of [`fourier_transform`].
pub fn inverse_transform(s: &SpectralFunction) -> SampledFunction {
    let geom = s.geom;
    let mut data: Vec<Complex64> = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * parity(&geom, i))
        .collect();
    fft_in_place(&geom, &mut data, true);
    let scale = 1.0 / (2.0 * geom.halfwidth).powi(geom.dim as i32);
    for c in &mut data {
        *c *= scale;
    }
    SampledFunction { geom, values: data }
}

/// Periodic convolution scaled to approximate `int g(y) f(x - y) dy`.
pub fn convolve(g: &SampledFunction, f: &SampledFunction) -> Result<SampledFunction> {
    g.geom.check_same(&f.geom)?;
    let prod = fourier_transform(g).mul(&fourier_transform(f))?;
    Ok(inverse_transform(&prod))
}

/// Cell-averaged weight values on the grid (all ones when `w` is `None`).
pub fn weight_samples(geom: &Geometry, w: Option<&Weight>) -> Vec<f64> {
    match w {
        None => vec![1.0; geom.len()],
        Some(w) => w.grid_values(geom),
    }
}

/// Riemann-sum approximation of `(int |f|^p w dx)^(1/p)`.
pub fn lp_norm(f: &SampledFunction, p: f64, w: Option<&Weight>) -> Result<f64> {
    let ws = weight_samples(&f.geom, w);
    lp_norm_with(
        f.values.iter().map(|v| v.norm()),
        p,
        &ws,
        f.geom.cell_volume(),
    )
}

/// Weighted norm of precomputed magnitudes against precomputed weight samples.
pub fn lp_norm_with(
    abs: impl Iterator<Item = f64>,
    p: f64,
    weights: &[f64],
    cell_volume: f64,
) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p}")));
    }
    let terms: Vec<f64> = abs.zip(weights).map(|(a, w)| a.powf(p) * w).collect();
    Ok((pairwise_sum(&terms) * cell_volume).powf(1.0 / p))
}

/// Log-uniform grid of dilation parameters discretising `int_0^inf . dt/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub k_min: i32,
    pub k_max: i32,
    pub substeps: usize,
}

impl TimeGrid {
    pub fn new(k_min: i32, k_max: i32, substeps: usize) -> Result<Self> {
        if k_max < k_min || substeps == 0 {
            return Err(Error::InvalidParameter(format!(
                "time grid k_min={k_min} k_max={k_max} m={substeps}"
            )));
        }
        Ok(Self {
            k_min,
            k_max,
            substeps,
        })
    }

    /// Nodes cover `[2^-8, 2^4)` with eight substeps per octave.
    pub fn default_grid() -> Self {
        Self {
            k_min: -8,
            k_max: 3,
            substeps: 8,
        }
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize * self.substeps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `t = 2^(k + i/m)` in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        (self.k_min..=self.k_max)
            .flat_map(|k| {
                (0..self.substeps)
                    .map(move |i| 2f64.powf(k as f64 + i as f64 / self.substeps as f64))
            })
            .collect()
    }

    /// Octave `k` of every node.
    pub fn octaves(&self) -> Vec<i32> {
        (self.k_min..=self.k_max)
            .flat_map(|k| std::iter::repeat_n(k, self.substeps))
            .collect()
    }

    pub fn weight(&self) -> f64 {
        std::f64::consts::LN_2 / self.substeps as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.weight(); self.len()]
    }

    pub fn t_min(&self) -> f64 {
        2f64.powi(self.k_min)
    }

    /// Upper end of the covered range, `2^(k_max + 1)`.
    pub fn t_max(&self) -> f64 {
        2f64.powi(self.k_max + 1)
    }

    pub fn largest_node(&self) -> f64 {
        *self.nodes().last().expect("time grid is non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            Geometry::new(1, 1.0, 1000),
            Err(Error::NotPowerOfTwo(1000))
        ));
        assert!(Geometry::new(3, 1.0, 64).is_err());
    }

    #[test]
    fn gaussian_is_fixed_point() {
        let g = Geometry::new(1, 8.0, 1024).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let s = fourier_transform(&f);
        for (i, v) in s.coeffs().iter().enumerate() {
            let xi = g.freq(i);
            assert!((v - c((-PI * xi * xi).exp())).norm() <= 1e-10);
        }
    }

    #[test]
    fn gaussian_fixed_point_2d() {
        let g = Geometry::new(2, 6.0, 128).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (-PI * (x[0] * x[0] + x[1] * x[1])).exp())
            .unwrap();
        let s = fourier_transform(&f);
        for (i, v) in s.coeffs().iter().enumerate() {
            let xi = g.freq_point(i);
            let want = (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
            assert!((v - c(want)).norm() <= 1e-10);
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = Geometry::new(1, 4.0, 64).unwrap();
        let s = fourier_transform(&SampledFunction::zeros(g));
        assert!(s.coeffs().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn haar_transform_at_half() {
        // |psi^(xi)| = 2 sin^2(pi xi) / (pi |xi|); at 1/2 this is 4/pi.
        let g = Geometry::new(1, 8.0, 65536).unwrap();
        let h = g.step();
        // Trapezoid weights at the jumps.
        let f = SampledFunction::from_real_fn(g, |x| {
            let x = x[0];
            if (x.abs() - 1.0).abs() < h / 4.0 {
                -0.5 * x.signum()
            } else if x.abs() < 1e-12 {
                0.0
            } else if x.abs() < 1.0 {
                -x.signum()
            } else {
                0.0
            }
        })
        .unwrap();
        let s = fourier_transform(&f);
        let idx = (0..g.n).find(|&m| (g.freq(m) - 0.5).abs() < 1e-12).unwrap();
        assert!((s.coeffs()[idx].norm() - 4.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn identity_convolution() {
        let g = Geometry::new(1, 4.0, 256).unwrap();
        let h = g.step();
        let delta =
            SampledFunction::from_real_fn(g, |x| if x[0].abs() < h / 2.0 { 1.0 / h } else { 0.0 })
                .unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (x[0] * 1.3).sin() * (-x[0] * x[0]).exp())
            .unwrap();
        let out = convolve(&delta, &f).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn convolution_rejects_mismatch() {
        let a = SampledFunction::zeros(Geometry::new(1, 4.0, 64).unwrap());
        let b = SampledFunction::zeros(Geometry::new(1, 4.0, 128).unwrap());
        assert!(convolve(&a, &b).is_err());
    }

    #[test]
    fn indicator_norm() {
        let g = Geometry::new(1, 4.0, 1024).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let n = lp_norm(&f, 3.0, None).unwrap();
        assert!((n - 1.0).abs() <= 2.0 * g.step());
        assert!(lp_norm(&f, 0.5, None).is_err());
    }

    #[test]
    fn time_grid_weights() {
        let tg = TimeGrid::new(-3, 2, 5).unwrap();
        let nodes = tg.nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = tg.weights().iter().sum();
        assert!((total - 6.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(tg.t_min(), 0.125);
        assert!(TimeGrid::new(2, 1, 3).is_err());
    }

    #[test]
    fn binary_and_json_records() {
        let g = Geometry::new(1, 2.0, 16).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex64::new(x[0], -x[0] * 0.5)).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 4 + 16 * 16);
        assert_eq!(SampledFunction::read_binary(&buf[..]).unwrap(), f);
        let json = serde_json::to_string(&f.to_record()).unwrap();
        assert!(json.contains("\"R\":2.0"));
        let back: SampledRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(SampledFunction::from_record(&back).unwrap(), f);
    }

    #[test]
    fn rejects_non_finite() {
        let g = Geometry::new(1, 2.0, 4).unwrap();
        assert!(matches!(
            SampledFunction::from_real(g, &[0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(1))
        ));
    }
}
