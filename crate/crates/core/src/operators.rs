//! Square functions, the Marcinkiewicz second-difference route, maximal
//! functions and Littlewood-Paley block diagnostics.

use std::io::Write;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    fourier_transform, inverse_transform, pairwise_sum, weight_samples, Geometry, SampledFunction,
    SpectralFunction, TimeGrid,
};
use crate::kernels::{dilated_spectrum, Kernel, SphereFunction, DEFAULT_LEAKAGE_BOUND};
use crate::quad;
use crate::weights::Weight;

/// Spectrum of `psi_t` on the grid, failing when a sampled kernel leaks.
pub fn kernel_spectrum(
    k: &Kernel,
    t: f64,
    geom: Geometry,
    bound: f64,
) -> Result<(SpectralFunction, f64)> {
    let (s, leak) = dilated_spectrum(k, t, geom)?;
    if !k.uses_spectral_route() && leak > bound {
        return Err(Error::Leakage {
            t,
            leakage: leak,
            bound,
        });
    }
    Ok((s, leak))
}

/// Default time grid adapted to the kernel: compact kernels stop where their
/// dilates leave the half-box, spectral-route kernels run on until
/// `t |xi| >= 4` at the lowest grid frequency `1 / 2R`.
pub fn time_grid_for(k: &Kernel, geom: &Geometry) -> TimeGrid {
    let base = TimeGrid::default_grid();
    let k_max = match k.support_radius() {
        Some(r) => {
            let fit = (0.5 * geom.halfwidth / r).log2().floor() as i32 - 1;
            fit.min(base.k_max)
        }
        None if k.uses_spectral_route() => {
            let reach = (8.0 * geom.halfwidth).log2().ceil() as i32 - 1;
            reach.max(base.k_max)
        }
        None => base.k_max,
    };
    TimeGrid {
        k_max: k_max.max(base.k_min),
        ..base
    }
}

/// Pointwise `S_psi f`, with a bound for the part of `int dt/t` outside the grid.
#[derive(Debug, Clone)]
pub struct SquareFunctionResult {
    pub values: SampledFunction,
    /// Sup-norm estimate of the squared contribution of `t` outside the grid.
    pub tail: f64,
    pub time_grid: TimeGrid,
    pub max_leakage: f64,
}

impl SquareFunctionResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.values.write_abs_csv(out)
    }

    /// `||S f||_2^2` by the grid Riemann sum.
    pub fn l2_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.values().iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq) * self.values.geometry().cell_volume()
    }
}

/// Extrapolated `int |u_t|^2 dt/t` beyond the two ends of the grid, from the
/// per-octave decay of `sup_x |u_t|^2`.
pub(crate) fn tail_estimate(sup_sq: &[f64], substeps: usize) -> f64 {
    let n = sup_sq.len();
    if n < 2 * substeps {
        return f64::INFINITY;
    }
    let end = |a: f64, b: f64| -> f64 {
        // a at the end node, b one octave inward; decay a = b 2^-alpha per octave.
        if a == 0.0 {
            return 0.0;
        }
        if b <= a {
            return f64::INFINITY;
        }
        let alpha = (b / a).log2();
        a / (alpha * std::f64::consts::LN_2)
    };
    end(sup_sq[0], sup_sq[substeps]) + end(sup_sq[n - 1], sup_sq[n - 1 - substeps])
}

/// Convolutions `psi_t * f` at each node, visited in order, in parallel chunks.
pub(crate) fn for_each_dilate(
    k: &Kernel,
    f: &SampledFunction,
    tg: &TimeGrid,
    mut visit: impl FnMut(usize, f64, &SampledFunction),
) -> Result<f64> {
    let geom = *f.geometry();
    if k.dim() != geom.dim {
        return Err(Error::GeometryMismatch(format!(
            "kernel dimension {} with {}-D data",
            k.dim(),
            geom.dim
        )));
    }
    let fh = fourier_transform(f);
    let nodes = tg.nodes();
    let chunk = rayon::current_num_threads().max(1) * 2;
    let mut max_leak: f64 = 0.0;
    for (c, ts) in nodes.chunks(chunk).enumerate() {
        let outs: Vec<Result<(SampledFunction, f64)>> = ts
            .par_iter()
            .map(|&t| {
                let (s, leak) = kernel_spectrum(k, t, geom, DEFAULT_LEAKAGE_BOUND)?;
                Ok((inverse_transform(&s.mul(&fh)?), leak))
            })
            .collect();
        for (i, o) in outs.into_iter().enumerate() {
            let (u, leak) = o?;
            max_leak = max_leak.max(leak);
            visit(c * chunk + i, ts[i], &u);
        }
    }
    Ok(max_leak)
}

/// `S f(x) = (int |psi_t * f(x)|^2 dt/t)^(1/2)` by the time-grid Riemann sum.
pub fn square_function(
    k: &Kernel,
    f: &SampledFunction,
    tg: &TimeGrid,
) -> Result<SquareFunctionResult> {
    let geom = *f.geometry();
    let w = tg.weight();
    let mut acc = vec![0.0; geom.len()];
    let mut sups = Vec::with_capacity(tg.len());
    let max_leakage = for_each_dilate(k, f, tg, |_, _, u| {
        let mut sup: f64 = 0.0;
        for (a, v) in acc.iter_mut().zip(u.values()) {
            let s = v.norm_sqr();
            *a += w * s;
            sup = sup.max(s);
        }
        sups.push(sup);
    })?;
    let values = acc.iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect();
    Ok(SquareFunctionResult {
        values: SampledFunction::new(geom, values)?,
        tail: tail_estimate(&sups, tg.substeps),
        time_grid: tg.clone(),
        max_leakage,
    })
}

/// Exact antiderivative of the piecewise-linear interpolant of periodic samples.
struct Antiderivative<'a> {
    f: &'a [Complex64],
    cum: Vec<Complex64>,
    total: Complex64,
    h: f64,
}

impl<'a> Antiderivative<'a> {
    fn new(f: &'a SampledFunction) -> Self {
        let g = f.geometry();
        let h = g.step();
        let v = f.values();
        let n = v.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        cum.push(acc);
        for i in 0..n {
            acc += (v[i] + v[(i + 1) % n]) * (0.5 * h);
            cum.push(acc);
        }
        Self {
            f: v,
            total: cum[n],
            cum,
            h,
        }
    }

    /// `F` at `x_i + s`, with `F(x + 2R) = F(x) + total`.
    fn at(&self, i: i64, s: f64) -> Complex64 {
        let n = self.f.len() as i64;
        let (mut i, mut s) = (i, s);
        let shift = s.div_euclid(self.h);
        i += shift as i64;
        s -= shift * self.h;
        let wraps = i.div_euclid(n);
        let j = i.rem_euclid(n) as usize;
        let f0 = self.f[j];
        let f1 = self.f[(j + 1) % self.f.len()];
        self.cum[j] + self.total * wraps as f64 + f0 * s + (f1 - f0) * (s * s / (2.0 * self.h))
    }
}

/// `mu f(x) = (int |F(x+t) + F(x-t) - 2F(x)|^2 dt/t^3)^(1/2)` with `F` the
/// antiderivative of the linear interpolant of `f`.
pub fn marcinkiewicz_1d(f: &SampledFunction, tg: &TimeGrid) -> Result<SampledFunction> {
    let geom = *f.geometry();
    if geom.dim != 1 {
        return Err(Error::UnsupportedDimension(geom.dim));
    }
    let big_f = Antiderivative::new(f);
    let nodes = tg.nodes();
    let w = tg.weight();
    let h = geom.step();
    let values: Vec<Complex64> = (0..geom.n)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let i = i as i64;
            let fx = big_f.at(i, 0.0);
            let sq: Vec<f64> = nodes
                .iter()
                .map(|&t| {
                    let whole = (t / h).floor();
                    let frac = t - whole * h;
                    let m = whole as i64;
                    let plus = big_f.at(i + m, frac);
                    let minus = big_f.at(i - m, -frac);
                    ((plus + minus - fx * 2.0) / t).norm_sqr() * w
                })
                .collect();
            Complex64::new(pairwise_sum(&sq).sqrt(), 0.0)
        })
        .collect();
    SampledFunction::new(geom, values)
}

/// Geometric radii from two grid steps to a quarter of the box.
pub fn default_radii(geom: &Geometry) -> Vec<f64> {
    let mut r = 2.0 * geom.step();
    let mut out = Vec::new();
    while r <= 0.5 * geom.halfwidth {
        out.push(r);
        r *= 2f64.powf(0.25);
    }
    out
}

/// `M_Omega f(x) = sup_r r^-n int_{|y| < r} |f(x - y)| Omega(y') dy` over `radii`.
pub fn maximal_omega(
    f: &SampledFunction,
    omega: &SphereFunction,
    radii: &[f64],
) -> Result<SampledFunction> {
    let geom = *f.geometry();
    if omega.dim != geom.dim {
        return Err(Error::GeometryMismatch("sphere function dimension".into()));
    }
    if !omega.is_nonnegative() {
        return Err(Error::InvalidParameter("Omega must be non-negative".into()));
    }
    // r^-n Omega(y') chi_{|y| < r} is the dilate by r of a homogeneous kernel of degree 0.
    let ball = Kernel::TruncatedHomogeneous {
        eps: geom.dim as f64,
        omega: omega.clone(),
    };
    let abs_f = SampledFunction::new(
        geom,
        f.values()
            .iter()
            .map(|v| Complex64::new(v.norm(), 0.0))
            .collect(),
    )?;
    let fh = fourier_transform(&abs_f);
    let avgs: Vec<Vec<f64>> = radii
        .par_iter()
        .map(|&r| -> Result<Vec<f64>> {
            let d =
                crate::kernels::dilate_sample(&ball, r, geom, crate::kernels::Sampling::Averaged)?;
            let u = inverse_transform(&fourier_transform(&d.samples).mul(&fh)?);
            Ok(u.values().iter().map(|v| v.re).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0.0f64; geom.len()];
    for a in &avgs {
        for (o, v) in out.iter_mut().zip(a) {
            *o = o.max(*v);
        }
    }
    SampledFunction::from_real(geom, &out)
}

/// `sup_t |psi_t * f(x)|` over the time-grid nodes.
pub fn sup_dilation(k: &Kernel, f: &SampledFunction, tg: &TimeGrid) -> Result<SampledFunction> {
    let geom = *f.geometry();
    let mut out = vec![0.0f64; geom.len()];
    for_each_dilate(k, f, tg, |_, _, u| {
        for (o, v) in out.iter_mut().zip(u.values()) {
            *o = o.max(v.norm());
        }
    })?;
    SampledFunction::from_real(geom, &out)
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, inf)`, a degree-7 smoothstep between.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        // 1 - S(s) = S(1 - s); evaluate the form without cancellation.
        let step = |s: f64| s.powi(4) * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s);
        let s = r - 1.0;
        if s < 0.5 {
            1.0 - step(s)
        } else {
            step(1.0 - s)
        }
    }
}

/// Littlewood-Paley pieces `Delta_j` with symbols `Psi(2^j xi)` for `j_min <= j <= j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LPDecomposition {
    pub j_min: i32,
    pub j_max: i32,
}

impl LPDecomposition {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_max < j_min {
            return Err(Error::InvalidParameter("empty j range".into()));
        }
        Ok(Self { j_min, j_max })
    }

    /// `Psi(xi) = phi(|xi|) - phi(2|xi|)`, supported in `1/2 <= |xi| <= 2`.
    pub fn symbol(xi_abs: f64) -> f64 {
        cutoff(xi_abs) - cutoff(2.0 * xi_abs)
    }

    /// Smallest range whose symbols sum to 1 on every nonzero grid frequency.
    pub fn covering(geom: &Geometry) -> Self {
        let lo = 1.0 / (2.0 * geom.halfwidth);
        let hi = geom.n as f64 / (4.0 * geom.halfwidth) * (geom.dim as f64).sqrt();
        Self {
            j_min: -(hi.log2().ceil() as i32),
            j_max: -(lo.log2().floor() as i32),
        }
    }

    pub fn multiplier(j: i32, xi: [f64; 2]) -> f64 {
        Self::symbol(2f64.powi(j) * xi[0].hypot(xi[1]))
    }

    /// `max |sum_j Psi(2^j xi) - 1|` over nonzero grid frequencies.
    pub fn partition_residual(&self, geom: &Geometry) -> f64 {
        (1..geom.len())
            .map(|i| {
                let xi = geom.freq_point(i);
                let s: f64 = (self.j_min..=self.j_max)
                    .map(|j| Self::multiplier(j, xi))
                    .sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `Delta_j f`.
pub fn lp_blocks(f: &SampledFunction, dec: &LPDecomposition, j: i32) -> Result<SampledFunction> {
    if j < dec.j_min || j > dec.j_max {
        return Err(Error::InvalidParameter(format!(
            "j = {j} outside {}..={}",
            dec.j_min, dec.j_max
        )));
    }
    let s =
        fourier_transform(f).apply(|xi| Complex64::new(LPDecomposition::multiplier(j, xi), 0.0));
    Ok(inverse_transform(&s))
}

/// Norms `||T_j f||_2` and the pointwise check `S f <= sum_j T_j f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TjDiagnostic {
    pub j: Vec<i32>,
    pub norms: Vec<f64>,
    /// `max_x (S f(x) - sum_j T_j f(x))`; non-positive when domination holds.
    pub domination_excess: f64,
}

impl TjDiagnostic {
    /// Least-squares slope of `log2 ||T_j f||` against `|j|` for `lo <= |j| <= hi`.
    pub fn decay_slope(&self, lo: i32, hi: i32) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .j
            .iter()
            .zip(&self.norms)
            .filter(|(j, n)| j.abs() >= lo && j.abs() <= hi && **n > 0.0)
            .map(|(j, n)| (j.abs() as f64, n.log2()))
            .collect();
        crate::fourier_checks::fit_slope(&pts)
    }
}

/// `T_j f(x) = (int |F_j(x, t)|^2 dt/t)^(1/2)`, `F_j(x, t) = Delta_{j+k}(psi_t * f)(x)`
/// for `t` in octave `k`. All `j` needed for the domination check are computed;
/// norms are returned for `j_range`.
pub fn tj_diagnostic(
    k: &Kernel,
    f: &SampledFunction,
    dec: &LPDecomposition,
    j_range: (i32, i32),
    tg: &TimeGrid,
) -> Result<TjDiagnostic> {
    let geom = *f.geometry();
    let j_lo = (dec.j_min - tg.k_max).min(j_range.0);
    let j_hi = (dec.j_max - tg.k_min).max(j_range.1);
    let js: Vec<i32> = (j_lo..=j_hi).collect();
    let w = tg.weight();
    let fh = fourier_transform(f);
    let octaves = tg.octaves();
    let mut tj_sq = vec![vec![0.0f64; geom.len()]; js.len()];
    let mut s_sq = vec![0.0f64; geom.len()];
    for (i, t) in tg.nodes().into_iter().enumerate() {
        let (ps, _) = kernel_spectrum(k, t, geom, DEFAULT_LEAKAGE_BOUND)?;
        let ut = ps.mul(&fh)?;
        let u = inverse_transform(&ut);
        for (a, v) in s_sq.iter_mut().zip(u.values()) {
            *a += w * v.norm_sqr();
        }
        let oct = octaves[i];
        tj_sq.par_iter_mut().zip(&js).for_each(|(acc, &j)| {
            let idx = j + oct;
            if idx < dec.j_min || idx > dec.j_max {
                return;
            }
            let piece = inverse_transform(
                &ut.apply(|xi| Complex64::new(LPDecomposition::multiplier(idx, xi), 0.0)),
            );
            for (a, v) in acc.iter_mut().zip(piece.values()) {
                *a += w * v.norm_sqr();
            }
        });
    }
    let vol = geom.cell_volume();
    let mut excess = f64::NEG_INFINITY;
    for x in 0..geom.len() {
        let sum_t: f64 = tj_sq.iter().map(|v| v[x].sqrt()).sum();
        excess = excess.max(s_sq[x].sqrt() - sum_t);
    }
    let mut out_j = Vec::new();
    let mut norms = Vec::new();
    for (acc, &j) in tj_sq.iter().zip(&js) {
        if j >= j_range.0 && j <= j_range.1 {
            out_j.push(j);
            norms.push((pairwise_sum(acc) * vol).sqrt());
        }
    }
    Ok(TjDiagnostic {
        j: out_j,
        norms,
        domination_excess: excess,
    })
}

/// Single-octave weighted energies `int int_1^2 |psi_{t 2^k} * f|^2 dt w dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check15 {
    pub k: Vec<i32>,
    pub terms: Vec<f64>,
    pub sup: f64,
    /// `sup / ||f||^2_{L^2_w}`.
    pub ratio: f64,
}

pub fn check_15(
    k: &Kernel,
    f: &SampledFunction,
    w: Option<&Weight>,
    k_range: (i32, i32),
) -> Result<Check15> {
    if k_range.1 < k_range.0 {
        return Err(Error::InvalidParameter("empty k range".into()));
    }
    let geom = *f.geometry();
    let ws = weight_samples(&geom, w);
    let fh = fourier_transform(f);
    let (gx, gw) = quad::gauss_legendre(8);
    let vol = geom.cell_volume();
    let ks: Vec<i32> = (k_range.0..=k_range.1).collect();
    let terms: Vec<f64> = ks
        .par_iter()
        .map(|&kk| -> Result<f64> {
            let mut total = 0.0;
            for (x, wt) in gx.iter().zip(&gw) {
                let t = (1.5 + 0.5 * x) * 2f64.powi(kk);
                let (s, _) = kernel_spectrum(k, t, geom, DEFAULT_LEAKAGE_BOUND)?;
                let u = inverse_transform(&s.mul(&fh)?);
                let sq: Vec<f64> = u
                    .values()
                    .iter()
                    .zip(&ws)
                    .map(|(v, w)| v.norm_sqr() * w)
                    .collect();
                total += 0.5 * wt * pairwise_sum(&sq) * vol;
            }
            Ok(total)
        })
        .collect::<Result<_>>()?;
    let sup = terms.iter().copied().fold(0.0, f64::max);
    let norm = crate::grid::lp_norm(f, 2.0, w)?;
    Ok(Check15 {
        k: ks,
        terms,
        sup,
        ratio: if norm > 0.0 { sup / (norm * norm) } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator(geom: Geometry, a: f64, b: f64) -> SampledFunction {
        SampledFunction::from_real_fn(geom, |x| if x[0] >= a && x[0] <= b { 1.0 } else { 0.0 })
            .unwrap()
    }

    #[test]
    fn haar_matches_marcinkiewicz() {
        let geom = Geometry::new(1, 8.0, 512).unwrap();
        let tg = TimeGrid::new(-5, 1, 8).unwrap();
        let f = indicator(geom, 0.0, 1.0);
        let s = square_function(&Kernel::Haar1D, &f, &tg).unwrap();
        let m = marcinkiewicz_1d(&f, &tg).unwrap();
        let dev = s
            .values
            .values()
            .iter()
            .zip(m.values())
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn constant_has_zero_marcinkiewicz() {
        let geom = Geometry::new(1, 4.0, 128).unwrap();
        let f = SampledFunction::from_real_fn(geom, |_| 3.0).unwrap();
        let m = marcinkiewicz_1d(&f, &TimeGrid::new(-3, 0, 4).unwrap()).unwrap();
        assert!(m.sup_abs() < 1e-12);
    }

    #[test]
    fn leakage_is_fatal_for_sampled_kernels() {
        let geom = Geometry::new(1, 4.0, 128).unwrap();
        let f = indicator(geom, 0.0, 1.0);
        let err =
            square_function(&Kernel::Haar1D, &f, &TimeGrid::new(0, 2, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Leakage { .. }));
    }

    #[test]
    fn maximal_of_indicator() {
        let geom = Geometry::new(1, 8.0, 1024).unwrap();
        let f = indicator(geom, -1.0, 1.0);
        let om = SphereFunction::constant(1, 1.0);
        let m = maximal_omega(&f, &om, &default_radii(&geom)).unwrap();
        assert!(
            (m.values()[512].re - 2.0).abs() < 1e-12,
            "{}",
            m.values()[512].re
        );
    }

    #[test]
    fn partition_of_unity() {
        let geom = Geometry::new(1, 16.0, 4096).unwrap();
        let dec = LPDecomposition::covering(&geom);
        assert!(dec.partition_residual(&geom) <= 1e-12);
        let geom = Geometry::new(2, 8.0, 64).unwrap();
        let dec = LPDecomposition::covering(&geom);
        assert!(dec.partition_residual(&geom) <= 1e-12);
    }

    #[test]
    fn cutoff_is_smooth_at_the_ends() {
        assert_eq!(cutoff(1.0), 1.0);
        assert!(cutoff(2.0 - 1e-3) > 0.0 && cutoff(2.0 - 1e-3) < 1e-10);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
    }
}
