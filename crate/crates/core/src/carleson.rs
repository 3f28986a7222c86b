//! Carleson measures `|psi_t * b|^2 w dx dt/t`, the bilinear square
//! operator `T_b` and truncated paraproducts.

use std::io::Write;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    fourier_transform, inverse_transform, pairwise_sum, weight_samples, Geometry, SampledFunction,
    TimeGrid,
};
use crate::kernels::{Kernel, DEFAULT_LEAKAGE_BOUND};
use crate::operators::{for_each_dilate, kernel_spectrum};
use crate::weights::{bmo_norm, cube_cells, CubeFamily, Weight};

#[derive(Debug, Clone)]
pub struct CarlesonExperiment {
    pub kernel: Kernel,
    pub b: SampledFunction,
    pub weight: Option<Weight>,
    pub cubes: CubeFamily,
    pub time_grid: TimeGrid,
    /// Family over which `||b||_BMO` is estimated; `cubes` when `None`.
    pub bmo_cubes: Option<CubeFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonRow {
    pub center: [f64; 2],
    pub side: f64,
    /// Quadrature of `nu` over `Q x [t_min, side)`.
    pub nu: f64,
    /// Extrapolated contribution of `Q x (0, t_min)`.
    pub sliver: f64,
    pub wq: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub bmo: f64,
    pub rows: Vec<CarlesonRow>,
    pub sup_ratio: f64,
    /// `(side, sup ratio over cubes of that side)`, largest side first.
    pub per_scale: Vec<(f64, f64)>,
}

impl CarlesonReport {
    /// `(max - min) / min` of the per-scale sups.
    pub fn scale_variation(&self) -> f64 {
        let sups: Vec<f64> = self.per_scale.iter().map(|s| s.1).collect();
        let hi = sups.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
        if lo > 0.0 {
            (hi - lo) / lo
        } else if hi == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "center_x,center_y,side,nu,sliver,w_q,ratio")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e}",
                r.center[0], r.center[1], r.side, r.nu, r.sliver, r.wq, r.ratio
            )?;
        }
        Ok(())
    }
}

/// Integral of `|psi_t * b|^2 dt/t` from 0 to below the first node, given
/// the per-node box energies at the two lowest octaves.
fn sliver(e0: f64, e1: f64) -> f64 {
    if e0 == 0.0 {
        return 0.0;
    }
    if e1 <= e0 {
        return f64::INFINITY;
    }
    e0 / ((e1 / e0).log2() * std::f64::consts::LN_2)
}

/// Per-cube quadrature of `nu(S(Q))` and its ratio to `||b||_BMO^2 w(Q)`.
/// Node `t` stands for `[t, t 2^(1/m))`, so it counts when that cell lies
/// below `side(Q)`.
pub fn carleson_ratio(exp: &CarlesonExperiment) -> Result<CarlesonReport> {
    let geom = *exp.b.geometry();
    let tg = &exp.time_grid;
    if exp.cubes.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if exp.cubes.dim != geom.dim {
        return Err(Error::GeometryMismatch("cube family dimension".into()));
    }
    let side_max = exp.cubes.cubes.iter().map(|c| c.side).fold(0.0, f64::max);
    let side_min = exp
        .cubes
        .cubes
        .iter()
        .map(|c| c.side)
        .fold(f64::INFINITY, f64::min);
    if tg.t_max() < side_max * (1.0 - 1e-12) || tg.t_min() >= side_min {
        return Err(Error::TimeGridTooShort {
            t_max: tg.t_max(),
            side: side_max,
        });
    }
    let bmo = bmo_norm(&exp.b, exp.bmo_cubes.as_ref().unwrap_or(&exp.cubes))?;
    let ws = weight_samples(&geom, exp.weight.as_ref());
    let vol = geom.cell_volume();
    let cells: Vec<Vec<(usize, f64)>> = exp
        .cubes
        .cubes
        .par_iter()
        .map(|q| cube_cells(&geom, q))
        .collect();
    let nq = exp.cubes.len();
    let mut energy = vec![Vec::with_capacity(tg.len()); nq];
    let step = 2f64.powf(1.0 / tg.substeps as f64);
    let nodes = tg.nodes();
    for_each_dilate(&exp.kernel, &exp.b, tg, |_, _, u| {
        let dens: Vec<f64> = u
            .values()
            .iter()
            .zip(&ws)
            .map(|(v, w)| v.norm_sqr() * w)
            .collect();
        let per: Vec<f64> = cells
            .par_iter()
            .map(|cs| {
                let terms: Vec<f64> = cs.iter().map(|(i, o)| dens[*i] * o / vol).collect();
                pairwise_sum(&terms) * vol
            })
            .collect();
        for (e, p) in energy.iter_mut().zip(per) {
            e.push(p);
        }
    })?;
    let w = tg.weight();
    let rows: Vec<CarlesonRow> = exp
        .cubes
        .cubes
        .iter()
        .zip(&energy)
        .zip(&cells)
        .map(|((q, e), cs)| {
            let nu: f64 = nodes
                .iter()
                .zip(e)
                .filter(|(t, _)| **t * step <= q.side * (1.0 + 1e-12))
                .map(|(_, v)| w * v)
                .sum();
            let sl = sliver(e[0], e[tg.substeps.min(e.len() - 1)]);
            let wq: f64 = cs.iter().map(|(i, o)| ws[*i] * o).sum();
            let total = nu + if sl.is_finite() { sl } else { 0.0 };
            let denom = bmo * bmo * wq;
            let ratio = if total == 0.0 { 0.0 } else { total / denom };
            CarlesonRow {
                center: q.center,
                side: q.side,
                nu,
                sliver: sl,
                wq,
                ratio,
            }
        })
        .collect();
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mut sides: Vec<f64> = rows.iter().map(|r| r.side).collect();
    sides.sort_by(|a, b| b.total_cmp(a));
    sides.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let per_scale = sides
        .iter()
        .map(|&s| {
            let sup = rows
                .iter()
                .filter(|r| (r.side - s).abs() <= 1e-12 * s)
                .map(|r| r.ratio)
                .fold(0.0, f64::max);
            (s, sup)
        })
        .collect();
    Ok(CarlesonReport {
        bmo,
        rows,
        sup_ratio,
        per_scale,
    })
}

fn check_geometry(a: &SampledFunction, b: &SampledFunction) -> Result<Geometry> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch(
            "b and f live on different grids".into(),
        ));
    }
    Ok(*a.geometry())
}

/// Visits `(t, psi_t * b, phi_t * f)` for the nodes in `ts`, in order.
fn for_each_pair(
    psi: &Kernel,
    b: &SampledFunction,
    phi: &Kernel,
    f: &SampledFunction,
    ts: &[f64],
    mut visit: impl FnMut(f64, &SampledFunction, &SampledFunction) -> Result<()>,
) -> Result<()> {
    let geom = check_geometry(b, f)?;
    for k in [psi, phi] {
        if k.dim() != geom.dim {
            return Err(Error::GeometryMismatch(format!(
                "{}-D kernel with {}-D data",
                k.dim(),
                geom.dim
            )));
        }
    }
    let (bh, fh) = (fourier_transform(b), fourier_transform(f));
    let chunk = rayon::current_num_threads().max(1) * 2;
    for part in ts.chunks(chunk) {
        let outs: Vec<Result<(SampledFunction, SampledFunction)>> = part
            .par_iter()
            .map(|&t| {
                let (sp, _) = kernel_spectrum(psi, t, geom, DEFAULT_LEAKAGE_BOUND)?;
                let (sf, _) = kernel_spectrum(phi, t, geom, DEFAULT_LEAKAGE_BOUND)?;
                Ok((
                    inverse_transform(&sp.mul(&bh)?),
                    inverse_transform(&sf.mul(&fh)?),
                ))
            })
            .collect();
        for (t, o) in part.iter().zip(outs) {
            let (u, v) = o?;
            visit(*t, &u, &v)?;
        }
    }
    Ok(())
}

/// `T_b f(x) = (int |psi_t * b(x)|^2 |phi_t * f(x)|^2 dt/t)^(1/2)` on the time grid.
pub fn tb_operator(
    psi: &Kernel,
    phi: &Kernel,
    b: &SampledFunction,
    f: &SampledFunction,
    tg: &TimeGrid,
) -> Result<SampledFunction> {
    let geom = check_geometry(b, f)?;
    let w = tg.weight();
    let mut acc = vec![0.0; geom.len()];
    for_each_pair(psi, b, phi, f, &tg.nodes(), |_, u, v| {
        for ((a, x), y) in acc.iter_mut().zip(u.values()).zip(v.values()) {
            *a += w * x.norm_sqr() * y.norm_sqr();
        }
        Ok(())
    })?;
    let vals: Vec<f64> = acc.iter().map(|a| a.sqrt()).collect();
    SampledFunction::from_real(geom, &vals)
}

/// Nodes of `tg` inside `[u, v]`.
pub fn truncated_nodes(tg: &TimeGrid, u: f64, v: f64) -> Result<Vec<f64>> {
    if !(u > 0.0 && u < v) {
        return Err(Error::InvalidParameter(format!(
            "truncation needs 0 < u < v, got [{u}, {v}]"
        )));
    }
    let tol = 1e-12;
    let ts: Vec<f64> = tg
        .nodes()
        .into_iter()
        .filter(|t| *t >= u * (1.0 - tol) && *t <= v * (1.0 + tol))
        .collect();
    if ts.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no time-grid node in [{u}, {v}]"
        )));
    }
    Ok(ts)
}

/// Truncated paraproduct `sum_{u <= t <= v} w_t eta_t * ((psi_t * b)(phi_t * f))`.
#[allow(clippy::too_many_arguments)]
pub fn paraproduct(
    eta: &Kernel,
    psi: &Kernel,
    phi: &Kernel,
    b: &SampledFunction,
    f: &SampledFunction,
    tg: &TimeGrid,
    u: f64,
    v: f64,
) -> Result<SampledFunction> {
    let geom = check_geometry(b, f)?;
    if eta.dim() != geom.dim {
        return Err(Error::GeometryMismatch("eta dimension".into()));
    }
    let ts = truncated_nodes(tg, u, v)?;
    let w = tg.weight();
    let mut acc = vec![Complex64::new(0.0, 0.0); geom.len()];
    for_each_pair(psi, b, phi, f, &ts, |t, pb, pf| {
        let prod: Vec<Complex64> = pb
            .values()
            .iter()
            .zip(pf.values())
            .map(|(x, y)| x * y)
            .collect();
        let (se, _) = kernel_spectrum(eta, t, geom, DEFAULT_LEAKAGE_BOUND)?;
        let out =
            inverse_transform(&se.mul(&fourier_transform(&SampledFunction::new(geom, prod)?))?);
        for (a, o) in acc.iter_mut().zip(out.values()) {
            *a += w * o;
        }
        Ok(())
    })?;
    SampledFunction::new(geom, acc)
}

/// `int pi g dx` by the grid Riemann sum.
pub fn pairing(pi: &SampledFunction, g: &SampledFunction) -> Result<Complex64> {
    check_geometry(pi, g)?;
    let terms: Vec<Complex64> = pi
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .collect();
    let re: Vec<f64> = terms.iter().map(|z| z.re).collect();
    let im: Vec<f64> = terms.iter().map(|z| z.im).collect();
    let vol = pi.geometry().cell_volume();
    Ok(Complex64::new(
        pairwise_sum(&re) * vol,
        pairwise_sum(&im) * vol,
    ))
}

/// The Fubini side `sum_t w_t int (psi_t * b)(phi_t * f)(eta~_t * g) dx`
/// with `eta~(x) = eta(-x)`.
#[allow(clippy::too_many_arguments)]
pub fn dual_pairing(
    eta: &Kernel,
    psi: &Kernel,
    phi: &Kernel,
    b: &SampledFunction,
    f: &SampledFunction,
    g: &SampledFunction,
    tg: &TimeGrid,
    u: f64,
    v: f64,
) -> Result<Complex64> {
    let geom = check_geometry(b, g)?;
    let ts = truncated_nodes(tg, u, v)?;
    let refl = eta.clone().reflected();
    let gh = fourier_transform(g);
    let w = tg.weight();
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_pair(psi, b, phi, f, &ts, |t, pb, pf| {
        let (se, _) = kernel_spectrum(&refl, t, geom, DEFAULT_LEAKAGE_BOUND)?;
        let eg = inverse_transform(&se.mul(&gh)?);
        let prod: Vec<Complex64> = pb
            .values()
            .iter()
            .zip(pf.values())
            .map(|(x, y)| x * y)
            .collect();
        acc += w * pairing(&SampledFunction::new(geom, prod)?, &eg)?;
        Ok(())
    })?;
    Ok(acc)
}

/// `(sum_{u <= t <= v} w_t int |eta~_t * g|^2 w^-1 dx)^(1/2)`.
pub fn dual_energy(
    eta: &Kernel,
    g: &SampledFunction,
    weight: Option<&Weight>,
    tg: &TimeGrid,
    u: f64,
    v: f64,
) -> Result<f64> {
    let geom = *g.geometry();
    let ts = truncated_nodes(tg, u, v)?;
    let sub = TimeGrid::new(tg.k_min, tg.k_max, tg.substeps)?;
    let refl = eta.clone().reflected();
    let inv: Vec<f64> = weight_samples(&geom, weight)
        .iter()
        .map(|x| 1.0 / x)
        .collect();
    let w = sub.weight();
    let mut total = 0.0;
    for_each_dilate(&refl, g, &sub, |_, t, eg| {
        if ts.contains(&t) {
            let terms: Vec<f64> = eg
                .values()
                .iter()
                .zip(&inv)
                .map(|(z, i)| z.norm_sqr() * i)
                .collect();
            total += w * pairwise_sum(&terms);
        }
    })?;
    Ok((total * geom.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{dilate_sample, CellProfile, Sampling};
    use crate::weights::{log_abs_cell_means, Cube};

    fn boxcar() -> Kernel {
        let p = CellProfile::from_fn(1, 1.0, 8, |_| 0.5).unwrap();
        Kernel::custom(p, false).unwrap()
    }

    fn wave(geom: Geometry, a: f64, c: f64) -> SampledFunction {
        SampledFunction::from_real_fn(geom, |x| {
            (-(x[0] - c).powi(2) / a).exp() * (1.0 + 0.3 * (2.0 * x[0]).sin())
        })
        .unwrap()
    }

    fn log_experiment(shift: i64) -> CarlesonExperiment {
        let geom = Geometry::new(1, 16.0, 1024).unwrap();
        let b = log_abs_cell_means(geom).unwrap().translate([shift, 0]);
        let d = shift as f64 * geom.step();
        let cubes: Vec<Cube> = [0.5, 1.0, 2.0]
            .iter()
            .flat_map(|&s| {
                [
                    Cube::from_corner([d, 0.0], s),
                    Cube::from_corner([d - s, 0.0], s),
                ]
            })
            .collect();
        CarlesonExperiment {
            kernel: Kernel::poisson(1),
            b,
            weight: None,
            cubes: CubeFamily::new(1, cubes).unwrap(),
            time_grid: TimeGrid::new(-6, 2, 4).unwrap(),
            bmo_cubes: None,
        }
    }

    #[test]
    fn constant_b_has_no_mass() {
        let mut e = log_experiment(0);
        e.b = SampledFunction::from_real_fn(*e.b.geometry(), |_| 3.0).unwrap();
        let r = carleson_ratio(&e).unwrap();
        assert!(r.rows.iter().all(|row| row.nu == 0.0 && row.ratio == 0.0));
    }

    #[test]
    fn doubling_b_quadruples_nu() {
        let e = log_experiment(0);
        let r1 = carleson_ratio(&e).unwrap();
        let mut e2 = e.clone();
        e2.b = e.b.scale(2.0);
        let r2 = carleson_ratio(&e2).unwrap();
        for (a, b) in r1.rows.iter().zip(&r2.rows) {
            assert!(
                (b.nu - 4.0 * a.nu).abs() <= 1e-14 * b.nu,
                "{} {}",
                a.nu,
                b.nu
            );
            assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio);
        }
    }

    #[test]
    fn parent_box_contains_children() {
        let mut e = log_experiment(0);
        let parent = Cube::from_corner([0.0, 0.0], 2.0);
        let mut cubes = parent.children(1);
        cubes.push(parent);
        e.cubes = CubeFamily::new(1, cubes).unwrap();
        let r = carleson_ratio(&e).unwrap();
        assert!(r.rows[2].nu >= r.rows[0].nu + r.rows[1].nu);
    }

    #[test]
    fn short_time_grid_is_an_error() {
        let mut e = log_experiment(0);
        e.time_grid = TimeGrid::new(-6, -1, 4).unwrap();
        assert!(matches!(
            carleson_ratio(&e),
            Err(Error::TimeGridTooShort { .. })
        ));
    }

    #[test]
    fn translation_invariance() {
        let a = carleson_ratio(&log_experiment(0)).unwrap();
        let b = carleson_ratio(&log_experiment(37)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!(
                (x.ratio - y.ratio).abs() <= 1e-9 * x.ratio,
                "{} {}",
                x.ratio,
                y.ratio
            );
        }
    }

    #[test]
    fn ratios_are_scale_stable() {
        let r = carleson_ratio(&log_experiment(0)).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.ratio > 0.0 && row.sliver.is_finite()));
        assert!(r.scale_variation() < 0.2, "{:?}", r.per_scale);
    }

    #[test]
    fn tb_matches_direct_sum() {
        let geom = Geometry::new(1, 16.0, 128).unwrap();
        let tg = TimeGrid::new(-1, 1, 4).unwrap();
        let (psi, phi) = (Kernel::Haar1D, boxcar());
        let b = wave(geom, 4.0, 1.0);
        let f = wave(geom, 2.0, -2.0);
        let fast = tb_operator(&psi, &phi, &b, &f, &tg).unwrap();
        let n = geom.n;
        let h = geom.step();
        let conv = |k: &SampledFunction, g: &SampledFunction| -> Vec<Complex64> {
            // Kernel samples are indexed with the origin at n/2.
            (0..n)
                .map(|i| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        let off = (j + n - n / 2) % n;
                        s += k.values()[j] * g.values()[(i + n - off) % n];
                    }
                    s * h
                })
                .collect()
        };
        let mut acc = vec![0.0; n];
        for t in tg.nodes() {
            let kp = dilate_sample(&psi, t, geom, Sampling::Averaged)
                .unwrap()
                .samples;
            let kf = dilate_sample(&phi, t, geom, Sampling::Averaged)
                .unwrap()
                .samples;
            let (u, v) = (conv(&kp, &b), conv(&kf, &f));
            for i in 0..n {
                acc[i] += tg.weight() * u[i].norm_sqr() * v[i].norm_sqr();
            }
        }
        for (a, z) in acc.iter().zip(fast.values()) {
            assert!((a.sqrt() - z.re).abs() < 1e-8, "{} {}", a.sqrt(), z.re);
        }
    }

    fn para_setup() -> (Geometry, TimeGrid, Kernel, Kernel, Kernel) {
        let geom = Geometry::new(1, 16.0, 256).unwrap();
        (
            geom,
            TimeGrid::new(-3, 1, 4).unwrap(),
            Kernel::poisson(1),
            Kernel::Haar1D,
            Kernel::PoissonKernel { dim: 1 },
        )
    }

    #[test]
    fn paraproduct_duality_and_linearity() {
        let (geom, tg, eta, psi, phi) = para_setup();
        let b = wave(geom, 3.0, 0.5);
        let f = wave(geom, 1.0, -1.0);
        let g = wave(geom, 5.0, 2.0);
        let pi = paraproduct(&eta, &psi, &phi, &b, &f, &tg, 0.25, 2.0).unwrap();
        let lhs = pairing(&pi, &g).unwrap();
        let rhs = dual_pairing(&eta, &psi, &phi, &b, &f, &g, &tg, 0.25, 2.0).unwrap();
        assert!(
            (lhs - rhs).norm() < 1e-8 * lhs.norm().max(1.0),
            "{lhs} {rhs}"
        );
        let comb = paraproduct(
            &eta,
            &psi,
            &phi,
            &b,
            &f.scale(2.5).add(&g).unwrap(),
            &tg,
            0.25,
            2.0,
        )
        .unwrap();
        let pg = paraproduct(&eta, &psi, &phi, &b, &g, &tg, 0.25, 2.0).unwrap();
        for ((c, a), d) in comb.values().iter().zip(pi.values()).zip(pg.values()) {
            assert!((c - (a * 2.5 + d)).norm() < 1e-10);
        }
    }

    #[test]
    fn paraproduct_rejects_bad_range_and_kills_constants() {
        let (geom, tg, eta, psi, phi) = para_setup();
        let f = wave(geom, 1.0, 0.0);
        let c = SampledFunction::from_real_fn(geom, |_| 1.5).unwrap();
        assert!(paraproduct(&eta, &psi, &phi, &c, &f, &tg, 2.0, 1.0).is_err());
        let pi = paraproduct(&eta, &psi, &phi, &c, &f, &tg, 0.25, 2.0).unwrap();
        assert!(pi.sup_abs() < 1e-14);
        let t = tb_operator(&psi, &phi, &c, &f, &tg).unwrap();
        assert!(t.sup_abs() < 1e-14);
    }
}
