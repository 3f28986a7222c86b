//! Weights, cube families, `A_p` characteristics and BMO norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Geometry, SampledFunction};
use crate::quad;

fn one() -> usize {
    1
}

/// A positive weight on `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Weight {
    /// `|x|^a`.
    Power {
        a: f64,
        #[serde(default = "one")]
        dim: usize,
    },
    Constant {
        c: f64,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Cell values on a grid, piecewise constant on the cells centred at nodes.
    Sampled {
        dim: usize,
        #[serde(rename = "R")]
        halfwidth: f64,
        #[serde(rename = "N")]
        n: usize,
        values: Vec<f64>,
    },
}

/// Axis-aligned cube `center +- side / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: [f64; 2],
    pub side: f64,
}

impl Cube {
    pub fn new(center: [f64; 2], side: f64) -> Self {
        Self { center, side }
    }

    /// Cube `[lo, lo + side]^dim`.
    pub fn from_corner(lo: [f64; 2], side: f64) -> Self {
        Self {
            center: [lo[0] + 0.5 * side, lo[1] + 0.5 * side],
            side,
        }
    }

    pub fn lo(&self) -> [f64; 2] {
        [
            self.center[0] - 0.5 * self.side,
            self.center[1] - 0.5 * self.side,
        ]
    }

    pub fn hi(&self) -> [f64; 2] {
        [
            self.center[0] + 0.5 * self.side,
            self.center[1] + 0.5 * self.side,
        ]
    }

    pub fn volume(&self, dim: usize) -> f64 {
        self.side.powi(dim as i32)
    }

    /// The `2^dim` children of a dyadic split.
    pub fn children(&self, dim: usize) -> Vec<Cube> {
        let q = 0.25 * self.side;
        let offs: &[[f64; 2]] = if dim == 1 {
            &[[-1.0, 0.0], [1.0, 0.0]]
        } else {
            &[[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]]
        };
        offs.iter()
            .map(|o| {
                Cube::new(
                    [self.center[0] + o[0] * q, self.center[1] + o[1] * q],
                    0.5 * self.side,
                )
            })
            .collect()
    }
}

/// A finite family of cubes, with an optional common sub-cell width used
/// when characteristics are computed by fine Riemann sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeFamily {
    pub dim: usize,
    pub cubes: Vec<Cube>,
    pub resolution: Option<f64>,
}

/// Sub-cells per axis of the smallest cube in an origin family.
pub const SUBCELLS_PER_CUBE: usize = 64;

impl CubeFamily {
    pub fn new(dim: usize, cubes: Vec<Cube>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if cubes.iter().any(|c| !(c.side > 0.0 && c.side.is_finite())) {
            return Err(Error::InvalidParameter(
                "cube sides must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            cubes,
            resolution: None,
        })
    }

    /// All dyadic cubes of side `2R 2^-j` tiling the box, `j_min <= j <= j_max`.
    pub fn dyadic(geom: &Geometry, j_min: u32, j_max: u32) -> Result<Self> {
        let mut cubes = Vec::new();
        for j in j_min..=j_max {
            let count = 1usize << j;
            let side = 2.0 * geom.halfwidth / count as f64;
            let edge = |a: usize| -geom.halfwidth + a as f64 * side;
            if geom.dim == 1 {
                cubes.extend((0..count).map(|a| Cube::from_corner([edge(a), 0.0], side)));
            } else {
                for a in 0..count {
                    cubes.extend((0..count).map(|b| Cube::from_corner([edge(a), edge(b)], side)));
                }
            }
        }
        Self::new(geom.dim, cubes)
    }

    /// Dyadic cubes with a corner at the origin, sides `side 2^-j` for
    /// `j < levels`, one per orthant. The sub-cell width is tied to the
    /// smallest cube so each added level also resolves a finer scale.
    pub fn dyadic_at_origin(dim: usize, side: f64, levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter("need at least one level".into()));
        }
        let signs: &[[f64; 2]] = if dim == 1 {
            &[[1.0, 0.0], [-1.0, 0.0]]
        } else {
            &[[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
        };
        let mut cubes = Vec::new();
        for j in 0..levels {
            let s = side / 2f64.powi(j as i32);
            for sg in signs {
                cubes.push(Cube::new([0.5 * s * sg[0], 0.5 * s * sg[1]], s));
            }
        }
        let mut fam = Self::new(dim, cubes)?;
        fam.resolution = Some(side / 2f64.powi(levels as i32 - 1) / SUBCELLS_PER_CUBE as f64);
        Ok(fam)
    }

    /// Cubes centred at the origin with sides `side 2^-j`, `j < levels`.
    pub fn centered_at_origin(dim: usize, side: f64, levels: u32) -> Result<Self> {
        let cubes = (0..levels)
            .map(|j| Cube::new([0.0, 0.0], side / 2f64.powi(j as i32)))
            .collect();
        Self::new(dim, cubes)
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Whether every cube lies in `[-R, R]^dim`.
    pub fn inside(&self, geom: &Geometry) -> bool {
        let r = geom.halfwidth + 1e-12;
        self.cubes.iter().all(|c| {
            let (lo, hi) = (c.lo(), c.hi());
            (0..self.dim).all(|d| lo[d] >= -r && hi[d] <= r)
        })
    }
}

impl Weight {
    pub fn power(a: f64) -> Self {
        Weight::Power { a, dim: 1 }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: Weight = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d != 1 && d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        match self {
            Weight::Power { a, .. } if !a.is_finite() => Err(Error::InvalidParameter(format!(
                "power weight exponent {a}"
            ))),
            Weight::Constant { c, .. } if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidParameter(format!("constant weight {c}")))
            }
            Weight::Sampled {
                dim,
                halfwidth,
                n,
                values,
            } => {
                let g = Geometry::new(*dim, *halfwidth, *n)?;
                if values.len() != g.len() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidParameter(
                        "sampled weight must be positive with one value per node".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Weight::Power { dim, .. }
            | Weight::Constant { dim, .. }
            | Weight::Sampled { dim, .. } => *dim,
        }
    }

    /// Pointwise value (infinite or zero at the singular point of a power weight).
    pub fn value(&self, x: [f64; 2]) -> f64 {
        match self {
            Weight::Power { a, dim } => {
                let r = if *dim == 1 {
                    x[0].abs()
                } else {
                    x[0].hypot(x[1])
                };
                r.powf(*a)
            }
            Weight::Constant { c, .. } => *c,
            Weight::Sampled { .. } => {
                let g = self.sampled_geometry();
                let idx = nearest_node(&g, x);
                self.sampled_values()[idx]
            }
        }
    }

    /// Closed-form `A_p` criterion for power weights: `-n < a < n (p - 1)`.
    pub fn power_in_ap(a: f64, dim: usize, p: f64) -> bool {
        let n = dim as f64;
        -n < a && a < n * (p - 1.0)
    }

    /// `int_Q w`, exact for power and constant weights.
    pub fn integral(&self, q: &Cube) -> f64 {
        self.integral_box(q.lo(), q.hi())
    }

    /// `int w` over the box `[lo, hi]` (the second coordinate is ignored in 1-D).
    pub fn integral_box(&self, lo: [f64; 2], hi: [f64; 2]) -> f64 {
        match self {
            Weight::Power { a, dim: 1 } => power_integral_1d(*a, lo[0], hi[0]),
            Weight::Power { a, .. } => power_integral_2d(*a, lo, hi),
            Weight::Constant { c, dim } => {
                c * (hi[0] - lo[0]) * if *dim == 2 { hi[1] - lo[1] } else { 1.0 }
            }
            Weight::Sampled { .. } => {
                let g = self.sampled_geometry();
                overlap_integral(&g, self.sampled_values(), lo, hi)
            }
        }
    }

    /// Cell means on the grid (cells of side `h` centred at the nodes).
    pub fn grid_values(&self, geom: &Geometry) -> Vec<f64> {
        let h = geom.step();
        let vol = geom.cell_volume();
        match self {
            Weight::Constant { c, .. } => vec![*c; geom.len()],
            Weight::Sampled { values, .. } if self.sampled_geometry() == *geom => values.clone(),
            _ => (0..geom.len())
                .into_par_iter()
                .with_min_len(256)
                .map(|i| {
                    let x = geom.point(i);
                    let lo = [x[0] - 0.5 * h, x[1] - 0.5 * h];
                    let hi = [x[0] + 0.5 * h, x[1] + 0.5 * h];
                    let v = self.integral_box(lo, hi) / vol;
                    if v.is_finite() {
                        v
                    } else {
                        self.value([x[0] + 0.25 * h, x[1] + 0.25 * h])
                    }
                })
                .collect(),
        }
    }

    fn sampled_geometry(&self) -> Geometry {
        match self {
            Weight::Sampled {
                dim, halfwidth, n, ..
            } => Geometry {
                dim: *dim,
                halfwidth: *halfwidth,
                n: *n,
            },
            _ => unreachable!("not a sampled weight"),
        }
    }

    fn sampled_values(&self) -> &[f64] {
        match self {
            Weight::Sampled { values, .. } => values,
            _ => unreachable!("not a sampled weight"),
        }
    }
}

fn nearest_node(g: &Geometry, x: [f64; 2]) -> usize {
    let h = g.step();
    let idx = |c: f64| (((c + g.halfwidth) / h).round() as i64).rem_euclid(g.n as i64) as usize;
    if g.dim == 1 {
        idx(x[0])
    } else {
        idx(x[0]) * g.n + idx(x[1])
    }
}

/// `int_lo^hi |x|^a dx`; infinite when the integral diverges.
pub fn power_integral_1d(a: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo < 0.0 && hi > 0.0 {
        return power_integral_1d(a, lo, 0.0) + power_integral_1d(a, 0.0, hi);
    }
    let (u, v) = if hi <= 0.0 { (-hi, -lo) } else { (lo, hi) };
    if u == 0.0 && a <= -1.0 {
        return f64::INFINITY;
    }
    if a == -1.0 {
        (v / u).ln()
    } else {
        (v.powf(a + 1.0) - u.powf(a + 1.0)) / (a + 1.0)
    }
}

/// `int_{[0, A] x [0, B]} |x|^a dx` for `a > -2`, in polar coordinates.
fn corner_integral(a: f64, big_a: f64, big_b: f64) -> f64 {
    if big_a <= 0.0 || big_b <= 0.0 {
        return 0.0;
    }
    let th0 = big_b.atan2(big_a);
    let e = a + 2.0;
    let p1 = quad::gauss_panels(|th: f64| (big_a / th.cos()).powf(e), 0.0, th0, 4, 16);
    let p2 = quad::gauss_panels(
        |th: f64| (big_b / th.sin()).powf(e),
        th0,
        0.5 * std::f64::consts::PI,
        4,
        16,
    );
    (p1 + p2) / e
}

/// `int_{[lo, hi]} |x|^a dx` in 2-D; infinite when the integral diverges.
pub fn power_integral_2d(a: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    if hi[0] <= lo[0] || hi[1] <= lo[1] {
        return 0.0;
    }
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let dist = |l: f64, h: f64| {
        if l <= 0.0 && h >= 0.0 {
            0.0
        } else {
            l.abs().min(h.abs())
        }
    };
    let d = dist(lo[0], hi[0]).hypot(dist(lo[1], hi[1]));
    if d >= side {
        let (gx, gw) = quad::gauss_legendre(12);
        let (hx, hy) = (hi[0] - lo[0], hi[1] - lo[1]);
        let mut s = 0.0;
        for (x, wx) in gx.iter().zip(&gw) {
            for (y, wy) in gx.iter().zip(&gw) {
                let px = lo[0] + 0.5 * hx * (x + 1.0);
                let py = lo[1] + 0.5 * hy * (y + 1.0);
                s += wx * wy * px.hypot(py).powf(a);
            }
        }
        return 0.25 * hx * hy * s;
    }
    if d == 0.0 && a <= -2.0 {
        return f64::INFINITY;
    }
    // Split by the axes and reflect each piece into the first quadrant.
    let pieces = |l: f64, h: f64| -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        if h > 0.0 {
            v.push((l.max(0.0), h));
        }
        if l < 0.0 {
            v.push(((-h).max(0.0), -l));
        }
        v
    };
    let mut total = 0.0;
    for (x0, x1) in pieces(lo[0], hi[0]) {
        for &(y0, y1) in &pieces(lo[1], hi[1]) {
            total += corner_integral(a, x1, y1)
                - corner_integral(a, x0, y1)
                - corner_integral(a, x1, y0)
                + corner_integral(a, x0, y0);
        }
    }
    total
}

/// `int` of a cellwise-constant grid function over `[lo, hi]`, periodically extended.
fn overlap_integral(g: &Geometry, values: &[f64], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let h = g.step();
    let axis = |l: f64, u: f64| -> Vec<(usize, f64)> {
        let first = ((l + g.halfwidth) / h + 0.5).floor() as i64;
        let last = ((u + g.halfwidth) / h + 0.5).ceil() as i64;
        (first..=last)
            .filter_map(|k| {
                let c = -g.halfwidth + k as f64 * h;
                let ov = (u.min(c + 0.5 * h) - l.max(c - 0.5 * h)).max(0.0);
                (ov > 0.0).then(|| (k.rem_euclid(g.n as i64) as usize, ov))
            })
            .collect()
    };
    let ax = axis(lo[0], hi[0]);
    if g.dim == 1 {
        return ax.iter().map(|(i, ov)| values[*i] * ov).sum();
    }
    let ay = axis(lo[1], hi[1]);
    let mut s = 0.0;
    for (i, ox) in &ax {
        for (j, oy) in &ay {
            s += values[i * g.n + j] * ox * oy;
        }
    }
    s
}

/// `int_Q w`.
pub fn weighted_measure(w: &Weight, q: &Cube) -> f64 {
    w.integral(q)
}

/// Means of `w` over the sub-cells of `q` with width about `delta`. A
/// non-integrable singular sub-cell falls back to its midpoint value.
fn subcell_means(w: &Weight, dim: usize, q: &Cube, delta: f64) -> Vec<f64> {
    let m = ((q.side / delta).round() as usize).max(1);
    let d = q.side / m as f64;
    let lo = q.lo();
    let vol = d.powi(dim as i32);
    let mean = |a: usize, b: usize| {
        let l = [lo[0] + a as f64 * d, lo[1] + b as f64 * d];
        let v = w.integral_box(l, [l[0] + d, l[1] + d]) / vol;
        if v.is_finite() {
            v
        } else {
            w.value([l[0] + 0.5 * d, l[1] + 0.5 * d])
        }
    };
    if dim == 1 {
        (0..m).map(|a| mean(a, 0)).collect()
    } else {
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .map(|(a, b)| mean(a, b))
            .collect()
    }
}

fn resolution_for(fam: &CubeFamily, q: &Cube) -> f64 {
    fam.resolution.unwrap_or(q.side / SUBCELLS_PER_CUBE as f64)
}

/// `A_p` characteristic of one cube by a fine Riemann sum.
pub fn cube_ap_characteristic(w: &Weight, p: f64, dim: usize, q: &Cube, delta: f64) -> f64 {
    let v = subcell_means(w, dim, q, delta);
    let k = v.len() as f64;
    let avg_w = v.iter().sum::<f64>() / k;
    let avg_dual = v.iter().map(|x| x.powf(-1.0 / (p - 1.0))).sum::<f64>() / k;
    avg_w * avg_dual.powf(p - 1.0)
}

/// `sup_Q (avg_Q w)(avg_Q w^(-1/(p-1)))^(p-1)` over the family.
pub fn ap_characteristic(w: &Weight, p: f64, cubes: &CubeFamily) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    if cubes.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let vals: Vec<f64> = cubes
        .cubes
        .par_iter()
        .map(|q| cube_ap_characteristic(w, p, cubes.dim, q, resolution_for(cubes, q)))
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `sup_Q avg_Q w / essinf_Q w`, with the infimum over sub-cell means.
pub fn a1_characteristic(w: &Weight, cubes: &CubeFamily) -> Result<f64> {
    if cubes.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let vals: Vec<f64> = cubes
        .cubes
        .par_iter()
        .map(|q| {
            let v = subcell_means(w, cubes.dim, q, resolution_for(cubes, q));
            let avg = v.iter().sum::<f64>() / v.len() as f64;
            let inf = v.iter().copied().fold(f64::INFINITY, f64::min);
            avg / inf
        })
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Characteristic of origin families with `1..=levels` dyadic levels.
pub fn ap_level_trend(w: &Weight, p: f64, side: f64, levels: u32) -> Result<Vec<f64>> {
    (1..=levels)
        .map(|l| ap_characteristic(w, p, &CubeFamily::dyadic_at_origin(w.dim(), side, l)?))
        .collect()
}

/// Relative change between consecutive entries of a trend.
pub fn relative_changes(trend: &[f64]) -> Vec<f64> {
    trend.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
}

/// Grid cells meeting `q` as `(node index, overlap volume)`, periodically wrapped.
pub fn cube_cells(g: &Geometry, q: &Cube) -> Vec<(usize, f64)> {
    let h = g.step();
    let axis = |l: f64, u: f64| -> Vec<(usize, f64)> {
        let first = ((l + g.halfwidth) / h + 0.5).floor() as i64;
        let last = ((u + g.halfwidth) / h + 0.5).ceil() as i64;
        (first..=last)
            .filter_map(|k| {
                let c = -g.halfwidth + k as f64 * h;
                let ov = (u.min(c + 0.5 * h) - l.max(c - 0.5 * h)).max(0.0);
                (ov > 0.0).then(|| (k.rem_euclid(g.n as i64) as usize, ov))
            })
            .collect()
    };
    let (lo, hi) = (q.lo(), q.hi());
    let ax = axis(lo[0], hi[0]);
    if g.dim == 1 {
        return ax;
    }
    let ay = axis(lo[1], hi[1]);
    let mut out = Vec::with_capacity(ax.len() * ay.len());
    for (i, ox) in &ax {
        for (j, oy) in &ay {
            out.push((i * g.n + j, ox * oy));
        }
    }
    out
}

/// Mean oscillation `avg_Q |b - avg_Q b|` of a cellwise-constant `b`.
pub fn mean_oscillation(b: &[f64], geom: &Geometry, q: &Cube) -> f64 {
    let cells = cube_cells(geom, q);
    let vol: f64 = cells.iter().map(|c| c.1).sum();
    let avg = cells.iter().map(|(i, o)| b[*i] * o).sum::<f64>() / vol;
    cells
        .iter()
        .map(|(i, o)| (b[*i] - avg).abs() * o)
        .sum::<f64>()
        / vol
}

/// `sup_Q avg_Q |b - avg_Q b|` over the family.
pub fn bmo_norm(b: &SampledFunction, cubes: &CubeFamily) -> Result<f64> {
    if cubes.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let geom = *b.geometry();
    if geom.dim != cubes.dim {
        return Err(Error::GeometryMismatch("cube family dimension".into()));
    }
    let re = b.real_parts();
    let vals: Vec<f64> = cubes
        .cubes
        .par_iter()
        .map(|q| mean_oscillation(&re, &geom, q))
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Cell means of `log|x|` on the grid (the origin cell is integrated exactly).
pub fn log_abs_cell_means(geom: Geometry) -> Result<SampledFunction> {
    let h = geom.step();
    let vals: Vec<f64> = (0..geom.len())
        .map(|i| {
            let x = geom.point(i);
            if geom.dim == 1 {
                let anti = |s: f64| if s == 0.0 { 0.0 } else { s * s.abs().ln() - s };
                (anti(x[0] + 0.5 * h) - anti(x[0] - 0.5 * h)) / h
            } else {
                log_square_mean(x, h)
            }
        })
        .collect();
    SampledFunction::from_real(geom, &vals)
}

fn log_square_mean(c: [f64; 2], h: f64) -> f64 {
    if c[0].hypot(c[1]) < 0.25 * h {
        // 8 int_0^{pi/4} int_0^{rho} r ln r dr, rho = (h/2) / cos(theta)
        let inner = |th: f64| {
            let rho = 0.5 * h / th.cos();
            0.5 * rho * rho * (rho.ln() - 0.5)
        };
        return 8.0 * quad::gauss_panels(inner, 0.0, 0.25 * std::f64::consts::PI, 4, 16) / (h * h);
    }
    let (gx, gw) = quad::gauss_legendre(8);
    let mut s = 0.0;
    for (x, wx) in gx.iter().zip(&gw) {
        for (y, wy) in gx.iter().zip(&gw) {
            s += wx * wy * (c[0] + 0.5 * h * x).hypot(c[1] + 0.5 * h * y).ln();
        }
    }
    0.25 * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weight_is_a_p_one() {
        let w = Weight::Constant { c: 3.0, dim: 1 };
        let fam = CubeFamily::dyadic_at_origin(1, 1.0, 4).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let c = ap_characteristic(&w, p, &fam).unwrap();
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_integrals() {
        assert!((power_integral_1d(0.5, 0.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(power_integral_1d(-1.0, 0.0, 1.0).is_infinite());
        assert!((power_integral_1d(-2.0, 1.0, 2.0) - 0.5).abs() < 1e-15);
        // int over the unit disk-free square [-1,1]^2 of r^0 is 4
        assert!((power_integral_2d(0.0, [-1.0, -1.0], [1.0, 1.0]) - 4.0).abs() < 1e-12);
        // int_{[0,1]^2} r^2 = 2/3
        assert!((power_integral_2d(2.0, [0.0, 0.0], [1.0, 1.0]) - 2.0 / 3.0).abs() < 1e-12);
        assert!(power_integral_2d(-2.0, [-1.0, -1.0], [1.0, 1.0]).is_infinite());
    }

    #[test]
    fn power_integral_2d_matches_split() {
        let a = -0.7;
        let whole = power_integral_2d(a, [-0.3, -0.2], [0.5, 0.9]);
        let parts = power_integral_2d(a, [-0.3, -0.2], [0.1, 0.9])
            + power_integral_2d(a, [0.1, -0.2], [0.5, 0.9]);
        assert!((whole - parts).abs() < 1e-12 * whole);
    }

    #[test]
    fn power_weight_criterion() {
        assert!(Weight::power_in_ap(0.9, 1, 2.0));
        assert!(!Weight::power_in_ap(1.1, 1, 2.0));
        assert!(!Weight::power_in_ap(-1.0, 1, 2.0));
        assert!(Weight::power_in_ap(1.5, 2, 2.0));
    }

    #[test]
    fn bmo_of_sign_on_symmetric_cube() {
        let geom = Geometry::new(1, 4.0, 256).unwrap();
        let b = SampledFunction::from_real_fn(geom, |x| x[0].signum()).unwrap();
        // avoid the node at zero: its cell straddles the jump
        let h = geom.step();
        let q = Cube::new([0.0, 0.0], 2.0 + h);
        let osc = mean_oscillation(&b.real_parts(), &geom, &q);
        assert!((osc - 1.0).abs() < h, "{osc}");
    }

    #[test]
    fn log_cell_mean_at_origin() {
        let geom = Geometry::new(1, 4.0, 64).unwrap();
        let b = log_abs_cell_means(geom).unwrap();
        let h = geom.step();
        assert!((b.values()[32].re - ((0.5 * h).ln() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn json_descriptor() {
        let w = Weight::from_json(r#"{"type":"power","a":0.5}"#).unwrap();
        assert_eq!(w, Weight::power(0.5));
        assert!(Weight::from_json(r#"{"type":"constant","c":-1}"#).is_err());
    }

    #[test]
    fn sampled_weight_overlap() {
        let geom = Geometry::new(1, 2.0, 8).unwrap();
        let w = Weight::Sampled {
            dim: 1,
            halfwidth: 2.0,
            n: 8,
            values: (0..8).map(|i| 1.0 + i as f64).collect(),
        };
        w.validate().unwrap();
        let total = w.integral(&Cube::new([-0.25, 0.0], 4.0));
        let expect: f64 = (0..8).map(|i| (1.0 + i as f64) * geom.step()).sum();
        assert!((total - expect).abs() < 1e-12);
        assert_eq!(w.grid_values(&geom)[3], 4.0);
    }
}
