//! One-dimensional quadrature: tanh-sinh for endpoint singularities,
//! Gauss-Legendre panels for smooth oscillatory integrands, and a dyadic
//! tail integrator for `[a, inf)` with a divergence heuristic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Value with an error estimate; `value` is `+inf` when divergence was flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            error: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule with `panels` equal panels of `order` points.
pub fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
        total += 0.5 * h * s;
    }
    total
}

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Estimate {
    if a == b {
        return Estimate::exact(0.0);
    }
    let d = 0.5 * (b - a);
    // Nodes are placed by distance to the nearer endpoint so that points
    // close to a singular endpoint are not rounded onto it.
    let eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let ch = u.cosh();
        let w = 0.5 * PI * t.cosh() / (ch * ch);
        // 1 - tanh(u) = 2 / (exp(2u) + 1)
        let gap = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        if gap == 0.0 {
            return 0.0;
        }
        let x = if u >= 0.0 { b - d * gap } else { a + d * gap };
        if x <= a || x >= b {
            return 0.0;
        }
        let v = f(x);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let h0 = 1.0;
    let tmax = 6.5;
    let mut h = h0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h * d;
    let mut err = f64::INFINITY;
    for _ in 0..9 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let cur = sum * h * d;
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol * cur.abs().max(1e-300) {
            break;
        }
    }
    Estimate {
        value: prev,
        error: err,
    }
}

/// Integrates `f` over `[a, b]` split at `breaks`.
pub fn integrate_pieces(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Estimate {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let mut value = 0.0;
    let mut error = 0.0;
    for w in pts.windows(2) {
        let e = tanh_sinh(f, w[0], w[1], tol);
        value += e.value;
        error += e.error;
    }
    Estimate { value, error }
}

/// Integrates a non-negative `f` over `[a, inf)` by dyadic segments.
///
/// Past the last break the segments must shrink geometrically; the result is
/// flagged infinite when four consecutive segments fail to shrink by 5%, or
/// when the cap `2^cap_octaves * a` is reached first.
pub fn integrate_to_infinity(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    breaks: &[f64],
    tol: f64,
    cap_octaves: u32,
) -> Estimate {
    assert!(a > 0.0, "tail integration starts at a positive point");
    let mut total = 0.0;
    let mut error = 0.0;
    let mut prev_seg = f64::NAN;
    let mut stalls = 0;
    let mut lo = a;
    for _ in 0..cap_octaves {
        let hi = 2.0 * lo;
        let seg = integrate_pieces(f, lo, hi, breaks, tol);
        error += seg.error;
        total += seg.value;
        let beyond_breaks = breaks.iter().all(|&b| b <= lo);
        if beyond_breaks && seg.value == 0.0 && prev_seg == 0.0 {
            return Estimate {
                value: total,
                error,
            };
        }
        if beyond_breaks && prev_seg.is_finite() && prev_seg > 0.0 {
            let ratio = seg.value / prev_seg;
            if ratio < 0.95 {
                stalls = 0;
                let tail = seg.value * ratio / (1.0 - ratio);
                if tail <= tol * total.abs().max(1e-300) {
                    return Estimate {
                        value: total + tail,
                        error: error + tail,
                    };
                }
            } else {
                stalls += 1;
                if stalls >= 4 {
                    return Estimate::infinite();
                }
            }
        }
        prev_seg = seg.value;
        lo = hi;
    }
    Estimate::infinite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let e = tanh_sinh(|r| r.powf(-0.75), 0.0, 1.0, 1e-12);
        assert!((e.value - 4.0).abs() < 1e-8, "{e:?}");
        let e = tanh_sinh(|x| -x.ln(), 0.0, 1.0, 1e-12);
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_converges_and_diverges() {
        let e = integrate_to_infinity(&|x| x.powf(-1.5), 1.0, &[], 1e-10, 80);
        assert!((e.value - 2.0).abs() < 1e-6, "{e:?}");
        let e = integrate_to_infinity(&|x| x.powf(0.5), 1.0, &[], 1e-10, 80);
        assert!(!e.is_finite());
        let e = integrate_to_infinity(&|_| 0.0, 1.0, &[], 1e-10, 80);
        assert_eq!(e.value, 0.0);
    }
}
