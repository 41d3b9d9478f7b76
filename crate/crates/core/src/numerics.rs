//! Small numerical kernels: least-squares line fits, Gauss rules and an
//! adaptive Gauss–Kronrod integrator for complex integrands.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::{Cplx, Real};

/// Result of an ordinary least-squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the fit.
    pub residual: T,
}

/// Least-squares line through `(x, y)`; `None` when fewer than two distinct
/// abscissae are available.
pub fn fit_line<T: Real>(x: &[T], y: &[T]) -> Option<LineFit<T>> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nn = T::of_usize(n);
    let mx = x[..n].iter().copied().sum::<T>() / nn;
    let my = y[..n].iter().copied().sum::<T>() / nn;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for i in 0..n {
        sxx = sxx + (x[i] - mx) * (x[i] - mx);
        sxy = sxy + (x[i] - mx) * (y[i] - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = (0..n)
        .map(|i| {
            let r = y[i] - (slope * x[i] + intercept);
            r * r
        })
        .sum::<T>();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / nn).sqrt(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: Fn(T) -> Cplx<T>>(f: &F, a: T, b: T) -> (Cplx<T>, T) {
    let half = T::of(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c);
    let mut kron = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for k in 0..7 {
        let dx = h * T::of(XGK[k]);
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * T::of(WGK[k]);
        if k % 2 == 1 {
            gauss = gauss + s * T::of(WG[k / 2]);
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Outcome of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T: Real> {
    pub value: Cplx<T>,
    pub error: T,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
///
/// Subdivides the interval with the largest error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol·|value|)` or `max_intervals`
/// is reached.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> Cplx<T>>(
    f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_intervals: usize,
) -> Quadrature<T> {
    integrate_adaptive_from(f, &[a, b], abs_tol, rel_tol, max_intervals)
}

/// Like [`integrate_adaptive`] but starting from a caller-supplied partition.
pub fn integrate_adaptive_from<T: Real, F: Fn(T) -> Cplx<T>>(
    f: F,
    breaks: &[T],
    abs_tol: T,
    rel_tol: T,
    max_intervals: usize,
) -> Quadrature<T> {
    let mut parts: Vec<(T, T, Cplx<T>, T)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    if parts.is_empty() {
        return Quadrature {
            value: Complex::zero(),
            error: T::zero(),
            converged: true,
        };
    }
    loop {
        let value = parts.iter().fold(Complex::zero(), |acc, p| acc + p.2);
        let error = parts.iter().fold(T::zero(), |acc, p| acc + p.3);
        let target = abs_tol.max(rel_tol * value.norm());
        if error <= target || parts.len() >= max_intervals {
            return Quadrature {
                value,
                error,
                converged: error <= target,
            };
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| {
                if p.3 > best.1 {
                    (i, p.3)
                } else {
                    best
                }
            });
        let (a, b, _, _) = parts[worst];
        let mid = (a + b) * T::of(0.5);
        if !(mid > a && mid < b) {
            return Quadrature {
                value,
                error,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        parts[worst] = (a, mid, v1, e1);
        parts.push((mid, b, v2, e2));
    }
}

/// Geometric (log-uniform) schedule from `hi` down to `lo` with `n` points.
pub fn geometric_schedule<T: Real>(hi: T, lo: T, n: usize) -> Vec<T> {
    if n < 2 {
        return vec![hi];
    }
    let (lh, ll) = (hi.ln(), lo.ln());
    (0..n)
        .map(|k| (lh + (ll - lh) * T::of_usize(k) / T::of_usize(n - 1)).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn line_fit_needs_two_points() {
        assert!(fit_line(&[1.0_f64], &[2.0]).is_none());
        assert!(fit_line(&[1.0_f64, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-13);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        // ∫_0^50 e^{i x} dx = (e^{50 i} - 1)/i
        let q = integrate_adaptive(
            |x: f64| Complex::new(x.cos(), x.sin()),
            0.0,
            50.0,
            1e-12,
            1e-12,
            2000,
        );
        let exact = (Complex::new(50f64.cos(), 50f64.sin()) - 1.0) / Complex::new(0.0, 1.0);
        assert!(q.converged);
        assert!((q.value - exact).norm() < 1e-10);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = integrate_adaptive(
            |x: f64| Complex::new(x.powf(-0.5), 0.0),
            0.0,
            1.0,
            1e-10,
            1e-10,
            500,
        );
        assert!((q.value.re - 2.0).abs() < 1e-8);
    }
}
