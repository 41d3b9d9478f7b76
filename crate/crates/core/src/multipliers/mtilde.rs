use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Multiplier;
use crate::error::Result;
use crate::fractional::FractionalOrder;
use crate::frames::{GridFunction, Side};
use crate::numerics::integrate_adaptive_from;
use crate::scalar::{Cplx, Real};

/// Relative error above which a point is flagged.
const FLAG_TOLERANCE: f64 = 1e-6;
/// Initial panels per unit of `r`, enough to see unit-period oscillation.
const PANELS_PER_UNIT: f64 = 1.0;
const MAX_PANELS: usize = 1 << 14;
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Value of `m̃` at one radius with the quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MTildePoint {
    pub value: Cplx<f64>,
    pub error: f64,
    pub converged: bool,
}

/// `m̃(ξ) = ∫_0^1 (m(ξ) − m(ρξ)) (1−ρ)^{−1−α} dρ` for radial `m`, `|ξ| = r`.
///
/// The integral is split at `ρ = 1/2`. On `[0, 1/2]` the integrand is
/// regular and handled by adaptive Gauss–Kronrod. On `[1/2, 1]`, with
/// `u = 1 − ρ`, the first-order Taylor term `u r M'(r)` is subtracted from
/// the numerator and integrated in closed form; below `u₀` the second-order
/// term `−u² r² M''(r)/2` replaces the numerator altogether.
pub fn mtilde_radial<M: Multiplier + ?Sized>(m: &M, alpha: f64, r: f64) -> MTildePoint {
    mtilde_radial_tol(m, alpha, r, DEFAULT_REL_TOL)
}

/// [`mtilde_radial`] with an explicit relative quadrature tolerance.
pub fn mtilde_radial_tol<M: Multiplier + ?Sized>(m: &M, alpha: f64, r: f64, rel_tol: f64) -> MTildePoint {
    let r = r.abs();
    if r == 0.0 {
        return MTildePoint {
            value: Cplx::zero(),
            error: 0.0,
            converged: true,
        };
    }
    let d = m.radial_derivatives(r, 2);
    let (m0, m1, m2) = (d[0], d[1], d[2]);
    let panels = ((r * PANELS_PER_UNIT).ceil() as usize).clamp(1, MAX_PANELS);
    let scale = d.iter().fold(0.0f64, |acc, v| acc.max(v.norm())).max(1e-300);
    let tol = 0.1 * rel_tol * scale;

    // ρ ∈ [0, 1/2]
    let breaks: Vec<f64> = (0..=panels).map(|k| 0.5 * k as f64 / panels as f64).collect();
    let outer = integrate_adaptive_from(
        |rho: f64| (m0 - m.radial(rho * r)) * (1.0 - rho).powf(-1.0 - alpha),
        &breaks,
        tol,
        rel_tol,
        40 * panels + 200,
    );

    // u ∈ [0, 1/2]
    let u0 = (1e-3 / (1.0 + r)).min(0.25);
    let slope = m1 * r;
    let curv = m2 * r * r * 0.5;
    let mut ubreaks = vec![u0];
    let mut u = u0;
    while u * 4.0 < 0.5 / panels as f64 {
        u *= 4.0;
        ubreaks.push(u);
    }
    ubreaks.extend((1..=panels).map(|k| 0.5 * k as f64 / panels as f64).filter(|b| *b > u));
    let inner = integrate_adaptive_from(
        |u: f64| (m0 - m.radial((1.0 - u) * r) - slope * u) * u.powf(-1.0 - alpha),
        &ubreaks,
        tol,
        rel_tol,
        40 * panels + 200,
    );
    let head = -curv * u0.powf(2.0 - alpha) / (2.0 - alpha);
    let linear = slope * 0.5f64.powf(1.0 - alpha) / (1.0 - alpha);

    let value = outer.value + inner.value + head + linear;
    let error = outer.error + inner.error;
    MTildePoint {
        value,
        error,
        converged: error <= FLAG_TOLERANCE * value.norm().max(1e-12 * scale),
    }
}

/// `m̃` as a radial multiplier, evaluated by quadrature on demand.
pub struct MTilde<'a, M: ?Sized> {
    pub inner: &'a M,
    pub alpha: f64,
}

impl<M: Multiplier + ?Sized> Multiplier for MTilde<'_, M> {
    fn radial(&self, r: f64) -> Cplx<f64> {
        mtilde_radial(self.inner, self.alpha, r).value
    }
}

/// `m̃` sampled on the frequency grid of a template with the indices of
/// points whose quadrature did not meet the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct MTildeGrid<T> {
    pub function: GridFunction<T>,
    pub unconverged: Vec<usize>,
}

/// Evaluates `m̃` at every frequency of `template`; the result is on the
/// frequency side.
pub fn mtilde<T: Real, M: Multiplier + ?Sized>(
    m: &M,
    order: FractionalOrder<T>,
    template: &GridFunction<T>,
) -> Result<MTildeGrid<T>> {
    let alpha = order.alpha.f64();
    let radii: Vec<f64> = template.frequency_radii().iter().map(|r| r.f64()).collect();
    let mut unique = radii.clone();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let points: Vec<MTildePoint> = unique.par_iter().map(|r| mtilde_radial(m, alpha, *r)).collect();
    let mut samples = Vec::with_capacity(radii.len());
    let mut unconverged = Vec::new();
    for (i, r) in radii.iter().enumerate() {
        let k = unique.partition_point(|u| u < r);
        let p = points[k];
        if !p.converged {
            unconverged.push(i);
        }
        samples.push(Cplx::new(T::of(p.value.re), T::of(p.value.im)));
    }
    let function = GridFunction::new(template.dim, template.n, template.extent, samples, Side::Frequency)?;
    Ok(MTildeGrid { function, unconverged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::MultiplierSpec;

    /// `∫_0^1 (M(r) − M((1−u) r)) u^{−1−α} du` with `u = w^q`, midpoint rule.
    fn oracle(m: &MultiplierSpec, alpha: f64, r: f64, nodes: usize) -> Cplx<f64> {
        let q = 2.0 / (1.0 - alpha);
        let m0 = m.radial(r);
        let h = 1.0 / nodes as f64;
        let mut acc = Cplx::zero();
        for k in 0..nodes {
            let w = (k as f64 + 0.5) * h;
            let u = w.powf(q);
            acc += (m0 - m.radial((1.0 - u) * r)) * (q * w.powf(-q * alpha - 1.0));
        }
        acc * h
    }

    #[test]
    fn limited_decay_against_oracle() {
        let m = MultiplierSpec::limited_decay(1.0);
        for alpha in [0.3, 0.5] {
            let p = mtilde_radial(&m, alpha, 8.0);
            let o = oracle(&m, alpha, 8.0, 1_000_000);
            assert!(p.converged);
            assert!((p.value - o).norm() < 1e-5, "{alpha}: {} vs {o}", p.value);
        }
    }

    #[test]
    fn oscillatory_against_oracle() {
        let m = MultiplierSpec::oscillatory(0.5, 1.0);
        let p = mtilde_radial(&m, 0.4, 37.0);
        let o = oracle(&m, 0.4, 37.0, 1_000_000);
        assert!((p.value - o).norm() < 1e-5 * (1.0 + o.norm()), "{} vs {o}", p.value);
    }

    #[test]
    fn zero_and_flat_profiles() {
        let z = MultiplierSpec::zero();
        assert_eq!(mtilde_radial(&z, 0.5, 3.0).value, Cplx::zero());
        // constant on [r/2, r]: the ρ ∈ [1/2, 1] part vanishes and the rest
        // is ∫_0^{1/2} (c − m(ρr)) (1−ρ)^{−1−α} dρ
        let c = MultiplierSpec::custom(|r| Cplx::new(if r >= 1.0 { 1.0 } else { 0.0 }, 0.0));
        let p = mtilde_radial(&c, 0.5, 4.0);
        // m(ρ·4) = 0 for ρ < 1/4
        let exact = (0.75f64.powf(-0.5) - 1.0) / 0.5;
        assert!((p.value.re - exact).abs() < 1e-7, "{} vs {exact}", p.value.re);
    }

    #[test]
    fn linear_in_m() {
        use crate::multipliers::DerivativeMode;
        let a = MultiplierSpec::limited_decay(1.0).with_mode(DerivativeMode::FiniteDifference);
        let b = MultiplierSpec::oscillatory(0.5, 1.0).with_mode(DerivativeMode::FiniteDifference);
        let (aa, bb) = (a.clone(), b.clone());
        let sum = MultiplierSpec::custom(move |r| aa.radial(r) * 2.0 - bb.radial(r) * 0.5);
        let tol = 1e-13;
        for r in [1.7, 5.2, 11.0] {
            let lhs = mtilde_radial_tol(&sum, 0.35, r, tol).value;
            let rhs = mtilde_radial_tol(&a, 0.35, r, tol).value * 2.0 - mtilde_radial_tol(&b, 0.35, r, tol).value * 0.5;
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "{r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn grid_version_flags_and_symmetry() {
        let m = MultiplierSpec::band_bump();
        let t = GridFunction::<f64>::zeros(1, 64, 2.0).unwrap();
        let g = mtilde(&m, FractionalOrder::new(0.3).unwrap(), &t).unwrap();
        assert!(g.unconverged.is_empty());
        let f = &g.function.samples;
        assert_eq!(f[1], f[63]);
        assert_eq!(f[0], Cplx::zero());
    }
}
