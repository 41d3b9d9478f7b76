//! Littlewood–Paley pieces, Besov `B_p^s = B_{p,p}^s` norms and Hölder
//! `C^{n,s'}` norms of grid functions.

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cutoff::SmoothCutoff;
use super::grid::{lp_of, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Parameters of `B_p^s` truncated at band `j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BesovParams<T> {
    /// Integrability `p ∈ (1, ∞]`; serialised as a number or `"inf"`.
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub p: T,
    pub s: T,
    #[serde(default = "default_j_max")]
    pub j_max: i32,
}

fn default_j_max() -> i32 {
    12
}

fn ser_exponent<T: Real, S: Serializer>(p: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(p.f64())
    }
}

fn de_exponent<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Text(String),
    }
    match Exp::deserialize(d)? {
        Exp::Num(v) => Ok(T::of(v)),
        Exp::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => Ok(T::infinity()),
        Exp::Text(t) => Err(serde::de::Error::custom(format!("bad exponent `{t}`"))),
    }
}

impl<T: Real> BesovParams<T> {
    pub fn new(p: T, s: T, j_max: i32) -> Result<Self> {
        let b = BesovParams { p, s, j_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > T::one()) {
            return Err(Error::param("p", "must exceed 1"));
        }
        if !self.s.is_finite() {
            return Err(Error::param("s", "must be finite"));
        }
        if self.j_max < 1 {
            return Err(Error::param("j_max", "must be at least 1"));
        }
        Ok(())
    }
}

/// Truncated Besov norm with the individual piece norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BesovNorm<T> {
    pub value: T,
    /// `‖φ∗g‖_p` followed by `‖ψ_j∗g‖_p`, `j = 1..=j_max`.
    pub pieces: Vec<T>,
    /// The last two bands carry more than 1% of the sum.
    pub stale: bool,
}

fn check_band<T: Real>(g: &GridFunction<T>, j: i32) -> Result<()> {
    let needed = 2f64.powi(j + 1);
    let nyquist = g.nyquist().f64();
    if needed > nyquist * (1.0 + 1e-12) {
        return Err(Error::BandOutOfRange { band: j, needed, nyquist });
    }
    Ok(())
}

fn filtered<T: Real>(spec: &GridFunction<T>, radii: &[T], w: impl Fn(T) -> T) -> GridFunction<T> {
    let samples = spec
        .samples
        .iter()
        .zip(radii)
        .map(|(v, r)| {
            let c = w(*r);
            if c == T::zero() {
                Cplx::zero()
            } else {
                *v * c
            }
        })
        .collect();
    GridFunction {
        samples,
        ..spec.clone_header()
    }
    .to_space()
}

/// `ψ_j ∗ f`, the spectral restriction by `ψ̂(ξ/2^j)`.
pub fn lp_piece<T: Real>(f: &GridFunction<T>, j: i32, cut: &SmoothCutoff) -> Result<GridFunction<T>> {
    check_band(f, j)?;
    let spec = f.to_frequency();
    Ok(filtered(&spec, &f.frequency_radii(), |r| cut.band(r, j)))
}

/// `φ ∗ f`, the low-frequency piece.
pub fn low_piece<T: Real>(f: &GridFunction<T>, cut: &SmoothCutoff) -> Result<GridFunction<T>> {
    check_band(f, 0)?;
    let spec = f.to_frequency();
    Ok(filtered(&spec, &f.frequency_radii(), |r| cut.phi(r)))
}

/// `(‖φ∗g‖_p^p + Σ_{j=1}^{j_max} 2^{sjp}‖ψ_j∗g‖_p^p)^{1/p}`, or the
/// supremum form for `p = ∞`. `L^p` norms are Riemann sums.
pub fn besov_norm<T: Real>(g: &GridFunction<T>, params: &BesovParams<T>, cut: &SmoothCutoff) -> Result<BesovNorm<T>> {
    params.validate()?;
    check_band(g, params.j_max)?;
    let spec = g.to_frequency();
    let radii = g.frequency_radii();
    let cell = g.step().powi(g.dim as i32);
    let mut pieces = Vec::with_capacity(params.j_max as usize + 1);
    pieces.push(lp_of(&filtered(&spec, &radii, |r| cut.phi(r)).samples, params.p, cell));
    for j in 1..=params.j_max {
        pieces.push(lp_of(&filtered(&spec, &radii, |r| cut.band(r, j)).samples, params.p, cell));
    }
    Ok(combine(&pieces, params.p, params.s))
}

/// Combines piece norms `pieces[0] = ‖φ∗g‖`, `pieces[j] = ‖ψ_j∗g‖`.
pub(crate) fn combine<T: Real>(pieces: &[T], p: T, s: T) -> BesovNorm<T> {
    let weighted: Vec<T> = pieces
        .iter()
        .enumerate()
        .map(|(j, v)| *v * (s * T::of_usize(j) * T::LN_2()).exp())
        .collect();
    let k = weighted.len();
    let (value, stale) = if p.is_infinite() {
        let sup = weighted.iter().fold(T::zero(), |m, v| m.max(*v));
        let tail = weighted[k.saturating_sub(2)..].iter().fold(T::zero(), |m, v| m.max(*v));
        (sup, k > 2 && sup > T::zero() && tail >= sup)
    } else {
        let pw: Vec<T> = weighted.iter().map(|v| v.powf(p)).collect();
        let total = pw.iter().copied().sum::<T>();
        let tail = pw[k.saturating_sub(2)..].iter().copied().sum::<T>();
        (total.powf(p.recip()), k > 2 && tail > T::of(0.01) * total)
    };
    BesovNorm {
        value,
        pieces: pieces.to_vec(),
        stale,
    }
}

/// Spectral partial derivative `∂_x^a ∂_y^b g` on the space side.
pub fn derivative<T: Real>(g: &GridFunction<T>, order: (usize, usize)) -> GridFunction<T> {
    if order == (0, 0) {
        return g.to_space();
    }
    let mut spec = g.to_frequency();
    let freqs = g.frequencies();
    let n = g.n;
    let two_pi = T::TAU();
    let factor = |xi: T, k: usize, m: usize| -> Cplx<T> {
        if k == 0 {
            return Cplx::new(T::one(), T::zero());
        }
        // the Nyquist bin has no odd-derivative partner
        if m == n / 2 && k % 2 == 1 {
            return Cplx::zero();
        }
        Cplx::new(T::zero(), two_pi * xi).powu(k as u32)
    };
    for (i, v) in spec.samples.iter_mut().enumerate() {
        let (mx, my) = if g.dim == 1 { (i, 0) } else { (i % n, i / n) };
        let mut c = factor(freqs[mx], order.0, mx);
        if g.dim == 2 {
            c = c * factor(freqs[my], order.1, my);
        }
        *v = *v * c;
    }
    spec.to_space()
}

/// Grid approximation of the `C^{n,s'}` norm
/// `Σ_{|γ|≤n} sup|∂^γ g| + Σ_{|γ|=n} sup |∂^γ g(x) − ∂^γ g(y)|/|x−y|^{s'}`.
///
/// Derivatives are spectral. The difference quotient uses offsets
/// `2^k h`, `k = 0..=10`, along each axis (and the diagonal in 2-d), with
/// periodic wrap-around.
pub fn hoelder_norm<T: Real>(g: &GridFunction<T>, n: usize, s_prime: T) -> Result<T> {
    if !(s_prime > T::zero() && s_prime < T::one()) {
        return Err(Error::param("s_prime", "must lie in (0, 1)"));
    }
    let indices = |k: usize| -> Vec<(usize, usize)> {
        if g.dim == 1 {
            vec![(k, 0)]
        } else {
            (0..=k).map(|a| (a, k - a)).collect()
        }
    };
    let mut total = T::zero();
    for k in 0..=n {
        for gamma in indices(k) {
            let d = derivative(g, gamma);
            total = total + d.samples.iter().fold(T::zero(), |m, v| m.max(v.norm()));
            if k == n {
                total = total + hoelder_seminorm(&d, s_prime);
            }
        }
    }
    Ok(total)
}

fn hoelder_seminorm<T: Real>(d: &GridFunction<T>, s_prime: T) -> T {
    let n = d.n;
    let h = d.step();
    let shifts: Vec<(usize, usize, T)> = (0..=10usize)
        .filter(|k| (1usize << k) < n)
        .flat_map(|k| {
            let o = 1usize << k;
            let len = h * T::of_usize(o);
            if d.dim == 1 {
                vec![(o, 0, len)]
            } else {
                vec![(o, 0, len), (0, o, len), (o, o, len * T::SQRT_2())]
            }
        })
        .collect();
    let mut best = T::zero();
    for (ox, oy, len) in shifts {
        let denom = len.powf(s_prime);
        for i in 0..d.samples.len() {
            let j = if d.dim == 1 {
                (i + ox) % n
            } else {
                let (c, r) = (i % n, i / n);
                ((r + oy) % n) * n + (c + ox) % n
            };
            best = best.max((d.samples[j] - d.samples[i]).norm() / denom);
        }
    }
    best
}
