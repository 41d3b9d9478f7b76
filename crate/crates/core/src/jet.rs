//! Truncated Taylor arithmetic for exact low-order derivatives.
//!
//! A `Jet<T, K>` stores the Taylor coefficients `c[0..K]` of a function at a
//! point, so `f^{(k)}(x) = k!·c[k]`. Only the operations needed by the
//! cutoffs and multiplier families are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T, const K: usize> {
    pub c: [T; K],
}

impl<T: Real, const K: usize> Jet<T, K> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); K];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: T) -> Self {
        let mut c = [T::zero(); K];
        c[0] = x;
        if K > 1 {
            c[1] = T::one();
        }
        Jet { c }
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    /// `k`-th derivative.
    pub fn derivative(&self, k: usize) -> T {
        let mut f = T::one();
        for i in 2..=k {
            f = f * T::of_usize(i);
        }
        self.c[k] * f
    }

    pub fn scale(self, s: T) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v = *v * s;
        }
        Jet { c }
    }

    pub fn recip(self) -> Self {
        let mut out = [T::zero(); K];
        let a0 = self.c[0];
        out[0] = T::one() / a0;
        for n in 1..K {
            let mut s = T::zero();
            for k in 1..=n {
                s = s + self.c[k] * out[n - k];
            }
            out[n] = -s / a0;
        }
        Jet { c: out }
    }

    pub fn exp(self) -> Self {
        // b' = a' b  =>  n b_n = Σ_{k=1}^n k a_k b_{n-k}
        let mut out = [T::zero(); K];
        out[0] = self.c[0].exp();
        for n in 1..K {
            let mut s = T::zero();
            for k in 1..=n {
                s = s + T::of_usize(k) * self.c[k] * out[n - k];
            }
            out[n] = s / T::of_usize(n);
        }
        Jet { c: out }
    }

    pub fn ln(self) -> Self {
        // a b' = a'  =>  n a_0 b_n = n a_n - Σ_{k=1}^{n-1} k b_k a_{n-k}
        let mut out = [T::zero(); K];
        let a0 = self.c[0];
        out[0] = a0.ln();
        for n in 1..K {
            let mut s = T::of_usize(n) * self.c[n];
            for k in 1..n {
                s = s - T::of_usize(k) * out[k] * self.c[n - k];
            }
            out[n] = s / (T::of_usize(n) * a0);
        }
        Jet { c: out }
    }

    /// `self^p` for a positive base.
    pub fn powf(self, p: T) -> Self {
        (self.ln().scale(p)).exp()
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = [T::zero(); K];
        let mut c = [T::zero(); K];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for n in 1..K {
            let mut ss = T::zero();
            let mut cc = T::zero();
            for k in 1..=n {
                let ka = T::of_usize(k) * self.c[k];
                ss = ss + ka * c[n - k];
                cc = cc - ka * s[n - k];
            }
            s[n] = ss / T::of_usize(n);
            c[n] = cc / T::of_usize(n);
        }
        (Jet { c: s }, Jet { c })
    }
}

impl<T: Real, const K: usize> Add for Jet<T, K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a = *a + b;
        }
        Jet { c }
    }
}

impl<T: Real, const K: usize> Sub for Jet<T, K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a = *a - b;
        }
        Jet { c }
    }
}

impl<T: Real, const K: usize> Neg for Jet<T, K> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real, const K: usize> Mul for Jet<T, K> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); K];
        for n in 0..K {
            let mut s = T::zero();
            for k in 0..=n {
                s = s + self.c[k] * o.c[n - k];
            }
            c[n] = s;
        }
        Jet { c }
    }
}

impl<T: Real, const K: usize> Div for Jet<T, K> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

/// Complex-valued jet as a pair of real jets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CJet<T, const K: usize> {
    pub re: Jet<T, K>,
    pub im: Jet<T, K>,
}

impl<T: Real, const K: usize> CJet<T, K> {
    pub fn real(re: Jet<T, K>) -> Self {
        CJet {
            re,
            im: Jet::constant(T::zero()),
        }
    }

    /// `e^{iθ}` for a real jet `θ`.
    pub fn expi(theta: Jet<T, K>) -> Self {
        let (s, c) = theta.sin_cos();
        CJet { re: c, im: s }
    }

    pub fn mul(self, o: Self) -> Self {
        CJet {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    pub fn scale(self, s: T) -> Self {
        CJet {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub fn add(self, o: Self) -> Self {
        CJet {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    pub fn derivative(&self, k: usize) -> num_complex::Complex<T> {
        num_complex::Complex::new(self.re.derivative(k), self.im.derivative(k))
    }
}
