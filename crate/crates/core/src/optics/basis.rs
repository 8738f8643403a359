// Copyright 2026 The Farsight Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Orthonormal image-plane mode bases.

use std::f64::consts::PI;

use super::bessel::spherical_jn_with_derivs;
use super::geometry::ApertureGeometry;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};

/// Sinc-Bessel modes `φ_q(x) = √((1+2q)/σ) j_q(πx/σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincBessel {
    k: usize,
    sigma: f64,
}

impl SincBessel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn values_and_derivs(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        let u = PI * x / self.sigma;
        let (mut v, mut d) = spherical_jn_with_derivs(self.k - 1, u);
        for q in 0..self.k {
            let c = ((1 + 2 * q) as f64 / self.sigma).sqrt();
            v[q] *= c;
            d[q] *= c * PI / self.sigma;
        }
        (v, d)
    }
}

/// Natural cubic spline on a uniform grid, zero outside it.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system (1, 4, 1) m = 6 Δ²y / h² with m_0 = m_{n-1} = 0
            let inner = n - 2;
            let mut c = vec![0.0; inner];
            let mut d = vec![0.0; inner];
            for i in 0..inner {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]) / (h * h);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            for i in (0..inner).rev() {
                m[i + 1] = if i + 1 == inner { d[i] } else { d[i] - c[i] * m[i + 2] };
            }
        }
        Self { x0, h, y, m }
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let t = (x - self.x0) / self.h;
        let last = (self.y.len() - 1) as f64;
        if !(0.0..=last).contains(&t) {
            return None;
        }
        let i = (t.floor() as usize).min(self.y.len() - 2);
        Some((i, t - i as f64))
    }

    fn eval(&self, x: f64) -> f64 {
        let Some((i, t)) = self.locate(x) else { return 0.0 };
        let (a, b) = (1.0 - t, t);
        let h2 = self.h * self.h / 6.0;
        a * self.y[i] + b * self.y[i + 1] + h2 * ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1])
    }

    fn deriv(&self, x: f64) -> f64 {
        let Some((i, t)) = self.locate(x) else { return 0.0 };
        let (a, b) = (1.0 - t, t);
        (self.y[i + 1] - self.y[i]) / self.h
            + self.h / 6.0 * (-(3.0 * a * a - 1.0) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1])
    }
}

/// Modes supplied as samples on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBasis {
    splines: Vec<Spline>,
    support: (f64, f64),
}

impl TabulatedBasis {
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Gram matrix of the interpolated modes (exact for the splines).
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let (nodes, weights) = gauss_legendre(4);
        let s = &self.splines[0];
        let k = self.splines.len();
        let mut g = vec![vec![0.0; k]; k];
        for cell in 0..s.y.len() - 1 {
            let lo = s.x0 + cell as f64 * s.h;
            for (t, w) in nodes.iter().zip(&weights) {
                let x = lo + 0.5 * s.h * (1.0 + t);
                let v: Vec<f64> = self.splines.iter().map(|sp| sp.eval(x)).collect();
                for p in 0..k {
                    for q in p..k {
                        g[p][q] += 0.5 * s.h * w * v[p] * v[q];
                    }
                }
            }
        }
        for p in 0..k {
            for q in 0..p {
                g[p][q] = g[q][p];
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModalBasis {
    SincBessel(SincBessel),
    Custom(TabulatedBasis),
}

impl ModalBasis {
    pub fn sinc_bessel(k: usize, geom: &ApertureGeometry) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGeometry("basis needs at least one mode".into()));
        }
        Ok(Self::SincBessel(SincBessel { k, sigma: geom.sigma() }))
    }

    /// Tabulated modes `samples[q][i] = φ_q(x0 + i h)`, checked for
    /// orthonormality to within `tol`.
    pub fn tabulated(x0: f64, h: f64, samples: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = samples.first().map_or(0, Vec::len);
        if samples.is_empty() || n < 4 || !(h > 0.0) {
            return Err(Error::InvalidGeometry("tabulated basis needs >= 4 samples per mode".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: bad.len() });
        }
        let splines = samples.into_iter().map(|y| Spline::new(x0, h, y)).collect();
        let basis = TabulatedBasis { splines, support: (x0, x0 + (n - 1) as f64 * h) };
        let g = basis.gram();
        for (p, row) in g.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                let want = if p == q { 1.0 } else { 0.0 };
                if (v - want).abs() > tol {
                    return Err(Error::NotOrthonormal { p, q, overlap: v });
                }
            }
        }
        Ok(Self::Custom(basis))
    }

    pub fn k(&self) -> usize {
        match self {
            Self::SincBessel(b) => b.k,
            Self::Custom(b) => b.splines.len(),
        }
    }

    /// Same basis family truncated or extended to `k` modes. Tabulated
    /// bases can only be truncated.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        match self {
            Self::SincBessel(b) if k >= 1 => Ok(Self::SincBessel(SincBessel { k, sigma: b.sigma })),
            Self::Custom(b) if k >= 1 && k <= b.splines.len() => {
                Ok(Self::Custom(TabulatedBasis { splines: b.splines[..k].to_vec(), support: b.support }))
            }
            _ => Err(Error::ModeOutOfRange { q: k, k: self.k() }),
        }
    }

    /// `φ_q(x)`. Panics if `q >= K`.
    pub fn eval(&self, q: usize, x: f64) -> f64 {
        assert!(q < self.k(), "mode {q} out of range");
        match self {
            Self::SincBessel(b) => {
                let u = PI * x / b.sigma;
                let j = super::bessel::spherical_jn(q, u);
                ((1 + 2 * q) as f64 / b.sigma).sqrt() * j
            }
            Self::Custom(b) => b.splines[q].eval(x),
        }
    }

    /// `φ_q'(x)`. Panics if `q >= K`.
    pub fn deriv(&self, q: usize, x: f64) -> f64 {
        assert!(q < self.k(), "mode {q} out of range");
        match self {
            Self::SincBessel(b) => {
                let (_, d) = spherical_jn_with_derivs(q, PI * x / b.sigma);
                ((1 + 2 * q) as f64 / b.sigma).sqrt() * PI / b.sigma * d[q]
            }
            Self::Custom(b) => b.splines[q].deriv(x),
        }
    }

    /// All `K` mode values at `x`.
    pub fn values(&self, x: f64) -> Vec<f64> {
        self.values_and_derivs(x).0
    }

    pub fn values_and_derivs(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::SincBessel(b) => b.values_and_derivs(x),
            Self::Custom(b) => {
                (b.splines.iter().map(|s| s.eval(x)).collect(), b.splines.iter().map(|s| s.deriv(x)).collect())
            }
        }
    }

    /// Largest spatial frequency of the modes, if band-limited.
    pub fn bandwidth(&self) -> Option<f64> {
        match self {
            Self::SincBessel(b) => Some(PI / b.sigma),
            Self::Custom(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::quadrature::LineIntegrator;

    fn sb(k: usize) -> ModalBasis {
        let g = ApertureGeometry::from_rayleigh(1.0, 1.0).unwrap();
        ModalBasis::sinc_bessel(k, &g).unwrap()
    }

    #[test]
    fn sinc_bessel_orthonormal() {
        let b = sb(6);
        for p in 0..6 {
            for q in p..6 {
                if (p + q) % 2 == 1 {
                    continue; // odd integrand
                }
                let f = |x: f64| b.eval(p, x) * b.eval(q, x);
                let v = LineIntegrator::new(1.0).max_frequency(2.0 * PI).integrate(&f).unwrap();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((v.value - want).abs() < 1e-9, "p={p} q={q} {:?}", v);
            }
        }
    }

    #[test]
    fn derivs_match_finite_differences() {
        let b = sb(12);
        let h = 1e-4;
        for x in [-1.7, -0.3, 0.05, 0.4, 2.2, 9.0] {
            let (_, d) = b.values_and_derivs(x);
            for q in 0..12 {
                let fd = (b.eval(q, x + h) - b.eval(q, x - h)) / (2.0 * h);
                // derivative scale of the mode: sqrt((1+2q)/sigma) * pi/sigma
                let scale = d[q].abs().max(((1 + 2 * q) as f64).sqrt() * PI);
                assert!((fd - d[q]).abs() / scale < 1e-6, "q={q} x={x}");
                assert!((b.deriv(q, x) - d[q]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn values_agree_with_single_eval() {
        let b = sb(9);
        let v = b.values(0.77);
        for (q, &vq) in v.iter().enumerate() {
            assert!((vq - b.eval(q, 0.77)).abs() < 1e-15);
        }
    }

    fn hermite_like(n: usize) -> (f64, f64, Vec<Vec<f64>>) {
        // first two Hermite-Gauss functions, sampled finely
        let (x0, h) = (-12.0, 0.002);
        let g0 = |x: f64| PI.powf(-0.25) * (-x * x / 2.0).exp();
        let g1 = |x: f64| 2f64.sqrt() * x * g0(x);
        let xs: Vec<f64> = (0..n).map(|i| x0 + i as f64 * h).collect();
        (x0, h, vec![xs.iter().map(|&x| g0(x)).collect(), xs.iter().map(|&x| g1(x)).collect()])
    }

    #[test]
    fn tabulated_basis_validates() {
        let (x0, h, s) = hermite_like(12001);
        let b = ModalBasis::tabulated(x0, h, s.clone(), 1e-8).unwrap();
        assert_eq!(b.k(), 2);
        assert!((b.eval(1, 0.5) - 2f64.sqrt() * 0.5 * PI.powf(-0.25) * (-0.125f64).exp()).abs() < 1e-9);
        assert_eq!(b.eval(0, 13.0), 0.0);

        let mut skewed = s;
        skewed[1] = skewed[0].clone();
        let err = ModalBasis::tabulated(x0, h, skewed, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NotOrthonormal { .. }));
    }

    #[test]
    fn spline_reproduces_cubics_in_interior() {
        let sp = Spline::new(0.0, 0.1, (0..101).map(|i| (i as f64 * 0.1).sin()).collect());
        for x in [2.05, 5.0, 7.33] {
            assert!((sp.eval(x) - x.sin()).abs() < 1e-5);
            assert!((sp.deriv(x) - x.cos()).abs() < 1e-4);
        }
    }
}
