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

//! Gauss-Legendre quadrature on finite intervals and on the whole real line.
//!
//! Image-plane integrands in this crate are products of band-limited
//! functions that decay only algebraically (the sinc PSF falls off as `1/x`),
//! so truncating at a finite half-width leaves an `O(1/L)` error. The
//! [`LineIntegrator`] removes it: the integral is computed on a ladder of
//! half-widths `L_k = L_0 2^k`, each truncation is closed with a C-infinity
//! taper of width `P` so that oscillatory tail contributions are suppressed
//! faster than any power of `omega P`, and the remaining smooth tail
//! `sum_n c_n / x^n` (n = 2, 3, 4) is eliminated by a linear fit across the
//! ladder.

use std::sync::OnceLock;

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Panel rule order.
const PANEL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate { value: self.value + rhs.value, error: self.error + rhs.error }
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * nodes.iter().zip(weights).map(|(&t, &w)| w * f(mid + half * t)).sum::<f64>()
}

/// Adaptive bisection with a 20-point Gauss-Legendre rule on each piece.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Estimate {
    let whole = gl_panel(f, a, b);
    refine(f, a, b, whole, tol, MAX_DEPTH)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Estimate {
    let mid = 0.5 * (a + b);
    let left = gl_panel(f, a, mid);
    let right = gl_panel(f, mid, b);
    let halves = left + right;
    let diff = (whole - halves).abs();
    if diff <= tol.max(1e-15 * halves.abs()) || depth == 0 {
        return Estimate { value: halves, error: diff };
    }
    refine(f, a, mid, left, 0.5 * tol, depth - 1) + refine(f, mid, b, right, 0.5 * tol, depth - 1)
}

/// Integral over `[a, b]` split into panels of at most `width`, each refined
/// adaptively to absolute tolerance `tol`.
pub fn integrate_panels<F>(f: &F, a: f64, b: f64, width: f64, tol: f64) -> Estimate
where
    F: Fn(f64) -> f64 + Sync,
{
    if b <= a {
        return Estimate { value: 0.0, error: 0.0 };
    }
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let parts: Vec<Estimate> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == n { b } else { lo + h };
            adaptive(f, lo, hi, tol)
        })
        .collect();
    // fixed summation order keeps results independent of the thread count
    parts.into_iter().fold(Estimate { value: 0.0, error: 0.0 }, |acc, e| acc + e)
}

/// C-infinity step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Whole-line integration with tail extrapolation. Lengths are in units of
/// `scale` (the Rayleigh separation for image-plane integrals).
#[derive(Debug, Clone)]
pub struct LineIntegrator {
    scale: f64,
    base_half_width: f64,
    taper: f64,
    panel: f64,
    tol: f64,
    accept: f64,
    what: &'static str,
}

const RUNGS: usize = 5;

impl LineIntegrator {
    pub fn new(scale: f64) -> Self {
        Self { scale, base_half_width: 100.0, taper: 20.0, panel: 0.5, tol: 1e-15, accept: 1e-9, what: "line integral" }
    }

    /// Narrows panels so each spans at most one period of `omega` (rad per
    /// physical length).
    pub fn max_frequency(mut self, omega: f64) -> Self {
        if omega > 0.0 {
            let period = 2.0 * std::f64::consts::PI / omega / self.scale;
            self.panel = self.panel.min(period);
        }
        self
    }

    /// Widens the taper so that a slow beat at `omega` still sees several
    /// periods inside it.
    pub fn slowest_frequency(mut self, omega: f64) -> Self {
        if omega > 0.0 {
            let want = 40.0 / (omega * self.scale);
            self.taper = self.taper.max(want.min(400.0));
        }
        self
    }

    pub fn base_half_width(mut self, half_width: f64) -> Self {
        self.base_half_width = half_width;
        self
    }

    pub fn accept(mut self, residual: f64) -> Self {
        self.accept = residual;
        self
    }

    pub fn label(mut self, what: &'static str) -> Self {
        self.what = what;
        self
    }

    /// Plain integral over `[-half_width, half_width]` (physical units).
    pub fn truncated<F>(&self, f: &F, half_width: f64) -> Estimate
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let w = self.panel * self.scale;
        integrate_panels(f, -half_width, half_width, w, self.tol)
    }

    /// Integral over the whole real line.
    pub fn integrate<F>(&self, f: &F) -> Result<Estimate>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let s = self.scale;
        let w = self.panel * s;
        let halves: Vec<f64> = (0..RUNGS).map(|k| self.base_half_width * s * (1u64 << k) as f64).collect();
        let taper = self.taper * s;

        let mut core = integrate_panels(f, -halves[0], halves[0], w, self.tol);
        let mut windowed = Vec::with_capacity(RUNGS);
        let mut panel_error = 0.0;
        for (k, &l) in halves.iter().enumerate() {
            if k > 0 {
                let prev = halves[k - 1];
                core = core + integrate_panels(f, prev, l, w, self.tol) + integrate_panels(f, -l, -prev, w, self.tol);
            }
            let ramp = |x: f64| f(x) * (1.0 - smooth_step((x.abs() - l) / taper));
            let edge = integrate_panels(&ramp, l, l + taper, w, self.tol)
                + integrate_panels(&ramp, -l - taper, -l, w, self.tol);
            windowed.push(core.value + edge.value);
            panel_error = (core + edge).error;
        }

        let moments: Vec<[f64; 3]> = halves.iter().map(|&l| [2, 3, 4].map(|n| tail_moment(l, taper, n))).collect();
        let best = extrapolate(&windowed[1..], &moments[1..], halves[1]);
        let check = extrapolate(&windowed[..4], &moments[..4], halves[0]);

        let residual = (best - check).abs() + panel_error;
        if !best.is_finite() || !residual.is_finite() || residual > self.accept {
            return Err(Error::Quadrature { what: self.what, residual });
        }
        Ok(Estimate { value: best, error: residual })
    }
}

/// `int_L^inf (1 - w(x)) x^{-n} dx` for the taper `w` used above.
fn tail_moment(l: f64, taper: f64, n: i32) -> f64 {
    let ramp = |x: f64| smooth_step((x - l) / taper) * x.powi(-n);
    let inner = adaptive(&ramp, l, l + taper, 1e-18).value;
    inner + (l + taper).powi(1 - n) / (n - 1) as f64
}

/// Solves `windowed_k = I - sum_n c_n A_n(L_k)` for `I`.
fn extrapolate(windowed: &[f64], moments: &[[f64; 3]], l_ref: f64) -> f64 {
    debug_assert_eq!(windowed.len(), 4);
    let mut m = Matrix4::zeros();
    let mut rhs = Vector4::zeros();
    for k in 0..4 {
        m[(k, 0)] = 1.0;
        for j in 0..3 {
            // columns rescaled to O(1)
            m[(k, j + 1)] = -moments[k][j] * l_ref.powi(j as i32 + 1);
        }
        rhs[k] = windowed[k];
    }
    match m.lu().solve(&rhs) {
        Some(sol) => sol[0],
        None => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 20, 64] {
            let (x, w) = gauss_legendre(n);
            let sw: f64 = w.iter().sum();
            assert!((sw - 2.0).abs() < 1e-13);
            // exact for degree 2n-1
            let deg = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((s - 2.0 / (deg + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let f = |x: f64| (40.0 * x).cos();
        let e = adaptive(&f, 0.0, 3.0, 1e-14);
        assert!((e.value - (120.0f64).sin() / 40.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sinc_squared_over_the_line() {
        // int sin^2(pi x)/(pi x)^2 dx = 1
        let f = |x: f64| {
            let u = PI * x;
            if u == 0.0 {
                1.0
            } else {
                (u.sin() / u).powi(2)
            }
        };
        let e = LineIntegrator::new(1.0).max_frequency(2.0 * PI).integrate(&f).unwrap();
        assert!((e.value - 1.0).abs() < 1e-11, "{:?}", e);
    }

    #[test]
    fn lorentzian_tail_is_extrapolated() {
        // non-oscillatory algebraic tail: int 1/(1+x^2) = pi
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let e = LineIntegrator::new(1.0).integrate(&f).unwrap();
        assert!((e.value - PI).abs() < 1e-10, "{:?}", e);
    }

    #[test]
    fn divergent_integral_is_rejected() {
        let f = |x: f64| 1.0 / (1.0 + x.abs());
        let err = LineIntegrator::new(1.0).integrate(&f).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
