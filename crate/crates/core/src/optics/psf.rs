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

//! Point-spread functions of hard apertures.

use std::f64::consts::{PI, SQRT_2};

use super::geometry::ApertureGeometry;

/// `sin(u)/u` with the removable singularity filled in.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// Derivative of [`sinc`].
pub fn sinc_deriv(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        let u2 = u * u;
        -u / 3.0 + u * u2 / 30.0 - u * u2 * u2 / 840.0
    } else {
        (u * u.cos() - u.sin()) / (u * u)
    }
}

/// Single hard-aperture PSF `√σ sin(πx/σ)/(πx)`.
pub fn psf_sinc(geom: &ApertureGeometry, x: f64) -> f64 {
    let s = geom.sigma();
    sinc(PI * x / s) / s.sqrt()
}

/// Two-aperture PSF `√2 cos(βx) ψ(x)`.
pub fn psf_two_aperture(geom: &ApertureGeometry, x: f64) -> f64 {
    SQRT_2 * (geom.beta() * x).cos() * psf_sinc(geom, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsfKind {
    /// One aperture.
    Single,
    /// Both apertures combined.
    TwoAperture,
}

/// A PSF with an optional image-plane offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psf {
    geom: ApertureGeometry,
    kind: PsfKind,
    shift: f64,
}

impl Psf {
    pub fn single(geom: ApertureGeometry) -> Self {
        Self { geom, kind: PsfKind::Single, shift: 0.0 }
    }

    pub fn two_aperture(geom: ApertureGeometry) -> Self {
        Self { geom, kind: PsfKind::TwoAperture, shift: 0.0 }
    }

    /// The same PSF centred at `x0`.
    pub fn shifted(mut self, x0: f64) -> Self {
        self.shift = x0;
        self
    }

    pub fn geometry(&self) -> &ApertureGeometry {
        &self.geom
    }

    pub fn kind(&self) -> PsfKind {
        self.kind
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x - self.shift;
        match self.kind {
            PsfKind::Single => psf_sinc(&self.geom, x),
            PsfKind::TwoAperture => psf_two_aperture(&self.geom, x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let x = x - self.shift;
        let s = self.geom.sigma();
        let k = PI / s;
        let single = sinc(k * x) / s.sqrt();
        let single_d = k * sinc_deriv(k * x) / s.sqrt();
        match self.kind {
            PsfKind::Single => single_d,
            PsfKind::TwoAperture => {
                let b = self.geom.beta();
                let (sn, cs) = (b * x).sin_cos();
                SQRT_2 * (cs * single_d - b * sn * single)
            }
        }
    }

    /// Largest spatial frequency (rad per length) present in the PSF.
    pub fn bandwidth(&self) -> f64 {
        let k = PI / self.geom.sigma();
        match self.kind {
            PsfKind::Single => k,
            PsfKind::TwoAperture => k + self.geom.beta(),
        }
    }

    /// Frequencies at which the PSF oscillates far from its centre.
    pub fn tail_frequencies(&self) -> Vec<f64> {
        let k = PI / self.geom.sigma();
        match self.kind {
            PsfKind::Single => vec![k],
            PsfKind::TwoAperture => {
                let b = self.geom.beta();
                vec![(b - k).abs(), b + k]
            }
        }
    }
}

/// Smallest nonzero beat among sums and differences of two frequency sets.
pub fn slowest_beat(a: &[f64], b: &[f64]) -> f64 {
    let mut slow = f64::INFINITY;
    for &x in a {
        for &y in b {
            for w in [(x - y).abs(), x + y] {
                if w > 1e-9 * (x + y).max(1.0) && w < slow {
                    slow = w;
                }
            }
        }
    }
    slow
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(r: f64) -> ApertureGeometry {
        ApertureGeometry::from_rayleigh(1.3, r).unwrap()
    }

    #[test]
    fn centre_and_first_zero() {
        let g = geom(1.0);
        assert!((psf_sinc(&g, 0.0) - 1.0 / 1.3f64.sqrt()).abs() < 1e-15);
        assert!(psf_sinc(&g, 1.3).abs() < 1e-15);
        assert!((psf_two_aperture(&g, 0.0) - SQRT_2 / 1.3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_baseline_is_scaled_single() {
        let g = geom(0.0);
        for x in [-3.0, -0.2, 0.0, 0.7, 5.5] {
            assert_eq!(psf_two_aperture(&g, x), SQRT_2 * psf_sinc(&g, x));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for kind in [PsfKind::Single, PsfKind::TwoAperture] {
            let p = Psf { geom: geom(2.0), kind, shift: 0.3 };
            for x in [-2.1, -0.5, 0.3, 0.30001, 1.0, 4.4] {
                let h = 1e-5;
                let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
                assert!((fd - p.deriv(x)).abs() < 1e-8, "{kind:?} x={x}");
            }
        }
    }

    #[test]
    fn sinc_series_joins_closed_form() {
        for u in [9.9e-5, 1.01e-4, 9.9e-4, 1.01e-3] {
            assert!((sinc(u) - u.sin() / u).abs() < 1e-15);
            let d = (u * u.cos() - u.sin()) / (u * u);
            assert!((sinc_deriv(u) - d).abs() < 1e-9);
        }
    }
}
