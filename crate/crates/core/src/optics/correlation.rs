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

//! Overlaps between the modal basis and a shifted PSF.

use super::basis::ModalBasis;
use super::bessel::spherical_jn_with_derivs;
use super::geometry::ApertureGeometry;
use super::psf::{slowest_beat, Psf};
use super::quadrature::{integrate_panels, Estimate, LineIntegrator};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `Γ_q(xs) = ∫ φ_q(x) ψ(x − xs) dx` by quadrature.
pub fn gamma(basis: &ModalBasis, psf: &Psf, q: usize, xs: f64) -> Result<f64> {
    check_mode(basis, q)?;
    let psf = psf.shifted(xs);
    overlap(basis, &psf, &|x| basis.eval(q, x) * psf.eval(x), "mode overlap").map(|e| e.value)
}

/// `dΓ_q/dxs = −∫ φ_q(x) ψ'(x − xs) dx` by quadrature.
pub fn gamma_deriv(basis: &ModalBasis, psf: &Psf, q: usize, xs: f64) -> Result<f64> {
    check_mode(basis, q)?;
    let psf = psf.shifted(xs);
    overlap(basis, &psf, &|x| -basis.eval(q, x) * psf.deriv(x), "mode overlap derivative").map(|e| e.value)
}

fn check_mode(basis: &ModalBasis, q: usize) -> Result<()> {
    if q >= basis.k() {
        return Err(Error::ModeOutOfRange { q, k: basis.k() });
    }
    Ok(())
}

fn overlap<F>(basis: &ModalBasis, psf: &Psf, f: &F, what: &'static str) -> Result<Estimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    let sigma = psf.geometry().sigma();
    match basis {
        ModalBasis::Custom(b) => {
            let (lo, hi) = b.support();
            let e = integrate_panels(f, lo, hi, 0.25 * sigma, 1e-15);
            Ok(e)
        }
        ModalBasis::SincBessel(_) => {
            let band = basis.bandwidth().unwrap_or(0.0);
            let beat = slowest_beat(&[band], &psf.tail_frequencies());
            LineIntegrator::new(sigma)
                .max_frequency(band + psf.bandwidth())
                .slowest_frequency(beat)
                .label(what)
                .integrate(f)
        }
    }
}

/// Closed form `Γ_q(xs) = √(1+2q) j_q(πxs/σ)` and its derivative for the
/// sinc-Bessel basis paired with the single hard-aperture PSF.
pub fn gamma_closed_form(k: usize, sigma: f64, xs: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut v, mut d) = spherical_jn_with_derivs(k - 1, PI * xs / sigma);
    for q in 0..k {
        let c = ((1 + 2 * q) as f64).sqrt();
        v[q] *= c;
        d[q] *= c * PI / sigma;
    }
    (v, d)
}

/// `Γ_q(xs)` and `Γ_q'(xs)` for all retained modes, using the closed form
/// when it applies.
pub fn correlations(geom: &ApertureGeometry, basis: &ModalBasis, xs: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    match basis {
        ModalBasis::SincBessel(b) if (b.sigma() - geom.sigma()).abs() <= 1e-12 * geom.sigma() => {
            Ok(gamma_closed_form(basis.k(), geom.sigma(), xs))
        }
        _ => {
            let psf = Psf::single(*geom);
            let mut g = Vec::with_capacity(basis.k());
            let mut d = Vec::with_capacity(basis.k());
            for q in 0..basis.k() {
                g.push(gamma(basis, &psf, q, xs)?);
                d.push(gamma_deriv(basis, &psf, q, xs)?);
            }
            Ok((g, d))
        }
    }
}

/// Normalized overlaps `η_q = Γ_q / √(Σ Γ_l²)`.
pub fn eta(geom: &ApertureGeometry, basis: &ModalBasis, xs: f64) -> Result<Vec<f64>> {
    let (g, _) = correlations(geom, basis, xs)?;
    normalize(&g)
}

pub(crate) fn normalize(g: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = g.iter().map(|v| v * v).sum();
    if !(s > 0.0) {
        return Err(Error::OutsideModeSupport);
    }
    let n = s.sqrt();
    Ok(g.iter().map(|v| v / n).collect())
}

/// Fraction of the PSF captured by the retained modes, `Σ Γ_l²`.
pub fn capture_fraction(geom: &ApertureGeometry, basis: &ModalBasis, xs: f64) -> Result<f64> {
    let (g, _) = correlations(geom, basis, xs)?;
    Ok(g.iter().map(|v| v * v).sum())
}

/// Captured photon number `N_K = N Σ Γ_l²(xs)`.
pub fn captured_flux(n: f64, geom: &ApertureGeometry, basis: &ModalBasis, xs: f64) -> Result<f64> {
    Ok(n * capture_fraction(geom, basis, xs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(k: usize) -> (ApertureGeometry, ModalBasis) {
        let g = ApertureGeometry::from_rayleigh(1.0, 1.0).unwrap();
        let b = ModalBasis::sinc_bessel(k, &g).unwrap();
        (g, b)
    }

    #[test]
    fn closed_form_special_values() {
        let (g0, _) = gamma_closed_form(4, 1.0, 0.0);
        assert_eq!(g0, vec![1.0, 0.0, 0.0, 0.0]);
        let (g, _) = gamma_closed_form(2, 1.0, 0.5);
        assert!((g[0] - 2.0 / PI).abs() < 1e-15);
        assert!((g[1] - 3f64.sqrt() * 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((g[1] - 0.70197).abs() < 1e-5);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let (geom, basis) = setup(6);
        let psf = Psf::single(geom);
        for xs in [0.0, 0.5, -1.3] {
            let (cf, cfd) = gamma_closed_form(6, 1.0, xs);
            for q in 0..6 {
                let v = gamma(&basis, &psf, q, xs).unwrap();
                assert!((v - cf[q]).abs() < 1e-9, "q={q} xs={xs}: {v} vs {}", cf[q]);
                let d = gamma_deriv(&basis, &psf, q, xs).unwrap();
                assert!((d - cfd[q]).abs() < 1e-8, "q={q} xs={xs}: {d} vs {}", cfd[q]);
            }
        }
    }

    #[test]
    fn eta_at_origin_and_norm() {
        let (geom, basis) = setup(5);
        assert_eq!(eta(&geom, &basis, 0.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let e = eta(&geom, &basis, 0.37).unwrap();
        let n: f64 = e.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_close_to_gamma_when_capture_is_complete() {
        let (geom, basis) = setup(10);
        let e = eta(&geom, &basis, 0.3).unwrap();
        let (g, _) = gamma_closed_form(10, 1.0, 0.3);
        for q in 0..10 {
            assert!((e[q] - g[q]).abs() < 1e-3);
        }
    }

    #[test]
    fn outside_support_is_an_error() {
        assert_eq!(normalize(&[0.0, 0.0]).unwrap_err(), Error::OutsideModeSupport);
    }

    #[test]
    fn captured_flux_values() {
        let (geom, basis) = setup(1);
        assert_eq!(captured_flux(7.0, &geom, &basis, 0.0).unwrap(), 7.0);
        let v = captured_flux(7.0, &geom, &basis, 0.5).unwrap();
        assert!((v - 7.0 * (2.0 / PI).powi(2)).abs() < 1e-13);
        let (_, b40) = setup(40);
        assert!(capture_fraction(&geom, &b40, 0.5).unwrap() > 0.999);
    }

    #[test]
    fn mode_index_checked() {
        let (geom, basis) = setup(2);
        let psf = Psf::single(geom);
        assert!(matches!(gamma(&basis, &psf, 2, 0.0), Err(Error::ModeOutOfRange { q: 2, k: 2 })));
    }
}
