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

//! Classical and quantum Fisher information for the separation `θ`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::psf::slowest_beat;
use crate::optics::quadrature::LineIntegrator;
use crate::optics::{correlations, ApertureGeometry, ModalBasis, Psf};

/// `4N ∫ (∂ψ/∂x)² dx` by quadrature.
pub fn qfi_integral(psf: &Psf, n: f64) -> Result<f64> {
    let sigma = psf.geometry().sigma();
    let tails = psf.tail_frequencies();
    let f = |x: f64| {
        let d = psf.deriv(x);
        d * d
    };
    let e = LineIntegrator::new(sigma)
        .max_frequency(2.0 * psf.bandwidth())
        .slowest_frequency(slowest_beat(&tails, &tails))
        .label("QFI integral")
        .integrate(&f)?;
    Ok(4.0 * n * e.value)
}

/// `4π²N(3r²+1)/(3σ²)`.
pub fn qfi_closed_form(n: f64, sigma: f64, ratio: f64) -> f64 {
    4.0 * PI * PI * n * (3.0 * ratio * ratio + 1.0) / (3.0 * sigma * sigma)
}

/// Normalized overlaps and their θ-derivatives.
struct EtaJet {
    capture: f64,
    eta: Vec<f64>,
    deta: Vec<f64>,
    /// `Σ Γ'²` and `Σ Γ Γ'`, kept for the unnormalized form.
    sum_dd: f64,
    sum_gd: f64,
}

fn eta_jet(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis) -> Result<EtaJet> {
    let (g, d) = correlations(geom, basis, theta)?;
    let s: f64 = g.iter().map(|v| v * v).sum();
    if !(s > 0.0) {
        return Err(Error::OutsideModeSupport);
    }
    let sum_gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
    let sum_dd: f64 = d.iter().map(|v| v * v).sum();
    let root = s.sqrt();
    let eta = g.iter().map(|v| v / root).collect();
    let deta = g.iter().zip(&d).map(|(gv, dv)| dv / root - gv * sum_gd / (s * root)).collect();
    Ok(EtaJet { capture: s, eta, deta, sum_dd, sum_gd })
}

/// `J_q = 4 N_K [β² η_q² + η_q'²]` for every retained mode.
pub fn cfi_modes(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis, n: f64) -> Result<Vec<f64>> {
    let jet = eta_jet(theta, geom, basis)?;
    let b2 = geom.beta() * geom.beta();
    let nk = n * jet.capture;
    Ok(jet.eta.iter().zip(&jet.deta).map(|(e, d)| 4.0 * nk * (b2 * e * e + d * d)).collect())
}

pub fn cfi_mode(q: usize, theta: f64, geom: &ApertureGeometry, basis: &ModalBasis, n: f64) -> Result<f64> {
    if q >= basis.k() {
        return Err(Error::ModeOutOfRange { q, k: basis.k() });
    }
    Ok(cfi_modes(theta, geom, basis, n)?[q])
}

/// `Σ_q J_q`.
pub fn cfi_total(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis, n: f64) -> Result<f64> {
    Ok(cfi_modes(theta, geom, basis, n)?.iter().sum())
}

/// `4N [Σ(β²Γ² + Γ'²) − (ΣΓΓ')²/ΣΓ²]`, algebraically equal to
/// [`cfi_total`].
pub fn cfi_total_gamma_form(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis, n: f64) -> Result<f64> {
    let jet = eta_jet(theta, geom, basis)?;
    let b2 = geom.beta() * geom.beta();
    Ok(4.0 * n * (b2 * jet.capture + jet.sum_dd - jet.sum_gd * jet.sum_gd / jet.capture))
}

/// Fisher information per detected photon, `4[β² + Σ η_q'²]`.
pub fn cfi_per_detection(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis) -> Result<f64> {
    let jet = eta_jet(theta, geom, basis)?;
    let b2 = geom.beta() * geom.beta();
    Ok(4.0 * (b2 + jet.deta.iter().map(|d| d * d).sum::<f64>()))
}

/// QFI of the separable square-aperture PSF `ψ_2ap(x) ψ(y)`.
///
/// The double integral of `(∂_x Ψ)²` factorizes into the x-integral of the
/// two-aperture derivative times `∫ ψ(y)² dy`; both are whole-line
/// integrals.
pub fn qfi_2d(geom: &ApertureGeometry, n: f64) -> Result<f64> {
    let along = qfi_integral(&Psf::two_aperture(*geom), 1.0)? / 4.0;
    let across = y_normalization(geom)?;
    Ok(4.0 * n * along * across)
}

/// `∫ ψ(y)² dy` over the whole line.
pub fn y_normalization(geom: &ApertureGeometry) -> Result<f64> {
    let psf = Psf::single(*geom);
    let f = |y: f64| psf.eval(y).powi(2);
    let e = LineIntegrator::new(geom.sigma())
        .max_frequency(2.0 * psf.bandwidth())
        .label("PSF normalization")
        .integrate(&f)?;
    Ok(e.value)
}

/// Fisher quantities at one `(K, r, θ)` point, per photon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherRow {
    pub k: usize,
    pub ratio: f64,
    pub theta_over_sigma: f64,
    pub per_mode: Vec<f64>,
    pub total: f64,
    pub qfi: f64,
}

impl FisherRow {
    pub fn normalized(&self) -> f64 {
        self.total / self.qfi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub sigma: f64,
    pub rows: Vec<FisherRow>,
}

/// Normalized CFI surface over all combinations of the grids (N = 1).
pub fn fig3_grid(sigma: f64, ks: &[usize], ratios: &[f64], thetas_over_sigma: &[f64]) -> Result<FisherReport> {
    if ks.is_empty() || ratios.is_empty() || thetas_over_sigma.is_empty() {
        return Err(Error::InvalidScene("Fisher grid axes must be nonempty".into()));
    }
    let points: Vec<(usize, f64, f64)> = ks
        .iter()
        .flat_map(|&k| ratios.iter().flat_map(move |&r| thetas_over_sigma.iter().map(move |&t| (k, r, t))))
        .collect();
    let rows = points
        .into_par_iter()
        .map(|(k, r, t)| {
            let geom = ApertureGeometry::from_rayleigh(sigma, r)?;
            let basis = ModalBasis::sinc_bessel(k, &geom)?;
            let per_mode = cfi_modes(t * sigma, &geom, &basis, 1.0)?;
            Ok(FisherRow {
                k,
                ratio: r,
                theta_over_sigma: t,
                total: per_mode.iter().sum(),
                per_mode,
                qfi: qfi_closed_form(1.0, sigma, r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FisherReport { sigma, rows })
}

impl FisherReport {
    /// CSV with columns `K, r, theta_over_sigma, J_total, QFI, ratio,
    /// J_0 ..` padded to the largest K.
    pub fn to_csv(&self) -> String {
        let kmax = self.rows.iter().map(|r| r.k).max().unwrap_or(0);
        let mut out = String::from("K,r,theta_over_sigma,J_total,QFI,ratio");
        for q in 0..kmax {
            write!(out, ",J_{q}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                row.k,
                row.ratio,
                row.theta_over_sigma,
                row.total,
                row.qfi,
                row.normalized()
            )
            .unwrap();
            for q in 0..kmax {
                match row.per_mode.get(q) {
                    Some(v) => write!(out, ",{v:.16e}").unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Line plot of `J/QFI` against `θ/σ`, one curve per `(K, r)`.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 420.0, 50.0);
        let tmax = self.rows.iter().map(|r| r.theta_over_sigma).fold(0.0, f64::max).max(1e-12);
        let tmin = self.rows.iter().map(|r| r.theta_over_sigma).fold(f64::INFINITY, f64::min).min(tmax);
        let ymin = self.rows.iter().map(FisherRow::normalized).fold(1.0, f64::min).min(0.9);
        let sx = |t: f64| pad + (t - tmin) / (tmax - tmin).max(1e-12) * (w - 2.0 * pad);
        let sy = |v: f64| h - pad - (v - ymin) / (1.0 - ymin).max(1e-12) * (h - 2.0 * pad);
        // one polyline per (K, r), keyed by r's bit pattern
        type Curve = ((usize, u64), Vec<(f64, f64)>);
        let mut curves: Vec<Curve> = Vec::new();
        for row in &self.rows {
            let key = (row.k, row.ratio.to_bits());
            let pt = (row.theta_over_sigma, row.normalized());
            match curves.iter_mut().find(|(k, _)| *k == key) {
                Some((_, pts)) => pts.push(pt),
                None => curves.push((key, vec![pt])),
            }
        }
        let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n\
             <text x=\"{xm}\" y=\"{yl}\" text-anchor=\"middle\" font-size=\"14\">theta/sigma</text>\n\
             <text x=\"15\" y=\"{ym}\" font-size=\"14\" transform=\"rotate(-90 15 {ym})\">CFI/QFI</text>\n",
            y0 = h - pad,
            x1 = w - pad,
            xm = w / 2.0,
            yl = h - 10.0,
            ym = h / 2.0,
        );
        for (i, ((k, rbits), mut pts)) in curves.into_iter().enumerate() {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let path: Vec<String> = pts.iter().map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v))).collect();
            let color = palette[i % palette.len()];
            writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
                 <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"{color}\">K={k}, r={}</text>",
                path.join(" "),
                w - pad - 110.0,
                pad + 14.0 * (i as f64 + 1.0),
                f64::from_bits(rbits)
            )
            .unwrap();
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::quadrature::gauss_legendre;

    fn geom(r: f64) -> ApertureGeometry {
        ApertureGeometry::from_rayleigh(1.0, r).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert!((qfi_closed_form(1.0, 1.0, 0.0) - 4.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((qfi_closed_form(2.0, 1.0, 1.0) - 32.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((qfi_closed_form(1.0, 2.0, 2.0) / qfi_closed_form(1.0, 2.0, 1.0) - 13.0 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn qfi_integral_matches_closed_form() {
        for r in [1.0, 2.0, 3.0] {
            let q = qfi_integral(&Psf::two_aperture(geom(r)), 3.0).unwrap();
            let want = qfi_closed_form(3.0, 1.0, r);
            assert!(((q - want) / want).abs() < 1e-8, "r={r}: {q} vs {want}");
        }
    }

    #[test]
    fn single_aperture_and_zero_baseline() {
        let q = qfi_integral(&Psf::single(geom(1.0)), 1.0).unwrap();
        assert!((q / qfi_closed_form(1.0, 1.0, 0.0) - 1.0).abs() < 1e-9);
        // β = 0: ψ_2ap = √2 ψ, so twice the single-aperture value
        let q0 = qfi_integral(&Psf::two_aperture(geom(0.0)), 1.0).unwrap();
        assert!((q0 / (2.0 * qfi_closed_form(1.0, 1.0, 0.0)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qfi_is_translation_invariant() {
        let p = Psf::two_aperture(geom(2.0));
        let a = qfi_integral(&p, 1.0).unwrap();
        let b = qfi_integral(&p.shifted(0.37), 1.0).unwrap();
        assert!((a - b).abs() / a < 1e-10);
    }

    #[test]
    fn cfi_at_origin() {
        let g = geom(1.5);
        let b = ModalBasis::sinc_bessel(5, &g).unwrap();
        let j = cfi_modes(0.0, &g, &b, 2.0).unwrap();
        assert!((j[0] - 8.0 * g.beta() * g.beta()).abs() < 1e-12);
        assert!((j[1] - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!(j[2..].iter().all(|&v| v.abs() < 1e-20));
        let total: f64 = j.iter().sum();
        assert!((total - qfi_closed_form(2.0, 1.0, 1.5)).abs() < 1e-11);
    }

    #[test]
    fn both_forms_agree() {
        for r in [0.5, 1.0, 2.0] {
            let g = geom(r);
            for k in [1, 3, 10, 40] {
                let b = ModalBasis::sinc_bessel(k, &g).unwrap();
                for t in [1e-6, 0.05, 0.2, 0.5, 1.3] {
                    let a = cfi_total(t, &g, &b, 1.0).unwrap();
                    let c = cfi_total_gamma_form(t, &g, &b, 1.0).unwrap();
                    assert!((a - c).abs() <= 1e-10 * a.abs().max(1.0), "r={r} k={k} t={t}");
                    assert!(a <= qfi_closed_form(1.0, 1.0, r) * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn eta_derivative_matches_finite_differences() {
        let g = geom(1.0);
        let b = ModalBasis::sinc_bessel(8, &g).unwrap();
        let h = 1e-5;
        for t in [0.05, 0.3, 0.8] {
            let jet = eta_jet(t, &g, &b).unwrap();
            let up = eta_jet(t + h, &g, &b).unwrap().eta;
            let dn = eta_jet(t - h, &g, &b).unwrap().eta;
            for q in 0..8 {
                let fd = (up[q] - dn[q]) / (2.0 * h);
                assert!((fd - jet.deta[q]).abs() <= 1e-6 * jet.deta[q].abs().max(1.0), "q={q} t={t}");
            }
        }
    }

    #[test]
    fn ratio_grows_with_k() {
        let report = fig3_grid(1.0, &[5, 20], &[1.0, 2.0, 3.0], &[0.1]).unwrap();
        for r in [1.0, 2.0, 3.0] {
            let get = |k| report.rows.iter().find(|x| x.k == k && x.ratio == r).unwrap().normalized();
            assert!(get(20) >= get(5));
        }
        assert!(report.rows.iter().all(|row| row.normalized() <= 1.0 + 1e-9));
    }

    #[test]
    fn csv_layout() {
        let report = fig3_grid(1.0, &[1, 2], &[1.0], &[0.1, 0.2]).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "K,r,theta_over_sigma,J_total,QFI,ratio,J_0,J_1");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].ends_with(','));
        assert!(report.to_svg().starts_with("<svg"));
    }

    #[test]
    fn qfi_2d_matches_closed_form_and_tensor_window() {
        for r in [1.0, 3.0] {
            let g = geom(r);
            let q = qfi_2d(&g, 1.0).unwrap();
            let want = qfi_closed_form(1.0, 1.0, r);
            assert!((q / want - 1.0).abs() < 1e-6);
        }
        // separability check on a finite window with a tensor rule
        let g = geom(1.0);
        let p2 = Psf::two_aperture(g);
        let p1 = Psf::single(g);
        let (x, w) = gauss_legendre(40);
        let cells = 24;
        let half = 3.0;
        let h = 2.0 * half / cells as f64;
        let nodes: Vec<(f64, f64)> = (0..cells)
            .flat_map(|c| {
                let mid = -half + (c as f64 + 0.5) * h;
                x.iter().zip(&w).map(move |(t, wt)| (mid + 0.5 * h * t, 0.5 * h * wt)).collect::<Vec<_>>()
            })
            .collect();
        let mut double = 0.0;
        for &(xi, wx) in &nodes {
            for &(yj, wy) in &nodes {
                double += wx * wy * (p2.deriv(xi) * p1.eval(yj)).powi(2);
            }
        }
        let ix: f64 = nodes.iter().map(|&(xi, wx)| wx * p2.deriv(xi).powi(2)).sum();
        let iy: f64 = nodes.iter().map(|&(yj, wy)| wy * p1.eval(yj).powi(2)).sum();
        assert!((double / (ix * iy) - 1.0).abs() < 1e-12);
        assert!((y_normalization(&g).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(fig3_grid(1.0, &[], &[1.0], &[0.1]).is_err());
    }
}
