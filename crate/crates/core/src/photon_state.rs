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

//! Single-photon states collected by the two apertures and the
//! time-binned arrival model.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{capture_fraction, eta, ApertureGeometry, ModalBasis};

/// Two equally bright point sources at `±theta`, observed over `m` time
/// bins with photon probability `epsilon` per bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointScene {
    theta: f64,
    epsilon: f64,
    bins: usize,
}

impl TwoPointScene {
    pub fn new(theta: f64, epsilon: f64, bins: usize) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidScene(format!("theta must be finite, got {theta}")));
        }
        if bins == 0 {
            return Err(Error::InvalidScene("need at least one time bin".into()));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidScene(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let load = epsilon * bins as f64;
        if load > 1.0 + 1e-12 {
            return Err(Error::LinearizationInvalid(load));
        }
        Ok(Self { theta, epsilon, bins })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Source positions `x_1 = θ`, `x_2 = −θ`.
    pub fn position(&self, star: Star) -> f64 {
        match star {
            Star::One => self.theta,
            Star::Two => -self.theta,
        }
    }

    /// Memory qubits per mode column, `⌈log2(M+1)⌉`.
    pub fn m_bar(&self) -> usize {
        m_bar(self.bins)
    }
}

/// Bits needed to write `m` in binary, which equals `⌈log2(m+1)⌉`.
pub fn m_bar(m: usize) -> usize {
    (usize::BITS - m.leading_zeros()) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Star {
    One,
    Two,
}

impl Star {
    pub const BOTH: [Star; 2] = [Star::One, Star::Two];

    pub fn index(self) -> usize {
        match self {
            Star::One => 0,
            Star::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
}

impl Site {
    pub const BOTH: [Site; 2] = [Site::A, Site::B];

    pub fn index(self) -> usize {
        match self {
            Site::A => 0,
            Site::B => 1,
        }
    }
}

/// One term of the projected single-photon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBranch {
    pub star: Star,
    /// Time bin, 1-based.
    pub bin: usize,
    pub site: Site,
    pub mode: usize,
    pub amplitude: Complex64,
}

/// Terms `(A, q)` with amplitude `η_q e^{−iβx_s}/√2` and `(B, q)` with
/// `η_q e^{+iβx_s}/√2`.
pub fn build_branches(
    scene: &TwoPointScene,
    geom: &ApertureGeometry,
    basis: &ModalBasis,
    star: Star,
    bin: usize,
) -> Result<Vec<PhotonBranch>> {
    if bin == 0 || bin > scene.bins {
        return Err(Error::InvalidScene(format!("time bin {bin} outside 1..={}", scene.bins)));
    }
    let xs = scene.position(star);
    let eta = eta(geom, basis, xs)?;
    Ok(branches_from_eta(&eta, geom.beta() * xs, star, bin))
}

pub(crate) fn branches_from_eta(eta: &[f64], phase: f64, star: Star, bin: usize) -> Vec<PhotonBranch> {
    let mut out = Vec::with_capacity(2 * eta.len());
    for site in Site::BOTH {
        let sign = if site == Site::A { -1.0 } else { 1.0 };
        let rot = Complex64::from_polar(FRAC_1_SQRT_2, sign * phase);
        for (mode, &e) in eta.iter().enumerate() {
            out.push(PhotonBranch { star, bin, site, mode, amplitude: rot * e });
        }
    }
    out
}

/// `|⟨φ±_q|ψ⟩|²` with `φ±_q = (|A,q⟩ ± |B,q⟩)/√2`.
pub fn project_symmetric(branches: &[PhotonBranch], mode: usize) -> (f64, f64) {
    let amp =
        |site| branches.iter().filter(|b| b.site == site && b.mode == mode).map(|b| b.amplitude).sum::<Complex64>();
    let (a, b) = (amp(Site::A), amp(Site::B));
    ((a + b).norm_sqr() / 2.0, (a - b).norm_sqr() / 2.0)
}

/// Detection probabilities `[η_q² cos²(βθ), η_q² sin²(βθ)]` per mode,
/// conditional on a captured photon.
pub fn target_probabilities(geom: &ApertureGeometry, basis: &ModalBasis, theta: f64) -> Result<Vec<[f64; 2]>> {
    let eta = eta(geom, basis, theta)?;
    let (s, c) = (geom.beta() * theta).sin_cos();
    Ok(eta.iter().map(|e| [e * e * c * c, e * e * s * s]).collect())
}

/// Weights of the linearized M-bin state: vacuum `1 − Mε`, `ε` per bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalWeights {
    pub vacuum: f64,
    pub per_bin: Vec<f64>,
}

pub fn mcopy_expand(epsilon: f64, bins: usize) -> Result<ArrivalWeights> {
    let load = epsilon * bins as f64;
    if load > 1.0 + 1e-12 {
        return Err(Error::LinearizationInvalid(load));
    }
    Ok(ArrivalWeights { vacuum: (1.0 - load).max(0.0), per_bin: vec![epsilon; bins] })
}

/// Arrival statistics for one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedArrivalModel {
    pub epsilon: f64,
    pub bins: usize,
    /// Captured fraction `Σ_{l<K} Γ_l²(x_s)` for each star.
    pub capture: [f64; 2],
}

impl MixedArrivalModel {
    pub fn new(scene: &TwoPointScene, geom: &ApertureGeometry, basis: &ModalBasis) -> Result<Self> {
        let capture = [
            capture_fraction(geom, basis, scene.position(Star::One))?,
            capture_fraction(geom, basis, scene.position(Star::Two))?,
        ];
        Ok(Self { epsilon: scene.epsilon, bins: scene.bins, capture })
    }

    pub fn p_vacuum(&self) -> f64 {
        (1.0 - self.epsilon * self.bins as f64).max(0.0)
    }

    pub fn p_photon(&self) -> f64 {
        1.0 - self.p_vacuum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arrival {
    Vacuum,
    Photon {
        star: Star,
        bin: usize,
    },
    /// A photon arrived but fell outside the retained modes.
    NotCaptured {
        star: Star,
        bin: usize,
    },
}

pub fn sample_arrival<R: Rng + ?Sized>(model: &MixedArrivalModel, rng: &mut R) -> Arrival {
    if rng.random::<f64>() >= model.p_photon() {
        return Arrival::Vacuum;
    }
    let bin = rng.random_range(1..=model.bins);
    let star = if rng.random::<bool>() { Star::One } else { Star::Two };
    if rng.random::<f64>() < model.capture[star.index()] {
        Arrival::Photon { star, bin }
    } else {
        Arrival::NotCaptured { star, bin }
    }
}
