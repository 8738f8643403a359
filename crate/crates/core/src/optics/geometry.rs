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

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two identical hard apertures of size `delta` centred at `±beta`.
///
/// `sigma = 2π/δ` is the Rayleigh separation on the image plane and
/// `ratio = 2β/δ` the baseline ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureGeometry {
    delta: f64,
    beta: f64,
    sigma: f64,
    ratio: f64,
}

impl ApertureGeometry {
    pub fn from_aperture(delta: f64, beta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidGeometry(format!("aperture size must be positive, got {delta}")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidGeometry(format!("half-baseline must be >= 0, got {beta}")));
        }
        let geom = Self { delta, beta, sigma: 2.0 * PI / delta, ratio: 2.0 * beta / delta };
        geom.warn_overlap();
        Ok(geom)
    }

    /// Geometry from the Rayleigh separation and the baseline ratio.
    pub fn from_rayleigh(sigma: f64, ratio: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidGeometry(format!("sigma must be positive, got {sigma}")));
        }
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::InvalidGeometry(format!("ratio must be >= 0, got {ratio}")));
        }
        let delta = 2.0 * PI / sigma;
        let geom = Self { delta, beta: ratio * delta / 2.0, sigma, ratio };
        geom.warn_overlap();
        Ok(geom)
    }

    fn warn_overlap(&self) {
        if self.beta > 0.0 && self.ratio < 1.0 {
            log::warn!("apertures overlap (r = {} < 1)", self.ratio);
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Same aperture size with a different baseline ratio.
    pub fn with_ratio(&self, ratio: f64) -> Result<Self> {
        Self::from_rayleigh(self.sigma, ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let g = ApertureGeometry::from_aperture(2.0, 3.0).unwrap();
        assert_eq!(g.sigma(), PI);
        assert_eq!(g.ratio(), 3.0);
        let h = ApertureGeometry::from_rayleigh(g.sigma(), g.ratio()).unwrap();
        assert!((h.delta() - 2.0).abs() < 1e-15);
        assert!((h.beta() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn beta_in_rayleigh_units() {
        let g = ApertureGeometry::from_rayleigh(1.7, 2.0).unwrap();
        assert!((g.beta() - PI * 2.0 / 1.7).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ApertureGeometry::from_aperture(0.0, 1.0).is_err());
        assert!(ApertureGeometry::from_aperture(1.0, -1.0).is_err());
        assert!(ApertureGeometry::from_rayleigh(f64::NAN, 1.0).is_err());
        assert!(ApertureGeometry::from_rayleigh(1.0, -0.5).is_err());
        // overlap is allowed
        assert!(ApertureGeometry::from_rayleigh(1.0, 0.5).is_ok());
    }
}
