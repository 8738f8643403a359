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

//! Image-plane optics: geometry, PSFs, mode bases and their overlaps.

pub mod basis;
pub mod bessel;
pub mod correlation;
pub mod geometry;
pub mod psf;
pub mod quadrature;

pub use basis::{ModalBasis, SincBessel, TabulatedBasis};
pub use correlation::{capture_fraction, captured_flux, correlations, eta, gamma, gamma_closed_form, gamma_deriv};
pub use geometry::ApertureGeometry;
pub use psf::{psf_sinc, psf_two_aperture, Psf, PsfKind};
