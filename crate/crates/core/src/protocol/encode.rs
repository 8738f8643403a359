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

//! Photon-to-memory encoding and the photonic X-basis measurement.
//!
//! The CNOT map copies the binary codeword of the arrival bin into the
//! memory column of the photon's mode at the site where it was collected.
//! Measuring every photonic qubit in the X basis then leaves the memory in
//! the same superposition, with each branch multiplied by the sign of the
//! outcome of the photonic qubit it came from. All `2^{2KM}` outcome
//! strings are equally likely.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::layout::MemoryLayout;
use crate::bits::Bits;
use crate::photon_state::{PhotonBranch, Site};

/// Outcomes of the photonic X measurements, one bit per photonic mode
/// (`0` for `+`, `1` for `−`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhotonicXRecord {
    layout: MemoryLayout,
    bits: Bits,
}

impl PhotonicXRecord {
    pub fn new(layout: MemoryLayout, bits: Bits) -> Self {
        assert_eq!(bits.len(), layout.photonic_modes());
        Self { layout, bits }
    }

    pub fn sample<R: Rng + ?Sized>(layout: MemoryLayout, rng: &mut R) -> Self {
        Self { layout, bits: Bits::random(layout.photonic_modes(), rng) }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    /// `±1` outcome of `(site, bin, q)`.
    pub fn sign(&self, site: Site, bin: usize, mode: usize) -> f64 {
        if self.bits.get(self.layout.photonic_index(site, bin, mode)) {
            -1.0
        } else {
            1.0
        }
    }

    /// `f(h_mq)`: `+1` when both sites agree, `−1` otherwise.
    pub fn f(&self, bin: usize, mode: usize) -> f64 {
        self.sign(Site::A, bin, mode) * self.sign(Site::B, bin, mode)
    }

    /// Probability of any particular record, `2^{−2KM}`.
    pub fn probability(layout: &MemoryLayout) -> f64 {
        0.5f64.powi(layout.photonic_modes() as i32)
    }
}

/// Memory excitation: codeword of `bin` in column `mode` at `site`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryBranch {
    pub site: Site,
    pub bin: usize,
    pub mode: usize,
    pub amplitude: Complex64,
}

/// Memory state after encoding; empty means all memories in `|0⟩`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MemoryState {
    pub branches: Vec<MemoryBranch>,
}

impl MemoryState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn is_vacuum(&self) -> bool {
        self.branches.is_empty()
    }
}

/// Post-measurement memory state for a given photonic record.
pub fn encode_with(branches: &[PhotonBranch], h: &PhotonicXRecord) -> MemoryState {
    let branches = branches
        .iter()
        .map(|b| MemoryBranch {
            site: b.site,
            bin: b.bin,
            mode: b.mode,
            amplitude: b.amplitude * h.sign(b.site, b.bin, b.mode),
        })
        .collect();
    MemoryState { branches }
}

/// Encodes `branches` (empty for vacuum) and samples the photonic record.
pub fn encode<R: Rng + ?Sized>(
    branches: &[PhotonBranch],
    layout: &MemoryLayout,
    rng: &mut R,
) -> (PhotonicXRecord, MemoryState) {
    let h = PhotonicXRecord::sample(*layout, rng);
    let mem = encode_with(branches, &h);
    (h, mem)
}
