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

//! Two single-rail qubits and the CNOT–H–CNOT beamsplitter gadget.
//!
//! Basis order is `|AB⟩ = |00⟩, |01⟩, |10⟩, |11⟩` (index `2A + B`). A photon
//! in mode `i` of a pair `(i, i+1)` is `|10⟩`; a photon in mode `i+1` is
//! `|01⟩`. With that labeling the gadget acts on the single-excitation
//! block, ordered `(|10⟩, |01⟩)`, as `[[−1, 1], [1, 1]] / √2`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Gate4 = [[Complex64; 4]; 4];

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleRailPairState {
    pub amps: [Complex64; 4],
}

impl SingleRailPairState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !((norm - 1.0).abs() < 1e-10) {
            return Err(Error::NotUnitary((norm - 1.0).abs()));
        }
        Ok(Self { amps })
    }

    /// `a|10⟩ + b|01⟩`.
    pub fn single_excitation(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new([C0, b, a, C0])
    }

    pub fn vacuum() -> Self {
        Self { amps: [C1, C0, C0, C0] }
    }

    /// Amplitudes of `(|10⟩, |01⟩)`.
    pub fn excitation_block(&self) -> [Complex64; 2] {
        [self.amps[2], self.amps[1]]
    }

    pub fn apply(&self, g: &Gate4) -> Self {
        Self { amps: apply4(g, &self.amps) }
    }
}

pub fn apply4(g: &Gate4, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [C0; 4];
    for (i, row) in g.iter().enumerate() {
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mul4(a: &Gate4, b: &Gate4) -> Gate4 {
    let mut out = [[C0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// CNOT with qubit A as control.
pub fn cnot_ab() -> Gate4 {
    let mut g = [[C0; 4]; 4];
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        g[i][j] = C1;
    }
    g
}

/// Hadamard on qubit A.
pub fn hadamard_a() -> Gate4 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut g = [[C0; 4]; 4];
    for b in 0..2 {
        g[b][b] = h;
        g[b][2 + b] = h;
        g[2 + b][b] = h;
        g[2 + b][2 + b] = -h;
    }
    g
}

/// `CNOT(A→B) · H(A) · CNOT(A→B)`, applied right to left.
pub fn gadget_matrix() -> Gate4 {
    mul4(&cnot_ab(), &mul4(&hadamard_a(), &cnot_ab()))
}

pub fn bs_gadget(state: &SingleRailPairState) -> SingleRailPairState {
    state.apply(&gadget_matrix())
}

/// The gadget's single-excitation block in the `(|10⟩, |01⟩)` order.
pub fn gadget_block() -> [[f64; 2]; 2] {
    [[-FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, FRAC_1_SQRT_2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn beamsplitter_action() {
        let (a, b) = (Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.7));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let s = SingleRailPairState::single_excitation(a / n, b / n).unwrap();
        let out = bs_gadget(&s);
        let [p10, p01] = out.excitation_block();
        assert!((p01 - (a + b) / n * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((p10 - (b - a) / n * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!(out.amps[0].norm() < 1e-15 && out.amps[3].norm() < 1e-15);
    }

    #[test]
    fn equal_inputs_interfere_into_one_port() {
        let s = SingleRailPairState::single_excitation(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)).unwrap();
        let out = bs_gadget(&s);
        assert!((out.amps[1] - c(1.0)).norm() < 1e-15);
        assert!(out.amps[2].norm() < 1e-15);
    }

    #[test]
    fn vacuum_is_not_preserved() {
        let out = bs_gadget(&SingleRailPairState::vacuum());
        let expect = [c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)];
        for (o, e) in out.amps.iter().zip(expect) {
            assert!((o - e).norm() < 1e-15);
        }
    }

    #[test]
    fn block_matches_matrix_and_is_unitary() {
        let g = gadget_matrix();
        let blk = gadget_block();
        // rows/cols: |10⟩ is index 2, |01⟩ is index 1
        let idx = [2, 1];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[idx[i]][idx[j]] - c(blk[i][j])).norm() < 1e-15);
            }
        }
        let dot = blk[0][0] * blk[0][1] + blk[1][0] * blk[1][1];
        assert!(dot.abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(SingleRailPairState::new([c(1.0), c(1.0), c(0.0), c(0.0)]).is_err());
    }
}
