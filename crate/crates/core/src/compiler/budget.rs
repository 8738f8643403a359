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

//! Entanglement and hardware counts for an `n`-site, `K`-mode, `M`-bin
//! configuration.

use serde::{Deserialize, Serialize};

use crate::photon_state::m_bar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceBudget {
    pub sites: usize,
    pub modes: usize,
    pub bins: usize,
    pub dimension: usize,
    pub memory_qubits: usize,
    pub decode_bell_pairs: usize,
    pub mzis: usize,
    pub beamsplitters: usize,
    pub teleported_cnots: usize,
    pub teleport_bell_pairs: usize,
    pub phase_shifters: usize,
    /// `n`-qubit GHZ states that would replace the decoding Bell pairs when
    /// more than two sites share a parity check. Counted, not simulated.
    pub ghz_states: usize,
}

impl ResourceBudget {
    pub fn new(sites: usize, modes: usize, bins: usize) -> Self {
        let mb = m_bar(bins);
        let d = sites * modes;
        let bs = d * d.saturating_sub(1);
        Self {
            sites,
            modes,
            bins,
            dimension: d,
            memory_qubits: 2 * modes * mb,
            decode_bell_pairs: modes * mb,
            mzis: bs / 2,
            beamsplitters: bs,
            teleported_cnots: 2 * bs,
            teleport_bell_pairs: 2 * bs,
            phase_shifters: bs,
            ghz_states: if sites > 2 { modes * mb } else { 0 },
        }
    }
}
