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

//! Simulation and analysis of entanglement-assisted two-telescope imaging.

pub mod bits;
pub mod compiler;
pub mod error;
pub mod fisher;
pub mod montecarlo;
pub mod optics;
pub mod photon_state;
pub mod protocol;
pub mod rng;

pub use compiler::{
    clements_decompose, compile_nonlocal, random_unitary, Compilation, MziMesh, ResourceBudget, VerificationReport,
};
pub use error::{Error, Result};
pub use fisher::{cfi_per_detection, cfi_total, fig3_grid, qfi_2d, qfi_closed_form, qfi_integral, FisherReport};
pub use montecarlo::{estimate_theta, run_batch, CountTable, EstimationResult, SearchInterval};
pub use optics::{ApertureGeometry, ModalBasis, Psf};
pub use photon_state::TwoPointScene;
pub use protocol::{exact_distribution, oracle_statevector, run_protocol, Distribution, Outcome, ProtocolSetup};
