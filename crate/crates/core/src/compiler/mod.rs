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

//! Compiling multimode interferometers into nonlocal gate schedules.

pub mod budget;
pub mod clements;
pub mod gadget;
pub mod nonlocal;
pub mod teleport;
pub mod unitary;

pub use budget::ResourceBudget;
pub use clements::{clements_decompose, mzi_matrix, Mzi, MziMesh};
pub use gadget::{bs_gadget, gadget_block, gadget_matrix, SingleRailPairState};
pub use nonlocal::{compile_nonlocal, teleported_gadget_process, Compilation, VerificationReport};
pub use teleport::{teleported_cnot, teleported_cnot_with, BellPairPool, Outcomes, QubitRegister, TeleportRecord};
pub use unitary::{check_unitary, random_unitary, unitarity_defect, unitary_from_json, unitary_to_json, CMatrix};
