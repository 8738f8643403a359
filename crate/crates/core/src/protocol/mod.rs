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

//! Encode/decode protocol: branch-level simulator, exact enumeration and a
//! state-vector oracle for small instances.

pub mod decode;
pub mod encode;
pub mod layout;
pub mod oracle;
pub mod record;
pub mod simulate;

pub use decode::{
    decode_parity, ef_string_probability, ghz_measure, parity_outcomes, phi_label, zeta_probabilities, Collapsed,
    DecodeRecord, EfString, GhzOutcome, ParityPattern, PhiSign, Zeta,
};
pub use encode::{encode, encode_with, MemoryBranch, MemoryState, PhotonicXRecord};
pub use layout::{BinaryCodeword, MemoryLayout};
pub use oracle::{oracle_statevector, oracle_with_ordering, Ordering, SparseState};
pub use record::DetectionRecord;
pub use simulate::{
    exact_distribution, run_protocol, run_protocol_traced, Distribution, Outcome, OutcomeKey, ProtocolSetup, Trace,
};
