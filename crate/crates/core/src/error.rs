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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("mode index {q} out of range for a basis with {k} modes")]
    ModeOutOfRange { q: usize, k: usize },

    #[error("quadrature for {what} did not converge (residual {residual:.3e})")]
    Quadrature { what: &'static str, residual: f64 },

    #[error("basis is not orthonormal: <phi_{p}|phi_{q}> = {overlap:.3e}")]
    NotOrthonormal { p: usize, q: usize, overlap: f64 },

    #[error("source outside captured mode support")]
    OutsideModeSupport,

    #[error("linearization invalid: M*epsilon = {0} exceeds 1")]
    LinearizationInvalid(f64),

    #[error("inconsistent parity pattern: {0}")]
    InconsistentParity(String),

    #[error("oracle size limit exceeded: {0}")]
    OracleTooLarge(String),

    #[error("matrix is not unitary (||U^H U - I|| = {0:.3e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("no Bell pair available")]
    NoBellPair,

    #[error("non-identifiable: {0}")]
    NonIdentifiable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed record: {0}")]
    Parse(String),
}
