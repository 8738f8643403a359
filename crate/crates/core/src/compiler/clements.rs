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

//! Rectangular MZI-mesh decomposition of a unitary.
//!
//! Each MZI acting on modes `(i, i+1)` has the transfer matrix
//! `T(θ, φ) = [[e^{iφ} cos θ, −sin θ], [e^{iφ} sin θ, cos θ]]`. Elements
//! below the anti-diagonal are nulled alternately from the right (column
//! operations) and from the left (row operations); the left-hand factors
//! are then pushed through the residual diagonal so that the mesh reads
//! `U = D · T_N ⋯ T_1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::unitary::{check_unitary, CMatrix};
use crate::error::Result;

/// One MZI on modes `(mode, mode + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mzi {
    pub mode: usize,
    /// Internal phase.
    pub theta: f64,
    /// External phase.
    pub phi: f64,
}

impl Mzi {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        mzi_matrix(self.theta, self.phi)
    }

    /// Bar state: no power exchanged between the two modes.
    pub fn is_bar(&self, tol: f64) -> bool {
        self.theta.sin().abs() <= tol
    }
}

pub fn mzi_matrix(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    [[e * c, Complex64::new(-s, 0.0)], [e * s, Complex64::new(c, 0.0)]]
}

/// MZIs in the order light meets them, then a phase on every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MziMesh {
    pub dim: usize,
    pub mzis: Vec<Mzi>,
    pub output_phases: Vec<f64>,
}

impl MziMesh {
    pub fn matrix(&self) -> CMatrix {
        let mut u = CMatrix::identity(self.dim, self.dim);
        for m in &self.mzis {
            left_apply(&mut u, m.mode, &m.matrix());
        }
        for (i, &p) in self.output_phases.iter().enumerate() {
            let e = Complex64::from_polar(1.0, p);
            for j in 0..self.dim {
                u[(i, j)] *= e;
            }
        }
        u
    }

    /// Applies the mesh to a vector of mode amplitudes.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        for m in &self.mzis {
            let t = m.matrix();
            let (a, b) = (out[m.mode], out[m.mode + 1]);
            out[m.mode] = t[0][0] * a + t[0][1] * b;
            out[m.mode + 1] = t[1][0] * a + t[1][1] * b;
        }
        for (x, &p) in out.iter_mut().zip(&self.output_phases) {
            *x *= Complex64::from_polar(1.0, p);
        }
        out
    }
}

/// Rows `(r, r+1)` of `u` replaced by `t · rows`.
fn left_apply(u: &mut CMatrix, r: usize, t: &[[Complex64; 2]; 2]) {
    for j in 0..u.ncols() {
        let (a, b) = (u[(r, j)], u[(r + 1, j)]);
        u[(r, j)] = t[0][0] * a + t[0][1] * b;
        u[(r + 1, j)] = t[1][0] * a + t[1][1] * b;
    }
}

/// Columns `(c, c+1)` of `u` replaced by `columns · t†`.
fn right_apply_inverse(u: &mut CMatrix, c: usize, t: &[[Complex64; 2]; 2]) {
    for i in 0..u.nrows() {
        let (a, b) = (u[(i, c)], u[(i, c + 1)]);
        u[(i, c)] = a * t[0][0].conj() + b * t[0][1].conj();
        u[(i, c + 1)] = a * t[1][0].conj() + b * t[1][1].conj();
    }
}

fn arg(z: Complex64) -> f64 {
    z.im.atan2(z.re)
}

pub fn clements_decompose(u: &CMatrix) -> Result<MziMesh> {
    check_unitary(u, 1e-10)?;
    let n = u.nrows();
    let mut w = u.clone();
    let mut right: Vec<Mzi> = Vec::new();
    let mut left: Vec<Mzi> = Vec::new();

    // indices below are 0-based versions of the usual 1-based sweep
    for i in 1..n {
        if i % 2 == 1 {
            for j in 0..i {
                let (r, c) = (n - 1 - j, i - 1 - j);
                let (a, b) = (w[(r, c)], w[(r, c + 1)]);
                let (theta, phi) =
                    if a.norm() == 0.0 { (0.0, 0.0) } else { (a.norm().atan2(b.norm()), arg(a) - arg(b)) };
                let m = Mzi { mode: c, theta, phi };
                right_apply_inverse(&mut w, c, &m.matrix());
                right.push(m);
            }
        } else {
            for j in 1..=i {
                let (r, c) = (n - 1 + j - i, j - 1);
                let (a, b) = (w[(r - 1, c)], w[(r, c)]);
                let (theta, phi) =
                    if b.norm() == 0.0 { (0.0, 0.0) } else { (b.norm().atan2(a.norm()), PI + arg(b) - arg(a)) };
                let m = Mzi { mode: r - 1, theta, phi };
                left_apply(&mut w, r - 1, &m.matrix());
                left.push(m);
            }
        }
    }

    // w is now diagonal; push each left factor's inverse through it
    let mut phases: Vec<f64> = (0..n).map(|i| arg(w[(i, i)])).collect();
    let mut pushed = Vec::with_capacity(left.len());
    for m in left.iter().rev() {
        let (alpha, beta) = (phases[m.mode], phases[m.mode + 1]);
        phases[m.mode] = beta - m.phi + PI;
        pushed.push(Mzi { mode: m.mode, theta: m.theta, phi: alpha - beta + PI });
    }

    // U = D · T'_1 ⋯ T'_k · R_n ⋯ R_1: light meets R_1 first and T'_1 last,
    // and `pushed` already runs T'_k .. T'_1
    let mut out = right;
    out.extend(pushed);
    Ok(MziMesh { dim: n, mzis: out, output_phases: phases })
}
