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

//! Dense complex matrices, unitarity checks, Haar-random unitaries and
//! JSON input.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Frobenius norm of `U†U − I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

pub fn check_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), actual: u.ncols() });
    }
    let defect = unitarity_defect(u);
    if !(defect < tol) {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(d, d);
    for v in g.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(re, im);
    }
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Parses a row-major matrix of `[re, im]` pairs.
pub fn unitary_from_json(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: bad.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn unitary_to_json(u: &CMatrix) -> String {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..u.nrows()).map(|i| (0..u.ncols()).map(|j| [u[(i, j)].re, u[(i, j)].im]).collect()).collect();
    serde_json::to_string(&rows).expect("plain numbers serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = stream_rng(1, 0);
        for d in 1..=8 {
            let u = random_unitary(d, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = stream_rng(2, 0);
        let u = random_unitary(3, &mut rng);
        let back = unitary_from_json(&unitary_to_json(&u)).unwrap();
        assert_eq!(u, back);
        assert!(unitary_from_json("[[[1,0],[0,0]]]").is_err());
        assert!(unitary_from_json("nope").is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(check_unitary(&m, 1e-10), Err(Error::NotUnitary(_))));
    }
}
