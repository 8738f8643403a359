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

//! Dense qubit register and CNOT by gate teleportation.
//!
//! A teleported CNOT takes one pre-shared Bell pair `(a, b)` with `a` held
//! next to the control and `b` next to the target:
//! `CNOT(c→a)`, measure `a` in Z (`m1`), `X^{m1}` on `b`, `CNOT(b→t)`,
//! measure `b` in X (`m2`), `Z^{m2}` on `c`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRegister {
    n: usize,
    amps: Vec<Complex64>,
}

impl QubitRegister {
    pub fn zeros(n: usize) -> Self {
        assert!(n < 28, "dense register too large");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two(), actual: len });
        }
        Ok(Self { n: len.trailing_zeros() as usize, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn x(&mut self, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        self.phase(q, std::f64::consts::PI);
    }

    /// `diag(1, e^{iα})` on qubit `q`.
    pub fn phase(&mut self, q: usize, alpha: f64) {
        let e = Complex64::from_polar(1.0, alpha);
        let m = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a *= e;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target);
        let (c, t) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let m = 1 << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects qubit `q` onto `value` and renormalizes. Returns the
    /// branch probability.
    pub fn postselect(&mut self, q: usize, value: bool) -> f64 {
        let p = if value { self.prob_one(q) } else { 1.0 - self.prob_one(q) };
        let m = 1 << q;
        let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & m != 0) == value {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        p
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let value = rng.random::<f64>() < self.prob_one(q);
        self.postselect(q, value);
        value
    }

    /// Resets a measured qubit to `|0⟩`.
    pub fn reset(&mut self, q: usize) {
        if self.prob_one(q) > 0.5 {
            self.x(q);
        }
    }
}

/// Pre-shared Bell pairs, all realized on one reusable ancilla pair of
/// the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellPairPool {
    pub available: usize,
    pub consumed: usize,
    pub near: usize,
    pub far: usize,
}

impl BellPairPool {
    pub fn new(available: usize, near: usize, far: usize) -> Self {
        Self { available, consumed: 0, near, far }
    }

    /// Prepares `(|00⟩ + |11⟩)/√2` on the ancillas, which must be `|00⟩`.
    fn draw(&mut self, reg: &mut QubitRegister) -> Result<usize> {
        if self.available == 0 {
            return Err(Error::NoBellPair);
        }
        self.available -= 1;
        self.consumed += 1;
        reg.h(self.near);
        reg.cnot(self.near, self.far);
        Ok(self.consumed - 1)
    }
}

/// Record of one teleported CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeleportRecord {
    pub pair: usize,
    pub m1: bool,
    pub m2: bool,
}

/// Measurement outcomes to force, for exhaustive branch checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcomes {
    Sampled,
    Forced(bool, bool),
}

pub fn teleported_cnot<R: Rng + ?Sized>(
    reg: &mut QubitRegister,
    control: usize,
    target: usize,
    pool: &mut BellPairPool,
    rng: &mut R,
) -> Result<TeleportRecord> {
    teleported_cnot_with(reg, control, target, pool, Outcomes::Sampled, rng)
}

pub fn teleported_cnot_with<R: Rng + ?Sized>(
    reg: &mut QubitRegister,
    control: usize,
    target: usize,
    pool: &mut BellPairPool,
    outcomes: Outcomes,
    rng: &mut R,
) -> Result<TeleportRecord> {
    let (a, b) = (pool.near, pool.far);
    let pair = pool.draw(reg)?;
    reg.cnot(control, a);
    let m1 = match outcomes {
        Outcomes::Sampled => reg.measure_z(a, rng),
        Outcomes::Forced(m, _) => {
            reg.postselect(a, m);
            m
        }
    };
    if m1 {
        reg.x(b);
    }
    reg.cnot(b, target);
    reg.h(b);
    let m2 = match outcomes {
        Outcomes::Sampled => reg.measure_z(b, rng),
        Outcomes::Forced(_, m) => {
            reg.postselect(b, m);
            m
        }
    };
    if m2 {
        reg.z(control);
    }
    reg.reset(a);
    reg.reset(b);
    Ok(TeleportRecord { pair, m1, m2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `|0⟩, |1⟩, |+⟩, |+i⟩`.
    fn pauli_inputs() -> [[Complex64; 2]; 4] {
        let h = FRAC_1_SQRT_2;
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)], [c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(0.0, h)]]
    }

    /// Qubits: 0 control, 1 target, 2 and 3 ancillas.
    fn product(ctrl: [Complex64; 2], tgt: [Complex64; 2]) -> QubitRegister {
        let mut amps = vec![c(0.0, 0.0); 16];
        for i in 0..2 {
            for j in 0..2 {
                amps[i | (j << 1)] = ctrl[i] * tgt[j];
            }
        }
        QubitRegister::from_amplitudes(amps).unwrap()
    }

    fn max_diff(a: &QubitRegister, b: &QubitRegister) -> f64 {
        a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn matches_direct_cnot_on_all_branches() {
        let mut rng = stream_rng(5, 0);
        for ctrl in pauli_inputs() {
            for tgt in pauli_inputs() {
                let mut direct = product(ctrl, tgt);
                direct.cnot(0, 1);
                for m1 in [false, true] {
                    for m2 in [false, true] {
                        let mut reg = product(ctrl, tgt);
                        let mut pool = BellPairPool::new(1, 2, 3);
                        let rec = teleported_cnot_with(&mut reg, 0, 1, &mut pool, Outcomes::Forced(m1, m2), &mut rng)
                            .unwrap();
                        assert_eq!((rec.m1, rec.m2), (m1, m2));
                        assert_eq!((pool.consumed, pool.available), (1, 0));
                        assert!(max_diff(&reg, &direct) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn truth_table_and_bell_state() {
        let mut rng = stream_rng(6, 0);
        let mut reg = product([c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        let mut pool = BellPairPool::new(1, 2, 3);
        teleported_cnot(&mut reg, 0, 1, &mut pool, &mut rng).unwrap();
        assert!((reg.amplitudes()[0b11] - c(1.0, 0.0)).norm() < 1e-12);

        let h = FRAC_1_SQRT_2;
        let mut reg = product([c(h, 0.0), c(h, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        let mut pool = BellPairPool::new(1, 2, 3);
        teleported_cnot(&mut reg, 0, 1, &mut pool, &mut rng).unwrap();
        assert!((reg.amplitudes()[0b00] - c(h, 0.0)).norm() < 1e-12);
        assert!((reg.amplitudes()[0b11] - c(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn involution_consumes_two_pairs() {
        let mut rng = stream_rng(7, 0);
        for ctrl in pauli_inputs() {
            for tgt in pauli_inputs() {
                let start = product(ctrl, tgt);
                let mut reg = start.clone();
                let mut pool = BellPairPool::new(2, 2, 3);
                teleported_cnot(&mut reg, 0, 1, &mut pool, &mut rng).unwrap();
                teleported_cnot(&mut reg, 0, 1, &mut pool, &mut rng).unwrap();
                assert_eq!(pool.consumed, 2);
                assert!(max_diff(&reg, &start) < 1e-12);
            }
        }
    }

    #[test]
    fn empty_pool_errors() {
        let mut rng = stream_rng(8, 0);
        let mut reg = QubitRegister::zeros(4);
        let mut pool = BellPairPool::new(0, 2, 3);
        assert!(matches!(teleported_cnot(&mut reg, 0, 1, &mut pool, &mut rng), Err(Error::NoBellPair)));
    }
}
