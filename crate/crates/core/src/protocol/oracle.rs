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

//! Brute-force state-vector reference for small instances.
//!
//! Photonic modes, memories and Bell ancillas are all explicit qubits. The
//! circuit is built from generic CNOT, CZ and Hadamard gates, and every
//! measurement is enumerated by projection, so none of the branch algebra
//! used by the fast simulator is reused here. Only the classical
//! post-processing (reading `m`, `q` from the parity pattern and the label
//! from the EF parities) is shared.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::decode::{phi_label, EfString, ParityPattern};
use super::encode::PhotonicXRecord;
use super::layout::MemoryLayout;
use super::simulate::{Distribution, Outcome, OutcomeKey, ProtocolSetup};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::photon_state::{PhotonBranch, Site, Star};

/// Largest restricted Hilbert space the oracle will build.
pub const MAX_ORACLE_DIMENSION: u64 = 1 << 24;

/// Weight below which a measurement branch is discarded.
const NEGLIGIBLE: f64 = 1e-30;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseState {
    amps: HashMap<u64, Complex64>,
}

impl SparseState {
    pub fn basis(index: u64) -> Self {
        let mut amps = HashMap::new();
        amps.insert(index, Complex64::new(1.0, 0.0));
        Self { amps }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u64, Complex64)>) -> Self {
        let mut s = Self::default();
        for (k, a) in terms {
            *s.amps.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1u64 << control, 1u64 << target);
        self.amps = self.amps.drain().map(|(k, a)| (if k & c != 0 { k ^ t } else { k }, a)).collect();
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let m = (1u64 << a) | (1u64 << b);
        for (k, v) in self.amps.iter_mut() {
            if k & m == m {
                *v = -*v;
            }
        }
    }

    pub fn hadamard(&mut self, q: usize) {
        let bit = 1u64 << q;
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(2 * self.amps.len());
        for (k, a) in self.amps.drain() {
            let a = a * FRAC_1_SQRT_2;
            let (lo, hi) = (k & !bit, k | bit);
            *out.entry(lo).or_default() += a;
            *out.entry(hi).or_default() += if k & bit != 0 { -a } else { a };
        }
        out.retain(|_, a| a.norm_sqr() > 0.0);
        self.amps = out;
    }

    /// Unnormalized projection of qubit `q` onto `|value⟩`.
    pub fn project(&self, q: usize, value: bool) -> SparseState {
        let bit = 1u64 << q;
        let amps = self.amps.iter().filter(|(k, _)| (*k & bit != 0) == value).map(|(k, a)| (*k, *a)).collect();
        SparseState { amps }
    }

    /// All X-basis outcomes on `qubits` with their unnormalized
    /// post-measurement states; outcome bit `1` means `−`.
    pub fn measure_x(&self, qubits: &[usize]) -> Vec<(Bits, SparseState)> {
        let mut out = Vec::new();
        let mut bits = Bits::zeros(qubits.len());
        self.measure_rec(qubits, 0, &mut bits, &mut out, false);
        out
    }

    /// Same as [`measure_x`](Self::measure_x) in the computational basis.
    pub fn measure_z(&self, qubits: &[usize]) -> Vec<(Bits, SparseState)> {
        let mut out = Vec::new();
        let mut bits = Bits::zeros(qubits.len());
        self.measure_rec(qubits, 0, &mut bits, &mut out, true);
        out
    }

    /// Parity measurement of `X_a X_b` on each pair, via `H_a H_b CNOT(a→b)`
    /// and a Z readout of `b`. Outcome bit `1` means odd. The individual X
    /// outcomes are not resolved; later measurements on other qubits have
    /// the same statistics either way.
    pub fn measure_xx_parity(&self, pairs: &[(usize, usize)]) -> Vec<(Bits, SparseState)> {
        let mut rotated = self.clone();
        for &(a, b) in pairs {
            rotated.hadamard(a);
            rotated.hadamard(b);
            rotated.cnot(a, b);
        }
        let targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        rotated.measure_z(&targets)
    }

    fn measure_rec(&self, qubits: &[usize], i: usize, bits: &mut Bits, out: &mut Vec<(Bits, SparseState)>, z: bool) {
        if i == qubits.len() {
            out.push((bits.clone(), self.clone()));
            return;
        }
        let mut rotated = self.clone();
        if !z {
            rotated.hadamard(qubits[i]);
        }
        for value in [false, true] {
            let branch = rotated.project(qubits[i], value);
            if branch.norm_sqr() > NEGLIGIBLE {
                bits.set(i, value);
                branch.measure_rec(qubits, i + 1, bits, out, z);
            }
        }
        bits.set(i, false);
    }
}

/// Qubit numbering: photonic modes, then memories, then Bell ancillas.
#[derive(Debug, Clone, Copy)]
struct Registers {
    layout: MemoryLayout,
}

impl Registers {
    fn photonic(&self, site: Site, bin: usize, mode: usize) -> usize {
        self.layout.photonic_index(site, bin, mode)
    }

    fn memory(&self, site: Site, cell: usize) -> usize {
        self.layout.photonic_modes() + site.index() * self.layout.bell_pairs() + cell
    }

    fn ancilla(&self, site: Site, cell: usize) -> usize {
        self.layout.photonic_modes() + self.layout.memory_qubits() + site.index() * self.layout.bell_pairs() + cell
    }

    fn total(&self) -> usize {
        self.layout.photonic_modes() + 2 * self.layout.memory_qubits()
    }

    fn photonic_all(&self) -> Vec<usize> {
        (0..self.layout.photonic_modes()).collect()
    }

    /// `(C, D)` qubits of every Bell pair, in cell order.
    fn ancilla_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.layout.bell_pairs()).map(|c| (self.ancilla(Site::A, c), self.ancilla(Site::B, c))).collect()
    }
}

/// Measurement ordering used by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Photonic qubits measured right after the CNOT map, as in the
    /// physical protocol.
    Chronological,
    /// Ancillas measured before the photonic qubits; equivalent because the
    /// operations act on disjoint qubits, and much cheaper to enumerate.
    Deferred,
}

/// Dimension of the oracle's Hilbert space restricted to at most one
/// photonic excitation.
pub fn oracle_dimension(layout: &MemoryLayout) -> u64 {
    let photon = layout.photonic_modes() as u64 + 1;
    photon.saturating_mul(1u64 << layout.memory_qubits().min(40)).saturating_mul(1u64 << layout.memory_qubits().min(40))
}

/// Exact joint outcome distribution by state-vector simulation.
pub fn oracle_statevector(setup: &ProtocolSetup) -> Result<Distribution> {
    oracle_with_ordering(setup, Ordering::Deferred)
}

pub fn oracle_with_ordering(setup: &ProtocolSetup, ordering: Ordering) -> Result<Distribution> {
    let layout = *setup.layout();
    let regs = Registers { layout };
    let dim = oracle_dimension(&layout);
    if regs.total() > 64 || dim > MAX_ORACLE_DIMENSION {
        return Err(Error::OracleTooLarge(format!(
            "K={}, M={} needs {} qubits and dimension {dim}",
            layout.modes(),
            layout.bins(),
            regs.total()
        )));
    }
    let model = setup.model();
    let mut dist = Distribution::default();

    if model.p_vacuum() > 0.0 {
        let vac = run_component(&regs, &[], ordering)?;
        scale_into(&mut dist, vac, model.p_vacuum());
    }

    for star in Star::BOTH {
        let capture = model.capture[star.index()];
        for bin in 1..=layout.bins() {
            let w = model.epsilon * 0.5;
            // a photon outside the retained modes never touches the circuit
            let n_h = layout.photonic_modes();
            let p_h = PhotonicXRecord::probability(&layout);
            let even = ParityPattern::all_even(&layout).bits().clone();
            for hv in (0u64..1 << n_h).filter(|_| w * (1.0 - capture) > 0.0) {
                let key = OutcomeKey {
                    h: Bits::from_u64(n_h, hv),
                    pattern: even.clone(),
                    ef: Bits::zeros(0),
                    outcome: Outcome::NotCaptured,
                };
                dist.add(key, w * (1.0 - capture) * p_h);
            }
            if w * capture > 0.0 {
                let d = run_component(&regs, &setup.branches(star, bin), ordering)?;
                scale_into(&mut dist, d, w * capture);
            }
        }
    }
    Ok(dist)
}

fn scale_into(dist: &mut Distribution, part: Distribution, w: f64) {
    if w == 0.0 {
        return;
    }
    for (k, p) in part.probs {
        dist.add(k, w * p);
    }
}

fn initial_state(regs: &Registers, photon: &[PhotonBranch]) -> SparseState {
    let mut state = if photon.is_empty() {
        SparseState::basis(0)
    } else {
        SparseState::from_terms(photon.iter().map(|b| (1u64 << regs.photonic(b.site, b.bin, b.mode), b.amplitude)))
    };
    for cell in 0..regs.layout.bell_pairs() {
        state.hadamard(regs.ancilla(Site::A, cell));
        state.cnot(regs.ancilla(Site::A, cell), regs.ancilla(Site::B, cell));
    }
    state
}

fn apply_u(regs: &Registers, state: &mut SparseState) {
    let l = regs.layout;
    for site in Site::BOTH {
        for bin in 1..=l.bins() {
            for q in 0..l.modes() {
                for k in l.codeword(bin).ones() {
                    state.cnot(regs.photonic(site, bin, q), regs.memory(site, l.cell(k, q)));
                }
            }
        }
    }
}

fn apply_v(regs: &Registers, state: &mut SparseState) {
    for site in Site::BOTH {
        for cell in 0..regs.layout.bell_pairs() {
            state.cz(regs.memory(site, cell), regs.ancilla(site, cell));
        }
    }
}

fn run_component(regs: &Registers, photon: &[PhotonBranch], ordering: Ordering) -> Result<Distribution> {
    let mut state = initial_state(regs, photon);
    apply_u(regs, &mut state);
    let photonic = regs.photonic_all();
    let pairs = regs.ancilla_pairs();

    let leaves: Vec<(Bits, Bits, SparseState)> = match ordering {
        Ordering::Chronological => state
            .measure_x(&photonic)
            .into_iter()
            .flat_map(|(h, mut s)| {
                apply_v(regs, &mut s);
                s.measure_xx_parity(&pairs).into_iter().map(move |(odd, s2)| (h.clone(), odd, s2))
            })
            .collect(),
        Ordering::Deferred => {
            apply_v(regs, &mut state);
            state
                .measure_xx_parity(&pairs)
                .into_iter()
                .flat_map(|(odd, s)| s.measure_x(&photonic).into_iter().map(move |(h, s2)| (h, odd.clone(), s2)))
                .collect()
        }
    };
    leaves
        .into_par_iter()
        .try_fold(Distribution::default, |mut d, (h, odd, s)| finish(regs, &h, &odd, &s, &mut d).map(|_| d))
        .try_reduce(Distribution::default, |mut a, b| {
            a.merge(b);
            Ok(a)
        })
}

/// Parity readout, EF measurement and labelling for one branch.
fn finish(regs: &Registers, h: &Bits, odd: &Bits, state: &SparseState, dist: &mut Distribution) -> Result<()> {
    let l = regs.layout;
    let n = l.bell_pairs();
    let odd = odd.clone();
    let pattern = ParityPattern::from_bits(odd.clone());
    let record = PhotonicXRecord::new(l, h.clone());
    let decoded = pattern.decode(&l)?;

    // memories of even pairs must be |0>; measure them in Z to confirm
    let even_cells: Vec<usize> = (0..n).filter(|&c| !odd.get(c)).collect();
    let even_qubits: Vec<usize> =
        Site::BOTH.iter().flat_map(|&s| even_cells.iter().map(move |&c| regs.memory(s, c))).collect();
    let odd_cells: Vec<usize> = odd.ones().collect();
    let mut ef_qubits: Vec<usize> = odd_cells.iter().map(|&c| regs.memory(Site::A, c)).collect();
    ef_qubits.extend(odd_cells.iter().map(|&c| regs.memory(Site::B, c)));

    for (z, s) in state.measure_z(&even_qubits) {
        if z.count_ones() != 0 {
            return Err(Error::InconsistentParity(format!(
                "memory excited behind an even pair (weight {:.3e})",
                s.norm_sqr()
            )));
        }
        for (x, leaf) in s.measure_x(&ef_qubits) {
            let m = odd_cells.len();
            let ef = EfString {
                e: Bits::from_bools(&(0..m).map(|i| x.get(i)).collect::<Vec<_>>()),
                f: Bits::from_bools(&(0..m).map(|i| x.get(m + i)).collect::<Vec<_>>()),
            };
            let outcome = match decoded {
                None => Outcome::NoPhoton,
                Some((bin, mode)) => Outcome::Detection { bin, mode, sign: phi_label(ef.zeta(), record.f(bin, mode)) },
            };
            let key = OutcomeKey { h: h.clone(), pattern: odd.clone(), ef: ef.interleaved(), outcome };
            dist.add(key, leaf.norm_sqr());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{ApertureGeometry, ModalBasis};
    use crate::photon_state::TwoPointScene;
    use crate::protocol::simulate::exact_distribution;

    fn setup(theta: f64, r: f64, k: usize, eps: f64, bins: usize) -> ProtocolSetup {
        let g = ApertureGeometry::from_rayleigh(1.0, r).unwrap();
        let b = ModalBasis::sinc_bessel(k, &g).unwrap();
        ProtocolSetup::new(TwoPointScene::new(theta, eps, bins).unwrap(), g, b).unwrap()
    }

    #[test]
    fn gates_behave() {
        let mut s = SparseState::basis(0b01);
        s.cnot(0, 1);
        assert_eq!(s.amplitude(0b11), Complex64::new(1.0, 0.0));
        s.cz(0, 1);
        assert_eq!(s.amplitude(0b11), Complex64::new(-1.0, 0.0));
        s.hadamard(0);
        s.hadamard(0);
        assert!((s.amplitude(0b11) + 1.0).norm() < 1e-15);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn x_measurement_of_plus_state() {
        let mut s = SparseState::basis(0);
        s.hadamard(0);
        let out = s.measure_x(&[0]);
        assert_eq!(out.len(), 1);
        assert!((out[0].1.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(!out[0].0.get(0));
    }

    #[test]
    fn vacuum_gives_no_photon() {
        let s = setup(0.2, 1.0, 2, 0.0, 3);
        let d = oracle_statevector(&s).unwrap();
        let m = d.outcomes();
        assert_eq!(m.len(), 1);
        assert!((m[&Outcome::NoPhoton] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orderings_agree() {
        let s = setup(0.3, 1.3, 1, 0.6, 1);
        let a = oracle_with_ordering(&s, Ordering::Chronological).unwrap();
        let b = oracle_with_ordering(&s, Ordering::Deferred).unwrap();
        assert!(a.total_variation(&b) < 1e-13);
    }

    #[test]
    fn matches_branch_enumeration_small() {
        for (theta, r) in [(0.0, 1.0), (0.2, 2.0), (0.5, 1.0)] {
            let s = setup(theta, r, 1, 0.7, 1);
            let a = oracle_statevector(&s).unwrap();
            let b = exact_distribution(&s).unwrap();
            assert!((a.total() - 1.0).abs() < 1e-12);
            assert!(a.total_variation(&b) < 1e-12, "theta={theta}");
        }
    }

    #[test]
    fn matches_branch_enumeration_two_modes_three_bins() {
        let s = setup(0.2, 2.0, 2, 0.3, 3);
        let a = oracle_statevector(&s).unwrap();
        let b = exact_distribution(&s).unwrap();
        assert!(a.total_variation(&b) < 1e-10);
    }

    #[test]
    fn size_limit() {
        let s = setup(0.2, 1.0, 3, 0.1, 7);
        assert!(matches!(oracle_statevector(&s), Err(Error::OracleTooLarge(_))));
    }
}
