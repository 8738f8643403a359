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

//! Memory registers and binary time-bin codewords.

use serde::{Deserialize, Serialize};

use crate::photon_state::{m_bar, Site};

/// Register layout for `K` modes and `M` time bins.
///
/// Each site holds a `M̄ × K` grid of memory qubits indexed by digit
/// `k ∈ 1..=M̄` and column `i ∈ 0..K`; one Bell pair serves each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryLayout {
    modes: usize,
    bins: usize,
    m_bar: usize,
}

impl MemoryLayout {
    pub fn new(modes: usize, bins: usize) -> Self {
        assert!(modes >= 1 && bins >= 1);
        Self { modes, bins, m_bar: m_bar(bins) }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn m_bar(&self) -> usize {
        self.m_bar
    }

    /// `2 K M̄`.
    pub fn memory_qubits(&self) -> usize {
        2 * self.bell_pairs()
    }

    /// `K M̄`.
    pub fn bell_pairs(&self) -> usize {
        self.modes * self.m_bar
    }

    /// `2 K M`.
    pub fn photonic_modes(&self) -> usize {
        2 * self.modes * self.bins
    }

    /// Grid cell of digit `k` (1-based) in column `i`.
    pub fn cell(&self, digit: usize, column: usize) -> usize {
        debug_assert!((1..=self.m_bar).contains(&digit) && column < self.modes);
        column * self.m_bar + digit - 1
    }

    /// Inverse of [`cell`](Self::cell).
    pub fn digit_column(&self, cell: usize) -> (usize, usize) {
        (cell % self.m_bar + 1, cell / self.m_bar)
    }

    /// Photonic mode of `(site, bin, q)`, bins 1-based.
    pub fn photonic_index(&self, site: Site, bin: usize, mode: usize) -> usize {
        debug_assert!((1..=self.bins).contains(&bin) && mode < self.modes);
        (site.index() * self.bins + bin - 1) * self.modes + mode
    }

    pub fn codeword(&self, bin: usize) -> BinaryCodeword {
        BinaryCodeword::new(self.m_bar, bin)
    }
}

/// Binary digits `w_k` of a time-bin number, `k = 1` least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryCodeword {
    m_bar: usize,
    value: usize,
}

impl BinaryCodeword {
    pub fn new(m_bar: usize, value: usize) -> Self {
        assert!(value < 1 << m_bar, "{value} does not fit in {m_bar} digits");
        Self { m_bar, value }
    }

    /// Rebuilds the value from digits `w_1..w_M̄`.
    pub fn from_digits(digits: &[bool]) -> Self {
        let value = digits.iter().enumerate().map(|(k, &w)| usize::from(w) << k).sum();
        Self { m_bar: digits.len(), value }
    }

    pub fn value(&self) -> usize {
        self.value
    }

    /// Digit `w_k`, `k` 1-based.
    pub fn digit(&self, k: usize) -> bool {
        assert!((1..=self.m_bar).contains(&k));
        self.value >> (k - 1) & 1 == 1
    }

    pub fn digits(&self) -> Vec<bool> {
        (1..=self.m_bar).map(|k| self.digit(k)).collect()
    }

    /// Digits equal to one, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.m_bar).filter(|&k| self.digit(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn five_is_one_zero_one() {
        let w = BinaryCodeword::new(3, 5);
        assert_eq!(w.digits(), vec![true, false, true]);
        let w = BinaryCodeword::new(6, 5);
        assert!(w.digit(1) && !w.digit(2) && w.digit(3));
        assert!((4..=6).all(|k| !w.digit(k)));
    }

    #[test]
    fn layout_counts() {
        let l = MemoryLayout::new(2, 7);
        assert_eq!(l.m_bar(), 3);
        assert_eq!(l.memory_qubits(), 12);
        assert_eq!(l.bell_pairs(), 6);
        assert_eq!(l.photonic_modes(), 28);
        let mut seen = vec![false; l.photonic_modes()];
        for site in Site::BOTH {
            for bin in 1..=7 {
                for q in 0..2 {
                    let i = l.photonic_index(site, bin, q);
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn codeword_roundtrip(m_bar in 1usize..10, raw in 0usize..1024) {
            let value = raw % (1 << m_bar);
            let w = BinaryCodeword::new(m_bar, value);
            prop_assert_eq!(BinaryCodeword::from_digits(&w.digits()).value(), value);
            let sum: usize = w.ones().map(|k| 1 << (k - 1)).sum();
            prop_assert_eq!(sum, value);
        }

        #[test]
        fn cell_roundtrip(k in 1usize..8, bins in 1usize..64, c in 0usize..64) {
            let l = MemoryLayout::new(k, bins);
            let cell = c % l.bell_pairs();
            let (digit, column) = l.digit_column(cell);
            prop_assert_eq!(l.cell(digit, column), cell);
        }
    }
}
