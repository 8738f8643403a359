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

//! Bell-pair parity checks and the final GHZ-type measurement.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encode::MemoryState;
use super::layout::MemoryLayout;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::photon_state::Site;

/// Even (`0`) or odd (`1`) parity of every Bell pair, indexed by
/// [`MemoryLayout::cell`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityPattern {
    odd: Bits,
}

impl ParityPattern {
    pub fn all_even(layout: &MemoryLayout) -> Self {
        Self { odd: Bits::zeros(layout.bell_pairs()) }
    }

    /// Pattern produced by an excitation in `(bin, mode)`.
    pub fn for_excitation(layout: &MemoryLayout, bin: usize, mode: usize) -> Self {
        let mut odd = Bits::zeros(layout.bell_pairs());
        for k in layout.codeword(bin).ones() {
            odd.set(layout.cell(k, mode), true);
        }
        Self { odd }
    }

    pub fn from_bits(odd: Bits) -> Self {
        Self { odd }
    }

    pub fn bits(&self) -> &Bits {
        &self.odd
    }

    pub fn n_odd(&self) -> usize {
        self.odd.count_ones()
    }

    /// `(bin, mode)` encoded by the odd pairs, or `None` if all are even.
    pub fn decode(&self, layout: &MemoryLayout) -> Result<Option<(usize, usize)>> {
        if self.odd.len() != layout.bell_pairs() {
            return Err(Error::DimensionMismatch { expected: layout.bell_pairs(), actual: self.odd.len() });
        }
        let mut column = None;
        let mut bin = 0;
        for cell in self.odd.ones() {
            let (k, i) = layout.digit_column(cell);
            match column {
                None => column = Some(i),
                Some(c) if c != i => {
                    return Err(Error::InconsistentParity(format!("odd pairs in columns {c} and {i}")))
                }
                _ => {}
            }
            bin |= 1 << (k - 1);
        }
        match column {
            None => Ok(None),
            Some(_) if bin > layout.bins() => {
                Err(Error::InconsistentParity(format!("decoded bin {bin} exceeds {}", layout.bins())))
            }
            Some(i) => Ok(Some((bin, i))),
        }
    }
}

/// Memory state after the parity checks: `a_B |0_E 1_F⟩ + a_A |1_E 0_F⟩`
/// on the `N_m` surviving pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collapsed {
    pub bin: usize,
    pub mode: usize,
    pub n_m: usize,
    pub amp_a: Complex64,
    pub amp_b: Complex64,
}

/// Every possible parity pattern with its probability and the collapsed
/// memory state it leaves.
pub fn parity_outcomes(mem: &MemoryState, layout: &MemoryLayout) -> Vec<(ParityPattern, f64, Option<Collapsed>)> {
    if mem.is_vacuum() {
        return vec![(ParityPattern::all_even(layout), 1.0, None)];
    }
    // group by (bin, mode); both sites flip the same pairs
    let mut groups: Vec<(usize, usize, Complex64, Complex64)> = Vec::new();
    for b in &mem.branches {
        let slot = match groups.iter().position(|g| g.0 == b.bin && g.1 == b.mode) {
            Some(i) => i,
            None => {
                groups.push((b.bin, b.mode, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
                groups.len() - 1
            }
        };
        match b.site {
            Site::A => groups[slot].2 += b.amplitude,
            Site::B => groups[slot].3 += b.amplitude,
        }
    }
    groups
        .into_iter()
        .filter_map(|(bin, mode, a, b)| {
            let p = a.norm_sqr() + b.norm_sqr();
            if p == 0.0 {
                return None;
            }
            let n = p.sqrt();
            let pattern = ParityPattern::for_excitation(layout, bin, mode);
            let n_m = pattern.n_odd();
            Some((pattern, p, Some(Collapsed { bin, mode, n_m, amp_a: a / n, amp_b: b / n })))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeRecord {
    pub pattern: ParityPattern,
    pub collapsed: Option<Collapsed>,
}

/// Samples the parity checks.
pub fn decode_parity<R: Rng + ?Sized>(mem: &MemoryState, layout: &MemoryLayout, rng: &mut R) -> Result<DecodeRecord> {
    let outcomes = parity_outcomes(mem, layout);
    let total: f64 = outcomes.iter().map(|o| o.1).sum();
    let mut u = rng.random::<f64>() * total;
    let last = outcomes.len() - 1;
    for (i, (pattern, p, collapsed)) in outcomes.into_iter().enumerate() {
        if u < p || i == last {
            // the decoded pattern must point back at the collapsed excitation
            let decoded = pattern.decode(layout)?;
            debug_assert_eq!(decoded, collapsed.map(|c| (c.bin, c.mode)));
            return Ok(DecodeRecord { pattern, collapsed });
        }
        u -= p;
    }
    unreachable!("parity outcome list is never empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Zeta {
    Plus,
    Minus,
}

/// Symmetric (`Plus`) or antisymmetric (`Minus`) combination of the two
/// sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhiSign {
    Plus,
    Minus,
}

impl PhiSign {
    pub fn index(self) -> usize {
        match self {
            PhiSign::Plus => 0,
            PhiSign::Minus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PhiSign::Plus => '+',
            PhiSign::Minus => '-',
        }
    }
}

/// `ζ` read as `φ`: unchanged for `f = +1`, swapped for `f = −1`.
pub fn phi_label(zeta: Zeta, f: f64) -> PhiSign {
    match (zeta, f > 0.0) {
        (Zeta::Plus, true) | (Zeta::Minus, false) => PhiSign::Plus,
        _ => PhiSign::Minus,
    }
}

/// X outcomes of the `E` (site A) and `F` (site B) memories, one bit per
/// surviving pair, `1` for `−`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EfString {
    pub e: Bits,
    pub f: Bits,
}

impl EfString {
    pub fn empty() -> Self {
        Self { e: Bits::zeros(0), f: Bits::zeros(0) }
    }

    /// Pairs whose two outcomes differ.
    pub fn odd_pairs(&self) -> usize {
        (0..self.e.len()).filter(|&i| self.e.get(i) != self.f.get(i)).count()
    }

    /// Even number of odd pairs means `ζ+`.
    pub fn zeta(&self) -> Zeta {
        if self.odd_pairs() % 2 == 0 {
            Zeta::Plus
        } else {
            Zeta::Minus
        }
    }

    /// `e_1 f_1 e_2 f_2 ...` as one bit string.
    pub fn interleaved(&self) -> Bits {
        let n = self.e.len();
        let mut b = Bits::zeros(2 * n);
        for i in 0..n {
            b.set(2 * i, self.e.get(i));
            b.set(2 * i + 1, self.f.get(i));
        }
        b
    }
}

/// Probability of a full EF outcome string:
/// `4^{−N} |a_B + (−1)^{n_odd} a_A|²`.
pub fn ef_string_probability(c: &Collapsed, ef: &EfString) -> f64 {
    let sign = if ef.odd_pairs() % 2 == 0 { 1.0 } else { -1.0 };
    0.25f64.powi(c.n_m as i32) * (c.amp_b + c.amp_a * sign).norm_sqr()
}

/// `|c_±|²`: probabilities of `ζ+` and `ζ−`.
pub fn zeta_probabilities(c: &Collapsed) -> (f64, f64) {
    let plus = (c.amp_b + c.amp_a).norm_sqr() / 2.0;
    let minus = (c.amp_b - c.amp_a).norm_sqr() / 2.0;
    (plus, minus)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzOutcome {
    pub zeta: Zeta,
    pub ef: EfString,
    pub label: PhiSign,
}

/// Samples `ζ±` and an EF string uniformly among those of the right parity.
pub fn ghz_measure<R: Rng + ?Sized>(c: &Collapsed, f: f64, rng: &mut R) -> GhzOutcome {
    assert!(c.n_m >= 1, "GHZ measurement needs at least one pair");
    let (plus, minus) = zeta_probabilities(c);
    let zeta = if rng.random::<f64>() * (plus + minus) < plus { Zeta::Plus } else { Zeta::Minus };
    let e = Bits::random(c.n_m, rng);
    let mut fb = Bits::random(c.n_m, rng);
    let mut ef = EfString { e, f: fb.clone() };
    if ef.zeta() != zeta {
        fb.set(0, !fb.get(0));
        ef.f = fb;
    }
    GhzOutcome { zeta, ef, label: phi_label(zeta, f) }
}

/// All `4^N` EF strings on `N` pairs.
pub fn all_ef_strings(n: usize) -> impl Iterator<Item = EfString> {
    assert!(n <= 16);
    (0u64..1 << (2 * n)).map(move |v| EfString { e: Bits::from_u64(n, v), f: Bits::from_u64(n, v >> n) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn collapsed(phase: f64, f: f64, n_m: usize) -> Collapsed {
        Collapsed {
            bin: 1,
            mode: 0,
            n_m,
            amp_a: Complex64::from_polar(FRAC_1_SQRT_2, -phase) * f,
            amp_b: Complex64::from_polar(FRAC_1_SQRT_2, phase),
        }
    }

    #[test]
    fn appendix_example() {
        // (+,−), (−,+), (+,+): two odd pairs
        let ef = EfString { e: Bits::parse("010").unwrap(), f: Bits::parse("100").unwrap() };
        assert_eq!(ef.odd_pairs(), 2);
        assert_eq!(ef.zeta(), Zeta::Plus);
    }

    #[test]
    fn pattern_decoding() {
        let l = MemoryLayout::new(3, 7);
        for bin in 1..=7 {
            for q in 0..3 {
                let p = ParityPattern::for_excitation(&l, bin, q);
                assert_eq!(p.decode(&l).unwrap(), Some((bin, q)));
            }
        }
        assert_eq!(ParityPattern::all_even(&l).decode(&l).unwrap(), None);
        let mut bad = ParityPattern::for_excitation(&l, 1, 0).odd;
        bad.set(l.cell(1, 2), true);
        assert!(matches!(ParityPattern::from_bits(bad).decode(&l), Err(Error::InconsistentParity(_))));
        // bin 6 in a 5-bin layout
        let l5 = MemoryLayout::new(1, 5);
        let over = ParityPattern::from_bits(Bits::parse("011").unwrap());
        assert!(over.decode(&l5).is_err());
    }

    #[test]
    fn ef_probabilities_sum_to_zeta_probabilities() {
        for n in 1..=4 {
            for (phase, f) in [(0.0, 1.0), (0.4, -1.0), (1.3, 1.0)] {
                let c = collapsed(phase, f, n);
                let (mut plus, mut minus) = (0.0, 0.0);
                for ef in all_ef_strings(n) {
                    match ef.zeta() {
                        Zeta::Plus => plus += ef_string_probability(&c, &ef),
                        Zeta::Minus => minus += ef_string_probability(&c, &ef),
                    }
                }
                let (zp, zm) = zeta_probabilities(&c);
                assert!((plus - zp).abs() < 1e-14 && (minus - zm).abs() < 1e-14);
                let cp = (Complex64::from_polar(1.0, phase) + f * Complex64::from_polar(1.0, -phase)) / 2.0;
                assert!((zp - cp.norm_sqr()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn labels_at_zero_phase() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let g = ghz_measure(&collapsed(0.0, 1.0, 2), 1.0, &mut rng);
            assert_eq!((g.zeta, g.label), (Zeta::Plus, PhiSign::Plus));
            let g = ghz_measure(&collapsed(0.0, -1.0, 3), -1.0, &mut rng);
            assert_eq!((g.zeta, g.label), (Zeta::Minus, PhiSign::Plus));
            assert_eq!(g.ef.zeta(), Zeta::Minus);
        }
    }

    #[test]
    fn parity_outcomes_vacuum_and_weights() {
        let l = MemoryLayout::new(2, 3);
        let out = parity_outcomes(&MemoryState::vacuum(), &l);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, ParityPattern::all_even(&l));
    }
}
