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

//! End-to-end protocol runs and their exact outcome distribution.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::decode::{
    all_ef_strings, decode_parity, ef_string_probability, ghz_measure, parity_outcomes, phi_label, EfString,
    ParityPattern, PhiSign,
};
use super::encode::{encode_with, MemoryState, PhotonicXRecord};
use super::layout::MemoryLayout;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::optics::{eta, ApertureGeometry, ModalBasis};
use crate::photon_state::{
    branches_from_eta, sample_arrival, Arrival, MixedArrivalModel, PhotonBranch, Star, TwoPointScene,
};

/// Result of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    NoPhoton,
    NotCaptured,
    Detection { bin: usize, mode: usize, sign: PhiSign },
}

impl Outcome {
    /// What the hardware sees: a lost photon looks like vacuum.
    pub fn as_observed(self) -> Outcome {
        match self {
            Outcome::NotCaptured => Outcome::NoPhoton,
            o => o,
        }
    }
}

/// Everything recorded during one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub arrival: Arrival,
    pub h: PhotonicXRecord,
    pub pattern: ParityPattern,
    pub ef: EfString,
    pub outcome: Outcome,
}

/// Precomputed inputs for repeated runs.
#[derive(Debug, Clone)]
pub struct ProtocolSetup {
    scene: TwoPointScene,
    geom: ApertureGeometry,
    basis: ModalBasis,
    layout: MemoryLayout,
    eta: [Vec<f64>; 2],
    model: MixedArrivalModel,
}

impl ProtocolSetup {
    pub fn new(scene: TwoPointScene, geom: ApertureGeometry, basis: ModalBasis) -> Result<Self> {
        let eta = [eta(&geom, &basis, scene.position(Star::One))?, eta(&geom, &basis, scene.position(Star::Two))?];
        let model = MixedArrivalModel::new(&scene, &geom, &basis)?;
        let layout = MemoryLayout::new(basis.k(), scene.bins());
        Ok(Self { scene, geom, basis, layout, eta, model })
    }

    pub fn scene(&self) -> &TwoPointScene {
        &self.scene
    }

    pub fn geometry(&self) -> &ApertureGeometry {
        &self.geom
    }

    pub fn basis(&self) -> &ModalBasis {
        &self.basis
    }

    pub fn layout(&self) -> &MemoryLayout {
        &self.layout
    }

    pub fn model(&self) -> &MixedArrivalModel {
        &self.model
    }

    /// Projected photon state for an arrival in `bin` from `star`.
    pub fn branches(&self, star: Star, bin: usize) -> Vec<PhotonBranch> {
        let phase = self.geom.beta() * self.scene.position(star);
        branches_from_eta(&self.eta[star.index()], phase, star, bin)
    }
}

pub fn run_protocol<R: Rng + ?Sized>(setup: &ProtocolSetup, rng: &mut R) -> Outcome {
    run_protocol_traced(setup, rng).outcome
}

pub fn run_protocol_traced<R: Rng + ?Sized>(setup: &ProtocolSetup, rng: &mut R) -> Trace {
    let layout = setup.layout;
    let arrival = sample_arrival(&setup.model, rng);
    let h = PhotonicXRecord::sample(layout, rng);
    let quiet = |outcome| Trace {
        arrival,
        h: h.clone(),
        pattern: ParityPattern::all_even(&layout),
        ef: EfString::empty(),
        outcome,
    };
    let (star, bin) = match arrival {
        Arrival::Vacuum => return quiet(Outcome::NoPhoton),
        Arrival::NotCaptured { .. } => return quiet(Outcome::NotCaptured),
        Arrival::Photon { star, bin } => (star, bin),
    };
    let mem = encode_with(&setup.branches(star, bin), &h);
    let decoded = decode_parity(&mem, &layout, rng).expect("parity patterns from the encoder are consistent");
    let c = decoded.collapsed.expect("a captured photon always flips at least one pair");
    debug_assert_eq!(c.bin, bin);
    let ghz = ghz_measure(&c, h.f(c.bin, c.mode), rng);
    Trace {
        arrival,
        h,
        pattern: decoded.pattern,
        ef: ghz.ef,
        outcome: Outcome::Detection { bin: c.bin, mode: c.mode, sign: ghz.label },
    }
}

/// Joint outcome of one run as seen by the classical record keeper.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeKey {
    pub h: Bits,
    pub pattern: Bits,
    /// Interleaved `e_1 f_1 e_2 f_2 ...`.
    pub ef: Bits,
    pub outcome: Outcome,
}

impl From<&Trace> for OutcomeKey {
    fn from(t: &Trace) -> Self {
        Self { h: t.h.bits().clone(), pattern: t.pattern.bits().clone(), ef: t.ef.interleaved(), outcome: t.outcome }
    }
}

/// Probability table over [`OutcomeKey`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Distribution {
    pub probs: HashMap<OutcomeKey, f64>,
}

impl Distribution {
    pub fn add(&mut self, key: OutcomeKey, p: f64) {
        if p != 0.0 {
            *self.probs.entry(key).or_insert(0.0) += p;
        }
    }

    pub fn merge(&mut self, other: Distribution) {
        for (k, p) in other.probs {
            self.add(k, p);
        }
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.probs.values().copied())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Marginal over final outcomes.
    pub fn outcomes(&self) -> HashMap<Outcome, f64> {
        let mut m = HashMap::new();
        for (k, p) in &self.probs {
            *m.entry(k.outcome).or_insert(0.0) += p;
        }
        m
    }

    /// Marginal probability that photonic bit `i` reads `−`.
    pub fn h_bit_marginal(&self, i: usize) -> f64 {
        self.probs.iter().filter(|(k, _)| k.h.get(i)).map(|(_, p)| p).sum()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let common = self.probs.iter().map(|(k, p)| (p - other.probs.get(k).copied().unwrap_or(0.0)).abs());
        let extra = other.probs.iter().filter(|(k, _)| !self.probs.contains_key(k)).map(|(_, q)| q.abs());
        0.5 * compensated_sum(common.chain(extra))
    }
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + c
}

/// Largest photonic register the exact enumeration accepts.
pub const MAX_ENUMERATED_PHOTONIC_MODES: usize = 20;

/// Exact joint distribution assembled from the stage functions.
pub fn exact_distribution(setup: &ProtocolSetup) -> Result<Distribution> {
    let layout = setup.layout;
    let n_h = layout.photonic_modes();
    if n_h > MAX_ENUMERATED_PHOTONIC_MODES {
        return Err(Error::OracleTooLarge(format!("2^{n_h} photonic records")));
    }
    let p_h = PhotonicXRecord::probability(&layout);
    let model = &setup.model;
    let even = ParityPattern::all_even(&layout).bits().clone();
    let empty = Bits::zeros(0);
    let mut dist = Distribution::default();
    for hv in 0u64..1 << n_h {
        let h = PhotonicXRecord::new(layout, Bits::from_u64(n_h, hv));
        let quiet = |outcome| OutcomeKey { h: h.bits().clone(), pattern: even.clone(), ef: empty.clone(), outcome };
        dist.add(quiet(Outcome::NoPhoton), p_h * model.p_vacuum());
        for star in Star::BOTH {
            let capture = model.capture[star.index()];
            for bin in 1..=layout.bins() {
                let w = p_h * model.epsilon * 0.5;
                dist.add(quiet(Outcome::NotCaptured), w * (1.0 - capture));
                let mem = encode_with(&setup.branches(star, bin), &h);
                add_decoded(&mut dist, &mem, &layout, &h, w * capture);
            }
        }
    }
    Ok(dist)
}

fn add_decoded(dist: &mut Distribution, mem: &MemoryState, layout: &MemoryLayout, h: &PhotonicXRecord, w: f64) {
    for (pattern, p, collapsed) in parity_outcomes(mem, layout) {
        let Some(c) = collapsed else { continue };
        let f = h.f(c.bin, c.mode);
        for ef in all_ef_strings(c.n_m) {
            let pe = ef_string_probability(&c, &ef);
            let sign = phi_label(ef.zeta(), f);
            let key = OutcomeKey {
                h: h.bits().clone(),
                pattern: pattern.bits().clone(),
                ef: ef.interleaved(),
                outcome: Outcome::Detection { bin: c.bin, mode: c.mode, sign },
            };
            dist.add(key, w * p * pe);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon_state::target_probabilities;
    use crate::rng::stream_rng;

    fn setup(theta: f64, r: f64, k: usize, eps: f64, bins: usize) -> ProtocolSetup {
        let g = ApertureGeometry::from_rayleigh(1.0, r).unwrap();
        let b = ModalBasis::sinc_bessel(k, &g).unwrap();
        ProtocolSetup::new(TwoPointScene::new(theta, eps, bins).unwrap(), g, b).unwrap()
    }

    #[test]
    fn exact_distribution_is_normalized_and_matches_targets() {
        let s = setup(0.2, 2.0, 2, 0.3, 3);
        let d = exact_distribution(&s).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12, "{} {:?}", d.total(), d.outcomes());
        let target = target_probabilities(s.geometry(), s.basis(), 0.2).unwrap();
        let marg = d.outcomes();
        let detected: f64 = marg.iter().filter(|(o, _)| matches!(o, Outcome::Detection { .. })).map(|(_, p)| p).sum();
        for q in 0..2 {
            for sign in [PhiSign::Plus, PhiSign::Minus] {
                let p: f64 = marg
                    .iter()
                    .filter(
                        |(o, _)| matches!(o, Outcome::Detection { mode, sign: s2, .. } if *mode == q && *s2 == sign),
                    )
                    .map(|(_, p)| p)
                    .sum();
                assert!((p / detected - target[q][sign.index()]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn h_marginals_are_uniform() {
        let s = setup(0.35, 1.0, 1, 1.0, 1);
        let d = exact_distribution(&s).unwrap();
        for i in 0..s.layout().photonic_modes() {
            assert!((d.h_bit_marginal(i) - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn f_consistency_of_traces() {
        let s = setup(0.27, 1.5, 3, 0.2, 5);
        let mut rng = stream_rng(11, 0);
        for _ in 0..5000 {
            let t = run_protocol_traced(&s, &mut rng);
            if let Outcome::Detection { bin, mode, sign } = t.outcome {
                assert_eq!(t.pattern.decode(s.layout()).unwrap(), Some((bin, mode)));
                assert_eq!(phi_label(t.ef.zeta(), t.h.f(bin, mode)), sign);
                assert_eq!(t.ef.e.len(), t.pattern.n_odd());
            } else {
                assert_eq!(t.pattern.n_odd(), 0);
            }
        }
    }

    #[test]
    fn no_symmetric_detections_at_quarter_period() {
        let s = setup(0.5, 1.0, 3, 0.25, 4);
        let mut rng = stream_rng(12, 0);
        for _ in 0..5000 {
            let o = run_protocol(&s, &mut rng);
            assert!(!matches!(o, Outcome::Detection { sign: PhiSign::Plus, .. }));
        }
    }

    #[test]
    fn no_antisymmetric_detections_without_baseline() {
        let s = setup(0.3, 0.0, 3, 0.25, 4);
        let mut rng = stream_rng(13, 0);
        for _ in 0..5000 {
            let o = run_protocol(&s, &mut rng);
            assert!(!matches!(o, Outcome::Detection { sign: PhiSign::Minus, .. }));
        }
    }

    #[test]
    fn centred_sources_use_mode_zero() {
        let s = setup(0.0, 1.0, 4, 0.25, 4);
        let mut rng = stream_rng(14, 0);
        for _ in 0..2000 {
            if let Outcome::Detection { mode, .. } = run_protocol(&s, &mut rng) {
                assert_eq!(mode, 0);
            }
        }
    }

    #[test]
    fn enumeration_size_is_limited() {
        let s = setup(0.1, 1.0, 4, 0.1, 3);
        assert!(matches!(exact_distribution(&s), Err(Error::OracleTooLarge(_))));
    }
}
