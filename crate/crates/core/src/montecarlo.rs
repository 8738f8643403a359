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

//! Batch experiments, outcome counting and maximum-likelihood estimation
//! of the separation.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::cfi_per_detection;
use crate::optics::{eta, ApertureGeometry, ModalBasis};
use crate::protocol::PhiSign;
use crate::protocol::{run_protocol, Outcome, ProtocolSetup};
use crate::rng::stream_rng;

/// Smallest number of detections `estimate_theta` accepts.
pub const MIN_DETECTIONS: u64 = 100;

/// Trials simulated per parallel chunk.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
    pub nophoton: u64,
    pub notcaptured: u64,
    pub trials: u64,
    pub seed: u64,
}

impl CountTable {
    pub fn new(modes: usize, seed: u64) -> Self {
        Self { plus: vec![0; modes], minus: vec![0; modes], nophoton: 0, notcaptured: 0, trials: 0, seed }
    }

    pub fn modes(&self) -> usize {
        self.plus.len()
    }

    pub fn record(&mut self, outcome: Outcome) {
        self.trials += 1;
        match outcome {
            Outcome::NoPhoton => self.nophoton += 1,
            Outcome::NotCaptured => self.notcaptured += 1,
            Outcome::Detection { mode, sign: PhiSign::Plus, .. } => self.plus[mode] += 1,
            Outcome::Detection { mode, sign: PhiSign::Minus, .. } => self.minus[mode] += 1,
        }
    }

    fn merge(mut self, other: &CountTable) -> Self {
        for (a, b) in self.plus.iter_mut().zip(&other.plus) {
            *a += b;
        }
        for (a, b) in self.minus.iter_mut().zip(&other.minus) {
            *a += b;
        }
        self.nophoton += other.nophoton;
        self.notcaptured += other.notcaptured;
        self.trials += other.trials;
        self
    }

    pub fn detections(&self) -> u64 {
        self.plus.iter().chain(&self.minus).sum()
    }

    /// Cells in the order `(0,+), (0,−), (1,+), …, nophoton, notcaptured`.
    pub fn cells(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.plus.iter().zip(&self.minus).flat_map(|(p, m)| [*p, *m]).collect();
        v.push(self.nophoton);
        v.push(self.notcaptured);
        v
    }

    pub fn cell_labels(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..self.modes()).flat_map(|q| [format!("{q}+"), format!("{q}-")]).collect();
        v.push("nophoton".into());
        v.push("notcaptured".into());
        v
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell,count\n");
        for (l, c) in self.cell_labels().iter().zip(self.cells()) {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }
}

fn simulate_range(setup: &ProtocolSetup, seed: u64, start: u64, end: u64) -> CountTable {
    let mut t = CountTable::new(setup.basis().k(), seed);
    for trial in start..end {
        let mut rng = stream_rng(seed, trial);
        t.record(run_protocol(setup, &mut rng));
    }
    t
}

/// Runs `trials` independent protocol runs. Trial `i` uses stream `i` of
/// `seed`, so the table does not depend on the thread count.
pub fn run_batch(setup: &ProtocolSetup, trials: u64, seed: u64) -> CountTable {
    let chunks = trials.div_ceil(CHUNK);
    let empty = CountTable::new(setup.basis().k(), seed);
    (0..chunks)
        .into_par_iter()
        .map(|c| simulate_range(setup, seed, c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .reduce(|| empty.clone(), |a, b| a.merge(&b))
}

/// Runs trials in index order until exactly `detections` photons are
/// detected.
pub fn run_until_detections(setup: &ProtocolSetup, detections: u64, seed: u64) -> Result<CountTable> {
    let mut table = CountTable::new(setup.basis().k(), seed);
    let p_det = setup.model().p_photon() * 0.5 * (setup.model().capture[0] + setup.model().capture[1]);
    if detections > 0 && !(p_det > 0.0) {
        return Err(Error::InsufficientData("detection probability is zero".into()));
    }
    let batch = CHUNK * rayon::current_num_threads() as u64;
    let mut next = 0u64;
    while table.detections() < detections {
        let outcomes: Vec<Outcome> = (next..next + batch)
            .into_par_iter()
            .map(|trial| run_protocol(setup, &mut stream_rng(seed, trial)))
            .collect();
        next += batch;
        for o in outcomes {
            table.record(o);
            if table.detections() == detections {
                break;
            }
        }
    }
    Ok(table)
}

/// Model cell probabilities in `CountTable::cells` order.
pub fn model_probabilities(setup: &ProtocolSetup) -> Result<Vec<f64>> {
    let model = setup.model();
    let capture = 0.5 * (model.capture[0] + model.capture[1]);
    let detected = model.p_photon() * capture;
    let cond = detection_probabilities(setup.scene().theta(), setup.geometry(), setup.basis())?;
    let mut v: Vec<f64> = cond.iter().flat_map(|[p, m]| [detected * p, detected * m]).collect();
    v.push(model.p_vacuum());
    v.push(model.p_photon() * (1.0 - capture));
    Ok(v)
}

/// `[η_q² cos²(βθ), η_q² sin²(βθ)]`, conditional on detection.
pub fn detection_probabilities(theta: f64, geom: &ApertureGeometry, basis: &ModalBasis) -> Result<Vec<[f64; 2]>> {
    let eta = eta(geom, basis, theta)?;
    let (s, c) = (geom.beta() * theta).sin_cos();
    Ok(eta.iter().map(|e| [e * e * c * c, e * e * s * s]).collect())
}

/// One cell of a model comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub label: String,
    pub observed: u64,
    pub expected: f64,
    /// `(observed − trials·p) / √(trials·p(1−p))`, zero when `p` is 0 or 1
    /// and the count agrees exactly.
    pub z: f64,
}

pub fn compare_to_model(table: &CountTable, probs: &[f64]) -> Vec<CellCheck> {
    let n = table.trials as f64;
    table
        .cell_labels()
        .into_iter()
        .zip(table.cells())
        .zip(probs)
        .map(|((label, observed), &p)| {
            let expected = n * p;
            let sd = (n * p * (1.0 - p)).sqrt();
            let diff = observed as f64 - expected;
            let z = if sd > 0.0 {
                diff / sd
            } else if diff.abs() < 0.5 {
                0.0
            } else {
                f64::INFINITY
            };
            CellCheck { label, observed, expected, z }
        })
        .collect()
}

/// Cell probabilities at or below this are zero up to rounding: `cos²`
/// evaluated at an exact dark fringe leaves about `ε²`.
const ZERO_PROBABILITY: f64 = f64::EPSILON * f64::EPSILON;

/// Log-likelihood of the detected cells at a candidate separation.
/// A nonzero count in a cell of zero probability gives `−∞`.
pub fn loglik(theta: f64, counts: &CountTable, geom: &ApertureGeometry, basis: &ModalBasis) -> Result<f64> {
    let probs = detection_probabilities(theta, geom, basis)?;
    let mut ll = 0.0;
    for (q, [pp, pm]) in probs.iter().enumerate() {
        for (n, p) in [(counts.plus[q], *pp), (counts.minus[q], *pm)] {
            if n == 0 {
                continue;
            }
            if p <= ZERO_PROBABILITY {
                return Ok(f64::NEG_INFINITY);
            }
            ll += n as f64 * p.ln();
        }
    }
    Ok(ll)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchInterval {
    /// Exclusive lower end.
    pub lo: f64,
    pub hi: f64,
}

impl SearchInterval {
    /// `(10⁻⁶σ, min(σ/2, π/(2β))]`: the range where `cos²(βθ)` is
    /// monotone and the source is below the Rayleigh scale.
    pub fn default_for(geom: &ApertureGeometry) -> Self {
        let hi = if geom.beta() > 0.0 { (0.5 * geom.sigma()).min(FRAC_PI_2 / geom.beta()) } else { 0.5 * geom.sigma() };
        Self { lo: 1e-6 * geom.sigma(), hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub theta_hat: f64,
    pub loglik: f64,
    /// 95% half-width `1.96 / √(n_det · 𝒥₁(θ̂))` with the per-detection
    /// Fisher information.
    pub ci_half_width: f64,
    pub detections: u64,
    pub trials: u64,
    pub at_boundary: bool,
}

const GRID: usize = 256;

pub fn estimate_theta(
    counts: &CountTable,
    geom: &ApertureGeometry,
    basis: &ModalBasis,
    interval: SearchInterval,
) -> Result<EstimationResult> {
    if counts.modes() != basis.k() {
        return Err(Error::DimensionMismatch { expected: basis.k(), actual: counts.modes() });
    }
    let n_det = counts.detections();
    if n_det < MIN_DETECTIONS {
        return Err(Error::InsufficientData(format!("{n_det} detections, need at least {MIN_DETECTIONS}")));
    }
    let SearchInterval { lo, hi } = interval;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::InvalidScene(format!("search interval ({lo}, {hi}]")));
    }

    let step = (hi - lo) / GRID as f64;
    let grid: Vec<f64> = (1..=GRID).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&t| loglik(t, counts, geom, basis)).collect::<Result<_>>()?;
    let (best, &best_ll) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("grid is nonempty");
    if !best_ll.is_finite() {
        return Err(Error::NonIdentifiable("likelihood is zero on the whole interval".into()));
    }
    let worst = values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    if best_ll - worst <= 1e-12 * (1.0 + best_ll.abs()) {
        return Err(Error::NonIdentifiable("likelihood is flat over the interval".into()));
    }

    let a = if best == 0 { lo } else { grid[best - 1] };
    let b = grid[(best + 1).min(GRID - 1)];
    let f = |t: f64| loglik(t, counts, geom, basis).unwrap_or(f64::NEG_INFINITY);
    let (mut theta_hat, mut ll) = golden_max(f, a.max(lo + 1e-15 * hi), b, 1e-13 * hi);
    if best_ll > ll {
        theta_hat = grid[best];
        ll = best_ll;
    }
    let info = cfi_per_detection(theta_hat, geom, basis)?;
    let at_boundary = theta_hat - lo < step || hi - theta_hat < step;
    Ok(EstimationResult {
        theta_hat,
        loglik: ll,
        ci_half_width: 1.96 / (n_det as f64 * info).sqrt(),
        detections: n_det,
        trials: counts.trials,
        at_boundary,
    })
}

/// Golden-section maximization on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Summary of repeated estimation at a known separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub theta_true: f64,
    pub replicates: usize,
    pub detections: u64,
    pub mean: f64,
    pub variance: f64,
    /// `1 / (n_det 𝒥₁(θ*))`.
    pub cramer_rao: f64,
    pub coverage: f64,
    pub estimates: Vec<f64>,
}

impl ReplicateSummary {
    pub fn variance_ratio(&self) -> f64 {
        self.variance / self.cramer_rao
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("replicate,theta_hat\n");
        for (i, t) in self.estimates.iter().enumerate() {
            out.push_str(&format!("{i},{t:.16e}\n"));
        }
        out
    }
}

/// Runs `replicates` independent experiments of `detections` photons each
/// and estimates θ in every one. Replicate `i` uses `child_seed(seed, i)`.
pub fn replicate_estimates(
    setup: &ProtocolSetup,
    detections: u64,
    replicates: usize,
    seed: u64,
    interval: SearchInterval,
) -> Result<ReplicateSummary> {
    let results: Vec<EstimationResult> = (0..replicates)
        .map(|i| {
            let table = run_until_detections(setup, detections, crate::rng::child_seed(seed, i as u64))?;
            estimate_theta(&table, setup.geometry(), setup.basis(), interval)
        })
        .collect::<Result<_>>()?;
    let theta = setup.scene().theta();
    let estimates: Vec<f64> = results.iter().map(|r| r.theta_hat).collect();
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = estimates.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let info = cfi_per_detection(theta, setup.geometry(), setup.basis())?;
    let covered = results.iter().filter(|r| (r.theta_hat - theta).abs() <= r.ci_half_width).count();
    Ok(ReplicateSummary {
        theta_true: theta,
        replicates,
        detections,
        mean,
        variance,
        cramer_rao: 1.0 / (detections as f64 * info),
        coverage: covered as f64 / n,
        estimates,
    })
}

/// Period of `cos²(βθ)`, for callers building their own intervals.
pub fn fringe_period(geom: &ApertureGeometry) -> f64 {
    if geom.beta() > 0.0 {
        PI / geom.beta()
    } else {
        f64::INFINITY
    }
}
