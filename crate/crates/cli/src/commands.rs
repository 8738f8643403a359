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

//! Subcommand implementations.

use std::fs;
use std::path::Path;

use farsight_core::compiler::{compile_nonlocal, random_unitary, unitary_from_json, CMatrix};
use farsight_core::fisher::fig3_grid;
use farsight_core::montecarlo::{compare_to_model, model_probabilities, run_until_detections};
use farsight_core::rng::stream_rng;
use farsight_core::{
    estimate_theta, exact_distribution, oracle_statevector, run_batch, CountTable, ModalBasis, Outcome, ProtocolSetup,
    SearchInterval, TwoPointScene,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::config::{Config, ConfigErrors, Reader};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigErrors),
    Verification(String),
    Io(String),
    Core(farsight_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use farsight_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
            CliError::Core(
                E::Quadrature { .. } | E::NotOrthonormal { .. } | E::InconsistentParity(..) | E::NoBellPair,
            ) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Verification(e) => write!(f, "verification failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<farsight_core::Error> for CliError {
    fn from(e: farsight_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<ConfigErrors> for CliError {
    fn from(e: ConfigErrors) -> Self {
        CliError::Config(e)
    }
}

type Out = Result<(), CliError>;

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn write(path: &str, text: &str) -> Out {
    fs::write(Path::new(path), text).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

/// Writes to `path` if given, else to stdout.
fn emit(path: Option<&str>, text: &str) -> Out {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn log_config(name: &str, cfg: &Config) {
    log::info!("{name} resolved configuration:\n{}", cfg.dump());
}

pub const FISHER_KEYS: &[&str] =
    &["sigma", "delta", "ks", "ratios", "thetas", "theta_min", "theta_max", "points", "out", "svg"];

pub fn fisher(cfg: &Config) -> Out {
    let mut r = Reader::new(cfg);
    let sigma = r.scale();
    let ks: Vec<usize> = r.list("ks", &[5.0, 10.0, 40.0]).iter().map(|&k| k as usize).collect();
    let ratios = r.list("ratios", &[0.0, 1.0, 2.0, 3.0]);
    let tmin: f64 = r.or("theta_min", 1e-3);
    let tmax: f64 = r.or("theta_max", 0.5);
    let points: usize = r.or("points", 50);
    r.check(ks.iter().all(|&k| k >= 1), "`ks` entries must be >= 1");
    r.check(ratios.iter().all(|&x| x >= 0.0), "`ratios` must be >= 0");
    r.check(tmin > 0.0 && tmax >= tmin, "need 0 < theta_min <= theta_max");
    r.check(points >= 1, "`points` must be >= 1");
    let thetas = if cfg.has("thetas") {
        r.list("thetas", &[])
    } else if points == 1 {
        vec![tmin]
    } else {
        (0..points).map(|i| tmin * (tmax / tmin).powf(i as f64 / (points - 1) as f64)).collect()
    };
    r.finish()?;
    log_config("fisher", cfg);
    let report = fig3_grid(sigma.expect("validated"), &ks, &ratios, &thetas)?;
    emit(cfg.raw("out"), &report.to_csv())?;
    if let Some(path) = cfg.raw("svg") {
        write(path, &report.to_svg())?;
    }
    Ok(())
}

pub const SIMULATE_KEYS: &[&str] =
    &["sigma", "delta", "r", "beta", "modes", "bins", "epsilon", "theta_over_sigma", "trials", "seed", "out", "csv"];

struct ProtocolArgs {
    setup: ProtocolSetup,
}

fn protocol_args(r: &mut Reader<'_>, default_epsilon: Option<f64>) -> Option<ProtocolArgs> {
    let geom = r.geometry();
    let k: Option<usize> = r.required("modes");
    let bins: usize = r.or("bins", 1);
    let eps: Option<f64> = match default_epsilon {
        Some(d) => Some(r.or("epsilon", d)),
        None => r.required("epsilon"),
    };
    let t: Option<f64> = r.required("theta_over_sigma");
    if let Some(k) = k {
        r.check(k >= 1, "`modes` must be >= 1");
    }
    r.check(bins >= 1, "`bins` must be >= 1");
    if let Some(e) = eps {
        r.check(
            (0.0..=1.0).contains(&e) && e * bins as f64 <= 1.0,
            format!("`epsilon` must satisfy 0 <= epsilon and epsilon*bins <= 1, got {e} with {bins} bins"),
        );
    }
    let (geom, k, eps, t) = (geom?, k?, eps?, t?);
    let basis = match ModalBasis::sinc_bessel(k, &geom) {
        Ok(b) => b,
        Err(e) => {
            r.errors.push(e.to_string());
            return None;
        }
    };
    let scene = match TwoPointScene::new(t * geom.sigma(), eps, bins) {
        Ok(s) => s,
        Err(e) => {
            r.errors.push(e.to_string());
            return None;
        }
    };
    match ProtocolSetup::new(scene, geom, basis) {
        Ok(setup) => Some(ProtocolArgs { setup }),
        Err(e) => {
            r.errors.push(e.to_string());
            None
        }
    }
}

pub fn simulate(cfg: &Config) -> Out {
    let mut r = Reader::new(cfg);
    let args = protocol_args(&mut r, None);
    let trials: u64 = r.or("trials", 100_000);
    let seed: u64 = r.or("seed", 0);
    r.check(trials >= 1, "`trials` must be >= 1");
    r.finish()?;
    log_config("simulate", cfg);
    let setup = args.expect("validated").setup;

    let table = run_batch(&setup, trials, seed);
    let probs = model_probabilities(&setup)?;
    let checks = compare_to_model(&table, &probs);
    let json = serde_json::to_string_pretty(&table).expect("count table serializes");

    let mut report = String::from("cell\tobserved\texpected\tz\n");
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for c in &checks {
        report.push_str(&format!("{}\t{}\t{:.16e}\t{:.16e}\n", c.label, c.observed, c.expected, c.z));
        // cells that are empty up to rounding carry no degree of freedom
        if c.expected > 1e-9 {
            chi2 += (c.observed as f64 - c.expected).powi(2) / c.expected;
            dof += 1;
        }
    }
    let dof = dof.saturating_sub(1);
    let p_value = if dof > 0 { 1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(chi2) } else { 1.0 };
    report.push_str(&format!("chi_square {chi2:.16e}\ndof {dof}\np_value {p_value:.16e}\n"));

    match cfg.raw("out") {
        Some(path) => {
            write(path, &json)?;
            print!("{report}");
        }
        None => {
            println!("{json}");
            eprint!("{report}");
        }
    }
    if let Some(path) = cfg.raw("csv") {
        write(path, &table.to_csv())?;
    }
    Ok(())
}

pub const ESTIMATE_KEYS: &[&str] = &[
    "sigma",
    "delta",
    "r",
    "beta",
    "modes",
    "counts",
    "bins",
    "epsilon",
    "theta_over_sigma",
    "detections",
    "seed",
    "theta_min_over_sigma",
    "theta_max_over_sigma",
    "out",
];

enum CountSource {
    File(CountTable),
    Simulate { setup: ProtocolSetup, detections: u64, seed: u64 },
}

pub fn estimate(cfg: &Config) -> Out {
    let mut r = Reader::new(cfg);
    let mut model = None;
    let source = if let Some(path) = cfg.raw("counts") {
        let text = read(path)?;
        let geom = r.geometry();
        let k: Option<usize> = r.required("modes");
        if let (Some(g), Some(k)) = (geom, k) {
            match ModalBasis::sinc_bessel(k, &g) {
                Ok(b) => model = Some((g, b)),
                Err(e) => r.errors.push(e.to_string()),
            }
        }
        match serde_json::from_str::<CountTable>(&text) {
            Ok(t) => Some(CountSource::File(t)),
            Err(e) => {
                r.errors.push(format!("`counts`: {e}"));
                None
            }
        }
    } else {
        let args = protocol_args(&mut r, Some(1.0));
        let detections: u64 = r.or("detections", 10_000);
        let seed: u64 = r.or("seed", 0);
        args.map(|a| {
            model = Some((*a.setup.geometry(), a.setup.basis().clone()));
            CountSource::Simulate { setup: a.setup, detections, seed }
        })
    };
    let lo: Option<f64> = r.optional("theta_min_over_sigma");
    let hi: Option<f64> = r.optional("theta_max_over_sigma");
    r.finish()?;
    log_config("estimate", cfg);
    let (geom, basis) = model.expect("validated");
    let table = match source.expect("validated") {
        CountSource::File(t) => t,
        CountSource::Simulate { setup, detections, seed } => run_until_detections(&setup, detections, seed)?,
    };
    let mut interval = SearchInterval::default_for(&geom);
    if let Some(lo) = lo {
        interval.lo = lo * geom.sigma();
    }
    if let Some(hi) = hi {
        interval.hi = hi * geom.sigma();
    }
    log::info!("search interval ({:.16e}, {:.16e}]", interval.lo, interval.hi);
    let result = estimate_theta(&table, &geom, &basis, interval)?;
    if result.at_boundary {
        log::warn!("estimate lies at the edge of the search interval");
    }
    emit(cfg.raw("out"), &serde_json::to_string_pretty(&result).expect("result serializes"))
}

pub const COMPILE_KEYS: &[&str] = &[
    "unitary",
    "random_dimension",
    "seed",
    "sites",
    "modes",
    "bins",
    "tolerance",
    "mesh_out",
    "budget_out",
    "report_out",
];

pub fn compile(cfg: &Config) -> Out {
    let mut r = Reader::new(cfg);
    let sites: usize = r.or("sites", 2);
    let k: Option<usize> = r.required("modes");
    let bins: usize = r.or("bins", 1);
    let seed: u64 = r.or("seed", 0);
    let tol: f64 = r.or("tolerance", 1e-9);
    r.check(sites >= 1, "`sites` must be >= 1");
    r.check(bins >= 1, "`bins` must be >= 1");
    r.check(tol > 0.0, "`tolerance` must be positive");
    let random: Option<usize> = r.optional("random_dimension");
    r.check(cfg.has("unitary") != cfg.has("random_dimension"), "give exactly one of `unitary`, `random_dimension`");
    r.finish()?;
    log_config("compile", cfg);
    let k = k.expect("validated");
    let mut rng = stream_rng(seed, 0);
    let u: CMatrix = match cfg.raw("unitary") {
        Some(path) => unitary_from_json(&read(path)?)?,
        None => random_unitary(random.expect("validated"), &mut rng),
    };
    let comp = compile_nonlocal(&u, sites, k, bins, &mut rng)?;
    emit(cfg.raw("mesh_out"), &serde_json::to_string_pretty(&comp.mesh).expect("mesh serializes"))?;
    emit(cfg.raw("budget_out"), &serde_json::to_string_pretty(&comp.budget).expect("budget serializes"))?;
    emit(cfg.raw("report_out"), &comp.report.to_string())?;
    if !comp.report.passed(tol) {
        return Err(CliError::Verification(format!(
            "single-photon deviation {:.3e}, gadget deviation {:.3e}, tolerance {tol:.3e}",
            comp.report.single_photon_deviation, comp.report.gadget_process_deviation
        )));
    }
    Ok(())
}

pub const ORACLE_KEYS: &[&str] =
    &["sigma", "delta", "r", "beta", "modes", "bins", "epsilon", "theta_over_sigma", "tolerance", "out"];

pub fn oracle(cfg: &Config) -> Out {
    let mut r = Reader::new(cfg);
    let args = protocol_args(&mut r, None);
    let tol: f64 = r.or("tolerance", 1e-10);
    r.finish()?;
    log_config("oracle", cfg);
    let setup = args.expect("validated").setup;
    let fast = exact_distribution(&setup)?;
    let slow = oracle_statevector(&setup)?;
    let tv = fast.total_variation(&slow);

    let (a, b) = (fast.outcomes(), slow.outcomes());
    let mut keys: Vec<Outcome> = a.keys().chain(b.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut text = String::from("outcome\tsimulator\toracle\tdifference\n");
    for k in keys {
        let (p, q) = (a.get(&k).copied().unwrap_or(0.0), b.get(&k).copied().unwrap_or(0.0));
        let label = match k {
            Outcome::NoPhoton => "nophoton".to_string(),
            Outcome::NotCaptured => "notcaptured".to_string(),
            Outcome::Detection { bin, mode, sign } => format!("m={bin},q={mode},{}", sign.symbol()),
        };
        text.push_str(&format!("{label}\t{p:.16e}\t{q:.16e}\t{:.16e}\n", p - q));
    }
    text.push_str(&format!("joint_outcomes {} {}\n", fast.len(), slow.len()));
    text.push_str(&format!("total_variation {tv:.16e}\n"));
    emit(cfg.raw("out"), &text)?;
    if !(tv <= tol) {
        return Err(CliError::Verification(format!("total variation {tv:.3e} exceeds {tol:.3e}")));
    }
    Ok(())
}
