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

//! `farsight`: batch front end for the imaging simulator.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{Config, ConfigErrors};

#[derive(Parser)]
#[command(name = "farsight", version, about = "Entanglement-assisted two-telescope imaging toolkit")]
struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Geometry {
    /// Rayleigh separation σ.
    #[arg(long)]
    sigma: Option<String>,
    /// Aperture size δ = 2π/σ.
    #[arg(long)]
    delta: Option<String>,
    /// Baseline ratio r = 2β/δ.
    #[arg(long)]
    r: Option<String>,
    /// Half-baseline β.
    #[arg(long)]
    beta: Option<String>,
}

#[derive(Args, Default)]
struct Scene {
    /// Retained modes K.
    #[arg(long)]
    modes: Option<String>,
    /// Time bins M.
    #[arg(long)]
    bins: Option<String>,
    /// Photon probability per bin.
    #[arg(long)]
    epsilon: Option<String>,
    /// Source half-separation in units of σ.
    #[arg(long)]
    theta_over_sigma: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized CFI over a (K, r, θ) grid as CSV.
    Fisher {
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        /// Comma-separated mode counts.
        #[arg(long)]
        ks: Option<String>,
        /// Comma-separated baseline ratios.
        #[arg(long)]
        ratios: Option<String>,
        /// Comma-separated θ/σ values; overrides the log grid.
        #[arg(long)]
        thetas: Option<String>,
        #[arg(long)]
        theta_min: Option<String>,
        #[arg(long)]
        theta_max: Option<String>,
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Run protocol trials and compare counts with the model.
    Simulate {
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        scene: Scene,
        #[arg(long)]
        trials: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// Count table JSON.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Maximum-likelihood separation from a count table or a fresh run.
    Estimate {
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        scene: Scene,
        /// Count table JSON from `simulate`.
        #[arg(long)]
        counts: Option<String>,
        #[arg(long)]
        detections: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        theta_min_over_sigma: Option<String>,
        #[arg(long)]
        theta_max_over_sigma: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Compile a unitary into a nonlocal MZI mesh and verify it.
    Compile {
        /// Row-major JSON matrix of `[re, im]` pairs.
        #[arg(long)]
        unitary: Option<String>,
        /// Use a Haar-random unitary of this size instead.
        #[arg(long)]
        random_dimension: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        sites: Option<String>,
        #[arg(long)]
        modes: Option<String>,
        #[arg(long)]
        bins: Option<String>,
        #[arg(long)]
        tolerance: Option<String>,
        #[arg(long)]
        mesh_out: Option<String>,
        #[arg(long)]
        budget_out: Option<String>,
        #[arg(long)]
        report_out: Option<String>,
    },
    /// Compare the branch simulator with the state-vector oracle.
    Oracle {
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        scene: Scene,
        #[arg(long)]
        tolerance: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn load(path: Option<&String>, keys: &[&str]) -> Result<Config, CliError> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{p}: {e}")))?;
            Ok(Config::parse(&text, keys)?)
        }
    }
}

fn apply_geometry(cfg: &mut Config, g: &Geometry) {
    cfg.set("sigma", g.sigma.as_ref());
    cfg.set("delta", g.delta.as_ref());
    cfg.set("r", g.r.as_ref());
    cfg.set("beta", g.beta.as_ref());
}

fn apply_scene(cfg: &mut Config, s: &Scene) {
    cfg.set("modes", s.modes.as_ref());
    cfg.set("bins", s.bins.as_ref());
    cfg.set("epsilon", s.epsilon.as_ref());
    cfg.set("theta_over_sigma", s.theta_over_sigma.as_ref());
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config(ConfigErrors(vec!["`threads` must be >= 1".into()])));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(ConfigErrors(vec![e.to_string()])))?;
    }
    let file = cli.config.as_ref();
    match &cli.command {
        Command::Fisher { sigma, delta, ks, ratios, thetas, theta_min, theta_max, points, out, svg } => {
            let mut cfg = load(file, commands::FISHER_KEYS)?;
            for (k, v) in [
                ("sigma", sigma),
                ("delta", delta),
                ("ks", ks),
                ("ratios", ratios),
                ("thetas", thetas),
                ("theta_min", theta_min),
                ("theta_max", theta_max),
                ("points", points),
                ("out", out),
                ("svg", svg),
            ] {
                cfg.set(k, v.as_ref());
            }
            commands::fisher(&cfg)
        }
        Command::Simulate { geometry, scene, trials, seed, out, csv } => {
            let mut cfg = load(file, commands::SIMULATE_KEYS)?;
            apply_geometry(&mut cfg, geometry);
            apply_scene(&mut cfg, scene);
            for (k, v) in [("trials", trials), ("seed", seed), ("out", out), ("csv", csv)] {
                cfg.set(k, v.as_ref());
            }
            commands::simulate(&cfg)
        }
        Command::Estimate {
            geometry,
            scene,
            counts,
            detections,
            seed,
            theta_min_over_sigma,
            theta_max_over_sigma,
            out,
        } => {
            let mut cfg = load(file, commands::ESTIMATE_KEYS)?;
            apply_geometry(&mut cfg, geometry);
            apply_scene(&mut cfg, scene);
            for (k, v) in [
                ("counts", counts),
                ("detections", detections),
                ("seed", seed),
                ("theta_min_over_sigma", theta_min_over_sigma),
                ("theta_max_over_sigma", theta_max_over_sigma),
                ("out", out),
            ] {
                cfg.set(k, v.as_ref());
            }
            commands::estimate(&cfg)
        }
        Command::Compile {
            unitary,
            random_dimension,
            seed,
            sites,
            modes,
            bins,
            tolerance,
            mesh_out,
            budget_out,
            report_out,
        } => {
            let mut cfg = load(file, commands::COMPILE_KEYS)?;
            for (k, v) in [
                ("unitary", unitary),
                ("random_dimension", random_dimension),
                ("seed", seed),
                ("sites", sites),
                ("modes", modes),
                ("bins", bins),
                ("tolerance", tolerance),
                ("mesh_out", mesh_out),
                ("budget_out", budget_out),
                ("report_out", report_out),
            ] {
                cfg.set(k, v.as_ref());
            }
            commands::compile(&cfg)
        }
        Command::Oracle { geometry, scene, tolerance, out } => {
            let mut cfg = load(file, commands::ORACLE_KEYS)?;
            apply_geometry(&mut cfg, geometry);
            apply_scene(&mut cfg, scene);
            cfg.set("tolerance", tolerance.as_ref());
            cfg.set("out", out.as_ref());
            commands::oracle(&cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
