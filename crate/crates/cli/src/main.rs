// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! `pauli-forge`: batch front end for channel synthesis, simulation,
//! fidelity analysis and 1PR fitting.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use pauli_forge::channels::{named_map, DensityMatrix, NamedMap, PauliChannel};
use pauli_forge::circuits::{export_qasm, simulate_channel, synthesize_channel_circuit, Circuit};
use pauli_forge::distance::{
    diamond_distance_bruteforce, diamond_distance_pauli, fidelity_from_distance, write_records,
    BruteForceOptions,
};
use pauli_forge::onepr::{fit_onepr, random_onepr_map, FitOptions, StateCurve};
use pauli_forge::par::Execution;
use pauli_forge::pauli::PauliProbVector;
use pauli_forge::tomography::{run_scan, ScanConfig};
use pauli_forge::Error;

#[derive(Parser, Debug)]
#[command(
    name = "pauli-forge",
    version,
    about = "Synthesize and simulate Pauli channels and measure their fidelity"
)]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomised step.
    #[arg(long, global = true, env = "PAULI_FORGE_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the ancilla circuit of a Pauli channel.
    Synth {
        /// JSON file holding the 4^N probabilities k.
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a circuit's channel to a density matrix of its main register.
    Simulate {
        /// Circuit JSON written by `synth`.
        #[arg(long)]
        circuit: PathBuf,
        /// Density matrix JSON with `re` and `im` row arrays.
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diamond distance and fidelity between two Pauli channels.
    Fidelity {
        /// JSON file with the first channel's probabilities.
        #[arg(long)]
        k1: PathBuf,
        /// JSON file with the second channel's probabilities.
        #[arg(long)]
        k2: PathBuf,
        /// Also run the variational search (one qubit only).
        #[arg(long)]
        brute_force: bool,
    },
    /// Noisy tomography scan of the tetrahedron, written as CSV.
    Scan {
        /// Scan config JSON; missing fields take their defaults.
        #[arg(long)]
        config: PathBuf,
        /// Destination CSV file.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 1 runs sequentially.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fit a 1PR decomposition to a curve of states.
    OneprFit {
        /// Curve JSON: `dim` plus `samples` of `{p, re, im}`.
        #[arg(long)]
        curve: PathBuf,
        /// Optimizer restarts.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a random 1PR-realisable one-qubit dynamical map.
    OneprRandom {
        /// Number of p samples in the output.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a circuit as OpenQASM 2.0.
    ExportQasm {
        /// Circuit JSON written by `synth`.
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probabilities of a named one-qubit dynamical map.
    NamedMap {
        /// bitflip, phaseflip, bitphaseflip, depolarizing or parabolic.
        #[arg(long)]
        name: String,
        /// Point in the map's domain.
        #[arg(long)]
        p: f64,
    },
}

/// Bad input (exit 2) versus a failure while running (exit 1).
enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound { .. } | Error::Infeasible { .. } | Error::Io(_) | Error::Csv(_) => {
                Failure::Runtime(e.into())
            }
            _ => Failure::Invalid(e.into()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Runtime)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Invalid)
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Runtime),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable value") + "\n"
}

struct Ctx {
    json: bool,
    seed: u64,
}

impl Ctx {
    /// Prints `value` as JSON with `--json`, otherwise `text`.
    fn report(&self, value: Value, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string(&value).expect("serialisable value")
            );
        } else {
            println!("{}", text());
        }
    }
}

fn synth(ctx: &Ctx, k: &Path, out: Option<&Path>) -> Outcome {
    let k: PauliProbVector = read_json(k)?;
    let circuit = synthesize_channel_circuit(&k, k.n_qubits())?;
    match out {
        Some(path) => {
            write_out(Some(path), &to_json(&circuit))?;
            ctx.report(
                json!({"qubits": circuit.n_qubits(), "gates": circuit.len(), "out": path}),
                || {
                    format!(
                        "{} gates on {} qubits written to {}",
                        circuit.len(),
                        circuit.n_qubits(),
                        path.display()
                    )
                },
            );
            Ok(())
        }
        None => write_out(None, &to_json(&circuit)),
    }
}

fn simulate(ctx: &Ctx, circuit: &Path, rho: &Path, out: Option<&Path>) -> Outcome {
    let circuit: Circuit = read_json(circuit)?;
    let rho: DensityMatrix = read_json(rho)?;
    let result = simulate_channel(&circuit, &rho)?;
    match out {
        Some(path) => {
            write_out(Some(path), &to_json(&result))?;
            ctx.report(json!({"out": path, "purity": result.purity()}), || {
                format!(
                    "output state written to {} (purity {:.12})",
                    path.display(),
                    result.purity()
                )
            });
            Ok(())
        }
        None if ctx.json => write_out(None, &to_json(&result)),
        None => {
            println!("{}", result.matrix());
            println!("purity = {:.12}", result.purity());
            Ok(())
        }
    }
}

fn fidelity(ctx: &Ctx, k1: &Path, k2: &Path, brute_force: bool) -> Outcome {
    let k1: PauliProbVector = read_json(k1)?;
    let k2: PauliProbVector = read_json(k2)?;
    let d = diamond_distance_pauli(&k1, &k2)?;
    let f = fidelity_from_distance(d);
    let mut value = json!({"distance": d, "f": f, "method": "closed-form"});
    let mut text = format!("distance = {d}\nf = {f}");
    if brute_force {
        if k1.n_qubits() != 1 {
            return Err(Failure::Invalid(anyhow::anyhow!(
                "--brute-force supports one-qubit channels only"
            )));
        }
        let r = diamond_distance_bruteforce(
            &PauliChannel::new(k1),
            &PauliChannel::new(k2),
            &BruteForceOptions::default(),
        )?;
        value["brute_force"] = json!({"distance": r.value, "f": fidelity_from_distance(r.value), "restarts": r.restarts, "agreed": r.agreed});
        text.push_str(&format!(
            "\nbrute-force distance = {} ({} restarts, agreed: {})",
            r.value, r.restarts, r.agreed
        ));
    }
    ctx.report(value, || text);
    Ok(())
}

fn scan(ctx: &Ctx, config: &Path, out: &Path, jobs: Option<usize>) -> Outcome {
    let mut raw: Value = read_json(config)?;
    // the global seed applies unless the file fixes one
    if raw.pointer("/tomography/seed").is_none() {
        let obj = raw.as_object_mut().ok_or_else(|| {
            Failure::Invalid(anyhow::anyhow!("scan config must be a JSON object"))
        })?;
        let tomo = obj.entry("tomography").or_insert_with(|| json!({}));
        if let Some(t) = tomo.as_object_mut() {
            t.insert("seed".into(), json!(ctx.seed));
        }
    }
    let mut cfg: ScanConfig = serde_json::from_value(raw)
        .with_context(|| format!("parsing {}", config.display()))
        .map_err(Failure::Invalid)?;
    let records = match jobs {
        Some(0) => {
            return Err(Failure::Invalid(anyhow::anyhow!(
                "--jobs must be at least 1"
            )))
        }
        Some(1) => {
            cfg.execution = Execution::Sequential;
            run_scan(&cfg)?
        }
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Runtime(e.into()))?;
            pool.install(|| run_scan(&cfg))?
        }
        None => run_scan(&cfg)?,
    };
    let file = fs::File::create(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Runtime)?;
    write_records(io::BufWriter::new(file), &records)?;
    let mean = records.iter().map(|r| r.f).sum::<f64>() / records.len().max(1) as f64;
    ctx.report(
        json!({"points": records.len(), "mean_f": mean, "out": out}),
        || {
            format!(
                "{} points, mean f = {mean:.6}, written to {}",
                records.len(),
                out.display()
            )
        },
    );
    Ok(())
}

fn onepr_fit(ctx: &Ctx, curve: &Path, restarts: usize, out: Option<&Path>) -> Outcome {
    let curve: StateCurve = read_json(curve)?;
    let opts = FitOptions {
        restarts,
        seed: ctx.seed,
        ..Default::default()
    };
    let fit = fit_onepr(&curve, &opts)?;
    let d = &fit.decomposition;
    let [na, nb, nc] = d.norms_squared();
    let sin_quarter = d.s_at(0.25).ok().map(f64::sin);
    if let Some(path) = out {
        write_out(Some(path), &to_json(d))?;
    }
    ctx.report(
        json!({
            "residual": fit.residual,
            "norms_squared": {"a": na, "b": nb, "c": nc},
            "sin_s_at_0.25": sin_quarter,
            "decomposition": d,
        }),
        || {
            let mut t = format!(
                "residual = {:e}\n|a|^2 = {na:.9}, |b|^2 = {nb:.9}, |c|^2 = {nc:.9}",
                fit.residual
            );
            if let Some(v) = sin_quarter {
                t.push_str(&format!("\nsin s(0.25) = {v:.9}"));
            }
            t
        },
    );
    Ok(())
}

fn onepr_random(ctx: &Ctx, samples: usize, out: Option<&Path>) -> Outcome {
    if samples < 2 {
        return Err(Failure::Invalid(anyhow::anyhow!(
            "--samples must be at least 2"
        )));
    }
    let (d, map) = random_onepr_map(ctx.seed);
    let points: Vec<Value> = map
        .sample(samples)
        .into_iter()
        .map(|(p, k)| json!({"p": p, "k": k}))
        .collect();
    let doc = json!({"seed": ctx.seed, "decomposition": d, "map": points});
    match out {
        Some(path) => {
            write_out(Some(path), &to_json(&doc))?;
            let [na, nb, nc] = d.norms_squared();
            ctx.report(json!({"seed": ctx.seed, "out": path}), || {
                format!(
                    "seed {}: |a|^2 = {na:.6}, |b|^2 = {nb:.6}, |c|^2 = {nc:.6}; {samples} samples written to {}",
                    ctx.seed,
                    path.display()
                )
            });
            Ok(())
        }
        None => write_out(None, &to_json(&doc)),
    }
}

fn qasm(ctx: &Ctx, circuit: &Path, out: Option<&Path>) -> Outcome {
    let circuit: Circuit = read_json(circuit)?;
    let text = export_qasm(&circuit);
    match out {
        Some(path) => {
            write_out(Some(path), &text)?;
            ctx.report(json!({"out": path, "lines": text.lines().count()}), || {
                format!("OpenQASM written to {}", path.display())
            });
            Ok(())
        }
        None if ctx.json => {
            println!("{}", json!({ "qasm": text }));
            Ok(())
        }
        None => write_out(None, &text),
    }
}

fn named(ctx: &Ctx, name: &str, p: f64) -> Outcome {
    let map: NamedMap = name.parse()?;
    let k = named_map(map, p)?;
    ctx.report(json!({"name": map.name(), "p": p, "k": k}), || {
        let parts: Vec<String> = k.as_slice().iter().map(|v| format!("{v}")).collect();
        format!("k = [{}]", parts.join(","))
    });
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        json: cli.json,
        seed: cli.seed,
    };
    match cli.command {
        Command::Synth { k, out } => synth(&ctx, &k, out.as_deref()),
        Command::Simulate { circuit, rho, out } => simulate(&ctx, &circuit, &rho, out.as_deref()),
        Command::Fidelity {
            k1,
            k2,
            brute_force,
        } => fidelity(&ctx, &k1, &k2, brute_force),
        Command::Scan { config, out, jobs } => scan(&ctx, &config, &out, jobs),
        Command::OneprFit {
            curve,
            restarts,
            out,
        } => onepr_fit(&ctx, &curve, restarts, out.as_deref()),
        Command::OneprRandom { samples, out } => onepr_random(&ctx, samples, out.as_deref()),
        Command::ExportQasm { circuit, out } => qasm(&ctx, &circuit, out.as_deref()),
        Command::NamedMap { name, p } => named(&ctx, &name, p),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
