mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gsa_core::baselines::{build_hea_meta, run_fixed, run_hea, run_rnd, HeaConfig, RndConfig};
use gsa_core::driver::{mse, run_gsa, GsaConfig, RunRecord};
use gsa_core::hamiltonian::{builtin_hamiltonian, exact_ground_energy, load_hamiltonian};
use gsa_core::meta::{profile, HamiltonianFamily, MetaObjective};
use gsa_core::optimize::{Ledger, TaskSpec, VqeObjective};
use gsa_core::pauli::PauliSum;
use gsa_core::space::{Encoding, SpaceConfig, StateSpace};

use config::Config;

#[derive(Parser)]
#[command(name = "gsa", version, about = "Variable-ansatz VQE search and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a method over a batch of seeds.
    Run(RunArgs),
    /// Count (and optionally list) the paths of a search space.
    Enumerate(EnumerateArgs),
    /// Print the exact ground energy of a Hamiltonian.
    Exact(TaskArgs),
    /// Merge run records into trace and scatter CSVs.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Gsa,
    Hea,
    Rnd,
    MetaGsa,
    MetaHea,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct TaskArgs {
    /// Hamiltonian file (`coefficient word` per line).
    #[arg(long, conflicts_with = "builtin")]
    hamiltonian: Option<PathBuf>,
    /// Built-in model as `name:qubits[:param]`, e.g. `tfim:4:1.0`.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "gsa")]
    method: Method,
    #[command(flatten)]
    task: TaskArgs,
    /// Family file (`value hamiltonian-path` per line) for the meta methods.
    #[arg(long, conflicts_with_all = ["hamiltonian", "builtin"])]
    family: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seeds and `a..b` ranges.
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `[noise] enabled`.
    #[arg(long, value_enum)]
    noise: Option<Switch>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    qubits: usize,
    #[arg(long)]
    layers: usize,
    #[arg(long, conflicts_with = "unconstrained")]
    constrained: bool,
    #[arg(long)]
    unconstrained: bool,
    /// Write every valid path to this file.
    #[arg(long)]
    list: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Directory holding `record_*.json` files.
    #[arg(long)]
    records: PathBuf,
    /// Output directory, default the records directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (u64, u64) = (a.parse()?, b.parse()?);
            seeds.extend(a..b);
        } else {
            seeds.push(part.parse().with_context(|| format!("bad seed `{part}`"))?);
        }
    }
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != seeds.len() {
        bail!("seeds must be distinct");
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    Ok(seeds)
}

fn parse_builtin(spec: &str) -> Result<(String, usize, Vec<f64>)> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default().to_string();
    let n: usize = parts
        .next()
        .ok_or_else(|| anyhow!("builtin `{spec}` needs a qubit count, e.g. tfim:4"))?
        .parse()
        .with_context(|| format!("bad qubit count in `{spec}`"))?;
    let params = parts.map(|p| p.parse::<f64>().with_context(|| format!("bad parameter `{p}`"))).collect::<Result<_>>()?;
    Ok((name, n, params))
}

fn load_task(args: &TaskArgs) -> Result<PauliSum> {
    match (&args.hamiltonian, &args.builtin) {
        (Some(path), _) => load_hamiltonian(path).with_context(|| format!("loading Hamiltonian {}", path.display())),
        (None, Some(spec)) => {
            let (name, n, params) = parse_builtin(spec)?;
            Ok(builtin_hamiltonian(&name, n, &params)?)
        }
        (None, None) => bail!("give --hamiltonian FILE or --builtin NAME:QUBITS"),
    }
}

/// `-1.0` becomes `-1.00000000000`: twelve significant digits.
fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.*}", (digits - 1) as usize);
    }
    let decimals = (digits - 1 - x.abs().log10().floor() as i32).max(0);
    format!("{x:.*}", decimals as usize)
}

fn write_record(out: &Path, r: &RunRecord) -> Result<()> {
    fs::write(out.join(format!("record_seed{}.json", r.seed)), r.to_json()?)?;
    fs::write(out.join(format!("trace_seed{}.csv", r.seed)), r.trace_csv())?;
    Ok(())
}

fn summary_csv(records: &[RunRecord], exact: Option<f64>) -> Result<String> {
    let mut s = String::from("seed,final_energy,abs_error,quantum_cost\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    for r in records {
        writeln!(s, "{},{:.12},{},{}", r.seed, r.cost, opt(r.abs_error), r.quantum_cost)?;
    }
    let k = records.len() as f64;
    let finals: Vec<f64> = records.iter().map(|r| r.cost).collect();
    let mean_err = exact.map(|_| records.iter().filter_map(|r| r.abs_error).sum::<f64>() / k);
    let mean_qc = records.iter().map(|r| r.quantum_cost as f64).sum::<f64>() / k;
    writeln!(s, "mean,{:.12},{},{:.1}", finals.iter().sum::<f64>() / k, opt(mean_err), mean_qc)?;
    let best = records.iter().min_by(|a, b| a.cost.total_cmp(&b.cost)).expect("non-empty batch");
    writeln!(s, "best,{:.12},{},{}", best.cost, opt(best.abs_error), best.quantum_cost)?;
    let m = exact.map(|e| mse(&finals, e)).transpose()?;
    writeln!(s, "mse,,{},", opt(m))?;
    Ok(s)
}

fn meta_family(args: &RunArgs, cfg: &Config) -> Result<(HamiltonianFamily, HamiltonianFamily)> {
    if let Some(path) = &args.family {
        let fam = HamiltonianFamily::load(path).with_context(|| format!("loading family {}", path.display()))?;
        return Ok((fam.subset(&cfg.meta.training)?, fam.subset(&cfg.meta.grid)?));
    }
    let Some(spec) = &args.task.builtin else {
        bail!("meta methods need --family FILE or --builtin NAME:QUBITS");
    };
    let (name, n, _) = parse_builtin(spec)?;
    Ok((
        HamiltonianFamily::builtin(&name, n, &cfg.meta.training)?,
        HamiltonianFamily::builtin(&name, n, &cfg.meta.grid)?,
    ))
}

fn exact_sum(fam: &HamiltonianFamily) -> Option<f64> {
    fam.points().iter().map(|(_, h)| exact_ground_energy(h).ok()).sum()
}

fn profile_csv(grid: &HamiltonianFamily, values: &[(f64, f64)]) -> Result<String> {
    let mut s = String::from("x,energy,exact,abs_error\n");
    for ((x, e), (_, h)) in values.iter().zip(grid.points()) {
        let exact = exact_ground_energy(h)?;
        writeln!(s, "{x},{e:.12},{exact:.12},{:.12}", (e - exact).abs())?;
    }
    Ok(s)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut cfg = Config::load(args.config.as_deref())?;
    if let Some(sw) = args.noise {
        cfg.noise.enabled = sw == Switch::On;
    }
    let noise = cfg.noise.spec()?;
    let seeds = parse_seeds(&args.seeds)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let descent = cfg.gsa.retraining();
    let mut records = Vec::new();
    let exact;
    match args.method {
        Method::Gsa | Method::Hea | Method::Rnd => {
            if args.family.is_some() {
                bail!("--family only applies to the meta methods");
            }
            let h = load_task(&args.task)?;
            let n = h.n_qubits();
            exact = exact_ground_energy(&h).ok();
            let obj = VqeObjective::new(TaskSpec::ground_state(h)?, noise);
            let layers = match args.method {
                Method::Rnd => cfg.rnd.layers.unwrap_or(cfg.gsa.layers),
                _ => cfg.gsa.layers,
            };
            let space = StateSpace::new(SpaceConfig::new(n, layers))?;
            for &seed in &seeds {
                let ledger = Ledger::default();
                let r = match args.method {
                    Method::Gsa => {
                        let gcfg = GsaConfig { seed, ..cfg.gsa.clone() };
                        run_gsa(&obj, &space, &gcfg, exact, &ledger)?.record
                    }
                    Method::Hea => {
                        let h = HeaConfig { n_qubits: n, layers: cfg.hea.layers };
                        run_hea(&obj, &h, &descent, seed, exact, &ledger)?
                    }
                    _ => {
                        let rc = RndConfig { samples: cfg.rnd.samples, layers, retrain_all: cfg.rnd.retrain_all };
                        run_rnd(&obj, &space, &rc, &descent, seed, exact, &ledger)?
                    }
                };
                write_record(&args.out, &r)?;
                records.push(r);
            }
        }
        Method::MetaGsa | Method::MetaHea => {
            let (training, grid) = meta_family(args, &cfg)?;
            let n = training.n_qubits();
            exact = exact_sum(&training);
            let obj = MetaObjective::new(&training, noise)?;
            let mut space_cfg = SpaceConfig::new(n, cfg.meta.layers);
            space_cfg.encodings = Encoding::ALL.to_vec();
            let space = StateSpace::new(space_cfg)?;
            let hea = build_hea_meta(n, cfg.meta.encoding_layers, cfg.meta.processing_layers)?;
            for &seed in &seeds {
                let ledger = Ledger::default();
                let mut r = if args.method == Method::MetaGsa {
                    let gcfg = GsaConfig { seed, layers: cfg.meta.layers, ..cfg.gsa.clone() };
                    run_gsa(&obj, &space, &gcfg, exact, &ledger)?.record
                } else {
                    let name = format!("hea-{}-{}", cfg.meta.encoding_layers, cfg.meta.processing_layers);
                    let layers = cfg.meta.encoding_layers + cfg.meta.processing_layers;
                    run_fixed(&name, &obj, &hea, layers, &descent, seed, exact, &ledger)?
                };
                r.method = format!("meta-{}", r.method);
                let path = gsa_core::space::AnsatzPath::parse(n, &r.path)?;
                let values = profile(&grid, &path, &r.params, &noise, &ledger)?;
                r.quantum_cost = ledger.total();
                r.breakdown = ledger.summary();
                fs::write(args.out.join(format!("profile_seed{seed}.csv")), profile_csv(&grid, &values)?)?;
                write_record(&args.out, &r)?;
                records.push(r);
            }
        }
    }
    let summary = summary_csv(&records, exact)?;
    fs::write(args.out.join("summary.csv"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<()> {
    let space = StateSpace::new(SpaceConfig::new(args.qubits, args.layers))?;
    let constrained = !args.unconstrained;
    let count = space.count_paths(constrained)?;
    println!("{count}");
    if let Some(file) = &args.list {
        if !constrained {
            bail!("--list needs the constrained space");
        }
        let paths = space.enumerate_paths(10_000_000)?;
        let mut text = String::new();
        for p in paths {
            writeln!(text, "{p}")?;
        }
        fs::write(file, text).with_context(|| format!("writing {}", file.display()))?;
    }
    Ok(())
}

fn cmd_exact(args: &TaskArgs) -> Result<()> {
    let h = load_task(args)?;
    println!("{}", significant(exact_ground_energy(&h)?, 12));
    Ok(())
}

fn cmd_plotdata(args: &PlotArgs) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.records)
        .with_context(|| format!("reading {}", args.records.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("record_") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no record_*.json files in {}", args.records.display());
    }
    let mut records = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f)?;
        records.push(RunRecord::from_json(&text).with_context(|| format!("parsing {}", f.display()))?);
    }
    records.sort_by(|a, b| (a.method.as_str(), a.seed).cmp(&(b.method.as_str(), b.seed)));
    let mean_final = records.iter().map(|r| r.cost).sum::<f64>() / records.len() as f64;
    let mut trace = String::from("method,seed,quantum_cost,best_cost_so_far,stage,mean_final_cost\n");
    let mut scatter = String::from("method,seed,quantum_cost,final_cost,final_error,mean_final_cost\n");
    for r in &records {
        for p in &r.trace {
            writeln!(
                trace,
                "{},{},{},{:.12},{},{mean_final:.12}",
                r.method,
                r.seed,
                p.quantum_cost,
                p.best_cost_so_far,
                p.stage.label()
            )?;
        }
        let err = r.abs_error.map(|e| format!("{e:.12}")).unwrap_or_default();
        writeln!(scatter, "{},{},{},{:.12},{err},{mean_final:.12}", r.method, r.seed, r.quantum_cost, r.cost)?;
    }
    let out = args.out.clone().unwrap_or_else(|| args.records.clone());
    fs::create_dir_all(&out)?;
    fs::write(out.join("trace.csv"), trace)?;
    fs::write(out.join("scatter.csv"), scatter)?;
    println!("{} records -> {}", records.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Plotdata(a) => cmd_plotdata(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
