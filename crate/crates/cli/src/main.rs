use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use perfgen::exactalgs::{classify_gs, invariants, maximal_cliques};
use perfgen::graph::{graph6_decode, graph6_decode_all, graph6_encode};
use perfgen::graphon::t_counts;
use perfgen::harness::THREADS_ENV;
use perfgen::lndist::{verify_concentration, DEFAULT_CONCENTRATION_N0};
use perfgen::partitions::{harper_moments, sample_uniform};
use perfgen::structure::{alpha_omega_fast, clique_colour_2, hamilton, recover_arrangement, HamiltonOutcome};
use perfgen::{
    run, trial_rng, Arrangement, Error, ExperimentName, ExperimentSpec, Generator, Graph, LDistribution, SignMode,
};

#[derive(Parser)]
#[command(name = "perfgen", version, about = "Perfect graph sampling and analysis")]
#[command(after_help = "Worker threads are read from PERFGEN_THREADS (default: all cores).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graph6,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs, one graph6 line or one JSON object per graph.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "mixed", value_parser = parse_sign)]
        sign: SignMode,
        #[arg(long, value_enum, default_value_t = Format::Graph6)]
        format: Format,
        /// Write the generating arrangements here as a JSON array.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Analyse every graph in a graph6 file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Arrangement JSON (one object, or an array matching the graphs).
        /// Recovered from the degree split when omitted.
        #[arg(long)]
        arrangement: Option<PathBuf>,
        #[arg(long)]
        invariants: bool,
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        cliques: bool,
        #[arg(long)]
        hamilton: bool,
        #[arg(long)]
        clique_colour: bool,
        #[arg(long)]
        fast_invariants: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact summary of the central-set size law L(n).
    Ldist {
        #[arg(short)]
        n: usize,
        /// Report P(|X - mu| >= X).
        #[arg(long)]
        tail: Option<f64>,
        #[arg(long)]
        verify_concentration: bool,
    },
    /// Sample uniform set partitions of 0..m.
    Partition {
        #[arg(short)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print summary statistics instead of the partitions.
        #[arg(long)]
        stats: bool,
    },
    /// Homomorphism densities of a pattern in each graph of a graph6 file.
    Density {
        #[arg(long = "in")]
        input: PathBuf,
        /// K2, K3, P4, C4 or g6:<graph6>.
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value = "wp")]
        graphon: String,
    },
    /// Run a seeded Monte Carlo experiment.
    Experiment {
        #[arg(value_parser = parse_experiment)]
        name: ExperimentName,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "mixed", value_parser = parse_sign)]
        sign: SignMode,
        /// graph6 pattern for trichotomy and densities.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_sign(s: &str) -> std::result::Result<SignMode, String> {
    match s {
        "+" | "plus" => Ok(SignMode::Plus),
        "-" | "minus" => Ok(SignMode::Minus),
        "mixed" => Ok(SignMode::Mixed),
        _ => Err(format!("expected +, - or mixed, got {s:?}")),
    }
}

fn parse_experiment(s: &str) -> std::result::Result<ExperimentName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var(THREADS_ENV) {
        if t.trim().parse::<usize>().map_or(true, |t| t == 0) {
            eprintln!("error: {THREADS_ENV} must be a positive integer, got {t:?}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let scale = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_scale));
            ExitCode::from(if scale { 3 } else { 2 })
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen {
            n,
            count,
            seed,
            sign,
            format,
            provenance,
        } => gen(n, count, seed, sign, format, provenance.as_deref()),
        Command::Analyze {
            input,
            arrangement,
            invariants,
            classify,
            cliques,
            hamilton,
            clique_colour,
            fast_invariants,
            seed,
        } => {
            let flags = AnalyzeFlags {
                invariants,
                classify,
                cliques,
                hamilton,
                clique_colour,
                fast_invariants,
            };
            analyze(&input, arrangement.as_deref(), flags, seed)
        }
        Command::Ldist {
            n,
            tail,
            verify_concentration,
        } => ldist(n, tail, verify_concentration),
        Command::Partition { m, samples, seed, stats } => partition(m, samples, seed, stats),
        Command::Density { input, pattern, graphon } => density(&input, &pattern, &graphon),
        Command::Experiment {
            name,
            n,
            trials,
            seed,
            sign,
            pattern,
            json,
            csv,
        } => {
            let spec = ExperimentSpec {
                name,
                n,
                trials,
                seed,
                sign,
                pattern,
            };
            let report = run(&spec)?;
            let payload = report.to_json();
            match json {
                Some(p) => write(&p, &payload)?,
                None => println!("{payload}"),
            }
            if let Some(p) = csv {
                write(&p, &report.to_csv())?;
            }
            Ok(())
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_graphs(path: &Path) -> Result<Vec<Graph>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let graphs = graph6_decode_all(&bytes)?;
    if graphs.is_empty() {
        bail!("{} holds no graphs", path.display());
    }
    Ok(graphs)
}

fn gen(n: usize, count: usize, seed: u64, sign: SignMode, format: Format, provenance: Option<&Path>) -> Result<()> {
    if n == 0 {
        return Err(anyhow!("n must be at least 1"));
    }
    let generator = Generator::new(n);
    let mut arrangements = Vec::with_capacity(count);
    for t in 0..count {
        let (g, arr) = generator.gen_with(&mut trial_rng(seed, t as u64), sign);
        match format {
            Format::Graph6 => println!("{}", graph6_encode(&g)),
            Format::Json => println!("{}", serde_json::to_string(&g.to_json())?),
        }
        arrangements.push(arr);
    }
    if let Some(p) = provenance {
        write(p, &serde_json::to_string_pretty(&arrangements)?)?;
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct AnalyzeFlags {
    invariants: bool,
    classify: bool,
    cliques: bool,
    hamilton: bool,
    clique_colour: bool,
    fast_invariants: bool,
}

impl AnalyzeFlags {
    fn needs_arrangement(self) -> bool {
        self.hamilton || self.clique_colour || self.fast_invariants
    }
}

fn load_arrangements(path: &Path, count: usize) -> Result<Vec<Arrangement>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).context("parsing arrangement JSON")?;
    let list: Vec<Arrangement> = match v {
        Value::Array(_) => serde_json::from_value(v)?,
        other => vec![serde_json::from_value(other)?],
    };
    if list.len() != count {
        bail!("{} arrangements for {count} graphs", list.len());
    }
    Ok(list)
}

fn analyze(input: &Path, arrangement: Option<&Path>, flags: AnalyzeFlags, seed: u64) -> Result<()> {
    let graphs = read_graphs(input)?;
    let given = arrangement.map(|p| load_arrangements(p, graphs.len())).transpose()?;
    let mut out = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let mut r = serde_json::Map::new();
        r.insert("n".into(), json!(g.n()));
        r.insert("edges".into(), json!(g.edge_count()));
        if flags.invariants {
            r.insert("invariants".into(), serde_json::to_value(invariants(g)?)?);
        }
        if flags.classify {
            r.insert("classify".into(), serde_json::to_value(classify_gs(g)?)?);
        }
        if flags.cliques {
            r.insert("maximal_cliques".into(), serde_json::to_value(maximal_cliques(g)?)?);
        }
        if flags.needs_arrangement() {
            let arr = match &given {
                Some(list) => list[i].clone(),
                None => recover_arrangement(g).ok_or_else(|| anyhow!("graph {i}: no arrangement recovered from the degree split"))?,
            };
            arr.validate(g).with_context(|| format!("graph {i}"))?;
            if flags.fast_invariants {
                r.insert("fast_invariants".into(), serde_json::to_value(alpha_omega_fast(g, &arr)?)?);
            }
            if flags.clique_colour {
                r.insert("clique_colouring".into(), serde_json::to_value(clique_colour_2(g, &arr)?)?);
            }
            if flags.hamilton {
                let out = hamilton(g, &arr, &mut trial_rng(seed, i as u64))?;
                let verified = out.verifies(g);
                let body = match out {
                    HamiltonOutcome::Cycle(c) => json!({ "outcome": "cycle", "cycle": c }),
                    HamiltonOutcome::Obstruction(s) => json!({ "outcome": "obstruction", "stable_set": s }),
                    HamiltonOutcome::Failure(reason) => json!({ "outcome": "failure", "reason": reason }),
                };
                r.insert("hamilton".into(), json!({ "result": body, "verified": verified }));
            }
            r.insert("arrangement".into(), serde_json::to_value(&arr)?);
        }
        out.push(Value::Object(r));
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn ldist(n: usize, tail: Option<f64>, verify: bool) -> Result<()> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    let needs_mu = tail.is_some() || verify;
    if needs_mu && n < 3 {
        bail!("--tail and --verify-concentration need n >= 3");
    }
    let d = LDistribution::build(n);
    let pmf: Vec<f64> = (0..=n).map(|k| d.pmf(k)).collect();
    let mut r = json!({
        "n": n,
        "mu": d.mu,
        "mean": d.mean(),
        "variance": d.variance(),
        "argmax": d.argmax(),
        "pmf": pmf,
    });
    if let Some(x) = tail {
        r["tail"] = json!({ "x": x, "p": d.tail_ge(x), "log2_p": d.log_tail_ge(x).lg });
    }
    if verify {
        let xs: Vec<f64> = (3..).take_while(|&x| x * x <= n).map(|x| x as f64).collect();
        let report = verify_concentration(n, &xs, DEFAULT_CONCENTRATION_N0);
        r["concentration"] = json!({ "passed": report.passed(), "report": report });
    }
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}

fn partition(m: usize, samples: usize, seed: u64, stats: bool) -> Result<()> {
    if m == 0 {
        bail!("m must be at least 1");
    }
    let parts: Vec<_> = (0..samples)
        .map(|t| sample_uniform(m, &mut trial_rng(seed, t as u64)))
        .collect();
    if !stats {
        let blocks: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| p.blocks()).collect();
        println!("{}", serde_json::to_string(&blocks)?);
        return Ok(());
    }
    let counts: Vec<f64> = parts.iter().map(|p| p.block_count() as f64).collect();
    let maxes: Vec<f64> = parts.iter().map(|p| p.stats().max_block as f64).collect();
    let (mean, var) = harper_moments(m);
    let r = json!({
        "m": m,
        "samples": samples,
        "block_count": perfgen::harness::Moments::of(&counts),
        "max_block_mean": maxes.iter().sum::<f64>() / samples.max(1) as f64,
        "exact_block_count_mean": mean,
        "exact_block_count_variance": var,
    });
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}

fn pattern_graph(p: &str) -> Result<Graph> {
    Ok(match p {
        "K2" => Graph::complete(2),
        "K3" => Graph::complete(3),
        "P4" => Graph::path(4),
        "C4" => Graph::cycle(4),
        other => match other.strip_prefix("g6:") {
            Some(s) => graph6_decode(s.as_bytes())?,
            None => bail!("unknown pattern {other:?}; expected K2, K3, P4, C4 or g6:<graph6>"),
        },
    })
}

fn density(input: &Path, pattern: &str, graphon: &str) -> Result<()> {
    if graphon != "wp" {
        bail!("unknown graphon {graphon:?}; only wp is available");
    }
    let f = pattern_graph(pattern)?;
    let graphs = read_graphs(input)?;
    let reports = graphs.iter().map(|g| t_counts(&f, g)).collect::<perfgen::Result<Vec<_>>>()?;
    println!("{}", serde_json::to_string_pretty(&reports)?);
    Ok(())
}
