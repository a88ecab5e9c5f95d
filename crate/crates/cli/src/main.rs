//! `gensift`: sift elements, benchmark chains and validate chain files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use gensift::chain::{compile_chain, default_oracle_cap, validate_chain, ChainSpec, Mode, SiftChain};
use gensift::random::ProductReplacement;
use gensift::sift::Sifter;
use gensift::{BlackBoxGroup, GroupElement, MultCounter, Slp};

#[derive(Parser)]
#[command(name = "gensift", version, about = "Generalized sifting in black-box groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an element as a word in the generators.
    Sift {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Straight-line program over the group generators giving the element.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        slp: Option<PathBuf>,
        /// Sift a pseudo-random element drawn with `--seed`.
        #[arg(long)]
        random: bool,
    },
    /// Average multiplications per sift over pseudo-random elements.
    Bench {
        #[arg(long)]
        group: PathBuf,
        /// Chain files over the same group; one row each.
        #[arg(long, required = true)]
        chain: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check the claims of a chain file.
    Verify {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        /// Skip enumeration: witness orders and 𝒯-set acceptance only.
        #[arg(long = "static")]
        static_only: bool,
        /// Largest group to enumerate; defaults to what fits in 256 MiB.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Print a pseudo-random element as a straight-line program.
    Random {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A usage or input problem: exit status 2.
struct InputError(anyhow::Error);

fn input<T>(r: Result<T>) -> std::result::Result<T, InputError> {
    r.map_err(InputError)
}

fn load_group(path: &Path) -> Result<BlackBoxGroup> {
    BlackBoxGroup::load(path).with_context(|| format!("loading group {}", path.display()))
}

fn load_chain(path: &Path, group: &BlackBoxGroup) -> Result<(ChainSpec, SiftChain)> {
    let spec = ChainSpec::load(path).with_context(|| format!("loading chain {}", path.display()))?;
    let chain = compile_chain(&spec, group).with_context(|| format!("compiling chain {}", path.display()))?;
    Ok((spec, chain))
}

fn random_element(group: &BlackBoxGroup, seed: u64) -> (GroupElement, Slp) {
    let gens: Vec<(GroupElement, Slp)> =
        group.generators().iter().enumerate().map(|(i, g)| (g.clone(), Slp::generator(group.generators().len(), i))).collect();
    let counter = MultCounter::new();
    let mut pr = ProductReplacement::new(&gens, gens.len(), seed, &counter);
    pr.next_with_slp(&counter)
}

fn sift(group: &Path, chain: &Path, epsilon: f64, seed: u64, slp: Option<&Path>) -> std::result::Result<bool, InputError> {
    let group = input(load_group(group))?;
    let (_, chain) = input(load_chain(chain, &group))?;
    let g = match slp {
        Some(path) => {
            let text = input(std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
            let w = input(Slp::parse(&text).with_context(|| format!("parsing {}", path.display())))?;
            input(w.evaluate(group.generators()).context("evaluating the input program"))?
        }
        None => random_element(&group, seed).0,
    };
    let mut sifter = input(Sifter::new(&chain, epsilon, seed).map_err(Into::into))?;
    let out = input(sifter.sift(&g).map_err(Into::into))?;
    match out.result {
        Ok(w) => {
            let x = input(w.evaluate(group.generators()).map_err(Into::into))?;
            if !(&g * &x).is_identity() {
                println!("FAIL");
                return Ok(false);
            }
            print!("{w}");
            println!("VERIFIED gx=1");
            Ok(true)
        }
        Err(e) => {
            println!("FAIL {e:?}");
            Ok(false)
        }
    }
}

/// Per-worker seed: a splitmix64 step on the master seed.
fn worker_seed(seed: u64, worker: usize) -> u64 {
    let mut z = seed.wrapping_add((worker as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Total multiplications and failures over `trials` sifts of fresh
/// pseudo-random elements.
fn run_worker(group: &BlackBoxGroup, chain: &SiftChain, trials: usize, epsilon: f64, seed: u64) -> Result<(u64, usize)> {
    let counter = MultCounter::new();
    let mut pr = ProductReplacement::untracked(group.generators(), seed, &counter);
    let mut sifter = Sifter::new(chain, epsilon, seed ^ 0x5151)?;
    let (mut mults, mut failures) = (0, 0);
    for _ in 0..trials {
        let g = pr.next_element(&counter);
        let out = sifter.sift(&g)?;
        mults += out.mults;
        if !out.is_success() {
            failures += 1;
        }
    }
    Ok((mults, failures))
}

fn bench(group: &Path, chains: &[PathBuf], trials: usize, epsilon: f64, seed: u64, jobs: usize) -> std::result::Result<(), InputError> {
    let group_path = group;
    let group = input(load_group(group))?;
    let mut loaded = Vec::new();
    for c in chains {
        loaded.push((c, input(load_chain(c, &group))?));
    }
    println!("group\tchain\ttrials\tseconds\tavg_mults\tfailures");
    if trials == 0 {
        return Ok(());
    }
    let jobs = jobs.clamp(1, trials);
    for (path, (spec, chain)) in &loaded {
        let start = Instant::now();
        let results: Vec<Result<(u64, usize)>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let share = trials / jobs + usize::from(j < trials % jobs);
                    let (group, chain) = (&group, chain);
                    s.spawn(move || run_worker(group, chain, share, epsilon, worker_seed(seed, j)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let (mut mults, mut failures) = (0u64, 0usize);
        for r in results {
            let (m, f) = input(r.with_context(|| format!("sifting with {}", path.display())))?;
            mults += m;
            failures += f;
        }
        let label = group_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        println!(
            "{label}\t{}\t{trials}\t{:.3}\t{:.1}\t{failures}",
            spec.name,
            start.elapsed().as_secs_f64(),
            mults as f64 / trials as f64
        );
    }
    Ok(())
}

fn verify(group: &Path, chain: &Path, static_only: bool, cap: Option<usize>) -> std::result::Result<bool, InputError> {
    let group = input(load_group(group))?;
    let spec = input(ChainSpec::load(chain).with_context(|| format!("loading chain {}", chain.display())))?;
    let mode = if static_only { Mode::Static } else { Mode::Oracle { cap: cap.unwrap_or_else(|| default_oracle_cap(&group)) } };
    let report = input(validate_chain(&spec, &group, mode).with_context(|| format!("validating {}", spec.name)))?;
    print!("{report}");
    println!("{} claims, {} failed", report.claims.len(), report.failures());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sift { group, chain, epsilon, seed, slp, random: _ } => sift(group, chain, *epsilon, *seed, slp.as_deref()),
        Command::Bench { group, chain, trials, epsilon, seed, jobs } => bench(group, chain, *trials, *epsilon, *seed, *jobs).map(|()| true),
        Command::Verify { group, chain, static_only, cap } => verify(group, chain, *static_only, *cap),
        Command::Random { group, seed } => input(load_group(group)).map(|g| {
            print!("{}", random_element(&g, *seed).1);
            true
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
