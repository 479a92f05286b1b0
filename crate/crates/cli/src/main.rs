//! `coreshare`: bounds, star packings and secret sharing schemes for graphs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 the
//! graph is not a tree where a tree is required.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::One;
use thiserror::Error;

use coreshare::core_analysis::{
    is_maximal_weighting, max_core_bruteforce, maximalize_weights, sigma_of_tree, tree_core_sizes, WeightFunction,
    DEFAULT_BRUTE_CAP,
};
use coreshare::entropy::{entropy_lower_bound, ENTROPY_CAP};
use coreshare::field::FieldElement;
use coreshare::graph::{parse_graph, parse_weights, root_at, Graph, GraphError, RootChoice};
use coreshare::scheme::{
    build_scheme, verify_exhaustive, verify_linear, Scheme, SchemeError, SharesBundle, DEFAULT_EXHAUSTIVE_LIMIT,
};
use coreshare::star::{extract_stars, orient_edges, star_cover_rate_lp, verify_packing};
use coreshare::Rational;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("graph is not a tree")]
    NotATree,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NotATree => 3,
        }
    }
}

fn input(e: impl Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NotATree => CliError::NotATree,
            e => input(e),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::NotATree | SchemeError::Graph(GraphError::NotATree) => CliError::NotATree,
            e => input(e),
        }
    }
}

/// Whether every check passed.
type Outcome = Result<bool, CliError>;

#[derive(Parser)]
#[command(name = "coreshare", version, about = "Secret sharing bounds and schemes for graph access structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the largest core, the bounds it implies and the star cover rate.
    Analyze(AnalyzeArgs),
    /// Build and verify the optimal star packing of a tree.
    Pack(PackArgs),
    /// Build, deal, reconstruct and verify the linear scheme of a tree.
    #[command(subcommand)]
    Scheme(SchemeCommand),
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Largest non-tree graph searched exhaustively for cores.
    #[arg(long, default_value_t = DEFAULT_BRUTE_CAP)]
    brute_max: usize,
    /// Also solve the entropy LP (graphs with at most 12 vertices).
    #[arg(long)]
    entropy: bool,
}

#[derive(Args)]
struct PackArgs {
    file: PathBuf,
    /// File of `weight <v> <k>` lines; must be a maximal weighting.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Root of the orientation; defaults to the first non-leaf vertex.
    #[arg(long)]
    root: Option<String>,
}

#[derive(Subcommand)]
enum SchemeCommand {
    /// Build the scheme of a tree and write it as JSON.
    Build {
        file: PathBuf,
        /// Prime field size; defaults to the smallest prime at least the star count.
        #[arg(long)]
        field: Option<u64>,
        #[arg(long)]
        root: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Deal shares of a secret.
    Deal {
        #[arg(long)]
        scheme: PathBuf,
        /// Comma-separated field elements, one per secret coordinate.
        #[arg(long)]
        secret: String,
        /// Comma-separated masks, one per star.
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        random: Option<String>,
        /// Seed of the ChaCha8 mask generator.
        #[arg(long)]
        seed: Option<u64>,
        /// Zero-pad every share to length 2c - 1.
        #[arg(long)]
        pad: bool,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Recover the secret from the shares of the two ends of an edge.
    Reconstruct {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        shares: PathBuf,
        /// The edge as `u,v`.
        #[arg(long)]
        edge: String,
    },
    /// Check correctness on every edge and privacy on every maximal independent set.
    Verify {
        #[arg(long)]
        scheme: PathBuf,
        /// Enumerate every secret and mask instead of computing ranks.
        #[arg(long)]
        exhaustive: bool,
        /// Largest number of assignments the exhaustive check may enumerate.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        limit: u128,
    },
    /// Print the share matrix of every vertex.
    Matrices {
        #[arg(long)]
        scheme: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_scheme(path: &Path) -> Result<Scheme, CliError> {
    Scheme::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<FieldElement>, CliError> {
    text.split(',')
        .map(|x| x.trim().parse().map_err(|_| input(format!("{what}: `{x}` is not a non-negative integer"))))
        .collect()
}

fn join(values: &[FieldElement]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn analyze(args: &AnalyzeArgs) -> Outcome {
    let g = read_graph(&args.file)?;
    let tree = g.is_tree();
    let c = if tree {
        tree_core_sizes(&root_at(&g, RootChoice::Auto)?).map_err(input)?.global_c
    } else {
        max_core_bruteforce(&g, args.brute_max).map_err(input)?.size as u64
    };
    let lower = sigma_of_tree(c).map_err(input)?;
    let s = star_cover_rate_lp(&g).map_err(input)?.value;
    let mut line = format!("tree={tree} c={c} lower={lower} s={s}");
    if args.entropy {
        if g.vertex_count() > ENTROPY_CAP {
            eprintln!("entropy LP skipped: {} vertices exceed the cap of {ENTROPY_CAP}", g.vertex_count());
        } else {
            line += &format!(" entropy={}", entropy_lower_bound(&g).map_err(input)?);
        }
    }
    if tree {
        let rho = Rational::one() / &lower;
        line += &format!(" sigma={lower} rho={rho}");
    }
    println!("{line}");
    Ok(true)
}

fn pack(args: &PackArgs) -> Outcome {
    let g = read_graph(&args.file)?;
    if !g.is_tree() {
        return Err(CliError::NotATree);
    }
    let choice = match &args.root {
        Some(name) => RootChoice::Vertex(g.vertex(name)?),
        None => RootChoice::Auto,
    };
    let rooted = root_at(&g, choice)?;
    let c = tree_core_sizes(&rooted).map_err(input)?.global_c;
    let given = match &args.weights {
        Some(path) => Some(parse_weights(&g, &read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?),
        None if g.has_weights() => Some(g.weights().to_vec()),
        None => None,
    };
    let weights = match given {
        Some(w) => {
            let w = WeightFunction::new(w).map_err(input)?;
            if !is_maximal_weighting(&g, &w, c) {
                return Err(input(format!("weights are not a maximal weighting for c = {c}")));
            }
            w
        }
        None => maximalize_weights(&g, c).map_err(input)?,
    };
    let orientation = orient_edges(&rooted, &weights, c).map_err(input)?;
    let packing = extract_stars(&rooted, &orientation);
    let report = verify_packing(&g, &packing, c).map_err(input)?;
    println!("c={c} root={} stars={}", g.name(rooted.root()), packing.stars.len());
    for &(u, v) in g.edges() {
        println!("out {} {} {}", g.name(u), g.name(v), orientation.out(u, v));
        println!("out {} {} {}", g.name(v), g.name(u), orientation.out(v, u));
    }
    println!("{report}");
    Ok(report.pass)
}

fn scheme(cmd: &SchemeCommand) -> Outcome {
    match cmd {
        SchemeCommand::Build { file, field, root, output } => {
            let g = read_graph(file)?;
            let root = root.as_deref().map(|r| g.vertex(r)).transpose()?;
            let sch = build_scheme(&g, *field, root)?;
            write(output, &sch.to_json())?;
            println!("c={} m={} p={} max_share={}", sch.c(), sch.star_count(), sch.prime(), sch.max_share_len());
            Ok(true)
        }
        SchemeCommand::Deal { scheme, secret, random, seed, pad, output } => {
            let sch = read_scheme(scheme)?;
            let secret = parse_list(secret, "secret")?;
            let randomness = match (random, seed) {
                (Some(r), _) => parse_list(r, "randomness")?,
                (None, Some(seed)) => sch.seeded_randomness(*seed),
                (None, None) => return Err(input("either --random or --seed is required")),
            };
            let mut shares = sch.deal(&secret, &randomness)?;
            if *pad {
                shares = sch.pad(&shares);
            }
            write(output, &SharesBundle::new(&sch, &shares).to_json())?;
            Ok(true)
        }
        SchemeCommand::Reconstruct { scheme, shares, edge } => {
            let sch = read_scheme(scheme)?;
            let bundle = SharesBundle::from_json(&read(shares)?)?;
            let Some((u, v)) = edge.split_once(',') else {
                return Err(input(format!("edge `{edge}` is not of the form u,v")));
            };
            let (u, v) = (u.trim(), v.trim());
            let g = sch.tree();
            let secret = sch.reconstruct(g.vertex(u)?, g.vertex(v)?, bundle.share(&sch, u)?, bundle.share(&sch, v)?)?;
            println!("{}", join(&secret));
            Ok(true)
        }
        SchemeCommand::Verify { scheme, exhaustive, limit } => {
            let sch = read_scheme(scheme)?;
            let report = if *exhaustive { verify_exhaustive(&sch, *limit)? } else { verify_linear(&sch)? };
            print!("{report}");
            Ok(report.pass())
        }
        SchemeCommand::Matrices { scheme } => {
            let sch = read_scheme(scheme)?;
            let c = sch.c() as usize;
            let columns: Vec<String> =
                (0..c).map(|i| format!("s{i}")).chain((0..sch.star_count()).map(|j| format!("r{j}"))).collect();
            println!("columns {}", columns.join(" "));
            for (v, m) in sch.emit_matrices().iter().enumerate() {
                println!("M {}", sch.tree().name(v));
                print!("{m}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Pack(args) => pack(args),
        Command::Scheme(cmd) => scheme(cmd),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
