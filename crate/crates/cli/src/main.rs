//! `ckoc`: solve, check and generate connected k-vertex one-center instances.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ckoc_core::arrangement::{solve_weighted_graph_with, Strategy};
use ckoc_core::feasibility::{is_feasible_graph, FeasibilityResult};
use ckoc_core::generate::{random_graph, GenParams};
use ckoc_core::graph::emit_instance;
use ckoc_core::klevel::{build_chains, kth_level, solve_unweighted_graph};
use ckoc_core::oracle::{brute_lambda, LAMBDA_CAP};
use ckoc_core::tree_solver::{is_feasible_tree, solve_unweighted_tree, solve_weighted_tree_with};
use ckoc_core::{all_pairs_distances, parse_instance, Error, Graph, Instance, Rational, Solution};

#[derive(Parser, Debug)]
#[command(name = "ckoc", version, about = "Connected k-vertex one-center solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print the solution as JSON.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        #[arg(long, value_enum, default_value_t = Search::Auto)]
        search: Search,
        /// Report the wall time on stderr.
        #[arg(long)]
        timing: bool,
    },
    /// Decide whether a value of λ admits k covered vertices.
    Feasible {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        lambda: Rational,
    },
    /// Compare every solver with the brute-force oracle on random instances.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        n: usize,
        /// Fraction of the non-tree vertex pairs that become edges.
        #[arg(long, default_value_t = 0.0)]
        density: f64,
        #[arg(long)]
        weighted: bool,
        /// Generate a tree (ignores --density).
        #[arg(long)]
        tree: bool,
        /// Defaults to half of n, rounded up.
        #[arg(long)]
        k: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the solvers on random instances and print CSV.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [20usize, 40, 80])]
        sizes: Vec<usize>,
        /// Defaults to a quarter of n.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Print the k-th level of the per-edge distance chains (unit weights only).
    Klevel {
        #[command(flatten)]
        input: InputArgs,
        /// Print the level as JSON, one object per edge.
        #[arg(long)]
        dump: bool,
        /// Restrict to the edge `u,v` (1-based ids).
        #[arg(long, value_delimiter = ',')]
        edge: Option<Vec<usize>>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Instance file, or `-` for stdin.
    instance: PathBuf,
    /// Override the k given in the instance.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    /// Tree solvers on trees, graph solvers otherwise; the unweighted path on unit weights.
    Auto,
    WeightedGraph,
    UnweightedGraph,
    WeightedTree,
    UnweightedTree,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Search {
    Auto,
    Explicit,
    Counting,
}

impl From<Search> for Strategy {
    fn from(s: Search) -> Strategy {
        match s {
            Search::Auto => Strategy::Auto,
            Search::Explicit => Strategy::Explicit,
            Search::Counting => Strategy::Counting,
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Divergence(String),
    Internal(String),
    /// The reader of stdout went away; nothing left to report.
    Closed,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Divergence(_) => 2,
            Failure::Internal(_) => 3,
            Failure::Closed => 0,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Input(e.to_string())
    }
}

fn read_instance(input: &InputArgs) -> Result<Instance, Failure> {
    let mut text = String::new();
    if input.instance.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(&input.instance)
            .map_err(|e| Failure::Input(format!("{}: {e}", input.instance.display())))?;
    }
    let mut inst = parse_instance(&text)?;
    if let Some(k) = input.k {
        if k == 0 || k > inst.graph.n() {
            return Err(Error::KOutOfRange { k, n: inst.graph.n() }.into());
        }
        inst.k = k;
    }
    Ok(inst)
}

fn resolve(algo: Algo, g: &Graph) -> Algo {
    match (algo, g.is_tree(), g.is_unit_weight()) {
        (Algo::Auto, true, true) => Algo::UnweightedTree,
        (Algo::Auto, true, false) => Algo::WeightedTree,
        (Algo::Auto, false, true) => Algo::UnweightedGraph,
        (Algo::Auto, false, false) => Algo::WeightedGraph,
        (other, _, _) => other,
    }
}

fn solve(g: &Graph, k: usize, algo: Algo, search: Strategy) -> Result<Solution, Error> {
    match resolve(algo, g) {
        Algo::WeightedGraph | Algo::Auto => solve_weighted_graph_with(g, k, search),
        Algo::UnweightedGraph => solve_unweighted_graph(g, k),
        Algo::WeightedTree => solve_weighted_tree_with(g, k, search),
        Algo::UnweightedTree => solve_unweighted_tree(g, k),
    }
}

fn algo_name(algo: Algo) -> &'static str {
    match algo {
        Algo::Auto => "auto",
        Algo::WeightedGraph => "weighted-graph",
        Algo::UnweightedGraph => "unweighted-graph",
        Algo::WeightedTree => "weighted-tree",
        Algo::UnweightedTree => "unweighted-tree",
    }
}

fn feasibility_json(g: &Graph, res: &FeasibilityResult) -> String {
    let witness = match &res.witness {
        Some(w) => {
            let ids: Vec<String> = w.subtree.iter().map(|v| (v + 1).to_string()).collect();
            format!("{{\"point\":{},\"subtree\":[{}]}}", w.point.to_json(g), ids.join(","))
        }
        None => "null".into(),
    };
    format!("{{\"feasible\":{},\"witness\":{witness}}}", res.feasible)
}

/// Solvers applicable to `g`, each checked against the oracle value and validated.
fn verify_instance(g: &Graph, label: &str) -> Result<usize, Failure> {
    let dm = all_pairs_distances(g);
    let mut algos = vec![Algo::WeightedGraph];
    if g.is_unit_weight() {
        algos.push(Algo::UnweightedGraph);
    }
    if g.is_tree() {
        algos.push(Algo::WeightedTree);
        if g.is_unit_weight() {
            algos.push(Algo::UnweightedTree);
        }
    }
    let mut solves = 0;
    for k in 1..=g.n() {
        let expect = brute_lambda(g, k)?;
        for &algo in &algos {
            let sol = solve(g, k, algo, Strategy::Auto)?;
            solves += 1;
            if sol.lambda_star != expect {
                return Err(Failure::Divergence(format!(
                    "{label} k={k}: {} gives {} but the oracle gives {expect}",
                    algo_name(algo),
                    sol.lambda_star
                )));
            }
            sol.validate(g, &dm, k)
                .map_err(|e| Failure::Divergence(format!("{label} k={k}: {} solution invalid: {e}", algo_name(algo))))?;
        }
    }
    Ok(solves)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { input, algo, search, timing } => {
            let inst = read_instance(&input)?;
            let start = Instant::now();
            let sol = solve(&inst.graph, inst.k, algo, search.into())?;
            if timing {
                eprintln!("{:.6}s", start.elapsed().as_secs_f64());
            }
            writeln!(out, "{}", sol.to_json(&inst.graph))?;
        }
        Command::Feasible { input, lambda } => {
            let inst = read_instance(&input)?;
            let g = &inst.graph;
            let res = if g.is_tree() {
                is_feasible_tree(g, inst.k, &lambda)?
            } else {
                is_feasible_graph(g, &all_pairs_distances(g), inst.k, &lambda)
            };
            writeln!(out, "{}", feasibility_json(g, &res))?;
        }
        Command::Verify { seed, count, n_max } => {
            if !(2..=LAMBDA_CAP).contains(&n_max) {
                return Err(Failure::Input(format!("--n-max must lie in 2..={LAMBDA_CAP}")));
            }
            let results = ckoc_core::par::map_indices(count, |i| {
                let s = seed.wrapping_add(i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let n = rng.gen_range(2..=n_max);
                let params = GenParams {
                    n,
                    density: if i % 2 == 0 { 0.0 } else { rng.gen_range(0.0..0.6) },
                    weighted: i % 4 >= 2,
                    max_den: 16,
                    seed: s,
                };
                let g = random_graph(&params)?;
                verify_instance(&g, &format!("instance seed={s} n={n} m={}", g.m()))
            });
            let mut solves = 0;
            for r in results {
                solves += r?;
            }
            writeln!(out, "verified {count} instances, {solves} solves agree with the oracle")?;
        }
        Command::Gen { seed, n, density, weighted, tree, k, output } => {
            let density = if tree { 0.0 } else { density };
            let g = random_graph(&GenParams { n, density, weighted, max_den: 16, seed })?;
            let k = k.unwrap_or(n.div_ceil(2));
            if k == 0 || k > n {
                return Err(Error::KOutOfRange { k, n }.into());
            }
            let text = format!("c seed {seed}\n{}", emit_instance(&g, k));
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => write!(out, "{text}")?,
            }
        }
        Command::Bench { seed, sizes, k } => {
            writeln!(out, "n,m,k,algo,seconds")?;
            for n in sizes {
                let k = k.unwrap_or((n / 4).max(2)).min(n);
                let tree = random_graph(&GenParams::tree(n, false, seed))?;
                let spare = (n * (n - 1) / 2 - (n - 1)).max(1) as f64;
                let graph = random_graph(&GenParams { n, density: (n as f64 / spare).min(1.0), weighted: false, max_den: 16, seed })?;
                let runs = [
                    (&graph, Algo::WeightedGraph),
                    (&graph, Algo::UnweightedGraph),
                    (&tree, Algo::WeightedTree),
                    (&tree, Algo::UnweightedTree),
                ];
                for (g, algo) in runs {
                    let start = Instant::now();
                    solve(g, k, algo, Strategy::Auto)?;
                    let secs = start.elapsed().as_secs_f64();
                    writeln!(out, "{},{},{k},{},{secs:.6}", g.n(), g.m(), algo_name(algo))?;
                }
            }
        }
        Command::Klevel { input, dump, edge } => {
            let inst = read_instance(&input)?;
            let g = &inst.graph;
            let dm = all_pairs_distances(g);
            let edges: Vec<usize> = match edge {
                Some(ids) => {
                    let [u, v] = ids[..] else {
                        return Err(Failure::Input("--edge takes two vertex ids".into()));
                    };
                    let found = (u >= 1 && v >= 1 && u <= g.n() && v <= g.n())
                        .then(|| g.edge_between(u - 1, v - 1))
                        .flatten();
                    vec![found.ok_or_else(|| Failure::Input(format!("no edge ({u}, {v})")))?]
                }
                None => (0..g.m()).collect(),
            };
            let mut levels = Vec::new();
            for e in edges {
                levels.push(kth_level(&build_chains(g, &dm, e)?, inst.k)?);
            }
            if dump {
                let parts: Vec<String> = levels.iter().map(|l| l.to_json(g)).collect();
                writeln!(out, "[{}]", parts.join(","))?;
            } else {
                for l in &levels {
                    let e = g.edge(l.edge);
                    let (t, y) = l.lowest();
                    writeln!(out, "edge ({}, {}): lowest point t={t} value={y}", e.u + 1, e.v + 1)?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Divergence(m) | Failure::Internal(m) => eprintln!("ckoc: {m}"),
                Failure::Closed => {}
            }
            ExitCode::from(f.code())
        }
    }
}
