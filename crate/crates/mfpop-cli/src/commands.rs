//! Command implementations behind the `mfpop` binary: validate problem
//! files, explore and verify populations, run the multistart solver, and
//! crosscheck numeric critical points against the explored population.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mfpop_core::kacmoody::DegreeVector;
use mfpop_core::oracle::{
    match_population, solve_bethe, to_numeric_tuple, MatchResult, SolveOptions,
};
use mfpop_core::population::{
    check_charge_theorems, explore, verify_population, ExploreLimits, PopulationGraph,
    VerifyOptions,
};
use mfpop_core::rat::{format_rational, parse_rational};
use mfpop_core::tuplegen::{mu_extract, ProblemData, Tuple};
use num_rational::BigRational;

use crate::schema::{
    CheckJson, CrossPointJson, CrossRunJson, CrosscheckSection, FileError, PointJson,
    PopulationSection, ProblemFile, ReportFile, SolveRunJson, SolverSection, StatsJson,
};

/// Exit-code contract: domain failures exit 1, input (I/O, JSON, rational
/// syntax) failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Domain(msg) | CliError::Input(msg) => msg,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mfpop",
    version,
    about = "Exact populations of master-function critical points, with a numeric Bethe-system solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a problem file and report its derived data.
    Validate { file: PathBuf },
    /// Explore the population of the trivial tuple and verify its
    /// structure.
    Explore {
        file: PathBuf,
        /// Generation depth of the breadth-first exploration.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Comma-separated rational parameters sampled per family.
        #[arg(long, value_name = "LIST", default_value = "0,1,-1,2,-2")]
        c_samples: String,
        /// Cap on component degrees; mandatory for affine type.
        #[arg(long, value_name = "M")]
        max_degree: Option<usize>,
        /// Report destination (stdout if omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Graphviz export of the population graph.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Solve the critical system numerically at given degree vectors.
    Solve {
        file: PathBuf,
        /// Degree vector as comma-separated entries; repeatable.
        #[arg(long = "k", value_name = "LIST")]
        k: Vec<String>,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Seed for the multistart sampler; drawn from entropy and
        /// recorded in the report when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Solve, explore, and match numeric points against the population.
    Crosscheck {
        file: PathBuf,
        #[arg(long = "k", value_name = "LIST")]
        k: Vec<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_name = "LIST", default_value = "0,1,-1,2,-2")]
        c_samples: String,
        #[arg(long, value_name = "M")]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance of the family-membership fit.
        #[arg(long, default_value_t = 1e-8)]
        match_tol: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Explore {
            file,
            depth,
            c_samples,
            max_degree,
            out,
            dot,
        } => cmd_explore(&file, depth, &c_samples, max_degree, out, dot),
        Command::Solve {
            file,
            k,
            starts,
            tol,
            max_iter,
            seed,
            out,
        } => cmd_solve(&file, &k, starts, tol, max_iter, seed, out),
        Command::Crosscheck {
            file,
            k,
            depth,
            c_samples,
            max_degree,
            starts,
            tol,
            max_iter,
            seed,
            match_tol,
            out,
        } => cmd_crosscheck(
            &file, &k, depth, &c_samples, max_degree, starts, tol, max_iter, seed, match_tol, out,
        ),
    }
}

fn read_problem(path: &Path) -> Result<(ProblemFile, ProblemData), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid JSON in {}: {e}", path.display())))?;
    let problem = file.to_problem().map_err(|e| match e {
        FileError::Parse(msg) => CliError::Input(msg),
        FileError::Domain(msg) => CliError::Domain(msg),
    })?;
    Ok((file, problem))
}

fn parse_c_samples(list: &str) -> Result<Vec<BigRational>, CliError> {
    let mut out = Vec::new();
    for part in list.split(',') {
        out.push(
            parse_rational(part)
                .map_err(|e| CliError::Input(format!("bad c-sample {part:?}: {e}")))?,
        );
    }
    Ok(out)
}

fn parse_degree_vector(list: &str, rank: usize) -> Result<Vec<usize>, CliError> {
    let entries: Vec<usize> = list
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad degree entry {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    if entries.len() != rank {
        return Err(CliError::Domain(format!(
            "degree vector {list:?} has {} entries, rank is {rank}",
            entries.len()
        )));
    }
    Ok(entries)
}

fn worker_threads() -> usize {
    if let Ok(value) = std::env::var("MFPOP_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn emit(content: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(&path, content)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let (_, problem) = read_problem(path)?;
    println!(
        "ok: rank {}, {} marked point(s), tau = {:?}, kernel dimension {}",
        problem.rank(),
        problem.points().len(),
        problem.tau(),
        problem.cartan().kernel_dim()
    );
    if let Some(gram) = problem.gram() {
        let rows: Vec<String> = gram
            .iter()
            .map(|row| {
                let entries: Vec<String> = row.iter().map(format_rational).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        println!("gram: {}", rows.join(" "));
    } else {
        println!("gram: none (affine type; supply one for mu extraction)");
    }
    Ok(())
}

/// Builds exploration limits, enforcing the degree cap policy: finite
/// type defaults to 12, affine type requires an explicit cap.
fn build_limits(
    problem: &ProblemData,
    depth: usize,
    c_samples: &str,
    max_degree: Option<usize>,
) -> Result<ExploreLimits, CliError> {
    let cap = match max_degree {
        Some(cap) => cap,
        None if problem.cartan().is_invertible() => 12,
        None => {
            return Err(CliError::Domain(
                "degree cap required for affine type: pass --max-degree".to_string(),
            ))
        }
    };
    Ok(ExploreLimits {
        max_depth: depth,
        c_samples: parse_c_samples(c_samples)?,
        max_component_degree: cap,
    })
}

fn explore_population(
    problem: &ProblemData,
    limits: &ExploreLimits,
) -> Result<(PopulationGraph, PopulationSection, Vec<CheckJson>), CliError> {
    let start = Tuple::trivial(problem.rank());
    let graph = explore(problem, &start, limits).map_err(|e| CliError::Domain(e.to_string()))?;
    let verification = verify_population(&graph, &VerifyOptions::default());
    let charge_checks = check_charge_theorems(&graph);
    let checks: Vec<CheckJson> = verification
        .checks
        .iter()
        .chain(charge_checks.checks.iter())
        .map(CheckJson::from_check)
        .collect();
    let mu = if problem.gram().is_some() {
        mu_extract(&graph.node(graph.root()).tuple, problem)
            .ok()
            .map(|out| out.mu.iter().map(format_rational).collect())
    } else {
        None
    };
    let section = PopulationSection {
        depth: limits.max_depth,
        max_component_degree: limits.max_component_degree,
        c_samples: limits.c_samples.iter().map(format_rational).collect(),
        node_count: graph.nodes().len(),
        charge: graph.charge(),
        mu,
        degree_vectors: graph.degree_vectors().into_iter().collect(),
        minimal_degree_vectors: graph
            .minimal_nodes()
            .into_iter()
            .map(|id| graph.node(id).tuple.degrees().0.clone())
            .collect(),
        graph: graph.export(),
    };
    Ok((graph, section, checks))
}

fn cmd_explore(
    path: &Path,
    depth: usize,
    c_samples: &str,
    max_degree: Option<usize>,
    out: Option<PathBuf>,
    dot: Option<PathBuf>,
) -> Result<(), CliError> {
    let (file, problem) = read_problem(path)?;
    let limits = build_limits(&problem, depth, c_samples, max_degree)?;
    let (graph, section, checks) = explore_population(&problem, &limits)?;
    if let Some(dot_path) = dot {
        std::fs::write(&dot_path, graph.to_dot())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", dot_path.display())))?;
    }
    let mut report = ReportFile::new(
        file.canonicalize()
            .map_err(|e| CliError::Input(format!("{e:?}")))?,
    );
    report.population = Some(section);
    report.verification = Some(checks);
    emit(&report.to_json(), out)
}

fn point_json(coords: &[Vec<num_complex::Complex64>], residual: f64) -> PointJson {
    PointJson {
        coords: coords
            .iter()
            .map(|group| group.iter().map(|c| [c.re, c.im]).collect())
            .collect(),
        residual,
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random::<u64>)
}

fn cmd_solve(
    path: &Path,
    ks: &[String],
    starts: usize,
    tol: f64,
    max_iter: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (file, problem) = read_problem(path)?;
    let seed = resolve_seed(seed);
    let opts = SolveOptions {
        starts,
        max_iter,
        tol,
        seed,
        threads: worker_threads(),
    };
    let mut runs = Vec::new();
    for list in ks {
        let k = parse_degree_vector(list, problem.rank())?;
        let (points, stats) = solve_bethe(&problem, &k, &opts);
        let signed: Vec<i64> = k.iter().map(|&v| v as i64).collect();
        runs.push(SolveRunJson {
            k,
            charge: problem.charge_form(&signed),
            stats: StatsJson {
                starts: stats.starts,
                converged: stats.converged,
                diverged: stats.diverged,
                discarded_nongeneric: stats.discarded_nongeneric,
                deduplicated: stats.deduplicated,
            },
            points: points
                .iter()
                .map(|pt| point_json(&pt.coords, pt.residual))
                .collect(),
        });
    }
    let mut report = ReportFile::new(
        file.canonicalize()
            .map_err(|e| CliError::Input(format!("{e:?}")))?,
    );
    report.seed = Some(seed);
    report.solver = Some(SolverSection {
        tol,
        max_iter,
        starts,
        runs,
    });
    emit(&report.to_json(), out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_crosscheck(
    path: &Path,
    ks: &[String],
    depth: usize,
    c_samples: &str,
    max_degree: Option<usize>,
    starts: usize,
    tol: f64,
    max_iter: usize,
    seed: Option<u64>,
    match_tol: f64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (file, problem) = read_problem(path)?;
    let limits = build_limits(&problem, depth, c_samples, max_degree)?;
    let (graph, section, checks) = explore_population(&problem, &limits)?;
    let seed = resolve_seed(seed);
    let opts = SolveOptions {
        starts,
        max_iter,
        tol,
        seed,
        threads: worker_threads(),
    };

    // Orbit of the root's weight at infinity, for labeling which degree
    // vectors can carry population members at all.
    let root_k = DegreeVector::zero(problem.rank()).as_i64();
    let orbit = problem
        .cartan()
        .shifted_orbit(&problem.infinity_weight(&root_k), depth.max(8));

    let mut runs = Vec::new();
    for list in ks {
        let k = parse_degree_vector(list, problem.rank())?;
        let (points, _) = solve_bethe(&problem, &k, &opts);
        let signed: Vec<i64> = k.iter().map(|&v| v as i64).collect();
        let mut cross_points = Vec::new();
        let mut matched = 0usize;
        for pt in &points {
            let numeric = to_numeric_tuple(pt);
            let entry = match match_population(&graph, &numeric, match_tol) {
                MatchResult::Node { node } => {
                    matched += 1;
                    CrossPointJson {
                        point: point_json(&pt.coords, pt.residual),
                        matched: true,
                        node: Some(node),
                        direction: None,
                        c: None,
                        fit_residual: None,
                        descent_steps: None,
                    }
                }
                MatchResult::Family {
                    node,
                    direction,
                    c,
                    fit_residual,
                } => {
                    matched += 1;
                    CrossPointJson {
                        point: point_json(&pt.coords, pt.residual),
                        matched: true,
                        node: Some(node),
                        direction: Some(direction),
                        c: Some([c.re, c.im]),
                        fit_residual: Some(fit_residual),
                        descent_steps: None,
                    }
                }
                MatchResult::Ancestor { node, steps } => {
                    matched += 1;
                    CrossPointJson {
                        point: point_json(&pt.coords, pt.residual),
                        matched: true,
                        node: Some(node),
                        direction: None,
                        c: None,
                        fit_residual: None,
                        descent_steps: Some(steps),
                    }
                }
                MatchResult::NoMatch => CrossPointJson {
                    point: point_json(&pt.coords, pt.residual),
                    matched: false,
                    node: None,
                    direction: None,
                    c: None,
                    fit_residual: None,
                    descent_steps: None,
                },
            };
            cross_points.push(entry);
        }
        runs.push(CrossRunJson {
            k: k.clone(),
            charge: problem.charge_form(&signed),
            in_root_orbit: orbit.contains(&problem.infinity_weight(&signed)),
            matched,
            unmatched: cross_points.len() - matched,
            points: cross_points,
        });
    }

    let mut report = ReportFile::new(
        file.canonicalize()
            .map_err(|e| CliError::Input(format!("{e:?}")))?,
    );
    report.seed = Some(seed);
    report.population = Some(section);
    report.verification = Some(checks);
    // No degree vectors requested: pure exploration report, no solver part.
    report.crosscheck = if runs.is_empty() {
        None
    } else {
        Some(CrosscheckSection { match_tol, runs })
    };
    emit(&report.to_json(), out)
}
