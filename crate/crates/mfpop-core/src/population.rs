//! Breadth-first exploration of the population generated from a start
//! tuple, with exact deduplication, and the verification of the
//! population-level structure: orbit membership of degree vectors, charge
//! constancy, μ constancy, per-edge Wronskian identities, and the
//! minimal-tuple charge dichotomy.
//!
//! A population is a union of one-parameter families and is generally
//! infinite; exploration truncates by depth, by a finite set of sampled
//! parameters (plus the automatically detected degree-drop parameter of
//! each family), and by a cap on component degrees. The cap is mandatory
//! in affine type, where Weyl orbits are infinite.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::wronskian;
use crate::rat::format_rational;
use crate::tuplegen::{
    fertility, generate, generation_numerator, is_generic, mu_extract, tuple_charge, Fertility,
    ProblemData, Tuple, TupleError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExploreError {
    #[error("StartNotFertile: start tuple is not fertile in direction {direction}: {reason}")]
    StartNotFertile { direction: usize, reason: String },
    #[error("invalid exploration limits: {0}")]
    InvalidLimits(String),
    #[error(transparent)]
    Tuple(#[from] TupleError),
}

/// Truncation parameters for population exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploreLimits {
    pub max_depth: usize,
    pub c_samples: Vec<BigRational>,
    pub max_component_degree: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_depth: 3,
            c_samples: [0i64, 1, -1, 2, -2]
                .iter()
                .map(|&n| BigRational::from_integer(n.into()))
                .collect(),
            max_component_degree: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PopulationNode {
    pub tuple: Tuple,
    pub generic: bool,
    /// BFS distance from the root, i.e. a minimal number of generation
    /// steps producing this tuple among the sampled parameters.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationEdge {
    pub from: usize,
    pub to: usize,
    pub direction: usize,
    pub parameter: BigRational,
}

/// Explored portion of a population: deduplicated tuples as nodes and
/// `(direction, parameter)`-labeled generation edges, rooted at the start
/// tuple. Node ids are BFS discovery order, which is deterministic for
/// fixed limits.
#[derive(Debug, Clone)]
pub struct PopulationGraph {
    problem: ProblemData,
    nodes: Vec<PopulationNode>,
    edges: Vec<PopulationEdge>,
    index: BTreeMap<String, usize>,
    root: usize,
    depth_limit: usize,
}

impl PopulationGraph {
    pub fn problem(&self) -> &ProblemData {
        &self.problem
    }

    pub fn nodes(&self) -> &[PopulationNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[PopulationEdge] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn node(&self, id: usize) -> &PopulationNode {
        &self.nodes[id]
    }

    pub fn find(&self, t: &Tuple) -> Option<usize> {
        self.index.get(&t.canonical_key()).copied()
    }

    /// Distinct degree vectors present in the graph, sorted.
    pub fn degree_vectors(&self) -> BTreeSet<Vec<usize>> {
        self.nodes
            .iter()
            .map(|n| n.tuple.degrees().0.clone())
            .collect()
    }

    /// Charge of the root tuple; constant across the population.
    pub fn charge(&self) -> i64 {
        tuple_charge(&self.nodes[self.root].tuple, &self.problem)
    }

    /// Graphviz rendering: nodes labeled by degree vectors, edges by
    /// `(direction, parameter)`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph population {\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let degrees: Vec<String> = node
                .tuple
                .degrees()
                .0
                .iter()
                .map(|k| k.to_string())
                .collect();
            let mut label = format!("#{id} ({})", degrees.join(","));
            if !node.generic {
                label.push_str(" *");
            }
            let _ = writeln!(out, "    n{id} [label=\"{label}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    n{} -> n{} [label=\"j={}, c={}\"];",
                e.from,
                e.to,
                e.direction,
                format_rational(&e.parameter)
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self) -> GraphExport {
        let minimal: BTreeSet<usize> = self.minimal_nodes().into_iter().collect();
        GraphExport {
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeExport {
                    id,
                    degrees: n.tuple.degrees().0.clone(),
                    coefficients: n
                        .tuple
                        .components()
                        .iter()
                        .map(|p| p.coeffs().iter().map(format_rational).collect())
                        .collect(),
                    generic: n.generic,
                    minimal: minimal.contains(&id),
                    depth: n.depth,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeExport {
                    from: e.from,
                    to: e.to,
                    direction: e.direction,
                    c: format_rational(&e.parameter),
                })
                .collect(),
        }
    }

    /// Ids of nodes whose degree vector satisfies the minimality
    /// inequalities, equivalently whose weight at infinity is dominant.
    pub fn minimal_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&id| {
                self.problem
                    .is_minimal_degree(&self.nodes[id].tuple.degrees().as_i64())
            })
            .collect()
    }
}

/// Full-coefficient JSON form of a population graph.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphExport {
    pub root: usize,
    pub nodes: Vec<NodeExport>,
    pub edges: Vec<EdgeExport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct NodeExport {
    pub id: usize,
    pub degrees: Vec<usize>,
    /// Ascending monic coefficients per component, canonical rationals.
    pub coefficients: Vec<Vec<String>>,
    pub generic: bool,
    pub minimal: bool,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeExport {
    pub from: usize,
    pub to: usize,
    pub direction: usize,
    pub c: String,
}

/// Breadth-first population exploration from a start tuple.
///
/// The start must be fertile in every direction. Members are instantiated
/// at every sampled parameter plus each family's degree-drop parameter,
/// deduplicated by exact coefficient keys; non-generic members are kept as
/// flagged leaves but not expanded.
pub fn explore(
    problem: &ProblemData,
    start: &Tuple,
    limits: &ExploreLimits,
) -> Result<PopulationGraph, ExploreError> {
    if limits.c_samples.is_empty() {
        return Err(ExploreError::InvalidLimits(
            "c_samples must be nonempty".to_string(),
        ));
    }
    if start.rank() != problem.rank() {
        return Err(ExploreError::Tuple(TupleError::RankMismatch {
            got: start.rank(),
            want: problem.rank(),
        }));
    }
    for j in 0..problem.rank() {
        match fertility(start, problem, j) {
            Ok(Fertility::Fertile(_)) => {}
            Ok(Fertility::NotFertile { residual }) => {
                return Err(ExploreError::StartNotFertile {
                    direction: j,
                    reason: format!("Hermite residual {residual}"),
                })
            }
            Err(e) => {
                return Err(ExploreError::StartNotFertile {
                    direction: j,
                    reason: e.to_string(),
                })
            }
        }
    }

    let root_node = PopulationNode {
        tuple: start.clone(),
        generic: is_generic(start, problem).ok,
        depth: 0,
    };
    let mut index = BTreeMap::new();
    index.insert(start.canonical_key(), 0usize);
    let mut nodes = vec![root_node];
    let mut edges: Vec<PopulationEdge> = Vec::new();
    let mut edge_seen: BTreeSet<(usize, usize, usize, String)> = BTreeSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);

    while let Some(id) = queue.pop_front() {
        let depth = nodes[id].depth;
        if depth >= limits.max_depth {
            continue;
        }
        let parent = nodes[id].tuple.clone();
        for j in 0..problem.rank() {
            let family = match fertility(&parent, problem, j) {
                Ok(Fertility::Fertile(f)) => f,
                // Generated members are fertile; a failure here can only
                // come from a non-generic root that slipped through, and
                // such directions are simply not expanded.
                Ok(Fertility::NotFertile { .. }) | Err(_) => continue,
            };
            let mut params: Vec<BigRational> = Vec::new();
            for c in &limits.c_samples {
                if !params.contains(c) {
                    params.push(c.clone());
                }
            }
            if let Some(drop) = family.degree_drop_c() {
                if !params.contains(&drop) {
                    params.push(drop);
                }
            }
            for c in &params {
                let member = match generate(&family, c) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                if member.degrees().0[j] > limits.max_component_degree {
                    continue;
                }
                let key = member.canonical_key();
                let to = match index.get(&key) {
                    Some(&existing) => existing,
                    None => {
                        let node_id = nodes.len();
                        let generic = is_generic(&member, problem).ok;
                        nodes.push(PopulationNode {
                            tuple: member,
                            generic,
                            depth: depth + 1,
                        });
                        index.insert(key, node_id);
                        if generic {
                            queue.push_back(node_id);
                        }
                        node_id
                    }
                };
                let edge_key = (id, to, j, format_rational(c));
                if edge_seen.insert(edge_key) {
                    edges.push(PopulationEdge {
                        from: id,
                        to,
                        direction: j,
                        parameter: c.clone(),
                    });
                }
            }
        }
    }

    Ok(PopulationGraph {
        problem: problem.clone(),
        nodes,
        edges,
        index,
        root: 0,
        depth_limit: limits.max_depth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The explored subgraph cannot decide the statement (e.g. no minimal
    /// node within the degree cap).
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub details: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn push(&mut self, name: &str, status: CheckStatus, details: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            status,
            details,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Word-length bound for the orbit closure; defaults to the graph's
    /// exploration depth.
    pub orbit_radius: Option<usize>,
    /// How many generic nodes get the full all-directions fertility check.
    pub fertility_sample: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            orbit_radius: None,
            fertility_sample: 8,
        }
    }
}

/// Runs the per-node and per-edge structure checks on an explored graph.
pub fn verify_population(graph: &PopulationGraph, opts: &VerifyOptions) -> VerificationReport {
    let problem = graph.problem();
    let mut report = VerificationReport::default();

    // Degree vectors lie in the shifted Weyl orbit of the root's weight
    // at infinity.
    let radius = opts.orbit_radius.unwrap_or(graph.depth_limit());
    let root_infinity = problem.infinity_weight(&graph.node(graph.root()).tuple.degrees().as_i64());
    let orbit = problem.cartan().shifted_orbit(&root_infinity, radius);
    let outside: Vec<usize> = (0..graph.nodes().len())
        .filter(|&id| {
            let w = problem.infinity_weight(&graph.node(id).tuple.degrees().as_i64());
            !orbit.contains(&w)
        })
        .collect();
    if outside.is_empty() {
        report.push(
            "orbit_membership",
            CheckStatus::Pass,
            format!(
                "all {} infinity weights inside the radius-{radius} orbit",
                graph.nodes().len()
            ),
        );
    } else {
        report.push(
            "orbit_membership",
            CheckStatus::Fail,
            format!("nodes outside orbit: {outside:?}"),
        );
    }

    // Charge constancy.
    let root_charge = graph.charge();
    let bad: Vec<usize> = (0..graph.nodes().len())
        .filter(|&id| tuple_charge(&graph.node(id).tuple, problem) != root_charge)
        .collect();
    if bad.is_empty() {
        report.push(
            "charge_constant",
            CheckStatus::Pass,
            format!("charge {root_charge} on every node"),
        );
    } else {
        report.push(
            "charge_constant",
            CheckStatus::Fail,
            format!("nodes with deviating charge: {bad:?}"),
        );
    }

    // μ constancy over generic nodes, when a Gram matrix is available.
    if problem.gram().is_none() {
        report.push(
            "mu_constant",
            CheckStatus::Inconclusive,
            "no Gram matrix supplied".to_string(),
        );
    } else {
        let mut reference: Option<Vec<BigRational>> = None;
        let mut failures = Vec::new();
        let mut checked = 0usize;
        for (id, node) in graph.nodes().iter().enumerate() {
            if !node.generic {
                continue;
            }
            match mu_extract(&node.tuple, problem) {
                Ok(out) => {
                    checked += 1;
                    if !out.identity_ok || !out.mu_sum.is_zero() {
                        failures.push(id);
                        continue;
                    }
                    match &reference {
                        Some(mu) if mu != &out.mu => failures.push(id),
                        Some(_) => {}
                        None => reference = Some(out.mu),
                    }
                }
                Err(_) => failures.push(id),
            }
        }
        if checked == 0 {
            report.push(
                "mu_constant",
                CheckStatus::Inconclusive,
                "no generic node to check".to_string(),
            );
        } else if failures.is_empty() {
            let mu = reference.expect("at least one generic node checked");
            report.push(
                "mu_constant",
                CheckStatus::Pass,
                format!(
                    "mu = {} constant over {checked} generic nodes",
                    crate::tuplegen::format_mu(&mu)
                ),
            );
        } else {
            report.push(
                "mu_constant",
                CheckStatus::Fail,
                format!("nodes violating mu constancy or the identity: {failures:?}"),
            );
        }
    }

    // Every edge satisfies the Wronskian identity up to scalar.
    let mut bad_edges = Vec::new();
    for (idx, e) in graph.edges().iter().enumerate() {
        let from = &graph.node(e.from).tuple;
        let to = &graph.node(e.to).tuple;
        let w = wronskian(from.component(e.direction), to.component(e.direction));
        let num = generation_numerator(from, problem, e.direction);
        let ok = match (w.leading(), num.leading()) {
            (Some(lw), Some(ln)) => w.scale(ln) == num.scale(lw),
            _ => false,
        };
        if !ok {
            bad_edges.push(idx);
        }
    }
    if bad_edges.is_empty() {
        report.push(
            "edge_wronskian",
            CheckStatus::Pass,
            format!("{} edges verified", graph.edges().len()),
        );
    } else {
        report.push(
            "edge_wronskian",
            CheckStatus::Fail,
            format!("edges violating the Wronskian identity: {bad_edges:?}"),
        );
    }

    // Spot-check: generated members are fertile in all directions.
    let generic_ids: Vec<usize> = (0..graph.nodes().len())
        .filter(|&id| graph.node(id).generic)
        .collect();
    let sample: Vec<usize> = if generic_ids.len() <= opts.fertility_sample {
        generic_ids
    } else {
        let stride = generic_ids.len() / opts.fertility_sample;
        generic_ids
            .into_iter()
            .step_by(stride.max(1))
            .take(opts.fertility_sample)
            .collect()
    };
    let mut infertile = Vec::new();
    for &id in &sample {
        for j in 0..problem.rank() {
            match fertility(&graph.node(id).tuple, problem, j) {
                Ok(Fertility::Fertile(_)) => {}
                _ => infertile.push((id, j)),
            }
        }
    }
    if infertile.is_empty() {
        report.push(
            "members_fertile",
            CheckStatus::Pass,
            format!("{} generic nodes fertile in all directions", sample.len()),
        );
    } else {
        report.push(
            "members_fertile",
            CheckStatus::Fail,
            format!("infertile (node, direction) pairs: {infertile:?}"),
        );
    }

    report
}

/// Checks the minimal-tuple charge dichotomy on an explored graph: a
/// minimal node either has `k = 0`, charge 0 and is the trivial tuple, or
/// `k ≠ 0` with negative charge satisfying
/// `c + Σ_j b_j (τ_j + 1) k_j < 0`.
pub fn check_charge_theorems(graph: &PopulationGraph) -> VerificationReport {
    let problem = graph.problem();
    let mut report = VerificationReport::default();
    let minimal = graph.minimal_nodes();
    if minimal.is_empty() {
        report.push(
            "minimal_dichotomy",
            CheckStatus::Inconclusive,
            "no minimal node within the explored subgraph (degree cap too tight)".to_string(),
        );
        return report;
    }
    let charge = graph.charge();
    let mut failures = Vec::new();
    for &id in &minimal {
        let node = &graph.node(id).tuple;
        let k = node.degrees();
        if k.total() == 0 {
            if charge != 0 || !node.is_trivial() {
                failures.push((id, "k = 0 but charge != 0 or tuple not trivial"));
            }
        } else {
            if charge >= 0 {
                failures.push((id, "minimal k != 0 must have negative charge"));
                continue;
            }
            let mut bound = charge;
            for (j, &kj) in k.0.iter().enumerate() {
                bound += problem.cartan().symmetrizer(j) * (problem.tau()[j] + 1) * kj as i64;
            }
            if bound >= 0 {
                failures.push((id, "charge bound c + sum b_j (tau_j + 1) k_j < 0 violated"));
            }
        }
    }
    if failures.is_empty() {
        let detail = if charge == 0 {
            format!(
                "{} minimal node(s); k = 0 branch with charge 0 at the trivial tuple",
                minimal.len()
            )
        } else {
            format!(
                "{} minimal node(s); k != 0 branch with charge {charge} and strict bound",
                minimal.len()
            )
        };
        report.push("minimal_dichotomy", CheckStatus::Pass, detail);
    } else {
        report.push(
            "minimal_dichotomy",
            CheckStatus::Fail,
            format!("{failures:?}"),
        );
    }
    report
}
