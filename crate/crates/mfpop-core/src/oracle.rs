//! Floating-point oracle for the critical-point system: a seeded
//! multistart damped-Newton solver for the Bethe-type equations, numeric
//! fertility via residues at the roots of a component, the numeric form of
//! the criticality identity, and matching of numeric critical points
//! against symbolically explored populations.
//!
//! Everything here is double precision and independent of the exact
//! engine's code paths, so agreement between the two is meaningful
//! evidence rather than a tautology.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::population::PopulationGraph;
use crate::rat::rational_to_f64;
use crate::tuplegen::{fertility, Fertility, ProblemData, Tuple};

/// Coordinates closer than this to each other or to a marked point make
/// the master function singular; such solver outputs are discarded.
pub const GENERICITY_WINDOW: f64 = 1e-6;

/// Newton iterates beyond this multiple of the start-box radius are
/// declared divergent: the residual also vanishes along escapes to
/// infinity, which are not critical points.
const ESCAPE_FACTOR: f64 = 1e4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("MissingGram: operation needs a Gram matrix of the weights")]
    MissingGram,
    #[error("ClusteredRoots: {0}")]
    ClusteredRoots(String),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Worker threads for the independent starts; the result is identical
    /// for any thread count.
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: 200,
            max_iter: 100,
            tol: 1e-10,
            seed: 1,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub starts: usize,
    pub converged: usize,
    pub diverged: usize,
    pub discarded_nongeneric: usize,
    pub deduplicated: usize,
}

/// A numeric critical point: coordinates grouped by direction, each group
/// sorted by (re, im) as the canonical representative of its
/// symmetric-group orbit. The residual is recomputed from the stored
/// coordinates, independent of the Newton iteration that found them.
#[derive(Debug, Clone)]
pub struct BethePoint {
    pub coords: Vec<Vec<Complex64>>,
    pub residual: f64,
}

/// The critical system seen by the solver, with all pairing coefficients
/// flattened to doubles.
struct BetheSystem {
    group_sizes: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
    /// (α_j, α_j) per direction.
    diag: Vec<f64>,
    /// (α_i, α_j) between directions; zero entries are skipped.
    cross: Vec<Vec<f64>>,
    /// (α_j, Λ_a) indexed [a][j].
    weight: Vec<Vec<f64>>,
    z: Vec<Complex64>,
}

impl BetheSystem {
    fn new(p: &ProblemData, k: &[usize]) -> Self {
        let r = p.rank();
        assert_eq!(k.len(), r, "degree vector length must equal the rank");
        let mut offsets = Vec::with_capacity(r);
        let mut dim = 0;
        for &kj in k {
            offsets.push(dim);
            dim += kj;
        }
        let diag: Vec<f64> = (0..r)
            .map(|j| 2.0 * p.cartan().symmetrizer(j) as f64)
            .collect();
        let cross: Vec<Vec<f64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| p.cartan().root_bilinear_i64(i, j) as f64)
                    .collect()
            })
            .collect();
        let weight: Vec<Vec<f64>> = p
            .weights()
            .iter()
            .map(|w| {
                (0..r)
                    .map(|j| (p.cartan().symmetrizer(j) * w.0[j]) as f64)
                    .collect()
            })
            .collect();
        let z = p
            .points()
            .iter()
            .map(|za| Complex64::new(rational_to_f64(za), 0.0))
            .collect();
        BetheSystem {
            group_sizes: k.to_vec(),
            offsets,
            dim,
            diag,
            cross,
            weight,
            z,
        }
    }

    fn group_bounds(&self, j: usize) -> (usize, usize) {
        (self.offsets[j], self.offsets[j] + self.group_sizes[j])
    }

    fn residual_vec(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for j in 0..self.group_sizes.len() {
            let (lo, hi) = self.group_bounds(j);
            for i in lo..hi {
                let mut acc = Complex64::new(0.0, 0.0);
                for ip in lo..hi {
                    if ip != i {
                        acc += self.diag[j] / (u[i] - u[ip]);
                    }
                }
                for jp in 0..self.group_sizes.len() {
                    if jp == j || self.cross[j][jp] == 0.0 {
                        continue;
                    }
                    let (plo, phi) = self.group_bounds(jp);
                    for ip in plo..phi {
                        acc += self.cross[j][jp] / (u[i] - u[ip]);
                    }
                }
                for (a, za) in self.z.iter().enumerate() {
                    if self.weight[a][j] != 0.0 {
                        acc -= self.weight[a][j] / (u[i] - za);
                    }
                }
                out[i] = acc;
            }
        }
        out
    }

    fn residual_norm(&self, u: &[Complex64]) -> f64 {
        max_norm(self.residual_vec(u).iter().map(|c| c.norm()))
    }

    fn jacobian(&self, u: &[Complex64]) -> Vec<Vec<Complex64>> {
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for j in 0..self.group_sizes.len() {
            let (lo, hi) = self.group_bounds(j);
            for i in lo..hi {
                let mut diag_acc = Complex64::new(0.0, 0.0);
                for ip in lo..hi {
                    if ip != i {
                        let inv_sq = 1.0 / ((u[i] - u[ip]) * (u[i] - u[ip]));
                        jac[i][ip] = self.diag[j] * inv_sq;
                        diag_acc -= self.diag[j] * inv_sq;
                    }
                }
                for jp in 0..self.group_sizes.len() {
                    if jp == j || self.cross[j][jp] == 0.0 {
                        continue;
                    }
                    let (plo, phi) = self.group_bounds(jp);
                    for ip in plo..phi {
                        let inv_sq = 1.0 / ((u[i] - u[ip]) * (u[i] - u[ip]));
                        jac[i][ip] = self.cross[j][jp] * inv_sq;
                        diag_acc -= self.cross[j][jp] * inv_sq;
                    }
                }
                for (a, za) in self.z.iter().enumerate() {
                    if self.weight[a][j] != 0.0 {
                        diag_acc += self.weight[a][j] / ((u[i] - za) * (u[i] - za));
                    }
                }
                jac[i][i] = diag_acc;
            }
        }
        jac
    }

    /// Denominator-cleared form of the system: each equation multiplied by
    /// all of its pole factors. The result is polynomial, so escapes to
    /// infinity no longer look like solutions; the spurious zeros sitting
    /// on coincidences `u_i = u_{i'}` or `u_i = z_a` are exactly the
    /// non-generic points the genericity window discards anyway.
    fn cleared(&self) -> ClearedSystem {
        let mut eqs = Vec::with_capacity(self.dim);
        for j in 0..self.group_sizes.len() {
            let (lo, hi) = self.group_bounds(j);
            for i in lo..hi {
                let mut terms = Vec::new();
                for ip in lo..hi {
                    if ip != i {
                        terms.push((self.diag[j], Partner::Coord(ip)));
                    }
                }
                for jp in 0..self.group_sizes.len() {
                    if jp == j || self.cross[j][jp] == 0.0 {
                        continue;
                    }
                    let (plo, phi) = self.group_bounds(jp);
                    for ip in plo..phi {
                        terms.push((self.cross[j][jp], Partner::Coord(ip)));
                    }
                }
                for a in 0..self.z.len() {
                    if self.weight[a][j] != 0.0 {
                        terms.push((-self.weight[a][j], Partner::Point(a)));
                    }
                }
                eqs.push(ClearedEq { owner: i, terms });
            }
        }
        ClearedSystem { eqs }
    }

    fn canonicalize(&self, u: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.group_sizes.len())
            .map(|j| {
                let (lo, hi) = self.group_bounds(j);
                let mut group = u[lo..hi].to_vec();
                group.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                group
            })
            .collect()
    }

    fn is_generic_point(&self, u: &[Complex64]) -> bool {
        for i in 0..u.len() {
            for j in (i + 1)..u.len() {
                if (u[i] - u[j]).norm() < GENERICITY_WINDOW {
                    return false;
                }
            }
            for za in &self.z {
                if (u[i] - za).norm() < GENERICITY_WINDOW {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy)]
enum Partner {
    Coord(usize),
    Point(usize),
}

struct ClearedEq {
    owner: usize,
    /// `(coefficient, partner)` pairs: the equation is
    /// `Σ_t c_t ∏_{s≠t} (u_owner − partner_s) = 0`.
    terms: Vec<(f64, Partner)>,
}

struct ClearedSystem {
    eqs: Vec<ClearedEq>,
}

impl ClearedSystem {
    fn factors(&self, eq: &ClearedEq, u: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
        eq.terms
            .iter()
            .map(|&(_, partner)| match partner {
                Partner::Coord(v) => u[eq.owner] - u[v],
                Partner::Point(a) => u[eq.owner] - z[a],
            })
            .collect()
    }

    fn value_vec(&self, u: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
        self.eqs
            .iter()
            .map(|eq| {
                let ell = self.factors(eq, u, z);
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, &(c, _)) in eq.terms.iter().enumerate() {
                    acc += c * prod_except(&ell, t, usize::MAX);
                }
                acc
            })
            .collect()
    }

    fn jacobian(&self, u: &[Complex64], z: &[Complex64]) -> Vec<Vec<Complex64>> {
        let dim = u.len();
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (row, eq) in self.eqs.iter().enumerate() {
            let ell = self.factors(eq, u, z);
            // d/d(owner): every factor has derivative +1.
            let mut own = Complex64::new(0.0, 0.0);
            for (t, &(c, _)) in eq.terms.iter().enumerate() {
                for s in 0..eq.terms.len() {
                    if s != t {
                        own += c * prod_except(&ell, t, s);
                    }
                }
            }
            jac[row][eq.owner] = own;
            // d/d(coordinate partner v): only the factor (u_owner - u_v)
            // depends on v, with derivative -1.
            for (tv, &(_, partner)) in eq.terms.iter().enumerate() {
                let Partner::Coord(v) = partner else { continue };
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, &(c, _)) in eq.terms.iter().enumerate() {
                    if t != tv {
                        acc -= c * prod_except(&ell, t, tv);
                    }
                }
                jac[row][v] += acc;
            }
        }
        jac
    }
}

fn prod_except(ell: &[Complex64], skip1: usize, skip2: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (s, v) in ell.iter().enumerate() {
        if s != skip1 && s != skip2 {
            acc *= v;
        }
    }
    acc
}

/// Max of the values, with any non-finite entry promoted to infinity so a
/// NaN can never masquerade as a zero residual.
fn max_norm(values: impl Iterator<Item = f64>) -> f64 {
    let mut m = 0.0f64;
    for v in values {
        if !v.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(v);
    }
    m
}

/// Gaussian elimination with partial pivoting over complex doubles.
fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r1, &r2| a[r1][col].norm().total_cmp(&a[r2][col].norm()))?;
        if a[pivot][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let delta = factor * a[col][c];
                a[row][c] -= delta;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Affine chart `Σ form_i (u_i − base) = 1` adjoined to the cleared
/// system when all marked points coincide: the system is then homogeneous
/// (solutions come in dilation rays through the marked point, and the
/// whole configuration space collapses onto that point as a spurious
/// zero), and the chart picks one finite representative per ray.
#[derive(Clone)]
struct Chart {
    form: Vec<Complex64>,
    base: Complex64,
}

impl Chart {
    fn residual(&self, u: &[Complex64]) -> Complex64 {
        self.form
            .iter()
            .zip(u)
            .map(|(l, ui)| l * (ui - self.base))
            .sum::<Complex64>()
            - Complex64::new(1.0, 0.0)
    }
}

/// Levenberg–Marquardt descent on the cleared polynomial system. The
/// damping matrix keeps the step well defined on the rank-deficient
/// Jacobians that non-isolated solution families produce, and a
/// polynomial target has no spurious attractor at infinity. Rational-form
/// homogeneity (all marked points equal) is what rules plain Newton out
/// here: it rides `F(2u) = F(u)/2` outward forever.
fn cleared_phase(
    sys: &BetheSystem,
    start: &[Complex64],
    opts: &SolveOptions,
    escape: f64,
) -> Option<Vec<Complex64>> {
    let cleared = sys.cleared();
    let dim = start.len();
    let value = |u: &[Complex64]| -> Vec<Complex64> { cleared.value_vec(u, &sys.z) };
    let mut u = start.to_vec();
    let mut g = value(&u);
    let mut gnorm = max_norm(g.iter().map(|c| c.norm()));
    if !gnorm.is_finite() {
        return None;
    }
    let mut mu = 1e-3;
    for _ in 0..opts.max_iter {
        if u.iter().any(|c| c.norm() > escape) {
            return None;
        }
        let jac = cleared.jacobian(&u, &sys.z);
        // Normal equations J^H J + mu * (diag(J^H J) + eps) of the LM step.
        let mut jhj = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let mut jhg = vec![Complex64::new(0.0, 0.0); dim];
        for row in 0..jac.len() {
            for a in 0..dim {
                jhg[a] += jac[row][a].conj() * g[row];
                for b in a..dim {
                    jhj[a][b] += jac[row][a].conj() * jac[row][b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                jhj[a][b] = jhj[b][a].conj();
            }
        }
        let mut accepted = false;
        for _ in 0..=30 {
            let mut lhs = jhj.clone();
            for (a, row) in lhs.iter_mut().enumerate() {
                row[a] += mu * (jhj[a][a].re + 1e-12);
            }
            let rhs: Vec<Complex64> = jhg.iter().map(|c| -c).collect();
            let Some(step) = solve_linear(lhs, rhs) else {
                mu *= 10.0;
                continue;
            };
            let candidate: Vec<Complex64> = u.iter().zip(&step).map(|(ui, si)| ui + si).collect();
            let cg = value(&candidate);
            let cnorm = max_norm(cg.iter().map(|c| c.norm()));
            if cnorm < gnorm {
                let step_norm = max_norm(step.iter().map(|c| c.norm()));
                let scale = 1.0 + u.iter().map(|c| c.norm()).fold(0.0, f64::max);
                u = candidate;
                g = cg;
                gnorm = cnorm;
                mu = (mu / 3.0).max(1e-14);
                accepted = true;
                if step_norm < 1e-15 * scale {
                    return Some(u);
                }
                break;
            }
            mu *= 10.0;
            if mu > 1e12 {
                // Stalled in a local minimum of ||G||; the residual gate
                // downstream decides whether it is a solution.
                return Some(u);
            }
        }
        if !accepted {
            return Some(u);
        }
    }
    Some(u)
}

/// Levenberg–Marquardt on the rational system augmented with the chart
/// row, used when all marked points coincide. Coincidence configurations
/// blow the residual up (a natural barrier), and dilation escapes are
/// blocked by the chart residual growing along rays, so no cleared form
/// is needed.
fn rational_chart_phase(
    sys: &BetheSystem,
    start: &[Complex64],
    opts: &SolveOptions,
    escape: f64,
    chart: &Chart,
) -> Option<Vec<Complex64>> {
    let dim = start.len();
    let value = |u: &[Complex64]| -> Vec<Complex64> {
        let mut rows = sys.residual_vec(u);
        rows.push(chart.residual(u));
        rows
    };
    let mut u = start.to_vec();
    let mut g = value(&u);
    let mut gnorm = max_norm(g.iter().map(|c| c.norm()));
    if !gnorm.is_finite() {
        return None;
    }
    let mut mu = 1e-3;
    for _ in 0..opts.max_iter {
        if u.iter().any(|c| c.norm() > escape) {
            return None;
        }
        if sys.residual_norm(&u) < 0.01 * opts.tol {
            return Some(u);
        }
        let mut jac = sys.jacobian(&u);
        jac.push(chart.form.clone());
        let mut jhj = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let mut jhg = vec![Complex64::new(0.0, 0.0); dim];
        for row in 0..jac.len() {
            for a in 0..dim {
                jhg[a] += jac[row][a].conj() * g[row];
                for b in a..dim {
                    jhj[a][b] += jac[row][a].conj() * jac[row][b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                jhj[a][b] = jhj[b][a].conj();
            }
        }
        let mut accepted = false;
        for _ in 0..=30 {
            let mut lhs = jhj.clone();
            for (a, row) in lhs.iter_mut().enumerate() {
                row[a] += mu * (jhj[a][a].re + 1e-12);
            }
            let rhs: Vec<Complex64> = jhg.iter().map(|c| -c).collect();
            let Some(step) = solve_linear(lhs, rhs) else {
                mu *= 10.0;
                continue;
            };
            let candidate: Vec<Complex64> = u.iter().zip(&step).map(|(ui, si)| ui + si).collect();
            let cg = value(&candidate);
            let cnorm = max_norm(cg.iter().map(|c| c.norm()));
            if cnorm < gnorm {
                let step_norm = max_norm(step.iter().map(|c| c.norm()));
                let scale = 1.0 + u.iter().map(|c| c.norm()).fold(0.0, f64::max);
                u = candidate;
                g = cg;
                gnorm = cnorm;
                mu = (mu / 3.0).max(1e-14);
                accepted = true;
                if step_norm < 1e-15 * scale {
                    return Some(u);
                }
                break;
            }
            mu *= 10.0;
            if mu > 1e12 {
                return Some(u);
            }
        }
        if !accepted {
            return Some(u);
        }
    }
    Some(u)
}

/// Short plain-Newton refinement on the rational form.
fn polish(sys: &BetheSystem, u: &mut Vec<Complex64>, tol: f64) {
    for _ in 0..8 {
        let norm = sys.residual_norm(u);
        if norm < 0.01 * tol {
            return;
        }
        let f = sys.residual_vec(u);
        let jac = sys.jacobian(u);
        let rhs: Vec<Complex64> = f.iter().map(|c| -c).collect();
        let Some(step) = solve_linear(jac, rhs) else {
            return;
        };
        let candidate: Vec<Complex64> = u.iter().zip(&step).map(|(ui, si)| ui + si).collect();
        if sys.residual_norm(&candidate) < norm {
            *u = candidate;
        } else {
            return;
        }
    }
}

/// One multistart run: Levenberg–Marquardt on the cleared polynomial
/// system, then a short Newton polish on the rational form, whose
/// residual is the acceptance gate.
fn newton_run(
    sys: &BetheSystem,
    start: &[Complex64],
    opts: &SolveOptions,
    escape: f64,
    chart: Option<&Chart>,
) -> Option<Vec<Complex64>> {
    let mut u = match chart {
        Some(chart) => rational_chart_phase(sys, start, opts, escape, chart)?,
        None => {
            let mut u = cleared_phase(sys, start, opts, escape)?;
            polish(sys, &mut u, opts.tol);
            u
        }
    };
    if sys.residual_norm(&u) >= opts.tol {
        // One more chance through the rational polish.
        polish(sys, &mut u, opts.tol);
    }
    if sys.residual_norm(&u) < opts.tol && u.iter().all(|c| c.norm() <= escape) {
        Some(u)
    } else {
        None
    }
}

/// Multistart solver for the critical system at degree vector `k`.
/// Converged points are filtered through the genericity window,
/// canonically sorted within groups, and deduplicated at pairwise
/// distance below `10·tol`. Fixed seed means identical output.
pub fn solve_bethe(
    p: &ProblemData,
    k: &[usize],
    opts: &SolveOptions,
) -> (Vec<BethePoint>, SolveStats) {
    let sys = BetheSystem::new(p, k);
    let mut stats = SolveStats {
        starts: opts.starts,
        ..SolveStats::default()
    };
    if sys.dim == 0 {
        stats.converged = 1;
        return (
            vec![BethePoint {
                coords: vec![Vec::new(); k.len()],
                residual: 0.0,
            }],
            stats,
        );
    }

    // Starts are sampled from one master stream so the thread count
    // cannot change them. Critical coordinates sit at electrostatic
    // equilibria near the marked points, so most starts are scattered
    // around a random z_a at a random scale, the rest in a wide box.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let center: Complex64 = sys.z.iter().sum::<Complex64>() / sys.z.len().max(1) as f64;
    let spread = sys
        .z
        .iter()
        .map(|za| (za - center).norm())
        .fold(0.0, f64::max);
    let radius = 2.5 * (spread + 1.0);
    let local = 0.7 * (spread + 1.0);
    let escape = ESCAPE_FACTOR * radius;
    // All marked points coinciding makes the system dilation-invariant;
    // each start then solves on its own random affine chart.
    let homogeneous = sys.z.len() <= 1;
    let starts: Vec<(Vec<Complex64>, Option<Chart>)> = (0..opts.starts)
        .map(|_| {
            let coords: Vec<Complex64> = (0..sys.dim)
                .map(|_| {
                    let wide: f64 = rng.random_range(0.0..1.0);
                    if wide < 0.3 || sys.z.is_empty() {
                        center
                            + Complex64::new(
                                rng.random_range(-radius..radius),
                                rng.random_range(-radius..radius),
                            )
                    } else {
                        let a = rng.random_range(0..sys.z.len());
                        let rho: f64 = local * rng.random_range(0.05..1.0);
                        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        sys.z[a] + rho * Complex64::new(theta.cos(), theta.sin())
                    }
                })
                .collect();
            let chart = if homogeneous {
                let base = sys.z.first().copied().unwrap_or(Complex64::new(0.0, 0.0));
                let mut form: Vec<Complex64> = (0..sys.dim)
                    .map(|_| {
                        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        Complex64::new(theta.cos(), theta.sin())
                    })
                    .collect();
                // Scale the chart through the start point so the first
                // iterate begins on it.
                let through: Complex64 = form
                    .iter()
                    .zip(&coords)
                    .map(|(l, ui)| l * (ui - base))
                    .sum();
                if through.norm() > 1e-8 {
                    for l in form.iter_mut() {
                        *l /= through;
                    }
                }
                Some(Chart { form, base })
            } else {
                None
            };
            (coords, chart)
        })
        .collect();

    let threads = opts.threads.max(1).min(starts.len().max(1));
    let mut runs: Vec<Option<Vec<Complex64>>> = vec![None; starts.len()];
    if threads <= 1 {
        for (slot, (start, chart)) in runs.iter_mut().zip(&starts) {
            *slot = newton_run(&sys, start, opts, escape, chart.as_ref());
        }
    } else {
        type StartChunk = (usize, Vec<(Vec<Complex64>, Option<Chart>)>);
        let chunk_len = starts.len().div_ceil(threads);
        let chunks: Vec<StartChunk> = starts
            .chunks(chunk_len)
            .enumerate()
            .map(|(i, chunk)| (i * chunk_len, chunk.to_vec()))
            .collect();
        let results: Vec<(usize, Vec<Option<Vec<Complex64>>>)> = std::thread::scope(|scope| {
            let sys_ref = &sys;
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|(base, chunk)| {
                    let opts = opts.clone();
                    scope.spawn(move || {
                        let out: Vec<Option<Vec<Complex64>>> = chunk
                            .iter()
                            .map(|(start, chart)| {
                                newton_run(sys_ref, start, &opts, escape, chart.as_ref())
                            })
                            .collect();
                        (base, out)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver worker"))
                .collect()
        });
        for (base, chunk) in results {
            for (off, run) in chunk.into_iter().enumerate() {
                runs[base + off] = run;
            }
        }
    }

    let mut accepted: Vec<BethePoint> = Vec::new();
    for run in runs {
        let Some(u) = run else {
            stats.diverged += 1;
            continue;
        };
        stats.converged += 1;
        if !sys.is_generic_point(&u) {
            stats.discarded_nongeneric += 1;
            continue;
        }
        let coords = sys.canonicalize(&u);
        let flat: Vec<Complex64> = coords.iter().flatten().copied().collect();
        let residual = sys.residual_norm(&flat);
        if residual >= opts.tol {
            stats.diverged += 1;
            continue;
        }
        let duplicate = accepted.iter().any(|pt| {
            pt.coords
                .iter()
                .flatten()
                .zip(coords.iter().flatten())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                < 10.0 * opts.tol
        });
        if duplicate {
            stats.deduplicated += 1;
            continue;
        }
        accepted.push(BethePoint { coords, residual });
    }
    accepted.sort_by(|a, b| {
        let fa: Vec<Complex64> = a.coords.iter().flatten().copied().collect();
        let fb: Vec<Complex64> = b.coords.iter().flatten().copied().collect();
        for (x, y) in fa.iter().zip(&fb) {
            let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
    (accepted, stats)
}

/// Residual of the critical system at explicitly given grouped
/// coordinates; the independent recheck used by tests and reports.
pub fn bethe_residual(p: &ProblemData, coords: &[Vec<Complex64>]) -> f64 {
    let k: Vec<usize> = coords.iter().map(Vec::len).collect();
    let sys = BetheSystem::new(p, &k);
    let flat: Vec<Complex64> = coords.iter().flatten().copied().collect();
    if flat.is_empty() {
        return 0.0;
    }
    sys.residual_norm(&flat)
}

/// Monic complex-coefficient tuple, the numeric mirror of [`Tuple`].
#[derive(Debug, Clone)]
pub struct NumericTuple {
    coeffs: Vec<Vec<Complex64>>,
}

impl NumericTuple {
    /// Expands `∏ (x − u_i)` per group of a solved point.
    pub fn from_point(pt: &BethePoint) -> Self {
        NumericTuple {
            coeffs: pt.coords.iter().map(|g| expand_roots(g)).collect(),
        }
    }

    /// Rounds an exact tuple's monic coefficients to doubles.
    pub fn from_exact(t: &Tuple) -> Self {
        NumericTuple {
            coeffs: t
                .components()
                .iter()
                .map(|p| {
                    p.to_f64_coeffs()
                        .into_iter()
                        .map(|c| Complex64::new(c, 0.0))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.coeffs[j]
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.coeffs.iter().map(|c| c.len() - 1).collect()
    }
}

pub fn to_numeric_tuple(pt: &BethePoint) -> NumericTuple {
    NumericTuple::from_point(pt)
}

fn ceval(p: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn cderiv(p: &[Complex64]) -> Vec<Complex64> {
    if p.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

fn cmul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monic expansion of `∏ (x − r)`.
fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        coeffs = cmul(&coeffs, &[-r, Complex64::new(1.0, 0.0)]);
    }
    coeffs
}

/// Synthetic division by `(x − root)`, dropping the remainder.
fn deflate(p: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let n = p.len();
    debug_assert!(n >= 2);
    let mut out = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut carry = p[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = carry;
        carry = p[i] + carry * root;
    }
    out
}

/// All complex roots by Durand–Kerner iteration with Newton polish.
/// Adequate for the well-separated, moderate-degree polynomials this
/// crate produces.
pub fn poly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = p.to_vec();
    while coeffs.last().map(|c| c.norm() == 0.0).unwrap_or(false) {
        coeffs.pop();
    }
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic.iter().take(n).map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|i| bound * seed.powu(i as u32 + 1) / seed.norm().powi(i as i32))
        .collect();
    for _ in 0..400 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let delta = ceval(&monic, roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-14 * bound.max(1.0) {
            break;
        }
    }
    // Newton polish against the full polynomial.
    let deriv = cderiv(&monic);
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = ceval(&deriv, *r);
            if d.norm() < 1e-250 {
                break;
            }
            *r -= ceval(&monic, *r) / d;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn cdiv_rem(num: &[Complex64], den: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let dd = den.len() - 1;
    if num.len() <= dd {
        return (vec![Complex64::new(0.0, 0.0)], num.to_vec());
    }
    let mut rem = num.to_vec();
    let mut quot = vec![Complex64::new(0.0, 0.0); num.len() - dd];
    let lead = den[dd];
    for shift in (0..=num.len() - 1 - dd).rev() {
        let factor = rem[shift + dd] / lead;
        quot[shift] = factor;
        for i in 0..=dd {
            rem[shift + i] -= factor * den[i];
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

fn cantider(p: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = c / (i + 1) as f64;
    }
    out
}

fn t_poly_coeffs(p: &ProblemData, j: usize) -> Vec<Complex64> {
    p.t_poly(j)
        .to_f64_coeffs()
        .into_iter()
        .map(|c| Complex64::new(c, 0.0))
        .collect()
}

fn generation_numerator_numeric(t: &NumericTuple, p: &ProblemData, j: usize) -> Vec<Complex64> {
    let mut num = t_poly_coeffs(p, j);
    for i in 0..p.rank() {
        if i == j {
            continue;
        }
        let e = -p.cartan().entry(j, i);
        for _ in 0..e {
            num = cmul(&num, t.component(i));
        }
    }
    num
}

/// Numeric fertility in direction `j`: every residue of
/// `T_j ∏_{i≠j} y_i^{-a_{j,i}} / y_j²` at the roots of `y_j` must vanish
/// below `tol`. Roots of `y_j` closer than `tol` to each other are
/// rejected, the double-pole residue formula being meaningless there.
pub fn numeric_fertility(
    t: &NumericTuple,
    p: &ProblemData,
    j: usize,
    tol: f64,
) -> Result<bool, OracleError> {
    let yj = t.component(j);
    if yj.len() <= 1 {
        return Ok(true);
    }
    let roots = poly_roots(yj);
    for a in 0..roots.len() {
        for b in (a + 1)..roots.len() {
            if (roots[a] - roots[b]).norm() <= tol {
                return Err(OracleError::ClusteredRoots(format!(
                    "roots of component {j} separated by {:.3e}",
                    (roots[a] - roots[b]).norm()
                )));
            }
        }
    }
    let num = generation_numerator_numeric(t, p, j);
    let num_deriv = cderiv(&num);
    for &u in &roots {
        let v = deflate(yj, u);
        let v_deriv = cderiv(&v);
        let vu = ceval(&v, u);
        // residue of num/y² at the simple root u of y = (x-u)·v
        let res = (ceval(&num_deriv, u) * vu - 2.0 * ceval(&num, u) * ceval(&v_deriv, u))
            / (vu * vu * vu);
        if res.norm() >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gram_f64(p: &ProblemData) -> Result<Vec<Vec<f64>>, OracleError> {
    let gram = p.gram().ok_or(OracleError::MissingGram)?;
    Ok(gram
        .iter()
        .map(|row| row.iter().map(rational_to_f64).collect())
        .collect())
}

fn gram_pole_sum_f64(p: &ProblemData, gram: &[Vec<f64>], a: usize) -> f64 {
    let za = rational_to_f64(&p.points()[a]);
    let mut acc = 0.0;
    for (b, zb) in p.points().iter().enumerate() {
        if b != a {
            acc += gram[a][b] / (za - rational_to_f64(zb));
        }
    }
    acc
}

/// Pointwise value of the criticality identity's tuple part
/// `Σ (α_j,α_j) y''/y + Σ (α_i,α_j) y_i'y_j'/(y_i y_j) − Σ (α_j,α_j) T' y'/(T y)`.
fn criticality_base_at(t: &NumericTuple, p: &ProblemData, x: Complex64) -> Complex64 {
    let r = p.rank();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..r {
        let yj = t.component(j);
        if yj.len() <= 1 {
            continue;
        }
        let d2 = cderiv(&cderiv(yj));
        let bil = 2.0 * p.cartan().symmetrizer(j) as f64;
        acc += bil * ceval(&d2, x) / ceval(yj, x);
    }
    for i in 0..r {
        for j in 0..r {
            if i == j || p.cartan().entry(i, j) == 0 {
                continue;
            }
            let (yi, yj) = (t.component(i), t.component(j));
            if yi.len() <= 1 || yj.len() <= 1 {
                continue;
            }
            let bil = p.cartan().root_bilinear_i64(i, j) as f64;
            acc +=
                bil * ceval(&cderiv(yi), x) * ceval(&cderiv(yj), x) / (ceval(yi, x) * ceval(yj, x));
        }
    }
    for j in 0..r {
        let yj = t.component(j);
        let tj = t_poly_coeffs(p, j);
        if yj.len() <= 1 || tj.len() <= 1 {
            continue;
        }
        let bil = 2.0 * p.cartan().symmetrizer(j) as f64;
        acc -=
            bil * ceval(&cderiv(&tj), x) * ceval(&cderiv(yj), x) / (ceval(&tj, x) * ceval(yj, x));
    }
    acc
}

fn max_pole_radius(t: &NumericTuple, p: &ProblemData) -> f64 {
    let mut m = 0.0f64;
    for za in p.points() {
        m = m.max(rational_to_f64(za).abs());
    }
    for j in 0..t.rank() {
        let c = t.component(j);
        if c.len() > 1 {
            // Cauchy bound on the root moduli of a monic polynomial.
            let bound = 1.0
                + c.iter()
                    .take(c.len() - 1)
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
            m = m.max(bound);
        }
    }
    m
}

/// Max modulus of the full criticality identity over 64 points of a circle
/// enclosing every pole; a small value certifies the identity numerically.
pub fn numeric_nb_residual(
    t: &NumericTuple,
    p: &ProblemData,
    mu: &[Complex64],
) -> Result<f64, OracleError> {
    let gram = gram_f64(p)?;
    assert_eq!(mu.len(), p.points().len(), "one mu per marked point");
    let radius = 2.0 * max_pole_radius(t, p) + 1.0;
    let mut worst = 0.0f64;
    for s in 0..64 {
        let theta = 2.0 * std::f64::consts::PI * s as f64 / 64.0;
        let x = radius * Complex64::new(theta.cos(), theta.sin());
        let mut value = criticality_base_at(t, p, x);
        for (a, za) in p.points().iter().enumerate() {
            let za = Complex64::new(rational_to_f64(za), 0.0);
            let pole_sum = gram_pole_sum_f64(p, &gram, a);
            value += (mu[a] - pole_sum) / (x - za);
        }
        worst = worst.max(value.norm());
    }
    Ok(worst)
}

/// Extracts μ numerically: `μ_a = Σ_{b≠a}(Λ_a,Λ_b)/(z_a−z_b) − Res_{z_a}`,
/// the residue taken by a 64-point contour integral around each marked
/// point. The contour radius is half the distance to the nearest other
/// pole; marked points closer than the genericity window to a tuple root
/// are rejected.
pub fn numeric_mu(t: &NumericTuple, p: &ProblemData) -> Result<Vec<Complex64>, OracleError> {
    let gram = gram_f64(p)?;
    let mut poles: Vec<Complex64> = p
        .points()
        .iter()
        .map(|za| Complex64::new(rational_to_f64(za), 0.0))
        .collect();
    for j in 0..t.rank() {
        if t.component(j).len() > 1 {
            poles.extend(poly_roots(t.component(j)));
        }
    }
    let mut mu = Vec::with_capacity(p.points().len());
    for a in 0..p.points().len() {
        let za = Complex64::new(rational_to_f64(&p.points()[a]), 0.0);
        let nearest = poles
            .iter()
            .map(|q| (q - za).norm())
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        if nearest < GENERICITY_WINDOW {
            return Err(OracleError::ClusteredRoots(format!(
                "pole at distance {nearest:.3e} from marked point {a}"
            )));
        }
        let eps = 0.5 * nearest.min(1.0);
        let mut res = Complex64::new(0.0, 0.0);
        for s in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / 64.0;
            let dir = Complex64::new(theta.cos(), theta.sin());
            res += criticality_base_at(t, p, za + eps * dir) * dir;
        }
        res *= eps / 64.0;
        mu.push(gram_pole_sum_f64(p, &gram, a) - res);
    }
    Ok(mu)
}

/// Diagnostic value of the master function at grouped coordinates:
/// `Σ coeff · ln|argument|` over all pairings. Only the real part is
/// exposed; the imaginary part depends on branch choices and is
/// deliberately unavailable.
pub fn master_function_real(
    p: &ProblemData,
    coords: &[Vec<Complex64>],
) -> Result<f64, OracleError> {
    let gram = gram_f64(p)?;
    let z: Vec<Complex64> = p
        .points()
        .iter()
        .map(|za| Complex64::new(rational_to_f64(za), 0.0))
        .collect();
    let mut acc = 0.0f64;
    for a in 0..z.len() {
        for b in (a + 1)..z.len() {
            acc += gram[a][b] * (z[a] - z[b]).norm().ln();
        }
    }
    for (j, group) in coords.iter().enumerate() {
        let diag = 2.0 * p.cartan().symmetrizer(j) as f64;
        for (a, za) in z.iter().enumerate() {
            let coef = (p.cartan().symmetrizer(j) * p.weights()[a].0[j]) as f64;
            if coef == 0.0 {
                continue;
            }
            for u in group {
                acc -= coef * (u - za).norm().ln();
            }
        }
        for (i, u) in group.iter().enumerate() {
            for v in group.iter().skip(i + 1) {
                acc += diag * (u - v).norm().ln();
            }
        }
        for (jp, other) in coords.iter().enumerate().skip(j + 1) {
            let cross = p.cartan().root_bilinear_i64(j, jp) as f64;
            if cross == 0.0 {
                continue;
            }
            for u in group {
                for v in other {
                    acc += cross * (u - v).norm().ln();
                }
            }
        }
    }
    Ok(acc)
}

/// Charge read off the Laurent tail of the pole terms: the coefficient of
/// `x^{-2}` in `−Σ_a (μ_a − Σ_{b≠a}(Λ_a,Λ_b)/(z_a−z_b))/(x−z_a)` is
/// `−Σ_a (μ_a − …)·z_a`.
pub fn numeric_charge(p: &ProblemData, mu: &[Complex64]) -> Result<f64, OracleError> {
    let gram = gram_f64(p)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, za) in p.points().iter().enumerate() {
        let za = Complex64::new(rational_to_f64(za), 0.0);
        let pole_sum = gram_pole_sum_f64(p, &gram, a);
        acc += (mu[a] - pole_sum) * za;
    }
    Ok(-acc.re)
}

/// Result of matching a numeric tuple against an explored population.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchResult {
    /// Componentwise coincidence with a stored node.
    Node {
        node: usize,
    },
    /// The tuple lies on the generation family of a stored node: fixed
    /// components match and the moving component fits `base + c·direction`.
    Family {
        node: usize,
        direction: usize,
        c: Complex64,
        fit_residual: f64,
    },
    /// The tuple reaches a stored node after `steps` reverse generation
    /// steps (numeric degree descents); certifies population membership
    /// for strata whose extra parameters a finite sample cannot pin down.
    Ancestor {
        node: usize,
        steps: usize,
    },
    NoMatch,
}

impl MatchResult {
    pub fn is_match(&self) -> bool {
        !matches!(self, MatchResult::NoMatch)
    }
}

fn components_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            < tol
}

fn find_node(graph: &PopulationGraph, t: &NumericTuple, tol: f64) -> Option<usize> {
    let degrees = t.degrees();
    for (id, node) in graph.nodes().iter().enumerate() {
        if node.tuple.degrees().0 != degrees {
            continue;
        }
        let numeric = NumericTuple::from_exact(&node.tuple);
        if (0..t.rank()).all(|j| components_close(numeric.component(j), t.component(j), tol)) {
            return Some(id);
        }
    }
    None
}

fn find_family(graph: &PopulationGraph, t: &NumericTuple, tol: f64) -> Option<MatchResult> {
    let p = graph.problem();
    let degrees = t.degrees();
    for (id, node) in graph.nodes().iter().enumerate() {
        if !node.generic {
            continue;
        }
        let numeric = NumericTuple::from_exact(&node.tuple);
        for j in 0..t.rank() {
            if (0..t.rank()).any(|i| i != j && node.tuple.degrees().0[i] != degrees[i]) {
                continue;
            }
            if !(0..t.rank())
                .all(|i| i == j || components_close(numeric.component(i), t.component(i), tol))
            {
                continue;
            }
            let family = match fertility(&node.tuple, p, j) {
                Ok(Fertility::Fertile(f)) => f,
                _ => continue,
            };
            let base: Vec<Complex64> = family
                .base
                .to_f64_coeffs()
                .into_iter()
                .map(|c| Complex64::new(c, 0.0))
                .collect();
            let dir: Vec<Complex64> = family
                .direction
                .to_f64_coeffs()
                .into_iter()
                .map(|c| Complex64::new(c, 0.0))
                .collect();
            if let Some((c, fit_residual)) = fit_family_member(&base, &dir, t.component(j)) {
                if fit_residual < tol {
                    return Some(MatchResult::Family {
                        node: id,
                        direction: j,
                        c,
                        fit_residual,
                    });
                }
            }
        }
    }
    None
}

/// One numeric reverse generation step in direction `j`, defined when the
/// transformed degree drops: the lower-degree member of the tuple's own
/// family is the base of its generation integral, computed here with the
/// double-pole part interpolated at the roots of `y_j`.
fn numeric_descend(t: &NumericTuple, p: &ProblemData, j: usize) -> Option<NumericTuple> {
    let degrees: Vec<i64> = t.degrees().iter().map(|&v| v as i64).collect();
    let transformed = p.degree_transform(&degrees, j);
    if transformed[j] < 0 || transformed[j] >= degrees[j] {
        return None;
    }
    let target = transformed[j] as usize;
    let yj = t.component(j).to_vec();
    let k = yj.len() - 1;
    // Only fertile directions descend; residues must vanish.
    if !numeric_fertility(t, p, j, 1e-7).ok()? {
        return None;
    }
    let num = generation_numerator_numeric(t, p, j);
    let y_sq = cmul(&yj, &yj);
    let (quot, rem) = cdiv_rem(&num, &y_sq);
    // B has degree < k and matches rem/y' at every root of y_j; Lagrange
    // interpolation through the well-separated roots.
    let roots = poly_roots(&yj);
    if roots.len() != k {
        return None;
    }
    let y_deriv = cderiv(&yj);
    let values: Vec<Complex64> = roots
        .iter()
        .map(|&u| ceval(&rem, u) / ceval(&y_deriv, u))
        .collect();
    let b = lagrange(&roots, &values);
    // base = y · ∫quot − B, a polynomial of the transformed degree.
    let mut base = cmul(&yj, &cantider(&quot));
    for (i, v) in b.iter().enumerate() {
        if i < base.len() {
            base[i] -= v;
        } else {
            base.push(-v);
        }
    }
    // Trim the numerically-zero top down to the expected degree.
    let scale = base.iter().map(|c| c.norm()).fold(1e-300, f64::max);
    while base.len() > target + 1 {
        let top = base.last().unwrap().norm();
        if top < 1e-8 * scale {
            base.pop();
        } else {
            return None;
        }
    }
    if base.len() != target + 1 {
        return None;
    }
    let lead = *base.last()?;
    if lead.norm() < 1e-12 * scale {
        return None;
    }
    let monic: Vec<Complex64> = base.iter().map(|c| c / lead).collect();
    let mut coeffs = t.coeffs.clone();
    coeffs[j] = monic;
    Some(NumericTuple { coeffs })
}

fn lagrange(points: &[Complex64], values: &[Complex64]) -> Vec<Complex64> {
    let n = points.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); n.max(1)];
    for i in 0..n {
        let mut basis = vec![Complex64::new(1.0, 0.0)];
        let mut denom = Complex64::new(1.0, 0.0);
        for (l, &pl) in points.iter().enumerate() {
            if l != i {
                basis = cmul(&basis, &[-pl, Complex64::new(1.0, 0.0)]);
                denom *= points[i] - pl;
            }
        }
        let weight = values[i] / denom;
        for (c, b) in acc.iter_mut().zip(&basis) {
            *c += weight * b;
        }
    }
    acc
}

/// Searches the graph for the numeric tuple: as a stored node, as a
/// member of a stored node's generation family, and finally through
/// repeated numeric degree descent until a stored node (typically the
/// root) is reached.
pub fn match_population(graph: &PopulationGraph, t: &NumericTuple, tol: f64) -> MatchResult {
    let p = graph.problem();
    if let Some(node) = find_node(graph, t, tol) {
        return MatchResult::Node { node };
    }
    if let Some(found) = find_family(graph, t, tol) {
        return found;
    }
    // Reverse generation: descend strictly in degree, re-checking the
    // stored nodes after every step.
    let mut current = t.clone();
    let mut steps = 0usize;
    loop {
        let degrees: Vec<i64> = current.degrees().iter().map(|&v| v as i64).collect();
        let Some(j) = (0..p.rank()).find(|&j| {
            let transformed = p.degree_transform(&degrees, j);
            transformed[j] >= 0 && transformed[j] < degrees[j]
        }) else {
            return MatchResult::NoMatch;
        };
        let Some(next) = numeric_descend(&current, p, j) else {
            return MatchResult::NoMatch;
        };
        current = next;
        steps += 1;
        if let Some(node) = find_node(graph, &current, tol.max(1e-9 * steps as f64)) {
            return MatchResult::Ancestor { node, steps };
        }
        if steps > 4 * (t.degrees().iter().sum::<usize>() + 1) {
            return MatchResult::NoMatch;
        }
    }
}

/// Least-squares fit of `s·f = base + c·dir` over the coefficient vectors;
/// returns the family parameter `c/s` and a residual comparing the monic
/// fitted member against the monic `f`, relative to the coefficient scale.
fn fit_family_member(
    base: &[Complex64],
    dir: &[Complex64],
    f: &[Complex64],
) -> Option<(Complex64, f64)> {
    let n = base.len().max(dir.len()).max(f.len());
    let get = |v: &[Complex64], i: usize| v.get(i).copied().unwrap_or(Complex64::new(0.0, 0.0));
    // Normal equations for unknowns (s, c) of s·f − c·dir = base.
    let mut a11 = Complex64::new(0.0, 0.0);
    let mut a12 = Complex64::new(0.0, 0.0);
    let mut a22 = Complex64::new(0.0, 0.0);
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let (fi, di, bi) = (get(f, i), -get(dir, i), get(base, i));
        a11 += fi.conj() * fi;
        a12 += fi.conj() * di;
        a22 += di.conj() * di;
        b1 += fi.conj() * bi;
        b2 += di.conj() * bi;
    }
    let a21 = a12.conj();
    let det = a11 * a22 - a12 * a21;
    let (s, c) = if det.norm() < 1e-280 {
        // dir degenerate or absent: fit s alone.
        if a11.norm() < 1e-280 {
            return None;
        }
        (b1 / a11, Complex64::new(0.0, 0.0))
    } else {
        ((a22 * b1 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det)
    };
    if s.norm() < 1e-150 {
        return None;
    }
    // Monic comparison of the fitted member with f.
    let mut member: Vec<Complex64> = (0..n).map(|i| get(base, i) + c * get(dir, i)).collect();
    while member.last().map(|v| v.norm() < 1e-12).unwrap_or(false) {
        member.pop();
    }
    if member.len() != f.len() {
        return None;
    }
    let lead = *member.last()?;
    let scale = f.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let residual = member
        .iter()
        .zip(f)
        .map(|(m, fi)| (m / lead - fi).norm())
        .fold(0.0, f64::max)
        / scale;
    Some((c / s, residual))
}
