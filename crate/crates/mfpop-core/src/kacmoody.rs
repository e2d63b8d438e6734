//! Symmetrizable generalized Cartan matrices and the weight combinatorics
//! built on them: the bilinear form `(α_i, α_j) = b_i a_{i,j}`, the shifted
//! Weyl action `w·λ = w(λ+ρ) − ρ`, weights at infinity, the degree-vector
//! transform attached to one generation step, and the charge quadratic form.
//!
//! Weights are carried as coroot-pairing vectors `m_i = ⟨λ, α_i^∨⟩` only;
//! full Cartan-subalgebra coordinates are never materialized. All arithmetic
//! in this module is exact (integers and arbitrary-precision rationals).

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::big_rational_from_i64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    /// Not a generalized Cartan matrix: bad diagonal, positive off-diagonal
    /// entry, or an asymmetric zero pattern.
    #[error("NotGCM: {0}")]
    NotGCM(String),
    /// `diag(b) · A` is not symmetric for the supplied symmetrizer.
    #[error("NotSymmetrizable: b[{i}]*a[{i}][{j}] != b[{j}]*a[{j}][{i}]")]
    NotSymmetrizable { i: usize, j: usize },
    #[error("NonPositiveSymmetrizer: b[{0}] must be a positive integer")]
    NonPositiveSymmetrizer(usize),
    /// The Cartan matrix has a nontrivial kernel, so fundamental-weight
    /// pairings do not determine a Gram matrix; it must be user-supplied.
    #[error("SingularCartan: kernel dimension {0} > 0, Gram matrix must be supplied")]
    SingularCartan(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Coroot pairings `m_i = ⟨λ, α_i^∨⟩` of a weight `λ`.
///
/// Input weights are dominant integral (all entries ≥ 0); derived weights
/// such as the weight at infinity may have entries of any sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightPairings(pub Vec<i64>);

impl WeightPairings {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True iff every pairing is nonnegative, i.e. the weight is dominant
    /// integral.
    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&m| m >= 0)
    }
}

impl fmt::Display for WeightPairings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// Componentwise degrees `k = (k_1, …, k_r)` of a polynomial tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeVector(pub Vec<usize>);

impl DegreeVector {
    pub fn zero(rank: usize) -> Self {
        DegreeVector(vec![0; rank])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&k| k as i64).collect()
    }
}

/// A validated symmetrizable generalized Cartan matrix together with its
/// positive integral symmetrizer and the exactly computed kernel dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
    rank: usize,
    kernel_dim: usize,
}

impl CartanData {
    /// Validates a candidate Cartan matrix and symmetrizer.
    ///
    /// Checks `a_{ii} = 2`, `a_{ij} ≤ 0` for `i ≠ j`, the symmetry of the
    /// zero pattern, positivity of `b`, and symmetry of `diag(b)·A`; the
    /// kernel dimension is recomputed by exact elimination over rationals.
    pub fn validate(a: Vec<Vec<i64>>, b: Vec<i64>) -> Result<Self, CartanError> {
        let rank = a.len();
        if rank == 0 {
            return Err(CartanError::Shape("empty Cartan matrix".to_string()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != rank {
                return Err(CartanError::Shape(format!(
                    "row {i} has length {}, expected {rank}",
                    row.len()
                )));
            }
        }
        if b.len() != rank {
            return Err(CartanError::Shape(format!(
                "symmetrizer has length {}, expected {rank}",
                b.len()
            )));
        }
        for (i, &bi) in b.iter().enumerate() {
            if bi <= 0 {
                return Err(CartanError::NonPositiveSymmetrizer(i));
            }
        }
        for i in 0..rank {
            if a[i][i] != 2 {
                return Err(CartanError::NotGCM(format!(
                    "a[{i}][{i}] = {} != 2",
                    a[i][i]
                )));
            }
            for j in 0..rank {
                if i != j {
                    if a[i][j] > 0 {
                        return Err(CartanError::NotGCM(format!(
                            "a[{i}][{j}] = {} > 0",
                            a[i][j]
                        )));
                    }
                    if (a[i][j] == 0) != (a[j][i] == 0) {
                        return Err(CartanError::NotGCM(format!(
                            "zero pattern asymmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        for i in 0..rank {
            for j in (i + 1)..rank {
                if b[i] * a[i][j] != b[j] * a[j][i] {
                    return Err(CartanError::NotSymmetrizable { i, j });
                }
            }
        }
        let rational: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| row.iter().map(|&e| big_rational_from_i64(e)).collect())
            .collect();
        let kernel_dim = rank - rational_rank(rational);
        Ok(CartanData {
            a,
            b,
            rank,
            kernel_dim,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the kernel of the Cartan matrix; zero exactly for
    /// finite type.
    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn is_invertible(&self) -> bool {
        self.kernel_dim == 0
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn symmetrizer(&self, i: usize) -> i64 {
        self.b[i]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn symmetrizer_vec(&self) -> &[i64] {
        &self.b
    }

    /// `(α_i, α_j) = b_i a_{i,j}`, symmetric by validation.
    pub fn root_bilinear(&self, i: usize, j: usize) -> BigRational {
        assert!(i < self.rank && j < self.rank, "root index out of range");
        big_rational_from_i64(self.b[i] * self.a[i][j])
    }

    /// Integer value of `(α_i, α_j)`.
    pub fn root_bilinear_i64(&self, i: usize, j: usize) -> i64 {
        assert!(i < self.rank && j < self.rank, "root index out of range");
        self.b[i] * self.a[i][j]
    }

    /// Shifted reflection `s_j · λ = s_j(λ + ρ) − ρ` on pairing vectors:
    /// `m'_i = m_i − (m_j + 1) a_{i,j}`. Involutive in each direction.
    pub fn shifted_reflection(&self, j: usize, m: &WeightPairings) -> WeightPairings {
        assert!(j < self.rank, "reflection index out of range");
        assert_eq!(m.len(), self.rank, "pairing vector has wrong length");
        let factor = m.0[j] + 1;
        WeightPairings(
            (0..self.rank)
                .map(|i| m.0[i] - factor * self.a[i][j])
                .collect(),
        )
    }

    /// Closure of a pairing vector under shifted reflections, cut off at
    /// the given word length. For finite type a radius of `r·(r+1)/2` (the
    /// number of positive roots bounds the longest element) captures the
    /// whole orbit; affine orbits are infinite and the radius is the caller's
    /// truncation.
    pub fn shifted_orbit(&self, start: &WeightPairings, radius: usize) -> BTreeSet<WeightPairings> {
        let mut seen: BTreeSet<WeightPairings> = BTreeSet::new();
        seen.insert(start.clone());
        let mut frontier = vec![start.clone()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for m in &frontier {
                for j in 0..self.rank {
                    let image = self.shifted_reflection(j, m);
                    if seen.insert(image.clone()) {
                        next.push(image);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        seen
    }

    /// Exact inverse of the Cartan matrix, when it exists.
    pub fn inverse(&self) -> Option<Vec<Vec<BigRational>>> {
        if self.kernel_dim != 0 {
            return None;
        }
        let rational: Vec<Vec<BigRational>> = self
            .a
            .iter()
            .map(|row| row.iter().map(|&e| big_rational_from_i64(e)).collect())
            .collect();
        rational_inverse(rational)
    }

    /// Gram matrix `(Λ_a, Λ_b) = Σ_{i,j} m_{a,i} m_{b,j} b_i (A^{-1})_{ij}`
    /// of weights given by pairing vectors, via the fundamental-weight Gram
    /// matrix `(ω_i, ω_j) = b_i (A^{-1})_{ij}`. Requires an invertible
    /// Cartan matrix.
    pub fn gram_default(
        &self,
        weights: &[WeightPairings],
    ) -> Result<Vec<Vec<BigRational>>, CartanError> {
        let inv = self
            .inverse()
            .ok_or(CartanError::SingularCartan(self.kernel_dim))?;
        for w in weights {
            if w.len() != self.rank {
                return Err(CartanError::Shape(format!(
                    "weight pairing vector has length {}, expected {}",
                    w.len(),
                    self.rank
                )));
            }
        }
        let fw_gram: Vec<Vec<BigRational>> = (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| big_rational_from_i64(self.b[i]) * &inv[i][j])
                    .collect()
            })
            .collect();
        let n = weights.len();
        let mut gram = vec![vec![BigRational::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let mut acc = BigRational::zero();
                for i in 0..self.rank {
                    if weights[a].0[i] == 0 {
                        continue;
                    }
                    for j in 0..self.rank {
                        if weights[b].0[j] == 0 {
                            continue;
                        }
                        acc += big_rational_from_i64(weights[a].0[i] * weights[b].0[j])
                            * &fw_gram[i][j];
                    }
                }
                gram[a][b] = acc.clone();
                gram[b][a] = acc;
            }
        }
        Ok(gram)
    }
}

/// Pairings `⟨Λ_∞, α_i^∨⟩ = τ_i − Σ_j a_{i,j} k_j` of the weight at
/// infinity for total weight degrees `τ` and degree vector `k`.
pub fn infinity_pairings(cd: &CartanData, tau: &[i64], k: &[i64]) -> WeightPairings {
    assert_eq!(tau.len(), cd.rank);
    assert_eq!(k.len(), cd.rank);
    WeightPairings(
        (0..cd.rank)
            .map(|i| tau[i] - (0..cd.rank).map(|j| cd.a[i][j] * k[j]).sum::<i64>())
            .collect(),
    )
}

/// Degree vector after one generation step in direction `j`:
/// the `j`-th entry becomes `k̃_j = τ_j + 1 − k_j − Σ_{i≠j} a_{j,i} k_i`.
/// The result can be negative; callers decide validity.
pub fn transformed_degrees(cd: &CartanData, tau: &[i64], k: &[i64], j: usize) -> Vec<i64> {
    assert!(j < cd.rank, "direction index out of range");
    let mut out = k.to_vec();
    let cross: i64 = (0..cd.rank)
        .filter(|&i| i != j)
        .map(|i| cd.a[j][i] * k[i])
        .sum();
    out[j] = tau[j] + 1 - k[j] - cross;
    out
}

/// Charge quadratic form
/// `B(k) = Σ_j (α_j,α_j) k_j (k_j − 1 − τ_j) + Σ_{i≠j} (α_i,α_j) k_i k_j`,
/// invariant under `transformed_degrees` in every direction.
pub fn charge_form(cd: &CartanData, tau: &[i64], k: &[i64]) -> i64 {
    let r = cd.rank;
    assert_eq!(tau.len(), r);
    assert_eq!(k.len(), r);
    let mut total = 0i64;
    for j in 0..r {
        total += 2 * cd.b[j] * k[j] * (k[j] - 1 - tau[j]);
    }
    for i in 0..r {
        for j in 0..r {
            if i != j {
                total += cd.b[i] * cd.a[i][j] * k[i] * k[j];
            }
        }
    }
    total
}

/// Minimality inequality `τ_j + 1 − Σ_i a_{j,i} k_i > 0` for all `j`;
/// by integrality this is equivalent to dominance of the weight at infinity.
pub fn is_minimal_degree(cd: &CartanData, tau: &[i64], k: &[i64]) -> bool {
    infinity_pairings(cd, tau, k).is_dominant()
}

/// Exact rank of a rational matrix by Gaussian elimination.
fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let pivot = m[pivot_row][col].clone();
        for r in (pivot_row + 1)..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..cols {
                let delta = &factor * &m[pivot_row][c];
                m[r][c] -= delta;
            }
        }
        pivot_row += 1;
        rank += 1;
        if pivot_row == rows {
            break;
        }
    }
    rank
}

/// Exact inverse by Gauss-Jordan elimination; `None` when singular.
fn rational_inverse(mut m: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let one = BigRational::from_integer(BigInt::from(1));
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        one.clone()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let src = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, src);
        inv.swap(col, src);
        let pivot = m[col][col].clone();
        for c in 0..n {
            m[col][c] /= &pivot;
            inv[col][c] /= &pivot;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..n {
                let dm = &factor * &m[col][c];
                m[r][c] -= dm;
                let di = &factor * &inv[col][c];
                inv[r][c] -= di;
            }
        }
    }
    Some(inv)
}
