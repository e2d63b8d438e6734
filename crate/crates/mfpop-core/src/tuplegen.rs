//! Problem assembly and the generation machinery on polynomial tuples:
//! genericity tests, fertility decided by the Hermite residual, the
//! one-parameter families of descendants, μ-extraction through exact
//! residues, and the per-tuple charge.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::kacmoody::{self, CartanData, DegreeVector, WeightPairings};
use crate::polyring::{hermite_integrate_sq, squarefree, wronskian, Poly, PolyError, RatFun};
use crate::rat::format_rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("DuplicatePoints: marked points must be pairwise distinct")]
    DuplicatePoints,
    #[error("NonDominantWeight: weight {0} has a negative coroot pairing")]
    NonDominantWeight(usize),
    #[error("GramShapeMismatch: {0}")]
    GramShapeMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TupleError {
    #[error("ZeroMember: a tuple component is the zero polynomial")]
    ZeroMember,
    #[error("NotSquarefreeDirection: component {0} has a repeated root")]
    NotSquarefreeDirection(usize),
    #[error("MissingGram: operation needs a Gram matrix of the weights")]
    MissingGram,
    #[error("NonGenericTuple: operation requires a generic tuple")]
    NonGenericTuple,
    #[error("RankMismatch: tuple has {got} components, problem has rank {want}")]
    RankMismatch { got: usize, want: usize },
}

/// Marked points, dominant weights and everything derived from them: the
/// polynomials `T_j = ∏_a (x − z_a)^{⟨Λ_a, α_j^∨⟩}`, their degrees `τ_j`,
/// and an optional Gram matrix `(Λ_a, Λ_b)` (defaulted from the inverse
/// Cartan matrix in finite type).
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    cartan: CartanData,
    z: Vec<BigRational>,
    weights: Vec<WeightPairings>,
    t_polys: Vec<Poly>,
    tau: Vec<i64>,
    gram: Option<Vec<Vec<BigRational>>>,
}

impl ProblemData {
    pub fn build(
        cartan: CartanData,
        z: Vec<BigRational>,
        weights: Vec<WeightPairings>,
        gram: Option<Vec<Vec<BigRational>>>,
    ) -> Result<Self, ProblemError> {
        let n = z.len();
        if weights.len() != n {
            return Err(ProblemError::Shape(format!(
                "{} weights for {} points",
                weights.len(),
                n
            )));
        }
        let rank = cartan.rank();
        for (a, w) in weights.iter().enumerate() {
            if w.len() != rank {
                return Err(ProblemError::Shape(format!(
                    "weight {a} has {} pairings, expected {rank}",
                    w.len()
                )));
            }
            if !w.is_dominant() {
                return Err(ProblemError::NonDominantWeight(a));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if z[i] == z[j] {
                    return Err(ProblemError::DuplicatePoints);
                }
            }
        }
        let gram = match gram {
            Some(g) => {
                if g.len() != n || g.iter().any(|row| row.len() != n) {
                    return Err(ProblemError::GramShapeMismatch(format!(
                        "expected {n}x{n} matrix"
                    )));
                }
                for a in 0..n {
                    for b in (a + 1)..n {
                        if g[a][b] != g[b][a] {
                            return Err(ProblemError::GramShapeMismatch(format!(
                                "asymmetric at ({a},{b})"
                            )));
                        }
                    }
                }
                Some(g)
            }
            None if cartan.is_invertible() => Some(
                cartan
                    .gram_default(&weights)
                    .expect("invertible Cartan matrix has a default Gram"),
            ),
            None => None,
        };
        let mut t_polys = Vec::with_capacity(rank);
        let mut tau = Vec::with_capacity(rank);
        for j in 0..rank {
            let mut t = Poly::one();
            let mut deg = 0i64;
            for (a, za) in z.iter().enumerate() {
                let mult = weights[a].0[j];
                debug_assert!(mult >= 0);
                let factor = Poly::from_roots(std::slice::from_ref(za));
                t = &t * &factor.pow(mult as usize);
                deg += mult;
            }
            t_polys.push(t);
            tau.push(deg);
        }
        Ok(ProblemData {
            cartan,
            z,
            weights,
            t_polys,
            tau,
            gram,
        })
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn points(&self) -> &[BigRational] {
        &self.z
    }

    pub fn weights(&self) -> &[WeightPairings] {
        &self.weights
    }

    pub fn t_poly(&self, j: usize) -> &Poly {
        &self.t_polys[j]
    }

    pub fn tau(&self) -> &[i64] {
        &self.tau
    }

    pub fn gram(&self) -> Option<&Vec<Vec<BigRational>>> {
        self.gram.as_ref()
    }

    /// Pairings of the weight at infinity for degree vector `k`.
    pub fn infinity_weight(&self, k: &[i64]) -> WeightPairings {
        kacmoody::infinity_pairings(&self.cartan, &self.tau, k)
    }

    /// Degree vector after a generation step in direction `j`; entries may
    /// be negative, in which case no tuple of that shape exists.
    pub fn degree_transform(&self, k: &[i64], j: usize) -> Vec<i64> {
        kacmoody::transformed_degrees(&self.cartan, &self.tau, k, j)
    }

    pub fn charge_form(&self, k: &[i64]) -> i64 {
        kacmoody::charge_form(&self.cartan, &self.tau, k)
    }

    pub fn is_minimal_degree(&self, k: &[i64]) -> bool {
        kacmoody::is_minimal_degree(&self.cartan, &self.tau, k)
    }

    /// `Σ_{b≠a} (Λ_a, Λ_b)/(z_a − z_b)`, the pole datum of the criticality
    /// identity at `z_a`.
    pub fn gram_pole_sum(&self, a: usize) -> Option<BigRational> {
        let gram = self.gram.as_ref()?;
        let mut acc = BigRational::zero();
        for b in 0..self.z.len() {
            if b != a {
                acc += &gram[a][b] / (&self.z[a] - &self.z[b]);
            }
        }
        Some(acc)
    }
}

/// An `r`-tuple of monic polynomials, the projective representative of a
/// critical point. The degree vector is derived from the components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    y: Vec<Poly>,
    k: DegreeVector,
}

impl Tuple {
    /// Normalizes each component to its monic representative.
    pub fn new(components: Vec<Poly>) -> Result<Self, TupleError> {
        if components.iter().any(Poly::is_zero) {
            return Err(TupleError::ZeroMember);
        }
        let y: Vec<Poly> = components.iter().map(Poly::monic).collect();
        let k = DegreeVector(y.iter().map(|p| p.degree().unwrap()).collect());
        Ok(Tuple { y, k })
    }

    /// The tuple `(1, …, 1)` of constant polynomials, generic and fertile
    /// for any problem data.
    pub fn trivial(rank: usize) -> Self {
        Tuple {
            y: vec![Poly::one(); rank],
            k: DegreeVector::zero(rank),
        }
    }

    pub fn components(&self) -> &[Poly] {
        &self.y
    }

    pub fn component(&self, j: usize) -> &Poly {
        &self.y[j]
    }

    pub fn rank(&self) -> usize {
        self.y.len()
    }

    pub fn degrees(&self) -> &DegreeVector {
        &self.k
    }

    pub fn is_trivial(&self) -> bool {
        self.y.iter().all(Poly::is_one)
    }

    /// Exact dedup key: the monic coefficient lists of all components.
    pub fn canonical_key(&self) -> String {
        let parts: Vec<String> = self.y.iter().map(Poly::canonical_key).collect();
        parts.join(";")
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.y.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Which genericity condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenericityCondition {
    /// (i): a component has a repeated root.
    MultipleRoots,
    /// (ii): a component shares a root with its `T_j`.
    SharesRootWithT,
    /// (iii): two interacting components (`a_{i,j} ≠ 0`) share a root.
    InteractingComponentsShareRoot,
}

impl fmt::Display for GenericityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericityCondition::MultipleRoots => write!(f, "i"),
            GenericityCondition::SharesRootWithT => write!(f, "ii"),
            GenericityCondition::InteractingComponentsShareRoot => write!(f, "iii"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityViolation {
    pub condition: GenericityCondition,
    pub component: usize,
    /// Second component index for condition (iii).
    pub other: Option<usize>,
    /// The offending gcd.
    pub witness: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityReport {
    pub ok: bool,
    pub violations: Vec<GenericityViolation>,
}

/// Checks all three genericity conditions and reports every violation.
pub fn is_generic(t: &Tuple, p: &ProblemData) -> GenericityReport {
    let r = p.rank();
    debug_assert_eq!(t.rank(), r);
    let mut violations = Vec::new();
    for j in 0..r {
        let yj = t.component(j);
        let d = yj.gcd(&yj.derivative());
        if d.degree() != Some(0) {
            violations.push(GenericityViolation {
                condition: GenericityCondition::MultipleRoots,
                component: j,
                other: None,
                witness: d,
            });
        }
        let d = yj.gcd(p.t_poly(j));
        if d.degree() != Some(0) {
            violations.push(GenericityViolation {
                condition: GenericityCondition::SharesRootWithT,
                component: j,
                other: None,
                witness: d,
            });
        }
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if p.cartan().entry(i, j) == 0 {
                continue;
            }
            let d = t.component(i).gcd(t.component(j));
            if d.degree() != Some(0) {
                violations.push(GenericityViolation {
                    condition: GenericityCondition::InteractingComponentsShareRoot,
                    component: i,
                    other: Some(j),
                    witness: d,
                });
            }
        }
    }
    GenericityReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// The one-parameter family `base + c·direction` of descendants of
/// `parent` in one direction. `W(direction, base)` equals the generation
/// numerator `T_j ∏_{i≠j} y_i^{-a_{j,i}}` exactly; this is asserted when
/// the family is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationFamily {
    pub direction_index: usize,
    pub base: Poly,
    pub direction: Poly,
    pub parent: Tuple,
}

impl GenerationFamily {
    /// Raw (not monic) member at parameter `c`.
    pub fn member(&self, c: &BigRational) -> Poly {
        &self.base + &self.direction.scale(c)
    }

    /// The parameter producing a member of lower degree than the rest of
    /// the family, when one exists: `c = 0` if the base already has lower
    /// degree than the direction, or the leading-coefficient cancellation
    /// value when both have the same degree.
    pub fn degree_drop_c(&self) -> Option<BigRational> {
        let db = self.base.degree().expect("family base is nonzero");
        let dd = self
            .direction
            .degree()
            .expect("family direction is nonzero");
        if db < dd {
            Some(BigRational::zero())
        } else if db == dd {
            let lead_b = self.base.leading().unwrap();
            let lead_d = self.direction.leading().unwrap();
            Some(-(lead_b / lead_d))
        } else {
            None
        }
    }

    /// Finds the parameter at which the family member is proportional to
    /// `poly`, i.e. solves `s·poly = base + c·direction` exactly with
    /// `s ≠ 0`. Returns `None` when `poly` is not on the family.
    pub fn parameter_of(&self, poly: &Poly) -> Option<BigRational> {
        if poly.is_zero() {
            return None;
        }
        let n = poly
            .coeffs()
            .len()
            .max(self.base.coeffs().len())
            .max(self.direction.coeffs().len());
        // Rows of [poly_i, -dir_i | base_i]; unknowns (s, c).
        let pivot1 = (0..n).find(|&i| !poly.coeff(i).is_zero())?;
        let p1 = poly.coeff(pivot1);
        let reduce = |i: usize| -> (BigRational, BigRational) {
            // Eliminate s from row i using the pivot row.
            let factor = poly.coeff(i) / &p1;
            let dir = -self.direction.coeff(i) + &factor * self.direction.coeff(pivot1);
            let rhs = self.base.coeff(i) - &factor * self.base.coeff(pivot1);
            (dir, rhs)
        };
        let pivot2 = (0..n)
            .filter(|&i| i != pivot1)
            .find(|&i| !reduce(i).0.is_zero());
        let c = match pivot2 {
            Some(i) => {
                let (dir, rhs) = reduce(i);
                rhs / dir
            }
            // Direction is proportional to poly after elimination; any c
            // works if consistent, pick 0.
            None => BigRational::zero(),
        };
        let s = (self.base.coeff(pivot1) + &c * self.direction.coeff(pivot1)) / &p1;
        if s.is_zero() {
            return None;
        }
        // Verify every coefficient.
        let member = self.member(&c);
        if member == poly.scale(&s) {
            Some(c)
        } else {
            None
        }
    }
}

/// Outcome of the fertility test in one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fertility {
    Fertile(GenerationFamily),
    /// The Hermite residual obstructing a polynomial solution of the
    /// Wronskian equation; nonzero by construction.
    NotFertile {
        residual: Poly,
    },
}

impl Fertility {
    pub fn is_fertile(&self) -> bool {
        matches!(self, Fertility::Fertile(_))
    }

    pub fn family(self) -> Option<GenerationFamily> {
        match self {
            Fertility::Fertile(f) => Some(f),
            Fertility::NotFertile { .. } => None,
        }
    }
}

/// Generation numerator `T_j ∏_{i≠j} y_i^{-a_{j,i}}`; the off-diagonal
/// Cartan entries are nonpositive, so this is a polynomial.
pub fn generation_numerator(t: &Tuple, p: &ProblemData, j: usize) -> Poly {
    let mut num = p.t_poly(j).clone();
    for i in 0..p.rank() {
        if i == j {
            continue;
        }
        let e = -p.cartan().entry(j, i);
        debug_assert!(e >= 0);
        if e > 0 {
            num = &num * &t.component(i).pow(e as usize);
        }
    }
    num
}

/// Decides fertility of `t` in direction `j` by Hermite reduction of
/// `∫ T_j ∏_{i≠j} y_i^{-a_{j,i}} / y_j²`: a vanishing residual yields the
/// family `y_j·∫ + c·y_j`, a nonzero residual is the obstruction witness.
pub fn fertility(t: &Tuple, p: &ProblemData, j: usize) -> Result<Fertility, TupleError> {
    if t.rank() != p.rank() {
        return Err(TupleError::RankMismatch {
            got: t.rank(),
            want: p.rank(),
        });
    }
    assert!(j < p.rank(), "direction index out of range");
    let yj = t.component(j);
    match squarefree(yj) {
        Ok(true) => {}
        Ok(false) | Err(PolyError::ZeroPolynomial) => {
            return Err(TupleError::NotSquarefreeDirection(j))
        }
        Err(_) => unreachable!(),
    }
    let num = generation_numerator(t, p, j);
    let parts = match hermite_integrate_sq(&num, yj) {
        Ok(parts) => parts,
        Err(_) => return Err(TupleError::NotSquarefreeDirection(j)),
    };
    if !parts.residual.is_zero() {
        return Ok(Fertility::NotFertile {
            residual: parts.residual,
        });
    }
    // base = y_j · (poly_part + rational_part); the reduced rational part
    // has denominator dividing y_j, so this is a polynomial.
    let antider = parts.rational_part;
    let cofactor = yj.exact_div(antider.den());
    let base = &(&parts.poly_part * yj) + &(antider.num() * &cofactor);
    assert_eq!(
        wronskian(yj, &base),
        num,
        "generation family fails the Wronskian identity"
    );
    Ok(Fertility::Fertile(GenerationFamily {
        direction_index: j,
        base,
        direction: yj.clone(),
        parent: t.clone(),
    }))
}

/// Instantiates the family member at parameter `c` as a full tuple, monic
/// in every component. The new component degree is `k_j` or `k̃_j`.
pub fn generate(family: &GenerationFamily, c: &BigRational) -> Result<Tuple, TupleError> {
    let member = family.member(c);
    if member.is_zero() {
        return Err(TupleError::ZeroMember);
    }
    let mut components = family.parent.components().to_vec();
    components[family.direction_index] = member;
    Tuple::new(components)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuExtraction {
    pub mu: Vec<BigRational>,
    pub mu_sum: BigRational,
    /// True iff the criticality identity holds exactly, i.e. the tuple
    /// represents a critical point.
    pub identity_ok: bool,
}

/// Left-hand side of the criticality identity without the pole terms at
/// the marked points:
/// `Σ_j (α_j,α_j) y_j''/y_j + Σ_{i≠j} (α_i,α_j) y_i'y_j'/(y_i y_j)
///  − Σ_j (α_j,α_j) T_j'y_j'/(T_j y_j)`.
fn criticality_base(t: &Tuple, p: &ProblemData) -> RatFun {
    let r = p.rank();
    let mut acc = RatFun::zero();
    for j in 0..r {
        let yj = t.component(j);
        if yj.is_constant() {
            continue;
        }
        let bil = p.cartan().root_bilinear(j, j);
        acc = &acc + &RatFun::new(yj.derivative().derivative().scale(&bil), yj.clone());
    }
    for i in 0..r {
        for j in 0..r {
            if i == j || p.cartan().entry(i, j) == 0 {
                continue;
            }
            let (yi, yj) = (t.component(i), t.component(j));
            if yi.is_constant() || yj.is_constant() {
                continue;
            }
            let bil = p.cartan().root_bilinear(i, j);
            let num = (&yi.derivative() * &yj.derivative()).scale(&bil);
            acc = &acc + &RatFun::new(num, yi * yj);
        }
    }
    for j in 0..r {
        let yj = t.component(j);
        let tj = p.t_poly(j);
        if yj.is_constant() || tj.is_constant() {
            continue;
        }
        let bil = p.cartan().root_bilinear(j, j);
        let num = (&tj.derivative() * &yj.derivative()).scale(&bil);
        acc = &acc - &RatFun::new(num, tj * yj);
    }
    acc
}

/// Extracts the numbers `μ_a` from the residues of the criticality
/// identity at the marked points and checks the identity itself. For a
/// generic tuple, `identity_ok` holds iff the tuple represents a critical
/// point; in that case `Σ μ_a = 0`.
pub fn mu_extract(t: &Tuple, p: &ProblemData) -> Result<MuExtraction, TupleError> {
    if t.rank() != p.rank() {
        return Err(TupleError::RankMismatch {
            got: t.rank(),
            want: p.rank(),
        });
    }
    if p.gram().is_none() {
        return Err(TupleError::MissingGram);
    }
    if !is_generic(t, p).ok {
        return Err(TupleError::NonGenericTuple);
    }
    let base = criticality_base(t, p);
    let n = p.points().len();
    let mut mu = Vec::with_capacity(n);
    let mut correction = RatFun::zero();
    for a in 0..n {
        let za = &p.points()[a];
        let pole_sum = p.gram_pole_sum(a).expect("gram checked above");
        let res = base
            .residue_at(za)
            .map_err(|_| TupleError::NonGenericTuple)?;
        let mu_a = &pole_sum - &res;
        let linear = Poly::new(vec![-za.clone(), BigRational::from_integer(1.into())]);
        correction = &correction + &RatFun::new(Poly::constant(&mu_a - &pole_sum), linear);
        mu.push(mu_a);
    }
    let identity_ok = (&base + &correction).is_zero();
    let mu_sum = mu.iter().sum();
    Ok(MuExtraction {
        mu,
        mu_sum,
        identity_ok,
    })
}

/// Charge of the tuple's degree vector under the problem's quadratic form.
pub fn tuple_charge(t: &Tuple, p: &ProblemData) -> i64 {
    p.charge_form(&t.degrees().as_i64())
}

/// Human-readable rendering of a genericity violation for diagnostics.
impl fmt::Display for GenericityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.other {
            Some(o) => write!(
                f,
                "condition ({}) at components {} and {}: gcd {}",
                self.condition, self.component, o, self.witness
            ),
            None => write!(
                f,
                "condition ({}) at component {}: gcd {}",
                self.condition, self.component, self.witness
            ),
        }
    }
}

pub fn format_mu(mu: &[BigRational]) -> String {
    let parts: Vec<String> = mu.iter().map(format_rational).collect();
    format!("({})", parts.join(","))
}
