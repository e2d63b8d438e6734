#![allow(dead_code)] // shared by multiple test binaries, each using a subset

//! Shared builders for the integration tests: a catalog of finite and
//! affine Cartan data, seeded random problems, and random tuples with
//! dyadic rational roots (exactly representable in doubles, so exact and
//! numeric routes see the same instance).

use mfpop_core::kacmoody::{CartanData, WeightPairings};
use mfpop_core::polyring::Poly;
use mfpop_core::rat::{big_rational_from_i64, ratio_i64};
use mfpop_core::tuplegen::{ProblemData, Tuple};
use num_rational::BigRational;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

pub fn catalog() -> Vec<CartanData> {
    vec![
        CartanData::validate(vec![vec![2]], vec![1]).unwrap(),
        CartanData::validate(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).unwrap(),
        CartanData::validate(vec![vec![2, -2], vec![-1, 2]], vec![1, 2]).unwrap(),
        CartanData::validate(vec![vec![2, -3], vec![-1, 2]], vec![1, 3]).unwrap(),
        CartanData::validate(
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            vec![1, 1, 1],
        )
        .unwrap(),
    ]
}

pub fn affine_catalog() -> Vec<CartanData> {
    vec![
        CartanData::validate(vec![vec![2, -2], vec![-2, 2]], vec![1, 1]).unwrap(),
        CartanData::validate(vec![vec![2, -4], vec![-1, 2]], vec![1, 4]).unwrap(),
        CartanData::validate(
            vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]],
            vec![1, 1, 1],
        )
        .unwrap(),
    ]
}

pub fn a2_pair_problem() -> ProblemData {
    let cartan = CartanData::validate(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).unwrap();
    ProblemData::build(
        cartan,
        vec![big_rational_from_i64(1), big_rational_from_i64(-1)],
        vec![WeightPairings(vec![1, 1]), WeightPairings(vec![1, 1])],
        None,
    )
    .unwrap()
}

pub fn sl2_origin_problem(weight: i64) -> ProblemData {
    let cartan = CartanData::validate(vec![vec![2]], vec![1]).unwrap();
    ProblemData::build(
        cartan,
        vec![big_rational_from_i64(0)],
        vec![WeightPairings(vec![weight])],
        None,
    )
    .unwrap()
}

pub fn a2_origin_problem() -> ProblemData {
    let cartan = CartanData::validate(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).unwrap();
    ProblemData::build(
        cartan,
        vec![big_rational_from_i64(0)],
        vec![WeightPairings(vec![1, 1])],
        None,
    )
    .unwrap()
}

/// Distinct dyadic rationals, exactly representable in f64.
pub fn random_dyadics(rng: &mut ChaCha8Rng, count: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    while out.len() < count {
        let num = rng.random_range(-8i64..=8);
        let den = 1i64 << rng.random_range(0u32..3);
        let v = ratio_i64(num, den);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Random problem over one of the catalog matrices: 1–2 distinct marked
/// points with small dominant weights.
pub fn random_problem(rng: &mut ChaCha8Rng) -> ProblemData {
    let matrices = catalog();
    let cartan = matrices[rng.random_range(0..matrices.len())].clone();
    let n = rng.random_range(1..=2);
    let z = random_dyadics(rng, n);
    let weights = (0..n)
        .map(|_| {
            WeightPairings(
                (0..cartan.rank())
                    .map(|_| rng.random_range(0i64..=2))
                    .collect(),
            )
        })
        .collect();
    ProblemData::build(cartan, z, weights, None).unwrap()
}

/// Random tuple with dyadic roots, componentwise degrees below `max_deg`.
pub fn random_tuple(rng: &mut ChaCha8Rng, rank: usize, max_deg: usize) -> Tuple {
    let components: Vec<Poly> = (0..rank)
        .map(|_| {
            let deg = rng.random_range(0..=max_deg);
            Poly::from_roots(&random_dyadics(rng, deg))
        })
        .collect();
    Tuple::new(components).unwrap()
}

pub fn c_list(values: &[i64]) -> Vec<BigRational> {
    values.iter().map(|&v| big_rational_from_i64(v)).collect()
}
