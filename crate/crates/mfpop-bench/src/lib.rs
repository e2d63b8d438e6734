//! Shared fixtures for the benchmark targets.

use mfpop_core::kacmoody::{CartanData, WeightPairings};
use mfpop_core::rat::big_rational_from_i64 as bri;
use mfpop_core::tuplegen::ProblemData;
use num_rational::BigRational;

/// Rank-2 problem with two marked points and unit weights; the standard
/// small benchmark instance.
pub fn pair_problem() -> ProblemData {
    let cartan = CartanData::validate(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).unwrap();
    ProblemData::build(
        cartan,
        vec![bri(1), bri(-1)],
        vec![WeightPairings(vec![1, 1]), WeightPairings(vec![1, 1])],
        None,
    )
    .unwrap()
}

/// Rank-2 problem with a single marked point; its populations are the
/// deepest fixtures the tests exercise.
pub fn single_point_problem() -> ProblemData {
    let cartan = CartanData::validate(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).unwrap();
    ProblemData::build(cartan, vec![bri(0)], vec![WeightPairings(vec![1, 1])], None).unwrap()
}

pub fn c_samples() -> Vec<BigRational> {
    [0i64, 1, -1, 2, -2].iter().map(|&v| bri(v)).collect()
}
