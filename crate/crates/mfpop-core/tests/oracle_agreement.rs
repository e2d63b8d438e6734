//! Agreement between the exact engine and the floating-point oracle on
//! shared instances: fertility verdicts, criticality certification, and
//! solver output cross-checks.

mod common;

use common::*;
use mfpop_core::oracle::{
    bethe_residual, numeric_fertility, numeric_mu, numeric_nb_residual, solve_bethe,
    to_numeric_tuple, NumericTuple, SolveOptions,
};
use mfpop_core::tuplegen::{fertility, is_generic, mu_extract, Tuple};
use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn hermite_residual_agrees_with_numeric_residues() {
    // The exact fertility verdict (vanishing Hermite residual) and the
    // numeric one (vanishing residues at floating roots) coincide on
    // random rational instances.
    let mut rng = ChaCha8Rng::seed_from_u64(60601);
    let mut checked = 0;
    let mut fertile_count = 0;
    while checked < 80 {
        let p = random_problem(&mut rng);
        let t = random_tuple(&mut rng, p.rank(), 3);
        if !is_generic(&t, &p).ok {
            continue;
        }
        let j = rng.random_range(0..p.rank());
        let exact = match fertility(&t, &p, j) {
            Ok(verdict) => verdict.is_fertile(),
            Err(_) => continue,
        };
        let numeric = match numeric_fertility(&NumericTuple::from_exact(&t), &p, j, 1e-9) {
            Ok(v) => v,
            Err(_) => continue,
        };
        assert_eq!(exact, numeric, "tuple {t}, direction {j}");
        if exact {
            fertile_count += 1;
        }
        checked += 1;
    }
    assert!(fertile_count >= 3, "need some fertile instances");
}

#[test]
fn solver_points_satisfy_the_identity_with_numeric_mu() {
    // Converted solver output passes the numeric criticality identity
    // with mu extracted by contour residues; random non-critical tuples
    // fail it by a large margin.
    let p = a2_pair_problem();
    let opts = SolveOptions {
        starts: 120,
        seed: 8,
        tol: 1e-12,
        ..SolveOptions::default()
    };
    let (points, _) = solve_bethe(&p, &[1, 1], &opts);
    assert_eq!(points.len(), 2);
    for pt in &points {
        let t = to_numeric_tuple(pt);
        let mu = numeric_mu(&t, &p).unwrap();
        let residual = numeric_nb_residual(&t, &p, &mu).unwrap();
        assert!(
            residual < 1e-8,
            "critical point must certify, got {residual}"
        );
        assert!((mu[0] + mu[1]).norm() < 1e-8);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut rejected = 0;
    while rejected < 10 {
        let t = random_tuple(&mut rng, 2, 2);
        if !is_generic(&t, &p).ok || t.degrees().total() == 0 {
            continue;
        }
        if let Ok(out) = mu_extract(&t, &p) {
            if out.identity_ok {
                continue;
            }
        }
        let numeric = NumericTuple::from_exact(&t);
        let mu = match numeric_mu(&numeric, &p) {
            Ok(mu) => mu,
            Err(_) => continue,
        };
        let residual = numeric_nb_residual(&numeric, &p, &mu).unwrap();
        assert!(residual > 1e-3, "non-critical tuple certified: {t}");
        rejected += 1;
    }
}

#[test]
fn exact_members_solve_the_numeric_system() {
    // Roots of exactly generated tuples are numeric Bethe solutions.
    let p = sl2_origin_problem(1);
    let start = Tuple::trivial(1);
    let family = fertility(&start, &p, 0).unwrap().family().unwrap();
    for c in c_list(&[1, -1, 2]) {
        let member = mfpop_core::tuplegen::generate(&family, &c).unwrap();
        // x^2 + 2c has roots ±sqrt(-2c).
        let k = member.degrees().0.clone();
        assert_eq!(k, vec![2]);
        let coeff = member.component(0).coeff(0);
        let val = mfpop_core::rat::rational_to_f64(&coeff);
        let roots = if val <= 0.0 {
            vec![
                Complex64::new((-val).sqrt(), 0.0),
                Complex64::new(-(-val).sqrt(), 0.0),
            ]
        } else {
            vec![
                Complex64::new(0.0, val.sqrt()),
                Complex64::new(0.0, -val.sqrt()),
            ]
        };
        let residual = bethe_residual(&p, &[roots]);
        assert!(residual < 1e-10, "residual {residual} at c = {c}");
    }
}

#[test]
fn every_returned_point_passes_an_independent_recheck() {
    let p = a2_origin_problem();
    let opts = SolveOptions {
        starts: 100,
        seed: 31,
        tol: 1e-10,
        ..SolveOptions::default()
    };
    for k in [vec![2usize, 0], vec![0, 2], vec![2, 4]] {
        let (points, _) = solve_bethe(&p, &k, &opts);
        for pt in &points {
            assert!(pt.residual < 1e-10);
            assert!(bethe_residual(&p, &pt.coords) < 1e-10);
            for (j, group) in pt.coords.iter().enumerate() {
                assert_eq!(group.len(), k[j]);
                // canonical in-group order
                for w in group.windows(2) {
                    assert!(w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
                }
            }
        }
    }
}
