//! Exact univariate polynomial and rational-function arithmetic over
//! arbitrary-precision rationals: Wronskians, gcd-based structure tests,
//! one-step Hermite reduction for denominators of the form `y²`, residues
//! at simple poles, and truncated Laurent expansion at infinity.

mod gcd;
mod hermite;
mod poly;
mod ratfun;

pub use hermite::{hermite_integrate_sq, HermiteParts};
pub use poly::Poly;
pub use ratfun::RatFun;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("ZeroPolynomial: operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("NotSquarefree: denominator has a repeated root")]
    NotSquarefree,
    #[error("HigherOrderPole: residue defined only at poles of order <= 1")]
    HigherOrderPole,
}

/// Wronskian determinant `W(f, g) = f g' − f' g`.
pub fn wronskian(f: &Poly, g: &Poly) -> Poly {
    &(f * &g.derivative()) - &(&f.derivative() * g)
}

/// True iff `f` has no repeated roots, i.e. `gcd(f, f')` is constant.
pub fn squarefree(f: &Poly) -> Result<bool, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(f.gcd(&f.derivative()).degree() == Some(0))
}

/// True iff `f` and `g` share no root.
pub fn coprime(f: &Poly, g: &Poly) -> Result<bool, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(f.gcd(g).degree() == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio_i64;
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_i64(coeffs)
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian(&p(&[0, 1]), &p(&[1])), p(&[-1]));
        let f = p(&[3, -2, 5]);
        assert!(wronskian(&f, &f).is_zero());
        // W(x^2, x) = -x^2
        assert_eq!(wronskian(&p(&[0, 0, 1]), &p(&[0, 1])), p(&[0, 0, -1]));
    }

    #[test]
    fn squarefree_examples() {
        assert!(squarefree(&p(&[-1, 0, 1])).unwrap());
        assert!(!squarefree(&p(&[1, -2, 1])).unwrap());
        assert!(squarefree(&p(&[1])).unwrap());
        assert_eq!(squarefree(&Poly::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn coprime_examples() {
        assert!(coprime(&p(&[-1, 1]), &p(&[1, 1])).unwrap());
        assert!(!coprime(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap());
        assert!(coprime(&p(&[1]), &p(&[4, 4, 1])).unwrap());
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((-9i64..=9, 1i64..=4), 0..=max_deg + 1)
            .prop_map(|cs| Poly::new(cs.into_iter().map(|(n, d)| ratio_i64(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn wronskian_antisymmetric(f in arb_poly(8), g in arb_poly(8)) {
            prop_assert_eq!(wronskian(&f, &g), -&wronskian(&g, &f));
        }

        #[test]
        fn wronskian_bilinear(
            f in arb_poly(6),
            g in arb_poly(6),
            h in arb_poly(6),
            a in -5i64..=5,
            b in -5i64..=5,
        ) {
            let (a, b) = (ratio_i64(a, 1), ratio_i64(b, 1));
            let lhs = wronskian(&(&f.scale(&a) + &g.scale(&b)), &h);
            let rhs = &wronskian(&f, &h).scale(&a) + &wronskian(&g, &h).scale(&b);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
