//! One Hermite-reduction step for integrands of the shape `P/y²` with `y`
//! squarefree, the only denominator shape produced by the generation
//! integral. The antiderivative splits as
//!
//! ```text
//! ∫ P/y² dx = poly_part + rational_part + ∫ residual/y dx
//! ```
//!
//! with `deg residual < deg y`, and the last integral is a rational
//! function iff `residual = 0`. The double pole at each root `u` of `y` is
//! removed by solving `B ≡ P·(y')⁻¹ (mod y)` with the Bézout inverse of
//! `y'`, which exists exactly because `y` is squarefree.

use super::poly::Poly;
use super::ratfun::RatFun;
use super::PolyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteParts {
    /// Polynomial piece of the antiderivative.
    pub poly_part: Poly,
    /// Proper rational piece `-B/y` of the antiderivative.
    pub rational_part: RatFun,
    /// Numerator of the unintegrated logarithmic remainder `residual/y`;
    /// zero iff `∫ P/y²` is a rational function.
    pub residual: Poly,
}

impl HermiteParts {
    /// The full antiderivative `poly_part + rational_part`, valid as the
    /// complete integral only when `residual` is zero.
    pub fn antiderivative(&self) -> RatFun {
        &RatFun::from_poly(self.poly_part.clone()) + &self.rational_part
    }
}

/// Integrates `P/y²` by one Hermite step. `y` must be nonzero and
/// squarefree; a constant `y` degenerates to plain polynomial integration.
pub fn hermite_integrate_sq(p: &Poly, y: &Poly) -> Result<HermiteParts, PolyError> {
    if y.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if y.is_constant() {
        let c = y.leading().unwrap();
        let scale = (c * c).recip();
        return Ok(HermiteParts {
            poly_part: p.antiderivative().scale(&scale),
            rational_part: RatFun::zero(),
            residual: Poly::zero(),
        });
    }
    let y_prime = y.derivative();
    let (g, _, t) = y.extended_gcd(&y_prime);
    if g.degree() != Some(0) {
        return Err(PolyError::NotSquarefree);
    }

    let y_sq = y * y;
    let (quot, rem) = p.div_rem(&y_sq);

    // B kills the double pole: B = rem * (y')^{-1} mod y.
    let b = (&rem * &t).div_rem(y).1;
    // What is left over y: C = (rem + B'y - By') / y, exactly divisible.
    let c_num = &(&rem + &(&b.derivative() * y)) - &(&b * &y_prime);
    let c = c_num.exact_div(y);
    let (c_quot, residual) = c.div_rem(y);

    Ok(HermiteParts {
        poly_part: (&quot + &c_quot).antiderivative(),
        rational_part: RatFun::new(-&b, y.clone()),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::squarefree;
    use crate::rat::ratio_i64;
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_i64(coeffs)
    }

    #[test]
    fn constant_denominator_is_plain_integration() {
        let parts = hermite_integrate_sq(&p(&[0, 0, 1]), &Poly::one()).unwrap();
        assert_eq!(
            parts.poly_part,
            Poly::new(vec![
                ratio_i64(0, 1),
                ratio_i64(0, 1),
                ratio_i64(0, 1),
                ratio_i64(1, 3)
            ])
        );
        assert!(parts.rational_part.is_zero());
        assert!(parts.residual.is_zero());
    }

    #[test]
    fn inverse_square_integrates_cleanly() {
        // ∫ 1/x² = -1/x
        let parts = hermite_integrate_sq(&Poly::one(), &Poly::x()).unwrap();
        assert!(parts.poly_part.is_zero());
        assert_eq!(parts.rational_part, RatFun::new(p(&[-1]), Poly::x()));
        assert!(parts.residual.is_zero());
    }

    #[test]
    fn logarithmic_obstruction_is_reported() {
        // ∫ x/x² = ln x: residual 1
        let parts = hermite_integrate_sq(&Poly::x(), &Poly::x()).unwrap();
        assert_eq!(parts.residual, Poly::one());
    }

    #[test]
    fn rejects_repeated_roots() {
        let err = hermite_integrate_sq(&Poly::one(), &p(&[1, 2, 1])).unwrap_err();
        assert_eq!(err, PolyError::NotSquarefree);
        let err = hermite_integrate_sq(&Poly::one(), &Poly::zero()).unwrap_err();
        assert_eq!(err, PolyError::ZeroPolynomial);
    }

    fn arb_squarefree(max_roots: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::btree_set((-8i64..=8, 1i64..=3), 0..=max_roots).prop_map(|roots| {
            Poly::from_roots(
                &roots
                    .into_iter()
                    .map(|(n, d)| ratio_i64(n, d))
                    .collect::<Vec<_>>(),
            )
        })
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-9i64..=9, 0..=max_deg + 1).prop_map(|cs| Poly::from_i64(&cs))
    }

    proptest! {
        #[test]
        fn derivative_round_trip(num in arb_poly(12), den in arb_squarefree(6)) {
            prop_assume!(squarefree(&den).unwrap_or(false));
            let parts = hermite_integrate_sq(&num, &den).unwrap();
            // d/dx(poly + rational) + residual/y == P/y² exactly
            let lhs = &(&parts.antiderivative().derivative()
                + &RatFun::new(parts.residual.clone(), den.clone()))
                - &RatFun::new(num.clone(), &den * &den);
            prop_assert!(lhs.is_zero());
            if let Some(d) = parts.residual.degree() {
                prop_assert!(d < den.degree().unwrap());
            }
        }
    }
}
