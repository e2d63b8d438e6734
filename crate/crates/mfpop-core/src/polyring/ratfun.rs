//! Reduced rational functions: coprime numerator and denominator, monic
//! denominator. Every arithmetic operation re-normalizes, so the invariant
//! holds on all values that escape this module.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::Poly;
use super::PolyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Builds `num/den` in reduced form. Panics on a zero denominator;
    /// rational functions with zero denominator never arise in this crate.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFun {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lead_inv = den.leading().unwrap().recip();
        den = den.scale(&lead_inv);
        num = num.scale(&lead_inv);
        RatFun { num, den }
    }

    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn scale(&self, s: &BigRational) -> RatFun {
        RatFun::new(self.num.scale(s), self.den.clone())
    }

    /// Quotient-rule derivative, reduced.
    pub fn derivative(&self) -> RatFun {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun::new(num, &self.den * &self.den)
    }

    /// Residue at a pole of order at most one; zero when `z` is not a pole.
    pub fn residue_at(&self, z: &BigRational) -> Result<BigRational, PolyError> {
        let den_val = self.den.eval(z);
        if !den_val.is_zero() {
            return Ok(BigRational::zero());
        }
        let linear = Poly::new(vec![-z.clone(), BigRational::from_integer(1.into())]);
        let (cofactor, rem) = self.den.div_rem(&linear);
        debug_assert!(rem.is_zero());
        let cofactor_val = cofactor.eval(z);
        if cofactor_val.is_zero() {
            return Err(PolyError::HigherOrderPole);
        }
        Ok(self.num.eval(z) / cofactor_val)
    }

    /// Truncated expansion in descending powers of `x`: returns the
    /// polynomial part and the coefficients of `x^0, x^-1, …, x^-order` of
    /// the proper remainder (so the `x^0` entry is always zero).
    pub fn laurent_at_infinity(&self, order: usize) -> (Poly, Vec<BigRational>) {
        let (poly_part, rem) = self.num.div_rem(&self.den);
        if rem.is_zero() {
            return (poly_part, vec![BigRational::zero(); order + 1]);
        }
        // rem/den = Q/x^order + O(x^(-order-1)) where Q = quot(rem·x^order, den)
        let mut shifted = vec![BigRational::zero(); order];
        shifted.extend_from_slice(rem.coeffs());
        let (q, _) = Poly::new(shifted).div_rem(&self.den);
        let coeffs = (0..=order).map(|s| q.coeff(order - s)).collect();
        (poly_part, coeffs)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFun::new(num, &self.den * &rhs.den)
    }
}

impl Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        RatFun::new(num, &self.den * &rhs.den)
    }
}

impl Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        RatFun::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
