//! Polynomial gcd through the fraction-free subresultant remainder
//! sequence. Rational inputs are cleared to primitive integer polynomials
//! first; the sequence then divides each pseudo-remainder by the known
//! factor `g·h^δ`, which keeps coefficient growth polynomial instead of
//! exponential.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;

/// Monic gcd of rational polynomials. `gcd(f, 0) = monic(f)`,
/// `gcd(0, 0) = 0`.
pub fn rational_gcd(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() {
        return if g.is_zero() { Poly::zero() } else { g.monic() };
    }
    if g.is_zero() {
        return f.monic();
    }
    let a = primitive_integer(f);
    let b = primitive_integer(g);
    let d = subresultant_gcd(a, b);
    from_integer(&d).monic()
}

fn primitive_integer(p: &Poly) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if !content.is_zero() && !content.is_one() {
        for c in &mut ints {
            *c /= &content;
        }
    }
    ints
}

fn from_integer(coeffs: &[BigInt]) -> Poly {
    Poly::new(
        coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    )
}

fn deg(p: &[BigInt]) -> usize {
    debug_assert!(!p.is_empty());
    p.len() - 1
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().map(Zero::is_zero).unwrap_or(false) {
        p.pop();
    }
    p
}

/// Pseudo-remainder of `a` by `b`: the remainder of `lc(b)^(δ+1)·a` by `b`
/// over the integers. Every elimination step multiplies the whole remainder
/// by `lc(b)` exactly once, so the scaling stays `lc(b)^(δ+1)` even when the
/// degree drops by more than one mid-division.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = deg(b);
    let da = deg(a);
    debug_assert!(da >= db);
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    for shift in (0..=da - db).rev() {
        let top = std::mem::replace(&mut rem[shift + db], BigInt::zero());
        for c in rem.iter_mut().take(shift + db) {
            *c *= &lead;
        }
        if !top.is_zero() {
            for i in 0..db {
                rem[shift + i] -= &top * &b[i];
            }
        }
    }
    trim(rem)
}

fn int_content(p: &[BigInt]) -> BigInt {
    let mut c = BigInt::zero();
    for v in p {
        c = c.gcd(v);
    }
    c
}

fn primitive_part(p: Vec<BigInt>) -> Vec<BigInt> {
    let c = int_content(&p);
    if c.is_zero() || c.is_one() {
        return p;
    }
    p.into_iter().map(|v| v / &c).collect()
}

fn subresultant_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let (mut f, mut g) = if deg(&a) >= deg(&b) { (a, b) } else { (b, a) };
    let mut h = BigInt::one();
    let mut gamma = BigInt::one();
    loop {
        let delta = deg(&f) - deg(&g);
        let rem = pseudo_rem(&f, &g);
        if rem.is_empty() {
            return primitive_part(g);
        }
        if deg(&rem) == 0 {
            return vec![BigInt::one()];
        }
        // divisor g*h^delta is exact by the subresultant theory
        let divisor = &gamma * h.pow(delta as u32);
        let next: Vec<BigInt> = rem.iter().map(|c| c / &divisor).collect();
        gamma = g[deg(&g)].clone();
        h = if delta == 0 {
            h
        } else {
            let num = gamma.pow(delta as u32);
            let den = h.pow((delta - 1) as u32);
            num / den
        };
        f = g;
        g = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio_i64;
    use proptest::prelude::*;

    #[test]
    fn gcd_of_products() {
        let h = Poly::from_i64(&[-3, 1]); // x-3
        let f = &Poly::from_i64(&[1, 5, 2]) * &h;
        let g = &Poly::from_i64(&[7, 0, 0, 1]) * &h;
        assert_eq!(f.gcd(&g), h);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let f = Poly::from_i64(&[-1, 1]);
        let g = Poly::from_i64(&[1, 1]);
        assert!(f.gcd(&g).is_one());
    }

    #[test]
    fn gcd_with_zero() {
        let f = Poly::from_i64(&[0, 2]);
        assert_eq!(f.gcd(&Poly::zero()), Poly::from_i64(&[0, 1]));
        assert!(Poly::zero().gcd(&Poly::zero()).is_zero());
    }

    #[test]
    fn gcd_handles_rational_coefficients() {
        // (x - 1/2)(x+2) vs (x - 1/2)(x-5)
        let shared = Poly::new(vec![ratio_i64(-1, 2), ratio_i64(1, 1)]);
        let f = &shared * &Poly::from_i64(&[2, 1]);
        let g = &shared * &Poly::from_i64(&[-5, 1]);
        assert_eq!(f.gcd(&g), shared);
    }

    fn arb_int_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|cs| Poly::from_i64(&cs))
    }

    proptest! {
        #[test]
        fn common_factor_divides_gcd(
            f in arb_int_poly(4),
            g in arb_int_poly(4),
            h in arb_int_poly(3),
        ) {
            prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
            let d = (&f * &h).gcd(&(&g * &h));
            let (_, r) = d.div_rem(&h.monic());
            prop_assert!(r.is_zero());
        }

        #[test]
        fn gcd_divides_both(f in arb_int_poly(5), g in arb_int_poly(5)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let d = f.gcd(&g);
            prop_assert!(f.div_rem(&d).1.is_zero());
            prop_assert!(g.div_rem(&d).1.is_zero());
        }
    }
}
