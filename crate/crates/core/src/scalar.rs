//! Scalar abstraction shared by the linear algebra kernel.
//!
//! Everything downstream of [`crate::exactlin`] is written against [`Field`].
//! The geometry modules instantiate it with [`Rational`]; `Ratio<i64>` also
//! satisfies the bound and is handy for quick experiments. Floating-point
//! types technically satisfy the trait too, but rank and proportionality
//! decisions are exact zero tests, so only exact fields give meaningful answers.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

/// A commutative field with exact equality.
pub trait Field: Clone + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync + 'static {}

impl<T> Field for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> + Send + Sync + 'static {}

/// Arbitrary-precision rationals, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Convenience constructor for small integer rationals.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a reduced rational. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_is_reduced() {
        assert_eq!(format_rational(&ratio(4, -6)), "-2/3");
        assert_eq!(format_rational(&ratio(6, 3)), "2");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational(" -4/6 "), Some(ratio(-2, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
