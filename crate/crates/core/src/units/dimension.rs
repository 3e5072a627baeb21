use std::fmt;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// SI base dimensions in exponent-vector order.
pub const BASE_SYMBOLS: [&str; 7] = ["m", "kg", "s", "A", "K", "mol", "cd"];

/// Exponent vector over (m, kg, s, A, K, mol, cd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Dimension(pub [i32; 7]);

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension([0; 7]);
    pub const LENGTH: Dimension = Dimension([1, 0, 0, 0, 0, 0, 0]);
    pub const MASS: Dimension = Dimension([0, 1, 0, 0, 0, 0, 0]);
    pub const TIME: Dimension = Dimension([0, 0, 1, 0, 0, 0, 0]);
    pub const CURRENT: Dimension = Dimension([0, 0, 0, 1, 0, 0, 0]);
    pub const TEMPERATURE: Dimension = Dimension([0, 0, 0, 0, 1, 0, 0]);
    pub const AMOUNT: Dimension = Dimension([0, 0, 0, 0, 0, 1, 0]);
    pub const LUMINOUS_INTENSITY: Dimension = Dimension([0, 0, 0, 0, 0, 0, 1]);

    pub fn base(index: usize) -> Dimension {
        let mut e = [0; 7];
        e[index] = 1;
        Dimension(e)
    }

    pub fn is_dimensionless(&self) -> bool {
        self.0 == [0; 7]
    }

    pub fn pow(self, n: i32) -> Dimension {
        Dimension(self.0.map(|e| e * n))
    }

    pub fn recip(self) -> Dimension {
        self.pow(-1)
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(rhs.0) {
            *a += b;
        }
        Dimension(e)
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Dimension) -> Dimension {
        self * rhs.recip()
    }
}

pub fn dim_mul(a: Dimension, b: Dimension) -> Dimension {
    a * b
}

pub fn dim_div(a: Dimension, b: Dimension) -> Dimension {
    a / b
}

pub fn dim_pow(a: Dimension, n: i32) -> Dimension {
    a.pow(n)
}

/// Renders nonzero exponents as `m^1 kg^1 s^-2`; the zero vector renders as `1`.
impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return f.write_str("1");
        }
        let mut first = true;
        for (sym, e) in BASE_SYMBOLS.iter().zip(self.0) {
            if e != 0 {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{sym}^{e}")?;
                first = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims() -> impl Strategy<Value = Dimension> {
        proptest::array::uniform7(-8i32..=8).prop_map(Dimension)
    }

    #[test]
    fn display() {
        assert_eq!(Dimension([1, 1, -2, 0, 0, 0, 0]).to_string(), "m^1 kg^1 s^-2");
        assert_eq!(Dimension::DIMENSIONLESS.to_string(), "1");
    }

    #[test]
    fn cube() {
        assert_eq!(dim_pow(Dimension::LENGTH, 3), Dimension([3, 0, 0, 0, 0, 0, 0]));
    }

    proptest! {
        #[test]
        fn identity_and_inverse(a in dims()) {
            prop_assert_eq!(a * Dimension::DIMENSIONLESS, a);
            prop_assert_eq!(a / a, Dimension::DIMENSIONLESS);
        }

        #[test]
        fn commutative_associative(a in dims(), b in dims(), c in dims()) {
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a * b) * c, a * (b * c));
        }
    }
}
