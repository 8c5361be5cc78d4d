//! First-order dual numbers carrying the derivative with respect to the
//! mole fraction of component 1.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A value together with its derivative with respect to `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub dx1: f64,
}

impl Dual {
    pub const ZERO: Dual = Dual { value: 0.0, dx1: 0.0 };
    pub const ONE: Dual = Dual { value: 1.0, dx1: 0.0 };

    pub const fn new(value: f64, dx1: f64) -> Self {
        Dual { value, dx1 }
    }

    /// A quantity that does not depend on composition.
    pub const fn constant(value: f64) -> Self {
        Dual { value, dx1: 0.0 }
    }

    /// The seeded composition input `x1`.
    pub const fn seed(x1: f64) -> Self {
        Dual { value: x1, dx1: 1.0 }
    }

    /// The complement `x2 = 1 - x1` given its already rounded value.
    pub const fn complement(x2: f64) -> Self {
        Dual { value: x2, dx1: -1.0 }
    }

    pub fn checked_div(self, rhs: Dual) -> Result<Dual> {
        if rhs.value == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    pub fn silu(self) -> Dual {
        let s = logistic(self.value);
        Dual {
            value: self.value * s,
            dx1: silu_prime_with(self.value, s) * self.dx1,
        }
    }

    pub fn logistic(self) -> Dual {
        let s = logistic(self.value);
        Dual {
            value: s,
            dx1: s * (1.0 - s) * self.dx1,
        }
    }

    pub fn sqrt(self) -> Result<Dual> {
        if self.value < 0.0 {
            return Err(Error::Domain(format!("sqrt of negative value {}", self.value)));
        }
        let r = self.value.sqrt();
        if r == 0.0 {
            if self.dx1 == 0.0 {
                return Ok(Dual::ZERO);
            }
            return Err(Error::Domain("sqrt derivative undefined at zero".into()));
        }
        Ok(Dual {
            value: r,
            dx1: self.dx1 / (2.0 * r),
        })
    }

    pub fn is_finite(self) -> bool {
        self.value.is_finite() && self.dx1.is_finite()
    }
}

/// Logistic function, evaluated branch-wise so neither side overflows.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn silu(z: f64) -> f64 {
    z * logistic(z)
}

/// `silu'(z) = s(1 + z(1 - s))` where `s` is the logistic of `z`.
pub(crate) fn silu_prime_with(z: f64, s: f64) -> f64 {
    s * (1.0 + z * (1.0 - s))
}

pub fn silu_prime(z: f64) -> f64 {
    silu_prime_with(z, logistic(z))
}

/// `silu''(z) = s(1 - s)(2 + z(1 - 2s))`.
pub fn silu_second(z: f64) -> f64 {
    let s = logistic(z);
    s * (1.0 - s) * (2.0 + z * (1.0 - 2.0 * s))
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            dx1: self.dx1 + rhs.dx1,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            dx1: self.dx1 - rhs.dx1,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            dx1: self.value * rhs.dx1 + self.dx1 * rhs.value,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let q = self.value / rhs.value;
        Dual {
            value: q,
            dx1: (self.dx1 - q * rhs.dx1) / rhs.value,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            dx1: -self.dx1,
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        Dual {
            value: self.value * rhs,
            dx1: self.dx1 * rhs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule_with_constant() {
        let r = Dual::new(2.0, 1.0) * Dual::new(3.0, 0.0);
        assert_eq!(r, Dual::new(6.0, 3.0));
    }

    #[test]
    fn product_of_fraction_and_complement() {
        // d/dx [x(1-x)] = 1 - 2x
        let r = Dual::seed(0.4) * Dual::complement(0.6);
        assert_relative_eq!(r.value, 0.24, epsilon = 1e-15);
        assert_relative_eq!(r.dx1, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn linearity() {
        assert_eq!(Dual::new(5.0, 2.0) + Dual::new(1.0, -2.0), Dual::new(6.0, 0.0));
        assert_eq!(Dual::new(5.0, 2.0) - Dual::new(1.0, -2.0), Dual::new(4.0, 4.0));
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        assert!(matches!(
            Dual::ONE.checked_div(Dual::ZERO),
            Err(Error::Domain(_))
        ));
        let q = Dual::new(1.0, 1.0).checked_div(Dual::new(2.0, 0.0)).unwrap();
        assert_eq!(q, Dual::new(0.5, 0.5));
    }

    #[test]
    fn silu_values() {
        assert_eq!(Dual::new(0.0, 1.0).silu(), Dual::new(0.0, 0.5));

        let sat = Dual::new(20.0, 0.0).silu();
        assert_relative_eq!(sat.value, 20.0, max_relative = 1e-8);
        assert_eq!(sat.dx1, 0.0);

        // sigma(1) = 1/(1+e^-1); silu'(1) = sigma(1)(1 + (1 - sigma(1)))
        let s1 = 1.0 / (1.0 + (-1.0f64).exp());
        let r = Dual::new(1.0, 1.0).silu();
        assert_relative_eq!(r.value, 0.731059, epsilon = 1e-6);
        assert_relative_eq!(r.value, s1, epsilon = 1e-15);
        assert_relative_eq!(r.dx1, 0.927671, epsilon = 1e-6);
        assert_relative_eq!(r.dx1, s1 * (2.0 - s1), epsilon = 1e-15);
    }

    #[test]
    fn logistic_is_stable_for_large_arguments() {
        assert_eq!(logistic(800.0), 1.0);
        assert_eq!(logistic(-800.0), 0.0);
        assert!(silu(-800.0).is_finite());
        assert!(silu_prime(-800.0).is_finite());
        assert!(silu_second(800.0).is_finite());
    }

    #[test]
    fn silu_second_matches_finite_difference() {
        for &z in &[-3.0, -0.7, 0.0, 0.4, 2.5] {
            let h = 1e-5;
            let fd = (silu_prime(z + h) - silu_prime(z - h)) / (2.0 * h);
            assert_relative_eq!(silu_second(z), fd, epsilon = 1e-8);
        }
    }
}
