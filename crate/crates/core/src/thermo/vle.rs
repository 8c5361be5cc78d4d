use serde::{Deserialize, Serialize};

use super::pressure::{common_unit, Pressure};
use crate::error::{Error, Result};

/// Extended Raoult's law solved for the activity coefficient:
/// `γ = p y / (pS x)`.
pub fn gamma_from_vle(p: Pressure, y: f64, x: f64, p_sat: Pressure) -> Result<f64> {
    common_unit(&[p, p_sat])?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!(
            "liquid mole fraction {x} must lie in (0, 1]; infinite dilution needs dedicated records"
        )));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("vapor mole fraction {y} outside [0, 1]")));
    }
    if !(p.value > 0.0) || !(p_sat.value > 0.0) {
        return Err(Error::Domain(format!("pressures must be positive (p = {p}, pS = {p_sat})")));
    }
    Ok(p.value * y / (p_sat.value * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubblePoint {
    pub p: Pressure,
    pub y1: f64,
    pub y2: f64,
}

/// Isothermal bubble point for an ideal-gas vapor:
/// `p = x1 γ1 p1S + x2 γ2 p2S`, `y_i = x_i γ_i p_iS / p`.
pub fn bubble_point_isothermal(x1: f64, gamma1: f64, gamma2: f64, p1_sat: Pressure, p2_sat: Pressure) -> Result<BubblePoint> {
    let unit = common_unit(&[p1_sat, p2_sat])?;
    if !(0.0..=1.0).contains(&x1) {
        return Err(Error::Domain(format!("x1 = {x1} outside [0, 1]")));
    }
    if !(gamma1 > 0.0 && gamma2 > 0.0 && p1_sat.value > 0.0 && p2_sat.value > 0.0) {
        return Err(Error::Domain(
            "activity coefficients and vapor pressures must be positive".into(),
        ));
    }
    let x2 = 1.0 - x1;
    let partial1 = x1 * gamma1 * p1_sat.value;
    let partial2 = x2 * gamma2 * p2_sat.value;
    let p = partial1 + partial2;
    if p == 0.0 {
        return Err(Error::Domain("bubble pressure is zero".into()));
    }
    Ok(BubblePoint {
        p: Pressure::new(p, unit),
        y1: partial1 / p,
        y2: partial2 / p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::PressureUnit;

    fn kpa(v: f64) -> Pressure {
        Pressure::new(v, PressureUnit::KPa)
    }

    #[test]
    fn raoult_examples() {
        assert_eq!(gamma_from_vle(kpa(1.0), 0.5, 0.5, kpa(1.0)).unwrap(), 1.0);
        assert!((gamma_from_vle(kpa(100.0), 0.6, 0.4, kpa(120.0)).unwrap() - 1.25).abs() < 1e-15);
        assert!(gamma_from_vle(kpa(1.0), 0.5, 0.0, kpa(1.0)).is_err());
        assert!(gamma_from_vle(kpa(-1.0), 0.5, 0.5, kpa(1.0)).is_err());
        assert!(gamma_from_vle(kpa(1.0), 0.5, 0.5, Pressure::new(1.0, PressureUnit::Bar)).is_err());
    }

    #[test]
    fn bubble_examples() {
        let b = bubble_point_isothermal(0.5, 1.0, 1.0, kpa(100.0), kpa(50.0)).unwrap();
        assert_eq!(b.p.value, 75.0);
        assert!((b.y1 - 2.0 / 3.0).abs() < 1e-15);
        let pure1 = bubble_point_isothermal(1.0, 1.0, 3.0, kpa(100.0), kpa(50.0)).unwrap();
        assert_eq!((pure1.p.value, pure1.y1), (100.0, 1.0));
        let pure2 = bubble_point_isothermal(0.0, 3.0, 1.0, kpa(100.0), kpa(50.0)).unwrap();
        assert_eq!((pure2.p.value, pure2.y1), (50.0, 0.0));
    }

    #[test]
    fn bubble_errors() {
        assert!(bubble_point_isothermal(0.5, 1.0, 1.0, kpa(100.0), Pressure::new(1.0, PressureUnit::Bar)).is_err());
        assert!(bubble_point_isothermal(1.5, 1.0, 1.0, kpa(100.0), kpa(50.0)).is_err());
        assert!(bubble_point_isothermal(0.5, 0.0, 1.0, kpa(100.0), kpa(50.0)).is_err());
    }
}
