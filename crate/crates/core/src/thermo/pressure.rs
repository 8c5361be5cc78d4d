use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PressureUnit {
    Pa,
    #[serde(rename = "kPa")]
    KPa,
    #[serde(rename = "bar")]
    Bar,
    #[serde(rename = "mmHg")]
    MmHg,
}

impl PressureUnit {
    pub fn pascals(self) -> f64 {
        match self {
            PressureUnit::Pa => 1.0,
            PressureUnit::KPa => 1e3,
            PressureUnit::Bar => 1e5,
            PressureUnit::MmHg => 133.322_387_415,
        }
    }
}

impl fmt::Display for PressureUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PressureUnit::Pa => "Pa",
            PressureUnit::KPa => "kPa",
            PressureUnit::Bar => "bar",
            PressureUnit::MmHg => "mmHg",
        })
    }
}

impl FromStr for PressureUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Pa" => Ok(PressureUnit::Pa),
            "kPa" => Ok(PressureUnit::KPa),
            "bar" => Ok(PressureUnit::Bar),
            "mmHg" => Ok(PressureUnit::MmHg),
            other => Err(Error::Invalid(format!("unknown pressure unit '{other}'"))),
        }
    }
}

/// A pressure value tagged with its unit. Arithmetic between different
/// units is refused; conversion only happens through [`Pressure::to`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pressure {
    pub value: f64,
    pub unit: PressureUnit,
}

impl Pressure {
    pub fn new(value: f64, unit: PressureUnit) -> Self {
        Pressure { value, unit }
    }

    pub fn to(self, unit: PressureUnit) -> Pressure {
        if unit == self.unit {
            return self;
        }
        Pressure::new(self.value * self.unit.pascals() / unit.pascals(), unit)
    }

    pub fn bar(self) -> f64 {
        self.to(PressureUnit::Bar).value
    }
}

impl fmt::Display for Pressure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

pub(crate) fn common_unit(ps: &[Pressure]) -> Result<PressureUnit> {
    let unit = ps
        .first()
        .ok_or_else(|| Error::Internal("no pressures given".into()))?
        .unit;
    if let Some(p) = ps.iter().find(|p| p.unit != unit) {
        return Err(Error::Domain(format!("mixed pressure units: {unit} and {}", p.unit)));
    }
    Ok(unit)
}
