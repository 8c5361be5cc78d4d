//! Classical thermodynamics: vapor pressures, extended Raoult's law,
//! bubble points and analytic excess Gibbs energy models.

mod antoine;
mod pressure;
mod reference;
pub mod synth;
mod vle;

pub use antoine::{antoine_pressure, antoine_to_csv, load_antoine, parse_antoine, AntoineParams, ANTOINE_HEADER};
pub use pressure::{Pressure, PressureUnit};
pub use reference::{reference_gammas, ReferenceGeModel};
pub use synth::{synthesize_dataset, synthetic_components, OracleKind, SynthSpec, SyntheticOracle};
pub use vle::{bubble_point_isothermal, gamma_from_vle, BubblePoint};
