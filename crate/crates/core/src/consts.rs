//! Physical constants in SI units.

use core::f64::consts::PI;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854e-12;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0 * PI * 1e-7;
/// Speed of light, m/s.
pub const C0: f64 = 299_792_458.0;
/// Copper resistivity, ohm m.
pub const RHO_CU: f64 = 1.68e-8;
/// Relative permittivity of silicon.
pub const EPS_SI: f64 = 11.9;
/// Relative permittivity of thermal oxide.
pub const EPS_SIO2: f64 = 3.9;

pub const UM: f64 = 1e-6;

/// Ohm cm to S/m.
pub fn conductivity_from_ohm_cm(rho: f64) -> f64 {
    1.0 / (rho * 1e-2)
}
