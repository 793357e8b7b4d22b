//! Physical constants (CODATA 2018), SI units.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817_65e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C (exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Bohr radius, m.
pub const A0: f64 = 5.291_772_109_03e-11;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
