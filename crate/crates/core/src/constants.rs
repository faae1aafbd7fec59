//! CODATA 2018 exact and recommended values (SI).

use crate::num::Real;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;
/// Elementary charge, C (exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Angular frequency of a photon of energy 1 eV, rad/s.
pub const EV_TO_RAD_S: f64 = E_CHARGE / HBAR;

#[inline]
pub fn hbar<T: Real>() -> T {
    T::lit(HBAR)
}

#[inline]
pub fn k_b<T: Real>() -> T {
    T::lit(K_B)
}

#[inline]
pub fn c<T: Real>() -> T {
    T::lit(C)
}

/// `hbar * c` in J m. Kept as one literal so `f32` never forms `hbar` alone in a product chain.
#[inline]
pub fn hbar_c<T: Real>() -> T {
    T::lit(HBAR * C)
}

/// Converts a photon energy in eV to angular frequency in rad/s.
#[inline]
pub fn ev_to_rad_s<T: Real>(ev: T) -> T {
    ev * T::lit(EV_TO_RAD_S)
}

/// Converts an angular frequency in rad/s to photon energy in eV.
#[inline]
pub fn rad_s_to_ev<T: Real>(omega: T) -> T {
    omega / T::lit(EV_TO_RAD_S)
}
