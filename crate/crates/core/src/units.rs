//! Unit conventions.
//!
//! Internally time is in microseconds and every frequency is an angular
//! frequency in rad/us. Rabi frequencies and detunings are quoted as `Ω/2π` in
//! MHz, so they pick up a factor of 2π on the way in. Decay rates are quoted as
//! plain rates (`γ = 1 MHz` means one decay per microsecond) and are not
//! rescaled.

use std::f64::consts::TAU;

/// `Ω/2π` in MHz to `Ω` in rad/us.
pub fn mhz(f: f64) -> f64 {
    TAU * f
}

/// `Ω/2π` in GHz to `Ω` in rad/us.
pub fn ghz(f: f64) -> f64 {
    TAU * 1e3 * f
}

/// `Ω` in rad/us to `Ω/2π` in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// Decay rate quoted in MHz to a rate in 1/us.
pub fn rate_mhz(g: f64) -> f64 {
    g
}

/// Decay rate quoted in kHz to a rate in 1/us.
pub fn rate_khz(g: f64) -> f64 {
    g * 1e-3
}

/// Van der Waals shift `C6 / d^6` in rad/us for `C6` in GHz·µm⁶ and `d` in µm.
pub fn van_der_waals(c6_ghz_um6: f64, d_um: f64) -> f64 {
    ghz(c6_ghz_um6 / d_um.powi(6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert!((to_mhz(mhz(0.4167)) - 0.4167).abs() < 1e-15);
        assert!((rate_khz(4.0) - 0.004).abs() < 1e-18);
    }

    #[test]
    fn vdw_at_mean_spacing() {
        // 139 GHz µm^6 at 3.5 µm
        let v = to_mhz(van_der_waals(139.0, 3.5));
        assert!((v - 75.61).abs() < 0.01, "{v}");
    }
}
