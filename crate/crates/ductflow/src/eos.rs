//! Stiffened-gas equation of state for a two-fluid mixture.
//!
//! Each cell carries a mass fraction `phi` of fluid 1. The mixture behaves
//! like a single stiffened gas `p = (gamma(phi) - 1) rho e - gamma(phi) pi(phi)`
//! whose coefficients interpolate the two pure fluids harmonically:
//!
//! ```text
//! 1 / (gamma - 1)          = phi / (gamma1 - 1) + (1 - phi) / (gamma2 - 1)
//! gamma pi / (gamma - 1)   = phi gamma1 pi1 / (gamma1 - 1)
//!                          + (1 - phi) gamma2 pi2 / (gamma2 - 1)
//! ```
//!
//! This interpolation keeps pressure and velocity free of spurious
//! oscillations when a numerical diffusion zone ever mixes the fluids.

use crate::error::{Result, SimError};

/// Mass fractions within this distance of 0 or 1 are snapped to the pure
/// value; anything further outside [0, 1] is a domain error.
pub const PHI_SNAP_TOL: f64 = 1e-12;

/// Pure-fluid stiffened-gas coefficients; fluid 1 is the `phi = 1` fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    pub gamma1: f64,
    pub pi1: f64,
    pub gamma2: f64,
    pub pi2: f64,
}

/// Mixture coefficients at a fixed mass fraction.
#[derive(Debug, Clone, Copy)]
pub struct MixtureParams {
    pub gamma: f64,
    pub pi: f64,
}

impl MixtureParams {
    #[inline]
    pub fn gm1(&self) -> f64 {
        self.gamma - 1.0
    }
}

impl EosParams {
    pub fn new(gamma1: f64, pi1: f64, gamma2: f64, pi2: f64) -> Result<Self> {
        for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(g > 1.0) || !g.is_finite() {
                return Err(SimError::Domain(format!(
                    "{name} = {g} must be finite and exceed 1"
                )));
            }
        }
        for (name, pi) in [("pi1", pi1), ("pi2", pi2)] {
            if !(pi >= 0.0) || !pi.is_finite() {
                return Err(SimError::Domain(format!(
                    "{name} = {pi} must be finite and non-negative"
                )));
            }
        }
        Ok(Self {
            gamma1,
            pi1,
            gamma2,
            pi2,
        })
    }

    /// Snaps `phi` onto [0, 1], rejecting values beyond `PHI_SNAP_TOL` drift.
    pub fn clamp_phi(&self, phi: f64) -> Result<f64> {
        if phi.is_nan() {
            return Err(SimError::Domain("phi is NaN".into()));
        }
        if phi < -PHI_SNAP_TOL || phi > 1.0 + PHI_SNAP_TOL {
            return Err(SimError::Domain(format!(
                "phi = {phi} lies outside [0, 1] by more than {PHI_SNAP_TOL:e}"
            )));
        }
        Ok(phi.clamp(0.0, 1.0))
    }

    /// Mixture coefficients at mass fraction `phi` (recomputed on every call;
    /// the two divisions are cheaper than any cache bookkeeping).
    pub fn mixture(&self, phi: f64) -> Result<MixtureParams> {
        let phi = self.clamp_phi(phi)?;
        let inv_gm1 = phi / (self.gamma1 - 1.0) + (1.0 - phi) / (self.gamma2 - 1.0);
        let gamma = 1.0 + 1.0 / inv_gm1;
        let gamma_pi_over_gm1 = phi * self.gamma1 * self.pi1 / (self.gamma1 - 1.0)
            + (1.0 - phi) * self.gamma2 * self.pi2 / (self.gamma2 - 1.0);
        let pi = gamma_pi_over_gm1 * (gamma - 1.0) / gamma;
        Ok(MixtureParams { gamma, pi })
    }

    /// `p = (gamma - 1) rho e - gamma pi`; errors if the result leaves the
    /// hyperbolic region `p + pi > 0`.
    pub fn pressure(&self, rho: f64, e: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        if !e.is_finite() {
            return Err(SimError::Domain(format!("internal energy e = {e}")));
        }
        let p = m.gm1() * rho * e - m.gamma * m.pi;
        check_hyperbolic(p + m.pi)?;
        Ok(p)
    }

    /// Inverse of [`pressure`](Self::pressure): `e = (p + gamma pi) / ((gamma - 1) rho)`.
    pub fn internal_energy(&self, rho: f64, p: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        check_hyperbolic(p + m.pi)?;
        Ok((p + m.gamma * m.pi) / (m.gm1() * rho))
    }

    /// `c = sqrt(gamma (p + pi) / rho)`.
    pub fn sound_speed(&self, rho: f64, p: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        check_hyperbolic(p + m.pi)?;
        Ok((m.gamma * (p + m.pi) / rho).sqrt())
    }

    /// Standing-wave invariant `s = (p + pi) rho^(-gamma)`.
    pub fn entropy(&self, rho: f64, p: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        check_hyperbolic(p + m.pi)?;
        Ok((p + m.pi) * rho.powf(-m.gamma))
    }

    /// Inverse of [`entropy`](Self::entropy): `p = s rho^gamma - pi`.
    pub fn pressure_from_entropy(&self, rho: f64, s: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        if !(s > 0.0) || !s.is_finite() {
            return Err(SimError::Domain(format!("entropy s = {s} must be positive")));
        }
        Ok(s * rho.powf(m.gamma) - m.pi)
    }

    /// Specific enthalpy `h = e + p / rho = gamma (p + pi) / ((gamma - 1) rho)`,
    /// equal to `c^2 / (gamma - 1)`.
    pub fn enthalpy(&self, rho: f64, p: f64, phi: f64) -> Result<f64> {
        let m = self.mixture(phi)?;
        check_rho(rho)?;
        check_hyperbolic(p + m.pi)?;
        Ok(m.gamma * (p + m.pi) / (m.gm1() * rho))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(SimError::Inadmissible {
            field: "rho",
            value: rho,
        });
    }
    Ok(())
}

fn check_hyperbolic(p_plus_pi: f64) -> Result<()> {
    if !(p_plus_pi > 0.0) || !p_plus_pi.is_finite() {
        return Err(SimError::HyperbolicityLoss { p_plus_pi });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Coefficients used throughout the test suite: fluid 1 is an ideal gas,
    /// fluid 2 a stiffened liquid-like gas.
    fn eos() -> EosParams {
        EosParams::new(1.4, 0.0, 1.6, 2.0).unwrap()
    }

    #[test]
    fn pure_fluid_mixtures_recover_inputs() {
        let eos = eos();
        let m1 = eos.mixture(1.0).unwrap();
        assert_relative_eq!(m1.gamma, 1.4, max_relative = 1e-15);
        assert_relative_eq!(m1.pi, 0.0, epsilon = 1e-15);
        let m2 = eos.mixture(0.0).unwrap();
        assert_relative_eq!(m2.gamma, 1.6, max_relative = 1e-15);
        assert_relative_eq!(m2.pi, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn half_mixture_matches_harmonic_interpolation() {
        // 1/(g-1) = 0.5/0.4 + 0.5/0.6 = 25/12, so g = 1.48;
        // g*pi/(g-1) = 0.5 * 1.6*2/0.6 = 8/3, so pi = (8/3)*0.48/1.48.
        let m = eos().mixture(0.5).unwrap();
        assert_relative_eq!(m.gamma, 1.48, max_relative = 1e-14);
        assert_relative_eq!(m.pi, (8.0 / 3.0) * 0.48 / 1.48, max_relative = 1e-14);
        assert_relative_eq!(m.pi, 0.864_864_864_864_864_9, max_relative = 1e-12);
    }

    #[test]
    fn phi_snapping_and_domain_rejection() {
        let eos = eos();
        assert_eq!(eos.clamp_phi(-1e-13).unwrap(), 0.0);
        assert_eq!(eos.clamp_phi(1.0 + 5e-13).unwrap(), 1.0);
        assert_eq!(eos.clamp_phi(0.25).unwrap(), 0.25);
        assert!(matches!(eos.clamp_phi(-1e-9), Err(SimError::Domain(_))));
        assert!(matches!(eos.clamp_phi(2.0), Err(SimError::Domain(_))));
    }

    #[test]
    fn pressure_and_energy_reference_points() {
        let eos = eos();
        // Ideal-gas side: p = 0.4 * 2 * 1.25 = 1.
        assert_relative_eq!(eos.pressure(2.0, 1.25, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(eos.internal_energy(2.0, 1.0, 1.0).unwrap(), 1.25, max_relative = 1e-14);
        // Stiffened side at the dense reference state.
        let rho = 3.230_672_602;
        let e = (12.0 + 1.6 * 2.0) / (0.6 * rho);
        assert_relative_eq!(eos.internal_energy(rho, 12.0, 0.0).unwrap(), e, max_relative = 1e-14);
        assert_relative_eq!(eos.pressure(rho, e, 0.0).unwrap(), 12.0, max_relative = 1e-12);
    }

    #[test]
    fn sound_speed_reference_points() {
        let eos = eos();
        assert_relative_eq!(
            eos.sound_speed(2.0, 1.0, 1.0).unwrap(),
            0.7_f64.sqrt(),
            max_relative = 1e-14
        );
        let rho = 3.230_672_602;
        assert_relative_eq!(
            eos.sound_speed(rho, 12.0, 0.0).unwrap(),
            (1.6 * 14.0 / rho).sqrt(),
            max_relative = 1e-14
        );
        // Any state scaled so gamma (p + pi) = rho has unit sound speed.
        assert_relative_eq!(eos.sound_speed(1.4, 1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn entropy_and_enthalpy_reference_points() {
        let eos = eos();
        assert_relative_eq!(
            eos.entropy(2.0, 1.0, 1.0).unwrap(),
            2.0_f64.powf(-1.4),
            max_relative = 1e-14
        );
        let rho: f64 = 3.230_672_602;
        assert_relative_eq!(
            eos.entropy(rho, 12.0, 0.0).unwrap(),
            14.0 * rho.powf(-1.6),
            max_relative = 1e-14
        );
        assert_relative_eq!(eos.enthalpy(2.0, 1.0, 1.0).unwrap(), 1.75, max_relative = 1e-14);
        assert_relative_eq!(
            eos.enthalpy(rho, 12.0, 0.0).unwrap(),
            1.6 * 14.0 / (0.6 * rho),
            max_relative = 1e-14
        );
    }

    #[test]
    fn entropy_inverse_is_consistent_at_reference_state() {
        // p -> s -> p closes at the dense state, which pins down the sign
        // conventions in both directions.
        let eos = eos();
        let rho = 3.230_672_602;
        let s = eos.entropy(rho, 12.0, 0.0).unwrap();
        assert_relative_eq!(
            eos.pressure_from_entropy(rho, s, 0.0).unwrap(),
            12.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn round_trips_over_random_admissible_states() {
        let eos = eos();
        let mut rng = ChaCha8Rng::seed_from_u64(0x00d1_ce5e);
        for _ in 0..10_000 {
            let rho = 10.0_f64.powf(rng.random_range(-3.0..3.0));
            let p = 10.0_f64.powf(rng.random_range(-3.0..3.0));
            let phi = match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random_range(0.0..1.0),
            };
            let e = eos.internal_energy(rho, p, phi).unwrap();
            assert_relative_eq!(eos.pressure(rho, e, phi).unwrap(), p, max_relative = 1e-12);
            let s = eos.entropy(rho, p, phi).unwrap();
            assert_relative_eq!(
                eos.pressure_from_entropy(rho, s, phi).unwrap(),
                p,
                max_relative = 1e-12,
                epsilon = 1e-12 * (1.0 + p.abs())
            );
        }
    }

    #[test]
    fn sound_speed_squared_matches_isentropic_enthalpy_derivative() {
        // c^2 = rho * d h / d rho at constant (s, phi); checked against a
        // central finite difference along the isentrope.
        let eos = eos();
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
        for _ in 0..1_000 {
            let rho = 10.0_f64.powf(rng.random_range(-2.0..2.0));
            let p = 10.0_f64.powf(rng.random_range(-2.0..2.0));
            let phi = rng.random_range(0.0..=1.0);
            let s = eos.entropy(rho, p, phi).unwrap();
            let d = 1e-6 * rho;
            let h = |r: f64| {
                let pr = eos.pressure_from_entropy(r, s, phi).unwrap();
                eos.enthalpy(r, pr, phi).unwrap()
            };
            let dh_drho = (h(rho + d) - h(rho - d)) / (2.0 * d);
            let c = eos.sound_speed(rho, p, phi).unwrap();
            assert_relative_eq!(c * c, rho * dh_drho, max_relative = 1e-5);
        }
    }

    #[test]
    fn hyperbolicity_loss_is_distinguished_from_domain_errors() {
        let eos = eos();
        // gamma pi = 3.2 on the stiffened side: e small enough drives p + pi
        // below zero without any argument leaving its domain.
        assert!(matches!(
            eos.pressure(1.0, 1.0, 0.0),
            Err(SimError::HyperbolicityLoss { .. })
        ));
        assert!(matches!(
            eos.internal_energy(1.0, -3.0, 0.0),
            Err(SimError::HyperbolicityLoss { .. })
        ));
        assert!(matches!(
            eos.pressure(-1.0, 1.0, 1.0),
            Err(SimError::Inadmissible { field: "rho", .. })
        ));
        assert!(matches!(
            eos.sound_speed(1.0, 1.0, 3.0),
            Err(SimError::Domain(_))
        ));
    }
}
