//! State representations and conversions.
//!
//! Three coordinate systems describe the same cell-averaged state:
//!
//! * [`ConservativeState`] `W = (A rho, A rho u, A rho E, A rho phi, A)` —
//!   what the finite-volume update integrates;
//! * [`PrimitiveState`] `Y = (rho, u, p, phi, A)` — what the interface
//!   solvers linearize in;
//! * [`StationaryInvariants`] `Z = (A, phi, s, Q, H)` — constant across a
//!   standing wave, used to continue a state through an area change.
//!
//! The conversion `Z -> Y` is the only one that needs iteration: the duct
//! equation ties density to the invariants through
//! `gamma s rho^(gamma-1) / (gamma - 1) + Q^2 / (2 A^2 rho^2) = H`,
//! which has one subsonic and one supersonic branch.

use crate::eos::EosParams;
use crate::error::{Result, SimError};

/// Mach numbers within this relative distance of 1 count as resonant: the
/// standing wave degenerates and no transport across an area jump exists.
pub const MACH_RESONANCE_TOL: f64 = 1e-8;

/// Classification band for the minimum of the duct equation, relative to the
/// total enthalpy scale: above it the flow is choked, inside it sonic.
const SONIC_CLASSIFY_TOL: f64 = 1e-10;

/// Residual target for the density root, relative to the total enthalpy.
const ROOT_RESIDUAL_TOL: f64 = 1e-13;

const MAX_ROOT_ITERS: usize = 200;

/// `(rho, u, p, phi, A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub phi: f64,
    pub a: f64,
}

/// `(A rho, A rho u, A rho E, A rho phi, A)` with `E = e + u^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeState {
    pub a_rho: f64,
    pub a_rho_u: f64,
    pub a_rho_e: f64,
    pub a_rho_phi: f64,
    pub a: f64,
}

/// Quantities constant across a standing wave: area, mass fraction,
/// `s = (p + pi) rho^(-gamma)`, mass flux `Q = rho A u`, and total enthalpy
/// `H = h + u^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryInvariants {
    pub a: f64,
    pub phi: f64,
    pub s: f64,
    pub q: f64,
    pub h_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowRegime {
    Subsonic,
    Supersonic,
}

impl ConservativeState {
    #[inline]
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.a_rho,
            self.a_rho_u,
            self.a_rho_e,
            self.a_rho_phi,
            self.a,
        ]
    }

    #[inline]
    pub fn from_array(w: [f64; 5]) -> Self {
        Self {
            a_rho: w[0],
            a_rho_u: w[1],
            a_rho_e: w[2],
            a_rho_phi: w[3],
            a: w[4],
        }
    }
}

fn check_area(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(SimError::Inadmissible { field: "a", value: a });
    }
    Ok(())
}

pub fn prim_to_cons(y: &PrimitiveState, eos: &EosParams) -> Result<ConservativeState> {
    check_area(y.a)?;
    let e = eos.internal_energy(y.rho, y.p, y.phi)?;
    let total = e + 0.5 * y.u * y.u;
    let a_rho = y.a * y.rho;
    Ok(ConservativeState {
        a_rho,
        a_rho_u: a_rho * y.u,
        a_rho_e: a_rho * total,
        a_rho_phi: a_rho * y.phi,
        a: y.a,
    })
}

pub fn cons_to_prim(w: &ConservativeState, eos: &EosParams) -> Result<PrimitiveState> {
    check_area(w.a)?;
    if !(w.a_rho > 0.0) || !w.a_rho.is_finite() {
        return Err(SimError::Inadmissible {
            field: "a_rho",
            value: w.a_rho,
        });
    }
    let rho = w.a_rho / w.a;
    let u = w.a_rho_u / w.a_rho;
    let phi = eos.clamp_phi(w.a_rho_phi / w.a_rho)?;
    let e = w.a_rho_e / w.a_rho - 0.5 * u * u;
    let p = eos.pressure(rho, e, phi)?;
    Ok(PrimitiveState {
        rho,
        u,
        p,
        phi,
        a: w.a,
    })
}

/// Physical flux `F(W) = (A rho u, A (rho u^2 + p), A (rho E + p) u,
/// A rho phi u, 0)`.
///
/// The fraction component is computed as `phi` times the mass component so
/// that pure fluids (`phi` exactly 0 or 1) stay bit-exact through the update.
pub fn flux(y: &PrimitiveState, eos: &EosParams) -> Result<[f64; 5]> {
    check_area(y.a)?;
    let e = eos.internal_energy(y.rho, y.p, y.phi)?;
    let total = e + 0.5 * y.u * y.u;
    let f_mass = y.a * y.rho * y.u;
    Ok([
        f_mass,
        y.a * (y.rho * y.u * y.u + y.p),
        (y.a * y.rho * total + y.a * y.p) * y.u,
        f_mass * y.phi,
        0.0,
    ])
}

pub fn prim_to_stationary(y: &PrimitiveState, eos: &EosParams) -> Result<StationaryInvariants> {
    check_area(y.a)?;
    let s = eos.entropy(y.rho, y.p, y.phi)?;
    let h = eos.enthalpy(y.rho, y.p, y.phi)?;
    Ok(StationaryInvariants {
        a: y.a,
        phi: eos.clamp_phi(y.phi)?,
        s,
        q: y.rho * y.a * y.u,
        h_total: h + 0.5 * y.u * y.u,
    })
}

/// Classifies the state by Mach number, erroring inside the resonance band
/// around `|u| = c` where the standing wave is degenerate.
pub fn flow_regime(y: &PrimitiveState, eos: &EosParams) -> Result<FlowRegime> {
    let c = eos.sound_speed(y.rho, y.p, y.phi)?;
    let m = y.u.abs() / c;
    if (m - 1.0).abs() <= MACH_RESONANCE_TOL {
        return Err(SimError::Resonance(format!(
            "state is sonic (|u|/c = {m}); no unique standing-wave continuation"
        )));
    }
    Ok(if m < 1.0 {
        FlowRegime::Subsonic
    } else {
        FlowRegime::Supersonic
    })
}

/// Recovers the primitive state on the requested branch of the duct equation.
pub fn stationary_to_prim(
    z: &StationaryInvariants,
    regime: FlowRegime,
    eos: &EosParams,
) -> Result<PrimitiveState> {
    check_area(z.a)?;
    let m = eos.mixture(z.phi)?;
    if !(z.s > 0.0) || !z.s.is_finite() {
        return Err(SimError::Domain(format!("entropy s = {} must be positive", z.s)));
    }
    if !(z.h_total > 0.0) || !z.h_total.is_finite() {
        return Err(SimError::Domain(format!(
            "total enthalpy H = {} must be positive",
            z.h_total
        )));
    }
    let gamma = m.gamma;
    let gs = gamma * z.s;

    let rho = if z.q == 0.0 {
        if regime == FlowRegime::Supersonic {
            return Err(SimError::Domain(
                "zero mass flux cannot continue on the supersonic branch".into(),
            ));
        }
        // No kinetic term: H = gamma s rho^(gamma-1) / (gamma - 1) directly.
        (m.gm1() * z.h_total / gs).powf(1.0 / m.gm1())
    } else {
        // g(rho) = gamma s rho^(gamma-1)/(gamma-1) + Q^2/(2 A^2 rho^2) - H
        // is convex with a single minimum at the sonic density.
        let q2 = (z.q / z.a) * (z.q / z.a);
        let g = |rho: f64| gs * rho.powf(m.gm1()) / m.gm1() + 0.5 * q2 / (rho * rho) - z.h_total;
        // g'(rho) = (c^2 - u^2) / rho
        let dg = |rho: f64| gs * rho.powf(m.gamma - 2.0) - q2 / (rho * rho * rho);

        let rho_sonic = (q2 / gs).powf(1.0 / (gamma + 1.0));
        let g_min = g(rho_sonic);
        let band = SONIC_CLASSIFY_TOL * z.h_total;
        if g_min > band {
            return Err(SimError::NoRoot(format!(
                "no stationary continuation to area {}: flow is choked \
                 (duct equation minimum {g_min:.3e} > 0 at sonic density {rho_sonic:.6e})",
                z.a
            )));
        }
        if g_min.abs() <= band {
            return Err(SimError::Resonance(format!(
                "stationary continuation to area {} passes through the sonic point",
                z.a
            )));
        }

        let (mut lo, mut hi) = match regime {
            FlowRegime::Subsonic => {
                // g increases from g_min < 0 to +infinity on [rho_sonic, inf).
                let mut hi = 2.0 * rho_sonic;
                let mut n = 0;
                while g(hi) < 0.0 {
                    hi *= 2.0;
                    n += 1;
                    if n > MAX_ROOT_ITERS {
                        return Err(SimError::NonConvergence(
                            "subsonic density bracket did not close".into(),
                        ));
                    }
                }
                (rho_sonic, hi)
            }
            FlowRegime::Supersonic => {
                // g increases from g_min < 0 to +infinity as rho -> 0+.
                let mut lo = 0.5 * rho_sonic;
                let mut n = 0;
                while g(lo) < 0.0 {
                    lo *= 0.5;
                    n += 1;
                    if n > MAX_ROOT_ITERS {
                        return Err(SimError::NonConvergence(
                            "supersonic density bracket did not close".into(),
                        ));
                    }
                }
                (lo, rho_sonic)
            }
        };

        // Newton safeguarded by the bracket; g(lo) and g(hi) have opposite
        // signs throughout.
        let increasing = regime == FlowRegime::Subsonic;
        let mut x = 0.5 * (lo + hi);
        let gtol = ROOT_RESIDUAL_TOL * z.h_total;
        let mut converged = false;
        for _ in 0..MAX_ROOT_ITERS {
            let gx = g(x);
            if gx.abs() <= gtol {
                converged = true;
                break;
            }
            if (gx > 0.0) == increasing {
                hi = x;
            } else {
                lo = x;
            }
            let step = gx / dg(x);
            let mut next = x - step;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= f64::EPSILON * x {
                x = next;
                converged = true;
                break;
            }
            x = next;
        }
        if !converged && g(x).abs() > gtol {
            return Err(SimError::NonConvergence(format!(
                "density root stalled at rho = {x} with residual {:.3e}",
                g(x)
            )));
        }
        x
    };

    let u = if z.q == 0.0 { 0.0 } else { z.q / (rho * z.a) };
    let p = eos.pressure_from_entropy(rho, z.s, z.phi)?;
    Ok(PrimitiveState {
        rho,
        u,
        p,
        phi: z.phi,
        a: z.a,
    })
}

/// Continues `y` through a standing wave onto area `a_to`, preserving
/// `(phi, s, Q, H)` and the flow regime. Identity when the area is unchanged.
pub fn stationary_transport(y: &PrimitiveState, a_to: f64, eos: &EosParams) -> Result<PrimitiveState> {
    if a_to == y.a {
        return Ok(*y);
    }
    check_area(a_to)?;
    let regime = flow_regime(y, eos)?;
    let mut z = prim_to_stationary(y, eos)?;
    z.a = a_to;
    stationary_to_prim(&z, regime, eos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eos() -> EosParams {
        EosParams::new(1.4, 0.0, 1.6, 2.0).unwrap()
    }

    fn left_state() -> PrimitiveState {
        PrimitiveState {
            rho: 2.0,
            u: 0.5,
            p: 1.0,
            phi: 1.0,
            a: 1.5,
        }
    }

    fn right_state() -> PrimitiveState {
        PrimitiveState {
            rho: 3.230_672_602,
            u: -0.444_256_590_0,
            p: 12.0,
            phi: 0.0,
            a: 1.0,
        }
    }

    #[test]
    fn conservative_round_trip_reference_states() {
        let eos = eos();
        let w = prim_to_cons(&left_state(), &eos).unwrap();
        // E = 1.25 + 0.125 = 1.375.
        assert_relative_eq!(w.a_rho, 3.0, max_relative = 1e-14);
        assert_relative_eq!(w.a_rho_u, 1.5, max_relative = 1e-14);
        assert_relative_eq!(w.a_rho_e, 4.125, max_relative = 1e-14);
        assert_relative_eq!(w.a_rho_phi, 3.0, max_relative = 1e-14);
        assert_eq!(w.a, 1.5);
        let y = cons_to_prim(&w, &eos).unwrap();
        assert_relative_eq!(y.rho, 2.0, max_relative = 1e-14);
        assert_relative_eq!(y.u, 0.5, max_relative = 1e-14);
        assert_relative_eq!(y.p, 1.0, max_relative = 1e-13);
        assert_eq!(y.phi, 1.0);

        let yr = right_state();
        let wr = prim_to_cons(&yr, &eos).unwrap();
        let e = (12.0 + 3.2) / (0.6 * yr.rho);
        assert_relative_eq!(wr.a_rho, yr.rho, max_relative = 1e-14);
        assert_relative_eq!(wr.a_rho_u, yr.rho * yr.u, max_relative = 1e-14);
        assert_relative_eq!(
            wr.a_rho_e,
            yr.rho * (e + 0.5 * yr.u * yr.u),
            max_relative = 1e-14
        );
        assert_eq!(wr.a_rho_phi, 0.0);
        let back = cons_to_prim(&wr, &eos).unwrap();
        assert_relative_eq!(back.p, 12.0, max_relative = 1e-12);
        assert_eq!(back.phi, 0.0);
    }

    #[test]
    fn pure_fractions_survive_conversion_bit_exactly() {
        let eos = eos();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000 {
            let y = PrimitiveState {
                rho: 10.0_f64.powf(rng.random_range(-2.0..2.0)),
                u: rng.random_range(-3.0..3.0),
                p: 10.0_f64.powf(rng.random_range(-2.0..2.0)),
                phi: if rng.random_range(0..2) == 0 { 0.0 } else { 1.0 },
                a: rng.random_range(0.5..2.0),
            };
            let w = prim_to_cons(&y, &eos).unwrap();
            let back = cons_to_prim(&w, &eos).unwrap();
            assert_eq!(back.phi, y.phi);
        }
    }

    #[test]
    fn flux_reference_values() {
        let eos = eos();
        let f = flux(&left_state(), &eos).unwrap();
        assert_relative_eq!(f[0], 1.5, max_relative = 1e-14);
        assert_relative_eq!(f[1], 2.25, max_relative = 1e-14);
        assert_relative_eq!(f[2], 2.8125, max_relative = 1e-14);
        assert_eq!(f[3], f[0]); // phi = 1 keeps the fraction flux bit-equal
        assert_eq!(f[4], 0.0);
        let fr = flux(&right_state(), &eos).unwrap();
        assert_eq!(fr[3], 0.0); // phi = 0 zeroes the fraction flux
    }

    #[test]
    fn stationary_invariants_reference_values() {
        let eos = eos();
        let z = prim_to_stationary(&left_state(), &eos).unwrap();
        assert_eq!(z.a, 1.5);
        assert_eq!(z.phi, 1.0);
        assert_relative_eq!(z.s, 2.0_f64.powf(-1.4), max_relative = 1e-14);
        assert_relative_eq!(z.q, 1.5, max_relative = 1e-14);
        assert_relative_eq!(z.h_total, 1.875, max_relative = 1e-14);

        let zr = prim_to_stationary(&right_state(), &eos).unwrap();
        let rho = right_state().rho;
        assert_relative_eq!(zr.s, 14.0 * rho.powf(-1.6), max_relative = 1e-14);
        assert_relative_eq!(
            zr.h_total,
            1.6 * 14.0 / (0.6 * rho) + 0.5 * right_state().u.powi(2),
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_velocity_inversion_is_closed_form() {
        let eos = eos();
        let y = PrimitiveState {
            rho: 2.0,
            u: 0.0,
            p: 1.0,
            phi: 1.0,
            a: 1.5,
        };
        let z = prim_to_stationary(&y, &eos).unwrap();
        assert_eq!(z.q, 0.0);
        let back = stationary_to_prim(&z, FlowRegime::Subsonic, &eos).unwrap();
        assert_relative_eq!(back.rho, 2.0, max_relative = 1e-13);
        assert_eq!(back.u, 0.0);
        assert_relative_eq!(back.p, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn invariant_round_trip_away_from_sonic() {
        let eos = eos();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..2_000 {
            let rho = 10.0_f64.powf(rng.random_range(-1.5..1.5));
            let p = 10.0_f64.powf(rng.random_range(-1.5..1.5));
            let phi = match rng.random_range(0..3) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random_range(0.0..1.0),
            };
            let a = rng.random_range(0.5..2.0);
            let c = eos.sound_speed(rho, p, phi).unwrap();
            // Mach away from 1 by at least 0.05 on either side.
            let mach = if rng.random_range(0..2) == 0 {
                rng.random_range(0.0..0.95)
            } else {
                rng.random_range(1.05..3.0)
            };
            let u = mach * c * if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
            let y = PrimitiveState { rho, u, p, phi, a };
            let regime = flow_regime(&y, &eos).unwrap();
            let z = prim_to_stationary(&y, &eos).unwrap();
            let back = stationary_to_prim(&z, regime, &eos).unwrap();
            assert_relative_eq!(back.rho, rho, max_relative = 1e-9);
            assert_relative_eq!(back.u, u, max_relative = 1e-9, epsilon = 1e-9 * c);
            assert_relative_eq!(back.p, p, max_relative = 1e-9, epsilon = 1e-9 * (p + 2.0));
        }
    }

    #[test]
    fn transport_identity_when_area_is_unchanged() {
        let eos = eos();
        let y = left_state();
        let t = stationary_transport(&y, 1.5, &eos).unwrap();
        assert_eq!(t, y);
    }

    #[test]
    fn subsonic_transport_preserves_invariants_and_accelerates_when_narrowing() {
        let eos = eos();
        let y = left_state(); // Mach = 0.5 / sqrt(0.7) ~ 0.598
        let t = stationary_transport(&y, 1.4, &eos).unwrap();
        assert_eq!(t.a, 1.4);
        let z0 = prim_to_stationary(&y, &eos).unwrap();
        let z1 = prim_to_stationary(&t, &eos).unwrap();
        assert_relative_eq!(z1.s, z0.s, max_relative = 1e-12);
        assert_relative_eq!(z1.q, z0.q, max_relative = 1e-12);
        assert_relative_eq!(z1.h_total, z0.h_total, max_relative = 1e-12);
        assert_eq!(z1.phi, z0.phi);
        // Subsonic flow speeds up into a narrower throat.
        assert!(t.u > y.u);
        assert!(t.p < y.p);
    }

    #[test]
    fn supersonic_transport_accelerates_when_widening() {
        let eos = eos();
        let c = eos.sound_speed(1.0, 1.0, 0.0).unwrap();
        let y = PrimitiveState {
            rho: 1.0,
            u: 2.0 * c,
            p: 1.0,
            phi: 0.0,
            a: 1.0,
        };
        let t = stationary_transport(&y, 1.3, &eos).unwrap();
        assert!(t.u > y.u);
        let z0 = prim_to_stationary(&y, &eos).unwrap();
        let z1 = prim_to_stationary(&t, &eos).unwrap();
        assert_relative_eq!(z1.q, z0.q, max_relative = 1e-12);
        assert_relative_eq!(z1.h_total, z0.h_total, max_relative = 1e-12);
        assert_eq!(flow_regime(&t, &eos).unwrap(), FlowRegime::Supersonic);
    }

    #[test]
    fn transport_into_too_small_area_reports_choking() {
        // At Mach ~0.598 the critical area is ~1.26 x the throat, so pushing
        // this state from area 1.5 down to 1.0 has no stationary solution.
        let eos = eos();
        let err = stationary_transport(&left_state(), 1.0, &eos).unwrap_err();
        assert!(matches!(err, SimError::NoRoot(_)), "got {err:?}");
    }

    #[test]
    fn sonic_states_are_rejected_as_resonant() {
        let eos = eos();
        let c = eos.sound_speed(1.0, 1.0, 1.0).unwrap();
        let sonic = PrimitiveState {
            rho: 1.0,
            u: c,
            p: 1.0,
            phi: 1.0,
            a: 1.0,
        };
        assert!(matches!(
            flow_regime(&sonic, &eos),
            Err(SimError::Resonance(_))
        ));
        let near = PrimitiveState {
            u: c * (1.0 + 0.5 * MACH_RESONANCE_TOL),
            ..sonic
        };
        assert!(matches!(flow_regime(&near, &eos), Err(SimError::Resonance(_))));
        let off = PrimitiveState {
            u: c * (1.0 + 1e-4),
            ..sonic
        };
        assert_eq!(flow_regime(&off, &eos).unwrap(), FlowRegime::Supersonic);
    }

    #[test]
    fn inadmissible_inputs_are_rejected() {
        let eos = eos();
        let w = ConservativeState {
            a_rho: -1.0,
            a_rho_u: 0.0,
            a_rho_e: 1.0,
            a_rho_phi: 0.0,
            a: 1.0,
        };
        assert!(matches!(
            cons_to_prim(&w, &eos),
            Err(SimError::Inadmissible { field: "a_rho", .. })
        ));
        let y = PrimitiveState {
            rho: 1.0,
            u: 0.0,
            p: 1.0,
            phi: 0.0,
            a: -2.0,
        };
        assert!(matches!(
            prim_to_cons(&y, &eos),
            Err(SimError::Inadmissible { field: "a", .. })
        ));
    }
}
