//! Exact Riemann solver used as the validation oracle.
//!
//! For two stiffened gases separated by a contact, with a single jump in the
//! duct cross-section at `x = 0`, the self-similar solution consists of (up
//! to) four waves: a left acoustic wave, the material contact at `u*`, the
//! standing wave carrying the area jump, and a right acoustic wave. Acoustic
//! waves follow the classic single-gas jump/expansion relations written in
//! the shifted pressure `p + pi`; the standing wave preserves the duct-flow
//! invariants `(phi, s, Q, H)`.
//!
//! With an area jump the contact can sit on either side of `x = 0`, and the
//! ordering decides which fluid crosses the standing wave. Both orderings
//! are attempted; exactly one is self-consistent (contact speed on the
//! claimed side, acoustic waves clear of `x = 0`).

use crate::eos::EosParams;
use crate::error::{Result, SimError};
use crate::state::{stationary_transport, PrimitiveState};

/// Residual target for the pressure iteration, in units of the problem's
/// velocity scale.
const OUTER_TOL: f64 = 1e-12;

const MAX_BISECT: usize = 200;

/// Log-spaced points probed when bracketing the pressure root.
const SCAN_POINTS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcousticWave {
    Shock {
        speed: f64,
    },
    /// `head` is the edge adjacent to the undisturbed state, `tail` the edge
    /// adjacent to the star region; for the left family `head <= tail`, for
    /// the right family `tail <= head`.
    Rarefaction {
        head: f64,
        tail: f64,
    },
}

/// One side's acoustic wave curve: everything needed to connect the
/// undisturbed state to a star pressure through a shock or rarefaction.
#[derive(Debug, Clone, Copy)]
struct SideCurve {
    rho0: f64,
    u0: f64,
    p0: f64,
    c0: f64,
    gamma: f64,
    pi: f64,
    mu2: f64,
    phi: f64,
    a: f64,
}

impl SideCurve {
    fn from_state(y: &PrimitiveState, eos: &EosParams) -> Result<Self> {
        let m = eos.mixture(y.phi)?;
        let c0 = eos.sound_speed(y.rho, y.p, y.phi)?;
        Ok(Self {
            rho0: y.rho,
            u0: y.u,
            p0: y.p,
            c0,
            gamma: m.gamma,
            pi: m.pi,
            mu2: (m.gamma - 1.0) / (m.gamma + 1.0),
            phi: y.phi,
            a: y.a,
        })
    }

    /// Velocity change across the wave reaching star pressure `p`:
    /// `u* = u0 -/+ f(p)` for the left/right family.
    fn f(&self, p: f64) -> f64 {
        let p0 = self.p0 + self.pi;
        let pp = p + self.pi;
        if pp > p0 {
            let a = 2.0 / ((self.gamma + 1.0) * self.rho0);
            let b = self.mu2 * p0;
            (pp - p0) * (a / (pp + b)).sqrt()
        } else {
            2.0 * self.c0 / (self.gamma - 1.0)
                * ((pp / p0).powf((self.gamma - 1.0) / (2.0 * self.gamma)) - 1.0)
        }
    }

    fn rho_behind(&self, p: f64) -> f64 {
        let p0 = self.p0 + self.pi;
        let pp = p + self.pi;
        if pp > p0 {
            let r = pp / p0;
            self.rho0 * (r + self.mu2) / (self.mu2 * r + 1.0)
        } else {
            self.rho0 * (pp / p0).powf(1.0 / self.gamma)
        }
    }

    fn sound_behind(&self, p: f64) -> f64 {
        (self.gamma * (p + self.pi) / self.rho_behind(p)).sqrt()
    }

    fn mass_flux_factor(&self, p: f64) -> f64 {
        // |rho0 (u0 - S)| for a shock to pressure p.
        let p0 = self.p0 + self.pi;
        let pp = p + self.pi;
        self.c0
            * ((self.gamma + 1.0) / (2.0 * self.gamma) * pp / p0
                + (self.gamma - 1.0) / (2.0 * self.gamma))
                .sqrt()
    }

    fn wave_left(&self, p: f64) -> AcousticWave {
        if p > self.p0 {
            AcousticWave::Shock {
                speed: self.u0 - self.mass_flux_factor(p),
            }
        } else {
            let u_b = self.u0 - self.f(p);
            AcousticWave::Rarefaction {
                head: self.u0 - self.c0,
                tail: u_b - self.sound_behind(p),
            }
        }
    }

    fn wave_right(&self, p: f64) -> AcousticWave {
        if p > self.p0 {
            AcousticWave::Shock {
                speed: self.u0 + self.mass_flux_factor(p),
            }
        } else {
            let u_b = self.u0 + self.f(p);
            AcousticWave::Rarefaction {
                head: self.u0 + self.c0,
                tail: u_b + self.sound_behind(p),
            }
        }
    }

    /// Self-similar state inside a left-family expansion fan at speed `xi`.
    fn fan_left(&self, xi: f64) -> PrimitiveState {
        let g = self.gamma;
        let u = ((g - 1.0) * self.u0 + 2.0 * (xi + self.c0)) / (g + 1.0);
        let c = u - xi;
        let rho = self.rho0 * (c / self.c0).powf(2.0 / (g - 1.0));
        PrimitiveState {
            rho,
            u,
            p: c * c * rho / g - self.pi,
            phi: self.phi,
            a: self.a,
        }
    }

    fn fan_right(&self, xi: f64) -> PrimitiveState {
        let g = self.gamma;
        let u = ((g - 1.0) * self.u0 + 2.0 * (xi - self.c0)) / (g + 1.0);
        let c = xi - u;
        let rho = self.rho0 * (c / self.c0).powf(2.0 / (g - 1.0));
        PrimitiveState {
            rho,
            u,
            p: c * c * rho / g - self.pi,
            phi: self.phi,
            a: self.a,
        }
    }
}

/// Fully resolved self-similar solution; sampled by [`ExactSolution::sample`].
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    /// Contact speed.
    pub u_star: f64,
    /// Pressure on the contact (continuous across it).
    pub p_star: f64,
    pub left_wave: AcousticWave,
    pub right_wave: AcousticWave,
    /// Between the left acoustic wave and the next discontinuity.
    pub star_left: PrimitiveState,
    /// Between contact and standing wave, present only over an area jump.
    pub star_mid: Option<PrimitiveState>,
    /// Between the last discontinuity and the right acoustic wave.
    pub star_right: PrimitiveState,
    left_curve: SideCurve,
    right_curve: SideCurve,
}

impl ExactSolution {
    /// State at similarity speed `xi = x / t`. On a discontinuity the state
    /// just right of it is returned.
    pub fn sample(&self, xi: f64) -> PrimitiveState {
        let (l_lo, l_hi) = match self.left_wave {
            AcousticWave::Shock { speed } => (speed, speed),
            AcousticWave::Rarefaction { head, tail } => (head, tail),
        };
        if xi < l_lo {
            return self.left;
        }
        if xi < l_hi {
            return self.left_curve.fan_left(xi);
        }
        let (r_lo, r_hi) = match self.right_wave {
            AcousticWave::Shock { speed } => (speed, speed),
            AcousticWave::Rarefaction { head, tail } => (tail, head),
        };
        if xi >= r_hi {
            return self.right;
        }
        if xi > r_lo {
            return self.right_curve.fan_right(xi);
        }
        match self.star_mid {
            None => {
                if xi < self.u_star {
                    self.star_left
                } else {
                    self.star_right
                }
            }
            Some(mid) => {
                if self.u_star > 0.0 {
                    // Ordering: star_left | standing at 0 | mid | contact.
                    if xi < 0.0 {
                        self.star_left
                    } else if xi < self.u_star {
                        mid
                    } else {
                        self.star_right
                    }
                } else {
                    // Ordering: star_left | contact | mid | standing at 0.
                    if xi < self.u_star {
                        self.star_left
                    } else if xi < 0.0 {
                        mid
                    } else {
                        self.star_right
                    }
                }
            }
        }
    }
}

/// Finds a root of `eval` over the positive shifted pressure `q`, scanning a
/// log grid around `q_ref` for a sign change and bisecting. `eval` returns
/// `None` where the configuration cannot be evaluated (e.g. a transport
/// chokes); such points simply cannot host the bracket.
fn bracket_and_bisect(
    eval: &dyn Fn(f64) -> Option<f64>,
    q_ref: f64,
    vel_scale: f64,
    label: &str,
) -> Result<f64> {
    let (lo_exp, hi_exp) = (-8.0, 6.0);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let t = lo_exp + (hi_exp - lo_exp) * i as f64 / (SCAN_POINTS - 1) as f64;
        let q = q_ref * 10f64.powf(t);
        if let Some(r) = eval(q) {
            if r == 0.0 {
                return Ok(q);
            }
            samples.push((q, r));
        }
    }
    let mut bracket = None;
    for w in samples.windows(2) {
        if w[0].1 * w[1].1 < 0.0 {
            bracket = Some((w[0].0, w[1].0, w[0].1 > 0.0));
            break;
        }
    }
    let (mut lo, mut hi, lo_positive) = bracket.ok_or_else(|| {
        SimError::NoRoot(format!(
            "{label}: no sign change over {} admissible pressures in \
             [{:.3e}, {:.3e}]",
            samples.len(),
            q_ref * 10f64.powf(lo_exp),
            q_ref * 10f64.powf(hi_exp),
        ))
    })?;
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        let r = eval(mid).ok_or_else(|| {
            SimError::NonConvergence(format!("{label}: residual undefined inside bracket"))
        })?;
        if r.abs() <= OUTER_TOL * vel_scale {
            return Ok(mid);
        }
        if (r > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn velocity_scale(lc: &SideCurve, rc: &SideCurve) -> f64 {
    lc.c0.max(rc.c0).max(lc.u0.abs()).max(rc.u0.abs())
}

/// Solves the two-state problem with both states on the same cross-section.
fn solve_constant_area(
    y_l: &PrimitiveState,
    y_r: &PrimitiveState,
    lc: SideCurve,
    rc: SideCurve,
) -> Result<ExactSolution> {
    let du_crit = 2.0 * lc.c0 / (lc.gamma - 1.0) + 2.0 * rc.c0 / (rc.gamma - 1.0);
    if y_r.u - y_l.u >= du_crit {
        return Err(SimError::Vacuum(format!(
            "expansion du = {:.6e} reaches the vacuum threshold {:.6e}",
            y_r.u - y_l.u,
            du_crit
        )));
    }
    // Both curves must keep their shifted pressure positive.
    let floor = -lc.pi.min(rc.pi);
    let q_ref = (lc.p0.max(rc.p0) - floor).max(lc.p0 + lc.pi).max(rc.p0 + rc.pi);
    let vel = velocity_scale(&lc, &rc);
    let eval = |q: f64| -> Option<f64> {
        let p = floor + q;
        Some((lc.u0 - lc.f(p)) - (rc.u0 + rc.f(p)))
    };
    let q = bracket_and_bisect(&eval, q_ref, vel, "constant-area pressure iteration")?;
    let p_star = floor + q;
    let u_l_side = lc.u0 - lc.f(p_star);
    let u_r_side = rc.u0 + rc.f(p_star);
    let u_star = 0.5 * (u_l_side + u_r_side);
    let star_left = PrimitiveState {
        rho: lc.rho_behind(p_star),
        u: u_l_side,
        p: p_star,
        phi: y_l.phi,
        a: y_l.a,
    };
    let star_right = PrimitiveState {
        rho: rc.rho_behind(p_star),
        u: u_r_side,
        p: p_star,
        phi: y_r.phi,
        a: y_r.a,
    };
    Ok(ExactSolution {
        left: *y_l,
        right: *y_r,
        u_star,
        p_star,
        left_wave: lc.wave_left(p_star),
        right_wave: rc.wave_right(p_star),
        star_left,
        star_mid: None,
        star_right,
        left_curve: lc,
        right_curve: rc,
    })
}

fn check_left_wave_clear(wave: &AcousticWave) -> Result<()> {
    let fastest = match wave {
        AcousticWave::Shock { speed } => *speed,
        AcousticWave::Rarefaction { tail, .. } => *tail,
    };
    if fastest > 0.0 {
        return Err(SimError::NoRoot(format!(
            "left acoustic wave reaches x > 0 (fastest edge {fastest:.6e})"
        )));
    }
    Ok(())
}

fn check_right_wave_clear(wave: &AcousticWave) -> Result<()> {
    let slowest = match wave {
        AcousticWave::Shock { speed } => *speed,
        AcousticWave::Rarefaction { tail, .. } => *tail,
    };
    if slowest < 0.0 {
        return Err(SimError::NoRoot(format!(
            "right acoustic wave reaches x < 0 (slowest edge {slowest:.6e})"
        )));
    }
    Ok(())
}

/// Configuration with the contact left of the standing wave (`u* < 0`): the
/// right fluid occupies both sides of the area jump.
fn try_contact_left(
    y_l: &PrimitiveState,
    y_r: &PrimitiveState,
    lc: SideCurve,
    rc: SideCurve,
    eos: &EosParams,
) -> Result<ExactSolution> {
    let vel = velocity_scale(&lc, &rc);
    let eval = |q: f64| -> Option<f64> {
        let p_c = q - rc.pi;
        let state_c = PrimitiveState {
            rho: rc.rho_behind(p_c),
            u: rc.u0 + rc.f(p_c),
            p: p_c,
            phi: y_r.phi,
            a: y_r.a,
        };
        let ct = stationary_transport(&state_c, y_l.a, eos).ok()?;
        if ct.p + lc.pi <= 0.0 {
            return None;
        }
        Some(ct.u - (lc.u0 - lc.f(ct.p)))
    };
    let q = bracket_and_bisect(&eval, rc.p0 + rc.pi, vel, "leftward-contact configuration")?;
    let p_c = q - rc.pi;
    let star_right = PrimitiveState {
        rho: rc.rho_behind(p_c),
        u: rc.u0 + rc.f(p_c),
        p: p_c,
        phi: y_r.phi,
        a: y_r.a,
    };
    let star_mid = stationary_transport(&star_right, y_l.a, eos)?;
    let p_star = star_mid.p;
    let u_star = 0.5 * (star_mid.u + (lc.u0 - lc.f(p_star)));
    if !(u_star < 0.0) {
        return Err(SimError::NoRoot(format!(
            "contact speed {u_star:.6e} is not leftward"
        )));
    }
    let star_left = PrimitiveState {
        rho: lc.rho_behind(p_star),
        u: lc.u0 - lc.f(p_star),
        p: p_star,
        phi: y_l.phi,
        a: y_l.a,
    };
    let left_wave = lc.wave_left(p_star);
    let right_wave = rc.wave_right(p_c);
    check_left_wave_clear(&left_wave)?;
    check_right_wave_clear(&right_wave)?;
    Ok(ExactSolution {
        left: *y_l,
        right: *y_r,
        u_star,
        p_star,
        left_wave,
        right_wave,
        star_left,
        star_mid: Some(star_mid),
        star_right,
        left_curve: lc,
        right_curve: rc,
    })
}

/// Configuration with the contact right of the standing wave (`u* > 0`): the
/// left fluid occupies both sides of the area jump.
fn try_contact_right(
    y_l: &PrimitiveState,
    y_r: &PrimitiveState,
    lc: SideCurve,
    rc: SideCurve,
    eos: &EosParams,
) -> Result<ExactSolution> {
    let vel = velocity_scale(&lc, &rc);
    let eval = |q: f64| -> Option<f64> {
        let p_a = q - lc.pi;
        let state_a = PrimitiveState {
            rho: lc.rho_behind(p_a),
            u: lc.u0 - lc.f(p_a),
            p: p_a,
            phi: y_l.phi,
            a: y_l.a,
        };
        let at = stationary_transport(&state_a, y_r.a, eos).ok()?;
        if at.p + rc.pi <= 0.0 {
            return None;
        }
        Some(at.u - (rc.u0 + rc.f(at.p)))
    };
    let q = bracket_and_bisect(&eval, lc.p0 + lc.pi, vel, "rightward-contact configuration")?;
    let p_a = q - lc.pi;
    let star_left = PrimitiveState {
        rho: lc.rho_behind(p_a),
        u: lc.u0 - lc.f(p_a),
        p: p_a,
        phi: y_l.phi,
        a: y_l.a,
    };
    let star_mid = stationary_transport(&star_left, y_r.a, eos)?;
    let p_star = star_mid.p;
    let u_star = 0.5 * (star_mid.u + (rc.u0 + rc.f(p_star)));
    if !(u_star > 0.0) {
        return Err(SimError::NoRoot(format!(
            "contact speed {u_star:.6e} is not rightward"
        )));
    }
    let star_right = PrimitiveState {
        rho: rc.rho_behind(p_star),
        u: rc.u0 + rc.f(p_star),
        p: p_star,
        phi: y_r.phi,
        a: y_r.a,
    };
    let left_wave = lc.wave_left(p_a);
    let right_wave = rc.wave_right(p_star);
    check_left_wave_clear(&left_wave)?;
    check_right_wave_clear(&right_wave)?;
    Ok(ExactSolution {
        left: *y_l,
        right: *y_r,
        u_star,
        p_star,
        left_wave,
        right_wave,
        star_left,
        star_mid: Some(star_mid),
        star_right,
        left_curve: lc,
        right_curve: rc,
    })
}

/// Solves the two-state problem with an optional area jump at `x = 0`.
pub fn solve(y_l: &PrimitiveState, y_r: &PrimitiveState, eos: &EosParams) -> Result<ExactSolution> {
    let lc = SideCurve::from_state(y_l, eos)?;
    let rc = SideCurve::from_state(y_r, eos)?;
    if y_l == y_r {
        return Ok(ExactSolution {
            left: *y_l,
            right: *y_r,
            u_star: y_l.u,
            p_star: y_l.p,
            left_wave: AcousticWave::Rarefaction {
                head: y_l.u - lc.c0,
                tail: y_l.u - lc.c0,
            },
            right_wave: AcousticWave::Rarefaction {
                head: y_r.u + rc.c0,
                tail: y_r.u + rc.c0,
            },
            star_left: *y_l,
            star_mid: None,
            star_right: *y_r,
            left_curve: lc,
            right_curve: rc,
        });
    }
    if y_l.a == y_r.a {
        return solve_constant_area(y_l, y_r, lc, rc);
    }
    match (
        try_contact_left(y_l, y_r, lc, rc, eos),
        try_contact_right(y_l, y_r, lc, rc, eos),
    ) {
        (Ok(sol), Err(_)) => Ok(sol),
        (Err(_), Ok(sol)) => Ok(sol),
        (Ok(_), Ok(_)) => Err(SimError::Resonance(
            "both wave orderings are self-consistent; the contact sits on the area jump".into(),
        )),
        (Err(el), Err(er)) => Err(SimError::NoRoot(format!(
            "no self-consistent wave ordering; leftward contact: {el}; rightward contact: {er}"
        ))),
    }
}
