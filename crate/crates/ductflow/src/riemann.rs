//! Linearized interface solver.
//!
//! Every cell edge is resolved by freezing the quasi-linear system at the
//! arithmetic mean of the two primitive states and decomposing the jump onto
//! the eigenvectors of that frozen matrix. The wave fan has five waves:
//!
//! | index | speed   | carries                         |
//! |-------|---------|---------------------------------|
//! | 0     | 0       | the area jump (standing wave)   |
//! | 1     | u - c   | left acoustic                   |
//! | 2     | u       | density (contact)               |
//! | 3     | u       | mass fraction (contact)         |
//! | 4     | u + c   | right acoustic                  |
//!
//! Edges separating the same fluid use a well-balanced variant: each side is
//! first continued through the standing wave onto the other side's area, so
//! stationary duct flow produces exactly cancelling fluxes. Edges separating
//! the two fluids are treated in Lagrangian fashion — the edge itself moves
//! with the contact so no fluid mass ever crosses it.

use crate::eos::EosParams;
use crate::error::{Result, SimError};
use crate::state::{flux, stationary_transport, PrimitiveState};

/// An area jump whose mean state is within this relative distance of sonic
/// makes the standing-wave eigenvector blow up.
pub const LINEARIZED_RESONANCE_TOL: f64 = 1e-8;

/// Which side of a wave to take when sampling exactly on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Include only waves strictly slower than the sampling speed.
    Minus,
    /// Include waves up to and including the sampling speed.
    Plus,
}

/// Jacobian of the primitive-variable system `dY/dt + C(Y) dY/dx = 0` with
/// `Y = (rho, u, p, phi, A)`.
pub fn quasilinear_matrix(y: &PrimitiveState, eos: &EosParams) -> Result<[[f64; 5]; 5]> {
    let c = eos.sound_speed(y.rho, y.p, y.phi)?;
    let rc2 = y.rho * c * c;
    Ok([
        [y.u, y.rho, 0.0, 0.0, y.rho * y.u / y.a],
        [0.0, y.u, 1.0 / y.rho, 0.0, 0.0],
        [0.0, rc2, y.u, 0.0, rc2 * y.u / y.a],
        [0.0, 0.0, 0.0, y.u, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
    ])
}

/// Wave fan of the linearized problem between two primitive states.
#[derive(Debug, Clone)]
pub struct LinearizedFan {
    pub mean: PrimitiveState,
    pub sound_speed: f64,
    /// Wave speeds in the fixed order documented at module level.
    pub lambdas: [f64; 5],
    /// Right eigenvectors of the frozen matrix, same order.
    pub vectors: [[f64; 5]; 5],
    /// Wave strengths: `Y_R - Y_L = sum alpha_k vectors_k`.
    pub alphas: [f64; 5],
    left: [f64; 5],
}

fn as_array(y: &PrimitiveState) -> [f64; 5] {
    [y.rho, y.u, y.p, y.phi, y.a]
}

fn from_array(v: [f64; 5]) -> PrimitiveState {
    PrimitiveState {
        rho: v[0],
        u: v[1],
        p: v[2],
        phi: v[3],
        a: v[4],
    }
}

/// Freezes the system at the mean of the two states and decomposes the jump.
pub fn linearize(y_l: &PrimitiveState, y_r: &PrimitiveState, eos: &EosParams) -> Result<LinearizedFan> {
    let mean = PrimitiveState {
        rho: 0.5 * (y_l.rho + y_r.rho),
        u: 0.5 * (y_l.u + y_r.u),
        p: 0.5 * (y_l.p + y_r.p),
        phi: 0.5 * (y_l.phi + y_r.phi),
        a: 0.5 * (y_l.a + y_r.a),
    };
    let c = eos.sound_speed(mean.rho, mean.p, mean.phi)?;
    let c2 = c * c;

    let d_rho = y_r.rho - y_l.rho;
    let d_u = y_r.u - y_l.u;
    let d_p = y_r.p - y_l.p;
    let d_phi = y_r.phi - y_l.phi;
    let d_a = y_r.a - y_l.a;

    // Standing wave: only engaged across an actual area jump, where it is
    // singular at a sonic mean state.
    let r0 = if d_a == 0.0 {
        [0.0, 0.0, 0.0, 0.0, 1.0]
    } else {
        let mach = mean.u.abs() / c;
        if (mach - 1.0).abs() <= LINEARIZED_RESONANCE_TOL {
            return Err(SimError::Resonance(format!(
                "area jump {:.6e} -> {:.6e} with sonic mean state (|u|/c = {mach})",
                y_l.a, y_r.a
            )));
        }
        let d = mean.a * (c2 - mean.u * mean.u);
        [
            mean.rho * mean.u * mean.u / d,
            -c2 * mean.u / d,
            mean.rho * c2 * mean.u * mean.u / d,
            0.0,
            1.0,
        ]
    };

    // Remove the standing-wave share, then split the rest onto the acoustic
    // and contact waves of the constant-area system.
    let dp_rho = d_rho - d_a * r0[0];
    let dp_u = d_u - d_a * r0[1];
    let dp_p = d_p - d_a * r0[2];

    let rc = mean.rho * c;
    let alphas = [
        d_a,
        (dp_p - rc * dp_u) / (2.0 * c2),
        dp_rho - dp_p / c2,
        d_phi,
        (dp_p + rc * dp_u) / (2.0 * c2),
    ];
    let vectors = [
        r0,
        [1.0, -c / mean.rho, c2, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [1.0, c / mean.rho, c2, 0.0, 0.0],
    ];
    let lambdas = [0.0, mean.u - c, mean.u, mean.u, mean.u + c];

    Ok(LinearizedFan {
        mean,
        sound_speed: c,
        lambdas,
        vectors,
        alphas,
        left: as_array(y_l),
    })
}

impl LinearizedFan {
    /// State of the fan at similarity speed `xi`, taking `side` when a wave
    /// sits exactly on `xi`.
    pub fn sample(&self, xi: f64, side: Side) -> PrimitiveState {
        let mut v = self.left;
        for k in 0..5 {
            let include = match side {
                Side::Minus => self.lambdas[k] < xi,
                Side::Plus => self.lambdas[k] <= xi,
            };
            if include {
                for (vi, r) in v.iter_mut().zip(self.vectors[k]) {
                    *vi += self.alphas[k] * r;
                }
            }
        }
        from_array(v)
    }

    /// Velocity and pressure on the contact, which are continuous across it.
    pub fn contact(&self) -> (f64, f64) {
        let y = self.sample(self.mean.u, Side::Minus);
        (y.u, y.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceKind {
    /// Same fluid on both sides: fixed edge, one-sided well-balanced fluxes.
    WellBalanced,
    /// Fluid-fluid contact: the edge moves with it.
    Lagrange,
}

/// Everything the volume update needs from one cell edge.
#[derive(Debug, Clone)]
pub struct InterfaceSolution {
    pub kind: InterfaceKind,
    /// Edge velocity; zero except for a moving contact.
    pub v: f64,
    /// Flux seen by the cell on the left of the edge.
    pub flux_minus: [f64; 5],
    /// Flux seen by the cell on the right of the edge.
    pub flux_plus: [f64; 5],
    /// Momentum-flux jump across the standing wave of a moving contact over
    /// an area jump; the cell that ends up containing the jump absorbs it.
    pub momentum_correction: f64,
    /// Contact pressure, when the edge is a moving contact.
    pub contact_pressure: Option<f64>,
    /// Set when a same-fluid edge could not continue a state through the
    /// area change (momentarily choked flow) and fell back to sampling the
    /// direct five-wave fan instead of the invariant transport.
    pub choked_fallback: bool,
}

/// Resolves one cell edge.
pub fn solve_interface(
    y_l: &PrimitiveState,
    y_r: &PrimitiveState,
    eos: &EosParams,
) -> Result<InterfaceSolution> {
    if y_l == y_r {
        let f = flux(y_l, eos)?;
        return Ok(InterfaceSolution {
            kind: InterfaceKind::WellBalanced,
            v: 0.0,
            flux_minus: f,
            flux_plus: f,
            momentum_correction: 0.0,
            contact_pressure: None,
            choked_fallback: false,
        });
    }

    let phi_l = eos.clamp_phi(y_l.phi)?;
    let phi_r = eos.clamp_phi(y_r.phi)?;

    if phi_l == phi_r {
        if y_l.a == y_r.a {
            // No area change: one constant-area fan, and the same flux must
            // go to both cells. Sampling the two sides separately would hand
            // out different fluxes (and leak mass) whenever a wave sits
            // exactly on the edge, e.g. between two resting states of
            // different density.
            let fan = linearize(y_l, y_r, eos)?;
            let f = flux(&fan.sample(0.0, Side::Plus), eos)?;
            return Ok(InterfaceSolution {
                kind: InterfaceKind::WellBalanced,
                v: 0.0,
                flux_minus: f,
                flux_plus: f,
                momentum_correction: 0.0,
                contact_pressure: None,
                choked_fallback: false,
            });
        }

        // Same fluid: continue each state through the standing wave onto the
        // neighbouring area, then solve a constant-area fan on each side.
        // For stationary duct flow the transported state reproduces the
        // neighbour, both fans degenerate, and the cell sees no net flux.
        //
        // A transient state can be momentarily choked: no stationary
        // continuation through the area change exists, and the transport has
        // no root. The edge then degrades to sampling the one direct
        // five-wave fan, whose standing wave carries the area jump linearly.
        // Stationary pairs always transport (they are each other's
        // continuation), so the fall-back can never fire on steady data and
        // the preservation of steady states is untouched.
        match (
            stationary_transport(y_r, y_l.a, eos),
            stationary_transport(y_l, y_r.a, eos),
        ) {
            (Ok(r_on_l), Ok(l_on_r)) => {
                let fan_l = linearize(y_l, &r_on_l, eos)?;
                let fan_r = linearize(&l_on_r, y_r, eos)?;
                let flux_minus = flux(&fan_l.sample(0.0, Side::Minus), eos)?;
                let flux_plus = flux(&fan_r.sample(0.0, Side::Plus), eos)?;
                return Ok(InterfaceSolution {
                    kind: InterfaceKind::WellBalanced,
                    v: 0.0,
                    flux_minus,
                    flux_plus,
                    momentum_correction: 0.0,
                    contact_pressure: None,
                    choked_fallback: false,
                });
            }
            (Err(e), _) | (_, Err(e))
                if !matches!(e, SimError::NoRoot(_) | SimError::Resonance(_)) =>
            {
                return Err(e)
            }
            _ => {
                let fan = linearize(y_l, y_r, eos)?;
                let flux_minus = flux(&fan.sample(0.0, Side::Minus), eos)?;
                let flux_plus = flux(&fan.sample(0.0, Side::Plus), eos)?;
                return Ok(InterfaceSolution {
                    kind: InterfaceKind::WellBalanced,
                    v: 0.0,
                    flux_minus,
                    flux_plus,
                    momentum_correction: 0.0,
                    contact_pressure: None,
                    choked_fallback: true,
                });
            }
        }
    }

    // Two different fluids: resolve the full fan and move the edge with the
    // contact. Nothing advects through a co-moving edge, so the flux reduces
    // to pressure work plus the area swept by the edge.
    let fan = linearize(y_l, y_r, eos)?;
    let (u_star, p_star) = fan.contact();
    let v = u_star;
    let a_star = if v < 0.0 { y_l.a } else { y_r.a };
    let lagrange_flux = [
        0.0,
        a_star * p_star,
        a_star * p_star * u_star,
        0.0,
        -(v * a_star),
    ];
    // Across the standing wave the exact mass, energy and fraction fluxes
    // are continuous; only the momentum flux jumps (by the pressure force on
    // the area change). Sampling both sides of xi = 0 measures that jump.
    let momentum_correction = if y_l.a == y_r.a {
        0.0
    } else {
        let ym = fan.sample(0.0, Side::Minus);
        let yp = fan.sample(0.0, Side::Plus);
        ym.a * (ym.rho * ym.u * ym.u + ym.p) - yp.a * (yp.rho * yp.u * yp.u + yp.p)
    };
    Ok(InterfaceSolution {
        kind: InterfaceKind::Lagrange,
        v,
        flux_minus: lagrange_flux,
        flux_plus: lagrange_flux,
        momentum_correction,
        contact_pressure: Some(p_star),
        choked_fallback: false,
    })
}
