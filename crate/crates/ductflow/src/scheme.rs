//! Time integration: moving-edge volume update plus random-sampling remap.
//!
//! Each step proceeds in four stages:
//!
//! 1. every cell edge is resolved by [`solve_edges`]; fluid-fluid contacts
//!    yield moving edges, everything else stays put;
//! 2. [`compute_dt`] limits the step by the acoustic CFL condition and by
//!    demanding no moving edge sweep more than half a neighbouring cell;
//! 3. [`ale_update`] integrates the cells between their (possibly moved)
//!    edges — a contact edge moves with the fluid, so nothing diffuses
//!    across it;
//! 4. [`glimm_remap`] returns to the fixed mesh by sampling a van der Corput
//!    point: a cell overtaken by a moved edge adopts its neighbour's state
//!    wholesale, keeping the contact exactly one edge wide forever.

use crate::eos::EosParams;
use crate::error::{Result, SimError};
use crate::riemann::{solve_interface, InterfaceKind, InterfaceSolution};
use crate::state::{cons_to_prim, ConservativeState, PrimitiveState};

/// Fixed spatial mesh: `edges` has one more entry than `areas`; cell `i`
/// spans `edges[i]..edges[i+1]` with constant cross-section `areas[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    edges: Vec<f64>,
    areas: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh over `[x_min, x_max]`; the cross-section is sampled at
    /// cell centres, so a profile jumping at an edge stays crisp.
    pub fn uniform(
        x_min: f64,
        x_max: f64,
        n_cells: usize,
        area: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SimError::Config(format!(
                "invalid domain [{x_min}, {x_max}]"
            )));
        }
        if n_cells < 3 {
            return Err(SimError::Config(format!(
                "need at least 3 cells, got {n_cells}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let edges: Vec<f64> = (0..=n_cells).map(|i| x_min + i as f64 * dx).collect();
        let mut areas = Vec::with_capacity(n_cells);
        for i in 0..n_cells {
            let a = area(x_min + (i as f64 + 0.5) * dx);
            if !(a > 0.0) || !a.is_finite() {
                return Err(SimError::Config(format!(
                    "cross-section {a} at cell {i} must be positive"
                )));
            }
            areas.push(a);
        }
        Ok(Self { edges, areas })
    }

    pub fn n_cells(&self) -> usize {
        self.areas.len()
    }

    pub fn dx(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn area(&self, i: usize) -> f64 {
        self.areas[i]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }
}

/// Evolving fields: the mesh itself never changes between steps.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub time: f64,
    pub step_index: u64,
    /// Index of the next van der Corput draw.
    pub omega_index: u64,
    pub cells: Vec<ConservativeState>,
}

impl SimulationState {
    pub fn new(cells: Vec<ConservativeState>, seed_offset: u64) -> Self {
        Self {
            time: 0.0,
            step_index: 0,
            omega_index: seed_offset,
            cells,
        }
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub dt: f64,
    /// Sampling point used by the remap.
    pub omega: f64,
    pub max_signal_speed: f64,
    /// Number of edges resolved as moving contacts.
    pub lagrange_edges: usize,
    /// Two moving edges share a cell somewhere (the step limiter keeps this
    /// safe, but it signals contacts closing in on each other).
    pub adjacent_moving_edges: bool,
    /// Same-fluid edges whose invariant transport was choked this step and
    /// which degraded to the direct linearized flux.
    pub choked_fallback_edges: usize,
    /// Absolute change of total (mass, energy, fraction mass) across the
    /// volume update after accounting for boundary fluxes. Exactly zero in
    /// exact arithmetic only when every edge flux pair agrees (constant
    /// cross-section or stationary flow); reported, never silently dropped.
    pub conservation_defect: [f64; 3],
    /// Cells whose state was copied from a neighbour by the remap.
    pub shifted_cells: usize,
}

/// Van der Corput point `n` in base 5 with digit scrambling `d -> 3d mod 5`.
/// The sequence equidistributes on (0, 1) while starting 0.6, 0.2, 0.8, 0.4,
/// 0.12, ... — alternating above and below 1/2, which keeps the sampled
/// contact position statistically centred from the first steps.
pub fn van_der_corput(mut n: u64) -> f64 {
    // Accumulate the exact rational numerator/denominator and divide once,
    // so every term is the correctly rounded value of its decimal expansion
    // (e.g. n=1 gives exactly 0.6, not 3*0.2).
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    while n > 0 {
        num = num * 5 + (3 * (n as u128 % 5)) % 5;
        den *= 5;
        n /= 5;
    }
    num as f64 / den as f64
}

/// Resolves all `n + 1` edges. Boundary edges pair the outermost cell with
/// itself, which makes the boundaries transmissive.
pub fn solve_edges(prims: &[PrimitiveState], eos: &EosParams) -> Result<Vec<InterfaceSolution>> {
    let n = prims.len();
    let mut sols = Vec::with_capacity(n + 1);
    sols.push(
        solve_interface(&prims[0], &prims[0], eos).map_err(|e| e.at("edge 0 (boundary)"))?,
    );
    for j in 1..n {
        sols.push(
            solve_interface(&prims[j - 1], &prims[j], eos)
                .map_err(|e| e.at(format!("edge {j}")))?,
        );
    }
    sols.push(
        solve_interface(&prims[n - 1], &prims[n - 1], eos)
            .map_err(|e| e.at(format!("edge {n} (boundary)")))?,
    );
    Ok(sols)
}

/// Acoustic CFL bound, additionally capped so every moving edge travels at
/// most half of each neighbouring cell.
pub fn compute_dt(
    mesh: &Mesh,
    prims: &[PrimitiveState],
    velocities: &[f64],
    cfl: f64,
    dt_cap: Option<f64>,
    eos: &EosParams,
) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(SimError::Config(format!("cfl = {cfl} must lie in (0, 1]")));
    }
    let mut dt = f64::INFINITY;
    for (i, y) in prims.iter().enumerate() {
        let c = eos.sound_speed(y.rho, y.p, y.phi)?;
        dt = dt.min(cfl * mesh.dx(i) / (y.u.abs() + c));
    }
    for (j, &v) in velocities.iter().enumerate() {
        if v != 0.0 {
            let dx_l = if j > 0 { mesh.dx(j - 1) } else { mesh.dx(j) };
            let dx_r = if j < mesh.n_cells() { mesh.dx(j) } else { mesh.dx(j - 1) };
            dt = dt.min(0.5 * dx_l.min(dx_r) / v.abs());
        }
    }
    if let Some(cap) = dt_cap {
        dt = dt.min(cap);
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SimError::TimeStep(format!("step size collapsed to {dt}")));
    }
    Ok(dt)
}

/// Integrates every cell between its moved edges. Returns the states on the
/// deformed cells together with the deformed cell widths.
pub fn ale_update(
    cells: &[ConservativeState],
    mesh: &Mesh,
    sols: &[InterfaceSolution],
    dt: f64,
) -> Result<(Vec<ConservativeState>, Vec<f64>)> {
    let n = cells.len();
    let mut new_cells = Vec::with_capacity(n);
    let mut new_dx = Vec::with_capacity(n);
    for i in 0..n {
        let (left, right) = (&sols[i], &sols[i + 1]);
        let dx = mesh.dx(i);
        let dxn = dx + dt * (right.v - left.v);
        if !(dxn > 1e-12 * dx) {
            return Err(SimError::TimeStep(format!(
                "cell {i} collapsed: width {dx:.3e} -> {dxn:.3e}"
            )));
        }
        let w = cells[i].as_array();
        let mut wn = [0.0; 5];
        for k in 0..5 {
            wn[k] = (dx * w[k] - dt * (right.flux_minus[k] - left.flux_plus[k])) / dxn;
        }
        // A moving edge that separates from the area step leaves that step
        // inside the growing cell; the momentum-flux jump across the standing
        // wave is exactly the wall force the plain flux difference misses.
        let mut corr = 0.0;
        if right.v > 0.0 {
            corr += right.momentum_correction;
        }
        if left.v < 0.0 {
            corr += left.momentum_correction;
        }
        wn[1] -= dt * corr / dxn;
        new_cells.push(ConservativeState::from_array(wn));
        new_dx.push(dxn);
    }
    Ok((new_cells, new_dx))
}

/// Returns to the fixed mesh by Glimm sampling: with sampling point `omega`,
/// cell `i` adopts the left neighbour's updated state if the left edge moved
/// far enough right, the right neighbour's if that edge moved far enough
/// left, and otherwise keeps its own updated state.
pub fn glimm_remap(
    pre: &[ConservativeState],
    mesh: &Mesh,
    velocities: &[f64],
    dt: f64,
    omega: f64,
) -> (Vec<ConservativeState>, usize) {
    let n = pre.len();
    let mut out = Vec::with_capacity(n);
    let mut shifted = 0;
    for i in 0..n {
        let dx = mesh.dx(i);
        let from_left = omega < dt / dx * velocities[i].max(0.0);
        let from_right = omega > 1.0 + dt / dx * velocities[i + 1].min(0.0);
        if from_left && i > 0 {
            out.push(pre[i - 1]);
            shifted += 1;
        } else if from_right && i + 1 < n {
            out.push(pre[i + 1]);
            shifted += 1;
        } else {
            out.push(pre[i]);
        }
    }
    (out, shifted)
}

/// Advances the state by one step; `dt_cap` clips the step (used to land
/// exactly on an output time).
pub fn step(
    state: &mut SimulationState,
    mesh: &Mesh,
    cfl: f64,
    eos: &EosParams,
    dt_cap: Option<f64>,
) -> Result<StepReport> {
    let n = state.cells.len();
    if n != mesh.n_cells() {
        return Err(SimError::GridMismatch(format!(
            "{n} cells on a {}-cell mesh",
            mesh.n_cells()
        )));
    }
    let mut prims = Vec::with_capacity(n);
    for (i, w) in state.cells.iter().enumerate() {
        prims.push(cons_to_prim(w, eos).map_err(|e| e.at(format!("cell {i}")))?);
    }
    let sols = solve_edges(&prims, eos)?;
    let velocities: Vec<f64> = sols.iter().map(|s| s.v).collect();
    let dt = compute_dt(mesh, &prims, &velocities, cfl, dt_cap, eos)?;

    let mut max_signal = 0.0f64;
    for y in &prims {
        let c = eos.sound_speed(y.rho, y.p, y.phi)?;
        max_signal = max_signal.max(y.u.abs() + c);
    }
    let lagrange_edges = sols
        .iter()
        .filter(|s| s.kind == InterfaceKind::Lagrange)
        .count();
    let choked_fallback_edges = sols.iter().filter(|s| s.choked_fallback).count();
    let adjacent_moving_edges = velocities
        .windows(2)
        .any(|w| w[0] != 0.0 && w[1] != 0.0);

    let (pre, new_dx) = ale_update(&state.cells, mesh, &sols, dt)?;

    // Mass, energy and fraction-mass bookkeeping across the volume update
    // (momentum is excluded: the duct wall exchanges momentum with the flow).
    let mut defect = [0.0f64; 3];
    for (slot, k) in [(0usize, 0usize), (1, 2), (2, 3)] {
        let mut total = 0.0;
        for i in 0..n {
            total += new_dx[i] * pre[i].as_array()[k] - mesh.dx(i) * state.cells[i].as_array()[k];
        }
        total += dt * (sols[n].flux_minus[k] - sols[0].flux_plus[k]);
        defect[slot] = total.abs();
    }

    let omega = van_der_corput(state.omega_index);
    state.omega_index += 1;
    let (cells, shifted_cells) = glimm_remap(&pre, mesh, &velocities, dt, omega);

    state.cells = cells;
    state.time += dt;
    state.step_index += 1;
    Ok(StepReport {
        dt,
        omega,
        max_signal_speed: max_signal,
        lagrange_edges,
        adjacent_moving_edges,
        choked_fallback_edges,
        conservation_defect: defect,
        shifted_cells,
    })
}
