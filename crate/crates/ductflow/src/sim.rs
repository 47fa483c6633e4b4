//! Whole-run orchestration: build a problem from a [`RunConfig`], march it to
//! a target time, and write the CSV artefacts the CLI exposes.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{AreaProfile, FlowSpec, InitialCondition, RunConfig};
use crate::eos::EosParams;
use crate::error::{Result, SimError};
use crate::exact;
use crate::profile::ProfileRow;
use crate::scheme::{step, Mesh, SimulationState, StepReport};
use crate::state::{cons_to_prim, prim_to_cons, stationary_transport, ConservativeState, PrimitiveState};

/// A run that stays within this relative drift over the checked steps counts
/// as a preserved steady state.
pub const WB_DRIFT_TOL: f64 = 1e-10;

/// Hard cap on steps per run; the CFL limiter makes runaway loops a config
/// problem (e.g. a vanishing signal speed), not something to wait out.
const MAX_STEPS: u64 = 10_000_000;

pub const STEPS_HEADER: &str = "step,time,dt,omega,max_signal_speed,lagrange_edges,adjacent_moving_edges,choked_fallback_edges,shifted_cells,defect_mass,defect_energy,defect_fraction";

pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh> {
    let area = cfg.area;
    Mesh::uniform(cfg.x_min, cfg.x_max, cfg.n_cells, move |x| area.eval(x))
}

fn spec_to_prim(spec: &FlowSpec, a: f64, eos: &EosParams) -> Result<PrimitiveState> {
    Ok(PrimitiveState {
        rho: spec.rho,
        u: spec.u,
        p: spec.p,
        phi: eos.clamp_phi(spec.phi)?,
        a,
    })
}

pub fn build_initial_state(cfg: &RunConfig, mesh: &Mesh) -> Result<Vec<ConservativeState>> {
    let eos = &cfg.eos;
    let mut cells = Vec::with_capacity(mesh.n_cells());
    match cfg.init {
        InitialCondition::Riemann { x0, left, right } => {
            for i in 0..mesh.n_cells() {
                let spec = if mesh.center(i) < x0 { &left } else { &right };
                let y = spec_to_prim(spec, mesh.area(i), eos)?;
                cells.push(prim_to_cons(&y, eos).map_err(|e| e.at(format!("cell {i}")))?);
            }
        }
        InitialCondition::Stationary {
            base,
            reference_area,
        } => {
            let y0 = spec_to_prim(&base, reference_area, eos)?;
            for i in 0..mesh.n_cells() {
                let y = stationary_transport(&y0, mesh.area(i), eos)
                    .map_err(|e| e.at(format!("cell {i}")))?;
                cells.push(prim_to_cons(&y, eos).map_err(|e| e.at(format!("cell {i}")))?);
            }
        }
    }
    Ok(cells)
}

#[derive(Debug)]
pub struct RunOutput {
    pub mesh: Mesh,
    pub state: SimulationState,
    pub reports: Vec<StepReport>,
}

/// Marches `state` until `t_target`, clipping the last step to land on it
/// exactly.
pub fn advance_to(
    state: &mut SimulationState,
    mesh: &Mesh,
    cfg: &RunConfig,
    t_target: f64,
    reports: &mut Vec<StepReport>,
) -> Result<()> {
    let scale = t_target.abs().max(state.time.abs()).max(f64::MIN_POSITIVE);
    while state.time < t_target - 1e-12 * scale {
        if state.step_index >= MAX_STEPS {
            return Err(SimError::TimeStep(format!(
                "exceeded {MAX_STEPS} steps before reaching t = {t_target}"
            )));
        }
        let cap = t_target - state.time;
        reports.push(step(state, mesh, cfg.cfl, &cfg.eos, Some(cap))?);
    }
    state.time = t_target;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let mesh = build_mesh(cfg)?;
    let cells = build_initial_state(cfg, &mesh)?;
    let mut state = SimulationState::new(cells, cfg.seed_offset);
    let mut reports = Vec::new();
    advance_to(&mut state, &mesh, cfg, cfg.t_final, &mut reports)?;
    Ok(RunOutput {
        mesh,
        state,
        reports,
    })
}

fn prim_to_row(y: &PrimitiveState, x: f64, eos: &EosParams) -> Result<ProfileRow> {
    let e = eos.internal_energy(y.rho, y.p, y.phi)?;
    let s = eos.entropy(y.rho, y.p, y.phi)?;
    let c = eos.sound_speed(y.rho, y.p, y.phi)?;
    Ok(ProfileRow {
        x,
        rho: y.rho,
        u: y.u,
        p: y.p,
        phi: y.phi,
        a: y.a,
        e,
        s,
        mach: y.u / c,
    })
}

pub fn state_to_rows(
    cells: &[ConservativeState],
    mesh: &Mesh,
    eos: &EosParams,
) -> Result<Vec<ProfileRow>> {
    if cells.len() != mesh.n_cells() {
        return Err(SimError::GridMismatch(format!(
            "{} cells on a {}-cell mesh",
            cells.len(),
            mesh.n_cells()
        )));
    }
    cells
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let y = cons_to_prim(w, eos).map_err(|e| e.at(format!("cell {i}")))?;
            prim_to_row(&y, mesh.center(i), eos)
        })
        .collect()
}

/// Samples the closed-form solution of the configured two-state problem at
/// time `t` on `n_samples` equispaced points. At `t <= 0` this echoes the
/// initial data.
pub fn exact_rows(cfg: &RunConfig, t: f64, n_samples: usize) -> Result<Vec<ProfileRow>> {
    let InitialCondition::Riemann { x0, left, right } = cfg.init else {
        return Err(SimError::Config(
            "the closed-form solution needs a two-state (riemann) initial condition".into(),
        ));
    };
    let (a_l, a_r) = match cfg.area {
        AreaProfile::Constant(a) => (a, a),
        AreaProfile::Jump {
            x0: ax0,
            left,
            right,
        } => {
            let span = (cfg.x_max - cfg.x_min).abs();
            if (ax0 - x0).abs() > 1e-12 * span {
                return Err(SimError::Config(format!(
                    "cross-section jump at {ax0} must coincide with the initial discontinuity at {x0}"
                )));
            }
            (left, right)
        }
    };
    let eos = &cfg.eos;
    let y_l = spec_to_prim(&left, a_l, eos)?;
    let y_r = spec_to_prim(&right, a_r, eos)?;
    let n = n_samples.max(2);
    let dx = (cfg.x_max - cfg.x_min) / n as f64;
    let solution = if t > 0.0 {
        Some(exact::solve(&y_l, &y_r, eos)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let x = cfg.x_min + (i as f64 + 0.5) * dx;
        let y = match &solution {
            Some(sol) => sol.sample((x - x0) / t),
            None => {
                if x < x0 {
                    y_l
                } else {
                    y_r
                }
            }
        };
        rows.push(prim_to_row(&y, x, eos)?);
    }
    Ok(rows)
}

pub fn steps_to_csv(reports: &[StepReport]) -> String {
    let mut out = String::with_capacity(reports.len() * 220 + 64);
    out.push_str(STEPS_HEADER);
    out.push('\n');
    let mut time = 0.0f64;
    for (i, r) in reports.iter().enumerate() {
        time += r.dt;
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{:.16e},{:.16e},{:.16e}",
            i + 1,
            time,
            r.dt,
            r.omega,
            r.max_signal_speed,
            r.lagrange_edges,
            r.adjacent_moving_edges as u8,
            r.choked_fallback_edges,
            r.shifted_cells,
            r.conservation_defect[0],
            r.conservation_defect[1],
            r.conservation_defect[2],
        )
        .expect("writing to a String cannot fail");
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `profile.csv` and `steps.csv` (and optionally `plot.py`) into `dir`.
pub fn write_run_outputs(dir: &Path, out: &RunOutput, eos: &EosParams, plot_script: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let rows = state_to_rows(&out.state.cells, &out.mesh, eos)?;
    crate::profile::write_profile(dir.join("profile.csv"), &rows)?;
    write_text(&dir.join("steps.csv"), &steps_to_csv(&out.reports))?;
    if plot_script {
        write_text(&dir.join("plot.py"), PLOT_SCRIPT)?;
    }
    Ok(())
}

/// Matplotlib companion dropped next to the CSV output on request; it plots
/// `profile.csv` against `exact.csv` when the latter exists.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot profile.csv (and exact.csv, if present) from this directory."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


here = os.path.dirname(os.path.abspath(__file__))
prof = load(os.path.join(here, "profile.csv"))
exact_path = os.path.join(here, "exact.csv")
exact = load(exact_path) if os.path.exists(exact_path) else None

fields = ["rho", "u", "p", "phi"]
fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
for ax, field in zip(axes.flat, fields):
    ax.plot(prof["x"], prof[field], "k.", markersize=2, label="computed")
    if exact is not None:
        ax.plot(exact["x"], exact[field], "r-", linewidth=1, label="reference")
    ax.set_ylabel(field)
    ax.grid(alpha=0.3)
axes.flat[0].legend(loc="best")
for ax in axes[-1]:
    ax.set_xlabel("x")
fig.tight_layout()
out = os.path.join(here, "profile.png")
fig.savefig(out, dpi=150)
print(out)
"#;

#[derive(Debug, Clone)]
pub struct WbReport {
    pub steps: usize,
    /// Largest relative change of any conserved component in any cell,
    /// normalized per component by its largest initial magnitude.
    pub max_drift: f64,
    pub component_drift: [f64; 5],
    pub pass: bool,
}

/// Runs `n_steps` unclipped steps and measures how far the state moves from
/// its initial data.
pub fn wb_check(cfg: &RunConfig, n_steps: usize) -> Result<WbReport> {
    let mesh = build_mesh(cfg)?;
    let initial = build_initial_state(cfg, &mesh)?;
    let mut state = SimulationState::new(initial.clone(), cfg.seed_offset);
    for _ in 0..n_steps {
        step(&mut state, &mesh, cfg.cfl, &cfg.eos, None)?;
    }
    let mut scale = [0.0f64; 5];
    for w in &initial {
        for (s, v) in scale.iter_mut().zip(w.as_array()) {
            *s = s.max(v.abs());
        }
    }
    let mut component_drift = [0.0f64; 5];
    for (w0, w1) in initial.iter().zip(&state.cells) {
        for k in 0..5 {
            let d = (w1.as_array()[k] - w0.as_array()[k]).abs();
            let s = scale[k].max(f64::MIN_POSITIVE);
            component_drift[k] = component_drift[k].max(d / s);
        }
    }
    let max_drift = component_drift.iter().copied().fold(0.0, f64::max);
    Ok(WbReport {
        steps: n_steps,
        max_drift,
        component_drift,
        pass: max_drift <= WB_DRIFT_TOL,
    })
}
