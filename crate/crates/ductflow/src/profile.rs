//! Spatial profiles on disk: one CSV row per cell, plus comparison norms.
//!
//! Values are written with `{:.16e}` (17 significant digits), so reading a
//! profile back reproduces every `f64` bit-for-bit and re-running a
//! deterministic simulation reproduces the file byte-for-byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Result, SimError};

pub const PROFILE_HEADER: &str = "x,rho,u,p,phi,a,e,s,mach";

/// Tolerance below which a mass fraction counts as pure (0 or 1) when
/// tallying smeared interface cells.
pub const PHI_PURITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub phi: f64,
    pub a: f64,
    /// Specific internal energy.
    pub e: f64,
    /// Pseudo-entropy (p + pi(phi)) / rho^gamma(phi).
    pub s: f64,
    pub mach: f64,
}

impl ProfileRow {
    fn fields(&self) -> [f64; 9] {
        [
            self.x, self.rho, self.u, self.p, self.phi, self.a, self.e, self.s, self.mach,
        ]
    }
}

pub fn profile_to_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 200 + 64);
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row.fields() {
            if !first {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String cannot fail");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_profile(path: impl AsRef<Path>, rows: &[ProfileRow]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, profile_to_csv(rows)).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_profile(path: impl AsRef<Path>) -> Result<Vec<ProfileRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_profile(&text).map_err(|msg| SimError::Config(format!("{}: {msg}", path.display())))
}

fn parse_profile(text: &str) -> std::result::Result<Vec<ProfileRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PROFILE_HEADER => {}
        other => {
            return Err(format!(
                "expected header '{PROFILE_HEADER}', got {other:?}"
            ))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut vals = [0.0; 9];
        let mut count = 0;
        for (slot, field) in vals.iter_mut().zip(line.split(',')) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| format!("row {}: cannot parse '{field}'", i + 1))?;
            count += 1;
        }
        if count != 9 || line.split(',').count() != 9 {
            return Err(format!(
                "row {}: expected 9 fields, got {}",
                i + 1,
                line.split(',').count()
            ));
        }
        rows.push(ProfileRow {
            x: vals[0],
            rho: vals[1],
            u: vals[2],
            p: vals[3],
            phi: vals[4],
            a: vals[5],
            e: vals[6],
            s: vals[7],
            mach: vals[8],
        });
    }
    Ok(rows)
}

/// Discrete error norms of `b - a`, each normalized by the larger of the two
/// profiles' own norms (so 0.02 means "2% relative").
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ColumnStats {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

fn column_stats(a: &[f64], b: &[f64]) -> ColumnStats {
    let mut d1 = 0.0_f64;
    let mut d2 = 0.0_f64;
    let mut dinf = 0.0_f64;
    let mut n1 = 0.0_f64;
    let mut n2 = 0.0_f64;
    let mut ninf = 0.0_f64;
    for (&x, &y) in a.iter().zip(b) {
        let d = (y - x).abs();
        d1 += d;
        d2 += d * d;
        dinf = dinf.max(d);
        n1 += x.abs().max(y.abs());
        n2 += x.mul_add(x, 0.0).max(y * y);
        ninf = ninf.max(x.abs()).max(y.abs());
    }
    let guard = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    ColumnStats {
        l1: guard(d1, n1),
        l2: guard(d2.sqrt(), n2.sqrt()),
        linf: guard(dinf, ninf),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub n_rows: usize,
    pub rho: ColumnStats,
    pub u: ColumnStats,
    pub p: ColumnStats,
    pub phi: ColumnStats,
    /// Cells in each profile whose mass fraction is neither 0 nor 1
    /// (within [`PHI_PURITY_TOL`]).
    pub phi_intermediate_a: usize,
    pub phi_intermediate_b: usize,
}

impl CompareReport {
    pub fn summary(&self) -> String {
        let lines = [
            ("rho", self.rho),
            ("u", self.u),
            ("p", self.p),
            ("phi", self.phi),
        ]
        .map(|(name, s)| {
            format!(
                "{name:>4}  l1 {:>12.5e}  l2 {:>12.5e}  linf {:>12.5e}",
                s.l1, s.l2, s.linf
            )
        });
        format!(
            "{} rows compared\n{}\nintermediate phi cells: {} vs {}",
            self.n_rows,
            lines.join("\n"),
            self.phi_intermediate_a,
            self.phi_intermediate_b
        )
    }
}

pub fn count_phi_intermediate(phi: impl IntoIterator<Item = f64>) -> usize {
    phi.into_iter()
        .filter(|v| v.abs() > PHI_PURITY_TOL && (v - 1.0).abs() > PHI_PURITY_TOL)
        .count()
}

pub fn compare(a: &[ProfileRow], b: &[ProfileRow]) -> Result<CompareReport> {
    if a.len() != b.len() {
        return Err(SimError::GridMismatch(format!(
            "profiles have {} and {} rows",
            a.len(),
            b.len()
        )));
    }
    let span = a
        .iter()
        .map(|r| r.x.abs())
        .fold(1e-300, f64::max);
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        if (ra.x - rb.x).abs() > 1e-9 * span {
            return Err(SimError::GridMismatch(format!(
                "row {i}: x = {} vs {}",
                ra.x, rb.x
            )));
        }
    }
    let col = |f: fn(&ProfileRow) -> f64| {
        let xa: Vec<f64> = a.iter().map(f).collect();
        let xb: Vec<f64> = b.iter().map(f).collect();
        column_stats(&xa, &xb)
    };
    Ok(CompareReport {
        n_rows: a.len(),
        rho: col(|r| r.rho),
        u: col(|r| r.u),
        p: col(|r| r.p),
        phi: col(|r| r.phi),
        phi_intermediate_a: count_phi_intermediate(a.iter().map(|r| r.phi)),
        phi_intermediate_b: count_phi_intermediate(b.iter().map(|r| r.phi)),
    })
}
