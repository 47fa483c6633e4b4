//! Run configuration: a flat `key = value` file with `#` comments.
//!
//! All problems are described by the same small grammar (see the shipped
//! `configs/` directory for complete examples):
//!
//! ```text
//! domain.x_min = 0.4        time.t_final = 0.2
//! domain.x_max = 1.6        time.cfl     = 0.6
//! domain.n_cells = 2000     sampling.seed_offset = 1   # optional, default 1
//!
//! eos.gamma1 = 1.4          area.kind = jump           # or: constant
//! eos.pi1    = 0.0          area.x0   = 1.0            # constant: area.value
//! eos.gamma2 = 1.6          area.left = 1.5
//! eos.pi2    = 2.0          area.right = 1.0
//!
//! init.kind = riemann       # or: stationary
//! init.x0 = 1.0             # riemann: two states, jump at x0
//! init.left.rho = 2.0  init.left.u = 0.5   init.left.p = 1.0  init.left.phi = 1.0
//! init.right.rho = ... init.right.u = ...  init.right.p = ... init.right.phi = ...
//! # stationary: one state given at reference section init.a, continued
//! # through the duct: init.rho/u/p/phi and init.a
//! ```
//!
//! Every problem with the file is reported in one pass — unknown keys,
//! missing keys, and unparsable values all end up in the same error.

use std::collections::BTreeMap;
use std::path::Path;

use crate::eos::EosParams;
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaProfile {
    Constant(f64),
    Jump { x0: f64, left: f64, right: f64 },
}

impl AreaProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            AreaProfile::Constant(a) => a,
            AreaProfile::Jump { x0, left, right } => {
                if x < x0 {
                    left
                } else {
                    right
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Two uniform states separated at `x0`.
    Riemann {
        x0: f64,
        left: FlowSpec,
        right: FlowSpec,
    },
    /// One state specified at cross-section `reference_area`, continued onto
    /// every cell's cross-section along the standing-wave invariants.
    Stationary {
        base: FlowSpec,
        reference_area: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub t_final: f64,
    pub cfl: f64,
    pub seed_offset: u64,
    pub eos: EosParams,
    pub area: AreaProfile,
    pub init: InitialCondition,
}

struct Parser {
    entries: BTreeMap<String, String>,
    violations: Vec<String>,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut entries = BTreeMap::new();
        let mut violations = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    let key = key.trim().to_string();
                    if entries
                        .insert(key.clone(), value.trim().to_string())
                        .is_some()
                    {
                        violations.push(format!("line {}: duplicate key '{key}'", lineno + 1));
                    }
                }
                None => violations.push(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )),
            }
        }
        Self {
            entries,
            violations,
        }
    }

    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn required<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        match self.take_raw(key) {
            None => {
                self.violations.push(format!("missing key '{key}'"));
                None
            }
            Some(v) => match v.parse() {
                Ok(x) => Some(x),
                Err(_) => {
                    self.violations
                        .push(format!("key '{key}': cannot parse '{v}'"));
                    None
                }
            },
        }
    }

    fn optional<T: std::str::FromStr>(&mut self, key: &str, default: T) -> T {
        match self.take_raw(key) {
            None => default,
            Some(v) => match v.parse() {
                Ok(x) => x,
                Err(_) => {
                    self.violations
                        .push(format!("key '{key}': cannot parse '{v}'"));
                    default
                }
            },
        }
    }

    fn flow_spec(&mut self, prefix: &str) -> Option<FlowSpec> {
        let rho = self.required(&format!("{prefix}.rho"));
        let u = self.required(&format!("{prefix}.u"));
        let p = self.required(&format!("{prefix}.p"));
        let phi = self.required(&format!("{prefix}.phi"));
        Some(FlowSpec {
            rho: rho?,
            u: u?,
            p: p?,
            phi: phi?,
        })
    }

    fn check(&mut self, cond: bool, message: impl Into<String>) {
        if !cond {
            self.violations.push(message.into());
        }
    }
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser::new(text);

        let x_min: Option<f64> = p.required("domain.x_min");
        let x_max: Option<f64> = p.required("domain.x_max");
        let n_cells: Option<usize> = p.required("domain.n_cells");
        let t_final: Option<f64> = p.required("time.t_final");
        let cfl: Option<f64> = p.required("time.cfl");
        let seed_offset: u64 = p.optional("sampling.seed_offset", 1);

        let gamma1: Option<f64> = p.required("eos.gamma1");
        let pi1: Option<f64> = p.required("eos.pi1");
        let gamma2: Option<f64> = p.required("eos.gamma2");
        let pi2: Option<f64> = p.required("eos.pi2");

        let area = match p.take_raw("area.kind").as_deref() {
            Some("constant") => p.required("area.value").map(AreaProfile::Constant),
            Some("jump") => {
                let x0 = p.required("area.x0");
                let left = p.required("area.left");
                let right = p.required("area.right");
                match (x0, left, right) {
                    (Some(x0), Some(left), Some(right)) => {
                        Some(AreaProfile::Jump { x0, left, right })
                    }
                    _ => None,
                }
            }
            Some(other) => {
                p.violations.push(format!(
                    "key 'area.kind': expected 'constant' or 'jump', got '{other}'"
                ));
                None
            }
            None => {
                p.violations.push("missing key 'area.kind'".into());
                None
            }
        };

        let init = match p.take_raw("init.kind").as_deref() {
            Some("riemann") => {
                let x0 = p.required("init.x0");
                let left = p.flow_spec("init.left");
                let right = p.flow_spec("init.right");
                match (x0, left, right) {
                    (Some(x0), Some(left), Some(right)) => {
                        Some(InitialCondition::Riemann { x0, left, right })
                    }
                    _ => None,
                }
            }
            Some("stationary") => {
                let base = p.flow_spec("init");
                let a = p.required("init.a");
                match (base, a) {
                    (Some(base), Some(reference_area)) => Some(InitialCondition::Stationary {
                        base,
                        reference_area,
                    }),
                    _ => None,
                }
            }
            Some(other) => {
                p.violations.push(format!(
                    "key 'init.kind': expected 'riemann' or 'stationary', got '{other}'"
                ));
                None
            }
            None => {
                p.violations.push("missing key 'init.kind'".into());
                None
            }
        };

        if let (Some(lo), Some(hi)) = (x_min, x_max) {
            p.check(hi > lo, format!("domain [{lo}, {hi}] is empty"));
        }
        if let Some(n) = n_cells {
            p.check(n >= 3, format!("domain.n_cells = {n} is below the minimum of 3"));
        }
        if let Some(t) = t_final {
            p.check(t >= 0.0 && t.is_finite(), format!("time.t_final = {t} is invalid"));
        }
        if let Some(c) = cfl {
            p.check(
                c > 0.0 && c <= 1.0,
                format!("time.cfl = {c} must lie in (0, 1]"),
            );
        }

        let eos = match (gamma1, pi1, gamma2, pi2) {
            (Some(g1), Some(q1), Some(g2), Some(q2)) => match EosParams::new(g1, q1, g2, q2) {
                Ok(e) => Some(e),
                Err(e) => {
                    p.violations.push(format!("eos: {e}"));
                    None
                }
            },
            _ => None,
        };

        for key in p.entries.keys() {
            p.violations.push(format!("unknown key '{key}'"));
        }
        if !p.violations.is_empty() {
            return Err(SimError::Config(p.violations.join("; ")));
        }

        Ok(RunConfig {
            x_min: x_min.unwrap(),
            x_max: x_max.unwrap(),
            n_cells: n_cells.unwrap(),
            t_final: t_final.unwrap(),
            cfl: cfl.unwrap(),
            seed_offset,
            eos: eos.unwrap(),
            area: area.unwrap(),
            init: init.unwrap(),
        })
    }
}
