//! JSON scenario documents.
//!
//! ```json
//! {"atoms": [[0,0,0], [0.1,0,0]], "dipole": [0,0,1], "gamma_eg": 1.0, "delta_eg": 0.0, "initial": "e1"}
//! {"preset": "equilateral", "side": 0.1, "initial": "dicke"}
//! {"preset": "collinear", "x12": 0.1, "x23": 0.2, "eta": 1.5707963267948966}
//! ```
//!
//! Optional task blocks: `"detuning": {"min", "max", "points"}`,
//! `"times": {"tmax", "steps"}`, `"direction": [theta, phi]`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::InitialState;
use crate::error::{Error, Result};
use crate::geometry::{collinear_config, equilateral_config, AtomConfig, Vec3};
use crate::modes::ModelParams;

/// Dipoles within this distance of unit length are rescaled on load.
pub const DIPOLE_LOAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum InitialDoc {
    Named(String),
    Vector(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub tmax: f64,
    pub steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    atoms: Option<Vec<Vec3>>,
    dipole: Option<Vec3>,
    preset: Option<String>,
    side: Option<f64>,
    x12: Option<f64>,
    x23: Option<f64>,
    eta: Option<f64>,
    gamma_eg: Option<f64>,
    delta_eg: Option<f64>,
    initial: Option<InitialDoc>,
    detuning: Option<GridSpec>,
    times: Option<TimeSpec>,
    direction: Option<[f64; 2]>,
}

/// Requested initial amplitudes, resolved against the atom count later.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// `e1`, `e2`, …: a single excited atom (1-based).
    Excited(usize),
    Dicke,
    Explicit(Vec<Complex64>),
}

impl InitialSpec {
    pub fn parse_name(name: &str) -> Option<Self> {
        if name == "dicke" {
            return Some(InitialSpec::Dicke);
        }
        let k: usize = name.strip_prefix('e')?.parse().ok()?;
        (k >= 1).then_some(InitialSpec::Excited(k))
    }

    pub fn resolve(&self, n: usize) -> Result<InitialState> {
        match self {
            InitialSpec::Excited(k) if *k <= n => InitialState::excited(n, k - 1),
            InitialSpec::Excited(k) => Err(Error::Scenario {
                path: "initial".into(),
                message: format!("e{k} requested for {n} atoms"),
            }),
            InitialSpec::Dicke => Ok(InitialState::dicke(n)),
            InitialSpec::Explicit(v) if v.len() != n => Err(Error::Scenario {
                path: "initial".into(),
                message: format!("{} amplitudes given for {n} atoms", v.len()),
            }),
            InitialSpec::Explicit(v) => InitialState::new(v.clone()).map_err(|e| Error::Scenario {
                path: "initial".into(),
                message: e.to_string(),
            }),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            InitialSpec::Excited(k) => json!(format!("e{k}")),
            InitialSpec::Dicke => json!("dicke"),
            InitialSpec::Explicit(v) => json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: AtomConfig,
    pub params: ModelParams,
    pub initial: InitialSpec,
    pub detuning: Option<GridSpec>,
    pub times: Option<TimeSpec>,
    pub direction: Option<[f64; 2]>,
}

impl Scenario {
    pub fn new(config: AtomConfig) -> Self {
        Scenario {
            config,
            params: ModelParams::default(),
            initial: InitialSpec::Excited(1),
            detuning: None,
            times: None,
            direction: None,
        }
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        self.initial.resolve(self.config.len())
    }

    /// Explicit-atoms form; parses back to an equivalent scenario.
    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "atoms": self.config.positions(),
            "dipole": self.config.dipole(),
            "gamma_eg": self.params.gamma_eg,
            "delta_eg": self.params.delta_eg,
            "initial": self.initial.to_json(),
        });
        let obj = doc.as_object_mut().expect("object literal");
        if let Some(d) = self.detuning {
            obj.insert("detuning".into(), json!(d));
        }
        if let Some(t) = self.times {
            obj.insert("times".into(), json!(t));
        }
        if let Some(dir) = self.direction {
            obj.insert("direction".into(), json!(dir));
        }
        doc
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_scenario(&text)
    }
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::Scenario {
        path: path.into(),
        message: message.into(),
    }
}

fn required(value: Option<f64>, path: &str) -> Result<f64> {
    value.ok_or_else(|| invalid(path, "missing field"))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(&path, e.into_inner().to_string())
    })?;

    let config = match (doc.preset.as_deref(), doc.atoms) {
        (Some(_), Some(_)) => return Err(invalid("preset", "give either `preset` or `atoms`, not both")),
        (None, None) => return Err(invalid(".", "missing `atoms` or `preset`")),
        (None, Some(atoms)) => {
            let dipole = doc.dipole.ok_or_else(|| invalid("dipole", "missing field"))?;
            for key in [("side", doc.side), ("x12", doc.x12), ("x23", doc.x23), ("eta", doc.eta)] {
                if key.1.is_some() {
                    return Err(invalid(key.0, "only valid together with `preset`"));
                }
            }
            AtomConfig::with_normalized_dipole(atoms, dipole, DIPOLE_LOAD_TOL)
                .map_err(|e| invalid("atoms", e.to_string()))?
        }
        (Some("equilateral"), None) => {
            if doc.dipole.is_some() || doc.x12.is_some() || doc.x23.is_some() || doc.eta.is_some() {
                return Err(invalid("preset", "equilateral preset takes only `side`"));
            }
            equilateral_config(required(doc.side, "side")?).map_err(|e| invalid("side", e.to_string()))?
        }
        (Some("collinear"), None) => {
            if doc.dipole.is_some() || doc.side.is_some() {
                return Err(invalid("preset", "collinear preset takes only `x12`, `x23`, `eta`"));
            }
            collinear_config(
                required(doc.x12, "x12")?,
                required(doc.x23, "x23")?,
                required(doc.eta, "eta")?,
            )
            .map_err(|e| invalid("preset", e.to_string()))?
        }
        (Some(other), None) => return Err(invalid("preset", format!("unknown preset `{other}`"))),
    };

    let params = ModelParams::new(doc.gamma_eg.unwrap_or(1.0), doc.delta_eg.unwrap_or(0.0))
        .map_err(|e| invalid("gamma_eg", e.to_string()))?;

    let initial = match doc.initial {
        None => InitialSpec::Excited(1),
        Some(InitialDoc::Named(name)) => {
            InitialSpec::parse_name(&name).ok_or_else(|| invalid("initial", format!("unknown preset `{name}`")))?
        }
        Some(InitialDoc::Vector(v)) => {
            InitialSpec::Explicit(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        }
    };
    let scenario = Scenario {
        config,
        params,
        initial,
        detuning: doc.detuning,
        times: doc.times,
        direction: doc.direction,
    };
    scenario.initial_state()?;
    Ok(scenario)
}

/// An initial state given on the command line: a preset name or a path to a
/// JSON array of `[re, im]` pairs.
pub fn parse_initial_arg(arg: &str) -> Result<InitialSpec> {
    if let Some(spec) = InitialSpec::parse_name(arg) {
        return Ok(spec);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| invalid("initial", e.to_string()))?;
    Ok(InitialSpec::Explicit(
        pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
    ))
}
