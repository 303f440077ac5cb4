//! Problem specification files.

use serde::{Deserialize, Serialize};

use crate::construct::{
    ay_plan, cw_run, jacka_plan, reversed_ay_plan, vallois_eps_plan, EmbeddingPlan, Tangent,
};
use crate::error::Result;
use crate::measure::AtomicMeasure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstruction", into = "RawConstruction")]
pub enum Construction {
    AzemaYor,
    ReversedAzemaYor,
    Jacka,
    Vallois { eps: f64, max_steps: usize },
    Custom { tangents: Vec<Tangent>, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    AzemaYor,
    ReversedAzemaYor,
    Jacka,
    Vallois,
    Custom,
}

/// Flat wire form, so that field errors keep their JSON path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstruction {
    #[serde(rename = "type")]
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tangents: Option<Vec<Tangent>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
}

impl TryFrom<RawConstruction> for Construction {
    type Error = String;

    fn try_from(r: RawConstruction) -> std::result::Result<Self, String> {
        let need = |name: &str| format!("missing field `{name}`");
        let extra = r.eps.is_some() as u8
            + r.max_steps.is_some() as u8
            + r.tangents.is_some() as u8
            + r.c.is_some() as u8;
        let c = match r.kind {
            Kind::AzemaYor => Construction::AzemaYor,
            Kind::ReversedAzemaYor => Construction::ReversedAzemaYor,
            Kind::Jacka => Construction::Jacka,
            Kind::Vallois => Construction::Vallois {
                eps: r.eps.ok_or_else(|| need("eps"))?,
                max_steps: r.max_steps.ok_or_else(|| need("max_steps"))?,
            },
            Kind::Custom => Construction::Custom {
                tangents: r.tangents.ok_or_else(|| need("tangents"))?,
                c: r.c.ok_or_else(|| need("C"))?,
            },
        };
        let used = match c {
            Construction::Vallois { .. } | Construction::Custom { .. } => 2,
            _ => 0,
        };
        if extra != used {
            return Err(format!(
                "unexpected parameters for construction {:?}",
                r.kind
            ));
        }
        Ok(c)
    }
}

impl From<Construction> for RawConstruction {
    fn from(c: Construction) -> Self {
        let mut r = RawConstruction {
            kind: Kind::AzemaYor,
            eps: None,
            max_steps: None,
            tangents: None,
            c: None,
        };
        match c {
            Construction::AzemaYor => {}
            Construction::ReversedAzemaYor => r.kind = Kind::ReversedAzemaYor,
            Construction::Jacka => r.kind = Kind::Jacka,
            Construction::Vallois { eps, max_steps } => {
                r.kind = Kind::Vallois;
                r.eps = Some(eps);
                r.max_steps = Some(max_steps);
            }
            Construction::Custom { tangents, c } => {
                r.kind = Kind::Custom;
                r.tangents = Some(tangents);
                r.c = Some(c);
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulation {
    pub n_paths: usize,
    pub seed: u64,
    /// Empty means the default grid `{2, 4, 8}·span`.
    pub gammas: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl Default for Simulation {
    fn default() -> Self {
        Simulation {
            n_paths: 100_000,
            seed: 0,
            gammas: Vec::new(),
            thresholds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(deserialize_with = "probability")]
    pub mu0: AtomicMeasure,
    #[serde(deserialize_with = "probability")]
    pub mu: AtomicMeasure,
    #[serde(default = "default_construction")]
    pub construction: Construction,
    #[serde(default)]
    pub simulation: Simulation,
}

fn probability<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<AtomicMeasure, D::Error> {
    let m = AtomicMeasure::deserialize(d)?;
    m.require_probability().map_err(serde::de::Error::custom)?;
    Ok(m)
}

fn default_construction() -> Construction {
    Construction::AzemaYor
}

/// A JSON input that failed to parse, with its location.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)?;
        if !self.path.is_empty() && self.path != "." {
            write!(f, ", at `{}`", self.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(
    s: &str,
) -> std::result::Result<T, ParseError> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            path,
            line: inner.line(),
            column: inner.column(),
            message: strip_location(&inner.to_string()),
        }
    })
}

/// serde_json appends " at line L column C"; the location is reported
/// separately.
fn strip_location(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

impl ProblemSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        parse_json(s)
    }

    /// Larger of the largest atom magnitude in either law, or 1.
    pub fn span(&self) -> f64 {
        let m = self
            .mu0
            .positions()
            .chain(self.mu.positions())
            .fold(0.0, |m: f64, x| m.max(x.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    pub fn gammas(&self) -> Vec<f64> {
        if self.simulation.gammas.is_empty() {
            [2.0, 4.0, 8.0].iter().map(|g| g * self.span()).collect()
        } else {
            self.simulation.gammas.clone()
        }
    }

    pub fn build(&self) -> Result<EmbeddingPlan> {
        let (m0, m) = (&self.mu0, &self.mu);
        match &self.construction {
            Construction::AzemaYor => ay_plan(m0, m),
            Construction::ReversedAzemaYor => reversed_ay_plan(m0, m),
            Construction::Jacka => jacka_plan(m0, m),
            Construction::Vallois { eps, max_steps } => vallois_eps_plan(m0, m, *eps, *max_steps),
            Construction::Custom { tangents, c } => cw_run(m0, tangents, m, *c),
        }
    }
}
