use serde_json::Value;
use std::path::Path;
use trophodge::fan::{bergman_fan, Fan};
use trophodge::matroid::Matroid;
use trophodge::polyhedral::PolyComplex;
use trophodge::tropcoh::CompactTropicalSpace;

/// Exit-code classes: input problems exit with 2, failed verifications with 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
}

impl CliError {
    pub fn input(e: impl ToString) -> CliError {
        CliError::Input(e.to_string())
    }
}

pub const CORPUS: [(&str, &str); 10] = [
    ("u23", include_str!("../corpus/u23.json")),
    ("u33", include_str!("../corpus/u33.json")),
    ("u34", include_str!("../corpus/u34.json")),
    ("k4-graphic", include_str!("../corpus/k4-graphic.json")),
    ("fano", include_str!("../corpus/fano.json")),
    ("tp1", include_str!("../corpus/tp1.json")),
    ("tp2", include_str!("../corpus/tp2.json")),
    ("tp1xtp1", include_str!("../corpus/tp1xtp1.json")),
    ("tp1-long-edge", include_str!("../corpus/tp1-long-edge.json")),
    ("square-complex", include_str!("../corpus/square-complex.json")),
];

/// Reads a JSON file, or a bundled corpus entry when no such file exists.
pub fn read_value(arg: &str) -> Result<Value, CliError> {
    let text = if Path::new(arg).exists() {
        std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    } else {
        let name = arg.strip_suffix(".json").unwrap_or(arg);
        CORPUS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| CliError::Input(format!("{arg}: no such file or corpus entry")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{arg}: malformed JSON: {e}")))
}

pub enum Input {
    Matroid(Matroid),
    Fan(Fan),
    Complex(PolyComplex),
}

impl Input {
    pub fn load(arg: &str) -> Result<Input, CliError> {
        let v = read_value(arg)?;
        if v.get("ground_set").is_some() {
            Matroid::from_json(&v).map(Input::Matroid).map_err(CliError::input)
        } else if v.get("lattice_rank").is_some() {
            Fan::from_json(&v).map(Input::Fan).map_err(CliError::input)
        } else if v.get("ambient_dim").is_some() {
            PolyComplex::from_json(&v).map(Input::Complex).map_err(CliError::input)
        } else {
            Err(CliError::Input(format!("{arg}: not a matroid, fan or complex")))
        }
    }

    pub fn matroid(&self) -> Result<&Matroid, CliError> {
        match self {
            Input::Matroid(m) => Ok(m),
            _ => Err(CliError::Input("a matroid is expected".into())),
        }
    }

    /// The fan itself, or the Bergman fan of a matroid.
    pub fn fan(&self) -> Result<Fan, CliError> {
        match self {
            Input::Matroid(m) => bergman_fan(m).map_err(CliError::input),
            Input::Fan(f) => Ok(f.clone()),
            Input::Complex(_) => Err(CliError::Input("a fan or matroid is expected".into())),
        }
    }

    pub fn complex(&self) -> Result<PolyComplex, CliError> {
        match self {
            Input::Complex(c) => Ok(c.clone()),
            _ => Ok(PolyComplex::from_fan(&self.fan()?)),
        }
    }

    /// Canonical compactification of the complex or fan.
    pub fn space(&self) -> Result<CompactTropicalSpace, CliError> {
        CompactTropicalSpace::compactify(&self.complex()?).map_err(CliError::input)
    }
}

/// Comma-separated indices, e.g. `0,2,5`.
pub fn parse_indices(s: &str) -> Result<Vec<usize>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Input(format!("bad index '{t}'")))).collect()
}
