//! Reading states, observables and maps from JSON files.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qhc_core::{
    CMatrix, ClassicalObservable, Condition, DensityMatrix, IndexMap, ProbabilityState,
    QuantumObservable, Violation,
};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// A file's contents, classified by its top-level key but not yet validated.
#[derive(Debug, Clone)]
pub enum Input {
    State(Vec<f64>),
    Values(Vec<f64>),
    Matrix(RawMatrix),
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct RawState {
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawValues {
    values: Vec<f64>,
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::State(_) => "state",
            Input::Values(_) => "observable",
            Input::Matrix(_) => "matrix",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Input::State(p) => p.len(),
            Input::Values(v) => v.len(),
            Input::Matrix(m) => m.dim,
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn shape_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse(format!("{}: {e}", path.display()))
}

pub fn load(path: &Path) -> Result<Input, CliError> {
    let value = read_json(path)?;
    let has = |key: &str| value.get(key).is_some();
    if has("probs") {
        let raw: RawState = serde_json::from_value(value).map_err(|e| shape_error(path, e))?;
        Ok(Input::State(raw.probs))
    } else if has("values") {
        let raw: RawValues = serde_json::from_value(value).map_err(|e| shape_error(path, e))?;
        Ok(Input::Values(raw.values))
    } else if has("entries") {
        let raw: RawMatrix = serde_json::from_value(value).map_err(|e| shape_error(path, e))?;
        Ok(Input::Matrix(raw))
    } else {
        Err(CliError::Parse(format!(
            "{}: expected an object with \"probs\", \"values\" or \"entries\"",
            path.display()
        )))
    }
}

pub fn load_map(path: &Path) -> Result<IndexMap, CliError> {
    let value = read_json(path)?;
    serde_json::from_value(value).map_err(|e| shape_error(path, e))
}

/// Builds the matrix, reporting a ragged or mislabeled array as a shape violation.
pub fn matrix(raw: RawMatrix) -> qhc_core::Result<CMatrix> {
    let shape = |m: usize| {
        qhc_core::Error::Validation(Violation {
            condition: Condition::Shape,
            magnitude: raw.dim.abs_diff(m) as f64,
        })
    };
    if raw.entries.len() != raw.dim {
        return Err(shape(raw.entries.len()));
    }
    if let Some(row) = raw.entries.iter().find(|r| r.len() != raw.dim) {
        return Err(shape(row.len()));
    }
    let rows = raw
        .entries
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect()
        })
        .collect();
    CMatrix::from_rows(rows)
}

fn wrong_kind(path: &Path, expected: &str, found: &Input) -> CliError {
    CliError::Parse(format!(
        "{}: expected {expected}, found {}",
        path.display(),
        found.kind()
    ))
}

pub fn state(path: &Path) -> Result<ProbabilityState, CliError> {
    match load(path)? {
        Input::State(p) => Ok(ProbabilityState::new(p)?),
        other => Err(wrong_kind(path, "a probability state", &other)),
    }
}

pub fn classical_observable(path: &Path) -> Result<ClassicalObservable, CliError> {
    match load(path)? {
        Input::Values(v) => Ok(ClassicalObservable::new(v)?),
        other => Err(wrong_kind(path, "a classical observable", &other)),
    }
}

pub fn density(path: &Path) -> Result<DensityMatrix, CliError> {
    match load(path)? {
        Input::Matrix(m) => Ok(DensityMatrix::new(matrix(m)?)?),
        other => Err(wrong_kind(path, "a density matrix", &other)),
    }
}

/// A matrix observable, or a `{"values"}` file read as a diagonal one.
pub fn quantum_observable(path: &Path) -> Result<QuantumObservable, CliError> {
    match load(path)? {
        Input::Matrix(m) => Ok(QuantumObservable::new(matrix(m)?)?),
        Input::Values(v) => {
            ClassicalObservable::new(v.clone())?;
            Ok(QuantumObservable::from_diagonal(&v))
        }
        other => Err(wrong_kind(path, "an observable", &other)),
    }
}
