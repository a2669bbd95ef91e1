//! The `qhc` command-line tool. Commands read JSON inputs, write one compact
//! JSON report and exit with 0 on success, 1 on I/O or parse failures and 2
//! when the inputs fail validation or the requested analysis does not apply.

pub mod args;
pub mod input;
pub mod report;

use std::fmt;
use std::path::Path;

use qhc_core::{
    classical, enumerate_factorizations, factorize, quantum, sampler, Convention, IndexMap,
    ProbabilityState, Violation,
};
use serde::Serialize;

use args::{Cli, Command, ConventionArg, MapArgs, MatrixKind};
use input::Input;
use report::*;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Usage(String),
    Domain(qhc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) | CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<qhc_core::Error> for CliError {
    fn from(e: qhc_core::Error) -> Self {
        CliError::Domain(e)
    }
}

/// A serialized report and the exit code to finish with.
pub struct Output {
    pub json: String,
    pub code: u8,
}

fn emit<T: Serialize>(report: &T, code: u8) -> Result<Output, CliError> {
    let json = qhc_core::json::to_string(report).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Output { json, code })
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate { path, matrix_as } => validate(path, *matrix_as),
        Command::Analyze {
            state,
            map,
            all_partitions,
            parts,
        } => analyze(state, map, *all_partitions, *parts as usize),
        Command::Hidden {
            state,
            observable,
            map,
            tol,
        } => hidden(state, observable, map, *tol),
        Command::Quantum { rho, factors, map } => quantum_report(rho, factors, map),
        Command::Sample {
            state,
            observable,
            samples,
            seed,
        } => sample(state, observable, *samples, *seed),
    }
}

fn convention(arg: ConventionArg) -> Convention {
    match arg {
        ConventionArg::RowMajor => Convention::RowMajor,
        ConventionArg::ColMajor => Convention::ColMajor,
    }
}

fn resolve_map(args: &MapArgs) -> Result<Option<IndexMap>, CliError> {
    if let Some(path) = &args.map_file {
        return input::load_map(path).map(Some);
    }
    let Some(spec) = &args.map else {
        return Ok(None);
    };
    let dims = args::parse_dims(spec).map_err(CliError::Usage)?;
    let map = match args.convention {
        ConventionArg::RowMajor => IndexMap::row_major(&dims)?,
        ConventionArg::ColMajor => IndexMap::col_major(&dims)?,
    };
    Ok(Some(map))
}

fn require_map(args: &MapArgs) -> Result<IndexMap, CliError> {
    resolve_map(args)?.ok_or_else(|| CliError::Usage("--map or --map-file is required".into()))
}

fn check_total(map: &IndexMap, n: usize) -> Result<(), CliError> {
    if map.total() != n {
        return Err(qhc_core::Error::Dimension {
            expected: n,
            found: map.total(),
        }
        .into());
    }
    Ok(())
}

fn validate(path: &Path, matrix_as: MatrixKind) -> Result<Output, CliError> {
    let loaded = input::load(path)?;
    let dim = loaded.dim();
    let (kind, outcome) = match loaded {
        Input::State(p) => ("state", ProbabilityState::new(p).map(|_| ())),
        Input::Values(v) => (
            "observable",
            classical::ClassicalObservable::new(v).map(|_| ()),
        ),
        Input::Matrix(m) => match matrix_as {
            MatrixKind::Density => (
                "density-matrix",
                input::matrix(m)
                    .and_then(quantum::validate_density)
                    .map(|_| ()),
            ),
            MatrixKind::Observable => (
                "quantum-observable",
                input::matrix(m)
                    .and_then(qhc_core::QuantumObservable::new)
                    .map(|_| ()),
            ),
        },
    };
    let violation: Option<Violation> = match outcome {
        Ok(()) => None,
        Err(qhc_core::Error::Validation(v)) => Some(v),
        Err(e) => return Err(e.into()),
    };
    let report = ValidateReport {
        kind: kind.to_string(),
        dim,
        valid: violation.is_none(),
        verdict: violation.map_or_else(|| "valid".to_string(), |v| v.to_string()),
        violation,
    };
    emit(&report, if report.valid { 0 } else { 2 })
}

fn partition_report(state: &ProbabilityState, map: IndexMap) -> Result<PartitionReport, CliError> {
    let marginals = classical::marginals(state, &map)?;
    let product_defect = classical::product_defect(state, &map)?;
    let (mutual_information, subadditivity) = if map.parts() == 2 {
        let sa = classical::check_subadditivity(state, &map)?;
        (Some(sa.slack), Some(sa))
    } else {
        (None, None)
    };
    let strong_subadditivity = if map.parts() == 3 {
        Some(classical::check_strong_subadditivity(state, &map)?)
    } else {
        None
    };
    Ok(PartitionReport {
        marginal_entropies: marginals.entropies(),
        marginals: marginals
            .marginals
            .iter()
            .map(|m| m.probs().to_vec())
            .collect(),
        map,
        product_defect,
        mutual_information,
        subadditivity,
        strong_subadditivity,
    })
}

fn analyze(
    path: &Path,
    map_args: &MapArgs,
    all_partitions: bool,
    parts: usize,
) -> Result<Output, CliError> {
    let state = input::state(path)?;
    let n = state.len();
    let mut note = None;
    let maps = if all_partitions {
        let found = enumerate_factorizations(n, parts);
        if found.is_empty() {
            note = Some(NO_PARTITIONS.to_string());
        }
        found
            .into_iter()
            .map(|f| IndexMap::new(f, convention(map_args.convention)))
            .collect::<qhc_core::Result<Vec<_>>>()?
    } else {
        let map = require_map(map_args)?;
        check_total(&map, n)?;
        vec![map]
    };
    let partitions = maps
        .into_iter()
        .map(|m| partition_report(&state, m))
        .collect::<Result<Vec<_>, _>>()?;
    let report = AnalyzeReport {
        dim: n,
        entropy: classical::shannon_entropy(&state),
        partitions,
        note,
    };
    emit(&report, 0)
}

fn hidden(
    state: &Path,
    observable: &Path,
    map_args: &MapArgs,
    tol: f64,
) -> Result<Output, CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    let p = input::state(state)?;
    let f = input::classical_observable(observable)?;
    let map = require_map(map_args)?;
    check_total(&map, p.len())?;
    check_total(&map, f.len())?;
    let mean = classical::mean(&p, &f)?;
    let result = factorize::factor_classical_multi(&f, &map, tol)?;

    let mut report = HiddenReport {
        map: map.clone(),
        product_form: result.success,
        verdict: if result.success {
            PRODUCT_FORM
        } else {
            NOT_PRODUCT_FORM
        }
        .to_string(),
        residual: result.residual,
        gauge: result.gauge,
        degenerate: result.degenerate,
        mean,
        factors: None,
        lifts: None,
        correlation: None,
        difference: None,
    };
    if result.success {
        let factors = result
            .factors
            .iter()
            .map(|v| classical::ClassicalObservable::new(v.clone()))
            .collect::<qhc_core::Result<Vec<_>>>()?;
        let lifts = factors
            .iter()
            .enumerate()
            .map(|(i, g)| classical::lift_factor(&map, i + 1, g).map(|l| l.values().to_vec()))
            .collect::<qhc_core::Result<Vec<_>>>()?;
        let correlation = classical::mean_as_correlation(&p, &map, &factors)?;
        report.factors = Some(result.factors);
        report.lifts = Some(lifts);
        report.correlation = Some(correlation);
        report.difference = Some(mean - correlation);
    }
    emit(&report, 0)
}

fn quantum_report(
    rho_path: &Path,
    factor_paths: &[std::path::PathBuf],
    map_args: &MapArgs,
) -> Result<Output, CliError> {
    let rho = input::density(rho_path)?;
    let factors = factor_paths
        .iter()
        .map(|p| input::quantum_observable(p))
        .collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let map = match resolve_map(map_args)? {
        Some(m) => m,
        None => IndexMap::row_major(&dims)?,
    };
    if map.factors() != dims.as_slice() {
        return Err(CliError::Usage(format!(
            "map factors {:?} do not match factor dimensions {:?}",
            map.factors(),
            dims
        )));
    }
    check_total(&map, rho.dim())?;

    let trace_value = quantum::expectation(&rho, &quantum::kron(&factors)?)?;
    let lifted_value = quantum::mean_as_quantum_correlation(&rho, &map, &factors)?;
    let commutator_norms = quantum::commutator_norms(&map, &factors)?
        .into_iter()
        .map(|(a, b, norm)| CommutatorNorm { a, b, norm })
        .collect();
    let reduced_entropies = (1..=map.parts())
        .map(|p| quantum::partial_trace(&rho, &map, &[p]).map(|r| quantum::von_neumann_entropy(&r)))
        .collect::<qhc_core::Result<Vec<_>>>()?;
    let subadditivity = match map.parts() {
        2 => Some(quantum::check_quantum_subadditivity(&rho, &map)?),
        _ => None,
    };
    let strong_subadditivity = match map.parts() {
        3 => Some(quantum::check_quantum_ssa(&rho, &map)?),
        _ => None,
    };
    let report = QuantumReport {
        map,
        trace_value,
        lifted_value,
        difference: trace_value - lifted_value,
        commutator_norms,
        entropy: quantum::von_neumann_entropy(&rho),
        reduced_entropies,
        subadditivity,
        strong_subadditivity,
    };
    emit(&report, 0)
}

fn sample(state: &Path, observable: &Path, samples: u64, seed: u64) -> Result<Output, CliError> {
    let report = match input::load(state)? {
        Input::State(p) => {
            let p = ProbabilityState::new(p)?;
            let values = match input::load(observable)? {
                Input::Values(v) => v,
                Input::Matrix(m) => qhc_core::QuantumObservable::new(input::matrix(m)?)?
                    .diagonal_values(sampler::DIAGONAL_TOL)
                    .ok_or(qhc_core::Error::UnsupportedObservable(
                        "only observables diagonal in the computational basis can be sampled",
                    ))?,
                Input::State(_) => {
                    return Err(CliError::Parse(format!(
                        "{}: expected an observable, found state",
                        observable.display()
                    )))
                }
            };
            let f = classical::ClassicalObservable::new(values)?;
            sampler::sample_classical(&p, &f, samples, seed)?
        }
        Input::Matrix(m) => {
            let rho = qhc_core::DensityMatrix::new(input::matrix(m)?)?;
            let obs = input::quantum_observable(observable)?;
            sampler::sample_diagonal_quantum(&rho, &obs, samples, seed)?
        }
        Input::Values(_) => {
            return Err(CliError::Parse(format!(
                "{}: expected a state or density matrix, found observable",
                state.display()
            )))
        }
    };
    emit(&report, 0)
}
