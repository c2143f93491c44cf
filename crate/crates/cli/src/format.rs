//! The on-disk state-set format and its (de)serialization.
//!
//! A state-set file is JSON with every complex number written as a
//! two-element `[re, im]` array — never a bare float — so real and complex
//! data cannot be confused:
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "name": "example",
//!   "dims": [2, 2],
//!   "states": [
//!     { "label": "phi+", "kind": "pure",
//!       "data": [[0.7071067811865476, 0.0], [0.0, 0.0],
//!                [0.0, 0.0], [0.7071067811865476, 0.0]] },
//!     { "label": "mixed", "kind": "mixed",
//!       "data": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] }
//!   ]
//! }
//! ```
//!
//! `pure` data is a complex vector of length dA·dB; `mixed` data is a
//! (dA·dB)×(dA·dB) complex matrix given as rows. Numbers are emitted in
//! shortest round-trip form, so serialize → parse reproduces every entry
//! bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qdisent::disentangle::{Member, StateSet};
use qdisent::entanglement::{BipartiteState, PureState};
use qdisent::linalg::{ComplexMatrix, Dims, Tolerance};

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize, Deserialize)]
pub struct StateSetFile {
    pub schema_version: String,
    pub name: String,
    pub dims: (usize, usize),
    pub states: Vec<StateEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateEntry {
    pub label: String,
    pub kind: StateKind,
    pub data: StateData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// Pure states carry a complex vector, mixed states a complex matrix; the
/// two shapes are distinguishable, but the explicit `kind` must agree.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateData {
    Pure(Vec<[f64; 2]>),
    Mixed(Vec<Vec<[f64; 2]>>),
}

fn to_complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn from_complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Parse and validate a state-set file. Returns the set together with any
/// normalization warnings collected along the way.
pub fn parse_state_set(
    text: &str,
    origin: &str,
    tol: &Tolerance,
) -> CliResult<(StateSet, Vec<String>)> {
    let file: StateSetFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Parse {
            origin: origin.to_string(),
            message: format!(
                "schema_version: unsupported value {:?} (expected {:?})",
                file.schema_version, SCHEMA_VERSION
            ),
        });
    }
    let (da, db) = file.dims;
    if da == 0 || db == 0 {
        return Err(CliError::Parse {
            origin: origin.to_string(),
            message: format!("dims: subsystem dimensions must be positive, got [{da}, {db}]"),
        });
    }
    let dims = Dims::new(da, db);
    let mut warnings = Vec::new();
    let mut members = Vec::with_capacity(file.states.len());
    for (index, entry) in file.states.iter().enumerate() {
        let path = format!("states[{}] ({:?})", index, entry.label);
        let state = parse_entry(entry, dims, tol, origin, &path, &mut warnings)?;
        members.push(Member {
            label: entry.label.clone(),
            state,
        });
    }
    let set = StateSet::new(file.name.clone(), members).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        message: format!("states: {e}"),
    })?;
    Ok((set, warnings))
}

fn parse_entry(
    entry: &StateEntry,
    dims: Dims,
    tol: &Tolerance,
    origin: &str,
    path: &str,
    warnings: &mut Vec<String>,
) -> CliResult<BipartiteState> {
    let n = dims.total();
    match (&entry.kind, &entry.data) {
        (StateKind::Pure, StateData::Pure(amplitudes)) => {
            if amplitudes.len() != n {
                return Err(CliError::Parse {
                    origin: origin.to_string(),
                    message: format!(
                        "{path}.data: expected {n} amplitudes for dims {dims}, got {}",
                        amplitudes.len()
                    ),
                });
            }
            let amps: Vec<Complex64> = amplitudes.iter().copied().map(to_complex).collect();
            let pure = PureState::new(amps, dims).map_err(|e| CliError::InvalidState {
                origin: origin.to_string(),
                message: format!("{path}: {e}"),
            })?;
            if let Some(norm) = pure.renormalized_from() {
                warnings.push(format!(
                    "{path}: amplitudes renormalized from norm {norm:.12}"
                ));
            }
            pure.to_bipartite(tol).map_err(|e| CliError::InvalidState {
                origin: origin.to_string(),
                message: format!("{path}: {e}"),
            })
        }
        (StateKind::Mixed, StateData::Mixed(rows)) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::Parse {
                    origin: origin.to_string(),
                    message: format!("{path}.data: expected a {n}x{n} matrix for dims {dims}"),
                });
            }
            let entries: Vec<Complex64> = rows
                .iter()
                .flat_map(|r| r.iter().copied().map(to_complex))
                .collect();
            let rho = ComplexMatrix::new(n, n, entries).map_err(|e| CliError::InvalidState {
                origin: origin.to_string(),
                message: format!("{path}.data: {e}"),
            })?;
            BipartiteState::new(rho, dims, tol).map_err(|e| CliError::InvalidState {
                origin: origin.to_string(),
                message: format!("{path}: {e}"),
            })
        }
        (StateKind::Pure, StateData::Mixed(_)) => Err(CliError::Parse {
            origin: origin.to_string(),
            message: format!("{path}: kind is \"pure\" but data is a matrix"),
        }),
        (StateKind::Mixed, StateData::Pure(_)) => Err(CliError::Parse {
            origin: origin.to_string(),
            message: format!("{path}: kind is \"mixed\" but data is a vector"),
        }),
    }
}

/// Serialize a state set. Members are written as mixed (density-matrix)
/// states, which is the lossless carrier.
pub fn write_state_set(set: &StateSet) -> String {
    let dims = set.dims();
    let states = set
        .members()
        .iter()
        .map(|member| {
            let rho = member.state.rho();
            let n = rho.rows();
            let rows: Vec<Vec<[f64; 2]>> = (0..n)
                .map(|i| (0..n).map(|j| from_complex(rho.get(i, j))).collect())
                .collect();
            StateEntry {
                label: member.label.clone(),
                kind: StateKind::Mixed,
                data: StateData::Mixed(rows),
            }
        })
        .collect();
    let file = StateSetFile {
        schema_version: SCHEMA_VERSION.to_string(),
        name: set.name().to_string(),
        dims: (dims.a, dims.b),
        states,
    };
    serde_json::to_string_pretty(&file).expect("state-set files serialize infallibly")
}

/// Serialize a single state as a one-member set file.
pub fn write_single_state(name: &str, label: &str, state: &BipartiteState) -> String {
    let set = StateSet::new(
        name,
        vec![Member {
            label: label.to_string(),
            state: state.clone(),
        }],
    )
    .expect("one labeled member");
    write_state_set(&set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdisent::catalog;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn roundtrip_is_entrywise_exact() {
        for entry in catalog::all_entries() {
            let text = write_state_set(&entry.set);
            let (parsed, warnings) = parse_state_set(&text, "roundtrip", &tol()).unwrap();
            assert!(warnings.is_empty());
            assert_eq!(parsed.name(), entry.set.name());
            assert_eq!(parsed.dims(), entry.set.dims());
            for (a, b) in parsed.members().iter().zip(entry.set.members()) {
                assert_eq!(a.label, b.label);
                // shortest round-trip float encoding: bit-exact, not merely close
                assert_eq!(a.state.rho().entries(), b.state.rho().entries());
            }
        }
    }

    #[test]
    fn parse_rejects_malformed_json() {
        let err = parse_state_set("{ not json", "test", &tol()).unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }

    #[test]
    fn parse_rejects_wrong_schema_version() {
        let text = r#"{"schema_version":"2","name":"x","dims":[2,2],"states":[]}"#;
        let err = parse_state_set(text, "test", &tol()).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn parse_rejects_kind_data_mismatch() {
        let text = r#"{
            "schema_version": "1", "name": "x", "dims": [2, 2],
            "states": [{"label": "a", "kind": "mixed",
                        "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}]
        }"#;
        let err = parse_state_set(text, "test", &tol()).unwrap_err();
        assert!(err.to_string().contains("kind"));
    }

    #[test]
    fn parse_rejects_invalid_density_matrix() {
        let text = r#"{
            "schema_version": "1", "name": "x", "dims": [1, 2],
            "states": [{"label": "bad", "kind": "mixed",
                        "data": [[[1.1, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.1, 0.0]]]}]
        }"#;
        let err = parse_state_set(text, "test", &tol()).unwrap_err();
        assert!(matches!(err, CliError::InvalidState { .. }));
        assert!(err.to_string().contains("bad"));
    }

    #[test]
    fn parse_renormalizes_pure_states_with_warning() {
        let text = r#"{
            "schema_version": "1", "name": "x", "dims": [2, 2],
            "states": [{"label": "offnorm", "kind": "pure",
                        "data": [[0.8, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}]
        }"#;
        let (set, warnings) = parse_state_set(text, "test", &tol()).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("renormalized"));
        let rho = set.members()[0].state.rho();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_locates_errors_by_field_path() {
        let text = r#"{
            "schema_version": "1", "name": "x", "dims": [2, 2],
            "states": [
                {"label": "ok", "kind": "pure",
                 "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
                {"label": "short", "kind": "pure", "data": [[1.0, 0.0]]}
            ]
        }"#;
        let err = parse_state_set(text, "test", &tol()).unwrap_err();
        assert!(err.to_string().contains("states[1]"));
        assert!(err.to_string().contains("short"));
    }
}
