//! State-spec documents and the built-in state families.
//!
//! A document is a YAML mapping:
//!
//! ```yaml
//! kind: amplitudes          # amplitudes | w_class | pcs | ou | kim_sanders | max_entangled
//! profile: [2, 2, 2]
//! amplitudes:               # (digits, re, im); digits as a list or a string
//!   - ["100", 0.5773502691896258, 0]
//!   - [[0, 1, 0], 0.5773502691896258, 0]
//!   - ["001", 0.5773502691896258, 0]
//! ```
//!
//! `w_class` and `pcs` take an `a` table with one row per party and `d - 1`
//! entries (numbers or `[re, im]` pairs); `pcs` adds `p` and `lambda`.
//! `max_entangled` takes `d`. Inputs whose norm is off by more than `1e-8`
//! are rejected, naming the offending field.

use std::path::Path;

use nalgebra::Complex;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::qlinalg::{CVector, DensityOperator, DimensionProfile, PureState, TOL_RENORM};
use crate::scalar::{lit, Real, C};
use crate::states::{
    build_pcs_density, build_w_state, ghz_state, kim_sanders_state, maximally_entangled, ou_state,
    PcsSpec, WClassSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Amplitudes,
    WClass,
    Pcs,
    Ou,
    KimSanders,
    MaxEntangled,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Amplitudes => "amplitudes",
            StateKind::WClass => "w_class",
            StateKind::Pcs => "pcs",
            StateKind::Ou => "ou",
            StateKind::KimSanders => "kim_sanders",
            StateKind::MaxEntangled => "max_entangled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState<T: Real> {
    Pure(PureState<T>),
    Mixed(DensityOperator<T>),
}

impl<T: Real> LoadedState<T> {
    pub fn profile(&self) -> &DimensionProfile {
        match self {
            LoadedState::Pure(psi) => psi.profile(),
            LoadedState::Mixed(rho) => rho.profile(),
        }
    }

    pub fn density(&self) -> DensityOperator<T> {
        match self {
            LoadedState::Pure(psi) => psi.density(),
            LoadedState::Mixed(rho) => rho.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState<T>> {
        match self {
            LoadedState::Pure(psi) => Some(psi),
            LoadedState::Mixed(_) => None,
        }
    }
}

/// A parsed document: the state plus the W-class parameters it came from,
/// when it has any.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDocument<T: Real> {
    pub kind: StateKind,
    pub state: LoadedState<T>,
    pub w_class: Option<WClassSpec<T>>,
    pub pcs: Option<PcsSpec<T>>,
}

impl<T: Real> StateDocument<T> {
    fn pure(kind: StateKind, psi: PureState<T>) -> Self {
        Self {
            kind,
            state: LoadedState::Pure(psi),
            w_class: None,
            pcs: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    kind: StateKind,
    profile: Option<Vec<usize>>,
    amplitudes: Option<Vec<(RawDigits, f64, f64)>>,
    a: Option<Vec<Vec<RawComplex>>>,
    p: Option<f64>,
    lambda: Option<f64>,
    d: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDigits {
    List(Vec<usize>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl RawComplex {
    fn value<T: Real>(&self) -> C<T> {
        match *self {
            RawComplex::Real(x) => Complex::new(lit(x), T::zero()),
            RawComplex::Pair([x, y]) => Complex::new(lit(x), lit(y)),
        }
    }
}

/// Parses a document from text.
pub fn parse_state<T: Real>(text: &str) -> Result<StateDocument<T>> {
    let raw: RawDocument = serde_yaml::from_str(text).map_err(|e| {
        let (line, column) = e
            .location()
            .map(|l| (l.line(), l.column()))
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: e.to_string(),
        }
    })?;
    build(&raw, text)
}

pub fn load_state<T: Real>(path: impl AsRef<Path>) -> Result<StateDocument<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}

/// Names accepted by [`family`].
pub const FAMILIES: [&str; 5] = ["ou", "kim_sanders", "bell", "ghz3", "w3"];

/// Built-in states by name.
pub fn family<T: Real>(name: &str) -> Result<StateDocument<T>> {
    match name {
        "ou" => Ok(StateDocument::pure(StateKind::Ou, ou_state())),
        "kim_sanders" => Ok(StateDocument::pure(
            StateKind::KimSanders,
            kim_sanders_state(),
        )),
        "bell" => Ok(StateDocument::pure(
            StateKind::MaxEntangled,
            maximally_entangled(2)?,
        )),
        "ghz3" => Ok(StateDocument::pure(StateKind::Amplitudes, ghz_state(3)?)),
        "w3" => {
            let w = WClassSpec::symmetric_qubit(3)?;
            let mut doc = StateDocument::pure(StateKind::WClass, build_w_state(&w));
            doc.w_class = Some(w);
            Ok(doc)
        }
        other => Err(Error::domain(format!(
            "unknown family `{other}` (expected one of {})",
            FAMILIES.join(", ")
        ))),
    }
}

/// `field: message`, with the line of the field's key when it can be found.
fn field_error(text: &str, field: &str, message: impl Into<String>) -> Error {
    let message = message.into();
    let line = text.lines().position(|l| {
        l.trim_start()
            .strip_prefix(field)
            .is_some_and(|rest| rest.trim_start().starts_with(':'))
    });
    match line {
        Some(i) => Error::field(field, format!("{message} (line {})", i + 1)),
        None => Error::field(field, message),
    }
}

fn require<'a, V>(text: &str, value: &'a Option<V>, field: &str, kind: StateKind) -> Result<&'a V> {
    value
        .as_ref()
        .ok_or_else(|| field_error(text, field, format!("required for kind `{}`", kind.name())))
}

fn check_profile(text: &str, declared: Option<&[usize]>, actual: &DimensionProfile) -> Result<()> {
    match declared {
        Some(dims) if dims != actual.dims() => Err(field_error(
            text,
            "profile",
            format!(
                "declared {dims:?}, but the state lives on {:?}",
                actual.dims()
            ),
        )),
        _ => Ok(()),
    }
}

fn build<T: Real>(raw: &RawDocument, text: &str) -> Result<StateDocument<T>> {
    let kind = raw.kind;
    let declared = raw.profile.as_deref();
    match kind {
        StateKind::Amplitudes => {
            let dims = require(text, &raw.profile, "profile", kind)?;
            let profile = DimensionProfile::new(dims.clone())
                .map_err(|e| field_error(text, "profile", e.to_string()))?;
            let terms = require(text, &raw.amplitudes, "amplitudes", kind)?;
            let mut amps = CVector::<T>::zeros(profile.total());
            for (k, (digits, x, y)) in terms.iter().enumerate() {
                let digits = match digits {
                    RawDigits::List(v) => v.clone(),
                    RawDigits::Text(s) => s
                        .chars()
                        .map(|ch| ch.to_digit(36).map(|d| d as usize))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| {
                            field_error(
                                text,
                                "amplitudes",
                                format!("entry {k}: bad digit string `{s}`"),
                            )
                        })?,
                };
                let idx = profile
                    .index(&digits)
                    .map_err(|e| field_error(text, "amplitudes", format!("entry {k}: {e}")))?;
                amps[idx] += Complex::new(lit(*x), lit(*y));
            }
            let norm_sq = amps.norm_squared().to_f64();
            if (norm_sq - 1.0).abs() > TOL_RENORM {
                return Err(field_error(
                    text,
                    "amplitudes",
                    format!("squared norm is {norm_sq}, not 1 within {TOL_RENORM:e}"),
                ));
            }
            let psi = PureState::new(profile, amps)
                .map_err(|e| field_error(text, "amplitudes", e.to_string()))?;
            Ok(StateDocument::pure(kind, psi))
        }
        StateKind::WClass | StateKind::Pcs => {
            let table = require(text, &raw.a, "a", kind)?;
            let width = table.first().map_or(0, Vec::len);
            let a: Vec<Vec<C<T>>> = table
                .iter()
                .map(|row| row.iter().map(RawComplex::value).collect())
                .collect();
            let w =
                WClassSpec::new(width + 1, a).map_err(|e| field_error(text, "a", e.to_string()))?;
            check_profile(text, declared, &w.profile())?;
            if kind == StateKind::WClass {
                let mut doc = StateDocument::pure(kind, build_w_state(&w));
                doc.w_class = Some(w);
                return Ok(doc);
            }
            let p = *require(text, &raw.p, "p", kind)?;
            let lambda = *require(text, &raw.lambda, "lambda", kind)?;
            for (name, v) in [("p", p), ("lambda", lambda)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(field_error(text, name, format!("{v} is outside [0, 1]")));
                }
            }
            let spec = PcsSpec::new(w.clone(), lit(p), lit(lambda))?;
            Ok(StateDocument {
                kind,
                state: LoadedState::Mixed(build_pcs_density(&spec)),
                w_class: Some(w),
                pcs: Some(spec),
            })
        }
        StateKind::Ou | StateKind::KimSanders => {
            let psi = if kind == StateKind::Ou {
                ou_state()
            } else {
                kim_sanders_state()
            };
            check_profile(text, declared, psi.profile())?;
            Ok(StateDocument::pure(kind, psi))
        }
        StateKind::MaxEntangled => {
            let d = match (raw.d, declared) {
                (Some(d), _) => d,
                (None, Some([a, b])) if a == b => *a,
                _ => {
                    return Err(field_error(
                        text,
                        "d",
                        "required (or give a profile [d, d])",
                    ))
                }
            };
            let psi = maximally_entangled(d).map_err(|e| field_error(text, "d", e.to_string()))?;
            check_profile(text, declared, psi.profile())?;
            Ok(StateDocument::pure(kind, psi))
        }
    }
}
