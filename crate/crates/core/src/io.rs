//! JSON and CSV formats.
//!
//! Scalars are always written as strings: `"p/q"` for rationals and a
//! round-tripping decimal for fixed point. Permutations are one-based.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::iet::{CompositionSpec, Iet, IetError, Permutation};
use crate::numerics::{NumericsConfig, Scalar};
use crate::surface::{StackedSurface, SurfaceError, TracePoint};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `{"lengths": [...], "permutation": [...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IetJson {
    pub lengths: Vec<String>,
    pub permutation: Vec<usize>,
}

impl IetJson {
    pub fn from_iet<S: Scalar>(iet: &Iet<S>) -> Self {
        IetJson {
            lengths: iet.lengths().iter().map(ToString::to_string).collect(),
            permutation: iet.permutation().to_one_based(),
        }
    }

    pub fn to_iet<S: Scalar>(&self, cfg: &NumericsConfig) -> Result<Iet<S>, IetError> {
        let lengths = self
            .lengths
            .iter()
            .map(|s| S::parse(s, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        Iet::new(lengths, Permutation::from_one_based(&self.permutation)?)
    }
}

/// A composition spec, or equivalently a stacked surface.
///
/// `heights` is accepted in place of `coefficients`; `incommensurable_heights`
/// lists one-based heights declared incommensurable with the others and only
/// matters for surfaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub iets: Vec<IetJson>,
    #[serde(alias = "heights")]
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incommensurable_heights: Vec<usize>,
}

impl SpecJson {
    pub fn from_spec<S: Scalar>(spec: &CompositionSpec<S>) -> Self {
        SpecJson {
            iets: spec.iets().iter().map(IetJson::from_iet).collect(),
            coefficients: spec
                .coefficients()
                .iter()
                .map(ToString::to_string)
                .collect(),
            incommensurable_heights: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses the spec; negative coefficients are accepted only when `mixed`.
    pub fn to_spec<S: Scalar>(
        &self,
        cfg: &NumericsConfig,
        mixed: bool,
    ) -> Result<CompositionSpec<S>, IetError> {
        let iets = self
            .iets
            .iter()
            .map(|t| t.to_iet(cfg))
            .collect::<Result<Vec<_>, _>>()?;
        let coefficients = self
            .coefficients
            .iter()
            .map(|s| S::parse(s, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        if mixed {
            CompositionSpec::mixed(iets, coefficients)
        } else {
            CompositionSpec::new(iets, coefficients)
        }
    }

    pub fn to_surface<S: Scalar>(
        &self,
        cfg: &NumericsConfig,
    ) -> Result<StackedSurface<S>, FormatError> {
        let spec = self.to_spec(cfg, false)?;
        Ok(StackedSurface::build(&spec)?.declare_incommensurable(&self.incommensurable_heights)?)
    }
}

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// The `#`-prefixed preamble of every CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvHeader {
    pub title: String,
    /// Omitted from the output when `None`, so reruns compare byte for byte.
    pub timestamp: Option<String>,
    pub config_hash: String,
    pub seed: u64,
    pub backend: String,
    pub precision: u32,
}

impl CsvHeader {
    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# {}", self.title)?;
        if let Some(ts) = &self.timestamp {
            writeln!(w, "# generated: {ts}")?;
        }
        writeln!(w, "# config_hash: {}", self.config_hash)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# backend: {}", self.backend)?;
        writeln!(w, "# precision: {}", self.precision)
    }
}

/// Flow trace rows `step,rectangle,x,y`.
pub fn write_trace_csv<S: Scalar, W: Write>(w: &mut W, trace: &[TracePoint<S>]) -> io::Result<()> {
    writeln!(w, "step,rectangle,x,y")?;
    for p in trace {
        writeln!(w, "{},{},{},{}", p.step, p.rectangle, p.x, p.y)?;
    }
    Ok(())
}
