use std::fmt;

use super::form::QuadraticForm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    /// Trace over Ω_s, Ω_i: purity of the spatial two-photon state.
    Frequency,
    /// Trace over the idler: purity of the signal photon.
    Idler,
    /// Trace over all transverse momenta: purity of the frequency state.
    Momentum,
    Custom,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceKind::Frequency => "frequency",
            TraceKind::Idler => "idler",
            TraceKind::Momentum => "momentum",
            TraceKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Which copy of the coordinates (unprimed `x` or primed `x'`) each of the
/// four mode-function factors in `Tr ρ²` reads.
///
/// Each map lists, for the `n` mode-function arguments, their 0-based index
/// into `X = (x, x')` of length `2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePairing {
    pub kind: TraceKind,
    dim: usize,
    maps: [Vec<usize>; 4],
}

impl TracePairing {
    /// Builds the four maps for tracing out `traced` (0-based coordinates
    /// of an `dim`-dimensional mode function):
    /// `Φ(x) Φ*(x'_kept, x_traced) Φ(x') Φ*(x_kept, x'_traced)`.
    pub fn from_traced(kind: TraceKind, dim: usize, traced: &[usize]) -> Self {
        let is_traced = |j: usize| traced.contains(&j);
        let unprimed: Vec<usize> = (0..dim).collect();
        let primed: Vec<usize> = (0..dim).map(|j| j + dim).collect();
        let second = (0..dim)
            .map(|j| if is_traced(j) { j } else { j + dim })
            .collect();
        let fourth = (0..dim)
            .map(|j| if is_traced(j) { j + dim } else { j })
            .collect();
        Self {
            kind,
            dim,
            maps: [unprimed, second, primed, fourth],
        }
    }

    /// Maps `(1,2,3,4,5,6), (7,8,3,10,11,6), (7,8,9,10,11,12), (1,2,9,4,5,12)`.
    pub fn frequency() -> Self {
        Self::from_traced(TraceKind::Frequency, 6, &[2, 5])
    }

    /// Maps `(1,2,3,4,5,6), (7,8,9,4,5,6), (7,8,9,10,11,12), (1,2,3,10,11,12)`.
    pub fn idler() -> Self {
        Self::from_traced(TraceKind::Idler, 6, &[3, 4, 5])
    }

    pub fn momentum() -> Self {
        Self::from_traced(TraceKind::Momentum, 6, &[0, 1, 3, 4])
    }

    pub fn for_kind(kind: TraceKind) -> Result<Self> {
        match kind {
            TraceKind::Frequency => Ok(Self::frequency()),
            TraceKind::Idler => Ok(Self::idler()),
            TraceKind::Momentum => Ok(Self::momentum()),
            TraceKind::Custom => Err(Error::Validation(
                "custom pairing has no preset maps".into(),
            )),
        }
    }

    /// Arbitrary maps, 0-based into a `2·dim` vector.
    pub fn custom(dim: usize, maps: [Vec<usize>; 4]) -> Result<Self> {
        for m in &maps {
            if m.len() != dim || m.iter().any(|&i| i >= 2 * dim) {
                return Err(Error::Validation(format!(
                    "pairing map {m:?} is not a list of {dim} indices below {}",
                    2 * dim
                )));
            }
        }
        Ok(Self {
            kind: TraceKind::Custom,
            dim,
            maps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[Vec<usize>; 4] {
        &self.maps
    }

    /// 1-based maps, as usually written.
    pub fn maps_one_based(&self) -> [Vec<usize>; 4] {
        self.maps
            .clone()
            .map(|m| m.into_iter().map(|i| i + 1).collect())
    }

    /// `Σ_k S_kᵀ A S_k` with `S_k` the selection matrix of map `k`.
    pub fn compose(&self, a: &QuadraticForm) -> Result<QuadraticForm> {
        if a.dim() != self.dim {
            return Err(Error::Validation(format!(
                "form has dimension {} but pairing expects {}",
                a.dim(),
                self.dim
            )));
        }
        let mut out = QuadraticForm::zeros(2 * self.dim);
        for map in &self.maps {
            for (r, &i) in map.iter().enumerate() {
                for (c, &j) in map.iter().enumerate() {
                    out[(i, j)] += a[(r, c)];
                }
            }
        }
        Ok(out)
    }
}
