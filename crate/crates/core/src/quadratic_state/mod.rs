//! Gaussian mode function, traced forms and purity.
//!
//! With `Φ(x) = N exp(-½ xᵀ A x)` normalized to `∫|Φ|² = 1`, any purity
//! integral that multiplies four copies of `Φ` with arguments drawn from
//! `X = (x, x')` evaluates to
//!
//! ```text
//! Tr ρ_red² = det(2A) / √det(M),   M = Σ_k S_kᵀ A S_k
//! ```
//!
//! where `S_k` selects the arguments of factor `k` (see [`TracePairing`]).
//! `N` cancels, density matrices are never built, and constant offsets of
//! Δ₀ and Δ_k only shift the Gaussian's mean, so they do not enter.

mod assemble;
mod form;
mod pairing;

pub use assemble::{
    assemble_a, assemble_a_with, assemble_terms, bandwidth_from_wavelength, has_limits,
    pump_duration, AssemblyOptions, LimitPolicy, ModeFunctionTerms, CW_BANDWIDTH_RATIO,
    DEFAULT_LIMIT_FACTOR,
};
pub use form::{cholesky, det_pd, Determinant, QuadraticForm, SYMMETRY_TOLERANCE};
pub use pairing::{TraceKind, TracePairing};

use crate::config::{Config, PumpSpectrum};
use crate::error::{Error, Result};
use crate::phasematch::{DeltaEvaluator, Linearization};

/// Largest accepted pivot ratio of an equilibrated factorization.
pub const MAX_PIVOT_RATIO: f64 = 1e12;

/// Purities in `(1, 1 + PURITY_OVERSHOOT]` are rounding and get clamped.
pub const PURITY_OVERSHOOT: f64 = 1e-9;

/// Agreement required between the two extreme-value representations and
/// between CW pump durations T₀ and 2T₀.
pub const LIMIT_CONVERGENCE: f64 = 1e-4;

/// Second extreme factor used to confirm limit convergence.
pub const LIMIT_CHECK_FACTOR: f64 = 1e7;

pub fn compose_traced_form(a: &QuadraticForm, pairing: &TracePairing) -> Result<QuadraticForm> {
    pairing.compose(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityValue {
    pub value: f64,
    /// The raw ratio exceeded 1 by rounding and was clamped.
    pub clamped: bool,
    pub form: Determinant,
    pub composed: Determinant,
}

fn checked_det(m: &QuadraticForm, what: &str) -> Result<Determinant> {
    let d = det_pd(m)?;
    if !d.positive_definite {
        return Err(Error::Conditioning {
            message: format!(
                "{what} is not positive definite (pivot {:.3e})",
                d.min_pivot
            ),
            pivot_ratio: f64::INFINITY,
        });
    }
    if d.pivot_ratio() > MAX_PIVOT_RATIO {
        return Err(Error::Conditioning {
            message: format!("{what} is ill-conditioned"),
            pivot_ratio: d.pivot_ratio(),
        });
    }
    Ok(d)
}

/// `det(2A) / √det(M)` for the pairing's composed form `M`.
pub fn purity(a: &QuadraticForm, pairing: &TracePairing) -> Result<PurityValue> {
    let form = checked_det(a, "mode-function matrix")?;
    let m = pairing.compose(a)?;
    let composed = checked_det(&m, &format!("{} trace form", pairing.kind))?;
    let n = a.dim() as f64;
    let log_p = n * std::f64::consts::LN_2 + form.log_det - 0.5 * composed.log_det;
    let raw = log_p.exp();
    if raw > 1.0 + PURITY_OVERSHOOT {
        return Err(Error::Conditioning {
            message: format!("{} purity {raw} exceeds 1", pairing.kind),
            pivot_ratio: composed.pivot_ratio(),
        });
    }
    let clamped = raw > 1.0;
    if clamped {
        log::warn!("{} purity {raw} clamped to 1", pairing.kind);
    }
    Ok(PurityValue {
        value: raw.min(1.0),
        clamped,
        form,
        composed,
    })
}

/// Schmidt number `K = 1/P` and I-concurrence `C = √(2(1 − P))` of a
/// signal purity `P`.
pub fn entanglement_measures(purity_signal: f64) -> Result<(f64, f64)> {
    if !(purity_signal > 0.0 && purity_signal <= 1.0) {
        return Err(Error::Validation(format!(
            "purity must lie in (0, 1], got {purity_signal}"
        )));
    }
    Ok((1.0 / purity_signal, (2.0 * (1.0 - purity_signal)).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheck {
    pub spatial_change: f64,
    pub signal_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwCheck {
    pub spatial_change: f64,
    pub signal_change: f64,
    /// The signal purity has no finite CW limit; it keeps scaling as 1/T₀.
    pub signal_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub cut_angle: f64,
    pub walkoff: f64,
    pub pump_duration: f64,
    pub a: Determinant,
    pub b: Determinant,
    pub c: Determinant,
    pub clamped_spatial: bool,
    pub clamped_signal: bool,
    pub limit_check: Option<LimitCheck>,
    pub cw_check: Option<CwCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityReport {
    /// `Tr ρ_q²` after tracing out the frequencies.
    pub purity_spatial_pair: f64,
    /// `Tr ρ_signal²` after tracing out the idler.
    pub purity_signal: f64,
    pub schmidt_k: f64,
    pub i_concurrence: f64,
    pub diagnostics: Diagnostics,
}

struct Evaluation {
    spatial: PurityValue,
    signal: PurityValue,
    pump_duration: f64,
}

fn evaluate_once(
    config: &Config,
    lin: &Linearization,
    options: &AssemblyOptions,
) -> Result<Evaluation> {
    let terms = assemble_terms(config, lin, options)?;
    let a = terms.matrix();
    Ok(Evaluation {
        spatial: purity(&a, &TracePairing::frequency())?,
        signal: purity(&a, &TracePairing::idler())?,
        pump_duration: terms.pump_duration,
    })
}

/// Full evaluation of one configuration: linearize, assemble `A`, both
/// purities, entanglement measures, and the limit convergence checks.
pub fn evaluate(config: &Config) -> Result<PurityReport> {
    config.validate()?;
    let evaluator = DeltaEvaluator::new(config)?;
    let lin = evaluator.linearize()?;
    let options = AssemblyOptions::default();
    let main = evaluate_once(config, &lin, &options)?;

    let limit_check = if has_limits(config) {
        let check = evaluate_once(
            config,
            &lin,
            &AssemblyOptions {
                limits: LimitPolicy::Extreme(LIMIT_CHECK_FACTOR),
                ..options
            },
        )?;
        let lc = LimitCheck {
            spatial_change: (check.spatial.value - main.spatial.value).abs(),
            signal_change: (check.signal.value - main.signal.value).abs(),
        };
        if lc.spatial_change > LIMIT_CONVERGENCE || lc.signal_change > LIMIT_CONVERGENCE {
            return Err(Error::Limit(format!(
                "extreme-value representation not converged (changes {:.3e}, {:.3e})",
                lc.spatial_change, lc.signal_change
            )));
        }
        Some(lc)
    } else {
        None
    };

    let cw_check = if config.pump_spectrum == PumpSpectrum::ContinuousWave {
        let check = evaluate_once(
            config,
            &lin,
            &AssemblyOptions {
                pump_duration_scale: 2.0,
                ..options
            },
        )?;
        let cw = CwCheck {
            spatial_change: (check.spatial.value - main.spatial.value).abs(),
            signal_change: (check.signal.value - main.signal.value).abs(),
            signal_converged: (check.signal.value - main.signal.value).abs() <= LIMIT_CONVERGENCE,
        };
        if cw.spatial_change > LIMIT_CONVERGENCE {
            return Err(Error::Limit(format!(
                "CW pump representation not converged: doubling T0 changes the spatial purity by {:.3e}",
                cw.spatial_change
            )));
        }
        Some(cw)
    } else {
        None
    };

    let (schmidt_k, i_concurrence) = entanglement_measures(main.signal.value)?;
    Ok(PurityReport {
        purity_spatial_pair: main.spatial.value,
        purity_signal: main.signal.value,
        schmidt_k,
        i_concurrence,
        diagnostics: Diagnostics {
            cut_angle: evaluator.cut_angle(),
            walkoff: evaluator.walkoff(),
            pump_duration: main.pump_duration,
            a: main.spatial.form,
            b: main.spatial.composed,
            c: main.signal.composed,
            clamped_spatial: main.spatial.clamped,
            clamped_signal: main.signal.clamped,
            limit_check,
            cw_check,
        },
    })
}
