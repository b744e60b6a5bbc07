//! 1+1-dimensional reduced model: per photon one transverse momentum
//! (`q^y`) and one frequency, with the x-momenta set to zero.
//!
//! Coordinates `y = (q_s^y, Ω_s, q_i^y, Ω_i)`. The purity integrals are
//! evaluated by dense trapezoid quadrature: the mode function on the grid
//! is reshaped into a matrix `M` (kept × traced coordinates), and
//! `Tr ρ² / (Tr ρ)² = Σ(MMᵀ)² / (ΣM²)²`.

use ndarray::Array2;
use rayon::prelude::*;

use crate::config::{Config, CutAngle, Walkoff};
use crate::error::{Error, Result};
use crate::phasematch::{coord, DeltaEvaluator};
use crate::quadratic_state::{
    assemble_terms, cholesky, purity, AssemblyOptions, QuadraticForm, TraceKind, TracePairing,
};

/// Full-model indices of the reduced coordinates.
pub const REDUCED_COORDS: [usize; 4] = [coord::QSY, coord::WS, coord::QIY, coord::WI];

/// Half width of the integration window in standard deviations.
pub const WINDOW_SIGMAS: f64 = 6.0;

/// Largest accepted `|Φ|²` on the window boundary, relative to the peak.
pub const CLIPPING_THRESHOLD: f64 = 1e-8;

/// Smallest grid accepted by [`reduced_model_purity`].
pub const MIN_GRID: usize = 32;

/// Smallest grid accepted anywhere, e.g. the bottom rung of a convergence ladder.
pub const MIN_LADDER_GRID: usize = 8;

/// Grid rows whose largest amplitude is below this fraction of the peak are dropped.
const PRUNE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedVariant {
    /// `exp(-½ yᵀ A_r y)` with `A_r` the reduced block of the linearized `A`.
    Gaussian,
    /// Exact Δ₀ in the pump envelope and the true `sinc(Δ_k L/2)`.
    ExactSinc,
}

/// `(kept, traced)` positions within `y` for each trace.
fn split(kind: TraceKind) -> Result<([usize; 2], [usize; 2])> {
    match kind {
        TraceKind::Frequency => Ok(([0, 2], [1, 3])),
        TraceKind::Idler => Ok(([0, 1], [2, 3])),
        TraceKind::Momentum => Ok(([1, 3], [0, 2])),
        TraceKind::Custom => Err(Error::Validation(
            "the reduced model supports frequency, idler and momentum traces".into(),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct ReducedModel {
    /// Copy of the input with cut angle and walk-off pinned.
    config: Config,
    a: QuadraticForm,
    envelope: QuadraticForm,
    /// Envelope plus the linearized pump-y term; sizes the sinc-variant window.
    window: QuadraticForm,
    pump_y_weight: f64,
}

impl ReducedModel {
    pub fn new(config: &Config) -> Result<Self> {
        config.validate()?;
        let evaluator = DeltaEvaluator::new(config)?;
        let lin = evaluator.linearize()?;
        let terms = assemble_terms(config, &lin, &AssemblyOptions::default())?;
        let envelope = terms.base.submatrix(&REDUCED_COORDS);
        let mut window = envelope.clone();
        let d0: Vec<f64> = REDUCED_COORDS.iter().map(|&j| lin.d0_grad[j]).collect();
        window.add_rank_one(terms.pump_y_weight, &d0);
        let mut pinned = config.clone();
        pinned.cut_angle = CutAngle::Manual(evaluator.cut_angle());
        pinned.walkoff = Walkoff::Manual(evaluator.walkoff());
        Ok(Self {
            config: pinned,
            a: terms.matrix().submatrix(&REDUCED_COORDS),
            envelope,
            window,
            pump_y_weight: terms.pump_y_weight,
        })
    }

    /// The 4×4 reduced block `A_r` of the linearized mode function.
    pub fn matrix(&self) -> &QuadraticForm {
        &self.a
    }

    pub fn pairing(kind: TraceKind) -> Result<TracePairing> {
        let (_, traced) = split(kind)?;
        Ok(TracePairing::from_traced(kind, 4, &traced))
    }

    /// `det(2A_r)/√det(M₈)` for the reduced Gaussian.
    pub fn determinant_purity(&self, kind: TraceKind) -> Result<f64> {
        Ok(purity(&self.a, &Self::pairing(kind)?)?.value)
    }

    fn half_widths(&self, variant: ReducedVariant) -> Result<[f64; 4]> {
        let m = match variant {
            ReducedVariant::Gaussian => &self.a,
            ReducedVariant::ExactSinc => &self.window,
        };
        let variances = inverse_diagonal(m).ok_or_else(|| {
            Error::Window(format!(
                "{variant:?} envelope is not positive definite; the window cannot be sized"
            ))
        })?;
        Ok(variances.map(|v| WINDOW_SIGMAS * v.sqrt()))
    }

    /// Mode function at reduced coordinates `y`, unnormalized.
    pub fn amplitude(&self, variant: ReducedVariant, y: &[f64; 4]) -> Result<f64> {
        match variant {
            ReducedVariant::Gaussian => Ok((-0.5 * self.a.quadratic(y)).exp()),
            ReducedVariant::ExactSinc => {
                let ev = DeltaEvaluator::new(&self.config)?;
                self.exact_amplitude(&ev, y)
            }
        }
    }

    fn exact_amplitude(&self, ev: &DeltaEvaluator<'_>, y: &[f64; 4]) -> Result<f64> {
        let mut x = [0.0; 6];
        for (&j, &v) in REDUCED_COORDS.iter().zip(y) {
            x[j] = v;
        }
        let d0 = ev.delta0(&x)?;
        let u = 0.5 * ev.deltak(&x)? * self.config.length;
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        Ok((-0.5 * (self.envelope.quadratic(y) + self.pump_y_weight * d0 * d0)).exp() * sinc)
    }

    /// Trapezoid-quadrature purity on `grid` points per axis.
    pub fn quadrature_purity(
        &self,
        kind: TraceKind,
        variant: ReducedVariant,
        grid: usize,
    ) -> Result<f64> {
        if grid < MIN_LADDER_GRID {
            return Err(Error::Validation(format!(
                "quadrature grid must have at least {MIN_LADDER_GRID} points, got {grid}"
            )));
        }
        let (kept, traced) = split(kind)?;
        let half = self.half_widths(variant)?;
        let nodes: Vec<[f64; 2]> = (0..grid)
            .map(|k| {
                let t = -1.0 + 2.0 * k as f64 / (grid - 1) as f64;
                let w: f64 = if k == 0 || k == grid - 1 { 0.5 } else { 1.0 };
                [t, w.sqrt()]
            })
            .collect();
        let ev = DeltaEvaluator::new(&self.config)?;
        let n = grid * grid;

        struct Row {
            values: Vec<f64>,
            peak: f64,
            boundary: f64,
        }
        let rows: Vec<Row> = (0..n)
            .into_par_iter()
            .map(|r| -> Result<Row> {
                let (ia, ib) = (r / grid, r % grid);
                let mut values = vec![0.0; n];
                let (mut peak, mut boundary) = (0.0f64, 0.0f64);
                let edge = |i: usize| i == 0 || i == grid - 1;
                let mut y = [0.0; 4];
                y[kept[0]] = nodes[ia][0] * half[kept[0]];
                y[kept[1]] = nodes[ib][0] * half[kept[1]];
                for (c, slot) in values.iter_mut().enumerate() {
                    let (ic, id) = (c / grid, c % grid);
                    y[traced[0]] = nodes[ic][0] * half[traced[0]];
                    y[traced[1]] = nodes[id][0] * half[traced[1]];
                    let phi = match variant {
                        ReducedVariant::Gaussian => (-0.5 * self.a.quadratic(&y)).exp(),
                        ReducedVariant::ExactSinc => self.exact_amplitude(&ev, &y)?,
                    };
                    let mag = phi.abs();
                    peak = peak.max(mag);
                    if edge(ia) || edge(ib) || edge(ic) || edge(id) {
                        boundary = boundary.max(mag);
                    }
                    *slot = phi * nodes[ia][1] * nodes[ib][1] * nodes[ic][1] * nodes[id][1];
                }
                Ok(Row {
                    values,
                    peak,
                    boundary,
                })
            })
            .collect::<Result<_>>()?;

        let peak = rows.iter().fold(0.0f64, |m, r| m.max(r.peak));
        let boundary = rows.iter().fold(0.0f64, |m, r| m.max(r.boundary));
        if !(peak > 0.0) {
            return Err(Error::Window(
                "mode function vanishes on the whole grid".into(),
            ));
        }
        let ratio = (boundary / peak).powi(2);
        if ratio > CLIPPING_THRESHOLD {
            return Err(Error::Window(format!(
                "window clips the mode function: boundary density {ratio:.3e} of peak"
            )));
        }

        let cut = PRUNE * peak;
        let keep_rows: Vec<usize> = (0..n).filter(|&r| rows[r].peak > cut).collect();
        let keep_cols: Vec<usize> = (0..n)
            .filter(|&c| keep_rows.iter().any(|&r| rows[r].values[c].abs() > cut))
            .collect();
        let mut m = Array2::<f64>::zeros((keep_rows.len(), keep_cols.len()));
        for (i, &r) in keep_rows.iter().enumerate() {
            for (j, &c) in keep_cols.iter().enumerate() {
                m[(i, j)] = rows[r].values[c];
            }
        }
        let norm: f64 = m.iter().map(|v| v * v).sum();
        let g = if m.nrows() <= m.ncols() {
            m.dot(&m.t())
        } else {
            m.t().dot(&m)
        };
        let tr_rho2: f64 = g.iter().map(|v| v * v).sum();
        Ok(tr_rho2 / (norm * norm))
    }

    /// Quadrature purities on each grid of `grids`, in order.
    pub fn convergence(
        &self,
        kind: TraceKind,
        variant: ReducedVariant,
        grids: &[usize],
    ) -> Result<Vec<(usize, f64)>> {
        grids
            .iter()
            .map(|&g| Ok((g, self.quadrature_purity(kind, variant, g)?)))
            .collect()
    }
}

/// Reduced-model purity by quadrature on `grid ≥ 32` points per axis.
pub fn reduced_model_purity(
    config: &Config,
    grid: usize,
    kind: TraceKind,
    variant: ReducedVariant,
) -> Result<f64> {
    if grid < MIN_GRID {
        return Err(Error::Validation(format!(
            "reduced-model grid must have at least {MIN_GRID} points, got {grid}"
        )));
    }
    ReducedModel::new(config)?.quadrature_purity(kind, variant, grid)
}

/// Diagonal of `M⁻¹` for a symmetric positive definite `M`.
fn inverse_diagonal(m: &QuadraticForm) -> Option<[f64; 4]> {
    let n = m.dim();
    debug_assert_eq!(n, 4);
    let l = cholesky(m)?;
    let mut out = [0.0; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        // (M⁻¹)_jj = |L⁻¹ e_j|²
        let mut z = vec![0.0; n];
        for i in j..n {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for k in j..i {
                s -= l[i * n + k] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        *slot = z.iter().map(|v| v * v).sum();
    }
    Some(out)
}
