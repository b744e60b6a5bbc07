use crate::config::Config;
use crate::error::{Error, Result};

pub const MIN_SINC_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincDiscrepancy {
    /// `max |sinc(u) − exp(−β²u²)|` over the window.
    pub max_abs: f64,
    /// `‖sinc − gauss‖₂ / ‖sinc‖₂`, trapezoid rule.
    pub l2_relative: f64,
}

/// `sinc(Δ_k L/2)` and its Gaussian stand-in `exp(−β²Δ_k²L²/4)` at one Δ_k.
pub fn sinc_and_gaussian(delta_k: f64, length: f64, beta: f64) -> (f64, f64) {
    let u = 0.5 * delta_k * length;
    let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
    (sinc, (-beta * beta * u * u).exp())
}

/// Deviation of the Gaussian phase-matching profile from the true sinc
/// along Δ_k over `[−4π/L, 4π/L]`, on `grid ≥ 64` uniform points.
pub fn sinc_gaussian_discrepancy(config: &Config, grid: usize) -> Result<SincDiscrepancy> {
    if grid < MIN_SINC_GRID {
        return Err(Error::Validation(format!(
            "sinc audit grid must have at least {MIN_SINC_GRID} points, got {grid}"
        )));
    }
    let span = 4.0 * std::f64::consts::PI / config.length;
    let (mut max_abs, mut diff2, mut norm2) = (0.0f64, 0.0, 0.0);
    for k in 0..grid {
        let dk = -span + 2.0 * span * k as f64 / (grid - 1) as f64;
        let w = if k == 0 || k == grid - 1 { 0.5 } else { 1.0 };
        let (s, g) = sinc_and_gaussian(dk, config.length, config.beta);
        max_abs = max_abs.max((s - g).abs());
        diff2 += w * (s - g) * (s - g);
        norm2 += w * s * s;
    }
    Ok(SincDiscrepancy {
        max_abs,
        l2_relative: (diff2 / norm2).sqrt(),
    })
}
