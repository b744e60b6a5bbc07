use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadratic_state::{cholesky, QuadraticForm, TracePairing};

pub const MIN_SAMPLES: usize = 10_000;

/// Samples per independent ChaCha stream.
pub const CHUNK: usize = 1 << 14;

/// Smallest accepted effective sample size, as a fraction of the samples.
pub const MIN_ESS_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub effective_sample_size: f64,
}

impl McEstimate {
    /// (reference − estimate) / standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        (reference - self.mean) / self.std_error
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Importance-sampling estimate of `det(2A)/√det(M)` for the pairing's
/// composed form `M`.
///
/// Proposal: `X = (x, x')` with `x, x'` independent draws from
/// `N(0, A⁻¹)`, i.e. the Gaussian with matrix `diag(A, A)`. Then
/// `Tr ρ² = 2ⁿ E[exp(-½ Xᵀ(M − diag(A, A))X)]`. For the physical pairings
/// the exponent is a sum of two `A`-forms, so weights lie in `[0, 1]`.
///
/// Stream `k` of `ChaCha8Rng::seed_from_u64(seed)` draws chunk `k` of
/// [`CHUNK`] samples, so results do not depend on the thread count.
pub fn mc_gaussian_purity(
    a: &QuadraticForm,
    pairing: &TracePairing,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::Validation(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let n = a.dim();
    if pairing.dim() != n {
        return Err(Error::Validation(format!(
            "pairing dimension {} does not match form dimension {n}",
            pairing.dim()
        )));
    }
    let l = cholesky(a).ok_or_else(|| Error::Conditioning {
        message: "proposal matrix diag(A, A) is not positive definite".into(),
        pivot_ratio: f64::INFINITY,
    })?;

    let unprimed: Vec<usize> = (0..n).collect();
    let primed: Vec<usize> = (n..2 * n).collect();
    let mut extra_maps = Vec::new();
    let (mut has_x, mut has_xp) = (false, false);
    for map in pairing.maps() {
        if !has_x && *map == unprimed {
            has_x = true;
        } else if !has_xp && *map == primed {
            has_xp = true;
        } else {
            extra_maps.push(map.clone());
        }
    }

    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Neumaier, Neumaier)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(samples - chunk * CHUNK);
            let mut big_x = vec![0.0; 2 * n];
            let mut z = vec![0.0; n];
            let mut sel = vec![0.0; n];
            let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
            for _ in 0..count {
                for half in 0..2 {
                    for zi in z.iter_mut() {
                        *zi = rng.sample(StandardNormal);
                    }
                    // Lᵀ x = z  ⇒  x ~ N(0, A⁻¹)
                    let x = &mut big_x[half * n..(half + 1) * n];
                    for i in (0..n).rev() {
                        let mut s = z[i];
                        for k in (i + 1)..n {
                            s -= l[k * n + i] * x[k];
                        }
                        x[i] = s / l[i * n + i];
                    }
                }
                let mut exponent = 0.0;
                for map in &extra_maps {
                    for (slot, &idx) in sel.iter_mut().zip(map) {
                        *slot = big_x[idx];
                    }
                    exponent += a.quadratic(&sel);
                }
                if !has_x {
                    exponent -= a.quadratic(&big_x[..n]);
                }
                if !has_xp {
                    exponent -= a.quadratic(&big_x[n..]);
                }
                let w = (-0.5 * exponent).exp();
                s1.add(w);
                s2.add(w * w);
            }
            (s1, s2)
        })
        .collect();

    let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
    for (p1, p2) in &partial {
        s1.add(p1.value());
        s2.add(p2.value());
    }
    let (s1, s2) = (s1.value(), s2.value());
    let count = samples as f64;
    let ess = if s2 > 0.0 { s1 * s1 / s2 } else { 0.0 };
    if ess < MIN_ESS_FRACTION * count {
        return Err(Error::Conditioning {
            message: format!(
                "importance weights degenerate: effective sample size {ess:.1} of {samples}"
            ),
            pivot_ratio: f64::NAN,
        });
    }
    let mean_w = s1 / count;
    let var_w = ((s2 / count - mean_w * mean_w) * count / (count - 1.0)).max(0.0);
    let scale = 2f64.powi(n as i32);
    Ok(McEstimate {
        mean: scale * mean_w,
        std_error: scale * (var_w / count).sqrt(),
        samples,
        effective_sample_size: ess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_samples_rejected() {
        let a = QuadraticForm::identity(6);
        assert!(mc_gaussian_purity(&a, &TracePairing::frequency(), 100, 1).is_err());
    }

    #[test]
    fn separable_form_is_pure() {
        let a = QuadraticForm::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let est = mc_gaussian_purity(&a, &TracePairing::frequency(), 100_000, 7).unwrap();
        assert!(
            (est.mean - 1.0).abs() < 3.0 * est.std_error + 1e-12,
            "{est:?}"
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let mut a = QuadraticForm::identity(6);
        a[(2, 5)] = 0.6;
        a[(5, 2)] = 0.6;
        let p = TracePairing::idler();
        let e1 = mc_gaussian_purity(&a, &p, 50_000, 42).unwrap();
        let e2 = mc_gaussian_purity(&a, &p, 50_000, 42).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn compensated_sum_is_exact_on_cancelling_terms() {
        let mut s = Neumaier::default();
        for v in [1e16, 1.0, -1e16, 1.0] {
            s.add(v);
        }
        assert_eq!(s.value(), 2.0);
    }
}
