//! Helpers shared by the integration tests: an independently written
//! Δ₀/Δ_k evaluator and `A` assembler, and a random config generator.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdc_purity::dispersion::{refractive_index, CrystalModel, OpticalAxis};
use spdc_purity::phasematch::DeltaEvaluator;
use spdc_purity::{angular_frequency, Config, CutAngle, PumpSpectrum, Walkoff, SPEED_OF_LIGHT};

pub const C: f64 = 0.299_792_458;

/// (a, b, c, d) of n² = a + b/(λ² − c) − dλ², ordinary then extraordinary.
fn coefficients(crystal: &CrystalModel) -> [[f64; 4]; 2] {
    match crystal.kind.to_string().to_ascii_lowercase().as_str() {
        "bbo" => [
            [2.7405, 0.0184, 0.0179, 0.0155],
            [2.3730, 0.0128, 0.0156, 0.0044],
        ],
        "liio3" => [
            [3.415716, 0.047031, 0.035306, 0.008801],
            [2.918692, 0.035145, 0.028224, 0.003641],
        ],
        other => panic!("no reference coefficients for {other}"),
    }
}

fn sellmeier(k: [f64; 4], lam: f64) -> f64 {
    let l2 = lam * lam;
    (k[0] + k[1] / (l2 - k[2]) - k[3] * l2).sqrt()
}

pub struct Reference {
    no: [f64; 4],
    ne: [f64; 4],
    theta: f64,
    rho: f64,
    cfg: Config,
}

impl Reference {
    pub fn new(cfg: &Config, theta: f64, rho: f64) -> Self {
        let [no, ne] = coefficients(&cfg.crystal);
        Self {
            no,
            ne,
            theta,
            rho,
            cfg: cfg.clone(),
        }
    }

    fn n_o(&self, lam: f64) -> f64 {
        sellmeier(self.no, lam)
    }

    fn n_pump(&self, lam: f64) -> f64 {
        let (o, e) = (sellmeier(self.no, lam), sellmeier(self.ne, lam));
        let (s, c) = self.theta.sin_cos();
        (c * c / (o * o) + s * s / (e * e)).powf(-0.5)
    }

    fn omega(lam: f64) -> f64 {
        2.0 * std::f64::consts::PI * C / lam
    }

    fn lam(omega: f64) -> f64 {
        2.0 * std::f64::consts::PI * C / omega
    }

    fn kz(&self, w: f64, qx: f64, qy: f64) -> f64 {
        let k = w * self.n_o(Self::lam(w)) / C;
        (k * k - qx * qx - qy * qy).sqrt()
    }

    pub fn delta0(&self, x: &[f64; 6]) -> f64 {
        let c = &self.cfg;
        let ks = self.kz(Self::omega(c.signal_wavelength) + x[2], x[0], x[1]);
        let ki = self.kz(Self::omega(c.idler_wavelength) + x[5], x[3], x[4]);
        x[1] * c.emission_angle_signal.cos()
            + x[4] * c.emission_angle_idler.cos()
            + ks * c.emission_angle_signal.sin()
            - ki * c.emission_angle_idler.sin()
    }

    pub fn deltak(&self, x: &[f64; 6]) -> f64 {
        let c = &self.cfg;
        let ks = self.kz(Self::omega(c.signal_wavelength) + x[2], x[0], x[1]);
        let ki = self.kz(Self::omega(c.idler_wavelength) + x[5], x[3], x[4]);
        let wp = Self::omega(c.pump_wavelength) + x[2] + x[5];
        let kp = wp * self.n_pump(Self::lam(wp)) / C;
        kp - ks * c.emission_angle_signal.cos()
            - ki * c.emission_angle_idler.cos()
            - x[1] * c.emission_angle_signal.sin()
            + x[4] * c.emission_angle_idler.sin()
            + (x[0] + x[3]) * self.rho.tan() * c.azimuth.cos()
            + self.delta0(x) * self.rho.tan() * c.azimuth.sin()
    }

    /// Group index from a central difference of the wave number in ω.
    fn group(&self, lam: f64, pump: bool) -> f64 {
        let w = Self::omega(lam);
        let h = 1e-6 * w;
        let k = |w: f64| {
            let n = if pump {
                self.n_pump(Self::lam(w))
            } else {
                self.n_o(Self::lam(w))
            };
            w * n / C
        };
        C * (k(w + h) - k(w - h)) / (2.0 * h)
    }

    /// Written out entry by entry rather than through rank-one updates.
    /// Finite filters and collection widths only.
    pub fn matrix_a(&self, t0: f64) -> [[f64; 6]; 6] {
        let c = &self.cfg;
        let (ps, pi) = (c.emission_angle_signal, c.emission_angle_idler);
        let (ngs, ngi, ngp) = (
            self.group(c.signal_wavelength, false),
            self.group(c.idler_wavelength, false),
            self.group(c.pump_wavelength, true),
        );
        let tr = self.rho.tan();
        let d0 = [
            0.0,
            ps.cos(),
            ps.sin() * ngs / C,
            0.0,
            pi.cos(),
            -pi.sin() * ngi / C,
        ];
        let mut dk = [
            tr * c.azimuth.cos(),
            -ps.sin(),
            (ngp - ps.cos() * ngs) / C,
            tr * c.azimuth.cos(),
            pi.sin(),
            (ngp - pi.cos() * ngi) / C,
        ];
        for j in 0..6 {
            dk[j] += tr * c.azimuth.sin() * d0[j];
        }
        let bw = |dl: f64, lam: f64| {
            std::f64::consts::PI * C * dl * 1e-3 / (lam * lam * 2f64.ln().sqrt())
        };
        let (bs, bi) = (
            bw(c.filter_width_signal, c.signal_wavelength),
            bw(c.filter_width_idler, c.idler_wavelength),
        );
        let wp2 = c.pump_waist * c.pump_waist;
        let pm = c.beta * c.beta * c.length * c.length / 2.0;
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                a[i][j] = wp2 / 2.0 * d0[i] * d0[j] + pm * dk[i] * dk[j];
            }
        }
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            a[i][j] += wp2 / 2.0;
        }
        for (i, j) in [(2, 2), (2, 5), (5, 2), (5, 5)] {
            a[i][j] += t0 * t0 / 2.0;
        }
        a[0][0] += c.collection_width_signal.powi(2);
        a[1][1] += c.collection_width_signal.powi(2);
        a[3][3] += c.collection_width_idler.powi(2);
        a[4][4] += c.collection_width_idler.powi(2);
        a[2][2] += 1.0 / (bs * bs);
        a[5][5] += 1.0 / (bi * bi);
        a
    }
}

/// Central-difference gradient of `f` at 0 with steps 1e-4·k_n⁰ along q and
/// 1e-4·ω_n⁰ along Ω; returns the worst of |lin − fd| / max(|fd|, 1).
fn fd_mismatch(ev: &DeltaEvaluator<'_>, lin: &[f64; 6], f: impl Fn(&[f64; 6]) -> f64) -> f64 {
    let c = ev.config();
    let ws = angular_frequency(c.signal_wavelength);
    let wi = angular_frequency(c.idler_wavelength);
    let ns = refractive_index(&c.crystal, OpticalAxis::ordinary(), c.signal_wavelength).unwrap();
    let ni = refractive_index(&c.crystal, OpticalAxis::ordinary(), c.idler_wavelength).unwrap();
    let (ks, ki) = (ws * ns / SPEED_OF_LIGHT, wi * ni / SPEED_OF_LIGHT);
    let steps = [
        1e-4 * ks,
        1e-4 * ks,
        1e-4 * ws,
        1e-4 * ki,
        1e-4 * ki,
        1e-4 * wi,
    ];
    let mut worst = 0.0f64;
    for j in 0..6 {
        let mut xp = [0.0; 6];
        let mut xm = [0.0; 6];
        xp[j] = steps[j];
        xm[j] = -steps[j];
        let fd = (f(&xp) - f(&xm)) / (2.0 * steps[j]);
        worst = worst.max((lin[j] - fd).abs() / fd.abs().max(1.0));
    }
    worst
}

/// Worst Δ₀ and Δ_k gradient mismatches against central differences.
pub fn gradient_mismatch(cfg: &Config) -> (f64, f64) {
    let ev = DeltaEvaluator::new(cfg).unwrap();
    let lin = ev.linearize().unwrap();
    let e0 = fd_mismatch(&ev, &lin.d0_grad, |x| ev.delta0(x).unwrap());
    let ek = fd_mismatch(&ev, &lin.dk_grad, |x| ev.deltak(x).unwrap());
    (e0, ek)
}

/// Random valid config with finite filters and collection widths and a
/// pulsed pump, over the ranges of the built-in scenarios.
pub fn random_config(rng: &mut ChaCha8Rng) -> Config {
    let bbo = rng.random_bool(0.3);
    let (crystal, length) = if bbo {
        (CrystalModel::bbo(), rng.random_range(500.0..2500.0))
    } else {
        (CrystalModel::liio3(), rng.random_range(500.0..2000.0))
    };
    let pump = 0.405;
    let signal: f64 = rng.random_range(0.78..0.84);
    let idler = 1.0 / (1.0 / pump - 1.0 / signal);
    let phi_s: f64 = rng.random_range(0.0f64..15.0).to_radians();
    let phi_i = phi_s * rng.random_range(0.9..1.1);
    let walkoff = if rng.random_bool(0.3) {
        Walkoff::Computed
    } else {
        Walkoff::Manual(0.0)
    };
    Config {
        crystal,
        length,
        pump_wavelength: pump,
        signal_wavelength: signal,
        idler_wavelength: idler,
        pump_waist: rng.random_range(30.0..800.0),
        pump_spectrum: if rng.random_bool(0.5) {
            PumpSpectrum::Bandwidth(rng.random_range(0.2..2.0))
        } else {
            PumpSpectrum::Duration(rng.random_range(100.0..2000.0))
        },
        collection_width_signal: rng.random_range(50.0..1000.0),
        collection_width_idler: rng.random_range(50.0..1000.0),
        filter_width_signal: rng.random_range(0.5..10.0),
        filter_width_idler: rng.random_range(0.5..10.0),
        emission_angle_signal: phi_s,
        emission_angle_idler: phi_i,
        azimuth: rng.random_range(0.0..std::f64::consts::TAU),
        walkoff,
        cut_angle: CutAngle::Auto,
        beta: 0.455,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
