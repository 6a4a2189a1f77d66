//! Small-amplitude periodic traveling waves.
//!
//! The profile equation in the co-moving frame `z = k(x - ct)` is
//!
//! ```text
//! -c k^2 w'' + beta k^2 M_k w'' + k^2 (w^2)'' - gamma w = 0
//! ```
//!
//! and its even `2pi`-periodic solutions bifurcating from `a cos z` are
//! `w = a cos z + a^2 A2 cos 2z + a^3 A3 cos 3z + O(a^4)`,
//! `c = c0 + a^2 c2 + ...`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;
use crate::symbols::{DispersionSymbol, ModelParams};

/// Default bound on `|a|` for profile and speed evaluation.
pub const DEFAULT_AMPLITUDE_BOUND: f64 = 0.1;

/// Below this magnitude a harmonic denominator counts as resonant.
pub fn resonance_floor(p: &ModelParams) -> f64 {
    1e-8 * p.gamma.max(1.0)
}

/// `gamma (n^2 - 1) + beta n^2 k^2 (m(k) - m(nk))`.
///
/// The `n`-th harmonic of the Stokes expansion is divided by this quantity;
/// `n = 2` gives the denominator of `A2` and `n = 3` that of `A3`. It vanishes
/// exactly on the resonance relation `k^2 (m(nk) - m(k)) = gamma (n^2-1) / (beta n^2)`.
pub fn harmonic_denominator(s: &DispersionSymbol, p: &ModelParams, k: f64, n: u32) -> f64 {
    let n = n as f64;
    p.gamma * (n * n - 1.0) + p.beta * n * n * k * k * (s.m(k) - s.m(n * k))
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWavenumber(k))
    }
}

/// Harmonics `n` in `[2, nmax]` whose denominator is below the floor at `k`.
pub fn check_resonance(
    s: &DispersionSymbol,
    p: &ModelParams,
    k: f64,
    nmax: u32,
) -> Result<Vec<u32>> {
    check_k(k)?;
    if nmax < 2 {
        return Err(Error::InvalidArgument(format!(
            "nmax must be at least 2, got {nmax}"
        )));
    }
    let floor = resonance_floor(p);
    Ok((2..=nmax)
        .filter(|&n| harmonic_denominator(s, p, k, n).abs() < floor)
        .collect())
}

/// Resonant wavenumbers of harmonic `n` in `[lo, hi]`, from sign changes of
/// the harmonic denominator on a log-spaced grid refined by bisection.
pub fn find_resonances(
    s: &DispersionSymbol,
    p: &ModelParams,
    n: u32,
    lo: f64,
    hi: f64,
    n_probe: usize,
) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let probes = roots::log_grid(lo, hi, n_probe.max(2));
    Ok(roots::sign_change_roots(
        |k| harmonic_denominator(s, p, k, n),
        &probes,
        1e-13 * hi,
    ))
}

/// Coefficients of the Stokes expansion at one wavenumber.
#[derive(Debug, Clone)]
pub struct StokesWave {
    pub symbol: DispersionSymbol,
    pub params: ModelParams,
    pub k: f64,
    pub c0: f64,
    pub c2: f64,
    pub a2: f64,
    pub a3: f64,
    amplitude_bound: f64,
}

/// One point of the truncated profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    pub z: f64,
    pub w: f64,
    /// Highest power of `a` kept in the profile.
    pub order: u32,
}

/// Builds the Stokes coefficients at `k`.
pub fn expand(s: &DispersionSymbol, p: &ModelParams, k: f64) -> Result<StokesWave> {
    check_k(k)?;
    let floor = resonance_floor(p);
    let den2 = harmonic_denominator(s, p, k, 2);
    if den2.abs() < floor {
        return Err(Error::Resonance {
            n: 2,
            k,
            denominator: den2,
            floor,
        });
    }
    let den3 = harmonic_denominator(s, p, k, 3);
    if den3.abs() < floor {
        return Err(Error::Resonance {
            n: 3,
            k,
            denominator: den3,
            floor,
        });
    }
    let v = s.eval(k)?;
    let k2 = k * k;
    let a2 = 2.0 * k2 / den2;
    let a3 = 9.0 * k2 * a2 / den3;
    Ok(StokesWave {
        symbol: s.clone(),
        params: *p,
        k,
        c0: p.gamma / k2 + p.beta * v.m,
        c2: a2,
        a2,
        a3,
        amplitude_bound: DEFAULT_AMPLITUDE_BOUND,
    })
}

impl StokesWave {
    pub fn with_amplitude_bound(mut self, bound: f64) -> Self {
        self.amplitude_bound = bound;
        self
    }

    pub fn amplitude_bound(&self) -> f64 {
        self.amplitude_bound
    }

    fn check_amplitude(&self, a: f64) -> Result<()> {
        if a.is_finite() && a.abs() <= self.amplitude_bound {
            Ok(())
        } else {
            Err(Error::AmplitudeTooLarge {
                a,
                bound: self.amplitude_bound,
            })
        }
    }

    /// Cosine coefficients `w_1, w_2, w_3` of the truncated profile.
    pub fn harmonics(&self, a: f64) -> [f64; 3] {
        [a, a * a * self.a2, a * a * a * self.a3]
    }

    /// `w(z) = a cos z + a^2 A2 cos 2z + a^3 A3 cos 3z`.
    pub fn profile(&self, a: f64, z: f64) -> Result<f64> {
        self.check_amplitude(a)?;
        let [w1, w2, w3] = self.harmonics(a);
        Ok(w1 * z.cos() + w2 * (2.0 * z).cos() + w3 * (3.0 * z).cos())
    }

    /// `c = c0 + a^2 c2`.
    pub fn speed(&self, a: f64) -> Result<f64> {
        self.check_amplitude(a)?;
        Ok(self.c0 + a * a * self.c2)
    }

    /// Profile values at `n` equispaced phases in `[0, 2pi)`.
    pub fn sample(&self, a: f64, n: usize) -> Result<Vec<WaveSample>> {
        self.check_amplitude(a)?;
        (0..n)
            .map(|i| {
                let z = std::f64::consts::TAU * i as f64 / n as f64;
                Ok(WaveSample {
                    z,
                    w: self.profile(a, z)?,
                    order: 3,
                })
            })
            .collect()
    }

    /// Normalized `L^2(T)` norm of the profile equation applied to the
    /// truncated expansion, computed exactly in cosine modes `0..=n_modes`.
    pub fn residual_norm(&self, a: f64, n_modes: usize) -> Result<f64> {
        if n_modes < 8 {
            return Err(Error::Truncation(n_modes));
        }
        let mut w = vec![0.0; n_modes + 1];
        w[1..4].copy_from_slice(&self.harmonics(a));
        let sq = cosine_square(&w);
        let c = self.c0 + a * a * self.c2;
        let (beta, gamma, k) = (self.params.beta, self.params.gamma, self.k);
        let k2 = k * k;
        let mut total = 0.0;
        for n in 0..=n_modes {
            let nf = n as f64;
            let n2 = nf * nf;
            let r = c * k2 * n2 * w[n]
                - beta * k2 * n2 * self.symbol.m(k * nf) * w[n]
                - k2 * n2 * sq[n]
                - gamma * w[n];
            total += if n == 0 { r * r } else { 0.5 * r * r };
        }
        Ok(total.sqrt())
    }
}

/// Cosine coefficients of `w^2` for `w = sum w_n cos(nz)`, truncated to the
/// length of `w`.
fn cosine_square(w: &[f64]) -> Vec<f64> {
    let len = w.len();
    let mut out = vec![0.0; len];
    for (p, &wp) in w.iter().enumerate() {
        if wp == 0.0 {
            continue;
        }
        for (q, &wq) in w.iter().enumerate() {
            if wq == 0.0 {
                continue;
            }
            let prod = 0.5 * wp * wq;
            // cos p cos q = (cos(p+q) + cos(p-q)) / 2, with cos(-n) = cos n
            if p + q < len {
                out[p + q] += prod;
            }
            out[p.abs_diff(q)] += prod;
        }
    }
    out
}
