//! Modulational instability index and the projected 2x2 eigenvalue problem.
//!
//! The index is `Delta(k) = (c_p(k) - c_p(2k)) * dc_g/dk`. A small-amplitude
//! wave of wavenumber `k` is modulationally unstable when `Delta(k) < 0`.
//! Equivalently the ratio
//!
//! ```text
//! (2 gamma + beta k^3 (k m''(k) + 2 m'(k))) / (3 gamma + 4 beta k^2 (m(k) - m(2k)))
//! ```
//!
//! is negative, since the two factors are these numerators over `k^3` and
//! `4 k^2` respectively.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stokes::StokesWave;
use crate::symbols::{self, DispersionSymbol, ModelParams};

/// Default small-parameter bounds for assembling the projected matrix.
pub const DEFAULT_A_BOUND: f64 = 0.05;
pub const DEFAULT_XI_BOUND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stable,
    Unstable,
    Degenerate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Unstable => "unstable",
            Classification::Degenerate => "degenerate",
        }
    }

    /// One-letter label used in diagrams.
    pub fn label(self) -> &'static str {
        match self {
            Classification::Stable => "S",
            Classification::Unstable => "U",
            Classification::Degenerate => "D",
        }
    }
}

/// Both index factors at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexResult {
    pub k: f64,
    /// `c_p(k) - c_p(2k)`
    pub f1: f64,
    /// `dc_g/dk`
    pub f2: f64,
    pub delta: f64,
    pub ratio: f64,
    pub classification: Classification,
}

/// `|Delta|` at or below this value is classified as degenerate.
pub fn degeneracy_floor(f1: f64, f2: f64) -> f64 {
    1e-10 * (1.0 + f1.abs()) * (1.0 + f2.abs())
}

/// Numerator `3 gamma + 4 beta k^2 (m(k) - m(2k))` of `c_p(k) - c_p(2k)` over `4k^2`.
pub fn phase_factor_numerator(s: &DispersionSymbol, p: &ModelParams, k: f64) -> f64 {
    3.0 * p.gamma + 4.0 * p.beta * k * k * (s.m(k) - s.m(2.0 * k))
}

pub fn index(s: &DispersionSymbol, p: &ModelParams, k: f64) -> Result<IndexResult> {
    let f1 = symbols::phase_velocity(s, p, k)? - symbols::phase_velocity(s, p, 2.0 * k)?;
    let slope = symbols::group_velocity_derivative(s, p, k)?;
    let f2 = slope.value;
    let delta = f1 * f2;
    let ratio = slope.numerator / phase_factor_numerator(s, p, k);
    let floor = degeneracy_floor(f1, f2);
    let classification = if delta < -floor {
        Classification::Unstable
    } else if delta > floor {
        Classification::Stable
    } else {
        Classification::Degenerate
    };
    Ok(IndexResult {
        k,
        f1,
        f2,
        delta,
        ratio,
        classification,
    })
}

/// Which expansion of the projected matrix to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BForm {
    /// The published block expansion, term for term.
    Displayed,
    /// Re-derived projection including the `a^2` speed correction in the
    /// second-order operator and the `1/2` weights on the `xi^2` blocks.
    Corrected,
}

/// The 2x2 matrix of the Floquet operator projected onto the kernel basis
/// `phi_1 = sin z`-series, `phi_2 = cos z`-series (taken `xi`-independent).
///
/// Every entry is affine in `lambda`, so `B = B0 + lambda B1`.
#[derive(Debug, Clone)]
pub struct ProjectedMatrix<'w> {
    wave: &'w StokesWave,
    form: BForm,
    a_bound: f64,
    xi_bound: f64,
}

impl<'w> ProjectedMatrix<'w> {
    pub fn new(wave: &'w StokesWave, form: BForm) -> Self {
        Self {
            wave,
            form,
            a_bound: DEFAULT_A_BOUND,
            xi_bound: DEFAULT_XI_BOUND,
        }
    }

    pub fn with_bounds(mut self, a_bound: f64, xi_bound: f64) -> Self {
        self.a_bound = a_bound;
        self.xi_bound = xi_bound;
        self
    }

    pub fn form(&self) -> BForm {
        self.form
    }

    fn check(&self, a: f64, xi: f64) -> Result<()> {
        if !(a.is_finite() && a.abs() <= self.a_bound) {
            return Err(Error::AmplitudeTooLarge {
                a,
                bound: self.a_bound,
            });
        }
        if !(xi.is_finite() && xi.abs() <= self.xi_bound) {
            return Err(Error::FloquetExponent {
                xi,
                range: "|xi| within the small-parameter bound",
            });
        }
        Ok(())
    }

    /// `(B0, B1)` with `B(lambda) = B0 + lambda B1`.
    pub fn affine_parts(
        &self,
        a: f64,
        xi: f64,
    ) -> Result<(Matrix2<Complex64>, Matrix2<Complex64>)> {
        self.check(a, xi)?;
        let w = self.wave;
        let (beta, gamma, k) = (w.params.beta, w.params.gamma, w.k);
        let s = &w.symbol;
        let (m1k, m2k) = (s.m1(k), s.m2(k));
        let (m1_2k, m2_2k) = (s.m1(2.0 * k), s.m2(2.0 * k));
        let a2 = w.a2;
        let (k2, k3, k4) = (k * k, k * k * k, k * k * k * k);
        let aa = a * a;
        let i = Complex64::i();
        let c = |x: f64| Complex64::new(x, 0.0);

        // lambda-linear part, identical in both forms
        let g = 4.0 * a2 * a2;
        let lam = Matrix2::new(
            i * (0.5 * xi) * (1.0 + aa * g),
            c(0.5 + 4.0 * aa * a2 * a2),
            c(-0.5 - 4.0 * aa * a2 * a2),
            i * (0.5 * xi) * (1.0 + aa * g),
        );

        let p = -2.0 * gamma + beta * k3 * m1k;
        let q = 16.0 * beta * k3 * a2 * a2 * m1_2k;
        let curvature = -2.0 * gamma + beta * k4 * m2k + 4.0 * beta * k3 * m1k;

        let (d11, d22, o12, o21, x12, x21, diag_xi2, diag_xi2a2) = match self.form {
            BForm::Displayed => {
                let e = -2.0 * gamma * a2 * a2
                    + 6.0 * k2 * a2
                    + 16.0 * beta * k4 * a2 * a2 * m2_2k
                    + 32.0 * beta * k3 * a2 * a2 * m1_2k;
                (
                    -k2 * a2,
                    -3.0 * k2 * a2,
                    p,
                    -p,
                    -2.0 * a2 * a2 + 2.0 * k2 * a2 * a2 + q,
                    2.0 * a2 * a2 - 6.0 * k2 * a2 * a2 - q,
                    0.5 * curvature,
                    [0.5 * e, 0.5 * e],
                )
            }
            BForm::Corrected => {
                let d = -gamma * a2 * a2 + 8.0 * beta * k4 * a2 * a2 * m2_2k + q;
                (
                    0.0,
                    -2.0 * k2 * a2,
                    p,
                    -p,
                    -4.0 * gamma * a2 * a2 + q,
                    4.0 * gamma * a2 * a2 - 4.0 * k2 * a2 - q,
                    0.25 * curvature,
                    [0.5 * d, 0.5 * (d + 2.0 * k2 * a2)],
                )
            }
        };

        let xi2 = xi * xi;
        let constant = Matrix2::new(
            c(0.5 * aa * d11 - xi2 * diag_xi2 - xi2 * aa * diag_xi2a2[0]),
            i * (0.5 * xi) * (o12 + aa * x12),
            i * (0.5 * xi) * (o21 + aa * x21),
            c(0.5 * aa * d22 - xi2 * diag_xi2 - xi2 * aa * diag_xi2a2[1]),
        );
        Ok((constant, lam))
    }

    pub fn at(&self, lambda: Complex64, a: f64, xi: f64) -> Result<Matrix2<Complex64>> {
        let (b0, b1) = self.affine_parts(a, xi)?;
        Ok(b0 + b1 * lambda)
    }

    /// Coefficients `[c2, c1, c0]` of `det B(lambda) = c2 lambda^2 + c1 lambda + c0`.
    pub fn determinant_coefficients(&self, a: f64, xi: f64) -> Result<[Complex64; 3]> {
        let (b0, b1) = self.affine_parts(a, xi)?;
        let c2 = b1.determinant();
        let c1 = b0[(0, 0)] * b1[(1, 1)] + b1[(0, 0)] * b0[(1, 1)]
            - b0[(0, 1)] * b1[(1, 0)]
            - b1[(0, 1)] * b0[(1, 0)];
        let c0 = b0.determinant();
        Ok([c2, c1, c0])
    }

    /// Both roots of `det B(lambda) = 0`.
    pub fn roots(&self, a: f64, xi: f64) -> Result<[Complex64; 2]> {
        let [c2, c1, c0] = self.determinant_coefficients(a, xi)?;
        Ok(quadratic_roots(c2, c1, c0))
    }
}

/// Roots of `c2 x^2 + c1 x + c0` avoiding cancellation.
fn quadratic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 2] {
    let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
    // pick the sign making |c1 + sign*disc| large
    let s = if (c1.conj() * disc).re >= 0.0 {
        disc
    } else {
        -disc
    };
    let q = -(c1 + s) * 0.5;
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / c2, c0 / q]
}

/// The published matrix at one `(lambda, a, xi)` within the default bounds.
pub fn assemble_b_matrix(
    wave: &StokesWave,
    lambda: Complex64,
    a: f64,
    xi: f64,
) -> Result<Matrix2<Complex64>> {
    ProjectedMatrix::new(wave, BForm::Displayed).at(lambda, a, xi)
}

/// Leading terms of the discriminant of `det B = 0` as a quadratic in `X`
/// (`lambda = iX`):
/// `xi^4 P^2 + xi^2 a^2 P / Q` with `P = 2 gamma + beta k^3 (k m'' + 2 m')`
/// and `Q = 3 gamma + 4 beta k^2 (m(k) - m(2k))`.
pub fn discriminant(wave: &StokesWave, a: f64, xi: f64) -> Result<f64> {
    let (s, p, k) = (&wave.symbol, &wave.params, wave.k);
    let num = symbols::group_velocity_derivative(s, p, k)?.numerator;
    let den = phase_factor_numerator(s, p, k);
    let floor = crate::stokes::resonance_floor(p);
    if den.abs() < floor {
        return Err(Error::Resonance {
            n: 2,
            k,
            denominator: den,
            floor,
        });
    }
    let xi2 = xi * xi;
    Ok(xi2 * xi2 * num * num + xi2 * a * a * num / den)
}

/// Largest `|Re lambda|` over the roots of `det B = 0`, using the corrected
/// projection (the published one gives purely imaginary roots at this order).
pub fn growth_rate_leading(wave: &StokesWave, a: f64, xi: f64) -> Result<f64> {
    let roots = ProjectedMatrix::new(wave, BForm::Corrected).roots(a, xi)?;
    Ok(roots[0].re.abs().max(roots[1].re.abs()))
}
