//! Absolutely continuous parts `dμ_a = g(α) dα`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::ifs::{frac, unit_phase};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityShape {
    /// `g ≡ 1`.
    Constant,
    /// `g(α) = 1 + ½ cos 2πα`.
    OnePlusHalfCos,
    /// `g(α) = 2 sin² πα = 1 - cos 2πα`.
    TwoSinSquared,
    /// `g(α) = exp(κ cos 2πα) / I₀(κ)`; no closed-form coefficients are
    /// registered, so this shape goes through quadrature.
    VonMises { kappa: f64 },
    /// Periodic piecewise-linear interpolant of samples at `α_j = j / N`.
    Samples(Vec<f64>),
}

/// A nonnegative density scaled to a prescribed total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    shape: DensityShape,
    mass: f64,
}

impl Density {
    pub fn new(shape: DensityShape, mass: f64) -> Result<Self> {
        if let DensityShape::VonMises { kappa } = shape {
            if !(kappa.is_finite() && (0.0..=500.0).contains(&kappa)) {
                return Err(Error::InvalidMeasure(format!("von Mises concentration {kappa} outside [0, 500]")));
            }
        }
        if let DensityShape::Samples(values) = &shape {
            if values.len() < 2 {
                return Err(Error::InvalidMeasure("a sampled density needs at least two samples".into()));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidMeasure(format!("density sample {v} is negative or not finite")));
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            if mean.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidMeasure("sampled density has zero mass".into()));
            }
            return Ok(Self { shape, mass: mean });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidMeasure(format!("density mass must be positive and finite, got {mass}")));
        }
        Ok(Self { shape, mass })
    }

    /// Raw samples; the total mass is their mean.
    pub fn samples(values: Vec<f64>) -> Result<Self> {
        Self::new(DensityShape::Samples(values), 1.0)
    }

    pub fn shape(&self) -> &DensityShape {
        &self.shape
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let a = alpha.rem_euclid(1.0);
        let c = (2.0 * PI * a).cos();
        match &self.shape {
            DensityShape::Constant => self.mass,
            DensityShape::OnePlusHalfCos => self.mass * (1.0 + 0.5 * c),
            DensityShape::TwoSinSquared => self.mass * (1.0 - c),
            DensityShape::VonMises { kappa } => self.mass * (kappa * c).exp() / bessel_i0(*kappa),
            DensityShape::Samples(v) => {
                let n = v.len();
                let x = a * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let t = x - i as f64;
                v[i] * (1.0 - t) + v[(i + 1) % n] * t
            }
        }
    }

    /// Whether coefficients come from a closed form rather than quadrature.
    pub fn is_exact(&self) -> bool {
        !matches!(self.shape, DensityShape::VonMises { .. })
    }

    /// Closed-form coefficient `∫ e^{2πikα} g(α) dα`, when registered.
    pub fn exact_coefficient(&self, k: i64) -> Option<Complex64> {
        let m = self.mass;
        let real = |v: f64| Complex64::new(v, 0.0);
        let value = match &self.shape {
            DensityShape::Constant => real(if k == 0 { m } else { 0.0 }),
            DensityShape::OnePlusHalfCos => real(match k {
                0 => m,
                1 | -1 => 0.25 * m,
                _ => 0.0,
            }),
            DensityShape::TwoSinSquared => real(match k {
                0 => m,
                1 | -1 => -0.5 * m,
                _ => 0.0,
            }),
            DensityShape::Samples(v) => {
                let n = v.len();
                let kk = k.rem_euclid(n as i64);
                let dft: Complex64 =
                    v.iter().enumerate().map(|(j, s)| unit_phase(frac((kk as f64) * j as f64 / n as f64)) * *s).sum();
                dft / n as f64 * hat_factor(k, n)
            }
            DensityShape::VonMises { .. } => return None,
        };
        Some(value)
    }

    /// Exact coefficients for `|k| ≤ window` in one pass, for shapes that
    /// have them. Sampled densities use one FFT of the samples.
    pub(crate) fn exact_coefficients(&self, window: usize) -> Option<Vec<Complex64>> {
        match &self.shape {
            DensityShape::VonMises { .. } => None,
            DensityShape::Samples(v) => {
                let n = v.len();
                let mut buf: Vec<Complex64> = v.iter().map(|s| Complex64::new(*s, 0.0)).collect();
                FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
                Some(
                    (-(window as i64)..=window as i64)
                        .map(|k| buf[k.rem_euclid(n as i64) as usize] / n as f64 * hat_factor(k, n))
                        .collect(),
                )
            }
            _ => Some(
                (-(window as i64)..=window as i64)
                    .map(|k| self.exact_coefficient(k).expect("closed form registered"))
                    .collect(),
            ),
        }
    }

    /// Trapezoidal quadrature of a single coefficient on `points` nodes.
    pub(crate) fn quadrature_coefficient(&self, k: i64, points: usize) -> Complex64 {
        let sum: Complex64 = (0..points)
            .map(|j| {
                let t = frac((k.rem_euclid(points as i64) as f64) * j as f64 / points as f64);
                unit_phase(t) * self.eval(j as f64 / points as f64)
            })
            .sum();
        sum / points as f64
    }

    /// Trapezoidal coefficients for `|k| ≤ window` from one length-`points`
    /// FFT, plus an a-posteriori aliasing bound.
    ///
    /// The trapezoidal value at `k` is `Σ_m ĝ(k + mN)`. For `|k| ≤ N/4` every
    /// aliased index has `|k + mN| ≥ 3N/4`, so the bound is the mass of the
    /// computed spectrum above `N/4`, doubled, plus FFT roundoff.
    pub(crate) fn quadrature_coefficients(&self, window: usize, points: usize) -> (Vec<Complex64>, f64) {
        let mut buf: Vec<Complex64> =
            (0..points).map(|j| Complex64::new(self.eval(j as f64 / points as f64), 0.0)).collect();
        FftPlanner::new().plan_fft_inverse(points).process(&mut buf);
        let scale = 1.0 / points as f64;
        let values =
            (-(window as i64)..=window as i64).map(|k| buf[k.rem_euclid(points as i64) as usize] * scale).collect();
        let high: f64 = (points / 4 + 1..=points - points / 4 - 1).map(|i| buf[i].norm() * scale).sum();
        let roundoff = 16.0 * (points as f64).log2().max(1.0) * f64::EPSILON * self.mass;
        (values, 2.0 * high + roundoff)
    }

    /// `∫_a^b g(α) dα` for `0 ≤ a ≤ b ≤ 1`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let m = self.mass;
        let s = |x: f64| (2.0 * PI * x).sin();
        match &self.shape {
            DensityShape::Constant => m * (b - a),
            DensityShape::OnePlusHalfCos => m * ((b - a) + (s(b) - s(a)) / (4.0 * PI)),
            DensityShape::TwoSinSquared => m * ((b - a) - (s(b) - s(a)) / (2.0 * PI)),
            DensityShape::VonMises { .. } => adaptive_simpson(&|x| self.eval(x), a, b, 1e-14, 40),
            DensityShape::Samples(v) => samples_antiderivative(v, b) - samples_antiderivative(v, a),
        }
    }
}

/// Fourier transform factor of the periodic hat basis: `sinc²(πk/N)`.
fn hat_factor(k: i64, n: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let x = PI * k as f64 / n as f64;
    let s = x.sin() / x;
    s * s
}

fn samples_antiderivative(v: &[f64], x: f64) -> f64 {
    let n = v.len();
    let h = 1.0 / n as f64;
    let pos = x * n as f64;
    let full = (pos.floor() as usize).min(n);
    let mut acc: f64 = (0..full).map(|i| 0.5 * h * (v[i] + v[(i + 1) % n])).sum();
    if full < n {
        let t = (pos - full as f64) * h;
        let (s0, s1) = (v[full], v[(full + 1) % n]);
        acc += s0 * t + (s1 - s0) * t * t / (2.0 * h);
    }
    acc
}

/// Modified Bessel function `I₀` by its power series.
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    while term > 1e-17 * sum {
        term *= q / (j * j);
        sum += term;
        j += 1.0;
    }
    sum
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, depth)
}
