//! The GUE corners process: seeded Hermitian matrix sampling, a cyclic
//! Jacobi eigensolver for every leading principal submatrix, the joint
//! eigenvalue density, and the matching moment generating function.
//!
//! Conventions: diagonal entries are real standard Gaussians, off-diagonal
//! entries have independent real and imaginary parts of variance 1/2, so
//! the top-level density is proportional to the squared Vandermonde times
//! exp(-sum eps^2 / 2) and the expected multivariate Bessel transform of a
//! level-k spectrum is exp(sum x^2 / 2).

use num_complex::Complex64;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::charlib;
use crate::error::invalid;
use crate::sampler::RngStream;
use crate::{Error, Result};

const JACOBI_SWEEP_CAP: usize = 100;
/// Off-diagonal mass threshold relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
/// Slack allowed when validating Cauchy interlacing of computed spectra.
const INTERLACE_SLACK: f64 = 1e-10;

/// Box-Muller transform over a seeded stream, keeping the spare variate.
struct BoxMuller {
    spare: Option<f64>,
}

impl BoxMuller {
    fn new() -> Self {
        BoxMuller { spare: None }
    }

    fn next(&mut self, rng: &mut RngStream) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        // u1 in (0, 1] keeps the logarithm finite
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Hermitian matrix stored as its real diagonal plus the row-major
/// strictly upper triangle; the lower triangle is implied by conjugation.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    k: usize,
    diag: Vec<f64>,
    upper: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(diag: Vec<f64>, upper: Vec<Complex64>) -> Result<Self> {
        let k = diag.len();
        if k == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        if upper.len() != k * (k - 1) / 2 {
            return Err(invalid("upper triangle length does not match the dimension"));
        }
        if !diag.iter().all(|v| v.is_finite())
            || !upper.iter().all(|v| v.re.is_finite() && v.im.is_finite())
        {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(HermitianMatrix { k, diag, upper })
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Entry (i, j), both zero-based; the lower triangle conjugates.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Complex64::new(self.diag[i], 0.0),
            std::cmp::Ordering::Less => self.upper[self.upper_index(i, j)],
            std::cmp::Ordering::Greater => self.upper[self.upper_index(j, i)].conj(),
        }
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        i * self.k - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|v| v * v).sum();
        let u: f64 = self.upper.iter().map(|v| v.norm_sqr()).sum();
        d + 2.0 * u
    }

    /// The leading principal j x j submatrix.
    pub fn leading(&self, j: usize) -> HermitianMatrix {
        assert!(j >= 1 && j <= self.k);
        let mut upper = Vec::with_capacity(j * (j - 1) / 2);
        for r in 0..j {
            for c in r + 1..j {
                upper.push(self.upper[self.upper_index(r, c)]);
            }
        }
        HermitianMatrix { k: j, diag: self.diag[..j].to_vec(), upper }
    }

    /// A GUE draw: N(0,1) diagonal, off-diagonal real and imaginary parts
    /// each N(0, 1/2). All variates come from one Box-Muller source.
    pub fn sample_gue(k: usize, rng: &mut RngStream) -> Result<Self> {
        if k == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        let mut bm = BoxMuller::new();
        let diag: Vec<f64> = (0..k).map(|_| bm.next(rng)).collect();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let upper = (0..k * (k - 1) / 2)
            .map(|_| Complex64::new(half * bm.next(rng), half * bm.next(rng)))
            .collect();
        HermitianMatrix::new(diag, upper)
    }

    /// Eigenvalues in decreasing order by cyclic Jacobi with complex
    /// rotations: each pivot's phase is absorbed so the classical real
    /// rotation annihilates it. Converges when the off-diagonal mass
    /// falls below the relative tolerance; capped at 100 sweeps.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.k;
        let mut w = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                w[i * n + j] = self.entry(i, j);
            }
        }
        let frob = self.frobenius_sq().sqrt();
        let off = |w: &[Complex64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s += 2.0 * w[i * n + j].norm_sqr();
                }
            }
            s.sqrt()
        };
        let mut converged = n == 1 || off(&w) <= JACOBI_TOL * frob;
        let mut sweeps = 0;
        while !converged {
            if sweeps == JACOBI_SWEEP_CAP {
                return Err(Error::EigenNonConvergence(sweeps));
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let b = w[p * n + q];
                    let b_abs = b.norm();
                    if b_abs == 0.0 {
                        continue;
                    }
                    let alpha = b / b_abs;
                    let a = w[p * n + p].re;
                    let d = w[q * n + q].re;
                    let tau = (d - a) / (2.0 * b_abs);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let arp = w[r * n + p];
                        let arq = w[r * n + q];
                        w[r * n + p] = c * arp - s * alpha.conj() * arq;
                        w[r * n + q] = s * alpha * arp + c * arq;
                    }
                    for r in 0..n {
                        let apr = w[p * n + r];
                        let aqr = w[q * n + r];
                        w[p * n + r] = c * apr - s * alpha * aqr;
                        w[q * n + r] = s * alpha.conj() * apr + c * aqr;
                    }
                    w[p * n + q] = Complex64::new(0.0, 0.0);
                    w[q * n + p] = Complex64::new(0.0, 0.0);
                    w[p * n + p] = Complex64::new(w[p * n + p].re, 0.0);
                    w[q * n + q] = Complex64::new(w[q * n + q].re, 0.0);
                }
            }
            converged = off(&w) <= JACOBI_TOL * frob;
        }
        let mut eig: Vec<f64> = (0..n).map(|i| w[i * n + i].re).collect();
        eig.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
        Ok(eig)
    }
}

/// Eigenvalues of every leading principal submatrix, level j holding the
/// j decreasing eigenvalues of the j x j corner.
#[derive(Clone, Debug)]
pub struct CornersSample {
    levels: Vec<Vec<f64>>,
}

impl CornersSample {
    /// Validates the triangular shape, ordering within each level, and
    /// Cauchy interlacing between consecutive levels (small slack).
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("a corners sample needs at least one level"));
        }
        for (j, level) in levels.iter().enumerate() {
            if level.len() != j + 1 {
                return Err(invalid("level j must hold exactly j eigenvalues"));
            }
            if level.windows(2).any(|w| w[0] < w[1]) {
                return Err(invalid("levels must be decreasing"));
            }
            if j > 0 {
                let lower = &levels[j - 1];
                for i in 0..lower.len() {
                    if level[i] < lower[i] - INTERLACE_SLACK
                        || lower[i] < level[i + 1] - INTERLACE_SLACK
                    {
                        return Err(invalid("levels must interlace"));
                    }
                }
            }
        }
        Ok(CornersSample { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level j, one-based, as a decreasing slice of length j.
    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j - 1]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }
}

/// Draw a GUE matrix and diagonalize all leading corners.
pub fn sample_gue_corners(k: usize, rng: &mut RngStream) -> Result<CornersSample> {
    let matrix = HermitianMatrix::sample_gue(k, rng)?;
    let mut levels = Vec::with_capacity(k);
    for j in 1..=k {
        levels.push(matrix.leading(j).eigenvalues()?);
    }
    CornersSample::new(levels)
}

/// Log of [`gue_density`], exact in the exponents; minus infinity on a
/// repeated eigenvalue.
pub fn gue_log_density(k: usize, eps: &[f64]) -> f64 {
    assert_eq!(eps.len(), k, "tuple length must match the level");
    let mut log_vdm = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            log_vdm += (eps[i] - eps[j]).abs().ln();
        }
    }
    let sq: f64 = eps.iter().map(|e| e * e).sum();
    // ordered-tuple normalizer: (2 pi)^{k/2} times product of j! for j < k
    let ln_z = 0.5 * k as f64 * (2.0 * std::f64::consts::PI).ln()
        + (1..k).map(|j| ln_gamma(j as f64 + 1.0)).sum::<f64>();
    2.0 * log_vdm - 0.5 * sq - ln_z
}

/// Joint density of a decreasing level-k eigenvalue tuple: squared
/// Vandermonde times exp(-sum eps^2/2), normalized over the ordered cone.
/// The formula is symmetric, so the argument order does not matter.
pub fn gue_density(k: usize, eps: &[f64]) -> f64 {
    gue_log_density(k, eps).exp()
}

/// Moment generating function of a level-k spectrum under the Bessel
/// transform: exp(sum x^2 / 2).
pub fn mgf_gue(x: &[f64]) -> f64 {
    (0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
}

/// Monte Carlo companion of [`mgf_gue`]: averages the Bessel transform
/// over corners draws. Returns the estimate and its standard error.
pub fn mgf_gue_mc(
    x: &[f64],
    samples: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let k = x.len();
    if k == 0 || samples < 2 {
        return Err(invalid("need a nonempty argument and at least two samples"));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..samples {
        let corners = sample_gue_corners(k, rng)?;
        let b = charlib::bessel_b(x, corners.level(k))?;
        sum += b;
        sumsq += b * b;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sumsq - n * mean * mean).max(0.0) / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_statistic, standard_normal_cdf};

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1+i], [1-i, 0]] has eigenvalues 1 +- sqrt(3)
        let m = HermitianMatrix::new(vec![2.0, 0.0], vec![Complex64::new(1.0, 1.0)]).unwrap();
        let eig = m.eigenvalues().unwrap();
        assert!((eig[0] - (1.0 + 3.0f64.sqrt())).abs() < 1e-12);
        assert!((eig[1] - (1.0 - 3.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matrices_sort_their_diagonal() {
        let m = HermitianMatrix::new(
            vec![1.0, 3.0, -2.0],
            vec![Complex64::new(0.0, 0.0); 3],
        )
        .unwrap();
        assert_eq!(m.eigenvalues().unwrap(), vec![3.0, 1.0, -2.0]);
    }

    #[test]
    fn spectra_preserve_trace_and_frobenius_norm() {
        let mut rng = RngStream::new(31, 0);
        for k in [2usize, 5, 8] {
            for _ in 0..8 {
                let m = HermitianMatrix::sample_gue(k, &mut rng).unwrap();
                let eig = m.eigenvalues().unwrap();
                let tr: f64 = eig.iter().sum();
                let fr: f64 = eig.iter().map(|e| e * e).sum();
                assert!((tr - m.trace()).abs() < 1e-10);
                assert!((fr - m.frobenius_sq()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn corners_interlace_and_match_their_matrix() {
        let mut rng = RngStream::new(32, 0);
        for _ in 0..20 {
            // CornersSample::new re-validates interlacing on construction
            let s = sample_gue_corners(6, &mut rng).unwrap();
            assert_eq!(s.depth(), 6);
            assert_eq!(s.level(3).len(), 3);
        }
        assert!(sample_gue_corners(0, &mut rng).is_err());
    }

    #[test]
    fn level_one_law_is_standard_normal() {
        let mut rng = RngStream::new(33, 0);
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| sample_gue_corners(1, &mut rng).unwrap().level(1)[0])
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_statistic(&draws, standard_normal_cdf);
        assert!(d <= 0.006, "ks = {d}");
    }

    #[test]
    fn density_values_and_symmetry() {
        let v = gue_density(1, &[0.0]);
        assert!((v - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        // negating and reversing a tuple leaves the density unchanged
        let a = gue_density(3, &[1.4, 0.3, -0.9]);
        let b = gue_density(3, &[0.9, -0.3, -1.4]);
        assert!((a - b).abs() <= 1e-14 * a);
        // repeated eigenvalues sit on the zero set
        assert_eq!(gue_density(2, &[0.7, 0.7]), 0.0);
    }

    #[test]
    fn density_mass_and_spacing_by_quadrature() {
        // midpoint rule on [-8, 8]^2; the ordered mass is half the square
        let h = 0.02;
        let cells = 800;
        let mut mass = 0.0;
        let mut spacing = 0.0;
        for i in 0..cells {
            let x = -8.0 + (i as f64 + 0.5) * h;
            for j in 0..cells {
                let y = -8.0 + (j as f64 + 0.5) * h;
                let d = gue_density(2, &[x, y]) * h * h;
                mass += d;
                spacing += (x - y).abs() * d;
            }
        }
        mass /= 2.0;
        spacing /= 2.0;
        assert!((mass - 1.0).abs() < 1e-3, "mass = {mass}");
        // mean level-2 spacing: 4 / sqrt(pi)
        let analytic = 4.0 / std::f64::consts::PI.sqrt();
        assert!((spacing - analytic).abs() < 1e-3, "spacing = {spacing}");
    }

    #[test]
    fn density_mass_k3_by_importance_sampling() {
        // under a standard normal proposal the weight reduces to the
        // squared Vandermonde over 12, with unit expectation
        let mut rng = RngStream::new(34, 0);
        let mut bm = BoxMuller::new();
        let mut sum = 0.0;
        let trials = 200_000;
        for _ in 0..trials {
            let z = [bm.next(&mut rng), bm.next(&mut rng), bm.next(&mut rng)];
            let vdm = (z[0] - z[1]) * (z[0] - z[2]) * (z[1] - z[2]);
            sum += vdm * vdm / 12.0;
        }
        let mass = sum / trials as f64;
        assert!((mass - 1.0).abs() < 0.05, "mass = {mass}");
        // the same quantity through the density, as a consistency check
        let z: [f64; 3] = [0.8, 0.1, -0.5];
        let phi: f64 = z
            .iter()
            .map(|v| (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .product();
        let direct = gue_density(3, &z) / (6.0 * phi);
        let vdm = (z[0] - z[1]) * (z[0] - z[2]) * (z[1] - z[2]);
        assert!((direct - vdm * vdm / 12.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_spacing_matches_the_density() {
        let mut rng = RngStream::new(35, 0);
        let mut sum = 0.0;
        let trials = 100_000;
        for _ in 0..trials {
            let s = sample_gue_corners(2, &mut rng).unwrap();
            sum += s.level(2)[0] - s.level(2)[1];
        }
        let mean = sum / trials as f64;
        let analytic = 4.0 / std::f64::consts::PI.sqrt();
        // spacing stdev is about 0.95, so 4 standard errors is 0.012
        assert!((mean - analytic).abs() < 0.012, "mean = {mean}");
    }

    #[test]
    fn mgf_closed_form() {
        assert_eq!(mgf_gue(&[0.0, 0.0, 0.0]), 1.0);
        assert!((mgf_gue(&[1.0]) - 0.5f64.exp()).abs() < 1e-15);
        assert!((mgf_gue(&[1.0, -1.0]) - 1.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn mgf_monte_carlo_agrees() {
        let mut rng = RngStream::new(36, 0);
        let (est, se) = mgf_gue_mc(&[1.0], 100_000, &mut rng).unwrap();
        let truth = mgf_gue(&[1.0]);
        assert!((est - truth).abs() <= 3.0 * se, "est {est}, se {se}");
        let (est, se) = mgf_gue_mc(&[1.0, -1.0], 100_000, &mut rng).unwrap();
        let truth = mgf_gue(&[1.0, -1.0]);
        assert!((est - truth).abs() <= 3.0 * se, "est {est}, se {se}");
        let (est, se) = mgf_gue_mc(&[0.5, -0.5, 1.0], 50_000, &mut rng).unwrap();
        let truth = mgf_gue(&[0.5, -0.5, 1.0]);
        assert!((est - truth).abs() <= 3.0 * se, "est {est}, se {se}");
    }

    #[test]
    fn mgf_monte_carlo_is_reproducible() {
        let run = || {
            let mut rng = RngStream::new(37, 2);
            mgf_gue_mc(&[0.5, -1.0], 200, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn conditional_level_one_is_uniform_between_its_bounds() {
        // probability integral transform of the middle eigenvalue inside
        // its interlacing interval; uniform on (0,1) under the Gibbs law
        let mut rng = RngStream::new(38, 0);
        let mut pit: Vec<f64> = (0..100_000)
            .map(|_| {
                let s = sample_gue_corners(2, &mut rng).unwrap();
                let (top, bottom) = (s.level(2)[0], s.level(2)[1]);
                (s.level(1)[0] - bottom) / (top - bottom)
            })
            .collect();
        pit.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_statistic(&pit, |u| u.clamp(0.0, 1.0));
        assert!(d <= 0.01, "ks = {d}");
    }

    #[test]
    fn matrix_accessors_are_consistent() {
        let m = HermitianMatrix::new(
            vec![1.0, 2.0, 3.0],
            vec![
                Complex64::new(0.5, -0.25),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.5),
            ],
        )
        .unwrap();
        assert_eq!(m.entry(0, 1), Complex64::new(0.5, -0.25));
        assert_eq!(m.entry(1, 0), Complex64::new(0.5, 0.25));
        assert_eq!(m.entry(2, 2), Complex64::new(3.0, 0.0));
        let lead = m.leading(2);
        assert_eq!(lead.dimension(), 2);
        assert_eq!(lead.entry(0, 1), Complex64::new(0.5, -0.25));
        assert!((m.frobenius_sq() - (1.0 + 4.0 + 9.0 + 2.0 * (0.3125 + 1.0 + 1.25))).abs() < 1e-12);
        assert!(HermitianMatrix::new(vec![], vec![]).is_err());
        assert!(HermitianMatrix::new(vec![1.0], vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(HermitianMatrix::new(vec![f64::NAN], vec![]).is_err());
    }
}
