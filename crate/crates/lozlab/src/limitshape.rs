//! Limit-shape numerics for the free boundary: the logarithmic rate
//! function of the normalized box character as a truncated Taylor jet at
//! u = 1, the analytic moment formula for the rescaled row measure it
//! induces, and empirical moment accumulation over sampled tilings.
//!
//! Moments only: reconstructing the distribution function from its
//! moments is ill-conditioned and nothing downstream needs it.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::invalid;
use crate::jet::Jet;
use crate::signature::Signature;
use crate::tiling::{counting_measure, GTPattern};
use crate::Result;

/// Working precision for the jet coefficients. The nested square root
/// and logarithm compositions shed digits; 256 bits is cheap headroom.
pub const PSI_PREC: u32 = 256;
/// Deepest jet the policy allows (supports moments up to order 15).
pub const PSI_ORDER_CAP: usize = 16;

fn check_aspect(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid("aspect ratio must be positive"));
    }
    Ok(())
}

/// The rate function at a point: u^{a/2+1} and the four shifted factors
/// around h(u) = [(u+1) + sqrt((u+1)^2 + (a^2+2a)(u-1)^2)] / 4, combined
/// on the logarithmic scale. Zero at u = 1.
pub fn psi_eval(a: f64, u: &Float) -> Result<Float> {
    check_aspect(a)?;
    if !(u.is_finite() && *u > 0) {
        return Err(invalid("evaluation point must be positive"));
    }
    let prec = u.prec();
    let af = Float::with_val(prec, a);
    let b: Float = Float::with_val(prec, &af + 2u32) * &af;
    let up1 = Float::with_val(prec, u + 1);
    let um1 = Float::with_val(prec, u - 1);
    let rad: Float = Float::with_val(prec, &up1 * &up1)
        + Float::with_val(prec, &um1 * &um1) * &b;
    let h = (up1 + rad.sqrt()) / 4u32;
    let c_near = Float::with_val(prec, &af / 4u32);
    let c_far = Float::with_val(prec, &c_near + 0.5);
    let pair = |c: &Float| -> Result<Float> {
        let shift = Float::with_val(prec, c * &um1);
        let lo = Float::with_val(prec, &h - &shift);
        let hi = Float::with_val(prec, &h + &shift);
        if lo <= 0 || hi <= 0 {
            return Err(invalid("rate function factor left the positive branch"));
        }
        Ok(lo.ln() + hi.ln())
    };
    let half_a = Float::with_val(prec, &af / 2u32);
    let lead = Float::with_val(prec, &half_a + 1);
    Ok(Float::with_val(prec, u.clone().ln()) * &lead + pair(&c_near)? * &half_a
        - pair(&c_far)? * &lead)
}

/// Taylor coefficients of the rate function at u = 1, by jet composition
/// in 256-bit precision. The constant coefficient is exactly zero.
pub fn psi_jet(a: f64, order: usize) -> Result<Jet<Float>> {
    check_aspect(a)?;
    if !(2..=PSI_ORDER_CAP).contains(&order) {
        return Err(invalid(format!(
            "jet order must lie between 2 and {PSI_ORDER_CAP}"
        )));
    }
    let one = Float::with_val(PSI_PREC, 1);
    let f = |v: f64| Float::with_val(PSI_PREC, v);
    let u = Jet::variable(&one, order);
    let up1 = u.add_scalar(&one);
    let um1 = u.add_scalar(&f(-1.0));
    let rad = up1.mul(&up1).add(&um1.mul(&um1).scale(&f(a * a + 2.0 * a)));
    // the radicand is 4 at u = 1, so the principal square root is safe
    let h = up1.add(&rad.sqrt()?).scale(&f(0.25));
    let pair = |c: f64| -> Result<Jet<Float>> {
        let shift = um1.scale(&f(c));
        Ok(h.sub(&shift).ln()?.add(&h.add(&shift).ln()?))
    };
    let mut psi = u
        .ln()?
        .scale(&f(a / 2.0 + 1.0))
        .add(&pair(a / 4.0)?.scale(&f(a / 2.0)))
        .sub(&pair(a / 4.0 + 0.5)?.scale(&f(a / 2.0 + 1.0)));
    debug_assert!(psi.coeffs[0].clone().abs() < 1e-70);
    psi.coeffs[0] = Float::with_val(PSI_PREC, 0);
    Ok(psi)
}

fn binom(n: usize, k: usize) -> u64 {
    let mut v = 1u64;
    for i in 0..k.min(n - k) {
        v = v * (n - i) as u64 / (i + 1) as u64;
    }
    v
}

/// Analytic moments r = 0..=r_max of the limiting row measure on the
/// vertical line x: sum over l of C(r,l)/(l+1) * x^{l-r} times the t^l
/// coefficient of (1+t)^r * psi'(1+t)^{r-l}. The zeroth moment is one.
pub fn limit_moments(r_max: usize, x: f64, a: f64) -> Result<Vec<f64>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(invalid("line coordinate must lie strictly inside (0,1)"));
    }
    if r_max + 1 > PSI_ORDER_CAP {
        return Err(invalid("moment order exceeds the jet depth cap"));
    }
    let psi = psi_jet(a, (r_max + 1).max(2))?;
    let dpsi = psi.derivative();
    let mut powers = Vec::with_capacity(r_max + 1);
    powers.push(Jet::constant(&dpsi.base, Float::with_val(PSI_PREC, 1), dpsi.order()));
    for e in 1..=r_max {
        powers.push(powers[e - 1].mul(&dpsi));
    }
    let xf = Float::with_val(PSI_PREC, x);
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        let mut m = Float::with_val(PSI_PREC, 0);
        for l in 0..=r {
            let p = &powers[r - l];
            let mut coeff = Float::with_val(PSI_PREC, 0);
            for j in 0..=l {
                coeff += Float::with_val(PSI_PREC, binom(r, l - j)) * &p.coeffs[j];
            }
            let weight = Float::with_val(PSI_PREC, binom(r, l))
                / Float::with_val(PSI_PREC, (l + 1) as u64);
            m += weight * coeff * xf.clone().pow(l as i32 - r as i32);
        }
        out.push(m.to_f64());
    }
    Ok(out)
}

pub fn limit_moment(r: usize, x: f64, a: f64) -> Result<f64> {
    Ok(limit_moments(r, x, a)?[r])
}

/// Moments of the row measure at one vertical line, with the sampling
/// context that produced them.
#[derive(Clone, Debug, Serialize)]
pub struct MomentVector {
    pub line_fraction: f64,
    pub a: f64,
    /// values[r] is the r-th moment; values[0] is always 1.
    pub values: Vec<f64>,
    /// Standard errors of the sample means; zero for analytic vectors.
    pub stderr: Vec<f64>,
}

pub fn limit_moment_vector(r_max: usize, x: f64, a: f64) -> Result<MomentVector> {
    Ok(MomentVector {
        line_fraction: x,
        a,
        values: limit_moments(r_max, x, a)?,
        stderr: vec![0.0; r_max + 1],
    })
}

/// Streaming accumulator for row-measure moments; accumulators over
/// disjoint sample shards merge exactly.
#[derive(Clone, Debug)]
pub struct MomentAccumulator {
    k: usize,
    r_max: usize,
    count: u64,
    sums: Vec<f64>,
    sumsqs: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(k: usize, r_max: usize) -> Result<Self> {
        if k == 0 || r_max == 0 {
            return Err(invalid("need a line index k >= 1 and r_max >= 1"));
        }
        Ok(MomentAccumulator {
            k,
            r_max,
            count: 0,
            sums: vec![0.0; r_max + 1],
            sumsqs: vec![0.0; r_max + 1],
        })
    }

    pub fn push(&mut self, pattern: &GTPattern) -> Result<()> {
        let row = pattern.row(self.k)?;
        let measure = counting_measure(&Signature::from_parts(row)?)?;
        for r in 0..=self.r_max {
            let v = measure.moment(r as u32);
            self.sums[r] += v;
            self.sumsqs[r] += v * v;
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if self.k != other.k || self.r_max != other.r_max {
            return Err(invalid("accumulators disagree on line or order"));
        }
        self.count += other.count;
        for r in 0..=self.r_max {
            self.sums[r] += other.sums[r];
            self.sumsqs[r] += other.sumsqs[r];
        }
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self, line_fraction: f64, a: f64) -> Result<MomentVector> {
        if self.count == 0 {
            return Err(invalid("empty sample stream"));
        }
        let n = self.count as f64;
        let values: Vec<f64> = self.sums.iter().map(|s| s / n).collect();
        let stderr = self
            .sumsqs
            .iter()
            .zip(values.iter())
            .map(|(&sq, &mean)| {
                if self.count < 2 {
                    return 0.0;
                }
                let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect();
        Ok(MomentVector { line_fraction, a, values, stderr })
    }
}

fn moments_over(
    samples: &[GTPattern],
    line_fraction: f64,
    r_max: usize,
    half_depth: bool,
) -> Result<MomentVector> {
    if samples.is_empty() {
        return Err(invalid("empty sample stream"));
    }
    if !(line_fraction > 0.0 && line_fraction <= 1.0) {
        return Err(invalid("line fraction must lie in (0,1]"));
    }
    let depth = samples[0].depth();
    let n = if half_depth {
        if depth % 2 != 0 {
            return Err(invalid("pinned-top samples must have even depth"));
        }
        depth / 2
    } else {
        depth
    };
    let k = (line_fraction * n as f64).floor() as usize;
    if k == 0 {
        return Err(invalid("line fraction addresses no row"));
    }
    let mut acc = MomentAccumulator::new(k, r_max)?;
    for s in samples {
        if s.depth() != depth {
            return Err(invalid("samples must share one depth"));
        }
        acc.push(s)?;
    }
    acc.finish(line_fraction, samples[0].ceiling() as f64 / n as f64)
}

/// Sample-mean moments of the row at k = floor(line_fraction * n) over
/// free-boundary samples of depth n.
pub fn empirical_moments(
    samples: &[GTPattern],
    line_fraction: f64,
    r_max: usize,
) -> Result<MomentVector> {
    moments_over(samples, line_fraction, r_max, false)
}

/// The same computation over pinned-top samples of depth 2n; the line
/// index is taken relative to the lower half, the region the two
/// ensembles share.
pub fn hexagon_moments(
    samples: &[GTPattern],
    line_fraction: f64,
    r_max: usize,
) -> Result<MomentVector> {
    moments_over(samples, line_fraction, r_max, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charlib::{phi_m_normalized, EvalPoint};
    use crate::sampler::{exact_sample_hex_many, ExactFreeSampler, RngStream};
    use crate::tiling::{enumerate_free, enumerate_hex};

    #[test]
    fn jet_constant_term_vanishes_and_slope_is_half_aspect() {
        for a in [0.5f64, 1.0, 2.0, 3.0] {
            let j = psi_jet(a, 6).unwrap();
            assert_eq!(j.coeffs[0], 0.0);
            let slope = j.coeffs[1].to_f64();
            assert!((slope - a / 2.0).abs() < 1e-40, "a = {a}, slope = {slope}");
        }
    }

    #[test]
    fn jet_coefficients_match_frozen_values() {
        let j = psi_jet(1.0, 6).unwrap();
        let expect = [
            0.0,
            0.5,
            -1.0 / 16.0,
            -1.0 / 48.0,
            11.0 / 512.0,
            -7.0 / 1280.0,
        ];
        for (c, e) in j.coeffs.iter().zip(expect.iter()) {
            assert!((c.to_f64() - e).abs() < 1e-30, "got {c}, want {e}");
        }
    }

    #[test]
    fn direct_evaluation_agrees_with_the_jet_near_one() {
        let one = Float::with_val(PSI_PREC, 1);
        let z = psi_eval(1.0, &one).unwrap();
        assert!(z.clone().abs() < 1e-70, "psi(1) = {z}");
        let j = psi_jet(1.0, 12).unwrap();
        let t = 0.01f64;
        let u = Float::with_val(PSI_PREC, 1.01);
        let direct = psi_eval(1.0, &u).unwrap().to_f64();
        let series: f64 = j
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64() * t.powi(k as i32))
            .sum();
        assert!((direct - series).abs() < 1e-12, "{direct} vs {series}");
    }

    #[test]
    fn jet_matches_richardson_finite_differences() {
        // central stencils at 256 bits, Richardson-extrapolated in the
        // step, against the first four jet coefficients
        let f = |a: f64, shift: f64, delta: &Float| {
            let u = Float::with_val(PSI_PREC, 1) + Float::with_val(PSI_PREC, shift * delta);
            psi_eval(a, &u).unwrap()
        };
        for a in [0.5f64, 1.0, 2.0] {
            let jet = psi_jet(a, 8).unwrap();
            let stencil = |delta: &Float, order: usize| -> Float {
                let v = |s: f64| f(a, s, delta);
                match order {
                    1 => (v(1.0) - v(-1.0)) / (2 * delta.clone()),
                    2 => (v(1.0) + v(-1.0)) / delta.clone().square(),
                    3 => {
                        (v(2.0) - 2 * v(1.0) + 2 * v(-1.0) - v(-2.0))
                            / (2 * delta.clone().pow(3))
                    }
                    _ => {
                        (v(2.0) - 4 * v(1.0) - 4 * v(-1.0) + v(-2.0))
                            / delta.clone().pow(4)
                    }
                }
            };
            for r in 1..=4usize {
                let d1 = Float::with_val(PSI_PREC, 1e-3);
                let d2 = Float::with_val(PSI_PREC, 5e-4);
                let coarse = stencil(&d1, r);
                let fine = stencil(&d2, r);
                let extr: Float = (4 * fine - coarse) / 3u32;
                let fact: f64 = (1..=r).product::<usize>() as f64;
                let fd_coeff = extr.to_f64() / fact;
                let jc = jet.coeffs[r].to_f64();
                assert!(
                    (fd_coeff - jc).abs() <= 1e-8 * jc.abs().max(1e-3),
                    "a = {a}, r = {r}: fd {fd_coeff} vs jet {jc}"
                );
            }
        }
    }

    #[test]
    fn jet_arithmetic_roundtrip() {
        let one = Float::with_val(PSI_PREC, 1);
        let mut j = Jet::variable(&one, 5).scale(&Float::with_val(PSI_PREC, 0.3));
        j.coeffs[0] = Float::with_val(PSI_PREC, 1.7);
        j.coeffs[3] = Float::with_val(PSI_PREC, -0.2);
        let back = j.ln().unwrap().exp();
        for (x, y) in j.coeffs.iter().zip(back.coeffs.iter()) {
            assert!(Float::with_val(PSI_PREC, x - y).abs() < 1e-70);
        }
    }

    #[test]
    fn moment_normalization_and_first_moment() {
        for (x, a) in [(0.25f64, 0.5f64), (0.5, 1.0), (0.75, 2.0)] {
            let m = limit_moments(1, x, a).unwrap();
            assert_eq!(m[0], 1.0);
            let expect = a / (2.0 * x) + 0.5;
            assert!((m[1] - expect).abs() < 1e-12, "x={x}, a={a}: {}", m[1]);
        }
    }

    #[test]
    fn analytic_moments_at_the_midline() {
        let m = limit_moments(4, 0.5, 1.0).unwrap();
        let expect = [1.0, 1.5, 37.0 / 12.0, 57.0 / 8.0, 5599.0 / 320.0];
        for (got, want) in m.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let v = limit_moment_vector(2, 0.5, 1.0).unwrap();
        assert_eq!(v.values[0], 1.0);
        assert_eq!(v.stderr, vec![0.0; 3]);
    }

    #[test]
    fn argument_validation() {
        assert!(psi_jet(0.0, 6).is_err());
        assert!(psi_jet(1.0, 17).is_err());
        assert!(psi_jet(1.0, 1).is_err());
        assert!(limit_moments(2, 0.0, 1.0).is_err());
        assert!(limit_moments(2, 1.0, 1.0).is_err());
        assert!(limit_moments(16, 0.5, 1.0).is_err());
        let u = Float::with_val(64, -2);
        assert!(psi_eval(1.0, &u).is_err());
    }

    #[test]
    fn degenerate_box_moments() {
        let samples: Vec<GTPattern> = enumerate_free(3, 0).unwrap().collect();
        assert_eq!(samples.len(), 1);
        let m = empirical_moments(&samples, 1.0, 2).unwrap();
        // row 3 is (0,0,0): atoms (3-i)/3, first moment (N-1)/(2N) = 1/3
        assert_eq!(m.values[0], 1.0);
        assert!((m.values[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.stderr[1], 0.0);
        let m = empirical_moments(&samples, 0.4, 1).unwrap();
        assert_eq!(m.values[1], 0.0);
    }

    #[test]
    fn enumeration_moments_match_frozen_rationals() {
        let free: Vec<GTPattern> = enumerate_free(4, 4).unwrap().collect();
        assert_eq!(free.len(), 2772);
        let m = empirical_moments(&free, 0.5, 4).unwrap();
        let expect = [
            1.0,
            5.0 / 4.0,
            55.0 / 24.0,
            75.0 / 16.0,
            10745.0 / 1056.0,
        ];
        for (got, want) in m.values.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(m.a, 1.0);

        let hex: Vec<GTPattern> = enumerate_hex(4, 4).unwrap().collect();
        assert_eq!(hex.len(), 232_848);
        let m = hexagon_moments(&hex, 0.5, 4).unwrap();
        let expect = [
            1.0,
            5.0 / 4.0,
            131.0 / 56.0,
            545.0 / 112.0,
            26357.0 / 2464.0,
        ];
        for (got, want) in m.values.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn sampled_moments_match_enumeration_within_error() {
        let exact: Vec<GTPattern> = enumerate_free(2, 2).unwrap().collect();
        let truth = empirical_moments(&exact, 1.0, 2).unwrap();
        let sampler = ExactFreeSampler::new(2, 2).unwrap();
        let mut rng = RngStream::new(41, 0);
        let (draws, _) = sampler.sample_many(10_000, &mut rng).unwrap();
        let est = empirical_moments(&draws, 1.0, 2).unwrap();
        for r in 1..=2 {
            let gap = (est.values[r] - truth.values[r]).abs();
            assert!(gap <= 3.0 * est.stderr[r], "r = {r}: gap {gap}");
        }

        let hex_exact: Vec<GTPattern> = enumerate_hex(2, 1).unwrap().collect();
        assert_eq!(hex_exact.len(), 6);
        let truth = hexagon_moments(&hex_exact, 0.5, 2).unwrap();
        let mut rng = RngStream::new(42, 0);
        let (draws, _) = exact_sample_hex_many(2, 1, 10_000, &mut rng).unwrap();
        let est = hexagon_moments(&draws, 0.5, 2).unwrap();
        for r in 1..=2 {
            let gap = (est.values[r] - truth.values[r]).abs();
            assert!(gap <= 3.0 * est.stderr[r], "r = {r}: gap {gap}");
        }
    }

    #[test]
    fn accumulator_merge_equals_bulk() {
        let samples: Vec<GTPattern> = enumerate_free(3, 2).unwrap().collect();
        let mut whole = MomentAccumulator::new(2, 3).unwrap();
        let mut left = MomentAccumulator::new(2, 3).unwrap();
        let mut right = MomentAccumulator::new(2, 3).unwrap();
        for (i, s) in samples.iter().enumerate() {
            whole.push(s).unwrap();
            if i % 2 == 0 {
                left.push(s).unwrap();
            } else {
                right.push(s).unwrap();
            }
        }
        left.merge(&right).unwrap();
        let a = whole.finish(2.0 / 3.0, 2.0 / 3.0).unwrap();
        let b = left.finish(2.0 / 3.0, 2.0 / 3.0).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(whole.count(), left.count());
        let empty = MomentAccumulator::new(2, 3).unwrap();
        assert!(empty.finish(0.5, 1.0).is_err());
        let mut short = MomentAccumulator::new(1, 3).unwrap();
        assert!(short.merge(&whole).is_err());
    }

    #[test]
    fn normalized_character_rate_approaches_the_limit() {
        // (1/n) log of the normalized character at e^y against the rate
        // function, for a = 1; the gap shrinks roughly like 1/n
        let ys = [-0.2f64, -0.1, 0.1, 0.2];
        let mut gaps = Vec::new();
        for n in [8usize, 16, 32, 64] {
            let mut worst = 0.0f64;
            for &y in &ys {
                let u = y.exp();
                let point = EvalPoint::from_f64(&[u], n - 1).unwrap();
                let phi = phi_m_normalized(n as i64, &point, n).unwrap();
                let lead = phi.to_float(PSI_PREC).ln().to_f64() / n as f64;
                let limit = psi_eval(1.0, &Float::with_val(PSI_PREC, u))
                    .unwrap()
                    .to_f64();
                worst = worst.max((lead - limit).abs());
            }
            gaps.push(worst);
        }
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "gaps {gaps:?}");
        }
        assert!(gaps[3] <= 0.02, "gaps {gaps:?}");
    }
}
