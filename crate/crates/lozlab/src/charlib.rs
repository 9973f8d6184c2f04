//! Character evaluations: Schur and skew Schur counts, bialternants,
//! symplectic and odd-orthogonal characters, the boxed sums phi_m and their
//! normalized versions, one-variable normalized specializations by residue
//! sum, and the multivariate Bessel limit.
//!
//! Evaluation points are exact rationals or high-precision floats. Every
//! operation stays exact when its inputs are rational and all exponents
//! resolve to integers (half-integer exponent families stay exact when the
//! needed square roots are rational); anything else runs under the doubling
//! precision driver from [`crate::scalar`].
//!
//! Repeated coordinates are never perturbed: the alternants switch to their
//! confluent forms (derivative rows) via [`crate::linalg`], with two-sided
//! power columns handled through z = x + 1/x - 2. Because both determinants
//! of a character share the evaluation point, all Vandermonde-style
//! normalizations cancel and only the determinant ratio (times an explicit
//! per-coordinate weight ratio) survives.

use crate::error::{invalid, Result};
use crate::linalg::{
    cluster_by, confluent_g_det, confluent_power_det, det_in_place, pow_i64, reduced_vandermonde,
    Clusters,
};
use crate::scalar::{
    adaptive_float, binomial_general, rational_pow, rational_root, rational_sqrt, Analytic, Field,
    Scalar,
};
use crate::signature::Signature;
use rug::{Float, Integer, Rational};

/// Argument pattern (x_1, ..., x_k, 1^padding): k explicit nonzero scalars
/// plus a count of trailing ones.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    values: Vec<Scalar>,
    padding: usize,
}

impl EvalPoint {
    pub fn new(values: Vec<Scalar>, padding: usize) -> Result<Self> {
        if values.iter().any(|v| v.is_zero()) {
            return Err(invalid("zero coordinate in evaluation point"));
        }
        Ok(EvalPoint { values, padding })
    }

    /// The all-ones point of length n.
    pub fn ones(n: usize) -> Self {
        EvalPoint {
            values: Vec::new(),
            padding: n,
        }
    }

    pub fn from_rationals(vals: &[Rational], padding: usize) -> Result<Self> {
        Self::new(vals.iter().cloned().map(Scalar::Exact).collect(), padding)
    }

    /// Finite f64 inputs are exact rationals; keep them exact.
    pub fn from_f64(vals: &[f64], padding: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(vals.len());
        for &v in vals {
            let r = Rational::from_f64(v).ok_or_else(|| invalid("non-finite coordinate"))?;
            out.push(Scalar::Exact(r));
        }
        Self::new(out, padding)
    }

    pub fn total_len(&self) -> usize {
        self.values.len() + self.padding
    }

    pub fn explicit(&self) -> &[Scalar] {
        &self.values
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn all_exact(&self) -> bool {
        self.values.iter().all(|v| v.is_exact())
    }

    fn all_positive(&self) -> bool {
        self.values.iter().all(|v| match v {
            Scalar::Exact(r) => *r > 0,
            Scalar::Real(f) => f.is_sign_positive() && !f.is_zero(),
        })
    }

    fn rational_coords(&self) -> Option<Vec<Rational>> {
        let mut out = Vec::with_capacity(self.total_len());
        for v in &self.values {
            out.push(v.as_exact()?.clone());
        }
        out.resize(self.total_len(), Rational::from(1));
        Some(out)
    }

    fn float_coords(&self, prec: u32) -> Vec<Float> {
        let mut out: Vec<Float> = self.values.iter().map(|v| v.to_float(prec)).collect();
        out.resize(self.total_len(), Float::with_val(prec, 1));
        out
    }
}

/// Coincidence predicate for floats: relative tolerance 2^(8-prec), far
/// below any genuine separation of distinct inputs, shrinking as precision
/// grows so the doubling driver converges on a stable clustering.
fn float_same(prec: u32) -> impl Fn(&Float, &Float) -> bool {
    move |a, b| {
        let p = prec.max(64);
        let diff = Float::with_val(p, a - b).abs();
        let mut scale = Float::with_val(p, a).abs();
        let sb = Float::with_val(p, b).abs();
        if sb > scale {
            scale = sb;
        }
        if scale < 1 {
            scale = Float::with_val(p, 1);
        }
        let tol = Float::with_val(p, Float::i_exp(1, 8 - prec.min(i32::MAX as u32) as i32));
        diff <= tol * scale
    }
}

fn pad_to(lambda: &Signature, n: usize) -> Result<Signature> {
    if lambda.len() == n {
        Ok(lambda.clone())
    } else {
        lambda.padded(n)
    }
}

/// z = x + 1/x - 2, in the cancellation-free form (x-1)^2/x.
fn z_of<F: Field>(x: &F) -> F {
    let xm1 = x.sub_ref(&x.one_like());
    xm1.mul_ref(&xm1).div_ref(x)
}

/// Weyl dimension s_lambda(1^N) by the hook-content-free product
/// prod_{i<j} (l_i - l_j)/(j - i).
pub fn schur_dim(lambda: &Signature, n: usize) -> Result<Integer> {
    if !lambda.is_integral() {
        return Err(invalid("dimension formula needs integer parts"));
    }
    let lam = pad_to(lambda, n)?;
    let dl = lam.doubled_shifted();
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    for i in 0..n {
        for j in i + 1..n {
            num *= Integer::from((dl[i] - dl[j]) / 2);
            den *= Integer::from((j - i) as i64);
        }
    }
    let q = Rational::from((num, den));
    debug_assert_eq!(*q.denom(), Integer::from(1));
    Ok(q.numer().clone())
}

/// Number of semistandard fillings of the skew shape lambda/mu with entries
/// in {1..m_vars}: the h-determinant with h_r(1^M) = C(M+r-1, r). Zero when
/// mu is not contained in lambda.
pub fn skew_schur_dim(lambda: &Signature, mu: &Signature, m_vars: i64) -> Result<Integer> {
    if m_vars < 0 {
        return Err(invalid("negative variable count"));
    }
    if !lambda.is_integral() || !mu.is_integral() {
        return Err(invalid("skew counting needs integer parts"));
    }
    let ell = lambda.len().max(mu.len());
    let lam = pad_to(lambda, ell)?.parts()?;
    let mup = pad_to(mu, ell)?.parts()?;
    if lam.iter().any(|&p| p < 0) || mup.iter().any(|&p| p < 0) {
        return Err(invalid("skew counting needs nonnegative parts"));
    }
    if lam.iter().zip(mup.iter()).any(|(l, m)| m > l) {
        return Ok(Integer::new());
    }
    let h = |r: i64| -> Rational {
        if r < 0 {
            return Rational::new();
        }
        binomial_general(m_vars + r - 1, r as u32)
    };
    let mat: Vec<Vec<Rational>> = (0..ell)
        .map(|i| {
            (0..ell)
                .map(|j| h(lam[i] - mup[j] - i as i64 + j as i64))
                .collect()
        })
        .collect();
    let d = det_in_place(mat);
    debug_assert_eq!(*d.denom(), Integer::from(1));
    Ok(d.numer().clone())
}

fn power_ratio<F: Field>(
    num_exps: &[i64],
    den_exps: &[i64],
    xc: &Clusters<F>,
) -> Result<F> {
    let den = confluent_power_det(den_exps, xc);
    if den.is_zero_val() {
        return Err(invalid("degenerate evaluation point"));
    }
    Ok(confluent_power_det(num_exps, xc).div_ref(&den))
}

/// Schur polynomial value at the point, by the bialternant; repeated
/// coordinates (including the padding ones) go through derivative rows.
pub fn schur_eval(lambda: &Signature, point: &EvalPoint, n: usize) -> Result<Scalar> {
    if !lambda.is_integral() {
        return Err(invalid("bialternant here is for integer parts"));
    }
    if point.total_len() != n {
        return Err(invalid("point length must equal the rank"));
    }
    let lam = pad_to(lambda, n)?;
    let l: Vec<i64> = lam.doubled_shifted().iter().map(|d| d / 2).collect();
    let delta: Vec<i64> = (0..n as i64).rev().collect();
    if let Some(coords) = point.rational_coords() {
        let xc = cluster_by(&coords, |a, b| a == b);
        return Ok(Scalar::Exact(power_ratio(&l, &delta, &xc)?));
    }
    let v = adaptive_float(|p| {
        let coords = point.float_coords(p);
        let xc = cluster_by(&coords, float_same(p));
        power_ratio(&l, &delta, &xc)
    })?;
    Ok(Scalar::Real(v))
}

/// Doubled shifted exponents for the two-sided families:
/// numerator lambda_j + N + 1 - j, denominator N + 1 - j (symplectic), and
/// the half-down shift of both for the odd-orthogonal ratio.
fn symplectic_exponents(lam: &Signature, n: usize) -> (Vec<i64>, Vec<i64>) {
    let a = lam
        .doubled_parts()
        .iter()
        .enumerate()
        .map(|(i, &d)| d + 2 * (n - i) as i64)
        .collect();
    let e = (0..n).map(|i| 2 * (n - i) as i64).collect();
    (a, e)
}

fn g_ratio_raw<F: Field>(
    num_d: &[i64],
    den_d: &[i64],
    zs: &[F],
    same: impl Fn(&F, &F) -> bool,
) -> Result<F> {
    let zc = cluster_by(zs, same);
    let den = confluent_g_det(den_d, &zc);
    if den.is_zero_val() {
        return Err(invalid("degenerate evaluation point"));
    }
    Ok(confluent_g_det(num_d, &zc).div_ref(&den))
}

/// prod over coordinates of (sqrt(x) + 1/sqrt(x)), the weight-ratio between
/// the integer and half-integer two-sided families.
fn mixed_weight<F: Field>(sqrts: &[F]) -> F {
    let mut acc = sqrts[0].one_like();
    for s in sqrts {
        acc = acc.mul_ref(&s.add_ref(&s.one_like().div_ref(s)));
    }
    acc
}

enum Parity {
    Same,
    NumHalf, // numerator half-integer family, denominator integer: divide by the weight
    DenHalf, // numerator integer family, denominator half-integer: multiply
}

fn parity_of(num_d: &[i64], den_d: &[i64]) -> Parity {
    match (num_d[0].rem_euclid(2), den_d[0].rem_euclid(2)) {
        (a, b) if a == b => Parity::Same,
        (1, 0) => Parity::NumHalf,
        _ => Parity::DenHalf,
    }
}

fn g_char_exact(num_d: &[i64], den_d: &[i64], coords: &[Rational]) -> Result<Option<Rational>> {
    let zs: Vec<Rational> = coords.iter().map(z_of).collect();
    let ratio = g_ratio_raw(num_d, den_d, &zs, |a, b| a == b)?;
    match parity_of(num_d, den_d) {
        Parity::Same => Ok(Some(ratio)),
        p => {
            let mut sqrts = Vec::with_capacity(coords.len());
            for x in coords {
                match rational_sqrt(x) {
                    Some(s) => sqrts.push(s),
                    None => return Ok(None),
                }
            }
            let w = mixed_weight(&sqrts);
            Ok(Some(match p {
                Parity::NumHalf => ratio / w,
                _ => ratio * w,
            }))
        }
    }
}

fn g_char_float(num_d: &[i64], den_d: &[i64], coords: &[Float], prec: u32) -> Result<Float> {
    let zs: Vec<Float> = coords.iter().map(z_of).collect();
    let ratio = g_ratio_raw(num_d, den_d, &zs, float_same(prec))?;
    match parity_of(num_d, den_d) {
        Parity::Same => Ok(ratio),
        p => {
            let sqrts: Vec<Float> = coords.iter().map(|x| x.sqrt_val()).collect();
            let w = mixed_weight(&sqrts);
            Ok(match p {
                Parity::NumHalf => ratio / w,
                _ => ratio * w,
            })
        }
    }
}

fn g_char(num_d: Vec<i64>, den_d: Vec<i64>, point: &EvalPoint) -> Result<Scalar> {
    let mixed = !matches!(parity_of(&num_d, &den_d), Parity::Same);
    if mixed && !point.all_positive() {
        return Err(invalid(
            "half-integer parts need positive real coordinates",
        ));
    }
    if let Some(coords) = point.rational_coords() {
        if let Some(v) = g_char_exact(&num_d, &den_d, &coords)? {
            return Ok(Scalar::Exact(v));
        }
    }
    let v = adaptive_float(|p| g_char_float(&num_d, &den_d, &point.float_coords(p), p))?;
    Ok(Scalar::Real(v))
}

/// Symplectic character chi_lambda(x_1..x_N), determinant ratio of the
/// two-sided alternants; coincidences (with each other, with the padding
/// ones, or between x and 1/x) are merged in the z variable.
pub fn symplectic_eval(lambda: &Signature, point: &EvalPoint, n: usize) -> Result<Scalar> {
    if point.total_len() != n {
        return Err(invalid("point length must equal the rank"));
    }
    let lam = pad_to(lambda, n)?;
    let (a, e) = symplectic_exponents(&lam, n);
    g_char(a, e, point)
}

/// Odd-orthogonal character gamma_lambda, the ratio chi_{lambda-(1/2)^n} /
/// chi_{(-1/2)^n}; the shared symplectic denominators cancel, leaving one
/// determinant ratio with exponents shifted down by 1/2.
pub fn orthogonal_eval(lambda: &Signature, point: &EvalPoint, n: usize) -> Result<Scalar> {
    if point.total_len() != n {
        return Err(invalid("point length must equal the rank"));
    }
    let lam = pad_to(lambda, n)?;
    let down = lam.shifted_half_down();
    let (a, _) = symplectic_exponents(&down, n);
    let e = (0..n).map(|i| 2 * (n - i) as i64 - 1).collect();
    g_char(a, e, point)
}

/// Per-coordinate prefactor of the boxed sum: x^(m/2) times the weight
/// ratio, which combines into integer powers for both parities of m.
fn box_prefactor<F: Field>(x: &F, m: i64) -> F {
    if m % 2 == 0 {
        pow_i64(x, m / 2)
    } else {
        pow_i64(x, (m + 1) / 2).add_ref(&pow_i64(x, (m - 1) / 2))
    }
}

fn box_exponents(m: i64, n: usize) -> (Vec<i64>, Vec<i64>) {
    let num = (0..n).map(|i| m + 1 + 2 * (n - 1 - i) as i64).collect();
    let den = (0..n).map(|i| 1 + 2 * (n - 1 - i) as i64).collect();
    (num, den)
}

/// phi_m(x_1..x_n) = sum of s_lambda over all shapes in the m x n box,
/// evaluated by the determinant-ratio identity. Exact at rational points for
/// every m (the half-integer weights always combine to integer powers).
pub fn phi_m_eval(m: i64, point: &EvalPoint, n: usize) -> Result<Scalar> {
    if m < 0 {
        return Err(invalid("box width must be nonnegative"));
    }
    if point.total_len() != n {
        return Err(invalid("point length must equal the rank"));
    }
    let (num_d, den_d) = box_exponents(m, n);
    if let Some(coords) = point.rational_coords() {
        let zs: Vec<Rational> = coords.iter().map(z_of).collect();
        let ratio = g_ratio_raw(&num_d, &den_d, &zs, |a, b| a == b)?;
        let mut pref = Rational::from(1);
        for x in &coords {
            pref *= box_prefactor(x, m);
        }
        return Ok(Scalar::Exact(pref * ratio));
    }
    let v = adaptive_float(|p| {
        let coords = point.float_coords(p);
        let zs: Vec<Float> = coords.iter().map(z_of).collect();
        let ratio = g_ratio_raw(&num_d, &den_d, &zs, float_same(p))?;
        let mut pref = Float::with_val(p, 1);
        for x in &coords {
            pref *= box_prefactor(x, m);
        }
        Ok(pref * ratio)
    })?;
    Ok(Scalar::Real(v))
}

/// Residue sum T = sum_i base^(exps_i) / prod_{j != i} (l_i - l_j), where
/// doubled_l fixes the pole locations (all simple: the l_i are strictly
/// decreasing) and base/exps express x^(l_i) with integer exponents.
fn t_sum<F: Field>(doubled_l: &[i64], base: &F, exps: &[i64]) -> F {
    let n = doubled_l.len();
    let mut total = base.zero_like();
    for i in 0..n {
        let mut denom = base.one_like();
        for j in 0..n {
            if j != i {
                denom = denom.mul_ref(&base.from_i64_like((doubled_l[i] - doubled_l[j]) / 2));
            }
        }
        total = total.add_ref(&pow_i64(base, exps[i]).div_ref(&denom));
    }
    total
}

fn halved(dl: &[i64]) -> Vec<i64> {
    dl.iter().map(|d| d / 2).collect()
}

/// (N-1)!/(x-1)^(N-1) * T at a fixed float precision.
fn normalized_schur_at(dl: &[i64], integral: bool, xf: &Float) -> Result<Float> {
    let n = dl.len();
    let t = if integral {
        t_sum(dl, xf, &halved(dl))
    } else {
        if !xf.is_sign_positive() || xf.is_zero() {
            return Err(invalid("half-integer parts need positive real x"));
        }
        let s = xf.clone().sqrt();
        t_sum(dl, &s, dl)
    };
    let mut fact = Float::with_val(xf.prec(), 1);
    for j in 1..n as i64 {
        fact *= j;
    }
    let xm1 = Float::with_val(xf.prec(), xf - 1u32);
    Ok(fact * t / pow_i64(&xm1, n as i64 - 1))
}

/// Normalized one-variable Schur specialization
/// S_lambda(x; N) = s_lambda(x, 1^(N-1)) / s_lambda(1^N), computed as the
/// residue sum (N-1)!/(x-1)^(N-1) * sum_i x^(l_i)/prod_(j!=i)(l_i - l_j).
/// Exact for rational x when the parts are integers, or when sqrt(x) is
/// rational for half-integer parts.
pub fn normalized_schur(lambda: &Signature, x: &Scalar, n: usize) -> Result<Scalar> {
    if x.is_zero() {
        return Err(invalid("x must be nonzero"));
    }
    if x.is_one() {
        return Err(invalid("x = 1 is the trivial value; use 1 directly"));
    }
    let lam = pad_to(lambda, n)?;
    let dl = lam.doubled_shifted();
    let integral = lam.is_integral();
    if let Scalar::Exact(r) = x {
        if !integral && *r < 0 {
            return Err(invalid("half-integer parts need positive real x"));
        }
        let base_exps = if integral {
            Some((r.clone(), halved(&dl)))
        } else {
            rational_sqrt(r).map(|s| (s, dl.clone()))
        };
        if let Some((base, exps)) = base_exps {
            let t = t_sum(&dl, &base, &exps);
            let mut fact = Rational::from(1);
            for j in 1..n as i64 {
                fact *= j;
            }
            let xm1 = Rational::from(r - &Rational::from(1));
            let denom = rational_pow(&xm1, n as i64 - 1)?;
            return Ok(Scalar::Exact(fact * t / denom));
        }
    }
    let v = adaptive_float(|p| normalized_schur_at(&dl, integral, &x.to_float(p)))?;
    Ok(Scalar::Real(v))
}

fn scalar_is(x: &Scalar, v: i64) -> bool {
    match x {
        Scalar::Exact(r) => *r == v,
        Scalar::Real(f) => *f == v,
    }
}

/// Normalized symplectic specialization
/// X_lambda(x; N) = chi_lambda(x, 1^(N-1))/chi_lambda(1^N), computed through
/// the doubled-rank Schur specialization: (2/(x+1)) * S_nu(x; 2N) with nu
/// the merge-reflection of lambda.
pub fn normalized_symplectic(lambda: &Signature, x: &Scalar, n: usize) -> Result<Scalar> {
    if scalar_is(x, 1) {
        return Ok(Scalar::Exact(Rational::from(1)));
    }
    if x.is_zero() || scalar_is(x, -1) {
        return Err(invalid("x must avoid 0 and -1"));
    }
    let nu = lambda.merge_reflect(n)?;
    let s = normalized_schur(&nu, x, 2 * n)?;
    Ok(match s {
        Scalar::Exact(r) => {
            let xe = x.as_exact().expect("exact result implies exact input");
            Scalar::Exact(r * Rational::from(2) / Rational::from(xe + &Rational::from(1)))
        }
        Scalar::Real(f) => {
            let xf = x.to_float(f.prec());
            let two = Float::with_val(f.prec(), 2);
            Scalar::Real(f * two / (xf + 1u32))
        }
    })
}

/// The doubled-rank exponents behind the normalized boxed sum: the
/// merge-reflection of the rectangle with all parts (m-1)/2.
fn box_residue_exponents(m: i64, n: usize) -> Vec<i64> {
    Signature::uniform_doubled(m - 1, n)
        .merge_reflect(n)
        .expect("rectangle reflection is always a valid signature")
        .doubled_shifted()
}

/// Phi_m(x_1..x_k; n) = phi_m(x_1..x_k, 1^(n-k)) / phi_m(1^n).
///
/// One explicit coordinate dispatches to the residue-sum path when it is
/// cheap and safe (positive x, away from 1 and -1, exact only when sqrt(x)
/// is rational); everything else goes through the confluent determinant
/// ratio, which handles any multivariate point including negative
/// coordinates and x = -1.
pub fn phi_m_normalized(m: i64, point: &EvalPoint, n: usize) -> Result<Scalar> {
    if m < 0 {
        return Err(invalid("box width must be nonnegative"));
    }
    if point.total_len() != n {
        return Err(invalid("point length must equal the rank"));
    }
    if point.explicit().iter().all(|v| scalar_is(v, 1)) {
        return Ok(Scalar::Exact(Rational::from(1)));
    }
    if point.explicit().len() == 1 {
        let x = &point.explicit()[0];
        let negative = match x {
            Scalar::Exact(r) => *r < 0,
            Scalar::Real(f) => f.is_sign_negative(),
        };
        if !negative {
            let dl_m = box_residue_exponents(m, n);
            let dl_0 = box_residue_exponents(0, n);
            let exact_sqrt = x.as_exact().and_then(rational_sqrt);
            if let Some(s) = exact_sqrt {
                let num = t_sum(&dl_m, &s, &dl_m);
                let den = t_sum(&dl_0, &s, &dl_0);
                if den != 0 {
                    return Ok(Scalar::Exact(rational_pow(&s, m)? * num / den));
                }
            } else if !x.is_exact() || n > 12 {
                // irrational square root: the residue sum runs in floats;
                // exact inputs at small rank prefer the still-exact
                // determinant path below
                let v = adaptive_float(|p| {
                    let s = x.to_float(p).sqrt();
                    let num = t_sum(&dl_m, &s, &dl_m);
                    let den = t_sum(&dl_0, &s, &dl_0);
                    if den.is_zero() {
                        return Err(invalid("degenerate evaluation point"));
                    }
                    Ok(pow_i64(&s, m) * num / den)
                })?;
                return Ok(Scalar::Real(v));
            }
        }
    }
    if point.all_exact() {
        let num = phi_m_eval(m, point, n)?;
        let den = phi_m_eval(m, &EvalPoint::ones(n), n)?;
        if let (Some(a), Some(b)) = (num.as_exact(), den.as_exact()) {
            return Ok(Scalar::Exact(Rational::from(a / b)));
        }
    }
    let v = adaptive_float(|p| phi_m_normalized_at(m, point, n, p))?;
    Ok(Scalar::Real(v))
}

fn phi_m_normalized_at(m: i64, point: &EvalPoint, n: usize, prec: u32) -> Result<Float> {
    let (num_d, den_d) = box_exponents(m, n);
    let coords = point.float_coords(prec);
    let zs: Vec<Float> = coords.iter().map(z_of).collect();
    let ratio = g_ratio_raw(&num_d, &den_d, &zs, float_same(prec))?;
    let mut pref = Float::with_val(prec, 1);
    for x in &coords {
        pref *= box_prefactor(x, m);
    }
    let ones = vec![Float::with_val(prec, 1); n];
    let zeros: Vec<Float> = ones.iter().map(z_of).collect();
    let r1 = g_ratio_raw(&num_d, &den_d, &zeros, float_same(prec))?;
    let p1 = pow_i64(&Float::with_val(prec, if m % 2 == 0 { 1 } else { 2 }), n as i64);
    Ok(pref * ratio / (p1 * r1))
}

/// Fixed-precision determinant-path evaluation of Phi_m, for verification
/// runs that pin the precision instead of using the doubling driver.
pub fn phi_m_normalized_float(m: i64, point: &EvalPoint, n: usize, prec: u32) -> Result<Float> {
    if m < 0 || point.total_len() != n {
        return Err(invalid("bad box evaluation request"));
    }
    phi_m_normalized_at(m, point, n, prec)
}

/// Multivariate Bessel value by the confluent exponential alternant:
/// rows expand x-clusters, columns expand y-clusters, and the (t,u) entry at
/// (xi, eta) is e^(xi eta) sum_c xi^(u-c) eta^(t-c) / ((u-c)!(t-c)!c!).
fn bessel_core<F: Analytic>(xs: &[F], ys: &[F], same: impl Fn(&F, &F) -> bool) -> Result<F> {
    let k = xs.len();
    if k == 0 || ys.len() != k {
        return Err(invalid("x and y must be nonempty and equally long"));
    }
    let xc = cluster_by(xs, &same);
    let yc = cluster_by(ys, &same);
    let one = xs[0].one_like();
    let mut mat: Vec<Vec<F>> = Vec::with_capacity(k);
    for (xi, &mx) in xc.points.iter().zip(xc.mults.iter()) {
        for t in 0..mx {
            let mut row = Vec::with_capacity(k);
            for (eta, &my) in yc.points.iter().zip(yc.mults.iter()) {
                let e = xi.mul_ref(eta).exp_val();
                for u in 0..my {
                    let mut sum = one.zero_like();
                    for c in 0..=t.min(u) {
                        let mut term = pow_i64(xi, (u - c) as i64)
                            .mul_ref(&pow_i64(eta, (t - c) as i64));
                        for f in [u - c, t - c, c] {
                            for s in 1..=f as i64 {
                                term = term.div_ref(&one.from_i64_like(s));
                            }
                        }
                        sum = sum.add_ref(&term);
                    }
                    row.push(e.mul_ref(&sum));
                }
            }
            mat.push(row);
        }
    }
    debug_assert!(mat.iter().all(|r| r.len() == k));
    let det = det_in_place(mat);
    let mut c = one.clone();
    for j in 1..k as i64 {
        for s in 1..=j {
            c = c.mul_ref(&one.from_i64_like(s));
        }
    }
    let vx = reduced_vandermonde(&xc);
    let vy = reduced_vandermonde(&yc);
    if vx.is_zero_val() || vy.is_zero_val() {
        return Err(invalid("cluster points must be distinct"));
    }
    Ok(c.mul_ref(&det).div_ref(&vx).div_ref(&vy))
}

/// Fast double-precision Bessel evaluation (Monte Carlo workhorse).
pub fn bessel_b(xs: &[f64], ys: &[f64]) -> Result<f64> {
    bessel_core(xs, ys, |a, b| {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    })
}

/// High-precision Bessel evaluation at the precision of the inputs.
pub fn bessel_b_float(xs: &[Float], ys: &[Float]) -> Result<Float> {
    let prec = xs
        .iter()
        .chain(ys.iter())
        .map(Float::prec)
        .max()
        .unwrap_or(64);
    bessel_core(xs, ys, float_same(prec))
}

/// Two-sided report of the index-shift identity
/// S_lambda(x; N) = (beta (x^(1/beta) - 1)/(x - 1))^(N-1) S_hat(x^(1/beta); N)
/// with hat parts beta*lambda_i + (beta-1)(N-i).
#[derive(Clone, Debug)]
pub struct BetaShiftReport {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub rel_diff: f64,
    pub exact_match: bool,
}

impl BetaShiftReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.exact_match || self.rel_diff <= tol
    }
}

pub fn beta_shift_check(
    lambda: &Signature,
    n: usize,
    beta: u32,
    x: &Scalar,
) -> Result<BetaShiftReport> {
    if beta == 0 {
        return Err(invalid("beta must be positive"));
    }
    let positive = match x {
        Scalar::Exact(r) => *r > 0,
        Scalar::Real(f) => f.is_sign_positive() && !f.is_zero(),
    };
    if !positive || scalar_is(x, 1) {
        return Err(invalid("x must be positive and different from 1"));
    }
    let lam = pad_to(lambda, n)?;
    let hat_doubled: Vec<i64> = lam
        .doubled_parts()
        .iter()
        .enumerate()
        .map(|(i, &d)| beta as i64 * d + (beta as i64 - 1) * 2 * (n - 1 - i) as i64)
        .collect();
    let hat = Signature::from_doubled(hat_doubled)?;
    let lhs = normalized_schur(&lam, x, n)?;
    let b = beta as i64;
    let exact_root = x.as_exact().and_then(|r| rational_root(r, beta));
    let mut rhs = None;
    if let (Some(r), Some(t)) = (x.as_exact(), exact_root.as_ref()) {
        // exact root of x, and the shifted shape evaluates exactly there
        if let Scalar::Exact(sh) = normalized_schur(&hat, &Scalar::Exact(t.clone()), n)? {
            let factor = Rational::from(t - &Rational::from(1)) * b
                / Rational::from(r - &Rational::from(1));
            rhs = Some(Scalar::Exact(rational_pow(&factor, n as i64 - 1)? * sh));
        }
    }
    let rhs = match rhs {
        Some(v) => v,
        None => {
            let dl = hat.doubled_shifted();
            let integral = hat.is_integral();
            let v = adaptive_float(|p| {
                let xf = x.to_float(p);
                let xr: Float = (xf.clone().ln() / beta).exp();
                let s_hat = normalized_schur_at(&dl, integral, &xr)?;
                let factor = Float::with_val(p, &xr - 1u32) * b / Float::with_val(p, &xf - 1u32);
                Ok(pow_i64(&factor, n as i64 - 1) * s_hat)
            })?;
            Scalar::Real(v)
        }
    };
    let exact_match = match (&lhs, &rhs) {
        (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
        _ => false,
    };
    let rel_diff = if exact_match {
        0.0
    } else {
        let p = 256;
        let a = lhs.to_float(p);
        let b = rhs.to_float(p);
        let diff = Float::with_val(p, &a - &b).abs();
        let mut scale = a.abs();
        let babs = b.abs();
        if babs > scale {
            scale = babs;
        }
        if scale.is_zero() {
            0.0
        } else {
            (diff / scale).to_f64()
        }
    };
    Ok(BetaShiftReport {
        lhs,
        rhs,
        rel_diff,
        exact_match,
    })
}

/// Brute-force sum of schur_eval over every shape in the m x n box, for
/// cross-checking the determinant identity. Exact points only.
pub fn box_schur_sum(m: i64, n: usize, point: &EvalPoint) -> Result<Rational> {
    if !point.all_exact() {
        return Err(invalid("brute-force sum is exact-only"));
    }
    let mut total = Rational::new();
    let mut shape = vec![0i64; n];
    fn rec(
        shape: &mut Vec<i64>,
        idx: usize,
        max: i64,
        n: usize,
        point: &EvalPoint,
        total: &mut Rational,
    ) -> Result<()> {
        if idx == n {
            let lam = Signature::from_parts(shape)?;
            let v = schur_eval(&lam, point, n)?;
            *total += v.as_exact().expect("exact point gives exact value");
            return Ok(());
        }
        for p in 0..=max {
            shape[idx] = p;
            rec(shape, idx + 1, p, n, point, total)?;
        }
        Ok(())
    }
    rec(&mut shape, 0, m, n, point, &mut total)?;
    Ok(total)
}
