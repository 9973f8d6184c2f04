//! Truncated Taylor series (jets) at a fixed base point.
//!
//! A `Jet` holds coefficients c_0..c_R of f(base + t) = sum c_k t^k; all
//! arithmetic is exact truncation to order R. Addition, multiplication and
//! division work over any [`Field`]; ln, exp and sqrt additionally need an
//! [`Analytic`] scalar. The base point is 1 everywhere in this crate (the
//! derivatives feeding the limit-shape moments are taken at u = 1), but the
//! struct carries it for display.

use crate::error::{invalid, Result};
use crate::scalar::{Analytic, Field};

#[derive(Clone, Debug)]
pub struct Jet<F> {
    pub base: F,
    pub coeffs: Vec<F>,
}

impl<F: Field> Jet<F> {
    /// Constant jet: f = c.
    pub fn constant(base: &F, c: F, order: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); order + 1];
        coeffs[0] = c;
        Jet {
            base: base.clone(),
            coeffs,
        }
    }

    /// The identity jet: f(base + t) = base + t.
    pub fn variable(base: &F, order: usize) -> Self {
        let mut j = Jet::constant(base, base.clone(), order);
        if order >= 1 {
            j.coeffs[1] = base.one_like();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> &F {
        &self.coeffs[0]
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub_ref(b))
    }

    fn zip(&self, o: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        assert_eq!(self.coeffs.len(), o.coeffs.len());
        Jet {
            base: self.base.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        Jet {
            base: self.base.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul_ref(s)).collect(),
        }
    }

    pub fn add_scalar(&self, s: &F) -> Self {
        let mut r = self.clone();
        r.coeffs[0] = r.coeffs[0].add_ref(s);
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.coeffs.len(), o.coeffs.len());
        let n = self.coeffs.len();
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n];
        for i in 0..n {
            if self.coeffs[i].is_zero_val() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] = out[i + j].add_ref(&self.coeffs[i].mul_ref(&o.coeffs[j]));
            }
        }
        Jet {
            base: self.base.clone(),
            coeffs: out,
        }
    }

    /// Power-series division; the divisor must have a nonzero constant term.
    pub fn div(&self, o: &Self) -> Result<Self> {
        assert_eq!(self.coeffs.len(), o.coeffs.len());
        if o.coeffs[0].is_zero_val() {
            return Err(invalid("jet division by a jet vanishing at the base point"));
        }
        let n = self.coeffs.len();
        let mut q = vec![self.coeffs[0].zero_like(); n];
        for k in 0..n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc = acc.sub_ref(&o.coeffs[j].mul_ref(&q[k - j]));
            }
            q[k] = acc.div_ref(&o.coeffs[0]);
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: q,
        })
    }

    pub fn powi(&self, e: usize) -> Self {
        let mut acc = Jet::constant(&self.base, self.coeffs[0].one_like(), self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Derivative as a jet one order shorter.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n.saturating_sub(1).max(1));
        for k in 1..n {
            out.push(self.coeffs[k].mul_ref(&self.coeffs[0].from_i64_like(k as i64)));
        }
        if out.is_empty() {
            out.push(self.coeffs[0].zero_like());
        }
        Jet {
            base: self.base.clone(),
            coeffs: out,
        }
    }

    /// Truncate (or zero-extend) to the given order.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, self.coeffs[0].zero_like());
        Jet {
            base: self.base.clone(),
            coeffs,
        }
    }
}

impl<F: Analytic> Jet<F> {
    /// ln f, requiring f(base) > 0; computed by integrating f'/f.
    pub fn ln(&self) -> Result<Self> {
        if self.coeffs[0].is_zero_val() {
            return Err(invalid("jet ln at a zero"));
        }
        let n = self.coeffs.len();
        let mut out = vec![self.coeffs[0].zero_like(); n];
        out[0] = self.coeffs[0].ln_val();
        // l'(t) = f'(t)/f(t): solve the convolution for l coefficients.
        // k*l_k = k*f_k/f_0 - (1/f_0) * sum_{j=1}^{k-1} j*l_j*f_{k-j}
        for k in 1..n {
            let mut acc = self.coeffs[k].mul_ref(&self.coeffs[0].from_i64_like(k as i64));
            for j in 1..k {
                let jf = self.coeffs[0].from_i64_like(j as i64);
                acc = acc.sub_ref(&jf.mul_ref(&out[j]).mul_ref(&self.coeffs[k - j]));
            }
            out[k] = acc
                .div_ref(&self.coeffs[0])
                .div_ref(&self.coeffs[0].from_i64_like(k as i64));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: out,
        })
    }

    /// exp f, via e' = e f'.
    pub fn exp(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![self.coeffs[0].zero_like(); n];
        out[0] = self.coeffs[0].exp_val();
        for k in 1..n {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=k {
                let jf = self.coeffs[0].from_i64_like(j as i64);
                acc = acc.add_ref(&jf.mul_ref(&self.coeffs[j]).mul_ref(&out[k - j]));
            }
            out[k] = acc.div_ref(&self.coeffs[0].from_i64_like(k as i64));
        }
        Jet {
            base: self.base.clone(),
            coeffs: out,
        }
    }

    /// sqrt f, requiring f(base) > 0.
    pub fn sqrt(&self) -> Result<Self> {
        if self.coeffs[0].is_zero_val() {
            return Err(invalid("jet sqrt at a zero"));
        }
        let n = self.coeffs.len();
        let mut out = vec![self.coeffs[0].zero_like(); n];
        out[0] = self.coeffs[0].sqrt_val();
        let two = self.coeffs[0].from_i64_like(2);
        for k in 1..n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc = acc.sub_ref(&out[j].mul_ref(&out[k - j]));
            }
            out[k] = acc.div_ref(&two.mul_ref(&out[0]));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: out,
        })
    }
}
