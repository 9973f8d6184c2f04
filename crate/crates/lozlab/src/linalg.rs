//! Determinants with coincident evaluation points.
//!
//! Character evaluations in this crate are ratios of alternants. At a point
//! with repeated coordinates the alternant and the Vandermonde both vanish;
//! the standard limit replaces the repeated rows by derivative rows. With
//! rows normalized by 1/t! the limit reads
//!
//! ```text
//! lim det[f_j(x_i)] / V(x) = det[ f_j^(t)(p_c)/t! ] / prod_{c<c'} (p_c' - p_c)^{m_c m_c'}
//! ```
//!
//! where the x_i fall into clusters (p_c, m_c). Ratios of two alternants
//! over the same clusters need only the derivative-row determinants; the
//! reduced Vandermonde cancels.
//!
//! Two column families appear. Plain powers x^l have derivative rows
//! binom(l,t) x^(l-t). The two-sided family g_a(x) = x^a - x^(-a) is handled
//! through z = x + 1/x - 2: g factors as a weight times a polynomial in z
//! (one polynomial family for integer a, one for half-integer a, both on the
//! recurrence P_{k+1} = (2+z) P_k - P_{k-1}), and derivative rows in z come
//! from running that recurrence on truncated jets. The z substitution keeps
//! every entry rational in x and merges {x, 1/x} collisions automatically.

use crate::error::{invalid, Result};
use crate::scalar::Field;
use rug::Rational;

/// Determinant by Gaussian elimination with magnitude pivoting.
/// Exact over rationals; over floats the caller is expected to wrap the
/// evaluation in the adaptive-precision driver.
pub fn det_in_place<F: Field>(mut mat: Vec<Vec<F>>) -> F {
    let n = mat.len();
    assert!(mat.iter().all(|r| r.len() == n), "square matrix required");
    if n == 0 {
        panic!("empty determinant");
    }
    let mut acc = mat[0][0].one_like();
    let mut negate = false;
    for col in 0..n {
        let mut piv = col;
        let mut found = !mat[col][col].is_zero_val();
        for r in col + 1..n {
            if !mat[r][col].is_zero_val() && (!found || mat[r][col].abs_gt(&mat[piv][col])) {
                piv = r;
                found = true;
            }
        }
        if !found {
            return mat[0][0].zero_like();
        }
        if piv != col {
            mat.swap(col, piv);
            negate = !negate;
        }
        acc = acc.mul_ref(&mat[col][col]);
        for r in col + 1..n {
            if mat[r][col].is_zero_val() {
                continue;
            }
            let f = mat[r][col].div_ref(&mat[col][col]);
            for c in col + 1..n {
                let sub = f.mul_ref(&mat[col][c]);
                mat[r][c] = mat[r][c].sub_ref(&sub);
            }
        }
    }
    if negate {
        acc.neg_ref()
    } else {
        acc
    }
}

/// Evaluation points grouped into coincidence clusters, order preserved.
#[derive(Clone, Debug)]
pub struct Clusters<F> {
    pub points: Vec<F>,
    pub mults: Vec<usize>,
}

impl<F> Clusters<F> {
    pub fn total(&self) -> usize {
        self.mults.iter().sum()
    }
}

/// Group values by the given sameness predicate (first value of a group is
/// its representative). Exact equality for rationals; floats pass a relative
/// tolerance well below any genuine point separation.
pub fn cluster_by<F: Clone>(vals: &[F], same: impl Fn(&F, &F) -> bool) -> Clusters<F> {
    let mut points: Vec<F> = Vec::new();
    let mut mults: Vec<usize> = Vec::new();
    for v in vals {
        match points.iter().position(|p| same(p, v)) {
            Some(i) => mults[i] += 1,
            None => {
                points.push(v.clone());
                mults.push(1);
            }
        }
    }
    Clusters { points, mults }
}

/// x^e for signed e; x must be nonzero when e < 0.
pub fn pow_i64<F: Field>(x: &F, e: i64) -> F {
    let mut base = if e < 0 {
        x.one_like().div_ref(x)
    } else {
        x.clone()
    };
    let mut k = e.unsigned_abs();
    let mut acc = x.one_like();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul_ref(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul_ref(&base);
        }
    }
    acc
}

/// binom(l, t) as a field element, valid for any integer l (falling
/// factorial over t!).
pub fn binomial_f<F: Field>(like: &F, l: i64, t: usize) -> F {
    let mut acc = like.one_like();
    for i in 0..t {
        acc = acc.mul_ref(&like.from_i64_like(l - i as i64));
        acc = acc.div_ref(&like.from_i64_like(i as i64 + 1));
    }
    acc
}

/// Taylor coefficients (through `order`, inclusive) of the z-polynomial
/// carrying g_{d/2}, at the point z0. `doubled` is 2a for g_a; even doubled
/// selects the integer family (degree a-1, value a at z=0), odd doubled the
/// half-integer family (degree (d-1)/2, value d at z=0). Negative indices
/// use g_{-a} = -g_a.
pub fn g_poly_jet<F: Field>(doubled: i64, z0: &F, order: usize) -> Vec<F> {
    let negate = doubled < 0;
    let d = doubled.abs();
    let zero = z0.zero_like();
    let one = z0.one_like();
    let n = order + 1;
    // Jet multiplication by (2 + z) at base z0: out[t] = (2+z0) p[t] + p[t-1].
    let shift = z0.add_ref(&z0.from_i64_like(2));
    let step = |p: &[F], q: &[F]| -> Vec<F> {
        let mut out = Vec::with_capacity(n);
        for t in 0..n {
            let mut v = shift.mul_ref(&p[t]);
            if t > 0 {
                v = v.add_ref(&p[t - 1]);
            }
            out.push(v.sub_ref(&q[t]));
        }
        out
    };
    let (mut prev, mut cur, reps) = if d % 2 == 0 {
        // integer family: P_0 = 0, P_1 = 1, target index a = d/2
        let p0 = vec![zero.clone(); n];
        let mut p1 = vec![zero.clone(); n];
        p1[0] = one;
        (p0, p1, d / 2)
    } else {
        // half-integer family: P_0 = 1, P_1 = z + 3, target index (d-1)/2
        let mut p0 = vec![zero.clone(); n];
        p0[0] = one.clone();
        let mut p1 = vec![zero.clone(); n];
        p1[0] = z0.add_ref(&z0.from_i64_like(3));
        if n > 1 {
            p1[1] = one;
        }
        (p0, p1, (d - 1) / 2)
    };
    for _ in 1..reps.max(1) {
        let next = step(&cur, &prev);
        prev = cur;
        cur = next;
    }
    let mut jet = if reps == 0 { prev } else { cur };
    if negate {
        for c in jet.iter_mut() {
            *c = c.neg_ref();
        }
    }
    jet
}

/// det[ P_{a_j} at cluster derivative rows ] for the g family, rows ordered
/// cluster by cluster with derivative order ascending, 1/t! included.
pub fn confluent_g_det<F: Field>(doubled_exps: &[i64], zc: &Clusters<F>) -> F {
    let n = doubled_exps.len();
    assert_eq!(zc.total(), n, "cluster multiplicities must sum to the rank");
    let mut cols: Vec<Vec<F>> = Vec::with_capacity(n);
    for &d in doubled_exps {
        let mut col = Vec::with_capacity(n);
        for (p, &m) in zc.points.iter().zip(zc.mults.iter()) {
            let jet = g_poly_jet(d, p, m - 1);
            col.extend(jet.into_iter().take(m));
        }
        cols.push(col);
    }
    let mat: Vec<Vec<F>> = (0..n)
        .map(|r| (0..n).map(|c| cols[c][r].clone()).collect())
        .collect();
    det_in_place(mat)
}

/// det[ x^{l_j} at cluster derivative rows ], entries binom(l,t) x^(l-t);
/// points must be nonzero when any exponent is negative.
pub fn confluent_power_det<F: Field>(exps: &[i64], xc: &Clusters<F>) -> F {
    let n = exps.len();
    assert_eq!(xc.total(), n, "cluster multiplicities must sum to the rank");
    let mut mat: Vec<Vec<F>> = Vec::with_capacity(n);
    for (p, &m) in xc.points.iter().zip(xc.mults.iter()) {
        for t in 0..m {
            let row: Vec<F> = exps
                .iter()
                .map(|&l| {
                    let b = binomial_f(p, l, t);
                    if b.is_zero_val() {
                        b
                    } else {
                        b.mul_ref(&pow_i64(p, l - t as i64))
                    }
                })
                .collect();
            mat.push(row);
        }
    }
    det_in_place(mat)
}

/// prod_{c<c'} (p_c' - p_c)^(m_c m_c'), the Vandermonde of the distinct
/// cluster points that a confluent determinant is implicitly divided by.
pub fn reduced_vandermonde<F: Field>(c: &Clusters<F>) -> F {
    let like = &c.points[0];
    let mut acc = like.one_like();
    for i in 0..c.points.len() {
        for j in i + 1..c.points.len() {
            let diff = c.points[j].sub_ref(&c.points[i]);
            let e = (c.mults[i] * c.mults[j]) as i64;
            acc = acc.mul_ref(&pow_i64(&diff, e));
        }
    }
    acc
}

/// A nonzero exact solution of M u = 0 for square rational M of rank n-1.
/// Returns an error when M is invertible (no null vector) and picks the
/// first free column when the rank is lower still.
pub fn rational_null_vector(mat: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let n = mat.len();
    assert!(mat.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Rational>> = mat.to_vec();
    // pivot column of each eliminated row, in elimination order
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        let inv = Rational::from(&a[row][col]);
        for c in col..n {
            let v = Rational::from(&a[row][c]) / &inv;
            a[row][c] = v;
        }
        for r in 0..n {
            if r == row || a[r][col] == 0 {
                continue;
            }
            let f = Rational::from(&a[r][col]);
            for c in col..n {
                let sub = Rational::from(&a[row][c]) * &f;
                let v = Rational::from(&a[r][c]) - sub;
                a[r][c] = v;
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == n {
            return Err(invalid("matrix is invertible, no null vector"));
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..n)
        .find(|c| !pivot_cols.contains(c))
        .expect("rank-deficient matrix has a free column");
    let mut u = vec![Rational::new(); n];
    u[free] = Rational::from(1);
    for &(r, c) in pivots.iter().rev() {
        // row r reads: u_c + sum_{c' > c} a[r][c'] u_{c'} = 0
        let mut acc = Rational::new();
        for cc in c + 1..n {
            if a[r][cc] != 0 && u[cc] != 0 {
                acc += Rational::from(&a[r][cc]) * &u[cc];
            }
        }
        u[c] = -acc;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn qr(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn exact_three_by_three() {
        let m = vec![
            vec![q(2), q(0), q(1)],
            vec![q(1), q(3), q(2)],
            vec![q(0), q(1), q(4)],
        ];
        assert_eq!(det_in_place(m), q(21));
    }

    #[test]
    fn singular_is_zero() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(det_in_place(m), q(0));
    }

    #[test]
    fn power_confluence_gives_weyl_dimension() {
        // ratio of power determinants at a triple point x = 1 is the
        // dimension formula; exponents (4,2,0)/(2,1,0) give 8
        let c = Clusters {
            points: vec![q(1)],
            mults: vec![3],
        };
        let num = confluent_power_det(&[4, 2, 0], &c);
        let den = confluent_power_det(&[2, 1, 0], &c);
        assert_eq!(num / den, q(8));
    }

    #[test]
    fn g_jets_match_hand_expansion() {
        // integer family at z=0: P_3 = z^2 + 4z + 3
        let j = g_poly_jet(6, &q(0), 2);
        assert_eq!(j, vec![q(3), q(4), q(1)]);
        // half family: P for doubled 5 is z^2 + 5z + 5
        let j = g_poly_jet(5, &q(0), 3);
        assert_eq!(j, vec![q(5), q(5), q(1), q(0)]);
        // value at z=0 is the index itself
        assert_eq!(g_poly_jet(14, &q(0), 0)[0], q(7));
        assert_eq!(g_poly_jet(9, &q(0), 0)[0], q(9));
        // antisymmetry
        assert_eq!(g_poly_jet(-6, &q(0), 1), vec![q(-3), q(-4)]);
    }

    #[test]
    fn g_dets_reproduce_box_counts() {
        // ratio of half-family determinants at a double point z = 0 with
        // column indices doubled (5,3)/(3,1) counts the 2x2 box chains: 10
        let c = Clusters {
            points: vec![q(0)],
            mults: vec![2],
        };
        let num = confluent_g_det(&[5, 3], &c);
        let den = confluent_g_det(&[3, 1], &c);
        assert_eq!(num / den, q(10));
        // split points z(2) = 1/2, z(1) = 0 with the same columns: 23/2
        let c = Clusters {
            points: vec![qr(1, 2), q(0)],
            mults: vec![1, 1],
        };
        let num = confluent_g_det(&[5, 3], &c);
        let den = confluent_g_det(&[3, 1], &c);
        assert_eq!(num / den, qr(23, 2));
    }

    #[test]
    fn reduced_vandermonde_powers() {
        let c = Clusters {
            points: vec![q(0), q(2)],
            mults: vec![2, 1],
        };
        assert_eq!(reduced_vandermonde(&c), q(4));
    }

    #[test]
    fn null_vector_of_singular_matrix() {
        let m = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(1), q(0), q(1)],
        ];
        let u = rational_null_vector(&m).unwrap();
        assert!(u.iter().any(|v| *v != 0));
        for row in &m {
            let mut acc = Rational::new();
            for (a, b) in row.iter().zip(u.iter()) {
                acc += Rational::from(a) * b;
            }
            assert_eq!(acc, 0);
        }
        let inv = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert!(rational_null_vector(&inv).is_err());
    }
}
