//! Triangular arrays (Gelfand-Tsetlin patterns) as the data model for
//! lozenge tilings: the half hexagon with a free right boundary is a pattern
//! of depth n with entries up to m, the full hexagon a pattern of depth 2n
//! whose top row is pinned to (m^n, 0^n).
//!
//! Everything downstream works in these coordinates. The semistandard
//! tableau bijection, the horizontal-lozenge position vectors, exhaustive
//! lexicographic enumeration at desk scale, and the boundary profile and
//! counting measure of a signature all live here; the lozenge picture itself
//! is only ever produced by the plotting layer.

use crate::charlib::{phi_m_eval, schur_dim, EvalPoint};
use crate::error::{invalid, Error, Result};
use crate::signature::Signature;
use rug::Integer;

/// Default ceiling on exhaustive enumeration (number of patterns).
pub const ENUM_CAP: u64 = 10_000_000;

/// A triangular array: row k has k entries (row 1 first), each row weakly
/// decreasing, consecutive rows interlacing, all entries in [0, ceiling].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTPattern {
    rows: Vec<Vec<i64>>,
    ceiling: i64,
}

impl GTPattern {
    pub fn new(rows: Vec<Vec<i64>>, ceiling: i64) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("pattern needs at least one row"));
        }
        if ceiling < 0 {
            return Err(invalid("ceiling must be nonnegative"));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(invalid(format!(
                    "row {} must have {} entries, found {}",
                    k + 1,
                    k + 1,
                    row.len()
                )));
            }
            for (i, &v) in row.iter().enumerate() {
                if v < 0 || v > ceiling {
                    return Err(invalid(format!("entry {v} outside [0, {ceiling}]")));
                }
                if i + 1 < row.len() && row[i + 1] > v {
                    return Err(invalid("rows must be weakly decreasing"));
                }
            }
            if k > 0 {
                let below = &rows[k - 1];
                for i in 0..below.len() {
                    if !(row[i] >= below[i] && below[i] >= row[i + 1]) {
                        return Err(invalid(format!(
                            "rows {} and {} do not interlace",
                            k,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(GTPattern { rows, ceiling })
    }

    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    pub fn ceiling(&self) -> i64 {
        self.ceiling
    }

    /// Row k, 1-based.
    pub fn row(&self, k: usize) -> Result<&[i64]> {
        if k == 0 || k > self.rows.len() {
            return Err(invalid("row index out of range"));
        }
        Ok(&self.rows[k - 1])
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// The top row as a signature (the shape of the tiling).
    pub fn shape(&self) -> Signature {
        Signature::from_parts(self.rows.last().expect("nonempty"))
            .expect("pattern rows are valid signatures")
    }

    /// Horizontal-lozenge positions on vertical line k:
    /// Y^k_j = y^k_j + (k - j), strictly decreasing.
    pub fn positions(&self, k: usize) -> Result<PositionVector> {
        let row = self.row(k)?;
        let entries = row
            .iter()
            .enumerate()
            .map(|(j, &y)| y + (k - 1 - j) as i64)
            .collect();
        Ok(PositionVector { k, entries })
    }

    /// One-line JSON rendering `[[r1],[r2a,r2b],...]`, row 1 first.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("plain integers always serialize")
    }

    pub fn from_json(line: &str, ceiling: i64) -> Result<Self> {
        let rows: Vec<Vec<i64>> = serde_json::from_str(line.trim())
            .map_err(|e| invalid(format!("malformed pattern line: {e}")))?;
        GTPattern::new(rows, ceiling)
    }

    /// The tableau whose k-th growth stage is row k: cells added between
    /// rows k-1 and k are filled with k. Rows of the result are weakly
    /// increasing, columns strictly increasing, entries at most depth.
    pub fn to_ssyt(&self) -> Vec<Vec<i64>> {
        let depth = self.depth();
        let mut tableau = Vec::new();
        for i in 0..depth {
            let mut row = Vec::new();
            for k in (i + 1)..=depth {
                let cur = self.rows[k - 1][i];
                let prev = if k - 1 > i { self.rows[k - 2][i] } else { 0 };
                for _ in prev..cur {
                    row.push(k as i64);
                }
            }
            if !row.is_empty() {
                tableau.push(row);
            }
        }
        tableau
    }

    /// Inverse of [`to_ssyt`]: row k of the pattern is the shape occupied by
    /// entries at most k, zero-padded to length k.
    pub fn from_ssyt(tableau: &[Vec<i64>], depth: usize, ceiling: i64) -> Result<Self> {
        if depth == 0 {
            return Err(invalid("depth must be positive"));
        }
        if tableau.len() > depth {
            return Err(invalid("tableau has more rows than the depth allows"));
        }
        for (i, row) in tableau.iter().enumerate() {
            if row.is_empty() {
                return Err(invalid("tableau rows must be nonempty"));
            }
            if row.len() as i64 > ceiling {
                return Err(invalid("tableau row wider than the box"));
            }
            if i + 1 < tableau.len() && tableau[i + 1].len() > row.len() {
                return Err(invalid("tableau shape must be a partition"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 1 || v > depth as i64 {
                    return Err(invalid(format!("entry {v} outside 1..={depth}")));
                }
                if j + 1 < row.len() && row[j + 1] < v {
                    return Err(invalid("tableau rows must be weakly increasing"));
                }
                if i + 1 < tableau.len() && tableau[i + 1].len() > j && tableau[i + 1][j] <= v {
                    return Err(invalid("tableau columns must be strictly increasing"));
                }
            }
        }
        let mut rows = Vec::with_capacity(depth);
        for k in 1..=depth {
            let mut row = vec![0i64; k];
            for (i, trow) in tableau.iter().enumerate() {
                if i >= k {
                    break;
                }
                row[i] = trow.iter().filter(|&&v| v <= k as i64).count() as i64;
            }
            rows.push(row);
        }
        GTPattern::new(rows, ceiling)
    }
}

/// Positions of the horizontal lozenges on one vertical line: the row
/// entries plus the staircase shift, strictly decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionVector {
    pub k: usize,
    pub entries: Vec<i64>,
}

/// Top row λ(2n) = (m^n, 0^n) pinning the hexagon's fixed side.
pub fn hex_top(m: i64, n: usize) -> Signature {
    let mut parts = vec![m; n];
    parts.extend(std::iter::repeat(0).take(n));
    Signature::from_parts(&parts).expect("rectangle over zeros is a valid shape")
}

/// Number of free-boundary tilings of the (n, m) half hexagon: the boxed
/// Schur sum at the all-ones point.
pub fn count_free(n: usize, m: i64) -> Result<Integer> {
    if n == 0 || m < 0 {
        return Err(invalid("need n >= 1 and m >= 0"));
    }
    let v = phi_m_eval(m, &EvalPoint::ones(n), n)?;
    let r = v.as_exact().expect("all-ones point evaluates exactly");
    debug_assert_eq!(*r.denom(), Integer::from(1));
    Ok(r.numer().clone())
}

/// Number of hexagon tilings: the dimension of the pinned top shape.
pub fn count_hex(n: usize, m: i64) -> Result<Integer> {
    if n == 0 || m < 0 {
        return Err(invalid("need n >= 1 and m >= 0"));
    }
    schur_dim(&hex_top(m, n), 2 * n)
}

/// Lazy lexicographic stream of patterns (concatenated rows, row 1 first).
/// `top`, when set, pins the final row.
pub struct PatternStream {
    depth: usize,
    ceiling: i64,
    top: Option<Vec<i64>>,
    rows: Vec<Vec<i64>>,
    started: bool,
    done: bool,
}

impl PatternStream {
    fn lower_bound(&self, rk: usize, i: usize) -> i64 {
        let from_below = if rk > 0 && i < rk { self.rows[rk - 1][i] } else { 0 };
        let from_top = match &self.top {
            Some(lam) => lam[i + self.depth - rk - 1],
            None => 0,
        };
        from_below.max(from_top)
    }

    fn upper_bound(&self, rk: usize, i: usize) -> i64 {
        let from_below = if i == 0 {
            self.ceiling
        } else {
            self.rows[rk - 1][i - 1]
        };
        let from_top = match &self.top {
            Some(lam) => lam[i],
            None => self.ceiling,
        };
        from_below.min(from_top)
    }

    fn reset_from(&mut self, rk0: usize, i0: usize) {
        for i in i0..=rk0 {
            self.rows[rk0][i] = self.lower_bound(rk0, i);
        }
        for rk in rk0 + 1..self.depth {
            for i in 0..=rk {
                self.rows[rk][i] = self.lower_bound(rk, i);
            }
        }
    }

    fn snapshot(&self) -> GTPattern {
        GTPattern::new(self.rows.clone(), self.ceiling).expect("stream maintains invariants")
    }
}

impl Iterator for PatternStream {
    type Item = GTPattern;

    fn next(&mut self) -> Option<GTPattern> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.reset_from(0, 0);
            return Some(self.snapshot());
        }
        let mut rk = self.depth - 1;
        let mut i = rk;
        loop {
            if self.rows[rk][i] < self.upper_bound(rk, i) {
                self.rows[rk][i] += 1;
                if i < rk {
                    self.reset_from(rk, i + 1);
                } else if rk + 1 < self.depth {
                    self.reset_from(rk + 1, 0);
                }
                return Some(self.snapshot());
            }
            if i > 0 {
                i -= 1;
            } else if rk > 0 {
                rk -= 1;
                i = rk;
            } else {
                self.done = true;
                return None;
            }
        }
    }
}

fn cap_check(what: &str, count: &Integer, cap: u64) -> Result<()> {
    if *count > cap {
        return Err(Error::CapExceeded(format!(
            "{what} enumeration would emit {count} patterns, over the cap of {cap}"
        )));
    }
    Ok(())
}

/// Every free-boundary pattern of depth n with entries in [0, m], in
/// lexicographic order; refuses when the count exceeds [`ENUM_CAP`].
pub fn enumerate_free(n: usize, m: i64) -> Result<PatternStream> {
    let count = count_free(n, m)?;
    cap_check("free-boundary", &count, ENUM_CAP)?;
    Ok(PatternStream {
        depth: n,
        ceiling: m,
        top: None,
        rows: (0..n).map(|k| vec![0; k + 1]).collect(),
        started: false,
        done: false,
    })
}

/// Every hexagon pattern (depth 2n, top row pinned to (m^n, 0^n)), in
/// lexicographic order; refuses when the count exceeds [`ENUM_CAP`].
pub fn enumerate_hex(n: usize, m: i64) -> Result<PatternStream> {
    let count = count_hex(n, m)?;
    cap_check("hexagon", &count, ENUM_CAP)?;
    let top = hex_top(m, n).parts()?;
    Ok(PatternStream {
        depth: 2 * n,
        ceiling: m,
        top: Some(top),
        rows: (0..2 * n).map(|k| vec![0; k + 1]).collect(),
        started: false,
        done: false,
    })
}

/// Boundary profile w_lambda(x): 2*lambda_i - x on the descending tooth
/// [lambda_i - i, lambda_i - i + 1], and x + 2(i-1) on the flat stretch
/// after tooth i; reduces to |x| outside the diagram of a zero shape.
pub fn profile_eval(lambda: &Signature, x: f64) -> f64 {
    let n = lambda.len();
    let parts: Vec<f64> = lambda
        .doubled_parts()
        .iter()
        .map(|&d| d as f64 / 2.0)
        .collect();
    for (idx, &p) in parts.iter().enumerate() {
        let i = (idx + 1) as f64;
        if x >= p - i && x <= p - i + 1.0 {
            return 2.0 * p - x;
        }
    }
    let teeth_left = parts
        .iter()
        .enumerate()
        .filter(|&(idx, &p)| x < p - (idx + 1) as f64)
        .count();
    debug_assert!(teeth_left == n || x > parts[teeth_left] - (teeth_left as f64 + 1.0) + 1.0);
    x + 2.0 * teeth_left as f64
}

/// The empirical measure of a signature: one atom (lambda_i + N - i)/N of
/// weight 1/N per part.
#[derive(Clone, Debug)]
pub struct CountingMeasure {
    pub atoms: Vec<f64>,
}

impl CountingMeasure {
    pub fn weight(&self) -> f64 {
        1.0 / self.atoms.len() as f64
    }

    /// r-th moment: (1/N) sum of atom^r.
    pub fn moment(&self, r: u32) -> f64 {
        self.atoms.iter().map(|a| a.powi(r as i32)).sum::<f64>() * self.weight()
    }
}

pub fn counting_measure(lambda: &Signature) -> Result<CountingMeasure> {
    if !lambda.is_integral() {
        return Err(invalid("counting measure is defined for integer parts"));
    }
    let n = lambda.len();
    let atoms = lambda
        .doubled_parts()
        .iter()
        .enumerate()
        .map(|(i, &d)| (d as f64 / 2.0 + (n - 1 - i) as f64) / n as f64)
        .collect();
    Ok(CountingMeasure { atoms })
}
