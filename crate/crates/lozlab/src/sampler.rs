//! Random tilings: an exact sampler driven by big-integer branching
//! weights, a single-site heat-bath Markov chain for sizes the exact
//! table cannot reach, and the position rescalings used to compare
//! boundary statistics against their continuum limits.
//!
//! The exact sampler draws the top row from the dimension-weighted law
//! over shapes in the box, then walks down one row at a time; the chain
//! resamples one entry uniformly on its allowed interval, top row
//! included, so the free boundary moves like any other site.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::Serialize;

use crate::charlib::schur_dim;
use crate::error::invalid;
use crate::signature::Signature;
use crate::stats;
use crate::tiling::{GTPattern, PositionVector};
use crate::{Error, Result};

/// Largest top-row table the exact sampler will build.
pub const TABLE_CAP: u64 = 10_000_000;

/// Stream offset used for the internal companion chain of the mixing
/// diagnostic, chosen so user-picked stream ids never collide with it.
const COMPANION_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// A seeded, stream-split random source. Equal (seed, stream) pairs
/// reproduce bit for bit; distinct streams are independent.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream { inner, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh stream at a fixed offset, for internal companion chains.
    fn companion(&self) -> RngStream {
        RngStream::new(self.seed, self.stream.wrapping_add(COMPANION_OFFSET))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Uniform big integer in [0, bound) by rejection on the top bit block.
fn uniform_below(rng: &mut RngStream, bound: &Integer) -> Integer {
    debug_assert!(*bound > 0);
    let bits = bound.significant_bits();
    let words = bits.div_ceil(32);
    let shift = words * 32 - bits;
    loop {
        let mut v = Integer::new();
        for _ in 0..words {
            v <<= 32;
            v += rng.next_u32();
        }
        v >>= shift;
        if v < *bound {
            return v;
        }
    }
}

/// All interlacing rows one shorter than `upper`, in lexicographic order.
/// Coordinate i ranges over [upper[i+1], upper[i]] independently.
struct InterlaceWalk<'a> {
    upper: &'a [i64],
    cur: Vec<i64>,
    started: bool,
    done: bool,
}

impl<'a> InterlaceWalk<'a> {
    fn new(upper: &'a [i64]) -> Self {
        debug_assert!(upper.len() >= 2);
        let cur = upper[1..].to_vec();
        InterlaceWalk { upper, cur, started: false, done: false }
    }
}

impl Iterator for InterlaceWalk<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.cur.clone());
        }
        for i in (0..self.cur.len()).rev() {
            if self.cur[i] < self.upper[i] {
                self.cur[i] += 1;
                for j in i + 1..self.cur.len() {
                    self.cur[j] = self.upper[j + 1];
                }
                return Some(self.cur.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Walk from the given top row down to row 1, drawing each row with
/// probability proportional to its dimension among the interlacing
/// candidates. Returns all rows, row 1 first.
fn descend(top: Vec<i64>, rng: &mut RngStream) -> Result<Vec<Vec<i64>>> {
    let mut rows_rev = vec![top];
    while rows_rev.last().expect("nonempty").len() > 1 {
        let lam = rows_rev.last().expect("nonempty").clone();
        let k = lam.len();
        let total = schur_dim(&Signature::from_parts(&lam)?, k)?;
        let u = uniform_below(rng, &total);
        let mut acc = Integer::new();
        let mut chosen = None;
        for mu in InterlaceWalk::new(&lam) {
            acc += schur_dim(&Signature::from_parts(&mu)?, k - 1)?;
            if acc > u {
                chosen = Some(mu);
                break;
            }
        }
        // the interlacing dimensions sum to the full dimension, so the
        // walk always terminates before the candidates run out
        rows_rev.push(chosen.expect("branching weights cover the dimension"));
    }
    rows_rev.reverse();
    Ok(rows_rev)
}

/// Exact sampler for the uniform law on free-boundary patterns: a
/// cumulative dimension table over all shapes in the box, top rows drawn
/// by binary search, lower rows by the descending walk.
#[derive(Debug)]
pub struct ExactFreeSampler {
    n: usize,
    m: i64,
    shapes: Vec<Vec<i64>>,
    cumulative: Vec<Integer>,
}

impl ExactFreeSampler {
    pub fn new(n: usize, m: i64) -> Result<Self> {
        if n == 0 || m < 0 {
            return Err(invalid("need n >= 1 and m >= 0"));
        }
        // the table holds C(n + m, n) rows; refuse before allocating
        let mut count = Integer::from(1);
        for i in 1..=n as u64 {
            count *= m as u64 + i;
            count /= i;
        }
        if count > TABLE_CAP {
            return Err(Error::CapExceeded(format!(
                "exact sampler table would hold {count} top rows, over the cap \
                 of {TABLE_CAP}; use the Markov chain sampler instead"
            )));
        }
        let shapes = box_shapes_colex(n, m);
        let mut cumulative = Vec::with_capacity(shapes.len());
        let mut acc = Integer::new();
        for shape in &shapes {
            acc += schur_dim(&Signature::from_parts(shape)?, n)?;
            cumulative.push(acc.clone());
        }
        Ok(ExactFreeSampler { n, m, shapes, cumulative })
    }

    /// Total number of patterns, equal to the boxed dimension sum.
    pub fn total(&self) -> &Integer {
        self.cumulative.last().expect("box holds the empty shape")
    }

    pub fn shape_count(&self) -> usize {
        self.shapes.len()
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<GTPattern> {
        let u = uniform_below(rng, self.total());
        let idx = self.cumulative.partition_point(|c| *c <= u);
        let rows = descend(self.shapes[idx].clone(), rng)?;
        debug_assert_eq!(rows.len(), self.n);
        GTPattern::new(rows, self.m)
    }

    pub fn sample_many(
        &self,
        count: usize,
        rng: &mut RngStream,
    ) -> Result<(Vec<GTPattern>, SamplerReport)> {
        let start = Instant::now();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.draw(rng)?);
        }
        Ok((out, SamplerReport::exact(count, start.elapsed().as_millis() as u64)))
    }
}

/// Shapes in the box, ordered by the reversed tuple (last part varies
/// slowest, first part fastest).
fn box_shapes_colex(n: usize, m: i64) -> Vec<Vec<i64>> {
    // rev holds (part n, ..., part 1), weakly increasing
    let mut shapes = Vec::new();
    let mut rev = vec![0i64; n];
    loop {
        shapes.push(rev.iter().rev().cloned().collect());
        // successor: bump the last coordinate still below the ceiling,
        // reset everything after it to the new value
        match (0..n).rev().find(|&j| rev[j] < m) {
            Some(j) => {
                rev[j] += 1;
                let floor = rev[j];
                for v in rev[j + 1..].iter_mut() {
                    *v = floor;
                }
            }
            None => return shapes,
        }
    }
}

/// One exact free-boundary draw. Builds the top-row table each call;
/// use [`ExactFreeSampler`] directly for repeated draws.
pub fn exact_sample_free(n: usize, m: i64, rng: &mut RngStream) -> Result<GTPattern> {
    ExactFreeSampler::new(n, m)?.draw(rng)
}

/// One exact draw from the uniform law on hexagon tilings: the top row
/// is pinned, so no table is needed and no size cap applies.
pub fn exact_sample_hex(n: usize, m: i64, rng: &mut RngStream) -> Result<GTPattern> {
    if n == 0 || m < 0 {
        return Err(invalid("need n >= 1 and m >= 0"));
    }
    let mut top = vec![m; n];
    top.extend(std::iter::repeat(0).take(n));
    let rows = descend(top, rng)?;
    GTPattern::new(rows, m)
}

pub fn exact_sample_hex_many(
    n: usize,
    m: i64,
    count: usize,
    rng: &mut RngStream,
) -> Result<(Vec<GTPattern>, SamplerReport)> {
    let start = Instant::now();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(exact_sample_hex(n, m, rng)?);
    }
    Ok((out, SamplerReport::exact(count, start.elapsed().as_millis() as u64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mcmc,
}

/// Run summary attached to every batch of samples. The mixing diagnostic
/// is present for chain runs only: an independent companion chain is run
/// on a derived stream and the two means of the row-1 position are
/// compared against their combined batch-means standard error.
#[derive(Clone, Debug, Serialize)]
pub struct SamplerReport {
    pub method: Method,
    pub sample_count: usize,
    pub burn_in_sweeps: usize,
    pub thin: usize,
    pub update_count: u64,
    pub wall_ms: u64,
    pub diagnostic: Option<ChainDiagnostic>,
}

impl SamplerReport {
    fn exact(sample_count: usize, wall_ms: u64) -> Self {
        SamplerReport {
            method: Method::Exact,
            sample_count,
            burn_in_sweeps: 0,
            thin: 1,
            update_count: 0,
            wall_ms,
            diagnostic: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainDiagnostic {
    /// Absolute difference of the two chains' mean row-1 positions.
    pub mean_gap_y1: f64,
    /// Combined batch-means standard error of that difference.
    pub gap_stderr: f64,
}

impl ChainDiagnostic {
    /// Agreement within two standard errors. A frozen chain reports a
    /// zero gap against a zero error and still counts as healthy.
    pub fn healthy(&self) -> bool {
        self.mean_gap_y1 <= 2.0 * self.gap_stderr
    }
}

/// One chain state: triangular entry array plus the site visit order.
struct Chain {
    rows: Vec<Vec<i64>>,
    sites: Vec<(usize, usize)>,
    m: i64,
}

impl Chain {
    fn cold(n: usize, m: i64) -> Chain {
        let rows = (1..=n).map(|k| vec![0i64; k]).collect();
        let sites = (0..n).flat_map(|rk| (0..=rk).map(move |i| (rk, i))).collect();
        Chain { rows, sites, m }
    }

    /// Minimal pattern under a pinned top row (m^n, 0^n): row k is
    /// (m^(k-n), 0^n) above the midline and zero below it. The top row
    /// is excluded from the site list, so it never moves.
    fn cold_hex(n: usize, m: i64) -> Chain {
        let depth = 2 * n;
        let rows = (1..=depth)
            .map(|k| (0..k).map(|i| if i + n < k { m } else { 0 }).collect())
            .collect();
        let sites = (0..depth - 1)
            .flat_map(|rk| (0..=rk).map(move |i| (rk, i)))
            .collect();
        Chain { rows, sites, m }
    }

    /// Tightest interval the entry may occupy given its neighbours. The
    /// top row has no row above it, so only the box ceiling binds there.
    fn bounds(&self, rk: usize, i: usize) -> (i64, i64) {
        let mut lo = 0;
        let mut hi = self.m;
        if rk > 0 {
            let below = &self.rows[rk - 1];
            if i < rk {
                lo = lo.max(below[i]);
            }
            if i >= 1 {
                hi = hi.min(below[i - 1]);
            }
        }
        if rk + 1 < self.rows.len() {
            let above = &self.rows[rk + 1];
            lo = lo.max(above[i + 1]);
            hi = hi.min(above[i]);
        }
        (lo, hi)
    }

    /// One sweep: every site once, in fresh uniformly random order.
    /// Single-point intervals still consume a draw and count as updates.
    fn sweep(&mut self, rng: &mut RngStream) -> u64 {
        self.sites.shuffle(rng);
        for idx in 0..self.sites.len() {
            let (rk, i) = self.sites[idx];
            let (lo, hi) = self.bounds(rk, i);
            debug_assert!(lo <= hi);
            self.rows[rk][i] = rng.gen_range(lo..=hi);
        }
        self.sites.len() as u64
    }

    fn y1(&self) -> f64 {
        self.rows[0][0] as f64
    }
}

/// Burn in, then sweep and emit, then repeat the schedule on a companion
/// chain (positions only) for the mixing diagnostic. Only the main
/// chain's site visits enter `update_count`.
fn run_heat_bath(
    mut chain: Chain,
    mut other: Chain,
    m: i64,
    rng: &mut RngStream,
    sweeps: usize,
    burn_in: usize,
    thin: usize,
    visit: &mut dyn FnMut(GTPattern) -> Result<()>,
) -> Result<SamplerReport> {
    let start = Instant::now();
    let mut companion_rng = rng.companion();
    let mut updates = 0u64;
    let mut emitted = 0usize;
    let mut y1_series = Vec::new();
    for _ in 0..burn_in {
        updates += chain.sweep(rng);
    }
    for s in 1..=sweeps {
        updates += chain.sweep(rng);
        if s % thin == 0 {
            y1_series.push(chain.y1());
            emitted += 1;
            visit(GTPattern::new(chain.rows.clone(), m)?)?;
        }
    }

    let mut other_y1 = Vec::new();
    for _ in 0..burn_in {
        other.sweep(&mut companion_rng);
    }
    for s in 1..=sweeps {
        other.sweep(&mut companion_rng);
        if s % thin == 0 {
            other_y1.push(other.y1());
        }
    }

    let diagnostic = match (
        stats::batch_means_stderr(&y1_series),
        stats::batch_means_stderr(&other_y1),
    ) {
        (Some(se_a), Some(se_b)) => Some(ChainDiagnostic {
            mean_gap_y1: (stats::mean(&y1_series) - stats::mean(&other_y1)).abs(),
            gap_stderr: (se_a * se_a + se_b * se_b).sqrt(),
        }),
        _ => None,
    };
    Ok(SamplerReport {
        method: Method::Mcmc,
        sample_count: emitted,
        burn_in_sweeps: burn_in,
        thin,
        update_count: updates,
        wall_ms: start.elapsed().as_millis() as u64,
        diagnostic,
    })
}

/// Heat-bath chain for the uniform free-boundary law. Runs `burn_in`
/// sweeps (default 10 (n + m)^2), then `sweeps` more, emitting the state
/// after every `thin`-th sweep (default n). A companion chain on a
/// derived stream feeds the mixing diagnostic in the report.
pub fn mcmc_sample_free(
    n: usize,
    m: i64,
    rng: &mut RngStream,
    sweeps: usize,
    burn_in: Option<usize>,
    thin: Option<usize>,
) -> Result<(Vec<GTPattern>, SamplerReport)> {
    let mut samples = Vec::new();
    let report = mcmc_stream_free(n, m, rng, sweeps, burn_in, thin, &mut |p| {
        samples.push(p);
        Ok(())
    })?;
    Ok((samples, report))
}

/// Streaming form of the free-boundary chain: emitted patterns go to the
/// visitor instead of a vector, so long runs at large depth keep a flat
/// memory profile.
pub fn mcmc_stream_free(
    n: usize,
    m: i64,
    rng: &mut RngStream,
    sweeps: usize,
    burn_in: Option<usize>,
    thin: Option<usize>,
    visit: &mut dyn FnMut(GTPattern) -> Result<()>,
) -> Result<SamplerReport> {
    if n == 0 || m < 0 {
        return Err(invalid("need n >= 1 and m >= 0"));
    }
    if sweeps == 0 {
        return Err(invalid("sweep count must be positive"));
    }
    let thin = thin.unwrap_or(n);
    if thin == 0 {
        return Err(invalid("thinning interval must be positive"));
    }
    let burn_in = burn_in.unwrap_or_else(|| 10 * (n + m as usize).pow(2));
    run_heat_bath(Chain::cold(n, m), Chain::cold(n, m), m, rng, sweeps, burn_in, thin, visit)
}

/// Heat-bath chain for the uniform pinned-top law: depth-2n patterns
/// whose top row is frozen at (m^n, 0^n). Defaults scale with the
/// doubled depth (burn-in 10 (2n + m)^2 sweeps, thinning 2n); everything
/// else matches the free-boundary chain, including the companion-chain
/// diagnostic.
pub fn mcmc_sample_hex(
    n: usize,
    m: i64,
    rng: &mut RngStream,
    sweeps: usize,
    burn_in: Option<usize>,
    thin: Option<usize>,
) -> Result<(Vec<GTPattern>, SamplerReport)> {
    let mut samples = Vec::new();
    let report = mcmc_stream_hex(n, m, rng, sweeps, burn_in, thin, &mut |p| {
        samples.push(p);
        Ok(())
    })?;
    Ok((samples, report))
}

/// Streaming form of the pinned-top chain.
pub fn mcmc_stream_hex(
    n: usize,
    m: i64,
    rng: &mut RngStream,
    sweeps: usize,
    burn_in: Option<usize>,
    thin: Option<usize>,
    visit: &mut dyn FnMut(GTPattern) -> Result<()>,
) -> Result<SamplerReport> {
    if n == 0 || m < 0 {
        return Err(invalid("need n >= 1 and m >= 0"));
    }
    if sweeps == 0 {
        return Err(invalid("sweep count must be positive"));
    }
    let depth = 2 * n;
    let thin = thin.unwrap_or(depth);
    if thin == 0 {
        return Err(invalid("thinning interval must be positive"));
    }
    let burn_in = burn_in.unwrap_or_else(|| 10 * (depth + m as usize).pow(2));
    run_heat_bath(
        Chain::cold_hex(n, m),
        Chain::cold_hex(n, m),
        m,
        rng,
        sweeps,
        burn_in,
        thin,
        visit,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Fixed aspect ratio a = m/n: centre by m/2, divide by
    /// sqrt(n (a^2 + 2a) / 8).
    Standard,
    /// m growing faster than n: divisor m / sqrt(8 n).
    Tall,
    /// n growing faster than m: divisor sqrt(m) / 2.
    Wide,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Regime::Standard),
            "tall" => Ok(Regime::Tall),
            "wide" => Ok(Regime::Wide),
            other => Err(invalid(format!("unknown regime `{other}`"))),
        }
    }
}

/// Centre and scale lozenge positions for comparison against the
/// continuum laws. The divisors are the standard deviations of the
/// limiting Gaussian in each regime; the wide divisor sqrt(m)/2 is the
/// a -> 0 limit of the standard one and does not depend on n.
pub fn rescale_positions(
    pos: &PositionVector,
    n: usize,
    m: i64,
    regime: Regime,
) -> Result<Vec<f64>> {
    if n == 0 || m < 1 {
        return Err(invalid("rescaling needs n >= 1 and m >= 1"));
    }
    let nf = n as f64;
    let mf = m as f64;
    let divisor = match regime {
        Regime::Standard => {
            let a = mf / nf;
            (nf * (a * a + 2.0 * a) / 8.0).sqrt()
        }
        Regime::Tall => mf / (8.0 * nf).sqrt(),
        Regime::Wide => mf.sqrt() / 2.0,
    };
    Ok(pos
        .entries
        .iter()
        .map(|&y| (y as f64 - mf / 2.0) / divisor)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{chi_square_uniform_pvalue, total_variation};
    use crate::tiling::{count_free, enumerate_free, enumerate_hex, hex_top};
    use std::collections::BTreeMap;

    fn pattern_index(n: usize, m: i64) -> BTreeMap<String, usize> {
        enumerate_free(n, m)
            .unwrap()
            .map(|p| p.to_json())
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect()
    }

    #[test]
    fn table_is_colex_ordered_and_totals_match() {
        let s = ExactFreeSampler::new(2, 2).unwrap();
        assert_eq!(
            s.shapes,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![2, 0],
                vec![1, 1],
                vec![2, 1],
                vec![2, 2]
            ]
        );
        assert_eq!(*s.total(), count_free(2, 2).unwrap());
        assert_eq!(s.shape_count(), 6);
        let s = ExactFreeSampler::new(3, 2).unwrap();
        assert_eq!(*s.total(), count_free(3, 2).unwrap());
    }

    #[test]
    fn branching_weights_sum_to_the_dimension() {
        for n in 2..=3usize {
            for m in 0..=3i64 {
                for lam in box_shapes_colex(n, m) {
                    let total = schur_dim(&Signature::from_parts(&lam).unwrap(), n).unwrap();
                    let mut acc = Integer::new();
                    let mut seen = 0u64;
                    for mu in InterlaceWalk::new(&lam) {
                        acc += schur_dim(&Signature::from_parts(&mu).unwrap(), n - 1).unwrap();
                        seen += 1;
                    }
                    assert_eq!(acc, total, "shape {lam:?}");
                    let expect: i64 = (0..n - 1).map(|i| lam[i] - lam[i + 1] + 1).product();
                    assert_eq!(seen, expect as u64);
                }
            }
        }
    }

    #[test]
    fn exact_free_law_is_uniform_n1() {
        let mut rng = RngStream::new(11, 0);
        let sampler = ExactFreeSampler::new(1, 3).unwrap();
        let mut counts = [0u64; 4];
        for _ in 0..10_000 {
            let p = sampler.draw(&mut rng).unwrap();
            counts[p.rows()[0][0] as usize] += 1;
        }
        let p = chi_square_uniform_pvalue(&counts);
        assert!(p > 0.001, "p = {p}, counts {counts:?}");
    }

    #[test]
    fn exact_free_law_is_uniform_n2() {
        let index = pattern_index(2, 2);
        assert_eq!(index.len(), 10);
        let mut rng = RngStream::new(12, 0);
        let sampler = ExactFreeSampler::new(2, 2).unwrap();
        let mut counts = vec![0u64; index.len()];
        for _ in 0..100_000 {
            let p = sampler.draw(&mut rng).unwrap();
            counts[index[&p.to_json()]] += 1;
        }
        let p = chi_square_uniform_pvalue(&counts);
        assert!(p > 0.001, "p = {p}, counts {counts:?}");
    }

    #[test]
    fn exact_hex_law_is_uniform() {
        // depth 2 box, pinned top (2, 0): three tilings
        let mut rng = RngStream::new(13, 0);
        let mut counts = [0u64; 3];
        for _ in 0..10_000 {
            let p = exact_sample_hex(1, 2, &mut rng).unwrap();
            assert_eq!(p.rows()[1], vec![2, 0]);
            counts[p.rows()[0][0] as usize] += 1;
        }
        let pv = chi_square_uniform_pvalue(&counts);
        assert!(pv > 0.001, "p = {pv}, counts {counts:?}");

        // depth 4, pinned top (1, 1, 0, 0): six tilings
        let mut keys = BTreeMap::new();
        let mut rng = RngStream::new(14, 0);
        for _ in 0..10_000 {
            let p = exact_sample_hex(2, 1, &mut rng).unwrap();
            *keys.entry(p.to_json()).or_insert(0u64) += 1;
        }
        assert_eq!(keys.len(), 6);
        let counts: Vec<u64> = keys.values().cloned().collect();
        let pv = chi_square_uniform_pvalue(&counts);
        assert!(pv > 0.001, "p = {pv}, counts {counts:?}");
    }

    #[test]
    fn conditional_below_a_fixed_row_is_uniform() {
        // over draws whose second row hits a given value, the bottom entry
        // must be uniform on its interlacing interval
        let sampler = ExactFreeSampler::new(3, 2).unwrap();
        let mut rng = RngStream::new(15, 0);
        let mut under_20 = [0u64; 3];
        let mut under_10 = [0u64; 2];
        for _ in 0..10_000 {
            let p = sampler.draw(&mut rng).unwrap();
            let r2 = p.row(2).unwrap();
            let bottom = p.rows()[0][0];
            if r2 == [2, 0] {
                under_20[bottom as usize] += 1;
            } else if r2 == [1, 0] {
                under_10[bottom as usize] += 1;
            }
        }
        let p20 = chi_square_uniform_pvalue(&under_20);
        let p10 = chi_square_uniform_pvalue(&under_10);
        assert!(p20 > 0.001, "p = {p20}, counts {under_20:?}");
        assert!(p10 > 0.001, "p = {p10}, counts {under_10:?}");
    }

    #[test]
    fn zero_width_box_is_deterministic() {
        let mut rng = RngStream::new(16, 0);
        let p = exact_sample_free(3, 0, &mut rng).unwrap();
        assert_eq!(p.rows(), [vec![0], vec![0, 0], vec![0, 0, 0]]);
        let (samples, report) = mcmc_sample_free(2, 0, &mut rng, 10, Some(5), Some(1)).unwrap();
        assert_eq!(samples.len(), 10);
        for s in &samples {
            assert_eq!(s.rows(), [vec![0], vec![0, 0]]);
        }
        // every single-point interval still counts as an update
        assert_eq!(report.update_count, 15 * 3);
        let d = report.diagnostic.unwrap();
        assert_eq!(d.mean_gap_y1, 0.0);
        assert!(d.healthy());
    }

    #[test]
    fn draws_are_reproducible_across_streams() {
        let seq = |seed, stream| -> Vec<String> {
            let mut rng = RngStream::new(seed, stream);
            let sampler = ExactFreeSampler::new(2, 2).unwrap();
            (0..50).map(|_| sampler.draw(&mut rng).unwrap().to_json()).collect()
        };
        assert_eq!(seq(7, 3), seq(7, 3));
        assert_ne!(seq(7, 3), seq(7, 4));
        assert_ne!(seq(7, 3), seq(8, 3));

        let chain = |stream| {
            let mut rng = RngStream::new(21, stream);
            let (samples, report) =
                mcmc_sample_free(2, 2, &mut rng, 200, Some(50), Some(10)).unwrap();
            let json: Vec<String> = samples.iter().map(|p| p.to_json()).collect();
            (json, format!("{:?}", report.diagnostic))
        };
        assert_eq!(chain(0), chain(0));
        assert_ne!(chain(0).0, chain(1).0);
    }

    #[test]
    fn chain_matches_the_uniform_law() {
        let index = pattern_index(2, 2);
        let mut rng = RngStream::new(17, 0);
        let (samples, report) =
            mcmc_sample_free(2, 2, &mut rng, 1_000_000, Some(10_000), Some(10)).unwrap();
        assert_eq!(report.sample_count, 100_000);
        assert_eq!(report.burn_in_sweeps, 10_000);
        assert_eq!(report.update_count, 1_010_000 * 3);
        let mut counts = vec![0u64; index.len()];
        for s in &samples {
            counts[index[&s.to_json()]] += 1;
        }
        let probs = vec![1.0 / index.len() as f64; index.len()];
        let tv = total_variation(&counts, &probs);
        assert!(tv <= 0.02, "tv = {tv}, counts {counts:?}");
        let d = report.diagnostic.expect("chain runs carry the diagnostic");
        assert!(d.healthy(), "gap {} vs stderr {}", d.mean_gap_y1, d.gap_stderr);
    }

    #[test]
    fn hex_chain_matches_the_uniform_law() {
        let index: BTreeMap<String, usize> = enumerate_hex(2, 2)
            .unwrap()
            .map(|p| p.to_json())
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        assert_eq!(index.len(), 20);
        let mut rng = RngStream::new(23, 0);
        let (samples, report) =
            mcmc_sample_hex(2, 2, &mut rng, 500_000, None, Some(5)).unwrap();
        assert_eq!(report.sample_count, 100_000);
        assert_eq!(report.burn_in_sweeps, 10 * 36);
        let top = hex_top(2, 2).parts().unwrap();
        let mut counts = vec![0u64; index.len()];
        for s in &samples {
            assert_eq!(s.depth(), 4);
            assert_eq!(s.rows()[3], top, "top row must stay pinned");
            counts[index[&s.to_json()]] += 1;
        }
        let probs = vec![1.0 / index.len() as f64; index.len()];
        let tv = total_variation(&counts, &probs);
        assert!(tv <= 0.025, "tv = {tv}, counts {counts:?}");
        let d = report.diagnostic.expect("chain runs carry the diagnostic");
        assert!(d.healthy(), "gap {} vs stderr {}", d.mean_gap_y1, d.gap_stderr);
    }

    #[test]
    fn hex_chain_degenerate_and_reproducible() {
        let mut rng = RngStream::new(24, 0);
        let (samples, _) = mcmc_sample_hex(2, 0, &mut rng, 10, Some(3), Some(1)).unwrap();
        for s in &samples {
            assert_eq!(s.rows(), [vec![0], vec![0, 0], vec![0, 0, 0], vec![0, 0, 0, 0]]);
        }
        assert!(mcmc_sample_hex(0, 2, &mut rng, 10, None, None).is_err());

        let run = |stream| {
            let mut rng = RngStream::new(25, stream);
            let (samples, _) = mcmc_sample_hex(2, 3, &mut rng, 100, Some(20), Some(10)).unwrap();
            samples.iter().map(|p| p.to_json()).collect::<Vec<_>>()
        };
        assert_eq!(run(0), run(0));
        assert_ne!(run(0), run(1));
    }

    #[test]
    fn chain_is_uniform_on_a_single_column() {
        let mut rng = RngStream::new(18, 0);
        let (samples, _) = mcmc_sample_free(1, 5, &mut rng, 60_000, None, None).unwrap();
        let mut counts = [0u64; 6];
        for s in &samples {
            counts[s.rows()[0][0] as usize] += 1;
        }
        let p = chi_square_uniform_pvalue(&counts);
        assert!(p > 0.001, "p = {p}, counts {counts:?}");
    }

    #[test]
    fn chain_rejects_bad_arguments() {
        let mut rng = RngStream::new(19, 0);
        assert!(mcmc_sample_free(2, 2, &mut rng, 0, None, None).is_err());
        assert!(mcmc_sample_free(2, 2, &mut rng, 10, None, Some(0)).is_err());
        assert!(mcmc_sample_free(0, 2, &mut rng, 10, None, None).is_err());
        assert!(mcmc_sample_free(2, -1, &mut rng, 10, None, None).is_err());
    }

    #[test]
    fn exact_sampler_refuses_oversized_tables() {
        let err = ExactFreeSampler::new(30, 30).unwrap_err();
        match err {
            Error::CapExceeded(msg) => {
                assert!(msg.contains("Markov chain"), "{msg}");
                assert!(msg.contains("118264581564861424"), "{msg}");
            }
            other => panic!("expected a cap refusal, got {other:?}"),
        }
        // hexagon draws have no table, so depth alone is no obstacle
        let mut rng = RngStream::new(20, 0);
        assert!(exact_sample_hex(30, 2, &mut rng).is_ok());
    }

    #[test]
    fn exact_reports_have_no_diagnostic() {
        let sampler = ExactFreeSampler::new(2, 2).unwrap();
        let mut rng = RngStream::new(22, 0);
        let (samples, report) = sampler.sample_many(25, &mut rng).unwrap();
        assert_eq!(samples.len(), 25);
        assert_eq!(report.method, Method::Exact);
        assert_eq!(report.sample_count, 25);
        assert!(report.diagnostic.is_none());
        let (_, report) = exact_sample_hex_many(2, 1, 5, &mut rng).unwrap();
        assert_eq!(report.sample_count, 5);
        assert!(report.diagnostic.is_none());
    }

    #[test]
    fn rescaling_matches_each_regime() {
        let pos = PositionVector { k: 1, entries: vec![3] };
        // standard at a = 1: divisor sqrt(3 n / 8)
        let v = rescale_positions(&pos, 4, 4, Regime::Standard).unwrap();
        assert!((v[0] - 1.0 / (12.0f64 / 8.0).sqrt()).abs() < 1e-12);
        // tall: divisor m / sqrt(8 n)
        let v = rescale_positions(&pos, 2, 4, Regime::Tall).unwrap();
        assert!((v[0] - 1.0 / (4.0 / 4.0)).abs() < 1e-12);
        // wide: divisor sqrt(m) / 2, independent of n
        let v = rescale_positions(&pos, 2, 4, Regime::Wide).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
        let w = rescale_positions(&pos, 7, 4, Regime::Wide).unwrap();
        assert_eq!(v, w);
        assert!(rescale_positions(&pos, 2, 0, Regime::Standard).is_err());
        assert_eq!("tall".parse::<Regime>().unwrap(), Regime::Tall);
        assert!("sideways".parse::<Regime>().is_err());
    }

    #[test]
    fn tall_rescaling_approaches_standard_for_large_aspect() {
        let pos = PositionVector { k: 1, entries: vec![150] };
        let s = rescale_positions(&pos, 2, 200, Regime::Standard).unwrap()[0];
        let t = rescale_positions(&pos, 2, 200, Regime::Tall).unwrap()[0];
        assert!((s / t - 1.0).abs() < 0.02, "s = {s}, t = {t}");
    }

    #[test]
    fn rng_streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(5, 1);
        let mut b = RngStream::new(5, 1);
        let mut c = RngStream::new(5, 2);
        let va: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let vc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
        assert_eq!(a.seed(), 5);
        assert_eq!(a.stream(), 1);
    }

    #[test]
    fn uniform_below_covers_the_range() {
        let mut rng = RngStream::new(6, 0);
        let bound = Integer::from(5);
        let mut seen = [false; 5];
        for _ in 0..200 {
            let v = uniform_below(&mut rng, &bound);
            seen[v.to_usize().unwrap()] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
