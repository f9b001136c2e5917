//! Exhaustive exact-integer verification of the lattice condition `C_N`.
//!
//! For `(U, V)` Gaussian integers in the bidisc `|U|, |V| ≤ N+1`, membership in
//! `E_N` is the test
//!
//! ```text
//! |U V̄² + N² V + N Ū²|² ≤ 18 (N+1)⁴
//! ```
//!
//! and the condition `C_N` asks `ι(U,V) < κ(U,V)` on every member, where
//!
//! ```text
//! ι = 10 N² |N Ū V + V̄ U² + U V²|²,   κ = (|U|⁴ + |V|⁴ + N⁴)².
//! ```
//!
//! No floating-point value enters the decision: membership and the inequality
//! are evaluated in checked integer arithmetic, and an overflow aborts the run
//! instead of wrapping. The ratio `ι/κ` is maximised by cross-multiplication;
//! only the reported `max_ratio` is a float.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A Gaussian integer `re + i·im`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// A lattice point `(U, V) ∈ Z[i]²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaussianPair {
    pub u: GaussianInt,
    pub v: GaussianInt,
}

impl GaussianPair {
    pub const fn new(u: GaussianInt, v: GaussianInt) -> Self {
        GaussianPair { u, v }
    }

    pub fn conj(self) -> Self {
        GaussianPair::new(self.u.conj(), self.v.conj())
    }
}

impl fmt::Display for GaussianPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("integer overflow while evaluating {pair} at N = {n}")]
    Overflow { n: u32, pair: GaussianPair },
    #[error("N must be at least 1")]
    BadN,
    #[error("invalid chunk {index}/{count}")]
    BadChunk { index: u32, count: u32 },
    #[error("cannot merge reports: {0}")]
    Merge(String),
}

// ---------------------------------------------------------------------------
// Constants of the reduction to lattice points.
// ---------------------------------------------------------------------------

fn rho_n(n: u32) -> f64 {
    1.0 + 1.0 / f64::from(n)
}

/// Upper bound `3√2 ρ_N²` for the Lipschitz constant of `F` on the bidisc of radius `ρ_N`.
pub fn cf_bound(n: u32) -> f64 {
    let r = rho_n(n);
    3.0 * std::f64::consts::SQRT_2 * r * r
}

/// Upper bound `6 ρ_N² (1 + 3ρ_N⁴)` for the Lipschitz constant of `G`.
///
/// The tighter `4√2 ρ_N² (1 + 3ρ_N⁴)` is also derivable (see
/// [`cg_bound_tight`]); the threshold N ≥ 54 is obtained with this larger one.
pub fn cg_bound(n: u32) -> f64 {
    let r2 = rho_n(n).powi(2);
    6.0 * r2 * (1.0 + 3.0 * r2 * r2)
}

pub fn cg_bound_tight(n: u32) -> f64 {
    let r2 = rho_n(n).powi(2);
    4.0 * std::f64::consts::SQRT_2 * r2 * (1.0 + 3.0 * r2 * r2)
}

/// Whether `1/(√10 N) ≤ 1/2 − C_G(N)/N`, i.e. whether `C_N` at this `N` implies
/// the continuous inequality on the unit bidisc.
pub fn threshold_holds(n: u32) -> bool {
    let nf = f64::from(n);
    1.0 / (10f64.sqrt() * nf) <= 0.5 - cg_bound(n) / nf
}

/// Smallest `N` for which [`threshold_holds`].
pub fn min_valid_n() -> u32 {
    (1..).find(|&n| threshold_holds(n)).expect("threshold eventually holds")
}

// ---------------------------------------------------------------------------
// Checked evaluation of the three quantities.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct Gi {
    re: i128,
    im: i128,
}

struct Checked {
    n: u32,
    pair: GaussianPair,
}

impl Checked {
    fn err(&self) -> ExactError {
        ExactError::Overflow {
            n: self.n,
            pair: self.pair,
        }
    }

    fn add(&self, a: i128, b: i128) -> Result<i128, ExactError> {
        a.checked_add(b).ok_or_else(|| self.err())
    }

    fn sub(&self, a: i128, b: i128) -> Result<i128, ExactError> {
        a.checked_sub(b).ok_or_else(|| self.err())
    }

    fn mul(&self, a: i128, b: i128) -> Result<i128, ExactError> {
        a.checked_mul(b).ok_or_else(|| self.err())
    }

    fn cmul(&self, a: Gi, b: Gi) -> Result<Gi, ExactError> {
        Ok(Gi {
            re: self.sub(self.mul(a.re, b.re)?, self.mul(a.im, b.im)?)?,
            im: self.add(self.mul(a.re, b.im)?, self.mul(a.im, b.re)?)?,
        })
    }

    fn cadd(&self, a: Gi, b: Gi) -> Result<Gi, ExactError> {
        Ok(Gi {
            re: self.add(a.re, b.re)?,
            im: self.add(a.im, b.im)?,
        })
    }

    fn cscale(&self, a: Gi, k: i128) -> Result<Gi, ExactError> {
        Ok(Gi {
            re: self.mul(a.re, k)?,
            im: self.mul(a.im, k)?,
        })
    }

    fn norm2(&self, a: Gi) -> Result<i128, ExactError> {
        self.add(self.mul(a.re, a.re)?, self.mul(a.im, a.im)?)
    }
}

fn gi(g: GaussianInt) -> Gi {
    Gi {
        re: i128::from(g.re),
        im: i128::from(g.im),
    }
}

fn gi_conj(g: GaussianInt) -> Gi {
    Gi {
        re: i128::from(g.re),
        im: -i128::from(g.im),
    }
}

/// `|U V̄² + N² V + N Ū²|²`.
pub fn membership_lhs(n: u32, q: GaussianPair) -> Result<i128, ExactError> {
    let c = Checked { n, pair: q };
    let nn = i128::from(n);
    let (u, v) = (gi(q.u), gi(q.v));
    let (ub, vb) = (gi_conj(q.u), gi_conj(q.v));
    let t1 = c.cmul(u, c.cmul(vb, vb)?)?;
    let t2 = c.cscale(v, c.mul(nn, nn)?)?;
    let t3 = c.cscale(c.cmul(ub, ub)?, nn)?;
    c.norm2(c.cadd(c.cadd(t1, t2)?, t3)?)
}

/// Membership of `q` in `E_N`.
pub fn e_n_member(n: u32, q: GaussianPair) -> Result<bool, ExactError> {
    let c = Checked { n, pair: q };
    let r = i128::from(n) + 1;
    let r2 = c.mul(r, r)?;
    if c.norm2(gi(q.u))? > r2 || c.norm2(gi(q.v))? > r2 {
        return Ok(false);
    }
    let bound = c.mul(18, c.mul(r2, r2)?)?;
    Ok(membership_lhs(n, q)? <= bound)
}

/// `ι(U, V) = 10 N² |N Ū V + V̄ U² + U V²|²`.
pub fn iota(n: u32, q: GaussianPair) -> Result<i128, ExactError> {
    let c = Checked { n, pair: q };
    let nn = i128::from(n);
    let (u, v) = (gi(q.u), gi(q.v));
    let (ub, vb) = (gi_conj(q.u), gi_conj(q.v));
    let t1 = c.cscale(c.cmul(ub, v)?, nn)?;
    let t2 = c.cmul(vb, c.cmul(u, u)?)?;
    let t3 = c.cmul(u, c.cmul(v, v)?)?;
    let inner = c.norm2(c.cadd(c.cadd(t1, t2)?, t3)?)?;
    c.mul(c.mul(10, c.mul(nn, nn)?)?, inner)
}

/// `κ(U, V) = (|U|⁴ + |V|⁴ + N⁴)²`.
pub fn kappa(n: u32, q: GaussianPair) -> Result<i128, ExactError> {
    let c = Checked { n, pair: q };
    let nn = i128::from(n);
    let u2 = c.norm2(gi(q.u))?;
    let v2 = c.norm2(gi(q.v))?;
    let n2 = c.mul(nn, nn)?;
    let s = c.add(c.add(c.mul(u2, u2)?, c.mul(v2, v2)?)?, c.mul(n2, n2)?)?;
    c.mul(s, s)
}

// ---------------------------------------------------------------------------
// Report and reduction.
// ---------------------------------------------------------------------------

/// A member of `E_N` violating `ι < κ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub pair: GaussianPair,
    #[serde(with = "dec_str")]
    pub iota: i128,
    #[serde(with = "dec_str")]
    pub kappa: i128,
}

/// One contiguous slice of the U-rows, for runs split across machines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSpec {
    pub index: u32,
    pub count: u32,
}

/// Keeps at most this many counterexamples; `counterexample_count` has the total.
pub const MAX_COUNTEREXAMPLES: usize = 1000;

/// Exact statistics of one `C_N` run. Integers are serialised as decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: u32,
    /// `None` for a complete run, `Some` for a partial run over one chunk of rows.
    pub chunk: Option<ChunkSpec>,
    pub member_count: u64,
    #[serde(with = "dec_str")]
    pub max_iota: i128,
    #[serde(with = "dec_str")]
    pub max_kappa: i128,
    /// Minimum of `κ − ι` over members.
    #[serde(with = "dec_str")]
    pub min_gap: i128,
    /// `ι/κ` at `argmax` in double precision.
    pub max_ratio: f64,
    pub argmax: GaussianPair,
    #[serde(with = "dec_str")]
    pub argmax_iota: i128,
    #[serde(with = "dec_str")]
    pub argmax_kappa: i128,
    pub holds: bool,
    /// `holds` and `N ≥ min_valid_n()`; only then does the run certify the
    /// transversality inequality.
    pub certifying: bool,
    pub counterexample_count: u64,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_seconds: f64,
    pub worker_count: usize,
}

impl VerificationReport {
    /// A copy with the scheduling-dependent fields zeroed, for comparisons.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport {
            elapsed_seconds: 0.0,
            worker_count: 0,
            ..self.clone()
        }
    }
}

mod dec_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, Default)]
struct Acc {
    count: u64,
    max_iota: i128,
    max_kappa: i128,
    min_gap: Option<i128>,
    best: Option<(i128, i128, GaussianPair)>,
    cx: Vec<Counterexample>,
    cx_count: u64,
}

/// Compares `a.0/a.1` with `b.0/b.1` for nonnegative numerators and positive denominators.
fn cmp_ratio(a: (i128, i128), b: (i128, i128)) -> Ordering {
    match (a.0.checked_mul(b.1), b.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => {
            use num_bigint::BigInt;
            (BigInt::from(a.0) * BigInt::from(b.1)).cmp(&(BigInt::from(b.0) * BigInt::from(a.1)))
        }
    }
}

impl Acc {
    fn push(&mut self, pair: GaussianPair, iota: i128, kappa: i128, gap: i128) {
        self.count += 1;
        self.max_iota = self.max_iota.max(iota);
        self.max_kappa = self.max_kappa.max(kappa);
        self.min_gap = Some(self.min_gap.map_or(gap, |g| g.min(gap)));
        self.offer_best(iota, kappa, pair);
        if gap <= 0 {
            self.cx_count += 1;
            if self.cx.len() < MAX_COUNTEREXAMPLES {
                self.cx.push(Counterexample { pair, iota, kappa });
            }
        }
    }

    fn offer_best(&mut self, iota: i128, kappa: i128, pair: GaussianPair) {
        let better = match self.best {
            None => true,
            Some((bi, bk, bp)) => match cmp_ratio((iota, kappa), (bi, bk)) {
                Ordering::Greater => true,
                Ordering::Equal => pair < bp,
                Ordering::Less => false,
            },
        };
        if better {
            self.best = Some((iota, kappa, pair));
        }
    }

    /// Folds `other` into `self`; `other` covers rows that come after `self`'s.
    fn merge(mut self, other: Acc) -> Acc {
        self.count += other.count;
        self.max_iota = self.max_iota.max(other.max_iota);
        self.max_kappa = self.max_kappa.max(other.max_kappa);
        self.min_gap = match (self.min_gap, other.min_gap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let Some((i, k, p)) = other.best {
            self.offer_best(i, k, p);
        }
        self.cx_count += other.cx_count;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.cx.len());
        self.cx.extend(other.cx.into_iter().take(room));
        self
    }
}

/// Gaussian integers of the closed disc `|z| ≤ r`, grouped into rows of equal real part.
fn disc_rows(r: i64) -> Vec<Vec<GaussianInt>> {
    (-r..=r)
        .map(|re| {
            let h = isqrt(r * r - re * re);
            (-h..=h).map(|im| GaussianInt::new(re, im)).collect()
        })
        .collect()
}

fn isqrt(x: i64) -> i64 {
    let mut s = (x as f64).sqrt() as i64;
    while s * s > x {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= x {
        s += 1;
    }
    s
}

/// All Gaussian integers with `|z| ≤ N+1`, in row order.
pub fn disc_points(n: u32) -> Vec<GaussianInt> {
    disc_rows(i64::from(n) + 1).into_iter().flatten().collect()
}

/// Largest N for which the membership filter provably fits in `i64`:
/// every component of `U V̄² + N²V + NŪ²` is at most `3(N+1)³` in modulus, so
/// the squared norm is below `18 (N+1)⁶ < 2⁶³`.
const FAST_FILTER_MAX_N: u32 = 889;

struct VTable {
    points: Vec<GaussianInt>,
    // conj(V)² and N²·V per point, structure-of-arrays for the filter loop.
    vb2_re: Vec<i64>,
    vb2_im: Vec<i64>,
    n2v_re: Vec<i64>,
    n2v_im: Vec<i64>,
}

impl VTable {
    fn new(n: u32, points: Vec<GaussianInt>) -> Self {
        let n2 = i64::from(n) * i64::from(n);
        VTable {
            vb2_re: points.iter().map(|v| v.re * v.re - v.im * v.im).collect(),
            vb2_im: points.iter().map(|v| -2 * v.re * v.im).collect(),
            n2v_re: points.iter().map(|v| n2 * v.re).collect(),
            n2v_im: points.iter().map(|v| n2 * v.im).collect(),
            points,
        }
    }
}

const BLOCK: usize = 64;

/// Bit `j` of the result is set when `V = points[base + j]` passes the
/// `E_N` filter together with `U = (ur, ui)`.
#[inline]
fn filter_block(vt: &VTable, base: usize, ur: i64, ui: i64, cre: i64, cim: i64, bound: i64) -> u64 {
    let end = (base + BLOCK).min(vt.points.len());
    let wr = &vt.vb2_re[base..end];
    let wi = &vt.vb2_im[base..end];
    let nr = &vt.n2v_re[base..end];
    let ni = &vt.n2v_im[base..end];
    let mut mask = 0u64;
    for j in 0..wr.len() {
        let re = ur * wr[j] - ui * wi[j] + nr[j] + cre;
        let im = ur * wi[j] + ui * wr[j] + ni[j] + cim;
        mask |= u64::from(re * re + im * im <= bound) << j;
    }
    mask
}

fn scan_row(n: u32, row: &[GaussianInt], vt: &VTable) -> Result<Acc, ExactError> {
    let mut acc = Acc::default();
    let mut visit = |u: GaussianInt, v: GaussianInt| -> Result<(), ExactError> {
        let pair = GaussianPair::new(u, v);
        let i = iota(n, pair)?;
        let k = kappa(n, pair)?;
        let gap = k.checked_sub(i).ok_or(ExactError::Overflow { n, pair })?;
        acc.push(pair, i, k, gap);
        Ok(())
    };
    if n > FAST_FILTER_MAX_N {
        for &u in row {
            for &v in &vt.points {
                if e_n_member(n, GaussianPair::new(u, v))? {
                    visit(u, v)?;
                }
            }
        }
        return Ok(acc);
    }
    let r = i64::from(n) + 1;
    let nn = i64::from(n);
    let bound = 18 * r * r * r * r;
    for &u in row {
        // N·conj(U)²
        let cre = nn * (u.re * u.re - u.im * u.im);
        let cim = nn * (-2 * u.re * u.im);
        for base in (0..vt.points.len()).step_by(BLOCK) {
            let mut mask = filter_block(vt, base, u.re, u.im, cre, cim, bound);
            while mask != 0 {
                let j = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                visit(u, vt.points[base + j])?;
            }
        }
    }
    Ok(acc)
}

/// Runs the full `C_N` check on `worker_count` threads (0 = all available).
pub fn verify_cn(n: u32, worker_count: usize) -> Result<VerificationReport, ExactError> {
    verify_cn_chunk(n, worker_count, None)
}

/// Runs the `C_N` check over one chunk of U-rows (or all rows when `chunk` is `None`).
///
/// The report is independent of `worker_count`: per-row partial results are
/// gathered in row order and reduced with exact, associative operations.
pub fn verify_cn_chunk(
    n: u32,
    worker_count: usize,
    chunk: Option<ChunkSpec>,
) -> Result<VerificationReport, ExactError> {
    if n == 0 {
        return Err(ExactError::BadN);
    }
    let start = crate::clock::Stopwatch::start();
    let rows = disc_rows(i64::from(n) + 1);
    let selected: &[Vec<GaussianInt>] = match chunk {
        None => &rows,
        Some(c) => {
            if c.count == 0 || c.index >= c.count {
                return Err(ExactError::BadChunk {
                    index: c.index,
                    count: c.count,
                });
            }
            let total = rows.len();
            let lo = total * c.index as usize / c.count as usize;
            let hi = total * (c.index as usize + 1) / c.count as usize;
            &rows[lo..hi]
        }
    };
    let vt = VTable::new(n, disc_points(n));
    let partials = crate::par::with_threads(worker_count, || {
        crate::par::map(selected, |row| scan_row(n, row, &vt))
    });
    let mut acc = Acc::default();
    for p in partials {
        acc = acc.merge(p?);
    }
    let mut report = finish(n, chunk, acc);
    report.elapsed_seconds = start.seconds();
    report.worker_count = crate::par::effective_threads(worker_count);
    Ok(report)
}

fn finish(n: u32, chunk: Option<ChunkSpec>, acc: Acc) -> VerificationReport {
    let (bi, bk, bp) = acc.best.unwrap_or((
        0,
        1,
        GaussianPair::new(GaussianInt::new(0, 0), GaussianInt::new(0, 0)),
    ));
    let min_gap = acc.min_gap.unwrap_or(0);
    // Chunks may legitimately contain no member; only complete runs decide.
    let holds = acc.cx_count == 0 && (acc.count == 0 || min_gap > 0);
    VerificationReport {
        n,
        chunk,
        member_count: acc.count,
        max_iota: acc.max_iota,
        max_kappa: acc.max_kappa,
        min_gap,
        max_ratio: bi as f64 / bk as f64,
        argmax: bp,
        argmax_iota: bi,
        argmax_kappa: bk,
        holds,
        certifying: holds && chunk.is_none() && n >= min_valid_n(),
        counterexample_count: acc.cx_count,
        counterexamples: acc.cx,
        elapsed_seconds: 0.0,
        worker_count: 0,
    }
}

/// Combines the partial reports of a split run back into the complete report.
///
/// Every chunk `0..count` of the same `N` must be present exactly once.
pub fn merge_reports(parts: &[VerificationReport]) -> Result<VerificationReport, ExactError> {
    let first = parts
        .first()
        .ok_or_else(|| ExactError::Merge("no reports given".into()))?;
    let n = first.n;
    let count = first
        .chunk
        .map(|c| c.count)
        .ok_or_else(|| ExactError::Merge("report is not a chunk".into()))?;
    let mut ordered: Vec<Option<&VerificationReport>> = vec![None; count as usize];
    for p in parts {
        let c = p
            .chunk
            .ok_or_else(|| ExactError::Merge("report is not a chunk".into()))?;
        if p.n != n || c.count != count || c.index >= count {
            return Err(ExactError::Merge(format!(
                "chunk {}/{} of N = {} does not belong to a {count}-way split of N = {n}",
                c.index, c.count, p.n
            )));
        }
        if ordered[c.index as usize].replace(p).is_some() {
            return Err(ExactError::Merge(format!("chunk {} given twice", c.index)));
        }
    }
    let mut acc = Acc::default();
    let mut elapsed = 0.0;
    let mut workers = 0;
    for (i, p) in ordered.into_iter().enumerate() {
        let p = p.ok_or_else(|| ExactError::Merge(format!("chunk {i} missing")))?;
        elapsed += p.elapsed_seconds;
        workers = workers.max(p.worker_count);
        let part = Acc {
            count: p.member_count,
            max_iota: p.max_iota,
            max_kappa: p.max_kappa,
            min_gap: (p.member_count > 0).then_some(p.min_gap),
            best: (p.member_count > 0).then_some((p.argmax_iota, p.argmax_kappa, p.argmax)),
            cx: p.counterexamples.clone(),
            cx_count: p.counterexample_count,
        };
        acc = acc.merge(part);
    }
    let mut report = finish(n, None, acc);
    report.elapsed_seconds = elapsed;
    report.worker_count = workers;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn pair(a: i64, b: i64, c: i64, d: i64) -> GaussianPair {
        GaussianPair::new(GaussianInt::new(a, b), GaussianInt::new(c, d))
    }

    /// Schoolbook big-integer evaluation, independent of the checked i128 path.
    fn naive(n: u32, q: GaussianPair) -> (bool, BigInt, BigInt) {
        let big = |x: i64| BigInt::from(x);
        let cm = |a: &(BigInt, BigInt), b: &(BigInt, BigInt)| {
            (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
        };
        let ca = |a: &(BigInt, BigInt), b: &(BigInt, BigInt)| (&a.0 + &b.0, &a.1 + &b.1);
        let nrm = |a: &(BigInt, BigInt)| &a.0 * &a.0 + &a.1 * &a.1;
        let nn = (big(i64::from(n)), big(0));
        let u = (big(q.u.re), big(q.u.im));
        let v = (big(q.v.re), big(q.v.im));
        let ub = (big(q.u.re), -big(q.u.im));
        let vb = (big(q.v.re), -big(q.v.im));
        let r = big(i64::from(n) + 1);
        let r2 = &r * &r;
        let lhs = nrm(&ca(&ca(&cm(&u, &cm(&vb, &vb)), &cm(&cm(&nn, &nn), &v)), &cm(&nn, &cm(&ub, &ub))));
        let member = nrm(&u) <= r2 && nrm(&v) <= r2 && lhs <= big(18) * &r2 * &r2;
        let inner = nrm(&ca(&ca(&cm(&nn, &cm(&ub, &v)), &cm(&vb, &cm(&u, &u))), &cm(&u, &cm(&v, &v))));
        let n2 = &nn.0 * &nn.0;
        let io = big(10) * &n2 * inner;
        let s = nrm(&u) * nrm(&u) + nrm(&v) * nrm(&v) + &n2 * &n2;
        (member, io, &s * &s)
    }

    #[test]
    fn bounds() {
        let limit = 3.0 * std::f64::consts::SQRT_2;
        assert!((cf_bound(1_000_000) - limit).abs() < 1e-5);
        assert!((cf_bound(1) - 4.0 * limit).abs() < 1e-12);
        for n in [1u32, 7, 54, 145, 1000] {
            let lhs = (f64::from(n).powi(2) * cf_bound(n)).powi(2);
            let rhs = 18.0 * (f64::from(n) + 1.0).powi(4);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
        assert!((cg_bound(54) - 26.32).abs() < 0.005);
        assert!((cg_bound(10_000_000) - 24.0).abs() < 1e-4);
        for n in 1..10_000 {
            assert!(cg_bound(n + 1) < cg_bound(n));
            assert!(cg_bound_tight(n) < cg_bound(n));
        }
    }

    #[test]
    fn threshold_is_54() {
        assert_eq!(min_valid_n(), 54);
        assert!(!threshold_holds(53));
        assert!(threshold_holds(54));
        assert!(threshold_holds(1000));
    }

    #[test]
    fn membership_examples() {
        let zero = pair(0, 0, 0, 0);
        for n in [1, 10, 145, 150] {
            assert!(e_n_member(n, zero).unwrap());
            assert_eq!(iota(n, zero).unwrap(), 0);
            assert_eq!(kappa(n, zero).unwrap(), i128::from(n).pow(8));
        }
        let far = pair(145, 0, 0, 0);
        assert_eq!(membership_lhs(145, far).unwrap(), 145i128.pow(6));
        assert!(!e_n_member(145, far).unwrap());
        assert!(!e_n_member(10, pair(12, 0, 0, 0)).unwrap());
    }

    #[test]
    fn overflow_is_reported_not_wrapped() {
        let huge = pair(1 << 40, 1 << 40, 1 << 40, 0);
        assert!(matches!(iota(1 << 20, huge), Err(ExactError::Overflow { .. })));
        assert!(matches!(kappa(1, huge), Err(ExactError::Overflow { .. })));
    }

    #[test]
    fn small_run_agrees_with_naive_enumeration() {
        let n = 12;
        let report = verify_cn(n, 1).unwrap();
        let pts = disc_points(n);
        let mut count = 0u64;
        let mut max_i = BigInt::from(0);
        let mut min_gap: Option<BigInt> = None;
        for &u in &pts {
            for &v in &pts {
                let (m, i, k) = naive(n, GaussianPair::new(u, v));
                if m {
                    count += 1;
                    let g = &k - &i;
                    min_gap = Some(min_gap.map_or(g.clone(), |x: BigInt| x.min(g)));
                    max_i = max_i.max(i);
                }
            }
        }
        assert_eq!(report.member_count, count);
        assert_eq!(BigInt::from(report.max_iota), max_i);
        assert_eq!(BigInt::from(report.min_gap), min_gap.unwrap());
        assert!(!report.certifying);
    }

    #[test]
    fn small_n_has_counterexamples() {
        let report = verify_cn(2, 1).unwrap();
        assert_eq!(report.holds, report.counterexamples.is_empty());
        assert_eq!(report.holds, report.min_gap > 0);
        assert_eq!(report.holds, report.max_ratio < 1.0);
    }

    #[test]
    fn conjugation_symmetry_exhaustive_n20() {
        let n = 20;
        let pts = disc_points(n);
        for &u in &pts {
            for &v in &pts {
                let q = GaussianPair::new(u, v);
                let qc = q.conj();
                let m = e_n_member(n, q).unwrap();
                assert_eq!(m, e_n_member(n, qc).unwrap());
                if m {
                    assert_eq!(iota(n, q).unwrap(), iota(n, qc).unwrap());
                    assert_eq!(kappa(n, q).unwrap(), kappa(n, qc).unwrap());
                }
            }
        }
    }

    #[test]
    fn chunks_merge_to_full_run() {
        let n = 30;
        let full = verify_cn(n, 2).unwrap();
        let parts: Vec<_> = (0..5)
            .map(|i| verify_cn_chunk(n, 1, Some(ChunkSpec { index: i, count: 5 })).unwrap())
            .collect();
        let merged = merge_reports(&parts).unwrap();
        assert_eq!(merged.without_timing(), full.without_timing());
        assert!(merge_reports(&parts[1..]).is_err());
        let mut dup = parts.clone();
        dup[0] = parts[1].clone();
        assert!(merge_reports(&dup).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let r = verify_cn(8, 1).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(text.contains(&format!("\"max_kappa\":\"{}\"", r.max_kappa)));
    }

    proptest! {
        #[test]
        fn fast_and_naive_agree(a in -200i64..200, b in -200i64..200, c in -200i64..200, d in -200i64..200, n in 1u32..200) {
            let q = pair(a, b, c, d);
            let (m, i, k) = naive(n, q);
            prop_assert_eq!(e_n_member(n, q).unwrap(), m);
            prop_assert_eq!(BigInt::from(iota(n, q).unwrap()), i);
            prop_assert_eq!(BigInt::from(kappa(n, q).unwrap()), k);
        }

        #[test]
        fn conjugation_invariance(a in -150i64..150, b in -150i64..150, c in -150i64..150, d in -150i64..150) {
            let q = pair(a, b, c, d);
            prop_assert_eq!(e_n_member(145, q).unwrap(), e_n_member(145, q.conj()).unwrap());
            prop_assert_eq!(iota(145, q).unwrap(), iota(145, q.conj()).unwrap());
            prop_assert_eq!(kappa(145, q).unwrap(), kappa(145, q.conj()).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn holds_iff_ratio_below_one(n in 1u32..80) {
            let r = verify_cn(n, 1).unwrap();
            prop_assert_eq!(r.holds, r.max_ratio < 1.0);
            prop_assert_eq!(r.holds, r.counterexample_count == 0);
        }
    }
}
