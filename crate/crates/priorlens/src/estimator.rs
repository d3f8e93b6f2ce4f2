//! Turns sampling campaigns into empirical objects: T-histograms, pattern
//! frequency tables, rank curves, Zipf fits with the N_O extrapolation,
//! Pearson chi-square tests, moments and mean entropy, and sub-hypercube
//! marginals.

use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::hypercube::{binary_entropy, OutputPattern, SubsetMask};

/// Histogram of T-values over [0, m].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct THistogram {
    counts: Vec<u64>,
    samples: u64,
}

impl THistogram {
    /// Empty histogram for patterns of length m (bins 0..=m).
    pub fn new(m: usize) -> THistogram {
        THistogram { counts: vec![0; m + 1], samples: 0 }
    }

    /// Builds a histogram directly from counts (bin i = count of t = i).
    pub fn from_counts(counts: Vec<u64>) -> Result<THistogram> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        let samples = counts.iter().sum();
        Ok(THistogram { counts, samples })
    }

    /// Pattern length m this histogram covers.
    pub fn m(&self) -> usize {
        self.counts.len() - 1
    }

    /// Count at a given t.
    pub fn count(&self, t: usize) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    /// All counts, indexed by t.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total recorded draws.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Records one observation.
    pub fn record(&mut self, t: u64) {
        self.counts[t as usize] += 1;
        self.samples += 1;
    }

    /// Adds another histogram of the same shape into this one.
    pub fn merge(&mut self, other: &THistogram) {
        assert_eq!(self.counts.len(), other.counts.len(), "histogram shapes differ");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.samples += other.samples;
    }

    /// Empirical probability of t.
    pub fn probability(&self, t: usize) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.count(t) as f64 / self.samples as f64
    }
}

/// Map from output pattern to observed count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreqTable {
    counts: HashMap<OutputPattern, u64>,
    samples: u64,
}

impl FreqTable {
    /// Empty table.
    pub fn new() -> FreqTable {
        FreqTable::default()
    }

    /// Records one observation of a pattern.
    pub fn record(&mut self, p: OutputPattern) {
        *self.counts.entry(p).or_insert(0) += 1;
        self.samples += 1;
    }

    /// Adds another table into this one.
    pub fn merge(&mut self, other: &FreqTable) {
        for (p, c) in &other.counts {
            *self.counts.entry(p.clone()).or_insert(0) += c;
        }
        self.samples += other.samples;
    }

    /// Observed count of one pattern.
    pub fn count(&self, p: &OutputPattern) -> u64 {
        self.counts.get(p).copied().unwrap_or(0)
    }

    /// Number of distinct observed patterns.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Total recorded draws.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Iterates over (pattern, count) pairs in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (&OutputPattern, u64)> {
        self.counts.iter().map(|(p, &c)| (p, c))
    }
}

/// Pearson chi-square test of a T-histogram against the uniform law
/// 2^-n over the support [0, 2^n - 1]; returns (statistic, p-value) with
/// 2^n - 1 degrees of freedom.
///
/// # Errors
/// Empty histogram, dimension mismatch with the histogram's m, or observed
/// mass outside the stated support (at t = 2^n), which no amount of
/// statistics can reconcile with the uniform law's zero there.
pub fn chi_square_uniformity(h: &THistogram, n: usize) -> Result<(f64, f64)> {
    if h.samples() == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    let bins = 1usize << n;
    if h.m() != bins {
        return Err(Error::InvalidArgument(format!(
            "histogram covers m={} but uniform support needs m=2^{n}",
            h.m()
        )));
    }
    if h.count(bins) > 0 {
        return Err(Error::Degenerate(format!(
            "{} observations at t=2^{n}, outside the uniform law's support",
            h.count(bins)
        )));
    }
    let expected = h.samples() as f64 / bins as f64;
    let stat: f64 = (0..bins)
        .map(|t| {
            let d = h.count(t) as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = (bins - 1) as f64;
    Ok((stat, chi_square_pvalue(stat, df)?))
}

/// Two-sample Pearson chi-square homogeneity test between histograms over a
/// shared support; returns (statistic, p-value). Bins empty in both samples
/// are dropped; degrees of freedom = used bins - 1.
///
/// # Errors
/// Shape mismatch or empty samples.
pub fn chi_square_homogeneity(a: &THistogram, b: &THistogram) -> Result<(f64, f64)> {
    if a.m() != b.m() {
        return Err(Error::InvalidArgument("histogram supports differ".into()));
    }
    if a.samples() == 0 || b.samples() == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    let na = a.samples() as f64;
    let nb = b.samples() as f64;
    let total = na + nb;
    let mut stat = 0.0;
    let mut used = 0usize;
    for t in 0..=a.m() {
        let oa = a.count(t) as f64;
        let ob = b.count(t) as f64;
        let row = oa + ob;
        if row == 0.0 {
            continue;
        }
        used += 1;
        let ea = row * na / total;
        let eb = row * nb / total;
        stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    if used < 2 {
        return Err(Error::Degenerate("all mass in a single shared bin".into()));
    }
    Ok((stat, chi_square_pvalue(stat, (used - 1) as f64)?))
}

fn chi_square_pvalue(stat: f64, df: f64) -> Result<f64> {
    let dist = ChiSquared::new(df)
        .map_err(|e| Error::InvalidArgument(format!("chi-square df {df}: {e}")))?;
    Ok(dist.sf(stat))
}

/// One retained entry of a rank curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    /// 1-based rank by descending probability.
    pub rank: u64,
    /// Empirical probability count/samples.
    pub probability: f64,
    /// Observed count.
    pub count: u64,
    /// The pattern itself (kept for CSV joins against complexity columns).
    pub pattern: OutputPattern,
}

/// Rank-probability curve of a frequency table after a count cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCurve {
    entries: Vec<RankEntry>,
    cutoff: u64,
    samples: u64,
}

impl RankCurve {
    /// Builds a curve from explicit (rank, probability) pairs; for feeding
    /// synthetic data into [`zipf_fit`]. Ranks must be positive and strictly
    /// increasing, probabilities positive and non-increasing.
    pub fn from_points(points: &[(u64, f64)]) -> Result<RankCurve> {
        let mut entries = Vec::with_capacity(points.len());
        let mut prev_rank = 0u64;
        let mut prev_p = f64::INFINITY;
        for &(rank, p) in points {
            if rank <= prev_rank {
                return Err(Error::InvalidArgument("ranks must increase strictly".into()));
            }
            if !(p > 0.0) || p > prev_p {
                return Err(Error::InvalidArgument(
                    "probabilities must be positive and non-increasing".into(),
                ));
            }
            entries.push(RankEntry {
                rank,
                probability: p,
                count: 0,
                pattern: OutputPattern::zeros(1),
            });
            prev_rank = rank;
            prev_p = p;
        }
        Ok(RankCurve { entries, cutoff: 0, samples: 0 })
    }

    /// Retained entries, rank ascending.
    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    /// The cutoff used (counts <= cutoff were dropped).
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Total samples of the underlying campaign (0 for synthetic curves).
    pub fn samples(&self) -> u64 {
        self.samples
    }
}

/// Ranks the patterns of a frequency table by descending count, dropping
/// counts <= cutoff (default 2 upstream). Ties are broken by the packed
/// pattern bytes ascending so the ordering is deterministic.
pub fn rank_curve(f: &FreqTable, cutoff: u64) -> RankCurve {
    let mut rows: Vec<(&OutputPattern, u64)> =
        f.iter().filter(|&(_, c)| c > cutoff).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.words().cmp(b.0.words())));
    let samples = f.samples();
    let entries = rows
        .into_iter()
        .enumerate()
        .map(|(i, (p, c))| RankEntry {
            rank: (i + 1) as u64,
            probability: c as f64 / samples as f64,
            count: c,
            pattern: p.clone(),
        })
        .collect();
    RankCurve { entries, cutoff, samples }
}

/// Power-law fit of a rank curve and the resulting N_O extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfFit {
    /// Slope of log10 p against log10 rank (negative for Zipf-like data).
    pub slope: f64,
    /// Intercept of the fit (log10 probability at rank 1).
    pub intercept: f64,
    /// Extrapolated total count of expressible functions; see [`zipf_fit`].
    pub n_o: f64,
    /// Sum of squared residuals of the least-squares fit.
    pub residual: f64,
}

/// Least-squares power-law fit on (log10 rank, log10 probability).
///
/// With the model p = b * rank^-a (a = -slope, b = 10^intercept), N_O is the
/// curve length at which the model normalizes: for a = 1 the discrete-sum
/// approximation gives p(r) = 1/(ln(N_O) r), so N_O = exp(1/b); otherwise the
/// continuous normalization `integral from 1 to N_O of b r^-a dr = 1` is
/// solved in closed form, N_O = (1 + (1-a)/b)^(1/(1-a)).
///
/// # Errors
/// Fewer than 10 retained ranks, or a fit too degenerate to normalize
/// (non-finite parameters, or a model whose integral never reaches 1).
pub fn zipf_fit(r: &RankCurve) -> Result<ZipfFit> {
    let entries = r.entries();
    if entries.len() < 10 {
        return Err(Error::Degenerate(format!(
            "zipf fit needs >= 10 retained ranks, got {}",
            entries.len()
        )));
    }
    let xs: Vec<f64> = entries.iter().map(|e| (e.rank as f64).log10()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.probability.log10()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::Degenerate("all ranks equal; no slope to fit".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    if !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::Degenerate("non-finite fit parameters".into()));
    }
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let d = y - (intercept + slope * x);
            d * d
        })
        .sum();
    let a = -slope;
    let b = 10f64.powf(intercept);
    let n_o = if (a - 1.0).abs() < 1e-9 {
        (1.0 / b).exp()
    } else {
        // (1 + (1-a)/b)^(1/(1-a)), via ln_1p for continuity as a -> 1.
        let x = (1.0 - a) / b;
        if x <= -1.0 {
            return Err(Error::Degenerate(
                "fitted model cannot normalize: integral never reaches 1".into(),
            ));
        }
        (x.ln_1p() / (1.0 - a)).exp()
    };
    if !n_o.is_finite() {
        return Err(Error::Degenerate("N_O extrapolation overflowed".into()));
    }
    Ok(ZipfFit { slope, intercept, n_o, residual })
}

/// q-th empirical moment of T: sum of t^q * count / samples.
///
/// # Errors
/// q = 0 or empty histogram.
pub fn t_moments(h: &THistogram, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidArgument("moment order must be >= 1".into()));
    }
    if h.samples() == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    Ok(h.counts()
        .iter()
        .enumerate()
        .map(|(t, &c)| (t as f64).powi(q as i32) * c as f64)
        .sum::<f64>()
        / h.samples() as f64)
}

/// Mean binary entropy of T/m under the histogram.
///
/// # Errors
/// Empty histogram.
pub fn mean_entropy(h: &THistogram) -> Result<f64> {
    if h.samples() == 0 {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    let m = h.m() as f64;
    Ok(h.counts()
        .iter()
        .enumerate()
        .map(|(t, &c)| binary_entropy(t as f64 / m) * c as f64)
        .sum::<f64>()
        / h.samples() as f64)
}

/// Empirical probability that the restriction of a sampled pattern to the
/// masked sub-hypercube has the given T-value. Patterns must live on a full
/// {0,1}^n cube.
///
/// # Errors
/// Empty table, pattern length not a power of two, or invalid mask.
pub fn subset_marginal(f: &FreqTable, mask: &SubsetMask, t: u64) -> Result<f64> {
    if f.samples() == 0 {
        return Err(Error::InvalidArgument("empty frequency table".into()));
    }
    let m = f
        .iter()
        .next()
        .map(|(p, _)| p.len())
        .ok_or_else(|| Error::InvalidArgument("empty frequency table".into()))?;
    if !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "patterns of length {m} do not cover a full hypercube"
        )));
    }
    let n = m.trailing_zeros() as usize;
    mask.validate(n)?;
    let mut hits = 0u64;
    for (p, c) in f.iter() {
        if p.len() != m {
            return Err(Error::InvalidArgument("mixed pattern lengths in table".into()));
        }
        if p.restrict(n, mask)?.t_value() == t {
            hits += c;
        }
    }
    Ok(hits as f64 / f.samples() as f64)
}
