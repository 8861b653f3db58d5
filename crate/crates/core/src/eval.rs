//! Scoring learned graphs and comparing distributions of CI-test counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MixedGraph, NodeId};

/// Endpoint-level disagreement between a learned PAG and the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub struct StructuralErrors {
    pub extra_edges: usize,
    pub missing_edges: usize,
    /// Endpoints with different marks, counted only on edges both graphs share.
    pub wrong_marks: usize,
}

impl StructuralErrors {
    pub fn is_zero(&self) -> bool {
        *self == StructuralErrors::default()
    }
}

pub fn structural_errors(learned: &MixedGraph, truth: &MixedGraph) -> Result<StructuralErrors> {
    let n = learned.node_count();
    if n != truth.node_count() {
        return Err(Error::NodeCountMismatch(n, truth.node_count()));
    }
    let mut out = StructuralErrors::default();
    for a in 0..n {
        for b in a + 1..n {
            match (learned.is_adjacent(a, b), truth.is_adjacent(a, b)) {
                (true, false) => out.extra_edges += 1,
                (false, true) => out.missing_edges += 1,
                (true, true) => {
                    let ends: [(NodeId, NodeId); 2] = [(a, b), (b, a)];
                    out.wrong_marks += ends.iter().filter(|&&(u, v)| learned.mark(u, v) != truth.mark(u, v)).count();
                }
                (false, false) => {}
            }
        }
    }
    Ok(out)
}

/// Empirical cumulative distribution function of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// Fails on an empty sample or on NaN values.
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if sample.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidQuery("sample contains NaN".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    pub fn from_counts(sample: &[usize]) -> Result<Self> {
        Ecdf::new(&sample.iter().map(|&c| c as f64).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `F(t)`: fraction of the sample `≤ t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= t) as f64 / self.sorted.len() as f64
    }

    /// Smallest sample value `t` with `F(t) ≥ q`, for `q ∈ (0, 1]`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidQuery(format!("quantile level {q} outside (0, 1]")));
        }
        let len = self.sorted.len();
        // F(sorted[i]) ≥ (i + 1) / len, with equality at the last copy of a value.
        let mut k = (q * len as f64).ceil() as usize;
        // Guard against q·len landing a hair above an integer.
        if k > 1 && ((k - 1) as f64) / len as f64 >= q {
            k -= 1;
        }
        Ok(self.sorted[k.clamp(1, len) - 1])
    }

    /// Step points `(t, F(t))` at each distinct sample value.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let len = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / len;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Whether the p-value is the exact permutation probability.
    pub exact: bool,
}

/// Largest `m·n` for which the p-value is computed exactly.
pub const KS_EXACT_LIMIT: usize = 4_000_000;

/// Two-sample Kolmogorov–Smirnov test.
///
/// The p-value is the probability, over all equally likely splits of the
/// pooled sample into groups of sizes `m` and `n`, of a statistic at least
/// as large as the observed one. It is computed exactly by a lattice-path
/// recursion (ties handled) when `m·n ≤ KS_EXACT_LIMIT` and from the
/// asymptotic Kolmogorov distribution with effective size `m·n/(m+n)`
/// otherwise.
pub fn ks_2sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let ea = Ecdf::new(a)?;
    let eb = Ecdf::new(b)?;
    let (m, n) = (a.len(), b.len());
    let pooled = merge_groups(ea.sorted(), eb.sorted());
    // Statistic in integer units of 1/(m·n): |i·n − j·m|.
    let d_num = pooled.iter().map(|&(i, j)| (i * n).abs_diff(j * m)).max().unwrap_or(0);
    let statistic = d_num as f64 / (m * n) as f64;
    if d_num == 0 {
        return Ok(KsResult { statistic: 0.0, p_value: 1.0, exact: true });
    }
    if m.saturating_mul(n) <= KS_EXACT_LIMIT {
        let boundaries = tie_boundaries(ea.sorted(), eb.sorted());
        let p = exact_tail(m, n, d_num, &boundaries);
        Ok(KsResult { statistic, p_value: p.clamp(0.0, 1.0), exact: true })
    } else {
        let en = (m * n) as f64 / (m + n) as f64;
        Ok(KsResult { statistic, p_value: kolmogorov_sf(en.sqrt() * statistic), exact: false })
    }
}

/// Cumulative counts `(i, j)` after each distinct pooled value.
fn merge_groups(a: &[f64], b: &[f64]) -> Vec<(usize, usize)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == t {
            i += 1;
        }
        while j < b.len() && b[j] == t {
            j += 1;
        }
        out.push((i, j));
    }
    out
}

/// `boundary[k]` is true when the pooled sorted sample changes value after
/// its first `k` entries, so an ECDF difference is observable there.
fn tie_boundaries(a: &[f64], b: &[f64]) -> Vec<bool> {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let total = pooled.len();
    (0..=total).map(|k| k == 0 || k == total || pooled[k - 1] != pooled[k]).collect()
}

/// `P(max over boundaries |i·n − j·m| ≥ d_num)` for a uniformly random
/// monotone lattice path from `(0,0)` to `(m,n)`.
fn exact_tail(m: usize, n: usize, d_num: usize, boundary: &[bool]) -> f64 {
    // prob[i] = probability of being at (i, k − i) without having crossed.
    let mut prob = vec![0.0f64; m + 1];
    prob[0] = 1.0;
    for k in 0..m + n {
        let mut next = vec![0.0f64; m + 1];
        let remaining = (m + n - k) as f64;
        for i in 0..=m.min(k) {
            let p = prob[i];
            if p == 0.0 {
                continue;
            }
            let j = k - i;
            if j > n {
                continue;
            }
            if i < m {
                next[i + 1] += p * (m - i) as f64 / remaining;
            }
            if j < n {
                next[i] += p * (n - j) as f64 / remaining;
            }
        }
        if boundary[k + 1] {
            for (i, p) in next.iter_mut().enumerate() {
                if let Some(j) = (k + 1).checked_sub(i) {
                    if j <= n && (i * n).abs_diff(j * m) >= d_num {
                        *p = 0.0;
                    }
                }
            }
        }
        prob = next;
    }
    1.0 - prob[m]
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges too slowly here; Q is 1 to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
