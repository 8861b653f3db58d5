use std::collections::HashMap;
use std::io::Write;

use crate::error::Result;

use super::{validate_query, CiTester, Verdict};

/// Canonical form of a CI query: `x < y`, `cond` ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CiKey {
    pub x: usize,
    pub y: usize,
    pub cond: Vec<usize>,
}

impl CiKey {
    pub fn new(x: usize, y: usize, cond: &[usize]) -> Self {
        let mut cond = cond.to_vec();
        cond.sort_unstable();
        CiKey { x: x.min(y), y: x.max(y), cond }
    }
}

/// Unique-test counters, bucketed by conditioning-set size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CiStats {
    by_size: Vec<u64>,
    cache_hits: u64,
}

impl CiStats {
    /// Unique tests per conditioning-set size; index is `|z|`.
    pub fn by_size(&self) -> &[u64] {
        &self.by_size
    }

    pub fn total(&self) -> u64 {
        self.by_size.iter().sum()
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits
    }

    fn record_fresh(&mut self, size: usize) {
        if self.by_size.len() <= size {
            self.by_size.resize(size + 1, 0);
        }
        self.by_size[size] += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub x: usize,
    pub y: usize,
    pub cond: Vec<usize>,
    pub verdict: Verdict,
    pub fresh: bool,
}

/// Memoising, counting front-end over a [`CiTester`].
///
/// One instance per discovery run. The first evaluation of a canonical key
/// goes to the backend and bumps the `|z|` counter; repeats are served from
/// the cache and only bump the hit counter.
pub struct CachedTester<'a> {
    backend: &'a dyn CiTester,
    cache: HashMap<CiKey, Verdict>,
    stats: CiStats,
    audit: Option<Vec<AuditEntry>>,
}

impl<'a> CachedTester<'a> {
    pub fn new(backend: &'a dyn CiTester) -> Self {
        CachedTester { backend, cache: HashMap::new(), stats: CiStats::default(), audit: None }
    }

    /// Also keep every query, in issue order.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn num_vars(&self) -> usize {
        self.backend.num_vars()
    }

    pub fn test(&mut self, x: usize, y: usize, z: &[usize]) -> Result<Verdict> {
        validate_query(self.backend.num_vars(), x, y, z)?;
        let key = CiKey::new(x, y, z);
        let (verdict, fresh) = match self.cache.get(&key) {
            Some(&v) => {
                self.stats.cache_hits += 1;
                (v, false)
            }
            None => {
                let v = self.backend.test(key.x, key.y, &key.cond)?;
                self.stats.record_fresh(key.cond.len());
                self.cache.insert(key.clone(), v);
                (v, true)
            }
        };
        if let Some(log) = &mut self.audit {
            log.push(AuditEntry { x: key.x, y: key.y, cond: key.cond, verdict, fresh });
        }
        Ok(verdict)
    }

    pub fn stats(&self) -> &CiStats {
        &self.stats
    }

    pub fn audit(&self) -> Option<&[AuditEntry]> {
        self.audit.as_deref()
    }

    /// Writes the audit log as `x,y,cond_size,cond_set,verdict,source`,
    /// with `cond_set` space-separated.
    pub fn write_audit_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "cond_size", "cond_set", "verdict", "source"])?;
        for e in self.audit.iter().flatten() {
            let cond = e.cond.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            w.write_record([
                e.x.to_string(),
                e.y.to_string(),
                e.cond.len().to_string(),
                cond,
                e.verdict.as_str().to_string(),
                if e.fresh { "fresh" } else { "cached" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
