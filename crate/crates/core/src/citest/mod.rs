//! Conditional-independence testing.
//!
//! Every algorithm queries independence through [`CachedTester`], which
//! canonicalises queries, evaluates each distinct one once and keeps
//! per-condition-size counts. Backends implement [`CiTester`]: the
//! d-separation oracle in [`crate::oracle`] and the Fisher-z test in
//! [`fisher`].

mod cache;
pub mod fisher;

pub use cache::{AuditEntry, CachedTester, CiKey, CiStats};
pub use fisher::{fisher_z_test, normal_quantile, partial_correlation, DataSet, FisherZ};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Independent,
    Dependent,
}

impl Verdict {
    pub fn is_independent(self) -> bool {
        self == Verdict::Independent
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Independent => "independent",
            Verdict::Dependent => "dependent",
        }
    }
}

/// A backend deciding `x ⊥ y | z` over variables `0..num_vars()`.
///
/// Implementations must be symmetric in `x` and `y`, insensitive to the
/// order of `z`, and deterministic.
pub trait CiTester: Sync {
    fn num_vars(&self) -> usize;

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<Verdict>;
}

impl<T: CiTester + ?Sized> CiTester for &T {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<Verdict> {
        (**self).test(x, y, z)
    }
}

/// Rejects out-of-range ids, `x == y`, endpoints inside `z` and repeated
/// members of `z`.
pub(crate) fn validate_query(p: usize, x: usize, y: usize, z: &[usize]) -> Result<()> {
    if x >= p || y >= p {
        return Err(Error::NodeOutOfRange { node: x.max(y), count: p });
    }
    if x == y {
        return Err(Error::InvalidQuery(format!("x == y == {x}")));
    }
    for (i, &v) in z.iter().enumerate() {
        if v >= p {
            return Err(Error::NodeOutOfRange { node: v, count: p });
        }
        if v == x || v == y {
            return Err(Error::InvalidQuery(format!("endpoint {v} in conditioning set")));
        }
        if z[..i].contains(&v) {
            return Err(Error::InvalidQuery(format!("{v} repeated in conditioning set")));
        }
    }
    Ok(())
}
