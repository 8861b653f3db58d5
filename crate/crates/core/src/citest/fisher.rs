//! Partial-correlation CI test with Fisher's z-transform.

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::{validate_query, CiTester, Verdict};

/// Largest |ρ| fed into the z-transform; keeps the statistic finite.
const RHO_CLAMP: f64 = 1.0 - 1e-12;

/// Residual variance below this fraction of the raw variance counts as zero.
const DEGENERATE_REL: f64 = 1e-12;

/// Samples of the observed variables, with the covariance matrix computed
/// once up front.
#[derive(Debug, Clone)]
pub struct DataSet {
    values: DMatrix<f64>,
    cov: DMatrix<f64>,
    names: Vec<String>,
}

impl DataSet {
    /// `values` is `ℓ × p`: one row per sample, one column per variable.
    pub fn new(values: DMatrix<f64>) -> Self {
        let names = (0..values.ncols()).map(|i| i.to_string()).collect();
        Self::with_names(values, names)
    }

    pub fn with_names(values: DMatrix<f64>, names: Vec<String>) -> Self {
        assert_eq!(names.len(), values.ncols(), "one name per column");
        let cov = covariance(&values);
        DataSet { values, cov, names }
    }

    /// Builds from row-major samples.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidQuery("ragged sample rows".into()));
        }
        Ok(Self::new(DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j])))
    }

    pub fn sample_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn var_count(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Writes a header row of column names and one sample per line.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for i in 0..self.sample_count() {
            w.write_record(self.values.row(i).iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> std::result::Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(input);
        let names: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        let mut flat = Vec::new();
        let mut rows = 0;
        for rec in r.records() {
            let rec = rec?;
            for field in rec.iter() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    csv::Error::from(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("bad number `{field}` in row {}", rows + 1),
                    ))
                })?;
                flat.push(v);
            }
            rows += 1;
        }
        let values = DMatrix::from_row_slice(rows, names.len(), &flat);
        Ok(Self::with_names(values, names))
    }
}

fn covariance(values: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = values.shape();
    if n == 0 {
        return DMatrix::zeros(p, p);
    }
    let means = values.row_mean();
    let mut centered = values.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    (centered.transpose() * &centered) / denom
}

/// Partial correlation of `x` and `y` given `z`.
///
/// Computed from the residual covariance of `(x, y)` after regressing on
/// `z`, `Σ_ab − Σ_az Σ_zz⁻¹ Σ_zb`, which equals `−P_xy / √(P_xx P_yy)` for
/// `P` the inverse of the `{x, y} ∪ z` covariance block whenever that block
/// is invertible. A singular `Σ_zz` is handled with its pseudo-inverse.
/// Returns [`Error::DegenerateCovariance`] when `x` or `y` is (numerically)
/// a linear function of `z`.
pub fn partial_correlation(data: &DataSet, x: usize, y: usize, z: &[usize]) -> Result<f64> {
    validate_query(data.var_count(), x, y, z)?;
    let cov = &data.cov;
    let (mut sxx, mut syy, mut sxy) = (cov[(x, x)], cov[(y, y)], cov[(x, y)]);
    let (raw_xx, raw_yy) = (sxx, syy);
    if !z.is_empty() {
        let k = z.len();
        let szz = DMatrix::from_fn(k, k, |i, j| cov[(z[i], z[j])]);
        let szx = DMatrix::from_fn(k, 1, |i, _| cov[(z[i], x)]);
        let szy = DMatrix::from_fn(k, 1, |i, _| cov[(z[i], y)]);
        let (bx, by) = match szz.clone().cholesky() {
            Some(ch) => (ch.solve(&szx), ch.solve(&szy)),
            None => {
                let pinv = szz
                    .pseudo_inverse(1e-12)
                    .map_err(|_| Error::DegenerateCovariance(x, y))?;
                (&pinv * &szx, &pinv * &szy)
            }
        };
        sxx -= szx.dot(&bx);
        syy -= szy.dot(&by);
        sxy -= szx.dot(&by);
    }
    if !(sxx > DEGENERATE_REL * raw_xx && syy > DEGENERATE_REL * raw_yy) {
        return Err(Error::DegenerateCovariance(x, y));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Standard normal quantile `Φ⁻¹(p)`.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Fisher z statistic `½ ln((1+ρ)/(1−ρ)) √(ℓ − |z| − 3)`, or `None` when
/// `ℓ − |z| − 3 ≤ 0`.
fn z_statistic(rho: f64, samples: usize, cond: usize) -> Option<f64> {
    let dof = samples as f64 - cond as f64 - 3.0;
    if dof <= 0.0 {
        return None;
    }
    let rho = rho.clamp(-RHO_CLAMP, RHO_CLAMP);
    Some(0.5 * ((1.0 + rho) / (1.0 - rho)).ln() * dof.sqrt())
}

fn decide(data: &DataSet, x: usize, y: usize, z: &[usize], critical: f64) -> Result<Verdict> {
    let rho = match partial_correlation(data, x, y, z) {
        Ok(r) => r,
        Err(Error::DegenerateCovariance(..)) => RHO_CLAMP,
        Err(e) => return Err(e),
    };
    // Too few samples for this conditioning set: keep the edge.
    let Some(stat) = z_statistic(rho, data.sample_count(), z.len()) else {
        return Ok(Verdict::Dependent);
    };
    Ok(if stat.abs() <= critical { Verdict::Independent } else { Verdict::Dependent })
}

/// Independent iff `|z| ≤ Φ⁻¹(1 − α/2)`.
pub fn fisher_z_test(data: &DataSet, x: usize, y: usize, z: &[usize], alpha: f64) -> Result<Verdict> {
    decide(data, x, y, z, normal_quantile(1.0 - alpha / 2.0))
}

/// [`CiTester`] backend running [`fisher_z_test`] at a fixed level.
#[derive(Debug, Clone)]
pub struct FisherZ {
    data: DataSet,
    alpha: f64,
    critical: f64,
}

impl FisherZ {
    pub fn new(data: DataSet, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(FisherZ { data, alpha, critical: normal_quantile(1.0 - alpha / 2.0) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn data(&self) -> &DataSet {
        &self.data
    }
}

impl CiTester for FisherZ {
    fn num_vars(&self) -> usize {
        self.data.var_count()
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<Verdict> {
        decide(&self.data, x, y, z, self.critical)
    }
}
