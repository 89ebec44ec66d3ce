//! Counting smooth hypersurfaces of `P^n` over `F_q`, exhaustively or by
//! seeded sampling, against the limiting density `prod_{k=1}^{n+1} (1 - q^-k)`.

mod smooth;

pub use smooth::{form_count, is_smooth, OracleOutcome, SingularWitness, SmoothnessOracle, SmoothnessVerdict};
pub use smooth::SEARCH_POINT_LIMIT;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ff::FfError;
use crate::points::PointsError;
use crate::rng;

pub const EXHAUSTIVE_LIMIT: u64 = 1 << 26;
pub const SAMPLE_LIMIT: u64 = 10_000_000;
const CHUNK: u64 = 4096;

#[derive(Debug, thiserror::Error)]
pub enum CensusError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("undecided verdict for form #{index} (coefficients {coeffs:?})")]
    Undecided { index: u64, coeffs: Vec<u64> },
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Points(#[from] PointsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensusMode {
    Exhaustive,
    Sample { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    pub d: u32,
    pub q: u64,
    pub mode: CensusMode,
    pub total: u64,
    pub smooth: u64,
    pub singular: u64,
    pub undecided: u64,
    /// Forms on which both oracles reached a verdict.
    pub oracles_compared: u64,
    pub oracle_disagreements: u64,
    /// Smooth fraction, reduced; `0/1` for an empty sample.
    pub density_num: String,
    pub density_den: String,
    pub density: f64,
    pub target_num: String,
    pub target_den: String,
    pub target: f64,
    pub deviation: f64,
    /// 95% Wilson interval, sample mode only.
    pub interval: Option<(f64, f64)>,
}

/// `prod_{k=1}^{n+1} (1 - q^-k)`.
pub fn target_density(n: usize, q: u64) -> BigRational {
    let q = BigInt::from(q);
    let mut out = BigRational::one();
    let mut qk = BigInt::one();
    for _ in 0..=n {
        qk *= &q;
        out *= BigRational::new(&qk - 1, qk.clone());
    }
    out
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn decode(mut idx: u64, q: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let c = idx % q;
            idx /= q;
            c
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Tally {
    smooth: u64,
    singular: u64,
    undecided: u64,
    compared: u64,
    disagreements: u64,
    first_undecided: Option<u64>,
}

impl Tally {
    fn add(&mut self, o: &OracleOutcome, index: u64) {
        match o.verdict {
            SmoothnessVerdict::Smooth => self.smooth += 1,
            SmoothnessVerdict::Singular { .. } => self.singular += 1,
            SmoothnessVerdict::Undecided => {
                self.undecided += 1;
                self.first_undecided.get_or_insert(index);
            }
        }
        if o.search.is_some() && o.algebraic.is_some() {
            self.compared += 1;
        }
        if o.disagree() {
            self.disagreements += 1;
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.smooth += o.smooth;
        self.singular += o.singular;
        self.undecided += o.undecided;
        self.compared += o.compared;
        self.disagreements += o.disagreements;
        self.first_undecided = match (self.first_undecided, o.first_undecided) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

fn sample_coeffs(seed: u64, i: u64, q: u64, len: usize) -> Vec<u64> {
    let mut r = rng::indexed_stream(seed, "census-sample", i);
    (0..len).map(|_| r.gen_range(0..q)).collect()
}

fn tally_range(
    oracle: &SmoothnessOracle,
    total: u64,
    form_of: &(dyn Fn(u64) -> Vec<u64> + Sync),
) -> Result<Tally, CensusError> {
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Result<Tally, CensusError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                t.add(&oracle.decide(&form_of(i))?, i);
            }
            Ok(t)
        })
        .collect();
    parts.into_iter().try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

/// Wilson score interval at 95%.
fn wilson(k: u64, n: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let den = 1.0 + z * z / n;
    let mid = (p + z * z / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / den;
    ((mid - half).max(0.0), (mid + half).min(1.0))
}

pub fn census_run(n: usize, d: u32, q: u64, mode: CensusMode) -> Result<CensusReport, CensusError> {
    let oracle = SmoothnessOracle::new(n, d, q)?;
    let len = oracle.basis_len();
    let (total, tally) = match mode {
        CensusMode::Exhaustive => {
            let total = (q as u128)
                .checked_pow(len as u32)
                .filter(|&t| t <= EXHAUSTIVE_LIMIT as u128)
                .ok_or_else(|| CensusError::Capacity(format!("q^{len} forms exceeds 2^26")))? as u64;
            let t = tally_range(&oracle, total, &|i| decode(i, q, len))?;
            if let Some(index) = t.first_undecided {
                return Err(CensusError::Undecided { index, coeffs: decode(index, q, len) });
            }
            (total, t)
        }
        CensusMode::Sample { samples, seed } => {
            if samples > SAMPLE_LIMIT {
                return Err(CensusError::Capacity(format!("{samples} samples exceeds {SAMPLE_LIMIT}")));
            }
            (samples, tally_range(&oracle, samples, &|i| sample_coeffs(seed, i, q, len))?)
        }
    };
    let decided = tally.smooth + tally.singular;
    let density = if decided == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(tally.smooth), BigInt::from(decided))
    };
    let target = target_density(n, q);
    let interval = match mode {
        CensusMode::Sample { .. } if decided > 0 => Some(wilson(tally.smooth, decided)),
        _ => None,
    };
    Ok(CensusReport {
        n,
        d,
        q,
        mode,
        total,
        smooth: tally.smooth,
        singular: tally.singular,
        undecided: tally.undecided,
        oracles_compared: tally.compared,
        oracle_disagreements: tally.disagreements,
        density_num: density.numer().to_string(),
        density_den: density.denom().to_string(),
        density: to_f64(&density),
        target_num: target.numer().to_string(),
        target_den: target.denom().to_string(),
        target: to_f64(&target),
        deviation: to_f64(&(&density - &target)),
        interval,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub d: u32,
    pub total: u64,
    pub smooth: u64,
    pub density_num: String,
    pub density_den: String,
    pub target_num: String,
    pub target_den: String,
    pub deviation: f64,
    /// `None` when the deviation is exactly zero.
    pub log_abs_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub n: usize,
    pub q: u64,
    pub mode: CensusMode,
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log|deviation|` against `d`.
    pub slope: Option<f64>,
}

impl DecayTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,total,smooth,density_num,density_den,target_num,target_den,deviation\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.d, r.total, r.smooth, r.density_num, r.density_den, r.target_num, r.target_den, r.deviation
            ));
        }
        out
    }
}

fn ls_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn error_decay_report(
    n: usize,
    q: u64,
    d_range: std::ops::RangeInclusive<u32>,
    mode: CensusMode,
) -> Result<DecayTable, CensusError> {
    let mut rows = Vec::new();
    for d in d_range {
        let r = census_run(n, d, q, mode)?;
        let density = BigRational::new(r.density_num.parse().unwrap(), r.density_den.parse().unwrap());
        let exact = &density - target_density(n, q);
        let log_abs_deviation = (!exact.is_zero()).then(|| to_f64(&exact.abs()).ln());
        rows.push(DecayRow {
            d,
            total: r.total,
            smooth: r.smooth,
            density_num: r.density_num,
            density_den: r.density_den,
            target_num: r.target_num,
            target_den: r.target_den,
            deviation: r.deviation,
            log_abs_deviation,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.log_abs_deviation.map(|l| (r.d as f64, l))).collect();
    Ok(DecayTable { n, q, mode, slope: ls_slope(&pts), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{FieldCtx, HomForm, Matrix};

    #[test]
    fn plane_conics_and_cubics() {
        let r = census_run(2, 2, 2, CensusMode::Exhaustive).unwrap();
        assert_eq!((r.total, r.smooth), (64, 28));
        assert_eq!(r.oracles_compared, 64);
        assert_eq!(r.oracle_disagreements, 0);
        let r = census_run(2, 3, 2, CensusMode::Exhaustive).unwrap();
        assert_eq!(r.total, 1024);
        assert_eq!((r.target_num.as_str(), r.target_den.as_str()), ("21", "64"));
        assert_eq!(r.undecided, 0);
        assert_eq!(r.oracle_disagreements, 0);
        assert!(r.deviation.abs() <= 0.15);
    }

    #[test]
    fn smooth_conics_count() {
        // smooth conics: (q - 1) q^2 (q^3 - 1) forms
        for q in [3u64, 4, 5] {
            let r = census_run(2, 2, q, CensusMode::Exhaustive).unwrap();
            assert_eq!(r.smooth, (q - 1) * q * q * (q * q * q - 1), "q = {q}");
            assert_eq!(r.oracle_disagreements, 0);
        }
    }

    fn squarefree_binary(q: u64, d: u32) -> u64 {
        // monic squarefree of degree k: q^k - q^(k-1) for k >= 2
        let msf = |k: u32| if k < 2 { q.pow(k) } else { q.pow(k) - q.pow(k - 1) };
        (q - 1) * (msf(d) + msf(d - 1))
    }

    #[test]
    fn binary_forms_are_counted_by_squarefree_formula() {
        for q in [2u64, 3, 4, 5] {
            for d in 1..=5u32 {
                if q.pow(d + 1) > 20_000 {
                    continue;
                }
                let r = census_run(1, d, q, CensusMode::Exhaustive).unwrap();
                assert_eq!(r.smooth, squarefree_binary(q, d), "q = {q}, d = {d}");
                assert_eq!(r.oracle_disagreements, 0);
            }
        }
    }

    #[test]
    fn decay_table() {
        let t = error_decay_report(1, 2, 2..=8, CensusMode::Exhaustive).unwrap();
        assert_eq!(t.rows.len(), 7);
        // squarefree binary forms hit the limit exactly from d = 3 on
        assert!(t.rows[0].log_abs_deviation.is_some());
        assert!(t.rows[1..].iter().all(|r| r.deviation == 0.0 && r.log_abs_deviation.is_none()));
        assert!(t.slope.is_none());
        let plane = error_decay_report(2, 2, 1..=3, CensusMode::Exhaustive).unwrap();
        assert!(plane.slope.is_some());
        let csv = t.to_csv();
        assert!(csv.starts_with("d,total,smooth,density_num"));
        assert_eq!(csv.lines().count(), 8);
        let empty = error_decay_report(1, 2, 3..=2, CensusMode::Exhaustive).unwrap();
        assert!(empty.rows.is_empty() && empty.slope.is_none());
    }

    #[test]
    fn sampling_is_seeded() {
        let mode = CensusMode::Sample { samples: 3000, seed: 17 };
        let a = census_run(2, 3, 5, mode).unwrap();
        let b = census_run(2, 3, 5, mode).unwrap();
        assert_eq!(a, b);
        let (lo, hi) = a.interval.unwrap();
        assert!(lo <= a.density && a.density <= hi);
        let empty = census_run(2, 3, 5, CensusMode::Sample { samples: 0, seed: 1 }).unwrap();
        assert_eq!((empty.total, empty.smooth, empty.interval), (0, 0, None));
        assert!(census_run(2, 3, 5, CensusMode::Sample { samples: SAMPLE_LIMIT + 1, seed: 1 }).is_err());
        assert!(matches!(census_run(2, 4, 5, CensusMode::Exhaustive), Err(CensusError::Capacity(_))));
    }

    #[test]
    fn verdicts_are_invariant() {
        let f = FieldCtx::prime(3).unwrap();
        let oracle = SmoothnessOracle::new(2, 3, 3).unwrap();
        let mut r = rng::stream(5, "invariance");
        for _ in 0..12 {
            let coeffs: Vec<u64> = (0..10).map(|_| r.gen_range(0..3)).collect();
            let base = oracle.decide(&coeffs).unwrap().verdict.is_smooth();
            let scaled: Vec<u64> = coeffs.iter().map(|c| c * 2 % 3).collect();
            assert_eq!(oracle.decide(&scaled).unwrap().verdict.is_smooth(), base);
            let form = HomForm::from_coeffs(&f, 2, 3, coeffs.iter().map(|&c| f.element(c)).collect()).unwrap();
            let mut moved = 0;
            while moved < 50 {
                let g = Matrix::from_rows(&f, 3, (0..3).map(|_| (0..3).map(|_| f.random(&mut r)).collect()).collect())
                    .unwrap();
                if f.is_zero(&g.det().unwrap()) {
                    continue;
                }
                moved += 1;
                let h = form.transform(&g).unwrap();
                let hc: Vec<u64> = h.coeffs().iter().map(|c| c.as_fq().unwrap()).collect();
                assert_eq!(oracle.decide(&hc).unwrap().verdict.is_smooth(), base);
            }
        }
    }
}
