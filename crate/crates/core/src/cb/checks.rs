//! Checks of the two conjectural descriptions of small CB sets: curves of
//! low degree, and unions of linear subspaces.

use serde::{Deserialize, Serialize};

use crate::points::{projective_hull_dim, PointSet};

use super::{find_curve_cone_projection, is_cayley_bacharach, min_hypersurface_degree, CbError};

pub const LU_MAX_POINTS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicocoVerdict {
    pub hypothesis: bool,
    pub cb: bool,
    pub size_bound: bool,
    /// `None` when the curve search in `P^n`, `n >= 3`, found nothing.
    pub conclusion: Option<bool>,
    pub vacuous: bool,
    pub partial: bool,
    pub min_degree: Option<u32>,
}

impl PicocoVerdict {
    pub fn passes(&self) -> bool {
        self.vacuous || self.conclusion != Some(false)
    }
}

/// `|Z| < e(d - e + 3) - 1` as signed arithmetic.
pub fn picoco_bound_holds(len: usize, d: u32, e: u32) -> bool {
    let (d, e) = (d as i64, e as i64);
    (len as i64) < e * (d - e + 3) - 1
}

/// If `Z` is CB for `O(d)` and small compared to `e(d - e + 3)`, does it lie
/// on a curve of degree `< e`?
pub fn picoco_check(z: &PointSet, d: u32, e: u32, seed: u64) -> Result<PicocoVerdict, CbError> {
    let cb = is_cayley_bacharach(z, d)?.is_cb;
    let size_bound = picoco_bound_holds(z.len(), d, e);
    let hypothesis = cb && size_bound;
    let (conclusion, partial, min_degree) = if z.n() == 2 {
        let m = min_hypersurface_degree(z)?;
        (Some(m < e), false, Some(m))
    } else if e <= 1 {
        (Some(false), true, None)
    } else {
        match find_curve_cone_projection(z, e - 1, seed)? {
            Some(c) => (Some(c.claimed_degree < e as u64), true, None),
            None => (None, true, None),
        }
    };
    Ok(PicocoVerdict { hypothesis, cb, size_bound, conclusion, vacuous: !hypothesis, partial, min_degree })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuVerdict {
    pub hypothesis: bool,
    pub cb: bool,
    pub conclusion: bool,
    pub vacuous: bool,
    pub min_cost: usize,
    /// Point indices of each group of an optimal partition.
    pub partition: Vec<Vec<usize>>,
}

impl LuVerdict {
    pub fn passes(&self) -> bool {
        self.vacuous || self.conclusion
    }
}

/// Cheapest partition of `Z` into groups, each group costing the dimension
/// of its linear span (at least 1). Exact, by dynamic programming over
/// subsets.
pub fn min_linear_cover(z: &PointSet) -> Result<(usize, Vec<Vec<usize>>), CbError> {
    let m = z.len();
    if m > LU_MAX_POINTS {
        return Err(CbError::SearchBudget(format!("{m} points exceeds the exact-search limit {LU_MAX_POINTS}")));
    }
    let full = 1usize << m;
    let mut cost = vec![0usize; full];
    for (mask, c) in cost.iter_mut().enumerate().skip(1) {
        let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        *c = projective_hull_dim(&z.subset(&idx))?.max(1);
    }
    let mut best = vec![usize::MAX; full];
    let mut choice = vec![0usize; full];
    best[0] = 0;
    for s in 1..full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // enumerate subsets t of rest; group = t | low
        let mut t = rest;
        loop {
            let g = t | low;
            let v = cost[g] + best[s ^ g];
            if v < best[s] {
                best[s] = v;
                choice[s] = g;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
    }
    let mut groups = Vec::new();
    let mut s = full - 1;
    while s != 0 {
        let g = choice[s];
        groups.push((0..m).filter(|i| g >> i & 1 == 1).collect());
        s ^= g;
    }
    Ok((best[full - 1], groups))
}

/// If `Z` is CB for `O(d)` with `|Z| <= (e+1)d + 1`, is it covered by
/// positive-dimensional linear spaces of total dimension at most `e`?
pub fn lu_check(z: &PointSet, d: u32, e: u32) -> Result<LuVerdict, CbError> {
    if d < 1 {
        return Err(CbError::Degenerate("degree must be at least 1".into()));
    }
    let (min_cost, partition) = min_linear_cover(z)?;
    let cb = is_cayley_bacharach(z, d)?.is_cb;
    let hypothesis = cb && (z.len() as u64) <= (e as u64 + 1) * d as u64 + 1;
    Ok(LuVerdict {
        hypothesis,
        cb,
        conclusion: min_cost <= e as usize,
        vacuous: !hypothesis,
        min_cost,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cb::tests::{conic_points, line_points};
    use crate::ff::FieldCtx;

    fn two_lines(f: &FieldCtx, a: usize, b: usize) -> PointSet {
        // x1 = 0 and x2 = 0 meet at [1:0:0]; avoid it
        let mut rows: Vec<Vec<i64>> = (1..=a as i64).map(|t| vec![t, 0, 1]).collect();
        rows.extend((1..=b as i64).map(|t| vec![t, 1, 0]));
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        PointSet::from_int_rows(f, &refs).unwrap()
    }

    #[test]
    fn picoco_examples() {
        let f = FieldCtx::prime(101).unwrap();
        let v = picoco_check(&line_points(&f, 5), 3, 2, 0).unwrap();
        assert!(v.hypothesis && v.conclusion == Some(true) && !v.vacuous);
        assert_eq!(v.min_degree, Some(1));
        for d in 3..7u32 {
            let z = conic_points(&f, 2 * d as usize + 2);
            let v = picoco_check(&z, d, 3, 0).unwrap();
            assert!(v.cb);
            assert_eq!(v.size_bound, (2 * d as i64 + 2) < 3 * d as i64 - 1);
            assert_eq!(v.conclusion, Some(true));
            assert!(v.passes());
        }
        let v = picoco_check(&line_points(&f, 4), 3, 2, 0).unwrap();
        assert!(v.vacuous && v.passes());
    }

    #[test]
    fn picoco_in_p3_is_partial() {
        let f = FieldCtx::prime(101).unwrap();
        let rows: Vec<Vec<i64>> = (0..5).map(|t| vec![1, t, 0, 0]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let z = PointSet::from_int_rows(&f, &refs).unwrap();
        let v = picoco_check(&z, 3, 2, 9).unwrap();
        assert!(v.partial && v.hypothesis);
        assert_eq!(v.conclusion, Some(true));
    }

    #[test]
    fn lu_examples() {
        let f = FieldCtx::prime(101).unwrap();
        for d in 1..6u32 {
            let v = lu_check(&line_points(&f, d as usize + 2), d, 1).unwrap();
            assert!(v.hypothesis && v.conclusion);
            assert_eq!(v.min_cost, 1);
        }
        for d in 2..5u32 {
            let v = lu_check(&conic_points(&f, 2 * d as usize + 2), d, 1).unwrap();
            assert!(v.vacuous && !v.hypothesis);
        }
        for d in 3..6u32 {
            let z = two_lines(&f, d as usize + 2, d as usize + 2);
            let v = lu_check(&z, d, 2).unwrap();
            assert!(v.hypothesis && v.conclusion, "d = {d}");
            assert_eq!(v.min_cost, 2);
            assert_eq!(v.partition.iter().map(Vec::len).sum::<usize>(), z.len());
        }
        let big = line_points(&f, 15);
        assert!(matches!(lu_check(&big, 3, 1), Err(CbError::SearchBudget(_))));
    }

    #[test]
    fn single_points_cost_one() {
        let f = FieldCtx::prime(101).unwrap();
        let z = PointSet::from_int_rows(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let (cost, _) = min_linear_cover(&z).unwrap();
        // one plane (cost 2) beats three separate points (cost 3)
        assert_eq!(cost, 2);
        let two = z.subset(&[0, 1]);
        assert_eq!(min_linear_cover(&two).unwrap().0, 1);
        let one = z.subset(&[0]);
        assert_eq!(min_linear_cover(&one).unwrap().0, 1);
    }
}
