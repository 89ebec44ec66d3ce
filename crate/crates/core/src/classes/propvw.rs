//! Exhaustive check of the finite inclusion-exclusion identity for forms
//! with no singular points, over all forms of a given degree.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ff::{binomial, FieldCtx, HomForm, MonomialBasis, Scalar};
use crate::points::{closed_points, jet_matrix, orbit, PointSet};

use super::{compositions, w_lambda_from_closed, ClassesError};

const MAX_FORMS: u64 = 1 << 26;

/// Singular points of one form, counted as closed points by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularLocus {
    /// `closed[j - 1]` for `j <= max_degree`.
    pub closed: Vec<u64>,
    /// Geometric points found, `sum j closed[j - 1]`.
    pub geometric: u64,
    /// More geometric points than the Bezout bound `(d-1)^n` allows for a
    /// finite locus.
    pub infinite: bool,
}

fn bezout(n: usize, d: u32) -> u64 {
    (d.saturating_sub(1) as u64).pow(n as u32)
}

fn degree_bound(n: usize, d: u32, big_n: usize) -> u32 {
    bezout(n, d).max(big_n as u64).max(1) as u32
}

/// Singular closed points of `f` (value and affine-chart partials vanish)
/// of degree at most `max((d-1)^n, min_degree)`, by direct search.
pub fn singular_census(f: &HomForm, min_degree: usize) -> Result<SingularLocus, ClassesError> {
    let (n, d) = (f.n(), f.d());
    let bound = degree_bound(n, d, min_degree);
    let base = f.ctx();
    let mut closed = Vec::new();
    let mut geometric = 0;
    for j in 1..=bound {
        let cp = closed_points(base, n, j)?;
        let lifted = f.lift(&cp.embedding)?;
        let grad = lifted.gradient()?;
        let mut count = 0u64;
        for p in &cp.reps {
            if !p.satisfies(&lifted)? {
                continue;
            }
            let i0 = p.chart();
            let mut sing = true;
            for (i, g) in grad.iter().enumerate() {
                if i != i0 && !p.satisfies(g)? {
                    sing = false;
                    break;
                }
            }
            count += sing as u64;
        }
        closed.push(count);
        geometric += j as u64 * count;
    }
    Ok(SingularLocus { closed, geometric, infinite: geometric > bezout(n, d) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaTally {
    pub sizes: Vec<usize>,
    pub sign: i64,
    /// Pairs `(f, Z)` with `Z` a tuple of disjoint stable subsets of
    /// `Sing(f)` of these sizes.
    pub w_at_least: i128,
    /// The same pairs restricted to `|Sing(f)| >= N + 1`.
    pub w_correction: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropVwReport {
    pub n: usize,
    pub d: u32,
    pub q: u64,
    pub big_n: usize,
    pub forms: u64,
    pub w_empty: i128,
    pub per_lambda: Vec<LambdaTally>,
    pub rhs: i128,
    pub residual: i128,
    pub holds: bool,
    /// A form whose own contribution breaks the identity.
    pub offending_form: Option<String>,
}

struct Grid {
    base: FieldCtx,
    q: u64,
    len: usize,
    forms: u64,
}

impl Grid {
    fn digits(&self, idx: u64) -> Vec<Scalar> {
        let mut r = idx;
        (0..self.len)
            .map(|_| {
                let c = Scalar::Fq(r % self.q);
                r /= self.q;
                c
            })
            .collect()
    }

    fn form(&self, n: usize, d: u32, idx: u64) -> Result<HomForm, ClassesError> {
        Ok(HomForm::from_coeffs(&self.base, n, d, self.digits(idx))?)
    }
}

/// Basis over `F_q` of the forms singular at a closed point, given the
/// orbit of one of its geometric points.
fn singular_subspace(
    orbit_pts: Vec<crate::points::ProjPoint>,
    d: u32,
    back: &HashMap<u64, u64>,
) -> Result<Vec<Vec<u64>>, ClassesError> {
    let ext = orbit_pts[0].ctx().clone();
    let n = orbit_pts[0].n();
    let z = PointSet::new(&ext, n, orbit_pts)?;
    let (_, kernel) = jet_matrix(&z, d)?.rank_kernel();
    // the kernel is Frobenius-stable, so its reduced basis is defined over F_q
    kernel
        .into_iter()
        .map(|v| {
            v.iter()
                .map(|c| {
                    let packed = c.as_fq().expect("finite field");
                    back.get(&packed).copied().ok_or_else(|| {
                        ClassesError::Internal(format!("kernel entry {packed} of {ext} outside the base field"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Packed indices of every `F_q`-combination of `basis`.
fn span_indices(grid: &Grid, basis: &[Vec<u64>]) -> Vec<u64> {
    let f = &grid.base;
    let q = grid.q;
    let mut out = Vec::with_capacity((q as usize).pow(basis.len() as u32));
    let mut coeffs = vec![0u64; basis.len()];
    loop {
        let mut v = vec![f.zero(); grid.len];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c == 0 {
                continue;
            }
            let c = Scalar::Fq(*c);
            for (x, y) in v.iter_mut().zip(b) {
                *x = f.add(x, &f.mul(&c, &Scalar::Fq(*y)));
            }
        }
        out.push(v.iter().rev().fold(0u64, |acc, x| acc * q + x.as_fq().unwrap()));
        let mut i = 0;
        while i < coeffs.len() {
            coeffs[i] += 1;
            if coeffs[i] < q {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
        if i == coeffs.len() {
            return out;
        }
    }
}

struct Tables {
    grid: Grid,
    keep: usize,
    /// `closed[i * keep + j - 1]`: degree-`j` singular points of form `i`.
    closed: Vec<u32>,
    geometric: Vec<u64>,
}

impl Tables {
    fn closed_of(&self, i: usize) -> &[u32] {
        &self.closed[i * self.keep..(i + 1) * self.keep]
    }
}

/// Singular closed points of every form, found point by point: the forms
/// singular at a closed point make up an `F_q`-subspace, enumerated directly.
fn tabulate(n: usize, d: u32, q: u64, keep: usize) -> Result<Tables, ClassesError> {
    let base = FieldCtx::finite(q)?;
    let len = binomial(n as u64 + d as u64, n as u64)
        .ok_or_else(|| ClassesError::Capacity("monomial count overflow".into()))? as usize;
    let forms = q
        .checked_pow(len as u32)
        .filter(|&t| t <= MAX_FORMS)
        .ok_or_else(|| ClassesError::Capacity(format!("{q}^{len} forms exceed the enumeration limit 2^26")))?;
    MonomialBasis::new(n, d)?;
    let grid = Grid { base: base.clone(), q, len, forms };
    let bound = degree_bound(n, d, keep);
    let mut closed = vec![0u32; forms as usize * keep];
    let mut geometric = vec![0u64; forms as usize];
    for j in 1..=bound {
        let cp = closed_points(&base, n, j)?;
        let back: HashMap<u64, u64> = (0..q)
            .map(|v| (cp.embedding.apply(&Scalar::Fq(v)).as_fq().unwrap(), v))
            .collect();
        let spans: Vec<Vec<u64>> = cp
            .reps
            .par_iter()
            .map(|p| {
                let basis = singular_subspace(orbit(p, q), d, &back)?;
                Ok(span_indices(&grid, &basis))
            })
            .collect::<Result<_, ClassesError>>()?;
        for idx in spans.into_iter().flatten() {
            let i = idx as usize;
            geometric[i] += j as u64;
            if (j as usize) <= keep {
                closed[i * keep + j as usize - 1] += 1;
            }
        }
    }
    Ok(Tables { grid, keep, closed, geometric })
}

/// Checks, over all `q^{C(n+d,n)}` forms of degree `d`,
/// `W_0 = sum_{|l| <= N} (-1)^{||l||} W_{>=l} - sum_{|l| <= N} (-1)^{||l||} W_{l,>=N+1}`.
pub fn propvw_bruteforce_check(n: usize, d: u32, q: u64, big_n: usize) -> Result<PropVwReport, ClassesError> {
    let t = tabulate(n, d, q, big_n)?;
    let (grid, keep, closed, geometric) = (&t.grid, t.keep, &t.closed, &t.geometric);
    let forms = grid.forms;
    let bez = bezout(n, d);

    // group forms by (closed counts up to N, |Sing| >= N + 1)
    type Sig = (Vec<u32>, bool);
    let chunk = 1usize << 16;
    let sigs: BTreeMap<Sig, u64> = (0..forms as usize)
        .into_par_iter()
        .chunks(chunk)
        .map(|idxs| {
            let mut m: HashMap<Sig, u64> = HashMap::new();
            for i in idxs {
                let big = geometric[i] > bez || geometric[i] > big_n as u64;
                *m.entry((closed[i * keep..(i + 1) * keep].to_vec(), big)).or_default() += 1;
            }
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        })
        .into_iter()
        .collect();

    let lambdas: Vec<_> = (0..=big_n).map(compositions).collect::<Result<Vec<_>, _>>()?.concat();
    let mut per_lambda: Vec<LambdaTally> = lambdas
        .iter()
        .map(|l| LambdaTally { sizes: l.sizes.clone(), sign: l.sign(), w_at_least: 0, w_correction: 0 })
        .collect();
    let mut w_empty: i128 = 0;
    let mut bad_sig: Option<Sig> = None;
    for ((counts, big), mult) in &sigs {
        let closed_big: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
        let empty = !big && counts.iter().all(|&c| c == 0);
        if empty {
            w_empty += *mult as i128;
        }
        let mut own: i128 = 0;
        for (tally, lam) in per_lambda.iter_mut().zip(&lambdas) {
            let t = w_lambda_from_closed(&closed_big, &lam.sizes)
                .to_i128()
                .ok_or_else(|| ClassesError::Capacity("tuple count exceeds 128 bits".into()))?;
            let weighted = t * *mult as i128;
            tally.w_at_least += weighted;
            if *big {
                tally.w_correction += weighted;
            }
            own += lam.sign() as i128 * t;
        }
        if !big && own != empty as i128 && bad_sig.is_none() {
            bad_sig = Some((counts.clone(), *big));
        }
    }
    let rhs: i128 = per_lambda.iter().map(|t| t.sign as i128 * (t.w_at_least - t.w_correction)).sum();
    let residual = w_empty - rhs;
    let offending_form = match bad_sig {
        None => None,
        Some((counts, big)) => {
            let idx = (0..forms as usize)
                .find(|&i| {
                    let b = geometric[i] > bez || geometric[i] > big_n as u64;
                    b == big && t.closed_of(i) == &counts[..]
                })
                .expect("signature came from a form");
            Some(grid.form(n, d, idx as u64)?.to_string())
        }
    };
    Ok(PropVwReport {
        n,
        d,
        q,
        big_n,
        forms,
        w_empty,
        per_lambda,
        rhs,
        residual,
        holds: residual == 0 && offending_form.is_none(),
        offending_form,
    })
}

impl PropVwReport {
    pub fn tally(&self, sizes: &[usize]) -> Option<&LambdaTally> {
        self.per_lambda.iter().find(|t| t.sizes == sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Squarefree binary forms of degree `d` over `F_q` (nonzero, no
    /// repeated factor over the algebraic closure), by the classical count
    /// through the monic squarefree polynomials `q^k - q^{k-1}`.
    fn squarefree_binary(q: u64, d: u32) -> i128 {
        // a binary form of degree d is c * x1^e * g(x0, x1) with g monic in x0
        // of degree d - e; squarefree iff e <= 1 and g squarefree and
        // (for e = 1) x1 does not divide g, which holds since g is monic in x0
        let monic_sf = |k: u32| -> i128 {
            match k {
                0 => 1,
                1 => q as i128,
                _ => (q as i128).pow(k) - (q as i128).pow(k - 1),
            }
        };
        (q as i128 - 1) * (monic_sf(d) + monic_sf(d - 1))
    }

    #[test]
    fn binary_quartics_over_f2() {
        let r = propvw_bruteforce_check(1, 4, 2, 2).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.forms, 32);
        assert_eq!(r.w_empty, squarefree_binary(2, 4));
        assert_eq!(r.tally(&[]).unwrap().w_at_least, 32);
    }

    #[test]
    fn conics_over_f2() {
        let r = propvw_bruteforce_check(2, 2, 2, 1).unwrap();
        assert!(r.holds);
        assert_eq!(r.forms, 64);
        // |PGL_3(F_2)| / |O_3(F_2)| = 168 / 6 smooth conics up to scalar
        assert_eq!(r.w_empty, 28);
    }

    #[test]
    fn n_zero_is_trivial() {
        let r = propvw_bruteforce_check(1, 3, 3, 0).unwrap();
        assert!(r.holds);
        assert_eq!(r.per_lambda.len(), 1);
        assert_eq!(r.w_empty, squarefree_binary(3, 3));
    }

    #[test]
    fn subspace_census_matches_direct_search() {
        for (n, d, q) in [(1usize, 4u32, 3u64), (2, 2, 3), (2, 3, 2)] {
            let t = tabulate(n, d, q, 2).unwrap();
            let step = (t.grid.forms / 150).max(1) as usize;
            for idx in (0..t.grid.forms as usize).step_by(step) {
                let f = t.grid.form(n, d, idx as u64).unwrap();
                let s = singular_census(&f, 2).unwrap();
                assert_eq!(s.geometric, t.geometric[idx], "{f}");
                let direct: Vec<u32> = s.closed[..2].iter().map(|&c| c as u32).collect();
                assert_eq!(direct, t.closed_of(idx), "{f}");
            }
        }
    }

    #[test]
    fn feasible_grid() {
        for d in 1..=6u32 {
            for q in [2u64, 3, 4, 5] {
                if q.pow(d + 1) > 1 << 16 {
                    continue;
                }
                for big_n in 0..=3 {
                    let r = propvw_bruteforce_check(1, d, q, big_n).unwrap();
                    assert!(r.holds, "n=1 d={d} q={q} N={big_n}");
                    assert_eq!(r.w_empty, if d == 1 { (q * q - 1) as i128 } else { squarefree_binary(q, d) });
                }
            }
        }
        for (d, q) in [(1u32, 2u64), (1, 3), (2, 2), (2, 3), (3, 2)] {
            for big_n in 0..=2 {
                assert!(propvw_bruteforce_check(2, d, q, big_n).unwrap().holds);
            }
        }
    }
}
