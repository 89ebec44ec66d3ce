//! Smoothness of projective hypersurfaces over `F_q`.
//!
//! Two independent deciders. The search oracle walks closed points in
//! ascending degree and evaluates the partials (and the form itself when
//! `p | d`) through precomputed monomial tables. The algebraic oracle uses a
//! gcd of dehomogenized binary forms for `n = 1`, the Macaulay resultant of
//! the partials for `n >= 2`, and a Macaulay-matrix rank test on the form
//! and its partials when `p | d`.

use crate::ff::{binomial, macaulay_resultant, share_common_zero, FieldCtx, HomForm, MonomialBasis, Scalar};
use crate::points::{closed_points, extension_of, ProjPoint};

use super::CensusError;

/// Largest `P^n(F_{q^m})` the search oracle will tabulate.
pub const SEARCH_POINT_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularWitness {
    pub degree: u32,
    /// A representative over `F_{q^degree}`.
    pub point: ProjPoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothnessVerdict {
    Smooth,
    /// `witness` is `None` for the zero form and when singularity was
    /// certified without locating a point.
    Singular { witness: Option<SingularWitness> },
    Undecided,
}

impl SmoothnessVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self, SmoothnessVerdict::Smooth)
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, SmoothnessVerdict::Singular { .. })
    }
}

/// Both oracle outcomes for one form, plus the combined verdict.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub verdict: SmoothnessVerdict,
    /// `Some(true)` = smooth. `None` when the search was truncated and found
    /// nothing.
    pub search: Option<bool>,
    /// `None` when the algebraic oracle is inconclusive for this form.
    pub algebraic: Option<bool>,
}

impl OracleOutcome {
    pub fn disagree(&self) -> bool {
        matches!((self.search, self.algebraic), (Some(a), Some(b)) if a != b)
    }
}

struct Level {
    degree: u32,
    ext: FieldCtx,
    /// Packed base element to packed extension element.
    embed: Vec<u64>,
    reps: Vec<ProjPoint>,
    /// Per point, `rows` consecutive rows of `len` monomial weights.
    table: Vec<u64>,
}

/// Precomputed tables for all forms of one `(n, d, q)`; shared read-only.
pub struct SmoothnessOracle {
    n: usize,
    d: u32,
    base: FieldCtx,
    basis_len: usize,
    rows: usize,
    p_divides_d: bool,
    levels: Vec<Level>,
    search_complete: bool,
}

impl SmoothnessOracle {
    pub fn new(n: usize, d: u32, q: u64) -> Result<SmoothnessOracle, CensusError> {
        if !(1..=3).contains(&n) {
            return Err(CensusError::Domain(format!("n = {n} outside 1..=3")));
        }
        if d == 0 {
            return Err(CensusError::Domain("degree must be positive".into()));
        }
        let base = FieldCtx::finite(q)?;
        let p = base.characteristic();
        let p_divides_d = d as u64 % p == 0;
        let basis = MonomialBasis::new(n, d)?;
        let lower = MonomialBasis::new(n, d - 1)?;
        let rows = n + 1 + usize::from(p_divides_d);
        let bound = (d as u64 - 1).checked_pow(n as u32).unwrap_or(u64::MAX).max(1);
        let mut levels = Vec::new();
        let mut search_complete = true;
        for m in 1..=bound {
            let size = (q as u128).pow((m * n as u64) as u32);
            if size > SEARCH_POINT_LIMIT as u128 {
                search_complete = false;
                break;
            }
            let m = m as u32;
            let cp = closed_points(&base, n, m)?;
            let ext = extension_of(&base, m)?;
            let emb = base.embedding(&ext)?;
            let embed: Vec<u64> = (0..q).map(|x| emb.apply(&base.element(x)).as_fq().unwrap()).collect();
            let mut table = Vec::with_capacity(cp.reps.len() * rows * basis.len());
            for r in &cp.reps {
                let low = lower.values_at(&ext, r.coords());
                for i in 0..=n {
                    for a in basis.exponents() {
                        if a[i] == 0 {
                            table.push(0);
                            continue;
                        }
                        let mut b = a.clone();
                        b[i] -= 1;
                        let v = &low[lower.index_of(&b).unwrap()];
                        table.push(ext.mul(&ext.from_count(a[i] as u64), v).as_fq().unwrap());
                    }
                }
                if p_divides_d {
                    for v in basis.values_at(&ext, r.coords()) {
                        table.push(v.as_fq().unwrap());
                    }
                }
            }
            levels.push(Level { degree: m, ext, embed, reps: cp.reps, table });
        }
        Ok(SmoothnessOracle {
            n,
            d,
            base,
            basis_len: basis.len(),
            rows,
            p_divides_d,
            levels,
            search_complete,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn base(&self) -> &FieldCtx {
        &self.base
    }

    pub fn basis_len(&self) -> usize {
        self.basis_len
    }

    /// Whether closed points of every degree up to `(d - 1)^n` are covered.
    pub fn search_complete(&self) -> bool {
        self.search_complete
    }

    /// First closed point where every tabulated row vanishes.
    pub fn search(&self, coeffs: &[u64]) -> Option<SingularWitness> {
        let len = self.basis_len;
        let mut lifted = vec![0u64; len];
        for lv in &self.levels {
            for (dst, &c) in lifted.iter_mut().zip(coeffs) {
                *dst = lv.embed[c as usize];
            }
            let ext = &lv.ext;
            let stride = self.rows * len;
            'points: for (k, rep) in lv.reps.iter().enumerate() {
                let block = &lv.table[k * stride..(k + 1) * stride];
                for row in block.chunks_exact(len) {
                    let mut acc = 0u64;
                    for (&c, &w) in lifted.iter().zip(row) {
                        if c != 0 && w != 0 {
                            acc = ext.add_fq(acc, ext.mul_fq(c, w));
                        }
                    }
                    if acc != 0 {
                        continue 'points;
                    }
                }
                return Some(SingularWitness { degree: lv.degree, point: rep.clone() });
            }
        }
        None
    }

    fn form(&self, coeffs: &[u64]) -> Result<HomForm, CensusError> {
        let c = coeffs.iter().map(|&x| self.base.element(x)).collect();
        Ok(HomForm::from_coeffs(&self.base, self.n, self.d, c)?)
    }

    /// Exact algebraic decision: `Some(true)` = smooth.
    fn algebraic(&self, f: &HomForm) -> Result<Option<bool>, CensusError> {
        if self.d == 1 {
            return Ok(Some(true));
        }
        let partials = f.gradient()?;
        if self.n == 1 || self.p_divides_d {
            // f together with its partials cuts out Sing(f) in any characteristic
            let mut system = vec![f.clone()];
            system.extend(partials);
            let common = if self.n == 1 { binary_common_zero(&system)? } else { share_common_zero(&system)? };
            return Ok(Some(!common));
        }
        // Euler: for p not dividing d the partials alone cut out Sing(f)
        let common = if self.n == 2 {
            match macaulay_resultant(&partials) {
                Ok(r) => self.base.is_zero(&r),
                Err(_) => share_common_zero(&partials)?,
            }
        } else {
            share_common_zero(&partials)?
        };
        Ok(Some(!common))
    }

    pub fn decide(&self, coeffs: &[u64]) -> Result<OracleOutcome, CensusError> {
        if coeffs.len() != self.basis_len {
            return Err(CensusError::Domain(format!("expected {} coefficients", self.basis_len)));
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Ok(OracleOutcome {
                verdict: SmoothnessVerdict::Singular { witness: None },
                search: Some(false),
                algebraic: Some(false),
            });
        }
        let found = self.search(coeffs);
        let search = match (&found, self.search_complete) {
            (Some(_), _) => Some(false),
            (None, true) => Some(true),
            (None, false) => None,
        };
        let f = self.form(coeffs)?;
        let algebraic = self.algebraic(&f)?;
        let verdict = if let Some(w) = found {
            SmoothnessVerdict::Singular { witness: Some(w) }
        } else {
            match algebraic {
                Some(true) => SmoothnessVerdict::Smooth,
                Some(false) => SmoothnessVerdict::Singular { witness: None },
                None => SmoothnessVerdict::Undecided,
            }
        };
        Ok(OracleOutcome { verdict, search, algebraic })
    }
}

/// Smoothness of a single form over a finite field.
pub fn is_smooth(f: &HomForm) -> Result<SmoothnessVerdict, CensusError> {
    let q = f.ctx().order().ok_or_else(|| CensusError::Domain("forms over Q".into()))?;
    let oracle = SmoothnessOracle::new(f.n(), f.d(), q)?;
    let coeffs: Vec<u64> = f.coeffs().iter().map(|c| c.as_fq().unwrap()).collect();
    Ok(oracle.decide(&coeffs)?.verdict)
}

/// Number of forms of degree `d` on `P^n`, as a count of coefficients.
pub fn form_count(n: usize, d: u32) -> Option<u64> {
    binomial(n as u64 + d as u64, n as u64)
}

// ---- univariate helpers over a finite field ----

fn trim(mut a: Vec<Scalar>, ctx: &FieldCtx) -> Vec<Scalar> {
    while a.last().is_some_and(|c| ctx.is_zero(c)) {
        a.pop();
    }
    a
}

fn poly_rem(ctx: &FieldCtx, mut a: Vec<Scalar>, b: &[Scalar]) -> Vec<Scalar> {
    let lead = ctx.inv(b.last().unwrap()).unwrap();
    while a.len() >= b.len() {
        let c = ctx.mul(a.last().unwrap(), &lead);
        let shift = a.len() - b.len();
        for (i, bi) in b.iter().enumerate() {
            a[shift + i] = ctx.sub(&a[shift + i], &ctx.mul(&c, bi));
        }
        a = trim(a, ctx);
    }
    a
}

/// Degree of the gcd, or `None` when every input is zero.
fn gcd_degree(ctx: &FieldCtx, polys: Vec<Vec<Scalar>>) -> Option<usize> {
    let mut g: Vec<Scalar> = Vec::new();
    for p in polys {
        let mut a = trim(p, ctx);
        let mut b = std::mem::take(&mut g);
        while !b.is_empty() {
            let r = poly_rem(ctx, a, &b);
            a = b;
            b = r;
        }
        g = a;
    }
    if g.is_empty() {
        None
    } else {
        Some(g.len() - 1)
    }
}

/// Whether binary forms share a zero on `P^1` over the algebraic closure.
fn binary_common_zero(forms: &[HomForm]) -> Result<bool, CensusError> {
    let ctx = forms[0].ctx().clone();
    // the point [1:0]
    let at_infinity = forms.iter().all(|f| {
        let e = [f.d(), 0];
        f.coeff(&e).is_none_or(|c| ctx.is_zero(c))
    });
    if at_infinity {
        return Ok(true);
    }
    let polys = forms
        .iter()
        .map(|f| (0..=f.d()).map(|a| f.coeff(&[a, f.d() - a]).cloned().unwrap_or_else(|| ctx.zero())).collect())
        .collect();
    Ok(gcd_degree(&ctx, polys).is_none_or(|g| g > 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(q: u64, n: usize, d: u32, terms: &[(&[u32], i64)]) -> HomForm {
        let f = FieldCtx::finite(q).unwrap();
        HomForm::from_int_terms(&f, n, d, terms).unwrap()
    }

    #[test]
    fn examples() {
        let conic = form(5, 2, 2, &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]);
        assert_eq!(is_smooth(&conic).unwrap(), SmoothnessVerdict::Smooth);
        let cusp = form(5, 2, 3, &[(&[1, 0, 2], 1), (&[0, 3, 0], -1)]);
        match is_smooth(&cusp).unwrap() {
            SmoothnessVerdict::Singular { witness: Some(w) } => {
                assert_eq!(w.degree, 1);
                let f5 = FieldCtx::prime(5).unwrap();
                assert_eq!(w.point, ProjPoint::from_ints(&f5, &[1, 0, 0]).unwrap());
            }
            v => panic!("{v:?}"),
        }
        let zero = HomForm::zero(&FieldCtx::prime(3).unwrap(), 2, 3).unwrap();
        assert!(is_smooth(&zero).unwrap().is_singular());
    }

    #[test]
    fn characteristic_dividing_degree() {
        // x0 x1 + x2^2 over F_2: partials (x1, x0, 0) meet only at [0:0:1]
        let c = form(2, 2, 2, &[(&[1, 1, 0], 1), (&[0, 0, 2], 1)]);
        assert!(is_smooth(&c).unwrap().is_smooth());
        // x0^2 + x1 x2 over F_2 is smooth too; x0^2 + x1^2 is a double line
        let c = form(2, 2, 2, &[(&[2, 0, 0], 1), (&[0, 1, 1], 1)]);
        assert!(is_smooth(&c).unwrap().is_smooth());
        let c = form(2, 2, 2, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1)]);
        assert!(is_smooth(&c).unwrap().is_singular());
        // Fermat cubic over F_3 is (x0 + x1 + x2)^3: every partial vanishes
        let c = form(3, 2, 3, &[(&[3, 0, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1)]);
        assert!(is_smooth(&c).unwrap().is_singular());
    }

    #[test]
    fn singular_point_of_degree_two() {
        // node at the conjugate pair x0 = 0, x1^2 + x2^2 = 0 over F_3
        // f = (x1^2 + x2^2)^2 + x0^4 is singular along both
        let f = form(3, 2, 4, &[(&[0, 4, 0], 1), (&[0, 2, 2], 2), (&[0, 0, 4], 1), (&[4, 0, 0], 1)]);
        match is_smooth(&f).unwrap() {
            SmoothnessVerdict::Singular { witness: Some(w) } => assert_eq!(w.degree, 2),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn binary_gcd_matches_repeated_roots() {
        let f3 = FieldCtx::prime(3).unwrap();
        // x0^2 x1 has a double root at [0:1]
        let f = HomForm::from_int_terms(&f3, 1, 3, &[(&[2, 1], 1)]).unwrap();
        assert!(!is_smooth(&f).unwrap().is_smooth());
        // x0^3 - x0 x1^2 = x0 (x0 - x1)(x0 + x1)
        let f = HomForm::from_int_terms(&f3, 1, 3, &[(&[3, 0], 1), (&[1, 2], -1)]).unwrap();
        assert!(is_smooth(&f).unwrap().is_smooth());
        // x1^3 over F_3: triple root at infinity in the dehomogenized sense
        let f = HomForm::from_int_terms(&f3, 1, 3, &[(&[0, 3], 1)]).unwrap();
        assert!(is_smooth(&f).unwrap().is_singular());
    }
}
