//! Macaulay resultants of `n + 1` forms in `n + 1` variables.
//!
//! The resultant is `det(M) / det(M')` where `M` is the Macaulay matrix in
//! degree `D = sum (d_i - 1) + 1` and `M'` its minor on the non-reduced
//! monomials. When `det(M') = 0` we move to random coordinates, where
//! `Res(F o g) = det(g)^{prod d_i} Res(F)`.

use rand::Rng;

use super::field::{FieldCtx, Scalar, TABLE_LIMIT};
use super::forms::{HomForm, MonomialBasis};
use super::matrix::Matrix;
use super::FfError;
use crate::rng;

const RETRIES: u64 = 8;

fn validate(forms: &[HomForm]) -> Result<(FieldCtx, usize), FfError> {
    validate_at_least(forms, true)
}

fn validate_at_least(forms: &[HomForm], square: bool) -> Result<(FieldCtx, usize), FfError> {
    let first = forms.first().ok_or_else(|| FfError::Dimension("no forms".into()))?;
    let n = first.n();
    if forms.len() < n + 1 || (square && forms.len() != n + 1) {
        return Err(FfError::Dimension(format!("{} forms on P^{n}; need {}", forms.len(), n + 1)));
    }
    for f in forms {
        if f.ctx() != first.ctx() {
            return Err(FfError::ContextMismatch(format!("{} vs {}", f.ctx(), first.ctx())));
        }
        if f.n() != n {
            return Err(FfError::Dimension("forms live on different spaces".into()));
        }
        if f.d() == 0 {
            return Err(FfError::Dimension("resultant needs forms of degree >= 1".into()));
        }
    }
    Ok((first.ctx().clone(), n))
}

/// Row index chosen for a degree-`D` monomial: smallest `i` with
/// `alpha_i >= d_i`.
fn divisor_index(alpha: &[u32], degrees: &[u32]) -> usize {
    (0..alpha.len()).find(|&i| alpha[i] >= degrees[i]).expect("critical degree guarantees a divisor")
}

fn is_reduced(alpha: &[u32], degrees: &[u32]) -> bool {
    (0..alpha.len()).filter(|&i| alpha[i] >= degrees[i]).count() == 1
}

fn macaulay_matrix(ctx: &FieldCtx, forms: &[HomForm]) -> Result<(Matrix, Vec<usize>), FfError> {
    let n = forms[0].n();
    let degrees: Vec<u32> = forms.iter().map(|f| f.d()).collect();
    let big_d: u32 = degrees.iter().map(|d| d - 1).sum::<u32>() + 1;
    let basis = MonomialBasis::new(n, big_d)?;
    let size = basis.len();
    let mut m = Matrix::zeros(ctx, size, size);
    let mut non_reduced = Vec::new();
    for (row, alpha) in basis.exponents().iter().enumerate() {
        let i = divisor_index(alpha, &degrees);
        let mut shift = alpha.clone();
        shift[i] -= degrees[i];
        for (e, c) in forms[i].terms() {
            let target: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            m.set(row, basis.index_of(&target).unwrap(), c.clone());
        }
        if !is_reduced(alpha, &degrees) {
            non_reduced.push(row);
        }
    }
    Ok((m, non_reduced))
}

/// `det(M) / det(M')`, or `None` when the minor is singular.
fn det_ratio(ctx: &FieldCtx, forms: &[HomForm]) -> Result<Option<Scalar>, FfError> {
    let (m, nr) = macaulay_matrix(ctx, forms)?;
    let minor_rows: Vec<Vec<Scalar>> = nr.iter().map(|&i| nr.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
    let minor = Matrix::from_rows(ctx, nr.len(), minor_rows)?;
    let den = minor.det()?;
    if ctx.is_zero(&den) {
        return Ok(None);
    }
    Ok(Some(ctx.div(&m.det()?, &den)?))
}

fn random_invertible<R: Rng>(ctx: &FieldCtx, n1: usize, rng: &mut R) -> (Matrix, Scalar) {
    loop {
        let rows = (0..n1).map(|_| (0..n1).map(|_| ctx.random(rng)).collect()).collect();
        let g = Matrix::from_rows(ctx, n1, rows).unwrap();
        let det = g.det().unwrap();
        if !ctx.is_zero(&det) {
            return (g, det);
        }
    }
}

/// Tries the coordinate-change retries over `ctx` for forms already
/// living there.
fn with_retries(ctx: &FieldCtx, forms: &[HomForm], label: &str) -> Result<Option<Scalar>, FfError> {
    if let Some(v) = det_ratio(ctx, forms)? {
        return Ok(Some(v));
    }
    let n1 = forms.len();
    let exponent: u64 = forms.iter().map(|f| f.d() as u64).product();
    let mut rng = rng::stream(0x6d61_6361_756c_6179, label);
    for _ in 0..RETRIES {
        let (g, det) = random_invertible(ctx, n1, &mut rng);
        let moved = forms.iter().map(|f| f.transform(&g)).collect::<Result<Vec<_>, _>>()?;
        if let Some(v) = det_ratio(ctx, &moved)? {
            return Ok(Some(ctx.div(&v, &ctx.pow(&det, exponent))?));
        }
    }
    Ok(None)
}

/// Whether the forms share a projective zero over the algebraic closure,
/// decided by the rank of the full Macaulay matrix in degree
/// `sum (d_i - 1) + 1`. Systems with more than `n + 1` forms are allowed:
/// without a common zero, `n + 1` generic combinations already fill that
/// degree.
pub fn share_common_zero(forms: &[HomForm]) -> Result<bool, FfError> {
    let (ctx, n) = validate_at_least(forms, false)?;
    let degrees: Vec<u32> = forms.iter().map(|f| f.d()).collect();
    let big_d: u32 = degrees.iter().map(|d| d - 1).sum::<u32>() + 1;
    let target = MonomialBasis::new(n, big_d)?;
    let mut rows = Vec::new();
    for f in forms {
        let shifts = MonomialBasis::new(n, big_d - f.d())?;
        for s in shifts.exponents() {
            let mut row = vec![ctx.zero(); target.len()];
            for (e, c) in f.terms() {
                let t: Vec<u32> = e.iter().zip(s).map(|(a, b)| a + b).collect();
                row[target.index_of(&t).unwrap()] = c.clone();
            }
            rows.push(row);
        }
    }
    let m = Matrix::from_rows(&ctx, target.len(), rows)?;
    Ok(m.rank() < target.len())
}

/// The Macaulay resultant of `n + 1` forms on `P^n`, normalized so that
/// `Res(x_0^{d_0}, ..., x_n^{d_n}) = 1`.
pub fn macaulay_resultant(forms: &[HomForm]) -> Result<Scalar, FfError> {
    let (ctx, _) = validate(forms)?;
    if let Some(v) = with_retries(&ctx, forms, "base")? {
        return Ok(v);
    }
    if let (Some(q), false) = (ctx.order(), ctx.is_rational()) {
        let p = ctx.characteristic();
        for step in 2..=6u32 {
            let k = ctx.degree() * step;
            let Some(order) = p.checked_pow(k) else { break };
            if order > TABLE_LIMIT {
                break;
            }
            let big = FieldCtx::extension(p, k)?;
            let emb = ctx.embedding(&big)?;
            let lifted = forms.iter().map(|f| f.lift(&emb)).collect::<Result<Vec<_>, _>>()?;
            if let Some(v) = with_retries(&big, &lifted, &format!("ext{k}"))? {
                // the value is fixed by Galois, so it has a preimage
                for x in 0..q {
                    let s = ctx.element(x);
                    if emb.apply(&s) == v {
                        return Ok(s);
                    }
                }
                return Err(FfError::Undecided("resultant value outside the base field".into()));
            }
        }
    }
    if share_common_zero(forms)? {
        return Ok(ctx.zero());
    }
    Err(FfError::Undecided("Macaulay minor degenerate under every retry".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_form(ctx: &FieldCtx, n: usize, d: u32, rng: &mut ChaCha8Rng) -> HomForm {
        let b = MonomialBasis::new(n, d).unwrap();
        HomForm::from_coeffs(ctx, n, d, (0..b.len()).map(|_| ctx.random(rng)).collect()).unwrap()
    }

    fn sylvester(ctx: &FieldCtx, f: &HomForm, g: &HomForm) -> Scalar {
        // coefficients of x0^{d-j} x1^j
        let a: Vec<Scalar> = f.coeffs().to_vec();
        let b: Vec<Scalar> = g.coeffs().to_vec();
        let (m, n) = (f.d() as usize, g.d() as usize);
        let size = m + n;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut r = vec![ctx.zero(); size];
            for (j, c) in a.iter().enumerate() {
                r[i + j] = c.clone();
            }
            rows.push(r);
        }
        for i in 0..m {
            let mut r = vec![ctx.zero(); size];
            for (j, c) in b.iter().enumerate() {
                r[i + j] = c.clone();
            }
            rows.push(r);
        }
        Matrix::from_rows(ctx, size, rows).unwrap().det().unwrap()
    }

    #[test]
    fn normalization_on_pure_powers() {
        let f7 = FieldCtx::prime(7).unwrap();
        let forms: Vec<HomForm> = (0..3)
            .map(|i| {
                let mut e = vec![0u32; 3];
                e[i] = 2;
                HomForm::from_terms(&f7, 2, 2, &[(e, f7.one())]).unwrap()
            })
            .collect();
        assert_eq!(macaulay_resultant(&forms).unwrap(), f7.one());
    }

    #[test]
    fn binary_forms_match_sylvester_up_to_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for ctx in [FieldCtx::prime(13).unwrap(), FieldCtx::rational()] {
            for _ in 0..40 {
                let d0 = rng.gen_range(1..4);
                let d1 = rng.gen_range(1..4);
                let f = random_form(&ctx, 1, d0, &mut rng);
                let g = random_form(&ctx, 1, d1, &mut rng);
                let r = macaulay_resultant(&[f.clone(), g.clone()]).unwrap();
                let s = sylvester(&ctx, &f, &g);
                assert!(r == s || r == ctx.neg(&s), "{r} vs {s}");
            }
        }
    }

    #[test]
    fn spec_examples() {
        let f7 = FieldCtx::prime(7).unwrap();
        let q = HomForm::from_int_terms(&f7, 2, 2, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]).unwrap();
        assert!(!f7.is_zero(&macaulay_resultant(&q.gradient().unwrap()).unwrap()));
        let sq = HomForm::from_int_terms(&f7, 2, 2, &[(&[2, 0, 0], 1)]).unwrap();
        assert!(f7.is_zero(&macaulay_resultant(&sq.gradient().unwrap()).unwrap()));
        let xyz = HomForm::from_int_terms(&f7, 2, 3, &[(&[1, 1, 1], 1)]).unwrap();
        assert!(f7.is_zero(&macaulay_resultant(&xyz.gradient().unwrap()).unwrap()));
    }

    #[test]
    fn coordinate_change_formula() {
        let f11 = FieldCtx::prime(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let forms: Vec<HomForm> = (0..3).map(|_| random_form(&f11, 2, 2, &mut rng)).collect();
            let (g, det) = random_invertible(&f11, 3, &mut rng);
            let moved: Vec<HomForm> = forms.iter().map(|f| f.transform(&g).unwrap()).collect();
            let lhs = macaulay_resultant(&moved).unwrap();
            let rhs = f11.mul(&macaulay_resultant(&forms).unwrap(), &f11.pow(&det, 8));
            assert_eq!(lhs, rhs);
        }
    }

    /// Common zeros over `F_{q^m}` for `m <= 4` decide vanishing for
    /// three conics (at most 4 common points, each of degree <= 4).
    #[test]
    fn vanishing_matches_point_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for p in [2u64, 3] {
            let base = FieldCtx::prime(p).unwrap();
            for trial in 0..60 {
                let e = if trial % 2 == 0 { 1 } else { 2 };
                let forms: Vec<HomForm> = (0..3).map(|_| random_form(&base, 2, e, &mut rng)).collect();
                let res = macaulay_resultant(&forms).unwrap();
                let mut found = false;
                'outer: for m in 1..=4u32 {
                    let big = FieldCtx::extension(p, m).unwrap();
                    let emb = base.embedding(&big).unwrap();
                    let lifted: Vec<HomForm> = forms.iter().map(|f| f.lift(&emb).unwrap()).collect();
                    let qb = big.order().unwrap();
                    let mut pts = vec![vec![big.zero(), big.zero(), big.one()]];
                    for a in 0..qb {
                        pts.push(vec![big.zero(), big.one(), Scalar::Fq(a)]);
                        for b in 0..qb {
                            pts.push(vec![big.one(), Scalar::Fq(a), Scalar::Fq(b)]);
                        }
                    }
                    for pt in pts {
                        if lifted.iter().all(|f| big.is_zero(&f.evaluate(&pt).unwrap())) {
                            found = true;
                            break 'outer;
                        }
                    }
                }
                assert_eq!(base.is_zero(&res), found, "forms {forms:?}");
                assert_eq!(share_common_zero(&forms).unwrap(), found);
            }
        }
    }
}
