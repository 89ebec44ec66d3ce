//! Monomial bases and homogeneous forms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::field::{Embedding, FieldCtx, Scalar};
use super::matrix::Matrix;
use super::FfError;

/// Bases larger than this are refused even when the binomial fits.
pub const MAX_BASIS_SIZE: usize = 1 << 24;

/// `C(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Monomials of degree `d` in `x_0..x_n`, ordered lexicographically with
/// `x_0^d` first.
#[derive(Debug)]
pub struct MonomialBasis {
    n: usize,
    d: u32,
    exponents: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn basis_cache() -> &'static Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn push_exponents(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, vars: usize, left: u32) {
    if cur.len() + 1 == vars {
        cur.push(left);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for e in (0..=left).rev() {
        cur.push(e);
        push_exponents(out, cur, vars, left - e);
        cur.pop();
    }
}

impl MonomialBasis {
    pub fn new(n: usize, d: u32) -> Result<Arc<MonomialBasis>, FfError> {
        if let Some(b) = basis_cache().lock().unwrap().get(&(n, d)) {
            return Ok(b.clone());
        }
        let size = binomial(n as u64 + d as u64, n as u64)
            .filter(|&s| s <= MAX_BASIS_SIZE as u64)
            .ok_or_else(|| FfError::Capacity(format!("monomial basis of degree {d} on P^{n} is too large")))?;
        let mut exponents = Vec::with_capacity(size as usize);
        push_exponents(&mut exponents, &mut Vec::new(), n + 1, d);
        let index = exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let b = Arc::new(MonomialBasis { n, d, exponents, index });
        basis_cache().lock().unwrap().insert((n, d), b.clone());
        Ok(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Values of every basis monomial at `point`, in basis order.
    pub fn values_at(&self, ctx: &FieldCtx, point: &[Scalar]) -> Vec<Scalar> {
        let powers = coordinate_powers(ctx, point, self.d);
        self.exponents
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .fold(ctx.one(), |acc, (i, &k)| ctx.mul(&acc, &powers[i][k as usize]))
            })
            .collect()
    }
}

fn coordinate_powers(ctx: &FieldCtx, point: &[Scalar], d: u32) -> Vec<Vec<Scalar>> {
    point
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(d as usize + 1);
            row.push(ctx.one());
            for k in 1..=d as usize {
                row.push(ctx.mul(&row[k - 1], x));
            }
            row
        })
        .collect()
}

/// Homogeneous form of degree `d` in `n + 1` variables.
#[derive(Clone)]
pub struct HomForm {
    ctx: FieldCtx,
    basis: Arc<MonomialBasis>,
    coeffs: Vec<Scalar>,
}

impl PartialEq for HomForm {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx
            && self.basis.n == other.basis.n
            && self.basis.d == other.basis.d
            && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomForm[{}; P^{}; deg {}]({})", self.ctx, self.n(), self.d(), self)
    }
}

impl fmt::Display for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, e) in self.coeffs.iter().zip(self.basis.exponents()) {
            if self.ctx.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if self.ctx.is_one(c) {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl HomForm {
    pub fn zero(ctx: &FieldCtx, n: usize, d: u32) -> Result<HomForm, FfError> {
        let basis = MonomialBasis::new(n, d)?;
        let coeffs = vec![ctx.zero(); basis.len()];
        Ok(HomForm { ctx: ctx.clone(), basis, coeffs })
    }

    pub fn from_coeffs(ctx: &FieldCtx, n: usize, d: u32, coeffs: Vec<Scalar>) -> Result<HomForm, FfError> {
        let basis = MonomialBasis::new(n, d)?;
        if coeffs.len() != basis.len() {
            return Err(FfError::Dimension(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        for c in &coeffs {
            ctx.check(c)?;
        }
        Ok(HomForm { ctx: ctx.clone(), basis, coeffs })
    }

    /// Builds a form from `(exponent, coefficient)` terms; repeated
    /// exponents are summed.
    pub fn from_terms(ctx: &FieldCtx, n: usize, d: u32, terms: &[(Vec<u32>, Scalar)]) -> Result<HomForm, FfError> {
        let mut f = HomForm::zero(ctx, n, d)?;
        for (e, c) in terms {
            ctx.check(c)?;
            let i = f
                .basis
                .index_of(e)
                .ok_or_else(|| FfError::Dimension(format!("exponent {e:?} is not a degree-{d} monomial on P^{n}")))?;
            f.coeffs[i] = ctx.add(&f.coeffs[i], c);
        }
        Ok(f)
    }

    /// Same as [`HomForm::from_terms`] with small integer coefficients.
    pub fn from_int_terms(ctx: &FieldCtx, n: usize, d: u32, terms: &[(&[u32], i64)]) -> Result<HomForm, FfError> {
        let terms: Vec<(Vec<u32>, Scalar)> = terms.iter().map(|(e, c)| (e.to_vec(), ctx.from_i64(*c))).collect();
        HomForm::from_terms(ctx, n, d, &terms)
    }

    /// The linear form `sum a_i x_i`.
    pub fn linear(ctx: &FieldCtx, a: &[Scalar]) -> Result<HomForm, FfError> {
        if a.is_empty() {
            return Err(FfError::Dimension("linear form needs at least one coefficient".into()));
        }
        let n = a.len() - 1;
        // degree-1 basis is x_0, x_1, ..., x_n in that order
        HomForm::from_coeffs(ctx, n, 1, a.to_vec())
    }

    pub fn constant(ctx: &FieldCtx, n: usize, c: Scalar) -> Result<HomForm, FfError> {
        HomForm::from_coeffs(ctx, n, 0, vec![c])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn d(&self) -> u32 {
        self.basis.d
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> Option<&Scalar> {
        self.basis.index_of(e).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ctx.is_zero(c))
    }

    /// Terms with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.basis
            .exponents()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !self.ctx.is_zero(c))
    }

    fn check_point(&self, point: &[Scalar]) -> Result<(), FfError> {
        if point.len() != self.n() + 1 {
            return Err(FfError::Dimension(format!(
                "point with {} coordinates on P^{}",
                point.len(),
                self.n()
            )));
        }
        for x in point {
            self.ctx.check(x)?;
        }
        if point.iter().all(|x| self.ctx.is_zero(x)) {
            return Err(FfError::InvalidPoint);
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar, FfError> {
        self.check_point(point)?;
        let f = &self.ctx;
        let powers = coordinate_powers(f, point, self.d());
        let mut acc = f.zero();
        for (e, c) in self.terms() {
            let m = e
                .iter()
                .enumerate()
                .fold(c.clone(), |acc, (i, &k)| f.mul(&acc, &powers[i][k as usize]));
            acc = f.add(&acc, &m);
        }
        Ok(acc)
    }

    /// Evaluates at a point whose coordinates live in the target of `emb`.
    pub fn evaluate_in(&self, emb: &Embedding, point: &[Scalar]) -> Result<Scalar, FfError> {
        self.lift(emb)?.evaluate(point)
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Result<HomForm, FfError> {
        if i > self.n() {
            return Err(FfError::Dimension(format!("no variable x{i} on P^{}", self.n())));
        }
        if self.d() == 0 {
            return HomForm::zero(&self.ctx, self.n(), 0);
        }
        let mut out = HomForm::zero(&self.ctx, self.n(), self.d() - 1)?;
        for (e, c) in self.terms() {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let j = out.basis.index_of(&e2).unwrap();
            let v = self.ctx.mul(c, &self.ctx.from_count(e[i] as u64));
            out.coeffs[j] = self.ctx.add(&out.coeffs[j], &v);
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Result<Vec<HomForm>, FfError> {
        (0..=self.n()).map(|i| self.partial(i)).collect()
    }

    fn check_compatible(&self, other: &HomForm) -> Result<(), FfError> {
        if self.ctx != other.ctx {
            return Err(FfError::ContextMismatch(format!("{} vs {}", self.ctx, other.ctx)));
        }
        if self.n() != other.n() {
            return Err(FfError::Dimension(format!("forms on P^{} and P^{}", self.n(), other.n())));
        }
        Ok(())
    }

    pub fn add(&self, other: &HomForm) -> Result<HomForm, FfError> {
        self.check_compatible(other)?;
        if self.d() != other.d() {
            return Err(FfError::Dimension("adding forms of different degrees".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| self.ctx.add(a, b)).collect();
        Ok(HomForm { ctx: self.ctx.clone(), basis: self.basis.clone(), coeffs })
    }

    pub fn sub(&self, other: &HomForm) -> Result<HomForm, FfError> {
        self.add(&other.scale(&self.ctx.from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> HomForm {
        let coeffs = self.coeffs.iter().map(|a| self.ctx.mul(a, c)).collect();
        HomForm { ctx: self.ctx.clone(), basis: self.basis.clone(), coeffs }
    }

    pub fn mul(&self, other: &HomForm) -> Result<HomForm, FfError> {
        self.check_compatible(other)?;
        let mut out = HomForm::zero(&self.ctx, self.n(), self.d() + other.d())?;
        let f = &self.ctx;
        let mut e = vec![0u32; self.n() + 1];
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                for k in 0..e.len() {
                    e[k] = ea[k] + eb[k];
                }
                let j = out.basis.index_of(&e).unwrap();
                out.coeffs[j] = f.add(&out.coeffs[j], &f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<HomForm, FfError> {
        let mut acc = HomForm::constant(&self.ctx, self.n(), self.ctx.one())?;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Product of a list of forms on the same space.
    pub fn product(ctx: &FieldCtx, n: usize, forms: &[HomForm]) -> Result<HomForm, FfError> {
        let mut acc = HomForm::constant(ctx, n, ctx.one())?;
        for f in forms {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    /// Substitutes `x_i -> subs[i]`, where all substitutes share a degree
    /// `e` on a common space; the result has degree `d * e`.
    pub fn compose(&self, subs: &[HomForm]) -> Result<HomForm, FfError> {
        if subs.len() != self.n() + 1 {
            return Err(FfError::Dimension(format!("{} substitutes for {} variables", subs.len(), self.n() + 1)));
        }
        let m = subs[0].n();
        let e = subs[0].d();
        for s in subs {
            if s.ctx != self.ctx {
                return Err(FfError::ContextMismatch(format!("{} vs {}", self.ctx, s.ctx)));
            }
            if s.n() != m || s.d() != e {
                return Err(FfError::Dimension("substitutes must share space and degree".into()));
            }
        }
        let d = self.d();
        let mut powers: Vec<Vec<HomForm>> = Vec::with_capacity(subs.len());
        for s in subs {
            let mut row = vec![HomForm::constant(&self.ctx, m, self.ctx.one())?];
            for k in 1..=d as usize {
                let next = row[k - 1].mul(s)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = HomForm::zero(&self.ctx, m, d * e)?;
        for (exp, c) in self.terms() {
            let mut term = HomForm::constant(&self.ctx, m, c.clone())?;
            for (i, &k) in exp.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[i][k as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `f(g x)`: substitutes `x_i -> sum_j g[i][j] x_j` for a square matrix `g`.
    pub fn transform(&self, g: &Matrix) -> Result<HomForm, FfError> {
        let n1 = self.n() + 1;
        if g.rows() != n1 || g.cols() != n1 {
            return Err(FfError::Dimension("transform matrix must be (n+1)x(n+1)".into()));
        }
        let subs = (0..n1)
            .map(|i| HomForm::linear(&self.ctx, g.row(i)))
            .collect::<Result<Vec<_>, _>>()?;
        self.compose(&subs)
    }

    /// Image of the form under a field embedding.
    pub fn lift(&self, emb: &Embedding) -> Result<HomForm, FfError> {
        if emb.source() != &self.ctx {
            return Err(FfError::ContextMismatch(format!("embedding from {} applied to a form over {}", emb.source(), self.ctx)));
        }
        let coeffs = self.coeffs.iter().map(|c| emb.apply(c)).collect();
        Ok(HomForm { ctx: emb.target().clone(), basis: self.basis.clone(), coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(ctx: &FieldCtx, n: usize, d: u32, rng: &mut ChaCha8Rng) -> HomForm {
        let b = MonomialBasis::new(n, d).unwrap();
        HomForm::from_coeffs(ctx, n, d, (0..b.len()).map(|_| ctx.random(rng)).collect()).unwrap()
    }

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(MonomialBasis::new(2, 2).unwrap().len(), 6);
        assert_eq!(MonomialBasis::new(2, 4).unwrap().len(), 15);
        assert_eq!(MonomialBasis::new(3, 3).unwrap().len(), 20);
        let b = MonomialBasis::new(2, 2).unwrap();
        let order: Vec<Vec<u32>> = b.exponents().to_vec();
        assert_eq!(
            order,
            vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]]
        );
        assert!(MonomialBasis::new(200, 200).is_err());
        assert_eq!(binomial(10, 3), Some(120));
        assert_eq!(binomial(200, 100), None);
    }

    #[test]
    fn evaluation_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f = HomForm::from_int_terms(&f3, 2, 2, &[(&[2, 0, 0], 1)]).unwrap();
        let one = vec![f3.one(); 3];
        assert_eq!(f.evaluate(&one).unwrap(), f3.one());
        assert!(matches!(f.evaluate(&vec![f3.zero(); 3]), Err(FfError::InvalidPoint)));
        let f5 = FieldCtx::prime(5).unwrap();
        let g = HomForm::from_int_terms(&f5, 2, 2, &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]).unwrap();
        assert!(f5.is_zero(&g.evaluate(&vec![f5.one(); 3]).unwrap()));
    }

    #[test]
    fn evaluation_matches_naive_sum() {
        let f7 = FieldCtx::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = rng.gen_range(0..5);
            let f = random_form(&f7, 2, d, &mut rng);
            let p: Vec<u64> = (0..3).map(|_| rng.gen_range(1..7)).collect();
            let mut naive = 0u64;
            for (e, c) in f.basis().exponents().iter().zip(f.coeffs()) {
                let mut t = c.as_fq().unwrap();
                for (i, &k) in e.iter().enumerate() {
                    for _ in 0..k {
                        t = t * p[i] % 7;
                    }
                }
                naive = (naive + t) % 7;
            }
            let pt: Vec<Scalar> = p.iter().map(|&v| Scalar::Fq(v)).collect();
            assert_eq!(f.evaluate(&pt).unwrap(), Scalar::Fq(naive));
        }
    }

    #[test]
    fn partial_examples() {
        let f7 = FieldCtx::prime(7).unwrap();
        let f = HomForm::from_int_terms(&f7, 2, 3, &[(&[2, 1, 0], 1)]).unwrap();
        let expect = HomForm::from_int_terms(&f7, 2, 2, &[(&[1, 1, 0], 2)]).unwrap();
        assert_eq!(f.partial(0).unwrap(), expect);
        let f2 = FieldCtx::prime(2).unwrap();
        let g = HomForm::from_int_terms(&f2, 2, 2, &[(&[2, 0, 0], 1)]).unwrap();
        assert!(g.partial(0).unwrap().is_zero());
    }

    #[test]
    fn euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ctx in [FieldCtx::prime(7).unwrap(), FieldCtx::prime(2).unwrap(), FieldCtx::rational()] {
            for _ in 0..100 {
                let n = rng.gen_range(1..4);
                let d = rng.gen_range(1..5);
                let f = random_form(&ctx, n, d, &mut rng);
                let mut sum = HomForm::zero(&ctx, n, d).unwrap();
                for i in 0..=n {
                    let mut xi = vec![ctx.zero(); n + 1];
                    xi[i] = ctx.one();
                    let term = HomForm::linear(&ctx, &xi).unwrap().mul(&f.partial(i).unwrap()).unwrap();
                    sum = sum.add(&term).unwrap();
                }
                assert_eq!(sum, f.scale(&ctx.from_count(d as u64)));
            }
        }
    }

    #[test]
    fn transform_agrees_with_pointwise_evaluation() {
        let f11 = FieldCtx::prime(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = random_form(&f11, 2, 3, &mut rng);
            let g = Matrix::from_rows(&f11, 3, (0..3).map(|_| (0..3).map(|_| f11.random(&mut rng)).collect()).collect())
                .unwrap();
            let h = f.transform(&g).unwrap();
            let x: Vec<Scalar> = vec![f11.random_nonzero(&mut rng), f11.random(&mut rng), f11.random(&mut rng)];
            let gx = g.mul_vec(&x).unwrap();
            let lhs = h.evaluate(&x).unwrap();
            let rhs = if gx.iter().all(|c| f11.is_zero(c)) { f11.zero() } else { f.evaluate(&gx).unwrap() };
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lift_commutes_with_evaluation() {
        let f2 = FieldCtx::prime(2).unwrap();
        let f4 = FieldCtx::extension(2, 2).unwrap();
        let emb = f2.embedding(&f4).unwrap();
        // x0^2 + x0 x1 + x1^2 has no F_2 zeros but vanishes at [1:w]
        let f = HomForm::from_int_terms(&f2, 1, 2, &[(&[2, 0], 1), (&[1, 1], 1), (&[0, 2], 1)]).unwrap();
        let zeros: Vec<u64> = (0..4)
            .filter(|&w| f4.is_zero(&f.evaluate_in(&emb, &[f4.one(), Scalar::Fq(w)]).unwrap()))
            .collect();
        assert_eq!(zeros, vec![2, 3]);
    }
}
