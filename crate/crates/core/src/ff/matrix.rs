//! Dense matrices with exact rank, kernel and determinant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{FieldCtx, Scalar};
use super::FfError;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Matrix {
        Matrix { ctx: ctx.clone(), rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    /// Builds a matrix from rows; every entry must belong to `ctx` and every
    /// row must have length `cols`.
    pub fn from_rows(ctx: &FieldCtx, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Matrix, FfError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(FfError::Dimension(format!("row of length {} in a {cols}-column matrix", row.len())));
            }
            for x in &row {
                ctx.check(x)?;
            }
            data.extend(row);
        }
        Ok(Matrix { ctx: ctx.clone(), rows: n, cols, data })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { ctx: self.ctx.clone(), rows: self.cols, cols: self.rows, data }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, FfError> {
        if self.ctx != other.ctx {
            return Err(FfError::ContextMismatch(format!("{} vs {}", self.ctx, other.ctx)));
        }
        if self.cols != other.cols {
            return Err(FfError::Dimension(format!("{} vs {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { ctx: self.ctx.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Submatrix keeping the listed rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        Matrix { ctx: self.ctx.clone(), rows: keep.len(), cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, FfError> {
        if v.len() != self.cols {
            return Err(FfError::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        for x in v {
            self.ctx.check(x)?;
        }
        let f = &self.ctx;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, FfError> {
        if self.ctx != other.ctx {
            return Err(FfError::ContextMismatch(format!("{} vs {}", self.ctx, other.ctx)));
        }
        if self.cols != other.rows {
            return Err(FfError::Dimension("inner dimensions differ".into()));
        }
        let f = &self.ctx;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), &f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form. Pivots are the first nonzero entry in
    /// column order; returns the reduced matrix and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        if self.ctx.is_rational() {
            rref_rational(self)
        } else {
            rref_finite(self)
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank and a basis of the right kernel `{v : M v = 0}`.
    pub fn rank_kernel(&self) -> (usize, Vec<Vec<Scalar>>) {
        let (r, pivots) = self.rref();
        let f = &self.ctx;
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        let mut kernel = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(r.get(row, free));
            }
            kernel.push(v);
        }
        (pivots.len(), kernel)
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Result<Scalar, FfError> {
        if self.rows != self.cols {
            return Err(FfError::Dimension(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        if self.ctx.is_rational() {
            Ok(Scalar::Q(det_bareiss(self)))
        } else {
            Ok(det_finite(self))
        }
    }
}

fn rref_finite(m: &Matrix) -> (Matrix, Vec<usize>) {
    let f = &m.ctx;
    let cols = m.cols;
    let mut a: Vec<u64> = m.data.iter().map(|x| x.as_fq().unwrap()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv_fq(a[r * cols + c]);
        for j in c..cols {
            a[r * cols + j] = f.mul_fq(a[r * cols + j], inv);
        }
        let pivot_row: Vec<u64> = a[r * cols..(r + 1) * cols].to_vec();
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let factor = a[i * cols + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg_fq(factor);
            for j in c..cols {
                if pivot_row[j] != 0 {
                    a[i * cols + j] = f.add_fq(a[i * cols + j], f.mul_fq(nf, pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let data = a.into_iter().map(Scalar::Fq).collect();
    (Matrix { ctx: f.clone(), rows: m.rows, cols, data }, pivots)
}

/// Clears denominators row by row so elimination runs over `Z`.
fn integer_rows(m: &Matrix) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let row: Vec<&BigRational> = m.row(i).iter().map(|x| m.ctx.as_rational(x).unwrap()).collect();
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect()
}

fn normalize_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

fn rref_rational(m: &Matrix) -> (Matrix, Vec<usize>) {
    let cols = m.cols;
    let mut a = integer_rows(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(pr, r);
        let pivot_row = a[r].clone();
        let pv = &pivot_row[c];
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let b = row[c].clone();
            for j in 0..cols {
                row[j] = &row[j] * pv - &b * &pivot_row[j];
            }
            normalize_content(row);
        }
        pivots.push(c);
        r += 1;
    }
    let mut data = Vec::with_capacity(m.rows * cols);
    for (i, row) in a.iter().enumerate() {
        let pv = pivots.get(i).map(|&c| row[c].clone());
        for x in row {
            let q = match &pv {
                Some(p) => BigRational::new(x.clone(), p.clone()),
                None => BigRational::from_integer(x.clone()),
            };
            data.push(Scalar::Q(q));
        }
    }
    (Matrix { ctx: m.ctx.clone(), rows: m.rows, cols, data }, pivots)
}

fn det_finite(m: &Matrix) -> Scalar {
    let f = &m.ctx;
    let n = m.rows;
    let mut a: Vec<u64> = m.data.iter().map(|x| x.as_fq().unwrap()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| a[i * n + c] != 0) else {
            return f.zero();
        };
        if pr != c {
            for j in 0..n {
                a.swap(pr * n + j, c * n + j);
            }
            det = f.neg_fq(det);
        }
        let pv = a[c * n + c];
        det = f.mul_fq(det, pv);
        let inv = f.inv_fq(pv);
        for i in c + 1..n {
            let factor = a[i * n + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg_fq(f.mul_fq(factor, inv));
            for j in c..n {
                let v = a[c * n + j];
                if v != 0 {
                    a[i * n + j] = f.add_fq(a[i * n + j], f.mul_fq(nf, v));
                }
            }
        }
    }
    Scalar::Fq(det)
}

/// Fraction-free Bareiss elimination; entries are scaled to integers first.
fn det_bareiss(m: &Matrix) -> BigRational {
    let n = m.rows;
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigRational::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<&BigRational> = m.row(i).iter().map(|x| m.ctx.as_rational(x).unwrap()).collect();
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale /= BigRational::from_integer(lcm.clone());
        a.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(pr) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigRational::zero();
            };
            a.swap(pr, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    BigRational::from_integer(sign * &a[n - 1][n - 1]) * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(ctx: &FieldCtx, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let rows = (0..r).map(|_| (0..c).map(|_| ctx.random(rng)).collect()).collect();
        Matrix::from_rows(ctx, c, rows).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        let f5 = FieldCtx::prime(5).unwrap();
        let (r, k) = Matrix::identity(&f5, 3).rank_kernel();
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = Matrix::zeros(&f5, 2, 4).rank_kernel();
        assert_eq!((r, k.len()), (0, 4));
        let (r, k) = Matrix::zeros(&f5, 0, 3).rank_kernel();
        assert_eq!((r, k.len()), (0, 3));
    }

    #[test]
    fn context_mismatch() {
        let f5 = FieldCtx::prime(5).unwrap();
        let q = FieldCtx::rational();
        assert!(Matrix::from_rows(&f5, 1, vec![vec![q.one()]]).is_err());
        let a = Matrix::zeros(&f5, 1, 1);
        let b = Matrix::zeros(&FieldCtx::prime(7).unwrap(), 1, 1);
        assert!(a.vstack(&b).is_err());
    }

    #[test]
    fn kernels_annihilate_and_ranks_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fields = [
            FieldCtx::prime(2).unwrap(),
            FieldCtx::prime(7).unwrap(),
            FieldCtx::extension(3, 2).unwrap(),
            FieldCtx::rational(),
        ];
        for ctx in &fields {
            for _ in 0..30 {
                let r = rng.gen_range(1..7);
                let c = rng.gen_range(1..7);
                // low-rank products to exercise nontrivial kernels
                let k = rng.gen_range(1..4);
                let m = random_matrix(ctx, r, k, &mut rng)
                    .mul(&random_matrix(ctx, k, c, &mut rng))
                    .unwrap();
                let (rank, ker) = m.rank_kernel();
                assert_eq!(rank + ker.len(), c);
                assert_eq!(rank, m.transpose().rank());
                for v in &ker {
                    assert!(m.mul_vec(v).unwrap().iter().all(|x| ctx.is_zero(x)));
                }
            }
        }
    }

    use rand::Rng;

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn cofactor(ctx: &FieldCtx, m: &Matrix) -> Scalar {
            let n = m.rows();
            if n == 1 {
                return m.get(0, 0).clone();
            }
            let mut acc = ctx.zero();
            for j in 0..n {
                let rows = (1..n)
                    .map(|i| (0..n).filter(|&c| c != j).map(|c| m.get(i, c).clone()).collect())
                    .collect();
                let minor = Matrix::from_rows(ctx, n - 1, rows).unwrap();
                let term = ctx.mul(m.get(0, j), &cofactor(ctx, &minor));
                acc = if j % 2 == 0 { ctx.add(&acc, &term) } else { ctx.sub(&acc, &term) };
            }
            acc
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ctx in [FieldCtx::prime(11).unwrap(), FieldCtx::extension(2, 3).unwrap(), FieldCtx::rational()] {
            for n in 1..5 {
                for _ in 0..10 {
                    let mut m = random_matrix(&ctx, n, n, &mut rng);
                    if ctx.is_rational() {
                        m.set(0, 0, ctx.from_rational(rng.gen_range(-5..5), rng.gen_range(1..4)).unwrap());
                    }
                    assert_eq!(m.det().unwrap(), cofactor(&ctx, &m));
                }
            }
        }
    }

    #[test]
    fn vandermonde_rank_over_f7() {
        let f7 = FieldCtx::prime(7).unwrap();
        for a in 0..7u64 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    for d in c + 1..7 {
                        let rows = [a, b, c, d]
                            .iter()
                            .map(|&x| (0..4).map(|e| f7.pow(&Scalar::Fq(x), e)).collect())
                            .collect();
                        let m = Matrix::from_rows(&f7, 4, rows).unwrap();
                        assert!(!f7.is_zero(&m.det().unwrap()));
                        assert_eq!(m.rank(), 4);
                    }
                }
            }
        }
    }
}
