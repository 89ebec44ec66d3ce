//! Projective point sets, evaluation and jet matrices, projections and
//! cones.

mod closed;
mod cone;
mod io;
mod projection;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ff::{binomial, Embedding, FfError, FieldCtx, HomForm, Matrix, MonomialBasis, Scalar};

pub use closed::{closed_points, extension_of, frobenius, orbit, ClosedPoints};
pub use cone::{cone_build, cone_build_multi, cone_intersect_degree, Cone};
pub use io::{parse_point_file, read_point_file, write_point_file};
pub use projection::{linear_project, Projection};

#[derive(Debug, thiserror::Error)]
pub enum PointsError {
    #[error(transparent)]
    Field(#[from] FfError),
    #[error("point set contains a repeated point: {0}")]
    DuplicatePoint(String),
    #[error("projection is not reduced: {0}")]
    ProjectionNotReduced(String),
    #[error("invalid projection center: {0}")]
    InvalidCenter(String),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A point of `P^n`, normalized so its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    ctx: FieldCtx,
    coords: Vec<Scalar>,
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, coords: Vec<Scalar>) -> Result<ProjPoint, PointsError> {
        if coords.len() < 2 {
            return Err(PointsError::Dimension("a projective point needs at least 2 coordinates".into()));
        }
        for c in &coords {
            ctx.check(c)?;
        }
        let i0 = coords.iter().position(|c| !ctx.is_zero(c)).ok_or(FfError::InvalidPoint)?;
        let inv = ctx.inv(&coords[i0])?;
        let coords = coords.iter().map(|c| ctx.mul(c, &inv)).collect();
        Ok(ProjPoint { ctx: ctx.clone(), coords })
    }

    pub fn from_ints(ctx: &FieldCtx, coords: &[i64]) -> Result<ProjPoint, PointsError> {
        ProjPoint::new(ctx, coords.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    /// The coordinate point `e_i` of `P^n`.
    pub fn basis(ctx: &FieldCtx, n: usize, i: usize) -> ProjPoint {
        let mut c = vec![ctx.zero(); n + 1];
        c[i] = ctx.one();
        ProjPoint { ctx: ctx.clone(), coords: c }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Index of the first nonzero (hence unit) coordinate.
    pub fn chart(&self) -> usize {
        self.coords.iter().position(|c| !self.ctx.is_zero(c)).unwrap()
    }

    pub fn lift(&self, emb: &Embedding) -> ProjPoint {
        ProjPoint { ctx: emb.target().clone(), coords: self.coords.iter().map(|c| emb.apply(c)).collect() }
    }

    /// Whether the form vanishes here (context and dimension must match).
    pub fn satisfies(&self, f: &HomForm) -> Result<bool, PointsError> {
        Ok(self.ctx.is_zero(&f.evaluate(&self.coords)?))
    }
}

/// A list of pairwise distinct points of `P^n` over one field.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    ctx: FieldCtx,
    n: usize,
    points: Vec<ProjPoint>,
}

impl PointSet {
    pub fn new(ctx: &FieldCtx, n: usize, points: Vec<ProjPoint>) -> Result<PointSet, PointsError> {
        let mut seen = std::collections::HashSet::new();
        for p in &points {
            if p.ctx() != ctx {
                return Err(FfError::ContextMismatch(format!("point over {} in a set over {ctx}", p.ctx())).into());
            }
            if p.n() != n {
                return Err(PointsError::Dimension(format!("point of P^{} in a set in P^{n}", p.n())));
            }
            if !seen.insert(p.coords.clone()) {
                return Err(PointsError::DuplicatePoint(p.to_string()));
            }
        }
        Ok(PointSet { ctx: ctx.clone(), n, points })
    }

    /// Builds a set from points over possibly different finite fields by
    /// lifting everything into their compositum.
    pub fn from_mixed(points: Vec<ProjPoint>) -> Result<PointSet, PointsError> {
        let first = points.first().ok_or_else(|| PointsError::Dimension("empty point list".into()))?;
        let n = first.n();
        let mut ctx = first.ctx().clone();
        for p in &points {
            ctx = ctx.compositum(p.ctx())?;
        }
        let lifted = points
            .iter()
            .map(|p| Ok(p.lift(&p.ctx().embedding(&ctx)?)))
            .collect::<Result<Vec<_>, PointsError>>()?;
        PointSet::new(&ctx, n, lifted)
    }

    pub fn from_int_rows(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<PointSet, PointsError> {
        let n = rows.first().map(|r| r.len()).unwrap_or(1).saturating_sub(1);
        let pts = rows.iter().map(|r| ProjPoint::from_ints(ctx, r)).collect::<Result<Vec<_>, _>>()?;
        PointSet::new(ctx, n, pts)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProjPoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.contains(p)
    }

    pub fn without(&self, i: usize) -> PointSet {
        let mut points = self.points.clone();
        points.remove(i);
        PointSet { ctx: self.ctx.clone(), n: self.n, points }
    }

    pub fn subset(&self, idx: &[usize]) -> PointSet {
        PointSet { ctx: self.ctx.clone(), n: self.n, points: idx.iter().map(|&i| self.points[i].clone()).collect() }
    }

    /// Points satisfying a predicate, in order.
    pub fn filter(&self, mut keep: impl FnMut(&ProjPoint) -> bool) -> PointSet {
        PointSet {
            ctx: self.ctx.clone(),
            n: self.n,
            points: self.points.iter().filter(|p| keep(p)).cloned().collect(),
        }
    }

    /// Union keeping first occurrences.
    pub fn union(&self, other: &PointSet) -> Result<PointSet, PointsError> {
        let mut points = self.points.clone();
        for p in &other.points {
            if !points.contains(p) {
                points.push(p.clone());
            }
        }
        PointSet::new(&self.ctx, self.n, points)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        self.filter(|p| !other.contains(p))
    }

    pub fn lift(&self, emb: &Embedding) -> PointSet {
        PointSet { ctx: emb.target().clone(), n: self.n, points: self.points.iter().map(|p| p.lift(emb)).collect() }
    }

    /// Applies a projective linear map `x -> g x`.
    pub fn transform(&self, g: &Matrix) -> Result<PointSet, PointsError> {
        let pts = self
            .points
            .iter()
            .map(|p| ProjPoint::new(&self.ctx, g.mul_vec(&p.coords)?))
            .collect::<Result<Vec<_>, _>>()?;
        PointSet::new(&self.ctx, self.n, pts)
    }
}

/// `|Z| x C(n+d, n)` matrix of monomial values.
pub fn evaluation_matrix(z: &PointSet, d: u32) -> Result<Matrix, PointsError> {
    let basis = MonomialBasis::new(z.n, d)?;
    let rows = z.points.iter().map(|p| basis.values_at(&z.ctx, &p.coords)).collect();
    Ok(Matrix::from_rows(&z.ctx, basis.len(), rows)?)
}

/// For each point (normalized at its chart index `i0`), one row of values
/// and one row of each partial `d/dx_j`, `j != i0`, in increasing `j`.
pub fn jet_matrix(z: &PointSet, d: u32) -> Result<Matrix, PointsError> {
    let basis = MonomialBasis::new(z.n, d)?;
    let f = &z.ctx;
    let mut rows = Vec::with_capacity(z.len() * (z.n + 1));
    for p in &z.points {
        let powers: Vec<Vec<Scalar>> = p
            .coords
            .iter()
            .map(|x| {
                let mut r = vec![f.one()];
                for k in 1..=d as usize {
                    let next = f.mul(&r[k - 1], x);
                    r.push(next);
                }
                r
            })
            .collect();
        let mono = |e: &[u32]| {
            e.iter()
                .enumerate()
                .fold(f.one(), |acc, (i, &k)| f.mul(&acc, &powers[i][k as usize]))
        };
        rows.push(basis.exponents().iter().map(|e| mono(e)).collect());
        let i0 = p.chart();
        for j in (0..=z.n).filter(|&j| j != i0) {
            let row = basis
                .exponents()
                .iter()
                .map(|e| {
                    if e[j] == 0 {
                        return f.zero();
                    }
                    let mut e2 = e.clone();
                    e2[j] -= 1;
                    f.mul(&f.from_count(e[j] as u64), &mono(&e2))
                })
                .collect();
            rows.push(row);
        }
    }
    Ok(Matrix::from_rows(f, basis.len(), rows)?)
}

/// `h^1(I_Z(d)) = |Z| - rank`.
pub fn h1_ideal(z: &PointSet, d: u32) -> Result<usize, PointsError> {
    Ok(z.len() - evaluation_matrix(z, d)?.rank())
}

/// `h^1(I_Z^2(d)) = (n+1)|Z| - rank` of the jet matrix.
pub fn h1_ideal_sq(z: &PointSet, d: u32) -> Result<usize, PointsError> {
    Ok((z.n + 1) * z.len() - jet_matrix(z, d)?.rank())
}

fn coordinate_matrix(z: &PointSet) -> Result<Matrix, PointsError> {
    Ok(Matrix::from_rows(&z.ctx, z.n + 1, z.points.iter().map(|p| p.coords.clone()).collect())?)
}

/// Dimension of the smallest linear subspace containing `Z`.
pub fn projective_hull_dim(z: &PointSet) -> Result<usize, PointsError> {
    if z.is_empty() {
        return Err(PointsError::Hypothesis("projective hull of the empty set".into()));
    }
    Ok(coordinate_matrix(z)?.rank() - 1)
}

/// Measured jet codimension against the bound `(m+1)(n+1) + n - 1`, where
/// `m` is the hull dimension.
pub fn jet_codim_check(z: &PointSet, d: u32) -> Result<(usize, usize), PointsError> {
    if d < 3 {
        return Err(PointsError::Hypothesis(format!("degree {d} < 3")));
    }
    let m = projective_hull_dim(z)?;
    if z.len() < m + 2 {
        return Err(PointsError::Hypothesis(format!("|Z| = {} < m + 2 = {}", z.len(), m + 2)));
    }
    let measured = jet_matrix(z, d)?.rank();
    Ok((measured, (m + 1) * (z.n + 1) + z.n - 1))
}

/// `h^0(N(C), O(d)) = C(d+2, 2) - C(d-2e+2, 2)` for a plane curve of degree `e`.
pub fn h0_neighborhood_plane_curve(e: u32, d: u32) -> u64 {
    let all = binomial(d as u64 + 2, 2).unwrap();
    let sq = if d >= 2 * e { binomial((d - 2 * e) as u64 + 2, 2).unwrap() } else { 0 };
    all - sq
}

/// Same quantity computed by rank: the codimension in `H^0(O(d))` of the
/// multiples of `g^2`, for a plane curve form `g`.
pub fn h0_neighborhood_by_rank(g: &HomForm, d: u32) -> Result<usize, PointsError> {
    let n = g.n();
    let all = MonomialBasis::new(n, d)?.len();
    let e2 = 2 * g.d();
    if d < e2 {
        return Ok(all);
    }
    let sq = g.mul(g)?;
    let shifts = MonomialBasis::new(n, d - e2)?;
    let rows = shifts
        .exponents()
        .iter()
        .map(|s| {
            let m = HomForm::from_terms(g.ctx(), n, d - e2, &[(s.clone(), g.ctx().one())])?;
            Ok(m.mul(&sq)?.coeffs().to_vec())
        })
        .collect::<Result<Vec<_>, PointsError>>()?;
    Ok(all - Matrix::from_rows(g.ctx(), all, rows)?.rank())
}

/// Points of `P^n(F_q)` in a fixed order: chart index ascending, then
/// packed coordinates.
pub fn rational_points(ctx: &FieldCtx, n: usize) -> Result<Vec<ProjPoint>, PointsError> {
    let q = ctx
        .order()
        .ok_or_else(|| PointsError::Hypothesis("rational points of P^n over Q".into()))?;
    let mut out = Vec::new();
    for lead in 0..=n {
        let free = n - lead;
        let total = q.checked_pow(free as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
            PointsError::Field(FfError::Capacity(format!("P^{n}(F_{q}) is too large to list")))
        })?;
        for idx in 0..total {
            let mut c = vec![ctx.zero(); n + 1];
            c[lead] = ctx.one();
            let mut r = idx;
            for k in (lead + 1..=n).rev() {
                c[k] = ctx.element(r % q);
                r /= q;
            }
            out.push(ProjPoint { ctx: ctx.clone(), coords: c });
        }
    }
    Ok(out)
}

/// Serializable form of a point set: field description plus coordinates
/// as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetDump {
    pub field: crate::ff::FieldKind,
    pub n: usize,
    pub points: Vec<Vec<String>>,
}

impl PointSet {
    pub fn dump(&self) -> PointSetDump {
        PointSetDump {
            field: self.ctx.kind().clone(),
            n: self.n,
            points: self.points.iter().map(|p| p.coords.iter().map(|c| c.to_string()).collect()).collect(),
        }
    }

    pub fn from_dump(d: &PointSetDump) -> Result<PointSet, PointsError> {
        let ctx = match &d.field {
            crate::ff::FieldKind::Prime { p } => FieldCtx::prime(*p)?,
            crate::ff::FieldKind::Extension { p, modulus, .. } => FieldCtx::extension_with_modulus(*p, modulus)?,
            crate::ff::FieldKind::Rational => FieldCtx::rational(),
        };
        let pts = d
            .points
            .iter()
            .map(|row| {
                let c = row.iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>, _>>()?;
                ProjPoint::new(&ctx, c)
            })
            .collect::<Result<Vec<_>, _>>()?;
        PointSet::new(&ctx, d.n, pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn collinear(ctx: &FieldCtx, k: usize) -> PointSet {
        let rows: Vec<Vec<i64>> = (0..k as i64).map(|t| vec![1, t, 0]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        PointSet::from_int_rows(ctx, &refs).unwrap()
    }

    #[test]
    fn normalization() {
        let f5 = FieldCtx::prime(5).unwrap();
        let p = ProjPoint::from_ints(&f5, &[0, 2, 4]).unwrap();
        assert_eq!(p.coords(), &[Scalar::Fq(0), Scalar::Fq(1), Scalar::Fq(2)]);
        assert_eq!(ProjPoint::new(&f5, p.coords().to_vec()).unwrap(), p);
        assert!(ProjPoint::from_ints(&f5, &[0, 0, 0]).is_err());
        let q = ProjPoint::from_ints(&f5, &[0, 1, 2]).unwrap();
        assert!(PointSet::new(&f5, 2, vec![p, q]).is_err());
    }

    #[test]
    fn evaluation_matrix_examples() {
        let f7 = FieldCtx::prime(7).unwrap();
        let z = PointSet::from_int_rows(&f7, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(evaluation_matrix(&z, 1).unwrap(), Matrix::identity(&f7, 3));
        assert_eq!(evaluation_matrix(&collinear(&f7, 4), 2).unwrap().rank(), 3);
        assert_eq!(evaluation_matrix(&collinear(&f7, 4), 0).unwrap().rank(), 1);
    }

    #[test]
    fn jet_examples() {
        let f = FieldCtx::prime(101).unwrap();
        let one = PointSet::from_int_rows(&f, &[&[3, 1, 4]]).unwrap();
        for d in 1..5 {
            assert_eq!(h1_ideal_sq(&one, d).unwrap(), 0);
        }
        assert_eq!(h1_ideal_sq(&collinear(&f, 5), 4).unwrap(), 6);
        assert_eq!(h1_ideal_sq(&collinear(&f, 5), 9).unwrap(), 0);
        for d in 1..6u32 {
            assert_eq!(h1_ideal(&collinear(&f, d as usize + 2), d).unwrap(), 1);
        }
    }

    #[test]
    fn collinear_jet_defect_formula_in_p3() {
        let f = FieldCtx::prime(10007).unwrap();
        for k in 1..7usize {
            let rows: Vec<Vec<i64>> = (0..k as i64).map(|t| vec![1, t, 2 * t, 0]).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let z = PointSet::from_int_rows(&f, &refs).unwrap();
            for d in 2..6i64 {
                let k = k as i64;
                let expect = (2 * k - d - 1).max(0) + 2 * (k - d).max(0);
                assert_eq!(h1_ideal_sq(&z, d as u32).unwrap() as i64, expect, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn complete_intersection_of_cubics() {
        // x(x-z)(x-2z) and y(y-z)(y-2z) meet in the 9 points [a:b:1]
        let f = FieldCtx::prime(13).unwrap();
        let rows: Vec<Vec<i64>> = (0..3).flat_map(|a| (0..3).map(move |b| vec![a, b, 1])).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let z = PointSet::from_int_rows(&f, &refs).unwrap();
        assert_eq!(h1_ideal(&z, 3).unwrap(), 1);
    }

    #[test]
    fn hull_dims() {
        let f = FieldCtx::prime(7).unwrap();
        let z = PointSet::from_int_rows(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(projective_hull_dim(&z).unwrap(), 2);
        assert_eq!(projective_hull_dim(&collinear(&f, 3)).unwrap(), 1);
    }

    #[test]
    fn jet_codim_examples() {
        let f = FieldCtx::prime(10007).unwrap();
        let z = PointSet::from_int_rows(&f, &[&[1, 0, 0], &[0, 1, 0], &[1, 5, 0]]).unwrap();
        let (measured, bound) = jet_codim_check(&z, 3).unwrap();
        assert_eq!(bound, 7);
        assert!(measured >= bound);
        assert!(matches!(jet_codim_check(&z, 2), Err(PointsError::Hypothesis(_))));
        for n in 2..=4usize {
            let mut rows: Vec<Vec<i64>> = (0..=n).map(|i| (0..=n).map(|j| (i == j) as i64).collect()).collect();
            rows.push((0..=n as i64).map(|j| 2 + 3 * j).collect());
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let z = PointSet::from_int_rows(&f, &refs).unwrap();
            let (measured, bound) = jet_codim_check(&z, 3).unwrap();
            assert_eq!(bound, (n + 1) * (n + 1) + n - 1);
            assert!(measured >= bound);
        }
    }

    #[test]
    fn neighborhood_dimensions() {
        assert_eq!(h0_neighborhood_plane_curve(1, 4), 9);
        assert_eq!(h0_neighborhood_plane_curve(2, 4), 14);
        assert_eq!(h0_neighborhood_plane_curve(2, 3), 10);
        let f = FieldCtx::prime(7).unwrap();
        let line = HomForm::from_int_terms(&f, 2, 1, &[(&[0, 0, 1], 1)]).unwrap();
        let conic = HomForm::from_int_terms(&f, 2, 2, &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]).unwrap();
        assert_eq!(h0_neighborhood_by_rank(&line, 4).unwrap(), 9);
        assert_eq!(h0_neighborhood_by_rank(&conic, 4).unwrap(), 14);
        assert_eq!(h0_neighborhood_by_rank(&conic, 3).unwrap(), 10);
        for d in 1..9 {
            assert_eq!(h0_neighborhood_plane_curve(1, d) as u32, 2 * d + 1);
        }
    }

    #[test]
    fn jet_rank_is_coordinate_invariant() {
        let f = FieldCtx::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let k = rng.gen_range(2..8);
            let z = collinear(&f, k);
            let g = loop {
                let rows = (0..3).map(|_| (0..3).map(|_| f.random(&mut rng)).collect()).collect();
                let g = Matrix::from_rows(&f, 3, rows).unwrap();
                if !f.is_zero(&g.det().unwrap()) {
                    break g;
                }
            };
            let moved = z.transform(&g).unwrap();
            let d = rng.gen_range(2..7);
            assert_eq!(jet_matrix(&z, d).unwrap().rank(), jet_matrix(&moved, d).unwrap().rank());
        }
    }

    #[test]
    fn rational_point_count() {
        let f = FieldCtx::prime(3).unwrap();
        assert_eq!(rational_points(&f, 2).unwrap().len(), 13);
    }

    #[test]
    fn dump_round_trip() {
        let f9 = FieldCtx::extension(3, 2).unwrap();
        let z = PointSet::new(
            &f9,
            1,
            vec![
                ProjPoint::new(&f9, vec![f9.one(), Scalar::Fq(5)]).unwrap(),
                ProjPoint::new(&f9, vec![f9.zero(), f9.one()]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(PointSet::from_dump(&z.dump()).unwrap(), z);
    }
}
