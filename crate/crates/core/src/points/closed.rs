//! Closed points of `P^n` over a finite field, as Frobenius orbits.

use crate::ff::{Embedding, FfError, FieldCtx, Scalar};

use super::{rational_points, PointsError, ProjPoint};

/// Closed points of exact degree `degree` over `base`, each given by the
/// lexicographically least (packed coordinates) point of its orbit in
/// `P^n(ext)`, `ext` the degree-`degree` extension of `base`.
#[derive(Clone, Debug)]
pub struct ClosedPoints {
    pub base: FieldCtx,
    pub ext: FieldCtx,
    pub embedding: Embedding,
    pub degree: u32,
    pub reps: Vec<ProjPoint>,
}

/// The extension of `base` of relative degree `j`.
pub fn extension_of(base: &FieldCtx, j: u32) -> Result<FieldCtx, FfError> {
    if base.is_rational() {
        return Err(FfError::Unsupported("extensions of Q".into()));
    }
    if j == 1 {
        return Ok(base.clone());
    }
    FieldCtx::extension(base.characteristic(), base.degree() * j)
}

/// `x -> x^q` applied coordinatewise.
pub fn frobenius(p: &ProjPoint, q: u64) -> ProjPoint {
    let ctx = p.ctx();
    let coords: Vec<Scalar> = p.coords().iter().map(|c| ctx.pow(c, q)).collect();
    ProjPoint::new(ctx, coords).expect("Frobenius preserves nonzero vectors")
}

/// The orbit `p, F(p), F^2(p), ...` until it closes up.
pub fn orbit(p: &ProjPoint, q: u64) -> Vec<ProjPoint> {
    let mut out = vec![p.clone()];
    loop {
        let next = frobenius(out.last().unwrap(), q);
        if next == *p {
            return out;
        }
        out.push(next);
    }
}

fn packed(p: &ProjPoint) -> Vec<u64> {
    p.coords().iter().map(|c| c.as_fq().expect("finite field point")).collect()
}

pub fn closed_points(base: &FieldCtx, n: usize, degree: u32) -> Result<ClosedPoints, PointsError> {
    let q = base.order().ok_or_else(|| PointsError::Hypothesis("closed points over Q".into()))?;
    if degree == 0 {
        return Err(PointsError::Hypothesis("closed points have degree >= 1".into()));
    }
    let ext = extension_of(base, degree)?;
    let embedding = base.embedding(&ext)?;
    let mut reps = Vec::new();
    for p in rational_points(&ext, n)? {
        let key = packed(&p);
        let mut cur = p.clone();
        let mut size = 1u32;
        let mut least = true;
        loop {
            cur = frobenius(&cur, q);
            if cur == p {
                break;
            }
            size += 1;
            if packed(&cur) < key {
                least = false;
                break;
            }
        }
        if least && size == degree {
            reps.push(p);
        }
    }
    Ok(ClosedPoints { base: base.clone(), ext, embedding, degree, reps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_point_counts_match_moebius() {
        // P^2 over F_2: 7, 7, 22 closed points of degree 1, 2, 3
        let f = FieldCtx::prime(2).unwrap();
        let counts: Vec<usize> = (1..=3).map(|j| closed_points(&f, 2, j).unwrap().reps.len()).collect();
        assert_eq!(counts, vec![7, 7, 22]);
        let f4 = FieldCtx::finite(4).unwrap();
        // P^1 over F_4: (16 - 4) / 2 = 6 points of degree 2
        assert_eq!(closed_points(&f4, 1, 2).unwrap().reps.len(), 6);
        let c = closed_points(&f, 1, 3).unwrap();
        for r in &c.reps {
            assert_eq!(orbit(r, 2).len(), 3);
        }
    }
}
