//! Linear projection from a point onto a hyperplane.

use crate::ff::{HomForm, Scalar};

use super::{PointSet, PointsError, ProjPoint};

/// A projection `P^n --> H = P^{n-1}` from a center off `H`. The target
/// hyperplane is coordinatized by every coordinate except `dropped`, the
/// last index where the hyperplane's equation is nonzero.
#[derive(Clone, Debug)]
pub struct Projection {
    pub center: ProjPoint,
    pub hyperplane: HomForm,
    pub dropped: usize,
    /// Linear forms on `P^n` giving the image coordinates.
    pub coordinate_forms: Vec<HomForm>,
    pub image: PointSet,
}

/// The coordinate forms `x -> H(P) x_k - H(x) P_k`, `k != t`.
pub(crate) fn projection_forms(center: &ProjPoint, h: &HomForm) -> Result<(usize, Vec<HomForm>), PointsError> {
    let ctx = center.ctx();
    if h.d() != 1 || h.n() != center.n() || h.ctx() != ctx {
        return Err(PointsError::Dimension("hyperplane must be a linear form on the same P^n".into()));
    }
    let hp = h.evaluate(center.coords())?;
    if ctx.is_zero(&hp) {
        return Err(PointsError::InvalidCenter(format!("{center} lies on the hyperplane {h}")));
    }
    let n = center.n();
    let hc = h.coeffs();
    let t = (0..=n).rev().find(|&i| !ctx.is_zero(&hc[i])).ok_or_else(|| PointsError::InvalidCenter("zero hyperplane".into()))?;
    let forms = (0..=n)
        .filter(|&k| k != t)
        .map(|k| {
            let coeffs: Vec<Scalar> = (0..=n)
                .map(|j| {
                    let diag = if j == k { hp.clone() } else { ctx.zero() };
                    ctx.sub(&diag, &ctx.mul(&hc[j], &center.coords()[k]))
                })
                .collect();
            HomForm::linear(ctx, &coeffs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((t, forms))
}

pub(crate) fn apply_forms(forms: &[HomForm], q: &ProjPoint) -> Result<ProjPoint, PointsError> {
    let coords = forms.iter().map(|f| f.evaluate(q.coords())).collect::<Result<Vec<_>, _>>()?;
    ProjPoint::new(q.ctx(), coords)
}

/// Projects `Z` from `center` onto the hyperplane `h`.
pub fn linear_project(z: &PointSet, center: &ProjPoint, h: &HomForm) -> Result<Projection, PointsError> {
    if z.contains(center) {
        return Err(PointsError::InvalidCenter(format!("{center} belongs to Z")));
    }
    let (dropped, forms) = projection_forms(center, h)?;
    let mut images: Vec<ProjPoint> = Vec::with_capacity(z.len());
    for q in z.iter() {
        let img = apply_forms(&forms, q)?;
        if let Some(j) = images.iter().position(|p| *p == img) {
            return Err(PointsError::ProjectionNotReduced(format!(
                "{center} lies on the line through {} and {q}",
                z.points()[j]
            )));
        }
        images.push(img);
    }
    let image = PointSet::new(z.ctx(), z.n() - 1, images)?;
    Ok(Projection { center: center.clone(), hyperplane: h.clone(), dropped, coordinate_forms: forms, image })
}

impl Projection {
    /// Pulls a form on the target `P^{n-1}` back to the cone over its zero
    /// locus with apex at the center.
    pub fn pull_back(&self, g: &HomForm) -> Result<HomForm, PointsError> {
        Ok(g.compose(&self.coordinate_forms)?)
    }

    pub fn map_point(&self, q: &ProjPoint) -> Result<ProjPoint, PointsError> {
        apply_forms(&self.coordinate_forms, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;

    #[test]
    fn projection_examples() {
        let f = FieldCtx::prime(7).unwrap();
        let z = PointSet::from_int_rows(&f, &[&[1, 1, 1, 1]]).unwrap();
        let p = ProjPoint::from_ints(&f, &[0, 0, 0, 1]).unwrap();
        let h = HomForm::linear(&f, &[f.zero(), f.zero(), f.zero(), f.one()]).unwrap();
        let pr = linear_project(&z, &p, &h).unwrap();
        assert_eq!(pr.image, PointSet::from_int_rows(&f, &[&[1, 1, 1]]).unwrap());

        let bad = PointSet::from_int_rows(&f, &[&[1, 0, 0, 0], &[1, 0, 0, 1]]).unwrap();
        assert!(matches!(linear_project(&bad, &p, &h), Err(PointsError::ProjectionNotReduced(_))));
        let on_h = ProjPoint::from_ints(&f, &[1, 2, 3, 0]).unwrap();
        assert!(matches!(linear_project(&z, &on_h, &h), Err(PointsError::InvalidCenter(_))));
    }

    #[test]
    fn pull_back_vanishes_on_lines_through_center() {
        let f = FieldCtx::prime(11).unwrap();
        let p = ProjPoint::from_ints(&f, &[1, 2, 3, 4]).unwrap();
        let h = HomForm::linear(&f, &[f.one(), f.zero(), f.one(), f.zero()]).unwrap();
        let z = PointSet::from_int_rows(&f, &[&[1, 0, 5, 0]]).unwrap();
        let pr = linear_project(&z, &p, &h).unwrap();
        // the conic (c1 x0 - c0 x1) x2 through the image point
        let img = &pr.image.points()[0];
        let c = img.coords();
        let l = HomForm::linear(&f, &[c[1].clone(), f.neg(&c[0]), f.zero()]).unwrap();
        let x2 = HomForm::linear(&f, &[f.zero(), f.zero(), f.one()]).unwrap();
        let g = l.mul(&x2).unwrap();
        assert!(img.satisfies(&g).unwrap());
        let cone = pr.pull_back(&g).unwrap();
        for t in 0..11 {
            let q = z.points()[0].coords();
            let pt: Vec<Scalar> = (0..4).map(|i| f.add(&q[i], &f.mul(&f.from_i64(t), &p.coords()[i]))).collect();
            assert!(f.is_zero(&cone.evaluate(&pt).unwrap()));
        }
    }
}
