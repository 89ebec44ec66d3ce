//! Cones over curves in a hyperplane.

use crate::ff::HomForm;

use super::projection::projection_forms;
use super::{PointsError, ProjPoint};

#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: ProjPoint,
    pub hyperplane: HomForm,
    /// Forms on the hyperplane's `P^{n-1}` cutting out the base curve.
    pub base_forms: Vec<HomForm>,
    /// The same forms pulled back to `P^n`.
    pub pulled_back_forms: Vec<HomForm>,
    pub base_degree: u64,
}

impl Cone {
    pub fn contains(&self, q: &ProjPoint) -> Result<bool, PointsError> {
        for f in &self.pulled_back_forms {
            if !q.satisfies(f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn apex_check(apex: &ProjPoint, h: &HomForm) -> Result<(), PointsError> {
    if h.ctx() == apex.ctx() && h.n() == apex.n() && h.d() == 1 && apex.satisfies(h)? {
        return Err(PointsError::InvalidCone(format!("apex {apex} lies on the hyperplane {h}")));
    }
    Ok(())
}

/// Cone with apex `apex` over the plane curve `base_form = 0` inside the
/// hyperplane `h` (coordinatized as in [`super::linear_project`]).
pub fn cone_build(apex: &ProjPoint, h: &HomForm, base_form: &HomForm) -> Result<Cone, PointsError> {
    let degree = base_form.d() as u64;
    cone_build_multi(apex, h, std::slice::from_ref(base_form), degree)
}

/// Cone over the curve cut out by several forms, with a caller-supplied
/// degree for that curve.
pub fn cone_build_multi(apex: &ProjPoint, h: &HomForm, base_forms: &[HomForm], base_degree: u64) -> Result<Cone, PointsError> {
    apex_check(apex, h)?;
    let (_, coords) = projection_forms(apex, h)?;
    let pulled = base_forms
        .iter()
        .map(|g| {
            if g.n() + 1 != apex.n() {
                return Err(PointsError::Dimension(format!("base form on P^{} for a cone in P^{}", g.n(), apex.n())));
            }
            Ok(g.compose(&coords)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cone {
        apex: apex.clone(),
        hyperplane: h.clone(),
        base_forms: base_forms.to_vec(),
        pulled_back_forms: pulled,
        base_degree,
    })
}

/// Bezout bound `e_1 e_2` on the degree of the intersection of two cones
/// with distinct apexes.
pub fn cone_intersect_degree(c1: &Cone, c2: &Cone) -> Result<u64, PointsError> {
    if c1.apex == c2.apex {
        return Err(PointsError::InvalidCone("cones share their apex".into()));
    }
    Ok(c1.base_degree * c2.base_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{FieldCtx, Scalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conic_cone_vanishes_on_sampled_lines() {
        let f = FieldCtx::prime(101).unwrap();
        let apex = ProjPoint::from_ints(&f, &[0, 0, 0, 1]).unwrap();
        let h = HomForm::linear(&f, &[f.zero(), f.zero(), f.zero(), f.one()]).unwrap();
        // x0 x1 - x2^2 parametrized by [1 : s^2 : s]
        let conic = HomForm::from_int_terms(&f, 2, 2, &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]).unwrap();
        let cone = cone_build(&apex, &h, &conic).unwrap();
        assert_eq!(cone.pulled_back_forms[0].d(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s: i64 = rng.gen_range(0..101);
            let t: i64 = rng.gen_range(0..101);
            let pt: Vec<Scalar> = [1, s * s, s, t].iter().map(|&v| f.from_i64(v)).collect();
            assert!(cone.contains(&ProjPoint::new(&f, pt).unwrap()).unwrap());
        }
        let other = cone_build(&ProjPoint::from_ints(&f, &[1, 0, 0, 0]).unwrap(), &HomForm::linear(&f, &[f.one(), f.zero(), f.zero(), f.zero()]).unwrap(), &conic).unwrap();
        assert_eq!(cone_intersect_degree(&cone, &other).unwrap(), 4);
        assert!(cone_intersect_degree(&cone, &cone).is_err());
    }

    #[test]
    fn line_base_gives_plane_and_bad_apex_fails() {
        let f = FieldCtx::prime(7).unwrap();
        let apex = ProjPoint::from_ints(&f, &[0, 0, 0, 1]).unwrap();
        let h = HomForm::linear(&f, &[f.zero(), f.zero(), f.zero(), f.one()]).unwrap();
        let line = HomForm::linear(&f, &[f.one(), f.from_i64(2), f.zero()]).unwrap();
        let cone = cone_build(&apex, &h, &line).unwrap();
        assert_eq!(cone.pulled_back_forms[0].d(), 1);
        let on_h = ProjPoint::from_ints(&f, &[1, 0, 0, 0]).unwrap();
        assert!(matches!(cone_build(&on_h, &h, &line), Err(PointsError::InvalidCone(_))));
    }
}
