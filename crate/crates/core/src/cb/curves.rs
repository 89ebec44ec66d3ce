//! Curve certificates: plane curves, cone pairs from the projection
//! induction, and the decomposition of jet-defective sets along curves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ff::{FieldCtx, HomForm, Scalar};
use crate::points::{
    cone_build_multi, cone_intersect_degree, h1_ideal_sq, linear_project, Cone, PointSet, PointsError, ProjPoint,
};
use crate::rng;

use super::{forms_through, half_degree_cb, min_hypersurface_degree, min_plane_curve_degree, plane_curves_through, CbError};

const CENTER_DRAWS: usize = 64;

#[derive(Clone, Debug)]
pub enum CurveKind {
    PlaneForm(HomForm),
    ConePair(Box<Cone>, Box<Cone>),
    /// The common zero locus of a list of forms.
    Forms(Vec<HomForm>),
    Union(Vec<CurveCertificate>),
}

/// A curve (given by equations) together with the points of `Z` it was
/// verified to contain.
#[derive(Clone, Debug)]
pub struct CurveCertificate {
    pub kind: CurveKind,
    pub claimed_degree: u64,
    pub contained_subset: PointSet,
}

impl CurveKind {
    /// Equations of each irreducible-or-not piece; a point lies on the
    /// curve when it satisfies every form of at least one piece.
    fn pieces(&self) -> Vec<Vec<HomForm>> {
        match self {
            CurveKind::PlaneForm(f) => vec![vec![f.clone()]],
            CurveKind::ConePair(a, b) => {
                vec![a.pulled_back_forms.iter().chain(&b.pulled_back_forms).cloned().collect()]
            }
            CurveKind::Forms(fs) => vec![fs.clone()],
            CurveKind::Union(parts) => parts.iter().flat_map(|c| c.kind.pieces()).collect(),
        }
    }
}

impl CurveCertificate {
    /// Builds a certificate after checking every point of `subset` lies on
    /// the curve.
    pub fn new(kind: CurveKind, claimed_degree: u64, subset: PointSet) -> Result<CurveCertificate, CbError> {
        let cert = CurveCertificate { kind, claimed_degree, contained_subset: subset };
        for p in cert.contained_subset.iter() {
            if !cert.contains(p)? {
                return Err(CbError::InternalInvariant(format!("certificate curve misses {p}")));
            }
        }
        Ok(cert)
    }

    pub fn contains(&self, p: &ProjPoint) -> Result<bool, CbError> {
        for piece in self.kind.pieces() {
            let mut all = true;
            for f in &piece {
                if !p.satisfies(f)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Every point of `Z` on the curve.
    pub fn restrict(&self, z: &PointSet) -> Result<PointSet, CbError> {
        let mut keep = Vec::new();
        for (i, p) in z.iter().enumerate() {
            if self.contains(p)? {
                keep.push(i);
            }
        }
        Ok(z.subset(&keep))
    }

    /// All defining forms, when the curve is a single piece.
    pub fn forms(&self) -> Option<Vec<HomForm>> {
        let mut pieces = self.kind.pieces();
        (pieces.len() == 1).then(|| pieces.remove(0))
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            kind: match &self.kind {
                CurveKind::PlaneForm(_) => "plane_form",
                CurveKind::ConePair(..) => "cone_pair",
                CurveKind::Forms(_) => "forms",
                CurveKind::Union(_) => "union",
            }
            .into(),
            claimed_degree: self.claimed_degree,
            pieces: self.kind.pieces().iter().map(|p| p.iter().map(|f| f.to_string()).collect()).collect(),
            contained: self.contained_subset.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub kind: String,
    pub claimed_degree: u64,
    /// Each piece is a list of equations.
    pub pieces: Vec<Vec<String>>,
    pub contained: usize,
}

fn random_point<R: Rng>(ctx: &FieldCtx, n: usize, rng: &mut R) -> Option<ProjPoint> {
    let coords: Vec<Scalar> = (0..=n).map(|_| ctx.random(rng)).collect();
    ProjPoint::new(ctx, coords).ok()
}

/// A center off `Z` and off every secant line of `Z`.
fn draw_center<R: Rng>(z: &PointSet, h: &HomForm, rng: &mut R) -> Result<ProjPoint, CbError> {
    for _ in 0..CENTER_DRAWS {
        let Some(p) = random_point(z.ctx(), z.n(), rng) else { continue };
        match linear_project(z, &p, h) {
            Ok(_) => return Ok(p),
            Err(PointsError::ProjectionNotReduced(_) | PointsError::InvalidCenter(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(CbError::InsufficientField(format!(
        "no projection center off the secants of {} points in P^{} over {} after {CENTER_DRAWS} draws",
        z.len(),
        z.n(),
        z.ctx()
    )))
}

/// The line through two points, as the `n - 1` linear forms vanishing on it.
fn line_through(z: &PointSet) -> Result<CurveCertificate, CbError> {
    let forms = forms_through(z, 1)?;
    CurveCertificate::new(CurveKind::Forms(forms), 1, z.clone())
}

fn search<R: Rng>(z: &PointSet, e_max: u32, rng: &mut R) -> Result<Option<CurveCertificate>, CbError> {
    if z.len() <= 2 {
        return line_through(z).map(Some);
    }
    if z.n() == 2 {
        let e = min_plane_curve_degree(z)?;
        if e > e_max {
            return Ok(None);
        }
        let f = plane_curves_through(z, e)?.remove(0);
        return CurveCertificate::new(CurveKind::PlaneForm(f), e as u64, z.clone()).map(Some);
    }
    let ctx = z.ctx();
    let mut h = None;
    let mut centers = Vec::new();
    for _ in 0..CENTER_DRAWS {
        let coeffs: Vec<Scalar> = (0..=z.n()).map(|_| ctx.random(rng)).collect();
        if coeffs.iter().all(|c| ctx.is_zero(c)) {
            continue;
        }
        let cand = HomForm::linear(ctx, &coeffs)?;
        let p1 = draw_center(z, &cand, rng)?;
        let p2 = draw_center(z, &cand, rng)?;
        if p1 != p2 {
            h = Some(cand);
            centers = vec![p1, p2];
            break;
        }
    }
    let h = h.ok_or_else(|| CbError::InsufficientField("could not find two distinct projection centers".into()))?;
    let mut cones = Vec::new();
    for p in &centers {
        let proj = linear_project(z, p, &h)?;
        let Some(sub) = search(&proj.image, e_max, rng)? else {
            return Ok(None);
        };
        let base = sub
            .forms()
            .ok_or_else(|| CbError::InternalInvariant("projection certificate has several pieces".into()))?;
        cones.push(cone_build_multi(p, &h, &base, sub.claimed_degree)?);
    }
    let c2 = cones.pop().unwrap();
    let c1 = cones.pop().unwrap();
    let degree = cone_intersect_degree(&c1, &c2)?;
    CurveCertificate::new(CurveKind::ConePair(Box::new(c1), Box::new(c2)), degree, z.clone()).map(Some)
}

/// Finds a curve through `Z` by projecting from two generic centers,
/// recursing down to plane curves of degree at most `e_max`, and
/// intersecting the two resulting cones.
pub fn find_curve_cone_projection(z: &PointSet, e_max: u32, seed: u64) -> Result<Option<CurveCertificate>, CbError> {
    if z.len() < 2 {
        return Err(CbError::Degenerate("curve search needs at least two points".into()));
    }
    let mut rng = rng::stream(seed, "cone-projection");
    search(z, e_max, &mut rng)
}

/// A curve through `Z`: the minimal-degree plane curve for `n = 2`, the
/// cone construction otherwise, falling back to all minimal-degree
/// hypersurfaces through `Z`.
fn curve_through(z: &PointSet, e_max: u32, seed: u64) -> Result<CurveCertificate, CbError> {
    if z.len() <= 2 {
        return line_through(z);
    }
    if z.n() == 2 {
        let e = min_plane_curve_degree(z)?;
        let f = plane_curves_through(z, e)?.remove(0);
        return CurveCertificate::new(CurveKind::PlaneForm(f), e as u64, z.clone());
    }
    if let Some(c) = find_curve_cone_projection(z, e_max, seed)? {
        return Ok(c);
    }
    let e = min_hypersurface_degree(z)?;
    let forms = forms_through(z, e)?;
    CurveCertificate::new(CurveKind::Forms(forms), (e as u64).pow(z.n() as u32 - 1), z.clone())
}

#[derive(Clone, Debug)]
pub struct ContcurveOptions {
    /// Runs with `d < regime_factor * e_max` are allowed but flagged.
    pub regime_factor: u32,
    pub seed: u64,
}

impl Default for ContcurveOptions {
    fn default() -> Self {
        ContcurveOptions { regime_factor: 10, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ContcurveResult {
    pub certificate: CurveCertificate,
    pub subset: PointSet,
    pub defect: usize,
    pub in_regime: bool,
    pub iterations: usize,
}

fn union_of(parts: Vec<CurveCertificate>, z: &PointSet) -> Result<CurveCertificate, CbError> {
    let degree = parts.iter().map(|c| c.claimed_degree).sum();
    let kind = if parts.len() == 1 { parts[0].kind.clone() } else { CurveKind::Union(parts) };
    let probe = CurveCertificate { kind, claimed_degree: degree, contained_subset: z.clone() };
    let on = probe.restrict(z)?;
    CurveCertificate::new(probe.kind, degree, on)
}

/// Splits off the part of `Z` carrying its jet defect: a subset `Z'` on a
/// curve with `h^1(I^2_Z(d)) = h^1(I^2_{Z'}(d))`.
pub fn contcurve_decompose(
    z: &PointSet,
    d: u32,
    e_max: u32,
    opts: &ContcurveOptions,
) -> Result<Option<ContcurveResult>, CbError> {
    let l = h1_ideal_sq(z, d)?;
    if l == 0 {
        return Ok(None);
    }
    let in_regime = d >= opts.regime_factor.saturating_mul(e_max);
    let core = half_degree_cb(z, d)?.expect("positive defect yields a core");
    let mut parts = vec![curve_through(&core, e_max, rng::derive_indexed(opts.seed, "contcurve", 0))?];
    let mut cert = union_of(parts.clone(), z)?;
    for iteration in 1..=z.len() {
        let on = cert.contained_subset.clone();
        if h1_ideal_sq(&on, d)? == l {
            return Ok(Some(ContcurveResult { certificate: cert, subset: on, defect: l, in_regime, iterations: iteration }));
        }
        let rest = z.difference(&on);
        let shrink = 2 * cert.claimed_degree;
        let residual_core = if (d as u64) >= shrink + 2 {
            half_degree_cb(&rest, d - shrink as u32)?
        } else {
            None
        };
        let seed = rng::derive_indexed(opts.seed, "contcurve", iteration as u64);
        let mut extra = match residual_core {
            Some(core) => curve_through(&core, e_max, seed)?,
            None => curve_through(&rest, e_max, seed)?,
        };
        let mut next = parts.clone();
        next.push(extra.clone());
        let mut grown = union_of(next.clone(), z)?;
        if grown.contained_subset.len() == on.len() {
            extra = curve_through(&rest, e_max, seed)?;
            next = parts.clone();
            next.push(extra);
            grown = union_of(next.clone(), z)?;
            if grown.contained_subset.len() == on.len() {
                return Err(CbError::InternalInvariant("curve decomposition made no progress".into()));
            }
        }
        parts = next;
        cert = grown;
    }
    Err(CbError::InternalInvariant(format!("decomposition exceeded {} iterations", z.len())))
}
