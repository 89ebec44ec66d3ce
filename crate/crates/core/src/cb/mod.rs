//! Cayley-Bacharach decisions, minimal CB subsets and the curve-finding
//! procedures built on them.

mod checks;
mod curves;
mod hunt;

use serde::{Deserialize, Serialize};

use crate::ff::{FfError, HomForm, Scalar};
use crate::points::{evaluation_matrix, h1_ideal, h1_ideal_sq, PointSet, PointsError, ProjPoint};

pub use checks::{lu_check, picoco_check, LuVerdict, PicocoVerdict};
pub use curves::{
    contcurve_decompose, find_curve_cone_projection, ContcurveOptions, ContcurveResult, CurveCertificate, CurveKind,
};
pub use checks::{min_linear_cover, picoco_bound_holds, LU_MAX_POINTS};
pub use curves::CertificateSummary;
pub use hunt::{
    conjecture_hunt, instance_is_cb, recheck_candidate, CheckTally, HuntCandidate, HuntConfig, HuntReport, MeasuredMinimum,
};

#[derive(Debug, thiserror::Error)]
pub enum CbError {
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("theorem violation: {message}\ninstance: {dump}")]
    TheoremViolation { message: String, dump: String },
    #[error("insufficient field: {0}; retry over a larger extension")]
    InsufficientField(String),
    #[error("internal invariant broken: {0}")]
    InternalInvariant(String),
    #[error("search budget exceeded: {0}")]
    SearchBudget(String),
    #[error("no curve found: {0}")]
    CurveNotFound(String),
}

impl From<FfError> for CbError {
    fn from(e: FfError) -> Self {
        CbError::Points(PointsError::Field(e))
    }
}

/// A form vanishing on `Z \ {p}` but not at `p`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub index: usize,
    pub point: ProjPoint,
    pub form: HomForm,
}

#[derive(Clone, Debug)]
pub struct CbVerdict {
    pub is_cb: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CbVerdictDump {
    pub is_cb: bool,
    pub witness_point: Option<Vec<String>>,
    pub witness_form: Option<String>,
}

impl CbVerdict {
    pub fn dump(&self) -> CbVerdictDump {
        CbVerdictDump {
            is_cb: self.is_cb,
            witness_point: self.witness.as_ref().map(|w| w.point.coords().iter().map(|c| c.to_string()).collect()),
            witness_form: self.witness.as_ref().map(|w| w.form.to_string()),
        }
    }
}

fn witness_checks(z: &PointSet, w: &Witness) -> Result<bool, CbError> {
    for (i, p) in z.iter().enumerate() {
        let vanishes = p.satisfies(&w.form)?;
        if vanishes == (i == w.index) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides whether `Z` is Cayley-Bacharach for `O(d)`: removing any single
/// point must leave the rank of the evaluation matrix unchanged.
pub fn is_cayley_bacharach(z: &PointSet, d: u32) -> Result<CbVerdict, CbError> {
    if z.len() < 2 {
        return Err(CbError::Degenerate(format!("|Z| = {} < 2", z.len())));
    }
    let m = evaluation_matrix(z, d)?;
    let full = m.rank();
    for i in 0..z.len() {
        let keep: Vec<usize> = (0..z.len()).filter(|&j| j != i).collect();
        let sub = m.select_rows(&keep);
        let (r, kernel) = sub.rank_kernel();
        if r == full {
            continue;
        }
        let p = &z.points()[i];
        for v in kernel {
            let form = HomForm::from_coeffs(z.ctx(), z.n(), d, v)?;
            if !p.satisfies(&form)? {
                let w = Witness { index: i, point: p.clone(), form };
                if !witness_checks(z, &w)? {
                    return Err(CbError::InternalInvariant("witness failed re-verification".into()));
                }
                return Ok(CbVerdict { is_cb: false, witness: Some(w) });
            }
        }
        return Err(CbError::InternalInvariant("rank dropped but no kernel vector separates the point".into()));
    }
    Ok(CbVerdict { is_cb: true, witness: None })
}

/// A subset of `Z` that is CB for `O(d)`, found by repeatedly discarding
/// points whose removal keeps `h^1(I(d))` positive. `None` when `Z`
/// imposes independent conditions.
pub fn minimal_cb_subset(z: &PointSet, d: u32) -> Result<Option<PointSet>, CbError> {
    let m = evaluation_matrix(z, d)?;
    if m.rank() == z.len() {
        return Ok(None);
    }
    let mut keep: Vec<usize> = (0..z.len()).collect();
    'outer: loop {
        for pos in 0..keep.len() {
            let mut trial = keep.clone();
            trial.remove(pos);
            if m.select_rows(&trial).rank() < trial.len() {
                keep = trial;
                continue 'outer;
            }
        }
        break;
    }
    Ok(Some(z.subset(&keep)))
}

fn instance_dump(z: &PointSet, d: u32) -> String {
    serde_json::json!({ "d": d, "points": z.dump() }).to_string()
}

/// If `Z` has a jet defect in degree `d`, returns a subset CB for
/// `O(ceil(d/2))`; reports a theorem violation if `h^1(I_Z(ceil(d/2)))`
/// vanishes.
pub fn half_degree_cb(z: &PointSet, d: u32) -> Result<Option<PointSet>, CbError> {
    if d < 2 {
        return Err(CbError::Degenerate(format!("degree {d} < 2")));
    }
    if h1_ideal_sq(z, d)? == 0 {
        return Ok(None);
    }
    let half = d.div_ceil(2);
    if h1_ideal(z, half)? == 0 {
        return Err(CbError::TheoremViolation {
            message: format!("h^1(I^2_Z({d})) != 0 but h^1(I_Z({half})) = 0"),
            dump: instance_dump(z, d),
        });
    }
    minimal_cb_subset(z, half)?
        .map(Some)
        .ok_or_else(|| CbError::InternalInvariant("positive h^1 but no CB subset".into()))
}

fn require_plane(z: &PointSet) -> Result<(), CbError> {
    if z.n() != 2 {
        return Err(CbError::Degenerate(format!("plane curve search needs P^2, got P^{}", z.n())));
    }
    Ok(())
}

/// Basis of the degree-`e` forms vanishing on `Z`.
pub fn forms_through(z: &PointSet, e: u32) -> Result<Vec<HomForm>, CbError> {
    let (_, kernel) = evaluation_matrix(z, e)?.rank_kernel();
    kernel
        .into_iter()
        .map(|v: Vec<Scalar>| Ok(HomForm::from_coeffs(z.ctx(), z.n(), e, v)?))
        .collect()
}

/// Basis of the plane curves of degree `e` through `Z`.
pub fn plane_curves_through(z: &PointSet, e: u32) -> Result<Vec<HomForm>, CbError> {
    require_plane(z)?;
    forms_through(z, e)
}

/// Smallest `e >= 1` with a degree-`e` form vanishing on `Z`.
pub fn min_hypersurface_degree(z: &PointSet) -> Result<u32, CbError> {
    let mut e = 1;
    loop {
        let m = evaluation_matrix(z, e)?;
        if m.rank() < m.cols() {
            return Ok(e);
        }
        e += 1;
    }
}

/// Smallest degree of a plane curve containing `Z`.
pub fn min_plane_curve_degree(z: &PointSet) -> Result<u32, CbError> {
    require_plane(z)?;
    min_hypersurface_degree(z)
}
