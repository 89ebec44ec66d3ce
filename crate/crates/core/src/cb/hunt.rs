//! Randomized search for CB sets violating either conjectural description.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ff::{FieldCtx, Matrix, Scalar};
use crate::points::{PointSet, PointSetDump, ProjPoint};
use crate::rng;

use super::checks::{lu_check, picoco_check, LuVerdict, PicocoVerdict, LU_MAX_POINTS};
use super::{is_cayley_bacharach, min_hypersurface_degree, minimal_cb_subset, CbError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HuntConfig {
    pub n: usize,
    pub q: u64,
    pub d_range: (u32, u32),
    pub e_range: (u32, u32),
    pub trials: usize,
    /// Relative weights of the curve, complete-intersection and closure
    /// generators.
    pub weights: [u32; 3],
    pub max_points: usize,
}

impl Default for HuntConfig {
    fn default() -> Self {
        HuntConfig { n: 2, q: 11, d_range: (3, 8), e_range: (1, 3), trials: 1000, weights: [1, 1, 1], max_points: 14 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    /// Hypothesis false.
    pub vacuous: usize,
    /// Hypothesis and conclusion both hold.
    pub verified: usize,
    /// Hypothesis holds but the conclusion failed or could not be decided.
    pub candidates: usize,
    /// No instance could be generated or the check errored.
    pub skipped: usize,
}

impl CheckTally {
    pub fn total(&self) -> usize {
        self.vacuous + self.verified + self.candidates + self.skipped
    }

    fn merge(&mut self, o: &CheckTally) {
        self.vacuous += o.vacuous;
        self.verified += o.verified;
        self.candidates += o.candidates;
        self.skipped += o.skipped;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntCandidate {
    pub trial: usize,
    pub generator: String,
    pub d: u32,
    pub e: u32,
    pub check: String,
    pub points: PointSetDump,
    pub verdict: serde_json::Value,
}

/// Smallest CB set seen for a given degree and minimal curve degree, with
/// the deficit `e d - |Z|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasuredMinimum {
    pub d: u32,
    pub curve_degree: u32,
    pub min_size: usize,
    pub deficit: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntReport {
    pub seed: u64,
    pub trials: usize,
    pub config: HuntConfig,
    /// Trials satisfying the hypothesis of at least one check.
    pub hypothesis_satisfied: usize,
    /// Trials whose satisfied hypotheses all led to verified conclusions.
    pub conclusion_verified: usize,
    pub picoco: CheckTally,
    pub lu: CheckTally,
    pub measured_minima: Vec<MeasuredMinimum>,
    pub candidates: Vec<HuntCandidate>,
}

const GENERATORS: [&str; 3] = ["curves", "complete_intersection", "closure"];

fn pad(ctx: &FieldCtx, n: usize, c: [Scalar; 3]) -> Option<ProjPoint> {
    let mut v = c.to_vec();
    v.resize(n + 1, ctx.zero());
    ProjPoint::new(ctx, v).ok()
}

fn random_plane_point(ctx: &FieldCtx, r: &mut ChaCha8Rng) -> Option<[Scalar; 3]> {
    let c = [ctx.random(r), ctx.random(r), ctx.random(r)];
    (!c.iter().all(|x| ctx.is_zero(x))).then_some(c)
}

fn random_gl3(ctx: &FieldCtx, r: &mut ChaCha8Rng) -> Option<Matrix> {
    for _ in 0..32 {
        let rows = (0..3).map(|_| (0..3).map(|_| ctx.random(r)).collect()).collect();
        let g = Matrix::from_rows(ctx, 3, rows).ok()?;
        if !ctx.is_zero(&g.det().ok()?) {
            return Some(g);
        }
    }
    None
}

fn apply(g: &Matrix, v: [Scalar; 3]) -> Option<[Scalar; 3]> {
    let w = g.mul_vec(&v).ok()?;
    Some([w[0].clone(), w[1].clone(), w[2].clone()])
}

/// Points of the rational normal curve of degree `deg` (1 or 2) in the
/// plane, moved by a random projectivity, indexed by `P^1(F_q)`.
fn curve_points(ctx: &FieldCtx, deg: u32, count: usize, r: &mut ChaCha8Rng) -> Option<Vec<[Scalar; 3]>> {
    let q = ctx.order()?;
    let g = random_gl3(ctx, r)?;
    let mut params: Vec<u64> = (0..=q).collect();
    // partial Fisher-Yates
    let count = count.min(params.len());
    for i in 0..count {
        let j = r.gen_range(i..params.len());
        params.swap(i, j);
    }
    let mut out = Vec::with_capacity(count);
    for &t in &params[..count] {
        let v = if t == q {
            if deg == 1 {
                [ctx.zero(), ctx.one(), ctx.zero()]
            } else {
                [ctx.zero(), ctx.zero(), ctx.one()]
            }
        } else {
            let s = ctx.element(t);
            if deg == 1 {
                [ctx.one(), s, ctx.zero()]
            } else {
                [ctx.one(), s.clone(), ctx.mul(&s, &s)]
            }
        };
        out.push(apply(&g, v)?);
    }
    Some(out)
}

fn assemble(ctx: &FieldCtx, n: usize, pts: Vec<[Scalar; 3]>) -> Option<PointSet> {
    let mut out: Vec<ProjPoint> = Vec::new();
    for c in pts {
        let p = pad(ctx, n, c)?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    PointSet::new(ctx, n, out).ok()
}

fn gen_curves(ctx: &FieldCtx, n: usize, d: u32, max: usize, r: &mut ChaCha8Rng) -> Option<PointSet> {
    let components = r.gen_range(1..=2);
    let mut pts = Vec::new();
    for _ in 0..components {
        let deg = r.gen_range(1..=2u32);
        let target = (deg * d + 2) as i64 + r.gen_range(-1..=1);
        let room = max.saturating_sub(pts.len());
        let count = (target.max(2) as usize).min(room);
        if count < 2 {
            break;
        }
        pts.extend(curve_points(ctx, deg, count, r)?);
    }
    assemble(ctx, n, pts)
}

fn cross(ctx: &FieldCtx, a: &[Scalar; 3], b: &[Scalar; 3]) -> [Scalar; 3] {
    let m = |i: usize, j: usize| ctx.sub(&ctx.mul(&a[i], &b[j]), &ctx.mul(&a[j], &b[i]));
    [m(1, 2), m(2, 0), m(0, 1)]
}

/// `a b` points cut out by `a` lines against `b` lines, with `a + b = d + 3`
/// so that the set is CB for `O(d)`.
fn gen_complete_intersection(ctx: &FieldCtx, n: usize, d: u32, max: usize, r: &mut ChaCha8Rng) -> Option<PointSet> {
    let s = d as usize + 3;
    let shapes: Vec<(usize, usize)> = (1..s).map(|a| (a, s - a)).filter(|&(a, b)| a <= b && a * b <= max).collect();
    if shapes.is_empty() {
        return None;
    }
    let (a, b) = shapes[r.gen_range(0..shapes.len())];
    for _ in 0..20 {
        let la: Vec<[Scalar; 3]> = (0..a).filter_map(|_| random_plane_point(ctx, r)).collect();
        let lb: Vec<[Scalar; 3]> = (0..b).filter_map(|_| random_plane_point(ctx, r)).collect();
        if la.len() != a || lb.len() != b {
            continue;
        }
        let pts: Vec<[Scalar; 3]> = la.iter().flat_map(|x| lb.iter().map(|y| cross(ctx, x, y))).collect();
        if pts.iter().any(|p| p.iter().all(|c| ctx.is_zero(c))) {
            continue;
        }
        if let Some(z) = assemble(ctx, n, pts) {
            if z.len() == a * b {
                return Some(z);
            }
        }
    }
    None
}

fn gen_closure(ctx: &FieldCtx, n: usize, d: u32, max: usize, r: &mut ChaCha8Rng) -> Option<PointSet> {
    let on_line = (d as usize + 2).min(max);
    let mut pts = curve_points(ctx, 1, on_line, r)?;
    let extra = r.gen_range(0..=max.saturating_sub(pts.len()));
    for _ in 0..extra {
        pts.extend(random_plane_point(ctx, r));
    }
    let z = assemble(ctx, n, pts)?;
    minimal_cb_subset(&z, d).ok().flatten()
}

struct Trial {
    generator: usize,
    d: u32,
    e: u32,
    z: Option<PointSet>,
    picoco: Option<Result<PicocoVerdict, CbError>>,
    lu: Option<Result<LuVerdict, CbError>>,
    curve_degree: Option<u32>,
}

fn pick_generator(weights: &[u32; 3], r: &mut ChaCha8Rng) -> usize {
    let total: u32 = weights.iter().sum();
    if total == 0 {
        return 2;
    }
    let mut x = r.gen_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    2
}

fn run_trial(ctx: &FieldCtx, cfg: &HuntConfig, seed: u64, i: usize) -> Trial {
    let mut r = rng::indexed_stream(seed, "hunt", i as u64);
    let d = r.gen_range(cfg.d_range.0..=cfg.d_range.1);
    let e = r.gen_range(cfg.e_range.0..=cfg.e_range.1);
    let generator = pick_generator(&cfg.weights, &mut r);
    let max = cfg.max_points.min(LU_MAX_POINTS);
    let mut z = match generator {
        0 => gen_curves(ctx, cfg.n, d, max, &mut r),
        1 => gen_complete_intersection(ctx, cfg.n, d, max, &mut r),
        _ => gen_closure(ctx, cfg.n, d, max, &mut r),
    };
    let mut generator = generator;
    if z.is_none() && generator != 2 {
        generator = 2;
        z = gen_closure(ctx, cfg.n, d, max, &mut r);
    }
    let z = z.filter(|z| z.len() >= 2);
    let mut t = Trial { generator, d, e, z: z.clone(), picoco: None, lu: None, curve_degree: None };
    if let Some(z) = z {
        t.picoco = Some(picoco_check(&z, d, e, rng::derive_indexed(seed, "hunt-curve", i as u64)));
        t.lu = Some(lu_check(&z, d, e));
        if matches!(&t.picoco, Some(Ok(v)) if v.cb) && z.n() == 2 {
            t.curve_degree = min_hypersurface_degree(&z).ok();
        }
    }
    t
}

fn validate(cfg: &HuntConfig) -> Result<FieldCtx, CbError> {
    if cfg.n < 2 {
        return Err(CbError::Degenerate("hunt needs n >= 2".into()));
    }
    if cfg.d_range.0 < 1 || cfg.d_range.0 > cfg.d_range.1 || cfg.e_range.0 < 1 || cfg.e_range.0 > cfg.e_range.1 {
        return Err(CbError::Degenerate("empty or invalid d/e range".into()));
    }
    Ok(FieldCtx::finite(cfg.q)?)
}

/// Runs `cfg.trials` independent trials, each seeded from `(seed, index)`,
/// and merges their outcomes in trial order.
pub fn conjecture_hunt(cfg: &HuntConfig, seed: u64) -> Result<HuntReport, CbError> {
    let ctx = validate(cfg)?;
    let trials: Vec<Trial> = (0..cfg.trials).into_par_iter().map(|i| run_trial(&ctx, cfg, seed, i)).collect();
    let mut report = HuntReport {
        seed,
        trials: cfg.trials,
        config: cfg.clone(),
        hypothesis_satisfied: 0,
        conclusion_verified: 0,
        picoco: CheckTally::default(),
        lu: CheckTally::default(),
        measured_minima: Vec::new(),
        candidates: Vec::new(),
    };
    let mut minima: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (i, t) in trials.iter().enumerate() {
        let mut pt = CheckTally::default();
        let mut lt = CheckTally::default();
        let mut any_hyp = false;
        let mut all_ok = true;
        let flag = |check: &str, verdict: serde_json::Value, report: &mut HuntReport| {
            let z = t.z.as_ref().expect("checked instance has points");
            report.candidates.push(HuntCandidate {
                trial: i,
                generator: GENERATORS[t.generator].into(),
                d: t.d,
                e: t.e,
                check: check.into(),
                points: z.dump(),
                verdict,
            });
        };
        match &t.picoco {
            Some(Ok(v)) if v.vacuous => pt.vacuous += 1,
            Some(Ok(v)) => {
                any_hyp = true;
                if v.conclusion == Some(true) {
                    pt.verified += 1;
                } else {
                    all_ok = false;
                    pt.candidates += 1;
                    flag("picoco", serde_json::to_value(v).unwrap(), &mut report);
                }
            }
            _ => pt.skipped += 1,
        }
        match &t.lu {
            Some(Ok(v)) if v.vacuous => lt.vacuous += 1,
            Some(Ok(v)) => {
                any_hyp = true;
                if v.conclusion {
                    lt.verified += 1;
                } else {
                    all_ok = false;
                    lt.candidates += 1;
                    flag("lu", serde_json::to_value(v).unwrap(), &mut report);
                }
            }
            _ => lt.skipped += 1,
        }
        if any_hyp {
            report.hypothesis_satisfied += 1;
            if all_ok {
                report.conclusion_verified += 1;
            }
        }
        if let (Some(c), Some(z)) = (t.curve_degree, &t.z) {
            let m = minima.entry((t.d, c)).or_insert(usize::MAX);
            *m = (*m).min(z.len());
        }
        report.picoco.merge(&pt);
        report.lu.merge(&lt);
    }
    report.measured_minima = minima
        .into_iter()
        .map(|((d, c), m)| MeasuredMinimum { d, curve_degree: c, min_size: m, deficit: (c * d) as i64 - m as i64 })
        .collect();
    Ok(report)
}

/// Re-runs the check recorded in a candidate from its dump alone.
pub fn recheck_candidate(c: &HuntCandidate, seed: u64) -> Result<serde_json::Value, CbError> {
    let z = PointSet::from_dump(&c.points)?;
    let v = match c.check.as_str() {
        "picoco" => serde_json::to_value(picoco_check(&z, c.d, c.e, rng::derive_indexed(seed, "hunt-curve", c.trial as u64))?),
        "lu" => serde_json::to_value(lu_check(&z, c.d, c.e)?),
        other => return Err(CbError::Degenerate(format!("unknown check {other}"))),
    };
    Ok(v.expect("verdicts serialize"))
}

/// Whether a hunt instance is CB; used when re-verifying reports.
pub fn instance_is_cb(c: &HuntCandidate) -> Result<bool, CbError> {
    let z = PointSet::from_dump(&c.points)?;
    Ok(is_cayley_bacharach(&z, c.d)?.is_cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> HuntConfig {
        HuntConfig { trials, ..HuntConfig::default() }
    }

    #[test]
    fn empty_hunt() {
        let r = conjecture_hunt(&small(0), 7).unwrap();
        assert_eq!(r.trials, 0);
        assert_eq!(r.picoco.total(), 0);
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn hunt_is_deterministic_and_tallies_sum() {
        let a = conjecture_hunt(&small(60), 7).unwrap();
        let b = conjecture_hunt(&small(60), 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.picoco.total(), 60);
        assert_eq!(a.lu.total(), 60);
        assert!(a.hypothesis_satisfied > 0);
        for c in &a.candidates {
            assert_eq!(recheck_candidate(c, 7).unwrap(), c.verdict);
        }
    }

    #[test]
    fn generators_produce_cb_sets() {
        let ctx = FieldCtx::prime(11).unwrap();
        for i in 0..20u64 {
            let mut r = rng::indexed_stream(3, "gen", i);
            let d = 3 + (i % 3) as u32;
            if let Some(z) = gen_complete_intersection(&ctx, 2, d, 14, &mut r) {
                assert!(is_cayley_bacharach(&z, d).unwrap().is_cb);
            }
            if let Some(z) = gen_closure(&ctx, 2, d, 14, &mut r) {
                assert!(is_cayley_bacharach(&z, d).unwrap().is_cb);
            }
        }
    }
}
