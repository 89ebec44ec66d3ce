use bacharach::cb::{
    conjecture_hunt, contcurve_decompose, find_curve_cone_projection, is_cayley_bacharach, minimal_cb_subset,
    ContcurveOptions, HuntConfig,
};
use bacharach::census::{census_run, error_decay_report, CensusError, CensusMode};
use bacharach::classes::{
    class_by_counting, interpolate_class, propvw_bruteforce_check, psi_table, w_k_count, w_lambda_class,
    w_lambda_count, ClassesError, Space,
};
use bacharach::points::{
    h1_ideal, h1_ideal_sq, jet_codim_check, jet_matrix, projective_hull_dim, read_point_file, PointSet,
};
use bacharach::series::{euler_limit_product, zeta_inverse_pn, zeta_value_pn, LPoly, LSeries};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::args::*;

pub enum CliError {
    Usage(String),
    /// The computation itself failed or refuted what it was checking.
    Failure(String),
}

pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    /// A checked identity or property came out false.
    pub negative: bool,
}

impl Outcome {
    fn plain(result: Value) -> Outcome {
        Outcome { result, csv: None, negative: false }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn classes_err(e: ClassesError) -> CliError {
    match e {
        ClassesError::NonPolynomial { .. } | ClassesError::IdentityViolation(_) | ClassesError::Internal(_) => {
            CliError::Failure(e.to_string())
        }
        _ => usage(e),
    }
}

fn load(path: &std::path::Path) -> Result<PointSet, CliError> {
    read_point_file(path).map_err(usage)
}

fn lpoly_json(p: &LPoly) -> Value {
    json!({ "class": p.to_string(), "coeffs": p.coeffs() })
}

/// Coefficients of `u^0 .. u^prec`.
fn series_json(s: &LSeries, prec: usize) -> Result<(Value, String), CliError> {
    let coeffs = (0..=prec as i64).map(|j| s.coeff(j)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
    let csv = std::iter::once("j,coeff".to_string())
        .chain(coeffs.iter().enumerate().map(|(j, c)| format!("{j},{c}")))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    let shown = s.truncate(prec as i64 + 1);
    Ok((json!({ "prec": prec, "coefficients": coeffs, "series": shown.to_string() }), csv))
}

pub fn run(cmd: &Command, seed: u64, seed_given: bool) -> Result<Outcome, CliError> {
    match cmd {
        Command::Cb(c) => cb(c, seed),
        Command::Jets(c) => jets(c),
        Command::Zeta(c) => zeta(c),
        Command::Classes(c) => classes(c),
        Command::Census(c) => census(c, seed, seed_given),
        Command::Psi(a) => {
            if a.l_min > a.l_max {
                return Err(usage("--l-min exceeds --l-max"));
            }
            let t = psi_table(a.n, a.e, a.d, a.kconst, a.l_min..=a.l_max).map_err(classes_err)?;
            let csv = std::iter::once("l,psi".to_string())
                .chain(t.values.iter().map(|(l, v)| format!("{l},{v}")))
                .collect::<Vec<_>>()
                .join("\n")
                + "\n";
            Ok(Outcome { result: serde_json::to_value(&t).unwrap(), csv: Some(csv), negative: false })
        }
    }
}

fn cb(c: &CbCommand, seed: u64) -> Result<Outcome, CliError> {
    match c {
        CbCommand::Check(a) => {
            let z = load(&a.points)?;
            let v = is_cayley_bacharach(&z, a.d).map_err(usage)?;
            let mut out = Outcome::plain(serde_json::to_value(v.dump()).unwrap());
            out.negative = !v.is_cb;
            Ok(out)
        }
        CbCommand::Minimal(a) => {
            let z = load(&a.points)?;
            let sub = minimal_cb_subset(&z, a.d).map_err(usage)?;
            Ok(Outcome::plain(json!({ "subset": sub.map(|s| s.dump()) })))
        }
        CbCommand::Curve(a) => {
            let z = load(&a.points)?;
            match a.d {
                Some(d) => {
                    let opts = ContcurveOptions { seed, ..ContcurveOptions::default() };
                    let r = contcurve_decompose(&z, d, a.e_max, &opts).map_err(usage)?;
                    Ok(Outcome::plain(json!({
                        "found": r.is_some(),
                        "certificate": r.as_ref().map(|r| r.certificate.summary()),
                        "subset": r.as_ref().map(|r| r.subset.dump()),
                        "defect": r.as_ref().map(|r| r.defect),
                        "in_regime": r.as_ref().map(|r| r.in_regime),
                        "iterations": r.as_ref().map(|r| r.iterations),
                    })))
                }
                None => {
                    let c = find_curve_cone_projection(&z, a.e_max, seed).map_err(usage)?;
                    Ok(Outcome::plain(json!({ "found": c.is_some(), "certificate": c.map(|c| c.summary()) })))
                }
            }
        }
        CbCommand::Hunt(a) => {
            let weights: [u32; 3] =
                a.weights.clone().try_into().map_err(|_| usage("--weights takes exactly three values"))?;
            let cfg = HuntConfig {
                n: a.n,
                q: a.q,
                d_range: (a.d_min, a.d_max),
                e_range: (a.e_min, a.e_max),
                trials: a.trials,
                weights,
                max_points: a.max_points,
            };
            let r = conjecture_hunt(&cfg, seed).map_err(usage)?;
            let negative = !r.candidates.is_empty();
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), csv: None, negative })
        }
    }
}

fn jets(c: &JetsCommand) -> Result<Outcome, CliError> {
    match c {
        JetsCommand::Rank(a) => {
            let z = load(&a.points)?;
            let m = jet_matrix(&z, a.d).map_err(usage)?;
            Ok(Outcome::plain(json!({ "rows": m.rows(), "cols": m.cols(), "rank": m.rank() })))
        }
        JetsCommand::Defect(a) => {
            let z = load(&a.points)?;
            let (codim, bound) = jet_codim_check(&z, a.d).map_err(usage)?;
            Ok(Outcome::plain(json!({
                "points": z.len(),
                "h1_ideal": h1_ideal(&z, a.d).map_err(usage)?,
                "h1_ideal_sq": h1_ideal_sq(&z, a.d).map_err(usage)?,
                "hull_dim": projective_hull_dim(&z).map_err(usage)?,
                "jet_codim": codim,
                "codim_bound": bound,
            })))
        }
    }
}

fn zeta(c: &ZetaCommand) -> Result<Outcome, CliError> {
    let (s, prec, q) = match c {
        ZetaCommand::Value(a) => (zeta_value_pn(a.n, a.s, a.prec as i64 + 1).map_err(usage)?, a.prec, a.q),
        ZetaCommand::Inverse(a) => (zeta_inverse_pn(a.n, a.s).map_err(usage)?, a.prec, a.q),
        ZetaCommand::Limit(a) => (euler_limit_product(a.prec).map_err(usage)?, a.prec, None),
    };
    let (mut result, csv) = series_json(&s, prec)?;
    if let Some(q) = q {
        // exact only when the series is a polynomial
        let exact = s.window().is_none();
        let v = s.truncate(prec as i64 + 1).specialize_count(q);
        result["specialization"] = json!({ "q": q, "value": v.to_string(), "exact": exact });
    }
    Ok(Outcome { result, csv: Some(csv), negative: false })
}

fn parse_space(s: &str) -> Result<Space, CliError> {
    Space::parse(s).map_err(usage)
}

fn classes(c: &ClassesCommand) -> Result<Outcome, CliError> {
    match c {
        ClassesCommand::Wk(a) => {
            let space = parse_space(&a.space)?;
            Ok(Outcome::plain(match a.q {
                Some(q) => json!({ "q": q, "count": w_k_count(&space, a.k, q).map_err(classes_err)?.to_string() }),
                None => lpoly_json(
                    &class_by_counting(space.dim() * a.k, |q| w_k_count(&space, a.k, q)).map_err(classes_err)?,
                ),
            }))
        }
        ClassesCommand::Wlambda(a) => {
            let space = parse_space(&a.space)?;
            Ok(Outcome::plain(match a.q {
                Some(q) => {
                    json!({ "q": q, "count": w_lambda_count(&space, &a.sizes, q).map_err(classes_err)?.to_string() })
                }
                None => lpoly_json(&w_lambda_class(&space, &a.sizes).map_err(classes_err)?),
            }))
        }
        ClassesCommand::Interp(a) => {
            let values = a
                .values
                .iter()
                .map(|v| {
                    let (q, n) = v.split_once(':').ok_or_else(|| usage(format!("sample {v:?} is not q:count")))?;
                    Ok((q.trim().parse::<u64>().map_err(usage)?, n.trim().parse::<BigInt>().map_err(usage)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            match interpolate_class(&values, a.degree_bound) {
                Ok(p) => Ok(Outcome::plain(lpoly_json(&p))),
                Err(ClassesError::NonPolynomial { q, expected, got }) => Ok(Outcome {
                    result: json!({ "class": Value::Null, "held_out": { "q": q, "expected": expected, "got": got } }),
                    csv: None,
                    negative: true,
                }),
                Err(e) => Err(classes_err(e)),
            }
        }
        ClassesCommand::Propvw(a) => {
            let r = propvw_bruteforce_check(a.n, a.d, a.q, a.big_n).map_err(classes_err)?;
            let negative = !r.holds;
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), csv: None, negative })
        }
    }
}

fn census_err(e: CensusError) -> CliError {
    match e {
        CensusError::Undecided { .. } => CliError::Failure(e.to_string()),
        _ => usage(e),
    }
}

fn census(c: &CensusCommand, seed: u64, seed_given: bool) -> Result<Outcome, CliError> {
    let mode = |sample: Option<u64>| match sample {
        Some(samples) => Ok(CensusMode::Sample { samples, seed }),
        None if seed_given => Err(usage("--seed only applies with --sample")),
        None => Ok(CensusMode::Exhaustive),
    };
    match c {
        CensusCommand::Run(a) => {
            let r = census_run(a.n, a.d, a.q, mode(a.sample)?).map_err(census_err)?;
            let csv = format!(
                "n,d,q,total,smooth,density_num,density_den,target_num,target_den,deviation\n{},{},{},{},{},{},{},{},{},{}\n",
                r.n, r.d, r.q, r.total, r.smooth, r.density_num, r.density_den, r.target_num, r.target_den, r.deviation
            );
            let negative = r.oracle_disagreements > 0 || r.undecided > 0;
            Ok(Outcome { result: serde_json::to_value(&r).unwrap(), csv: Some(csv), negative })
        }
        CensusCommand::Decay(a) => {
            let t = error_decay_report(a.n, a.q, a.d_min..=a.d_max, mode(a.sample)?).map_err(census_err)?;
            Ok(Outcome { csv: Some(t.to_csv()), result: serde_json::to_value(&t).unwrap(), negative: false })
        }
    }
}
