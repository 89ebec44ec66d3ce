//! Text format for point sets.
//!
//! ```text
//! # comment
//! field 7 1
//! 1, 0, 2
//! 0, 1, 3
//! ```
//!
//! The header is `field p k` (or `field p`) for `F_{p^k}` and
//! `field rational` for `Q`. An optional `modulus c0, c1, ..., ck` line
//! selects a non-default extension modulus. Extension elements are packed
//! base-`p` integers; rational coordinates may be written `a/b`.

use std::path::Path;

use crate::ff::{FieldCtx, FieldKind};

use super::{PointSet, PointsError, ProjPoint};

fn perr(line: usize, msg: impl Into<String>) -> PointsError {
    PointsError::Parse { line, msg: msg.into() }
}

pub fn parse_point_file(text: &str) -> Result<PointSet, PointsError> {
    let mut ctx: Option<FieldCtx> = None;
    let mut ext: Option<(u64, u32)> = None;
    let mut points = Vec::new();
    let mut n = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("field") {
            if ctx.is_some() || ext.is_some() {
                return Err(perr(lineno, "duplicate field header"));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                ["rational"] => ctx = Some(FieldCtx::rational()),
                [p] | [p, "1"] => {
                    let p: u64 = p.parse().map_err(|_| perr(lineno, "bad characteristic"))?;
                    ctx = Some(FieldCtx::prime(p)?);
                }
                [p, k] => {
                    let p: u64 = p.parse().map_err(|_| perr(lineno, "bad characteristic"))?;
                    let k: u32 = k.parse().map_err(|_| perr(lineno, "bad extension degree"))?;
                    ext = Some((p, k));
                }
                _ => return Err(perr(lineno, "expected `field p k` or `field rational`")),
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("modulus") {
            let (p, k) = ext.ok_or_else(|| perr(lineno, "modulus line needs a `field p k` header with k > 1"))?;
            let coeffs = rest
                .split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|_| perr(lineno, "bad modulus coefficient")))
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.len() != k as usize + 1 {
                return Err(perr(lineno, "modulus degree differs from k"));
            }
            ctx = Some(FieldCtx::extension_with_modulus(p, &coeffs)?);
            continue;
        }
        if ctx.is_none() {
            if let Some((p, k)) = ext {
                ctx = Some(FieldCtx::extension(p, k)?);
            }
        }
        let f = ctx.as_ref().ok_or_else(|| perr(lineno, "point before the field header"))?;
        let coords = line
            .split(',')
            .map(|s| f.parse(s).map_err(|e| perr(lineno, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let this_n = coords.len().saturating_sub(1);
        if *n.get_or_insert(this_n) != this_n {
            return Err(perr(lineno, "coordinate count differs from earlier points"));
        }
        points.push(ProjPoint::new(f, coords).map_err(|e| perr(lineno, e.to_string()))?);
    }
    if ctx.is_none() {
        if let Some((p, k)) = ext {
            ctx = Some(FieldCtx::extension(p, k)?);
        }
    }
    let ctx = ctx.ok_or_else(|| perr(0, "missing field header"))?;
    let n = n.ok_or_else(|| perr(0, "no points"))?;
    PointSet::new(&ctx, n, points)
}

pub fn read_point_file(path: &Path) -> Result<PointSet, PointsError> {
    parse_point_file(&std::fs::read_to_string(path)?)
}

pub fn write_point_file(z: &PointSet) -> String {
    let mut out = String::new();
    match z.ctx().kind() {
        FieldKind::Rational => out.push_str("field rational\n"),
        FieldKind::Prime { p } => out.push_str(&format!("field {p} 1\n")),
        FieldKind::Extension { p, k, modulus } => {
            out.push_str(&format!("field {p} {k}\n"));
            let m: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("modulus {}\n", m.join(", ")));
        }
    }
    for p in z.iter() {
        let c: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&c.join(", "));
        out.push('\n');
    }
    out
}
