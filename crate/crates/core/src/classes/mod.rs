//! Ordered partitions, closed-point censuses and counts of configuration
//! spaces of points, with their classes as polynomials in `L`.

mod propvw;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ff::field::prime_power;
use crate::ff::FfError;
use crate::points::PointsError;
use crate::series::LPoly;

pub use propvw::{propvw_bruteforce_check, singular_census, LambdaTally, PropVwReport, SingularLocus};

pub const MAX_COMPOSITION: usize = 14;

#[derive(Debug, thiserror::Error)]
pub enum ClassesError {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("counts are not polynomial in q: held-out q = {q} expected {expected}, got {got}")]
    NonPolynomial { q: u64, expected: String, got: String },
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Points(#[from] PointsError),
}

/// Block sizes `(a_1, ..., a_m)` of an ordered set partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    pub sizes: Vec<usize>,
}

impl Composition {
    pub fn new(sizes: Vec<usize>) -> Composition {
        Composition { sizes }
    }

    /// `|lambda|`.
    pub fn k(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// `||lambda||`, the number of blocks.
    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn sign(&self) -> i64 {
        if self.m() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `k! / prod a_i!`: ordered set partitions of a `k`-set with these
    /// block sizes.
    pub fn multiplicity(&self) -> BigInt {
        let mut r = factorial(self.k());
        for &a in &self.sizes {
            r /= factorial(a);
        }
        r
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn binom(n: &BigInt, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All compositions of `k`, by number of parts and then lexicographically.
pub fn compositions(k: usize) -> Result<Vec<Composition>, ClassesError> {
    if k > MAX_COMPOSITION {
        return Err(ClassesError::Capacity(format!("compositions of {k} > {MAX_COMPOSITION}")));
    }
    if k == 0 {
        return Ok(vec![Composition::new(vec![])]);
    }
    let mut out = Vec::with_capacity(1 << (k - 1));
    for cuts in 0u32..1 << (k - 1) {
        let mut sizes = Vec::new();
        let mut run = 1;
        for i in 0..k - 1 {
            if cuts >> i & 1 == 1 {
                sizes.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        sizes.push(run);
        out.push(Composition::new(sizes));
    }
    out.sort_by(|a, b| (a.m(), &a.sizes).cmp(&(b.m(), &b.sizes)));
    Ok(out)
}

/// Number of ordered set partitions of a `k`-set.
pub fn fubini(k: usize) -> Result<BigInt, ClassesError> {
    Ok(compositions(k)?.iter().map(Composition::multiplicity).sum())
}

/// A variety with closed-form point counts over every `F_{q^m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Projective(usize),
    Affine(usize),
    Point,
    /// Disjoint union.
    Union(Vec<Space>),
    /// `ambient` minus pairwise disjoint closed pieces contained in it.
    Complement(Box<Space>, Vec<Space>),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Projective(n) | Space::Affine(n) => *n,
            Space::Point => 0,
            Space::Union(parts) => parts.iter().map(Space::dim).max().unwrap_or(0),
            Space::Complement(a, _) => a.dim(),
        }
    }

    /// `#X(F_{q^m})`.
    pub fn count(&self, q: u64, m: u32) -> BigInt {
        let qm = BigInt::from(q).pow(m);
        match self {
            Space::Projective(n) => (0..=*n as u32).map(|i| qm.pow(i)).sum(),
            Space::Affine(n) => qm.pow(*n as u32),
            Space::Point => BigInt::one(),
            Space::Union(parts) => parts.iter().map(|s| s.count(q, m)).sum(),
            Space::Complement(a, removed) => {
                a.count(q, m) - removed.iter().map(|s| s.count(q, m)).sum::<BigInt>()
            }
        }
    }

    pub fn parse(s: &str) -> Result<Space, ClassesError> {
        let s = s.trim();
        let bad = || ClassesError::Domain(format!("unknown space {s:?} (use P<n>, A<n> or point)"));
        if s.eq_ignore_ascii_case("point") {
            return Ok(Space::Point);
        }
        let (head, rest) = s.split_at(1.min(s.len()));
        let n: usize = rest.parse().map_err(|_| bad())?;
        match head {
            "P" | "p" => Ok(Space::Projective(n)),
            "A" | "a" => Ok(Space::Affine(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Projective(n) => write!(f, "P{n}"),
            Space::Affine(n) => write!(f, "A{n}"),
            Space::Point => write!(f, "point"),
            Space::Union(parts) => {
                let p: Vec<String> = parts.iter().map(|s| s.to_string()).collect();
                write!(f, "({})", p.join(" + "))
            }
            Space::Complement(a, r) => {
                let p: Vec<String> = r.iter().map(|s| s.to_string()).collect();
                write!(f, "({a} - {})", p.join(" - "))
            }
        }
    }
}

pub fn moebius(n: u64) -> i64 {
    let mut n = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPointCensus {
    pub space: Space,
    pub q: u64,
    /// `counts[m - 1] = #X(F_{q^m})`.
    pub counts: Vec<BigInt>,
    /// `closed[j - 1]` = number of closed points of degree `j`.
    pub closed: Vec<BigInt>,
}

impl ClosedPointCensus {
    /// Closed points of degree `j` (0 beyond the census range).
    pub fn a(&self, j: usize) -> BigInt {
        if j == 0 {
            return BigInt::zero();
        }
        self.closed.get(j - 1).cloned().unwrap_or_default()
    }

    pub fn jmax(&self) -> usize {
        self.closed.len()
    }
}

/// Closed points of each degree `j <= jmax` by Moebius inversion of
/// `#X(F_{q^m})`.
pub fn closed_point_census(space: &Space, q: u64, jmax: usize) -> Result<ClosedPointCensus, ClassesError> {
    if prime_power(q).is_none() {
        return Err(ClassesError::Domain(format!("{q} is not a prime power")));
    }
    let counts: Vec<BigInt> = (1..=jmax as u32).map(|m| space.count(q, m)).collect();
    let closed = closed_from_counts(&counts)?;
    Ok(ClosedPointCensus { space: space.clone(), q, counts, closed })
}

/// `a_j = (1/j) sum_{m | j} mu(j/m) N_m`, required to be a nonnegative
/// integer.
pub fn closed_from_counts(counts: &[BigInt]) -> Result<Vec<BigInt>, ClassesError> {
    let mut closed = Vec::with_capacity(counts.len());
    for j in 1..=counts.len() as u64 {
        let mut s = BigInt::zero();
        for m in (1..=j).filter(|m| j % m == 0) {
            s += &counts[m as usize - 1] * moebius(j / m);
        }
        let (quo, rem) = s.div_rem(&BigInt::from(j));
        if !rem.is_zero() || quo.is_negative() {
            return Err(ClassesError::Internal(format!("closed-point count of degree {j} is {s}/{j}")));
        }
        closed.push(quo);
    }
    Ok(closed)
}

/// Galois-stable `k`-element reduced subschemes: the coefficient of `t^k`
/// in `prod_j (1 + t^j)^{a_j}`.
pub fn w_k_from_census(c: &ClosedPointCensus, k: usize) -> Result<BigInt, ClassesError> {
    need(c, k)?;
    let mut poly = vec![BigInt::zero(); k + 1];
    poly[0] = BigInt::one();
    for j in 1..=k {
        let a = c.a(j);
        // multiply by (1 + t^j)^a = sum_i C(a, i) t^{ij}
        let mut next = vec![BigInt::zero(); k + 1];
        for (e, v) in poly.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let mut i = 0;
            while e + i * j <= k {
                next[e + i * j] += v * binom(&a, i);
                i += 1;
            }
        }
        poly = next;
    }
    Ok(poly.swap_remove(k))
}

fn need(c: &ClosedPointCensus, k: usize) -> Result<(), ClassesError> {
    if c.jmax() < k {
        return Err(ClassesError::Domain(format!("census only reaches degree {}, need {k}", c.jmax())));
    }
    Ok(())
}

pub fn w_k_count(space: &Space, k: usize, q: u64) -> Result<BigInt, ClassesError> {
    w_k_from_census(&closed_point_census(space, q, k.max(1))?, k)
}

/// Tuples `(Z_1, ..., Z_m)` of pairwise disjoint Galois-stable subsets with
/// `|Z_i| = sizes[i]` (zero sizes allowed, meaning an empty block).
pub fn w_lambda_from_census(c: &ClosedPointCensus, sizes: &[usize]) -> Result<BigInt, ClassesError> {
    need(c, sizes.iter().sum())?;
    Ok(w_lambda_from_closed(&c.closed, sizes))
}

/// As [`w_lambda_from_census`], from the closed-point counts
/// `closed[j - 1]` (degrees beyond the list count as absent).
pub fn w_lambda_from_closed(closed: &[BigInt], sizes: &[usize]) -> BigInt {
    let k: usize = sizes.iter().sum();
    let m = sizes.len();
    // state: filled amount of each block, mixed radix
    let radix: Vec<usize> = sizes.iter().map(|s| s + 1).collect();
    let states: usize = radix.iter().product();
    let decode = |mut s: usize| -> Vec<usize> {
        radix
            .iter()
            .map(|r| {
                let v = s % r;
                s /= r;
                v
            })
            .collect()
    };
    let encode = |v: &[usize]| -> usize { v.iter().zip(&radix).rev().fold(0, |acc, (x, r)| acc * r + x) };
    let mut dp = vec![BigInt::zero(); states];
    dp[0] = BigInt::one();
    for j in 1..=k.min(closed.len()) {
        let a = &closed[j - 1];
        if a.is_zero() {
            continue;
        }
        let mut next = dp.clone();
        for (s, v) in dp.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let filled = decode(s);
            // number of degree-j points added to each block
            let caps: Vec<usize> = (0..m).map(|i| (sizes[i] - filled[i]) / j).collect();
            let mut add = vec![0usize; m];
            loop {
                let total: usize = add.iter().sum();
                if total > 0 {
                    // ordered choice of distinct points: a! / ((a - total)! prod add_i!)
                    let mut ways = BigInt::one();
                    let mut left = a.clone();
                    for &x in &add {
                        ways *= binom(&left, x);
                        left -= x;
                    }
                    if !ways.is_zero() {
                        let target: Vec<usize> = filled.iter().zip(&add).map(|(f, x)| f + j * x).collect();
                        next[encode(&target)] += v * ways;
                    }
                }
                // odometer over add
                let mut i = 0;
                while i < m {
                    if add[i] < caps[i] {
                        add[i] += 1;
                        break;
                    }
                    add[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
        dp = next;
    }
    dp.swap_remove(states - 1)
}

pub fn w_lambda_count(space: &Space, sizes: &[usize], q: u64) -> Result<BigInt, ClassesError> {
    let k: usize = sizes.iter().sum();
    w_lambda_from_census(&closed_point_census(space, q, k.max(1))?, sizes)
}

/// The first prime powers `>= 2`.
pub fn prime_powers(count: usize) -> Vec<u64> {
    (2u64..).filter(|&q| prime_power(q).is_some()).take(count).collect()
}

/// Interpolates `(q, value)` samples by a polynomial of degree at most
/// `degree_bound` with integer coefficients, checking it against every
/// sample beyond the first `degree_bound + 1`.
pub fn interpolate_class(values: &[(u64, BigInt)], degree_bound: usize) -> Result<LPoly, ClassesError> {
    let need = degree_bound + 2;
    if values.len() < need {
        return Err(ClassesError::Domain(format!(
            "need {need} samples (one held out) for degree {degree_bound}, got {}",
            values.len()
        )));
    }
    let fit = &values[..degree_bound + 1];
    let xs: Vec<BigRational> = fit.iter().map(|(q, _)| BigRational::from_integer((*q).into())).collect();
    // Newton divided differences
    let mut dd: Vec<BigRational> = fit.iter().map(|(_, v)| BigRational::from_integer(v.clone())).collect();
    for lvl in 1..dd.len() {
        for i in (lvl..dd.len()).rev() {
            let den = &xs[i] - &xs[i - lvl];
            if den.is_zero() {
                return Err(ClassesError::Domain("repeated sample point".into()));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    // expand into monomial coefficients
    let mut coeffs = vec![BigRational::zero()];
    for i in (0..dd.len()).rev() {
        // coeffs = coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (e, c) in coeffs.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= c * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    let mut ints = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if !c.is_integer() {
            let q = values[degree_bound + 1].0;
            return Err(ClassesError::NonPolynomial {
                q,
                expected: "integer coefficients".into(),
                got: format!("coefficient {c}"),
            });
        }
        ints.push(
            c.to_integer()
                .to_i64()
                .ok_or_else(|| ClassesError::Capacity(format!("coefficient {c} exceeds 64 bits")))?,
        );
    }
    let poly = LPoly::new(ints);
    for (q, v) in &values[degree_bound + 1..] {
        let got = poly.specialize_count(*q);
        if &got != v {
            return Err(ClassesError::NonPolynomial { q: *q, expected: v.to_string(), got: got.to_string() });
        }
    }
    Ok(poly)
}

/// Class of a count that is polynomial in `q` of degree at most
/// `degree_bound`, by sampling at the first prime powers.
pub fn class_by_counting(
    degree_bound: usize,
    mut count: impl FnMut(u64) -> Result<BigInt, ClassesError>,
) -> Result<LPoly, ClassesError> {
    let samples = prime_powers(degree_bound + 2)
        .into_iter()
        .map(|q| Ok((q, count(q)?)))
        .collect::<Result<Vec<_>, ClassesError>>()?;
    interpolate_class(&samples, degree_bound)
}

pub fn w_lambda_class(space: &Space, sizes: &[usize]) -> Result<LPoly, ClassesError> {
    let k: usize = sizes.iter().sum();
    class_by_counting(space.dim() * k, |q| w_lambda_count(space, sizes, q))
}

/// `sum_{|lambda| = k} (-1)^{||lambda||} weight(lambda) #w_lambda(X)(F_q)`
/// with weight the ordered-partition multiplicity when `weighted`.
pub fn alternating_lambda_sum(space: &Space, k: usize, q: u64, weighted: bool) -> Result<BigInt, ClassesError> {
    if k > 10 {
        return Err(ClassesError::Capacity(format!("alternating sums limited to k <= 10, got {k}")));
    }
    let c = closed_point_census(space, q, k.max(1))?;
    let mut total = BigInt::zero();
    for lam in compositions(k)? {
        let w = w_lambda_from_census(&c, &lam.sizes)?;
        let w = if weighted { w * lam.multiplicity() } else { w };
        total += w * lam.sign();
    }
    Ok(total)
}

pub fn alternating_lambda_class(space: &Space, k: usize, weighted: bool) -> Result<LPoly, ClassesError> {
    class_by_counting(space.dim() * k, |q| alternating_lambda_sum(space, k, q, weighted))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaIdentityReport {
    pub space: String,
    pub q: u64,
    pub kmax: usize,
    /// `#w_k(X)(F_q)` for `k = 0..=kmax`.
    pub configuration_counts: Vec<String>,
    /// Coefficients of `Z_X(t) / Z_X(t^2)`.
    pub zeta_ratio: Vec<String>,
    pub holds: bool,
}

/// Compares `sum_k #w_k(X)(F_q) t^k` with `Z_X(t) / Z_X(t^2)`, the zeta
/// function computed from point counts through `k Z_k = sum N_m Z_{k-m}`.
pub fn config_zeta_identity_check(space: &Space, kmax: usize, q: u64) -> Result<ZetaIdentityReport, ClassesError> {
    if kmax > 12 {
        return Err(ClassesError::Capacity(format!("kmax {kmax} > 12")));
    }
    let census = closed_point_census(space, q, kmax.max(1))?;
    let lhs = (0..=kmax).map(|k| w_k_from_census(&census, k)).collect::<Result<Vec<_>, _>>()?;
    let n: Vec<BigInt> = (1..=kmax.max(1) as u32).map(|m| space.count(q, m)).collect();
    let mut z = vec![BigInt::one()];
    for k in 1..=kmax {
        let s: BigInt = (1..=k).map(|m| &n[m - 1] * &z[k - m]).sum();
        let (quo, rem) = s.div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return Err(ClassesError::Internal(format!("zeta coefficient {k} is not integral")));
        }
        z.push(quo);
    }
    // divide by Z(t^2): r = z / z2, with z2 having constant term 1
    let mut r = vec![BigInt::zero(); kmax + 1];
    for k in 0..=kmax {
        let mut acc = z[k].clone();
        for i in 1..=k / 2 {
            acc -= &z[i] * &r[k - 2 * i];
        }
        r[k] = acc;
    }
    let holds = lhs == r;
    Ok(ZetaIdentityReport {
        space: space.to_string(),
        q,
        kmax,
        configuration_counts: lhs.iter().map(|x| x.to_string()).collect(),
        zeta_ratio: r.iter().map(|x| x.to_string()).collect(),
        holds,
    })
}

/// Smallest `m >= 0` with
/// `max(2m - ed, 0) + (n - 1) max(m - ed, 0) - kconst >= l`.
pub fn psi(n: usize, e: u32, d: u32, l: u64, kconst: i64) -> Result<u64, ClassesError> {
    if e < 1 || d < 1 || n < 1 {
        return Err(ClassesError::Domain("psi needs n, e, d >= 1".into()));
    }
    let ed = e as i128 * d as i128;
    let bound = |m: i128| (2 * m - ed).max(0) + (n as i128 - 1) * (m - ed).max(0) - kconst as i128;
    // the bound grows by at least 2 per step once 2m > ed
    let mut m: i128 = 0;
    while bound(m) < l as i128 {
        m += 1;
    }
    Ok(m as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiTable {
    pub n: usize,
    pub e: u32,
    pub d: u32,
    pub kconst: i64,
    pub values: Vec<(u64, u64)>,
}

pub fn psi_table(n: usize, e: u32, d: u32, kconst: i64, ls: std::ops::RangeInclusive<u64>) -> Result<PsiTable, ClassesError> {
    let values = ls.map(|l| Ok((l, psi(n, e, d, l, kconst)?))).collect::<Result<Vec<_>, ClassesError>>()?;
    Ok(PsiTable { n, e, d, kconst, values })
}
