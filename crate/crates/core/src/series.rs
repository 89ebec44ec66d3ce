//! Polynomials in `L` and truncated Laurent series in `u = L^{-1}`.
//!
//! An [`LSeries`] carries an optional window: coefficients of `u^j` with
//! `j >= window` are unknown, and reading them is an error. Exact series
//! (finite Laurent polynomials) have no window.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot invert: lowest coefficient {0} is not a unit")]
    NonUnit(i64),
    #[error("coefficient of u^{requested} lies outside the reliable window (< u^{window})")]
    Window { requested: i64, window: i64 },
    #[error("integer overflow in series arithmetic")]
    Overflow,
}

fn add_i(a: i64, b: i64) -> Result<i64, SeriesError> {
    a.checked_add(b).ok_or(SeriesError::Overflow)
}

fn mul_i(a: i64, b: i64) -> Result<i64, SeriesError> {
    a.checked_mul(b).ok_or(SeriesError::Overflow)
}

/// Integer polynomial in `L`, lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LPoly {
    coeffs: Vec<i64>,
}

impl LPoly {
    pub fn new(mut coeffs: Vec<i64>) -> LPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        LPoly { coeffs }
    }

    pub fn zero() -> LPoly {
        LPoly::default()
    }

    pub fn one() -> LPoly {
        LPoly::new(vec![1])
    }

    /// `L^k`.
    pub fn l_pow(k: usize) -> LPoly {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        LPoly::new(c)
    }

    /// The class of `P^n`: `1 + L + ... + L^n`.
    pub fn projective_space(n: usize) -> LPoly {
        LPoly::new(vec![1; n + 1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, o: &LPoly) -> Result<LPoly, SeriesError> {
        let len = self.coeffs.len().max(o.coeffs.len());
        (0..len).map(|i| add_i(self.coeff(i), o.coeff(i))).collect::<Result<_, _>>().map(LPoly::new)
    }

    pub fn neg(&self) -> LPoly {
        LPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &LPoly) -> Result<LPoly, SeriesError> {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: i64) -> Result<LPoly, SeriesError> {
        self.coeffs.iter().map(|&c| mul_i(c, k)).collect::<Result<_, _>>().map(LPoly::new)
    }

    pub fn mul(&self, o: &LPoly) -> Result<LPoly, SeriesError> {
        if self.is_zero() || o.is_zero() {
            return Ok(LPoly::zero());
        }
        let mut out = vec![0i64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = add_i(out[i + j], mul_i(a, b)?)?;
            }
        }
        Ok(LPoly::new(out))
    }

    /// Value at `L = q` (or any rational).
    pub fn eval(&self, q: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| acc * q + BigRational::from_integer(c.into()))
    }

    /// Point count over `F_q`.
    pub fn specialize_count(&self, q: u64) -> BigInt {
        self.eval(&BigRational::from_integer(q.into())).to_integer()
    }

    /// `L -> xy`.
    pub fn serre_specialize(&self) -> SerrePoly {
        SerrePoly { diagonal: self.coeffs.clone() }
    }

    /// The same class as an exact series in `u = L^{-1}`.
    pub fn to_series(&self) -> LSeries {
        match self.degree() {
            None => LSeries::exact(0, vec![]),
            Some(deg) => LSeries::exact(-(deg as i64), self.coeffs.iter().rev().copied().collect()),
        }
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().enumerate().rev().map(|(i, &c)| (i as i64, c)), "L", None)
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, i64)>,
    var: &str,
    window: Option<i64>,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms.filter(|&(_, c)| c != 0) {
        let sign = if c < 0 { "-" } else { "+" };
        if first {
            if c < 0 {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        let a = c.unsigned_abs();
        match e {
            0 => write!(f, "{a}")?,
            _ => {
                if a != 1 {
                    write!(f, "{a}*")?;
                }
                if e == 1 {
                    write!(f, "{var}")?;
                } else {
                    write!(f, "{var}^{e}")?;
                }
            }
        }
    }
    match (first, window) {
        (true, None) => write!(f, "0"),
        (true, Some(w)) => write!(f, "O(u^{w})"),
        (false, Some(w)) => write!(f, " + O(u^{w})"),
        (false, None) => Ok(()),
    }
}

/// Image of an `L`-polynomial under `L -> xy`: the coefficient of
/// `(xy)^i` is stored at index `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerrePoly {
    diagonal: Vec<i64>,
}

impl SerrePoly {
    /// Coefficient of `x^a y^b`.
    pub fn coeff(&self, a: usize, b: usize) -> i64 {
        if a != b {
            return 0;
        }
        self.diagonal.get(a).copied().unwrap_or(0)
    }
}

impl fmt::Display for SerrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.diagonal.iter().enumerate().filter(|(_, &c)| c != 0) {
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            first = false;
            let a = c.unsigned_abs();
            let mono = match i {
                0 => String::new(),
                1 => "x*y".to_string(),
                _ => format!("x^{i}*y^{i}"),
            };
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => write!(f, "{mono}")?,
                _ => write!(f, "{a}*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Laurent series `sum c_j u^j`, `j >= j0`, known for `j < window`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSeries {
    j0: i64,
    coeffs: Vec<i64>,
    window: Option<i64>,
}

impl LSeries {
    fn build(j0: i64, coeffs: Vec<i64>, window: Option<i64>) -> LSeries {
        let mut s = LSeries { j0, coeffs, window };
        s.normalize();
        s
    }

    pub fn exact(j0: i64, coeffs: Vec<i64>) -> LSeries {
        LSeries::build(j0, coeffs, None)
    }

    /// A series known only for exponents below `window`.
    pub fn truncated(j0: i64, coeffs: Vec<i64>, window: i64) -> LSeries {
        LSeries::build(j0, coeffs, Some(window))
    }

    pub fn one() -> LSeries {
        LSeries::exact(0, vec![1])
    }

    /// `u^k`.
    pub fn monomial(k: i64) -> LSeries {
        LSeries::exact(k, vec![1])
    }

    fn normalize(&mut self) {
        if let Some(w) = self.window {
            let keep = (w - self.j0).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.j0 = self.window.unwrap_or(0);
        } else {
            self.coeffs.drain(..lead);
            self.j0 += lead as i64;
        }
    }

    /// Lowest exponent with a nonzero coefficient (for the zero series,
    /// the window or 0).
    pub fn j0(&self) -> i64 {
        self.j0
    }

    pub fn window(&self) -> Option<i64> {
        self.window
    }

    pub fn is_exact(&self) -> bool {
        self.window.is_none()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.j0 + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, j: i64) -> Result<i64, SeriesError> {
        if let Some(w) = self.window {
            if j >= w {
                return Err(SeriesError::Window { requested: j, window: w });
            }
        }
        if j < self.j0 {
            return Ok(0);
        }
        Ok(self.coeffs.get((j - self.j0) as usize).copied().unwrap_or(0))
    }

    /// `(exponent, coefficient)` pairs of the nonzero known terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (self.j0 + i as i64, c))
    }

    /// Forgets every term of exponent `>= window`.
    pub fn truncate(&self, window: i64) -> LSeries {
        let w = self.window.map_or(window, |x| x.min(window));
        LSeries::build(self.j0, self.coeffs.clone(), Some(w))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &LSeries) -> Result<LSeries, SeriesError> {
        let window = min_window(self.window, o.window);
        if self.is_zero() {
            return Ok(LSeries::build(o.j0, o.coeffs.clone(), window));
        }
        if o.is_zero() {
            return Ok(LSeries::build(self.j0, self.coeffs.clone(), window));
        }
        let lo = self.j0.min(o.j0);
        let hi = self.top().unwrap().max(o.top().unwrap());
        let hi = window.map_or(hi, |w| hi.min(w - 1));
        let mut out = Vec::new();
        for j in lo..=hi {
            out.push(add_i(self.raw(j), o.raw(j))?);
        }
        Ok(LSeries::build(lo, out, window))
    }

    fn raw(&self, j: i64) -> i64 {
        if j < self.j0 {
            0
        } else {
            self.coeffs.get((j - self.j0) as usize).copied().unwrap_or(0)
        }
    }

    pub fn neg(&self) -> LSeries {
        LSeries::build(self.j0, self.coeffs.iter().map(|c| -c).collect(), self.window)
    }

    pub fn sub(&self, o: &LSeries) -> Result<LSeries, SeriesError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LSeries) -> Result<LSeries, SeriesError> {
        // error terms: O(u^{wa}) * b starts at wa + val(b), and symmetrically
        if (self.is_exact() && self.is_zero()) || (o.is_exact() && o.is_zero()) {
            return Ok(LSeries::exact(0, vec![]));
        }
        let window = min_window(self.window.map(|w| w + o.j0), o.window.map(|w| w + self.j0));
        if self.is_zero() || o.is_zero() {
            let j0 = window.unwrap_or(0);
            return Ok(LSeries::build(j0, vec![], window));
        }
        let j0 = self.j0 + o.j0;
        let mut len = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(w) = window {
            len = len.min((w - j0).max(0) as usize);
        }
        let mut out = vec![0i64; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = add_i(out[i + j], mul_i(a, b)?)?;
            }
        }
        Ok(LSeries::build(j0, out, window))
    }

    /// Multiplication by `L^k = u^{-k}`.
    pub fn shift_by_l(&self, k: i64) -> LSeries {
        LSeries::build(self.j0 - k, self.coeffs.clone(), self.window.map(|w| w - k))
    }

    /// Inverse, known for exponents below `window` (intersected with what
    /// the input's own window allows). The lowest coefficient must be `±1`.
    pub fn invert(&self, window: i64) -> Result<LSeries, SeriesError> {
        let Some(&lead) = self.coeffs.first() else {
            return Err(SeriesError::NonUnit(0));
        };
        if lead != 1 && lead != -1 {
            return Err(SeriesError::NonUnit(lead));
        }
        let v = self.j0;
        // relative precision of the input bounds that of the output
        let window = self.window.map_or(window, |w| window.min(w - 2 * v));
        let len = (window + v).max(0) as usize;
        let mut out = vec![0i64; len];
        for k in 0..len {
            let mut acc: i64 = if k == 0 { 1 } else { 0 };
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc = add_i(acc, -mul_i(self.coeffs[i], out[k - i])?)?;
            }
            out[k] = mul_i(acc, lead)?;
        }
        Ok(LSeries::build(-v, out, Some(window)))
    }

    /// `sum c_j q^{-j}` over the known terms.
    pub fn specialize_count(&self, q: u64) -> BigRational {
        let q = BigRational::from_integer(q.into());
        let u = q.recip();
        self.terms().fold(BigRational::zero(), |acc, (j, c)| {
            let p = if j >= 0 { pow_r(&u, j as u64) } else { pow_r(&q, (-j) as u64) };
            acc + p * BigRational::from_integer(c.into())
        })
    }

    /// Lowest exponent where `self` and `o` differ inside both windows;
    /// `None` if they agree on the whole common window.
    pub fn first_disagreement(&self, o: &LSeries) -> Option<i64> {
        let lo = self.j0.min(o.j0);
        let hi = match min_window(self.window, o.window) {
            Some(w) => w - 1,
            None => self.top().unwrap_or(lo).max(o.top().unwrap_or(lo)),
        };
        (lo..=hi).find(|&j| self.raw(j) != o.raw(j))
    }
}

fn pow_r(x: &BigRational, e: u64) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

fn min_window(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for LSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms(), "u", self.window)
    }
}

/// `h_k(1, L, ..., L^n)`, the class of `Sym^k P^n`.
pub fn sym_class_pn(n: usize, k: usize) -> Result<LPoly, SeriesError> {
    // dp[j] over monomials of degree j in the variables processed so far
    let mut dp: Vec<LPoly> = vec![LPoly::one()];
    dp.extend((0..k).map(|_| LPoly::zero()));
    for i in 0..=n {
        for j in 1..=k {
            let shifted = dp[j - 1].mul(&LPoly::l_pow(i))?;
            dp[j] = dp[j].add(&shifted)?;
        }
    }
    Ok(dp.swap_remove(k))
}

/// The Kapranov zeta series `Z_{P^n}(t) = prod_i (1 - L^i t)^{-1}` as a list
/// of its first `kmax + 1` coefficients.
pub fn kapranov_zeta_pn(n: usize, kmax: usize) -> Result<Vec<LPoly>, SeriesError> {
    (0..=kmax).map(|k| sym_class_pn(n, k)).collect()
}

/// `1 / zeta_{P^n}(s) = prod_{i=0}^{n} (1 - u^{s-i})`, exact.
pub fn zeta_inverse_pn(n: usize, s: i64) -> Result<LSeries, SeriesError> {
    if s <= n as i64 {
        return Err(SeriesError::Domain(format!("need s > n, got s = {s}, n = {n}")));
    }
    let mut acc = LSeries::one();
    for i in 0..=n as i64 {
        acc = acc.mul(&LSeries::one().sub(&LSeries::monomial(s - i))?)?;
    }
    Ok(acc)
}

/// `zeta_{P^n}(s)`, known below `u^window`.
pub fn zeta_value_pn(n: usize, s: i64, window: i64) -> Result<LSeries, SeriesError> {
    zeta_inverse_pn(n, s)?.invert(window)
}

/// `prod_{k >= 1} (1 - u^k)`, known through `u^prec`.
pub fn euler_limit_product(prec: usize) -> Result<LSeries, SeriesError> {
    if prec < 1 {
        return Err(SeriesError::Domain("precision must be at least 1".into()));
    }
    let window = prec as i64 + 1;
    let mut acc = LSeries::one().truncate(window);
    for k in 1..=prec as i64 {
        acc = acc.mul(&LSeries::one().sub(&LSeries::monomial(k))?)?;
    }
    Ok(acc)
}
