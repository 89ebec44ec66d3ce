//! Exact scalar arithmetic over `F_p`, `F_{p^k}` and `Q`.
//!
//! A [`FieldCtx`] is a cheap handle (an `Arc`) describing the field; the
//! values themselves are plain [`Scalar`]s and every operation goes through
//! the context. Extension elements are packed as base-`p` integers
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` where `c_i` are the coefficients of
//! the residue polynomial modulo the defining modulus.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FfError;
use super::fp_poly;

/// Largest prime accepted for `F_p`.
pub const MAX_PRIME: u64 = 1 << 31;
/// Largest field order accepted for `F_{p^k}`.
pub const MAX_EXTENSION_ORDER: u64 = 1 << 48;
/// Extensions up to this order get log/antilog tables.
pub const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    Prime { p: u64 },
    /// `modulus` holds the coefficients of the monic defining polynomial,
    /// lowest degree first, so `modulus.len() == k + 1`.
    Extension { p: u64, k: u32, modulus: Vec<u64> },
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scalar {
    /// Residue mod `p`, or a packed extension element.
    Fq(u64),
    Q(BigRational),
}

impl Scalar {
    pub fn as_fq(&self) -> Option<u64> {
        match self {
            Scalar::Fq(v) => Some(*v),
            Scalar::Q(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fq(v) => write!(f, "{v}"),
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

struct LogTables {
    /// `exp[i] = g^i` packed, for `i < q - 1`.
    exp: Vec<u64>,
    /// `log[v]` for packed `v != 0`.
    log: Vec<u32>,
}

struct Inner {
    kind: FieldKind,
    tables: Option<LogTables>,
}

/// Handle to a field. Clones share the same tables.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<Inner>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.kind == other.inner.kind
    }
}
impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.kind.hash(state);
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self)
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.kind {
            FieldKind::Prime { p } => write!(f, "F_{p}"),
            FieldKind::Extension { p, k, .. } => write!(f, "F_{p}^{k}"),
            FieldKind::Rational => write!(f, "Q"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn default_moduli() -> &'static Mutex<HashMap<(u64, u32), Vec<u64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Vec<u64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn shared_fields() -> &'static Mutex<HashMap<FieldKind, FieldCtx>> {
    static CACHE: OnceLock<Mutex<HashMap<FieldKind, FieldCtx>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The least monic primitive polynomial of degree `k` over `F_p`, ordering
/// candidates by their packed lower coefficients.
fn least_primitive_modulus(p: u64, k: u32) -> Vec<u64> {
    if let Some(m) = default_moduli().lock().unwrap().get(&(p, k)) {
        return m.clone();
    }
    let q = p.pow(k);
    let factors = prime_factors(q - 1);
    let mut found = None;
    for packed in 0..q {
        let mut m = fp_poly::unpack(packed, p, k as usize);
        m.resize(k as usize, 0);
        m.push(1);
        if m[0] == 0 {
            continue;
        }
        if !fp_poly::is_irreducible(&m, p) {
            continue;
        }
        let x = vec![0, 1];
        let primitive = factors
            .iter()
            .all(|r| fp_poly::powmod(&x, (q - 1) / r, &m, p) != vec![1]);
        if primitive {
            found = Some(m);
            break;
        }
    }
    let m = found.expect("a primitive polynomial exists in every degree");
    default_moduli().lock().unwrap().insert((p, k), m.clone());
    m
}

impl FieldCtx {
    fn from_kind(kind: FieldKind) -> FieldCtx {
        if let Some(ctx) = shared_fields().lock().unwrap().get(&kind) {
            return ctx.clone();
        }
        let tables = match &kind {
            FieldKind::Extension { p, k, modulus } if p.pow(*k) <= TABLE_LIMIT => {
                Some(build_tables(*p, *k, modulus))
            }
            _ => None,
        };
        let ctx = FieldCtx { inner: Arc::new(Inner { kind: kind.clone(), tables }) };
        shared_fields().lock().unwrap().insert(kind, ctx.clone());
        ctx
    }

    pub fn prime(p: u64) -> Result<FieldCtx, FfError> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(FfError::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Self::from_kind(FieldKind::Prime { p }))
    }

    /// `F_{p^k}` with the default (least primitive) modulus. `k = 1` gives `F_p`.
    pub fn extension(p: u64, k: u32) -> Result<FieldCtx, FfError> {
        if k == 0 {
            return Err(FfError::InvalidField("extension degree must be >= 1".into()));
        }
        if k == 1 {
            return Self::prime(p);
        }
        Self::prime(p)?;
        check_order(p, k)?;
        let modulus = least_primitive_modulus(p, k);
        Ok(Self::from_kind(FieldKind::Extension { p, k, modulus }))
    }

    /// `F_{p^k}` from an explicit monic modulus (lowest coefficient first).
    pub fn extension_with_modulus(p: u64, modulus: &[u64]) -> Result<FieldCtx, FfError> {
        Self::prime(p)?;
        if modulus.len() < 2 {
            return Err(FfError::InvalidField("modulus must have degree >= 1".into()));
        }
        let k = (modulus.len() - 1) as u32;
        if *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FfError::InvalidField("modulus must be monic with coefficients < p".into()));
        }
        if k == 1 {
            return Self::prime(p);
        }
        check_order(p, k)?;
        if !fp_poly::is_irreducible(modulus, p) {
            return Err(FfError::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Ok(Self::from_kind(FieldKind::Extension { p, k, modulus: modulus.to_vec() }))
    }

    /// `F_q` for a prime power `q`.
    pub fn finite(q: u64) -> Result<FieldCtx, FfError> {
        let (p, k) = prime_power(q).ok_or_else(|| FfError::InvalidField(format!("{q} is not a prime power")))?;
        Self::extension(p, k)
    }

    pub fn rational() -> FieldCtx {
        Self::from_kind(FieldKind::Rational)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.inner.kind
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.inner.kind, FieldKind::Rational)
    }

    /// Characteristic (0 for `Q`).
    pub fn characteristic(&self) -> u64 {
        match &self.inner.kind {
            FieldKind::Prime { p } | FieldKind::Extension { p, .. } => *p,
            FieldKind::Rational => 0,
        }
    }

    /// Degree over the prime field (1 for `F_p` and `Q`).
    pub fn degree(&self) -> u32 {
        match &self.inner.kind {
            FieldKind::Extension { k, .. } => *k,
            _ => 1,
        }
    }

    /// Number of elements, `None` for `Q`.
    pub fn order(&self) -> Option<u64> {
        match &self.inner.kind {
            FieldKind::Prime { p } => Some(*p),
            FieldKind::Extension { p, k, .. } => Some(p.pow(*k)),
            FieldKind::Rational => None,
        }
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        match &self.inner.kind {
            FieldKind::Extension { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    pub fn has_tables(&self) -> bool {
        self.inner.tables.is_some()
    }

    pub fn zero(&self) -> Scalar {
        match self.inner.kind {
            FieldKind::Rational => Scalar::Q(BigRational::zero()),
            _ => Scalar::Fq(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.inner.kind {
            FieldKind::Rational => Scalar::Q(BigRational::one()),
            _ => Scalar::Fq(1),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match &self.inner.kind {
            FieldKind::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            FieldKind::Prime { p } | FieldKind::Extension { p, .. } => {
                Scalar::Fq(v.rem_euclid(*p as i64) as u64)
            }
        }
    }

    pub fn from_rational(&self, num: i64, den: i64) -> Result<Scalar, FfError> {
        if den == 0 {
            return Err(FfError::DivisionByZero);
        }
        match &self.inner.kind {
            FieldKind::Rational => Ok(Scalar::Q(BigRational::new(num.into(), den.into()))),
            _ => {
                let d = self.from_i64(den);
                self.div(&self.from_i64(num), &d)
            }
        }
    }

    /// The `i`-th element in packed order, `0 <= i < q`.
    pub fn element(&self, i: u64) -> Scalar {
        debug_assert!(self.order().is_none_or(|q| i < q));
        match self.inner.kind {
            FieldKind::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(i))),
            _ => Scalar::Fq(i),
        }
    }

    /// Iterator over all elements of a finite field in packed order.
    pub fn elements(&self) -> Option<impl Iterator<Item = Scalar> + '_> {
        self.order().map(|q| (0..q).map(Scalar::Fq))
    }

    /// Uniform element of a finite field; integers in `[-20, 20]` over `Q`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self.order() {
            Some(q) => Scalar::Fq(rng.gen_range(0..q)),
            None => self.from_i64(rng.gen_range(-20..=20)),
        }
    }

    /// Uniform nonzero element; nonzero integers in `[-20, 20]` over `Q`.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random(rng);
            if !self.is_zero(&s) {
                return s;
            }
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        match (&self.inner.kind, x) {
            (FieldKind::Rational, Scalar::Q(_)) => true,
            (FieldKind::Prime { p }, Scalar::Fq(v)) => v < p,
            (FieldKind::Extension { p, k, .. }, Scalar::Fq(v)) => *v < p.pow(*k),
            _ => false,
        }
    }

    pub fn check(&self, x: &Scalar) -> Result<(), FfError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(FfError::ContextMismatch(format!("{x} is not an element of {self}")))
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Fq(v) => *v == 0,
            Scalar::Q(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Fq(v) => *v == 1,
            Scalar::Q(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.inner.kind, a, b) {
            (FieldKind::Prime { p }, Scalar::Fq(x), Scalar::Fq(y)) => Scalar::Fq((x + y) % p),
            (FieldKind::Extension { p, .. }, Scalar::Fq(x), Scalar::Fq(y)) => {
                Scalar::Fq(packed_add(*x, *y, *p))
            }
            (FieldKind::Rational, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (&self.inner.kind, a) {
            (FieldKind::Prime { p }, Scalar::Fq(x)) => Scalar::Fq((p - x) % p),
            (FieldKind::Extension { p, .. }, Scalar::Fq(x)) => Scalar::Fq(packed_neg(*x, *p)),
            (FieldKind::Rational, Scalar::Q(x)) => Scalar::Q(-x),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.inner.kind, a, b) {
            (FieldKind::Prime { p }, Scalar::Fq(x), Scalar::Fq(y)) => Scalar::Fq(x * y % p),
            (FieldKind::Extension { p, k, modulus }, Scalar::Fq(x), Scalar::Fq(y)) => {
                if *x == 0 || *y == 0 {
                    return Scalar::Fq(0);
                }
                match &self.inner.tables {
                    Some(t) => {
                        let n = t.exp.len() as u64;
                        let l = (t.log[*x as usize] as u64 + t.log[*y as usize] as u64) % n;
                        Scalar::Fq(t.exp[l as usize])
                    }
                    None => {
                        let k = *k as usize;
                        let prod = fp_poly::mulmod(
                            &fp_poly::unpack(*x, *p, k),
                            &fp_poly::unpack(*y, *p, k),
                            modulus,
                            *p,
                        );
                        Scalar::Fq(fp_poly::pack(&prod, *p))
                    }
                }
            }
            (FieldKind::Rational, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, FfError> {
        if self.is_zero(a) {
            return Err(FfError::DivisionByZero);
        }
        Ok(match (&self.inner.kind, a) {
            (FieldKind::Prime { p }, Scalar::Fq(x)) => Scalar::Fq(pow_mod(*x, p - 2, *p)),
            (FieldKind::Extension { p, k, modulus }, Scalar::Fq(x)) => match &self.inner.tables {
                Some(t) => {
                    let n = t.exp.len() as u64;
                    let l = (n - t.log[*x as usize] as u64) % n;
                    Scalar::Fq(t.exp[l as usize])
                }
                None => {
                    let inv = fp_poly::inverse_mod(&fp_poly::unpack(*x, *p, *k as usize), modulus, *p)
                        .expect("nonzero residue modulo an irreducible is invertible");
                    Scalar::Fq(fp_poly::pack(&inv, *p))
                }
            },
            (FieldKind::Rational, Scalar::Q(x)) => Scalar::Q(x.recip()),
            _ => panic!("scalar does not belong to {self}"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, FfError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer exponent count in the field (`k * 1`).
    pub fn from_count(&self, k: u64) -> Scalar {
        match &self.inner.kind {
            FieldKind::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(k))),
            FieldKind::Prime { p } | FieldKind::Extension { p, .. } => Scalar::Fq(k % p),
        }
    }

    /// Raw packed-element multiplication for finite fields.
    #[inline]
    pub(crate) fn mul_fq(&self, a: u64, b: u64) -> u64 {
        match &self.inner.kind {
            FieldKind::Prime { p } => a * b % p,
            _ => match self.mul(&Scalar::Fq(a), &Scalar::Fq(b)) {
                Scalar::Fq(v) => v,
                Scalar::Q(_) => unreachable!(),
            },
        }
    }

    #[inline]
    pub(crate) fn add_fq(&self, a: u64, b: u64) -> u64 {
        match &self.inner.kind {
            FieldKind::Prime { p } => (a + b) % p,
            FieldKind::Extension { p, .. } => packed_add(a, b, *p),
            FieldKind::Rational => unreachable!(),
        }
    }

    #[inline]
    pub(crate) fn neg_fq(&self, a: u64) -> u64 {
        match &self.inner.kind {
            FieldKind::Prime { p } => (p - a) % p,
            FieldKind::Extension { p, .. } => packed_neg(a, *p),
            FieldKind::Rational => unreachable!(),
        }
    }

    pub(crate) fn inv_fq(&self, a: u64) -> u64 {
        match self.inv(&Scalar::Fq(a)) {
            Ok(Scalar::Fq(v)) => v,
            _ => panic!("inverse of zero"),
        }
    }

    /// Smallest packed root of `poly` (over `F_p`, lowest coefficient first)
    /// found by exhaustive search; requires a finite field of order at most
    /// [`TABLE_LIMIT`].
    pub fn smallest_root(&self, poly: &[u64]) -> Result<Option<Scalar>, FfError> {
        let q = self.order().ok_or_else(|| FfError::Unsupported("root search over Q".into()))?;
        if q > TABLE_LIMIT {
            return Err(FfError::Capacity(format!("root search in a field of order {q}")));
        }
        for v in 0..q {
            let x = Scalar::Fq(v);
            let mut acc = self.zero();
            for c in poly.iter().rev() {
                acc = self.add(&self.mul(&acc, &x), &Scalar::Fq(*c));
            }
            if self.is_zero(&acc) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }

    /// Whether `self` embeds into `target`.
    pub fn embeds_into(&self, target: &FieldCtx) -> bool {
        match (self.kind(), target.kind()) {
            (FieldKind::Rational, FieldKind::Rational) => true,
            (FieldKind::Rational, _) | (_, FieldKind::Rational) => false,
            _ => {
                self.characteristic() == target.characteristic()
                    && target.degree() % self.degree() == 0
            }
        }
    }

    /// Builds the canonical embedding `self -> target`: the prime field maps
    /// identically, and a proper extension sends its generator to the
    /// smallest root of its modulus in `target`.
    pub fn embedding(&self, target: &FieldCtx) -> Result<Embedding, FfError> {
        if !self.embeds_into(target) {
            return Err(FfError::ContextMismatch(format!("{self} does not embed into {target}")));
        }
        let root = match self.kind() {
            FieldKind::Extension { modulus, .. } if self != target => {
                let r = target
                    .smallest_root(modulus)?
                    .expect("an extension containing the field has a root of its modulus");
                Some(r)
            }
            _ => None,
        };
        Ok(Embedding { source: self.clone(), target: target.clone(), root })
    }

    /// The smallest field containing both (same characteristic required).
    pub fn compositum(&self, other: &FieldCtx) -> Result<FieldCtx, FfError> {
        if self.is_rational() && other.is_rational() {
            return Ok(self.clone());
        }
        if self.characteristic() != other.characteristic() || self.is_rational() || other.is_rational() {
            return Err(FfError::ContextMismatch(format!("no compositum of {self} and {other}")));
        }
        if self.embeds_into(other) {
            return Ok(other.clone());
        }
        if other.embeds_into(self) {
            return Ok(self.clone());
        }
        let k = num_integer::lcm(self.degree(), other.degree());
        FieldCtx::extension(self.characteristic(), k)
    }
}

/// A field homomorphism between two contexts.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FieldCtx,
    target: FieldCtx,
    root: Option<Scalar>,
}

impl Embedding {
    pub fn source(&self) -> &FieldCtx {
        &self.source
    }

    pub fn target(&self) -> &FieldCtx {
        &self.target
    }

    pub fn apply(&self, x: &Scalar) -> Scalar {
        match (&self.root, x) {
            (None, _) => x.clone(),
            (Some(root), Scalar::Fq(v)) => {
                let p = self.source.characteristic();
                let digits = fp_poly::unpack(*v, p, self.source.degree() as usize);
                let t = &self.target;
                let mut acc = t.zero();
                for c in digits.iter().rev() {
                    acc = t.add(&t.mul(&acc, root), &Scalar::Fq(*c));
                }
                acc
            }
            (Some(_), Scalar::Q(_)) => unreachable!("finite embedding applied to a rational"),
        }
    }
}

fn check_order(p: u64, k: u32) -> Result<(), FfError> {
    match p.checked_pow(k) {
        Some(q) if q <= MAX_EXTENSION_ORDER => Ok(()),
        _ => Err(FfError::Capacity(format!("F_{p}^{k} exceeds the supported order 2^48"))),
    }
}

/// Splits `q = p^k`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = prime_factors(q)[0];
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn packed_add(mut x: u64, mut y: u64, p: u64) -> u64 {
    if p == 2 {
        return x ^ y;
    }
    let mut out = 0;
    let mut place = 1;
    while x > 0 || y > 0 {
        let d = (x % p + y % p) % p;
        out += d * place;
        place *= p;
        x /= p;
        y /= p;
    }
    out
}

fn packed_neg(mut x: u64, p: u64) -> u64 {
    if p == 2 {
        return x;
    }
    let mut out = 0;
    let mut place = 1;
    while x > 0 {
        let d = (p - x % p) % p;
        out += d * place;
        place *= p;
        x /= p;
    }
    out
}

fn build_tables(p: u64, k: u32, modulus: &[u64]) -> LogTables {
    let q = p.pow(k);
    let n = (q - 1) as usize;
    let factors = prime_factors(q - 1);
    let kk = k as usize;
    // x is a generator when the modulus is primitive; otherwise search.
    let generator = (1..q)
        .map(|g| fp_poly::unpack(g, p, kk))
        .find(|g| {
            factors
                .iter()
                .all(|r| fp_poly::powmod(g, (q - 1) / r, modulus, p) != vec![1])
        })
        .expect("the multiplicative group is cyclic");
    let mut exp = Vec::with_capacity(n);
    let mut log = vec![0u32; q as usize];
    let mut cur = vec![1u64];
    for i in 0..n {
        let packed = fp_poly::pack(&cur, p);
        exp.push(packed);
        log[packed as usize] = i as u32;
        cur = fp_poly::mulmod(&cur, &generator, modulus, p);
    }
    LogTables { exp, log }
}

impl FieldCtx {
    /// Converts a rational scalar to a [`BigRational`] reference.
    pub fn as_rational<'a>(&self, x: &'a Scalar) -> Option<&'a BigRational> {
        match x {
            Scalar::Q(r) => Some(r),
            _ => None,
        }
    }

    /// Parses a textual scalar: integers (reduced mod p / packed for
    /// extensions) or `a/b` fractions.
    pub fn parse(&self, s: &str) -> Result<Scalar, FfError> {
        let s = s.trim();
        let bad = || FfError::Parse(format!("cannot parse scalar `{s}` in {self}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(FfError::DivisionByZero);
            }
            return match &self.inner.kind {
                FieldKind::Rational => Ok(Scalar::Q(BigRational::new(a, b))),
                _ => {
                    let num = self.parse(&a.to_string())?;
                    let den = self.parse(&b.to_string())?;
                    self.div(&num, &den)
                }
            };
        }
        let v: BigInt = s.parse().map_err(|_| bad())?;
        match &self.inner.kind {
            FieldKind::Rational => Ok(Scalar::Q(BigRational::from_integer(v))),
            FieldKind::Prime { p } => {
                let r = ((v % BigInt::from(*p)) + BigInt::from(*p)) % BigInt::from(*p);
                Ok(Scalar::Fq(u64::try_from(r).unwrap()))
            }
            FieldKind::Extension { p, k, .. } => {
                if v.is_negative() || v >= BigInt::from(p.pow(*k)) {
                    return Err(FfError::Parse(format!("packed element {v} out of range for {self}")));
                }
                Ok(Scalar::Fq(u64::try_from(v).unwrap()))
            }
        }
    }
}
