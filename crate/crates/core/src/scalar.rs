//! Exact scalar fields.
//!
//! Every computation in the crate is generic over [`Scalar`]. Two families are
//! provided: the rationals (arbitrary precision, eliminated fraction-free) and
//! prime fields `Fp<P>` with the modulus fixed at the type level.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec::Prime(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not prime")))
        }
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    /// Fails unless every integer in `1..=bound` is invertible.
    pub fn require_inverses_up_to(&self, bound: u64, operation: &str) -> Result<()> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Prime(p) if *p > bound => Ok(()),
            FieldSpec::Prime(p) => Err(Error::CharacteristicUnsupported {
                operation: operation.to_string(),
                characteristic: *p,
            }),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "q" || t == "Q" || t == "rationals" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(p) = t.strip_prefix("fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad prime in field spec {t:?}")))?;
            return FieldSpec::prime(p);
        }
        Err(Error::InvalidInput(format!("unknown field spec {t:?}")))
    }
}

impl Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn field() -> FieldSpec;

    fn from_i64(n: i64) -> Self;

    /// `num / den`, or `None` when `den` vanishes in the field.
    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self>;

    /// Canonical text form, `"p/q"` or `"p"`.
    fn to_exact_string(&self) -> String;

    /// A square root in the field, if one exists.
    fn sqrt(&self) -> Option<Self>;

    /// Rank of the span of the given sparse rows (sorted by column, no zeros).
    fn rank_of_rows(rows: Vec<Vec<(usize, Self)>>) -> usize {
        gauss_rank(rows)
    }

    fn sign(parity_odd: bool) -> Self {
        if parity_odd {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn parse_exact(text: &str) -> Result<Self> {
        let (num, den) = parse_fraction(text)?;
        Self::from_ratio(&num, &den)
            .ok_or_else(|| Error::InvalidInput(format!("{text:?} has a denominator that vanishes in {}", Self::field())))
    }
}

pub(crate) fn parse_fraction(text: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::InvalidInput(format!("malformed exact coefficient {text:?}; expected \"p\" or \"p/q\""));
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok((num, den))
}

/// Plain Gaussian elimination on sparse rows.
fn gauss_rank<S: Scalar>(rows: Vec<Vec<(usize, S)>>) -> usize {
    let mut pivots: std::collections::BTreeMap<usize, Vec<(usize, S)>> = Default::default();
    for mut row in rows {
        while let Some((lead, lead_val)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => {
                    let factor = lead_val / p[0].1.clone();
                    row = axpy_rows(&row, &S::one(), p, &(-factor));
                }
                None => {
                    let inv = S::one() / lead_val;
                    let normalized = row.into_iter().map(|(c, v)| (c, v * inv.clone())).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `a * x + b * y` on sorted sparse rows.
pub(crate) fn axpy_rows<S: Scalar>(x: &[(usize, S)], a: &S, y: &[(usize, S)], b: &S) -> Vec<(usize, S)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take = match (x.get(i), y.get(j)) {
            (Some((cx, _)), Some((cy, _))) => cx.cmp(cy),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => unreachable!(),
        };
        let (c, v) = match take {
            std::cmp::Ordering::Less => {
                let (c, v) = &x[i];
                i += 1;
                (*c, a.clone() * v.clone())
            }
            std::cmp::Ordering::Greater => {
                let (c, v) = &y[j];
                j += 1;
                (*c, b.clone() * v.clone())
            }
            std::cmp::Ordering::Equal => {
                let (c, vx) = &x[i];
                let (_, vy) = &y[j];
                i += 1;
                j += 1;
                (*c, a.clone() * vx.clone() + b.clone() * vy.clone())
            }
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

pub type Rational = BigRational;

impl Scalar for BigRational {
    fn field() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }

    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    /// Fraction-free elimination: rows are scaled to primitive integer
    /// vectors and combined by cross-multiplication, dividing out the
    /// content after every step so entries stay small.
    fn rank_of_rows(rows: Vec<Vec<(usize, Self)>>) -> usize {
        let mut pivots: std::collections::BTreeMap<usize, Vec<(usize, BigInt)>> = Default::default();
        for row in rows {
            let mut row = integral_row(&row);
            while let Some((lead, lead_val)) = row.first().cloned() {
                match pivots.get(&lead) {
                    Some(p) => {
                        let pv = &p[0].1;
                        let g = lead_val.gcd(pv);
                        let a = pv / &g;
                        let b = -(&lead_val / &g);
                        row = combine_int(&row, &a, p, &b);
                        make_primitive(&mut row);
                    }
                    None => {
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

fn integral_row(row: &[(usize, BigRational)]) -> Vec<(usize, BigInt)> {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [(usize, BigInt)]) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

fn combine_int(x: &[(usize, BigInt)], a: &BigInt, y: &[(usize, BigInt)], b: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (c, v) = match (x.get(i), y.get(j)) {
            (Some((cx, vx)), Some((cy, vy))) if cx == cy => {
                i += 1;
                j += 1;
                (*cx, a * vx + b * vy)
            }
            (Some((cx, vx)), Some((cy, _))) if cx < cy => {
                i += 1;
                (*cx, a * vx)
            }
            (Some(_), Some((cy, vy))) => {
                j += 1;
                (*cy, b * vy)
            }
            (Some((cx, vx)), None) => {
                i += 1;
                (*cx, a * vx)
            }
            (None, Some((cy, vy))) => {
                j += 1;
                (*cy, b * vy)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Element of the prime field with `P` elements. `P` must be prime; the
/// aliases below are the moduli the command line dispatches over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn inverse(self) -> Self {
        assert!(self.0 != 0, "division by zero in F_{P}");
        self.pow(P - 2)
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {P})", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp(((self.0 as u128 + o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp(((self.0 as u128 + P as u128 - o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inverse()
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn field() -> FieldSpec {
        FieldSpec::Prime(P)
    }

    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }

    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        let reduce = |x: &BigInt| -> Fp<P> {
            let r = x.mod_floor(&BigInt::from(P));
            Fp(r.to_u64().unwrap_or(0))
        };
        let d = reduce(den);
        if d.is_zero() {
            None
        } else {
            Some(reduce(num) / d)
        }
    }

    fn to_exact_string(&self) -> String {
        self.0.to_string()
    }

    fn sqrt(&self) -> Option<Self> {
        tonelli_shanks::<P>(*self)
    }
}

fn tonelli_shanks<const P: u64>(a: Fp<P>) -> Option<Fp<P>> {
    if a.is_zero() || P == 2 {
        return Some(a);
    }
    if a.pow((P - 1) / 2) != Fp::one() {
        return None;
    }
    let (mut q, mut s) = (P - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = Fp::<P>(2);
    while z.pow((P - 1) / 2) == Fp::one() {
        z = z + Fp::one();
    }
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = a.pow(q);
    let mut r = a.pow((q + 1) / 2);
    while t != Fp::one() {
        let mut i = 0u32;
        let mut tt = t;
        while tt != Fp::one() {
            tt = tt * tt;
            i += 1;
        }
        let b = c.pow(1u64 << (m - i - 1));
        m = i;
        c = b * b;
        t = t * c;
        r = r * b;
    }
    Some(r)
}

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;
pub type F11 = Fp<11>;
pub type F13 = Fp<13>;
pub type F101 = Fp<101>;
pub type F32003 = Fp<32003>;
pub type F65521 = Fp<65521>;
pub type F2147483647 = Fp<2147483647>;

/// Moduli accepted by `fp:P` on the command line.
pub const SUPPORTED_PRIMES: &[u64] = &[2, 3, 5, 7, 11, 13, 101, 32003, 65521, 2147483647];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions() {
        let q = Rational::parse_exact("-3/6").unwrap();
        assert_eq!(q.to_exact_string(), "-1/2");
        assert!(Rational::parse_exact("1/0").is_err());
        assert!(Rational::parse_exact("0.5").is_err());
        let f = F7::parse_exact("1/2").unwrap();
        assert_eq!(f * F7::from_i64(2), F7::one());
        assert!(F7::parse_exact("1/7").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = F13::from_i64(5);
        assert_eq!(a / a, F13::one());
        assert_eq!(-a + a, F13::zero());
        assert_eq!(F13::from_i64(-1).to_exact_string(), "12");
    }

    #[test]
    fn square_roots() {
        let four = Rational::from_i64(4) / Rational::from_i64(9);
        assert_eq!(four.sqrt().unwrap().to_exact_string(), "2/3");
        assert!(Rational::from_i64(2).sqrt().is_none());
        for v in 1..101 {
            let x = F101::from_i64(v);
            let r = (x * x).sqrt().unwrap();
            assert_eq!(r * r, x * x);
        }
        assert!(F7::from_i64(3).sqrt().is_none());
    }

    #[test]
    fn fraction_free_rank_matches_plain_elimination() {
        let r = |v: i64| Rational::from_i64(v);
        let rows = vec![
            vec![(0, r(2)), (1, r(4)), (3, r(6))],
            vec![(0, r(3)), (1, r(6)), (3, r(9))],
            vec![(1, r(1)), (2, r(-1))],
        ];
        assert_eq!(Rational::rank_of_rows(rows.clone()), 2);
        assert_eq!(gauss_rank(rows), 2);
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(FieldSpec::parse("q").unwrap(), FieldSpec::Rationals);
        assert_eq!(FieldSpec::parse("fp:7").unwrap(), FieldSpec::Prime(7));
        assert!(FieldSpec::parse("fp:8").is_err());
        assert!(FieldSpec::Prime(3).require_inverses_up_to(3, "sym").is_err());
        assert!(FieldSpec::Prime(5).require_inverses_up_to(3, "sym").is_ok());
    }
}
