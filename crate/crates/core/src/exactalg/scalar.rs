use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::field::{FieldDescriptor, FiniteField};
use crate::error::{Error, Result};

/// Ground ring of a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    Z,
    Q,
    /// `F_p` when the field has degree one, `F_q` otherwise.
    F(FiniteField),
}

/// A ring element in canonical form. Integers and rationals share the
/// [`Scalar::Rat`] representation (integers carry denominator one); finite
/// field elements use the integer encoding of [`FiniteField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(BigRational),
    Fin(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingDescriptor {
    Z,
    Q,
    Fp { p: u64 },
    Fq(FieldDescriptor),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Q => write!(f, "Q"),
            Ring::F(k) if k.degree() == 1 => write!(f, "F{}", k.characteristic()),
            Ring::F(k) => write!(f, "F{}^{}", k.characteristic(), k.degree()),
        }
    }
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Self> {
        Ok(Ring::F(FiniteField::prime(p)?))
    }

    pub fn finite(p: u64, m: u32) -> Result<Self> {
        Ok(Ring::F(FiniteField::new(p, m)?))
    }

    /// Parses `Z`, `Q`, `F5` or `F2^3` (an optional `_` after `F` is accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::invalid(format!("unknown ring {text:?}; expected Z, Q, Fp or Fp^m"));
        match t {
            "Z" | "z" => return Ok(Ring::Z),
            "Q" | "q" => return Ok(Ring::Q),
            _ => {}
        }
        let rest = t.strip_prefix('F').or_else(|| t.strip_prefix('f')).ok_or_else(bad)?;
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let (p, m) = match rest.split_once('^') {
            Some((p, m)) => (p.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?),
            None => (rest.parse().map_err(|_| bad())?, 1),
        };
        Ring::finite(p, m)
    }

    pub fn descriptor(&self) -> RingDescriptor {
        match self {
            Ring::Z => RingDescriptor::Z,
            Ring::Q => RingDescriptor::Q,
            Ring::F(k) if k.degree() == 1 => RingDescriptor::Fp { p: k.characteristic() },
            Ring::F(k) => RingDescriptor::Fq(k.descriptor()),
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Z)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Ring::Z | Ring::Q => 0,
            Ring::F(k) => k.characteristic(),
        }
    }

    pub fn field(&self) -> Option<&FiniteField> {
        match self {
            Ring::F(k) => Some(k),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Ring::F(_) => Scalar::Fin(0),
            _ => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Ring::F(_) => Scalar::Fin(1),
            _ => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Ring::F(k) => Scalar::Fin(k.from_i64(v)),
            _ => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Ring::F(k) => {
                let p = BigInt::from(k.characteristic());
                Scalar::Fin(v.mod_floor(&p).to_u64().unwrap())
            }
            _ => Scalar::Rat(BigRational::from_integer(v.clone())),
        }
    }

    /// Maps a rational into this ring; fails when the value has no image
    /// (a fraction over `Z`, or a denominator divisible by the characteristic).
    pub fn from_rational(&self, v: &BigRational) -> Result<Scalar> {
        match self {
            Ring::Q => Ok(Scalar::Rat(v.clone())),
            Ring::Z => {
                if v.is_integer() {
                    Ok(Scalar::Rat(v.clone()))
                } else {
                    Err(Error::IntegralDefect(format!("{v} is not an integer")))
                }
            }
            Ring::F(k) => {
                let num = self.from_bigint(v.numer());
                let den = self.from_bigint(v.denom());
                match (num, den) {
                    (Scalar::Fin(n), Scalar::Fin(d)) => match k.inv(d) {
                        Some(di) => Ok(Scalar::Fin(k.mul(n, di))),
                        None => Err(Error::IntegralDefect(format!(
                            "{v} has a denominator divisible by {}",
                            k.characteristic()
                        ))),
                    },
                    _ => unreachable!(),
                }
            }
        }
    }

    /// Reduces an element of `Z` or `Q` into this ring.
    pub fn reduce(&self, s: &Scalar) -> Result<Scalar> {
        match s {
            Scalar::Rat(r) => self.from_rational(r),
            Scalar::Fin(v) => match self {
                Ring::F(_) => Ok(Scalar::Fin(*v)),
                _ => Err(Error::invalid("cannot lift a finite-field element")),
            },
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fin(v) => *v == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fin(v) => *v == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Ring::F(k), Scalar::Fin(x), Scalar::Fin(y)) => Scalar::Fin(k.add(*x, *y)),
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar ring mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Ring::F(k), Scalar::Fin(x)) => Scalar::Fin(k.neg(*x)),
            (_, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar ring mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Ring::F(k), Scalar::Fin(x), Scalar::Fin(y)) => Scalar::Fin(k.sub(*x, *y)),
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            _ => panic!("scalar ring mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Ring::F(k), Scalar::Fin(x), Scalar::Fin(y)) => Scalar::Fin(k.mul(*x, *y)),
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar ring mismatch"),
        }
    }

    /// Multiplicative inverse, if the element is a unit of the ring.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (Ring::F(k), Scalar::Fin(x)) => k.inv(*x).map(Scalar::Fin),
            (Ring::Q, Scalar::Rat(x)) if !x.is_zero() => Some(Scalar::Rat(x.recip())),
            (Ring::Z, Scalar::Rat(x)) if x.abs().is_one() => Some(Scalar::Rat(x.clone())),
            _ => None,
        }
    }

    /// `a^e` for a possibly negative exponent; `None` if `a` is not a unit
    /// and `e < 0`.
    pub fn pow(&self, a: &Scalar, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Some(acc)
    }

    /// All elements of a finite ring.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        self.field().map(|k| k.elements().map(Scalar::Fin).collect())
    }

    /// Nonzero elements of a finite ring.
    pub fn units(&self) -> Option<Vec<Scalar>> {
        self.field().map(|k| k.elements().skip(1).map(Scalar::Fin).collect())
    }
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Fin(_) => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rat(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Fin(v) => s.serialize_u64(*v),
            Scalar::Rat(r) if r.is_integer() => match r.to_integer().to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&r.to_string()),
            },
            Scalar::Rat(r) => s.serialize_str(&r.to_string()),
        }
    }
}

/// Parses a JSON scalar (integer, or a string such as `"-3/4"`) into `ring`.
pub fn scalar_from_json(ring: &Ring, v: &serde_json::Value) -> Result<Scalar> {
    let rational = match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::invalid(format!("non-integer number {n}")))?;
            BigRational::from_integer(BigInt::from(i))
        }
        serde_json::Value::String(s) => parse_rational(s)?,
        other => return Err(Error::invalid(format!("expected a scalar, found {other}"))),
    };
    ring.from_rational(&rational).map_err(|e| Error::invalid(e.to_string()))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let q = Ring::Q;
        let a = q.from_rational(&BigRational::new(2.into(), 4.into())).unwrap();
        let b = q.from_rational(&BigRational::new((-1).into(), (-2).into())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/2");
    }

    #[test]
    fn ring_names_round_trip() {
        for name in ["Z", "Q", "F5", "F2^3"] {
            assert_eq!(Ring::parse(name).unwrap().to_string(), name);
        }
        assert_eq!(Ring::parse("F_7").unwrap(), Ring::prime_field(7).unwrap());
        assert!(Ring::parse("F6").is_err());
        assert!(Ring::parse("R").is_err());
    }

    #[test]
    fn reduction_into_prime_field() {
        let f5 = Ring::prime_field(5).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f5.from_rational(&half).unwrap(), Scalar::Fin(3));
        let fifth = BigRational::new(1.into(), 5.into());
        assert!(f5.from_rational(&fifth).is_err());
        assert_eq!(f5.from_i64(-2), Scalar::Fin(3));
    }

    #[test]
    fn negative_powers() {
        let f5 = Ring::prime_field(5).unwrap();
        assert_eq!(f5.pow(&Scalar::Fin(2), -2), Some(Scalar::Fin(4)));
        assert_eq!(Ring::Z.pow(&Scalar::int(2), -1), None);
        assert_eq!(Ring::Z.pow(&Scalar::int(-1), -3), Some(Scalar::int(-1)));
    }

    #[test]
    fn json_scalars() {
        let v = serde_json::json!("-3/6");
        assert_eq!(
            scalar_from_json(&Ring::Q, &v).unwrap(),
            Scalar::Rat(BigRational::new((-1).into(), 2.into()))
        );
        assert!(scalar_from_json(&Ring::Z, &v).is_err());
    }
}
