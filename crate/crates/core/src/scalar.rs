//! Exact scalar types for the linear-algebra substrate.
//!
//! Everything in this crate computes over exact fields: the rationals for
//! all the algebra, and prime fields for determinant checks modulo q.
//! [`Scalar`] is the small trait the elimination routines are generic over.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact ring arithmetic, enough for matrix assembly and products.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// An exact field scalar: arithmetic never rounds, and every nonzero
/// element is invertible.
pub trait Scalar: Ring + Display + Div<Output = Self> {
    fn from_i64(v: i64) -> Self;

    /// Rescale a nonzero vector to its canonical representative within its
    /// line. The scaling factor is always a nonzero scalar, so spans are
    /// unchanged.
    fn canonicalize_vector(v: &mut [Self]);
}

/// The rational scalar used throughout the crate.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar for Rat {
    fn from_i64(v: i64) -> Self {
        rat_int(v)
    }

    /// Clear denominators, divide by the content, and make the first
    /// nonzero entry positive.
    fn canonicalize_vector(v: &mut [Self]) {
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut content = BigInt::zero();
        let mut first_nonzero_negative = false;
        let mut seen_nonzero = false;
        let nums: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
        for n in &nums {
            if n.is_zero() {
                continue;
            }
            if !seen_nonzero {
                seen_nonzero = true;
                first_nonzero_negative = n.is_negative();
            }
            content = content.gcd(n);
        }
        if !seen_nonzero {
            return;
        }
        if first_nonzero_negative {
            content = -content;
        }
        for (slot, n) in v.iter_mut().zip(nums) {
            *slot = BigRational::from_integer(n / &content);
        }
    }
}

/// A prime-field element with a runtime modulus.
///
/// The modulus 0 marks an integer literal that has not been bound to a
/// field yet; it unifies with any concrete modulus on first contact. This
/// lets `Fq` satisfy `Zero`/`One` (which have no modulus to hand) while
/// keeping mixed-modulus arithmetic a loud bug.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fq {
    value: i64,
    modulus: u64,
}

impl Fq {
    pub fn new(value: i64, q: u64) -> Self {
        assert!(q >= 2, "modulus must be at least 2");
        let m = q as i128;
        let v = ((value as i128 % m) + m) % m;
        Fq {
            value: v as i64,
            modulus: q,
        }
    }

    pub fn value(&self) -> u64 {
        assert!(self.modulus != 0 || self.value >= 0);
        if self.modulus == 0 {
            self.value as u64
        } else {
            self.value as u64 % self.modulus
        }
    }

    fn unify(a: Fq, b: Fq) -> (i64, i64, u64) {
        let q = match (a.modulus, b.modulus) {
            (0, 0) => 0,
            (0, q) | (q, 0) => q,
            (p, q) => {
                assert_eq!(p, q, "mixed moduli {p} and {q}");
                q
            }
        };
        if q == 0 {
            (a.value, b.value, 0)
        } else {
            (Fq::new(a.value, q).value, Fq::new(b.value, q).value, q)
        }
    }

    fn inv(&self) -> Fq {
        let q = self.modulus;
        assert!(q >= 2, "cannot invert an unbound literal");
        let v = Fq::new(self.value, q).value;
        assert!(v != 0, "division by zero in F_{q}");
        // extended Euclid
        let (mut r0, mut r1) = (q as i128, v as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let quo = r0 / r1;
            (r0, r1) = (r1, r0 - quo * r1);
            (s0, s1) = (s1, s0 - quo * s1);
        }
        assert_eq!(r0, 1, "{} is not invertible mod {}", v, q);
        Fq::new(s0 as i64, q)
    }
}

impl Display for Fq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        let (a, b, q) = Fq::unify(self, rhs);
        if q == 0 {
            Fq {
                value: a + b,
                modulus: 0,
            }
        } else {
            Fq::new(a + b, q)
        }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        let (a, b, q) = Fq::unify(self, rhs);
        if q == 0 {
            Fq {
                value: a - b,
                modulus: 0,
            }
        } else {
            Fq::new(a - b, q)
        }
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        if self.modulus == 0 {
            Fq {
                value: -self.value,
                modulus: 0,
            }
        } else {
            Fq::new(-self.value, self.modulus)
        }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        let (a, b, q) = Fq::unify(self, rhs);
        if q == 0 {
            Fq {
                value: a * b,
                modulus: 0,
            }
        } else {
            Fq::new(((a as i128 * b as i128) % q as i128) as i64, q)
        }
    }
}

impl Div for Fq {
    type Output = Fq;
    fn div(self, rhs: Fq) -> Fq {
        let (a, b, q) = Fq::unify(self, rhs);
        assert!(q >= 2, "cannot divide unbound literals");
        Fq::new(a, q)
            * Fq {
                value: b,
                modulus: q,
            }
            .inv()
    }
}

impl Zero for Fq {
    fn zero() -> Self {
        Fq {
            value: 0,
            modulus: 0,
        }
    }
    fn is_zero(&self) -> bool {
        if self.modulus == 0 {
            self.value == 0
        } else {
            self.value % self.modulus as i64 == 0
        }
    }
}

impl One for Fq {
    fn one() -> Self {
        Fq {
            value: 1,
            modulus: 0,
        }
    }
}

impl Scalar for Fq {
    fn from_i64(v: i64) -> Self {
        Fq {
            value: v,
            modulus: 0,
        }
    }

    /// Scale so the first nonzero entry is 1.
    fn canonicalize_vector(v: &mut [Self]) {
        let lead = match v.iter().find(|x| !x.is_zero()) {
            Some(x) => *x,
            None => return,
        };
        let inv = lead.inv();
        for x in v.iter_mut() {
            *x = *x * inv;
        }
    }
}
