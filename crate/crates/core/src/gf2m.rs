//! Arithmetic in GF(2^m), 1 <= m <= 8.
//!
//! Elements are stored as their polynomial-basis coefficient bits read as an
//! integer (bit `i` is the coefficient of `X^i`). That integer is also the
//! MAP index the element labels, so the zero element is MAP index 0.

use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Default primitive polynomials, indexed by `m`, including the `x^m` term.
const DEFAULT_POLYS: [u32; 9] = [
    0,
    0b11,         // x + 1
    0b111,        // x^2 + x + 1
    0b1011,       // x^3 + x + 1
    0b1_0011,     // x^4 + x + 1
    0b10_0101,    // x^5 + x^2 + 1
    0b100_0011,   // x^6 + x + 1
    0b1000_0011,  // x^7 + x + 1
    0b1_0001_1101, // x^8 + x^4 + x^3 + x^2 + 1
];

/// The field GF(2^m) realised by a primitive polynomial, with exp/log tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    m: u32,
    poly: u32,
    /// `exp[i] = alpha^i`, stored twice over so `log a + log b` needs no reduction.
    exp: Vec<u8>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) poly={:#x}", self.m, self.poly)
    }
}

/// Multiply two polynomials over GF(2) and reduce modulo `poly` (degree `m`).
///
/// Bit-serial shift-and-reduce; used to build the tables and as the reference
/// the table lookups are checked against.
pub fn mul_reduce(mut a: u32, mut b: u32, m: u32, poly: u32) -> u32 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

impl Field {
    /// GF(2^m) with the default primitive polynomial for `m`.
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=8).contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        Self::with_poly(m, DEFAULT_POLYS[m as usize])
    }

    /// GF(2^m) realised by `poly`, which must be primitive of degree `m`.
    pub fn with_poly(m: u32, poly: u32) -> Result<Self> {
        if !(1..=8).contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        if poly >> m != 1 {
            return Err(Error::NotPrimitive { m, poly });
        }
        let order = (1u32 << m) - 1;
        // alpha = X reduced mod poly (for m = 1 that is 1).
        let alpha = mul_reduce(1, 2, m, poly);
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u8; 1 << m];
        let mut x = 1u32;
        for i in 0..order {
            if i > 0 && x == 1 {
                // alpha's order is a proper divisor of 2^m - 1.
                return Err(Error::NotPrimitive { m, poly });
            }
            exp.push(x as u8);
            log[x as usize] = i as u8;
            x = mul_reduce(x, alpha, m, poly);
        }
        if x != 1 {
            return Err(Error::NotPrimitive { m, poly });
        }
        let first = exp.clone();
        exp.extend_from_slice(&first);
        Ok(Self { m, poly, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The primitive polynomial as a bitmask including the leading `x^m` bit.
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Multiplicative order of the primitive element, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    pub fn elem(&self, value: u32) -> Result<FieldElement<'_>> {
        if value as usize >= self.size() {
            return Err(Error::NotAnElement { value, m: self.m });
        }
        Ok(FieldElement {
            field: self,
            value: value as u8,
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement<'_>> {
        (0..self.size()).map(move |v| FieldElement {
            field: self,
            value: v as u8,
        })
    }

    /// `alpha^k` for the primitive element `alpha`.
    pub fn alpha_pow(&self, k: usize) -> u8 {
        self.exp[k % self.order()]
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let order = self.order();
        Ok(self.exp[(order - self.log[a as usize] as usize) % order])
    }

    /// `a^k`; `0^0` is taken as 1.
    pub fn pow(&self, a: u8, k: u64) -> u8 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 * (k % self.order() as u64)) % self.order() as u64;
        self.exp[e as usize]
    }

    /// Discrete log of a non-zero element.
    pub fn log(&self, a: u8) -> Result<usize> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.log[a as usize] as usize)
    }

    /// Human-readable polynomial form of an element, e.g. `X^2+X+1`.
    pub fn poly_string(&self, a: u8) -> String {
        if a == 0 {
            return "0".into();
        }
        let mut terms = Vec::new();
        for bit in (0..self.m).rev() {
            if a >> bit & 1 == 1 {
                terms.push(match bit {
                    0 => "1".to_string(),
                    1 => "X".to_string(),
                    b => format!("X^{b}"),
                });
            }
        }
        terms.join("+")
    }
}

/// A value in a particular [`Field`].
///
/// The operator impls panic on mixed fields; use the `checked_*` methods to
/// get an error instead.
#[derive(Clone, Copy)]
pub struct FieldElement<'f> {
    field: &'f Field,
    value: u8,
}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.poly_string(self.value))
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl Eq for FieldElement<'_> {}

impl<'f> FieldElement<'f> {
    pub fn value(self) -> u8 {
        self.value
    }

    /// The MAP index this element labels.
    pub fn map_index(self) -> usize {
        self.value as usize
    }

    pub fn field(self) -> &'f Field {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<()> {
        if std::ptr::eq(self.field, other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            value: self.value ^ other.value,
        })
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            value: self.field.mul(self.value, other.value),
        })
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            field: self.field,
            value: self.field.inv(self.value)?,
        })
    }

    pub fn pow(self, k: u64) -> Self {
        Self {
            field: self.field,
            value: self.field.pow(self.value, k),
        }
    }
}

impl<'f> Add for FieldElement<'f> {
    type Output = FieldElement<'f>;

    fn add(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs).expect("GF(2^m) add across fields")
    }
}

impl<'f> Mul for FieldElement<'f> {
    type Output = FieldElement<'f>;

    fn mul(self, rhs: Self) -> Self::Output {
        self.checked_mul(rhs).expect("GF(2^m) mul across fields")
    }
}
