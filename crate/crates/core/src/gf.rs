//! Arithmetic in GF(2^m) via log/antilog tables.
//!
//! Elements are plain `u16` values below `2^m`; addition is XOR. Zero has no
//! logarithm, so `mul`, `div` and `inv` branch on it explicitly.

use std::fmt;

use crate::error::{Error, Result};

/// Conventional primitive polynomial for GF(256): x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256_POLY: u32 = 0x11D;
/// Primitive polynomial for GF(16): x^4 + x + 1.
pub const GF16_POLY: u32 = 0x13;

/// Field description: extension degree and the primitive polynomial as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub m: u32,
    pub primitive_poly: u32,
}

impl FieldSpec {
    pub fn new(m: u32, primitive_poly: u32) -> Self {
        FieldSpec { m, primitive_poly }
    }

    pub fn gf16() -> Self {
        FieldSpec::new(4, GF16_POLY)
    }

    pub fn gf256() -> Self {
        FieldSpec::new(8, GF256_POLY)
    }

    /// Default primitive polynomial for the supported degrees.
    pub fn default_for(m: u32) -> Option<Self> {
        let poly = match m {
            2 => 0x7,
            3 => 0xB,
            4 => GF16_POLY,
            5 => 0x25,
            6 => 0x43,
            7 => 0x89,
            8 => GF256_POLY,
            9 => 0x211,
            10 => 0x409,
            _ => return None,
        };
        Some(FieldSpec::new(m, poly))
    }

    pub fn size(&self) -> usize {
        1 << self.m
    }
}

/// A field symbol. Only meaningful together with the [`Field`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// Immutable log/antilog tables for one GF(2^m).
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    /// `antilog[i] = alpha^i` for `i in 0..order`, duplicated once so that
    /// `antilog[a + b]` needs no reduction for `a, b < order`.
    antilog: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("spec", &self.spec).finish()
    }
}

impl Field {
    /// Builds the tables, rejecting polynomials of the wrong degree or whose
    /// root does not generate the full multiplicative group.
    pub fn new(spec: FieldSpec) -> Result<Field> {
        if spec.m == 0 || spec.m > 15 {
            return Err(Error::Field(format!("unsupported extension degree m={}", spec.m)));
        }
        let size = 1usize << spec.m;
        if spec.primitive_poly >> spec.m != 1 {
            return Err(Error::Field(format!(
                "polynomial {:#x} does not have degree {}",
                spec.primitive_poly, spec.m
            )));
        }
        let order = size - 1;
        let mut antilog = vec![0u16; 2 * order];
        let mut log = vec![0u16; size];
        let mut seen = vec![false; size];
        let mut x: u32 = 1;
        for (i, slot) in antilog[..order].iter_mut().enumerate() {
            if seen[x as usize] {
                return Err(Error::Field(format!(
                    "polynomial {:#x} is not primitive: generator cycle length {}",
                    spec.primitive_poly, i
                )));
            }
            seen[x as usize] = true;
            *slot = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << spec.m) != 0 {
                x ^= spec.primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::Field(format!(
                "polynomial {:#x} is not primitive",
                spec.primitive_poly
            )));
        }
        antilog.copy_within(..order, order);
        Ok(Field { spec, antilog, log })
    }

    pub fn gf256() -> Field {
        Field::new(FieldSpec::gf256()).expect("0x11D is primitive")
    }

    pub fn gf16() -> Field {
        Field::new(FieldSpec::gf16()).expect("0x13 is primitive")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Number of field elements, `2^m`.
    pub fn size(&self) -> usize {
        self.spec.size()
    }

    /// Multiplicative group order, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.spec.size() - 1
    }

    pub fn element(&self, value: u16) -> Result<FieldElement> {
        if (value as usize) < self.size() {
            Ok(FieldElement(value))
        } else {
            Err(Error::Field(format!("{value} is not an element of GF(2^{})", self.spec.m)))
        }
    }

    /// `alpha^i`, with `i` reduced modulo the group order.
    pub fn alpha_pow(&self, i: i64) -> FieldElement {
        let r = i.rem_euclid(self.order() as i64) as usize;
        FieldElement(self.antilog[r])
    }

    /// Discrete logarithm of a nonzero element.
    pub fn log(&self, a: FieldElement) -> Option<usize> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize] as usize)
        }
    }

    pub fn antilog_table(&self) -> &[u16] {
        &self.antilog[..self.order()]
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.antilog[s])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.antilog[(self.order() - l) % self.order()]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; `0^0` is taken as 1.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = self.log[a.0 as usize] as u64;
        let r = (l * (e % self.order() as u64)) % self.order() as u64;
        FieldElement(self.antilog[r as usize])
    }
}

/// Carry-less multiply followed by reduction modulo the field polynomial.
/// Table-free reference used to cross-check [`Field::mul`].
pub fn mul_shift_reduce(spec: FieldSpec, a: u16, b: u16) -> u16 {
    let mut acc: u32 = 0;
    let mut a = a as u32;
    let mut b = b as u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << spec.m) != 0 {
            a ^= spec.primitive_poly;
        }
    }
    acc as u16
}
