//! Arithmetic over the binary extension fields GF(2^q).
//!
//! Addition is bitwise XOR of the symbol values. Multiplication goes through
//! exp/log tables built from a primitive polynomial; the tables are checked
//! against a shift-and-reduce multiplier when the field is constructed.

use thiserror::Error;

/// Smallest supported symbol width.
pub const MIN_BITS: u8 = 3;
/// Largest supported symbol width.
pub const MAX_BITS: u8 = 16;

/// Fields up to this order get an exhaustive table cross-check at construction.
const EXHAUSTIVE_CHECK_ORDER: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("unsupported field width q = {0} (supported: {MIN_BITS}..={MAX_BITS})")]
    UnsupportedWidth(u8),
    #[error("polynomial {poly:#b} is not primitive of degree {bits}")]
    NotPrimitive { bits: u8, poly: u32 },
    #[error("exp/log tables disagree with shift-and-reduce multiply at {a} * {b}")]
    TableMismatch { a: u16, b: u16 },
    #[error("symbol value {value} is not an element of GF({order})")]
    OutOfField { value: u16, order: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// An element of GF(2^q), stored as its polynomial-basis bit pattern.
///
/// A symbol does not carry its field; operations on a [`GfField`] reject
/// values outside that field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct GfSymbol(pub(crate) u16);

impl GfSymbol {
    pub const ZERO: GfSymbol = GfSymbol(0);
    pub const ONE: GfSymbol = GfSymbol(1);

    /// Wraps a raw value without checking it against any field.
    pub const fn new(value: u16) -> Self {
        GfSymbol(value)
    }

    pub const fn value(self) -> u16 {
        self.0
    }
}

impl std::fmt::Display for GfSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Conventional primitive polynomial for each width, as a bitmask including
/// the leading term.
pub fn default_primitive_poly(bits: u8) -> Option<u32> {
    let poly = match bits {
        3 => 0b1011,                // x^3 + x + 1
        4 => 0b1_0011,              // x^4 + x + 1
        5 => 0b10_0101,             // x^5 + x^2 + 1
        6 => 0b100_0011,            // x^6 + x + 1
        7 => 0b1000_1001,           // x^7 + x^3 + 1
        8 => 0b1_0001_1101,         // x^8 + x^4 + x^3 + x^2 + 1
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    };
    Some(poly)
}

/// Carry-less multiply followed by reduction modulo `poly`.
///
/// This is the slow reference multiplier; [`GfField::mul`] must agree with it.
pub fn mul_shift_reduce(a: u16, b: u16, poly: u32, bits: u8) -> u16 {
    let mut acc: u32 = 0;
    let mut a = a as u32;
    let mut b = b as u32;
    let top = 1u32 << bits;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc as u16
}

/// GF(2^q) with precomputed exp/log tables.
#[derive(Clone, Debug)]
pub struct GfField {
    bits: u8,
    order: u32,
    poly: u32,
    // exp is doubled so that exp[log a + log b] needs no reduction.
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl PartialEq for GfField {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.poly == other.poly
    }
}

impl Eq for GfField {}

impl GfField {
    /// Field of width `bits` using the conventional primitive polynomial.
    pub fn new(bits: u8) -> Result<Self, GfError> {
        let poly = default_primitive_poly(bits).ok_or(GfError::UnsupportedWidth(bits))?;
        Self::with_poly(bits, poly)
    }

    /// Field of order `order` (a power of two) with the default polynomial.
    pub fn with_order(order: u32) -> Result<Self, GfError> {
        if !order.is_power_of_two() || order < 2 {
            return Err(GfError::UnsupportedWidth(0));
        }
        Self::new(order.trailing_zeros() as u8)
    }

    pub fn with_poly(bits: u8, poly: u32) -> Result<Self, GfError> {
        if !(MIN_BITS..=MAX_BITS).contains(&bits) {
            return Err(GfError::UnsupportedWidth(bits));
        }
        if poly >> bits != 1 {
            return Err(GfError::NotPrimitive { bits, poly });
        }
        let order = 1u32 << bits;
        let nonzero = (order - 1) as usize;
        let mut exp = vec![0u16; 2 * nonzero];
        let mut log = vec![0u16; order as usize];
        let mut seen = vec![false; order as usize];

        let mut x: u32 = 1;
        for i in 0..nonzero {
            // Revisiting an element before all M-1 were produced means the
            // polynomial is reducible or x is not a generator.
            if seen[x as usize] {
                return Err(GfError::NotPrimitive { bits, poly });
            }
            seen[x as usize] = true;
            exp[i] = x as u16;
            exp[i + nonzero] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & order != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(GfError::NotPrimitive { bits, poly });
        }

        let field = GfField { bits, order, poly, exp, log };
        field.cross_check()?;
        Ok(field)
    }

    fn cross_check(&self) -> Result<(), GfError> {
        let order = self.order;
        // Large fields are sampled along a fixed odd stride.
        let step = if order <= EXHAUSTIVE_CHECK_ORDER { 1 } else { (order / 97) | 1 };
        let mut a = 0u32;
        while a < order {
            let mut b = 0u32;
            while b < order {
                let (a16, b16) = (a as u16, b as u16);
                if self.mul_raw(a16, b16) != mul_shift_reduce(a16, b16, self.poly, self.bits) {
                    return Err(GfError::TableMismatch { a: a16, b: b16 });
                }
                b += step;
            }
            a += step;
        }
        Ok(())
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    /// Number of field elements, M = 2^q.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn primitive_poly(&self) -> u32 {
        self.poly
    }

    pub fn contains(&self, s: GfSymbol) -> bool {
        (s.0 as u32) < self.order
    }

    /// Validates a raw value as a member of this field.
    pub fn symbol(&self, value: u16) -> Result<GfSymbol, GfError> {
        let s = GfSymbol(value);
        self.check(s)?;
        Ok(s)
    }

    pub fn check(&self, s: GfSymbol) -> Result<(), GfError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(GfError::OutOfField { value: s.0, order: self.order })
        }
    }

    /// All field elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = GfSymbol> {
        (0..self.order).map(|v| GfSymbol(v as u16))
    }

    /// α^i for the primitive element α = x.
    pub fn alpha_pow(&self, i: i64) -> GfSymbol {
        let n = (self.order - 1) as i64;
        GfSymbol(self.exp[i.rem_euclid(n) as usize])
    }

    /// Discrete logarithm base α; `None` for zero.
    pub fn log(&self, s: GfSymbol) -> Option<u32> {
        if s.0 == 0 || !self.contains(s) {
            None
        } else {
            Some(self.log[s.0 as usize] as u32)
        }
    }

    pub fn add(&self, a: GfSymbol, b: GfSymbol) -> Result<GfSymbol, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(GfSymbol(a.0 ^ b.0))
    }

    pub fn mul(&self, a: GfSymbol, b: GfSymbol) -> Result<GfSymbol, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(GfSymbol(self.mul_raw(a.0, b.0)))
    }

    pub fn inv(&self, a: GfSymbol) -> Result<GfSymbol, GfError> {
        self.check(a)?;
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(GfSymbol(self.inv_raw(a.0)))
    }

    pub fn div(&self, a: GfSymbol, b: GfSymbol) -> Result<GfSymbol, GfError> {
        let b_inv = self.inv(b)?;
        self.mul(a, b_inv)
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Caller guarantees `a != 0`.
    #[inline]
    pub(crate) fn inv_raw(&self, a: u16) -> u16 {
        let n = (self.order - 1) as usize;
        self.exp[(n - self.log[a as usize] as usize) % n]
    }

    #[inline]
    pub(crate) fn div_raw(&self, a: u16, b: u16) -> u16 {
        if a == 0 {
            0
        } else {
            let n = (self.order - 1) as usize;
            self.exp[self.log[a as usize] as usize + n - self.log[b as usize] as usize]
        }
    }

    /// α^i for `0 <= i`, without the signed reduction.
    #[inline]
    pub(crate) fn exp_raw(&self, i: usize) -> u16 {
        self.exp[i % (self.order as usize - 1)]
    }
}
