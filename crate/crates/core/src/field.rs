//! Finite field arithmetic over GF(p) and GF(2^m).
//!
//! Elements are canonically encoded as integers in `[0, q)`. For binary
//! extensions the encoding is the bit vector of the polynomial residue
//! (bit `t` is the coefficient of `x^t`), so addition is exclusive-or.
//! Multiplication goes through log/antilog tables built once per field.

use thiserror::Error;

/// Canonical integer encoding of a field element, always in `[0, q)`.
pub type FieldElement = u16;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Reduction polynomials for GF(2^m), indexed by `m`. Each entry is the
/// lowest-weight irreducible polynomial of its degree, smallest encoding
/// among ties. Bit `t` is the coefficient of `x^t`.
const REDUCTION_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field order {0} exceeds 2^16")]
    TooLarge(u32),
    #[error("extension fields GF({p}^{m}) with odd characteristic are not supported")]
    UnsupportedExtension { p: u32, m: u32 },
    #[error("element {value} out of range for GF({q})")]
    OutOfRange { value: u32, q: u32 },
    #[error("division by zero")]
    ZeroDivision,
    #[error("reduction polynomial {0:#x} is reducible")]
    Reducible(u32),
}

/// GF(q) with `q = p^m`, either a prime field (`m = 1`) or a binary
/// extension (`p = 2`). Immutable after construction.
#[derive(Clone)]
pub struct Field {
    q: u32,
    p: u32,
    m: u32,
    poly: u32,
    // exp has 2(q-1) entries so that exp[log a + log b] needs no reduction.
    exp: Vec<FieldElement>,
    log: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("m", &self.m)
            .field("reduction_poly", &self.reduction_poly())
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.poly == other.poly
    }
}

impl Eq for Field {}

/// Factors `q` as `p^m`, or `None` if `q` has two distinct prime factors.
fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        return Some((q, 1));
    }
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn distinct_prime_factors(mut x: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= x {
        if x.is_multiple_of(f) {
            out.push(f);
            while x.is_multiple_of(f) {
                x /= f;
            }
        }
        f += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of
/// degree at most `deg / 2`.
pub fn is_irreducible_gf2(poly: u32) -> bool {
    if poly < 2 {
        return false;
    }
    let deg = poly_degree(poly);
    for d in 1..=deg / 2 {
        for g in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, g) == 0 {
                return false;
            }
        }
    }
    true
}

/// Carry-less multiplication followed by reduction modulo `poly`.
fn gf2_mul_slow(a: u32, b: u32, poly: u32, m: u32) -> u32 {
    let mut acc: u64 = 0;
    for t in 0..m {
        if (b >> t) & 1 == 1 {
            acc ^= (a as u64) << t;
        }
    }
    let poly = poly as u64;
    for t in (m..2 * m).rev() {
        if (acc >> t) & 1 == 1 {
            acc ^= poly << (t - m);
        }
    }
    acc as u32
}

impl Field {
    /// Builds GF(q) for a prime `q` or `q = 2^m`, `q <= 2^16`.
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let (p, m) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if m > 1 && p != 2 {
            return Err(FieldError::UnsupportedExtension { p, m });
        }
        let poly = if m > 1 {
            let poly = REDUCTION_POLYS[m as usize];
            if !is_irreducible_gf2(poly) {
                return Err(FieldError::Reducible(poly));
            }
            poly
        } else {
            0
        };

        let slow_mul = |a: u32, b: u32| -> u32 {
            if m == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                gf2_mul_slow(a, b, poly, m)
            }
        };
        let slow_pow = |mut base: u32, mut e: u32| -> u32 {
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };

        let order = q - 1;
        let factors = distinct_prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&f| slow_pow(g, order / f) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0 as FieldElement; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut v = 1u32;
        for i in 0..order {
            exp[i as usize] = v as FieldElement;
            exp[(i + order) as usize] = v as FieldElement;
            log[v as usize] = i;
            v = slow_mul(v, generator);
        }

        Ok(Field {
            q,
            p,
            m,
            poly,
            exp,
            log,
        })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// The reduction polynomial as a bit vector, `None` for prime fields.
    pub fn reduction_poly(&self) -> Option<u32> {
        (self.m > 1).then_some(self.poly)
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    fn check(&self, a: u32) -> Result<FieldElement, FieldError> {
        if a < self.q {
            Ok(a as FieldElement)
        } else {
            Err(FieldError::OutOfRange {
                value: a,
                q: self.q,
            })
        }
    }

    pub fn add(&self, a: u32, b: u32) -> Result<FieldElement, FieldError> {
        Ok(self.add_unchecked(self.check(a)?, self.check(b)?))
    }

    pub fn sub(&self, a: u32, b: u32) -> Result<FieldElement, FieldError> {
        Ok(self.sub_unchecked(self.check(a)?, self.check(b)?))
    }

    pub fn mul(&self, a: u32, b: u32) -> Result<FieldElement, FieldError> {
        Ok(self.mul_unchecked(self.check(a)?, self.check(b)?))
    }

    pub fn inv(&self, a: u32) -> Result<FieldElement, FieldError> {
        let a = self.check(a)?;
        if a == 0 {
            return Err(FieldError::ZeroDivision);
        }
        Ok(self.inv_unchecked(a))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<FieldElement, FieldError> {
        let a = self.check(a)?;
        let b = self.inv(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn add_unchecked(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            a ^ b
        } else {
            ((a as u32 + b as u32) % self.p) as FieldElement
        }
    }

    #[inline]
    pub(crate) fn neg_unchecked(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 || a == 0 {
            a
        } else {
            (self.p - a as u32) as FieldElement
        }
    }

    #[inline]
    pub(crate) fn sub_unchecked(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add_unchecked(a, self.neg_unchecked(b))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub(crate) fn inv_unchecked(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a != 0);
        let order = self.q - 1;
        self.exp[((order - self.log[a as usize]) % order) as usize]
    }

    /// `a^e` with `0^0 = 1`.
    pub(crate) fn pow_unchecked(&self, a: FieldElement, e: u32) -> FieldElement {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * e as u64) % order;
        self.exp[l as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_shapes() {
        let f = Field::new(16).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (2, 4));
        let f = Field::new(5).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (5, 1));
        assert_eq!(f.reduction_poly(), None);
        assert_eq!(Field::new(6), Err(FieldError::NotPrimePower(6)));
        assert_eq!(Field::new(1), Err(FieldError::NotPrimePower(1)));
        assert_eq!(Field::new(0), Err(FieldError::NotPrimePower(0)));
        assert_eq!(Field::new(1 << 17), Err(FieldError::TooLarge(1 << 17)));
        assert_eq!(
            Field::new(9),
            Err(FieldError::UnsupportedExtension { p: 3, m: 2 })
        );
    }

    #[test]
    fn every_table_poly_is_irreducible() {
        for m in 2..=16u32 {
            let poly = REDUCTION_POLYS[m as usize];
            assert_eq!(poly_degree(poly), m);
            assert!(is_irreducible_gf2(poly), "m = {m}");
        }
        assert!(!is_irreducible_gf2(0b101)); // x^2 + 1 = (x + 1)^2
    }

    #[test]
    fn largest_fields_build() {
        let f = Field::new(1 << 16).unwrap();
        assert_eq!(f.mul(0xffff, f.inv(0xffff).unwrap() as u32).unwrap(), 1);
        let f = Field::new(65521).unwrap();
        assert_eq!(f.mul(65520, 65520).unwrap(), 1);
    }

    // Digit-wise mod-p addition and schoolbook polynomial product.
    fn oracle_add(p: u32, m: u32, a: u32, b: u32) -> u32 {
        let (mut a, mut b, mut out, mut scale) = (a, b, 0, 1);
        for _ in 0..m {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    #[test]
    fn gf4_examples() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.reduction_poly(), Some(0b111));
        assert_eq!(f.add(2, 3).unwrap(), 1);
        assert_eq!(f.mul(2, 2).unwrap(), 3);
        assert_eq!(f.inv(2).unwrap(), 3);
        assert_eq!(f.inv(1).unwrap(), 1);
        for a in 0..4 {
            assert_eq!(f.add(a, a).unwrap(), 0);
            assert_eq!(f.mul(a, 1).unwrap(), a as u16);
        }
    }

    #[test]
    fn gf5_examples() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.add(3, 4).unwrap(), 2);
        assert_eq!(f.mul(3, 4).unwrap(), 2);
        assert_eq!(f.inv(2).unwrap(), 3);
        assert_eq!(f.sub(1, 3).unwrap(), 3);
        assert_eq!(f.div(1, 2).unwrap(), 3);
    }

    #[test]
    fn errors() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.add(4, 0), Err(FieldError::OutOfRange { value: 4, q: 4 }));
        assert_eq!(f.mul(0, 9), Err(FieldError::OutOfRange { value: 9, q: 4 }));
        assert_eq!(f.inv(0), Err(FieldError::ZeroDivision));
    }

    #[test]
    fn addition_matches_digitwise_oracle() {
        for q in [2u32, 3, 4, 5, 7, 8, 16, 32, 64] {
            let f = Field::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    let want = oracle_add(f.characteristic(), f.degree(), a, b);
                    assert_eq!(f.add(a, b).unwrap() as u32, want, "GF({q}) {a}+{b}");
                }
            }
        }
    }

    #[test]
    fn table_multiplication_matches_schoolbook() {
        for m in 2..=6u32 {
            let q = 1u32 << m;
            let f = Field::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    let want = gf2_mul_slow(a, b, f.poly, m);
                    assert_eq!(f.mul(a, b).unwrap() as u32, want);
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2u32, 3, 4, 5, 7, 8, 11, 16, 32] {
            let f = Field::new(q).unwrap();
            for a in 0..q as u16 {
                for b in 0..q as u16 {
                    let ab = f.mul_unchecked(a, b);
                    assert_eq!(ab, f.mul_unchecked(b, a));
                    assert_eq!(f.add_unchecked(a, b), f.add_unchecked(b, a));
                    for c in 0..q as u16 {
                        assert_eq!(
                            f.mul_unchecked(ab, c),
                            f.mul_unchecked(a, f.mul_unchecked(b, c))
                        );
                        assert_eq!(
                            f.add_unchecked(f.add_unchecked(a, b), c),
                            f.add_unchecked(a, f.add_unchecked(b, c))
                        );
                        assert_eq!(
                            f.mul_unchecked(a, f.add_unchecked(b, c)),
                            f.add_unchecked(ab, f.mul_unchecked(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_and_bijection() {
        for q in [2u32, 3, 4, 13, 16, 64, 128, 257] {
            let f = Field::new(q).unwrap();
            for a in 1..q as u16 {
                assert_eq!(f.mul_unchecked(a, f.inv_unchecked(a)), 1);
                let mut seen = vec![false; q as usize];
                for b in 0..q as u16 {
                    seen[f.mul_unchecked(a, b) as usize] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn pow_agrees_with_repeated_multiplication() {
        let f = Field::new(16).unwrap();
        for a in 0..16u16 {
            let mut acc = 1;
            for e in 0..20 {
                assert_eq!(f.pow_unchecked(a, e), acc);
                acc = f.mul_unchecked(acc, a);
            }
        }
    }
}
