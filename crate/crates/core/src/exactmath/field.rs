//! Finite fields `F_q`, `q = p^e`, with log/exp tables.
//!
//! An element is encoded as the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_0 + c_1 t + ...` is its residue modulo the defining polynomial.
//! The defining polynomial is the monic irreducible of degree `e` whose
//! non-leading coefficients have the smallest such encoding.

use std::fmt;

use super::MathError;

/// Largest field order accepted. Tables are `O(q)`; the addition table is
/// only cached for small fields.
pub const MAX_ORDER: u64 = 1 << 20;
const ADD_TABLE_LIMIT: u32 = 1024;

/// A field element, as its integer encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    q: u32,
    /// Non-leading coefficients of the monic modulus, constant term first.
    modulus_tail: Vec<u32>,
    generator: Fe,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus_tail", &self.modulus_tail)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus_tail == other.modulus_tail
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q = p^e` for a prime `p`, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomial helpers over Z/p, used only while building the tables.
fn zp_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let lead_inv = zp_inv(b[db], p);
    while a.len() > db {
        let top = *a.last().unwrap();
        if top != 0 {
            let factor = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = a.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (factor as u64 * bi as u64 % p as u64) as u32;
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        }
        a.pop();
    }
    a
}

fn zp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits_of(code: u32, p: u32, len: usize) -> Vec<u32> {
    let mut rest = code;
    (0..len)
        .map(|_| {
            let d = rest % p;
            rest /= p;
            d
        })
        .collect()
}

fn code_of(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn is_irreducible_zp(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        // Every monic polynomial of degree d.
        for tail in 0..(p as u64).pow(d as u32) {
            let mut cand = digits_of(tail as u32, p, d);
            cand.push(1);
            if zp_rem(poly.to_vec(), &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// The field with `p^degree` elements.
    pub fn new(p: u64, degree: u32) -> Result<Self, MathError> {
        if !is_prime(p) {
            return Err(MathError::NotPrime(p));
        }
        if degree == 0 {
            return Err(MathError::InvalidField("extension degree must be positive".into()));
        }
        let q = p
            .checked_pow(degree)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| MathError::InvalidField(format!("{p}^{degree} exceeds {MAX_ORDER}")))?;
        let (p, q) = (p as u32, q as u32);
        let d = degree as usize;

        let modulus_tail = (0..q)
            .map(|tail| {
                let mut poly = digits_of(tail, p, d);
                poly.push(1);
                poly
            })
            .find(|poly| is_irreducible_zp(poly, p))
            .map(|mut poly| {
                poly.pop();
                poly
            })
            .expect("an irreducible polynomial of every degree exists");

        let mut field = FiniteField {
            p,
            degree,
            q,
            modulus_tail,
            generator: Fe::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add: None,
        };
        field.neg = (0..q)
            .map(|c| code_of(&digits_of(c, p, d).iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p))
            .collect();
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_slow(a, b);
                }
            }
            field.add = Some(table);
        }
        field.build_tables();
        Ok(field)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self, MathError> {
        let (p, e) = prime_power(q).ok_or(MathError::InvalidField(format!("{q} is not a prime power")))?;
        Self::new(p, e)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.degree == 1 {
            return (a + b) % self.p;
        }
        let d = self.degree as usize;
        let da = digits_of(a, self.p, d);
        let db = digits_of(b, self.p, d);
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        code_of(&sum, self.p)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let d = self.degree as usize;
        let p = self.p;
        let da = digits_of(a, p, d);
        let db = digits_of(b, p, d);
        let mut prod = vec![0u32; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        let mut modulus = self.modulus_tail.clone();
        modulus.push(1);
        let mut r = zp_rem(prod, &modulus, p);
        r.resize(d, 0);
        code_of(&r, p)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let generator = (1..q)
            .find(|&g| {
                let mut x = 1u32;
                for i in 1..=order {
                    x = self.mul_slow(x, g);
                    if x == 1 {
                        return i == order;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp.push(x);
            log[x as usize] = i;
            x = self.mul_slow(x, generator);
        }
        let first = exp.clone();
        exp.extend(first);
        self.exp = exp;
        self.log = log;
        self.generator = Fe(generator);
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    /// Full defining polynomial over `F_p`, constant term first, monic.
    pub fn modulus(&self) -> Vec<u32> {
        let mut m = self.modulus_tail.clone();
        m.push(1);
        m
    }

    /// Generator of the multiplicative group used for the log tables.
    pub fn primitive_element(&self) -> Fe {
        self.generator
    }

    /// Element with the given integer encoding.
    pub fn elem(&self, code: u64) -> Result<Fe, MathError> {
        if code >= self.q as u64 {
            return Err(MathError::OutOfRange {
                what: "field element code",
                value: code as i64,
                bound: self.q as i64,
            });
        }
        Ok(Fe(code as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.add {
            Some(t) => Fe(t[(a.0 * self.q + b.0) as usize]),
            None => Fe(self.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[i as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, MathError> {
        if a.0 == 0 {
            return Err(MathError::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(Fe(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, MathError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % order)) % order) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Fe) -> Result<u64, MathError> {
        if a.0 == 0 {
            return Err(MathError::DivisionByZero);
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Ok(order / num_integer::gcd(order, l))
    }

    /// Smallest element (by encoding) of exact multiplicative order `n`.
    pub fn root_of_unity(&self, n: u64) -> Result<Fe, MathError> {
        let order = (self.q - 1) as u64;
        if n == 0 || order % n != 0 {
            return Err(MathError::NoRootOfUnity { n, q: self.q as u64 });
        }
        (1..self.q)
            .map(Fe)
            .find(|&a| self.multiplicative_order(a).ok() == Some(n))
            .ok_or(MathError::NoRootOfUnity { n, q: self.q as u64 })
    }
}
