//! Dense univariate polynomials over a [`FiniteField`].
//!
//! A [`Poly`] does not carry its field; operations take it explicitly.

use std::fmt;

use super::field::{Fe, FiniteField};
use super::MathError;

/// Coefficients, constant term first. The zero polynomial is empty; otherwise
/// the last coefficient is nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Fe::ONE)
    }

    pub fn constant(c: Fe) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    /// `x - a`.
    pub fn linear(f: &FiniteField, a: Fe) -> Self {
        Poly::from_coeffs(vec![f.neg(a), Fe::ONE])
    }

    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn add(&self, f: &FiniteField, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, f: &FiniteField, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, f: &FiniteField, c: Fe) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, f: &FiniteField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, f: &FiniteField, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(f, self);
        }
        acc
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Fe::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Euclidean division: `self = q * divisor + r`, `deg r < deg divisor`.
    pub fn divmod(&self, f: &FiniteField, divisor: &Poly) -> Result<(Poly, Poly), MathError> {
        let dd = divisor.degree().ok_or(MathError::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(rem[idx], f.mul(c, b));
            }
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Quotient of a division known to be exact.
    pub fn div_exact(&self, f: &FiniteField, divisor: &Poly) -> Result<Poly, MathError> {
        let (q, r) = self.divmod(f, divisor)?;
        if !r.is_zero() {
            return Err(MathError::InexactDivision);
        }
        Ok(q)
    }

    pub fn monic(&self, f: &FiniteField) -> Result<Poly, MathError> {
        Ok(self.scale(f, f.inv(self.leading())?))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, f: &FiniteField, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(f, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic(f).expect("nonzero")
        }
    }

    pub fn eval(&self, f: &FiniteField, x: Fe) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `p(x + a)`.
    pub fn taylor_shift(&self, f: &FiniteField, a: Fe) -> Poly {
        // Horner in the shifted variable.
        let lin = Poly::from_coeffs(vec![a, Fe::ONE]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(f, &lin).add(f, &Poly::constant(c)))
    }

    /// Coefficients in reverse order: `x^deg p(1/x)`.
    pub fn reversed(&self) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::from_coeffs(coeffs)
    }

    /// Order of vanishing at `x = a` together with the cofactor.
    pub fn split_root(&self, f: &FiniteField, a: Fe) -> (usize, Poly) {
        if self.is_zero() {
            return (usize::MAX, Poly::zero());
        }
        let lin = Poly::linear(f, a);
        let mut cur = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = cur.divmod(f, &lin).expect("nonzero divisor");
            if !r.is_zero() {
                return (k, cur);
            }
            cur = q;
            k += 1;
        }
    }
}

/// Coefficients print as their integer encodings.
impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            match (i, c.code()) {
                (0, v) => write!(out, "{v}")?,
                (1, 1) => write!(out, "x")?,
                (1, v) => write!(out, "{v}*x")?,
                (_, 1) => write!(out, "x^{i}")?,
                (_, v) => write!(out, "{v}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Power series `num / den` modulo `u^prec`; `den(0)` must be nonzero.
pub fn series_quotient(f: &FiniteField, num: &Poly, den: &Poly, prec: usize) -> Result<Vec<Fe>, MathError> {
    let d0 = f.inv(den.coeff(0))?;
    let mut out = vec![Fe::ZERO; prec];
    for i in 0..prec {
        let mut acc = num.coeff(i);
        for j in 1..=i.min(den.coeffs.len().saturating_sub(1)) {
            acc = f.sub(acc, f.mul(den.coeff(j), out[i - j]));
        }
        out[i] = f.mul(acc, d0);
    }
    Ok(out)
}

/// Laurent expansion of `num/den` at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    /// Exponent of the first stored coefficient.
    pub start: i64,
    pub coeffs: Vec<Fe>,
}

impl Laurent {
    /// Coefficient of `u^e`, zero outside the stored window below, unknown above.
    pub fn coeff(&self, e: i64) -> Fe {
        if e < self.start {
            return Fe::ZERO;
        }
        self.coeffs.get((e - self.start) as usize).copied().unwrap_or(Fe::ZERO)
    }

    /// Order of the first nonzero coefficient within the window.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.start + i as i64)
    }
}

/// Where to expand a rational function.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(Fe),
    Infinity,
}

/// Laurent series of `num/den` in the local parameter `x - a` (or `1/x` at
/// infinity), with every coefficient of exponent `< upto` computed.
pub fn laurent(f: &FiniteField, num: &Poly, den: &Poly, at: Point, upto: i64) -> Result<Laurent, MathError> {
    if den.is_zero() {
        return Err(MathError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(Laurent { start: upto, coeffs: Vec::new() });
    }
    let (order, n1, d1) = match at {
        Point::Finite(a) => {
            let (s, n1) = num.split_root(f, a);
            let (t, d1) = den.split_root(f, a);
            (s as i64 - t as i64, n1.taylor_shift(f, a), d1.taylor_shift(f, a))
        }
        Point::Infinity => {
            let dn = num.degree().unwrap() as i64;
            let dd = den.degree().unwrap() as i64;
            (dd - dn, num.reversed(), den.reversed())
        }
    };
    let prec = (upto - order).max(0) as usize;
    Ok(Laurent { start: order, coeffs: series_quotient(f, &n1, &d1, prec)? })
}

/// One term `c / (x - a)^j` of a partial-fraction expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractionTerm {
    pub root: Fe,
    pub power: usize,
    pub coeff: Fe,
}

/// Expansion `num / den = poly_part + Σ c / (x - a)^j` for a denominator
/// that splits into linear factors over the field.
pub fn partial_fractions(
    f: &FiniteField,
    num: &Poly,
    den: &Poly,
) -> Result<(Poly, Vec<PartialFractionTerm>), MathError> {
    let (poly_part, mut rem) = num.divmod(f, den)?;
    let lead_inv = f.inv(den.leading())?;
    let mut rest = den.scale(f, lead_inv);
    rem = rem.scale(f, lead_inv);

    let mut roots = Vec::new();
    for a in f.elements() {
        let (m, cof) = rest.split_root(f, a);
        if m > 0 {
            roots.push((a, m));
            rest = cof;
        }
    }
    if rest.degree() != Some(0) {
        return Err(MathError::NotSplit);
    }

    let mut terms = Vec::new();
    for &(a, m) in &roots {
        // Cofactor of (x - a)^m in den, then expand rem / cofactor locally.
        let cof = roots
            .iter()
            .filter(|(b, _)| *b != a)
            .fold(Poly::one(), |acc, &(b, k)| acc.mul(f, &Poly::linear(f, b).pow(f, k as u32)));
        let local = series_quotient(f, &rem.taylor_shift(f, a), &cof.taylor_shift(f, a), m)?;
        for (i, &c) in local.iter().enumerate() {
            if !c.is_zero() {
                terms.push(PartialFractionTerm { root: a, power: m - i, coeff: c });
            }
        }
    }
    Ok((poly_part, terms))
}
