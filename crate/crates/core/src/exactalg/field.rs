//! Base fields F_p and F_p(t_1,…,t_m) with exact fraction arithmetic.
//!
//! Elements of the rational function field are stored as unreduced
//! fractions of multivariate polynomials over F_p; equality is decided by
//! cross-multiplication. Reduction (monomial content, and Euclidean gcd in
//! the univariate case) only runs once a fraction grows past a size
//! threshold.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Exponent vector of a monomial; one entry per variable or parameter.
pub type ExpVec = SmallVec<[u32; 8]>;

/// Term count above which a fraction gets reduced after arithmetic.
const REDUCE_THRESHOLD: usize = 16;

// ---------------------------------------------------------------------------
// Arithmetic in F_p

pub(crate) fn fp_add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub(crate) fn fp_sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub(crate) fn fp_mul(a: u64, b: u64, p: u64) -> u64 {
    // p stays far below 2^32 in this crate, so the product cannot overflow.
    (a * b) % p
}

pub(crate) fn fp_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fp_mul(acc, base, p);
        }
        base = fp_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn fp_inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero in F_p");
    fp_pow(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
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

// ---------------------------------------------------------------------------
// Base field

/// A computable base field: the prime field F_p, or the rational function
/// field F_p(t_1,…,t_m) when parameters are declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseField {
    p: u64,
    params: Vec<String>,
}

impl BaseField {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::with_params(p, &[])
    }

    /// The rational function field F_p(params…).
    pub fn with_params(p: u64, params: &[&str]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Usage(format!("{p} is not prime")));
        }
        let mut names = Vec::with_capacity(params.len());
        for &name in params {
            if name.is_empty() || names.iter().any(|n| n == name) {
                return Err(Error::Usage(format!("bad parameter name `{name}`")));
            }
            names.push(name.to_string());
        }
        Ok(BaseField { p, params: names })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|n| n == name)
    }
}

// ---------------------------------------------------------------------------
// Multivariate polynomials over F_p in the field parameters

/// Normal-form multivariate polynomial over F_p: a sorted term map from
/// exponent vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PrimePoly {
    pub(crate) terms: BTreeMap<ExpVec, u64>,
}

impl PrimePoly {
    pub fn zero() -> Self {
        PrimePoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: u64, arity: usize, p: u64) -> Self {
        let c = c % p;
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(smallvec![0; arity], c);
        }
        PrimePoly { terms }
    }

    pub fn one(arity: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(smallvec![0; arity], 1);
        PrimePoly { terms }
    }

    pub fn param(index: usize, arity: usize) -> Self {
        let mut exp: ExpVec = smallvec![0; arity];
        exp[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exp, 1);
        PrimePoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(e, c)| *c == 1 && e.iter().all(|&x| x == 0))
                .unwrap_or(false)
    }

    pub fn add(&self, other: &Self, p: u64) -> Self {
        let mut terms = self.terms.clone();
        for (exp, &c) in &other.terms {
            let entry = terms.entry(exp.clone()).or_insert(0);
            *entry = fp_add(*entry, c, p);
            if *entry == 0 {
                terms.remove(exp);
            }
        }
        PrimePoly { terms }
    }

    pub fn neg(&self, p: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (e.clone(), fp_sub(0, c, p)))
            .collect();
        PrimePoly { terms }
    }

    pub fn sub(&self, other: &Self, p: u64) -> Self {
        self.add(&other.neg(p), p)
    }

    pub fn mul(&self, other: &Self, p: u64) -> Self {
        let mut terms: BTreeMap<ExpVec, u64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exp: ExpVec = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let c = fp_mul(ca, cb, p);
                let entry = terms.entry(exp.clone()).or_insert(0);
                *entry = fp_add(*entry, c, p);
                if *entry == 0 {
                    terms.remove(&exp);
                }
            }
        }
        PrimePoly { terms }
    }

    pub fn pow(&self, mut exp: u64, arity: usize, p: u64) -> Self {
        let mut acc = PrimePoly::one(arity);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            base = base.mul(&base, p);
            exp >>= 1;
        }
        acc
    }

    /// p^k-th power, computed termwise (the Frobenius is additive in
    /// characteristic p, and every F_p coefficient is fixed by it).
    pub fn frobenius_pow(&self, k: u32, p: u64) -> Self {
        let q = p.pow(k);
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let exp: ExpVec = e.iter().map(|&x| x * q as u32).collect();
                (exp, c)
            })
            .collect();
        PrimePoly { terms }
    }

    /// Componentwise minimum of all exponent vectors (the monomial content).
    fn monomial_content(&self, arity: usize) -> ExpVec {
        let mut content: ExpVec = smallvec![u32::MAX; arity];
        for exp in self.terms.keys() {
            for (c, &e) in content.iter_mut().zip(exp.iter()) {
                *c = (*c).min(e);
            }
        }
        if self.terms.is_empty() {
            content = smallvec![0; arity];
        }
        content
    }

    fn divide_monomial(&self, m: &ExpVec) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let exp: ExpVec = e.iter().zip(m.iter()).map(|(x, y)| x - y).collect();
                (exp, c)
            })
            .collect();
        PrimePoly { terms }
    }

    /// Index of the unique variable occurring with positive exponent, when
    /// there is exactly one.
    fn single_variable(&self) -> Option<usize> {
        let mut seen = None;
        for exp in self.terms.keys() {
            for (i, &e) in exp.iter().enumerate() {
                if e > 0 {
                    match seen {
                        None => seen = Some(i),
                        Some(j) if j == i => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        seen
    }

    fn to_univariate(&self, var: usize) -> Vec<u64> {
        let deg = self
            .terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![0u64; deg + 1];
        for (e, &c) in &self.terms {
            coeffs[e[var] as usize] = c;
        }
        coeffs
    }

    fn from_univariate(coeffs: &[u64], var: usize, arity: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (d, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut exp: ExpVec = smallvec![0; arity];
                exp[var] = d as u32;
                terms.insert(exp, c);
            }
        }
        PrimePoly { terms }
    }

    /// Leading coefficient in the lexicographic term order.
    fn leading_coeff(&self) -> u64 {
        self.terms.values().next_back().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u64, p: u64) -> Self {
        let c = c % p;
        if c == 0 {
            return PrimePoly::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, &x)| (e.clone(), fp_mul(x, c, p)))
            .collect();
        PrimePoly { terms }
    }
}

/// Euclidean gcd of univariate coefficient vectors over F_p, monic.
fn univariate_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lead = fp_inv(*b.last().unwrap(), p);
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let factor = fp_mul(*a.last().unwrap(), lead, p);
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = fp_sub(a[shift + i], fp_mul(factor, bc, p), p);
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&l) = a.last() {
        let inv = fp_inv(l, p);
        for c in &mut a {
            *c = fp_mul(*c, inv, p);
        }
    }
    a
}

fn univariate_div_exact(a: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let mut quot = vec![0u64; a.len().saturating_sub(g.len()) + 1];
    let lead = fp_inv(*g.last().unwrap(), p);
    while rem.len() >= g.len() && !rem.is_empty() {
        let shift = rem.len() - g.len();
        let factor = fp_mul(*rem.last().unwrap(), lead, p);
        quot[shift] = factor;
        for (i, &gc) in g.iter().enumerate() {
            rem[shift + i] = fp_sub(rem[shift + i], fp_mul(factor, gc, p), p);
        }
        while rem.last() == Some(&0) {
            rem.pop();
        }
    }
    debug_assert!(rem.is_empty(), "non-exact division in gcd reduction");
    quot
}

// ---------------------------------------------------------------------------
// Field elements

/// An element of the base field, stored as an (often unreduced) fraction of
/// polynomials over F_p. Zero is the fraction 0/1; elements of F_p have a
/// constant numerator and denominator 1.
#[derive(Debug, Clone)]
pub struct FieldElem {
    pub(crate) num: PrimePoly,
    pub(crate) den: PrimePoly,
}

impl FieldElem {
    pub fn zero(k: &BaseField) -> Self {
        FieldElem {
            num: PrimePoly::zero(),
            den: PrimePoly::one(k.arity()),
        }
    }

    pub fn one(k: &BaseField) -> Self {
        FieldElem {
            num: PrimePoly::one(k.arity()),
            den: PrimePoly::one(k.arity()),
        }
    }

    pub fn from_int(value: i64, k: &BaseField) -> Self {
        let p = k.characteristic() as i64;
        let c = value.rem_euclid(p) as u64;
        FieldElem {
            num: PrimePoly::constant(c, k.arity(), k.characteristic()),
            den: PrimePoly::one(k.arity()),
        }
    }

    pub fn param(name: &str, k: &BaseField) -> Result<Self> {
        let index = k
            .param_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(FieldElem {
            num: PrimePoly::param(index, k.arity()),
            den: PrimePoly::one(k.arity()),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self, k: &BaseField) -> bool {
        self.eq_in(&FieldElem::one(k), k)
    }

    /// Equality by cross-multiplication: a/b = c/d iff ad − cb = 0.
    pub fn eq_in(&self, other: &Self, k: &BaseField) -> bool {
        let p = k.characteristic();
        self.num.mul(&other.den, p) == other.num.mul(&self.den, p)
    }

    pub fn add(&self, other: &Self, k: &BaseField) -> Self {
        let p = k.characteristic();
        let num = self
            .num
            .mul(&other.den, p)
            .add(&other.num.mul(&self.den, p), p);
        let den = self.den.mul(&other.den, p);
        FieldElem { num, den }.reduced(k)
    }

    pub fn neg(&self, k: &BaseField) -> Self {
        FieldElem {
            num: self.num.neg(k.characteristic()),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self, k: &BaseField) -> Self {
        self.add(&other.neg(k), k)
    }

    pub fn mul(&self, other: &Self, k: &BaseField) -> Self {
        let p = k.characteristic();
        FieldElem {
            num: self.num.mul(&other.num, p),
            den: self.den.mul(&other.den, p),
        }
        .reduced(k)
    }

    pub fn inverse(&self, k: &BaseField) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero field element".into()));
        }
        let p = k.characteristic();
        // Keep the denominator's leading coefficient at 1 for stable printing.
        let lead = self.num.leading_coeff();
        let inv = fp_inv(lead, p);
        Ok(FieldElem {
            num: self.den.scale(inv, p),
            den: self.num.scale(inv, p),
        })
    }

    pub fn div(&self, other: &Self, k: &BaseField) -> Result<Self> {
        Ok(self.mul(&other.inverse(k)?, k))
    }

    pub fn pow(&self, exp: u64, k: &BaseField) -> Self {
        let p = k.characteristic();
        FieldElem {
            num: self.num.pow(exp, k.arity(), p),
            den: self.den.pow(exp, k.arity(), p),
        }
        .reduced(k)
    }

    /// The p^k-th power, computed termwise.
    pub fn frobenius_pow(&self, kth: u32, k: &BaseField) -> Self {
        let p = k.characteristic();
        FieldElem {
            num: self.num.frobenius_pow(kth, p),
            den: self.den.frobenius_pow(kth, p),
        }
    }

    /// The constant in F_p this element equals, if it is one.
    pub fn to_scalar(&self, k: &BaseField) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        let p = k.characteristic();
        for c in 0..p {
            if self.num == self.den.scale(c, p) {
                return Some(c);
            }
        }
        // Unreduced fractions can hide a scalar; decide by cross-multiplying.
        for c in 0..p {
            if self.eq_in(&FieldElem::from_int(c as i64, k), k) {
                return Some(c);
            }
        }
        None
    }

    fn reduced(self, k: &BaseField) -> Self {
        if self.num.terms.len() + self.den.terms.len() <= REDUCE_THRESHOLD {
            return self;
        }
        self.reduce_full(k)
    }

    /// Divide out the common monomial content, and the full Euclidean gcd
    /// when numerator and denominator involve a single parameter.
    pub fn reduce_full(&self, k: &BaseField) -> Self {
        let p = k.characteristic();
        let arity = k.arity();
        if self.num.is_zero() {
            return FieldElem::zero(k);
        }
        let cn = self.num.monomial_content(arity);
        let cd = self.den.monomial_content(arity);
        let common: ExpVec = cn.iter().zip(cd.iter()).map(|(a, b)| *a.min(b)).collect();
        let mut num = self.num.divide_monomial(&common);
        let mut den = self.den.divide_monomial(&common);

        let joint = num.add(&den, p);
        if let Some(var) = joint.single_variable() {
            if num.single_variable().map_or(true, |v| v == var)
                && den.single_variable().map_or(true, |v| v == var)
            {
                let ua = num.to_univariate(var);
                let ub = den.to_univariate(var);
                let g = univariate_gcd(ua.clone(), ub.clone(), p);
                if g.len() > 1 {
                    num = PrimePoly::from_univariate(&univariate_div_exact(&ua, &g, p), var, arity);
                    den = PrimePoly::from_univariate(&univariate_div_exact(&ub, &g, p), var, arity);
                }
            }
        }
        // Normalize the denominator's leading coefficient to 1.
        let lead = den.leading_coeff();
        if lead > 1 {
            let inv = fp_inv(lead, p);
            num = num.scale(inv, p);
            den = den.scale(inv, p);
        }
        FieldElem { num, den }
    }

    pub fn display(&self, k: &BaseField) -> String {
        let num = poly_display(&self.num, k);
        if self.den.is_one() {
            num
        } else {
            let den = poly_display(&self.den, k);
            format!("({num})/({den})")
        }
    }
}

fn poly_display(poly: &PrimePoly, k: &BaseField) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (exp, &c)) in poly.terms.iter().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if c != 1 || exp.iter().all(|&e| e == 0) {
            factors.push(c.to_string());
        }
        for (j, &e) in exp.iter().enumerate() {
            if e == 1 {
                factors.push(k.params()[j].clone());
            } else if e > 1 {
                let mut f = k.params()[j].clone();
                let _ = write!(f, "^{e}");
                factors.push(f);
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let k = BaseField::prime(5).unwrap();
        let a = FieldElem::from_int(3, &k);
        let b = FieldElem::from_int(4, &k);
        assert!(a.mul(&b, &k).eq_in(&FieldElem::from_int(2, &k), &k));
        assert!(a.add(&b, &k).eq_in(&FieldElem::from_int(7, &k), &k));
        assert_eq!(a.inverse(&k).unwrap().to_scalar(&k), Some(2));
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(BaseField::prime(4).is_err());
        assert!(BaseField::prime(1).is_err());
    }

    #[test]
    fn cross_multiplication_equality() {
        let k = BaseField::with_params(2, &["t"]).unwrap();
        let t = FieldElem::param("t", &k).unwrap();
        let one = FieldElem::one(&k);
        // (t^2 + t)/t == t + 1
        let lhs = t.pow(2, &k).add(&t, &k).div(&t, &k).unwrap();
        let rhs = t.add(&one, &k);
        assert!(lhs.eq_in(&rhs, &k));
        assert!(!lhs.eq_in(&t, &k));
    }

    #[test]
    fn gcd_reduction_agrees_with_cross_multiplication() {
        let k = BaseField::with_params(3, &["t"]).unwrap();
        let t = FieldElem::param("t", &k).unwrap();
        let one = FieldElem::one(&k);
        // (t^2 - 1)/(t - 1) reduces to t + 1
        let num = t.pow(2, &k).sub(&one, &k);
        let den = t.sub(&one, &k);
        let frac = num.div(&den, &k).unwrap().reduce_full(&k);
        assert!(frac.eq_in(&t.add(&one, &k), &k));
        assert!(frac.den.is_one());
    }

    #[test]
    fn frobenius_power_is_termwise() {
        let k = BaseField::with_params(3, &["t"]).unwrap();
        let t = FieldElem::param("t", &k).unwrap();
        let e = t.add(&FieldElem::from_int(2, &k), &k);
        assert!(e.frobenius_pow(1, &k).eq_in(&e.pow(3, &k), &k));
        assert!(e.frobenius_pow(2, &k).eq_in(&e.pow(9, &k), &k));
    }
}
