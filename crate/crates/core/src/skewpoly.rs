//! The skew polynomial ring R[F;σ] over a quotient-ring coefficient ring.
//!
//! Multiplication is Cauchy multiplication twisted by the Frobenius:
//! F·λ = λ^p·F, so the coefficient of F^k in a product is
//! Σ_{i+j=k} λ_i·μ_j^(p^i). Under F^i ↔ x^(p^i) this is the ring of
//! additive polynomials with substitution as multiplication; the
//! identification is a printing convention, not a separate type.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{normal_form, RingElem, RingMatrix, TriangularPresentation};

/// Dense coefficient sequence (λ_0, λ_1, …) for Σ λ_i F^i, with trailing
/// zeros trimmed; the zero polynomial is the empty sequence.
#[derive(Debug, Clone)]
pub struct SkewPoly {
    pres: Arc<TriangularPresentation>,
    coeffs: Vec<RingElem>,
}

impl SkewPoly {
    pub fn zero(pres: &Arc<TriangularPresentation>) -> Self {
        SkewPoly {
            pres: pres.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(pres: &Arc<TriangularPresentation>) -> Self {
        Self::constant(RingElem::one(pres))
    }

    pub fn constant(c: RingElem) -> Self {
        let pres = c.presentation().clone();
        Self::from_coeffs(&pres, vec![c])
    }

    /// The generator F.
    pub fn frobenius(pres: &Arc<TriangularPresentation>) -> Self {
        Self::from_coeffs(&pres.clone(), vec![RingElem::zero(pres), RingElem::one(pres)])
    }

    pub fn from_coeffs(pres: &Arc<TriangularPresentation>, mut coeffs: Vec<RingElem>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly {
            pres: pres.clone(),
            coeffs,
        }
    }

    pub fn presentation(&self) -> &Arc<TriangularPresentation> {
        &self.pres
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    /// Coefficient of F^i (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> RingElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| RingElem::zero(&self.pres))
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.pres.compatible(&other.pres) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch(
                "skew operands over different coefficient rings".into(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i))?);
        }
        Ok(Self::from_coeffs(&self.pres, coeffs))
    }

    pub fn neg(&self) -> Self {
        SkewPoly {
            pres: self.pres.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Skew product: (Σ λ_i F^i)(Σ μ_j F^j) = Σ_k (Σ_{i+j=k} λ_i μ_j^(p^i)) F^k.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.pres));
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![RingElem::zero(&self.pres); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let twisted = b.frobenius_pow(i as u32);
                coeffs[i + j] = coeffs[i + j].add(&a.mul(&twisted)?)?;
            }
        }
        Ok(Self::from_coeffs(&self.pres, coeffs))
    }

    pub fn pow(&self, exp: u64) -> Result<Self> {
        let mut acc = Self::one(&self.pres);
        let mut sq = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Nilpotent exactly when every coefficient is nilpotent in R.
    pub fn is_nilpotent(&self) -> Result<bool> {
        if self.pres.rank().is_none() {
            return Err(Error::InfiniteRank(
                "nilpotency of skew polynomials needs a finite-rank coefficient ring".into(),
            ));
        }
        for c in &self.coeffs {
            if !c.is_nilpotent()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Invertible exactly when λ_0 is a unit and λ_1,…,λ_n are nilpotent.
    pub fn is_unit(&self) -> Result<bool> {
        if self.pres.rank().is_none() {
            return Err(Error::InfiniteRank(
                "invertibility of skew polynomials needs a finite-rank coefficient ring".into(),
            ));
        }
        if self.is_zero() {
            return Ok(false);
        }
        if !self.coeffs[0].is_unit()? {
            return Ok(false);
        }
        for c in &self.coeffs[1..] {
            if !c.is_nilpotent()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Two-sided inverse of a unit, by the recursion μ_0 = λ_0^{-1},
    /// μ_k = -λ_0^{-1} Σ_{i=1}^{k} λ_i μ_{k-i}^(p^i).
    ///
    /// The recursion runs to the certified bound deg(a)·N for the ring's
    /// nilpotency bound N (every μ_k is a combination of products of at
    /// least ⌈k/deg⌉ nilpotent tail coefficients, so it vanishes beyond
    /// the bound); both products with the input are then checked against 1.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit()? {
            return Err(Error::NotInvertible(format!("{self}")));
        }
        let deg = self.degree().expect("unit is nonzero") as u64;
        let lead_inv = self.coeffs[0].inverse()?;
        let bound = if deg == 0 {
            0
        } else {
            deg * self.pres.nil_bound()
        };
        let mut inv_coeffs: Vec<RingElem> = vec![lead_inv.clone()];
        for k in 1..=bound as usize {
            let mut sum = RingElem::zero(&self.pres);
            for i in 1..=k.min(self.coeffs.len() - 1) {
                let term = self.coeffs[i].mul(&inv_coeffs[k - i].frobenius_pow(i as u32))?;
                sum = sum.add(&term)?;
            }
            inv_coeffs.push(lead_inv.mul(&sum)?.neg());
        }
        let inv = Self::from_coeffs(&self.pres, inv_coeffs);
        let left = inv.mul(self)?;
        let right = self.mul(&inv)?;
        if !left.is_one() || !right.is_one() {
            return Err(Error::Inconsistency(
                "skew inverse recursion failed its product check".into(),
            ));
        }
        Ok(inv)
    }

    /// Truncated matrix representation: the d×d upper-triangular matrix with
    /// entry (r, s) = λ_{s-r}^(p^r). This is a ring homomorphism into d×d
    /// matrices over R, injective on polynomials of degree below d.
    pub fn matrix_rep(&self, d: usize) -> RingMatrix {
        let mut m = RingMatrix::new(&self.pres, d);
        for r in 0..d {
            for s in r..d {
                *m.at_mut(r, s) = self.coeff(s - r).frobenius_pow(r as u32);
            }
        }
        m
    }

    /// For a unit with λ_0 = 1: the largest d with a ≡ 1 mod F^d, i.e. the
    /// least index i ≥ 1 with λ_i ≠ 0. `None` means infinity (a = 1).
    pub fn fil_level(&self) -> Result<Option<usize>> {
        if !self.coeff(0).is_one() {
            return Err(Error::OutOfDomain(
                "filtration level is defined for units with constant term 1".into(),
            ));
        }
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Parses the textual syntax `1 + a*F + b*F^2`. Products evaluate by
    /// the skew multiplication, so `F*a` correctly parses to `a^p*F`.
    pub fn parse(src: &str, pres: &Arc<TriangularPresentation>) -> Result<Self> {
        let mut parser = SkewParser {
            src,
            pos: 0,
            pres: pres.clone(),
        };
        let out = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::Parse(format!(
                "trailing input at byte {}",
                parser.pos
            )));
        }
        Ok(out)
    }
}

impl PartialEq for SkewPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .all(|(a, b)| a == b)
    }
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            let needs_parens = c.terms().len() > 1;
            if i == 0 {
                write!(f, "{cs}")?;
            } else {
                let fpow = if i == 1 {
                    "F".to_string()
                } else {
                    format!("F^{i}")
                };
                if c.is_one() {
                    write!(f, "{fpow}")?;
                } else if needs_parens {
                    write!(f, "({cs})*{fpow}")?;
                } else {
                    write!(f, "{cs}*{fpow}")?;
                }
            }
        }
        Ok(())
    }
}

/// Minimal recursive-descent parser over skew polynomials. Ring-level
/// subexpressions are delegated to the exactalg parser.
struct SkewParser<'a> {
    src: &'a str,
    pos: usize,
    pres: Arc<TriangularPresentation>,
}

impl SkewParser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<SkewPoly> {
        let mut negate = false;
        if self.peek() == Some('-') {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.add(&rhs)?;
                }
                '-' => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SkewPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs.inverse()?)?;
                }
                Some(c) if c.is_alphanumeric() || c == '(' || c == '_' => {
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SkewPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            base.pow(e)
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..]
            .chars()
            .next()
            .map_or(false, |c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse("expected integer".into()));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::Parse("integer overflow".into()))
    }

    fn atom(&mut self) -> Result<SkewPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(Error::Parse("missing closing parenthesis".into()))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(SkewPoly::constant(RingElem::from_int(
                    &self.pres, v as i64,
                )))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.src[self.pos..]
                    .chars()
                    .next()
                    .map_or(false, |c| c.is_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if name == "F" {
                    Ok(SkewPoly::frobenius(&self.pres))
                } else {
                    let elem = normal_form(name, &self.pres)?;
                    Ok(SkewPoly::constant(elem))
                }
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            other => Err(Error::Parse(format!("unexpected input {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::BaseField;

    fn ring(p: u64, rels: &[(&str, u32)]) -> Arc<TriangularPresentation> {
        let mut b = TriangularPresentation::builder(BaseField::prime(p).unwrap());
        for (name, d) in rels {
            b = b.nilpotent(name, *d);
        }
        b.build().unwrap()
    }

    #[test]
    fn defining_relation() {
        // F*l = l^p * F
        let pres = ring(3, &[("l", 9)]);
        let f = SkewPoly::frobenius(&pres);
        let l = SkewPoly::constant(normal_form("l", &pres).unwrap());
        let lhs = f.mul(&l).unwrap();
        let rhs = SkewPoly::parse("l^3*F", &pres).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cauchy_product_with_twist() {
        // (1 + a F)(1 + b F) = 1 + (a + b) F + a b^p F^2 over the free ring
        let base = BaseField::with_params(5, &["a", "b"]).unwrap();
        let pres = TriangularPresentation::builder(base).build().unwrap();
        let lhs = SkewPoly::parse("(1 + a*F)*(1 + b*F)", &pres).unwrap();
        let rhs = SkewPoly::parse("1 + (a + b)*F + a*b^5*F^2", &pres).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncation_kills_high_terms() {
        // over F_2[a,b]/(a^4, b^2): (1 + aF)(1 + bF^2) = 1 + aF + bF^2
        let pres = ring(2, &[("a", 4), ("b", 2)]);
        let lhs = SkewPoly::parse("(1 + a*F)*(1 + b*F^2)", &pres).unwrap();
        let rhs = SkewPoly::parse("1 + a*F + b*F^2", &pres).unwrap();
        assert_eq!(lhs, rhs); // the F^3 term a*b^2 vanishes
    }

    #[test]
    fn inverse_by_recursion() {
        // over F_2[l]/(l^4): (1 + l F)^{-1} = 1 + l F + l^3 F^2
        let pres = ring(2, &[("l", 4)]);
        let a = SkewPoly::parse("1 + l*F", &pres).unwrap();
        let inv = a.inverse().unwrap();
        let expect = SkewPoly::parse("1 + l*F + l^3*F^2", &pres).unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn forced_degree_one_inverse() {
        // (1 + l F)^{-1} = 1 - l F when l^p = 0
        for p in [2u64, 3, 5] {
            let pres = ring(p, &[("l", p as u32)]);
            let a = SkewPoly::parse("1 + l*F", &pres).unwrap();
            let inv = a.inverse().unwrap();
            let expect = SkewPoly::parse("1 - l*F", &pres).unwrap();
            assert_eq!(inv, expect, "p = {p}");
        }
    }

    #[test]
    fn constant_inverse() {
        let pres = ring(5, &[("l", 5)]);
        let a = SkewPoly::parse("3", &pres).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv, SkewPoly::parse("2", &pres).unwrap());
    }

    #[test]
    fn nilpotence_and_unit_classification() {
        // over F_2[l1,l2]/(l1^8, l2^4) (the U_2-style ring at p=2... sizes arbitrary)
        let pres = ring(2, &[("l1", 8), ("l2", 4)]);
        assert!(SkewPoly::parse("l1 + l2*F", &pres)
            .unwrap()
            .is_nilpotent()
            .unwrap());
        assert!(!SkewPoly::parse("1 + l1*F", &pres)
            .unwrap()
            .is_nilpotent()
            .unwrap());
        assert!(SkewPoly::parse("1 + l1*F + l2*F^2", &pres)
            .unwrap()
            .is_unit()
            .unwrap());
        assert!(!SkewPoly::parse("l1 + F", &pres).unwrap().is_unit().unwrap());
    }

    #[test]
    fn nilpotent_power_vanishes() {
        let pres = ring(2, &[("l1", 4), ("l2", 2)]);
        let a = SkewPoly::parse("l1*F", &pres).unwrap();
        // bound from the coefficient nilpotency: (deg+1)(d-1) < 8
        assert!(a.pow(8).unwrap().is_zero());
    }

    #[test]
    fn matrix_rep_basics() {
        let pres = ring(2, &[("l", 4)]);
        let one = SkewPoly::one(&pres);
        assert!(one.matrix_rep(3).is_identity());
        let f = SkewPoly::frobenius(&pres);
        let m = f.matrix_rep(3);
        for r in 0..3 {
            for s in 0..3 {
                let e = m.at(r, s);
                if s == r + 1 {
                    assert!(e.is_one());
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn fil_level_cases() {
        let pres = ring(2, &[("l1", 4), ("l2", 2)]);
        assert_eq!(SkewPoly::one(&pres).fil_level().unwrap(), None);
        let a = SkewPoly::parse("1 + l2*F^2", &pres).unwrap();
        assert_eq!(a.fil_level().unwrap(), Some(2));
        assert!(SkewPoly::parse("l1 + F", &pres).unwrap().fil_level().is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let pres = ring(3, &[("l1", 9), ("l2", 3)]);
        for src in ["1 + l1*F", "l1 + (l1 + l2)*F + 2*F^2", "F^3", "0"] {
            let a = SkewPoly::parse(src, &pres).unwrap();
            let b = SkewPoly::parse(&a.to_string(), &pres).unwrap();
            assert_eq!(a, b, "round trip through `{a}`");
        }
    }
}
