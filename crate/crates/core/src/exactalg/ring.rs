//! Normal-form elements of triangular quotient rings.
//!
//! An element is a term map from exponent vectors to field coefficients,
//! kept in normal form: for every bounded variable v with relation v^d = g,
//! all exponents of v stay below d, and zero coefficients are pruned. The
//! zero element is the empty map, and equality is term-map equality (with
//! coefficient equality decided by cross-multiplication).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::smallvec;

use crate::error::{Error, Result};

use super::field::{ExpVec, FieldElem};
use super::presentation::{TriangularPresentation, VarRelation};

#[derive(Debug, Clone)]
pub struct RingElem {
    pres: Arc<TriangularPresentation>,
    terms: BTreeMap<ExpVec, FieldElem>,
}

type Terms = BTreeMap<ExpVec, FieldElem>;

impl RingElem {
    pub fn zero(pres: &Arc<TriangularPresentation>) -> Self {
        RingElem {
            pres: pres.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(pres: &Arc<TriangularPresentation>) -> Self {
        Self::constant(pres, FieldElem::one(pres.base()))
    }

    pub fn constant(pres: &Arc<TriangularPresentation>, c: FieldElem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(smallvec![0; pres.num_vars()], c);
        }
        RingElem {
            pres: pres.clone(),
            terms,
        }
    }

    pub fn from_int(pres: &Arc<TriangularPresentation>, value: i64) -> Self {
        Self::constant(pres, FieldElem::from_int(value, pres.base()))
    }

    pub fn var(pres: &Arc<TriangularPresentation>, name: &str) -> Result<Self> {
        let index = pres
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut exp: ExpVec = smallvec![0; pres.num_vars()];
        exp[index] = 1;
        Ok(Self::monomial(pres, exp, FieldElem::one(pres.base())))
    }

    /// c times a raw monomial; reduced to normal form.
    pub fn monomial(pres: &Arc<TriangularPresentation>, exp: ExpVec, c: FieldElem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        RingElem {
            pres: pres.clone(),
            terms: normalize(pres, terms),
        }
    }

    /// Builds an element from raw terms, reducing to normal form.
    pub fn from_terms(pres: &Arc<TriangularPresentation>, terms: Terms) -> Self {
        RingElem {
            pres: pres.clone(),
            terms: normalize(pres, terms),
        }
    }

    /// Wraps terms that are already in normal form.
    pub(crate) fn from_terms_unchecked(pres: Arc<TriangularPresentation>, terms: Terms) -> Self {
        RingElem { pres, terms }
    }

    pub fn presentation(&self) -> &Arc<TriangularPresentation> {
        &self.pres
    }

    pub fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.eq_elem(&Self::one(&self.pres))
    }

    /// Coefficient of the constant monomial.
    pub fn constant_coeff(&self) -> FieldElem {
        let zero: ExpVec = smallvec![0; self.pres.num_vars()];
        self.terms
            .get(&zero)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(self.pres.base()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.pres.compatible(&other.pres) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch(format!(
                "`{}` vs `{}`",
                self.pres.describe(),
                other.pres.describe()
            )))
        }
    }

    pub fn eq_elem(&self, other: &Self) -> bool {
        if !self.pres.compatible(&other.pres) || self.terms.len() != other.terms.len() {
            return false;
        }
        let k = self.pres.base();
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|((ea, ca), (eb, cb))| ea == eb && ca.eq_in(cb, k))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let k = self.pres.base();
        let mut terms = self.terms.clone();
        for (exp, c) in &other.terms {
            match terms.get_mut(exp) {
                Some(entry) => {
                    *entry = entry.add(c, k);
                    if entry.is_zero() {
                        terms.remove(exp);
                    }
                }
                None => {
                    terms.insert(exp.clone(), c.clone());
                }
            }
        }
        Ok(RingElem {
            pres: self.pres.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        let k = self.pres.base();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.neg(k)))
            .collect();
        RingElem {
            pres: self.pres.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let raw = mul_raw(self.pres.base(), &self.terms, &other.terms);
        Ok(RingElem {
            pres: self.pres.clone(),
            terms: normalize(&self.pres, raw),
        })
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        let k = self.pres.base();
        if c.is_zero() {
            return Self::zero(&self.pres);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.mul(c, k)))
            .collect();
        RingElem {
            pres: self.pres.clone(),
            terms,
        }
    }

    /// Nonnegative power; factors of p are peeled off through the termwise
    /// Frobenius before binary exponentiation.
    pub fn pow(&self, exp: u64) -> Self {
        if exp == 0 {
            return Self::one(&self.pres);
        }
        let p = self.pres.base().characteristic();
        let mut e = exp;
        let mut base = self.clone();
        while e % p == 0 {
            base = base.frobenius_pow(1);
            e /= p;
        }
        let mut acc = Self::one(&self.pres);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).expect("same presentation");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq).expect("same presentation");
            }
        }
        acc
    }

    /// The p^k-th power. In characteristic p this is termwise: coefficients
    /// are raised to the p^k, exponents multiplied by p^k, then reduced.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        let base = self.pres.base();
        let q = base.characteristic().pow(k) as u32;
        let raw: Terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let exp: ExpVec = e.iter().map(|&x| x * q).collect();
                (exp, c.frobenius_pow(k, base))
            })
            .collect();
        RingElem {
            pres: self.pres.clone(),
            terms: normalize(&self.pres, raw),
        }
    }

    /// Simultaneous substitution of ring elements for variables. Variables
    /// not assigned are left in place.
    pub fn substitute(&self, assignments: &[(usize, RingElem)]) -> Result<Self> {
        for (_, r) in assignments {
            self.check_same(r)?;
        }
        let mut acc = Self::zero(&self.pres);
        for (exp, c) in &self.terms {
            let mut term = Self::constant(&self.pres, c.clone());
            for (i, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = match assignments.iter().find(|(j, _)| *j == i) {
                    Some((_, repl)) => repl.pow(e as u64),
                    None => {
                        let mut m: ExpVec = smallvec![0; self.pres.num_vars()];
                        m[i] = e;
                        Self::monomial(&self.pres, m, FieldElem::one(self.pres.base()))
                    }
                };
                term = term.mul(&factor)?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Whether a^N = 0 for the presentation's certified nilpotency bound N.
    pub fn is_nilpotent(&self) -> Result<bool> {
        for exp in self.terms.keys() {
            for (i, &e) in exp.iter().enumerate() {
                if e > 0 && matches!(self.pres.relation(i), VarRelation::Free) {
                    return Err(Error::Undecidable(format!(
                        "element involves free variable `{}`",
                        self.pres.var_name(i)
                    )));
                }
            }
        }
        Ok(self.pow(self.pres.nil_bound()).is_zero())
    }

    /// Whether multiplication by a is invertible on the monomial basis.
    ///
    /// Constant and unit-plus-nilpotent elements are decided directly; the
    /// general finite-rank case falls back to the multiplication matrix.
    pub fn is_unit(&self) -> Result<bool> {
        let k = self.pres.base();
        let c = self.constant_coeff();
        let rest = self.sub(&Self::constant(&self.pres, c.clone()))?;
        if rest.is_zero() {
            return Ok(!c.is_zero());
        }
        if let Ok(nil) = rest.is_nilpotent() {
            if nil {
                return Ok(!c.is_zero());
            }
            if c.is_zero() && self.is_nilpotent()? {
                return Ok(false);
            }
        }
        let _ = k;
        match super::linalg::mult_matrix_invertible(self) {
            Ok(ans) => Ok(ans),
            Err(e) => Err(e),
        }
    }

    /// Two-sided inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        let k = self.pres.base();
        if self.is_zero() {
            return Err(Error::NotInvertible("zero".into()));
        }
        let c = self.constant_coeff();
        let rest = self.sub(&Self::constant(&self.pres, c.clone()))?;
        if rest.is_zero() {
            return Ok(Self::constant(&self.pres, c.inverse(k)?));
        }
        if !c.is_zero() {
            if let Ok(true) = rest.is_nilpotent() {
                // a = c (1 - q) with q nilpotent: the geometric series for
                // (1 - q)^{-1} terminates at the nilpotency bound.
                let cinv = c.inverse(k)?;
                let q = rest.scale(&cinv).neg();
                let mut sum = Self::one(&self.pres);
                let mut power = Self::one(&self.pres);
                for _ in 1..self.pres.nil_bound() {
                    power = power.mul(&q)?;
                    if power.is_zero() {
                        break;
                    }
                    sum = sum.add(&power)?;
                }
                return Ok(sum.scale(&cinv));
            }
        }
        let inv = super::linalg::mult_matrix_solve_one(self)?;
        let check = self.mul(&inv)?;
        if !check.is_one() {
            return Err(Error::Inconsistency(
                "matrix inverse failed verification".into(),
            ));
        }
        Ok(inv)
    }

    /// Coordinates with respect to the canonical monomial basis (all
    /// exponent vectors below the relation bounds, in ascending
    /// lexicographic order).
    pub fn monomial_coordinates(&self) -> Result<Vec<FieldElem>> {
        let basis = super::linalg::monomial_basis(&self.pres)?;
        let k = self.pres.base();
        let mut coords = vec![FieldElem::zero(k); basis.len()];
        for (exp, c) in &self.terms {
            let pos = basis
                .binary_search(exp)
                .map_err(|_| Error::Inconsistency("term outside monomial basis".into()))?;
            coords[pos] = c.clone();
        }
        Ok(coords)
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.eq_elem(other)
    }
}

fn mul_raw(k: &super::field::BaseField, a: &Terms, b: &Terms) -> Terms {
    let mut out: Terms = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let exp: ExpVec = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
            let c = ca.mul(cb, k);
            if c.is_zero() {
                continue;
            }
            match out.get_mut(&exp) {
                Some(entry) => {
                    *entry = entry.add(&c, k);
                    if entry.is_zero() {
                        out.remove(&exp);
                    }
                }
                None => {
                    out.insert(exp, c);
                }
            }
        }
    }
    out
}

fn pow_raw(k: &super::field::BaseField, base: &Terms, mut exp: u64, arity: usize) -> Terms {
    let mut acc: Terms = BTreeMap::new();
    acc.insert(smallvec![0; arity], FieldElem::one(k));
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_raw(k, &acc, &sq);
        }
        exp >>= 1;
        if exp > 0 {
            sq = mul_raw(k, &sq, &sq);
        }
    }
    acc
}

/// Reduces raw terms to normal form. Variables are processed from last to
/// first; rewriting v_i^{d} -> g_i only introduces earlier variables, so a
/// single downward sweep terminates with all exponents below their bounds.
fn normalize(pres: &Arc<TriangularPresentation>, terms: Terms) -> Terms {
    let k = pres.base();
    let nvars = pres.num_vars();
    let mut cur: Terms = terms
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    for i in (0..nvars).rev() {
        let (d, tail) = match pres.relation(i) {
            VarRelation::Free => continue,
            VarRelation::Power { exponent, tail } => (*exponent, tail),
        };
        if cur.keys().all(|e| e[i] < d) {
            continue;
        }
        let mut next: Terms = BTreeMap::new();
        let mut insert = |exp: ExpVec, c: FieldElem, k: &super::field::BaseField| {
            if c.is_zero() {
                return;
            }
            match next.get_mut(&exp) {
                Some(entry) => {
                    *entry = entry.add(&c, k);
                    if entry.is_zero() {
                        next.remove(&exp);
                    }
                }
                None => {
                    next.insert(exp, c);
                }
            }
        };
        for (exp, c) in cur {
            if exp[i] < d {
                insert(exp, c, k);
                continue;
            }
            let q = (exp[i] / d) as u64;
            let r = exp[i] % d;
            if tail.is_empty() {
                continue; // v^d = 0 kills the whole term
            }
            let tail_pow = pow_raw(k, tail, q, nvars);
            let mut base = exp.clone();
            base[i] = r;
            for (te, tc) in &tail_pow {
                let merged: ExpVec = base.iter().zip(te.iter()).map(|(x, y)| x + y).collect();
                insert(merged, c.mul(tc, k), k);
            }
        }
        cur = next;
    }
    cur
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let k = self.pres.base();
        let mut first = true;
        for (exp, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = c.reduce_full(k);
            let coeff = c.display(k);
            let is_const_monomial = exp.iter().all(|&e| e == 0);
            let mut factors: Vec<String> = Vec::new();
            if is_const_monomial || !c.is_one(k) {
                if c.num.terms.len() > 1 && c.den.is_one() {
                    factors.push(format!("({coeff})"));
                } else {
                    factors.push(coeff);
                }
            }
            for (i, &e) in exp.iter().enumerate() {
                if e == 1 {
                    factors.push(self.pres.var_name(i).to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.pres.var_name(i), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field::BaseField;
    use crate::exactalg::parse::normal_form;

    fn u2_ring() -> Arc<TriangularPresentation> {
        // F_2[l1, l2]/(l1^4, l2^2)
        TriangularPresentation::builder(BaseField::prime(2).unwrap())
            .nilpotent("l1", 4)
            .nilpotent("l2", 2)
            .build()
            .unwrap()
    }

    #[test]
    fn substitution_relation_collapses() {
        // y^p = a in K[y]/(y^p - a), K = F_p(a)
        let base = BaseField::with_params(3, &["a"]).unwrap();
        let pres = TriangularPresentation::builder(base)
            .algebraic("y", 3, "a")
            .build()
            .unwrap();
        let y = RingElem::var(&pres, "y").unwrap();
        let a = normal_form("a", &pres).unwrap();
        assert_eq!(y.pow(3), a);
        // y^(p^2+1) = a^p * y... here p = 3: y^10 = a^3 * y
        let expect = normal_form("a^3*y", &pres).unwrap();
        assert_eq!(y.pow(10), expect);
    }

    #[test]
    fn nilpotent_truncation() {
        let pres = u2_ring();
        let l1 = RingElem::var(&pres, "l1").unwrap();
        assert!(l1.pow(4).is_zero());
        assert!(!l1.pow(3).is_zero());
    }

    #[test]
    fn product_expansion() {
        // (l1 + l2) * l1 = l1^2 + l1*l2 in F_2[l1,l2]/(l1^4,l2^2)
        let pres = u2_ring();
        let lhs = normal_form("(l1 + l2)*l1", &pres).unwrap();
        let rhs = normal_form("l1^2 + l1*l2", &pres).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mul_by_zero_absorbs() {
        let pres = u2_ring();
        let a = normal_form("1 + l1 + l1*l2", &pres).unwrap();
        assert!(a.mul(&RingElem::zero(&pres)).unwrap().is_zero());
    }

    #[test]
    fn freshmans_dream() {
        // (1 + l)^p = 1 in F_p[l]/(l^p)
        for p in [2u64, 3, 5, 7] {
            let pres = TriangularPresentation::builder(BaseField::prime(p).unwrap())
                .nilpotent("l", p as u32)
                .build()
                .unwrap();
            let a = normal_form("1 + l", &pres).unwrap();
            assert!(a.pow(p).is_one(), "p = {p}");
        }
    }

    #[test]
    fn nilpotency_classification() {
        let pres = u2_ring();
        let prod = normal_form("l1*l2", &pres).unwrap();
        assert!(prod.is_nilpotent().unwrap());
        let unit = normal_form("1 + l1", &pres).unwrap();
        assert!(!unit.is_nilpotent().unwrap());
        assert!(unit.is_unit().unwrap());
        assert!(!normal_form("l1", &pres).unwrap().is_unit().unwrap());
    }

    #[test]
    fn algebraic_generator_is_unit_not_nilpotent() {
        // y in K[y]/(y^(p^2) - a) is a unit: y * y^(p^2 - 1) = a
        let base = BaseField::with_params(2, &["a"]).unwrap();
        let pres = TriangularPresentation::builder(base)
            .algebraic("y", 4, "a")
            .build()
            .unwrap();
        let y = RingElem::var(&pres, "y").unwrap();
        assert!(!y.is_nilpotent().unwrap());
        assert!(y.is_unit().unwrap());
        let inv = y.inverse().unwrap();
        assert!(y.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn geometric_series_inverse() {
        let pres = u2_ring();
        let a = normal_form("1 + l1 + l2", &pres).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_one());
        assert!(inv.mul(&a).unwrap().is_one());
    }

    #[test]
    fn free_variable_nilpotency_undecidable() {
        let base = BaseField::prime(2).unwrap();
        let pres = TriangularPresentation::builder(base)
            .nilpotent("l", 2)
            .free("x")
            .build()
            .unwrap();
        let x = RingElem::var(&pres, "x").unwrap();
        assert!(x.is_nilpotent().is_err());
        // but elements avoiding x are decidable
        let l = RingElem::var(&pres, "l").unwrap();
        assert!(l.is_nilpotent().unwrap());
    }

    #[test]
    fn substitute_shifts_variables() {
        let base = BaseField::prime(2).unwrap();
        let pres = TriangularPresentation::builder(base)
            .nilpotent("l", 2)
            .free("x")
            .build()
            .unwrap();
        let q = normal_form("x^2 + x", &pres).unwrap();
        let repl = normal_form("x + l", &pres).unwrap();
        let idx = pres.var_index("x").unwrap();
        let out = q.substitute(&[(idx, repl)]).unwrap();
        // (x + l)^2 + (x + l) = x^2 + l^2 + x + l = x^2 + x + l
        let expect = normal_form("x^2 + x + l", &pres).unwrap();
        assert_eq!(out, expect);
    }
}
