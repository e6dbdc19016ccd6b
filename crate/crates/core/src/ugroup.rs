//! The unipotent group schemes U_n and the iterated semidirect product
//! with the additive and multiplicative groups.
//!
//! An R-point of U_n is a skew polynomial 1 + Σ_{i=1}^n λ_i F^i whose
//! coefficients satisfy λ_i^(p^(n-i+1)) = 0. Verification works
//! symbolically: a "generic" point adjoins fresh variables, one per
//! coordinate, each with its exact constraint power, to one shared
//! triangular presentation, so an identity of points is an identity of
//! normal forms.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{
    BaseField, FieldElem, RingElem, RingMatrix, TriangularPresentation,
};
use crate::skewpoly::SkewPoly;

/// A point of U_n(R): coefficients (λ_1, …, λ_n) with λ_i^(p^(n-i+1)) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct UnElement {
    level: u32,
    coeffs: Vec<RingElem>,
}

impl UnElement {
    /// Validates the defining power constraints before wrapping.
    pub fn new(level: u32, coeffs: Vec<RingElem>) -> Result<Self> {
        if coeffs.len() != level as usize {
            return Err(Error::Usage(format!(
                "level {level} point needs exactly {level} coefficients"
            )));
        }
        if let Some(first) = coeffs.first() {
            let p = first.presentation().base().characteristic();
            for (idx, c) in coeffs.iter().enumerate() {
                let power = p.pow(level - idx as u32);
                if !c.pow(power).is_zero() {
                    return Err(Error::Inconsistency(format!(
                        "coefficient {} violates its constraint power p^{}",
                        idx + 1,
                        level - idx as u32
                    )));
                }
            }
        }
        Ok(UnElement { level, coeffs })
    }

    pub fn identity(pres: &Arc<TriangularPresentation>, level: u32) -> Self {
        UnElement {
            level,
            coeffs: vec![RingElem::zero(pres); level as usize],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    /// Coefficient λ_i (1-based; zero outside 1..=level).
    pub fn coeff(&self, i: u32) -> Option<&RingElem> {
        if i == 0 || i > self.level {
            None
        } else {
            Some(&self.coeffs[(i - 1) as usize])
        }
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_skew(&self, pres: &Arc<TriangularPresentation>) -> SkewPoly {
        let mut coeffs = Vec::with_capacity(self.level as usize + 1);
        coeffs.push(RingElem::one(pres));
        coeffs.extend(self.coeffs.iter().cloned());
        SkewPoly::from_coeffs(pres, coeffs)
    }

    /// Reads a U_n point off a skew polynomial, asserting the constant
    /// term is 1, the degree is at most the level, and the constraints hold.
    pub fn from_skew(skew: &SkewPoly, level: u32) -> Result<Self> {
        if !skew.coeff(0).is_one() {
            return Err(Error::Inconsistency(
                "constant term of a U_n point must be 1".into(),
            ));
        }
        if skew.degree().unwrap_or(0) > level as usize {
            return Err(Error::Inconsistency(format!(
                "skew polynomial of degree {} exceeds level {level}",
                skew.degree().unwrap_or(0)
            )));
        }
        let coeffs = (1..=level).map(|i| skew.coeff(i as usize)).collect();
        Self::new(level, coeffs)
    }

    /// Membership in G_r = {λ_i = 0 for i <= n-r}.
    pub fn central_member(&self, r: u32) -> Result<bool> {
        if r > self.level {
            return Err(Error::OutOfDomain(format!(
                "subgroup index {r} exceeds level {}",
                self.level
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .take((self.level - r) as usize)
            .all(|c| c.is_zero()))
    }
}

/// Product in U_n: the skew product, which lands back in U_n; the power
/// constraints are asserted rather than assumed.
pub fn un_mul(
    pres: &Arc<TriangularPresentation>,
    x: &UnElement,
    y: &UnElement,
) -> Result<UnElement> {
    if x.level != y.level {
        return Err(Error::Usage("level mismatch".into()));
    }
    let prod = x.to_skew(pres).mul(&y.to_skew(pres))?;
    UnElement::from_skew(&prod, x.level)
}

/// Inverse in U_n via the recursion μ_k = -Σ_{i=1}^k λ_i μ_{k-i}^(p^i),
/// which terminates at the level; certified by the two-sided product check.
pub fn un_inverse(pres: &Arc<TriangularPresentation>, x: &UnElement) -> Result<UnElement> {
    let n = x.level as usize;
    let mut inv: Vec<RingElem> = Vec::with_capacity(n + 1);
    inv.push(RingElem::one(pres));
    for k in 1..=n {
        let mut sum = RingElem::zero(pres);
        for i in 1..=k {
            if let Some(li) = x.coeff(i as u32) {
                sum = sum.add(&li.mul(&inv[k - i].frobenius_pow(i as u32))?)?;
            }
        }
        inv.push(sum.neg());
    }
    let candidate = UnElement::new(x.level, inv[1..].to_vec())?;
    let left = un_mul(pres, &candidate, x)?;
    let right = un_mul(pres, x, &candidate)?;
    if !left.is_identity() || !right.is_identity() {
        return Err(Error::Inconsistency(
            "U_n inverse recursion failed its product check".into(),
        ));
    }
    Ok(candidate)
}

/// Relative Frobenius U_n -> U_{n-1}: (λ_1, …, λ_n) ↦ (λ_1^p, …, λ_{n-1}^p),
/// asserting λ_n^p = 0.
pub fn frobenius_map(x: &UnElement) -> Result<UnElement> {
    if x.level == 0 {
        return Ok(x.clone());
    }
    if let Some(last) = x.coeff(x.level) {
        if !last.frobenius_pow(1).is_zero() {
            return Err(Error::Inconsistency(
                "top coefficient must die under Frobenius".into(),
            ));
        }
    }
    let coeffs = (1..x.level)
        .map(|i| x.coeff(i).expect("in range").frobenius_pow(1))
        .collect();
    UnElement::new(x.level - 1, coeffs)
}

/// Matrix of the adjoint representation evaluated at the inverse of the
/// given point: column s holds (λ_{r-s}^(p^s))_{r >= s} with λ_0 = 1, i.e.
/// e_s ↦ Σ_{r=s}^{n} λ_{r-s}^(p^s) e_r on the basis e_s = 1 + εF^s.
pub fn adjoint_matrix(pres: &Arc<TriangularPresentation>, x: &UnElement) -> RingMatrix {
    let n = x.level as usize;
    let mut m = RingMatrix::new(pres, n);
    for s in 1..=n {
        for r in s..=n {
            let entry = if r == s {
                RingElem::one(pres)
            } else {
                x.coeff((r - s) as u32)
                    .expect("in range")
                    .frobenius_pow(s as u32)
            };
            *m.at_mut(r - 1, s - 1) = entry;
        }
    }
    m
}

/// Builds one shared presentation carrying several generic points, each in
/// a prescribed subgroup G_r (r = n gives a fully generic point). The
/// variables for the point labeled `t` are named `t1…tn`, with constraint
/// powers p^(n-i+1) on the live coordinates.
pub fn universal_points(
    p: u64,
    n: u32,
    specs: &[(&str, u32)],
) -> Result<(Arc<TriangularPresentation>, Vec<UnElement>)> {
    let base = BaseField::prime(p)?;
    let mut builder = TriangularPresentation::builder(base);
    for &(label, r) in specs {
        if r > n {
            return Err(Error::Usage(format!("subgroup index {r} exceeds level {n}")));
        }
        for i in (n - r + 1)..=n {
            builder = builder.nilpotent(&format!("{label}{i}"), p.pow(n - i + 1) as u32);
        }
    }
    let pres = builder.build()?;
    let mut points = Vec::with_capacity(specs.len());
    for &(label, r) in specs {
        let mut coeffs = Vec::with_capacity(n as usize);
        for i in 1..=n {
            if i <= n - r {
                coeffs.push(RingElem::zero(&pres));
            } else {
                coeffs.push(RingElem::var(&pres, &format!("{label}{i}"))?);
            }
        }
        points.push(UnElement::new(n, coeffs)?);
    }
    Ok((pres, points))
}

/// The coordinate ring of U_n: F_p[l1,…,ln]/(l_i^(p^(n-i+1))), of rank
/// p^(n(n+1)/2) over F_p.
pub fn un_coordinate_ring(p: u64, n: u32) -> Result<Arc<TriangularPresentation>> {
    let mut builder = TriangularPresentation::builder(BaseField::prime(p)?);
    for i in 1..=n {
        builder = builder.nilpotent(&format!("l{i}"), p.pow(n - i + 1) as u32);
    }
    builder.build()
}

/// Per-subgroup outcome of the central series verification.
#[derive(Debug, Clone, Serialize)]
pub struct CentralSeriesRow {
    pub r: u32,
    /// Commutators of G_r with generic points land in G_{r-1}.
    pub containment: bool,
    /// A generic point of G_{r+1} fails to be central modulo G_{r-1}
    /// (absent at r = n, where G_{r+1} does not exist).
    pub strictness: Option<bool>,
    /// rank(G_r)/rank(G_{r-1}) = p^r.
    pub quotient_order: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralSeriesReport {
    pub p: u64,
    pub n: u32,
    pub rows: Vec<CentralSeriesRow>,
}

impl CentralSeriesReport {
    pub fn pass(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.containment && row.strictness.unwrap_or(true) && row.quotient_order)
    }
}

fn subgroup_rank(p: u64, n: u32, r: u32) -> u64 {
    // live coordinates i = n-r+1..=n contribute powers p^(n-i+1) = p^1..p^r
    (1..=r).map(|i| p.pow(i)).product()
}

/// Verifies that the coefficient-vanishing filtration G_r is the upper
/// central series of U_n, including strictness, over universal rings.
pub fn verify_central_series(p: u64, n: u32, max_rank: u64) -> Result<CentralSeriesReport> {
    let mut rows = Vec::with_capacity(n as usize);
    for r in 1..=n {
        let budget = subgroup_rank(p, n, (r + 1).min(n))
            .checked_mul(subgroup_rank(p, n, n))
            .ok_or_else(|| Error::Resource("universal ring rank overflows u64".into()))?;
        if budget > max_rank {
            return Err(Error::Resource(format!(
                "universal ring rank {budget} exceeds the budget {max_rank}"
            )));
        }

        // (a) containment: x generic in G_r, y generic in U_n, and
        // (xy)(yx)^{-1} must land in G_{r-1}.
        let (pres, points) = universal_points(p, n, &[("x", r), ("y", n)])?;
        let z = two_point_commutator(&pres, &points[0], &points[1])?;
        let containment = z.central_member(r - 1)?;

        // (b) strictness: a generic x in G_{r+1} must not be central
        // modulo G_{r-1}; the witness coefficient sits at index n-r+1.
        let strictness = if r < n {
            let (pres, points) = universal_points(p, n, &[("x", r + 1), ("y", n)])?;
            let z = two_point_commutator(&pres, &points[0], &points[1])?;
            Some(!z.central_member(r - 1)?)
        } else {
            None
        };

        let quotient_order = subgroup_rank(p, n, r) == subgroup_rank(p, n, r - 1) * p.pow(r);
        rows.push(CentralSeriesRow {
            r,
            containment,
            strictness,
            quotient_order,
        });
    }
    Ok(CentralSeriesReport { p, n, rows })
}

fn two_point_commutator(
    pres: &Arc<TriangularPresentation>,
    x: &UnElement,
    y: &UnElement,
) -> Result<UnElement> {
    let xy = un_mul(pres, x, y)?;
    let yx = un_mul(pres, y, x)?;
    un_mul(pres, &xy, &un_inverse(pres, &yx)?)
}

/// Checks the leading commutator coefficient: with a = 1 - αF and
/// b = 1 - βF^s - γF^(s+1) generic in U_n, the commutator aba^{-1}b^{-1}
/// equals 1 + (αβ^p - βα^(p^s))F^(s+1) up to terms of order s+2.
pub fn commutator_formula_check(p: u64, n: u32, s: u32) -> Result<bool> {
    if s == 0 || s >= n {
        return Err(Error::OutOfDomain(format!(
            "commutator index s = {s} is outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let pres = TriangularPresentation::builder(BaseField::prime(p)?)
        .nilpotent("al", p.pow(n) as u32)
        .nilpotent("be", p.pow(n - s + 1) as u32)
        .nilpotent("ga", p.pow(n - s) as u32)
        .build()?;
    let al = RingElem::var(&pres, "al")?;
    let be = RingElem::var(&pres, "be")?;
    let ga = RingElem::var(&pres, "ga")?;

    let mut a_coeffs = vec![RingElem::zero(&pres); n as usize];
    a_coeffs[0] = al.neg();
    let a = UnElement::new(n, a_coeffs)?;
    let mut b_coeffs = vec![RingElem::zero(&pres); n as usize];
    b_coeffs[(s - 1) as usize] = be.neg();
    b_coeffs[s as usize] = ga.neg();
    let b = UnElement::new(n, b_coeffs)?;

    let ab = un_mul(&pres, &a, &b)?;
    let rest = un_mul(&pres, &un_inverse(&pres, &a)?, &un_inverse(&pres, &b)?)?;
    let comm = un_mul(&pres, &ab, &rest)?;

    for i in 1..=s {
        if !comm.coeff(i).expect("in range").is_zero() {
            return Ok(false);
        }
    }
    let expected = al
        .mul(&be.frobenius_pow(1))?
        .sub(&be.mul(&al.frobenius_pow(s))?)?;
    Ok(comm.coeff(s + 1).expect("in range") == &expected)
}

// ---------------------------------------------------------------------------
// The iterated semidirect product acting on the affine line

/// A point of the iterated semidirect product: the substitution
/// x ↦ m·(x + Σ λ_i x^(p^i)) + a on the coordinate ring of the affine
/// line. Composition is "act by the first, then by the second", which
/// realizes the group law of the substitution monoid acting from the right.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    translation: RingElem,
    unipotent: UnElement,
    scaling: RingElem,
}

impl GroupElement {
    pub fn new(translation: RingElem, unipotent: UnElement, scaling: RingElem) -> Result<Self> {
        let unit = if scaling.terms().len() == 1 && !scaling.constant_coeff().is_zero() {
            true
        } else {
            scaling.is_unit()?
        };
        if !unit {
            return Err(Error::NotInvertible(
                "scaling part must be a unit".into(),
            ));
        }
        Ok(GroupElement {
            translation,
            unipotent,
            scaling,
        })
    }

    pub fn identity(pres: &Arc<TriangularPresentation>, level: u32) -> Self {
        GroupElement {
            translation: RingElem::zero(pres),
            unipotent: UnElement::identity(pres, level),
            scaling: RingElem::one(pres),
        }
    }

    pub fn from_translation(a: RingElem, level: u32) -> Self {
        let pres = a.presentation().clone();
        GroupElement {
            translation: a,
            unipotent: UnElement::identity(&pres, level),
            scaling: RingElem::one(&pres),
        }
    }

    pub fn from_unipotent(pres: &Arc<TriangularPresentation>, u: UnElement) -> Self {
        GroupElement {
            translation: RingElem::zero(pres),
            unipotent: u,
            scaling: RingElem::one(pres),
        }
    }

    pub fn from_scaling(m: RingElem, level: u32) -> Result<Self> {
        let pres = m.presentation().clone();
        Self::new(RingElem::zero(&pres), UnElement::identity(&pres, level), m)
    }

    pub fn translation(&self) -> &RingElem {
        &self.translation
    }

    pub fn unipotent(&self) -> &UnElement {
        &self.unipotent
    }

    pub fn scaling(&self) -> &RingElem {
        &self.scaling
    }

    /// The additive-polynomial part x ↦ m·(x + Σ λ_i x^(p^i)) as a skew
    /// polynomial (the translation is carried separately).
    fn skew_part(&self, pres: &Arc<TriangularPresentation>) -> Result<SkewPoly> {
        SkewPoly::constant(self.scaling.clone()).mul(&self.unipotent.to_skew(pres))
    }

    fn from_skew_and_translation(
        pres: &Arc<TriangularPresentation>,
        skew: &SkewPoly,
        translation: RingElem,
        level: u32,
    ) -> Result<Self> {
        let scaling = skew.coeff(0);
        let scaling_inv = scaling.inverse()?;
        let normalized = SkewPoly::constant(scaling_inv).mul(skew)?;
        let unipotent = UnElement::from_skew(&normalized, level)?;
        GroupElement::new(translation, unipotent, scaling)
    }

    /// compose(g, h): act by g, then by h. The substitutions compose as
    /// s_g ∘ s_h, so the skew parts multiply and the translation becomes
    /// A_g(α_h) + α_g.
    pub fn compose(&self, other: &Self, pres: &Arc<TriangularPresentation>) -> Result<Self> {
        if self.unipotent.level() != other.unipotent.level() {
            return Err(Error::Usage("level mismatch".into()));
        }
        let sg = self.skew_part(pres)?;
        let sh = other.skew_part(pres)?;
        let skew = sg.mul(&sh)?;
        let translation = eval_additive(&sg, &other.translation)?.add(&self.translation)?;
        Self::from_skew_and_translation(pres, &skew, translation, self.unipotent.level())
    }

    pub fn inverse(&self, pres: &Arc<TriangularPresentation>) -> Result<Self> {
        let skew_inv = self.skew_part(pres)?.inverse()?;
        let translation = eval_additive(&skew_inv, &self.translation)?.neg();
        Self::from_skew_and_translation(pres, &skew_inv, translation, self.unipotent.level())
    }

    /// Applies the substitution x ↦ m·(x + Σ λ_i x^(p^i)) + α to a
    /// polynomial in the free variable named `x_name`.
    pub fn act_on_polynomial(
        &self,
        q: &RingElem,
        x_name: &str,
        pres: &Arc<TriangularPresentation>,
    ) -> Result<RingElem> {
        let idx = pres
            .var_index(x_name)
            .ok_or_else(|| Error::UnknownVariable(x_name.to_string()))?;
        let x = RingElem::var(pres, x_name)?;
        let image = eval_additive(&self.skew_part(pres)?, &x)?.add(&self.translation)?;
        q.substitute(&[(idx, image)])
    }
}

/// Evaluates Σ c_i F^i as the additive polynomial Σ c_i·a^(p^i).
pub fn eval_additive(skew: &SkewPoly, at: &RingElem) -> Result<RingElem> {
    let mut acc = RingElem::zero(at.presentation());
    for (i, c) in skew.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&c.mul(&at.frobenius_pow(i as u32))?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::normal_form;

    #[test]
    fn identity_is_neutral() {
        let (pres, points) = universal_points(2, 2, &[("a", 2)]).unwrap();
        let id = UnElement::identity(&pres, 2);
        let x = &points[0];
        assert_eq!(&un_mul(&pres, &id, x).unwrap(), x);
        assert_eq!(&un_mul(&pres, x, &id).unwrap(), x);
    }

    #[test]
    fn level_two_product_formula() {
        // (λ1, λ2)·(μ1, μ2) = (λ1 + μ1, λ2 + μ2 + λ1 μ1^p)
        for p in [2u64, 3] {
            let (pres, points) = universal_points(p, 2, &[("a", 2), ("b", 2)]).unwrap();
            let prod = un_mul(&pres, &points[0], &points[1]).unwrap();
            let first = normal_form("a1 + b1", &pres).unwrap();
            let second = normal_form(&format!("a2 + b2 + a1*b1^{p}"), &pres).unwrap();
            assert_eq!(prod.coeff(1).unwrap(), &first);
            assert_eq!(prod.coeff(2).unwrap(), &second);
        }
    }

    #[test]
    fn generic_products_close_at_2_3() {
        // constraint powers hold for a generic product at (p,n) = (2,3);
        // un_mul re-validates them internally
        let (pres, points) = universal_points(2, 3, &[("a", 3), ("b", 3)]).unwrap();
        assert!(un_mul(&pres, &points[0], &points[1]).is_ok());
    }

    #[test]
    fn inverse_examples() {
        // (λ, 0) at level 2, p = 2 inverts to (λ, λ^3)
        let (pres, _) = universal_points(2, 2, &[("a", 2)]).unwrap();
        let l = normal_form("a1", &pres).unwrap();
        let x = UnElement::new(2, vec![l.clone(), RingElem::zero(&pres)]).unwrap();
        let inv = un_inverse(&pres, &x).unwrap();
        assert_eq!(inv.coeff(1).unwrap(), &l);
        assert_eq!(inv.coeff(2).unwrap(), &l.pow(3));

        // generic inverse at (3,2)
        let (pres, points) = universal_points(3, 2, &[("a", 2)]).unwrap();
        let inv = un_inverse(&pres, &points[0]).unwrap();
        let prod = un_mul(&pres, &points[0], &inv).unwrap();
        assert!(prod.is_identity());
    }

    #[test]
    fn frobenius_is_a_homomorphism() {
        let (pres, points) = universal_points(2, 2, &[("a", 2), ("b", 2)]).unwrap();
        let fx = frobenius_map(&points[0]).unwrap();
        // generic image at (2,2) is (λ1^2, 0) viewed in U_1
        assert_eq!(fx.level(), 1);
        assert_eq!(
            fx.coeff(1).unwrap(),
            &normal_form("a1^2", &pres).unwrap()
        );
        let id = UnElement::identity(&pres, 2);
        assert!(frobenius_map(&id).unwrap().is_identity());

        let prod = un_mul(&pres, &points[0], &points[1]).unwrap();
        let lhs = frobenius_map(&prod).unwrap();
        let rhs = un_mul(
            &pres,
            &frobenius_map(&points[0]).unwrap(),
            &frobenius_map(&points[1]).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn frobenius_kernel_is_componentwise() {
        // on the locus λ_i^p = 0 the parametrization is additive
        let p = 2u64;
        let n = 3u32;
        let mut builder = TriangularPresentation::builder(BaseField::prime(p).unwrap());
        for i in 1..=n {
            builder = builder.nilpotent(&format!("x{i}"), p as u32);
            builder = builder.nilpotent(&format!("y{i}"), p as u32);
        }
        let pres = builder.build().unwrap();
        let coeffs = |label: &str| -> Vec<RingElem> {
            (1..=n)
                .map(|i| RingElem::var(&pres, &format!("{label}{i}")).unwrap())
                .collect()
        };
        let x = UnElement::new(n, coeffs("x")).unwrap();
        let y = UnElement::new(n, coeffs("y")).unwrap();
        let prod = un_mul(&pres, &x, &y).unwrap();
        for i in 1..=n {
            let sum = x.coeff(i).unwrap().add(y.coeff(i).unwrap()).unwrap();
            assert_eq!(prod.coeff(i).unwrap(), &sum);
        }
        // and a generic point is killed by Frobenius exactly here
        let fx = frobenius_map(&x).unwrap();
        assert!(fx.is_identity());
    }

    #[test]
    fn un_order_is_rank() {
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (3, 2), (5, 1)] {
            let pres = un_coordinate_ring(p, n).unwrap();
            assert_eq!(pres.rank(), Some(p.pow(n * (n + 1) / 2)));
        }
    }

    #[test]
    fn adjoint_matrix_matches_epsilon_conjugation() {
        for (p, n) in [(2u64, 2u32), (3, 2), (2, 3)] {
            let mut builder = TriangularPresentation::builder(BaseField::prime(p).unwrap());
            for i in 1..=n {
                builder = builder.nilpotent(&format!("l{i}"), p.pow(n - i + 1) as u32);
            }
            let pres = builder.nilpotent("e", 2).build().unwrap();
            let coeffs: Vec<RingElem> = (1..=n)
                .map(|i| RingElem::var(&pres, &format!("l{i}")).unwrap())
                .collect();
            let x = UnElement::new(n, coeffs).unwrap();
            let ad = adjoint_matrix(&pres, &x);
            let eps = RingElem::var(&pres, "e").unwrap();
            let skew_x = x.to_skew(&pres);
            let skew_x_inv = skew_x.inverse().unwrap();
            for s in 1..=n as usize {
                // P^{-1} (1 + εF^s) P
                let mut basis_coeffs = vec![RingElem::zero(&pres); s + 1];
                basis_coeffs[0] = RingElem::one(&pres);
                basis_coeffs[s] = eps.clone();
                let basis = SkewPoly::from_coeffs(&pres, basis_coeffs);
                let conj = skew_x_inv.mul(&basis).unwrap().mul(&skew_x).unwrap();
                for r in 1..=n as usize {
                    let expect = if r >= s {
                        eps.mul(ad.at(r - 1, s - 1)).unwrap()
                    } else {
                        RingElem::zero(&pres)
                    };
                    assert_eq!(conj.coeff(r), expect, "(p,n,s,r)=({p},{n},{s},{r})");
                }
            }
        }
    }

    #[test]
    fn adjoint_identity_and_level_two_column() {
        let (pres, points) = universal_points(2, 2, &[("l", 2)]).unwrap();
        let id = UnElement::identity(&pres, 2);
        assert!(adjoint_matrix(&pres, &id).is_identity());
        // column for e_1 at (2,2) is (1, λ1^2)
        let ad = adjoint_matrix(&pres, &points[0]);
        assert!(ad.at(0, 0).is_one());
        assert_eq!(ad.at(1, 0), &normal_form("l1^2", &pres).unwrap());
    }

    #[test]
    fn central_membership() {
        let (pres, _) = universal_points(2, 2, &[("l", 2)]).unwrap();
        let id = UnElement::identity(&pres, 2);
        for r in 0..=2 {
            assert!(id.central_member(r).unwrap());
        }
        let l2 = normal_form("l2", &pres).unwrap();
        let x = UnElement::new(2, vec![RingElem::zero(&pres), l2]).unwrap();
        assert!(x.central_member(1).unwrap());
        assert!(!x.central_member(0).unwrap());
        assert!(x.central_member(3).is_err());
    }

    #[test]
    fn central_series_at_2_2_and_3_2() {
        for (p, n) in [(2u64, 2u32), (3, 2)] {
            let report = verify_central_series(p, n, 1_000_000).unwrap();
            assert!(report.pass(), "(p,n)=({p},{n}): {report:?}");
        }
    }

    #[test]
    fn central_series_level_one_is_abelian() {
        let report = verify_central_series(5, 1, 1_000_000).unwrap();
        assert!(report.pass());
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].strictness.is_none());
    }

    #[test]
    fn central_series_budget_enforced() {
        assert!(matches!(
            verify_central_series(2, 3, 16),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn spec_strictness_index_is_off_by_one() {
        // The strictness witness for r has its nonzero coefficient at index
        // n-r+1; demanding one at index <= n-r fails even at (2,2), r = 1.
        let (pres, points) = universal_points(2, 2, &[("x", 2), ("y", 2)]).unwrap();
        let z = two_point_commutator(&pres, &points[0], &points[1]).unwrap();
        assert!(z.coeff(1).unwrap().is_zero());
        assert!(!z.coeff(2).unwrap().is_zero());
    }

    #[test]
    fn commutator_formula_small_grid() {
        assert!(commutator_formula_check(2, 2, 1).unwrap());
        assert!(commutator_formula_check(3, 2, 1).unwrap());
        assert!(commutator_formula_check(2, 3, 2).unwrap());
        assert!(commutator_formula_check(2, 3, 1).unwrap());
        assert!(commutator_formula_check(2, 2, 2).is_err());
    }

    fn group_test_presentation(p: u64, n: u32) -> Arc<TriangularPresentation> {
        let base = BaseField::with_params(p, &["t"]).unwrap();
        let mut builder = TriangularPresentation::builder(base);
        for i in 1..=n {
            builder = builder.nilpotent(&format!("l{i}"), p.pow(n - i + 1) as u32);
        }
        builder.free("al").free("x").build().unwrap()
    }

    fn generic_group_element(pres: &Arc<TriangularPresentation>, n: u32) -> GroupElement {
        let coeffs: Vec<RingElem> = (1..=n)
            .map(|i| RingElem::var(pres, &format!("l{i}")).unwrap())
            .collect();
        let u = UnElement::new(n, coeffs).unwrap();
        let t = RingElem::constant(pres, FieldElem::param("t", pres.base()).unwrap());
        GroupElement::new(RingElem::var(pres, "al").unwrap(), u, t).unwrap()
    }

    #[test]
    fn compose_with_identity() {
        let pres = group_test_presentation(2, 2);
        let g = generic_group_element(&pres, 2);
        let id = GroupElement::identity(&pres, 2);
        assert_eq!(g.compose(&id, &pres).unwrap(), g);
        assert_eq!(id.compose(&g, &pres).unwrap(), g);
        let ginv = g.inverse(&pres).unwrap();
        assert_eq!(g.compose(&ginv, &pres).unwrap(), id);
    }

    #[test]
    fn conjugating_a_translation_gives_the_additive_image() {
        // P α P^{-1} translates by Σ λ_i α^(p^i) (λ_0 = 1)
        let pres = group_test_presentation(2, 2);
        let n = 2;
        let coeffs: Vec<RingElem> = (1..=n)
            .map(|i| RingElem::var(&pres, &format!("l{i}")).unwrap())
            .collect();
        let u = UnElement::new(n, coeffs).unwrap();
        let pelt = GroupElement::from_unipotent(&pres, u.clone());
        let alpha = GroupElement::from_translation(RingElem::var(&pres, "al").unwrap(), n);
        let conj = pelt
            .compose(&alpha, &pres)
            .unwrap()
            .compose(&pelt.inverse(&pres).unwrap(), &pres)
            .unwrap();
        let expect = normal_form("al + l1*al^2 + l2*al^4", &pres).unwrap();
        assert!(conj.unipotent().is_identity());
        assert!(conj.scaling().is_one());
        assert_eq!(conj.translation(), &expect);
    }

    #[test]
    fn conjugating_by_a_scaling_twists_coefficients() {
        // μ P μ^{-1} has coefficients μ^(1-p^i) λ_i
        let pres = group_test_presentation(3, 2);
        let n = 2;
        let coeffs: Vec<RingElem> = (1..=n)
            .map(|i| RingElem::var(&pres, &format!("l{i}")).unwrap())
            .collect();
        let u = UnElement::new(n, coeffs).unwrap();
        let pelt = GroupElement::from_unipotent(&pres, u);
        let t = RingElem::constant(&pres, FieldElem::param("t", pres.base()).unwrap());
        let m = GroupElement::from_scaling(t, n).unwrap();
        let conj = m
            .compose(&pelt, &pres)
            .unwrap()
            .compose(&m.inverse(&pres).unwrap(), &pres)
            .unwrap();
        assert!(conj.translation().is_zero());
        assert!(conj.scaling().is_one());
        for i in 1..=n {
            // μ^(1-p^i) = 1/t^(p^i - 1)
            let expect = normal_form(&format!("l{i} / t^{}", 3u64.pow(i) - 1), &pres).unwrap();
            assert_eq!(conj.unipotent().coeff(i).unwrap(), &expect);
        }
    }

    #[test]
    fn action_on_x_matches_substitution() {
        let pres = group_test_presentation(2, 1);
        // pure U_1 element λ1 sends x to x + λ1 x^2
        let l1 = RingElem::var(&pres, "l1").unwrap();
        let u = UnElement::new(1, vec![l1]).unwrap();
        let g = GroupElement::from_unipotent(&pres, u);
        let x = RingElem::var(&pres, "x").unwrap();
        let image = g.act_on_polynomial(&x, "x", &pres).unwrap();
        assert_eq!(image, normal_form("x + l1*x^2", &pres).unwrap());

        let id = GroupElement::identity(&pres, 1);
        let q = normal_form("x^3 + al*x", &pres).unwrap();
        assert_eq!(id.act_on_polynomial(&q, "x", &pres).unwrap(), q);
    }

    #[test]
    fn unitriangular_central_series_oracle() {
        // Z_s of UT_d(R) consists of the unitriangular matrices vanishing
        // on the d-1-s secondary diagonals above the main one; checked for
        // d in {3,4} over a truncated coefficient ring.
        let p = 2u64;
        for d in [3usize, 4] {
            // containment: generic A in the Z_s shape, generic B, and
            // [A,B] lies in the Z_{s-1} shape
            for s in 1..d {
                let (a, b) = generic_ut_pair(p, d, s);
                let comm = ut_commutator(&a, &b);
                assert!(
                    in_center_shape(&comm, d, s - 1),
                    "containment d={d} s={s}"
                );
                // strictness: generic A in the Z_{s+1} shape escapes Z_{s-1}
                if s < d - 1 {
                    let (a, b) = generic_ut_pair(p, d, s + 1);
                    let comm = ut_commutator(&a, &b);
                    assert!(!in_center_shape(&comm, d, s - 1), "strictness d={d} s={s}");
                }
            }
        }
    }

    fn generic_ut_pair(p: u64, d: usize, s: usize) -> (RingMatrix, RingMatrix) {
        let mut builder = TriangularPresentation::builder(BaseField::prime(p).unwrap());
        for i in 0..d {
            for j in (i + 1)..d {
                if j - i > d - 1 - s {
                    builder = builder.nilpotent(&format!("a{i}{j}"), p as u32);
                }
                builder = builder.nilpotent(&format!("b{i}{j}"), p as u32);
            }
        }
        let pres = builder.build().unwrap();
        let mut a = RingMatrix::identity(&pres, d);
        let mut b = RingMatrix::identity(&pres, d);
        for i in 0..d {
            for j in (i + 1)..d {
                if j - i > d - 1 - s {
                    *a.at_mut(i, j) = RingElem::var(&pres, &format!("a{i}{j}")).unwrap();
                }
                *b.at_mut(i, j) = RingElem::var(&pres, &format!("b{i}{j}")).unwrap();
            }
        }
        (a, b)
    }

    fn ut_commutator(a: &RingMatrix, b: &RingMatrix) -> RingMatrix {
        a.mul(b)
            .unwrap()
            .mul(&a.unitriangular_inverse().unwrap())
            .unwrap()
            .mul(&b.unitriangular_inverse().unwrap())
            .unwrap()
    }

    fn in_center_shape(m: &RingMatrix, d: usize, s: usize) -> bool {
        (0..d).all(|i| {
            ((i + 1)..d).all(|j| {
                if j - i <= d - 1 - s {
                    m.at(i, j).is_zero()
                } else {
                    true
                }
            })
        })
    }
}
