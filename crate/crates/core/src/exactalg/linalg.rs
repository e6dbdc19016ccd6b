//! Linear algebra over the base field and over quotient rings.
//!
//! Finite-rank presentations expose a canonical monomial basis; elements
//! become coordinate vectors and multiplication becomes a matrix, which
//! backs the unit test, ring inversion, and the rank checks used by the
//! curve model. Matrices over F_p take a fast scalar path.

use std::sync::Arc;

use smallvec::smallvec;

use crate::error::{Error, Result};

use super::field::{fp_inv, fp_mul, fp_sub, BaseField, ExpVec, FieldElem};
use super::presentation::{TriangularPresentation, VarRelation};
use super::ring::RingElem;

/// The canonical monomial basis of a finite-rank presentation, in ascending
/// lexicographic order on exponent vectors.
pub fn monomial_basis(pres: &Arc<TriangularPresentation>) -> Result<Vec<ExpVec>> {
    let mut bounds = Vec::with_capacity(pres.num_vars());
    for i in 0..pres.num_vars() {
        match pres.relation(i) {
            VarRelation::Free => {
                return Err(Error::InfiniteRank(format!(
                    "free variable `{}`",
                    pres.var_name(i)
                )))
            }
            VarRelation::Power { exponent, .. } => bounds.push(*exponent),
        }
    }
    let rank = pres
        .rank()
        .ok_or_else(|| Error::InfiniteRank("rank overflow".into()))?;
    let mut basis = Vec::with_capacity(rank as usize);
    let mut cur: ExpVec = smallvec![0; bounds.len()];
    loop {
        basis.push(cur.clone());
        // odometer increment, most significant variable first
        let mut i = bounds.len();
        loop {
            if i == 0 {
                basis.sort();
                return Ok(basis);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Columns are coordinates of a*basis[j]: the matrix of multiplication by a.
fn mult_matrix(a: &RingElem) -> Result<(Vec<Vec<FieldElem>>, usize)> {
    let pres = a.presentation();
    let basis = monomial_basis(pres)?;
    let n = basis.len();
    let k = pres.base();
    let mut cols: Vec<Vec<FieldElem>> = Vec::with_capacity(n);
    for exp in &basis {
        let m = RingElem::monomial(pres, exp.clone(), FieldElem::one(k));
        let prod = a.mul(&m)?;
        cols.push(prod.monomial_coordinates()?);
    }
    Ok((cols, n))
}

/// Tries to view a field matrix as scalars in F_p (possible whenever the
/// base field has no parameters, and often otherwise).
fn as_scalar_matrix(cols: &[Vec<FieldElem>], k: &BaseField) -> Option<Vec<Vec<u64>>> {
    cols.iter()
        .map(|col| col.iter().map(|c| c.to_scalar(k)).collect::<Option<Vec<_>>>())
        .collect()
}

/// Row-reduces a column-major scalar matrix mod p; returns the rank.
pub(crate) fn rank_mod_p(cols: &mut [Vec<u64>], rows: usize, p: u64) -> usize {
    let ncols = cols.len();
    let mut rank = 0;
    for col in 0..ncols {
        // find pivot row
        let mut pivot = None;
        for r in rank..rows {
            if cols[col][r] % p != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        for c in cols.iter_mut() {
            c.swap(rank, pr);
        }
        let inv = fp_inv(cols[col][rank], p);
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = fp_mul(cols[col][r] % p, inv, p);
            if factor == 0 {
                continue;
            }
            for c in col..ncols {
                let head = cols[c][rank] % p;
                cols[c][r] = fp_sub(cols[c][r] % p, fp_mul(factor, head, p), p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank of a column-major matrix of field elements.
pub fn field_rank(cols: &[Vec<FieldElem>], rows: usize, k: &BaseField) -> usize {
    if let Some(mut scalars) = as_scalar_matrix(cols, k) {
        return rank_mod_p(&mut scalars, rows, k.characteristic());
    }
    let mut m: Vec<Vec<FieldElem>> = cols.to_vec();
    let ncols = m.len();
    let mut rank = 0;
    for col in 0..ncols {
        let mut pivot = None;
        for r in rank..rows {
            if !m[col][r].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        for c in m.iter_mut() {
            c.swap(rank, pr);
        }
        let inv = m[col][rank].inverse(k).expect("nonzero pivot");
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = m[col][r].mul(&inv, k);
            if factor.is_zero() {
                continue;
            }
            for c in col..ncols {
                let head = m[c][rank].clone();
                m[c][r] = m[c][r].sub(&factor.mul(&head, k), k);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Whether multiplication by a is an invertible linear map.
pub(crate) fn mult_matrix_invertible(a: &RingElem) -> Result<bool> {
    let (cols, n) = mult_matrix(a)?;
    Ok(field_rank(&cols, n, a.presentation().base()) == n)
}

/// Solves (mult by a) x = 1, giving the inverse element.
pub(crate) fn mult_matrix_solve_one(a: &RingElem) -> Result<RingElem> {
    let pres = a.presentation();
    let k = pres.base();
    let (cols, n) = mult_matrix(a)?;
    let basis = monomial_basis(pres)?;
    let one_pos = basis
        .iter()
        .position(|e| e.iter().all(|&x| x == 0))
        .expect("constant monomial in basis");

    // Augmented Gaussian elimination over the field.
    let mut m: Vec<Vec<FieldElem>> = cols;
    let mut rhs = vec![FieldElem::zero(k); n];
    rhs[one_pos] = FieldElem::one(k);

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let mut pivot = None;
        for r in row..n {
            if !m[col][r].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        for c in m.iter_mut() {
            c.swap(row, pr);
        }
        rhs.swap(row, pr);
        let inv = m[col][row].inverse(k)?;
        for c in 0..n {
            m[c][row] = m[c][row].mul(&inv, k);
        }
        rhs[row] = rhs[row].mul(&inv, k);
        for r in 0..n {
            if r == row {
                continue;
            }
            let factor = m[col][r].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..n {
                let head = m[c][row].clone();
                m[c][r] = m[c][r].sub(&factor.mul(&head, k), k);
            }
            rhs[r] = rhs[r].sub(&factor.mul(&rhs[row], k), k);
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    if row < n {
        return Err(Error::NotInvertible(
            "multiplication matrix is singular".into(),
        ));
    }
    let mut terms = std::collections::BTreeMap::new();
    for (col, exp) in basis.iter().enumerate() {
        let r = pivot_of_col[col].expect("full rank");
        if !rhs[r].is_zero() {
            terms.insert(exp.clone(), rhs[r].clone());
        }
    }
    Ok(RingElem::from_terms(pres, terms))
}

/// Dense square matrix over a quotient ring.
#[derive(Debug, Clone)]
pub struct RingMatrix {
    pres: Arc<TriangularPresentation>,
    size: usize,
    entries: Vec<RingElem>,
}

impl PartialEq for RingMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a == b)
    }
}

impl RingMatrix {
    pub fn new(pres: &Arc<TriangularPresentation>, size: usize) -> Self {
        RingMatrix {
            pres: pres.clone(),
            size,
            entries: vec![RingElem::zero(pres); size * size],
        }
    }

    pub fn identity(pres: &Arc<TriangularPresentation>, size: usize) -> Self {
        let mut m = Self::new(pres, size);
        for i in 0..size {
            *m.at_mut(i, i) = RingElem::one(pres);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn at(&self, row: usize, col: usize) -> &RingElem {
        &self.entries[row * self.size + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut RingElem {
        &mut self.entries[row * self.size + col]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::Usage("matrix size mismatch".into()));
        }
        let mut out = Self::new(&self.pres, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = RingElem::zero(&self.pres);
                for t in 0..self.size {
                    acc = acc.add(&self.at(i, t).mul(other.at(t, j))?)?;
                }
                *out.at_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::Usage("matrix size mismatch".into()));
        }
        let mut out = Self::new(&self.pres, self.size);
        for i in 0..self.size * self.size {
            out.entries[i] = self.entries[i].add(&other.entries[i])?;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.size).all(|i| {
            (0..self.size).all(|j| {
                if i == j {
                    self.at(i, j).is_one()
                } else {
                    self.at(i, j).is_zero()
                }
            })
        })
    }

    /// Inverse of a unitriangular matrix (identity diagonal, zero below):
    /// the terminating geometric series in the strictly-upper part.
    pub fn unitriangular_inverse(&self) -> Result<Self> {
        let mut nilpotent = self.clone();
        for i in 0..self.size {
            if !self.at(i, i).is_one() {
                return Err(Error::OutOfDomain("matrix is not unitriangular".into()));
            }
            *nilpotent.at_mut(i, i) = RingElem::zero(&self.pres);
        }
        let mut acc = Self::identity(&self.pres, self.size);
        let mut power = Self::identity(&self.pres, self.size);
        for k in 1..=self.size {
            power = power.mul(&nilpotent)?;
            if k % 2 == 1 {
                // (1 + N)^{-1} = 1 - N + N^2 - ...
                let mut neg = power.clone();
                for e in &mut neg.entries {
                    *e = e.neg();
                }
                acc = acc.add(&neg)?;
            } else {
                acc = acc.add(&power)?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field::BaseField;
    use crate::exactalg::parse::normal_form;

    fn small_ring() -> Arc<TriangularPresentation> {
        TriangularPresentation::builder(BaseField::prime(2).unwrap())
            .nilpotent("l1", 4)
            .nilpotent("l2", 2)
            .build()
            .unwrap()
    }

    #[test]
    fn basis_order_is_lexicographic() {
        let pres = small_ring();
        let basis = monomial_basis(&pres).unwrap();
        assert_eq!(basis.len(), 8);
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
        assert!(basis[0].iter().all(|&e| e == 0));
    }

    #[test]
    fn coordinates_pick_out_unit_vectors() {
        let pres = small_ring();
        let one = RingElem::one(&pres);
        let coords = one.monomial_coordinates().unwrap();
        let k = pres.base();
        assert_eq!(coords.iter().filter(|c| !c.is_zero()).count(), 1);
        assert!(coords[0].is_one(k));

        let e = normal_form("l1 + l1*l2", &pres).unwrap();
        let coords = e.monomial_coordinates().unwrap();
        assert_eq!(coords.iter().filter(|c| !c.is_zero()).count(), 2);
    }

    #[test]
    fn unitriangular_inverse_works() {
        let pres = small_ring();
        let mut m = RingMatrix::identity(&pres, 3);
        *m.at_mut(0, 1) = normal_form("l1", &pres).unwrap();
        *m.at_mut(1, 2) = normal_form("l2", &pres).unwrap();
        *m.at_mut(0, 2) = normal_form("1 + l1*l2", &pres).unwrap();
        let inv = m.unitriangular_inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }
}
