//! Triangular presentations of quotient rings.
//!
//! A presentation declares an ordered list of variables over a base field;
//! each variable is either free or carries a single relation v^d = g where
//! the tail g only mentions strictly earlier variables. This is general
//! enough for nilpotent towers K[l]/(l^(p^k)) and algebraic towers like
//! K[y,z]/(y^(p^2) - a, z^p - b - a*y^p), and rewriting by the relations is
//! confluent, so every element has a unique normal form.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::field::{BaseField, ExpVec, FieldElem};
use super::parse;

/// Relation attached to one presentation variable.
#[derive(Debug, Clone)]
pub enum VarRelation {
    /// No relation; the variable is a free polynomial generator.
    Free,
    /// v^exponent = tail, with the tail a normal-form polynomial in
    /// strictly earlier variables (exponent vectors have full arity).
    Power {
        exponent: u32,
        tail: BTreeMap<ExpVec, FieldElem>,
    },
}

#[derive(Debug, Clone)]
pub struct TriangularPresentation {
    base: BaseField,
    vars: Vec<(String, VarRelation)>,
}

impl TriangularPresentation {
    pub fn builder(base: BaseField) -> PresentationBuilder {
        PresentationBuilder {
            base,
            specs: Vec::new(),
        }
    }

    /// The free polynomial ring over `base` in the given variables.
    pub fn free_ring(base: BaseField, vars: &[&str]) -> Result<Arc<Self>> {
        let mut b = Self::builder(base);
        for v in vars {
            b = b.free(v);
        }
        b.build()
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, index: usize) -> &str {
        &self.vars[index].0
    }

    pub fn relation(&self, index: usize) -> &VarRelation {
        &self.vars[index].1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn has_free_vars(&self) -> bool {
        self.vars
            .iter()
            .any(|(_, r)| matches!(r, VarRelation::Free))
    }

    /// Dimension of the ring as a vector space over the base field, when
    /// finite: the product of the relation exponents.
    pub fn rank(&self) -> Option<u64> {
        let mut rank: u64 = 1;
        for (_, rel) in &self.vars {
            match rel {
                VarRelation::Free => return None,
                VarRelation::Power { exponent, .. } => {
                    rank = rank.checked_mul(*exponent as u64)?;
                }
            }
        }
        Some(rank)
    }

    /// Certified nilpotency bound: any nilpotent element a satisfies
    /// a^N = 0 for N = 1 + sum of (d_i - 1) over the bounded variables.
    pub fn nil_bound(&self) -> u64 {
        1 + self
            .vars
            .iter()
            .map(|(_, r)| match r {
                VarRelation::Free => 0,
                VarRelation::Power { exponent, .. } => (*exponent - 1) as u64,
            })
            .sum::<u64>()
    }

    /// Structural compatibility check for binary operations.
    pub fn compatible(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        if Arc::ptr_eq(self, other) {
            return true;
        }
        if self.base != other.base || self.vars.len() != other.vars.len() {
            return false;
        }
        self.vars.iter().zip(other.vars.iter()).all(|(a, b)| {
            a.0 == b.0
                && match (&a.1, &b.1) {
                    (VarRelation::Free, VarRelation::Free) => true,
                    (
                        VarRelation::Power { exponent: da, tail: ta },
                        VarRelation::Power { exponent: db, tail: tb },
                    ) => {
                        da == db
                            && ta.len() == tb.len()
                            && ta.iter().zip(tb.iter()).all(|((ea, ca), (eb, cb))| {
                                ea == eb && ca.eq_in(cb, &self.base)
                            })
                    }
                    _ => false,
                }
        })
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (name, rel) in &self.vars {
            match rel {
                VarRelation::Free => parts.push(name.clone()),
                VarRelation::Power { exponent, tail } => {
                    if tail.is_empty() {
                        parts.push(format!("{name}^{exponent}"));
                    } else {
                        let elem = super::ring::RingElem::from_terms_unchecked(
                            Arc::new(self.clone()),
                            tail.clone(),
                        );
                        parts.push(format!("{name}^{exponent}={elem}"));
                    }
                }
            }
        }
        parts.join(", ")
    }
}

enum VarSpec {
    Free(String),
    Nilpotent(String, u32),
    Algebraic(String, u32, String),
}

pub struct PresentationBuilder {
    base: BaseField,
    specs: Vec<VarSpec>,
}

impl PresentationBuilder {
    pub fn free(mut self, name: &str) -> Self {
        self.specs.push(VarSpec::Free(name.to_string()));
        self
    }

    /// Adds v with relation v^exponent = 0.
    pub fn nilpotent(mut self, name: &str, exponent: u32) -> Self {
        self.specs.push(VarSpec::Nilpotent(name.to_string(), exponent));
        self
    }

    /// Adds v with relation v^exponent = tail, where the tail expression is
    /// parsed over the variables declared so far.
    pub fn algebraic(mut self, name: &str, exponent: u32, tail: &str) -> Self {
        self.specs
            .push(VarSpec::Algebraic(name.to_string(), exponent, tail.to_string()));
        self
    }

    pub fn build(self) -> Result<Arc<TriangularPresentation>> {
        let mut pres = TriangularPresentation {
            base: self.base,
            vars: Vec::new(),
        };
        for spec in self.specs {
            let (name, rel) = match spec {
                VarSpec::Free(name) => (name, VarRelation::Free),
                VarSpec::Nilpotent(name, exponent) => {
                    if exponent == 0 {
                        return Err(Error::Usage(format!(
                            "relation exponent for `{name}` must be at least 1"
                        )));
                    }
                    (
                        name,
                        VarRelation::Power {
                            exponent,
                            tail: BTreeMap::new(),
                        },
                    )
                }
                VarSpec::Algebraic(name, exponent, src) => {
                    if exponent == 0 {
                        return Err(Error::Usage(format!(
                            "relation exponent for `{name}` must be at least 1"
                        )));
                    }
                    // Parse over the presentation built so far: the tail can
                    // only mention earlier variables, and lands in normal
                    // form with respect to their relations.
                    let partial = Arc::new(pres.clone());
                    let tail_elem = parse::normal_form(&src, &partial)?;
                    (
                        name,
                        VarRelation::Power {
                            exponent,
                            tail: tail_elem.into_terms(),
                        },
                    )
                }
            };
            if pres.var_index(&name).is_some() || pres.base.param_index(&name).is_some() {
                return Err(Error::Usage(format!("duplicate name `{name}`")));
            }
            // Widen earlier tails to the new arity.
            let widened = match rel {
                VarRelation::Power { exponent, tail } => {
                    let tail = tail
                        .into_iter()
                        .map(|(mut e, c)| {
                            e.resize(pres.vars.len() + 1, 0);
                            (e, c)
                        })
                        .collect();
                    VarRelation::Power { exponent, tail }
                }
                free => free,
            };
            let new_arity = pres.vars.len() + 1;
            for (_, earlier) in &mut pres.vars {
                if let VarRelation::Power { tail, .. } = earlier {
                    let widened_tail = std::mem::take(tail)
                        .into_iter()
                        .map(|(mut e, c)| {
                            e.resize(new_arity, 0);
                            (e, c)
                        })
                        .collect();
                    *tail = widened_tail;
                }
            }
            pres.vars.push((name, widened));
        }
        Ok(Arc::new(pres))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nil_bound() {
        let base = BaseField::prime(2).unwrap();
        let pres = TriangularPresentation::builder(base)
            .nilpotent("l1", 4)
            .nilpotent("l2", 2)
            .build()
            .unwrap();
        assert_eq!(pres.rank(), Some(8));
        assert_eq!(pres.nil_bound(), 1 + 3 + 1);
        assert!(!pres.has_free_vars());
    }

    #[test]
    fn free_vars_have_no_rank() {
        let base = BaseField::prime(3).unwrap();
        let pres = TriangularPresentation::builder(base)
            .nilpotent("l", 3)
            .free("x")
            .build()
            .unwrap();
        assert_eq!(pres.rank(), None);
        assert!(pres.has_free_vars());
    }

    #[test]
    fn algebraic_tail_mentions_earlier_vars_only() {
        let base = BaseField::with_params(2, &["a", "b"]).unwrap();
        let pres = TriangularPresentation::builder(base)
            .algebraic("y", 4, "a")
            .algebraic("z", 2, "b + a*y^2")
            .build()
            .unwrap();
        assert_eq!(pres.rank(), Some(8));
        // z's tail cannot mention z itself
        let base = BaseField::prime(2).unwrap();
        let bad = TriangularPresentation::builder(base)
            .algebraic("z", 2, "z")
            .build();
        assert!(bad.is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let base = BaseField::with_params(2, &["a"]).unwrap();
        assert!(TriangularPresentation::builder(base.clone())
            .nilpotent("l", 2)
            .nilpotent("l", 4)
            .build()
            .is_err());
        assert!(TriangularPresentation::builder(base)
            .nilpotent("a", 2)
            .build()
            .is_err());
    }
}
