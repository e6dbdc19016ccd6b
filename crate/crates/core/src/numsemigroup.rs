//! Numerical semigroups: membership tables, invariants, minimal
//! generators, gluing, and blowups.
//!
//! A numerical semigroup is an additive submonoid of the naturals with
//! finite complement (equivalently, gcd of the generators is 1). The
//! conductor c is the least integer with everything from c on inside, the
//! genus counts the gaps, the multiplicity is the least nonzero member.
//! Membership is computed by dynamic programming and the conductor is
//! certified by a run of max(generator) consecutive members: any larger
//! integer is such a member plus a generator.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
    /// membership[a] for 0 <= a <= bound; true for all a >= conductor.
    membership: Vec<bool>,
    conductor: u64,
    genus: u64,
    multiplicity: u64,
}

/// Invariant record for the semigroup family ⟨p^n, p^n - p^j (j < n)⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SemigroupInvariants {
    pub conductor: u64,
    pub genus: u64,
    pub multiplicity: u64,
    pub embedding_dim: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl NumericalSemigroup {
    /// Builds the semigroup generated by `gens` (gcd must be 1).
    pub fn from_generators(gens: &[u64]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Usage("empty generator set".into()));
        }
        if gens.contains(&0) {
            return Err(Error::Usage("generators must be positive".into()));
        }
        let g = gens.iter().copied().fold(0, gcd);
        if g != 1 {
            return Err(Error::NotNumericalSemigroup(format!(
                "gcd of generators is {g}"
            )));
        }
        let mut generators: Vec<u64> = gens.to_vec();
        generators.sort_unstable();
        generators.dedup();

        let max_gen = *generators.last().unwrap();
        // Grow the table until the conductor is certified by a full run of
        // max_gen consecutive members.
        let mut bound = (4 * max_gen).max(16);
        loop {
            let membership = sieve(&generators, bound as usize);
            if let Some(conductor) = certified_conductor(&membership, max_gen) {
                let genus = membership[..conductor as usize]
                    .iter()
                    .filter(|&&m| !m)
                    .count() as u64;
                let multiplicity = generators[0];
                return Ok(NumericalSemigroup {
                    generators,
                    membership,
                    conductor,
                    genus,
                    multiplicity,
                });
            }
            bound *= 2;
        }
    }

    /// The semigroup ⟨p^n, p^n - p^j : 0 <= j <= n-1⟩.
    pub fn gamma_pn(p: u64, n: u32) -> Self {
        let pn = p.pow(n);
        let mut gens = vec![pn];
        for j in 0..n {
            gens.push(pn - p.pow(j));
        }
        Self::from_generators(&gens).expect("gcd(p^n, p^n - 1) = 1")
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// Membership for any integer; negatives are non-members.
    pub fn contains(&self, a: i64) -> bool {
        if a < 0 {
            return false;
        }
        let a = a as u64;
        if a >= self.conductor {
            return true;
        }
        self.membership[a as usize]
    }

    /// Gaps (the finite complement), in increasing order.
    pub fn gaps(&self) -> Vec<u64> {
        (0..self.conductor).filter(|&a| !self.contains(a as i64)).collect()
    }

    /// The unique minimal generating set: every generating set contains it,
    /// so it suffices to filter the given generators down to the members
    /// that are not sums of two nonzero members.
    pub fn minimal_generators(&self) -> Vec<u64> {
        self.generators
            .iter()
            .copied()
            .filter(|&m| !self.is_sum_of_two(m))
            .collect()
    }

    fn is_sum_of_two(&self, m: u64) -> bool {
        (1..m).any(|a| self.contains(a as i64) && self.contains((m - a) as i64))
    }

    /// Equality as subsets of the naturals.
    pub fn same_set(&self, other: &Self) -> bool {
        if self.conductor != other.conductor {
            return false;
        }
        (0..self.conductor).all(|a| self.contains(a as i64) == other.contains(a as i64))
    }

    /// Symmetry: c = 2g, equivalently a is a member iff c-1-a is a gap.
    /// Both characterizations are computed and must agree.
    pub fn is_symmetric(&self) -> bool {
        let by_count = self.conductor == 2 * self.genus;
        let by_pairing = (0..self.conductor)
            .all(|a| self.contains(a as i64) != self.contains(self.conductor as i64 - 1 - a as i64));
        assert_eq!(
            by_count, by_pairing,
            "the two symmetry characterizations must agree"
        );
        by_count
    }

    /// 0/1 membership sequence (s_0, …, s_N).
    pub fn membership_series(&self, n: u64) -> Vec<i64> {
        (0..=n).map(|a| i64::from(self.contains(a as i64))).collect()
    }

    /// Blowup at the maximal ideal: with b the multiplicity and a_i the
    /// other minimal generators, the result is ⟨b, a_i - b⟩.
    pub fn blowup(&self) -> Self {
        let min_gens = self.minimal_generators();
        let b = min_gens[0];
        let mut gens = vec![b];
        for &a in &min_gens[1..] {
            gens.push(a - b);
        }
        Self::from_generators(&gens).expect("blowup keeps gcd 1")
    }
}

fn sieve(generators: &[u64], bound: usize) -> Vec<bool> {
    let mut membership = vec![false; bound + 1];
    membership[0] = true;
    for a in 1..=bound {
        membership[a] = generators
            .iter()
            .take_while(|&&g| g as usize <= a)
            .any(|&g| membership[a - g as usize]);
    }
    membership
}

/// Least c with membership from c through the end of the table, certified
/// by the table covering at least max_gen members past c.
fn certified_conductor(membership: &[bool], max_gen: u64) -> Option<u64> {
    let last_gap = membership.iter().rposition(|&m| !m);
    let conductor = match last_gap {
        None => 0,
        Some(g) => (g + 1) as u64,
    };
    if membership.len() as u64 >= conductor + max_gen {
        Some(conductor)
    } else {
        None
    }
}

/// Closed-form invariants of ⟨p^n, p^n - p^j⟩:
/// c = n·p^(n+1) - (n+2)·p^n + 2, g = c/2,
/// e = p^(n-1)(p-1) for p^n >= 3 and 1 otherwise,
/// d = n+1 for p >= 3 or n = 0, and n for p = 2, n >= 1.
pub fn invariant_formulas(p: u64, n: u32) -> SemigroupInvariants {
    let pn = p.pow(n);
    let conductor = (n as u64) * p.pow(n + 1) + 2 - (n as u64 + 2) * pn;
    let genus = conductor / 2;
    let multiplicity = if pn >= 3 { p.pow(n - 1) * (p - 1) } else { 1 };
    let embedding_dim = if p >= 3 || n == 0 {
        n as u64 + 1
    } else {
        n as u64
    };
    SemigroupInvariants {
        conductor,
        genus,
        multiplicity,
        embedding_dim,
    }
}

/// Delorme gluing a1·S1 + a2·S2. Requires gcd(a1, a2) = 1, a1 in S2, and
/// a2 in S1; the predicted conductor is a1·c1 + a2·c2 + (a1-1)(a2-1).
pub fn gluing(
    a1: u64,
    s1: &NumericalSemigroup,
    a2: u64,
    s2: &NumericalSemigroup,
) -> Result<(NumericalSemigroup, u64)> {
    if gcd(a1, a2) != 1 {
        return Err(Error::GluingHypothesis(format!(
            "gcd({a1}, {a2}) = {} is not 1",
            gcd(a1, a2)
        )));
    }
    if !s2.contains(a1 as i64) {
        return Err(Error::GluingHypothesis(format!(
            "{a1} is not a member of the second semigroup"
        )));
    }
    if !s1.contains(a2 as i64) {
        return Err(Error::GluingHypothesis(format!(
            "{a2} is not a member of the first semigroup"
        )));
    }
    let mut gens: Vec<u64> = s1.generators().iter().map(|&g| a1 * g).collect();
    gens.extend(s2.generators().iter().map(|&g| a2 * g));
    let glued = NumericalSemigroup::from_generators(&gens)?;
    let predicted = a1 * s1.conductor() + a2 * s2.conductor() + (a1 - 1) * (a2 - 1);
    Ok((glued, predicted))
}
