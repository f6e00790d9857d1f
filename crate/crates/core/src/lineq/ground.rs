use std::fmt;

use crate::error::{Error, Result};

/// The ground set F of a linear system: a prime field, the integer range
/// {1..N} with arithmetic over the integers, or a finite product of cyclic
/// groups with an explicit element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundSet {
    PrimeField { p: u64 },
    IntegerRange { n: u64 },
    AbelianGroup { factors: Vec<u64> },
}

impl GroundSet {
    pub fn prime_field(p: u64) -> Result<GroundSet> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(GroundSet::PrimeField { p })
    }

    pub fn integer_range(n: u64) -> Result<GroundSet> {
        if n == 0 {
            return Err(Error::invalid("integer range must have N >= 1".to_string()));
        }
        Ok(GroundSet::IntegerRange { n })
    }

    pub fn abelian(factors: Vec<u64>) -> Result<GroundSet> {
        if factors.is_empty() || factors.iter().any(|&f| f < 2) {
            return Err(Error::invalid(
                "cyclic factors must all be at least 2".to_string(),
            ));
        }
        Ok(GroundSet::AbelianGroup { factors })
    }

    pub fn size(&self) -> u64 {
        match self {
            GroundSet::PrimeField { p } => *p,
            GroundSet::IntegerRange { n } => *n,
            GroundSet::AbelianGroup { factors } => factors.iter().product(),
        }
    }

    /// Cyclic decomposition for modular arithmetic; None for integer ranges.
    pub fn factors(&self) -> Option<Vec<u64>> {
        match self {
            GroundSet::PrimeField { p } => Some(vec![*p]),
            GroundSet::AbelianGroup { factors } => Some(factors.clone()),
            GroundSet::IntegerRange { .. } => None,
        }
    }

    /// lcm of the cyclic factors (group exponent); None for integer ranges.
    pub fn exponent(&self) -> Option<u64> {
        self.factors()
            .map(|fs| fs.into_iter().fold(1, num_integer::lcm))
    }

    /// The integer value an element index stands for, where meaningful.
    /// Prime fields use residues 0..p-1, ranges use 1..N; group elements are
    /// addressed by their mixed-radix index.
    pub fn value_of(&self, index: u64) -> i64 {
        match self {
            GroundSet::PrimeField { .. } => index as i64,
            GroundSet::IntegerRange { .. } => index as i64 + 1,
            GroundSet::AbelianGroup { .. } => index as i64,
        }
    }

    /// Inverse of `value_of`.
    pub fn index_of_value(&self, value: i64) -> Result<u64> {
        let size = self.size() as i64;
        match self {
            GroundSet::PrimeField { p } => {
                let v = value.rem_euclid(*p as i64);
                Ok(v as u64)
            }
            GroundSet::IntegerRange { n } => {
                if value < 1 || value > *n as i64 {
                    return Err(Error::invalid(format!("value {value} outside 1..={n}")));
                }
                Ok(value as u64 - 1)
            }
            GroundSet::AbelianGroup { .. } => {
                if value < 0 || value >= size {
                    return Err(Error::invalid(format!(
                        "element index {value} outside 0..{size}"
                    )));
                }
                Ok(value as u64)
            }
        }
    }

    /// Mixed-radix decomposition of an element index into per-factor
    /// residues (little-endian in factor order). Prime fields yield a
    /// single residue.
    pub fn residues(&self, index: u64) -> Vec<u64> {
        match self.factors() {
            Some(fs) => {
                let mut idx = index;
                fs.iter()
                    .map(|&f| {
                        let r = idx % f;
                        idx /= f;
                        r
                    })
                    .collect()
            }
            None => vec![index],
        }
    }

    pub fn index_of_residues(&self, residues: &[u64]) -> u64 {
        let fs = self.factors().expect("modular ground set");
        let mut idx = 0u64;
        let mut scale = 1u64;
        for (r, f) in residues.iter().zip(&fs) {
            idx += (r % f) * scale;
            scale *= f;
        }
        idx
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundSet::PrimeField { p } => write!(f, "Fp {p}"),
            GroundSet::IntegerRange { n } => write!(f, "ZN {n}"),
            GroundSet::AbelianGroup { factors } => {
                write!(f, "AB")?;
                for x in factors {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime at least `lower`.
pub fn next_prime(lower: u64) -> u64 {
    let mut p = lower.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_order() {
        assert_eq!(GroundSet::prime_field(7).unwrap().size(), 7);
        assert_eq!(GroundSet::integer_range(10).unwrap().size(), 10);
        let g = GroundSet::abelian(vec![2, 3]).unwrap();
        assert_eq!(g.size(), 6);
        assert_eq!(g.exponent(), Some(6));
        let g = GroundSet::abelian(vec![4, 6]).unwrap();
        assert_eq!(g.exponent(), Some(12));
    }

    #[test]
    fn residue_roundtrip() {
        let g = GroundSet::abelian(vec![3, 4, 5]).unwrap();
        for idx in 0..g.size() {
            let rs = g.residues(idx);
            assert_eq!(g.index_of_residues(&rs), idx);
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(11) && !is_prime(1) && !is_prime(9));
        assert_eq!(next_prime(160), 163);
    }
}
