//! Exact rank machinery for small integer matrices: rational rank via
//! fraction-free elimination, rank over a prime field, and the Smith normal
//! form over the integers.

use crate::error::{Error, Result};

pub type Mat = Vec<Vec<i64>>;

pub fn dims(a: &Mat) -> (usize, usize) {
    (a.len(), a.first().map_or(0, |row| row.len()))
}

pub fn remove_columns(a: &Mat, drop: &[usize]) -> Mat {
    a.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| !drop.contains(j))
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

pub fn keep_columns(a: &Mat, keep: &[usize]) -> Mat {
    a.iter()
        .map(|row| keep.iter().map(|&j| row[j]).collect())
        .collect()
}

/// Rank over the rationals (Bareiss fraction-free elimination, exact).
pub fn rank_rational(a: &Mat) -> usize {
    let (rows, cols) = dims(a);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut prev: i128 = 1;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot = (row..rows).find(|&i| m[i][col] != 0);
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        for i in 0..rows {
            if i == row {
                continue;
            }
            for j in 0..cols {
                if j == col {
                    continue;
                }
                m[i][j] = (m[row][col] * m[i][j] - m[i][col] * m[row][j]) / prev;
            }
            m[i][col] = 0;
        }
        prev = m[row][col];
        row += 1;
        rank += 1;
    }
    rank
}

fn mod_pow(mut base: i128, mut exp: u64, modulus: i128) -> i128 {
    let mut acc: i128 = 1;
    base = base.rem_euclid(modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Rank over the prime field Z_p.
pub fn rank_mod_p(a: &Mat, p: u64) -> usize {
    let (rows, cols) = dims(a);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let pp = p as i128;
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| (x as i128).rem_euclid(pp)).collect())
        .collect();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pivot) = (row..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, pivot);
        let inv = mod_pow(m[row][col], p - 2, pp);
        for j in 0..cols {
            m[row][j] = m[row][j] * inv % pp;
        }
        for i in 0..rows {
            if i != row && m[i][col] != 0 {
                let factor = m[i][col];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - factor * m[row][j]).rem_euclid(pp);
                }
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Invariant factors d_1 | d_2 | ... of the Smith normal form (nonzero
/// entries only, positive).
pub fn smith_invariant_factors(a: &Mat) -> Vec<i128> {
    let (rows, cols) = dims(a);
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let n = rows.min(cols);
    let mut factors = Vec::new();
    let mut top = 0;
    while top < n {
        // find the nonzero entry of smallest magnitude in the working block
        let mut best: Option<(usize, usize)> = None;
        for i in top..rows {
            for j in top..cols {
                if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(top, bi);
        for row in m.iter_mut() {
            row.swap(top, bj);
        }
        // clear the row and column by division steps
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in top + 1..rows {
                if m[i][top] != 0 {
                    let q = m[i][top].div_euclid(m[top][top]);
                    for j in top..cols {
                        m[i][j] -= q * m[top][j];
                    }
                    if m[i][top] != 0 {
                        m.swap(top, i);
                        dirty = true;
                    }
                }
            }
            for j in top + 1..cols {
                if m[top][j] != 0 {
                    let q = m[top][j].div_euclid(m[top][top]);
                    for row in m.iter_mut().skip(top) {
                        row[j] -= q * row[top];
                    }
                    if m[top][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(top, j);
                        }
                        dirty = true;
                    }
                }
            }
        }
        // divisibility: fold in any entry the pivot does not divide
        let pivot = m[top][top];
        let mut fixed = false;
        'outer: for i in top + 1..rows {
            for j in top + 1..cols {
                if m[i][j] % pivot != 0 {
                    for jj in top..cols {
                        m[top][jj] += m[i][jj];
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        factors.push(pivot.abs());
        top += 1;
    }
    factors
}

/// Full-rank verdict for a matrix acting on a ground set, together with the
/// evidence: a field rank where ranks make sense, invariant factors where
/// they do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankReport {
    Field {
        rank: usize,
        full: bool,
    },
    Abelian {
        invariant_factors: Vec<i128>,
        full: bool,
    },
}

impl RankReport {
    pub fn is_full(&self) -> bool {
        match self {
            RankReport::Field { full, .. } => *full,
            RankReport::Abelian { full, .. } => *full,
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            RankReport::Field { rank, .. } => Some(*rank),
            RankReport::Abelian { .. } => None,
        }
    }
}

use super::ground::GroundSet;

/// Full rank means: every target vector is hit by some input. Over a prime
/// field or the rationals this is rank = k. Over a product of cyclic groups
/// it holds exactly when there are k invariant factors, all coprime to the
/// group exponent (cross-checked by a brute-force surjectivity oracle on
/// tiny groups in the tests).
pub fn rank_and_fullrank(a: &Mat, ground: &GroundSet) -> RankReport {
    let (k, _) = dims(a);
    match ground {
        GroundSet::PrimeField { p } => {
            let rank = rank_mod_p(a, *p);
            RankReport::Field {
                rank,
                full: rank == k,
            }
        }
        GroundSet::IntegerRange { .. } => {
            let rank = rank_rational(a);
            RankReport::Field {
                rank,
                full: rank == k,
            }
        }
        GroundSet::AbelianGroup { .. } => {
            let exponent = ground.exponent().expect("modular ground") as i128;
            let factors = smith_invariant_factors(a);
            let full =
                factors.len() == k && factors.iter().all(|d| num_integer::gcd(*d, exponent) == 1);
            RankReport::Abelian {
                invariant_factors: factors,
                full,
            }
        }
    }
}

/// Brute-force surjectivity of x -> Ax over a small modular ground set.
pub fn surjective_brute(a: &Mat, ground: &GroundSet) -> Result<bool> {
    let (k, cols) = dims(a);
    let factors = ground.factors().ok_or_else(|| {
        Error::invalid("surjectivity oracle needs a modular ground set".to_string())
    })?;
    let size = ground.size();
    let domain = size
        .checked_pow(cols as u32)
        .ok_or_else(|| Error::scale("domain too large"))?;
    if domain > 1_000_000 {
        return Err(Error::scale(format!(
            "surjectivity oracle over {domain} inputs"
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for mut idx in 0..domain {
        let mut x: Vec<u64> = Vec::with_capacity(cols);
        for _ in 0..cols {
            x.push(idx % size);
            idx /= size;
        }
        let mut image: Vec<u64> = Vec::with_capacity(k);
        for row in a {
            let mut value = Vec::new();
            for (c, &f) in factors.iter().enumerate() {
                let mut acc: i128 = 0;
                for (j, &coef) in row.iter().enumerate() {
                    let res = ground.residues(x[j])[c] as i128;
                    acc += coef as i128 * res;
                }
                value.push(acc.rem_euclid(f as i128) as u64);
            }
            image.push(ground.index_of_residues(&value));
        }
        seen.insert(image);
        if seen.len() as u64 == size.pow(k as u32) {
            return Ok(true);
        }
    }
    Ok(seen.len() as u64 == size.pow(k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_rank_examples() {
        assert_eq!(rank_rational(&vec![vec![1, 1, -2]]), 1);
        assert_eq!(rank_rational(&vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_rational(&vec![vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(rank_rational(&vec![vec![]]), 0);
    }

    #[test]
    fn mod_p_rank_examples() {
        // (1, 1, -2) over Z_2: second row of the AP matrix degenerates
        assert_eq!(rank_mod_p(&vec![vec![2, 4]], 2), 0);
        assert_eq!(rank_mod_p(&vec![vec![1, 1, -2]], 5), 1);
        assert_eq!(rank_mod_p(&vec![vec![1, 1], vec![1, 6]], 5), 1);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(smith_invariant_factors(&vec![vec![2]]), vec![2]);
        assert_eq!(
            smith_invariant_factors(&vec![vec![2, 0], vec![0, 3]]),
            vec![1, 6]
        );
        assert_eq!(
            smith_invariant_factors(&vec![vec![0, 0]]),
            Vec::<i128>::new()
        );
    }

    #[test]
    fn snf_determinant_divisors() {
        // d_1 = gcd of entries, the chain divides, and the product matches
        // the determinant magnitude for square full-rank inputs
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]];
        let factors = smith_invariant_factors(&m);
        assert_eq!(factors.len(), 3);
        let gcd_all = m
            .iter()
            .flatten()
            .fold(0i128, |acc, &x| num_integer::gcd(acc, x as i128));
        assert_eq!(factors[0], gcd_all);
        for w in factors.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        let det: i128 = {
            let a = &m;
            a[0][0] as i128
                * (a[1][1] as i128 * a[2][2] as i128 - a[1][2] as i128 * a[2][1] as i128)
                - a[0][1] as i128
                    * (a[1][0] as i128 * a[2][2] as i128 - a[1][2] as i128 * a[2][0] as i128)
                + a[0][2] as i128
                    * (a[1][0] as i128 * a[2][1] as i128 - a[1][1] as i128 * a[2][0] as i128)
        };
        assert_eq!(factors.iter().product::<i128>(), det.abs());
    }

    #[test]
    fn fullrank_over_grounds() {
        let ap = vec![vec![1, 1, -2]];
        let rat = GroundSet::integer_range(10).unwrap();
        assert_eq!(
            rank_and_fullrank(&ap, &rat),
            RankReport::Field {
                rank: 1,
                full: true
            }
        );

        // 1x0 matrix: cannot hit a nonzero target
        let empty: Mat = vec![vec![]];
        assert!(!rank_and_fullrank(&empty, &rat).is_full());

        // (2) over Z_4: image is {0, 2}
        let two = vec![vec![2]];
        let z4 = GroundSet::abelian(vec![4]).unwrap();
        let report = rank_and_fullrank(&two, &z4);
        assert!(!report.is_full());
        assert_eq!(
            report,
            RankReport::Abelian {
                invariant_factors: vec![2],
                full: false
            }
        );
        assert!(!surjective_brute(&two, &z4).unwrap());

        // (3) over Z_4 is fine
        let three = vec![vec![3]];
        assert!(rank_and_fullrank(&three, &z4).is_full());
        assert!(surjective_brute(&three, &z4).unwrap());
    }

    #[test]
    fn snf_criterion_matches_brute_force() {
        // every 1x2 and 2x2 integer matrix with small entries over small groups
        let grounds = [
            GroundSet::abelian(vec![2, 3]).unwrap(),
            GroundSet::abelian(vec![4]).unwrap(),
            GroundSet::abelian(vec![2, 2]).unwrap(),
            GroundSet::abelian(vec![6]).unwrap(),
        ];
        for ground in &grounds {
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    let m = vec![vec![a, b]];
                    let crit = rank_and_fullrank(&m, ground).is_full();
                    let brute = surjective_brute(&m, ground).unwrap();
                    assert_eq!(crit, brute, "1x2 {m:?} over {ground}");
                }
            }
            for a in -2i64..=2 {
                for d in -2i64..=2 {
                    let m = vec![vec![a, 1, 0], vec![0, d, 1]];
                    let crit = rank_and_fullrank(&m, ground).is_full();
                    let brute = surjective_brute(&m, ground).unwrap();
                    assert_eq!(crit, brute, "2x3 {m:?} over {ground}");
                }
            }
        }
    }
}
