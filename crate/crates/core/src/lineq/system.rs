use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::report::{Check, Report};
use crate::scalar::Scalar;

use super::ground::GroundSet;
use super::matrix::{self, rank_and_fullrank, Mat, RankReport};

const SOLUTION_ENUM_GUARD: u64 = 20_000_000;

/// Which solutions are discounted. Conventions are evaluated against actual
/// solutions when the system is enumerated, so the discounted count only
/// ever refers to vectors solving the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZRule {
    Empty,
    /// vectors with any repeated coordinate
    NoRepeat,
    /// vectors (w,x,y,z) whose last pair is a permutation of the first
    /// (for 4-column difference systems)
    NoPairSwap,
    /// explicit vectors, entries encoded like b (residues / range values /
    /// group element indices)
    Explicit(Vec<Vec<i64>>),
}

impl std::fmt::Display for ZRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZRule::Empty => write!(f, "none"),
            ZRule::NoRepeat => write!(f, "norepeat"),
            ZRule::NoPairSwap => write!(f, "nopairswap"),
            ZRule::Explicit(v) => write!(f, "explicit({})", v.len()),
        }
    }
}

/// A k x r linear system over a ground set, with discounted solutions.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub ground: GroundSet,
    pub k: usize,
    pub r: usize,
    pub a: Mat,
    /// right-hand side, encoded per ground set (residues / values / indices)
    pub b: Vec<i64>,
    pub z: ZRule,
}

/// The density parameter controlling fingerprint sizes: an exact rational,
/// with the witness that attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MRank {
    pub value: Ratio<i64>,
    pub witness: MWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MWitness {
    /// maximizing set of deleted column indices (field / integer-range form)
    Columns(Vec<usize>),
    /// the largest j with every j-column deletion still full rank (group form)
    Threshold(usize),
}

/// Everything the solution set of a system yields in one enumeration pass.
#[derive(Debug, Clone)]
pub struct SolutionEnumeration {
    /// solutions kept as edges (element indices per coordinate)
    pub kept: Vec<Vec<u64>>,
    /// solutions matched by the discount rule
    pub discounted: u64,
}

impl SolutionEnumeration {
    pub fn total(&self) -> u64 {
        self.kept.len() as u64 + self.discounted
    }
}

impl LinearSystem {
    pub fn new(ground: GroundSet, a: Mat, b: Vec<i64>, z: ZRule) -> Result<LinearSystem> {
        let (k, r) = matrix::dims(&a);
        if k == 0 || r == 0 {
            return Err(Error::invalid("matrix must be nonempty".to_string()));
        }
        if a.iter().any(|row| row.len() != r) {
            return Err(Error::invalid(
                "matrix rows have differing lengths".to_string(),
            ));
        }
        if b.len() != k {
            return Err(Error::invalid(format!(
                "right-hand side has {} entries, expected {k}",
                b.len()
            )));
        }
        if r > crate::set::MAX_KEY_LEN {
            return Err(Error::scale(format!(
                "systems with more than {} columns are unsupported",
                crate::set::MAX_KEY_LEN
            )));
        }
        if let ZRule::NoPairSwap = z {
            if r != 4 {
                return Err(Error::invalid(
                    "nopairswap needs exactly four columns".to_string(),
                ));
            }
        }
        if let ZRule::Explicit(vectors) = &z {
            for v in vectors {
                if v.len() != r {
                    return Err(Error::invalid(
                        "discounted vector has wrong arity".to_string(),
                    ));
                }
            }
        }
        // validate b encoding: modular grounds need a representable element;
        // over an integer range b is an arbitrary integer
        if ground.factors().is_some() {
            for &entry in &b {
                ground.index_of_value(entry)?;
            }
        }
        Ok(LinearSystem {
            ground,
            k,
            r,
            a,
            b,
            z,
        })
    }

    pub fn rank_report(&self) -> RankReport {
        rank_and_fullrank(&self.a, &self.ground)
    }

    /// Full rank, and still full rank after deleting any pair of columns.
    pub fn is_abundant(&self) -> bool {
        if !self.rank_report().is_full() {
            return false;
        }
        for i in 0..self.r {
            for j in i + 1..self.r {
                let sub = matrix::remove_columns(&self.a, &[i, j]);
                if !rank_and_fullrank(&sub, &self.ground).is_full() {
                    return false;
                }
            }
        }
        true
    }

    /// The density parameter. Exact rational arithmetic; requires abundance
    /// (the denominators can vanish otherwise).
    pub fn m_value(&self) -> Result<MRank> {
        if !self.is_abundant() {
            return Err(Error::precondition("matrix is not abundant".to_string()));
        }
        match &self.ground {
            GroundSet::AbelianGroup { .. } => {
                let mut t = 0usize;
                for j in 1..=self.r {
                    let all_full = column_subsets(self.r, j).into_iter().all(|drop| {
                        rank_and_fullrank(&matrix::remove_columns(&self.a, &drop), &self.ground)
                            .is_full()
                    });
                    if all_full {
                        t = j;
                    } else {
                        break;
                    }
                }
                if t < 2 {
                    return Err(Error::precondition(
                        "group threshold below 2 despite abundance".to_string(),
                    ));
                }
                Ok(MRank {
                    value: Ratio::new((self.k + t - 1) as i64, (t - 1) as i64),
                    witness: MWitness::Threshold(t),
                })
            }
            _ => {
                let mut best: Option<(Ratio<i64>, Vec<usize>)> = None;
                for j in 2..=self.r {
                    for drop in column_subsets(self.r, j) {
                        let sub = matrix::remove_columns(&self.a, &drop);
                        let rank = rank_and_fullrank(&sub, &self.ground)
                            .rank()
                            .expect("field-like ground");
                        let denom = j as i64 - 1 + rank as i64 - self.k as i64;
                        debug_assert!(denom > 0, "abundance keeps denominators positive");
                        let value = Ratio::new(j as i64 - 1, denom);
                        if best.as_ref().map_or(true, |(b, _)| value > *b) {
                            best = Some((value, drop));
                        }
                    }
                }
                let (value, drop) = best.expect("r >= 2");
                Ok(MRank {
                    value,
                    witness: MWitness::Columns(drop),
                })
            }
        }
    }

    fn matches_discount(&self, x: &[u64]) -> bool {
        match &self.z {
            ZRule::Empty => false,
            ZRule::NoRepeat => {
                for i in 0..x.len() {
                    for j in i + 1..x.len() {
                        if x[i] == x[j] {
                            return true;
                        }
                    }
                }
                false
            }
            ZRule::NoPairSwap => {
                let (w, xx, y, z) = (x[0], x[1], x[2], x[3]);
                (w == y && xx == z) || (w == z && xx == y)
            }
            ZRule::Explicit(vectors) => vectors.iter().any(|v| {
                v.iter()
                    .zip(x)
                    .all(|(&val, &idx)| self.ground.index_of_value(val).map_or(false, |i| i == idx))
            }),
        }
    }

    /// Element index of b_i for modular grounds.
    fn b_index(&self, i: usize) -> u64 {
        self.ground
            .index_of_value(self.b[i])
            .expect("validated at construction")
    }

    fn is_solution(&self, x: &[u64]) -> bool {
        match self.ground.factors() {
            Some(factors) => {
                for (i, row) in self.a.iter().enumerate() {
                    let rhs_res = self.ground.residues(self.b_index(i));
                    for (c, &f) in factors.iter().enumerate() {
                        let mut acc: i128 = 0;
                        for (j, &coef) in row.iter().enumerate() {
                            acc += coef as i128 * self.ground.residues(x[j])[c] as i128;
                        }
                        if acc.rem_euclid(f as i128) as u64 != rhs_res[c] {
                            return false;
                        }
                    }
                }
                true
            }
            None => {
                for (row, &rhs) in self.a.iter().zip(&self.b) {
                    let mut acc: i128 = 0;
                    for (j, &coef) in row.iter().enumerate() {
                        acc += coef as i128 * self.ground.value_of(x[j]) as i128;
                    }
                    if acc != rhs as i128 {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Enumerate all solutions, split into kept and discounted. Solves for
    /// the last k coordinates when that block is invertible, otherwise runs
    /// the guarded exhaustive scan.
    pub fn enumerate_solutions(&self) -> Result<SolutionEnumeration> {
        let size = self.ground.size();
        let free = self.r - self.k;
        let last_cols: Vec<usize> = (free..self.r).collect();
        let block = matrix::keep_columns(&self.a, &last_cols);
        let solver = BlockSolver::new(&block, &self.ground);
        let mut kept = Vec::new();
        let mut discounted = 0u64;
        if let Some(solver) = solver {
            let total = (size as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
            if total > SOLUTION_ENUM_GUARD as u128 {
                return Err(Error::scale(format!("{total} assignments to scan")));
            }
            let mut x = vec![0u64; self.r];
            let mut assign = vec![0u64; free];
            loop {
                x[..free].copy_from_slice(&assign);
                if let Some(tail) = solver.solve_tail(self, &assign) {
                    x[free..].copy_from_slice(&tail);
                    if self.is_solution(&x) {
                        if self.matches_discount(&x) {
                            discounted += 1;
                        } else {
                            kept.push(x.clone());
                        }
                    }
                }
                if !increment(&mut assign, size) {
                    break;
                }
            }
        } else {
            let total = (size as u128)
                .checked_pow(self.r as u32)
                .unwrap_or(u128::MAX);
            if total > SOLUTION_ENUM_GUARD as u128 {
                return Err(Error::scale(format!("{total} vectors to scan")));
            }
            let mut x = vec![0u64; self.r];
            loop {
                if self.is_solution(&x) {
                    if self.matches_discount(&x) {
                        discounted += 1;
                    } else {
                        kept.push(x.clone());
                    }
                }
                if !increment(&mut x, size) {
                    break;
                }
            }
        }
        kept.sort();
        Ok(SolutionEnumeration { kept, discounted })
    }

    /// The r-partite solution hypergraph: r disjoint copies of F, one edge
    /// per kept solution.
    pub fn solution_hypergraph(&self) -> Result<(Hypergraph, SolutionEnumeration)> {
        let size = self.ground.size();
        let n = self.r as u64 * size;
        if n > u16::MAX as u64 {
            return Err(Error::scale(format!("{n} vertices in the solution graph")));
        }
        let sols = self.enumerate_solutions()?;
        let edges: Vec<Vec<u32>> = sols
            .kept
            .iter()
            .map(|x| {
                x.iter()
                    .enumerate()
                    .map(|(i, &idx)| (i as u64 * size + idx) as u32 + 1)
                    .collect()
            })
            .collect();
        let graph = Hypergraph::build(n as u32, self.r as u32, &edges)?;
        Ok((graph, sols))
    }

    /// Vertex label of element `index` in part `part` of the solution graph.
    pub fn part_vertex(&self, part: usize, index: u64) -> u16 {
        (part as u64 * self.ground.size() + index) as u16 + 1
    }

    /// Worst subset-degree ratio d(sigma)/(d tau^{|sigma|-1}) over the
    /// solution graph, with tau = |F|^(-1/m)/gamma.
    fn worst_degree_ratio<R: Scalar>(&self, gamma: R) -> Result<(R, R)> {
        let m = self.m_value()?;
        let (graph, _) = self.solution_hypergraph()?;
        let size = self.ground.size();
        let m_f64 = *m.value.numer() as f64 / *m.value.denom() as f64;
        let tau = R::from_f64((size as f64).powf(-1.0 / m_f64)).unwrap() / gamma;
        if graph.edge_count() == 0 {
            return Ok((R::zero(), tau));
        }
        let d = graph.average_degree::<R>();
        let mut worst = R::zero();
        let mut buf = [0u16; crate::set::MAX_KEY_LEN];
        for &(key, deg) in graph.degree_entries() {
            let len = crate::set::key_unpack(key, &mut buf);
            if len < 2 {
                continue;
            }
            let ratio = R::from_count(deg) / (d * tau.powi(len as i32 - 1));
            if ratio > worst {
                worst = ratio;
            }
        }
        Ok((worst, tau))
    }

    /// The canonical prime-field image of an integer-range system: entries
    /// taken mod p for a prime between 4 k! |A|^k N and 8 k! |A|^k N, which
    /// keeps the matrix abundant and range solutions integral.
    pub fn embedded_prime_system(&self) -> Result<LinearSystem> {
        let GroundSet::IntegerRange { n } = self.ground else {
            return Err(Error::invalid("only integer ranges embed".to_string()));
        };
        let weight: i64 = self.a.iter().flatten().map(|x| x.abs()).sum();
        let kfact = crate::scalar::factorial(self.k as u32);
        let lower = 4u64
            .checked_mul(kfact)
            .and_then(|x| x.checked_mul((weight as u64).pow(self.k as u32)))
            .and_then(|x| x.checked_mul(n))
            .ok_or_else(|| Error::scale("embedding prime overflows".to_string()))?;
        let p = super::ground::next_prime(lower);
        if p > 2 * lower {
            return Err(Error::scale(format!("no prime found below {}", 2 * lower)));
        }
        let z = match &self.z {
            ZRule::Explicit(vs) => ZRule::Explicit(
                vs.iter()
                    .map(|v| v.iter().map(|&x| x.rem_euclid(p as i64)).collect())
                    .collect(),
            ),
            other => other.clone(),
        };
        LinearSystem::new(
            GroundSet::prime_field(p)?,
            self.a.clone(),
            self.b.iter().map(|&x| x.rem_euclid(p as i64)).collect(),
            z,
        )
    }

    /// Degree bound on the solution graph: with tau = |F|^(-1/m)/gamma,
    /// every subset sigma with 2 <= |sigma| <= r has
    /// d(sigma) <= 2 gamma d tau^{|sigma|-1}.
    ///
    /// The bound is a statement about modular grounds (its derivation needs
    /// the exact solution count |F|^{r-k}); integer ranges are covered by
    /// their prime-field embedding. For a range system the raw ratio is
    /// reported, and the embedded system is asserted when its solution
    /// graph fits the scale guard.
    pub fn verify_degree_bound<R: Scalar>(&self, gamma: R) -> Result<Report> {
        if gamma <= R::zero() || gamma > R::one() {
            return Err(Error::invalid("gamma must be in (0, 1]".to_string()));
        }
        if !self.is_abundant() {
            return Err(Error::precondition("matrix is not abundant".to_string()));
        }
        let sols = self.enumerate_solutions()?;
        let size = self.ground.size();
        let half = (size as u128).pow((self.r - self.k) as u32) / 2;
        if (sols.discounted as u128) > half {
            return Err(Error::precondition(format!(
                "{} discounted solutions exceed half the solution count",
                sols.discounted
            )));
        }
        let mut report = Report::new();
        let (worst, tau) = self.worst_degree_ratio(gamma)?;
        let two_gamma = (R::from_count(2) * gamma).report();
        match self.ground {
            GroundSet::IntegerRange { .. } => {
                report.push(Check::skipped(
                    "partite-degree-bound",
                    format!(
                        "modular-ground bound; measured ratio {} against {two_gamma} at tau={}",
                        worst.report(),
                        tau.report()
                    ),
                ));
                match self.embedded_prime_system() {
                    Ok(embedded) => match embedded.worst_degree_ratio(gamma) {
                        Ok((ratio, tau_p)) => {
                            report.push(
                                Check::le("embedded-degree-bound", ratio.report(), two_gamma)
                                    .with_note(format!(
                                        "over {} at tau={}",
                                        embedded.ground,
                                        tau_p.report()
                                    )),
                            );
                        }
                        Err(Error::ScaleGuard(msg)) => {
                            report.flag(format!("embedded check skipped: {msg}"));
                        }
                        Err(e) => return Err(e),
                    },
                    Err(Error::ScaleGuard(msg)) => {
                        report.flag(format!("embedded check skipped: {msg}"));
                    }
                    Err(e) => return Err(e),
                }
            }
            _ => {
                report.push(
                    Check::le("partite-degree-bound", worst.report(), two_gamma)
                        .with_note(format!("tau={}", tau.report())),
                );
            }
        }
        Ok(report)
    }
}

/// Solver for the trailing k x k block: modular (adjugate inverse per cyclic
/// factor) or rational (Cramer), present only when the block is invertible
/// in the appropriate sense.
enum BlockSolver {
    Modular { factors: Vec<u64> },
    Rational,
}

impl BlockSolver {
    fn new(block: &Mat, ground: &GroundSet) -> Option<BlockSolver> {
        let (k, cols) = matrix::dims(block);
        if k != cols {
            return None;
        }
        let det = det_i128(block);
        match ground.factors() {
            Some(factors) => {
                if factors
                    .iter()
                    .all(|&f| num_integer::gcd(det, f as i128) == 1)
                {
                    Some(BlockSolver::Modular { factors })
                } else {
                    None
                }
            }
            None => {
                if det != 0 {
                    Some(BlockSolver::Rational)
                } else {
                    None
                }
            }
        }
    }

    /// Solve block * tail = b - A_free * assign for tail, if it has a
    /// (unique) representative in the ground set.
    fn solve_tail(&self, sys: &LinearSystem, assign: &[u64]) -> Option<Vec<u64>> {
        let free = assign.len();
        let k = sys.k;
        match self {
            BlockSolver::Modular { factors } => {
                let block: Mat = matrix::keep_columns(&sys.a, &(free..sys.r).collect::<Vec<_>>());
                let mut tail_res: Vec<Vec<u64>> = vec![Vec::with_capacity(factors.len()); k];
                for (c, &f) in factors.iter().enumerate() {
                    let m = f as i128;
                    // rhs per factor
                    let mut rhs: Vec<i128> = Vec::with_capacity(k);
                    for (i, row) in sys.a.iter().enumerate() {
                        let mut acc = sys.ground.residues(sys.b_index(i))[c] as i128;
                        for j in 0..free {
                            acc -= row[j] as i128 * sys.ground.residues(assign[j])[c] as i128;
                        }
                        rhs.push(acc.rem_euclid(m));
                    }
                    let inv = invert_mod(&block, m)?;
                    for i in 0..k {
                        let mut acc: i128 = 0;
                        for (j, r) in rhs.iter().enumerate() {
                            acc += inv[i][j] * r;
                        }
                        tail_res[i].push(acc.rem_euclid(m) as u64);
                    }
                }
                Some(
                    tail_res
                        .iter()
                        .map(|rs| sys.ground.index_of_residues(rs))
                        .collect(),
                )
            }
            BlockSolver::Rational => {
                let block: Mat = matrix::keep_columns(&sys.a, &(free..sys.r).collect::<Vec<_>>());
                let det = det_i128(&block);
                let mut rhs: Vec<i128> = Vec::with_capacity(k);
                for (i, row) in sys.a.iter().enumerate() {
                    let mut acc = sys.b[i] as i128;
                    for j in 0..free {
                        acc -= row[j] as i128 * sys.ground.value_of(assign[j]) as i128;
                    }
                    rhs.push(acc);
                }
                let mut tail = Vec::with_capacity(k);
                for col in 0..k {
                    // Cramer: replace column `col` with rhs
                    let mut m: Vec<Vec<i128>> = block
                        .iter()
                        .map(|row| row.iter().map(|&x| x as i128).collect())
                        .collect();
                    for i in 0..k {
                        m[i][col] = rhs[i];
                    }
                    let num = det_i128_owned(&m);
                    if num % det != 0 {
                        return None;
                    }
                    let value = num / det;
                    match sys.ground.index_of_value(value as i64) {
                        Ok(idx) => tail.push(idx),
                        Err(_) => return None,
                    }
                }
                Some(tail)
            }
        }
    }
}

fn det_i128(a: &Mat) -> i128 {
    let m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    det_i128_owned(&m)
}

fn det_i128_owned(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut acc = 0i128;
            for j in 0..n {
                let minor: Vec<Vec<i128>> = (1..n)
                    .map(|i| (0..n).filter(|&jj| jj != j).map(|jj| m[i][jj]).collect())
                    .collect();
                let term = m[0][j] * det_i128_owned(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Adjugate-based inverse of a square integer matrix modulo m, when the
/// determinant is a unit.
fn invert_mod(a: &Mat, m: i128) -> Option<Vec<Vec<i128>>> {
    let n = a.len();
    let det = det_i128(a).rem_euclid(m);
    let det_inv = mod_inverse(det, m)?;
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&ii| ii != i)
                .map(|ii| {
                    (0..n)
                        .filter(|&jj| jj != j)
                        .map(|jj| a[ii][jj] as i128)
                        .collect()
                })
                .collect();
            let cof = det_i128_owned(&minor) * if (i + j) % 2 == 0 { 1 } else { -1 };
            // adjugate transposes the cofactor matrix
            adj[j][i] = (cof * det_inv).rem_euclid(m);
        }
    }
    Some(adj)
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

fn increment(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn column_subsets(r: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let items: Vec<usize> = (0..r).collect();
    crate::hypergraph::for_each_combination(&items, j, &mut |chosen| out.push(chosen.to_vec()));
    out
}

/// The (l-2) x l arithmetic-progression system x_i - 2 x_{i+1} + x_{i+2} = 0.
pub fn ap_system(ground: GroundSet, ell: usize, z: ZRule) -> Result<LinearSystem> {
    if ell < 3 {
        return Err(Error::invalid(
            "progressions need at least 3 terms".to_string(),
        ));
    }
    let k = ell - 2;
    let mut a = vec![vec![0i64; ell]; k];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1;
        row[i + 1] = -2;
        row[i + 2] = 1;
    }
    let b = match &ground {
        GroundSet::IntegerRange { .. } | GroundSet::PrimeField { .. } => vec![0i64; k],
        GroundSet::AbelianGroup { .. } => vec![0i64; k],
    };
    LinearSystem::new(ground, a, b, z)
}

/// The 1 x 3 sum system x + y - z = 0 (sum-free sets).
pub fn sum_system(ground: GroundSet, z: ZRule) -> Result<LinearSystem> {
    let b = vec![0i64];
    LinearSystem::new(ground, vec![vec![1, 1, -1]], b, z)
}

/// The 1 x 4 additive-quadruple system w + x - y - z = 0 (two equal pair
/// sums).
pub fn pair_sum_system(ground: GroundSet, z: ZRule) -> Result<LinearSystem> {
    let b = vec![0i64];
    LinearSystem::new(ground, vec![vec![1, 1, -1, -1]], b, z)
}
