//! Search for join-product structure constants compatible with a module
//! action.
//!
//! Each canonical pair `a <= b` whose product degree `deg a + deg b + dim G + 1`
//! is hit by a generator `x_r` gets one unknown `c_{a,b}` with
//! `x_a * x_b = c_{a,b} x_r`. Every Cartan identity
//!
//! ```text
//! Q_n(x_a * x_b) = sum_{i+j=n} Q_i(x_a) * Q_j(x_b)
//! ```
//!
//! is linear in these unknowns. Identities whose target degree is at most
//! `max_degree` only mention unknowns in range and are solved exactly. Those
//! whose left slot is in range but whose target lies in
//! `(max_degree, 2 * max_degree]` are counted as deferred. Over odd primes the
//! sign law adds `c_{a,a} = 0` for diagonal slots with odd sign exponent.
//!
//! Columns are ordered lexicographically by `(a, b)`, so bases are
//! reproducible.

use std::collections::BTreeMap;

use crate::algebra::JoinAlgebraSpec;
use crate::dyer_lashof::single_op_degree;
use crate::fp::Prime;
use crate::linalg::Matrix;
use crate::module::ModuleSpec;
use crate::verify::generator_pairs_to_degree;
use crate::{Error, Result};

/// The unknown `c_{a,b}` in `x_a * x_b = c_{a,b} x_result`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub a: u64,
    pub b: u64,
    pub result: u64,
}

/// Where a row of the system came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationSource {
    /// Cartan identity for `Q_n(x_a * x_b)`.
    Cartan { n: u32, a: u64, b: u64 },
    /// Sign-law vanishing of a diagonal slot.
    Sign { a: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub p: Prime,
    pub unknowns: Vec<Slot>,
    pub matrix: Matrix,
    pub rhs: Vec<u32>,
    pub sources: Vec<EquationSource>,
    /// Canonical pairs in range with no generator in the product degree; their
    /// products vanish identically.
    pub forced_zero: Vec<(u64, u64)>,
    pub deferred: usize,
    pub max_degree: i64,
}

impl LinearSystem {
    pub fn build(m: &ModuleSpec, max_degree: i64) -> Result<Self> {
        let alg = m.algebra();
        let p = alg.prime();
        let fam = alg.family();
        let pairs = generator_pairs_to_degree(alg, max_degree)?;

        let mut unknowns = Vec::new();
        let mut forced_zero = Vec::new();
        for &(a, b) in pairs.iter().filter(|(a, b)| a <= b) {
            match fam.index_of_degree(alg.product_degree(a, b)) {
                Some(result) => unknowns.push(Slot { a, b, result }),
                None => forced_zero.push((a, b)),
            }
        }
        let column: BTreeMap<(u64, u64), usize> = unknowns
            .iter()
            .enumerate()
            .map(|(i, s)| ((s.a, s.b), i))
            .collect();

        let mut matrix = Matrix::new(p, unknowns.len());
        let mut sources = Vec::new();

        if p.is_odd() {
            for s in unknowns
                .iter()
                .filter(|s| s.a == s.b && alg.diagonal_forced_zero(s.a))
            {
                let mut row = vec![0; unknowns.len()];
                row[column[&(s.a, s.b)]] = 1;
                matrix.push_row(row);
                sources.push(EquationSource::Sign { a: s.a });
            }
        }

        let mut deferred = 0;
        for &(a, b) in &pairs {
            let d = alg.product_degree(a, b);
            for n in 0u32.. {
                let target_degree = single_op_degree(p, n, d, alg.dim_g());
                if target_degree > max_degree {
                    if target_degree > 2 * max_degree {
                        break;
                    }
                    if column.contains_key(&(a.min(b), a.max(b))) {
                        deferred += 1;
                    }
                    continue;
                }
                let Some(target) = fam.index_of_degree(target_degree) else {
                    continue;
                };
                let mut row = vec![0u32; unknowns.len()];
                // left side: c_{a,b} * [x_target] Q_n(x_result)
                if let Some(&col) = column.get(&(a.min(b), a.max(b))) {
                    let sign = if a <= b { 1 } else { alg.sign(a, b).value() };
                    let image = m.act(n, unknowns[col].result)?;
                    row[col] = p.add(row[col], p.mul(sign, image.coefficient(target).value()));
                }
                // right side, subtracted
                for i in 0..=n {
                    let qa = m.act(i, a)?;
                    if qa.is_zero() {
                        continue;
                    }
                    let qb = m.act(n - i, b)?;
                    for (u, alpha) in qa.terms() {
                        for (v, beta) in qb.terms() {
                            let Some(&col) = column.get(&(u.min(v), u.max(v))) else {
                                continue;
                            };
                            debug_assert_eq!(unknowns[col].result, target);
                            let sign = if u <= v { 1 } else { alg.sign(u, v).value() };
                            let c = p.mul(p.mul(alpha, beta), sign);
                            row[col] = p.sub(row[col], c);
                        }
                    }
                }
                matrix.push_row(row);
                sources.push(EquationSource::Cartan { n, a, b });
            }
        }
        let rhs = vec![0; matrix.num_rows()];
        Ok(LinearSystem {
            p,
            unknowns,
            matrix,
            rhs,
            sources,
            forced_zero,
            deferred,
            max_degree,
        })
    }

    pub fn column_of(&self, a: u64, b: u64) -> Option<usize> {
        self.unknowns.iter().position(|s| (s.a, s.b) == (a, b))
    }

    /// `A x = b`, checked by direct multiplication.
    pub fn satisfied_by(&self, x: &[u32]) -> bool {
        self.matrix.mul_vec(x) == self.rhs
    }

    /// The assignment a full product table induces on the unknowns.
    pub fn assignment_from(&self, spec: &JoinAlgebraSpec) -> Result<Vec<u32>> {
        self.unknowns
            .iter()
            .map(|s| {
                Ok(spec
                    .generator_product(s.a, s.b)?
                    .coefficient(s.result)
                    .value())
            })
            .collect()
    }
}

/// A reduced solution space: every `F_p`-combination of `basis` solves the
/// system, and nothing else does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    pub system: LinearSystem,
    pub rank: usize,
    pub free: Vec<Slot>,
    pub basis: Vec<Vec<u32>>,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Product table realising an assignment of the unknowns, defined on every
    /// canonical pair within `max_degree`.
    pub fn table(&self, template: &JoinAlgebraSpec, assignment: &[u32]) -> Result<JoinAlgebraSpec> {
        let sys = &self.system;
        let entries = sys
            .unknowns
            .iter()
            .zip(assignment)
            .map(|(s, &c)| ((s.a, s.b), vec![(c as i64, s.result)]))
            .chain(sys.forced_zero.iter().map(|&pair| (pair, vec![])));
        template.with_entries(entries)
    }

    pub fn zero_solution(&self) -> Vec<u32> {
        vec![0; self.system.unknowns.len()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// `max_degree` is too small for any Cartan identity to fit.
    NoConstraints {
        unknowns: usize,
        deferred: usize,
    },
    Solved(SolutionSpace),
}

pub fn solve_product_table(m: &ModuleSpec, max_degree: i64) -> Result<SolveOutcome> {
    let system = LinearSystem::build(m, max_degree)?;
    let cartan_rows = system
        .sources
        .iter()
        .filter(|s| matches!(s, EquationSource::Cartan { .. }))
        .count();
    if cartan_rows == 0 {
        return Ok(SolveOutcome::NoConstraints {
            unknowns: system.unknowns.len(),
            deferred: system.deferred,
        });
    }
    let kernel = system.matrix.kernel();
    for x in &kernel.basis {
        if !system.satisfied_by(x) {
            return Err(Error::Internal("null-space vector fails A x = b".into()));
        }
    }
    let free = kernel.free.iter().map(|&c| system.unknowns[c]).collect();
    Ok(SolveOutcome::Solved(SolutionSpace {
        rank: kernel.rank,
        free,
        basis: kernel.basis,
        system,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::S1Candidate;
    use crate::verify::{verify_cartan_to_degree, verify_sign_laws};

    fn solved(max_degree: i64) -> SolutionSpace {
        match solve_product_table(&ModuleSpec::s1_p2(), max_degree).unwrap() {
            SolveOutcome::Solved(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lowest_stratum() {
        let s = solved(6);
        let slots: Vec<(u64, u64)> = s.system.unknowns.iter().map(|s| (s.a, s.b)).collect();
        assert_eq!(slots, vec![(0, 0), (0, 1), (0, 2), (1, 1)]);
        // the single identity Q_0(x_0 * x_0) = Q_0(x_0) * Q_0(x_0): c00 + c11 = 0
        assert_eq!(
            s.system.sources,
            vec![EquationSource::Cartan { n: 0, a: 0, b: 0 }]
        );
        assert_eq!(s.system.matrix.rows(), &[vec![1, 0, 0, 1]]);
        assert_eq!(s.rank, 1);
        assert_eq!(s.dimension(), 3);
    }

    #[test]
    fn too_small_degree_has_no_constraints() {
        for d in [0, 2, 4, 5] {
            assert!(matches!(
                solve_product_table(&ModuleSpec::s1_p2(), d).unwrap(),
                SolveOutcome::NoConstraints { .. }
            ));
        }
    }

    #[test]
    fn shift_table_lies_in_the_solution_space() {
        let s = solved(24);
        let shift = s
            .system
            .assignment_from(&S1Candidate::Shift.spec(20))
            .unwrap();
        assert!(s.system.satisfied_by(&shift));
        let binomial = s
            .system
            .assignment_from(&S1Candidate::Binomial.spec(20))
            .unwrap();
        assert!(!s.system.satisfied_by(&binomial));
        assert!(s.system.satisfied_by(&s.zero_solution()));
    }

    #[test]
    fn basis_round_trips_through_verification() {
        let s = solved(20);
        for v in &s.basis {
            let table = s.table(&JoinAlgebraSpec::s1_p2(), v).unwrap();
            let m = ModuleSpec::s1_p2().with_algebra(table.clone()).unwrap();
            assert!(verify_cartan_to_degree(&m, 20).unwrap().passed());
            assert!(verify_sign_laws(&table).passed());
        }
    }
}
