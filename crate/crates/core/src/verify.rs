//! Exhaustive checks of the Adem relations, the Cartan formula and the sign
//! law over bounded index rectangles.
//!
//! Mismatches are report content, not errors. Errors are reserved for inputs
//! the checks cannot evaluate (undefined products, out-of-range tables).

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::algebra::JoinAlgebraSpec;
use crate::dyer_lashof::{single_op_degree, OperationWord, RelationTable};
use crate::module::ModuleSpec;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub description: String,
    pub inputs: Vec<u64>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, failure: Option<Failure>) {
        self.checked += 1;
        self.failures.extend(failure);
    }
}

#[cfg(not(target_arch = "wasm32"))]
struct Stopwatch(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch(std::time::Instant::now())
    }

    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

// no monotonic clock on wasm32-unknown-unknown without JS bindings
#[cfg(target_arch = "wasm32")]
struct Stopwatch;

#[cfg(target_arch = "wasm32")]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch
    }

    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

/// Compares `Q_r Q_s (x_i)` with the rewritten form for every non-admissible
/// pair `r, s <= max_index` and every `i <= max_gen`, using the built-in
/// relation table for the module's prime.
pub fn verify_adem(m: &ModuleSpec, max_index: u32, max_gen: u64) -> Result<VerificationReport> {
    verify_adem_with(m, &RelationTable::builtin(m.prime())?, max_index, max_gen)
}

pub fn verify_adem_with(
    m: &ModuleSpec,
    relations: &RelationTable,
    max_index: u32,
    max_gen: u64,
) -> Result<VerificationReport> {
    let clock = Stopwatch::start();
    let mut report = VerificationReport::default();
    for r in 0..=max_index {
        for s in 0..=max_index {
            let word = OperationWord::new(m.prime(), vec![r, s]);
            if relations.is_admissible(&word) {
                continue;
            }
            let rhs_ops = relations.rewrite(&word)?;
            for gen in 0..=max_gen {
                let x = m.generator(gen)?;
                let lhs = m.apply_word(&word, &x)?;
                let rhs = m.apply_sum(&rhs_ops, &x)?;
                report.record((lhs != rhs).then(|| Failure {
                    description: format!("Adem relation {word} = {rhs_ops} on {x}"),
                    inputs: vec![r as u64, s as u64, gen],
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                }));
            }
        }
    }
    report.elapsed = clock.elapsed();
    Ok(report)
}

fn cartan_instance(m: &ModuleSpec, n: u32, a: u64, b: u64) -> Result<Option<Failure>> {
    let (xa, xb) = (m.generator(a)?, m.generator(b)?);
    let product = m.algebra().join_product(&xa, &xb)?;
    let lhs = m.apply_op(n, &product)?;
    let rhs = m.cartan_expand(n, &xa, &xb)?;
    Ok((lhs != rhs).then(|| Failure {
        description: format!("Cartan formula for Q_{n}({xa} * {xb})"),
        inputs: vec![n as u64, a, b],
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }))
}

/// Checks `Q_n(x_a * x_b) = sum_{i+j=n} Q_i(x_a) * Q_j(x_b)` for all
/// `n <= max_n` and `a, b <= max_gen`.
pub fn verify_cartan(m: &ModuleSpec, max_n: u32, max_gen: u64) -> Result<VerificationReport> {
    let clock = Stopwatch::start();
    let mut report = VerificationReport::default();
    for a in 0..=max_gen {
        for b in 0..=max_gen {
            for n in 0..=max_n {
                report.record(cartan_instance(m, n, a, b)?);
            }
        }
    }
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Every Cartan identity whose target degree is at most `max_degree`. All
/// products these identities mention land in degree `<= max_degree`, so a
/// table covering that range suffices.
pub fn verify_cartan_to_degree(m: &ModuleSpec, max_degree: i64) -> Result<VerificationReport> {
    let clock = Stopwatch::start();
    let mut report = VerificationReport::default();
    let alg = m.algebra();
    for (a, b) in generator_pairs_to_degree(alg, max_degree)? {
        let d = alg.product_degree(a, b);
        let mut n = 0u32;
        while single_op_degree(alg.prime(), n, d, alg.dim_g()) <= max_degree {
            report.record(cartan_instance(m, n, a, b)?);
            n += 1;
        }
    }
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Ordered pairs `(a, b)` with `deg(x_a * x_b) <= max_degree`, sorted.
pub(crate) fn generator_pairs_to_degree(
    alg: &JoinAlgebraSpec,
    max_degree: i64,
) -> Result<Vec<(u64, u64)>> {
    let fam = alg.family();
    if fam.degree_rule.slope == 0 && fam.max_index.is_none() {
        return Err(Error::Malformed(format!(
            "family {} has infinitely many generators in one degree",
            fam.name
        )));
    }
    let indices: Vec<u64> = (0..)
        .take_while(|&i| fam.contains(i) && fam.degree(i) <= max_degree)
        .collect();
    let mut out = Vec::new();
    for &a in &indices {
        for &b in &indices {
            if alg.product_degree(a, b) <= max_degree {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Checks the commutativity sign on every stored pair and the vanishing of
/// diagonal entries with odd sign exponent over odd primes.
pub fn verify_sign_laws(spec: &JoinAlgebraSpec) -> VerificationReport {
    let clock = Stopwatch::start();
    let mut report = VerificationReport::default();
    let x = &spec.family().name;
    for (&(a, b), terms) in spec.table() {
        if a == b {
            let bad = spec.diagonal_forced_zero(a) && !terms.is_empty();
            report.record(bad.then(|| {
                Failure {
                    description: format!(
                        "diagonal entry {x}_{a} * {x}_{a} is forced to vanish by the sign law"
                    ),
                    inputs: vec![a, b],
                    lhs: spec
                        .generator_product(a, a)
                        .map(|e| e.to_string())
                        .unwrap_or_default(),
                    rhs: "0".into(),
                }
            }));
            continue;
        }
        let (Ok(ab), Ok(ba)) = (spec.generator_product(a, b), spec.generator_product(b, a)) else {
            continue;
        };
        let signed = ba.scale(spec.sign(a, b)).expect("same field");
        report.record((ab != signed).then(|| Failure {
            description: format!("sign law for {x}_{a} * {x}_{b}"),
            inputs: vec![a, b],
            lhs: ab.to_string(),
            rhs: signed.to_string(),
        }));
    }
    report.elapsed = clock.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GeneratorFamily, S1Candidate};
    use crate::fp::Prime;
    use crate::module::{ActionRule, ActionTable};

    #[test]
    fn adem_holds_on_s1() {
        let r = verify_adem(&ModuleSpec::s1_p2(), 10, 6).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());
        // non-admissible pairs r > s with r, s <= 10: 55, times 7 generators
        assert_eq!(r.checked, 55 * 7);
    }

    #[test]
    fn admissible_only_range_is_vacuous() {
        let r = verify_adem(&ModuleSpec::s1_p2(), 0, 5).unwrap();
        assert_eq!(r.checked, 0);
        assert!(r.passed());
    }

    #[test]
    fn corrupted_table_is_caught() {
        let m = ModuleSpec::s1_p2();
        let mut t = ActionTable::from_module(&m, 8, 24).unwrap();
        t.perturb(m.algebra(), 2, 0).unwrap();
        let bad = ModuleSpec::new(m.algebra().clone(), ActionRule::Table(t)).unwrap();
        let r = verify_adem(&bad, 8, 4).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn candidate_tables_against_cartan() {
        for c in [S1Candidate::Shift, S1Candidate::Zero] {
            let m = ModuleSpec::s1_p2().with_algebra(c.spec(30)).unwrap();
            let r = verify_cartan(&m, 16, 8).unwrap();
            assert!(r.passed(), "{}: {:?}", c.name(), r.failures.first());
            assert_eq!(r.checked, 17 * 9 * 9);
        }
        // C(a+b+1, a) stored for a <= b is symmetric by the sign law, and then
        // Q_4(x_0 * x_0) = x_5 while the Cartan sum is x_1*x_3 + x_3*x_1 = 0
        let m = ModuleSpec::s1_p2()
            .with_algebra(S1Candidate::Binomial.spec(30))
            .unwrap();
        let r = verify_cartan(&m, 16, 8).unwrap();
        assert_eq!(r.failures.len(), 23);
        assert_eq!(r.failures[0].inputs, vec![4, 0, 0]);
    }

    #[test]
    fn cartan_detects_a_bad_table() {
        // x_0 * x_0 = x_1 but every other product zero: Q_0(x_0 * x_0) = x_3
        // while Q_0(x_0) * Q_0(x_0) = x_1 * x_1 = 0
        let entries = (0..=20u64).flat_map(|a| {
            (a..=20).map(move |b| {
                (
                    (a, b),
                    if (a, b) == (0, 0) {
                        vec![(1, 1)]
                    } else {
                        vec![]
                    },
                )
            })
        });
        let m = ModuleSpec::s1_p2()
            .with_algebra(JoinAlgebraSpec::s1_p2().with_entries(entries).unwrap())
            .unwrap();
        let r = verify_cartan(&m, 0, 0).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].lhs, "x_3");
        assert_eq!(r.failures[0].rhs, "0");
    }

    #[test]
    fn cartan_without_table_errors() {
        assert!(verify_cartan(&ModuleSpec::s1_p2(), 2, 2).is_err());
    }

    #[test]
    fn signs_mod_two_degenerate_to_symmetry() {
        for c in S1Candidate::ALL {
            assert!(verify_sign_laws(&c.spec(6)).passed());
        }
    }

    #[test]
    fn odd_prime_point_square() {
        let p3 = Prime::new(3).unwrap();
        let fam = GeneratorFamily::new("y", 1, 0);
        let bad = JoinAlgebraSpec::new(p3, 0, fam.clone(), [((0, 0), vec![(1, 1)])]).unwrap();
        let r = verify_sign_laws(&bad);
        assert_eq!(r.failures.len(), 1);
        assert!(verify_sign_laws(&bad.sign_canonical()).passed());
        // dim G = 1: s = 0 + 0 + 2 is even
        let ok = JoinAlgebraSpec::new(p3, 1, fam, [((0, 0), vec![(1, 2)])]).unwrap();
        assert!(verify_sign_laws(&ok).passed());
    }
}
