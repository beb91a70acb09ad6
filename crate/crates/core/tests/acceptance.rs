//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Built with `harness = false` so the lines always show.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dl_core::algebra::{GeneratorFamily, JoinAlgebraSpec};
use dl_core::dyer_lashof::{op_degree, OperationWord};
use dl_core::fp::{binom_mod_p, Prime};
use dl_core::module::{coefficient_table, ActionRule, ActionTable, ModuleSpec};
use dl_core::solver::{solve_product_table, SolveOutcome};
use dl_core::verify::{verify_adem, verify_cartan_to_degree, verify_sign_laws};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}, {took:.2?}"))
    } else {
        Err(format!("{detail}, but took {took:.2?} (limit {limit:?})"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_base_case() -> Outcome {
    let start = Instant::now();
    let m = ModuleSpec::s1_p2();
    for j in 0..=50u32 {
        let got = m.act(2 * j, 0).map_err(|e| e.to_string())?;
        let want = m.generator(j as u64 + 1).map_err(|e| e.to_string())?;
        ensure(got == want, || {
            format!("Q_{}(x_0) = {got}, expected {want}", 2 * j)
        })?;
    }
    within(
        Duration::from_secs(1),
        start,
        "Q_2j(x_0) = x_(j+1) for j <= 50".into(),
    )
}

/// Pascal's triangle mod 2, built by addition only.
fn pascal_mod2(n_max: usize) -> Vec<Vec<u32>> {
    let mut rows = vec![vec![1u32]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let row = (0..=n)
            .map(|k| {
                if k == 0 || k == n {
                    1
                } else {
                    prev[k - 1] ^ prev[k]
                }
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn c2_table() -> Outcome {
    let start = Instant::now();
    let rows = pascal_mod2(50 + 50);
    let cells = coefficient_table(&ModuleSpec::s1_p2(), 100, 50).map_err(|e| e.to_string())?;
    for c in &cells {
        let (op, i) = (c.op as usize, c.gen as usize);
        let (coeff, target) = if op % 2 == 1 {
            (0, None)
        } else {
            let j = op / 2;
            let coeff = rows[i + j][j];
            (coeff, (coeff != 0).then_some((2 * i + j + 1) as u64))
        };
        ensure(
            c.coeff == coeff && (coeff == 0 || c.target == target),
            || {
                format!(
                    "cell op={op} gen={i}: got {} -> {:?}, oracle {coeff} -> {target:?}",
                    c.coeff, c.target
                )
            },
        )?;
    }
    within(
        Duration::from_secs(5),
        start,
        format!("{} cells match the Pascal oracle", cells.len()),
    )
}

fn c3_adem() -> Outcome {
    let start = Instant::now();
    let r = verify_adem(&ModuleSpec::s1_p2(), 24, 12).map_err(|e| e.to_string())?;
    ensure(r.passed(), || {
        format!("{} failures, first {:?}", r.failures.len(), r.failures[0])
    })?;
    within(
        Duration::from_secs(30),
        start,
        format!("{} instances, 0 failures", r.checked),
    )
}

fn c4_sensitivity() -> Outcome {
    let m = ModuleSpec::s1_p2();
    // verify_adem(24, 12) evaluates Q_s(x_i) directly for s < r <= 24 and
    // i <= 12; odd operations have no target in their degree to flip
    let cells: Vec<(u32, u64)> = (0..=22)
        .step_by(2)
        .flat_map(|op| (0..=12).map(move |g| (op, g)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let base = ActionTable::from_module(&m, 24, 120).map_err(|e| e.to_string())?;
    let mut detected = Vec::new();
    for _ in 0..10 {
        let &(op, gen) = cells.choose(&mut rng).expect("nonempty");
        let mut t = base.clone();
        t.perturb(m.algebra(), op, gen).map_err(|e| e.to_string())?;
        let bad = ModuleSpec::new(m.algebra().clone(), ActionRule::Table(t))
            .map_err(|e| e.to_string())?;
        let r = verify_adem(&bad, 24, 12).map_err(|e| e.to_string())?;
        ensure(!r.passed(), || {
            format!("flipping Q_{op}(x_{gen}) went undetected")
        })?;
        detected.push(format!("({op},{gen}):{}", r.failures.len()));
    }
    Ok(format!(
        "10/10 corruptions detected [op,gen:failures {}]",
        detected.join(" ")
    ))
}

/// Random odd-prime, even-`dim G` specs with arbitrary (possibly
/// sign-violating) product tables on a degree-`slope * i` family.
fn odd_prime_specs() -> impl Strategy<Value = JoinAlgebraSpec> {
    (
        prop::sample::select(vec![3u32, 5, 7, 11]),
        0u32..4,
        any::<bool>(),
        prop::collection::vec(0i64..13, 36),
    )
        .prop_map(|(p, half_dim, wide, coeffs)| {
            let dim_g = 2 * half_dim;
            // products land on a generator iff slope divides dim G + 1
            let slope = if wide { dim_g + 1 } else { 1 };
            let shift = (dim_g as u64 + 1) / slope as u64;
            let family = GeneratorFamily::new("y", slope, 0);
            let mut c = coeffs.into_iter();
            let entries: Vec<_> = (0..8u64)
                .flat_map(|a| (a..8).map(move |b| (a, b)))
                .map(|(a, b)| ((a, b), vec![(c.next().unwrap_or(1), a + b + shift)]))
                .collect();
            JoinAlgebraSpec::new(Prime::new(p).unwrap(), dim_g, family, entries)
                .expect("degree law holds")
        })
}

fn c5_signs() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 256,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]),
    );
    runner
        .run(&odd_prime_specs(), |spec| {
            let canon = spec.sign_canonical();
            prop_assert!(
                canon.diagonal_forced_zero(0),
                "pt * pt not forced for {:?}",
                spec.dim_g()
            );
            prop_assert!(canon.generator_product(0, 0).unwrap().is_zero());
            prop_assert!(verify_sign_laws(&canon).passed());
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let p3 = Prime::new(3).unwrap();
    let violating = JoinAlgebraSpec::new(
        p3,
        0,
        GeneratorFamily::new("y", 1, 0),
        [((0, 0), vec![(1, 1)])],
    )
    .map_err(|e| e.to_string())?;
    let r = verify_sign_laws(&violating);
    ensure(!r.passed(), || {
        "hand-built spec with pt * pt = y_1 passed".into()
    })?;
    Ok("256 generated specs pass after sign canonicalisation, violating spec fails".into())
}

fn c6_degrees() -> Outcome {
    let m = ModuleSpec::s1_p2();
    let alg = m.algebra();
    let mut nonzero = 0;
    for c in coefficient_table(&m, 100, 50).map_err(|e| e.to_string())? {
        let y = m.act(c.op, c.gen).map_err(|e| e.to_string())?;
        if y.is_zero() {
            continue;
        }
        nonzero += 1;
        let expected = op_degree(
            &OperationWord::new(Prime::TWO, vec![c.op]),
            alg.degree(c.gen),
            alg.dim_g(),
        );
        ensure(y.homogeneous_degree() == Some(expected), || {
            format!(
                "Q_{}(x_{}) = {y} has degree {:?}, expected {expected}",
                c.op,
                c.gen,
                y.homogeneous_degree()
            )
        })?;
    }
    Ok(format!("{nonzero} nonzero cells in predicted degree"))
}

fn c7_lucas() -> Outcome {
    let start = Instant::now();
    let mut count = 0usize;
    for p in [2u32, 3, 5, 7, 11, 13] {
        let prime = Prime::new(p).unwrap();
        let mut row = vec![1u32];
        for n in 0..=1000u64 {
            if n > 0 {
                let mut next = vec![1u32; n as usize + 1];
                for k in 1..n as usize {
                    next[k] = (row[k - 1] + row[k]) % p;
                }
                row = next;
            }
            for (k, &c) in row.iter().enumerate() {
                let got = binom_mod_p(n, k as u64, prime).value();
                ensure(got == c, || {
                    format!("C({n},{k}) mod {p}: Lucas {got}, Pascal {c}")
                })?;
                count += 1;
            }
        }
    }
    within(
        Duration::from_secs(10),
        start,
        format!("{count} values agree"),
    )
}

fn c8_solver() -> Outcome {
    const MAX_DEGREE: i64 = 40;
    let start = Instant::now();
    let m = ModuleSpec::s1_p2();
    let space = match solve_product_table(&m, MAX_DEGREE).map_err(|e| e.to_string())? {
        SolveOutcome::Solved(s) => s,
        other => return Err(format!("unexpected {other:?}")),
    };
    let zero = space.zero_solution();
    ensure(space.system.satisfied_by(&zero), || {
        "zero table is not a solution".into()
    })?;
    let mut checked = 0;
    for (k, v) in space.basis.iter().chain([&zero]).enumerate() {
        let table = space.table(m.algebra(), v).map_err(|e| e.to_string())?;
        let with = m.with_algebra(table.clone()).map_err(|e| e.to_string())?;
        let cartan = verify_cartan_to_degree(&with, MAX_DEGREE).map_err(|e| e.to_string())?;
        ensure(cartan.passed(), || {
            format!("basis {k}: Cartan fails at {:?}", cartan.failures[0].inputs)
        })?;
        let signs = verify_sign_laws(&table);
        ensure(signs.passed(), || format!("basis {k}: sign law fails"))?;
        checked += cartan.checked;
    }
    let detail = format!(
        "{} unknowns, rank {}, dimension {}, {checked} Cartan instances over the basis and zero table",
        space.system.unknowns.len(),
        space.rank,
        space.dimension()
    );
    within(Duration::from_secs(60), start, detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("base case Q_2j(x_0) = x_(j+1)", c1_base_case),
        ("S^1 table vs Pascal mod 2", c2_table),
        ("Adem relations in the kernel", c3_adem),
        ("harness sensitivity", c4_sensitivity),
        ("sign-law corollary", c5_signs),
        ("degree bookkeeping", c6_degrees),
        ("Lucas oracle equivalence", c7_lucas),
        ("solver round trip", c8_solver),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {}/8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
