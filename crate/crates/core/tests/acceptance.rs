//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and exits non-zero if
//! any criterion fails or overruns its time budget.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bunchlab::bunching::{build_projector, quantum_event_probability, EventSpec, ExperimentConfig};
use bunchlab::fock::{
    amplitude, beam_splitter, lift_unitary, permanent, permanent_ryser, CMatrix, FockState,
    ModeUnitary, Reflectivity, C64,
};
use bunchlab::hv::{
    analytic_event_prob, analytic_sum, joint_pattern_distribution, monte_carlo_event_prob,
    sweep_sum, BiasParameter, EventPattern, JointMethod,
};
use common::{naive_permanent, unit_square_measure, BIAS_GRID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const MC_SAMPLES: u64 = 1_000_000;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn delta(x: f64) -> BiasParameter {
    BiasParameter::new(x).expect("delta in range")
}

/// 1. HOM bunching at r = 1/2.
fn quantum_bunching() -> Outcome {
    let bs = beam_splitter(Reflectivity::BALANCED, (0, 1), 2).map_err(|e| e.to_string())?;
    let s11 = FockState::new(vec![1, 1]);
    let coincidence = amplitude(&bs, &s11, &s11)
        .map_err(|e| e.to_string())?
        .norm();
    let p20 = amplitude(&bs, &s11, &FockState::new(vec![2, 0]))
        .map_err(|e| e.to_string())?
        .norm_sqr();
    let p02 = amplitude(&bs, &s11, &FockState::new(vec![0, 2]))
        .map_err(|e| e.to_string())?
        .norm_sqr();
    ensure(coincidence <= 1e-12, || {
        format!("|⟨11|Φ|11⟩| = {coincidence:e}")
    })?;
    ensure((p20 - 0.5).abs() <= 1e-12, || format!("P(2,0) = {p20}"))?;
    ensure((p02 - 0.5).abs() <= 1e-12, || format!("P(0,2) = {p02}"))?;
    Ok(format!(
        "|A(11→11)| = {coincidence:.1e}, P(2,0) = {p20:.15}, P(0,2) = {p02:.15}"
    ))
}

/// 2. Canonical quantum event probabilities and their sum.
fn event_probabilities() -> Outcome {
    let cfg = ExperimentConfig::new(Reflectivity::BALANCED);
    let mut sum = 0.0;
    let mut parts = Vec::new();
    for e in EventSpec::canonical() {
        let p = quantum_event_probability(&e, &cfg).map_err(|e| e.to_string())?;
        ensure((p - 0.5).abs() <= 1e-12, || format!("P({e}) = {p}"))?;
        parts.push(format!("P({e}) = {p:.15}"));
        sum += p;
    }
    ensure((sum - 1.5).abs() <= 1e-12, || format!("sum = {sum}"))?;
    Ok(format!("{}, sum = {sum:.15}", parts.join(", ")))
}

/// 3. Hidden-variable model at δ = 0 reproduces quantum bunching.
fn hv_zero_bias() -> Outcome {
    let cfg = ExperimentConfig::new(Reflectivity::BALANCED);
    let mut worst_z: f64 = 0.0;
    for e in EventSpec::canonical() {
        let q = quantum_event_probability(&e, &cfg).map_err(|e| e.to_string())?;
        let a = analytic_event_prob(&e, BiasParameter::ZERO);
        ensure((q - a).abs() <= 1e-12, || {
            format!("{e}: quantum {q} vs analytic {a}")
        })?;
        let mc = monte_carlo_event_prob(&e, BiasParameter::ZERO, MC_SAMPLES, SEED)
            .map_err(|e| e.to_string())?;
        let dev = (mc.estimate - 0.5).abs();
        ensure(dev <= 3.0 * mc.stderr, || {
            format!("{e}: MC {} ± {} vs 0.5", mc.estimate, mc.stderr)
        })?;
        worst_z = worst_z.max(dev / mc.stderr);
    }
    Ok(format!(
        "analytic = quantum for all events; worst MC deviation {worst_z:.2}σ"
    ))
}

/// 4. Sum formula `3/2 + δ - δ²/2`, Monte Carlo agreement and quadrature of `p₊`, `p₋`.
fn bias_formula() -> Outcome {
    let grid: Vec<BiasParameter> = BIAS_GRID.iter().map(|&(d, _)| delta(d)).collect();
    let rows = sweep_sum(&grid, MC_SAMPLES, SEED).map_err(|e| e.to_string())?;
    let mut worst_z: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for (row, &bias) in rows.iter().zip(&grid) {
        let d = bias.value();
        let formula = 1.5 + d - d * d / 2.0;
        let analytic = analytic_sum(bias);
        ensure((analytic - formula).abs() <= 1e-12, || {
            format!("δ={d}: analytic {analytic} vs formula {formula}")
        })?;
        let dev = (row.mc_sum - analytic).abs();
        ensure(dev <= 3.0 * row.mc_stderr, || {
            format!(
                "δ={d}: MC sum {} ± {} vs {analytic}",
                row.mc_sum, row.mc_stderr
            )
        })?;
        if row.mc_stderr > 0.0 {
            worst_z = worst_z.max(dev / row.mc_stderr);
        }

        let p_plus = unit_square_measure(|x, y| x + d > y, 4096);
        let p_minus = unit_square_measure(|x, y| x + d <= y, 4096);
        let plus = analytic_event_prob(&EventSpec::AB, bias);
        let minus = analytic_event_prob(&EventSpec::AC, bias);
        ensure((p_plus - plus).abs() <= 1e-6, || {
            format!("δ={d}: p₊ {plus} vs {p_plus}")
        })?;
        ensure((p_minus - minus).abs() <= 1e-6, || {
            format!("δ={d}: p₋ {minus} vs {p_minus}")
        })?;
        ensure(
            (analytic_event_prob(&EventSpec::BC, bias) - plus).abs() <= 1e-15,
            || format!("δ={d}: b̲c does not follow p₊"),
        )?;
        worst_quad = worst_quad
            .max((p_plus - plus).abs())
            .max((p_minus - minus).abs());
    }
    Ok(format!(
        "6 grid points; worst MC deviation {worst_z:.2}σ; worst quadrature gap {worst_quad:.1e}"
    ))
}

/// 5. Projector algebra at r = 1/2.
fn projector_algebra() -> Outcome {
    let cfg = ExperimentConfig::new(Reflectivity::BALANCED);
    let events = EventSpec::canonical();
    let projectors = events
        .iter()
        .map(|e| build_projector(e, &cfg))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    for (e, p) in events.iter().zip(&projectors) {
        ensure(p.hermiticity_residual() <= 1e-10, || {
            format!("{e} not Hermitian")
        })?;
        ensure(p.idempotence_residual() <= 1e-10, || {
            format!("{e} not idempotent")
        })?;
        let tr = p.trace();
        ensure((tr.re - 1.0).abs() <= 1e-10 && tr.im.abs() <= 1e-10, || {
            format!("{e}: trace {tr}")
        })?;
    }
    let (mut min_prod, mut min_comm) = (f64::INFINITY, f64::INFINITY);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let prod = projectors[i]
                .compose(&projectors[j])
                .map_err(|e| e.to_string())?
                .frobenius_norm();
            let comm = projectors[i]
                .commutator(&projectors[j])
                .map_err(|e| e.to_string())?
                .norm();
            ensure(prod > 0.01, || format!("‖Π{i}Π{j}‖ = {prod}"))?;
            ensure(comm > 0.01, || format!("‖[Π{i},Π{j}]‖ = {comm}"))?;
            min_prod = min_prod.min(prod);
            min_comm = min_comm.min(comm);
        }
    }
    Ok(format!(
        "rank 1 each; min ‖ΠᵢΠⱼ‖ = {min_prod:.4}, min ‖[Πᵢ,Πⱼ]‖ = {min_comm:.4}"
    ))
}

/// 6. Joint-pattern law at δ = 0.
fn joint_patterns() -> Outcome {
    let exact = joint_pattern_distribution(BiasParameter::ZERO, JointMethod::Exact)
        .map_err(|e| e.to_string())?;
    let ttt = exact.probability(EventPattern([true; 3]));
    let fff = exact.probability(EventPattern([false; 3]));
    ensure(ttt == 0.0 && fff == 0.0, || {
        format!("P(TTT) = {ttt}, P(FFF) = {fff}")
    })?;
    let (two, one) = (exact.exactly(2), exact.exactly(1));
    ensure(
        (two - 0.5).abs() <= 1e-12 && (one - 0.5).abs() <= 1e-12,
        || format!("P(two) = {two}, P(one) = {one}"),
    )?;
    let expected = exact.expected_true_count();
    ensure((expected - 1.5).abs() <= 1e-12, || {
        format!("E[count] = {expected}")
    })?;

    let mc = joint_pattern_distribution(
        BiasParameter::ZERO,
        JointMethod::MonteCarlo {
            samples: MC_SAMPLES,
            seed: SEED,
        },
    )
    .map_err(|e| e.to_string())?;
    let counts = mc.counts.ok_or("missing MC counts")?;
    ensure(counts[0] == 0 && counts[7] == 0, || {
        format!(
            "forbidden patterns observed: FFF {}, TTT {}",
            counts[0], counts[7]
        )
    })?;
    ensure(counts.iter().sum::<u64>() == MC_SAMPLES, || {
        "MC counts do not add up".into()
    })?;
    Ok(format!(
        "exact P(two) = {two}, P(one) = {one}, E = {expected}; 0 forbidden in {MC_SAMPLES} MC samples"
    ))
}

/// 7. Lift unitarity and homomorphism; Ryser against enumeration.
fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_unitary: f64 = 0.0;
    let mut worst_hom: f64 = 0.0;
    for i in 0..50 {
        let m = 1 + i % 3;
        let n = i % 4;
        let u = ModeUnitary::random(m, &mut rng);
        let v = ModeUnitary::random(m, &mut rng);
        let lu = lift_unitary(&u, n).map_err(|e| e.to_string())?;
        let lv = lift_unitary(&v, n).map_err(|e| e.to_string())?;
        let luv = lift_unitary(&u.then_after(&v).map_err(|e| e.to_string())?, n)
            .map_err(|e| e.to_string())?;
        let prod = lu.compose(&lv).map_err(|e| e.to_string())?;
        let hom = (luv.matrix() - prod.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let unit = lu.unitarity_residual();
        ensure(unit <= 1e-9, || {
            format!("Φ(U) not unitary (m={m}, N={n}): {unit:e}")
        })?;
        ensure(hom <= 1e-9, || {
            format!("Φ(UV) ≠ Φ(U)Φ(V) (m={m}, N={n}): {hom:e}")
        })?;
        worst_unitary = worst_unitary.max(unit);
        worst_hom = worst_hom.max(hom);
    }

    let mut worst_rel: f64 = 0.0;
    for i in 0..100 {
        let n = 1 + i % 6;
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let oracle = naive_permanent(&rows);
        let m = CMatrix::from_fn(n, n, |r, c| rows[r][c]);
        for got in [permanent(&m), permanent_ryser(&m)] {
            let got = got.map_err(|e| e.to_string())?;
            let rel = (got - oracle).norm() / oracle.norm();
            ensure(rel <= 1e-10, || {
                format!("n={n}: {got} vs {oracle} (rel {rel:e})")
            })?;
            worst_rel = worst_rel.max(rel);
        }
    }
    Ok(format!(
        "50 unitaries: max unitarity residual {worst_unitary:.1e}, max homomorphism error \
         {worst_hom:.1e}; 100 permanents: max relative error {worst_rel:.1e}"
    ))
}

/// 8. Byte-identical CLI output for identical flags, across thread counts.
fn cli_determinism() -> Outcome {
    let run = |args: &[&str], threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_bunchlab"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .env_remove("BUNCHLAB_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        Ok(out.stdout)
    };
    let invocations: [&[&str]; 3] = [
        &["hv", "--delta", "0", "--samples", "1000000", "--seed", "42"],
        &[
            "sweep",
            "--from",
            "0",
            "--to",
            "1",
            "--steps",
            "5",
            "--samples",
            "200000",
        ],
        &["quantum", "--format", "json"],
    ];
    for args in invocations {
        let first = run(args, "1")?;
        let second = run(args, "1")?;
        let parallel = run(args, "4")?;
        ensure(first == second, || {
            format!("{args:?}: repeated runs differ")
        })?;
        ensure(first == parallel, || {
            format!("{args:?}: 1 vs 4 threads differ")
        })?;
    }
    Ok("hv, sweep, quantum: identical bytes across repeats and 1/4 threads".into())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "quantum bunching at r=1/2",
            budget: Some(Duration::from_secs(1)),
            check: quantum_bunching,
        },
        Criterion {
            id: 2,
            name: "event probabilities 1/2, sum 3/2",
            budget: Some(Duration::from_secs(1)),
            check: event_probabilities,
        },
        Criterion {
            id: 3,
            name: "HV model at delta=0 matches quantum",
            budget: Some(Duration::from_secs(10)),
            check: hv_zero_bias,
        },
        Criterion {
            id: 4,
            name: "sum formula 3/2+d-d^2/2",
            budget: Some(Duration::from_secs(60)),
            check: bias_formula,
        },
        Criterion {
            id: 5,
            name: "projector algebra",
            budget: Some(Duration::from_secs(1)),
            check: projector_algebra,
        },
        Criterion {
            id: 6,
            name: "joint-pattern law at delta=0",
            budget: Some(Duration::from_secs(10)),
            check: joint_patterns,
        },
        Criterion {
            id: 7,
            name: "lift and permanent properties",
            budget: Some(Duration::from_secs(30)),
            check: property_suite,
        },
        Criterion {
            id: 8,
            name: "CLI determinism",
            budget: None,
            check: cli_determinism,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let over_budget = c.budget.is_some_and(|b| elapsed > b);
        let (status, detail) = match (&outcome, over_budget) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        let budget = c
            .budget
            .map_or_else(|| "none".to_string(), |b| format!("{}s", b.as_secs()));
        println!(
            "[{status}] {}. {} ({:.3}s, budget {budget}): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
