//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dimer_core::closed_forms::{
    beta, l_closed, l_coupled, l_recurrence, macmahon, p_closed, p_recurrence, p_second_order, p_two_step,
};
use dimer_core::entropy::{
    entropy_g1, entropy_g2, entropy_quad_lattice, g1_entropy_finite, g2_entropy_finite, hexagon_entropy_finite,
    kos_entropy, verify_torus_cylinder_identity, CharacteristicPolynomial, KosMode,
};
use dimer_core::fkt::{count_fkt, verify_orientation};
use dimer_core::lattices::{edge_ring, gen_g1_cylinder, gen_g2_cylinder, gen_hexagon, hexagon_ring, quad_cylinder, square_ring};
use dimer_core::symmetry::ParityCase;
use dimer_core::{CountTarget, LatticeFamily, LatticeSpec, MethodRegistry, Precision, QuadratureSpec};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Outcome, String>;

fn small_instances() -> Vec<LatticeSpec> {
    const LIMIT: usize = 20;
    let mut out = Vec::new();
    for family in LatticeFamily::ALL {
        if family == LatticeFamily::Hexagon {
            for a in 1..=LIMIT {
                for b in a..=LIMIT {
                    for c in b..=LIMIT {
                        let spec = LatticeSpec::hexagon(a, b, c).unwrap();
                        if spec.vertex_count() <= LIMIT {
                            out.push(spec);
                        }
                    }
                }
            }
            continue;
        }
        for m in 1..=LIMIT {
            for n in 1..=LIMIT {
                let spec = LatticeSpec::new(family, m, n).unwrap();
                if spec.vertex_count() <= LIMIT {
                    out.push(spec);
                }
            }
        }
    }
    out
}

fn oracle_equivalence() -> Result<Outcome, String> {
    let registry = MethodRegistry::default();
    let required = ["quad(2,2)", "quad(2,3)", "g1-cylinder(1,1)", "g2-cylinder(1,1)", "g2-cylinder(2,1)", "hexagon(1,1,1)", "hexagon(1,1,2)"];
    let instances = small_instances();
    let names: BTreeSet<String> = instances.iter().map(|s| s.to_string()).collect();
    if let Some(missing) = required.iter().find(|r| !names.contains(**r)) {
        return Ok(outcome(false, format!("required instance {missing} not generated")));
    }
    let mut comparisons = 0;
    for spec in &instances {
        let target = CountTarget::from(*spec);
        let results = registry.cross_check(&target, Precision::default());
        let methods: Vec<&str> = results.iter().map(|r| r.0).collect();
        if !methods.contains(&"brute") || !methods.contains(&"fkt") {
            return Ok(outcome(false, format!("{spec}: only {methods:?} applicable")));
        }
        let first = results[0].1.as_ref().map_err(|e| format!("{spec} {}: {e}", results[0].0))?;
        for (name, r) in &results[1..] {
            let c = r.as_ref().map_err(|e| format!("{spec} {name}: {e}"))?;
            if c != first {
                return Ok(outcome(false, format!("{spec}: {} gives {first}, {name} gives {c}", results[0].0)));
            }
            comparisons += 1;
        }
    }
    Ok(outcome(
        true,
        format!("{} instances up to 20 vertices, {comparisons} pairwise equalities", instances.len()),
    ))
}

fn entropy_constants() -> Result<Outcome, String> {
    let spec = QuadratureSpec::default();
    let mut worst = Duration::ZERO;
    let mut timed = |f: &dyn Fn() -> Result<f64, String>| {
        let t = Instant::now();
        let v = f();
        worst = worst.max(t.elapsed());
        v
    };
    let g1 = timed(&|| entropy_g1(&spec).map(|e| e.value).map_err(|e| e.to_string()))?;
    let g2 = timed(&|| entropy_g2(&spec).map(|e| e.value).map_err(|e| e.to_string()))?;
    let quad = timed(&|| Ok(entropy_quad_lattice().value))?;
    let ok = (g1 - 0.3344).abs() <= 5e-4 && (g2 - 0.3770).abs() <= 5e-4 && (quad - 0.5831).abs() <= 5e-4 && worst < Duration::from_secs(5);
    Ok(outcome(ok, format!("g1 {g1:.6}, g2 {g2:.6}, square {quad:.6}; slowest {worst:.2?}")))
}

fn torus_identity() -> Result<Outcome, String> {
    let spec = QuadratureSpec::default();
    let check = verify_torus_cylinder_identity(&spec).map_err(|e| e.to_string())?;
    let g1 = entropy_g1(&spec).map_err(|e| e.to_string())?.value;
    let t = Instant::now();
    let direct = kos_entropy(&CharacteristicPolynomial::g1_torus(), &spec, KosMode::Direct).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let gap = (direct.value - g1).abs();
    let ok = check.difference < 1e-8 && gap < 1e-3 && elapsed < Duration::from_secs(60);
    Ok(outcome(
        ok,
        format!(
            "|lhs - rhs| = {:.2e}; 2-D torus {:.10} vs cylinder {g1:.10} (gap {gap:.2e}, {elapsed:.2?})",
            check.difference, direct.value
        ),
    ))
}

fn recurrence_consistency() -> Result<Outcome, String> {
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in 1..=8 {
        for j in 0..n {
            let b = beta(j, n).map_err(|e| e.to_string())?.value;
            for m in 0..=30u32 {
                let l = l_closed(m, &b);
                let p = p_closed(m, &b);
                for other in [l_recurrence(m, b), l_coupled(m, b).0] {
                    worst = worst.max(rel(l, other));
                }
                for other in [p_recurrence(m, b), p_two_step(m, b), p_second_order(m, b)] {
                    worst = worst.max(rel(p, other));
                }
                checked += 1;
            }
        }
    }
    Ok(outcome(worst < 1e-10, format!("{checked} (m, j, n) triples, worst relative gap {worst:.2e}")))
}

fn finite_size_convergence() -> Result<Outcome, String> {
    let p = Precision::default();
    let e = |r: dimer_core::Result<f64>| r.map_err(|e| e.to_string());
    let g1 = (e(g1_entropy_finite(8, 8, p))?, e(g1_entropy_finite(64, 64, p))?);
    let g2 = (e(g2_entropy_finite(8, 8, p))?, e(g2_entropy_finite(64, 64, p))?);
    let hex = (e(hexagon_entropy_finite(8))?, e(hexagon_entropy_finite(64))?);
    let converging = |(small, large): (f64, f64), limit: f64, tol: f64| {
        (large - limit).abs() <= tol && (large - limit).abs() < (small - limit).abs()
    };
    let ok = converging(g1, 0.3344, 0.02) && converging(g2, 0.3770, 0.02) && converging(hex, 0.2616, 0.05);
    Ok(outcome(
        ok,
        format!(
            "g1 {:.5} -> {:.5}, g2 {:.5} -> {:.5}, hexagon {:.5} -> {:.5}",
            g1.0, g1.1, g2.0, g2.1, hex.0, hex.1
        ),
    ))
}

fn orientation_correctness() -> Result<Outcome, String> {
    let mut quotients = Vec::new();
    for n in 1..=4 {
        quotients.push(edge_ring(n));
        quotients.push(square_ring(n));
        quotients.push(hexagon_ring(n));
        quotients.push(gen_g1_cylinder(1, n));
        quotients.push(gen_g2_cylinder(1, n));
        if n >= 2 {
            quotients.push(quad_cylinder(2, n));
        }
    }
    let mut covered = BTreeSet::new();
    let mut checked = 0;
    for q in quotients {
        let q = q.map_err(|e| e.to_string())?;
        let g = q.expand().map_err(|e| e.to_string())?;
        let o = q.regular_orientation().map_err(|e| e.to_string())?;
        if !verify_orientation(&g, &o).map_err(|e| e.to_string())? {
            return Ok(outcome(false, format!("n={}, width={} not Pfaffian", q.n(), q.width())));
        }
        covered.insert(q.parity_case().to_string());
        checked += 1;
    }
    let all: BTreeSet<String> = [ParityCase::BothEven, ParityCase::OddOrderEvenWidth, ParityCase::EvenOrderOddWidth, ParityCase::BothOdd]
        .iter()
        .map(|c| c.to_string())
        .collect();
    Ok(outcome(
        covered == all,
        format!("{checked} quotients, {}/4 parity cases covered", covered.len()),
    ))
}

fn macmahon_boxes() -> Result<Outcome, String> {
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                let formula = macmahon(a, b, c).map_err(|e| e.to_string())?;
                let g = gen_hexagon(a, b, c).map_err(|e| e.to_string())?;
                let fkt = count_fkt(&g).map_err(|e| e.to_string())?;
                if fkt.value() != &formula {
                    return Ok(outcome(false, format!("({a},{b},{c}): formula {formula}, fkt {fkt}")));
                }
                for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                    if macmahon(x, y, z).map_err(|e| e.to_string())? != formula {
                        return Ok(outcome(false, format!("({a},{b},{c}) not symmetric under ({x},{y},{z})")));
                    }
                }
            }
        }
    }
    Ok(outcome(true, "27 boxes agree with FKT and all permutations"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 7] = [
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(30)),
        ("entropy constants", entropy_constants, Duration::from_secs(15)),
        ("torus/cylinder identity", torus_identity, Duration::from_secs(60)),
        ("recurrence consistency", recurrence_consistency, Duration::from_secs(5)),
        ("finite-size convergence", finite_size_convergence, Duration::from_secs(30)),
        ("orientation correctness", orientation_correctness, Duration::from_secs(5)),
        ("boxed plane partitions", macmahon_boxes, Duration::from_secs(10)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "[{}] {}. {name}: {detail} ({elapsed:.2?}, budget {budget:?})",
            if passed { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
