//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use dfi_core::certify::{
    check_gap, check_max_principle, check_polyhedral_conditions, check_transversality, verify,
    ConditionId, VerifyOptions,
};
use dfi_core::demo;
use dfi_core::ext_real::ExtReal;
use dfi_core::functions::{evaluate, subdiff_contains};
use dfi_core::geometry::{dual_cone_membership, tangent_cone};
use dfi_core::linalg::dot;
use dfi_core::maps::{
    hamiltonian, lam_membership_via_hamiltonian, lam_polyhedral_members, m_function,
    m_function_closed_form, max_principle_gap, SetValuedMap,
};
use dfi_core::transcription::{
    adjoint_traces, euler_lagrange_arguments, evaluate_dual_functional, extract_dual_certificate,
    solve_primal, DifferenceOperator, DiscreteTrajectory, DualCertificate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn weak_duality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    let mut finite = 0;
    let mut trials = 0;
    for inst in 0..100 {
        let instance = common::random_instance(&mut rng, inst % 2 == 1);
        let spec = &instance.spec;
        for traj in &instance.trajectories {
            let primal =
                evaluate(spec.objective(), &traj.endpoints()).map_err(|e| e.to_string())?;
            for _ in 0..2 {
                let cert = common::dual_feasible_certificate(&mut rng, spec);
                let dual = evaluate_dual_functional(spec, &cert).map_err(|e| e.to_string())?;
                trials += 1;
                if let ExtReal::Finite(v) = dual {
                    finite += 1;
                    worst = worst.max(v - primal);
                } else if dual == ExtReal::PosInf {
                    return Err(format!("instance {inst}: dual value +inf"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 1e-7 && secs <= 60.0 && finite == trials,
        format!("{trials} pairs ({finite} finite), max J* - f = {worst:.3e}, {secs:.1} s"),
    )
}

fn strong_duality() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, spec) in [
        ("decay", demo::decay()),
        ("ptl", demo::ptl(demo::PTL_INTERVALS)),
        ("pfc", demo::pfc(demo::PFC_INTERVALS)),
    ] {
        let spec = spec.map_err(|e| e.to_string())?;
        let g = check_gap(&spec).map_err(|e| e.to_string())?;
        ok &= g.gap.abs() <= 1e-6;
        details.push(format!("{name} gap {:.3e}", g.gap));
    }
    ensure(ok, details.join(", "))
}

fn decay_closed_form() -> Outcome {
    let spec = demo::decay().map_err(|e| e.to_string())?;
    let value = solve_primal(&spec).map_err(|e| e.to_string())?.value;
    let h = spec.step();
    let oracle = (0..spec.intervals()).fold(1.0, |x, _| (1.0 - h) * x);
    ensure(
        (value - oracle).abs() <= 1e-9 && (oracle - 0.3486784401).abs() <= 1e-10,
        format!("value {value:.10}, recurrence {oracle:.10}"),
    )
}

fn ptl_demo() -> Outcome {
    let n = demo::PTL_INTERVALS;
    let spec = demo::ptl(n).map_err(|e| e.to_string())?;
    let primal = solve_primal(&spec).map_err(|e| e.to_string())?;
    let cert = extract_dual_certificate(&spec, &primal).map_err(|e| e.to_string())?;
    let h = spec.step();
    // bang-bang v ≡ -1 with zero initial data
    let mut x = vec![0.0; n + 1];
    for i in 0..=n - 3 {
        x[i + 3] = -h.powi(3) + 3.0 * x[i + 2] - 3.0 * x[i + 1] + x[i];
    }
    let oracle = x[n];
    let rel = (primal.value + 1.0 / 6.0).abs() / (1.0 / 6.0);
    let mp =
        check_max_principle(&spec, &primal.trajectory, &cert, 1e-8).map_err(|e| e.to_string())?;
    let (c, d) =
        check_transversality(&spec, &primal.trajectory, &cert, 1e-7).map_err(|e| e.to_string())?;
    ensure(
        rel <= 0.05 && (primal.value - oracle).abs() <= 1e-9 && mp.pass && c.pass && d.pass,
        format!(
            "value {:.6} (recurrence {oracle:.6}, {:.2}% from -1/6), max principle {:.3e}, transversality {:.3e}/{:.3e}",
            primal.value,
            100.0 * rel,
            mp.residual,
            c.residual,
            d.residual
        ),
    )
}

fn lam_cases() -> Vec<common::LamCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..60).map(|_| common::random_lam_case(&mut rng)).collect()
}

fn lam_consistency() -> Outcome {
    let mut checked = 0;
    let mut members = 0;
    let mut disagreements = 0;
    for case in lam_cases() {
        let f: SetValuedMap = case.map.clone().into();
        let lam =
            lam_polyhedral_members(&case.map, &case.v_star, &case.x_tilde, &case.v_tilde, 1e-9)
                .map_err(|e| e.to_string())?;
        for x_star in &case.candidates {
            let farkas = lam.contains(x_star).map_err(|e| e.to_string())?;
            let canonical = lam_membership_via_hamiltonian(
                &f,
                &case.v_star,
                &case.x_tilde,
                &case.v_tilde,
                x_star,
                1e-8,
            )
            .map_err(|e| e.to_string())?;
            checked += 1;
            members += usize::from(canonical);
            disagreements += usize::from(farkas != canonical);
        }
    }
    ensure(
        disagreements == 0,
        format!(
            "60 instances, {checked} candidates ({members} members), {disagreements} disagreements"
        ),
    )
}

fn lemma_equivalence() -> Outcome {
    let mut checked = 0;
    let mut disagreements = 0;
    for case in lam_cases() {
        let f: SetValuedMap = case.map.clone().into();
        let h_tilde = hamiltonian(&f, &case.x_tilde, &case.v_star).map_err(|e| e.to_string())?;
        for x_star in &case.candidates {
            let member = lam_membership_via_hamiltonian(
                &f,
                &case.v_star,
                &case.x_tilde,
                &case.v_tilde,
                x_star,
                1e-8,
            )
            .map_err(|e| e.to_string())?;
            let m = m_function(&f, x_star, &case.v_star).map_err(|e| e.to_string())?;
            let target = ExtReal::Finite(dot(&case.x_tilde, x_star))
                .try_sub(h_tilde)
                .map_err(|e| e.to_string())?;
            let equal = match (m, target) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= 1e-8,
                _ => false,
            };
            checked += 1;
            disagreements += usize::from(equal != member);
        }
    }
    ensure(
        disagreements == 0,
        format!("{checked} candidates, {disagreements} disagreements"),
    )
}

fn m_function_closed_form_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut neg_inf = 0;
    let mut mismatched_branches = 0;
    for inst in 0..50 {
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=2);
        let map = common::random_linear_control(&mut rng, n, r);
        let v_star = common::uniform(&mut rng, -2.0, 2.0, n);
        let x_star = if inst % 2 == 0 {
            map.a().tr_mul_vec(&v_star)
        } else {
            common::uniform(&mut rng, -2.0, 2.0, n)
        };
        let lp = m_function(&map.clone().into(), &x_star, &v_star).map_err(|e| e.to_string())?;
        let closed =
            m_function_closed_form(&map, &x_star, &v_star, 0.0).map_err(|e| e.to_string())?;
        match (lp, closed) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => worst = worst.max((a - b).abs()),
            (ExtReal::NegInf, ExtReal::NegInf) => neg_inf += 1,
            _ => mismatched_branches += 1,
        }
    }
    ensure(
        worst <= 1e-8 && mismatched_branches == 0,
        format!("50 instances ({neg_inf} at -inf), max |LP - closed form| = {worst:.3e}, {mismatched_branches} branch mismatches"),
    )
}

fn discrete_adjointness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=4);
        let intervals = rng.gen_range(k..=50);
        let h = rng.gen_range(0.01..1.0);
        let d = DifferenceOperator::new(k, intervals + 1, h).map_err(|e| e.to_string())?;
        let x: Vec<Vec<f64>> = (0..=intervals)
            .map(|_| vec![rng.gen_range(-1.0..1.0)])
            .collect();
        let y: Vec<Vec<f64>> = (0..d.len())
            .map(|_| vec![rng.gen_range(-1.0..1.0)])
            .collect();
        let dx = d.apply(&x);
        let dty = d
            .matrix()
            .tr_mul_vec(&y.iter().map(|v| v[0]).collect::<Vec<_>>());
        let lhs: f64 = dx.iter().zip(&y).map(|(a, b)| a[0] * b[0]).sum();
        let rhs: f64 = x.iter().zip(&dty).map(|(a, b)| a[0] * b).sum();
        let magnitude: f64 = dx
            .iter()
            .zip(&y)
            .map(|(a, b)| (a[0] * b[0]).abs())
            .sum::<f64>()
            .max(1.0);
        worst = worst.max((lhs - rhs).abs() / magnitude);
    }
    ensure(
        worst <= 1e-12,
        format!("100 grids, max relative |<Dx,y> - <x,Dᵀy>| = {worst:.3e}"),
    )
}

fn pfc_demo() -> Outcome {
    let spec = demo::pfc(demo::PFC_INTERVALS).map_err(|e| e.to_string())?;
    let primal = solve_primal(&spec).map_err(|e| e.to_string())?;
    let cert = extract_dual_certificate(&spec, &primal).map_err(|e| e.to_string())?;
    let r = check_polyhedral_conditions(&spec, &primal.trajectory, &cert, 1e-12, 1e-8)
        .map_err(|e| e.to_string())?;
    let gap = primal.value
        - evaluate_dual_functional(&spec, &cert)
            .map_err(|e| e.to_string())?
            .to_f64();
    ensure(
        r.nonnegativity.pass && r.complementarity.pass && gap.abs() <= 1e-6,
        format!(
            "value {:.6} (continuous {:.6}), min λ {:.3e}, complementarity {:.3e}, gap {gap:.3e}",
            primal.value,
            demo::pfc_continuous_solution(1.0),
            -r.nonnegativity.residual,
            r.complementarity.residual
        ),
    )
}

/// The first-order system written out by hand for the decay instance:
/// `-(x*_{i+1} - x*_i)/h - v*_i = Aᵀx*_{i+1}` with the maximum principle,
/// `v*_m ∈ K*_X`, and `(x*_0 + μ₀, -x*_N + μ_T) ∈ ∂f` with `μ ∈ K*_S`.
struct FirstOrderVerdict {
    adjoint: Vec<f64>,
    subgradient: Vec<f64>,
    pass: bool,
}

fn hand_first_order(
    spec: &dfi_core::transcription::ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
) -> FirstOrderVerdict {
    let SetValuedMap::LinearControl(f) = spec.dynamics() else {
        unreachable!()
    };
    let h = spec.step();
    let n_int = spec.intervals();
    let y = &cert.x_star;
    let mut pass = true;
    let mut adjoint = Vec::new();
    for i in 0..n_int {
        let lhs = -(y[i + 1][0] - y[i][0]) / h - cert.v_star[i][0];
        adjoint.push(lhs);
        pass &= (lhs - f.a()[(0, 0)] * y[i + 1][0]).abs() <= 1e-7;
        pass &= max_principle_gap(f, &y[i + 1], &traj.x[i], &traj.v[i], 1e-7).unwrap() <= 1e-7;
    }
    for (m, x) in traj.x.iter().enumerate() {
        let k_x = tangent_cone(spec.state_set(m), x, 1e-7).unwrap();
        pass &= dual_cone_membership(&k_x, &cert.v_star[m], 1e-7).unwrap();
    }
    let subgradient = vec![y[0][0] + cert.mu0[0], -y[n_int][0] + cert.mu_t[0]];
    pass &= subdiff_contains(spec.objective(), &traj.endpoints(), &subgradient, 1e-7).unwrap();
    let k_s = tangent_cone(spec.endpoint_set(), &traj.endpoints(), 1e-7).unwrap();
    pass &= dual_cone_membership(&k_s, &[cert.mu0[0], cert.mu_t[0]], 1e-7).unwrap();
    FirstOrderVerdict {
        adjoint,
        subgradient,
        pass,
    }
}

fn first_order_reduction() -> Outcome {
    let spec = demo::decay().map_err(|e| e.to_string())?;
    let primal = solve_primal(&spec).map_err(|e| e.to_string())?;
    let cert = extract_dual_certificate(&spec, &primal).map_err(|e| e.to_string())?;
    let mut shifted = cert.clone();
    shifted.x_star.iter_mut().for_each(|y| y[0] += 0.5);
    let variants = [
        ("extracted", cert.clone()),
        ("negated", cert.negated()),
        ("zero", DualCertificate::zeros(&spec)),
        ("shifted", shifted),
    ];
    let opts = VerifyOptions::default();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, c) in variants {
        let hand = hand_first_order(&spec, &primal.trajectory, &c);
        let p = euler_lagrange_arguments(&spec, &c).map_err(|e| e.to_string())?;
        let traces = adjoint_traces(&spec, &c).map_err(|e| e.to_string())?;
        let g = traces.subgradient(&c);
        let same_adjoint = p
            .iter()
            .zip(&hand.adjoint)
            .all(|(a, b)| (a[0] - b).abs() <= 1e-9 * b.abs().max(1.0));
        let same_sub = g
            .iter()
            .zip(&hand.subgradient)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0));
        let report = verify(&spec, &primal.trajectory, &c, &opts).map_err(|e| e.to_string())?;
        let module_pass = [
            ConditionId::A,
            ConditionId::B,
            ConditionId::C,
            ConditionId::D,
        ]
        .iter()
        .all(|id| report.entry(*id).is_some_and(|e| e.pass));
        ok &= same_adjoint && same_sub && module_pass == hand.pass;
        details.push(format!(
            "{name}: {}",
            if hand.pass { "holds" } else { "fails" }
        ));
    }
    ok &= details[0].ends_with("holds");
    ensure(ok, format!("agreement on {}", details.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("weak duality on random instances", weak_duality),
        ("strong duality on demo instances", strong_duality),
        ("decay instance closed form", decay_closed_form),
        ("third-order linear-control demo", ptl_demo),
        ("LAM Farkas form vs Hamiltonian definition", lam_consistency),
        ("LAM membership vs M_F equality", lemma_equivalence),
        ("M_F LP vs closed form", m_function_closed_form_check),
        (
            "discrete adjointness of difference operators",
            discrete_adjointness,
        ),
        ("fourth-order polyhedral demo", pfc_demo),
        (
            "first-order reduction of the certificate conditions",
            first_order_reduction,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} [{secs:.2} s]",
                    i + 1
                );
            }
        }
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
