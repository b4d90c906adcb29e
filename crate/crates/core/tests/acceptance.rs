//! Acceptance suite. Runs each criterion in turn, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mixlab::counterfeit::{
    distinguishing_experiment, grover_embedding_query_experiment, hiding_soundness_check,
    label_scanning_counterfeiter, reference_counterfeiter, solve_component_superposition_via_counterfeiter,
    PointChoice, Tester,
};
use mixlab::experiment::{run_results, ExperimentConfig};
use mixlab::instances::{
    make_coset_mixer, make_graph_iso_mixer, make_grover_mixer, make_layered_instance, make_offset_mixer,
    GroverStep, LayeredVariant, PointFunction,
};
use mixlab::protocols::{
    build_qma_witness, run_am_mbcp, run_coam_mbcp, run_qma_mc, sd_reduction_mbcp, sd_reduction_scp, Merlin,
};
use mixlab::quantum::{
    average_mixer_matrix, component_projector_matrix, component_state, measure_component_projector, trace_distance,
    QuantumState, Register,
};
use mixlab::verify::{connectivity_report, verify_instant_mixing, verify_no_cross_mixing};
use mixlab::{Bits, GroundTruthPartition, MixerOracle, Mode, QuerySession};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn offset(n: u32, components: Vec<Vec<u64>>) -> (MixerOracle, GroundTruthPartition) {
    let truth = GroundTruthPartition::from_components(n, components).unwrap();
    (make_offset_mixer(&truth).unwrap(), truth)
}

fn contiguous(n: u32, sizes: &[u64]) -> (MixerOracle, GroundTruthPartition) {
    let mut next = 0;
    let comps = sizes
        .iter()
        .map(|&k| {
            let c: Vec<u64> = (next..next + k).collect();
            next += k;
            c
        })
        .collect();
    offset(n, comps)
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok { Ok(()) } else { Err(what.into()) }
}

fn exact_families() -> Vec<(String, MixerOracle, GroundTruthPartition)> {
    let mut out = Vec::new();
    for (n, comps) in [
        (2, vec![vec![0, 1], vec![2], vec![3]]),
        (3, vec![vec![0, 3, 5], vec![1, 6], vec![7]]),
        (3, vec![vec![0, 1, 2, 3, 4, 5, 6, 7]]),
        (4, vec![vec![0, 5, 9, 12, 15], vec![1, 2], vec![3, 4, 6, 7, 8, 10, 11]]),
    ] {
        let (m, t) = offset(n, comps);
        out.push((format!("offset n={n} sizes={:?}", t.component_sizes()), m, t));
    }
    for v in 2..=4 {
        let (m, t) = make_graph_iso_mixer(v).unwrap();
        out.push((format!("graphiso v={v}"), m, t));
    }
    for (modulus, gens) in [(8u64, vec![2u64]), (12, vec![4, 6]), (16, vec![1]), (15, vec![5])] {
        let (m, t) = make_coset_mixer(modulus, &gens).unwrap();
        out.push((format!("coset Z_{modulus} <{gens:?}>"), m, t));
    }
    out
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for (name, m, t) in exact_families() {
        check(verify_no_cross_mixing(&m, &t), format!("{name}: cross mixing"))?;
        let r = verify_instant_mixing(&m, &t, 0);
        check(r.exact && r.max_tv == 0.0, format!("{name}: TV {} (exact={})", r.max_tv, r.exact))?;
        checked += 1;
    }
    for n in 2..=4 {
        let (m, t) = make_grover_mixer(PointFunction::zero(n), GroverStep::Additive).unwrap();
        let r = verify_instant_mixing(&m, &t, 0);
        check(r.max_tv == 0.0, format!("grover g=0 n={n}: TV {}", r.max_tv))?;
    }
    let (m, t) = make_grover_mixer(PointFunction::point(4, 11).unwrap(), GroverStep::Additive).unwrap();
    let point_tv = verify_instant_mixing(&m, &t, 0).max_tv;
    Ok(format!(
        "{checked} exact mixers with TV 0; grover g=0 TV 0; grover n=4 point TV {point_tv:.4} (threshold {:.4})",
        2f64.powi(-6)
    ))
}

fn criterion_2() -> Outcome {
    let mut cases: Vec<(String, MixerOracle, GroundTruthPartition)> = exact_families()
        .into_iter()
        .filter(|(_, _, t)| t.n() <= 4)
        .collect();
    for n in 2..=4 {
        for g in [PointFunction::zero(n), PointFunction::point(n, (1 << n) - 1).unwrap(), PointFunction::point(n, 0).unwrap()]
        {
            for step in [GroverStep::Additive, GroverStep::Xor] {
                let (m, t) = make_grover_mixer(g, step).unwrap();
                cases.push((format!("grover n={n} {g} {step:?}"), m, t));
            }
        }
    }
    let (base, base_truth) = offset(2, vec![vec![0, 1], vec![2]]);
    for variant in [
        LayeredVariant::Row0,
        LayeredVariant::Row(1),
        LayeredVariant::Row(3),
        LayeredVariant::Nowhere,
        LayeredVariant::Grover(PointFunction::zero(2)),
        LayeredVariant::Grover(PointFunction::point(2, 2).unwrap()),
    ] {
        let inst = make_layered_instance(&base, &base_truth, 0, variant).unwrap();
        cases.push((format!("layered n=2 {variant:?}"), inst.mixer().clone(), inst.truth().clone()));
        let hidden = inst.hide_with(&mixlab::instances::Hiding::random(4, &mut ChaCha8Rng::seed_from_u64(3))).unwrap();
        cases.push((format!("hidden layered n=2 {variant:?}"), hidden.mixer().clone(), hidden.truth().clone()));
    }
    let (mut same, mut cross) = (0, 0);
    for (name, m, t) in &cases {
        let r = connectivity_report(m, t);
        check(r.holds(), format!("{name}: {r:?}"))?;
        same += r.same_pairs;
        cross += r.cross_pairs;
    }
    Ok(format!("{} instances; {same} same-component pairs all connected, {cross} cross pairs never", cases.len()))
}

fn criterion_3() -> Outcome {
    let mut cases: Vec<(String, MixerOracle, GroundTruthPartition)> =
        exact_families().into_iter().filter(|(_, _, t)| t.n() <= 3).collect();
    let (m, t) = make_grover_mixer(PointFunction::zero(3), GroverStep::Additive).unwrap();
    cases.push(("grover n=3 g=0".into(), m, t));
    let mut calls = 0;
    let mut worst_matrix = 0.0f64;
    let mut worst_prob = 0.0f64;
    let mut worst_fid = 1.0f64;
    for (name, m, t) in &cases {
        let avg = average_mixer_matrix(m).unwrap();
        let full = (avg.clone() - component_projector_matrix(t, true)).camax();
        let no_garbage = component_projector_matrix(t, false);
        let mut s_block = 0.0f64;
        for &a in t.members() {
            for &b in t.members() {
                s_block = s_block.max((avg[(a as usize, b as usize)] - no_garbage[(a as usize, b as usize)]).norm());
            }
        }
        worst_matrix = worst_matrix.max(full).max(s_block);
        check(full <= 1e-10 && s_block <= 1e-10, format!("{name}: matrix defect {full:e} / {s_block:e}"))?;

        let reg = Register::qubits("A", t.n());
        for &s in t.members() {
            let input = QuantumState::basis(vec![reg.clone()], &[s as usize]).unwrap();
            let want = 1.0 / t.component_containing(s).unwrap().len() as f64;
            for seed in 0..4 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut session = QuerySession::new(m);
                let out = measure_component_projector(&mut session, &input, 0, &mut rng).unwrap();
                calls += 1;
                let q = session.counts();
                check(q.controlled_m == 2, format!("{name}: {} controlled-M queries", q.controlled_m))?;
                worst_prob = worst_prob.max((out.probability_one - want).abs());
                worst_fid = worst_fid.min(out.b_fidelity);
                check(
                    (out.probability_one - want).abs() <= 1e-9,
                    format!("{name}, s={s}: P(1) = {} vs {want}", out.probability_one),
                )?;
                check(out.b_fidelity >= 1.0 - 1e-9, format!("{name}, s={s}: B fidelity {}", out.b_fidelity))?;
            }
        }
    }
    Ok(format!(
        "{} mixers, {calls} projector calls at 2 CM each; matrix defect {worst_matrix:.1e}, \
         |P(1) - 1/|C|| <= {worst_prob:.1e}, B fidelity >= {worst_fid:.12}",
        cases.len()
    ))
}

fn criterion_4() -> Outcome {
    let (m, t) = contiguous(3, &[4, 4]);
    let honest = run_am_mbcp(&m, &t, Merlin::Honest, 10_000, 41).map_err(|e| e.to_string())?;
    let a = honest.acceptance;
    check(a.at_least(0.75, 3.0), format!("honest {:.4} +- {:.4} below 3/4", a.estimate, a.confidence_halfwidth))?;
    let (m1, t1) = contiguous(3, &[8]);
    let cheat = run_am_mbcp(&m1, &t1, Merlin::OptimalCheat, 10_000, 42).map_err(|e| e.to_string())?;
    let c = cheat.acceptance;
    check(c.within(0.5, 3.0), format!("cheat {:.4} +- {:.4} not near 1/2", c.estimate, c.confidence_halfwidth))?;
    check(c.at_most(0.625, 3.0), format!("cheat {:.4} above 5/8", c.estimate))?;
    Ok(format!(
        "honest {:.4} +- {:.4} (>= 0.75 - 3ci); optimal cheat {:.4} +- {:.4} (1/2 +- 3ci, <= 5/8 + 3ci)",
        a.estimate, a.confidence_halfwidth, c.estimate, c.confidence_halfwidth
    ))
}

fn criterion_5() -> Outcome {
    let mut singles = Vec::new();
    for (name, (m, t)) in [
        ("offset [8]", contiguous(3, &[8])),
        ("offset [5]", contiguous(3, &[5])),
        ("coset Z_8 <1>", make_coset_mixer(8, &[1]).unwrap()),
    ] {
        let r = run_coam_mbcp(&m, &t, 10_000, 51).map_err(|e| e.to_string())?;
        check(r.acceptance.successes == 10_000, format!("{name}: {} of 10000 accepted", r.acceptance.successes))?;
        singles.push(name);
    }
    let (m, t) = contiguous(3, &[4, 4]);
    let r = run_coam_mbcp(&m, &t, 10_000, 52).map_err(|e| e.to_string())?;
    let a = r.acceptance;
    check(a.at_most(0.5, 3.0), format!("balanced {:.4} above 1/2 + 3ci", a.estimate))?;
    Ok(format!(
        "single component accepted 10000/10000 on {singles:?}; balanced {:.4} +- {:.4} (<= 1/2 + 3ci)",
        a.estimate, a.confidence_halfwidth
    ))
}

fn criterion_6() -> Outcome {
    let (m, t) = contiguous(3, &[3, 2, 3]);
    let witness = build_qma_witness(&t, 1, 3).unwrap();
    let r = run_qma_mc(&m, &witness, 10_000, 61).map_err(|e| e.to_string())?;
    let a = r.acceptance;
    check(a.within(0.5, 3.0), format!("valid witness {:.4} +- {:.4}", a.estimate, a.confidence_halfwidth))?;

    let mut worst = 0.0f64;
    let regs = vec![Register::qubits("A1", 3), Register::qubits("A2", 3)];
    for (name, (m1, t1)) in [("offset [8]", contiguous(3, &[8])), ("coset Z_8 <3>", make_coset_mixer(8, &[3]).unwrap())] {
        let s1 = component_state(&t1, 0).unwrap();
        let mut witnesses = vec![
            s1.tensor(&s1).unwrap(),
            QuantumState::basis(regs.clone(), &[0, 5]).unwrap(),
            QuantumState::basis(regs.clone(), &[6, 6]).unwrap(),
        ];
        let amps: Vec<_> = (0..64)
            .map(|k| num_complex::Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        witnesses.push(QuantumState::normalized(regs.clone(), amps).unwrap());
        for (k, w) in witnesses.iter().enumerate() {
            let r = run_qma_mc(&m1, w, 2_500, 62 + k as u64).map_err(|e| e.to_string())?;
            let a = r.acceptance;
            worst = worst.max(a.estimate);
            check(a.at_most(1e-6, 3.0), format!("{name}, witness {k}: accepted {:.4}", a.estimate))?;
        }
    }
    Ok(format!(
        "valid witness {:.4} +- {:.4} (1/2 +- 3ci); single-component instances accept at most {worst:.4}",
        a.estimate, a.confidence_halfwidth
    ))
}

fn criterion_7() -> Outcome {
    let (m, t) = offset(3, vec![vec![0, 3, 5], vec![1, 6], vec![2, 4, 7]]);
    for &a in t.members() {
        for &b in t.members() {
            let sd = sd_reduction_scp(&m, a, b).unwrap();
            let want = if t.same_component(a, b) { 0.0 } else { 1.0 };
            check(sd == want, format!("scp({a},{b}) = {sd}"))?;
        }
    }
    let mut single = Vec::new();
    for (name, (m, t)) in [
        ("offset [8]", contiguous(3, &[8])),
        ("offset [6]", contiguous(3, &[6])),
        ("coset Z_8 <1>", make_coset_mixer(8, &[1]).unwrap()),
        ("offset n=2 [3]", contiguous(2, &[3])),
    ] {
        let est = sd_reduction_mbcp(&m, &t, 0, 0).unwrap();
        check(est.exact && est.value <= 2f64.powi(-(t.n() as i32)), format!("{name}: SD {}", est.value))?;
        single.push(est.value);
    }
    let mut balanced = Vec::new();
    for (name, (m, t)) in [
        ("offset [4,4]", contiguous(3, &[4, 4])),
        ("offset [2,2,2,2]", contiguous(3, &[2, 2, 2, 2])),
        ("offset [3,3]", contiguous(3, &[3, 3])),
        ("coset Z_8 <2>", make_coset_mixer(8, &[2]).unwrap()),
        ("graphiso v=3", make_graph_iso_mixer(3).unwrap()),
    ] {
        let est = sd_reduction_mbcp(&m, &t, 0, 0).unwrap();
        check(est.exact && est.value >= 0.75, format!("{name}: SD {}", est.value))?;
        balanced.push(est.value);
    }
    let lo = balanced.iter().cloned().fold(1.0, f64::min);
    let hi = single.iter().cloned().fold(0.0, f64::max);
    Ok(format!("SCP pairs 0/1 exactly; single-component SD <= {hi:e}; balanced SD >= {lo:.4}"))
}

fn criterion_8() -> Outcome {
    let (m, t) = offset(3, vec![vec![0, 2, 5], vec![1, 6], vec![3, 4, 7]]);
    let reference = reference_counterfeiter(1_000_000);
    let mut worst = 0.0f64;
    for (k, &s) in t.members().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(80 + k as u64);
        let out = solve_component_superposition_via_counterfeiter(&m, &t, s, &reference, &mut rng)
            .map_err(|e| e.to_string())?;
        let want = component_state(&t, s).unwrap().density().unwrap();
        let td = trace_distance(&out.column, &want).unwrap();
        worst = worst.max(td);
        check(td <= 1e-6, format!("solve from s={s}: trace distance {td:e}"))?;
    }

    let (m2, t2) = offset(2, vec![vec![0, 1], vec![2]]);
    let sound = hiding_soundness_check(&m2, &t2, 0, &reference, 256, 81).map_err(|e| e.to_string())?;
    check(sound.holds(), format!("hiding soundness {sound:?}"))?;

    let dist = distinguishing_experiment(&m, &t, 0, &reference, 10_000, 82, PointChoice::Uniform)
        .map_err(|e| e.to_string())?;
    check(dist.failures == 0, format!("{} reference runs failed", dist.failures))?;
    check(dist.distance <= 0.05, format!("reference distance {}", dist.distance))?;
    check(
        dist.g_queries_total == 2 * dist.evaluations_total,
        format!("g queries {} for {} evaluations", dist.g_queries_total, dist.evaluations_total),
    )?;

    let foil = label_scanning_counterfeiter(64);
    let foil_dist = distinguishing_experiment(&m, &t, 0, &foil, 2_000, 83, PointChoice::Uniform)
        .map_err(|e| e.to_string())?;
    check(foil_dist.distance > 0.05, format!("full-scan foil distance only {}", foil_dist.distance))?;

    let inst = make_layered_instance(&m, &t, 0, LayeredVariant::Grover(PointFunction::point(3, 5).unwrap())).unwrap();
    check(inst.mixer().cost(Mode::Coherent).g_queries == 2, "coherent mixer evaluation cost")?;
    check(inst.label().cost(Mode::Coherent).g_queries == 2, "coherent label evaluation cost")?;
    check(inst.mixer().cost(Mode::Classical).g_queries == 1, "classical mixer evaluation cost")?;
    let mut session = QuerySession::new(inst.mixer()).with_label(inst.label()).with_mode(Mode::Coherent);
    let x = Bits::new(inst.start(), 6).unwrap();
    let i = Bits::new(inst.mixer().identity_index(), inst.mixer().index_width()).unwrap();
    session.apply(i, x).unwrap();
    session.label(x).unwrap();
    check(session.counts().g_queries == 4, format!("two coherent evaluations cost {} g queries", session.counts().g_queries))?;

    Ok(format!(
        "solve TD <= {worst:.1e}; hiding soundness {}/{} transcripts equal; reference distance {:.4} \
         (hidden frame {:.4}); full-scan foil distance {:.4}; {} g queries for {} coherent evaluations",
        sound.transcripts_equal,
        sound.hidings_checked,
        dist.distance,
        dist.hidden_distance,
        foil_dist.distance,
        dist.g_queries_total,
        dist.evaluations_total
    ))
}

/// The Grover case formula written out independently: step by i unless the
/// source or the target is marked.
fn grover_case(n: u32, marked: Option<u64>, i: u64, x: u64, forward: bool) -> u64 {
    let size = 1u64 << n;
    let y = if forward { (x + i) % size } else { (x + size - i) % size };
    if Some(x) == marked || Some(y) == marked { x } else { y }
}

fn criterion_9() -> Outcome {
    let g = PointFunction::point(2, 0b11).unwrap();
    let (m, t) = make_grover_mixer(g, GroverStep::Additive).unwrap();
    check(m.apply(0b01, 0b00) == 0b01, "apply(01, 00)")?;
    check(m.apply(0b01, 0b10) == 0b10, "apply(01, 10)")?;
    check(m.apply_inverse(0b01, 0b01) == 0b00, "apply_inverse(01, 01)")?;
    check(t.components() == [vec![0b00, 0b01, 0b10], vec![0b11]], format!("components {:?}", t.components()))?;
    for marked in [None, Some(0), Some(1), Some(2), Some(3)] {
        let g = marked.map_or(PointFunction::zero(2), |y| PointFunction::point(2, y).unwrap());
        let (m, _) = make_grover_mixer(g, GroverStep::Additive).unwrap();
        for i in 0..4 {
            for x in 0..4 {
                check(m.apply(i, x) == grover_case(2, marked, i, x, true), format!("{g}: apply({i},{x})"))?;
                check(
                    m.apply_inverse(i, x) == grover_case(2, marked, i, x, false),
                    format!("{g}: apply_inverse({i},{x})"),
                )?;
            }
        }
    }
    let mut lines = Vec::new();
    for q in [1u64, 16, 256] {
        let r = grover_embedding_query_experiment(10, Tester::Random { queries: q }, 10_000, 90 + q)
            .map_err(|e| e.to_string())?;
        check(
            r.success.at_most(r.bound, 3.0),
            format!("q={q}: success {:.4} above bound {:.4}", r.success.estimate, r.bound),
        )?;
        check(r.g_queries_per_trial_max == 2 * q, format!("q={q}: {} g queries per trial", r.g_queries_per_trial_max))?;
        lines.push(format!("q={q} {:.4}<={:.4}", r.success.estimate, r.bound));
    }
    Ok(format!("n=2 case analysis matches on all (g, i, x); tester success {}", lines.join(", ")))
}

fn criterion_10() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut seen = std::collections::BTreeSet::new();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    for path in &paths {
        let text = std::fs::read_to_string(path).unwrap();
        let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.trials = cfg.trials.min(300);
        let first = serde_json::to_string(&run_results(&cfg).map_err(|e| e.to_string())?).unwrap();
        let again = serde_json::to_string(&run_results(&cfg).map_err(|e| e.to_string())?).unwrap();
        let pooled = serde_json::to_string(&pool.install(|| run_results(&cfg)).map_err(|e| e.to_string())?).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        check(first == again, format!("{name}: rerun differs"))?;
        check(first == pooled, format!("{name}: 3-thread run differs"))?;
        seen.insert(cfg.experiment.clone());
    }
    let missing: Vec<_> = mixlab::experiment::EXPERIMENTS
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| !seen.contains(*n))
        .collect();
    check(missing.is_empty(), format!("no config exercises {missing:?}"))?;
    Ok(format!("{} configs covering {} experiments byte-identical across reruns and thread counts", paths.len(), seen.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 10] = [
        (1, "mixer definition", Some(Duration::from_secs(10)), criterion_1),
        (2, "full connectivity", Some(Duration::from_secs(30)), criterion_2),
        (3, "projector algorithm", Some(Duration::from_secs(20)), criterion_3),
        (4, "AM protocol", Some(Duration::from_secs(20)), criterion_4),
        (5, "co-AM protocol", Some(Duration::from_secs(20)), criterion_5),
        (6, "QMA protocol", Some(Duration::from_secs(60)), criterion_6),
        (7, "SD reductions", Some(Duration::from_secs(10)), criterion_7),
        (8, "counterfeiting reduction", Some(Duration::from_secs(300)), criterion_8),
        (9, "Grover embedding", Some(Duration::from_secs(60)), criterion_9),
        (10, "determinism", None, criterion_10),
    ];
    let mut failed = 0;
    for (k, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.1?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("[criterion {k}] PASS {name} ({:.2}s): {detail}", took.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("[criterion {k}] FAIL {name} ({:.2}s): {detail}", took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
