//! JSON-configured experiments, shared by the CLI and the tests.
//!
//! A config names an instance, one experiment, a trial count and a seed:
//!
//! ```json
//! {
//!   "instance": {"family": "offset", "n": 3, "sizes": [4, 4]},
//!   "experiment": "am",
//!   "trials": 10000,
//!   "seed": 1,
//!   "params": {"merlin": "honest"}
//! }
//! ```

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counterfeit::{
    distinguishing_experiment, grover_embedding_query_experiment, hiding_soundness_check,
    label_scanning_counterfeiter, reference_counterfeiter, solve_component_superposition_via_counterfeiter,
    Counterfeiter, PointChoice, Tester,
};
use crate::error::{invalid, MixError, Result};
use crate::instances::{BuiltInstance, InstanceSpec};
use crate::oracle::{Mode, QuerySession};
use crate::protocols::{
    build_qma_witness, run_am_mbcp, run_coam_mbcp, run_qma_mc, sd_reduction_mbcp, sd_reduction_scp,
    predicate_probability, Merlin,
};
use crate::quantum::{
    average_mixer_matrix, component_projector_matrix, component_state, component_superposition_via_projection,
    measure_component_projector, trace_distance, QuantumState, Register,
};
use crate::stats::{mix_seed, run_trials, trial_rng, EstimatedProbability};
use crate::verify::{connectivity_report, first_cross_mixing, first_round_trip_failure, verify_instant_mixing};

pub const SCHEMA: u32 = 1;

/// Experiment names with the config fields each one reads, alphabetized.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("am", "instance, trials, seed; params.merlin = honest | optimal_cheat"),
    ("coam", "instance, trials, seed"),
    ("counterfeit", "instance (base), trials, seed; params.s, params.counterfeiter, params.scan_count, params.point, params.hiding_samples; budgets.counterfeiter"),
    ("grover-embed", "instance (grover), trials, seed; params.tester = {kind: random, queries} | {kind: exhaustive}"),
    ("projector-demo", "instance, trials, seed; params.s"),
    ("qma", "instance, trials, seed; params.components = [k1, k2] | params.basis = [x1, x2]"),
    ("sd-mbcp", "instance, seed; params.samples"),
    ("sd-scp", "instance, seed; params.s, params.t"),
    ("verify-mixer", "instance, seed"),
];

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterfeiter: Option<u64>,
}

fn default_trials() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub experiment: String,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Budgets>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
}

fn line_of(text: &str, needle: &str) -> Option<usize> {
    text.lines().position(|l| l.contains(needle)).map(|k| k + 1)
}

impl ExperimentConfig {
    /// Parses and checks a config; errors carry `line L, column C`.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| MixError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if !EXPERIMENTS.iter().any(|(name, _)| *name == cfg.experiment) {
            let line = line_of(text, "\"experiment\"").unwrap_or(1);
            return Err(MixError::Config(format!(
                "line {line}: unknown experiment {:?} (see list-experiments)",
                cfg.experiment
            )));
        }
        if let Err(MixError::Config(msg)) = cfg.check_params() {
            let line = line_of(text, "\"params\"").unwrap_or(1);
            return Err(MixError::Config(format!("line {line}: {msg}")));
        }
        Ok(cfg)
    }

    fn params<T: DeserializeOwned + Default>(&self) -> Result<T> {
        match &self.params {
            None => Ok(T::default()),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| MixError::Config(format!("params for {}: {e}", self.experiment))),
        }
    }

    fn check_params(&self) -> Result<()> {
        match self.experiment.as_str() {
            "am" => self.params::<AmParams>().map(drop),
            "qma" => self.params::<QmaParams>().map(drop),
            "sd-scp" => self.params::<SdScpParams>().map(drop),
            "sd-mbcp" => self.params::<SdMbcpParams>().map(drop),
            "projector-demo" => self.params::<ProjectorParams>().map(drop),
            "counterfeit" => self.params::<CounterfeitParams>().map(drop),
            "grover-embed" => self.params::<GroverParams>().map(drop),
            _ => self.params::<NoParams>().map(drop),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmParams {
    #[serde(default = "honest")]
    merlin: Merlin,
}

fn honest() -> Merlin {
    Merlin::Honest
}

impl Default for AmParams {
    fn default() -> Self {
        AmParams { merlin: Merlin::Honest }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QmaParams {
    components: Option<[usize; 2]>,
    basis: Option<[u64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdScpParams {
    s: Option<u64>,
    t: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdMbcpParams {
    samples: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectorParams {
    s: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CounterfeiterKind {
    #[default]
    Reference,
    LabelScanning,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterfeitParams {
    s: Option<u64>,
    #[serde(default)]
    counterfeiter: CounterfeiterKind,
    scan_count: Option<u64>,
    point: Option<u64>,
    hiding_samples: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroverParams {
    tester: Tester,
}

impl Default for GroverParams {
    fn default() -> Self {
        GroverParams { tester: Tester::Random { queries: 16 } }
    }
}

/// Versioned report. `results` depends only on the config and the library
/// version; `wall_time_seconds` is the only nondeterministic field.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub results: Value,
    pub wall_time_seconds: f64,
}

/// Builds the instance and runs the configured experiment.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let results = run_results(config)?;
    Ok(ExperimentReport {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// The deterministic payload of [`run`].
pub fn run_results(config: &ExperimentConfig) -> Result<Value> {
    let inst = config.instance.build()?;
    let spec = serde_json::to_value(&config.instance).expect("spec serializes");
    let (trials, seed) = (config.trials, config.seed);
    match config.experiment.as_str() {
        "verify-mixer" => verify_mixer(&inst, seed),
        "am" => {
            let p: AmParams = config.params()?;
            Ok(run_am_mbcp(&inst.oracle, &inst.truth, p.merlin, trials, seed)?.to_json(&spec))
        }
        "coam" => Ok(run_coam_mbcp(&inst.oracle, &inst.truth, trials, seed)?.to_json(&spec)),
        "qma" => qma(&inst, config.params()?, trials, seed, &spec),
        "sd-scp" => sd_scp(&inst, config.params()?),
        "sd-mbcp" => {
            let p: SdMbcpParams = config.params()?;
            let sd = sd_reduction_mbcp(&inst.oracle, &inst.truth, p.samples.unwrap_or(10_000), seed)?;
            Ok(json!({
                "statistical_difference": sd,
                "components": inst.truth.component_count(),
                "predicate_probability_independent": predicate_probability(&inst.truth),
            }))
        }
        "projector-demo" => projector_demo(&inst, config.params()?, trials, seed),
        "counterfeit" => counterfeit(&inst, config, config.params()?),
        "grover-embed" => {
            let p: GroverParams = config.params()?;
            let InstanceSpec::Grover { n, .. } = config.instance else {
                return Err(MixError::Config("grover-embed needs a grover instance (for n)".into()));
            };
            let r = grover_embedding_query_experiment(n, p.tester, trials, seed)?;
            Ok(serde_json::to_value(r).expect("report serializes"))
        }
        other => Err(MixError::Config(format!("unknown experiment {other:?}"))),
    }
}

fn verify_mixer(inst: &BuiltInstance, seed: u64) -> Result<Value> {
    let (oracle, truth) = (&inst.oracle, &*inst.truth);
    let cross = first_cross_mixing(oracle, truth);
    Ok(json!({
        "n": truth.n(),
        "element_count": oracle.element_count(),
        "index_count": oracle.index_count(),
        "components": truth.component_count(),
        "component_sizes": truth.component_sizes(),
        "no_cross_mixing": cross.is_none(),
        "first_cross_mixing": cross,
        "first_round_trip_failure": first_round_trip_failure(oracle),
        "mixing": verify_instant_mixing(oracle, truth, seed),
        "connectivity": connectivity_report(oracle, truth),
        "label_valid": inst.layered.as_ref().map(|l| l.label_valid()),
    }))
}

fn qma(inst: &BuiltInstance, p: QmaParams, trials: u64, seed: u64, spec: &Value) -> Result<Value> {
    let truth = &*inst.truth;
    let n = truth.n();
    let witness = match (p.components, p.basis) {
        (Some([k1, k2]), None) => build_qma_witness(truth, k1, k2)?,
        (None, Some([x1, x2])) => QuantumState::basis(
            vec![Register::qubits("A1", n), Register::qubits("A2", n)],
            &[x1 as usize, x2 as usize],
        )?,
        (None, None) if truth.component_count() >= 2 => build_qma_witness(truth, 1, 2)?,
        (None, None) => {
            let m = truth.members();
            QuantumState::basis(
                vec![Register::qubits("A1", n), Register::qubits("A2", n)],
                &[m[0] as usize, m[m.len() - 1] as usize],
            )?
        }
        _ => return Err(MixError::Config("give at most one of params.components, params.basis".into())),
    };
    Ok(run_qma_mc(&inst.oracle, &witness, trials, seed)?.to_json(spec))
}

fn sd_scp(inst: &BuiltInstance, p: SdScpParams) -> Result<Value> {
    let m = inst.truth.members();
    let s = p.s.unwrap_or(m[0]);
    let t = p.t.unwrap_or(m[m.len() - 1]);
    Ok(json!({
        "s": s,
        "t": t,
        "same_component": inst.truth.same_component(s, t),
        "statistical_difference": sd_reduction_scp(&inst.oracle, s, t)?,
    }))
}

#[derive(Serialize)]
struct ProjectorTrial {
    outcome: bool,
    probability_one: f64,
    b_fidelity: f64,
    post_fidelity: Option<f64>,
    controlled_m: u64,
    ind_queries: u64,
}

fn projector_demo(inst: &BuiltInstance, p: ProjectorParams, trials: u64, seed: u64) -> Result<Value> {
    let (oracle, truth) = (&inst.oracle, &*inst.truth);
    let s = p.s.unwrap_or(truth.members()[0]);
    let target = component_state(truth, s)?;
    let input = QuantumState::basis(vec![Register::qubits("A", truth.n())], &[s as usize])?;
    let runs = run_trials(trials, seed, |_, rng| -> Result<ProjectorTrial> {
        let mut session = QuerySession::new(oracle);
        let out = measure_component_projector(&mut session, &input, 0, rng)?;
        let c = session.counts();
        Ok(ProjectorTrial {
            outcome: out.outcome,
            probability_one: out.probability_one,
            b_fidelity: out.b_fidelity,
            post_fidelity: if out.outcome { Some(out.state.fidelity(&target)?) } else { None },
            controlled_m: c.controlled_m,
            ind_queries: c.prepare_ind + c.project_ind,
        })
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let accepted = runs.iter().filter(|r| r.outcome).count() as u64;
    let min_b = runs.iter().map(|r| r.b_fidelity).fold(1.0, f64::min);
    let min_post = runs.iter().filter_map(|r| r.post_fidelity).fold(1.0, f64::min);
    let cm: Vec<u64> = runs.iter().map(|r| r.controlled_m).collect();

    let avg = average_mixer_matrix(oracle)?;
    let proj = component_projector_matrix(truth, true);
    let defect = (&avg - &proj).camax();
    let idempotence = (&proj * &proj - &proj).camax();

    let mut rng = trial_rng(mix_seed(seed, 2), 0);
    let mut session = QuerySession::new(oracle);
    let comp = truth.component_containing(s).map_or(1, |c| c.len()) as u64;
    let repeat = component_superposition_via_projection(&mut session, s, 64 * comp, &mut rng)?;
    let repeat_distance = trace_distance(&repeat.state.density()?, &target.density()?)?;

    Ok(json!({
        "s": s,
        "component_size": comp,
        "expected_probability_one": 1.0 / comp as f64,
        "probability_one": runs.first().map(|r| r.probability_one),
        "acceptance": EstimatedProbability::from_counts(accepted, trials.max(1)),
        "min_b_fidelity": min_b,
        "min_post_fidelity": min_post,
        "controlled_m_per_call": [cm.iter().min(), cm.iter().max()],
        "ind_queries_per_call": runs.first().map(|r| r.ind_queries),
        "average_mixer_vs_projector_max_entry": defect,
        "projector_idempotence_defect": idempotence,
        "repeat_until_success": {"attempts": repeat.attempts, "trace_distance": repeat_distance},
    }))
}

fn counterfeit(inst: &BuiltInstance, config: &ExperimentConfig, p: CounterfeitParams) -> Result<Value> {
    if inst.layered.is_some() {
        return Err(MixError::Config("counterfeit takes the base instance; the layering is built per trial".into()));
    }
    let (oracle, truth) = (&inst.oracle, &*inst.truth);
    let s = p.s.unwrap_or(truth.members()[0]);
    let budget = config.budgets.as_ref().and_then(|b| b.counterfeiter).unwrap_or(1_000_000);
    let alg: Box<dyn Counterfeiter> = match p.counterfeiter {
        CounterfeiterKind::Reference => Box::new(reference_counterfeiter(budget)),
        CounterfeiterKind::LabelScanning => {
            let mut a = label_scanning_counterfeiter(p.scan_count.unwrap_or(1u64 << (2 * truth.n())));
            a.budget = Some(budget);
            Box::new(a)
        }
    };
    let points = match p.point {
        None => PointChoice::Uniform,
        Some(y) if y >> truth.n() == 0 => PointChoice::Fixed(y),
        Some(y) => return Err(invalid(format!("point {y} does not fit in {} bits", truth.n()))),
    };
    let mut rng = trial_rng(mix_seed(config.seed, 3), 0);
    let solved = solve_component_superposition_via_counterfeiter(oracle, truth, s, alg.as_ref(), &mut rng)?;
    let solve_distance = trace_distance(&solved.column, &component_state(truth, s)?.density()?)?;
    let report = distinguishing_experiment(oracle, truth, s, alg.as_ref(), config.trials, config.seed, points)?;
    let soundness =
        hiding_soundness_check(oracle, truth, s, alg.as_ref(), p.hiding_samples.unwrap_or(64), mix_seed(config.seed, 4))?;
    Ok(json!({
        "s": s,
        "solve": {
            "trace_distance_to_component": solve_distance,
            "queries": solved.queries,
            "mode": Mode::Coherent,
        },
        "distinguishing": report.to_json(),
        "hiding_soundness": {"report": soundness, "holds": soundness.holds()},
    }))
}

/// Process exit status for an error: 2 promise violation, 3 budget
/// exhausted, 1 anything else.
pub fn exit_code(err: &MixError) -> i32 {
    match err {
        MixError::PromiseViolation(_) => 2,
        MixError::BudgetExhausted { .. } => 3,
        _ => 1,
    }
}
