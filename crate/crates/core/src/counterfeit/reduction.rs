//! The reduction from COMPONENT SUPERPOSITION to counterfeiting, and the
//! rho_0 versus rho_point experiment that justifies it.

use serde::Serialize;
use serde_json::{json, Value};

use crate::counterfeit::algorithms::Counterfeiter;
use crate::error::Result;
use crate::instances::{make_layered_instance, Hiding, LayeredInstance, LayeredVariant, PointFunction};
use crate::oracle::{MixerOracle, Mode, QueryCounts, QuerySession};
use crate::partition::GroundTruthPartition;
use crate::quantum::{trace_distance, DensityAccumulator, DensityMatrix, QuantumState, Register};
use crate::stats::{mix_seed, run_trials, trial_rng};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct CounterfeitOutput {
    /// The counterfeiter's output with the hiding undone, over 2n qubits.
    pub unhidden: QuantumState,
    /// Reduced state of the last n qubits.
    pub column: DensityMatrix,
    pub queries: QueryCounts,
}

fn run_alg(
    inst: &LayeredInstance,
    alg: &dyn Counterfeiter,
    rng: &mut dyn rand::RngCore,
) -> Result<(QuantumState, QueryCounts)> {
    let mut session = QuerySession::new(inst.mixer())
        .with_label(inst.label())
        .with_mode(Mode::Coherent)
        .with_budget(alg.budget());
    let out = alg.run(&mut session, inst.start(), rng)?;
    Ok((out, *session.counts()))
}

fn unhide(inst: &LayeredInstance, state: &QuantumState) -> QuantumState {
    match inst.hiding() {
        Some(h) => state.permute_basis(|x| h.pi_inv(x as u64) as usize),
        None => state.clone(),
    }
}

fn last_n_qubits(n: u32, state: &QuantumState) -> Result<DensityMatrix> {
    state
        .split_register(0, Register::qubits("R", n), Register::qubits("Z", n))?
        .reduced(&[1])
}

/// Runs `alg` on the row-0 embedding hidden behind `hiding`, undoes `pi`,
/// and returns the last n qubits.
pub fn solve_with_hiding(
    base: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    alg: &dyn Counterfeiter,
    hiding: &Hiding,
    rng: &mut dyn rand::RngCore,
) -> Result<CounterfeitOutput> {
    let inst = make_layered_instance(base, truth, s, LayeredVariant::Row0)?.hide_with(hiding)?;
    let (out, queries) = run_alg(&inst, alg, rng)?;
    let unhidden = unhide(&inst, &out);
    let column = last_n_qubits(truth.n(), &unhidden)?;
    Ok(CounterfeitOutput { unhidden, column, queries })
}

/// The full reduction with fresh uniform `pi`, `sigma`.
pub fn solve_component_superposition_via_counterfeiter<R: Rng>(
    base: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    alg: &dyn Counterfeiter,
    rng: &mut R,
) -> Result<CounterfeitOutput> {
    let hiding = Hiding::random(2 * truth.n(), rng);
    solve_with_hiding(base, truth, s, alg, &hiding, rng)
}

/// How the marked row of the point function is chosen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointChoice {
    Uniform,
    Fixed(u64),
}

#[derive(Debug, Clone)]
pub struct DistinguishingReport {
    pub counterfeiter: String,
    pub trials: u64,
    pub seed: u64,
    /// Averages of the un-hidden outputs (pi^-1 applied).
    pub rho0: DensityMatrix,
    pub rho_point: DensityMatrix,
    pub distance: f64,
    /// Same comparison on the raw outputs the counterfeiter produced.
    pub hidden_distance: f64,
    pub g_queries_max: u64,
    pub g_queries_total: u64,
    pub evaluations_total: u64,
    pub base_queries_total: u64,
    pub failures: u64,
}

impl DistinguishingReport {
    pub fn to_json(&self) -> Value {
        let diag = |rho: &DensityMatrix| (0..rho.dim()).map(|k| rho.matrix()[(k, k)].re).collect::<Vec<_>>();
        json!({
            "counterfeiter": self.counterfeiter,
            "trials": self.trials,
            "seed": self.seed,
            "distance": self.distance,
            "hidden_distance": self.hidden_distance,
            "g_queries_max": self.g_queries_max,
            "g_queries_total": self.g_queries_total,
            "evaluations_total": self.evaluations_total,
            "base_queries_total": self.base_queries_total,
            "failures": self.failures,
            "rho0_diagonal": diag(&self.rho0),
            "rho_point_diagonal": diag(&self.rho_point),
        })
    }
}

struct TrialOutput {
    hidden: Option<QuantumState>,
    plain: Option<QuantumState>,
    counts: QueryCounts,
}

fn one_side(
    base: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    g: PointFunction,
    alg: &dyn Counterfeiter,
    rng: &mut dyn rand::RngCore,
) -> Result<TrialOutput> {
    let hiding = Hiding::random(2 * truth.n(), rng);
    let inst = make_layered_instance(base, truth, s, LayeredVariant::Grover(g))?.hide_with(&hiding)?;
    let mut session = QuerySession::new(inst.mixer())
        .with_label(inst.label())
        .with_mode(Mode::Coherent)
        .with_budget(alg.budget());
    match alg.run(&mut session, inst.start(), rng) {
        Ok(out) => Ok(TrialOutput { plain: Some(unhide(&inst, &out)), hidden: Some(out), counts: *session.counts() }),
        Err(crate::error::MixError::BudgetExhausted { .. }) => {
            Ok(TrialOutput { hidden: None, plain: None, counts: *session.counts() })
        }
        Err(e) => Err(e),
    }
}

/// Estimates rho_0 (g = 0) and rho_point (g a point function) by Monte
/// Carlo over fresh `pi`, `sigma` per run, seeded from `(seed, trial)`.
/// Runs that exhaust the counterfeiter's budget are counted as failures and
/// left out of the averages.
pub fn distinguishing_experiment(
    base: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    alg: &dyn Counterfeiter,
    trials: u64,
    seed: u64,
    points: PointChoice,
) -> Result<DistinguishingReport> {
    let n = truth.n();
    let runs = run_trials(trials, seed, |_, rng| -> Result<(TrialOutput, TrialOutput)> {
        let zero = one_side(base, truth, s, PointFunction::zero(n), alg, rng)?;
        let y = match points {
            PointChoice::Uniform => rng.random_range(0..1u64 << n),
            PointChoice::Fixed(y) => y,
        };
        let point = one_side(base, truth, s, PointFunction::point(n, y)?, alg, rng)?;
        Ok((zero, point))
    });
    let regs = vec![Register::qubits("X", 2 * n)];
    let (mut plain0, mut plain1) = (DensityAccumulator::new(regs.clone()), DensityAccumulator::new(regs.clone()));
    let (mut hid0, mut hid1) = (DensityAccumulator::new(regs.clone()), DensityAccumulator::new(regs));
    let mut g_queries_max = 0;
    let mut totals = QueryCounts::default();
    let mut failures = 0;
    for run in runs {
        let (zero, point) = run?;
        for (side, plain, hidden) in [(zero, &mut plain0, &mut hid0), (point, &mut plain1, &mut hid1)] {
            g_queries_max = g_queries_max.max(side.counts.g_queries);
            totals.add(&side.counts);
            match (side.plain, side.hidden) {
                (Some(p), Some(h)) => {
                    plain.add_pure(&p)?;
                    hidden.add_pure(&h)?;
                }
                _ => failures += 1,
            }
        }
    }
    if plain0.count() == 0 || plain1.count() == 0 {
        return Err(crate::error::MixError::BudgetExhausted { budget: alg.budget().unwrap_or(0) });
    }
    let rho0 = plain0.finish()?;
    let rho_point = plain1.finish()?;
    let distance = trace_distance(&rho0, &rho_point)?;
    let hidden_distance = trace_distance(&hid0.finish()?, &hid1.finish()?)?;
    Ok(DistinguishingReport {
        counterfeiter: alg.name(),
        trials,
        seed,
        rho0,
        rho_point,
        distance,
        hidden_distance,
        g_queries_max,
        g_queries_total: totals.g_queries,
        evaluations_total: totals.evaluations(),
        base_queries_total: totals.base_queries,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HidingSoundness {
    pub hidings_checked: u64,
    pub transcripts_equal: u64,
    pub outputs_equal: u64,
}

impl HidingSoundness {
    pub fn holds(&self) -> bool {
        self.transcripts_equal == self.hidings_checked && self.outputs_equal == self.hidings_checked
    }
}

/// Runs `alg` on the row-0 and the nowhere embeddings hidden by the same
/// `(pi, sigma)`, with the same internal randomness, and compares every
/// oracle answer and the output.
pub fn hiding_soundness_check(
    base: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    alg: &dyn Counterfeiter,
    samples: u64,
    seed: u64,
) -> Result<HidingSoundness> {
    let row0 = make_layered_instance(base, truth, s, LayeredVariant::Row0)?;
    let nowhere = make_layered_instance(base, truth, s, LayeredVariant::Nowhere)?;
    let alg_seed = mix_seed(seed, 1);
    let results = run_trials(samples, seed, |k, rng| -> Result<(bool, bool)> {
        let hiding = Hiding::random(2 * truth.n(), rng);
        let mut seen = Vec::new();
        for inst in [&row0, &nowhere] {
            let hidden = inst.hide_with(&hiding)?;
            let mut session = QuerySession::new(hidden.mixer())
                .with_label(hidden.label())
                .with_mode(Mode::Coherent)
                .with_budget(alg.budget())
                .recording();
            let out = alg.run(&mut session, hidden.start(), &mut trial_rng(alg_seed, k))?;
            seen.push((session.transcript().to_vec(), out));
        }
        Ok((seen[0].0 == seen[1].0, seen[0].1 == seen[1].1))
    });
    let mut report = HidingSoundness { hidings_checked: samples, transcripts_equal: 0, outputs_equal: 0 };
    for r in results {
        let (t, o) = r?;
        report.transcripts_equal += t as u64;
        report.outputs_equal += o as u64;
    }
    Ok(report)
}
