//! Classical testers for MULTIPLE COMPONENTS on the Grover mixer, with
//! g-query metering.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{invalid, Result};
use crate::instances::{make_grover_mixer, GroverStep, PointFunction};
use crate::oracle::{QueryCounts, QuerySession};
use crate::stats::{run_trials, EstimatedProbability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Tester {
    /// `queries` applies at uniformly random (x, i); reports "multiple" iff
    /// some nonzero index fixed its input.
    Random { queries: u64 },
    /// Applies index 1 to every x.
    Exhaustive,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverEmbedReport {
    pub n: u32,
    pub tester: Tester,
    pub success: EstimatedProbability,
    /// Success restricted to point-function instances.
    pub detection: EstimatedProbability,
    pub bound: f64,
    pub g_queries_per_trial_max: u64,
    pub applies_per_trial_max: u64,
    pub totals: QueryCounts,
}

struct Outcome {
    is_point: bool,
    correct: bool,
    counts: QueryCounts,
}

fn says_multiple<R: Rng + ?Sized>(session: &mut QuerySession<'_>, n: u32, tester: Tester, rng: &mut R) -> Result<bool> {
    let probe = |session: &mut QuerySession<'_>, x: u64, i: u64| -> Result<bool> {
        let y = session.apply(Bits::new(i, n)?, Bits::new(x, n)?)?;
        Ok(i != 0 && y.value() == x)
    };
    match tester {
        Tester::Random { queries } => {
            let mut found = false;
            for _ in 0..queries {
                let x = rng.random_range(0..1u64 << n);
                let i = rng.random_range(1..1u64 << n);
                found |= probe(session, x, i)?;
            }
            Ok(found)
        }
        Tester::Exhaustive => {
            let mut found = false;
            for x in 0..1u64 << n {
                found |= probe(session, x, 1)?;
            }
            Ok(found)
        }
    }
}

/// Each trial flips a fair coin between g = 0 and a uniform point function,
/// builds the additive Grover mixer, and runs `tester` against it.
pub fn grover_embedding_query_experiment(n: u32, tester: Tester, trials: u64, seed: u64) -> Result<GroverEmbedReport> {
    if n == 0 || n > 20 {
        return Err(invalid("grover embedding needs 1 <= n <= 20"));
    }
    let runs = run_trials(trials, seed, |_, rng| -> Result<Outcome> {
        let is_point = rng.random::<bool>();
        let g = if is_point {
            PointFunction::point(n, rng.random_range(0..1u64 << n))?
        } else {
            PointFunction::zero(n)
        };
        let (oracle, _) = make_grover_mixer(g, GroverStep::Additive)?;
        let mut session = QuerySession::new(&oracle);
        let verdict = says_multiple(&mut session, n, tester, rng)?;
        Ok(Outcome { is_point, correct: verdict == is_point, counts: *session.counts() })
    });
    let mut totals = QueryCounts::default();
    let mut max = QueryCounts::default();
    let (mut correct, mut points, mut detected) = (0, 0, 0);
    for r in runs {
        let r = r?;
        totals.add(&r.counts);
        max = max.max(&r.counts);
        correct += r.correct as u64;
        if r.is_point {
            points += 1;
            detected += r.correct as u64;
        }
    }
    let q = match tester {
        Tester::Random { queries } => queries,
        Tester::Exhaustive => 1u64 << n,
    };
    Ok(GroverEmbedReport {
        n,
        tester,
        success: EstimatedProbability::from_counts(correct, trials),
        detection: EstimatedProbability::from_counts(detected, points.max(1)),
        bound: (0.5 + q as f64 * 2f64.powi(1 - n as i32)).min(1.0),
        g_queries_per_trial_max: max.g_queries,
        applies_per_trial_max: max.apply,
        totals,
    })
}
