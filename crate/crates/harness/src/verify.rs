//! Labelling, exhaustive verification and fault injection.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wmls_core::mls::{
    budget_report, verify_labelling, verify_vertex, Budget, CheckReport, Instance, LabelError, MixedLabelling, Scheme,
};

use crate::envelope::Witnessed;
use crate::schemes::{dispatch, BudgetConfig, SchemeTask};
use crate::HarnessError;

/// Serialised labelling: `{ "scheme": ..., "vertex": [...], "clique": [...], "local": [[...]] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelFile {
    pub instance: String,
    pub scheme: String,
    #[serde(flatten)]
    pub labels: MixedLabelling,
}

/// Outcome of verifying one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instance: String,
    pub scheme: String,
    pub n: usize,
    pub pass: bool,
    pub check: CheckReport,
    pub budget: Budget,
    /// Whether the measured slacks fit the configured budget.
    pub within_budget: bool,
    pub label_ms: f64,
    pub verify_ms: f64,
}

struct LabelTask;

impl SchemeTask for LabelTask {
    type Output = Result<(String, MixedLabelling), LabelError>;
    fn run<S: Scheme>(self, scheme: &S, inst: &Instance<S::Witness>) -> Self::Output {
        Ok((scheme.name(), scheme.label(inst)?))
    }
}

/// Labels an instance with its scheme.
pub fn label_instance(w: &Witnessed, cfg: &BudgetConfig) -> Result<LabelFile, HarnessError> {
    let (scheme, labels) = dispatch(w, cfg, LabelTask)??;
    Ok(LabelFile {
        instance: w.name.clone(),
        scheme,
        labels,
    })
}

struct VerifyTask<'a> {
    name: &'a str,
    labels: Option<&'a MixedLabelling>,
}

impl SchemeTask for VerifyTask<'_> {
    type Output = Result<VerifyReport, LabelError>;
    fn run<S: Scheme>(self, scheme: &S, inst: &Instance<S::Witness>) -> Self::Output {
        let start = Instant::now();
        let owned;
        let labels = match self.labels {
            Some(l) => l,
            None => {
                inst.validate()?;
                owned = scheme.label(inst)?;
                &owned
            }
        };
        let label_ms = start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        let check = verify_labelling(scheme, inst, labels);
        let verify_ms = start.elapsed().as_secs_f64() * 1e3;
        let budget = scheme.budget(inst.n());
        Ok(VerifyReport {
            instance: self.name.to_string(),
            scheme: scheme.name(),
            n: inst.n(),
            pass: check.pass,
            within_budget: check.budget.within(&budget, 0.0),
            check,
            budget,
            label_ms,
            verify_ms,
        })
    }
}

/// Labels (unless `labels` is given) and verifies every adjacency pair,
/// every identity triple and injectivity against the instance itself.
pub fn verify_instance(
    w: &Witnessed,
    cfg: &BudgetConfig,
    labels: Option<&MixedLabelling>,
) -> Result<VerifyReport, HarnessError> {
    Ok(dispatch(
        w,
        cfg,
        VerifyTask {
            name: &w.name,
            labels,
        },
    )??)
}

/// Outcome of a fault-injection run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultReport {
    pub flips: usize,
    pub detected: usize,
    /// Flips that went unnoticed: `(vertex, bit)`.
    pub silent: Vec<(usize, usize)>,
}

/// Flips bit `bit` of the label of vertex `v`.
pub fn flip_bit(labels: &mut MixedLabelling, v: usize, bit: usize) {
    let mut bits = labels.vertex[v].bits().to_vec();
    bits[bit] = !bits[bit];
    labels.vertex[v] = wmls_core::codes::BitLabel::from_bits(bits);
}

struct FaultTask {
    flips: usize,
    seed: u64,
}

impl SchemeTask for FaultTask {
    type Output = Result<FaultReport, LabelError>;
    fn run<S: Scheme>(self, scheme: &S, inst: &Instance<S::Witness>) -> Self::Output {
        let mut labels = scheme.label(inst)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut report = FaultReport {
            flips: 0,
            detected: 0,
            silent: Vec::new(),
        };
        let candidates: Vec<usize> = (0..inst.n()).filter(|&v| !labels.vertex[v].is_empty()).collect();
        if inst.n() < 2 || candidates.is_empty() {
            return Ok(report);
        }
        for _ in 0..self.flips {
            let v = candidates[rng.gen_range(0..candidates.len())];
            let bit = rng.gen_range(0..labels.vertex[v].len());
            flip_bit(&mut labels, v, bit);
            let check = verify_vertex(scheme, inst, &labels, v);
            flip_bit(&mut labels, v, bit);
            report.flips += 1;
            if check.pass {
                report.silent.push((v, bit));
            } else {
                report.detected += 1;
            }
        }
        Ok(report)
    }
}

/// Flips `flips` random single bits of random vertex labels, one at a time,
/// and re-checks every condition that involves the corrupted label.
pub fn fault_injection(w: &Witnessed, cfg: &BudgetConfig, flips: usize, seed: u64) -> Result<FaultReport, HarnessError> {
    Ok(dispatch(w, cfg, FaultTask { flips, seed })??)
}

struct SlackTask;

impl SchemeTask for SlackTask {
    type Output = Result<(MixedLabelling, wmls_core::mls::BudgetReport, Budget), LabelError>;
    fn run<S: Scheme>(self, scheme: &S, inst: &Instance<S::Witness>) -> Self::Output {
        let l = scheme.label(inst)?;
        let report = budget_report(inst, &l);
        Ok((l, report, scheme.budget(inst.n())))
    }
}

/// Labels and measures label lengths without verifying.
pub fn measure(
    w: &Witnessed,
    cfg: &BudgetConfig,
) -> Result<(MixedLabelling, wmls_core::mls::BudgetReport, Budget), HarnessError> {
    Ok(dispatch(w, cfg, SlackTask)??)
}
