//! Correlators, adroitness bounds, the LG quantity and the verdict.
//!
//! Errors are standard errors across repetitions. Derived quantities combine
//! them in quadrature; they are reported next to the central values but the
//! verdict is decided on central values alone.

use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::oracle::{superoperator_correlators, superoperator_o3};
use crate::protocols::{outcomes, Basis, ExperimentPlan, PlanResult, ProtocolId, Role, ShotTable};
use crate::{Error, Result};

/// Mean ± standard error of one correlator over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_reps: usize,
}

/// A derived value with its propagated error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl From<CorrelatorEstimate> for Estimate {
    fn from(c: CorrelatorEstimate) -> Self {
        Estimate {
            value: c.mean,
            error: c.stderr,
        }
    }
}

fn quadrature(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>().sqrt()
}

/// Mean of `a·b` over the shots of one table.
pub fn table_correlator(table: &ShotTable, (a, b): (Role, Role)) -> Result<f64> {
    let decoded = outcomes(&table.counts, &table.roles)?;
    let mut sum = 0i64;
    let mut total = 0u64;
    for (values, n) in decoded {
        let va = values
            .get(a)
            .ok_or_else(|| Error::MissingRole(a.to_string()))?;
        let vb = values
            .get(b)
            .ok_or_else(|| Error::MissingRole(b.to_string()))?;
        sum += i64::from(va * vb) * n as i64;
        total += n;
    }
    if total == 0 {
        return Err(Error::NoShots);
    }
    Ok(sum as f64 / total as f64)
}

/// Cross-repetition mean and sample standard error (`s / √n`).
pub fn correlator(tables: &[ShotTable], pair: (Role, Role)) -> Result<CorrelatorEstimate> {
    if tables.len() < 2 {
        return Err(Error::InvalidPlan(format!(
            "a standard error needs at least 2 repetitions, got {}",
            tables.len()
        )));
    }
    let per_rep = tables
        .iter()
        .map(|t| table_correlator(t, pair))
        .collect::<Result<Vec<_>>>()?;
    let n = per_rep.len() as f64;
    let mean = per_rep.iter().sum::<f64>() / n;
    let var = per_rep.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(CorrelatorEstimate {
        mean,
        stderr: (var / n).sqrt(),
        n_reps: per_rep.len(),
    })
}

/// `|⟨O1O3⟩_x − ⟨O1O3⟩_a|`.
pub fn adroitness(est_x: &CorrelatorEstimate, est_a: &CorrelatorEstimate) -> Estimate {
    Estimate {
        value: (est_x.mean - est_a.mean).abs(),
        error: quadrature(&[est_x.stderr, est_a.stderr]),
    }
}

/// `c_a + c_12 + c_23 + 1`.
pub fn lg_quantity(
    c_a: &CorrelatorEstimate,
    c_12: &CorrelatorEstimate,
    c_23: &CorrelatorEstimate,
) -> Estimate {
    Estimate {
        value: c_a.mean + c_12.mean + c_23.mean + 1.0,
        error: quadrature(&[c_a.stderr, c_12.stderr, c_23.stderr]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ViolationEstablished,
    ViolationUnresolved,
    NoViolation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ViolationEstablished => "violation_established",
            Verdict::ViolationUnresolved => "violation_unresolved",
            Verdict::NoViolation => "no_violation",
        })
    }
}

/// Established iff `LG < 0` and `|LG| ≥ ε_total`, on central values.
pub fn verdict(lg: f64, eps_total: f64) -> Verdict {
    if lg >= 0.0 {
        Verdict::NoViolation
    } else if lg.abs() >= eps_total {
        Verdict::ViolationEstablished
    } else {
        Verdict::ViolationUnresolved
    }
}

/// `|⟨O1O3⟩_f − ⟨O1O3⟩_a|`. Diagnostic only.
pub fn no_signaling_check(c_f: &CorrelatorEstimate, c_a: &CorrelatorEstimate) -> Estimate {
    adroitness(c_f, c_a)
}

/// Smallest `O1O3 + O1O2 + O2O3 + 1` over the recorded shots of a protocol (f)
/// table. Any triple of ±1 values gives 0 or 4.
pub fn per_shot_minimum(table: &ShotTable) -> Result<i8> {
    let mut min = i8::MAX;
    for (v, _) in outcomes(&table.counts, &table.roles)? {
        let get = |r: Role| v.get(r).ok_or_else(|| Error::MissingRole(r.to_string()));
        let (o1, o2, o3) = (get(Role::O1)?, get(Role::O2)?, get(Role::O3)?);
        min = min.min(o1 * o3 + o1 * o2 + o2 * o3 + 1);
    }
    Ok(min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdroitnessReport {
    /// `⟨O1O3⟩` measured in protocols (b)–(e).
    pub c_b: CorrelatorEstimate,
    pub c_c: CorrelatorEstimate,
    pub c_d: CorrelatorEstimate,
    pub c_e: CorrelatorEstimate,
    pub eps_b: Estimate,
    pub eps_c: Estimate,
    pub eps_d: Estimate,
    pub eps_e: Estimate,
    pub eps_total: Estimate,
}

impl AdroitnessReport {
    pub fn new(c_a: &CorrelatorEstimate, c: [CorrelatorEstimate; 4]) -> Self {
        let eps = c.map(|x| adroitness(&x, c_a));
        Self {
            c_b: c[0],
            c_c: c[1],
            c_d: c[2],
            c_e: c[3],
            eps_b: eps[0],
            eps_c: eps[1],
            eps_d: eps[2],
            eps_e: eps[3],
            eps_total: Estimate {
                value: eps.iter().map(|e| e.value).sum(),
                error: quadrature(&eps.map(|e| e.error)),
            },
        }
    }

    pub fn eps(&self) -> [Estimate; 4] {
        [self.eps_b, self.eps_c, self.eps_d, self.eps_e]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LgReport {
    pub c_a: CorrelatorEstimate,
    pub c_12: CorrelatorEstimate,
    pub c_23: CorrelatorEstimate,
    pub lg: Estimate,
    pub eps_total: Estimate,
    pub verdict: Verdict,
}

impl LgReport {
    pub fn new(
        c_a: CorrelatorEstimate,
        c_12: CorrelatorEstimate,
        c_23: CorrelatorEstimate,
        eps_total: Estimate,
    ) -> Self {
        let lg = lg_quantity(&c_a, &c_12, &c_23);
        Self {
            c_a,
            c_12,
            c_23,
            lg,
            eps_total,
            verdict: verdict(lg.value, eps_total.value),
        }
    }
}

/// Noise-free quantum prediction at the plan's θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub c_a: f64,
    pub c_12: f64,
    pub c_23: f64,
    pub lg: f64,
    /// `⟨O1O3⟩` of protocols (b)–(e).
    pub adroit: [f64; 4],
    pub eps_total: f64,
}

impl Prediction {
    pub fn at(theta: f64) -> Self {
        let (c_a, c_12, c_23) = superoperator_correlators(theta);
        let adroit =
            [Basis::Z, Basis::Theta, Basis::Z, Basis::Theta].map(|b| superoperator_o3(theta, &[b]));
        Self {
            c_a,
            c_12,
            c_23,
            lg: c_a + c_12 + c_23 + 1.0,
            adroit,
            eps_total: adroit.iter().map(|x| (x - c_a).abs()).sum(),
        }
    }
}

/// Everything the program run produces, in machine-readable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramReport {
    pub plan: ExperimentPlan,
    pub lg: LgReport,
    pub adroitness: AdroitnessReport,
    /// `⟨O1O3⟩` estimated from protocol (f).
    pub c_13_f: CorrelatorEstimate,
    pub no_signaling: Estimate,
    /// Smallest per-shot `O1O3 + O1O2 + O2O3 + 1` seen in protocol (f).
    pub per_shot_minimum: i8,
    pub prediction: Prediction,
}

pub fn analyze(result: &PlanResult) -> Result<ProgramReport> {
    let o13 = (Role::O1, Role::O3);
    let c_a = correlator(result.tables(ProtocolId::A), o13)?;
    let c = [ProtocolId::B, ProtocolId::C, ProtocolId::D, ProtocolId::E]
        .map(|id| correlator(result.tables(id), o13));
    let [b, cc, d, e] = c;
    let adroitness = AdroitnessReport::new(&c_a, [b?, cc?, d?, e?]);

    let f = result.tables(ProtocolId::F);
    let c_12 = correlator(f, (Role::O1, Role::O2))?;
    let c_23 = correlator(f, (Role::O2, Role::O3))?;
    let c_13_f = correlator(f, o13)?;
    let per_shot_minimum = f
        .iter()
        .map(per_shot_minimum)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap_or(0);

    Ok(ProgramReport {
        plan: result.plan.clone(),
        lg: LgReport::new(c_a, c_12, c_23, adroitness.eps_total),
        adroitness,
        c_13_f,
        no_signaling: no_signaling_check(&c_13_f, &c_a),
        per_shot_minimum,
        prediction: Prediction::at(result.plan.theta),
    })
}

fn pm(e: Estimate) -> String {
    format!("{:.2} ± {:.2}", e.value, e.error)
}

/// The two result tables, rounded to two decimals.
pub fn render_tables(report: &ProgramReport) -> String {
    let lg = &report.lg;
    let ad = &report.adroitness;
    let p = &report.prediction;
    let mut out = String::new();
    let w = 20;
    let c = 16;

    let _ = writeln!(out, "The Leggett-Garg Quantity");
    let _ = writeln!(
        out,
        "{:<w$}{:>c$}{:>c$}{:>c$}{:>c$}",
        "", "<O1O3>_a", "<O1O2>_f", "<O2O3>_f", "LG"
    );
    let _ = writeln!(
        out,
        "{:<w$}{:>c$}{:>c$}{:>c$}{:>c$}",
        "Measured",
        pm(lg.c_a.into()),
        pm(lg.c_12.into()),
        pm(lg.c_23.into()),
        pm(lg.lg)
    );
    let _ = writeln!(
        out,
        "{:<w$}{:>c$.2}{:>c$.2}{:>c$.2}{:>c$.2}",
        "Quantum Prediction", p.c_a, p.c_12, p.c_23, p.lg
    );
    out.push('\n');

    let _ = writeln!(out, "Adroitness Test Results");
    let _ = writeln!(
        out,
        "{:<w$}{:>c$}{:>c$}{:>c$}{:>c$}{:>c$}",
        "", "<O1O3>_b", "<O1O3>_c", "<O1O3>_d", "<O1O3>_e", "eps_total"
    );
    let _ = writeln!(
        out,
        "{:<w$}{:>c$}{:>c$}{:>c$}{:>c$}{:>c$}",
        "Measured",
        pm(ad.c_b.into()),
        pm(ad.c_c.into()),
        pm(ad.c_d.into()),
        pm(ad.c_e.into()),
        pm(ad.eps_total)
    );
    let _ = writeln!(
        out,
        "{:<w$}{:>c$.2}{:>c$.2}{:>c$.2}{:>c$.2}{:>c$.2}",
        "Quantum Prediction", p.adroit[0], p.adroit[1], p.adroit[2], p.adroit[3], p.eps_total
    );
    out.push('\n');
    let _ = writeln!(out, "verdict: {}", lg.verdict);
    out
}
