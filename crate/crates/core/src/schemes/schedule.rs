use std::fmt;

use serde::{Deserialize, Serialize};

use super::Scheme;

/// A real sequence indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SequenceSpec {
    Constant { value: f64 },
    Formula { kind: FormulaKind, params: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    /// `[scale, offset]`: `scale / (n + offset)`
    Harmonic,
    /// `[limit, amplitude, power]`: `limit + amplitude * n^(-power)`
    PowerDecay,
    /// `[odd, even]`
    Alternating,
    /// Explicit values; the last one repeats.
    Table,
}

impl SequenceSpec {
    pub fn constant(value: f64) -> Self {
        SequenceSpec::Constant { value }
    }

    pub fn formula(kind: FormulaKind, params: Vec<f64>) -> Self {
        SequenceSpec::Formula { kind, params }
    }

    fn check_params(&self) -> Result<(), String> {
        let SequenceSpec::Formula { kind, params } = self else {
            return Ok(());
        };
        let expected = match kind {
            FormulaKind::Harmonic | FormulaKind::Alternating => Some(2),
            FormulaKind::PowerDecay => Some(3),
            FormulaKind::Table => None,
        };
        match expected {
            Some(k) if params.len() != k => Err(format!("{kind:?} takes {k} parameters, got {}", params.len())),
            None if params.is_empty() => Err("table needs at least one value".into()),
            _ => Ok(()),
        }
    }

    /// Term `n >= 1`.
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            SequenceSpec::Constant { value } => *value,
            SequenceSpec::Formula { kind, params } => match kind {
                FormulaKind::Harmonic => params[0] / (n as f64 + params[1]),
                FormulaKind::PowerDecay => params[0] + params[1] * (n as f64).powf(-params[2]),
                FormulaKind::Alternating => {
                    if n % 2 == 1 {
                        params[0]
                    } else {
                        params[1]
                    }
                }
                FormulaKind::Table => params[(n - 1).min(params.len() - 1)],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub alpha_low: f64,
    pub beta_low: f64,
    pub beta_high: f64,
    pub r_low: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            alpha_low: 0.1,
            beta_low: 0.1,
            beta_high: 0.9,
            r_low: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub alpha: SequenceSpec,
    pub beta: SequenceSpec,
    pub r: SequenceSpec,
    #[serde(default)]
    pub bounds: Bounds,
}

impl Schedule {
    pub fn constant(alpha: f64, beta: f64, r: f64) -> Self {
        Schedule {
            alpha: SequenceSpec::constant(alpha),
            beta: SequenceSpec::constant(beta),
            r: SequenceSpec::constant(r),
            bounds: Bounds::default(),
        }
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    /// `(alpha_n, beta_n, r_n)`
    pub fn term(&self, n: usize) -> (f64, f64, f64) {
        (self.alpha.value(n), self.beta.value(n), self.r.value(n))
    }
}

/// The hypothesis a schedule failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    MalformedSequence,
    AlphaLowerBound,
    BetaBox,
    RLowerBound,
    MannAlpha,
    IshikawaOrder,
    TadaTakahashiAlpha,
}

impl Condition {
    pub fn statement(&self) -> &'static str {
        match self {
            Condition::MalformedSequence => "sequence terms must be finite and well-formed",
            Condition::AlphaLowerBound => "0 < alpha <= alpha_n <= 1",
            Condition::BetaBox => {
                "beta_n in [beta_low, beta_high] with 0 < beta_low <= beta_high < 1, so that liminf_{n->inf} beta_n(1-beta_n) > 0"
            }
            Condition::RLowerBound => "r_n >= r_low > 0, so that liminf_{n->inf} r_n > 0",
            Condition::MannAlpha => "0 <= alpha_n <= 1",
            Condition::IshikawaOrder => "0 <= beta_n <= alpha_n <= 1",
            Condition::TadaTakahashiAlpha => "alpha_n in [a, b] for some a, b in (0, 1), i.e. alpha_low <= alpha_n < 1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleViolation {
    pub condition: Condition,
    /// Offending index, or `None` when the bounds themselves are inadmissible.
    pub n: Option<usize>,
    pub value: f64,
    pub detail: String,
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schedule violates {}: ", self.condition.statement())?;
        match self.n {
            Some(n) => write!(f, "{} at n = {n} (value {})", self.detail, self.value),
            None => write!(f, "{} (value {})", self.detail, self.value),
        }
    }
}

impl std::error::Error for ScheduleViolation {}

/// A schedule whose first `horizon` terms satisfy the chosen scheme's
/// hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSchedule {
    schedule: Schedule,
    horizon: usize,
    advisories: Vec<String>,
}

impl ValidatedSchedule {
    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Finite-horizon warnings about asymptotic conditions that cannot be
    /// decided from finitely many terms.
    pub fn advisories(&self) -> &[String] {
        &self.advisories
    }

    pub fn term(&self, n: usize) -> (f64, f64, f64) {
        self.schedule.term(n)
    }
}

fn violation(condition: Condition, n: Option<usize>, value: f64, detail: impl Into<String>) -> ScheduleViolation {
    ScheduleViolation {
        condition,
        n,
        value,
        detail: detail.into(),
    }
}

fn check_sequences(s: &Schedule, horizon: usize) -> Result<(), ScheduleViolation> {
    for (name, seq) in [("alpha", &s.alpha), ("beta", &s.beta), ("r", &s.r)] {
        seq.check_params()
            .map_err(|e| violation(Condition::MalformedSequence, None, f64::NAN, format!("{name}: {e}")))?;
        for n in 1..=horizon {
            let value = seq.value(n);
            if !value.is_finite() {
                return Err(violation(Condition::MalformedSequence, Some(n), value, format!("{name}_n is not finite")));
            }
        }
    }
    Ok(())
}

fn check_r(s: &Schedule, horizon: usize) -> Result<(), ScheduleViolation> {
    let b = &s.bounds;
    if !(b.r_low > 0.0) {
        return Err(violation(Condition::RLowerBound, None, b.r_low, "r_low must be positive"));
    }
    for n in 1..=horizon {
        let r = s.r.value(n);
        if r < b.r_low {
            return Err(violation(Condition::RLowerBound, Some(n), r, format!("r_n below r_low = {}", b.r_low)));
        }
    }
    Ok(())
}

/// Checks the hypotheses of the modified Ishikawa scheme on terms
/// `1..=horizon`: `alpha_low <= alpha_n <= 1`, `beta_n` inside
/// `[beta_low, beta_high]` within `(0, 1)`, and `r_n >= r_low > 0`.
pub fn validate_schedule(s: &Schedule, horizon: usize) -> Result<ValidatedSchedule, ScheduleViolation> {
    check_sequences(s, horizon)?;
    let b = &s.bounds;
    if !(b.alpha_low > 0.0 && b.alpha_low <= 1.0) {
        return Err(violation(Condition::AlphaLowerBound, None, b.alpha_low, "alpha_low must lie in (0, 1]"));
    }
    if !(b.beta_low > 0.0 && b.beta_low <= b.beta_high && b.beta_high < 1.0) {
        return Err(violation(
            Condition::BetaBox,
            None,
            b.beta_high,
            format!("bounds [{}, {}] are not a box inside (0, 1)", b.beta_low, b.beta_high),
        ));
    }
    for n in 1..=horizon {
        let (alpha, beta, _) = s.term(n);
        if !(alpha >= b.alpha_low && alpha <= 1.0) {
            return Err(violation(
                Condition::AlphaLowerBound,
                Some(n),
                alpha,
                format!("alpha_n outside [{}, 1]", b.alpha_low),
            ));
        }
        if !(beta >= b.beta_low && beta <= b.beta_high) {
            let detail = format!(
                "beta_n outside [{}, {}]; beta_n(1-beta_n) = {}",
                b.beta_low,
                b.beta_high,
                beta * (1.0 - beta)
            );
            return Err(violation(Condition::BetaBox, Some(n), beta, detail));
        }
    }
    check_r(s, horizon)?;
    Ok(ValidatedSchedule {
        schedule: s.clone(),
        horizon,
        advisories: Vec::new(),
    })
}

/// Validates a schedule against the hypotheses of `scheme`. The projection
/// and full-step variants are validated after their forced substitutions
/// (`r_n = 1`, resp. `alpha_n = 1`).
pub fn validate_for(scheme: Scheme, s: &Schedule, horizon: usize) -> Result<ValidatedSchedule, ScheduleViolation> {
    let forced = scheme.forced_schedule(s);
    match scheme {
        Scheme::ModifiedIshikawa | Scheme::ProjectionIshikawa | Scheme::FullStepIshikawa => {
            validate_schedule(&forced, horizon)
        }
        Scheme::Mann => {
            check_sequences(&forced, horizon)?;
            for n in 1..=horizon {
                let alpha = forced.alpha.value(n);
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(violation(Condition::MannAlpha, Some(n), alpha, "alpha_n outside [0, 1]"));
                }
            }
            Ok(ValidatedSchedule {
                schedule: forced,
                horizon,
                advisories: Vec::new(),
            })
        }
        Scheme::Ishikawa => {
            check_sequences(&forced, horizon)?;
            for n in 1..=horizon {
                let (alpha, beta, _) = forced.term(n);
                if !(0.0 <= beta && beta <= alpha && alpha <= 1.0) {
                    return Err(violation(
                        Condition::IshikawaOrder,
                        Some(n),
                        beta,
                        format!("beta_n = {beta}, alpha_n = {alpha}"),
                    ));
                }
            }
            let advisories = ishikawa_advisories(&forced, horizon);
            Ok(ValidatedSchedule {
                schedule: forced,
                horizon,
                advisories,
            })
        }
        Scheme::TadaTakahashi => {
            check_sequences(&forced, horizon)?;
            let low = forced.bounds.alpha_low;
            if !(low > 0.0 && low < 1.0) {
                return Err(violation(Condition::TadaTakahashiAlpha, None, low, "alpha_low must lie in (0, 1)"));
            }
            for n in 1..=horizon {
                let alpha = forced.alpha.value(n);
                if !(alpha >= low && alpha < 1.0) {
                    return Err(violation(
                        Condition::TadaTakahashiAlpha,
                        Some(n),
                        alpha,
                        format!("alpha_n outside [{low}, 1)"),
                    ));
                }
            }
            check_r(&forced, horizon)?;
            Ok(ValidatedSchedule {
                schedule: forced,
                horizon,
                advisories: Vec::new(),
            })
        }
    }
}

/// Heuristics for `beta_n -> 1` and `sum (1-alpha_n)(1-beta_n) = inf`.
fn ishikawa_advisories(s: &Schedule, horizon: usize) -> Vec<String> {
    let mut notes = Vec::new();
    let last = s.beta.value(horizon);
    let mid = s.beta.value((horizon / 2).max(1));
    if last < mid || 1.0 - last > 0.1 {
        notes.push(format!(
            "beta_n does not appear to approach 1 (beta_{} = {mid}, beta_{horizon} = {last})",
            (horizon / 2).max(1)
        ));
    }
    let tail: f64 = ((horizon / 2).max(1)..=horizon)
        .map(|n| {
            let (alpha, beta, _) = s.term(n);
            (1.0 - alpha) * (1.0 - beta)
        })
        .sum();
    if tail < 1e-3 {
        notes.push(format!(
            "sum (1-alpha_n)(1-beta_n) appears to converge (second-half partial sum {tail:e})"
        ));
    }
    notes
}
