//! Timed plan text format: one step per line,
//! `<start>: (<name> <args...>) [<duration>]`, times in seconds with
//! three decimals on output. Comment lines starting with `;` and blank
//! lines are ignored on input.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::PddlError;
use crate::cost::ExtCost;

/// One scheduled step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedStep {
    pub start_s: f64,
    /// Parenthesized ground action, e.g. `(pick robot1 base_1 storage_1)`.
    pub action: String,
    pub duration_s: f64,
}

impl TimedStep {
    pub fn finish_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

/// A scheduled plan: steps sorted by start time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedPlan {
    pub steps: Vec<TimedStep>,
    pub makespan: f64,
    /// Sum of step costs; zero for plans parsed from text, which carries
    /// no cost column.
    pub total_cost: ExtCost,
}

impl TimedPlan {
    pub fn new(mut steps: Vec<TimedStep>, total_cost: ExtCost) -> Self {
        steps.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
        let makespan = steps.iter().map(|s| s.finish_s()).fold(0.0, f64::max);
        TimedPlan {
            steps,
            makespan,
            total_cost,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Parse plan text. Malformed lines error with their line number.
pub fn parse_plan(text: &str) -> Result<TimedPlan, PddlError> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = (idx + 1) as u32;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        steps.push(parse_line(line, lineno)?);
    }
    Ok(TimedPlan::new(steps, ExtCost::ZERO))
}

fn parse_line(line: &str, lineno: u32) -> Result<TimedStep, PddlError> {
    let bad = |msg: &str| PddlError::at(lineno, 1, format!("bad plan line: {msg}"));

    let (start_txt, rest) = line.split_once(':').ok_or_else(|| bad("missing `:`"))?;
    let start_s: f64 = start_txt
        .trim()
        .parse()
        .map_err(|_| bad("bad start time"))?;

    let rest = rest.trim();
    if !rest.starts_with('(') {
        return Err(bad("missing `(`"));
    }
    let close = rest.find(')').ok_or_else(|| bad("missing `)`"))?;
    let inner = rest[1..close].trim();
    if inner.is_empty() {
        return Err(bad("empty action"));
    }
    let action = format!(
        "({})",
        inner.split_whitespace().collect::<Vec<_>>().join(" ")
    );

    let tail = rest[close + 1..].trim();
    let dur_txt = tail
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| bad("missing `[duration]`"))?;
    let duration_s: f64 = dur_txt.trim().parse().map_err(|_| bad("bad duration"))?;

    if !start_s.is_finite() || start_s < 0.0 {
        return Err(bad("start time must be finite and non-negative"));
    }
    if !duration_s.is_finite() || duration_s < 0.0 {
        return Err(bad("duration must be finite and non-negative"));
    }
    Ok(TimedStep {
        start_s,
        action,
        duration_s,
    })
}

/// Canonical plan text: sorted by start time, 3-decimal fixed point.
pub fn emit_plan(plan: &TimedPlan) -> String {
    let mut sorted: Vec<&TimedStep> = plan.steps.iter().collect();
    sorted.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    let mut out = String::new();
    for s in sorted {
        out.push_str(&format!(
            "{:.3}: {} [{:.3}]\n",
            s.start_s, s.action, s.duration_s
        ));
    }
    out
}

/// Agent names mentioned by a step, given the step's op metadata is not
/// at hand: the caller supplies a lookup from action text instead. Used
/// by the validator via the grounded task, so nothing here.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_step() {
        let p = parse_plan("0.000: (move robot1 storage_1 workspace base_1) [10.000]\n").unwrap();
        assert_eq!(p.steps.len(), 1);
        assert_eq!(p.steps[0].start_s, 0.0);
        assert_eq!(p.steps[0].duration_s, 10.0);
        assert_eq!(
            p.steps[0].action,
            "(move robot1 storage_1 workspace base_1)"
        );
        assert_eq!(p.makespan, 10.0);
    }

    #[test]
    fn empty_text_is_empty_plan() {
        let p = parse_plan("").unwrap();
        assert!(p.is_empty());
        assert_eq!(p.makespan, 0.0);
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "2.5:  (b x) [1]\n0: (a y z)   [2.25]\n; comment\n";
        let p = parse_plan(text).unwrap();
        let emitted = emit_plan(&p);
        assert_eq!(emitted, "0.000: (a y z) [2.250]\n2.500: (b x) [1.000]\n");
        let p2 = parse_plan(&emitted).unwrap();
        assert_eq!(emit_plan(&p2), emitted);
        assert_eq!(p2.steps, p.steps);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let err = parse_plan("0.0: (a) [1.0]\nnot a line\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_plan("x: (a) [1]").is_err());
        assert!(parse_plan("0: a [1]").is_err());
        assert!(parse_plan("0: (a) 1").is_err());
        assert!(parse_plan("0: () [1]").is_err());
    }
}
