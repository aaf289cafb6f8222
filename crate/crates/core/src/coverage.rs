//! State-transition coverage: which transitions of a [`SutSpec`] appear in
//! execution logs, overall and restricted to the user-model subset, and why
//! the rest were missed.
//!
//! Percentages are integers rounded half-up, `round(100 * part / whole)`.

use crate::sutsim::{LogEntry, ReasonCategory, SutSpec, TransitionId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverageError {
    #[error("log {log}, line {line}: {message}")]
    MalformedLine {
        log: usize,
        line: usize,
        message: String,
    },
}

/// `round(100 * part / whole)` with halves rounded up; 0 when `whole` is 0.
pub fn percent(part: usize, whole: usize) -> u32 {
    if whole == 0 {
        return 0;
    }
    let (part, whole) = (part as u128, whole as u128);
    ((200 * part + whole) / (2 * whole)) as u32
}

/// Parses one transition-log document (`SEQ\tid\tfrom\tto\ttrigger` lines).
pub fn parse_log(text: &str) -> Result<Vec<LogEntry>, (usize, String)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split('\t').collect();
            if fields.len() != 5 {
                return Err((i + 1, format!("expected 5 tab-separated fields, found {}", fields.len())));
            }
            let seq = fields[0]
                .parse()
                .map_err(|_| (i + 1, format!("bad sequence number `{}`", fields[0])))?;
            if fields[1].is_empty() {
                return Err((i + 1, "empty transition id".to_string()));
            }
            Ok(LogEntry {
                seq,
                transition: fields[1].into(),
                from: fields[2].into(),
                to: fields[3].into(),
                trigger: fields[4].to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownTransition {
    pub log: usize,
    pub line: usize,
    pub id: TransitionId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ingested {
    pub observed: BTreeSet<TransitionId>,
    /// Log entries naming transitions the SUT does not define.
    pub unknown: Vec<UnknownTransition>,
}

/// Union of SUT transitions seen across all logs.
pub fn ingest_logs<S: AsRef<str>>(spec: &SutSpec, logs: &[S]) -> Result<Ingested, CoverageError> {
    let known = spec.transition_ids();
    let mut out = Ingested::default();
    for (log, text) in logs.iter().enumerate() {
        let entries = parse_log(text.as_ref())
            .map_err(|(line, message)| CoverageError::MalformedLine { log, line, message })?;
        for (line, entry) in text
            .as_ref()
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(i, _)| i + 1)
            .zip(entries)
        {
            if known.contains(&entry.transition) {
                out.observed.insert(entry.transition);
            } else {
                out.unknown.push(UnknownTransition {
                    log,
                    line,
                    id: entry.transition,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonBreakdown {
    /// Every category, zero-filled.
    pub counts: BTreeMap<ReasonCategory, usize>,
    /// Sum of counts; a transition with several reasons counts once per reason.
    pub total: usize,
    pub percentages: BTreeMap<ReasonCategory, u32>,
    /// Not-covered transitions carrying no reason tag.
    pub unclassified: Vec<TransitionId>,
}

/// Breakdown from raw per-category counts.
pub fn breakdown_from_counts(counts: &BTreeMap<ReasonCategory, usize>) -> ReasonBreakdown {
    let counts: BTreeMap<ReasonCategory, usize> = ReasonCategory::ALL
        .into_iter()
        .map(|c| (c, counts.get(&c).copied().unwrap_or(0)))
        .collect();
    let total = counts.values().sum();
    let percentages = counts.iter().map(|(c, n)| (*c, percent(*n, total))).collect();
    ReasonBreakdown {
        counts,
        total,
        percentages,
        unclassified: Vec::new(),
    }
}

pub fn reason_breakdown(spec: &SutSpec, not_covered: &BTreeSet<TransitionId>) -> ReasonBreakdown {
    let mut counts = BTreeMap::new();
    let mut unclassified = Vec::new();
    for id in not_covered {
        let Some(t) = spec.transition(id) else { continue };
        if t.reasons.is_empty() {
            unclassified.push(id.clone());
        }
        for r in &t.reasons {
            *counts.entry(*r).or_insert(0) += 1;
        }
    }
    ReasonBreakdown {
        unclassified,
        ..breakdown_from_counts(&counts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub total_transitions: usize,
    pub covered: BTreeSet<TransitionId>,
    pub not_covered: BTreeSet<TransitionId>,
    pub overall_pct: u32,
    pub user_model_total: usize,
    pub user_model_covered: usize,
    pub user_model_pct: u32,
    pub reasons: ReasonBreakdown,
}

pub fn compute_coverage(spec: &SutSpec, observed: &BTreeSet<TransitionId>) -> CoverageReport {
    let all = spec.transition_ids();
    let covered: BTreeSet<TransitionId> = all.intersection(observed).cloned().collect();
    let not_covered: BTreeSet<TransitionId> = all.difference(&covered).cloned().collect();
    let user_model = spec.user_model_transitions();
    let user_model_covered = user_model.intersection(&covered).count();
    CoverageReport {
        total_transitions: all.len(),
        overall_pct: percent(covered.len(), all.len()),
        user_model_total: user_model.len(),
        user_model_covered,
        user_model_pct: percent(user_model_covered, user_model.len()),
        reasons: reason_breakdown(spec, &not_covered),
        covered,
        not_covered,
    }
}

impl CoverageReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text tables: coverage (FSM vs user model) and reasons.
    pub fn to_table(&self) -> String {
        let nc = self.not_covered.len();
        let um_nc = self.user_model_total - self.user_model_covered;
        let mut out = String::new();
        let _ = writeln!(out, "State transition coverage");
        let _ = writeln!(out, "{:<13}|{:^15}|{:^15}", "", "FSM", "User Model");
        let _ = writeln!(out, "{:-<13}+{:-<15}+{:-<15}", "", "", "");
        let row = |out: &mut String, label: &str, a: usize, ap: u32, b: usize, bp: u32| {
            let _ = writeln!(out, "{label:<13}|{a:>7} {ap:>4}%  |{b:>7} {bp:>4}%");
        };
        row(
            &mut out,
            "Covered",
            self.covered.len(),
            self.overall_pct,
            self.user_model_covered,
            self.user_model_pct,
        );
        row(
            &mut out,
            "Not Covered",
            nc,
            percent(nc, self.total_transitions),
            um_nc,
            percent(um_nc, self.user_model_total),
        );
        let full = |n: usize| if n == 0 { 0 } else { 100 };
        row(
            &mut out,
            "Total",
            self.total_transitions,
            full(self.total_transitions),
            self.user_model_total,
            full(self.user_model_total),
        );
        out.push('\n');
        out.push_str(&self.reasons.to_table());
        out
    }
}

impl ReasonBreakdown {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Reasons for lack of coverage");
        let _ = writeln!(out, "{:<32}| {:>5} | {:>4}", "Reason", "Count", "%");
        let _ = writeln!(out, "{:-<32}+{:-<7}+{:-<6}", "", "", "");
        for (category, count) in &self.counts {
            let _ = writeln!(
                out,
                "{:<32}| {:>5} | {:>3}%",
                category.label(),
                count,
                self.percentages[category]
            );
        }
        let _ = writeln!(out, "{:-<32}+{:-<7}+{:-<6}", "", "", "");
        let total_pct = if self.total == 0 { 0 } else { 100 };
        let _ = writeln!(out, "{:<32}| {:>5} | {:>3}%", "Total", self.total, total_pct);
        if !self.unclassified.is_empty() {
            let ids: Vec<&str> = self.unclassified.iter().map(|t| t.as_str()).collect();
            let _ = writeln!(out, "\nUnclassified (not covered, no reason tag): {}", ids.join(", "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sutsim::{SutState, SutTransition, Trigger};
    use ReasonCategory::*;

    fn transition(id: &str, user_model: bool, reasons: &[ReasonCategory]) -> SutTransition {
        SutTransition {
            id: id.into(),
            from: "S".into(),
            to: "S".into(),
            trigger: Trigger::Action(id.into()),
            guards: vec![],
            reasons: reasons.iter().copied().collect(),
            user_model,
        }
    }

    fn spec(transitions: Vec<SutTransition>) -> SutSpec {
        SutSpec {
            name: "t".into(),
            initial: "S".into(),
            states: vec![SutState {
                id: "S".into(),
                elements: vec![],
            }],
            transitions,
            handlers: vec![],
        }
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(percent(92, 194), 47);
        assert_eq!(percent(92, 95), 97);
        assert_eq!(percent(1, 2), 50);
        assert_eq!(percent(1, 8), 13); // 12.5
        assert_eq!(percent(0, 0), 0);
        assert_eq!(percent(3, 3), 100);
    }

    #[test]
    fn empty_observation() {
        let s = spec(vec![transition("a", true, &[]), transition("b", false, &[Timing])]);
        let r = compute_coverage(&s, &BTreeSet::new());
        assert_eq!((r.overall_pct, r.user_model_pct), (0, 0));
        assert_eq!(r.not_covered.len(), 2);
        assert_eq!(r.reasons.unclassified, vec![TransitionId::from("a")]);
    }

    #[test]
    fn multi_reason_counts_once_per_reason() {
        let s = spec(vec![transition("a", false, &[AccessToken, ExternalService])]);
        let r = compute_coverage(&s, &BTreeSet::new());
        assert_eq!(r.not_covered.len(), 1);
        assert_eq!(r.reasons.total, 2);
    }

    #[test]
    fn ingest_unions_and_flags_unknowns() {
        let s = spec(vec![transition("t1", true, &[]), transition("t2", true, &[])]);
        let none: [&str; 0] = [];
        assert!(ingest_logs(&s, &none).unwrap().observed.is_empty());
        let got = ingest_logs(
            &s,
            &["1\tt1\tS\tS\taction:t1\n", "1\tt2\tS\tS\taction:t2\n2\tzz\tS\tS\taction:x\n"],
        )
        .unwrap();
        assert_eq!(got.observed, ["t1", "t2"].into_iter().map(TransitionId::from).collect());
        assert_eq!(
            got.unknown,
            vec![UnknownTransition {
                log: 1,
                line: 2,
                id: "zz".into()
            }]
        );
    }

    #[test]
    fn malformed_lines_carry_position() {
        let s = spec(vec![]);
        assert_eq!(
            ingest_logs(&s, &["1\tt1\tS\tS\taction:t1\n", "\nx\tt1\tS\tS\ta\n"]),
            Err(CoverageError::MalformedLine {
                log: 1,
                line: 2,
                message: "bad sequence number `x`".into()
            })
        );
        assert!(ingest_logs(&s, &["1\tt1\tS"]).is_err());
    }

    #[test]
    fn breakdown_is_zero_filled() {
        let b = breakdown_from_counts(&BTreeMap::from([(Timing, 2)]));
        assert_eq!(b.counts.len(), 6);
        assert_eq!(b.total, 2);
        assert_eq!(b.percentages[&Timing], 100);
        assert_eq!(b.percentages[&AccessToken], 0);
    }
}
