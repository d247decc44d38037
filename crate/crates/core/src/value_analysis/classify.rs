use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};

use super::conflicts::{pair_difference, Quantity};
use super::{InconsistencyClass, InconsistencyRecord};

pub const DEFAULT_STALENESS_DAYS: i64 = 180;

/// Split a conflict into a majority and the rest, then decide between an
/// invalidity and a timeliness candidate.
///
/// Values agree when their relative difference is within `rel_tol`. The
/// largest agreeing group is the majority; ties go to the group holding the
/// most recently revised page, and a tie on that as well leaves the record
/// an invalidity candidate. The record becomes a timeliness candidate when
/// every minority page was last revised more than `staleness_days` before
/// the oldest majority page.
pub fn classify(
    record: &InconsistencyRecord,
    revisions: &BTreeMap<String, DateTime<Utc>>,
    rel_tol: f64,
    staleness_days: i64,
) -> InconsistencyRecord {
    let mut out = record.clone();
    out.class = InconsistencyClass::InvalidityCandidate;
    out.evidence.revisions = record
        .values
        .keys()
        .filter_map(|l| revisions.get(l).map(|t| (l.clone(), *t)))
        .collect();

    let quantities: Vec<(&String, Quantity)> = record
        .values
        .iter()
        .filter_map(|(l, v)| Some((l, Quantity::of(v.parsed()?)?)))
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, (_, q)) in quantities.iter().enumerate() {
        let slot = groups.iter().position(|g| {
            g.iter()
                .all(|&j| pair_difference(q, &quantities[j].1).is_some_and(|d| d <= rel_tol))
        });
        match slot {
            Some(g) => groups[g].push(i),
            None => groups.push(vec![i]),
        }
    }
    if groups.len() < 2 {
        return out;
    }

    let newest = |g: &Vec<usize>| {
        g.iter()
            .filter_map(|&i| revisions.get(quantities[i].0))
            .max()
            .copied()
    };
    groups.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| newest(b).cmp(&newest(a)))
    });
    if groups[0].len() == groups[1].len() && newest(&groups[0]) == newest(&groups[1]) {
        out.evidence.rationale = format!("{}; no majority value", record.evidence.rationale);
        return out;
    }

    let langs = |g: &[usize]| {
        g.iter()
            .map(|&i| quantities[i].0.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let majority = &groups[0];
    let minority: Vec<usize> = groups[1..].iter().flatten().copied().collect();
    let oldest_majority = majority
        .iter()
        .filter_map(|&i| revisions.get(quantities[i].0))
        .min();
    let newest_minority = minority
        .iter()
        .filter_map(|&i| revisions.get(quantities[i].0))
        .max();

    match (oldest_majority, newest_minority) {
        (Some(old), Some(new)) if *old - *new > Duration::days(staleness_days) => {
            out.class = InconsistencyClass::TimelinessCandidate;
            out.evidence.rationale = format!(
                "majority [{}] agrees; minority [{}] last revised {} days before the majority",
                langs(majority),
                langs(&minority),
                (*old - *new).num_days()
            );
        }
        _ => {
            out.evidence.rationale = format!(
                "majority [{}] disagrees with [{}] on pages revised within {} days of each other",
                langs(majority),
                langs(&minority),
                staleness_days
            );
        }
    }
    out
}
