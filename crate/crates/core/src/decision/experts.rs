use std::collections::{BTreeSet, HashSet};

use super::DecisionError;
use crate::invariant::{Coord, Interval, Tick};
use crate::lineproto::{content_lines, parse_ints, tokenize, LineError};

/// A person (or machine) that can be notified and assigned to incidents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StakeholderProfile {
    pub id: String,
    pub capabilities: BTreeSet<String>,
    availability: Vec<Interval>,
    pub location: (Coord, Coord),
    pub device: String,
}

impl StakeholderProfile {
    /// Fails when two availability intervals overlap.
    pub fn new<C: Into<String>>(
        id: impl Into<String>,
        capabilities: impl IntoIterator<Item = C>,
        mut availability: Vec<Interval>,
        location: (Coord, Coord),
        device: impl Into<String>,
    ) -> Result<Self, DecisionError> {
        let id = id.into();
        availability.sort();
        if let Some(w) = availability.windows(2).find(|w| w[0].overlaps(&w[1])) {
            return Err(DecisionError::Invalid(format!(
                "profile {id}: availability {}..{} overlaps {}..{}",
                w[0].start(),
                w[0].end(),
                w[1].start(),
                w[1].end()
            )));
        }
        Ok(StakeholderProfile {
            id,
            capabilities: capabilities.into_iter().map(Into::into).collect(),
            availability,
            location,
            device: device.into(),
        })
    }

    pub fn availability(&self) -> &[Interval] {
        &self.availability
    }

    pub fn is_available(&self, t: Tick) -> bool {
        self.availability.iter().any(|i| i.contains(t))
    }

    pub fn has_capability(&self, cap: &str) -> bool {
        self.capabilities.contains(cap)
    }

    fn distance_sq(&self, to: (Coord, Coord)) -> i128 {
        let dx = self.location.0 as i128 - to.0 as i128;
        let dy = self.location.1 as i128 - to.1 as i128;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incident {
    pub event_id: String,
    pub location: (Coord, Coord),
    pub required_capability: String,
    pub time: Tick,
}

/// Capable, available profiles ordered by Euclidean distance to the
/// incident, ties broken by id.
pub fn match_experts<'a>(
    incident: &Incident,
    profiles: &'a [StakeholderProfile],
) -> Vec<&'a StakeholderProfile> {
    let mut ranked: Vec<(i128, &StakeholderProfile)> = profiles
        .iter()
        .filter(|p| {
            p.has_capability(&incident.required_capability) && p.is_available(incident.time)
        })
        .map(|p| (p.distance_sq(incident.location), p))
        .collect();
    // squared distance orders the same as distance and stays exact
    ranked.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    ranked.into_iter().map(|(_, p)| p).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub incident: String,
    pub expert: Option<String>,
}

/// Greedy assignment: incidents in (time, id) order each take their
/// best-ranked expert not already taken.
pub fn resolve_assignments(
    incidents: &[Incident],
    profiles: &[StakeholderProfile],
) -> Vec<Assignment> {
    let mut order: Vec<&Incident> = incidents.iter().collect();
    order.sort_by(|a, b| {
        a.time
            .cmp(&b.time)
            .then_with(|| a.event_id.cmp(&b.event_id))
    });
    let mut taken: HashSet<&str> = HashSet::new();
    order
        .into_iter()
        .map(|inc| {
            let expert = match_experts(inc, profiles)
                .into_iter()
                .find(|p| !taken.contains(p.id.as_str()))
                .map(|p| {
                    taken.insert(p.id.as_str());
                    p.id.clone()
                });
            Assignment {
                incident: inc.event_id.clone(),
                expert,
            }
        })
        .collect()
}

pub(crate) fn parse_intervals(key: &str, v: &str) -> Result<Vec<Interval>, LineError> {
    v.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_range(key, s))
        .collect()
}

/// `a..b` with inclusive ends.
pub(crate) fn parse_range(key: &str, s: &str) -> Result<Interval, LineError> {
    let (a, b) = s
        .trim()
        .split_once("..")
        .ok_or_else(|| LineError(format!("{key}: expected a..b, found {s:?}")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<Tick>()
            .map_err(|_| LineError(format!("{key}: bad tick {x:?}")))
    };
    Ok(Interval::new(parse(a)?, parse(b)?))
}

/// Reads `profile id=<id> caps=<a>,<b> avail=<t1>..<t2>;... loc=<x>,<y> device=<dev>`
/// records.
pub fn parse_profiles(text: &str) -> Result<Vec<StakeholderProfile>, DecisionError> {
    let mut out: Vec<StakeholderProfile> = Vec::new();
    for (line, raw) in content_lines(text) {
        let at = |e: LineError| DecisionError::Line { line, message: e.0 };
        let rec = tokenize(raw).map_err(at)?;
        if rec.kind != "profile" {
            return Err(at(LineError(format!(
                "expected 'profile' record, found {:?}",
                rec.kind
            ))));
        }
        let id = rec.require("id").map_err(at)?;
        let caps = rec
            .get("caps")
            .unwrap_or("")
            .split(',')
            .filter(|c| !c.is_empty());
        let avail = parse_intervals("avail", rec.require("avail").map_err(at)?).map_err(at)?;
        let [x, y] = parse_ints::<2>("loc", rec.require("loc").map_err(at)?).map_err(at)?;
        let device = rec.require("device").map_err(at)?;
        let profile = StakeholderProfile::new(id, caps, avail, (x, y), device).map_err(|e| {
            DecisionError::Line {
                line,
                message: e.to_string(),
            }
        })?;
        if out.iter().any(|p| p.id == profile.id) {
            return Err(at(LineError(format!("duplicate profile {:?}", profile.id))));
        }
        out.push(profile);
    }
    Ok(out)
}
