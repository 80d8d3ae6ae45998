use super::experts::parse_range;
use super::DecisionError;
use crate::invariant::{GridBox, Interval, Tick};
use crate::lineproto::{content_lines, parse_ints, tokenize, LineError};
use crate::notification::{parse_command_line, VisualizationCommand};
use crate::reasoning::{coverage, SpatialSnapshot};

const PLACEHOLDERS: [&str; 3] = ["{time}", "{rule-id}", "{areas}"];

/// The reaction a rule triggers: a label and command-line templates that may
/// reference `{time}`, `{rule-id}` and `{areas}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionTemplate {
    pub label: String,
    commands: Vec<String>,
}

impl ReactionTemplate {
    /// Checks that every template uses only known placeholders and parses
    /// once they are filled in.
    pub fn new(label: impl Into<String>, commands: Vec<String>) -> Result<Self, DecisionError> {
        for c in &commands {
            let filled = fill(c, 0, "rule", "0,0,0,0");
            if filled.contains('{') {
                return Err(DecisionError::Invalid(format!(
                    "unresolvable placeholder in reaction command {c:?}"
                )));
            }
            parse_command_line(&filled)
                .map_err(|e| DecisionError::Invalid(format!("reaction command {c:?}: {e}")))?;
        }
        Ok(ReactionTemplate {
            label: label.into(),
            commands,
        })
    }

    pub fn command_templates(&self) -> &[String] {
        &self.commands
    }

    pub fn instantiate(
        &self,
        time: Tick,
        rule_id: &str,
        areas: &[GridBox],
    ) -> Vec<VisualizationCommand> {
        let areas = areas
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";");
        self.commands
            .iter()
            .map(|c| {
                parse_command_line(&fill(c, time, rule_id, &areas))
                    .expect("validated at construction")
                    .command
            })
            .collect()
    }
}

fn fill(template: &str, time: Tick, rule_id: &str, areas: &str) -> String {
    let values = [time.to_string(), rule_id.to_string(), areas.to_string()];
    PLACEHOLDERS
        .iter()
        .zip(values)
        .fold(template.to_string(), |acc, (p, v)| acc.replace(p, &v))
}

/// Window, owner and per-area coverage threshold, all of which must hold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRule {
    pub id: String,
    pub window: Interval,
    pub owner: String,
    areas: Vec<GridBox>,
    threshold: f64,
    pub reaction: ReactionTemplate,
    /// Capability whose holders receive the reaction; `None` broadcasts
    /// device-independently.
    pub notify: Option<String>,
}

impl CoverageRule {
    pub fn new(
        id: impl Into<String>,
        window: Interval,
        owner: impl Into<String>,
        areas: Vec<GridBox>,
        threshold: f64,
        reaction: ReactionTemplate,
    ) -> Result<Self, DecisionError> {
        let id = id.into();
        if areas.is_empty() {
            return Err(DecisionError::Invalid(format!("rule {id}: no areas")));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(DecisionError::Invalid(format!(
                "rule {id}: threshold {threshold} outside [0,1]"
            )));
        }
        Ok(CoverageRule {
            id,
            window,
            owner: owner.into(),
            areas,
            threshold,
            reaction,
            notify: None,
        })
    }

    pub fn with_notify(mut self, capability: impl Into<String>) -> Self {
        self.notify = Some(capability.into());
        self
    }

    pub fn areas(&self) -> &[GridBox] {
        &self.areas
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Whether the condition holds on `snapshot`, without instantiating the reaction.
    pub fn holds(&self, snapshot: &SpatialSnapshot) -> bool {
        self.window.contains(snapshot.time())
            && self
                .areas
                .iter()
                .all(|a| coverage(snapshot, &self.owner, a).meets(self.threshold))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriggeredReaction {
    pub rule_id: String,
    pub label: String,
    pub time: Tick,
    pub commands: Vec<VisualizationCommand>,
    pub notify: Option<String>,
}

pub fn evaluate_rule(rule: &CoverageRule, snapshot: &SpatialSnapshot) -> Option<TriggeredReaction> {
    rule.holds(snapshot).then(|| TriggeredReaction {
        rule_id: rule.id.clone(),
        label: rule.reaction.label.clone(),
        time: snapshot.time(),
        commands: rule
            .reaction
            .instantiate(snapshot.time(), &rule.id, &rule.areas),
        notify: rule.notify.clone(),
    })
}

/// Reads rule records:
///
/// ```text
/// rule id=solar window=0..100 owner=cloud area=0,0,9,9;20,20,29,29 threshold=0.5 reaction="critical solar energy level" cmd="map lat=-38.1771269 long=146.3428259 zoom=15z" [notify=<capability>]
/// ```
///
/// `cmd=` may repeat; each value is a command line template.
pub fn parse_rules(text: &str) -> Result<Vec<CoverageRule>, DecisionError> {
    let mut out: Vec<CoverageRule> = Vec::new();
    for (line, raw) in content_lines(text) {
        let at = |e: LineError| DecisionError::Line { line, message: e.0 };
        let rec = tokenize(raw).map_err(at)?;
        if rec.kind != "rule" {
            return Err(at(LineError(format!(
                "expected 'rule' record, found {:?}",
                rec.kind
            ))));
        }
        let id = rec.require("id").map_err(at)?;
        let window = parse_range("window", rec.require("window").map_err(at)?).map_err(at)?;
        let owner = rec.require("owner").map_err(at)?;
        let areas = rec
            .require("area")
            .map_err(at)?
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_ints::<4>("area", s).map(|[a, b, c, d]| GridBox::new(a, b, c, d)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(at)?;
        let raw_threshold = rec.require("threshold").map_err(at)?;
        let threshold: f64 = raw_threshold.parse().map_err(|_| {
            at(LineError(format!(
                "threshold: not a number: {raw_threshold:?}"
            )))
        })?;
        let label = rec.get("reaction").unwrap_or(id);
        let commands = rec.all("cmd").map(String::from).collect();
        let lift = |e: DecisionError| DecisionError::Line {
            line,
            message: e.to_string(),
        };
        let reaction = ReactionTemplate::new(label, commands).map_err(lift)?;
        let mut rule =
            CoverageRule::new(id, window, owner, areas, threshold, reaction).map_err(lift)?;
        if let Some(cap) = rec.get("notify") {
            rule = rule.with_notify(cap);
        }
        if out.iter().any(|r| r.id == rule.id) {
            return Err(at(LineError(format!("duplicate rule {:?}", rule.id))));
        }
        out.push(rule);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(areas: Vec<GridBox>, threshold: f64) -> CoverageRule {
        let reaction = ReactionTemplate::new(
            "critical solar energy level",
            vec!["event category=critical-solar id={rule-id}@{time}".into()],
        )
        .unwrap();
        CoverageRule::new(
            "solar",
            Interval::new(0, 100),
            "cloud",
            areas,
            threshold,
            reaction,
        )
        .unwrap()
    }

    fn snap(t: Tick, boxes: &[GridBox]) -> SpatialSnapshot {
        SpatialSnapshot::new(t, boxes.iter().map(|b| ("cloud".to_string(), *b)).collect())
    }

    #[test]
    fn inclusive_threshold_triggers() {
        let r = rule(vec![GridBox::new(0, 0, 9, 9)], 0.5);
        let fired = evaluate_rule(&r, &snap(50, &[GridBox::new(0, 0, 4, 9)])).unwrap();
        assert_eq!(fired.label, "critical solar energy level");
        assert_eq!(
            fired.commands,
            vec![VisualizationCommand::banner("critical-solar", "solar@50")]
        );
    }

    #[test]
    fn outside_window_does_not_trigger() {
        let r = rule(vec![GridBox::new(0, 0, 9, 9)], 0.5);
        assert!(evaluate_rule(&r, &snap(101, &[GridBox::new(0, 0, 9, 9)])).is_none());
    }

    #[test]
    fn all_areas_must_be_covered() {
        let a1 = GridBox::new(0, 0, 9, 9);
        let a2 = GridBox::new(20, 20, 29, 29);
        let r = rule(vec![a1, a2], 0.5);
        let s = snap(50, &[a1]);
        assert_eq!(coverage(&s, "cloud", &a1).fraction(), 1.0);
        assert_eq!(coverage(&s, "cloud", &a2).fraction(), 0.0);
        assert!(evaluate_rule(&r, &s).is_none());
        assert!(evaluate_rule(&r, &snap(50, &[a1, a2])).is_some());
    }

    #[test]
    fn threshold_monotone() {
        let s = snap(50, &[GridBox::new(0, 0, 6, 9)]);
        let area = vec![GridBox::new(0, 0, 9, 9)];
        for i in 0..=10 {
            let theta = i as f64 / 10.0;
            if evaluate_rule(&rule(area.clone(), theta), &s).is_some() {
                for j in 0..=i {
                    assert!(evaluate_rule(&rule(area.clone(), j as f64 / 10.0), &s).is_some());
                }
            }
        }
        assert!(evaluate_rule(&rule(area.clone(), 0.7), &s).is_some());
        assert!(evaluate_rule(&rule(area, 0.8), &s).is_none());
    }

    #[test]
    fn areas_placeholder() {
        let t = ReactionTemplate::new("x", vec!["display profile={areas}".into()]).unwrap();
        assert_eq!(
            t.instantiate(
                1,
                "r",
                &[GridBox::new(0, 0, 1, 1), GridBox::new(5, 5, 6, 6)]
            ),
            vec![VisualizationCommand::display("0,0,1,1;5,5,6,6")]
        );
    }

    #[test]
    fn template_validation() {
        assert!(ReactionTemplate::new("x", vec!["display profile={who}".into()]).is_err());
        assert!(ReactionTemplate::new("x", vec!["map lat={time}".into()]).is_err());
        assert!(ReactionTemplate::new("x", vec!["hologram".into()]).is_err());
    }

    #[test]
    fn rule_file() {
        let rules = parse_rules(
            "rule id=solar window=100..0 owner=cloud area=0,0,9,9;29,29,20,20 threshold=0.5 reaction=\"critical solar energy level\" cmd=\"map lat=-38.1771269 long=146.3428259 zoom=15z\" cmd=\"event category=solar id={rule-id}\" notify=electrical\n",
        )
        .unwrap();
        let r = &rules[0];
        assert_eq!((r.window.start(), r.window.end()), (0, 100));
        assert_eq!(r.areas()[1], GridBox::new(20, 20, 29, 29));
        assert_eq!(r.reaction.command_templates().len(), 2);
        assert_eq!(r.notify.as_deref(), Some("electrical"));
        assert!(parse_rules("rule id=a window=0..1 owner=c area=0,0,1,1 threshold=1.5\n").is_err());
        assert!(parse_rules("rule id=a window=0..1 owner=c area= threshold=0.5\n").is_err());
        let err = parse_rules("\n\nrule id=a window=0-1 owner=c area=0,0,1,1 threshold=0.5\n")
            .unwrap_err();
        assert!(err.to_string().starts_with("line 3"));
    }
}
