//! Coverage rule over two solar-farm areas; drops a cloud cell to show the
//! conjunction.

use decision_engine::decision::{evaluate_rule, CoverageRule, ReactionTemplate};
use decision_engine::invariant::{GridBox, Interval};
use decision_engine::notification::{bind_devices, render_xml, DeviceRegistry};
use decision_engine::reasoning::{coverage, SpatialSnapshot};

fn main() {
    let farms = vec![GridBox::new(0, 0, 9, 9), GridBox::new(20, 20, 29, 29)];
    let reaction = ReactionTemplate::new(
        "critical solar energy level",
        vec![
            "event category=critical-solar id={rule-id}".into(),
            "map lat=-38.1771269 long=146.3428259 zoom=15z".into(),
            "earth lat=-38.1771269 long=146.3428259 height=100m".into(),
        ],
    )
    .unwrap();
    let rule = CoverageRule::new(
        "solar",
        Interval::new(850, 1000),
        "cloud",
        farms.clone(),
        0.6,
        reaction,
    )
    .unwrap();
    let registry =
        DeviceRegistry::parse("device id=vxlab caps=banner,map,earth default=true").unwrap();

    let cells = vec![
        ("cloud".to_string(), GridBox::new(0, 0, 12, 12)),
        ("cloud".to_string(), GridBox::new(18, 18, 31, 25)),
    ];
    for (label, boxes) in [
        ("both farms", cells.clone()),
        ("first farm only", cells[..1].to_vec()),
    ] {
        let snap = SpatialSnapshot::new(920, boxes);
        for (i, f) in farms.iter().enumerate() {
            let c = coverage(&snap, "cloud", f);
            println!(
                "{label}: farm {} coverage {}/{} = {:.2}",
                i + 1,
                c.covered,
                c.total,
                c.fraction()
            );
        }
        match evaluate_rule(&rule, &snap) {
            Some(r) => print!("{}", render_xml(&bind_devices(&r.commands, &[], &registry))),
            None => println!("{label}: quiet"),
        }
    }
}
