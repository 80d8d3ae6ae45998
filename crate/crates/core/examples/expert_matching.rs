//! Rank experts for incidents and assign them without double booking.

use decision_engine::decision::{match_experts, parse_profiles, resolve_assignments, Incident};

const PROFILES: &str = "\
profile id=bob caps=alarm avail=0..2000 loc=10,10 device=vxportal2
profile id=eric caps=alarm avail=0..2000 loc=45,45 device=vxlab
profile id=robot1 caps=alarm avail=0..100000 loc=42,42 device=vxportal6
profile id=amrit caps=alarm avail=1500..1600 loc=41,41 device=amritlab
";

fn main() {
    let profiles = parse_profiles(PROFILES).unwrap();
    let incident = |id: &str, x, y, t| Incident {
        event_id: id.into(),
        location: (x, y),
        required_capability: "alarm".into(),
        time: t,
    };
    let incidents = [
        incident("valve-1", 43, 43, 900),
        incident("valve-2", 44, 44, 901),
        incident("pump-1", 0, 0, 902),
    ];
    for inc in &incidents {
        let ranked: Vec<&str> = match_experts(inc, &profiles)
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        println!("{} at {:?}: {ranked:?}", inc.event_id, inc.location);
    }
    for a in resolve_assignments(&incidents, &profiles) {
        println!(
            "{} -> {}",
            a.incident,
            a.expert.as_deref().unwrap_or("(nobody free)")
        );
    }
}
