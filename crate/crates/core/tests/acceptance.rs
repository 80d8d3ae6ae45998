//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use decision_engine::app::{self, Engine, EngineConfig, ReplayInput};
use decision_engine::decision::{
    evaluate_rule, match_experts, resolve_assignments, Incident, StakeholderProfile,
};
use decision_engine::invariant::{
    holds_at, parse_invariant, simplify, AtomContext, GridBox, GridBox3, Interval, Invariant,
};
use decision_engine::notification::{
    parse_command_list, parse_xml, render_xml, DeviceBinding, GeoPoint, Overlay,
    VisualizationCommand,
};
use decision_engine::pipeline::{coalesce, Intake};
use decision_engine::reasoning::{
    boxes_overlap, coverage, decompose_to_points, filter_by_owner, filter_by_time, SpatialSnapshot,
    DEFAULT_DECOMPOSITION_CAP,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/smartspace")
}

fn fixture_config(out: &Path) -> EngineConfig {
    let mut cfg = EngineConfig::load(&fixture_dir().join("engine.conf")).expect("fixture config");
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

const REGION_A: &str = r#"IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner("A")),OccupyBox(143,4056,1536,2612))"#;

fn c1_worked_formula() -> Outcome {
    let start = Instant::now();
    let term = parse_invariant(REGION_A).map_err(|e| e.to_string())?;
    let at = |t| filter_by_owner(&filter_by_time(&term, t), "A").map_err(|e| e.to_string());
    let expected = Invariant::OccupyBox(GridBox::new(143, 2612, 1536, 4056));
    let got = at(900)?;
    ensure(got == expected, || format!("t=900 gave {got}"))?;
    let got = at(975)?;
    ensure(got == Invariant::True, || format!("t=975 gave {got}"))?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("t=900 -> {expected}, t=975 -> TRUE() in {took:?}"))
}

/// Lattice points of `area` covered by at least one box, counted one by one.
fn brute_coverage(boxes: &[GridBox], area: &GridBox) -> (u128, u128) {
    let (x1, y1, x2, y2) = area.corners();
    let (mut covered, mut total) = (0u128, 0u128);
    for x in x1..=x2 {
        for y in y1..=y2 {
            total += 1;
            if boxes.iter().any(|b| {
                let (bx1, by1, bx2, by2) = b.corners();
                bx1 <= x && x <= bx2 && by1 <= y && y <= by2
            }) {
                covered += 1;
            }
        }
    }
    (covered, total)
}

fn c2_smartspace_rule() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = fixture_config(dir.path());

    // the fixture model has cloud over both farms at 920
    let (xml, triggered) = app::check(&cfg, 920).map_err(|e| e.to_string())?;
    ensure(triggered, || "fixture did not trigger at 920".into())?;
    for needle in [
        r#"type="map""#,
        r#"type="earth""#,
        r#"zoom="15z""#,
        r#"height="100m""#,
    ] {
        ensure(xml.contains(needle), || format!("XML lacks {needle}"))?;
    }
    let engine = Engine::load(&cfg).map_err(|e| e.to_string())?;
    let labels: Vec<String> = engine
        .evaluate_at(920)
        .into_iter()
        .map(|r| r.label)
        .collect();
    ensure(labels == ["critical solar energy level"], || {
        format!("labels {labels:?}")
    })?;
    let (_, quiet) = app::check(&cfg, 800).map_err(|e| e.to_string())?;
    ensure(!quiet, || "triggered outside the cloud interval".into())?;

    let rule = &engine.rules()[0];
    let [farm1, farm2] = [rule.areas()[0], rule.areas()[1]];
    let over1 = GridBox::new(0, 0, 12, 12);
    let over2 = GridBox::new(18, 18, 31, 31);
    let partial2 = GridBox::new(20, 20, 29, 24); // 50 of 100 points, below 0.6
    let cases: [(&str, Vec<GridBox>, bool); 4] = [
        ("both", vec![over1, over2], true),
        ("farm 1 only", vec![over1], false),
        ("farm 2 only", vec![over2], false),
        ("farm 2 partial", vec![over1, partial2], false),
    ];
    for (name, boxes, expect) in cases {
        let mut owned: Vec<(String, GridBox)> =
            boxes.iter().map(|b| ("cloud".to_string(), *b)).collect();
        owned.push(("rain".into(), GridBox::new(0, 0, 40, 40)));
        let snap = SpatialSnapshot::new(920, owned);
        let oracle = [farm1, farm2].iter().all(|a| {
            let (c, t) = brute_coverage(&boxes, a);
            c as f64 / t as f64 >= rule.threshold()
        });
        ensure(oracle == expect, || {
            format!("{name}: oracle disagrees with the fixture design")
        })?;
        let got = evaluate_rule(rule, &snap).is_some();
        ensure(got == expect, || {
            format!("{name}: rule gave {got}, expected {expect}")
        })?;
    }
    Ok("fixture triggers with map/earth commands; dropping either area un-triggers".into())
}

const DEVICE_FREE_DOC: &str = r#"<output>
           <command type="display" profile="ptz_camera3_view"></command>
		   <command type="composite_image" image="gridsubstation.jpg">
              <display type="rect" x="350" y="600" w="120" h="150"></display>
              <display type="text" text="Incident at Grid Substation" x="130" y="90" color="red"></display>
           </command>
           <command type="earth" lat="-38.1771269" long="146.3428259" height="100m"></command>
		   <command type="map" lat="-38.1771269" long="146.3428259" zoom="15z"></command>
</output>"#;

fn squash(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .replace("> <", "><")
}

fn random_text(rng: &mut StdRng) -> String {
    const POOL: &[char] = &[
        'a', 'Z', '0', ' ', '&', '<', '>', '"', '\'', '=', ',', ';', 'é', '€', '\t', '\n', '#',
        '\\',
    ];
    let n = rng.random_range(0..10);
    (0..n)
        .map(|_| POOL[rng.random_range(0..POOL.len())])
        .collect()
}

fn random_command(rng: &mut StdRng) -> VisualizationCommand {
    let geo = |rng: &mut StdRng| {
        GeoPoint::new(
            rng.random_range(-90.0..=90.0),
            rng.random_range(-180.0..=180.0),
        )
        .unwrap()
    };
    match rng.random_range(0..5) {
        0 => VisualizationCommand::EventBanner {
            category: random_text(rng),
            id: random_text(rng),
        },
        1 => VisualizationCommand::Display {
            profile: random_text(rng),
        },
        2 => {
            let overlays = (0..rng.random_range(0..4))
                .map(|_| {
                    if rng.random_bool(0.5) {
                        Overlay::Rect {
                            x: rng.random_range(-5000..5000),
                            y: rng.random_range(-5000..5000),
                            w: rng.random(),
                            h: rng.random(),
                        }
                    } else {
                        Overlay::Text {
                            text: random_text(rng),
                            x: rng.random_range(-5000..5000),
                            y: rng.random_range(-5000..5000),
                            color: ["red", "", "green"][rng.random_range(0..3)].into(),
                        }
                    }
                })
                .collect();
            VisualizationCommand::CompositeImage {
                image: random_text(rng),
                overlays,
            }
        }
        3 => VisualizationCommand::MapView {
            at: geo(rng),
            zoom: random_text(rng),
        },
        _ => VisualizationCommand::EarthView {
            at: geo(rng),
            height: random_text(rng),
        },
    }
}

fn c3_xml_golden() -> Outcome {
    let list = parse_command_list(
        "display profile=ptz_camera3_view\n\
         composite_image image=gridsubstation.jpg rect=350,600,120,150 text=\"130,90,red,Incident at Grid Substation\"\n\
         earth lat=-38.1771269 long=146.3428259 height=100m\n\
         map lat=-38.1771269 long=146.3428259 zoom=15z\n",
    )
    .map_err(|e| e.to_string())?;
    let xml = render_xml(&list);
    ensure(squash(&xml) == squash(DEVICE_FREE_DOC), || {
        format!("rendered:\n{xml}")
    })?;
    for attr in [
        r#"lat="-38.1771269""#,
        r#"long="146.3428259""#,
        r#"zoom="15z""#,
        r#"height="100m""#,
        r#"x="350" y="600" w="120" h="150""#,
        r#"text="Incident at Grid Substation""#,
    ] {
        ensure(xml.contains(attr), || format!("missing {attr}"))?;
    }

    let mut rng = StdRng::seed_from_u64(3);
    for i in 0..500 {
        let list: Vec<DeviceBinding> = (0..rng.random_range(0..8))
            .map(|_| {
                let device = rng
                    .random_bool(0.5)
                    .then(|| format!("dev{}", rng.random_range(0..9)));
                let mut b = DeviceBinding::new(device, random_command(&mut rng));
                if rng.random_bool(0.2) {
                    b.extras.push(("note".into(), random_text(&mut rng)));
                }
                b
            })
            .collect();
        let back = parse_xml(&render_xml(&list)).map_err(|e| format!("list {i}: {e}"))?;
        ensure(back == list, || format!("list {i} changed in round trip"))?;
    }
    Ok("device-independent document reproduced; 500/500 random lists round-trip".into())
}

fn random_box(rng: &mut StdRng, side: i64, span: i64) -> GridBox {
    let x = rng.random_range(-span..span);
    let y = rng.random_range(-span..span);
    GridBox::new(
        x,
        y,
        x + rng.random_range(0..=side),
        y + rng.random_range(0..=side),
    )
}

fn points(b: &GridBox) -> BTreeSet<(i64, i64)> {
    let (x1, y1, x2, y2) = b.corners();
    (x1..=x2)
        .flat_map(|x| (y1..=y2).map(move |y| (x, y)))
        .collect()
}

fn c4_overlap_and_decomposition() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut overlapping = 0;
    for i in 0..1000 {
        let a = random_box(&mut rng, 50, 40);
        let b = random_box(&mut rng, 50, 40);
        let (pa, pb) = (points(&a), points(&b));
        let oracle = !pa.is_disjoint(&pb);
        overlapping += usize::from(oracle);
        ensure(boxes_overlap(&a, &b) == oracle, || {
            format!("pair {i}: {a} vs {b}")
        })?;
        for (bx, pts) in [(a, &pa), (b, &pb)] {
            let (x1, y1, x2, y2) = bx.corners();
            let closed = ((x2 - x1 + 1) * (y2 - y1 + 1)) as usize;
            let got =
                decompose_to_points(&bx, DEFAULT_DECOMPOSITION_CAP).map_err(|e| e.to_string())?;
            ensure(got.len() == closed && got == *pts, || {
                format!("pair {i}: decomposition of {bx}")
            })?;
        }
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "1000/1000 pairs agree ({overlapping} overlapping) in {took:?}"
    ))
}

fn c5_coverage() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let owners = ["cloud", "rain"];
    let mut overlapped = 0;
    for i in 0..200 {
        let boxes: Vec<(String, GridBox)> = (0..rng.random_range(0..=10))
            .map(|_| {
                (
                    owners[rng.random_range(0..2)].to_string(),
                    random_box(&mut rng, 20, 12),
                )
            })
            .collect();
        let snap = SpatialSnapshot::new(0, boxes.clone());
        let area = random_box(&mut rng, 29, 20);
        for owner in owners {
            let mine: Vec<GridBox> = boxes
                .iter()
                .filter(|(o, _)| o == owner)
                .map(|(_, b)| *b)
                .collect();
            let (covered, total) = brute_coverage(&mine, &area);
            let summed: u128 = mine
                .iter()
                .filter_map(|b| b.intersection(&area))
                .map(|b| b.lattice_count())
                .sum();
            overlapped += usize::from(summed > covered);
            let got = coverage(&snap, owner, &area);
            ensure(got.covered == covered && got.total == total, || {
                format!(
                    "snapshot {i} owner {owner}: got {}/{}, expected {covered}/{total}",
                    got.covered, got.total
                )
            })?;
        }
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "200/200 snapshots exact ({overlapped} with overlapping boxes) in {took:?}"
    ))
}

fn random_term(rng: &mut StdRng, depth: u32) -> Invariant {
    let name = |rng: &mut StdRng| ["A", "B", "C"][rng.random_range(0..3)].to_string();
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..12) {
            0 => Invariant::True,
            1 => Invariant::False,
            2 => Invariant::TimePoint(rng.random_range(0..10)),
            3 => {
                let a = rng.random_range(0..10);
                Invariant::TimeInterval(Interval::new(a, a + rng.random_range(0..5)))
            }
            4 => Invariant::Owner(name(rng)),
            5 => Invariant::Event(name(rng)),
            6 => Invariant::OccupyPoint(rng.random_range(0..5), rng.random_range(0..5)),
            7 => Invariant::OccupyBox(random_box(rng, 3, 3)),
            8 => Invariant::Occupy3DBox(GridBox3::new(0, 0, 0, 1, 1, 1)),
            9 => Invariant::Edge(name(rng), name(rng)),
            10 => Invariant::Transition(name(rng), name(rng), name(rng)),
            _ => Invariant::Owner(name(rng)),
        };
    }
    let sub = |rng: &mut StdRng| random_term(rng, depth - 1);
    match rng.random_range(0..4) {
        0 => Invariant::and(sub(rng), sub(rng)),
        1 => Invariant::or(sub(rng), sub(rng)),
        2 => Invariant::implies(sub(rng), sub(rng)),
        _ => Invariant::not(sub(rng)),
    }
}

fn random_context(rng: &mut StdRng) -> AtomContext {
    let mut ctx = AtomContext::at(rng.random_range(-1..12));
    if rng.random_bool(0.7) {
        ctx = ctx.with_point(rng.random_range(-3..6), rng.random_range(-3..6));
    }
    for n in ["A", "B", "C"] {
        if rng.random_bool(0.5) {
            ctx = ctx.with_owner(n);
        }
        if rng.random_bool(0.5) {
            ctx = ctx.with_event(n);
        }
    }
    ctx
}

fn c6_simplify() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let contexts: Vec<AtomContext> = (0..100).map(|_| random_context(&mut rng)).collect();
    let mut shrunk = 0;
    for i in 0..1000 {
        let term = random_term(&mut rng, 6);
        let s = simplify(&term);
        ensure(s.node_count() <= term.node_count(), || {
            format!("term {i} grew: {term} -> {s}")
        })?;
        shrunk += usize::from(s.node_count() < term.node_count());
        for (j, ctx) in contexts.iter().enumerate() {
            ensure(holds_at(&s, ctx) == holds_at(&term, ctx), || {
                format!("term {i} context {j}: {term} vs {s}")
            })?;
        }
    }
    Ok(format!(
        "0 violations over 100000 evaluations; {shrunk} terms shrank"
    ))
}

fn c7_flood() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = fixture_config(dir.path());
    let mut rng = StdRng::seed_from_u64(7);
    let peak = rng.random_range(0..10_000);
    let lines: Vec<String> = (0..10_000)
        .map(|i| {
            let sev = if i == peak {
                3
            } else {
                rng.random_range(0..=2)
            };
            format!(
                "evt src=substation-A t={} cat=alarm sev={sev} x=42 y=42",
                100 + rng.random_range(0..5)
            )
        })
        .collect();
    let text = lines.join("\n");

    let start = Instant::now();
    let input = ReplayInput::parse(&text, "", &cfg);
    let summary = app::replay(&cfg, input).map_err(|e| e.to_string())?;
    let took = within(start, Duration::from_secs(5))?;
    ensure(summary.events_in == 10_000, || {
        format!("{} events in", summary.events_in)
    })?;
    ensure(summary.coalesced_groups == 1, || {
        format!("{} groups", summary.coalesced_groups)
    })?;

    // the surviving banner names the severity-3 alarm
    let peak_id = format!("substation-A-{}", peak + 1);
    let mut banners = Vec::new();
    for entry in std::fs::read_dir(dir.path()).map_err(|e| e.to_string())? {
        let text = std::fs::read_to_string(entry.map_err(|e| e.to_string())?.path())
            .map_err(|e| e.to_string())?;
        for doc in text.split_inclusive("</output>\n") {
            for b in parse_xml(doc).map_err(|e| e.to_string())? {
                if let VisualizationCommand::EventBanner { category, id } = b.command {
                    banners.push((category, id));
                }
            }
        }
    }
    ensure(banners == [("alarm".to_string(), peak_id.clone())], || {
        format!("banners {banners:?}")
    })?;

    let intake = Intake::new();
    let mut events: Vec<_> = lines.iter().map(|l| intake.accept(l).unwrap()).collect();
    events.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
    let groups = coalesce(&events, cfg.coalesce_window_ticks);
    ensure(groups.len() == 1 && groups[0].count == 10_000, || {
        "direct coalesce disagrees".into()
    })?;
    ensure(
        groups[0].representative.severity == 3 && groups[0].representative.id == peak_id,
        || "max severity lost".into(),
    )?;
    Ok(format!(
        "1 group, count 10000, representative {peak_id} (sev 3), replay {took:?}"
    ))
}

fn c8_expert_matching() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let caps = ["alarm", "help-request", "solar"];
    let mut nonempty = 0;
    for set in 0..100 {
        let profiles: Vec<StakeholderProfile> = (0..rng.random_range(1..15))
            .map(|i| {
                let mine: Vec<&str> = caps
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.6))
                    .collect();
                let a = rng.random_range(0..50);
                StakeholderProfile::new(
                    format!("p{:02}", (i * 7) % 15),
                    mine,
                    vec![Interval::new(a, a + rng.random_range(0..60))],
                    (rng.random_range(-20..20), rng.random_range(-20..20)),
                    "dev",
                )
                .unwrap()
            })
            .collect::<Vec<_>>();
        let incidents: Vec<Incident> = (0..rng.random_range(1..10))
            .map(|i| Incident {
                event_id: format!("e{i}"),
                location: (rng.random_range(-20..20), rng.random_range(-20..20)),
                required_capability: caps[rng.random_range(0..3)].into(),
                time: rng.random_range(0..80),
            })
            .collect();
        for inc in &incidents {
            let mut oracle: Vec<(i64, &str)> = profiles
                .iter()
                .filter(|p| p.capabilities.contains(&inc.required_capability))
                .filter(|p| {
                    p.availability()
                        .iter()
                        .any(|w| w.start() <= inc.time && inc.time <= w.end())
                })
                .map(|p| {
                    let (dx, dy) = (p.location.0 - inc.location.0, p.location.1 - inc.location.1);
                    (dx * dx + dy * dy, p.id.as_str())
                })
                .collect();
            oracle.sort();
            let got: Vec<&str> = match_experts(inc, &profiles)
                .iter()
                .map(|p| p.id.as_str())
                .collect();
            let want: Vec<&str> = oracle.iter().map(|(_, id)| *id).collect();
            ensure(got == want, || {
                format!("set {set} {}: {got:?} vs {want:?}", inc.event_id)
            })?;
            nonempty += usize::from(!got.is_empty());
        }
        let assigned = resolve_assignments(&incidents, &profiles);
        let experts: Vec<&String> = assigned.iter().filter_map(|a| a.expert.as_ref()).collect();
        let unique: BTreeSet<&&String> = experts.iter().collect();
        ensure(unique.len() == experts.len(), || {
            format!("set {set}: double booking {experts:?}")
        })?;
        ensure(assigned.len() == incidents.len(), || {
            format!("set {set}: incidents lost")
        })?;
    }
    Ok(format!("100/100 sets match the brute-force order ({nonempty} non-empty rankings); no double booking"))
}

fn snapshot_dir(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        out.insert(name, std::fs::read(&p).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn c9_determinism() -> Outcome {
    let fx = fixture_dir();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cfg = fixture_config(dir.path());
        app::replay_files(&cfg, &fx.join("events.txt"), &fx.join("weather.txt"))
            .map_err(|e| e.to_string())?;
        runs.push(snapshot_dir(dir.path())?);
    }
    ensure(!runs[0].is_empty(), || "replay wrote nothing".into())?;
    ensure(runs[0] == runs[1], || "outputs differ between runs".into())?;
    let bytes: usize = runs[0].values().map(Vec::len).sum();
    Ok(format!(
        "{} device files, {bytes} bytes, identical",
        runs[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked formula filtering", c1_worked_formula),
        ("smartspace coverage rule", c2_smartspace_rule),
        ("xml golden and round trip", c3_xml_golden),
        (
            "overlap and decomposition oracle",
            c4_overlap_and_decomposition,
        ),
        ("coverage oracle", c5_coverage),
        ("simplify soundness", c6_simplify),
        ("flood coalescing", c7_flood),
        ("expert matching determinism", c8_expert_matching),
        ("end-to-end determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
