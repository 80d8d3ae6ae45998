//! Replay the SmartSpace fixture into a temporary directory and show the
//! per-device output.

use std::path::Path;

use decision_engine::app::{replay_files, EngineConfig};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/smartspace");
    let mut cfg = EngineConfig::load(&dir.join("engine.conf")).unwrap();
    let out = std::env::temp_dir().join("engine-replay-example");
    cfg.out_dir = out.clone();
    let summary = replay_files(&cfg, &dir.join("events.txt"), &dir.join("weather.txt")).unwrap();
    println!("{summary}");
    let mut files: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .flatten()
        .map(|e| e.path())
        .collect();
    files.sort();
    for f in files {
        println!("--- {}", f.display());
        print!("{}", std::fs::read_to_string(f).unwrap());
    }
}
