//! Start the server on ephemeral ports, send a few lines, shut down and
//! print what was written.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::Path;

use decision_engine::app::{start, EngineConfig};

fn send(addr: std::net::SocketAddr, lines: &[&str]) {
    let mut s = TcpStream::connect(addr).unwrap();
    let mut r = BufReader::new(s.try_clone().unwrap());
    for l in lines {
        writeln!(s, "{l}").unwrap();
        let mut reply = String::new();
        r.read_line(&mut reply).unwrap();
        println!("> {l}\n< {}", reply.trim());
    }
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/smartspace");
    let mut cfg = EngineConfig::load(&dir.join("engine.conf")).unwrap();
    cfg.listen_port = Some(0);
    cfg.out_dir = std::env::temp_dir().join("engine-serve-example");
    let _ = std::fs::remove_dir_all(&cfg.out_dir);
    let server = start(&cfg).unwrap();

    send(server.weather_addr, &["wx t=970 kind=cloud box=0,0,30,30"]);
    send(
        server.event_addr,
        &[
            "evt src=valve-7 t=971 cat=alarm sev=3 x=43 y=43",
            "evt src=valve-7 cat=alarm",
            "evt src=panel t=972 cat=help-request x=9 y=9",
        ],
    );
    let summary = server.shutdown().unwrap();
    println!("{summary}");
    for d in ["vxlab", "vxportal2", "vxportal6"] {
        let p = cfg.out_dir.join(format!("{d}.xml"));
        if let Ok(text) = std::fs::read_to_string(&p) {
            println!("--- {d}\n{text}");
        }
    }
}
