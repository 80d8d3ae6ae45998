use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::commands::AppError;
use super::config::{ConfigError, EngineConfig};
use super::engine::{resolve_wall_clock, Engine, Summary};
use super::output::DeviceOutputs;
use crate::ingestion::{parse_weather_line, WeatherCell};
use crate::pipeline::{EventQueue, Intake};

const POLL: Duration = Duration::from_millis(25);

/// A running server. Set the shutdown flag (or call [`ServeHandle::shutdown`])
/// to stop accepting, drain the queue, flush and exit.
pub struct ServeHandle {
    pub event_addr: SocketAddr,
    pub weather_addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    processor: JoinHandle<Result<Summary, AppError>>,
}

impl ServeHandle {
    pub fn shutdown_flag(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.shutdown)
    }

    pub fn shutdown(self) -> Result<Summary, AppError> {
        self.shutdown.store(true, Ordering::SeqCst);
        self.wait()
    }

    /// Blocks until the flag is set elsewhere and the server has stopped.
    pub fn wait(self) -> Result<Summary, AppError> {
        self.processor
            .join()
            .unwrap_or_else(|_| panic!("serve processor panicked"))
    }
}

struct Shared {
    intake: Intake,
    queue: EventQueue,
    /// Weather received since the processor last looked; swapped out whole.
    weather: Mutex<Vec<WeatherCell>>,
    malformed: Mutex<(usize, usize)>,
    epoch: String,
    tick_seconds: i64,
    shutdown: Arc<AtomicBool>,
}

impl Shared {
    fn event_line(&self, line: &str) -> String {
        let parsed = resolve_wall_clock(line, &self.epoch, self.tick_seconds)
            .and_then(|l| self.intake.accept(&l).map_err(|e| e.to_string()));
        match parsed {
            Err(msg) => {
                log::warn!("malformed event line: {msg}");
                self.malformed.lock().unwrap_or_else(|p| p.into_inner()).0 += 1;
                "err malformed".into()
            }
            Ok(e) => {
                let id = e.id.clone();
                match self.queue.enqueue(e) {
                    Ok(()) => format!("ok {id}"),
                    Err(full) => {
                        log::warn!("queue full, refused {}", full.event.id);
                        "err backpressure".into()
                    }
                }
            }
        }
    }

    fn weather_line(&self, line: &str) -> String {
        let parsed = resolve_wall_clock(line, &self.epoch, self.tick_seconds)
            .and_then(|l| parse_weather_line(&l).map_err(|e| e.to_string()));
        match parsed {
            Err(msg) => {
                log::warn!("malformed weather line: {msg}");
                self.malformed.lock().unwrap_or_else(|p| p.into_inner()).1 += 1;
                "err malformed".into()
            }
            Ok(c) => {
                let tick = c.tick;
                self.weather
                    .lock()
                    .unwrap_or_else(|p| p.into_inner())
                    .push(c);
                format!("ok wx-{tick}")
            }
        }
    }
}

/// Answers one line per request until the peer hangs up or shutdown begins.
fn connection(stream: TcpStream, shared: Arc<Shared>, handle: fn(&Shared, &str) -> String) {
    let _ = stream.set_read_timeout(Some(POLL * 4));
    let _ = stream.set_nodelay(true);
    let Ok(mut writer) = stream.try_clone() else {
        return;
    };
    let mut reader = BufReader::new(stream);
    let mut buf = Vec::new();
    loop {
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => break,
            Ok(_) if buf.ends_with(b"\n") => {
                let line = String::from_utf8_lossy(&buf).trim().to_string();
                buf.clear();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let reply = handle(&shared, &line) + "\n";
                if writer.write_all(reply.as_bytes()).is_err() {
                    break;
                }
            }
            // partial line at EOF: loop again to see the 0-byte read
            Ok(_) => {}
            Err(e)
                if matches!(
                    e.kind(),
                    ErrorKind::WouldBlock | ErrorKind::TimedOut | ErrorKind::Interrupted
                ) =>
            {
                if shared.shutdown.load(Ordering::SeqCst) {
                    break;
                }
            }
            Err(_) => break,
        }
    }
}

fn listen(
    listener: TcpListener,
    shared: Arc<Shared>,
    handle: fn(&Shared, &str) -> String,
) -> JoinHandle<()> {
    thread::spawn(move || {
        let mut conns = Vec::new();
        while !shared.shutdown.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let _ = stream.set_nonblocking(false);
                    let shared = Arc::clone(&shared);
                    conns.push(thread::spawn(move || connection(stream, shared, handle)));
                }
                Err(e) if e.kind() == ErrorKind::WouldBlock => thread::sleep(POLL),
                Err(e) => {
                    log::error!("accept failed: {e}");
                    thread::sleep(POLL);
                }
            }
            conns.retain(|c: &JoinHandle<()>| !c.is_finished());
        }
        for c in conns {
            let _ = c.join();
        }
    })
}

/// Binds both ports and starts the listener and processor threads.
pub fn start(config: &EngineConfig) -> Result<ServeHandle, AppError> {
    let engine = Engine::load(config)?;
    let (port, wport) = config.ports()?;
    let bind = |p: u16| -> Result<TcpListener, AppError> {
        let addr = format!("{}:{p}", config.listen_host);
        let l = TcpListener::bind(&addr).map_err(|e| {
            AppError::Config(ConfigError::Invalid {
                key: "listen_port".into(),
                message: format!("cannot bind {addr}: {e}"),
            })
        })?;
        l.set_nonblocking(true)
            .map_err(|e| AppError::io(std::path::Path::new(&addr), e))?;
        Ok(l)
    };
    let (events, weather) = (bind(port)?, bind(wport)?);
    let event_addr = events
        .local_addr()
        .map_err(|e| AppError::io(std::path::Path::new("listen"), e))?;
    let weather_addr = weather
        .local_addr()
        .map_err(|e| AppError::io(std::path::Path::new("listen"), e))?;
    let out = DeviceOutputs::new(&config.out_dir, engine.registry())
        .map_err(|e| AppError::io(&config.out_dir, e))?;

    let shutdown = Arc::new(AtomicBool::new(false));
    let shared = Arc::new(Shared {
        intake: Intake::new(),
        queue: EventQueue::new(config.queue_capacity),
        weather: Mutex::new(Vec::new()),
        malformed: Mutex::new((0, 0)),
        epoch: config.epoch.clone(),
        tick_seconds: config.tick_seconds,
        shutdown: Arc::clone(&shutdown),
    });
    let listeners = vec![
        listen(events, Arc::clone(&shared), Shared::event_line),
        listen(weather, Arc::clone(&shared), Shared::weather_line),
    ];
    let interval = Duration::from_millis(config.batch_interval_ms);
    let processor = thread::spawn(move || process(engine, shared, listeners, out, interval));
    log::info!("listening for events on {event_addr}, weather on {weather_addr}");
    Ok(ServeHandle {
        event_addr,
        weather_addr,
        shutdown,
        processor,
    })
}

/// One processing step: pull what arrived, move the clock to the latest
/// tick seen, write whatever closed.
fn step(
    engine: &mut Engine,
    shared: &Shared,
    out: &DeviceOutputs,
    clock: &mut Option<i64>,
) -> Result<(), AppError> {
    let cells = std::mem::take(&mut *shared.weather.lock().unwrap_or_else(|p| p.into_inner()));
    let events = shared.queue.dequeue_batch(usize::MAX);
    let latest = cells
        .iter()
        .map(|c| c.tick)
        .chain(events.iter().map(|e| e.timestamp))
        .max();
    engine.ingest_weather(cells);
    let mut batches = Vec::new();
    if let Some(t) = latest.filter(|&t| clock.is_none_or(|c| t > c)) {
        *clock = Some(t);
        batches.extend(engine.advance_to(t));
    }
    engine.ingest_events(events);
    for b in batches {
        out.write_batch(&b)
            .map_err(|e| AppError::io(out.dir(), e))?;
    }
    Ok(())
}

fn process(
    mut engine: Engine,
    shared: Arc<Shared>,
    listeners: Vec<JoinHandle<()>>,
    out: DeviceOutputs,
    interval: Duration,
) -> Result<Summary, AppError> {
    let mut clock = None;
    let mut due = Instant::now() + interval;
    while !shared.shutdown.load(Ordering::SeqCst) {
        let now = Instant::now();
        if now < due {
            thread::sleep((due - now).min(POLL));
            continue;
        }
        step(&mut engine, &shared, &out, &mut clock)?;
        due = Instant::now() + interval;
    }
    // drain barrier: nothing is accepted after the listeners stop
    for l in listeners {
        let _ = l.join();
    }
    step(&mut engine, &shared, &out, &mut clock)?;
    for b in engine.finish() {
        out.write_batch(&b)
            .map_err(|e| AppError::io(out.dir(), e))?;
    }
    let (bad_events, bad_weather) = *shared.malformed.lock().unwrap_or_else(|p| p.into_inner());
    let s = engine.summary_mut();
    s.events_skipped += bad_events;
    s.weather_skipped += bad_weather;
    Ok(engine.summary())
}

/// Runs until `shutdown` is set, e.g. by a signal handler.
pub fn serve(config: &EngineConfig, shutdown: Arc<AtomicBool>) -> Result<Summary, AppError> {
    let handle = start(config)?;
    let flag = handle.shutdown_flag();
    while !shutdown.load(Ordering::SeqCst) {
        thread::sleep(POLL);
    }
    flag.store(true, Ordering::SeqCst);
    handle.wait()
}
