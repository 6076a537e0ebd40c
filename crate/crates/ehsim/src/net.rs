//! Teleoperation over TCP.
//!
//! Each endpoint runs its state machine in a 1 kHz wall-clock loop. Frames
//! are written back to back; the receiver reassembles them by length.
//! Timestamps are microseconds since each side's own start, so reported
//! latencies include the offset between the two clocks.

use std::io::{ErrorKind, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::{Duration, Instant};

use ehsim_core::teleop::{
    encode_frame, FrameAssembler, Master, MsgType, SessionRecord, SessionTrace, Slave,
    TeleopFrame,
};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiments::{steady_forces, Experiment, Outcome, OutputFile};
use crate::trace::session_to_bytes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Master,
    Slave,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Master => "master",
            Role::Slave => "slave",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// Accept one connection on this address.
    Listen(String),
    /// Connect to this address, retrying for a few seconds.
    Connect(String),
}

const CONNECT_RETRY: Duration = Duration::from_secs(5);

pub fn open(endpoint: &Endpoint) -> Result<TcpStream> {
    match endpoint {
        Endpoint::Listen(addr) => {
            let l = TcpListener::bind(addr).map_err(|e| Error::Net(format!("bind {addr}: {e}")))?;
            accept(&l)
        }
        Endpoint::Connect(addr) => {
            let start = Instant::now();
            loop {
                match TcpStream::connect(addr) {
                    Ok(s) => return Ok(s),
                    Err(e) if start.elapsed() > CONNECT_RETRY => {
                        return Err(Error::Net(format!("connect {addr}: {e}")))
                    }
                    Err(_) => thread::sleep(Duration::from_millis(50)),
                }
            }
        }
    }
}

pub fn accept(listener: &TcpListener) -> Result<TcpStream> {
    listener
        .accept()
        .map(|(s, _)| s)
        .map_err(|e| Error::Net(format!("accept: {e}")))
}

struct Link {
    stream: TcpStream,
    assembler: FrameAssembler,
    closed: bool,
}

fn net_err(what: &str) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Net(format!("{what}: {e}"))
}

impl Link {
    fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true).map_err(net_err("nodelay"))?;
        stream.set_nonblocking(true).map_err(net_err("nonblocking"))?;
        Ok(Self {
            stream,
            assembler: FrameAssembler::new(),
            closed: false,
        })
    }

    fn poll(&mut self, tick: u64) -> Result<Vec<TeleopFrame>> {
        let mut buf = [0u8; 4096];
        while !self.closed {
            match self.stream.read(&mut buf) {
                Ok(0) => self.closed = true,
                Ok(n) => self.assembler.push(&buf[..n]),
                Err(e) if e.kind() == ErrorKind::WouldBlock => break,
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) if e.kind() == ErrorKind::ConnectionReset => self.closed = true,
                Err(e) => return Err(Error::Net(format!("read: {e}"))),
            }
        }
        let mut frames = Vec::new();
        while let Some(f) = self.assembler.next_frame() {
            frames.push(f.map_err(|e| Error::Net(format!("tick {tick}: {e}")))?);
        }
        Ok(frames)
    }

    fn send(&mut self, frames: &[TeleopFrame]) -> Result<()> {
        for f in frames {
            let bytes = encode_frame(f).map_err(|e| Error::Net(e.to_string()))?;
            let mut rest = &bytes[..];
            while !rest.is_empty() {
                match self.stream.write(rest) {
                    Ok(0) => return Err(Error::Net("peer closed".into())),
                    Ok(n) => rest = &rest[n..],
                    Err(e) if e.kind() == ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_micros(100))
                    }
                    Err(e) if e.kind() == ErrorKind::Interrupted => {}
                    Err(e) => return Err(Error::Net(format!("write: {e}"))),
                }
            }
        }
        Ok(())
    }
}

/// Sleeps until tick `k` and returns the elapsed time in µs.
fn pace(start: Instant, k: u64, tick: Duration) -> u64 {
    let due = start + tick * k as u32;
    if let Some(wait) = due.checked_duration_since(Instant::now()) {
        thread::sleep(wait);
    }
    start.elapsed().as_micros() as u64
}

fn tick_period(cfg: &ExperimentConfig) -> Duration {
    Duration::from_secs_f64(cfg.plant.sample_period / 1.0e3)
}

/// Haptic side: streams the scripted pinch for `duration_ms` and renders
/// the slave's reported force, then sends SHUTDOWN.
pub fn run_master(stream: TcpStream, cfg: &ExperimentConfig, duration_ms: f64) -> Result<SessionTrace> {
    cfg.validate()?;
    let s = cfg.session(cfg.teleop.object.to_object());
    let mut master =
        Master::new(s.device, s.plant, s.gains, s.master).map_err(Error::model("master"))?;
    let profile = cfg.profile();
    let mut link = Link::new(stream)?;
    let dt = s.plant.sample_period;
    let n = (duration_ms / dt).round() as u64;
    let mut trace = SessionTrace {
        sample_period: dt,
        records: Vec::with_capacity(n as usize + 1),
    };
    let (mut slave_pos, mut slave_force) = (0.0, 0.0);
    let start = Instant::now();
    for k in 0..=n {
        let now = pace(start, k, tick_period(cfg));
        let inbox = link.poll(k)?;
        for f in inbox.iter().filter(|f| f.msg_type == MsgType::SlaveState) {
            slave_pos = f.payload_a;
            slave_force = f.payload_b;
        }
        let t = k as f64 * dt;
        let pinch = profile.at(t);
        let m = master
            .tick(now, pinch, &inbox)
            .map_err(Error::model(format!("master tick {k}")))?;
        link.send(&m.frames)?;
        trace.records.push(SessionRecord {
            t,
            target_force: m.target_force,
            master_force: m.local_force,
            voltage: m.voltage,
            master_displacement: pinch,
            slave_force,
            slave_position: slave_pos,
            latency: m.slave_latency_us.map_or(0.0, |us| us as f64 / 1.0e3),
            stale: m.stale,
        });
        if master.is_closed() || link.closed {
            break;
        }
    }
    if !link.closed {
        let bye = master.shutdown(start.elapsed().as_micros() as u64);
        // The slave may already be gone.
        let _ = link.send(&[bye]);
    }
    Ok(trace)
}

/// Gripper side: follows MASTER_POS commands until SHUTDOWN, end of stream
/// or `max_duration_ms`. Master columns hold the newest command and the
/// force the master reported with it.
pub fn run_slave(
    stream: TcpStream,
    cfg: &ExperimentConfig,
    max_duration_ms: Option<f64>,
) -> Result<SessionTrace> {
    cfg.validate()?;
    let s = cfg.session(cfg.teleop.object.to_object());
    let mut slave = Slave::new(s.slave, s.object).map_err(Error::model("slave"))?;
    let mut link = Link::new(stream)?;
    let dt = s.plant.sample_period;
    let limit = max_duration_ms.map(|d| (d / dt).round() as u64);
    let mut trace = SessionTrace {
        sample_period: dt,
        records: Vec::new(),
    };
    let (mut command, mut master_force, mut latency) = (0.0, 0.0, 0.0);
    let start = Instant::now();
    let mut k = 0u64;
    loop {
        let now = pace(start, k, tick_period(cfg));
        let inbox = link.poll(k)?;
        for f in inbox.iter().filter(|f| f.msg_type == MsgType::MasterPos) {
            command = f.payload_a;
            master_force = f.payload_b;
            latency = now.saturating_sub(f.timestamp_us) as f64 / 1.0e3;
        }
        let out = slave
            .tick(now, &inbox)
            .map_err(Error::model(format!("slave tick {k}")))?;
        if !link.closed {
            // A master that already hung up is not an error.
            if link.send(&out.frames).is_err() {
                link.closed = true;
            }
        }
        trace.records.push(SessionRecord {
            t: k as f64 * dt,
            target_force: 0.0,
            master_force,
            voltage: 0.0,
            master_displacement: command,
            slave_force: out.force,
            slave_position: out.position,
            latency,
            stale: false,
        });
        if slave.is_closed() || link.closed || limit.is_some_and(|l| k >= l) {
            break;
        }
        k += 1;
    }
    Ok(trace)
}

/// Runs one networked endpoint and packages its trace and summary.
pub fn run_endpoint(
    role: Role,
    endpoint: &Endpoint,
    cfg: &ExperimentConfig,
    duration_ms: Option<f64>,
) -> Result<Outcome> {
    cfg.validate()?;
    let stream = open(endpoint)?;
    let trace = match role {
        Role::Master => {
            let d = duration_ms
                .or(Experiment::TeleopDemo.default_duration())
                .unwrap_or_default();
            run_master(stream, cfg, d)?
        }
        Role::Slave => run_slave(stream, cfg, duration_ms)?,
    };
    endpoint_outcome(role, cfg, &trace)
}

pub fn endpoint_outcome(role: Role, cfg: &ExperimentConfig, trace: &SessionTrace) -> Result<Outcome> {
    let name = format!("teleop-{}", role.name());
    let file = format!("{name}.csv");
    let (master, slave) = steady_forces(trace, cfg.teleop.hold_window);
    let summary = json!({
        "experiment": name,
        "role": role.name(),
        "files": [file],
        "ticks": trace.records.len(),
        "steady_master_force_N": master,
        "steady_slave_force_N": slave,
        "object": cfg.teleop.object.label,
        "max_latency_ms": trace.records.iter().map(|r| r.latency).fold(0.0, f64::max),
    });
    Ok(Outcome {
        name,
        summary,
        files: vec![OutputFile {
            name: file,
            bytes: session_to_bytes(trace)?,
        }],
    })
}
