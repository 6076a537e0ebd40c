use std::net::TcpListener;
use std::thread;

use ehsim::net::{accept, open, run_master, run_slave, Endpoint};
use ehsim::ExperimentConfig;

#[test]
fn loopback_session_reflects_contact_force() {
    let mut cfg = ExperimentConfig::default();
    cfg.teleop.profile = vec![[50.0, 0.0], [550.0, 4.0]];
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();

    let slave_cfg = cfg.clone();
    let slave = thread::spawn(move || {
        let stream = accept(&listener).unwrap();
        run_slave(stream, &slave_cfg, Some(10_000.0)).unwrap()
    });
    let stream = open(&Endpoint::Connect(addr)).unwrap();
    let master = run_master(stream, &cfg, 2500.0).unwrap();
    let slave = slave.join().unwrap();

    assert_eq!(master.records.len(), 2501);
    // The slave stops on SHUTDOWN, well before its own limit.
    assert!(slave.records.len() < 5000, "{}", slave.records.len());
    let last = slave.records.last().unwrap();
    assert!((last.slave_position - 4.0).abs() <= cfg.teleop.slave.position_step);
    assert!((last.slave_force - 0.9).abs() < 1e-9);

    // Real scheduling jitter makes this statistical, not bit-exact.
    let end = master.records.last().unwrap();
    assert!((end.slave_force - 0.9).abs() < 1e-9);
    assert!((end.master_force - 0.9).abs() < 0.05 * 0.9, "{end:?}");
}
