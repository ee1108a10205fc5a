//! Monotonic time for the whole system.
//!
//! Every timestamp, deadline, and latency charge goes through a [`Clock`] so
//! that tests and benchmarks can run on simulated time. In simulated mode
//! time advances only when a workload declares work, a workload waits, or a
//! stub store charges transfer latency — there is no hidden time.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockMode {
    Real,
    Simulated,
}

impl std::str::FromStr for ClockMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(ClockMode::Real),
            "simulated" => Ok(ClockMode::Simulated),
            other => Err(format!("unknown clock mode {other:?} (real|simulated)")),
        }
    }
}

/// Monotonic millisecond clock.
///
/// `advance` declares that computation consumed time: it moves a simulated
/// clock forward and is a no-op on a real clock (the computation itself
/// already took the time). `sleep` is a deliberate delay: it moves a
/// simulated clock forward and actually sleeps on a real clock.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
    fn advance(&self, ms: u64);
    fn sleep(&self, ms: u64);
    fn mode(&self) -> ClockMode;
}

/// Wall-clock time, measured from clock construction.
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            origin: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.origin.elapsed().as_millis() as u64
    }

    fn advance(&self, _ms: u64) {}

    fn sleep(&self, ms: u64) {
        std::thread::sleep(Duration::from_millis(ms));
    }

    fn mode(&self) -> ClockMode {
        ClockMode::Real
    }
}

/// Virtual clock: starts at zero, advances only on explicit charges.
pub struct SimClock {
    now: AtomicU64,
}

impl SimClock {
    pub fn new() -> Self {
        SimClock {
            now: AtomicU64::new(0),
        }
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SimClock {
    fn now_ms(&self) -> u64 {
        self.now.load(Ordering::Acquire)
    }

    fn advance(&self, ms: u64) {
        self.now.fetch_add(ms, Ordering::AcqRel);
    }

    fn sleep(&self, ms: u64) {
        self.advance(ms);
    }

    fn mode(&self) -> ClockMode {
        ClockMode::Simulated
    }
}

/// Builds the clock for the requested mode.
pub fn clock_for(mode: ClockMode) -> std::sync::Arc<dyn Clock> {
    match mode {
        ClockMode::Real => std::sync::Arc::new(SystemClock::new()),
        ClockMode::Simulated => std::sync::Arc::new(SimClock::new()),
    }
}
