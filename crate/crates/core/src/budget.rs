use std::time::{Duration, Instant};

/// Wall-clock deadline shared by the searches of one solver run.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(Option<Instant>);

/// Returned by a search that ran out of time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interrupted;

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(limit: Option<Duration>) -> Self {
        Deadline(limit.map(|d| Instant::now() + d))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.0.map(|t| t.saturating_duration_since(Instant::now()))
    }

    /// A nested deadline using `fraction` of the remaining time.
    pub fn slice(&self, fraction: f64) -> Deadline {
        match self.remaining() {
            Some(r) => Deadline(Some(Instant::now() + r.mul_f64(fraction.clamp(0.0, 1.0)))),
            None => Deadline(None),
        }
    }

    pub fn check(&self) -> Result<(), Interrupted> {
        if self.expired() {
            Err(Interrupted)
        } else {
            Ok(())
        }
    }
}
