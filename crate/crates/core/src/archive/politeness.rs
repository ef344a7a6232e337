//! Per-host politeness: caps in-flight requests and spaces consecutive
//! request starts.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

#[derive(Debug, Default)]
struct HostState {
    in_flight: usize,
    next_allowed: Option<Instant>,
}

/// Shared limiter: at most `max_parallel` requests in flight per host, and
/// consecutive request starts to one host spaced at least `delay` apart.
#[derive(Debug)]
pub struct PolitenessLimiter {
    delay: Duration,
    max_parallel: usize,
    hosts: Mutex<HashMap<String, HostState>>,
    wakeup: Condvar,
}

impl PolitenessLimiter {
    pub fn new(delay_ms: u64, max_parallel: usize) -> Self {
        PolitenessLimiter {
            delay: Duration::from_millis(delay_ms),
            max_parallel: max_parallel.max(1),
            hosts: Mutex::new(HashMap::new()),
            wakeup: Condvar::new(),
        }
    }

    /// Block until a request to `host` may start. The permit releases its
    /// in-flight slot on drop.
    pub fn acquire<'a>(&'a self, host: &str) -> PolitenessPermit<'a> {
        let mut hosts = self.hosts.lock().unwrap();
        loop {
            let now = Instant::now();
            let state = hosts.entry(host.to_string()).or_default();
            if state.in_flight < self.max_parallel {
                match state.next_allowed {
                    Some(at) if at > now => {
                        let wait = at - now;
                        let (guard, _) = self.wakeup.wait_timeout(hosts, wait).unwrap();
                        hosts = guard;
                    }
                    _ => {
                        state.in_flight += 1;
                        state.next_allowed = Some(now + self.delay);
                        return PolitenessPermit {
                            limiter: self,
                            host: host.to_string(),
                        };
                    }
                }
            } else {
                hosts = self.wakeup.wait(hosts).unwrap();
            }
        }
    }

    fn release(&self, host: &str) {
        let mut hosts = self.hosts.lock().unwrap();
        if let Some(state) = hosts.get_mut(host) {
            state.in_flight = state.in_flight.saturating_sub(1);
        }
        self.wakeup.notify_all();
    }
}

/// An in-flight slot for one host.
#[derive(Debug)]
pub struct PolitenessPermit<'a> {
    limiter: &'a PolitenessLimiter,
    host: String,
}

impl Drop for PolitenessPermit<'_> {
    fn drop(&mut self) {
        self.limiter.release(&self.host);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    #[test]
    fn spaces_consecutive_starts_and_caps_parallelism() {
        let limiter = Arc::new(PolitenessLimiter::new(10, 2));
        let in_flight = Arc::new(AtomicUsize::new(0));
        let max_seen = Arc::new(AtomicUsize::new(0));
        let starts = Arc::new(Mutex::new(Vec::new()));

        let mut handles = Vec::new();
        for _ in 0..8 {
            let limiter = Arc::clone(&limiter);
            let in_flight = Arc::clone(&in_flight);
            let max_seen = Arc::clone(&max_seen);
            let starts = Arc::clone(&starts);
            handles.push(std::thread::spawn(move || {
                let _permit = limiter.acquire("archive.example");
                starts.lock().unwrap().push(Instant::now());
                let now = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
                max_seen.fetch_max(now, Ordering::SeqCst);
                std::thread::sleep(Duration::from_millis(5));
                in_flight.fetch_sub(1, Ordering::SeqCst);
            }));
        }
        for h in handles {
            h.join().unwrap();
        }

        assert!(max_seen.load(Ordering::SeqCst) <= 2);
        let mut starts = starts.lock().unwrap();
        starts.sort();
        for pair in starts.windows(2) {
            let gap = pair[1].duration_since(pair[0]);
            assert!(
                gap >= Duration::from_millis(9),
                "consecutive starts only {gap:?} apart"
            );
        }
    }

    #[test]
    fn hosts_are_independent() {
        let limiter = PolitenessLimiter::new(60_000, 1);
        let t0 = Instant::now();
        let _a = limiter.acquire("host-a.example");
        let _b = limiter.acquire("host-b.example");
        assert!(t0.elapsed() < Duration::from_secs(5));
    }
}
