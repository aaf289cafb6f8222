use super::DeviceProfile;
use crate::emit::ElementKind;
use crate::rng::SplitMix64;

/// Synthesized performance counters for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub cpu_pct: f64,
    pub mem_mb: f64,
    pub duration_ms: u64,
}

/// Deterministic stand-in for device performance counters: the profile's
/// envelope plus seeded jitter. Actions cost more than assertions and memory
/// grows slowly with the number of transitions taken.
#[derive(Debug, Clone)]
pub struct PerfSampler {
    cpu_base: f64,
    mem_base: f64,
    rng: SplitMix64,
}

fn tenth(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

impl PerfSampler {
    pub fn new(profile: &DeviceProfile) -> Self {
        PerfSampler {
            cpu_base: profile.perf.cpu_base,
            mem_base: profile.perf.mem_base,
            rng: SplitMix64::new(profile.perf.jitter_seed),
        }
    }

    pub fn sample(&mut self, kind: ElementKind, transitions: usize) -> Sample {
        let (load, base_ms, spread_ms) = match kind {
            ElementKind::Edge => (12.0, 150, 60),
            ElementKind::Node => (3.0, 30, 15),
        };
        let jitter = self.rng.unit() * 8.0 - 4.0;
        let cpu_pct = tenth((self.cpu_base + load + jitter).clamp(0.0, 100.0));
        let mem_mb = tenth(self.mem_base + 0.25 * transitions as f64 + self.rng.unit() * 3.0);
        let duration_ms = base_ms + self.rng.below(spread_ms);
        Sample {
            cpu_pct,
            mem_mb,
            duration_ms,
        }
    }
}
