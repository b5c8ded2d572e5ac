use crate::adversary::StrategyId;
use crate::branch::{BranchSource, SeededSource};

use super::{run_protocol, ProtocolConfig, ProtocolError, RoundKey, RunOutcome};

/// Stream index reserved for drawing a run's keys.
const KEY_STREAM: u64 = u64::MAX;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `run`-th independent run under `seed`.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    mix(seed.wrapping_add(run.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Uniform round keys for a run, drawn from its dedicated key stream.
pub fn draw_keys(seed: u64, rounds: usize) -> Vec<RoundKey> {
    let mut src = SeededSource::for_stream(seed, KEY_STREAM);
    (0..rounds).map(|_| RoundKey::from_index(src.pick_uniform(4))).collect()
}

/// `runs` independent runs with fresh uniformly random keys.
pub fn run_sampled(config: &ProtocolConfig, strategy: StrategyId, runs: usize) -> Result<Vec<RunOutcome>, ProtocolError> {
    (0..runs as u64)
        .map(|i| {
            let cfg = ProtocolConfig {
                seed: run_seed(config.seed, i),
                ..config.clone()
            };
            let keys = draw_keys(cfg.seed, cfg.rounds);
            run_protocol(&cfg, &keys, strategy)
        })
        .collect()
}
