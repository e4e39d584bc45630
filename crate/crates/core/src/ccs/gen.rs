//! Seeded random generation of closed processes for differential and
//! property tests.

use rand::Rng;

use super::{Act, Chan, PVar, Process};

/// Shape limits for [`random_process`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Maximum nesting depth of the generated term.
    pub max_depth: u32,
    /// Free channel names the term may mention.
    pub channels: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            channels: ["a", "b", "c"].map(String::from).to_vec(),
        }
    }
}

/// Generates a closed process: every channel is free from the configured
/// pool or bound by some enclosing `nu`, and every process variable is
/// bound by some enclosing `rec`.
pub fn random_process(rng: &mut impl Rng, config: &GenConfig) -> Process {
    go(rng, config, config.max_depth, 0, 0)
}

fn go(rng: &mut impl Rng, config: &GenConfig, depth: u32, nus: u32, recs: u32) -> Process {
    if depth == 0 {
        return leaf(rng, recs);
    }
    match rng.gen_range(0u32..100) {
        0..=44 => {
            let n = rng.gen_range(1..=3);
            Process::Sum(
                (0..n)
                    .map(|_| (random_act(rng, config, nus), go(rng, config, depth - 1, nus, recs)))
                    .collect(),
            )
        }
        45..=69 => Process::Par(
            Box::new(go(rng, config, depth - 1, nus, recs)),
            Box::new(go(rng, config, depth - 1, nus, recs)),
        ),
        70..=79 => Process::New(Box::new(go(rng, config, depth - 1, nus + 1, recs))),
        80..=89 => Process::Rec(Box::new(go(rng, config, depth - 1, nus, recs + 1))),
        _ => leaf(rng, recs),
    }
}

fn leaf(rng: &mut impl Rng, recs: u32) -> Process {
    if recs > 0 && rng.gen_bool(0.4) {
        Process::Var(PVar::Bound(rng.gen_range(0..recs)))
    } else {
        Process::Nil
    }
}

fn random_act(rng: &mut impl Rng, config: &GenConfig, nus: u32) -> Act {
    let chan = if nus > 0 && rng.gen_bool(0.3) {
        Chan::Bound(rng.gen_range(0..nus))
    } else {
        Chan::Free(config.channels[rng.gen_range(0..config.channels.len())].clone())
    };
    if rng.gen_bool(0.5) {
        Act::Out(chan)
    } else {
        Act::In(chan)
    }
}
