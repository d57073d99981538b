//! Slot-level simulator of saturated slotted Aloha on the collision channel.
//!
//! Every user has a backlogged queue and contends each slot with its fixed
//! probability; a slot is a success iff exactly one user transmits. Each
//! user draws from its own deterministic stream derived from
//! `(seed, user index)`, so reports are bit-for-bit reproducible and
//! independent of iteration order.

use serde::Serialize;

use crate::model::ControlVector;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub p: ControlVector,
    pub slots: u64,
    pub seed: u64,
    pub success_counts: Vec<u64>,
    pub empirical_rates: Vec<f64>,
    pub idle_slots: u64,
    pub collision_slots: u64,
    pub success_slots: u64,
}

pub fn simulate_saturated(p: &ControlVector, slots: u64, seed: u64) -> SimReport {
    assert!(slots >= 1, "need at least one slot");
    let n = p.len();
    // Transmit iff the next 64-bit draw falls below p_i * 2^64.
    let thresholds: Vec<u128> = p
        .components()
        .iter()
        .map(|&pi| (pi * 18_446_744_073_709_551_616.0) as u128)
        .collect();
    let mut streams: Vec<SplitMix64> = (0..n)
        .map(|i| SplitMix64::stream(seed, i as u64))
        .collect();

    let mut success_counts = vec![0u64; n];
    let (mut idle, mut collision, mut success) = (0u64, 0u64, 0u64);
    for _ in 0..slots {
        let mut transmitter = usize::MAX;
        let mut count = 0u32;
        for (i, stream) in streams.iter_mut().enumerate() {
            if (stream.next_u64() as u128) < thresholds[i] {
                count += 1;
                transmitter = i;
            }
        }
        match count {
            0 => idle += 1,
            1 => {
                success += 1;
                success_counts[transmitter] += 1;
            }
            _ => collision += 1,
        }
    }
    let empirical_rates = success_counts
        .iter()
        .map(|&c| c as f64 / slots as f64)
        .collect();
    SimReport {
        p: p.clone(),
        slots,
        seed,
        success_counts,
        empirical_rates,
        idle_slots: idle,
        collision_slots: collision,
        success_slots: success,
    }
}
