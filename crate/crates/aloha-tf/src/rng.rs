//! Deterministic 64-bit generator (SplitMix64) for the simulator and
//! sampling probes. Each user gets its own stream derived from
//! `(seed, index)`, so results do not depend on iteration order.

#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    #[cfg(test)]
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream `index` under `seed`; double mixing decorrelates nearby pairs.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self {
            state: mix64(seed ^ mix64(index.wrapping_add(GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
