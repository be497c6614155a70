//! Counter-based random numbers.
//!
//! Every draw is a pure function of `(master seed, stream, realization,
//! component, step)`, so a realization can be regenerated in isolation and
//! results do not depend on evaluation order or thread scheduling.

/// Distinguishes independent uses of the same master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Noise = 1,
    States = 2,
    Offsets = 3,
}

/// Identifies one noise realization: the master seed of a run and the
/// realization's index within it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RealizationSeed {
    pub master: u64,
    pub index: u64,
}

impl RealizationSeed {
    pub const fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }
}

impl From<u64> for RealizationSeed {
    fn from(master: u64) -> Self {
        Self::new(master, 0)
    }
}

#[inline]
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Keyed generator: a fixed key plus a per-draw counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: RealizationSeed, stream: Stream) -> Self {
        let mut k = splitmix_finalize(seed.master.wrapping_add(GOLDEN));
        k = splitmix_finalize(k ^ (stream as u64).wrapping_mul(GOLDEN));
        k = splitmix_finalize(
            k ^ seed
                .index
                .wrapping_add(1)
                .wrapping_mul(0xd6e8_feb8_6659_fd93),
        );
        Self { key: k }
    }

    /// Raw 64-bit output for `(component, step)`.
    pub fn bits(&self, component: u64, step: u64) -> u64 {
        let a = splitmix_finalize(self.key ^ component.wrapping_add(1).wrapping_mul(GOLDEN));
        splitmix_finalize(a.wrapping_add(step.wrapping_mul(GOLDEN)) ^ 0x5851_f42d_4c95_7f2d)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit(&self, component: u64, step: u64) -> f64 {
        (self.bits(component, step) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&self, lo: f64, hi: f64, component: u64, step: u64) -> f64 {
        lo + (hi - lo) * self.unit(component, step)
    }

    /// Uniform in `[−a, a)`.
    pub fn symmetric(&self, a: f64, component: u64, step: u64) -> f64 {
        self.uniform(-a, a, component, step)
    }
}
