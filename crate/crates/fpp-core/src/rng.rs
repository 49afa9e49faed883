//! Counter-based random number generation.
//!
//! Weights are a pure function of `(seed, replicate, coordinates)`: there is
//! no stream state, so a weight environment can be sampled in any order and
//! grown to any region without re-simulation, and parallel queries need no
//! synchronization. The mixer is the splitmix64 finalizer applied per
//! absorbed word, which is plenty for Monte Carlo use (it passes the
//! Kolmogorov-Smirnov checks in `weights` with a wide margin).

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn absorb(h: u64, w: u64) -> u64 {
    mix64(h.rotate_left(23) ^ w.wrapping_mul(GOLDEN))
}

/// Hash of an edge address. `code` distinguishes edge kinds: 0 east, 1 north
/// for the planar lattice; 2 left-up, 3 right-up for the oriented lattice.
#[inline]
pub fn edge_u64(seed: u64, replicate: u64, x: i64, y: i64, code: u8) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = absorb(h, replicate);
    h = absorb(h, x as u64);
    h = absorb(h, y as u64);
    absorb(h, code as u64)
}

/// Per-task seed used by the experiment drivers, derived by hashing
/// `(master, domain, n)`. Replicates enter through the field's replicate id,
/// so a partial rerun of any `(n, replicate)` slice reproduces the full run.
#[inline]
pub fn derive_seed(master: u64, domain: u64, n: u64) -> u64 {
    absorb(absorb(mix64(master ^ GOLDEN), domain), n)
}

/// Uniform in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Threshold for an exact `P[h < threshold] = p` Bernoulli on 64-bit hashes.
#[inline]
pub fn bernoulli_threshold(p: f64) -> u128 {
    if p >= 1.0 {
        1u128 << 64
    } else if p <= 0.0 {
        0
    } else {
        // round(p * 2^64) without overflowing f64 -> u64 conversion
        let scaled = p * 18_446_744_073_709_551_616.0;
        scaled as u128
    }
}
