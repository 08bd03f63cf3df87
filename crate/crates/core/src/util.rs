//! Small shared helpers: stable hashing, seed derivation, float formatting.

/// FNV-1a 64-bit offset basis.
pub const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
/// FNV-1a 64-bit prime.
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over raw bytes, starting from `state`.
#[inline]
pub fn fnv1a64_from(state: u64, bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(state, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

#[inline]
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_from(FNV_OFFSET, bytes)
}

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-stage seed: `mix64(seed ^ fnv1a64(stage))`.
///
/// Every random stage of the pipeline takes its seed from here so a single
/// configuration seed reproduces a whole run.
pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    mix64(seed ^ fnv1a64(stage.as_bytes()))
}

/// Formats with 17 significant digits, enough for a lossless f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `w·a + (1−w)·b`, computed as `b + w·(a − b)` so that `w = 1` and
/// `w = 0` return an endpoint exactly and the result never leaves `[min, max]`.
pub fn lerp(a: f64, b: f64, w: f64) -> f64 {
    if w == 1.0 {
        return a;
    }
    if w == 0.0 {
        return b;
    }
    (b + w * (a - b)).clamp(a.min(b), a.max(b))
}
