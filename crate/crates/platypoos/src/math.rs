//! Small numeric helpers shared by schedules and oracles.
//!
//! Transcendentals go through `libm` so results are identical with and
//! without the standard library. Floor/ceil quantities that land on exact
//! integer boundaries are computed in integer arithmetic instead of floats.

pub use libm::{ceil, cos, exp, floor, log, log2, pow, sqrt};

/// `base^exp` by binary exponentiation. Deterministic and cheap for the
/// integer exponents used by discount powers.
pub fn powi(base: f64, mut e: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// n-th harmonic number `1 + 1/2 + ... + 1/n`.
///
/// Exact summation up to 10^6, asymptotic expansion beyond (error < 1e-12
/// there, far below the floor boundaries it feeds).
pub fn harmonic(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 1_000_000 {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += 1.0 / k as f64;
        }
        acc
    } else {
        const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;
        let x = n as f64;
        log(x) + EULER_MASCHERONI + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x)
    }
}

/// `floor(log2(x))` for a positive integer.
pub fn floor_log2_u64(x: u64) -> u32 {
    debug_assert!(x > 0);
    63 - x.leading_zeros()
}

/// `floor(log2(num / den))` in exact integer arithmetic; `None` when the
/// ratio is below one.
pub fn floor_log2_ratio(num: u64, den: u64) -> Option<u32> {
    debug_assert!(den > 0);
    if num < den {
        return None;
    }
    let mut k = 0u32;
    // largest k with den * 2^(k+1) <= num
    while (den as u128) << (k + 1) <= num as u128 {
        k += 1;
    }
    Some(k)
}

/// Ceiling of a non-negative float as u64.
pub fn ceil_pos(x: f64) -> u64 {
    debug_assert!(x >= 0.0 && x.is_finite());
    ceil(x) as u64
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = floor(sqrt(n as f64)) as u64;
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    while x * x > n {
        x -= 1;
    }
    x
}
