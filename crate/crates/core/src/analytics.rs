//! Closed-form sizing and false-positive-rate estimates for classical
//! filters.
//!
//! With `m` bits, `n` keys, and `k` probe bits per key, the classical
//! false-positive probability is
//!
//! ```text
//! f = (1 − e^(−k·n/m))^k                                             (rate)
//! ```
//!
//! Minimising over `k` at fixed bits-per-key `c = m/n` gives
//!
//! ```text
//! k* = c·ln 2           f_min = (1/2)^(c·ln 2) = e^(−c·(ln 2)²)   (optimum)
//! ```
//!
//! and, dually, the load at which an integer `k` is optimal is
//! `n* = m·ln 2 / k` — the point where the filter is half full. Blocked and
//! sectorized variants trade away from this floor; these estimates are the
//! baseline they are compared against.
//!
//! Float math goes through `libm` so results are bit-identical with and
//! without `std`.

use core::fmt;

use libm::{exp, log, pow, round};

const LN_2: f64 = core::f64::consts::LN_2;

/// Domain violation in an analytic query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticsError {
    /// `m_bits` must be at least 1.
    ZeroBits,
    /// `k` must be at least 1.
    ZeroProbes,
    /// Bits per key must be positive and finite.
    InvalidBitsPerKey {
        /// The rejected value.
        bits_per_key: f64,
    },
    /// A target false-positive rate must lie strictly between 0 and 1.
    TargetOutOfRange {
        /// The rejected value.
        target: f64,
    },
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AnalyticsError::ZeroBits => write!(f, "filter size m must be at least 1 bit"),
            AnalyticsError::ZeroProbes => write!(f, "probe count k must be at least 1"),
            AnalyticsError::InvalidBitsPerKey { bits_per_key } => {
                write!(f, "bits per key must be positive and finite, got {bits_per_key}")
            }
            AnalyticsError::TargetOutOfRange { target } => {
                write!(f, "target false-positive rate must be in (0, 1), got {target}")
            }
        }
    }
}

impl core::error::Error for AnalyticsError {}

/// Expected false-positive rate of a classical filter with `m_bits` bits
/// holding `n_keys` keys at `k` probe bits per key.
pub fn fpr_estimate(m_bits: u64, n_keys: u64, k: u32) -> Result<f64, AnalyticsError> {
    if m_bits == 0 {
        return Err(AnalyticsError::ZeroBits);
    }
    if k == 0 {
        return Err(AnalyticsError::ZeroProbes);
    }
    let load = f64::from(k) * n_keys as f64 / m_bits as f64;
    Ok(pow(1.0 - exp(-load), f64::from(k)))
}

/// Optimal probe count for `bits_per_key = m/n`: the real-valued optimum
/// `c·ln 2` and its (at least 1) integer rounding.
pub fn optimal_k(bits_per_key: f64) -> Result<(f64, u32), AnalyticsError> {
    if !bits_per_key.is_finite() || bits_per_key <= 0.0 {
        return Err(AnalyticsError::InvalidBitsPerKey { bits_per_key });
    }
    let real = bits_per_key * LN_2;
    let rounded = round(real);
    let integer = if rounded < 1.0 { 1 } else { rounded as u32 };
    Ok((real, integer))
}

/// The false-positive floor `(1/2)^(c·ln 2)` at `bits_per_key = m/n`,
/// reached when `k = c·ln 2`.
pub fn min_fpr(bits_per_key: f64) -> Result<f64, AnalyticsError> {
    if !bits_per_key.is_finite() || bits_per_key <= 0.0 {
        return Err(AnalyticsError::InvalidBitsPerKey { bits_per_key });
    }
    Ok(exp(-bits_per_key * LN_2 * LN_2))
}

/// The key count at which integer `k` is the optimal probe count for
/// `m_bits` bits: `round(m·ln 2 / k)`, at least 1. At this load the filter
/// is half full in expectation.
pub fn optimal_n(m_bits: u64, k: u32) -> Result<u64, AnalyticsError> {
    if m_bits == 0 {
        return Err(AnalyticsError::ZeroBits);
    }
    if k == 0 {
        return Err(AnalyticsError::ZeroProbes);
    }
    let n = round(m_bits as f64 * LN_2 / f64::from(k));
    Ok(if n < 1.0 { 1 } else { n as u64 })
}

/// Sizing answer for a target false-positive rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capacity {
    /// Bits per key required: `c = −ln(target) / (ln 2)²`.
    pub bits_per_key: f64,
    /// Keys `m_bits` can hold at that density (`floor(m/c)`, at least 1).
    pub keys: u64,
    /// The matching integer probe count `round(c·ln 2)`.
    pub k: u32,
}

/// How many keys a filter of `m_bits` bits can hold while staying at or
/// below `target` false-positive rate, and the probe count to use.
pub fn capacity_for_fpr(m_bits: u64, target: f64) -> Result<Capacity, AnalyticsError> {
    if m_bits == 0 {
        return Err(AnalyticsError::ZeroBits);
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(AnalyticsError::TargetOutOfRange { target });
    }
    let bits_per_key = -log(target) / (LN_2 * LN_2);
    let keys = m_bits as f64 / bits_per_key;
    let keys = if keys < 1.0 { 1 } else { keys as u64 };
    let (_, k) = optimal_k(bits_per_key)?;
    Ok(Capacity {
        bits_per_key,
        keys,
        k,
    })
}

/// Full sizing summary for a planned filter of `m_bits` bits and `n_keys`
/// keys.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizingResult {
    /// Bits per key `c = m/n`.
    pub bits_per_key: f64,
    /// Real-valued optimal probe count `c·ln 2`.
    pub k_real: f64,
    /// Integer probe count actually recommended.
    pub k: u32,
    /// Predicted false-positive rate at the recommended `k`.
    pub predicted_fpr: f64,
    /// The false-positive floor over all `k` at this density.
    pub fpr_floor: f64,
    /// Load at which the recommended `k` is optimal.
    pub n_optimal: u64,
}

/// Sizes a classical filter: given `m_bits` and `n_keys`, recommends a probe
/// count (or evaluates a forced one) and predicts the resulting rate.
pub fn size_filter(
    m_bits: u64,
    n_keys: u64,
    forced_k: Option<u32>,
) -> Result<SizingResult, AnalyticsError> {
    if m_bits == 0 {
        return Err(AnalyticsError::ZeroBits);
    }
    if n_keys == 0 {
        // A filter holding nothing never errs; report the degenerate sizing.
        let k = forced_k.unwrap_or(1);
        if k == 0 {
            return Err(AnalyticsError::ZeroProbes);
        }
        return Ok(SizingResult {
            bits_per_key: f64::INFINITY,
            k_real: f64::INFINITY,
            k,
            predicted_fpr: 0.0,
            fpr_floor: 0.0,
            n_optimal: optimal_n(m_bits, k)?,
        });
    }
    let bits_per_key = m_bits as f64 / n_keys as f64;
    let (k_real, k_rounded) = optimal_k(bits_per_key)?;
    let k = match forced_k {
        Some(0) => return Err(AnalyticsError::ZeroProbes),
        Some(k) => k,
        None => k_rounded,
    };
    Ok(SizingResult {
        bits_per_key,
        k_real,
        k,
        predicted_fpr: fpr_estimate(m_bits, n_keys, k)?,
        fpr_floor: min_fpr(bits_per_key)?,
        n_optimal: optimal_n(m_bits, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn rate_matches_hand_computed_values() {
        // 10 bits per key, k = 7: (1 - e^{-0.7})^7 = 8.1935e-3.
        let f = fpr_estimate(10_000_000, 1_000_000, 7).unwrap();
        assert!(close(f, 8.1935e-3, 1e-4), "{f}");
        // Half-full filter at k = 16: essentially 2^-16.
        let f = fpr_estimate(1 << 25, optimal_n(1 << 25, 16).unwrap(), 16).unwrap();
        assert!(close(f, 1.0 / 65536.0, 1e-3), "{f}");
        // No keys: no false positives.
        assert_eq!(fpr_estimate(1024, 0, 4).unwrap(), 0.0);
    }

    #[test]
    fn optimum_probe_count_matches_closed_form() {
        let (real, k) = optimal_k(10.0).unwrap();
        assert!(close(real, 6.9315, 1e-4), "{real}");
        assert_eq!(k, 7);
        // 23.083 bits per key puts the optimum exactly at 16 probes.
        let (real, k) = optimal_k(16.0 / core::f64::consts::LN_2).unwrap();
        assert!(close(real, 16.0, 1e-12));
        assert_eq!(k, 16);
        // Tiny budgets still recommend at least one probe.
        assert_eq!(optimal_k(0.5).unwrap().1, 1);
    }

    #[test]
    fn floor_agrees_with_rate_at_the_optimum() {
        // At k = c·ln2 the rate formula collapses to the floor.
        for c in [8.0, 10.0, 16.0, 23.1] {
            let floor = min_fpr(c).unwrap();
            let expected = pow(0.5, c * core::f64::consts::LN_2);
            assert!(close(floor, expected, 1e-12));
            // The floor is a lower bound for every integer k.
            for k in 1..24u32 {
                let m = 1u64 << 24;
                let n = (m as f64 / c) as u64;
                assert!(fpr_estimate(m, n, k).unwrap() >= floor * 0.999);
            }
        }
        assert!(close(min_fpr(10.0).unwrap(), 8.1926e-3, 1e-4));
    }

    #[test]
    fn optimal_load_pins() {
        assert_eq!(optimal_n(1 << 25, 16).unwrap(), 1_453_635);
        assert_eq!(optimal_n(1 << 25, 1).unwrap(), 23_258_160);
        assert_eq!(optimal_n(10, 16).unwrap(), 1);
        // Definition check against independent arithmetic.
        let n = optimal_n(1 << 30, 12).unwrap();
        let direct = ((1u64 << 30) as f64 * core::f64::consts::LN_2 / 12.0).round() as u64;
        assert_eq!(n, direct);
    }

    #[test]
    fn capacity_inverts_the_floor() {
        // Target 2^-16 at m = 2^25 is the k = 16 optimum.
        let cap = capacity_for_fpr(1 << 25, 1.0 / 65536.0).unwrap();
        assert_eq!(cap.k, 16);
        assert!(close(cap.bits_per_key, 16.0 / core::f64::consts::LN_2, 1e-12));
        // Capacity floors (conservative), so it sits one below the rounded
        // optimal load 1,453,635 here.
        assert_eq!(cap.keys, 1_453_634);
        // 1% target needs ~9.585 bits per key and 7 probes.
        let cap = capacity_for_fpr(1 << 25, 0.01).unwrap();
        assert!(close(cap.bits_per_key, 9.58506, 1e-5), "{}", cap.bits_per_key);
        assert_eq!(cap.k, 7);
        // Round trip: filling to the reported capacity meets the target.
        let f = fpr_estimate(1 << 25, cap.keys, cap.k).unwrap();
        assert!(f <= 0.0102, "{f}");
    }

    #[test]
    fn sizing_summary_is_consistent() {
        let sizing = size_filter(1 << 25, 1_453_635, None).unwrap();
        assert_eq!(sizing.k, 16);
        assert!(close(sizing.predicted_fpr, 1.0 / 65536.0, 1e-3));
        assert!(sizing.fpr_floor <= sizing.predicted_fpr * 1.001);
        assert_eq!(sizing.n_optimal, 1_453_635);
        // Forcing a suboptimal k is reflected, not overridden.
        let forced = size_filter(1 << 25, 1_453_635, Some(4)).unwrap();
        assert_eq!(forced.k, 4);
        assert!(forced.predicted_fpr > sizing.predicted_fpr);
        // Degenerate empty sizing.
        let empty = size_filter(1 << 20, 0, None).unwrap();
        assert_eq!(empty.predicted_fpr, 0.0);
    }

    #[test]
    fn rate_is_monotone_in_load_and_size() {
        let m = 1u64 << 20;
        let mut previous = 0.0;
        for n in [1000u64, 10_000, 100_000, 1_000_000] {
            let f = fpr_estimate(m, n, 8).unwrap();
            assert!(f > previous);
            previous = f;
        }
        assert!(
            fpr_estimate(m * 2, 100_000, 8).unwrap() < fpr_estimate(m, 100_000, 8).unwrap()
        );
    }

    #[test]
    fn domain_violations_are_reported() {
        assert_eq!(fpr_estimate(0, 1, 1), Err(AnalyticsError::ZeroBits));
        assert_eq!(fpr_estimate(1, 1, 0), Err(AnalyticsError::ZeroProbes));
        assert!(matches!(
            optimal_k(0.0),
            Err(AnalyticsError::InvalidBitsPerKey { .. })
        ));
        assert!(matches!(
            optimal_k(f64::NAN),
            Err(AnalyticsError::InvalidBitsPerKey { .. })
        ));
        assert!(matches!(
            min_fpr(-1.0),
            Err(AnalyticsError::InvalidBitsPerKey { .. })
        ));
        assert!(matches!(
            capacity_for_fpr(1 << 20, 0.0),
            Err(AnalyticsError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            capacity_for_fpr(1 << 20, 1.0),
            Err(AnalyticsError::TargetOutOfRange { .. })
        ));
        assert_eq!(optimal_n(0, 4), Err(AnalyticsError::ZeroBits));
        assert_eq!(size_filter(1 << 20, 5, Some(0)), Err(AnalyticsError::ZeroProbes));
    }
}
