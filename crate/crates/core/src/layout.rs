//! Cooperative-group execution layouts for bulk filter operations.
//!
//! A bulk operation on a blocked filter walks the `s` words of a key's block
//! in a fixed, parameterised order. A layout `(Θ, Φ)` models a cooperative
//! group of `Θ` lanes where each lane handles `Φ` consecutive words per step:
//! lane `l` at step `t` touches words `t·Θ·Φ + l·Φ + j` for `j in 0..Φ`.
//! Across all `s / (Θ·Φ)` steps the lanes partition the block exactly.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

/// Validated execution layout `(Θ, Φ)`.
///
/// Both factors are powers of two and their product never exceeds the number
/// of words per block of the configuration the layout is used with (the
/// product bound is checked by [`crate::FilterConfig::geometry`], since only
/// the configuration knows `s`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    theta: u32,
    phi: u32,
}

/// Rejected layout parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayoutError {
    /// Θ must be a power of two (and at least 1).
    ThetaNotPowerOfTwo(u32),
    /// Φ must be a power of two (and at least 1).
    PhiNotPowerOfTwo(u32),
    /// Θ·Φ exceeds the words per block it is meant to cover.
    ExceedsWordsPerBlock {
        /// Lanes of the rejected layout.
        theta: u32,
        /// Words per lane-step of the rejected layout.
        phi: u32,
        /// Words per block of the configuration.
        words_per_block: u32,
    },
    /// Lane index is not below Θ.
    LaneOutOfRange {
        /// Offending lane.
        lane: u32,
        /// Lane count Θ.
        theta: u32,
    },
    /// Step index is not below `s / (Θ·Φ)`.
    StepOutOfRange {
        /// Offending step.
        step: u32,
        /// Step count of this layout for the given block width.
        steps: u32,
    },
}

impl fmt::Display for LayoutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LayoutError::ThetaNotPowerOfTwo(theta) => {
                write!(f, "theta {theta} is not a power of two")
            }
            LayoutError::PhiNotPowerOfTwo(phi) => {
                write!(f, "phi {phi} is not a power of two")
            }
            LayoutError::ExceedsWordsPerBlock {
                theta,
                phi,
                words_per_block,
            } => write!(
                f,
                "layout ({theta}, {phi}) covers {} words but a block has only {words_per_block}",
                theta as u64 * phi as u64
            ),
            LayoutError::LaneOutOfRange { lane, theta } => {
                write!(f, "lane {lane} out of range for {theta} lanes")
            }
            LayoutError::StepOutOfRange { step, steps } => {
                write!(f, "step {step} out of range for {steps} steps")
            }
        }
    }
}

impl core::error::Error for LayoutError {}

impl Layout {
    /// The trivial layout `(1, 1)`: one lane, one word per step. Valid for
    /// every configuration; the default for insertions, where write combining
    /// across words buys nothing because each word is a separate atomic OR.
    pub const SCALAR: Layout = Layout { theta: 1, phi: 1 };

    /// Creates a layout after checking both factors are powers of two.
    pub fn new(theta: u32, phi: u32) -> Result<Self, LayoutError> {
        if theta == 0 || !theta.is_power_of_two() {
            return Err(LayoutError::ThetaNotPowerOfTwo(theta));
        }
        if phi == 0 || !phi.is_power_of_two() {
            return Err(LayoutError::PhiNotPowerOfTwo(phi));
        }
        Ok(Self { theta, phi })
    }

    /// Lane count Θ.
    #[inline]
    #[must_use]
    pub fn theta(self) -> u32 {
        self.theta
    }

    /// Consecutive words per lane-step Φ.
    #[inline]
    #[must_use]
    pub fn phi(self) -> u32 {
        self.phi
    }

    /// Default lookup layout for a block of `words_per_block` words:
    /// single lane, up to four words per load chunk.
    #[must_use]
    pub fn lookup_default(words_per_block: u32) -> Layout {
        debug_assert!(words_per_block.is_power_of_two());
        Layout {
            theta: 1,
            phi: words_per_block.min(4),
        }
    }

    /// Default insertion layout: [`Layout::SCALAR`].
    #[must_use]
    pub fn insert_default() -> Layout {
        Layout::SCALAR
    }

    /// Checks this layout against a block of `words_per_block` words.
    pub fn validate_for(self, words_per_block: u32) -> Result<(), LayoutError> {
        let coverage = self.theta as u64 * self.phi as u64;
        if coverage > u64::from(words_per_block) {
            return Err(LayoutError::ExceedsWordsPerBlock {
                theta: self.theta,
                phi: self.phi,
                words_per_block,
            });
        }
        Ok(())
    }

    /// Number of steps needed to cover a block of `words_per_block` words.
    #[inline]
    #[must_use]
    pub fn steps(self, words_per_block: u32) -> u32 {
        words_per_block / (self.theta * self.phi)
    }

    /// The word indices lane `lane` touches at step `step` within a block of
    /// `words_per_block` words: `step·Θ·Φ + lane·Φ .. + Φ`, a contiguous run.
    pub fn word_assignment(
        self,
        lane: u32,
        step: u32,
        words_per_block: u32,
    ) -> Result<Range<u32>, LayoutError> {
        if lane >= self.theta {
            return Err(LayoutError::LaneOutOfRange {
                lane,
                theta: self.theta,
            });
        }
        let steps = self.steps(words_per_block);
        if step >= steps {
            return Err(LayoutError::StepOutOfRange { step, steps });
        }
        let start = step * self.theta * self.phi + lane * self.phi;
        Ok(start..start + self.phi)
    }

    /// Every valid layout for a block of `words_per_block` words, in
    /// Θ-major order (ascending Θ, then ascending Φ).
    ///
    /// For `s = 2^L` that is `(L + 1)(L + 2) / 2` layouts.
    #[must_use]
    pub fn enumerate(words_per_block: u32) -> Vec<Layout> {
        debug_assert!(words_per_block.is_power_of_two());
        let mut layouts = Vec::new();
        let mut theta = 1u32;
        while theta <= words_per_block {
            let mut phi = 1u32;
            while theta * phi <= words_per_block {
                layouts.push(Layout { theta, phi });
                phi *= 2;
            }
            theta *= 2;
        }
        layouts
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.theta, self.phi)
    }
}
