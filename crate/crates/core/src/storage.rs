//! Word-level storage: the `FilterWord` abstraction and the aligned,
//! atomically updatable bit array backing every filter.

use alloc::alloc::{alloc_zeroed, dealloc, Layout as AllocLayout};
use core::fmt;
use core::marker::PhantomData;
use core::ptr::NonNull;
use core::sync::atomic::{AtomicU32, AtomicU64, Ordering};

/// Byte alignment of filter storage.
///
/// 64 bytes is a whole cache line and is at least `min(B / 8, 32)` for every
/// valid block size `B`, so a block never straddles more cache lines than its
/// size requires.
pub const STORAGE_ALIGN: usize = 64;

/// Hints the CPU to start loading the cache line holding `ptr`.
///
/// Purely a scheduling hint: no effect on filter contents or answers, and a
/// no-op on architectures without a stable prefetch primitive.
#[inline(always)]
pub(crate) fn prefetch_read<T>(ptr: *const T) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: prefetch never faults, whatever the address.
    unsafe {
        core::arch::x86_64::_mm_prefetch(ptr.cast::<i8>(), core::arch::x86_64::_MM_HINT_T0);
    }
    #[cfg(target_arch = "aarch64")]
    // SAFETY: PRFM is a hint and never faults.
    unsafe {
        core::arch::asm!("prfm pldl1keep, [{0}]", in(reg) ptr, options(nostack, preserves_flags));
    }
    #[cfg(not(any(target_arch = "x86_64", target_arch = "aarch64")))]
    let _ = ptr;
}

/// Prefetches every cache line spanned by `slice`.
#[inline(always)]
pub(crate) fn prefetch_lines<T>(slice: &[T]) {
    let bytes = core::mem::size_of_val(slice);
    let base = slice.as_ptr().cast::<u8>();
    let mut offset = 0;
    while offset < bytes {
        // SAFETY: `offset < bytes` keeps the pointer inside the slice.
        prefetch_read(unsafe { base.add(offset) });
        offset += STORAGE_ALIGN;
    }
}

/// A machine word a filter can be built over (32- or 64-bit unsigned).
///
/// Insertions go through [`FilterWord::atomic_or`]; a relaxed fetch-OR is all
/// the engine ever needs, which keeps concurrent bulk insertion lock-free and
/// makes insertion order immaterial to the final bit pattern.
pub trait FilterWord: Copy + Eq + fmt::Debug + Send + Sync + 'static {
    /// Bits per word (32 or 64).
    const BITS: u32;
    /// `log2(BITS)`.
    const BITS_LOG2: u32;
    /// Bytes per word.
    const BYTES: usize;
    /// The all-zero word.
    const ZERO: Self;
    /// The atomic cell type sharing this word's representation.
    type Atomic: Send + Sync;

    /// A word with exactly bit `index` set (`index < BITS`).
    fn bit(index: u32) -> Self;
    /// Bitwise OR.
    fn or(self, rhs: Self) -> Self;
    /// Whether every bit of `mask` is set in `self`.
    fn contains_all(self, mask: Self) -> bool;
    /// Whether no bit is set.
    fn is_zero(self) -> bool;
    /// Population count.
    fn count_ones(self) -> u32;
    /// Relaxed atomic load.
    fn atomic_load(cell: &Self::Atomic) -> Self;
    /// Relaxed atomic fetch-OR.
    fn atomic_or(cell: &Self::Atomic, mask: Self);
    /// Writes the word into `out[..BYTES]` in little-endian order.
    fn write_le(self, out: &mut [u8]);
    /// Reads a word from `src[..BYTES]` in little-endian order.
    fn read_le(src: &[u8]) -> Self;
}

macro_rules! impl_filter_word {
    ($word:ty, $atomic:ty, $bits:expr, $log2:expr) => {
        impl FilterWord for $word {
            const BITS: u32 = $bits;
            const BITS_LOG2: u32 = $log2;
            const BYTES: usize = $bits / 8;
            const ZERO: Self = 0;
            type Atomic = $atomic;

            #[inline]
            fn bit(index: u32) -> Self {
                debug_assert!(index < Self::BITS);
                1 << index
            }

            #[inline]
            fn or(self, rhs: Self) -> Self {
                self | rhs
            }

            #[inline]
            fn contains_all(self, mask: Self) -> bool {
                self & mask == mask
            }

            #[inline]
            fn is_zero(self) -> bool {
                self == 0
            }

            #[inline]
            fn count_ones(self) -> u32 {
                <$word>::count_ones(self)
            }

            #[inline]
            fn atomic_load(cell: &Self::Atomic) -> Self {
                cell.load(Ordering::Relaxed)
            }

            #[inline]
            fn atomic_or(cell: &Self::Atomic, mask: Self) {
                cell.fetch_or(mask, Ordering::Relaxed);
            }

            #[inline]
            fn write_le(self, out: &mut [u8]) {
                out[..Self::BYTES].copy_from_slice(&self.to_le_bytes());
            }

            #[inline]
            fn read_le(src: &[u8]) -> Self {
                Self::from_le_bytes(src[..Self::BYTES].try_into().unwrap())
            }
        }
    };
}

impl_filter_word!(u32, AtomicU32, 32, 5);
impl_filter_word!(u64, AtomicU64, 64, 6);

/// Storage allocation failure (the requested zeroed block was refused by the
/// allocator).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AllocError {
    /// Size of the refused request.
    pub bytes: usize,
}

impl fmt::Display for AllocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "failed to allocate {} bytes of filter storage", self.bytes)
    }
}

impl core::error::Error for AllocError {}

/// A cache-line-aligned, zero-initialised array of atomic words.
///
/// This is deliberately not a `Vec`: the global allocator gives a `Vec` no
/// alignment beyond the word's own, while blocked filters want whole blocks
/// on as few cache lines as possible. Allocation failure is reported as a
/// value instead of aborting, so oversized benchmark requests degrade into an
/// error row rather than killing the process.
pub struct AlignedAtomics<W: FilterWord> {
    ptr: NonNull<u8>,
    words: usize,
    _marker: PhantomData<W>,
}

// SAFETY: the storage is an array of atomic integers; `&AlignedAtomics` only
// hands out `&[W::Atomic]`, which is Send + Sync by construction.
unsafe impl<W: FilterWord> Send for AlignedAtomics<W> {}
unsafe impl<W: FilterWord> Sync for AlignedAtomics<W> {}

impl<W: FilterWord> AlignedAtomics<W> {
    /// Allocates `words` zeroed atomic words aligned to [`STORAGE_ALIGN`].
    pub fn new_zeroed(words: usize) -> Result<Self, AllocError> {
        let bytes = words.checked_mul(W::BYTES).ok_or(AllocError { bytes: usize::MAX })?;
        if bytes == 0 {
            return Ok(Self {
                // Dangling but aligned for the atomic cell type, as required
                // even by an empty slice.
                ptr: NonNull::<W::Atomic>::dangling().cast(),
                words: 0,
                _marker: PhantomData,
            });
        }
        let layout = AllocLayout::from_size_align(bytes, STORAGE_ALIGN)
            .map_err(|_| AllocError { bytes })?;
        // SAFETY: `layout` has non-zero size.
        let raw = unsafe { alloc_zeroed(layout) };
        let ptr = NonNull::new(raw).ok_or(AllocError { bytes })?;
        Ok(Self {
            ptr,
            words,
            _marker: PhantomData,
        })
    }

    /// Number of words.
    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.words
    }

    /// Whether the array is empty.
    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.words == 0
    }

    /// The words as a slice of atomic cells.
    #[inline]
    #[must_use]
    pub fn cells(&self) -> &[W::Atomic] {
        // SAFETY: the buffer was allocated zeroed with room and alignment for
        // `words` atomic cells; an all-zero bit pattern is a valid atomic
        // integer, and the pointer is dangling only when `words == 0`.
        unsafe { core::slice::from_raw_parts(self.ptr.as_ptr().cast::<W::Atomic>(), self.words) }
    }
}

impl<W: FilterWord> Drop for AlignedAtomics<W> {
    fn drop(&mut self) {
        if self.words == 0 {
            return;
        }
        let bytes = self.words * W::BYTES;
        let layout = AllocLayout::from_size_align(bytes, STORAGE_ALIGN)
            .expect("layout was validated at allocation");
        // SAFETY: allocated in `new_zeroed` with exactly this layout.
        unsafe { dealloc(self.ptr.as_ptr(), layout) };
    }
}

impl<W: FilterWord> fmt::Debug for AlignedAtomics<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlignedAtomics")
            .field("words", &self.words)
            .field("word_bits", &W::BITS)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_is_zeroed_and_aligned() {
        let storage = AlignedAtomics::<u64>::new_zeroed(1024).unwrap();
        assert_eq!(storage.len(), 1024);
        assert_eq!(storage.cells().as_ptr() as usize % STORAGE_ALIGN, 0);
        assert!(storage
            .cells()
            .iter()
            .all(|cell| u64::atomic_load(cell) == 0));
    }

    #[test]
    fn fetch_or_accumulates_bits() {
        let storage = AlignedAtomics::<u32>::new_zeroed(4).unwrap();
        u32::atomic_or(&storage.cells()[2], 0b1010);
        u32::atomic_or(&storage.cells()[2], 0b0110);
        assert_eq!(u32::atomic_load(&storage.cells()[2]), 0b1110);
        assert_eq!(u32::atomic_load(&storage.cells()[0]), 0);
    }

    #[test]
    fn empty_allocation_is_permitted() {
        let storage = AlignedAtomics::<u64>::new_zeroed(0).unwrap();
        assert!(storage.is_empty());
        assert!(storage.cells().is_empty());
    }

    #[test]
    fn word_round_trips_little_endian() {
        let mut buf = [0u8; 8];
        0xDEAD_BEEF_u32.write_le(&mut buf);
        assert_eq!(u32::read_le(&buf), 0xDEAD_BEEF);
        assert_eq!(&buf[..4], &[0xEF, 0xBE, 0xAD, 0xDE]);
        0x0102_0304_0506_0708_u64.write_le(&mut buf);
        assert_eq!(u64::read_le(&buf), 0x0102_0304_0506_0708);
    }

    #[test]
    fn bit_helpers_behave() {
        assert_eq!(u64::bit(0), 1);
        assert_eq!(u64::bit(63), 1 << 63);
        assert!(0b111_u64.contains_all(0b101));
        assert!(!0b101_u64.contains_all(0b111));
        assert!(u32::ZERO.is_zero());
        assert_eq!(0xFF_u64.count_ones(), 8);
    }

    #[test]
    fn concurrent_or_loses_no_bits() {
        use std::sync::Arc;
        let storage = Arc::new(AlignedAtomics::<u64>::new_zeroed(64).unwrap());
        std::thread::scope(|scope| {
            for t in 0..8u32 {
                let storage = Arc::clone(&storage);
                scope.spawn(move || {
                    for i in 0..64u32 {
                        u64::atomic_or(&storage.cells()[i as usize], 1 << ((t * 8 + i) % 64));
                    }
                });
            }
        });
        for i in 0..64usize {
            let word = u64::atomic_load(&storage.cells()[i]);
            for t in 0..8u32 {
                assert!(word & (1 << ((t * 8 + i as u32) % 64)) != 0);
            }
        }
    }
}
