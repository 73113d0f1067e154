//! Data-parallel helpers. With the `parallel` feature these run on rayon;
//! without it they fall back to plain sequential iteration with identical
//! results and ordering.

use crate::encode::encode;
use crate::error::{Error, Result};
use crate::event::Chunk;
use crate::tensor::{DenseTensor, FormatTag};

/// Order-preserving map over a slice.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Encodes every chunk, in parallel when enabled.
pub fn encode_chunks(format: FormatTag, chunks: &[Chunk<'_>]) -> Result<Vec<DenseTensor>> {
    map_slice(chunks, |c| encode(format, c)).into_iter().collect()
}

/// Sequential reference for [`encode_chunks`].
pub fn encode_chunks_sequential(format: FormatTag, chunks: &[Chunk<'_>]) -> Result<Vec<DenseTensor>> {
    chunks.iter().map(|c| encode(format, c)).collect()
}

/// Caps the global worker pool. Has to run before any parallel work; a no-op
/// without the `parallel` feature.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(Error::InvalidParameter("thread count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    Ok(())
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
