//! Chunk-to-tensor encoders.
//!
//! Every encoder is a pure function of the chunk's events, geometry and
//! window. Events are consumed in stream order, so for the last-event
//! encodings a later event overwrites an earlier one in the same cell even
//! when the timestamps tie.

mod mdes;
mod shist;
mod voxel;
mod vtei;

pub use mdes::{encode_mdes, mdes_lower_bound};
pub use shist::encode_shist;
pub use voxel::encode_voxel;
pub use vtei::encode_vtei;

use crate::error::{Error, Result};
use crate::event::Chunk;
use crate::tensor::{DenseTensor, FormatTag};

/// Encodes `chunk` with the given format.
pub fn encode(format: FormatTag, chunk: &Chunk<'_>) -> Result<DenseTensor> {
    match format {
        FormatTag::Vtei => encode_vtei(chunk),
        FormatTag::Shist => encode_shist(chunk),
        FormatTag::Mdes => encode_mdes(chunk),
        FormatTag::Voxel => encode_voxel(chunk),
    }
}

/// Rejects chunks with events outside the window or the sensor.
pub(crate) fn check_chunk(format: FormatTag, chunk: &Chunk<'_>) -> Result<()> {
    let window = chunk.window();
    if window.bins() < format.min_bins() {
        return Err(Error::TooFewBins {
            format,
            min: format.min_bins(),
            bins: window.bins(),
        });
    }
    let geometry = chunk.geometry();
    for (index, ev) in chunk.events().iter().enumerate() {
        geometry.check(index, ev)?;
        window.check(ev.t)?;
    }
    Ok(())
}
