use crate::error::Result;
use crate::event::{Chunk, TimeWindow};
use crate::tensor::{DenseTensor, FormatTag, TensorData};

use super::check_chunk;

/// Mixed-density event stacks.
///
/// Bin `i` covers the trailing sub-window `[end - T/2^i, end]`, so bin 0 is
/// the full window and every following bin halves the span. Each cell keeps
/// the polarity of the last event inside its bin's sub-window.
pub fn encode_mdes(chunk: &Chunk<'_>) -> Result<DenseTensor> {
    check_chunk(FormatTag::Mdes, chunk)?;
    let window = chunk.window();
    let bins = window.bins();
    let mut tensor = DenseTensor::zeros(FormatTag::Mdes, chunk.geometry(), window);
    let width = tensor.width();
    let plane = tensor.height() * width;
    let TensorData::Ternary(cells) = tensor.data_mut() else {
        unreachable!("MDES tensors are ternary")
    };

    // Sub-windows are nested, so an event belongs to bins 0..depth.
    let bounds: Vec<u64> = (0..bins).map(|i| mdes_lower_bound(&window, i)).collect();
    for ev in chunk.events() {
        let depth = bounds.partition_point(|&lo| lo <= ev.t);
        let pixel = ev.y as usize * width + ev.x as usize;
        let sign = ev.p.sign();
        for bin in 0..depth {
            cells[bin * plane + pixel] = sign;
        }
    }
    Ok(tensor)
}

/// Smallest integer timestamp inside MDES bin `bin`, i.e. `ceil(end - T/2^bin)`.
pub fn mdes_lower_bound(window: &TimeWindow, bin: u32) -> u64 {
    let length = window.length() as u128;
    let scale = 1u128 << bin.min(63);
    // t - start >= T - T/2^i  <=>  (t - start) * 2^i >= T * (2^i - 1)
    let offset = (length * (scale - 1)).div_ceil(scale);
    window.start() + offset as u64
}
