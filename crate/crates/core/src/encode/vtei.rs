use crate::error::Result;
use crate::event::Chunk;
use crate::tensor::{DenseTensor, FormatTag, TensorData};

use super::check_chunk;

/// Volume of ternary event images: each `(bin, y, x)` cell holds the polarity
/// of the last event mapped to it, background zero.
pub fn encode_vtei(chunk: &Chunk<'_>) -> Result<DenseTensor> {
    check_chunk(FormatTag::Vtei, chunk)?;
    let window = chunk.window();
    let mut tensor = DenseTensor::zeros(FormatTag::Vtei, chunk.geometry(), window);
    let width = tensor.width();
    let plane = tensor.height() * width;
    let TensorData::Ternary(cells) = tensor.data_mut() else {
        unreachable!("VTEI tensors are ternary")
    };
    for ev in chunk.events() {
        let bin = window.bin_unchecked(ev.t) as usize;
        cells[bin * plane + ev.y as usize * width + ev.x as usize] = ev.p.sign();
    }
    Ok(tensor)
}
