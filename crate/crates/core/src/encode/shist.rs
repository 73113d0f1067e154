use crate::error::Result;
use crate::event::Chunk;
use crate::tensor::{DenseTensor, FormatTag, TensorData};

use super::check_chunk;

/// Stacked histograms: per-polarity, per-bin event counts saturating at 255.
pub fn encode_shist(chunk: &Chunk<'_>) -> Result<DenseTensor> {
    check_chunk(FormatTag::Shist, chunk)?;
    let window = chunk.window();
    let bins = window.bins() as usize;
    let mut tensor = DenseTensor::zeros(FormatTag::Shist, chunk.geometry(), window);
    let width = tensor.width();
    let plane = tensor.height() * width;
    let TensorData::Count(cells) = tensor.data_mut() else {
        unreachable!("SHIST tensors hold counts")
    };
    for ev in chunk.events() {
        let channel = ev.p.group() * bins + window.bin_unchecked(ev.t) as usize;
        let cell = &mut cells[channel * plane + ev.y as usize * width + ev.x as usize];
        *cell = cell.saturating_add(1);
    }
    Ok(tensor)
}
