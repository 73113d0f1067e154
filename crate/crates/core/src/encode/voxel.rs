use crate::error::Result;
use crate::event::Chunk;
use crate::tensor::{DenseTensor, FormatTag, TensorData};

use super::check_chunk;

/// Voxel grid with a bilinear temporal kernel.
///
/// Timestamps are normalized to `t* in [0, B-1]`; each event adds
/// `max(0, 1 - |i - t*|)` to bin `i` of its polarity group. Requires `B >= 2`.
pub fn encode_voxel(chunk: &Chunk<'_>) -> Result<DenseTensor> {
    check_chunk(FormatTag::Voxel, chunk)?;
    let window = chunk.window();
    let bins = window.bins() as usize;
    let span = (bins - 1) as f64;
    let length = window.length() as f64;
    let mut tensor = DenseTensor::zeros(FormatTag::Voxel, chunk.geometry(), window);
    let width = tensor.width();
    let plane = tensor.height() * width;
    let TensorData::Float32(cells) = tensor.data_mut() else {
        unreachable!("voxel tensors are float")
    };
    for ev in chunk.events() {
        let t_norm = (ev.t - window.start()) as f64 / length * span;
        let lower = (t_norm.floor() as usize).min(bins - 1);
        let frac = t_norm - lower as f64;
        let base = ev.p.group() * bins;
        let pixel = ev.y as usize * width + ev.x as usize;
        cells[(base + lower) * plane + pixel] += (1.0 - frac) as f32;
        if frac > 0.0 {
            cells[(base + lower + 1) * plane + pixel] += frac as f32;
        }
    }
    Ok(tensor)
}
