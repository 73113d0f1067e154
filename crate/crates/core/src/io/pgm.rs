use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, TensorData};

/// Grey level for one cell: ternary `-1/0/+1` maps to `0/128/255`, counts
/// are written as-is, floats are scaled so `max` becomes 255.
pub fn display_level(data: &TensorData, idx: usize, max: f32) -> u8 {
    match data {
        TensorData::Ternary(v) => match v[idx] {
            -1 => 0,
            0 => 128,
            _ => 255,
        },
        TensorData::Count(v) => v[idx],
        TensorData::Float32(v) => {
            if max > 0.0 {
                (v[idx] / max * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        }
    }
}

/// Writes one channel as a binary (P5) PGM image.
pub fn write_pgm(path: &Path, tensor: &DenseTensor, channel: usize) -> Result<()> {
    let [channels, h, w] = tensor.dims();
    if channel >= channels {
        return Err(Error::InvalidParameter(format!(
            "channel {channel} out of range for {channels} channels"
        )));
    }
    let data = tensor.data();
    let range = channel * h * w..(channel + 1) * h * w;
    let max = range.clone().map(|i| data.get_f32(i)).fold(0.0f32, f32::max);
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{w} {h}\n255\n")?;
    let pixels: Vec<u8> = range.map(|i| display_level(data, i, max)).collect();
    out.write_all(&pixels)?;
    out.flush()?;
    Ok(())
}
