//! ETN1 tensor container.
//!
//! ```text
//! "ETN1" | u8 dtype | u8 format | u8 ndim (=3) | u32 dims[ndim]
//!        | u64 window start | u64 window end | u16 width | u16 height
//!        | payload, row-major, little-endian
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{expect_eof, expect_magic, truncated};
use crate::error::{Error, Result};
use crate::event::{SensorGeometry, TimeWindow};
use crate::tensor::{DenseTensor, Dtype, FormatTag, TensorData};

pub const TENSOR_MAGIC: &[u8; 4] = b"ETN1";

pub fn write_tensor(path: &Path, tensor: &DenseTensor) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_tensor_to(&mut w, tensor)?;
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    read_tensor_from(BufReader::new(File::open(path)?))
}

pub fn write_tensor_to<W: Write>(mut w: W, tensor: &DenseTensor) -> Result<()> {
    let window = tensor.window();
    let g = tensor.geometry();
    w.write_all(TENSOR_MAGIC)?;
    w.write_u8(tensor.dtype().code())?;
    w.write_u8(tensor.format().code())?;
    w.write_u8(3)?;
    for d in tensor.dims() {
        w.write_u32::<LittleEndian>(d as u32)?;
    }
    w.write_u64::<LittleEndian>(window.start())?;
    w.write_u64::<LittleEndian>(window.end())?;
    w.write_u16::<LittleEndian>(g.width as u16)?;
    w.write_u16::<LittleEndian>(g.height as u16)?;
    match tensor.data() {
        TensorData::Ternary(v) => {
            let bytes: Vec<u8> = v.iter().map(|&c| c as u8).collect();
            w.write_all(&bytes)?;
        }
        TensorData::Count(v) => w.write_all(v)?,
        TensorData::Float32(v) => {
            for &f in v {
                w.write_f32::<LittleEndian>(f)?;
            }
        }
    }
    Ok(())
}

pub fn read_tensor_from<R: Read>(mut r: R) -> Result<DenseTensor> {
    expect_magic(&mut r, TENSOR_MAGIC)?;
    let hdr = truncated("ETN1 header");
    let dtype_code = r.read_u8().map_err(&hdr)?;
    let format_code = r.read_u8().map_err(&hdr)?;
    let ndim = r.read_u8().map_err(&hdr)?;
    let dtype = Dtype::from_code(dtype_code)
        .ok_or_else(|| Error::parse("ETN1 header", format!("unknown dtype code {dtype_code}")))?;
    let format = FormatTag::from_code(format_code)
        .ok_or_else(|| Error::parse("ETN1 header", format!("unknown format code {format_code}")))?;
    if ndim != 3 {
        return Err(Error::parse("ETN1 header", format!("expected 3 dims, got {ndim}")));
    }
    if dtype != format.dtype() {
        return Err(Error::parse(
            "ETN1 header",
            format!("dtype {dtype:?} does not match format {format}"),
        ));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = r.read_u32::<LittleEndian>().map_err(&hdr)? as usize;
    }
    let start = r.read_u64::<LittleEndian>().map_err(&hdr)?;
    let end = r.read_u64::<LittleEndian>().map_err(&hdr)?;
    let width = r.read_u16::<LittleEndian>().map_err(&hdr)?;
    let height = r.read_u16::<LittleEndian>().map_err(&hdr)?;
    let geometry = SensorGeometry::new(width as u32, height as u32)?;

    let groups = format.polarity_groups();
    if dims[1] != height as usize || dims[2] != width as usize || dims[0] == 0 || dims[0] % groups != 0 {
        return Err(Error::parse(
            "ETN1 header",
            format!("dims {dims:?} inconsistent with {format} on {width}x{height}"),
        ));
    }
    let window = TimeWindow::new(start, end, (dims[0] / groups) as u32)?;

    let len = dims.iter().product::<usize>();
    let mut payload = vec![0u8; len * dtype.size()];
    r.read_exact(&mut payload).map_err(truncated("ETN1 payload"))?;
    expect_eof(&mut r)?;
    let data = match dtype {
        Dtype::Ternary => TensorData::Ternary(payload.into_iter().map(|b| b as i8).collect()),
        Dtype::Count => TensorData::Count(payload),
        Dtype::Float32 => TensorData::Float32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
    };
    DenseTensor::from_parts(format, geometry, window, data)
}
