//! ECO1 framing for COO buffers.
//!
//! ```text
//! "ECO1" | u8 format | u16 width | u16 height | u32 bins
//!        | u64 window start | u64 window end
//!        | u8 record bytes | u64 record count | records
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{expect_eof, expect_magic, truncated};
use crate::coo::CooBuffer;
use crate::error::{Error, Result};
use crate::event::{SensorGeometry, TimeWindow};
use crate::tensor::FormatTag;

pub const COO_MAGIC: &[u8; 4] = b"ECO1";

pub fn write_coo(path: &Path, buffer: &CooBuffer) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_coo_to(&mut w, buffer)?;
    w.flush()?;
    Ok(())
}

pub fn read_coo(path: &Path) -> Result<CooBuffer> {
    read_coo_from(BufReader::new(File::open(path)?))
}

pub fn write_coo_to<W: Write>(mut w: W, buffer: &CooBuffer) -> Result<()> {
    let g = buffer.geometry();
    let window = buffer.window();
    w.write_all(COO_MAGIC)?;
    w.write_u8(buffer.format().code())?;
    w.write_u16::<LittleEndian>(g.width as u16)?;
    w.write_u16::<LittleEndian>(g.height as u16)?;
    w.write_u32::<LittleEndian>(window.bins())?;
    w.write_u64::<LittleEndian>(window.start())?;
    w.write_u64::<LittleEndian>(window.end())?;
    w.write_u8(buffer.layout().record_bytes() as u8)?;
    w.write_u64::<LittleEndian>(buffer.record_count() as u64)?;
    w.write_all(buffer.bytes())?;
    Ok(())
}

pub fn read_coo_from<R: Read>(mut r: R) -> Result<CooBuffer> {
    expect_magic(&mut r, COO_MAGIC)?;
    let hdr = truncated("ECO1 header");
    let code = r.read_u8().map_err(&hdr)?;
    let format = FormatTag::from_code(code)
        .ok_or_else(|| Error::parse("ECO1 header", format!("unknown format code {code}")))?;
    let width = r.read_u16::<LittleEndian>().map_err(&hdr)?;
    let height = r.read_u16::<LittleEndian>().map_err(&hdr)?;
    let bins = r.read_u32::<LittleEndian>().map_err(&hdr)?;
    let start = r.read_u64::<LittleEndian>().map_err(&hdr)?;
    let end = r.read_u64::<LittleEndian>().map_err(&hdr)?;
    let record_bytes = r.read_u8().map_err(&hdr)? as usize;
    let count = r.read_u64::<LittleEndian>().map_err(&hdr)?;

    let geometry = SensorGeometry::new(width as u32, height as u32)?;
    let window = TimeWindow::new(start, end, bins)?;
    let expected = crate::coo::layout_for(format, geometry, bins).record_bytes();
    if record_bytes != expected {
        return Err(Error::parse(
            "ECO1 header",
            format!("record size {record_bytes} does not match {format} layout ({expected})"),
        ));
    }
    let len = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_mul(record_bytes))
        .ok_or_else(|| Error::parse("ECO1 header", "record count overflows"))?;
    let mut bytes = Vec::new();
    (&mut r).take(len as u64).read_to_end(&mut bytes)?;
    if bytes.len() != len {
        return Err(Error::parse("ECO1 payload", "truncated file"));
    }
    expect_eof(&mut r)?;
    CooBuffer::from_parts(format, geometry, window, bytes)
}
