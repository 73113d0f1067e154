//! Coordinate-list (COO) codec following the per-record byte model.
//!
//! Each non-zero cell becomes one fixed-size record. Fields are packed
//! least-significant bit first in the order `x, y, bin, channel, data`, and the
//! resulting word is written little-endian, zero-padded to whole bytes:
//!
//! | format | x | y | bin | channel | data |
//! |--------|---|---|-----|---------|------|
//! | VTEI / MDES | ceil(log2 W) | ceil(log2 H) | ceil(log2 B) | 0 | 1 (0 = -1, 1 = +1) |
//! | SHIST | ceil(log2 W) | ceil(log2 H) | ceil(log2 B) | 1 | 8 (count) |
//! | VOXEL | ceil(log2 W) | ceil(log2 H) | ceil(log2 B) | 1 | 16 (binary16) |
//!
//! Records are ordered by `(channel, bin, y, x)`, which is the row-major order
//! of the dense tensor.

use half::f16;

use crate::error::{Error, Result};
use crate::event::{SensorGeometry, TimeWindow};
use crate::tensor::{DenseTensor, FormatTag, TensorData};

/// Bit widths of one COO record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CooLayout {
    pub x_bits: u32,
    pub y_bits: u32,
    pub bin_bits: u32,
    pub channel_bits: u32,
    pub data_bits: u32,
}

impl CooLayout {
    pub fn total_bits(&self) -> u32 {
        self.x_bits + self.y_bits + self.bin_bits + self.channel_bits + self.data_bits
    }

    pub fn record_bytes(&self) -> usize {
        self.total_bits().div_ceil(8) as usize
    }

    fn shifts(&self) -> [u32; 5] {
        let y = self.x_bits;
        let bin = y + self.y_bits;
        let channel = bin + self.bin_bits;
        let data = channel + self.channel_bits;
        [0, y, bin, channel, data]
    }
}

/// `ceil(log2(n))`, with `n <= 1` needing no bits.
pub fn bits_for(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Record layout for a format at the given geometry and bin count.
pub fn layout_for(format: FormatTag, geometry: SensorGeometry, bins: u32) -> CooLayout {
    let (channel_bits, data_bits) = match format {
        FormatTag::Vtei | FormatTag::Mdes => (0, 1),
        FormatTag::Shist => (1, 8),
        FormatTag::Voxel => (1, 16),
    };
    CooLayout {
        x_bits: bits_for(geometry.width as u64),
        y_bits: bits_for(geometry.height as u64),
        bin_bits: bits_for(bins as u64),
        channel_bits,
        data_bits,
    }
}

/// Rounds a voxel weight to the stored binary16 payload.
///
/// Round-to-nearest-even, except that non-zero values never collapse to zero
/// (they become the smallest subnormal of matching sign) and magnitudes above
/// the largest finite half saturate to it.
pub fn voxel_payload(value: f32) -> u16 {
    let h = f16::from_f32(value);
    if h.is_infinite() {
        return if value.is_sign_negative() {
            f16::MIN.to_bits()
        } else {
            f16::MAX.to_bits()
        };
    }
    if value != 0.0 && h.to_bits() & 0x7fff == 0 {
        return h.to_bits() | 0x0001;
    }
    h.to_bits()
}

/// The value a voxel weight decodes to after a COO roundtrip.
pub fn quantize_voxel(value: f32) -> f32 {
    if value == 0.0 {
        0.0
    } else {
        f16::from_bits(voxel_payload(value)).to_f32()
    }
}

/// Packed COO records plus the metadata needed to rebuild the dense tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooBuffer {
    layout: CooLayout,
    format: FormatTag,
    geometry: SensorGeometry,
    window: TimeWindow,
    record_count: usize,
    bytes: Vec<u8>,
}

impl CooBuffer {
    pub fn from_parts(
        format: FormatTag,
        geometry: SensorGeometry,
        window: TimeWindow,
        bytes: Vec<u8>,
    ) -> Result<Self> {
        let layout = layout_for(format, geometry, window.bins());
        let rb = layout.record_bytes();
        if !bytes.len().is_multiple_of(rb) {
            return Err(Error::Corrupt(format!(
                "payload of {} bytes is not a multiple of the {rb}-byte record",
                bytes.len()
            )));
        }
        Ok(CooBuffer {
            layout,
            format,
            geometry,
            window,
            record_count: bytes.len() / rb,
            bytes,
        })
    }

    pub fn layout(&self) -> CooLayout {
        self.layout
    }

    pub fn format(&self) -> FormatTag {
        self.format
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn record_count(&self) -> usize {
        self.record_count
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn encoded_bytes(&self) -> usize {
        self.bytes.len()
    }

    /// Iterates the unpacked records.
    pub fn records(&self) -> impl Iterator<Item = CooRecord> + '_ {
        let layout = self.layout;
        self.bytes
            .chunks_exact(layout.record_bytes())
            .map(move |rec| unpack(&layout, rec))
    }
}

/// One unpacked record. `data` is the raw payload bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CooRecord {
    pub x: u32,
    pub y: u32,
    pub bin: u32,
    pub channel: u32,
    pub data: u32,
    /// Bits above the data field; always zero in a well-formed record.
    pub padding: u128,
}

fn mask(bits: u32) -> u128 {
    if bits == 0 {
        0
    } else {
        (1u128 << bits) - 1
    }
}

fn pack(layout: &CooLayout, rec: &CooRecord, out: &mut Vec<u8>) {
    let [sx, sy, sb, sc, sd] = layout.shifts();
    let word = (rec.x as u128) << sx
        | (rec.y as u128) << sy
        | (rec.bin as u128) << sb
        | (rec.channel as u128) << sc
        | (rec.data as u128) << sd;
    out.extend_from_slice(&word.to_le_bytes()[..layout.record_bytes()]);
}

fn unpack(layout: &CooLayout, bytes: &[u8]) -> CooRecord {
    let mut buf = [0u8; 16];
    buf[..bytes.len()].copy_from_slice(bytes);
    let word = u128::from_le_bytes(buf);
    let [sx, sy, sb, sc, sd] = layout.shifts();
    CooRecord {
        x: ((word >> sx) & mask(layout.x_bits)) as u32,
        y: ((word >> sy) & mask(layout.y_bits)) as u32,
        bin: ((word >> sb) & mask(layout.bin_bits)) as u32,
        channel: ((word >> sc) & mask(layout.channel_bits)) as u32,
        data: ((word >> sd) & mask(layout.data_bits)) as u32,
        padding: word >> layout.total_bits(),
    }
}

/// Packs every non-zero cell of `tensor` into a COO record.
pub fn coo_encode(tensor: &DenseTensor) -> Result<CooBuffer> {
    let format = tensor.format();
    let bins = tensor.bins() as usize;
    let layout = layout_for(format, tensor.geometry(), tensor.bins());
    let [_, height, width] = tensor.dims();
    let plane = height * width;
    let data = tensor.data();

    let payload = |idx: usize| -> Result<u32> {
        match data {
            TensorData::Ternary(v) => match v[idx] {
                1 => Ok(1),
                -1 => Ok(0),
                other => Err(Error::Codec(format!(
                    "{format} cell {idx} holds non-ternary value {other}"
                ))),
            },
            TensorData::Count(v) => Ok(v[idx] as u32),
            TensorData::Float32(v) => Ok(voxel_payload(v[idx]) as u32),
        }
    };

    let nonzeros = tensor.count_nonzeros();
    let mut bytes = Vec::with_capacity(nonzeros * layout.record_bytes());
    for idx in (0..data.len()).filter(|&i| data.is_nonzero(i)) {
        let c = idx / plane;
        let rem = idx % plane;
        let rec = CooRecord {
            x: (rem % width) as u32,
            y: (rem / width) as u32,
            bin: (c % bins) as u32,
            channel: (c / bins) as u32,
            data: payload(idx)?,
            padding: 0,
        };
        pack(&layout, &rec, &mut bytes);
    }
    CooBuffer::from_parts(format, tensor.geometry(), tensor.window(), bytes)
}

/// Rebuilds the dense tensor. Rejects records that are out of range,
/// unordered, duplicated, zero-valued or carry stray padding bits, so that a
/// successful decode always re-encodes to the same bytes.
pub fn coo_decode(buffer: &CooBuffer) -> Result<DenseTensor> {
    let format = buffer.format();
    let geometry = buffer.geometry();
    let bins = buffer.window().bins();
    let groups = format.polarity_groups() as u32;
    let width = geometry.width as usize;
    let plane = geometry.pixels();
    let mut tensor = DenseTensor::zeros(format, geometry, buffer.window());
    let data = tensor.data_mut();

    let mut prev: Option<usize> = None;
    for (n, rec) in buffer.records().enumerate() {
        let corrupt = |what: String| Error::Corrupt(format!("record {n}: {what}"));
        if rec.padding != 0 {
            return Err(corrupt("non-zero padding bits".into()));
        }
        if rec.x >= geometry.width || rec.y >= geometry.height {
            return Err(corrupt(format!(
                "pixel ({}, {}) outside {}x{}",
                rec.x, rec.y, geometry.width, geometry.height
            )));
        }
        if rec.bin >= bins || rec.channel >= groups {
            return Err(corrupt(format!(
                "bin {} / channel {} outside {bins} bins x {groups} groups",
                rec.bin, rec.channel
            )));
        }
        let c = (rec.channel * bins + rec.bin) as usize;
        let idx = c * plane + rec.y as usize * width + rec.x as usize;
        if prev.is_some_and(|p| idx <= p) {
            return Err(corrupt("records out of (channel, bin, y, x) order".into()));
        }
        prev = Some(idx);

        match data {
            TensorData::Ternary(v) => v[idx] = if rec.data == 1 { 1 } else { -1 },
            TensorData::Count(v) => {
                if rec.data == 0 {
                    return Err(corrupt("zero count".into()));
                }
                v[idx] = rec.data as u8;
            }
            TensorData::Float32(v) => {
                let h = f16::from_bits(rec.data as u16);
                if rec.data & 0x7fff == 0 || !h.is_finite() {
                    return Err(corrupt(format!("invalid half payload {:#06x}", rec.data)));
                }
                v[idx] = h.to_f32();
            }
        }
    }
    Ok(tensor)
}
