//! Dense `C x H x W` tensors produced by the encoders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{SensorGeometry, TimeWindow};

/// The four fixed-window encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatTag {
    Vtei,
    Shist,
    Mdes,
    Voxel,
}

impl FormatTag {
    pub const ALL: [FormatTag; 4] = [
        FormatTag::Vtei,
        FormatTag::Shist,
        FormatTag::Mdes,
        FormatTag::Voxel,
    ];

    /// On-disk code used by the container formats.
    pub fn code(self) -> u8 {
        match self {
            FormatTag::Vtei => 0,
            FormatTag::Shist => 1,
            FormatTag::Mdes => 2,
            FormatTag::Voxel => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        FormatTag::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            FormatTag::Vtei => "vtei",
            FormatTag::Shist => "shist",
            FormatTag::Mdes => "mdes",
            FormatTag::Voxel => "voxel",
        }
    }

    /// Polarity groups per bin: 1 for the sign-valued encodings, 2 otherwise.
    pub fn polarity_groups(self) -> usize {
        match self {
            FormatTag::Vtei | FormatTag::Mdes => 1,
            FormatTag::Shist | FormatTag::Voxel => 2,
        }
    }

    pub fn is_signed(self) -> bool {
        self.polarity_groups() == 1
    }

    pub fn dtype(self) -> Dtype {
        match self {
            FormatTag::Vtei | FormatTag::Mdes => Dtype::Ternary,
            FormatTag::Shist => Dtype::Count,
            FormatTag::Voxel => Dtype::Float32,
        }
    }

    pub fn min_bins(self) -> u32 {
        match self {
            FormatTag::Voxel => 2,
            _ => 1,
        }
    }

    pub fn channels(self, bins: u32) -> usize {
        self.polarity_groups() * bins as usize
    }
}

impl fmt::Display for FormatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatTag::Vtei => "VTEI",
            FormatTag::Shist => "SHIST",
            FormatTag::Mdes => "MDES",
            FormatTag::Voxel => "VOXEL",
        })
    }
}

impl FromStr for FormatTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vtei" => Ok(FormatTag::Vtei),
            "shist" | "stacked-histogram" => Ok(FormatTag::Shist),
            "mdes" => Ok(FormatTag::Mdes),
            "voxel" | "voxel-grid" => Ok(FormatTag::Voxel),
            other => Err(Error::InvalidParameter(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dtype {
    Ternary,
    Count,
    Float32,
}

impl Dtype {
    pub fn code(self) -> u8 {
        match self {
            Dtype::Ternary => 0,
            Dtype::Count => 1,
            Dtype::Float32 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Dtype::Ternary),
            1 => Some(Dtype::Count),
            2 => Some(Dtype::Float32),
            _ => None,
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::Ternary | Dtype::Count => 1,
            Dtype::Float32 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    Ternary(Vec<i8>),
    Count(Vec<u8>),
    Float32(Vec<f32>),
}

impl TensorData {
    pub fn zeros(dtype: Dtype, len: usize) -> Self {
        match dtype {
            Dtype::Ternary => TensorData::Ternary(vec![0; len]),
            Dtype::Count => TensorData::Count(vec![0; len]),
            Dtype::Float32 => TensorData::Float32(vec![0.0; len]),
        }
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::Ternary(_) => Dtype::Ternary,
            TensorData::Count(_) => Dtype::Count,
            TensorData::Float32(_) => Dtype::Float32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorData::Ternary(v) => v.len(),
            TensorData::Count(v) => v.len(),
            TensorData::Float32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_f32(&self, idx: usize) -> f32 {
        match self {
            TensorData::Ternary(v) => v[idx] as f32,
            TensorData::Count(v) => v[idx] as f32,
            TensorData::Float32(v) => v[idx],
        }
    }

    pub fn is_nonzero(&self, idx: usize) -> bool {
        match self {
            TensorData::Ternary(v) => v[idx] != 0,
            TensorData::Count(v) => v[idx] != 0,
            TensorData::Float32(v) => v[idx] != 0.0,
        }
    }

    pub fn count_nonzeros(&self) -> usize {
        match self {
            TensorData::Ternary(v) => v.iter().filter(|&&x| x != 0).count(),
            TensorData::Count(v) => v.iter().filter(|&&x| x != 0).count(),
            TensorData::Float32(v) => v.iter().filter(|x| x.abs() > 0.0).count(),
        }
    }

    /// Reorders elements so that `out[i] = self[source(i)]`, filling `None` with zero.
    pub(crate) fn gather(&self, len: usize, source: impl Fn(usize) -> Option<usize>) -> Self {
        fn pick<T: Copy + Default>(v: &[T], len: usize, source: &dyn Fn(usize) -> Option<usize>) -> Vec<T> {
            (0..len)
                .map(|i| source(i).map(|s| v[s]).unwrap_or_default())
                .collect()
        }
        match self {
            TensorData::Ternary(v) => TensorData::Ternary(pick(v, len, &source)),
            TensorData::Count(v) => TensorData::Count(pick(v, len, &source)),
            TensorData::Float32(v) => TensorData::Float32(pick(v, len, &source)),
        }
    }
}

/// An encoded chunk. Layout is channel-major, then rows, then columns.
///
/// For the two-group formats (SHIST, VOXEL) channels `[0, B)` carry negative
/// events and `[B, 2B)` positive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    format: FormatTag,
    geometry: SensorGeometry,
    window: TimeWindow,
    data: TensorData,
}

impl DenseTensor {
    pub fn zeros(format: FormatTag, geometry: SensorGeometry, window: TimeWindow) -> Self {
        let len = format.channels(window.bins()) * geometry.pixels();
        DenseTensor {
            format,
            geometry,
            window,
            data: TensorData::zeros(format.dtype(), len),
        }
    }

    pub fn from_parts(
        format: FormatTag,
        geometry: SensorGeometry,
        window: TimeWindow,
        data: TensorData,
    ) -> Result<Self> {
        if data.dtype() != format.dtype() {
            return Err(Error::TensorMismatch(format!(
                "{format} expects {:?} data, got {:?}",
                format.dtype(),
                data.dtype()
            )));
        }
        let expected = format.channels(window.bins()) * geometry.pixels();
        if data.len() != expected {
            return Err(Error::TensorMismatch(format!(
                "{format} tensor needs {expected} elements, got {}",
                data.len()
            )));
        }
        if let TensorData::Ternary(v) = &data {
            if let Some(bad) = v.iter().find(|&&x| !(-1..=1).contains(&x)) {
                return Err(Error::TensorMismatch(format!("non-ternary value {bad}")));
            }
        }
        if let TensorData::Float32(v) = &data {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::TensorMismatch("non-finite voxel value".into()));
            }
        }
        Ok(DenseTensor {
            format,
            geometry,
            window,
            data,
        })
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

    pub fn bins(&self) -> u32 {
        self.window.bins()
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    pub fn channels(&self) -> usize {
        self.format.channels(self.window.bins())
    }

    pub fn height(&self) -> usize {
        self.geometry.height as usize
    }

    pub fn width(&self) -> usize {
        self.geometry.width as usize
    }

    /// `[channels, height, width]`
    pub fn dims(&self) -> [usize; 3] {
        [self.channels(), self.height(), self.width()]
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut TensorData {
        &mut self.data
    }

    pub fn into_data(self) -> TensorData {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, channel: usize, y: usize, x: usize) -> usize {
        (channel * self.height() + y) * self.width() + x
    }

    pub fn get(&self, channel: usize, y: usize, x: usize) -> f32 {
        self.data.get_f32(self.index(channel, y, x))
    }

    pub fn count_nonzeros(&self) -> usize {
        self.data.count_nonzeros()
    }

    pub fn sum(&self) -> f64 {
        (0..self.len()).map(|i| self.data.get_f32(i) as f64).sum()
    }

    pub(crate) fn with_data(&self, data: TensorData) -> Self {
        DenseTensor {
            format: self.format,
            geometry: self.geometry,
            window: self.window,
            data,
        }
    }

    /// Same format, dims and window.
    pub fn is_compatible(&self, other: &DenseTensor) -> bool {
        self.format == other.format && self.geometry == other.geometry && self.bins() == other.bins()
    }
}

/// Number of cells with a non-zero value.
pub fn count_nonzeros(tensor: &DenseTensor) -> usize {
    tensor.count_nonzeros()
}
