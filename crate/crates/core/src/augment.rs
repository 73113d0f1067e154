//! Tensor-level augmentations: random polarity suppression, horizontal flip
//! and zoom-out, drawn once per training sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, TensorData};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpsConfig {
    /// Probability of suppressing one polarity at all.
    pub s: f64,
    /// Probability that the suppressed polarity is the positive one.
    pub p: f64,
}

impl RpsConfig {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        for (name, v) in [("s", s), ("p", p)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "RPS probability {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(RpsConfig { s, p })
    }
}

impl Default for RpsConfig {
    fn default() -> Self {
        RpsConfig { s: 0.05, p: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RpsBranch {
    Identity,
    /// Negative content removed.
    KeepPositiveOnly,
    /// Positive content removed.
    KeepNegativeOnly,
}

/// Case selection from two uniform draws in `[0, 1)`.
pub fn rps_branch(config: &RpsConfig, r1: f64, r2: f64) -> RpsBranch {
    if r1 >= config.s {
        RpsBranch::Identity
    } else if r2 >= config.p {
        RpsBranch::KeepPositiveOnly
    } else {
        RpsBranch::KeepNegativeOnly
    }
}

fn draw_branch<R: Rng>(config: &RpsConfig, rng: &mut R) -> RpsBranch {
    let r1: f64 = rng.random();
    let r2: f64 = rng.random();
    rps_branch(config, r1, r2)
}

/// Draws an RPS branch from a seed.
pub fn rps_draw(config: &RpsConfig, seed: u64) -> RpsBranch {
    draw_branch(config, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Applies a suppression branch uniformly over all bins.
///
/// Sign-valued tensors drop cells of the suppressed sign; two-group tensors
/// zero the suppressed polarity's channel group.
pub fn rps_apply(tensor: &DenseTensor, branch: RpsBranch) -> DenseTensor {
    let drop_sign: i8 = match branch {
        RpsBranch::Identity => return tensor.clone(),
        RpsBranch::KeepPositiveOnly => -1,
        RpsBranch::KeepNegativeOnly => 1,
    };
    if tensor.format().is_signed() {
        let TensorData::Ternary(v) = tensor.data() else {
            unreachable!("sign-valued formats are ternary")
        };
        let out = v.iter().map(|&c| if c == drop_sign { 0 } else { c }).collect();
        return tensor.with_data(TensorData::Ternary(out));
    }
    let group_len = tensor.bins() as usize * tensor.height() * tensor.width();
    let dropped = if drop_sign < 0 { 0..group_len } else { group_len..2 * group_len };
    tensor.with_data(tensor.data().gather(tensor.len(), |i| {
        (!dropped.contains(&i)).then_some(i)
    }))
}

/// Mirrors every channel left to right.
pub fn hflip(tensor: &DenseTensor) -> DenseTensor {
    let w = tensor.width();
    tensor.with_data(tensor.data().gather(tensor.len(), |i| {
        let x = i % w;
        Some(i - x + (w - 1 - x))
    }))
}

/// Size of the content after zooming out by `scale`.
pub fn zoom_extent(height: usize, width: usize, scale: f64) -> (usize, usize) {
    let shrink = |n: usize| ((n as f64 / scale).round() as usize).clamp(1, n);
    (shrink(height), shrink(width))
}

/// Shrinks the content by `scale` with nearest-neighbour sampling and places
/// it at `offset = (row, col)` on a zero canvas of the original size.
pub fn zoom_out(tensor: &DenseTensor, scale: f64, offset: (usize, usize)) -> Result<DenseTensor> {
    if !(1.0..=1.2).contains(&scale) {
        return Err(Error::InvalidParameter(format!(
            "zoom-out scale {scale} outside [1.0, 1.2]"
        )));
    }
    let [_, h, w] = tensor.dims();
    let (zh, zw) = zoom_extent(h, w, scale);
    let (oy, ox) = offset;
    if oy + zh > h || ox + zw > w {
        return Err(Error::InvalidParameter(format!(
            "zoom offset ({oy}, {ox}) puts {zh}x{zw} content outside {h}x{w} canvas"
        )));
    }
    // Source index for a destination row/column of the shrunken content.
    let src_row: Vec<usize> = (0..zh).map(|r| (r * h / zh).min(h - 1)).collect();
    let src_col: Vec<usize> = (0..zw).map(|c| (c * w / zw).min(w - 1)).collect();
    let plane = h * w;
    Ok(tensor.with_data(tensor.data().gather(tensor.len(), |i| {
        let c = i / plane;
        let y = (i % plane) / w;
        let x = i % w;
        if y < oy || y >= oy + zh || x < ox || x >= ox + zw {
            return None;
        }
        Some(c * plane + src_row[y - oy] * w + src_col[x - ox])
    })))
}

/// Probabilities for the per-sequence augmentation draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugConfig {
    pub rps: RpsConfig,
    pub hflip_prob: f64,
    pub zoom_prob: f64,
}

impl AugConfig {
    pub fn new(rps: RpsConfig, hflip_prob: f64, zoom_prob: f64) -> Result<Self> {
        for (name, v) in [("hflip", hflip_prob), ("zoom", zoom_prob)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} probability {v} outside [0, 1]"
                )));
            }
        }
        Ok(AugConfig {
            rps,
            hflip_prob,
            zoom_prob,
        })
    }

    /// Only polarity suppression, no geometric transforms.
    pub fn rps_only(rps: RpsConfig) -> Self {
        AugConfig {
            rps,
            hflip_prob: 0.0,
            zoom_prob: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zoom {
    pub scale: f64,
    pub offset: (usize, usize),
}

/// All random parameters for one sequence. Drawn once, then applied to every
/// frame of that sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugSequenceDraw {
    pub seed: u64,
    pub rps_branch: RpsBranch,
    pub hflip: bool,
    pub zoom: Option<Zoom>,
}

impl AugSequenceDraw {
    pub fn identity() -> Self {
        AugSequenceDraw {
            seed: 0,
            rps_branch: RpsBranch::Identity,
            hflip: false,
            zoom: None,
        }
    }

    /// Draws the sequence parameters for a `height x width` canvas.
    pub fn draw(config: &AugConfig, height: usize, width: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rps_branch = draw_branch(&config.rps, &mut rng);
        let hflip = rng.random::<f64>() < config.hflip_prob;
        let zoom = if rng.random::<f64>() < config.zoom_prob {
            let scale = rng.random_range(1.0..=1.2);
            let (zh, zw) = zoom_extent(height, width, scale);
            let offset = (
                rng.random_range(0..=height - zh),
                rng.random_range(0..=width - zw),
            );
            Some(Zoom { scale, offset })
        } else {
            None
        };
        AugSequenceDraw {
            seed,
            rps_branch,
            hflip,
            zoom,
        }
    }

    /// Applies suppression, then flip, then zoom.
    pub fn apply(&self, tensor: &DenseTensor) -> Result<DenseTensor> {
        let mut out = rps_apply(tensor, self.rps_branch);
        if self.hflip {
            out = hflip(&out);
        }
        if let Some(z) = self.zoom {
            out = zoom_out(&out, z.scale, z.offset)?;
        }
        Ok(out)
    }
}

/// Applies one draw to every tensor of a sequence. All tensors must share
/// format and dims.
pub fn apply_sequence(tensors: &[DenseTensor], draw: &AugSequenceDraw) -> Result<Vec<DenseTensor>> {
    if let Some(first) = tensors.first() {
        if let Some((i, _)) = tensors.iter().enumerate().find(|(_, t)| !first.is_compatible(t)) {
            return Err(Error::TensorMismatch(format!(
                "sequence frame {i} differs in format or dims from frame 0"
            )));
        }
    }
    tensors.iter().map(|t| draw.apply(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{SensorGeometry, TimeWindow};
    use crate::tensor::FormatTag;

    fn ternary(format: FormatTag, w: u32, h: u32, cells: Vec<i8>) -> DenseTensor {
        let bins = cells.len() as u32 / (w * h);
        DenseTensor::from_parts(
            format,
            SensorGeometry::new(w, h).unwrap(),
            TimeWindow::new(0, 100, bins).unwrap(),
            TensorData::Ternary(cells),
        )
        .unwrap()
    }

    fn cells(t: &DenseTensor) -> Vec<f32> {
        (0..t.len()).map(|i| t.data().get_f32(i)).collect()
    }

    #[test]
    fn rps_forced_branches() {
        let zero = RpsConfig::new(0.0, 0.5).unwrap();
        let all_neg = RpsConfig::new(1.0, 1.0).unwrap();
        for seed in 0..1000 {
            assert_eq!(rps_draw(&zero, seed), RpsBranch::Identity);
            assert_eq!(rps_draw(&all_neg, seed), RpsBranch::KeepNegativeOnly);
        }
        assert!(RpsConfig::new(1.1, 0.0).is_err());
        assert!(RpsConfig::new(0.5, -0.1).is_err());
    }

    #[test]
    fn rps_case_boundaries() {
        let c = RpsConfig::new(0.5, 0.5).unwrap();
        assert_eq!(rps_branch(&c, 0.5, 0.0), RpsBranch::Identity);
        assert_eq!(rps_branch(&c, 0.49, 0.5), RpsBranch::KeepPositiveOnly);
        assert_eq!(rps_branch(&c, 0.49, 0.49), RpsBranch::KeepNegativeOnly);
    }

    #[test]
    fn rps_apply_on_vtei_cells() {
        let t = ternary(FormatTag::Vtei, 3, 1, vec![-1, 0, 1]);
        assert_eq!(cells(&rps_apply(&t, RpsBranch::KeepPositiveOnly)), [0.0, 0.0, 1.0]);
        assert_eq!(cells(&rps_apply(&t, RpsBranch::KeepNegativeOnly)), [-1.0, 0.0, 0.0]);
        assert_eq!(rps_apply(&t, RpsBranch::Identity), t);
    }

    #[test]
    fn rps_apply_on_channel_groups() {
        let g = SensorGeometry::new(1, 1).unwrap();
        let w = TimeWindow::new(0, 10, 2).unwrap();
        let t = DenseTensor::from_parts(FormatTag::Shist, g, w, TensorData::Count(vec![1, 2, 3, 4])).unwrap();
        assert_eq!(cells(&rps_apply(&t, RpsBranch::KeepPositiveOnly)), [0.0, 0.0, 3.0, 4.0]);
        assert_eq!(cells(&rps_apply(&t, RpsBranch::KeepNegativeOnly)), [1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn hflip_moves_columns() {
        let g = SensorGeometry::GEN1;
        let mut t = DenseTensor::zeros(FormatTag::Vtei, g, TimeWindow::new(0, 10, 2).unwrap());
        let idx = t.index(1, 7, 0);
        let TensorData::Ternary(v) = t.data_mut() else { unreachable!() };
        v[idx] = -1;
        let f = hflip(&t);
        assert_eq!(f.get(1, 7, 303), -1.0);
        assert_eq!(f.count_nonzeros(), 1);
        assert_eq!(hflip(&f), t);

        let sym = ternary(FormatTag::Vtei, 3, 1, vec![1, 0, 1]);
        assert_eq!(hflip(&sym), sym);
    }

    #[test]
    fn zoom_examples() {
        let t = ternary(FormatTag::Vtei, 6, 5, (0..30).map(|i| [0, 1, -1][i % 3]).collect());
        assert_eq!(zoom_out(&t, 1.0, (0, 0)).unwrap(), t);

        let mut corner = vec![0i8; 30];
        corner[0] = 1;
        let t = ternary(FormatTag::Vtei, 6, 5, corner);
        let z = zoom_out(&t, 1.2, (0, 0)).unwrap();
        assert_eq!(z.get(0, 0, 0), 1.0);
        assert_eq!(z.count_nonzeros(), 1);

        assert!(zoom_out(&t, 1.2, (5, 0)).is_err());
        assert!(zoom_out(&t, 1.5, (0, 0)).is_err());
    }

    #[test]
    fn zoom_shrinks_gen1() {
        assert_eq!(zoom_extent(240, 304, 1.2), (200, 253));
        assert_eq!(zoom_extent(240, 304, 1.0), (240, 304));
    }

    #[test]
    fn sequence_draw_is_deterministic_and_shared() {
        let cfg = AugConfig::new(RpsConfig::new(1.0, 0.0).unwrap(), 1.0, 1.0).unwrap();
        let a = AugSequenceDraw::draw(&cfg, 240, 304, 42);
        assert_eq!(a, AugSequenceDraw::draw(&cfg, 240, 304, 42));
        assert_eq!(a.rps_branch, RpsBranch::KeepPositiveOnly);
        assert!(a.hflip);
        let z = a.zoom.unwrap();
        assert!((1.0..=1.2).contains(&z.scale));

        let frame = ternary(FormatTag::Vtei, 3, 1, vec![-1, 0, 1]);
        let seq = vec![frame.clone(); 5];
        let out = apply_sequence(&seq, &AugSequenceDraw { zoom: None, ..a }).unwrap();
        assert_eq!(out.len(), 5);
        for t in &out {
            assert_eq!(cells(t), [1.0, 0.0, 0.0]);
        }
        assert!(apply_sequence(&[], &a).unwrap().is_empty());
    }

    #[test]
    fn sequence_rejects_mixed_formats() {
        let a = ternary(FormatTag::Vtei, 3, 1, vec![-1, 0, 1]);
        let b = ternary(FormatTag::Mdes, 3, 1, vec![-1, 0, 1]);
        assert!(apply_sequence(&[a, b], &AugSequenceDraw::identity()).is_err());
    }
}
