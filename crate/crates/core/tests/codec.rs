mod common;

use common::*;
use evtcodec::coo::{quantize_voxel, CooBuffer};
use evtcodec::{
    coo_decode, coo_encode, encode, layout_for, Chunk, DenseTensor, FormatTag, SensorGeometry,
    TensorData, TimeWindow,
};
use proptest::prelude::*;

fn random_tensor(format: FormatTag, w: u32, h: u32, bins: u32, cells: &[i32]) -> DenseTensor {
    let g = SensorGeometry::new(w, h).unwrap();
    let window = TimeWindow::new(0, 1_000, bins).unwrap();
    let len = format.channels(bins) * g.pixels();
    let pick = |i: usize| cells[i % cells.len()];
    let data = match format {
        FormatTag::Vtei | FormatTag::Mdes => TensorData::Ternary((0..len).map(|i| (pick(i).rem_euclid(3) - 1) as i8).collect()),
        FormatTag::Shist => TensorData::Count((0..len).map(|i| if pick(i) % 3 == 0 { (pick(i).rem_euclid(256)) as u8 } else { 0 }).collect()),
        FormatTag::Voxel => TensorData::Float32(
            (0..len)
                .map(|i| if pick(i) % 2 == 0 { 0.0 } else { pick(i).unsigned_abs() as f32 / 997.0 })
                .collect(),
        ),
    };
    DenseTensor::from_parts(format, g, window, data).unwrap()
}

#[test]
fn golden_record_matches_bit_oracle() {
    let expected = pack_bits(&[(5, 9), (3, 8), (2, 3), (1, 1)]);
    assert_eq!(expected, vec![0x05, 0x06, 0x14]);
    let g = SensorGeometry::GEN1;
    let w = TimeWindow::new(0, 50_000, 5).unwrap();
    let mut cells = vec![0i8; 5 * g.pixels()];
    cells[(2 * 240 + 3) * 304 + 5] = 1;
    let t = DenseTensor::from_parts(FormatTag::Vtei, g, w, TensorData::Ternary(cells)).unwrap();
    assert_eq!(coo_encode(&t).unwrap().bytes(), expected.as_slice());
}

#[test]
fn average_vtei_scenario_size() {
    // 96,017 records of 3 bytes
    let layout = layout_for(FormatTag::Vtei, SensorGeometry::GEN1, 5);
    let bytes = 96_017 * layout.record_bytes();
    assert_eq!(bytes, 288_051);
    assert!((bytes as f64 / 1_048_576.0 - 0.27).abs() <= 0.01);
}

#[test]
fn records_follow_bit_oracle_for_every_format() {
    let c = random_chunk(77, 16, 4_000, 5);
    let chunk = Chunk::new(c.geometry, &c.events, c.window);
    for f in FormatTag::ALL {
        let t = encode(f, &chunk).unwrap();
        let layout = layout_for(f, c.geometry, 5);
        let buf = coo_encode(&t).unwrap();
        let mut expected = Vec::new();
        let [channels, h, w] = t.dims();
        for ch in 0..channels {
            for y in 0..h {
                for x in 0..w {
                    let v = t.get(ch, y, x);
                    if v == 0.0 {
                        continue;
                    }
                    let payload = match f {
                        FormatTag::Vtei | FormatTag::Mdes => (v > 0.0) as u64,
                        FormatTag::Shist => v as u64,
                        FormatTag::Voxel => half::f16::from_f32(v).to_bits() as u64,
                    };
                    let mut fields = vec![(x as u64, layout.x_bits), (y as u64, layout.y_bits), ((ch % 5) as u64, layout.bin_bits)];
                    if layout.channel_bits > 0 {
                        fields.push(((ch / 5) as u64, layout.channel_bits));
                    }
                    fields.push((payload, layout.data_bits));
                    expected.extend(pack_bits(&fields));
                }
            }
        }
        assert_eq!(buf.bytes(), expected.as_slice(), "{f}");
    }
}

#[test]
fn ternary_payload_bit() {
    let g = SensorGeometry::new(2, 2).unwrap();
    let w = TimeWindow::new(0, 10, 1).unwrap();
    assert!(DenseTensor::from_parts(FormatTag::Vtei, g, w, TensorData::Ternary(vec![2, 0, 0, 0])).is_err());
    let raw = CooBuffer::from_parts(FormatTag::Vtei, g, w, vec![0b011]).unwrap();
    let t = coo_decode(&raw).unwrap();
    assert_eq!(t.get(0, 1, 1), -1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lossless_roundtrip(fi in 0usize..4, w in 1u32..40, h in 1u32..40, bins in 2u32..9,
                          cells in prop::collection::vec(any::<i32>(), 1..64)) {
        let f = FormatTag::ALL[fi];
        let t = random_tensor(f, w, h, bins, &cells);
        let buf = coo_encode(&t).unwrap();
        prop_assert_eq!(buf.encoded_bytes(), t.count_nonzeros() * buf.layout().record_bytes());
        let back = coo_decode(&buf).unwrap();
        match f {
            FormatTag::Voxel => {
                let TensorData::Float32(orig) = t.data() else { unreachable!() };
                let TensorData::Float32(got) = back.data() else { unreachable!() };
                for (a, b) in orig.iter().zip(got) {
                    prop_assert_eq!(quantize_voxel(*a).to_bits(), b.to_bits());
                }
            }
            _ => prop_assert_eq!(&back, &t),
        }
        prop_assert_eq!(coo_encode(&back).unwrap(), buf);
    }
}
