//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here is written from the encoding definitions directly and
//! shares no code path with the library's encoders or codec.

#![allow(dead_code)]

use std::collections::HashMap;

use evtcodec::{Event, EventStream, Polarity, SensorGeometry, TimeWindow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bin of `t` found by testing each bin's interval `[i T / B, (i+1) T / B)`
/// in turn; the right window edge belongs to the last bin.
pub fn bin_by_search(t: u64, start: u64, end: u64, bins: u32) -> Option<u32> {
    if t < start || t > end {
        return None;
    }
    if t == end {
        return Some(bins - 1);
    }
    let off = (t - start) as u128 * bins as u128;
    let len = (end - start) as u128;
    (0..bins).find(|&i| off >= i as u128 * len && off < (i as u128 + 1) * len)
}

fn by_pixel(events: &[Event]) -> HashMap<(u16, u16), Vec<Event>> {
    let mut map: HashMap<(u16, u16), Vec<Event>> = HashMap::new();
    for e in events {
        map.entry((e.x, e.y)).or_default().push(*e);
    }
    map
}

fn cell(geometry: SensorGeometry, c: usize, y: usize, x: usize) -> usize {
    (c * geometry.height as usize + y) * geometry.width as usize + x
}

/// Per-cell scan: the last event of each `(bin, pixel)`.
pub fn vtei_oracle(events: &[Event], g: SensorGeometry, w: &TimeWindow) -> Vec<i8> {
    let bins = w.bins() as usize;
    let mut out = vec![0i8; bins * g.pixels()];
    for ((x, y), evs) in by_pixel(events) {
        for b in 0..bins {
            let last = evs
                .iter()
                .rev()
                .find(|e| bin_by_search(e.t, w.start(), w.end(), w.bins()) == Some(b as u32));
            if let Some(e) = last {
                out[cell(g, b, y as usize, x as usize)] = e.p.sign();
            }
        }
    }
    out
}

pub fn shist_oracle(events: &[Event], g: SensorGeometry, w: &TimeWindow) -> Vec<u8> {
    let bins = w.bins() as usize;
    let mut out = vec![0u8; 2 * bins * g.pixels()];
    for ((x, y), evs) in by_pixel(events) {
        for group in 0..2 {
            let pol = if group == 0 { Polarity::Negative } else { Polarity::Positive };
            for b in 0..bins {
                let n = evs
                    .iter()
                    .filter(|e| e.p == pol && bin_by_search(e.t, w.start(), w.end(), w.bins()) == Some(b as u32))
                    .count();
                out[cell(g, group * bins + b, y as usize, x as usize)] = n.min(255) as u8;
            }
        }
    }
    out
}

/// Bin `i` holds the last event with `t >= end - T / 2^i`, evaluated in f64.
pub fn mdes_oracle(events: &[Event], g: SensorGeometry, w: &TimeWindow) -> Vec<i8> {
    let bins = w.bins() as usize;
    let mut out = vec![0i8; bins * g.pixels()];
    let len = w.length() as f64;
    for ((x, y), evs) in by_pixel(events) {
        for b in 0..bins {
            let lower = w.end() as f64 - len / 2f64.powi(b as i32);
            if let Some(e) = evs.iter().rev().find(|e| e.t as f64 >= lower) {
                out[cell(g, b, y as usize, x as usize)] = e.p.sign();
            }
        }
    }
    out
}

/// Evaluates the triangular kernel on every bin for every event.
pub fn voxel_oracle(events: &[Event], g: SensorGeometry, w: &TimeWindow) -> Vec<f32> {
    let bins = w.bins() as usize;
    let mut out = vec![0f32; 2 * bins * g.pixels()];
    for ((x, y), evs) in by_pixel(events) {
        for e in &evs {
            let tn = (e.t - w.start()) as f64 / w.length() as f64 * (bins - 1) as f64;
            let group = if e.p == Polarity::Negative { 0 } else { 1 };
            for b in 0..bins {
                let weight = (1.0 - (b as f64 - tn).abs()).max(0.0);
                if weight > 0.0 {
                    out[cell(g, group * bins + b, y as usize, x as usize)] += weight as f32;
                }
            }
        }
    }
    out
}

/// LSB-first bit string packing of `(value, width)` fields, padded to whole
/// bytes.
pub fn pack_bits(fields: &[(u64, u32)]) -> Vec<u8> {
    let mut bits: Vec<u8> = Vec::new();
    for &(value, width) in fields {
        for i in 0..width {
            bits.push(((value >> i) & 1) as u8);
        }
    }
    while !bits.len().is_multiple_of(8) {
        bits.push(0);
    }
    bits.chunks(8)
        .map(|byte| byte.iter().enumerate().map(|(i, b)| b << i).sum())
        .collect()
}

pub struct RandomChunk {
    pub geometry: SensorGeometry,
    pub window: TimeWindow,
    pub events: Vec<Event>,
}

/// Random in-window stream on a `size x size` sensor. A quarter of the
/// streams concentrate on four pixels so that histogram counts saturate.
pub fn random_chunk(seed: u64, size: u32, max_events: usize, bins: u32) -> RandomChunk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geometry = SensorGeometry::new(size, size).unwrap();
    let start = rng.random_range(0..1_000_000u64);
    let length = match rng.random_range(0..4) {
        0 => rng.random_range(1..=16u64),
        _ => rng.random_range(1..=100_000u64),
    };
    let window = TimeWindow::new(start, start + length, bins).unwrap();
    let n = rng.random_range(0..=max_events);
    let hot = rng.random_range(0..4) == 0;
    let extent = if hot { 2.min(size) } else { size };
    let mut times: Vec<u64> = (0..n)
        .map(|_| match rng.random_range(0..20) {
            0 => window.end(),
            1 => window.start(),
            _ => rng.random_range(window.start()..=window.end()),
        })
        .collect();
    times.sort_unstable();
    let events = times
        .into_iter()
        .map(|t| {
            let p = if rng.random_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
            Event::new(
                t,
                rng.random_range(0..extent) as u16,
                rng.random_range(0..extent) as u16,
                p,
            )
        })
        .collect();
    RandomChunk {
        geometry,
        window,
        events,
    }
}

pub fn random_stream(seed: u64, max_events: usize) -> EventStream {
    let c = random_chunk(seed, 16, max_events, 1);
    EventStream::new(c.geometry, c.events).unwrap()
}
