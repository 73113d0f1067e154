//! Deterministic synthetic event generator.
//!
//! Each pixel tracks a reference log-intensity. On every tick of a fixed
//! micro-tick grid the scene's log-intensity is sampled (plus optional
//! per-pixel Gaussian noise); when it differs from the reference by at least
//! the contrast threshold an event with the sign of the change is emitted and
//! the reference is reset to the current level.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity, SensorGeometry};
use crate::parallel::map_range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Bright vertical bar sweeping left to right over a dark background.
    MovingBar,
    /// Bright disc moving diagonally from top-left to bottom-right.
    MovingDot,
    /// Constant grey scene; only the sensor noise produces events.
    StaticNoise,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moving-bar" => Ok(Pattern::MovingBar),
            "moving-dot" => Ok(Pattern::MovingDot),
            "static-noise" => Ok(Pattern::StaticNoise),
            other => Err(Error::InvalidParameter(format!(
                "unknown pattern '{other}' (expected moving-bar, moving-dot or static-noise)"
            ))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::MovingBar => "moving-bar",
            Pattern::MovingDot => "moving-dot",
            Pattern::StaticNoise => "static-noise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub geometry: SensorGeometry,
    pub duration_us: u64,
    pub pattern: Pattern,
    /// Log-intensity contrast threshold. `f64::INFINITY` disables events.
    pub contrast: f64,
    pub seed: u64,
    pub tick_us: u64,
    /// Standard deviation of per-tick log-intensity noise.
    pub noise: f64,
}

impl SynthConfig {
    pub fn new(geometry: SensorGeometry, duration_us: u64, pattern: Pattern, seed: u64) -> Self {
        SynthConfig {
            geometry,
            duration_us,
            pattern,
            contrast: 0.2,
            seed,
            tick_us: 1_000,
            noise: 0.03,
        }
    }
}

const DARK: f64 = 0.1;
const BRIGHT: f64 = 1.0;
const EDGE_PX: f64 = 1.0;

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Noise-free scene log-intensity at pixel `(x, y)` and normalized time `u in [0, 1]`.
fn scene(pattern: Pattern, geometry: SensorGeometry, x: f64, y: f64, u: f64) -> f64 {
    let w = geometry.width as f64;
    let h = geometry.height as f64;
    let level = match pattern {
        Pattern::MovingBar => {
            let half = (w / 20.0).max(1.0);
            let center = -2.0 * half + (w + 4.0 * half) * u;
            logistic((half - (x - center).abs()) / EDGE_PX)
        }
        Pattern::MovingDot => {
            let radius = (w.min(h) / 10.0).max(1.0);
            let cx = -radius + (w + 2.0 * radius) * u;
            let cy = -radius + (h + 2.0 * radius) * u;
            let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            logistic((radius - d) / EDGE_PX)
        }
        Pattern::StaticNoise => 0.5,
    };
    (DARK + (BRIGHT - DARK) * level).ln()
}

/// Simulates the configured scene. Identical configs give identical streams.
pub fn synth_events(config: &SynthConfig) -> Result<EventStream> {
    if config.duration_us == 0 || config.tick_us == 0 {
        return Err(Error::InvalidParameter("duration and tick must be positive".into()));
    }
    if config.contrast.is_nan() || config.contrast <= 0.0 || config.noise < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "contrast must be > 0 and noise >= 0 (got {}, {})",
            config.contrast, config.noise
        )));
    }
    let geometry = config.geometry;
    let width = geometry.width as usize;
    let ticks = config.duration_us / config.tick_us;

    let per_pixel: Vec<Vec<Event>> = map_range(geometry.pixels(), |pixel| {
        let x = (pixel % width) as u16;
        let y = (pixel / width) as u16;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(pixel as u64);
        let mut sample = |u: f64| {
            let n: f64 = if config.noise > 0.0 {
                StandardNormal.sample(&mut rng)
            } else {
                0.0
            };
            scene(config.pattern, geometry, x as f64 + 0.5, y as f64 + 0.5, u) + config.noise * n
        };
        let mut reference = sample(0.0);
        let mut events = Vec::new();
        for k in 1..=ticks {
            let t = k * config.tick_us;
            let level = sample(t as f64 / config.duration_us as f64);
            let delta = level - reference;
            if delta.abs() >= config.contrast {
                let p = if delta > 0.0 { Polarity::Positive } else { Polarity::Negative };
                events.push(Event::new(t, x, y, p));
                reference = level;
            }
        }
        events
    });

    let mut events: Vec<Event> = per_pixel.into_iter().flatten().collect();
    events.sort_by_key(|e| (e.t, e.y, e.x));
    EventStream::new(geometry, events)
}
