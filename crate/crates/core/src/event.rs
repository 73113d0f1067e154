//! Events, sensor geometry, time windows and fixed-length chunking.

use std::fmt;

use crate::error::{Error, Result};

/// Sign of a brightness change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Negative => -1,
            Polarity::Positive => 1,
        }
    }

    /// Strict conversion: only `-1` and `+1` are polarities.
    pub fn from_sign(p: i64) -> Option<Self> {
        match p {
            -1 => Some(Polarity::Negative),
            1 => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive => Polarity::Negative,
        }
    }

    /// Channel group used by the two-group encodings: negative first.
    pub fn group(self) -> usize {
        match self {
            Polarity::Negative => 0,
            Polarity::Positive => 1,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

/// A single change event: timestamp in microseconds, pixel column/row and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub p: Polarity,
}

impl Event {
    pub fn new(t: u64, x: u16, y: u16, p: Polarity) -> Self {
        Event { t, x, y, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SensorGeometry {
    pub width: u32,
    pub height: u32,
}

impl SensorGeometry {
    /// Prophesee GEN1 automotive sensor, 304x240.
    pub const GEN1: SensorGeometry = SensorGeometry {
        width: 304,
        height: 240,
    };

    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || width > u16::MAX as u32 || height > u16::MAX as u32 {
            return Err(Error::InvalidGeometry { width, height });
        }
        Ok(SensorGeometry { width, height })
    }

    pub fn pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn contains(&self, x: u16, y: u16) -> bool {
        (x as u32) < self.width && (y as u32) < self.height
    }

    pub(crate) fn check(&self, index: usize, ev: &Event) -> Result<()> {
        if self.contains(ev.x, ev.y) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                index,
                x: ev.x as u32,
                y: ev.y as u32,
                width: self.width,
                height: self.height,
            })
        }
    }
}

/// Closed interval `[start, end]` in microseconds split into `bins` uniform bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    start: u64,
    end: u64,
    bins: u32,
}

impl TimeWindow {
    pub fn new(start: u64, end: u64, bins: u32) -> Result<Self> {
        if end <= start || bins == 0 {
            return Err(Error::InvalidWindow { start, end, bins });
        }
        Ok(TimeWindow { start, end, bins })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn length(&self) -> u64 {
        self.end - self.start
    }

    pub fn contains(&self, t: u64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn with_bins(&self, bins: u32) -> Result<Self> {
        TimeWindow::new(self.start, self.end, bins)
    }

    pub(crate) fn check(&self, t: u64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                t,
                start: self.start,
                end: self.end,
            })
        }
    }

    /// Uniform bin index, `floor((t - start) / (end - start) * B)`, with the
    /// right endpoint folded into the last bin.
    pub fn assign_bin(&self, t: u64) -> Result<u32> {
        self.check(t)?;
        Ok(self.bin_unchecked(t))
    }

    #[inline]
    pub(crate) fn bin_unchecked(&self, t: u64) -> u32 {
        let offset = (t - self.start) as u128;
        let bin = offset * self.bins as u128 / self.length() as u128;
        (bin as u32).min(self.bins - 1)
    }
}

/// Free-function form of [`TimeWindow::assign_bin`].
pub fn assign_bin(t: u64, window: &TimeWindow) -> Result<u32> {
    window.assign_bin(t)
}

/// A validated, time-ordered event recording.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    geometry: SensorGeometry,
    events: Vec<Event>,
}

impl EventStream {
    pub fn new(geometry: SensorGeometry, events: Vec<Event>) -> Result<Self> {
        validate(&geometry, &events)?;
        Ok(EventStream { geometry, events })
    }

    pub fn empty(geometry: SensorGeometry) -> Self {
        EventStream {
            geometry,
            events: Vec::new(),
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Splits the stream into consecutive half-open windows of `window_length`
    /// microseconds anchored at the first timestamp. Empty windows in the
    /// middle of the recording are kept.
    pub fn chunks(&self, window_length: u64, bins: u32) -> Result<Vec<Chunk<'_>>> {
        if window_length == 0 {
            return Err(Error::InvalidParameter("window length must be positive".into()));
        }
        if bins == 0 {
            return Err(Error::InvalidWindow {
                start: 0,
                end: window_length,
                bins,
            });
        }
        let Some(first) = self.events.first() else {
            return Ok(Vec::new());
        };
        let anchor = first.t;
        let last = self.events[self.events.len() - 1].t;
        let count = ((last - anchor) / window_length + 1) as usize;

        let mut chunks = Vec::with_capacity(count);
        let mut cursor = 0;
        for k in 0..count as u64 {
            let start = anchor + k * window_length;
            let end = start + window_length;
            let len = self.events[cursor..].partition_point(|e| e.t < end);
            chunks.push(Chunk {
                geometry: self.geometry,
                events: &self.events[cursor..cursor + len],
                window: TimeWindow::new(start, end, bins)?,
            });
            cursor += len;
        }
        debug_assert_eq!(cursor, self.events.len());
        Ok(chunks)
    }
}

/// Free-function form of [`EventStream::chunks`].
pub fn chunk_stream(
    stream: &EventStream,
    window_length: u64,
    bins: u32,
) -> Result<Vec<Chunk<'_>>> {
    stream.chunks(window_length, bins)
}

fn validate(geometry: &SensorGeometry, events: &[Event]) -> Result<()> {
    let mut prev = 0u64;
    for (index, ev) in events.iter().enumerate() {
        geometry.check(index, ev)?;
        if ev.t < prev {
            return Err(Error::NonMonotonic {
                index,
                t: ev.t,
                prev,
            });
        }
        prev = ev.t;
    }
    Ok(())
}

/// Borrowed view of the events falling into one sampling window.
#[derive(Debug, Clone, Copy)]
pub struct Chunk<'a> {
    geometry: SensorGeometry,
    events: &'a [Event],
    window: TimeWindow,
}

impl<'a> Chunk<'a> {
    /// Builds a chunk from arbitrary events. Coordinates and timestamps are
    /// checked by the encoders, not here.
    pub fn new(geometry: SensorGeometry, events: &'a [Event], window: TimeWindow) -> Self {
        Chunk {
            geometry,
            events,
            window,
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn events(&self) -> &'a [Event] {
        self.events
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_stream(&self) -> Result<EventStream> {
        EventStream::new(self.geometry, self.events.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: u64) -> Event {
        Event::new(t, 0, 0, Polarity::Positive)
    }

    #[test]
    fn bin_examples() {
        let w = TimeWindow::new(0, 50_000, 5).unwrap();
        assert_eq!(w.assign_bin(0).unwrap(), 0);
        assert_eq!(w.assign_bin(10_000).unwrap(), 1);
        assert_eq!(w.assign_bin(50_000).unwrap(), 4);
        assert_eq!(w.assign_bin(49_999).unwrap(), 4);
        assert_eq!(w.assign_bin(9_999).unwrap(), 0);
    }

    #[test]
    fn right_endpoint_is_clamped_for_every_bin_count() {
        // Unclamped formula returns exactly B at the right edge, B-1 just before.
        for bins in 1..=16u32 {
            for (start, end) in [(0u64, 1u64), (0, 7), (100, 50_100), (3, 1_000_003)] {
                let w = TimeWindow::new(start, end, bins).unwrap();
                assert_eq!(w.assign_bin(end).unwrap(), bins - 1);
                let raw = ((end - start) as u128 * bins as u128 / (end - start) as u128) as u32;
                assert_eq!(raw, bins);
                assert_eq!(w.assign_bin(start).unwrap(), 0);
            }
        }
    }

    #[test]
    fn out_of_window_rejected() {
        let w = TimeWindow::new(100, 200, 2).unwrap();
        assert!(matches!(w.assign_bin(99), Err(Error::OutOfWindow { .. })));
        assert!(matches!(w.assign_bin(201), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn invalid_windows() {
        assert!(TimeWindow::new(5, 5, 1).is_err());
        assert!(TimeWindow::new(0, 5, 0).is_err());
        assert!(SensorGeometry::new(0, 3).is_err());
    }

    #[test]
    fn chunking_half_open() {
        let s = EventStream::new(SensorGeometry::GEN1, vec![ev(0), ev(49_999), ev(50_000)]).unwrap();
        let chunks = s.chunks(50_000, 5).unwrap();
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].len(), 2);
        assert_eq!(chunks[1].events()[0].t, 50_000);
        assert_eq!(chunks[1].window().start(), 50_000);
        assert_eq!(chunks[1].window().end(), 100_000);
    }

    #[test]
    fn chunking_edge_cases() {
        let empty = EventStream::empty(SensorGeometry::GEN1);
        assert!(empty.chunks(50_000, 5).unwrap().is_empty());

        let same = EventStream::new(SensorGeometry::GEN1, vec![ev(0); 7]).unwrap();
        let chunks = same.chunks(50_000, 5).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].len(), 7);

        // gap produces an empty middle chunk, anchored at the first event
        let gap = EventStream::new(SensorGeometry::GEN1, vec![ev(1_000), ev(121_000)]).unwrap();
        let chunks = gap.chunks(50_000, 5).unwrap();
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[0].window().start(), 1_000);
        assert!(chunks[1].is_empty());
        assert_eq!(chunks[2].len(), 1);

        assert!(gap.chunks(0, 5).is_err());
    }

    #[test]
    fn stream_validation() {
        let g = SensorGeometry::new(4, 4).unwrap();
        assert!(matches!(
            EventStream::new(g, vec![ev(5), ev(4)]),
            Err(Error::NonMonotonic { index: 1, .. })
        ));
        assert!(matches!(
            EventStream::new(g, vec![Event::new(0, 4, 0, Polarity::Negative)]),
            Err(Error::OutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn polarity_from_sign_is_strict() {
        assert_eq!(Polarity::from_sign(1), Some(Polarity::Positive));
        assert_eq!(Polarity::from_sign(-1), Some(Polarity::Negative));
        assert_eq!(Polarity::from_sign(0), None);
        assert_eq!(Polarity::from_sign(2), None);
    }
}
