//! Encoding benchmark: latency, event rate, non-zeros, COO size,
//! compression ratio and bandwidth per fixed-length chunk.
//!
//! Sizes use binary megabytes (2^20 bytes). The raw stream reference costs
//! `raw_event_bytes` per event (4 by default). Bandwidth divides the encoded
//! size by the nominal window length plus the encoding latency.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coo::layout_for;
use crate::encode::encode;
use crate::error::{Error, Result};
use crate::event::{Chunk, EventStream, SensorGeometry};
use crate::parallel::map_slice;
use crate::tensor::FormatTag;

pub const MIB: f64 = 1_048_576.0;
pub const DEFAULT_RAW_EVENT_BYTES: u64 = 4;

/// Inputs of the size model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeInputs {
    pub non_zeros: u64,
    pub record_bytes: u64,
    pub events: u64,
    pub raw_event_bytes: u64,
    pub window_s: f64,
    pub latency_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeMetrics {
    pub encoded_bytes: u64,
    pub raw_bytes: u64,
    /// Absent when nothing was encoded.
    pub compression_ratio: Option<f64>,
    /// Bytes per second; absent when nothing was encoded.
    pub bandwidth: Option<f64>,
}

impl SizeMetrics {
    pub fn encoded_mb(&self) -> f64 {
        self.encoded_bytes as f64 / MIB
    }

    pub fn raw_mb(&self) -> f64 {
        self.raw_bytes as f64 / MIB
    }

    pub fn bandwidth_mbs(&self) -> Option<f64> {
        self.bandwidth.map(|b| b / MIB)
    }
}

pub fn compute_sizes(inputs: &SizeInputs) -> SizeMetrics {
    let encoded_bytes = inputs.non_zeros * inputs.record_bytes;
    let raw_bytes = inputs.events * inputs.raw_event_bytes;
    let (compression_ratio, bandwidth) = if encoded_bytes == 0 {
        (None, None)
    } else {
        (
            Some(raw_bytes as f64 / encoded_bytes as f64),
            Some(encoded_bytes as f64 / (inputs.window_s + inputs.latency_s)),
        )
    };
    SizeMetrics {
        encoded_bytes,
        raw_bytes,
        compression_ratio,
        bandwidth,
    }
}

/// Millions of events per second. Zero events give zero regardless of latency.
pub fn event_rate_mevs(events: u64, latency_s: f64) -> Option<f64> {
    if events == 0 {
        Some(0.0)
    } else if latency_s > 0.0 {
        Some(events as f64 / latency_s / 1e6)
    } else {
        None
    }
}

pub fn median(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingReport {
    pub format: FormatTag,
    pub events_in_chunk: u64,
    /// Median of the timed runs, seconds.
    pub latency_s: f64,
    pub latency_samples_s: Vec<f64>,
    pub event_rate_mevs: Option<f64>,
    pub non_zeros: u64,
    pub record_bytes: u64,
    pub encoded_bytes: u64,
    pub raw_bytes: u64,
    pub compression_ratio: Option<f64>,
    pub bandwidth_mbs: Option<f64>,
}

impl EncodingReport {
    pub fn encoded_mb(&self) -> f64 {
        self.encoded_bytes as f64 / MIB
    }
}

/// Times `repetitions` encodes of `chunk` after one discarded warm-up run.
pub fn measure_encode(
    chunk: &Chunk<'_>,
    format: FormatTag,
    repetitions: usize,
    raw_event_bytes: u64,
) -> Result<EncodingReport> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    let tensor = encode(format, chunk)?;
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let t = encode(format, chunk)?;
        samples.push(start.elapsed().as_secs_f64());
        std::hint::black_box(t);
    }
    let latency_s = median(&samples);
    let events = chunk.len() as u64;
    let record_bytes = layout_for(format, chunk.geometry(), chunk.window().bins()).record_bytes() as u64;
    let non_zeros = tensor.count_nonzeros() as u64;
    let sizes = compute_sizes(&SizeInputs {
        non_zeros,
        record_bytes,
        events,
        raw_event_bytes,
        window_s: chunk.window().length() as f64 * 1e-6,
        latency_s,
    });
    Ok(EncodingReport {
        format,
        events_in_chunk: events,
        latency_s,
        latency_samples_s: samples,
        event_rate_mevs: event_rate_mevs(events, latency_s),
        non_zeros,
        record_bytes,
        encoded_bytes: sizes.encoded_bytes,
        raw_bytes: sizes.raw_bytes,
        compression_ratio: sizes.compression_ratio,
        bandwidth_mbs: sizes.bandwidth_mbs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Average,
    Maximum,
    Minimum,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Average, Scenario::Maximum, Scenario::Minimum];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Average => "average",
            Scenario::Maximum => "maximum",
            Scenario::Minimum => "minimum",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" => Ok(Scenario::Average),
            "maximum" | "max" => Ok(Scenario::Maximum),
            "minimum" | "min" => Ok(Scenario::Minimum),
            other => Err(Error::InvalidParameter(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Indices of the (average, maximum, minimum) chunks by event count.
///
/// Maximum and minimum take the first chunk reaching the extreme; average is
/// the first chunk whose count is nearest to the mean.
pub fn select_scenarios(counts: &[usize]) -> Option<[usize; 3]> {
    if counts.is_empty() {
        return None;
    }
    let mut max = 0;
    let mut min = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[max] {
            max = i;
        }
        if c < counts[min] {
            min = i;
        }
    }
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64;
    let mut avg = 0;
    for (i, &c) in counts.iter().enumerate() {
        if (c as f64 - mean).abs() < (counts[avg] as f64 - mean).abs() {
            avg = i;
        }
    }
    Some([avg, max, min])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub window_us: u64,
    pub bins: u32,
    pub formats: Vec<FormatTag>,
    pub repetitions: usize,
    pub raw_event_bytes: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            window_us: 50_000,
            bins: 5,
            formats: FormatTag::ALL.to_vec(),
            repetitions: 11,
            raw_event_bytes: DEFAULT_RAW_EVENT_BYTES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub stream: usize,
    pub chunk: usize,
    pub events: u64,
    pub reports: Vec<EncodingReport>,
}

/// Corpus-wide mean non-zeros per format, over every non-empty chunk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub chunks: usize,
    pub mean_events: f64,
    pub mean_non_zeros: Vec<(FormatTag, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub window_us: u64,
    pub bins: u32,
    pub raw_event_bytes: u64,
    pub corpus: CorpusStats,
    pub scenarios: Vec<ScenarioReport>,
}

impl BenchSummary {
    pub fn rows(&self) -> Vec<ReportRow> {
        self.scenarios
            .iter()
            .flat_map(|s| s.reports.iter().map(move |r| ReportRow::from_report(s.scenario, r)))
            .collect()
    }

    /// Mean latency of a format over the selected scenarios.
    pub fn mean_latency(&self, format: FormatTag) -> Option<f64> {
        let lat: Vec<f64> = self
            .scenarios
            .iter()
            .flat_map(|s| s.reports.iter())
            .filter(|r| r.format == format)
            .map(|r| r.latency_s)
            .collect();
        (!lat.is_empty()).then(|| lat.iter().sum::<f64>() / lat.len() as f64)
    }
}

/// Chunks every stream, picks the average/maximum/minimum non-empty chunks
/// and times each requested format on them. Timing runs on the calling
/// thread only; the corpus-wide non-zero statistics run in parallel.
pub fn bench_corpus(streams: &[EventStream], config: &BenchConfig) -> Result<BenchSummary> {
    if config.formats.is_empty() {
        return Err(Error::InvalidParameter("no formats requested".into()));
    }
    let mut chunks: Vec<(usize, usize, Chunk<'_>)> = Vec::new();
    for (si, stream) in streams.iter().enumerate() {
        for (ci, chunk) in stream.chunks(config.window_us, config.bins)?.into_iter().enumerate() {
            if !chunk.is_empty() {
                chunks.push((si, ci, chunk));
            }
        }
    }
    let counts: Vec<usize> = chunks.iter().map(|(_, _, c)| c.len()).collect();
    let picks = select_scenarios(&counts).ok_or(Error::EmptyCorpus)?;

    let per_chunk: Vec<Result<Vec<usize>>> = map_slice(&chunks, |(_, _, chunk)| {
        config
            .formats
            .iter()
            .map(|&f| encode(f, chunk).map(|t| t.count_nonzeros()))
            .collect()
    });
    let per_chunk: Vec<Vec<usize>> = per_chunk.into_iter().collect::<Result<_>>()?;
    let n = chunks.len() as f64;
    let corpus = CorpusStats {
        chunks: chunks.len(),
        mean_events: counts.iter().sum::<usize>() as f64 / n,
        mean_non_zeros: config
            .formats
            .iter()
            .enumerate()
            .map(|(fi, &f)| (f, per_chunk.iter().map(|nz| nz[fi] as f64).sum::<f64>() / n))
            .collect(),
    };

    let mut scenarios = Vec::with_capacity(3);
    for (scenario, &pick) in Scenario::ALL.iter().zip(picks.iter()) {
        let (stream, chunk_idx, chunk) = &chunks[pick];
        let reports = config
            .formats
            .iter()
            .map(|&f| measure_encode(chunk, f, config.repetitions, config.raw_event_bytes))
            .collect::<Result<Vec<_>>>()?;
        scenarios.push(ScenarioReport {
            scenario: *scenario,
            stream: *stream,
            chunk: *chunk_idx,
            events: chunk.len() as u64,
            reports,
        });
    }
    Ok(BenchSummary {
        window_us: config.window_us,
        bins: config.bins,
        raw_event_bytes: config.raw_event_bytes,
        corpus,
        scenarios,
    })
}

/// One line of the CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub format: FormatTag,
    pub scenario: Scenario,
    pub events: u64,
    pub latency_ms: f64,
    pub event_rate_mevs: Option<f64>,
    pub non_zeros: u64,
    pub encoded_mb: f64,
    pub compression_ratio: Option<f64>,
    pub bw_mbs: Option<f64>,
}

impl ReportRow {
    pub fn from_report(scenario: Scenario, r: &EncodingReport) -> Self {
        ReportRow {
            format: r.format,
            scenario,
            events: r.events_in_chunk,
            latency_ms: r.latency_s * 1e3,
            event_rate_mevs: r.event_rate_mevs,
            non_zeros: r.non_zeros,
            encoded_mb: r.encoded_mb(),
            compression_ratio: r.compression_ratio,
            bw_mbs: r.bandwidth_mbs,
        }
    }
}

pub fn write_report_csv<W: Write>(writer: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record([
            "format",
            "scenario",
            "events",
            "latency_ms",
            "event_rate_mevs",
            "non_zeros",
            "encoded_mb",
            "compression_ratio",
            "bw_mbs",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json<W: Write>(writer: W, summary: &BenchSummary) -> Result<()> {
    serde_json::to_writer_pretty(writer, summary)?;
    Ok(())
}

pub fn write_rows_json<W: Write>(writer: W, rows: &[ReportRow]) -> Result<()> {
    serde_json::to_writer_pretty(writer, rows)?;
    Ok(())
}

/// Measured counts for one format x scenario cell, replayed through the size
/// model instead of re-encoding.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CountsRow {
    pub format: FormatTag,
    pub scenario: Scenario,
    pub events: u64,
    pub non_zeros: u64,
    pub latency_ms: f64,
}

pub fn read_counts_csv<R: Read>(reader: R) -> Result<Vec<CountsRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayConfig {
    pub geometry: SensorGeometry,
    pub bins: u32,
    pub window_us: u64,
    pub raw_event_bytes: u64,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            geometry: SensorGeometry::GEN1,
            bins: 5,
            window_us: 50_000,
            raw_event_bytes: DEFAULT_RAW_EVENT_BYTES,
        }
    }
}

/// Derives the report columns for externally measured counts.
pub fn replay_counts(rows: &[CountsRow], config: &ReplayConfig) -> Vec<ReportRow> {
    rows.iter()
        .map(|row| {
            let latency_s = row.latency_ms * 1e-3;
            let record_bytes = layout_for(row.format, config.geometry, config.bins).record_bytes() as u64;
            let sizes = compute_sizes(&SizeInputs {
                non_zeros: row.non_zeros,
                record_bytes,
                events: row.events,
                raw_event_bytes: config.raw_event_bytes,
                window_s: config.window_us as f64 * 1e-6,
                latency_s,
            });
            ReportRow {
                format: row.format,
                scenario: row.scenario,
                events: row.events,
                latency_ms: row.latency_ms,
                event_rate_mevs: event_rate_mevs(row.events, latency_s),
                non_zeros: row.non_zeros,
                encoded_mb: sizes.encoded_mb(),
                compression_ratio: sizes.compression_ratio,
                bw_mbs: sizes.bandwidth_mbs(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Event, Polarity, TimeWindow};

    fn sizes(nz: u64, rb: u64, ev: u64, lat_ms: f64) -> SizeMetrics {
        compute_sizes(&SizeInputs {
            non_zeros: nz,
            record_bytes: rb,
            events: ev,
            raw_event_bytes: 4,
            window_s: 0.05,
            latency_s: lat_ms * 1e-3,
        })
    }

    #[test]
    fn size_examples() {
        let v = sizes(96_017, 3, 192_063, 1.5);
        assert!((v.encoded_mb() - 0.27).abs() <= 0.01);
        assert!((v.compression_ratio.unwrap() - 2.67).abs() <= 0.02);
        assert!((v.bandwidth_mbs().unwrap() - 5.33).abs() <= 0.05);
        assert_eq!(v.encoded_bytes, 288_051);

        let s = sizes(125_234, 4, 192_063, 2.3);
        assert!((s.encoded_mb() - 0.48).abs() <= 0.01);
        assert!((s.compression_ratio.unwrap() - 1.53).abs() <= 0.02);
        assert!((s.bandwidth_mbs().unwrap() - 9.13).abs() <= 0.05);

        let x = sizes(29_266, 5, 44_962, 2.1);
        assert!((x.encoded_mb() - 0.14).abs() <= 0.01);
        assert!((x.compression_ratio.unwrap() - 1.23).abs() <= 0.02);
        assert!((x.bandwidth_mbs().unwrap() - 2.68).abs() <= 0.05);
    }

    #[test]
    fn raw_reference_in_mib() {
        // 192,063 events at 4 bytes is the 0.73 MB reference size
        assert!((sizes(1, 1, 192_063, 1.0).raw_mb() - 0.73).abs() < 0.005);
        assert!((sizes(1, 1, 327_030, 1.0).raw_mb() - 1.25).abs() < 0.005);
        assert!((sizes(1, 1, 44_962, 1.0).raw_mb() - 0.17).abs() < 0.005);
    }

    #[test]
    fn zero_encoded_has_no_ratio() {
        let z = sizes(0, 3, 0, 1.0);
        assert_eq!(z.encoded_bytes, 0);
        assert!(z.compression_ratio.is_none());
        assert!(z.bandwidth.is_none());
    }

    #[test]
    fn event_rates() {
        assert!((event_rate_mevs(192_063, 1.5e-3).unwrap() - 128.04).abs() <= 0.01);
        assert!((event_rate_mevs(44_962, 0.8e-3).unwrap() - 56.20).abs() <= 0.01);
        assert_eq!(event_rate_mevs(0, 0.0), Some(0.0));
        assert_eq!(event_rate_mevs(5, 0.0), None);
    }

    #[test]
    fn median_of_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn scenario_selection() {
        assert_eq!(select_scenarios(&[100, 200, 300]), Some([1, 2, 0]));
        assert_eq!(select_scenarios(&[300, 100, 200]), Some([2, 0, 1]));
        assert_eq!(select_scenarios(&[42]), Some([0, 0, 0]));
        assert_eq!(select_scenarios(&[5, 5, 5]), Some([0, 0, 0]));
        assert_eq!(select_scenarios(&[]), None);
    }

    #[test]
    fn measure_empty_chunk() {
        let g = SensorGeometry::new(4, 4).unwrap();
        let w = TimeWindow::new(0, 50_000, 5).unwrap();
        let chunk = Chunk::new(g, &[], w);
        let r = measure_encode(&chunk, FormatTag::Vtei, 3, 4).unwrap();
        assert_eq!(r.event_rate_mevs, Some(0.0));
        assert_eq!(r.encoded_bytes, 0);
        assert!(r.compression_ratio.is_none());
        assert_eq!(r.latency_samples_s.len(), 3);
        assert!(measure_encode(&chunk, FormatTag::Vtei, 0, 4).is_err());
    }

    #[test]
    fn bench_picks_scenarios_across_streams() {
        let g = SensorGeometry::new(8, 8).unwrap();
        let make = |counts: &[usize]| {
            let mut events = Vec::new();
            for (k, &n) in counts.iter().enumerate() {
                for i in 0..n {
                    events.push(Event::new(k as u64 * 1000 + i as u64, (i % 8) as u16, 0, Polarity::Positive));
                }
            }
            EventStream::new(g, events).unwrap()
        };
        let corpus = vec![make(&[100, 200]), make(&[300])];
        let cfg = BenchConfig {
            window_us: 1000,
            repetitions: 1,
            ..BenchConfig::default()
        };
        let summary = bench_corpus(&corpus, &cfg).unwrap();
        let events: Vec<u64> = summary.scenarios.iter().map(|s| s.events).collect();
        assert_eq!(events, vec![200, 300, 100]);
        assert_eq!(summary.rows().len(), 12);
        assert_eq!(summary.corpus.chunks, 3);

        assert!(matches!(
            bench_corpus(&[EventStream::empty(g)], &cfg),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn report_csv_columns() {
        let row = ReportRow {
            format: FormatTag::Vtei,
            scenario: Scenario::Average,
            events: 10,
            latency_ms: 1.5,
            event_rate_mevs: Some(0.5),
            non_zeros: 4,
            encoded_mb: 0.25,
            compression_ratio: None,
            bw_mbs: None,
        };
        let mut out = Vec::new();
        write_report_csv(&mut out, &[row]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "format,scenario,events,latency_ms,event_rate_mevs,non_zeros,encoded_mb,compression_ratio,bw_mbs"
        );
        assert_eq!(lines.next().unwrap(), "vtei,average,10,1.5,0.5,4,0.25,,");
    }

    #[test]
    fn counts_replay() {
        let text = "format,scenario,events,non_zeros,latency_ms\nvtei,average,192063,96017,1.5\n";
        let rows = read_counts_csv(text.as_bytes()).unwrap();
        let out = replay_counts(&rows, &ReplayConfig::default());
        assert!((out[0].encoded_mb - 0.27).abs() <= 0.01);
        assert!((out[0].event_rate_mevs.unwrap() - 128.04).abs() <= 0.01);
    }
}
