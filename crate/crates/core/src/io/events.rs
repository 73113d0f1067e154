use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{expect_eof, expect_magic, truncated};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity, SensorGeometry};

pub const EVB1_MAGIC: &[u8; 4] = b"EVB1";
const CSV_HEADER: [&str; 4] = ["t_us", "x", "y", "p"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFileKind {
    /// `t_us,x,y,p` text with header. Carries no geometry.
    Csv,
    /// Fixed 16-byte little-endian records behind a small header.
    Evb1,
}

impl EventFileKind {
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" | "txt" => Some(EventFileKind::Csv),
            "evb" | "evb1" => Some(EventFileKind::Evb1),
            _ => None,
        }
    }
}

/// Reads an event file, detecting the kind from the magic bytes, then the
/// extension, unless `kind` is given. CSV input needs `geometry`.
pub fn read_events(
    path: &Path,
    kind: Option<EventFileKind>,
    geometry: Option<SensorGeometry>,
) -> Result<EventStream> {
    let kind = match kind {
        Some(k) => k,
        None => detect(path)?,
    };
    let reader = BufReader::new(File::open(path)?);
    match kind {
        EventFileKind::Evb1 => read_evb1(reader),
        EventFileKind::Csv => {
            let geometry = geometry.ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "{}: CSV event files need an explicit sensor geometry",
                    path.display()
                ))
            })?;
            read_csv(reader, geometry)
        }
    }
}

fn detect(path: &Path) -> Result<EventFileKind> {
    let mut head = [0u8; 4];
    let mut f = File::open(path)?;
    let n = f.read(&mut head)?;
    if n == 4 && &head == EVB1_MAGIC {
        return Ok(EventFileKind::Evb1);
    }
    if let Some(kind) = EventFileKind::from_extension(path) {
        return Ok(kind);
    }
    if head[..n].starts_with(b"t_us") {
        return Ok(EventFileKind::Csv);
    }
    Err(Error::parse(
        path.display().to_string(),
        "unrecognized event file (no EVB1 magic, unknown extension)",
    ))
}

pub fn write_events(path: &Path, stream: &EventStream, kind: EventFileKind) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match kind {
        EventFileKind::Csv => write_csv(&mut w, stream)?,
        EventFileKind::Evb1 => write_evb1(&mut w, stream)?,
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV events. Polarity `0` is read as `-1`.
pub fn read_csv<R: Read>(reader: R, geometry: SensorGeometry) -> Result<EventStream> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::parse(
            "line 1",
            format!("expected header t_us,x,y,p, found {}", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut events = Vec::new();
    let mut prev = 0u64;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let at = || format!("line {line}");
        if record.len() != 4 {
            return Err(Error::parse(at(), format!("expected 4 fields, got {}", record.len())));
        }
        let field = |i: usize| &record[i];
        let t: u64 = field(0)
            .parse()
            .map_err(|_| Error::parse(at(), format!("bad timestamp '{}'", field(0))))?;
        let x: u16 = field(1)
            .parse()
            .map_err(|_| Error::parse(at(), format!("bad x '{}'", field(1))))?;
        let y: u16 = field(2)
            .parse()
            .map_err(|_| Error::parse(at(), format!("bad y '{}'", field(2))))?;
        let p = match field(3) {
            "1" | "+1" => Polarity::Positive,
            "-1" | "0" => Polarity::Negative,
            other => return Err(Error::parse(at(), format!("bad polarity '{other}'"))),
        };
        if !geometry.contains(x, y) {
            return Err(Error::parse(
                at(),
                format!("pixel ({x}, {y}) outside {}x{} sensor", geometry.width, geometry.height),
            ));
        }
        if t < prev {
            return Err(Error::parse(at(), format!("timestamp {t} precedes {prev}")));
        }
        prev = t;
        events.push(Event::new(t, x, y, p));
    }
    EventStream::new(geometry, events)
}

pub fn write_csv<W: Write>(writer: W, stream: &EventStream) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for ev in stream.events() {
        w.write_record(&[
            ev.t.to_string(),
            ev.x.to_string(),
            ev.y.to_string(),
            ev.p.sign().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_evb1<R: Read>(mut reader: R) -> Result<EventStream> {
    expect_magic(&mut reader, EVB1_MAGIC)?;
    let hdr = truncated("EVB1 header");
    let width = reader.read_u16::<LittleEndian>().map_err(&hdr)?;
    let height = reader.read_u16::<LittleEndian>().map_err(&hdr)?;
    let count = reader.read_u64::<LittleEndian>().map_err(&hdr)?;
    let geometry = SensorGeometry::new(width as u32, height as u32)?;

    let mut events = Vec::with_capacity(count.min(1 << 24) as usize);
    let mut prev = 0u64;
    let mut rec = [0u8; 16];
    for index in 0..count {
        let at = format!("EVB1 record {index}");
        reader.read_exact(&mut rec).map_err(truncated(&at))?;
        let t = u64::from_le_bytes(rec[0..8].try_into().unwrap());
        let x = u16::from_le_bytes([rec[8], rec[9]]);
        let y = u16::from_le_bytes([rec[10], rec[11]]);
        let p = Polarity::from_sign(rec[12] as i8 as i64)
            .ok_or_else(|| Error::parse(&at, format!("bad polarity {}", rec[12] as i8)))?;
        if rec[13..16] != [0, 0, 0] {
            return Err(Error::parse(&at, "non-zero padding"));
        }
        if !geometry.contains(x, y) {
            return Err(Error::parse(&at, format!("pixel ({x}, {y}) outside {width}x{height} sensor")));
        }
        if t < prev {
            return Err(Error::parse(&at, format!("timestamp {t} precedes {prev}")));
        }
        prev = t;
        events.push(Event::new(t, x, y, p));
    }
    expect_eof(&mut reader)?;
    EventStream::new(geometry, events)
}

pub fn write_evb1<W: Write>(mut writer: W, stream: &EventStream) -> Result<()> {
    let g = stream.geometry();
    writer.write_all(EVB1_MAGIC)?;
    writer.write_u16::<LittleEndian>(g.width as u16)?;
    writer.write_u16::<LittleEndian>(g.height as u16)?;
    writer.write_u64::<LittleEndian>(stream.len() as u64)?;
    for ev in stream.events() {
        writer.write_u64::<LittleEndian>(ev.t)?;
        writer.write_u16::<LittleEndian>(ev.x)?;
        writer.write_u16::<LittleEndian>(ev.y)?;
        writer.write_i8(ev.p.sign())?;
        writer.write_all(&[0, 0, 0])?;
    }
    Ok(())
}
