//! On-disk formats: event files (CSV, EVB1), tensor containers (ETN1), COO
//! buffers (ECO1), PGM bin export and the synthetic event generator.
//!
//! Native camera containers (Prophesee DAT/RAW, DAVIS AEDAT) are not read
//! here. A reader for one of them would add an [`EventFileKind`] variant and
//! produce an [`EventStream`](crate::event::EventStream) through
//! `EventStream::new`, which enforces ordering and bounds.

mod coo_file;
mod events;
mod pgm;
pub mod synth;
mod tensor_file;

pub use coo_file::{read_coo, read_coo_from, write_coo, write_coo_to, COO_MAGIC};
pub use events::{
    read_csv, read_events, read_evb1, write_csv, write_evb1, write_events, EventFileKind,
    EVB1_MAGIC,
};
pub use pgm::{display_level, write_pgm};
pub use synth::{synth_events, Pattern, SynthConfig};
pub use tensor_file::{read_tensor, read_tensor_from, write_tensor, write_tensor_to, TENSOR_MAGIC};

use std::io::Read;

use crate::error::{Error, Result};

pub(crate) fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::parse("header", "file too short for magic"))?;
    if &buf != magic {
        return Err(Error::parse(
            "header",
            format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&buf),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    Ok(())
}

pub(crate) fn expect_eof<R: Read>(r: &mut R) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::parse("trailer", "trailing bytes after payload")),
    }
}

pub(crate) fn truncated(what: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::parse(what, "truncated file")
        } else {
            Error::Io(e)
        }
    }
}
