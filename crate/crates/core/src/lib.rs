//! Fixed-window event-camera encodings and their storage cost.
//!
//! Event streams are cut into fixed-length chunks ([`event`]) and turned into
//! dense tensors ([`encode`]): VTEI (last-event ternary images over uniform
//! bins), stacked histograms, MDES and bilinear voxel grids. Tensors compress
//! to fixed-size coordinate-list records ([`coo`]), can be augmented with
//! polarity suppression, flips and zoom-out ([`augment`]), and the
//! [`metrics`] module measures latency, size, compression ratio and
//! bandwidth per chunk.
//!
//! With the default `parallel` feature, batch work (chunk encoding, synthetic
//! event generation, corpus statistics) runs on rayon. Disabling it switches
//! to sequential code with identical output.

pub mod augment;
pub mod coo;
pub mod encode;
pub mod error;
pub mod event;
pub mod io;
pub mod metrics;
pub mod parallel;
pub mod tensor;

pub use augment::{
    apply_sequence, hflip, rps_apply, rps_draw, zoom_out, AugConfig, AugSequenceDraw, RpsBranch,
    RpsConfig,
};
pub use coo::{coo_decode, coo_encode, layout_for, CooBuffer, CooLayout};
pub use encode::{encode, encode_mdes, encode_shist, encode_voxel, encode_vtei};
pub use error::{Error, Result};
pub use event::{assign_bin, chunk_stream, Chunk, Event, EventStream, Polarity, SensorGeometry, TimeWindow};
pub use metrics::{bench_corpus, compute_sizes, measure_encode, BenchConfig, BenchSummary, EncodingReport};
pub use tensor::{count_nonzeros, DenseTensor, Dtype, FormatTag, TensorData};
