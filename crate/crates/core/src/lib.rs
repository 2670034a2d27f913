//! Vowel-harmony directionality analysis from raw speech.
//!
//! The crate is organised as a pipeline:
//!
//! - [`audio`]: PCM16 WAV I/O, band-limited resampling and pre-emphasis.
//! - [`textgrid`]: Praat TextGrid (long text format) parsing and writing.
//! - [`formants`]: Burg LPC, polynomial roots and 10-point formant tracks.
//! - [`synth`]: cascade formant synthesizer producing ground-truth corpora.
//! - [`stats`]: OLS, random-intercept mixed models fit by maximum likelihood,
//!   likelihood-ratio tests and the p-value special functions.
//! - [`harmony`]: the vowel inventory, V1CV2 pair assembly, harmony scores
//!   and the directionality / trigger analyses.
//! - [`pipeline`]: configuration, manifests, CSV and report formats, and the
//!   `synth` / `extract` / `analyze` / `report` commands used by the binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod audio;
pub mod formants;
pub mod harmony;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod textgrid;

pub use audio::AudioBuffer;
pub use formants::{FormantConfig, FormantTrack, VowelSegment};
pub use harmony::{Vowel, VowelInventory};
pub use textgrid::TextGrid;
