//! Compiles every Rust listing of the guide in `book/src` as a doc-test,
//! one module per chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/csi-model.md")]
pub mod csi_model {}
#[doc = include_str!("../../../book/src/unwrapping.md")]
pub mod unwrapping {}
#[doc = include_str!("../../../book/src/calibration.md")]
pub mod calibration {}
#[doc = include_str!("../../../book/src/savitzky-golay.md")]
pub mod savitzky_golay {}
#[doc = include_str!("../../../book/src/tsfr.md")]
pub mod tsfr {}
#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synthetic {}
#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}
#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
