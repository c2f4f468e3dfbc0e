//! Std companion to `shadowperc-core`: experiment configuration, on-disk
//! formats, rendering, parallel drivers, and the verification suites used
//! by the `shadowperc` binary.

pub mod config;
pub mod io;
pub mod par;
pub mod render;
pub mod verify;
