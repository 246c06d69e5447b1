//! Building blocks of the `nerf` command-line tool.

pub mod curve;
pub mod json;
pub mod simulate;
pub mod verify;

use nerf_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const VACUOUS: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DOMAIN: i32 = 65;
    pub const CAP: i32 = 66;
}

/// Maps a library error to the process exit code that reports it.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Vacuous { .. } => exit::VACUOUS,
        Error::EnumerationCap { .. } => exit::CAP,
        _ => exit::DOMAIN,
    }
}

/// Enumeration cap from `NERF_ENUM_CAP`, falling back to the library default.
pub fn enumeration_cap() -> Result<u128, String> {
    match std::env::var("NERF_ENUM_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map_err(|e| format!("NERF_ENUM_CAP={v:?}: {e}")),
        Err(_) => Ok(nerf_core::erasure::DEFAULT_ENUM_CAP),
    }
}
