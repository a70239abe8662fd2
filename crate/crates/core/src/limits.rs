//! Capacity limits shared by every module.
//!
//! The register-dimension cap defaults to 2^16 and can be overridden with the
//! `QNET_CAP_DIM` environment variable (read once per process).

use std::sync::OnceLock;

use crate::error::{QnetError, Result};

pub const DEFAULT_DIM_CAP: usize = 1 << 16;
/// Largest matrix handed to the exponential oracle.
pub const EXPM_DIM_CAP: usize = 1024;
/// Largest register dimension whose augmented operator is built densely.
pub const MATERIALIZE_DIM_CAP: usize = 1024;
pub const MAX_EVOLUTION_STEPS: usize = 1_000_000;
/// Most raising elements a single generated network may hold.
pub const ELEMENT_CAP: usize = 1 << 22;

pub const CAP_ENV_VAR: &str = "QNET_CAP_DIM";

static DIM_CAP: OnceLock<usize> = OnceLock::new();

pub fn dim_cap() -> usize {
    *DIM_CAP.get_or_init(|| {
        std::env::var(CAP_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

pub(crate) fn check_cap(what: &'static str, requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(QnetError::Capacity {
            what,
            requested,
            cap,
        })
    } else {
        Ok(())
    }
}
