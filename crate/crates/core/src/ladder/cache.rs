//! On-disk persistence of the checkpoint table.
//!
//! File layout, all little-endian:
//!
//! ```text
//! 0   8  magic  b"LADDERT\0"
//! 8   4  u32    format version
//! 12  4  u32    reserved (0)
//! 16  8  f64    t_min
//! 24  8  f64    t_max
//! 32  8  f64    checkpoint step
//! 40  8  f64    Newton tolerance
//! 48  8  u64    summary grid size
//! 56  8  u64    index of the first checkpoint
//! 64  8  u64    number of rows
//! 72  …  rows of three f64: t, φ₁(t), ∫₀^t Z²
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use sha2::{Digest, Sha256};

use super::{invert_defining, HlTable, LadderConfig, LadderModel};
use crate::error::{Error, Result};

pub const LADDER_CACHE_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"LADDERT\0";
const HEADER_LEN: usize = 72;

/// Environment variable that overrides the cache directory.
pub const CACHE_DIR_ENV: &str = "LADDER_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheStatus {
    Hit(PathBuf),
    Miss(PathBuf),
    Disabled,
}

/// Hex digest identifying the data a configuration produces.
pub fn cache_key(config: &LadderConfig) -> String {
    let mut h = Sha256::new();
    h.update(MAGIC);
    h.update(LADDER_CACHE_VERSION.to_le_bytes());
    h.update(config.t_min.to_le_bytes());
    h.update(config.t_max.to_le_bytes());
    h.update(config.step.to_le_bytes());
    h.update(config.newton_tol.to_le_bytes());
    h.update((config.summary_nodes as u64).to_le_bytes());
    h.finalize()[..12].iter().map(|b| format!("{b:02x}")).collect()
}

/// `explicit` if given, else the directory named by `LADDER_CACHE_DIR`.
pub fn resolve_cache_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
}

pub fn cache_path(dir: &Path, config: &LadderConfig) -> PathBuf {
    dir.join(format!("ladder-{}.bin", cache_key(config)))
}

impl LadderModel {
    /// Loads the model from the cache directory or builds and stores it.
    pub fn build_cached(config: LadderConfig, dir: Option<&Path>) -> Result<(Self, CacheStatus)> {
        config.validate()?;
        let Some(dir) = resolve_cache_dir(dir) else {
            return Ok((Self::build(config)?, CacheStatus::Disabled));
        };
        let path = cache_path(&dir, &config);
        if path.exists() {
            match Self::load(&path, config) {
                Ok(model) => {
                    info!("ladder cache hit: {}", path.display());
                    return Ok((model, CacheStatus::Hit(path)));
                }
                Err(e) => info!("ignoring unreadable ladder cache {}: {e}", path.display()),
            }
        }
        info!("ladder cache miss: {}", path.display());
        let model = Self::build(config)?;
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        model.save(&path)?;
        Ok((model, CacheStatus::Miss(path)))
    }

    /// Writes the checkpoint rows; the file is replaced atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        let cfg = &self.config;
        let rows: Vec<(f64, f64)> = self.table.checkpoints().collect();
        let mut buf = Vec::with_capacity(HEADER_LEN + rows.len() * 24);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&LADDER_CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        for v in [cfg.t_min, cfg.t_max, cfg.step, cfg.newton_tol] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for v in [cfg.summary_nodes, self.table.first(), rows.len()] {
            buf.extend_from_slice(&(v as u64).to_le_bytes());
        }
        let mut guess = f64::NAN;
        for (t, hl) in rows {
            let phi = if hl > 0.0 {
                invert_defining(hl, guess, cfg.newton_tol).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            guess = phi;
            for v in [t, phi, hl] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        let tmp = path.with_extension("tmp");
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(&buf).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    /// Reads a cache file written for `config`; the header must match.
    pub fn load(path: &Path, config: LadderConfig) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        let bad = |msg: &str| Error::Cache(format!("{}: {msg}", path.display()));
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(bad("not a ladder cache file"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        if u32_at(8) != LADDER_CACHE_VERSION {
            return Err(bad("unsupported version"));
        }
        let header = [f64_at(16), f64_at(24), f64_at(32), f64_at(40)];
        let expected = [config.t_min, config.t_max, config.step, config.newton_tol];
        if header.iter().zip(&expected).any(|(a, b)| a.to_bits() != b.to_bits())
            || u64_at(48) != config.summary_nodes as u64
        {
            return Err(bad("header does not match the requested configuration"));
        }
        let first = u64_at(56) as usize;
        let rows = u64_at(64) as usize;
        if bytes.len() != HEADER_LEN + rows * 24 {
            return Err(bad("truncated"));
        }
        let values = (0..rows).map(|i| f64_at(HEADER_LEN + i * 24 + 16)).collect();
        let table = HlTable::from_parts(config.step, first, values);
        Self::from_table(config, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_hit() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = LadderConfig {
            summary_nodes: 50,
            ..LadderConfig::new(100.0, 600.0)
        };
        let (built, status) = LadderModel::build_cached(cfg, Some(dir.path())).unwrap();
        assert!(matches!(status, CacheStatus::Miss(_)));
        let (loaded, status) = LadderModel::build_cached(cfg, Some(dir.path())).unwrap();
        assert!(matches!(status, CacheStatus::Hit(_)));
        assert_eq!(built.table(), loaded.table());
        assert_eq!(built.value(345.6).unwrap(), loaded.value(345.6).unwrap());

        let other = LadderConfig { t_max: 700.0, ..cfg };
        assert_ne!(cache_key(&cfg), cache_key(&other));
        assert!(LadderModel::load(&cache_path(dir.path(), &cfg), other).is_err());
    }
}
