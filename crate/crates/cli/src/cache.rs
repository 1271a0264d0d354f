//! Content-addressed cache for built spaces.  The cache key is the SHA-256
//! of the canonical space section of the config; the stored envelope
//! repeats the key, and a mismatch or parse failure falls back to a
//! rebuild.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cmlab_core::space::{build_space, ModelSpace};

use crate::config::SpaceConfig;
use crate::error::Result;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn space_key(cfg: &SpaceConfig) -> String {
    let canonical = format!(
        "base={};schedule={:?};level={};resolution={:.17e}",
        cfg.scale_base,
        cfg.copies_schedule,
        cfg.max_level,
        cfg.resolution()
    );
    sha256_hex(canonical.as_bytes())
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    key: String,
    space: ModelSpace,
}

/// Build the configured space, going through `cache_dir` when given.
pub fn load_or_build_space(cfg: &SpaceConfig, cache_dir: Option<&Path>) -> Result<ModelSpace> {
    let key = space_key(cfg);
    let path = cache_dir.map(|d| d.join(format!("space-{key}.json")));
    if let Some(path) = &path {
        if let Ok(bytes) = std::fs::read(path) {
            if let Ok(env) = serde_json::from_slice::<Envelope>(&bytes) {
                if env.key == key {
                    return Ok(env.space);
                }
            }
            // corrupt or stale entry: fall through and rebuild
        }
    }
    let space = build_space(&cfg.spec(), cfg.max_level, cfg.resolution())?;
    if let Some(path) = &path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let env = Envelope {
            key,
            space: space.clone(),
        };
        let bytes = serde_json::to_vec(&env).expect("space serializes");
        std::fs::write(path, bytes)?;
    }
    Ok(space)
}
