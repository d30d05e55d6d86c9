//! On-disk cache of constructed groups.
//!
//! A binary file holds the magic `MCDW1` followed by little-endian `u32`
//! values: degree, generator count, then each generator's permutation of the
//! regular action (row-major, one row per generator). A JSON sidecar records
//! the parameters, the order and how the group was obtained. Writes go to a
//! temporary file that is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::construct::{construct, BuildConfig, Constructed, Method};
use crate::enumerate::PermGroupGens;
use crate::error::{Error, Result};
use crate::group::DenseGroup;
use crate::params::{Family, FamilyParams};
use crate::presentations::presentation;

pub const MAGIC: &[u8; 5] = b"MCDW1";
pub const CACHE_ENV: &str = "MCDW_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub params: FamilyParams,
    pub order: u64,
    pub method: Method,
}

/// `MCDW_CACHE`, else `$XDG_CACHE_HOME/mcdw`, else `~/.cache/mcdw`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("mcdw");
    }
    std::env::var_os("HOME")
        .map(|h| PathBuf::from(h).join(".cache").join("mcdw"))
        .unwrap_or_else(|| PathBuf::from(".mcdw-cache"))
}

/// Keyed by family, p, m and the normalized residue of ℓ (β for G).
pub fn cache_key(params: &FamilyParams) -> String {
    match params.family {
        Family::G => format!("G_b{}", params.alpha),
        f => format!("{f}_p{}_m{}_l{}", params.p, params.m, params.normalized_ell()),
    }
}

pub fn encode(group: &DenseGroup) -> Vec<u8> {
    let n = group.order();
    let k = group.ngens();
    let mut out = Vec::with_capacity(5 + 8 + 4 * n * k);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(k as u32).to_le_bytes());
    for i in 0..k {
        for g in 0..n as u32 {
            out.extend_from_slice(&group.act(g, 2 * i).to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<PermGroupGens> {
    let bad = |m: &str| Error::Cache(m.to_string());
    if bytes.len() < 13 || &bytes[..5] != MAGIC {
        return Err(bad("missing MCDW1 header"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let n = word(5) as usize;
    let k = word(9) as usize;
    if bytes.len() != 13 + 4 * n * k {
        return Err(bad("length does not match header"));
    }
    let perms: Vec<Vec<u32>> = (0..k)
        .map(|i| (0..n).map(|j| word(13 + 4 * (i * n + j))).collect())
        .collect();
    let gens = PermGroupGens {
        degree: n,
        perms,
        faithful: true,
    };
    if !gens.is_valid() {
        return Err(bad("rows are not permutations"));
    }
    Ok(gens)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("cache"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    pub fn paths(&self, params: &FamilyParams) -> (PathBuf, PathBuf) {
        let key = cache_key(params);
        (self.dir.join(format!("{key}.mcdw")), self.dir.join(format!("{key}.json")))
    }

    pub fn save(&self, c: &Constructed) -> Result<PathBuf> {
        let (bin, side) = self.paths(&c.params);
        write_atomic(&bin, &encode(&c.group))?;
        let meta = Sidecar {
            format: "MCDW1".into(),
            params: c.params.clone(),
            order: c.group.order() as u64,
            method: c.method.clone(),
        };
        let json = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Cache(e.to_string()))?;
        write_atomic(&side, &json)?;
        Ok(bin)
    }

    pub fn load(&self, params: &FamilyParams, cap: usize) -> Result<Option<Constructed>> {
        let (bin, side) = self.paths(params);
        if !bin.exists() || !side.exists() {
            return Ok(None);
        }
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let meta: Sidecar =
            serde_json::from_slice(&fs::read(&side).map_err(io)?).map_err(|e| Error::Cache(e.to_string()))?;
        if cache_key(&meta.params) != cache_key(params) {
            return Err(Error::Cache("sidecar parameters do not match the key".into()));
        }
        let gens = decode(&fs::read(&bin).map_err(io)?)?;
        let group = DenseGroup::build(&gens, cap)?;
        if group.order() as u64 != meta.order {
            return Err(Error::Cache("order does not match sidecar".into()));
        }
        let pres = presentation(params).ok();
        if let Some(p) = &pres {
            if !group.satisfies(p) {
                return Err(Error::Cache("cached group violates a relator".into()));
            }
        }
        Ok(Some(Constructed {
            params: params.clone(),
            group,
            presentation: pres,
            method: meta.method,
        }))
    }

    /// Loads from the cache or constructs and stores; the flag reports a hit.
    pub fn get_or_build(&self, params: &FamilyParams, cfg: &BuildConfig) -> Result<(Constructed, bool)> {
        if let Some(c) = self.load(params, cfg.dense_cap)? {
            return Ok((c, true));
        }
        let c = construct(params, cfg)?;
        self.save(&c)?;
        Ok((c, false))
    }
}
