//! On-disk cache of operator windows.
//!
//! Entries are keyed by a SHA-256 of everything that determines the window
//! (operator, point specs, evaluation points, convention, `N`) together with
//! the tool version, so an upgrade never reads stale values. Values are
//! stored as raw little-endian `f64`s and reload bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use conidx_core::{Convention, EvalAt, ExperimentSpec, Operator, PointSpec, SeqWindow};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::output::{atomic_write, VERSION};

const MAGIC: &[u8; 8] = b"CONIDXW1";
const EXT: &str = "win";

#[derive(Serialize)]
struct KeyMaterial<'a> {
    version: &'a str,
    operator: Operator,
    x: PointSpec,
    y: Option<PointSpec>,
    d: f64,
    s: Option<f64>,
    window: usize,
    at_x: EvalAt,
    at_y: EvalAt,
    convention: Convention,
}

pub fn cache_key(spec: &ExperimentSpec) -> String {
    let material = KeyMaterial {
        version: VERSION,
        operator: spec.operator,
        x: spec.x,
        y: spec.y,
        d: spec.d,
        s: spec.s,
        window: spec.window,
        at_x: spec.at_x,
        at_y: if spec.operator.is_bivariate() { spec.at_y } else { EvalAt::Jump },
        convention: spec.convention,
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub path: PathBuf,
    pub bytes: u64,
}

#[derive(Clone, Debug)]
pub struct WindowCache {
    dir: PathBuf,
}

fn encode(win: &SeqWindow) -> Option<Vec<u8>> {
    let (kind, parts): (u8, Vec<&[f64]>) = match win {
        SeqWindow::Single(v) => (1, vec![v]),
        SeqWindow::Product { u, v } => (2, vec![u, v]),
        SeqWindow::Dense { .. } => return None,
    };
    let mut out = Vec::with_capacity(32 + parts.iter().map(|p| 8 * p.len()).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(VERSION.len() as u32).to_le_bytes());
    out.extend_from_slice(VERSION.as_bytes());
    out.push(kind);
    for p in parts {
        out.extend_from_slice(&(p.len() as u64).to_le_bytes());
        for x in p {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Some(out)
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], String> {
        if self.0.len() < n {
            return Err("truncated".into());
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn floats(&mut self) -> Result<Vec<f64>, String> {
        let len = self.u64()? as usize;
        let raw = self.take(len.checked_mul(8).ok_or("length overflow")?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// `Ok(None)` for an entry written by another version.
fn decode(bytes: &[u8]) -> Result<Option<SeqWindow>, String> {
    let mut r = Reader(bytes);
    if r.take(8)? != MAGIC {
        return Err("bad magic".into());
    }
    let vlen = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
    if r.take(vlen)? != VERSION.as_bytes() {
        return Ok(None);
    }
    let win = match r.take(1)?[0] {
        1 => SeqWindow::single(r.floats()?),
        2 => {
            let u = r.floats()?;
            SeqWindow::product(u, r.floats()?)
        }
        k => return Err(format!("unknown window kind {k}")),
    };
    if !r.0.is_empty() {
        return Err("trailing bytes".into());
    }
    Ok(Some(win))
}

impl WindowCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: &ExperimentSpec) -> PathBuf {
        self.dir.join(format!("{}.{EXT}", cache_key(spec)))
    }

    pub fn load(&self, spec: &ExperimentSpec) -> Result<Option<SeqWindow>, CliError> {
        let path = self.path_for(spec);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CliError::io(path)(e)),
        };
        let win = decode(&bytes).map_err(|reason| CliError::Cache { path: path.clone(), reason })?;
        match win {
            Some(w) if w.len() == spec.window => Ok(Some(w)),
            Some(_) => Err(CliError::Cache {
                path,
                reason: "window length does not match the key".into(),
            }),
            None => Ok(None),
        }
    }

    pub fn store(&self, spec: &ExperimentSpec, win: &SeqWindow) -> Result<Option<PathBuf>, CliError> {
        let Some(bytes) = encode(win) else {
            return Ok(None);
        };
        let path = self.path_for(spec);
        atomic_write(&path, &bytes)?;
        Ok(Some(path))
    }

    /// Cached window for `spec`, computing and storing it on a miss. The
    /// flag reports a hit.
    pub fn window(&self, spec: &ExperimentSpec) -> Result<(SeqWindow, bool), CliError> {
        if let Some(w) = self.load(spec)? {
            return Ok((w, true));
        }
        let w = conidx_core::generate_window(spec)?;
        self.store(spec, &w)?;
        Ok((w, false))
    }

    pub fn entries(&self) -> Result<Vec<CacheEntry>, CliError> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(CliError::io(&self.dir)(e)),
        };
        let mut out = Vec::new();
        for entry in rd {
            let entry = entry.map_err(CliError::io(&self.dir))?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == EXT) {
                let bytes = entry.metadata().map_err(CliError::io(&path))?.len();
                out.push(CacheEntry { path, bytes });
            }
        }
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize, CliError> {
        let entries = self.entries()?;
        for e in &entries {
            fs::remove_file(&e.path).map_err(CliError::io(&e.path))?;
        }
        Ok(entries.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec::shepard_2d(2.0, PointSpec::rational(1, 2).unwrap(), PointSpec::rational(1, 3).unwrap(), 40)
    }

    #[test]
    fn key_depends_on_inputs() {
        let a = cache_key(&spec());
        assert_eq!(a.len(), 64);
        assert_eq!(a, cache_key(&spec()));
        let mut other = spec();
        other.window = 41;
        assert_ne!(a, cache_key(&other));
        let mut other = spec();
        other.convention = Convention::LowerLeftOpen;
        assert_ne!(a, cache_key(&other));
        // the verdict tolerance does not change the window
        assert_eq!(a, cache_key(&spec().with_tol(0.1)));
    }

    #[test]
    fn store_and_reload_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let cache = WindowCache::new(dir.path());
        let (cold, hit) = cache.window(&spec()).unwrap();
        assert!(!hit);
        let (warm, hit) = cache.window(&spec()).unwrap();
        assert!(hit);
        assert_eq!(cold, warm);
        assert_eq!(cache.entries().unwrap().len(), 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.entries().unwrap().is_empty());
    }

    #[test]
    fn corrupt_and_foreign_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = WindowCache::new(dir.path());
        let path = cache.path_for(&spec());
        fs::write(&path, b"garbage").unwrap();
        assert!(matches!(cache.load(&spec()), Err(CliError::Cache { .. })));
        let mut bytes = encode(&SeqWindow::single(vec![1.0; 40])).unwrap();
        bytes[12] ^= 0xff; // first byte of the version string
        fs::write(&path, &bytes).unwrap();
        assert!(cache.load(&spec()).unwrap().is_none());
    }
}
