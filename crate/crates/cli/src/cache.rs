//! Content-addressed on-disk cache of realizations and Hom bases.
//!
//! An entry lives in `<dir>/<sha256 of key>.pxc`, where the key joins the engine
//! version, entry kind, prime, ambient dimension and canonical expressions. File
//! layout, all integers little-endian:
//!
//! ```text
//! magic     4 bytes   "PXC1"
//! version   u32 len + UTF-8 engine version
//! kind      u8        1 = realization, 2 = Hom basis
//! key       u32 len + UTF-8 key
//! payload   u64 len + bytes
//! checksum  32 bytes  SHA-256 of everything above
//! ```
//!
//! Realization payload: u32 p, u32 n, u32 count, then per label u32 len + bytes.
//! Hom basis payload: u32 p, u32 rows, u32 cols, u32 count, then per map u32 nnz
//! followed by nnz triples (u32 row, u32 col, u8 value).
//!
//! Entries are written to a temporary file in the same directory and renamed into
//! place, so concurrent writers never expose a partial file. A corrupt or foreign
//! entry is reported on stderr, recomputed and overwritten.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use polyext::expr::FunctorExpr;
use polyext::hom::{hom_space, HomBasis};
use polyext::linalg::SparseMatrix;
use polyext::realize::{Label, Realization};
use sha2::{Digest, Sha256};

use crate::CliError;

const MAGIC: &[u8; 4] = b"PXC1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Realization = 1,
    HomBasis = 2,
}

/// Hit and miss counters of one cache handle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub hits: usize,
    pub misses: usize,
    pub corrupt: usize,
}

pub struct Cache {
    dir: PathBuf,
    version: String,
    hits: AtomicUsize,
    misses: AtomicUsize,
    corrupt: AtomicUsize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

impl Cache {
    /// Open (creating if needed) a cache directory for the given engine version.
    pub fn open(dir: impl Into<PathBuf>, version: &str) -> Result<Self, CliError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Cache {
            dir,
            version: version.to_string(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            corrupt: AtomicUsize::new(0),
        })
    }

    pub fn stats(&self) -> Stats {
        Stats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            corrupt: self.corrupt.load(Ordering::Relaxed),
        }
    }

    fn key(&self, kind: Kind, p: u32, n: usize, exprs: &[&FunctorExpr]) -> String {
        let names: Vec<String> = exprs.iter().map(|e| e.to_string()).collect();
        format!("{}\n{}\n{p}\n{n}\n{}", self.version, kind as u8, names.join("\n"))
    }

    /// Path of the entry for a key.
    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}.pxc"))
    }

    /// Path of the realization entry for (expr, n, p).
    pub fn realization_path(&self, expr: &FunctorExpr, n: usize, p: u32) -> PathBuf {
        self.path_for(&self.key(Kind::Realization, p, n, &[expr]))
    }

    /// Path of the Hom basis entry for (f, g, n, p).
    pub fn hom_path(&self, f: &FunctorExpr, g: &FunctorExpr, n: usize, p: u32) -> PathBuf {
        self.path_for(&self.key(Kind::HomBasis, p, n, &[f, g]))
    }

    /// Payload of a valid entry, or None when absent, stale or corrupt.
    fn read(&self, kind: Kind, key: &str) -> Result<Option<Vec<u8>>, CliError> {
        let path = self.path_for(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return Ok(None);
            }
            Err(e) => return Err(io_err(&path)(e)),
        };
        match decode_entry(&bytes, &self.version, kind, key) {
            Some(payload) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Ok(Some(payload))
            }
            None => {
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                eprintln!("warning: cache entry {} failed validation; recomputing", path.display());
                Ok(None)
            }
        }
    }

    fn write(&self, kind: Kind, key: &str, payload: &[u8]) -> Result<(), CliError> {
        let path = self.path_for(key);
        let bytes = encode_entry(&self.version, kind, key, payload);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err(&self.dir))?;
        tmp.write_all(&bytes).map_err(io_err(tmp.path()))?;
        tmp.persist(&path).map_err(|e| CliError::Io { path: path.clone(), source: e.error })?;
        Ok(())
    }

    /// The realization of expr at k^n, from the cache or freshly computed and stored.
    pub fn realization(&self, expr: &FunctorExpr, n: usize, p: u32, max_dim: usize) -> Result<Realization, CliError> {
        let key = self.key(Kind::Realization, p, n, &[expr]);
        if let Some(payload) = self.read(Kind::Realization, &key)? {
            if let Some(labels) = decode_labels(&payload, p, n) {
                if let Ok(r) = Realization::from_labels(expr, n, p, labels) {
                    return Ok(r);
                }
            }
            self.corrupt.fetch_add(1, Ordering::Relaxed);
            eprintln!("warning: cache entry {} holds an invalid basis; recomputing", self.path_for(&key).display());
        }
        let r = Realization::with_budget(expr, n, p, max_dim)?;
        self.write(Kind::Realization, &key, &encode_labels(r.labels(), p, n))?;
        Ok(r)
    }

    /// Hom(f, g) between two realizations, from the cache or freshly solved and stored.
    pub fn hom_space(&self, f: &Realization, g: &Realization) -> Result<HomBasis, CliError> {
        let (p, n) = (f.p(), f.ambient());
        let key = self.key(Kind::HomBasis, p, n, &[f.expr(), g.expr()]);
        if let Some(payload) = self.read(Kind::HomBasis, &key)? {
            if let Some(maps) = decode_maps(&payload, p, g.dim(), f.dim()) {
                if let Ok(h) = HomBasis::from_maps(f, g, &maps) {
                    return Ok(h);
                }
            }
            self.corrupt.fetch_add(1, Ordering::Relaxed);
            eprintln!("warning: cache entry {} holds an invalid Hom basis; recomputing", self.path_for(&key).display());
        }
        let h = hom_space(f, g)?;
        self.write(Kind::HomBasis, &key, &encode_maps(&h.basis, p, h.rows, h.cols))?;
        Ok(h)
    }
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    put_u32(out, b.len() as u32);
    out.extend_from_slice(b);
}

/// A cursor over little-endian fields; every read fails softly on truncation.
struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.b.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|s| s[0])
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|s| u32::from_le_bytes(s.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|s| u64::from_le_bytes(s.try_into().unwrap()))
    }

    fn bytes(&mut self) -> Option<&'a [u8]> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn done(&self) -> bool {
        self.pos == self.b.len()
    }
}

pub fn encode_entry(version: &str, kind: Kind, key: &str, payload: &[u8]) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    put_bytes(&mut out, version.as_bytes());
    out.push(kind as u8);
    put_bytes(&mut out, key.as_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

/// The payload of an entry whose checksum, version, kind and key all match.
pub fn decode_entry(bytes: &[u8], version: &str, kind: Kind, key: &str) -> Option<Vec<u8>> {
    let body_len = bytes.len().checked_sub(32)?;
    let (body, sum) = bytes.split_at(body_len);
    if Sha256::digest(body).as_slice() != sum {
        return None;
    }
    let mut r = Reader { b: body, pos: 0 };
    if r.take(4)? != MAGIC || r.bytes()? != version.as_bytes() || r.u8()? != kind as u8 || r.bytes()? != key.as_bytes() {
        return None;
    }
    let n = r.u64()? as usize;
    let payload = r.take(n)?.to_vec();
    r.done().then_some(payload)
}

fn encode_labels(labels: &[Label], p: u32, n: usize) -> Vec<u8> {
    let mut out = Vec::new();
    put_u32(&mut out, p);
    put_u32(&mut out, n as u32);
    put_u32(&mut out, labels.len() as u32);
    for l in labels {
        put_bytes(&mut out, l);
    }
    out
}

fn decode_labels(payload: &[u8], p: u32, n: usize) -> Option<Vec<Label>> {
    let mut r = Reader { b: payload, pos: 0 };
    if r.u32()? != p || r.u32()? as usize != n {
        return None;
    }
    let count = r.u32()? as usize;
    let labels = (0..count).map(|_| r.bytes().map(|b| b.to_vec())).collect::<Option<Vec<_>>>()?;
    r.done().then_some(labels)
}

fn encode_maps(maps: &[SparseMatrix], p: u32, rows: usize, cols: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for x in [p, rows as u32, cols as u32, maps.len() as u32] {
        put_u32(&mut out, x);
    }
    for m in maps {
        put_u32(&mut out, m.nnz() as u32);
        for (i, j, c) in m.entries() {
            put_u32(&mut out, i as u32);
            put_u32(&mut out, j as u32);
            out.push(c);
        }
    }
    out
}

fn decode_maps(payload: &[u8], p: u32, rows: usize, cols: usize) -> Option<Vec<SparseMatrix>> {
    let mut r = Reader { b: payload, pos: 0 };
    if r.u32()? != p || r.u32()? as usize != rows || r.u32()? as usize != cols {
        return None;
    }
    let count = r.u32()? as usize;
    let mut maps = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let nnz = r.u32()? as usize;
        let mut t = Vec::with_capacity(nnz.min(1 << 16));
        for _ in 0..nnz {
            let (i, j, c) = (r.u32()? as usize, r.u32()? as usize, r.u8()?);
            if i >= rows || j >= cols || c == 0 || c as u32 >= p {
                return None;
            }
            t.push((i, j, c));
        }
        maps.push(SparseMatrix::from_triplets(p as u8, rows, cols, t));
    }
    r.done().then_some(maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_round_trip_and_reject_tampering() {
        let e = encode_entry("1.0", Kind::Realization, "k", b"payload");
        assert_eq!(decode_entry(&e, "1.0", Kind::Realization, "k").as_deref(), Some(&b"payload"[..]));
        assert!(decode_entry(&e, "1.1", Kind::Realization, "k").is_none());
        assert!(decode_entry(&e, "1.0", Kind::HomBasis, "k").is_none());
        assert!(decode_entry(&e, "1.0", Kind::Realization, "other").is_none());
        let mut bad = e.clone();
        bad[10] ^= 1;
        assert!(decode_entry(&bad, "1.0", Kind::Realization, "k").is_none());
        assert!(decode_entry(&e[..e.len() - 1], "1.0", Kind::Realization, "k").is_none());
    }

    #[test]
    fn payloads_round_trip() {
        let labels = vec![vec![2, 0], vec![1, 1], vec![0, 2]];
        assert_eq!(decode_labels(&encode_labels(&labels, 3, 2), 3, 2), Some(labels.clone()));
        assert_eq!(decode_labels(&encode_labels(&labels, 3, 2), 2, 2), None);
        let m = SparseMatrix::from_triplets(3, 2, 3, [(0, 1, 2), (1, 2, 1)]);
        let maps = vec![m.clone(), SparseMatrix::from_triplets(3, 2, 3, [(1, 0, 1)])];
        let got = decode_maps(&encode_maps(&maps, 3, 2, 3), 3, 2, 3).unwrap();
        assert_eq!(got.iter().map(|x| x.to_dense()).collect::<Vec<_>>(), maps.iter().map(|x| x.to_dense()).collect::<Vec<_>>());
    }
}
