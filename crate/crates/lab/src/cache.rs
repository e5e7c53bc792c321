//! On-disk sieve segments.
//!
//! File layout, all integers little-endian:
//!
//! ```text
//! "DKSV" | version u16 | lo u64 | hi u64 | flags u16 | entries u64
//! offsets [u32; hi-lo+1] | primes [u64; entries] | exps [u8; entries]
//! big Ω [u8; hi-lo]      (flag 1)
//! small ω [u8; hi-lo]    (flag 2)
//! μ² words [u64; ⌈(hi-lo)/64⌉]  (flag 4)
//! ```
//!
//! The factor arena is always present. Loading re-validates every
//! factorization, so a damaged file is rejected rather than used.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use shortint_core::SieveSegment;
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"DKSV";
pub const VERSION: u16 = 1;
pub const FLAG_BIG_OMEGA: u16 = 1;
pub const FLAG_SMALL_OMEGA: u16 = 2;
pub const FLAG_MU_SQUARED: u16 = 4;
const HEADER_LEN: usize = 4 + 2 + 8 + 8 + 2 + 8;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io: {0}")]
    Io(#[from] io::Error),
    #[error("cache file {path}: {msg}")]
    Corrupt { path: PathBuf, msg: String },
}

#[derive(Debug, Clone)]
pub struct SegmentCache {
    dir: PathBuf,
}

impl SegmentCache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, lo: u64, hi: u64) -> PathBuf {
        self.dir.join(format!("seg_{lo}_{hi}.dksv"))
    }

    /// `Ok(None)` when no file exists; an error when one exists but is bad.
    pub fn load(&self, lo: u64, hi: u64) -> Result<Option<SieveSegment>, CacheError> {
        let path = self.path(lo, hi);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        decode(&bytes, lo, hi)
            .map(Some)
            .map_err(|msg| CacheError::Corrupt { path, msg })
    }

    /// Writes through a temporary file so readers never see half a segment.
    pub fn store(&self, seg: &SieveSegment) -> io::Result<()> {
        let path = self.path(seg.lo(), seg.hi());
        let tmp = path.with_extension("tmp");
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&encode(seg))?;
        file.sync_all()?;
        fs::rename(tmp, path)
    }
}

pub fn encode(seg: &SieveSegment) -> Vec<u8> {
    let entries = seg.entry_primes().len();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * seg.offsets().len() + 9 * entries + 3 * seg.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&seg.lo().to_le_bytes());
    out.extend_from_slice(&seg.hi().to_le_bytes());
    out.extend_from_slice(&(FLAG_BIG_OMEGA | FLAG_SMALL_OMEGA | FLAG_MU_SQUARED).to_le_bytes());
    out.extend_from_slice(&(entries as u64).to_le_bytes());
    for o in seg.offsets() {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for p in seg.entry_primes() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out.extend_from_slice(seg.entry_exponents());
    out.extend_from_slice(seg.big_omega_array());
    out.extend_from_slice(seg.small_omega_array());
    for w in seg.mu_squared_words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or("truncated")?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, String> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32s(&mut self, n: usize) -> Result<Vec<u32>, String> {
        let raw = self.take(n.checked_mul(4).ok_or("length overflow")?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn u64s(&mut self, n: usize) -> Result<Vec<u64>, String> {
        let raw = self.take(n.checked_mul(8).ok_or("length overflow")?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn decode(bytes: &[u8], lo: u64, hi: u64) -> Result<SieveSegment, String> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(4)? != MAGIC {
        return Err("bad magic".into());
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let (flo, fhi) = (r.u64()?, r.u64()?);
    if (flo, fhi) != (lo, hi) {
        return Err(format!("holds [{flo}, {fhi}) instead of [{lo}, {hi})"));
    }
    if lo == 0 || hi <= lo {
        return Err("empty range".into());
    }
    let flags = r.u16()?;
    if flags & !(FLAG_BIG_OMEGA | FLAG_SMALL_OMEGA | FLAG_MU_SQUARED) != 0 {
        return Err(format!("unknown flags {flags:#x}"));
    }
    let len = usize::try_from(hi - lo).map_err(|_| "range too long")?;
    let entries = usize::try_from(r.u64()?).map_err(|_| "entry count too large")?;
    if entries > r.bytes.len() {
        return Err("truncated".into());
    }
    let offsets = r.u32s(len + 1)?;
    let primes = r.u64s(entries)?;
    let exps = r.take(entries)?.to_vec();
    let big = if flags & FLAG_BIG_OMEGA != 0 {
        Some(r.take(len)?.to_vec())
    } else {
        None
    };
    let small = if flags & FLAG_SMALL_OMEGA != 0 {
        Some(r.take(len)?.to_vec())
    } else {
        None
    };
    let mu = if flags & FLAG_MU_SQUARED != 0 {
        Some(r.u64s(len.div_ceil(64))?)
    } else {
        None
    };
    if r.at != bytes.len() {
        return Err("trailing bytes".into());
    }
    SieveSegment::from_parts(lo, hi, offsets, primes, exps, big, small, mu).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use shortint_core::accumulate::prime_table_for;

    fn seg(lo: u64, hi: u64) -> SieveSegment {
        SieveSegment::build(lo, hi, &prime_table_for(hi).unwrap(), hi - lo).unwrap()
    }

    #[test]
    fn round_trip() {
        let s = seg(1000, 5000);
        assert_eq!(decode(&encode(&s), 1000, 5000).unwrap(), s);
        let one = seg(1, 70);
        assert_eq!(decode(&encode(&one), 1, 70).unwrap(), one);
    }

    #[test]
    fn damage_is_detected() {
        let s = seg(1000, 5000);
        let good = encode(&s);
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(decode(&bad_magic, 1000, 5000).unwrap_err().contains("magic"));
        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(decode(&bad_version, 1000, 5000).unwrap_err().contains("version"));
        assert!(decode(&good[..good.len() - 3], 1000, 5000).is_err());
        assert!(decode(&good, 1000, 5001).is_err());
        // flip one byte of a stored prime
        let mut bad_prime = good.clone();
        let at = HEADER_LEN + 4 * 4001 + 8 * 10;
        bad_prime[at] ^= 1;
        assert!(decode(&bad_prime, 1000, 5000).is_err());
        let mut tail = good;
        tail.push(0);
        assert!(decode(&tail, 1000, 5000).unwrap_err().contains("trailing"));
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SegmentCache::new(dir.path()).unwrap();
        assert!(cache.load(10, 20).unwrap().is_none());
        let s = seg(10, 2000);
        cache.store(&s).unwrap();
        let first = fs::read(cache.path(10, 2000)).unwrap();
        assert_eq!(cache.load(10, 2000).unwrap().unwrap(), s);
        cache.store(&s).unwrap();
        assert_eq!(fs::read(cache.path(10, 2000)).unwrap(), first);
        fs::write(cache.path(10, 2000), b"DKSV\x01\x00junk").unwrap();
        assert!(cache.load(10, 2000).is_err());
    }
}
