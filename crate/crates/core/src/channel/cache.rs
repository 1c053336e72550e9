//! On-disk matrix cache.
//!
//! File layout, little-endian throughout:
//!
//! ```text
//! magic            8 bytes  b"PRCMTX\0\0"
//! format_version   u32
//! lambda           f64
//! block_len        u32
//! max_output_len   u32
//! per_bit_cap      i32      (-1 when absent)
//! conditioned      u8       (0 or 1)
//! output_count     u64
//! checksum         32 bytes SHA-256 of everything after the header
//! outputs          output_count × (len: u8, value: ⌈len/8⌉ bytes LE)
//! entries          2^L × output_count f64, row-major
//! ```

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{BitString, ChannelSpec, TransitionMatrix};
use crate::dmc::{Dmc, Row};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"PRCMTX\0\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 4 + 4 + 4 + 1 + 8 + 32;
const CHECKSUM_OFFSET: u64 = (HEADER_LEN - 32) as u64;

/// Decoded file header.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheHeader {
    pub format_version: u32,
    pub spec: ChannelSpec,
    pub output_count: u64,
    pub checksum: [u8; 32],
}

impl CacheHeader {
    pub fn num_inputs(&self) -> usize {
        self.spec.num_inputs()
    }

    /// Size of the file this header describes, excluding the output list.
    pub fn entries_bytes(&self) -> u64 {
        self.num_inputs() as u64 * self.output_count * 8
    }
}

/// Digits kept when a rate appears in a cache key.
const KEY_DIGITS: usize = 12;

/// File name for `spec`; the rate is rounded to 12 significant digits.
pub fn cache_file_name(spec: &ChannelSpec) -> String {
    let lambda = format!("{:.*e}", KEY_DIGITS - 1, spec.lambda);
    let cap = spec
        .per_bit_cap
        .map_or_else(|| "none".to_string(), |c| c.to_string());
    format!(
        "prc_L{}_cap{}_Rm{}_{}_lam{}.mtx",
        spec.block_len,
        cap,
        spec.max_output_len,
        if spec.conditioned { "cond" } else { "raw" },
        lambda
    )
}

fn header_bytes(spec: &ChannelSpec, output_count: u64, checksum: &[u8; 32]) -> Vec<u8> {
    let mut h = Vec::with_capacity(HEADER_LEN);
    h.extend_from_slice(&MAGIC);
    h.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    h.extend_from_slice(&spec.lambda.to_le_bytes());
    h.extend_from_slice(&spec.block_len.to_le_bytes());
    h.extend_from_slice(&spec.max_output_len.to_le_bytes());
    let cap = spec.per_bit_cap.map_or(-1i32, |c| c as i32);
    h.extend_from_slice(&cap.to_le_bytes());
    h.push(u8::from(spec.conditioned));
    h.extend_from_slice(&output_count.to_le_bytes());
    h.extend_from_slice(checksum);
    debug_assert_eq!(h.len(), HEADER_LEN);
    h
}

/// Writer that hashes everything passing through it.
struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

fn encode_output(y: BitString) -> impl Iterator<Item = u8> {
    let n = y.len().div_ceil(8);
    std::iter::once(y.len() as u8).chain(y.value().to_le_bytes().into_iter().take(n))
}

/// Writes `matrix` to `path` (through a temporary file, then renamed).
pub fn write_matrix(path: &Path, matrix: &TransitionMatrix) -> Result<()> {
    let tmp = path.with_extension("mtx.tmp");
    let io = |e| Error::io(&tmp, e);
    let file = File::create(&tmp).map_err(io)?;
    let mut w = BufWriter::new(file);
    let spec = &matrix.spec;
    let count = matrix.outputs.len() as u64;
    w.write_all(&header_bytes(spec, count, &[0; 32])).map_err(io)?;

    let mut hw = HashingWriter {
        inner: w,
        hasher: Sha256::new(),
    };
    let mut buf = Vec::with_capacity(16);
    for &y in &matrix.outputs {
        buf.clear();
        buf.extend(encode_output(y));
        hw.write_all(&buf).map_err(io)?;
    }
    let mut dense = vec![0.0f64; matrix.outputs.len()];
    let mut bytes = Vec::with_capacity(dense.len() * 8);
    for row in matrix.dmc().rows() {
        dense.iter_mut().for_each(|v| *v = 0.0);
        for (c, v) in row.nonzeros() {
            dense[c] = v;
        }
        bytes.clear();
        for v in &dense {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        hw.write_all(&bytes).map_err(io)?;
    }
    let checksum: [u8; 32] = hw.hasher.finalize().into();
    let mut w = hw.inner;
    w.flush().map_err(io)?;
    let mut file = w.into_inner().map_err(|e| Error::io(&tmp, e.into_error()))?;
    file.seek(SeekFrom::Start(CHECKSUM_OFFSET)).map_err(io)?;
    file.write_all(&checksum).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::CorruptCache {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            corrupt(path, "truncated file")
        } else {
            Error::io(path, e)
        }
    })
}

fn parse_header(bytes: &[u8; HEADER_LEN], path: &Path) -> Result<CacheHeader> {
    if bytes[..8] != MAGIC {
        return Err(corrupt(path, "bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let format_version = u32_at(8);
    if format_version != FORMAT_VERSION {
        return Err(corrupt(path, format!("unsupported format version {format_version}")));
    }
    let lambda = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let block_len = u32_at(20);
    let max_output_len = u32_at(24);
    let cap = i32::from_le_bytes(bytes[28..32].try_into().unwrap());
    let conditioned = match bytes[32] {
        0 => false,
        1 => true,
        other => return Err(corrupt(path, format!("bad conditioned flag {other}"))),
    };
    let output_count = u64::from_le_bytes(bytes[33..41].try_into().unwrap());
    let checksum: [u8; 32] = bytes[41..73].try_into().unwrap();
    let spec = ChannelSpec {
        lambda,
        block_len,
        max_output_len,
        per_bit_cap: if cap < 0 { None } else { Some(cap as u32) },
        conditioned,
    };
    spec.validate()
        .map_err(|e| corrupt(path, format!("invalid header: {e}")))?;
    Ok(CacheHeader {
        format_version,
        spec,
        output_count,
        checksum,
    })
}

/// Reads only the header of a cache file.
pub fn read_header(path: &Path) -> Result<CacheHeader> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = [0u8; HEADER_LEN];
    read_exact(&mut f, &mut buf, path)?;
    parse_header(&buf, path)
}

/// Recomputes the payload checksum and compares it with the header.
pub fn verify(path: &Path) -> Result<CacheHeader> {
    let header = read_header(path)?;
    let mut f = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    f.seek(SeekFrom::Start(HEADER_LEN as u64))
        .map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest: [u8; 32] = hasher.finalize().into();
    if digest != header.checksum {
        return Err(corrupt(path, "checksum mismatch"));
    }
    Ok(header)
}

/// Loads and verifies a matrix file.
pub fn read_matrix(path: &Path) -> Result<TransitionMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut hbuf = [0u8; HEADER_LEN];
    read_exact(&mut r, &mut hbuf, path)?;
    let header = parse_header(&hbuf, path)?;
    let spec = header.spec;

    let mut hasher = Sha256::new();
    let count = usize::try_from(header.output_count)
        .map_err(|_| corrupt(path, "output count overflows"))?;
    let mut outputs = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        let mut len = [0u8; 1];
        read_exact(&mut r, &mut len, path)?;
        let n = usize::from(len[0]);
        if n > spec.max_output_len as usize {
            return Err(corrupt(path, format!("output of length {n} exceeds R_m")));
        }
        let mut payload = [0u8; 8];
        read_exact(&mut r, &mut payload[..n.div_ceil(8)], path)?;
        hasher.update(len);
        hasher.update(&payload[..n.div_ceil(8)]);
        let y = BitString::new(n, u64::from_le_bytes(payload)).expect("checked length");
        if outputs.last().is_some_and(|&prev| prev >= y) {
            return Err(corrupt(path, "outputs not in canonical order"));
        }
        outputs.push(y);
    }

    let mut rows = Vec::with_capacity(spec.num_inputs());
    let mut bytes = vec![0u8; count * 8];
    for _ in 0..spec.num_inputs() {
        read_exact(&mut r, &mut bytes, path)?;
        hasher.update(&bytes);
        let entries: Vec<(u32, f64)> = bytes
            .chunks_exact(8)
            .enumerate()
            .map(|(c, b)| (c as u32, f64::from_le_bytes(b.try_into().unwrap())))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        rows.push(Row::from_sorted_entries(count, &entries));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| Error::io(path, e))? != 0 {
        return Err(corrupt(path, "trailing bytes"));
    }
    let digest: [u8; 32] = hasher.finalize().into();
    if digest != header.checksum {
        return Err(corrupt(path, "checksum mismatch"));
    }
    let dmc = Dmc::new(count, rows).map_err(|e| corrupt(path, e.to_string()))?;
    Ok(TransitionMatrix::from_parts(
        spec,
        outputs,
        spec.validity_mass(),
        dmc,
    ))
}

/// Directory of cached matrices keyed by [`cache_file_name`].
#[derive(Debug, Clone)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: &ChannelSpec) -> PathBuf {
        self.dir.join(cache_file_name(spec))
    }

    /// Cached matrix for `spec`; `Ok(None)` when absent or corrupt.
    pub fn load(&self, spec: &ChannelSpec) -> Result<Option<TransitionMatrix>> {
        let path = self.path_for(spec);
        if !path.exists() {
            return Ok(None);
        }
        match read_matrix(&path) {
            Ok(m) => Ok(Some(m)),
            Err(Error::CorruptCache { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn store(&self, matrix: &TransitionMatrix) -> Result<PathBuf> {
        let path = self.path_for(&matrix.spec);
        write_matrix(&path, matrix)?;
        Ok(path)
    }
}

/// One line of a cache listing.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub path: PathBuf,
    pub file_size: u64,
    /// `None` when the header itself cannot be parsed.
    pub header: Option<CacheHeader>,
    pub valid: bool,
    pub problem: Option<String>,
}

/// Lists every `.mtx` file in `dir` with its checksum status, sorted by name.
pub fn inspect(dir: &Path) -> Result<Vec<CacheEntry>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mtx"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let file_size = fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len();
            let header = read_header(&path).ok();
            let (valid, problem) = match verify(&path) {
                Ok(h) => {
                    let expected = HEADER_LEN as u64;
                    if file_size < expected + h.entries_bytes() {
                        (false, Some("truncated file".to_string()))
                    } else {
                        (true, None)
                    }
                }
                Err(e) => (false, Some(e.to_string())),
            };
            Ok(CacheEntry {
                path,
                file_size,
                header,
                valid,
                problem,
            })
        })
        .collect()
}
