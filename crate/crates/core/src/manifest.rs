//! Dataset-wide metadata: the splitter table, per-tile descriptors, and the
//! self-describing binary manifest persisted next to the tiles.
//!
//! A dataset directory contains:
//!
//! ```text
//! manifest            this file
//! indeg.bin           |V| x u32 little-endian in-degrees
//! outdeg.bin          |V| x u32 little-endian out-degrees
//! remap.bin           |V| x u64 raw ids by dense id (absent when identity)
//! tiles/tile_<t>.bin  CSR tiles, see tile module
//! ```

use std::path::{Path, PathBuf};

use crate::bloom::BloomFilter;
use crate::error::{Error, Result};
use crate::wire;

pub const MANIFEST_MAGIC: [u8; 4] = *b"GHD1";
pub const MANIFEST_FILE: &str = "manifest";
pub const INDEG_FILE: &str = "indeg.bin";
pub const OUTDEG_FILE: &str = "outdeg.bin";
pub const REMAP_FILE: &str = "remap.bin";
pub const TILES_DIR: &str = "tiles";

const FORMAT_VERSION: u32 = 1;
const FLAG_WEIGHTED: u32 = 1;
const FLAG_IDENTITY_REMAP: u32 = 2;

pub fn tile_file_name(tile_id: u32) -> String {
    format!("tile_{tile_id}.bin")
}

/// Tile ownership boundaries: tile `t` owns target vertices in
/// `[boundaries[t], boundaries[t+1])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitterTable {
    boundaries: Vec<u32>,
}

impl SplitterTable {
    pub fn new(boundaries: Vec<u32>) -> Result<Self> {
        if boundaries.first() != Some(&0) {
            return Err(Error::Format("splitter table must start at vertex 0".into()));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("splitter boundaries must be strictly increasing".into()));
        }
        Ok(SplitterTable { boundaries })
    }

    pub fn boundaries(&self) -> &[u32] {
        &self.boundaries
    }

    pub fn num_tiles(&self) -> u32 {
        (self.boundaries.len() - 1) as u32
    }

    pub fn vertex_count(&self) -> u32 {
        *self.boundaries.last().unwrap()
    }

    /// Target range `[first, end)` owned by tile `t`.
    pub fn tile_range(&self, tile_id: u32) -> (u32, u32) {
        (
            self.boundaries[tile_id as usize],
            self.boundaries[tile_id as usize + 1],
        )
    }

    /// The unique tile owning target vertex `v`.
    pub fn tile_of_vertex(&self, v: u32) -> Result<u32> {
        if v >= self.vertex_count() {
            return Err(Error::Domain(format!(
                "vertex {v} out of range (vertex count {})",
                self.vertex_count()
            )));
        }
        let idx = self.boundaries.partition_point(|&b| b <= v);
        Ok((idx - 1) as u32)
    }
}

/// Everything the engine needs to know about a tile without reading it.
#[derive(Clone, Debug, PartialEq)]
pub struct TileDescriptor {
    pub tile_id: u32,
    pub first_target: u32,
    pub num_targets: u32,
    pub num_edges: u64,
    /// Length of the encoded tile file in bytes.
    pub byte_length: u64,
    /// Contains every distinct source vertex id in the tile.
    pub bloom: BloomFilter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub vertex_count: u64,
    pub edge_count: u64,
    pub weighted: bool,
    /// Target edge count per tile used by the splitter.
    pub avg_tile_size: u64,
    /// Smallest edge weight in the dataset; 1.0 for unweighted graphs.
    pub min_weight: f64,
    /// True when raw input ids were already dense, so no remap file exists.
    pub identity_remap: bool,
    pub splitters: SplitterTable,
    pub tiles: Vec<TileDescriptor>,
}

impl DatasetManifest {
    pub fn tile_count(&self) -> u32 {
        self.tiles.len() as u32
    }

    pub fn avg_degree(&self) -> f64 {
        if self.vertex_count == 0 {
            0.0
        } else {
            self.edge_count as f64 / self.vertex_count as f64
        }
    }

    /// Total encoded tile bytes across the dataset.
    pub fn total_tile_bytes(&self) -> u64 {
        self.tiles.iter().map(|t| t.byte_length).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.splitters.vertex_count() as u64 != self.vertex_count {
            return Err(Error::Consistency(
                "splitter table does not cover the vertex count".into(),
            ));
        }
        if self.splitters.num_tiles() as usize != self.tiles.len() {
            return Err(Error::Consistency("tile count differs from splitter table".into()));
        }
        let mut edge_sum = 0u64;
        for (i, desc) in self.tiles.iter().enumerate() {
            let (first, end) = self.splitters.tile_range(i as u32);
            if desc.tile_id != i as u32 {
                return Err(Error::Consistency("tile descriptors out of order".into()));
            }
            if desc.first_target != first || desc.num_targets != end - first {
                return Err(Error::Consistency(format!(
                    "tile {i} target range disagrees with splitter table"
                )));
            }
            edge_sum += desc.num_edges;
        }
        if edge_sum != self.edge_count {
            return Err(Error::Consistency(format!(
                "tile edge counts sum to {edge_sum}, manifest says {}",
                self.edge_count
            )));
        }
        Ok(())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&MANIFEST_MAGIC);
        wire::put_u32(&mut buf, self.format_version);
        let mut flags = 0u32;
        if self.weighted {
            flags |= FLAG_WEIGHTED;
        }
        if self.identity_remap {
            flags |= FLAG_IDENTITY_REMAP;
        }
        wire::put_u32(&mut buf, flags);
        wire::put_u64(&mut buf, self.vertex_count);
        wire::put_u64(&mut buf, self.edge_count);
        wire::put_u64(&mut buf, self.avg_tile_size);
        wire::put_f64(&mut buf, self.min_weight);
        wire::put_u32(&mut buf, self.tile_count());
        for &b in self.splitters.boundaries() {
            wire::put_u32(&mut buf, b);
        }
        for desc in &self.tiles {
            wire::put_u32(&mut buf, desc.tile_id);
            wire::put_u32(&mut buf, desc.first_target);
            wire::put_u32(&mut buf, desc.num_targets);
            wire::put_u64(&mut buf, desc.num_edges);
            wire::put_u64(&mut buf, desc.byte_length);
            wire::put_u32(&mut buf, desc.bloom.num_hashes());
            wire::put_u64(&mut buf, desc.bloom.bits().len() as u64);
            buf.extend_from_slice(desc.bloom.bits());
        }
        wire::put_crc(&mut buf);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Format("manifest shorter than its magic".into()));
        }
        wire::check_magic(&bytes[..4], &MANIFEST_MAGIC)?;
        let body = wire::check_crc(bytes)?;
        let mut r = wire::Reader::new(&body[4..]);
        let format_version = r.u32()?;
        if format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: char::from_digit(format_version.min(9), 10).unwrap_or('?'),
                expected: '1',
            });
        }
        let flags = r.u32()?;
        if flags & !(FLAG_WEIGHTED | FLAG_IDENTITY_REMAP) != 0 {
            return Err(Error::Format(format!("unknown manifest flags {flags:#x}")));
        }
        let vertex_count = r.u64()?;
        let edge_count = r.u64()?;
        let avg_tile_size = r.u64()?;
        let min_weight = r.f64()?;
        let tile_count = r.u32()?;

        let mut boundaries = Vec::with_capacity(tile_count as usize + 1);
        for _ in 0..=tile_count {
            boundaries.push(r.u32()?);
        }
        // An empty dataset has zero tiles and the single boundary 0.
        let splitters = if tile_count == 0 {
            SplitterTable { boundaries: vec![0] }
        } else {
            SplitterTable::new(boundaries)?
        };

        let mut tiles = Vec::with_capacity(tile_count as usize);
        for _ in 0..tile_count {
            let tile_id = r.u32()?;
            let first_target = r.u32()?;
            let num_targets = r.u32()?;
            let num_edges = r.u64()?;
            let byte_length = r.u64()?;
            let bloom_hashes = r.u32()?;
            let bloom_len = r.u64()? as usize;
            let bloom_bits = r.take(bloom_len)?.to_vec();
            tiles.push(TileDescriptor {
                tile_id,
                first_target,
                num_targets,
                num_edges,
                byte_length,
                bloom: BloomFilter::from_parts(bloom_bits, bloom_hashes),
            });
        }
        if r.remaining() != 0 {
            return Err(Error::Format(format!(
                "{} trailing bytes after manifest payload",
                r.remaining()
            )));
        }

        let manifest = DatasetManifest {
            format_version,
            vertex_count,
            edge_count,
            weighted: flags & FLAG_WEIGHTED != 0,
            avg_tile_size,
            min_weight,
            identity_remap: flags & FLAG_IDENTITY_REMAP != 0,
            splitters,
            tiles,
        };
        manifest.validate()?;
        Ok(manifest)
    }
}

// An empty dataset writes a lone 0 boundary, which `SplitterTable::new`
// rejects (strictly increasing needs length >= 1 beyond the origin); decode
// special-cases it above, and ingest builds it directly.
impl SplitterTable {
    pub(crate) fn empty() -> Self {
        SplitterTable { boundaries: vec![0] }
    }
}

/// An opened dataset directory.
#[derive(Debug)]
pub struct Dataset {
    dir: PathBuf,
    manifest: DatasetManifest,
}

impl Dataset {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let path = dir.join(MANIFEST_FILE);
        let bytes = std::fs::read(&path).map_err(Error::file(&path))?;
        let manifest = DatasetManifest::decode(&bytes)?;
        Ok(Dataset { dir, manifest })
    }

    pub fn from_parts(dir: impl Into<PathBuf>, manifest: DatasetManifest) -> Self {
        Dataset { dir: dir.into(), manifest }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn tile_path(&self, tile_id: u32) -> PathBuf {
        self.dir.join(TILES_DIR).join(tile_file_name(tile_id))
    }

    fn load_u32_array(&self, file: &str) -> Result<Vec<u32>> {
        let path = self.dir.join(file);
        let bytes = std::fs::read(&path).map_err(Error::file(&path))?;
        if bytes.len() != self.manifest.vertex_count as usize * 4 {
            return Err(Error::Consistency(format!(
                "{file} holds {} bytes, expected {}",
                bytes.len(),
                self.manifest.vertex_count * 4
            )));
        }
        Ok(bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn load_in_degrees(&self) -> Result<Vec<u32>> {
        self.load_u32_array(INDEG_FILE)
    }

    pub fn load_out_degrees(&self) -> Result<Vec<u32>> {
        self.load_u32_array(OUTDEG_FILE)
    }

    /// Raw input id for each dense vertex id.
    pub fn load_remap(&self) -> Result<Vec<u64>> {
        if self.manifest.identity_remap {
            return Ok((0..self.manifest.vertex_count).collect());
        }
        let path = self.dir.join(REMAP_FILE);
        let bytes = std::fs::read(&path).map_err(Error::file(&path))?;
        if bytes.len() != self.manifest.vertex_count as usize * 8 {
            return Err(Error::Consistency(format!(
                "{REMAP_FILE} holds {} bytes, expected {}",
                bytes.len(),
                self.manifest.vertex_count * 8
            )));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
