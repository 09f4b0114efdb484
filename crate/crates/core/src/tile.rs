//! The CSR tile: a consecutive target-vertex range's complete set of
//! in-edges, and its on-disk binary format.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! magic "GHT1"            4 bytes
//! tile_id                 u32
//! first_target            u32
//! num_targets             u32
//! flags                   u32   (bit 0: weighted)
//! num_edges               u64
//! row block               (num_targets + 1) x u32, offsets from tile start
//! col block               num_edges x u32, source vertex ids
//! val block               num_edges x f64, present iff weighted
//! crc32                   u32, over all preceding bytes
//! ```

use crate::error::{Error, Result};
use crate::wire;

pub const TILE_MAGIC: [u8; 4] = *b"GHT1";

const FLAG_WEIGHTED: u32 = 1;

/// In-edges of a consecutive target range, in CSR form.
///
/// Target `first_target + i` owns the edge slice `row[i]..row[i+1]` of `col`
/// (and of `val` when weighted). Sources are sorted ascending within each
/// target.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub tile_id: u32,
    pub first_target: u32,
    /// Edge offsets per target; `row[0] == 0`, monotone, last entry is the
    /// edge count.
    pub row: Vec<u32>,
    /// Source vertex id of each edge.
    pub col: Vec<u32>,
    /// Edge weights; present iff the dataset is weighted.
    pub val: Option<Vec<f64>>,
}

impl Tile {
    pub fn num_targets(&self) -> u32 {
        (self.row.len() - 1) as u32
    }

    pub fn num_edges(&self) -> u64 {
        self.col.len() as u64
    }

    /// Sources (and weights, if any) of the `i`th target in the tile.
    pub fn edges_of(&self, i: usize) -> (&[u32], Option<&[f64]>) {
        let start = self.row[i] as usize;
        let end = self.row[i + 1] as usize;
        (
            &self.col[start..end],
            self.val.as_ref().map(|v| &v[start..end]),
        )
    }

    /// Structural invariants shared by the encoder and decoder.
    fn validate(&self) -> Result<()> {
        if self.row.is_empty() {
            return Err(Error::Format("tile row array must have an entry per target plus one".into()));
        }
        if self.row[0] != 0 {
            return Err(Error::Format("tile row array must start at 0".into()));
        }
        if self.row.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("tile row offsets must be nondecreasing".into()));
        }
        if *self.row.last().unwrap() as usize != self.col.len() {
            return Err(Error::Format(
                "tile row array must end at the edge count".into(),
            ));
        }
        if let Some(val) = &self.val {
            if val.len() != self.col.len() {
                return Err(Error::Format("weight array length differs from edge count".into()));
            }
        }
        Ok(())
    }
}

/// Encodes a tile into its deterministic byte layout.
pub fn encode_tile(tile: &Tile) -> Result<Vec<u8>> {
    tile.validate()?;
    let num_targets = u32::try_from(tile.row.len() - 1)
        .map_err(|_| Error::Capacity("tile target count exceeds format limit".into()))?;
    if tile.col.len() >= u32::MAX as usize {
        // Row offsets are stored as u32.
        return Err(Error::Capacity("tile edge count exceeds format limit".into()));
    }
    let num_edges = tile.col.len() as u64;

    let mut flags = 0u32;
    if tile.val.is_some() {
        flags |= FLAG_WEIGHTED;
    }

    let weight_bytes = if tile.val.is_some() { 8 * tile.col.len() } else { 0 };
    let mut buf =
        Vec::with_capacity(28 + 4 * tile.row.len() + 4 * tile.col.len() + weight_bytes + 4);
    buf.extend_from_slice(&TILE_MAGIC);
    wire::put_u32(&mut buf, tile.tile_id);
    wire::put_u32(&mut buf, tile.first_target);
    wire::put_u32(&mut buf, num_targets);
    wire::put_u32(&mut buf, flags);
    wire::put_u64(&mut buf, num_edges);
    for &r in &tile.row {
        wire::put_u32(&mut buf, r);
    }
    for &c in &tile.col {
        wire::put_u32(&mut buf, c);
    }
    if let Some(val) = &tile.val {
        for &w in val {
            wire::put_f64(&mut buf, w);
        }
    }
    wire::put_crc(&mut buf);
    Ok(buf)
}

/// Exact inverse of [`encode_tile`]; validates magic, version and checksum.
pub fn decode_tile(bytes: &[u8]) -> Result<Tile> {
    if bytes.len() < 4 {
        return Err(Error::Format("tile shorter than its magic".into()));
    }
    wire::check_magic(&bytes[..4], &TILE_MAGIC)?;
    let body = wire::check_crc(bytes)?;

    let mut r = wire::Reader::new(&body[4..]);
    let tile_id = r.u32()?;
    let first_target = r.u32()?;
    let num_targets = r.u32()?;
    let flags = r.u32()?;
    if flags & !FLAG_WEIGHTED != 0 {
        return Err(Error::Format(format!("unknown tile flags {flags:#x}")));
    }
    let weighted = flags & FLAG_WEIGHTED != 0;
    let num_edges = r.u64()?;
    let num_edges_usize = usize::try_from(num_edges)
        .map_err(|_| Error::Capacity("tile edge count exceeds addressable memory".into()))?;

    let mut row = Vec::with_capacity(num_targets as usize + 1);
    for _ in 0..=num_targets {
        row.push(r.u32()?);
    }
    let mut col = Vec::with_capacity(num_edges_usize);
    for _ in 0..num_edges {
        col.push(r.u32()?);
    }
    let val = if weighted {
        let mut v = Vec::with_capacity(num_edges_usize);
        for _ in 0..num_edges {
            v.push(r.f64()?);
        }
        Some(v)
    } else {
        None
    };
    if r.remaining() != 0 {
        return Err(Error::Format(format!(
            "{} trailing bytes after tile payload",
            r.remaining()
        )));
    }

    let tile = Tile {
        tile_id,
        first_target,
        row,
        col,
        val,
    };
    tile.validate()?;
    Ok(tile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_tile_is_header_only() {
        let tile = Tile {
            tile_id: 3,
            first_target: 10,
            row: vec![0],
            col: vec![],
            val: None,
        };
        let bytes = encode_tile(&tile).unwrap();
        // header (28) + one row entry (4) + crc (4)
        assert_eq!(bytes.len(), 36);
        assert_eq!(decode_tile(&bytes).unwrap(), tile);
    }

    #[test]
    fn minimal_unweighted_tile_layout_is_bit_exact() {
        // One target (vertex 5), one edge from source 9, unweighted.
        let tile = Tile {
            tile_id: 1,
            first_target: 5,
            row: vec![0, 1],
            col: vec![9],
            val: None,
        };
        let bytes = encode_tile(&tile).unwrap();
        let mut expected = Vec::new();
        expected.extend_from_slice(b"GHT1");
        expected.extend_from_slice(&1u32.to_le_bytes()); // tile_id
        expected.extend_from_slice(&5u32.to_le_bytes()); // first_target
        expected.extend_from_slice(&1u32.to_le_bytes()); // num_targets
        expected.extend_from_slice(&0u32.to_le_bytes()); // flags: unweighted
        expected.extend_from_slice(&1u64.to_le_bytes()); // num_edges
        expected.extend_from_slice(&0u32.to_le_bytes()); // row[0]
        expected.extend_from_slice(&1u32.to_le_bytes()); // row[1]
        expected.extend_from_slice(&9u32.to_le_bytes()); // col[0]
        let crc = crc32fast::hash(&expected);
        expected.extend_from_slice(&crc.to_le_bytes());
        assert_eq!(bytes, expected);
    }

    #[test]
    fn weighted_tile_round_trips_and_flags_weight_block() {
        let tile = Tile {
            tile_id: 0,
            first_target: 0,
            row: vec![0, 2, 2, 3],
            col: vec![1, 4, 0],
            val: Some(vec![1.5, -0.25, 42.0]),
        };
        let bytes = encode_tile(&tile).unwrap();
        assert_eq!(decode_tile(&bytes).unwrap(), tile);
        // val block adds 8 bytes per edge over the unweighted layout.
        let unweighted = Tile { val: None, ..tile.clone() };
        assert_eq!(bytes.len(), encode_tile(&unweighted).unwrap().len() + 24);
    }

    #[test]
    fn flipped_payload_bit_fails_checksum() {
        let tile = Tile {
            tile_id: 0,
            first_target: 0,
            row: vec![0, 1],
            col: vec![2],
            val: None,
        };
        let mut bytes = encode_tile(&tile).unwrap();
        bytes[30] ^= 0x04;
        assert!(matches!(decode_tile(&bytes), Err(Error::Checksum { .. })));
    }

    #[test]
    fn version_mismatch_is_distinguished_from_garbage() {
        let tile = Tile {
            tile_id: 0,
            first_target: 0,
            row: vec![0],
            col: vec![],
            val: None,
        };
        let mut bytes = encode_tile(&tile).unwrap();
        bytes[3] = b'2';
        assert!(matches!(
            decode_tile(&bytes),
            Err(Error::UnsupportedVersion { found: '2', expected: '1' })
        ));
        bytes[0] = b'X';
        assert!(matches!(decode_tile(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn truncation_is_a_format_error() {
        let tile = Tile {
            tile_id: 0,
            first_target: 0,
            row: vec![0, 1, 3],
            col: vec![0, 1, 2],
            val: None,
        };
        let bytes = encode_tile(&tile).unwrap();
        for cut in [3, 10, bytes.len() - 5] {
            let err = decode_tile(&bytes[..cut]).unwrap_err();
            assert!(
                matches!(err, Error::Format(_) | Error::Checksum { .. }),
                "unexpected error for cut {cut}: {err}"
            );
        }
    }

    fn arb_tile() -> impl Strategy<Value = Tile> {
        (
            any::<u32>(),
            0u32..1000,
            proptest::collection::vec(0usize..6, 0..20),
            any::<bool>(),
        )
            .prop_map(|(tile_id, first_target, degs, weighted)| {
                let mut row = vec![0u32];
                for d in &degs {
                    row.push(row.last().unwrap() + *d as u32);
                }
                let num_edges = *row.last().unwrap() as usize;
                let col: Vec<u32> = (0..num_edges).map(|i| (i * 7 % 1000) as u32).collect();
                let val = weighted.then(|| (0..num_edges).map(|i| i as f64 * 0.5 - 3.0).collect());
                Tile { tile_id, first_target, row, col, val }
            })
    }

    proptest! {
        #[test]
        fn round_trip_identity(tile in arb_tile()) {
            let bytes = encode_tile(&tile).unwrap();
            prop_assert_eq!(decode_tile(&bytes).unwrap(), tile);
        }
    }
}
