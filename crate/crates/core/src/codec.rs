//! Compression codecs used by the edge cache and the broadcast layer.
//!
//! Call sites pick a codec by role, not by library: `Lz` is the fast
//! low-ratio role, `DeflateLow`/`DeflateHigh` trade decompression speed for
//! ratio. The concrete backends (lz4, deflate) are interchangeable behind
//! this enum as long as `decompress(compress(x)) == x`.

use std::io::Read;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Codec {
    None,
    /// Fast LZ-family codec, low ratio.
    Lz,
    /// Deflate at a low compression level.
    DeflateLow,
    /// Deflate at a medium compression level.
    DeflateHigh,
}

const DEFLATE_LOW_LEVEL: u32 = 1;
const DEFLATE_HIGH_LEVEL: u32 = 3;

impl Codec {
    pub fn compress(self, data: &[u8]) -> Vec<u8> {
        match self {
            Codec::None => data.to_vec(),
            Codec::Lz => lz4_flex::compress_prepend_size(data),
            Codec::DeflateLow => deflate(data, DEFLATE_LOW_LEVEL),
            Codec::DeflateHigh => deflate(data, DEFLATE_HIGH_LEVEL),
        }
    }

    pub fn decompress(self, data: &[u8]) -> Result<Vec<u8>> {
        match self {
            Codec::None => Ok(data.to_vec()),
            Codec::Lz => lz4_flex::decompress_size_prepended(data)
                .map_err(|e| Error::Format(format!("lz decompression failed: {e}"))),
            Codec::DeflateLow | Codec::DeflateHigh => {
                let mut out = Vec::new();
                flate2::bufread::DeflateDecoder::new(data)
                    .read_to_end(&mut out)
                    .map_err(|e| Error::Format(format!("deflate decompression failed: {e}")))?;
                Ok(out)
            }
        }
    }
}

fn deflate(data: &[u8], level: u32) -> Vec<u8> {
    let mut out = Vec::new();
    flate2::bufread::DeflateEncoder::new(data, flate2::Compression::new(level))
        .read_to_end(&mut out)
        .expect("in-memory deflate cannot fail");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_all_codecs(data in proptest::collection::vec(any::<u8>(), 0..4096)) {
            for codec in [Codec::None, Codec::Lz, Codec::DeflateLow, Codec::DeflateHigh] {
                let packed = codec.compress(&data);
                prop_assert_eq!(&codec.decompress(&packed).unwrap(), &data);
            }
        }
    }

    #[test]
    fn compressible_data_shrinks() {
        let data = vec![7u8; 1 << 16];
        for codec in [Codec::Lz, Codec::DeflateLow, Codec::DeflateHigh] {
            assert!(codec.compress(&data).len() < data.len() / 4);
        }
    }

    #[test]
    fn corrupt_stream_is_an_error() {
        let packed = Codec::Lz.compress(b"hello world, hello world");
        let mut bad = packed.clone();
        bad.truncate(packed.len() / 2);
        assert!(Codec::Lz.decompress(&bad).is_err());
    }
}
