//! Bytes to field symbols and back. Each symbol carries `payload_bits`
//! bits of the file, most significant bit first, so every packed value is
//! below the field order.

use bitvec::prelude::*;
use metrrc::gf::Elem;

/// Stripes needed for `len` bytes when each holds `b` symbols of `bits` bits.
pub fn stripe_count(len: u64, b: usize, bits: u32) -> u64 {
    let per_stripe = b as u64 * bits as u64;
    (len * 8).div_ceil(per_stripe)
}

/// Packs `bytes` into `bits`-bit symbols, zero-padding up to a multiple of
/// `stripe` symbols.
pub fn pack(bytes: &[u8], bits: u32, stripe: usize) -> Vec<Elem> {
    let bits = bits as usize;
    let src = bytes.view_bits::<Msb0>();
    let symbols = src.len().div_ceil(bits).div_ceil(stripe) * stripe;
    let mut out = Vec::with_capacity(symbols);
    for i in 0..symbols {
        let lo = (i * bits).min(src.len());
        let hi = ((i + 1) * bits).min(src.len());
        let chunk = &src[lo..hi];
        let value = if chunk.is_empty() { 0 } else { chunk.load_be::<u32>() << (bits - chunk.len()) };
        out.push(Elem(value));
    }
    out
}

/// Inverse of [`pack`]: the first `len` bytes carried by `symbols`.
pub fn unpack(symbols: &[Elem], bits: u32, len: usize) -> Vec<u8> {
    let bits = bits as usize;
    let mut out: BitVec<u8, Msb0> = BitVec::with_capacity(symbols.len() * bits);
    for s in symbols {
        out.extend_from_bitslice(&s.0.view_bits::<Msb0>()[32 - bits..]);
    }
    let mut bytes = out.into_vec();
    bytes.resize(len, 0);
    bytes
}
