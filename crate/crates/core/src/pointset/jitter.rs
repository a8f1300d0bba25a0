//! Deterministic per-cell displacements for the jittered grid.
//!
//! For a cell `z ∈ Z^d` and seed `s` the cell key is
//! `h = mix(s ⊕ 0x9E3779B97F4A7C15)` followed by `h = mix(h ⊕ z_i)` for each
//! coordinate (with `z_i` reinterpreted as two's-complement `u64`). Coordinate
//! `i` of the displacement uses `u_i = (mix(h + (i+1)·0x9E3779B97F4A7C15) >> 11) / 2^53`
//! and equals `jitter·spacing·(2u_i − 1)`. `mix` is the SplitMix64 finalizer.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn cell_key(seed: u64, cell: &[i64]) -> u64 {
    let mut h = mix(seed ^ GOLDEN);
    for z in cell {
        h = mix(h ^ (*z as u64));
    }
    h
}

/// Uniform values in `[0, 1)` for each coordinate of a cell.
pub fn cell_uniforms(seed: u64, cell: &[i64]) -> impl Iterator<Item = f64> {
    let h = cell_key(seed, cell);
    (0..cell.len()).map(move |i| {
        let bits = mix(h.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN))) >> 11;
        bits as f64 / (1u64 << 53) as f64
    })
}
