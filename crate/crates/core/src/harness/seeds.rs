use crate::pointset::jitter::mix;

/// Sub-seed for the named component of a run. Each label yields an
/// independent stream, so adding a component leaves the others unchanged.
pub fn sub_seed(root: u64, label: &str) -> u64 {
    let mut h = mix(root ^ 0x6a09_e667_f3bc_c908);
    for chunk in label.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = mix(h ^ u64::from_le_bytes(word));
    }
    mix(h ^ label.len() as u64)
}
