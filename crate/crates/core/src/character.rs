//! The real primitive Dirichlet character modulo 12.

/// χ(n) for the character mod 12 with χ(±1) = 1, χ(±5) = −1 and zero on
/// residues sharing a factor with 12.
pub fn chi12(n: i64) -> i8 {
    match n.rem_euclid(12) {
        1 | 11 => 1,
        5 | 7 => -1,
        _ => 0,
    }
}
