//! Word algebra on periodic symplectic linear systems: power detection,
//! letterwise closeness, domination tests, and complex-rank probes.

use nalgebra::DMatrix;
use symplectic_lab::cocycle::{
    domination_test, domination_test_with_splitting, has_complex_rank, is_diagonalizable_real_simple,
    random_symplectic_word, words_close, Word,
};
use symplectic_lab::sympl::SymplecticMatrix;

fn main() -> symplectic_lab::Result<()> {
    // Powers and closeness.
    let word = random_symplectic_word(1, 3, 0.2, 7);
    println!("random 3-letter word: is_power = {}", word.is_power(1e-9));
    let squared = word.pow(2)?;
    println!("its square ({} letters): is_power = {}", squared.len(), squared.is_power(1e-9));
    println!("word ε-close to itself: {}", words_close(&word, &word, 1e-12));

    // Domination of the eigen-splitting for a strong saddle.
    let saddle = Word::singleton(SymplecticMatrix::new(
        DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]),
        1e-12,
    )?);
    println!(
        "\ndiag(4, 1/4), split index 1, m = 1: dominated = {}",
        domination_test(&saddle, 1, 1, 1e-8)?
    );

    // Alternating expansion/contraction: the 2-step return is the identity,
    // so the coordinate splitting fails domination.
    let a = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]), 1e-12)?;
    let b = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 4.0]), 1e-12)?;
    let alternating = Word::new(vec![a, b])?;
    let coords = DMatrix::<f64>::identity(2, 2);
    println!(
        "alternating diag(4,1/4), diag(1/4,4), m = 2: dominated = {}",
        domination_test_with_splitting(&alternating, &coords, 1, 2, 1e-8)?
    );

    // Complex ranks: a rotation has its pair at rank (1, 2); a Krein
    // quadruple splits ranks (1, 2) and (3, 4).
    let th = 1.0f64;
    let rot = Word::singleton(SymplecticMatrix::new(
        DMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]),
        1e-12,
    )?);
    println!(
        "\nrotation block: diagonalizable = {}, complex rank (1,2) = {}",
        is_diagonalizable_real_simple(&rot, 1e-8)?.is_some(),
        has_complex_rank(&rot, 1, 1e-6)?
    );

    let (c, s) = (th.cos(), th.sin());
    let mut krein = DMatrix::<f64>::zeros(4, 4);
    for (r, q, v) in [
        (0, 0, 0.5 * c), (0, 1, 0.5 * s), (1, 0, -0.5 * s), (1, 1, 0.5 * c),
        (2, 2, 2.0 * c), (2, 3, 2.0 * s), (3, 2, -2.0 * s), (3, 3, 2.0 * c),
    ] {
        krein[(r, q)] = v;
    }
    let krein = Word::singleton(SymplecticMatrix::new(krein, 1e-12)?);
    for i in 1..=3 {
        println!(
            "Krein quadruple 0.5e^{{±iθ}}, 2e^{{±iθ}}: complex rank ({i}, {}) = {}",
            i + 1,
            has_complex_rank(&krein, i, 1e-6)?
        );
    }
    Ok(())
}
