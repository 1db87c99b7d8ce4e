//! Four-dimensional families: the cat ⊕ cat automorphism with its doubled
//! exponent sum, and the coupled standard maps with finite-time exponents
//! along a chaotic orbit. Symplectic pairing forces χ_i = -χ_{2n+1-i}
//! everywhere.

use symplectic_lab::models::{cat_power_matrix, estimate_s, orbit_cocycle, MapModel};
use symplectic_lab::sympl::finite_time_exponents;

fn main() -> symplectic_lab::Result<()> {
    let chi = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();

    let cat2 = MapModel::torus_automorphism(cat_power_matrix(2))?;
    let est = estimate_s(&cat2, 1, 6, 1e-10)?;
    let best = est.best.expect("origin is hyperbolic");
    println!("cat ⊕ cat fixed point:");
    println!("  exponents: {:?}", best.witness.lyapunov.chis());
    println!(
        "  S = {:.9} (expected 2·{:.9} = {:.9})",
        best.value,
        chi,
        2.0 * chi
    );
    println!(
        "  pairing residual {:.2e}, zero-sum residual {:.2e}",
        best.witness.lyapunov.pairing_residual(),
        best.witness.lyapunov.sum().abs()
    );

    let coupled = MapModel::coupled_standard_maps(1.6, 1.1, 0.3);
    let (_, word) = orbit_cocycle(&coupled, &[0.21, 0.67, 0.13, 0.42], 4000)?;
    let exps = finite_time_exponents(word.letters())?;
    println!("\ncoupled standard maps (k1=1.6, k2=1.1, c=0.3), 4000 steps:");
    println!(
        "  finite-time exponents: [{}]",
        exps.iter()
            .map(|v| format!("{v:+.5}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("  sum = {:+.2e} (zero for a symplectic cocycle)", exps.iter().sum::<f64>());
    Ok(())
}
