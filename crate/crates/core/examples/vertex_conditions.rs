//! Vertex scattering matrices for the built-in conditions and for a
//! self-adjoint (A, B) pair, whose matrix depends on k.

use qgs::linalg::{c, from_real_rows, identity, unitarity_defect};
use qgs::vertex::{ab_to_sigma, dft_sigma, dirichlet_sigma, neumann_sigma};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = c(2.0, 0.0);
    for (name, sigma) in [("neumann", neumann_sigma(3)?), ("dirichlet", dirichlet_sigma(3)?), ("dft", dft_sigma(3)?)] {
        let m = sigma.at(k)?;
        println!("{name}: first row {:.4} {:.4} {:.4}", m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    }

    // Delta coupling of strength 1.5 at a degree-2 vertex.
    let a = from_real_rows(&[&[1.0, -1.0], &[1.5, 0.0]]);
    let b = from_real_rows(&[&[0.0, 0.0], &[-1.0, -1.0]]);
    for k in [0.5, 2.0, 10.0] {
        let sigma = ab_to_sigma(&a, &b, k, true)?;
        println!("delta vertex, k = {k}: transmission {:.4}, defect {:.1e}", sigma[(0, 1)], unitarity_defect(&sigma));
    }

    // A non-self-adjoint pair is rejected.
    let bad = ab_to_sigma(&identity(2), &(identity(2) * c(0.0, 1.0)), 1.0, true);
    println!("non-self-adjoint pair: {}", bad.map(|_| "accepted".to_string()).unwrap_or_else(|e| e.to_string()));
    Ok(())
}
