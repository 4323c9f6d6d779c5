//! Scattering matrix of a single Neumann vertex with six leads.
//!
//! Run with `cargo run --example star_scattering`.

use std::path::Path;

use qgs::io::parse_graph_file;
use qgs::linalg::{c, unitarity_defect};
use qgs::scattering::scattering_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let og = parse_graph_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/s3_star.json"))?;
    for k in [0.5, 1.0, 7.3] {
        let s = scattering_matrix(&og, c(k, 0.0))?.s;
        println!("k = {k}: S[0][0] = {:.6}, S[0][1] = {:.6}, unitarity defect {:.1e}", s[(0, 0)], s[(0, 1)], unitarity_defect(&s));
    }
    println!("expected: 1/3 - 1 on the diagonal, 1/3 elsewhere, independent of k");
    Ok(())
}
