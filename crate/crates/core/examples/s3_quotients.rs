//! Quotients of the six-lead star by representations of S3 and of its
//! order-two subgroup.

use std::path::Path;

use qgs::io::{parse_graph_file, symmetry_file::parse_symmetry_file};
use qgs::linalg::{c, CVector, ONE};
use qgs::symmetry::{intertwiner_basis, lead_permutation_matrices, quotient_scattering, quotient_scattering_sum, MatrixRep, QuotientBlock};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let og = parse_graph_file(&dir.join("s3_star.json"))?;
    let sym = parse_symmetry_file(&dir.join("s3_sym.json"))?;
    let act = sym.action(&og)?;
    let k = c(1.0, 0.0);

    let h = act.restrict(&[0, act.group.index_of("(1,2)")?])?;
    let q = quotient_scattering(&og, &h, &MatrixRep::trivial(&h.group), &CVector::from_element(1, ONE), k)?;
    println!("trivial rep of the order-two subgroup:{:.4}", q.map(|z| z.re));

    for name in sym.representation_names() {
        let rho = sym.representation(name)?.rep;
        if rho.group().order() != act.group.order() {
            continue;
        }
        let m = intertwiner_basis(&lead_permutation_matrices(&act), &rho)?.len();
        println!("{name}: dimension {}, multiplicity {m} in the lead space", rho.dim());
    }

    let blocks = [
        QuotientBlock::first_basis(MatrixRep::trivial(&act.group)),
        QuotientBlock::first_basis(sym.representation("R_2d")?.rep),
    ];
    let q = quotient_scattering_sum(&og, &act, &blocks, k)?;
    println!("trivial + two-dimensional rep of S3:{:.4}", q.map(|z| z.re));
    Ok(())
}
