//! Induced characters: the trivial character of an order-two subgroup of S3
//! induces trivial + two-dimensional, and two inequivalent-looking
//! permutation representations of the square group share a character.

use std::path::Path;

use qgs::io::symmetry_file::parse_symmetry_file;
use qgs::linalg::ONE;
use qgs::symmetry::{characters_equal, induced_character, FiniteGroup, MatrixRep};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");

    let g = FiniteGroup::symmetric3();
    let induced = induced_character(&g, &[0, g.index_of("(1,2)")?], &[ONE, ONE])?;
    let sym = parse_symmetry_file(&dir.join("s3_sym.json"))?;
    let sum = MatrixRep::trivial(&g).character().add(&sym.representation("R_2d")?.rep.character())?;
    let show = |v: Vec<num_complex::Complex64>| v.iter().map(|z| z.re).collect::<Vec<_>>();
    println!("S3 classes: induced {:?}, trivial + 2d {:?}", show(induced.on_classes()), show(sum.on_classes()));
    println!("equal: {}", characters_equal(&induced, &sum, 1e-12)?);

    let d4 = parse_symmetry_file(&dir.join("d4_sym.json"))?;
    let group = d4.group()?;
    let chi1 = d4.representation("R1")?.character_on(&group)?;
    let chi2 = d4.representation("R2")?.character_on(&group)?;
    println!("square group classes: R1 {:?}, R2 {:?}", show(chi1.on_classes()), show(chi2.on_classes()));
    println!("equal: {}", characters_equal(&chi1, &chi2, 1e-12)?);
    Ok(())
}
