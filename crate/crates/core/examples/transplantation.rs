//! Two quotients of the six-lead star that are related by a fixed
//! transplantation matrix: a conjugator is recovered from sampled S(k),
//! checked against the known one, and the pair is classified.

use std::path::Path;

use qgs::graph::{attach_leads_with, build_graph, GraphDescription, OpenGraph, VertexCondition};
use qgs::io::{parse_graph_file, symmetry_file::parse_symmetry_file};
use qgs::isoscattering::{
    default_holdout_samples, default_training_samples, find_conjugator, transplantability_verdict, IsoError,
    VerdictOptions,
};
use qgs::linalg::{c, frobenius, from_real_rows, CMatrix, CVector, ONE};
use qgs::resonances::Rect;
use qgs::symmetry::{quotient_scattering, quotient_scattering_sum, MatrixRep, QuotientBlock};

fn single_vertex(sigma: CMatrix) -> Result<OpenGraph, Box<dyn std::error::Error>> {
    let g = build_graph(&GraphDescription::default().vertex("v", VertexCondition::neumann()))?;
    let leads = vec!["v"; sigma.nrows()];
    Ok(attach_leads_with(&g, &leads, &[("v", VertexCondition::FixedUnitary { sigma })])?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let og = parse_graph_file(&dir.join("s3_star.json"))?;
    let sym = parse_symmetry_file(&dir.join("s3_sym.json"))?;
    let act = sym.action(&og)?;
    let h = act.restrict(&[0, act.group.index_of("(1,2)")?])?;
    let blocks = [
        QuotientBlock::first_basis(MatrixRep::trivial(&act.group)),
        QuotientBlock::first_basis(sym.representation("R_2d")?.rep),
    ];

    let first = |k: f64| -> Result<CMatrix, IsoError> {
        Ok(quotient_scattering(&og, &h, &MatrixRep::trivial(&h.group), &CVector::from_element(1, ONE), c(k, 0.0))?)
    };
    let second = |k: f64| -> Result<CMatrix, IsoError> { Ok(quotient_scattering_sum(&og, &act, &blocks, c(k, 0.0))?) };

    let found = find_conjugator(first, second, &default_training_samples(), &default_holdout_samples())?;
    println!("conjugator: {:?}, solution space dimension {}, holdout residual {:.1e}", found.status, found.solution_dim, found.residual);

    let pi = from_real_rows(&[&[1.0, 1.0, 1.0], &[1.0, -1.0, 0.0], &[1.0, 0.0, -1.0]]);
    let residual = frobenius(&(&pi * first(2.0)? - second(2.0)? * &pi));
    println!("known transplantation matrix: residual {residual:.1e}, distance to the recovered space {:.1e}", found.distance_to_solution_space(&pi));

    let report = transplantability_verdict(
        &single_vertex(first(1.0)?)?,
        &single_vertex(second(1.0)?)?,
        &VerdictOptions::new(Rect::new(0.0, 8.0, -3.0, 0.0)),
    )?;
    println!("verdict: {:?} ({})", report.verdict, report.label);
    Ok(())
}
