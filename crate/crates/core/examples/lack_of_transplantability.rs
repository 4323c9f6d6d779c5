//! Two six-vertex graphs with ten unit edges. With a lead at every vertex
//! no conjugator exists and the resonances differ; with leads only at the
//! four degree-four vertices the pair becomes conjugate.

use std::path::Path;

use qgs::graph::{GraphDescription, LeadSpec, OpenGraph};
use qgs::io::parse_graph_file;
use qgs::isoscattering::{transplantability_verdict, VerdictOptions};
use qgs::resonances::Rect;

fn leads_at_degree_four(og: &OpenGraph) -> Result<OpenGraph, Box<dyn std::error::Error>> {
    let degrees = og.graph().edge_degrees();
    let mut desc: GraphDescription = og.graph().description();
    desc.leads = og
        .graph()
        .vertices()
        .iter()
        .zip(&degrees)
        .filter(|(_, &d)| d == 4)
        .map(|(v, _)| LeadSpec { id: format!("l_{}", v.id), at: v.id.clone() })
        .collect();
    Ok(OpenGraph::from_description(&desc)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let og1 = parse_graph_file(&dir.join("mcdonald_meyers_1.json"))?;
    let og2 = parse_graph_file(&dir.join("mcdonald_meyers_2.json"))?;

    let report = transplantability_verdict(&og1, &og2, &VerdictOptions::new(Rect::new(0.0, 8.0, -3.0, 0.0)))?;
    println!("leads at all vertices: {:?} ({})", report.verdict, report.label);
    println!("  conjugator {:?}, max phase deviation {:.3}", report.conjugacy.status, report.phases.max_deviation);
    if let Some((p1, p2, pairing)) = &report.poles {
        println!("  resonances: {} vs {}, isopolar {}", p1.total_multiplicity(), p2.total_multiplicity(), pairing.isopolar);
    }

    let (d1, d2) = (leads_at_degree_four(&og1)?, leads_at_degree_four(&og2)?);
    let report = transplantability_verdict(&d1, &d2, &VerdictOptions::new(Rect::new(0.0, 4.0, -1.5, 0.0)))?;
    println!("leads at degree-four vertices: {:?}", report.verdict);
    println!("  conjugator {:?}, solution space dimension {}", report.conjugacy.status, report.conjugacy.solution_dim);
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    Ok(())
}
