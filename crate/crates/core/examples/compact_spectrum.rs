//! Eigenvalues of a compact triangle with a pendant edge, and the same values recovered as zeros
//! of det(I - S(k)) once every vertex carries a lead.

use qgs::graph::{attach_leads, build_graph, GraphDescription, VertexCondition};
use qgs::scattering::{eigenvalues_compact, secular_zeros, SpectrumRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = VertexCondition::neumann;
    let g = build_graph(
        &GraphDescription::default()
            .vertex("a", n())
            .vertex("b", n())
            .vertex("c", n())
            .vertex("d", n())
            .edge("ab", "a", "b", 1.0)
            .edge("bc", "b", "c", 2.0_f64.sqrt())
            .edge("ca", "c", "a", 0.7)
            .edge("cd", "c", "d", 0.9),
    )?;
    let req = SpectrumRequest::new(0.1, 8.0);
    let compact = eigenvalues_compact(&g, &req)?;
    println!("compact eigenvalues in (0.1, 8]:");
    for e in &compact.eigenvalues {
        println!("  k = {:.10}  (multiplicity {})", e.k, e.multiplicity);
    }

    let og = attach_leads(&g, &["a", "b", "c", "d"])?;
    let zeros = secular_zeros(&og, &req)?;
    println!("zeros of det(I - S):");
    for e in &zeros.eigenvalues {
        println!("  k = {:.10}", e.k);
    }
    Ok(())
}
