//! Resonance poles of a lead attached to two Dirichlet-terminated edges.
//! The poles sit at (2m+1)pi/2 - i ln(3)/2; the embedded modes at m*pi are
//! reported separately as bound states.

use std::f64::consts::PI;

use qgs::graph::{attach_leads, build_graph, GraphDescription, VertexCondition};
use qgs::resonances::{find_poles, PoleOptions, Rect};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = build_graph(
        &GraphDescription::default()
            .vertex("v", VertexCondition::neumann())
            .vertex("a", VertexCondition::dirichlet())
            .vertex("b", VertexCondition::dirichlet())
            .edge("1", "v", "a", 1.0)
            .edge("2", "v", "b", 1.0),
    )?;
    let og = attach_leads(&g, &["v"])?;
    let set = find_poles(&og, &Rect::new(0.0, 10.0, -2.0, 0.0), &PoleOptions::default())?;
    for (m, p) in set.poles.iter().enumerate() {
        let exact = ((2 * m + 1) as f64 * PI / 2.0, -(3f64.ln()) / 2.0);
        println!("pole {:.12} (exact {:.12}{:+.12}i), multiplicity {}", p.k, exact.0, exact.1, p.multiplicity);
    }
    for b in &set.bound_states {
        println!("bound state at k = {:.12}", b.k.re);
    }
    Ok(())
}
