//! Decodes one sampled syndrome history step by step.

use qstack::qec::{self, DecodingGraph};

fn main() -> qstack::Result<()> {
    let graph = DecodingGraph::new(5, 5)?;
    println!("{} vertices, {} edges", graph.n_vertices(), graph.n_edges());

    let hist = qec::sample_errors(&graph, 0.03, 0.03, 4)?;
    println!("error edges {:?}", hist.error);
    println!("hot vertices {:?}", hist.hot);

    let forest = qec::grow_clusters(&graph, &hist.hot);
    let grown = (0..graph.n_edges()).filter(|&e| forest.is_grown(e)).count();
    println!("growth: {} sweeps, {grown} grown edges", forest.sweeps);

    let tree = qec::spanning_forest(&graph, &forest);
    let (correction, peeled) = qec::peel(&graph, &tree, &hist.hot);
    println!("peeled {peeled} tree edges, correction {correction:?}");
    assert_eq!(graph.syndrome(&correction), hist.hot);

    let decoded = qec::decode(&graph, &hist.hot);
    println!(
        "work units {}, logical failure {}",
        decoded.work_units,
        qec::is_logical_failure(&graph, &hist.error, &decoded.correction)
    );
    Ok(())
}
