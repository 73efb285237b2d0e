//! Bundled benchmark data.

use crate::problem::{parse_edgelist, MaxCutGraph};

/// Edge lists of the 19 non-isomorphic connected 3-regular graphs on 10
/// vertices, in the bundled file order. The same files ship under
/// `data/cubic10/` for use through the command line.
pub const CUBIC10_EDGE_LISTS: [&str; 19] = [
    include_str!("../data/cubic10/graph_00.edges"),
    include_str!("../data/cubic10/graph_01.edges"),
    include_str!("../data/cubic10/graph_02.edges"),
    include_str!("../data/cubic10/graph_03.edges"),
    include_str!("../data/cubic10/graph_04.edges"),
    include_str!("../data/cubic10/graph_05.edges"),
    include_str!("../data/cubic10/graph_06.edges"),
    include_str!("../data/cubic10/graph_07.edges"),
    include_str!("../data/cubic10/graph_08.edges"),
    include_str!("../data/cubic10/graph_09.edges"),
    include_str!("../data/cubic10/graph_10.edges"),
    include_str!("../data/cubic10/graph_11.edges"),
    include_str!("../data/cubic10/graph_12.edges"),
    include_str!("../data/cubic10/graph_13.edges"),
    include_str!("../data/cubic10/graph_14.edges"),
    include_str!("../data/cubic10/graph_15.edges"),
    include_str!("../data/cubic10/graph_16.edges"),
    include_str!("../data/cubic10/graph_17.edges"),
    include_str!("../data/cubic10/graph_18.edges"),
];

/// The curated set of all 19 connected 3-regular graphs on 10 vertices.
pub fn cubic_graphs_n10() -> Vec<MaxCutGraph> {
    CUBIC10_EDGE_LISTS
        .iter()
        .map(|text| parse_edgelist(text).expect("bundled edge lists are well-formed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nineteen_cubic_graphs_load() {
        let graphs = cubic_graphs_n10();
        assert_eq!(graphs.len(), 19);
        for g in &graphs {
            assert_eq!(g.num_vertices(), 10);
            assert_eq!(g.num_edges(), 15);
            for v in 0..10 {
                assert_eq!(g.degree(v), 3);
            }
            assert!(g.is_connected());
        }
        // All distinct as labeled edge sets.
        for i in 0..graphs.len() {
            for j in (i + 1)..graphs.len() {
                assert_ne!(graphs[i], graphs[j]);
            }
        }
    }
}
