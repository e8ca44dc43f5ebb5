//! Cross-module integration checks: constructions feeding reduction
//! feeding vectorizers, and the cross-checks between independent routes
//! to the same object.

use tda_core::complex::{alpha_filtration, clique_filtration, rips_filtration, WeightedGraph};
use tda_core::functions::{betti_curve, Grid1D};
use tda_core::geometry::{
    distance_matrix, generate_shape, PointCloud, ShapeKind, ShapeSpec, HELIX_DEFAULT_RADIUS,
};
use tda_core::persistence::{diagrams, persistent_betti};
use tda_core::vectorize::barcode_statistics;

/// The helix generator models an alpha-carbon backbone; its four-point
/// backbone loops close at chord distances inside the 4.5-5.5 window, so
/// the thirteenth barcode statistic must see them.
#[test]
fn helix_dim1_births_fall_in_backbone_window() {
    let helix = generate_shape(&ShapeSpec {
        kind: ShapeKind::Helix {
            radius: HELIX_DEFAULT_RADIUS,
        },
        n: 40,
        noise: 0.0,
        seed: 17,
    })
    .unwrap();
    let filtration = rips_filtration(&distance_matrix(&helix), 2, 12.0).unwrap();
    let diagram = diagrams(&filtration).unwrap();
    let stats = barcode_statistics(&diagram);
    assert!(
        stats[12] >= 1.0,
        "expected dim-1 births in [4.5, 5.5], got {} (all births: {:?})",
        stats[12],
        diagram.bars(1).iter().map(|b| b.birth).collect::<Vec<_>>()
    );
}

/// Independent constructions must agree: the clique filtration of the
/// complete distance graph is the Rips filtration, cell by cell.
#[test]
fn clique_of_complete_graph_equals_rips() {
    let cloud = generate_shape(&ShapeSpec {
        kind: ShapeKind::Sphere { radius: 1.0 },
        n: 12,
        noise: 0.3,
        seed: 23,
    })
    .unwrap();
    let dm = distance_matrix(&cloud);
    let mut edges = Vec::new();
    for i in 0..cloud.len() {
        for j in (i + 1)..cloud.len() {
            edges.push((i, j, dm.get(i, j)));
        }
    }
    let graph = WeightedGraph::new(cloud.len(), edges).unwrap();
    let from_clique = clique_filtration(&graph, 3).unwrap();
    let from_rips = rips_filtration(&dm, 3, f64::INFINITY).unwrap();
    assert_eq!(from_clique.len(), from_rips.len());
    for i in 0..from_rips.len() {
        assert_eq!(
            from_clique.cell(i).vertex_ids(),
            from_rips.cell(i).vertex_ids(),
            "cell order diverged at {i}"
        );
        assert!(
            (from_clique.value(i) - from_rips.value(i)).abs() < 1e-12,
            "value diverged at {i}: {} vs {}",
            from_clique.value(i),
            from_rips.value(i)
        );
    }
}

/// Alpha complexes triangulate a subset of the full Rips skeleton: every
/// alpha cell appears (as a vertex set) in the unbounded-scale Rips
/// filtration.
#[test]
fn alpha_cells_are_rips_cells() {
    let cloud = generate_shape(&ShapeSpec {
        kind: ShapeKind::Circle { radius: 1.0 },
        n: 14,
        noise: 0.2,
        seed: 31,
    })
    .unwrap();
    let alpha = alpha_filtration(&cloud).unwrap();
    let rips = rips_filtration(&distance_matrix(&cloud), 2, f64::INFINITY).unwrap();
    for (cell, _) in alpha.cells() {
        assert!(
            rips.position(cell).is_some(),
            "alpha cell {:?} missing from the complete Rips complex",
            cell.vertex_ids()
        );
    }
    assert!(alpha.len() <= rips.len());
}

/// Statistical fixture: 100 points on a noisy circle still produce one
/// dominant loop.
#[test]
fn noisy_circle_has_one_dominant_loop() {
    let cloud = generate_shape(&ShapeSpec {
        kind: ShapeKind::Circle { radius: 1.0 },
        n: 100,
        noise: 0.05,
        seed: 77,
    })
    .unwrap();
    let diagram = diagrams(&rips_filtration(&distance_matrix(&cloud), 2, 2.5).unwrap()).unwrap();
    let mut persistences: Vec<f64> = diagram
        .bars(1)
        .iter()
        .map(|b| b.persistence())
        .collect();
    persistences.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(!persistences.is_empty());
    if persistences.len() > 1 {
        assert!(
            persistences[0] > 5.0 * persistences[1],
            "dominance {:?}",
            &persistences[..2]
        );
    }
}

/// Six near-cocircular points under alpha yield the loop (0.5, 1.0); the
/// same configuration under Rips yields (1, sqrt3). Exercised end to end
/// here because the two conventions (circumradius vs diameter) are easy
/// to conflate.
#[test]
fn hexagon_under_both_conventions() {
    let hexagon: Vec<Vec<f64>> = (0..6)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 6.0;
            vec![a.cos(), a.sin()]
        })
        .collect();
    let cloud = PointCloud::new(hexagon, "hexagon").unwrap();
    let alpha = diagrams(&alpha_filtration(&cloud).unwrap()).unwrap();
    assert_eq!(alpha.count(1), 1);
    assert!((alpha.bars(1)[0].birth - 0.5).abs() < 1e-6);
    assert!((alpha.bars(1)[0].death - 1.0).abs() < 1e-6);

    let rips = diagrams(&rips_filtration(&distance_matrix(&cloud), 2, 2.0).unwrap()).unwrap();
    assert_eq!(rips.count(1), 1);
    assert!((rips.bars(1)[0].birth - 1.0).abs() < 1e-12);
    assert!((rips.bars(1)[0].death - 3f64.sqrt()).abs() < 1e-12);

    // Functional readings off the same diagram: the Betti curve sees the
    // loop alive at x = 1.2, and the component count of the final
    // complex appears as the essential dim-0 reading.
    let grid = Grid1D::new(0.0, 2.0, 11).unwrap();
    let curve = betti_curve(rips.bars(1), &grid);
    assert_eq!(curve[6], 1.0); // x = 1.2
    assert_eq!(persistent_betti(&rips, 1, 1.2, 0.0), 1);
    assert_eq!(persistent_betti(&rips, 0, 0.0, 1e12), 1);
}
