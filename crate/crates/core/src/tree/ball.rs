use std::collections::HashMap;
use std::fmt::Write;

use super::vertex::TreeVertex;

/// All vertices within `radius` of `center`, in breadth-first order, with
/// the tree edges between them.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: TreeVertex,
    pub radius: u64,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize)>,
    index: HashMap<TreeVertex, usize>,
}

impl Ball {
    pub fn new(center: TreeVertex, radius: u64) -> Ball {
        let mut vertices = vec![center.clone()];
        let mut index = HashMap::from([(center.clone(), 0)]);
        let mut edges = Vec::new();
        let mut frontier = vec![0];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &i in &frontier {
                for n in vertices[i].neighbors() {
                    if index.contains_key(&n) {
                        continue;
                    }
                    let j = vertices.len();
                    index.insert(n.clone(), j);
                    vertices.push(n);
                    edges.push((i, j));
                    next.push(j);
                }
            }
            frontier = next;
        }
        Ball { center, radius, vertices, edges, index }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &TreeVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Vertices at distance exactly `radius`.
    pub fn sphere(&self) -> impl Iterator<Item = &TreeVertex> {
        self.vertices.iter().filter(|v| v.distance(&self.center) == self.radius)
    }

    /// Graphviz source; apartment vertices are filled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph ball {\n  node [shape=circle, fontsize=9];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let style = if v.on_apartment() { ", style=filled, fillcolor=lightblue" } else { "" };
            let _ = writeln!(out, "  v{i} [label=\"{v}\"{style}];");
        }
        for (i, j) in &self.edges {
            let _ = writeln!(out, "  v{i} -- v{j};");
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    #[test]
    fn ball_sizes() {
        for q in [2u64, 3, 4] {
            let b = Ball::new(TreeVertex::apartment(Field::of_order(q).unwrap(), 0), 3);
            // 1 + (q+1)(1 + q + q²)
            assert_eq!(b.len() as u64, 1 + (q + 1) * (1 + q + q * q));
            assert_eq!(b.edges.len(), b.len() - 1);
            assert_eq!(b.sphere().count() as u64, (q + 1) * q * q);
        }
    }

    #[test]
    fn every_interior_vertex_has_full_degree() {
        let b = Ball::new(TreeVertex::apartment(Field::of_order(3).unwrap(), 2), 3);
        for v in b.vertices.iter().filter(|v| v.distance(&b.center) < 3) {
            assert_eq!(v.neighbors().iter().filter(|n| b.index_of(n).is_some()).count(), 4);
        }
    }

    #[test]
    fn dot_highlights_the_apartment() {
        let b = Ball::new(TreeVertex::apartment(Field::of_order(2).unwrap(), 0), 2);
        let dot = b.to_dot();
        assert!(dot.starts_with("graph ball {"));
        assert_eq!(dot.matches("filled").count(), 5);
        assert_eq!(dot.matches(" -- ").count(), b.len() - 1);
    }
}
