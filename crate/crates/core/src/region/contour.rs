//! Marching squares on a node grid with per-vertex refinement.

use std::collections::HashMap;

use num_complex::Complex64;

/// Grid geometry and classification handed to [`trace`].
pub(super) struct Grid<'a> {
    pub nx: usize,
    pub ny: usize,
    pub node: &'a dyn Fn(usize, usize) -> Complex64,
    pub inside: &'a [bool],
    /// Level function, `<= 0` inside.
    pub level: &'a dyn Fn(Complex64) -> f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Edge {
    /// Between nodes `(i, j)` and `(i + 1, j)`.
    H(usize, usize),
    /// Between nodes `(i, j)` and `(i, j + 1)`.
    V(usize, usize),
}

impl Grid<'_> {
    fn is_inside(&self, i: usize, j: usize) -> bool {
        self.inside[j * self.nx + i]
    }

    fn endpoints(&self, e: Edge) -> ((usize, usize), (usize, usize)) {
        match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        }
    }

    /// Bisection along the edge to the last representable point.
    fn crossing(&self, e: Edge) -> Complex64 {
        let (p, q) = self.endpoints(e);
        let (mut a, mut b) = if self.is_inside(p.0, p.1) {
            ((self.node)(p.0, p.1), (self.node)(q.0, q.1))
        } else {
            ((self.node)(q.0, q.1), (self.node)(p.0, p.1))
        };
        for _ in 0..200 {
            let mid = (a + b) * 0.5;
            if mid == a || mid == b {
                break;
            }
            if (self.level)(mid) <= 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        if (self.level)(a).abs() <= (self.level)(b).abs() {
            a
        } else {
            b
        }
    }
}

/// Extracts the level-zero polylines. Closed loops repeat their first point
/// at the end.
pub(super) fn trace(grid: &Grid<'_>) -> Vec<Vec<Complex64>> {
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let corners = [
                grid.is_inside(i, j),
                grid.is_inside(i + 1, j),
                grid.is_inside(i + 1, j + 1),
                grid.is_inside(i, j + 1),
            ];
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            let cut = [
                corners[0] != corners[1],
                corners[1] != corners[2],
                corners[2] != corners[3],
                corners[3] != corners[0],
            ];
            let edges = [bottom, right, top, left];
            let crossing: Vec<Edge> = (0..4).filter(|&k| cut[k]).map(|k| edges[k]).collect();
            match crossing.len() {
                0 => {}
                2 => segments.push((crossing[0], crossing[1])),
                4 => {
                    // Saddle: decide by the cell centre.
                    let a = (grid.node)(i, j);
                    let b = (grid.node)(i + 1, j + 1);
                    let centre_inside = (grid.level)((a + b) * 0.5) <= 0.0;
                    if centre_inside == corners[0] {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!("a square has an even number of sign changes"),
            }
        }
    }

    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut points: HashMap<Edge, Complex64> = HashMap::new();
    let mut point = |e: Edge| *points.entry(e).or_insert_with(|| grid.crossing(e));

    let walk = |start: usize, from: Edge, used: &mut [bool]| -> Vec<Edge> {
        let mut chain = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match incident[&at].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        chain
    };

    let mut chains = Vec::new();
    // Open chains start at edges touched by a single segment (window border).
    let mut starts: Vec<Edge> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    starts.sort_by_key(edge_key);
    for e in starts {
        let k = incident[&e][0];
        if !used[k] {
            chains.push(walk(k, e, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let start = segments[k].0;
            chains.push(walk(k, start, &mut used));
        }
    }
    chains
        .into_iter()
        .map(|chain| chain.into_iter().map(&mut point).collect())
        .collect()
}

fn edge_key(e: &Edge) -> (usize, usize, usize) {
    match *e {
        Edge::H(i, j) => (j, i, 0),
        Edge::V(i, j) => (j, i, 1),
    }
}
