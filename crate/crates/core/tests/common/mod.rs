//! Brute-force reference implementations shared by test targets. They are
//! written independently of the library code they check.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use recnn::dataio::{LabelMap, IGNORE_LABEL};
use recnn::region::Connectivity;

/// Component labeling by breadth-first flood fill from every unvisited pixel.
pub fn bfs_components(map: &LabelMap, conn: Connectivity) -> Vec<u32> {
    let (h, w) = (map.height() as isize, map.width() as isize);
    let mut out = vec![0u32; (h * w) as usize];
    let mut next = 0;
    let steps: &[(isize, isize)] = match conn {
        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Connectivity::Eight => &[
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ],
    };
    for start in 0..(h * w) as usize {
        let class = map.labels()[start];
        if class == IGNORE_LABEL || out[start] != 0 {
            continue;
        }
        next += 1;
        out[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let (r, c) = (p as isize / w, p as isize % w);
            for (dr, dc) in steps {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= h || nc >= w {
                    continue;
                }
                let n = (nr * w + nc) as usize;
                if out[n] == 0 && map.labels()[n] == class {
                    out[n] = next;
                    queue.push_back(n);
                }
            }
        }
    }
    out
}

/// True when two labelings induce the same partition (0 must map to 0).
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| {
        (x == 0) == (y == 0) && *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
    })
}

pub fn brute_region_distance(q: &[Vec<f64>], r: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for a in q {
        let mut best = f64::INFINITY;
        for b in r {
            let mut s = 0.0;
            for k in 0..a.len() {
                s += (a[k] - b[k]) * (a[k] - b[k]);
            }
            if s.sqrt() < best {
                best = s.sqrt();
            }
        }
        total += best;
    }
    total / q.len() as f64
}
