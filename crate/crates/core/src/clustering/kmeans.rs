use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{centroid_of, Partition, Position};
use crate::seed::stream_rng;

const MAX_LLOYD_ITERATIONS: usize = 300;

fn dist2(a: Position, b: Position) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

/// Index of the nearest center, lowest index on ties.
fn nearest(p: Position, centers: &[Position]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bd), (i, c)| {
            let d = dist2(p, *c);
            if d < bd {
                (i, d)
            } else {
                (bi, bd)
            }
        })
}

/// D^2 seeding: the first center is uniform, each next one is drawn with
/// probability proportional to the squared distance to the closest center
/// chosen so far.
fn seed_centers(points: &[Position], k: usize, rng: &mut impl Rng) -> Vec<Position> {
    let mut chosen = vec![false; points.len()];
    let first = rng.random_range(0..points.len());
    chosen[first] = true;
    let mut centers = vec![points[first]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(*p, points[first])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, w) in d2.iter().enumerate() {
                acc += w;
                if *w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave `target` just above the final sum
            pick.unwrap_or_else(|| d2.iter().rposition(|w| *w > 0.0).unwrap())
        } else {
            chosen.iter().position(|c| !c).unwrap()
        };
        chosen[pick] = true;
        centers.push(points[pick]);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(dist2(*p, points[pick]));
        }
    }
    centers
}

/// Gives every empty cluster the point farthest from its own center, taken
/// from a cluster that keeps at least one member.
fn fill_empty(points: &[Position], centers: &mut [Position], assign: &mut [usize]) {
    let k = centers.len();
    let mut sizes = vec![0usize; k];
    for &c in assign.iter() {
        sizes[c] += 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let donor = (0..points.len())
            .filter(|&i| sizes[assign[i]] >= 2)
            .fold(None, |best: Option<(usize, f64)>, i| {
                let d = dist2(points[i], centers[assign[i]]);
                match best {
                    Some((_, bd)) if bd >= d => best,
                    _ => Some((i, d)),
                }
            })
            .map(|(i, _)| i)
            .expect("k <= number of points leaves a cluster with two members");
        sizes[assign[donor]] -= 1;
        assign[donor] = empty;
        sizes[empty] += 1;
        centers[empty] = points[donor];
    }
}

/// Relabels clusters in order of first appearance.
fn canonical_labels(assign: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    assign
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing. The returned partition indexes `points`, has no empty cluster,
/// and numbers clusters in order of their lowest member index.
pub fn kmeans_pp(points: &[Position], num_clusters: usize, seed: u64) -> Result<Partition> {
    if num_clusters == 0 {
        return Err(Error::Config("k-means needs at least one cluster".into()));
    }
    if num_clusters > points.len() {
        return Err(Error::Config(format!(
            "cannot form {num_clusters} clusters from {} points",
            points.len()
        )));
    }
    let mut rng = stream_rng(seed, "kmeans++", num_clusters as u64);
    let mut centers = seed_centers(points, num_clusters, &mut rng);
    let mut assign: Vec<usize> = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut next: Vec<usize> = points.iter().map(|p| nearest(*p, &centers).0).collect();
        fill_empty(points, &mut centers, &mut next);
        if next == assign {
            break;
        }
        assign = next;
        let mut members = vec![Vec::new(); num_clusters];
        for (i, &c) in assign.iter().enumerate() {
            members[c].push(points[i]);
        }
        for (c, m) in centers.iter_mut().zip(&members) {
            *c = centroid_of(m.iter().copied());
        }
    }
    Partition::new(num_clusters, canonical_labels(&assign, num_clusters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(cx: f64, cy: f64, n: usize) -> Vec<Position> {
        (0..n)
            .map(|i| {
                let t = i as f64 * 2.399;
                Position::new(cx + (i % 5) as f64 * 0.3 * t.cos(), cy + (i % 7) as f64 * 0.3 * t.sin())
            })
            .collect()
    }

    #[test]
    fn separated_blobs_are_recovered() {
        let mut pts = blob(0.0, 0.0, 30);
        pts.extend(blob(100.0, 100.0, 25));
        for seed in 0..10 {
            let part = kmeans_pp(&pts, 2, seed).unwrap();
            assert!(part.assignment()[..30].iter().all(|&c| c == 0));
            assert!(part.assignment()[30..].iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn one_cluster_takes_everything() {
        let pts = blob(3.0, 4.0, 12);
        let part = kmeans_pp(&pts, 1, 5).unwrap();
        assert!(part.assignment().iter().all(|&c| c == 0));
    }

    #[test]
    fn singleton_clusters_when_k_equals_n() {
        let pts: Vec<Position> = (0..9).map(|i| Position::new(i as f64, (i * i) as f64)).collect();
        let part = kmeans_pp(&pts, 9, 1).unwrap();
        assert_eq!(part.assignment(), &(0..9).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let pts = vec![Position::new(1.0, 1.0); 6];
        let part = kmeans_pp(&pts, 4, 2).unwrap();
        assert!(part.cluster_sizes().iter().all(|&s| s >= 1));
    }

    #[test]
    fn too_many_clusters_is_an_error() {
        let pts = blob(0.0, 0.0, 3);
        assert!(kmeans_pp(&pts, 4, 0).is_err());
        assert!(kmeans_pp(&pts, 0, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn deterministic_and_nonempty(seed in 0u64..500, k in 1usize..8,
                                      pts in proptest::collection::vec((0.0..100.0f64, 0.0..100.0f64), 8..60)) {
            let pts: Vec<Position> = pts.into_iter().map(|(x, y)| Position::new(x, y)).collect();
            let a = kmeans_pp(&pts, k, seed).unwrap();
            let b = kmeans_pp(&pts, k, seed).unwrap();
            proptest::prop_assert_eq!(&a, &b);
            proptest::prop_assert!(a.cluster_sizes().iter().all(|&s| s >= 1));
        }
    }
}
