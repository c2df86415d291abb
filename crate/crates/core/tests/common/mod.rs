//! Shared fixtures and the brute-force clustering oracle.

#![allow(dead_code, clippy::needless_range_loop)]

use multilat::geometry::{circle_intersections, tolerance, IntersectionResult};
use multilat::{Circle, ClusterOptions, FavourRule, Method, PairPolicy, Point2};
use rand::Rng;

/// Kept candidate: `(i, j, slot, point)`.
pub type Member = (usize, usize, u8, Point2);

/// Straight nested-loop clustering, written independently of the library's
/// pair scan. Intersection points come from the geometry module.
pub fn oracle_cluster(method: Method, circles: &[Circle], opts: &ClusterOptions) -> Vec<Member> {
    let n = circles.len();
    let mut out = Vec::new();

    // collect pairs first so the strict policy can look at all of them
    let mut pairs: Vec<(usize, usize, Vec<Point2>, f64)> = Vec::new();
    let mut some_pair_missing = false;
    for i in 0..n {
        for j in 0..n {
            if j <= i {
                continue;
            }
            let tau = tolerance(&[
                circles[i].radius,
                circles[j].radius,
                circles[i].center.distance(circles[j].center),
            ]);
            match circle_intersections(&circles[i], &circles[j]) {
                IntersectionResult::Two(p, q) => pairs.push((i, j, vec![p, q], tau)),
                IntersectionResult::Tangent(p) => pairs.push((i, j, vec![p], tau)),
                IntersectionResult::Empty => some_pair_missing = true,
                IntersectionResult::Coincident => {}
            }
        }
    }

    if method == Method::M2 {
        for (i, j, points, tau) in &pairs {
            for (slot, p) in points.iter().enumerate() {
                let mut inside_every_other = true;
                for k in 0..n {
                    if k == *i || k == *j {
                        continue;
                    }
                    let eps = tau.max(tolerance(&[circles[k].radius]));
                    if p.distance(circles[k].center) > circles[k].radius + eps {
                        inside_every_other = false;
                    }
                }
                if inside_every_other {
                    out.push((*i, *j, slot as u8, *p));
                }
            }
        }
        return out;
    }

    if opts.pairs == PairPolicy::RequireAll && some_pair_missing {
        return out;
    }
    for (i, j, points, _) in &pairs {
        let mut favour = vec![0usize; points.len()];
        if points.len() == 1 {
            favour[0] = n - 2;
        } else {
            for k in 0..n {
                if k == *i || k == *j {
                    continue;
                }
                let c = circles[k];
                let ca = points[0].distance(c.center);
                let cb = points[1].distance(c.center);
                let (da, db) = match opts.favour {
                    FavourRule::Center => (ca, cb),
                    FavourRule::Boundary => ((ca - c.radius).abs(), (cb - c.radius).abs()),
                };
                if (da - db).abs() <= tolerance(&[ca, cb, c.radius]) {
                    continue;
                }
                if da < db {
                    favour[0] += 1;
                } else {
                    favour[1] += 1;
                }
            }
        }
        for slot in 0..points.len() {
            let own = favour[slot];
            let rival = if points.len() == 2 { favour[1 - slot] } else { 0 };
            let keep = match method {
                Method::M1 => own > 0 && rival == 0,
                Method::M3 => own == n - 2,
                Method::M2 => unreachable!(),
            };
            if keep {
                out.push((*i, *j, slot as u8, points[slot]));
            }
        }
    }
    out
}

/// A node with `n` anchors scattered within `spread` of it, and circles
/// whose radii are the true ranges perturbed by up to `e` (relative).
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, e: f64, spread: f64) -> (Point2, Vec<Circle>) {
    let node = Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    let circles = (0..n)
        .map(|_| {
            let a = Point2::new(
                node.x + rng.gen_range(-spread..spread),
                node.y + rng.gen_range(-spread..spread),
            );
            let d = a.distance(node);
            let factor = 1.0 + e * rng.gen_range(-1.0..=1.0);
            Circle::new(a, (d * factor).max(0.0))
        })
        .collect();
    (node, circles)
}
