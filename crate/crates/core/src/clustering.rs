//! Intersection-point clustering.
//!
//! Every pair of anchor circles contributes its intersection points as
//! candidates. A method keeps a subset (the cluster) and the node position
//! is the centroid of that subset.
//!
//! * Method 1: for a pair with two points, each other circle awards a
//!   favour point to the candidate nearer to it. A candidate is kept when it
//!   has at least one favour point and its rival has none.
//! * Method 2: a candidate is kept when it lies inside (boundary inclusive)
//!   every circle other than its own pair.
//! * Method 3: a candidate is kept only when every other circle favours it.
//!
//! Ties in favour awarding (equal distances within tolerance) award nothing,
//! so Method 3 is always a subset of Method 1. Tangent pairs yield a single
//! candidate with no rival; it holds every favour point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, circle_intersections, point_in_circle, tolerance, IntersectionResult};
use crate::{Circle, Error, Point2, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    M1,
    M2,
    M3,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::M1, Method::M2, Method::M3];

    pub fn name(self) -> &'static str {
        match self {
            Method::M1 => "M1",
            Method::M2 => "M2",
            Method::M3 => "M3",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m1" | "1" => Ok(Method::M1),
            "m2" | "2" => Ok(Method::M2),
            "m3" | "3" => Ok(Method::M3),
            _ => Err(Error::invalid(format!("unknown method '{s}'"))),
        }
    }
}

/// What "nearer to another circle" means when awarding favour points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FavourRule {
    /// Smaller gap `| |p - c_k| - r_k |` to the other circle's boundary.
    #[default]
    Boundary,
    /// Smaller distance `|p - c_k|` to the other circle's center.
    Center,
}

impl FromStr for FavourRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boundary" => Ok(FavourRule::Boundary),
            "center" | "centre" => Ok(FavourRule::Center),
            _ => Err(Error::invalid(format!("unknown favour rule '{s}'"))),
        }
    }
}

/// Treatment of circle pairs that do not intersect (Methods 1 and 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    /// Ignore the pair and use the others.
    #[default]
    SkipMissing,
    /// Any non-intersecting pair yields an empty cluster.
    RequireAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterOptions {
    pub favour: FavourRule,
    pub pairs: PairPolicy,
}

/// Intersection points of circles `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePair {
    pub i: usize,
    pub j: usize,
    pub first: Point2,
    /// `None` for a tangent pair.
    pub second: Option<Point2>,
    /// Classification tolerance of this pair.
    pub tau: f64,
}

impl CandidatePair {
    /// `(slot, point)` for each candidate; slot 0 is `first`.
    pub fn points(&self) -> impl Iterator<Item = (u8, Point2)> {
        std::iter::once((0, self.first)).chain(self.second.map(|p| (1, p)))
    }

    fn others(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..n).filter(move |&k| k != self.i && k != self.j)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairScan {
    pub pairs: Vec<CandidatePair>,
    /// Pairs with no common point (coincident pairs are not counted).
    pub missing: usize,
}

/// Intersects every pair `i < j`, in lexicographic order.
pub fn candidate_pairs(circles: &[Circle]) -> PairScan {
    let n = circles.len();
    let mut scan = PairScan {
        pairs: Vec::with_capacity(n * n.saturating_sub(1) / 2),
        missing: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&circles[i], &circles[j]);
            let tau = tolerance(&[a.radius, b.radius, a.center.distance(b.center)]);
            let (first, second) = match circle_intersections(a, b) {
                IntersectionResult::Two(p, q) => (p, Some(q)),
                IntersectionResult::Tangent(p) => (p, None),
                IntersectionResult::Empty => {
                    scan.missing += 1;
                    continue;
                }
                IntersectionResult::Coincident => continue,
            };
            scan.pairs.push(CandidatePair { i, j, first, second, tau });
        }
    }
    scan
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FavourTally {
    pub fp_a: usize,
    pub fp_b: usize,
}

/// Favour points of a two-point pair against every other circle.
pub fn favour_points(
    pair: &CandidatePair,
    circles: &[Circle],
    rule: FavourRule,
) -> Result<FavourTally> {
    let n = circles.len();
    if n < 3 {
        return Err(Error::TooFewAnchors(n));
    }
    let rival = pair
        .second
        .ok_or_else(|| Error::invalid("favour points need a pair with two points"))?;
    Ok(tally(pair.first, rival, pair.others(n).map(|k| &circles[k]), rule))
}

fn tally<'a>(
    a: Point2,
    b: Point2,
    others: impl Iterator<Item = &'a Circle>,
    rule: FavourRule,
) -> FavourTally {
    let mut t = FavourTally::default();
    for c in others {
        let (ca, cb) = (a.distance(c.center), b.distance(c.center));
        let tol = tolerance(&[ca, cb, c.radius]);
        let (da, db) = match rule {
            FavourRule::Center => (ca, cb),
            FavourRule::Boundary => ((ca - c.radius).abs(), (cb - c.radius).abs()),
        };
        if (da - db).abs() <= tol {
            continue;
        }
        if da < db {
            t.fp_a += 1;
        } else {
            t.fp_b += 1;
        }
    }
    t
}

/// A kept candidate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterMember {
    pub point: Point2,
    pub pair: (usize, usize),
    pub slot: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub method: Method,
    pub members: Vec<ClusterMember>,
}

impl Cluster {
    fn new(method: Method) -> Self {
        Cluster { method, members: Vec::new() }
    }

    pub fn points(&self) -> Vec<Point2> {
        self.members.iter().map(|m| m.point).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, pair: (usize, usize), slot: u8) -> bool {
        self.members.iter().any(|m| m.pair == pair && m.slot == slot)
    }

    fn push(&mut self, pair: &CandidatePair, slot: u8, point: Point2) {
        self.members.push(ClusterMember { point, pair: (pair.i, pair.j), slot });
    }
}

fn check_count(circles: &[Circle]) -> Result<()> {
    if circles.len() < 3 {
        Err(Error::TooFewAnchors(circles.len()))
    } else {
        Ok(())
    }
}

/// Shared body of Methods 1 and 3; `accept(own, rival, others)` decides.
fn favour_method(
    method: Method,
    circles: &[Circle],
    opts: &ClusterOptions,
    accept: impl Fn(usize, usize, usize) -> bool,
) -> Result<Cluster> {
    check_count(circles)?;
    let n = circles.len();
    let scan = candidate_pairs(circles);
    let mut cluster = Cluster::new(method);
    if opts.pairs == PairPolicy::RequireAll && scan.missing > 0 {
        return Ok(cluster);
    }
    for pair in &scan.pairs {
        match pair.second {
            None => {
                if accept(n - 2, 0, n - 2) {
                    cluster.push(pair, 0, pair.first);
                }
            }
            Some(second) => {
                let t = tally(pair.first, second, pair.others(n).map(|k| &circles[k]), opts.favour);
                if accept(t.fp_a, t.fp_b, n - 2) {
                    cluster.push(pair, 0, pair.first);
                } else if accept(t.fp_b, t.fp_a, n - 2) {
                    cluster.push(pair, 1, second);
                }
            }
        }
    }
    Ok(cluster)
}

pub fn method1(circles: &[Circle], opts: &ClusterOptions) -> Result<Cluster> {
    favour_method(Method::M1, circles, opts, |own, rival, _| own > 0 && rival == 0)
}

pub fn method2(circles: &[Circle]) -> Result<Cluster> {
    check_count(circles)?;
    let n = circles.len();
    let mut cluster = Cluster::new(Method::M2);
    for pair in &candidate_pairs(circles).pairs {
        for (slot, p) in pair.points() {
            let inside_all = pair.others(n).all(|k| {
                let c = &circles[k];
                point_in_circle(p, c, pair.tau.max(tolerance(&[c.radius])))
            });
            if inside_all {
                cluster.push(pair, slot, p);
            }
        }
    }
    Ok(cluster)
}

pub fn method3(circles: &[Circle], opts: &ClusterOptions) -> Result<Cluster> {
    favour_method(Method::M3, circles, opts, |own, _, others| own == others)
}

pub fn form_cluster(method: Method, circles: &[Circle], opts: &ClusterOptions) -> Result<Cluster> {
    match method {
        Method::M1 => method1(circles, opts),
        Method::M2 => method2(circles),
        Method::M3 => method3(circles, opts),
    }
}

/// Centroid of the cluster points.
pub fn estimate_position(cluster: &Cluster) -> Result<Point2> {
    geometry::centroid(&cluster.points())
}
